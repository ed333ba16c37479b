//! Euclidean projection onto the ℓ1 ball by sorted soft-thresholding.

/// Projects `y` onto `{x : sum_i |x_i| <= radius}`.
pub fn project_l1(y: &[f64], radius: f64) -> Vec<f64> {
    let l1: f64 = y.iter().map(|v| v.abs()).sum();
    if l1 <= radius {
        return y.to_vec();
    }
    let mut mags: Vec<f64> = y.iter().map(|v| v.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    // Largest k with mags[k-1] > theta_k, theta_k = (prefix_k - radius)/k.
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &m) in mags.iter().enumerate() {
        cum += m;
        let t = (cum - radius) / (k + 1) as f64;
        if t >= m {
            break;
        }
        theta = t;
    }
    y.iter()
        .map(|&v| v.signum() * (v.abs() - theta).max(0.0))
        .collect()
}
