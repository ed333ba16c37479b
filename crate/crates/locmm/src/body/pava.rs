//! Euclidean projection onto the monotone (nondecreasing) cone via
//! pool-adjacent-violators with unit weights.

/// Projects `y` onto `{x : x_1 <= x_2 <= ... <= x_n}`.
pub fn project_monotone(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    if n <= 1 {
        return y.to_vec();
    }
    // Blocks of pooled values: (mean, count).
    let mut means: Vec<f64> = Vec::with_capacity(n);
    let mut counts: Vec<usize> = Vec::with_capacity(n);
    for &v in y {
        means.push(v);
        counts.push(1);
        // Pool while the last two blocks violate monotonicity.
        while means.len() > 1 {
            let m = means.len();
            if means[m - 2] <= means[m - 1] {
                break;
            }
            let c1 = counts[m - 2] as f64;
            let c2 = counts[m - 1] as f64;
            let pooled = (means[m - 2] * c1 + means[m - 1] * c2) / (c1 + c2);
            means.truncate(m - 1);
            counts.truncate(m - 1);
            means[m - 2] = pooled;
            counts[m - 2] += c2 as usize;
        }
    }
    let mut out = Vec::with_capacity(n);
    for (m, c) in means.iter().zip(counts.iter()) {
        out.extend(std::iter::repeat(*m).take(*c));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn already_monotone_is_fixed() {
        let y = [1.0, 2.0, 3.0];
        assert_eq!(project_monotone(&y), y.to_vec());
    }

    #[test]
    fn decreasing_pair_pools_to_mean() {
        // Hand-solved 2-D quadratic program: minimize (x1-1)^2 + x2^2
        // subject to x1 <= x2. The unconstrained optimum violates, so the
        // solution sits on the diagonal at the average.
        assert_eq!(project_monotone(&[1.0, 0.0]), vec![0.5, 0.5]);
    }

    #[test]
    fn pooling_cascades_left() {
        let y = [3.0, 2.0, 1.0];
        assert_eq!(project_monotone(&y), vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn partial_pool() {
        let y = [1.0, 3.0, 2.0, 4.0];
        assert_eq!(project_monotone(&y), vec![1.0, 2.5, 2.5, 4.0]);
    }
}
