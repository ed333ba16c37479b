//! Closed convex sets as oracle bundles.
//!
//! A [`ConvexBody`] wraps a [`BodyDescriptor`] and exposes membership,
//! Euclidean projection, diameter, a canonical interior point, and
//! boundary-candidate generation. Membership is distance-based: a point is
//! in the set at tolerance `tol` iff its Euclidean distance to the set is
//! at most `tol`, computed analytically where a closed form exists and via
//! the projection oracle otherwise.
//!
//! Bodies are immutable after construction and all oracle calls are pure,
//! so they are safe for unrestricted concurrent use.

pub mod dykstra;
pub mod ellipsoid;
pub mod l1;
pub mod pava;
pub mod polytope;
pub mod topk;
pub mod weak_lp;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::{check_dimension, check_finite, dist, scale, Vector};

pub use weak_lp::weak_lp_norm;

/// Variant tag plus parameters for every supported set family.
///
/// Unbounded families carry an explicit ambient dimension `n`:
/// the halfspace is `{x : x_1 <= 0}`, the orthant is the nonnegative
/// orthant, the subspace spans the first `dim` coordinates, and the
/// monotone cone is `{x : x_1 <= ... <= x_n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BodyDescriptor {
    /// `prod_i [-a_i/2, a_i/2]`, side lengths `a_i > 0`.
    Hyperrectangle { a: Vec<f64> },
    /// `{x : sum_i x_i^2 / a_i <= 1}`, squared semi-axes sorted ascending.
    Ellipsoid { a: Vec<f64> },
    /// `{x : sum_i |x_i| <= radius}` in dimension `n`.
    #[serde(rename = "l1ball")]
    L1Ball { radius: f64, n: usize },
    /// Convex weak-ℓp unit ball in dimension `n`, `1 < p < 2`.
    WeakLpBall { p: f64, n: usize },
    /// Convex hull of an explicit vertex list.
    #[serde(rename = "polytope")]
    VPolytope { vertices: Vec<Vector> },
    /// Cartesian product of component bodies.
    Product { components: Vec<BodyDescriptor> },
    Halfspace { n: usize },
    Orthant { n: usize },
    Subspace { n: usize, dim: usize },
    MonotoneCone { n: usize },
}

/// A ball constraint used for localized projections.
#[derive(Debug, Clone)]
pub struct Ball {
    pub center: Vector,
    pub radius: f64,
}

impl Ball {
    pub fn project(&self, x: &[f64]) -> Vector {
        let d = dist(x, &self.center);
        if d <= self.radius {
            x.to_vec()
        } else {
            let s = self.radius / d;
            self.center
                .iter()
                .zip(x.iter())
                .map(|(c, v)| c + s * (v - c))
                .collect()
        }
    }

    pub fn distance(&self, x: &[f64]) -> f64 {
        (dist(x, &self.center) - self.radius).max(0.0)
    }
}

/// A closed convex set with oracle access.
#[derive(Debug, Clone)]
pub struct ConvexBody {
    descriptor: BodyDescriptor,
    dimension: usize,
    bounded: bool,
    diameter: f64,
    children: Vec<ConvexBody>,
}

impl ConvexBody {
    pub fn new(descriptor: BodyDescriptor) -> Result<Self> {
        let mut children = Vec::new();
        let (dimension, bounded, diameter) = match &descriptor {
            BodyDescriptor::Hyperrectangle { a } => {
                validate_positive(a, "hyperrectangle side lengths")?;
                let d = a.iter().map(|v| v * v).sum::<f64>().sqrt();
                (a.len(), true, d)
            }
            BodyDescriptor::Ellipsoid { a } => {
                validate_positive(a, "ellipsoid squared semi-axes")?;
                if a.windows(2).any(|w| w[0] > w[1]) {
                    return Err(Error::InvalidDescriptor(
                        "ellipsoid axes must be sorted ascending".into(),
                    ));
                }
                (a.len(), true, 2.0 * a[a.len() - 1].sqrt())
            }
            BodyDescriptor::L1Ball { radius, n } => {
                if !(*radius > 0.0) || *n == 0 {
                    return Err(Error::InvalidDescriptor(
                        "l1 ball needs radius > 0 and n >= 1".into(),
                    ));
                }
                (*n, true, 2.0 * radius)
            }
            BodyDescriptor::WeakLpBall { p, n } => {
                weak_lp::check_p(*p)?;
                if *n == 0 {
                    return Err(Error::InvalidDescriptor("weak-lp ball needs n >= 1".into()));
                }
                (*n, true, weak_lp::diameter(*n, *p))
            }
            BodyDescriptor::VPolytope { vertices } => {
                if vertices.is_empty() {
                    return Err(Error::InvalidDescriptor("polytope needs vertices".into()));
                }
                let n = vertices[0].len();
                if n == 0 || vertices.iter().any(|v| v.len() != n) {
                    return Err(Error::InvalidDescriptor(
                        "polytope vertices must share a positive dimension".into(),
                    ));
                }
                for v in vertices {
                    check_finite(v)?;
                }
                let mut d = 0.0_f64;
                for (i, v) in vertices.iter().enumerate() {
                    for w in vertices.iter().skip(i + 1) {
                        d = d.max(dist(v, w));
                    }
                }
                (n, true, d)
            }
            BodyDescriptor::Product { components } => {
                if components.is_empty() {
                    return Err(Error::InvalidDescriptor("product needs components".into()));
                }
                for c in components {
                    children.push(ConvexBody::new(c.clone())?);
                }
                let dim = children.iter().map(|c| c.dimension).sum();
                let bounded = children.iter().all(|c| c.bounded);
                let diameter = if bounded {
                    children
                        .iter()
                        .map(|c| c.diameter * c.diameter)
                        .sum::<f64>()
                        .sqrt()
                } else {
                    f64::INFINITY
                };
                (dim, bounded, diameter)
            }
            BodyDescriptor::Halfspace { n }
            | BodyDescriptor::Orthant { n }
            | BodyDescriptor::MonotoneCone { n } => {
                if *n == 0 {
                    return Err(Error::InvalidDescriptor("dimension must be >= 1".into()));
                }
                (*n, false, f64::INFINITY)
            }
            BodyDescriptor::Subspace { n, dim } => {
                if *n == 0 || *dim == 0 || dim > n {
                    return Err(Error::InvalidDescriptor(
                        "subspace needs 1 <= dim <= n".into(),
                    ));
                }
                (*n, false, f64::INFINITY)
            }
        };
        Ok(ConvexBody {
            descriptor,
            dimension,
            bounded,
            diameter,
            children,
        })
    }

    pub fn descriptor(&self) -> &BodyDescriptor {
        &self.descriptor
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn bounded(&self) -> bool {
        self.bounded
    }

    /// Euclidean diameter; `+inf` for unbounded bodies.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// A canonical member used as the default packing/estimation anchor.
    pub fn center(&self) -> Vector {
        match &self.descriptor {
            BodyDescriptor::VPolytope { vertices } => {
                let n = self.dimension;
                let mut c = vec![0.0; n];
                for v in vertices {
                    for (ci, vi) in c.iter_mut().zip(v.iter()) {
                        *ci += vi;
                    }
                }
                let m = vertices.len() as f64;
                c.iter_mut().for_each(|ci| *ci /= m);
                c
            }
            BodyDescriptor::Product { .. } => {
                let mut c = Vec::with_capacity(self.dimension);
                for child in &self.children {
                    c.extend(child.center());
                }
                c
            }
            _ => vec![0.0; self.dimension],
        }
    }

    /// Euclidean distance from `x` to the set (0 for members).
    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        check_dimension(self.dimension, x)?;
        check_finite(x)?;
        match &self.descriptor {
            BodyDescriptor::Hyperrectangle { a } => Ok(x
                .iter()
                .zip(a.iter())
                .map(|(v, ai)| {
                    let over = v.abs() - ai / 2.0;
                    if over > 0.0 {
                        over * over
                    } else {
                        0.0
                    }
                })
                .sum::<f64>()
                .sqrt()),
            BodyDescriptor::Ellipsoid { a } => {
                if ellipsoid::quad_form(x, a) <= 1.0 {
                    Ok(0.0)
                } else {
                    Ok(dist(x, &ellipsoid::project_ellipsoid(x, a)?))
                }
            }
            BodyDescriptor::L1Ball { radius, .. } => {
                if x.iter().map(|v| v.abs()).sum::<f64>() <= *radius {
                    Ok(0.0)
                } else {
                    Ok(dist(x, &l1::project_l1(x, *radius)))
                }
            }
            BodyDescriptor::WeakLpBall { p, .. } => {
                if weak_lp::is_member(x, *p)? {
                    Ok(0.0)
                } else {
                    Ok(dist(x, &weak_lp::project_weak_lp(x, *p)?))
                }
            }
            BodyDescriptor::VPolytope { vertices } => {
                Ok(polytope::project_hull(x, vertices)?.distance)
            }
            BodyDescriptor::Product { .. } => {
                let mut sum = 0.0;
                for (child, part) in self.split(x) {
                    let d = child.distance(part)?;
                    sum += d * d;
                }
                Ok(sum.sqrt())
            }
            BodyDescriptor::Halfspace { .. } => Ok(x[0].max(0.0)),
            BodyDescriptor::Orthant { .. } => Ok(x
                .iter()
                .map(|v| if *v < 0.0 { v * v } else { 0.0 })
                .sum::<f64>()
                .sqrt()),
            BodyDescriptor::Subspace { dim, .. } => Ok(x
                .iter()
                .skip(*dim)
                .map(|v| v * v)
                .sum::<f64>()
                .sqrt()),
            BodyDescriptor::MonotoneCone { .. } => {
                Ok(dist(x, &pava::project_monotone(x)))
            }
        }
    }

    /// True iff `x` is within Euclidean distance `tol` of the set.
    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        if !(tol >= 0.0) {
            return Err(Error::invalid("membership tolerance must be >= 0"));
        }
        Ok(self.distance(x)? <= tol)
    }

    /// Euclidean projection onto the set.
    pub fn project(&self, x: &[f64]) -> Result<Vector> {
        check_dimension(self.dimension, x)?;
        check_finite(x)?;
        match &self.descriptor {
            BodyDescriptor::Hyperrectangle { a } => Ok(x
                .iter()
                .zip(a.iter())
                .map(|(v, ai)| v.clamp(-ai / 2.0, ai / 2.0))
                .collect()),
            BodyDescriptor::Ellipsoid { a } => ellipsoid::project_ellipsoid(x, a),
            BodyDescriptor::L1Ball { radius, .. } => Ok(l1::project_l1(x, *radius)),
            BodyDescriptor::WeakLpBall { p, .. } => weak_lp::project_weak_lp(x, *p),
            BodyDescriptor::VPolytope { vertices } => {
                Ok(polytope::project_hull(x, vertices)?.point)
            }
            BodyDescriptor::Product { .. } => {
                let mut out = Vec::with_capacity(self.dimension);
                for (child, part) in self.split(x) {
                    out.extend(child.project(part)?);
                }
                Ok(out)
            }
            BodyDescriptor::Halfspace { .. } => {
                let mut z = x.to_vec();
                z[0] = z[0].min(0.0);
                Ok(z)
            }
            BodyDescriptor::Orthant { .. } => Ok(x.iter().map(|v| v.max(0.0)).collect()),
            BodyDescriptor::Subspace { dim, .. } => {
                let mut z = x.to_vec();
                z.iter_mut().skip(*dim).for_each(|v| *v = 0.0);
                Ok(z)
            }
            BodyDescriptor::MonotoneCone { .. } => Ok(pava::project_monotone(x)),
        }
    }

    /// Projection onto `B(center, radius) ∩ K` by Dykstra's algorithm.
    ///
    /// `center` must be a member (tolerance 1e-6); the returned point
    /// satisfies both constraints within 1e-6.
    pub fn project_localized(&self, center: &[f64], radius: f64, x: &[f64]) -> Result<Vector> {
        check_dimension(self.dimension, center)?;
        if !(radius > 0.0) {
            return Err(Error::invalid("localization radius must be > 0"));
        }
        if !self.contains(center, 1e-6)? {
            return Err(Error::invalid(
                "localization center is not a member of the body",
            ));
        }
        self.project_constrained(
            &[Ball {
                center: center.to_vec(),
                radius,
            }],
            x,
        )
    }

    /// Projection onto the intersection of the body with a list of balls.
    /// Internal workhorse behind `project_localized`; callers guarantee the
    /// intersection is nonempty (each ball center is a member).
    pub(crate) fn project_constrained(&self, balls: &[Ball], x: &[f64]) -> Result<Vector> {
        check_dimension(self.dimension, x)?;
        if balls.is_empty() {
            return self.project(x);
        }
        let feasible_here = balls.iter().all(|b| b.distance(x) == 0.0) && self.distance(x)? == 0.0;
        if feasible_here {
            return Ok(x.to_vec());
        }
        let mut projectors: Vec<Box<dyn Fn(&[f64]) -> Result<Vector>>> = Vec::new();
        projectors.push(Box::new(move |z: &[f64]| self.project(z)));
        for b in balls {
            let b = b.clone();
            projectors.push(Box::new(move |z: &[f64]| Ok(b.project(z))));
        }
        let z = dykstra::dykstra(x, &projectors, 1e-8, 10_000, "localized projection")?;
        // Feasibility is part of the contract; never return silently
        // inaccurate points.
        let body_res = self.distance(&z)?;
        let ball_res = balls
            .iter()
            .map(|b| b.distance(&z))
            .fold(0.0_f64, f64::max);
        if body_res > 1e-6 || ball_res > 1e-6 {
            return Err(Error::NonConvergence {
                context: "localized projection feasibility",
                iterations: 10_000,
                residual: body_res.max(ball_res),
            });
        }
        Ok(z)
    }

    /// Splits a product-body vector into per-component slices.
    fn split<'a>(&'a self, x: &'a [f64]) -> impl Iterator<Item = (&'a ConvexBody, &'a [f64])> {
        let mut offset = 0;
        self.children.iter().map(move |child| {
            let part = &x[offset..offset + child.dimension];
            offset += child.dimension;
            (child, part)
        })
    }

    /// Deterministic extreme/boundary candidates used as local-entropy
    /// centers: box vertices and face centers, ellipsoid axis endpoints,
    /// ℓ1 spikes, polytope vertices, and scaled ray points for cones.
    /// `scale` sets the magnitude for unbounded families.
    pub fn extreme_points(&self, scale: f64, max: usize) -> Vec<Vector> {
        let n = self.dimension;
        let mut out: Vec<Vector> = Vec::new();
        match &self.descriptor {
            BodyDescriptor::Hyperrectangle { a } => {
                // Face centers, then vertices in sign-pattern order.
                for i in 0..n {
                    for s in [1.0, -1.0] {
                        let mut v = vec![0.0; n];
                        v[i] = s * a[i] / 2.0;
                        out.push(v);
                    }
                }
                let patterns = 1usize << n.min(16);
                for bits in 0..patterns {
                    if out.len() >= max {
                        break;
                    }
                    let v: Vector = (0..n)
                        .map(|i| {
                            let s = if (bits >> i) & 1 == 0 { 1.0 } else { -1.0 };
                            s * a[i] / 2.0
                        })
                        .collect();
                    out.push(v);
                }
            }
            BodyDescriptor::Ellipsoid { a } => {
                for i in 0..n {
                    for s in [1.0, -1.0] {
                        let mut v = vec![0.0; n];
                        v[i] = s * a[i].sqrt();
                        out.push(v);
                    }
                }
            }
            BodyDescriptor::L1Ball { radius, .. } => {
                for i in 0..n {
                    for s in [1.0, -1.0] {
                        let mut v = vec![0.0; n];
                        v[i] = s * radius;
                        out.push(v);
                    }
                }
            }
            BodyDescriptor::WeakLpBall { p, .. } => {
                for i in 0..n {
                    for s in [1.0, -1.0] {
                        let mut v = vec![0.0; n];
                        v[i] = s;
                        out.push(v);
                    }
                }
                // The prefix-saturating extremal profile and its negation.
                let q = 1.0 - 1.0 / p;
                let extremal: Vector = (1..=n)
                    .map(|i| (i as f64).powf(q) - ((i - 1) as f64).powf(q))
                    .collect();
                out.push(scale_vec(&extremal, -1.0));
                out.push(extremal);
            }
            BodyDescriptor::VPolytope { vertices } => {
                out.extend(vertices.iter().cloned());
            }
            BodyDescriptor::Product { .. } => {
                let centers: Vec<Vector> = self.children.iter().map(|c| c.center()).collect();
                for (j, child) in self.children.iter().enumerate() {
                    for e in child.extreme_points(scale, max.saturating_sub(out.len())) {
                        let mut v = Vec::with_capacity(n);
                        for (i, c) in centers.iter().enumerate() {
                            if i == j {
                                v.extend(e.iter().copied());
                            } else {
                                v.extend(c.iter().copied());
                            }
                        }
                        out.push(v);
                        if out.len() >= max {
                            break;
                        }
                    }
                }
            }
            BodyDescriptor::Halfspace { .. } => {
                out.push(vec![0.0; n]);
                let mut interior = vec![0.0; n];
                interior[0] = -scale;
                out.push(interior);
                for i in 1..n {
                    for s in [1.0, -1.0] {
                        let mut v = vec![0.0; n];
                        v[i] = s * scale;
                        out.push(v);
                    }
                }
            }
            BodyDescriptor::Orthant { .. } => {
                out.push(vec![0.0; n]);
                for i in 0..n {
                    let mut v = vec![0.0; n];
                    v[i] = scale;
                    out.push(v);
                }
            }
            BodyDescriptor::Subspace { dim, .. } => {
                out.push(vec![0.0; n]);
                for i in 0..*dim {
                    for s in [1.0, -1.0] {
                        let mut v = vec![0.0; n];
                        v[i] = s * scale;
                        out.push(v);
                    }
                }
            }
            BodyDescriptor::MonotoneCone { .. } => {
                out.push(vec![0.0; n]);
                out.push(vec![scale; n]);
                out.push(vec![-scale; n]);
                // Sorted step rays (-1,..,-1,1,..,1), scaled.
                for k in 1..n {
                    let v: Vector = (0..n)
                        .map(|i| if i < k { -scale } else { scale })
                        .collect();
                    out.push(v);
                }
            }
        }
        out.truncate(max);
        out
    }
}

fn validate_positive(a: &[f64], what: &str) -> Result<()> {
    if a.is_empty() {
        return Err(Error::InvalidDescriptor(format!("{what}: empty")));
    }
    if a.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidDescriptor(format!(
            "{what}: all entries must be strictly positive and finite"
        )));
    }
    Ok(())
}

fn scale_vec(x: &[f64], s: f64) -> Vector {
    scale(x, s)
}
