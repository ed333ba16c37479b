//! Small helpers for points of the model space ℝⁿ.
//!
//! Vectors are plain `Vec<f64>`; every consumer validates dimensions at its
//! boundary, so the helpers here assume matching lengths.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// A point of the model space, `entries.len() == n`.
pub type Vector = Vec<f64>;

pub fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub fn norm(x: &[f64]) -> f64 {
    norm_sq(x).sqrt()
}

pub fn dist_sq(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter()
        .zip(y.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum()
}

pub fn dist(x: &[f64], y: &[f64]) -> f64 {
    dist_sq(x, y).sqrt()
}

pub fn sub(x: &[f64], y: &[f64]) -> Vector {
    x.iter().zip(y.iter()).map(|(a, b)| a - b).collect()
}

pub fn add(x: &[f64], y: &[f64]) -> Vector {
    x.iter().zip(y.iter()).map(|(a, b)| a + b).collect()
}

pub fn scale(x: &[f64], s: f64) -> Vector {
    x.iter().map(|a| a * s).collect()
}

pub fn midpoint(x: &[f64], y: &[f64]) -> Vector {
    x.iter().zip(y.iter()).map(|(a, b)| 0.5 * (a + b)).collect()
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y.iter()).map(|(a, b)| a * b).sum()
}

/// Exact componentwise lexicographic order, first coordinate most
/// significant. Ties in nearest-point selection are broken by taking the
/// least element under this order.
pub fn lex_cmp(x: &[f64], y: &[f64]) -> Ordering {
    for (a, b) in x.iter().zip(y.iter()) {
        match a.total_cmp(b) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    x.len().cmp(&y.len())
}

pub fn check_dimension(expected: usize, x: &[f64]) -> Result<()> {
    if x.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: x.len(),
        });
    }
    Ok(())
}

pub fn check_finite(x: &[f64]) -> Result<()> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("vector has non-finite entries"));
    }
    Ok(())
}
