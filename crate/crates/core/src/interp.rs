//! Real polynomial interpolation helpers for the MatDot decoder.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// `n` Chebyshev nodes of the first kind, `cos((2i+1)π / 2n)`, descending.
pub fn chebyshev_points(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| libm::cos((2 * i + 1) as f64 * core::f64::consts::PI / (2 * n) as f64))
        .collect()
}

/// Barycentric weights `1 / Π_{j≠i} (x_i − x_j)`.
pub fn barycentric_weights(points: &[f64]) -> Result<Vec<f64>> {
    let mut w = vec![1.0; points.len()];
    for (i, &xi) in points.iter().enumerate() {
        for (j, &xj) in points.iter().enumerate() {
            if i != j {
                let d = xi - xj;
                if d == 0.0 {
                    return Err(Error::InvalidScheme("evaluation points must be distinct".into()));
                }
                w[i] *= d;
            }
        }
        w[i] = 1.0 / w[i];
    }
    Ok(w)
}

/// Weights `λ` with `Σ_i λ_i p(x_i) = [x^power] p` for every polynomial `p`
/// of degree below `points.len()`.
///
/// The Lagrange basis polynomial of node `i` is `w_i · P(x)/(x − x_i)` with
/// `P` the node polynomial; its `x^power` coefficient comes from deflating
/// `P` by `(x − x_i)`.
pub fn coefficient_weights(points: &[f64], power: usize) -> Result<Vec<f64>> {
    let d = points.len();
    if power >= d {
        return Err(Error::BelowThreshold {
            received: d,
            threshold: power + 1,
        });
    }
    let bary = barycentric_weights(points)?;

    // P(x) = Π (x − x_j), ascending coefficients, degree d.
    let mut node = vec![0.0; d + 1];
    node[0] = 1.0;
    for (deg, &x) in points.iter().enumerate() {
        for k in (1..=deg + 1).rev() {
            node[k] = node[k - 1] - x * node[k];
        }
        node[0] *= -x;
    }

    let mut q = vec![0.0; d];
    Ok(points
        .iter()
        .zip(&bary)
        .map(|(&x, &w)| {
            q[d - 1] = node[d];
            for k in (1..d).rev() {
                q[k - 1] = node[k] + x * q[k];
            }
            w * q[power]
        })
        .collect())
}
