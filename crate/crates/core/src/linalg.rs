//! Singular value decomposition by one-sided Jacobi rotations.
//!
//! Only the right singular vectors and singular values are produced, which
//! is all the trait analysis needs. Sweeps are in a fixed pair order, so the
//! result is bitwise reproducible for a given input.

use crate::error::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_MAX_SWEEPS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct RightSvd {
    /// Descending.
    pub singular_values: Vec<f64>,
    /// `vectors[j]` is the right singular vector paired with `singular_values[j]`.
    pub vectors: Vec<Vec<f64>>,
    pub sweeps: usize,
}

/// Decomposes a row-major `rows × cols` matrix.
///
/// Returns `cols` singular values (trailing ones are zero when `rows < cols`)
/// together with an orthonormal basis of right singular vectors.
pub fn right_svd(data: &[f64], rows: usize, cols: usize, tol: f64, max_sweeps: usize) -> Result<RightSvd> {
    assert_eq!(data.len(), rows * cols, "matrix shape mismatch");
    // column-major working copy
    let mut a: Vec<Vec<f64>> = (0..cols)
        .map(|j| (0..rows).map(|i| data[i * cols + j]).collect())
        .collect();
    let mut v: Vec<Vec<f64>> = (0..cols)
        .map(|j| (0..cols).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    // columns this small are numerical zeros; rotating them only churns rounding noise
    let frob2: f64 = data.iter().map(|x| x * x).sum();
    let negligible = (1e3 * f64::EPSILON).powi(2) * frob2;

    let mut sweeps = 0;
    loop {
        if sweeps == max_sweeps {
            return Err(Error::NoConvergence { iterations: sweeps });
        }
        sweeps += 1;
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let (alpha, beta, gamma) = gram(&a[p], &a[q]);
                if gamma == 0.0
                    || alpha.min(beta) <= negligible
                    || gamma.abs() <= tol * (alpha * beta).sqrt()
                {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut a, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = a.iter().map(|col| col.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    // stable: equal singular values keep column order
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    Ok(RightSvd {
        singular_values: order.iter().map(|&j| norms[j]).collect(),
        vectors: order.into_iter().map(|j| v[j].clone()).collect(),
        sweeps,
    })
}

fn gram(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let mut alpha = 0.0;
    let mut beta = 0.0;
    let mut gamma = 0.0;
    for (a, b) in x.iter().zip(y) {
        alpha += a * a;
        beta += b * b;
        gamma += a * b;
    }
    (alpha, beta, gamma)
}

fn rotate(m: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (left, right) = m.split_at_mut(q);
    let (cp, cq) = (&mut left[p], &mut right[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, yq) = (*x, *y);
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix() {
        let svd = right_svd(&[3.0, 0.0, 0.0, 5.0], 2, 2, DEFAULT_TOLERANCE, DEFAULT_MAX_SWEEPS).unwrap();
        assert_eq!(svd.singular_values, vec![5.0, 3.0]);
        assert_eq!(svd.vectors[0], vec![0.0, 1.0]);
    }

    #[test]
    fn sweep_limit_reports_iterations() {
        let data = [1.0, 2.0, 3.0, 4.0, 5.0, 7.0];
        match right_svd(&data, 3, 2, DEFAULT_TOLERANCE, 1) {
            Err(Error::NoConvergence { iterations }) => assert_eq!(iterations, 1),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn wide_matrix_has_trailing_zeros() {
        let data = [1.0, 2.0, 3.0];
        let svd = right_svd(&data, 1, 3, DEFAULT_TOLERANCE, DEFAULT_MAX_SWEEPS).unwrap();
        assert!((svd.singular_values[0] - 14f64.sqrt()).abs() < 1e-12);
        assert!(svd.singular_values[1].abs() < 1e-12);
        assert!(svd.singular_values[2].abs() < 1e-12);
    }
}
