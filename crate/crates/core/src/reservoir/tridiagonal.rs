//! Implicit QL iteration with Wilkinson shifts for real symmetric
//! tridiagonal matrices.
//!
//! The eigenvector matrix is the product of the Givens rotations applied
//! from the right, so each of its rows evolves independently of the others.
//! Only the rows asked for are accumulated, which makes the cost O(n^2) per
//! row set instead of O(n^3) for the full basis.

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;

/// Eigenvalues and selected eigenvector rows of a symmetric tridiagonal
/// matrix.
#[derive(Debug, Clone)]
pub struct TridiagonalEigen {
    /// Unsorted eigenvalues.
    pub values: Vec<f64>,
    /// `rows[r][k]` is component `row_indices[r]` of eigenvector `k`.
    pub rows: Vec<Vec<f64>>,
}

/// Diagonalizes the matrix with diagonal `diag` and off-diagonal `off`
/// (`off[i]` couples `i` and `i + 1`). `row_indices` selects which rows of
/// the orthogonal eigenvector matrix are returned.
pub fn eigen(diag: &[f64], off: &[f64], row_indices: &[usize]) -> Result<TridiagonalEigen> {
    let n = diag.len();
    assert_eq!(
        off.len() + 1,
        n.max(1),
        "off-diagonal must have n - 1 entries"
    );
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    let mut z: Vec<Vec<f64>> = row_indices
        .iter()
        .map(|&r| {
            assert!(r < n, "row index {r} out of range");
            let mut row = vec![0.0; n];
            row[r] = 1.0;
            row
        })
        .collect();

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::NoConvergence(l));
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in z.iter_mut() {
                    let f = row[i + 1];
                    row[i + 1] = s * row[i] + c * f;
                    row[i] = c * row[i] - s * f;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    Ok(TridiagonalEigen { values: d, rows: z })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn dense(diag: &[f64], off: &[f64]) -> DMatrix<f64> {
        let n = diag.len();
        let mut h = DMatrix::zeros(n, n);
        for i in 0..n {
            h[(i, i)] = diag[i];
        }
        for (i, &t) in off.iter().enumerate() {
            h[(i, i + 1)] = t;
            h[(i + 1, i)] = t;
        }
        h
    }

    #[test]
    fn reconstructs_random_matrices() {
        let mut rng = StdRng::seed_from_u64(7);
        for n in [1usize, 2, 3, 8, 40] {
            let diag: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let off: Vec<f64> = (1..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let all: Vec<usize> = (0..n).collect();
            let eig = eigen(&diag, &off, &all).unwrap();
            let v = DMatrix::from_fn(n, n, |i, k| eig.rows[i][k]);
            let lam = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(eig.values.clone()));
            let h = dense(&diag, &off);
            assert!((&v * lam * v.transpose() - &h).amax() < 1e-13);
            assert!((v.transpose() * &v - DMatrix::identity(n, n)).amax() < 1e-13);
        }
    }

    #[test]
    fn partial_rows_match_full_rows() {
        let diag = [0.3, -0.1, 0.0, 0.0, 0.2, 0.0];
        let off = [1.0, 4.0, 2.0, 2.0, 2.0];
        let full = eigen(&diag, &off, &[0, 1, 2, 3, 4, 5]).unwrap();
        let part = eigen(&diag, &off, &[0, 1]).unwrap();
        assert_eq!(full.values, part.values);
        assert_eq!(full.rows[0], part.rows[0]);
        assert_eq!(full.rows[1], part.rows[1]);
    }

    #[test]
    fn handles_zero_couplings() {
        let eig = eigen(&[1.0, 2.0, 3.0], &[0.0, 0.0], &[0, 1, 2]).unwrap();
        assert_eq!(eig.values, vec![1.0, 2.0, 3.0]);
        assert_eq!(eig.rows[1], vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn uniform_chain_spectrum_is_analytic() {
        // open chain of n sites with hopping t: 2 t cos(pi j / (n + 1))
        let n = 50;
        let eig = eigen(&vec![0.0; n], &vec![1.5; n - 1], &[]).unwrap();
        let mut got = eig.values;
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut want: Vec<f64> = (1..=n)
            .map(|j| 3.0 * (std::f64::consts::PI * j as f64 / (n + 1) as f64).cos())
            .collect();
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
