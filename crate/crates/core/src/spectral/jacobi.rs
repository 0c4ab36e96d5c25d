//! Cyclic Jacobi eigensolver for dense real symmetric matrices.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;
const OFF_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues sorted in descending order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

/// Full decomposition `A = Q Λ Qᵀ`.
pub fn eig_symmetric(a: &DMatrix<f64>) -> Result<SymmetricEigen> {
    let (values, vectors) = jacobi(a, true)?;
    let vectors = vectors.expect("vectors requested");
    let order = descending_order(&values);
    let n = values.len();
    let sorted_values = DVector::from_iterator(n, order.iter().map(|&c| values[c]));
    let mut sorted_vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            sorted_vectors[(r, dst)] = vectors[r * n + src];
        }
    }
    Ok(SymmetricEigen {
        values: sorted_values,
        vectors: sorted_vectors,
    })
}

/// Eigenvalues only, sorted descending.
pub fn eigenvalues_symmetric(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    let (mut values, _) = jacobi(a, false)?;
    values.sort_by(|x, y| y.total_cmp(x));
    Ok(values)
}

fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&x, &y| values[y].total_cmp(&values[x]));
    order
}

fn check_symmetric(a: &DMatrix<f64>) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let n = a.nrows();
    let scale = a.amax().max(1.0);
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    if worst > SYMMETRY_TOL * scale {
        return Err(Error::NotSymmetric(worst));
    }
    Ok(())
}

/// Returns unsorted eigenvalues and, optionally, the row-major eigenvector
/// matrix whose column `c` belongs to eigenvalue `c`.
fn jacobi(input: &DMatrix<f64>, want_vectors: bool) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    check_symmetric(input)?;
    let n = input.nrows();
    // row-major working copy, symmetrised
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = 0.5 * (input[(i, j)] + input[(j, i)]);
        }
    }
    let mut v = want_vectors.then(|| {
        let mut eye = vec![0.0; n * n];
        for i in 0..n {
            eye[i * n + i] = 1.0;
        }
        eye
    });

    let total: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = if total > 0.0 { OFF_TOL * total } else { 0.0 };

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_norm(&a, n) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    let new_p = c * arp - s * arq;
                    let new_q = s * arp + c * arq;
                    a[r * n + p] = new_p;
                    a[p * n + r] = new_p;
                    a[r * n + q] = new_q;
                    a[q * n + r] = new_q;
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;

                if let Some(v) = v.as_mut() {
                    for r in 0..n {
                        let vrp = v[r * n + p];
                        let vrq = v[r * n + q];
                        v[r * n + p] = c * vrp - s * vrq;
                        v[r * n + q] = s * vrp + c * vrq;
                    }
                }
            }
        }
    }
    if !converged && off_norm(&a, n) > threshold {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }
    let values = (0..n).map(|i| a[i * n + i]).collect();
    Ok((values, v))
}

fn off_norm(a: &[f64], n: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[i * n + j] * a[i * n + j];
            }
        }
    }
    sum.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let x: f64 = rng.gen_range(-1.0..1.0);
                a[(i, j)] = x;
                a[(j, i)] = x;
            }
        }
        a
    }

    fn residuals(a: &DMatrix<f64>) -> (f64, f64) {
        let eig = eig_symmetric(a).unwrap();
        let q = &eig.vectors;
        let lambda = DMatrix::from_diagonal(&eig.values);
        let recon = (q * lambda * q.transpose() - a).norm() / a.norm();
        let ortho = (q.transpose() * q - DMatrix::identity(a.nrows(), a.nrows())).norm();
        (recon, ortho)
    }

    #[test]
    fn identity() {
        let vals = eigenvalues_symmetric(&DMatrix::identity(5, 5)).unwrap();
        assert!(vals.iter().all(|&x| x == 1.0));
    }

    #[test]
    fn two_by_two_closed_form() {
        let (a, b) = (0.3, -0.7);
        let m = DMatrix::from_row_slice(2, 2, &[a, b, b, a]);
        let vals = eigenvalues_symmetric(&m).unwrap();
        assert!((vals[0] - (a - b)).abs() < 1e-15);
        assert!((vals[1] - (a + b)).abs() < 1e-15);
    }

    #[test]
    fn sorted_descending() {
        let eig = eig_symmetric(&random_symmetric(12, 3)).unwrap();
        assert!(eig.values.as_slice().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn reconstruction_and_orthogonality() {
        for (n, seed) in [(1, 0), (2, 1), (20, 2), (57, 3), (200, 4)] {
            let (recon, ortho) = residuals(&random_symmetric(n, seed));
            assert!(recon <= 1e-10, "n={n}: reconstruction {recon:e}");
            assert!(ortho <= 1e-10, "n={n}: orthogonality {ortho:e}");
        }
    }

    #[test]
    fn agrees_with_nalgebra() {
        let a = random_symmetric(40, 11);
        let ours = eigenvalues_symmetric(&a).unwrap();
        let mut theirs: Vec<f64> = a.clone().symmetric_eigenvalues().iter().copied().collect();
        theirs.sort_by(|x, y| y.total_cmp(x));
        for (x, y) in ours.iter().zip(&theirs) {
            assert!((x - y).abs() < 1e-12, "{x} vs {y}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(eig_symmetric(&asym), Err(Error::NotSymmetric(_))));
        let rect = DMatrix::<f64>::zeros(2, 3);
        assert!(matches!(
            eigenvalues_symmetric(&rect),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn zero_matrix() {
        let vals = eigenvalues_symmetric(&DMatrix::zeros(4, 4)).unwrap();
        assert_eq!(vals, vec![0.0; 4]);
    }
}
