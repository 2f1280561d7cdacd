//! Symmetric eigendecomposition by cyclic Jacobi rotations.

use super::{Matrix, NumericsError};

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOLERANCE: f64 = 1e-12;
const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// Eigenvalues in descending order with matching orthonormal eigenvector
/// columns.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
    pub sweeps: usize,
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Decomposes a symmetric matrix as `A = V diag(λ) Vᵀ`.
///
/// Sweeps over every (p, q) pair until the off-diagonal Frobenius norm drops
/// to `1e-12 * ||A||_F` or 100 sweeps have run. Eigenvalues come back sorted
/// descending (stable, so equal values keep their diagonal order) and each
/// eigenvector is signed so its largest-magnitude entry is positive.
pub fn eigh_symmetric(a: &Matrix) -> Result<SymmetricEigen, NumericsError> {
    let n = a.rows();
    if n != a.cols() {
        return Err(NumericsError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if !a.is_finite() {
        return Err(NumericsError::NonFinite);
    }
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    if worst > SYMMETRY_TOLERANCE {
        return Err(NumericsError::NotSymmetric { max_diff: worst });
    }

    let mut m = a.clone();
    // Symmetrize exactly so rotations act on a truly symmetric matrix.
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    let mut v = Matrix::identity(n);
    let target = OFF_DIAGONAL_TOLERANCE * a.frobenius_norm();

    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS && off_diagonal_norm(&m) > target {
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if sweeps == MAX_SWEEPS {
        log::warn!(
            "Jacobi eigensolver stopped after {MAX_SWEEPS} sweeps (off-diagonal norm {:e})",
            off_diagonal_norm(&m)
        );
    }

    let mut order: Vec<usize> = (0..n).collect();
    // sort_by is stable: ties keep original index order.
    order.sort_by(|&i, &j| m[(j, j)].total_cmp(&m[(i, i)]));

    let values: Vec<f64> = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut pivot = 0;
        for r in 0..n {
            if v[(r, src)].abs() > v[(pivot, src)].abs() {
                pivot = r;
            }
        }
        let sign = if v[(pivot, src)] < 0.0 { -1.0 } else { 1.0 };
        for r in 0..n {
            vectors[(r, dst)] = sign * v[(r, src)];
        }
    }

    Ok(SymmetricEigen {
        values,
        vectors,
        sweeps,
    })
}

/// One Jacobi rotation annihilating `m[p][q]`, accumulated into `v`.
fn rotate(m: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    if apq == 0.0 {
        return;
    }
    let app = m[(p, p)];
    let aqq = m[(q, q)];
    let theta = (aqq - app) / (2.0 * apq);
    // Smaller root of t² + 2θt - 1 = 0 keeps the rotation angle ≤ π/4.
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let n = m.rows();
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = c * mkp - s * mkq;
        m[(k, q)] = s * mkp + c * mkq;
    }
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = c * mpk - s * mqk;
        m[(q, k)] = s * mpk + c * mqk;
    }
    m[(p, q)] = 0.0;
    m[(q, p)] = 0.0;

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RandomSource;

    fn random_symmetric(n: usize, rng: &mut RandomSource) -> Matrix {
        let mut b = Matrix::zeros(n, n);
        for v in b.as_mut_slice() {
            *v = rng.uniform01() * 2.0 - 1.0;
        }
        let bt = b.transpose();
        let mut a = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = 0.5 * (b[(i, j)] + bt[(i, j)]);
            }
        }
        a
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let e = eigh_symmetric(&Matrix::identity(3)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
        assert_eq!(e.vectors, Matrix::identity(3));
    }

    #[test]
    fn diagonal_matrix() {
        let a = Matrix::from_rows(&[[1.0, 0.0], [0.0, 2.0]]).unwrap();
        let e = eigh_symmetric(&a).unwrap();
        assert_eq!(e.values, vec![2.0, 1.0]);
        assert_eq!(e.vectors, Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap());
    }

    #[test]
    fn two_by_two_rotation() {
        let a = Matrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap();
        let e = eigh_symmetric(&a).unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((e.vectors[(0, 0)] - h).abs() < 1e-14);
        assert!((e.vectors[(1, 0)] - h).abs() < 1e-14);
    }

    #[test]
    fn random_six_by_six_trace_and_residual() {
        let mut rng = RandomSource::new(3);
        let a = random_symmetric(6, &mut rng);
        let e = eigh_symmetric(&a).unwrap();
        let trace: f64 = (0..6).map(|i| a[(i, i)]).sum();
        let sum: f64 = e.values.iter().sum();
        assert!((trace - sum).abs() < 1e-9);
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        let bound = 1e-8 * a.frobenius_norm().max(1.0);
        for k in 0..6 {
            let col = e.vectors.column(k);
            let mut r = 0.0;
            for i in 0..6 {
                let av: f64 = (0..6).map(|j| a[(i, j)] * col[j]).sum();
                r += (av - e.values[k] * col[i]).powi(2);
            }
            assert!(r.sqrt() <= bound);
        }
        let vtv = e.vectors.transpose().matmul(&e.vectors).unwrap();
        assert!(vtv.max_abs_diff(&Matrix::identity(6)) <= 1e-10);
    }

    #[test]
    fn sign_convention_makes_largest_entry_positive() {
        let mut rng = RandomSource::new(9);
        let a = random_symmetric(5, &mut rng);
        let e = eigh_symmetric(&a).unwrap();
        for k in 0..5 {
            let col = e.vectors.column(k);
            let pivot = col
                .iter()
                .copied()
                .fold(0.0_f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
            assert!(pivot > 0.0);
        }
    }

    #[test]
    fn zero_matrix_needs_no_sweeps() {
        let e = eigh_symmetric(&Matrix::zeros(4, 4)).unwrap();
        assert_eq!(e.sweeps, 0);
        assert_eq!(e.values, vec![0.0; 4]);
    }

    #[test]
    fn rejects_bad_inputs() {
        let rect = Matrix::zeros(2, 3);
        assert!(matches!(
            eigh_symmetric(&rect),
            Err(NumericsError::NotSquare { .. })
        ));
        let asym = Matrix::from_rows(&[[1.0, 2.0], [2.1, 1.0]]).unwrap();
        assert!(matches!(
            eigh_symmetric(&asym),
            Err(NumericsError::NotSymmetric { .. })
        ));
    }
}
