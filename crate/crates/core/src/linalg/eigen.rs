//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary, then applies the classical real Jacobi rotation to the resulting
//! real symmetric 2x2 block. Sweeps run until the off-diagonal Frobenius norm
//! drops below `OFF_DIAGONAL_RTOL * ‖H‖_F`.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};

/// Relative off-diagonal stopping threshold.
pub const OFF_DIAGONAL_RTOL: f64 = 1e-13;
pub const MAX_SWEEPS: usize = 100;
/// Absolute tolerance used for the Hermiticity precondition, scaled by `max(1, ‖H‖_F)`.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Spectral decomposition `H = V diag(λ) V†` with eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct Eigendecomposition {
    pub eigenvalues: Vec<f64>,
    /// Columns are orthonormal eigenvectors, in the order of `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl Eigendecomposition {
    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.column(k)
    }

    /// `V f(Λ) V†`
    pub fn reconstruct_with<F>(&self, f: F) -> ComplexMatrix
    where
        F: Fn(f64) -> Complex64,
    {
        let v = &self.eigenvectors;
        let n = v.dim();
        let weights = self.eigenvalues.iter().map(|&l| f(l)).collect::<Vec<_>>();
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for (k, w) in weights.iter().enumerate() {
                    if *w != ZERO {
                        acc += v[(i, k)] * w * v[(j, k)].conj();
                    }
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|l| Complex64::new(l, 0.0))
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

pub fn hermitian_eig(h: &ComplexMatrix) -> Result<Eigendecomposition> {
    let norm = h.frobenius_norm();
    if !h.is_hermitian(HERMITIAN_TOL * norm.max(1.0)) {
        return Err(Error::Contract("hermitian_eig requires a Hermitian matrix".into()));
    }
    let n = h.dim();
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let threshold = OFF_DIAGONAL_RTOL * norm;

    let mut sweeps = 0;
    while off_diagonal_norm(&a) > threshold {
        if sweeps == MAX_SWEEPS {
            return Err(Error::Contract(format!(
                "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps"
            )));
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order = (0..n).collect::<Vec<_>>();
    let diag = (0..n).map(|i| a[(i, i)].re).collect::<Vec<_>>();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));

    let mut vectors = ComplexMatrix::zeros(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, new_col)] = v[(row, old_col)];
        }
    }
    Ok(Eigendecomposition {
        eigenvalues: order.iter().map(|&i| diag[i]).collect(),
        eigenvectors: vectors,
    })
}

/// Annihilates `a[p][q]` with `A <- G† A G`, `V <- V G`, where
/// `G = diag(1, e^{-iφ}) · R(θ)` on the (p, q) plane.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let n = a.dim();
    let phase = apq / g; // e^{iφ}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * g);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // G = [[c, s], [-s e^{-iφ}, c e^{-iφ}]]
    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = -phase.conj() * s;
    let g_qq = phase.conj() * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}
