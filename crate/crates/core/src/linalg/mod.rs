//! Dense complex linear algebra: Hermitian eigendecomposition, matrix
//! functions, tensor products and partial traces over qudit registers.
//!
//! Site 0 is the most significant digit of a computational-basis index.

mod eigen;
mod matrix;

pub use eigen::{hermitian_eig, Eigendecomposition, HERMITIAN_TOL, MAX_SWEEPS, OFF_DIAGONAL_RTOL};
pub use matrix::ComplexMatrix;
pub(crate) use matrix::{ONE, ZERO};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute eigenvalue tolerance for PSD checks and clamping.
pub const PSD_TOL: f64 = 1e-10;

pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim(), b.dim());
    let n = da * db;
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..da {
        for j in 0..da {
            let x = a[(i, j)];
            if x == ZERO {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k, j * db + l)] = x * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a list of factors, left to right.
pub fn tensor_all<'a, I>(factors: I) -> ComplexMatrix
where
    I: IntoIterator<Item = &'a ComplexMatrix>,
{
    let mut iter = factors.into_iter();
    let first = iter.next().expect("tensor_all needs at least one factor").clone();
    iter.fold(first, |acc, f| tensor_product(&acc, f))
}

/// `op` acting on `site` of an `n`-site register, identity elsewhere.
pub fn embed_site(op: &ComplexMatrix, site: usize, n: usize) -> ComplexMatrix {
    let d = op.dim();
    let left = ComplexMatrix::identity(d.pow(site as u32));
    let right = ComplexMatrix::identity(d.pow((n - site - 1) as u32));
    tensor_product(&tensor_product(&left, op), &right)
}

/// Traces out every site not in `keep`; the kept sites stay in ascending order.
pub fn partial_trace(rho: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if total != rho.dim() {
        return Err(Error::Dimension(format!(
            "site dimensions {dims:?} multiply to {total}, matrix is {0}x{0}",
            rho.dim()
        )));
    }
    if keep.is_empty() {
        return Err(Error::Dimension("partial_trace needs at least one kept site".into()));
    }
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() || kept.iter().any(|&s| s >= dims.len()) {
        return Err(Error::Dimension(format!("invalid kept site set {keep:?}")));
    }
    let traced = (0..dims.len()).filter(|s| !kept.contains(s)).collect::<Vec<_>>();

    let mut stride = vec![1usize; dims.len()];
    for s in (0..dims.len().saturating_sub(1)).rev() {
        stride[s] = stride[s + 1] * dims[s + 1];
    }
    let offsets = |sites: &[usize]| -> Vec<usize> {
        let count: usize = sites.iter().map(|&s| dims[s]).product();
        (0..count)
            .map(|mut idx| {
                let mut off = 0;
                for &s in sites.iter().rev() {
                    off += (idx % dims[s]) * stride[s];
                    idx /= dims[s];
                }
                off
            })
            .collect()
    };
    let keep_off = offsets(&kept);
    let trace_off = offsets(&traced);

    let dk = keep_off.len();
    let mut out = ComplexMatrix::zeros(dk);
    for (i, &ri) in keep_off.iter().enumerate() {
        for (j, &cj) in keep_off.iter().enumerate() {
            out[(i, j)] = trace_off.iter().map(|&t| rho[(ri + t, cj + t)]).sum();
        }
    }
    Ok(out)
}

/// `e^{-i t h}` through the spectral decomposition of `h`.
pub fn exp_hermitian(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(h)?;
    Ok(eig.reconstruct_with(|l| Complex64::from_polar(1.0, -l * t)))
}

/// Principal square root of a PSD matrix; eigenvalues in `[-PSD_TOL, 0)` are clamped to zero.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m)?;
    let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
    if min < -PSD_TOL {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    Ok(eig.reconstruct_with(|l| Complex64::new(l.max(0.0).sqrt(), 0.0)))
}

/// Applies a single-site operator to `site` of a state vector over `n` sites
/// of local dimension `op.dim()`, without forming the full operator.
pub fn apply_local(op: &ComplexMatrix, site: usize, n: usize, psi: &[Complex64]) -> Vec<Complex64> {
    let d = op.dim();
    debug_assert_eq!(psi.len(), d.pow(n as u32));
    let inner = d.pow((n - site - 1) as u32);
    let outer = psi.len() / (inner * d);
    let mut out = vec![ZERO; psi.len()];
    for o in 0..outer {
        let base = o * d * inner;
        for r in 0..d {
            for c in 0..d {
                let x = op[(r, c)];
                if x == ZERO {
                    continue;
                }
                let src = base + c * inner;
                let dst = base + r * inner;
                for k in 0..inner {
                    out[dst + k] += x * psi[src + k];
                }
            }
        }
    }
    out
}

/// `(U_0 ⊗ U_1 ⊗ … ⊗ U_{n-1}) ψ`
pub fn apply_product(ops: &[&ComplexMatrix], psi: &[Complex64]) -> Vec<Complex64> {
    let n = ops.len();
    let mut state = psi.to_vec();
    for (site, op) in ops.iter().enumerate() {
        state = apply_local(op, site, n, &state);
    }
    state
}

pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Pauli matrices `[σx, σy, σz]`.
pub fn paulis() -> [ComplexMatrix; 3] {
    let i = Complex64::new(0.0, 1.0);
    let sx = ComplexMatrix::from_row_major(vec![ZERO, ONE, ONE, ZERO]).unwrap();
    let sy = ComplexMatrix::from_row_major(vec![ZERO, -i, i, ZERO]).unwrap();
    let sz = ComplexMatrix::from_row_major(vec![ONE, ZERO, ZERO, -ONE]).unwrap();
    [sx, sy, sz]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn identity_tensor_identity() {
        let id = ComplexMatrix::identity(2);
        assert_eq!(tensor_product(&id, &id), ComplexMatrix::identity(4));
    }

    #[test]
    fn sz_tensor_sz_is_diagonal() {
        let [_, _, sz] = paulis();
        let p = tensor_product(&sz, &sz);
        assert_eq!(p, ComplexMatrix::from_real_diag(&[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn tensor_dimension() {
        let [sx, _, _] = paulis();
        assert_eq!(tensor_product(&sx, &ComplexMatrix::identity(3)).dim(), 6);
    }

    #[test]
    fn tensor_product_acts_factorwise() {
        let [sx, sy, _] = paulis();
        let x = vec![c(0.6), Complex64::new(0.0, 0.8)];
        let y = vec![c(1.0), c(-2.0)];
        let xy = x.iter().flat_map(|a| y.iter().map(move |b| a * b)).collect::<Vec<_>>();
        let lhs = tensor_product(&sx, &sy).mul_vec(&xy);
        let ax = sx.mul_vec(&x);
        let by = sy.mul_vec(&y);
        let rhs = ax
            .iter()
            .flat_map(|a| by.iter().map(move |b| a * b))
            .collect::<Vec<_>>();
        for (l, r) in lhs.iter().zip(&rhs) {
            assert!((l - r).norm() < 1e-15);
        }
    }

    #[test]
    fn partial_trace_of_product_state() {
        let rho = ComplexMatrix::from_row_major(vec![
            c(0.7),
            Complex64::new(0.1, 0.2),
            Complex64::new(0.1, -0.2),
            c(0.3),
        ])
        .unwrap();
        let sigma = ComplexMatrix::from_real_diag(&[0.2, 0.5, 0.3]);
        let joint = tensor_product(&rho, &sigma);
        let reduced = partial_trace(&joint, &[2, 3], &[0]).unwrap();
        assert!(reduced.max_abs_diff(&rho) < 1e-15);
        let other = partial_trace(&joint, &[2, 3], &[1]).unwrap();
        assert!(other.max_abs_diff(&sigma) < 1e-15);
    }

    #[test]
    fn partial_trace_dimension_mismatch() {
        let rho = ComplexMatrix::identity(4);
        assert!(matches!(partial_trace(&rho, &[2, 3], &[0]), Err(Error::Dimension(_))));
        assert!(matches!(partial_trace(&rho, &[2, 2], &[]), Err(Error::Dimension(_))));
        assert!(matches!(partial_trace(&rho, &[2, 2], &[2]), Err(Error::Dimension(_))));
    }

    #[test]
    fn exp_at_zero_time_is_identity() {
        let [sx, _, _] = paulis();
        let u = exp_hermitian(&sx, 0.0).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn exp_of_diagonal_generator() {
        let [_, _, sz] = paulis();
        let t = 0.7;
        let u = exp_hermitian(&sz.scale_real(0.5), t).unwrap();
        let expected = ComplexMatrix::from_diag(&[
            Complex64::from_polar(1.0, -t / 2.0),
            Complex64::from_polar(1.0, t / 2.0),
        ]);
        assert!(u.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn sqrt_of_diagonal() {
        let s = psd_sqrt(&ComplexMatrix::from_real_diag(&[4.0, 9.0])).unwrap();
        assert!(s.max_abs_diff(&ComplexMatrix::from_real_diag(&[2.0, 3.0])) < 1e-14);
        let id = psd_sqrt(&ComplexMatrix::identity(3)).unwrap();
        assert!(id.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-15);
    }

    #[test]
    fn sqrt_clamps_tiny_negative_and_rejects_large_negative() {
        let m = ComplexMatrix::from_real_diag(&[1.0, -1e-12]);
        let s = psd_sqrt(&m).unwrap();
        assert_eq!(s[(1, 1)], ZERO);
        let bad = ComplexMatrix::from_real_diag(&[1.0, -1e-6]);
        assert!(matches!(psd_sqrt(&bad), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn apply_local_matches_embedded_operator() {
        let [sx, sy, _] = paulis();
        let op = &sx + &sy.scale_real(0.5);
        let psi = (0..8)
            .map(|k| Complex64::new(k as f64, 1.0 - k as f64))
            .collect::<Vec<_>>();
        for site in 0..3 {
            let direct = embed_site(&op, site, 3).mul_vec(&psi);
            let fast = apply_local(&op, site, 3, &psi);
            for (a, b) in direct.iter().zip(&fast) {
                assert!((a - b).norm() < 1e-13);
            }
        }
    }
}
