use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, psd_sqrt, ComplexMatrix};
use crate::qfi::{omega, t_star};
use crate::states::DensityMatrix;

const PURE_TOL: f64 = 1e-12;
/// Eigenvalues below this are round-off of an exact zero; keeping them would
/// put `√ε` noise into the square root.
const ROUNDOFF_EIGENVALUE: f64 = 1e-14;

fn support_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    psd_sqrt(m).map_err(domain)?;
    let eig = hermitian_eig(m)?;
    Ok(eig.reconstruct_with(|l| {
        let v = if l > ROUNDOFF_EIGENVALUE { l.sqrt() } else { 0.0 };
        num_complex::Complex64::new(v, 0.0)
    }))
}

fn check_pair(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Dimension(format!(
            "density matrices are {0}x{0} and {1}x{1}",
            rho.dim(),
            sigma.dim()
        )));
    }
    Ok(())
}

fn domain(e: Error) -> Error {
    match e {
        Error::NotPsd { min_eigenvalue } => {
            Error::Domain(format!("fidelity needs PSD inputs (min eigenvalue {min_eigenvalue:e})"))
        }
        other => other,
    }
}

/// `(Tr √(√ρ σ √ρ))²`, with `⟨ψ|σ|ψ⟩` when `ρ = |ψ⟩⟨ψ|`.
pub fn bures_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_pair(rho, sigma)?;
    if (rho.purity() - 1.0).abs() < PURE_TOL {
        let eig = hermitian_eig(rho.matrix())?;
        let psi = eig.eigenvector(0);
        return Ok(sigma.matrix().sandwich(&psi, &psi).re.clamp(0.0, 1.0));
    }
    let s = support_sqrt(rho.matrix())?;
    let inner: ComplexMatrix = &(&s * sigma.matrix()) * &s;
    let eig = hermitian_eig(&inner.hermitian_part())?;
    let root_trace = eig
        .eigenvalues
        .iter()
        .map(|&l| if l > ROUNDOFF_EIGENVALUE { l.sqrt() } else { 0.0 })
        .sum::<f64>();
    Ok((root_trace * root_trace).clamp(0.0, 1.0))
}

/// `Tr(√ρ √σ)`
pub fn affinity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_pair(rho, sigma)?;
    let a = support_sqrt(rho.matrix())?;
    let b = support_sqrt(sigma.matrix())?;
    Ok(a.trace_product(&b).re.clamp(0.0, 1.0))
}

/// `cos²(Ω t)` with `Ω = ½√F`; flagged invalid past `t* = π/√F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub value: f64,
    pub valid: bool,
}

pub fn tm_bound(mean_qfi: f64, t: f64) -> Result<BoundValue> {
    if mean_qfi.is_nan() || mean_qfi <= 0.0 {
        return Err(Error::Domain(format!("bound needs positive mean QFI, got {mean_qfi}")));
    }
    Ok(BoundValue {
        value: (omega(mean_qfi) * t).cos().powi(2),
        valid: t.abs() <= t_star(mean_qfi) * (1.0 + 1e-12),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{apply_channel, ChannelSpec};
    use crate::hamiltonians::{HamiltonianEnsemble, LocalBasis, NoiseMode};
    use crate::linalg::ZERO;
    use crate::mc::sample_rng;
    use crate::states::haar_random_state;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn qubit(diag: [f64; 2]) -> DensityMatrix {
        DensityMatrix::new(1, 2, ComplexMatrix::from_real_diag(&diag)).unwrap()
    }

    fn mixed_pair(seed: u64) -> DensityMatrix {
        let mut m = ComplexMatrix::zeros(4);
        for (k, w) in [0.5, 0.3, 0.2].iter().enumerate() {
            let psi = haar_random_state(2, 2, &mut sample_rng(seed, k as u64)).unwrap();
            m.add_scaled(&ComplexMatrix::outer(psi.amplitudes()), Complex64::new(*w, 0.0));
        }
        DensityMatrix::new(2, 2, m).unwrap()
    }

    #[test]
    fn fidelity_basic_values() {
        let zero = qubit([1.0, 0.0]);
        let one = qubit([0.0, 1.0]);
        let mixed = qubit([0.5, 0.5]);
        assert!((bures_fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-14);
        assert!(bures_fidelity(&zero, &one).unwrap().abs() < 1e-14);
        assert!((bures_fidelity(&mixed, &zero).unwrap() - 0.5).abs() < 1e-12);
        assert!((bures_fidelity(&zero, &mixed).unwrap() - 0.5).abs() < 1e-12);
        let rho = mixed_pair(1);
        assert!((bures_fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn fidelity_is_symmetric_on_mixed_states() {
        let a = mixed_pair(2);
        let b = mixed_pair(3);
        let ab = bures_fidelity(&a, &b).unwrap();
        let ba = bures_fidelity(&b, &a).unwrap();
        assert!((ab - ba).abs() < 1e-10, "{ab} vs {ba}");
        assert!((0.0..=1.0).contains(&ab));
    }

    #[test]
    fn affinity_basic_values() {
        let zero = qubit([1.0, 0.0]);
        let one = qubit([0.0, 1.0]);
        let mixed = qubit([0.5, 0.5]);
        assert!((affinity(&zero, &zero).unwrap() - 1.0).abs() < 1e-14);
        assert!(affinity(&zero, &one).unwrap().abs() < 1e-14);
        assert!((affinity(&mixed, &mixed).unwrap() - 1.0).abs() < 1e-14);
        // Affinity never exceeds the root fidelity.
        let a = mixed_pair(4);
        let b = mixed_pair(5);
        assert!(affinity(&a, &b).unwrap() <= bures_fidelity(&a, &b).unwrap().sqrt() + 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let a = qubit([1.0, 0.0]);
        let b = DensityMatrix::maximally_mixed(2, 2);
        assert!(matches!(bures_fidelity(&a, &b), Err(Error::Dimension(_))));
        let _ = ZERO;
    }

    #[test]
    fn bound_values() {
        assert_eq!(tm_bound(8.0, 0.0).unwrap().value, 1.0);
        let edge = tm_bound(8.0, PI / (2.0 * 2f64.sqrt())).unwrap();
        assert!(edge.value.abs() < 1e-15 && edge.valid);
        assert!((t_star(6.0) - PI / 6f64.sqrt()).abs() < 1e-15);
        assert!(!tm_bound(6.0, 1.5).unwrap().valid);
        assert!(matches!(tm_bound(0.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn concavity_on_mixed_inputs() {
        // F(ρ, E[UρU†]) ≥ E[F(ρ, UρU†)]
        let ens = HamiltonianEnsemble::sphere(&LocalBasis::pauli());
        for seed in 0..3 {
            let rho = mixed_pair(20 + seed);
            for mode in [NoiseMode::Collective, NoiseMode::Noncollective] {
                let spec = ChannelSpec::hamiltonian(mode, ens.clone(), 1.1, 1000, seed);
                let averaged = bures_fidelity(&rho, &apply_channel(&rho, &spec).unwrap()).unwrap();
                let per_sample = crate::mc::estimate(1000, seed, |_, rng| {
                    let us = spec.draw_unitaries(2, 2, rng).unwrap();
                    let u = crate::linalg::tensor_product(&us[0], &us[1]);
                    let out = &(&u * rho.matrix()) * &u.adjoint();
                    bures_fidelity(&rho, &DensityMatrix::new(2, 2, out).unwrap()).unwrap()
                });
                assert!(averaged >= per_sample.mean - 1e-12, "{averaged} < {}", per_sample.mean);
            }
        }
    }
}
