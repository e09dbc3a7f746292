//! Quantum Fisher information: the spectral formula for mixed states, the
//! variance form for pure states, ensemble-averaged QFI through basis sums and
//! correlation tensors, a Monte Carlo averaging oracle and skew information.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonians::{CoefficientSampler, EmbeddedHamiltonian, GeneratorSet, HamiltonianEnsemble, NoiseMode};
use crate::linalg::{self, apply_local, hermitian_eig, psd_sqrt, ComplexMatrix, ZERO};
use crate::mc::{estimate, Estimate};
use crate::states::{CorrelationTensor, DensityMatrix, PureState, StateId};

/// Eigenvalue pairs with `λₘ + λₗ` at or below this are dropped from the sum.
pub const PAIR_CUTOFF: f64 = 1e-12;

fn check_dim(rho: &DensityMatrix, h: &ComplexMatrix) -> Result<()> {
    if rho.dim() != h.dim() {
        return Err(Error::Dimension(format!(
            "state is {0}x{0}, Hamiltonian is {1}x{1}",
            rho.dim(),
            h.dim()
        )));
    }
    Ok(())
}

/// `F_Q = 2 Σ_{m,l} (λₘ-λₗ)²/(λₘ+λₗ) |⟨m|H|l⟩|²` over the full eigenbasis of `ρ`.
pub fn qfi_general(rho: &DensityMatrix, h: &EmbeddedHamiltonian) -> Result<f64> {
    qfi_general_matrix(rho, &h.matrix)
}

pub fn qfi_general_matrix(rho: &DensityMatrix, h: &ComplexMatrix) -> Result<f64> {
    check_dim(rho, h)?;
    let eig = hermitian_eig(rho.matrix())?;
    let v = &eig.eigenvectors;
    let w = v.adjoint().try_mul(&h.try_mul(v)?)?;
    let lam = &eig.eigenvalues;
    let mut total = 0.0;
    for m in 0..lam.len() {
        for l in 0..lam.len() {
            let s = lam[m] + lam[l];
            if s > PAIR_CUTOFF {
                total += (lam[m] - lam[l]).powi(2) / s * w[(m, l)].norm_sqr();
            }
        }
    }
    Ok(2.0 * total)
}

/// `4(⟨H²⟩ - ⟨H⟩²)`
pub fn qfi_pure(psi: &PureState, h: &EmbeddedHamiltonian) -> f64 {
    let hpsi = h.matrix.mul_vec(psi.amplitudes());
    pure_variance_qfi(psi.amplitudes(), &hpsi)
}

fn pure_variance_qfi(psi: &[Complex64], hpsi: &[Complex64]) -> f64 {
    let mean = linalg::inner(psi, hpsi).re;
    let second = hpsi.iter().map(|z| z.norm_sqr()).sum::<f64>();
    (4.0 * (second - mean * mean)).max(0.0)
}

/// QFI evaluator that diagonalizes `ρ` once and reuses its support for many
/// Hamiltonians.
///
/// Only eigenvectors with non-negligible weight are kept. Pairs with one
/// index outside the support are summed in closed form through
/// `‖H vₗ‖² - Σ_{m∈S} |⟨m|H|l⟩|²`, so the full eigenbasis is never needed.
#[derive(Debug, Clone)]
pub struct QfiKernel {
    n: usize,
    d: usize,
    weights: Vec<f64>,
    vectors: Vec<Vec<Complex64>>,
}

impl QfiKernel {
    pub fn new(rho: &DensityMatrix) -> Result<Self> {
        let eig = hermitian_eig(rho.matrix())?;
        let (weights, vectors) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > PAIR_CUTOFF / 2.0)
            .map(|(k, &l)| (l, eig.eigenvector(k)))
            .unzip();
        Ok(Self {
            n: rho.n(),
            d: rho.d(),
            weights,
            vectors,
        })
    }

    pub fn pure(psi: &PureState) -> Self {
        Self {
            n: psi.n(),
            d: psi.d(),
            weights: vec![1.0],
            vectors: vec![psi.amplitudes().to_vec()],
        }
    }

    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    fn evaluate(&self, apply: impl Fn(&[Complex64]) -> Vec<Complex64>) -> f64 {
        let hv = self.vectors.iter().map(|v| apply(v)).collect::<Vec<_>>();
        let mut total = 0.0;
        for (&ll, hl) in self.weights.iter().zip(&hv) {
            let mut inside = 0.0;
            for (&lm, vm) in self.weights.iter().zip(&self.vectors) {
                let w = linalg::inner(vm, hl).norm_sqr();
                inside += w;
                total += 2.0 * (lm - ll).powi(2) / (lm + ll) * w;
            }
            // Partners outside the support carry λₘ ≈ 0 and weight 2λₗ, counted in both orders.
            let outside = (hl.iter().map(|z| z.norm_sqr()).sum::<f64>() - inside).max(0.0);
            total += 4.0 * ll * outside;
        }
        total
    }

    /// QFI for a full-register Hamiltonian matrix.
    pub fn qfi_matrix(&self, h: &ComplexMatrix) -> Result<f64> {
        let dim = self.d.pow(self.n as u32);
        if h.dim() != dim {
            return Err(Error::Dimension(format!(
                "state is {dim}x{dim}, Hamiltonian is {0}x{0}",
                h.dim()
            )));
        }
        Ok(self.evaluate(|v| h.mul_vec(v)))
    }

    /// QFI for `Σ_k op_k` acting on `site_k`, without forming the full operator.
    pub fn qfi_local_terms(&self, terms: &[(usize, &ComplexMatrix)]) -> f64 {
        self.evaluate(|v| {
            let mut out = vec![ZERO; v.len()];
            for &(site, op) in terms {
                for (o, x) in out.iter_mut().zip(apply_local(op, site, self.n, v)) {
                    *o += x;
                }
            }
            out
        })
    }

    /// QFI for the same local operator on every site.
    pub fn qfi_collective(&self, local: &ComplexMatrix) -> f64 {
        let terms = (0..self.n).map(|s| (s, local)).collect::<Vec<_>>();
        self.qfi_local_terms(&terms)
    }
}

/// Per-generator QFI: `F_Q(ρ, Σₛ Hᵢ⁽ˢ⁾)` for collective noise and
/// `Σₛ F_Q(ρ, Hᵢ⁽ˢ⁾)` for non-collective noise.
pub fn fisher_matrix_diag(rho: &DensityMatrix, set: &GeneratorSet, mode: NoiseMode) -> Result<Vec<f64>> {
    if set.d != rho.d() {
        return Err(Error::Dimension(format!(
            "generators act on d = {}, state has d = {}",
            set.d,
            rho.d()
        )));
    }
    let kernel = QfiKernel::new(rho)?;
    Ok(kernel_diag(&kernel, set, mode))
}

fn kernel_diag(kernel: &QfiKernel, set: &GeneratorSet, mode: NoiseMode) -> Vec<f64> {
    set.generators
        .iter()
        .map(|g| match mode {
            NoiseMode::Collective => kernel.qfi_collective(g),
            NoiseMode::Noncollective => (0..kernel.n).map(|s| kernel.qfi_local_terms(&[(s, g)])).sum(),
        })
        .collect()
}

fn mean_from_diag(diag: &[f64], ensemble: &HamiltonianEnsemble) -> f64 {
    ensemble.prefactor() * diag.iter().sum::<f64>() / diag.len() as f64
}

/// Ensemble-averaged QFI under collective noise:
/// `(E Tr H² / c) · (1/r) Σᵢ F_Q(ρ, Σₛ Hᵢ⁽ˢ⁾)`.
pub fn mean_qfi_collective(rho: &DensityMatrix, ensemble: &HamiltonianEnsemble) -> Result<f64> {
    let diag = fisher_matrix_diag(rho, ensemble.set(), NoiseMode::Collective)?;
    Ok(mean_from_diag(&diag, ensemble))
}

/// Ensemble-averaged QFI under non-collective noise:
/// `(E Tr H² / c) · (1/r) Σₛ Σᵢ F_Q(ρ, Hᵢ⁽ˢ⁾)`.
pub fn mean_qfi_noncollective(rho: &DensityMatrix, ensemble: &HamiltonianEnsemble) -> Result<f64> {
    let diag = fisher_matrix_diag(rho, ensemble.set(), NoiseMode::Noncollective)?;
    Ok(mean_from_diag(&diag, ensemble))
}

pub fn mean_qfi(rho: &DensityMatrix, ensemble: &HamiltonianEnsemble, mode: NoiseMode) -> Result<f64> {
    match mode {
        NoiseMode::Collective => mean_qfi_collective(rho, ensemble),
        NoiseMode::Noncollective => mean_qfi_noncollective(rho, ensemble),
    }
}

/// Pure-state mean QFI for both modes from a single kernel.
pub fn mean_qfi_pure_pair(psi: &PureState, ensemble: &HamiltonianEnsemble) -> (f64, f64) {
    let kernel = QfiKernel::pure(psi);
    let col = kernel_diag(&kernel, ensemble.set(), NoiseMode::Collective);
    let nc = kernel_diag(&kernel, ensemble.set(), NoiseMode::Noncollective);
    (mean_from_diag(&col, ensemble), mean_from_diag(&nc, ensemble))
}

/// Correlation-tensor forms need `Σᵢ Hᵢ² ∝ 𝟙` to turn the local second
/// moments into the constant `r·c/d`.
fn tensor_form_setup<'a>(
    rho: &'a DensityMatrix,
    ensemble: &HamiltonianEnsemble,
) -> Result<(CorrelationTensor<'a>, f64)> {
    let set = ensemble.set();
    if !set.has_scalar_casimir() {
        return Err(Error::Unsupported(
            "tensor forms need a generator set with Σ Hᵢ² proportional to the identity".into(),
        ));
    }
    let basis = crate::hamiltonians::LocalBasis::build(set.basis, set.d)?;
    if set.generators.len() != basis.r()
        || set
            .generators
            .iter()
            .zip(basis.generators())
            .any(|(a, b)| a.max_abs_diff(b) > 1e-15)
    {
        return Err(Error::Unsupported(
            "tensor forms need the traceless generator set".into(),
        ));
    }
    let tensor = CorrelationTensor::new(rho, &basis)?;
    let n = rho.n() as f64;
    let local = 4.0 * n * set.r() as f64 * set.c / set.d as f64;
    Ok((tensor, local))
}

fn site_indices(n: usize, assignments: &[(usize, usize)]) -> Vec<usize> {
    let mut idx = vec![0; n];
    for &(site, i) in assignments {
        idx[site] = i;
    }
    idx
}

/// Collective mean QFI of a pure state from its local Bloch vectors and
/// same-generator two-site correlations.
pub fn mean_qfi_pure_tensor_collective(psi: &PureState, ensemble: &HamiltonianEnsemble) -> Result<f64> {
    let rho = psi.to_density();
    let (tensor, local) = tensor_form_setup(&rho, ensemble)?;
    let n = psi.n();
    let r = ensemble.r();
    let mut pairs = 0.0;
    let mut bloch = 0.0;
    for i in 1..=r {
        let mut total = 0.0;
        for s in 0..n {
            total += tensor.bare_entry(&site_indices(n, &[(s, i)]));
            for s2 in (s + 1)..n {
                pairs += tensor.bare_entry(&site_indices(n, &[(s, i), (s2, i)]));
            }
        }
        bloch += total * total;
    }
    let sum = local + 8.0 * pairs - 4.0 * bloch;
    Ok(ensemble.prefactor() * sum / r as f64)
}

/// Non-collective mean QFI of a pure state from its local Bloch vectors.
pub fn mean_qfi_pure_tensor_noncollective(psi: &PureState, ensemble: &HamiltonianEnsemble) -> Result<f64> {
    let rho = psi.to_density();
    let (tensor, local) = tensor_form_setup(&rho, ensemble)?;
    let n = psi.n();
    let r = ensemble.r();
    let mut bloch = 0.0;
    for s in 0..n {
        for i in 1..=r {
            bloch += tensor.bare_entry(&site_indices(n, &[(s, i)])).powi(2);
        }
    }
    Ok(ensemble.prefactor() * (local - 4.0 * bloch) / r as f64)
}

/// Sample mean of the QFI over random Hamiltonians drawn from `sampler`.
///
/// Collective mode draws one coefficient vector per sample; non-collective
/// mode draws `n` of them from the same stream.
pub fn mc_mean_qfi(
    rho: &DensityMatrix,
    sampler: &dyn CoefficientSampler,
    mode: NoiseMode,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    let kernel = QfiKernel::new(rho)?;
    mc_mean_qfi_kernel(&kernel, sampler, mode, samples, seed)
}

pub fn mc_mean_qfi_kernel(
    kernel: &QfiKernel,
    sampler: &dyn CoefficientSampler,
    mode: NoiseMode,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    if samples == 0 {
        return Err(Error::Argument("need at least one sample".into()));
    }
    let set = sampler.generators();
    if set.d != kernel.d {
        return Err(Error::Dimension(format!(
            "generators act on d = {}, state has d = {}",
            set.d, kernel.d
        )));
    }
    let n = kernel.n;
    Ok(estimate(samples, seed, |_, rng| match mode {
        NoiseMode::Collective => {
            let h = set.local_hamiltonian(&sampler.draw(rng));
            kernel.qfi_collective(&h)
        }
        NoiseMode::Noncollective => {
            let locals = (0..n)
                .map(|_| set.local_hamiltonian(&sampler.draw(rng)))
                .collect::<Vec<_>>();
            let terms = locals.iter().enumerate().collect::<Vec<_>>();
            kernel.qfi_local_terms(&terms)
        }
    }))
}

/// `-Tr([√ρ, H]²)`, twice the Wigner–Yanase normalization, so `2I ≤ F_Q ≤ 4I`
/// with `F_Q = 2I` on pure states.
pub fn skew_information(rho: &DensityMatrix, h: &ComplexMatrix) -> Result<f64> {
    check_dim(rho, h)?;
    let sqrt = psd_sqrt(rho.matrix())?;
    let comm = sqrt.commutator(h);
    // The commutator is anti-Hermitian, so -Tr(C²) = ‖C‖²_F.
    Ok(comm.frobenius_norm().powi(2))
}

/// Lower bound `1/√F` on the uncertainty of an estimated evolution time.
pub fn estimation_bound(mean_qfi: f64) -> Result<f64> {
    if mean_qfi.is_nan() || mean_qfi <= 0.0 {
        return Err(Error::Domain(format!(
            "estimation bound needs positive QFI, got {mean_qfi}"
        )));
    }
    Ok(1.0 / mean_qfi.sqrt())
}

/// `½√F`
pub fn omega(mean_qfi: f64) -> f64 {
    0.5 * mean_qfi.max(0.0).sqrt()
}

/// `π/√F`
pub fn t_star(mean_qfi: f64) -> f64 {
    std::f64::consts::PI / mean_qfi.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Analytic,
    TensorForm,
    MonteCarlo,
}

/// Mean QFI of one state under one ensemble, for both noise modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QfiSummary {
    pub state: String,
    pub basis: String,
    pub ensemble: String,
    pub mean_qfi_collective: f64,
    pub mean_qfi_noncollective: f64,
    pub omega_collective: f64,
    pub omega_noncollective: f64,
    pub t_star_collective: f64,
    pub t_star_noncollective: f64,
    pub provenance: Provenance,
}

impl QfiSummary {
    pub fn new(state: &StateId, ensemble: &HamiltonianEnsemble, col: f64, noncol: f64, provenance: Provenance) -> Self {
        Self {
            state: state.to_string(),
            basis: ensemble.set().basis.to_string(),
            ensemble: ensemble.kind().to_string(),
            mean_qfi_collective: col,
            mean_qfi_noncollective: noncol,
            omega_collective: omega(col),
            omega_noncollective: omega(noncol),
            t_star_collective: t_star(col),
            t_star_noncollective: t_star(noncol),
            provenance,
        }
    }

    /// Analytic summary of a pure state.
    pub fn analytic(state: &StateId, ensemble: &HamiltonianEnsemble) -> Result<Self> {
        let psi = state.build()?;
        let (col, nc) = mean_qfi_pure_pair(&psi, ensemble);
        Ok(Self::new(state, ensemble, col, nc, Provenance::Analytic))
    }

    pub const CSV_HEADER: &'static str =
        "state,basis,ensemble,mean_qfi_collective,mean_qfi_noncollective,omega_collective,omega_noncollective,t_star_collective,t_star_noncollective,provenance";

    pub fn csv_row(&self) -> String {
        let prov = match self.provenance {
            Provenance::Analytic => "analytic",
            Provenance::TensorForm => "tensor-form",
            Provenance::MonteCarlo => "monte-carlo",
        };
        format!(
            "{},{},{},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{}",
            self.state,
            self.basis,
            self.ensemble,
            self.mean_qfi_collective,
            self.mean_qfi_noncollective,
            self.omega_collective,
            self.omega_noncollective,
            self.t_star_collective,
            self.t_star_noncollective,
            prov
        )
    }
}
