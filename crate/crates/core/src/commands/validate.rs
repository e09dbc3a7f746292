use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{table1_expected, to_json, Report, RunConfig, DEFAULT_VALIDATE_SEED};
use crate::channels::{apply_channel, haar_unitary, ChannelSpec};
use crate::error::Result;
use crate::hamiltonians::{
    embed_collective, BasisKind, EnsembleKind, HamiltonianEnsemble, LocalBasis, NoiseMode, Restriction,
};
use crate::linalg::{exp_hermitian, hermitian_eig, tensor_all, ComplexMatrix};
use crate::mc::{estimate_vec, sample_rng, SampleRng};
use crate::qfi::{
    mean_qfi, mean_qfi_pure_pair, mean_qfi_pure_tensor_collective, mean_qfi_pure_tensor_noncollective, qfi_general,
    qfi_general_matrix, qfi_pure,
};
use crate::states::{haar_random_state, DensityMatrix, StateId};
use crate::stats::{ks_test, sphere_marginal_cdf};

const RECONSTRUCTION_TOL: f64 = 1e-10;
const UNITARITY_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
const INVARIANCE_TOL: f64 = 1e-8;
const LEMMA_SIGMAS: f64 = 3.0;
const SYMMETRY_SIGMAS: f64 = 4.0;
const PREFACTOR_TOL: f64 = 1e-9;
const KS_MIN_P: f64 = 0.01;
const TENSOR_TOL: f64 = 1e-9;
const RANK_ONE_TOL: f64 = 1e-9;

const ENSEMBLE_SAMPLES: usize = 100_000;
const KS_SAMPLES: usize = 10_000;

/// Outcome of one group of checks. `worst` is the largest observed value of
/// the group's metric, compared against `limit`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupVerdict {
    pub name: String,
    pub passed: bool,
    pub checks: usize,
    pub metric: String,
    pub worst: f64,
    pub limit: f64,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub seed: u64,
    pub groups: Vec<GroupVerdict>,
    pub passed: bool,
}

struct Group {
    verdict: GroupVerdict,
}

impl Group {
    fn new(name: &str, metric: &str, limit: f64) -> Self {
        Self {
            verdict: GroupVerdict {
                name: name.into(),
                passed: true,
                checks: 0,
                metric: metric.into(),
                worst: 0.0,
                limit,
                failures: vec![],
            },
        }
    }

    /// Records `value`, failing when it exceeds the limit (or is NaN).
    fn check(&mut self, label: impl FnOnce() -> String, value: f64) {
        let v = &mut self.verdict;
        v.checks += 1;
        if value.is_nan() || value > v.worst {
            v.worst = value;
        }
        if value.is_nan() || value > v.limit {
            v.passed = false;
            v.failures.push(format!("{}: {value:e}", label()));
        }
    }

    fn finish(self) -> GroupVerdict {
        self.verdict
    }
}

fn random_hermitian(dim: usize, rng: &mut SampleRng) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            m[(i, j)] = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        }
    }
    m.hermitian_part()
}

/// Mixture of `rank` Haar-random pure states with random weights.
fn random_mixed(n: usize, d: usize, rank: usize, rng: &mut SampleRng) -> Result<DensityMatrix> {
    let weights = (0..rank).map(|_| rng.random::<f64>() + 0.05).collect::<Vec<_>>();
    let total: f64 = weights.iter().sum();
    let mut m = ComplexMatrix::zeros(d.pow(n as u32));
    for w in weights {
        let psi = haar_random_state(n, d, rng)?;
        m.add_scaled(&ComplexMatrix::outer(psi.amplitudes()), Complex64::new(w / total, 0.0));
    }
    DensityMatrix::new(n, d, m)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn validation_ensembles() -> Result<Vec<(String, HamiltonianEnsemble)>> {
    let specs = [
        (EnsembleKind::Sphere, BasisKind::Pauli, 2, Restriction::Traceless),
        (EnsembleKind::Sphere, BasisKind::Spin, 3, Restriction::Traceless),
        (EnsembleKind::Sphere, BasisKind::GellMann, 3, Restriction::Traceless),
        (EnsembleKind::Gue, BasisKind::Pauli, 2, Restriction::Traceless),
        (EnsembleKind::Gue, BasisKind::Pauli, 2, Restriction::Full),
        (EnsembleKind::Gue, BasisKind::GellMann, 3, Restriction::Traceless),
        (EnsembleKind::Goe, BasisKind::Pauli, 2, Restriction::RealSymmetric),
        (EnsembleKind::Goe, BasisKind::GellMann, 3, Restriction::RealSymmetric),
    ];
    specs
        .into_iter()
        .map(|(kind, basis, d, restriction)| {
            let ens = HamiltonianEnsemble::new(kind, &LocalBasis::build(basis, d)?, restriction)?;
            Ok((format!("{kind}/{basis}/d={d}/{restriction:?}"), ens))
        })
        .collect()
}

fn linalg_group(seed: u64) -> Result<Vec<GroupVerdict>> {
    let mut recon = Group::new("linalg-reconstruction", "max |V diag(λ) V† - H|", RECONSTRUCTION_TOL);
    let mut unitary = Group::new("unitarity", "max |U U† - 1|", UNITARITY_TOL);
    for (i, dim) in [2usize, 3, 4, 8, 9, 16, 27, 32].into_iter().enumerate() {
        let mut rng = sample_rng(seed, i as u64);
        let h = random_hermitian(dim, &mut rng);
        let eig = hermitian_eig(&h)?;
        recon.check(|| format!("dim {dim}"), eig.reconstruct().max_abs_diff(&h));
        let id = ComplexMatrix::identity(dim);
        let u = exp_hermitian(&h, 0.7)?;
        unitary.check(|| format!("exp(-iHt) dim {dim}"), (&u * &u.adjoint()).max_abs_diff(&id));
        let v = haar_unitary(dim, &mut rng);
        unitary.check(|| format!("Haar dim {dim}"), (&v * &v.adjoint()).max_abs_diff(&id));
    }
    Ok(vec![recon.finish(), unitary.finish()])
}

fn trace_group(seed: u64) -> Result<GroupVerdict> {
    let mut g = Group::new(
        "trace-preservation",
        "max |Tr(U ρ U†) - 1| and |Tr E(ρ) - 1|",
        TRACE_TOL,
    );
    let cases = [(3usize, 2usize, BasisKind::Pauli), (2, 3, BasisKind::GellMann)];
    for (k, (n, d, basis)) in cases.into_iter().enumerate() {
        let rho = random_mixed(n, d, 3, &mut sample_rng(seed ^ 0x7472, k as u64))?;
        let ens = HamiltonianEnsemble::sphere(&LocalBasis::build(basis, d)?);
        let specs = [
            ChannelSpec::hamiltonian(NoiseMode::Collective, ens.clone(), 0.9, 64, seed),
            ChannelSpec::hamiltonian(NoiseMode::Noncollective, ens, 0.9, 64, seed),
            ChannelSpec::twirl(64, seed),
        ];
        for spec in &specs {
            for s in 0..16u64 {
                let us = spec.draw_unitaries(n, d, &mut sample_rng(seed, s))?;
                let u = tensor_all(us.iter());
                let out = &(&u * rho.matrix()) * &u.adjoint();
                g.check(
                    || format!("{} n={n} d={d} draw {s}", spec.mode),
                    (out.trace().re - 1.0).abs(),
                );
            }
            let out = apply_channel(&rho, spec)?;
            g.check(
                || format!("{} n={n} d={d} channel", spec.mode),
                (out.matrix().trace().re - 1.0).abs(),
            );
            let min_eig = hermitian_eig(out.matrix())?.eigenvalues.last().copied().unwrap_or(0.0);
            g.check(|| format!("{} n={n} d={d} positivity", spec.mode), (-min_eig).max(0.0));
        }
    }
    Ok(g.finish())
}

fn invariance_group(seed: u64) -> Result<GroupVerdict> {
    let mut g = Group::new(
        "unitary-invariance",
        "|F(UρU†, H) - F(ρ, U†HU)| / max(1, F)",
        INVARIANCE_TOL,
    );
    for (k, (n, d)) in [(2usize, 2usize), (3, 2), (2, 3)].into_iter().enumerate() {
        for rank in [1usize, 2, 4] {
            let mut rng = sample_rng(seed ^ 0x1717, (10 * k + rank) as u64);
            let rho = random_mixed(n, d, rank, &mut rng)?;
            let dim = rho.dim();
            let h = random_hermitian(dim, &mut rng);
            let u = haar_unitary(dim, &mut rng);
            let rotated = DensityMatrix::new(n, d, (&(&u * rho.matrix()) * &u.adjoint()).hermitian_part())?;
            let lhs = qfi_general_matrix(&rotated, &h)?;
            let rhs = qfi_general_matrix(&rho, &(&(&u.adjoint() * &h) * &u))?;
            g.check(|| format!("n={n} d={d} rank {rank}"), rel(lhs, rhs));
        }
    }
    Ok(g.finish())
}

/// Coefficient moments `E[αᵢ]` and `E[αᵢαⱼ]` (i ≤ j) for one ensemble.
struct Moments {
    r: usize,
    means: Vec<crate::mc::Estimate>,
    products: Vec<((usize, usize), crate::mc::Estimate)>,
}

fn coefficient_moments(ens: &HamiltonianEnsemble, samples: usize, seed: u64) -> Moments {
    let r = ens.r();
    let pairs = (0..r).flat_map(|i| (i..r).map(move |j| (i, j))).collect::<Vec<_>>();
    let est = estimate_vec(samples, seed, r + pairs.len(), |_, rng| {
        let a = ens.sample(rng);
        let mut out = a.clone();
        out.extend(pairs.iter().map(|&(i, j)| a[i] * a[j]));
        out
    });
    Moments {
        r,
        means: est[..r].to_vec(),
        products: pairs.into_iter().zip(est[r..].iter().copied()).collect(),
    }
}

fn ensemble_groups(seed: u64) -> Result<Vec<GroupVerdict>> {
    let mut lemma = Group::new(
        "lemma1-identity",
        "|E[Tr(H Hᵢ)Tr(H Hⱼ)] - δᵢⱼ (c/r) E[Tr H²]| / std error",
        LEMMA_SIGMAS,
    );
    let mut symmetry = Group::new(
        "ensemble-symmetry",
        "|mean| or |off-diagonal covariance| in standard errors",
        SYMMETRY_SIGMAS,
    );
    for (k, (label, ens)) in validation_ensembles()?.into_iter().enumerate() {
        let m = coefficient_moments(&ens, ENSEMBLE_SAMPLES, seed.wrapping_add(1000 + k as u64));
        let c = ens.c();
        let target = c / m.r as f64 * ens.mean_purity();
        for &((i, j), e) in &m.products {
            // Tr(H_α Hᵢ) = c αᵢ for an orthogonal generator set.
            let want = if i == j { target } else { 0.0 };
            let sigmas = (c * c * e.mean - want).abs() / (c * c * e.std_error);
            lemma.check(|| format!("{label} ({i},{j})"), sigmas);
        }
        let n = ENSEMBLE_SAMPLES as f64;
        for (i, e) in m.means.iter().enumerate() {
            let std = e.std_error * n.sqrt();
            symmetry.check(|| format!("{label} mean {i}"), e.mean.abs() / (std / n.sqrt()));
        }
        let var = |i: usize| {
            let second = m.products.iter().find(|p| p.0 == (i, i)).expect("diagonal pair").1.mean;
            second - m.means[i].mean.powi(2)
        };
        for &((i, j), e) in m.products.iter().filter(|p| p.0 .0 != p.0 .1) {
            let cov = e.mean - m.means[i].mean * m.means[j].mean;
            let scale = (var(i) * var(j)).sqrt() / n.sqrt();
            symmetry.check(|| format!("{label} cov ({i},{j})"), cov.abs() / scale);
        }
    }
    Ok(vec![lemma.finish(), symmetry.finish()])
}

fn prefactor_group(seed: u64) -> Result<GroupVerdict> {
    let mut g = Group::new(
        "prefactor-scaling",
        "relative error of ⟨F⟩_ensemble / ⟨F⟩_sphere against E[Tr H²]/c, and of F(λH) against λ²F(H)",
        PREFACTOR_TOL,
    );
    for (k, (basis, d, n)) in [
        (BasisKind::Pauli, 2usize, 3usize),
        (BasisKind::GellMann, 3, 2),
        (BasisKind::Spin, 3, 2),
    ]
    .into_iter()
    .enumerate()
    {
        let b = LocalBasis::build(basis, d)?;
        let mut rng = sample_rng(seed ^ 0x5ca1e, k as u64);
        let rho = random_mixed(n, d, 2, &mut rng)?;
        for restriction in [Restriction::Traceless, Restriction::Full, Restriction::RealSymmetric] {
            let sphere = HamiltonianEnsemble::new(EnsembleKind::Sphere, &b, restriction)?;
            for kind in [EnsembleKind::Gue, EnsembleKind::Goe] {
                let Ok(ens) = HamiltonianEnsemble::new(kind, &b, restriction) else {
                    continue;
                };
                for mode in [NoiseMode::Collective, NoiseMode::Noncollective] {
                    let base = mean_qfi(&rho, &sphere, mode)?;
                    let scaled = mean_qfi(&rho, &ens, mode)?;
                    let ratio = ens.mean_purity() / b.c();
                    g.check(
                        || format!("{kind} {basis} {restriction:?} {mode}"),
                        rel(scaled, ratio * base),
                    );
                }
            }
        }
        let h = random_hermitian(rho.dim(), &mut rng);
        let f = qfi_general_matrix(&rho, &h)?;
        let f3 = qfi_general_matrix(&rho, &h.scale_real(3.0))?;
        g.check(|| format!("{basis} homogeneity"), rel(f3, 9.0 * f));
    }
    Ok(g.finish())
}

fn ks_group(seed: u64) -> Result<GroupVerdict> {
    // Reported metric is 1 - p so that "smaller is better" like the other groups.
    let mut g = Group::new(
        "gue-normalization-ks",
        "1 - p of KS(normalized α₁, sphere marginal)",
        1.0 - KS_MIN_P,
    );
    for (k, (label, ens)) in validation_ensembles()?
        .into_iter()
        .filter(|(_, e)| e.kind() != EnsembleKind::Goe && e.r() >= 2)
        .enumerate()
    {
        let r = ens.r();
        let xs = (0..KS_SAMPLES)
            .map(|i| {
                let a = ens.sample(&mut sample_rng(seed.wrapping_add(5000 + k as u64), i as u64));
                a[0] / a.iter().map(|x| x * x).sum::<f64>().sqrt()
            })
            .collect::<Vec<_>>();
        let (_, p) = ks_test(&xs, |x| sphere_marginal_cdf(r, x));
        g.check(|| format!("{label} (p = {p:.4})"), 1.0 - p);
    }
    Ok(g.finish())
}

fn tensor_group() -> Result<GroupVerdict> {
    let mut g = Group::new("tensor-form-equivalence", "|tensor form - basis sum|", TENSOR_TOL);
    for row in table1_expected()? {
        let psi = row.state.parse::<StateId>()?.build()?;
        let ens = HamiltonianEnsemble::sphere(&LocalBasis::build(row.basis, row.d)?);
        let (col, nc) = mean_qfi_pure_pair(&psi, &ens);
        let tcol = mean_qfi_pure_tensor_collective(&psi, &ens)?;
        let tnc = mean_qfi_pure_tensor_noncollective(&psi, &ens)?;
        g.check(|| format!("{} {} collective", row.state, row.basis), (tcol - col).abs());
        g.check(
            || format!("{} {} noncollective", row.state, row.basis),
            (tnc - nc).abs(),
        );
    }
    Ok(g.finish())
}

fn rank_one_group(seed: u64) -> Result<GroupVerdict> {
    let mut g = Group::new(
        "rank-one-consistency",
        "|F(|ψ⟩⟨ψ|, H) - 4 Var_ψ H| / max(1, F)",
        RANK_ONE_TOL,
    );
    for (k, (n, d, basis)) in [
        (2usize, 2usize, BasisKind::Pauli),
        (4, 2, BasisKind::Pauli),
        (2, 3, BasisKind::GellMann),
        (3, 3, BasisKind::Spin),
    ]
    .into_iter()
    .enumerate()
    {
        let ens = HamiltonianEnsemble::sphere(&LocalBasis::build(basis, d)?);
        for s in 0..4u64 {
            let mut rng = sample_rng(seed ^ 0x0ae1, 10 * k as u64 + s);
            let psi = haar_random_state(n, d, &mut rng)?;
            let h = embed_collective(&ens.sample(&mut rng), ens.set(), n);
            let mixed = qfi_general(&psi.to_density(), &h)?;
            g.check(|| format!("n={n} d={d} draw {s}"), rel(mixed, qfi_pure(&psi, &h)));
        }
    }
    Ok(g.finish())
}

/// Runs every invariant group and reports a JSON verdict per group.
pub fn cmd_validate(config: &RunConfig) -> Result<Report> {
    let seed = config.seed.unwrap_or(DEFAULT_VALIDATE_SEED);
    let mut groups = linalg_group(seed)?;
    groups.push(trace_group(seed)?);
    groups.push(invariance_group(seed)?);
    groups.extend(ensemble_groups(seed)?);
    groups.push(prefactor_group(seed)?);
    groups.push(ks_group(seed)?);
    groups.push(tensor_group()?);
    groups.push(rank_one_group(seed)?);
    let passed = groups.iter().all(|g| g.passed);
    let report = ValidationReport { seed, groups, passed };
    Ok(Report {
        text: to_json(&report)?,
        passed,
        attachments: vec![],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_bookkeeping() {
        let mut g = Group::new("x", "m", 1.0);
        g.check(|| "a".into(), 0.5);
        g.check(|| "b".into(), f64::NAN);
        let v = g.finish();
        assert!(!v.passed);
        assert_eq!(v.checks, 2);
        assert_eq!(v.failures.len(), 1);
    }

    #[test]
    fn cheap_groups_pass() {
        for g in linalg_group(1).unwrap() {
            assert!(g.passed, "{g:?}");
        }
        assert!(invariance_group(1).unwrap().passed);
        assert!(rank_one_group(1).unwrap().passed);
        assert!(prefactor_group(1).unwrap().passed);
    }
}
