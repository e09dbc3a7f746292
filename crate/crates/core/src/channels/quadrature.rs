//! Deterministic fidelity of pure states under sphere-uniform noise over
//! three generators, by product quadrature on S².

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hamiltonians::{EnsembleKind, GeneratorSet, HamiltonianEnsemble, NoiseMode};
use crate::linalg::{apply_local, exp_hermitian, hermitian_eig, ComplexMatrix, ZERO};
use crate::mc::with_workers;
use crate::states::{ket_digits, PureState};

/// Successive quadrature orders must agree to this before a result is accepted.
pub const QUADRATURE_TOL: f64 = 1e-9;
const START_ORDER: usize = 8;
const MAX_ORDER: usize = 256;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let nf = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

/// Product rule on the unit sphere: Gauss–Legendre in `cos θ` times `2q`
/// equally spaced azimuths. Weights sum to one.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub order: usize,
    pub points: Vec<([f64; 3], f64)>,
}

impl SphereRule {
    pub fn new(order: usize) -> Self {
        let (xs, ws) = gauss_legendre(order);
        let az = 2 * order;
        let mut points = Vec::with_capacity(order * az);
        for (x, w) in xs.iter().zip(&ws) {
            let s = (1.0 - x * x).sqrt();
            for j in 0..az {
                let phi = 2.0 * std::f64::consts::PI * j as f64 / az as f64;
                points.push(([s * phi.cos(), s * phi.sin(), *x], w / (2.0 * az as f64)));
            }
        }
        Self { order, points }
    }
}

fn sphere_three(ensemble: &HamiltonianEnsemble) -> Result<&GeneratorSet> {
    if ensemble.kind() != EnsembleKind::Sphere || ensemble.r() != 3 {
        return Err(Error::Unsupported(format!(
            "quadrature needs a sphere ensemble over 3 generators, got {} over {}",
            ensemble.kind(),
            ensemble.r()
        )));
    }
    Ok(ensemble.set())
}

/// Doubles the order from 8 until every entry moves by less than the tolerance.
fn converge(eval: impl Fn(&SphereRule) -> Result<Vec<f64>>) -> Result<Vec<f64>> {
    let mut order = START_ORDER;
    let mut prev = eval(&SphereRule::new(order))?;
    while order < MAX_ORDER {
        order *= 2;
        let next = eval(&SphereRule::new(order))?;
        let diff = prev.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if diff < QUADRATURE_TOL {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Unsupported(format!(
        "sphere quadrature did not converge by order {MAX_ORDER}"
    )))
}

fn direction_hamiltonian(set: &GeneratorSet, k: &[f64; 3]) -> ComplexMatrix {
    set.local_hamiltonian(k)
}

/// Populations `|φ_k|²` and total energies `E_k` of `ψ` in the product eigenbasis
/// of the local Hamiltonians, so `⟨ψ|⊗ₛe^{-itHₛ}|ψ⟩ = Σ_k |φ_k|² e^{-itE_k}`.
pub(crate) fn spectral_overlap(psi: &PureState, locals: &[&ComplexMatrix]) -> Result<(Vec<f64>, Vec<f64>)> {
    let (n, d) = (psi.n(), psi.d());
    let mut phi = psi.amplitudes().to_vec();
    let mut energies = Vec::with_capacity(n);
    for (site, h) in locals.iter().enumerate() {
        let eig = hermitian_eig(h)?;
        phi = apply_local(&eig.eigenvectors.adjoint(), site, n, &phi);
        energies.push(eig.eigenvalues);
    }
    let mut weights = Vec::with_capacity(phi.len());
    let mut totals = Vec::with_capacity(phi.len());
    for (idx, amp) in phi.iter().enumerate() {
        let p = amp.norm_sqr();
        if p < 1e-30 {
            continue;
        }
        let digits = ket_digits(idx, n, d);
        weights.push(p);
        totals.push(digits.iter().enumerate().map(|(s, &k)| energies[s][k]).sum());
    }
    Ok((weights, totals))
}

pub(crate) fn echo_fidelity(weights: &[f64], energies: &[f64], t: f64) -> f64 {
    let amp: Complex64 = weights
        .iter()
        .zip(energies)
        .map(|(p, e)| Complex64::from_polar(*p, -t * e))
        .sum();
    amp.norm_sqr()
}

/// `∫_{S²} |⟨ψ|(e^{-itH_k})^{⊗n}|ψ⟩|² dk/4π` at each time.
pub fn exact_fidelity_pure_collective(
    psi: &PureState,
    ensemble: &HamiltonianEnsemble,
    times: &[f64],
) -> Result<Vec<f64>> {
    let set = sphere_three(ensemble)?;
    if set.d != psi.d() {
        return Err(Error::Dimension(format!(
            "ensemble acts on d = {}, state has d = {}",
            set.d,
            psi.d()
        )));
    }
    converge(|rule| {
        let per_node = with_workers(|| {
            rule.points
                .par_iter()
                .map(|(k, w)| {
                    let h = direction_hamiltonian(set, k);
                    let locals = vec![&h; psi.n()];
                    let (p, e) = spectral_overlap(psi, &locals)?;
                    Ok(times.iter().map(|&t| w * echo_fidelity(&p, &e, t)).collect::<Vec<_>>())
                })
                .collect::<Result<Vec<_>>>()
        })?;
        let mut out = vec![0.0; times.len()];
        for v in per_node {
            for (o, x) in out.iter_mut().zip(v) {
                *o += x;
            }
        }
        Ok(out)
    })
}

/// Sphere average of `U ⊗ Ū` for `U = e^{-itH_k}`, as a `d²×d²` matrix with
/// row `(a, b)` and column `(a', b')` holding `E[U_{aa'} conj(U_{bb'})]`.
pub fn single_site_superoperator(set: &GeneratorSet, t: f64, rule: &SphereRule) -> Result<ComplexMatrix> {
    let d = set.d;
    let mut s = ComplexMatrix::zeros(d * d);
    for (k, w) in &rule.points {
        let u = exp_hermitian(&direction_hamiltonian(set, k), t)?;
        for a in 0..d {
            for b in 0..d {
                for a2 in 0..d {
                    let x = u[(a, a2)] * *w;
                    if x == ZERO {
                        continue;
                    }
                    for b2 in 0..d {
                        s[(a * d + b, a2 * d + b2)] += x * u[(b, b2)].conj();
                    }
                }
            }
        }
    }
    Ok(s)
}

/// `ρ ↦ Σ S[(a,b),(a',b')] ρ[..a'.., ..b'..]` on one site.
fn apply_superoperator(rho: &ComplexMatrix, s: &ComplexMatrix, site: usize, n: usize, d: usize) -> ComplexMatrix {
    let dim = rho.dim();
    let inner = d.pow((n - site - 1) as u32);
    let digit = |i: usize| (i / inner) % d;
    let mut out = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        let a = digit(i);
        let i_base = i - a * inner;
        for j in 0..dim {
            let b = digit(j);
            let j_base = j - b * inner;
            let mut acc = ZERO;
            for a2 in 0..d {
                for b2 in 0..d {
                    let coef = s[(a * d + b, a2 * d + b2)];
                    if coef != ZERO {
                        acc += coef * rho[(i_base + a2 * inner, j_base + b2 * inner)];
                    }
                }
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// Non-collective counterpart: the averaged single-site channel is applied to
/// every site in turn and the overlap with `ψ` read off.
pub fn exact_fidelity_pure_noncollective(
    psi: &PureState,
    ensemble: &HamiltonianEnsemble,
    times: &[f64],
) -> Result<Vec<f64>> {
    let set = sphere_three(ensemble)?;
    if set.d != psi.d() {
        return Err(Error::Dimension(format!(
            "ensemble acts on d = {}, state has d = {}",
            set.d,
            psi.d()
        )));
    }
    let (n, d) = (psi.n(), psi.d());
    let rho0 = ComplexMatrix::outer(psi.amplitudes());
    converge(|rule| {
        with_workers(|| {
            times
                .par_iter()
                .map(|&t| {
                    let s = single_site_superoperator(set, t, rule)?;
                    let mut rho = rho0.clone();
                    for site in 0..n {
                        rho = apply_superoperator(&rho, &s, site, n, d);
                    }
                    Ok(rho.sandwich(psi.amplitudes(), psi.amplitudes()).re)
                })
                .collect()
        })
    })
}

pub fn exact_fidelity_pure(
    psi: &PureState,
    ensemble: &HamiltonianEnsemble,
    mode: NoiseMode,
    times: &[f64],
) -> Result<Vec<f64>> {
    match mode {
        NoiseMode::Collective => exact_fidelity_pure_collective(psi, ensemble, times),
        NoiseMode::Noncollective => exact_fidelity_pure_noncollective(psi, ensemble, times),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::pure_fidelity_mc;
    use crate::hamiltonians::LocalBasis;
    use crate::states::{ghz_state, qutrit_dicke};

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // Exact up to degree 15.
        for p in [0, 2, 4, 10, 14] {
            let q = x.iter().zip(&w).map(|(x, w)| w * x.powi(p)).sum::<f64>();
            assert!((q - 2.0 / (p as f64 + 1.0)).abs() < 1e-13, "degree {p}");
        }
        let (x, _) = gauss_legendre(5);
        assert!(x[2].abs() < 1e-15);
        assert!((x[4] - 0.906_179_845_938_664).abs() < 1e-14);
    }

    #[test]
    fn sphere_rule_moments() {
        let rule = SphereRule::new(8);
        let total = rule.points.iter().map(|(_, w)| w).sum::<f64>();
        assert!((total - 1.0).abs() < 1e-14);
        for axis in 0..3 {
            let m2 = rule.points.iter().map(|(k, w)| w * k[axis] * k[axis]).sum::<f64>();
            assert!((m2 - 1.0 / 3.0).abs() < 1e-14);
        }
        let m4 = rule.points.iter().map(|(k, w)| w * k[0].powi(4)).sum::<f64>();
        assert!((m4 - 0.2).abs() < 1e-14);
    }

    #[test]
    fn starts_at_one_and_matches_monte_carlo() {
        let ens = HamiltonianEnsemble::sphere(&LocalBasis::pauli());
        let psi = ghz_state(4, 2).unwrap();
        let times = [0.0, 0.3];
        for mode in [NoiseMode::Collective, NoiseMode::Noncollective] {
            let exact = exact_fidelity_pure(&psi, &ens, mode, &times).unwrap();
            assert!((exact[0] - 1.0).abs() < 1e-12);
            let mc = pure_fidelity_mc(&psi, &ens, mode, &times, 20_000, 8).unwrap();
            assert!(mc[1].within(exact[1], 3.0), "{mode}: {} vs {:?}", exact[1], mc[1]);
        }
    }

    #[test]
    fn short_time_expansion_matches_mean_qfi() {
        let ens = HamiltonianEnsemble::sphere(&LocalBasis::spin(3).unwrap());
        let psi = qutrit_dicke(2).unwrap();
        let (col, nc) = crate::qfi::mean_qfi_pure_pair(&psi, &ens);
        for (mode, f) in [(NoiseMode::Collective, col), (NoiseMode::Noncollective, nc)] {
            let times = [1e-3, 2e-3, 5e-3, 1e-2];
            let fid = exact_fidelity_pure(&psi, &ens, mode, &times).unwrap();
            for (t, v) in times.iter().zip(fid) {
                let k = (v - 1.0 + f * t * t / 4.0).abs() / t.powi(3);
                assert!(k < 50.0, "{mode} t={t} K={k}");
            }
        }
    }

    #[test]
    fn rejects_eight_generators() {
        let ens = HamiltonianEnsemble::sphere(&LocalBasis::gellmann(3).unwrap());
        let psi = qutrit_dicke(1).unwrap();
        assert!(matches!(
            exact_fidelity_pure_collective(&psi, &ens, &[0.1]),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn superoperator_is_trace_preserving() {
        let set = LocalBasis::spin(3)
            .unwrap()
            .generator_set(crate::hamiltonians::Restriction::Traceless);
        let s = single_site_superoperator(&set, 0.7, &SphereRule::new(8)).unwrap();
        let rho = ComplexMatrix::from_real_diag(&[0.2, 0.5, 0.3]);
        let out = apply_superoperator(&rho, &s, 0, 1, 3);
        assert!((out.trace().re - 1.0).abs() < 1e-13);
        assert!(out.is_hermitian(1e-13));
    }
}
