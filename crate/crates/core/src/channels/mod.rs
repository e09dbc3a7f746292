//! Random-unitary channels generated by local random Hamiltonians, Haar
//! twirling, fidelity measures and the averaged short-time fidelity bound.

mod curve;
mod fidelity;
mod ghz5;
mod quadrature;

pub use curve::{
    fidelity_curve, pure_fidelity_mc, CurvePoint, CurveSpec, FidelityCurve, FidelityMethod, CURVE_CSV_COLUMNS,
    GRID_SLACK,
};
pub use fidelity::{affinity, bures_fidelity, tm_bound, BoundValue};
pub use ghz5::{
    channel_populations, ghz5_basis, ghz5_coefficients, ghz5_populations_mc, ghz5_spread_minimum, twirl_populations,
    Ghz5Coefficients, Ghz5Populations,
};
pub use quadrature::{
    exact_fidelity_pure, exact_fidelity_pure_collective, exact_fidelity_pure_noncollective, gauss_legendre,
    single_site_superoperator, SphereRule, QUADRATURE_TOL,
};

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonians::{CoefficientSampler, HamiltonianEnsemble, NoiseMode};
use crate::linalg::{apply_product, exp_hermitian, hermitian_eig, ComplexMatrix};
use crate::mc::{sum_samples, SampleRng};
use crate::qfi::PAIR_CUTOFF;
use crate::states::DensityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelMode {
    Collective,
    Noncollective,
    /// `U^{⊗n}` with `U` Haar random; time plays no role.
    Twirl,
}

impl From<NoiseMode> for ChannelMode {
    fn from(m: NoiseMode) -> Self {
        match m {
            NoiseMode::Collective => Self::Collective,
            NoiseMode::Noncollective => Self::Noncollective,
        }
    }
}

impl fmt::Display for ChannelMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Collective => f.write_str("collective"),
            Self::Noncollective => f.write_str("noncollective"),
            Self::Twirl => f.write_str("twirl"),
        }
    }
}

impl FromStr for ChannelMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("twirl") {
            return Ok(Self::Twirl);
        }
        s.parse::<NoiseMode>().map(Self::from)
    }
}

/// One Monte Carlo realization of a channel.
#[derive(Debug, Clone)]
pub struct ChannelSpec {
    pub mode: ChannelMode,
    pub ensemble: Option<HamiltonianEnsemble>,
    pub t: f64,
    pub samples: usize,
    pub seed: u64,
}

impl ChannelSpec {
    pub fn hamiltonian(mode: NoiseMode, ensemble: HamiltonianEnsemble, t: f64, samples: usize, seed: u64) -> Self {
        Self {
            mode: mode.into(),
            ensemble: Some(ensemble),
            t,
            samples,
            seed,
        }
    }

    pub fn twirl(samples: usize, seed: u64) -> Self {
        Self {
            mode: ChannelMode::Twirl,
            ensemble: None,
            t: 0.0,
            samples,
            seed,
        }
    }

    fn validate(&self, d: usize) -> Result<()> {
        if !self.t.is_finite() || self.t < 0.0 {
            return Err(Error::Argument(format!(
                "evolution time must be finite and >= 0, got {}",
                self.t
            )));
        }
        if self.samples == 0 {
            return Err(Error::Argument("need at least one sample".into()));
        }
        match (&self.mode, &self.ensemble) {
            (ChannelMode::Twirl, _) => Ok(()),
            (_, None) => Err(Error::Config(format!(
                "{} channel needs a Hamiltonian ensemble",
                self.mode
            ))),
            (_, Some(e)) if e.set().d != d => Err(Error::Dimension(format!(
                "ensemble acts on d = {}, state has d = {d}",
                e.set().d
            ))),
            _ => Ok(()),
        }
    }

    /// Per-site unitaries for one sample.
    pub fn draw_unitaries(&self, n: usize, d: usize, rng: &mut SampleRng) -> Result<Vec<ComplexMatrix>> {
        match self.mode {
            ChannelMode::Twirl => Ok(vec![haar_unitary(d, rng); n]),
            ChannelMode::Collective => {
                let e = self.ensemble.as_ref().expect("validated");
                let u = exp_hermitian(&e.set().local_hamiltonian(&e.draw(rng)), self.t)?;
                Ok(vec![u; n])
            }
            ChannelMode::Noncollective => {
                let e = self.ensemble.as_ref().expect("validated");
                (0..n)
                    .map(|_| exp_hermitian(&e.set().local_hamiltonian(&e.draw(rng)), self.t))
                    .collect()
            }
        }
    }
}

/// Haar-random `d×d` unitary: Gram–Schmidt on a complex Ginibre matrix,
/// with each column's phase fixed so the triangular factor has a positive diagonal.
pub fn haar_unitary(d: usize, rng: &mut SampleRng) -> ComplexMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut cols: Vec<Vec<Complex64>> = (0..d)
        .map(|_| {
            (0..d)
                .map(|_| {
                    Complex64::new(
                        rng.sample::<f64, _>(StandardNormal),
                        rng.sample::<f64, _>(StandardNormal),
                    ) * scale
                })
                .collect()
        })
        .collect();
    for j in 0..d {
        for k in 0..j {
            let (done, rest) = cols.split_at_mut(j);
            let proj: Complex64 = done[k].iter().zip(rest[0].iter()).map(|(a, b)| a.conj() * b).sum();
            for (x, q) in rest[0].iter_mut().zip(&done[k]) {
                *x -= proj * q;
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for x in cols[j].iter_mut() {
            *x /= norm;
        }
    }
    let mut u = ComplexMatrix::zeros(d);
    for (j, col) in cols.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            u[(i, j)] = x;
        }
    }
    u
}

/// Monte Carlo average of `U ρ U†` over the channel's unitaries, renormalized
/// to unit trace.
pub fn apply_channel(rho: &DensityMatrix, spec: &ChannelSpec) -> Result<DensityMatrix> {
    let (n, d, dim) = (rho.n(), rho.d(), rho.dim());
    spec.validate(d)?;
    let eig = hermitian_eig(rho.matrix())?;
    let support = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > PAIR_CUTOFF / 2.0)
        .map(|(k, &l)| (l, eig.eigenvector(k)))
        .collect::<Vec<_>>();

    let total = sum_samples(spec.samples, spec.seed, |_, rng| {
        let us = spec
            .draw_unitaries(n, d, rng)
            .expect("local exponential of a Hermitian matrix");
        let refs = us.iter().collect::<Vec<_>>();
        let mut acc = vec![0.0; 2 * dim * dim];
        for (w, v) in &support {
            let uv = apply_product(&refs, v);
            for i in 0..dim {
                let a = uv[i] * *w;
                for j in 0..dim {
                    let z = a * uv[j].conj();
                    acc[2 * (i * dim + j)] += z.re;
                    acc[2 * (i * dim + j) + 1] += z.im;
                }
            }
        }
        acc
    })
    .expect("at least one sample");

    let entries = total
        .chunks_exact(2)
        .map(|p| Complex64::new(p[0], p[1]) / spec.samples as f64)
        .collect::<Vec<_>>();
    let mut out = ComplexMatrix::from_row_major(entries)?.hermitian_part();
    let tr = out.trace().re;
    out = out.scale_real(1.0 / tr);
    Ok(DensityMatrix::new_unchecked(n, d, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{FixedCoefficients, LocalBasis, Restriction};
    use crate::mc::{estimate, sample_rng};
    use crate::states::{dicke_state, ghz_state, haar_random_state, PureState};

    #[test]
    fn haar_unitaries_are_unitary_with_uniform_moments() {
        for d in [2, 3, 4] {
            for i in 0..20 {
                assert!(haar_unitary(d, &mut sample_rng(5, i)).is_unitary(1e-12));
            }
            let est = estimate(20_000, 9, |_, rng| haar_unitary(d, rng)[(0, 0)].norm_sqr());
            assert!(est.within(1.0 / d as f64, 4.0), "d={d} {est:?}");
            // E|U₁₁|⁴ = 2/(d(d+1))
            let est4 = estimate(20_000, 10, |_, rng| haar_unitary(d, rng)[(0, 0)].norm_sqr().powi(2));
            assert!(est4.within(2.0 / (d * (d + 1)) as f64, 4.0), "d={d} {est4:?}");
        }
    }

    #[test]
    fn zero_time_leaves_state_unchanged() {
        let rho = dicke_state(3, 1).unwrap().to_density();
        let ens = HamiltonianEnsemble::sphere(&LocalBasis::pauli());
        for mode in [NoiseMode::Collective, NoiseMode::Noncollective] {
            let out = apply_channel(&rho, &ChannelSpec::hamiltonian(mode, ens.clone(), 0.0, 50, 1)).unwrap();
            assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-13);
        }
    }

    #[test]
    fn fixed_direction_rotates_coherence() {
        // Σ σz/2 on |GHZ₂⟩ multiplies |00⟩⟨11| by e^{-2it}.
        let set = LocalBasis::pauli().generator_set(Restriction::Traceless);
        let fixed = FixedCoefficients {
            set,
            alpha: vec![0.0, 0.0, 1.0],
        };
        let t = 0.37;
        let mut rng = sample_rng(0, 0);
        let spec_u = exp_hermitian(&fixed.set.local_hamiltonian(&fixed.draw(&mut rng)), t).unwrap();
        let psi = ghz_state(2, 2).unwrap();
        let out = apply_product(&[&spec_u, &spec_u], psi.amplitudes());
        let rho = ComplexMatrix::outer(&out);
        let expected = Complex64::from_polar(0.5, -2.0 * t);
        assert!((rho[(0, 3)] - expected).norm() < 1e-14);
    }

    #[test]
    fn output_is_trace_one_hermitian_psd() {
        let ens = HamiltonianEnsemble::sphere(&LocalBasis::spin(3).unwrap());
        let psi = haar_random_state(2, 3, &mut sample_rng(3, 3)).unwrap();
        for mode in [NoiseMode::Collective, NoiseMode::Noncollective] {
            let out = apply_channel(
                &psi.to_density(),
                &ChannelSpec::hamiltonian(mode, ens.clone(), 0.8, 300, 2),
            )
            .unwrap();
            assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
            assert!(out.matrix().is_hermitian(1e-14));
            assert!(out.matrix().is_psd(1e-10));
            assert!(out.purity() < 1.0);
        }
    }

    #[test]
    fn twirl_ignores_time_and_needs_no_ensemble() {
        let rho = ghz_state(2, 2).unwrap().to_density();
        let a = apply_channel(&rho, &ChannelSpec::twirl(200, 4)).unwrap();
        let mut later = ChannelSpec::twirl(200, 4);
        later.t = 5.0;
        let b = apply_channel(&rho, &later).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-15);
    }

    #[test]
    fn missing_ensemble_and_bad_time_are_rejected() {
        let rho = ghz_state(2, 2).unwrap().to_density();
        let mut spec = ChannelSpec::twirl(10, 1);
        spec.mode = ChannelMode::Collective;
        assert!(matches!(apply_channel(&rho, &spec), Err(Error::Config(_))));
        let ens = HamiltonianEnsemble::sphere(&LocalBasis::spin(3).unwrap());
        let spec = ChannelSpec::hamiltonian(NoiseMode::Collective, ens, 0.1, 10, 1);
        assert!(matches!(apply_channel(&rho, &spec), Err(Error::Dimension(_))));
        let ens = HamiltonianEnsemble::sphere(&LocalBasis::pauli());
        let spec = ChannelSpec::hamiltonian(NoiseMode::Collective, ens, -1.0, 10, 1);
        assert!(matches!(apply_channel(&rho, &spec), Err(Error::Argument(_))));
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("twirl".parse::<ChannelMode>().unwrap(), ChannelMode::Twirl);
        assert_eq!(
            "non-collective".parse::<ChannelMode>().unwrap(),
            ChannelMode::Noncollective
        );
        assert!("sideways".parse::<ChannelMode>().is_err());
        let _ = PureState::new(1, 2, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
    }
}
