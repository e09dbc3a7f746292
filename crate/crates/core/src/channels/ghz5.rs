//! Five-qubit GHZ state under collective sphere noise: closed-form
//! populations of the symmetric subspace and their Monte Carlo counterpart.

use serde::{Deserialize, Serialize};

use super::ChannelSpec;
use crate::error::Result;
use crate::hamiltonians::{HamiltonianEnsemble, LocalBasis, NoiseMode};
use crate::linalg::{apply_product, inner};
use crate::mc::{estimate_vec, Estimate};
use crate::states::{dicke_state, ghz_minus_state, ghz_state, PureState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ghz5Coefficients {
    pub t: f64,
    pub zeta: [f64; 4],
}

impl Ghz5Coefficients {
    /// Populations on `(D₁, D₂, D₃, D₄, GHZ⁺, GHZ⁻)`.
    pub fn populations(&self) -> [f64; 6] {
        let [z1, z2, z3, z4] = self.zeta;
        [z1, z2, z2, z1, z3, z4]
    }

    /// `2ζ₁ + 2ζ₂ + ζ₃ + ζ₄`
    pub fn total(&self) -> f64 {
        let [z1, z2, z3, z4] = self.zeta;
        2.0 * z1 + 2.0 * z2 + z3 + z4
    }

    /// `max ζᵢ - min ζᵢ`; zero only if all four coincide.
    pub fn spread(&self) -> f64 {
        let max = self.zeta.iter().copied().fold(f64::MIN, f64::max);
        let min = self.zeta.iter().copied().fold(f64::MAX, f64::min);
        max - min
    }
}

/// Closed-form populations for local Hamiltonians `k·σ/2`, `k ∈ S²`.
pub fn ghz5_coefficients(t: f64) -> Ghz5Coefficients {
    let c = |k: f64| (k * t).cos();
    let s2 = (t / 2.0).sin().powi(2);
    let z1 = s2 * (13.0 + 14.0 * c(1.0) + 6.0 * c(2.0) + 2.0 * c(3.0)) / 21.0;
    let z2 = 8.0 / 63.0 * s2 * s2 * (9.0 + 10.0 * c(1.0) + 2.0 * c(2.0));
    let z3 = (382.0 + 302.0 * c(1.0) + 302.0 * c(2.0) + 137.0 * c(3.0) + 137.0 * c(4.0) + 126.0 * c(5.0)) / 1386.0;
    let z4 = (256.0 + 50.0 * c(1.0) + 50.0 * c(2.0) - 115.0 * c(3.0) - 115.0 * c(4.0) - 126.0 * c(5.0)) / 1386.0;
    Ghz5Coefficients {
        t,
        zeta: [z1, z2, z3, z4],
    }
}

/// `(t, spread)` at the grid point in `[0, 2π]` where the four coefficients
/// come closest to each other.
pub fn ghz5_spread_minimum(points: usize) -> (f64, f64) {
    (0..points)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / (points - 1).max(1) as f64;
            (t, ghz5_coefficients(t).spread())
        })
        .fold((0.0, f64::MAX), |best, x| if x.1 < best.1 { x } else { best })
}

/// `[D₁, D₂, D₃, D₄, GHZ⁺, GHZ⁻]` on five qubits.
pub fn ghz5_basis() -> Vec<PureState> {
    let mut basis = (1..=4)
        .map(|e| dicke_state(5, e).expect("valid Dicke state"))
        .collect::<Vec<_>>();
    basis.push(ghz_state(5, 2).expect("valid GHZ state"));
    basis.push(ghz_minus_state(5).expect("valid GHZ state"));
    basis
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ghz5Populations {
    pub t: f64,
    pub populations: Vec<Estimate>,
    /// Weight outside the six-state basis.
    pub leakage: Estimate,
}

/// Averaged populations `E|⟨b|U|ψ⟩|²` of the channel output on `basis`.
pub fn channel_populations(
    psi: &PureState,
    spec: &ChannelSpec,
    basis: &[PureState],
) -> Result<(Vec<Estimate>, Estimate)> {
    let (n, d) = (psi.n(), psi.d());
    // Validates the spec on the way.
    super::apply_channel(
        &psi.to_density(),
        &ChannelSpec {
            samples: 1,
            ..spec.clone()
        },
    )?;
    let len = basis.len() + 1;
    let mut est = estimate_vec(spec.samples, spec.seed, len, |_, rng| {
        let us = spec.draw_unitaries(n, d, rng).expect("validated channel");
        let refs = us.iter().collect::<Vec<_>>();
        let out = apply_product(&refs, psi.amplitudes());
        let mut pops = basis
            .iter()
            .map(|b| inner(b.amplitudes(), &out).norm_sqr())
            .collect::<Vec<_>>();
        let leak = 1.0 - pops.iter().sum::<f64>();
        pops.push(leak);
        pops
    });
    let leakage = est.pop().expect("leakage entry");
    Ok((est, leakage))
}

/// Monte Carlo populations of `|GHZ₅⁺⟩` after collective `k·σ/2` noise for time `t`.
pub fn ghz5_populations_mc(t: f64, samples: usize, seed: u64) -> Result<Ghz5Populations> {
    let ens = HamiltonianEnsemble::sphere(&LocalBasis::pauli());
    let spec = ChannelSpec::hamiltonian(NoiseMode::Collective, ens, t, samples, seed);
    let (populations, leakage) = channel_populations(&ghz_state(5, 2)?, &spec, &ghz5_basis())?;
    Ok(Ghz5Populations {
        t,
        populations,
        leakage,
    })
}

/// Haar-twirled `|GHZ₅⁺⟩` populations on the same basis.
pub fn twirl_populations(samples: usize, seed: u64) -> Result<Ghz5Populations> {
    let spec = ChannelSpec::twirl(samples, seed);
    let (populations, leakage) = channel_populations(&ghz_state(5, 2)?, &spec, &ghz5_basis())?;
    Ok(Ghz5Populations {
        t: f64::NAN,
        populations,
        leakage,
    })
}
