//! Metrological reading of the mean QFI: the single-shot time resolution
//! 1/√⟨F⟩, the quantum speed limit t*, and the skew information
//! sandwiching the QFI of a mixed probe (2I ≤ F_Q ≤ 4I).
//!
//!     cargo run --release --example metrology

use qfi_noise::hamiltonians::{collective_generator, HamiltonianEnsemble, LocalBasis, NoiseMode};
use qfi_noise::qfi::{estimation_bound, mean_qfi, qfi_general, skew_information, t_star};
use qfi_noise::states::{ghz_state, DensityMatrix};

fn main() -> qfi_noise::Result<()> {
    let ens = HamiltonianEnsemble::sphere(&LocalBasis::pauli());
    for p in [1.0, 0.9, 0.6, 0.3] {
        // GHZ mixed with white noise.
        let ghz = ghz_state(4, 2)?.to_density();
        let white = DensityMatrix::maximally_mixed(4, 2);
        let m = &ghz.matrix().scale_real(p) + &white.matrix().scale_real(1.0 - p);
        let rho = DensityMatrix::new(4, 2, m)?;
        let f = mean_qfi(&rho, &ens, NoiseMode::Collective)?;
        let hz = collective_generator(ens.set(), 4, 2);
        let fz = qfi_general(&rho, &hz)?;
        let skew = skew_information(&rho, &hz.matrix)?;
        println!(
            "p = {p}: <F_Q> = {f:.4}, dt >= {:.4}, t* = {:.4}; along Jz: {:.4} <= F_Q = {fz:.4} <= {:.4}",
            estimation_bound(f)?,
            t_star(f),
            2.0 * skew,
            4.0 * skew
        );
    }
    Ok(())
}
