//! QFI of mixed states from the spectral decomposition, with an ensemble
//! average checked against seeded Monte Carlo.
//!
//!     cargo run --release --example mixed_state_qfi

use qfi_noise::hamiltonians::{HamiltonianEnsemble, LocalBasis, NoiseMode};
use qfi_noise::mc::sample_rng;
use qfi_noise::qfi::{mc_mean_qfi, mean_qfi};
use qfi_noise::states::{dicke_state, haar_random_state, DensityMatrix};

fn main() -> qfi_noise::Result<()> {
    let ens = HamiltonianEnsemble::sphere(&LocalBasis::pauli());
    let dicke = dicke_state(4, 2)?.to_density();
    let haar = haar_random_state(4, 2, &mut sample_rng(42, 0))?.to_density();
    for w in [1.0, 0.75, 0.5] {
        let m = &dicke.matrix().scale_real(w) + &haar.matrix().scale_real(1.0 - w);
        let rho = DensityMatrix::new(4, 2, m)?;
        for mode in [NoiseMode::Collective, NoiseMode::Noncollective] {
            let exact = mean_qfi(&rho, &ens, mode)?;
            let mc = mc_mean_qfi(&rho, &ens, mode, 5000, 8)?;
            println!(
                "w = {w:<4} purity {:.3} {mode:<13} <F_Q> = {exact:.5}  mc {:.5} ± {:.5}",
                rho.purity(),
                mc.mean,
                mc.std_error
            );
        }
    }
    Ok(())
}
