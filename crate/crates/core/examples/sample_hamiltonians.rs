//! Sampling local Hamiltonians from the sphere, GUE and GOE ensembles and
//! checking E[Tr H²] against the analytic mean purity.
//!
//!     cargo run --release --example sample_hamiltonians

use qfi_noise::hamiltonians::{embed_collective, EnsembleKind, HamiltonianEnsemble, LocalBasis, Restriction};
use qfi_noise::mc::{estimate, sample_rng};

fn main() -> qfi_noise::Result<()> {
    let gm = LocalBasis::gellmann(3)?;
    let ensembles = [
        HamiltonianEnsemble::sphere(&LocalBasis::pauli()),
        HamiltonianEnsemble::new(EnsembleKind::Gue, &LocalBasis::pauli(), Restriction::Full)?,
        HamiltonianEnsemble::new(EnsembleKind::Gue, &gm, Restriction::Traceless)?,
        HamiltonianEnsemble::new(EnsembleKind::Goe, &gm, Restriction::RealSymmetric)?,
    ];
    for ens in &ensembles {
        let est = estimate(100_000, 1, |_, rng| {
            let h = ens.set().local_hamiltonian(&ens.sample(rng));
            h.trace_product(&h).re
        });
        println!(
            "{} {} r={}: E[Tr H²] = {:.4} ± {:.4} (expected {})",
            ens.kind(),
            ens.set().basis,
            ens.r(),
            est.mean,
            est.std_error,
            ens.mean_purity()
        );
    }

    let ens = &ensembles[0];
    let alpha = ens.sample(&mut sample_rng(9, 0));
    let h = embed_collective(&alpha, ens.set(), 2);
    println!("one collective two-qubit draw, alpha = {alpha:.4?}");
    for i in 0..4 {
        let row = (0..4).map(|j| format!("{:+.3}{:+.3}i", h.matrix[(i, j)].re, h.matrix[(i, j)].im));
        println!("  {}", row.collect::<Vec<_>>().join("  "));
    }
    Ok(())
}
