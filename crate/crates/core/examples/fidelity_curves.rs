//! Averaged fidelity against the bound cos²(½√⟨F⟩ t) on [0, t*].
//!
//! Three-generator sphere ensembles use quadrature; Gell-Mann noise falls
//! back to seeded Monte Carlo.
//!
//!     cargo run --release --example fidelity_curves

use qfi_noise::channels::{fidelity_curve, CurveSpec};
use qfi_noise::hamiltonians::{HamiltonianEnsemble, LocalBasis, NoiseMode};
use qfi_noise::qfi::{mean_qfi_pure_pair, t_star};
use qfi_noise::states::StateId;

fn main() -> qfi_noise::Result<()> {
    let cases = [
        ("ghz-4-2", LocalBasis::pauli()),
        ("ame-4-3", LocalBasis::spin(3)?),
        ("q4-2", LocalBasis::gellmann(3)?),
    ];
    for (label, basis) in cases {
        let psi = label.parse::<StateId>()?.build()?;
        let ensemble = HamiltonianEnsemble::sphere(&basis);
        let (col, nc) = mean_qfi_pure_pair(&psi, &ensemble);
        for (mode, mean) in [(NoiseMode::Collective, col), (NoiseMode::Noncollective, nc)] {
            let ts = t_star(mean);
            let times = (0..=10).map(|k| ts * k as f64 / 10.0).collect::<Vec<_>>();
            let spec = CurveSpec {
                mode,
                ensemble: ensemble.clone(),
                samples: 4000,
                seed: 17,
            };
            let curve = fidelity_curve(&psi, label, &spec, &times)?;
            println!(
                "{label} {} {mode}: <F_Q> = {mean:.4}, t* = {ts:.4}, {:?}",
                basis.kind(),
                curve.method
            );
            for p in curve.points.iter().step_by(2) {
                println!(
                    "  t = {:.3}  F = {:.5} ± {:.1e}  bound = {:.5}",
                    p.t, p.fidelity, p.fidelity_stderr, p.bound
                );
            }
        }
    }
    Ok(())
}
