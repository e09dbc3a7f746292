//! Symmetric-subspace populations of |GHZ₅⁺⟩ under collective Pauli-sphere
//! noise: closed form against Monte Carlo, and the smallest spread the
//! dynamics ever reach.
//!
//!     cargo run --release --example ghz5_evolution

use qfi_noise::channels::{ghz5_coefficients, ghz5_populations_mc, ghz5_spread_minimum};

fn main() -> qfi_noise::Result<()> {
    for t in [0.0, 0.5, 1.0, 2.0, 4.0] {
        let exact = ghz5_coefficients(t).populations();
        let mc = ghz5_populations_mc(t, 20_000, 5)?;
        println!("t = {t}");
        for (k, name) in ["D1", "D2", "D3", "D4", "GHZ+", "GHZ-"].iter().enumerate() {
            let e = mc.populations[k];
            println!("  {name:<5} {:.5}  mc {:.5} ± {:.1e}", exact[k], e.mean, e.std_error);
        }
    }
    let (t, spread) = ghz5_spread_minimum(10_000);
    println!("min over t of max-min population: {spread:.5} at t = {t:.4}");
    Ok(())
}
