//! Mean QFI of the reference states under collective and non-collective
//! sphere noise, next to the exact stored values.
//!
//!     cargo run --release --example table1

use qfi_noise::commands::table1_expected;
use qfi_noise::hamiltonians::{HamiltonianEnsemble, LocalBasis};
use qfi_noise::qfi::mean_qfi_pure_pair;
use qfi_noise::states::StateId;

fn main() -> qfi_noise::Result<()> {
    println!(
        "{:>2} {:>2} {:<9} {:<10} {:>10} {:>10}   exact",
        "d", "n", "basis", "state", "col", "noncol"
    );
    for row in table1_expected()? {
        let psi = row.state.parse::<StateId>()?.build()?;
        let ens = HamiltonianEnsemble::sphere(&LocalBasis::build(row.basis, row.d)?);
        let (col, nc) = mean_qfi_pure_pair(&psi, &ens);
        println!(
            "{:>2} {:>2} {:<9} {:<10} {col:>10.6} {nc:>10.6}   {} / {}",
            row.d,
            row.n,
            row.basis.to_string(),
            row.state,
            row.collective,
            row.noncollective
        );
    }
    Ok(())
}
