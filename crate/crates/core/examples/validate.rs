//! Runs the invariant and property groups and prints one line per group.
//!
//!     cargo run --release --example validate

use qfi_noise::commands::{cmd_validate, RunConfig, ValidationReport};

fn main() -> qfi_noise::Result<()> {
    let report = cmd_validate(&RunConfig::default())?;
    let parsed: ValidationReport = serde_json::from_str(&report.text)?;
    for g in &parsed.groups {
        let verdict = if g.passed { "ok  " } else { "FAIL" };
        println!(
            "{verdict} {:<26} {:>4} checks  worst {:.3e} / {:.1e}",
            g.name, g.checks, g.worst, g.limit
        );
    }
    println!(
        "seed {}: {}",
        parsed.seed,
        if parsed.passed { "all groups pass" } else { "failures" }
    );
    Ok(())
}
