use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{to_json, Format, Report, RunConfig};
use crate::channels::{ghz5_coefficients, ghz5_populations_mc, ghz5_spread_minimum, twirl_populations};
use crate::csvfmt::float;
use crate::error::Result;
use crate::mc::Estimate;

/// Largest allowed `|MC - ζ|` over all populations and times.
pub const GHZ5_MAX_DEVIATION: f64 = 5e-3;
pub const NORMALIZATION_TOL: f64 = 1e-12;
pub const SPREAD_GRID: usize = 10_000;
const DEFAULT_SAMPLES: usize = 100_000;
const DEFAULT_TIMES: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ghz5Row {
    pub t: f64,
    pub zeta: [f64; 4],
    /// Closed-form populations on `(D₁, D₂, D₃, D₄, GHZ⁺, GHZ⁻)`.
    pub expected: [f64; 6],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<Vec<Estimate>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leakage: Option<Estimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ghz5Report {
    pub seed: Option<u64>,
    pub samples: usize,
    pub rows: Vec<Ghz5Row>,
    pub max_deviation: f64,
    /// `max |2ζ₁ + 2ζ₂ + ζ₃ + ζ₄ - 1|` over the spread grid.
    pub normalization_residual: f64,
    pub min_spread: f64,
    pub min_spread_t: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub twirl: Option<Vec<Estimate>>,
    pub passed: bool,
}

/// Closed-form and sampled GHZ₅ populations, normalization and the never-equal statistic.
pub fn cmd_ghz5(config: &RunConfig) -> Result<Report> {
    let samples = config.samples.unwrap_or(DEFAULT_SAMPLES);
    let times = if config.t_start.is_some() || config.t_stop.is_some() || config.t_points.is_some() {
        config.time_grid(2.0 * std::f64::consts::PI, 9)?
    } else {
        DEFAULT_TIMES.to_vec()
    };
    let seed = if samples > 0 {
        Some(config.require_seed("ghz5")?)
    } else {
        None
    };

    let mut rows = Vec::new();
    for &t in &times {
        let z = ghz5_coefficients(t);
        let expected = z.populations();
        let mut row = Ghz5Row {
            t,
            zeta: z.zeta,
            expected,
            monte_carlo: None,
            leakage: None,
            max_deviation: None,
        };
        if let Some(seed) = seed {
            let mc = ghz5_populations_mc(t, samples, seed)?;
            let dev = mc
                .populations
                .iter()
                .zip(expected)
                .map(|(e, x)| (e.mean - x).abs())
                .fold(0.0, f64::max);
            row.monte_carlo = Some(mc.populations);
            row.leakage = Some(mc.leakage);
            row.max_deviation = Some(dev);
        }
        rows.push(row);
    }
    let max_deviation = rows.iter().filter_map(|r| r.max_deviation).fold(0.0, f64::max);
    let normalization_residual = (0..SPREAD_GRID)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / (SPREAD_GRID - 1) as f64;
            (ghz5_coefficients(t).total() - 1.0).abs()
        })
        .fold(0.0, f64::max);
    let (min_spread_t, min_spread) = ghz5_spread_minimum(SPREAD_GRID);
    let twirl = match seed {
        Some(s) => Some(twirl_populations(samples, s)?.populations),
        None => None,
    };
    let passed = max_deviation <= GHZ5_MAX_DEVIATION && normalization_residual <= NORMALIZATION_TOL && min_spread > 0.0;
    let report = Ghz5Report {
        seed,
        samples,
        rows,
        max_deviation,
        normalization_residual,
        min_spread,
        min_spread_t,
        twirl,
        passed,
    };
    let text = match config.format() {
        Format::Json => to_json(&report)?,
        Format::Csv => ghz5_csv(&report),
    };
    Ok(Report {
        text,
        passed,
        attachments: vec![],
    })
}

const LABELS: [&str; 6] = ["d1", "d2", "d3", "d4", "ghz_plus", "ghz_minus"];

fn ghz5_csv(r: &Ghz5Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# seed={}", r.seed.map_or("none".into(), |s| s.to_string()));
    let _ = writeln!(out, "# samples={}", r.samples);
    let _ = writeln!(out, "# max_deviation={:e}", r.max_deviation);
    let _ = writeln!(out, "# normalization_residual={:e}", r.normalization_residual);
    let _ = writeln!(
        out,
        "# min_spread={} at t={}",
        float(r.min_spread),
        float(r.min_spread_t)
    );
    if let Some(tw) = &r.twirl {
        let cells = tw
            .iter()
            .map(|e| format!("{}+-{}", float(e.mean), float(e.std_error)))
            .collect::<Vec<_>>();
        let _ = writeln!(out, "# twirl_populations={}", cells.join(" "));
    }
    out.push_str("t,zeta1,zeta2,zeta3,zeta4");
    for l in LABELS {
        let _ = write!(out, ",mc_{l},mc_{l}_stderr");
    }
    out.push_str(",leakage,max_deviation\n");
    for row in &r.rows {
        let _ = write!(out, "{}", float(row.t));
        for z in row.zeta {
            let _ = write!(out, ",{}", float(z));
        }
        match (&row.monte_carlo, &row.leakage, row.max_deviation) {
            (Some(mc), Some(leak), Some(dev)) => {
                for e in mc {
                    let _ = write!(out, ",{},{}", float(e.mean), float(e.std_error));
                }
                let _ = write!(out, ",{},{}", float(leak.mean), float(dev));
            }
            _ => out.push_str(&",".repeat(14)),
        }
        out.push('\n');
    }
    out
}
