use std::fmt::Write as _;

use super::{to_json, Format, Report, RunConfig};
use crate::channels::{fidelity_curve, ChannelMode, CurveSpec, FidelityCurve, FidelityMethod};
use crate::csvfmt::float;
use crate::error::{Error, Result};
use crate::hamiltonians::NoiseMode;
use crate::qfi::{mean_qfi_pure_pair, t_star};

const DEFAULT_POINTS: usize = 50;
const DEFAULT_SAMPLES: usize = 10_000;

/// Fidelity curves with the averaged bound, one per (state, mode) pair.
pub fn cmd_curve(config: &RunConfig) -> Result<Report> {
    let ids = config.state_ids()?;
    if ids.is_empty() {
        return Err(Error::Argument("curve needs at least one --state".into()));
    }
    let modes = match config.mode {
        None => vec![NoiseMode::Collective, NoiseMode::Noncollective],
        Some(ChannelMode::Collective) => vec![NoiseMode::Collective],
        Some(ChannelMode::Noncollective) => vec![NoiseMode::Noncollective],
        Some(ChannelMode::Twirl) => {
            return Err(Error::Config(
                "twirling has no time dependence; curves need collective or noncollective".into(),
            ))
        }
    };
    let mut curves = Vec::new();
    for id in &ids {
        let psi = id.build()?;
        let ensemble = config.ensemble_for(psi.d())?;
        let (col, nc) = mean_qfi_pure_pair(&psi, &ensemble);
        for &mode in &modes {
            let mean = if mode == NoiseMode::Collective { col } else { nc };
            let times = config.time_grid(t_star(mean), DEFAULT_POINTS)?;
            let mut spec = CurveSpec {
                mode,
                ensemble: ensemble.clone(),
                samples: config.samples.unwrap_or(DEFAULT_SAMPLES),
                seed: config.seed.unwrap_or(0),
            };
            if spec.method() == FidelityMethod::MonteCarlo {
                spec.seed = config.require_seed("this curve")?;
            }
            curves.push(fidelity_curve(&psi, &id.to_string(), &spec, &times)?);
        }
    }
    let passed = curves.iter().all(|c| c.bound_dominates(3.0));
    let (text, attachments) = match config.format() {
        Format::Json => (to_json(&curves)?, vec![]),
        Format::Csv if curves.len() == 1 => (curves[0].to_csv(), vec![]),
        Format::Csv => index_with_attachments(&curves),
    };
    Ok(Report {
        text,
        passed,
        attachments,
    })
}

fn curve_file_name(c: &FidelityCurve) -> String {
    format!("curve_{}_{}_{}.csv", c.state, c.basis, c.mode)
}

fn index_with_attachments(curves: &[FidelityCurve]) -> (String, Vec<(String, String)>) {
    let mut index = String::from("state,mode,basis,ensemble,method,mean_qfi,t_star,file\n");
    let mut files = Vec::new();
    for c in curves {
        let name = curve_file_name(c);
        let method = match c.method {
            FidelityMethod::Quadrature => "quadrature",
            FidelityMethod::MonteCarlo => "monte-carlo",
        };
        let _ = writeln!(
            index,
            "{},{},{},{},{},{},{},{}",
            c.state,
            c.mode,
            c.basis,
            c.ensemble,
            method,
            float(c.mean_qfi),
            float(c.t_star),
            name
        );
        files.push((name, c.to_csv()));
    }
    (index, files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::BasisKind;

    #[test]
    fn single_curve_csv() {
        let cfg = RunConfig {
            states: vec!["ghz-4-2".into()],
            mode: Some(ChannelMode::Collective),
            t_points: Some(10),
            ..Default::default()
        };
        let report = cmd_curve(&cfg).unwrap();
        assert!(report.passed);
        let pts = FidelityCurve::parse_csv(&report.text).unwrap();
        assert_eq!(pts.len(), 10);
        assert!((pts[0].fidelity - 1.0).abs() < 1e-12);
        let bound = (2f64.sqrt() * pts[3].t).cos().powi(2);
        assert!((pts[3].bound - bound).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_curve_needs_seed_and_is_deterministic() {
        let cfg = RunConfig {
            states: vec!["q4-1".into()],
            basis: Some(BasisKind::GellMann),
            mode: Some(ChannelMode::Noncollective),
            t_points: Some(5),
            samples: Some(300),
            ..Default::default()
        };
        assert!(matches!(cmd_curve(&cfg), Err(Error::Config(_))));
        let cfg = RunConfig { seed: Some(4), ..cfg };
        assert_eq!(cmd_curve(&cfg).unwrap().text, cmd_curve(&cfg).unwrap().text);
    }

    #[test]
    fn both_modes_give_index_and_files() {
        let cfg = RunConfig {
            states: vec!["ghz-4-2".into()],
            t_points: Some(4),
            ..Default::default()
        };
        let report = cmd_curve(&cfg).unwrap();
        assert_eq!(report.attachments.len(), 2);
        assert_eq!(report.text.lines().count(), 3);
    }

    #[test]
    fn twirl_and_missing_state_are_rejected() {
        let cfg = RunConfig {
            states: vec!["ghz-4-2".into()],
            mode: Some(ChannelMode::Twirl),
            ..Default::default()
        };
        assert!(matches!(cmd_curve(&cfg), Err(Error::Config(_))));
        assert!(matches!(cmd_curve(&RunConfig::default()), Err(Error::Argument(_))));
    }

    #[test]
    fn long_grid_gets_warning_row() {
        let cfg = RunConfig {
            states: vec!["ghz-4-2".into()],
            mode: Some(ChannelMode::Collective),
            t_stop: Some(2.0),
            t_points: Some(5),
            ..Default::default()
        };
        let report = cmd_curve(&cfg).unwrap();
        assert!(report.text.contains("# warning:"));
        assert!(report.text.lines().last().unwrap().ends_with("false"));
    }
}
