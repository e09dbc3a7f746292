use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{to_json, Format, Report, RunConfig};
use crate::csvfmt::float;
use crate::error::{Error, Result};
use crate::hamiltonians::{BasisKind, HamiltonianEnsemble, LocalBasis, NoiseMode};
use crate::mc::Estimate;
use crate::qfi::{
    mc_mean_qfi_kernel, mean_qfi_pure_pair, mean_qfi_pure_tensor_collective, mean_qfi_pure_tensor_noncollective,
    QfiKernel,
};
use crate::states::StateId;

const TABLE1_DATA: &str = include_str!("../../data/table1.csv");

/// Analytic values must reproduce the stored rationals to this absolute tolerance.
pub const TABLE1_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rational {
    pub num: i64,
    pub den: i64,
}

impl Rational {
    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl std::fmt::Display for Rational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Rational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("malformed rational '{s}'"));
        let (num, den) = match s.split_once('/') {
            Some((a, b)) => (
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            ),
            None => (s.trim().parse().map_err(|_| bad())?, 1),
        };
        if den == 0 {
            return Err(bad());
        }
        Ok(Self { num, den })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Expected {
    pub d: usize,
    pub n: usize,
    pub basis: BasisKind,
    pub state: String,
    pub collective: Rational,
    pub noncollective: Rational,
}

/// Stored reference rows in published order.
pub fn table1_expected() -> Result<Vec<Table1Expected>> {
    let mut lines = TABLE1_DATA
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    lines.next();
    lines
        .map(|line| {
            let f = line.split(',').collect::<Vec<_>>();
            if f.len() != 6 {
                return Err(Error::Config(format!("malformed table row '{line}'")));
            }
            let int = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| Error::Config(format!("bad integer '{s}'")))
            };
            Ok(Table1Expected {
                d: int(f[0])?,
                n: int(f[1])?,
                basis: f[2].parse()?,
                state: f[3].to_string(),
                collective: f[4].parse()?,
                noncollective: f[5].parse()?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub d: usize,
    pub n: usize,
    pub basis: BasisKind,
    pub state: String,
    pub expected_collective: String,
    pub expected_noncollective: String,
    pub collective: f64,
    pub noncollective: f64,
    pub tensor_collective: f64,
    pub tensor_noncollective: f64,
    pub max_deviation: f64,
    pub matches: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_collective: Option<Estimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_noncollective: Option<Estimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Report {
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    pub rows: Vec<Table1Row>,
    pub all_match: bool,
}

/// Evaluates one stored row; Monte Carlo columns are filled when `mc` is given.
pub fn evaluate_row(expected: &Table1Expected, mc: Option<(usize, u64)>) -> Result<Table1Row> {
    let id: StateId = expected.state.parse()?;
    let psi = id.build()?;
    let ensemble = HamiltonianEnsemble::sphere(&LocalBasis::build(expected.basis, expected.d)?);
    let (col, nc) = mean_qfi_pure_pair(&psi, &ensemble);
    let tcol = mean_qfi_pure_tensor_collective(&psi, &ensemble)?;
    let tnc = mean_qfi_pure_tensor_noncollective(&psi, &ensemble)?;
    let dev = [
        (col - expected.collective.value()).abs(),
        (nc - expected.noncollective.value()).abs(),
        (tcol - expected.collective.value()).abs(),
        (tnc - expected.noncollective.value()).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let (mc_collective, mc_noncollective) = match mc {
        Some((samples, seed)) => {
            let kernel = QfiKernel::pure(&psi);
            (
                Some(mc_mean_qfi_kernel(
                    &kernel,
                    &ensemble,
                    NoiseMode::Collective,
                    samples,
                    seed,
                )?),
                Some(mc_mean_qfi_kernel(
                    &kernel,
                    &ensemble,
                    NoiseMode::Noncollective,
                    samples,
                    seed,
                )?),
            )
        }
        None => (None, None),
    };
    Ok(Table1Row {
        d: expected.d,
        n: expected.n,
        basis: expected.basis,
        state: expected.state.clone(),
        expected_collective: expected.collective.to_string(),
        expected_noncollective: expected.noncollective.to_string(),
        collective: col,
        noncollective: nc,
        tensor_collective: tcol,
        tensor_noncollective: tnc,
        max_deviation: dev,
        matches: dev <= TABLE1_TOL,
        mc_collective,
        mc_noncollective,
    })
}

pub fn cmd_table1(config: &RunConfig) -> Result<Report> {
    let mut rows = table1_expected()?;
    if !config.states.is_empty() {
        let ids = config.state_ids()?.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        if let Some(missing) = ids.iter().find(|id| !rows.iter().any(|r| &r.state == *id)) {
            return Err(Error::Argument(format!("state '{missing}' is not a table row")));
        }
        rows.retain(|r| ids.contains(&r.state));
    }
    if let Some(basis) = config.basis {
        rows.retain(|r| r.basis == basis);
    }
    let mc = match config.samples {
        Some(samples) => Some((samples, config.require_seed("table1 with --samples")?)),
        None => None,
    };
    let rows = rows.iter().map(|r| evaluate_row(r, mc)).collect::<Result<Vec<_>>>()?;
    let report = Table1Report {
        tolerance: TABLE1_TOL,
        seed: mc.map(|m| m.1),
        samples: mc.map(|m| m.0),
        all_match: rows.iter().all(|r| r.matches),
        rows,
    };
    let text = match config.format() {
        Format::Json => to_json(&report)?,
        Format::Csv => table1_csv(&report),
    };
    Ok(Report {
        text,
        passed: report.all_match,
        attachments: vec![],
    })
}

fn table1_csv(report: &Table1Report) -> String {
    let with_mc = report.samples.is_some();
    let mut out = String::new();
    out.push_str("d,n,basis,state,expected_collective,expected_noncollective,collective,noncollective,tensor_collective,tensor_noncollective,max_deviation,match");
    if with_mc {
        out.push_str(",mc_collective,mc_collective_stderr,mc_noncollective,mc_noncollective_stderr");
    }
    out.push('\n');
    for r in &report.rows {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{:e},{}",
            r.d,
            r.n,
            r.basis,
            r.state,
            r.expected_collective,
            r.expected_noncollective,
            float(r.collective),
            float(r.noncollective),
            float(r.tensor_collective),
            float(r.tensor_noncollective),
            r.max_deviation,
            r.matches
        );
        if let (Some(a), Some(b)) = (r.mc_collective, r.mc_noncollective) {
            let _ = write!(
                out,
                ",{},{},{},{}",
                float(a.mean),
                float(a.std_error),
                float(b.mean),
                float(b.std_error)
            );
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stored_rows() {
        let rows = table1_expected().unwrap();
        assert_eq!(rows.len(), 18);
        let q2 = rows
            .iter()
            .find(|r| r.basis == BasisKind::GellMann && r.state == "q4-2")
            .unwrap();
        assert_eq!(
            (q2.collective.to_string(), q2.noncollective.to_string()),
            ("806/49".into(), "991/98".into())
        );
        assert!("1/0".parse::<Rational>().is_err());
    }

    #[test]
    fn selected_rows_match() {
        let cfg = RunConfig {
            states: vec!["dicke-6-3".into()],
            ..Default::default()
        };
        let report = cmd_table1(&cfg).unwrap();
        assert!(report.passed);
        assert_eq!(report.text.lines().count(), 2);
        let bad = RunConfig {
            states: vec!["ghz-3-2".into()],
            ..Default::default()
        };
        assert!(matches!(cmd_table1(&bad), Err(Error::Argument(_))));
    }

    #[test]
    fn monte_carlo_columns_need_a_seed() {
        let cfg = RunConfig {
            states: vec!["ghz-4-2".into()],
            samples: Some(200),
            ..Default::default()
        };
        assert!(matches!(cmd_table1(&cfg), Err(Error::Config(_))));
        let cfg = RunConfig { seed: Some(1), ..cfg };
        let report = cmd_table1(&cfg).unwrap();
        assert!(report.text.lines().next().unwrap().ends_with("mc_noncollective_stderr"));
    }
}
