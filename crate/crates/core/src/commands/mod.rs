//! Seeded, config-driven runs behind the `qfi-noise` binary.
//!
//! Every command returns a [`Report`] carrying the rendered output and a
//! pass/fail verdict; writing files and choosing exit codes is left to the caller.

mod curve;
mod ghz5;
mod sample_ham;
mod table1;
mod validate;

pub use curve::cmd_curve;
pub use ghz5::{cmd_ghz5, Ghz5Report, Ghz5Row};
pub use sample_ham::{cmd_sample_ham, HamiltonianDump, SampleRecord};
pub use table1::{cmd_table1, table1_expected, Rational, Table1Expected, Table1Report, Table1Row};
pub use validate::{cmd_validate, GroupVerdict, ValidationReport};

use std::fmt;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channels::ChannelMode;
use crate::error::{Error, Result};
use crate::hamiltonians::{BasisKind, EnsembleKind, HamiltonianEnsemble, LocalBasis, Restriction};
use crate::states::StateId;

/// Seed used by `validate` when none is given.
pub const DEFAULT_VALIDATE_SEED: u64 = 2024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Table1,
    Curve,
    Ghz5,
    Validate,
    SampleHam,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Table1 => "table1",
            Command::Curve => "curve",
            Command::Ghz5 => "ghz5",
            Command::Validate => "validate",
            Command::SampleHam => "sample-ham",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(Error::Argument(format!("unknown format '{s}'"))),
        }
    }
}

/// Run configuration. Loaded from JSON, then overridden field by field by flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub states: Vec<String>,
    pub basis: Option<BasisKind>,
    pub ensemble: Option<EnsembleKind>,
    pub restriction: Option<Restriction>,
    pub mode: Option<ChannelMode>,
    pub t_start: Option<f64>,
    pub t_stop: Option<f64>,
    pub t_points: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    /// Number of sites for `sample-ham` embeddings.
    pub sites: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Fields set in `flags` replace those in `self`.
    pub fn merged_with(self, flags: RunConfig) -> Self {
        Self {
            command: flags.command.or(self.command),
            states: if flags.states.is_empty() {
                self.states
            } else {
                flags.states
            },
            basis: flags.basis.or(self.basis),
            ensemble: flags.ensemble.or(self.ensemble),
            restriction: flags.restriction.or(self.restriction),
            mode: flags.mode.or(self.mode),
            t_start: flags.t_start.or(self.t_start),
            t_stop: flags.t_stop.or(self.t_stop),
            t_points: flags.t_points.or(self.t_points),
            samples: flags.samples.or(self.samples),
            seed: flags.seed.or(self.seed),
            sites: flags.sites.or(self.sites),
            out: flags.out.or(self.out),
            format: flags.format.or(self.format),
        }
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    pub fn state_ids(&self) -> Result<Vec<StateId>> {
        self.states.iter().map(|s| s.parse()).collect()
    }

    pub fn require_seed(&self, what: &str) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::Config(format!("{what} uses Monte Carlo sampling and needs --seed")))
    }

    /// Ensemble from the configured kind, basis and restriction for local dimension `d`.
    pub fn ensemble_for(&self, d: usize) -> Result<HamiltonianEnsemble> {
        let basis_kind = self
            .basis
            .unwrap_or(if d == 2 { BasisKind::Pauli } else { BasisKind::Spin });
        let kind = self.ensemble.unwrap_or(EnsembleKind::Sphere);
        let restriction = self.restriction.unwrap_or(match kind {
            EnsembleKind::Goe => Restriction::RealSymmetric,
            _ => Restriction::Traceless,
        });
        let basis = LocalBasis::build(basis_kind, d).map_err(|e| Error::Config(e.to_string()))?;
        HamiltonianEnsemble::new(kind, &basis, restriction)
    }

    /// `t_points` equally spaced times from `t_start` to `t_stop`.
    pub fn time_grid(&self, default_stop: f64, default_points: usize) -> Result<Vec<f64>> {
        let start = self.t_start.unwrap_or(0.0);
        let stop = self.t_stop.unwrap_or(default_stop);
        let points = self.t_points.unwrap_or(default_points);
        if points == 0 {
            return Err(Error::Argument("--t-points must be positive".into()));
        }
        if points == 1 {
            return Ok(vec![start]);
        }
        if stop.is_nan() || start.is_nan() || stop <= start {
            return Err(Error::Argument(format!(
                "time grid needs t_stop > t_start, got {start}..{stop}"
            )));
        }
        Ok((0..points)
            .map(|i| start + (stop - start) * i as f64 / (points - 1) as f64)
            .collect())
    }
}

/// Rendered command output plus whether every numeric check passed.
#[derive(Debug, Clone)]
pub struct Report {
    pub text: String,
    pub passed: bool,
    /// Extra files to write next to `out`, as (file name, contents).
    pub attachments: Vec<(String, String)>,
}

impl Report {
    /// Writes `text` to `out` (or stdout) and any attachments alongside it.
    pub fn emit(&self, out: Option<&Path>) -> Result<()> {
        match out {
            Some(path) => {
                if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                    std::fs::create_dir_all(parent)?;
                }
                std::fs::write(path, &self.text)?;
                let dir = path.parent().unwrap_or(Path::new("."));
                for (name, body) in &self.attachments {
                    std::fs::write(dir.join(name), body)?;
                }
            }
            None => {
                let mut out = std::io::stdout().lock();
                let written = (|| {
                    out.write_all(self.text.as_bytes())?;
                    for (name, body) in &self.attachments {
                        writeln!(out, "# --- {name}")?;
                        out.write_all(body.as_bytes())?;
                    }
                    out.flush()
                })();
                match written {
                    Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

pub fn run(config: &RunConfig) -> Result<Report> {
    match config.command {
        Some(Command::Table1) => cmd_table1(config),
        Some(Command::Curve) => cmd_curve(config),
        Some(Command::Ghz5) => cmd_ghz5(config),
        Some(Command::Validate) => cmd_validate(config),
        Some(Command::SampleHam) => cmd_sample_ham(config),
        None => Err(Error::Argument("no command given".into())),
    }
}

pub(crate) fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = RunConfig::from_json(r#"{"command":"curve","states":["ghz-4-2"],"seed":1,"samples":100}"#).unwrap();
        let flags = RunConfig {
            seed: Some(7),
            ..Default::default()
        };
        let merged = file.merged_with(flags);
        assert_eq!(merged.seed, Some(7));
        assert_eq!(merged.samples, Some(100));
        assert_eq!(merged.states, vec!["ghz-4-2".to_string()]);
        assert_eq!(merged.command, Some(Command::Curve));
    }

    #[test]
    fn unknown_config_fields_are_rejected() {
        assert!(matches!(RunConfig::from_json(r#"{"sede": 1}"#), Err(Error::Config(_))));
    }

    #[test]
    fn grid_construction() {
        let cfg = RunConfig {
            t_stop: Some(1.0),
            t_points: Some(5),
            ..Default::default()
        };
        assert_eq!(cfg.time_grid(9.0, 50).unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let bad = RunConfig {
            t_start: Some(2.0),
            t_stop: Some(1.0),
            ..Default::default()
        };
        assert!(bad.time_grid(3.0, 10).is_err());
    }

    #[test]
    fn default_ensembles() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.ensemble_for(2).unwrap().set().basis, BasisKind::Pauli);
        assert_eq!(cfg.ensemble_for(3).unwrap().set().basis, BasisKind::Spin);
        let goe = RunConfig {
            ensemble: Some(EnsembleKind::Goe),
            basis: Some(BasisKind::GellMann),
            ..Default::default()
        };
        assert_eq!(goe.ensemble_for(3).unwrap().r(), 6);
        let bad = RunConfig {
            ensemble: Some(EnsembleKind::Goe),
            restriction: Some(Restriction::Traceless),
            ..Default::default()
        };
        assert!(matches!(bad.ensemble_for(2), Err(Error::Config(_))));
    }
}
