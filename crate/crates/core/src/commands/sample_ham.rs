use serde::{Deserialize, Serialize};

use super::{to_json, Report, RunConfig};
use crate::channels::ChannelMode;
use crate::error::{Error, Result};
use crate::hamiltonians::{embed_collective, embed_noncollective, HamiltonianEnsemble};
use crate::linalg::ComplexMatrix;
use crate::mc::{estimate, sample_rng, Estimate};

const DEFAULT_SAMPLES: usize = 10;
/// Draws beyond this count enter the summary statistics but are not dumped.
const DUMP_LIMIT: usize = 1000;
const SUMMARY_SIGMAS: f64 = 3.0;

/// One sampled local Hamiltonian. Matrices are row-major `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub index: usize,
    /// One coefficient vector, or one per site for non-collective embeddings.
    pub alphas: Vec<Vec<f64>>,
    pub norms: Vec<f64>,
    pub local: Vec<Vec<[f64; 2]>>,
    pub trace_h2: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embedded: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianDump {
    pub ensemble: String,
    pub basis: String,
    pub d: usize,
    pub r: usize,
    pub c: f64,
    pub seed: u64,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sites: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<ChannelMode>,
    pub generators: Vec<Vec<[f64; 2]>>,
    /// Expected `E[Tr H²]` for one local term.
    pub mean_purity: f64,
    pub trace_h2: Estimate,
    pub mean_purity_within_3sigma: bool,
    pub records: Vec<SampleRecord>,
}

fn flatten(m: &ComplexMatrix) -> Vec<[f64; 2]> {
    m.as_slice().iter().map(|z| [z.re, z.im]).collect()
}

fn draw_record(
    ens: &HamiltonianEnsemble,
    index: usize,
    seed: u64,
    sites: Option<usize>,
    mode: ChannelMode,
) -> Result<SampleRecord> {
    let mut rng = sample_rng(seed, index as u64);
    let count = match (sites, mode) {
        (Some(n), ChannelMode::Noncollective) => n,
        _ => 1,
    };
    let alphas = (0..count).map(|_| ens.sample(&mut rng)).collect::<Vec<_>>();
    let locals = alphas
        .iter()
        .map(|a| ens.set().local_hamiltonian(a))
        .collect::<Vec<_>>();
    let embedded = match sites {
        None => None,
        Some(n) => Some(match mode {
            ChannelMode::Noncollective => embed_noncollective(&alphas, ens.set(), n)?.matrix,
            _ => embed_collective(&alphas[0], ens.set(), n).matrix,
        }),
    };
    Ok(SampleRecord {
        index,
        norms: alphas
            .iter()
            .map(|a| a.iter().map(|x| x * x).sum::<f64>().sqrt())
            .collect(),
        trace_h2: locals.iter().map(|h| h.trace_product(h).re).collect(),
        local: locals.iter().map(flatten).collect(),
        embedded: embedded.as_ref().map(flatten),
        alphas,
    })
}

/// Seeded JSON dump of sampled coefficient vectors and Hamiltonians.
pub fn cmd_sample_ham(config: &RunConfig) -> Result<Report> {
    let seed = config.require_seed("sample-ham")?;
    let samples = config.samples.unwrap_or(DEFAULT_SAMPLES);
    if samples == 0 {
        return Err(Error::Argument("--samples must be positive".into()));
    }
    let mode = config.mode.unwrap_or(ChannelMode::Collective);
    if mode == ChannelMode::Twirl {
        return Err(Error::Config(
            "sample-ham dumps Hamiltonian ensembles; twirl has none".into(),
        ));
    }
    if config.sites == Some(0) {
        return Err(Error::Argument("--sites must be positive".into()));
    }
    let d = match config.state_ids()?.first() {
        Some(id) => id.local_dim(),
        None => match config.basis {
            Some(crate::hamiltonians::BasisKind::Pauli) | None => 2,
            Some(_) => 3,
        },
    };
    let ens = config.ensemble_for(d)?;
    let trace_h2 = estimate(samples, seed, |_, rng| {
        let h = ens.set().local_hamiltonian(&ens.sample(rng));
        h.trace_product(&h).re
    });
    let records = (0..samples.min(DUMP_LIMIT))
        .map(|i| draw_record(&ens, i, seed, config.sites, mode))
        .collect::<Result<Vec<_>>>()?;
    let within = trace_h2.within(ens.mean_purity(), SUMMARY_SIGMAS);
    let dump = HamiltonianDump {
        ensemble: ens.kind().to_string(),
        basis: ens.set().basis.to_string(),
        d,
        r: ens.r(),
        c: ens.c(),
        seed,
        samples,
        sites: config.sites,
        mode: config.sites.map(|_| mode),
        generators: ens.set().generators.iter().map(flatten).collect(),
        mean_purity: ens.mean_purity(),
        trace_h2,
        mean_purity_within_3sigma: within,
        records,
    };
    Ok(Report {
        text: to_json(&dump)?,
        passed: within,
        attachments: vec![],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{BasisKind, EnsembleKind};

    #[test]
    fn sphere_dump_has_unit_norms() {
        let cfg = RunConfig {
            seed: Some(11),
            samples: Some(50),
            ..Default::default()
        };
        let dump: HamiltonianDump = serde_json::from_str(&cmd_sample_ham(&cfg).unwrap().text).unwrap();
        assert_eq!(dump.records.len(), 50);
        assert!(dump.records.iter().all(|r| (r.norms[0] - 1.0).abs() < 1e-12));
        // Sphere draws have Tr H² = c exactly.
        assert!(dump.records.iter().all(|r| (r.trace_h2[0] - dump.c).abs() < 1e-12));
    }

    #[test]
    fn dump_is_seed_deterministic_and_needs_seed() {
        let cfg = RunConfig {
            seed: Some(2),
            samples: Some(5),
            ensemble: Some(EnsembleKind::Gue),
            basis: Some(BasisKind::GellMann),
            sites: Some(2),
            mode: Some(ChannelMode::Noncollective),
            ..Default::default()
        };
        let a = cmd_sample_ham(&cfg).unwrap().text;
        assert_eq!(a, cmd_sample_ham(&cfg).unwrap().text);
        let dump: HamiltonianDump = serde_json::from_str(&a).unwrap();
        assert_eq!(dump.records[0].alphas.len(), 2);
        assert_eq!(dump.records[0].embedded.as_ref().unwrap().len(), 81);
        let unseeded = RunConfig { seed: None, ..cfg };
        assert!(matches!(cmd_sample_ham(&unseeded), Err(Error::Config(_))));
    }
}
