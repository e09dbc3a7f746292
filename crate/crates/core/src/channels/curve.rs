use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::quadrature::{echo_fidelity, exact_fidelity_pure, spectral_overlap};
use super::tm_bound;
use crate::csvfmt::float;
use crate::error::{Error, Result};
use crate::hamiltonians::{CoefficientSampler, EnsembleKind, HamiltonianEnsemble, NoiseMode};
use crate::mc::{estimate_vec, Estimate};
use crate::qfi::{mean_qfi_pure_pair, t_star};
use crate::states::PureState;

/// Grids may extend this far past `t*` before a warning is attached.
pub const GRID_SLACK: f64 = 1.05;

pub const CURVE_CSV_COLUMNS: &str = "t,fidelity,fidelity_stderr,bound,valid_window";

/// `E|⟨ψ|⊗ₛUₛ(t)|ψ⟩|²` at every time, reusing each draw across the grid.
pub fn pure_fidelity_mc(
    psi: &PureState,
    sampler: &dyn CoefficientSampler,
    mode: NoiseMode,
    times: &[f64],
    samples: usize,
    seed: u64,
) -> Result<Vec<Estimate>> {
    let set = sampler.generators();
    if set.d != psi.d() {
        return Err(Error::Dimension(format!(
            "ensemble acts on d = {}, state has d = {}",
            set.d,
            psi.d()
        )));
    }
    if samples == 0 {
        return Err(Error::Argument("need at least one sample".into()));
    }
    let n = psi.n();
    Ok(estimate_vec(samples, seed, times.len(), |_, rng| {
        let locals = match mode {
            NoiseMode::Collective => vec![set.local_hamiltonian(&sampler.draw(rng)); n],
            NoiseMode::Noncollective => (0..n).map(|_| set.local_hamiltonian(&sampler.draw(rng))).collect(),
        };
        let refs = locals.iter().collect::<Vec<_>>();
        let (p, e) = spectral_overlap(psi, &refs).expect("eigendecomposition of a local Hamiltonian");
        times.iter().map(|&t| echo_fidelity(&p, &e, t)).collect()
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FidelityMethod {
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Clone)]
pub struct CurveSpec {
    pub mode: NoiseMode,
    pub ensemble: HamiltonianEnsemble,
    pub samples: usize,
    pub seed: u64,
}

impl CurveSpec {
    /// Quadrature whenever the ensemble is uniform on S², Monte Carlo otherwise.
    pub fn method(&self) -> FidelityMethod {
        if self.ensemble.kind() == EnsembleKind::Sphere && self.ensemble.r() == 3 {
            FidelityMethod::Quadrature
        } else {
            FidelityMethod::MonteCarlo
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: f64,
    pub fidelity: f64,
    pub fidelity_stderr: f64,
    pub bound: f64,
    pub valid_window: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityCurve {
    pub state: String,
    pub mode: NoiseMode,
    pub ensemble: String,
    pub basis: String,
    pub method: FidelityMethod,
    pub seed: u64,
    pub samples: usize,
    pub mean_qfi: f64,
    pub t_star: f64,
    pub points: Vec<CurvePoint>,
    pub warnings: Vec<String>,
}

fn check_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::Argument("time grid is empty".into()));
    }
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::Argument("time grid must be finite and non-negative".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Argument("time grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Fidelity and averaged bound along a time grid for a pure input.
pub fn fidelity_curve(psi: &PureState, label: &str, spec: &CurveSpec, times: &[f64]) -> Result<FidelityCurve> {
    check_grid(times)?;
    let (col, nc) = mean_qfi_pure_pair(psi, &spec.ensemble);
    let mean_qfi = match spec.mode {
        NoiseMode::Collective => col,
        NoiseMode::Noncollective => nc,
    };
    let method = spec.method();
    let fidelity: Vec<(f64, f64)> = match method {
        FidelityMethod::Quadrature => exact_fidelity_pure(psi, &spec.ensemble, spec.mode, times)?
            .into_iter()
            .map(|f| (f, 0.0))
            .collect(),
        FidelityMethod::MonteCarlo => pure_fidelity_mc(psi, &spec.ensemble, spec.mode, times, spec.samples, spec.seed)?
            .into_iter()
            .map(|e| (e.mean, e.std_error))
            .collect(),
    };
    let horizon = t_star(mean_qfi);
    let mut warnings = Vec::new();
    let last = *times.last().expect("non-empty grid");
    if last > GRID_SLACK * horizon {
        warnings.push(format!(
            "grid reaches t = {last} beyond {GRID_SLACK} t* = {}; bound outside its validity window",
            GRID_SLACK * horizon
        ));
    }
    let points = times
        .iter()
        .zip(fidelity)
        .map(|(&t, (f, se))| {
            let b = tm_bound(mean_qfi, t)?;
            Ok(CurvePoint {
                t,
                fidelity: f,
                fidelity_stderr: se,
                bound: b.value,
                valid_window: b.valid,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FidelityCurve {
        state: label.to_string(),
        mode: spec.mode,
        ensemble: spec.ensemble.kind().to_string(),
        basis: spec.ensemble.set().basis.to_string(),
        method,
        seed: spec.seed,
        samples: if method == FidelityMethod::MonteCarlo {
            spec.samples
        } else {
            0
        },
        mean_qfi,
        t_star: horizon,
        points,
        warnings,
    })
}

impl FidelityCurve {
    pub fn to_csv(&self) -> String {
        let method = match self.method {
            FidelityMethod::Quadrature => "quadrature",
            FidelityMethod::MonteCarlo => "monte-carlo",
        };
        let mut out = String::new();
        let _ = writeln!(out, "# state={}", self.state);
        let _ = writeln!(out, "# mode={}", self.mode);
        let _ = writeln!(out, "# ensemble={}", self.ensemble);
        let _ = writeln!(out, "# basis={}", self.basis);
        let _ = writeln!(out, "# method={method}");
        let _ = writeln!(out, "# seed={}", self.seed);
        let _ = writeln!(out, "# samples={}", self.samples);
        let _ = writeln!(out, "# mean_qfi={}", float(self.mean_qfi));
        let _ = writeln!(out, "# t_star={}", float(self.t_star));
        for w in &self.warnings {
            let _ = writeln!(out, "# warning: {w}");
        }
        let _ = writeln!(out, "{CURVE_CSV_COLUMNS}");
        for p in &self.points {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                float(p.t),
                float(p.fidelity),
                float(p.fidelity_stderr),
                float(p.bound),
                p.valid_window
            );
        }
        out
    }

    /// Data rows of a curve CSV; comment lines are skipped.
    pub fn parse_csv(text: &str) -> Result<Vec<CurvePoint>> {
        let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
        match lines.next() {
            Some(h) if h == CURVE_CSV_COLUMNS => {}
            other => return Err(Error::Argument(format!("unexpected curve header {other:?}"))),
        }
        lines
            .map(|line| {
                let f = line.split(',').collect::<Vec<_>>();
                if f.len() != 5 {
                    return Err(Error::Argument(format!("curve row needs 5 fields: '{line}'")));
                }
                let num = |s: &str| s.parse::<f64>().map_err(|e| Error::Argument(format!("'{s}': {e}")));
                Ok(CurvePoint {
                    t: num(f[0])?,
                    fidelity: num(f[1])?,
                    fidelity_stderr: num(f[2])?,
                    bound: num(f[3])?,
                    valid_window: f[4]
                        .parse()
                        .map_err(|_| Error::Argument(format!("'{}' is not a bool", f[4])))?,
                })
            })
            .collect()
    }

    /// `fidelity + k·stderr ≥ bound` at every point inside the validity window.
    pub fn bound_dominates(&self, k: f64) -> bool {
        self.points
            .iter()
            .filter(|p| p.valid_window)
            .all(|p| p.fidelity + k * p.fidelity_stderr + 1e-12 >= p.bound)
    }

    /// Fraction of the points with `t ≤ t*` where `(F - bound) / F ≤ rel_tol`.
    pub fn bound_accuracy_fraction(&self, rel_tol: f64) -> f64 {
        let inside = self
            .points
            .iter()
            .filter(|p| p.t <= self.t_star * (1.0 + 1e-12))
            .collect::<Vec<_>>();
        if inside.is_empty() {
            return 0.0;
        }
        let good = inside
            .iter()
            .filter(|p| p.fidelity > 0.0 && (p.fidelity - p.bound) / p.fidelity <= rel_tol)
            .count();
        good as f64 / inside.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::LocalBasis;
    use crate::states::{ghz_state, qutrit_dicke};

    fn grid(stop: f64, points: usize) -> Vec<f64> {
        (0..points).map(|i| stop * i as f64 / (points - 1) as f64).collect()
    }

    #[test]
    fn curve_starts_at_one_and_respects_bound() {
        let ens = HamiltonianEnsemble::sphere(&LocalBasis::pauli());
        let psi = ghz_state(4, 2).unwrap();
        let spec = CurveSpec {
            mode: NoiseMode::Collective,
            ensemble: ens,
            samples: 1000,
            seed: 1,
        };
        let times = grid(std::f64::consts::PI / 8f64.sqrt(), 20);
        let c = fidelity_curve(&psi, "ghz-4-2", &spec, &times).unwrap();
        assert_eq!(c.method, FidelityMethod::Quadrature);
        assert!((c.points[0].fidelity - 1.0).abs() < 1e-12);
        assert_eq!(c.points[0].bound, 1.0);
        assert!(c.bound_dominates(0.0));
        assert!(c.warnings.is_empty());
    }

    #[test]
    fn accuracy_fraction_counts_points_inside_t_star() {
        let pt = |t: f64, fidelity: f64, bound: f64| CurvePoint {
            t,
            fidelity,
            fidelity_stderr: 0.0,
            bound,
            valid_window: t <= 1.0,
        };
        let curve = FidelityCurve {
            state: "x".into(),
            mode: NoiseMode::Collective,
            ensemble: "sphere".into(),
            basis: "pauli".into(),
            method: FidelityMethod::Quadrature,
            seed: 0,
            samples: 0,
            mean_qfi: 1.0,
            t_star: 1.0,
            points: vec![
                pt(0.0, 1.0, 1.0),
                pt(0.5, 0.8, 0.795),
                pt(1.0, 0.5, 0.4),
                pt(1.5, 0.4, 0.4),
            ],
            warnings: vec![],
        };
        assert!((curve.bound_accuracy_fraction(0.01) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn collective_decays_faster_for_ghz4() {
        let ens = HamiltonianEnsemble::sphere(&LocalBasis::pauli());
        let psi = ghz_state(4, 2).unwrap();
        let times = grid(std::f64::consts::PI / 8f64.sqrt(), 30);
        let col = exact_fidelity_pure(&psi, &ens, NoiseMode::Collective, &times).unwrap();
        let nc = exact_fidelity_pure(&psi, &ens, NoiseMode::Noncollective, &times).unwrap();
        for (a, b) in col.iter().zip(&nc).skip(1) {
            assert!(a < b);
        }
    }

    #[test]
    fn monte_carlo_curve_for_eight_generators() {
        let ens = HamiltonianEnsemble::sphere(&LocalBasis::gellmann(3).unwrap());
        let psi = qutrit_dicke(1).unwrap();
        let spec = CurveSpec {
            mode: NoiseMode::Noncollective,
            ensemble: ens,
            samples: 500,
            seed: 2,
        };
        let times = grid(2.0, 10);
        let c = fidelity_curve(&psi, "q4-1", &spec, &times).unwrap();
        assert_eq!(c.method, FidelityMethod::MonteCarlo);
        assert!((c.points[0].fidelity - 1.0).abs() < 1e-12);
        assert!(c.points[5].fidelity_stderr > 0.0);
        assert!(!c.warnings.is_empty());
        assert!(c.points.iter().any(|p| !p.valid_window));
    }

    #[test]
    fn csv_round_trip() {
        let ens = HamiltonianEnsemble::sphere(&LocalBasis::gellmann(3).unwrap());
        let spec = CurveSpec {
            mode: NoiseMode::Collective,
            ensemble: ens,
            samples: 300,
            seed: 3,
        };
        let c = fidelity_curve(&qutrit_dicke(2).unwrap(), "q4-2", &spec, &grid(0.5, 7)).unwrap();
        let csv = c.to_csv();
        assert!(csv.contains("# seed=3"));
        assert_eq!(FidelityCurve::parse_csv(&csv).unwrap(), c.points);
    }

    #[test]
    fn bad_grids_are_rejected() {
        let ens = HamiltonianEnsemble::sphere(&LocalBasis::pauli());
        let spec = CurveSpec {
            mode: NoiseMode::Collective,
            ensemble: ens,
            samples: 10,
            seed: 0,
        };
        let psi = ghz_state(2, 2).unwrap();
        for g in [vec![], vec![0.0, 0.0], vec![0.2, 0.1], vec![-0.1, 0.2]] {
            assert!(fidelity_curve(&psi, "x", &spec, &g).is_err());
        }
    }
}
