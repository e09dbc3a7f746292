//! Multipartite qudit states: GHZ, Dicke, qutrit Dicke, AME and Haar-random
//! pure states, density matrices, and correlation tensors over a local basis.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonians::LocalBasis;
use crate::linalg::{self, partial_trace, ComplexMatrix, PSD_TOL, ZERO};

pub const NORM_TOL: f64 = 1e-12;

/// Six-qubit AME coefficients in computational-basis order (multiply by `1/(4√2)`).
pub const AME_6_2_COEFFICIENTS: [i8; 64] = [
    1, 0, 0, -1, 0, 1, -1, 0, 0, 1, 1, 0, -1, 0, 0, -1, 0, -1, 1, 0, 1, 0, 0, -1, -1, 0, 0, -1, 0, -1, -1, 0, 0, -1,
    -1, 0, -1, 0, 0, -1, -1, 0, 0, 1, 0, 1, -1, 0, -1, 0, 0, -1, 0, 1, 1, 0, 0, -1, 1, 0, -1, 0, 0, 1,
];

/// Kets of the four-qutrit AME state, each with amplitude `1/3`.
const AME_4_3_KETS: [[u8; 4]; 9] = [
    [0, 0, 0, 0],
    [0, 1, 1, 2],
    [0, 2, 2, 1],
    [1, 0, 1, 1],
    [1, 1, 2, 0],
    [1, 2, 0, 2],
    [2, 0, 2, 2],
    [2, 1, 0, 1],
    [2, 2, 1, 0],
];

/// Normalized state vector of `n` qudits of dimension `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n: usize,
    d: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Normalizes `amplitudes`; fails on a zero vector or a length other than `dⁿ`.
    pub fn new(n: usize, d: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if n == 0 || d < 2 {
            return Err(Error::Argument(format!("need n >= 1 and d >= 2, got n={n}, d={d}")));
        }
        if amplitudes.len() != d.pow(n as u32) {
            return Err(Error::Dimension(format!(
                "{} amplitudes for {n} sites of dimension {d}",
                amplitudes.len()
            )));
        }
        let norm = linalg::norm(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Argument("state vector has zero or non-finite norm".into()));
        }
        Ok(Self {
            n,
            d,
            amplitudes: amplitudes.into_iter().map(|a| a / norm).collect(),
        })
    }

    fn from_kets<I>(n: usize, d: usize, kets: I) -> Self
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        let mut amps = vec![ZERO; d.pow(n as u32)];
        for (digits, a) in kets {
            amps[ket_index(&digits, d)] += Complex64::new(a, 0.0);
        }
        Self::new(n, d, amps).expect("constructor produced a valid state")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, digits: &[usize]) -> Complex64 {
        self.amplitudes[ket_index(digits, self.d)]
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.amplitudes)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            n: self.n,
            d: self.d,
            matrix: ComplexMatrix::outer(&self.amplitudes),
        }
    }

    /// `⟨ψ|op|ψ⟩` for an operator on the full register.
    pub fn expectation(&self, op: &ComplexMatrix) -> Complex64 {
        op.sandwich(&self.amplitudes, &self.amplitudes)
    }

    /// Reduced density matrix on the `keep` sites.
    pub fn reduced(&self, keep: &[usize]) -> Result<ComplexMatrix> {
        self.to_density().reduced(keep)
    }

    /// State with sites `a` and `b` exchanged.
    pub fn swap_sites(&self, a: usize, b: usize) -> Self {
        let mut out = vec![ZERO; self.amplitudes.len()];
        for (idx, &amp) in self.amplitudes.iter().enumerate() {
            let mut digits = ket_digits(idx, self.n, self.d);
            digits.swap(a, b);
            out[ket_index(&digits, self.d)] = amp;
        }
        Self {
            n: self.n,
            d: self.d,
            amplitudes: out,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&StateJson::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: StateJson = serde_json::from_str(text)?;
        raw.try_into()
    }
}

/// JSON exchange form `{n, d, amplitudes: [[re, im], …]}`.
#[derive(Debug, Serialize, Deserialize)]
pub struct StateJson {
    pub n: usize,
    pub d: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

impl From<&PureState> for StateJson {
    fn from(s: &PureState) -> Self {
        Self {
            n: s.n,
            d: s.d,
            amplitudes: s.amplitudes.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<StateJson> for PureState {
    type Error = Error;
    fn try_from(raw: StateJson) -> Result<Self> {
        let amps = raw.amplitudes.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        PureState::new(raw.n, raw.d, amps)
    }
}

/// Unit-trace positive semidefinite operator over `n` qudits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    d: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(n: usize, d: usize, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.dim() != d.pow(n as u32) {
            return Err(Error::Dimension(format!(
                "{0}x{0} matrix for {n} sites of dimension {d}",
                matrix.dim()
            )));
        }
        if !matrix.is_hermitian(PSD_TOL) {
            return Err(Error::Domain("density matrix must be Hermitian".into()));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > PSD_TOL || tr.im.abs() > PSD_TOL {
            return Err(Error::Domain(format!("density matrix trace is {tr}, expected 1")));
        }
        let min = linalg::hermitian_eig(&matrix)?
            .eigenvalues
            .last()
            .copied()
            .unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
        Ok(Self { n, d, matrix })
    }

    pub(crate) fn new_unchecked(n: usize, d: usize, matrix: ComplexMatrix) -> Self {
        Self { n, d, matrix }
    }

    pub fn maximally_mixed(n: usize, d: usize) -> Self {
        let dim = d.pow(n as u32);
        Self {
            n,
            d,
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    pub fn reduced(&self, keep: &[usize]) -> Result<ComplexMatrix> {
        partial_trace(&self.matrix, &vec![self.d; self.n], keep)
    }
}

pub fn ket_index(digits: &[usize], d: usize) -> usize {
    digits.iter().fold(0, |acc, &x| acc * d + x)
}

pub fn ket_digits(mut index: usize, n: usize, d: usize) -> Vec<usize> {
    let mut digits = vec![0; n];
    for slot in digits.iter_mut().rev() {
        *slot = index % d;
        index /= d;
    }
    digits
}

/// All distinct orderings of a multiset of digits.
fn distinct_permutations(digits: &[usize]) -> Vec<Vec<usize>> {
    let mut counts = BTreeMap::new();
    for &x in digits {
        *counts.entry(x).or_insert(0usize) += 1;
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(digits.len());
    fn rec(counts: &mut BTreeMap<usize, usize>, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        let keys = counts.keys().copied().collect::<Vec<_>>();
        for k in keys {
            if counts[&k] == 0 {
                continue;
            }
            *counts.get_mut(&k).unwrap() -= 1;
            cur.push(k);
            rec(counts, len, cur, out);
            cur.pop();
            *counts.get_mut(&k).unwrap() += 1;
        }
    }
    rec(&mut counts, digits.len(), &mut current, &mut out);
    out
}

fn symmetric_terms(pattern: &[usize], weight: f64) -> impl Iterator<Item = (Vec<usize>, f64)> {
    distinct_permutations(pattern).into_iter().map(move |p| (p, weight))
}

/// `(|0…0⟩ + |1…1⟩ + … + |d-1…d-1⟩)/√d`
pub fn ghz_state(n: usize, d: usize) -> Result<PureState> {
    if n < 2 || d < 2 {
        return Err(Error::Argument(format!(
            "GHZ needs n >= 2 and d >= 2, got n={n}, d={d}"
        )));
    }
    Ok(PureState::from_kets(n, d, (0..d).map(|k| (vec![k; n], 1.0))))
}

/// `(|0…0⟩ - |1…1⟩)/√2`, the odd partner of the qubit GHZ state.
pub fn ghz_minus_state(n: usize) -> Result<PureState> {
    if n < 2 {
        return Err(Error::Argument(format!("GHZ needs n >= 2, got {n}")));
    }
    Ok(PureState::from_kets(n, 2, [(vec![0; n], 1.0), (vec![1; n], -1.0)]))
}

/// Qubit Dicke state with `e` excitations (`|1⟩` digits).
pub fn dicke_state(n: usize, e: usize) -> Result<PureState> {
    if n == 0 || e > n {
        return Err(Error::Argument(format!(
            "Dicke state needs 0 <= e <= n, got n={n}, e={e}"
        )));
    }
    let mut pattern = vec![1; e];
    pattern.extend(std::iter::repeat_n(0, n - e));
    Ok(PureState::from_kets(n, 2, symmetric_terms(&pattern, 1.0)))
}

/// Four-qutrit symmetric (Dicke-type) states `Q₄ᵏ`, `k ∈ 1..=4`.
pub fn qutrit_dicke(k: usize) -> Result<PureState> {
    let terms: Vec<(Vec<usize>, f64)> = match k {
        1 => symmetric_terms(&[0, 0, 0, 1], 1.0).collect(),
        2 => symmetric_terms(&[0, 0, 1, 1], 2.0)
            .chain(symmetric_terms(&[0, 0, 0, 2], 1.0))
            .collect(),
        3 => symmetric_terms(&[0, 1, 1, 1], 2.0)
            .chain(symmetric_terms(&[0, 0, 1, 2], 1.0))
            .collect(),
        4 => std::iter::once((vec![1, 1, 1, 1], 4.0))
            .chain(symmetric_terms(&[0, 1, 1, 2], 2.0))
            .chain(symmetric_terms(&[0, 0, 2, 2], 1.0))
            .collect(),
        _ => return Err(Error::Argument(format!("qutrit Dicke index must be 1..=4, got {k}"))),
    };
    Ok(PureState::from_kets(4, 3, terms))
}

/// Absolutely maximally entangled states available in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AmeId {
    /// Six qubits.
    SixQubits,
    /// Four qutrits.
    FourQutrits,
}

pub fn ame_state(id: AmeId) -> PureState {
    match id {
        AmeId::SixQubits => {
            let scale = 1.0 / (4.0 * std::f64::consts::SQRT_2);
            let amps = AME_6_2_COEFFICIENTS
                .iter()
                .map(|&c| Complex64::new(c as f64 * scale, 0.0))
                .collect();
            PureState::new(6, 2, amps).expect("AME(6,2) coefficients")
        }
        AmeId::FourQutrits => PureState::from_kets(
            4,
            3,
            AME_4_3_KETS
                .iter()
                .map(|k| (k.iter().map(|&x| x as usize).collect(), 1.0)),
        ),
    }
}

/// Haar-random pure state: normalized vector of i.i.d. standard complex Gaussians.
pub fn haar_random_state<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<PureState> {
    let dim = d.pow(n as u32);
    let amps = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    PureState::new(n, d, amps)
}

/// Named states used across the library and the command line.
///
/// Textual forms: `ghz-<n>-<d>`, `dicke-<n>-<e>`, `q4-<k>`, `ame-6-2`,
/// `ame-4-3`, `haar-<n>-<d>-<seed>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateId {
    Ghz { n: usize, d: usize },
    Dicke { n: usize, e: usize },
    QutritDicke { k: usize },
    Ame(AmeId),
    Haar { n: usize, d: usize, seed: u64 },
}

impl StateId {
    pub fn build(&self) -> Result<PureState> {
        match *self {
            StateId::Ghz { n, d } => ghz_state(n, d),
            StateId::Dicke { n, e } => dicke_state(n, e),
            StateId::QutritDicke { k } => qutrit_dicke(k),
            StateId::Ame(id) => Ok(ame_state(id)),
            StateId::Haar { n, d, seed } => {
                let mut rng = crate::mc::sample_rng(seed, 0);
                haar_random_state(n, d, &mut rng)
            }
        }
    }

    pub fn local_dim(&self) -> usize {
        match *self {
            StateId::Ghz { d, .. } | StateId::Haar { d, .. } => d,
            StateId::Dicke { .. } | StateId::Ame(AmeId::SixQubits) => 2,
            StateId::QutritDicke { .. } | StateId::Ame(AmeId::FourQutrits) => 3,
        }
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateId::Ghz { n, d } => write!(f, "ghz-{n}-{d}"),
            StateId::Dicke { n, e } => write!(f, "dicke-{n}-{e}"),
            StateId::QutritDicke { k } => write!(f, "q4-{k}"),
            StateId::Ame(AmeId::SixQubits) => write!(f, "ame-6-2"),
            StateId::Ame(AmeId::FourQutrits) => write!(f, "ame-4-3"),
            StateId::Haar { n, d, seed } => write!(f, "haar-{n}-{d}-{seed}"),
        }
    }
}

impl FromStr for StateId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts = s.trim().to_ascii_lowercase();
        let parts = parts.split('-').collect::<Vec<_>>();
        let num = |i: usize| -> Result<u64> {
            parts
                .get(i)
                .and_then(|p| p.parse::<u64>().ok())
                .ok_or_else(|| Error::Argument(format!("malformed state id '{s}'")))
        };
        let id = match (parts[0], parts.len()) {
            ("ghz", 3) => StateId::Ghz {
                n: num(1)? as usize,
                d: num(2)? as usize,
            },
            ("dicke", 3) => StateId::Dicke {
                n: num(1)? as usize,
                e: num(2)? as usize,
            },
            ("q4", 2) => StateId::QutritDicke { k: num(1)? as usize },
            ("ame", 3) => match (num(1)?, num(2)?) {
                (6, 2) => StateId::Ame(AmeId::SixQubits),
                (4, 3) => StateId::Ame(AmeId::FourQutrits),
                _ => return Err(Error::Argument(format!("no AME state '{s}'"))),
            },
            ("haar", 4) => StateId::Haar {
                n: num(1)? as usize,
                d: num(2)? as usize,
                seed: num(3)?,
            },
            _ => return Err(Error::Argument(format!("unknown state id '{s}'"))),
        };
        Ok(id)
    }
}

/// Correlation tensor `T_{i₁…iₙ} = Tr(ρ H_{i₁}⊗…⊗H_{iₙ})` with respect to a
/// local basis, where index 0 denotes the identity-proportional element `H₀`.
///
/// Entries are evaluated lazily per index tuple.
pub struct CorrelationTensor<'a> {
    rho: &'a DensityMatrix,
    /// `ops[0] = H₀`, `ops[i] = Hᵢ`.
    ops: Vec<ComplexMatrix>,
    c: f64,
}

impl<'a> CorrelationTensor<'a> {
    pub fn new(rho: &'a DensityMatrix, basis: &LocalBasis) -> Result<Self> {
        if basis.d() != rho.d() {
            return Err(Error::Dimension(format!(
                "basis local dimension {} does not match state dimension {}",
                basis.d(),
                rho.d()
            )));
        }
        let mut ops = vec![basis.h0().clone()];
        ops.extend(basis.generators().iter().cloned());
        Ok(Self { rho, ops, c: basis.c() })
    }

    pub fn n(&self) -> usize {
        self.rho.n()
    }

    /// Number of traceless generators `r` (indices run over `0..=r`).
    pub fn r(&self) -> usize {
        self.ops.len() - 1
    }

    /// Entry at `indices` (length `n`, each in `0..=r`).
    pub fn entry(&self, indices: &[usize]) -> f64 {
        self.entry_complex(indices).re
    }

    /// Entry including its (round-off) imaginary part.
    pub fn entry_complex(&self, indices: &[usize]) -> Complex64 {
        assert_eq!(indices.len(), self.n(), "index tuple length must equal n");
        let d = self.rho.d();
        let n = self.n();
        let rho = self.rho.matrix();
        let dim = rho.dim();
        let factors = indices.iter().map(|&i| &self.ops[i]).collect::<Vec<_>>();
        // Tr(ρ O) = Σ_{a,b} ρ_ab O_ba with O_ba = Π_s F_s[b_s, a_s]
        let mut acc = ZERO;
        let digits = (0..dim).map(|i| ket_digits(i, n, d)).collect::<Vec<_>>();
        for (a, da) in digits.iter().enumerate() {
            for (b, db) in digits.iter().enumerate() {
                let r = rho[(a, b)];
                if r == ZERO {
                    continue;
                }
                let mut o = Complex64::new(1.0, 0.0);
                for (s, f) in factors.iter().enumerate() {
                    o *= f[(db[s], da[s])];
                    if o == ZERO {
                        break;
                    }
                }
                acc += r * o;
            }
        }
        acc
    }

    /// Entry with `H₀` replaced by the bare identity, i.e. the entry divided
    /// by `(√(c/d))^{#zero indices}`.
    pub fn bare_entry(&self, indices: &[usize]) -> f64 {
        let zeros = indices.iter().filter(|&&i| i == 0).count() as i32;
        let h0_scale = (self.c / self.rho.d() as f64).sqrt();
        self.entry(indices) / h0_scale.powi(zeros)
    }

    /// Every entry, keyed by index tuple in lexicographic order. Only for `n <= 4`.
    pub fn dense(&self) -> Result<Vec<(Vec<usize>, f64)>> {
        let n = self.n();
        if n > 4 {
            return Err(Error::Unsupported(format!(
                "dense correlation tensor limited to n <= 4, got {n}"
            )));
        }
        let base = self.r() + 1;
        Ok((0..base.pow(n as u32))
            .map(|idx| {
                let t = ket_digits(idx, n, base);
                let v = self.entry(&t);
                (t, v)
            })
            .collect())
    }

    /// `Σ T_{i…} H_{i₁}⊗…⊗H_{iₙ} / cⁿ`; equals ρ when the basis is complete.
    pub fn reconstruct(&self) -> Result<ComplexMatrix> {
        let n = self.n();
        let mut out = ComplexMatrix::zeros(self.rho.dim());
        for (indices, t) in self.dense()? {
            if t == 0.0 {
                continue;
            }
            let op = linalg::tensor_all(indices.iter().map(|&i| &self.ops[i]));
            out.add_scaled(&op, Complex64::new(t / self.c.powi(n as i32), 0.0));
        }
        Ok(out)
    }
}
