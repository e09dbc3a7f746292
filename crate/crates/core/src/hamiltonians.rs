//! Local operator bases, random-Hamiltonian ensembles and their embedding
//! into `n`-site collective, non-collective and single-site Hamiltonians.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{embed_site, paulis, ComplexMatrix, ZERO};
use crate::mc::SampleRng;

const BASIS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    /// `σᵢ/2`, qubits only.
    Pauli,
    /// Spin-`j` angular momentum `{Jx, Jy, Jz}` with `j = (d-1)/2`.
    Spin,
    /// Generalized Gell-Mann matrices, `Tr(λᵢλⱼ) = 2δᵢⱼ`.
    #[serde(alias = "gell-mann")]
    GellMann,
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisKind::Pauli => "pauli",
            BasisKind::Spin => "spin",
            BasisKind::GellMann => "gellmann",
        })
    }
}

impl FromStr for BasisKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pauli" | "sigma" => Ok(Self::Pauli),
            "spin" | "j" => Ok(Self::Spin),
            "gellmann" | "gell-mann" | "lambda" => Ok(Self::GellMann),
            _ => Err(Error::Argument(format!("unknown basis '{s}'"))),
        }
    }
}

/// Orthogonal set of traceless Hermitian generators `H₁…H_r` with common
/// Hilbert–Schmidt norm `c = Tr(Hᵢ²)`, plus `H₀ = √(c/d)·𝟙`.
#[derive(Debug, Clone)]
pub struct LocalBasis {
    kind: BasisKind,
    d: usize,
    generators: Vec<ComplexMatrix>,
    h0: ComplexMatrix,
    c: f64,
}

impl LocalBasis {
    fn from_generators(kind: BasisKind, d: usize, generators: Vec<ComplexMatrix>) -> Self {
        let c = generators[0].trace_product(&generators[0]).re;
        let h0 = ComplexMatrix::identity(d).scale_real((c / d as f64).sqrt());
        Self {
            kind,
            d,
            generators,
            h0,
            c,
        }
    }

    pub fn pauli() -> Self {
        let gens = paulis().iter().map(|s| s.scale_real(0.5)).collect();
        Self::from_generators(BasisKind::Pauli, 2, gens)
    }

    pub fn spin(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::Argument(format!("spin basis needs d >= 2, got {d}")));
        }
        let [jx, jy, jz] = spin_matrices(d);
        Ok(Self::from_generators(BasisKind::Spin, d, vec![jx, jy, jz]))
    }

    pub fn gellmann(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::Argument(format!("Gell-Mann basis needs d >= 2, got {d}")));
        }
        Ok(Self::from_generators(BasisKind::GellMann, d, gellmann_matrices(d)))
    }

    pub fn build(kind: BasisKind, d: usize) -> Result<Self> {
        match kind {
            BasisKind::Pauli if d == 2 => Ok(Self::pauli()),
            BasisKind::Pauli => Err(Error::Argument(format!("Pauli basis needs d = 2, got {d}"))),
            BasisKind::Spin => Self::spin(d),
            BasisKind::GellMann => Self::gellmann(d),
        }
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn r(&self) -> usize {
        self.generators.len()
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn generators(&self) -> &[ComplexMatrix] {
        &self.generators
    }

    pub fn h0(&self) -> &ComplexMatrix {
        &self.h0
    }

    /// Largest violation of the basis invariants (orthogonality, common norm,
    /// tracelessness, Hermiticity).
    pub fn invariant_residual(&self) -> f64 {
        let mut all = vec![&self.h0];
        all.extend(self.generators.iter());
        let mut worst: f64 = 0.0;
        for (i, a) in all.iter().enumerate() {
            worst = worst.max(a.max_abs_diff(&a.adjoint()));
            if i > 0 {
                worst = worst.max(a.trace().norm());
            }
            for (j, b) in all.iter().enumerate() {
                let ip = a.trace_product(b);
                let expected = if i == j { self.c } else { 0.0 };
                worst = worst.max((ip - Complex64::new(expected, 0.0)).norm());
            }
        }
        worst
    }

    pub fn generator_set(&self, restriction: Restriction) -> GeneratorSet {
        let mut all = vec![self.h0.clone()];
        all.extend(self.generators.iter().cloned());
        let generators = match restriction {
            Restriction::Traceless => self.generators.clone(),
            Restriction::Full => all,
            Restriction::RealSymmetric => all.into_iter().filter(|g| g.is_real_symmetric(BASIS_TOL)).collect(),
        };
        GeneratorSet {
            basis: self.kind,
            restriction,
            d: self.d,
            c: self.c,
            generators,
        }
    }
}

/// Spin-`j` matrices `[Jx, Jy, Jz]` for `d = 2j + 1`, basis ordered `m = j, j-1, …, -j`.
pub fn spin_matrices(d: usize) -> [ComplexMatrix; 3] {
    let j = (d as f64 - 1.0) / 2.0;
    let m = |k: usize| j - k as f64;
    let mut jx = ComplexMatrix::zeros(d);
    let mut jy = ComplexMatrix::zeros(d);
    let mut jz = ComplexMatrix::zeros(d);
    for k in 0..d {
        jz[(k, k)] = Complex64::new(m(k), 0.0);
    }
    // ⟨m+1|J+|m⟩ = √(j(j+1) - m(m+1)); row k-1 has m(k-1) = m(k) + 1.
    for k in 1..d {
        let mk = m(k);
        let amp = (j * (j + 1.0) - mk * (mk + 1.0)).sqrt();
        jx[(k - 1, k)] = Complex64::new(amp / 2.0, 0.0);
        jx[(k, k - 1)] = Complex64::new(amp / 2.0, 0.0);
        jy[(k - 1, k)] = Complex64::new(0.0, -amp / 2.0);
        jy[(k, k - 1)] = Complex64::new(0.0, amp / 2.0);
    }
    [jx, jy, jz]
}

/// Generalized Gell-Mann matrices: symmetric, antisymmetric, then diagonal.
pub fn gellmann_matrices(d: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in (j + 1)..d {
            let mut s = ComplexMatrix::zeros(d);
            s[(j, k)] = Complex64::new(1.0, 0.0);
            s[(k, j)] = Complex64::new(1.0, 0.0);
            out.push(s);
            let mut a = ComplexMatrix::zeros(d);
            a[(j, k)] = Complex64::new(0.0, -1.0);
            a[(k, j)] = Complex64::new(0.0, 1.0);
            out.push(a);
        }
    }
    for l in 1..d {
        let scale = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut diag = vec![0.0; d];
        for x in diag.iter_mut().take(l) {
            *x = scale;
        }
        diag[l] = -(l as f64) * scale;
        out.push(ComplexMatrix::from_real_diag(&diag));
    }
    out
}

/// Which members of a basis span the sampled subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Restriction {
    /// The traceless generators `H₁…H_r`.
    #[default]
    Traceless,
    /// Generators plus `H₀`, spanning all Hermitian matrices for a complete basis.
    Full,
    /// Real symmetric members of `{H₀, H₁, …, H_r}`.
    RealSymmetric,
}

impl FromStr for Restriction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "traceless" => Ok(Self::Traceless),
            "full" => Ok(Self::Full),
            "real-symmetric" | "real_symmetric" => Ok(Self::RealSymmetric),
            _ => Err(Error::Argument(format!("unknown restriction '{s}'"))),
        }
    }
}

/// Orthogonal Hermitian operators with common norm `c` that a local
/// Hamiltonian `H_α = Σ αᵢ Hᵢ` is expanded in.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    pub basis: BasisKind,
    pub restriction: Restriction,
    pub d: usize,
    pub c: f64,
    pub generators: Vec<ComplexMatrix>,
}

impl GeneratorSet {
    pub fn r(&self) -> usize {
        self.generators.len()
    }

    /// `Σ αᵢ Hᵢ`
    pub fn local_hamiltonian(&self, alpha: &[f64]) -> ComplexMatrix {
        assert_eq!(alpha.len(), self.r(), "coefficient vector length must equal r");
        let mut h = ComplexMatrix::zeros(self.d);
        for (a, g) in alpha.iter().zip(&self.generators) {
            if *a != 0.0 {
                h.add_scaled(g, Complex64::new(*a, 0.0));
            }
        }
        h
    }

    /// `true` when `Σᵢ Hᵢ² ∝ 𝟙` (a Casimir-type set), required by the
    /// correlation-tensor forms of the mean QFI.
    pub fn has_scalar_casimir(&self) -> bool {
        let mut sum = ComplexMatrix::zeros(self.d);
        for g in &self.generators {
            sum.add_scaled(&(g * g), Complex64::new(1.0, 0.0));
        }
        let scalar = sum.trace() / self.d as f64;
        sum.max_abs_diff(&ComplexMatrix::identity(self.d).scale(scalar)) < 1e-10
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleKind {
    /// Uniform on the unit sphere `S^{r-1}` of coefficient vectors.
    Sphere,
    /// Standard normal coefficients on the orthonormalized generators.
    Gue,
    /// Real-symmetric generators only; coefficient variance 2 on the
    /// orthonormalized set (diagonal entries `√2 ξ`).
    Goe,
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnsembleKind::Sphere => "sphere",
            EnsembleKind::Gue => "gue",
            EnsembleKind::Goe => "goe",
        })
    }
}

impl FromStr for EnsembleKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sphere" => Ok(Self::Sphere),
            "gue" => Ok(Self::Gue),
            "goe" => Ok(Self::Goe),
            _ => Err(Error::Argument(format!("unknown ensemble '{s}'"))),
        }
    }
}

/// Source of random coefficient vectors over a [`GeneratorSet`].
pub trait CoefficientSampler: Sync {
    fn generators(&self) -> &GeneratorSet;
    fn draw(&self, rng: &mut SampleRng) -> Vec<f64>;
}

/// Ensemble of local Hamiltonians invariant under orthogonal rotations of
/// the coefficient vector.
#[derive(Debug, Clone)]
pub struct HamiltonianEnsemble {
    kind: EnsembleKind,
    set: GeneratorSet,
}

impl HamiltonianEnsemble {
    pub fn new(kind: EnsembleKind, basis: &LocalBasis, restriction: Restriction) -> Result<Self> {
        let set = basis.generator_set(restriction);
        if set.r() == 0 {
            return Err(Error::Config(format!(
                "restriction {restriction:?} leaves no generators in the {} basis",
                basis.kind()
            )));
        }
        if kind == EnsembleKind::Goe && !set.generators.iter().all(|g| g.is_real_symmetric(BASIS_TOL)) {
            return Err(Error::Config(format!(
                "GOE needs real symmetric generators; the {} basis with {restriction:?} restriction has complex ones",
                basis.kind()
            )));
        }
        Ok(Self { kind, set })
    }

    /// Uniform sphere over the traceless generators of `basis`.
    pub fn sphere(basis: &LocalBasis) -> Self {
        Self::new(EnsembleKind::Sphere, basis, Restriction::Traceless).expect("non-empty generator set")
    }

    pub fn kind(&self) -> EnsembleKind {
        self.kind
    }

    pub fn set(&self) -> &GeneratorSet {
        &self.set
    }

    pub fn r(&self) -> usize {
        self.set.r()
    }

    pub fn c(&self) -> f64 {
        self.set.c
    }

    /// `E[Tr(H_α²)]` under the ensemble.
    pub fn mean_purity(&self) -> f64 {
        let r = self.r() as f64;
        match self.kind {
            EnsembleKind::Sphere => self.set.c,
            EnsembleKind::Gue => r,
            EnsembleKind::Goe => 2.0 * r,
        }
    }

    /// Ratio `E[Tr H²] / Tr(H₁²)` multiplying the basis-averaged QFI.
    pub fn prefactor(&self) -> f64 {
        self.mean_purity() / self.set.c
    }

    pub fn sample(&self, rng: &mut SampleRng) -> Vec<f64> {
        let r = self.r();
        let gauss = (0..r).map(|_| rng.sample::<f64, _>(StandardNormal)).collect::<Vec<_>>();
        match self.kind {
            EnsembleKind::Sphere => {
                let norm = gauss.iter().map(|x| x * x).sum::<f64>().sqrt();
                gauss.into_iter().map(|x| x / norm).collect()
            }
            EnsembleKind::Gue => {
                let s = 1.0 / self.set.c.sqrt();
                gauss.into_iter().map(|x| x * s).collect()
            }
            EnsembleKind::Goe => {
                let s = (2.0 / self.set.c).sqrt();
                gauss.into_iter().map(|x| x * s).collect()
            }
        }
    }
}

impl CoefficientSampler for HamiltonianEnsemble {
    fn generators(&self) -> &GeneratorSet {
        &self.set
    }

    fn draw(&self, rng: &mut SampleRng) -> Vec<f64> {
        self.sample(rng)
    }
}

/// Always returns the same coefficient vector.
#[derive(Debug, Clone)]
pub struct FixedCoefficients {
    pub set: GeneratorSet,
    pub alpha: Vec<f64>,
}

impl CoefficientSampler for FixedCoefficients {
    fn generators(&self) -> &GeneratorSet {
        &self.set
    }

    fn draw(&self, _rng: &mut SampleRng) -> Vec<f64> {
        self.alpha.clone()
    }
}

/// JSON form of an ensemble: `{kind, basis, d, restriction}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub kind: EnsembleKind,
    pub basis: BasisKind,
    pub d: usize,
    #[serde(default)]
    pub restriction: Restriction,
}

impl EnsembleConfig {
    pub fn build(&self) -> Result<HamiltonianEnsemble> {
        let basis = LocalBasis::build(self.basis, self.d)?;
        HamiltonianEnsemble::new(self.kind, &basis, self.restriction)
    }
}

/// How random local Hamiltonians are distributed over the sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseMode {
    /// One draw shared by every site.
    Collective,
    /// Independent draws per site.
    Noncollective,
}

impl fmt::Display for NoiseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseMode::Collective => "collective",
            NoiseMode::Noncollective => "noncollective",
        })
    }
}

impl FromStr for NoiseMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "collective" | "col" => Ok(Self::Collective),
            "noncollective" | "noncol" => Ok(Self::Noncollective),
            _ => Err(Error::Argument(format!("unknown noise mode '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingMode {
    Collective,
    Noncollective,
    /// Generator `index` on `site`, identity elsewhere.
    SingleSite {
        site: usize,
        index: usize,
    },
}

/// `n`-site Hamiltonian built from local terms.
#[derive(Debug, Clone)]
pub struct EmbeddedHamiltonian {
    pub n: usize,
    pub matrix: ComplexMatrix,
    pub mode: EmbeddingMode,
}

fn sum_of_local_terms<'a>(locals: impl Iterator<Item = &'a ComplexMatrix>, n: usize) -> ComplexMatrix {
    let mut total: Option<ComplexMatrix> = None;
    for (site, h) in locals.enumerate() {
        let term = embed_site(h, site, n);
        match total.as_mut() {
            Some(t) => t.add_scaled(&term, Complex64::new(1.0, 0.0)),
            None => total = Some(term),
        }
    }
    total.expect("at least one site")
}

/// `Σ_s 𝟙^{⊗s} ⊗ H_α ⊗ 𝟙^{⊗(n-s-1)}`
pub fn embed_collective(alpha: &[f64], set: &GeneratorSet, n: usize) -> EmbeddedHamiltonian {
    let h = set.local_hamiltonian(alpha);
    EmbeddedHamiltonian {
        n,
        matrix: sum_of_local_terms(std::iter::repeat_n(&h, n), n),
        mode: EmbeddingMode::Collective,
    }
}

/// Site `s` carries `H_{αₛ}`.
pub fn embed_noncollective(alphas: &[Vec<f64>], set: &GeneratorSet, n: usize) -> Result<EmbeddedHamiltonian> {
    if alphas.len() != n {
        return Err(Error::Dimension(format!(
            "{} coefficient vectors for {n} sites",
            alphas.len()
        )));
    }
    let locals = alphas.iter().map(|a| set.local_hamiltonian(a)).collect::<Vec<_>>();
    Ok(EmbeddedHamiltonian {
        n,
        matrix: sum_of_local_terms(locals.iter(), n),
        mode: EmbeddingMode::Noncollective,
    })
}

/// Collective embedding of a single generator, `Σ_s Hᵢ^{(s)}`.
pub fn collective_generator(set: &GeneratorSet, n: usize, index: usize) -> EmbeddedHamiltonian {
    let mut alpha = vec![0.0; set.r()];
    alpha[index] = 1.0;
    embed_collective(&alpha, set, n)
}

/// `Hᵢ` on `site` (0-based), bare identity on all other sites.
pub fn single_site_generator(set: &GeneratorSet, n: usize, site: usize, index: usize) -> Result<EmbeddedHamiltonian> {
    if site >= n || index >= set.r() {
        return Err(Error::Argument(format!(
            "site {site} / generator {index} out of range for n = {n}, r = {}",
            set.r()
        )));
    }
    Ok(EmbeddedHamiltonian {
        n,
        matrix: embed_site(&set.generators[index], site, n),
        mode: EmbeddingMode::SingleSite { site, index },
    })
}

/// Zero operator of the right size, handy as an additive identity.
pub fn zero_hamiltonian(d: usize, n: usize) -> EmbeddedHamiltonian {
    let mut m = ComplexMatrix::zeros(d.pow(n as u32));
    m.as_mut_slice().iter_mut().for_each(|z| *z = ZERO);
    EmbeddedHamiltonian {
        n,
        matrix: m,
        mode: EmbeddingMode::Noncollective,
    }
}
