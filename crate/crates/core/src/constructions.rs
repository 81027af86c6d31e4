//! Explicit bosonic universal entanglers and numerical checks of the
//! polynomial systems behind them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, binomial, CMatrix, C64, ONE, ZERO};
use crate::search::objectives::{E1System, E2System};
use crate::search::optimizer::{multistart, MultistartOutcome};
use crate::search::SearchConfig;
use crate::subspace::{self, sym_dim, sym_index, SingleParticleVector, SymVector};

/// Deviation from unitarity tolerated when a gate is flagged unitary.
pub const UNITARY_TOL: f64 = 1e-12;

/// Which two-particle space a gate acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum GateKind {
    Bosonic { d: usize },
    Fermionic { d: usize },
    Distinguishable { d1: usize, d2: usize },
}

impl GateKind {
    /// Side length of a matrix acting on this space.
    pub fn subspace_dim(self) -> usize {
        match self {
            GateKind::Bosonic { d } => sym_dim(d),
            GateKind::Fermionic { d } => subspace::anti_dim(d),
            GateKind::Distinguishable { d1, d2 } => d1 * d2,
        }
    }

    pub fn validate(self) -> Result<Self> {
        let ok = match self {
            GateKind::Bosonic { d } => d >= 1,
            GateKind::Fermionic { d } => d >= 2,
            GateKind::Distinguishable { d1, d2 } => d1 >= 1 && d2 >= 1,
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::InvalidDimension(format!("{self:?}")))
        }
    }

    pub fn variety(self) -> crate::varieties::VarietyKind {
        use crate::varieties::VarietyKind;
        match self {
            GateKind::Bosonic { d } => VarietyKind::Veronese { d },
            GateKind::Fermionic { d } => VarietyKind::Grassmannian { d },
            GateKind::Distinguishable { d1, d2 } => VarietyKind::Segre { d1, d2 },
        }
    }
}

impl std::fmt::Display for GateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GateKind::Bosonic { d } => write!(f, "bosonic(d={d})"),
            GateKind::Fermionic { d } => write!(f, "fermionic(d={d})"),
            GateKind::Distinguishable { d1, d2 } => write!(f, "distinguishable(d1={d1}, d2={d2})"),
        }
    }
}

/// A square gate on one of the two-particle spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct GateMatrix {
    kind: GateKind,
    matrix: CMatrix,
    provenance: String,
    unitary: bool,
}

impl GateMatrix {
    pub fn new(kind: GateKind, matrix: CMatrix, provenance: impl Into<String>) -> Result<Self> {
        let n = kind.validate()?.subspace_dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "{kind} needs a {n}x{n} matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let unitary = linalg::unitarity_defect(&matrix) <= UNITARY_TOL;
        Ok(Self { kind, matrix, provenance: provenance.into(), unitary })
    }

    pub fn identity(kind: GateKind) -> Result<Self> {
        let n = kind.validate()?.subspace_dim();
        Self::new(kind, CMatrix::identity(n, n), "identity")
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn unitarity_defect(&self) -> f64 {
        linalg::unitarity_defect(&self.matrix)
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        linalg::mat_vec(&self.matrix, v)
    }
}

/// Position of the cyclically adjacent pair `{i, i+1 mod d}` (zero-based `i`).
fn adjacent_pair_index(i: usize, d: usize) -> usize {
    sym_index(i + 1, (i + 1) % d + 1, d).expect("indices in range")
}

/// Permutation gate swapping each `|ii⟩` with the cyclically adjacent pair
/// state on `{i, i+1}`; all other pair states are fixed.
pub fn build_permutation_bue(d: usize) -> Result<GateMatrix> {
    if d < 3 {
        return Err(Error::InvalidDimension(format!(
            "permutation entangler needs d >= 3 (no bosonic universal entangler exists for d = {d})"
        )));
    }
    let n = sym_dim(d);
    let mut target: Vec<usize> = (0..n).collect();
    for i in 0..d {
        let p = adjacent_pair_index(i, d);
        target[i] = p;
        target[p] = i;
    }
    let mut m = CMatrix::zeros(n, n);
    for (col, &row) in target.iter().enumerate() {
        m[(row, col)] = ONE;
    }
    GateMatrix::new(GateKind::Bosonic { d }, m, "permutation-bue")
}

/// The subspace `S` spanned by `s_i = |ii⟩ + |i+1,i+2⟩ + |i+2,i+1⟩` (indices mod `d`).
#[derive(Debug, Clone, PartialEq)]
pub struct HouseholderSpec {
    pub d: usize,
    pub spanning: Vec<SymVector>,
    pub projector: CMatrix,
}

impl HouseholderSpec {
    pub fn gram(&self) -> CMatrix {
        let k = self.spanning.len();
        CMatrix::from_fn(k, k, |a, b| linalg::inner(self.spanning[a].coords(), self.spanning[b].coords()))
    }
}

/// `s_i` for zero-based `i`, as symmetric coordinates (norm √3).
pub(crate) fn spanning_vector(i: usize, d: usize) -> SymVector {
    let mut coords = vec![ZERO; sym_dim(d)];
    coords[i] = ONE;
    let (a, b) = ((i + 1) % d + 1, (i + 2) % d + 1);
    coords[sym_index(a, b, d).expect("indices in range")] = C64::new(std::f64::consts::SQRT_2, 0.0);
    SymVector::new(d, coords).expect("length matches")
}

pub fn build_householder_subspace(d: usize) -> Result<HouseholderSpec> {
    if d < 3 {
        return Err(Error::InvalidDimension(format!("householder subspace needs d >= 3, got {d}")));
    }
    let spanning: Vec<SymVector> = (0..d).map(|i| spanning_vector(i, d)).collect();
    let n = sym_dim(d);
    let mut projector = CMatrix::zeros(n, n);
    for s in &spanning {
        let v = crate::linalg::CVector::from_column_slice(s.coords());
        projector += &v * v.adjoint() / C64::new(3.0, 0.0);
    }
    let spec = HouseholderSpec { d, spanning, projector };
    // disjoint supports make the spanning set orthogonal with norm² 3
    debug_assert!(linalg::max_abs_diff(&spec.gram(), &(CMatrix::identity(d, d) * C64::new(3.0, 0.0))) < 1e-13);
    Ok(spec)
}

/// `U = I - 2 P_S`.
pub fn build_householder_bue(d: usize) -> Result<GateMatrix> {
    if d < 5 {
        return Err(Error::InvalidDimension(format!(
            "householder entangler needs d >= 5: below that S contains states of rank <= 2 (got d = {d})"
        )));
    }
    let spec = build_householder_subspace(d)?;
    let n = sym_dim(d);
    let u = CMatrix::identity(n, n) - spec.projector * C64::new(2.0, 0.0);
    GateMatrix::new(GateKind::Bosonic { d }, u, "householder-bue")
}

/// `Σ_i |a_i² + 2 a_{i+1} a_{i+2}|²` with cyclic indices, for unit `a`.
pub fn e1_residual(a: &SingleParticleVector) -> Result<f64> {
    if a.dim() < 3 {
        return Err(Error::InvalidDimension(format!("system E1 needs d >= 3, got {}", a.dim())));
    }
    if !a.is_normalized(1e-10) {
        return Err(Error::NotNormalized(a.norm()));
    }
    Ok(e1_terms(a.amplitudes()).iter().map(|z| z.norm_sqr()).sum())
}

pub(crate) fn e1_terms(a: &[C64]) -> Vec<C64> {
    let d = a.len();
    (0..d).map(|i| a[i] * a[i] + a[(i + 1) % d] * a[(i + 2) % d] * 2.0).collect()
}

/// Outcome of a numerical check on one of the polynomial systems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub check: String,
    pub d: usize,
    pub passed: bool,
    pub verdict: String,
    pub min_found: f64,
    pub threshold: f64,
    pub argmin: Vec<C64>,
    pub restarts_run: usize,
    pub restarts_at_iter_cap: usize,
    pub iterations_total: usize,
    pub seed: u64,
}

/// Default pass threshold for the estimated minima of the E1/E2 checks.
pub const CERTIFY_MIN_THRESHOLD: f64 = 1e-3;

fn certification_report(
    check: &str,
    d: usize,
    outcome: MultistartOutcome,
    threshold: f64,
    seed: u64,
    pass_text: &str,
    fail_text: &str,
) -> CertificationReport {
    let best = outcome.best();
    let passed = best.score >= threshold;
    CertificationReport {
        check: check.to_string(),
        d,
        passed,
        verdict: if passed { pass_text } else { fail_text }.to_string(),
        min_found: best.score,
        threshold,
        argmin: best.point.clone(),
        restarts_run: outcome.restarts.len(),
        restarts_at_iter_cap: outcome.restarts.iter().filter(|r| r.hit_iter_cap).count(),
        iterations_total: outcome.restarts.iter().map(|r| r.iterations).sum(),
        seed,
    }
}

/// Multistart minimization of [`e1_residual`] over the unit sphere of `C^d`.
pub fn e1_certify_positive(d: usize, cfg: &SearchConfig, threshold: f64) -> Result<CertificationReport> {
    if d < 3 {
        return Err(Error::InvalidDimension(format!("system E1 needs d >= 3, got {d}")));
    }
    cfg.validate()?;
    let outcome = multistart(&E1System { d }, cfg, false);
    Ok(certification_report(
        "e1_positive",
        d,
        outcome,
        threshold,
        cfg.seed,
        "consistent with no nonzero solution",
        "possible nonzero solution",
    ))
}

/// Checks `Π_i a_{i+1} a_{i+2} = Π_i a_i²` (cyclic) on random complex points.
pub fn e1_product_identity_check(d: usize, samples: usize, seed: u64) -> Result<bool> {
    if d < 3 {
        return Err(Error::InvalidDimension(format!("system E1 needs d >= 3, got {d}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let a: Vec<C64> =
            (0..d).map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))).collect();
        if product_identity_deviation(&a) > 1e-10 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Relative gap between the two sides of the cyclic product identity.
pub fn product_identity_deviation(a: &[C64]) -> f64 {
    let d = a.len();
    let lhs: C64 = (0..d).map(|i| a[(i + 1) % d] * a[(i + 2) % d]).product();
    let rhs: C64 = a.iter().map(|x| x * x).product();
    let scale = lhs.norm().max(rhs.norm());
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).norm() / scale
    }
}

/// Multistart minimization of `σ₃/‖·‖_F` over unit combinations `Σ c_i s_i`.
pub fn e2_certify_rank3(d: usize, cfg: &SearchConfig, threshold: f64) -> Result<CertificationReport> {
    if d < 3 {
        return Err(Error::InvalidDimension(format!("system E2 needs d >= 3, got {d}")));
    }
    cfg.validate()?;
    let outcome = multistart(&E2System::new(d), cfg, false);
    Ok(certification_report(
        "e2_rank3",
        d,
        outcome,
        threshold,
        cfg.seed,
        "consistent with rank >= 3 everywhere in S",
        "S contains a state of rank <= 2",
    ))
}

/// Number of symmetric coordinates the Householder gate negates.
pub fn householder_trace(d: usize) -> i64 {
    binomial(d + 1, 2) as i64 - 2 * d as i64
}
