//! Counterexample search: does a gate map some product state to a product state?
//!
//! Searches minimize the image residual over product inputs with
//! [`optimizer::multistart`] and return a three-valued verdict. A search
//! that finds nothing is evidence, never a proof.

pub mod haar;
pub mod objectives;
pub mod optimizer;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constructions::{GateKind, GateMatrix};
use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::subspace::{self, schmidt_decompose, slater_decompose, sym_embed_raw, sym_matricize, wedge_raw};
use crate::varieties::{self, dimension_gate, ExistencePrediction, RESIDUAL_CONVENTION};
use objectives::{BosonicSystem, DistinguishableSystem, FermionicSystem};
use optimizer::{multistart, sub_seed, Manifold, MultistartOutcome, ResidualSystem};

pub use haar::sample_haar_unitary;

/// Attached to every report whose verdict is `none_found_within_budget`.
pub const NOT_A_PROOF: &str = "none_found_within_budget is numerical evidence from a finite multistart search, \
not a proof that the gate is a universal entangler";

/// Deviation from unitarity accepted for gates handed to a search.
pub const SEARCH_UNITARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub initial_step: f64,
    pub step_decay: f64,
    pub min_step: f64,
    /// Levenberg–Marquardt steps after the descent phase of each restart.
    pub polish_iters: usize,
    /// A residual at or below this is a counterexample.
    pub tolerance: f64,
    /// A best residual at or above this gives `none_found_within_budget`.
    pub certify_threshold: f64,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            restarts: 200,
            max_iters: 500,
            initial_step: 0.1,
            step_decay: 0.7,
            min_step: 1e-10,
            polish_iters: 25,
            tolerance: 1e-8,
            certify_threshold: 1e-4,
            seed: 42,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("restarts must be at least 1".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance < self.certify_threshold) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < tolerance < certify threshold, got {} and {}",
                self.tolerance, self.certify_threshold
            )));
        }
        if !(self.initial_step > 0.0 && self.step_decay > 0.0 && self.step_decay < 1.0 && self.min_step > 0.0) {
            return Err(Error::InvalidArgument("step schedule must satisfy step > 0 and 0 < decay < 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CounterexampleFound,
    NoneFoundWithinBudget,
    Inconclusive,
}

impl Verdict {
    pub fn classify(best_residual: f64, cfg: &SearchConfig) -> Self {
        if best_residual <= cfg.tolerance {
            Verdict::CounterexampleFound
        } else if best_residual >= cfg.certify_threshold {
            Verdict::NoneFoundWithinBudget
        } else {
            Verdict::Inconclusive
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::CounterexampleFound => "counterexample_found",
            Verdict::NoneFoundWithinBudget => "none_found_within_budget",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Factors of a product state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ProductDatum {
    /// `α ⊗ α`.
    Bosonic { alpha: Vec<C64> },
    /// `α ∧ β`.
    Fermionic { alpha: Vec<C64>, beta: Vec<C64> },
    /// `v1 ⊗ v2`.
    Distinguishable { v1: Vec<C64>, v2: Vec<C64> },
}

/// A product input whose image under the gate is (numerically) a product state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub input: ProductDatum,
    pub input_residual: f64,
    pub image: Vec<C64>,
    pub image_residual: f64,
    /// Factors extracted from the image.
    pub image_factors: ProductDatum,
    /// `‖embed(image_factors) - image‖`.
    pub reconstruction_error: f64,
    pub restart_index: usize,
    pub iterations: usize,
}

impl Counterexample {
    /// Recomputes everything from the input factors and the gate.
    pub fn reverify(&self, gate: &GateMatrix, tol: f64) -> Result<bool> {
        let input = embed_product(&self.input)?;
        let image = gate.apply(&input);
        let image_again = embed_product(&self.image_factors)?;
        let kind = gate.kind();
        let ok = product_residual(kind, &input)? <= 1e-12
            && product_residual(kind, &image)? <= tol
            && linalg::norm(&diff(&image, &self.image)) <= 1e-8
            && linalg::norm(&diff(&image, &image_again)) <= 1e-8;
        Ok(ok)
    }
}

fn diff(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Coordinates of a product state in the gate's space.
pub fn embed_product(datum: &ProductDatum) -> Result<Vec<C64>> {
    Ok(match datum {
        ProductDatum::Bosonic { alpha } => sym_embed_raw(alpha).into_coords(),
        ProductDatum::Fermionic { alpha, beta } => {
            if alpha.len() != beta.len() {
                return Err(Error::DimensionMismatch("fermionic factors differ in length".into()));
            }
            wedge_raw(alpha, beta).into_coords()
        }
        ProductDatum::Distinguishable { v1, v2 } => subspace::kron(v1, v2),
    })
}

/// Sigma-ratio residual of a state in the space of `kind`.
pub fn product_residual(kind: GateKind, coords: &[C64]) -> Result<f64> {
    match kind {
        GateKind::Bosonic { d } => varieties::veronese_residual(&subspace::SymVector::new(d, coords.to_vec())?),
        GateKind::Fermionic { d } => varieties::grassmann_residual(&subspace::AntiVector::new(d, coords.to_vec())?),
        GateKind::Distinguishable { d1, d2 } => varieties::segre_residual(coords, d1, d2),
    }
}

/// Product factors of a (near-)product state, from its leading singular data.
pub fn extract_factors(kind: GateKind, coords: &[C64]) -> Result<ProductDatum> {
    match kind {
        GateKind::Bosonic { d } => {
            // M ≈ b bᵀ: with u the top left singular vector, b = sqrt(u^† M ū) u
            let m = sym_matricize(&subspace::SymVector::new(d, coords.to_vec())?);
            let (u, _, _) = linalg::svd_sorted(&m);
            let u0: Vec<C64> = u.column(0).iter().copied().collect();
            let ubar: Vec<C64> = u0.iter().map(|z| z.conj()).collect();
            let c2 = linalg::inner(&u0, &linalg::mat_vec(&m, &ubar));
            let c = c2.sqrt();
            Ok(ProductDatum::Bosonic { alpha: u0.iter().map(|z| z * c).collect() })
        }
        GateKind::Fermionic { d } => {
            let dec = slater_decompose(&subspace::AntiVector::new(d, coords.to_vec())?)?;
            let (a, b) = &dec.pairs[0];
            let lambda = dec.coefficients[0];
            Ok(ProductDatum::Fermionic { alpha: a.iter().map(|z| z * lambda).collect(), beta: b.clone() })
        }
        GateKind::Distinguishable { d1, d2 } => {
            let dec = schmidt_decompose(coords, d1, d2)?;
            let s = dec.coefficients[0];
            Ok(ProductDatum::Distinguishable {
                v1: dec.left[0].iter().map(|z| z * s).collect(),
                v2: dec.right[0].clone(),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramBin {
    /// Residuals in `[10^decade, 10^(decade+1))`; the lowest bin also holds exact zeros.
    pub decade: i32,
    pub count: usize,
}

/// Per-restart residuals bucketed by decade, lowest bin `-16`.
pub fn residual_histogram(residuals: impl IntoIterator<Item = f64>) -> Vec<HistogramBin> {
    let mut counts = std::collections::BTreeMap::new();
    for r in residuals {
        let decade = if r > 0.0 { (r.log10().floor() as i32).clamp(-16, 0) } else { -16 };
        *counts.entry(decade).or_insert(0usize) += 1;
    }
    counts.into_iter().map(|(decade, count)| HistogramBin { decade, count }).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub verdict: Verdict,
    pub best_residual: f64,
    pub best_restart: usize,
    pub counterexample: Option<Counterexample>,
    pub kind: GateKind,
    pub provenance: String,
    /// `"proven"` for the explicit constructions, absent otherwise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub construction_status: Option<String>,
    pub residual_convention: String,
    pub restarts_run: usize,
    pub stopped_early: bool,
    pub restarts_at_iter_cap: usize,
    pub iterations_total: usize,
    pub histogram: Vec<HistogramBin>,
    pub config: SearchConfig,
    pub notes: Vec<String>,
}

fn check_gate(gate: &GateMatrix, cfg: &SearchConfig) -> Result<()> {
    cfg.validate()?;
    let defect = gate.unitarity_defect();
    if defect > SEARCH_UNITARY_TOL {
        return Err(Error::NotUnitary(defect));
    }
    Ok(())
}

fn construction_status(gate: &GateMatrix) -> Option<String> {
    matches!(gate.provenance(), "permutation-bue" | "householder-bue").then(|| "proven".to_string())
}

fn build_report<S: ResidualSystem>(
    gate: &GateMatrix,
    sys: &S,
    cfg: &SearchConfig,
    outcome: MultistartOutcome,
    to_input: impl Fn(&[C64]) -> ProductDatum,
    mut notes: Vec<String>,
) -> Result<VerificationReport> {
    let best = outcome.best().clone();
    let verdict = Verdict::classify(best.score, cfg);
    let counterexample = if verdict == Verdict::CounterexampleFound {
        let input = to_input(&best.point);
        let input_coords = embed_product(&input)?;
        let image = gate.apply(&input_coords);
        let image_factors = extract_factors(gate.kind(), &image)?;
        let reconstruction_error = linalg::norm(&diff(&embed_product(&image_factors)?, &image));
        Some(Counterexample {
            input_residual: product_residual(gate.kind(), &input_coords)?,
            image_residual: product_residual(gate.kind(), &image)?,
            input,
            image,
            image_factors,
            reconstruction_error,
            restart_index: best.index,
            iterations: best.iterations,
        })
    } else {
        None
    };
    if verdict == Verdict::NoneFoundWithinBudget {
        notes.push(NOT_A_PROOF.to_string());
    }
    let _ = sys;
    Ok(VerificationReport {
        verdict,
        best_residual: best.score,
        best_restart: best.index,
        counterexample,
        kind: gate.kind(),
        provenance: gate.provenance().to_string(),
        construction_status: construction_status(gate),
        residual_convention: RESIDUAL_CONVENTION.to_string(),
        restarts_run: outcome.restarts.len(),
        stopped_early: outcome.stopped_early,
        restarts_at_iter_cap: outcome.restarts.iter().filter(|r| r.hit_iter_cap).count(),
        iterations_total: outcome.restarts.iter().map(|r| r.iterations).sum(),
        histogram: residual_histogram(outcome.restarts.iter().map(|r| r.score)),
        config: cfg.clone(),
        notes,
    })
}

/// Looks for `α` with `U(α⊗α)` a coherent state.
pub fn bue_counterexample_search(gate: &GateMatrix, cfg: &SearchConfig) -> Result<VerificationReport> {
    let GateKind::Bosonic { d } = gate.kind() else {
        return Err(Error::DimensionMismatch(format!("bosonic search needs a bosonic gate, got {}", gate.kind())));
    };
    check_gate(gate, cfg)?;
    let sys = BosonicSystem { u: gate.matrix(), d };
    let outcome = multistart(&sys, cfg, true);
    build_report(gate, &sys, cfg, outcome, |z| ProductDatum::Bosonic { alpha: z.to_vec() }, Vec::new())
}

/// Looks for a Slater determinant whose image is a Slater determinant.
pub fn fue_counterexample_search(gate: &GateMatrix, cfg: &SearchConfig) -> Result<VerificationReport> {
    let GateKind::Fermionic { d } = gate.kind() else {
        return Err(Error::DimensionMismatch(format!("fermionic search needs a fermionic gate, got {}", gate.kind())));
    };
    check_gate(gate, cfg)?;
    let sys = FermionicSystem::new(gate.matrix(), d);
    let split = |z: &[C64]| ProductDatum::Fermionic { alpha: z[..d].to_vec(), beta: z[d..].to_vec() };
    if d <= 3 {
        let mut e = vec![linalg::ZERO; 2 * d];
        e[0] = linalg::ONE;
        e[d + 1] = linalg::ONE;
        let outcome = MultistartOutcome {
            restarts: vec![optimizer::RestartOutcome {
                index: 0,
                objective: 0.0,
                score: 0.0,
                iterations: 0,
                hit_iter_cap: false,
                point: e,
            }],
            best_index: 0,
            stopped_early: cfg.restarts > 1,
        };
        let note = format!("d = {d} <= 3: every antisymmetric state is a Slater determinant, so no gate entangles");
        return build_report(gate, &sys, cfg, outcome, split, vec![note]);
    }
    let outcome = multistart(&sys, cfg, true);
    build_report(gate, &sys, cfg, outcome, split, Vec::new())
}

/// Looks for `v1⊗v2` whose image is a product state.
pub fn distinguishable_counterexample_search(gate: &GateMatrix, cfg: &SearchConfig) -> Result<VerificationReport> {
    let GateKind::Distinguishable { d1, d2 } = gate.kind() else {
        return Err(Error::DimensionMismatch(format!(
            "distinguishable search needs a distinguishable gate, got {}",
            gate.kind()
        )));
    };
    check_gate(gate, cfg)?;
    let sys = DistinguishableSystem { u: gate.matrix(), d1, d2 };
    let outcome = multistart(&sys, cfg, true);
    build_report(
        gate,
        &sys,
        cfg,
        outcome,
        |z| ProductDatum::Distinguishable { v1: z[..d1].to_vec(), v2: z[d1..].to_vec() },
        Vec::new(),
    )
}

/// Dispatches on the gate's kind.
pub fn verify_gate(gate: &GateMatrix, cfg: &SearchConfig) -> Result<VerificationReport> {
    match gate.kind() {
        GateKind::Bosonic { .. } => bue_counterexample_search(gate, cfg),
        GateKind::Fermionic { .. } => fue_counterexample_search(gate, cfg),
        GateKind::Distinguishable { .. } => distinguishable_counterexample_search(gate, cfg),
    }
}

/// Haar gate on the space of `kind`, sampled with `seed`.
pub fn sample_haar_gate(kind: GateKind, seed: u64) -> Result<GateMatrix> {
    let n = kind.validate()?.subspace_dim();
    GateMatrix::new(kind, sample_haar_unitary(n, seed), format!("haar(seed={seed})"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrevalenceReport {
    pub kind: GateKind,
    pub num_gates: usize,
    pub fraction_none_found: f64,
    pub counterexamples_found: usize,
    pub none_found: usize,
    pub inconclusive: usize,
    pub prediction: ExistencePrediction,
    /// Gate `j` is sampled with `sub_seed(master_seed, j)`; its search uses the same value as master seed.
    pub gate_seeds: Vec<u64>,
    pub reports: Vec<VerificationReport>,
    pub notes: Vec<String>,
}

/// Samples `num_gates` Haar gates on the space of `kind` and searches each.
pub fn prevalence_trial(kind: GateKind, num_gates: usize, cfg: &SearchConfig) -> Result<PrevalenceReport> {
    cfg.validate()?;
    let prediction = dimension_gate(kind.validate()?.variety())?;
    let mut notes = Vec::new();
    if !prediction.exists {
        notes.push(format!(
            "dimension count {} >= {}: no universal entangler exists for {kind}; every gate should yield a counterexample",
            prediction.lhs, prediction.rhs
        ));
    }
    let mut reports = Vec::with_capacity(num_gates);
    let mut gate_seeds = Vec::with_capacity(num_gates);
    for j in 0..num_gates {
        let seed = sub_seed(cfg.seed, j as u64);
        let gate = sample_haar_gate(kind, seed)?;
        let gate_cfg = SearchConfig { seed, ..cfg.clone() };
        reports.push(verify_gate(&gate, &gate_cfg)?);
        gate_seeds.push(seed);
    }
    let count = |v: Verdict| reports.iter().filter(|r| r.verdict == v).count();
    let none_found = count(Verdict::NoneFoundWithinBudget);
    if none_found > 0 {
        notes.push(NOT_A_PROOF.to_string());
    }
    Ok(PrevalenceReport {
        kind,
        num_gates,
        fraction_none_found: if num_gates == 0 { 0.0 } else { none_found as f64 / num_gates as f64 },
        counterexamples_found: count(Verdict::CounterexampleFound),
        none_found,
        inconclusive: count(Verdict::Inconclusive),
        prediction,
        gate_seeds,
        reports,
        notes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementProfile {
    pub kind: GateKind,
    pub samples: usize,
    pub seed: u64,
    pub min: f64,
    pub mean: f64,
    pub max: f64,
    /// `(q, value)` with nearest-rank quantiles.
    pub quantiles: Vec<(f64, f64)>,
    pub residual_convention: String,
}

/// Image residuals of uniformly random product inputs.
pub fn entanglement_profile(gate: &GateMatrix, samples: usize, seed: u64) -> Result<EntanglementProfile> {
    if samples == 0 {
        return Err(Error::InvalidArgument("profile needs at least one sample".into()));
    }
    let defect = gate.unitarity_defect();
    if defect > SEARCH_UNITARY_TOL {
        return Err(Error::NotUnitary(defect));
    }
    let kind = gate.kind();
    let manifold = match kind {
        GateKind::Bosonic { d } => Manifold::Sphere { n: d },
        GateKind::Fermionic { d } => Manifold::OrthonormalPair { d },
        GateKind::Distinguishable { d1, d2 } => Manifold::SpherePair { d1, d2 },
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(samples);
    for _ in 0..samples {
        let z = manifold.random_point(&mut rng);
        let datum = match kind {
            GateKind::Bosonic { .. } => ProductDatum::Bosonic { alpha: z },
            GateKind::Fermionic { d } => ProductDatum::Fermionic { alpha: z[..d].to_vec(), beta: z[d..].to_vec() },
            GateKind::Distinguishable { d1, .. } => {
                ProductDatum::Distinguishable { v1: z[..d1].to_vec(), v2: z[d1..].to_vec() }
            }
        };
        values.push(product_residual(kind, &gate.apply(&embed_product(&datum)?))?);
    }
    let mean = values.iter().sum::<f64>() / samples as f64;
    let mut sorted = values;
    sorted.sort_by(f64::total_cmp);
    let quantile = |q: f64| sorted[((q * samples as f64).ceil() as usize).clamp(1, samples) - 1];
    Ok(EntanglementProfile {
        kind,
        samples,
        seed,
        min: sorted[0],
        mean,
        max: sorted[samples - 1],
        quantiles: [0.01, 0.05, 0.25, 0.5, 0.75, 0.95].iter().map(|&q| (q, quantile(q))).collect(),
        residual_convention: RESIDUAL_CONVENTION.to_string(),
    })
}
