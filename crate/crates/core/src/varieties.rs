//! Product-state varieties: residual membership tests and dimension counts.
//!
//! Residuals use the sigma-ratio convention: a trailing singular value of
//! the relevant matricization divided by its Frobenius norm. They are
//! scale-free, lie in `[0, 1]`, and vanish exactly on the variety.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, binomial, C64};
use crate::subspace::{anti_matricize, bipartite_matricize, sym_matricize, AntiVector, SymVector};

/// Name of the residual convention, echoed into reports.
pub const RESIDUAL_CONVENTION: &str = "sigma-ratio";

/// Default tolerance for treating a residual as zero.
pub const MEMBERSHIP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "variety", rename_all = "lowercase")]
pub enum VarietyKind {
    /// Coherent states `α⊗α` in the symmetric subspace of `C^d ⊗ C^d`.
    Veronese { d: usize },
    /// Slater determinants `α∧β`, i.e. the Plücker image of `G(2, d)`.
    Grassmannian { d: usize },
    /// Product states of `C^{d1} ⊗ C^{d2}`.
    Segre { d1: usize, d2: usize },
}

impl VarietyKind {
    pub fn validate(self) -> Result<Self> {
        match self {
            VarietyKind::Veronese { d } if d < 1 => Err(Error::InvalidDimension("veronese needs d >= 1".into())),
            VarietyKind::Grassmannian { d } if d < 2 => {
                Err(Error::InvalidDimension("grassmannian needs d >= 2".into()))
            }
            VarietyKind::Segre { d1, d2 } if d1 < 1 || d2 < 1 => {
                Err(Error::InvalidDimension("segre needs d1, d2 >= 1".into()))
            }
            k => Ok(k),
        }
    }

    /// Dimension of the projective space the variety lives in.
    pub fn ambient_dim(self) -> usize {
        match self {
            VarietyKind::Veronese { d } => binomial(d + 1, 2) - 1,
            VarietyKind::Grassmannian { d } => binomial(d, 2) - 1,
            VarietyKind::Segre { d1, d2 } => d1 * d2 - 1,
        }
    }
}

/// Outcome of the dimension-counting test `2 dim V < ambient`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExistencePrediction {
    pub exists: bool,
    pub lhs: usize,
    pub rhs: usize,
    pub inequality_holds: bool,
}

pub fn variety_dim(kind: VarietyKind) -> Result<usize> {
    Ok(match kind.validate()? {
        VarietyKind::Veronese { d } => d - 1,
        VarietyKind::Grassmannian { d } => 2 * (d - 2),
        VarietyKind::Segre { d1, d2 } => d1 + d2 - 2,
    })
}

/// Whether a universal entangler exists for the system whose product states
/// form `kind`.
///
/// A unitary image of the variety must meet the variety whenever twice its
/// dimension reaches the ambient projective dimension.
pub fn dimension_gate(kind: VarietyKind) -> Result<ExistencePrediction> {
    let lhs = 2 * variety_dim(kind)?;
    let rhs = kind.ambient_dim();
    let inequality_holds = lhs >= rhs;
    Ok(ExistencePrediction { exists: !inequality_holds, lhs, rhs, inequality_holds })
}

/// Upper bound on the dimension of the closure of non-entangling gates,
/// paired with the real dimension of the unitary group it sits in.
///
/// Returns `(bound, group_dim)`; `bound < group_dim` exactly when the
/// dimension gate predicts existence.
pub fn closure_dim_bound(kind: VarietyKind) -> Result<(i64, i64)> {
    let (n, dim) = match kind.validate()? {
        VarietyKind::Veronese { d } => (binomial(d + 1, 2) as i64, variety_dim(kind)? as i64),
        VarietyKind::Grassmannian { d } => (binomial(d, 2) as i64, variety_dim(kind)? as i64),
        VarietyKind::Segre { .. } => {
            return Err(Error::InvalidArgument(
                "closure bound is defined for bosonic and fermionic systems only".into(),
            ))
        }
    };
    let group_dim = n * n;
    Ok((group_dim - (n - 1) + 2 * dim, group_dim))
}

/// `σ_k / ‖s‖₂` for sorted singular values `s` (zero-based `k`); zero if `k` is out of range.
pub(crate) fn sigma_ratio(s: &[f64], k: usize) -> f64 {
    let total = s.iter().map(|x| x * x).sum::<f64>().sqrt();
    if total == 0.0 {
        return 0.0;
    }
    s.get(k).map_or(0.0, |x| x / total)
}

/// `σ₂(M)/‖M‖_F` of the symmetric matricization; zero iff `x` is a coherent state.
pub fn veronese_residual(x: &SymVector) -> Result<f64> {
    if x.norm() == 0.0 {
        return Err(Error::ZeroVector("veronese residual of the zero vector"));
    }
    Ok(sigma_ratio(&linalg::singular_values(&sym_matricize(x)), 1))
}

/// `σ₃(A)/‖A‖_F` of the antisymmetric matricization; zero iff `p` is decomposable.
///
/// Every 2-vector is decomposable for `d <= 3`, so those report 0 exactly.
pub fn grassmann_residual(p: &AntiVector) -> Result<f64> {
    if p.norm() == 0.0 {
        return Err(Error::ZeroVector("grassmann residual of the zero vector"));
    }
    if p.dim() <= 3 {
        return Ok(0.0);
    }
    Ok(sigma_ratio(&linalg::singular_values(&anti_matricize(p)), 2))
}

/// Value of the Grassmann–Plücker relation on zero-based `i < j < k < l`.
pub(crate) fn plucker_relation(p: &AntiVector, i: usize, j: usize, k: usize, l: usize) -> C64 {
    p.get(i, j) * p.get(k, l) - p.get(i, k) * p.get(j, l) + p.get(i, l) * p.get(j, k)
}

/// Largest Grassmann–Plücker relation value, normalized by `‖p‖²`.
pub fn plucker_relations_residual(p: &AntiVector) -> Result<f64> {
    let n2 = p.norm().powi(2);
    if n2 == 0.0 {
        return Err(Error::ZeroVector("plucker residual of the zero vector"));
    }
    let d = p.dim();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in (i + 1)..d {
            for k in (j + 1)..d {
                for l in (k + 1)..d {
                    worst = worst.max(plucker_relation(p, i, j, k, l).norm());
                }
            }
        }
    }
    Ok(worst / n2)
}

/// Second Schmidt coefficient over `‖z‖`; zero iff `z` is a product state.
pub fn segre_residual(z: &[C64], d1: usize, d2: usize) -> Result<f64> {
    let m = bipartite_matricize(z, d1, d2)?;
    if linalg::norm(z) == 0.0 {
        return Err(Error::ZeroVector("segre residual of the zero vector"));
    }
    Ok(sigma_ratio(&linalg::singular_values(&m), 1))
}
