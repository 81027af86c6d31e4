//! Coordinates for two identical particles.
//!
//! A symmetric (bosonic) state on `C^d ⊗ C^d` is stored as `d(d+1)/2`
//! coordinates over the orthonormal basis `|ii⟩` followed by
//! `(|ij⟩ + |ji⟩)/√2` for `i < j` in lexicographic order. An antisymmetric
//! (fermionic) state is stored as `d(d-1)/2` Plücker coordinates `p_ij`,
//! `i < j`, over the unit Slater basis `|i⟩∧|j⟩`. In both cases the
//! coordinate 2-norm is the Hilbert-space norm.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, ZERO};

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Relative tolerance below which a wedge product counts as zero.
pub const DEPENDENCE_TOL: f64 = 1e-12;

pub fn sym_dim(d: usize) -> usize {
    d * (d + 1) / 2
}

pub fn anti_dim(d: usize) -> usize {
    d * d.saturating_sub(1) / 2
}

/// Lexicographic rank of the pair `i < j` (zero-based) among all pairs of `0..d`.
fn pair_rank(i: usize, j: usize, d: usize) -> usize {
    debug_assert!(i < j && j < d);
    i * (2 * d - i - 1) / 2 + (j - i - 1)
}

/// Zero-based position of the one-based index pair `(i, j)` in a [`SymVector`].
pub fn sym_index(i: usize, j: usize, d: usize) -> Result<usize> {
    if i == 0 || j == 0 || i > d || j > d {
        return Err(Error::IndexOutOfRange { i, j, d });
    }
    let (a, b) = if i <= j { (i - 1, j - 1) } else { (j - 1, i - 1) };
    Ok(if a == b { a } else { d + pair_rank(a, b, d) })
}

/// Zero-based position of the one-based pair `i < j` in an [`AntiVector`].
pub fn anti_index(i: usize, j: usize, d: usize) -> Result<usize> {
    if i == 0 || j == 0 || i > d || j > d || i >= j {
        return Err(Error::IndexOutOfRange { i, j, d });
    }
    Ok(pair_rank(i - 1, j - 1, d))
}

/// All zero-based pairs `i < j` of `0..d` in coordinate order.
pub fn pairs(d: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(anti_dim(d));
    for i in 0..d {
        for j in (i + 1)..d {
            out.push((i, j));
        }
    }
    out
}

/// A one-particle vector in `C^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleParticleVector {
    amplitudes: Vec<C64>,
}

impl SingleParticleVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidDimension("single-particle dimension must be at least 1".into()));
        }
        Ok(Self { amplitudes })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Standard basis vector `e_k` (one-based `k`).
    pub fn basis(k: usize, d: usize) -> Result<Self> {
        if k == 0 || k > d {
            return Err(Error::IndexOutOfRange { i: k, j: k, d });
        }
        let mut amps = vec![ZERO; d];
        amps[k - 1] = C64::new(1.0, 0.0);
        Self::new(amps)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.amplitudes)
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroVector("cannot normalize the zero vector"));
        }
        Ok(Self { amplitudes: self.amplitudes.iter().map(|z| z / n).collect() })
    }
}

/// Coordinates of a state in the symmetric subspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymVector {
    dim: usize,
    coords: Vec<C64>,
}

impl SymVector {
    pub fn new(dim: usize, coords: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension("d must be at least 1".into()));
        }
        if coords.len() != sym_dim(dim) {
            return Err(Error::Length { expected: sym_dim(dim), got: coords.len() });
        }
        Ok(Self { dim, coords })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, coords: vec![ZERO; sym_dim(dim)] }
    }

    /// Unit coordinate on the basis element for one-based `(i, j)`.
    pub fn unit(i: usize, j: usize, dim: usize) -> Result<Self> {
        let mut v = Self::zeros(dim);
        v.coords[sym_index(i, j, dim)?] = C64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[C64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<C64> {
        self.coords
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.coords)
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self { dim: self.dim, coords: self.coords.iter().map(|z| z * c).collect() }
    }
}

/// Plücker coordinates of a state in the antisymmetric subspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AntiVector {
    dim: usize,
    coords: Vec<C64>,
}

impl AntiVector {
    pub fn new(dim: usize, coords: Vec<C64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension("antisymmetric subspace needs d >= 2".into()));
        }
        if coords.len() != anti_dim(dim) {
            return Err(Error::Length { expected: anti_dim(dim), got: coords.len() });
        }
        Ok(Self { dim, coords })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, coords: vec![ZERO; anti_dim(dim)] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[C64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<C64> {
        self.coords
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.coords)
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self { dim: self.dim, coords: self.coords.iter().map(|z| z * c).collect() }
    }

    /// Coordinate `p_ij` for zero-based indices, antisymmetric in `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> C64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.coords[pair_rank(i, j, self.dim)],
            std::cmp::Ordering::Greater => -self.coords[pair_rank(j, i, self.dim)],
            std::cmp::Ordering::Equal => ZERO,
        }
    }

    pub fn add_scaled(&mut self, c: C64, other: &AntiVector) {
        for (a, b) in self.coords.iter_mut().zip(&other.coords) {
            *a += c * b;
        }
    }
}

/// Veronese coordinates of the coherent state `α ⊗ α`.
///
/// Diagonal coordinates are `a_i²` and pair coordinates `√2 a_i a_j`, so the
/// output norm is `‖α‖²`.
pub fn sym_embed(alpha: &SingleParticleVector) -> Result<SymVector> {
    if alpha.norm() == 0.0 {
        return Err(Error::ZeroVector("sym_embed of the zero vector"));
    }
    Ok(sym_embed_raw(alpha.amplitudes()))
}

pub(crate) fn sym_embed_raw(a: &[C64]) -> SymVector {
    let d = a.len();
    let mut coords = Vec::with_capacity(sym_dim(d));
    coords.extend(a.iter().map(|x| x * x));
    for (i, j) in pairs(d) {
        coords.push(a[i] * a[j] * SQRT2);
    }
    SymVector { dim: d, coords }
}

/// Plücker coordinates `p_ij = a_i b_j - a_j b_i` of the Slater determinant `α ∧ β`.
pub fn wedge_embed(alpha: &SingleParticleVector, beta: &SingleParticleVector) -> Result<AntiVector> {
    if alpha.dim() != beta.dim() {
        return Err(Error::DimensionMismatch(format!("wedge of vectors in C^{} and C^{}", alpha.dim(), beta.dim())));
    }
    if alpha.dim() < 2 {
        return Err(Error::InvalidDimension("antisymmetric subspace needs d >= 2".into()));
    }
    let p = wedge_raw(alpha.amplitudes(), beta.amplitudes());
    if p.norm() <= DEPENDENCE_TOL * alpha.norm() * beta.norm() {
        return Err(Error::ZeroVector("wedge of linearly dependent vectors"));
    }
    Ok(p)
}

pub(crate) fn wedge_raw(a: &[C64], b: &[C64]) -> AntiVector {
    let d = a.len();
    let coords = pairs(d).into_iter().map(|(i, j)| a[i] * b[j] - a[j] * b[i]).collect();
    AntiVector { dim: d, coords }
}

/// Symmetric `d×d` coefficient matrix of `x`, with Frobenius norm `‖x‖`.
pub fn sym_matricize(x: &SymVector) -> CMatrix {
    let d = x.dim;
    let mut m = CMatrix::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = x.coords[i];
    }
    for (k, (i, j)) in pairs(d).into_iter().enumerate() {
        let v = x.coords[d + k] / SQRT2;
        m[(i, j)] = v;
        m[(j, i)] = v;
    }
    m
}

/// Inverse of [`sym_matricize`]; the input is symmetrized first.
pub fn sym_vectorize(m: &CMatrix) -> Result<SymVector> {
    let d = m.nrows();
    if m.ncols() != d || d == 0 {
        return Err(Error::DimensionMismatch(format!("expected a square matrix, got {}x{}", m.nrows(), m.ncols())));
    }
    let mut coords: Vec<C64> = (0..d).map(|i| m[(i, i)]).collect();
    for (i, j) in pairs(d) {
        coords.push((m[(i, j)] + m[(j, i)]) / SQRT2);
    }
    Ok(SymVector { dim: d, coords })
}

/// Antisymmetric `d×d` matrix with `A_ij = p_ij/√2 = -A_ji`.
pub fn anti_matricize(p: &AntiVector) -> CMatrix {
    let d = p.dim;
    let mut m = CMatrix::zeros(d, d);
    for (k, (i, j)) in pairs(d).into_iter().enumerate() {
        let v = p.coords[k] / SQRT2;
        m[(i, j)] = v;
        m[(j, i)] = -v;
    }
    m
}

/// Inverse of [`anti_matricize`]; the input is antisymmetrized first.
pub fn anti_vectorize(m: &CMatrix) -> Result<AntiVector> {
    let d = m.nrows();
    if m.ncols() != d || d < 2 {
        return Err(Error::DimensionMismatch(format!("expected a square matrix, got {}x{}", m.nrows(), m.ncols())));
    }
    let coords = pairs(d).into_iter().map(|(i, j)| (m[(i, j)] - m[(j, i)]) / SQRT2).collect();
    Ok(AntiVector { dim: d, coords })
}

/// Default relative rank tolerance.
pub const RANK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymRankData {
    pub rank: usize,
    pub singular_values: Vec<f64>,
}

/// Symmetric rank of `x`, computed as the matrix rank of its matricization.
///
/// Singular values count toward the rank when they exceed `tol` times the
/// largest one.
pub fn sym_rank(x: &SymVector, tol: f64) -> Result<SymRankData> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("rank tolerance must be positive, got {tol}")));
    }
    let singular_values = linalg::singular_values(&sym_matricize(x));
    let top = singular_values.first().copied().unwrap_or(0.0);
    let rank = if top == 0.0 { 0 } else { singular_values.iter().filter(|&&s| s > tol * top).count() };
    Ok(SymRankData { rank, singular_values })
}

/// `Σ λ_i α_i ∧ β_i` with orthonormal factors and nonincreasing `λ_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlaterDecomposition {
    pub coefficients: Vec<f64>,
    pub pairs: Vec<(Vec<C64>, Vec<C64>)>,
}

impl SlaterDecomposition {
    /// Number of coefficients above `tol` times the largest.
    pub fn rank(&self, tol: f64) -> usize {
        let top = self.coefficients.first().copied().unwrap_or(0.0);
        self.coefficients.iter().filter(|&&c| c > tol * top).count()
    }

    pub fn reconstruct(&self, d: usize) -> AntiVector {
        let mut out = AntiVector::zeros(d);
        for (lambda, (a, b)) in self.coefficients.iter().zip(&self.pairs) {
            out.add_scaled(C64::new(*lambda, 0.0), &wedge_raw(a, b));
        }
        out
    }
}

fn orthogonalize_against(v: &mut [C64], basis: &[&[C64]]) {
    for b in basis {
        let c = linalg::inner(b, v);
        for (x, y) in v.iter_mut().zip(b.iter()) {
            *x -= c * y;
        }
    }
}

fn normalize_in_place(v: &mut [C64]) -> f64 {
    let n = linalg::norm(v);
    if n > 0.0 {
        v.iter_mut().for_each(|z| *z /= n);
    }
    n
}

/// Block canonical form of an antisymmetric state under unitary congruence.
///
/// Repeatedly takes a top left singular vector `α` of the antisymmetric
/// matricization `A`, pairs it with `β = conj(A^† α)/σ` and deflates the
/// resulting `2×2` block. Pairs within degenerate coefficient blocks are
/// not unique.
pub fn slater_decompose(p: &AntiVector) -> Result<SlaterDecomposition> {
    let d = p.dim;
    let total = p.norm();
    if total == 0.0 {
        return Err(Error::ZeroVector("Slater decomposition of the zero vector"));
    }
    let mut rest = p.clone();
    let mut coefficients = Vec::new();
    let mut factors: Vec<(Vec<C64>, Vec<C64>)> = Vec::new();
    for _ in 0..d / 2 {
        if rest.norm() <= 1e-14 * total {
            break;
        }
        let a = anti_matricize(&rest);
        let (u, s, _) = linalg::svd_sorted(&a);
        let sigma = s[0];
        let mut alpha: Vec<C64> = u.column(0).iter().copied().collect();
        let mut beta: Vec<C64> = (a.adjoint() * u.column(0)).iter().map(|z| z.conj() / sigma).collect();
        {
            let prev: Vec<&[C64]> = factors.iter().flat_map(|(x, y)| [x.as_slice(), y.as_slice()]).collect();
            orthogonalize_against(&mut alpha, &prev);
            normalize_in_place(&mut alpha);
            orthogonalize_against(&mut beta, &prev);
            orthogonalize_against(&mut beta, &[&alpha]);
            if normalize_in_place(&mut beta) == 0.0 {
                break;
            }
        }
        let block = wedge_raw(&alpha, &beta);
        let c = linalg::inner(block.coords(), rest.coords());
        let lambda = c.norm();
        if lambda == 0.0 {
            break;
        }
        let phase = c / lambda;
        beta.iter_mut().for_each(|z| *z *= phase);
        rest.add_scaled(-c, &block);
        coefficients.push(lambda);
        factors.push((alpha, beta));
    }
    let mut order: Vec<usize> = (0..coefficients.len()).collect();
    order.sort_by(|&x, &y| coefficients[y].total_cmp(&coefficients[x]));
    Ok(SlaterDecomposition {
        coefficients: order.iter().map(|&k| coefficients[k]).collect(),
        pairs: order.iter().map(|&k| factors[k].clone()).collect(),
    })
}

/// `z = Σ σ_k u_k ⊗ w_k` for a state on `C^{d1} ⊗ C^{d2}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    pub left: Vec<Vec<C64>>,
    pub right: Vec<Vec<C64>>,
}

impl SchmidtDecomposition {
    pub fn reconstruct(&self) -> Vec<C64> {
        let d1 = self.left.first().map_or(0, Vec::len);
        let d2 = self.right.first().map_or(0, Vec::len);
        let mut z = vec![ZERO; d1 * d2];
        for ((s, u), w) in self.coefficients.iter().zip(&self.left).zip(&self.right) {
            for i in 0..d1 {
                for j in 0..d2 {
                    z[i * d2 + j] += u[i] * w[j] * *s;
                }
            }
        }
        z
    }

    pub fn rank(&self, tol: f64) -> usize {
        let top = self.coefficients.first().copied().unwrap_or(0.0);
        self.coefficients.iter().filter(|&&c| c > tol * top).count()
    }
}

/// Row-major `d1×d2` matricization of a bipartite vector (`z[i*d2 + j]`).
pub fn bipartite_matricize(z: &[C64], d1: usize, d2: usize) -> Result<CMatrix> {
    if d1 == 0 || d2 == 0 {
        return Err(Error::InvalidDimension("local dimensions must be at least 1".into()));
    }
    if z.len() != d1 * d2 {
        return Err(Error::Length { expected: d1 * d2, got: z.len() });
    }
    Ok(CMatrix::from_fn(d1, d2, |i, j| z[i * d2 + j]))
}

pub fn schmidt_decompose(z: &[C64], d1: usize, d2: usize) -> Result<SchmidtDecomposition> {
    let m = bipartite_matricize(z, d1, d2)?;
    if linalg::norm(z) == 0.0 {
        return Err(Error::ZeroVector("Schmidt decomposition of the zero vector"));
    }
    let (u, s, vt) = linalg::svd_sorted(&m);
    Ok(SchmidtDecomposition {
        left: (0..s.len()).map(|k| u.column(k).iter().copied().collect()).collect(),
        right: (0..s.len()).map(|k| vt.row(k).iter().copied().collect()).collect(),
        coefficients: s,
    })
}

/// `v1 ⊗ v2` in row-major order.
pub fn kron(v1: &[C64], v2: &[C64]) -> Vec<C64> {
    v1.iter().flat_map(|a| v2.iter().map(move |b| a * b)).collect()
}
