//! Residual systems for the product-state searches and the E1/E2 checks.
//!
//! Rank-one conditions are expressed through all `2×2` minors of the
//! relevant matricization (their squared sum is `e₂(σ²)`), decomposability
//! through the Grassmann–Plücker relations, and rank-two conditions through
//! all `3×3` minors. Unlike singular-value ratios these stay accurate in
//! floating point right down to the variety.

#![allow(clippy::needless_range_loop)]

use super::optimizer::{Manifold, ResidualSystem};
use crate::constructions::{e1_terms, spanning_vector};
use crate::linalg::{self, CMatrix, C64, ZERO};
use crate::subspace::{self, pairs, sym_dim, sym_index, sym_matricize, AntiVector, SymVector};
use crate::varieties::sigma_ratio;

const SQRT2: f64 = std::f64::consts::SQRT_2;

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// All `k×k` minors (`k` = 2 or 3) of `m`, with derivatives along each `dm`.
fn minors(m: &CMatrix, dms: &[CMatrix], k: usize, jac: Option<&mut CMatrix>) -> Vec<C64> {
    let rows = combinations(m.nrows(), k);
    let cols = combinations(m.ncols(), k);
    let count = rows.len() * cols.len();
    let mut out = Vec::with_capacity(count);
    let mut jac = jac;
    if let Some(j) = jac.as_deref_mut() {
        *j = CMatrix::zeros(count, dms.len());
    }
    let mut s = [[ZERO; 3]; 3];
    let mut cof = [[ZERO; 3]; 3];
    for r in &rows {
        for c in &cols {
            for a in 0..k {
                for b in 0..k {
                    s[a][b] = m[(r[a], c[b])];
                }
            }
            let det = if k == 2 {
                cof = [[s[1][1], -s[1][0], ZERO], [-s[0][1], s[0][0], ZERO], [ZERO; 3]];
                s[0][0] * s[1][1] - s[0][1] * s[1][0]
            } else {
                for a in 0..3 {
                    for b in 0..3 {
                        let (a1, a2) = ((a + 1) % 3, (a + 2) % 3);
                        let (b1, b2) = ((b + 1) % 3, (b + 2) % 3);
                        cof[a][b] = s[a1][b1] * s[a2][b2] - s[a1][b2] * s[a2][b1];
                    }
                }
                s[0][0] * cof[0][0] + s[0][1] * cof[0][1] + s[0][2] * cof[0][2]
            };
            if let Some(j) = jac.as_deref_mut() {
                let row = out.len();
                for (p, dm) in dms.iter().enumerate() {
                    let mut acc = ZERO;
                    for a in 0..k {
                        for b in 0..k {
                            acc += cof[a][b] * dm[(r[a], c[b])];
                        }
                    }
                    j[(row, p)] = acc;
                }
            }
            out.push(det);
        }
    }
    out
}

/// `f(α) = ‖2×2 minors of mat(U · (α⊗α))‖²` on the unit sphere of `C^d`.
pub struct BosonicSystem<'a> {
    pub u: &'a CMatrix,
    pub d: usize,
}

impl BosonicSystem<'_> {
    pub fn image(&self, alpha: &[C64]) -> SymVector {
        let x = subspace::sym_embed_raw(alpha);
        SymVector::new(self.d, linalg::mat_vec(self.u, x.coords())).expect("gate shape checked")
    }
}

impl ResidualSystem for BosonicSystem<'_> {
    fn manifold(&self) -> Manifold {
        Manifold::Sphere { n: self.d }
    }

    fn residuals(&self, z: &[C64], jac: Option<&mut CMatrix>) -> Vec<C64> {
        let m = sym_matricize(&self.image(z));
        let Some(jac) = jac else {
            return minors(&m, &[], 2, None);
        };
        let d = self.d;
        let n = sym_dim(d);
        let dms: Vec<CMatrix> = (0..d)
            .map(|p| {
                // ∂(α⊗α)/∂α_p has 2α_p on |pp⟩ and √2 α_j on each pair {p, j}
                let mut dx = vec![ZERO; n];
                let mut add_col = |col: usize, w: C64| {
                    for (i, v) in dx.iter_mut().enumerate() {
                        *v += self.u[(i, col)] * w;
                    }
                };
                add_col(p, z[p] * 2.0);
                for j in 0..d {
                    if j != p {
                        add_col(sym_index(p + 1, j + 1, d).expect("in range"), z[j] * SQRT2);
                    }
                }
                sym_matricize(&SymVector::new(d, dx).expect("length"))
            })
            .collect();
        minors(&m, &dms, 2, Some(jac))
    }

    fn score(&self, z: &[C64]) -> f64 {
        sigma_ratio(&linalg::singular_values(&sym_matricize(&self.image(z))), 1)
    }
}

/// `f(α, β) = ‖Plücker relations of U · (α∧β)‖²` over orthonormal pairs.
pub struct FermionicSystem<'a> {
    u: &'a CMatrix,
    d: usize,
    quads: Vec<[usize; 6]>,
}

impl<'a> FermionicSystem<'a> {
    pub fn new(u: &'a CMatrix, d: usize) -> Self {
        let idx = |i, j| subspace::anti_index(i + 1, j + 1, d).expect("i < j");
        let quads = combinations(d, 4)
            .into_iter()
            .map(|q| {
                let [i, j, k, l] = [q[0], q[1], q[2], q[3]];
                [idx(i, j), idx(k, l), idx(i, k), idx(j, l), idx(i, l), idx(j, k)]
            })
            .collect();
        Self { u, d, quads }
    }

    pub fn image(&self, z: &[C64]) -> AntiVector {
        let (a, b) = z.split_at(self.d);
        let w = subspace::wedge_raw(a, b);
        AntiVector::new(self.d, linalg::mat_vec(self.u, w.coords())).expect("gate shape checked")
    }

    fn relations(&self, p: &[C64]) -> Vec<C64> {
        self.quads.iter().map(|q| p[q[0]] * p[q[1]] - p[q[2]] * p[q[3]] + p[q[4]] * p[q[5]]).collect()
    }
}

impl ResidualSystem for FermionicSystem<'_> {
    fn manifold(&self) -> Manifold {
        Manifold::OrthonormalPair { d: self.d }
    }

    fn residuals(&self, z: &[C64], jac: Option<&mut CMatrix>) -> Vec<C64> {
        let p = self.image(z).into_coords();
        let r = self.relations(&p);
        let Some(jac) = jac else {
            return r;
        };
        let d = self.d;
        let n = p.len();
        let (a, b) = z.split_at(d);
        let pair_list = pairs(d);
        *jac = CMatrix::zeros(r.len(), 2 * d);
        for col in 0..2 * d {
            // ∂w_ij: along α_m gives δ_im β_j - δ_jm β_i, along β_m gives α_i δ_jm - α_j δ_im
            let mut dp = vec![ZERO; n];
            for (k, &(i, j)) in pair_list.iter().enumerate() {
                let dw = if col < d {
                    let m = col;
                    (if i == m { b[j] } else { ZERO }) - (if j == m { b[i] } else { ZERO })
                } else {
                    let m = col - d;
                    (if j == m { a[i] } else { ZERO }) - (if i == m { a[j] } else { ZERO })
                };
                if dw != ZERO {
                    for (row, v) in dp.iter_mut().enumerate() {
                        *v += self.u[(row, k)] * dw;
                    }
                }
            }
            for (row, q) in self.quads.iter().enumerate() {
                jac[(row, col)] = dp[q[0]] * p[q[1]] + p[q[0]] * dp[q[1]] - dp[q[2]] * p[q[3]] - p[q[2]] * dp[q[3]]
                    + dp[q[4]] * p[q[5]]
                    + p[q[4]] * dp[q[5]];
            }
        }
        r
    }

    fn score(&self, z: &[C64]) -> f64 {
        if self.d <= 3 {
            return 0.0;
        }
        sigma_ratio(&linalg::singular_values(&subspace::anti_matricize(&self.image(z))), 2)
    }
}

/// `f(v1, v2) = ‖2×2 minors of mat(U · (v1⊗v2))‖²` over pairs of unit vectors.
pub struct DistinguishableSystem<'a> {
    pub u: &'a CMatrix,
    pub d1: usize,
    pub d2: usize,
}

impl DistinguishableSystem<'_> {
    pub fn image(&self, z: &[C64]) -> Vec<C64> {
        let (v1, v2) = z.split_at(self.d1);
        linalg::mat_vec(self.u, &subspace::kron(v1, v2))
    }

    fn matricize(&self, x: &[C64]) -> CMatrix {
        CMatrix::from_fn(self.d1, self.d2, |i, j| x[i * self.d2 + j])
    }
}

impl ResidualSystem for DistinguishableSystem<'_> {
    fn manifold(&self) -> Manifold {
        Manifold::SpherePair { d1: self.d1, d2: self.d2 }
    }

    fn residuals(&self, z: &[C64], jac: Option<&mut CMatrix>) -> Vec<C64> {
        let m = self.matricize(&self.image(z));
        let Some(jac) = jac else {
            return minors(&m, &[], 2, None);
        };
        let (v1, v2) = z.split_at(self.d1);
        let mut dms = Vec::with_capacity(self.d1 + self.d2);
        for p in 0..self.d1 + self.d2 {
            let mut e1 = vec![ZERO; self.d1];
            let mut e2 = vec![ZERO; self.d2];
            let input = if p < self.d1 {
                e1[p] = linalg::ONE;
                subspace::kron(&e1, v2)
            } else {
                e2[p - self.d1] = linalg::ONE;
                subspace::kron(v1, &e2)
            };
            dms.push(self.matricize(&linalg::mat_vec(self.u, &input)));
        }
        minors(&m, &dms, 2, Some(jac))
    }

    fn score(&self, z: &[C64]) -> f64 {
        sigma_ratio(&linalg::singular_values(&self.matricize(&self.image(z))), 1)
    }
}

/// Residuals `a_i² + 2 a_{i+1} a_{i+2}` of system E1 on the unit sphere.
pub struct E1System {
    pub d: usize,
}

impl ResidualSystem for E1System {
    fn manifold(&self) -> Manifold {
        Manifold::Sphere { n: self.d }
    }

    fn residuals(&self, z: &[C64], jac: Option<&mut CMatrix>) -> Vec<C64> {
        let d = self.d;
        if let Some(j) = jac {
            *j = CMatrix::zeros(d, d);
            for i in 0..d {
                let (i1, i2) = ((i + 1) % d, (i + 2) % d);
                j[(i, i)] += z[i] * 2.0;
                j[(i, i1)] += z[i2] * 2.0;
                j[(i, i2)] += z[i1] * 2.0;
            }
        }
        e1_terms(z)
    }

    fn score(&self, z: &[C64]) -> f64 {
        self.objective(z)
    }
}

/// `3×3` minors of `Σ c_i mat(s_i)` over unit `c`; zero iff that state has rank ≤ 2.
pub struct E2System {
    d: usize,
    basis: Vec<CMatrix>,
}

impl E2System {
    pub fn new(d: usize) -> Self {
        Self { d, basis: (0..d).map(|i| sym_matricize(&spanning_vector(i, d))).collect() }
    }

    pub fn combination(&self, c: &[C64]) -> CMatrix {
        let mut m = CMatrix::zeros(self.d, self.d);
        for (ci, b) in c.iter().zip(&self.basis) {
            m += b * *ci;
        }
        m
    }
}

impl ResidualSystem for E2System {
    fn manifold(&self) -> Manifold {
        Manifold::Sphere { n: self.d }
    }

    fn residuals(&self, z: &[C64], jac: Option<&mut CMatrix>) -> Vec<C64> {
        let m = self.combination(z);
        match jac {
            Some(j) => minors(&m, &self.basis, 3, Some(j)),
            None => minors(&m, &[], 3, None),
        }
    }

    fn score(&self, z: &[C64]) -> f64 {
        sigma_ratio(&linalg::singular_values(&self.combination(z)), 2)
    }
}
