//! Multistart projected descent on products of spheres and Stiefel frames.
//!
//! Each objective is the squared norm of a holomorphic residual vector
//! `r(z)`. One restart runs normalized projected-gradient descent with
//! geometric step decay, then a short Levenberg–Marquardt polish restricted
//! to the tangent space. Restart `k` draws its start point from its own
//! generator seeded with [`sub_seed`]`(master, k)`, so results do not depend
//! on how restarts are scheduled.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::SearchConfig;
use crate::linalg::{self, CMatrix, C64, ZERO};

/// Restarts evaluated between early-stop checks.
const CHUNK: usize = 8;

/// SplitMix64 finalizer.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of restart (or trial) `index` under `master`:
/// `splitmix64(master ^ splitmix64(index))`.
pub fn sub_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

/// Constraint set the search variables live on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Manifold {
    /// Unit vectors in `C^n`.
    Sphere { n: usize },
    /// Orthonormal pairs `(α, β)` in `C^d`, stored as `[α, β]`.
    OrthonormalPair { d: usize },
    /// Pairs of unit vectors in `C^{d1}` and `C^{d2}`, stored as `[v1, v2]`.
    SpherePair { d1: usize, d2: usize },
}

pub(crate) fn random_complex(n: usize, rng: &mut impl Rng) -> Vec<C64> {
    (0..n).map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)) / 2f64.sqrt()).collect()
}

fn normalize(v: &mut [C64]) {
    let n = linalg::norm(v);
    if n > 0.0 {
        v.iter_mut().for_each(|z| *z /= n);
    }
}

fn remove_component(v: &mut [C64], q: &[C64]) {
    let c = linalg::inner(q, v);
    v.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
}

impl Manifold {
    pub fn dim(self) -> usize {
        match self {
            Manifold::Sphere { n } => n,
            Manifold::OrthonormalPair { d } => 2 * d,
            Manifold::SpherePair { d1, d2 } => d1 + d2,
        }
    }

    /// Uniformly distributed point (Gaussian vectors, then [`Self::retract`]).
    pub fn random_point(self, rng: &mut impl Rng) -> Vec<C64> {
        let mut z = random_complex(self.dim(), rng);
        self.retract(&mut z);
        z
    }

    pub fn retract(self, z: &mut [C64]) {
        match self {
            Manifold::Sphere { .. } => normalize(z),
            Manifold::OrthonormalPair { d } => {
                let (a, b) = z.split_at_mut(d);
                normalize(a);
                remove_component(b, a);
                normalize(b);
            }
            Manifold::SpherePair { d1, .. } => {
                let (a, b) = z.split_at_mut(d1);
                normalize(a);
                normalize(b);
            }
        }
    }

    /// Removes the directions that only rescale, rephase or (for frames)
    /// mix the factors.
    pub fn project_tangent(self, z: &[C64], v: &mut [C64]) {
        match self {
            Manifold::Sphere { .. } => remove_component(v, z),
            Manifold::OrthonormalPair { d } => {
                let (a, b) = z.split_at(d);
                let (va, vb) = v.split_at_mut(d);
                for part in [va, vb] {
                    remove_component(part, a);
                    remove_component(part, b);
                }
            }
            Manifold::SpherePair { d1, .. } => {
                let (a, b) = z.split_at(d1);
                let (va, vb) = v.split_at_mut(d1);
                remove_component(va, a);
                remove_component(vb, b);
            }
        }
    }
}

/// A holomorphic residual map whose squared norm is minimized.
pub trait ResidualSystem: Sync {
    fn manifold(&self) -> Manifold;

    /// Residuals at `z`; when `jac` is given it is filled with `∂r/∂z`
    /// (one row per residual, one column per complex coordinate).
    fn residuals(&self, z: &[C64], jac: Option<&mut CMatrix>) -> Vec<C64>;

    /// Reported figure of merit at a point on the manifold.
    fn score(&self, z: &[C64]) -> f64;

    fn objective(&self, z: &[C64]) -> f64 {
        linalg::norm_sqr(&self.residuals(z, None))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartOutcome {
    pub index: usize,
    pub point: Vec<C64>,
    pub objective: f64,
    pub score: f64,
    pub iterations: usize,
    pub hit_iter_cap: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultistartOutcome {
    pub restarts: Vec<RestartOutcome>,
    pub best_index: usize,
    pub stopped_early: bool,
}

impl MultistartOutcome {
    pub fn best(&self) -> &RestartOutcome {
        &self.restarts[self.best_index]
    }
}

/// Real-gradient of `‖r‖²` as a complex vector: `2 J^† r`.
fn gradient(jac: &CMatrix, r: &[C64]) -> Vec<C64> {
    (0..jac.ncols())
        .map(|j| {
            let mut acc = ZERO;
            for (k, rk) in r.iter().enumerate() {
                acc += jac[(k, j)].conj() * rk;
            }
            acc * 2.0
        })
        .collect()
}

fn step_along(manifold: Manifold, z: &[C64], dir: &[C64], t: f64) -> Vec<C64> {
    let mut out: Vec<C64> = z.iter().zip(dir).map(|(a, b)| a + b * t).collect();
    manifold.retract(&mut out);
    out
}

/// Gauss–Newton steps with Levenberg damping in the tangent space.
fn polish<S: ResidualSystem + ?Sized>(sys: &S, z: &mut Vec<C64>, f: &mut f64, iters: usize) {
    let manifold = sys.manifold();
    let n = manifold.dim();
    let mut jac = CMatrix::zeros(0, n);
    let mut damping = 1e-3;
    for _ in 0..iters {
        if *f == 0.0 {
            return;
        }
        let r = sys.residuals(z, Some(&mut jac));
        // J P: project the conjugated rows, since P is Hermitian
        let mut row = vec![ZERO; n];
        for k in 0..jac.nrows() {
            for j in 0..n {
                row[j] = jac[(k, j)].conj();
            }
            manifold.project_tangent(z, &mut row);
            for j in 0..n {
                jac[(k, j)] = row[j].conj();
            }
        }
        let jh = jac.adjoint();
        let normal = &jh * &jac;
        let rhs = -(&jh * DMatrix::from_column_slice(r.len(), 1, &r));
        let scale = (0..n).map(|i| normal[(i, i)].re).fold(0.0, f64::max).max(1e-300);
        let mut accepted = false;
        for _ in 0..12 {
            let mut a = normal.clone();
            for i in 0..n {
                a[(i, i)] += C64::new(damping * scale, 0.0);
            }
            let Some(chol) = a.cholesky() else {
                damping *= 10.0;
                continue;
            };
            let delta = chol.solve(&rhs);
            let trial = step_along(manifold, z, delta.as_slice(), 1.0);
            let ft = sys.objective(&trial);
            if ft < *f {
                *z = trial;
                *f = ft;
                damping = (damping / 5.0).max(1e-12);
                accepted = true;
                break;
            }
            damping *= 8.0;
        }
        if !accepted {
            return;
        }
    }
}

/// One restart from the point drawn with `sub_seed(cfg.seed, index)`.
pub fn run_restart<S: ResidualSystem + ?Sized>(sys: &S, cfg: &SearchConfig, index: usize) -> RestartOutcome {
    let manifold = sys.manifold();
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(cfg.seed, index as u64));
    let mut z = manifold.random_point(&mut rng);
    let mut jac = CMatrix::zeros(0, manifold.dim());
    let mut r = sys.residuals(&z, Some(&mut jac));
    let mut f = linalg::norm_sqr(&r);
    let mut g = gradient(&jac, &r);
    manifold.project_tangent(&z, &mut g);
    let mut t = cfg.initial_step;
    let mut iterations = 0;
    while iterations < cfg.max_iters && t >= cfg.min_step && f > 0.0 {
        let gn = linalg::norm(&g);
        if gn == 0.0 {
            break;
        }
        iterations += 1;
        let trial = step_along(manifold, &z, &g, -t / gn);
        let ft = sys.objective(&trial);
        if ft < f {
            z = trial;
            r = sys.residuals(&z, Some(&mut jac));
            f = linalg::norm_sqr(&r);
            g = gradient(&jac, &r);
            manifold.project_tangent(&z, &mut g);
        } else {
            t *= cfg.step_decay;
        }
    }
    let hit_iter_cap = iterations >= cfg.max_iters;
    polish(sys, &mut z, &mut f, cfg.polish_iters);
    let score = sys.score(&z);
    RestartOutcome { index, point: z, objective: f, score, iterations, hit_iter_cap }
}

/// Runs `cfg.restarts` restarts and keeps the lowest score (ties go to the
/// lower restart index).
///
/// With `stop_at_tolerance`, restarts after the first one scoring at or
/// below `cfg.tolerance` are discarded; the kept prefix does not depend on
/// the worker count.
pub fn multistart<S: ResidualSystem + ?Sized>(
    sys: &S,
    cfg: &SearchConfig,
    stop_at_tolerance: bool,
) -> MultistartOutcome {
    let mut restarts: Vec<RestartOutcome> = Vec::with_capacity(cfg.restarts);
    let mut stopped_early = false;
    let mut start = 0;
    while start < cfg.restarts {
        let end = (start + CHUNK).min(cfg.restarts);
        let chunk: Vec<RestartOutcome> = (start..end).into_par_iter().map(|k| run_restart(sys, cfg, k)).collect();
        restarts.extend(chunk);
        if stop_at_tolerance {
            if let Some(pos) = restarts.iter().position(|o| o.score <= cfg.tolerance) {
                stopped_early = pos + 1 < cfg.restarts;
                restarts.truncate(pos + 1);
                break;
            }
        }
        start = end;
    }
    let mut best_index = 0;
    for (k, o) in restarts.iter().enumerate() {
        if o.score < restarts[best_index].score {
            best_index = k;
        }
    }
    MultistartOutcome { restarts, best_index, stopped_early }
}
