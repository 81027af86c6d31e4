//! Small dense linear-algebra helpers over `Complex64`.

use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64 as C64;

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Hermitian inner product, conjugate-linear in `a`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Relative reconstruction error above which an SVD is recomputed.
const SVD_ACCEPT: f64 = 1e-12;

fn raw_svd(m: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("requested u");
    let v_adj = svd.v_t.expect("requested v_t");
    (u, svd.singular_values.iter().copied().collect(), v_adj)
}

fn reconstruction_error(m: &CMatrix, (u, s, v_adj): &(CMatrix, Vec<f64>, CMatrix)) -> f64 {
    let mut us = u.clone();
    for (k, sk) in s.iter().enumerate() {
        us.column_mut(k).scale_mut(*sk);
    }
    frobenius(&(us * v_adj - m))
}

// Fixed unitary used to rotate inputs on which the bidiagonal QR loses accuracy.
fn dft(n: usize) -> CMatrix {
    let scale = 1.0 / (n as f64).sqrt();
    CMatrix::from_fn(n, n, |j, k| C64::from_polar(scale, 2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64))
}

/// Thin SVD with singular values in nonincreasing order.
///
/// Returns `(u, s, v_adj)` with `m = u * diag(s) * v_adj`. nalgebra's complex
/// SVD occasionally returns an inaccurate factorization for rank-deficient
/// input, so the result is checked and recomputed on `m^†` or a rotated copy.
pub fn svd_sorted(m: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    let tol = SVD_ACCEPT * frobenius(m).max(f64::MIN_POSITIVE);
    let mut best = raw_svd(m);
    let mut err = reconstruction_error(m, &best);
    if err > tol {
        let (u, s, v_adj) = raw_svd(&m.adjoint());
        let cand = (v_adj.adjoint(), s, u.adjoint());
        let e = reconstruction_error(m, &cand);
        if e < err {
            (best, err) = (cand, e);
        }
    }
    if err > tol {
        let f = dft(m.nrows());
        let (u, s, v_adj) = raw_svd(&(&f * m));
        let cand = (f.adjoint() * u, s, v_adj);
        let e = reconstruction_error(m, &cand);
        if e < err {
            best = cand;
        }
    }
    let (u, s, v_adj) = best;
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    let mut u_out = CMatrix::zeros(u.nrows(), order.len());
    let mut v_out = CMatrix::zeros(order.len(), v_adj.ncols());
    let mut s_out = Vec::with_capacity(order.len());
    for (k, &idx) in order.iter().enumerate() {
        u_out.set_column(k, &u.column(idx));
        v_out.set_row(k, &v_adj.row(idx));
        s_out.push(s[idx]);
    }
    (u_out, s_out, v_out)
}

/// Singular values in nonincreasing order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    svd_sorted(m).1
}

/// `max |(U^† U - I)_{ij}|`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let g = u.adjoint() * u;
    let n = g.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((g[(i, j)] - target).norm());
        }
    }
    worst
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn mat_vec(m: &CMatrix, v: &[C64]) -> Vec<C64> {
    let n = m.nrows();
    let mut out = vec![ZERO; n];
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = ZERO;
        for (j, x) in v.iter().enumerate() {
            acc += m[(i, j)] * x;
        }
        *o = acc;
    }
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}
