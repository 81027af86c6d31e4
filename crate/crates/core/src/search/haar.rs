//! Haar-distributed unitaries.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::optimizer::random_complex;
use crate::linalg::{CMatrix, C64};

/// QR of a complex Ginibre matrix with the phases of `diag(R)` moved into `Q`,
/// which makes the distribution exactly unitarily invariant.
pub fn haar_from_rng(n: usize, rng: &mut impl Rng) -> CMatrix {
    let g = CMatrix::from_column_slice(n, n, &random_complex(n * n, rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let diag = r[(j, j)];
        let phase = if diag.norm() == 0.0 { C64::new(1.0, 0.0) } else { diag / diag.norm() };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Deterministic Haar sample: the generator is ChaCha8 seeded with `seed`.
pub fn sample_haar_unitary(n: usize, seed: u64) -> CMatrix {
    haar_from_rng(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitarity_defect;

    #[test]
    fn samples_are_unitary_and_reproducible() {
        for n in [1, 2, 6, 15, 28] {
            let u = sample_haar_unitary(n, 99);
            assert!(unitarity_defect(&u) <= 1e-12, "n = {n}");
            assert_eq!(u, sample_haar_unitary(n, 99));
        }
        assert_ne!(sample_haar_unitary(4, 1), sample_haar_unitary(4, 2));
    }

    #[test]
    fn first_entry_weight_averages_one_over_n() {
        // E|u_11|² = 1/n under the Haar measure
        let n = 6;
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let trials = 1000;
        let mean: f64 = (0..trials).map(|_| haar_from_rng(n, &mut rng)[(0, 0)].norm_sqr()).sum::<f64>() / trials as f64;
        assert!((mean * n as f64 - 1.0).abs() < 0.05, "mean {mean}");
    }
}
