//! Seeded, splittable random number generation and small-integer matrix
//! sampling. SplitMix64 is tiny, platform-independent and more than random
//! enough for generic-position sampling; exact arithmetic does the rest.

use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform-ish integer in [lo, hi]; bias is irrelevant here, determinism
    /// is what matters.
    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        let span = (hi - lo + 1) as u64;
        lo + (self.next_u64() % span) as i64
    }
}

/// Derives an independent stream for trial `index` of a run seeded by `seed`.
/// Logged with each trial so any counterexample replays standalone.
pub fn subseed(seed: u64, index: u64) -> u64 {
    let mut s = SplitMix64::new(seed ^ index.wrapping_mul(0xA076_1D64_78BD_642F));
    s.next_u64()
}

/// Matrix with integer entries drawn uniformly from [-bound, bound],
/// embedded in Q(zeta_{field_order}).
pub fn random_matrix(
    rng: &mut SplitMix64,
    rows: usize,
    cols: usize,
    bound: i64,
    field_order: u32,
) -> Matrix<Scalar> {
    let _ = field_order; // entries are rational; they promote on demand
    Matrix::from_fn(rows, cols, |_, _| Scalar::from_int(rng.int_in(-bound, bound)))
}

/// Random invertible matrix, retrying until the determinant is nonzero.
pub fn random_invertible(rng: &mut SplitMix64, n: usize, bound: i64) -> Matrix<Scalar> {
    loop {
        let m = random_matrix(rng, n, n, bound, 1);
        if m.is_invertible() {
            return m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinism() {
        let mut a = SplitMix64::new(42);
        let mut b = SplitMix64::new(42);
        for _ in 0..10 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        assert_eq!(subseed(7, 3), subseed(7, 3));
        assert_ne!(subseed(7, 3), subseed(7, 4));
    }

    #[test]
    fn bounded_entries() {
        let mut rng = SplitMix64::new(1);
        let m = random_matrix(&mut rng, 4, 4, 3, 1);
        for e in &m.entries {
            let r = e.as_rat().unwrap();
            assert!(r.denom() == &num_bigint::BigInt::from(1));
            assert!(r.numer().magnitude() <= &4u32.into());
        }
    }
}
