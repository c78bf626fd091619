//! Deterministic search families: vector pools, set families and sign families.

use crate::basis::combin::for_each_combination;
use crate::core::{IndexSet, SignPattern, SpVec};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Search budget for constant estimation; fully deterministic given `seed`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestFamily {
    /// Dimension cap `d`: all searches live on indices `1..=d`.
    pub dim: usize,
    /// Coefficient grid (positive levels).
    pub levels: Vec<f64>,
    /// Sign patterns are exhaustive on sets of at most this size.
    pub sign_cap: usize,
    /// Random sign patterns per set beyond `sign_cap`.
    pub sign_samples: usize,
    /// Random vectors added to the structured pool.
    pub random_draws: usize,
    pub seed: u64,
    /// Single-set family is exhaustive when `dim ≤ set_cap`.
    pub set_cap: usize,
    /// Nested (pair) family is exhaustive when `dim ≤ pair_cap`.
    pub pair_cap: usize,
    /// Size of the sampled nested family otherwise.
    pub nested_sets: usize,
    /// Random sign patterns per set in nested searches.
    pub nested_signs: usize,
    /// Length of the carrier block used for `Γ` and `C_ql`.
    pub carrier_len: usize,
}

impl TestFamily {
    pub fn new(dim: usize) -> Self {
        Self {
            dim: dim.max(1),
            levels: vec![1.0, 1.1, 2.0, 4.0],
            sign_cap: 12,
            sign_samples: 1000,
            random_draws: 64,
            seed: 7,
            set_cap: 12,
            pair_cap: 8,
            nested_sets: 150,
            nested_signs: 4,
            carrier_len: dim.max(1),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_random_draws(mut self, n: usize) -> Self {
        self.random_draws = n;
        self
    }

    pub fn with_sign_samples(mut self, n: usize) -> Self {
        self.sign_samples = n;
        self
    }

    /// One-line budget descriptor stored with every estimate.
    pub fn descriptor(&self) -> String {
        format!(
            "dim={} levels={:?} sign_cap={} sign_samples={} random={} seed={} set_cap={} pair_cap={} nested_sets={} nested_signs={}",
            self.dim,
            self.levels,
            self.sign_cap,
            self.sign_samples,
            self.random_draws,
            self.seed,
            self.set_cap,
            self.pair_cap,
            self.nested_sets,
            self.nested_signs
        )
    }

    pub(crate) fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    /// Structured vectors followed by seeded random draws, all supported in `1..=dim`.
    pub fn vector_pool(&self) -> Vec<SpVec<f64>> {
        let d = self.dim;
        let mut pool = vec![SpVec::from_dense(&[1.0])];
        if d > 1 {
            pool.push(SpVec::from_pairs([(d, 1.0)]).expect("valid"));
        }
        for k in 2..=d {
            let set: IndexSet = (1..=k).collect();
            pool.push(SpVec::indicator(&set, None));
            pool.push(SpVec::indicator(&set, Some(&SignPattern::alternating(&set))));
        }
        let dense = |f: &dyn Fn(usize) -> f64| SpVec::from_dense(&(1..=d).map(f).collect::<Vec<_>>());
        pool.push(dense(&|n| 1.0 / n as f64));
        pool.push(dense(&|n| (n as f64).powf(-0.5)));
        pool.push(dense(&|n| 0.5f64.powi(n as i32 - 1)));
        pool.push(dense(&|n| n as f64 / d as f64));
        pool.push(dense(&|n| if n % 2 == 1 { 1.0 / n as f64 } else { -1.0 / n as f64 }));
        pool.push(dense(&|n| if n <= d.div_ceil(2) { 2.0 } else { 1.0 }));
        let mut rng = self.rng(1);
        for i in 0..self.random_draws {
            let coeffs: Vec<f64> = (0..d)
                .map(|_| {
                    if !rng.gen_bool(0.75) {
                        return 0.0;
                    }
                    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    if i % 2 == 0 {
                        sign * self.levels[rng.gen_range(0..self.levels.len())]
                    } else {
                        rng.gen_range(-1.0..1.0)
                    }
                })
                .collect();
            let f = SpVec::from_dense(&coeffs);
            if !f.is_empty() {
                pool.push(f);
            }
        }
        pool
    }

    /// Sets over `1..=dim`: exhaustive when `dim ≤ cap`, else intervals,
    /// parity blocks and `per_size` random sets of each cardinality.
    pub(crate) fn set_family(&self, cap: usize, per_size: usize, salt: u64) -> Vec<IndexSet> {
        let d = self.dim;
        let mut out: Vec<IndexSet> = Vec::new();
        if d <= cap {
            for k in 1..=d {
                for_each_combination(d, k, |c| out.push(c.iter().map(|i| i + 1).collect()));
            }
            return out;
        }
        for i in 1..=d {
            for j in i..=d {
                out.push((i..=j).collect());
            }
        }
        out.push((1..=d).step_by(2).collect());
        out.push((2..=d).step_by(2).collect());
        let mut rng = self.rng(salt);
        for k in 1..=d {
            for _ in 0..per_size {
                out.push(sample(&mut rng, d, k).into_iter().map(|i| i + 1).collect());
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Family for nested searches (pairs of sets, sets × signs × coefficients).
    pub(crate) fn nested_family(&self) -> Vec<IndexSet> {
        let d = self.dim;
        if d <= self.pair_cap {
            return self.set_family(self.pair_cap, 0, 2);
        }
        let mut out: Vec<IndexSet> = Vec::new();
        let mut len = 1;
        while len <= d {
            for start in (1..=d + 1 - len).step_by(len.max(1)) {
                out.push((start..start + len).collect());
            }
            len *= 2;
        }
        out.push((1..=d).collect());
        out.push((1..=d).step_by(2).collect());
        out.push((2..=d).step_by(2).collect());
        let mut rng = self.rng(3);
        while out.len() < self.nested_sets {
            let k = rng.gen_range(1..=d);
            out.push(sample(&mut rng, d, k).into_iter().map(|i| i + 1).collect());
        }
        out.sort();
        out.dedup();
        out
    }

    /// Sign patterns on `set`: exhaustive up to `sign_cap`, else structured plus
    /// `sign_samples` random patterns.
    pub(crate) fn signs_full(&self, set: &IndexSet, salt: u64) -> Vec<SignPattern> {
        if set.len() <= self.sign_cap {
            return (0..1u64 << set.len()).map(|m| SignPattern::from_mask(set, m)).collect();
        }
        self.signs_sampled(set, self.sign_samples, salt)
    }

    /// Structured patterns plus `extra` random ones (exhaustive if that is smaller).
    pub(crate) fn signs_sampled(&self, set: &IndexSet, extra: usize, salt: u64) -> Vec<SignPattern> {
        if set.len() < 20 && (1usize << set.len()) <= extra + 3 {
            return (0..1u64 << set.len()).map(|m| SignPattern::from_mask(set, m)).collect();
        }
        let mut out = vec![SignPattern::all_plus(set), SignPattern::alternating(set)];
        let k = set.len();
        let block: Vec<(usize, i8)> =
            set.iter().enumerate().map(|(i, &n)| (n, if i < k / 2 { 1 } else { -1 })).collect();
        out.push(SignPattern::new(block).expect("valid signs"));
        let mut rng = self.rng(salt ^ k as u64);
        for _ in 0..extra {
            let pairs: Vec<(usize, i8)> = set.iter().map(|&n| (n, if rng.gen_bool(0.5) { 1 } else { -1 })).collect();
            out.push(SignPattern::new(pairs).expect("valid signs"));
        }
        out
    }
}

/// Bitset over indices `1..=d` for fast disjointness tests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Bits(Vec<u64>);

impl Bits {
    pub(crate) fn of(set: &IndexSet) -> Self {
        let words = set.iter().next_back().map_or(0, |m| m / 64 + 1);
        let mut v = vec![0u64; words];
        for &n in set {
            v[n / 64] |= 1 << (n % 64);
        }
        Self(v)
    }

    pub(crate) fn disjoint(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_are_deterministic() {
        let f = TestFamily::new(16).with_seed(3);
        assert_eq!(f.vector_pool(), f.vector_pool());
        assert_eq!(f.nested_family(), f.nested_family());
        assert_ne!(f.vector_pool(), TestFamily::new(16).with_seed(4).vector_pool());
    }

    #[test]
    fn exhaustive_families_at_small_dimension() {
        let f = TestFamily::new(4);
        assert_eq!(f.set_family(f.set_cap, 0, 0).len(), 15);
        assert_eq!(f.nested_family().len(), 15);
        let a: IndexSet = [1, 2, 3].into_iter().collect();
        assert_eq!(f.signs_full(&a, 0).len(), 8);
    }

    #[test]
    fn bitsets() {
        let a = Bits::of(&[1, 70].into_iter().collect());
        let b = Bits::of(&[2, 3].into_iter().collect());
        let c = Bits::of(&[70].into_iter().collect());
        assert!(a.disjoint(&b));
        assert!(!a.disjoint(&c));
    }
}
