//! Seeded sample generators for the per-vector checks.

use crate::core::{IndexSet, SignPattern, SpVec};
use rand::seq::index::sample;
use rand::Rng;

/// Random vector on `1..=dim` with support size in `lo..=hi`; a third of the
/// draws use coarse magnitude levels so that ties occur.
pub(crate) fn random_vector<R: Rng>(rng: &mut R, dim: usize, lo: usize, hi: usize) -> SpVec<f64> {
    let hi = hi.min(dim).max(1);
    let k = rng.gen_range(lo.clamp(1, hi)..=hi);
    let tied = rng.gen_bool(1.0 / 3.0);
    let pairs: Vec<(usize, f64)> = sample(rng, dim, k)
        .into_iter()
        .map(|i| {
            let mag = if tied { [1.0, 0.5, 0.25][rng.gen_range(0..3)] } else { rng.gen_range(0.01..1.0) };
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            (i + 1, sign * mag)
        })
        .collect();
    SpVec::from_pairs(pairs).expect("distinct indices")
}

/// `(1_{ε,A}, f)` with `A` non-empty, `f` supported off `A` and `|f_n| < 1`.
pub(crate) fn indicator_plus_disjoint<R: Rng>(rng: &mut R, dim: usize) -> (SpVec<f64>, SpVec<f64>) {
    let k = rng.gen_range(1..=(dim / 2).max(1));
    let idx = sample(rng, dim, dim);
    let set: IndexSet = idx.iter().take(k).map(|i| i + 1).collect();
    let mask: u64 = rng.gen();
    let ind = SpVec::indicator(&set, Some(&SignPattern::from_mask(&set, mask)));
    let rest: Vec<usize> = idx.iter().skip(k).map(|i| i + 1).collect();
    let m = rng.gen_range(0..=rest.len());
    let pairs: Vec<(usize, f64)> = rest[..m].iter().map(|&n| (n, rng.gen_range(-0.999..0.999))).collect();
    (ind, SpVec::from_pairs(pairs).expect("distinct indices"))
}
