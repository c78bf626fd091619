use super::combin::{binomial, binomial_prefix, extreme_over_subsets};
use super::greedy::greedy_order;
use super::BasisModel;
use crate::core::{IndexSet, Scalar, SpVec};
use crate::error::{Error, Result};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Largest number of candidate sets enumerated in exact mode.
pub const EXACT_CAP: u64 = 1_000_000;
const RANDOM_CANDIDATES: usize = 1000;
const DESCENT_SWEEPS: usize = 20;
const REFINED_SETS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SigmaMode {
    /// Exhaustive over all candidate sets (budget-capped).
    Exact,
    /// Greedy, level-aligned and seeded random candidates; an upper bound.
    Heuristic { seed: u64 },
}

/// Value of a best-approximation functional with the approximant attaining it.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaEstimate<T> {
    pub value: T,
    /// The set `B` of the approximant.
    pub set: IndexSet,
    /// `z` with `value = ‖f − z‖`, `supp z ⊆ B`.
    pub approximant: SpVec<T>,
    /// True when `value` is the exact infimum; otherwise an upper bound.
    pub exact: bool,
}

fn zero_error<T: Scalar>(f: &SpVec<T>) -> SigmaEstimate<T> {
    SigmaEstimate { value: T::zero(), set: f.support(), approximant: f.clone(), exact: true }
}

fn to_set(support: &[usize], pick: &[usize]) -> IndexSet {
    pick.iter().map(|&i| support[i]).collect()
}

/// Candidate position-sets (indices into the support list) for heuristic mode:
/// windows of the greedy order and seeded random subsets, sizes `lo..=hi`.
fn heuristic_candidates<T: Scalar>(f: &SpVec<T>, lo: usize, hi: usize, seed: u64) -> Vec<Vec<usize>> {
    let support: Vec<usize> = f.iter().map(|(n, _)| n).collect();
    let pos = |n: usize| support.binary_search(&n).expect("support index");
    let order: Vec<usize> = greedy_order(f).into_iter().map(pos).collect();
    let k = support.len();
    let mut out = Vec::new();
    for j in lo..=hi.min(k) {
        for start in 0..=k - j {
            let mut c: Vec<usize> = order[start..start + j].to_vec();
            c.sort_unstable();
            out.push(c);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = hi.min(k);
    for _ in 0..RANDOM_CANDIDATES {
        let mut c = sample(&mut rng, k, size).into_vec();
        c.sort_unstable();
        out.push(c);
    }
    out.sort();
    out.dedup();
    out
}

fn best_of<T: Scalar>(cands: &[Vec<usize>], score: impl Fn(&[usize]) -> T) -> (T, Vec<usize>) {
    let mut best: Option<(T, Vec<usize>)> = None;
    for c in cands {
        let s = score(c);
        if best.as_ref().map_or(true, |(b, _)| s < *b) {
            best = Some((s, c.clone()));
        }
    }
    best.expect("at least one candidate")
}

/// `σ̃_m(f) = inf { ‖f − S_B f‖ : |B| ≤ m }`.
pub fn sigma_tilde<T: Scalar>(model: &BasisModel<T>, f: &SpVec<T>, m: usize, mode: SigmaMode) -> Result<SigmaEstimate<T>> {
    let k = f.len();
    if m >= k {
        return Ok(zero_error(f));
    }
    let support: Vec<usize> = f.iter().map(|(n, _)| n).collect();
    let score = |c: &[usize]| model.norm(&f.remove_set(&to_set(&support, c)));
    let (value, pick, exact) = match mode {
        SigmaMode::Exact => {
            let count = binomial_prefix(k, m);
            if count > EXACT_CAP {
                return Err(Error::Budget(format!("{count} candidate sets exceed the exact cap {EXACT_CAP}")));
            }
            let (v, c) = extreme_over_subsets(k, 0..=m, false, score).expect("non-empty family");
            (v, c, true)
        }
        SigmaMode::Heuristic { seed } => {
            let (v, c) = best_of(&heuristic_candidates(f, 0, m, seed), score);
            (v, c, false)
        }
    };
    let set = to_set(&support, &pick);
    Ok(SigmaEstimate { value, approximant: f.restrict(&set), set, exact })
}

/// `σ_m(f) = inf { ‖f − Σ_{n∈B} b_n x_n‖ : |B| ≤ m }`.
///
/// Lattice-unconditional models take `b_n = a_n` (exact in exact mode).
/// Other models refine coefficients by coordinate descent from `b = a|_B`
/// on the best candidate sets; the result is an upper bound.
pub fn sigma<T: Scalar>(model: &BasisModel<T>, f: &SpVec<T>, m: usize, mode: SigmaMode) -> Result<SigmaEstimate<T>> {
    let k = f.len();
    if m >= k {
        return Ok(zero_error(f));
    }
    let support: Vec<usize> = f.iter().map(|(n, _)| n).collect();
    let score = |c: &[usize]| model.norm(&f.remove_set(&to_set(&support, c)));
    if model.is_lattice() {
        let (value, pick, exact) = match mode {
            SigmaMode::Exact => {
                let count = binomial(k, m);
                if count > EXACT_CAP {
                    return Err(Error::Budget(format!("{count} candidate sets exceed the exact cap {EXACT_CAP}")));
                }
                let (v, c) = extreme_over_subsets(k, m..=m, false, score).expect("non-empty family");
                (v, c, true)
            }
            SigmaMode::Heuristic { seed } => {
                let (v, c) = best_of(&heuristic_candidates(f, m, m, seed), score);
                (v, c, false)
            }
        };
        let set = to_set(&support, &pick);
        return Ok(SigmaEstimate { value, approximant: f.restrict(&set), set, exact });
    }

    // Non-lattice: rank candidate sets by the warm start, refine the best few.
    let mut ranked: Vec<(T, Vec<usize>)> = match mode {
        SigmaMode::Exact => {
            let count = binomial_prefix(k, m);
            if count > EXACT_CAP {
                return Err(Error::Budget(format!("{count} candidate sets exceed the exact cap {EXACT_CAP}")));
            }
            let mut all = Vec::new();
            for j in 0..=m {
                super::combin::for_each_combination(k, j, |c| all.push((score(c), c.to_vec())));
            }
            all
        }
        SigmaMode::Heuristic { seed } => heuristic_candidates(f, 0, m, seed).into_iter().map(|c| (score(&c), c)).collect(),
    };
    ranked.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite").then_with(|| a.1.cmp(&b.1)));
    let mut best: Option<SigmaEstimate<T>> = None;
    for (_, pick) in ranked.into_iter().take(REFINED_SETS) {
        let set = to_set(&support, &pick);
        let (value, z) = coordinate_descent(model, f, &set);
        if best.as_ref().map_or(true, |b| value < b.value) {
            best = Some(SigmaEstimate { value, set, approximant: z, exact: false });
        }
    }
    Ok(best.expect("at least one candidate"))
}

/// Minimizes `‖f − z‖` over `supp z ⊆ B` by golden-section coordinate sweeps
/// from `z = S_B f`.
fn coordinate_descent<T: Scalar>(model: &BasisModel<T>, f: &SpVec<T>, set: &IndexSet) -> (T, SpVec<T>) {
    let mut z = f.restrict(set);
    let mut value = model.norm(&f.sub(&z));
    if set.is_empty() {
        return (value, z);
    }
    let radius = f.max_abs() * T::lit(2.0);
    let inv_phi = T::lit((5f64.sqrt() - 1.0) / 2.0);
    for _ in 0..DESCENT_SWEEPS {
        let before = value;
        for &n in set {
            let center = f.get(n);
            let eval = |b: T, z: &SpVec<T>| {
                let mut trial = z.clone();
                trial.set(n, b).expect("finite coefficient");
                model.norm(&f.sub(&trial))
            };
            let (mut lo, mut hi) = (center - radius, center + radius);
            let mut x1 = hi - inv_phi * (hi - lo);
            let mut x2 = lo + inv_phi * (hi - lo);
            let (mut f1, mut f2) = (eval(x1, &z), eval(x2, &z));
            for _ in 0..40 {
                if f1 < f2 {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - inv_phi * (hi - lo);
                    f1 = eval(x1, &z);
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + inv_phi * (hi - lo);
                    f2 = eval(x2, &z);
                }
            }
            let (bx, bv) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
            // Also try removing the coordinate from the approximant entirely.
            let zero_v = eval(T::zero(), &z);
            let (bx, bv) = if zero_v < bv { (T::zero(), zero_v) } else { (bx, bv) };
            if bv < value {
                z.set(n, bx).expect("finite coefficient");
                value = bv;
            }
        }
        if before - value <= T::lit(1e-12) * before {
            break;
        }
    }
    (value, z)
}

/// Exhaustive search of `‖f − Σ_B b_n x_n‖` over `|B| ≤ m` and `b_n` on the grid
/// `{0, ±|a_k|}`; used to certify coordinate descent on supports ≤ 6.
pub fn sigma_grid<T: Scalar>(model: &BasisModel<T>, f: &SpVec<T>, m: usize) -> Result<SigmaEstimate<T>> {
    let k = f.len();
    if k > 6 {
        return Err(Error::Budget("grid certification limited to supports of size ≤ 6".into()));
    }
    if m >= k {
        return Ok(zero_error(f));
    }
    let support: Vec<usize> = f.iter().map(|(n, _)| n).collect();
    let mut levels: Vec<T> = f.values().map(|a| a.abs()).collect();
    levels.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    levels.dedup();
    let mut grid = vec![T::zero()];
    for l in levels {
        grid.push(l);
        grid.push(-l);
    }
    let g = grid.len();
    let mut best = SigmaEstimate { value: model.norm(f), set: IndexSet::new(), approximant: SpVec::new(), exact: false };
    for j in 1..=m {
        super::combin::for_each_combination(k, j, |c| {
            let total = g.pow(j as u32);
            for code in 0..total {
                let mut z = SpVec::new();
                let mut r = code;
                for &i in c {
                    z.set(support[i], grid[r % g]).expect("finite");
                    r /= g;
                }
                let v = model.norm(&f.sub(&z));
                if v < best.value {
                    best = SigmaEstimate { value: v, set: to_set(&support, c), approximant: z, exact: false };
                }
            }
        });
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn lattice(s: &str) -> BasisModel<f64> {
        BasisModel::parse(s).unwrap()
    }

    #[test]
    fn sigma_tilde_examples() {
        let l1 = lattice("lp:1");
        let f = SpVec::from_dense(&[3.0, 2.0, 1.0]);
        assert_eq!(sigma_tilde(&l1, &f, 1, SigmaMode::Exact).unwrap().value, 3.0);
        assert_eq!(sigma_tilde(&l1, &f, 0, SigmaMode::Exact).unwrap().value, 6.0);
        assert_eq!(sigma_tilde(&l1, &f, 3, SigmaMode::Exact).unwrap().value, 0.0);
    }

    #[test]
    fn sigma_examples() {
        let l2 = lattice("lp:2");
        let f = SpVec::from_dense(&[3.0, 2.0, 1.0]);
        let s = sigma(&l2, &f, 1, SigmaMode::Exact).unwrap();
        assert_relative_eq!(s.value, 5f64.sqrt(), epsilon = 1e-12);
        assert_eq!(s.set, [1].into_iter().collect());
        assert_relative_eq!(sigma(&l2, &f, 0, SigmaMode::Exact).unwrap().value, 14f64.sqrt());
    }

    #[test]
    fn budget_errors() {
        let f = SpVec::from_dense(&vec![1.0; 40]);
        assert!(matches!(sigma_tilde(&lattice("lp:1"), &f, 20, SigmaMode::Exact), Err(Error::Budget(_))));
        let h = sigma_tilde(&lattice("lp:1"), &f, 20, SigmaMode::Heuristic { seed: 1 }).unwrap();
        assert!(!h.exact);
        assert_relative_eq!(h.value, 20.0);
    }

    #[test]
    fn descent_beats_plain_removal_on_vp() {
        // In v_1 removing a_2 from (1,1,1) costs more than shifting it.
        let vp = lattice("vp:1");
        let f = SpVec::from_dense(&[1.0, 1.0, 1.0]);
        let s = sigma(&vp, &f, 1, SigmaMode::Exact).unwrap();
        let grid = sigma_grid(&vp, &f, 1).unwrap();
        assert!(s.value <= grid.value + 1e-9);
        assert_relative_eq!(s.value, vp.norm(&f.sub(&s.approximant)), epsilon = 1e-12);
    }
}
