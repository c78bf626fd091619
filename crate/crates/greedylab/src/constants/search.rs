//! Per-kind searches. Every candidate ratio is evaluated from explicit
//! vectors, so the stored witness reproduces the reported value exactly.

use super::family::{Bits, TestFamily};
use super::{dual_fundamental, ConstantEstimate, ConstantKind, Witness};
use crate::basis::{
    enumerate_greedy_sets, greedy_order, sigma, truncation_t, truncation_u, BasisModel, SigmaMode,
};
use crate::core::{IndexSet, SignPattern, SpVec};
use crate::error::{Error, Result};
use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use std::sync::{Mutex, OnceLock};
use std::collections::BTreeMap;

/// Largest support on which `σ̃` profiles are computed exhaustively.
const PROFILE_CAP: usize = 16;
/// Random vectors from the pool used by the `σ`-based searches.
const SIGMA_RANDOM: usize = 16;
/// Greedy-set pairs examined per vector.
const PAIR_CAP: usize = 5000;

#[derive(Clone, Debug)]
pub(crate) struct Best {
    pub value: f64,
    pub witness: Witness,
}

impl Best {
    pub(crate) fn trivial() -> Self {
        Self { value: 1.0, witness: Witness::trivial() }
    }

    /// Offers `‖lhs‖/‖rhs‖` given precomputed norms; keeps strict improvements only.
    fn offer(&mut self, num: f64, den: f64, lhs: impl FnOnce() -> SpVec<f64>, rhs: impl FnOnce() -> SpVec<f64>) {
        if den > 0.0 && den.is_finite() {
            let v = num / den;
            if v > self.value {
                self.value = v;
                self.witness = Witness::new(lhs(), Some(rhs()));
            }
        }
    }

    fn merge(&mut self, other: Best) {
        if other.value > self.value {
            *self = other;
        }
    }
}

/// Parallel map with an order-preserving reduction (independent of thread count).
pub(crate) fn par_max<I: Sync>(items: &[I], f: impl Fn(&I) -> Best + Sync + Send) -> Best {
    let parts: Vec<Best> = items.par_iter().map(f).collect();
    let mut best = Best::trivial();
    for b in parts {
        best.merge(b);
    }
    best
}

/// Per-set norms `‖1_A‖` and sign extremes of `‖1_{ε,A}‖`.
#[derive(Clone, Debug)]
pub(crate) struct SetEntry {
    pub set: IndexSet,
    pub bits: Bits,
    pub plus: f64,
    pub smax: f64,
    pub smax_sign: SignPattern,
    pub smin: f64,
    pub smin_sign: SignPattern,
}

impl SetEntry {
    pub(crate) fn vec_plus(&self) -> SpVec<f64> {
        SpVec::indicator(&self.set, None)
    }
    pub(crate) fn vec_max(&self) -> SpVec<f64> {
        SpVec::indicator(&self.set, Some(&self.smax_sign))
    }
    pub(crate) fn vec_min(&self) -> SpVec<f64> {
        SpVec::indicator(&self.set, Some(&self.smin_sign))
    }
}

pub(crate) fn build_set_table(model: &BasisModel<f64>, family: &TestFamily, sets: Vec<IndexSet>) -> Vec<SetEntry> {
    sets.into_par_iter()
        .map(|set| {
            let plus = model.norm(&SpVec::indicator(&set, None));
            let mut smax = (plus, SignPattern::all_plus(&set));
            let mut smin = smax.clone();
            for eps in family.signs_full(&set, 11) {
                let v = model.norm(&SpVec::indicator(&set, Some(&eps)));
                if v > smax.0 {
                    smax = (v, eps.clone());
                }
                if v < smin.0 {
                    smin = (v, eps);
                }
            }
            SetEntry { bits: Bits::of(&set), set, plus, smax: smax.0, smax_sign: smax.1, smin: smin.0, smin_sign: smin.1 }
        })
        .collect()
}

/// Greedy sets of `f`: the chain of greedy prefixes plus tie variants.
pub(crate) fn greedy_sets_of(f: &SpVec<f64>) -> Vec<IndexSet> {
    let mut out = vec![IndexSet::new()];
    let mut acc = IndexSet::new();
    for n in greedy_order(f) {
        acc.insert(n);
        out.push(acc.clone());
    }
    for m in 1..f.len() {
        if let Ok(sets) = enumerate_greedy_sets(f, m) {
            if sets.len() > 1 {
                out.extend(sets.into_iter().take(16));
            }
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out.dedup();
    out
}

/// Caching estimator for one model and one family.
pub struct Estimator<'a> {
    model: &'a BasisModel<f64>,
    family: TestFamily,
    pool: Vec<SpVec<f64>>,
    budget: String,
    sets: OnceLock<Vec<SetEntry>>,
    nested: OnceLock<Vec<IndexSet>>,
    profiles: OnceLock<Vec<Vec<(f64, IndexSet)>>>,
    memo: Mutex<BTreeMap<ConstantKind, std::result::Result<ConstantEstimate, String>>>,
}

impl<'a> Estimator<'a> {
    pub fn new(model: &'a BasisModel<f64>, family: TestFamily) -> Result<Self> {
        model.check_dim(family.dim)?;
        Ok(Self {
            model,
            pool: family.vector_pool(),
            budget: family.descriptor(),
            family,
            sets: OnceLock::new(),
            nested: OnceLock::new(),
            profiles: OnceLock::new(),
            memo: Mutex::new(BTreeMap::new()),
        })
    }

    pub fn family(&self) -> &TestFamily {
        &self.family
    }

    pub fn pool(&self) -> &[SpVec<f64>] {
        &self.pool
    }

    /// Estimate of `kind`, never below the estimates of the kinds it includes.
    pub fn estimate(&self, kind: ConstantKind) -> Result<ConstantEstimate> {
        if let Some(r) = self.memo.lock().expect("memo").get(&kind) {
            return r.clone().map_err(Error::Unsupported);
        }
        let computed = self.compute(kind);
        let stored = match computed {
            Ok(mut best) => {
                for &inner in kind.includes() {
                    if let Ok(e) = self.estimate(inner) {
                        best.merge(Best { value: e.value, witness: e.witness });
                    }
                }
                Ok(ConstantEstimate { kind, value: best.value, witness: best.witness, budget: self.budget.clone() })
            }
            Err(Error::Unsupported(msg)) => Err(msg),
            Err(e) => return Err(e),
        };
        self.memo.lock().expect("memo").insert(kind, stored.clone());
        stored.map_err(Error::Unsupported)
    }

    fn compute(&self, kind: ConstantKind) -> Result<Best> {
        use ConstantKind as K;
        Ok(match kind {
            K::Ksu => self.k_su(),
            K::Ku => self.k_u(),
            K::Ksc => self.k_sc(),
            K::Klc => self.k_lc(),
            K::Kpu => self.k_pu(),
            K::Cqg => self.c_qg(),
            K::Cql => self.c_ql(),
            K::Cag => self.c_ag(),
            K::Cg => self.c_g(),
            K::Delta => self.delta(false, false),
            K::DeltaD => self.delta(false, true),
            K::DeltaS => self.delta(true, false),
            K::DeltaSd => self.delta(true, true),
            K::Gamma => self.gamma(),
            K::LambdaU => self.lambda(false),
            K::LambdaT => self.lambda(true),
            K::DeltaB => self.delta_b(false)?,
            K::DeltaSb => self.delta_b(true)?,
        })
    }

    fn norm(&self, f: &SpVec<f64>) -> f64 {
        self.model.norm(f)
    }

    pub(crate) fn set_table(&self) -> &[SetEntry] {
        self.sets.get_or_init(|| {
            build_set_table(self.model, &self.family, self.family.set_family(self.family.set_cap, 4, 5))
        })
    }

    fn nested(&self) -> &[IndexSet] {
        self.nested.get_or_init(|| self.family.nested_family())
    }

    /// Vectors used by the searches that need best-approximation errors.
    fn sigma_pool(&self) -> &[SpVec<f64>] {
        let structured = self.pool.len() - self.family.random_draws.min(self.pool.len());
        &self.pool[..(structured + SIGMA_RANDOM).min(self.pool.len())]
    }

    /// `σ̃` profiles `(σ̃_m, argmin B)` for `m = 0..=|supp f|`, per sigma-pool vector.
    fn profiles(&self) -> &[Vec<(f64, IndexSet)>] {
        self.profiles.get_or_init(|| {
            self.sigma_pool().par_iter().map(|f| sigma_tilde_profile(self.model, f, self.family.seed)).collect()
        })
    }

    fn k_su(&self) -> Best {
        par_max(&self.pool, |f| {
            let nf = self.norm(f);
            let mut best = Best::trivial();
            for set in self.subsets_of_support(f, 0x51) {
                let g = f.restrict(&set);
                best.offer(self.norm(&g), nf, || g.clone(), || f.clone());
            }
            best
        })
    }

    /// Subsets of `supp f`: exhaustive up to `set_cap`, else greedy prefixes,
    /// positional intervals and seeded random subsets.
    fn subsets_of_support(&self, f: &SpVec<f64>, salt: u64) -> Vec<IndexSet> {
        let support: Vec<usize> = f.iter().map(|(n, _)| n).collect();
        let k = support.len();
        if k <= self.family.set_cap {
            return (1..(1u64 << k) - 1)
                .map(|mask| (0..k).filter(|i| mask >> i & 1 == 1).map(|i| support[i]).collect())
                .collect();
        }
        let mut out: Vec<IndexSet> = Vec::new();
        let order = greedy_order(f);
        for j in 1..k {
            out.push(order[..j].iter().copied().collect());
            out.push(order[j..].iter().copied().collect());
            out.push(support[..j].iter().copied().collect());
            out.push(support[j..].iter().copied().collect());
        }
        out.push(support.iter().step_by(2).copied().collect());
        out.push(support.iter().skip(1).step_by(2).copied().collect());
        let mut rng = self.family.rng(salt ^ k as u64);
        for _ in 0..256 {
            let size = rng.gen_range(1..k);
            out.push(sample(&mut rng, k, size).into_iter().map(|i| support[i]).collect());
        }
        out
    }

    fn k_u(&self) -> Best {
        par_max(&self.pool, |f| {
            let nf = self.norm(f);
            let support: Vec<usize> = f.iter().map(|(n, _)| n).collect();
            let k = support.len();
            let mut best = Best::trivial();
            let mut try_gamma = |gamma: &dyn Fn(usize) -> f64| {
                let g = f.multiply(|n| gamma(support.binary_search(&n).expect("support")));
                best.offer(self.norm(&g), nf, || g.clone(), || f.clone());
            };
            if k <= self.family.sign_cap {
                for mask in 1..1u64 << k {
                    try_gamma(&|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 });
                }
            } else {
                for s in self.family.signs_sampled(&(0..k).collect(), 256, 0x52) {
                    try_gamma(&|i| s.sign(i) as f64);
                }
            }
            let grid = [-1.0, -0.5, 0.0, 0.5, 1.0];
            let mut rng = self.family.rng(0x53 ^ k as u64);
            for _ in 0..64 {
                let g: Vec<f64> = (0..k).map(|_| grid[rng.gen_range(0..grid.len())]).collect();
                try_gamma(&|i| g[i]);
            }
            best
        })
    }

    fn nested_signs(&self, set: &IndexSet, salt: u64) -> Vec<SignPattern> {
        self.family.signs_sampled(set, self.family.nested_signs, salt)
    }

    fn k_sc(&self) -> Best {
        par_max(self.nested(), |a| {
            let mut best = Best::trivial();
            let members: Vec<usize> = a.iter().copied().collect();
            let k = members.len();
            let mut subsets: Vec<IndexSet> = Vec::new();
            if k <= 8 {
                for mask in 1..(1u64 << k) - 1 {
                    subsets.push((0..k).filter(|i| mask >> i & 1 == 1).map(|i| members[i]).collect());
                }
            } else {
                for j in 1..k {
                    subsets.push(members[..j].iter().copied().collect());
                    subsets.push(members[j..].iter().copied().collect());
                }
                subsets.push(members.iter().step_by(2).copied().collect());
                let mut rng = self.family.rng(0x54 ^ k as u64);
                for _ in 0..64 {
                    let size = rng.gen_range(1..k);
                    subsets.push(sample(&mut rng, k, size).into_iter().map(|i| members[i]).collect());
                }
            }
            for eps in self.nested_signs(a, 0x55) {
                let full = SpVec::indicator(a, Some(&eps));
                let nfull = self.norm(&full);
                for b in &subsets {
                    let part = full.restrict(b);
                    best.offer(self.norm(&part), nfull, || part.clone(), || full.clone());
                }
            }
            best
        })
    }

    fn levels_at_least_one(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.family.levels.iter().copied().filter(|&l| l >= 1.0).collect();
        if v.is_empty() {
            v = vec![1.0, 2.0];
        }
        v
    }

    fn k_lc(&self) -> Best {
        let levels = self.levels_at_least_one();
        let top = levels.iter().copied().fold(1.0, f64::max);
        par_max(self.nested(), |a| {
            let mut best = Best::trivial();
            let mut rng = self.family.rng(0x56 ^ a.len() as u64 ^ a.iter().sum::<usize>() as u64);
            for eps in self.nested_signs(a, 0x57) {
                let base = SpVec::indicator(a, Some(&eps));
                let nb = self.norm(&base);
                let mut draws: Vec<SpVec<f64>> = a.iter().take(16).map(|&n| base.multiply(|j| if j == n { top } else { 1.0 })).collect();
                for _ in 0..8 {
                    let coef: BTreeMap<usize, f64> = a.iter().map(|&n| (n, levels[rng.gen_range(0..levels.len())])).collect();
                    draws.push(base.multiply(|n| coef[&n]));
                }
                for g in draws {
                    best.offer(nb, self.norm(&g), || base.clone(), || g.clone());
                }
            }
            best
        })
    }

    fn k_pu(&self) -> Best {
        let levels = self.levels_at_least_one();
        let small = [0.0, 0.25, 0.5, 1.0];
        par_max(self.nested(), |a| {
            let mut best = Best::trivial();
            let signs = self.nested_signs(a, 0x58);
            for eps in &signs {
                let x = SpVec::indicator(a, Some(eps));
                let nx = self.norm(&x);
                for delta in &signs {
                    let y = SpVec::indicator(a, Some(delta));
                    best.offer(nx, self.norm(&y), || x.clone(), || y.clone());
                }
            }
            let mut rng = self.family.rng(0x59 ^ a.len() as u64 ^ a.iter().sum::<usize>() as u64);
            let sign = |rng: &mut rand_chacha::ChaCha8Rng| if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            for _ in 0..12 {
                let x = SpVec::from_pairs(a.iter().map(|&n| (n, sign(&mut rng) * small[rng.gen_range(0..small.len())])).filter(|p| p.1 != 0.0)).expect("valid");
                let y = SpVec::from_pairs(a.iter().map(|&n| (n, sign(&mut rng) * levels[rng.gen_range(0..levels.len())]))).expect("valid");
                best.offer(self.norm(&x), self.norm(&y), || x.clone(), || y.clone());
            }
            best
        })
    }

    fn greedy_pairs(sets: &[IndexSet]) -> impl Iterator<Item = (&IndexSet, &IndexSet)> {
        sets.iter()
            .enumerate()
            .flat_map(move |(i, a)| sets[..i].iter().filter(move |b| b.len() < a.len() && b.is_subset(a)).map(move |b| (a, b)))
            .take(PAIR_CAP)
    }

    fn c_qg(&self) -> Best {
        par_max(&self.pool, |f| {
            let nf = self.norm(f);
            let mut best = Best::trivial();
            let sets = greedy_sets_of(f);
            for (a, b) in Self::greedy_pairs(&sets) {
                let diff: IndexSet = a.difference(b).copied().collect();
                let g = f.restrict(&diff);
                best.offer(self.norm(&g), nf, || g.clone(), || f.clone());
            }
            best
        })
    }

    /// Carrier vectors with moduli ≤ 1 on the first `carrier_len` free indices.
    fn carriers(&self, avoid: &IndexSet, salt: u64, random: usize) -> Vec<SpVec<f64>> {
        let free: IndexSet =
            (1..=self.family.dim).filter(|n| !avoid.contains(n)).take(self.family.carrier_len).collect();
        let mut out = vec![SpVec::new()];
        if free.is_empty() {
            return out;
        }
        out.push(SpVec::indicator(&free, None));
        out.push(SpVec::indicator(&free, None).scale(-1.0));
        out.push(SpVec::indicator(&free, Some(&SignPattern::alternating(&free))));
        let mut rng = self.family.rng(salt);
        let grid = [-1.0, -0.5, 0.5, 1.0];
        for i in 0..random {
            let pairs: Vec<(usize, f64)> = free
                .iter()
                .map(|&n| (n, if i % 2 == 0 { rng.gen_range(-1.0..=1.0) } else { grid[rng.gen_range(0..grid.len())] }))
                .filter(|p| p.1 != 0.0)
                .collect();
            out.push(SpVec::from_pairs(pairs).expect("valid"));
        }
        out
    }

    fn c_ql(&self) -> Best {
        par_max(self.nested(), |a| {
            let mut best = Best::trivial();
            let carriers = self.carriers(a, 0x5a ^ a.iter().sum::<usize>() as u64, 6);
            for eps in self.nested_signs(a, 0x5b) {
                let ind = SpVec::indicator(a, Some(&eps));
                let ni = self.norm(&ind);
                for f in &carriers {
                    let nf = self.norm(f);
                    let sum = f.add(&ind);
                    let ns = self.norm(&sum);
                    if nf > ni {
                        best.offer(nf, ns, || f.clone(), || sum.clone());
                    } else {
                        best.offer(ni, ns, || ind.clone(), || sum.clone());
                    }
                }
            }
            best
        })
    }

    fn c_ag(&self) -> Best {
        let pool = self.sigma_pool();
        let profiles = self.profiles();
        let idx: Vec<usize> = (0..pool.len()).collect();
        par_max(&idx, |&i| {
            let f = &pool[i];
            let mut best = Best::trivial();
            for a in greedy_sets_of(f) {
                let (den, bset) = &profiles[i][a.len()];
                let g = f.remove_set(&a);
                best.offer(self.norm(&g), *den, || g.clone(), || f.remove_set(bset));
            }
            best
        })
    }

    fn c_g(&self) -> Best {
        if self.model.is_lattice() {
            // On lattices the optimal coefficients are the vector's own, so σ = σ̃.
            return self.c_ag();
        }
        let pool: Vec<&SpVec<f64>> = self.sigma_pool().iter().filter(|f| f.len() <= 10).take(12).collect();
        par_max(&pool, |f| {
            let mut best = Best::trivial();
            for a in greedy_sets_of(f).into_iter().filter(|a| a.len() <= 4 && a.len() < f.len()) {
                let est = sigma(self.model, f, a.len(), SigmaMode::Exact)
                    .or_else(|_| sigma(self.model, f, a.len(), SigmaMode::Heuristic { seed: self.family.seed }));
                if let Ok(est) = est {
                    let g = f.remove_set(&a);
                    let r = f.sub(&est.approximant);
                    best.offer(self.norm(&g), self.norm(&r), || g.clone(), || r.clone());
                }
            }
            best
        })
    }

    fn delta(&self, signed: bool, disjoint: bool) -> Best {
        let table = self.set_table();
        let top = |e: &SetEntry| if signed { e.smax } else { e.plus };
        let bottom = |e: &SetEntry| if signed { e.smin } else { e.plus };
        let lhs = |e: &SetEntry| if signed { e.vec_max() } else { e.vec_plus() };
        let rhs = |e: &SetEntry| if signed { e.vec_min() } else { e.vec_plus() };
        if !disjoint {
            let dmax = table.iter().map(|e| e.set.len()).max().unwrap_or(0);
            let mut by_size: Vec<Option<usize>> = vec![None; dmax + 1];
            for (i, e) in table.iter().enumerate() {
                let s = e.set.len();
                if by_size[s].map_or(true, |j| top(e) > top(&table[j])) {
                    by_size[s] = Some(i);
                }
            }
            let mut upto: Vec<Option<usize>> = vec![None; dmax + 1];
            for s in 0..=dmax {
                upto[s] = match (s.checked_sub(1).and_then(|t| upto[t]), by_size[s]) {
                    (Some(a), Some(b)) => Some(if top(&table[b]) > top(&table[a]) { b } else { a }),
                    (a, b) => a.or(b),
                };
            }
            let mut best = Best::trivial();
            for e in table {
                if let Some(j) = upto[e.set.len()] {
                    best.offer(top(&table[j]), bottom(e), || lhs(&table[j]), || rhs(e));
                }
            }
            return best;
        }
        par_max(table, |b| {
            let mut best = Best::trivial();
            let mut pick: Option<&SetEntry> = None;
            for a in table {
                if a.set.len() <= b.set.len() && a.bits.disjoint(&b.bits) && pick.map_or(true, |p| top(a) > top(p)) {
                    pick = Some(a);
                }
            }
            if let Some(a) = pick {
                best.offer(top(a), bottom(b), || lhs(a), || rhs(b));
            }
            best
        })
    }

    fn gamma(&self) -> Best {
        let sets = self.nested();
        let bits: Vec<Bits> = sets.iter().map(Bits::of).collect();
        let idx: Vec<usize> = (0..sets.len()).collect();
        par_max(&idx, |&j| {
            let b = &sets[j];
            let mut best = Best::trivial();
            let b_signs = self.family.signs_sampled(b, 2, 0x5c);
            for (i, a) in sets.iter().enumerate() {
                if a.len() > b.len() || !bits[i].disjoint(&bits[j]) {
                    continue;
                }
                let union: IndexSet = a.union(b).copied().collect();
                let carriers = self.carriers(&union, 0x5d ^ (i * 7919 + j) as u64, 1);
                let a_signs = self.family.signs_sampled(a, 2, 0x5e);
                for f in &carriers {
                    let lhs: Vec<SpVec<f64>> = a_signs.iter().map(|e| f.add(&SpVec::indicator(a, Some(e)))).collect();
                    let rhs: Vec<SpVec<f64>> = b_signs.iter().map(|d| f.add(&SpVec::indicator(b, Some(d)))).collect();
                    let (nl, l) = lhs.iter().map(|v| (self.norm(v), v)).fold((f64::MIN, None), |acc, (n, v)| if n > acc.0 { (n, Some(v)) } else { acc });
                    let (nr, r) = rhs.iter().map(|v| (self.norm(v), v)).fold((f64::MAX, None), |acc, (n, v)| if n < acc.0 { (n, Some(v)) } else { acc });
                    if let (Some(l), Some(r)) = (l, r) {
                        best.offer(nl, nr, || l.clone(), || r.clone());
                    }
                }
            }
            best
        })
    }

    fn lambda(&self, tail: bool) -> Best {
        par_max(&self.pool, |f| {
            let nf = self.norm(f);
            let mut best = Best::trivial();
            for a in greedy_sets_of(f) {
                let g = if tail { truncation_t(f, &a) } else { truncation_u(f, &a) }.expect("greedy set");
                best.offer(self.norm(&g), nf, || g.clone(), || f.clone());
            }
            best
        })
    }

    fn delta_b(&self, signed: bool) -> Result<Best> {
        let dual = dual_fundamental(self.model, self.family.dim)?;
        let mut best = Best::trivial();
        for e in self.set_table() {
            let m = e.set.len();
            let factor = dual[m - 1] / m as f64;
            let (phi, v) = if signed { (e.smax, e.vec_max()) } else { (e.plus, e.vec_plus()) };
            let value = factor * phi;
            if value > best.value {
                best = Best { value, witness: Witness { lhs: v, rhs: None, factor } };
            }
        }
        Ok(best)
    }
}

/// `(σ̃_m(f), B)` for `m = 0..=|supp f|`: exhaustive over subsets of the
/// support when it is small, heuristic (an upper bound) otherwise.
pub(crate) fn sigma_tilde_profile(model: &BasisModel<f64>, f: &SpVec<f64>, seed: u64) -> Vec<(f64, IndexSet)> {
    let support: Vec<usize> = f.iter().map(|(n, _)| n).collect();
    let k = support.len();
    let mut best: Vec<(f64, IndexSet)> = vec![(f64::INFINITY, IndexSet::new()); k + 1];
    if k <= PROFILE_CAP {
        for mask in 0..1u64 << k {
            let set: IndexSet = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| support[i]).collect();
            let v = model.norm(&f.remove_set(&set));
            let s = set.len();
            if v < best[s].0 {
                best[s] = (v, set);
            }
        }
    } else {
        for (m, slot) in best.iter_mut().enumerate() {
            if let Ok(e) = crate::basis::sigma_tilde(model, f, m, SigmaMode::Heuristic { seed }) {
                *slot = (e.value, e.set);
            }
        }
    }
    for m in 1..=k {
        if best[m - 1].0 <= best[m].0 {
            best[m] = best[m - 1].clone();
        }
    }
    best
}

/// Estimate of one kind over `family`.
pub fn estimate_constant(kind: ConstantKind, model: &BasisModel<f64>, family: &TestFamily) -> Result<ConstantEstimate> {
    Estimator::new(model, family.clone())?.estimate(kind)
}

/// Estimates of every kind; unsupported kinds are reported with their reason.
pub fn estimate_all(
    model: &BasisModel<f64>,
    family: &TestFamily,
) -> Result<Vec<(ConstantKind, std::result::Result<ConstantEstimate, String>)>> {
    let est = Estimator::new(model, family.clone())?;
    let mut out = Vec::new();
    for kind in ConstantKind::ALL {
        match est.estimate(kind) {
            Ok(e) => out.push((kind, Ok(e))),
            Err(Error::Unsupported(msg)) => out.push((kind, Err(msg))),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_lattices_are_exactly_one() {
        for space in ["lp:1", "lp:2", "lp:0.5"] {
            let model = BasisModel::parse(space).unwrap();
            let fam = TestFamily::new(6).with_random_draws(8).with_sign_samples(16);
            for (kind, r) in estimate_all(&model, &fam).unwrap() {
                if let Ok(e) = r {
                    if kind == ConstantKind::DeltaB || kind == ConstantKind::DeltaSb {
                        continue;
                    }
                    assert!((e.value - 1.0).abs() < 1e-9, "{space} {kind} = {}", e.value);
                }
            }
        }
    }

    #[test]
    fn dsum_l1_l2_is_not_democratic() {
        let model = BasisModel::parse("dsum(lp:1,lp:2)").unwrap();
        let est = estimate_constant(ConstantKind::Delta, &model, &TestFamily::new(8)).unwrap();
        assert!(est.value >= 2.0 - 1e-12, "{}", est.value);
        assert_eq!(est.recheck(&model), est.value);
    }

    #[test]
    fn witnesses_recheck_and_inclusions_hold() {
        let model = BasisModel::parse("sw:w=pot:0.5").unwrap();
        let fam = TestFamily::new(6).with_random_draws(8).with_sign_samples(16);
        let est = Estimator::new(&model, fam).unwrap();
        for kind in ConstantKind::ALL {
            let Ok(e) = est.estimate(kind) else { continue };
            assert!(e.value >= 1.0);
            assert!((e.recheck(&model) - e.value).abs() <= 1e-12 * e.value, "{kind}");
            for &inner in kind.includes() {
                if let Ok(i) = est.estimate(inner) {
                    assert!(e.value >= i.value, "{kind} < {inner}");
                }
            }
        }
    }

    #[test]
    fn profile_matches_sigma_tilde() {
        let model = BasisModel::parse("sw:w=pot:0.5").unwrap();
        let f = SpVec::from_dense(&[1.0, -0.5, 0.25, 2.0]);
        let prof = sigma_tilde_profile(&model, &f, 1);
        for m in 0..=4 {
            let e = crate::basis::sigma_tilde(&model, &f, m, SigmaMode::Exact).unwrap();
            assert!((prof[m].0 - e.value).abs() < 1e-12);
        }
    }

    #[test]
    fn greedy_sets_include_ties() {
        let f = SpVec::from_dense(&[1.0, 1.0, 0.5]);
        let sets = greedy_sets_of(&f);
        assert!(sets.contains(&[2].into_iter().collect()));
        assert!(sets.contains(&[1].into_iter().collect()));
        assert_eq!(sets.len(), 5);
    }
}
