//! Renormings that make greedy-type constants equal to one, with checks of
//! the isometric properties they are built to have.
//!
//! * `chain0`: `‖f‖_0 = sup ‖S_{A₂∖A₁} f‖` over greedy sets `A₁ ⊆ A₂ ⊆ supp f`.
//! * `trunc1`: `‖f‖_1 = sup ‖T(f, A)‖_0` over strictly greedy sets `A`.
//! * `almost_a`: `‖f‖_a = inf ‖f − S_A f + z‖` over admissible pairs `(A, z)`,
//!   evaluated on a documented finite search space (an upper bound).

use crate::basis::{enumerate_greedy_sets, strictly_greedy_sets, truncation_t, BasisModel};
use crate::core::{IndexSet, SignPattern, SpVec};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

/// Largest number of nested greedy pairs enumerated for one vector.
pub const PAIR_CAP: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RenormKind {
    Chain0,
    Trunc1,
    AlmostA,
}

impl fmt::Display for RenormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Chain0 => "chain0",
            Self::Trunc1 => "trunc1",
            Self::AlmostA => "almost_a",
        })
    }
}

impl FromStr for RenormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "chain0" => Ok(Self::Chain0),
            "trunc1" => Ok(Self::Trunc1),
            "almost_a" | "almost-a" => Ok(Self::AlmostA),
            _ => Err(Error::InvalidParameter(format!("unknown renorming `{s}` (chain0, trunc1, almost_a)"))),
        }
    }
}

/// Search space of the `almost_a` infimum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlmostBudget {
    /// Largest `|A|` tried.
    pub max_set: usize,
    /// Random sign patterns on the fresh block, besides `+`, `−` and alternating.
    pub signs: usize,
    pub seed: u64,
    /// First index of the fresh block carrying `z`.
    pub fresh_start: usize,
}

impl Default for AlmostBudget {
    fn default() -> Self {
        Self { max_set: 6, signs: 4, seed: 7, fresh_start: 1001 }
    }
}

#[derive(Clone, Debug)]
pub struct RenormedSpace {
    pub base: BasisModel<f64>,
    pub kind: RenormKind,
    pub budget: AlmostBudget,
}

impl RenormedSpace {
    pub fn new(base: BasisModel<f64>, kind: RenormKind) -> Self {
        Self { base, kind, budget: AlmostBudget::default() }
    }

    pub fn with_budget(mut self, budget: AlmostBudget) -> Self {
        self.budget = budget;
        self
    }

    /// The renormed quasi-norm of `f`.
    pub fn eval(&self, f: &SpVec<f64>) -> Result<f64> {
        match self.kind {
            RenormKind::Chain0 => chain0(&self.base, f),
            RenormKind::Trunc1 => trunc1(&self.base, f),
            RenormKind::AlmostA => Ok(self.almost(f, &[])?.value),
        }
    }

    /// Evaluates `‖f‖_a` over the search space of `f` together with `extra` pairs.
    pub fn almost(&self, f: &SpVec<f64>, extra: &[(IndexSet, SpVec<f64>)]) -> Result<AlmostValue> {
        let b = &self.budget;
        if f.max_index().is_some_and(|m| m >= b.fresh_start) {
            return Err(Error::Collision(format!(
                "support reaches index {} inside the fresh block starting at {}",
                f.max_index().unwrap_or(0),
                b.fresh_start
            )));
        }
        let mut best = AlmostValue { value: self.base.norm(f), set: IndexSet::new(), z: SpVec::new(), rejected: 0 };
        for (a, z) in self.candidates(f).iter().chain(extra) {
            if !admissible(f, a, z) {
                best.rejected += 1;
                continue;
            }
            let v = self.base.norm(&f.remove_set(a).add(z));
            if v < best.value {
                best = AlmostValue { value: v, set: a.clone(), z: z.clone(), rejected: best.rejected };
            }
        }
        Ok(best)
    }

    /// The finite search space `{(A, t·1_{ε,E})}` of `f`.
    pub fn candidates(&self, f: &SpVec<f64>) -> Vec<(IndexSet, SpVec<f64>)> {
        let b = &self.budget;
        let support: Vec<usize> = f.iter().map(|(n, _)| n).collect();
        let k = support.len();
        let t = f.max_abs();
        let mut sets: Vec<IndexSet> = Vec::new();
        if k <= 16 {
            for mask in 1u64..1 << k {
                if (mask.count_ones() as usize) <= b.max_set {
                    sets.push((0..k).filter(|i| mask >> i & 1 == 1).map(|i| support[i]).collect());
                }
            }
        } else {
            let order = crate::basis::greedy_order(f);
            for j in 1..=b.max_set.min(k) {
                sets.push(order[..j].iter().copied().collect());
                sets.push(order[k - j..].iter().copied().collect());
            }
        }
        let mut out = Vec::new();
        for a in sets {
            for z in fresh_vectors(b, a.len(), t) {
                out.push((a.clone(), z));
            }
        }
        out
    }
}

/// `t·1_{ε,E}` on the fresh block `E` of length `len`; the sign family depends
/// only on `len` so that related vectors share it.
fn fresh_vectors(b: &AlmostBudget, len: usize, t: f64) -> Vec<SpVec<f64>> {
    let e: IndexSet = (b.fresh_start..b.fresh_start + len).collect();
    let mut signs = vec![SignPattern::all_plus(&e), SignPattern::from_mask(&e, u64::MAX), SignPattern::alternating(&e)];
    let mut rng = ChaCha8Rng::seed_from_u64(b.seed ^ (len as u64).wrapping_mul(0x9e37_79b9));
    for _ in 0..b.signs {
        signs.push(SignPattern::new(e.iter().map(|&n| (n, if rng.gen_bool(0.5) { 1 } else { -1 }))).expect("valid"));
    }
    signs.dedup();
    signs.into_iter().map(|s| SpVec::indicator(&e, Some(&s)).scale(t)).collect()
}

/// Membership of `(A, z)` in the admissible family of `f`.
pub fn admissible(f: &SpVec<f64>, a: &IndexSet, z: &SpVec<f64>) -> bool {
    let supp = f.support();
    let zs = z.support();
    a.is_subset(&supp)
        && supp.difference(a).all(|n| !zs.contains(n))
        && a.len() <= zs.len()
        && (z.is_empty() || f.max_abs() <= z.min_abs())
}

/// The `‖·‖_a` value with the pair attaining it.
#[derive(Clone, Debug, PartialEq)]
pub struct AlmostValue {
    pub value: f64,
    pub set: IndexSet,
    pub z: SpVec<f64>,
    /// Offered pairs that failed the admissibility test and were skipped.
    pub rejected: usize,
}

/// All greedy sets of `f` inside its support, by cardinality.
pub fn all_greedy_sets(f: &SpVec<f64>) -> Result<Vec<IndexSet>> {
    let mut out = Vec::new();
    for m in 0..=f.len() {
        out.extend(enumerate_greedy_sets(f, m)?);
    }
    Ok(out)
}

/// Nested pairs `A₁ ⊆ A₂` of greedy sets of `f`.
pub fn greedy_pairs(f: &SpVec<f64>) -> Result<Vec<(IndexSet, IndexSet)>> {
    let sets = all_greedy_sets(f)?;
    let mut out = Vec::new();
    for a2 in &sets {
        for a1 in sets.iter().filter(|a1| a1.len() <= a2.len() && a1.is_subset(a2)) {
            if out.len() == PAIR_CAP {
                return Err(Error::Budget(format!("more than {PAIR_CAP} nested greedy pairs")));
            }
            out.push((a1.clone(), a2.clone()));
        }
    }
    Ok(out)
}

pub fn chain0(model: &BasisModel<f64>, f: &SpVec<f64>) -> Result<f64> {
    let mut best = 0.0f64;
    for (a1, a2) in greedy_pairs(f)? {
        let diff: IndexSet = a2.difference(&a1).copied().collect();
        best = best.max(model.norm(&f.restrict(&diff)));
    }
    Ok(best)
}

pub fn trunc1(model: &BasisModel<f64>, f: &SpVec<f64>) -> Result<f64> {
    let mut best = 0.0f64;
    for a in strictly_greedy_sets(f) {
        best = best.max(chain0(model, &truncation_t(f, &a)?)?);
    }
    Ok(best)
}

/// A failed isometry inequality `lhs ≤ rhs`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RenormViolation {
    pub f: SpVec<f64>,
    pub set: Vec<usize>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RenormReport {
    pub kind: RenormKind,
    pub samples: usize,
    pub checks: usize,
    pub violations: usize,
    /// Largest `lhs/rhs − 1` seen (negative when every check has slack).
    pub worst_excess: f64,
    /// Whether the `‖S_B f‖_a ≤ ‖f‖_a` half was run (base with `C_qg = 1`).
    pub projection_checked: bool,
    /// Mapped `almost_a` pairs that were not admissible (each also counts as a violation).
    pub inadmissible: usize,
    pub witnesses: Vec<RenormViolation>,
}

struct Outcome {
    checks: usize,
    inadmissible: usize,
    worst: f64,
    bad: Vec<RenormViolation>,
}

impl Outcome {
    fn new() -> Self {
        Self { checks: 0, inadmissible: 0, worst: f64::NEG_INFINITY, bad: Vec::new() }
    }

    fn record(&mut self, f: &SpVec<f64>, set: &IndexSet, lhs: f64, rhs: f64, tol: f64) {
        self.checks += 1;
        let excess = if rhs > 0.0 { lhs / rhs - 1.0 } else if lhs > 0.0 { f64::INFINITY } else { 0.0 };
        self.worst = self.worst.max(excess);
        if lhs > rhs + tol * rhs.max(1.0) {
            self.bad.push(RenormViolation { f: f.clone(), set: set.iter().copied().collect(), lhs, rhs });
        }
    }
}

/// Checks the isometric property of `r.kind` on every sample.
///
/// `chain0`: `‖S_{A₂∖A₁} f‖_0 ≤ ‖f‖_0` for all greedy pairs. `trunc1`:
/// `‖T(f, A)‖_1 ≤ ‖f‖_1` for strictly greedy `A`. `almost_a`:
/// `‖f − S_B f‖_a ≤ ‖f‖_a` for greedy `B` and, when `projection_checked`,
/// `‖S_B f‖_a ≤ ‖f‖_a`. For `almost_a` both sides use the same search space:
/// the left side also tries the images of the right side's pairs,
/// `(A, z) ↦ (A∖B, z + S_{B∖A} f)` and `(A, z) ↦ (A∩B, z)`, each of which
/// must be admissible.
pub fn renorm_isometry_check(r: &RenormedSpace, samples: &[SpVec<f64>], projection_checked: bool, tol: f64) -> Result<RenormReport> {
    let outcomes: Vec<Result<Outcome>> = samples.par_iter().map(|f| check_one(r, f, projection_checked, tol)).collect();
    let mut report = RenormReport {
        kind: r.kind,
        samples: samples.len(),
        checks: 0,
        violations: 0,
        worst_excess: f64::NEG_INFINITY,
        projection_checked: projection_checked && r.kind == RenormKind::AlmostA,
        inadmissible: 0,
        witnesses: Vec::new(),
    };
    for o in outcomes {
        let o = o?;
        report.checks += o.checks;
        report.violations += o.bad.len() + o.inadmissible;
        report.inadmissible += o.inadmissible;
        report.worst_excess = report.worst_excess.max(o.worst);
        report.witnesses.extend(o.bad.into_iter().take(5 - report.witnesses.len().min(5)));
    }
    Ok(report)
}

fn check_one(r: &RenormedSpace, f: &SpVec<f64>, projection: bool, tol: f64) -> Result<Outcome> {
    let mut out = Outcome::new();
    if f.is_empty() {
        return Ok(out);
    }
    match r.kind {
        RenormKind::Chain0 => {
            let nf = chain0(&r.base, f)?;
            for (a1, a2) in greedy_pairs(f)? {
                let diff: IndexSet = a2.difference(&a1).copied().collect();
                out.record(f, &diff, chain0(&r.base, &f.restrict(&diff))?, nf, tol);
            }
        }
        RenormKind::Trunc1 => {
            let nf = trunc1(&r.base, f)?;
            for a in strictly_greedy_sets(f) {
                out.record(f, &a, trunc1(&r.base, &truncation_t(f, &a)?)?, nf, tol);
            }
        }
        RenormKind::AlmostA => {
            let own = r.candidates(f);
            let nf = r.almost(f, &[])?.value;
            for b in all_greedy_sets(f)? {
                let g = f.remove_set(&b);
                let mapped: Vec<(IndexSet, SpVec<f64>)> = own
                    .iter()
                    .map(|(a, z)| {
                        let rest: IndexSet = b.difference(a).copied().collect();
                        (a.difference(&b).copied().collect(), z.add(&f.restrict(&rest)))
                    })
                    .collect();
                let lhs = if g.is_empty() {
                    0.0
                } else {
                    let v = r.almost(&g, &mapped)?;
                    out.inadmissible += v.rejected;
                    v.value
                };
                out.record(f, &b, lhs, nf, tol);
                if projection && !b.is_empty() {
                    let h = f.restrict(&b);
                    let mapped: Vec<(IndexSet, SpVec<f64>)> =
                        own.iter().map(|(a, z)| (a.intersection(&b).copied().collect(), z.clone())).collect();
                    let v = r.almost(&h, &mapped)?;
                    out.inadmissible += v.rejected;
                    out.record(f, &b, v.value, nf, tol);
                }
            }
        }
    }
    Ok(out)
}

/// Seeded samples with support size in `1..=max_support` on indices `1..=dim`;
/// alternate draws use a coarse grid so that ties occur.
pub fn renorm_samples(n: usize, dim: usize, max_support: usize, seed: u64) -> Vec<SpVec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = [0.5, 1.0, 2.0];
    (0..n)
        .map(|i| {
            let k = rng.gen_range(1..=max_support.min(dim));
            let idx = rand::seq::index::sample(&mut rng, dim, k);
            let pairs: Vec<(usize, f64)> = idx
                .into_iter()
                .map(|j| {
                    let s = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    let v = if i % 4 == 3 { grid[rng.gen_range(0..grid.len())] } else { rng.gen_range(0.01..1.0) };
                    (j + 1, s * v)
                })
                .collect();
            SpVec::from_pairs(pairs).expect("distinct indices")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(p: &str) -> BasisModel<f64> {
        BasisModel::parse(&format!("lp:{p}")).unwrap()
    }

    #[test]
    fn chain0_on_lp_is_the_norm() {
        let f = SpVec::from_dense(&[2.0, 1.0]);
        let m = lp("0.5");
        assert!((chain0(&m, &f).unwrap() - m.norm(&f)).abs() < 1e-12);
    }

    #[test]
    fn chain0_brute_force() {
        let m = BasisModel::parse("sw:w=const:1").unwrap();
        let f = SpVec::from_dense(&[1.0, -1.0, 0.5, -0.5]);
        let mut brute = 0.0f64;
        for a2 in 0u32..16 {
            for a1 in 0u32..16 {
                let s1: IndexSet = (0..4).filter(|i| a1 >> i & 1 == 1).map(|i| i + 1).collect();
                let s2: IndexSet = (0..4).filter(|i| a2 >> i & 1 == 1).map(|i| i + 1).collect();
                let greedy = |s: &IndexSet| crate::basis::is_greedy_set(&f, s);
                if s1.is_subset(&s2) && greedy(&s1) && greedy(&s2) {
                    let d: IndexSet = s2.difference(&s1).copied().collect();
                    brute = brute.max(m.norm(&f.restrict(&d)));
                }
            }
        }
        assert!((chain0(&m, &f).unwrap() - brute).abs() < 1e-12);
        assert!(brute > m.norm(&f));
    }

    #[test]
    fn trunc1_constant_magnitudes() {
        let m = lp("1");
        let f = SpVec::from_dense(&[1.0, 1.0]);
        assert!((trunc1(&m, &f).unwrap() - chain0(&m, &f).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn trunc1_semigroup() {
        let m = BasisModel::parse("sw:w=pot:0.5").unwrap();
        let f = SpVec::from_dense(&[0.3, -1.0, 0.7, 0.1, -0.5]);
        let levels = strictly_greedy_sets(&f);
        for (i, a) in levels.iter().enumerate() {
            for b in &levels[i..] {
                let tt = truncation_t(&truncation_t(&f, a).unwrap(), b).unwrap();
                let t = truncation_t(&f, b).unwrap();
                assert!((trunc1(&m, &tt).unwrap() - trunc1(&m, &t).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn almost_a_bounds() {
        let m = BasisModel::parse("sw:w=pot:0.5").unwrap();
        let r = RenormedSpace::new(m.clone(), RenormKind::AlmostA);
        let f = SpVec::from_dense(&[0.3, -1.0, 0.7]);
        assert!(r.eval(&f).unwrap() <= m.norm(&f));
        let e1 = SpVec::from_dense(&[2.0]);
        assert!(r.eval(&e1).unwrap() <= m.norm(&e1));
        let bad = RenormedSpace::new(m, RenormKind::AlmostA).with_budget(AlmostBudget { fresh_start: 2, ..Default::default() });
        assert!(matches!(bad.eval(&f), Err(Error::Collision(_))));
    }

    #[test]
    fn admissibility() {
        let f = SpVec::from_dense(&[1.0, 0.5]);
        let z = SpVec::from_pairs([(10, 1.0)]).unwrap();
        assert!(admissible(&f, &[1].into_iter().collect(), &z));
        assert!(!admissible(&f, &[1, 2].into_iter().collect(), &z));
        assert!(!admissible(&f, &[1].into_iter().collect(), &z.scale(0.5)));
        assert!(admissible(&f, &IndexSet::new(), &SpVec::new()));
    }

    #[test]
    fn isometries_on_lp() {
        let samples = renorm_samples(60, 8, 5, 3);
        for kind in [RenormKind::Chain0, RenormKind::Trunc1, RenormKind::AlmostA] {
            let r = RenormedSpace::new(lp("0.5"), kind);
            let rep = renorm_isometry_check(&r, &samples, true, 1e-9).unwrap();
            assert_eq!(rep.violations, 0, "{kind}: {:?}", rep.witnesses);
            assert_eq!(rep.inadmissible, 0);
            assert!(rep.checks > 0);
        }
    }

    #[test]
    fn chain0_dominates_base_norm() {
        let m = BasisModel::parse("sw:w=pot:0.5").unwrap();
        for f in renorm_samples(50, 8, 6, 9) {
            assert!(chain0(&m, &f).unwrap() >= m.norm(&f) - 1e-12);
        }
    }
}
