//! A superdemocratic basis of `ℓ_p ⊕ ℓ_q` that is neither LUCC nor QGLC:
//! `x_{2k−1} = (e_k, e_k)`, `x_{2k} = (½e_k, e_k)`.

use crate::core::{IndexSet, SignPattern, SpVec};
use crate::error::{invalid, Result};
use crate::spaces::{dsum_index, SpaceSpec};
use serde::Serialize;

/// Sandwich sets are drawn from `1..=SANDWICH_RANGE` with all sign choices.
pub const SANDWICH_RANGE: usize = 12;
/// Largest cardinality examined by the sandwich sweep.
pub const SANDWICH_MAX_CARD: usize = 10;

#[derive(Clone, Debug)]
pub struct LpLqBasis {
    p: f64,
    q: f64,
    space: SpaceSpec,
}

impl LpLqBasis {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p > 0.0 && p < q) {
            return Err(invalid(format!("need 0 < p < q ≤ ∞, got p = {p}, q = {q}")));
        }
        Ok(Self { p, q, space: SpaceSpec::dsum(vec![SpaceSpec::lp(p)?, SpaceSpec::lp(q)?])? })
    }

    /// The ambient vector `Σ a_n x_n`, laid out as an interleaved direct sum.
    pub fn synthesize(&self, f: &SpVec<f64>) -> SpVec<f64> {
        let mut first = std::collections::BTreeMap::<usize, f64>::new();
        let mut second = std::collections::BTreeMap::<usize, f64>::new();
        for (n, a) in f.iter() {
            let k = n.div_ceil(2);
            let half = if n % 2 == 1 { a } else { 0.5 * a };
            *first.entry(k).or_default() += half;
            *second.entry(k).or_default() += a;
        }
        let pairs = first
            .into_iter()
            .map(|(k, v)| (dsum_index(2, 0, k), v))
            .chain(second.into_iter().map(|(k, v)| (dsum_index(2, 1, k), v)))
            .filter(|(_, v)| *v != 0.0);
        SpVec::from_pairs(pairs).expect("valid indices")
    }

    pub fn norm(&self, f: &SpVec<f64>) -> f64 {
        self.space.nrm(&self.synthesize(f))
    }

    /// `f_m = −Σ x_{2k−1} + 2Σ x_{2k}`, `g_m = −Σ x_{2k−1} + Σ x_{2k}`, `h_m = −Σ x_{2k−1}`.
    pub fn test_vectors(m: usize) -> [SpVec<f64>; 3] {
        let build = |even: f64| {
            SpVec::from_pairs((1..=m).flat_map(|k| [(2 * k - 1, -1.0), (2 * k, even)]).filter(|(_, v)| *v != 0.0))
                .expect("valid indices")
        };
        [build(2.0), build(1.0), build(0.0)]
    }

    /// `2^{−1−1/p}`.
    pub fn lower_constant(&self) -> f64 {
        2f64.powf(-1.0 - 1.0 / self.p)
    }

    /// `max{1, 2^{1−1/q}, 3/2^{1+1/p}}`.
    pub fn upper_constant(&self) -> f64 {
        1f64.max(2f64.powf(1.0 - 1.0 / self.q)).max(3.0 * self.lower_constant())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LpLqRow {
    pub m: usize,
    pub f_norm: f64,
    pub g_norm: f64,
    pub h_norm: f64,
    /// `m^{1/q}`.
    pub f_exact: f64,
    /// `m^{1/p}`.
    pub h_exact: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LpLqReport {
    pub p: f64,
    pub q: f64,
    pub rows: Vec<LpLqRow>,
    pub f_max_rel_error: f64,
    pub h_max_rel_error: f64,
    /// `‖h_m‖/‖f_m‖` strictly increasing over `1..=m_max`.
    pub h_ratio_increasing: bool,
    /// `‖g_m‖/‖f_m‖` strictly increasing along doubling `m`.
    pub g_ratio_doubling_increasing: bool,
    pub sandwich_lower_constant: f64,
    pub sandwich_upper_constant: f64,
    /// Extremes of `‖1_{ε,A}‖ / |A|^{1/p}` over the sweep.
    pub sandwich_min: f64,
    pub sandwich_max: f64,
    pub sandwich_sets: usize,
    pub sandwich_holds: bool,
}

pub fn lplq_succ_not_lucc_report(p: f64, q: f64, m_max: usize) -> Result<LpLqReport> {
    let b = LpLqBasis::new(p, q)?;
    if m_max == 0 {
        return Err(invalid("m_max must be positive"));
    }
    let rows: Vec<LpLqRow> = (1..=m_max)
        .map(|m| {
            let [f, g, h] = LpLqBasis::test_vectors(m);
            LpLqRow {
                m,
                f_norm: b.norm(&f),
                g_norm: b.norm(&g),
                h_norm: b.norm(&h),
                f_exact: (m as f64).powf(1.0 / q),
                h_exact: (m as f64).powf(1.0 / p),
            }
        })
        .collect();
    let rel = |a: f64, b: f64| (a - b).abs() / b;
    let f_max_rel_error = rows.iter().map(|r| rel(r.f_norm, r.f_exact)).fold(0.0, f64::max);
    let h_max_rel_error = rows.iter().map(|r| rel(r.h_norm, r.h_exact)).fold(0.0, f64::max);
    let h_ratio_increasing = rows.windows(2).all(|w| w[1].h_norm / w[1].f_norm > w[0].h_norm / w[0].f_norm);
    let doubling: Vec<&LpLqRow> = rows.iter().filter(|r| r.m.is_power_of_two()).collect();
    let g_ratio_doubling_increasing = doubling.windows(2).all(|w| w[1].g_norm / w[1].f_norm > w[0].g_norm / w[0].f_norm);

    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    let mut count = 0;
    for mask in 1u32..(1u32 << SANDWICH_RANGE) {
        if mask.count_ones() as usize > SANDWICH_MAX_CARD {
            continue;
        }
        let set: IndexSet = (0..SANDWICH_RANGE).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
        let scale = (set.len() as f64).powf(1.0 / p);
        for signs in 0..(1u64 << set.len()) {
            let v = b.norm(&SpVec::indicator(&set, Some(&SignPattern::from_mask(&set, signs)))) / scale;
            lo = lo.min(v);
            hi = hi.max(v);
            count += 1;
        }
    }
    let (lc, uc) = (b.lower_constant(), b.upper_constant());
    Ok(LpLqReport {
        p,
        q,
        rows,
        f_max_rel_error,
        h_max_rel_error,
        h_ratio_increasing,
        g_ratio_doubling_increasing,
        sandwich_lower_constant: lc,
        sandwich_upper_constant: uc,
        sandwich_min: lo,
        sandwich_max: hi,
        sandwich_sets: count,
        sandwich_holds: lo >= lc * (1.0 - 1e-12) && hi <= uc * (1.0 + 1e-12),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthesis_of_basis_vectors() {
        let b = LpLqBasis::new(1.0, 2.0).unwrap();
        let x1 = b.synthesize(&SpVec::from_pairs([(1, 1.0)]).unwrap());
        assert_eq!(x1, SpVec::from_pairs([(1, 1.0), (2, 1.0)]).unwrap());
        let x4 = b.synthesize(&SpVec::from_pairs([(4, 1.0)]).unwrap());
        assert_eq!(x4, SpVec::from_pairs([(3, 0.5), (4, 1.0)]).unwrap());
        let [f, _, _] = LpLqBasis::test_vectors(3);
        assert_eq!(b.synthesize(&f), SpVec::from_pairs([(2, 1.0), (4, 1.0), (6, 1.0)]).unwrap());
    }

    #[test]
    fn exact_norms_and_growth() {
        let r = lplq_succ_not_lucc_report(0.5, 2.0, 64).unwrap();
        assert!(r.f_max_rel_error < 1e-12);
        assert!(r.h_max_rel_error < 1e-12);
        assert!(r.h_ratio_increasing && r.g_ratio_doubling_increasing);
        let g4 = &r.rows[3];
        assert!((g4.g_norm - 0.5 * 16.0).abs() < 1e-9);
        assert!(r.sandwich_holds, "{} {}", r.sandwich_min, r.sandwich_max);
    }

    #[test]
    fn infinite_q() {
        let r = lplq_succ_not_lucc_report(1.0, f64::INFINITY, 16).unwrap();
        assert!(r.rows.iter().all(|row| (row.f_norm - 1.0).abs() < 1e-15));
        assert!(r.h_ratio_increasing && r.sandwich_holds);
    }

    #[test]
    fn rejects_bad_exponents() {
        assert!(LpLqBasis::new(2.0, 1.0).is_err());
        assert!(LpLqBasis::new(0.0, 1.0).is_err());
    }
}
