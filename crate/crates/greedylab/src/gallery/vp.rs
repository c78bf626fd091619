//! The alternating basis `x_n = (−1)^{n−1} e_n` of the difference space `v_p`.

use crate::core::{IndexSet, SpVec};
use crate::error::{invalid, Result};
use crate::spaces::SpaceSpec;
use serde::Serialize;

/// Sign choices and subsets are enumerated exhaustively up to this size.
pub const EXHAUSTIVE_M: usize = 12;

/// `‖Σ a_n x_n‖` for the alternating basis of `v_p`.
pub fn alternating_norm(space: &SpaceSpec, f: &SpVec<f64>) -> f64 {
    space.nrm(&f.multiply(|n| if n % 2 == 1 { 1.0 } else { -1.0 }))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VpRow {
    pub m: usize,
    /// Largest `‖1_A‖`, `|A| ≤ m`, over the examined sets (lower bound of `φ_u`).
    pub phi_u: f64,
    /// `phi_u / m^{1/p}`.
    pub phi_u_ratio: f64,
    /// Smallest `‖1_{ε,A}‖`, `|A| = m`, over the examined signs (upper bound of `φ^ε_l`).
    pub phi_eps_l: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VpAlternatingReport {
    pub p: f64,
    pub m_max: usize,
    pub rows: Vec<VpRow>,
    /// `2^{1/p}`.
    pub phi_l_bound: f64,
    pub phi_l_max: f64,
    /// Extremes of `phi_u / m^{1/p}` over `m ≤ m_max`.
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// Analytic ceiling `2^{1/p}` of `φ_u(m) / m^{1/p}`.
    pub ratio_ceiling: f64,
    /// Largest `‖1_A‖ / ‖1_B‖`, `|A| = |B|`, over subsets of `1..=12`.
    pub democracy_lower: f64,
    /// `‖1_{[1..4]}‖`, the all-plus interval (alternating coordinates).
    pub interval_norm_4: f64,
    /// `‖Σ_{n≤m} (−1)^{n−1} x_n‖` (all coordinates 1), constant in `m`.
    pub alternating_sign_norm: f64,
    /// The constant quoted for the previous quantity in the literature.
    pub quoted_constant: f64,
    pub democratic: bool,
    pub superdemocratic_refuted: bool,
}

fn interval(m: usize) -> IndexSet {
    (1..=m).collect()
}

pub fn vp_alternating_report(p: f64, m_max: usize) -> Result<VpAlternatingReport> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid(format!("v_p needs 0 < p ≤ 1, got {p}")));
    }
    if m_max == 0 {
        return Err(invalid("m_max must be positive"));
    }
    let space = SpaceSpec::vp(p)?;
    let norm = |f: &SpVec<f64>| alternating_norm(&space, f);
    // Exhaustive subsets of 1..=12: best and worst indicator per cardinality.
    let mut best = [0.0f64; EXHAUSTIVE_M + 1];
    let mut worst = [f64::INFINITY; EXHAUSTIVE_M + 1];
    for mask in 1u32..(1u32 << EXHAUSTIVE_M) {
        let set: IndexSet = (0..EXHAUSTIVE_M).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
        let v = norm(&SpVec::indicator(&set, None));
        let k = set.len();
        best[k] = best[k].max(v);
        worst[k] = worst[k].min(v);
    }
    let democracy_lower = (1..=EXHAUSTIVE_M)
        .map(|k| best[k] / worst[k])
        .fold(1.0, f64::max);
    let mut rows = Vec::with_capacity(m_max);
    let mut running_u: f64 = 0.0;
    for m in 1..=m_max {
        let set = interval(m);
        let plus = norm(&SpVec::indicator(&set, None));
        let mut phi_u = plus;
        if m <= EXHAUSTIVE_M {
            phi_u = phi_u.max(best[m]);
        }
        running_u = running_u.max(phi_u);
        let mut phi_l = plus.min(norm(&SpVec::indicator(&set, Some(&crate::core::SignPattern::alternating(&set)))));
        if m <= EXHAUSTIVE_M {
            for mask in 0..(1u64 << m) {
                let eps = crate::core::SignPattern::from_mask(&set, mask);
                phi_l = phi_l.min(norm(&SpVec::indicator(&set, Some(&eps))));
            }
        }
        rows.push(VpRow {
            m,
            phi_u: running_u,
            phi_u_ratio: running_u / (m as f64).powf(1.0 / p),
            phi_eps_l: phi_l,
        });
    }
    let phi_l_bound = 2f64.powf(1.0 / p);
    let phi_l_max = rows.iter().map(|r| r.phi_eps_l).fold(0.0, f64::max);
    let ratio_min = rows.iter().map(|r| r.phi_u_ratio).fold(f64::INFINITY, f64::min);
    let ratio_max = rows.iter().map(|r| r.phi_u_ratio).fold(0.0, f64::max);
    let last = rows.last().expect("m_max ≥ 1");
    let alt = interval(m_max.min(4).max(1));
    let alternating_sign_norm = norm(&SpVec::indicator(&alt, Some(&crate::core::SignPattern::alternating(&alt))));
    Ok(VpAlternatingReport {
        p,
        m_max,
        phi_l_bound,
        phi_l_max,
        ratio_min,
        ratio_max,
        ratio_ceiling: phi_l_bound,
        democracy_lower,
        interval_norm_4: norm(&SpVec::indicator(&interval(4), None)),
        alternating_sign_norm,
        quoted_constant: 2.0,
        democratic: democracy_lower <= phi_l_bound + 1e-9,
        superdemocratic_refuted: last.phi_u / last.phi_eps_l > 2.0 * phi_l_bound,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_values() {
        let r = vp_alternating_report(0.5, 16).unwrap();
        let expected = (2.0 + 3.0 * 2f64.sqrt()).powi(2);
        assert!((r.interval_norm_4 - expected).abs() < 1e-9);
        assert!((r.interval_norm_4 - 38.97).abs() < 0.01);
        assert!((r.alternating_sign_norm - 4.0).abs() < 1e-12);
    }

    #[test]
    fn lower_function_bounded() {
        let r = vp_alternating_report(0.5, 64).unwrap();
        assert!(r.phi_l_max <= r.phi_l_bound + 1e-9);
        assert!(r.rows.iter().all(|row| (row.phi_eps_l - 4.0).abs() < 1e-9));
        assert!(r.ratio_min > 0.0 && r.ratio_min <= r.ratio_max && r.ratio_max <= r.ratio_ceiling);
        assert!(r.democratic);
    }

    #[test]
    fn interval_formula_oracle() {
        // All-plus interval: coordinate differences 1, 2, …, 2, 1.
        let p = 0.5;
        let space = SpaceSpec::vp(p).unwrap();
        for m in 1..40 {
            let v = alternating_norm(&space, &SpVec::indicator(&interval(m), None));
            let oracle = if m == 1 { 2f64.powf(1.0 / p) } else { (2.0 + (m - 1) as f64 * 2f64.powf(p)).powf(1.0 / p) };
            assert!((v - oracle).abs() < 1e-9 * oracle, "m={m}");
        }
    }

    #[test]
    fn p_one_is_consistent() {
        let r = vp_alternating_report(1.0, 32).unwrap();
        assert!(r.phi_l_max <= 2.0 + 1e-12);
        assert!(r.democratic);
    }

    #[test]
    fn superdemocracy_fails_for_large_m() {
        assert!(vp_alternating_report(0.5, 256).unwrap().superdemocratic_refuted);
    }

    #[test]
    fn rejects_bad_exponent() {
        assert!(vp_alternating_report(1.5, 8).is_err());
        assert!(vp_alternating_report(0.5, 0).is_err());
    }
}
