//! Fundamental functions, weight-regularity predicates and the Hardy check.

use crate::core::{nonincreasing_rearrangement, SpVec, WeightKind, WeightSpec};
use crate::error::{invalid, Result};
use serde::Serialize;

/// Empirical doubling constants above this value are treated as non-doubling.
pub const DOUBLING_CAP: f64 = 8.0;

/// `φ_{p,q,w}(m) = (Σ_{n≤m} s_n^(q/p−1) w_n)^(1/q)`, or `s_m^(1/p)` for `q = None`.
pub fn fundamental_lorentz(p: f64, q: Option<f64>, w: &WeightSpec, m: usize) -> Result<f64> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(invalid(format!("Lorentz p must be positive and finite, got {p}")));
    }
    if m == 0 {
        return Err(invalid("fundamental function is indexed from m = 1"));
    }
    match q {
        None => Ok(w.s(m).powf(1.0 / p)),
        Some(q) if q > 0.0 && q.is_finite() => {
            let sum: f64 = (1..=m).map(|n| w.s(n).powf(q / p - 1.0) * w.w(n)).sum();
            Ok(sum.powf(1.0 / q))
        }
        Some(q) => Err(invalid(format!("Lorentz q must be positive, got {q}"))),
    }
}

/// `max_{m ≤ N/2} s_{2m}/s_m`.
pub(crate) fn doubling_constant(w: &WeightSpec, n: usize) -> f64 {
    let range = match w.kind() {
        WeightKind::Explicit { head, .. } => n.max(2 * head.len()),
        _ => n,
    };
    (1..=range / 2).map(|m| w.s(2 * m) / w.s(m)).fold(0.0, f64::max)
}

/// Exhaustive verdicts of the weight predicates over `n ≤ check_range`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightReport {
    pub doubling: bool,
    /// Minimal `C` with `s_{2m} ≤ C s_m` on the tested range.
    pub doubling_constant: f64,
    pub urp: bool,
    /// Smallest `b ∈ 3..=32` with `s_{bm} ≤ (b/2) s_m` for all `bm ≤ N`.
    pub urp_witness: Option<usize>,
    pub lrp: bool,
    /// Smallest `b ∈ 2..=32` with `2 s_m ≤ s_{bm}` for all `bm ≤ N`.
    pub lrp_witness: Option<usize>,
    /// Running maximum of `s_n/(n w_n)` stabilizes along the dyadic schedule.
    pub regular: bool,
    pub regular_running_max: f64,
    /// Running maximum keeps growing by non-decaying dyadic increments.
    pub regular_growing: bool,
    pub check_range: usize,
}

const REL: f64 = 1e-12;

/// `s_{bm} ≤ (b/2) s_m` for every `m` with `bm ≤ n`.
pub fn urp_holds(w: &WeightSpec, b: usize, n: usize) -> bool {
    (1..=n / b).all(|m| w.s(b * m) <= b as f64 / 2.0 * w.s(m) * (1.0 + REL))
}

/// `2 s_m ≤ s_{bm}` for every `m` with `bm ≤ n`.
pub fn lrp_holds(w: &WeightSpec, b: usize, n: usize) -> bool {
    (1..=n / b).all(|m| 2.0 * w.s(m) <= w.s(b * m) * (1.0 + REL))
}

pub fn weight_report(w: &WeightSpec, n: usize) -> Result<WeightReport> {
    if n < 16 {
        return Err(invalid(format!("weight report needs N ≥ 16, got {n}")));
    }
    let doubling_constant = doubling_constant(w, n);
    let urp_witness = (3..=32).find(|&b| urp_holds(w, b, n));
    let lrp_witness = (2..=32).find(|&b| lrp_holds(w, b, n));

    // Running maximum of s_k/(k w_k), sampled at dyadic checkpoints.
    let mut running = 0.0f64;
    let mut checkpoints = Vec::new();
    let mut next = 2;
    for k in 1..=n {
        running = running.max(w.s(k) / (k as f64 * w.w(k)));
        if k == next || k == n {
            checkpoints.push(running);
            next *= 2;
        }
    }
    let incs: Vec<f64> = checkpoints.windows(2).map(|p| p[1] - p[0]).collect();
    let tail = &incs[incs.len().saturating_sub(4)..];
    let (first, last) = (tail[0], *tail.last().expect("N ≥ 16 gives four increments"));
    let negligible = last <= 1e-9 * running;
    let decaying = negligible || last <= 0.5 * first;
    let growing = !negligible && tail.iter().all(|&d| d > 1e-9 * running) && last > 0.5 * first;
    Ok(WeightReport {
        doubling: doubling_constant <= DOUBLING_CAP,
        doubling_constant,
        urp: urp_witness.is_some(),
        urp_witness,
        lrp: lrp_witness.is_some(),
        lrp_witness,
        regular: decaying,
        regular_running_max: running,
        regular_growing: growing,
        check_range: n,
    })
}

/// Ratios `‖A_d f‖_{1,∞,w} / ‖f‖_{1,q,w}` over a sample family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HardyReport {
    pub q: f64,
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    pub strictly_increasing: bool,
    /// Last relative increment below 0.5 %.
    pub stabilizes: bool,
}

/// `‖A_d f‖_{1,∞,w}` where `(A_d f)_n = (1/n) Σ_{k≤n} a_k`.
///
/// The tail `(Σa)/n` past the support is evaluated up to `64·max(supp)`
/// and its limit `|Σa|·lim w_n` is included in the supremum.
pub fn hardy_lhs(w: &WeightSpec, f: &SpVec<f64>) -> f64 {
    let Some(m) = f.max_index() else { return 0.0 };
    let cutoff = (64 * m).max(1024);
    let mut acc = 0.0;
    let mut vals = Vec::with_capacity(cutoff);
    for n in 1..=cutoff {
        if n <= m {
            acc += f.get(n);
        }
        vals.push((acc / n as f64).abs());
    }
    let image = SpVec::from_dense(&vals);
    let astar = nonincreasing_rearrangement(&image);
    let head = astar.iter().enumerate().map(|(i, a)| a * w.s(i + 1)).fold(0.0, f64::max);
    let w_inf = match w.kind() {
        WeightKind::Constant(c) => *c,
        WeightKind::Potential(a) if *a >= 1.0 => 1.0,
        WeightKind::Potential(_) => 0.0,
        WeightKind::Explicit { tail, .. } => *tail,
    };
    head.max(acc.abs() * w_inf)
}

pub fn hardy_check(w: &WeightSpec, q: f64, samples: &[SpVec<f64>]) -> Result<HardyReport> {
    if !(q > 1.0) {
        return Err(invalid(format!("Hardy check needs q > 1, got {q}")));
    }
    if !w.is_nonincreasing() {
        return Err(invalid("Hardy check needs a non-increasing weight"));
    }
    let ratios: Vec<f64> = samples
        .iter()
        .filter(|f| !f.is_empty())
        .map(|f| {
            let rhs = super::kernels::lorentz(1.0, Some(q), &nonincreasing_rearrangement(f), |n| w.s(n), |n| w.w(n));
            hardy_lhs(w, f) / rhs
        })
        .collect();
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    let strictly_increasing = ratios.windows(2).all(|p| p[1] > p[0]);
    let stabilizes = match ratios.as_slice() {
        [.., a, b] => (b - a).abs() <= 0.005 * b,
        _ => true,
    };
    Ok(HardyReport { q, ratios, max_ratio, strictly_increasing, stabilizes })
}

/// Prefix indicators `1_{[1, 2^k]}` for `k ≤ kmax`.
pub fn prefix_indicators(kmax: u32) -> Vec<SpVec<f64>> {
    (0..=kmax).map(|k| SpVec::from_dense(&vec![1.0; 1 << k])).collect()
}

/// Harmonic prefixes `Σ_{n ≤ 2^k} e_n / n` for `k ≤ kmax`.
pub fn harmonic_prefixes(kmax: u32) -> Vec<SpVec<f64>> {
    (0..=kmax)
        .map(|k| SpVec::from_dense(&(1..=1usize << k).map(|n| 1.0 / n as f64).collect::<Vec<_>>()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn fundamental_examples() {
        let w = WeightSpec::potential(0.5).unwrap();
        for m in [1, 5, 40] {
            assert_relative_eq!(fundamental_lorentz(1.0, Some(1.0), &w, m).unwrap(), w.s(m), max_relative = 1e-12);
        }
        let c = WeightSpec::constant(1.0).unwrap();
        for m in [1usize, 7, 100] {
            let oracle = ((m * (m + 1)) as f64 / 2.0).sqrt();
            assert_relative_eq!(fundamental_lorentz(1.0, Some(2.0), &c, m).unwrap(), oracle, max_relative = 1e-12);
        }
        assert_eq!(fundamental_lorentz(1.0, None, &c, 9).unwrap(), 9.0);
        assert!(fundamental_lorentz(1.0, Some(2.0), &c, 0).is_err());
    }

    #[test]
    fn fundamental_is_equivalent_to_primitive() {
        let w = WeightSpec::potential(0.5).unwrap();
        let ratios: Vec<f64> = (1..=4096).map(|m| fundamental_lorentz(1.0, Some(2.0), &w, m).unwrap() / w.s(m)).collect();
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().copied().fold(0.0, f64::max);
        assert!(lo > 0.5 && hi < 1.5, "{lo} {hi}");
    }

    #[test]
    fn weight_predicates() {
        let pot = weight_report(&WeightSpec::potential(0.5).unwrap(), 1 << 16).unwrap();
        assert!(pot.urp && pot.lrp && pot.doubling && pot.regular);
        assert_eq!(pot.urp_witness, Some(11));
        assert_eq!(pot.lrp_witness, Some(4));
        let c = weight_report(&WeightSpec::constant(1.0).unwrap(), 1 << 12).unwrap();
        assert!(!c.urp && c.lrp);
        assert_eq!(c.lrp_witness, Some(2));
        assert!(c.regular);
        let inv: Vec<f64> = (1..=4096).map(|n| 1.0 / n as f64).collect();
        let h = weight_report(&WeightSpec::explicit(inv, 1.0 / 4097.0).unwrap(), 4096).unwrap();
        assert!(!h.regular && h.regular_growing);
        let harmonic: f64 = (1..=4096).map(|n| 1.0 / n as f64).sum();
        assert_relative_eq!(h.regular_running_max, harmonic, max_relative = 1e-12);
    }

    #[test]
    fn hardy_single_spike() {
        let w = WeightSpec::constant(1.0).unwrap();
        let r = hardy_check(&w, 2.0, &[SpVec::from_dense(&[1.0])]).unwrap();
        // A_d e_1 = (1/n); ‖·‖_{1,∞} = sup n·(1/n) = 1; ‖e_1‖_{1,2} = 1.
        assert_relative_eq!(r.max_ratio, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn hardy_prefix_indicator_closed_form() {
        // Constant weight: ratio = L / sqrt(L(L+1)/2).
        let w = WeightSpec::constant(1.0).unwrap();
        let r = hardy_check(&w, 2.0, &prefix_indicators(8)).unwrap();
        for (k, ratio) in r.ratios.iter().enumerate() {
            let l = (1usize << k) as f64;
            assert_relative_eq!(*ratio, l / (l * (l + 1.0) / 2.0).sqrt(), max_relative = 1e-12);
        }
        assert!(r.strictly_increasing);
    }

    #[test]
    fn hardy_harmonic_family_separates_weights() {
        let pot = hardy_check(&WeightSpec::potential(0.5).unwrap(), 2.0, &harmonic_prefixes(12)).unwrap();
        assert!(pot.stabilizes && pot.max_ratio < 1.5);
        let c = hardy_check(&WeightSpec::constant(1.0).unwrap(), 2.0, &harmonic_prefixes(12)).unwrap();
        assert!(c.strictly_increasing && !c.stabilizes);
        // ratio = H_L^{1/2} for the constant weight.
        let hl: f64 = (1..=4096).map(|n| 1.0 / n as f64).sum();
        assert_relative_eq!(*c.ratios.last().unwrap(), hl.sqrt(), max_relative = 1e-9);
    }
}
