//! The block-averaging operator `T_η` on `ℓ_{1,q}`.

use crate::constants::TestFamily;
use crate::core::{SpVec, WeightSpec};
use crate::error::{invalid, Result};
use crate::spaces::SpaceSpec;
use rand::Rng;
use serde::Serialize;

/// Support budget of the `q < 1` witness search.
pub const WITNESS_SUPPORT: usize = 10_000;

/// `η_k = 2^k` for `k = 1..=len`.
pub fn dyadic_schedule(len: usize) -> Vec<usize> {
    (1..=len).map(|k| 1usize << k).collect()
}

fn check_schedule(eta: &[usize]) -> Result<()> {
    if eta.is_empty() || eta[0] == 0 || eta.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("η must be a strictly increasing sequence of positive integers"));
    }
    Ok(())
}

/// `T_η f = Σ_k (a_k/m_k) 1_{I_k(η)}`.
pub fn t_eta(f: &SpVec<f64>, eta: &[usize]) -> Result<SpVec<f64>> {
    check_schedule(eta)?;
    if let Some(n) = f.max_index() {
        if n > eta.len() {
            return Err(invalid(format!("index {n} beyond the schedule length {}", eta.len())));
        }
    }
    let mut starts = Vec::with_capacity(eta.len());
    let mut next = 1;
    for &m in eta {
        starts.push(next);
        next += m;
    }
    let mut pairs = Vec::new();
    for (k, a) in f.iter() {
        let m = eta[k - 1];
        let v = a / m as f64;
        pairs.extend((0..m).map(|i| (starts[k - 1] + i, v)));
    }
    SpVec::from_pairs(pairs)
}

pub fn lorentz_1q(q: f64) -> Result<SpaceSpec> {
    SpaceSpec::lorentz(1.0, Some(q), WeightSpec::constant(1.0)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TEtaWitness {
    pub family: String,
    pub len: usize,
    pub support: usize,
    pub ratio: f64,
    pub vector: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TEtaReport {
    pub q: f64,
    pub samples: usize,
    pub max_ratio: f64,
    pub worst_vector: String,
    /// `q ≥ 1`: every sampled ratio is at most `1 + 1e−9`.
    pub contraction_holds: Option<bool>,
    /// `q < 1`: the best structured vector found within the support budget.
    pub witness: Option<TEtaWitness>,
}

/// Random vectors on `1..=len` with random signs and magnitudes.
pub fn t_eta_samples(n: usize, len: usize, seed: u64) -> Vec<SpVec<f64>> {
    let family = TestFamily::new(len).with_seed(seed);
    let mut rng = family.rng(0x7e7a);
    let mut out = vec![SpVec::from_pairs([(1, 1.0)]).expect("valid")];
    while out.len() < n {
        let k = rng.gen_range(1..=len);
        let coeffs: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        out.push(SpVec::from_dense(&coeffs));
    }
    out
}

fn ratio(space: &SpaceSpec, f: &SpVec<f64>, eta: &[usize]) -> Result<f64> {
    Ok(space.nrm(&t_eta(f, eta)?) / space.nrm(f))
}

/// Harmonic, flat and power-decay prefixes whose image fits the support budget.
pub fn t_eta_witness_search(q: f64, eta: &[usize], support_cap: usize) -> Result<Option<TEtaWitness>> {
    let space = lorentz_1q(q)?;
    let families: [(&str, fn(usize) -> f64); 4] = [
        ("harmonic", |k| 1.0 / k as f64),
        ("flat", |_| 1.0),
        ("sqrt-decay", |k| 1.0 / (k as f64).sqrt()),
        ("square-decay", |k| 1.0 / (k * k) as f64),
    ];
    let mut best: Option<TEtaWitness> = None;
    for (name, coeff) in families {
        let mut support = 0;
        for len in 1..=eta.len() {
            support += eta[len - 1];
            if support > support_cap {
                break;
            }
            let f = SpVec::from_dense(&(1..=len).map(coeff).collect::<Vec<_>>());
            let r = ratio(&space, &f, eta)?;
            if best.as_ref().map_or(true, |b| r > b.ratio) {
                best = Some(TEtaWitness { family: name.into(), len, support, ratio: r, vector: f.to_literal() });
            }
        }
    }
    Ok(best)
}

pub fn t_eta_check(q: f64, eta: &[usize], samples: &[SpVec<f64>]) -> Result<TEtaReport> {
    if !(q > 0.0) {
        return Err(invalid(format!("need q > 0, got {q}")));
    }
    check_schedule(eta)?;
    let space = lorentz_1q(q)?;
    let mut max_ratio = 0.0f64;
    let mut worst_vector = String::new();
    for f in samples.iter().filter(|f| !f.is_empty()) {
        let r = ratio(&space, f, eta)?;
        if r > max_ratio {
            max_ratio = r;
            worst_vector = f.to_literal();
        }
    }
    let (contraction_holds, witness) = if q >= 1.0 {
        (Some(max_ratio <= 1.0 + 1e-9), None)
    } else {
        (None, t_eta_witness_search(q, eta, WITNESS_SUPPORT)?)
    };
    Ok(TEtaReport { q, samples: samples.len(), max_ratio, worst_vector, contraction_holds, witness })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_spreads_blocks() {
        let f = SpVec::from_dense(&[2.0, -4.0]);
        let t = t_eta(&f, &[2, 4]).unwrap();
        assert_eq!(t, SpVec::from_dense(&[1.0, 1.0, -1.0, -1.0, -1.0, -1.0]));
        assert!(t_eta(&f, &[2]).is_err());
        assert!(t_eta(&f, &[2, 2]).is_err());
    }

    #[test]
    fn spike_contracts() {
        let space = lorentz_1q(2.0).unwrap();
        let e1 = SpVec::from_pairs([(1, 1.0)]).unwrap();
        assert!(ratio(&space, &e1, &dyadic_schedule(4)).unwrap() <= 1.0);
    }

    #[test]
    fn bounded_for_q_two() {
        let r = t_eta_check(2.0, &dyadic_schedule(10), &t_eta_samples(100, 10, 5)).unwrap();
        assert_eq!(r.contraction_holds, Some(true));
        assert!(r.max_ratio <= 1.0 + 1e-9);
    }

    #[test]
    fn unbounded_for_q_half() {
        let w = t_eta_witness_search(0.5, &dyadic_schedule(20), WITNESS_SUPPORT).unwrap().unwrap();
        assert!(w.ratio > 2.0, "{w:?}");
        assert!(w.support <= WITNESS_SUPPORT);
        let f = SpVec::parse_literal(&w.vector).unwrap();
        let space = lorentz_1q(0.5).unwrap();
        assert!((ratio(&space, &f, &dyadic_schedule(20)).unwrap() - w.ratio).abs() < 1e-12);
    }
}
