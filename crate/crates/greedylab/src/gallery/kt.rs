//! The KT-method examples: a non-quasi-greedy witness for `KT[ℓ_{1,q}, u]`
//! and the per-vector quasi-greedy inequality for `KT[ℓ_{p,q}, u_{1/p}]`.

use crate::basis::{enumerate_greedy_sets, greedy_set};
use crate::constants::TestFamily;
use crate::core::{nonincreasing_rearrangement, SpVec, WeightSpec};
use crate::error::{invalid, Error, Result};
use crate::spaces::{kernels, SpaceSpec};
use rand::Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Largest support materialized by [`KtWitness::materialize`].
pub const MATERIALIZE_CAP: usize = 1 << 21;
/// Power sums over runs shorter than this are summed term by term.
const EXACT_RUN: u64 = 64;

/// A run of `len` equal coefficients starting at `start`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Run {
    pub start: u64,
    pub len: u64,
    pub value: f64,
}

/// `Σ_{n=a}^{b} n^{q−1}`, closed form for `q ∈ {1, 2}`, Euler–Maclaurin for long runs.
pub fn power_sum(q: f64, a: u64, b: u64) -> f64 {
    if b < a {
        return 0.0;
    }
    if q == 1.0 {
        return (b - a + 1) as f64;
    }
    if q == 2.0 {
        let (a, b) = (a as f64, b as f64);
        return (b * (b + 1.0) - (a - 1.0) * a) / 2.0;
    }
    if b - a < EXACT_RUN || a < EXACT_RUN {
        let head_end = b.min(a.max(EXACT_RUN));
        let head: f64 = (a..=head_end).map(|n| (n as f64).powf(q - 1.0)).sum();
        return head + power_sum(q, head_end + 1, b);
    }
    let (x, y) = (a as f64, b as f64);
    let f = |t: f64| t.powf(q - 1.0);
    let d1 = |t: f64| (q - 1.0) * t.powf(q - 2.0);
    let d3 = |t: f64| (q - 1.0) * (q - 2.0) * (q - 3.0) * t.powf(q - 4.0);
    (y.powf(q) - x.powf(q)) / q + (f(x) + f(y)) / 2.0 + (d1(y) - d1(x)) / 12.0 - (d3(y) - d3(x)) / 720.0
}

/// `‖·‖_{1,q}` (constant weight) of a vector given by runs, from the
/// runs of its non-increasing rearrangement in order.
fn lorentz_1q_runs(q: f64, sorted: &[(f64, u64)]) -> f64 {
    let mut pos = 0u64;
    let mut acc = 0.0;
    for &(v, len) in sorted {
        acc += v.abs().powf(q) * power_sum(q, pos + 1, pos + len);
        pos += len;
    }
    acc.powf(1.0 / q)
}

/// `sup_m |Σ_{n≤m} a_n|` of a vector given by consecutive runs.
fn partial_sum_sup(runs: &[Run]) -> f64 {
    let mut acc = 0.0f64;
    let mut best = 0.0f64;
    for r in runs {
        // Partial sums are monotone inside a run, so endpoints suffice.
        best = best.max(acc.abs());
        acc += r.value * r.len as f64;
        best = best.max(acc.abs());
    }
    best
}

/// `g` = blocks of `m_k = k·N` copies of `a_k/m_k`, each followed by the spike
/// `−a_k`, with `a_k = 1/k` for `k ≤ N`; `h` = the spikes, a greedy part of `g`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KtWitness {
    pub q: f64,
    #[serde(rename = "N")]
    pub n: usize,
    /// `‖h‖_KT / ‖g‖_KT`.
    pub ratio: f64,
    pub h_norm: f64,
    pub g_norm: f64,
    /// `‖h‖_{1,q}` and `‖h‖_u`.
    pub h_lorentz: f64,
    pub h_partial: f64,
    /// `‖g‖_{1,q}` and `‖g‖_u`.
    pub g_lorentz: f64,
    pub g_partial: f64,
    /// Support size of `g`.
    pub support: u64,
    /// Cardinality of the greedy set carrying `h`.
    pub greedy_set_size: usize,
    /// SHA-256 of the run-length description of `g`.
    pub digest: String,
    pub space: String,
    #[serde(skip)]
    pub runs: Vec<Run>,
}

impl KtWitness {
    /// `g` as an explicit sparse vector (budget-capped).
    pub fn materialize(&self) -> Result<(SpVec<f64>, SpVec<f64>)> {
        if self.support > MATERIALIZE_CAP as u64 {
            return Err(Error::Budget(format!("support {} exceeds {MATERIALIZE_CAP}", self.support)));
        }
        let mut g = Vec::with_capacity(self.support as usize);
        let mut h = Vec::with_capacity(self.n);
        for r in &self.runs {
            for i in 0..r.len {
                g.push(((r.start + i) as usize, r.value));
            }
            if r.len == 1 && r.value < 0.0 {
                h.push((r.start as usize, r.value));
            }
        }
        Ok((SpVec::from_pairs(g)?, SpVec::from_pairs(h)?))
    }
}

pub fn kt_witness_space(q: f64) -> String {
    format!("kt(lorentz:p=1,q={q},w=const:1 ; w=const:1)")
}

pub fn kt_not_qg_witness(q: f64, n: usize) -> Result<KtWitness> {
    if !(q > 1.0 && q.is_finite()) {
        return Err(invalid(format!("the witness needs 1 < q < ∞, got {q}")));
    }
    if n == 0 {
        return Err(invalid("support size N must be positive"));
    }
    let big = n as u64;
    let mut runs = Vec::with_capacity(2 * n);
    let mut next = 1u64;
    for k in 1..=big {
        let a = 1.0 / k as f64;
        let m = k * big;
        runs.push(Run { start: next, len: m, value: a / m as f64 });
        next += m;
        runs.push(Run { start: next, len: 1, value: -a });
        next += 1;
    }
    let support = next - 1;
    // Rearrangement: spikes 1/k descending, then blocks 1/(k²N) descending.
    let sorted: Vec<(f64, u64)> = (1..=big)
        .map(|k| (1.0 / k as f64, 1))
        .chain((1..=big).map(|k| (1.0 / (k * k * big) as f64, k * big)))
        .collect();
    let g_lorentz = lorentz_1q_runs(q, &sorted);
    let g_partial = partial_sum_sup(&runs);
    let spikes: Vec<(f64, u64)> = (1..=big).map(|k| (1.0 / k as f64, 1)).collect();
    let h_lorentz = lorentz_1q_runs(q, &spikes);
    let spike_runs: Vec<Run> = runs.iter().copied().filter(|r| r.value < 0.0).collect();
    let h_partial = partial_sum_sup(&spike_runs);
    let h_norm = h_lorentz.max(h_partial);
    let g_norm = g_lorentz.max(g_partial);
    let mut hasher = Sha256::new();
    hasher.update(format!("kt-not-qg;q={q};N={n};"));
    for r in &runs {
        hasher.update(format!("{}+{}x{:016x};", r.start, r.len, r.value.to_bits()));
    }
    Ok(KtWitness {
        q,
        n,
        ratio: h_norm / g_norm,
        h_norm,
        g_norm,
        h_lorentz,
        h_partial,
        g_lorentz,
        g_partial,
        support,
        greedy_set_size: n,
        digest: hex::encode(hasher.finalize()),
        space: kt_witness_space(q),
        runs,
    })
}

/// Witnesses along `N ∈ schedule` and whether the ratios are nondecreasing.
pub fn kt_not_qg_sequence(q: f64, schedule: &[usize]) -> Result<(Vec<KtWitness>, bool)> {
    let ws = schedule.iter().map(|&n| kt_not_qg_witness(q, n)).collect::<Result<Vec<_>>>()?;
    let monotone = ws.windows(2).all(|w| w[1].ratio >= w[0].ratio);
    Ok((ws, monotone))
}

/// Numerical value of `C[s,r] = sup_n s_n^{r−1} Σ_j s_j^{−r} s_{n+j−1}/(n+j−1)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CsrEstimate {
    pub r: f64,
    /// Supremum over the `n`-grid up to `n_max`.
    pub value: f64,
    /// Supremum over the part of the grid with `n ≤ n_max/4`.
    pub value_quarter: f64,
    pub n_max: usize,
    /// Number of series terms summed before the tail estimate.
    pub terms: usize,
    /// Smallest fitted tail decay exponent (must exceed 1).
    pub tail_exponent: f64,
    /// The supremum moved by at most 2% over the last quarter of the range.
    pub stabilized: bool,
}

/// Grid of `n`: every `n ≤ 64`, then geometric steps of 1.2 up to `n_max`.
fn n_grid(n_max: usize) -> Vec<usize> {
    let mut g: Vec<usize> = (1..=n_max.min(64)).collect();
    let mut x = 64.0f64;
    while (x as usize) < n_max {
        x *= 1.2;
        g.push((x as usize).min(n_max));
    }
    g.dedup();
    g
}

/// `C[s,r]` with `2^20` series terms and a power-law tail fitted at the cut.
pub fn c_sr(w: &WeightSpec, r: f64, n_max: usize) -> Result<CsrEstimate> {
    c_sr_with_terms(w, r, n_max, 1 << 20)
}

pub fn c_sr_with_terms(w: &WeightSpec, r: f64, n_max: usize, terms: usize) -> Result<CsrEstimate> {
    if r <= 1.0 {
        return Err(invalid(format!("C[s,r] needs r > 1, got {r}")));
    }
    let s = w.primitive_table(terms + n_max);
    let inv: Vec<f64> = (0..=terms).map(|j| if j == 0 { 0.0 } else { s[j].powf(-r) }).collect();
    let dens: Vec<f64> = (0..s.len()).map(|k| if k == 0 { 0.0 } else { s[k] / k as f64 }).collect();
    let mut value: f64 = 0.0;
    let mut value_quarter: f64 = 0.0;
    let mut tail_exponent = f64::INFINITY;
    for n in n_grid(n_max) {
        let term = |j: usize| inv[j] * dens[n + j - 1];
        let sum: f64 = (1..=terms).map(term).sum();
        let (t_half, t_end) = (term(terms / 2), term(terms));
        let beta = (t_half / t_end).log2();
        tail_exponent = tail_exponent.min(beta);
        let tail = if beta > 1.0 { t_end * terms as f64 / (beta - 1.0) } else { f64::INFINITY };
        let v = s[n].powf(r - 1.0) * (sum + tail);
        value = value.max(v);
        if 4 * n <= n_max {
            value_quarter = value_quarter.max(v);
        }
    }
    if !(tail_exponent > 1.0 && value.is_finite()) {
        return Err(Error::NonConvergence(format!("C[s,{r}] series tail decays like j^-{tail_exponent:.3}")));
    }
    Ok(CsrEstimate {
        r,
        value,
        value_quarter,
        n_max,
        terms,
        tail_exponent,
        stabilized: value <= 1.02 * value_quarter,
    })
}

/// Exponents scanned when no `r` is requested.
pub const R_SCAN: [f64; 4] = [1.1, 1.25, 1.5, 2.0];
/// Range of `n` over which `C[s,r]` is evaluated.
pub const CSR_RANGE: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KtQgViolation {
    pub vector: String,
    pub set: Vec<usize>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KtQgReport {
    pub p: f64,
    pub q: f64,
    pub space: String,
    pub csr: CsrEstimate,
    /// `2(1 + C[s,r])`.
    pub constant: f64,
    pub samples: usize,
    pub checks: usize,
    /// Samples whose tie levels exceeded the enumeration cap (greedy chain only).
    pub capped: usize,
    pub violations: usize,
    /// Largest `‖S_A f‖_w / max{‖f‖_{1,∞,w}, ‖f‖_w}` seen.
    pub worst_ratio: f64,
    pub witnesses: Vec<KtQgViolation>,
}

/// `sup_n a*_n s_n`.
pub fn weak_lorentz_norm(w: &WeightSpec, f: &SpVec<f64>) -> f64 {
    nonincreasing_rearrangement(f)
        .iter()
        .enumerate()
        .map(|(i, a)| a * w.s(i + 1))
        .fold(0.0, f64::max)
}

/// `‖f‖_w = sup_m |Σ_{n≤m} a_n w_n|`.
pub fn partial_sum_norm(w: &WeightSpec, f: &SpVec<f64>) -> f64 {
    kernels::sw(f.iter(), |n| w.w(n))
}

/// Random vectors on `1..=dim`: uniform, cubed-uniform and sign-biased draws.
pub fn kt_qg_samples(n: usize, dim: usize, seed: u64) -> Vec<SpVec<f64>> {
    let family = TestFamily::new(dim).with_seed(seed);
    let mut rng = family.rng(0x6b71);
    let mut out = vec![SpVec::from_pairs([(1, 1.0)]).expect("valid")];
    while out.len() < n {
        let kind = out.len() % 3;
        let coeffs: Vec<f64> = (0..dim)
            .map(|_| {
                let u: f64 = rng.gen_range(-1.0..1.0);
                match kind {
                    0 => u,
                    1 => u * u * u,
                    _ => 0.5 * u + if rng.gen_bool(0.8) { 0.5 } else { -0.5 },
                }
            })
            .collect();
        out.push(SpVec::from_dense(&coeffs));
    }
    out
}

/// Checks `‖S_A f‖_w ≤ 2(1 + C[s,r]) max{‖f‖_{1,∞,w}, ‖f‖_w}` for all greedy sets.
pub fn kt_qg_bound_check(p: f64, q: f64, samples: &[SpVec<f64>], r: Option<f64>, tol: f64) -> Result<KtQgReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(invalid(format!("need 1 < p < ∞, got {p}")));
    }
    if !(q > 1.0) {
        return Err(invalid(format!("need q > 1, got {q}")));
    }
    let w = WeightSpec::potential(1.0 / p)?;
    let csr = match r {
        Some(r) => c_sr(&w, r, CSR_RANGE)?,
        None => R_SCAN
            .iter()
            .filter_map(|&r| c_sr(&w, r, CSR_RANGE).ok())
            .filter(|c| c.stabilized)
            .min_by(|a, b| a.value.total_cmp(&b.value))
            .ok_or_else(|| Error::NonConvergence("no admissible r in the scan".into()))?,
    };
    let constant = 2.0 * (1.0 + csr.value);
    let mut report = KtQgReport {
        p,
        q,
        space: format!("kt(lorentz:p=1,q={q},w=pot:{} ; w=pot:{})", 1.0 / p, 1.0 / p),
        csr,
        constant,
        samples: samples.len(),
        checks: 0,
        capped: 0,
        violations: 0,
        worst_ratio: 0.0,
        witnesses: Vec::new(),
    };
    for f in samples {
        let base = weak_lorentz_norm(&w, f).max(partial_sum_norm(&w, f));
        let mut sets = Vec::new();
        let mut capped = false;
        for m in 0..=f.len() {
            match enumerate_greedy_sets(f, m) {
                Ok(s) => sets.extend(s),
                Err(Error::Budget(_)) => {
                    capped = true;
                    sets.push(greedy_set(f, m));
                }
                Err(e) => return Err(e),
            }
        }
        report.capped += usize::from(capped);
        for a in sets {
            let lhs = partial_sum_norm(&w, &f.restrict(&a));
            let rhs = constant * base;
            report.checks += 1;
            if base > 0.0 {
                report.worst_ratio = report.worst_ratio.max(lhs / base);
            }
            if lhs > rhs * (1.0 + tol) + tol {
                report.violations += 1;
                if report.witnesses.len() < 8 {
                    report.witnesses.push(KtQgViolation { vector: f.to_literal(), set: a.into_iter().collect(), lhs, rhs });
                }
            }
        }
    }
    Ok(report)
}

/// The space `KT[ℓ_{p,q}, u_{1/p}]` as a parsed spec.
pub fn kt_greedy_space(p: f64, q: f64) -> Result<SpaceSpec> {
    SpaceSpec::parse(&format!("kt(lorentz:p=1,q={q},w=pot:{} ; w=pot:{})", 1.0 / p, 1.0 / p))
}
