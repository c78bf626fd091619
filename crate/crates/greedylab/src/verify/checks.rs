//! The check table and the evaluation of each check on one model.

use super::samples::{indicator_plus_disjoint, random_vector};
use super::{CheckResult, Context};
use crate::basis::{greedy_projection, sigma, sigma_tilde, SigmaMode};
use crate::constants::{democracy_functions, embedding_sandwich_check, ConstantEstimate, ConstantKind, Estimator};
use crate::core::{eta_p, geom_constants, SpVec, WeightKind};
use crate::error::{Error, Result};
use crate::gallery::{kt_qg_bound_check, kt_qg_samples};
use crate::spaces::SpaceKind;
use rand::Rng;
use rayon::prelude::*;

use ConstantKind::*;

/// How a check is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    /// `lhs ≤ F(rhs estimates)`: the left side is the estimate of `lhs`
    /// (`None`: computed directly), the right side an analytic expression in
    /// the `rhs` estimates. Only evaluated on symmetric lattices, where every
    /// estimate is exact.
    Chain { lhs: Option<ConstantKind>, rhs: &'static [ConstantKind] },
    /// Both sides evaluated directly for each sample vector.
    PerVector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckDef {
    pub id: &'static str,
    pub statement: &'static str,
    pub kind: CheckKind,
}

const fn chain(id: &'static str, statement: &'static str, lhs: Option<ConstantKind>, rhs: &'static [ConstantKind]) -> CheckDef {
    CheckDef { id, statement, kind: CheckKind::Chain { lhs, rhs } }
}

const fn per_vector(id: &'static str, statement: &'static str) -> CheckDef {
    CheckDef { id, statement, kind: CheckKind::PerVector }
}

pub const CHECKS: [CheckDef; 20] = [
    chain("unc-multiplier", "‖M_γ‖ ≤ A_p K_su for 0 ≤ γ_n ≤ 1", None, &[Ksu]),
    chain("unc-lattice", "K_u ≤ B_p K_su", Some(Ku), &[Ksu]),
    chain("ucc-window", "1 < 1 + 1/(A_p K_sc)", None, &[Ksc]),
    chain("ucc-product", "K_pu ≤ A_p K_sc K_lc", Some(Kpu), &[Ksc, Klc]),
    chain("qg-lucc", "K_lc ≤ C_qg η_p(C_qg)", Some(Klc), &[Cqg]),
    chain("qg-lambda-u", "Λ_u ≤ C_qg² η_p(C_qg)", Some(LambdaU), &[Cqg]),
    chain("qg-lambda-t", "Λ_t ≤ C_qg (1 + C_qg^p)^{1/p}", Some(LambdaT), &[Cqg]),
    chain("superdemocracy-gamma", "Δ_s ≤ B_p Γ", Some(DeltaS), &[Gamma]),
    chain("ag-gamma", "C_ag ≤ A_p Γ Λ_t", Some(Cag), &[Gamma, LambdaT]),
    chain("qg-ag", "C_qg ≤ 2^{1/p} C_ag", Some(Cqg), &[Cag]),
    chain("ag-bidemocracy", "C_ag ≤ (C_qg^p + Δ_sb^p)^{1/p}", Some(Cag), &[Cqg, DeltaSb]),
    chain("g-ag-lower", "C_ag ≤ C_g", Some(Cag), &[Cg]),
    chain("g-ag-upper", "C_g ≤ C_ag K_su", Some(Cg), &[Cag, Ksu]),
    chain("g-gamma", "C_g ≤ min{A_p² Γ K_su, A_p Γ K_u}", Some(Cg), &[Gamma, Ksu, Ku]),
    per_vector("convexity", "‖Σ (1−b_j) g_j + b_j h_j‖ ≤ A_p max_A ‖Σ_{j∉A} g_j + Σ_{j∈A} h_j‖, 0 ≤ b_j ≤ 1"),
    per_vector("convexity-signed", "‖Σ a_j f_j‖ ≤ B_p max_A ‖Σ_{j∈A} f_j‖, |a_j| ≤ 1"),
    per_vector("lebesgue", "σ̃_r(f) ≤ 2^{1/p} A_p η_p(1) max{1, φ^ε_u(m)/φ^ε_l(r−m)} σ_m(f), r > m"),
    per_vector("qg-indicator", "‖1_{ε,A}‖ ≤ 2^{1/p} C_qg ‖1_{ε,A} + f‖, f disjoint, |f_n| < 1"),
    per_vector("kt-goal", "‖S_A f‖_w ≤ 2(1 + C[s,r]) max{‖f‖_{1,∞,w}, ‖f‖_w}, A greedy"),
    per_vector("sandwich", "‖f‖ ≤ 4A_p² ‖f‖_{p,p,Δ((φ^ε_u)^p)} and sup_m a*_m φ^ε_l(m) ≤ Λ_u ‖f‖"),
];

/// Largest support used by the exhaustive best-approximation check.
const LEBESGUE_SUPPORT: usize = 10;
/// Largest family size of the convexity checks.
const CONVEXITY_FAMILY: usize = 10;
/// Random multipliers per pool vector in the multiplier check.
const MULTIPLIER_DRAWS: usize = 16;

pub(crate) fn run(def: &CheckDef, ctx: &Context) -> Vec<CheckResult> {
    let skip = |reason: String| vec![CheckResult::skipped(def.id, &ctx.label, reason)];
    if let Err(e) = ctx.model.check_dim(ctx.family.dim) {
        return skip(e.to_string());
    }
    let one = |r: Result<CheckResult>| vec![r.unwrap_or_else(|e| CheckResult::skipped(def.id, &ctx.label, e.to_string()))];
    match def.kind {
        CheckKind::Chain { .. } => one(run_chain(def.id, ctx)),
        CheckKind::PerVector => match def.id {
            "convexity" => one(convexity(ctx, false)),
            "convexity-signed" => one(convexity(ctx, true)),
            "lebesgue" => one(lebesgue(ctx)),
            "qg-indicator" => one(qg_indicator(ctx)),
            "kt-goal" => one(kt_goal(ctx)),
            "sandwich" => sandwich(ctx).unwrap_or_else(|e| skip(e.to_string())),
            other => unreachable!("no evaluator for `{other}`"),
        },
    }
}

fn describe(e: &ConstantEstimate) -> String {
    let rhs = e.witness.rhs.as_ref().map_or("1".to_string(), SpVec::to_literal);
    format!("{}={} from ‖{}‖/‖{}‖", e.kind, e.value, e.witness.lhs.to_literal(), rhs)
}

fn run_chain(id: &str, ctx: &Context) -> Result<CheckResult> {
    if !ctx.model.is_symmetric() {
        return Ok(CheckResult::skipped(
            id,
            &ctx.label,
            "constant estimates are lower bounds; chains are only compared on symmetric lattices",
        ));
    }
    let est = ctx.estimator.as_ref().map_err(|m| Error::Unsupported(m.clone()))?;
    let p = ctx.model.p_exponent();
    let g = geom_constants(p)?;
    let (a, b) = (g.a_p, g.b_p);
    let get = |k: ConstantKind| est.estimate(k);
    let (lhs, rhs, witness) = match id {
        "unc-multiplier" => {
            let (v, w) = multiplier_norm(est, ctx);
            (v, a * get(Ksu)?.value, w)
        }
        "ucc-window" => {
            let ksc = get(Ksc)?;
            (1.0, 1.0 + 1.0 / (a * ksc.value), describe(&ksc))
        }
        _ => {
            let CheckKind::Chain { lhs: Some(kind), .. } = CHECKS.iter().find(|c| c.id == id).expect("known id").kind else {
                unreachable!("direct left sides handled above")
            };
            let l = get(kind)?;
            let v = |k: ConstantKind| get(k).map(|e| e.value);
            let rhs = match id {
                "unc-lattice" => b * v(Ksu)?,
                "ucc-product" => a * v(Ksc)? * v(Klc)?,
                "qg-lucc" => {
                    let c = v(Cqg)?;
                    c * eta_p(p, c)?
                }
                "qg-lambda-u" => {
                    let c = v(Cqg)?;
                    c * c * eta_p(p, c)?
                }
                "qg-lambda-t" => {
                    let c = v(Cqg)?;
                    c * (1.0 + c.powf(p)).powf(1.0 / p)
                }
                "superdemocracy-gamma" => b * v(Gamma)?,
                "ag-gamma" => a * v(Gamma)? * v(LambdaT)?,
                "qg-ag" => 2f64.powf(1.0 / p) * v(Cag)?,
                "ag-bidemocracy" => (v(Cqg)?.powf(p) + v(DeltaSb)?.powf(p)).powf(1.0 / p),
                "g-ag-lower" => v(Cg)?,
                "g-ag-upper" => v(Cag)? * v(Ksu)?,
                "g-gamma" => {
                    let gamma = v(Gamma)?;
                    (a * a * gamma * v(Ksu)?).min(a * gamma * v(Ku)?)
                }
                other => unreachable!("no chain evaluator for `{other}`"),
            };
            (l.value, rhs, describe(&l))
        }
    };
    Ok(CheckResult::evaluated(id, &ctx.label, lhs, rhs, ctx.selection.tol, witness))
}

/// Sampled `sup ‖M_γ f‖/‖f‖` over the estimator's pool and `γ ∈ [0,1]^d`.
fn multiplier_norm(est: &Estimator, ctx: &Context) -> (f64, String) {
    let mut rng = ctx.family.rng(0x6d75);
    let mut best = (1.0, "trivial γ = 1".to_string());
    for f in est.pool().iter().filter(|f| !f.is_empty()) {
        let nf = ctx.model.norm(f);
        for _ in 0..MULTIPLIER_DRAWS {
            let gamma: Vec<f64> = (0..ctx.family.dim).map(|_| rng.gen_range(0.0..=1.0)).collect();
            let mf = f.multiply(|n| gamma[n - 1]);
            let r = ctx.model.norm(&mf) / nf;
            if r > best.0 {
                best = (r, format!("‖{}‖/‖{}‖", mf.to_literal(), f.to_literal()));
            }
        }
    }
    best
}

/// Evaluates `(lhs, rhs, note)` on every sample in parallel and reports the
/// sample with the smallest relative margin.
fn per_sample<S, E, W>(id: &str, ctx: &Context, items: &[S], eval: E, witness: W) -> Result<CheckResult>
where
    S: Sync,
    E: Fn(&S) -> Result<(f64, f64, String)> + Sync,
    W: Fn(&S) -> String,
{
    let tol = ctx.selection.tol;
    let evals: Vec<(f64, f64, String)> = items.par_iter().map(&eval).collect::<Result<_>>()?;
    if evals.is_empty() {
        return Ok(CheckResult::skipped(id, &ctx.label, "no samples"));
    }
    let rel = |l: f64, r: f64| if r > 0.0 { (r - l) / r } else { -l };
    let violations = evals.iter().filter(|(l, r, _)| !(*l <= r * (1.0 + tol))).count();
    let worst = (0..evals.len())
        .min_by(|&i, &j| rel(evals[i].0, evals[i].1).total_cmp(&rel(evals[j].0, evals[j].1)).then(i.cmp(&j)))
        .expect("non-empty");
    let (lhs, rhs, note) = &evals[worst];
    let note = if note.is_empty() { String::new() } else { format!("; {note}") };
    let witness = format!("violations={violations}/{}; worst #{worst}: {}{note}", evals.len(), witness(&items[worst]));
    Ok(CheckResult::evaluated(id, &ctx.label, *lhs, *rhs, tol, witness))
}

struct Mixture {
    coeffs: Vec<f64>,
    g: Vec<SpVec<f64>>,
    h: Vec<SpVec<f64>>,
}

fn convexity(ctx: &Context, signed: bool) -> Result<CheckResult> {
    let id = if signed { "convexity-signed" } else { "convexity" };
    let p = ctx.model.p_exponent();
    let gc = geom_constants(p)?;
    let dim = ctx.family.dim;
    let mut rng = ctx.family.rng(if signed { 0xc0b2 } else { 0xc0b1 });
    let items: Vec<Mixture> = (0..ctx.selection.samples)
        .map(|_| {
            let j = rng.gen_range(1..=CONVEXITY_FAMILY);
            let coeffs = (0..j)
                .map(|_| {
                    let lo = if signed { -1.0 } else { 0.0 };
                    match rng.gen_range(0..8) {
                        0 => lo,
                        1 => 1.0,
                        _ => rng.gen_range(lo..=1.0),
                    }
                })
                .collect();
            let g = (0..j).map(|_| random_vector(&mut rng, dim, 1, dim)).collect();
            let h = if signed { Vec::new() } else { (0..j).map(|_| random_vector(&mut rng, dim, 1, dim)).collect() };
            Mixture { coeffs, g, h }
        })
        .collect();
    let model = ctx.model;
    let eval = |m: &Mixture| -> Result<(f64, f64, String)> {
        let j = m.coeffs.len();
        let mut mix = SpVec::new();
        for (i, &c) in m.coeffs.iter().enumerate() {
            mix = if signed { mix.axpy(c, &m.g[i]) } else { mix.axpy(1.0 - c, &m.g[i]).axpy(c, &m.h[i]) };
        }
        let mut best: f64 = 0.0;
        for mask in 0u32..(1 << j) {
            let mut s = SpVec::new();
            for i in 0..j {
                let chosen = mask >> i & 1 == 1;
                if signed {
                    if chosen {
                        s = s.add(&m.g[i]);
                    }
                } else {
                    s = s.add(if chosen { &m.h[i] } else { &m.g[i] });
                }
            }
            best = best.max(model.norm(&s));
        }
        let factor = if signed { gc.b_p } else { gc.a_p };
        Ok((model.norm(&mix), factor * best, String::new()))
    };
    let witness = |m: &Mixture| {
        let lits = |v: &[SpVec<f64>]| v.iter().map(SpVec::to_literal).collect::<Vec<_>>().join(" | ");
        if signed {
            format!("a={:?}; f=[{}]", m.coeffs, lits(&m.g))
        } else {
            format!("b={:?}; g=[{}]; h=[{}]", m.coeffs, lits(&m.g), lits(&m.h))
        }
    };
    per_sample(id, ctx, &items, eval, witness)
}

fn lebesgue(ctx: &Context) -> Result<CheckResult> {
    let id = "lebesgue";
    if !ctx.model.is_symmetric() {
        return Ok(CheckResult::skipped(id, &ctx.label, "the constant 2^{1/p} A_p η_p(1) needs C_qg = 1 (symmetric lattice)"));
    }
    let dim = ctx.family.dim;
    if dim < 2 {
        return Ok(CheckResult::skipped(id, &ctx.label, "needs dimension ≥ 2"));
    }
    let p = ctx.model.p_exponent();
    let c = 2f64.powf(1.0 / p) * geom_constants(p)?.a_p * eta_p(p, 1.0)?;
    let support = LEBESGUE_SUPPORT.min(dim);
    let demo = democracy_functions(ctx.model, support, ctx.family)?;
    let mut rng = ctx.family.rng(0x1eb5);
    let items: Vec<SpVec<f64>> = (0..ctx.selection.samples).map(|_| random_vector(&mut rng, dim, 2, support)).collect();
    let model = ctx.model;
    let eval = |f: &SpVec<f64>| -> Result<(f64, f64, String)> {
        let k = f.len();
        let sig: Vec<f64> = (1..=3.min(k - 1)).map(|m| sigma(model, f, m, SigmaMode::Exact).map(|s| s.value)).collect::<Result<_>>()?;
        let mut worst: Option<(f64, f64, f64, String)> = None;
        for r in 2..=k {
            let lhs = sigma_tilde(model, f, r, SigmaMode::Exact)?.value;
            for m in 1..r.min(4) {
                let ratio = demo.phi_eps_u[m - 1] / demo.phi_eps_l[r - m - 1];
                let rhs = c * ratio.max(1.0) * sig[m - 1];
                let rel = if rhs > 0.0 { (rhs - lhs) / rhs } else { -lhs };
                if worst.as_ref().map_or(true, |w| rel < w.2) {
                    worst = Some((lhs, rhs, rel, format!("m={m}, r={r}")));
                }
            }
        }
        let (lhs, rhs, _, note) = worst.expect("k ≥ 2");
        Ok((lhs, rhs, note))
    };
    per_sample(id, ctx, &items, eval, |f| format!("f={}", f.to_literal()))
}

fn qg_indicator(ctx: &Context) -> Result<CheckResult> {
    let id = "qg-indicator";
    let p = ctx.model.p_exponent();
    let mut rng = ctx.family.rng(0x9a7c);
    let items: Vec<(SpVec<f64>, SpVec<f64>)> =
        (0..ctx.selection.samples).map(|_| indicator_plus_disjoint(&mut rng, ctx.family.dim)).collect();
    let model = ctx.model;
    let estimate = ctx.estimator.as_ref().ok().and_then(|e| e.estimate(Cqg).ok()).map(|e| e.value);
    // Off the exactness regime the searched C_qg is raised to the greedy
    // ratios of the sampled vectors themselves.
    let cqg = match estimate {
        Some(v) if model.is_symmetric() => v,
        _ => items
            .par_iter()
            .map(|(a, f)| {
                let g = a.add(f);
                let ng = model.norm(&g);
                (1..=g.len()).map(|m| model.norm(&greedy_projection(&g, m)) / ng).fold(1.0, f64::max)
            })
            .reduce(|| 1.0, f64::max)
            .max(estimate.unwrap_or(1.0)),
    };
    let factor = 2f64.powf(1.0 / p) * cqg;
    let eval = |(a, f): &(SpVec<f64>, SpVec<f64>)| Ok((model.norm(a), factor * model.norm(&a.add(f)), format!("C_qg={cqg}")));
    per_sample(id, ctx, &items, eval, |(a, f)| format!("1_(ε,A)={}; f={}", a.to_literal(), f.to_literal()))
}

/// `(p, q)` when the model is `KT[d_{1,q}(w), w]` with `w_n = n^{1/p − 1}`, `q > 1`.
pub(crate) fn kt_greedy_params(ctx: &Context) -> Option<(f64, f64)> {
    let SpaceKind::Kt { inner, w } = ctx.model.space()?.kind() else { return None };
    let SpaceKind::Lorentz { p, q: Some(q), w: wi } = inner.kind() else { return None };
    let WeightKind::Potential(alpha) = w.kind() else { return None };
    (*p == 1.0 && wi == w && *q > 1.0 && *alpha > 0.0 && *alpha < 1.0).then(|| (1.0 / alpha, *q))
}

fn kt_goal(ctx: &Context) -> Result<CheckResult> {
    let id = "kt-goal";
    let Some((p, q)) = kt_greedy_params(ctx) else {
        return Ok(CheckResult::skipped(id, &ctx.label, "needs a space kt(lorentz:p=1,q>1,w=pot:a ; w=pot:a) with 0 < a < 1"));
    };
    let samples = kt_qg_samples(ctx.selection.samples, ctx.family.dim, ctx.family.seed);
    let r = kt_qg_bound_check(p, q, &samples, None, ctx.selection.tol)?;
    let witness = match r.witnesses.first() {
        Some(v) => format!("violations={}/{} sets; f={}; A={:?}", r.violations, r.checks, v.vector, v.set),
        None => format!(
            "violations=0/{} sets; kt_qg_samples(n={}, dim={}, seed={}); C[s,r]={} at r={}",
            r.checks, ctx.selection.samples, ctx.family.dim, ctx.family.seed, r.csr.value, r.csr.r
        ),
    };
    let lhs = if r.violations > 0 { r.witnesses[0].lhs / (r.witnesses[0].rhs / r.constant) } else { r.worst_ratio };
    Ok(CheckResult::evaluated(id, &ctx.label, lhs, r.constant, ctx.selection.tol, witness))
}

fn sandwich(ctx: &Context) -> Result<Vec<CheckResult>> {
    let dim = ctx.family.dim;
    let model = ctx.model;
    let demo = democracy_functions(model, dim, ctx.family)?;
    let lambda_u = ctx.estimator.as_ref().ok().and_then(|e| e.estimate(LambdaU).ok()).map_or(1.0, |e| e.value);
    let mut rng = ctx.family.rng(0x5a4d);
    let samples: Vec<SpVec<f64>> = (0..ctx.selection.samples).map(|_| random_vector(&mut rng, dim, 1, dim)).collect();
    let tol = ctx.selection.tol;
    let report = embedding_sandwich_check(model, &demo, lambda_u, &samples, ctx.family, tol)?;
    let first_violation = |upper: bool| -> Result<String> {
        for (i, f) in samples.iter().enumerate() {
            let r = embedding_sandwich_check(model, &demo, report.lambda_u, std::slice::from_ref(f), ctx.family, tol)?;
            if (upper && r.upper_violations > 0) || (!upper && r.lower_violations > 0) {
                return Ok(format!("sample #{i}: f={}", f.to_literal()));
            }
        }
        Ok(String::new())
    };
    let mut out = Vec::new();
    for (id, violations, margin, upper) in [
        ("sandwich-lower", report.lower_violations, report.worst_lower_margin, false),
        ("sandwich-upper", report.upper_violations, report.worst_upper_margin, true),
    ] {
        if !margin.is_finite() {
            out.push(CheckResult::skipped(id, &ctx.label, "no non-zero samples"));
            continue;
        }
        let mut witness = format!("violations={violations}/{}; Λ_u={}; normalized sides", report.samples, report.lambda_u);
        if violations > 0 {
            witness = format!("{witness}; {}", first_violation(upper)?);
        }
        out.push(CheckResult::evaluated(id, &ctx.label, 1.0 - margin, 1.0, tol, witness));
    }
    Ok(out)
}
