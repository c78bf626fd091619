//! Democracy functions, the dual fundamental table and the Lorentz sandwich check.

use super::family::TestFamily;
use super::search::build_set_table;
use crate::basis::{greedy_order, truncation_u, BasisModel};
use crate::core::{geom_constants, nonincreasing_rearrangement, IndexSet, SignPattern, SpVec};
use crate::error::{Error, Result};
use crate::spaces::SpaceKind;
use serde::Serialize;

/// Sets are exhaustive up to this dimension for `φ_u`, `φ_l`.
const PLAIN_SET_CAP: usize = 16;
/// Sets are exhaustive up to this dimension for the signed variants.
const SIGNED_SET_CAP: usize = 10;
/// Sign patterns tried per level set when augmenting the sandwich sequences.
const AUGMENT_SIGNS: usize = 32;

/// `φ_u(m)`, `φ_l(m)`, `φ^ε_u(m)`, `φ^ε_l(m)` for `m = 1..=m_max`.
///
/// Unless `exact`, upper functions are lower bounds of the supremum and lower
/// functions are upper bounds of the infimum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DemocracyFunctions {
    pub m: Vec<usize>,
    pub phi_u: Vec<f64>,
    pub phi_l: Vec<f64>,
    pub phi_eps_u: Vec<f64>,
    pub phi_eps_l: Vec<f64>,
    pub exact: bool,
}

pub fn democracy_functions(model: &BasisModel<f64>, m_max: usize, family: &TestFamily) -> Result<DemocracyFunctions> {
    let m: Vec<usize> = (1..=m_max).collect();
    model.check_dim(m_max)?;
    if model.is_symmetric() {
        let phi: Vec<f64> = m.iter().map(|&k| model.norm(&SpVec::indicator(&(1..=k).collect(), None))).collect();
        return Ok(DemocracyFunctions {
            m,
            phi_u: phi.clone(),
            phi_l: phi.clone(),
            phi_eps_u: phi.clone(),
            phi_eps_l: phi,
            exact: true,
        });
    }
    let mut fam = family.clone();
    fam.dim = family.dim.max(m_max);
    model.check_dim(fam.dim)?;
    let plain: Vec<(usize, f64)> = fam
        .set_family(PLAIN_SET_CAP, 4, 21)
        .into_iter()
        .map(|a| (a.len(), model.norm(&SpVec::indicator(&a, None))))
        .collect();
    let signed = build_set_table(model, &fam, fam.set_family(SIGNED_SET_CAP, 4, 22));
    let signed: Vec<(usize, f64, f64)> = signed.iter().map(|e| (e.set.len(), e.smax, e.smin)).collect();
    let d = fam.dim;
    let upper = |vals: &mut dyn Iterator<Item = (usize, f64)>| {
        let mut by = vec![f64::NEG_INFINITY; d + 1];
        for (k, v) in vals {
            by[k] = by[k].max(v);
        }
        for k in 1..=d {
            by[k] = by[k].max(by[k - 1]);
        }
        by
    };
    let lower = |vals: &mut dyn Iterator<Item = (usize, f64)>| {
        let mut by = vec![f64::INFINITY; d + 2];
        for (k, v) in vals {
            by[k] = by[k].min(v);
        }
        for k in (1..=d).rev() {
            by[k] = by[k].min(by[k + 1]);
        }
        by
    };
    let pu = upper(&mut plain.iter().copied());
    let pl = lower(&mut plain.iter().copied());
    let su = upper(&mut signed.iter().map(|e| (e.0, e.1)));
    let sl = lower(&mut signed.iter().map(|e| (e.0, e.2)));
    let pick = |v: &[f64]| m.iter().map(|&k| v[k]).collect::<Vec<f64>>();
    Ok(DemocracyFunctions {
        phi_u: pick(&pu),
        phi_l: pick(&pl),
        // Sign patterns include the all-plus one, so the signed functions bracket the plain ones.
        phi_eps_u: m.iter().map(|&k| su[k].max(pu[k])).collect(),
        phi_eps_l: m.iter().map(|&k| sl[k].min(pl[k])).collect(),
        exact: false,
        m,
    })
}

/// Closed-form dual fundamental function `m ↦ ‖1_{[1..m]}‖_*` for `m = 1..=d`.
pub fn dual_fundamental(model: &BasisModel<f64>, d: usize) -> Result<Vec<f64>> {
    let unsupported = || Error::Unsupported(format!("no closed-form dual fundamental function for {}", model.label()));
    let kind = model.space().map(|s| s.kind()).ok_or_else(unsupported)?;
    let ms = 1..=d;
    Ok(match kind {
        SpaceKind::Lp(p) if p.is_infinite() => ms.map(|m| m as f64).collect(),
        SpaceKind::Lp(p) if *p >= 1.0 => ms.map(|m| (m as f64).powf(1.0 - 1.0 / p)).collect(),
        SpaceKind::Lp(_) => ms.map(|_| 1.0).collect(),
        SpaceKind::C0 => ms.map(|m| m as f64).collect(),
        SpaceKind::Lorentz { p, w, .. } if *p == 1.0 => ms.map(|m| m as f64 / w.s(m)).collect(),
        _ => return Err(unsupported()),
    })
}

/// Outcome of the two-sided Lorentz embedding check on a sample set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichReport {
    pub samples: usize,
    /// Violations of `‖f‖ ≤ 4A_p² ‖f‖_{p,p,Δ((φ^ε_u)^p)}`.
    pub lower_violations: usize,
    /// Violations of `sup_m a*_m φ^ε_l(m) ≤ Λ_u ‖f‖`.
    pub upper_violations: usize,
    /// Smallest relative margin `(rhs − lhs)/rhs` of each side.
    pub worst_lower_margin: f64,
    pub worst_upper_margin: f64,
    /// `Λ_u` after raising it to the samples' own truncation ratios.
    pub lambda_u: f64,
}

/// Checks both embeddings on `samples` with the democracy functions `demo`
/// and the estimate `lambda_u`.
///
/// Searched sequences are only one-sided bounds, so before each evaluation
/// they are corrected with the sets the inequalities actually use: `φ^ε_u`
/// is raised on the sample's dyadic level sets, `φ^ε_l` is lowered on its
/// greedy sets with the sample's signs, and `Λ_u` is raised to the sample's
/// truncation ratios.
pub fn embedding_sandwich_check(
    model: &BasisModel<f64>,
    demo: &DemocracyFunctions,
    lambda_u: f64,
    samples: &[SpVec<f64>],
    family: &TestFamily,
    tol: f64,
) -> Result<SandwichReport> {
    let p = model.p_exponent();
    let a_p = geom_constants(p)?.a_p;
    let mut report = SandwichReport {
        samples: samples.len(),
        lower_violations: 0,
        upper_violations: 0,
        worst_lower_margin: f64::INFINITY,
        worst_upper_margin: f64::INFINITY,
        lambda_u,
    };
    let mut lambda = lambda_u;
    let mut upper_pairs = Vec::with_capacity(samples.len());
    for f in samples.iter().filter(|f| !f.is_empty()) {
        let nf = model.norm(f);
        let astar = nonincreasing_rearrangement(f);
        let k = astar.len();
        // Lower embedding.
        let mut s: Vec<f64> = (0..k).map(|i| demo.phi_eps_u.get(i).copied().unwrap_or(0.0)).collect();
        let t = astar[0];
        let order = greedy_order(f);
        let mut start = 0;
        while start < k {
            let level = ((t / f.get(order[start]).abs()).log2().floor()).max(0.0);
            let hi = t * 2f64.powf(-level);
            let end = start + order[start..].iter().take_while(|&&n| f.get(n).abs() > hi / 2.0).count();
            let block: IndexSet = order[start..end].iter().copied().collect();
            let mut signs = family.signs_sampled(&block, AUGMENT_SIGNS, 0x5a5a);
            signs.push(SignPattern::of(&f.restrict(&block)));
            let v = signs.iter().map(|e| model.norm(&SpVec::indicator(&block, Some(e)))).fold(0.0, f64::max);
            s[block.len() - 1] = s[block.len() - 1].max(v);
            start = end.max(start + 1);
        }
        for i in 1..k {
            s[i] = s[i].max(s[i - 1]);
        }
        let mut acc = 0.0;
        let mut prev = 0.0f64;
        for (a, &si) in astar.iter().zip(&s) {
            acc += a.powf(p) * (si.powf(p) - prev.powf(p));
            prev = si;
        }
        let rhs = 4.0 * a_p * a_p * acc.powf(1.0 / p);
        if nf > rhs * (1.0 + tol) {
            report.lower_violations += 1;
        }
        report.worst_lower_margin = report.worst_lower_margin.min((rhs - nf) / rhs);
        // Upper embedding.
        let mut phi_l: Vec<f64> = (0..k).map(|i| demo.phi_eps_l.get(i).copied().unwrap_or(f64::INFINITY)).collect();
        let eps = SignPattern::of(f);
        let mut prefix = IndexSet::new();
        for (i, &n) in order.iter().enumerate() {
            prefix.insert(n);
            let ind = model.norm(&SpVec::indicator(&prefix, Some(&eps)));
            phi_l[i] = phi_l[i].min(ind);
            let u = model.norm(&truncation_u(f, &prefix)?);
            lambda = lambda.max(u / nf);
        }
        for i in (0..k.saturating_sub(1)).rev() {
            phi_l[i] = phi_l[i].min(phi_l[i + 1]);
        }
        let lhs = astar.iter().zip(&phi_l).map(|(a, s)| a * s).fold(0.0, f64::max);
        upper_pairs.push((lhs, nf));
    }
    for (lhs, nf) in upper_pairs {
        let rhs = lambda * nf;
        if lhs > rhs * (1.0 + tol) {
            report.upper_violations += 1;
        }
        report.worst_upper_margin = report.worst_upper_margin.min((rhs - lhs) / rhs);
    }
    report.lambda_u = lambda;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{estimate_constant, ConstantKind};

    #[test]
    fn lp_fundamental_functions() {
        let model = BasisModel::parse("lp:0.5").unwrap();
        let d = democracy_functions(&model, 8, &TestFamily::new(8)).unwrap();
        assert!(d.exact);
        for (i, &m) in d.m.iter().enumerate() {
            let want = (m as f64).powi(2);
            for v in [d.phi_u[i], d.phi_l[i], d.phi_eps_u[i], d.phi_eps_l[i]] {
                assert!((v - want).abs() < 1e-9 * want);
            }
        }
    }

    #[test]
    fn searched_functions_are_ordered() {
        let model = BasisModel::parse("vp:0.5").unwrap();
        let d = democracy_functions(&model, 6, &TestFamily::new(6)).unwrap();
        assert!(!d.exact);
        for i in 0..6 {
            assert!(d.phi_eps_l[i] <= d.phi_l[i] && d.phi_l[i] <= d.phi_u[i] && d.phi_u[i] <= d.phi_eps_u[i]);
            if i > 0 {
                assert!(d.phi_u[i] >= d.phi_u[i - 1] && d.phi_l[i] >= d.phi_l[i - 1]);
            }
        }
    }

    #[test]
    fn dual_table() {
        let l2 = BasisModel::parse("lp:2").unwrap();
        assert!((dual_fundamental(&l2, 4).unwrap()[3] - 2.0).abs() < 1e-12);
        assert_eq!(dual_fundamental(&BasisModel::parse("c0").unwrap(), 3).unwrap(), vec![1.0, 2.0, 3.0]);
        assert!(matches!(dual_fundamental(&BasisModel::parse("sw:w=const:1").unwrap(), 3), Err(Error::Unsupported(_))));
    }

    #[test]
    fn sandwich_holds_on_lp() {
        let model = BasisModel::parse("lp:0.5").unwrap();
        let fam = TestFamily::new(10).with_random_draws(40);
        let demo = democracy_functions(&model, 10, &fam).unwrap();
        let lam = estimate_constant(ConstantKind::LambdaU, &model, &fam).unwrap().value;
        let samples = fam.vector_pool();
        let r = embedding_sandwich_check(&model, &demo, lam, &samples, &fam, 1e-9).unwrap();
        assert_eq!((r.lower_violations, r.upper_violations), (0, 0));
        assert!(r.worst_lower_margin >= 0.0 && r.worst_upper_margin >= -1e-12);
    }

    #[test]
    fn single_unit_vector_upper_side_is_tight() {
        let model = BasisModel::parse("lp:1").unwrap();
        let fam = TestFamily::new(4);
        let demo = democracy_functions(&model, 4, &fam).unwrap();
        let r = embedding_sandwich_check(&model, &demo, 1.0, &[SpVec::from_dense(&[3.0])], &fam, 1e-9).unwrap();
        assert!(r.worst_upper_margin.abs() < 1e-12);
        assert!((r.worst_lower_margin - 0.75).abs() < 1e-12);
    }
}
