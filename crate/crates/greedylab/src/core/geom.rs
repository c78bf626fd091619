use super::Scalar;
use crate::error::{invalid, Error, Result};

/// Convexity constants of a `p`-Banach space over the reals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeomConstants<T> {
    pub p: T,
    /// `A_p = (2^p − 1)^(−1/p)`.
    pub a_p: T,
    /// `B_p = 2^(1/p) A_p`.
    pub b_p: T,
}

fn check_p<T: Scalar>(p: T) -> Result<()> {
    if !(p > T::zero() && p <= T::one()) {
        return Err(invalid(format!("convexity exponent must lie in (0,1], got {p}")));
    }
    Ok(())
}

pub fn geom_constants<T: Scalar>(p: T) -> Result<GeomConstants<T>> {
    check_p(p)?;
    let two = T::lit(2.0);
    let a_p = (two.powf(p) - T::one()).powf(-p.recip());
    let b_p = two.powf(p.recip()) * a_p;
    Ok(GeomConstants { p, a_p, b_p })
}

/// `η_p(u) = min_{0<t<1} (1−t^p)^(−1/p) (1−(1+t/(A_p u))^(−p))^(−1/p)`.
///
/// The search runs over the logit `y = ln(t/(1−t))`, which resolves both
/// endpoint regimes; the three best grid minima seed golden-section refinements.
pub fn eta_p<T: Scalar>(p: T, u: T) -> Result<T> {
    check_p(p)?;
    if !(u > T::zero() && u.is_finite()) {
        return Err(invalid(format!("eta_p needs u > 0, got {u}")));
    }
    let a_p = geom_constants(p)?.a_p;
    let c = (a_p * u).recip();
    let log_obj = |y: T| -> T {
        // ln t = −ln(1 + e^{−y})
        let ln_t = -((-y).exp()).ln_1p();
        let first = -(-(p * ln_t).exp_m1()).ln();
        let second = -(-(-(p * (c * ln_t.exp()).ln_1p())).exp_m1()).ln();
        (first + second) / p
    };

    const GRID: usize = 161;
    let (lo, hi) = (T::lit(-40.0), T::lit(40.0));
    let step = (hi - lo) / T::lit((GRID - 1) as f64);
    let ys: Vec<T> = (0..GRID).map(|i| lo + step * T::lit(i as f64)).collect();
    let vals: Vec<T> = ys.iter().map(|&y| log_obj(y)).collect();
    let mut order: Vec<usize> = (0..GRID).filter(|&i| vals[i].is_finite()).collect();
    if order.is_empty() {
        return Err(Error::NonConvergence("objective not finite on the search grid".into()));
    }
    order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).expect("finite"));

    let tol = T::lit(1e-9).max(T::epsilon().sqrt());
    let inv_phi = T::lit((5f64.sqrt() - 1.0) / 2.0);
    let mut best = T::infinity();
    for &i in order.iter().take(3) {
        let mut a = ys[i.saturating_sub(1)];
        let mut b = ys[(i + 1).min(GRID - 1)];
        let mut x1 = b - inv_phi * (b - a);
        let mut x2 = a + inv_phi * (b - a);
        let (mut f1, mut f2) = (log_obj(x1), log_obj(x2));
        let mut converged = false;
        for _ in 0..400 {
            if (b - a).abs() <= tol * (T::one() + a.abs().max(b.abs())) {
                converged = true;
                break;
            }
            if f1 < f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = log_obj(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = log_obj(x2);
            }
        }
        if !converged {
            return Err(Error::NonConvergence(format!("golden section stalled near y={}", ys[i])));
        }
        best = best.min(f1.min(f2)).min(vals[i]);
    }
    let eta = best.exp();
    if !eta.is_finite() {
        return Err(Error::NonConvergence("non-finite minimum".into()));
    }
    Ok(eta.max(T::one()))
}
