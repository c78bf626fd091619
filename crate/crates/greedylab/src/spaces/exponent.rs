//! Sampled certificates for the `r`-triangle inequality.

use crate::core::{SpVec, WeightSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Candidate exponents tried when no analytic exponent is available.
pub const EXPONENT_LADDER: [f64; 5] = [0.99, 0.9, 0.75, 0.5, 0.25];

/// Deterministic family of vector pairs for triangle-inequality tests:
/// structured block/decay pairs followed by `random` seeded draws.
pub fn triangle_pairs(seed: u64, random: usize, dim: usize) -> Vec<(SpVec<f64>, SpVec<f64>)> {
    let mut out = Vec::new();
    let dim = dim.max(2);
    for k in 1..=dim / 2 {
        let a = SpVec::from_dense(&vec![1.0; k]);
        let b = SpVec::from_dense(&vec![1.0; k]).shifted(k);
        out.push((a.clone(), b.clone()));
        out.push((a.clone(), b.scale(-1.0)));
        let decay: Vec<f64> = (1..=2 * k).map(|n| 1.0 / n as f64).collect();
        let d = SpVec::from_dense(&decay);
        let odd = d.multiply(|n| if n % 2 == 1 { 1.0 } else { 0.0 });
        let even = d.sub(&odd);
        out.push((odd, even));
        out.push((a, SpVec::from_dense(&vec![1.0; 2 * k])));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..random {
        let d = rng.gen_range(1..=dim);
        let draw = |rng: &mut ChaCha8Rng| -> SpVec<f64> {
            let coeffs: Vec<f64> = (0..d)
                .map(|_| match i % 4 {
                    0 => rng.gen_range(-1.0..1.0),
                    1 => {
                        if rng.gen_bool(0.5) {
                            0.0
                        } else {
                            rng.gen_range(-2.0..2.0)
                        }
                    }
                    2 => {
                        let e: f64 = rng.gen_range(-6.0..1.0);
                        if rng.gen_bool(0.5) { e.exp2() } else { -e.exp2() }
                    }
                    _ => rng.gen_range(0.0..1.0),
                })
                .collect();
            SpVec::from_dense(&coeffs)
        };
        let f = draw(&mut rng);
        let g = draw(&mut rng);
        out.push((f, g));
    }
    out
}

/// First pair violating `‖f+g‖^r ≤ ‖f‖^r + ‖g‖^r` (relative tolerance `tol`).
pub fn r_triangle_violation(
    norm: &dyn Fn(&SpVec<f64>) -> f64,
    r: f64,
    pairs: &[(SpVec<f64>, SpVec<f64>)],
    tol: f64,
) -> Option<(SpVec<f64>, SpVec<f64>)> {
    pairs
        .iter()
        .find(|(f, g)| {
            let lhs = norm(&f.add(g)).powf(r);
            let rhs = norm(f).powf(r) + norm(g).powf(r);
            lhs > rhs * (1.0 + tol) + tol
        })
        .cloned()
}

/// True when the Lorentz density `u_n = s_n^(q/p−1) w_n` is non-increasing for
/// `n ≤ range`; then the Lorentz functional is a supremum of weighted `ℓ_q`
/// sums over permutations and satisfies the `min(q,1)`-triangle inequality.
pub fn lorentz_density_nonincreasing(p: f64, q: f64, w: &WeightSpec, range: usize) -> bool {
    let mut prev = f64::INFINITY;
    for n in 1..=range {
        let u = w.s(n).powf(q / p - 1.0) * w.w(n);
        if u > prev * (1.0 + 1e-12) {
            return false;
        }
        prev = u;
    }
    true
}
