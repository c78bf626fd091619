//! Norm kernels on coefficient data, shared by [`super::SpaceSpec::norm`] and
//! the gallery constructions.

use crate::core::Scalar;

/// `(Σ |a|^p)^(1/p)`, or the maximum modulus for `p = ∞`.
pub fn lp<T: Scalar, I: IntoIterator<Item = T>>(p: f64, coeffs: I) -> T {
    if p.is_infinite() {
        return coeffs.into_iter().fold(T::zero(), |m, a| m.max(a.abs()));
    }
    let pt = T::lit(p);
    let sum: T = coeffs.into_iter().map(|a| a.abs().powf(pt)).sum();
    sum.powf(pt.recip())
}

/// Weighted Lorentz value of a non-increasing rearrangement `astar`:
/// `(Σ (a*_n)^q s_n^(q/p−1) w_n)^(1/q)`, or `sup a*_n s_n^(1/p)` when `q = None`.
pub fn lorentz<T: Scalar>(
    p: f64,
    q: Option<f64>,
    astar: &[T],
    s: impl Fn(usize) -> f64,
    w: impl Fn(usize) -> f64,
) -> T {
    match q {
        None => astar
            .iter()
            .enumerate()
            .map(|(i, &a)| a * T::lit(s(i + 1).powf(1.0 / p)))
            .fold(T::zero(), T::max),
        Some(q) => {
            let qt = T::lit(q);
            let sum: T = astar
                .iter()
                .enumerate()
                .map(|(i, &a)| {
                    let n = i + 1;
                    a.powf(qt) * T::lit(s(n).powf(q / p - 1.0) * w(n))
                })
                .sum();
            sum.powf(qt.recip())
        }
    }
}

/// Marcinkiewicz value `sup_k (Σ_{i≤k} a*_i) / s_k`.
pub fn marcinkiewicz<T: Scalar>(astar: &[T], s: impl Fn(usize) -> f64) -> T {
    let mut acc = T::zero();
    let mut best = T::zero();
    for (i, &a) in astar.iter().enumerate() {
        acc = acc + a;
        best = best.max(acc / T::lit(s(i + 1)));
    }
    best
}

/// Garling value: maximum over increasing index maps of `Σ_j |a_{i_j}|^p w_j`,
/// returned to the power `1/p`. `moduli` lists `|a|` in support order.
///
/// Dynamic programme over (next admissible position, next weight slot); runs in
/// `O(K²)` time and `O(K)` memory for `K` support entries.
pub fn garling<T: Scalar>(p: f64, moduli: &[T], w: impl Fn(usize) -> f64) -> T {
    let k = moduli.len();
    if k == 0 {
        return T::zero();
    }
    let pt = T::lit(p);
    let pow: Vec<T> = moduli.iter().map(|a| a.abs().powf(pt)).collect();
    let ws: Vec<T> = (1..=k).map(|j| T::lit(w(j))).collect();
    // best[j] = best value from positions i.. when the next slot is j (1-based).
    let mut best = vec![T::zero(); k + 2];
    for i in (1..=k).rev() {
        for j in 1..=i {
            let take = pow[i - 1] * ws[j - 1] + best[j + 1];
            if take > best[j] {
                best[j] = take;
            }
        }
    }
    best[1].powf(pt.recip())
}

/// Brute force over all subsequences; oracle for [`garling`] on small supports.
pub fn garling_brute<T: Scalar>(p: f64, moduli: &[T], w: impl Fn(usize) -> f64) -> T {
    let k = moduli.len();
    assert!(k <= 20, "brute-force Garling limited to 20 entries");
    let pt = T::lit(p);
    let mut best = T::zero();
    for mask in 1u32..(1u32 << k) {
        let mut slot = 0;
        let mut v = T::zero();
        for (i, a) in moduli.iter().enumerate() {
            if mask >> i & 1 == 1 {
                slot += 1;
                v = v + a.abs().powf(pt) * T::lit(w(slot));
            }
        }
        best = best.max(v);
    }
    best.powf(pt.recip())
}

/// James-type difference value `(Σ_{n≥1} |a_n − a_{n−1}|^p)^(1/p)`, `a_0 = 0`,
/// evaluated sparsely over `(index, coefficient)` pairs in increasing order.
pub fn vp<T: Scalar>(p: f64, entries: impl Iterator<Item = (usize, T)>) -> T {
    let pt = T::lit(p);
    let mut sum = T::zero();
    let mut prev: Option<(usize, T)> = None;
    for (n, a) in entries {
        match prev {
            Some((m, b)) if m + 1 == n => sum = sum + (a - b).abs().powf(pt),
            Some((_, b)) => sum = sum + b.abs().powf(pt) + a.abs().powf(pt),
            None => sum = sum + a.abs().powf(pt),
        }
        prev = Some((n, a));
    }
    if let Some((_, b)) = prev {
        sum = sum + b.abs().powf(pt);
    }
    sum.powf(pt.recip())
}

/// `sup_m |Σ_{n≤m} a_n w_n|` over `(index, coefficient)` pairs in increasing order.
pub fn sw<T: Scalar>(entries: impl Iterator<Item = (usize, T)>, w: impl Fn(usize) -> f64) -> T {
    let mut acc = T::zero();
    let mut best = T::zero();
    for (n, a) in entries {
        acc = acc + a * T::lit(w(n));
        best = best.max(acc.abs());
    }
    best
}
