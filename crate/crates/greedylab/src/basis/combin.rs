//! Combination enumeration with deterministic parallel reduction.

use rayon::prelude::*;

/// Binomial coefficient, saturating at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// `Σ_{j ≤ k} C(n, j)`, saturating.
pub fn binomial_prefix(n: usize, k: usize) -> u64 {
    (0..=k.min(n)).fold(0u64, |acc, j| acc.saturating_add(binomial(n, j)))
}

/// Calls `visit` on every `k`-subset of `0..n` in lexicographic order.
pub fn for_each_combination(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else { return };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Extreme of `score` over all subsets of `0..n` with sizes in `sizes`.
///
/// Work is split over (size, first element) and reduced by the total order
/// (score, size, lexicographic rank), so the winner does not depend on the
/// thread count. `maximize` selects max or min.
pub fn extreme_over_subsets<S, F>(n: usize, sizes: std::ops::RangeInclusive<usize>, maximize: bool, score: F) -> Option<(S, Vec<usize>)>
where
    S: PartialOrd + Copy + Send,
    F: Fn(&[usize]) -> S + Sync,
{
    let better = |a: S, b: S| if maximize { a > b } else { a < b };
    let tasks: Vec<(usize, Option<usize>)> = sizes
        .flat_map(|k| {
            if k == 0 {
                vec![(0, None)]
            } else if k > n {
                vec![]
            } else {
                (0..=n - k).map(|first| (k, Some(first))).collect()
            }
        })
        .collect();
    let results: Vec<Option<(S, Vec<usize>)>> = tasks
        .par_iter()
        .map(|&(k, first)| {
            let mut best: Option<(S, Vec<usize>)> = None;
            match first {
                None => best = Some((score(&[]), vec![])),
                Some(f) => {
                    let rest = n - f - 1;
                    let mut buf = vec![f; k];
                    for_each_combination(rest, k - 1, |c| {
                        for (slot, &x) in c.iter().enumerate() {
                            buf[slot + 1] = f + 1 + x;
                        }
                        let s = score(&buf);
                        if best.as_ref().map_or(true, |(b, _)| better(s, *b)) {
                            best = Some((s, buf.clone()));
                        }
                    });
                }
            }
            best
        })
        .collect();
    // Sequential reduction in task order keeps the earliest strict winner.
    let mut best: Option<(S, Vec<usize>)> = None;
    for r in results.into_iter().flatten() {
        if best.as_ref().map_or(true, |(b, _)| better(r.0, *b)) {
            best = Some(r);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(10, 3), 120);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial_prefix(4, 2), 1 + 4 + 6);
        assert_eq!(binomial(200, 100), u64::MAX);
    }

    #[test]
    fn enumerates_all_combinations() {
        let mut seen = Vec::new();
        for_each_combination(5, 3, |c| seen.push(c.to_vec()));
        assert_eq!(seen.len(), 10);
        assert_eq!(seen[0], vec![0, 1, 2]);
        assert_eq!(seen[9], vec![2, 3, 4]);
        let mut empty = 0;
        for_each_combination(3, 0, |_| empty += 1);
        assert_eq!(empty, 1);
    }

    #[test]
    fn extreme_is_deterministic() {
        let (v, set) = extreme_over_subsets(6, 0..=3, true, |c| c.iter().sum::<usize>()).unwrap();
        assert_eq!(v, 3 + 4 + 5);
        assert_eq!(set, vec![3, 4, 5]);
        let (w, empty) = extreme_over_subsets(6, 0..=3, false, |c| c.len()).unwrap();
        assert_eq!((w, empty.len()), (0, 0));
    }
}
