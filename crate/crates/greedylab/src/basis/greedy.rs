use super::combin::for_each_combination;
use super::BasisModel;
use crate::core::{IndexSet, Scalar, SpVec};
use crate::error::{invalid, Error, Result};

/// Largest boundary magnitude level enumerated by [`enumerate_greedy_sets`].
pub const BOUNDARY_CAP: usize = 20;

/// Support sorted by decreasing modulus, ties broken by the smaller index.
pub fn greedy_order<T: Scalar>(f: &SpVec<T>) -> Vec<usize> {
    let mut entries: Vec<(usize, T)> = f.iter().map(|(n, a)| (n, a.abs())).collect();
    entries.sort_by(|x, y| y.1.partial_cmp(&x.1).expect("finite").then(x.0.cmp(&y.0)));
    entries.into_iter().map(|(n, _)| n).collect()
}

/// `A_m(f)`: the first `m` entries of the greedy order.
pub fn greedy_set<T: Scalar>(f: &SpVec<T>, m: usize) -> IndexSet {
    greedy_order(f).into_iter().take(m).collect()
}

/// `G_m(f) = S_{A_m(f)} f`.
pub fn greedy_projection<T: Scalar>(f: &SpVec<T>, m: usize) -> SpVec<T> {
    f.restrict(&greedy_set(f, m))
}

/// `H_m(f) = f − G_m(f)`.
pub fn residual<T: Scalar>(f: &SpVec<T>, m: usize) -> SpVec<T> {
    f.remove_set(&greedy_set(f, m))
}

/// Greedy order and residual norms of `f` under a model.
#[derive(Clone, Debug, PartialEq)]
pub struct GreedyTrace<T> {
    pub ordering: Vec<usize>,
    /// `‖f − G_m f‖` for `m = 0..=|supp f|`.
    pub residual_norms: Vec<T>,
}

impl<T: Scalar> GreedyTrace<T> {
    /// `A_m`, the `m`-th set of the greedy chain.
    pub fn greedy_set(&self, m: usize) -> IndexSet {
        self.ordering.iter().take(m).copied().collect()
    }
}

pub fn greedy_trace<T: Scalar>(model: &BasisModel<T>, f: &SpVec<T>) -> GreedyTrace<T> {
    let ordering = greedy_order(f);
    let mut rest = f.clone();
    let mut residual_norms = vec![model.norm(&rest)];
    for &n in &ordering {
        rest.set(n, T::zero()).expect("index from support");
        residual_norms.push(model.norm(&rest));
    }
    GreedyTrace { ordering, residual_norms }
}

/// `|a_k| ≤ |a_n|` whenever `n ∈ A`, `k ∉ A` (indices off the support count as 0).
pub fn is_greedy_set<T: Scalar>(f: &SpVec<T>, set: &IndexSet) -> bool {
    let inside = set.iter().map(|&n| f.get(n).abs()).fold(T::infinity(), T::min);
    let outside = f.iter().filter(|(n, _)| !set.contains(n)).map(|(_, a)| a.abs()).fold(T::zero(), T::max);
    set.is_empty() || outside <= inside
}

/// Greedy with strict inequality `|a_k| < |a_n|`.
pub fn is_strictly_greedy_set<T: Scalar>(f: &SpVec<T>, set: &IndexSet) -> bool {
    if set.is_empty() {
        return true;
    }
    let inside = set.iter().map(|&n| f.get(n).abs()).fold(T::infinity(), T::min);
    let mut outside = f.iter().filter(|(n, _)| !set.contains(n)).map(|(_, a)| a.abs());
    // Off-support indices have modulus 0, which must also be beaten strictly.
    inside > T::zero() && outside.all(|a| a < inside)
}

/// Support grouped by equal modulus, in decreasing modulus order.
pub fn magnitude_levels<T: Scalar>(f: &SpVec<T>) -> Vec<Vec<usize>> {
    let order = greedy_order(f);
    let mut levels: Vec<Vec<usize>> = Vec::new();
    let mut last: Option<T> = None;
    for n in order {
        let a = f.get(n).abs();
        if last == Some(a) {
            levels.last_mut().expect("level open").push(n);
        } else {
            levels.push(vec![n]);
            last = Some(a);
        }
    }
    levels
}

/// All greedy sets of `f` with cardinality `m ≤ |supp f|`.
pub fn enumerate_greedy_sets<T: Scalar>(f: &SpVec<T>, m: usize) -> Result<Vec<IndexSet>> {
    if m > f.len() {
        return Err(invalid(format!("m = {m} exceeds the support size {}", f.len())));
    }
    let mut base = IndexSet::new();
    for level in magnitude_levels(f) {
        let need = m - base.len();
        if need == 0 {
            break;
        }
        if level.len() <= need {
            base.extend(level);
            continue;
        }
        if level.len() > BOUNDARY_CAP {
            return Err(Error::Budget(format!(
                "boundary magnitude level has {} members (cap {BOUNDARY_CAP})",
                level.len()
            )));
        }
        let mut out = Vec::new();
        for_each_combination(level.len(), need, |c| {
            let mut s = base.clone();
            s.extend(c.iter().map(|&i| level[i]));
            out.push(s);
        });
        return Ok(out);
    }
    Ok(vec![base])
}

/// Strictly greedy subsets of the support: unions of the leading magnitude levels.
pub fn strictly_greedy_sets<T: Scalar>(f: &SpVec<T>) -> Vec<IndexSet> {
    let mut out = vec![IndexSet::new()];
    let mut acc = IndexSet::new();
    for level in magnitude_levels(f) {
        acc.extend(level);
        out.push(acc.clone());
    }
    out
}

fn check_greedy<T: Scalar>(f: &SpVec<T>, set: &IndexSet) -> Result<()> {
    if is_greedy_set(f, set) {
        Ok(())
    } else {
        Err(invalid(format!("{set:?} is not a greedy set of the vector")))
    }
}

/// `U(f, A) = min_{n∈A}|a_n| Σ_{n∈A} sgn(a_n) x_n`.
pub fn truncation_u<T: Scalar>(f: &SpVec<T>, set: &IndexSet) -> Result<SpVec<T>> {
    check_greedy(f, set)?;
    if set.is_empty() {
        return Ok(SpVec::new());
    }
    let t = set.iter().map(|&n| f.get(n).abs()).fold(T::infinity(), T::min);
    Ok(SpVec::from_pairs(set.iter().map(|&n| (n, f.get(n).signum() * t)).filter(|(_, v)| !v.is_zero()))
        .expect("indices from a valid set"))
}

/// `T(f, A) = U(f, A) + S_{A^c} f`.
pub fn truncation_t<T: Scalar>(f: &SpVec<T>, set: &IndexSet) -> Result<SpVec<T>> {
    Ok(truncation_u(f, set)?.add(&f.remove_set(set)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> SpVec<f64> {
        SpVec::from_dense(c)
    }

    fn set(xs: &[usize]) -> IndexSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn order_examples() {
        assert_eq!(greedy_order(&v(&[0.5, -0.9, 0.9])), vec![2, 3, 1]);
        assert_eq!(greedy_order(&v(&[1.0, 1.0, 1.0])), vec![1, 2, 3]);
        assert!(greedy_order(&SpVec::<f64>::new()).is_empty());
    }

    #[test]
    fn projection_examples() {
        let f = v(&[3.0, 2.0, 1.0]);
        assert_eq!(greedy_projection(&f, 1), v(&[3.0]));
        assert!(greedy_projection(&f, 0).is_empty());
        assert_eq!(residual(&f, 0), f);
        assert_eq!(greedy_projection(&v(&[1.0, 1.0]), 1), v(&[1.0]));
        assert_eq!(greedy_projection(&f, 2).add(&residual(&f, 2)), f);
    }

    #[test]
    fn greedy_set_enumeration_examples() {
        assert_eq!(enumerate_greedy_sets(&v(&[3.0, 2.0, 2.0]), 2).unwrap(), vec![set(&[1, 2]), set(&[1, 3])]);
        assert_eq!(enumerate_greedy_sets(&v(&[3.0, 2.0, 1.0]), 2).unwrap(), vec![set(&[1, 2])]);
        assert_eq!(
            enumerate_greedy_sets(&v(&[1.0, 1.0, 1.0]), 1).unwrap(),
            vec![set(&[1]), set(&[2]), set(&[3])]
        );
        let wide = v(&vec![1.0; 21]);
        assert!(matches!(enumerate_greedy_sets(&wide, 3), Err(Error::Budget(_))));
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let f = v(&[2.0, -1.0, 1.0, 3.0, 1.0, -2.0]);
        for m in 0..=6 {
            let mut brute = Vec::new();
            for_each_combination(6, m, |c| {
                let s: IndexSet = c.iter().map(|i| i + 1).collect();
                if is_greedy_set(&f, &s) {
                    brute.push(s);
                }
            });
            let mut fast = enumerate_greedy_sets(&f, m).unwrap();
            fast.sort();
            brute.sort();
            assert_eq!(fast, brute, "m={m}");
        }
    }

    #[test]
    fn truncation_examples() {
        let f = v(&[3.0, -2.0, 1.0]);
        assert_eq!(truncation_u(&f, &set(&[1, 2])).unwrap(), v(&[2.0, -2.0]));
        assert_eq!(truncation_t(&f, &set(&[1, 2])).unwrap(), v(&[2.0, -2.0, 1.0]));
        assert!(truncation_u(&f, &set(&[])).unwrap().is_empty());
        assert_eq!(truncation_t(&f, &set(&[])).unwrap(), f);
        let g = v(&[1.0, 1.0]);
        assert_eq!(truncation_u(&g, &set(&[1, 2])).unwrap(), g);
        assert!(truncation_u(&f, &set(&[3])).is_err());
    }

    #[test]
    fn strictly_greedy_levels() {
        let f = v(&[1.0, 2.0, 2.0, 0.5]);
        let s = strictly_greedy_sets(&f);
        assert_eq!(s, vec![set(&[]), set(&[2, 3]), set(&[1, 2, 3]), set(&[1, 2, 3, 4])]);
        assert!(s.iter().all(|a| is_strictly_greedy_set(&f, a) || a.len() == 4));
    }
}
