use super::Scalar;
use crate::error::{invalid, Error, Result};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A finite set of indices (each ≥ 1).
pub type IndexSet = BTreeSet<usize>;

/// Finitely supported real sequence indexed from 1.
///
/// Stored entries are never zero, so the support is exact and coordinate
/// access off the support returns zero.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SpVec<T = f64> {
    entries: BTreeMap<usize, T>,
}

impl<T: Scalar> SpVec<T> {
    pub fn new() -> Self {
        Self { entries: BTreeMap::new() }
    }

    /// Builds a vector from `(index, coefficient)` pairs; zeros are dropped.
    pub fn from_pairs<I: IntoIterator<Item = (usize, T)>>(pairs: I) -> Result<Self> {
        let mut v = Self::new();
        for (n, a) in pairs {
            if v.entries.contains_key(&n) {
                return Err(invalid(format!("duplicate index {n}")));
            }
            v.set(n, a)?;
        }
        Ok(v)
    }

    /// Places `coeffs[i]` at index `i + 1`.
    pub fn from_dense(coeffs: &[T]) -> Self {
        let entries = coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(i, a)| (i + 1, *a))
            .collect();
        Self { entries }
    }

    /// Indicator `Σ_{n∈A} ε_n e_n`; missing signs default to `+1`.
    pub fn indicator(set: &IndexSet, signs: Option<&SignPattern>) -> Self {
        let entries = set
            .iter()
            .map(|&n| {
                let s = signs.map_or(1, |e| e.sign(n));
                (n, if s < 0 { -T::one() } else { T::one() })
            })
            .collect();
        Self { entries }
    }

    pub fn set(&mut self, n: usize, a: T) -> Result<()> {
        if n == 0 {
            return Err(invalid("indices start at 1"));
        }
        if !a.is_finite() {
            return Err(invalid(format!("non-finite coefficient at index {n}")));
        }
        if a.is_zero() {
            self.entries.remove(&n);
        } else {
            self.entries.insert(n, a);
        }
        Ok(())
    }

    pub fn get(&self, n: usize) -> T {
        self.entries.get(&n).copied().unwrap_or_else(T::zero)
    }

    /// Support size, O(1).
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (usize, T)> + '_ {
        self.entries.iter().map(|(&n, &a)| (n, a))
    }

    pub fn values(&self) -> impl Iterator<Item = T> + '_ {
        self.entries.values().copied()
    }

    pub fn support(&self) -> IndexSet {
        self.entries.keys().copied().collect()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.keys().next_back().copied()
    }

    /// Coordinate projection `S_A f`.
    pub fn restrict(&self, set: &IndexSet) -> Self {
        let entries = self
            .entries
            .iter()
            .filter(|(n, _)| set.contains(n))
            .map(|(&n, &a)| (n, a))
            .collect();
        Self { entries }
    }

    /// `S_{A^c} f = f − S_A f`.
    pub fn remove_set(&self, set: &IndexSet) -> Self {
        let entries = self
            .entries
            .iter()
            .filter(|(n, _)| !set.contains(n))
            .map(|(&n, &a)| (n, a))
            .collect();
        Self { entries }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpy(T::one(), other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(-T::one(), other)
    }

    /// `self + c·other`, dropping exact cancellations.
    pub fn axpy(&self, c: T, other: &Self) -> Self {
        let mut out = self.entries.clone();
        for (&n, &b) in &other.entries {
            let v = out.get(&n).copied().unwrap_or_else(T::zero) + c * b;
            if v.is_zero() {
                out.remove(&n);
            } else {
                out.insert(n, v);
            }
        }
        Self { entries: out }
    }

    pub fn scale(&self, c: T) -> Self {
        if c.is_zero() {
            return Self::new();
        }
        let entries = self.entries.iter().map(|(&n, &a)| (n, a * c)).collect();
        Self { entries }
    }

    /// Coordinatewise multiplier `Σ γ_n a_n e_n`.
    pub fn multiply<F: Fn(usize) -> T>(&self, gamma: F) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|(&n, &a)| (n, a * gamma(n)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        Self { entries }
    }

    /// Shifts every index by `offset`.
    pub fn shifted(&self, offset: usize) -> Self {
        let entries = self.entries.iter().map(|(&n, &a)| (n + offset, a)).collect();
        Self { entries }
    }

    pub fn max_abs(&self) -> T {
        self.values().fold(T::zero(), |m, a| m.max(a.abs()))
    }

    pub fn min_abs(&self) -> T {
        self.values().fold(T::infinity(), |m, a| m.min(a.abs()))
    }

    pub fn l1(&self) -> T {
        self.values().map(|a| a.abs()).sum()
    }

    /// Dense coefficient list of length `len` (index `i + 1` at slot `i`).
    pub fn to_dense(&self, len: usize) -> Vec<T> {
        let mut out = vec![T::zero(); len];
        for (n, a) in self.iter() {
            if n <= len {
                out[n - 1] = a;
            }
        }
        out
    }

    pub fn cast<U: Scalar>(&self) -> SpVec<U> {
        SpVec {
            entries: self
                .entries
                .iter()
                .map(|(&n, &a)| (n, U::lit(a.as_f64())))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        }
    }

    /// Parses the literal grammar `"<coef>@<index>,…"` (empty string → zero vector).
    pub fn parse_literal(text: &str) -> Result<Self> {
        let mut v = Self::new();
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Ok(v);
        }
        let mut pos = text.len() - text.trim_start().len();
        for item in trimmed.split(',') {
            let err = |msg: String| Error::Parse { pos, msg };
            let (c, i) = item
                .split_once('@')
                .ok_or_else(|| err(format!("expected <coef>@<index>, got '{}'", item.trim())))?;
            let coef: f64 = c
                .trim()
                .parse()
                .map_err(|_| err(format!("bad coefficient '{}'", c.trim())))?;
            let idx: usize = i
                .trim()
                .parse()
                .map_err(|_| err(format!("bad index '{}'", i.trim())))?;
            if v.entries.contains_key(&idx) {
                return Err(err(format!("duplicate index {idx}")));
            }
            v.set(idx, T::lit(coef)).map_err(|e| err(e.to_string()))?;
            pos += item.len() + 1;
        }
        Ok(v)
    }

    /// Serializes to the literal grammar; round-trips through [`SpVec::parse_literal`].
    pub fn to_literal(&self) -> String {
        self.iter()
            .map(|(n, a)| format!("{}@{}", a.as_f64(), n))
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl<T: Scalar> serde::Serialize for SpVec<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_literal())
    }
}

impl<T: Scalar> fmt::Display for SpVec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_literal())
    }
}

/// Sorted moduli `|a_n|` in non-increasing order.
pub fn nonincreasing_rearrangement<T: Scalar>(f: &SpVec<T>) -> Vec<T> {
    let mut v: Vec<T> = f.values().map(|a| a.abs()).collect();
    v.sort_by(|a, b| b.partial_cmp(a).expect("finite coefficients"));
    v
}

/// Signs `ε_n ∈ {±1}` over a finite index set.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SignPattern {
    signs: BTreeMap<usize, i8>,
}

impl SignPattern {
    pub fn new<I: IntoIterator<Item = (usize, i8)>>(pairs: I) -> Result<Self> {
        let mut signs = BTreeMap::new();
        for (n, s) in pairs {
            if s != 1 && s != -1 {
                return Err(invalid(format!("sign at {n} must be ±1, got {s}")));
            }
            if n == 0 {
                return Err(invalid("indices start at 1"));
            }
            signs.insert(n, s);
        }
        Ok(Self { signs })
    }

    pub fn all_plus(set: &IndexSet) -> Self {
        Self { signs: set.iter().map(|&n| (n, 1)).collect() }
    }

    /// `+1, −1, +1, …` along the increasing enumeration of `set`.
    pub fn alternating(set: &IndexSet) -> Self {
        Self {
            signs: set
                .iter()
                .enumerate()
                .map(|(k, &n)| (n, if k % 2 == 0 { 1 } else { -1 }))
                .collect(),
        }
    }

    /// Signs from the bits of `mask` along the increasing enumeration of `set`
    /// (bit set → −1).
    pub fn from_mask(set: &IndexSet, mask: u64) -> Self {
        Self {
            signs: set
                .iter()
                .enumerate()
                .map(|(k, &n)| (n, if (mask >> k) & 1 == 1 { -1 } else { 1 }))
                .collect(),
        }
    }

    /// Signs of the coefficients of `f`.
    pub fn of<T: Scalar>(f: &SpVec<T>) -> Self {
        Self {
            signs: f
                .iter()
                .map(|(n, a)| (n, if a < T::zero() { -1 } else { 1 }))
                .collect(),
        }
    }

    /// Sign at `n`; `+1` outside the domain.
    pub fn sign(&self, n: usize) -> i8 {
        self.signs.get(&n).copied().unwrap_or(1)
    }

    pub fn domain(&self) -> IndexSet {
        self.signs.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeros_are_not_stored() {
        let v = SpVec::<f64>::from_pairs([(1, 1.0), (2, 0.0), (5, -2.0)]).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v.get(2), 0.0);
        assert_eq!(v.get(100), 0.0);
        let w = v.sub(&v);
        assert!(w.is_empty());
    }

    #[test]
    fn rejects_index_zero_and_nan() {
        assert!(SpVec::<f64>::from_pairs([(0, 1.0)]).is_err());
        assert!(SpVec::<f64>::from_pairs([(1, f64::NAN)]).is_err());
    }

    #[test]
    fn rearrangement_examples() {
        let f = SpVec::from_dense(&[0.5, -0.9, 0.9]);
        assert_eq!(nonincreasing_rearrangement(&f), vec![0.9, 0.9, 0.5]);
        assert!(nonincreasing_rearrangement(&SpVec::<f64>::new()).is_empty());
        let g = SpVec::from_pairs([(7, 3.0)]).unwrap();
        assert_eq!(nonincreasing_rearrangement(&g), vec![3.0]);
    }

    #[test]
    fn literal_round_trip() {
        let f = SpVec::<f64>::parse_literal("1@1, -0.25@4,3.5e-7@9").unwrap();
        assert_eq!(f.get(4), -0.25);
        assert_eq!(SpVec::parse_literal(&f.to_literal()).unwrap(), f);
        assert!(SpVec::<f64>::parse_literal("1@0").is_err());
        assert!(SpVec::<f64>::parse_literal("x@1").is_err());
        assert!(SpVec::<f64>::parse_literal("1@1,2@1").is_err());
    }

    #[test]
    fn sign_patterns() {
        let a: IndexSet = [2, 5, 7].into_iter().collect();
        let e = SignPattern::alternating(&a);
        assert_eq!((e.sign(2), e.sign(5), e.sign(7)), (1, -1, 1));
        let v = SpVec::<f64>::indicator(&a, Some(&SignPattern::from_mask(&a, 0b110)));
        assert_eq!(v.to_dense(7), vec![0.0, 1.0, 0.0, 0.0, -1.0, 0.0, -1.0]);
        assert!(SignPattern::new([(1, 2)]).is_err());
    }
}
