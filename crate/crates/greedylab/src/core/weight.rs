use crate::error::{invalid, Result};
use std::fmt;
use std::sync::{Arc, RwLock};

/// Largest index whose potential primitive is cached by direct summation;
/// beyond it an Euler–Maclaurin continuation is used.
const CACHE_LIMIT: usize = 1 << 20;

/// Generator of a positive weight `w`.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightKind {
    /// `w_n = c`.
    Constant(f64),
    /// `w_n = n^(α−1)`, `0 < α ≤ 1`.
    Potential(f64),
    /// Explicit head `w_1..w_H`, then the constant `tail`.
    Explicit { head: Vec<f64>, tail: f64 },
}

#[derive(Debug, Default)]
struct PrimitiveCache {
    /// `s[n]` for `n = 0..len`.
    s: Vec<f64>,
    /// Uncompensated running sum and its Neumaier compensation.
    raw: f64,
    comp: f64,
}

/// Positive weight together with its primitive `s_n = Σ_{j≤n} w_j`.
#[derive(Clone, Debug)]
pub struct WeightSpec {
    kind: WeightKind,
    cache: Arc<RwLock<PrimitiveCache>>,
}

impl PartialEq for WeightSpec {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl WeightSpec {
    pub fn constant(c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(invalid(format!("constant weight must be positive, got {c}")));
        }
        Ok(Self::from_kind(WeightKind::Constant(c)))
    }

    pub fn potential(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(invalid(format!("potential exponent must lie in (0,1], got {alpha}")));
        }
        Ok(Self::from_kind(WeightKind::Potential(alpha)))
    }

    pub fn explicit(head: Vec<f64>, tail: f64) -> Result<Self> {
        if let Some(bad) = head.iter().chain(std::iter::once(&tail)).find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(invalid(format!("explicit weights must be positive, got {bad}")));
        }
        Ok(Self::from_kind(WeightKind::Explicit { head, tail }))
    }

    /// Weight whose primitive is the given increasing table `s_1, s_2, …`
    /// (`s_0 = 0` implied); the last increment is repeated as tail.
    pub fn from_primitive(s: &[f64]) -> Result<Self> {
        if s.is_empty() {
            return Err(invalid("empty primitive table"));
        }
        let head: Vec<f64> = std::iter::once(s[0])
            .chain(s.windows(2).map(|p| p[1] - p[0]))
            .collect();
        let tail = *head.last().expect("non-empty");
        Self::explicit(head, tail)
    }

    fn from_kind(kind: WeightKind) -> Self {
        Self { kind, cache: Arc::new(RwLock::new(PrimitiveCache { s: vec![0.0], raw: 0.0, comp: 0.0 })) }
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    /// `w_n` for `n ≥ 1`.
    pub fn w(&self, n: usize) -> f64 {
        assert!(n >= 1, "weights are indexed from 1");
        match &self.kind {
            WeightKind::Constant(c) => *c,
            WeightKind::Potential(a) => (n as f64).powf(a - 1.0),
            WeightKind::Explicit { head, tail } => head.get(n - 1).copied().unwrap_or(*tail),
        }
    }

    /// Primitive `s_n` (`s_0 = 0`).
    pub fn s(&self, n: usize) -> f64 {
        match &self.kind {
            WeightKind::Constant(c) => c * n as f64,
            WeightKind::Explicit { head, tail } => {
                if n <= head.len() {
                    self.cached(n)
                } else {
                    self.cached(head.len()) + tail * (n - head.len()) as f64
                }
            }
            WeightKind::Potential(a) => {
                if n <= CACHE_LIMIT {
                    self.cached(n)
                } else {
                    self.cached(CACHE_LIMIT) + euler_maclaurin_tail(a - 1.0, CACHE_LIMIT, n)
                }
            }
        }
    }

    /// Table `[s_0, s_1, …, s_n]`.
    pub fn primitive_table(&self, n: usize) -> Vec<f64> {
        (0..=n).map(|k| self.s(k)).collect()
    }

    /// True when `w` is non-increasing everywhere.
    pub fn is_nonincreasing(&self) -> bool {
        match &self.kind {
            WeightKind::Constant(_) | WeightKind::Potential(_) => true,
            WeightKind::Explicit { head, tail } => {
                head.windows(2).all(|p| p[1] <= p[0]) && head.last().map_or(true, |l| tail <= l)
            }
        }
    }

    fn cached(&self, n: usize) -> f64 {
        {
            let c = self.cache.read().expect("weight cache poisoned");
            if n < c.s.len() {
                return c.s[n];
            }
        }
        let mut c = self.cache.write().expect("weight cache poisoned");
        while c.s.len() <= n {
            let x = self.w(c.s.len());
            let t = c.raw + x;
            c.comp += if c.raw.abs() >= x.abs() { (c.raw - t) + x } else { (x - t) + c.raw };
            c.raw = t;
            let v = c.raw + c.comp;
            c.s.push(v);
        }
        c.s[n]
    }
}

/// `Σ_{k=M+1}^{n} k^β` by Euler–Maclaurin with two Bernoulli corrections.
fn euler_maclaurin_tail(beta: f64, m: usize, n: usize) -> f64 {
    let (mf, nf) = (m as f64, n as f64);
    let integral = (nf.powf(beta + 1.0) - mf.powf(beta + 1.0)) / (beta + 1.0);
    let ends = (nf.powf(beta) - mf.powf(beta)) / 2.0;
    let d1 = beta * (nf.powf(beta - 1.0) - mf.powf(beta - 1.0)) / 12.0;
    let d3 = beta * (beta - 1.0) * (beta - 2.0) * (nf.powf(beta - 3.0) - mf.powf(beta - 3.0)) / 720.0;
    integral + ends + d1 - d3
}

fn fmt_num(x: f64) -> String {
    format!("{x}")
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            WeightKind::Constant(c) => write!(f, "const:{}", fmt_num(*c)),
            WeightKind::Potential(a) => write!(f, "pot:{}", fmt_num(*a)),
            WeightKind::Explicit { head, tail } => {
                let h: Vec<String> = head.iter().map(|w| fmt_num(*w)).collect();
                write!(f, "expl:[{};tail={}]", h.join(","), fmt_num(*tail))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn primitive_of_each_kind() {
        let c = WeightSpec::constant(2.0).unwrap();
        assert_eq!(c.s(5), 10.0);
        let p = WeightSpec::potential(0.5).unwrap();
        assert_relative_eq!(p.s(2), 1.0 + 0.5f64.sqrt(), epsilon = 1e-15);
        let e = WeightSpec::explicit(vec![1.0, 0.5], 0.25).unwrap();
        assert_eq!(e.s(2), 1.5);
        assert_eq!(e.s(4), 2.0);
        assert_eq!(e.w(10), 0.25);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(WeightSpec::constant(0.0).is_err());
        assert!(WeightSpec::potential(1.5).is_err());
        assert!(WeightSpec::potential(0.0).is_err());
        assert!(WeightSpec::explicit(vec![1.0, -1.0], 1.0).is_err());
    }

    #[test]
    fn euler_maclaurin_matches_direct_sum() {
        let beta = -0.5;
        let (m, n) = (1000usize, 5000usize);
        let direct: f64 = ((m + 1)..=n).map(|k| (k as f64).powf(beta)).sum();
        assert_relative_eq!(euler_maclaurin_tail(beta, m, n), direct, max_relative = 1e-12);
    }

    #[test]
    fn large_potential_primitive_is_continuous() {
        let p = WeightSpec::potential(0.5).unwrap();
        let a = p.s(CACHE_LIMIT);
        let b = p.s(CACHE_LIMIT + 1);
        assert_relative_eq!(b - a, ((CACHE_LIMIT + 1) as f64).powf(-0.5), max_relative = 1e-6);
    }

    #[test]
    fn from_primitive_inverts() {
        let w = WeightSpec::from_primitive(&[1.0, 3.0, 4.0]).unwrap();
        assert_eq!(w.primitive_table(4), vec![0.0, 1.0, 3.0, 4.0, 5.0]);
        assert!(!w.is_nonincreasing());
    }

    #[test]
    fn display_forms() {
        assert_eq!(WeightSpec::potential(0.5).unwrap().to_string(), "pot:0.5");
        assert_eq!(
            WeightSpec::explicit(vec![1.0, 0.5], 0.25).unwrap().to_string(),
            "expl:[1,0.5;tail=0.25]"
        );
    }
}
