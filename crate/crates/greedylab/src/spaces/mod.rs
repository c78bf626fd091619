//! The quasi-norm zoo, weight-regularity predicates and the discrete Hardy
//! operator check.

mod exponent;
pub mod kernels;
mod parse;
mod weights;

pub use exponent::{lorentz_density_nonincreasing, r_triangle_violation, triangle_pairs, EXPONENT_LADDER};
pub use weights::{fundamental_lorentz, hardy_check, harmonic_prefixes, prefix_indicators, weight_report, HardyReport, WeightReport, DOUBLING_CAP};

use crate::core::{nonincreasing_rearrangement, Scalar, SpVec, WeightSpec};
use crate::error::{invalid, Result};
use serde::Serialize;
use std::fmt;

/// Range over which weight-dependent structural checks are run.
const CHECK_RANGE: usize = 4096;
/// Seed of the sampled exponent certificate.
const EXPONENT_SEED: u64 = 0x5eed_1e55;

/// Which quasi-norm a [`SpaceSpec`] evaluates.
#[derive(Clone, Debug, PartialEq)]
pub enum SpaceKind {
    /// `ℓ_p`, `0 < p ≤ ∞`.
    Lp(f64),
    C0,
    /// Weighted Lorentz `d_{p,q}(w)`; `q = None` is the sup form.
    Lorentz { p: f64, q: Option<f64>, w: WeightSpec },
    Marcinkiewicz { w: WeightSpec },
    Garling { p: f64, w: WeightSpec },
    /// James-type difference space, `0 < p ≤ 1`.
    Vp(f64),
    /// Weighted partial-sum space `s_w`.
    Sw { w: WeightSpec },
    /// `max(‖f‖_X, ‖f‖_w)`.
    Kt { inner: Box<SpaceSpec>, w: WeightSpec },
    /// Max-combination of parts; index `n` belongs to part `(n−1) mod k`
    /// at position `⌊(n−1)/k⌋ + 1`.
    Dsum(Vec<SpaceSpec>),
    /// `(Σ_blocks ‖·‖_p^q)^(1/q)` over consecutive index blocks.
    Mixed { q: f64, p: f64, blocks: Vec<usize> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SpaceFlags {
    pub lattice_unconditional: bool,
    pub symmetric: bool,
}

/// A validated quasi-norm with its certified `p`-norm exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceSpec {
    kind: SpaceKind,
    p_exponent: f64,
    flags: SpaceFlags,
}

const LATTICE: SpaceFlags = SpaceFlags { lattice_unconditional: true, symmetric: false };
const SYMMETRIC: SpaceFlags = SpaceFlags { lattice_unconditional: true, symmetric: true };
const PLAIN: SpaceFlags = SpaceFlags { lattice_unconditional: false, symmetric: false };

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && !v.is_nan() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive, got {v}")))
    }
}

fn finite_positive(name: &str, v: f64) -> Result<()> {
    positive(name, v)?;
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite")))
    }
}

/// Parses a space specification.
pub fn parse_space(text: &str) -> Result<SpaceSpec> {
    let mut p = parse::Parser::new(text);
    let spec = p.space()?;
    p.finish()?;
    Ok(spec)
}

/// Parses a weight specification such as `pot:0.5`, `const:1` or `expl:[1,0.5;tail=0.25]`.
pub fn parse_weight(text: &str) -> Result<WeightSpec> {
    let mut p = parse::Parser::new(text);
    let w = p.weight()?;
    p.finish()?;
    Ok(w)
}

impl SpaceSpec {
    pub fn parse(text: &str) -> Result<Self> {
        parse_space(text)
    }

    pub fn lp(p: f64) -> Result<Self> {
        positive("lp exponent", p)?;
        Ok(Self { kind: SpaceKind::Lp(p), p_exponent: p.min(1.0), flags: SYMMETRIC })
    }

    pub fn c0() -> Self {
        Self { kind: SpaceKind::C0, p_exponent: 1.0, flags: SYMMETRIC }
    }

    pub fn lorentz(p: f64, q: Option<f64>, w: WeightSpec) -> Result<Self> {
        finite_positive("Lorentz p", p)?;
        if let Some(q) = q {
            finite_positive("Lorentz q", q)?;
        }
        let doubling = weights::doubling_constant(&w, CHECK_RANGE);
        if doubling > DOUBLING_CAP {
            return Err(invalid(format!(
                "Lorentz space needs a doubling primitive weight; empirical doubling constant {doubling:.4} exceeds {DOUBLING_CAP}"
            )));
        }
        let mut spec = Self { kind: SpaceKind::Lorentz { p, q, w: w.clone() }, p_exponent: 1.0, flags: SYMMETRIC };
        spec.p_exponent = match q {
            Some(q) if lorentz_density_nonincreasing(p, q, &w, CHECK_RANGE) => q.min(1.0),
            _ => {
                let cap = q.map_or(1.0, |q| q.min(1.0));
                spec.sampled_exponent(cap)?
            }
        };
        Ok(spec)
    }

    pub fn marcinkiewicz(w: WeightSpec) -> Self {
        Self { kind: SpaceKind::Marcinkiewicz { w }, p_exponent: 1.0, flags: SYMMETRIC }
    }

    pub fn garling(p: f64, w: WeightSpec) -> Result<Self> {
        finite_positive("Garling p", p)?;
        if !w.is_nonincreasing() {
            return Err(invalid("Garling weights must be non-increasing"));
        }
        Ok(Self { kind: SpaceKind::Garling { p, w }, p_exponent: p.min(1.0), flags: LATTICE })
    }

    pub fn vp(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(invalid(format!("vp needs 0 < p ≤ 1, got {p}")));
        }
        Ok(Self { kind: SpaceKind::Vp(p), p_exponent: p, flags: PLAIN })
    }

    pub fn sw(w: WeightSpec) -> Self {
        Self { kind: SpaceKind::Sw { w }, p_exponent: 1.0, flags: PLAIN }
    }

    pub fn kt(inner: SpaceSpec, w: WeightSpec) -> Self {
        let p_exponent = inner.p_exponent.min(1.0);
        Self { kind: SpaceKind::Kt { inner: Box::new(inner), w }, p_exponent, flags: PLAIN }
    }

    pub fn dsum(parts: Vec<SpaceSpec>) -> Result<Self> {
        if parts.is_empty() {
            return Err(invalid("dsum needs at least one part"));
        }
        let p_exponent = parts.iter().map(|s| s.p_exponent).fold(1.0, f64::min);
        let lattice = parts.iter().all(|s| s.flags.lattice_unconditional);
        let symmetric = parts.len() == 1 && parts[0].flags.symmetric;
        Ok(Self {
            kind: SpaceKind::Dsum(parts),
            p_exponent,
            flags: SpaceFlags { lattice_unconditional: lattice, symmetric },
        })
    }

    pub fn mixed(q: f64, p: f64, blocks: Vec<usize>) -> Result<Self> {
        positive("mixed q", q)?;
        positive("mixed p", p)?;
        if blocks.is_empty() || blocks.contains(&0) {
            return Err(invalid("mixed blocks must be a non-empty list of positive lengths"));
        }
        let symmetric = blocks.len() == 1;
        Ok(Self {
            kind: SpaceKind::Mixed { q, p, blocks },
            p_exponent: q.min(p).min(1.0),
            flags: SpaceFlags { lattice_unconditional: true, symmetric },
        })
    }

    /// Besov-type mixed norm with blocks of lengths `1, 2, …, levels`.
    pub fn besov_blocks(q: f64, p: f64, levels: usize) -> Result<Self> {
        Self::mixed(q, p, (1..=levels).collect())
    }

    fn sampled_exponent(&self, cap: f64) -> Result<f64> {
        let pairs = triangle_pairs(EXPONENT_SEED, 1000, 16);
        let norm = |f: &SpVec<f64>| self.nrm(f);
        let ladder = std::iter::once(cap).chain(EXPONENT_LADDER.into_iter().filter(|&r| r < cap));
        for r in ladder {
            if r_triangle_violation(&norm, r, &pairs, 1e-12).is_none() {
                return Ok(r);
            }
        }
        Err(invalid(format!("no exponent in the ladder passes the sampled triangle test for {self}")))
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    /// Exponent `r ∈ (0,1]` with `‖f+g‖^r ≤ ‖f‖^r + ‖g‖^r`.
    pub fn p_exponent(&self) -> f64 {
        self.p_exponent
    }

    pub fn flags(&self) -> SpaceFlags {
        self.flags
    }

    pub fn is_symmetric(&self) -> bool {
        self.flags.symmetric
    }

    pub fn is_lattice(&self) -> bool {
        self.flags.lattice_unconditional
    }

    /// Largest `d` such that every index in `1..=d` is admissible.
    pub fn max_dim(&self) -> Option<usize> {
        match &self.kind {
            SpaceKind::Mixed { blocks, .. } => Some(blocks.iter().sum()),
            SpaceKind::Kt { inner, .. } => inner.max_dim(),
            SpaceKind::Dsum(parts) => {
                let k = parts.len();
                parts
                    .iter()
                    .enumerate()
                    .filter_map(|(i, s)| s.max_dim().map(|d| d * k + i))
                    .min()
            }
            _ => None,
        }
    }

    /// Rejects supports outside the mixed-norm block structure.
    pub fn check_support<T: Scalar>(&self, f: &SpVec<T>) -> Result<()> {
        match &self.kind {
            SpaceKind::Mixed { blocks, .. } => {
                let total: usize = blocks.iter().sum();
                match f.max_index() {
                    Some(n) if n > total => Err(invalid(format!(
                        "index {n} outside the mixed block structure of total length {total}"
                    ))),
                    _ => Ok(()),
                }
            }
            SpaceKind::Kt { inner, .. } => inner.check_support(f),
            SpaceKind::Dsum(parts) => {
                let k = parts.len();
                for (i, part) in parts.iter().enumerate() {
                    part.check_support(&dsum_part(f, k, i))?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Exact quasi-norm of `f`.
    pub fn norm<T: Scalar>(&self, f: &SpVec<T>) -> Result<T> {
        self.check_support(f)?;
        Ok(self.nrm(f))
    }

    /// Quasi-norm without the support check.
    ///
    /// # Panics
    /// When a mixed-norm part receives an index beyond its block structure;
    /// validate with [`SpaceSpec::check_support`] or use [`SpaceSpec::norm`].
    pub fn nrm<T: Scalar>(&self, f: &SpVec<T>) -> T {
        match &self.kind {
            SpaceKind::Lp(p) => kernels::lp(*p, f.values()),
            SpaceKind::C0 => kernels::lp(f64::INFINITY, f.values()),
            SpaceKind::Lorentz { p, q, w } => {
                kernels::lorentz(*p, *q, &nonincreasing_rearrangement(f), |n| w.s(n), |n| w.w(n))
            }
            SpaceKind::Marcinkiewicz { w } => {
                kernels::marcinkiewicz(&nonincreasing_rearrangement(f), |n| w.s(n))
            }
            SpaceKind::Garling { p, w } => {
                let moduli: Vec<T> = f.values().map(|a| a.abs()).collect();
                kernels::garling(*p, &moduli, |j| w.w(j))
            }
            SpaceKind::Vp(p) => kernels::vp(*p, f.iter()),
            SpaceKind::Sw { w } => kernels::sw(f.iter(), |n| w.w(n)),
            SpaceKind::Kt { inner, w } => inner.nrm(f).max(kernels::sw(f.iter(), |n| w.w(n))),
            SpaceKind::Dsum(parts) => {
                let k = parts.len();
                parts
                    .iter()
                    .enumerate()
                    .map(|(i, s)| s.nrm(&dsum_part(f, k, i)))
                    .fold(T::zero(), T::max)
            }
            SpaceKind::Mixed { q, p, blocks } => {
                let total: usize = blocks.iter().sum();
                if let Some(n) = f.max_index() {
                    assert!(n <= total, "index {n} outside the mixed block structure");
                }
                let mut start = 1;
                let mut block_norms = Vec::with_capacity(blocks.len());
                for &len in blocks {
                    let end = start + len;
                    let vals = f.iter().filter(|(n, _)| *n >= start && *n < end).map(|(_, a)| a);
                    block_norms.push(kernels::lp::<T, _>(*p, vals));
                    start = end;
                }
                kernels::lp(*q, block_norms)
            }
        }
    }

    /// Norm of the `f32` image of `f`, widened back (precision probe).
    pub fn nrm_f32(&self, f: &SpVec<f64>) -> f64 {
        self.nrm(&f.cast::<f32>()) as f64
    }
}

/// Coordinates of part `i` of a `k`-fold interleaved direct sum.
pub fn dsum_part<T: Scalar>(f: &SpVec<T>, k: usize, i: usize) -> SpVec<T> {
    SpVec::from_pairs(
        f.iter()
            .filter(|(n, _)| (n - 1) % k == i)
            .map(|(n, a)| ((n - 1) / k + 1, a)),
    )
    .expect("re-indexing preserves validity")
}

/// Global index of position `pos` (1-based) of part `i` in a `k`-fold sum.
pub fn dsum_index(k: usize, i: usize, pos: usize) -> usize {
    (pos - 1) * k + i + 1
}

fn num(x: f64) -> String {
    if x.is_infinite() {
        "inf".into()
    } else {
        format!("{x}")
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SpaceKind::Lp(p) => write!(f, "lp:{}", num(*p)),
            SpaceKind::C0 => write!(f, "c0"),
            SpaceKind::Lorentz { p, q, w } => {
                write!(f, "lorentz:p={},q={},w={}", num(*p), num(q.unwrap_or(f64::INFINITY)), w)
            }
            SpaceKind::Marcinkiewicz { w } => write!(f, "marcin:w={w}"),
            SpaceKind::Garling { p, w } => write!(f, "garling:p={},w={}", num(*p), w),
            SpaceKind::Vp(p) => write!(f, "vp:{}", num(*p)),
            SpaceKind::Sw { w } => write!(f, "sw:w={w}"),
            SpaceKind::Kt { inner, w } => write!(f, "kt({inner} ; w={w})"),
            SpaceKind::Dsum(parts) => {
                let s: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                write!(f, "dsum({})", s.join(","))
            }
            SpaceKind::Mixed { q, p, blocks } => {
                let b: Vec<String> = blocks.iter().map(|b| b.to_string()).collect();
                write!(f, "mixed:q={},p={},blocks={}", num(*q), num(*p), b.join(","))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(c: &[f64]) -> SpVec<f64> {
        SpVec::from_dense(c)
    }

    #[test]
    fn weight_strings() {
        assert_eq!(parse_weight("pot:0.5").unwrap(), WeightSpec::potential(0.5).unwrap());
        assert_eq!(parse_weight(" const:2 ").unwrap(), WeightSpec::constant(2.0).unwrap());
        assert_eq!(parse_weight("expl:[1,0.5;tail=0.25]").unwrap(), WeightSpec::explicit(vec![1.0, 0.5], 0.25).unwrap());
        assert!(parse_weight("pot:0.5 x").is_err());
        assert!(parse_weight("lin:1").is_err());
    }

    #[test]
    fn parse_examples() {
        let s = parse_space("lp:0.5").unwrap();
        assert_eq!(s.p_exponent(), 0.5);
        assert!(s.is_symmetric());
        let kt = parse_space("kt(lorentz:p=1,q=2,w=pot:0.5 ; w=pot:0.5)").unwrap();
        assert!(matches!(kt.kind(), SpaceKind::Kt { .. }));
        assert!(!kt.is_lattice());
        let d = parse_space("dsum(lorentz:p=1,q=2,w=const:1, mixed:q=1,p=2,blocks=1,2,lp:1)").unwrap();
        match d.kind() {
            SpaceKind::Dsum(parts) => assert_eq!(parts.len(), 3),
            _ => panic!(),
        }
        assert!(parse_space("lorentz:p=1,q=2,w=expl:[1,1000;tail=1000]").is_err());
    }

    #[test]
    fn parse_errors_carry_position() {
        match parse_space("lp:0.5x") {
            Err(crate::Error::Parse { pos, .. }) => assert_eq!(pos, 6),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_space("lorentz:p=1,w=const:1"), Err(crate::Error::Parse { .. })));
        assert!(parse_space("vp:2").is_err());
        assert!(parse_space("garling:p=1,w=expl:[1,2;tail=2]").is_err());
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "lp:0.5",
            "lp:inf",
            "c0",
            "lorentz:p=1,q=inf,w=const:1",
            "marcin:w=pot:0.5",
            "garling:p=0.5,w=pot:0.5",
            "vp:0.5",
            "sw:w=expl:[1,0.5;tail=0.25]",
            "kt(lorentz:p=1,q=2,w=pot:0.5 ; w=pot:0.5)",
            "dsum(lp:1,lp:2)",
            "mixed:q=2,p=1,blocks=1,2,3",
        ] {
            let s = parse_space(text).unwrap();
            assert_eq!(s.to_string(), text);
            assert_eq!(parse_space(&s.to_string()).unwrap(), s);
        }
    }

    #[test]
    fn norm_examples() {
        assert_relative_eq!(parse_space("lp:0.5").unwrap().nrm(&v(&[1.0, 1.0])), 4.0, epsilon = 1e-12);
        let g = parse_space("garling:p=1,w=pot:0.5").unwrap().nrm(&v(&[1.0, 2.0]));
        assert_relative_eq!(g, 2.414214, epsilon = 1e-6);
        assert_relative_eq!(parse_space("vp:0.5").unwrap().nrm(&v(&[1.0, 1.0, 1.0])), 4.0, epsilon = 1e-12);
        assert_eq!(parse_space("sw:w=const:1").unwrap().nrm(&v(&[1.0, -1.0, 1.0])), 1.0);
        let l = parse_space("lorentz:p=1,q=2,w=pot:0.5").unwrap().nrm(&v(&[1.0, 1.0]));
        assert_relative_eq!(l, 1.485635, epsilon = 1e-5);
    }

    #[test]
    fn lorentz_exponents() {
        // Non-increasing density: exponent min(q, 1).
        assert_eq!(parse_space("lorentz:p=2,q=1,w=const:1").unwrap().p_exponent(), 1.0);
        assert_eq!(parse_space("lorentz:p=1,q=0.5,w=const:1").unwrap().p_exponent(), 0.5);
        // d_{1,2}(pot:0.5) fails the 1-triangle inequality on the sample.
        let r = parse_space("lorentz:p=1,q=2,w=pot:0.5").unwrap().p_exponent();
        assert!(r < 1.0 && r >= 0.25, "{r}");
    }

    #[test]
    fn kt_and_dsum_are_maxima() {
        let kt = parse_space("kt(lp:2 ; w=const:1)").unwrap();
        let f = v(&[3.0, -4.0, 1.0]);
        let inner = parse_space("lp:2").unwrap().nrm(&f);
        let sw = parse_space("sw:w=const:1").unwrap().nrm(&f);
        assert_eq!(kt.nrm(&f), inner.max(sw));
        let d = parse_space("dsum(lp:1,lp:2)").unwrap();
        // odd indices → ℓ_1 part, even → ℓ_2 part
        let g = v(&[1.0, 3.0, 1.0, 4.0]);
        assert_eq!(d.nrm(&g), 5.0);
    }

    #[test]
    fn mixed_blocks_and_rejection() {
        let m = parse_space("mixed:q=1,p=2,blocks=1,2").unwrap();
        assert_eq!(m.norm(&v(&[2.0, 3.0, 4.0])).unwrap(), 7.0);
        assert!(m.norm(&v(&[1.0, 1.0, 1.0, 1.0])).is_err());
        assert_eq!(m.max_dim(), Some(3));
        let d = parse_space("dsum(lp:1,mixed:q=1,p=1,blocks=2)").unwrap();
        assert_eq!(d.max_dim(), Some(5));
        assert!(d.norm(&v(&[1.0, 1.0, 1.0, 1.0])).is_ok());
        assert!(d.norm(&SpVec::from_pairs([(6, 1.0)]).unwrap()).is_err());
    }

    #[test]
    fn f32_kernels_agree() {
        let s = parse_space("garling:p=0.5,w=pot:0.5").unwrap();
        let f = v(&[0.3, -1.2, 0.8, 2.0]);
        assert_relative_eq!(s.nrm_f32(&f), s.nrm(&f), max_relative = 1e-5);
    }
}
