//! Lower-bound estimation of basis constants with re-checkable witnesses,
//! democracy functions and the Lorentz sandwich check.

mod democracy;
mod family;
mod search;

pub use democracy::{
    democracy_functions, dual_fundamental, embedding_sandwich_check, DemocracyFunctions, SandwichReport,
};
pub use family::TestFamily;
pub use search::{estimate_all, estimate_constant, Estimator};

use crate::basis::BasisModel;
use crate::core::SpVec;
use crate::error::{Error, Result};
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

/// The named constants of a basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstantKind {
    Ksu,
    Ku,
    Ksc,
    Klc,
    Kpu,
    Cqg,
    Cql,
    Cag,
    Cg,
    Delta,
    DeltaD,
    DeltaS,
    DeltaSd,
    Gamma,
    LambdaU,
    LambdaT,
    DeltaB,
    DeltaSb,
}

impl ConstantKind {
    pub const ALL: [Self; 18] = [
        Self::Ksu,
        Self::Ku,
        Self::Ksc,
        Self::Klc,
        Self::Kpu,
        Self::Cqg,
        Self::Cql,
        Self::Cag,
        Self::Cg,
        Self::Delta,
        Self::DeltaD,
        Self::DeltaS,
        Self::DeltaSd,
        Self::Gamma,
        Self::LambdaU,
        Self::LambdaT,
        Self::DeltaB,
        Self::DeltaSb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Ksu => "K_su",
            Self::Ku => "K_u",
            Self::Ksc => "K_sc",
            Self::Klc => "K_lc",
            Self::Kpu => "K_pu",
            Self::Cqg => "C_qg",
            Self::Cql => "C_ql",
            Self::Cag => "C_ag",
            Self::Cg => "C_g",
            Self::Delta => "Delta",
            Self::DeltaD => "Delta_d",
            Self::DeltaS => "Delta_s",
            Self::DeltaSd => "Delta_sd",
            Self::Gamma => "Gamma",
            Self::LambdaU => "Lambda_u",
            Self::LambdaT => "Lambda_t",
            Self::DeltaB => "Delta_b",
            Self::DeltaSb => "Delta_sb",
        }
    }

    /// Kinds whose defining family is contained in this kind's family, so a
    /// witness for them is also a witness here.
    pub fn includes(self) -> &'static [Self] {
        match self {
            Self::Ku => &[Self::Ksu],
            Self::Kpu => &[Self::Ksc, Self::Klc],
            Self::Cg => &[Self::Cag],
            Self::Delta => &[Self::DeltaD],
            Self::DeltaS => &[Self::Delta, Self::DeltaSd, Self::Ksc],
            Self::DeltaSd => &[Self::DeltaD],
            Self::Gamma => &[Self::DeltaD, Self::DeltaSd],
            Self::DeltaSb => &[Self::DeltaB],
            _ => &[],
        }
    }
}

impl fmt::Display for ConstantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConstantKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['_', '-'], "");
        Self::ALL
            .into_iter()
            .find(|k| k.name().to_ascii_lowercase().replace('_', "") == key)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown constant kind `{s}`")))
    }
}

impl Serialize for ConstantKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Vectors realizing an estimate: `value = factor · ‖lhs‖ / ‖rhs‖`
/// (`rhs = None` stands for the denominator 1).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub lhs: SpVec<f64>,
    pub rhs: Option<SpVec<f64>>,
    pub factor: f64,
}

impl Witness {
    pub fn new(lhs: SpVec<f64>, rhs: Option<SpVec<f64>>) -> Self {
        Self { lhs, rhs, factor: 1.0 }
    }

    /// The ratio `e_1 / e_1`.
    pub fn trivial() -> Self {
        let e1 = SpVec::from_dense(&[1.0]);
        Self::new(e1.clone(), Some(e1))
    }

    /// Re-evaluates the ratio with one norm evaluation per side.
    pub fn ratio(&self, model: &BasisModel<f64>) -> f64 {
        let num = self.factor * model.norm(&self.lhs);
        match &self.rhs {
            Some(r) => num / model.norm(r),
            None => num,
        }
    }
}

/// A certified lower bound for a constant together with its witness.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantEstimate {
    pub kind: ConstantKind,
    pub value: f64,
    pub witness: Witness,
    pub budget: String,
}

impl ConstantEstimate {
    /// Value reproduced from the witness.
    pub fn recheck(&self, model: &BasisModel<f64>) -> f64 {
        self.witness.ratio(model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_names_round_trip() {
        for k in ConstantKind::ALL {
            assert_eq!(k.name().parse::<ConstantKind>().unwrap(), k);
        }
        assert_eq!("delta_sd".parse::<ConstantKind>().unwrap(), ConstantKind::DeltaSd);
        assert_eq!("Cqg".parse::<ConstantKind>().unwrap(), ConstantKind::Cqg);
        assert!("foo".parse::<ConstantKind>().is_err());
    }

    #[test]
    fn trivial_witness_is_one() {
        let model = BasisModel::parse("lp:0.5").unwrap();
        assert_eq!(Witness::trivial().ratio(&model), 1.0);
    }
}
