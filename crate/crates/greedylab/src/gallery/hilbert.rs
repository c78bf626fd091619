//! An `M`-bounded total basis of a Euclidean block that is democratic but has
//! a large basis constant.
//!
//! `H_n = X_1 ⊕ X ⊕ X_2` with `dim X_s = n − 1` and `X = R²`; the basis is
//! `e_j^s = T_s(e_j)`, where `T_s` is an isometry of `R^n` onto
//! `X_s ⊕ [a_s]` sending `Σ_j e_j` to `a_s`.

use crate::basis::{BasisModel, MatrixBasis};
use crate::core::{IndexSet, SpVec};
use crate::error::{invalid, Result};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Largest block parameter accepted.
pub const MAX_BLOCK: usize = 32;
/// Indicator sets are enumerated exhaustively up to this ambient dimension.
const EXHAUSTIVE_DIM: usize = 16;
const SAMPLED_SETS: usize = 4096;
const SAMPLE_SEED: u64 = 0x4b1b;

#[derive(Clone, Debug)]
pub struct HilbertBlockBasis {
    n: usize,
    a: [[f64; 2]; 2],
    basis: MatrixBasis<f64>,
}

impl HilbertBlockBasis {
    pub fn new(n: usize) -> Result<Self> {
        if !(2..=MAX_BLOCK).contains(&n) {
            return Err(invalid(format!("block parameter n = {n} outside 2..={MAX_BLOCK}")));
        }
        let h = (n as f64 - 0.25).sqrt();
        let a = [[h, 0.5], [h, -0.5]];
        let d = 2 * n;
        let mut columns = Vec::with_capacity(d);
        for s in 0..2 {
            // Ambient offset of X_s.
            let xs = if s == 0 { 0 } else { n + 1 };
            for j in 0..n {
                let mut col = vec![0.0; d];
                col[n - 1] = a[s][0] / n as f64;
                col[n] = a[s][1] / n as f64;
                // Helmert basis of the complement of Σ e_j.
                for k in 1..n {
                    let c = 1.0 / ((k * (k + 1)) as f64).sqrt();
                    let u = if j < k {
                        c
                    } else if j == k {
                        -(k as f64) * c
                    } else {
                        0.0
                    };
                    col[xs + k - 1] = u;
                }
                columns.push(col);
            }
        }
        Ok(Self { n, a, basis: MatrixBasis::new(columns)? })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// `a_s` as a vector of `X = R²`, `s ∈ {1, 2}`.
    pub fn a(&self, s: usize) -> [f64; 2] {
        self.a[s - 1]
    }

    /// Basis index of `e_j^s`.
    pub fn index(&self, s: usize, j: usize) -> usize {
        (s - 1) * self.n + j
    }

    pub fn matrix(&self) -> &MatrixBasis<f64> {
        &self.basis
    }

    pub fn model(&self) -> BasisModel<f64> {
        BasisModel::Matrix(self.basis.clone())
    }

    pub fn norm(&self, f: &SpVec<f64>) -> f64 {
        self.basis.norm(f)
    }

    /// `1_{ε,Θ_n}` with the block sign `ε_{s,j} = (−1)^s`, i.e. `a_2 − a_1`.
    pub fn theta_signed(&self) -> SpVec<f64> {
        let pairs = (1..=2).flat_map(|s| (1..=self.n).map(move |j| (s, j)));
        SpVec::from_pairs(pairs.map(|(s, j)| (self.index(s, j), if s == 1 { -1.0 } else { 1.0 })))
            .expect("valid indices")
    }

    /// `1_{ε,Θ_n}` with the within-block sign `ε_{s,j} = (−1)^j`.
    pub fn theta_alternating(&self) -> SpVec<f64> {
        let pairs = (1..=2).flat_map(|s| (1..=self.n).map(move |j| (s, j)));
        SpVec::from_pairs(pairs.map(|(s, j)| (self.index(s, j), if j % 2 == 1 { -1.0 } else { 1.0 })))
            .expect("valid indices")
    }

    /// `max_s |Σ_j e_j^s − a_s|` measured in the ambient space.
    pub fn projection_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for s in 1..=2 {
            let sum = SpVec::from_pairs((1..=self.n).map(|j| (self.index(s, j), 1.0))).expect("valid indices");
            let x = self.basis.synthesize(&sum);
            for (i, v) in x.iter().enumerate() {
                let target = if i == self.n - 1 {
                    self.a[s - 1][0]
                } else if i == self.n {
                    self.a[s - 1][1]
                } else {
                    0.0
                };
                worst = worst.max((v - target).abs());
            }
        }
        worst
    }

    /// `‖ψ_j^s‖²` of every coordinate functional.
    pub fn dual_norms_sq(&self) -> Vec<f64> {
        (1..=self.dim()).map(|k| self.basis.dual(k).iter().map(|x| x * x).sum()).collect()
    }
}

fn euclid(v: [f64; 2]) -> f64 {
    (v[0] * v[0] + v[1] * v[1]).sqrt()
}

/// Lower bound for the basis constant from the partial sum `S_k` that
/// projects onto the first `k = ⌊n/2⌋` vectors of block 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartialSumBound {
    pub k: usize,
    /// `‖S_k(a_1 − a_2)‖ / ‖a_1 − a_2‖` evaluated directly.
    pub direct_ratio: f64,
    /// `‖S_k‖` by power iteration.
    pub operator_norm: f64,
    /// `√(k − k²/n)`, the bound obtained through the projection onto `X_1`.
    pub projected_bound: f64,
    /// `(√2/3)√n`.
    pub target: f64,
    /// Coefficients of `a_1 − a_2`.
    pub witness: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HilbertBlockReport {
    pub n: usize,
    pub dim: usize,
    pub a_norms: [f64; 2],
    pub a_gap: f64,
    pub projection_error: f64,
    /// `‖1_{ε,Θ_n}‖` with `ε_{s,j} = (−1)^s`.
    pub theta_norm: f64,
    /// `‖1_{ε,Θ_n}‖` with `ε_{s,j} = (−1)^j`, for comparison.
    pub theta_alternating_norm: f64,
    pub theta_witness: String,
    /// Extremes of `‖1_A‖² / |A|` over the examined non-empty sets.
    pub indicator_ratio_min: f64,
    pub indicator_ratio_max: f64,
    pub indicator_sets: usize,
    pub indicator_exhaustive: bool,
    pub dual_norm_sq_min: f64,
    pub dual_norm_sq_max: f64,
    pub partial_sum: Option<PartialSumBound>,
}

pub fn hilbert_block_report(n: usize, with_operator_norms: bool) -> Result<HilbertBlockReport> {
    let b = HilbertBlockBasis::new(n)?;
    let d = b.dim();
    let ratio = |set: &IndexSet| {
        let v = b.norm(&SpVec::indicator(set, None));
        v * v / set.len() as f64
    };
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    let mut count = 0;
    let exhaustive = d <= EXHAUSTIVE_DIM;
    if exhaustive {
        for mask in 1u32..(1u32 << d) {
            let set: IndexSet = (0..d).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
            let r = ratio(&set);
            lo = lo.min(r);
            hi = hi.max(r);
            count += 1;
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED ^ n as u64);
        for t in 0..SAMPLED_SETS {
            let size = 1 + t % d;
            let set: IndexSet = sample(&mut rng, d, size).into_iter().map(|i| i + 1).collect();
            let r = ratio(&set);
            lo = lo.min(r);
            hi = hi.max(r);
            count += 1;
        }
    }
    let duals = b.dual_norms_sq();
    let partial_sum = with_operator_norms.then(|| {
        let k = n / 2;
        let f = b.theta_signed().scale(-1.0);
        let set: IndexSet = (1..=k).map(|j| b.index(1, j)).collect();
        let head: Vec<usize> = set.iter().copied().collect();
        PartialSumBound {
            k,
            direct_ratio: b.norm(&f.restrict(&set)) / b.norm(&f),
            operator_norm: b.matrix().projection_norm(&head),
            projected_bound: (k as f64 - (k * k) as f64 / n as f64).sqrt(),
            target: 2f64.sqrt() / 3.0 * (n as f64).sqrt(),
            witness: f.to_literal(),
        }
    });
    let theta = b.theta_signed();
    Ok(HilbertBlockReport {
        n,
        dim: d,
        a_norms: [euclid(b.a(1)), euclid(b.a(2))],
        a_gap: euclid([b.a(1)[0] - b.a(2)[0], b.a(1)[1] - b.a(2)[1]]),
        projection_error: b.projection_error(),
        theta_norm: b.norm(&theta),
        theta_alternating_norm: b.norm(&b.theta_alternating()),
        theta_witness: theta.to_literal(),
        indicator_ratio_min: lo,
        indicator_ratio_max: hi,
        indicator_sets: count,
        indicator_exhaustive: exhaustive,
        dual_norm_sq_min: duals.iter().copied().fold(f64::INFINITY, f64::min),
        dual_norm_sq_max: duals.iter().copied().fold(0.0, f64::max),
        partial_sum,
    })
}
