use crate::core::{Scalar, SpVec};
use crate::error::{invalid, Result};

/// Explicit finite basis of `R^d` with its biorthogonal dual rows.
#[derive(Clone, Debug)]
pub struct MatrixBasis<T> {
    d: usize,
    /// `columns[k]` is the basis vector `x_{k+1}`.
    columns: Vec<Vec<T>>,
    /// `duals[j]` is the functional `x*_{j+1}`.
    duals: Vec<Vec<T>>,
}

impl<T: Scalar> MatrixBasis<T> {
    pub fn new(columns: Vec<Vec<T>>) -> Result<Self> {
        let d = columns.len();
        if d == 0 || columns.iter().any(|c| c.len() != d) {
            return Err(invalid("matrix basis needs d columns of length d"));
        }
        let duals = invert_transposed(&columns)?;
        let basis = Self { d, columns, duals };
        let err = basis.biorthogonality_error();
        let tol = T::lit(1e-10).max(T::epsilon() * T::lit(1e3));
        if err > tol {
            return Err(invalid(format!("dual rows fail biorthogonality (error {err})")));
        }
        Ok(basis)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn column(&self, k: usize) -> &[T] {
        &self.columns[k - 1]
    }

    pub fn dual(&self, j: usize) -> &[T] {
        &self.duals[j - 1]
    }

    /// `max |x*_j(x_k) − δ_{jk}|`.
    pub fn biorthogonality_error(&self) -> T {
        let mut worst = T::zero();
        for j in 0..self.d {
            for k in 0..self.d {
                let dot: T = (0..self.d).map(|i| self.duals[j][i] * self.columns[k][i]).sum();
                let target = if j == k { T::one() } else { T::zero() };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// `Σ a_n x_n` as an ambient vector.
    pub fn synthesize(&self, f: &SpVec<T>) -> Vec<T> {
        let mut out = vec![T::zero(); self.d];
        for (n, a) in f.iter() {
            assert!(n <= self.d, "coefficient index {n} beyond basis dimension {}", self.d);
            for (o, x) in out.iter_mut().zip(&self.columns[n - 1]) {
                *o = *o + a * *x;
            }
        }
        out
    }

    /// Coefficients `(x*_n(x))_n` of an ambient vector.
    pub fn coordinates(&self, x: &[T]) -> SpVec<T> {
        let coeffs: Vec<T> = self.duals.iter().map(|row| row.iter().zip(x).map(|(a, b)| *a * *b).sum()).collect();
        SpVec::from_dense(&coeffs)
    }

    /// Euclidean norm of the synthesized vector.
    pub fn norm(&self, f: &SpVec<T>) -> T {
        self.synthesize(f).iter().map(|x| *x * *x).sum::<T>().sqrt()
    }

    /// `‖S_A‖` on the ambient space by power iteration on `S_A^T S_A`
    /// (200 steps, relative tolerance 1e−8).
    pub fn projection_norm(&self, set: &[usize]) -> T {
        if set.is_empty() {
            return T::zero();
        }
        let apply = |v: &[T]| -> Vec<T> {
            let mut out = vec![T::zero(); self.d];
            for &k in set {
                let c: T = self.duals[k - 1].iter().zip(v).map(|(a, b)| *a * *b).sum();
                for (o, x) in out.iter_mut().zip(&self.columns[k - 1]) {
                    *o = *o + c * *x;
                }
            }
            out
        };
        let apply_t = |v: &[T]| -> Vec<T> {
            let mut out = vec![T::zero(); self.d];
            for &k in set {
                let c: T = self.columns[k - 1].iter().zip(v).map(|(a, b)| *a * *b).sum();
                for (o, x) in out.iter_mut().zip(&self.duals[k - 1]) {
                    *o = *o + c * *x;
                }
            }
            out
        };
        let mut v: Vec<T> = (0..self.d).map(|i| T::one() + T::lit(i as f64 * 1e-3)).collect();
        let mut lambda = T::zero();
        for _ in 0..200 {
            let nv: T = v.iter().map(|x| *x * *x).sum::<T>().sqrt();
            if nv.is_zero() {
                return T::zero();
            }
            v.iter_mut().for_each(|x| *x = *x / nv);
            let w = apply_t(&apply(&v));
            let next: T = v.iter().zip(&w).map(|(a, b)| *a * *b).sum();
            let done = (next - lambda).abs() <= T::lit(1e-8) * next.abs();
            lambda = next;
            v = w;
            if done {
                break;
            }
        }
        lambda.max(T::zero()).sqrt()
    }
}

/// Rows of `X^{-1}` where `X` has the given columns (Gauss–Jordan with
/// partial pivoting).
fn invert_transposed<T: Scalar>(columns: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let d = columns.len();
    // a[i][j] = X_{ij} = columns[j][i]
    let mut a: Vec<Vec<T>> = (0..d).map(|i| (0..d).map(|j| columns[j][i]).collect()).collect();
    let mut inv: Vec<Vec<T>> = (0..d).map(|i| (0..d).map(|j| if i == j { T::one() } else { T::zero() }).collect()).collect();
    for col in 0..d {
        let piv = (col..d)
            .max_by(|&r, &s| a[r][col].abs().partial_cmp(&a[s][col].abs()).expect("finite"))
            .expect("non-empty");
        if a[piv][col].abs() <= T::epsilon() {
            return Err(invalid("basis matrix is singular"));
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col];
        for j in 0..d {
            a[col][j] = a[col][j] / p;
            inv[col][j] = inv[col][j] / p;
        }
        for r in 0..d {
            if r != col {
                let factor = a[r][col];
                if !factor.is_zero() {
                    for j in 0..d {
                        a[r][j] = a[r][j] - factor * a[col][j];
                        inv[r][j] = inv[r][j] - factor * inv[col][j];
                    }
                }
            }
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn shear() -> MatrixBasis<f64> {
        MatrixBasis::new(vec![vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap()
    }

    #[test]
    fn duals_are_biorthogonal() {
        let b = shear();
        assert!(b.biorthogonality_error() < 1e-12);
        let f = SpVec::from_dense(&[2.0, -3.0]);
        let x = b.synthesize(&f);
        assert_eq!(b.coordinates(&x), f);
        assert!(MatrixBasis::new(vec![vec![1.0, 1.0], vec![1.0, 1.0]]).is_err());
    }

    #[test]
    fn projection_norm_matches_closed_form() {
        // S_{1} for x1=(1,0), x2=(1,1): x ↦ (x1 − x2) e1, norm √2.
        let b = shear();
        assert_relative_eq!(b.projection_norm(&[1]), 2f64.sqrt(), max_relative = 1e-7);
        assert_relative_eq!(b.projection_norm(&[1, 2]), 1.0, max_relative = 1e-7);
    }
}
