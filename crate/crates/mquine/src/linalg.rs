//! Dense square-matrix kernels.
//!
//! Embedding matrices are small (the tuned grids stop at d = 42), so the
//! scoring and gradient paths use hand-written row-major kernels instead of a
//! BLAS binding. Everything here is `f64`; the theorem reproductions assert
//! exact values near zero and cannot afford single-precision drift.

use serde::{Deserialize, Serialize};
use std::ops::{Index, IndexMut};

/// A square d×d matrix stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat {
    d: usize,
    a: Vec<f64>,
}

impl Mat {
    pub fn zeros(d: usize) -> Self {
        Mat {
            d,
            a: vec![0.0; d * d],
        }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Mat::zeros(d);
        for i in 0..d {
            m.a[i * d + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let d = rows.len();
        let mut a = Vec::with_capacity(d * d);
        for row in rows {
            assert_eq!(row.len(), d, "from_rows requires a square layout");
            a.extend_from_slice(row);
        }
        Mat { d, a }
    }

    pub fn from_fn(d: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Mat::zeros(d);
        for i in 0..d {
            for j in 0..d {
                m.a[i * d + j] = f(i, j);
            }
        }
        m
    }

    /// Builds from a row-major slice of length d².
    pub fn from_slice(d: usize, a: &[f64]) -> Self {
        assert_eq!(a.len(), d * d);
        Mat { d, a: a.to_vec() }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.a
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.a
    }

    pub fn transpose(&self) -> Mat {
        let d = self.d;
        Mat::from_fn(d, |i, j| self.a[j * d + i])
    }

    pub fn is_symmetric(&self) -> bool {
        let d = self.d;
        (0..d).all(|i| (0..i).all(|j| self.a[i * d + j] == self.a[j * d + i]))
    }

    pub fn scale(&self, s: f64) -> Mat {
        Mat {
            d: self.d,
            a: self.a.iter().map(|x| x * s).collect(),
        }
    }

    pub fn scale_mut(&mut self, s: f64) {
        for x in &mut self.a {
            *x *= s;
        }
    }

    pub fn add(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.d, rhs.d);
        Mat {
            d: self.d,
            a: self.a.iter().zip(&rhs.a).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn sub(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.d, rhs.d);
        Mat {
            d: self.d,
            a: self.a.iter().zip(&rhs.a).map(|(x, y)| x - y).collect(),
        }
    }

    /// `self += s * rhs`
    pub fn add_scaled(&mut self, s: f64, rhs: &Mat) {
        assert_eq!(self.d, rhs.d);
        for (x, y) in self.a.iter_mut().zip(&rhs.a) {
            *x += s * y;
        }
    }

    /// Squared Frobenius norm.
    pub fn frob_sq(&self) -> f64 {
        self.a.iter().map(|x| x * x).sum()
    }

    pub fn frob(&self) -> f64 {
        self.frob_sq().sqrt()
    }

    /// `self · rhs`
    pub fn mul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.d, rhs.d);
        let d = self.d;
        let mut out = Mat::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let aik = self.a[i * d + k];
                if aik == 0.0 {
                    continue;
                }
                let row_b = &rhs.a[k * d..(k + 1) * d];
                let row_o = &mut out.a[i * d..(i + 1) * d];
                for j in 0..d {
                    row_o[j] += aik * row_b[j];
                }
            }
        }
        out
    }

    /// `selfᵀ · rhs`
    pub fn mul_tn(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.d, rhs.d);
        let d = self.d;
        let mut out = Mat::zeros(d);
        for k in 0..d {
            for i in 0..d {
                let aki = self.a[k * d + i];
                if aki == 0.0 {
                    continue;
                }
                let row_b = &rhs.a[k * d..(k + 1) * d];
                let row_o = &mut out.a[i * d..(i + 1) * d];
                for j in 0..d {
                    row_o[j] += aki * row_b[j];
                }
            }
        }
        out
    }

    /// `self · rhsᵀ`
    pub fn mul_nt(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.d, rhs.d);
        let d = self.d;
        let mut out = Mat::zeros(d);
        for i in 0..d {
            for j in 0..d {
                let mut acc = 0.0;
                let row_a = &self.a[i * d..(i + 1) * d];
                let row_b = &rhs.a[j * d..(j + 1) * d];
                for k in 0..d {
                    acc += row_a[k] * row_b[k];
                }
                out.a[i * d + j] = acc;
            }
        }
        out
    }

    /// `‖A·B − C‖²_F` without materializing the product; the per-candidate
    /// kernel on the ranking fast path.
    pub fn mul_minus_frob_sq(a: &Mat, b: &Mat, c: &Mat) -> f64 {
        assert_eq!(a.d, b.d);
        assert_eq!(a.d, c.d);
        let d = a.d;
        let mut acc = 0.0;
        for i in 0..d {
            let row_a = &a.a[i * d..(i + 1) * d];
            for j in 0..d {
                let mut v = -c.a[i * d + j];
                for k in 0..d {
                    v += row_a[k] * b.a[k * d + j];
                }
                acc += v * v;
            }
        }
        acc
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.a[i * self.d + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.a[i * self.d + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(a: f64, b: f64, c: f64, d: f64) -> Mat {
        Mat::from_rows(&[&[a, b], &[c, d]])
    }

    #[test]
    fn mul_matches_hand_computation() {
        let a = m2(1.0, 2.0, 3.0, 4.0);
        let b = m2(5.0, 6.0, 7.0, 8.0);
        assert_eq!(a.mul(&b), m2(19.0, 22.0, 43.0, 50.0));
    }

    #[test]
    fn transposed_products_agree_with_explicit_transpose() {
        let a = m2(1.0, -2.0, 0.5, 3.0);
        let b = m2(2.0, 1.0, -1.0, 4.0);
        assert_eq!(a.mul_tn(&b), a.transpose().mul(&b));
        assert_eq!(a.mul_nt(&b), a.mul(&b.transpose()));
    }

    #[test]
    fn fused_residual_matches_composed_ops() {
        let a = m2(1.0, 2.0, -1.0, 0.5);
        let b = m2(0.3, -0.7, 2.0, 1.0);
        let c = m2(1.0, 1.0, 0.0, -2.0);
        let direct = a.mul(&b).sub(&c).frob_sq();
        let fused = Mat::mul_minus_frob_sq(&a, &b, &c);
        assert!((direct - fused).abs() < 1e-12);
    }

    #[test]
    fn identity_is_neutral() {
        let a = m2(1.0, 2.0, 3.0, 4.0);
        let i = Mat::identity(2);
        assert_eq!(a.mul(&i), a);
        assert_eq!(i.mul(&a), a);
    }
}
