use crate::scalar::{rational_to_f64, Rational};
use crate::{Error, Result};
use num_traits::{One, Zero};
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Field entries a matrix can carry: `f64` or exact rationals.
pub trait Entry:
    Clone
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    /// Pivot test used by elimination; tolerance-based for floats,
    /// exact for rationals.
    fn is_negligible(&self, scale: &Self) -> bool;
    fn abs_cmp(&self, other: &Self) -> std::cmp::Ordering;
}

impl Entry for f64 {
    fn is_negligible(&self, scale: &f64) -> bool {
        self.abs() <= 1e-12 * scale.abs().max(1.0)
    }
    fn abs_cmp(&self, other: &f64) -> std::cmp::Ordering {
        self.abs()
            .partial_cmp(&other.abs())
            .unwrap_or(std::cmp::Ordering::Equal)
    }
}

impl Entry for Rational {
    fn is_negligible(&self, _scale: &Rational) -> bool {
        self.is_zero()
    }
    fn abs_cmp(&self, other: &Rational) -> std::cmp::Ordering {
        use num_traits::Signed;
        self.abs().cmp(&other.abs())
    }
}

/// Dense square matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T> {
    dim: usize,
    data: Vec<T>,
}

pub type FMat = Mat<f64>;
pub type QMat = Mat<Rational>;

impl<T: Entry> Mat<T> {
    pub fn zero(dim: usize) -> Self {
        Mat {
            dim,
            data: vec![T::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::Input(format!(
                    "expected square matrix, got a row of length {} in dimension {dim}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(Mat { dim, data })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn diagonal(entries: Vec<T>) -> Self {
        let dim = entries.len();
        let mut m = Self::zero(dim);
        for (i, e) in entries.into_iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix product");
        let d = self.dim;
        let mut out = Self::zero(d);
        for i in 0..d {
            for k in 0..d {
                let a = self[(i, k)].clone();
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    out[(i, j)] = out[(i, j)].clone() + a.clone() * rhs[(k, j)].clone();
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        Self::from_fn(self.dim, |i, j| self[(i, j)].clone() + rhs[(i, j)].clone())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        Self::from_fn(self.dim, |i, j| self[(i, j)].clone() - rhs[(i, j)].clone())
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::from_fn(self.dim, |i, j| self[(i, j)].clone() * c.clone())
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                let mut acc = T::zero();
                for j in 0..self.dim {
                    acc = acc + self[(i, j)].clone() * v[j].clone();
                }
                acc
            })
            .collect()
    }

    /// Determinant via Gaussian elimination with abs-largest pivoting.
    /// Exact on rationals; on floats the pivot choice keeps growth in check.
    pub fn det(&self) -> T {
        let d = self.dim;
        if d == 0 {
            return T::one();
        }
        let mut m = self.clone();
        let scale = m.max_abs_entry();
        let mut det = T::one();
        for col in 0..d {
            let pivot_row = (col..d).max_by(|&a, &b| m[(a, col)].abs_cmp(&m[(b, col)]));
            let pivot_row = match pivot_row {
                Some(r) => r,
                None => return T::zero(),
            };
            if m[(pivot_row, col)].is_negligible(&scale) {
                return T::zero();
            }
            if pivot_row != col {
                m.swap_rows(pivot_row, col);
                det = det.neg();
            }
            let pivot = m[(col, col)].clone();
            det = det * pivot.clone();
            for r in col + 1..d {
                let factor = m[(r, col)].clone() / pivot.clone();
                if factor.is_zero() {
                    continue;
                }
                for c in col..d {
                    let delta = factor.clone() * m[(col, c)].clone();
                    m[(r, c)] = m[(r, c)].clone() - delta;
                }
            }
        }
        det
    }

    /// Inverse, or a domain error when singular.
    pub fn inverse(&self) -> Result<Self> {
        let d = self.dim;
        let mut m = self.clone();
        let mut inv = Self::identity(d);
        let scale = m.max_abs_entry();
        for col in 0..d {
            let pivot_row = (col..d)
                .max_by(|&a, &b| m[(a, col)].abs_cmp(&m[(b, col)]))
                .ok_or_else(|| Error::Domain("empty matrix".into()))?;
            if m[(pivot_row, col)].is_negligible(&scale) {
                return Err(Error::Domain("matrix is singular".into()));
            }
            m.swap_rows(pivot_row, col);
            inv.swap_rows(pivot_row, col);
            let pivot = m[(col, col)].clone();
            for c in 0..d {
                m[(col, c)] = m[(col, c)].clone() / pivot.clone();
                inv[(col, c)] = inv[(col, c)].clone() / pivot.clone();
            }
            for r in 0..d {
                if r == col {
                    continue;
                }
                let factor = m[(r, col)].clone();
                if factor.is_zero() {
                    continue;
                }
                for c in 0..d {
                    let dm = factor.clone() * m[(col, c)].clone();
                    m[(r, c)] = m[(r, c)].clone() - dm;
                    let di = factor.clone() * inv[(col, c)].clone();
                    inv[(r, c)] = inv[(r, c)].clone() - di;
                }
            }
        }
        Ok(inv)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.dim {
            self.data.swap(a * self.dim + c, b * self.dim + c);
        }
    }

    fn max_abs_entry(&self) -> T {
        let mut best = T::zero();
        for e in &self.data {
            if e.abs_cmp(&best) == std::cmp::Ordering::Greater {
                best = e.clone();
            }
        }
        best
    }

    /// Submatrix determinant on the given rows and columns.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> T {
        assert_eq!(rows.len(), cols.len());
        let k = rows.len();
        let sub = Mat::from_fn(k, |i, j| self[(rows[i], cols[j])].clone());
        sub.det()
    }
}

impl QMat {
    pub fn to_float(&self) -> FMat {
        FMat::from_fn(self.dim, |i, j| rational_to_f64(&self[(i, j)]))
    }
}

impl FMat {
    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Spectral norm via the singular spectrum.
    pub fn op_norm(&self) -> f64 {
        super::jacobi::singular_values(self)
            .map(|s| s.values[0])
            .unwrap_or(f64::NAN)
    }
}

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.dim + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.dim + j]
    }
}
