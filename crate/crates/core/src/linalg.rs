//! Dense matrices and the complex LU solver used by every collocation solve.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type RealMatrix = Matrix<f64>;
pub type ComplexMatrix = Matrix<C64>;

impl<T: Copy + Zero> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diag(diag: &[T]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn map<U: Copy + Zero>(&self, f: impl Fn(T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }
}

impl<T> Matrix<T>
where
    T: Copy + Zero + Add<Output = T> + Mul<Output = T>,
{
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                let other_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(other_row) {
                    *o = *o + a * b;
                }
            }
        }
        out
    }
}

impl RealMatrix {
    /// `self · v` for a complex vector.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "apply shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(C64::zero(), |acc, (&a, &x)| acc + x * a)
            })
            .collect()
    }

    pub fn apply_real(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "apply shape mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

impl ComplexMatrix {
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "apply shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(C64::zero(), |acc, (&a, &x)| acc + a * x)
            })
            .collect()
    }

    /// Per-row `Σ_j |a_ij| |x_j|`, the scale against which a residual is judged.
    pub fn abs_apply(&self, v: &[C64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(a, x)| a.norm() * x.norm())
                    .sum()
            })
            .collect()
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T> Add for &Matrix<T>
where
    T: Copy + Add<Output = T>,
{
    type Output = Matrix<T>;
    fn add(self, rhs: Self) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T> Sub for &Matrix<T>
where
    T: Copy + Sub<Output = T>,
{
    type Output = Matrix<T>;
    fn sub(self, rhs: Self) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<C64>,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(a: &ComplexMatrix) -> Result<Self> {
        let n = a.rows();
        if n != a.cols() {
            return Err(Error::Contract("LU of a non-square matrix".to_string()));
        }
        let mut lu = a.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = lu.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[i * n + k].norm()))
                .fold((k, -1.0), |best, c| if c.1 > best.1 { c } else { best });
            if pmax == 0.0 || !pmax.is_finite() || !scale.is_finite() {
                return Err(Error::Solver {
                    reason: "singular matrix in LU factorization".to_string(),
                    residual: f64::INFINITY,
                });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            let (upper, lower) = lu.split_at_mut((k + 1) * n);
            let pivot_row = &upper[k * n + k + 1..k * n + n];
            for i in 0..(n - k - 1) {
                let row = &mut lower[i * n..(i + 1) * n];
                let l = row[k] / pivot;
                row[k] = l;
                if l.is_zero() {
                    continue;
                }
                for (x, &u) in row[k + 1..].iter_mut().zip(pivot_row) {
                    *x -= l * u;
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s = row.iter().zip(&x[..i]).fold(C64::zero(), |acc, (&l, &xj)| acc + l * xj);
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n + i + 1..(i + 1) * n];
            let s = row
                .iter()
                .zip(&x[i + 1..])
                .fold(C64::zero(), |acc, (&u, &xj)| acc + u * xj);
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        x
    }
}

/// Outcome of a refined solve.
#[derive(Debug, Clone)]
pub struct RefinedSolve {
    pub x: Vec<C64>,
    /// ‖b - A x‖₂ / ‖b‖₂.
    pub relative_residual: f64,
}

/// Solve `A x = b` from a factorization and apply one step of iterative refinement.
pub fn solve_refined(a: &ComplexMatrix, lu: &Lu, b: &[C64]) -> RefinedSolve {
    let mut x = lu.solve(b);
    let r = residual(a, &x, b);
    let dx = lu.solve(&r);
    for (xi, d) in x.iter_mut().zip(&dx) {
        *xi += d;
    }
    let r = residual(a, &x, b);
    let bnorm = norm2(b);
    let relative_residual = if bnorm == 0.0 { norm2(&r) } else { norm2(&r) / bnorm };
    RefinedSolve {
        x,
        relative_residual,
    }
}

pub fn residual(a: &ComplexMatrix, x: &[C64], b: &[C64]) -> Vec<C64> {
    a.apply(x).iter().zip(b).map(|(ax, bi)| bi - ax).collect()
}

pub fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_norm(v: &[C64]) -> f64 {
    v.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Singular values of a square complex matrix, descending.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    let m = nalgebra::DMatrix::from_row_slice(a.rows(), a.cols(), a.as_slice());
    let svd = nalgebra::linalg::SVD::try_new(m, false, false, f64::EPSILON, 0).ok_or_else(|| {
        Error::Solver {
            reason: "SVD did not converge".to_string(),
            residual: f64::NAN,
        }
    })?;
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn lu_solves_small_complex_system() {
        let a = ComplexMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                c(4.0, 1.0)
            } else {
                c((i + 2 * j) as f64 * 0.3, -0.2)
            }
        });
        let x_true = vec![c(1.0, -1.0), c(0.5, 2.0), c(-3.0, 0.25)];
        let b = a.apply(&x_true);
        let lu = Lu::factor(&a).unwrap();
        let sol = solve_refined(&a, &lu, &b);
        for (x, t) in sol.x.iter().zip(&x_true) {
            assert!((x - t).norm() < 1e-14);
        }
        assert!(sol.relative_residual < 1e-15);
    }

    #[test]
    fn lu_needs_pivoting() {
        let a = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => c(0.0, 0.0),
            (0, 1) => c(1.0, 0.0),
            (1, 0) => c(2.0, 0.0),
            _ => c(3.0, 0.0),
        });
        let lu = Lu::factor(&a).unwrap();
        let x = lu.solve(&[c(1.0, 0.0), c(5.0, 0.0)]);
        assert!((x[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((x[1] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = ComplexMatrix::from_fn(2, 2, |_, _| c(1.0, 0.0));
        assert!(matches!(Lu::factor(&a), Err(Error::Solver { .. })));
    }

    #[test]
    fn singular_values_of_identity_and_diagonal() {
        let id = ComplexMatrix::from_diag(&[c(1.0, 0.0); 4]);
        let s = singular_values(&id).unwrap();
        assert!(s.iter().all(|v| (v - 1.0).abs() < 1e-14));
        let d = ComplexMatrix::from_diag(&[c(1.0, 0.0), c(0.0, 2.0), c(-3.0, 0.0)]);
        let s = singular_values(&d).unwrap();
        assert!((s[0] - 3.0).abs() < 1e-14);
        assert!((s[2] - 1.0).abs() < 1e-14);
    }
}
