//! Chebyshev–Gauss–Lobatto collocation on [-1, 1].

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{check_len, param, Result};
use crate::linalg::RealMatrix;

pub const MIN_ORDER: usize = 4;
pub const MAX_ORDER: usize = 1024;

/// Points `y_k = cos(kπ/M)`, `k = 0..=M`, with quadrature weights,
/// differentiation matrices of orders one to four and the matching
/// repeated-antiderivative matrices.
#[derive(Debug, Clone)]
pub struct ChebyshevGrid {
    m: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
    bary: Vec<f64>,
    d: [RealMatrix; 4],
    j: [RealMatrix; 4],
}

impl ChebyshevGrid {
    pub fn new(m: usize) -> Result<Self> {
        if !(MIN_ORDER..=MAX_ORDER).contains(&m) {
            return Err(param(
                "M",
                alloc::format!("grid order must lie in [{MIN_ORDER}, {MAX_ORDER}], got {m}"),
            ));
        }
        // sin form keeps the points exactly antisymmetric
        let points: Vec<f64> = (0..=m)
            .map(|k| (PI * (m as f64 - 2.0 * k as f64) / (2.0 * m as f64)).sin())
            .collect();
        let weights = clenshaw_curtis(m);
        let bary: Vec<f64> = (0..=m)
            .map(|k| {
                let s = if k % 2 == 0 { 1.0 } else { -1.0 };
                if k == 0 || k == m {
                    0.5 * s
                } else {
                    s
                }
            })
            .collect();
        let [d1, d2, d3] = diff_matrices(m);
        let d4 = d2.matmul(&d2);
        let mut j = antiderivative_matrices(m);
        refine_lower_rows(&mut j, &points, &bary);
        Ok(Self {
            m,
            points,
            weights,
            bary,
            d: [d1, d2, d3, d4],
            j,
        })
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.m + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Differentiation matrix of order `k` in `1..=4`.
    pub fn d(&self, k: usize) -> &RealMatrix {
        assert!((1..=4).contains(&k), "derivative order {k} not available");
        &self.d[k - 1]
    }

    /// Maps nodal values to the nodal values of the `k`-fold antiderivative
    /// from `-1` of their degree-`M` interpolant (exact, degree `M + k`).
    pub fn j(&self, k: usize) -> &RealMatrix {
        assert!((1..=4).contains(&k), "antiderivative order {k} not available");
        &self.j[k - 1]
    }

    pub fn d1(&self) -> &RealMatrix {
        &self.d[0]
    }

    pub fn d2(&self) -> &RealMatrix {
        &self.d[1]
    }

    pub fn d3(&self) -> &RealMatrix {
        &self.d[2]
    }

    pub fn d4(&self) -> &RealMatrix {
        &self.d[3]
    }

    pub fn sample(&self, f: impl Fn(f64) -> C64) -> Vec<C64> {
        self.points.iter().map(|&y| f(y)).collect()
    }

    pub fn sample_real(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.points.iter().map(|&y| f(y)).collect()
    }

    pub fn diff(&self, values: &[C64], k: usize) -> Result<Vec<C64>> {
        check_len(self.len(), values.len())?;
        Ok(self.d(k).apply(values))
    }

    pub fn integrate(&self, values: &[C64]) -> Result<C64> {
        check_len(self.len(), values.len())?;
        Ok(values
            .iter()
            .zip(&self.weights)
            .fold(C64::zero(), |acc, (&v, &w)| acc + v * w))
    }

    pub fn integrate_real(&self, values: &[f64]) -> Result<f64> {
        check_len(self.len(), values.len())?;
        Ok(values.iter().zip(&self.weights).map(|(v, w)| v * w).sum())
    }

    /// Barycentric interpolant at `y`; returns the nodal value exactly when `y` is a node.
    pub fn interpolate(&self, values: &[C64], y: f64) -> Result<C64> {
        check_len(self.len(), values.len())?;
        if !(y.abs() <= 1.0) {
            return Err(param("y", alloc::format!("must satisfy |y| <= 1, got {y}")));
        }
        let mut num = C64::zero();
        let mut den = 0.0;
        for ((&x, &w), &v) in self.points.iter().zip(&self.bary).zip(values) {
            let dx = y - x;
            if dx == 0.0 {
                return Ok(v);
            }
            let t = w / dx;
            num += v * t;
            den += t;
        }
        Ok(num / den)
    }

    /// Chebyshev coefficients `a_k` with `f(y_j) = Σ a_k T_k(y_j)`.
    pub fn coefficients(&self, values: &[C64]) -> Result<Vec<C64>> {
        check_len(self.len(), values.len())?;
        let m = self.m;
        let cos = cos_table(m);
        let mut a = vec![C64::zero(); m + 1];
        for (k, ak) in a.iter_mut().enumerate() {
            let mut s = C64::zero();
            for (j, &v) in values.iter().enumerate() {
                let half = if j == 0 || j == m { 0.5 } else { 1.0 };
                s += v * (half * cos[(k * j) % (2 * m)]);
            }
            let scale = if k == 0 || k == m { 1.0 } else { 2.0 };
            *ak = s * (scale / m as f64);
        }
        Ok(a)
    }

    /// Antiderivative vanishing at `y = -1`, exact for the degree-`M` interpolant.
    pub fn cumulative_integral(&self, values: &[C64]) -> Result<Vec<C64>> {
        check_len(self.len(), values.len())?;
        Ok(self.j[0].apply(values))
    }
}

/// Clenshaw–Curtis nodes (descending) and weights of order `m` on `[a, b]`.
pub fn clenshaw_curtis_rule(m: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let half = 0.5 * (b - a);
    let pts = (0..=m)
        .map(|k| {
            let y = (PI * (m as f64 - 2.0 * k as f64) / (2.0 * m as f64)).sin();
            a + half * (y + 1.0)
        })
        .collect();
    let w = clenshaw_curtis(m).into_iter().map(|w| w * half).collect();
    (pts, w)
}

/// `cos(πi/M)` for `i` in `0..2M`.
fn cos_table(m: usize) -> Vec<f64> {
    (0..2 * m)
        .map(|i| {
            // reduce to [0, π/2] so symmetric entries agree exactly
            let i = i % (2 * m);
            let i = if i > m { 2 * m - i } else { i };
            let s = if 2 * i > m { -1.0 } else { 1.0 };
            let r = if 2 * i > m { m - i } else { i };
            s * (PI * r as f64 / m as f64).cos()
        })
        .collect()
}

fn coefficient_matrix(m: usize, cos: &[f64]) -> RealMatrix {
    RealMatrix::from_fn(m + 1, m + 1, |k, j| {
        let half = if j == 0 || j == m { 0.5 } else { 1.0 };
        let scale = if k == 0 || k == m { 1.0 } else { 2.0 };
        half * scale * cos[(k * j) % (2 * m)] / m as f64
    })
}

/// Chebyshev coefficients of the antiderivative vanishing at -1; one longer than `a`.
fn antiderivative_coeffs(a: &[f64]) -> Vec<f64> {
    let len = a.len();
    let coef = |k: usize| if k < len { a[k] } else { 0.0 };
    let mut b = vec![0.0; len + 1];
    b[1] = coef(0) - 0.5 * coef(2);
    for (k, bk) in b.iter_mut().enumerate().skip(2) {
        *bk = (coef(k - 1) - coef(k + 1)) / (2.0 * k as f64);
    }
    // T_k(-1) = (-1)^k
    b[0] = -b
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &bk)| if k % 2 == 0 { bk } else { -bk })
        .sum::<f64>();
    b
}

fn antiderivative_matrices(m: usize) -> [RealMatrix; 4] {
    let n = m + 1;
    let cos = cos_table(m);
    let c = coefficient_matrix(m, &cos);
    // columns of coefficients, one per unit nodal vector
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|k| c[(k, j)]).collect()).collect();
    let mut out: Vec<RealMatrix> = Vec::with_capacity(4);
    for p in 1..=4 {
        cols = cols.iter().map(|a| antiderivative_coeffs(a)).collect();
        // coefficients of every column, stacked as rows of a (M+1+p) × (M+1) matrix
        let coeffs = RealMatrix::from_fn(n + p, n, |k, j| cols[j][k]);
        let eval = RealMatrix::from_fn(n, n + p, |i, k| cos[(k * i) % (2 * m)]);
        out.push(eval.matmul(&coeffs));
    }
    let mut it = out.into_iter();
    let mut next = || it.next().unwrap_or_else(|| RealMatrix::zeros(n, n));
    [next(), next(), next(), next()]
}

/// Recomputes the rows with `y ≤ 0` from `∫_{-1}^{y} (y - t)^{k-1}/(k-1)! p(t) dt`
/// by exact Clenshaw–Curtis quadrature on `[-1, y]`. The coefficient-space rows
/// carry absolute errors of order ε, which swamp their true size `(1 + y)^k`
/// next to the wall.
fn refine_lower_rows(j: &mut [RealMatrix; 4], points: &[f64], bary: &[f64]) {
    let n = points.len();
    let q = n + 3;
    let (tq, wq) = {
        let mq = q - 1;
        let t: Vec<f64> = (0..q)
            .map(|k| (PI * (mq as f64 - 2.0 * k as f64) / (2.0 * mq as f64)).sin())
            .collect();
        (t, clenshaw_curtis(mq))
    };
    let mut ell = vec![0.0; n];
    for (i, &x) in points.iter().enumerate() {
        if x > 0.0 {
            continue;
        }
        let mut rows = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        let half = 0.5 * (x + 1.0);
        if half > 0.0 {
            for (&tr, &wr) in tq.iter().zip(&wq) {
                let t = -1.0 + half * (tr + 1.0);
                lagrange(points, bary, t, &mut ell);
                let w = wr * half;
                let h = x - t;
                let kern = [w, w * h, w * h * h / 2.0, w * h * h * h / 6.0];
                for (row, &kv) in rows.iter_mut().zip(&kern) {
                    for (r, &l) in row.iter_mut().zip(&ell) {
                        *r += kv * l;
                    }
                }
            }
        }
        for (jk, row) in j.iter_mut().zip(&rows) {
            jk.row_mut(i).copy_from_slice(row);
        }
    }
}

/// Lagrange basis values at `t` in barycentric form.
fn lagrange(points: &[f64], bary: &[f64], t: f64, out: &mut [f64]) {
    if let Some(k) = points.iter().position(|&x| x == t) {
        out.iter_mut().for_each(|v| *v = 0.0);
        out[k] = 1.0;
        return;
    }
    let mut den = 0.0;
    for ((o, &x), &b) in out.iter_mut().zip(points).zip(bary) {
        *o = b / (t - x);
        den += *o;
    }
    out.iter_mut().for_each(|v| *v /= den);
}

fn clenshaw_curtis(m: usize) -> Vec<f64> {
    let n = m as f64;
    let theta: Vec<f64> = (0..=m).map(|k| PI * k as f64 / n).collect();
    let mut w = vec![0.0; m + 1];
    let mut v = vec![1.0; m.saturating_sub(1)];
    if m.is_multiple_of(2) {
        w[0] = 1.0 / (n * n - 1.0);
        for k in 1..m / 2 {
            let kk = k as f64;
            for (vi, t) in v.iter_mut().zip(&theta[1..m]) {
                *vi -= 2.0 * (2.0 * kk * t).cos() / (4.0 * kk * kk - 1.0);
            }
        }
        for (vi, t) in v.iter_mut().zip(&theta[1..m]) {
            *vi -= (n * t).cos() / (n * n - 1.0);
        }
    } else {
        w[0] = 1.0 / (n * n);
        for k in 1..=(m - 1) / 2 {
            let kk = k as f64;
            for (vi, t) in v.iter_mut().zip(&theta[1..m]) {
                *vi -= 2.0 * (2.0 * kk * t).cos() / (4.0 * kk * kk - 1.0);
            }
        }
    }
    w[m] = w[0];
    for (wi, vi) in w[1..m].iter_mut().zip(&v) {
        *wi = 2.0 * vi / n;
    }
    w
}

/// Orders one to three by the recursion `D⁽ˡ⁾ = l Z ∘ (C diag(D⁽ˡ⁻¹⁾) − D⁽ˡ⁻¹⁾)`
/// with negative-sum diagonals.
fn diff_matrices(m: usize) -> [RealMatrix; 3] {
    let n = m + 1;
    let theta: Vec<f64> = (0..n).map(|k| PI * k as f64 / m as f64).collect();
    let half = n / 2;
    // x_i - x_j from the trig identity, flipped to keep antisymmetry
    let mut dx = RealMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            dx[(i, j)] = 2.0 * ((theta[j] + theta[i]) / 2.0).sin() * ((theta[j] - theta[i]) / 2.0).sin();
        }
    }
    for i in (n - half)..n {
        for j in 0..n {
            dx[(i, j)] = -dx[(n - 1 - i, n - 1 - j)];
        }
    }
    let c: Vec<f64> = (0..n)
        .map(|k| {
            let s = if k % 2 == 0 { 1.0 } else { -1.0 };
            if k == 0 || k == m {
                2.0 * s
            } else {
                s
            }
        })
        .collect();
    let z = RealMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { 1.0 / dx[(i, j)] });
    let mut prev = RealMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 });
    let mut out: Vec<RealMatrix> = Vec::with_capacity(3);
    for l in 1..=3 {
        let lf = l as f64;
        let mut next = RealMatrix::from_fn(n, n, |i, j| {
            if i == j {
                0.0
            } else {
                lf * z[(i, j)] * (c[i] / c[j] * prev[(i, i)] - prev[(i, j)])
            }
        });
        for i in 0..n {
            next[(i, i)] = -small_first_sum(next.row(i));
        }
        out.push(next.clone());
        prev = next;
    }
    let d3 = out.pop().unwrap_or_else(|| RealMatrix::zeros(n, n));
    let d2 = out.pop().unwrap_or_else(|| RealMatrix::zeros(n, n));
    let d1 = out.pop().unwrap_or_else(|| RealMatrix::zeros(n, n));
    [d1, d2, d3]
}

fn small_first_sum(row: &[f64]) -> f64 {
    let mut v: Vec<f64> = row.to_vec();
    v.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    v.iter().sum()
}
