//! Per-mode force families `F_n = (F₁ₙ, F₂ₙ)` sampled on the grid.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{param, Error, Result};
use crate::grid::ChebyshevGrid;

const RANDOM_DEGREE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForceFamily {
    /// `F = (1, 1)`.
    Constant,
    /// `F = (y^k, y^{k+1})`.
    Polynomial(u32),
    /// `F = (sin kπy, cos kπy)`.
    Trig(u32),
    /// Chebyshev series of degree 8 with seeded complex coefficients, conjugated for `n < 0`.
    Random(u64),
}

impl fmt::Display for ForceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ForceFamily::Constant => write!(f, "constant"),
            ForceFamily::Polynomial(k) => write!(f, "poly:{k}"),
            ForceFamily::Trig(k) => write!(f, "trig:{k}"),
            ForceFamily::Random(s) => write!(f, "random:{s}"),
        }
    }
}

impl FromStr for ForceFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (s, None),
        };
        let bad = |why: String| param("force", why);
        let num = |a: Option<&str>| -> Result<u64> {
            a.ok_or_else(|| bad(format!("`{name}` needs an argument, as in `{name}:1`")))?
                .parse::<u64>()
                .map_err(|e| bad(format!("bad argument in `{s}`: {e}")))
        };
        let small = |v: u64| u32::try_from(v).map_err(|_| bad(format!("argument too large in `{s}`")));
        match name {
            "constant" if arg.is_none() => Ok(ForceFamily::Constant),
            "poly" | "polynomial" => Ok(ForceFamily::Polynomial(small(num(arg)?)?)),
            "trig" => Ok(ForceFamily::Trig(small(num(arg)?)?)),
            "random" | "random_seeded" => Ok(ForceFamily::Random(num(arg)?)),
            _ => Err(bad(format!("unknown force family `{s}`; expected constant, poly:k, trig:k or random:s"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceSpec {
    pub family: ForceFamily,
    pub amplitude: f64,
}

impl ForceSpec {
    pub fn new(family: ForceFamily, amplitude: f64) -> Result<Self> {
        if !amplitude.is_finite() {
            return Err(param("amplitude", "must be finite"));
        }
        Ok(Self { family, amplitude })
    }

    /// `(F₁ₙ, F₂ₙ)` at the nodes.
    pub fn sample(&self, n: i64, grid: &ChebyshevGrid) -> ModeForce {
        let a = self.amplitude;
        let (f1, f2) = match self.family {
            ForceFamily::Constant => (grid.sample(|_| C64::new(a, 0.0)), grid.sample(|_| C64::new(a, 0.0))),
            ForceFamily::Polynomial(k) => (
                grid.sample(|y| C64::new(a * y.powi(k as i32), 0.0)),
                grid.sample(|y| C64::new(a * y.powi(k as i32 + 1), 0.0)),
            ),
            ForceFamily::Trig(k) => {
                let w = k as f64 * PI;
                (
                    grid.sample(|y| C64::new(a * (w * y).sin(), 0.0)),
                    grid.sample(|y| C64::new(a * (w * y).cos(), 0.0)),
                )
            }
            ForceFamily::Random(seed) => {
                let c = random_coefficients(seed, n.unsigned_abs());
                let conj = n < 0;
                let eval = |coef: &[C64], y: f64| {
                    let v = chebyshev_sum(coef, y) * a;
                    if conj {
                        v.conj()
                    } else {
                        v
                    }
                };
                (
                    grid.sample(|y| eval(&c[..=RANDOM_DEGREE], y)),
                    grid.sample(|y| eval(&c[RANDOM_DEGREE + 1..], y)),
                )
            }
        };
        ModeForce { f1, f2 }
    }
}

fn random_coefficients(seed: u64, n: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    (0..2 * (RANDOM_DEGREE + 1))
        .map(|_| {
            let re: f64 = rng.random::<f64>() * 2.0 - 1.0;
            let im: f64 = rng.random::<f64>() * 2.0 - 1.0;
            C64::new(re, im)
        })
        .collect()
}

pub(crate) fn chebyshev_sum(c: &[C64], y: f64) -> C64 {
    let (mut b1, mut b2) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    for &ck in c.iter().skip(1).rev() {
        let b0 = ck + b1 * (2.0 * y) - b2;
        b2 = b1;
        b1 = b0;
    }
    c[0] + b1 * y - b2
}

/// `(Σ a_k T_k, Σ b_k T_k)` at the nodes.
pub fn chebyshev_force(f1: &[C64], f2: &[C64], grid: &ChebyshevGrid) -> ModeForce {
    let eval = |c: &[C64], y: f64| if c.is_empty() { C64::new(0.0, 0.0) } else { chebyshev_sum(c, y) };
    ModeForce {
        f1: grid.sample(|y| eval(f1, y)),
        f2: grid.sample(|y| eval(f2, y)),
    }
}

/// One mode of a force field.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeForce {
    pub f1: Vec<C64>,
    pub f2: Vec<C64>,
}

impl ModeForce {
    pub fn zero(grid: &ChebyshevGrid) -> Self {
        Self {
            f1: alloc::vec![C64::new(0.0, 0.0); grid.len()],
            f2: alloc::vec![C64::new(0.0, 0.0); grid.len()],
        }
    }

    /// `∫ |F₁|² + |F₂|² dy`.
    pub fn l2_sq(&self, grid: &ChebyshevGrid) -> Result<f64> {
        let v: Vec<f64> = self.f1.iter().zip(&self.f2).map(|(a, b)| a.norm_sqr() + b.norm_sqr()).collect();
        grid.integrate_real(&v)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            f1: self.f1.iter().map(|z| z * s).collect(),
            f2: self.f2.iter().map(|z| z * s).collect(),
        }
    }
}
