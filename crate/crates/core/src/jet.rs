//! Truncated Taylor series `Σ_{k<5} c_k ε^k` for exact derivatives to order four.

use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;
use num_traits::Zero;

pub const ORDER: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet(pub [C64; ORDER]);

impl Jet {
    pub fn constant(c: C64) -> Self {
        let mut a = [C64::zero(); ORDER];
        a[0] = c;
        Jet(a)
    }

    /// The independent variable at `x`.
    pub fn variable(x: f64) -> Self {
        let mut a = [C64::zero(); ORDER];
        a[0] = C64::new(x, 0.0);
        a[1] = C64::new(1.0, 0.0);
        Jet(a)
    }

    /// Jet of `f(x + ε)` from the derivatives `f⁽ᵏ⁾(x)`.
    pub fn from_derivatives(d: [C64; ORDER]) -> Self {
        let mut a = d;
        let mut fact = 1.0;
        for (k, v) in a.iter_mut().enumerate().skip(1) {
            fact *= k as f64;
            *v /= fact;
        }
        Jet(a)
    }

    /// `f⁽ᵏ⁾(x)` for `k < 5`.
    pub fn derivatives(&self) -> [C64; ORDER] {
        let mut d = self.0;
        let mut fact = 1.0;
        for (k, v) in d.iter_mut().enumerate().skip(1) {
            fact *= k as f64;
            *v *= fact;
        }
        d
    }

    pub fn value(&self) -> C64 {
        self.0[0]
    }

    pub fn scale(self, s: C64) -> Self {
        Jet(self.0.map(|c| c * s))
    }

    pub fn recip(self) -> Self {
        let a = self.0;
        let mut b = [C64::zero(); ORDER];
        b[0] = a[0].inv();
        for k in 1..ORDER {
            let s = (1..=k).fold(C64::zero(), |acc, j| acc + a[j] * b[k - j]);
            b[k] = -s * b[0];
        }
        Jet(b)
    }

    pub fn exp(self) -> Self {
        let a = self.0;
        let mut b = [C64::zero(); ORDER];
        b[0] = a[0].exp();
        // k b_k = Σ j a_j b_{k-j}
        for k in 1..ORDER {
            let s = (1..=k).fold(C64::zero(), |acc, j| acc + a[j] * b[k - j] * (j as f64));
            b[k] = s / (k as f64);
        }
        Jet(b)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut a = self.0;
        for (x, y) in a.iter_mut().zip(o.0) {
            *x += y;
        }
        Jet(a)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet(self.0.map(|c| -c))
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut c = [C64::zero(); ORDER];
        for (i, &x) in self.0.iter().enumerate() {
            for (j, &y) in o.0.iter().enumerate().take(ORDER - i) {
                c[i + j] += x * y;
            }
        }
        Jet(c)
    }
}
