//! The Airy function `Ai` and its derivative on the complex plane.

use core::f64::consts::PI;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};

/// `Ai(0)`.
pub const AI0: f64 = 0.355_028_053_887_817_2;
/// `Ai'(0)`.
pub const DAI0: f64 = -0.258_819_403_792_806_8;

const SERIES_RADIUS: f64 = 3.0;
const ASYMPTOTIC_RADIUS: f64 = 8.0;
const SERIES_LOSS: f64 = 10.0;
const STEP: f64 = 0.25;
const EXP_LIMIT: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryValue {
    pub z: C64,
    pub ai: C64,
    pub dai: C64,
}

/// `Ai(z)` and `Ai'(z)`.
pub fn airy(z: C64) -> Result<AiryValue> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Parameter {
            name: "z",
            reason: alloc::format!("non-finite argument {z}"),
        });
    }
    let (ai, dai) = if z.arg().abs() > 2.0 * PI / 3.0 && z.norm() > SERIES_RADIUS {
        connection(z)?
    } else {
        principal(z)?
    };
    Ok(AiryValue { z, ai, dai })
}

/// `Ai(z) = -ω Ai(ωz) - ω̄ Ai(ω̄z)` with `ω = e^{2πi/3}`.
fn connection(z: C64) -> Result<(C64, C64)> {
    let w = C64::from_polar(1.0, 2.0 * PI / 3.0);
    let wb = w.conj();
    let (a1, d1) = principal(z * w)?;
    let (a2, d2) = principal(z * wb)?;
    Ok((-w * a1 - wb * a2, -w * w * d1 - wb * wb * d2))
}

/// Valid for `|arg z| ≤ 2π/3`, and for every argument when `|z| ≤ 3`.
/// Between the series and asymptotic radii, the decaying directions are
/// reached by integrating the ODE inward from radius 8, which is stable there.
fn principal(z: C64) -> Result<(C64, C64)> {
    let r = z.norm();
    // the series loses about e^{|ζ| + Re ζ} to cancellation
    let zeta = z.powf(1.5) * (2.0 / 3.0);
    if r <= SERIES_RADIUS || (r < ASYMPTOTIC_RADIUS && zeta.norm() + zeta.re <= SERIES_LOSS) {
        Ok(maclaurin(z))
    } else if r >= ASYMPTOTIC_RADIUS {
        asymptotic(z)
    } else {
        let start = z * (ASYMPTOTIC_RADIUS / r);
        let (a, d) = asymptotic(start)?;
        Ok(step_ode(start, a, d, z))
    }
}

fn maclaurin(z: C64) -> (C64, C64) {
    let z3 = z * z * z;
    let mut f = C64::new(1.0, 0.0);
    let mut g = z;
    let mut df = C64::zero();
    let mut dg = C64::new(1.0, 0.0);
    let (mut tf, mut tg) = (f, g);
    let (mut tdf, mut tdg) = (z * z * 0.5, dg);
    df += tdf;
    for k in 1..200 {
        let kf = k as f64;
        tf *= z3 / ((3.0 * kf - 1.0) * (3.0 * kf));
        tg *= z3 / ((3.0 * kf) * (3.0 * kf + 1.0));
        tdg *= z3 / ((3.0 * kf - 2.0) * (3.0 * kf));
        if k >= 2 {
            tdf *= z3 / ((3.0 * kf - 3.0) * (3.0 * kf - 1.0));
            df += tdf;
        }
        f += tf;
        g += tg;
        dg += tdg;
        let tiny = f64::EPSILON * 1e-3;
        if tf.norm() <= tiny * f.norm()
            && tg.norm() <= tiny * g.norm().max(1e-300)
            && tdf.norm() <= tiny * df.norm().max(1e-300)
            && tdg.norm() <= tiny * dg.norm()
        {
            break;
        }
    }
    (f * AI0 + g * DAI0, df * AI0 + dg * DAI0)
}

fn asymptotic(z: C64) -> Result<(C64, C64)> {
    let zeta = z.powf(1.5) * (2.0 / 3.0);
    if -zeta.re > EXP_LIMIT {
        return Err(Error::AiryOverflow {
            modulus: z.norm(),
            arg: z.arg(),
            sector: "growing sector: Re(2/3 z^{3/2}) is too negative",
        });
    }
    let mut u = 1.0;
    let mut su = C64::new(1.0, 0.0);
    let mut sv = C64::new(1.0, 0.0);
    let mut p = C64::new(1.0, 0.0);
    let inv = -zeta.inv();
    let mut last = f64::INFINITY;
    for k in 1..100 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        p *= inv;
        let term = p * u;
        let size = term.norm();
        if size >= last {
            break;
        }
        su += term;
        sv += p * v;
        last = size;
        if size <= f64::EPSILON * 1e-2 {
            break;
        }
    }
    let e = (-zeta).exp() / (2.0 * PI.sqrt());
    let q = z.powf(0.25);
    Ok((e / q * su, -(e * q) * sv))
}

/// Taylor integration of `y'' = z y` along the segment `from → to`.
fn step_ode(from: C64, mut y: C64, mut dy: C64, to: C64) -> (C64, C64) {
    let span = to - from;
    let steps = (span.norm() / STEP).ceil().max(1.0) as usize;
    let h = span / steps as f64;
    let mut z0 = from;
    for _ in 0..steps {
        // a_{k+2} = (z0 a_k + a_{k-1}) / ((k+2)(k+1))
        let (mut am1, mut a0, mut a1) = (C64::zero(), y, dy);
        let mut hp = C64::new(1.0, 0.0);
        let mut yn = a0;
        let mut dyn_ = a1;
        let mut k = 0usize;
        loop {
            let a2 = (z0 * a0 + am1) / (((k + 2) * (k + 1)) as f64);
            hp *= h;
            yn += a1 * hp;
            dyn_ += a2 * hp * ((k + 2) as f64);
            let size = (a1 * hp).norm() + (a2 * hp).norm();
            am1 = a0;
            a0 = a1;
            a1 = a2;
            k += 1;
            if k > 8 && size <= f64::EPSILON * 1e-3 * (yn.norm() + dyn_.norm()) {
                break;
            }
            if k > 200 {
                break;
            }
        }
        y = yn;
        dy = dyn_;
        z0 += h;
    }
    (y, dy)
}
