//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64 as C64;
use poiseuille_core::force::{ForceFamily, ForceSpec};
use poiseuille_core::mode::ModeParams;
use poiseuille_core::ChebyshevGrid;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Clamped `L ψ = f` by second-order central differences on `interior` equispaced
/// points, with ghost values `ψ_{−1} = ψ_1` enforcing `ψ' = 0`. Returns `(y, ψ)`.
pub fn fd_clamped(p: &ModeParams, f: impl Fn(f64) -> C64, interior: usize) -> (Vec<f64>, Vec<C64>) {
    let n = interior;
    let h = 2.0 / (n as f64 + 1.0);
    let nh = p.n_hat();
    let nh2 = nh * nh;
    let i = C64::new(0.0, 1.0);
    let (h2, h4) = (h * h, h * h * h * h);
    let ys: Vec<f64> = (1..=n).map(|j| -1.0 + j as f64 * h).collect();
    // rows of the pentadiagonal band: offsets -2..=2
    let mut band = vec![[C64::new(0.0, 0.0); 5]; n];
    let mut rhs: Vec<C64> = ys.iter().map(|&y| f(y)).collect();
    for (j, &y) in ys.iter().enumerate() {
        let u = 0.75 * p.phi() * (1.0 - y * y);
        let ddu = -1.5 * p.phi();
        let side = 4.0 / h4 + (2.0 * nh2 + i * nh * u) / h2;
        let far = C64::new(-1.0 / h4, 0.0);
        let diag = -6.0 / h4 - (4.0 * nh2 + 2.0 * i * nh * u) / h2 - nh2 * nh2 - i * nh * u * nh2 - i * nh * ddu;
        band[j] = [far, side, diag, side, far];
    }
    let (first, last) = (band[0][0], band[n - 1][4]);
    band[0][2] += first;
    band[n - 1][2] += last;
    // elimination without pivoting; the fourth-order part dominates
    for k in 0..n {
        let row = band[k];
        let piv = row[2];
        for d in 1..=2 {
            if k + d >= n {
                break;
            }
            let factor = band[k + d][2 - d] / piv;
            for c in 0..=2 {
                if k + c < n {
                    band[k + d][2 - d + c] -= factor * row[2 + c];
                }
            }
            let r = rhs[k];
            rhs[k + d] -= factor * r;
        }
    }
    let mut x = vec![C64::new(0.0, 0.0); n];
    for k in (0..n).rev() {
        let mut s = rhs[k];
        for c in 1..=2 {
            if k + c < n {
                s -= band[k][2 + c] * x[k + c];
            }
        }
        x[k] = s / band[k][2];
    }
    (ys, x)
}

/// Richardson extrapolation `(4ψ_h − ψ_{2h})/3` of [`fd_clamped`] with `intervals`
/// equal steps and its half-resolution companion, at the interior nodes of the fine grid
/// shared with the coarse one.
pub fn fd_clamped_extrapolated(p: &ModeParams, f: impl Fn(f64) -> C64, intervals: usize) -> (Vec<f64>, Vec<C64>) {
    assert!(intervals.is_multiple_of(2));
    let (ys, fine) = fd_clamped(p, &f, intervals - 1);
    let (_, coarse) = fd_clamped(p, &f, intervals / 2 - 1);
    let mut y = Vec::with_capacity(coarse.len());
    let mut v = Vec::with_capacity(coarse.len());
    for (k, c) in coarse.iter().enumerate() {
        let j = 2 * k + 1;
        y.push(ys[j]);
        v.push((fine[j] * 4.0 - c) / 3.0);
    }
    (y, v)
}

/// `f = i n̂ F₂ − F₁'` from the closed form of a force family, without the grid.
pub fn analytic_rhs(family: ForceFamily, amplitude: f64, p: &ModeParams) -> impl Fn(f64) -> C64 {
    let nh = p.n_hat();
    move |y: f64| {
        let (f1p, f2) = match family {
            ForceFamily::Constant => (0.0, 1.0),
            ForceFamily::Polynomial(k) => {
                let k = k as i32;
                let d = if k == 0 { 0.0 } else { k as f64 * y.powi(k - 1) };
                (d, y.powi(k + 1))
            }
            ForceFamily::Trig(k) => {
                let w = k as f64 * std::f64::consts::PI;
                (w * (w * y).cos(), (w * y).cos())
            }
            ForceFamily::Random(_) => panic!("no closed form"),
        };
        C64::new(0.0, nh * f2 * amplitude) - f1p * amplitude
    }
}

/// Relative discrete `ℓ²` distance `‖a − b‖ / ‖b‖`.
pub fn rel_l2(a: &[C64], b: &[C64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

/// The seeded oracle suite: `Φ` log-uniform in `[1, 1e3]`, `n ∈ 1..=8`, trig or polynomial forces.
pub fn oracle_cases(seed: u64, count: usize) -> Vec<(ModeParams, ForceSpec)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let phi = 10f64.powf(rng.random_range(0.0..3.0));
            let n = rng.random_range(1..=8i64);
            let family = if k % 2 == 0 {
                ForceFamily::Trig(rng.random_range(1..=3u32))
            } else {
                ForceFamily::Polynomial(rng.random_range(0..=3u32))
            };
            (ModeParams::new(n, 1.0, phi).unwrap(), ForceSpec::new(family, 1.0).unwrap())
        })
        .collect()
}

/// Spectral `ψ` interpolated to the points `ys`.
pub fn interpolate_to(values: &[C64], grid: &ChebyshevGrid, ys: &[f64]) -> Vec<C64> {
    ys.iter().map(|&y| grid.interpolate(values, y).unwrap()).collect()
}

/// `Ai(x)` for real `0 ≤ x ≤ 8` from its Maclaurin series.
pub fn ai_series(x: f64) -> f64 {
    let c1 = 0.355_028_053_887_817_2;
    let c2 = 0.258_819_403_792_806_8;
    let (mut f, mut g) = (1.0, x);
    let (mut tf, mut tg) = (1.0, x);
    let x3 = x * x * x;
    for k in 1..200 {
        let k = k as f64;
        tf *= x3 / ((3.0 * k - 1.0) * (3.0 * k));
        tg *= x3 / ((3.0 * k) * (3.0 * k + 1.0));
        f += tf;
        g += tg;
        if tf.abs() < 1e-18 * f.abs() && tg.abs() < 1e-18 * g.abs() {
            break;
        }
    }
    c1 * f - c2 * g
}

/// `∫₀^∞ Ai(t) dt` by composite Gauss–Legendre on `[0, 8]`; the tail is below 1e-9.
pub fn ai_integral_real_axis() -> f64 {
    let nodes = [
        (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
        (-0.538_469_310_105_683, 0.478_628_670_499_366_5),
        (0.0, 0.568_888_888_888_888_9),
        (0.538_469_310_105_683, 0.478_628_670_499_366_5),
        (0.906_179_845_938_664, 0.236_926_885_056_189_1),
    ];
    let panels = 400;
    let w = 8.0 / panels as f64;
    let mut s = 0.0;
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * w;
        for (t, wt) in nodes {
            s += wt * 0.5 * w * ai_series(mid + 0.5 * w * t);
        }
    }
    s
}
