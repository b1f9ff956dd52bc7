//! Airy boundary layers and the five-part decomposition of a clamped mode solution.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::airy::airy;
use crate::error::{check_len, param, Error, Result};
use crate::grid::{clenshaw_curtis_rule, ChebyshevGrid};
use crate::jet::Jet;
use crate::linalg::{solve_refined, ComplexMatrix, Lu};
use crate::mode::{
    solve_mode_clamped, BcKind, ModeOperator, ModeParams, ModeSolution, Regime, RegimeConfig,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerConfig {
    pub rho_max: f64,
    pub points: usize,
    /// Radius beyond which `e^ρ |G|` is monitored.
    pub decay_radius: f64,
}

impl Default for LayerConfig {
    fn default() -> Self {
        Self {
            rho_max: 40.0,
            points: 160,
            decay_radius: 10.0,
        }
    }
}

/// Grid order for decompositions: the cutoff ramp of width 1/4 is C^∞ but not
/// analytic, so the correctors converge subgeometrically when the layer has not
/// decayed inside the ramp.
pub const DECOMPOSITION_MIN_ORDER: usize = 512;

pub fn decomposition_order(params: &ModeParams) -> usize {
    params.resolved_order().max(DECOMPOSITION_MIN_ORDER)
}

/// Smooth cutoff equal to 0 for `y ≤ 1/4` and 1 for `y ≥ 1/2`.
pub fn chi_plus(y: f64) -> f64 {
    chi_plus_jet(y).value().re
}

pub fn chi_minus(y: f64) -> f64 {
    chi_plus(-y)
}

fn chi_plus_jet(y: f64) -> Jet {
    let t = 4.0 * y - 1.0;
    if t <= 0.0 {
        return Jet::constant(C64::zero());
    }
    if t >= 1.0 {
        return Jet::constant(C64::new(1.0, 0.0));
    }
    // h(t) = e^{-1/t},  χ = h(t) / (h(t) + h(1 - t))
    let tj = Jet::variable(y).scale(C64::new(4.0, 0.0)) - Jet::constant(C64::new(1.0, 0.0));
    let sj = Jet::constant(C64::new(1.0, 0.0)) - tj;
    let h = |x: Jet| (-x.recip()).exp();
    let a = h(tj);
    let b = h(sj);
    a * (a + b).recip()
}

fn chi_minus_jet(y: f64) -> Jet {
    // χ⁻(y) = χ⁺(-y)
    let j = chi_plus_jet(-y);
    let mut c = j.0;
    for (k, v) in c.iter_mut().enumerate() {
        if k % 2 == 1 {
            *v = -*v;
        }
    }
    Jet(c)
}

/// The layer profile `G` solving `G'' − (n̂/β)² G = G̃` with `G → 0` at infinity.
#[derive(Debug, Clone)]
pub struct LayerProfile {
    pub params: ModeParams,
    pub rho_max: f64,
    pub decay_radius: f64,
    pub rho: Vec<f64>,
    pub g: Vec<C64>,
    pub g1: Vec<C64>,
    pub g2: Vec<C64>,
    pub g3: Vec<C64>,
    pub c0: C64,
    /// `sup_{ρ ≥ R} e^ρ |G⁽ᵏ⁾(ρ)|`, `k ≤ 3`, over nodes above the roundoff floor.
    pub envelope: f64,
    /// Relative residual of the profile ODE at the closure nodes.
    pub ode_residual: f64,
    grid: ChebyshevGrid,
    k: f64,
    c: C64,
    shift: C64,
}

impl LayerProfile {
    pub fn build(params: &ModeParams, cfg: &LayerConfig) -> Result<Self> {
        if params.n() == 0 {
            return Err(param("n", "boundary layers exist only for n != 0"));
        }
        if !(params.phi() > 0.0) {
            return Err(param("phi", "boundary layers need a positive flux"));
        }
        if !(cfg.rho_max >= 30.0) || !cfg.rho_max.is_finite() {
            return Err(param("rho_max", alloc::format!("must be at least 30, got {}", cfg.rho_max)));
        }
        if !(cfg.decay_radius > 0.0 && cfg.decay_radius < cfg.rho_max) {
            return Err(param("decay_radius", "must lie in (0, rho_max)"));
        }
        let beta = params.beta();
        let nh = params.n_hat();
        let k = nh.abs() / beta;
        let c = if params.n() > 0 {
            C64::from_polar(1.0, PI / 6.0)
        } else {
            C64::from_polar(1.0, -PI / 6.0)
        };
        // 2βn̂ / (3iΦ)
        let shift = C64::new(0.0, -2.0 * beta * nh / (3.0 * params.phi()));
        let grid = ChebyshevGrid::new(cfg.points)?;
        let m = grid.order();
        let rho: Vec<f64> = grid.points().iter().map(|y| 0.5 * cfg.rho_max * (1.0 - y)).collect();
        let (gt, gt1): (Vec<C64>, Vec<C64>) = rho
            .iter()
            .map(|&r| airy(c * (r + shift)).map(|v| (v.ai, v.dai * c)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .unzip();
        // G = h² J₂ G'' and G' = −h J₁ G'' vanish at ρ_max, which closes G'' − k²G = G̃
        let h = 0.5 * cfg.rho_max;
        let j1 = grid.j(1);
        let j2 = grid.j(2);
        let a = ComplexMatrix::from_fn(m + 1, m + 1, |i, j| {
            let delta = if i == j { 1.0 } else { 0.0 };
            C64::new(delta - k * k * h * h * j2[(i, j)], 0.0)
        });
        let lu = Lu::factor(&a)?;
        let g2 = solve_refined(&a, &lu, &gt).x;
        let g: Vec<C64> = j2.apply(&g2).into_iter().map(|x| x * (h * h)).collect();
        let g1: Vec<C64> = j1.apply(&g2).into_iter().map(|x| x * -h).collect();
        let g3: Vec<C64> = g1.iter().zip(&gt1).map(|(d, t)| d * (k * k) + t).collect();
        let gt_max = gt.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
        let ode_residual = (0..=m)
            .map(|i| (g2[i] - g[i] * (k * k) - gt[i]).norm())
            .fold(0.0, f64::max)
            / gt_max;

        let g0 = g[0];
        let c0 = if g0.norm() >= 1.0 { g0.inv() } else { C64::new(1.0, 0.0) };

        let floor = |v: &[C64]| 1e-12 * v.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
        let mut envelope = 0.0f64;
        for v in [&g, &g1, &g2, &g3] {
            let fl = floor(v);
            for (r, z) in rho.iter().zip(v.iter()) {
                if *r >= cfg.decay_radius && z.norm() > fl {
                    envelope = envelope.max(r.exp() * z.norm());
                }
            }
        }
        let g_max = g.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
        let tail = rho
            .iter()
            .zip(&g)
            .filter(|(r, _)| **r >= cfg.rho_max - 5.0)
            .fold(0.0f64, |acc, (_, z)| acc.max(z.norm()));
        if tail > 1e-10 * g_max {
            return Err(Error::LayerDecay {
                rho_max: cfg.rho_max,
                envelope: tail / g_max,
            });
        }
        Ok(Self {
            params: *params,
            rho_max: cfg.rho_max,
            decay_radius: cfg.decay_radius,
            rho,
            g,
            g1,
            g2,
            g3,
            c0,
            envelope,
            ode_residual,
            grid,
            k,
            c,
            shift,
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// `G̃(ρ)` and `G̃'(ρ)`.
    pub fn g_tilde(&self, rho: f64) -> Result<(C64, C64)> {
        let v = airy(self.c * (rho + self.shift))?;
        Ok((v.ai, v.dai * self.c))
    }

    /// `G⁽ʲ⁾(ρ)` for `j ≤ 4`; zero beyond `rho_max`.
    pub fn eval(&self, rho: f64) -> Result<[C64; 5]> {
        if rho < 0.0 {
            return Err(param("rho", "must be nonnegative"));
        }
        if rho >= self.rho_max {
            return Ok([C64::zero(); 5]);
        }
        let y = 1.0 - 2.0 * rho / self.rho_max;
        let y = y.clamp(-1.0, 1.0);
        let g = self.grid.interpolate(&self.g, y)?;
        let g1 = self.grid.interpolate(&self.g1, y)?;
        let (gt, gt1) = self.g_tilde(rho)?;
        let k2 = self.k * self.k;
        let c3 = self.c * self.c * self.c;
        let g2 = g * k2 + gt;
        let g3 = g1 * k2 + gt1;
        let g4 = g2 * k2 + c3 * (rho + self.shift) * gt;
        Ok([g, g1, g2, g3, g4])
    }

    /// Jet in `y` of `ψ⁺ = C₀ G(β(1 − y))` (`sign = -1`) or `ψ⁻ = C₀ G(β(1 + y))` (`sign = +1`).
    fn layer_jet(&self, y: f64, sign: f64) -> Result<Jet> {
        let beta = self.params.beta();
        let rho = beta * (1.0 + sign * y);
        let d = self.eval(rho.max(0.0))?;
        let mut out = [C64::zero(); 5];
        let mut f = 1.0;
        for (j, v) in out.iter_mut().enumerate() {
            *v = d[j] * self.c0 * f;
            f *= sign * beta;
        }
        Ok(Jet::from_derivatives(out))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// One parity's layer-corrector and irrotational pieces.
#[derive(Debug, Clone)]
pub struct ParityPart {
    pub parity: Parity,
    pub psi_s: Vec<C64>,
    pub psi_bl: Vec<C64>,
    pub psi_e: Vec<C64>,
    pub psi_p: Vec<C64>,
    pub psi_r: Vec<C64>,
    pub a: C64,
    pub b: C64,
    /// The matching denominator.
    pub denominator: C64,
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub params: ModeParams,
    pub profile: LayerProfile,
    pub psi_s: Vec<C64>,
    pub even: ParityPart,
    pub odd: ParityPart,
    pub assembled: Vec<C64>,
}

impl Decomposition {
    pub fn parts(&self) -> [&ParityPart; 2] {
        [&self.even, &self.odd]
    }

    /// `|b^e| + |b^o|`.
    pub fn b_sum(&self) -> f64 {
        self.even.b.norm() + self.odd.b.norm()
    }

    pub fn assembled_solution(&self, grid: &ChebyshevGrid) -> Result<ModeSolution> {
        ModeSolution::from_psi(self.params, BcKind::Clamped, self.assembled.clone(), grid)
    }

    /// Relative L² distance to the direct clamped solve of the same force.
    pub fn compare_direct(&self, f: &[C64], grid: &ChebyshevGrid) -> Result<f64> {
        let direct = solve_mode_clamped(&self.params, f, grid)?;
        relative_l2(&self.assembled, &direct.psi, grid)
    }
}

pub fn relative_l2(a: &[C64], b: &[C64], grid: &ChebyshevGrid) -> Result<f64> {
    let diff: Vec<C64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let sq = |v: &[C64]| grid.integrate_real(&v.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>());
    let num = sq(&diff)?;
    let den = sq(b)?;
    Ok(if den == 0.0 { num.sqrt() } else { (num / den).sqrt() })
}

/// `L ψ` from `ψ, ψ', …, ψ⁗` at one point.
fn apply_operator(params: &ModeParams, y: f64, d: &[C64; 5]) -> C64 {
    let nh = params.n_hat();
    let nh2 = nh * nh;
    let u = 0.75 * params.phi() * (1.0 - y * y);
    let ddu = -1.5 * params.phi();
    let i = C64::new(0.0, 1.0);
    -i * nh * ddu * d[0] + i * nh * u * (d[2] - d[0] * nh2) - (d[4] - d[2] * (2.0 * nh2) + d[0] * (nh2 * nh2))
}

/// The five-part decomposition of the clamped solution with right-hand side `f`.
pub fn build_decomposition(
    params: &ModeParams,
    f: &[C64],
    grid: &ChebyshevGrid,
    regime: &RegimeConfig,
    layer: &LayerConfig,
) -> Result<Decomposition> {
    check_len(grid.len(), f.len())?;
    if params.regime(regime) != Regime::Medium {
        return Err(param(
            "n",
            alloc::format!(
                "decomposition needs the medium regime 1 <= |n| <= eps1 L sqrt(phi) with phi >= phi0; got {}",
                params.regime(regime).as_str()
            ),
        ));
    }
    let profile = LayerProfile::build(params, layer)?;
    let slip = ModeOperator::new(*params, grid, BcKind::Slip)?;
    let m = grid.order();
    let pts = grid.points();
    let nh = params.n_hat();

    let plus: Vec<Option<Jet>> = pts
        .iter()
        .map(|&y| {
            let chi = chi_plus_jet(y);
            if chi.value().re == 0.0 && y <= 0.25 {
                Ok(None)
            } else {
                Ok(Some(chi * profile.layer_jet(y, -1.0)?))
            }
        })
        .collect::<Result<_>>()?;
    let minus: Vec<Option<Jet>> = pts
        .iter()
        .map(|&y| {
            let chi = chi_minus_jet(y);
            if chi.value().re == 0.0 && y >= -0.25 {
                Ok(None)
            } else {
                Ok(Some(chi * profile.layer_jet(y, 1.0)?))
            }
        })
        .collect::<Result<_>>()?;

    let psi_s = slip.solve(f, grid)?.psi;

    let mut parts = Vec::with_capacity(2);
    for parity in [Parity::Even, Parity::Odd] {
        let sgn = if parity == Parity::Even { 1.0 } else { -1.0 };
        let fp: Vec<C64> = (0..=m).map(|k| (f[k] + f[m - k] * sgn) * 0.5).collect();
        let psi_sp = slip.solve(&fp, grid)?.psi;

        let mut psi_bl = Vec::with_capacity(m + 1);
        let mut q = Vec::with_capacity(m + 1);
        for (k, &y) in pts.iter().enumerate() {
            let mut jet = Jet::constant(C64::zero());
            if let Some(p) = plus[k] {
                jet = jet + p;
            }
            if let Some(p) = minus[k] {
                jet = jet + p.scale(C64::new(sgn, 0.0));
            }
            let d = jet.derivatives();
            psi_bl.push(d[0]);
            q.push(-apply_operator(params, y, &d));
        }
        let psi_e = slip.solve(&q, grid)?.psi;

        let psi_p: Vec<C64> = pts
            .iter()
            .map(|&y| C64::new((nh * y).exp() + sgn * (-nh * y).exp(), 0.0))
            .collect();
        let rhs_r: Vec<C64> = psi_p
            .iter()
            .map(|p| C64::new(0.0, nh * (-1.5 * params.phi())) * p)
            .collect();
        let psi_r = slip.solve(&rhs_r, grid)?.psi;

        let d1 = grid.d1();
        let dtop = |v: &[C64]| {
            d1.row(0)
                .iter()
                .zip(v)
                .fold(C64::zero(), |acc, (&w, &x)| acc + x * w)
        };
        let (bl1, p1) = (psi_bl[0], psi_p[0]);
        let terms = [
            bl1 * (dtop(&psi_p) + dtop(&psi_r)) / p1,
            -dtop(&psi_bl),
            -dtop(&psi_e),
        ];
        let denominator = terms[0] + terms[1] + terms[2];
        let size: f64 = terms.iter().map(|t| t.norm()).sum();
        if !(denominator.norm() > 1e-12 * size) {
            return Err(Error::Degenerate {
                denominator: denominator.norm(),
            });
        }
        let b = dtop(&psi_sp) / denominator;
        let a = -bl1 / p1 * b;
        parts.push(ParityPart {
            parity,
            psi_s: psi_sp,
            psi_bl,
            psi_e,
            psi_p,
            psi_r,
            a,
            b,
            denominator,
        });
    }
    let odd = parts.pop().ok_or_else(|| Error::Contract("missing odd part".to_string()))?;
    let even = parts.pop().ok_or_else(|| Error::Contract("missing even part".to_string()))?;
    let assembled = (0..=m)
        .map(|k| {
            let mut v = psi_s[k];
            for p in [&even, &odd] {
                v += p.b * (p.psi_bl[k] + p.psi_e[k]) + p.a * (p.psi_p[k] + p.psi_r[k]);
            }
            v
        })
        .collect();
    Ok(Decomposition {
        params: *params,
        profile,
        psi_s,
        even,
        odd,
        assembled,
    })
}

/// `|∫_ℓ e^{-μz} Ai(z + μ²) dz|` along `ℓ = {r e^{iπ/6}, r ≥ 0}`.
pub fn contour_integral_k(mu: C64) -> Result<f64> {
    Ok(contour_integral(mu)?.norm())
}

/// The signed integral behind [`contour_integral_k`].
pub fn contour_integral(mu: C64) -> Result<C64> {
    if !(mu.norm() <= 1.0) {
        return Err(param("mu", alloc::format!("need |mu| <= 1, got {}", mu.norm())));
    }
    if mu.norm() > 0.0 && (mu.arg() + PI / 6.0).abs() > 1e-9 {
        return Err(param("mu", "need arg mu = -pi/6"));
    }
    let dir = C64::from_polar(1.0, PI / 6.0);
    let mu2 = mu * mu;
    let panel = 0.5;
    let (nodes, weights) = clenshaw_curtis_rule(24, 0.0, panel);
    let mut total = C64::zero();
    let mut last = f64::INFINITY;
    for p in 0..400 {
        let r0 = p as f64 * panel;
        let mut part = C64::zero();
        let mut peak = 0.0f64;
        for (&t, &w) in nodes.iter().zip(&weights) {
            let z = dir * (r0 + t);
            let v = (-mu * z).exp() * airy(z + mu2)?.ai;
            peak = peak.max(v.norm());
            part += v * w;
        }
        total += part * dir;
        last = peak;
        if r0 > 2.0 && peak < 1e-14 {
            return Ok(total);
        }
    }
    Err(Error::Contour { tail: last })
}
