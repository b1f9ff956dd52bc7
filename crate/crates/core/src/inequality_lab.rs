//! Randomized checks of the one-dimensional Poincaré, trace, weighted and
//! interpolation inequalities on `[−1, 1]`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_len, param, Error, Result};
use crate::exec::Executor;
use crate::force::chebyshev_sum;
use crate::grid::ChebyshevGrid;

/// Tolerance for the declared boundary conditions.
pub const BC_TOL: f64 = 1e-10;

/// Trace constant `(5/2)^{1/2}`.
pub fn trace_constant() -> f64 {
    2.5f64.sqrt()
}

pub const HLP_DERIVATIVE: f64 = 1.0 / 3.0;
pub const HLP_MASS: f64 = 92.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BcClass {
    Free,
    /// `g(±1) = 0`.
    Dirichlet,
    /// `g(±1) = g'(±1) = 0`.
    Clamped,
}

impl BcClass {
    pub fn as_str(self) -> &'static str {
        match self {
            BcClass::Free => "free",
            BcClass::Dirichlet => "dirichlet",
            BcClass::Clamped => "clamped",
        }
    }

    fn power(self) -> u32 {
        match self {
            BcClass::Free => 0,
            BcClass::Dirichlet => 1,
            BcClass::Clamped => 2,
        }
    }

    fn implies(self, need: BcClass) -> bool {
        self.power() >= need.power()
    }
}

/// Smooth building blocks with closed-form derivatives.
#[derive(Debug, Clone, PartialEq)]
pub enum Basis {
    /// `y^k`.
    Poly(u32),
    /// `e^{i k π y / 2}`.
    Trig(u32),
    /// `e^{−a (y − c)²}`.
    Bump { center: f64, sharpness: f64 },
    /// `Σ c_k T_k(y)`.
    Chebyshev(Vec<C64>),
}

impl Basis {
    /// `b, b', …, b⁗` at `y`.
    fn jet(&self, y: f64) -> [C64; 5] {
        let mut out = [C64::zero(); 5];
        match self {
            Basis::Poly(k) => {
                let k = *k as i32;
                for (d, o) in out.iter_mut().enumerate() {
                    let d = d as i32;
                    if d <= k {
                        let fall: f64 = ((k - d + 1)..=k).map(f64::from).product();
                        *o = C64::new(fall * y.powi(k - d), 0.0);
                    }
                }
            }
            Basis::Trig(k) => {
                let w = *k as f64 * PI / 2.0;
                let e = C64::new(0.0, w * y).exp();
                let mut f = C64::new(1.0, 0.0);
                for o in out.iter_mut() {
                    *o = f * e;
                    f *= C64::new(0.0, w);
                }
            }
            Basis::Bump { center, sharpness } => {
                let s = sharpness.sqrt();
                let x = s * (y - center);
                let e = (-x * x).exp();
                let h = [
                    1.0,
                    2.0 * x,
                    4.0 * x * x - 2.0,
                    8.0 * x.powi(3) - 12.0 * x,
                    16.0 * x.powi(4) - 48.0 * x * x + 12.0,
                ];
                for (d, o) in out.iter_mut().enumerate() {
                    *o = C64::new((-s).powi(d as i32) * h[d] * e, 0.0);
                }
            }
            Basis::Chebyshev(c) => {
                let mut coef = c.clone();
                for o in out.iter_mut() {
                    *o = if coef.is_empty() { C64::zero() } else { chebyshev_sum(&coef, y) };
                    coef = chebyshev_derivative(&coef);
                }
            }
        }
        out
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::Poly(k) => write!(f, "poly:{k}"),
            Basis::Trig(k) => write!(f, "trig:{k}"),
            Basis::Bump { center, sharpness } => write!(f, "bump:{center}:{sharpness}"),
            Basis::Chebyshev(c) => write!(f, "chebyshev:{}", c.len().saturating_sub(1)),
        }
    }
}

fn chebyshev_derivative(c: &[C64]) -> Vec<C64> {
    let n = c.len();
    if n <= 1 {
        return Vec::new();
    }
    // c'_k = c'_{k+2} + 2(k+1) c_{k+1}
    let mut d = alloc::vec![C64::zero(); n + 1];
    for k in (0..n - 1).rev() {
        d[k] = d[k + 2] + c[k + 1] * (2.0 * (k + 1) as f64);
    }
    d[0] *= 0.5;
    d.truncate(n - 1);
    d
}

/// `(1 − y²)^p` and its derivatives.
fn weight_jet(p: u32, y: f64) -> [f64; 5] {
    match p {
        0 => [1.0, 0.0, 0.0, 0.0, 0.0],
        1 => [1.0 - y * y, -2.0 * y, -2.0, 0.0, 0.0],
        _ => [
            (1.0 - y * y).powi(2),
            4.0 * y.powi(3) - 4.0 * y,
            12.0 * y * y - 4.0,
            24.0 * y,
            24.0,
        ],
    }
}

const BINOM: [[f64; 5]; 5] = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0, 0.0],
    [1.0, 3.0, 3.0, 1.0, 0.0],
    [1.0, 4.0, 6.0, 4.0, 1.0],
];

/// `(1 − y²)^p Σ c_i b_i(y)` for the declared boundary class.
#[derive(Debug, Clone, PartialEq)]
pub struct Recipe {
    pub terms: Vec<(C64, Basis)>,
    pub bc: BcClass,
}

impl Recipe {
    pub fn single(basis: Basis, bc: BcClass) -> Self {
        Self {
            terms: alloc::vec![(C64::new(1.0, 0.0), basis)],
            bc,
        }
    }

    pub fn with_bc(&self, bc: BcClass) -> Self {
        Self {
            terms: self.terms.clone(),
            bc,
        }
    }

    pub fn jet(&self, y: f64) -> [C64; 5] {
        let w = weight_jet(self.bc.power(), y);
        let mut b = [C64::zero(); 5];
        for (c, basis) in &self.terms {
            for (acc, v) in b.iter_mut().zip(basis.jet(y)) {
                *acc += c * v;
            }
        }
        let mut out = [C64::zero(); 5];
        for (k, o) in out.iter_mut().enumerate() {
            for j in 0..=k {
                *o += b[k - j] * (BINOM[k][j] * w[j]);
            }
        }
        out
    }

    pub fn label(&self) -> String {
        let mut s = String::new();
        for (i, (_, b)) in self.terms.iter().enumerate() {
            if i > 0 {
                s.push('+');
            }
            s.push_str(&format!("{b}"));
        }
        if s.is_empty() {
            s.push_str("zero");
        }
        format!("{}|{}", s, self.bc.as_str())
    }
}

/// A function on the grid with its first four derivatives and boundary class.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    pub label: String,
    pub bc: BcClass,
    /// `g, g', g'', g''', g⁗` at the nodes.
    pub values: [Vec<C64>; 5],
}

impl TestFunction {
    /// Validates the declared boundary class against the sampled values.
    pub fn new(label: impl Into<String>, bc: BcClass, values: [Vec<C64>; 5], grid: &ChebyshevGrid) -> Result<Self> {
        for v in &values {
            check_len(grid.len(), v.len())?;
        }
        let m = grid.order();
        let scale = values[0].iter().fold(1.0f64, |a, z| a.max(z.norm()));
        let check = |k: usize, what: &str| -> Result<()> {
            let worst = values[k][0].norm().max(values[k][m].norm());
            if worst > BC_TOL * scale {
                return Err(param(
                    "test_function",
                    format!("declared {} but {what} at the wall is {worst:e}", bc.as_str()),
                ));
            }
            Ok(())
        };
        if bc.implies(BcClass::Dirichlet) {
            check(0, "|g|")?;
        }
        if bc.implies(BcClass::Clamped) {
            check(1, "|g'|")?;
        }
        Ok(Self {
            label: label.into(),
            bc,
            values,
        })
    }

    pub fn from_recipe(r: &Recipe, grid: &ChebyshevGrid) -> Result<Self> {
        let jets: Vec<[C64; 5]> = grid.points().iter().map(|&y| r.jet(y)).collect();
        let values = [0, 1, 2, 3, 4].map(|k| jets.iter().map(|j| j[k]).collect());
        Self::new(r.label(), r.bc, values, grid)
    }

    fn require(&self, need: BcClass) -> Result<()> {
        if self.bc.implies(need) {
            Ok(())
        } else {
            Err(param("test_function", format!("needs {} data, got {}", need.as_str(), self.bc.as_str())))
        }
    }
}

/// `lhs ≤ rhs` with its margin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Margin {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`.
    pub margin: f64,
    /// `margin / max(lhs, rhs)`, or 0 when both vanish.
    pub relative: f64,
}

impl Margin {
    fn new(name: &'static str, lhs: f64, rhs: f64) -> Self {
        let size = lhs.abs().max(rhs.abs());
        let margin = rhs - lhs;
        Self {
            name,
            lhs,
            rhs,
            margin,
            relative: if size > 0.0 { margin / size } else { 0.0 },
        }
    }
}

/// `lhs / core`, the smallest constant that makes `lhs ≤ C · core` hold for this sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observed {
    pub name: &'static str,
    pub lhs: f64,
    pub core: f64,
    /// `None` when both sides vanish.
    pub ratio: Option<f64>,
}

impl Observed {
    fn new(name: &'static str, lhs: f64, core: f64) -> Self {
        let ratio = if core > 0.0 {
            Some(lhs / core)
        } else if lhs > 0.0 {
            Some(f64::INFINITY)
        } else {
            None
        };
        Self { name, lhs, core, ratio }
    }
}

/// Integrals used by every check.
struct Moments {
    /// `∫|g^{(k)}|²`.
    d: [f64; 5],
    /// `∫(1−y²)|g|²`, `∫(1−y²)|g'|²`, `∫(1−y²)²|g|²`.
    w0: f64,
    w1: f64,
    ww0: f64,
}

fn moments(g: &TestFunction, grid: &ChebyshevGrid) -> Result<Moments> {
    let pts = grid.points();
    let int = |f: &dyn Fn(usize) -> f64| -> Result<f64> {
        let v: Vec<f64> = (0..grid.len()).map(f).collect();
        grid.integrate_real(&v)
    };
    let mut d = [0.0; 5];
    for (k, dk) in d.iter_mut().enumerate() {
        *dk = int(&|i| g.values[k][i].norm_sqr())?;
    }
    let w = |i: usize| 1.0 - pts[i] * pts[i];
    Ok(Moments {
        d,
        w0: int(&|i| w(i) * g.values[0][i].norm_sqr())?,
        w1: int(&|i| w(i) * g.values[1][i].norm_sqr())?,
        ww0: int(&|i| w(i) * w(i) * g.values[0][i].norm_sqr())?,
    })
}

/// `∫|g|² ≤ ∫|g'|²`, `∫|g'|² ≤ (∫|g''|²)^{1/2}(∫|g|²)^{1/2}` and `∫|g'|² ≤ ∫|g''|²`.
pub fn check_poincare(g: &TestFunction, grid: &ChebyshevGrid) -> Result<[Margin; 3]> {
    g.require(BcClass::Dirichlet)?;
    let m = moments(g, grid)?;
    Ok([
        Margin::new("poincare", m.d[0], m.d[1]),
        Margin::new("poincare_interpolation", m.d[1], (m.d[2] * m.d[0]).sqrt()),
        Margin::new("poincare_second", m.d[1], m.d[2]),
    ])
}

/// Wall derivative bounds at `+1` and `−1` with the constant `(5/2)^{1/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceReport {
    pub upper: Margin,
    pub lower: Margin,
    /// `|g'(±1)| / ((∫|g'|²)^{1/4}(∫|g''|²)^{1/4})`.
    pub trace_constant: Observed,
    /// `∫|g'''|² / ((∫|g⁗|²)^{1/2}(∫|g''|²)^{1/2} + ∫|g''|²)`.
    pub third_derivative: Observed,
}

pub fn check_trace(g: &TestFunction, grid: &ChebyshevGrid) -> Result<TraceReport> {
    g.require(BcClass::Dirichlet)?;
    let m = moments(g, grid)?;
    let core = (m.d[1] * m.d[2]).sqrt().sqrt();
    let rhs = trace_constant() * core;
    let up = g.values[1][0].norm();
    let lo = g.values[1][grid.order()].norm();
    Ok(TraceReport {
        upper: Margin::new("trace_upper", up, rhs),
        lower: Margin::new("trace_lower", lo, rhs),
        trace_constant: Observed::new("trace_constant", up.max(lo), core),
        third_derivative: Observed::new("third_derivative", m.d[3], (m.d[4] * m.d[2]).sqrt() + m.d[2]),
    })
}

/// `∫|g|² ≤ (1/3)∫|g'|²(1−y²) + 92∫|g|²(1−y²)`.
pub fn check_hlp(g: &TestFunction, grid: &ChebyshevGrid) -> Result<Margin> {
    let m = moments(g, grid)?;
    Ok(Margin::new("hardy_littlewood_polya", m.d[0], HLP_DERIVATIVE * m.w1 + HLP_MASS * m.w0))
}

/// `∫|g|² ≤ C (∫(1−y²)|g|²)^{2/3}(∫|g'|²)^{1/3} + C∫(1−y²)|g|²`.
pub fn check_weighted_interp(g: &TestFunction, grid: &ChebyshevGrid) -> Result<Observed> {
    let m = moments(g, grid)?;
    Ok(Observed::new(
        "weighted_interpolation",
        m.d[0],
        m.w0.powf(2.0 / 3.0) * m.d[1].cbrt() + m.w0,
    ))
}

/// `∫|g|² ≤ C (∫|(1−y²)g|²)^{1/2}(∫|g'|²)^{1/2}` for `g(±1) = 0`.
pub fn check_interp(g: &TestFunction, grid: &ChebyshevGrid) -> Result<Observed> {
    g.require(BcClass::Dirichlet)?;
    let m = moments(g, grid)?;
    Ok(Observed::new("wall_interpolation", m.d[0], (m.ww0 * m.d[1]).sqrt()))
}

/// Every margin and observed constant for one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleReport {
    pub index: usize,
    pub label: String,
    pub margins: Vec<Margin>,
    pub observed: Vec<Observed>,
    /// Largest change of a relative margin or observed ratio when the grid order doubles.
    pub refinement_change: f64,
}

fn evaluate(recipe: &Recipe, grid: &ChebyshevGrid) -> Result<(Vec<Margin>, Vec<Observed>)> {
    let free = TestFunction::from_recipe(&recipe.with_bc(BcClass::Free), grid)?;
    let dir = TestFunction::from_recipe(&recipe.with_bc(BcClass::Dirichlet), grid)?;
    let mut margins: Vec<Margin> = check_poincare(&dir, grid)?.to_vec();
    let t = check_trace(&dir, grid)?;
    margins.extend([t.upper, t.lower, check_hlp(&free, grid)?]);
    let observed = alloc::vec![
        t.trace_constant,
        t.third_derivative,
        check_weighted_interp(&free, grid)?,
        check_interp(&dir, grid)?,
    ];
    Ok((margins, observed))
}

/// Scales the recipe so that `∫|g|² = 1` for its Dirichlet form.
fn normalized(mut r: Recipe, grid: &ChebyshevGrid) -> Result<Recipe> {
    let dir = TestFunction::from_recipe(&r.with_bc(BcClass::Dirichlet), grid)?;
    let m = moments(&dir, grid)?;
    if m.d[0] > 0.0 {
        let s = 1.0 / m.d[0].sqrt();
        for (c, _) in r.terms.iter_mut() {
            *c *= s;
        }
    }
    Ok(r)
}

pub fn check_sample(index: usize, recipe: &Recipe, grid: &ChebyshevGrid, fine: &ChebyshevGrid) -> Result<SampleReport> {
    let recipe = normalized(recipe.clone(), grid)?;
    let (margins, observed) = evaluate(&recipe, grid)?;
    let (m2, o2) = evaluate(&recipe, fine)?;
    let mut change = 0.0f64;
    for (a, b) in margins.iter().zip(&m2) {
        change = change.max((a.relative - b.relative).abs());
    }
    for (a, b) in observed.iter().zip(&o2) {
        if let (Some(x), Some(y)) = (a.ratio, b.ratio) {
            change = change.max((x - y).abs() / x.abs().max(y.abs()).max(1.0));
        }
    }
    Ok(SampleReport {
        index,
        label: recipe.label(),
        margins,
        observed,
        refinement_change: change,
    })
}

/// Random sample `index` of the suite seeded by `seed`: one to three terms with
/// complex coefficients drawn from the four basis kinds.
pub fn random_recipe(seed: u64, index: usize) -> Recipe {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let terms = rng.random_range(1..=3);
    let mut out = Vec::with_capacity(terms);
    for _ in 0..terms {
        let c = C64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0);
        let b = match rng.random_range(0..4) {
            0 => Basis::Poly(rng.random_range(0..=8)),
            1 => Basis::Trig(rng.random_range(1..=8)),
            2 => Basis::Bump {
                center: rng.random::<f64>() * 2.0 - 1.0,
                sharpness: 1.0 + 59.0 * rng.random::<f64>(),
            },
            _ => {
                let deg = rng.random_range(2..=10);
                Basis::Chebyshev(
                    (0..=deg)
                        .map(|k| {
                            let s = 1.0 / (1.0 + k as f64);
                            C64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0) * s
                        })
                        .collect(),
                )
            }
        };
        out.push((c, b));
    }
    Recipe {
        terms: out,
        bc: BcClass::Free,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub samples: usize,
    /// Coarse grid order; the refinement check uses twice this.
    pub order: usize,
    /// Sample count of the smaller suite in the stability comparison.
    pub reference_samples: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 2024,
            samples: 10_000,
            order: 128,
            reference_samples: 1_000,
        }
    }
}

/// Extremes of one named quantity over a suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginSummary {
    pub name: &'static str,
    pub worst_margin: f64,
    pub worst_relative: f64,
    pub worst_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservedSummary {
    pub name: &'static str,
    /// Supremum over the first `reference_samples`.
    pub reference: f64,
    /// Supremum over the full suite.
    pub full: f64,
    pub full_index: usize,
    pub skipped: usize,
}

impl ObservedSummary {
    /// `full / reference`.
    pub fn drift(&self) -> f64 {
        self.full / self.reference
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub samples: Vec<SampleReport>,
    pub margins: Vec<MarginSummary>,
    pub observed: Vec<ObservedSummary>,
    pub max_refinement_change: f64,
}

impl SuiteReport {
    pub fn worst_relative_margin(&self) -> f64 {
        self.margins.iter().map(|m| m.worst_relative).fold(f64::INFINITY, f64::min)
    }

    pub fn max_drift(&self) -> f64 {
        self.observed.iter().map(ObservedSummary::drift).fold(0.0, f64::max)
    }
}

pub fn run_suite<E: Executor>(cfg: &SuiteConfig, exec: &E) -> Result<SuiteReport> {
    if cfg.samples == 0 {
        return Err(param("samples", "must be positive"));
    }
    if cfg.reference_samples == 0 || cfg.reference_samples > cfg.samples {
        return Err(param("reference_samples", format!("must lie in 1..={}", cfg.samples)));
    }
    let grid = ChebyshevGrid::new(cfg.order)?;
    let fine = ChebyshevGrid::new(2 * cfg.order)?;
    let samples = exec
        .map(cfg.samples, &|i| check_sample(i, &random_recipe(cfg.seed, i), &grid, &fine))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let first = samples.first().ok_or_else(|| Error::Contract("empty suite".into()))?;
    let margins = (0..first.margins.len())
        .map(|k| {
            let mut s = MarginSummary {
                name: first.margins[k].name,
                worst_margin: f64::INFINITY,
                worst_relative: f64::INFINITY,
                worst_index: 0,
            };
            for r in &samples {
                let m = &r.margins[k];
                s.worst_margin = s.worst_margin.min(m.margin);
                if m.relative < s.worst_relative {
                    s.worst_relative = m.relative;
                    s.worst_index = r.index;
                }
            }
            s
        })
        .collect();
    let observed = (0..first.observed.len())
        .map(|k| {
            let mut s = ObservedSummary {
                name: first.observed[k].name,
                reference: 0.0,
                full: 0.0,
                full_index: 0,
                skipped: 0,
            };
            for r in &samples {
                match r.observed[k].ratio {
                    Some(v) => {
                        if v > s.full {
                            s.full = v;
                            s.full_index = r.index;
                        }
                        if r.index < cfg.reference_samples {
                            s.reference = s.reference.max(v);
                        }
                    }
                    None => s.skipped += 1,
                }
            }
            s
        })
        .collect();
    let max_refinement_change = samples.iter().map(|s| s.refinement_change).fold(0.0, f64::max);
    Ok(SuiteReport {
        config: *cfg,
        samples,
        margins,
        observed,
        max_refinement_change,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chebyshev_derivative_matches_monomials() {
        // T_3 = 4y³ − 3y, T_3' = 12y² − 3 = 3 T_0 + 6 T_2
        let c = [C64::zero(), C64::zero(), C64::zero(), C64::new(1.0, 0.0)];
        let d = chebyshev_derivative(&c);
        assert_eq!(d.len(), 3);
        assert!((d[0] - C64::new(3.0, 0.0)).norm() < 1e-14);
        assert!(d[1].norm() < 1e-14);
        assert!((d[2] - C64::new(6.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn leibniz_jet_matches_closed_form() {
        let r = Recipe::single(Basis::Poly(1), BcClass::Clamped);
        // y(1 − y²)² = y − 2y³ + y⁵
        for y in [-0.7, 0.1, 0.9] {
            let j = r.jet(y);
            let want = [
                y - 2.0 * y.powi(3) + y.powi(5),
                1.0 - 6.0 * y * y + 5.0 * y.powi(4),
                -12.0 * y + 20.0 * y.powi(3),
                -12.0 + 60.0 * y * y,
                120.0 * y,
            ];
            for k in 0..5 {
                assert!((j[k].re - want[k]).abs() < 1e-12, "k={k}");
            }
        }
    }

    #[test]
    fn bump_derivatives_match_differences() {
        let b = Basis::Bump { center: 0.2, sharpness: 7.0 };
        let h = 1e-5;
        for y in [-0.5, 0.3] {
            let j = b.jet(y);
            let (p, m) = (b.jet(y + h), b.jet(y - h));
            for k in 0..4 {
                let fd = (p[k] - m[k]) / (2.0 * h);
                assert!((fd - j[k + 1]).norm() < 1e-5 * (1.0 + j[k + 1].norm()), "k={k}");
            }
        }
    }

    #[test]
    fn rejects_false_bc_claims() {
        let g = ChebyshevGrid::new(16).unwrap();
        let r = Recipe::single(Basis::Poly(2), BcClass::Free);
        let f = TestFunction::from_recipe(&r, &g).unwrap();
        assert!(TestFunction::new("y^2", BcClass::Dirichlet, f.values.clone(), &g).is_err());
        let d = TestFunction::from_recipe(&r.with_bc(BcClass::Dirichlet), &g).unwrap();
        assert!(TestFunction::new("w", BcClass::Clamped, d.values.clone(), &g).is_err());
        assert!(check_poincare(&f, &g).is_err());
    }

    #[test]
    fn recipes_are_deterministic() {
        assert_eq!(random_recipe(5, 17), random_recipe(5, 17));
        assert_ne!(random_recipe(5, 17), random_recipe(5, 18));
    }
}
