//! Norms, a priori estimate ratios, energy-identity residuals and flux sweeps.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{check_len, param, Error, Result};
use crate::exec::Executor;
use crate::force::{ForceSpec, ModeForce};
use crate::grid::ChebyshevGrid;
use crate::linalg::{singular_values, ComplexMatrix};
use crate::mode::{
    rhs_from_force, solve_mode_clamped, solve_mode_slip, solve_zero_mode, BcKind, ModeOperator, ModeParams,
    ModeSolution, PoiseuilleProfile, Regime, RegimeConfig,
};

/// Norms of one mode or of a whole field. Velocity norms are over `Ω = (0, 2πL) × (−1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NormSet {
    pub l2: f64,
    pub h1: f64,
    pub h2: f64,
    /// `h1^{1/3} h2^{2/3}`.
    pub h53: f64,
    /// `‖ψ‖_{H_n^4(I)}`.
    pub hn4: f64,
}

impl NormSet {
    fn from_squares(l2: f64, h1: f64, h2: f64, hn4: f64) -> Self {
        let (l2, h1, h2, hn4) = (l2.sqrt(), h1.sqrt(), h2.sqrt(), hn4.sqrt());
        Self {
            l2,
            h1,
            h2,
            h53: h1.cbrt() * h2.powf(2.0 / 3.0),
            hn4,
        }
    }

    /// Norms of a sum of distinct Fourier modes.
    pub fn combine<'a>(parts: impl IntoIterator<Item = &'a NormSet>) -> Self {
        let (mut a, mut b, mut c, mut d) = (0.0, 0.0, 0.0, 0.0);
        for p in parts {
            a += p.l2 * p.l2;
            b += p.h1 * p.h1;
            c += p.h2 * p.h2;
            d += p.hn4 * p.hn4;
        }
        Self::from_squares(a, b, c, d)
    }
}

fn integrate_by(grid: &ChebyshevGrid, f: impl Fn(usize) -> f64) -> Result<f64> {
    let v: Vec<f64> = (0..grid.len()).map(f).collect();
    grid.integrate_real(&v)
}

pub fn mode_norms(sol: &ModeSolution, grid: &ChebyshevGrid) -> Result<NormSet> {
    check_len(grid.len(), sol.psi.len())?;
    let nh2 = sol.params.n_hat().powi(2);
    let p = &sol.psi;
    let [d1, d2, d3, d4] = &sol.derivs;
    let sq = |v: &[C64], k: usize| v[k].norm_sqr();
    // |v|², |∂_y v|², |∂_y² v|² with v = (−ψ', i n̂ ψ)
    let v0 = integrate_by(grid, |k| sq(d1, k) + nh2 * sq(p, k))?;
    let v1 = integrate_by(grid, |k| sq(d2, k) + nh2 * sq(d1, k))?;
    let v2 = integrate_by(grid, |k| sq(d3, k) + nh2 * sq(d2, k))?;
    let hn4 = integrate_by(grid, |k| {
        sq(d2, k) + nh2 * nh2 * sq(p, k) + sq(d4, k) + nh2 * nh2 * sq(d2, k) + nh2.powi(4) * sq(p, k)
    })?;
    let area = 2.0 * PI * sol.params.l();
    Ok(NormSet::from_squares(
        area * v0,
        area * ((1.0 + nh2) * v0 + v1),
        area * ((1.0 + nh2 + nh2 * nh2) * v0 + (1.0 + nh2) * v1 + v2),
        hn4,
    ))
}

/// One estimate: `lhs ≤ C · rhs_core`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateEntry {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs_core: f64,
    /// `None` when `rhs_core = 0`.
    pub ratio: Option<f64>,
}

impl EstimateEntry {
    fn new(name: &'static str, lhs: f64, rhs_core: f64) -> Self {
        let ratio = if rhs_core > 0.0 { Some(lhs / rhs_core) } else { None };
        Self {
            name,
            lhs,
            rhs_core,
            ratio,
        }
    }
}

/// Relative residuals of the real and imaginary energy identities.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IdentityResiduals {
    pub real: f64,
    pub imag: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        self.real.max(self.imag)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub params: ModeParams,
    pub regime: Regime,
    pub norms: NormSet,
    /// `‖F_n‖_{L²(Ω)}`.
    pub force_norm: f64,
    pub entries: Vec<EstimateEntry>,
    pub identities: IdentityResiduals,
    /// σ_min of the discrete operator in the quadrature `L²` norm; `None` for `n = 0`.
    pub sigma_min: Option<f64>,
}

impl EstimateReport {
    pub fn entry(&self, name: &str) -> Option<&EstimateEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// `‖v‖_{H^{5/3}} / ‖F‖_{L²}`.
    pub fn h53_ratio(&self) -> Option<f64> {
        self.entry("velocity_h53").and_then(|e| e.ratio)
    }

    /// `‖v‖_{H²} / ‖F‖_{L²}`.
    pub fn h2_ratio(&self) -> Option<f64> {
        if self.force_norm > 0.0 {
            Some(self.norms.h2 / self.force_norm)
        } else {
            None
        }
    }
}

/// Both energy identities for a solution of `L ψ = f` with `ψ(±1) = 0` and either boundary condition.
pub fn energy_identities(sol: &ModeSolution, f: &[C64], grid: &ChebyshevGrid) -> Result<IdentityResiduals> {
    check_len(grid.len(), f.len())?;
    let nh = sol.params.n_hat();
    let nh2 = nh * nh;
    let phi = sol.params.phi();
    let prof = PoiseuilleProfile::new(phi, grid);
    let p = &sol.psi;
    let [d1, d2, ..] = &sol.derivs;
    let pts = grid.points();
    let fpsi = grid.integrate(&f.iter().zip(p).map(|(a, b)| a * b.conj()).collect::<Vec<_>>())?;
    let shear = grid.integrate(&(0..grid.len()).map(|k| d1[k] * p[k].conj() * (nh * prof.du[k])).collect::<Vec<_>>())?;
    let a = integrate_by(grid, |k| nh2 * nh2 * p[k].norm_sqr() + 2.0 * nh2 * d1[k].norm_sqr() + d2[k].norm_sqr())?;
    let real = relative(&[a, fpsi.re, -shear.im]);
    let c = 0.75 * phi * nh;
    let weighted = c * integrate_by(grid, |k| (nh2 * p[k].norm_sqr() + d1[k].norm_sqr()) * (1.0 - pts[k] * pts[k]))?;
    let mass = c * integrate_by(grid, |k| p[k].norm_sqr())?;
    let imag = relative(&[weighted, fpsi.im, -mass]);
    Ok(IdentityResiduals { real, imag })
}

// |Σ t| / Σ |t|
fn relative(terms: &[f64]) -> f64 {
    let size: f64 = terms.iter().map(|t| t.abs()).sum();
    if size == 0.0 {
        0.0
    } else {
        terms.iter().sum::<f64>().abs() / size
    }
}

/// Smallest singular value of the discrete clamped operator `ψ ↦ Lψ`, measured in the
/// quadrature `L²` norm as the reciprocal of the largest singular value of its inverse.
pub fn operator_sigma_min(params: &ModeParams, grid: &ChebyshevGrid) -> Result<f64> {
    let op = ModeOperator::new(*params, grid, BcKind::Clamped)?;
    let n = grid.len();
    let w: Vec<f64> = grid.weights().to_vec();
    let mut s = ComplexMatrix::zeros(n, n);
    let mut e = alloc::vec![C64::new(0.0, 0.0); n];
    for j in 0..n {
        e[j] = C64::new(1.0, 0.0);
        let psi = op.solve(&e, grid)?.psi;
        e[j] = C64::new(0.0, 0.0);
        for i in 0..n {
            s[(i, j)] = psi[i] * (w[i] / w[j]).sqrt();
        }
    }
    let sv = singular_values(&s)?;
    let top = sv.first().copied().unwrap_or(0.0);
    if !(top > 0.0) || !top.is_finite() {
        return Err(Error::Solver {
            reason: "solution operator has no finite positive norm".to_string(),
            residual: top,
        });
    }
    Ok(1.0 / top)
}

/// Solves one mode with the matching boundary-value problem.
pub fn solve_forced(params: &ModeParams, force: &ModeForce, grid: &ChebyshevGrid) -> Result<(ModeSolution, Vec<C64>)> {
    let f = rhs_from_force(&force.f1, &force.f2, params, grid)?;
    let sol = if params.n() == 0 {
        solve_zero_mode(&force.f1, params, grid)?
    } else {
        solve_mode_clamped(params, &f, grid)?
    };
    Ok((sol, f))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    pub regime: RegimeConfig,
    pub sigma_min: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            regime: RegimeConfig::default(),
            sigma_min: true,
        }
    }
}

pub fn estimate_report(
    sol: &ModeSolution,
    force: &ModeForce,
    grid: &ChebyshevGrid,
    opts: &ReportOptions,
) -> Result<EstimateReport> {
    let params = sol.params;
    let f = rhs_from_force(&force.f1, &force.f2, &params, grid)?;
    let nh = params.n_hat();
    let nh2 = nh * nh;
    let anh = nh.abs();
    let phi = params.phi();
    let pn = phi * anh;
    let regime = params.regime(&opts.regime);
    let norms = mode_norms(sol, grid)?;
    let area = 2.0 * PI * params.l();
    let f_sq = integrate_by(grid, |k| f[k].norm_sqr())?;
    let force_sq = force.l2_sq(grid)?;
    let force_norm = (area * force_sq).sqrt();
    let p = &sol.psi;
    let [d1, d2, d3, d4] = &sol.derivs;
    let sq = |v: &[C64], k: usize| v[k].norm_sqr();
    let pts = grid.points();

    let mut entries = Vec::new();
    entries.push(EstimateEntry::new(
        "energy_h2",
        integrate_by(grid, |k| sq(d2, k) + nh2 * sq(d1, k) + nh2 * nh2 * sq(p, k))?,
        f_sq,
    ));
    entries.push(EstimateEntry::new(
        "energy_weighted",
        integrate_by(grid, |k| nh2 * nh2 * sq(d2, k) + nh2.powi(3) * sq(d1, k) + nh2.powi(4) * sq(p, k))?,
        (1.0 + phi) * f_sq,
    ));
    entries.push(EstimateEntry::new(
        "fourth_derivative",
        integrate_by(grid, |k| sq(d4, k))?,
        (1.0 + phi * phi) * f_sq,
    ));
    match regime {
        Regime::Zero => {
            let f10 = integrate_by(grid, |k| force.f1[k].norm_sqr())?;
            entries.push(EstimateEntry::new("zero_mode_h2", norms.h2, (area * f10).sqrt()));
        }
        Regime::SmallFlux => {
            entries.push(EstimateEntry::new("small_flux_h2", norms.h2, (1.0 + phi * phi) * force_norm));
        }
        Regime::Medium => {
            entries.push(EstimateEntry::new(
                "medium_h1",
                integrate_by(grid, |k| sq(d1, k) + nh2 * sq(p, k))?,
                pn.powf(-4.0 / 3.0) * force_sq,
            ));
            entries.push(EstimateEntry::new(
                "medium_h3",
                integrate_by(grid, |k| sq(d3, k) + nh2 * sq(d2, k) + nh2 * nh2 * sq(d1, k) + nh2.powi(3) * sq(p, k))?,
                force_sq,
            ));
            entries.push(EstimateEntry::new("medium_velocity_l2", norms.l2, pn.powf(-2.0 / 3.0) * force_norm));
            entries.push(EstimateEntry::new("medium_velocity_h2", norms.h2, force_norm));
            let slip = solve_mode_slip(&params, &f, grid)?;
            let bv = slip.boundary_values(grid);
            entries.push(EstimateEntry::new(
                "slip_wall_derivative",
                bv[2].norm().max(bv[3].norm()),
                pn.powf(-0.5) * force_sq.sqrt(),
            ));
        }
        Regime::High => {
            entries.push(EstimateEntry::new(
                "high_frequency_energy",
                integrate_by(grid, |k| {
                    let w = 1.0 - pts[k] * pts[k];
                    pn * w * sq(d1, k) + pn * nh2 * w * sq(p, k) + sq(d2, k) + nh2 * sq(d1, k) + nh2 * nh2 * sq(p, k)
                })?,
                force_sq / nh2,
            ));
            entries.push(EstimateEntry::new("high_frequency_l2", norms.l2, force_norm / phi.max(f64::MIN_POSITIVE)));
            entries.push(EstimateEntry::new("high_frequency_h2", norms.h2, (1.0 + phi.powf(0.25)) * force_norm));
        }
    }
    entries.push(EstimateEntry::new("velocity_h53", norms.h53, force_norm));
    entries.push(EstimateEntry::new("velocity_h2", norms.h2, (1.0 + phi.powf(0.25)) * force_norm));

    let identities = energy_identities(sol, &f, grid)?;
    let sigma_min = if opts.sigma_min && params.n() != 0 {
        Some(operator_sigma_min(&params, grid)?)
    } else {
        None
    };
    Ok(EstimateReport {
        params,
        regime,
        norms,
        force_norm,
        entries,
        identities,
        sigma_min,
    })
}

/// Grid order for a sweep cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridPolicy {
    /// `M = max(64, ⌈6β⌉)`.
    Auto,
    Fixed(usize),
}

impl GridPolicy {
    pub fn order(&self, params: &ModeParams) -> usize {
        match self {
            GridPolicy::Auto => params.resolved_order(),
            GridPolicy::Fixed(m) => *m,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub phi: Vec<f64>,
    pub n: Vec<i64>,
    pub l: f64,
    pub force: ForceSpec,
    pub grid: GridPolicy,
    pub options: ReportOptions,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.phi.is_empty() {
            return Err(param("phi", "sweep needs at least one flux"));
        }
        if self.n.is_empty() {
            return Err(param("n", "sweep needs at least one mode"));
        }
        for &phi in &self.phi {
            ModeParams::new(1, self.l, phi)?;
        }
        Ok(())
    }

    /// Cells in row-major `(Φ, n)` order.
    pub fn cells(&self) -> Result<Vec<ModeParams>> {
        self.validate()?;
        let mut out = Vec::with_capacity(self.phi.len() * self.n.len());
        for &phi in &self.phi {
            for &n in &self.n {
                out.push(ModeParams::new(n, self.l, phi)?);
            }
        }
        Ok(out)
    }

    /// Distinct grid orders needed by the cells.
    pub fn orders(&self) -> Result<Vec<usize>> {
        let mut v: Vec<usize> = self.cells()?.iter().map(|c| self.grid.order(c)).collect();
        v.sort_unstable();
        v.dedup();
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub params: ModeParams,
    pub order: usize,
    pub outcome: core::result::Result<EstimateReport, String>,
}

pub fn sweep_cell(spec: &SweepSpec, params: ModeParams, grid: &ChebyshevGrid) -> SweepCell {
    let run = || -> Result<EstimateReport> {
        let force = spec.force.sample(params.n(), grid);
        let (sol, _) = solve_forced(&params, &force, grid)?;
        estimate_report(&sol, &force, grid, &spec.options)
    };
    SweepCell {
        params,
        order: grid.order(),
        outcome: run().map_err(|e| e.to_string()),
    }
}

/// Least-squares slope of `log y` against `log x`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub points: usize,
}

pub fn fit_loglog(points: &[(f64, f64)]) -> Option<SlopeFit> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(SlopeFit {
        slope: sxy / sxx,
        points: pts.len(),
    })
}

/// Common slope over groups with separate intercepts.
pub fn fit_loglog_grouped(groups: &[Vec<(f64, f64)>]) -> Option<SlopeFit> {
    let (mut sxx, mut sxy, mut count) = (0.0, 0.0, 0usize);
    for g in groups {
        let pts: Vec<(f64, f64)> = g
            .iter()
            .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
            .map(|(x, y)| (x.ln(), y.ln()))
            .collect();
        if pts.len() < 2 {
            continue;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        sxx += pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<f64>();
        sxy += pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>();
        count += pts.len();
    }
    if sxx == 0.0 {
        return None;
    }
    Some(SlopeFit {
        slope: sxy / sxx,
        points: count,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSlopes {
    pub n: i64,
    pub h53: Option<SlopeFit>,
    pub h2: Option<SlopeFit>,
    /// Normalized σ_min at the smallest and the largest flux of this mode.
    pub sigma_ends: Option<(f64, f64)>,
}

impl ModeSlopes {
    /// Larger of the two end values over the smaller.
    pub fn sigma_ratio(&self) -> Option<f64> {
        self.sigma_ends.map(|(a, b)| a.max(b) / a.min(b))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub per_mode: Vec<ModeSlopes>,
    /// Common-slope fits across modes.
    pub h53: Option<SlopeFit>,
    pub h2: Option<SlopeFit>,
    pub failed: usize,
    /// Largest `max |identity residual|` over accepted cells.
    pub worst_identity: f64,
    pub sigma_min_positive: bool,
}

type Points = Vec<(f64, f64)>;

/// Fits use only cells with `Φ ≥ Φ₀`.
pub fn summarize(spec: &SweepSpec, cells: &[SweepCell]) -> SweepSummary {
    let phi0 = spec.options.regime.phi0;
    let mut by_mode: BTreeMap<i64, (Points, Points)> = BTreeMap::new();
    let mut sigma: BTreeMap<i64, Vec<(f64, f64)>> = BTreeMap::new();
    let mut failed = 0;
    let mut worst = 0.0f64;
    let mut positive = true;
    for c in cells {
        match &c.outcome {
            Ok(r) => {
                worst = worst.max(r.identities.max());
                if let Some(s) = r.sigma_min {
                    positive &= s > 0.0;
                    if c.params.phi() > 0.0 {
                        let v = s * spectrum_normalization(&c.params);
                        sigma.entry(c.params.n()).or_default().push((c.params.phi(), v));
                    }
                }
                if c.params.phi() >= phi0 {
                    let e = by_mode.entry(c.params.n()).or_default();
                    if let Some(v) = r.h53_ratio() {
                        e.0.push((c.params.phi(), v));
                    }
                    if let Some(v) = r.h2_ratio() {
                        e.1.push((c.params.phi(), v));
                    }
                }
            }
            Err(_) => failed += 1,
        }
    }
    let per_mode = by_mode
        .iter()
        .map(|(&n, (a, b))| ModeSlopes {
            n,
            h53: fit_loglog(a),
            h2: fit_loglog(b),
            sigma_ends: sigma.get(&n).and_then(|v| {
                let lo = v.iter().min_by(|x, y| x.0.total_cmp(&y.0))?;
                let hi = v.iter().max_by(|x, y| x.0.total_cmp(&y.0))?;
                Some((lo.1, hi.1))
            }),
        })
        .collect();
    let h53 = fit_loglog_grouped(&by_mode.values().map(|v| v.0.clone()).collect::<Vec<_>>());
    let h2 = fit_loglog_grouped(&by_mode.values().map(|v| v.1.clone()).collect::<Vec<_>>());
    SweepSummary {
        per_mode,
        h53,
        h2,
        failed,
        worst_identity: worst,
        sigma_min_positive: positive,
    }
}

/// Runs every cell; grids are shared between cells of equal order.
pub fn sweep<E: Executor>(spec: &SweepSpec, exec: &E) -> Result<(Vec<SweepCell>, SweepSummary)> {
    let orders = spec.orders()?;
    let built = exec.map(orders.len(), &|k| ChebyshevGrid::new(orders[k]));
    let mut grids: BTreeMap<usize, ChebyshevGrid> = BTreeMap::new();
    for (m, g) in orders.iter().zip(built) {
        grids.insert(*m, g?);
    }
    let params = spec.cells()?;
    let cells = exec.map(params.len(), &|k| {
        let p = params[k];
        sweep_cell(spec, p, &grids[&spec.grid.order(&p)])
    });
    let summary = summarize(spec, &cells);
    Ok((cells, summary))
}

/// `1/|Φn̂|`, the scale of the mass term in `|Φn̂|²∫|ψ|² ≤ C∫|f|²`.
pub fn spectrum_normalization(params: &ModeParams) -> f64 {
    1.0 / (params.phi() * params.n_hat()).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_solution_has_zero_norms() {
        let g = ChebyshevGrid::new(16).unwrap();
        let p = ModeParams::new(2, 1.0, 5.0).unwrap();
        let n = mode_norms(&ModeSolution::zero(p, &g), &g).unwrap();
        assert_eq!(n, NormSet::default());
    }

    #[test]
    fn loglog_slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [1.0, 10.0, 100.0].iter().map(|&x: &f64| (x, 3.0 * x.powf(0.25))).collect();
        let s = fit_loglog(&pts).unwrap();
        assert!((s.slope - 0.25).abs() < 1e-12);
        let g = fit_loglog_grouped(&[pts.clone(), pts.iter().map(|(x, y)| (*x, 5.0 * y)).collect()]).unwrap();
        assert!((g.slope - 0.25).abs() < 1e-12);
        assert!(fit_loglog(&pts[..1]).is_none());
    }
}
