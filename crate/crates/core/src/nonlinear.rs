//! Picard iteration for the steady perturbation problem around Poiseuille flow,
//! with the zero-mode projection, mode convolutions and the contraction probe.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{check_len, param, Error, Result};
use crate::estimates::{mode_norms, NormSet};
use crate::exec::Executor;
use crate::force::{ForceSpec, ModeForce};
use crate::grid::ChebyshevGrid;
use crate::mode::{rhs_from_force, solve_zero_mode, BcKind, ModeOperator, ModeParams, ModeSolution, PoiseuilleProfile};

/// Default mode cutoff `N`.
pub const DEFAULT_CUTOFF: usize = 32;

/// Consecutive growing differences that count as divergence.
pub const DIVERGENCE_RUN: usize = 3;

/// Values indexed by Fourier mode `n ∈ [−N, N]` for a period `2πL`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierField<T> {
    cutoff: usize,
    l: f64,
    modes: Vec<T>,
}

pub type ScalarField = FourierField<Vec<C64>>;
pub type ForceField = FourierField<ModeForce>;
pub type VelocityField = FourierField<ModeSolution>;

impl<T> FourierField<T> {
    pub fn from_fn(cutoff: usize, l: f64, mut f: impl FnMut(i64) -> T) -> Result<Self> {
        if !(l > 0.0) || !l.is_finite() {
            return Err(param("L", format!("must be positive and finite, got {l}")));
        }
        let c = cutoff as i64;
        Ok(Self {
            cutoff,
            l,
            modes: (-c..=c).map(&mut f).collect(),
        })
    }

    pub fn try_from_fn(cutoff: usize, l: f64, mut f: impl FnMut(i64) -> Result<T>) -> Result<Self> {
        let field = FourierField::from_fn(cutoff, l, |n| n)?;
        let modes = field.modes.into_iter().map(&mut f).collect::<Result<Vec<T>>>()?;
        Ok(Self { cutoff, l, modes })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn indices(&self) -> core::ops::RangeInclusive<i64> {
        -(self.cutoff as i64)..=self.cutoff as i64
    }

    pub fn get(&self, n: i64) -> Option<&T> {
        let k = n + self.cutoff as i64;
        if k < 0 {
            return None;
        }
        self.modes.get(k as usize)
    }

    /// # Panics
    /// If `|n| > N`.
    pub fn mode(&self, n: i64) -> &T {
        self.get(n).expect("mode index outside the cutoff")
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &T)> {
        self.indices().zip(&self.modes)
    }

    pub fn map<U>(&self, mut f: impl FnMut(i64, &T) -> U) -> FourierField<U> {
        FourierField {
            cutoff: self.cutoff,
            l: self.l,
            modes: self.iter().map(|(n, v)| f(n, v)).collect(),
        }
    }

    pub fn try_map<U>(&self, mut f: impl FnMut(i64, &T) -> Result<U>) -> Result<FourierField<U>> {
        Ok(FourierField {
            cutoff: self.cutoff,
            l: self.l,
            modes: self.iter().map(|(n, v)| f(n, v)).collect::<Result<Vec<U>>>()?,
        })
    }

    fn check_compatible<U>(&self, other: &FourierField<U>) -> Result<()> {
        if self.cutoff != other.cutoff {
            return Err(param(
                "cutoff",
                format!("fields have different cutoffs {} and {}", self.cutoff, other.cutoff),
            ));
        }
        if self.l != other.l {
            return Err(param("L", format!("fields have different periods {} and {}", self.l, other.l)));
        }
        Ok(())
    }
}

/// Mode values that have a zero of the same shape.
pub trait ModeValue: Clone {
    fn zeroed(&self) -> Self;
}

impl ModeValue for Vec<C64> {
    fn zeroed(&self) -> Self {
        alloc::vec![C64::zero(); self.len()]
    }
}

impl ModeValue for ModeForce {
    fn zeroed(&self) -> Self {
        Self {
            f1: self.f1.zeroed(),
            f2: self.f2.zeroed(),
        }
    }
}

impl ModeValue for ModeSolution {
    fn zeroed(&self) -> Self {
        let z = self.psi.zeroed();
        ModeSolution::from_derivatives(self.params, self.bc, z.clone(), [z.clone(), z.clone(), z.clone(), z])
    }
}

/// `Q`: drops the `n = 0` mode.
pub fn project_q<T: ModeValue>(field: &FourierField<T>) -> FourierField<T> {
    field.map(|n, v| if n == 0 { v.zeroed() } else { v.clone() })
}

/// Truncated convolution `(ab)_n = Σ_{|m|≤N, |n−m|≤N} a_{n−m} b_m`, pointwise in `y`.
///
/// The sum runs over exactly the retained pairs, which is what a transform
/// product on the padded cutoff `⌈3N/2⌉` returns after truncation.
pub fn convolve_modes(a: &ScalarField, b: &ScalarField) -> Result<ScalarField> {
    a.check_compatible(b)?;
    let len = a.modes.first().map_or(0, Vec::len);
    for v in a.modes.iter().chain(&b.modes) {
        check_len(len, v.len())?;
    }
    let c = a.cutoff as i64;
    let active = |f: &ScalarField| -> Vec<bool> { f.modes.iter().map(|v| v.iter().any(|z| !z.is_zero())).collect() };
    let (act_a, act_b) = (active(a), active(b));
    Ok(a.map(|n, _| {
        let mut out = alloc::vec![C64::zero(); len];
        let lo = (n - c).max(-c);
        let hi = (n + c).min(c);
        for m in lo..=hi {
            let (ia, ib) = ((n - m + c) as usize, (m + c) as usize);
            if !act_a[ia] || !act_b[ib] {
                continue;
            }
            for ((o, x), y) in out.iter_mut().zip(&a.modes[ia]).zip(&b.modes[ib]) {
                *o += x * y;
            }
        }
        out
    }))
}

fn component(v: &VelocityField, pick: impl Fn(&ModeSolution) -> &Vec<C64>) -> ScalarField {
    v.map(|_, s| pick(s).clone())
}

/// `F₁ = Σ v_{2,n−m} ω_m`, `F₂ = −Σ v_{1,n−m} ω_m`.
pub fn nonlinear_rhs(v: &VelocityField) -> Result<ForceField> {
    let omega = component(v, |s| &s.omega);
    let f1 = convolve_modes(&component(v, |s| &s.v2), &omega)?;
    let f2 = convolve_modes(&component(v, |s| &s.v1), &omega)?;
    Ok(f1.map(|n, a| ModeForce {
        f1: a.clone(),
        f2: f2.mode(n).iter().map(|z| -z).collect(),
    }))
}

/// Force field with `spec` on the modes `0 < |n| ≤ active` (and `n = 0` when `with_mean`).
pub fn sample_force_field(
    spec: &ForceSpec,
    cutoff: usize,
    l: f64,
    active: usize,
    with_mean: bool,
    grid: &ChebyshevGrid,
) -> Result<ForceField> {
    FourierField::from_fn(cutoff, l, |n| {
        let on = n.unsigned_abs() as usize <= active && (n != 0 || with_mean);
        if on {
            spec.sample(n, grid)
        } else {
            ModeForce::zero(grid)
        }
    })
}

/// `‖F‖_{L²(Ω)}`.
pub fn force_l2(force: &ForceField, grid: &ChebyshevGrid) -> Result<f64> {
    let mut s = 0.0;
    for (_, f) in force.iter() {
        s += f.l2_sq(grid)?;
    }
    Ok((2.0 * PI * force.l * s).sqrt())
}

pub fn scale_force(force: &ForceField, s: f64) -> ForceField {
    force.map(|_, f| f.scale(s))
}

fn sum_forces(a: &ForceField, b: &ForceField) -> Result<ForceField> {
    a.check_compatible(b)?;
    Ok(a.map(|n, x| {
        let y = b.mode(n);
        ModeForce {
            f1: x.f1.iter().zip(&y.f1).map(|(p, q)| p + q).collect(),
            f2: x.f2.iter().zip(&y.f2).map(|(p, q)| p + q).collect(),
        }
    }))
}

/// Largest `|g_{−n} − conj(g_n)|` relative to the largest `|g_n|`.
pub fn reality_defect(field: &ScalarField) -> f64 {
    let mut worst = 0.0f64;
    let mut size = 0.0f64;
    for (n, v) in field.iter() {
        let w = field.mode(-n);
        for (a, b) in v.iter().zip(w) {
            size = size.max(a.norm());
            worst = worst.max((a - b.conj()).norm());
        }
    }
    if size > 0.0 {
        worst / size
    } else {
        0.0
    }
}

fn force_reality(f: &ForceField) -> f64 {
    reality_defect(&f.map(|_, m| m.f1.clone())).max(reality_defect(&f.map(|_, m| m.f2.clone())))
}

/// `a·x + b·y` with all derivatives.
fn lin(a: f64, x: &ModeSolution, b: f64, y: &ModeSolution) -> ModeSolution {
    let c = |p: &[C64], q: &[C64]| -> Vec<C64> { p.iter().zip(q).map(|(u, v)| u * a + v * b).collect() };
    let derivs = [0, 1, 2, 3].map(|k| c(&x.derivs[k], &y.derivs[k]));
    ModeSolution::from_derivatives(x.params, x.bc, c(&x.psi, &y.psi), derivs)
}

fn field_lin(a: f64, x: &VelocityField, b: f64, y: &VelocityField) -> Result<VelocityField> {
    x.check_compatible(y)?;
    Ok(x.map(|n, s| lin(a, s, b, y.mode(n))))
}

/// Per-mode norms of the whole field and of its parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldNorms {
    pub zero: NormSet,
    pub q: NormSet,
    pub all: NormSet,
}

impl FieldNorms {
    /// `(‖v₀‖²_{H²} + ‖Qv‖²_{H^{5/3}})^{1/2}`.
    pub fn composite(&self) -> f64 {
        self.zero.h2.hypot(self.q.h53)
    }
}

pub fn field_norms(v: &VelocityField, grid: &ChebyshevGrid) -> Result<FieldNorms> {
    let per: Vec<(i64, NormSet)> = v
        .iter()
        .map(|(n, s)| mode_norms(s, grid).map(|m| (n, m)))
        .collect::<Result<_>>()?;
    let zero = per.iter().find(|(n, _)| *n == 0).map(|p| p.1).unwrap_or_default();
    let q = NormSet::combine(per.iter().filter(|(n, _)| *n != 0).map(|p| &p.1));
    let all = NormSet::combine(per.iter().map(|p| &p.1));
    Ok(FieldNorms { zero, q, all })
}

/// `‖v₂‖_{H¹(Ω)}` with `v₂ = i n̂ ψ`.
pub fn v2_h1(v: &VelocityField, grid: &ChebyshevGrid) -> Result<f64> {
    let mut s = 0.0;
    for (_, m) in v.iter() {
        let nh2 = m.params.n_hat().powi(2);
        let vals: Vec<f64> = m
            .psi
            .iter()
            .zip(&m.derivs[0])
            .map(|(p, d)| nh2 * ((1.0 + nh2) * p.norm_sqr() + d.norm_sqr()))
            .collect();
        s += grid.integrate_real(&vals)?;
    }
    Ok((2.0 * PI * v.l * s).sqrt())
}

/// `∫ v_{1,0} dy`.
pub fn mean_flux(v: &VelocityField, grid: &ChebyshevGrid) -> Result<f64> {
    Ok(grid.integrate(&v.mode(0).v1)?.norm())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardConfig {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self {
            max_iter: 100,
            tol: 1e-10,
        }
    }
}

impl PicardConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(param("tol", format!("must be positive and finite, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(param("max_iter", "must be at least 1"));
        }
        Ok(())
    }
}

/// Diagnostics of one iterate `v^j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub j: usize,
    pub v0_h2: f64,
    pub qv_h53: f64,
    pub qv_l2: f64,
    pub composite: f64,
    /// Composite norm of `v^j − v^{j−1}`; `None` for the starting field.
    pub difference: Option<f64>,
    pub residual: f64,
    pub flux: f64,
    pub reality: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationState {
    pub j: usize,
    pub field: VelocityField,
    pub history: Vec<IterationRecord>,
    pub residual: f64,
    pub converged: bool,
    /// Residual rose by more than `tol` after the third iterate.
    pub residual_rising: bool,
}

impl IterationState {
    pub fn norms(&self) -> &IterationRecord {
        self.history.last().expect("history holds the starting field")
    }
}

/// Factored mode operators for one `(L, Φ, N)` on a shared grid.
#[derive(Debug)]
pub struct PicardSolver<'g> {
    base: ModeParams,
    cutoff: usize,
    grid: &'g ChebyshevGrid,
    operators: Vec<Option<ModeOperator>>,
}

/// Grid order resolving every retained mode.
pub fn picard_order(l: f64, phi: f64, cutoff: usize) -> Result<usize> {
    Ok(ModeParams::new(cutoff.max(1) as i64, l, phi)?.resolved_order())
}

impl<'g> PicardSolver<'g> {
    pub fn new<E: Executor>(l: f64, phi: f64, cutoff: usize, grid: &'g ChebyshevGrid, exec: &E) -> Result<Self> {
        let base = ModeParams::new(0, l, phi)?;
        let c = cutoff as i64;
        let ops = exec.map(2 * cutoff + 1, &|k| {
            let n = k as i64 - c;
            if n == 0 {
                Ok(None)
            } else {
                ModeOperator::new(base.with_n(n), grid, BcKind::Clamped).map(Some)
            }
        });
        Ok(Self {
            base,
            cutoff,
            grid,
            operators: ops.into_iter().collect::<Result<_>>()?,
        })
    }

    pub fn params(&self, n: i64) -> ModeParams {
        self.base.with_n(n)
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn l(&self) -> f64 {
        self.base.l()
    }

    pub fn grid(&self) -> &ChebyshevGrid {
        self.grid
    }

    fn check(&self, f: &ForceField) -> Result<()> {
        if f.cutoff != self.cutoff {
            return Err(param("cutoff", format!("force has cutoff {}, solver has {}", f.cutoff, self.cutoff)));
        }
        if f.l != self.base.l() {
            return Err(param("L", format!("force has period {}, solver has {}", f.l, self.base.l())));
        }
        for (_, m) in f.iter() {
            check_len(self.grid.len(), m.f1.len())?;
            check_len(self.grid.len(), m.f2.len())?;
        }
        Ok(())
    }

    /// The linear solution operator `T` applied mode by mode.
    pub fn solve_linear<E: Executor>(&self, f: &ForceField, exec: &E) -> Result<VelocityField> {
        self.check(f)?;
        let c = self.cutoff as i64;
        let grid = self.grid;
        let sols = exec.map(f.modes.len(), &|k| {
            let n = k as i64 - c;
            let force = &f.modes[k];
            match &self.operators[k] {
                None => solve_zero_mode(&force.f1, &self.base, grid),
                Some(op) => op.solve(&rhs_from_force(&force.f1, &force.f2, op.params(), grid)?, grid),
            }
            .map_err(|e| match e {
                Error::Solver { reason, residual } => Error::Solver {
                    reason: format!("mode {n}: {reason}"),
                    residual,
                },
                other => other,
            })
        });
        Ok(FourierField {
            cutoff: self.cutoff,
            l: f.l,
            modes: sols.into_iter().collect::<Result<_>>()?,
        })
    }

    /// `(Σ_n 2πL ∫ |L_n ψ_n − f_n(F + N(v))|² dy)^{1/2}`, with the operator applied to the
    /// stored derivatives and the transport term recomputed from `v`.
    pub fn residual(&self, v: &VelocityField, f: &ForceField) -> Result<f64> {
        self.residual_with(v, &sum_forces(f, &nonlinear_rhs(v)?)?)
    }

    fn residual_with(&self, v: &VelocityField, total: &ForceField) -> Result<f64> {
        let grid = self.grid;
        let prof = PoiseuilleProfile::new(self.base.phi(), grid);
        let i = C64::new(0.0, 1.0);
        let mut s = 0.0;
        for (n, sol) in v.iter() {
            let p = self.params(n);
            let nh = p.n_hat();
            let nh2 = nh * nh;
            let force = total.mode(n);
            let f = rhs_from_force(&force.f1, &force.f2, &p, grid)?;
            let [_, d2, _, d4] = &sol.derivs;
            let r: Vec<f64> = (0..grid.len())
                .map(|k| {
                    let psi = sol.psi[k];
                    let lap = d2[k] - psi * nh2;
                    let bilap = d4[k] - d2[k] * (2.0 * nh2) + psi * (nh2 * nh2);
                    let lhs = i * nh * (lap * prof.u[k] - psi * prof.ddu[k]) - bilap;
                    (lhs - f[k]).norm_sqr()
                })
                .collect();
            s += grid.integrate_real(&r)?;
        }
        Ok((2.0 * PI * self.base.l() * s).sqrt())
    }

    fn record(
        &self,
        j: usize,
        v: &VelocityField,
        prev: Option<&VelocityField>,
        f: &ForceField,
    ) -> Result<(IterationRecord, ForceField)> {
        let grid = self.grid;
        let norms = field_norms(v, grid)?;
        let difference = match prev {
            Some(p) => Some(field_norms(&field_lin(1.0, v, -1.0, p)?, grid)?.composite()),
            None => None,
        };
        let total = sum_forces(f, &nonlinear_rhs(v)?)?;
        let residual = self.residual_with(v, &total)?;
        let rec = IterationRecord {
            j,
            v0_h2: norms.zero.h2,
            qv_h53: norms.q.h53,
            qv_l2: norms.q.l2,
            composite: norms.composite(),
            difference,
            residual,
            flux: mean_flux(v, grid)?,
            reality: reality_defect(&v.map(|_, s| s.psi.clone())),
        };
        Ok((rec, total))
    }

    /// Picard iteration `v^{j+1} = T(F + N(v^j))`, starting from `initial` or from `v⁰ = T(F)`.
    pub fn iterate<E: Executor>(
        &self,
        f: &ForceField,
        initial: Option<VelocityField>,
        cfg: &PicardConfig,
        exec: &E,
        mut observe: impl FnMut(&IterationRecord, &VelocityField),
    ) -> Result<IterationState> {
        cfg.validate()?;
        self.check(f)?;
        let defect = force_reality(f);
        if defect > 1e-10 {
            return Err(param("force", format!("force is not conjugate-symmetric (defect {defect:e})")));
        }
        let mut v = match initial {
            Some(v0) => {
                if v0.cutoff != self.cutoff || v0.l != self.base.l() {
                    return Err(param("initial", "starting field does not match the solver cutoff and period"));
                }
                v0
            }
            None => self.solve_linear(f, exec)?,
        };
        let (rec, mut total) = self.record(0, &v, None, f)?;
        observe(&rec, &v);
        let mut history = alloc::vec![rec];
        let mut growth = 0usize;
        let mut converged = false;
        for j in 1..=cfg.max_iter {
            let next = self.solve_linear(&total, exec)?;
            let (rec, t) = self.record(j, &next, Some(&v), f)?;
            observe(&rec, &next);
            let d = rec.difference.unwrap_or(0.0);
            let prev_d = history.last().and_then(|r| r.difference);
            history.push(rec);
            v = next;
            total = t;
            if !d.is_finite() {
                return Err(divergence(j, &history));
            }
            growth = match prev_d {
                Some(p) if d > p => growth + 1,
                _ => 0,
            };
            if d <= cfg.tol {
                converged = true;
                break;
            }
            if growth >= DIVERGENCE_RUN {
                return Err(divergence(j, &history));
            }
        }
        let residual = history.last().map_or(0.0, |r| r.residual);
        let residual_rising = history
            .windows(2)
            .skip(3)
            .any(|w| w[1].residual > w[0].residual + cfg.tol);
        Ok(IterationState {
            j: history.len() - 1,
            field: v,
            history,
            residual,
            converged,
            residual_rising,
        })
    }
}

fn divergence(j: usize, history: &[IterationRecord]) -> Error {
    Error::Divergence {
        iteration: j,
        history: history.iter().filter_map(|r| r.difference).collect(),
    }
}

/// Picard iteration from `v⁰ = T(F)`.
pub fn picard_solve<E: Executor>(
    solver: &PicardSolver<'_>,
    f: &ForceField,
    cfg: &PicardConfig,
    exec: &E,
) -> Result<IterationState> {
    solver.iterate(f, None, cfg, exec, |_, _| {})
}

/// Outcome of restarting the iteration from a perturbed solution.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionReport {
    /// `‖v^j − v*‖` in the composite norm, from `j = 0`.
    pub distances: Vec<f64>,
    /// `d_{j+1}/d_j` while `d_j` is above roundoff.
    pub ratios: Vec<f64>,
    /// Geometric mean of `ratios`.
    pub contraction: f64,
    pub perturbation_v2_h1: f64,
    pub converged: bool,
    pub state: IterationState,
}

/// Restarts Picard from `v* + pert` and measures the approach back to `v*`.
pub fn uniqueness_probe<E: Executor>(
    solver: &PicardSolver<'_>,
    f: &ForceField,
    v_star: &VelocityField,
    perturbation: &VelocityField,
    cfg: &PicardConfig,
    exec: &E,
) -> Result<ContractionReport> {
    let grid = solver.grid();
    let start = field_lin(1.0, v_star, 1.0, perturbation)?;
    let mut distances = Vec::new();
    let mut err = None;
    let state = solver.iterate(f, Some(start), cfg, exec, |_, v| {
        match field_lin(1.0, v, -1.0, v_star).and_then(|d| field_norms(&d, grid)) {
            Ok(n) => distances.push(n.composite()),
            Err(e) => err = Some(e),
        }
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    let floor = distances.first().copied().unwrap_or(0.0) * 1e-11;
    let ratios: Vec<f64> = distances
        .windows(2)
        .take_while(|w| w[0] > floor && w[0] > 0.0)
        .map(|w| w[1] / w[0])
        .collect();
    let contraction = if ratios.is_empty() {
        0.0
    } else {
        (ratios.iter().map(|r| r.max(f64::MIN_POSITIVE).ln()).sum::<f64>() / ratios.len() as f64).exp()
    };
    let last = distances.last().copied().unwrap_or(0.0);
    Ok(ContractionReport {
        converged: state.converged && last <= cfg.tol.max(floor) * 10.0,
        distances,
        ratios,
        contraction,
        perturbation_v2_h1: v2_h1(perturbation, grid)?,
        state,
    })
}

/// Real perturbation `ψ_n = c_n (1 − y²)²` on `0 < |n| ≤ active`, scaled so that `‖v₂‖_{H¹} = target`.
pub fn bump_perturbation(
    base: &ModeParams,
    cutoff: usize,
    active: usize,
    target: f64,
    grid: &ChebyshevGrid,
) -> Result<VelocityField> {
    if !(target >= 0.0) || !target.is_finite() {
        return Err(param("perturbation_scale", format!("must be nonnegative and finite, got {target}")));
    }
    if active == 0 || active > cutoff {
        return Err(param("active", format!("must lie in 1..={cutoff}, got {active}")));
    }
    let pts = grid.points();
    let shape = |c: C64, n: i64| {
        let col = |f: &dyn Fn(f64) -> f64| -> Vec<C64> { pts.iter().map(|&y| c * f(y)).collect() };
        let psi = col(&|y| (1.0 - y * y).powi(2));
        let derivs = [
            col(&|y| -4.0 * y * (1.0 - y * y)),
            col(&|y| 12.0 * y * y - 4.0),
            col(&|y| 24.0 * y),
            col(&|_| 24.0),
        ];
        ModeSolution::from_derivatives(base.with_n(n), BcKind::Clamped, psi, derivs)
    };
    let raw = FourierField::from_fn(cutoff, base.l(), |n| {
        let k = n.unsigned_abs() as usize;
        if n == 0 || k > active {
            return shape(C64::zero(), n);
        }
        let c = C64::new(1.0, 0.5 * k as f64) / (k as f64);
        shape(if n > 0 { c } else { c.conj() }, n)
    })?;
    let size = v2_h1(&raw, grid)?;
    let s = if size > 0.0 { target / size } else { 0.0 };
    Ok(raw.map(|_, m| lin(s, m, 0.0, m)))
}

/// `v = 0` on every mode.
pub fn zero_field(base: &ModeParams, cutoff: usize, grid: &ChebyshevGrid) -> Result<VelocityField> {
    FourierField::from_fn(cutoff, base.l(), |n| ModeSolution::zero(base.with_n(n), grid))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(cutoff: usize, n: i64, v: Vec<C64>) -> ScalarField {
        let len = v.len();
        FourierField::from_fn(cutoff, 1.0, |m| if m == n { v.clone() } else { alloc::vec![C64::zero(); len] }).unwrap()
    }

    #[test]
    fn single_term_convolution() {
        let g = alloc::vec![C64::new(1.0, 2.0), C64::new(-0.5, 0.0), C64::new(3.0, -1.0)];
        let h = alloc::vec![C64::new(0.0, 1.0), C64::new(2.0, 2.0), C64::new(1.0, 0.0)];
        let p = convolve_modes(&single(4, 1, g.clone()), &single(4, 2, h.clone())).unwrap();
        for (n, v) in p.iter() {
            if n == 3 {
                for k in 0..3 {
                    assert_eq!(v[k], g[k] * h[k]);
                }
            } else {
                assert!(v.iter().all(|z| z.is_zero()));
            }
        }
        let q = convolve_modes(&single(2, 2, g.clone()), &single(2, 1, h)).unwrap();
        assert!(q.iter().all(|(_, v)| v.iter().all(|z| z.is_zero())));
    }

    #[test]
    fn projection_is_idempotent() {
        let f = single(3, 0, alloc::vec![C64::new(1.0, 0.0); 4]);
        let q = project_q(&f);
        assert!(q.iter().all(|(_, v)| v.iter().all(|z| z.is_zero())));
        let g = single(3, 2, alloc::vec![C64::new(1.0, 1.0); 4]);
        assert_eq!(project_q(&project_q(&g)), project_q(&g));
        assert_eq!(project_q(&g), g);
    }

    #[test]
    fn cutoff_mismatch_is_rejected() {
        let a = single(3, 0, alloc::vec![C64::zero(); 2]);
        let b = single(4, 0, alloc::vec![C64::zero(); 2]);
        assert!(matches!(convolve_modes(&a, &b), Err(Error::Parameter { name: "cutoff", .. })));
    }
}
