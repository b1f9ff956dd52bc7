//! One function per command. Each writes its artifacts and returns a one-line summary.

use std::collections::BTreeMap;
use std::time::Instant;

use poiseuille_core::boundary_layer::{build_decomposition, decomposition_order, relative_l2, LayerConfig, ParityPart};
use poiseuille_core::estimates::{
    estimate_report, mode_norms, operator_sigma_min, solve_forced, spectrum_normalization, sweep, EstimateReport,
    NormSet, ReportOptions, SweepSpec,
};
use poiseuille_core::force::{ForceSpec, ModeForce};
use poiseuille_core::inequality_lab::{run_suite, SuiteConfig};
use poiseuille_core::mode::{rhs_from_force, solve_mode_clamped, ModeParams, RegimeConfig};
use poiseuille_core::nonlinear::{
    bump_perturbation, force_l2, picard_order, picard_solve, sample_force_field, scale_force, uniqueness_probe,
    zero_field, FieldNorms, ForceField, FourierField, IterationRecord, IterationState, PicardConfig, PicardSolver,
};
use poiseuille_core::{ChebyshevGrid, Error, Executor};
use serde_json::{json, Value};

use crate::config::{Command, GridChoice, RunConfig};
use crate::error::LabError;
use crate::output::{complex, num, opt, Output, Table};
use crate::parallel::RayonExecutor;
use crate::table::ForceTable;

/// What a finished run reports back to the caller.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub summary: String,
    pub files: Vec<String>,
}

/// Runs `cfg`, writing `manifest.json` last whether or not the command succeeded.
pub fn run(cfg: &RunConfig, exec: &RayonExecutor) -> Result<Outcome, LabError> {
    let start = Instant::now();
    let mut out = Output::create(&cfg.output)?;
    let result = match cfg.command {
        Command::Solve => solve(cfg, &mut out),
        Command::Sweep => sweep_cmd(cfg, exec, &mut out),
        Command::Decompose => decompose(cfg, &mut out),
        Command::Nonlinear => nonlinear(cfg, exec, &mut out),
        Command::Uniqueness => uniqueness(cfg, exec, &mut out),
        Command::Inequalities => inequalities(cfg, exec, &mut out),
        Command::Spectrum => spectrum(cfg, exec, &mut out),
    };
    if let Err(LabError::Core(Error::Divergence { iteration, history })) = &result {
        out.json("history.json", &json!({ "diverged_at": iteration, "differences": history }))?;
    }
    let manifest = json!({
        "command": cfg.command.as_str(),
        "config": cfg,
        "versions": { "poiseuille-lab": env!("CARGO_PKG_VERSION"), "poiseuille-core": poiseuille_core::VERSION },
        "threads": exec.threads(),
        "outputs": out.files(),
        "status": if result.is_ok() { "ok" } else { "failed" },
        "error": result.as_ref().err().map(|e| e.to_string()),
        "exit_code": result.as_ref().err().map_or(0, LabError::exit_code),
        "wall_time_seconds": start.elapsed().as_secs_f64(),
    });
    out.json("manifest.json", &manifest)?;
    result.map(|summary| Outcome {
        summary,
        files: out.files().to_vec(),
    })
}

enum ForceSource {
    Family(ForceSpec),
    Table(ForceTable, f64),
}

impl ForceSource {
    fn new(cfg: &RunConfig) -> Result<Self, LabError> {
        match &cfg.force_table {
            Some(path) => Ok(ForceSource::Table(ForceTable::load(path)?, cfg.amplitude)),
            None => Ok(ForceSource::Family(ForceSpec::new(cfg.family, cfg.amplitude)?)),
        }
    }

    fn label(&self, cfg: &RunConfig) -> String {
        match (self, &cfg.force_table) {
            (ForceSource::Table(..), Some(p)) => format!("table:{}", p.display()),
            _ => cfg.force.clone(),
        }
    }

    fn mode(&self, n: i64, grid: &ChebyshevGrid) -> Result<ModeForce, LabError> {
        match self {
            ForceSource::Family(spec) => Ok(spec.sample(n, grid)),
            ForceSource::Table(t, a) if t.contains(n) => Ok(t.sample(n, *a, grid)),
            ForceSource::Table(..) => Err(LabError::Invalid(vec![format!("force_table: no rows for n = {n}")])),
        }
    }

    fn field(&self, cfg: &RunConfig, grid: &ChebyshevGrid) -> Result<ForceField, LabError> {
        let f = match self {
            ForceSource::Family(spec) => sample_force_field(spec, cfg.cutoff, cfg.l, cfg.active, cfg.mean, grid)?,
            ForceSource::Table(t, a) => {
                if let Some(n) = t.modes().find(|n| n.unsigned_abs() as usize > cfg.cutoff) {
                    return Err(LabError::Invalid(vec![format!(
                        "force_table: mode n = {n} lies above the cutoff {}",
                        cfg.cutoff
                    )]));
                }
                FourierField::from_fn(cfg.cutoff, cfg.l, |n| t.sample(n, *a, grid))?
            }
        };
        match cfg.force_norm {
            Some(target) => {
                let size = force_l2(&f, grid)?;
                if size == 0.0 {
                    return Err(LabError::Invalid(vec!["force_norm: the force is zero and cannot be rescaled".into()]));
                }
                Ok(scale_force(&f, target / size))
            }
            None => Ok(f),
        }
    }
}

fn regime(cfg: &RunConfig) -> RegimeConfig {
    RegimeConfig {
        eps1: cfg.eps1,
        phi0: cfg.phi0,
    }
}

fn options(cfg: &RunConfig) -> ReportOptions {
    ReportOptions {
        regime: regime(cfg),
        sigma_min: cfg.sigma_min,
    }
}

fn norms_json(n: &NormSet) -> Value {
    json!({ "l2": n.l2, "h1": n.h1, "h2": n.h2, "h53": n.h53, "hn4": n.hn4 })
}

fn normalized_sigma(p: &ModeParams, sigma: Option<f64>) -> Option<f64> {
    sigma.filter(|_| p.phi() > 0.0 && p.n() != 0).map(|s| s * spectrum_normalization(p))
}

fn report_json(r: &EstimateReport, order: usize) -> Value {
    let p = &r.params;
    json!({
        "n": p.n(),
        "phi": p.phi(),
        "L": p.l(),
        "n_hat": p.n_hat(),
        "beta": p.beta(),
        "order": order,
        "regime": r.regime.as_str(),
        "norms": norms_json(&r.norms),
        "force_norm": r.force_norm,
        "entries": r.entries.iter().map(|e| json!({
            "name": e.name, "lhs": e.lhs, "rhs_core": e.rhs_core, "ratio": e.ratio,
        })).collect::<Vec<_>>(),
        "identities": { "real": r.identities.real, "imag": r.identities.imag },
        "sigma_min": r.sigma_min,
        "sigma_min_normalized": normalized_sigma(p, r.sigma_min),
        "h53_ratio": r.h53_ratio(),
        "h2_ratio": r.h2_ratio(),
    })
}

fn order_for(choice: GridChoice, p: &ModeParams) -> usize {
    choice.policy().order(p)
}

fn solve(cfg: &RunConfig, out: &mut Output) -> Result<String, LabError> {
    let p = ModeParams::new(cfg.n[0], cfg.l, cfg.phi[0])?;
    let m = order_for(cfg.m, &p);
    let grid = ChebyshevGrid::new(m)?;
    let force = ForceSource::new(cfg)?.mode(p.n(), &grid)?;
    let (sol, _) = solve_forced(&p, &force, &grid)?;
    let r = estimate_report(&sol, &force, &grid, &options(cfg))?;

    let mut t = Table::new([
        "y", "psi_re", "psi_im", "v1_re", "v1_im", "v2_re", "v2_im", "omega_re", "omega_im",
    ]);
    for (k, &y) in grid.points().iter().enumerate() {
        let mut row = vec![num(y)];
        for z in [sol.psi[k], sol.v1[k], sol.v2[k], sol.omega[k]] {
            row.extend(complex(z));
        }
        t.push(row);
    }
    let mut report = report_json(&r, m);
    report["relative_residual"] = json!(sol.relative_residual);
    out.json("report.json", &report)?;
    out.csv("cells.csv", &t)?;
    Ok(format!(
        "solve n={} phi={} M={m} regime={} |v|_H5/3={:e} |v|_H2={:e}",
        p.n(),
        p.phi(),
        r.regime.as_str(),
        r.norms.h53,
        r.norms.h2
    ))
}

fn sweep_cmd(cfg: &RunConfig, exec: &RayonExecutor, out: &mut Output) -> Result<String, LabError> {
    let spec = SweepSpec {
        phi: cfg.phi.clone(),
        n: cfg.n.clone(),
        l: cfg.l,
        force: ForceSpec::new(cfg.family, cfg.amplitude)?,
        grid: cfg.m.policy(),
        options: options(cfg),
    };
    let (cells, summary) = sweep(&spec, exec)?;
    let mut t = Table::new([
        "phi",
        "n",
        "order",
        "status",
        "regime",
        "l2",
        "h1",
        "h2",
        "h53",
        "force_norm",
        "h53_ratio",
        "h2_ratio",
        "identity_real",
        "identity_imag",
        "sigma_min",
        "sigma_min_normalized",
        "mode_h53_slope",
        "mode_h2_slope",
        "error",
    ]);
    let slopes: BTreeMap<i64, [String; 2]> = summary
        .per_mode
        .iter()
        .map(|m| (m.n, [opt(m.h53.as_ref().map(|f| f.slope)), opt(m.h2.as_ref().map(|f| f.slope))]))
        .collect();
    let mode_slopes = |n: i64| slopes.get(&n).cloned().unwrap_or_default();
    let mut detail = Vec::with_capacity(cells.len());
    for c in &cells {
        let head = vec![num(c.params.phi()), c.params.n().to_string(), c.order.to_string()];
        match &c.outcome {
            Ok(r) => {
                let mut row = head;
                row.extend([
                    "ok".to_string(),
                    r.regime.as_str().to_string(),
                    num(r.norms.l2),
                    num(r.norms.h1),
                    num(r.norms.h2),
                    num(r.norms.h53),
                    num(r.force_norm),
                    opt(r.h53_ratio()),
                    opt(r.h2_ratio()),
                    num(r.identities.real),
                    num(r.identities.imag),
                    opt(r.sigma_min),
                    opt(normalized_sigma(&r.params, r.sigma_min)),
                ]);
                row.extend(mode_slopes(c.params.n()));
                row.push(String::new());
                t.push(row);
                detail.push(report_json(r, c.order));
            }
            Err(e) => {
                let mut row = head;
                row.push("failed".into());
                row.extend(std::iter::repeat_n(String::new(), 12));
                row.extend(mode_slopes(c.params.n()));
                row.push(e.clone());
                t.push(row);
                detail.push(json!({ "n": c.params.n(), "phi": c.params.phi(), "order": c.order, "error": e }));
            }
        }
    }
    let fit = |f: &Option<poiseuille_core::estimates::SlopeFit>| f.as_ref().map(|s| json!({ "slope": s.slope, "points": s.points }));
    let per_mode: Vec<Value> = summary
        .per_mode
        .iter()
        .map(|m| {
            json!({
                "n": m.n,
                "h53_slope": fit(&m.h53),
                "h2_slope": fit(&m.h2),
                "sigma_min_normalized_ends": m.sigma_ends.map(|(a, b)| [a, b]),
                "sigma_min_ratio": m.sigma_ratio(),
            })
        })
        .collect();
    let report = json!({
        "force": cfg.force,
        "phi0": cfg.phi0,
        "fit_window": "cells with phi >= phi0",
        "h53_slope": fit(&summary.h53),
        "h2_slope": fit(&summary.h2),
        "per_mode": per_mode,
        "failed": summary.failed,
        "worst_identity_residual": summary.worst_identity,
        "sigma_min_positive": summary.sigma_min_positive,
        "cells": detail,
    });
    out.json("report.json", &report)?;
    out.csv("cells.csv", &t)?;
    let slope = |f: &Option<poiseuille_core::estimates::SlopeFit>| f.as_ref().map_or("n/a".to_string(), |s| format!("{:.4}", s.slope));
    Ok(format!(
        "sweep cells={} failed={} slope_H5/3={} slope_H2={}",
        cells.len(),
        summary.failed,
        slope(&summary.h53),
        slope(&summary.h2)
    ))
}

fn part_json(p: &ParityPart) -> Value {
    json!({
        "a": complex(p.a), "b": complex(p.b), "denominator": complex(p.denominator),
        "b_abs": p.b.norm(),
    })
}

fn decompose(cfg: &RunConfig, out: &mut Output) -> Result<String, LabError> {
    let p = ModeParams::new(cfg.n[0], cfg.l, cfg.phi[0])?;
    let m = match cfg.m {
        GridChoice::Auto => decomposition_order(&p),
        GridChoice::Fixed(m) => m,
    };
    let grid = ChebyshevGrid::new(m)?;
    let force = ForceSource::new(cfg)?.mode(p.n(), &grid)?;
    let f = rhs_from_force(&force.f1, &force.f2, &p, &grid)?;
    let layer = LayerConfig {
        rho_max: cfg.rho_max,
        points: cfg.layer_points,
        decay_radius: cfg.decay_radius,
    };
    let dec = build_decomposition(&p, &f, &grid, &regime(cfg), &layer)?;
    let direct = solve_mode_clamped(&p, &f, &grid)?;
    let gap = relative_l2(&dec.assembled, &direct.psi, &grid)?;
    let force_norm = (2.0 * std::f64::consts::PI * p.l() * force.l2_sq(&grid)?).sqrt();
    let scale = (p.phi() * p.n_hat()).abs().powf(5.0 / 6.0);
    let b_normalized = if force_norm > 0.0 { Some(dec.b_sum() * scale / force_norm) } else { None };

    let mut header = vec!["y".to_string()];
    for name in ["direct", "assembled", "slip"] {
        header.extend([format!("{name}_re"), format!("{name}_im")]);
    }
    for parity in ["even", "odd"] {
        for piece in ["bl", "e", "p", "r"] {
            header.extend([format!("{parity}_{piece}_re"), format!("{parity}_{piece}_im")]);
        }
    }
    let mut t = Table::new(header);
    for (k, &y) in grid.points().iter().enumerate() {
        let mut row = vec![num(y)];
        for z in [direct.psi[k], dec.assembled[k], dec.psi_s[k]] {
            row.extend(complex(z));
        }
        for part in dec.parts() {
            for v in [&part.psi_bl, &part.psi_e, &part.psi_p, &part.psi_r] {
                row.extend(complex(v[k]));
            }
        }
        t.push(row);
    }
    let report = json!({
        "n": p.n(),
        "phi": p.phi(),
        "L": p.l(),
        "order": m,
        "force": ForceSource::new(cfg)?.label(cfg),
        "force_norm": force_norm,
        "layer": { "rho_max": layer.rho_max, "points": layer.points, "decay_radius": layer.decay_radius, "k": dec.profile.k() },
        "relative_gap": gap,
        "even": part_json(&dec.even),
        "odd": part_json(&dec.odd),
        "b_sum": dec.b_sum(),
        "b_normalized": b_normalized,
        "b_normalization": "b_sum * |phi n_hat|^(5/6) / |F_n|_L2",
    });
    out.json("report.json", &report)?;
    out.csv("cells.csv", &t)?;
    Ok(format!("decompose n={} phi={} M={m} gap={gap:e} |b|={:e}", p.n(), p.phi(), dec.b_sum()))
}

fn record_json(r: &IterationRecord) -> Value {
    json!({
        "j": r.j,
        "v0_h2": r.v0_h2,
        "qv_h53": r.qv_h53,
        "qv_l2": r.qv_l2,
        "composite": r.composite,
        "difference": r.difference,
        "residual": r.residual,
        "flux": r.flux,
        "reality": r.reality,
    })
}

fn field_order(cfg: &RunConfig, phi: f64) -> Result<usize, LabError> {
    Ok(match cfg.m {
        GridChoice::Auto => picard_order(cfg.l, phi, cfg.cutoff)?,
        GridChoice::Fixed(m) => m,
    })
}

fn mode_table(state: &IterationState, force: &ForceField, grid: &ChebyshevGrid) -> Result<Table, LabError> {
    let mut t = Table::new(["n", "l2", "h1", "h2", "h53", "force_l2"]);
    for (n, sol) in state.field.iter() {
        let nm = mode_norms(sol, grid)?;
        let f = (2.0 * std::f64::consts::PI * force.l() * force.mode(n).l2_sq(grid)?).sqrt();
        t.push(vec![n.to_string(), num(nm.l2), num(nm.h1), num(nm.h2), num(nm.h53), num(f)]);
    }
    Ok(t)
}

fn not_converged(state: &IterationState) -> LabError {
    LabError::NotConverged {
        iterations: state.j,
        difference: state.norms().difference.unwrap_or(f64::NAN),
    }
}

fn nonlinear(cfg: &RunConfig, exec: &RayonExecutor, out: &mut Output) -> Result<String, LabError> {
    let phi = cfg.phi[0];
    let m = field_order(cfg, phi)?;
    let grid = ChebyshevGrid::new(m)?;
    let source = ForceSource::new(cfg)?;
    let force = source.field(cfg, &grid)?;
    let solver = PicardSolver::new(cfg.l, phi, cfg.cutoff, &grid, exec)?;
    let pc = PicardConfig {
        max_iter: cfg.max_iter,
        tol: cfg.tol,
    };
    let state = picard_solve(&solver, &force, &pc, exec)?;
    let last = state.norms();
    let f_norm = force_l2(&force, &grid)?;
    let bound = phi.powf(-7.0 / 12.0);
    let large = phi.powf(1.0 / 32.0);
    let report = json!({
        "phi": phi,
        "L": cfg.l,
        "cutoff": cfg.cutoff,
        "order": m,
        "force": source.label(cfg),
        "force_norm": f_norm,
        "tol": cfg.tol,
        "max_iter": cfg.max_iter,
        "converged": state.converged,
        "iterations": state.j,
        "residual": state.residual,
        "residual_rising": state.residual_rising,
        "final": record_json(last),
        "nonzero_modes_l2_bound": bound,
        "nonzero_modes_within_bound": last.qv_l2 <= bound,
        "large_force": { "threshold": large, "force_within": f_norm <= large },
        "small_data": { "eps": cfg.eps, "force_within": f_norm <= cfg.eps },
        "regime": { "eps1": cfg.eps1, "phi0": cfg.phi0 },
    });
    let history: Vec<Value> = state.history.iter().map(record_json).collect();
    out.json("report.json", &report)?;
    out.json("history.json", &history)?;
    out.csv("cells.csv", &mode_table(&state, &force, &grid)?)?;
    if !state.converged {
        return Err(not_converged(&state));
    }
    Ok(format!(
        "nonlinear phi={phi} N={} M={m} j={} residual={:e} |Qv|_L2={:e} (bound {:e})",
        cfg.cutoff, state.j, state.residual, last.qv_l2, bound
    ))
}

fn uniqueness(cfg: &RunConfig, exec: &RayonExecutor, out: &mut Output) -> Result<String, LabError> {
    let phi = cfg.phi[0];
    let m = field_order(cfg, phi)?;
    let grid = ChebyshevGrid::new(m)?;
    let source = ForceSource::new(cfg)?;
    let force = source.field(cfg, &grid)?;
    let solver = PicardSolver::new(cfg.l, phi, cfg.cutoff, &grid, exec)?;
    let pc = PicardConfig {
        max_iter: cfg.max_iter,
        tol: cfg.tol,
    };
    let base = solver.params(1);
    let f_norm = force_l2(&force, &grid)?;
    let v_star = if f_norm == 0.0 {
        zero_field(&base, cfg.cutoff, &grid)?
    } else {
        let s = picard_solve(&solver, &force, &pc, exec)?;
        if !s.converged {
            return Err(not_converged(&s));
        }
        s.field
    };
    let threshold = phi.powf(1.0 / 60.0);
    let target = cfg.perturbation.unwrap_or(cfg.perturbation_fraction * threshold);
    let pert = bump_perturbation(&base, cfg.cutoff, cfg.active, target, &grid)?;
    let rep = uniqueness_probe(&solver, &force, &v_star, &pert, &pc, exec)?;

    let mut t = Table::new(["j", "distance", "ratio"]);
    for (j, d) in rep.distances.iter().enumerate() {
        t.push(vec![j.to_string(), num(*d), opt(rep.ratios.get(j).copied())]);
    }
    let star: FieldNorms = poiseuille_core::nonlinear::field_norms(&v_star, &grid)?;
    let report = json!({
        "phi": phi,
        "L": cfg.l,
        "cutoff": cfg.cutoff,
        "order": m,
        "force": source.label(cfg),
        "force_norm": f_norm,
        "solution_composite_norm": star.composite(),
        "perturbation_v2_h1": rep.perturbation_v2_h1,
        "perturbation_threshold": threshold,
        "perturbation_within": rep.perturbation_v2_h1 < threshold,
        "contraction": rep.contraction,
        "contracts": rep.contraction < 1.0,
        "converged": rep.converged,
        "iterations": rep.state.j,
        "distances": rep.distances,
        "ratios": rep.ratios,
    });
    let history: Vec<Value> = rep.state.history.iter().map(record_json).collect();
    out.json("report.json", &report)?;
    out.json("history.json", &history)?;
    out.csv("cells.csv", &t)?;
    if !rep.converged {
        return Err(not_converged(&rep.state));
    }
    Ok(format!(
        "uniqueness phi={phi} |pert|={:e} contraction={:e} converged={}",
        rep.perturbation_v2_h1, rep.contraction, rep.converged
    ))
}

fn inequalities(cfg: &RunConfig, exec: &RayonExecutor, out: &mut Output) -> Result<String, LabError> {
    let sc = SuiteConfig {
        seed: cfg.seed,
        samples: cfg.samples,
        order: cfg.order,
        reference_samples: cfg.reference_samples,
    };
    let rep = run_suite(&sc, exec)?;
    let first = &rep.samples[0];
    let mut header = vec!["index".to_string(), "label".to_string()];
    header.extend(first.margins.iter().map(|m| format!("{}_relative", m.name)));
    header.extend(first.observed.iter().map(|o| format!("{}_ratio", o.name)));
    header.push("refinement_change".into());
    let mut t = Table::new(header);
    for s in &rep.samples {
        let mut row = vec![s.index.to_string(), s.label.clone()];
        row.extend(s.margins.iter().map(|m| num(m.relative)));
        row.extend(s.observed.iter().map(|o| opt(o.ratio)));
        row.push(num(s.refinement_change));
        t.push(row);
    }
    let margins: Vec<Value> = rep
        .margins
        .iter()
        .map(|m| {
            json!({
                "name": m.name,
                "worst_margin": m.worst_margin,
                "worst_relative": m.worst_relative,
                "worst_index": m.worst_index,
                "worst_label": rep.samples[m.worst_index].label,
                "holds": m.worst_relative >= 0.0,
            })
        })
        .collect();
    let observed: Vec<Value> = rep
        .observed
        .iter()
        .map(|o| {
            json!({
                "name": o.name,
                "reference_sup": o.reference,
                "full_sup": o.full,
                "drift": o.drift(),
                "full_index": o.full_index,
                "skipped": o.skipped,
            })
        })
        .collect();
    let worst = rep.worst_relative_margin();
    let report = json!({
        "seed": sc.seed,
        "samples": sc.samples,
        "reference_samples": sc.reference_samples,
        "order": sc.order,
        "refinement_order": 2 * sc.order,
        "max_refinement_change": rep.max_refinement_change,
        "worst_relative_margin": worst,
        "all_hold": worst >= 0.0,
        "max_drift": rep.max_drift(),
        "margins": margins,
        "observed": observed,
    });
    out.json("report.json", &report)?;
    out.csv("cells.csv", &t)?;
    Ok(format!(
        "inequalities samples={} worst_relative_margin={worst:.4} max_drift={:.4} refinement={:e}",
        sc.samples,
        rep.max_drift(),
        rep.max_refinement_change
    ))
}

fn spectrum(cfg: &RunConfig, exec: &RayonExecutor, out: &mut Output) -> Result<String, LabError> {
    let mut params = Vec::new();
    for &phi in &cfg.phi {
        for &n in &cfg.n {
            params.push(ModeParams::new(n, cfg.l, phi)?);
        }
    }
    let mut orders: Vec<usize> = params.iter().map(|p| order_for(cfg.m, p)).collect();
    orders.sort_unstable();
    orders.dedup();
    let built = exec.map(orders.len(), &|k| ChebyshevGrid::new(orders[k]));
    let mut grids = BTreeMap::new();
    for (m, g) in orders.iter().zip(built) {
        grids.insert(*m, g?);
    }
    let sigmas = exec.map(params.len(), &|k| {
        let p = &params[k];
        operator_sigma_min(p, &grids[&order_for(cfg.m, p)])
    });
    let mut t = Table::new(["phi", "n", "order", "sigma_min", "normalization", "sigma_min_normalized"]);
    let mut by_mode: BTreeMap<i64, Vec<(f64, f64)>> = BTreeMap::new();
    let mut positive = true;
    for (p, s) in params.iter().zip(sigmas) {
        let s = s?;
        positive &= s > 0.0;
        let norm = normalized_sigma(p, Some(s));
        if let Some(v) = norm {
            by_mode.entry(p.n()).or_default().push((p.phi(), v));
        }
        let scale = if p.phi() > 0.0 { Some(spectrum_normalization(p)) } else { None };
        t.push(vec![
            num(p.phi()),
            p.n().to_string(),
            order_for(cfg.m, p).to_string(),
            num(s),
            opt(scale),
            opt(norm),
        ]);
    }
    let per_mode: Vec<Value> = by_mode
        .iter()
        .map(|(n, v)| {
            let lo = v.iter().min_by(|a, b| a.0.total_cmp(&b.0)).map(|x| x.1);
            let hi = v.iter().max_by(|a, b| a.0.total_cmp(&b.0)).map(|x| x.1);
            let ratio = lo.zip(hi).map(|(a, b)| a.max(b) / a.min(b));
            json!({ "n": n, "normalized_ends": lo.zip(hi).map(|(a, b)| [a, b]), "ratio": ratio })
        })
        .collect();
    let worst = per_mode.iter().filter_map(|v| v["ratio"].as_f64()).fold(1.0, f64::max);
    let report = json!({
        "normalization": "sigma_min / |phi n_hat|",
        "all_positive": positive,
        "worst_ratio": worst,
        "per_mode": per_mode,
    });
    out.json("report.json", &report)?;
    out.csv("cells.csv", &t)?;
    Ok(format!("spectrum cells={} positive={positive} worst_ratio={worst:.4}", params.len()))
}
