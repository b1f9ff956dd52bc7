//! Acceptance criteria, one line each. Exits nonzero when any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use common::*;
use num_complex::Complex64 as C64;
use poiseuille_core::boundary_layer::{build_decomposition, contour_integral_k, LayerConfig};
use poiseuille_core::estimates::{energy_identities, solve_forced, sweep, GridPolicy, ReportOptions, SweepSpec};
use poiseuille_core::force::{ForceFamily, ForceSpec};
use poiseuille_core::inequality_lab::{run_suite, SuiteConfig};
use poiseuille_core::mode::{rhs_from_force, solve_mode_clamped, solve_mode_slip, ModeParams, RegimeConfig};
use poiseuille_core::nonlinear::*;
use poiseuille_core::{ChebyshevGrid, Sequential};

type Verdict = (bool, String);

fn oracle_equivalence() -> Verdict {
    let t = Instant::now();
    let mut worst = 0.0f64;
    for (p, spec) in oracle_cases(20241014, 10) {
        let grid = ChebyshevGrid::new(p.resolved_order()).unwrap();
        let (sol, _) = solve_forced(&p, &spec.sample(p.n(), &grid), &grid).unwrap();
        let (ys, fd) = fd_clamped_extrapolated(&p, analytic_rhs(spec.family, spec.amplitude, &p), 2000);
        worst = worst.max(rel_l2(&interpolate_to(&sol.psi, &grid, &ys), &fd));
    }
    let secs = t.elapsed().as_secs_f64();
    (
        worst <= 1e-5 && secs <= 120.0,
        format!("10 seeded cases, max relative L2 {worst:.2e} (<= 1e-5), {secs:.2} s (<= 120 s)"),
    )
}

fn apply(p: &ModeParams, y: f64, d: [f64; 5]) -> C64 {
    let nh = p.n_hat();
    let nh2 = nh * nh;
    let u = 0.75 * p.phi() * (1.0 - y * y);
    let i = C64::new(0.0, 1.0);
    -i * nh * (-1.5 * p.phi()) * d[0] + i * nh * u * (d[2] - nh2 * d[0]) - (d[4] - 2.0 * nh2 * d[2] + nh2 * nh2 * d[0])
}

fn manufactured() -> Verdict {
    let g = ChebyshevGrid::new(64).unwrap();
    let pi = std::f64::consts::PI;
    let (mut clamped, mut slip) = (0.0f64, 0.0f64);
    for (n, phi) in [(1, 1.0), (2, 10.0), (4, 100.0), (8, 1000.0)] {
        let p = ModeParams::new(n, 1.0, phi).unwrap();
        let pts = g.points();
        let f: Vec<C64> = pts
            .iter()
            .map(|&y| apply(&p, y, [(1.0 - y * y).powi(2), -4.0 * y * (1.0 - y * y), 12.0 * y * y - 4.0, 24.0 * y, 24.0]))
            .collect();
        let s = solve_mode_clamped(&p, &f, &g).unwrap();
        clamped = clamped.max(s.psi.iter().zip(pts).map(|(z, &y)| (z - (1.0 - y * y).powi(2)).norm()).fold(0.0, f64::max));
        let f: Vec<C64> = pts
            .iter()
            .map(|&y| {
                let (sn, c) = (pi * y).sin_cos();
                apply(&p, y, [sn, pi * c, -pi * pi * sn, -pi.powi(3) * c, pi.powi(4) * sn])
            })
            .collect();
        let s = solve_mode_slip(&p, &f, &g).unwrap();
        slip = slip.max(s.psi.iter().zip(pts).map(|(z, &y)| (z - (pi * y).sin()).norm()).fold(0.0, f64::max));
    }
    (
        clamped <= 1e-8 && slip <= 1e-8,
        format!("M = 64, clamped max error {clamped:.2e}, slip max error {slip:.2e} (<= 1e-8)"),
    )
}

fn energy_identities_hold() -> Verdict {
    let mut worst = 0.0f64;
    for (p, spec) in oracle_cases(20241014, 10) {
        let grid = ChebyshevGrid::new(p.resolved_order()).unwrap();
        let (sol, f) = solve_forced(&p, &spec.sample(p.n(), &grid), &grid).unwrap();
        worst = worst.max(energy_identities(&sol, &f, &grid).unwrap().max());
    }
    (worst <= 1e-7, format!("oracle suite, max relative identity residual {worst:.2e} (<= 1e-7)"))
}

fn criterion_sweep() -> SweepSpec {
    SweepSpec {
        phi: vec![1e2, 1e3, 1e4, 1e5],
        n: vec![1, 2, 4],
        l: 1.0,
        force: ForceSpec::new(ForceFamily::Trig(1), 1.0).unwrap(),
        grid: GridPolicy::Auto,
        options: ReportOptions::default(),
    }
}

fn uniform_constant() -> Verdict {
    let t = Instant::now();
    let spec = criterion_sweep();
    let (_, s) = sweep(&spec, &Sequential).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let h53 = s.h53.as_ref().map_or(f64::NAN, |f| f.slope);
    let h2 = s.h2.as_ref().map_or(f64::NAN, |f| f.slope);
    let per: Vec<(i64, f64, f64)> = s
        .per_mode
        .iter()
        .map(|m| (m.n, m.h53.as_ref().map_or(f64::NAN, |f| f.slope), m.h2.as_ref().map_or(f64::NAN, |f| f.slope)))
        .collect();
    let inside = |x: f64| (-0.10..=0.05).contains(&x);
    let ok = s.failed == 0
        && inside(h53)
        && h2 <= 0.30
        && per.iter().all(|&(_, a, b)| inside(a) && b <= 0.30)
        && secs <= 600.0;
    let modes: Vec<String> = per.iter().map(|(n, a, b)| format!("n={n}: {a:.3}/{b:.3}")).collect();
    (
        ok,
        format!(
            "H^(5/3) slope {h53:.3} (window [-0.10, 0.05]), H^2 slope {h2:.3} (<= 0.30); per mode {}; {secs:.1} s (<= 600 s)",
            modes.join(", ")
        ),
    )
}

fn spectrum() -> Verdict {
    let spec = criterion_sweep();
    let (cells, s) = sweep(&spec, &Sequential).unwrap();
    let all = cells.iter().all(|c| c.outcome.as_ref().is_ok_and(|r| r.sigma_min.is_some_and(|v| v > 0.0)));
    let ratios: Vec<f64> = s.per_mode.iter().map(|m| m.sigma_ratio().unwrap_or(f64::INFINITY)).collect();
    let worst = ratios.iter().copied().fold(0.0, f64::max);
    (
        all && worst <= 10.0,
        format!("sigma_min > 0 in all {} cells: {all}; worst ratio of sigma_min/|phi n_hat| across phi {worst:.2} (<= 10)", cells.len()),
    )
}

fn decomposition() -> Verdict {
    let cases = [(1e3, 1), (1e4, 1), (1e4, 4), (1e5, 2), (1e6, 1)];
    let spec = ForceSpec::new(ForceFamily::Trig(1), 1.0).unwrap();
    let mut gap = 0.0f64;
    let mut b = Vec::new();
    for (phi, n) in cases {
        let p = ModeParams::new(n, 1.0, phi).unwrap();
        let grid = ChebyshevGrid::new(poiseuille_core::boundary_layer::decomposition_order(&p)).unwrap();
        let force = spec.sample(n, &grid);
        let f = rhs_from_force(&force.f1, &force.f2, &p, &grid).unwrap();
        let d = build_decomposition(&p, &f, &grid, &RegimeConfig::default(), &LayerConfig::default()).unwrap();
        gap = gap.max(d.compare_direct(&f, &grid).unwrap());
        let fnorm = (2.0 * std::f64::consts::PI * p.l() * force.l2_sq(&grid).unwrap()).sqrt();
        b.push(d.b_sum() * (phi * p.n_hat()).abs().powf(5.0 / 6.0) / fnorm);
    }
    let spread = b.iter().copied().fold(0.0, f64::max) / b.iter().copied().fold(f64::INFINITY, f64::min);
    (
        gap <= 1e-6 && spread <= 10.0,
        format!("5 medium cases phi 1e3..1e6, max relative gap {gap:.2e} (<= 1e-6), normalized |b| max/min {spread:.2} (<= 10)"),
    )
}

fn airy_contour() -> Verdict {
    let dir = C64::from_polar(1.0, -std::f64::consts::PI / 6.0);
    let ks: Vec<f64> = (0..20).map(|k| contour_integral_k(dir * (0.1 * k as f64 / 19.0)).unwrap()).collect();
    let min = ks.iter().copied().fold(f64::INFINITY, f64::min);
    let oracle = ai_integral_real_axis();
    let k0 = ks[0];
    let ok = min >= 1.0 / 6.0 && (k0 - 1.0 / 3.0).abs() <= 1e-6 && (k0 - oracle).abs() <= 1e-6;
    (
        ok,
        format!(
            "20 points, min K {min:.4} (>= 1/6), K(0) = {k0:.10} vs 1/3 off {:.1e}, vs real-axis quadrature off {:.1e} (<= 1e-6)",
            (k0 - 1.0 / 3.0).abs(),
            (k0 - oracle).abs()
        ),
    )
}

fn nonlinear_regime() -> Verdict {
    let t = Instant::now();
    let (phi, cutoff) = (1e4, 16);
    let grid = ChebyshevGrid::new(picard_order(1.0, phi, cutoff).unwrap()).unwrap();
    let solver = PicardSolver::new(1.0, phi, cutoff, &grid, &Sequential).unwrap();
    let spec = ForceSpec::new(ForceFamily::Trig(1), 1.0).unwrap();
    let f = sample_force_field(&spec, cutoff, 1.0, 2, true, &grid).unwrap();
    let f = scale_force(&f, phi.powf(1.0 / 32.0) / force_l2(&f, &grid).unwrap());
    let st = picard_solve(&solver, &f, &PicardConfig { max_iter: 100, tol: 1e-10 }, &Sequential);
    let secs = t.elapsed().as_secs_f64();
    let bound = phi.powf(-7.0 / 12.0);
    match st {
        Ok(st) => {
            let q = st.norms().qv_l2;
            (
                st.converged && st.residual <= 1e-7 && q <= bound && secs <= 300.0,
                format!(
                    "converged {} at j = {}, residual {:.2e} (<= 1e-7), |Qv|_L2 {q:.3e} (<= {bound:.3e}), {secs:.1} s (<= 300 s)",
                    st.converged, st.j, st.residual
                ),
            )
        }
        Err(e) => (false, format!("iteration failed: {e}")),
    }
}

fn uniqueness() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for phi in [10.0, 1e4] {
        let cutoff = 8;
        let grid = ChebyshevGrid::new(picard_order(1.0, phi, cutoff).unwrap()).unwrap();
        let solver = PicardSolver::new(1.0, phi, cutoff, &grid, &Sequential).unwrap();
        let base = solver.params(1);
        let zero_force = FourierField::from_fn(cutoff, 1.0, |_| poiseuille_core::force::ModeForce::zero(&grid)).unwrap();
        let v_star = zero_field(&base, cutoff, &grid).unwrap();
        let threshold = phi.powf(1.0 / 60.0);
        let pert = bump_perturbation(&base, cutoff, 2, 0.5 * threshold, &grid).unwrap();
        let cfg = PicardConfig { max_iter: 100, tol: 1e-10 };
        let rep = uniqueness_probe(&solver, &zero_force, &v_star, &pert, &cfg, &Sequential).unwrap();
        ok &= rep.converged && rep.contraction < 1.0 && (rep.perturbation_v2_h1 - 0.5 * threshold).abs() <= 1e-12 * threshold;
        parts.push(format!(
            "phi {phi:e}: |pert2|_H1 {:.4} = threshold/2, converged {}, contraction {:.2e}",
            rep.perturbation_v2_h1, rep.converged, rep.contraction
        ));
    }
    (ok, parts.join("; "))
}

fn inequality_lab() -> Verdict {
    let rep = run_suite(&SuiteConfig::default(), &Sequential).unwrap();
    let worst = rep.margins.iter().map(|m| m.worst_margin).fold(f64::INFINITY, f64::min);
    let drift = rep.max_drift();
    let names: Vec<String> = rep.observed.iter().map(|o| format!("{} {:.3} (drift {:.3})", o.name, o.full, o.drift())).collect();
    (
        worst >= -1e-9 && drift <= 2.0,
        format!(
            "10^4 samples, worst hard margin {worst:.3e} (>= -1e-9), worst relative {:.3e}; observed {}; max drift {drift:.3} (<= 2)",
            rep.worst_relative_margin(),
            names.join(", ")
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("oracle equivalence", oracle_equivalence),
        ("manufactured solutions", manufactured),
        ("energy identities", energy_identities_hold),
        ("uniform constant in flux", uniform_constant),
        ("spectrum bounded away from zero", spectrum),
        ("boundary-layer decomposition", decomposition),
        ("airy contour bound", airy_contour),
        ("nonlinear regime", nonlinear_regime),
        ("uniqueness probe", uniqueness),
        ("inequality lab", inequality_lab),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let (ok, detail) = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| (false, "panicked".into()));
        if !ok {
            failed += 1;
        }
        println!("{} criterion {:>2} {name}: {detail}", if ok { "PASS" } else { "FAIL" }, k + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
