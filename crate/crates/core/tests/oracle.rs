mod common;

use common::*;
use num_complex::Complex64 as C64;
use poiseuille_core::airy::airy;
use poiseuille_core::boundary_layer::contour_integral_k;
use poiseuille_core::estimates::{energy_identities, solve_forced};
use poiseuille_core::mode::{solve_mode_clamped, solve_mode_slip, ModeParams};
use poiseuille_core::ChebyshevGrid;

#[test]
fn clamped_solve_matches_finite_differences() {
    for (p, spec) in oracle_cases(20241014, 10) {
        let grid = ChebyshevGrid::new(p.resolved_order()).unwrap();
        let force = spec.sample(p.n(), &grid);
        let (sol, f) = solve_forced(&p, &force, &grid).unwrap();
        let (ys, fd) = fd_clamped_extrapolated(&p, analytic_rhs(spec.family, spec.amplitude, &p), 2000);
        let err = rel_l2(&interpolate_to(&sol.psi, &grid, &ys), &fd);
        assert!(err <= 1e-5, "{p:?} {}: {err:e}", spec.family);
        let id = energy_identities(&sol, &f, &grid).unwrap();
        assert!(id.max() <= 1e-7, "{p:?}: identities {id:?}");
    }
}

#[test]
fn finite_differences_converge_at_second_order() {
    let p = ModeParams::new(3, 1.0, 20.0).unwrap();
    let g = ChebyshevGrid::new(64).unwrap();
    let f = analytic_rhs(poiseuille_core::force::ForceFamily::Trig(1), 1.0, &p);
    let (sol, _) = solve_forced(
        &p,
        &poiseuille_core::force::ForceSpec::new(poiseuille_core::force::ForceFamily::Trig(1), 1.0)
            .unwrap()
            .sample(3, &g),
        &g,
    )
    .unwrap();
    let err = |n: usize| {
        let (ys, v) = fd_clamped(&p, &f, n);
        rel_l2(&v, &interpolate_to(&sol.psi, &g, &ys))
    };
    let ratio = err(199) / err(399);
    assert!((ratio - 4.0).abs() < 0.2, "{ratio}");
}

fn apply(p: &ModeParams, y: f64, d: [f64; 5]) -> C64 {
    let nh = p.n_hat();
    let nh2 = nh * nh;
    let u = 0.75 * p.phi() * (1.0 - y * y);
    let i = C64::new(0.0, 1.0);
    -i * nh * (-1.5 * p.phi()) * d[0] + i * nh * u * (d[2] - nh2 * d[0]) - (d[4] - 2.0 * nh2 * d[2] + nh2 * nh2 * d[0])
}

#[test]
fn manufactured_clamped_solution() {
    let g = ChebyshevGrid::new(64).unwrap();
    for (n, phi) in [(1, 1.0), (2, 10.0), (5, 100.0), (8, 1000.0)] {
        let p = ModeParams::new(n, 1.0, phi).unwrap();
        let exact = |y: f64| (1.0 - y * y).powi(2);
        let f: Vec<C64> = g
            .points()
            .iter()
            .map(|&y| apply(&p, y, [exact(y), -4.0 * y * (1.0 - y * y), 12.0 * y * y - 4.0, 24.0 * y, 24.0]))
            .collect();
        let sol = solve_mode_clamped(&p, &f, &g).unwrap();
        let err = sol.psi.iter().zip(g.points()).map(|(z, &y)| (z - exact(y)).norm()).fold(0.0, f64::max);
        assert!(err <= 1e-8, "n={n} phi={phi}: {err:e}");
    }
}

#[test]
fn manufactured_slip_solution() {
    let g = ChebyshevGrid::new(64).unwrap();
    let pi = std::f64::consts::PI;
    for (n, phi) in [(1, 1.0), (2, 10.0), (5, 100.0), (8, 1000.0)] {
        let p = ModeParams::new(n, 1.0, phi).unwrap();
        let f: Vec<C64> = g
            .points()
            .iter()
            .map(|&y| {
                let (s, c) = (pi * y).sin_cos();
                apply(&p, y, [s, pi * c, -pi * pi * s, -pi.powi(3) * c, pi.powi(4) * s])
            })
            .collect();
        let sol = solve_mode_slip(&p, &f, &g).unwrap();
        let err = sol.psi.iter().zip(g.points()).map(|(z, &y)| (z - (pi * y).sin()).norm()).fold(0.0, f64::max);
        assert!(err <= 1e-8, "n={n} phi={phi}: {err:e}");
    }
}

#[test]
fn airy_matches_real_series() {
    for k in 0..=40 {
        let x = k as f64 * 0.125;
        let v = airy(C64::new(x, 0.0)).unwrap().ai;
        let r = ai_series(x);
        assert!((v.re - r).abs() <= 1e-12 && v.im.abs() <= 1e-12, "x={x}: {v} vs {r}");
    }
}

#[test]
fn contour_integral_at_origin_matches_real_axis() {
    let oracle = ai_integral_real_axis();
    assert!((oracle - 1.0 / 3.0).abs() < 1e-7, "{oracle}");
    let k0 = contour_integral_k(C64::new(0.0, 0.0)).unwrap();
    assert!((k0 - oracle).abs() <= 1e-6, "{k0} vs {oracle}");
}
