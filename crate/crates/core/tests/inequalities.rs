use num_complex::Complex64 as C64;
use poiseuille_core::inequality_lab::*;
use poiseuille_core::{ChebyshevGrid, Sequential};
use std::f64::consts::PI;

fn sampled(bc: BcClass, grid: &ChebyshevGrid, f: impl Fn(f64) -> [f64; 5]) -> TestFunction {
    let jets: Vec<[f64; 5]> = grid.points().iter().map(|&y| f(y)).collect();
    let values = [0, 1, 2, 3, 4].map(|k| jets.iter().map(|j| C64::new(j[k], 0.0)).collect());
    TestFunction::new("closed form", bc, values, grid).unwrap()
}

fn sine(grid: &ChebyshevGrid) -> TestFunction {
    sampled(BcClass::Dirichlet, grid, |y| {
        let (s, c) = (PI * y).sin_cos();
        [s, PI * c, -PI * PI * s, -PI.powi(3) * c, PI.powi(4) * s]
    })
}

fn parabola(grid: &ChebyshevGrid) -> TestFunction {
    TestFunction::from_recipe(&Recipe::single(Basis::Poly(0), BcClass::Dirichlet), grid).unwrap()
}

#[test]
fn poincare_on_closed_forms() {
    let g = ChebyshevGrid::new(64).unwrap();
    let [p, _, second] = check_poincare(&sine(&g), &g).unwrap();
    assert!((p.lhs - 1.0).abs() < 1e-12 && (p.rhs - PI * PI).abs() < 1e-11);
    assert!((p.margin - (PI * PI - 1.0)).abs() < 1e-11);
    assert!((second.rhs - PI.powi(4)).abs() < 1e-9);
    let [q, interp, _] = check_poincare(&parabola(&g), &g).unwrap();
    assert!((q.lhs - 16.0 / 15.0).abs() < 1e-13 && (q.rhs - 8.0 / 3.0).abs() < 1e-13);
    assert!((interp.rhs - (8.0f64 * 16.0 / 15.0).sqrt()).abs() < 1e-12);
}

#[test]
fn trace_on_parabola() {
    let g = ChebyshevGrid::new(64).unwrap();
    let t = check_trace(&parabola(&g), &g).unwrap();
    assert!((t.upper.lhs - 2.0).abs() < 1e-12 && (t.lower.lhs - 2.0).abs() < 1e-12);
    let rhs = 2.5f64.sqrt() * (8.0f64 / 3.0 * 8.0).powf(0.25);
    assert!((t.upper.rhs - rhs).abs() < 1e-12, "{}", t.upper.rhs);
    assert!(t.upper.rhs > 3.39);
}

#[test]
fn hardy_littlewood_polya_on_closed_forms() {
    let g = ChebyshevGrid::new(64).unwrap();
    let one = TestFunction::from_recipe(&Recipe::single(Basis::Poly(0), BcClass::Free), &g).unwrap();
    let m = check_hlp(&one, &g).unwrap();
    assert!((m.lhs - 2.0).abs() < 1e-13 && (m.rhs - 92.0 * 4.0 / 3.0).abs() < 1e-11);
    let y = TestFunction::from_recipe(&Recipe::single(Basis::Poly(1), BcClass::Free), &g).unwrap();
    let m = check_hlp(&y, &g).unwrap();
    let rhs = 4.0 / 9.0 + 92.0 * 4.0 / 15.0;
    assert!((m.lhs - 2.0 / 3.0).abs() < 1e-13 && (m.rhs - rhs).abs() < 1e-11, "{}", m.rhs);
}

#[test]
fn wrong_boundary_class_is_rejected() {
    let g = ChebyshevGrid::new(32).unwrap();
    let free = TestFunction::from_recipe(&Recipe::single(Basis::Poly(0), BcClass::Free), &g).unwrap();
    assert!(check_poincare(&free, &g).is_err());
    assert!(check_trace(&free, &g).is_err());
    let values = [0, 1, 2, 3, 4].map(|_| g.sample(|_| C64::new(1.0, 0.0)));
    assert!(TestFunction::new("one", BcClass::Dirichlet, values, &g).is_err());
}

#[test]
fn small_suite_holds_and_repeats() {
    let cfg = SuiteConfig { seed: 7, samples: 200, order: 128, reference_samples: 20 };
    let a = run_suite(&cfg, &Sequential).unwrap();
    assert!(a.worst_relative_margin() >= 0.0);
    assert!(a.margins.iter().all(|m| m.worst_margin >= -1e-9));
    assert!(a.max_refinement_change < 1e-10);
    let b = run_suite(&cfg, &Sequential).unwrap();
    assert_eq!(a, b);
}
