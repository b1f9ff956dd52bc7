use num_complex::Complex64 as C64;
use poiseuille_core::estimates::solve_forced;
use poiseuille_core::force::{ForceFamily, ForceSpec, ModeForce};
use poiseuille_core::mode::{solve_mode_clamped, BcKind, ModeParams, ModeSolution};
use poiseuille_core::nonlinear::{convolve_modes, nonlinear_rhs, project_q, reality_defect, FourierField, ScalarField};
use poiseuille_core::ChebyshevGrid;
use proptest::prelude::*;
use std::f64::consts::PI;

fn cplx() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| C64::new(a, b))
}

fn family() -> impl Strategy<Value = ForceFamily> {
    prop_oneof![
        Just(ForceFamily::Constant),
        (0..4u32).prop_map(ForceFamily::Polynomial),
        (1..4u32).prop_map(ForceFamily::Trig),
        any::<u64>().prop_map(ForceFamily::Random),
    ]
}

fn params() -> impl Strategy<Value = ModeParams> {
    (1..=8i64, 0.5..2.0f64, 0.0..3.0f64).prop_map(|(n, l, e)| ModeParams::new(n, l, 10f64.powf(e)).unwrap())
}

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn max_abs(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn weights_integrate_polynomials((m, k) in (8usize..80).prop_flat_map(|m| (Just(m), 0..=m / 2))) {
        let g = ChebyshevGrid::new(m).unwrap();
        let s: f64 = g.weights().iter().sum();
        prop_assert!((s - 2.0).abs() < 1e-13);
        let v = g.sample_real(|y| y.powi(2 * k as i32));
        let exact = 2.0 / (2 * k + 1) as f64;
        prop_assert!((g.integrate_real(&v).unwrap() - exact).abs() < 1e-13);
    }

    #[test]
    fn nodes_are_ordered_and_symmetric(m in 4usize..200) {
        let g = ChebyshevGrid::new(m).unwrap();
        let p = g.points();
        prop_assert_eq!(p.len(), m + 1);
        prop_assert_eq!(p[0], 1.0);
        prop_assert_eq!(p[m], -1.0);
        for k in 0..=m {
            prop_assert!((p[k] + p[m - k]).abs() < 1e-15);
            if k > 0 {
                prop_assert!(p[k] < p[k - 1]);
            }
        }
    }

    #[test]
    fn differentiation_is_exact_on_polynomials(m in 8usize..48, c in prop::collection::vec(cplx(), 1..8)) {
        let g = ChebyshevGrid::new(m).unwrap();
        let f = |y: f64| c.iter().enumerate().map(|(k, a)| a * y.powi(k as i32)).sum::<C64>();
        let df = |y: f64| c.iter().enumerate().skip(1).map(|(k, a)| a * (k as f64 * y.powi(k as i32 - 1))).sum::<C64>();
        let d = g.diff(&g.sample(f), 1).unwrap();
        prop_assert!(max_diff(&d, &g.sample(df)) < 1e-11);
        let y = 0.2917;
        prop_assert!((g.interpolate(&g.sample(f), y).unwrap() - f(y)).norm() < 1e-12);
    }

    #[test]
    fn solve_is_linear(p in params(), a in cplx(), b in cplx(), fa in family(), fb in family()) {
        let g = ChebyshevGrid::new(p.resolved_order()).unwrap();
        let x = ForceSpec::new(fa, 1.0).unwrap().sample(p.n(), &g);
        let y = ForceSpec::new(fb, 1.0).unwrap().sample(p.n(), &g);
        let comb = ModeForce {
            f1: x.f1.iter().zip(&y.f1).map(|(u, v)| a * u + b * v).collect(),
            f2: x.f2.iter().zip(&y.f2).map(|(u, v)| a * u + b * v).collect(),
        };
        let (sx, _) = solve_forced(&p, &x, &g).unwrap();
        let (sy, _) = solve_forced(&p, &y, &g).unwrap();
        let (sc, _) = solve_forced(&p, &comb, &g).unwrap();
        let expect: Vec<C64> = sx.psi.iter().zip(&sy.psi).map(|(u, v)| a * u + b * v).collect();
        let scale = max_abs(&sx.psi).max(max_abs(&sy.psi)).max(1e-300);
        prop_assert!(max_diff(&sc.psi, &expect) <= 1e-9 * scale);
    }

    #[test]
    fn conjugation_maps_n_to_minus_n(p in params(), fam in family()) {
        let g = ChebyshevGrid::new(p.resolved_order()).unwrap();
        let force = ForceSpec::new(fam, 1.0).unwrap().sample(p.n(), &g);
        let (s, f) = solve_forced(&p, &force, &g).unwrap();
        let fc: Vec<C64> = f.iter().map(|z| z.conj()).collect();
        let t = solve_mode_clamped(&p.with_n(-p.n()), &fc, &g).unwrap();
        let conj: Vec<C64> = s.psi.iter().map(|z| z.conj()).collect();
        prop_assert!(max_diff(&t.psi, &conj) <= 1e-10 * max_abs(&s.psi).max(1e-300));
    }

    #[test]
    fn boundary_conditions_hold(p in params(), fam in family()) {
        let g = ChebyshevGrid::new(p.resolved_order()).unwrap();
        let force = ForceSpec::new(fam, 1.0).unwrap().sample(p.n(), &g);
        let (s, _) = solve_forced(&p, &force, &g).unwrap();
        let scale = max_abs(&s.psi).max(1e-300);
        let m = g.order();
        for k in [0, m] {
            prop_assert!(s.psi[k].norm() <= 1e-12 * scale);
            prop_assert!(s.derivs[0][k].norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn projection_is_idempotent(cutoff in 1usize..6, seed in any::<u64>()) {
        let f = random_scalar(cutoff, 3, seed);
        let q = project_q(&f);
        prop_assert_eq!(project_q(&q), q.clone());
        prop_assert!(q.mode(0).iter().all(|z| *z == C64::new(0.0, 0.0)));
        for n in 1..=cutoff as i64 {
            prop_assert_eq!(q.mode(n), f.mode(n));
            prop_assert_eq!(q.mode(-n), f.mode(-n));
        }
    }

    #[test]
    fn convolution_matches_transform_product(cutoff in 1usize..8, sa in any::<u64>(), sb in any::<u64>()) {
        let (a, b) = (random_scalar(cutoff, 3, sa), random_scalar(cutoff, 3, sb));
        let direct = convolve_modes(&a, &b).unwrap();
        let oracle = transform_product(&a, &b, 64);
        for n in a.indices() {
            prop_assert!(max_diff(direct.mode(n), &oracle[&n]) <= 1e-10, "n={}", n);
        }
    }

    #[test]
    fn convolution_preserves_reality(cutoff in 1usize..6, sa in any::<u64>(), sb in any::<u64>()) {
        let real = |f: ScalarField| FourierField::from_fn(f.cutoff(), f.l(), |n| {
            if n >= 0 { f.mode(n).clone() } else { f.mode(-n).iter().map(|z| z.conj()).collect() }
        }).unwrap();
        let (a, b) = (real(random_scalar(cutoff, 2, sa)), real(random_scalar(cutoff, 2, sb)));
        let a = a.map(|n, v| if n == 0 { v.iter().map(|z| C64::new(z.re, 0.0)).collect() } else { v.clone() });
        let b = b.map(|n, v| if n == 0 { v.iter().map(|z| C64::new(z.re, 0.0)).collect() } else { v.clone() });
        prop_assert!(reality_defect(&convolve_modes(&a, &b).unwrap()) < 1e-14);
    }
}

fn random_scalar(cutoff: usize, len: usize, seed: u64) -> ScalarField {
    let mut state = seed | 1;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    };
    FourierField::from_fn(cutoff, 1.0, |_| (0..len).map(|_| C64::new(next(), next())).collect()).unwrap()
}

/// Pointwise product on `points` equispaced samples of `x`, transformed back.
fn transform_product(a: &ScalarField, b: &ScalarField, points: usize) -> std::collections::BTreeMap<i64, Vec<C64>> {
    let len = a.mode(0).len();
    let xs: Vec<f64> = (0..points).map(|j| 2.0 * PI * j as f64 / points as f64).collect();
    let synth = |f: &ScalarField, x: f64, k: usize| f.iter().map(|(n, v)| v[k] * C64::from_polar(1.0, n as f64 * x)).sum::<C64>();
    let prod: Vec<Vec<C64>> = xs.iter().map(|&x| (0..len).map(|k| synth(a, x, k) * synth(b, x, k)).collect()).collect();
    a.indices()
        .map(|n| {
            let v = (0..len)
                .map(|k| xs.iter().zip(&prod).map(|(&x, p)| p[k] * C64::from_polar(1.0, -(n as f64) * x)).sum::<C64>() / points as f64)
                .collect();
            (n, v)
        })
        .collect()
}

fn velocity_from_polys(cutoff: usize, grid: &ChebyshevGrid, seed: u64) -> FourierField<ModeSolution> {
    let coef = random_scalar(cutoff, 4, seed);
    let base = ModeParams::new(0, 1.0, 50.0).unwrap();
    FourierField::from_fn(cutoff, 1.0, |n| {
        let c = coef.mode(n.abs());
        let c: Vec<C64> = if n < 0 { c.iter().map(|z| z.conj()).collect() } else { c.clone() };
        let c0 = if n == 0 { c.iter().map(|z| C64::new(z.re, 0.0)).collect() } else { c };
        let psi = grid.sample(|y| {
            let w = (1.0 - y * y).powi(2);
            c0.iter().enumerate().map(|(k, a)| a * y.powi(k as i32)).sum::<C64>() * w
        });
        ModeSolution::from_psi(base.with_n(n), BcKind::Clamped, psi, grid).unwrap()
    })
    .unwrap()
}

#[test]
fn nonlinear_term_matches_physical_advection() {
    let grid = ChebyshevGrid::new(32).unwrap();
    for seed in [3u64, 17, 99, 12345] {
        let cutoff = 3;
        let v = velocity_from_polys(cutoff, &grid, seed);
        let nl = nonlinear_rhs(&v).unwrap();
        let points = 64;
        let xs: Vec<f64> = (0..points).map(|j| 2.0 * PI * j as f64 / points as f64).collect();
        let len = grid.len();
        let synth = |pick: &dyn Fn(i64, &ModeSolution, usize) -> C64, x: f64, k: usize| {
            v.iter().map(|(n, s)| pick(n, s, k) * C64::from_polar(1.0, n as f64 * x)).sum::<C64>()
        };
        let i = C64::new(0.0, 1.0);
        let adv: Vec<Vec<C64>> = xs
            .iter()
            .map(|&x| {
                (0..len)
                    .map(|k| {
                        let u1 = synth(&|_, s, k| s.v1[k], x, k);
                        let u2 = synth(&|_, s, k| s.v2[k], x, k);
                        let wx = synth(&|n, s, k| i * (n as f64) * s.omega[k], x, k);
                        let wy = synth(&|n, s, k| s.derivs[2][k] - (n * n) as f64 * s.derivs[0][k], x, k);
                        -(u1 * wx + u2 * wy)
                    })
                    .collect()
            })
            .collect();
        let mut scale = 0.0f64;
        let mut worst = 0.0f64;
        for n in v.indices() {
            let f = nl.mode(n);
            let df1 = grid.diff(&f.f1, 1).unwrap();
            let ours: Vec<C64> = (0..len).map(|k| i * n as f64 * f.f2[k] - df1[k]).collect();
            let oracle: Vec<C64> = (0..len)
                .map(|k| xs.iter().zip(&adv).map(|(&x, a)| a[k] * C64::from_polar(1.0, -(n as f64) * x)).sum::<C64>() / points as f64)
                .collect();
            scale = scale.max(max_abs(&oracle));
            worst = worst.max(max_diff(&ours, &oracle));
        }
        assert!(worst <= 1e-9 * scale.max(1.0), "seed {seed}: {worst:e} vs scale {scale:e}");
    }
}

#[test]
fn nonlinear_term_of_real_field_is_real() {
    let grid = ChebyshevGrid::new(24).unwrap();
    let v = velocity_from_polys(4, &grid, 7);
    let nl = nonlinear_rhs(&v).unwrap();
    assert!(reality_defect(&nl.map(|_, m| m.f1.clone())) < 1e-13);
    assert!(reality_defect(&nl.map(|_, m| m.f2.clone())) < 1e-13);
}
