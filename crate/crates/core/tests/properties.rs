use std::f64::consts::PI;

use num_complex::Complex64;
use polyharmonic::dirichlet::{compose_g_representation, sample_directions};
use polyharmonic::geom::{principal_half_power, reflected_distance_square};
use polyharmonic::verify::{random_ball_point, random_harmonic, random_stack, rng};
use polyharmonic::{
    almansi_compose, almansi_decompose, csqrt_principal, parse, pizzetti_mean_series, rotated_mean, rotation_factor,
    vandermonde_convert, BoundaryData, ComplexVec, Conversion, DirichletSolver, FieldFunction, HarmonicStack, MultiPoly,
    ProblemSpec, QuadratureRule, RotatedPoint,
};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(a, b)| c(a, b))
}

fn complex_vec() -> impl Strategy<Value = ComplexVec> {
    prop::collection::vec(complex(), 1..6).prop_map(|v| ComplexVec::new(v).unwrap())
}

fn real_vec() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, 1..6)
}

fn angle() -> impl Strategy<Value = f64> {
    -PI..=PI
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn branch_consistency(z in complex_vec()) {
        let w = z.square();
        let s = csqrt_principal(w);
        prop_assert!((s * s - w).norm() <= 1e-12 * w.norm().max(1e-300));
        prop_assert!(s.re >= 0.0);
    }

    #[test]
    fn rotation_identity(phi in angle(), x in real_vec()) {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let z = ComplexVec::rotated(phi, &x).unwrap();
        prop_assert!((z.cnorm() - rotation_factor(phi) * norm).norm() <= 1e-12 * norm.max(1.0));
        prop_assert!((z.hermitian_norm() - norm).abs() <= 1e-12 * norm.max(1.0));
        prop_assert!((z.lie_norm() - norm).abs() <= 1e-12 * norm.max(1.0));
    }

    #[test]
    fn rotation_factor_is_root_of_double_angle(phi in angle()) {
        prop_assert!((rotation_factor(phi) - csqrt_principal(Complex64::from_polar(1.0, 2.0 * phi))).norm() < 1e-12);
    }

    #[test]
    fn even_power_exactness(z in complex_vec(), half in 1u32..5) {
        let direct = z.square().powu(half);
        prop_assert!((z.cnorm_pow(2 * half) - direct).norm() <= 1e-12 * direct.norm().max(1.0));
    }

    #[test]
    fn odd_power_is_principal_exponential(z in complex_vec(), half in 0i32..4) {
        let w = z.square();
        prop_assume!(w.norm() > 1e-6);
        let m = 2 * half + 1;
        let expected = (w.ln() * (m as f64 / 2.0)).exp();
        prop_assert!((principal_half_power(w, m) - expected).norm() <= 1e-12 * expected.norm().max(1.0));
    }

    #[test]
    fn lie_norm_dominates_hermitian(z in complex_vec()) {
        prop_assert!(z.lie_norm() >= z.hermitian_norm() * (1.0 - 1e-15));
    }

    #[test]
    fn symmetry_lemma(pair in (1usize..6).prop_flat_map(|n| (
        prop::collection::vec(complex(), n),
        prop::collection::vec(complex(), n),
    ))) {
        let x = ComplexVec::new(pair.0).unwrap();
        let y = ComplexVec::new(pair.1).unwrap();
        prop_assume!(x.square().norm() > 1e-3 && y.square().norm() > 1e-3);
        let a = reflected_distance_square(&x, &y).unwrap();
        let b = reflected_distance_square(&y, &x).unwrap();
        prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
        prop_assert!((csqrt_principal(a) - csqrt_principal(b)).norm() <= 1e-6 * a.norm().sqrt().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn canonicalize_is_idempotent(phi in -10.0..10.0f64, x in real_vec()) {
        let p = RotatedPoint::new(phi, x).unwrap();
        let once = p.canonicalize();
        let twice = once.canonicalize();
        prop_assert_eq!(once.angle(), twice.angle());
        prop_assert_eq!(once.base(), twice.base());
        prop_assert!(once.angle() > -PI / 2.0 - 1e-12 && once.angle() <= PI / 2.0 + 1e-12);
        prop_assert!((&once.to_complex() - &p.to_complex()).hermitian_norm() <= 1e-12 * p.base_norm().max(1.0));
        prop_assert_eq!(&once, &p);
    }

    #[test]
    fn identified_representatives_are_equal(phi in -3.0..3.0f64, x in real_vec()) {
        let a = RotatedPoint::new(phi, x.clone()).unwrap();
        let b = RotatedPoint::new(phi + PI, x.iter().map(|v| -v).collect()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn laplacian_is_linear(seed in any::<u64>(), a in complex(), b in complex()) {
        let mut r = rng(seed);
        let n = 2 + (seed % 3) as usize;
        let p = &random_harmonic(n, 4, &mut r) * &MultiPoly::abs2(n).pow(2);
        let q = &random_harmonic(n, 5, &mut r) * &MultiPoly::variable(n, 0);
        let lhs = (&p.scale(a) + &q.scale(b)).laplacian();
        let rhs = &p.laplacian().scale(a) + &q.laplacian().scale(b);
        prop_assert!(lhs.distance(&rhs) <= 1e-12 * lhs.max_coefficient().max(1.0));
    }

    #[test]
    fn almansi_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = 2 + (seed % 2) as usize;
        let p = 1 + (seed % 4) as usize;
        let h = random_stack(n, p, 4, &mut r);
        let u = almansi_compose(&h).unwrap();
        prop_assert!(u.is_polyharmonic_within(p as u32, 1e-9));
        let back = almansi_decompose(&u, p).unwrap();
        for (a, b) in h.iter().zip(&back) {
            prop_assert!(a.distance(b) <= 1e-12 * a.max_coefficient().max(1.0));
            prop_assert!(b.is_harmonic());
        }
        prop_assert!(almansi_compose(&back).unwrap().distance(&u) <= 1e-12 * u.max_coefficient().max(1.0));
    }

    #[test]
    fn pizzetti_agrees_with_rotated_mean(seed in any::<u64>(), radius in 0.1..1.5f64) {
        let mut r = rng(seed);
        let n = 2 + (seed % 3) as usize;
        let p = 1 + (seed % 3) as usize;
        let poly = &random_harmonic(n, 3, &mut r) * &MultiPoly::abs2(n).pow(1 + (seed % 3) as u32);
        let x = random_ball_point(n, 1.0, &mut r);
        let rule = QuadratureRule::unit_sphere(n, 12).unwrap();
        let mean = rotated_mean(&poly.to_field(), &x, radius, p, &rule).unwrap();
        let series = pizzetti_mean_series(&poly, p as u32, &ComplexVec::from_real(&x).unwrap(), radius).unwrap();
        prop_assert!((mean - series).norm() <= 1e-10 * series.norm().max(1.0), "{} vs {}", mean, series);
    }

    #[test]
    fn vandermonde_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = 1 + (seed % 6) as usize;
        let g = HarmonicStack::new(random_stack(2, p, 3, &mut r)).unwrap();
        let h = vandermonde_convert(&g, Conversion::GToH).unwrap();
        let back = vandermonde_convert(&h, Conversion::HToG).unwrap();
        for (a, b) in g.components().iter().zip(back.components()) {
            prop_assert!(a.distance(b) <= 1e-12 * a.max_coefficient().max(1.0));
        }
    }
}

fn random_expression() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (1usize..=3).prop_map(|j| format!("x{j}")),
        (0u32..20).prop_map(|k| format!("{}", k as f64 / 4.0)),
        Just("i".to_string()),
        Just("abs2(x)".to_string()),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a} + {b}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) - ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})*({b})")),
            (inner.clone(), 0u32..4).prop_map(|(a, k)| format!("({a})^{k}")),
            inner.clone().prop_map(|a| format!("-({a})")),
            inner.prop_map(|a| format!("({a})/4")),
        ]
    })
}

fn random_general_expression() -> impl Strategy<Value = String> {
    let funcs = ["exp", "sin", "cos", "sqrt", "re", "im"];
    (random_expression(), prop::sample::select(funcs.to_vec()), random_expression())
        .prop_map(|(a, f, b)| format!("{f}({a}) * -x2^-2 + ({b})^2^1 - normH(x)"))
}

fn complex_point3() -> impl Strategy<Value = ComplexVec> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 3).prop_map(|v| ComplexVec::new(v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn expression_eval_matches_polynomial(src in random_expression(), z in complex_point3()) {
        let ast = parse(&src, 3).unwrap();
        let poly = ast.to_poly().unwrap();
        let a = ast.eval(&z).unwrap();
        let b = poly.eval(&z).unwrap();
        prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0), "{}: {} vs {}", src, a, b);
    }

    #[test]
    fn parse_print_parse(src in prop_oneof![random_expression(), random_general_expression()]) {
        let ast = parse(&src, 3).unwrap();
        let printed = ast.to_string();
        let again = parse(&printed, 3).unwrap();
        prop_assert_eq!(&again, &ast, "{} printed as {}", src, printed);
        prop_assert_eq!(again.to_string(), printed);
    }
}

#[test]
fn trapezoid_exactness() {
    for order in [4usize, 7, 16] {
        let rule = QuadratureRule::unit_sphere(2, order).unwrap();
        for k in 0..order as i32 {
            let cos = rule.integrate(&FieldFunction::new(2, move |z| Ok(Complex64::new(z[1].re.atan2(z[0].re) * k as f64, 0.0).cos()))).unwrap();
            let sin = rule.integrate(&FieldFunction::new(2, move |z| Ok(Complex64::new(z[1].re.atan2(z[0].re) * k as f64, 0.0).sin()))).unwrap();
            let expected = if k == 0 { 2.0 * PI } else { 0.0 };
            assert!((cos.re - expected).abs() <= 1e-12 && sin.norm() <= 1e-12, "order {order} k {k}: {cos} {sin}");
        }
    }
}

#[test]
fn quadrature_convergence_is_monotone() {
    let f = FieldFunction::new(3, |z| Ok(z[0].exp()));
    let reference = QuadratureRule::unit_sphere(3, 64).unwrap().integrate(&f).unwrap();
    let mut previous = f64::INFINITY;
    for order in [1usize, 2, 4, 8] {
        let err = (QuadratureRule::unit_sphere(3, order).unwrap().integrate(&f).unwrap() - reference).norm();
        if previous > 1e-12 {
            assert!(err <= previous / 10.0 || err <= 1e-12, "order {order}: {err:e} after {previous:e}");
        }
        previous = err;
    }
    assert!(previous <= 1e-12);
}

#[test]
fn weights_positive_and_normalized() {
    for n in 2..=6 {
        for order in [1, 3, 8] {
            let rule = QuadratureRule::unit_sphere(n, order).unwrap();
            assert!(rule.weights().iter().all(|w| *w > 0.0));
            let total: f64 = rule.weights().iter().sum();
            let area = polyharmonic::surface_area(n).unwrap();
            assert!((total - area).abs() <= 1e-10 * area);
        }
    }
}

/// Classical Poisson integral written out directly for real points.
fn classical_poisson(f: &FieldFunction, x: &[f64], rule: &QuadratureRule) -> Complex64 {
    let n = x.len();
    let x2: f64 = x.iter().map(|v| v * v).sum();
    let area = polyharmonic::surface_area(n).unwrap();
    let mut acc = Complex64::new(0.0, 0.0);
    for (zeta, w) in rule.iter() {
        let d: f64 = x.iter().zip(zeta).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        acc += w * (1.0 - x2) / d.powi(n as i32) * f.eval_real(zeta).unwrap();
    }
    acc / area
}

#[test]
fn order_one_matches_classical_poisson() {
    let mut r = rng(99);
    for (n, order) in [(2usize, 128usize), (3, 24), (4, 12)] {
        let h = random_harmonic(n, 4, &mut r).to_field();
        let spec = ProblemSpec::unit(n, 1, order).unwrap();
        let solver = DirichletSolver::new(spec.clone()).unwrap();
        let data = BoundaryData::trace_of(&h, &spec).unwrap();
        for _ in 0..5 {
            let x = random_ball_point(n, 0.7, &mut r);
            let u = solver.solve_interior(&data, &[RotatedPoint::real(x.clone()).unwrap()]).unwrap()[0];
            let v = classical_poisson(&h, &x, solver.rule());
            assert!((u - v).norm() <= 1e-12 * v.norm().max(1.0), "n={n}: {u} vs {v}");
        }
    }
}

#[test]
fn solver_is_linear_in_data() {
    let mut r = rng(17);
    for (n, p, order) in [(2usize, 2usize, 64usize), (3, 3, 12)] {
        let spec = ProblemSpec::unit(n, p, order).unwrap();
        let solver = DirichletSolver::new(spec.clone()).unwrap();
        let d1 = BoundaryData::trace_of(&almansi_compose(&random_stack(n, p, 3, &mut r)).unwrap().to_field(), &spec).unwrap();
        let d2 = BoundaryData::new((0..p).map(|k| FieldFunction::new(n, move |z| Ok((z[0] * (k as f64 + 1.0)).exp()))).collect()).unwrap();
        let (a1, a2) = (c(0.3, -1.2), c(-2.0, 0.5));
        let combined = BoundaryData::linear_combination(&[&d1, &d2], &[a1, a2]).unwrap();
        let points: Vec<RotatedPoint> = (0..6).map(|k| RotatedPoint::new(0.4 * k as f64, random_ball_point(n, 0.8, &mut r)).unwrap()).collect();
        let u = solver.solve_interior(&combined, &points).unwrap();
        let u1 = solver.solve_interior(&d1, &points).unwrap();
        let u2 = solver.solve_interior(&d2, &points).unwrap();
        for ((u, u1), u2) in u.iter().zip(u1).zip(u2) {
            let expected = a1 * u1 + a2 * u2;
            assert!((u - expected).norm() <= 1e-12 * expected.norm().max(1.0));
        }
    }
}

#[test]
fn g_representation_reproduces_the_solution() {
    // u = Σ a_k(|x|²) g_k with g = A⁻¹ h agrees with the Almansi form
    let mut r = rng(23);
    for p in 1..=4 {
        let h = random_stack(3, p, 3, &mut r);
        let u = almansi_compose(&h).unwrap();
        let g = vandermonde_convert(&HarmonicStack::new(h).unwrap(), Conversion::HToG).unwrap();
        let v = compose_g_representation(&g).unwrap();
        assert!(u.distance(&v) <= 1e-12 * u.max_coefficient().max(1.0), "p={p}");
    }
}

#[test]
fn rotated_points_match_holomorphic_extension() {
    // a manufactured u is entire, so the solution at e^{iφ}x₀ equals u there
    let mut r = rng(29);
    let u = almansi_compose(&random_stack(2, 2, 3, &mut r)).unwrap();
    let spec = ProblemSpec::unit(2, 2, 256).unwrap();
    let data = BoundaryData::trace_of(&u.to_field(), &spec).unwrap();
    let solver = DirichletSolver::new(spec).unwrap();
    for phi in [0.3, -1.1, PI / 2.0, 2.5] {
        let x = RotatedPoint::new(phi, random_ball_point(2, 0.7, &mut r)).unwrap();
        let got = solver.solve_interior(&data, std::slice::from_ref(&x)).unwrap()[0];
        let expected = u.eval(&x.to_complex()).unwrap();
        assert!((got - expected).norm() <= 1e-8, "φ={phi}: {got} vs {expected}");
    }
}

#[test]
fn residual_improves_toward_the_boundary() {
    let u = MultiPoly::one(2) + &MultiPoly::abs2(2) * &MultiPoly::variable(2, 0);
    let spec = ProblemSpec::unit(2, 2, 4096).unwrap();
    let data = BoundaryData::trace_of(&u.to_field(), &spec).unwrap();
    let solver = DirichletSolver::new(spec).unwrap();
    let r90 = solver.boundary_residual(&data, 0.9, 32).unwrap().max();
    let r999 = solver.boundary_residual(&data, 0.999, 32).unwrap().max();
    assert!(r999 <= r90, "{r999} vs {r90}");
    assert_eq!(sample_directions(3, 5).len(), 5);
}
