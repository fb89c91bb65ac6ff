//! Self-verification suites: algebraic identities, manufactured polyharmonic
//! solutions, exterior/Kelvin duality and mean-value/Pizzetti agreement.
//!
//! Manufactured data comes from random harmonic polynomials built as sums of
//! powers `(a·x)^m` of isotropic linear forms (`a·a = 0`), which are harmonic
//! independently of any code under test.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dirichlet::{coefficient_a, rotated_mean, AlmansiWeights, BoundaryData, DirichletSolver, ProblemSpec};
use crate::error::{Error, Result};
use crate::geom::{ComplexVec, RotatedPoint};
use crate::poly::{almansi_compose, kelvin_transform, pizzetti_mean_series, FieldFunction, MultiPoly};
use crate::quadrature::QuadratureRule;

pub const IDENTITY_TOL: f64 = 1e-12;
pub const MANUFACTURED_TOL: f64 = 1e-8;
pub const DUALITY_TOL: f64 = 1e-8;
pub const MEAN_VALUE_TOL: f64 = 1e-8;
pub const PIZZETTI_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Identities,
    Manufactured,
    ExteriorDuality,
    Pizzetti,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identities" => Ok(Suite::Identities),
            "manufactured" => Ok(Suite::Manufactured),
            "exterior-duality" => Ok(Suite::ExteriorDuality),
            "pizzetti" => Ok(Suite::Pizzetti),
            "all" => Ok(Suite::All),
            other => Err(Error::InvalidArgument(format!(
                "unknown suite `{other}` (expected identities, manufactured, exterior-duality, pizzetti or all)"
            ))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Identities => "identities",
            Suite::Manufactured => "manufactured",
            Suite::ExteriorDuality => "exterior-duality",
            Suite::Pizzetti => "pizzetti",
            Suite::All => "all",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(suite: &str, name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self { suite: suite.into(), name: name.into(), residual, tolerance, passed: residual <= tolerance }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}/{}: residual {:.3e} (tol {:.0e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            self.residual,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifySettings {
    pub dims: Vec<usize>,
    pub orders: Vec<usize>,
    /// Overrides the per-dimension defaults (256 for `n = 2`, 128 otherwise).
    pub quadrature_order: Option<usize>,
    pub points: usize,
    pub max_degree: u32,
    pub max_identity_order: usize,
    pub radius: f64,
    pub seed: u64,
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self {
            dims: vec![2, 3],
            orders: vec![1, 2, 3],
            quadrature_order: None,
            points: 20,
            max_degree: 4,
            max_identity_order: 8,
            radius: 0.9,
            seed: 7,
        }
    }
}

impl VerifySettings {
    pub fn quadrature_order_for(&self, dim: usize) -> usize {
        self.quadrature_order.unwrap_or(if dim == 2 { 256 } else { 128 })
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(gaussian(rng), gaussian(rng)) / 2f64.sqrt()
}

/// `a = u + i v` with `u ⟂ v`, `|u| = |v| = 1`, so `a·a = 0`.
fn isotropic_vector(dim: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    loop {
        let u: Vec<f64> = (0..dim).map(|_| gaussian(rng)).collect();
        let mut v: Vec<f64> = (0..dim).map(|_| gaussian(rng)).collect();
        let uu: f64 = u.iter().map(|a| a * a).sum();
        let uv: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
        v.iter_mut().zip(&u).for_each(|(b, a)| *b -= uv / uu * a);
        let vv: f64 = v.iter().map(|a| a * a).sum();
        if uu > 1e-6 && vv > 1e-6 {
            let (nu, nv) = (uu.sqrt(), vv.sqrt());
            return u.iter().zip(&v).map(|(a, b)| Complex64::new(a / nu, b / nv)).collect();
        }
    }
}

/// A random harmonic polynomial of degree at most `degree` with complex coefficients.
pub fn random_harmonic(dim: usize, degree: u32, rng: &mut ChaCha8Rng) -> MultiPoly {
    let mut out = MultiPoly::zero(dim);
    for m in 0..=degree {
        let copies = if m == 0 { 1 } else { 2 };
        for _ in 0..copies {
            let a = isotropic_vector(dim, rng);
            let linear = a.iter().enumerate().fold(MultiPoly::zero(dim), |acc, (j, aj)| acc + MultiPoly::variable(dim, j).scale(*aj));
            out = out + linear.pow(m).scale(complex_gaussian(rng) / f64::from(m + 1));
        }
    }
    out
}

/// A random Almansi stack of `p` harmonic polynomials of degree at most `degree`.
pub fn random_stack(dim: usize, p: usize, degree: u32, rng: &mut ChaCha8Rng) -> Vec<MultiPoly> {
    (0..p).map(|_| random_harmonic(dim, rng.gen_range(0..=degree), rng)).collect()
}

/// A point drawn uniformly from the real ball of the given radius.
pub fn random_ball_point(dim: usize, radius: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let dir = random_direction(dim, rng);
    let r = radius * rng.gen::<f64>().powf(1.0 / dim as f64);
    dir.into_iter().map(|v| r * v).collect()
}

pub fn random_direction(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| gaussian(rng)).collect();
        let r = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if r > 1e-8 {
            return v.into_iter().map(|a| a / r).collect();
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Largest deviation of the concentration identity over `k, l < p`.
pub fn concentration_residual(p: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 0..p {
        let t = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * ((p - k) % p) as f64 / p as f64);
        for l in 0..p {
            let expected = if k == l { p as f64 } else { 0.0 };
            worst = worst.max((coefficient_a(l, p, t)? - expected).norm());
        }
    }
    Ok(worst)
}

/// `max(‖A A⁻¹ - I‖, ‖A⁻¹ - inv(A)‖)` for the closed-form inverse.
pub fn inverse_residual(p: usize) -> Result<f64> {
    let w = AlmansiWeights::new(p)?;
    let closed = w.inverse();
    let product = w.matrix() * &closed - DMatrix::<Complex64>::identity(p, p);
    let direct = w.matrix().clone().try_inverse().ok_or(Error::SingularSystem { rank: 0, unknowns: p })?;
    let worst = |m: DMatrix<Complex64>| m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(worst(product).max(worst(closed - direct)))
}

pub fn identities(settings: &VerifySettings) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for p in 1..=settings.max_identity_order {
        checks.push(Check::new("identities", format!("concentration p={p}"), concentration_residual(p)?, IDENTITY_TOL));
        checks.push(Check::new("identities", format!("vandermonde-inverse p={p}"), inverse_residual(p)?, IDENTITY_TOL));
    }
    Ok(checks)
}

/// Max error of the interior solver against `u` at `count` random points.
pub fn manufactured_error(dim: usize, p: usize, order: usize, u: &MultiPoly, points: &[Vec<f64>]) -> Result<f64> {
    let spec = ProblemSpec::unit(dim, p, order)?;
    let solver = DirichletSolver::new(spec.clone())?;
    let data = BoundaryData::trace_of(&u.to_field(), &spec)?;
    let pts = points.iter().map(|x| RotatedPoint::real(x.clone())).collect::<Result<Vec<_>>>()?;
    let values = solver.solve_interior(&data, &pts)?;
    let mut worst: f64 = 0.0;
    for (x, v) in points.iter().zip(values) {
        worst = worst.max((v - u.eval(&ComplexVec::from_real(x)?)?).norm());
    }
    Ok(worst)
}

pub fn manufactured(settings: &VerifySettings) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut rng = rng(settings.seed);
    for &n in &settings.dims {
        let order = settings.quadrature_order_for(n);
        for &p in &settings.orders {
            let h = random_stack(n, p, settings.max_degree, &mut rng);
            let u = almansi_compose(&h)?;
            let points: Vec<Vec<f64>> = (0..settings.points).map(|_| random_ball_point(n, settings.radius, &mut rng)).collect();
            let err = manufactured_error(n, p, order, &u, &points)?;
            checks.push(Check::new("manufactured", format!("n={n} p={p} order={order}"), err, MANUFACTURED_TOL));
        }
    }
    if settings.dims.contains(&2) {
        let u = MultiPoly::one(2) + &MultiPoly::abs2(2) * &MultiPoly::variable(2, 0);
        let order = settings.quadrature_order_for(2);
        let err = manufactured_error(2, 2, order, &u, &[vec![0.5, 0.0]])?;
        checks.push(Check::new("manufactured", format!("1+|x|^2 x1 at (0.5,0) order={order}"), err, MANUFACTURED_TOL));
    }
    Ok(checks)
}

/// Max of `|solve_exterior(x) - K[v](x)|` with `v` the interior solution.
pub fn exterior_duality_error(dim: usize, p: usize, order: usize, data: &BoundaryData, points: &[Vec<f64>]) -> Result<f64> {
    let spec = ProblemSpec::unit(dim, p, order)?;
    let solver = DirichletSolver::new(spec)?;
    let exterior = solver.solve_exterior(data, points)?;
    let interior = {
        let solver = solver.clone();
        let data = data.clone();
        FieldFunction::new(dim, move |z| {
            let base: Vec<f64> = z.entries().iter().map(|c| c.re).collect();
            Ok(solver.solve_interior(&data, &[RotatedPoint::real(base)?])?[0])
        })
    };
    let kelvin = kelvin_transform(&interior, p as u32, dim)?;
    let mut worst: f64 = 0.0;
    for (x, u) in points.iter().zip(exterior) {
        worst = worst.max((u - kelvin.eval_real(x)?).norm());
    }
    Ok(worst)
}

pub fn random_shell_point(dim: usize, inner: f64, outer: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let r = rng.gen_range(inner..=outer);
    random_direction(dim, rng).into_iter().map(|v| r * v).collect()
}

pub fn exterior_duality(settings: &VerifySettings) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut rng = rng(settings.seed ^ 0xe7);
    for &n in &settings.dims {
        let order = settings.quadrature_order_for(n);
        for &p in &settings.orders {
            let u = almansi_compose(&random_stack(n, p, settings.max_degree, &mut rng))?;
            let spec = ProblemSpec::unit(n, p, order)?;
            let data = BoundaryData::trace_of(&u.to_field(), &spec)?;
            let points: Vec<Vec<f64>> = (0..10).map(|_| random_shell_point(n, 1.2, 3.0, &mut rng)).collect();
            let err = exterior_duality_error(n, p, order, &data, &points)?;
            checks.push(Check::new("exterior-duality", format!("n={n} p={p} order={order}"), err, DUALITY_TOL));
        }
    }
    if settings.dims.contains(&3) {
        let order = settings.quadrature_order_for(3);
        let spec = ProblemSpec::unit(3, 1, order)?;
        let solver = DirichletSolver::new(spec)?;
        let data = BoundaryData::new(vec![FieldFunction::constant(3, Complex64::new(1.0, 0.0))])?;
        let points: Vec<Vec<f64>> = (0..10).map(|_| random_shell_point(3, 1.2, 3.0, &mut rng)).collect();
        let values = solver.solve_exterior(&data, &points)?;
        let err = points
            .iter()
            .zip(values)
            .map(|(x, v)| (v - 1.0 / x.iter().map(|a| a * a).sum::<f64>().sqrt()).norm())
            .fold(0.0, f64::max);
        checks.push(Check::new("exterior-duality", format!("constant data n=3 order={order}"), err, DUALITY_TOL));
    }
    Ok(checks)
}

pub fn pizzetti(settings: &VerifySettings) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut rng = rng(settings.seed ^ 0x9122);
    for &n in &settings.dims {
        let order = settings.quadrature_order.unwrap_or(16);
        let rule = QuadratureRule::unit_sphere(n, order)?;
        for &p in &settings.orders {
            let u = almansi_compose(&random_stack(n, p, settings.max_degree, &mut rng))?;
            let field = u.to_field();
            let mut mean_err: f64 = 0.0;
            let mut series_err: f64 = 0.0;
            for _ in 0..5 {
                let a = random_ball_point(n, 1.0, &mut rng);
                let r = rng.gen_range(0.1..1.0);
                let mean = rotated_mean(&field, &a, r, p, &rule)?;
                mean_err = mean_err.max((mean - u.eval(&ComplexVec::from_real(&a)?)?).norm());

                // a generic (not polyharmonic) polynomial for the series check
                let q = &u + &MultiPoly::abs2(n).pow(p as u32).scale(complex_gaussian(&mut rng));
                let q_mean = rotated_mean(&q.to_field(), &a, r, p, &rule)?;
                let series = pizzetti_mean_series(&q, p as u32, &ComplexVec::from_real(&a)?, r)?;
                series_err = series_err.max((q_mean - series).norm());
            }
            checks.push(Check::new("pizzetti", format!("mean-value n={n} p={p} order={order}"), mean_err, MEAN_VALUE_TOL));
            checks.push(Check::new("pizzetti", format!("series n={n} p={p} order={order}"), series_err, PIZZETTI_TOL));
        }
    }
    Ok(checks)
}

pub fn run(suite: Suite, settings: &VerifySettings) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    if matches!(suite, Suite::Identities | Suite::All) {
        checks.extend(identities(settings)?);
    }
    if matches!(suite, Suite::Manufactured | Suite::All) {
        checks.extend(manufactured(settings)?);
    }
    if matches!(suite, Suite::ExteriorDuality | Suite::All) {
        checks.extend(exterior_duality(settings)?);
    }
    if matches!(suite, Suite::Pizzetti | Suite::All) {
        checks.extend(pizzetti(settings)?);
    }
    Ok(VerifyReport { checks })
}
