//! Dirichlet problems with data on the rotated spheres `e^{kπi/p} ∂B`.
//!
//! For `u` polyharmonic of order `p` on `B`, given its traces
//! `f_k(ζ) := u(e^{kπi/p} ζ)` for `k = 0..p`, the solution is
//!
//! ```text
//! u(x) = 1/(p ω_n) Σ_k ∫_{∂B} (1 - |x|^{2p}) / |e^{-kπi/p} x - ζ|^n  f_k(ζ) dS(ζ)
//! ```
//!
//! where `|·|` is the complex norm. The denominator is evaluated as the single
//! principal power `w^{n/2}` of `w = Σ (e^{-kπi/p} x_j - ζ_j)²`. For `x = e^{iφ}x₀`
//! with real `|x₀| < 1`, `w` factors as `(1 - cλ)(1 - c λ̄)` with `|cλ| < 1`, so
//! it never reaches the branch cut and no continuation is needed.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::{principal_half_power, ComplexVec, RotatedPoint};
use crate::poly::{FieldFunction, MultiPoly};
use crate::quadrature::{pairwise_sum, surface_area, QuadratureRule};

/// Default relative distance from the sphere below which solves refuse.
pub const DEFAULT_GUARD: f64 = 1e-3;

/// Slack on guard comparisons so that e.g. `ρ = 1 - δ` itself is accepted.
const GUARD_SLACK: f64 = 1e-12;

fn unit(angle: f64) -> Complex64 {
    Complex64::from_polar(1.0, angle)
}

/// `e^{2πi m/p}` with the exponent reduced mod `p` first.
fn root_of_unity(m: i64, p: usize) -> Complex64 {
    let r = m.rem_euclid(p as i64) as f64;
    unit(2.0 * PI * r / p as f64)
}

/// Rotation angle `kπ/p` of the `k`-th boundary sphere.
pub fn sphere_angle(k: usize, p: usize) -> f64 {
    k as f64 * PI / p as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub dim: usize,
    pub order: usize,
    pub center: Vec<f64>,
    pub radius: f64,
    pub quadrature_order: usize,
    /// Points must satisfy `|x - a| ≤ r(1 - guard)` (interior) or
    /// `|x| ≥ 1 + guard` (exterior).
    pub guard: f64,
}

impl ProblemSpec {
    /// Unit ball centered at the origin.
    pub fn unit(dim: usize, order: usize, quadrature_order: usize) -> Result<Self> {
        Self::ball(dim, order, vec![0.0; dim], 1.0, quadrature_order)
    }

    pub fn ball(dim: usize, order: usize, center: Vec<f64>, radius: f64, quadrature_order: usize) -> Result<Self> {
        let spec = Self { dim, order, center, radius, quadrature_order, guard: DEFAULT_GUARD };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_guard(mut self, guard: f64) -> Result<Self> {
        self.guard = guard;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidArgument(format!("dimension must be at least 2, got {}", self.dim)));
        }
        if self.order == 0 {
            return Err(Error::InvalidArgument("order p must be at least 1".into()));
        }
        if self.center.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: self.center.len() });
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {}", self.radius)));
        }
        if self.quadrature_order == 0 {
            return Err(Error::InvalidArgument("quadrature order must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.guard) {
            return Err(Error::InvalidArgument(format!("boundary guard must lie in [0, 1), got {}", self.guard)));
        }
        Ok(())
    }

    pub fn is_unit(&self) -> bool {
        self.radius == 1.0 && self.center.iter().all(|c| *c == 0.0)
    }
}

/// Boundary traces: entry `k` maps a real unit `ζ` to `f_k(a + r e^{kπi/p} ζ)`.
#[derive(Debug, Clone)]
pub struct BoundaryData {
    functions: Vec<FieldFunction>,
}

impl BoundaryData {
    pub fn new(functions: Vec<FieldFunction>) -> Result<Self> {
        let first = functions.first().ok_or_else(|| Error::InvalidArgument("boundary data must be nonempty".into()))?;
        let dim = first.dim();
        if let Some(f) = functions.iter().find(|f| f.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: f.dim() });
        }
        Ok(Self { functions })
    }

    /// Traces of `u` on the rotated spheres `a + r e^{kπi/p} ∂B` of `spec`.
    pub fn trace_of(u: &FieldFunction, spec: &ProblemSpec) -> Result<Self> {
        if u.dim() != spec.dim {
            return Err(Error::DimensionMismatch { expected: spec.dim, found: u.dim() });
        }
        let p = spec.order;
        let functions = (0..p)
            .map(|k| {
                let u = u.clone();
                let scale = unit(sphere_angle(k, p)) * spec.radius;
                let center = ComplexVec::from_real(&spec.center)?;
                Ok(FieldFunction::new(spec.dim, move |zeta| u.eval(&(&center + &zeta.scale(scale)))))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(functions)
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.functions[0].dim()
    }

    pub fn functions(&self) -> &[FieldFunction] {
        &self.functions
    }

    /// `Σ c_i data_i`, entry by entry.
    pub fn linear_combination(items: &[&BoundaryData], coeffs: &[Complex64]) -> Result<Self> {
        let p = items.first().map(|d| d.len()).unwrap_or(0);
        let functions = (0..p)
            .map(|k| {
                let parts: Vec<FieldFunction> = items.iter().map(|d| d.functions[k].clone()).collect();
                FieldFunction::linear_combination(&parts, coeffs)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(functions)
    }
}

/// `a_k(t) = Σ_{j<p} e^{2jkπi/p} t^j`.
pub fn coefficient_a(k: usize, p: usize, t: Complex64) -> Result<Complex64> {
    if k >= p {
        return Err(Error::IndexOutOfRange { index: k, order: p });
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut tj = Complex64::new(1.0, 0.0);
    for j in 0..p {
        sum += root_of_unity((j * k) as i64, p) * tj;
        tj *= t;
    }
    Ok(sum)
}

/// The Vandermonde matrix `A = [e^{2klπi/p}]` linking the Almansi components
/// `h` to the `g`-representation, `h = A g`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlmansiWeights {
    order: usize,
    matrix: DMatrix<Complex64>,
}

impl AlmansiWeights {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument("order p must be at least 1".into()));
        }
        let matrix = DMatrix::from_fn(order, order, |k, l| root_of_unity((k * l) as i64, order));
        Ok(Self { order, matrix })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Closed form `A⁻¹ = (1/p) [e^{-2klπi/p}]`.
    pub fn inverse(&self) -> DMatrix<Complex64> {
        let p = self.order;
        DMatrix::from_fn(p, p, |k, l| root_of_unity(-((k * l) as i64), p) / p as f64)
    }

    /// `Π_{k<l} (e^{2lπi/p} - e^{2kπi/p})`.
    pub fn determinant(&self) -> Complex64 {
        let p = self.order;
        let mut det = Complex64::new(1.0, 0.0);
        for l in 0..p {
            for k in 0..l {
                det *= root_of_unity(l as i64, p) - root_of_unity(k as i64, p);
            }
        }
        det
    }
}

/// Values that can be combined linearly, entrywise in a stack.
pub trait StackComponent: Sized + Clone {
    fn combine(items: &[Self], coeffs: &[Complex64]) -> Result<Self>;
}

impl StackComponent for MultiPoly {
    fn combine(items: &[Self], coeffs: &[Complex64]) -> Result<Self> {
        let dim = items.first().map(MultiPoly::dim).ok_or_else(|| Error::InvalidArgument("empty stack".into()))?;
        items.iter().zip(coeffs).try_fold(MultiPoly::zero(dim), |acc, (h, c)| {
            if h.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: h.dim() });
            }
            Ok(acc + h.scale(*c))
        })
    }
}

impl StackComponent for FieldFunction {
    fn combine(items: &[Self], coeffs: &[Complex64]) -> Result<Self> {
        FieldFunction::linear_combination(items, coeffs)
    }
}

/// The `p` harmonic components `h_k` (Almansi) or `g_k` (g-representation).
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicStack<T> {
    components: Vec<T>,
}

impl<T> HarmonicStack<T> {
    pub fn new(components: Vec<T>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument("harmonic stack must be nonempty".into()));
        }
        Ok(Self { components })
    }

    pub fn order(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[T] {
        &self.components
    }

    pub fn into_components(self) -> Vec<T> {
        self.components
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conversion {
    HToG,
    GToH,
}

/// `g = A⁻¹ h` or `h = A g`, applied pointwise to the components.
pub fn vandermonde_convert<T: StackComponent>(stack: &HarmonicStack<T>, direction: Conversion) -> Result<HarmonicStack<T>> {
    let weights = AlmansiWeights::new(stack.order())?;
    let m = match direction {
        Conversion::HToG => weights.inverse(),
        Conversion::GToH => weights.matrix().clone(),
    };
    let components = (0..stack.order())
        .map(|k| {
            let row: Vec<Complex64> = m.row(k).iter().copied().collect();
            T::combine(&stack.components, &row)
        })
        .collect::<Result<Vec<_>>>()?;
    HarmonicStack::new(components)
}

/// `Σ_k a_k(|x|²) g_k`, the polynomial with the given `g`-representation.
pub fn compose_g_representation(g: &HarmonicStack<MultiPoly>) -> Result<MultiPoly> {
    let p = g.order();
    let dim = g.components[0].dim();
    let r2 = MultiPoly::abs2(dim);
    let mut out = MultiPoly::zero(dim);
    for (k, gk) in g.components.iter().enumerate() {
        if gk.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: gk.dim() });
        }
        let mut a = MultiPoly::zero(dim);
        let mut power = MultiPoly::one(dim);
        for j in 0..p {
            a = a + power.scale(root_of_unity((j * k) as i64, p));
            power = &power * &r2;
        }
        out = out + &a * gk;
    }
    Ok(out)
}

/// Kernel `(1 - |x|^{2p}) / |e^{-kπi/p} x - ζ|^n` on the unit ball.
pub fn rotated_poisson_kernel(x: &RotatedPoint, zeta: &[f64], k: usize, spec: &ProblemSpec) -> Result<Complex64> {
    let n = spec.dim;
    if x.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.dim() });
    }
    if zeta.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: zeta.len() });
    }
    if k >= spec.order {
        return Err(Error::IndexOutOfRange { index: k, order: spec.order });
    }
    let norm = x.base_norm();
    if norm >= 1.0 {
        return Err(Error::TooCloseToBoundary { norm, limit: 1.0 });
    }
    Ok(unit_kernel(&x.to_complex(), x.square(), zeta, k, spec.order))
}

fn unit_kernel(z: &ComplexVec, z_square: Complex64, zeta: &[f64], k: usize, p: usize) -> Complex64 {
    let c = unit(-sphere_angle(k, p));
    let w: Complex64 = z.entries().iter().zip(zeta).map(|(zj, s)| {
        let d = c * zj - s;
        d * d
    }).sum();
    (1.0 - z_square.powi(p as i32)) / principal_half_power(w, z.dim() as i32)
}

/// Per-sphere maximum of `|u(ρ e^{kπi/p} ζ_s) - f_k(ζ_s)|` over sampled `ζ_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub rho: f64,
    pub per_sphere: Vec<f64>,
}

impl ResidualReport {
    pub fn max(&self) -> f64 {
        self.per_sphere.iter().copied().fold(0.0, f64::max)
    }
}

/// Deterministic sample directions on the unit sphere.
pub fn sample_directions(dim: usize, count: usize) -> Vec<Vec<f64>> {
    if dim == 2 {
        return (0..count)
            .map(|s| {
                let t = 2.0 * PI * (s as f64 + 0.5) / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed0f5a3d);
    (0..count)
        .map(|_| loop {
            let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
            let r = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if r > 1e-8 {
                break v.into_iter().map(|a| a / r).collect();
            }
        })
        .collect()
}

/// Solver bound to one problem and one cached quadrature rule.
#[derive(Debug, Clone)]
pub struct DirichletSolver {
    spec: ProblemSpec,
    rule: QuadratureRule,
    area: f64,
}

impl DirichletSolver {
    pub fn new(spec: ProblemSpec) -> Result<Self> {
        spec.validate()?;
        let rule = QuadratureRule::unit_sphere(spec.dim, spec.quadrature_order)?;
        Self::with_rule(spec, rule)
    }

    pub fn with_rule(spec: ProblemSpec, rule: QuadratureRule) -> Result<Self> {
        spec.validate()?;
        if rule.dim() != spec.dim {
            return Err(Error::DimensionMismatch { expected: spec.dim, found: rule.dim() });
        }
        let area = surface_area(spec.dim)?;
        Ok(Self { spec, rule, area })
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    /// `w_i f_k(ζ_i)` for every sphere `k` and node `i`.
    fn weighted_data(&self, data: &BoundaryData) -> Result<Vec<Vec<Complex64>>> {
        if data.len() != self.spec.order {
            return Err(Error::DataSizeMismatch { expected: self.spec.order, found: data.len() });
        }
        if data.dim() != self.spec.dim {
            return Err(Error::DimensionMismatch { expected: self.spec.dim, found: data.dim() });
        }
        data.functions
            .iter()
            .map(|f| {
                self.rule
                    .nodes()
                    .par_iter()
                    .zip(self.rule.weights().par_iter())
                    .map(|(z, w)| f.eval(z).map(|v| v * *w))
                    .collect::<Result<Vec<_>>>()
            })
            .collect()
    }

    fn check_interior(&self, offset_norm: f64) -> Result<()> {
        let limit = self.spec.radius * (1.0 - self.spec.guard);
        if offset_norm > limit * (1.0 + GUARD_SLACK) || offset_norm >= self.spec.radius {
            return Err(Error::TooCloseToBoundary { norm: offset_norm, limit });
        }
        Ok(())
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if d != self.spec.dim {
            return Err(Error::DimensionMismatch { expected: self.spec.dim, found: d });
        }
        Ok(())
    }

    /// Unit-ball solve at points `e^{iφ} x₀`. Requires a unit-ball spec.
    pub fn solve_interior(&self, data: &BoundaryData, points: &[RotatedPoint]) -> Result<Vec<Complex64>> {
        if !self.spec.is_unit() {
            return Err(Error::InvalidArgument("interior solve needs the unit ball; use solve_ball".into()));
        }
        for x in points {
            self.check_dim(x.dim())?;
            self.check_interior(x.base_norm())?;
        }
        let weighted = self.weighted_data(data)?;
        let p = self.spec.order;
        let scale = 1.0 / (p as f64 * self.area);
        Ok(points
            .par_iter()
            .map(|x| {
                let z = x.to_complex();
                let z_square = x.square();
                let terms: Vec<Complex64> = (0..p)
                    .flat_map(|k| {
                        let z = &z;
                        self.rule.iter().zip(&weighted[k]).map(move |((zeta, _), fw)| unit_kernel(z, z_square, zeta, k, p) * fw)
                    })
                    .collect();
                pairwise_sum(&terms) * scale
            })
            .collect())
    }

    /// General-ball solve at points `a + e^{iφ} y` where each point's base is
    /// the offset `y` from the center.
    pub fn solve_ball(&self, data: &BoundaryData, points: &[RotatedPoint]) -> Result<Vec<Complex64>> {
        for x in points {
            self.check_dim(x.dim())?;
            self.check_interior(x.base_norm())?;
        }
        let weighted = self.weighted_data(data)?;
        let n = self.spec.dim;
        let p = self.spec.order;
        let r = self.spec.radius;
        let r2p = r.powi(2 * p as i32);
        let scale = 1.0 / (p as f64 * self.area * r.powi(2 * p as i32 - n as i32));
        Ok(points
            .par_iter()
            .map(|x| {
                let y = x.to_complex();
                let numerator = r2p - x.square().powi(p as i32);
                let terms: Vec<Complex64> = (0..p)
                    .flat_map(|k| {
                        let c = unit(-sphere_angle(k, p));
                        let y = &y;
                        self.rule.iter().zip(&weighted[k]).map(move |((zeta, _), fw)| {
                            let w: Complex64 = y.entries().iter().zip(zeta).map(|(yj, s)| {
                                let d = c * yj - r * s;
                                d * d
                            }).sum();
                            numerator / principal_half_power(w, n as i32) * fw
                        })
                    })
                    .collect();
                pairwise_sum(&terms) * scale
            })
            .collect())
    }

    /// Exterior solve at real points with `|x| ≥ 1 + guard`. Requires a unit-ball spec.
    pub fn solve_exterior(&self, data: &BoundaryData, points: &[Vec<f64>]) -> Result<Vec<Complex64>> {
        if !self.spec.is_unit() {
            return Err(Error::InvalidArgument("exterior solve is defined for the unit ball".into()));
        }
        let limit = 1.0 + self.spec.guard;
        for x in points {
            self.check_dim(x.len())?;
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < limit * (1.0 - GUARD_SLACK) || norm <= 1.0 {
                return Err(Error::NotExterior { norm, limit });
            }
        }
        let weighted = self.weighted_data(data)?;
        let n = self.spec.dim;
        let p = self.spec.order;
        let scale = -1.0 / (p as f64 * self.area);
        Ok(points
            .par_iter()
            .map(|x| {
                let x2: f64 = x.iter().map(|v| v * v).sum();
                let numerator = 1.0 - x2.powi(p as i32);
                let terms: Vec<Complex64> = (0..p)
                    .flat_map(|k| {
                        let c = unit(-sphere_angle(k, p));
                        self.rule.iter().zip(&weighted[k]).map(move |((zeta, _), fw)| {
                            let w: Complex64 = zeta.iter().zip(x).map(|(s, xj)| {
                                let d = c * s - xj;
                                d * d
                            }).sum();
                            numerator / principal_half_power(w, n as i32) * fw
                        })
                    })
                    .collect();
                pairwise_sum(&terms) * scale
            })
            .collect())
    }

    /// Residual of the computed solution on the shrunken rotated spheres
    /// `a + ρ r e^{kπi/p} ∂B` against the data.
    pub fn boundary_residual(&self, data: &BoundaryData, rho: f64, samples: usize) -> Result<ResidualReport> {
        if !(0.0..1.0).contains(&rho) {
            return Err(Error::InvalidArgument(format!("ρ must lie in [0, 1), got {rho}")));
        }
        if samples == 0 {
            return Err(Error::InvalidArgument("at least one sample direction is required".into()));
        }
        let p = self.spec.order;
        let r = self.spec.radius;
        let directions = sample_directions(self.spec.dim, samples);
        let mut per_sphere = Vec::with_capacity(p);
        for k in 0..p {
            let points = directions
                .iter()
                .map(|d| RotatedPoint::new(sphere_angle(k, p), d.iter().map(|v| rho * r * v).collect()))
                .collect::<Result<Vec<_>>>()?;
            let values = self.solve_ball(data, &points)?;
            let mut worst: f64 = 0.0;
            for (d, u) in directions.iter().zip(values) {
                let f = data.functions[k].eval_real(d)?;
                worst = worst.max((u - f).norm());
            }
            per_sphere.push(worst);
        }
        Ok(ResidualReport { rho, per_sphere })
    }
}

pub fn solve_interior(spec: &ProblemSpec, data: &BoundaryData, points: &[RotatedPoint]) -> Result<Vec<Complex64>> {
    DirichletSolver::new(spec.clone())?.solve_interior(data, points)
}

pub fn solve_ball(spec: &ProblemSpec, data: &BoundaryData, points: &[RotatedPoint]) -> Result<Vec<Complex64>> {
    DirichletSolver::new(spec.clone())?.solve_ball(data, points)
}

pub fn solve_exterior(spec: &ProblemSpec, data: &BoundaryData, points: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    DirichletSolver::new(spec.clone())?.solve_exterior(data, points)
}

pub fn boundary_residual(spec: &ProblemSpec, data: &BoundaryData, rho: f64, samples: usize) -> Result<ResidualReport> {
    DirichletSolver::new(spec.clone())?.boundary_residual(data, rho, samples)
}

/// `1/(p ω_n) Σ_k Σ_i w_i F(x + e^{kπi/p} r ζ_i)`.
pub fn rotated_mean(f: &FieldFunction, x: &[f64], r: f64, p: usize, rule: &QuadratureRule) -> Result<Complex64> {
    let n = rule.dim();
    if f.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: f.dim() });
    }
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len() });
    }
    if p == 0 {
        return Err(Error::InvalidArgument("order p must be at least 1".into()));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
    }
    let center = ComplexVec::from_real(x)?;
    let terms = (0..p)
        .flat_map(|k| {
            let c = unit(sphere_angle(k, p)) * r;
            let center = &center;
            rule.nodes().iter().zip(rule.weights()).map(move |(zeta, w)| (center + &zeta.scale(c), *w))
        })
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(z, w)| f.eval(&z).map(|v| v * w))
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(&terms) / (p as f64 * surface_area(n)?))
}
