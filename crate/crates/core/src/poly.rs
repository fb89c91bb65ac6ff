//! Sparse multivariate polynomials with complex coefficients, plus opaque
//! field functions.
//!
//! Evaluating a [`MultiPoly`] at a complex point is its holomorphic extension,
//! so the same value serves real points, rotated points and Kelvin images.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geom::{principal_half_power, ComplexVec};

/// Relative tolerance for "numerically harmonic" checks on float coefficients.
pub const HARMONIC_TOL: f64 = 1e-9;

/// Coefficients below this fraction of the largest one are dropped after the
/// Almansi solve.
const CLEANUP_TOL: f64 = 1e-14;

type Exponent = Vec<u32>;

#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly {
    dim: usize,
    terms: BTreeMap<Exponent, Complex64>,
}

impl MultiPoly {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1, "polynomial dimension must be positive");
        Self { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        Self::from_terms(dim, [(vec![0; dim], c)]).expect("constant term has length dim")
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Complex64::new(1.0, 0.0))
    }

    /// The coordinate `x_{j+1}` (zero-based index `j`).
    pub fn variable(dim: usize, j: usize) -> Self {
        assert!(j < dim, "variable index out of range");
        let mut e = vec![0; dim];
        e[j] = 1;
        Self::from_terms(dim, [(e, Complex64::new(1.0, 0.0))]).expect("length dim")
    }

    /// `|x|² = Σ x_j²`.
    pub fn abs2(dim: usize) -> Self {
        (0..dim).fold(Self::zero(dim), |acc, j| {
            let mut e = vec![0; dim];
            e[j] = 2;
            acc + Self::from_terms(dim, [(e, Complex64::new(1.0, 0.0))]).expect("length dim")
        })
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs; repeated
    /// exponents are summed and zero coefficients dropped.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponent, Complex64)>,
    {
        let mut p = Self::zero(dim);
        for (e, c) in terms {
            if e.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: e.len() });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Exponent, c: Complex64) {
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if *slot.get() == Complex64::new(0.0, 0.0) {
                    slot.remove();
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], Complex64)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), *c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, e: &[u32]) -> Complex64 {
        self.terms.get(e).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn max_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(self.dim), |acc, _| &acc * self)
    }

    /// Homogeneous component of degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        Self {
            dim: self.dim,
            terms: self.terms.iter().filter(|(e, _)| e.iter().sum::<u32>() == d).map(|(e, c)| (e.clone(), *c)).collect(),
        }
    }

    pub fn eval(&self, z: &ComplexVec) -> Result<Complex64> {
        if z.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: z.dim() });
        }
        Ok(self.eval_entries(z.entries()))
    }

    pub(crate) fn eval_entries(&self, z: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| e.iter().zip(z).fold(*c, |acc, (&k, zj)| acc * zj.powu(k)))
            .sum()
    }

    pub fn laplacian(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, c) in &self.terms {
            for j in 0..self.dim {
                if e[j] >= 2 {
                    let mut f = e.clone();
                    f[j] -= 2;
                    out.add_term(f, c * f64::from(e[j] * (e[j] - 1)));
                }
            }
        }
        out
    }

    pub fn iterated_laplacian(&self, times: u32) -> Self {
        (0..times).fold(self.clone(), |acc, _| acc.laplacian())
    }

    /// Exact test `Δ^p P = 0`.
    pub fn is_polyharmonic(&self, p: u32) -> bool {
        self.iterated_laplacian(p).is_zero()
    }

    /// `Δ^p P = 0` up to `rel_tol` times the size of `Δ^p` applied to the
    /// coefficient magnitudes of `P`, which bounds the rounding in `Δ^p P`.
    pub fn is_polyharmonic_within(&self, p: u32, rel_tol: f64) -> bool {
        let magnitudes = Self {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), Complex64::new(c.norm(), 0.0))).collect(),
        };
        // floored by the coefficient size so isolated rounding-level terms do not set the scale
        let scale = magnitudes.iterated_laplacian(p).max_coefficient().max(self.max_coefficient());
        self.iterated_laplacian(p).max_coefficient() <= rel_tol * scale
    }

    pub fn is_harmonic(&self) -> bool {
        self.is_polyharmonic_within(1, HARMONIC_TOL)
    }

    /// Max coefficientwise distance.
    pub fn distance(&self, other: &Self) -> f64 {
        (self - other).max_coefficient()
    }

    /// Drops coefficients smaller than `rel_tol` times the largest one.
    pub fn cleaned(&self, rel_tol: f64) -> Self {
        let cut = rel_tol * self.max_coefficient();
        Self {
            dim: self.dim,
            terms: self.terms.iter().filter(|(_, c)| c.norm() > cut).map(|(e, c)| (e.clone(), *c)).collect(),
        }
    }

    pub fn to_field(&self) -> FieldFunction {
        let p = self.clone();
        FieldFunction::new(self.dim, move |z| Ok(p.eval_entries(z.entries())))
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;

    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.dim, rhs.dim, "polynomial dimensions differ");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }
}

impl Add for MultiPoly {
    type Output = MultiPoly;

    fn add(self, rhs: MultiPoly) -> MultiPoly {
        &self + &rhs
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;

    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self + &(-rhs)
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;

    fn neg(self) -> MultiPoly {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;

    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.dim, rhs.dim, "polynomial dimensions differ");
        let mut out = MultiPoly::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

fn fmt_coefficient(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        format!("{}*i", c.im)
    } else {
        format!("({} + {}*i)", c.re, c.im)
    }
}

/// Prints in the expression-language syntax, e.g. `0.5*x1^2 + (1 + 2*i)*x2`.
impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.terms.iter().rev().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, k)| **k > 0)
                .map(|(j, k)| if *k == 1 { format!("x{}", j + 1) } else { format!("x{}^{}", j + 1, k) })
                .collect();
            if vars.is_empty() {
                write!(f, "{}", fmt_coefficient(*c))?;
            } else if *c == Complex64::new(1.0, 0.0) {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", fmt_coefficient(*c), vars.join("*"))?;
            }
        }
        Ok(())
    }
}

type Evaluator = dyn Fn(&ComplexVec) -> Result<Complex64> + Send + Sync;

/// A pure map `C^n → C`. Evaluators must be stateless.
#[derive(Clone)]
pub struct FieldFunction {
    dim: usize,
    eval: Arc<Evaluator>,
}

impl FieldFunction {
    pub fn new<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&ComplexVec) -> Result<Complex64> + Send + Sync + 'static,
    {
        Self { dim, eval: Arc::new(f) }
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        Self::new(dim, move |_| Ok(c))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, z: &ComplexVec) -> Result<Complex64> {
        if z.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: z.dim() });
        }
        (self.eval)(z)
    }

    /// Evaluates at a real point.
    pub fn eval_real(&self, x: &[f64]) -> Result<Complex64> {
        self.eval(&ComplexVec::from_real(x)?)
    }

    /// `Σ c_i F_i` as a new field function.
    pub fn linear_combination(items: &[FieldFunction], coeffs: &[Complex64]) -> Result<Self> {
        let dim = items.first().map(|f| f.dim).ok_or_else(|| Error::InvalidArgument("empty combination".into()))?;
        if let Some(f) = items.iter().find(|f| f.dim != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: f.dim });
        }
        let parts: Vec<(Complex64, FieldFunction)> = coeffs.iter().copied().zip(items.iter().cloned()).collect();
        Ok(Self::new(dim, move |z| parts.iter().map(|(c, f)| f.eval(z).map(|v| c * v)).sum()))
    }
}

impl fmt::Debug for FieldFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldFunction").field("dim", &self.dim).finish_non_exhaustive()
    }
}

/// `Σ_k |x|^{2k} h_k`. Every `h_k` must be (numerically) harmonic.
pub fn almansi_compose(h: &[MultiPoly]) -> Result<MultiPoly> {
    let first = h.first().ok_or_else(|| Error::InvalidArgument("Almansi stack must be nonempty".into()))?;
    let dim = first.dim();
    let r2 = MultiPoly::abs2(dim);
    let mut weight = MultiPoly::one(dim);
    let mut out = MultiPoly::zero(dim);
    for (k, hk) in h.iter().enumerate() {
        if hk.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: hk.dim() });
        }
        if !hk.is_harmonic() {
            return Err(Error::NotHarmonic(k));
        }
        out = out + &weight * hk;
        weight = &weight * &r2;
    }
    Ok(out)
}

/// All exponents of total degree exactly `d` in `dim` variables.
fn homogeneous_exponents(dim: usize, d: u32) -> Vec<Exponent> {
    fn rec(dim: usize, left: u32, prefix: &mut Exponent, out: &mut Vec<Exponent>) {
        if prefix.len() == dim - 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=left).rev() {
            prefix.push(k);
            rec(dim, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, d, &mut Vec::with_capacity(dim), &mut out);
    out
}

/// The unique harmonic `h_0..h_{p-1}` with `P = Σ |x|^{2k} h_k`.
///
/// The identity and the harmonicity constraints preserve total degree, so the
/// solve splits into one small dense least-squares system per homogeneous
/// degree of `P`; each system must have full column rank and zero residual.
pub fn almansi_decompose(poly: &MultiPoly, p: usize) -> Result<Vec<MultiPoly>> {
    if p == 0 {
        return Err(Error::InvalidArgument("order p must be at least 1".into()));
    }
    if !poly.is_polyharmonic_within(p as u32, HARMONIC_TOL) {
        return Err(Error::NotPolyharmonic(p));
    }
    let dim = poly.dim();
    let mut h = vec![MultiPoly::zero(dim); p];
    let Some(top) = poly.degree() else {
        return Ok(h);
    };
    let r2 = MultiPoly::abs2(dim);
    let r2_powers: Vec<MultiPoly> = (0..p).scan(MultiPoly::one(dim), |acc, _| {
        let cur = acc.clone();
        *acc = &*acc * &r2;
        Some(cur)
    }).collect();

    for d in 0..=top {
        let target = poly.homogeneous_part(d);
        if target.is_zero() {
            continue;
        }
        // unknowns: coefficients of h_k restricted to degree d - 2k
        let mut unknowns: Vec<(usize, Exponent)> = Vec::new();
        for k in 0..p {
            if 2 * k as u32 <= d {
                for e in homogeneous_exponents(dim, d - 2 * k as u32) {
                    unknowns.push((k, e));
                }
            }
        }
        let rows_identity = homogeneous_exponents(dim, d);
        let mut row_index: BTreeMap<(usize, Exponent), usize> = BTreeMap::new();
        for e in &rows_identity {
            let next = row_index.len();
            row_index.insert((usize::MAX, e.clone()), next);
        }
        for k in 0..p {
            if 2 * k as u32 + 2 <= d {
                for e in homogeneous_exponents(dim, d - 2 * k as u32 - 2) {
                    let next = row_index.len();
                    row_index.insert((k, e), next);
                }
            }
        }
        let mut a = DMatrix::<Complex64>::zeros(row_index.len(), unknowns.len());
        for (col, (k, e)) in unknowns.iter().enumerate() {
            let mono = MultiPoly::from_terms(dim, [(e.clone(), Complex64::new(1.0, 0.0))])?;
            for (img, c) in (&r2_powers[*k] * &mono).terms() {
                a[(row_index[&(usize::MAX, img.to_vec())], col)] += c;
            }
            for (img, c) in mono.laplacian().terms() {
                a[(row_index[&(*k, img.to_vec())], col)] += c;
            }
        }
        let mut b = DVector::<Complex64>::zeros(row_index.len());
        for (e, c) in target.terms() {
            b[row_index[&(usize::MAX, e.to_vec())]] = c;
        }

        // rank from singular values; the solve itself goes through QR, which
        // is markedly more accurate than the complex SVD solve here
        let singular = a.singular_values();
        let eps = singular.max() * 1e-10;
        let rank = singular.iter().filter(|s| **s > eps).count();
        if rank < unknowns.len() {
            return Err(Error::SingularSystem { rank, unknowns: unknowns.len() });
        }
        let qr = a.clone().qr();
        let x = qr
            .r()
            .solve_upper_triangular(&(qr.q().adjoint() * &b))
            .ok_or(Error::SingularSystem { rank, unknowns: unknowns.len() })?;
        let residual = (&a * &x - &b).norm();
        if residual > 1e-9 * b.norm() {
            return Err(Error::NotPolyharmonic(p));
        }
        for ((k, e), c) in unknowns.into_iter().zip(x.iter()) {
            h[k].add_term(e, *c);
        }
    }
    Ok(h.into_iter().map(|hk| hk.cleaned(CLEANUP_TOL)).collect())
}

/// One term of the rotated-sphere mean expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PizzettiTerm {
    pub j: u32,
    /// `1 / (4^{pj} (n/2)_{pj} (pj)!)`
    pub coefficient: f64,
}

/// Rising factorial `(a)_k = a (a+1) ⋯ (a+k-1)`.
pub fn pochhammer(a: f64, k: u32) -> f64 {
    (0..k).map(|i| a + f64::from(i)).product()
}

impl PizzettiTerm {
    pub fn new(j: u32, p: u32, n: usize) -> Self {
        let m = p * j;
        let factorial: f64 = (1..=m).map(f64::from).product();
        let coefficient = 1.0 / (4f64.powi(m as i32) * pochhammer(n as f64 / 2.0, m) * factorial);
        Self { j, coefficient }
    }
}

/// `Σ_j Δ^{pj} P(x) r^{2pj} / (4^{pj} (n/2)_{pj} (pj)!)`; finite for polynomials.
pub fn pizzetti_mean_series(poly: &MultiPoly, p: u32, x: &ComplexVec, r: f64) -> Result<Complex64> {
    if p == 0 {
        return Err(Error::InvalidArgument("order p must be at least 1".into()));
    }
    if x.dim() != poly.dim() {
        return Err(Error::DimensionMismatch { expected: poly.dim(), found: x.dim() });
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut current = poly.clone();
    let mut j = 0;
    while !current.is_zero() {
        let term = PizzettiTerm::new(j, p, poly.dim());
        sum += current.eval_entries(x.entries()) * term.coefficient * r.powi((2 * p * j) as i32);
        current = current.iterated_laplacian(p);
        j += 1;
    }
    Ok(sum)
}

/// `K[F](x) = |x|^{2p-n} F(x / |x|²)` with `|x|² = Σ x_j²` and the principal power.
pub fn kelvin_transform(f: &FieldFunction, p: u32, n: usize) -> Result<FieldFunction> {
    if f.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: f.dim() });
    }
    let inner = f.clone();
    let exponent = 2 * p as i32 - n as i32;
    Ok(FieldFunction::new(n, move |z| {
        let w = z.square();
        if w == Complex64::new(0.0, 0.0) {
            return Err(Error::ZeroNorm);
        }
        let image = z.scale(w.inv());
        Ok(principal_half_power(w, exponent) * inner.eval(&image)?)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn x(dim: usize, j: usize) -> MultiPoly {
        MultiPoly::variable(dim, j)
    }

    /// `1 + |x|² x1` in two dimensions.
    fn manufactured() -> MultiPoly {
        MultiPoly::one(2) + &MultiPoly::abs2(2) * &x(2, 0)
    }

    #[test]
    fn eval_examples() {
        let p = &x(2, 0).pow(2) - &x(2, 1).pow(2);
        let z = ComplexVec::new(vec![c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
        assert!((p.eval(&z).unwrap() - c(-1.0, 0.0)).norm() < 1e-15);
        let z = ComplexVec::rotated(std::f64::consts::FRAC_PI_2, &[1.0, 0.0]).unwrap();
        assert!((x(2, 0).eval(&z).unwrap() - c(0.0, 1.0)).norm() < 1e-15);
        let v = manufactured().eval(&ComplexVec::from_real(&[0.5, 0.0]).unwrap()).unwrap();
        assert_eq!(v, c(1.125, 0.0));
        assert!(x(2, 0).eval(&ComplexVec::from_real(&[1.0]).unwrap()).is_err());
    }

    #[test]
    fn canonical_form_drops_zeros() {
        let p = &x(2, 0) - &x(2, 0);
        assert!(p.is_zero());
        let q = MultiPoly::from_terms(2, [(vec![1, 0], c(2.0, 0.0)), (vec![1, 0], c(-2.0, 0.0)), (vec![0, 1], c(1.0, 0.0))]).unwrap();
        assert_eq!(q.num_terms(), 1);
        assert!(MultiPoly::from_terms(2, [(vec![1], c(1.0, 0.0))]).is_err());
    }

    #[test]
    fn laplacian_examples() {
        let harmonic = &x(2, 0).pow(2) - &x(2, 1).pow(2);
        assert!(harmonic.laplacian().is_zero());
        let p = &MultiPoly::abs2(2) * &x(2, 0);
        assert_eq!(p.laplacian(), x(2, 0).scale(c(8.0, 0.0)));
        for n in 2..=5 {
            let r4 = MultiPoly::abs2(n).pow(2);
            let expected = MultiPoly::abs2(n).scale(c(4.0 * (n as f64 + 2.0), 0.0));
            assert_eq!(r4.laplacian(), expected, "n={n}");
        }
    }

    #[test]
    fn polyharmonic_examples() {
        assert!(x(2, 0).is_polyharmonic(1));
        assert!(!MultiPoly::abs2(3).is_polyharmonic(1));
        assert!((&MultiPoly::abs2(2) * &x(2, 0)).is_polyharmonic(2));
        assert!(!MultiPoly::abs2(2).pow(2).is_polyharmonic(2));
    }

    #[test]
    fn compose_examples() {
        let u = almansi_compose(&[MultiPoly::one(2), x(2, 0)]).unwrap();
        assert_eq!(u, manufactured());
        let h0 = &x(3, 0) * &x(3, 1);
        assert_eq!(almansi_compose(std::slice::from_ref(&h0)).unwrap(), h0);
        assert_eq!(almansi_compose(&[MultiPoly::one(2), MultiPoly::abs2(2)]), Err(Error::NotHarmonic(1)));
        assert!(matches!(almansi_compose(&[MultiPoly::one(2), MultiPoly::one(3)]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn decompose_square_coordinate() {
        let h = almansi_decompose(&x(2, 0).pow(2), 2).unwrap();
        let h0 = (&x(2, 0).pow(2) - &x(2, 1).pow(2)).scale(c(0.5, 0.0));
        assert!(h[0].distance(&h0) < 1e-14, "{}", h[0]);
        assert!(h[1].distance(&MultiPoly::constant(2, c(0.5, 0.0))) < 1e-14, "{}", h[1]);
    }

    #[test]
    fn decompose_examples() {
        let harmonic = &x(3, 0) * &x(3, 2);
        let h = almansi_decompose(&harmonic, 1).unwrap();
        assert!(h[0].distance(&harmonic) < 1e-14);
        let h = almansi_decompose(&manufactured(), 2).unwrap();
        assert!(h[0].distance(&MultiPoly::one(2)) < 1e-14);
        assert!(h[1].distance(&x(2, 0)) < 1e-14);
        assert_eq!(almansi_decompose(&MultiPoly::abs2(2), 1), Err(Error::NotPolyharmonic(1)));
        assert_eq!(almansi_decompose(&MultiPoly::zero(2), 3).unwrap(), vec![MultiPoly::zero(2); 3]);
    }

    #[test]
    fn decompose_with_more_components_than_degree() {
        // order 4 but degree 1: upper components vanish
        let h = almansi_decompose(&x(3, 1), 4).unwrap();
        assert!(h[0].distance(&x(3, 1)) < 1e-14);
        assert!(h[1..].iter().all(MultiPoly::is_zero));
    }

    #[test]
    fn pizzetti_examples() {
        let origin = ComplexVec::zeros(2).unwrap();
        let k = MultiPoly::constant(2, c(2.5, -1.0));
        assert_eq!(pizzetti_mean_series(&k, 1, &origin, 0.7).unwrap(), c(2.5, -1.0));
        let v = pizzetti_mean_series(&MultiPoly::abs2(2), 1, &origin, 0.3).unwrap();
        assert!((v - c(0.09, 0.0)).norm() < 1e-15);
        let v = pizzetti_mean_series(&(&MultiPoly::abs2(2) * &x(2, 0)), 2, &origin, 0.9).unwrap();
        assert_eq!(v, c(0.0, 0.0));
    }

    #[test]
    fn pizzetti_term_coefficients() {
        assert_eq!(PizzettiTerm::new(0, 3, 5).coefficient, 1.0);
        // p=1, n=2, j=1: 1/(4·1·1)
        assert_eq!(PizzettiTerm::new(1, 1, 2).coefficient, 0.25);
        // p=2, n=3, j=1: 1/(16 · (3/2)(5/2) · 2)
        assert!((PizzettiTerm::new(1, 2, 3).coefficient - 1.0 / 120.0).abs() < 1e-16);
        assert_eq!(pochhammer(1.5, 0), 1.0);
    }

    #[test]
    fn kelvin_examples() {
        let one = FieldFunction::constant(2, c(1.0, 0.0));
        let k = kelvin_transform(&one, 1, 2).unwrap();
        assert_eq!(k.eval_real(&[0.3, -2.0]).unwrap(), c(1.0, 0.0));

        let k = kelvin_transform(&x(3, 0).to_field(), 1, 3).unwrap();
        let p = [0.4, -1.2, 0.7];
        let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((k.eval_real(&p).unwrap() - c(p[0] / norm.powi(3), 0.0)).norm() < 1e-15);
        assert_eq!(k.eval_real(&[0.0, 0.0, 0.0]), Err(Error::ZeroNorm));
        assert!(kelvin_transform(&one, 1, 3).is_err());
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(manufactured().to_string(), "x1^3 + x1*x2^2 + 1");
        assert_eq!(MultiPoly::zero(2).to_string(), "0");
        assert_eq!(x(2, 1).scale(c(0.0, -2.0)).to_string(), "-2*i*x2");
    }
}
