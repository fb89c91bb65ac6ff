//! Complex vectors with principal-branch norm conventions.
//!
//! The "complex norm" `|z| = (Σ z_j²)^{1/2}` is the holomorphic extension of the
//! Euclidean norm. It is complex valued and is not a norm on `C^n`; the square
//! root is always the principal one (cut along the nonpositive real axis).
//! The Hermitian norm `||z||` and the Lie norm `L(z)` are the genuine norms.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::ops::{Add, Index, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance used for equality of rotated points and for the `±π/2` tie-break.
pub const ROTATION_TOL: f64 = 1e-12;

/// Principal square root; negative reals map to the positive imaginary axis
/// regardless of the sign of a zero imaginary part.
pub fn csqrt_principal(w: Complex64) -> Complex64 {
    if w.im == 0.0 {
        if w.re >= 0.0 {
            Complex64::new(w.re.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-w.re).sqrt())
        }
    } else {
        w.sqrt()
    }
}

/// `w^{m/2}` with the principal branch, for any integer `m`.
///
/// Even `m` is an exact integer power. Odd `m` is `w^{(m-1)/2} · √w`, which equals
/// `exp((m/2) Log w)`. Returns 0 for `w = 0` and `m > 0`.
pub fn principal_half_power(w: Complex64, m: i32) -> Complex64 {
    if w == Complex64::new(0.0, 0.0) {
        return match m.cmp(&0) {
            std::cmp::Ordering::Greater => Complex64::new(0.0, 0.0),
            std::cmp::Ordering::Equal => Complex64::new(1.0, 0.0),
            std::cmp::Ordering::Less => Complex64::new(f64::INFINITY, 0.0),
        };
    }
    if m % 2 == 0 {
        w.powi(m / 2)
    } else {
        w.powi((m - 1).div_euclid(2)) * csqrt_principal(w)
    }
}

/// Normalizes an angle to `(-π, π]`.
pub fn normalize_angle(phi: f64) -> f64 {
    let mut a = phi.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    if a <= -PI {
        a += 2.0 * PI;
    }
    a
}

/// `|e^{iφ}|_R`, the principal value of `√(e^{2iφ})`.
pub fn rotation_factor(phi: f64) -> Complex64 {
    let phi = normalize_angle(phi);
    let e = Complex64::from_polar(1.0, phi);
    if phi > -FRAC_PI_2 && phi <= FRAC_PI_2 {
        e
    } else {
        -e
    }
}

/// A point of `C^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVec {
    entries: Vec<Complex64>,
}

impl ComplexVec {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some(i) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { entries })
    }

    pub fn from_real(x: &[f64]) -> Result<Self> {
        Self::new(x.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// `e^{iφ} x` for a real vector `x`.
    pub fn rotated(phi: f64, x: &[f64]) -> Result<Self> {
        let c = Complex64::from_polar(1.0, phi);
        Self::new(x.iter().map(|&v| c * v).collect())
    }

    pub(crate) fn from_entries_unchecked(entries: Vec<Complex64>) -> Self {
        debug_assert!(!entries.is_empty());
        Self { entries }
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); dim])
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { entries: self.entries.iter().map(|z| c * z).collect() }
    }

    /// Bilinear product `Σ z_j w_j` (no conjugation).
    pub fn dot(&self, other: &Self) -> Complex64 {
        self.entries.iter().zip(&other.entries).map(|(a, b)| a * b).sum()
    }

    /// `z·z = Σ z_j²`.
    pub fn square(&self) -> Complex64 {
        self.entries.iter().map(|z| z * z).sum()
    }

    pub fn cnorm(&self) -> Complex64 {
        csqrt_principal(self.square())
    }

    /// `|z|^m` read as the single principal power `(z·z)^{m/2}`.
    pub fn cnorm_pow(&self, m: u32) -> Complex64 {
        principal_half_power(self.square(), m as i32)
    }

    pub fn hermitian_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `L(z)`, with `‖z‖⁴ - |z·z|² = 4 Σ_{j<k} (u_j v_k - u_k v_j)²` for
    /// `z = u + iv` so the inner radical has no cancellation.
    pub fn lie_norm(&self) -> f64 {
        let h2: f64 = self.entries.iter().map(|z| z.norm_sqr()).sum();
        let mut wedge = 0.0;
        for (j, a) in self.entries.iter().enumerate() {
            for b in &self.entries[j + 1..] {
                let m = a.re * b.im - b.re * a.im;
                wedge += m * m;
            }
        }
        (h2 + 2.0 * wedge.sqrt()).sqrt()
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|z| z.im == 0.0)
    }
}

impl Index<usize> for ComplexVec {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.entries[i]
    }
}

impl Add for &ComplexVec {
    type Output = ComplexVec;

    fn add(self, rhs: &ComplexVec) -> ComplexVec {
        assert_eq!(self.dim(), rhs.dim());
        ComplexVec { entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &ComplexVec {
    type Output = ComplexVec;

    fn sub(self, rhs: &ComplexVec) -> ComplexVec {
        assert_eq!(self.dim(), rhs.dim());
        ComplexVec { entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect() }
    }
}

impl fmt::Display for ComplexVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, z) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{z}")?;
        }
        write!(f, ")")
    }
}

/// `Σ (x_j/|x| - |x| y_j)²`, the squared complex distance appearing in the
/// symmetry lemma. Fails when `|x| = 0`.
pub fn reflected_distance_square(x: &ComplexVec, y: &ComplexVec) -> Result<Complex64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), found: y.dim() });
    }
    let nx = x.cnorm();
    if nx == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroNorm);
    }
    Ok(x.entries
        .iter()
        .zip(y.entries())
        .map(|(a, b)| {
            let d = a / nx - nx * b;
            d * d
        })
        .sum())
}

/// A rotated real point `e^{iφ} x`, with `φ ∈ (-π, π]`.
///
/// `(φ, x)` and `(φ ± π, -x)` denote the same point of `C^n`.
#[derive(Debug, Clone)]
pub struct RotatedPoint {
    angle: f64,
    base: Vec<f64>,
}

impl RotatedPoint {
    pub fn new(angle: f64, base: Vec<f64>) -> Result<Self> {
        if base.is_empty() {
            return Err(Error::EmptyVector);
        }
        if !angle.is_finite() {
            return Err(Error::InvalidArgument("rotation angle must be finite".into()));
        }
        if let Some(i) = base.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { angle: normalize_angle(angle), base })
    }

    pub fn real(base: Vec<f64>) -> Result<Self> {
        Self::new(0.0, base)
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    /// Euclidean norm of the real base; equals the Lie norm of the point.
    pub fn base_norm(&self) -> f64 {
        self.base.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn to_complex(&self) -> ComplexVec {
        let c = Complex64::from_polar(1.0, self.angle);
        ComplexVec::from_entries_unchecked(self.base.iter().map(|&v| c * v).collect())
    }

    /// `|z|² = e^{2iφ} |x|²`, computed without a square root.
    pub fn square(&self) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * self.angle) * self.base.iter().map(|v| v * v).sum::<f64>()
    }

    /// Canonical representative: angle in `(-π/2, π/2)`, or at `±π/2` the one
    /// whose base has a nonnegative first nonzero entry.
    pub fn canonicalize(&self) -> Self {
        let mut angle = self.angle;
        let mut base = self.base.clone();
        let flip = |base: &mut Vec<f64>| base.iter_mut().for_each(|v| *v = -*v);
        if angle > FRAC_PI_2 + ROTATION_TOL {
            angle -= PI;
            flip(&mut base);
        } else if angle <= -FRAC_PI_2 - ROTATION_TOL {
            angle += PI;
            flip(&mut base);
        }
        if (angle.abs() - FRAC_PI_2).abs() <= ROTATION_TOL {
            let first_negative = base.iter().find(|v| **v != 0.0).is_some_and(|v| *v < 0.0);
            if first_negative {
                angle = if angle > 0.0 { angle - PI } else { angle + PI };
                flip(&mut base);
            }
        }
        Self { angle, base }
    }
}

impl PartialEq for RotatedPoint {
    fn eq(&self, other: &Self) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let (a, b) = (self.canonicalize(), other.canonicalize());
        (a.angle - b.angle).abs() <= ROTATION_TOL
            && a.base.iter().zip(&b.base).all(|(u, v)| (u - v).abs() <= ROTATION_TOL)
    }
}

/// The Lie ball `LB(0, r) = { z : L(z) < r }`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LieBall {
    radius: f64,
}

impl LieBall {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("Lie ball radius must be positive, got {radius}")));
        }
        Ok(Self { radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn contains(&self, z: &ComplexVec) -> bool {
        z.lie_norm() < self.radius
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn principal_sqrt_examples() {
        assert_eq!(csqrt_principal(c(4.0, 0.0)), c(2.0, 0.0));
        assert_eq!(csqrt_principal(c(-1.0, 0.0)), c(0.0, 1.0));
        assert_eq!(csqrt_principal(c(-1.0, -0.0)), c(0.0, 1.0));
        let r = csqrt_principal(c(0.0, 2.0));
        assert!(close(r, c(1.0, 1.0), 1e-15));
        assert!(close(c(1.0, 1.0) * c(1.0, 1.0), c(0.0, 2.0), 0.0));
    }

    #[test]
    fn complex_norm_examples() {
        let z = ComplexVec::from_real(&[3.0, 4.0]).unwrap();
        assert!(close(z.cnorm(), c(5.0, 0.0), 1e-15));
        let z = ComplexVec::new(vec![c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
        assert!(close(z.cnorm(), c(0.0, 1.0), 1e-15));
        let z = ComplexVec::rotated(PI / 3.0, &[1.0, 2.0, 2.0]).unwrap();
        assert!(close(z.cnorm(), Complex64::from_polar(3.0, PI / 3.0), 1e-14));
    }

    #[test]
    fn complex_norm_power_examples() {
        let z = ComplexVec::new(vec![c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
        assert!(close(z.cnorm_pow(2), c(-1.0, 0.0), 1e-15));
        let z = ComplexVec::from_real(&[0.0, 1.0, 0.0]).unwrap();
        assert!(close(z.cnorm_pow(3), c(1.0, 0.0), 1e-15));
        let z = ComplexVec::rotated(FRAC_PI_2, &[1.0, 0.0]).unwrap();
        assert!(close(z.cnorm_pow(3), c(0.0, -1.0), 1e-15));
        assert_eq!(ComplexVec::zeros(3).unwrap().cnorm_pow(3), c(0.0, 0.0));
    }

    #[test]
    fn odd_power_matches_exp_log_form() {
        let w = c(-0.3, 0.7);
        for m in [-5, -3, -1, 1, 3, 5, 7] {
            let direct = (w.ln() * (m as f64 / 2.0)).exp();
            assert!(close(principal_half_power(w, m), direct, 1e-13), "m={m}");
        }
    }

    #[test]
    fn rotation_factor_examples() {
        assert!(close(rotation_factor(0.0), c(1.0, 0.0), 1e-15));
        assert!(close(rotation_factor(PI), c(1.0, 0.0), 1e-15));
        assert!(close(rotation_factor(-3.0 * PI / 4.0), Complex64::from_polar(1.0, PI / 4.0), 1e-15));
        for phi in [-3.0, -2.0, -1.0, 0.2, 1.57, 2.0, 3.1] {
            let root = csqrt_principal(Complex64::from_polar(1.0, 2.0 * phi));
            assert!(close(rotation_factor(phi), root, 1e-14), "phi={phi}");
        }
    }

    #[test]
    fn hermitian_and_lie_norm_examples() {
        let z = ComplexVec::new(vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert_abs_diff_eq!(z.hermitian_norm(), 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(z.lie_norm(), 2.0, epsilon = 1e-15);
        let x = ComplexVec::from_real(&[1.0, 2.0, 2.0]).unwrap();
        assert_abs_diff_eq!(x.lie_norm(), 3.0, epsilon = 1e-15);
        let r = ComplexVec::rotated(1.1, &[1.0, 2.0, 2.0]).unwrap();
        assert_abs_diff_eq!(r.lie_norm(), 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.hermitian_norm(), 3.0, epsilon = 1e-14);
    }

    #[test]
    fn lie_ball_membership() {
        let ball = LieBall::new(1.0).unwrap();
        assert!(ball.contains(&ComplexVec::rotated(0.7, &[0.5, 0.5]).unwrap()));
        assert!(!ball.contains(&ComplexVec::new(vec![c(0.6, 0.0), c(0.0, 0.6)]).unwrap()));
        assert!(LieBall::new(0.0).is_err());
    }

    #[test]
    fn vector_validation() {
        assert_eq!(ComplexVec::new(vec![]), Err(Error::EmptyVector));
        assert_eq!(ComplexVec::from_real(&[1.0, f64::NAN]), Err(Error::NonFinite(1)));
        assert!(RotatedPoint::new(f64::INFINITY, vec![1.0]).is_err());
    }

    #[test]
    fn canonicalize_examples() {
        let p = RotatedPoint::new(PI, vec![1.0, 0.0]).unwrap().canonicalize();
        assert_abs_diff_eq!(p.angle(), 0.0, epsilon = 1e-15);
        assert_eq!(p.base(), &[-1.0, 0.0]);
        let q = RotatedPoint::new(PI / 4.0, vec![0.3, -0.2]).unwrap();
        let qc = q.canonicalize();
        assert_eq!(qc.angle(), q.angle());
        assert_eq!(qc.base(), q.base());
    }

    #[test]
    fn canonicalize_boundary_tie_break() {
        let a = RotatedPoint::new(FRAC_PI_2, vec![-1.0, 2.0]).unwrap().canonicalize();
        assert_abs_diff_eq!(a.angle(), -FRAC_PI_2, epsilon = 1e-15);
        assert_eq!(a.base(), &[1.0, -2.0]);
        let b = RotatedPoint::new(-FRAC_PI_2, vec![0.0, -3.0]).unwrap().canonicalize();
        assert_abs_diff_eq!(b.angle(), FRAC_PI_2, epsilon = 1e-15);
        assert_eq!(b.base(), &[0.0, 3.0]);
        assert_eq!(
            RotatedPoint::new(FRAC_PI_2, vec![-1.0, 2.0]).unwrap(),
            RotatedPoint::new(-FRAC_PI_2, vec![1.0, -2.0]).unwrap()
        );
    }

    #[test]
    fn equivalent_representations_compare_equal() {
        let a = RotatedPoint::new(0.4, vec![0.1, 0.2]).unwrap();
        let b = RotatedPoint::new(0.4 - PI, vec![-0.1, -0.2]).unwrap();
        assert_eq!(a, b);
        let z = &a.to_complex() - &b.to_complex();
        assert!(z.hermitian_norm() < 1e-15);
        assert_ne!(a, RotatedPoint::new(0.4, vec![-0.1, -0.2]).unwrap());
    }

    #[test]
    fn rotated_square_matches_complex_vector() {
        let p = RotatedPoint::new(2.3, vec![0.3, -0.5, 0.1]).unwrap();
        assert!(close(p.square(), p.to_complex().square(), 1e-15));
    }
}
