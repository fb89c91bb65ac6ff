//! Product quadrature rules on the unit sphere `∂B ⊂ R^n`.
//!
//! * `n = 2`: equispaced trapezoid rule with `order` nodes.
//! * `n = 3`: Gauss–Legendre in `cos θ` (`order` nodes) × trapezoid in azimuth
//!   (`2·order` nodes).
//! * `n ≥ 4`: `ζ = (t, √(1-t²) · η)` with `η ∈ S^{n-2}`, Gauss–Jacobi in `t`
//!   against `(1-t²)^{(n-3)/2}`, recursing down to the `n = 3` rule (inner
//!   circles use `2·order` nodes).
//!
//! Weights are rescaled so that they sum to `ω_n`.

use std::f64::consts::PI;
use std::io;
use std::num::NonZeroUsize;

use gauss_quad::{FiniteAboveNegOneF64, GaussJacobi, GaussLegendre};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::ComplexVec;
use crate::poly::FieldFunction;

/// Γ(n/2) for integer `n ≥ 1`.
fn gamma_half(n: usize) -> f64 {
    let (mut value, mut x) = if n.is_multiple_of(2) { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    while 2.0 * x < n as f64 {
        value *= x;
        x += 1.0;
    }
    value
}

/// `ω_n = 2π^{n/2} / Γ(n/2)`, the area of the unit sphere in `R^n`.
pub fn surface_area(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("sphere dimension must be at least 2, got {n}")));
    }
    Ok(2.0 * PI.powf(n as f64 / 2.0) / gamma_half(n))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereArea {
    pub dim: usize,
    pub value: f64,
}

impl SphereArea {
    pub fn new(dim: usize) -> Result<Self> {
        Ok(Self { dim, value: surface_area(dim)? })
    }
}

/// Sum of complex terms by recursive halving; the result depends only on the
/// order of `terms`.
pub fn pairwise_sum(terms: &[Complex64]) -> Complex64 {
    const LEAF: usize = 8;
    if terms.len() <= LEAF {
        return terms.iter().sum();
    }
    let (a, b) = terms.split_at(terms.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    dim: usize,
    order: usize,
    nodes: Vec<ComplexVec>,
    real_nodes: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

fn circle(count: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let w = 2.0 * PI / count as f64;
    let nodes = (0..count)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / count as f64;
            vec![t.cos(), t.sin()]
        })
        .collect();
    (nodes, vec![w; count])
}

fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    let count = NonZeroUsize::new(order).expect("order checked positive");
    GaussLegendre::new(count).iter().map(|(x, w)| (*x, *w)).collect()
}

/// Nodes and weights for `∫ g(t) (1 - t²)^a dt` on `(-1, 1)`.
fn gauss_jacobi(order: usize, a: f64) -> Vec<(f64, f64)> {
    let count = NonZeroUsize::new(order).expect("order checked positive");
    let a = FiniteAboveNegOneF64::new(a).expect("exponent is at least 1/2");
    GaussJacobi::new(count, a, a).iter().map(|(x, w)| (*x, *w)).collect()
}

fn build(dim: usize, order: usize, top: bool) -> (Vec<Vec<f64>>, Vec<f64>) {
    match dim {
        2 => circle(if top { order } else { 2 * order }),
        3 => {
            let (ring, ring_w) = circle(2 * order);
            let mut nodes = Vec::with_capacity(order * ring.len());
            let mut weights = Vec::with_capacity(order * ring.len());
            for (t, wt) in gauss_legendre(order) {
                let s = (1.0 - t * t).max(0.0).sqrt();
                for (eta, we) in ring.iter().zip(&ring_w) {
                    nodes.push(vec![s * eta[0], s * eta[1], t]);
                    weights.push(wt * we);
                }
            }
            (nodes, weights)
        }
        _ => {
            let (inner, inner_w) = build(dim - 1, order, false);
            let mut nodes = Vec::with_capacity(order * inner.len());
            let mut weights = Vec::with_capacity(order * inner.len());
            for (t, wt) in gauss_jacobi(order, 0.5 * (dim as f64 - 3.0)) {
                let s = (1.0 - t * t).max(0.0).sqrt();
                for (eta, we) in inner.iter().zip(&inner_w) {
                    let mut node = Vec::with_capacity(dim);
                    node.push(t);
                    node.extend(eta.iter().map(|v| s * v));
                    nodes.push(node);
                    weights.push(wt * we);
                }
            }
            (nodes, weights)
        }
    }
}

impl QuadratureRule {
    pub fn unit_sphere(dim: usize, order: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidArgument(format!("sphere dimension must be at least 2, got {dim}")));
        }
        if order == 0 {
            return Err(Error::InvalidArgument("quadrature order must be at least 1".into()));
        }
        let (real_nodes, mut weights) = build(dim, order, true);
        let area = surface_area(dim)?;
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w *= area / total);
        let nodes = real_nodes.iter().map(|x| ComplexVec::from_real(x)).collect::<Result<_>>()?;
        Ok(Self { dim, order, nodes, real_nodes, weights })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn nodes(&self) -> &[ComplexVec] {
        &self.nodes
    }

    pub fn real_nodes(&self) -> &[Vec<f64>] {
        &self.real_nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.real_nodes.iter().map(Vec::as_slice).zip(self.weights.iter().copied())
    }

    /// `Σ w_i F(ζ_i)`, evaluated in parallel and reduced pairwise.
    pub fn integrate(&self, f: &FieldFunction) -> Result<Complex64> {
        if f.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: f.dim() });
        }
        let terms = self
            .nodes
            .par_iter()
            .zip(self.weights.par_iter())
            .map(|(z, w)| f.eval(z).map(|v| v * *w))
            .collect::<Result<Vec<_>>>()?;
        Ok(pairwise_sum(&terms))
    }

    /// Writes one row per node: `z1..zn,weight`.
    pub fn write_csv<W: io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (1..=self.dim).map(|j| format!("z{j}")).collect();
        header.push("weight".into());
        w.write_record(&header)?;
        for (node, weight) in self.iter() {
            let mut row: Vec<String> = node.iter().map(|v| format!("{v:.17e}")).collect();
            row.push(format!("{weight:.17e}"));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn unit_sphere_rule(dim: usize, order: usize) -> Result<QuadratureRule> {
    QuadratureRule::unit_sphere(dim, order)
}

pub fn integrate_sphere(rule: &QuadratureRule, f: &FieldFunction) -> Result<Complex64> {
    rule.integrate(f)
}
