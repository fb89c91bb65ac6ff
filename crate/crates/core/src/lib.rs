//! Dirichlet problems for complex polyharmonic functions with data on rotated
//! spheres.
//!
//! * [`geom`]: principal-branch complex norms, rotation factors, Lie norm.
//! * [`poly`]: sparse complex polynomials, Laplacians, Almansi expansion,
//!   Pizzetti series, Kelvin transform.
//! * [`quadrature`]: product rules on the unit sphere.
//! * [`dirichlet`]: interior, general-ball and exterior solvers, rotated means.
//! * [`expr`]: expression language for boundary data.
//! * [`verify`]: manufactured-solution and identity suites.

pub mod dirichlet;
pub mod error;
pub mod expr;
pub mod geom;
pub mod poly;
pub mod quadrature;
pub mod verify;

pub use dirichlet::{
    boundary_residual, coefficient_a, rotated_mean, rotated_poisson_kernel, solve_ball, solve_exterior, solve_interior,
    vandermonde_convert, AlmansiWeights, BoundaryData, Conversion, DirichletSolver, HarmonicStack, ProblemSpec,
    ResidualReport,
};
pub use error::{Error, Result};
pub use expr::{parse, parse_with_variable, ExprAst, ExprError};
pub use geom::{csqrt_principal, rotation_factor, ComplexVec, LieBall, RotatedPoint};
pub use num_complex::Complex64;
pub use poly::{almansi_compose, almansi_decompose, kelvin_transform, pizzetti_mean_series, FieldFunction, MultiPoly};
pub use quadrature::{integrate_sphere, surface_area, unit_sphere_rule, QuadratureRule};
