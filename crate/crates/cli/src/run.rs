//! Solver orchestration for the `solve` and `verify` subcommands.

use std::time::Instant;

use anyhow::{bail, Context, Result};
use polyharmonic::verify::{self, Suite, VerifySettings};
use polyharmonic::{
    almansi_decompose, parse, parse_with_variable, rotated_mean, surface_area, BoundaryData, Complex64, DirichletSolver,
    FieldFunction, ProblemSpec, QuadratureRule, RotatedPoint,
};

use crate::config::{Kind, RunConfig};
use crate::output::{CheckResult, ComponentResult, Metadata, PointResult, Results, RunReport};

fn boundary_data(config: &RunConfig) -> Result<BoundaryData> {
    let functions = config
        .boundary
        .iter()
        .enumerate()
        .map(|(k, src)| {
            parse_with_variable(src, config.dim, 'z')
                .map(|ast| ast.to_field())
                .with_context(|| format!("invalid config field `boundary[{k}]`"))
        })
        .collect::<Result<Vec<FieldFunction>>>()?;
    Ok(BoundaryData::new(functions)?)
}

fn field(config: &RunConfig) -> Result<polyharmonic::ExprAst> {
    let src = config.field.as_deref().context("invalid config field `field`: missing")?;
    parse(src, config.dim).context("invalid config field `field`")
}

fn point_rows(points: &[(Vec<f64>, f64)], values: Vec<Complex64>) -> Results {
    Results::Points(
        points
            .iter()
            .zip(values)
            .map(|((x, angle), v)| PointResult { point: x.clone(), angle: *angle, re: v.re, im: v.im })
            .collect(),
    )
}

pub fn run_solve(config: &RunConfig, timing: bool) -> Result<RunReport> {
    config.validate()?;
    let start = Instant::now();
    let points = config.grid.as_ref().map(|g| g.expand()).unwrap_or_default();
    let spec = ProblemSpec::ball(config.dim, config.order, config.center(), config.radius, config.quadrature_order)?
        .with_guard(config.delta)?;
    // the echo describes what was computed, not where it was written
    let echo = RunConfig { output: None, ..config.clone() };
    let mut metadata = Metadata {
        config: Some(echo),
        quadrature_order: Some(config.quadrature_order),
        quadrature_nodes: None,
        omega_n: Some(surface_area(config.dim)?),
        suite: None,
        passed: None,
        wall_time_seconds: None,
    };

    let results = match config.kind {
        Kind::Interior | Kind::Ball | Kind::Exterior => {
            let data = boundary_data(config)?;
            let solver = DirichletSolver::new(spec)?;
            metadata.quadrature_nodes = Some(solver.rule().len());
            let values = match config.kind {
                Kind::Exterior => {
                    let xs: Vec<Vec<f64>> = points.iter().map(|(x, _)| x.clone()).collect();
                    solver.solve_exterior(&data, &xs)?
                }
                _ => {
                    let center = config.center();
                    let rotated = points
                        .iter()
                        .map(|(x, angle)| RotatedPoint::new(*angle, x.iter().zip(&center).map(|(v, a)| v - a).collect()))
                        .collect::<polyharmonic::Result<Vec<_>>>()?;
                    solver.solve_ball(&data, &rotated)?
                }
            };
            point_rows(&points, values)
        }
        Kind::Mean => {
            if let Some((i, _)) = points.iter().enumerate().find(|(_, (_, a))| *a != 0.0) {
                bail!("invalid config field `grid`: mean centers must be real (point {i} has a rotation angle)");
            }
            let f = field(config)?.to_field();
            let rule = QuadratureRule::unit_sphere(config.dim, config.quadrature_order)?;
            metadata.quadrature_nodes = Some(rule.len());
            let values = points
                .iter()
                .map(|(x, _)| rotated_mean(&f, x, config.radius, config.order, &rule))
                .collect::<polyharmonic::Result<Vec<_>>>()?;
            point_rows(&points, values)
        }
        Kind::Decompose => {
            let poly = field(config)?.to_poly().context("invalid config field `field`")?;
            let parts = almansi_decompose(&poly, config.order)?;
            metadata.quadrature_order = None;
            metadata.omega_n = None;
            Results::Components(parts.iter().enumerate().map(|(k, h)| ComponentResult { k, polynomial: h.to_string() }).collect())
        }
        Kind::Verify => bail!("invalid config field `kind`: use the `verify` subcommand for verification runs"),
    };
    if timing {
        metadata.wall_time_seconds = Some(start.elapsed().as_secs_f64());
    }
    Ok(RunReport { metadata, results })
}

pub fn run_verify(suite: Suite, settings: &VerifySettings, timing: bool) -> Result<RunReport> {
    let start = Instant::now();
    let report = verify::run(suite, settings)?;
    let results = report
        .checks
        .iter()
        .map(|c| CheckResult {
            suite: c.suite.clone(),
            name: c.name.clone(),
            residual: c.residual,
            tolerance: c.tolerance,
            passed: c.passed,
        })
        .collect();
    Ok(RunReport {
        metadata: Metadata {
            config: None,
            quadrature_order: settings.quadrature_order,
            quadrature_nodes: None,
            omega_n: None,
            suite: Some(suite.to_string()),
            passed: Some(report.passed()),
            wall_time_seconds: timing.then(|| start.elapsed().as_secs_f64()),
        },
        results: Results::Checks(results),
    })
}
