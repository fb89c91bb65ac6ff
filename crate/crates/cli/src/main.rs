use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use polyharmonic::verify::{Suite, VerifySettings};
use polyharmonic::QuadratureRule;

mod config;
mod output;
mod run;

use config::{Format, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "polyharmonic", version, about = "Rotated-sphere Dirichlet solver for polyharmonic functions")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "POLYHARMONIC_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output file (written atomically); stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Include wall time in the metadata (makes output run-dependent).
    #[arg(long)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the problem described by a JSON config.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `quadrature_order` from the config.
        #[arg(long)]
        quad_order: Option<usize>,
        /// Overrides the boundary guard `delta`.
        #[arg(long)]
        delta: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run verification suites; exits nonzero if any check fails.
    Verify {
        /// Optional JSON config with kind "verify" (`dim`, `order`, `quadrature_order`, `suite`).
        #[arg(long)]
        config: Option<PathBuf>,
        /// identities | manufactured | exterior-duality | pizzetti | all
        #[arg(long)]
        suite: Option<String>,
        /// Comma-separated dimensions.
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        /// Comma-separated polyharmonic orders.
        #[arg(long, value_delimiter = ',')]
        orders: Option<Vec<usize>>,
        #[arg(long)]
        quad_order: Option<usize>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Write a sphere quadrature rule as CSV (`z1..zn,weight`).
    RuleDump {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        quad_order: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn solve(config: PathBuf, quad_order: Option<usize>, delta: Option<f64>, out: OutputArgs) -> Result<bool> {
    let mut cfg = RunConfig::load(&config)?;
    if let Some(m) = quad_order {
        cfg.quadrature_order = m;
    }
    if let Some(d) = delta {
        cfg.delta = d;
    }
    if let Some(f) = out.format {
        cfg.format = f;
    }
    if let Some(o) = out.output {
        cfg.output = Some(o);
    }
    let report = run::run_solve(&cfg, out.timing)?;
    output::emit(cfg.output.as_deref(), &report.render(cfg.format, cfg.dim)?)?;
    Ok(true)
}

#[allow(clippy::too_many_arguments)]
fn verify(
    config: Option<PathBuf>,
    suite: Option<String>,
    dims: Option<Vec<usize>>,
    orders: Option<Vec<usize>>,
    quad_order: Option<usize>,
    points: Option<usize>,
    seed: Option<u64>,
    out: OutputArgs,
) -> Result<bool> {
    let mut settings = VerifySettings::default();
    let mut suite_name = suite;
    let mut format = Format::Csv;
    let mut path = None;
    if let Some(p) = config {
        let cfg = RunConfig::load(&p)?;
        settings.dims = vec![cfg.dim];
        settings.orders = vec![cfg.order];
        settings.max_identity_order = settings.max_identity_order.max(cfg.order);
        settings.quadrature_order = Some(cfg.quadrature_order);
        suite_name = suite_name.or(cfg.suite);
        format = cfg.format;
        path = cfg.output;
    }
    if let Some(d) = dims {
        settings.dims = d;
    }
    if let Some(o) = orders {
        settings.orders = o;
    }
    if quad_order.is_some() {
        settings.quadrature_order = quad_order;
    }
    if let Some(n) = points {
        settings.points = n;
    }
    if let Some(s) = seed {
        settings.seed = s;
    }
    let suite: Suite = suite_name.as_deref().unwrap_or("all").parse()?;
    let report = run::run_verify(suite, &settings, out.timing)?;
    if let output::Results::Checks(checks) = &report.results {
        for c in checks {
            eprintln!(
                "[{}] {}/{}: residual {:.3e} (tol {:.0e})",
                if c.passed { "PASS" } else { "FAIL" },
                c.suite,
                c.name,
                c.residual,
                c.tolerance
            );
        }
    }
    let passed = report.metadata.passed.unwrap_or(false);
    let bytes = report.render(out.format.unwrap_or(format), 0)?;
    output::emit(out.output.as_deref().or(path.as_deref()), &bytes)?;
    Ok(passed)
}

fn rule_dump(dim: usize, quad_order: usize, path: Option<PathBuf>) -> Result<bool> {
    let rule = QuadratureRule::unit_sphere(dim, quad_order)?;
    let mut buf = Vec::new();
    rule.write_csv(&mut buf).context("writing rule")?;
    output::emit(path.as_deref(), &buf)?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: configuring thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = match cli.command {
        Command::Solve { config, quad_order, delta, out } => solve(config, quad_order, delta, out),
        Command::Verify { config, suite, dims, orders, quad_order, points, seed, out } => {
            verify(config, suite, dims, orders, quad_order, points, seed, out)
        }
        Command::RuleDump { dim, quad_order, output } => rule_dump(dim, quad_order, output),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
