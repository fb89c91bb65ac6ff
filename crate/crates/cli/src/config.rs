//! Run configuration: a single JSON document.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Interior,
    Ball,
    Exterior,
    Mean,
    Decompose,
    Verify,
}

impl Kind {
    pub fn needs_boundary(self) -> bool {
        matches!(self, Kind::Interior | Kind::Ball | Kind::Exterior)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// An evaluation point: bare coordinates or `{"x": [...], "angle": φ}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Bare(Vec<f64>),
    Rotated {
        x: Vec<f64>,
        #[serde(default)]
        angle: f64,
    },
}

impl PointSpec {
    pub fn coords(&self) -> &[f64] {
        match self {
            PointSpec::Bare(x) | PointSpec::Rotated { x, .. } => x,
        }
    }

    pub fn angle(&self) -> f64 {
        match self {
            PointSpec::Bare(_) => 0.0,
            PointSpec::Rotated { angle, .. } => *angle,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cartesian {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Number of samples per axis (endpoints included).
    pub steps: Vec<usize>,
    #[serde(default)]
    pub angle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Grid {
    Points(Vec<PointSpec>),
    Cartesian(Cartesian),
}

impl Grid {
    /// Expands to `(coordinates, angle)` pairs in row-major order (last axis fastest).
    pub fn expand(&self) -> Vec<(Vec<f64>, f64)> {
        match self {
            Grid::Points(points) => points.iter().map(|p| (p.coords().to_vec(), p.angle())).collect(),
            Grid::Cartesian(c) => {
                let axes: Vec<Vec<f64>> = c
                    .lower
                    .iter()
                    .zip(&c.upper)
                    .zip(&c.steps)
                    .map(|((&lo, &hi), &m)| match m {
                        0 => Vec::new(),
                        1 => vec![lo],
                        _ => (0..m).map(|i| lo + (hi - lo) * i as f64 / (m - 1) as f64).collect(),
                    })
                    .collect();
                let mut out: Vec<Vec<f64>> = vec![Vec::new()];
                for axis in &axes {
                    out = out.into_iter().flat_map(|prefix| axis.iter().map(move |v| [prefix.clone(), vec![*v]].concat())).collect();
                }
                out.into_iter().map(|x| (x, c.angle)).collect()
            }
        }
    }
}

fn default_radius() -> f64 {
    1.0
}

fn default_delta() -> f64 {
    polyharmonic::dirichlet::DEFAULT_GUARD
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub kind: Kind,
    pub dim: usize,
    pub order: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default = "default_radius")]
    pub radius: f64,
    pub quadrature_order: usize,
    /// One expression in `z1..zn` per rotated sphere (solve kinds).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub boundary: Vec<String>,
    /// Expression in `x1..xn` (mean and decompose kinds).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn center(&self) -> Vec<f64> {
        self.center.clone().unwrap_or_else(|| vec![0.0; self.dim])
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            bail!("invalid config field `dim`: must be at least 2, got {}", self.dim);
        }
        if self.order < 1 {
            bail!("invalid config field `order`: must be at least 1");
        }
        if self.quadrature_order < 1 {
            bail!("invalid config field `quadrature_order`: must be at least 1");
        }
        if !(self.delta > 0.0 && self.delta < 0.5) {
            bail!("invalid config field `delta`: must lie in (0, 0.5), got {}", self.delta);
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            bail!("invalid config field `radius`: must be positive, got {}", self.radius);
        }
        if let Some(c) = &self.center {
            if c.len() != self.dim || c.iter().any(|v| !v.is_finite()) {
                bail!("invalid config field `center`: expected {} finite coordinates, got {}", self.dim, c.len());
            }
        }
        if matches!(self.kind, Kind::Interior | Kind::Exterior) && (self.radius != 1.0 || self.center().iter().any(|v| *v != 0.0)) {
            bail!("invalid config field `center`/`radius`: kind {:?} is posed on the unit ball; use kind \"ball\"", self.kind);
        }
        if self.kind.needs_boundary() && self.boundary.len() != self.order {
            bail!(
                "invalid config field `boundary`: expected {} expressions (one per rotated sphere), got {}",
                self.order,
                self.boundary.len()
            );
        }
        if matches!(self.kind, Kind::Mean | Kind::Decompose) && self.field.is_none() {
            bail!("invalid config field `field`: required for kind {:?}", self.kind);
        }
        if self.kind != Kind::Decompose && self.kind != Kind::Verify {
            let points = self.grid.as_ref().map(Grid::expand).unwrap_or_default();
            if points.is_empty() {
                bail!("invalid config field `grid`: at least one evaluation point is required");
            }
            if let Some(Grid::Cartesian(c)) = &self.grid {
                if c.lower.len() != self.dim || c.upper.len() != self.dim || c.steps.len() != self.dim {
                    bail!("invalid config field `grid`: cartesian bounds and steps must have {} entries", self.dim);
                }
            }
            for (i, (x, angle)) in points.iter().enumerate() {
                if x.len() != self.dim || x.iter().any(|v| !v.is_finite()) || !angle.is_finite() {
                    bail!("invalid config field `grid`: point {i} must have {} finite coordinates and a finite angle", self.dim);
                }
                if self.kind == Kind::Exterior && *angle != 0.0 {
                    bail!("invalid config field `grid`: exterior points must be real (point {i} has angle {angle})");
                }
            }
        }
        Ok(())
    }
}
