//! JSON run configuration shared by the command-line subcommands.
//!
//! ```json
//! {
//!   "system": { "kind": "model", "name": "crossing3" },
//!   "solver": { "energy_tol": 1e-10 },
//!   "coordinates": { "kind": "subset", "base": [0, 0, 0.2], "free": [0, 1] },
//!   "point": [0.4, 0.3],
//!   "grid": { "kind": "line", "from": [-0.5, 0.03], "to": [0.5, 0.03], "points": 20 },
//!   "ci_search": { "gap_tol": 1e-6 },
//!   "meci": { "eta": 0.25 }
//! }
//! ```
//!
//! Everything except `system` is optional. See `docs/formats.md`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{line_grid, CiSearchOptions, CoordinateMap, IntegralSource, MeciOptions};
use crate::integrals::{FileSource, ModelSystem};
use crate::savqe::SaOoVqeOptions;

/// Where the integrals come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemConfig {
    Model {
        name: String,
    },
    /// Per-geometry directory layout; relative roots resolve against the
    /// config file's directory.
    Files {
        root: PathBuf,
        n_frozen: usize,
        n_active: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GridConfig {
    /// Evenly spaced, both ends included.
    Line { from: Vec<f64>, to: Vec<f64>, points: usize },
    Points { points: Vec<Vec<f64>> },
}

impl GridConfig {
    pub fn points(&self) -> Vec<Vec<f64>> {
        match self {
            GridConfig::Line { from, to, points } => line_grid(from, to, *points),
            GridConfig::Points { points } => points.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemConfig,
    #[serde(default)]
    pub solver: SaOoVqeOptions,
    /// Defaults to every source coordinate.
    #[serde(default)]
    pub coordinates: Option<CoordinateMap>,
    /// Single point, or the start of a search.
    #[serde(default)]
    pub point: Option<Vec<f64>>,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub ci_search: CiSearchOptions,
    #[serde(default)]
    pub meci: MeciOptions,
}

/// An opened integral source.
pub enum Source {
    Model(ModelSystem),
    Files(FileSource),
}

impl Source {
    pub fn as_dyn(&self) -> &dyn IntegralSource {
        match self {
            Source::Model(m) => m,
            Source::Files(f) => f,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string())
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(config_err)
    }

    /// Read, parse, and resolve relative paths against the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        if let SystemConfig::Files { root, .. } = &mut cfg.system {
            if root.is_relative() {
                *root = path.parent().unwrap_or(Path::new(".")).join(&*root);
            }
        }
        Ok(cfg)
    }

    /// Open the integral source. A missing or malformed file tree is an
    /// I/O or format error, not a configuration error.
    pub fn open_source(&self) -> Result<Source> {
        match &self.system {
            SystemConfig::Model { name } => ModelSystem::get(name).map(Source::Model).map_err(config_err),
            SystemConfig::Files { root, n_frozen, n_active } => FileSource::open(root, *n_frozen, *n_active).map(Source::Files),
        }
    }

    pub fn map(&self, source: &dyn IntegralSource) -> Result<CoordinateMap> {
        let map = self.coordinates.clone().unwrap_or_else(|| CoordinateMap::all(source.n_coords()));
        map.check(source).map_err(config_err)?;
        Ok(map)
    }

    /// The `point` entry, checked against the map.
    pub fn point(&self, map: &CoordinateMap) -> Result<Vec<f64>> {
        let p = self.point.clone().ok_or_else(|| Error::Config("this subcommand needs `point`".into()))?;
        check_len(&p, map)?;
        Ok(p)
    }

    /// Grid points, or the single `point` when no grid is given.
    pub fn grid(&self, map: &CoordinateMap) -> Result<Vec<Vec<f64>>> {
        let pts = match &self.grid {
            Some(g) => g.points(),
            None => vec![self.point(map)?],
        };
        if pts.is_empty() {
            return Err(Error::Config("empty grid".into()));
        }
        for p in &pts {
            check_len(p, map)?;
        }
        Ok(pts)
    }

    /// Checks that need no integrals.
    pub fn validate(&self) -> Result<()> {
        self.solver.ensemble.validate().map_err(config_err)?;
        if !self.solver.ensemble.equal_weights() {
            return Err(Error::Config("state resolution needs equal weights".into()));
        }
        let positive = [
            ("solver.energy_tol", self.solver.energy_tol),
            ("solver.circuit_grad_tol", self.solver.circuit_grad_tol),
            ("solver.orbital_grad_tol", self.solver.orbital_grad_tol),
            ("ci_search.initial_step", self.ci_search.initial_step),
            ("meci.initial_step", self.meci.initial_step),
        ];
        if let Some((k, v)) = positive.iter().find(|(_, v)| !(*v > 0.0)) {
            return Err(Error::Config(format!("{k} = {v} must be positive")));
        }
        if !(0.0..=1.0).contains(&self.meci.eta) {
            return Err(Error::Config(format!("meci.eta = {} outside [0, 1]", self.meci.eta)));
        }
        if let Some(GridConfig::Line { from, to, points }) = &self.grid {
            if from.len() != to.len() || *points == 0 {
                return Err(Error::Config("grid line needs matching ends and at least one point".into()));
            }
        }
        Ok(())
    }
}

fn check_len(p: &[f64], map: &CoordinateMap) -> Result<()> {
    if p.len() != map.dim() {
        return Err(Error::Config(format!("point {p:?} has {} coordinates, the coordinate map has {}", p.len(), map.dim())));
    }
    Ok(())
}
