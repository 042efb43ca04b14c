use rayon::prelude::*;
use serde::Serialize;

use super::surface::{CoordinateMap, IntegralSource, Surface, SurfacePoint};
use crate::error::Result;
use crate::savqe::SaOoVqeOptions;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointStatus {
    Ok,
    /// Energies converged; the gap is too small for a coupling.
    DegenerateGap,
    Failed(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub q: Vec<f64>,
    pub status: PointStatus,
    pub e0: f64,
    pub e1: f64,
    pub e_sa: f64,
    pub phi: f64,
    pub grad0: Vec<f64>,
    pub grad1: Vec<f64>,
    pub h: Vec<f64>,
    pub nac: Vec<f64>,
}

impl ScanRow {
    fn failed(q: &[f64], n: usize, why: String) -> Self {
        let nan = vec![f64::NAN; n];
        ScanRow {
            q: q.to_vec(),
            status: PointStatus::Failed(why),
            e0: f64::NAN,
            e1: f64::NAN,
            e_sa: f64::NAN,
            phi: f64::NAN,
            grad0: nan.clone(),
            grad1: nan.clone(),
            h: nan.clone(),
            nac: nan,
        }
    }

    fn from_point(p: &SurfacePoint) -> Self {
        let d = p.derivatives.as_ref().expect("differentiated point");
        let n = d.grad0.len();
        ScanRow {
            q: p.q.clone(),
            status: if d.nac.is_some() { PointStatus::Ok } else { PointStatus::DegenerateGap },
            e0: p.e0,
            e1: p.e1,
            e_sa: p.e_sa,
            phi: p.phi,
            grad0: d.grad0.clone(),
            grad1: d.grad1.clone(),
            h: d.h.clone(),
            nac: d.nac.clone().unwrap_or_else(|| vec![f64::NAN; n]),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanTable {
    pub labels: Vec<String>,
    pub rows: Vec<ScanRow>,
}

impl ScanTable {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| matches!(r.status, PointStatus::Failed(_))).count()
    }

    /// Tab-separated, one row per grid point, `nan` where undefined.
    pub fn render_tsv(&self) -> String {
        let mut head: Vec<String> = self.labels.clone();
        head.extend(["e0", "e1", "e_sa", "phi"].map(String::from));
        for pre in ["dE0", "dE1", "h", "d01"] {
            head.extend(self.labels.iter().map(|l| format!("{pre}/d{l}")));
        }
        head.push("status".into());
        let mut s = head.join("\t");
        s.push('\n');
        let f = |v: f64| if v.is_nan() { "nan".to_string() } else { format!("{v:.12e}") };
        for r in &self.rows {
            let mut cols: Vec<String> = r.q.iter().map(|v| format!("{v:.10}")).collect();
            cols.extend([r.e0, r.e1, r.e_sa, r.phi].map(f));
            for v in [&r.grad0, &r.grad1, &r.h, &r.nac] {
                cols.extend(v.iter().map(|&x| f(x)));
            }
            cols.push(match &r.status {
                PointStatus::Ok => "ok".into(),
                PointStatus::DegenerateGap => "degenerate_gap".into(),
                PointStatus::Failed(_) => "failed".into(),
            });
            s.push_str(&cols.join("\t"));
            s.push('\n');
        }
        s
    }
}

/// Energies, gradients and couplings along `grid`, in order, each point
/// warm-started from the last one that converged. Failed points are recorded
/// and skipped.
pub fn pes_scan(source: &dyn IntegralSource, map: &CoordinateMap, opts: &SaOoVqeOptions, grid: &[Vec<f64>]) -> Result<ScanTable> {
    let mut surface = Surface::new(source, map.clone(), opts.clone())?;
    let n = map.dim();
    let rows = grid
        .iter()
        .map(|q| match surface.energies(q) {
            Ok(mut p) => match surface.differentiate(&mut p) {
                Ok(()) => ScanRow::from_point(&p),
                Err(e) => ScanRow { e0: p.e0, e1: p.e1, e_sa: p.e_sa, phi: p.phi, ..ScanRow::failed(q, n, e.to_string()) },
            },
            Err(e) => ScanRow::failed(q, n, e.to_string()),
        })
        .collect();
    Ok(ScanTable { labels: surface.labels(), rows })
}

/// Independent warm-start chains, run concurrently; rows keep chain order.
pub fn pes_scan_chains(
    source: &dyn IntegralSource,
    map: &CoordinateMap,
    opts: &SaOoVqeOptions,
    chains: &[Vec<Vec<f64>>],
) -> Result<ScanTable> {
    let tables: Vec<ScanTable> = chains.par_iter().map(|g| pes_scan(source, map, opts, g)).collect::<Result<_>>()?;
    let labels = map.labels(source);
    Ok(ScanTable { labels, rows: tables.into_iter().flat_map(|t| t.rows).collect() })
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn line_grid(a: &[f64], b: &[f64], n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|k| {
            let t = if n > 1 { k as f64 / (n - 1) as f64 } else { 0.0 };
            a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
        })
        .collect()
}
