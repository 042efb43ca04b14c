use serde::{Deserialize, Serialize};

use super::branching::{BranchingSpace, ProjectorErrors};
use super::surface::{Surface, SurfacePoint};
use crate::error::{Error, Result};

fn norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |s, x| s + x * x).sqrt()
}

fn axpy(q: &[f64], t: f64, d: &[f64]) -> Vec<f64> {
    q.iter().zip(d).map(|(a, b)| a + t * b).collect()
}

/// One accepted iterate.
#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryRow {
    pub iter: usize,
    pub q: Vec<f64>,
    pub e0: f64,
    pub e1: f64,
    pub gap: f64,
    /// Norm of the search direction before scaling.
    pub grad_norm: f64,
    /// Step length (CI search) or multiplier (MECI) that was accepted; 0 at the start.
    pub step: f64,
    /// Rejected trials before acceptance.
    pub backtracks: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub projector: Option<ProjectorErrors>,
}

impl TrajectoryRow {
    fn new(iter: usize, p: &SurfacePoint, grad_norm: f64, step: f64, backtracks: usize) -> Self {
        TrajectoryRow { iter, q: p.q.clone(), e0: p.e0, e1: p.e1, gap: p.gap(), grad_norm, step, backtracks, projector: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Threshold,
    /// The step collapsed below its floor; the objective is not smooth at
    /// the intersection, so this also counts as converged.
    Stagnation,
    MaxIterations,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub trajectory: Vec<TrajectoryRow>,
    pub final_point: Vec<f64>,
    pub e0: f64,
    pub e1: f64,
    pub stop: StopReason,
    pub converged: bool,
    /// Accepted steps.
    pub steps: usize,
}

impl SearchResult {
    pub fn render_tsv(&self, labels: &[String]) -> String {
        let mut s = format!("iter\t{}\te0\te1\tgap\tgrad_norm\tstep\tbacktracks\n", labels.join("\t"));
        for r in &self.trajectory {
            let q: Vec<String> = r.q.iter().map(|v| format!("{v:.10}")).collect();
            s.push_str(&format!(
                "{}\t{}\t{:.12e}\t{:.12e}\t{:.6e}\t{:.6e}\t{:.6e}\t{}\n",
                r.iter,
                q.join("\t"),
                r.e0,
                r.e1,
                r.gap,
                r.grad_norm,
                r.step,
                r.backtracks
            ));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CiSearchOptions {
    pub max_iter: usize,
    /// Ha
    pub gap_tol: f64,
    /// Length of the first trial step, in coordinate units (degrees for the
    /// formaldimine angles).
    pub initial_step: f64,
    pub min_step: f64,
}

impl Default for CiSearchOptions {
    fn default() -> Self {
        CiSearchOptions { max_iter: 200, gap_tol: 1e-6, initial_step: 1.0, min_step: 1e-6 }
    }
}

/// Steepest descent on `ΔE = E1 − E0` along `−∇ΔE/|∇ΔE|`, halving the step
/// until ΔE drops and doubling it (up to the initial length) after success.
pub fn ci_search_2d(surface: &mut Surface, start: &[f64], opts: &CiSearchOptions) -> Result<SearchResult> {
    let mut p = surface.energies(start)?;
    let mut trajectory = vec![TrajectoryRow::new(0, &p, f64::NAN, 0.0, 0)];
    let mut step = opts.initial_step;
    let mut stop = StopReason::MaxIterations;
    let mut steps = 0;
    while steps < opts.max_iter {
        if p.gap() < opts.gap_tol {
            stop = StopReason::Threshold;
            break;
        }
        surface.differentiate(&mut p)?;
        let g = p.gap_gradient().expect("differentiated");
        let gn = norm(&g);
        if gn == 0.0 {
            stop = StopReason::Stagnation;
            break;
        }
        let dir: Vec<f64> = g.iter().map(|x| -x / gn).collect();
        let accepted_warm = surface.warm.clone();
        let mut backtracks = 0;
        let next = loop {
            if step < opts.min_step {
                break None;
            }
            match surface.energies(&axpy(&p.q, step, &dir)) {
                Ok(t) if t.gap() < p.gap() => break Some(t),
                _ => {
                    surface.warm = accepted_warm.clone();
                    step *= 0.5;
                    backtracks += 1;
                }
            }
        };
        let Some(t) = next else {
            stop = StopReason::Stagnation;
            break;
        };
        steps += 1;
        trajectory.push(TrajectoryRow::new(steps, &t, gn, step, backtracks));
        p = t;
        step = (2.0 * step).min(opts.initial_step);
    }
    if steps == opts.max_iter && p.gap() < opts.gap_tol {
        stop = StopReason::Threshold;
    }
    Ok(SearchResult {
        final_point: p.q.clone(),
        e0: p.e0,
        e1: p.e1,
        converged: stop != StopReason::MaxIterations,
        stop,
        steps,
        trajectory,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MeciOptions {
    /// Weight of the gap term.
    pub eta: f64,
    pub max_iter: usize,
    /// Ha²
    pub gap2_tol: f64,
    /// Ha, change of E1 over the last accepted step.
    pub e1_tol: f64,
    /// Ha/unit. When set, `|P·∇E1|` must also fall below it; the E1-change
    /// test alone can stop while the point still drifts along the seam.
    pub seam_grad_tol: Option<f64>,
    /// First multiplier of the composite gradient, unit²/Ha.
    pub initial_step: f64,
    pub max_step: f64,
    pub min_step: f64,
}

impl Default for MeciOptions {
    fn default() -> Self {
        MeciOptions { eta: 0.25, max_iter: 500, gap2_tol: 1e-13, e1_tol: 1e-6, seam_grad_tol: None, initial_step: 0.01, max_step: 1e3, min_step: 1e-12 }
    }
}

/// `η·2ΔE·g̃ + (1−η)·P·∇E1` with `g̃` the unit gap gradient.
pub fn composite_gradient(eta: f64, p: &SurfacePoint, bs: &BranchingSpace) -> Vec<f64> {
    let d = p.derivatives.as_ref().expect("differentiated point");
    let gd = p.gap_gradient().expect("differentiated point");
    let gn = norm(&gd);
    let pg = bs.project(&d.grad1);
    gd.iter().zip(&pg).map(|(a, b)| eta * 2.0 * p.gap() * a / gn + (1.0 - eta) * b).collect()
}

fn branching_at(surface: &Surface, p: &mut SurfacePoint) -> Result<BranchingSpace> {
    surface.differentiate(p)?;
    let d = p.derivatives.as_ref().expect("differentiated");
    let g: Vec<f64> = d.grad1.iter().zip(&d.grad0).map(|(a, b)| 0.5 * (a - b)).collect();
    BranchingSpace::new(&g, &d.h)
}

/// Gradient-projection search for the lowest point of the S0/S1 seam.
///
/// Steps go along the composite gradient with a multiplier that halves on
/// rejection and doubles on acceptance. A trial is accepted when `η·ΔE²`
/// does not grow (or stays inside the convergence band) and, once inside
/// the band, E1 does not rise.
pub fn meci_search(surface: &mut Surface, start: &[f64], opts: &MeciOptions) -> Result<SearchResult> {
    if !(0.0..=1.0).contains(&opts.eta) {
        return Err(Error::InvalidParameter(format!("eta = {} outside [0, 1]", opts.eta)));
    }
    let mut p = surface.energies(start)?;
    let mut bs = branching_at(surface, &mut p)?;
    let mut row = TrajectoryRow::new(0, &p, f64::NAN, 0.0, 0);
    row.projector = Some(bs.errors());
    let mut trajectory = vec![row];
    let mut step = opts.initial_step;
    let mut stop = StopReason::MaxIterations;
    let mut steps = 0;
    let mut last_de1 = f64::INFINITY;
    let band = opts.gap2_tol;
    let done = |p: &SurfacePoint, bs: &BranchingSpace, de1: f64| {
        let seam_ok = opts.seam_grad_tol.map_or(true, |t| {
            let d = p.derivatives.as_ref().expect("differentiated point");
            norm(&bs.project(&d.grad1)) < t
        });
        p.gap().powi(2) < band && de1.abs() < opts.e1_tol && seam_ok
    };
    while steps < opts.max_iter {
        let gap2 = p.gap().powi(2);
        if done(&p, &bs, last_de1) {
            stop = StopReason::Threshold;
            break;
        }
        let g = composite_gradient(opts.eta, &p, &bs);
        let gn = norm(&g);
        if gn == 0.0 {
            stop = StopReason::Stagnation;
            break;
        }
        let accepted_warm = surface.warm.clone();
        let mut backtracks = 0;
        let next = loop {
            if step < opts.min_step {
                break None;
            }
            let trial = surface.energies(&axpy(&p.q, -step, &g)).and_then(|mut t| {
                let ok = {
                    let t2 = t.gap().powi(2);
                    let gap_ok = t2 <= gap2 || t2 < band;
                    let e1_ok = gap2 >= band || t.e1 <= p.e1;
                    gap_ok && e1_ok
                };
                if ok {
                    let b = branching_at(surface, &mut t)?;
                    Ok(Some((t, b)))
                } else {
                    Ok(None)
                }
            });
            match trial {
                Ok(Some(tb)) => break Some(tb),
                _ => {
                    surface.warm = accepted_warm.clone();
                    step *= 0.5;
                    backtracks += 1;
                }
            }
        };
        let Some((t, b)) = next else {
            stop = StopReason::Stagnation;
            break;
        };
        steps += 1;
        last_de1 = t.e1 - p.e1;
        let mut row = TrajectoryRow::new(steps, &t, gn, step, backtracks);
        row.projector = Some(b.errors());
        trajectory.push(row);
        p = t;
        bs = b;
        step = (2.0 * step).min(opts.max_step);
    }
    if stop == StopReason::MaxIterations && done(&p, &bs, last_de1) {
        stop = StopReason::Threshold;
    }
    Ok(SearchResult {
        final_point: p.q.clone(),
        e0: p.e0,
        e1: p.e1,
        converged: stop == StopReason::Threshold,
        stop,
        steps,
        trajectory,
    })
}
