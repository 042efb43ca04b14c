//! `saoovqe` command-line driver.
//!
//! Exit status: 0 success, 2 configuration error, 3 convergence failure
//! (including a degenerate gap for `nac`), 4 I/O or format error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use saoovqe::config::{RunConfig, Source};
use saoovqe::geometry::{ci_search_2d, meci_search, pes_scan, SearchResult, Surface, SurfacePoint};
use saoovqe::integrals::FileSource;
use saoovqe::response::{derivative_hamiltonians, ResponseContext};
use saoovqe::savqe::run_sa_oo_vqe;
use saoovqe::{Error, Result};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "saoovqe", version, about = "SA-OO-VQE energies, gradients, couplings and intersection searches")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Iteration cap for ci-search and meci.
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    /// Gap weight for meci.
    #[arg(long, global = true)]
    eta: Option<f64>,
    /// Worker threads for scan chains and shifted-circuit batches.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Converged energies at `point`.
    Energy,
    /// Energies, gradients and couplings over `grid`.
    Scan,
    /// Analytic gradients of both states at `point`.
    Gradient,
    /// Non-adiabatic coupling between the two states at `point`.
    Nac,
    /// Steepest descent on the gap from `point`.
    CiSearch,
    /// Minimum-energy conical intersection from `point`.
    Meci,
    /// Write a built-in model's integrals at `grid` as a file tree.
    ExportModel,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Energy => "energy",
            Command::Scan => "scan",
            Command::Gradient => "gradient",
            Command::Nac => "nac",
            Command::CiSearch => "ci-search",
            Command::Meci => "meci",
            Command::ExportModel => "export-model",
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::UnknownModel(_)
        | Error::OutsideDomain(_)
        | Error::InvalidParameter(_)
        | Error::InvalidActiveSpace(_)
        | Error::UnequalWeights => 2,
        Error::Convergence(_) | Error::DegenerateGap { .. } | Error::Unresolved => 3,
        _ => 4,
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_json(out: &Path, v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v).map_err(|e| Error::Format(e.to_string()))?;
    write(&out.join("results.json"), &(text + "\n"))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |s, x| s + x * x).sqrt()
}

/// A finished run: what to write, and the failure to report after writing.
struct Outcome {
    results: Value,
    failure: Option<Error>,
}

impl Outcome {
    fn ok(results: Value) -> Self {
        Outcome { results, failure: None }
    }
}

fn point_json(p: &SurfacePoint) -> Value {
    json!({
        "point": p.q,
        "coordinates": p.x,
        "e0": p.e0,
        "e1": p.e1,
        "e_sa": p.e_sa,
        "phi": p.phi,
        "result": p.result,
    })
}

fn search_outcome(cli: &Cli, surface: &Surface, r: SearchResult, what: &str) -> Result<Outcome> {
    write(&cli.out.join("trajectory.tsv"), &r.render_tsv(&surface.labels()))?;
    let failure = (!r.converged).then(|| Error::Convergence(format!("{what} stopped by {:?} after {} steps", r.stop, r.steps)));
    Ok(Outcome { results: json!({ "labels": surface.labels(), "search": r }), failure })
}

fn run(cli: &Cli, cfg: &mut RunConfig) -> Result<Outcome> {
    if let Some(n) = cli.max_iter {
        cfg.ci_search.max_iter = n;
        cfg.meci.max_iter = n;
    }
    if let Some(eta) = cli.eta {
        cfg.meci.eta = eta;
    }
    cfg.validate()?;
    if cli.command == Command::ExportModel {
        return export_model(cli, cfg);
    }
    let source = cfg.open_source()?;
    let src = source.as_dyn();
    let map = cfg.map(src)?;
    let mut surface = Surface::new(src, map.clone(), cfg.solver.clone())?;
    match cli.command {
        Command::Energy => {
            // not through the surface, so an unconverged result is still written
            let q = cfg.point(&map)?;
            let x = map.to_source(&q)?;
            let (ints, _) = src.load(&x)?;
            let r = run_sa_oo_vqe(&ints, &cfg.solver, None)?;
            let failure = (!r.converged).then(|| Error::Convergence(format!("SA-OO-VQE stopped after {} outer iterations", r.outer_iterations)));
            let results = json!({ "point": q, "coordinates": x, "e0": r.e0, "e1": r.e1, "e_sa": r.e_sa, "phi": r.phi, "result": r });
            Ok(Outcome { results, failure })
        }
        Command::Scan => {
            let table = pes_scan(src, &map, &cfg.solver, &cfg.grid(&map)?)?;
            write(&cli.out.join("scan.tsv"), &table.render_tsv())?;
            let n = table.failures();
            let failure = (n > 0).then(|| Error::Convergence(format!("{n} of {} scan points failed", table.rows.len())));
            Ok(Outcome { results: json!({ "scan": table }), failure })
        }
        Command::Gradient | Command::Nac => derivatives(cli.command, &mut surface, &cfg.point(&map)?),
        Command::CiSearch => {
            if map.dim() != 2 {
                return Err(Error::Config(format!("ci-search needs a 2-dimensional coordinate map, got {}", map.dim())));
            }
            let r = ci_search_2d(&mut surface, &cfg.point(&map)?, &cfg.ci_search)?;
            search_outcome(cli, &surface, r, "ci-search")
        }
        Command::Meci => {
            let r = meci_search(&mut surface, &cfg.point(&map)?, &cfg.meci)?;
            search_outcome(cli, &surface, r, "meci")
        }
        Command::ExportModel => unreachable!(),
    }
}

fn derivatives(cmd: Command, surface: &mut Surface, q: &[f64]) -> Result<Outcome> {
    let p = surface.energies(q)?;
    let ctx = match ResponseContext::new(&p.ints, &p.result, &surface.opts) {
        Err(Error::Unresolved) => return Ok(Outcome { results: json!({ "energies": point_json(&p) }), failure: Some(Error::Unresolved) }),
        r => r?,
    };
    let dhs = derivative_hamiltonians(&p.ints, &p.result.c, &p.derivs)?;
    let map = &surface.map;
    let base = json!({
        "labels": dhs.iter().map(|d| d.label.clone()).collect::<Vec<_>>(),
        "map_labels": surface.labels(),
        "energies": point_json(&p),
        "counts": ctx.counts,
    });
    let mut out = base;
    if cmd == Command::Gradient {
        let g = [ctx.gradient(0, &dhs)?, ctx.gradient(1, &dhs)?];
        out["gradients"] = json!(g);
        out["map_gradients"] = json!(g.iter().map(|s| map.pull_back(q, &s.values)).collect::<Vec<_>>());
        out["multiplier_norms"] =
            json!(g.iter().map(|s| json!({ "kappa_bar": norm(&s.multipliers.kappa_bar), "theta_bar": norm(&s.multipliers.theta_bar) })).collect::<Vec<_>>());
        return Ok(Outcome::ok(out));
    }
    match ctx.nac(0, 1, &dhs) {
        Ok(b) => {
            out["map_nac"] = json!(map.pull_back(q, &b.nac));
            out["map_h"] = json!(map.pull_back(q, &b.h));
            out["multiplier_norms"] =
                json!({ "kappa_bar": norm(&b.multipliers.kappa_bar), "theta_bar": norm(&b.multipliers.theta_bar) });
            out["nac"] = json!(b);
            Ok(Outcome::ok(out))
        }
        Err(Error::DegenerateGap { gap, numerator }) => {
            out["degenerate_gap"] = json!({ "gap": gap, "numerator": numerator, "map_numerator": map.pull_back(q, &numerator) });
            Ok(Outcome { results: out, failure: Some(Error::DegenerateGap { gap, numerator }) })
        }
        Err(e) => Err(e),
    }
}

fn export_model(cli: &Cli, cfg: &RunConfig) -> Result<Outcome> {
    let Source::Model(model) = cfg.open_source()? else {
        return Err(Error::Config("export-model needs a built-in model system".into()));
    };
    let map = cfg.map(&model)?;
    let mut written = Vec::new();
    for q in cfg.grid(&map)? {
        let x = map.to_source(&q)?;
        let ints = model.integrals(&x)?;
        let derivs = model.derivatives(&x)?;
        let dir = FileSource::export(&cli.out, &x, &ints, &derivs)?;
        written.push(json!({ "point": q, "coordinates": x, "dir": dir }));
    }
    let info = &model.info;
    Ok(Outcome::ok(json!({
        "model": info.name,
        "n_frozen": info.n_frozen,
        "n_active": info.n_active,
        "labels": info.labels,
        "geometries": written,
    })))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let fail = |e: &Error| {
        eprintln!("saoovqe {}: {e}", cli.command.name());
        ExitCode::from(exit_code(e))
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return fail(&Error::Config(format!("--threads {n}: {e}")));
        }
    }
    let Some(path) = &cli.config else {
        return fail(&Error::Config("--config is required".into()));
    };
    let mut cfg = match RunConfig::load(path) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    if let Err(e) = std::fs::create_dir_all(&cli.out) {
        return fail(&Error::io(&cli.out, e));
    }
    let outcome = match run(&cli, &mut cfg) {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    let mut results = outcome.results;
    results["command"] = json!(cli.command.name());
    results["status"] = json!(match &outcome.failure {
        None => "ok".to_string(),
        Some(e) => e.to_string(),
    });
    if let Err(e) = write_json(&cli.out, &results) {
        return fail(&e);
    }
    match outcome.failure {
        None => ExitCode::SUCCESS,
        Some(e) => fail(&e),
    }
}
