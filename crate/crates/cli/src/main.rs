use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nslab::analysis::{diagnose, run_sweep, DiagnoseParams, Diagnosis};
use nslab::io::report::{emit_sweep, hash_file, s2_csv, sorted_json, write_file, ReportBundle};
use nslab::io::{load_series, ConfigFile};
use nslab::norms::{axis_directions, eight_directions};
use nslab::solver::run;
use nslab::suites;
use nslab::{Error, Result, Subdomain};

mod plots;

/// Wall-bounded 2D Navier-Stokes runs and inviscid-limit diagnostics.
///
/// Configuration keys can be overridden with `NSLAB_<KEY>` environment variables.
/// Exit codes: 0 ok, 2 configuration error, 3 numerical failure or failed check, 4 IO error.
#[derive(Parser, Debug)]
#[command(name = "nslab", version)]
struct Cli {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true, env = "NSLAB_CONFIG")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "NSLAB_OUT", default_value = "out")]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "NSLAB_THREADS")]
    threads: Option<usize>,
    /// Overrides the `seed` key of the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Also write SVG plots.
    #[arg(long, global = true)]
    plots: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate one run; writes snapshots, energy.csv and run_report.json.
    Simulate,
    /// Structure function, norms and constants of a stored snapshot series.
    Diagnose {
        #[arg(long)]
        snapshots: PathBuf,
        /// `x0,x1,y0,y1` in physical units.
        #[arg(long)]
        subdomain: String,
    },
    /// Vanishing-viscosity sweep over the `nus` of the configuration.
    Sweep,
    /// Runs a property suite and exits nonzero on failure.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Suite {
    Embeddings,
    Equivalence,
    Solver,
}

fn load_config(cli: &Cli) -> Result<ConfigFile> {
    let mut cfg = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    cfg.apply_env(std::env::vars());
    if let Some(seed) = cli.seed {
        cfg.set("seed", seed.to_string(), "--seed")?;
    }
    Ok(cfg)
}

fn parse_subdomain(s: &str) -> Result<Subdomain> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Config(vec![format!("--subdomain: {e}")]))?;
    if v.len() != 4 {
        return Err(Error::Config(vec![format!(
            "--subdomain expects x0,x1,y0,y1, got {} values",
            v.len()
        )]));
    }
    Ok(Subdomain::new(v[0], v[1], v[2], v[3]))
}

#[derive(Serialize)]
struct RunSummary {
    steps: usize,
    energy_fixes: usize,
    energy_removed: f64,
    max_relative_violation: f64,
    final_time: f64,
    snapshots: Vec<String>,
}

fn simulate(cli: &Cli) -> Result<()> {
    let file = load_config(cli)?;
    let mut cfg = file.run_config()?;
    cfg.out_dir = Some(cli.out.clone());
    let out = run(&cfg)?;
    file.write_echo(&cli.out.join("config.cfg"))?;
    let mut names: Vec<String> = std::fs::read_dir(&cli.out)
        .map_err(|e| Error::io(&cli.out, e))?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".nsfld"))
        .collect();
    names.sort();
    let mut bundle = ReportBundle::new(
        &file.resolved_text(),
        RunSummary {
            steps: out.steps,
            energy_fixes: out.energy_fixes,
            energy_removed: out.energy_removed,
            max_relative_violation: out.ledger.max_relative_violation(),
            final_time: out.snapshots.last().map_or(0.0, |s| s.time()),
            snapshots: names.clone(),
        },
    );
    for n in &names {
        bundle = bundle.with_input(n.clone(), hash_file(&cli.out.join(n))?);
    }
    write_file(&cli.out.join("run_report.json"), bundle.to_json()?)?;
    if cli.plots {
        plots::energy(&cli.out.join("energy.svg"), &out.ledger)?;
    }
    println!(
        "simulate: {} steps to t = {}, {} snapshots in {}",
        out.steps,
        out.snapshots.last().map_or(0.0, |s| s.time()),
        names.len(),
        cli.out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct NormsOut<'a> {
    sigma: f64,
    delta: f64,
    inner: &'a Subdomain,
    fit: &'a Option<nslab::analysis::ZetaFit>,
    fit_error: &'a Option<String>,
    norms: &'a [nslab::norms::NormReport],
}

fn run_diagnose(cli: &Cli, snapshots: &Path, subdomain: &str) -> Result<()> {
    let file = load_config(cli)?;
    let (dirs, magnitudes) = file.shift_params()?;
    let region = parse_subdomain(subdomain)?;
    let eps = file.eps()?;
    let series = load_series(snapshots)?;
    let fields: Vec<_> = series.iter().map(|(_, _, v)| v.clone()).collect();
    let params = DiagnoseParams {
        region,
        directions: if dirs == "axis" { axis_directions() } else { eight_directions() },
        magnitudes,
        eps,
    };
    let g: Diagnosis = diagnose(&fields, &params)?;
    let text = file.resolved_text();
    let inputs = |mut b: ReportBundle<_>| {
        for (n, h, _) in &series {
            b = b.with_input(n.clone(), h.clone());
        }
        b
    };
    write_file(&cli.out.join("s2.csv"), s2_csv(&g.table))?;
    let norms = inputs(ReportBundle::new(
        &text,
        NormsOut {
            sigma: g.sigma,
            delta: g.delta,
            inner: &g.inner,
            fit: &g.fit,
            fit_error: &g.fit_error,
            norms: &g.norms,
        },
    ));
    write_file(&cli.out.join("norms.json"), norms.to_json()?)?;
    write_file(&cli.out.join("constants.json"), sorted_json(&g.constants)?)?;
    file.write_echo(&cli.out.join("config.cfg"))?;
    if cli.plots {
        plots::structure_functions(&cli.out.join("s2.svg"), &[("S2".to_string(), g.table.averaged_pairs())])?;
    }
    match &g.fit {
        Some(f) => println!("diagnose: {} snapshots, zeta2 = {:.4}, C_U = {:.4}", fields.len(), f.zeta2, f.c_u),
        None => println!("diagnose: {} snapshots, no exponent fit", fields.len()),
    }
    Ok(())
}

fn sweep(cli: &Cli) -> Result<i32> {
    let file = load_config(cli)?;
    let cfg = file.sweep_config()?;
    let (report, artifacts) = run_sweep(&cfg)?;
    let failed = report.records.iter().filter(|r| r.failed.is_some()).count();
    let bundle = ReportBundle::new(&file.resolved_text(), report);
    emit_sweep(&cli.out, &bundle, &artifacts)?;
    if cli.plots {
        let curves: Vec<(String, Vec<(f64, f64)>)> = bundle
            .report
            .nus
            .iter()
            .zip(&artifacts.tables)
            .filter_map(|(nu, t)| t.as_ref().map(|t| (format!("nu = {nu:.3e}"), t.averaged_pairs())))
            .collect();
        plots::structure_functions(&cli.out.join("s2.svg"), &curves)?;
        let trend: Vec<(f64, f64)> = bundle
            .report
            .records
            .iter()
            .filter_map(|r| r.residuals.as_ref().map(|res| (r.nu, res.max_abs_viscous())))
            .collect();
        plots::residual_trend(&cli.out.join("residuals.svg"), &trend)?;
    }
    println!(
        "sweep: {} viscosities, {} failed, verdicts in {}",
        bundle.report.nus.len(),
        failed,
        cli.out.join("sweep_report.json").display()
    );
    for r in bundle.report.records.iter().filter_map(|r| r.failed.as_ref().map(|m| (r.nu, m))) {
        eprintln!("run nu = {} failed: {}", r.0, r.1);
    }
    Ok(if failed > 0 { 3 } else { 0 })
}

fn verify(suite: Suite) -> Result<i32> {
    let outcome = match suite {
        Suite::Embeddings => suites::embeddings()?,
        Suite::Equivalence => suites::equivalence()?,
        Suite::Solver => suites::solver()?,
    };
    for c in &outcome.checks {
        println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    Ok(if outcome.pass() { 0 } else { 3 })
}

fn dispatch(cli: &Cli) -> Result<i32> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(vec![format!("--threads: {e}")]))?;
    }
    match &cli.command {
        Command::Simulate => simulate(cli).map(|_| 0),
        Command::Diagnose { snapshots, subdomain } => run_diagnose(cli, snapshots, subdomain).map(|_| 0),
        Command::Sweep => sweep(cli),
        Command::Verify { suite } => verify(*suite),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            let msg = e.to_string().replace('\n', "; ").replace(":; ", ": ");
            eprintln!("error[{}]: {msg}", e.code());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
