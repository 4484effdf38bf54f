//! The four subcommands.

use crate::config::RunConfig;
use crate::error::CliError;
use adaptive_hermite::collision::cache::{cache_file_name, conservation_defect, load_tensor, save_tensor};
use adaptive_hermite::collision::{assemble_tensor, CollisionTensor};
use adaptive_hermite::solver::{
    compare, run, write_adjustments, ComparisonRow, RunOutput, RunReport, Scenario, Snapshot,
};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const CONFIG_FILE: &str = "config.json";
pub const REPORT_FILE: &str = "report.csv";
pub const ADJUSTMENTS_FILE: &str = "adjustments.csv";
pub const SNAPSHOT_FILE: &str = "snapshot.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheStatus {
    Assembled,
    Verified,
}

#[derive(Debug)]
pub struct Precomputed {
    pub path: PathBuf,
    pub status: CacheStatus,
    pub tensor: CollisionTensor,
}

fn tensor_path(config: &RunConfig) -> PathBuf {
    config.cache_dir.join(cache_file_name(&config.kernel(), config.solver.n0, config.quadrature()))
}

/// Loads the configured tensor, or assembles and stores it when `assemble`
/// is set.
fn obtain_tensor(config: &RunConfig, assemble: bool) -> Result<Precomputed, CliError> {
    let path = tensor_path(config);
    let (kernel, n0, orders) = (config.kernel(), config.solver.n0, config.quadrature());
    if path.exists() {
        let tensor = load_tensor(&path)?;
        if *tensor.kernel() != kernel || tensor.n0() != n0 || tensor.orders() != orders {
            return Err(CliError::Io(format!("{} holds a tensor for a different configuration", path.display())));
        }
        return Ok(Precomputed { path, status: CacheStatus::Verified, tensor });
    }
    if !assemble {
        return Err(CliError::Io(format!(
            "cache required: {} does not exist and allow_precompute is false (run `precompute` first)",
            path.display()
        )));
    }
    let start = Instant::now();
    log::info!("assembling the N0 = {n0} tensor for {kernel:?}");
    let tensor = assemble_tensor(&kernel, n0, orders)?;
    log::info!("assembly took {:.1} s", start.elapsed().as_secs_f64());
    fs::create_dir_all(&config.cache_dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", config.cache_dir.display())))?;
    save_tensor(&tensor, &path)?;
    Ok(Precomputed { path, status: CacheStatus::Assembled, tensor })
}

pub fn precompute(config: &RunConfig) -> Result<Precomputed, CliError> {
    config.validate()?;
    let p = obtain_tensor(config, true)?;
    let status = match p.status {
        CacheStatus::Assembled => "assembled",
        CacheStatus::Verified => "verified",
    };
    println!("tensor       {}", p.path.display());
    println!("status       {status}");
    println!("kernel       {:?}", p.tensor.kernel());
    println!("N0           {}", p.tensor.n0());
    println!("conservation {:.3e}", conservation_defect(&p.tensor));
    println!("nu           {:.6e}", p.tensor.nu());
    Ok(p)
}

fn io_at(path: &Path) -> impl Fn(adaptive_hermite::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

/// Writes the run directory: configuration, report, adjustment log and the
/// final snapshot.
pub fn write_run_dir(dir: &Path, config: &RunConfig, out: &RunOutput) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let p = dir.join(CONFIG_FILE);
    fs::write(&p, config.to_json()).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
    let p = dir.join(REPORT_FILE);
    out.report.write_csv(&p).map_err(io_at(&p))?;
    let p = dir.join(ADJUSTMENTS_FILE);
    write_adjustments(&out.adjustments, &p).map_err(io_at(&p))?;
    let p = dir.join(SNAPSHOT_FILE);
    Snapshot::new(out.time, &out.field, out.geometry).write_json(&p).map_err(io_at(&p))?;
    Ok(())
}

pub fn run_command(config: &RunConfig) -> Result<RunOutput, CliError> {
    config.validate()?;
    let tensor = obtain_tensor(config, config.allow_precompute)?.tensor;
    let start = Instant::now();
    match run(&config.scenario, &tensor, &config.solver) {
        Ok(out) => {
            write_run_dir(&config.out_dir, config, &out)?;
            print_summary(&config.scenario, &out, start.elapsed().as_secs_f64());
            println!("output       {}", config.out_dir.display());
            Ok(out)
        }
        Err(failure) => {
            // keep what was computed before the failure
            if !failure.partial.report.rows.is_empty() {
                write_run_dir(&config.out_dir, config, &failure.partial)?;
                eprintln!("partial output written to {}", config.out_dir.display());
            }
            Err(failure.error.into())
        }
    }
}

fn print_summary(scenario: &Scenario, out: &RunOutput, seconds: f64) {
    let spec = out.field.spec();
    println!("scenario     {}", scenario.name());
    println!("time         {}", out.time);
    println!("steps        {}", out.report.rows.len().saturating_sub(1));
    println!("beta         {:.6}", spec.beta);
    println!("N            {}", spec.order);
    println!("adjustments  {}", out.adjustments.len());
    if let Some(last) = out.report.last() {
        println!("indicator    {:.3e}", last.indicator);
        if !last.l2_error.is_nan() {
            println!("l2_error     {:.3e}", last.l2_error);
        }
    }
    println!("wall time    {seconds:.2} s");
}

fn report_path(p: &Path) -> PathBuf {
    if p.is_dir() {
        p.join(REPORT_FILE)
    } else {
        p.to_path_buf()
    }
}

/// Compares two reports (CSV files or run directories) time by time and
/// optionally writes the ratios to `out` as CSV.
pub fn compare_command(a: &Path, b: &Path, out: Option<&Path>) -> Result<Vec<ComparisonRow>, CliError> {
    let (pa, pb) = (report_path(a), report_path(b));
    let ra = RunReport::read_csv(&pa).map_err(io_at(&pa))?;
    let rb = RunReport::read_csv(&pb).map_err(io_at(&pb))?;
    let rows = compare(&ra, &rb).map_err(|e| CliError::Config(e.to_string()))?;
    println!("{:>10} {:>12} {:>12} {:>10} {:>10} {:>10}", "t", "l2_a", "l2_b", "l2_ratio", "theta_r", "q_ratio");
    for r in &rows {
        println!(
            "{:>10.4} {:>12.4e} {:>12.4e} {:>10.3e} {:>10.3e} {:>10.3e}",
            r.t, r.l2_error_a, r.l2_error_b, r.l2_ratio, r.theta_ratio, r.q_ratio
        );
    }
    if let Some(last) = rows.last() {
        println!("final t = {}: l2 ratio {:.3e}", last.t, last.l2_ratio);
    }
    if let Some(path) = out {
        let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        for r in &rows {
            w.serialize(r).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        }
        w.flush()?;
    }
    Ok(rows)
}

/// The default configuration, with the scenario's own defaults when a name
/// is given.
pub fn defaults(scenario: Option<&str>) -> Result<RunConfig, CliError> {
    let mut c = RunConfig::default();
    if let Some(name) = scenario {
        c.scenario = Scenario::by_name(name).map_err(|e| CliError::Config(e.to_string()))?;
    }
    c.kernel = Some(c.kernel());
    c.quadrature = Some(c.quadrature());
    Ok(c)
}
