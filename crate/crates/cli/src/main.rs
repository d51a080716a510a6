//! `breather`: generate order-N quasi-rational NLS solution fields, run the
//! verification suites, and extract peak patterns.
//!
//! Exit codes: 0 on success, 1 when a verification check fails, 2 on usage
//! or parse errors.

mod io;
mod manifest;

use anyhow::{anyhow, Context};
use breather_core as core;
use breather_core::{
    classify_pattern, default_precision, find_peaks, DeformationParams, GridSpec, SolutionConfig,
    Suite,
};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "breather",
    version,
    about = "Multi-parametric NLS breather toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the order-N solution with all deformation parameters zero.
    Peregrine(FieldArgs),
    /// Sample a deformed solution with explicit a~/b~ parameters.
    Deform(DeformArgs),
    /// Run verification suites and write a JSON report.
    Verify(VerifyArgs),
    /// Detect and classify peaks in an exported field CSV.
    Peaks(PeaksArgs),
}

#[derive(Args)]
struct FieldArgs {
    /// Solution order N (1..=10).
    #[arg(long)]
    order: usize,
    /// x grid as lo:hi:count with inclusive endpoints.
    #[arg(long, default_value = "-5:5:201", allow_hyphen_values = true)]
    x: String,
    /// t grid as lo:hi:count with inclusive endpoints.
    #[arg(long, default_value = "-5:5:201", allow_hyphen_values = true)]
    t: String,
    /// Phase value may be negative.
    #[arg(skip)]
    _pad: (),
    /// Global phase in exp(2it - i phase).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phase: f64,
    /// Working precision in mantissa bits (defaults to 53 for N <= 2, 256 above).
    #[arg(long)]
    precision: Option<u32>,
    /// Worker threads for grid evaluation.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Output prefix; writes PREFIX.csv, PREFIX.json, PREFIX.pgm.
    #[arg(long, default_value = "field")]
    output: PathBuf,
}

#[derive(Args)]
struct DeformArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Deformation parameter a~_k as k=value (repeatable, k in 1..=N-1).
    #[arg(long = "a", value_name = "K=V", allow_hyphen_values = true)]
    a: Vec<String>,
    /// Deformation parameter b~_k as k=value (repeatable, k in 1..=N-1).
    #[arg(long = "b", value_name = "K=V", allow_hyphen_values = true)]
    b: Vec<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite: residual | amplitude | degree | zeros | oracle | all.
    #[arg(long)]
    suite: String,
    /// Orders, either a single N or an inclusive range like 1..4.
    #[arg(long, default_value = "1..3")]
    order: String,
    /// Report file.
    #[arg(long, default_value = "verify-report.json")]
    output: PathBuf,
}

#[derive(Args)]
struct PeaksArgs {
    /// Field CSV produced by `peregrine` or `deform`.
    input: PathBuf,
    /// Detection threshold above the unit background.
    #[arg(long, default_value_t = core::DEFAULT_PEAK_THRESHOLD)]
    threshold: f64,
    /// Output JSON path (defaults to INPUT with a .peaks.json suffix).
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Peregrine(args) => cmd_field(args, Vec::new(), Vec::new(), "peregrine"),
        Command::Deform(args) => {
            let a = args.a.clone();
            let b = args.b.clone();
            cmd_field(args.field, a, b, "deform")
        }
        Command::Verify(args) => return cmd_verify(args),
        Command::Peaks(args) => cmd_peaks(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn parse_grid(x: &str, t: &str) -> anyhow::Result<GridSpec> {
    let parse_axis = |s: &str| -> anyhow::Result<(f64, f64, usize)> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(anyhow!("grid must be lo:hi:count, got `{s}`"));
        }
        Ok((
            parts[0].parse().context("grid lo")?,
            parts[1].parse().context("grid hi")?,
            parts[2].parse().context("grid count")?,
        ))
    };
    let (x0, x1, nx) = parse_axis(x)?;
    let (t0, t1, nt) = parse_axis(t)?;
    GridSpec::new(x0, x1, nx, t0, t1, nt).map_err(|e| anyhow!("{e}"))
}

fn parse_kv(order: usize, entries: &[String]) -> anyhow::Result<Vec<(usize, f64)>> {
    let mut out = Vec::new();
    for e in entries {
        let (k, v) = e
            .split_once('=')
            .ok_or_else(|| anyhow!("parameter must be k=value, got `{e}`"))?;
        let k: usize = k.parse().context("parameter index")?;
        if k == 0 || k > order.saturating_sub(1) {
            return Err(anyhow!(
                "parameter index {k} out of range; valid indices are 1..={}",
                order.saturating_sub(1)
            ));
        }
        out.push((k, v.parse().context("parameter value")?));
    }
    Ok(out)
}

fn cmd_field(args: FieldArgs, a: Vec<String>, b: Vec<String>, command: &str) -> anyhow::Result<()> {
    if args.order == 0 || args.order > 10 {
        return Err(anyhow!("supported orders are 1..=10, got {}", args.order));
    }
    let grid = parse_grid(&args.x, &args.t)?;
    let precision = args
        .precision
        .unwrap_or_else(|| default_precision(args.order));
    if precision < 53 {
        return Err(anyhow!("precision must be at least 53 bits"));
    }
    let a_kv = parse_kv(args.order, &a)?;
    let b_kv = parse_kv(args.order, &b)?;
    let started = std::time::Instant::now();

    let (field64, field_big);
    let (mut field64_flagged, mut field_big_flagged): (Option<usize>, Option<usize>) = (None, None);
    let outputs = if precision <= 53 {
        let mut params = DeformationParams::<f64>::zero(args.order, precision);
        for (k, v) in &a_kv {
            params = params.with_a(*k, *v).map_err(|e| anyhow!("{e}"))?;
        }
        for (k, v) in &b_kv {
            params = params.with_b(*k, *v).map_err(|e| anyhow!("{e}"))?;
        }
        let config = SolutionConfig::<f64>::peregrine(args.order, precision)
            .map_err(|e| anyhow!("{e}"))?
            .with_params(params)
            .map_err(|e| anyhow!("{e}"))?
            .with_phase(args.phase)
            .map_err(|e| anyhow!("{e}"))?;
        field64 = core::evaluate_grid_threaded(&config, &grid, args.threads.max(1));
        field64_flagged = Some(field64.flagged().len());
        io::write_field_outputs(&field64, &args.output)?
    } else {
        let mut params = DeformationParams::<core::Big>::zero(args.order, precision);
        for (k, v) in &a_kv {
            params = params
                .with_a(*k, core::Real::from_f64_prec(*v, precision))
                .map_err(|e| anyhow!("{e}"))?;
        }
        for (k, v) in &b_kv {
            params = params
                .with_b(*k, core::Real::from_f64_prec(*v, precision))
                .map_err(|e| anyhow!("{e}"))?;
        }
        let config = SolutionConfig::<core::Big>::peregrine(args.order, precision)
            .map_err(|e| anyhow!("{e}"))?
            .with_params(params)
            .map_err(|e| anyhow!("{e}"))?
            .with_phase(core::Real::from_f64_prec(args.phase, precision))
            .map_err(|e| anyhow!("{e}"))?;
        field_big = core::evaluate_grid_threaded(&config, &grid, args.threads.max(1));
        field_big_flagged = Some(field_big.flagged().len());
        io::write_field_outputs(&field_big, &args.output)?
    };

    let flagged = field64_flagged.or(field_big_flagged).unwrap_or(0);
    if flagged > 0 {
        eprintln!(
            "advisory: {flagged} grid point(s) hit precision exhaustion and were flagged; \
             rerun with --precision {} or higher",
            precision.saturating_mul(2)
        );
    }

    let mani = manifest::RunManifest::new(
        command,
        manifest::ConfigEcho {
            order: args.order,
            a: a_kv,
            b: b_kv,
            phase: args.phase,
            precision,
            threads: args.threads.max(1),
            grid: (
                grid.x_min, grid.x_max, grid.nx, grid.t_min, grid.t_max, grid.nt,
            ),
            audit_seed: core::AUDIT_SEED,
        },
        outputs.clone(),
        started.elapsed().as_secs_f64(),
    );
    manifest::write_with_manifest(&args.output, mani)?;
    println!(
        "wrote {}",
        outputs
            .iter()
            .map(|p| p.display().to_string())
            .collect::<Vec<_>>()
            .join(", ")
    );
    Ok(())
}

fn parse_orders(spec: &str) -> anyhow::Result<Vec<usize>> {
    if let Some((lo, hi)) = spec.split_once("..") {
        let lo: usize = lo.parse().context("order range start")?;
        let hi: usize = hi.parse().context("order range end")?;
        if lo == 0 || hi < lo {
            return Err(anyhow!("invalid order range `{spec}`"));
        }
        Ok((lo..=hi).collect())
    } else {
        let n: usize = spec.parse().context("order")?;
        if n == 0 {
            return Err(anyhow!("order must be positive"));
        }
        Ok(vec![n])
    }
}

fn cmd_verify(args: VerifyArgs) -> ExitCode {
    let suite = match Suite::parse(&args.suite) {
        Some(s) => s,
        None => {
            eprintln!(
                "error: unknown suite `{}`; valid: residual, amplitude, degree, zeros, oracle, all",
                args.suite
            );
            return ExitCode::from(2);
        }
    };
    let orders = match parse_orders(&args.order) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let report = match core::run_suite(suite, &orders) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    for c in &report.checks {
        println!(
            "{}: {} (worst {:.3e} vs tol {:.1e}, {:.2}s)",
            c.name, c.status, c.worst_error, c.tolerance, c.runtime_s
        );
    }
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    if let Err(e) = std::fs::write(&args.output, json) {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(2);
    }
    println!("report written to {}", args.output.display());
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_peaks(args: PeaksArgs) -> anyhow::Result<()> {
    let (field, meta) = io::read_field_csv(&args.input)?;
    let peaks = find_peaks(&field, args.threshold).map_err(|e| anyhow!("{e}"))?;
    let classified = match &meta {
        Some(m) => {
            let zero = m.a_tilde.iter().all(|v| *v == 0.0) && m.b_tilde.iter().all(|v| *v == 0.0);
            classify_pattern(&peaks, m.order, zero)
        }
        None => peaks,
    };
    let out = args.output.unwrap_or_else(|| {
        let mut p = args.input.clone();
        p.set_extension("peaks.json");
        p
    });
    let json = serde_json::to_string_pretty(&classified)?;
    std::fs::write(&out, json)?;
    println!(
        "{} peaks ({:?}); written to {}",
        classified.peaks.len(),
        classified.classification,
        out.display()
    );
    Ok(())
}
