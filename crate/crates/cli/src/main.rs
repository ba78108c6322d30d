//! `wgemit` — guided-mode emission calculator.
//!
//! Exit codes: 0 success, 2 usage or validation error, 3 numerical
//! convergence failure.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use wgemit_core::experiments::{
    format_number, optimize_thickness, scaling_check, sweep_height_with, sweep_thickness_with, Axis, Grid, Scenario,
    Spacing, SweepSpec, SweepTable,
};
use wgemit_core::emission::branching_ratio_with;
use wgemit_core::{find_guided_modes, DipoleEmitter, Error};

use config::{Command, RunConfig};

const THREADS_VAR: &str = "WGEMIT_THREADS";

#[derive(Parser)]
#[command(name = "wgemit", version, about = "Spontaneous emission into slab-waveguide modes")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the guided modes of the stack.
    Modes(RunConfig),
    /// Per-mode rates and branching ratios at one emitter height.
    Rates(RunConfig),
    /// Height or thickness sweep as CSV.
    Sweep(RunConfig),
    /// Height sweep over the Ta2O5-on-silica film with a parallel dipole.
    Fig2(RunConfig),
    /// Height sweeps over symmetric films just past the TM1 birth.
    Fig3(RunConfig),
    /// Film thickness that maximizes the guided capture probability.
    Optimize(RunConfig),
    /// Check that branching ratios are unchanged when all lengths scale.
    ScalingCheck(RunConfig),
}

impl Cmd {
    fn split(self) -> (Command, RunConfig) {
        match self {
            Cmd::Modes(c) => (Command::Modes, c),
            Cmd::Rates(c) => (Command::Rates, c),
            Cmd::Sweep(c) => (Command::Sweep, c),
            Cmd::Fig2(c) => (Command::Fig2, c),
            Cmd::Fig3(c) => (Command::Fig3, c),
            Cmd::Optimize(c) => (Command::Optimize, c),
            Cmd::ScalingCheck(c) => (Command::ScalingCheck, c),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e)
            if e
                .chain()
                .any(|c| c.downcast_ref::<io::Error>().is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)) =>
        {
            // Reader went away (e.g. `| head`); nothing left to report.
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let numerical = e
                .chain()
                .any(|c| c.downcast_ref::<Error>().is_some_and(Error::is_numerical));
            ExitCode::from(if numerical { 3 } else { 2 })
        }
    }
}

fn init_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("{THREADS_VAR}={raw} is not a positive integer"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    init_threads()?;
    let (command, flags) = cli.command.split();
    let cfg = RunConfig::resolve(command, flags)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match command {
        Command::Modes => modes(&cfg, &mut out),
        Command::Rates => rates(&cfg, &mut out),
        Command::Sweep => sweep(&cfg, &mut out),
        Command::Fig2 => fig2(&cfg, &mut out),
        Command::Fig3 => fig3(&cfg, &mut out),
        Command::Optimize => optimize(&cfg, &mut out),
        Command::ScalingCheck => scaling(&cfg, &mut out),
    }
}

fn modes(cfg: &RunConfig, out: &mut impl Write) -> anyhow::Result<()> {
    let stack = cfg.guiding_stack()?;
    let ctx = cfg.ctx()?;
    for m in find_guided_modes(&stack, &ctx)? {
        writeln!(
            out,
            "pol={} order={} n_eff={} kappa2_per_um={} kappa3_per_um={} n_group={} at_cutoff={}",
            m.pol,
            m.order,
            format_number(m.n_eff),
            format_number(m.kappa2 * 1e-6),
            format_number(m.kappa3 * 1e-6),
            format_number(m.n_group),
            m.marginal
        )?;
    }
    Ok(())
}

fn rates(cfg: &RunConfig, out: &mut impl Write) -> anyhow::Result<()> {
    let stack = cfg.stack()?;
    let ctx = cfg.ctx()?;
    let emitter = DipoleEmitter::new(cfg.orientation()?, cfg.height()?)?;
    let report = branching_ratio_with(&stack, &ctx, &emitter, &cfg.options()?)?;
    for m in &report.per_mode {
        writeln!(
            out,
            "mode={} rate_over_w0={} branching={} decay_nm={}",
            m.id,
            format_number(m.rate),
            format_number(m.branching),
            format_number(0.5 / m.kappa3 * 1e9)
        )?;
    }
    writeln!(out, "guided_sum={}", format_number(report.guided_sum))?;
    writeln!(out, "wtot_over_w0={}", format_number(report.total))?;
    Ok(())
}

fn height_spec(cfg: &RunConfig, scenario: Scenario) -> anyhow::Result<SweepSpec> {
    Ok(SweepSpec {
        scenario,
        stack: cfg.guiding_stack()?,
        ctx: cfg.ctx()?,
        orientation: cfg.orientation()?,
        axis: Axis::Height,
        grid: cfg.grid(Grid::default_heights())?,
        height: 0.0,
        per_mode: cfg.per_mode.unwrap_or(true),
    })
}

fn sweep(cfg: &RunConfig, out: &mut impl Write) -> anyhow::Result<()> {
    let opts = cfg.options()?;
    let table = match cfg.axis() {
        Axis::Height => sweep_height_with(&height_spec(cfg, Scenario::Custom)?, &opts)?,
        Axis::Thickness => {
            let spec = SweepSpec {
                axis: Axis::Thickness,
                grid: cfg.grid(Grid::new(100e-9, 400e-9, 301, Spacing::Linear)?)?,
                height: cfg.height()?,
                ..height_spec(cfg, Scenario::Custom)?
            };
            sweep_thickness_with(&spec, &opts)?
        }
    };
    emit_table(&table, cfg.out.as_deref(), out)
}

fn fig2(cfg: &RunConfig, out: &mut impl Write) -> anyhow::Result<()> {
    let table = sweep_height_with(&height_spec(cfg, Scenario::Fig2Ta2o5)?, &cfg.options()?)?;
    emit_table(&table, cfg.out.as_deref(), out)
}

/// One table per thickness: `--out dir/fig3.csv` writes `dir/fig3_d235.csv`
/// and so on; on stdout the tables become gnuplot data blocks, each headed
/// by a `# d_nm=` comment and separated by two blank lines.
fn fig3(cfg: &RunConfig, out: &mut impl Write) -> anyhow::Result<()> {
    let thicknesses = cfg.thicknesses_nm.clone().unwrap_or_default();
    if thicknesses.is_empty() {
        bail!("fig3 needs at least one thickness");
    }
    let opts = cfg.options()?;
    for (i, &d) in thicknesses.iter().enumerate() {
        let mut spec = height_spec(cfg, Scenario::Fig3Symmetric)?;
        spec.stack = spec.stack.with_thickness(d * 1e-9)?;
        let table = sweep_height_with(&spec, &opts)?;
        match &cfg.out {
            Some(path) => emit_table(&table, Some(&per_thickness_path(path, d)), out)?,
            None => {
                if i > 0 {
                    writeln!(out, "\n")?;
                }
                writeln!(out, "# d_nm={d}")?;
                table.write_csv(&mut *out)?;
            }
        }
    }
    Ok(())
}

fn per_thickness_path(path: &Path, d_nm: f64) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("fig3");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    path.with_file_name(format!("{stem}_d{d_nm}.{ext}"))
}

fn emit_table(table: &SweepTable, path: Option<&Path>, out: &mut impl Write) -> anyhow::Result<()> {
    match path {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            table.write_csv(&mut w)?;
            w.flush()?;
            let first = table.rows.first().map_or(0.0, |r| r.guided_sum);
            writeln!(
                out,
                "wrote {} rows to {} (first-row guided_sum={})",
                table.rows.len(),
                path.display(),
                format_number(first)
            )?;
        }
        None => table.write_csv(out)?,
    }
    Ok(())
}

fn optimize(cfg: &RunConfig, out: &mut impl Write) -> anyhow::Result<()> {
    let stack = cfg.guiding_stack()?;
    let ctx = cfg.ctx()?;
    let emitter = DipoleEmitter::new(cfg.orientation()?, cfg.height()?)?;
    let lo = cfg.d_min_nm.context("missing setting 'd_min_nm'")?;
    let hi = cfg.d_max_nm.context("missing setting 'd_max_nm'")?;
    let best = optimize_thickness(&stack, &ctx, &emitter, (lo * 1e-9, hi * 1e-9))?;
    writeln!(
        out,
        "d_opt_nm={} guided_sum={}",
        format_number(best.thickness * 1e9),
        format_number(best.guided_sum)
    )?;
    Ok(())
}

fn scaling(cfg: &RunConfig, out: &mut impl Write) -> anyhow::Result<()> {
    let stack = cfg.guiding_stack()?;
    let ctx = cfg.ctx()?;
    let emitter = DipoleEmitter::new(cfg.orientation()?, cfg.height()?)?;
    for &s in cfg.scales.as_deref().unwrap_or_default() {
        let dev = scaling_check(&stack, &ctx, &emitter, s)?;
        writeln!(out, "scale={} max_rel_deviation={}", format_number(s), format_number(dev))?;
    }
    Ok(())
}
