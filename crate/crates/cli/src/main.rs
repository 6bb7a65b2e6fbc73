use std::f64::consts::TAU;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use qmetro::bounds::{bound_report, state_bound_report};
use qmetro::infotheory::{nats_to_bits, prior_entropy};
use qmetro::simulate::{iterative_state, run_iterative, run_single_shot_with, Ladder};
use qmetro::verify::{run_checks_with, VerifyOptions};
use qmetro::{
    BoundReport, EstimationReport, Family, Generator, IterativeConfig, PriorDistribution, ProbeState, SingleShotConfig,
    WindowUpdate,
};

#[derive(Parser)]
#[command(name = "qmetro", version, about = "Phase-estimation bounds and Monte Carlo estimation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cramér-Rao, entropic and asymptotic bounds per family and photon number, as CSV.
    Bounds(BoundsArgs),
    /// `bounds` for the ECS and coherent-pair families over n = 1..100.
    Fig3(BoundsArgs),
    /// Single-shot canonical-phase estimation of one probe state.
    Simulate(SimulateArgs),
    /// Bit-by-bit estimation with a ladder of probe states.
    Iterate(IterateArgs),
    /// Run the self-checks; exits 1 if any fails.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Units {
    Nats,
    Bits,
}

impl Units {
    fn convert(self, nats: f64) -> f64 {
        match self {
            Units::Nats => nats,
            Units::Bits => nats_to_bits(nats),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Units::Nats => "nats",
            Units::Bits => "bits",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Window {
    Recentre,
    Bisect,
}

#[derive(Args)]
struct BoundsArgs {
    /// Families, comma separated: ecs, coh, noon.
    #[arg(long, value_delimiter = ',')]
    family: Vec<Family>,
    /// Photon numbers, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "n_range")]
    n: Vec<f64>,
    /// Evenly spaced photon numbers `lo:hi:count`. NOON rows are only
    /// emitted for integer n.
    #[arg(long)]
    n_range: Option<String>,
    #[arg(long, default_value = "uniform")]
    prior: PriorDistribution,
    #[arg(long, value_enum, default_value = "nats")]
    units: Units,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    state: ProbeState,
    #[arg(long, default_value = "uniform")]
    prior: PriorDistribution,
    /// Draws per grid point.
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    #[arg(long, default_value_t = 64)]
    grid: usize,
    #[arg(long, default_value_t = 64)]
    bins: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "nats")]
    units: Units,
    /// Report destination: full report as JSON or the curves as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct IterateArgs {
    #[arg(long, default_value = "coh")]
    family: Family,
    #[arg(long, default_value_t = 5)]
    bits: u32,
    #[arg(long, default_value_t = 8)]
    copies: u32,
    /// Independent runs of the whole scheme.
    #[arg(long, default_value_t = 4000)]
    trials: usize,
    #[arg(long, default_value_t = 64)]
    bins: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "recentre")]
    window: Window,
    #[arg(long, value_enum, default_value = "nats")]
    units: Units,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    /// Perturb the closed forms so the checks must fail.
    #[arg(long, hide = true)]
    mutate: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bounds(args) => cmd_bounds(args, &Family::ALL),
        Command::Fig3(args) => cmd_bounds(args, &[Family::Ecs, Family::Coh]),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Iterate(args) => cmd_iterate(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if is_usage_error(&e) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn is_usage_error(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.is::<UsageError>()
            || matches!(
                c.downcast_ref::<qmetro::Error>(),
                Some(
                    qmetro::Error::InvalidState(_)
                        | qmetro::Error::InvalidPrior(_)
                        | qmetro::Error::InvalidParameter(_)
                        | qmetro::Error::Unsupported(_)
                        | qmetro::Error::Parse { .. }
                )
            )
    })
}

fn open_out(path: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn parse_sweep(args: &BoundsArgs) -> anyhow::Result<Vec<f64>> {
    let ns = match &args.n_range {
        Some(spec) => {
            let parts: Vec<&str> = spec.split(':').collect();
            let [lo, hi, count] = parts[..] else {
                return Err(usage(format!("--n-range {spec:?}: expected lo:hi:count")));
            };
            let lo: f64 = lo.trim().parse().map_err(|_| usage(format!("--n-range: bad lower end {lo:?}")))?;
            let hi: f64 = hi.trim().parse().map_err(|_| usage(format!("--n-range: bad upper end {hi:?}")))?;
            let count: usize = count.trim().parse().map_err(|_| usage(format!("--n-range: bad count {count:?}")))?;
            match count {
                0 => return Err(usage("--n-range: count must be positive")),
                1 => vec![lo],
                _ => (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect(),
            }
        }
        None if args.n.is_empty() => (1..=100).map(f64::from).collect(),
        None => args.n.clone(),
    };
    if ns.iter().any(|n| !(n.is_finite() && *n > 0.0)) {
        return Err(usage("photon numbers must be positive"));
    }
    if ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(usage("photon numbers must be strictly ascending"));
    }
    Ok(ns)
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn bounds_row(n: f64, r: &BoundReport, units: Units) -> Vec<String> {
    vec![
        r.family.map(|f| f.to_string()).unwrap_or_default(),
        num(n),
        r.alpha.map(num).unwrap_or_default(),
        num(r.delta_g),
        num(units.convert(r.entropy_g)),
        num(r.cr_bound),
        num(r.entropic_bound),
        r.asymptotic_bound.map(num).unwrap_or_default(),
    ]
}

fn cmd_bounds(args: BoundsArgs, default_families: &[Family]) -> anyhow::Result<ExitCode> {
    let families = if args.family.is_empty() { default_families.to_vec() } else { args.family.clone() };
    let ns = parse_sweep(&args)?;
    let h_prior = prior_entropy(&args.prior);
    let mut w = csv::Writer::from_writer(open_out(&args.out)?);
    w.write_record([
        "family",
        "n",
        "alpha",
        "delta_g",
        &format!("entropy_g_{}", args.units.name()),
        "cr_bound",
        "entropic_bound",
        "asymptotic_bound",
    ])?;
    for &family in &families {
        for &n in &ns {
            if family == Family::Noon && n.fract() != 0.0 {
                continue;
            }
            let r = bound_report(family, n, h_prior)?;
            w.write_record(bounds_row(n, &r, args.units))?;
        }
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn is_full_circle(prior: &PriorDistribution) -> bool {
    (prior.support().1 - TAU).abs() < 1e-5
}

fn print_bounds(r: &BoundReport, prior: &PriorDistribution, units: Units) {
    println!("delta_g                  {}", r.delta_g);
    println!("entropy_g ({})         {}", units.name(), units.convert(r.entropy_g));
    println!("cr_bound                 {}", r.cr_bound);
    println!("entropic_bound           {}", r.entropic_bound);
    if is_full_circle(prior) {
        println!("variance_entropic_bound  {}", r.variance_entropic_bound);
    }
}

fn print_measured(report: &EstimationReport, units: Units) {
    println!("rmse_average             {} +- {}", report.rmse_average, report.rmse_average_se);
    if let (Some(q), Some(se)) = (report.rmse_quadrature, report.rmse_quadrature_se) {
        println!("rmse_quadrature          {q} +- {se}");
    }
    println!("mutual_info ({})       {}", units.name(), units.convert(report.mutual_info_nats));
}

fn write_report(report: &EstimationReport, path: &Path, format: Format) -> anyhow::Result<()> {
    let ctx = || format!("writing {}", path.display());
    let mut w = BufWriter::new(File::create(path).with_context(ctx)?);
    match format {
        Format::Json => serde_json::to_writer_pretty(&mut w, report).with_context(ctx)?,
        Format::Csv => match &report.iterative {
            None => report.write_curves_csv(&mut w).with_context(ctx)?,
            Some(s) => {
                let mut c = csv::Writer::from_writer(&mut w);
                c.write_record([
                    "family",
                    "bits",
                    "copies",
                    "total_n",
                    "rmse_average",
                    "rmse_average_se",
                    "rmse_ci95_lo",
                    "rmse_ci95_hi",
                    "scaling_target",
                    "mutual_info_nats",
                ])?;
                c.write_record([
                    s.family.to_string(),
                    s.m_bits.to_string(),
                    s.copies.to_string(),
                    num(report.total_resources_n),
                    num(report.rmse_average),
                    num(report.rmse_average_se),
                    num(s.rmse_ci95.0),
                    num(s.rmse_ci95.1),
                    num(s.scaling_target),
                    num(report.mutual_info_nats),
                ])?;
                c.flush().with_context(ctx)?;
            }
        },
    }
    w.flush().with_context(ctx)?;
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> anyhow::Result<ExitCode> {
    let config = SingleShotConfig {
        trials: args.trials,
        phi_grid: args.grid,
        bins: args.bins,
        seed: args.seed,
        ..SingleShotConfig::default()
    };
    let report = run_single_shot_with(&args.state, &args.prior, &config)?;
    let bounds = state_bound_report(&args.state, Generator::N2, prior_entropy(&args.prior))?;
    println!("state                    {}", args.state);
    println!("prior                    {}", args.prior);
    print_bounds(&bounds, &args.prior, args.units);
    print_measured(&report, args.units);
    if let Some(path) = &args.out {
        write_report(&report, path, args.format)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_iterate(args: IterateArgs) -> anyhow::Result<ExitCode> {
    let config = IterativeConfig {
        family: args.family,
        m_bits: args.bits,
        copies: args.copies,
        trials: args.trials,
        seed: args.seed,
        window_update: match args.window {
            Window::Recentre => WindowUpdate::Recentre,
            Window::Bisect => WindowUpdate::Bisect,
        },
        bins: args.bins,
        ..IterativeConfig::default()
    };
    let report = run_iterative(&config)?;
    let s = report.iterative.as_ref().context("iterative summary missing")?;
    let state = iterative_state(args.family, args.bits, args.copies, s.ladder)?;
    let prior = PriorDistribution::full();
    let bounds = state_bound_report(&state, Generator::NTotal, prior_entropy(&prior))?;
    println!("family                   {}", args.family);
    println!("ladder                   {}", ladder_name(s.ladder));
    println!("bits, copies             {}, {}", s.m_bits, s.copies);
    println!("total_n                  {}", report.total_resources_n);
    print_bounds(&bounds, &prior, args.units);
    println!("scaling_target           {}", s.scaling_target);
    println!("target_resolution        {}", s.target_resolution);
    print_measured(&report, args.units);
    println!("rmse_ci95                [{}, {}]", s.rmse_ci95.0, s.rmse_ci95.1);
    if let Some(path) = &args.out {
        write_report(&report, path, args.format)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn ladder_name(l: Ladder) -> &'static str {
    match l {
        Ladder::Quadrupling => "quadrupling",
        Ladder::Doubling => "doubling",
    }
}

fn cmd_verify(args: VerifyArgs) -> anyhow::Result<ExitCode> {
    let checks = run_checks_with(VerifyOptions { mutate: args.mutate })?;
    for c in &checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} checks, {failed} failed", checks.len());
    Ok(if failed > 0 { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sweep(args: &[&str]) -> anyhow::Result<Vec<f64>> {
        let cli = Cli::try_parse_from(["qmetro", "bounds"].iter().chain(args)).unwrap();
        let Command::Bounds(b) = cli.command else { unreachable!() };
        parse_sweep(&b)
    }

    #[test]
    fn sweeps() {
        assert_eq!(sweep(&["--n-range", "2:4:3"]).unwrap(), [2.0, 3.0, 4.0]);
        assert_eq!(sweep(&["--n", "1,5"]).unwrap(), [1.0, 5.0]);
        assert_eq!(sweep(&[]).unwrap().len(), 100);
        for bad in [&["--n-range", "2:4"][..], &["--n-range", "0:4:3"], &["--n-range", "1:4:0"], &["--n=-1"]] {
            assert!(is_usage_error(&sweep(bad).unwrap_err()), "{bad:?}");
        }
    }

    #[test]
    fn conflicting_sweeps_are_rejected() {
        assert!(Cli::try_parse_from(["qmetro", "bounds", "--n", "1", "--n-range", "1:2:2"]).is_err());
    }
}
