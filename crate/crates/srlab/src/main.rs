//! Thin command-line front end over the experiment runners.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use srlab::error::{Error, Result};
use srlab::experiments::{self, RunContext};
use srlab::fp::FloatFormat;
use srlab::integrate::TableRounding;
use srlab::sr::SrMode;
use srlab::svg::{Plot, Series, SeriesKind};

#[derive(Parser)]
#[command(name = "srlab", version, about = "Stochastic rounding experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Master seed; falls back to the SR_SEED environment variable, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Floating-point format: "binary32" or "toy:P" with precision P.
    #[arg(long, global = true, default_value = "binary32")]
    format: String,

    /// Worker threads for sample generation (0 = automatic). Output bytes
    /// do not depend on this.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    /// Write output to this path instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Also write an SVG rendering next to the CSV (requires --output).
    #[arg(long, global = true)]
    emit_svg: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Per-step bias table of the accumulated partial sums of fl(1/N).
    BiasTable(BiasTableArgs),
    /// Repeated constant integration under the selected rounding modes.
    Integrate(IntegrateArgs),
    /// Bounds and sampled Horner errors across a grid of points.
    HornerXSweep(XSweepArgs),
    /// Condition-normalized bounds and errors across polynomial degrees.
    HornerNSweep(NSweepArgs),
    /// Run the self-check suites and report pass/fail per suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct BiasTableArgs {
    /// Number of integration steps N.
    #[arg(long)]
    n: u32,
    /// Trajectory used to advance the partial sums: up, nearest, or down.
    #[arg(long, default_value = "up")]
    trajectory: String,
}

#[derive(Args)]
struct IntegrateArgs {
    /// Comma-separated list of step counts.
    #[arg(long, value_delimiter = ',', required = true)]
    n_list: Vec<u32>,
    /// Stochastic samples per (N, mode).
    #[arg(long, default_value_t = 30)]
    samples: u64,
    /// Rounding modes: rn, sr-nearness, sr-up-down.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "rn,sr-nearness,sr-up-down"
    )]
    modes: Vec<String>,
}

#[derive(Args)]
struct XSweepArgs {
    /// Polynomial spec, currently "chebyshev:N" with even N.
    #[arg(long)]
    poly: String,
    /// Grid "start:end:count" with rational endpoints, e.g. "8/64:1:64".
    #[arg(long, default_value = "8/64:1:64")]
    x_grid: String,
    /// Failure probability of the probabilistic bound.
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    /// Stochastic samples per (point, mode).
    #[arg(long, default_value_t = 30)]
    samples: u64,
    #[arg(long, value_delimiter = ',', default_value = "rn,sr-nearness")]
    modes: Vec<String>,
}

#[derive(Args)]
struct NSweepArgs {
    /// Evaluation point as a rational "p/q".
    #[arg(long, default_value = "24/26")]
    x: String,
    /// Comma-separated even polynomial degrees.
    #[arg(long, value_delimiter = ',', required = true)]
    n_list: Vec<u32>,
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long, default_value_t = 30)]
    samples: u64,
    #[arg(long, value_delimiter = ',', default_value = "rn,sr-nearness")]
    modes: Vec<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name or "all".
    #[arg(long, default_value = "all")]
    suite: String,
    /// Randomized trials for the trial-based suites.
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    /// Invert the stochastic rounding law to prove the gates catch it.
    #[arg(long, hide = true)]
    inject_bias_bug: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version with success
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let seed = match cli.seed {
        Some(s) => s,
        None => std::env::var("SR_SEED")
            .ok()
            .map(|v| {
                v.parse::<u64>()
                    .map_err(|_| Error::Config(format!("SR_SEED must be a u64, got '{v}'")))
            })
            .transpose()?
            .unwrap_or(0),
    };
    let ctx = RunContext {
        format: parse_format(&cli.format)?,
        seed,
        threads: cli.threads,
    };

    let (text, svg, is_report_failure) = match &cli.command {
        Command::BiasTable(args) => {
            let csv =
                experiments::run_bias_table(args.n, TableRounding::parse(&args.trajectory)?, &ctx)?;
            let svg = cli.emit_svg.then(|| bias_table_plot(&csv));
            (csv, svg, false)
        }
        Command::Integrate(args) => {
            let modes = parse_modes(&args.modes)?;
            let csv = experiments::run_integrate(&args.n_list, args.samples, &modes, &ctx)?;
            let svg = cli.emit_svg.then(|| integrate_plot(&csv));
            (csv, svg, false)
        }
        Command::HornerXSweep(args) => {
            let degree = parse_poly(&args.poly)?;
            let (start, end, count) = parse_grid(&args.x_grid)?;
            let grid = experiments::uniform_grid(start, end, count, &ctx.format)?;
            let modes = parse_modes(&args.modes)?;
            let csv = experiments::run_horner_x_sweep(
                degree,
                &grid,
                args.lambda,
                args.samples,
                &modes,
                &ctx,
            )?;
            let svg = cli.emit_svg.then(|| x_sweep_plot(&csv));
            (csv, svg, false)
        }
        Command::HornerNSweep(args) => {
            let x = parse_ratio(&args.x)?;
            let modes = parse_modes(&args.modes)?;
            let csv = experiments::run_horner_n_sweep(
                x,
                &args.n_list,
                args.lambda,
                args.samples,
                &modes,
                &ctx,
            )?;
            let svg = cli.emit_svg.then(|| n_sweep_plot(&csv));
            (csv, svg, false)
        }
        Command::Verify(args) => {
            let suites: Vec<String> = if args.suite == "all" {
                experiments::ALL_SUITES
                    .iter()
                    .map(|s| s.to_string())
                    .collect()
            } else {
                vec![args.suite.clone()]
            };
            let outcomes =
                experiments::run_verify(&suites, args.trials, args.inject_bias_bug, &ctx)?;
            let failed = outcomes.iter().any(|o| !o.pass);
            (experiments::render_verify(&outcomes), None, failed)
        }
    };

    match &cli.output {
        Some(path) => {
            std::fs::write(path, &text)?;
            if let Some(svg) = svg {
                std::fs::write(path.with_extension("svg"), svg)?;
            }
        }
        None => {
            print!("{text}");
            if svg.is_some() {
                eprintln!("note: --emit-svg requires --output; skipped");
            }
        }
    }
    Ok(if is_report_failure {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn parse_format(s: &str) -> Result<FloatFormat> {
    if s == "binary32" {
        return Ok(FloatFormat::binary32());
    }
    if let Some(p) = s.strip_prefix("toy:") {
        let p: u32 = p
            .parse()
            .map_err(|_| Error::Config(format!("bad toy precision '{p}'")))?;
        return FloatFormat::toy(p);
    }
    Err(Error::Config(format!(
        "unknown format '{s}' (use binary32 or toy:P)"
    )))
}

fn parse_modes(list: &[String]) -> Result<Vec<SrMode>> {
    list.iter().map(|s| SrMode::parse(s)).collect()
}

fn parse_poly(s: &str) -> Result<u32> {
    s.strip_prefix("chebyshev:")
        .and_then(|d| d.parse().ok())
        .ok_or_else(|| Error::Config(format!("bad polynomial spec '{s}' (use chebyshev:N)")))
}

type Ratio = (i64, i64);

fn parse_ratio(s: &str) -> Result<Ratio> {
    let err = || Error::Config(format!("bad rational '{s}' (use p/q or an integer)"));
    if let Some((p, q)) = s.split_once('/') {
        let num = p.trim().parse().map_err(|_| err())?;
        let den: i64 = q.trim().parse().map_err(|_| err())?;
        if den == 0 {
            return Err(err());
        }
        Ok((num, den))
    } else {
        Ok((s.trim().parse().map_err(|_| err())?, 1))
    }
}

fn parse_grid(s: &str) -> Result<(Ratio, Ratio, u32)> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!(
            "bad grid '{s}' (use start:end:count)"
        )));
    }
    Ok((
        parse_ratio(parts[0])?,
        parse_ratio(parts[1])?,
        parts[2]
            .parse()
            .map_err(|_| Error::Config(format!("bad grid count '{}'", parts[2])))?,
    ))
}

// --- CSV -> quick-look plots -------------------------------------------------

fn csv_rows(csv: &str) -> impl Iterator<Item = Vec<&str>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').collect())
}

fn bias_table_plot(csv: &str) -> String {
    let mut bias = Vec::new();
    for cols in csv_rows(csv) {
        let k: f64 = cols[0].parse().unwrap_or(f64::NAN);
        let b: f64 = cols[5].parse().unwrap_or(f64::NAN);
        bias.push((k, b));
    }
    Plot {
        title: "Per-step up-or-down bias".into(),
        x_label: "step k".into(),
        y_label: "predicted bias".into(),
        log_x: false,
        log_y: false,
        series: vec![Series {
            label: "epsilon*(1/2-theta)".into(),
            color: "#d62728",
            kind: SeriesKind::Line,
            points: bias,
        }],
    }
    .render()
}

fn integrate_plot(csv: &str) -> String {
    let mut per_mode: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for cols in csv_rows(csv) {
        let n: f64 = cols[0].parse().unwrap_or(f64::NAN);
        let mode = cols[1].to_string();
        let err: f64 = cols[5].parse().unwrap_or(f64::NAN);
        match per_mode.iter_mut().find(|(m, _)| *m == mode) {
            Some((_, pts)) => pts.push((n, err)),
            None => per_mode.push((mode, vec![(n, err)])),
        }
    }
    let colors = ["#1f77b4", "#d62728", "#2ca02c"];
    Plot {
        title: "Accumulated integration error by rounding mode".into(),
        x_label: "steps N".into(),
        y_label: "result - 1".into(),
        log_x: false,
        log_y: false,
        series: per_mode
            .into_iter()
            .enumerate()
            .map(|(i, (label, points))| Series {
                label,
                color: colors[i % colors.len()],
                kind: SeriesKind::Scatter,
                points,
            })
            .collect(),
    }
    .render()
}

fn x_sweep_plot(csv: &str) -> String {
    let mut det = Vec::new();
    let mut prob = Vec::new();
    let mut rn = Vec::new();
    let mut sr = Vec::new();
    for cols in csv_rows(csv) {
        let x: f64 = cols[0].parse().unwrap_or(f64::NAN);
        match cols[6] {
            "single" => rn.push((x, cols[8].parse().unwrap_or(f64::NAN))),
            "sample" => sr.push((x, cols[8].parse().unwrap_or(f64::NAN))),
            "mean_of_errors" => {
                det.push((x, cols[3].parse().unwrap_or(f64::NAN)));
                prob.push((x, cols[4].parse().unwrap_or(f64::NAN)));
            }
            _ => {}
        }
    }
    Plot {
        title: "Forward error vs bounds across the grid".into(),
        x_label: "x".into(),
        y_label: "relative error".into(),
        log_x: false,
        log_y: true,
        series: vec![
            Series {
                label: "deterministic bound".into(),
                color: "#d62728",
                kind: SeriesKind::Line,
                points: det,
            },
            Series {
                label: "probabilistic bound".into(),
                color: "#ff7f0e",
                kind: SeriesKind::Line,
                points: prob,
            },
            Series {
                label: "stochastic samples".into(),
                color: "#1f77b4",
                kind: SeriesKind::Scatter,
                points: sr,
            },
            Series {
                label: "nearest".into(),
                color: "#2ca02c",
                kind: SeriesKind::Scatter,
                points: rn,
            },
        ],
    }
    .render()
}

fn n_sweep_plot(csv: &str) -> String {
    let mut det = Vec::new();
    let mut prob = Vec::new();
    let mut sr = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for cols in csv_rows(csv) {
        let deg: f64 = cols[0].parse().unwrap_or(f64::NAN);
        if cols[6] == "sample" {
            sr.push((deg, cols[8].parse().unwrap_or(f64::NAN)));
        }
        if seen.insert(cols[0].to_string()) {
            det.push((deg, cols[3].parse().unwrap_or(f64::NAN)));
            prob.push((deg, cols[4].parse().unwrap_or(f64::NAN)));
        }
    }
    Plot {
        title: "Condition-normalized error vs degree".into(),
        x_label: "degree".into(),
        y_label: "error / cond1".into(),
        log_x: false,
        log_y: true,
        series: vec![
            Series {
                label: "deterministic / cond".into(),
                color: "#d62728",
                kind: SeriesKind::Line,
                points: det,
            },
            Series {
                label: "probabilistic / cond".into(),
                color: "#ff7f0e",
                kind: SeriesKind::Line,
                points: prob,
            },
            Series {
                label: "stochastic samples".into(),
                color: "#1f77b4",
                kind: SeriesKind::Scatter,
                points: sr,
            },
        ],
    }
    .render()
}
