//! The `smhk` command-line tool.
//!
//! Exit statuses: 0 on success, 1 when a check or solver fails, 2 on usage or
//! parameter-validation errors.

pub mod grid;
pub mod output;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::error::Error;
use crate::oracle::{optimize_weights, OracleConfig};
use crate::sim::{decay_rate, simulate, SimConfig, INITIAL_DISTRIBUTION};
use crate::spectral::{assemble_full, slem_full};
use crate::topology::{validate_params, SmhkParams};
use crate::verify::{verify_params, VerifyOptions};
use crate::weights::{analytical_weights, OrbitWeights};

use grid::GridSpec;
use output::{fmt_float, render_sim_csv, render_sweep_csv, SweepRecord, WeightsReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "smhk",
    version,
    about = "Optimal consensus weights for star-mesh hybrid networks with a K-partite core"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form optimal weights and SLEM for one network.
    Weights {
        #[command(flatten)]
        order: Order,
        /// Emit JSON.
        #[arg(long)]
        json: bool,
        /// Also run the numerical oracle and report its SLEM.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// SLEM over a grid of (n, k) at fixed m and L.
    SweepNk {
        #[arg(short = 'm', default_value_t = 2)]
        m: usize,
        #[arg(short = 'L', default_value_t = 2)]
        l: usize,
        /// Ranges for n and k, e.g. `n=2..6,k=2..5`.
        #[arg(long, default_value = "n=2..6,k=2..5")]
        grid: String,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// SLEM over a grid of (m, L) at fixed n and k.
    SweepMl {
        #[arg(short = 'n', default_value_t = 3)]
        n: usize,
        #[arg(short = 'k', default_value_t = 2)]
        k: usize,
        /// Ranges for m and L, e.g. `m=1..5,L=1..5`.
        #[arg(long, default_value = "m=1..5,L=1..5")]
        grid: String,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run the consensus iteration from random starts.
    Simulate {
        #[command(flatten)]
        order: Order,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 200)]
        iters: usize,
        /// JSON file with a `weights` array (as written by `weights --json`);
        /// defaults to the analytical optimum.
        #[arg(long)]
        weights_file: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Check every invariant for one network or a grid of networks.
    Verify {
        #[arg(short = 'n')]
        n: Option<usize>,
        #[arg(short = 'k')]
        k: Option<usize>,
        #[arg(short = 'm')]
        m: Option<usize>,
        #[arg(short = 'L')]
        l: Option<usize>,
        /// Grid such as `n=2..3,k=2..3,m=1..3,L=1..3`; unset parameters use
        /// the flags or the default grid n,k in 2..4 and m,L in 1..3.
        #[arg(long)]
        grid: Option<String>,
        /// Include the numerical-oracle comparison.
        #[arg(long)]
        oracle: bool,
        /// Shift the analytical w0 before checking the optimum.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        perturb_w0: f64,
        /// Random weight vectors per cell for the weight-independent checks.
        #[arg(long, default_value_t = 3)]
        random: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
pub struct Order {
    #[arg(short = 'n')]
    pub n: usize,
    #[arg(short = 'k')]
    pub k: usize,
    #[arg(short = 'm')]
    pub m: usize,
    #[arg(short = 'L')]
    pub l: usize,
}

impl Order {
    fn validate(&self) -> crate::Result<SmhkParams> {
        validate_params(self.n, self.k, self.m, self.l)
    }
}

/// Parses `args` and runs the command, writing results to `out` and
/// diagnostics to `err`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(Failure { code, message }) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::TooFewSets(_)
            | Error::TooFewStars(_)
            | Error::PathTooShort(_)
            | Error::TooFewBranches(_)
            | Error::WeightLength { .. }
            | Error::NonFiniteWeight { .. } => EXIT_USAGE,
            _ => EXIT_FAILED,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_FAILED,
        message: e.to_string(),
    }
}

fn emit(text: &str, path: Option<&PathBuf>, out: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(path) => fs::write(path, text).map_err(io_failure),
        None => out.write_all(text.as_bytes()).map_err(io_failure),
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Weights {
            order,
            json,
            oracle,
            seed,
        } => cmd_weights(&order.validate()?, json, oracle, seed, out),
        Command::SweepNk { m, l, grid, csv } => {
            let grid = GridSpec::parse(&grid).map_err(usage)?;
            let cells = cells(&grid.or('n', 2), &grid.or('k', 2), &(m..=m), &(l..=l));
            let meta = vec![format!("sweep over n,k with m={m} L={l}")];
            let text = sweep(&cells, &meta, err)?;
            emit(&text, csv.as_ref(), out)?;
            Ok(EXIT_OK)
        }
        Command::SweepMl { n, k, grid, csv } => {
            let grid = GridSpec::parse(&grid).map_err(usage)?;
            let cells = cells(&(n..=n), &(k..=k), &grid.or('m', 1), &grid.or('L', 1));
            let meta = vec![format!("sweep over m,L with n={n} k={k}")];
            let text = sweep(&cells, &meta, err)?;
            emit(&text, csv.as_ref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Simulate {
            order,
            seed,
            trials,
            iters,
            weights_file,
            csv,
        } => {
            let params = order.validate()?;
            let cfg = SimConfig {
                trials,
                iterations: iters,
                seed,
            };
            let text = cmd_simulate(&params, weights_file.as_ref(), &cfg)?;
            emit(&text, csv.as_ref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            n,
            k,
            m,
            l,
            grid,
            oracle,
            perturb_w0,
            random,
            seed,
        } => {
            let grid = match grid {
                Some(spec) => GridSpec::parse(&spec).map_err(usage)?,
                None => GridSpec::default(),
            };
            let pick =
                |name: char, flag: Option<usize>, default: std::ops::RangeInclusive<usize>| {
                    grid.get(name).or(flag.map(|v| v..=v)).unwrap_or(default)
                };
            let axes = [
                pick('n', n, 2..=4),
                pick('k', k, 2..=4),
                pick('m', m, 1..=3),
                pick('L', l, 1..=3),
            ];
            let opts = VerifyOptions {
                oracle,
                perturb_w0,
                random_weights: random,
                seed,
            };
            cmd_verify(&axes, &opts, out)
        }
    }
}

fn cmd_weights(
    params: &SmhkParams,
    json: bool,
    oracle: bool,
    seed: u64,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let sol = analytical_weights(params)?;
    let mut report = WeightsReport::from_solution(&sol);
    if oracle {
        let mut cfg = OracleConfig::for_params(params);
        cfg.seed = seed;
        report.oracle_slem = Some(optimize_weights(params, &cfg)?.slem);
    }
    let text = if json {
        format!("{}\n", report.to_json())
    } else {
        let mut text = format!(
            "{params}\ntheta    = {}\nslem     = {}\nresidual = {:e}\n",
            report.theta, report.slem, report.residual
        );
        for (q, w) in report.weights.iter().enumerate() {
            text.push_str(&format!("w{q:<7} = {w}\n"));
        }
        if let Some(o) = report.oracle_slem {
            text.push_str(&format!("oracle   = {o}\n"));
        }
        text
    };
    out.write_all(text.as_bytes()).map_err(io_failure)?;
    Ok(EXIT_OK)
}

type Axis = std::ops::RangeInclusive<usize>;

fn cells(n: &Axis, k: &Axis, m: &Axis, l: &Axis) -> Vec<(usize, usize, usize, usize)> {
    let mut out = Vec::new();
    for n in n.clone() {
        for k in k.clone() {
            for m in m.clone() {
                for l in l.clone() {
                    out.push((n, k, m, l));
                }
            }
        }
    }
    out
}

/// Renders a sweep CSV; rows follow `cells` order.
fn sweep(
    cells: &[(usize, usize, usize, usize)],
    meta: &[String],
    err: &mut dyn Write,
) -> Result<String, Failure> {
    let results: Vec<Result<(f64, f64), Error>> = cells
        .par_iter()
        .map(|&(n, k, m, l)| {
            let sol = analytical_weights(&validate_params(n, k, m, l)?)?;
            Ok((sol.slem, sol.theta))
        })
        .collect();
    let mut rows = Vec::with_capacity(cells.len());
    for (&(n, k, m, l), res) in cells.iter().zip(results) {
        let (slem, theta) = match res {
            Ok((s, t)) => (Some(s), Some(t)),
            Err(e) => {
                let _ = writeln!(err, "warning: n={n} k={k} m={m} L={l}: {e}");
                (None, None)
            }
        };
        rows.push(SweepRecord {
            n,
            k,
            m,
            l,
            slem,
            theta,
        });
    }
    Ok(render_sweep_csv(meta, &rows))
}

fn cmd_simulate(
    params: &SmhkParams,
    weights_file: Option<&PathBuf>,
    cfg: &SimConfig,
) -> Result<String, Failure> {
    let (weights, source) = match weights_file {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(io_failure)?;
            let value: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| usage(format!("{}: {e}", path.display())))?;
            let raw: Vec<f64> = serde_json::from_value(value["weights"].clone())
                .map_err(|e| usage(format!("{}: weights: {e}", path.display())))?;
            (
                OrbitWeights::for_params(params, raw)?,
                format!("file:{}", path.display()),
            )
        }
        None => (
            analytical_weights(params)?.weights,
            "analytical".to_string(),
        ),
    };
    let slem = slem_full(&assemble_full(params, &weights)?)?.slem;
    let stats = simulate(params, &weights, cfg)?;
    let rate = decay_rate(&stats, None).ok();
    let meta = vec![
        format!("{params}"),
        format!("weights={source}"),
        format!("seed={}", cfg.seed),
        format!("trials={}", cfg.trials),
        format!("iterations={}", cfg.iterations),
        format!("distribution={INITIAL_DISTRIBUTION}"),
        "aggregate=geometric_mean".to_string(),
        format!("slem={}", fmt_float(slem)),
        format!("fitted_rate={}", rate.map(fmt_float).unwrap_or_default()),
    ];
    Ok(render_sim_csv(&meta, &stats.geo_mean))
}

fn cmd_verify(axes: &[Axis; 4], opts: &VerifyOptions, out: &mut dyn Write) -> Result<i32, Failure> {
    let cells = cells(&axes[0], &axes[1], &axes[2], &axes[3]);
    let mut params = Vec::with_capacity(cells.len());
    for &(n, k, m, l) in &cells {
        params.push(validate_params(n, k, m, l)?);
    }
    let reports: Vec<_> = params.par_iter().map(|p| verify_params(p, opts)).collect();
    let mut failed_cells = 0;
    let mut text = String::new();
    for report in &reports {
        let passed = report.checks.iter().filter(|c| c.pass).count();
        let status = if report.all_pass() { "PASS" } else { "FAIL" };
        text.push_str(&format!(
            "{status} {} checks={}/{} slem={}\n",
            report.params,
            passed,
            report.checks.len(),
            report.slem.map(fmt_float).unwrap_or_default()
        ));
        for check in report.failures() {
            text.push_str(&format!("  FAIL {}: {}\n", check.name, check.detail));
        }
        if !report.all_pass() {
            failed_cells += 1;
        }
    }
    text.push_str(&format!(
        "{} of {} cells passed\n",
        reports.len() - failed_cells,
        reports.len()
    ));
    out.write_all(text.as_bytes()).map_err(io_failure)?;
    Ok(if failed_cells == 0 {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}
