mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use commands::{Check, Usage};

#[derive(Debug, Parser)]
#[command(name = "invsq", version, about = "Experiments for the Schrödinger equation with an inverse-square potential")]
struct Cli {
    /// Flat key=value file; flags on the command line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the CSV here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Apply the acceptance thresholds and exit 1 if any is missed.
    #[arg(long, global = true)]
    check: bool,
    #[command(subcommand)]
    command: Command,
}

/// Dimension and coupling of `-Δ + a/|x|²`.
#[derive(Debug, Clone, Args)]
struct SetupArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    a: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit the three Bessel regime constants over a range of integer orders.
    BesselCheck {
        #[arg(long, default_value_t = 2)]
        kmin: u32,
        #[arg(long, default_value_t = 64)]
        kmax: u32,
        #[arg(long, default_value_t = 1e-2)]
        rmin: f64,
        #[arg(long, default_value_t = 2e3)]
        rmax: f64,
        #[arg(long, default_value_t = 40)]
        per_decade: usize,
    },
    /// Involution, isometry and self-adjointness residuals of the Hankel transform.
    HankelSelftest {
        #[command(flatten)]
        setup: SetupArgs,
        #[arg(long, default_value_t = 4)]
        kmax: usize,
        #[arg(long, default_value_t = 20.0)]
        rmax: f64,
        #[arg(long, default_value_t = 1024)]
        q: usize,
        /// gl or uniform.
        #[arg(long, default_value = "gl")]
        scheme: String,
        /// Also write the grid nodes and weights to this file.
        #[arg(long)]
        export_grid: Option<PathBuf>,
    },
    /// Operator norms of the composed dyadic projectors.
    OrthoScan {
        #[command(flatten)]
        setup: SetupArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [0, 1, 4])]
        k: Vec<usize>,
        #[arg(long, default_value_t = 6)]
        dmax: u32,
        #[arg(long, default_value_t = 16.0)]
        rmax: f64,
        #[arg(long, default_value_t = 512)]
        q: usize,
    },
    /// Ratio of the Hankel-side to the Fourier-side Sobolev norm over band-limited data.
    SobolevCheck {
        #[command(flatten)]
        setup: SetupArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [2, 3, 4])]
        k: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.25, 0.5, 1.0])]
        s: Vec<f64>,
        /// Largest frequency scale, as a power of two; scales step by half an octave from 1.
        #[arg(long, default_value_t = 3.0)]
        mmax_exp: f64,
    },
    /// Evolve radial data and print snapshots.
    Propagate {
        #[command(flatten)]
        setup: SetupArgs,
        #[arg(long, default_value_t = 0)]
        kmax: usize,
        #[arg(long, default_value_t = 12.0)]
        rmax: f64,
        #[arg(long, default_value_t = 768)]
        q: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.05, 0.1])]
        t: Vec<f64>,
        /// CSV of `r, Re a, Im a` rows; `# k=K ell=L` lines start a new mode.
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Weighted maximal norm against the Sobolev norm for data at growing frequency.
    MaximalScan {
        #[command(flatten)]
        setup: SetupArgs,
        #[arg(long, default_value_t = 1.1)]
        beta: f64,
        #[arg(long, default_value_t = 0.51)]
        s: f64,
        /// Frequency factors as `N1..N2`, stepping by powers of two.
        #[arg(long, default_value = "1..64")]
        scale_sweep: String,
        /// Time samples per `1/λ²`.
        #[arg(long, default_value_t = 10.0)]
        times: f64,
        #[arg(long, default_value_t = 4.0)]
        radius: f64,
    },
    /// Empirical norms of the linearized operator `T_ν` on random intervals.
    TnuBound {
        #[arg(long, default_value_t = 50.0)]
        nu_max: f64,
        #[arg(long, default_value_t = 5.0)]
        nu_step: f64,
        /// Random intervals per order.
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Random time selections per interval.
        #[arg(long, default_value_t = 20)]
        samples: usize,
        /// Rounds of coordinate ascent on the best selection of each interval.
        #[arg(long, default_value_t = 4)]
        ascent: usize,
        #[arg(long, default_value_t = 0x7e57)]
        seed: u64,
    },
    /// Maximal function of the focusing data against its Sobolev norm.
    Counterexample {
        #[command(flatten)]
        setup: SetupArgs,
        #[arg(long, default_value_t = 64.0)]
        nmin: f64,
        #[arg(long, default_value_t = 4096.0)]
        nmax: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [0.15, 0.25])]
        s: Vec<f64>,
    },
}

fn init_threads() -> Result<()> {
    let Ok(value) = std::env::var("HS_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Usage(format!("HS_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().context("configuring the thread pool")?;
    Ok(())
}

fn write_output(out: Option<&PathBuf>, csv: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, csv).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(csv.as_bytes()).and_then(|_| stdout.flush()) {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                other => Ok(other?),
            }
        }
    }
}

fn run(args: Vec<String>) -> Result<ExitCode> {
    let args = config::merge(args).map_err(|e| Usage(format!("{e:#}")))?;
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return Ok(ExitCode::from(if e.use_stderr() { 2 } else { 0 }));
        }
    };
    init_threads()?;
    let (mut report, checks) = commands::run(&cli.command)?;
    report.metadata.insert("command".into(), commands::name(&cli.command).into());
    for (key, value) in commands::echo(&cli.command) {
        report.metadata.insert(format!("config.{key}"), value);
    }
    if let Some(wall) = report.wall_time {
        log::info!("finished in {:.1}s", wall.as_secs_f64());
    }
    write_output(cli.out.as_ref(), &report.to_csv())?;
    if !cli.check {
        return Ok(ExitCode::SUCCESS);
    }
    for c in &checks {
        eprintln!("check {}: {} {}", c.name, if c.pass { "PASS" } else { "FAIL" }, c.detail);
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c: &Check| c.name.as_str()).collect();
    if failed.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("failed checks: {}", failed.join(", "));
        Ok(ExitCode::from(1))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(std::env::args().collect()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
