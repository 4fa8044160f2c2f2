//! Command-line front end. Every subcommand is turned into a [`RunConfig`]
//! and executed from it, so `--print-config` output can be replayed with
//! `run --config FILE`.

pub mod config;
pub mod run;

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand};

pub use config::{Format, LinearGrid, RunConfig, Window};
pub use run::{execute, render, Outcome};

use crate::error::{Error, Result};
use crate::lab::{DeltaGrid, Sampler};

#[derive(Parser, Debug)]
#[command(name = "torus-recur", version, about = "Quantitative recurrence for hyperbolic toral automorphisms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Matrix entries a,b,c,d of [[a, b], [c, d]].
    #[arg(short = 'm', long = "matrix", default_value = "2,1,1,1", allow_hyphen_values = true)]
    pub matrix: String,
    /// Output format (json, or csv for tabular results).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<String>,
    /// Upper bound on enumerated points and intervals.
    #[arg(long, default_value_t = config::DEFAULT_CAP)]
    pub cap: u64,
    /// Run even if the estimated runtime exceeds the guardrail.
    #[arg(long)]
    pub force: bool,
    /// Record wall-clock time (makes output non-reproducible).
    #[arg(long)]
    pub timing: bool,
    /// Print the resolved configuration instead of running.
    #[arg(long)]
    pub print_config: bool,
}

#[derive(Args, Debug, Clone)]
pub struct Rates {
    /// Decay rate: r_n = exp(-alpha n).
    #[arg(long, conflicts_with = "rates")]
    pub alpha: Option<f64>,
    /// File with one r_n per line (n = 1, 2, ...).
    #[arg(long)]
    pub rates: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct Layers {
    /// Layer index N, or a window LO:HI[:STEP].
    #[arg(short = 'n', long = "n", conflicts_with = "window")]
    pub n: Option<String>,
    /// Window LO:HI[:STEP].
    #[arg(long)]
    pub window: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Spectral data of the matrix.
    Analyze {
        #[command(flatten)]
        common: Common,
    },
    /// Period-n points as exact fractions.
    Periodic {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        layers: Layers,
        #[arg(long)]
        count_only: bool,
        /// Check the inner lattice and the denominator bound.
        #[arg(long)]
        check_lattice: bool,
    },
    /// Dimension formula over a grid of alpha.
    Curve {
        #[command(flatten)]
        common: Common,
        /// LO:HI:COUNT, evenly spaced.
        #[arg(long, default_value = run::DEFAULT_ALPHA_GRID)]
        alpha_grid: String,
    },
    /// Full recurrence layer: centres, radii and axes.
    Layer {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        rates: Rates,
        #[command(flatten)]
        layers: Layers,
    },
    /// Whether a point lies in the recurrence layers.
    Membership {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        rates: Rates,
        #[command(flatten)]
        layers: Layers,
        /// X,Y
        #[arg(long)]
        point: String,
    },
    /// Piece and total areas of the odd sublayers.
    Area {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        rates: Rates,
        #[command(flatten)]
        layers: Layers,
    },
    /// Terms of the two covering sums.
    Covering {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        rates: Rates,
        #[command(flatten)]
        layers: Layers,
        #[arg(short = 's')]
        s: f64,
    },
    /// Box-counting estimate over a window of layers.
    Boxcount {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        rates: Rates,
        #[command(flatten)]
        layers: Layers,
        /// LO:HI:COUNT, log-spaced.
        #[arg(long, default_value = run::DEFAULT_DELTA_GRID)]
        delta_grid: String,
    },
    /// Riesz energy of the layer measure (2D) or a slice measure (1D).
    Energy {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        rates: Rates,
        #[command(flatten)]
        layers: Layers,
        #[arg(long, default_value_t = 2)]
        dim: u8,
        #[arg(short = 's')]
        s: f64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = config::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value = "stratified")]
        sampler: Sampler,
        /// Slice abscissa for --dim 1.
        #[arg(long, default_value_t = run::DEFAULT_X0)]
        x0: f64,
    },
    /// Intervals cut by the odd sublayer on a vertical circle.
    Slice {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        rates: Rates,
        #[command(flatten)]
        layers: Layers,
        #[arg(long, default_value_t = run::DEFAULT_X0)]
        x0: f64,
    },
    /// Minimum distance between distinct pieces of the odd sublayer.
    Separation {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        rates: Rates,
        #[command(flatten)]
        layers: Layers,
    },
    /// Ratios mu_n(B) / L(B) over random balls.
    Uniformity {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        rates: Rates,
        #[command(flatten)]
        layers: Layers,
        #[arg(long, default_value_t = 100)]
        balls: usize,
        #[arg(long, default_value_t = 0.1)]
        radius: f64,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = config::DEFAULT_SEED)]
        seed: u64,
    },
    /// Potential inequality for the slice disintegration; without -n, the
    /// uniform product control case.
    Disintegration {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        rates: Rates,
        #[command(flatten)]
        layers: Layers,
        #[arg(short = 's')]
        s: f64,
        #[arg(short = 't')]
        t: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long, default_value_t = 2000)]
        fibers: usize,
        #[arg(long, default_value_t = config::DEFAULT_SEED)]
        seed: u64,
    },
    /// Execute a saved configuration.
    Run {
        #[arg(long)]
        config: String,
        #[arg(long)]
        print_config: bool,
    },
}

pub fn parse_matrix(s: &str) -> Result<[i64; 4]> {
    let v: Vec<i64> = s
        .split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|_| Error::invalid(format!("bad matrix entry {x:?}"))))
        .collect::<Result<_>>()?;
    v.try_into().map_err(|_| Error::invalid(format!("matrix needs four entries a,b,c,d, got {s:?}")))
}

fn parse_point(s: &str) -> Result<[f64; 2]> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| Error::invalid(format!("bad coordinate {x:?}"))))
        .collect::<Result<_>>()?;
    v.try_into().map_err(|_| Error::invalid(format!("point needs X,Y, got {s:?}")))
}

fn base(op: &str, c: &Common, default_format: Format) -> Result<RunConfig> {
    let mut cfg = RunConfig::new(op, parse_matrix(&c.matrix)?);
    cfg.cap = c.cap;
    cfg.format = c.format.unwrap_or(default_format);
    cfg.out = c.out.clone();
    cfg.force = c.force;
    cfg.timing = c.timing;
    Ok(cfg)
}

fn set_rates(cfg: &mut RunConfig, r: &Rates) {
    cfg.alpha = r.alpha;
    cfg.rates = r.rates.clone();
}

fn set_layers(cfg: &mut RunConfig, l: &Layers, default_step: u32) -> Result<()> {
    cfg.window = match (&l.n, &l.window) {
        (Some(s), _) | (None, Some(s)) => Some(Window::parse(s, default_step)?),
        (None, None) => None,
    };
    Ok(())
}

/// Resolves a parsed command line into a configuration and whether only
/// the configuration should be printed.
pub fn to_config(cmd: &Command) -> Result<(RunConfig, bool)> {
    use Command::*;
    let j = Format::Json;
    let (cfg, print) = match cmd {
        Analyze { common } => (base("analyze", common, j)?, common.print_config),
        Periodic { common, layers, count_only, check_lattice } => {
            let mut c = base("periodic", common, j)?;
            set_layers(&mut c, layers, 1)?;
            c.count_only = *count_only;
            c.check_lattice = *check_lattice;
            (c, common.print_config)
        }
        Curve { common, alpha_grid } => {
            let mut c = base("curve", common, Format::Csv)?;
            c.alpha_grid = Some(LinearGrid::parse(alpha_grid)?);
            (c, common.print_config)
        }
        Layer { common, rates, layers } => {
            let mut c = base("layer", common, j)?;
            set_rates(&mut c, rates);
            set_layers(&mut c, layers, 1)?;
            (c, common.print_config)
        }
        Membership { common, rates, layers, point } => {
            let mut c = base("membership", common, j)?;
            set_rates(&mut c, rates);
            set_layers(&mut c, layers, 1)?;
            c.point = Some(parse_point(point)?);
            (c, common.print_config)
        }
        Area { common, rates, layers } => {
            let mut c = base("area", common, j)?;
            set_rates(&mut c, rates);
            set_layers(&mut c, layers, 2)?;
            (c, common.print_config)
        }
        Covering { common, rates, layers, s } => {
            let mut c = base("covering", common, j)?;
            set_rates(&mut c, rates);
            set_layers(&mut c, layers, 1)?;
            c.s = Some(*s);
            (c, common.print_config)
        }
        Boxcount { common, rates, layers, delta_grid } => {
            let mut c = base("boxcount", common, j)?;
            set_rates(&mut c, rates);
            set_layers(&mut c, layers, 2)?;
            c.delta_grid = Some(DeltaGrid::parse(delta_grid)?);
            (c, common.print_config)
        }
        Energy { common, rates, layers, dim, s, samples, seed, sampler, x0 } => {
            let mut c = base("energy", common, j)?;
            set_rates(&mut c, rates);
            set_layers(&mut c, layers, 2)?;
            c.dim = Some(*dim);
            c.s = Some(*s);
            c.seed = Some(*seed);
            if *dim == 1 {
                c.x0 = Some(*x0);
            } else {
                c.samples = Some(*samples);
                c.sampler = Some(*sampler);
            }
            (c, common.print_config)
        }
        Slice { common, rates, layers, x0 } => {
            let mut c = base("slice", common, j)?;
            set_rates(&mut c, rates);
            set_layers(&mut c, layers, 2)?;
            c.x0 = Some(*x0);
            (c, common.print_config)
        }
        Separation { common, rates, layers } => {
            let mut c = base("separation", common, j)?;
            set_rates(&mut c, rates);
            set_layers(&mut c, layers, 2)?;
            (c, common.print_config)
        }
        Uniformity { common, rates, layers, balls, radius, samples, seed } => {
            let mut c = base("uniformity", common, j)?;
            set_rates(&mut c, rates);
            set_layers(&mut c, layers, 1)?;
            c.balls = Some(*balls);
            c.radius = Some(*radius);
            c.samples = Some(*samples);
            c.seed = Some(*seed);
            (c, common.print_config)
        }
        Disintegration { common, rates, layers, s, t, points, fibers, seed } => {
            let mut c = base("disintegration", common, j)?;
            set_rates(&mut c, rates);
            set_layers(&mut c, layers, 1)?;
            c.s = Some(*s);
            c.t = Some(*t);
            c.points = Some(*points);
            c.fibers = Some(*fibers);
            c.seed = Some(*seed);
            (c, common.print_config)
        }
        Run { config, print_config } => (RunConfig::from_json(&std::fs::read_to_string(config)?)?, *print_config),
    };
    Ok((cfg, print))
}

/// Runs the command line `args` and returns the process exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    crate::mc::configure_threads();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    1
                }
            };
        }
    };
    match run_cli(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn run_cli(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let (cfg, print) = to_config(&cli.command)?;
    let text = if print { cfg.to_json() + "\n" } else { render(&cfg)? };
    match &cfg.out {
        Some(path) if !print => std::fs::write(path, text)?,
        _ => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}
