use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cf_lattice::gaussian::{build_sum_codebook, union_bound};
use cf_lattice::lattice::minimum_distance;
use cf_lattice::selection::{computation_rate, optimal_alpha, optimal_coefficients, ChannelRealization, NetworkCodeVector};
use cf_lattice::sim::config::{ConfigError, SimConfig};
use cf_lattice::sim::profile::likelihood_profile_for;
use cf_lattice::sim::{sweep_fading, sweep_gaussian, write_csv};

#[derive(Parser)]
#[command(name = "cf-lattice", version, about = "Compute-and-forward lattice decoding experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Computation rate for the [channel] table.
    Rate(Common),
    /// Optimal network code vector and MMSE scaling for the [channel] table.
    Coeffs(Common),
    /// Likelihood φ(t) over the candidate set for the [profile] table.
    LikelihoodProfile(Common),
    /// Union bound against SNR for the [code] table.
    Bound(Common),
    /// Error-rate sweep on the fading MAC.
    SimFading(Common),
    /// Error-rate sweep on the Gaussian MAC.
    SimGaussian(Common),
}

enum Failure {
    Config(ConfigError),
    Run(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

fn config_err(msg: impl ToString) -> Failure {
    Failure::Config(ConfigError::Invalid(msg.to_string()))
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| Failure::Run(format!("{}: {e}", p.display())))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load(c: &Common) -> Result<SimConfig, Failure> {
    let mut cfg = SimConfig::load(&c.config)?;
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn channel(cfg: &SimConfig) -> Result<(ChannelRealization, Option<NetworkCodeVector>, Option<f64>), Failure> {
    let ch = cfg.channel.as_ref().ok_or_else(|| config_err("missing [channel] table"))?;
    let real = ChannelRealization::from_snr_db(ch.h.clone(), ch.snr_db, 1.0).map_err(config_err)?;
    let a = ch.a.clone().map(NetworkCodeVector::new).transpose().map_err(config_err)?;
    Ok((real, a, ch.alpha))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Rate(c) => {
            let cfg = load(&c)?;
            let (ch, a, alpha) = channel(&cfg)?;
            write_rate(&c, &ch, a, alpha)?;
        }
        Command::Coeffs(c) => {
            let cfg = load(&c)?;
            let (ch, _, _) = channel(&cfg)?;
            write_rate(&c, &ch, None, None)?;
        }
        Command::LikelihoodProfile(c) => {
            let cfg = load(&c)?;
            let sec = cfg.profile.as_ref().ok_or_else(|| config_err("missing [profile] table"))?;
            let p = likelihood_profile_for(sec).map_err(config_err)?;
            let mut w = open_output(c.out.as_deref())?;
            writeln!(w, "t,phi,log_phi")?;
            for r in &p.rows {
                writeln!(w, "{},{:.9e},{}", r.t, r.phi, r.log_phi)?;
            }
            w.flush()?;
            eprintln!(
                "a = ({}), alpha = {:.6}, y~ = {:.6}, t = {}, argmax = {:?}",
                join(&p.a),
                p.alpha,
                p.y_tilde,
                p.t_true,
                p.argmax()
            );
        }
        Command::Bound(c) => {
            let cfg = load(&c)?;
            let sec = cfg.code.as_ref().ok_or_else(|| config_err("missing [code] table"))?;
            let snr = cfg.snr_db.as_ref().ok_or_else(|| config_err("missing snr_db"))?.values()?;
            let code = sec.build()?;
            let sum = build_sum_codebook(&code, sec.sources).map_err(config_err)?;
            let d_min = minimum_distance(code.fine()).map_err(|e| Failure::Run(e.to_string()))?;
            let mut w = open_output(c.out.as_deref())?;
            writeln!(w, "snr_db,noise_var,union_bound")?;
            for s in snr {
                let nv = code.second_moment() / cf_lattice::selection::db_to_linear(s);
                writeln!(w, "{s},{nv:.9e},{:.9e}", union_bound(&sum, d_min, nv.sqrt()))?;
            }
            w.flush()?;
        }
        Command::SimFading(c) => {
            let cfg = load(&c)?;
            let plan = cfg.fading_plan()?;
            let curves = sweep_fading(&plan);
            let out = c.out.or(cfg.output.clone());
            write_csv(open_output(out.as_deref())?, &curves)?;
        }
        Command::SimGaussian(c) => {
            let cfg = load(&c)?;
            let plan = cfg.gaussian_plan()?;
            let curves = sweep_gaussian(&plan).map_err(|e| Failure::Run(e.to_string()))?;
            let out = c.out.or(cfg.output.clone());
            write_csv(open_output(out.as_deref())?, &curves)?;
        }
    }
    Ok(())
}

/// Writes `a, α, R`, filling in the optimal `a` and MMSE `α` when not given.
fn write_rate(c: &Common, ch: &ChannelRealization, a: Option<NetworkCodeVector>, alpha: Option<f64>) -> Result<(), Failure> {
    let a = match a {
        Some(a) => a,
        None => optimal_coefficients(ch).map_err(config_err)?,
    };
    let alpha = match alpha {
        Some(v) => v,
        None => optimal_alpha(ch, &a).map_err(config_err)?,
    };
    let rate = computation_rate(ch, &a, alpha).map_err(config_err)?;
    let mut w = open_output(c.out.as_deref())?;
    writeln!(w, "a,alpha,rate")?;
    writeln!(w, "{},{alpha},{rate}", join(a.as_slice()))?;
    w.flush()?;
    Ok(())
}

fn join(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
