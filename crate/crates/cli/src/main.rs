use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use conormal_cli::commands::{cmd_catalog, cmd_extend, cmd_gaussian, cmd_star, cmd_t2};
use conormal_cli::{exit, parse_variety, CliError, Report, RunConfig, Session};

#[derive(Parser)]
#[command(name = "conormal", version, about = "Torsion of the conormal module and extendability of canonical curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// h1(I^2(k)) for 0 <= k <= kmax and the verdict on vanishing for k >= 3.
    Star(VarietyArgs),
    /// Gaussian wedge kernel, h1(I^2(2)) and the corank for canonical curves.
    Gaussian(VarietyArgs),
    /// Graded pieces of T2 in degrees -kmax..0.
    T2(VarietyArgs),
    /// Lifts every first-order deformation of a canonical curve.
    Extend(VarietyArgs),
    /// Runs a named suite (acceptance, veronese, gaussian, grassmannian,
    /// points, complete-intersections, tetragonal, pentagonal, septic, properties).
    Catalog {
        suite: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct VarietyArgs {
    /// Variety spec such as `veronese:1,4` or `tetragonal:2,2,1,b=1,2`.
    #[arg(long)]
    variety: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 6)]
    kmax: u32,
    #[arg(long)]
    prime: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, env = "CONORMAL_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    window: u32,
    #[arg(long, default_value_t = 6)]
    mcap: u32,
}

impl Common {
    fn config(&self) -> RunConfig {
        let mut cfg = RunConfig {
            k_max: self.kmax,
            seed: self.seed,
            jobs: self.jobs,
            cache_dir: self.cache_dir.clone(),
            out: self.out.clone(),
            window: self.window,
            m_cap: self.mcap,
            ..RunConfig::default()
        };
        if let Some(p) = self.prime {
            cfg.retry_primes.retain(|&q| q != p);
            cfg.prime = p;
        }
        cfg
    }
}

fn run(cli: Cli) -> Result<(Report, Option<PathBuf>), CliError> {
    let (common, report) = match &cli.command {
        Command::Star(a) | Command::Gaussian(a) | Command::T2(a) | Command::Extend(a) => {
            let session = Session::new(a.common.config())?;
            let spec = parse_variety(&a.variety, session.cfg.seed)?;
            let k = session.cfg.k_max;
            let report = match cli.command {
                Command::Star(_) => cmd_star(&session, &spec, k),
                Command::Gaussian(_) => cmd_gaussian(&session, &spec),
                Command::T2(_) => cmd_t2(&session, &spec, k),
                _ => cmd_extend(&session, &spec),
            };
            (&a.common, report)
        }
        Command::Catalog { suite, common } => {
            let session = Session::new(common.config())?;
            (common, cmd_catalog(&session, suite)?)
        }
    };
    Ok((report, common.out.clone()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((report, out)) => {
            let json = serde_json::to_string_pretty(&report).expect("reports serialize");
            let written = match out {
                Some(path) => std::fs::write(&path, json + "\n").map_err(|e| format!("{}: {e}", path.display())),
                None => {
                    println!("{json}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(exit::ERROR as u8);
            }
            ExitCode::from(report.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit::ERROR as u8)
        }
    }
}
