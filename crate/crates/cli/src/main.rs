use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;

use commands::{Failure, Outcome, Run};
use config::{Overrides, RunConfig};

/// Lame-operator eigenvalues as functions of the nome.
#[derive(Parser, Debug)]
#[command(name = "lame", version, about)]
struct Cli {
    /// JSON run configuration; missing fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Series order for `series` and `radius`.
    #[arg(long, global = true)]
    kmax: Option<usize>,
    /// Fixed truncation order of the nome series.
    #[arg(long = "trunc-K", global = true)]
    trunc_k: Option<usize>,
    /// Residual tolerance for scan polishing, continuation and wp-eval checks.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Higher-order settings: k_max = 110, K = 300.
    #[arg(long, global = true)]
    slow: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Exact perturbation series with JSON, CSV and a table.
    Series,
    /// Convergence-radius estimates from coefficient growth.
    Radius,
    /// Grid search for branch points in the q-plane.
    Scan,
    /// Continue eigenvalues along paths and around anchors.
    Continue,
    /// Evaluate wp, zeta, eta_1, e_i and check identities.
    WpEval,
    /// Rebuild all reference tables and compare.
    ReproducePaper,
}

impl Command {
    /// Config blocks whose validation errors are fatal for this command.
    fn blocks(self) -> &'static [&'static str] {
        match self {
            Self::Series => &["n", "series"],
            Self::Radius => &["n", "radius"],
            Self::Scan => &["n", "scan"],
            Self::Continue => &["n", "continue"],
            Self::WpEval => &["wp_eval"],
            Self::ReproducePaper => &["n", "series", "radius", "scan", "continue"],
        }
    }
}

fn load(cli: &Cli) -> Outcome<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Config(vec![format!("{}: {e}", path.display())]))?;
            serde_json::from_str(&text)
                .map_err(|e| Failure::Config(vec![format!("{}: {e}", path.display())]))?
        }
        None => RunConfig::default(),
    };
    cfg.apply(Overrides {
        k_max: cli.kmax,
        truncation: cli.trunc_k,
        tol: cli.tol,
        slow: cli.slow,
    });
    let blocks = cli.command.blocks();
    let errs: Vec<String> = cfg
        .validate()
        .into_iter()
        .filter(|e| blocks.iter().any(|b| e == b || e.starts_with(&format!("{b}.")) || e.starts_with(&format!("{b}:"))))
        .collect();
    if errs.is_empty() {
        Ok(cfg)
    } else {
        Err(Failure::Config(errs))
    }
}

fn run(cli: &Cli) -> Outcome<()> {
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(Failure::Config(vec!["--jobs: must be at least 1".into()]));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| Failure::Config(vec![format!("--jobs: {e}")]))?;
    }
    let run = Run {
        config: load(cli)?,
        out: cli.out.clone(),
    };
    match cli.command {
        Command::Series => {
            let rows = commands::series(&run)?;
            println!("wrote {} series to {}", rows.len(), run.out.display());
        }
        Command::Radius => {
            let r = commands::radius(&run)?;
            for row in r.rows {
                if let Some(e) = row.estimate {
                    println!("E_{}: radius {:.4}, tail {:.4}", row.m, e.radius, e.tail_radius);
                }
            }
        }
        Command::Scan => {
            let r = commands::scan(&run)?;
            println!(
                "{} candidates, {} of {} grid points failed; report in {}",
                r.candidates.len(),
                r.failures.len(),
                r.grid_points,
                run.out.display()
            );
        }
        Command::Continue => {
            let r = commands::continuation(&run)?;
            println!(
                "{} tracks and {} permutations written to {}",
                r.tracks.len(),
                r.permutations.len(),
                run.out.display()
            );
        }
        Command::WpEval => {
            let (text, ok) = commands::wp_eval(&run)?;
            print!("{text}");
            if !ok {
                return Err(Failure::Numerical("identity check failed".into()));
            }
        }
        Command::ReproducePaper => {
            let (text, failed) = commands::reproduce(&run)?;
            print!("{text}");
            if failed > 0 {
                return Err(Failure::Numerical(format!("{failed} comparisons failed")));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprint!("{f}");
            if !matches!(f, Failure::Config(_)) {
                eprintln!();
            }
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
