use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use homstab_cli::cache::{resolve_cache_dir, Cache};
use homstab_cli::output::{render, Format};
use homstab_cli::verify::{self, Scale, DEFAULT_SEED};
use homstab_cli::{CliError, Command, ExperimentResult, Runner};

#[derive(Parser, Debug)]
#[command(name = "homstab", version, about = "Exact homological stability experiments")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,
    /// Worker threads; 0 means one per core.
    #[arg(long, default_value_t = 0, global = true)]
    jobs: usize,
    /// Result cache directory (overrides HOMSTAB_CACHE_DIR).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Ignore and do not write the result cache.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Seed for randomised experiments.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Reduced homology of the complex of injective words on n letters.
    Injwords { n: usize },
    /// Table of dim H^i(C_n(R^2); F_2) with stability verdicts.
    BraidTable {
        #[arg(long, default_value_t = 12)]
        n_max: usize,
        #[arg(long, default_value_t = 6)]
        deg_max: usize,
    },
    /// H_1 of the configuration space of n points on the sphere.
    SphereH1 {
        n: usize,
        /// Prime characteristic; integral if omitted.
        #[arg(long)]
        char: Option<u64>,
    },
    /// Image of the fundamental class of S^(d-1) in H_(d-1)(RP^(d-1)).
    Tau { d: usize },
    /// Dold decomposition of a random stability system.
    Dold {
        /// Length N of the system.
        #[arg(long = "len", default_value_t = 5)]
        len: usize,
        /// Summand dimensions b_0, b_1, ...
        #[arg(long, value_delimiter = ',', default_values_t = vec![1, 2, 0, 3])]
        dims: Vec<usize>,
    },
    /// Reduced homology of the half-smash construction on F(n).
    Halfsmash { n: usize },
    /// Run every acceptance criterion.
    VerifyAll {
        #[arg(long, value_enum, default_value_t = Scale::Full)]
        scale: Scale,
    },
}

fn run(cli: Cli) -> Result<Vec<ExperimentResult>, CliError> {
    let cache = if cli.no_cache { None } else { resolve_cache_dir(cli.cache_dir.as_deref()).map(Cache::new) };
    let command = match cli.command {
        Sub::Injwords { n } => Command::InjWords { n },
        Sub::BraidTable { n_max, deg_max } => Command::BraidTable { n_max, deg_max },
        Sub::SphereH1 { n, char } => Command::SphereH1 { n, char },
        Sub::Tau { d } => Command::Tau { d },
        Sub::Dold { len, dims } => Command::Dold { seed: cli.seed.unwrap_or(7), len, dims },
        Sub::Halfsmash { n } => Command::HalfSmash { n },
        Sub::VerifyAll { scale } => {
            let runner = Runner::new(None, cli.jobs)?;
            let seed = cli.seed.unwrap_or(DEFAULT_SEED);
            return Ok(runner.install(|| verify::run_all(scale, seed)));
        }
    };
    Ok(vec![Runner::new(cache, cli.jobs)?.run(&command)?])
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    let verify_all = matches!(cli.command, Sub::VerifyAll { .. });
    let results = match run(cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if verify_all && format == Format::Table {
        for r in &results {
            println!("{}", verify::summary_line(r));
            for f in verify::failures(r) {
                println!("    {f}");
            }
        }
    } else {
        print!("{}", render(&results, format));
    }
    if results.iter().all(ExperimentResult::passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
