mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "lagnp",
    version,
    about = "Factor-degree exclusions for Laguerre polynomials with negative integer parameter"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for scans (defaults to available parallelism).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: Option<u16>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Regime {
    /// 2k <= n <= 4k
    Inner,
    /// n > 4k: exceptional pairs and 97-smooth windows up to 300
    Outer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Verdicts {
    All,
    NonWitness,
    Survivors,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coefficients of g_1 (powers ascending) and the a_j.
    Coeffs {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=commands::MAX_COEFF_N))]
        n: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(..=commands::MAX_S))]
        s: u64,
    },
    /// Newton polygon of g_1 at a prime.
    Polygon {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=commands::MAX_POLYGON_N))]
        n: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(..=commands::MAX_S))]
        s: u64,
        #[arg(long)]
        prime: u64,
    },
    /// Whether a factor of degree k is excluded, with the certificate.
    Check {
        #[arg(long, value_parser = clap::value_parser!(u64).range(4..=commands::MAX_POLYGON_N))]
        n: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(..=commands::MAX_S))]
        s: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        k: u64,
        /// Also try the quadratic shift bound (k = 2 only).
        #[arg(long)]
        shift_bound: bool,
        /// Case-polygon budget for robust Dumas.
        #[arg(long, default_value_t = lagnp::newton::DEFAULT_DUMAS_BUDGET)]
        dumas_budget: u64,
    },
    /// Run the pipeline over every triple of a regime.
    Scan {
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(2..))]
        k_min: u64,
        #[arg(long, default_value_t = 92)]
        k_max: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        s_min: u64,
        #[arg(long, default_value_t = 92)]
        s_max: u64,
        #[arg(long, value_enum, default_value_t = Regime::Inner)]
        regime: Regime,
        /// Which verdicts to list; counts always cover every triple.
        #[arg(long, value_enum, default_value_t = Verdicts::All)]
        verdicts: Verdicts,
        /// Refuse scans with more triples than this.
        #[arg(long, default_value_t = lagnp::search::DEFAULT_BUDGET)]
        budget: u64,
        /// Record wall-clock seconds in meta.seconds.
        #[arg(long)]
        timing: bool,
    },
    /// Recompute a published table and compare row by row.
    Tables {
        /// table1..table4, omega, s2, s3, s4, omega1, small-n, s>9, thm3, or all
        #[arg(long)]
        name: String,
    },
    /// Windows n(n-1)...(n-k+1), n > 300, whose prime factors are all below a bound.
    Dk {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..=8))]
        k: u64,
        #[arg(long)]
        max_n: u64,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(2..=100))]
        bound: u64,
        /// Odd x with P(x^2 - 1) small, one per line; adds n = (x+1)/2 (k = 2 only).
        #[arg(long, env = "LAGNP_NAJMAN_FILE")]
        najman_file: Option<PathBuf>,
        /// Also run the pipeline on every member for these shifts, e.g. 10..92.
        #[arg(long, value_parser = commands::parse_interval)]
        eliminate: Option<lagnp::search::Interval>,
    },
    /// Check that (m, ratio*m] contains a prime for every lo <= m <= hi.
    Gaps {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        lo: u64,
        #[arg(long)]
        hi: u64,
        /// "a/b" or a decimal such as 1.064286
        #[arg(long, value_parser = commands::parse_ratio)]
        ratio: num_rational::Ratio<u64>,
    },
    /// Run the acceptance criteria.
    Verify {
        /// Run only this criterion.
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=11))]
        criterion: Option<u32>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.into())
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let (text, agree) = match commands::run(&cli.command, cli.format) {
        Ok(out) => out,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if agree {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
