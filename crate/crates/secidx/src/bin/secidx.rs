use std::path::PathBuf;
use std::process::exit;

use clap::{Parser, Subcommand, ValueEnum};
use secidx::cli::{self, Metric};

#[derive(Parser)]
#[command(
    name = "secidx",
    version,
    about = "Construct, verify, and minimize perfectly secure index codes over prime fields"
)]
struct Args {
    #[command(subcommand)]
    command: Cmd,
    /// Cap on exhaustive enumeration and search sizes (also SECIDX_CAP).
    #[arg(long, global = true)]
    cap: Option<u64>,
    /// Worker threads for parallel searches and verification.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for randomized sampling such as Monte-Carlo estimates.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exhaustive optimal code length with a witness code.
    Minrank {
        /// Instance file (JSON).
        instance: PathBuf,
        /// Stop reporting above this length.
        #[arg(long)]
        max_l: Option<usize>,
        /// Search all table codes instead of linear ones.
        #[arg(long)]
        nonlinear: bool,
        /// Write the witness code file here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify secrecy and decoding metrics of a code file.
    Verify {
        /// Code file (linear matrix or encoder table JSON).
        code: PathBuf,
        /// Which check to run.
        #[arg(long, value_enum, default_value_t = MetricArg::All)]
        metric: MetricArg,
    },
    /// Build a generalized one-time pad code from an instance and keys.
    Gotp {
        /// Instance file (JSON).
        instance: PathBuf,
        /// Key profile file (JSON).
        keys: PathBuf,
        /// Supply the inner conventional code instead of searching.
        #[arg(long)]
        conv: Option<PathBuf>,
        /// Write the constructed code file here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduce a linear secure code to standard form and extract the
    /// underlying conventional code.
    Reduce {
        /// Linear code file (JSON).
        code: PathBuf,
        /// Output prefix for the .standard.json / .conventional.json files.
        #[arg(long, default_value = "reduced")]
        out: String,
    },
    /// Cone membership of a rate vector in the conventional region.
    Cone {
        /// Instance file (JSON).
        instance: PathBuf,
        /// Comma-separated rates r_1,..,r_t,r_k,r_k1,..,r_kt ("a/b" allowed).
        rates: String,
        /// Largest denominator multiple tried in the witness search.
        #[arg(long, default_value_t = 6)]
        max_scale: usize,
    },
    /// Full report: rates, secrecy metrics, and decoding.
    Report {
        /// Code file (JSON).
        code: PathBuf,
        /// Cross-check the error probability with this many samples.
        #[arg(long)]
        mc_samples: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MetricArg {
    Perfect,
    Strong,
    Weak,
    Decode,
    All,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Metric {
        match m {
            MetricArg::Perfect => Metric::Perfect,
            MetricArg::Strong => Metric::Strong,
            MetricArg::Weak => Metric::Weak,
            MetricArg::Decode => Metric::Decode,
            MetricArg::All => Metric::All,
        }
    }
}

fn main() {
    let args = Args::parse();
    if let Some(jobs) = args.jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    let cap = args.cap;
    let result = match &args.command {
        Cmd::Minrank {
            instance,
            max_l,
            nonlinear,
            out,
        } => cli::run_minrank(instance, *max_l, *nonlinear, out.as_deref(), cap),
        Cmd::Verify { code, metric } => cli::run_verify(code, (*metric).into(), cap),
        Cmd::Gotp {
            instance,
            keys,
            conv,
            out,
        } => cli::run_gotp(instance, keys, conv.as_deref(), out.as_deref(), cap),
        Cmd::Reduce { code, out } => cli::run_reduce(code, out, cap),
        Cmd::Cone {
            instance,
            rates,
            max_scale,
        } => cli::run_cone(instance, rates, *max_scale, cap),
        Cmd::Report { code, mc_samples } => cli::run_report(code, *mc_samples, args.seed, cap),
    };
    match result {
        Ok(output) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&output.report).expect("report serializes")
            );
            exit(output.exit);
        }
        Err(err) => {
            eprintln!("error: {err}");
            exit(cli::exit_code_for(&err));
        }
    }
}
