//! `sglab` — command-line driver for the surface-group verification suites.
//!
//! Exit codes: 0 on success, 1 on a failed verification (with a
//! machine-readable record in `<out>/error.json`), 2 on usage errors.

mod cache;
mod commands;

use std::cell::RefCell;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use cache::Cache;
use commands::{CmdError, Ctx};

#[derive(Parser)]
#[command(name = "sglab", version, about = "Verification suites for random permutation representations of surface groups")]
struct Cli {
    /// Output directory for artifacts and the run manifest.
    #[arg(long, global = true, default_value = "sglab-out")]
    out: PathBuf,

    /// Cache directory (default: $SGLAB_CACHE, else <out>/cache).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the Cayley ball of Γ_g and report layer sizes.
    Ball {
        #[arg(long, default_value_t = 2)]
        genus: usize,
        #[arg(long, default_value_t = 3)]
        radius: usize,
    },
    /// Witten zeta ζ(s;S_n), exact; optionally the tail at cut level b.
    Zeta {
        #[arg(long, default_value_t = 2)]
        s: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        b: Option<usize>,
    },
    /// Homomorphism counting and sampling.
    Homs {
        #[command(subcommand)]
        cmd: HomsCmd,
    },
    /// Exact or sampled statistics of fix_γ.
    Fix {
        #[arg(long)]
        word: String,
        #[arg(long)]
        n: usize,
        /// 0 means: enumerate exactly when n allows it.
        #[arg(long, default_value_t = 0)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Resolution machinery.
    Resolutions {
        #[command(subcommand)]
        cmd: ResolutionsCmd,
    },
    /// Compare numeric and symbolic Θ on the resolution graphs of a word.
    Theta {
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 1)]
        trunc: usize,
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// Isotypic projectors.
    Cassidy {
        #[command(subcommand)]
        cmd: CassidyCmd,
    },
    /// Laurent coefficients a_i(γ) of the 1/n expansion of E[fix_γ].
    Expand {
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 1)]
        q: usize,
    },
    /// Residuals of E[fix_γ] against the truncated expansion.
    Assumption1 {
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 1)]
        q: usize,
        #[arg(long, value_delimiter = ',', default_values_t = vec![2, 3, 4])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Polynomial analytics suites.
    Analytics {
        #[command(subcommand)]
        cmd: AnalyticsCmd,
    },
    /// Hyperbolic geometry checks.
    Geometry {
        #[command(subcommand)]
        cmd: GeometryCmd,
    },
    /// Operator-norm demonstrations.
    Norms {
        #[command(subcommand)]
        cmd: NormsCmd,
    },
    /// Run the verification battery at default caps.
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
}

#[derive(Subcommand)]
enum HomsCmd {
    /// |Hom(Γ_g, S_n)| by the Frobenius formula (cross-checked at small n).
    Count {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        genus: usize,
    },
    /// Sample uniform homomorphisms and record fix of a word.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "a1")]
        word: String,
    },
}

#[derive(Subcommand)]
enum ResolutionsCmd {
    /// Verify Σ_r E^emb(W_r) = E[fix_γ] exactly at an enumerable n.
    Verify {
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum CassidyCmd {
    /// Verify projector identities for all λ ⊢ b' ≤ b.
    Verify {
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        b: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum AnalyticsCmd {
    /// Markov-brothers derivative bound on randomized polynomials.
    Markov {
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Rational-derivative bound on randomized P/Q instances.
    Rational {
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Fourier coefficient bound on randomized cosine polynomials.
    Fourier {
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum GeometryCmd {
    /// Π-path closeness report plus the relator Möbius identity.
    Pi {
        #[arg(long, default_value = "a1 b1")]
        word: String,
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
    /// Geodesic edge path through the tiling for a word.
    Edgepath {
        #[arg(long)]
        word: String,
    },
    /// Decompose root^k into the five-factor proper-power shape.
    Power {
        #[arg(long)]
        root: String,
        #[arg(long, default_value_t = 2)]
        k: u32,
    },
}

#[derive(Subcommand)]
enum NormsCmd {
    /// Median ‖π_n(x)‖ for x = Σ(generators + inverses) over sampled φ.
    Demo {
        #[arg(long, value_delimiter = ',', default_values_t = vec![10, 15])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// All suites at default caps.
    All,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cache_root = cli
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os("SGLAB_CACHE").map(PathBuf::from))
        .unwrap_or_else(|| cli.out.join("cache"));
    let ctx = Ctx {
        out: cli.out.clone(),
        cache: Cache::new(&cache_root),
        artifacts: RefCell::new(Vec::new()),
    };
    let (name, result) = dispatch(&cli.command, &ctx);

    let argv: Vec<String> = std::env::args().collect();
    let status = match &result {
        Ok(_) => "ok",
        Err(CmdError::Assertion(_)) => "assertion-failed",
        Err(CmdError::Other(_)) => "error",
    };
    let manifest = json!({
        "command": name,
        "argv": argv,
        "out": cli.out.display().to_string(),
        "cache_dir": cache_root.display().to_string(),
        "cache_version": cache::CACHE_VERSION,
        "rng": "ChaCha8 (counter-based, seeded explicitly)",
        "status": status,
        "summary": match &result {
            Ok(v) => v.clone(),
            Err(_) => serde_json::Value::Null,
        },
        "artifacts": ctx.artifacts.borrow().clone(),
        "cache_events": serde_json::to_value(ctx.cache.events()).unwrap(),
    });
    let _ = std::fs::create_dir_all(&cli.out);
    if let Err(e) =
        std::fs::write(cli.out.join("manifest.json"), format!("{:#}\n", manifest))
    {
        eprintln!("warning: could not write manifest: {e}");
    }

    match result {
        Ok(summary) => {
            println!("{summary:#}");
            ExitCode::SUCCESS
        }
        Err(CmdError::Assertion(record)) => {
            let _ = std::fs::write(cli.out.join("error.json"), format!("{record:#}\n"));
            eprintln!("verification failed: {record}");
            ExitCode::from(1)
        }
        Err(CmdError::Other(e)) => {
            let record = json!({"error": e.to_string()});
            let _ = std::fs::write(cli.out.join("error.json"), format!("{record:#}\n"));
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: &Command, ctx: &Ctx) -> (&'static str, commands::CmdResult) {
    match command {
        Command::Ball { genus, radius } => ("ball", commands::ball(ctx, *genus, *radius)),
        Command::Zeta { s, n, b } => ("zeta", commands::zeta(ctx, *s, *n, *b)),
        Command::Homs { cmd } => match cmd {
            HomsCmd::Count { n, genus } => ("homs count", commands::homs_count(ctx, *n, *genus)),
            HomsCmd::Sample { n, samples, seed, word } => {
                ("homs sample", commands::homs_sample(ctx, *n, *samples, *seed, word))
            }
        },
        Command::Fix { word, n, samples, seed } => {
            ("fix", commands::fix(ctx, word, *n, *samples, *seed))
        }
        Command::Resolutions { cmd } => match cmd {
            ResolutionsCmd::Verify { word, n } => {
                ("resolutions verify", commands::resolutions_verify(ctx, word, *n))
            }
        },
        Command::Theta { word, trunc, n } => ("theta", commands::theta(ctx, word, *trunc, *n)),
        Command::Cassidy { cmd } => match cmd {
            CassidyCmd::Verify { n, b, seed } => {
                ("cassidy verify", commands::cassidy_verify(ctx, *n, *b, *seed))
            }
        },
        Command::Expand { word, q } => ("expand", commands::expand(ctx, word, *q)),
        Command::Assumption1 { word, q, n, samples, seed } => {
            ("assumption1", commands::assumption1(ctx, word, *q, n, *samples, *seed))
        }
        Command::Analytics { cmd } => match cmd {
            AnalyticsCmd::Markov { instances, seed } => {
                ("analytics markov", commands::analytics_markov(ctx, *instances, *seed))
            }
            AnalyticsCmd::Rational { instances, seed } => {
                ("analytics rational", commands::analytics_rational(ctx, *instances, *seed))
            }
            AnalyticsCmd::Fourier { instances, seed } => {
                ("analytics fourier", commands::analytics_fourier(ctx, *instances, *seed))
            }
        },
        Command::Geometry { cmd } => match cmd {
            GeometryCmd::Pi { word, samples } => {
                ("geometry pi", commands::geometry_pi(ctx, word, *samples))
            }
            GeometryCmd::Edgepath { word } => {
                ("geometry edgepath", commands::geometry_edgepath(ctx, word))
            }
            GeometryCmd::Power { root, k } => {
                ("geometry power", commands::geometry_power(ctx, root, *k))
            }
        },
        Command::Norms { cmd } => match cmd {
            NormsCmd::Demo { n, samples, seed } => {
                ("norms demo", commands::norms_demo(ctx, n, *samples, *seed))
            }
        },
        Command::Verify { cmd } => match cmd {
            VerifyCmd::All => ("verify all", commands::verify_all(ctx)),
        },
    }
}
