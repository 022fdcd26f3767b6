mod cache;
mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bgg::scalar::{FieldSpec, PrimeField, Rationals};
use bgg::BggError;

use crate::cache::Cache;
use crate::commands::Output;

/// Tate resolutions over the exterior algebra and the sheaf invariants read off from them.
#[derive(Parser, Debug, Clone)]
#[command(name = "bgg", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Print JSON on stdout; the human-readable rendering goes to stderr.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Ground field: an odd prime, or "rational".
    #[arg(long, global = true, default_value = "32003")]
    pub field: String,
    /// Window of positions "lo:hi".
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub window: Option<String>,
    /// Start degree for presentations (default: chosen and certified automatically).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub start: Option<i64>,
    /// JSON input: a presentation, a differential, or a saved window.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Builtin example: o<v>, o<v>:<d>, point<v>, omega<v>:<p>, cubic, twopoints, hm.
    #[arg(long, global = true)]
    pub builtin: Option<String>,
    /// Neither read nor write the result cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Terms of the Tate window.
    Tate,
    /// Cohomology table h^i F(n).
    Table,
    /// Castelnuovo-Mumford regularity.
    Regularity,
    /// Hilbert polynomial from a kernel, checked against the coranks.
    Hilbert {
        #[arg(long, allow_hyphen_values = true)]
        position: Option<i64>,
    },
    /// Graded Betti numbers of the module of twisted global sections.
    Betti {
        /// Cut the module off below this degree.
        #[arg(long, allow_hyphen_values = true)]
        floor: Option<i64>,
    },
    /// Term shape of the Beilinson complex.
    Beilinson {
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        r: i64,
    },
    /// Term shape of the Walter complex.
    Walter {
        #[arg(long, default_value_t = 0)]
        r: usize,
        /// Bound on the local projective dimension.
        #[arg(long, default_value_t = 0)]
        lpd: usize,
        #[arg(long, allow_hyphen_values = true)]
        floor: Option<i64>,
    },
    /// Linear complex of free S-modules from ker d^n.
    Rigid {
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        n: i64,
    },
    /// Fiber rank at a point.
    Fiber {
        /// Homogeneous coordinates "x0,x1,...".
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        position: i64,
    },
    /// Local projective dimension at a point.
    Localpd {
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        position: i64,
    },
    /// Sample points of a linear subspace and record rank and pd at each.
    Probe {
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        /// Linear forms "a0,a1,...;b0,b1,..." cutting out the subspace.
        #[arg(long, allow_hyphen_values = true)]
        forms: Option<String>,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        position: i64,
        #[arg(long, default_value_t = 25)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Randomized test that T^{a-1} → T^a → T^{a+1} comes from a coherent sheaf.
    Certify {
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        a: i64,
        /// Bound on the local projective dimension (default v).
        #[arg(long)]
        l: Option<usize>,
        #[arg(long, default_value_t = 25)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Linear projection from a center disjoint from the support.
    Project {
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        forms: Option<String>,
    },
    /// Dual window and its table.
    Dual,
    /// The Horrocks-Mumford bundle: table and Hilbert polynomial.
    DemoHm,
    /// Ω^p(p) on P^v against the Schur-module prediction.
    DemoSchur {
        #[arg(long, default_value_t = 2)]
        v: usize,
        #[arg(long, default_value_t = 1)]
        p: usize,
    },
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<BggError>() {
        Some(b) if b.is_mathematical() => 1,
        _ => 2,
    }
}

fn compute(cli: &Cli, spec: FieldSpec) -> anyhow::Result<Output> {
    match spec {
        FieldSpec::Prime(p) => commands::run(&PrimeField::new(p)?, cli),
        FieldSpec::Rational => commands::run(&Rationals, cli),
    }
}

fn cache_key(cli: &Cli, spec: FieldSpec) -> anyhow::Result<String> {
    let input = match &cli.input {
        Some(path) => std::fs::read(path).map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?,
        None => Vec::new(),
    };
    let command = format!("{:?}", cli.command);
    let field = format!("{spec:?}");
    let builtin = cli.builtin.clone().unwrap_or_default();
    let window = cli.window.clone().unwrap_or_default();
    let start = cli.start.map(|s| s.to_string()).unwrap_or_default();
    let parts: [&[u8]; 6] = [command.as_bytes(), field.as_bytes(), builtin.as_bytes(), &input, window.as_bytes(), start.as_bytes()];
    Ok(Cache::key(&parts))
}

fn run(cli: &Cli) -> anyhow::Result<Output> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let spec = FieldSpec::parse(&cli.field)?;
    if cli.no_cache {
        return compute(cli, spec);
    }
    let cache = Cache::from_env();
    let key = cache_key(cli, spec)?;
    if let Some(out) = cache.get(&key) {
        eprintln!("cache hit {key}");
        return Ok(out);
    }
    let out = compute(cli, spec)?;
    cache.put(&key, &out);
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                eprint!("{}", out.text);
                println!("{}", serde_json::to_string_pretty(&out.json).expect("JSON values serialize"));
            } else {
                print!("{}", out.text);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
