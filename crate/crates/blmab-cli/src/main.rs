//! Batch front-end over the simulation library: regret sweeps, bound
//! audits, the uniform-arrival demonstration, exponent fitting, and
//! arrival-tail estimation.
//!
//! Every run echoes its effective configuration into a manifest hash; equal
//! hashes guarantee byte-identical CSV bodies, independent of `--threads`.
//! Progress goes to standard error, data to standard output or `--out`.

mod commands;
mod output;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "blmab", version, about = "Simulations for bandits whose arm pool grows over time")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expected regret at a single horizon.
    Simulate(RunArgs),
    /// Expected regret over a horizon grid.
    Sweep(RunArgs),
    /// Sweep the admission-capped policy and audit its regret bound; exits
    /// with status 1 if any point violates the bound.
    BoundCheck(RunArgs),
    /// Uniform-arrival two-level comparison: an all-arms baseline next to
    /// the admission-capped policy on the same instances.
    DemoLowerBound(DemoArgs),
    /// Power-law exponent fits for a regret CSV.
    Fit(FitArgs),
    /// Arrival-tail estimates from a file of event times.
    Estimate(EstimateArgs),
}

#[derive(Args)]
pub struct RunArgs {
    /// Key=value config file; command-line flags win on conflict.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Arrival tail family: subexp, subpareto, or uniform.
    #[arg(long)]
    pub tail: Option<String>,
    /// Tail parameter: lambda for subexp, beta for subpareto.
    #[arg(long)]
    pub param: Option<f64>,
    /// Policy: blmoss, moss, ucb1, or thompson.
    #[arg(long)]
    pub policy: Option<String>,
    /// Exploration/exploitation trade-off weight (blmoss only).
    #[arg(long)]
    pub c: Option<f64>,
    /// Fixed exploration fraction overriding the tail-derived value
    /// (blmoss only; required for uniform arrivals).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Index normalization (blmoss only): admission_cap or admitted_count.
    #[arg(long)]
    pub norm: Option<String>,
    /// Two-level quality gap; replaces the anchored random qualities.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Horizon (simulate only).
    #[arg(long)]
    pub horizon: Option<u64>,
    /// Comma-separated horizon grid (sweep and bound-check only).
    #[arg(long)]
    pub horizons: Option<String>,
    /// Instances, i.e. independent best-arm arrival draws.
    #[arg(long)]
    pub n_instances: Option<u32>,
    /// Quality redraws per instance; the worst-case regret is kept.
    #[arg(long)]
    pub n_sub: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker-thread cap for the simulation pool.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Directory receiving <command>.csv and <command>.json; without it the
    /// CSV goes to standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct DemoArgs {
    /// Key=value config file; command-line flags win on conflict.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Quality gap between the single best arm and the rest.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// All-arms baseline to run alongside: ucb1 or moss.
    #[arg(long)]
    pub baseline: Option<String>,
    /// Exploration fraction for the capped policy (uniform arrivals carry
    /// no tail parameter to derive it from).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Comma-separated horizon grid.
    #[arg(long)]
    pub horizons: Option<String>,
    #[arg(long)]
    pub n_instances: Option<u32>,
    #[arg(long)]
    pub n_sub: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct FitArgs {
    /// Key=value config file; command-line flags win on conflict.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Regret CSV with `T` and `mean_regret` columns.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Power-law tail parameter; adds the theoretical exponent to the report.
    #[arg(long)]
    pub beta: Option<f64>,
    /// JSON report file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct EstimateArgs {
    /// Key=value config file; command-line flags win on conflict.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// File with one positive event time per line (optional header).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Horizon the estimate will serve; sets the sample-size requirement.
    #[arg(long)]
    pub horizon: Option<u64>,
    /// Target mean-estimate accuracy.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Target confidence complement.
    #[arg(long)]
    pub delta: Option<f64>,
    /// JSON report file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => commands::run_points("simulate", args, true, false),
        Command::Sweep(args) => commands::run_points("sweep", args, false, false),
        Command::BoundCheck(args) => commands::run_points("bound-check", args, false, true),
        Command::DemoLowerBound(args) => commands::demo(args),
        Command::Fit(args) => commands::fit(args),
        Command::Estimate(args) => commands::estimate(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// Exit codes: 0 success, 1 bound violation, 2 usage (clap uses the same),
/// 3 data, 4 convergence, 5 I/O.
fn exit_code(err: &blmab::Error) -> u8 {
    use blmab::Error;
    match err {
        Error::Domain(_) | Error::Config(_) | Error::State(_) => 2,
        Error::Fit(_) | Error::Estimation(_) | Error::Parse { .. } | Error::Data(_) => 3,
        Error::Convergence { .. } => 4,
        Error::Io(_) => 5,
    }
}
