//! `sur`: verification reports, bound tables, tightness runs, witness
//! evaluations and sampling experiments for sum-uncertainty relations.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "sur", version, about = "Sum-uncertainty relations from Lie-algebra structure")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the relation on the saturating state and on random states.
    Verify(VerifyArgs),
    /// Minimize the variance sum over pure states and compare with the bound.
    Minimize(MinimizeArgs),
    /// Evaluate the collective-operator separability tests.
    Witness(WitnessArgs),
    /// Check the single-particle operator identities behind the witness.
    Identities(IdentitiesArgs),
    /// Simulate projective measurements and estimate a variance.
    Sample(SampleArgs),
    /// Exact bound and Casimir table over Dynkin labels.
    Table(TableArgs),
}

#[derive(Debug, Clone, Args)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output file; defaults to stdout, or to `$SUR_OUTPUT_DIR/<command>.<ext>` when that is set.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
struct AlgebraArgs {
    /// `wh[:cutoff=K]`, `su2:j=J`, `su11:kappa=P/Q[,cutoff=K]`, `su:N[:irrep=a,b,...]`.
    #[arg(long)]
    algebra: String,
    #[arg(long)]
    j: Option<String>,
    #[arg(long)]
    kappa: Option<String>,
    #[arg(long)]
    cutoff: Option<usize>,
    /// Dynkin label, e.g. `1,0`.
    #[arg(long)]
    irrep: Option<String>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    algebra: AlgebraArgs,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct MinimizeArgs {
    #[command(flatten)]
    algebra: AlgebraArgs,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 20_000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WitnessState {
    /// Antisymmetrized `n`-particle state (requires N = n).
    Slater,
    /// `|0>` on every site.
    Product,
    /// Independent Haar states per site, `--trials` of them.
    RandomProduct,
    /// Dirichlet mixtures of 2 to 4 random product states, `--trials` of them.
    RandomMixture,
    /// The maximally mixed state.
    MaxMixed,
}

#[derive(Debug, Args)]
struct WitnessArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Number of particles; defaults to `n`.
    #[arg(long = "N")]
    particles: Option<usize>,
    #[arg(long, value_enum, default_value_t = WitnessState::Slater)]
    state: WitnessState,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct IdentitiesArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Random pure states for the Bloch identity.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[command(flatten)]
    algebra: AlgebraArgs,
    /// Generator name (`x`, `p`, `Jx`, `Kz`, `s12`, `h1`, ...); defaults to the first.
    #[arg(long)]
    observable: Option<String>,
    /// `saturating`, `random` or `basis:<index>`.
    #[arg(long, default_value = "saturating")]
    state: String,
    #[arg(long, default_value_t = 100_000)]
    shots: usize,
    /// Independent repetitions with seeds `seed, seed + 1, ...`.
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct TableArgs {
    /// Restrict to one su(n); defaults to n = 2..5.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 2)]
    max_label: u32,
    #[command(flatten)]
    common: Common,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, outcome) = match cli.command {
        Command::Verify(a) => (a.common.clone(), commands::verify(&a)),
        Command::Minimize(a) => (a.common.clone(), commands::minimize(&a)),
        Command::Witness(a) => (a.common.clone(), commands::witness(&a)),
        Command::Identities(a) => (a.common.clone(), commands::identities(&a)),
        Command::Sample(a) => (a.common.clone(), commands::sample(&a)),
        Command::Table(a) => (a.common.clone(), commands::table(&a)),
    };
    let report = match outcome {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    if let Err(e) = output::emit(&report, &common) {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code());
    }
    if report.violated {
        eprintln!("{}: invariant violated", report.command);
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
