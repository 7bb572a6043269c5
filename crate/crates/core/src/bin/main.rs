use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use morava_koszul::report::{run, Command, JobSpec, EXIT_INVALID};

/// Cohomology of height-2 Koszul complexes and presentations of B_m.
#[derive(Parser)]
#[command(name = "morava-koszul", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Coefficients w_0..w_p of the defining polynomial.
    WCoeffs(Opts),
    /// Coefficients d_{i,tau} of b'^tau; `--m` sets the largest tau.
    DCoeffs(Opts),
    /// Claimed presentation of B_m.
    Presentation(Opts),
    /// H^0, H^1 and H^2 of the truncated complex.
    Cohomology(Opts),
    /// Run every check; exit status 1 if any fails.
    Verify(Opts),
    /// Height-1 reference orders.
    Height1(Opts),
}

#[derive(Args)]
struct Opts {
    #[arg(long = "prime", short = 'p')]
    prime: Option<u64>,
    #[arg(long, short = 'm')]
    m: Option<u32>,
    /// p-adic precision N (default m + 2).
    #[arg(long)]
    p_prec: Option<u32>,
    /// a-adic precision K.
    #[arg(long)]
    a_prec: Option<usize>,
    /// Write the document here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add human-readable relations.
    #[arg(long)]
    pretty: bool,
    /// Largest a-degree tested for H^1.
    #[arg(long)]
    window: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, o) = match cli.command {
        Cmd::WCoeffs(o) => (Command::WCoeffs, o),
        Cmd::DCoeffs(o) => (Command::DCoeffs, o),
        Cmd::Presentation(o) => (Command::Presentation, o),
        Cmd::Cohomology(o) => (Command::Cohomology, o),
        Cmd::Verify(o) => (Command::Verify, o),
        Cmd::Height1(o) => (Command::Height1, o),
    };
    let spec = JobSpec {
        command,
        p: o.prime,
        m: o.m,
        p_prec: o.p_prec,
        a_prec: o.a_prec,
        out: o.out,
        pretty: o.pretty,
        window: o.window,
    };
    let outcome = run(&spec);
    match &spec.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &outcome.document) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_INVALID as u8);
            }
        }
        None => print!("{}", outcome.document),
    }
    ExitCode::from(outcome.exit_code as u8)
}
