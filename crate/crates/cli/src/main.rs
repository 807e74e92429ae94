use std::io::Write;
use std::panic;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use weilbound::Int;

mod render;
mod report;

use render::Format;
use report::Failure;

/// Exact point-count bounds, virtual zeta functions and extremal Jacobians over F_q.
#[derive(Debug, Parser)]
#[command(name = "weilbound", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Working precision in bits for float-valued bounds (at least 64).
    #[arg(long, global = true, env = "WEILBOUND_PRECISION", default_value_t = 96)]
    precision: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Upper and lower bounds on the number of rational points.
    Bounds(BoundsArgs),
    /// Expand the virtual zeta function and check its identities.
    Zeta(ZetaArgs),
    /// Extremal point counts of elliptic curves and Jacobian surfaces.
    Extremal {
        #[arg(long)]
        q: u64,
    },
    /// Brute-force enumeration of elliptic curves or the (a1, a2) region.
    Enumerate {
        #[arg(long)]
        q: u64,
        #[arg(long, value_enum, default_value_t = Kind::Elliptic)]
        kind: Kind,
    },
    /// Run the built-in verification suite as JSON lines.
    Verify {
        #[arg(long)]
        q: u64,
    },
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).multiple(false)))]
struct BoundsArgs {
    #[arg(long)]
    q: u64,
    #[arg(long)]
    g: usize,
    /// Sum of the negated Frobenius traces.
    #[arg(long, group = "input", allow_negative_numbers = true)]
    tau: Option<Int>,
    /// Number of rational points of a Jacobian; sets tau = N - q - 1.
    #[arg(long = "n", group = "input", allow_negative_numbers = true)]
    n: Option<Int>,
    /// Polynomial coefficients, low degree first (either P or f).
    #[arg(long, group = "input", value_delimiter = ',', allow_negative_numbers = true)]
    coeffs: Option<Vec<Int>>,
}

#[derive(Debug, Args)]
struct ZetaArgs {
    #[arg(long)]
    q: u64,
    #[arg(long)]
    g: usize,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    coeffs: Vec<Int>,
    /// Number of terms; defaults to 2g + 4.
    #[arg(long)]
    n_max: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Elliptic,
    Region,
}

const MIN_PRECISION: usize = 64;

fn run(cli: &Cli) -> Result<render::Report, Failure> {
    let prec = cli.precision.max(MIN_PRECISION);
    match &cli.command {
        Command::Bounds(a) => {
            let input = match (&a.tau, &a.n, &a.coeffs) {
                (Some(t), _, _) => report::BoundsInput::Tau(t.clone()),
                (_, Some(n), _) => report::BoundsInput::Count(n.clone()),
                (_, _, Some(c)) => report::BoundsInput::Coeffs(c.clone()),
                _ => unreachable!("clap enforces exactly one input"),
            };
            report::bounds(a.q, a.g, input, prec)
        }
        Command::Zeta(a) => report::zeta(a.q, a.g, &a.coeffs, a.n_max.unwrap_or(2 * a.g + 4)),
        Command::Extremal { q } => report::extremal(*q),
        Command::Enumerate { q, kind: Kind::Elliptic } => report::enumerate_elliptic(*q),
        Command::Enumerate { q, kind: Kind::Region } => report::enumerate_region(*q),
        Command::Verify { q } => report::verify(*q, prec),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if cli.precision < MIN_PRECISION {
        eprintln!("precision {} raised to {MIN_PRECISION} bits", cli.precision);
    }
    let outcome = match panic::catch_unwind(|| run(&cli)) {
        Ok(r) => r,
        Err(_) => return ExitCode::from(2),
    };
    match outcome {
        Ok(rep) => {
            let text = match render::render(&rep, cli.format) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let mut out = std::io::stdout().lock();
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(2);
            }
            if rep.failed {
                eprintln!("error: built-in checks failed");
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}
