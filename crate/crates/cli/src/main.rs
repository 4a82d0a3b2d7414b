//! `zpmin`: decide minimality of polynomial maps on the p-adic integers.
//!
//! Subcommands: `check` (closed-form criteria and/or brute-force oracle),
//! `orbit` (iterate sequence at a level), `decompose` (functional-graph
//! components at a level), `xval` (cross-validate criteria against the
//! oracle over a coefficient family), and `find` (list minimal members of
//! a family).
//!
//! Exit status: 0 on successful evaluation (the verdict itself is carried
//! in the output), 1 when `xval` finds criterion/oracle mismatches, 2 on
//! usage or evaluation errors. Results go to stdout; errors and progress
//! notes go to stderr.

mod parse;
mod render;

use std::fmt;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use render::Format;
use zpmin_core::{
    check_minimal_with, cross_validate_with_cap, find_minimal_with_cap, minimal_decomposition,
    orbit, A0Interpretation, CheckMode, FamilySpec, Level, Prime, Residue, DEFAULT_FAMILY_CAP,
};

#[derive(Parser)]
#[command(
    name = "zpmin",
    version,
    about = "Minimality of polynomial dynamical systems on the p-adic integers"
)]
struct Cli {
    /// Output format for results on stdout.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Seed for sampled family traversal.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Upper bound on the number of family members xval/find may evaluate.
    #[arg(long, global = true, default_value_t = DEFAULT_FAMILY_CAP)]
    cap: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    ClosedForm,
    Oracle,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReadingArg {
    /// Read the p=3 table's unpinned sum as the even-index sum
    /// (exhaustively validated; the default).
    EvenSum,
    /// Read it as the sum over indices >= 6 divisible by 6.
    Mult6Sum,
}

impl From<ReadingArg> for A0Interpretation {
    fn from(r: ReadingArg) -> A0Interpretation {
        match r {
            ReadingArg::EvenSum => A0Interpretation::AsEvenSum,
            ReadingArg::Mult6Sum => A0Interpretation::AsMult6Sum,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide minimality of (Z_p, f).
    Check {
        #[arg(long)]
        prime: u64,
        /// Polynomial: coefficient list "a0,a1,..." or expression "x^2+3x+1".
        #[arg(long)]
        poly: String,
        /// Defaults to `both` for p = 2, 3, 5 and `oracle` otherwise.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Reading of the p=3 criterion table's unpinned sum.
        #[arg(long, value_enum, default_value_t = ReadingArg::EvenSum)]
        a0_reading: ReadingArg,
    },
    /// Iterate f from a start point in Z/p^nZ until the first repeat.
    Orbit {
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        level: u32,
        #[arg(long)]
        start: u64,
        #[arg(long)]
        poly: String,
    },
    /// Decompose Z/p^nZ into functional-graph components under f.
    Decompose {
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        level: u32,
        #[arg(long)]
        poly: String,
        /// Suppress member listings for components larger than this.
        #[arg(long, default_value_t = 200)]
        max_members: usize,
    },
    /// Cross-validate the closed-form criterion against the brute-force
    /// oracle over a coefficient family. Exit 1 if any mismatch is found.
    Xval {
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        max_degree: u32,
        #[arg(long)]
        coeff_modulus: u64,
        /// Walk the whole family (the default when --samples is absent).
        #[arg(long, conflicts_with = "samples")]
        exhaustive: bool,
        /// Check this many seeded random members instead.
        #[arg(long)]
        samples: Option<u64>,
    },
    /// List the first oracle-minimal members of a coefficient family.
    Find {
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        max_degree: u32,
        #[arg(long)]
        coeff_modulus: u64,
        #[arg(long, default_value_t = 10)]
        limit: usize,
        #[arg(long, conflicts_with = "samples")]
        exhaustive: bool,
        #[arg(long)]
        samples: Option<u64>,
    },
}

/// Any failure that should terminate with exit status 2.
struct CliError(String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn family_spec(
    prime: u64,
    max_degree: u32,
    coeff_modulus: u64,
    samples: Option<u64>,
    seed: u64,
) -> Result<FamilySpec, CliError> {
    let p = Prime::new(prime)?;
    Ok(match samples {
        None => FamilySpec::exhaustive(p, max_degree, coeff_modulus),
        Some(count) => FamilySpec::sample(p, max_degree, coeff_modulus, count, seed),
    })
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let format: Format = cli.format.into();
    match cli.command {
        Command::Check {
            prime,
            poly,
            mode,
            a0_reading,
        } => {
            let p = Prime::new(prime)?;
            let f = parse::parse_poly(&poly)?;
            let mode = match mode {
                Some(ModeArg::ClosedForm) => CheckMode::ClosedForm,
                Some(ModeArg::Oracle) => CheckMode::Oracle,
                Some(ModeArg::Both) => CheckMode::Both,
                None if matches!(prime, 2 | 3 | 5) => CheckMode::Both,
                None => CheckMode::Oracle,
            };
            let report = check_minimal_with(&f, p, mode, a0_reading.into())?;
            print!("{}", render::render_check(&report, &f, format));
            Ok(0)
        }
        Command::Orbit {
            prime,
            level,
            start,
            poly,
        } => {
            let p = Prime::new(prime)?;
            let n = Level::new(level)?;
            let f = parse::parse_poly(&poly)?;
            let start = Residue::new(start, p, n)?;
            let trace = orbit(&f, start)?;
            print!("{}", render::render_orbit(&trace, &f, format));
            Ok(0)
        }
        Command::Decompose {
            prime,
            level,
            poly,
            max_members,
        } => {
            let p = Prime::new(prime)?;
            let n = Level::new(level)?;
            let f = parse::parse_poly(&poly)?;
            let decomp = minimal_decomposition(&f, p, n)?;
            print!(
                "{}",
                render::render_decompose(&decomp, &f, max_members, format)
            );
            Ok(0)
        }
        Command::Xval {
            prime,
            max_degree,
            coeff_modulus,
            exhaustive: _,
            samples,
        } => {
            let spec = family_spec(prime, max_degree, coeff_modulus, samples, cli.seed)?;
            eprintln!(
                "cross-validating family: {} members...",
                match samples {
                    Some(s) => s as u128,
                    None => spec.family_size(),
                }
            );
            let report = cross_validate_with_cap(&spec, cli.cap)?;
            print!("{}", render::render_xval(&report, format));
            Ok(if report.is_clean() { 0 } else { 1 })
        }
        Command::Find {
            prime,
            max_degree,
            coeff_modulus,
            limit,
            exhaustive: _,
            samples,
        } => {
            let spec = family_spec(prime, max_degree, coeff_modulus, samples, cli.seed)?;
            let found = find_minimal_with_cap(&spec, limit, cli.cap)?;
            print!("{}", render::render_find(&found, &spec, format));
            Ok(0)
        }
    }
}
