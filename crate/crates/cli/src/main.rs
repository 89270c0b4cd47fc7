//! `toda`: exact instanton prepotentials of affine Toda operators.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use toda_core::arith::Rat;
use toda_core::spectral::Convention;
use toda_core::toda::{Algebra, TodaSpec};
use toda_core::whittaker::KappaConvention;

use commands::{AlgebraChoice, CliError, PeriodSource};
use report::Report;

#[derive(Parser, Debug)]
#[command(name = "toda", version, about = "Exact instanton prepotentials of affine Toda operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classical eigenvalue v and instanton prepotential F_inst with consistency checks.
    Prepotential {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(long, default_value_t = 4)]
        order: usize,
        /// Expansion variable: uniform q, or Q = q^h.
        #[arg(long, default_value = "q", value_parser = parse_convention)]
        convention: Convention,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Non-stationary (Whittaker) solution, Phi and its relations to b and F_inst.
    Whittaker {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(long, default_value_t = 4)]
        order: usize,
        #[arg(long, value_enum, default_value_t = KappaArg::Operator)]
        kappa_convention: KappaArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Residue (period) identity and period inversion for a rank-one potential.
    PeriodCheck {
        #[arg(long, value_parser = parse_algebra, conflicts_with = "curve", required_unless_present = "curve")]
        algebra: Option<AlgebraChoice>,
        /// Laurent polynomial P(w), e.g. "w + 1/w + w^2".
        #[arg(long)]
        curve: Option<String>,
        #[arg(long, default_value = "2", value_parser = parse_rat)]
        coeff: Rat,
        #[arg(long, default_value_t = 8)]
        order: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Combinatorial partition function and the limit of e1 e2 ln Z.
    Nekrasov {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        order: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Calibrates a rank-one Toda prepotential against the partition-function limit.
    Compare {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        order: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args, Debug)]
struct AlgebraArgs {
    /// Preset (A1, A2, A3) or path to a custom spec file.
    #[arg(long, value_parser = parse_algebra)]
    algebra: AlgebraChoice,
    /// Coefficient of every potential term of a preset.
    #[arg(long, default_value = "2", value_parser = parse_rat)]
    coeff: Rat,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
    Latex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum KappaArg {
    Operator,
    Paper,
}

fn parse_convention(s: &str) -> Result<Convention, String> {
    match s {
        "q" => Ok(Convention::SmallQ),
        "Q" => Ok(Convention::BigQ),
        _ => Err(format!("unknown convention '{s}' (expected q or Q)")),
    }
}

fn parse_rat(s: &str) -> Result<Rat, String> {
    s.parse::<Rat>().map_err(|e| format!("'{s}' is not a rational number: {e}"))
}

fn parse_algebra(s: &str) -> Result<AlgebraChoice, String> {
    if let Some(a) = Algebra::from_name(s) {
        return Ok(AlgebraChoice::Preset(a));
    }
    let path = std::path::Path::new(s);
    if !path.is_file() {
        return Err(format!("unknown preset '{s}' (expected A1, A2, A3 or a path to a spec file)"));
    }
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {s}: {e}"))?;
    let spec = TodaSpec::from_text(&text).map_err(|e| format!("{s}: {e}"))?;
    Ok(AlgebraChoice::Custom { path: s.to_string(), spec })
}

fn run(cli: Cli) -> Result<(Report, OutputArgs), CliError> {
    Ok(match cli.command {
        Command::Prepotential { alg, order, convention, out } => {
            (commands::prepotential_cmd(&alg.algebra, &alg.coeff, order, convention)?, out)
        }
        Command::Whittaker { alg, order, kappa_convention, out } => {
            let k = match kappa_convention {
                KappaArg::Operator => KappaConvention::OperatorScale,
                KappaArg::Paper => KappaConvention::PaperScale,
            };
            (commands::whittaker_cmd(&alg.algebra, &alg.coeff, order, k)?, out)
        }
        Command::PeriodCheck { algebra, curve, coeff, order, out } => {
            let src = match (&algebra, &curve) {
                (Some(a), _) => PeriodSource::Algebra(a),
                (None, Some(c)) => PeriodSource::Curve(c),
                (None, None) => return Err(CliError::Usage("period-check needs --algebra or --curve".into())),
            };
            (commands::period_cmd(src, &coeff, order)?, out)
        }
        Command::Nekrasov { n, order, out } => (commands::nekrasov_cmd(n, order)?, out),
        Command::Compare { alg, n, order, out } => (commands::compare_cmd(&alg.algebra, &alg.coeff, n, order)?, out),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (report, out) = match run(cli) {
        Ok(r) => r,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(1);
        }
        Err(CliError::Math(m)) => {
            eprintln!("check failure: {m}");
            return ExitCode::from(2);
        }
    };
    let text = match out.format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json(),
        Format::Latex => report.to_latex(),
    };
    match &out.output {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &text) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
