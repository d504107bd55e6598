//! Command-line front-end for `modal-uip`.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success: derivable, interpolant computed, countermodel found |
//! | 1 | negative answer: not derivable, no countermodel, interpolant check failed |
//! | 2 | usage or parse error |
//! | 3 | internal error |

use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use modal_uip::interpolation::{forget_kkd, forget_t, InterpolationProblem, Side};
use modal_uip::{
    countermodel, parse_formula, parse_sequent, prove, render, verify_uniform, Error, Format, FormulaMultiset, Level,
    Logic, Var,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "modal-uip", version, about = "Proof search, uniform interpolation and quantifier elimination for K, KD and KT")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search for a derivation of a sequent.
    Prove {
        #[command(flatten)]
        common: Common,
    },
    /// Compute a pre- or post-interpolant of a formula.
    Interpolate {
        #[command(flatten)]
        common: Common,
        /// Comma-separated variables to forget.
        #[arg(long, value_delimiter = ',', required = true)]
        forget: Vec<String>,
        #[arg(long, value_enum, default_value_t = SideArg::Post)]
        side: SideArg,
        /// Check the result against every partner formula up to this weight.
        #[arg(long)]
        verify_bound: Option<usize>,
        /// Read a sequent and print the table value for a single variable.
        #[arg(long, conflicts_with_all = ["side", "verify_bound"])]
        raw: bool,
    },
    /// Replace propositional quantifiers by first-order formulas.
    Eliminate {
        #[command(flatten)]
        common: Common,
    },
    /// Search for a Kripke model refuting a sequent.
    Countermodel {
        #[command(flatten)]
        common: Common,
        /// Height bound on the model; defaults to the modal depth of the sequent.
        #[arg(long)]
        depth: Option<usize>,
    },
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, value_enum)]
    logic: LogicArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Inline input, or `-` for standard input.
    #[arg(required_unless_present = "file", conflicts_with = "file")]
    input: Option<String>,
    /// Read the input from a file.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LogicArg {
    K,
    Kd,
    Kt,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Text,
    Json,
    Latex,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SideArg {
    Pre,
    Post,
}

impl From<LogicArg> for Logic {
    fn from(l: LogicArg) -> Logic {
        match l {
            LogicArg::K => Logic::K,
            LogicArg::Kd => Logic::KD,
            LogicArg::Kt => Logic::KT,
        }
    }
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
            FormatArg::Latex => Format::Latex,
        }
    }
}

enum Failure {
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::DuplicateForget(_) | Error::ZeroBound | Error::InvalidAgent(_) | Error::NotFirstOrder => {
                Failure::Usage(format!("error: {e}"))
            }
            _ => Failure::Internal(format!("internal error: {e}")),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Internal(format!("internal error: {e}"))
    }
}

/// Runs one invocation. `args` includes the program name.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, stdin, stdout) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "{msg}");
            EXIT_USAGE
        }
        Err(Failure::Internal(msg)) => {
            let _ = writeln!(stderr, "{msg}");
            EXIT_INTERNAL
        }
    }
}

fn read_input(common: &Common, stdin: &mut dyn Read) -> Result<String, Failure> {
    let text = match (&common.input, &common.file) {
        (Some(s), _) if s == "-" => {
            let mut buf = String::new();
            stdin.read_to_string(&mut buf)?;
            buf
        }
        (Some(s), _) => s.clone(),
        (None, Some(path)) => std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("error: cannot read {}: {e}", path.display())))?,
        (None, None) => return Err(Failure::Usage("error: no input given".into())),
    };
    Ok(text.trim().to_string())
}

fn parse_err(e: modal_uip::ParseError, text: &str) -> Failure {
    Failure::Usage(format!("parse error: {}", e.annotate(text)))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())?;
    if !text.ends_with('\n') {
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn dispatch(command: Command, stdin: &mut dyn Read, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Prove { common } => {
            let text = read_input(&common, stdin)?;
            let s = parse_sequent(&text).map_err(|e| parse_err(e, &text))?;
            match prove(common.logic.into(), &s)?.derivation() {
                Some(d) => {
                    emit(out, &render(d, common.format.into()))?;
                    Ok(EXIT_OK)
                }
                None => {
                    emit(out, "not derivable")?;
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::Interpolate { common, forget, side, verify_bound, raw } => {
            let logic: Logic = common.logic.into();
            let text = read_input(&common, stdin)?;
            let forget: Vec<Var> = forget.iter().map(|v| parse_var(v)).collect::<Result<_, _>>()?;
            if raw {
                let [p] = forget.as_slice() else {
                    return Err(Failure::Usage("error: --raw forgets exactly one variable".into()));
                };
                let s = parse_sequent(&text).map_err(|e| parse_err(e, &text))?;
                let value = match logic {
                    Logic::K | Logic::KD => forget_kkd(p, &s.antecedent, &s.succedent)?,
                    Logic::KT => forget_t(p, &FormulaMultiset::new(), &s.antecedent, &s.succedent)?,
                };
                emit(out, &render(&value, common.format.into()))?;
                return Ok(EXIT_OK);
            }
            let subject = parse_formula(&text, Level::L1).map_err(|e| parse_err(e, &text))?;
            let side = match side {
                SideArg::Pre => Side::Pre,
                SideArg::Post => Side::Post,
            };
            let problem = InterpolationProblem { logic, forget, subject, side };
            match verify_bound {
                None => {
                    emit(out, &render(&problem.interpolant()?, common.format.into()))?;
                    Ok(EXIT_OK)
                }
                Some(bound) => {
                    let report = verify_uniform(&problem, bound)?;
                    emit(out, &render(&report.interpolant, common.format.into()))?;
                    emit(
                        out,
                        &format!(
                            "vocabulary: {}\nimplication: {}\nextremality up to weight {}: {} ({} candidates)",
                            verdict(report.vocab_ok),
                            verdict(report.implication_ok),
                            report.extremality_checked_up_to,
                            verdict(report.extremality_ok),
                            report.candidates_checked
                        ),
                    )?;
                    Ok(if report.all_ok() { EXIT_OK } else { EXIT_NEGATIVE })
                }
            }
        }
        Command::Eliminate { common } => {
            let text = read_input(&common, stdin)?;
            let f = parse_formula(&text, Level::L2).map_err(|e| parse_err(e, &text))?;
            let (out_f, _) = modal_uip::eliminate_quantifiers(common.logic.into(), &f);
            emit(out, &render(&out_f, common.format.into()))?;
            Ok(EXIT_OK)
        }
        Command::Countermodel { common, depth } => {
            let text = read_input(&common, stdin)?;
            let s = parse_sequent(&text).map_err(|e| parse_err(e, &text))?;
            let depth = depth.unwrap_or_else(|| s.modal_depth());
            match countermodel(common.logic.into(), &s, depth)? {
                Some(m) => {
                    emit(out, &render(&m, common.format.into()))?;
                    Ok(EXIT_OK)
                }
                None => {
                    emit(out, &format!("no countermodel up to depth {depth}"))?;
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
    }
}

fn parse_var(text: &str) -> Result<Var, Failure> {
    match parse_formula(text.trim(), Level::L1) {
        Ok(modal_uip::Formula::Var(v)) => Ok(v),
        _ => Err(Failure::Usage(format!("error: `{text}` is not a variable name"))),
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}
