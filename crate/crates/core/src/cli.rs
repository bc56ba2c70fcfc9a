//! Command-line front end: `compile`, `decompile` and `verify`.
//!
//! Exit codes:
//! * `0` success (for `verify`: distance within tolerance)
//! * `1` `verify` only: distance above tolerance
//! * `2` unreadable or malformed input, or mismatched dimensions
//! * `3` `compile` only: input matrix is not unitary
//! * `4` `compile` only: the emitted program misses the input by more than the limit

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::compiler::{compile_with_report, CompileOptions, PermSearch};
use crate::error::Error;
use crate::matrix::{frobenius_distance, parse_matrix, serialize_matrix, ComplexMatrix, Tolerance};
use crate::seo::{parse, program_to_matrix, serialize, InstructionKind, Program};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ABOVE_TOLERANCE: i32 = 1;
pub const EXIT_BAD_INPUT: i32 = 2;
pub const EXIT_NOT_UNITARY: i32 = 3;
pub const EXIT_TOLERANCE_FAILURE: i32 = 4;

/// Smallest reconstruction error limit applied by `compile`.
pub const RECONSTRUCTION_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

impl Switch {
    fn on(self) -> bool {
        self == Switch::On
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PermSearchArg {
    None,
    Root,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum ReportFormat {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "csdc", version, about = "Compile unitary matrices into elementary quantum operations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile a matrix file into an SEO file.
    Compile(CompileArgs),
    /// Rebuild the matrix of an SEO file.
    Decompile(DecompileArgs),
    /// Compare a matrix file with the matrix of an SEO file.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct CompileArgs {
    /// Matrix file to compile.
    pub input: PathBuf,
    /// Where to write the SEO.
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value = "on")]
    pub lighten: Switch,
    #[arg(long, value_enum, default_value = "on")]
    pub extract_phases: Switch,
    /// Rewrite gates with many controls into gates on at most two bits.
    #[arg(long)]
    pub expand_controls: bool,
    #[arg(long, value_enum, default_value = "none")]
    pub perm_search: PermSearchArg,
    /// Unitarity tolerance of the input.
    #[arg(long, default_value_t = Tolerance::default().eps)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "text")]
    pub report: ReportFormat,
}

#[derive(Debug, Args)]
pub struct DecompileArgs {
    /// SEO file to evaluate.
    pub input: PathBuf,
    /// Where to write the matrix.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Bit count; inferred from the highest referenced bit when omitted.
    #[arg(long)]
    pub nb: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    pub report: ReportFormat,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Matrix file.
    pub matrix: PathBuf,
    /// SEO file.
    pub seo: PathBuf,
    /// Bit count; taken from the matrix when omitted.
    #[arg(long)]
    pub nb: Option<usize>,
    /// Largest accepted Frobenius distance.
    #[arg(long, default_value_t = Tolerance::default().eps)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "text")]
    pub report: ReportFormat,
}

impl CompileArgs {
    pub fn options(&self) -> CompileOptions {
        CompileOptions {
            lighten: self.lighten.on(),
            extract_phases: self.extract_phases.on(),
            expand_controls: self.expand_controls,
            perm_search: match self.perm_search {
                PermSearchArg::None => PermSearch::None,
                PermSearchArg::Root => PermSearch::RootExhaustive,
            },
            tol: Tolerance {
                eps: self.tol,
                ..Tolerance::default()
            },
        }
    }
}

/// A failed command: exit code plus message for stderr.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_BAD_INPUT, format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .map_err(|e| Failure::new(EXIT_BAD_INPUT, format!("cannot write {}: {e}", path.display())))
}

fn read_matrix(path: &Path) -> Result<ComplexMatrix, Failure> {
    parse_matrix(&read(path)?)
        .map_err(|e| Failure::new(EXIT_BAD_INPUT, format!("{}: {e}", path.display())))
}

fn read_program(path: &Path, nb: Option<usize>) -> Result<Program, Failure> {
    parse(&read(path)?, nb).map_err(|e| Failure::new(EXIT_BAD_INPUT, format!("{}: {e}", path.display())))
}

fn counts(p: &Program) -> BTreeMap<&'static str, usize> {
    InstructionKind::ALL
        .iter()
        .map(|k| (k.keyword(), p.count(*k)))
        .collect()
}

fn emit<T: Serialize>(out: &mut dyn Write, format: ReportFormat, value: &T, text: String) {
    // Reports are best effort: a closed stdout must not change the exit code.
    let _ = match format {
        ReportFormat::Json => writeln!(out, "{}", serde_json::to_string(value).expect("serializable report")),
        ReportFormat::Text => write!(out, "{text}"),
    };
}

fn count_lines(c: &BTreeMap<&str, usize>) -> String {
    c.iter().map(|(k, v)| format!("  {k}: {v}\n")).collect()
}

#[derive(Serialize)]
struct CompileSummary<'a> {
    command: &'static str,
    nb: usize,
    dimension: usize,
    instructions: usize,
    counts: BTreeMap<&'static str, usize>,
    tree_nodes: usize,
    tree_depth: usize,
    error: f64,
    output: &'a Path,
}

fn run_compile(args: &CompileArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let u = read_matrix(&args.input)?;
    let opts = args.options();
    let (prog, report) = compile_with_report(&u, &opts).map_err(|e| match e {
        Error::NotUnitary { .. } => Failure::new(EXIT_NOT_UNITARY, e.to_string()),
        other => Failure::new(EXIT_BAD_INPUT, other.to_string()),
    })?;
    write(&args.output, &serialize(&prog))?;
    let summary = CompileSummary {
        command: "compile",
        nb: report.nb,
        dimension: u.rows(),
        instructions: report.instructions,
        counts: counts(&prog),
        tree_nodes: report.tree_nodes,
        tree_depth: report.tree_depth,
        error: report.error,
        output: &args.output,
    };
    let text = format!(
        "nb: {}\ndimension: {}\ninstructions: {}\n{}tree nodes: {}\ntree depth: {}\nerror: {:e}\n",
        summary.nb,
        summary.dimension,
        summary.instructions,
        count_lines(&summary.counts),
        summary.tree_nodes,
        summary.tree_depth,
        summary.error
    );
    emit(out, args.report, &summary, text);
    let limit = RECONSTRUCTION_LIMIT.max(10.0 * args.tol);
    if report.error > limit {
        return Err(Failure::new(
            EXIT_TOLERANCE_FAILURE,
            format!("reconstruction error {:e} exceeds {limit:e}", report.error),
        ));
    }
    Ok(())
}

#[derive(Serialize)]
struct DecompileSummary<'a> {
    command: &'static str,
    nb: usize,
    instructions: usize,
    counts: BTreeMap<&'static str, usize>,
    output: &'a Path,
}

fn run_decompile(args: &DecompileArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let prog = read_program(&args.input, args.nb)?;
    let m = program_to_matrix(&prog);
    let text = serialize_matrix(&m).map_err(|e| Failure::new(EXIT_BAD_INPUT, e.to_string()))?;
    write(&args.output, &text)?;
    let summary = DecompileSummary {
        command: "decompile",
        nb: prog.nb(),
        instructions: prog.len(),
        counts: counts(&prog),
        output: &args.output,
    };
    let text = format!(
        "nb: {}\ninstructions: {}\n{}",
        summary.nb,
        summary.instructions,
        count_lines(&summary.counts)
    );
    emit(out, args.report, &summary, text);
    Ok(())
}

#[derive(Serialize)]
struct VerifySummary {
    command: &'static str,
    nb: usize,
    distance: f64,
    /// Phase in degrees that best aligns the program with the matrix.
    global_phase: f64,
    /// Distance after removing that phase.
    distance_up_to_phase: f64,
    tol: f64,
    pass: bool,
}

/// Phase `g` minimizing `|u - e^{ig} v|` and the resulting distance.
fn best_global_phase(u: &ComplexMatrix, v: &ComplexMatrix) -> (f64, f64) {
    let overlap: crate::Complex64 = u.as_slice().iter().zip(v.as_slice()).map(|(a, b)| b.conj() * a).sum();
    let g = if overlap.norm() > 0.0 { overlap.arg() } else { 0.0 };
    let aligned = v.scale(crate::Complex64::from_polar(1.0, g));
    let d = frobenius_distance(u, &aligned).unwrap_or(f64::NAN);
    (g.to_degrees(), d)
}

fn run_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let u = read_matrix(&args.matrix)?;
    if !u.is_square() || u.rows() == 0 {
        return Err(Failure::new(
            EXIT_BAD_INPUT,
            format!("matrix is {}x{}", u.rows(), u.cols()),
        ));
    }
    // Pad like `compile` does, without demanding unitarity.
    let dim = u.rows().next_power_of_two().max(2);
    let nb = dim.trailing_zeros() as usize;
    let padded = if dim == u.rows() {
        u
    } else {
        let mut p = ComplexMatrix::identity(dim);
        p.set_block(0, 0, &u);
        p
    };
    if let Some(flag) = args.nb {
        if flag != nb {
            return Err(Failure::new(
                EXIT_BAD_INPUT,
                format!("--nb {flag} does not match the matrix, which has {nb} bits"),
            ));
        }
    }
    let prog = read_program(&args.seo, Some(nb))?;
    let realized = program_to_matrix(&prog);
    let distance =
        frobenius_distance(&padded, &realized).map_err(|e| Failure::new(EXIT_BAD_INPUT, e.to_string()))?;
    let (global_phase, distance_up_to_phase) = best_global_phase(&padded, &realized);
    let summary = VerifySummary {
        command: "verify",
        nb,
        distance,
        global_phase,
        distance_up_to_phase,
        tol: args.tol,
        pass: distance <= args.tol,
    };
    let text = format!(
        "nb: {nb}\ndistance: {distance:e}\nglobal phase: {global_phase}\ndistance up to phase: {distance_up_to_phase:e}\n{}\n",
        if summary.pass { "pass" } else { "fail" }
    );
    emit(out, args.report, &summary, text);
    if summary.pass {
        Ok(())
    } else {
        Err(Failure::new(EXIT_ABOVE_TOLERANCE, ""))
    }
}

/// Run a parsed command, writing the report to `out` and diagnostics to `err`.
/// Returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Compile(a) => run_compile(a, out),
        Command::Decompile(a) => run_decompile(a, out),
        Command::Verify(a) => run_verify(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            if !f.message.is_empty() {
                let _ = writeln!(err, "error: {}", f.message);
            }
            f.code
        }
    }
}

/// Parse `args` (including the program name) and run. Usage errors exit with 2.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, out, err),
        Err(e) if e.use_stderr() => {
            let _ = write!(err, "{e}");
            EXIT_BAD_INPUT
        }
        Err(e) => {
            let _ = write!(out, "{e}");
            EXIT_OK
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_args(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("csdc").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn compile_defaults_mirror_library_defaults() {
        let Command::Compile(a) = parse_args(&["compile", "in.txt", "-o", "out.seo"]).command else {
            panic!("expected compile");
        };
        assert_eq!(a.options(), CompileOptions::default());
        assert_eq!(a.report, ReportFormat::Text);
    }

    #[test]
    fn compile_flags_map_to_options() {
        let Command::Compile(a) = parse_args(&[
            "compile",
            "in.txt",
            "-o",
            "out.seo",
            "--lighten",
            "off",
            "--extract-phases",
            "off",
            "--expand-controls",
            "--perm-search",
            "root",
            "--tol",
            "1e-6",
            "--report",
            "json",
        ])
        .command
        else {
            panic!("expected compile");
        };
        let o = a.options();
        assert!(!o.lighten && !o.extract_phases && o.expand_controls);
        assert_eq!(o.perm_search, PermSearch::RootExhaustive);
        assert_eq!(o.tol.eps, 1e-6);
        assert_eq!(a.report, ReportFormat::Json);
    }

    #[test]
    fn global_phase_is_recovered() {
        let u = ComplexMatrix::identity(2);
        let v = u.scale(crate::Complex64::from_polar(1.0, (-30f64).to_radians()));
        let (g, d) = best_global_phase(&u, &v);
        assert!((g - 30.0).abs() < 1e-12 && d < 1e-15);
    }

    #[test]
    fn missing_input_file_is_bad_input() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = main_with_args(
            ["csdc", "decompile", "/nonexistent/x.seo", "-o", "/nonexistent/y.txt"],
            &mut out,
            &mut err,
        );
        assert_eq!(code, EXIT_BAD_INPUT);
        assert!(String::from_utf8(err).unwrap().contains("cannot read"));
    }

    #[test]
    fn missing_output_flag_is_a_usage_error() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(main_with_args(["csdc", "compile", "in.txt"], &mut out, &mut err), EXIT_BAD_INPUT);
    }
}
