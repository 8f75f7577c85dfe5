//! The `rspin` command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 disagreement between
//! evaluation methods, 64 usage error, 65 invalid grading or bracket
//! structure, 70 solver could not determine a value, 74 cache file error.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bracket::{Dr1Bracket, EvalResult, Genus0Bracket, SpinContext, Status};
use crate::dr1::{b_value, closed_form};
use crate::engine::Engine;
use crate::enumerate::{dr1_window, multisets};
use crate::error::Error;
use crate::genus0::loop_sum;
use crate::rational::to_wire;
use crate::store::{CacheStore, CACHE_ENV, DEFAULT_CACHE_FILE};
use crate::verify::{self, SuiteReport, Window};

pub const EXIT_SUITE_FAILURE: i32 = 1;
pub const EXIT_DISAGREEMENT: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_INVALID: i32 = 65;
pub const EXIT_UNDETERMINED: i32 = 70;
pub const EXIT_CACHE: i32 = 74;

#[derive(Debug, Parser)]
#[command(name = "rspin", version, about = "Exact r-spin intersection numbers in genus 0 and 1")]
struct Cli {
    /// Cache file (defaults to $RSPIN_CACHE, then ./rspin-cache.json)
    #[arg(long, global = true, env = CACHE_ENV)]
    cache: Option<PathBuf>,

    /// Do not read or write any cache file
    #[arg(long, global = true)]
    no_cache: bool,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Dr1Method {
    Closed,
    Relations,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BMethod {
    Closed,
    Trr,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    All,
    Loop,
    Relations,
    Oracle,
    Axioms,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableKind {
    G0,
    Dr1,
}

/// Comma separated integers, e.g. `2,-2`. The empty string is the empty list.
#[derive(Debug, Clone, Default)]
struct IntList(Vec<i64>);

fn int_list(s: &str) -> Result<IntList, String> {
    if s.trim().is_empty() {
        return Ok(IntList::default());
    }
    s.split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|_| format!("{x:?} is not an integer")))
        .collect::<Result<_, _>>()
        .map(IntList)
}

#[derive(Debug, clap::Args)]
struct WindowArgs {
    #[arg(long, default_value_t = 6)]
    r_max: u32,
    #[arg(long, default_value_t = 5)]
    n_max: usize,
    #[arg(long, default_value_t = 8)]
    k_sum_max: i64,
}

impl From<&WindowArgs> for Window {
    fn from(w: &WindowArgs) -> Self {
        Window { r_max: w.r_max, n_max: w.n_max, k_sum_max: w.k_sum_max }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Genus-0 primary correlator <a_1, ..., a_n>
    G0 {
        #[arg(long)]
        r: i64,
        #[arg(long, value_parser = int_list, allow_hyphen_values = true)]
        a: IntList,
    },
    /// Closed loop-sum formula sum_{a+b=m} <a, b, x_1, ..., x_n>
    Loopsum {
        #[arg(long)]
        r: i64,
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long, value_parser = int_list, allow_hyphen_values = true)]
        x: IntList,
        /// Allow m up to r (needs at least two x_i)
        #[arg(long)]
        extended: bool,
    },
    /// Genus-1 double ramification bracket
    Dr1 {
        #[arg(long)]
        r: i64,
        #[arg(long, value_parser = int_list, allow_hyphen_values = true)]
        k: IntList,
        #[arg(long, value_parser = int_list, allow_hyphen_values = true)]
        a: IntList,
        #[arg(long, value_enum, default_value_t = Dr1Method::Both)]
        method: Dr1Method,
    },
    /// Genus-1 one-psi correlator B
    B {
        #[arg(long)]
        r: i64,
        #[arg(long, value_parser = int_list, allow_hyphen_values = true)]
        a: IntList,
        #[arg(long, value_enum, default_value_t = BMethod::Closed)]
        method: BMethod,
    },
    /// Run verification suites
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Enumerate every selection-valid bracket in a window
    Table {
        #[arg(long, value_enum)]
        kind: TableKind,
        #[command(flatten)]
        window: WindowArgs,
    },
}

#[derive(Debug, Serialize)]
struct MethodResult {
    method: &'static str,
    value: String,
    status: Status,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    trace: Vec<String>,
}

impl MethodResult {
    fn new(method: &'static str, r: EvalResult) -> Self {
        MethodResult { method, value: to_wire(&r.value), status: r.status, trace: r.trace }
    }
}

#[derive(Debug, Serialize)]
struct Evaluation {
    key: String,
    results: Vec<MethodResult>,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidSpin(_)
        | Error::InvalidGrading { .. }
        | Error::Structure(_)
        | Error::Precondition(_)
        | Error::MalformedKey(_)
        | Error::NonCanonicalKey { .. }
        | Error::MalformedRational(_) => EXIT_INVALID,
        Error::Underdetermined { .. } | Error::ReductionStalled { .. } | Error::Inconsistent(_) => {
            EXIT_UNDETERMINED
        }
        Error::CacheParse { .. } | Error::SchemaVersion(_) | Error::Io(_) => EXIT_CACHE,
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

/// Parses `args` (including the program name) and runs one command.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let mut io = Io { out, err };

    let cache_path = if cli.no_cache {
        None
    } else {
        Some(cli.cache.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_FILE)))
    };
    let engine = match &cache_path {
        Some(p) => match CacheStore::load_or_default(p) {
            Ok(store) => Engine::with_store(store),
            Err(e) => {
                let _ = writeln!(io.err, "error: cache {}: {e}", p.display());
                return exit_code(&e);
            }
        },
        None => Engine::new(),
    };

    let code = match dispatch(&cli, &engine, &mut io) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}");
            exit_code(&e)
        }
    };
    if let Some(p) = &cache_path {
        if let Err(e) = engine.save(p) {
            let _ = writeln!(io.err, "error: saving cache {}: {e}", p.display());
            return if code == 0 { exit_code(&e) } else { code };
        }
    }
    code
}

fn dispatch(cli: &Cli, engine: &Engine, io: &mut Io<'_>) -> crate::Result<i32> {
    match &cli.command {
        Command::G0 { r, a } => {
            let bracket = Genus0Bracket::new(*r, &a.0)?;
            let result = engine.solve_bracket(&bracket)?;
            emit(cli.format, io, Evaluation { key: bracket.key(), results: vec![MethodResult::new("genus0", result)] })?;
            Ok(0)
        }
        Command::Loopsum { r, m, x, extended } => {
            let value = loop_sum(*r, *m, &x.0, *extended)?;
            let mut sorted = x.0.clone();
            sorted.sort_unstable();
            let key = format!("loop:r={r}:m={m}:x={}", join(&sorted));
            emit(cli.format, io, Evaluation { key, results: vec![MethodResult::new("formula", EvalResult::ok(value))] })?;
            Ok(0)
        }
        Command::Dr1 { r, k, a, method } => {
            let bracket = Dr1Bracket::new(*r, &k.0, &a.0)?;
            let mut results = Vec::new();
            if matches!(method, Dr1Method::Closed | Dr1Method::Both) {
                results.push(MethodResult::new("closed", closed_form(&bracket)));
            }
            if matches!(method, Dr1Method::Relations | Dr1Method::Both) {
                results.push(MethodResult::new("relations", engine.solve_relational(&bracket)?));
            }
            Ok(emit_compared(cli.format, io, Evaluation { key: bracket.key(), results })?)
        }
        Command::B { r, a, method } => {
            let ctx = SpinContext::new(*r)?;
            let mut sorted = ctx.gradings(&a.0)?;
            sorted.sort_unstable();
            let key = format!("b:r={r}:a={}", join(&sorted));
            let mut results = Vec::new();
            if matches!(method, BMethod::Closed | BMethod::Both) {
                results.push(MethodResult::new("closed", b_value(*r, &a.0)?));
            }
            if matches!(method, BMethod::Trr | BMethod::Both) {
                results.push(MethodResult::new("trr", engine.b_value_trr(*r, &a.0)?));
            }
            Ok(emit_compared(cli.format, io, Evaluation { key, results })?)
        }
        Command::Verify { suite, window } => {
            let w = Window::from(window);
            let reports = match suite {
                Suite::All => verify::run_all(engine, &w),
                Suite::Loop => vec![verify::check_prop_loop(engine, &w, false), verify::check_prop_loop(engine, &w, true)],
                Suite::Relations => vec![verify::check_relations(engine, &w)],
                Suite::Oracle => vec![verify::check_oracle_equivalence(engine, &w)],
                Suite::Axioms => vec![verify::check_axioms(engine, &w)],
            };
            emit_reports(cli.format, io, &reports)?;
            Ok(if verify::all_passed(&reports) { 0 } else { EXIT_SUITE_FAILURE })
        }
        Command::Table { kind, window } => {
            table(engine, *kind, &Window::from(window), cli.format, io)?;
            Ok(0)
        }
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn emit_compared(format: Format, io: &mut Io<'_>, eval: Evaluation) -> std::io::Result<i32> {
    let agree = eval.results.windows(2).all(|w| w[0].value == w[1].value);
    emit(format, io, eval)?;
    if !agree {
        writeln!(io.err, "error: methods disagree")?;
        return Ok(EXIT_DISAGREEMENT);
    }
    Ok(0)
}

fn display(value: &str) -> String {
    // "<num>/1" reads better as "<num>" on a terminal
    value.strip_suffix("/1").unwrap_or(value).to_string()
}

fn emit(format: Format, io: &mut Io<'_>, eval: Evaluation) -> std::io::Result<()> {
    match format {
        Format::Text => {
            if let [only] = eval.results.as_slice() {
                writeln!(io.out, "{}", display(&only.value))?;
            } else {
                for m in &eval.results {
                    writeln!(io.out, "{:<10}{}", m.method, display(&m.value))?;
                }
            }
        }
        Format::Json => {
            serde_json::to_writer(&mut *io.out, &eval)?;
            writeln!(io.out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *io.out);
            w.write_record(["key", "method", "value", "status"])?;
            for m in &eval.results {
                w.write_record([eval.key.as_str(), m.method, m.value.as_str(), &m.status.to_string()])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn emit_reports(format: Format, io: &mut Io<'_>, reports: &[SuiteReport]) -> std::io::Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer(&mut *io.out, reports)?;
            writeln!(io.out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *io.out);
            w.write_record(["suite", "cases", "failures", "elapsed_ms"])?;
            for r in reports {
                w.write_record([r.suite.clone(), r.cases.to_string(), r.failures.len().to_string(), r.elapsed_ms.to_string()])?;
            }
            w.flush()?;
        }
        Format::Text => {
            for r in reports {
                let verdict = if r.passed() { "PASS" } else { "FAIL" };
                writeln!(
                    io.out,
                    "{verdict} {:<14} {:>7} cases {:>5} failures {:>7} ms",
                    r.suite,
                    r.cases,
                    r.failures.len(),
                    r.elapsed_ms
                )?;
                for f in &r.failures {
                    write!(io.out, "  {}: expected {} got {}", f.key, to_wire(&f.expected), to_wire(&f.got))?;
                    match &f.error {
                        Some(e) => writeln!(io.out, " ({e})")?,
                        None => writeln!(io.out)?,
                    }
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct TableRow {
    key: String,
    r: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<Vec<i64>>,
    a: Vec<u32>,
    value: String,
    status: Status,
}

fn table(engine: &Engine, kind: TableKind, w: &Window, format: Format, io: &mut Io<'_>) -> crate::Result<()> {
    let mut rows = Vec::new();
    let push = |rows: &mut Vec<TableRow>, key: String, k: Option<Vec<i64>>, a: Vec<u32>, r: u32, res: EvalResult| {
        rows.push(TableRow { key, r, k, a, value: to_wire(&res.value), status: res.status });
    };
    for r in 2..=w.r_max {
        match kind {
            TableKind::G0 => {
                for n in 3..=w.n_max {
                    for a in multisets(n, 0, r - 1, (n as i64 - 2) * r as i64 - 2) {
                        let b = Genus0Bracket::new(r as i64, &a.iter().map(|&x| x as i64).collect::<Vec<_>>())?;
                        let res = engine.solve_bracket(&b)?;
                        push(&mut rows, b.key(), None, a, r, res);
                    }
                }
            }
            TableKind::Dr1 => {
                for n in 2..=w.n_max {
                    for b in dr1_window(r, n, w.k_sum_max) {
                        push(&mut rows, b.key(), Some(b.k()), b.a(), r, closed_form(&b));
                    }
                }
            }
        }
    }
    match format {
        Format::Json => {
            serde_json::to_writer(&mut *io.out, &rows).map_err(|e| Error::Io(e.to_string()))?;
            writeln!(io.out)?;
        }
        Format::Text | Format::Csv => {
            let mut out = csv::Writer::from_writer(&mut *io.out);
            let header: &[&str] = match kind {
                TableKind::G0 => &["r", "a", "value"],
                TableKind::Dr1 => &["r", "k", "a", "value"],
            };
            out.write_record(header).map_err(|e| Error::Io(e.to_string()))?;
            for row in &rows {
                let mut rec = vec![row.r.to_string()];
                if let Some(k) = &row.k {
                    rec.push(join(k));
                }
                rec.push(join(&row.a));
                rec.push(row.value.clone());
                out.write_record(&rec).map_err(|e| Error::Io(e.to_string()))?;
            }
            out.flush()?;
        }
    }
    Ok(())
}
