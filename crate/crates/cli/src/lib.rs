//! The `subalg` command-line tool as a library.
//!
//! [`run`] parses arguments, runs one command and returns the exit code
//! together with everything that would be written to stdout and stderr, so
//! the binary is a thin wrapper and the tests can drive the tool in-process.
//!
//! Exit codes: `0` the property holds or the command succeeded, `1` the
//! property fails, `2` usage or input error, `3` unknown because a cap or
//! size bound was hit.

pub mod files;
pub mod report;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use itertools::Itertools;
use subalg::abelian::{decide_additivity, AbelianError, Additivity};
use subalg::algebra::AlgebraError;
use subalg::clone::{
    enumerate_term_operations, find_maltsev_witnesses, subtraction_witnesses, CloneError, DEFAULT_CAP,
};
use subalg::harness::replay_proof;
use subalg::matrix::{
    builtin_matrix, extend_matrix, is_closed, m_closure, sweep_compatible_relations, ColumnKind, MatrixError,
    DEFAULT_SWEEP_LIMIT,
};
use subalg::{corpus, Elem, ExtMatrix, FiniteAlgebra, OperationTable, Verdict};
use thiserror::Error;

use files::{load_algebra, parse_relation_file, AlgebraDoc, FileError};
use report::{
    AdditiveDoc, AnalysisReport, ClosedDoc, CounterexampleDoc, ProofDoc, SearchDoc, SweepDoc, VerdictDoc, WitnessDoc,
};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNKNOWN: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "subalg",
    version,
    about = "Subtractive, Mal'tsev and abelian checks for finite pointed algebras"
)]
struct Cli {
    /// Maximum number of term operations to enumerate; 0 removes the bound
    /// (which may not terminate in practice).
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// List the bundled algebras.
    #[arg(long)]
    corpus: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MatrixTag {
    Diag,
    Vars,
    Proof3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ColumnTag {
    Uu0,
    V0v,
}

#[derive(Debug, Args)]
struct MatrixArgs {
    #[arg(long, value_enum)]
    matrix: MatrixTag,
    /// Append a column; may be repeated.
    #[arg(long = "extend", value_enum)]
    extend: Vec<ColumnTag>,
}

impl MatrixArgs {
    fn build(&self) -> Result<(String, ExtMatrix), MatrixError> {
        let base = self.matrix.to_possible_value().expect("no skipped variants");
        let mut name = base.get_name().to_owned();
        let mut m = builtin_matrix(&name)?;
        for col in &self.extend {
            let kind = match col {
                ColumnTag::Uu0 => ColumnKind::Uu0,
                ColumnTag::V0v => ColumnKind::V0v,
            };
            m = extend_matrix(&m, kind)?;
            name = format!("{name}+{}", kind.tag());
        }
        Ok((name, m))
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Search the binary clone for a subtraction term.
    Subtractive { algebra: String },
    /// Search the ternary clone for a Mal'tsev term.
    Maltsev { algebra: String },
    /// Decide whether a homomorphic subtraction exists.
    Additive { algebra: String },
    /// Check a relation for closedness under a matrix.
    Closed {
        algebra: String,
        #[arg(long)]
        relation: PathBuf,
        #[command(flatten)]
        matrix: MatrixArgs,
    },
    /// Close a relation under a matrix.
    Closure {
        algebra: String,
        #[arg(long)]
        relation: PathBuf,
        #[command(flatten)]
        matrix: MatrixArgs,
    },
    /// Check every compatible relation of the given arity.
    Sweep {
        algebra: String,
        /// Defaults to the number of matrix columns.
        #[arg(long)]
        arity: Option<usize>,
        #[command(flatten)]
        matrix: MatrixArgs,
        /// Largest power `size^arity` to enumerate.
        #[arg(long, default_value_t = DEFAULT_SWEEP_LIMIT)]
        limit: usize,
    },
    /// Replay the subtractive-to-abelian argument step by step.
    Replay { algebra: String },
    /// Run every check and print one report.
    Report { algebra: String },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    File(#[from] FileError),
    #[error(transparent)]
    Clone(#[from] CloneError),
    #[error(transparent)]
    Abelian(#[from] AbelianError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

impl CliError {
    /// Hitting a size bound is an unknown answer, anything else is an
    /// input error.
    pub fn exit_code(&self) -> i32 {
        let bound = |e: &AlgebraError| {
            matches!(
                e,
                AlgebraError::PowerTooLarge { .. } | AlgebraError::TooManySubuniverses { .. }
            )
        };
        let clone_bound = |e: &CloneError| match e {
            CloneError::CarrierTooLarge(_) | CloneError::TableTooLarge { .. } => true,
            CloneError::Algebra(a) => bound(a),
            _ => false,
        };
        let is_bound = match self {
            CliError::File(_) => false,
            CliError::Clone(e) => clone_bound(e),
            CliError::Abelian(AbelianError::SizeBound { .. }) => true,
            CliError::Abelian(AbelianError::Clone(e)) => clone_bound(e),
            CliError::Abelian(_) => false,
            CliError::Matrix(MatrixError::Algebra(a)) => bound(a),
            CliError::Matrix(_) => false,
        };
        if is_bound {
            EXIT_UNKNOWN
        } else {
            EXIT_USAGE
        }
    }
}

/// What one invocation produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Yes => EXIT_YES,
        Verdict::No => EXIT_NO,
        Verdict::Unknown => EXIT_UNKNOWN,
    }
}

/// Runs the tool on `args`, whose first element is the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_YES };
            let text = e.render().to_string();
            let (stdout, stderr) = if e.use_stderr() {
                (String::new(), text)
            } else {
                (text, String::new())
            };
            return Outcome { code, stdout, stderr };
        }
    };
    let mut out = Output::new(cli.format);
    let code = match dispatch(&cli, &mut out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(out.stderr, "error: {e}");
            e.exit_code()
        }
    };
    Outcome {
        code,
        stdout: out.stdout,
        stderr: out.stderr,
    }
}

struct Output {
    format: Format,
    stdout: String,
    stderr: String,
}

impl Output {
    fn new(format: Format) -> Output {
        Output {
            format,
            stdout: String::new(),
            stderr: String::new(),
        }
    }

    fn json<T: serde::Serialize>(&mut self, value: &T) {
        let text = serde_json::to_string_pretty(value).expect("report types serialize");
        self.stdout.push_str(&text);
        self.stdout.push('\n');
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.stdout.push_str(s.as_ref());
        self.stdout.push('\n');
    }
}

/// Wrapper for the JSON output of the single-purpose commands.
#[derive(serde::Serialize)]
struct CommandDoc<'a, T> {
    command: &'a str,
    algebra: &'a str,
    result: T,
    elapsed_ms: u64,
}

fn elapsed_ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

fn dispatch(cli: &Cli, out: &mut Output) -> Result<i32, CliError> {
    let Some(command) = &cli.command else {
        if cli.corpus {
            list_corpus(out);
            return Ok(EXIT_YES);
        }
        out.stderr.push_str("error: a command is required (see --help)\n");
        return Ok(EXIT_USAGE);
    };
    if cli.corpus {
        list_corpus(out);
    }
    let start = Instant::now();
    let cap = cli.cap;
    match command {
        Command::Subtractive { algebra } => {
            let alg = load_algebra(algebra)?;
            let doc = subtractive_doc(&alg, cap)?;
            let code = verdict_code(doc_verdict(doc.verdict));
            emit(out, "subtractive", &alg, start, &doc, render_subtractive);
            Ok(code)
        }
        Command::Maltsev { algebra } => {
            let alg = load_algebra(algebra)?;
            let doc = SearchDoc::maltsev(&find_maltsev_witnesses(&alg, cap)?);
            let code = verdict_code(doc_verdict(doc.verdict));
            emit(out, "maltsev", &alg, start, &doc, render_maltsev);
            Ok(code)
        }
        Command::Additive { algebra } => {
            let alg = load_algebra(algebra)?;
            let a = decide_additivity(&alg, cap)?;
            let doc = AdditiveDoc::new(&alg, &a);
            emit(out, "additive", &alg, start, &doc, render_additive);
            Ok(verdict_code(a.verdict()))
        }
        Command::Closed {
            algebra,
            relation,
            matrix,
        } => {
            let alg = load_algebra(algebra)?;
            let (name, m) = matrix.build()?;
            let rel = load_relation(out, relation, &alg)?;
            let v = is_closed(&alg, &rel, &m)?;
            let doc = ClosedDoc::new(&name, &v);
            emit(out, "closed", &alg, start, &doc, render_closed);
            Ok(if v.closed { EXIT_YES } else { EXIT_NO })
        }
        Command::Closure {
            algebra,
            relation,
            matrix,
        } => {
            let alg = load_algebra(algebra)?;
            let (name, m) = matrix.build()?;
            let rel = load_relation(out, relation, &alg)?;
            let closed = m_closure(&alg, &rel, &m)?;
            let doc = ClosureDoc {
                matrix: name,
                added: closed.len() - rel.len(),
                relation: closed.iter().cloned().collect(),
            };
            emit(out, "closure", &alg, start, &doc, render_closure);
            Ok(EXIT_YES)
        }
        Command::Sweep {
            algebra,
            arity,
            matrix,
            limit,
        } => {
            let alg = load_algebra(algebra)?;
            let (name, m) = matrix.build()?;
            let k = arity.unwrap_or(m.columns());
            let results = sweep_compatible_relations(&alg, k, &m, *limit)?;
            let doc = SweepDoc::new(&name, k, &results);
            emit(out, "sweep", &alg, start, &doc, render_sweep);
            Ok(if doc.all_closed() { EXIT_YES } else { EXIT_NO })
        }
        Command::Replay { algebra } => {
            let alg = load_algebra(algebra)?;
            let (doc, search_complete) = replay_doc(&alg, cap)?;
            emit(out, "replay", &alg, start, &doc, render_replay);
            Ok(if doc.passed {
                EXIT_YES
            } else if doc.witness.is_none() && !search_complete {
                EXIT_UNKNOWN
            } else {
                EXIT_NO
            })
        }
        Command::Report { algebra } => {
            let alg = load_algebra(algebra)?;
            let report = analyze(&alg, cap)?;
            match out.format {
                Format::Json => out.json(&report),
                Format::Text => render_report(out, &report),
            }
            Ok(EXIT_YES)
        }
    }
}

fn doc_verdict(v: VerdictDoc) -> Verdict {
    match v {
        VerdictDoc::Yes => Verdict::Yes,
        VerdictDoc::No => Verdict::No,
        VerdictDoc::Unknown => Verdict::Unknown,
    }
}

fn emit<T: serde::Serialize>(
    out: &mut Output,
    command: &str,
    alg: &FiniteAlgebra,
    start: Instant,
    doc: &T,
    text: fn(&mut Output, &T),
) {
    match out.format {
        Format::Json => out.json(&CommandDoc {
            command,
            algebra: alg.name(),
            result: doc,
            elapsed_ms: elapsed_ms(start),
        }),
        Format::Text => text(out, doc),
    }
}

fn list_corpus(out: &mut Output) {
    for alg in corpus::all() {
        let sig = alg.signature().iter().map(|(n, a)| format!("{n}/{a}")).join(", ");
        let sig = if sig.is_empty() {
            "(no operations)".to_owned()
        } else {
            sig
        };
        out.line(format!(
            "{:<14} size {}  zero {}  {}",
            alg.name(),
            alg.size(),
            alg.zero(),
            sig
        ));
    }
}

fn load_relation(out: &mut Output, path: &Path, alg: &FiniteAlgebra) -> Result<subalg::Relation, CliError> {
    let parsed = parse_relation_file(path, alg.size())?;
    if parsed.duplicates > 0 {
        let _ = writeln!(
            out.stderr,
            "warning: {}: {} duplicate tuple(s) removed",
            path.display(),
            parsed.duplicates
        );
    }
    Ok(parsed.relation)
}

fn subtractive_doc(alg: &FiniteAlgebra, cap: usize) -> Result<SearchDoc, CliError> {
    let clone = enumerate_term_operations(alg, 2, cap)?;
    Ok(SearchDoc::subtraction(&subtraction_witnesses(alg, &clone), &clone))
}

/// Replays with the first homomorphic subtraction if there is one, else
/// the first subtraction found. Also reports whether the search was
/// complete.
fn replay_doc(alg: &FiniteAlgebra, cap: usize) -> Result<(ProofDoc, bool), CliError> {
    let clone = enumerate_term_operations(alg, 2, cap)?;
    let search = subtraction_witnesses(alg, &clone);
    let witness: Option<&OperationTable> = search
        .witnesses
        .iter()
        .find(|w| w.homomorphic)
        .or(search.witnesses.first())
        .map(|w| &w.op);
    let transcript = replay_proof(alg, witness);
    Ok((ProofDoc::new(&transcript, witness), search.complete))
}

/// The matrices `report` sweeps, with the relation arity for each.
const REPORT_SWEEPS: &[(&str, &[ColumnKind], usize)] = &[
    ("diag", &[], 2),
    ("vars", &[], 2),
    ("vars", &[ColumnKind::Uu0], 3),
    ("vars", &[ColumnKind::V0v], 3),
];

fn sweep_docs(alg: &FiniteAlgebra) -> Result<Vec<SweepDoc>, CliError> {
    let mut docs = Vec::new();
    for (base, cols, k) in REPORT_SWEEPS {
        let mut m = builtin_matrix(base)?;
        let mut name = (*base).to_owned();
        for &c in *cols {
            m = extend_matrix(&m, c)?;
            name = format!("{name}+{}", c.tag());
        }
        match sweep_compatible_relations(alg, *k, &m, DEFAULT_SWEEP_LIMIT) {
            Ok(results) => docs.push(SweepDoc::new(&name, *k, &results)),
            Err(MatrixError::Algebra(
                e @ (AlgebraError::PowerTooLarge { .. } | AlgebraError::TooManySubuniverses { .. }),
            )) => docs.push(SweepDoc::skipped(&name, *k, e.to_string())),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(docs)
}

/// Runs every check on `alg`. The independent parts run on separate
/// threads; the result does not depend on scheduling.
pub fn analyze(alg: &FiniteAlgebra, cap: usize) -> Result<AnalysisReport, CliError> {
    let start = Instant::now();
    let (sub, mal, add, sweeps) = std::thread::scope(|s| {
        let sub = s.spawn(|| -> Result<_, CliError> {
            let clone = enumerate_term_operations(alg, 2, cap)?;
            let search = subtraction_witnesses(alg, &clone);
            let doc = SearchDoc::subtraction(&search, &clone);
            let witness = search
                .witnesses
                .iter()
                .find(|w| w.homomorphic)
                .or(search.witnesses.first())
                .map(|w| &w.op);
            let proof = ProofDoc::new(&replay_proof(alg, witness), witness);
            Ok((doc, proof))
        });
        let mal = s.spawn(|| -> Result<_, CliError> { Ok(SearchDoc::maltsev(&find_maltsev_witnesses(alg, cap)?)) });
        let add = s.spawn(|| -> Result<_, CliError> {
            let a: Additivity = decide_additivity(alg, cap)?;
            Ok(AdditiveDoc::new(alg, &a))
        });
        let sweeps = s.spawn(|| sweep_docs(alg));
        (
            sub.join().expect("worker panicked"),
            mal.join().expect("worker panicked"),
            add.join().expect("worker panicked"),
            sweeps.join().expect("worker panicked"),
        )
    });
    let (subtractive, proof) = sub?;
    Ok(AnalysisReport {
        name: alg.name().to_owned(),
        algebra: AlgebraDoc::from_algebra(alg),
        cap,
        subtractive,
        maltsev: mal?,
        additive: add?,
        proof,
        sweeps: sweeps?,
        elapsed_ms: elapsed_ms(start),
    })
}

#[derive(serde::Serialize)]
struct ClosureDoc {
    matrix: String,
    added: usize,
    relation: Vec<Vec<Elem>>,
}

// ---- text rendering ----

fn tuple(t: &[Elem]) -> String {
    format!("({})", t.iter().join(","))
}

fn verdict_text(v: VerdictDoc) -> &'static str {
    match v {
        VerdictDoc::Yes => "yes",
        VerdictDoc::No => "no",
        VerdictDoc::Unknown => "unknown",
    }
}

fn witness_line(w: &WitnessDoc) -> String {
    let term = w.term.as_deref().unwrap_or("?");
    let hom = match w.homomorphic {
        Some(true) => " (homomorphic)",
        _ => "",
    };
    format!("{term} = {:?}{hom}", w.table)
}

/// Witness lines shown in text output before eliding the rest.
const WITNESS_LINES: usize = 8;

fn render_witnesses(out: &mut Output, ws: &[WitnessDoc]) {
    for w in ws.iter().take(WITNESS_LINES) {
        out.line(format!("witness: {}", witness_line(w)));
    }
    if ws.len() > WITNESS_LINES {
        out.line(format!("... and {} more witnesses", ws.len() - WITNESS_LINES));
    }
}

fn completeness(doc: &SearchDoc) -> String {
    if doc.complete {
        "search complete".to_owned()
    } else {
        format!("search incomplete (cap {} reached)", doc.cap)
    }
}

fn render_subtractive(out: &mut Output, doc: &SearchDoc) {
    out.line(format!("subtractive: {}", verdict_text(doc.verdict)));
    render_witnesses(out, &doc.witnesses);
    match &doc.clone {
        Some(terms) => out.line(format!("clone = {{{}}}; {}", terms.join(", "), completeness(doc))),
        None => out.line(format!(
            "clone: {} binary term operations; {}",
            doc.examined,
            completeness(doc)
        )),
    }
}

fn render_maltsev(out: &mut Output, doc: &SearchDoc) {
    out.line(format!("maltsev: {}", verdict_text(doc.verdict)));
    render_witnesses(out, &doc.witnesses);
    out.line(format!(
        "clone: {} ternary term operations; {}",
        doc.examined,
        completeness(doc)
    ));
}

fn render_additive(out: &mut Output, doc: &AdditiveDoc) {
    out.line(format!("additive: {}", verdict_text(doc.verdict)));
    if let Some(w) = &doc.witness {
        out.line(format!("witness: {}", witness_line(w)));
    }
    if let Some(p) = &doc.plus {
        out.line(format!("plus: {p:?}"));
    }
    if let Some(n) = &doc.neg {
        out.line(format!("neg: {n:?}"));
    }
    if let Some(r) = &doc.reason {
        out.line(format!("reason: {r}"));
    }
    if let Some(c) = doc.cap {
        out.line(format!("cap {c} reached before a decision"));
    }
}

fn render_counterexample(out: &mut Output, c: &CounterexampleDoc, indent: &str) {
    let assignment = c.assignment.iter().map(|a| format!("{}={}", a.var, a.value)).join(", ");
    out.line(format!("{indent}counterexample: {assignment}"));
    out.line(format!(
        "{indent}premises: {}",
        c.premises.iter().map(|p| tuple(p)).join(" ")
    ));
    out.line(format!("{indent}missing: {}", tuple(&c.missing)));
}

fn render_closed(out: &mut Output, doc: &ClosedDoc) {
    out.line(format!("closed: {}", if doc.closed { "yes" } else { "no" }));
    if let Some(c) = &doc.counterexample {
        render_counterexample(out, c, "");
    }
}

fn render_closure(out: &mut Output, doc: &ClosureDoc) {
    out.line(format!(
        "closure: {{{}}}",
        doc.relation.iter().map(|t| tuple(t)).join(", ")
    ));
    out.line(format!("added: {}", doc.added));
}

fn render_sweep(out: &mut Output, doc: &SweepDoc) {
    match (&doc.skipped, doc.relations, doc.closed) {
        (Some(why), _, _) => out.line(format!("sweep {} (arity {}): skipped, {why}", doc.matrix, doc.arity)),
        (None, Some(n), Some(c)) => {
            out.line(format!(
                "sweep {} (arity {}): {n} compatible relations, {c} closed",
                doc.matrix, doc.arity
            ));
            for f in &doc.failures {
                out.line(format!(
                    "not closed: {{{}}}",
                    f.relation.iter().map(|t| tuple(t)).join(", ")
                ));
                render_counterexample(out, &f.counterexample, "  ");
            }
        }
        _ => {}
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn render_replay(out: &mut Output, doc: &ProofDoc) {
    match &doc.breaking_step {
        None => out.line("replay: passed"),
        Some(step) => out.line(format!("replay: fails at {step}")),
    }
    match &doc.witness {
        Some(w) => out.line(format!("subtraction: {}", witness_line(w))),
        None => out.line("subtraction: none found"),
    }
    out.line(format!("R = A x A: {} ({} pairs)", yes_no(doc.r_full), doc.r_size));
    if let (Some(size), Some(closed)) = (doc.r_prime_size, doc.r_prime_closed) {
        out.line(format!("R': {size} triples, closed under proof3: {}", yes_no(closed)));
    }
    if let Some(c) = &doc.r_prime_counterexample {
        render_counterexample(out, c, "  ");
    }
    if doc.witness.is_some() {
        out.line(format!(
            "implication chain: {}/{} pairs",
            doc.chain_holds, doc.chain_steps
        ));
        out.line(format!(
            "transport: {}/{} endomorphisms commute",
            doc.transport_commutes, doc.transport_checks
        ));
    }
}

fn render_report(out: &mut Output, r: &AnalysisReport) {
    out.line(format!(
        "algebra {} (size {}, zero {}), cap {}",
        r.name, r.algebra.size, r.algebra.zero, r.cap
    ));
    out.line("");
    render_subtractive(out, &r.subtractive);
    out.line("");
    render_maltsev(out, &r.maltsev);
    out.line("");
    render_additive(out, &r.additive);
    out.line("");
    render_replay(out, &r.proof);
    out.line("");
    for s in &r.sweeps {
        render_sweep(out, s);
    }
    out.line(format!("elapsed: {} ms", r.elapsed_ms));
}
