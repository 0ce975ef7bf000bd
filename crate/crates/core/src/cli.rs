//! The `lexiport` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or I/O error. Machine output
//! goes to stdout or to the files named by `--out`/`--output`; warnings and
//! progress go to stderr.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::analysis::{self, MetricKind};
use crate::error::{Error, Result};
use crate::lexicon::{BilingualLexicon, DelimiterMode};
use crate::model_io::{
    load_artifact, read_embeddings, read_vocab, save_artifact, ModelArtifact, Strategy, Vocabulary, VOCAB_FILE,
};
use crate::tokenizer;
use crate::translator::{self, TranslateOptions, TranslationReport, VtmRewriter};

pub const THREADS_ENV: &str = "LEXIPORT_THREADS";
pub const REPORT_FILE: &str = "report.json";

#[derive(Debug, Parser)]
#[command(name = "lexiport", version, about = "Translate a model vocabulary and embedding layer through a bilingual lexicon")]
pub struct CliConfig {
    /// More progress output on stderr (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    /// Reserved; every operation is deterministic.
    #[arg(long, hide = true, global = true)]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Translate an artifact with LWM, VE or VOM.
    Translate(TranslateArgs),
    /// Rewrite target-language text into the source language, line by line.
    Vtm(VtmArgs),
    /// Print WordPiece tokens of text, one line per input line.
    Tokenize(TokenizeArgs),
    /// Word-level vocabulary coverage of a corpus.
    Coverage(CoverageArgs),
    /// Compare the vocabularies and rows of two artifacts.
    Diff(DiffArgs),
    /// Error reduction rate of a model over a baseline.
    Err(ErrArgs),
    /// Pre-training effort (batch x sequence length x steps).
    Effort(EffortArgs),
    /// Rescale a metric onto 0 to 100.
    Rescale(RescaleArgs),
    /// Lexicon statistics.
    Stats(StatsArgs),
    /// Dump artifact metadata, sizes and row norm statistics.
    Inspect(InspectArgs),
    /// Bundle a vocabulary file and an embedding container into an artifact.
    Pack(PackArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StrategyArg {
    Lwm,
    Ve,
    Vom,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Lwm => Strategy::Lwm,
            StrategyArg::Ve => Strategy::Ve,
            StrategyArg::Vom => Strategy::Vom,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DelimiterArg {
    Auto,
    Tab,
    Space,
}

impl From<DelimiterArg> for DelimiterMode {
    fn from(d: DelimiterArg) -> Self {
        match d {
            DelimiterArg::Auto => DelimiterMode::Auto,
            DelimiterArg::Tab => DelimiterMode::Tab,
            DelimiterArg::Space => DelimiterMode::Space,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    HammingLoss,
    Pearson,
    AccuracyLike,
}

impl From<KindArg> for MetricKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::HammingLoss => MetricKind::HammingLoss,
            KindArg::Pearson => MetricKind::Pearson,
            KindArg::AccuracyLike => MetricKind::AccuracyLike,
        }
    }
}

#[derive(Debug, Args)]
pub struct TranslateArgs {
    #[arg(long, value_enum)]
    pub strategy: StrategyArg,
    #[arg(long)]
    pub model_dir: PathBuf,
    #[arg(long)]
    pub lexicon: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    pub delimiter: DelimiterArg,
}

#[derive(Debug, Args)]
pub struct VtmArgs {
    #[arg(long)]
    pub lexicon: PathBuf,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    pub delimiter: DelimiterArg,
}

#[derive(Debug, Args)]
pub struct TokenizeArgs {
    /// vocab.txt or an artifact directory.
    #[arg(long)]
    pub vocab: PathBuf,
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    pub text: Option<String>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Print ids instead of token strings.
    #[arg(long)]
    pub ids: bool,
}

#[derive(Debug, Args)]
pub struct CoverageArgs {
    /// vocab.txt or an artifact directory.
    #[arg(long)]
    pub vocab: PathBuf,
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct DiffArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ErrArgs {
    #[arg(long, required_unless_present = "table", requires = "model")]
    pub baseline: Option<f64>,
    #[arg(long, requires = "baseline")]
    pub model: Option<f64>,
    /// CSV with columns language,distance,baseline,model; prints it back
    /// with an err column.
    #[arg(long, conflicts_with_all = ["baseline", "model"])]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EffortArgs {
    #[arg(long)]
    pub batch: u64,
    #[arg(long)]
    pub seqlen: u64,
    #[arg(long)]
    pub steps: u64,
    /// Effort of a reference run; adds `ratio` to the output.
    #[arg(long)]
    pub baseline_effort: Option<u64>,
}

#[derive(Debug, Args)]
pub struct RescaleArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    #[arg(long, allow_negative_numbers = true)]
    pub value: f64,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub lexicon: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    pub delimiter: DelimiterArg,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[arg(long)]
    pub model_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct PackArgs {
    #[arg(long)]
    pub vocab: PathBuf,
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long)]
    pub source_model: String,
    #[arg(long)]
    pub out: PathBuf,
}

/// Usage problems found after argument parsing.
#[derive(Debug)]
struct Usage(String);

enum Failure {
    Usage(Usage),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

impl From<Usage> for Failure {
    fn from(u: Usage) -> Self {
        Failure::Usage(u)
    }
}

type CmdResult = std::result::Result<(), Failure>;

/// Run with process stdout/stderr, returning the exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let config = match CliConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    1
                }
            };
        }
    };
    let result = dispatch(&config, out, err);
    let _ = out.flush();
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(Usage(msg))) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Data(e)) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn dispatch(config: &CliConfig, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    match &config.command {
        Command::Translate(a) => cmd_translate(a, config.verbose, err),
        Command::Vtm(a) => cmd_vtm(a, err),
        Command::Tokenize(a) => cmd_tokenize(a, out),
        Command::Coverage(a) => cmd_coverage(a, out),
        Command::Diff(a) => cmd_diff(a, out),
        Command::Err(a) => cmd_err(a, out),
        Command::Effort(a) => cmd_effort(a, out),
        Command::Rescale(a) => cmd_rescale(a, out),
        Command::Stats(a) => cmd_stats(a, err, out),
        Command::Inspect(a) => cmd_inspect(a, out),
        Command::Pack(a) => cmd_pack(a),
    }
}

/// Thread cap from the environment; unset means rayon's default.
fn thread_options() -> std::result::Result<TranslateOptions, Usage> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(TranslateOptions::default()),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(TranslateOptions::with_threads(n)),
            _ => Err(Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> CmdResult {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::io("<stdout>", e).into())
}

fn json_doc<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn vocab_at(path: &Path) -> Result<Vocabulary> {
    if path.is_dir() {
        read_vocab(path.join(VOCAB_FILE))
    } else {
        read_vocab(path)
    }
}

fn lexicon_warnings(lex: &BilingualLexicon, err: &mut dyn Write) {
    if lex.skipped_lines() > 0 {
        let _ = writeln!(err, "warning: skipped {} lexicon lines", lex.skipped_lines());
    }
    if lex.duplicates() > 0 {
        let _ = writeln!(err, "warning: dropped {} duplicate lexicon entries", lex.duplicates());
    }
    if lex.accent_collisions() > 0 {
        let _ = writeln!(
            err,
            "warning: {} targets merge spellings that differ only by accents",
            lex.accent_collisions()
        );
    }
}

/// Human-readable report with a fixed field order, elapsed time included.
pub fn report_render(report: &TranslationReport) -> String {
    let mut s = String::new();
    let rows: [(&str, u64); 8] = [
        ("entries_total", report.entries_total),
        ("entries_used", report.entries_used),
        ("entries_skipped_all_unk", report.entries_skipped_all_unk),
        ("entries_skipped_malformed", report.entries_skipped_malformed),
        ("targets_added", report.targets_added),
        ("targets_collided_existing", report.targets_collided_existing),
        ("targets_with_multiple_sources", report.targets_with_multiple_sources),
        ("accent_strip_collisions", report.accent_strip_collisions),
    ];
    for (k, v) in rows {
        let _ = writeln!(s, "{k}: {v}");
    }
    let _ = writeln!(s, "elapsed_seconds: {:.3}", report.elapsed_seconds());
    s
}

fn cmd_translate(a: &TranslateArgs, verbose: u8, err: &mut dyn Write) -> CmdResult {
    let opts = thread_options()?;
    let artifact = load_artifact(&a.model_dir)?;
    let lexicon = BilingualLexicon::parse_file(&a.lexicon, a.delimiter.into())?;
    lexicon_warnings(&lexicon, err);
    if verbose > 0 {
        let _ = writeln!(
            err,
            "translating {} tokens with {} lexicon entries ({})",
            artifact.vocabulary().len(),
            lexicon.len(),
            Strategy::from(a.strategy)
        );
    }
    let (translated, report) = translator::translate(a.strategy.into(), &artifact, &lexicon, &opts)?;
    save_artifact(&translated, &a.out)?;
    let report_path = a.out.join(REPORT_FILE);
    fs::write(&report_path, report.to_json()).map_err(|e| Error::io(&report_path, e))?;
    if report.targets_collided_existing > 0 {
        let _ = writeln!(
            err,
            "warning: {} targets collided with existing tokens",
            report.targets_collided_existing
        );
    }
    let _ = err.write_all(report_render(&report).as_bytes());
    Ok(())
}

fn cmd_vtm(a: &VtmArgs, err: &mut dyn Write) -> CmdResult {
    let lexicon = BilingualLexicon::parse_file(&a.lexicon, a.delimiter.into())?;
    lexicon_warnings(&lexicon, err);
    let rewriter = VtmRewriter::new(&lexicon);
    let input = fs::File::open(&a.input).map_err(|e| Error::io(&a.input, e))?;
    let output = fs::File::create(&a.output).map_err(|e| Error::io(&a.output, e))?;
    let mut w = BufWriter::new(output);
    for line in BufReader::new(input).lines() {
        let line = line.map_err(|e| Error::io(&a.input, e))?;
        writeln!(w, "{}", rewriter.rewrite(&line)).map_err(|e| Error::io(&a.output, e))?;
    }
    w.flush().map_err(|e| Error::io(&a.output, e))?;
    Ok(())
}

fn cmd_tokenize(a: &TokenizeArgs, out: &mut dyn Write) -> CmdResult {
    let vocab = vocab_at(&a.vocab)?;
    let lines: Vec<String> = match (&a.text, &a.input) {
        (Some(t), _) => t.split('\n').map(str::to_string).collect(),
        (None, Some(p)) => {
            let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            text.lines().map(str::to_string).collect()
        }
        (None, None) => return Err(Usage("one of --text or --input is required".into()).into()),
    };
    let mut buf = String::new();
    for line in &lines {
        let r = tokenizer::tokenize(line, &vocab);
        if a.ids {
            let ids: Vec<String> = r.ids.iter().map(u32::to_string).collect();
            buf.push_str(&ids.join(" "));
        } else {
            buf.push_str(&r.tokens.join(" "));
        }
        buf.push('\n');
    }
    write_out(out, &buf)
}

fn cmd_coverage(a: &CoverageArgs, out: &mut dyn Write) -> CmdResult {
    let vocab = vocab_at(&a.vocab)?;
    let s = analysis::coverage(&a.corpus, &vocab)?;
    let text = if a.json {
        json_doc(&s)
    } else {
        format!(
            "words: {}\nin_vocab: {}\noov_rate: {:.6}\nunk_rate: {:.6}\nmean_fertility: {:.6}\n",
            s.total_words, s.in_vocab_words, s.oov_rate, s.unk_rate, s.mean_fertility
        )
    };
    write_out(out, &text)
}

fn cmd_diff(a: &DiffArgs, out: &mut dyn Write) -> CmdResult {
    let left = load_artifact(&a.a)?;
    let right = load_artifact(&a.b)?;
    let d = analysis::vocab_diff(&left, &right)?;
    let text = if a.json {
        json_doc(&d)
    } else {
        format!(
            "only_in_a: {}\nonly_in_b: {}\nshared_identical: {}\nshared_changed: {}\n",
            d.only_in_a.len(),
            d.only_in_b.len(),
            d.shared_identical,
            d.shared_changed.len()
        )
    };
    write_out(out, &text)
}

fn cmd_err(a: &ErrArgs, out: &mut dyn Write) -> CmdResult {
    if let Some(path) = &a.table {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        return write_out(out, &analysis::err_table_csv(&text)?);
    }
    let (Some(baseline), Some(model)) = (a.baseline, a.model) else {
        return Err(Usage("--baseline and --model are required".into()).into());
    };
    let e = analysis::err(baseline, model)?;
    write_out(out, &json_doc(&json!({ "baseline": baseline, "model": model, "err": e })))
}

fn cmd_effort(a: &EffortArgs, out: &mut dyn Write) -> CmdResult {
    let m = analysis::effort(a.batch, a.seqlen, a.steps)?;
    let mut doc = serde_json::to_value(m).expect("serializable");
    if let Some(base) = a.baseline_effort {
        if base == 0 {
            return Err(Error::InvalidArgument("baseline effort must be positive".into()).into());
        }
        doc["baseline_effort"] = json!(base);
        doc["ratio"] = json!(m.effort as f64 / base as f64);
    }
    write_out(out, &json_doc(&doc))
}

fn cmd_rescale(a: &RescaleArgs, out: &mut dyn Write) -> CmdResult {
    let kind = MetricKind::from(a.kind);
    let v = analysis::rescale(kind, a.value)?;
    write_out(
        out,
        &json_doc(&json!({
            "kind": kind.as_str(),
            "value": a.value,
            "rescaled": v,
            "formula": kind.formula(),
        })),
    )
}

fn cmd_stats(a: &StatsArgs, err: &mut dyn Write, out: &mut dyn Write) -> CmdResult {
    let lexicon = BilingualLexicon::parse_file(&a.lexicon, a.delimiter.into())?;
    lexicon_warnings(&lexicon, err);
    let mut doc = serde_json::to_value(lexicon.stats()).expect("serializable");
    doc["sha256"] = json!(lexicon.sha256());
    write_out(out, &json_doc(&doc))
}

fn cmd_inspect(a: &InspectArgs, out: &mut dyn Write) -> CmdResult {
    let artifact = load_artifact(&a.model_dir)?;
    write_out(out, &json_doc(&inspect_doc(&artifact)?))
}

fn inspect_doc(artifact: &ModelArtifact<f32>) -> Result<serde_json::Value> {
    let meta = artifact.metadata();
    let rows = artifact.vocabulary().len();
    let original = meta.original_vocab_size;
    let source = if original > 0 {
        Some(analysis::norm_stats(artifact.embeddings(), 0..original)?)
    } else {
        None
    };
    let added = if rows > original {
        Some(analysis::norm_stats(artifact.embeddings(), original..rows)?)
    } else {
        None
    };
    Ok(json!({
        "metadata": meta,
        "vocab_size": rows,
        "added_tokens": rows - original,
        "source_row_norms": source,
        "added_row_norms": added,
    }))
}

fn cmd_pack(a: &PackArgs) -> CmdResult {
    let vocab = read_vocab(&a.vocab)?;
    let emb = read_embeddings(&a.embeddings)?;
    let artifact = ModelArtifact::identity(a.source_model.clone(), vocab, emb)?;
    save_artifact(&artifact, &a.out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::time::Duration;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = run_with(std::iter::once("lexiport").chain(args.iter().copied()), &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn render_is_stable_and_complete() {
        let r = TranslationReport {
            targets_collided_existing: 2,
            elapsed: Duration::from_millis(1500),
            ..Default::default()
        };
        let a = report_render(&r);
        assert_eq!(a, report_render(&r));
        assert!(a.contains("targets_added: 0\n"));
        assert!(a.contains("targets_collided_existing: 2\n"));
        assert!(a.ends_with("elapsed_seconds: 1.500\n"));
    }

    #[test]
    fn usage_errors_exit_one() {
        let (code, _, err) = run_capture(&["err", "--baseline", "80", "--model", "90", "--bogus"]);
        assert_eq!(code, 1);
        assert!(err.contains("Usage"), "{err}");
        assert_eq!(run_capture(&[]).0, 1);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("translate"));
    }

    #[test]
    fn err_and_effort_print_json() {
        let (code, out, _) = run_capture(&["err", "--baseline", "80", "--model", "90"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["err"], 50.0);
        let (code, out, _) = run_capture(&["effort", "--batch", "1024", "--seqlen", "128", "--steps", "10000"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["effort"], 1_310_720_000u64);
    }

    #[test]
    fn data_errors_exit_two() {
        assert_eq!(run_capture(&["err", "--baseline", "100", "--model", "90"]).0, 2);
        assert_eq!(run_capture(&["effort", "--batch", "0", "--seqlen", "1", "--steps", "1"]).0, 2);
        let (code, _, err) = run_capture(&["inspect", "--model-dir", "/nonexistent/dir"]);
        assert_eq!(code, 2);
        assert!(err.starts_with("error: "));
    }

    #[test]
    fn rescale_accepts_negative_values() {
        let (code, out, _) = run_capture(&["rescale", "--kind", "pearson", "--value", "-1"]);
        assert_eq!(code, 0, "{out}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["rescaled"], 0.0);
    }
}
