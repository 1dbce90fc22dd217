//! Command-line front end. [`run`] takes the argument list and two output
//! streams and returns the process exit code:
//! 0 on success, 1 on input or validation errors, 2 on usage errors.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rust_decimal::Decimal;
use serde_json::{json, Value};

use crate::cq::{answer_cq, CqError};
use crate::iri::Iri;
use crate::jams::{detect_modality_hint, lower_document, parse_jams, resolve_annotator, LoweringOptions, ModalityHint};
use crate::model::{AnnotatorType, Modality, Model};
use crate::rdf::{emit_graph, parse_turtle, serialize_ntriples, serialize_turtle, RdfGraph};
use crate::validate::{explain, validate_graph, validate_model, Severity, Violation};

pub const DEFAULT_BASE_IRI: &str = "http://example.org/";

#[derive(Debug, Parser)]
#[command(name = "muse-anno", version, about = "JAMS to Music Annotation pattern RDF")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write one Turtle or N-Triples file per JAMS input.
    Convert {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Format::Ttl)]
        format: Format,
        /// Output directory. Without it the graphs go to stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check JAMS, Turtle or N-Triples inputs and print violations.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Answer a competency question over the converted inputs.
    Query {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=10))]
        cq: u8,
        #[arg(long)]
        subject: Option<String>,
        /// Print JSON instead of TSV.
        #[arg(long)]
        json: bool,
    },
    /// Summarise a corpus of JAMS files.
    Stats {
        #[command(flatten)]
        common: Common,
    },
    /// Describe a violation code.
    Explain { code: String },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Files or directories. Directories are searched recursively.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = ModalityArg::Auto)]
    pub modality: ModalityArg,
    #[arg(long, env = "MUSE_ANNO_BASE_IRI", default_value = DEFAULT_BASE_IRI)]
    pub base_iri: String,
    /// Reject annotation namespaces without a dedicated value kind.
    #[arg(long)]
    pub strict: bool,
    /// Human-readable diagnostics instead of JSON lines.
    #[arg(long)]
    pub pretty: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Ttl,
    Nt,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Ttl => "ttl",
            Format::Nt => "nt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModalityArg {
    Audio,
    Score,
    Auto,
}

/// Exit codes.
pub const OK: i32 = 0;
pub const FAILED: i32 = 1;
pub const USAGE: i32 = 2;

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return if code == 0 { OK } else { USAGE };
        }
    };
    let mut ctx = Ctx { out, err, pretty: false };
    match cli.command {
        Command::Convert { common, format, output } => {
            ctx.pretty = common.pretty;
            convert(&mut ctx, &common, format, output.as_deref())
        }
        Command::Validate { common } => {
            ctx.pretty = common.pretty;
            validate(&mut ctx, &common)
        }
        Command::Query { common, cq, subject, json } => {
            ctx.pretty = common.pretty;
            query(&mut ctx, &common, cq, subject.as_deref(), json)
        }
        Command::Stats { common } => {
            ctx.pretty = common.pretty;
            stats(&mut ctx, &common)
        }
        Command::Explain { code } => match explain(&code) {
            Ok(e) => {
                let _ = writeln!(ctx.out, "{e}");
                OK
            }
            Err(e) => {
                ctx.diagnostic(None, &e.to_string());
                USAGE
            }
        },
    }
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    pretty: bool,
}

impl Ctx<'_> {
    fn diagnostic(&mut self, file: Option<&Path>, message: &str) {
        let line = if self.pretty {
            match file {
                Some(f) => format!("{}: {message}", f.display()),
                None => message.to_owned(),
            }
        } else {
            let mut obj = serde_json::Map::new();
            if let Some(f) = file {
                obj.insert("file".into(), f.display().to_string().into());
            }
            obj.insert("error".into(), message.into());
            Value::Object(obj).to_string()
        };
        let _ = writeln!(self.err, "{line}");
    }

    fn violation_line(&self, file: &Path, v: &Violation) -> String {
        if self.pretty {
            format!("{}: {v}", file.display())
        } else {
            let mut obj = serde_json::Map::new();
            obj.insert("file".into(), file.display().to_string().into());
            if let Value::Object(fields) = serde_json::to_value(v).expect("violations serialize") {
                obj.extend(fields);
            }
            Value::Object(obj).to_string()
        }
    }

    fn report_to_err(&mut self, file: &Path, violations: &[Violation]) {
        for v in violations {
            let line = self.violation_line(file, v);
            let _ = writeln!(self.err, "{line}");
        }
    }
}

/// Expands directories into their files with one of `extensions`, sorted.
/// Missing paths are reported and skipped.
fn collect_inputs(ctx: &mut Ctx<'_>, inputs: &[PathBuf], extensions: &[&str]) -> (Vec<PathBuf>, bool) {
    let mut files = Vec::new();
    let mut ok = true;
    for input in inputs {
        if input.is_dir() {
            let mut found: Vec<PathBuf> = walkdir::WalkDir::new(input)
                .into_iter()
                .filter_map(Result::ok)
                .filter(|e| e.file_type().is_file())
                .map(|e| e.into_path())
                .filter(|p| p.extension().and_then(|e| e.to_str()).is_some_and(|e| extensions.contains(&e)))
                .collect();
            found.sort();
            files.extend(found);
        } else if input.is_file() {
            files.push(input.clone());
        } else {
            ctx.diagnostic(Some(input), "no such file or directory");
            ok = false;
        }
    }
    (files, ok)
}

enum LoadError {
    /// Bad input; exit 1.
    Input(String),
    /// Needs a flag the user did not give; exit 2.
    Usage(String),
}

fn load_model(common: &Common, path: &Path) -> Result<Model, LoadError> {
    let text = fs::read_to_string(path).map_err(|e| LoadError::Input(e.to_string()))?;
    let doc = parse_jams(&text).map_err(|e| LoadError::Input(e.to_string()))?;
    let modality = match common.modality {
        ModalityArg::Audio => Modality::Audio,
        ModalityArg::Score => Modality::Score,
        ModalityArg::Auto => match detect_modality_hint(&doc) {
            ModalityHint::Audio => Modality::Audio,
            ModalityHint::Score => Modality::Score,
            ModalityHint::Unknown => {
                return Err(LoadError::Usage("cannot tell audio from score; pass --modality audio|score".into()))
            }
        },
    };
    let mut opts = LoweringOptions::new(modality, common.base_iri.clone());
    opts.strict_namespaces = common.strict;
    opts.document_key = path.file_stem().map(|s| s.to_string_lossy().into_owned());
    lower_document(&doc, &opts).map_err(|e| LoadError::Input(e.to_string()))
}

fn is_jams(path: &Path) -> bool {
    !matches!(path.extension().and_then(|e| e.to_str()), Some("ttl" | "nt"))
}

/// Combines exit codes, keeping the most severe.
fn worst(a: i32, b: i32) -> i32 {
    a.max(b)
}

fn convert(ctx: &mut Ctx<'_>, common: &Common, format: Format, output: Option<&Path>) -> i32 {
    let (files, found_all) = collect_inputs(ctx, &common.inputs, &["jams"]);
    let mut code = if found_all { OK } else { FAILED };
    if let Some(dir) = output {
        if let Err(e) = fs::create_dir_all(dir) {
            ctx.diagnostic(Some(dir), &e.to_string());
            return FAILED;
        }
    }
    for file in files {
        let model = match load_model(common, &file) {
            Ok(m) => m,
            Err(LoadError::Input(msg)) => {
                ctx.diagnostic(Some(&file), &msg);
                code = worst(code, FAILED);
                continue;
            }
            Err(LoadError::Usage(msg)) => {
                ctx.diagnostic(Some(&file), &msg);
                code = worst(code, USAGE);
                continue;
            }
        };
        let violations = validate_model(&model);
        ctx.report_to_err(&file, &violations);
        let graph = match emit_graph(&model) {
            Ok(g) => g,
            Err(_) => {
                code = worst(code, FAILED);
                continue;
            }
        };
        let text = match format {
            Format::Ttl => serialize_turtle(&graph),
            Format::Nt => serialize_ntriples(&graph),
        };
        match output {
            None => {
                let _ = ctx.out.write_all(text.as_bytes());
            }
            Some(dir) => {
                let stem = file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                let target = dir.join(format!("{stem}.{}", format.extension()));
                if let Err(e) = write_atomic(&target, text.as_bytes()) {
                    ctx.diagnostic(Some(&target), &e.to_string());
                    code = worst(code, FAILED);
                    continue;
                }
                let line = if ctx.pretty {
                    format!("{} -> {}: {} triples", file.display(), target.display(), graph.len())
                } else {
                    json!({"file": file.display().to_string(), "output": target.display().to_string(), "triples": graph.len()})
                        .to_string()
                };
                let _ = writeln!(ctx.out, "{line}");
            }
        }
    }
    code
}

/// Writes through a temporary sibling file and renames it into place.
fn write_atomic(target: &Path, bytes: &[u8]) -> io::Result<()> {
    let name = target.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = target.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
    let result = fs::File::create(&tmp).and_then(|mut f| {
        f.write_all(bytes)?;
        f.sync_all()
    });
    match result.and_then(|_| fs::rename(&tmp, target)) {
        Ok(()) => Ok(()),
        Err(e) => {
            let _ = fs::remove_file(&tmp);
            Err(e)
        }
    }
}

fn validate(ctx: &mut Ctx<'_>, common: &Common) -> i32 {
    let (files, found_all) = collect_inputs(ctx, &common.inputs, &["jams", "ttl", "nt"]);
    let mut code = if found_all { OK } else { FAILED };
    for file in files {
        let violations = if is_jams(&file) {
            match load_model(common, &file) {
                Ok(model) => validate_model(&model),
                Err(LoadError::Input(msg)) => {
                    ctx.diagnostic(Some(&file), &msg);
                    code = worst(code, FAILED);
                    continue;
                }
                Err(LoadError::Usage(msg)) => {
                    ctx.diagnostic(Some(&file), &msg);
                    code = worst(code, USAGE);
                    continue;
                }
            }
        } else {
            match fs::read_to_string(&file).map_err(|e| e.to_string()).and_then(|t| parse_turtle(&t).map_err(|e| e.to_string())) {
                Ok(graph) => validate_graph(&graph),
                Err(msg) => {
                    ctx.diagnostic(Some(&file), &msg);
                    code = worst(code, FAILED);
                    continue;
                }
            }
        };
        for v in &violations {
            let line = ctx.violation_line(&file, v);
            let _ = writeln!(ctx.out, "{line}");
        }
        if violations.iter().any(|v| v.severity == Severity::Error) {
            code = worst(code, FAILED);
        }
    }
    code
}

fn query(ctx: &mut Ctx<'_>, common: &Common, cq: u8, subject: Option<&str>, as_json: bool) -> i32 {
    let subject = match subject.map(Iri::new).transpose() {
        Ok(s) => s,
        Err(e) => {
            ctx.diagnostic(None, &format!("--subject: {e}"));
            return USAGE;
        }
    };
    let (files, found_all) = collect_inputs(ctx, &common.inputs, &["jams", "ttl", "nt"]);
    if !found_all {
        return FAILED;
    }
    let mut graph = RdfGraph::new();
    for file in files {
        let part = if is_jams(&file) {
            let model = match load_model(common, &file) {
                Ok(m) => m,
                Err(LoadError::Input(msg)) => {
                    ctx.diagnostic(Some(&file), &msg);
                    return FAILED;
                }
                Err(LoadError::Usage(msg)) => {
                    ctx.diagnostic(Some(&file), &msg);
                    return USAGE;
                }
            };
            match emit_graph(&model) {
                Ok(g) => g,
                Err(crate::rdf::EmitError::UnvalidatedModel(violations)) => {
                    ctx.report_to_err(&file, &violations);
                    return FAILED;
                }
            }
        } else {
            match fs::read_to_string(&file).map_err(|e| e.to_string()).and_then(|t| parse_turtle(&t).map_err(|e| e.to_string())) {
                Ok(g) => g,
                Err(msg) => {
                    ctx.diagnostic(Some(&file), &msg);
                    return FAILED;
                }
            }
        };
        graph.merge(part);
    }
    match answer_cq(cq, &graph, subject.as_ref()) {
        Ok(result) => {
            let text = if as_json { result.to_json() + "\n" } else { result.to_tsv() };
            let _ = ctx.out.write_all(text.as_bytes());
            OK
        }
        Err(e @ CqError::SubjectNotFound { .. }) => {
            ctx.diagnostic(None, &e.to_string());
            FAILED
        }
        Err(e) => {
            ctx.diagnostic(None, &e.to_string());
            USAGE
        }
    }
}

#[derive(Default)]
struct Stats {
    files: usize,
    annotations: BTreeMap<String, usize>,
    observations: BTreeMap<String, usize>,
    annotator_types: BTreeMap<String, usize>,
    min_time: Option<Decimal>,
    max_time: Option<Decimal>,
}

fn stats(ctx: &mut Ctx<'_>, common: &Common) -> i32 {
    let (files, found_all) = collect_inputs(ctx, &common.inputs, &["jams"]);
    let mut code = if found_all { OK } else { FAILED };
    let mut s = Stats::default();
    for file in files {
        let doc = match fs::read_to_string(&file).map_err(|e| e.to_string()).and_then(|t| parse_jams(&t).map_err(|e| e.to_string())) {
            Ok(doc) => doc,
            Err(msg) => {
                ctx.diagnostic(Some(&file), &msg);
                code = worst(code, FAILED);
                continue;
            }
        };
        s.files += 1;
        for block in &doc.annotations {
            *s.annotations.entry(block.namespace.clone()).or_default() += 1;
            *s.observations.entry(block.namespace.clone()).or_default() += block.data.len();
            let (_, annotator_type) = resolve_annotator(&block.annotation_metadata);
            let type_name = match annotator_type {
                AnnotatorType::Human => "human".to_owned(),
                AnnotatorType::Machine => "machine".to_owned(),
                AnnotatorType::Crowdsourcing => "crowdsourcing".to_owned(),
                AnnotatorType::Other(name) => name,
            };
            *s.annotator_types.entry(type_name).or_default() += 1;
            for row in &block.data {
                let end = row.time + row.duration;
                s.min_time = Some(s.min_time.map_or(row.time, |m| m.min(row.time)));
                s.max_time = Some(s.max_time.map_or(end, |m| m.max(end)));
            }
        }
    }
    let number = |d: Option<Decimal>| -> Value {
        d.map(|d| serde_json::from_str(&d.to_string()).expect("decimals are JSON numbers")).unwrap_or(Value::Null)
    };
    let report = json!({
        "files": s.files,
        "annotations": s.annotations.values().sum::<usize>(),
        "namespaces": s.annotations,
        "observations": s.observations.values().sum::<usize>(),
        "observations_by_namespace": s.observations,
        "annotator_types": s.annotator_types,
        "min_time": number(s.min_time),
        "max_time": number(s.max_time),
    });
    let text = if common.pretty { serde_json::to_string_pretty(&report) } else { serde_json::to_string(&report) };
    let _ = writeln!(ctx.out, "{}", text.expect("stats serialize"));
    code
}
