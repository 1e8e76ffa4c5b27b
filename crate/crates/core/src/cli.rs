//! `lexnorm` command line.
//!
//! Data goes to stdout, diagnostics to stderr. Exit codes: 0 success,
//! 1 validation errors present, 2 usage or I/O failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::graph::{self, KnowledgeGraph, RelationKind, SharedGraph};
use crate::ingest::{self, Policy, ReportFormat};
use crate::jsonld;
use crate::server;
use crate::urn::{self, LexNormUrn, LexUrn};

pub const DEFAULT_BASE: &str = "https://normas.leg.br/";
pub const BASE_ENV: &str = "LEXNORM_BASE";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum ExitStatus {
    Success = 0,
    ValidationErrors = 1,
    Failure = 2,
}

impl ExitStatus {
    pub fn code(self) -> u8 {
        self as u8
    }
}

impl From<ExitStatus> for std::process::ExitCode {
    fn from(s: ExitStatus) -> Self {
        std::process::ExitCode::from(s.code())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "lexnorm",
    version,
    about = "LEX URN and schema.org Legislation toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse or normalize a LEX URN.
    Urn {
        #[command(subcommand)]
        action: UrnAction,
    },
    /// Check a JSON-LD Legislation document.
    Validate {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Re-emit a JSON-LD document in canonical form.
    Normalize {
        file: PathBuf,
        #[arg(long, env = BASE_ENV, default_value = DEFAULT_BASE)]
        base: String,
    },
    /// Load a JSONL file, a .jsonld file or a directory of .jsonld files into a snapshot.
    Ingest {
        path: PathBuf,
        #[arg(long)]
        store: PathBuf,
        /// Reject records with any error finding.
        #[arg(long)]
        strict: bool,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Inspect a snapshot.
    Graph {
        #[command(subcommand)]
        action: GraphAction,
    },
    /// Record an inter-norm relation (cites, amends, repeals, related).
    Relate {
        from: String,
        kind: String,
        to: String,
        #[arg(long)]
        store: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Serve stored Works as Linked Data.
    Serve {
        #[arg(long)]
        store: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
        #[arg(long, env = BASE_ENV, default_value = DEFAULT_BASE)]
        base: String,
    },
}

#[derive(Debug, Subcommand)]
enum UrnAction {
    Parse {
        urn: String,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    Normalize {
        urn: String,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

#[derive(Debug, Subcommand)]
enum GraphAction {
    Stats {
        #[arg(long)]
        store: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    Neighbors {
        urn: String,
        #[arg(long)]
        rel: Option<String>,
        #[arg(long)]
        store: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

/// Runs the command line `args` (program name first).
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let status = if e.use_stderr() {
                ExitStatus::Failure
            } else {
                ExitStatus::Success
            };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
            } else {
                let _ = write!(stdout, "{rendered}");
            }
            return status;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(status) => status,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            ExitStatus::Failure
        }
    }
}

fn dispatch(
    command: Command,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> anyhow::Result<ExitStatus> {
    match command {
        Command::Urn { action } => urn_command(action, out),
        Command::Validate { file, format } => validate(&file, format, out),
        Command::Normalize { file, base } => normalize(&file, &base, out, err),
        Command::Ingest {
            path,
            store,
            strict,
            format,
        } => ingest_command(&path, &store, strict, format, out),
        Command::Graph { action } => graph_command(action, out),
        Command::Relate {
            from,
            kind,
            to,
            store,
            format,
        } => relate(&from, &kind, &to, &store, format, out),
        Command::Serve { store, addr, base } => serve(&store, &addr, &base, err),
    }
}

fn urn_command(action: UrnAction, out: &mut dyn Write) -> anyhow::Result<ExitStatus> {
    match action {
        UrnAction::Parse { urn: text, format } => {
            let parsed = urn::parse_urn(&text).with_context(|| format!("cannot parse `{text}`"))?;
            let value = match &parsed {
                LexUrn::Norm(n) => json!({
                    "kind": "norm",
                    "jurisdiction": n.jurisdiction(),
                    "authority": n.authority(),
                    "doc_type": n.doc_type(),
                    "date": n.date().format("%Y-%m-%d").to_string(),
                    "number": n.number(),
                    "canonical": parsed.to_string(),
                }),
                LexUrn::Vocab(v) => json!({
                    "kind": "vocabulary",
                    "jurisdiction": v.jurisdiction(),
                    "authority": v.authority(),
                    "scheme": v.scheme(),
                    "term": v.term(),
                    "canonical": parsed.to_string(),
                }),
            };
            match format {
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&value)?)?,
                Format::Text => {
                    for (k, v) in value.as_object().expect("object literal") {
                        writeln!(out, "{k}: {}", v.as_str().unwrap_or_default())?;
                    }
                }
            }
        }
        UrnAction::Normalize { urn: text, format } => {
            let canonical =
                urn::normalize_urn(&text).with_context(|| format!("cannot parse `{text}`"))?;
            match format {
                Format::Json => writeln!(out, "{}", json!({ "canonical": canonical }))?,
                Format::Text => writeln!(out, "{canonical}")?,
            }
        }
    }
    Ok(ExitStatus::Success)
}

fn read_text(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn validate(file: &Path, format: Format, out: &mut dyn Write) -> anyhow::Result<ExitStatus> {
    let text = read_text(file)?;
    let (findings, unknown) = match jsonld::parse_document(&text) {
        Ok(report) => (report.findings, report.unknown_properties),
        Err(e) => (
            crate::finding::ValidationReport::new(vec![crate::finding::ValidationFinding::error(
                crate::finding::FindingCode::NotJson,
                "$",
                e.to_string(),
            )]),
            Vec::new(),
        ),
    };
    let errors = findings.error_count();
    let warnings = findings.warning_count();
    match format {
        Format::Json => {
            let value = json!({
                "valid": findings.is_valid(),
                "error_count": errors,
                "warning_count": warnings,
                "findings": findings.findings(),
                "unknown_properties": unknown,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&value)?)?;
        }
        Format::Text => {
            let verdict = if findings.is_valid() {
                "valid"
            } else {
                "invalid"
            };
            write!(out, "{verdict}, {errors} errors")?;
            if warnings > 0 {
                write!(out, ", {warnings} warnings")?;
            }
            writeln!(out)?;
            for f in findings.findings() {
                writeln!(out, "  {f}")?;
            }
        }
    }
    Ok(if findings.is_valid() {
        ExitStatus::Success
    } else {
        ExitStatus::ValidationErrors
    })
}

fn normalize(
    file: &Path,
    base: &str,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> anyhow::Result<ExitStatus> {
    urn::check_base(base)?;
    let text = read_text(file)?;
    let report = match jsonld::parse_document(&text) {
        Ok(r) => r,
        Err(e) => {
            writeln!(err, "{}: {e}", file.display())?;
            return Ok(ExitStatus::ValidationErrors);
        }
    };
    let Some(work) = report.work.filter(|_| report.findings.is_valid()) else {
        for f in report.findings.findings().iter().filter(|f| f.is_error()) {
            writeln!(err, "{}: {f}", file.display())?;
        }
        return Ok(ExitStatus::ValidationErrors);
    };
    let doc = jsonld::emit_document(&work, base)?;
    writeln!(out, "{}", doc.as_str())?;
    Ok(ExitStatus::Success)
}

fn load_or_new(store: &Path) -> anyhow::Result<KnowledgeGraph> {
    if store.exists() {
        Ok(graph::load_snapshot(store)?)
    } else {
        Ok(KnowledgeGraph::new())
    }
}

fn ingest_command(
    path: &Path,
    store: &Path,
    strict: bool,
    format: Format,
    out: &mut dyn Write,
) -> anyhow::Result<ExitStatus> {
    let mut g = load_or_new(store)?;
    let policy = if strict {
        Policy::Strict
    } else {
        Policy::Lenient
    };
    let report = ingest::ingest_path(path, &mut g, policy)?;
    graph::save_snapshot(&g, store)?;
    let format = match format {
        Format::Text => ReportFormat::Text,
        Format::Json => ReportFormat::Json,
    };
    writeln!(out, "{}", ingest::render_report(&report, format))?;
    Ok(if report.has_errors() {
        ExitStatus::ValidationErrors
    } else {
        ExitStatus::Success
    })
}

fn parse_norm(text: &str) -> anyhow::Result<LexNormUrn> {
    text.parse::<LexNormUrn>()
        .with_context(|| format!("`{text}` is not a norm URN"))
}

fn graph_command(action: GraphAction, out: &mut dyn Write) -> anyhow::Result<ExitStatus> {
    match action {
        GraphAction::Stats { store, format } => {
            let g = graph::load_snapshot(&store)?;
            let stats = g.stats();
            match format {
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&stats)?)?,
                Format::Text => {
                    writeln!(out, "works {}", stats.work_count)?;
                    writeln!(out, "external nodes {}", stats.external_node_count)?;
                    writeln!(out, "edges {}", stats.edge_count())?;
                    for (kind, n) in &stats.edge_count_by_kind {
                        writeln!(out, "  {kind} {n}")?;
                    }
                }
            }
        }
        GraphAction::Neighbors {
            urn: text,
            rel,
            store,
            format,
        } => {
            let g = graph::load_snapshot(&store)?;
            let urn = parse_norm(&text)?;
            let filter = rel.map(|r| r.parse::<RelationKind>()).transpose()?;
            let neighbors = g.neighbors(&urn, filter)?;
            match format {
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&neighbors)?)?,
                Format::Text => {
                    for n in neighbors {
                        let dir = match n.direction {
                            graph::Direction::Outgoing => "->",
                            graph::Direction::Incoming => "<-",
                        };
                        writeln!(out, "{} {dir} {}", n.kind, n.node)?;
                    }
                }
            }
        }
    }
    Ok(ExitStatus::Success)
}

fn relate(
    from: &str,
    kind: &str,
    to: &str,
    store: &Path,
    format: Format,
    out: &mut dyn Write,
) -> anyhow::Result<ExitStatus> {
    let kind: RelationKind = kind.parse()?;
    let (from, to) = (parse_norm(from)?, parse_norm(to)?);
    if !store.exists() {
        bail!("snapshot {} does not exist", store.display());
    }
    let mut g = graph::load_snapshot(store)?;
    let edge = g.add_relation(&from, kind, &to)?;
    graph::save_snapshot(&g, store)?;
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string(&edge)?)?,
        Format::Text => writeln!(out, "{} {} {}", edge.from, edge.kind, edge.to)?,
    }
    Ok(ExitStatus::Success)
}

fn serve(store: &Path, addr: &str, base: &str, err: &mut dyn Write) -> anyhow::Result<ExitStatus> {
    let g = graph::load_snapshot(store)?;
    let handle = server::serve(SharedGraph::new(g), addr, base)?;
    writeln!(
        err,
        "serving {} on http://{}",
        store.display(),
        handle.local_addr()
    )?;
    err.flush()?;
    handle.wait()?;
    Ok(ExitStatus::Success)
}
