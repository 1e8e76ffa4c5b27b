//! Bulk loading of JSON-LD documents with a conformance report.
//!
//! Records are decoded in parallel; upserts happen afterwards, one at a time
//! and in source order, so the report and the resulting graph never depend
//! on scheduling.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufRead, BufReader};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::finding::{FindingCode, ValidationFinding};
use crate::graph::KnowledgeGraph;
use crate::jsonld::{self, FILE_EXTENSION};
use crate::norm::NormWork;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Policy {
    /// Reject any record with an error finding.
    Strict,
    /// Accept any record from which a Work could be recovered.
    #[default]
    Lenient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Error)]
#[error("cannot read {path}: {source}")]
pub struct IngestError {
    pub path: PathBuf,
    #[source]
    pub source: io::Error,
}

/// One candidate document and where it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceRecord {
    pub locator: String,
    pub bytes: Vec<u8>,
}

impl SourceRecord {
    pub fn new(locator: impl Into<String>, bytes: impl Into<Vec<u8>>) -> Self {
        Self {
            locator: locator.into(),
            bytes: bytes.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Accepted,
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordResult {
    pub locator: String,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub urn: Option<String>,
    pub findings: Vec<ValidationFinding>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub read_count: usize,
    pub accepted_count: usize,
    pub rejected_count: usize,
    pub per_record: Vec<RecordResult>,
    pub finding_histogram: BTreeMap<FindingCode, usize>,
}

impl IngestReport {
    pub fn is_empty(&self) -> bool {
        self.read_count == 0
    }

    pub fn has_errors(&self) -> bool {
        self.per_record
            .iter()
            .any(|r| r.findings.iter().any(ValidationFinding::is_error))
    }

    fn push(&mut self, record: RecordResult) {
        self.read_count += 1;
        match record.outcome {
            Outcome::Accepted => self.accepted_count += 1,
            Outcome::Rejected => self.rejected_count += 1,
        }
        for f in &record.findings {
            *self.finding_histogram.entry(f.code).or_default() += 1;
        }
        self.per_record.push(record);
    }

    /// Histogram entries by descending count, then code name.
    pub fn histogram_sorted(&self) -> Vec<(FindingCode, usize)> {
        let mut entries: Vec<_> = self
            .finding_histogram
            .iter()
            .map(|(c, n)| (*c, *n))
            .collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.as_str().cmp(b.0.as_str())));
        entries
    }
}

/// Splits JSONL text into records located as `name:line`. Blank lines are
/// skipped.
pub fn jsonl_records<R: BufRead>(reader: R, name: &str) -> io::Result<Vec<SourceRecord>> {
    let mut out = Vec::new();
    for (i, line) in reader.split(b'\n').enumerate() {
        let mut bytes = line?;
        if bytes.last() == Some(&b'\r') {
            bytes.pop();
        }
        if bytes.iter().all(u8::is_ascii_whitespace) {
            continue;
        }
        out.push(SourceRecord::new(format!("{name}:{}", i + 1), bytes));
    }
    Ok(out)
}

/// Every `.jsonld` file directly inside `dir`, in lexicographic path order.
pub fn directory_records(dir: &Path) -> io::Result<Vec<SourceRecord>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == FILE_EXTENSION))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| Ok(SourceRecord::new(p.display().to_string(), fs::read(&p)?)))
        .collect()
}

/// A directory of `.jsonld` files, a single `.jsonld` document, or JSONL.
pub fn records_from_path(path: &Path) -> Result<Vec<SourceRecord>, IngestError> {
    let wrap = |source| IngestError {
        path: path.to_owned(),
        source,
    };
    if path.is_dir() {
        return directory_records(path).map_err(wrap);
    }
    if path.extension().is_some_and(|x| x == FILE_EXTENSION) {
        let bytes = fs::read(path).map_err(wrap)?;
        return Ok(vec![SourceRecord::new(path.display().to_string(), bytes)]);
    }
    let file = fs::File::open(path).map_err(wrap)?;
    jsonl_records(BufReader::new(file), &path.display().to_string()).map_err(wrap)
}

enum Decoded {
    Work {
        work: Box<NormWork>,
        findings: Vec<ValidationFinding>,
    },
    Failed(Vec<ValidationFinding>),
}

fn decode(record: &SourceRecord) -> Decoded {
    let Ok(text) = std::str::from_utf8(&record.bytes) else {
        return Decoded::Failed(vec![ValidationFinding::error(
            FindingCode::NotUtf8,
            "$",
            "record is not valid UTF-8",
        )]);
    };
    match jsonld::parse_document(text) {
        Err(e) => Decoded::Failed(vec![ValidationFinding::error(
            FindingCode::NotJson,
            "$",
            e.to_string(),
        )]),
        Ok(report) => {
            let findings = report.findings.into_findings();
            match report.work {
                Some(work) => Decoded::Work {
                    work: Box::new(work),
                    findings,
                },
                None => Decoded::Failed(findings),
            }
        }
    }
}

pub fn ingest<I>(records: I, graph: &mut KnowledgeGraph, policy: Policy) -> IngestReport
where
    I: IntoIterator<Item = SourceRecord>,
{
    let records: Vec<SourceRecord> = records.into_iter().collect();
    let decoded: Vec<Decoded> = records.par_iter().map(decode).collect();

    let mut report = IngestReport::default();
    for (record, decoded) in records.into_iter().zip(decoded) {
        let result = match decoded {
            Decoded::Failed(findings) => RecordResult {
                locator: record.locator,
                outcome: Outcome::Rejected,
                urn: None,
                findings,
            },
            Decoded::Work { work, mut findings } => {
                let urn = work.urn.to_string();
                let has_error = findings.iter().any(ValidationFinding::is_error);
                if has_error && policy == Policy::Strict {
                    RecordResult {
                        locator: record.locator,
                        outcome: Outcome::Rejected,
                        urn: Some(urn),
                        findings,
                    }
                } else {
                    if graph.contains(&work.urn) {
                        findings.push(ValidationFinding::warning(
                            FindingCode::DuplicateUrn,
                            "legislationIdentifier",
                            format!("{urn} was already stored; replaced"),
                        ));
                    }
                    graph.insert_unvalidated(*work);
                    RecordResult {
                        locator: record.locator,
                        outcome: Outcome::Accepted,
                        urn: Some(urn),
                        findings,
                    }
                }
            }
        };
        report.push(result);
    }
    report
}

/// Reads `path` (see [`records_from_path`]) and ingests it.
pub fn ingest_path(
    path: &Path,
    graph: &mut KnowledgeGraph,
    policy: Policy,
) -> Result<IngestReport, IngestError> {
    Ok(ingest(records_from_path(path)?, graph, policy))
}

pub fn render_report(report: &IngestReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            serde_json::to_string_pretty(report).expect("report always serializes")
        }
        ReportFormat::Text => {
            let mut out = format!(
                "read {} accepted {} rejected {}",
                report.read_count, report.accepted_count, report.rejected_count
            );
            if report.is_empty() {
                return out;
            }
            let histogram = report.histogram_sorted();
            if !histogram.is_empty() {
                out.push_str("\nfindings:");
                for (code, n) in histogram {
                    let _ = write!(out, "\n  {code} {n}");
                }
            }
            out.push_str("\nrecords:");
            for r in &report.per_record {
                let outcome = match r.outcome {
                    Outcome::Accepted => "accepted",
                    Outcome::Rejected => "rejected",
                };
                let _ = write!(out, "\n  {} {outcome}", r.locator);
                if let Some(urn) = &r.urn {
                    let _ = write!(out, " {urn}");
                }
                for f in &r.findings {
                    let _ = write!(out, "\n    {f}");
                }
            }
            out
        }
    }
}
