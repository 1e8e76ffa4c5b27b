//! C ABI over `lexnorm`.
//!
//! Conventions:
//! - every function returns a [`LexnormStatus`]; results come back through
//!   out-pointers;
//! - strings are NUL-terminated UTF-8. Strings returned by the library are
//!   owned by the caller and released with [`lexnorm_string_free`];
//! - on failure, [`lexnorm_last_error`] describes the most recent error on
//!   the calling thread;
//! - a [`LexnormGraph`] is not synchronized. Use one handle per thread or
//!   lock around it.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use lexnorm::graph::{self, GraphError, KnowledgeGraph, RelationKind};
use lexnorm::ingest::{self, Policy, ReportFormat};
use lexnorm::jsonld::{self, CodecError};
use lexnorm::server::{handle_dereference, DereferenceRequest};
use lexnorm::urn;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexnormStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidDocument = 4,
    NotFound = 5,
    IoError = 6,
    GraphError = 7,
    BadBase = 8,
    Panic = 99,
}

/// Opaque knowledge graph handle.
pub struct LexnormGraph {
    inner: KnowledgeGraph,
}

/// Graph counters. Edge counts are per relation kind.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LexnormStats {
    pub work_count: usize,
    pub external_node_count: usize,
    pub edge_count: usize,
    pub same_as: usize,
    pub about: usize,
    pub has_type: usize,
    pub jurisdiction: usize,
    pub passed_by: usize,
    pub published_by: usize,
    pub cites: usize,
    pub amends: usize,
    pub repeals: usize,
    pub related: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(LexnormStatus, String);

impl Failure {
    fn new(status: LexnormStatus, msg: impl ToString) -> Self {
        Failure(status, msg.to_string())
    }
}

impl From<CodecError> for Failure {
    fn from(e: CodecError) -> Self {
        let status = match e {
            CodecError::BadBase(_) => LexnormStatus::BadBase,
            _ => LexnormStatus::InvalidDocument,
        };
        Failure::new(status, e)
    }
}

impl From<urn::BadBase> for Failure {
    fn from(e: urn::BadBase) -> Self {
        Failure::new(LexnormStatus::BadBase, e)
    }
}

impl From<urn::ParseError> for Failure {
    fn from(e: urn::ParseError) -> Self {
        Failure::new(LexnormStatus::ParseError, e)
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        let status = match e {
            GraphError::UnknownEndpoint(_) => LexnormStatus::NotFound,
            GraphError::InvalidWork(_) => LexnormStatus::InvalidDocument,
            _ => LexnormStatus::GraphError,
        };
        Failure::new(status, e)
    }
}

impl From<graph::SnapshotError> for Failure {
    fn from(e: graph::SnapshotError) -> Self {
        let status = match e {
            graph::SnapshotError::Io { .. } => LexnormStatus::IoError,
            _ => LexnormStatus::InvalidDocument,
        };
        Failure::new(status, e)
    }
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> LexnormStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LexnormStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            LexnormStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(
            LexnormStatus::NullArgument,
            format!("{name} is NULL"),
        ));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(LexnormStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

unsafe fn graph_ref<'a>(g: *const LexnormGraph) -> Result<&'a LexnormGraph, Failure> {
    g.as_ref()
        .ok_or_else(|| Failure::new(LexnormStatus::NullArgument, "graph is NULL"))
}

unsafe fn graph_mut<'a>(g: *mut LexnormGraph) -> Result<&'a mut LexnormGraph, Failure> {
    g.as_mut()
        .ok_or_else(|| Failure::new(LexnormStatus::NullArgument, "graph is NULL"))
}

fn check_out<T>(out: *mut T) -> Result<(), Failure> {
    if out.is_null() {
        Err(Failure::new(
            LexnormStatus::NullArgument,
            "output pointer is NULL",
        ))
    } else {
        Ok(())
    }
}

unsafe fn put_string(out: *mut *mut c_char, s: String) {
    let c = CString::new(s.replace('\0', "\u{FFFD}")).unwrap_or_default();
    *out = c.into_raw();
}

/// Message for the last failed call on this thread, or NULL. Valid until
/// the next library call on the same thread. Do not free.
#[no_mangle]
pub extern "C" fn lexnorm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and must not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn lexnorm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Canonical lowercase form of a LEX URN.
///
/// # Safety
/// `urn` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lexnorm_urn_normalize(
    urn: *const c_char,
    out: *mut *mut c_char,
) -> LexnormStatus {
    guard(|| {
        check_out(out)?;
        let canonical = urn::normalize_urn(text(urn, "urn")?)?;
        put_string(out, canonical);
        Ok(())
    })
}

/// `{base}?urn={canonical urn}`.
///
/// # Safety
/// `urn` and `base` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lexnorm_resolver_uri(
    urn: *const c_char,
    base: *const c_char,
    out: *mut *mut c_char,
) -> LexnormStatus {
    guard(|| {
        check_out(out)?;
        let parsed = urn::parse_urn(text(urn, "urn")?)?;
        let uri = urn::resolver_uri(&parsed, text(base, "base")?)?;
        put_string(out, uri);
        Ok(())
    })
}

/// Validates a JSON-LD document. Returns `Ok` whenever the text could be
/// examined; `*report_json` holds `{"valid", "findings", ...}` and
/// `*is_valid` (if not NULL) the verdict.
///
/// # Safety
/// `document` must be a NUL-terminated string; `report_json` must be
/// writable; `is_valid` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn lexnorm_document_validate(
    document: *const c_char,
    report_json: *mut *mut c_char,
    is_valid: *mut bool,
) -> LexnormStatus {
    guard(|| {
        check_out(report_json)?;
        let report = jsonld::parse_document(text(document, "document")?)?;
        let valid = report.findings.is_valid();
        let value = serde_json::json!({
            "valid": valid,
            "error_count": report.findings.error_count(),
            "warning_count": report.findings.warning_count(),
            "findings": report.findings.findings(),
            "unknown_properties": report.unknown_properties,
        });
        put_string(report_json, value.to_string());
        if !is_valid.is_null() {
            *is_valid = valid;
        }
        Ok(())
    })
}

/// Canonical JSON-LD for a valid document. Fails with `InvalidDocument`
/// when the document has error findings.
///
/// # Safety
/// `document` and `base` must be NUL-terminated strings; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn lexnorm_document_normalize(
    document: *const c_char,
    base: *const c_char,
    out: *mut *mut c_char,
) -> LexnormStatus {
    guard(|| {
        check_out(out)?;
        let base = text(base, "base")?;
        let report = jsonld::parse_document(text(document, "document")?)?;
        let work = match report.work {
            Some(w) if report.findings.is_valid() => w,
            _ => {
                let first = report
                    .findings
                    .findings()
                    .iter()
                    .find(|f| f.is_error())
                    .map(ToString::to_string)
                    .unwrap_or_default();
                return Err(Failure::new(LexnormStatus::InvalidDocument, first));
            }
        };
        put_string(out, jsonld::emit_document(&work, base)?.into_string());
        Ok(())
    })
}

/// New empty graph. Never NULL.
#[no_mangle]
pub extern "C" fn lexnorm_graph_new() -> *mut LexnormGraph {
    Box::into_raw(Box::new(LexnormGraph {
        inner: KnowledgeGraph::new(),
    }))
}

/// Releases a graph. NULL is ignored.
///
/// # Safety
/// `g` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lexnorm_graph_free(g: *mut LexnormGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Loads a snapshot file into a new graph.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lexnorm_graph_load(
    path: *const c_char,
    out: *mut *mut LexnormGraph,
) -> LexnormStatus {
    guard(|| {
        check_out(out)?;
        let inner = graph::load_snapshot(Path::new(text(path, "path")?))?;
        *out = Box::into_raw(Box::new(LexnormGraph { inner }));
        Ok(())
    })
}

/// Writes a snapshot file atomically.
///
/// # Safety
/// `g` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn lexnorm_graph_save(
    g: *const LexnormGraph,
    path: *const c_char,
) -> LexnormStatus {
    guard(|| {
        let g = graph_ref(g)?;
        graph::save_snapshot(&g.inner, Path::new(text(path, "path")?))?;
        Ok(())
    })
}

/// Ingests JSONL text (one document per line). `*report_json` receives the
/// ingest report and may be NULL if not wanted. Rejected records do not
/// make the call fail.
///
/// # Safety
/// `g` must be a live handle; `jsonl` a NUL-terminated string;
/// `report_json` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn lexnorm_graph_ingest_jsonl(
    g: *mut LexnormGraph,
    jsonl: *const c_char,
    strict: bool,
    report_json: *mut *mut c_char,
) -> LexnormStatus {
    guard(|| {
        let g = graph_mut(g)?;
        let body = text(jsonl, "jsonl")?;
        let records = ingest::jsonl_records(body.as_bytes(), "input")
            .map_err(|e| Failure::new(LexnormStatus::IoError, e))?;
        let policy = if strict {
            Policy::Strict
        } else {
            Policy::Lenient
        };
        let report = ingest::ingest(records, &mut g.inner, policy);
        if !report_json.is_null() {
            put_string(
                report_json,
                ingest::render_report(&report, ReportFormat::Json),
            );
        }
        Ok(())
    })
}

/// Adds a `cites`, `amends`, `repeals` or `related` edge between stored
/// Works.
///
/// # Safety
/// `g` must be a live handle; the strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn lexnorm_graph_add_relation(
    g: *mut LexnormGraph,
    from: *const c_char,
    kind: *const c_char,
    to: *const c_char,
) -> LexnormStatus {
    guard(|| {
        let g = graph_mut(g)?;
        let norm = |p, name| -> Result<_, Failure> {
            text(p, name)?
                .parse::<urn::LexNormUrn>()
                .map_err(Failure::from)
        };
        let (from, to) = (norm(from, "from")?, norm(to, "to")?);
        let kind: RelationKind = text(kind, "kind")?
            .parse()
            .map_err(|e| Failure::new(LexnormStatus::ParseError, e))?;
        g.inner.add_relation(&from, kind, &to)?;
        Ok(())
    })
}

/// # Safety
/// `g` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lexnorm_graph_stats(
    g: *const LexnormGraph,
    out: *mut LexnormStats,
) -> LexnormStatus {
    guard(|| {
        check_out(out)?;
        let s = graph_ref(g)?.inner.stats();
        *out = LexnormStats {
            work_count: s.work_count,
            external_node_count: s.external_node_count,
            edge_count: s.edge_count(),
            same_as: s.count(RelationKind::SameAs),
            about: s.count(RelationKind::About),
            has_type: s.count(RelationKind::HasType),
            jurisdiction: s.count(RelationKind::Jurisdiction),
            passed_by: s.count(RelationKind::PassedBy),
            published_by: s.count(RelationKind::PublishedBy),
            cites: s.count(RelationKind::Cites),
            amends: s.count(RelationKind::Amends),
            repeals: s.count(RelationKind::Repeals),
            related: s.count(RelationKind::Related),
        };
        Ok(())
    })
}

/// Resolves a `urn` query value the way the HTTP server does. `accept` may
/// be NULL. Returns `Ok` for every HTTP outcome; `*http_status` and `*body`
/// carry the result (400/404/406 bodies are JSON problem objects).
///
/// # Safety
/// `g` must be a live handle; `urn_param` and `base` NUL-terminated;
/// `accept` NULL or NUL-terminated; `http_status` and `body` writable.
#[no_mangle]
pub unsafe extern "C" fn lexnorm_graph_dereference(
    g: *const LexnormGraph,
    urn_param: *const c_char,
    accept: *const c_char,
    base: *const c_char,
    http_status: *mut u16,
    body: *mut *mut c_char,
) -> LexnormStatus {
    guard(|| {
        check_out(http_status)?;
        check_out(body)?;
        let g = graph_ref(g)?;
        let mut req = DereferenceRequest::new(text(urn_param, "urn_param")?);
        if !accept.is_null() {
            req = req.accept(text(accept, "accept")?);
        }
        let base = text(base, "base")?;
        urn::check_base(base)?;
        let resp = handle_dereference(&g.inner, &req, base);
        *http_status = resp.status;
        put_string(body, resp.body_text().to_owned());
        Ok(())
    })
}
