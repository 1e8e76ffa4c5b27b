//! Dereferenceable Work URIs over HTTP.
//!
//! [`handle_dereference`] is the whole resolution logic as a pure function
//! of (graph snapshot, request, base). [`serve`] wraps it in an HTTP/1.1
//! service: `GET /?urn=<urn>` and `GET /health`.

use std::io;
use std::net::{SocketAddr, TcpListener};
use std::sync::Arc;
use std::thread::JoinHandle;

use axum::extract::{RawQuery, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use serde_json::json;
use thiserror::Error;
use tokio::sync::oneshot;

use crate::graph::{KnowledgeGraph, SharedGraph};
use crate::jsonld::{self, MEDIA_TYPE};
use crate::urn::{self, BadBase, LexUrn};

pub const PROBLEM_MEDIA_TYPE: &str = "application/json";

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DereferenceRequest {
    /// Raw `urn` query value, possibly percent-encoded.
    pub urn_param: String,
    pub accept_header: Option<String>,
}

impl DereferenceRequest {
    pub fn new(urn_param: impl Into<String>) -> Self {
        Self {
            urn_param: urn_param.into(),
            accept_header: None,
        }
    }

    pub fn accept(mut self, accept: impl Into<String>) -> Self {
        self.accept_header = Some(accept.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DereferenceResponse {
    pub status: u16,
    pub media_type: String,
    pub body: Vec<u8>,
}

impl DereferenceResponse {
    fn problem(status: u16, code: &str, detail: impl Into<String>) -> Self {
        let body = json!({ "error": code, "detail": detail.into() });
        Self {
            status,
            media_type: PROBLEM_MEDIA_TYPE.into(),
            body: body.to_string().into_bytes(),
        }
    }

    pub fn body_text(&self) -> &str {
        std::str::from_utf8(&self.body).unwrap_or_default()
    }
}

/// True when `accept` admits a JSON-family representation. A missing or
/// blank header admits everything.
pub fn accepts_json(accept: Option<&str>) -> bool {
    let Some(accept) = accept.map(str::trim).filter(|a| !a.is_empty()) else {
        return true;
    };
    accept.split(',').any(|range| {
        let mut parts = range.split(';');
        let media = parts.next().unwrap_or_default().trim().to_ascii_lowercase();
        let q = parts
            .filter_map(|p| p.trim().strip_prefix("q="))
            .filter_map(|q| q.trim().parse::<f32>().ok())
            .next_back()
            .unwrap_or(1.0);
        q > 0.0
            && matches!(
                media.as_str(),
                "application/ld+json" | "application/json" | "application/*" | "*/*"
            )
    })
}

pub fn handle_dereference(
    snapshot: &KnowledgeGraph,
    req: &DereferenceRequest,
    base: &str,
) -> DereferenceResponse {
    let decoded = urn::percent_decode(&req.urn_param);
    let norm = match urn::parse_urn(&decoded) {
        Ok(LexUrn::Norm(n)) => n,
        Ok(LexUrn::Vocab(v)) => {
            return DereferenceResponse::problem(
                404,
                "NOT_FOUND",
                format!("{v} is not a stored Work"),
            )
        }
        Err(e) => {
            return DereferenceResponse::problem(400, e.code(), format!("`{decoded}`: {e}"));
        }
    };
    let Some(work) = snapshot.get_norm(&norm) else {
        return DereferenceResponse::problem(
            404,
            "NOT_FOUND",
            format!("no Work stored under {norm}"),
        );
    };
    if !accepts_json(req.accept_header.as_deref()) {
        return DereferenceResponse::problem(
            406,
            "NOT_ACCEPTABLE",
            "only application/ld+json and application/json are served",
        );
    }
    match jsonld::render_document(work, base) {
        Ok(doc) => DereferenceResponse {
            status: 200,
            media_type: MEDIA_TYPE.into(),
            body: doc.into_string().into_bytes(),
        },
        Err(e) => DereferenceResponse::problem(500, "BAD_BASE", e.to_string()),
    }
}

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("cannot bind {addr}: {source}")]
    BindFailure {
        addr: String,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    BadBase(#[from] BadBase),
}

#[derive(Clone)]
struct AppState {
    store: SharedGraph,
    base: Arc<str>,
}

pub fn router(store: SharedGraph, base: &str) -> Router {
    Router::new()
        .route("/", get(dereference))
        .route("/health", get(|| async { "ok" }))
        .with_state(AppState {
            store,
            base: base.into(),
        })
}

async fn dereference(
    State(state): State<AppState>,
    RawQuery(query): RawQuery,
    headers: HeaderMap,
) -> Response {
    let urn_param = query
        .as_deref()
        .unwrap_or_default()
        .split('&')
        .find_map(|p| p.strip_prefix("urn="))
        .unwrap_or_default()
        .to_owned();
    let accept: Vec<&str> = headers
        .get_all(header::ACCEPT)
        .iter()
        .filter_map(|v| v.to_str().ok())
        .collect();
    let req = DereferenceRequest {
        urn_param,
        accept_header: (!accept.is_empty()).then(|| accept.join(",")),
    };
    let snapshot = state.store.snapshot();
    let resp = handle_dereference(&snapshot, &req, &state.base);
    let content_type = if resp.status == 200 {
        format!("{}; charset=utf-8", resp.media_type)
    } else {
        resp.media_type
    };
    let status = StatusCode::from_u16(resp.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    (status, [(header::CONTENT_TYPE, content_type)], resp.body).into_response()
}

/// A running server. Dropping the handle without calling
/// [`ServerHandle::shutdown`] leaves the server running until SIGINT.
pub struct ServerHandle {
    addr: SocketAddr,
    stop: Option<oneshot::Sender<()>>,
    thread: Option<JoinHandle<io::Result<()>>>,
}

impl ServerHandle {
    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    /// Stops accepting connections, drains in-flight requests and joins the
    /// server thread.
    pub fn shutdown(mut self) -> io::Result<()> {
        if let Some(stop) = self.stop.take() {
            let _ = stop.send(());
        }
        self.join()
    }

    /// Blocks until the server exits (on SIGINT).
    pub fn wait(mut self) -> io::Result<()> {
        self.join()
    }

    fn join(&mut self) -> io::Result<()> {
        match self.thread.take() {
            Some(t) => t
                .join()
                .unwrap_or_else(|_| Err(io::Error::other("server thread panicked"))),
            None => Ok(()),
        }
    }
}

/// Binds `bind_address` and serves `store` on a background thread. Each
/// request reads the snapshot current when it arrives.
pub fn serve(
    store: SharedGraph,
    bind_address: &str,
    base: &str,
) -> Result<ServerHandle, ServeError> {
    urn::check_base(base)?;
    let bind_failure = |source| ServeError::BindFailure {
        addr: bind_address.to_owned(),
        source,
    };
    let listener = TcpListener::bind(bind_address).map_err(bind_failure)?;
    listener.set_nonblocking(true).map_err(bind_failure)?;
    let addr = listener.local_addr().map_err(bind_failure)?;
    let app = router(store, base);
    let (stop_tx, stop_rx) = oneshot::channel::<()>();

    let thread = std::thread::Builder::new()
        .name("lexnorm-server".into())
        .spawn(move || -> io::Result<()> {
            let runtime = tokio::runtime::Builder::new_multi_thread()
                .enable_all()
                .build()?;
            runtime.block_on(async move {
                let listener = tokio::net::TcpListener::from_std(listener)?;
                axum::serve(listener, app)
                    .with_graceful_shutdown(async move {
                        tokio::select! {
                            _ = stop_rx => {}
                            _ = tokio::signal::ctrl_c() => {}
                        }
                    })
                    .await
            })
        })
        .map_err(bind_failure)?;

    Ok(ServerHandle {
        addr,
        stop: Some(stop_tx),
        thread: Some(thread),
    })
}
