#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::net::{SocketAddr, TcpStream};
use std::time::Duration;

use serde_json::Value;

pub const FIXTURE: &str = include_str!("../../fixtures/lc123.jsonld");
pub const LC123: &str = "urn:lex:br:federal:lei.complementar:2006-12-14;123";
pub const BASE: &str = "https://normas.leg.br/";

pub struct HttpResponse {
    pub status: u16,
    pub headers: BTreeMap<String, String>,
    pub body: Vec<u8>,
}

impl HttpResponse {
    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers
            .get(&name.to_ascii_lowercase())
            .map(String::as_str)
    }

    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.body).expect("JSON body")
    }
}

/// One HTTP/1.1 request over a fresh connection.
pub fn http(addr: SocketAddr, method: &str, target: &str, accept: Option<&str>) -> HttpResponse {
    let mut stream = TcpStream::connect(addr).expect("connect");
    stream
        .set_read_timeout(Some(Duration::from_secs(10)))
        .unwrap();
    let mut request =
        format!("{method} {target} HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\n");
    if let Some(a) = accept {
        request.push_str(&format!("Accept: {a}\r\n"));
    }
    request.push_str("\r\n");
    stream.write_all(request.as_bytes()).unwrap();
    let mut raw = Vec::new();
    stream.read_to_end(&mut raw).unwrap();

    let split = raw
        .windows(4)
        .position(|w| w == b"\r\n\r\n")
        .expect("header terminator");
    let head = String::from_utf8_lossy(&raw[..split]).into_owned();
    let mut lines = head.split("\r\n");
    let status = lines
        .next()
        .and_then(|l| l.split(' ').nth(1))
        .and_then(|s| s.parse().ok())
        .expect("status line");
    let headers: BTreeMap<String, String> = lines
        .filter_map(|l| l.split_once(':'))
        .map(|(k, v)| (k.trim().to_ascii_lowercase(), v.trim().to_owned()))
        .collect();
    let mut body = raw[split + 4..].to_vec();
    if headers
        .get("transfer-encoding")
        .is_some_and(|t| t == "chunked")
    {
        body = dechunk(&body);
    }
    HttpResponse {
        status,
        headers,
        body,
    }
}

fn dechunk(mut data: &[u8]) -> Vec<u8> {
    let mut out = Vec::new();
    loop {
        let eol = data.windows(2).position(|w| w == b"\r\n").unwrap();
        let size =
            usize::from_str_radix(std::str::from_utf8(&data[..eol]).unwrap().trim(), 16).unwrap();
        if size == 0 {
            return out;
        }
        out.extend_from_slice(&data[eol + 2..eol + 2 + size]);
        data = &data[eol + 4 + size..];
    }
}

pub fn get(addr: SocketAddr, target: &str) -> HttpResponse {
    http(addr, "GET", target, Some("application/ld+json"))
}

fn urn_of(uri: &str) -> String {
    let q = uri.split_once("?urn=").expect("resolver URI").1;
    q.to_ascii_lowercase()
}

/// Edges a document implies, read straight off its JSON: (from, kind, to).
pub fn oracle_edges(doc: &Value) -> BTreeSet<(String, String, String)> {
    let me = doc["legislationIdentifier"]
        .as_str()
        .unwrap()
        .to_ascii_lowercase();
    let mut edges = BTreeSet::new();
    let mut add = |kind: &str, to: String| {
        if to != me {
            edges.insert((me.clone(), kind.to_owned(), to));
        }
    };
    let as_list = |v: &Value| match v {
        Value::Null => vec![],
        Value::Array(items) => items.clone(),
        other => vec![other.clone()],
    };
    for s in as_list(&doc["sameAs"]) {
        add("same_as", s.as_str().unwrap().to_owned());
    }
    for a in as_list(&doc["about"]) {
        add("about", urn_of(a["@id"].as_str().unwrap()));
    }
    add(
        "has_type",
        urn_of(doc["legislationType"]["@id"].as_str().unwrap()),
    );
    for (prop, kind) in [
        ("legislationJurisdiction", "jurisdiction"),
        ("legislationPassedBy", "passed_by"),
        ("publisher", "published_by"),
    ] {
        if let Some(id) = doc[prop]["@id"].as_str() {
            add(kind, id.to_owned());
        }
    }
    edges
}

pub fn edge_triples<'a>(
    edges: impl Iterator<Item = &'a lexnorm::Edge>,
) -> BTreeSet<(String, String, String)> {
    edges
        .map(|e| (e.from.to_string(), e.kind.to_string(), e.to.to_string()))
        .collect()
}
