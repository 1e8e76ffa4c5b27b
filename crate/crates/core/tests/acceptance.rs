//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

mod common;

use std::collections::BTreeSet;
use std::io::{BufRead, BufReader};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Child, Command, ExitCode, Stdio};
use std::time::{Duration, Instant};

use common::{edge_triples, get, oracle_edges, BASE, FIXTURE, LC123};
use lexnorm::corpus::synthetic_documents;
use lexnorm::finding::{FindingCode, Severity};
use lexnorm::graph::{self, KnowledgeGraph, RelationKind};
use lexnorm::ingest::{ingest, Policy, SourceRecord};
use lexnorm::jsonld::{emit_document, parse_document, semantically_equal};
use lexnorm::server::{handle_dereference, DereferenceRequest};
use lexnorm::urn::{format_urn, normalize_urn, parse_urn};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_lexnorm");

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("fixture fidelity", Duration::from_secs(1), fixture_fidelity),
        ("URN round trip", Duration::from_secs(5), urn_round_trip),
        ("consistency rules", Duration::MAX, consistency_rules),
        (
            "linked data conformance",
            Duration::from_secs(10),
            linked_data,
        ),
        ("graph integrity", Duration::MAX, graph_integrity),
        ("determinism", Duration::MAX, determinism),
        ("robustness", Duration::from_secs(60), robustness),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".into()))
            .and_then(|detail| {
                let took = start.elapsed();
                if took > limit {
                    Err(format!("took {took:.2?}, limit {limit:?}"))
                } else {
                    Ok(detail)
                }
            });
        let took = start.elapsed();
        match result {
            Ok(detail) => println!("PASS {} {name}: {detail} [{took:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why} [{took:.2?}]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn fixture_fidelity() -> Outcome {
    for needle in [
        "Lei Complementar nº 123 de 14/12/2006",
        "http://www.lexml.gov.br/urn/urn:lex:br:federal:lei.complementar:2006-12-14;123",
        "http://legis.senado.leg.br/legislacao/DetalhaSigen.action?id=572878",
        "\"Microempresa\"",
        "\"Pequena Empresa\"",
        "\"2006-12-14\"",
        "\"2006-12-15\"",
    ] {
        ensure!(FIXTURE.contains(needle), "fixture lacks {needle}");
    }
    let report = parse_document(FIXTURE).map_err(|e| e.to_string())?;
    ensure!(
        report.findings.error_count() == 0,
        "errors: {:?}",
        report.findings
    );
    let work = report.work.ok_or("no work")?;
    let emitted = emit_document(&work, BASE).map_err(|e| e.to_string())?;
    ensure!(
        semantically_equal(emitted.as_str(), FIXTURE).map_err(|e| e.to_string())?,
        "re-emission differs from the fixture"
    );
    Ok(format!(
        "0 errors, {} warnings, re-emission equal",
        report.findings.warning_count()
    ))
}

fn token(rng: &mut ChaCha8Rng) -> String {
    const ALNUM: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789";
    let parts = rng.gen_range(1..=3);
    (0..parts)
        .map(|_| {
            (0..rng.gen_range(1..6))
                .map(|_| ALNUM[rng.gen_range(0..ALNUM.len())] as char)
                .collect::<String>()
        })
        .collect::<Vec<_>>()
        .join(if rng.gen() { "." } else { "-" })
}

fn random_urn(rng: &mut ChaCha8Rng) -> (String, bool) {
    let (j, a, t) = (token(rng), token(rng), token(rng));
    if rng.gen() {
        let date = format!(
            "{:04}-{:02}-{:02}",
            rng.gen_range(1800..2100),
            rng.gen_range(1..=12),
            rng.gen_range(1..=28)
        );
        let n = rng.gen_range(1..100_000);
        (format!("urn:lex:{j}:{a}:{t}:{date};{n}"), true)
    } else {
        (format!("urn:lex:{j}:{a}:{t}:{}", token(rng)), false)
    }
}

fn mixed_case(s: &str, rng: &mut ChaCha8Rng) -> String {
    s.chars()
        .map(|c| {
            if rng.gen_bool(0.3) {
                c.to_ascii_uppercase()
            } else {
                c
            }
        })
        .collect()
}

fn urn_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2006);
    let (mut norms, mut vocabs) = (0, 0);
    for _ in 0..2000 {
        let (canonical, is_norm) = random_urn(&mut rng);
        let input = mixed_case(&canonical, &mut rng);
        let parsed = parse_urn(&input).map_err(|e| format!("{input}: {e}"))?;
        ensure!(parsed.is_norm() == is_norm, "{input}: wrong kind");
        let formatted = format_urn(&parsed);
        let normalized = normalize_urn(&input).map_err(|e| e.to_string())?;
        ensure!(
            formatted == normalized,
            "{input}: format(parse) != normalize"
        );
        ensure!(
            formatted == canonical,
            "{input}: {formatted} != {canonical}"
        );
        ensure!(
            normalize_urn(&normalized).as_deref() == Ok(&normalized[..]),
            "{input}: not idempotent"
        );
        if is_norm {
            norms += 1
        } else {
            vocabs += 1
        }
    }

    let mut invalid = 0;
    for i in 0..2000 {
        let (valid, is_norm) = random_urn(&mut rng);
        let segments: Vec<&str> = valid.split(':').collect();
        let (mutated, expected) = match i % 5 {
            0 => (valid.replacen("urn:lex:", "urn:lax:", 1), "MISSING_PREFIX"),
            1 => {
                let mut s = segments.clone();
                s.remove(rng.gen_range(2..s.len()));
                (s.join(":"), "BAD_SEGMENT_COUNT")
            }
            2 => {
                let mut s: Vec<String> = segments.iter().map(|x| x.to_string()).collect();
                let k = rng.gen_range(2..5);
                let at = rng.gen_range(0..=s[k].len());
                s[k].insert(at, *[' ', '_', '/', '#'].choose(&mut rng).unwrap());
                (s.join(":"), "BAD_TOKEN")
            }
            3 if is_norm => {
                let (head, tail) = valid.rsplit_once(':').unwrap();
                let number = tail.split_once(';').unwrap().1;
                (
                    format!("{head}:2001-{:02}-31;{number}", rng.gen_range(13..99)),
                    "BAD_DATE",
                )
            }
            _ => {
                let at = rng.gen_range(8..=valid.len());
                let mut s = valid.clone();
                s.insert(at, if rng.gen() { '@' } else { '!' });
                (s, "UNSUPPORTED_FEATURE")
            }
        };
        let outcome =
            catch_unwind(|| parse_urn(&mutated)).map_err(|_| format!("{mutated}: panic"))?;
        match outcome {
            Ok(u) => return Err(format!("{mutated} accepted as {u}")),
            Err(e) => ensure!(
                e.code() == expected,
                "{mutated}: {} expected {expected}",
                e.code()
            ),
        }
        invalid += 1;
    }
    Ok(format!("{norms} norm + {vocabs} vocabulary URNs round-trip, {invalid} invalid rejected with the expected class"))
}

fn error_codes(text: &str) -> Result<Vec<FindingCode>, String> {
    let r = parse_document(text).map_err(|e| e.to_string())?;
    Ok(r.findings
        .findings()
        .iter()
        .filter(|f| f.severity == Severity::Error)
        .map(|f| f.code)
        .collect())
}

fn consistency_rules() -> Outcome {
    let cases = [
        (
            "legislationDate 2007-01-01",
            FIXTURE.replace(
                "\"legislationDate\": \"2006-12-14\"",
                "\"legislationDate\": \"2007-01-01\"",
            ),
            FindingCode::UrnDateMismatch,
        ),
        (
            "type term lei",
            FIXTURE.replace("tipo-norma:lei.complementar", "tipo-norma:lei"),
            FindingCode::TypeUrnMismatch,
        ),
        (
            "@id urn ;124",
            FIXTURE.replacen("2006-12-14;123\"", "2006-12-14;124\"", 1),
            FindingCode::IdUrnMismatch,
        ),
    ];
    let mut seen = Vec::new();
    for (label, text, expected) in cases {
        ensure!(text != FIXTURE, "{label}: mutation did not apply");
        let codes = error_codes(&text)?;
        ensure!(
            codes == [expected],
            "{label}: got {codes:?}, expected [{expected}]"
        );
        seen.push(expected.as_str());
    }
    Ok(seen.join(", "))
}

fn corpus_dir(dir: &Path, docs: &[String]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for (i, d) in docs.iter().enumerate() {
        std::fs::write(dir.join(format!("doc{i:04}.jsonld")), d)?;
    }
    Ok(())
}

struct Server(Child);

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

fn linked_data() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let docs = synthetic_documents(100, 4);
    let jsonl = tmp.path().join("corpus.jsonl");
    std::fs::write(&jsonl, docs.join("\n")).map_err(|e| e.to_string())?;
    let store = tmp.path().join("store.jsonl");
    let base = "http://localhost:8080/";

    let status = Command::new(BIN)
        .args([
            "ingest",
            jsonl.to_str().unwrap(),
            "--store",
            store.to_str().unwrap(),
            "--strict",
        ])
        .stdout(Stdio::null())
        .status()
        .map_err(|e| e.to_string())?;
    ensure!(status.success(), "ingest exited with {status}");

    let child = Command::new(BIN)
        .args([
            "serve",
            "--store",
            store.to_str().unwrap(),
            "--addr",
            "127.0.0.1:0",
            "--base",
            base,
        ])
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| e.to_string())?;
    let mut server = Server(child);
    let mut line = String::new();
    BufReader::new(server.0.stderr.take().unwrap())
        .read_line(&mut line)
        .map_err(|e| e.to_string())?;
    let addr = line
        .trim()
        .rsplit("http://")
        .next()
        .and_then(|a| a.parse().ok())
        .ok_or(format!("no address in `{}`", line.trim()))?;

    for d in &docs {
        let urn = serde_json::from_str::<Value>(d).unwrap()["legislationIdentifier"]
            .as_str()
            .unwrap()
            .to_owned();
        let r = get(addr, &format!("/?urn={urn}"));
        ensure!(r.status == 200, "{urn}: status {}", r.status);
        ensure!(
            r.header("content-type")
                .is_some_and(|c| c.starts_with("application/ld+json")),
            "{urn}: content type {:?}",
            r.header("content-type")
        );
        let id = r.json()["@id"].clone();
        ensure!(id == format!("{base}?urn={urn}"), "{urn}: @id {id}");
    }
    let absent = get(
        addr,
        "/?urn=urn:lex:br:federal:lei.complementar:1900-01-01;1",
    );
    ensure!(absent.status == 404, "absent URN gave {}", absent.status);
    let malformed = get(addr, "/?urn=urn:lex:junk");
    ensure!(
        malformed.status == 400,
        "malformed URN gave {}",
        malformed.status
    );
    Ok(format!(
        "{} URNs served with 200, absent 404, malformed 400",
        docs.len()
    ))
}

fn graph_integrity() -> Outcome {
    let docs = synthetic_documents(100, 5);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut stream = docs.clone();
    stream.extend(docs.choose_multiple(&mut rng, 25).cloned());
    stream.shuffle(&mut rng);

    let mut g = KnowledgeGraph::new();
    let records = stream
        .iter()
        .enumerate()
        .map(|(i, d)| SourceRecord::new(format!("corpus:{}", i + 1), d.as_bytes()));
    let report = ingest(records, &mut g, Policy::Strict);
    ensure!(
        report.rejected_count == 0,
        "{} records rejected",
        report.rejected_count
    );

    let mut distinct = BTreeSet::new();
    let mut oracle = BTreeSet::new();
    for d in &stream {
        let v: Value = serde_json::from_str(d).unwrap();
        distinct.insert(
            v["legislationIdentifier"]
                .as_str()
                .unwrap()
                .to_ascii_lowercase(),
        );
        oracle.extend(oracle_edges(&v));
    }
    let stats = g.stats();
    ensure!(
        stats.work_count == 100 && distinct.len() == 100,
        "work_count {} oracle {}",
        stats.work_count,
        distinct.len()
    );
    let actual = edge_triples(g.edges());
    ensure!(
        actual == oracle,
        "edge sets differ ({} vs {})",
        actual.len(),
        oracle.len()
    );
    for kind in RelationKind::ALL {
        let expected = oracle.iter().filter(|(_, k, _)| k == kind.as_str()).count();
        ensure!(
            stats.count(kind) == expected,
            "{kind}: {} vs {expected}",
            stats.count(kind)
        );
    }

    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = tmp.path().join("store.jsonl");
    graph::save_snapshot(&g, &path).map_err(|e| e.to_string())?;
    let loaded = graph::load_snapshot(&path).map_err(|e| e.to_string())?;
    ensure!(loaded.stats() == stats, "stats changed across snapshot");
    ensure!(
        edge_triples(loaded.edges()) == actual,
        "edges changed across snapshot"
    );
    Ok(format!(
        "work_count 100 from 125 records, {} edges match the oracle, snapshot round-trips",
        actual.len()
    ))
}

fn run_pipeline(root: &Path, docs: &[String]) -> Result<(Vec<u8>, Vec<Vec<u8>>), String> {
    let corpus = root.join("corpus");
    corpus_dir(&corpus, docs).map_err(|e| e.to_string())?;
    let store = root.join("store.jsonl");
    let status = Command::new(BIN)
        .args([
            "ingest",
            corpus.to_str().unwrap(),
            "--store",
            store.to_str().unwrap(),
        ])
        .stdout(Stdio::null())
        .status()
        .map_err(|e| e.to_string())?;
    ensure!(status.success(), "ingest exited with {status}");
    let mut normalized = Vec::new();
    for i in 0..docs.len() {
        let out = Command::new(BIN)
            .args([
                "normalize",
                corpus.join(format!("doc{i:04}.jsonld")).to_str().unwrap(),
            ])
            .env_remove("LEXNORM_BASE")
            .output()
            .map_err(|e| e.to_string())?;
        ensure!(
            out.status.success(),
            "normalize doc{i}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        normalized.push(out.stdout);
    }
    let snapshot = std::fs::read(&store).map_err(|e| e.to_string())?;
    Ok((snapshot, normalized))
}

fn determinism() -> Outcome {
    let mut docs = synthetic_documents(30, 6);
    docs.push(FIXTURE.to_owned());
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (snap_a, norm_a) = run_pipeline(a.path(), &docs)?;
    let (snap_b, norm_b) = run_pipeline(b.path(), &docs)?;
    ensure!(snap_a == snap_b, "snapshot files differ");
    ensure!(norm_a == norm_b, "normalized documents differ");
    Ok(format!(
        "snapshot ({} bytes) and {} normalized documents byte-identical",
        snap_a.len(),
        norm_a.len()
    ))
}

fn mutate(text: &str, rng: &mut ChaCha8Rng) -> String {
    let mut bytes = text.as_bytes().to_vec();
    for _ in 0..rng.gen_range(1..6) {
        if bytes.is_empty() {
            break;
        }
        let at = rng.gen_range(0..bytes.len());
        match rng.gen_range(0..4) {
            0 => bytes[at] = rng.gen(),
            1 => {
                bytes.remove(at);
            }
            2 => bytes.insert(at, *b"{}[]\":,;@!%?".choose(rng).unwrap()),
            _ => {
                let end = (at + rng.gen_range(1..40)).min(bytes.len());
                bytes.drain(at..end);
            }
        }
    }
    String::from_utf8_lossy(&bytes).into_owned()
}

fn robustness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let docs = synthetic_documents(20, 7);
    let mut g = KnowledgeGraph::new();
    ingest(
        docs.iter().map(|d| SourceRecord::new("seed", d.as_bytes())),
        &mut g,
        Policy::Strict,
    );
    ingest(
        [SourceRecord::new("seed", FIXTURE.as_bytes())],
        &mut g,
        Policy::Strict,
    );

    let (mut documents, mut requests, mut served) = (0, 0, 0);
    for i in 0..10_000 {
        let doc_input = match i % 3 {
            0 => mutate(FIXTURE, &mut rng),
            1 => mutate(docs.choose(&mut rng).unwrap(), &mut rng),
            _ => {
                let len = rng.gen_range(0..200);
                let raw: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
                String::from_utf8_lossy(&raw).into_owned()
            }
        };
        let outcome = catch_unwind(|| parse_document(&doc_input))
            .map_err(|_| format!("parse_document panicked on input {i}"))?;
        if let Ok(r) = outcome {
            ensure!(
                r.work.is_some() || r.findings.error_count() > 0,
                "input {i}: no work and no error finding"
            );
        }
        documents += 1;

        let param = match i % 4 {
            0 => mutate(LC123, &mut rng),
            1 => mixed_case(&random_urn(&mut rng).0, &mut rng),
            2 => {
                let len = rng.gen_range(0..60);
                (0..len).map(|_| rng.gen_range(' '..='~')).collect()
            }
            _ => LC123.replace(':', "%3A"),
        };
        let accept = [
            "application/ld+json",
            "text/html",
            "*/*;q=0",
            "",
            "application/json;q=0.5, */*",
        ]
        .choose(&mut rng)
        .map(|a| a.to_string());
        let req = DereferenceRequest {
            urn_param: param,
            accept_header: accept,
        };
        let resp = catch_unwind(|| handle_dereference(&g, &req, BASE))
            .map_err(|_| format!("handle_dereference panicked on {req:?}"))?;
        match resp.status {
            200 => {
                let body = parse_document(resp.body_text()).map_err(|e| e.to_string())?;
                ensure!(body.work.is_some(), "200 body does not decode");
                served += 1;
            }
            400 | 404 | 406 => {
                let v: Value = serde_json::from_slice(&resp.body).map_err(|e| e.to_string())?;
                ensure!(v["error"].is_string(), "problem body without error code");
            }
            other => return Err(format!("{req:?} gave {other}")),
        }
        requests += 1;
    }
    Ok(format!(
        "{documents} documents and {requests} requests classified ({served} served), no panics"
    ))
}
