//! Synthetic corpora derived from the bundled LC 123 document.
//!
//! Each generated document keeps the fixture's structure and varies the
//! norm's date and number (and everything that mentions them). Output is a
//! pure function of `(count, seed)`.

use std::collections::HashSet;

use chrono::{Days, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

/// The Listing document for Lei Complementar nº 123 de 14/12/2006.
pub const LC123_JSONLD: &str = include_str!("../fixtures/lc123.jsonld");

/// `count` compact single-line documents with pairwise distinct URNs.
pub fn synthetic_documents(count: usize, seed: u64) -> Vec<String> {
    let template: Value = serde_json::from_str(LC123_JSONLD).expect("fixture is JSON");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = NaiveDate::from_ymd_opt(1988, 10, 5).expect("valid date");
    let span = 36 * 365;
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(count);

    while out.len() < count {
        let date = first + Days::new(rng.gen_range(0..span));
        let number: u32 = rng.gen_range(1..20_000);
        if !seen.insert((date, number)) {
            continue;
        }
        out.push(variant(&template, date, number, &mut rng));
    }
    out
}

/// The documents joined as JSONL, newline-terminated.
pub fn synthetic_jsonl(count: usize, seed: u64) -> String {
    let mut text = synthetic_documents(count, seed).join("\n");
    if count > 0 {
        text.push('\n');
    }
    text
}

fn variant(template: &Value, date: NaiveDate, number: u32, rng: &mut ChaCha8Rng) -> String {
    let iso = date.format("%Y-%m-%d");
    let urn = format!("urn:lex:br:federal:lei.complementar:{iso};{number}");
    let mut doc = template.clone();
    doc["@id"] = format!("https://normas.leg.br/?urn={urn}").into();
    doc["legislationIdentifier"] = urn.clone().into();
    doc["sameAs"] = serde_json::json!([
        format!("http://www.lexml.gov.br/urn/{urn}"),
        format!(
            "http://legis.senado.leg.br/legislacao/DetalhaSigen.action?id={}",
            rng.gen_range(100_000..999_999)
        ),
    ]);
    doc["name"] = format!(
        "Lei Complementar nº {number} de {}",
        date.format("%d/%m/%Y")
    )
    .into();
    doc["alternateName"] = serde_json::json!([format!("LCP-{number}-{iso}")]);
    doc["legislationDate"] = iso.to_string().into();
    doc["datePublished"] = (date + Days::new(rng.gen_range(0..4)))
        .format("%Y-%m-%d")
        .to_string()
        .into();
    serde_json::to_string(&doc).expect("value serializes")
}
