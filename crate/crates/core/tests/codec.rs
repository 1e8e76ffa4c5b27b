mod common;

use chrono::NaiveDate;
use common::{BASE, FIXTURE, LC123};
use lexnorm::finding::{FindingCode, Severity};
use lexnorm::jsonld::{self, emit_document, parse_document, semantically_equal, CodecError};
use lexnorm::norm::{AdminAreaRef, NormWork, OrgRef};
use lexnorm::urn::{LexNormUrn, LexVocabUrn};
use proptest::prelude::*;
use serde_json::Value;

fn error_codes(text: &str) -> Vec<FindingCode> {
    let r = parse_document(text).unwrap();
    r.findings
        .findings()
        .iter()
        .filter(|f| f.severity == Severity::Error)
        .map(|f| f.code)
        .collect()
}

#[test]
fn fixture_fields() {
    let r = parse_document(FIXTURE).unwrap();
    assert_eq!(r.findings.error_count(), 0, "{:?}", r.findings);
    assert!(r.unknown_properties.is_empty());
    let w = r.work.unwrap();
    assert_eq!(w.urn.to_string(), LC123);
    assert_eq!(w.name, "Lei Complementar nº 123 de 14/12/2006");
    assert_eq!(w.same_as.len(), 2);
    assert_eq!(w.keywords, ["Microempresa", "Pequena Empresa"]);
    assert_eq!(w.legislation_date.to_string(), "2006-12-14");
    assert_eq!(w.date_published.unwrap().to_string(), "2006-12-15");
    assert_eq!(w.legislation_type.term(), "lei.complementar");
    assert_eq!(w.spatial_coverage.as_ref().unwrap().country_code, "BR");

    let emitted = emit_document(&w, BASE).unwrap();
    assert!(semantically_equal(emitted.as_str(), FIXTURE).unwrap());
    let again = parse_document(emitted.as_str()).unwrap().work.unwrap();
    assert_eq!(again, w);
    assert_eq!(emit_document(&again, BASE).unwrap(), emitted);
}

#[test]
fn registered_mutations() {
    let cases = [
        (
            FIXTURE.replace(
                "\"legislationDate\": \"2006-12-14\"",
                "\"legislationDate\": \"2007-01-01\"",
            ),
            FindingCode::UrnDateMismatch,
        ),
        (
            FIXTURE.replace("tipo-norma:lei.complementar", "tipo-norma:lei"),
            FindingCode::TypeUrnMismatch,
        ),
        (
            FIXTURE.replacen("2006-12-14;123\"", "2006-12-14;124\"", 1),
            FindingCode::IdUrnMismatch,
        ),
    ];
    for (text, code) in cases {
        assert_ne!(text, FIXTURE);
        assert_eq!(error_codes(&text), [code]);
    }
    let r = parse_document(&FIXTURE.replace(
        "\"legislationDate\": \"2006-12-14\"",
        "\"legislationDate\": \"2007-01-01\"",
    ))
    .unwrap();
    let mismatch = r
        .findings
        .findings()
        .iter()
        .find(|f| f.code == FindingCode::UrnDateMismatch)
        .unwrap();
    assert_eq!(mismatch.path, "legislationDate");
}

#[test]
fn structural_failures() {
    assert_eq!(
        error_codes(&FIXTURE.replace("\"Legislation\"", "\"CreativeWork\"")),
        [FindingCode::WrongType]
    );
    assert!(
        parse_document(&FIXTURE.replace("\"Legislation\"", "\"CreativeWork\""))
            .unwrap()
            .work
            .is_none()
    );
    assert!(matches!(parse_document("{"), Err(CodecError::NotJson(_))));
    assert_eq!(error_codes("[]"), [FindingCode::NotObject]);

    let mut v: Value = serde_json::from_str(FIXTURE).unwrap();
    v.as_object_mut().unwrap().remove("name");
    assert!(error_codes(&v.to_string()).contains(&FindingCode::MissingProperty));

    let mut v: Value = serde_json::from_str(FIXTURE).unwrap();
    v["@context"] = "http://example.org/".into();
    assert_eq!(error_codes(&v.to_string()), [FindingCode::BadContext]);
}

#[test]
fn unknown_properties_survive() {
    let mut v: Value = serde_json::from_str(FIXTURE).unwrap();
    v["x-note"] = "kept".into();
    let r = parse_document(&v.to_string()).unwrap();
    assert_eq!(r.unknown_properties, ["x-note"]);
    let out = emit_document(&r.work.unwrap(), BASE).unwrap();
    let back: Value = serde_json::from_str(out.as_str()).unwrap();
    assert_eq!(back["x-note"], "kept");
    assert_eq!(
        back.as_object().unwrap().keys().next_back().unwrap(),
        "x-note"
    );
}

#[test]
fn base_changes_only_resolver_ids() {
    let w = parse_document(FIXTURE).unwrap().work.unwrap();
    let other = emit_document(&w, "http://localhost:8080/").unwrap();
    let v: Value = serde_json::from_str(other.as_str()).unwrap();
    assert_eq!(v["@id"], format!("http://localhost:8080/?urn={LC123}"));
    assert!(!semantically_equal(other.as_str(), FIXTURE).unwrap());
    let rebased = other.as_str().replace("http://localhost:8080/", BASE);
    assert!(semantically_equal(&rebased, FIXTURE).unwrap());
    assert!(matches!(
        emit_document(&w, "normas"),
        Err(CodecError::BadBase(_))
    ));
}

fn work_strategy() -> impl Strategy<Value = NormWork> {
    (
        (1900i32..2030, 1u32..=12, 1u32..=28),
        "[0-9]{1,5}",
        "[a-z]{2,8}(\\.[a-z]{2,8})?",
        "[A-Za-zÀ-ÿº ]{1,40}",
        prop::collection::vec("[A-Za-z ]{1,12}", 0..4),
        prop::option::of("[ -~]{0,60}"),
        prop::collection::vec("[a-z]{1,8}", 0..3),
        0u64..30,
        any::<bool>(),
    )
        .prop_map(
            |((y, m, d), number, doc_type, name, keywords, abstract_text, about, lag, orgs)| {
                let date = NaiveDate::from_ymd_opt(y, m, d).unwrap();
                let urn = LexNormUrn::new("br", "federal", &doc_type, date, &number).unwrap();
                let mut w = NormWork::new(urn.clone(), name.trim().to_owned() + "x", "pt-BR");
                w.keywords = keywords;
                w.abstract_text = abstract_text;
                let mut about: Vec<_> = about
                    .iter()
                    .map(|t| LexVocabUrn::new("br", "federal", "tema", t).unwrap())
                    .collect();
                about.sort();
                about.dedup();
                w.about = about;
                w.same_as = vec![format!("http://www.lexml.gov.br/urn/{urn}")];
                w.date_published = Some(date + chrono::Days::new(lag));
                if orgs {
                    w.publisher = Some(OrgRef::new("https://www.in.gov.br/"));
                    w.legislation_jurisdiction = Some(AdminAreaRef {
                        id: "https://www.wikidata.org/wiki/Q155".into(),
                        name: Some("Brasil".into()),
                    });
                }
                w
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn emit_parse_round_trip(w in work_strategy()) {
        let doc = jsonld::render_document(&w, BASE).unwrap();
        let back = parse_document(doc.as_str()).unwrap();
        prop_assert_eq!(back.findings.error_count(), 0, "{:?}", back.findings);
        let back = back.work.unwrap();
        prop_assert_eq!(&back, &w);
        prop_assert_eq!(jsonld::render_document(&back, BASE).unwrap(), doc);
    }

    #[test]
    fn mutated_fixture_never_panics(cut in 0usize..2000, insert in "[\\[\\]{}\":,0-9a-z@]{0,4}") {
        let at = FIXTURE.char_indices().map(|(i, _)| i).nth(cut % FIXTURE.chars().count()).unwrap();
        let text = format!("{}{}{}", &FIXTURE[..at], insert, &FIXTURE[at..]);
        if let Ok(r) = parse_document(&text) {
            if r.work.is_none() {
                prop_assert!(r.findings.error_count() > 0);
            }
        }
    }
}
