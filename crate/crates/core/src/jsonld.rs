//! schema.org `Legislation` JSON-LD documents.
//!
//! Emission is byte-deterministic: fixed property order, two-space
//! indentation, raw UTF-8, absent values omitted. Parsing is tolerant: it
//! accepts the `https` context spellings and lone values where arrays are
//! emitted, and reports every structural problem as a finding.

use chrono::NaiveDate;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::finding::{FindingCode, ValidationFinding, ValidationReport};
use crate::norm::{self, AdminAreaRef, CountryRef, NormWork, OrgRef};
use crate::urn::{self, BadBase, LexNormUrn, LexUrn, LexVocabUrn};

pub const CONTEXT: &str = "http://schema.org/";
pub const ACCEPTED_CONTEXTS: [&str; 3] = [CONTEXT, "https://schema.org/", "https://schema.org"];
pub const LEGISLATION_TYPE: &str = "Legislation";
pub const MEDIA_TYPE: &str = "application/ld+json";
pub const FILE_EXTENSION: &str = "jsonld";

const KNOWN: [&str; 22] = [
    "@context",
    "@type",
    "@id",
    "legislationType",
    "legislationIdentifier",
    "sameAs",
    "inLanguage",
    "name",
    "alternateName",
    "abstract",
    "about",
    "keywords",
    "legislationDate",
    "legislationPassedBy",
    "legislationJurisdiction",
    "spatialCoverage",
    "datePublished",
    "license",
    "publisher",
    "sdDatePublished",
    "sdLicense",
    "sdPublisher",
];

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("work fails validation with {} error(s)", .0.error_count())]
    InvalidWork(ValidationReport),
    #[error(transparent)]
    BadBase(#[from] BadBase),
    #[error("not JSON: {0}")]
    NotJson(String),
}

/// The text of one JSON-LD document.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JsonLdDocument(String);

impl JsonLdDocument {
    pub fn new(text: impl Into<String>) -> Self {
        Self(text.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl AsRef<str> for JsonLdDocument {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeReport {
    pub work: Option<NormWork>,
    pub findings: ValidationReport,
    pub unknown_properties: Vec<String>,
}

/// Validates `work` and renders it. Fails if validation reports any error.
pub fn emit_document(work: &NormWork, base: &str) -> Result<JsonLdDocument, CodecError> {
    let report = norm::validate_norm(work);
    if !report.is_valid() {
        return Err(CodecError::InvalidWork(report));
    }
    Ok(render_document(work, base)?)
}

/// Renders `work` without validating it first.
pub fn render_document(work: &NormWork, base: &str) -> Result<JsonLdDocument, BadBase> {
    let value = to_value(work, base)?;
    let text = serde_json::to_string_pretty(&value).expect("a JSON value always serializes");
    Ok(JsonLdDocument(text))
}

/// The JSON value [`render_document`] prints.
pub fn to_value(work: &NormWork, base: &str) -> Result<Value, BadBase> {
    urn::check_base(base)?;
    let resolve = |u: LexUrn| format!("{base}?urn={u}");
    let mut m = Map::new();
    m.insert("@context".into(), CONTEXT.into());
    m.insert("@type".into(), LEGISLATION_TYPE.into());
    m.insert("@id".into(), resolve(LexUrn::Norm(work.urn.clone())).into());
    m.insert(
        "legislationType".into(),
        node(
            "CategoryCode",
            &resolve(LexUrn::Vocab(work.legislation_type.clone())),
            None,
        ),
    );
    m.insert("legislationIdentifier".into(), work.urn.to_string().into());
    insert_list(&mut m, "sameAs", &work.same_as);
    m.insert("inLanguage".into(), work.in_language.clone().into());
    m.insert("name".into(), work.name.clone().into());
    insert_list(&mut m, "alternateName", &work.alternate_names);
    if let Some(a) = &work.abstract_text {
        m.insert("abstract".into(), a.clone().into());
    }
    if !work.about.is_empty() {
        let terms = work
            .about
            .iter()
            .map(|t| node("DefinedTerm", &resolve(LexUrn::Vocab(t.clone())), None))
            .collect();
        m.insert("about".into(), Value::Array(terms));
    }
    insert_list(&mut m, "keywords", &work.keywords);
    m.insert("legislationDate".into(), date(work.legislation_date));
    if let Some(org) = &work.legislation_passed_by {
        m.insert("legislationPassedBy".into(), org_node(org));
    }
    if let Some(area) = &work.legislation_jurisdiction {
        m.insert(
            "legislationJurisdiction".into(),
            node("AdministrativeArea", &area.id, area.name.as_deref()),
        );
    }
    if let Some(country) = &work.spatial_coverage {
        let mut c = Map::new();
        c.insert("@type".into(), "Country".into());
        c.insert("@id".into(), country.id.clone().into());
        c.insert("name".into(), country.name.clone().into());
        if let Some(url) = &country.url {
            c.insert("url".into(), url.clone().into());
        }
        let mut address = Map::new();
        address.insert("@type".into(), "PostalAddress".into());
        address.insert("addressCountry".into(), country.country_code.clone().into());
        c.insert("address".into(), Value::Object(address));
        m.insert("spatialCoverage".into(), Value::Object(c));
    }
    if let Some(d) = work.date_published {
        m.insert("datePublished".into(), date(d));
    }
    if let Some(l) = &work.license {
        m.insert("license".into(), l.clone().into());
    }
    if let Some(org) = &work.publisher {
        m.insert("publisher".into(), org_node(org));
    }
    if let Some(d) = work.sd_date_published {
        m.insert("sdDatePublished".into(), date(d));
    }
    if let Some(l) = &work.sd_license {
        m.insert("sdLicense".into(), l.clone().into());
    }
    if let Some(org) = &work.sd_publisher {
        m.insert("sdPublisher".into(), org_node(org));
    }
    for (key, value) in &work.extensions {
        if m.contains_key(key) {
            continue;
        }
        if let Some(v) = strip_nulls(value) {
            m.insert(key.clone(), v);
        }
    }
    Ok(Value::Object(m))
}

fn node(kind: &str, id: &str, name: Option<&str>) -> Value {
    let mut n = Map::new();
    n.insert("@type".into(), kind.into());
    n.insert("@id".into(), id.into());
    if let Some(name) = name {
        n.insert("name".into(), name.into());
    }
    Value::Object(n)
}

fn org_node(org: &OrgRef) -> Value {
    node("GovernmentOrganization", &org.id, org.name.as_deref())
}

fn date(d: NaiveDate) -> Value {
    d.format("%Y-%m-%d").to_string().into()
}

fn insert_list(m: &mut Map<String, Value>, key: &str, items: &[String]) {
    if !items.is_empty() {
        m.insert(
            key.into(),
            Value::Array(items.iter().cloned().map(Value::String).collect()),
        );
    }
}

fn strip_nulls(value: &Value) -> Option<Value> {
    match value {
        Value::Null => None,
        Value::Array(items) => Some(Value::Array(items.iter().filter_map(strip_nulls).collect())),
        Value::Object(map) => Some(Value::Object(
            map.iter()
                .filter_map(|(k, v)| strip_nulls(v).map(|v| (k.clone(), v)))
                .collect(),
        )),
        other => Some(other.clone()),
    }
}

/// Parses a document. Only unparseable JSON is a hard failure; everything
/// else surfaces as findings.
pub fn parse_document(text: &str) -> Result<DecodeReport, CodecError> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| CodecError::NotJson(e.to_string()))?;
    Ok(decode_value(&value))
}

/// Decodes an already-parsed JSON value.
pub fn decode_value(value: &Value) -> DecodeReport {
    let Some(obj) = value.as_object() else {
        return DecodeReport {
            work: None,
            findings: ValidationReport::new(vec![ValidationFinding::error(
                FindingCode::NotObject,
                "$",
                "document is not a JSON object",
            )]),
            unknown_properties: Vec::new(),
        };
    };
    let mut d = Decoder {
        obj,
        findings: Vec::new(),
    };
    let work = d.decode();
    let unknown_properties: Vec<String> = obj
        .keys()
        .filter(|k| !KNOWN.contains(&k.as_str()) && obj[k.as_str()] != Value::Null)
        .cloned()
        .collect();

    let structural_ok = !d.findings.iter().any(ValidationFinding::is_error);
    let mut findings = d.findings;
    let work = match work {
        Some(w) if structural_ok => {
            findings.extend(norm::validate_norm(&w).into_findings());
            Some(w)
        }
        _ => None,
    };
    DecodeReport {
        work,
        findings: ValidationReport::new(findings),
        unknown_properties,
    }
}

struct Decoder<'a> {
    obj: &'a Map<String, Value>,
    findings: Vec<ValidationFinding>,
}

impl<'a> Decoder<'a> {
    fn error(&mut self, code: FindingCode, path: &str, message: impl Into<String>) {
        self.findings
            .push(ValidationFinding::error(code, path, message));
    }

    fn get(&self, key: &str) -> Option<&'a Value> {
        self.obj.get(key).filter(|v| !v.is_null())
    }

    fn string(&mut self, key: &str) -> Option<String> {
        match self.get(key)? {
            Value::String(s) => Some(s.clone()),
            _ => {
                self.error(FindingCode::BadValue, key, "expected a string");
                None
            }
        }
    }

    fn required_string(&mut self, key: &str) -> Option<String> {
        if self.get(key).is_none() {
            self.error(
                FindingCode::MissingProperty,
                key,
                format!("required property `{key}` is absent"),
            );
            return None;
        }
        self.string(key)
    }

    fn strings(&mut self, key: &str) -> Vec<String> {
        let Some(value) = self.get(key) else {
            return Vec::new();
        };
        let items: Vec<&Value> = match value {
            Value::Array(items) => items.iter().collect(),
            lone => vec![lone],
        };
        let mut out = Vec::new();
        for (i, item) in items.into_iter().enumerate() {
            match item {
                Value::String(s) => out.push(s.clone()),
                _ => self.error(
                    FindingCode::BadValue,
                    &format!("{key}[{i}]"),
                    "expected a string",
                ),
            }
        }
        out
    }

    fn date(&mut self, key: &str) -> Option<NaiveDate> {
        let text = self.string(key)?;
        match parse_iso_date(&text) {
            Some(d) => Some(d),
            None => {
                self.error(
                    FindingCode::BadDate,
                    key,
                    format!("`{text}` is not a YYYY-MM-DD calendar date"),
                );
                None
            }
        }
    }

    fn uri(&mut self, key: &str) -> Option<String> {
        let text = self.string(key)?;
        if !norm::is_absolute_uri(&text) {
            self.error(
                FindingCode::BadUri,
                key,
                format!("`{text}` is not an absolute URI"),
            );
        }
        Some(text)
    }

    /// A nested typed node. Checks `@type` and `@id`, warns on extra keys.
    fn node(
        &mut self,
        path: &str,
        value: &'a Value,
        kind: &str,
        allowed: &[&str],
    ) -> Option<(&'a Map<String, Value>, String)> {
        let Value::Object(n) = value else {
            self.error(
                FindingCode::BadReference,
                path,
                format!("expected a {kind} node object"),
            );
            return None;
        };
        if n.get("@type").and_then(Value::as_str) != Some(kind) {
            self.error(
                FindingCode::BadReference,
                &format!("{path}.@type"),
                format!("expected @type {kind}"),
            );
            return None;
        }
        let Some(id) = n.get("@id").and_then(Value::as_str) else {
            self.error(
                FindingCode::BadReference,
                &format!("{path}.@id"),
                "node has no string @id",
            );
            return None;
        };
        if !norm::is_absolute_uri(id) {
            self.error(
                FindingCode::BadReference,
                &format!("{path}.@id"),
                format!("`{id}` is not an absolute URI"),
            );
            return None;
        }
        for key in n.keys() {
            if !matches!(key.as_str(), "@type" | "@id") && !allowed.contains(&key.as_str()) {
                self.findings.push(ValidationFinding::warning(
                    FindingCode::IgnoredProperty,
                    format!("{path}.{key}"),
                    "property not carried by this mapping",
                ));
            }
        }
        Some((n, id.to_owned()))
    }

    fn vocab_node(&mut self, path: &str, value: &'a Value, kind: &str) -> Option<LexVocabUrn> {
        let (_, id) = self.node(path, value, kind, &[])?;
        let parsed = urn::urn_param(&id).map(|u| u.parse::<LexVocabUrn>());
        match parsed {
            Some(Ok(v)) => Some(v),
            Some(Err(e)) => {
                self.error(
                    FindingCode::BadReference,
                    &format!("{path}.@id"),
                    format!("resolver URN is not a vocabulary term: {e}"),
                );
                None
            }
            None => {
                self.error(
                    FindingCode::BadReference,
                    &format!("{path}.@id"),
                    "expected a resolver URI with a `urn` query parameter",
                );
                None
            }
        }
    }

    fn optional_name(&mut self, path: &str, n: &Map<String, Value>) -> Option<String> {
        match n.get("name") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => {
                self.error(
                    FindingCode::BadValue,
                    &format!("{path}.name"),
                    "expected a string",
                );
                None
            }
        }
    }

    fn org(&mut self, key: &str) -> Option<OrgRef> {
        let value = self.get(key)?;
        let (n, id) = self.node(key, value, "GovernmentOrganization", &["name"])?;
        let name = self.optional_name(key, n);
        Some(OrgRef { id, name })
    }

    fn area(&mut self, key: &str) -> Option<AdminAreaRef> {
        let value = self.get(key)?;
        let (n, id) = self.node(key, value, "AdministrativeArea", &["name"])?;
        let name = self.optional_name(key, n);
        Some(AdminAreaRef { id, name })
    }

    fn country(&mut self, key: &str) -> Option<CountryRef> {
        let value = self.get(key)?;
        let (n, id) = self.node(key, value, "Country", &["name", "url", "address"])?;
        let name = match n.get("name") {
            Some(Value::String(s)) => s.clone(),
            _ => {
                self.error(
                    FindingCode::BadReference,
                    &format!("{key}.name"),
                    "Country node needs a string name",
                );
                return None;
            }
        };
        let url = match n.get("url") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) if norm::is_absolute_uri(s) => Some(s.clone()),
            Some(_) => {
                self.error(
                    FindingCode::BadUri,
                    &format!("{key}.url"),
                    "expected an absolute URI string",
                );
                None
            }
        };
        let path = format!("{key}.address");
        let address = n
            .get("address")
            .and_then(Value::as_object)
            .filter(|a| a.get("@type").and_then(Value::as_str) == Some("PostalAddress"));
        let Some(code) = address
            .and_then(|a| a.get("addressCountry"))
            .and_then(Value::as_str)
        else {
            self.error(
                FindingCode::BadReference,
                &path,
                "Country node needs a PostalAddress with a string addressCountry",
            );
            return None;
        };
        Some(CountryRef {
            id,
            name,
            url,
            country_code: code.to_owned(),
        })
    }

    fn decode(&mut self) -> Option<NormWork> {
        match self.get("@context") {
            Some(Value::String(c)) if ACCEPTED_CONTEXTS.contains(&c.as_str()) => {}
            Some(other) => self.error(
                FindingCode::BadContext,
                "@context",
                format!("unsupported @context {other}"),
            ),
            None => self.error(FindingCode::BadContext, "@context", "@context is absent"),
        }
        match self.get("@type") {
            Some(Value::String(t)) if t == LEGISLATION_TYPE => {}
            Some(other) => self.error(
                FindingCode::WrongType,
                "@type",
                format!("expected @type Legislation, found {other}"),
            ),
            None => self.error(FindingCode::WrongType, "@type", "@type is absent"),
        }
        if self.obj.contains_key("@graph") {
            self.error(
                FindingCode::BadValue,
                "@graph",
                "graph containers are not supported; one Legislation node per document",
            );
        }

        let identifier = self.required_string("legislationIdentifier");
        let urn = identifier.and_then(|text| match text.parse::<LexNormUrn>() {
            Ok(u) => Some(u),
            Err(e) => {
                self.error(
                    FindingCode::BadUrn,
                    "legislationIdentifier",
                    format!("`{text}`: {e}"),
                );
                None
            }
        });

        match self.get("@id") {
            None => self.error(FindingCode::BadId, "@id", "@id is absent"),
            Some(Value::String(id)) => self.check_id(id, urn.as_ref()),
            Some(_) => self.error(FindingCode::BadId, "@id", "@id must be a string"),
        }

        let legislation_type = match self.get("legislationType") {
            Some(v) => self.vocab_node("legislationType", v, "CategoryCode"),
            None => {
                self.error(
                    FindingCode::MissingProperty,
                    "legislationType",
                    "required property `legislationType` is absent",
                );
                None
            }
        };

        let same_as = self.strings("sameAs");
        for (i, s) in same_as.iter().enumerate() {
            if !norm::is_absolute_uri(s) {
                self.error(
                    FindingCode::BadUri,
                    &format!("sameAs[{i}]"),
                    format!("`{s}` is not an absolute URI"),
                );
            }
        }
        let in_language = self.required_string("inLanguage");
        let name = self.required_string("name");
        let alternate_names = self.strings("alternateName");
        let abstract_text = self.string("abstract");

        let mut about = Vec::new();
        if let Some(value) = self.get("about") {
            let items: Vec<&Value> = match value {
                Value::Array(items) => items.iter().collect(),
                lone => vec![lone],
            };
            for (i, item) in items.into_iter().enumerate() {
                if let Some(t) = self.vocab_node(&format!("about[{i}]"), item, "DefinedTerm") {
                    about.push(t);
                }
            }
        }

        let keywords = self.strings("keywords");
        let legislation_date = if self.get("legislationDate").is_none() {
            self.error(
                FindingCode::MissingProperty,
                "legislationDate",
                "required property `legislationDate` is absent",
            );
            None
        } else {
            self.date("legislationDate")
        };
        let legislation_passed_by = self.org("legislationPassedBy");
        let legislation_jurisdiction = self.area("legislationJurisdiction");
        let spatial_coverage = self.country("spatialCoverage");
        let date_published = self.date("datePublished");
        let license = self.uri("license");
        let publisher = self.org("publisher");
        let sd_date_published = self.date("sdDatePublished");
        let sd_license = self.uri("sdLicense");
        let sd_publisher = self.org("sdPublisher");

        let extensions = self
            .obj
            .iter()
            .filter(|(k, _)| !KNOWN.contains(&k.as_str()) && k.as_str() != "@graph")
            .filter_map(|(k, v)| strip_nulls(v).map(|v| (k.clone(), v)))
            .collect();

        Some(NormWork {
            urn: urn?,
            legislation_type: legislation_type?,
            same_as,
            in_language: in_language?,
            name: name?,
            alternate_names,
            abstract_text,
            about,
            keywords,
            legislation_date: legislation_date?,
            legislation_passed_by,
            legislation_jurisdiction,
            spatial_coverage,
            date_published,
            license,
            publisher,
            sd_date_published,
            sd_license,
            sd_publisher,
            extensions,
        })
    }

    fn check_id(&mut self, id: &str, identifier: Option<&LexNormUrn>) {
        if !norm::is_absolute_uri(id) {
            self.error(
                FindingCode::BadId,
                "@id",
                format!("`{id}` is not an absolute URI"),
            );
            return;
        }
        let Some(param) = urn::urn_param(id) else {
            self.error(
                FindingCode::BadId,
                "@id",
                format!("`{id}` carries no `urn` query parameter"),
            );
            return;
        };
        let normalized = match urn::normalize_urn(&param) {
            Ok(n) => n,
            Err(e) => {
                self.error(FindingCode::BadId, "@id", format!("@id URN `{param}`: {e}"));
                return;
            }
        };
        if let Some(identifier) = identifier {
            if normalized != identifier.to_string() {
                self.error(
                    FindingCode::IdUrnMismatch,
                    "@id",
                    format!("@id names {normalized} but legislationIdentifier is {identifier}"),
                );
            }
        }
    }
}

fn parse_iso_date(text: &str) -> Option<NaiveDate> {
    let b = text.as_bytes();
    if b.len() != 10 || b[4] != b'-' || b[7] != b'-' {
        return None;
    }
    NaiveDate::parse_from_str(text, "%Y-%m-%d").ok()
}

/// Compares two documents ignoring key order and whitespace, with URN
/// values normalized and one-element arrays equated with their element.
pub fn semantically_equal(a: &str, b: &str) -> Result<bool, CodecError> {
    let parse = |t: &str| -> Result<Value, CodecError> {
        serde_json::from_str(t).map_err(|e| CodecError::NotJson(e.to_string()))
    };
    Ok(canonical(&parse(a)?) == canonical(&parse(b)?))
}

fn canonical(value: &Value) -> Value {
    match value {
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            Value::Object(
                keys.into_iter()
                    .map(|k| (k.clone(), canonical(&map[k.as_str()])))
                    .collect(),
            )
        }
        Value::Array(items) if items.len() == 1 => canonical(&items[0]),
        Value::Array(items) => Value::Array(items.iter().map(canonical).collect()),
        Value::String(s) => Value::String(normalize_urn_text(s)),
        other => other.clone(),
    }
}

fn normalize_urn_text(s: &str) -> String {
    if let Ok(n) = urn::normalize_urn(s) {
        return n;
    }
    let Some((head, query)) = s.split_once('?') else {
        return s.to_owned();
    };
    let params: Vec<String> = query
        .split('&')
        .map(|p| match p.strip_prefix("urn=") {
            Some(v) => match urn::normalize_urn(&urn::percent_decode(v)) {
                Ok(n) => format!("urn={n}"),
                Err(_) => p.to_owned(),
            },
            None => p.to_owned(),
        })
        .collect();
    format!("{head}?{}", params.join("&"))
}
