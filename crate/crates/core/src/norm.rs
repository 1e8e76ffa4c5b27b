//! The abstract legal Work and its consistency rules.

use std::collections::HashSet;

use chrono::NaiveDate;
use serde_json::Value;

use crate::finding::{FindingCode, ValidationFinding, ValidationReport};
use crate::urn::{self, LexNormUrn, LexVocabUrn};

/// A `GovernmentOrganization` reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrgRef {
    pub id: String,
    pub name: Option<String>,
}

/// An `AdministrativeArea` reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdminAreaRef {
    pub id: String,
    pub name: Option<String>,
}

/// A `Country` reference with its postal country code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountryRef {
    pub id: String,
    pub name: String,
    pub url: Option<String>,
    pub country_code: String,
}

impl OrgRef {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            name: None,
        }
    }
}

/// A legal norm as an abstract Work, described with schema.org `Legislation`
/// properties.
#[derive(Debug, Clone, PartialEq)]
pub struct NormWork {
    pub urn: LexNormUrn,
    pub legislation_type: LexVocabUrn,
    pub same_as: Vec<String>,
    pub in_language: String,
    pub name: String,
    pub alternate_names: Vec<String>,
    pub abstract_text: Option<String>,
    pub about: Vec<LexVocabUrn>,
    pub keywords: Vec<String>,
    pub legislation_date: NaiveDate,
    pub legislation_passed_by: Option<OrgRef>,
    pub legislation_jurisdiction: Option<AdminAreaRef>,
    pub spatial_coverage: Option<CountryRef>,
    pub date_published: Option<NaiveDate>,
    pub license: Option<String>,
    pub publisher: Option<OrgRef>,
    pub sd_date_published: Option<NaiveDate>,
    pub sd_license: Option<String>,
    pub sd_publisher: Option<OrgRef>,
    /// Unrecognised top-level properties, kept in first-seen order.
    pub extensions: Vec<(String, Value)>,
}

impl NormWork {
    /// A minimal Work whose type and date are derived from `urn`.
    pub fn new(urn: LexNormUrn, name: impl Into<String>, in_language: impl Into<String>) -> Self {
        Self {
            legislation_type: urn.type_term(),
            legislation_date: urn.date(),
            urn,
            same_as: Vec::new(),
            in_language: in_language.into(),
            name: name.into(),
            alternate_names: Vec::new(),
            abstract_text: None,
            about: Vec::new(),
            keywords: Vec::new(),
            legislation_passed_by: None,
            legislation_jurisdiction: None,
            spatial_coverage: None,
            date_published: None,
            license: None,
            publisher: None,
            sd_date_published: None,
            sd_license: None,
            sd_publisher: None,
            extensions: Vec::new(),
        }
    }
}

/// Returns the `name` property verbatim.
pub fn display_name(work: &NormWork) -> &str {
    &work.name
}

pub(crate) fn is_absolute_uri(text: &str) -> bool {
    url::Url::parse(text).is_ok()
}

/// Loose BCP 47 shape check: a 2–3 or 5–8 letter primary subtag followed by
/// 1–8 character alphanumeric subtags.
pub(crate) fn is_language_tag(tag: &str) -> bool {
    let mut parts = tag.split('-');
    let primary = parts.next().unwrap_or_default();
    let primary_ok =
        matches!(primary.len(), 2 | 3 | 5..=8) && primary.chars().all(|c| c.is_ascii_alphabetic());
    primary_ok
        && parts.all(|p| (1..=8).contains(&p.len()) && p.chars().all(|c| c.is_ascii_alphanumeric()))
}

/// Checks every consistency rule on `work`. Violations are returned as data.
pub fn validate_norm(work: &NormWork) -> ValidationReport {
    use FindingCode::*;
    let mut out = Vec::new();

    if work.legislation_date != work.urn.date() {
        out.push(ValidationFinding::error(
            UrnDateMismatch,
            "legislationDate",
            format!(
                "legislationDate {} differs from the identifier date {}",
                work.legislation_date,
                work.urn.date()
            ),
        ));
    }

    let kind = &work.legislation_type;
    if kind.scheme() != "tipo-norma" || kind.term() != work.urn.doc_type() {
        out.push(ValidationFinding::error(
            TypeUrnMismatch,
            "legislationType",
            format!(
                "legislationType {kind} does not name document type `{}` in scheme tipo-norma",
                work.urn.doc_type()
            ),
        ));
    }

    if work.name.trim().is_empty() {
        out.push(ValidationFinding::error(EmptyName, "name", "name is empty"));
    }

    let own = work.urn.to_string();
    let mut seen = HashSet::new();
    for (i, uri) in work.same_as.iter().enumerate() {
        let path = format!("sameAs[{i}]");
        if !is_absolute_uri(uri) {
            out.push(ValidationFinding::error(
                BadUri,
                &path,
                format!("`{uri}` is not an absolute URI"),
            ));
        }
        if !seen.insert(uri.as_str()) {
            out.push(ValidationFinding::error(
                DuplicateSameAs,
                &path,
                format!("`{uri}` is listed more than once"),
            ));
        }
        let points_home = urn::normalize_urn(uri)
            .ok()
            .or_else(|| urn::urn_param(uri).and_then(|u| urn::normalize_urn(&u).ok()))
            .is_some_and(|u| u == own);
        if points_home {
            out.push(ValidationFinding::error(
                SelfSameAs,
                &path,
                format!("`{uri}` is this Work's own resolver URI"),
            ));
        }
    }

    if !is_language_tag(&work.in_language) {
        out.push(ValidationFinding::error(
            BadLanguageTag,
            "inLanguage",
            format!("`{}` is not a language tag", work.in_language),
        ));
    }

    if let Some(country) = &work.spatial_coverage {
        let code = &country.country_code;
        if code.len() != 2 || !code.chars().all(|c| c.is_ascii_uppercase()) {
            out.push(ValidationFinding::error(
                BadCountryCode,
                "spatialCoverage.address.addressCountry",
                format!("`{code}` is not a two-letter uppercase country code"),
            ));
        }
    }

    if let Some(published) = work.date_published {
        if published < work.legislation_date {
            out.push(ValidationFinding::warning(
                PublishedBeforeSigned,
                "datePublished",
                format!(
                    "datePublished {published} precedes legislationDate {}",
                    work.legislation_date
                ),
            ));
        }
    }

    if work.abstract_text.is_none() {
        out.push(recommended("abstract"));
    }
    if work.keywords.is_empty() {
        out.push(recommended("keywords"));
    }
    if work.license.is_none() {
        out.push(recommended("license"));
    }

    let mut uris: Vec<(String, &str)> = Vec::new();
    for (path, org) in [
        ("legislationPassedBy", &work.legislation_passed_by),
        ("publisher", &work.publisher),
        ("sdPublisher", &work.sd_publisher),
    ] {
        if let Some(org) = org {
            uris.push((format!("{path}.@id"), &org.id));
        }
    }
    if let Some(area) = &work.legislation_jurisdiction {
        uris.push(("legislationJurisdiction.@id".into(), &area.id));
    }
    if let Some(country) = &work.spatial_coverage {
        uris.push(("spatialCoverage.@id".into(), &country.id));
        if let Some(url) = &country.url {
            uris.push(("spatialCoverage.url".into(), url));
        }
    }
    if let Some(l) = &work.license {
        uris.push(("license".into(), l));
    }
    if let Some(l) = &work.sd_license {
        uris.push(("sdLicense".into(), l));
    }
    for (path, uri) in uris {
        if !is_absolute_uri(uri) {
            out.push(ValidationFinding::error(
                BadUri,
                path,
                format!("`{uri}` is not an absolute URI"),
            ));
        }
    }

    ValidationReport::new(out)
}

fn recommended(path: &str) -> ValidationFinding {
    ValidationFinding::warning(
        FindingCode::MissingRecommended,
        path,
        format!("recommended property `{path}` is absent"),
    )
}
