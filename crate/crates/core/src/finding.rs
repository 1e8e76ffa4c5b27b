use std::fmt;

use serde::{Deserialize, Serialize};

/// Registered finding codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FindingCode {
    // norm consistency
    UrnDateMismatch,
    TypeUrnMismatch,
    EmptyName,
    DuplicateSameAs,
    SelfSameAs,
    BadLanguageTag,
    BadCountryCode,
    PublishedBeforeSigned,
    MissingRecommended,
    BadUri,
    // document structure
    NotObject,
    BadContext,
    WrongType,
    BadId,
    IdUrnMismatch,
    MissingProperty,
    BadUrn,
    BadDate,
    BadValue,
    BadReference,
    IgnoredProperty,
    // ingest
    NotJson,
    NotUtf8,
    DuplicateUrn,
}

impl FindingCode {
    pub const ALL: [FindingCode; 24] = [
        FindingCode::UrnDateMismatch,
        FindingCode::TypeUrnMismatch,
        FindingCode::EmptyName,
        FindingCode::DuplicateSameAs,
        FindingCode::SelfSameAs,
        FindingCode::BadLanguageTag,
        FindingCode::BadCountryCode,
        FindingCode::PublishedBeforeSigned,
        FindingCode::MissingRecommended,
        FindingCode::BadUri,
        FindingCode::NotObject,
        FindingCode::BadContext,
        FindingCode::WrongType,
        FindingCode::BadId,
        FindingCode::IdUrnMismatch,
        FindingCode::MissingProperty,
        FindingCode::BadUrn,
        FindingCode::BadDate,
        FindingCode::BadValue,
        FindingCode::BadReference,
        FindingCode::IgnoredProperty,
        FindingCode::NotJson,
        FindingCode::NotUtf8,
        FindingCode::DuplicateUrn,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FindingCode::UrnDateMismatch => "URN_DATE_MISMATCH",
            FindingCode::TypeUrnMismatch => "TYPE_URN_MISMATCH",
            FindingCode::EmptyName => "EMPTY_NAME",
            FindingCode::DuplicateSameAs => "DUPLICATE_SAME_AS",
            FindingCode::SelfSameAs => "SELF_SAME_AS",
            FindingCode::BadLanguageTag => "BAD_LANGUAGE_TAG",
            FindingCode::BadCountryCode => "BAD_COUNTRY_CODE",
            FindingCode::PublishedBeforeSigned => "PUBLISHED_BEFORE_SIGNED",
            FindingCode::MissingRecommended => "MISSING_RECOMMENDED",
            FindingCode::BadUri => "BAD_URI",
            FindingCode::NotObject => "NOT_OBJECT",
            FindingCode::BadContext => "BAD_CONTEXT",
            FindingCode::WrongType => "WRONG_TYPE",
            FindingCode::BadId => "BAD_ID",
            FindingCode::IdUrnMismatch => "ID_URN_MISMATCH",
            FindingCode::MissingProperty => "MISSING_PROPERTY",
            FindingCode::BadUrn => "BAD_URN",
            FindingCode::BadDate => "BAD_DATE",
            FindingCode::BadValue => "BAD_VALUE",
            FindingCode::BadReference => "BAD_REFERENCE",
            FindingCode::IgnoredProperty => "IGNORED_PROPERTY",
            FindingCode::NotJson => "NOT_JSON",
            FindingCode::NotUtf8 => "NOT_UTF8",
            FindingCode::DuplicateUrn => "DUPLICATE_URN",
        }
    }
}

impl fmt::Display for FindingCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationFinding {
    pub code: FindingCode,
    pub severity: Severity,
    pub path: String,
    pub message: String,
}

impl ValidationFinding {
    pub fn error(code: FindingCode, path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            code,
            severity: Severity::Error,
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn warning(code: FindingCode, path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            code,
            severity: Severity::Warning,
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for ValidationFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} at {}: {}",
            self.severity, self.code, self.path, self.message
        )
    }
}

/// Findings sorted by (path, code). `is_valid` holds iff none is an error.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    findings: Vec<ValidationFinding>,
    is_valid: bool,
}

impl ValidationReport {
    pub fn new(mut findings: Vec<ValidationFinding>) -> Self {
        findings.sort_by(|a, b| {
            (a.path.as_str(), a.code.as_str(), &a.message).cmp(&(
                b.path.as_str(),
                b.code.as_str(),
                &b.message,
            ))
        });
        let is_valid = !findings.iter().any(ValidationFinding::is_error);
        Self { findings, is_valid }
    }

    pub fn findings(&self) -> &[ValidationFinding] {
        &self.findings
    }

    pub fn into_findings(self) -> Vec<ValidationFinding> {
        self.findings
    }

    pub fn is_valid(&self) -> bool {
        self.is_valid
    }

    pub fn error_count(&self) -> usize {
        self.findings.iter().filter(|f| f.is_error()).count()
    }

    pub fn warning_count(&self) -> usize {
        self.findings.len() - self.error_count()
    }

    pub fn has_code(&self, code: FindingCode) -> bool {
        self.findings.iter().any(|f| f.code == code)
    }

    pub fn codes(&self) -> Vec<FindingCode> {
        self.findings.iter().map(|f| f.code).collect()
    }
}
