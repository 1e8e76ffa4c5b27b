//! LEX URN identifiers.
//!
//! Two shapes are recognised:
//!
//! ```text
//! urn:lex:{jurisdiction}:{authority}:{doc_type}:{YYYY-MM-DD};{number}   norm
//! urn:lex:{jurisdiction}:{authority}:{scheme}:{term}                    vocabulary term
//! ```
//!
//! Input is accepted in any ASCII case; canonical output is always lowercase.
//! Extended LEX features (versions `@`, portions `!`, jurisdiction
//! subdivisions `;`) are rejected with [`ParseError::UnsupportedFeature`].

use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

const PREFIX: &str = "urn:lex:";

/// Errors raised while parsing a LEX URN.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("identifier does not start with `urn:lex:`")]
    MissingPrefix,
    #[error("expected 4 segments after `urn:lex:`, found {found}")]
    BadSegmentCount { found: usize },
    #[error("illegal token in {segment}: {reason}")]
    BadToken {
        segment: &'static str,
        reason: String,
    },
    #[error("bad date `{text}`: {reason}")]
    BadDate { text: String, reason: &'static str },
    #[error("unsupported LEX URN feature `{0}`")]
    UnsupportedFeature(char),
}

impl ParseError {
    /// Short stable identifier for the error class.
    pub fn code(&self) -> &'static str {
        match self {
            ParseError::MissingPrefix => "MISSING_PREFIX",
            ParseError::BadSegmentCount { .. } => "BAD_SEGMENT_COUNT",
            ParseError::BadToken { .. } => "BAD_TOKEN",
            ParseError::BadDate { .. } => "BAD_DATE",
            ParseError::UnsupportedFeature(_) => "UNSUPPORTED_FEATURE",
        }
    }
}

/// Error returned by [`resolver_uri`] for an unusable base.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad resolver base `{base}`: {reason}")]
pub struct BadBase {
    pub base: String,
    pub reason: &'static str,
}

/// A norm identifier: `urn:lex:br:federal:lei.complementar:2006-12-14;123`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LexNormUrn {
    jurisdiction: String,
    authority: String,
    doc_type: String,
    date: NaiveDate,
    number: String,
}

/// A vocabulary term identifier: `urn:lex:br:federal:tipo-norma:lei.complementar`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LexVocabUrn {
    jurisdiction: String,
    authority: String,
    scheme: String,
    term: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LexUrn {
    Norm(LexNormUrn),
    Vocab(LexVocabUrn),
}

impl LexNormUrn {
    /// Builds a norm URN from components, applying the same rules as the parser.
    pub fn new(
        jurisdiction: &str,
        authority: &str,
        doc_type: &str,
        date: NaiveDate,
        number: &str,
    ) -> Result<Self, ParseError> {
        let jurisdiction = jurisdiction.to_ascii_lowercase();
        let authority = authority.to_ascii_lowercase();
        let doc_type = doc_type.to_ascii_lowercase();
        check_token(&jurisdiction, "jurisdiction")?;
        check_token(&authority, "authority")?;
        check_token(&doc_type, "doc_type")?;
        check_number(number)?;
        Ok(Self {
            jurisdiction,
            authority,
            doc_type,
            date,
            number: number.to_owned(),
        })
    }

    pub fn jurisdiction(&self) -> &str {
        &self.jurisdiction
    }

    pub fn authority(&self) -> &str {
        &self.authority
    }

    pub fn doc_type(&self) -> &str {
        &self.doc_type
    }

    pub fn date(&self) -> NaiveDate {
        self.date
    }

    pub fn number(&self) -> &str {
        &self.number
    }

    /// The `tipo-norma` vocabulary term naming this norm's document type.
    pub fn type_term(&self) -> LexVocabUrn {
        LexVocabUrn {
            jurisdiction: self.jurisdiction.clone(),
            authority: self.authority.clone(),
            scheme: "tipo-norma".to_owned(),
            term: self.doc_type.clone(),
        }
    }
}

impl LexVocabUrn {
    pub fn new(
        jurisdiction: &str,
        authority: &str,
        scheme: &str,
        term: &str,
    ) -> Result<Self, ParseError> {
        let urn = Self {
            jurisdiction: jurisdiction.to_ascii_lowercase(),
            authority: authority.to_ascii_lowercase(),
            scheme: scheme.to_ascii_lowercase(),
            term: term.to_ascii_lowercase(),
        };
        check_token(&urn.jurisdiction, "jurisdiction")?;
        check_token(&urn.authority, "authority")?;
        check_token(&urn.scheme, "scheme")?;
        check_token(&urn.term, "term")?;
        Ok(urn)
    }

    pub fn jurisdiction(&self) -> &str {
        &self.jurisdiction
    }

    pub fn authority(&self) -> &str {
        &self.authority
    }

    pub fn scheme(&self) -> &str {
        &self.scheme
    }

    pub fn term(&self) -> &str {
        &self.term
    }
}

impl LexUrn {
    pub fn is_norm(&self) -> bool {
        matches!(self, LexUrn::Norm(_))
    }

    pub fn as_norm(&self) -> Option<&LexNormUrn> {
        match self {
            LexUrn::Norm(n) => Some(n),
            LexUrn::Vocab(_) => None,
        }
    }

    pub fn as_vocab(&self) -> Option<&LexVocabUrn> {
        match self {
            LexUrn::Vocab(v) => Some(v),
            LexUrn::Norm(_) => None,
        }
    }
}

impl fmt::Display for LexNormUrn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{PREFIX}{}:{}:{}:{};{}",
            self.jurisdiction,
            self.authority,
            self.doc_type,
            self.date.format("%Y-%m-%d"),
            self.number
        )
    }
}

impl fmt::Display for LexVocabUrn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{PREFIX}{}:{}:{}:{}",
            self.jurisdiction, self.authority, self.scheme, self.term
        )
    }
}

impl fmt::Display for LexUrn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LexUrn::Norm(n) => n.fmt(f),
            LexUrn::Vocab(v) => v.fmt(f),
        }
    }
}

impl FromStr for LexUrn {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_urn(s)
    }
}

impl FromStr for LexNormUrn {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match parse_urn(s)? {
            LexUrn::Norm(n) => Ok(n),
            LexUrn::Vocab(_) => Err(ParseError::BadToken {
                segment: "tail",
                reason: "expected a `date;number` norm tail, found a vocabulary term".into(),
            }),
        }
    }
}

impl FromStr for LexVocabUrn {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match parse_urn(s)? {
            LexUrn::Vocab(v) => Ok(v),
            LexUrn::Norm(_) => Err(ParseError::BadToken {
                segment: "tail",
                reason: "expected a vocabulary term, found a `date;number` norm tail".into(),
            }),
        }
    }
}

macro_rules! string_serde {
    ($ty:ty) => {
        impl Serialize for $ty {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let text = String::deserialize(d)?;
                text.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(LexUrn);
string_serde!(LexNormUrn);
string_serde!(LexVocabUrn);

/// Parses a LEX URN, accepting any ASCII case.
pub fn parse_urn(text: &str) -> Result<LexUrn, ParseError> {
    let lowered = text.to_ascii_lowercase();
    let rest = lowered
        .strip_prefix(PREFIX)
        .ok_or(ParseError::MissingPrefix)?;

    if let Some(c) = rest.chars().find(|c| matches!(c, '@' | '!')) {
        return Err(ParseError::UnsupportedFeature(c));
    }

    let segments: Vec<&str> = rest.split(':').collect();
    if segments.len() != 4 {
        return Err(ParseError::BadSegmentCount {
            found: segments.len(),
        });
    }
    let (jurisdiction, authority, head, tail) =
        (segments[0], segments[1], segments[2], segments[3]);

    for (seg, name) in [
        (jurisdiction, "jurisdiction"),
        (authority, "authority"),
        (head, "doc_type"),
    ] {
        if seg.contains(';') {
            return Err(ParseError::UnsupportedFeature(';'));
        }
        check_token(seg, name)?;
    }

    match tail.split_once(';') {
        Some((date_text, number)) => {
            let date = parse_date(date_text)?;
            check_number(number)?;
            Ok(LexUrn::Norm(LexNormUrn {
                jurisdiction: jurisdiction.to_owned(),
                authority: authority.to_owned(),
                doc_type: head.to_owned(),
                date,
                number: number.to_owned(),
            }))
        }
        None => {
            check_token(tail, "term")?;
            Ok(LexUrn::Vocab(LexVocabUrn {
                jurisdiction: jurisdiction.to_owned(),
                authority: authority.to_owned(),
                scheme: head.to_owned(),
                term: tail.to_owned(),
            }))
        }
    }
}

/// Canonical text of a URN.
pub fn format_urn(urn: &LexUrn) -> String {
    urn.to_string()
}

/// `format_urn(parse_urn(text))`.
pub fn normalize_urn(text: &str) -> Result<String, ParseError> {
    parse_urn(text).map(|u| u.to_string())
}

/// Builds `{base}?urn={canonical urn}`. The URN is placed verbatim: `:` and
/// `;` are legal in a query value.
pub fn resolver_uri(urn: &LexUrn, base: &str) -> Result<String, BadBase> {
    check_base(base)?;
    Ok(format!("{base}?urn={urn}"))
}

/// Checks that `base` is an absolute http(s) URI without query or fragment.
pub fn check_base(base: &str) -> Result<(), BadBase> {
    let bad = |reason| BadBase {
        base: base.to_owned(),
        reason,
    };
    let parsed = url::Url::parse(base).map_err(|_| bad("not an absolute URI"))?;
    if !matches!(parsed.scheme(), "http" | "https") {
        return Err(bad("scheme must be http or https"));
    }
    if base.contains('?') {
        return Err(bad("base must not carry a query"));
    }
    if base.contains('#') {
        return Err(bad("base must not carry a fragment"));
    }
    Ok(())
}

/// Extracts the `urn` query parameter of a resolver URI, percent-decoding it.
///
/// Returns `None` when the URI carries no `urn=` parameter.
pub fn urn_param(uri: &str) -> Option<String> {
    let query = uri.split_once('?')?.1;
    let query = query.split('#').next().unwrap_or_default();
    query
        .split('&')
        .find_map(|pair| pair.strip_prefix("urn="))
        .map(percent_decode)
}

/// Percent-decodes `text`, leaving invalid sequences in place.
pub fn percent_decode(text: &str) -> String {
    percent_encoding::percent_decode_str(text)
        .decode_utf8_lossy()
        .into_owned()
}

fn parse_date(text: &str) -> Result<NaiveDate, ParseError> {
    let bytes = text.as_bytes();
    let shaped = bytes.len() == 10
        && bytes.iter().enumerate().all(|(i, b)| match i {
            4 | 7 => *b == b'-',
            _ => b.is_ascii_digit(),
        });
    if !shaped {
        return Err(ParseError::BadDate {
            text: text.to_owned(),
            reason: "expected YYYY-MM-DD",
        });
    }
    let field = |r: std::ops::Range<usize>| text[r].parse::<u32>().unwrap_or_default();
    NaiveDate::from_ymd_opt(field(0..4) as i32, field(5..7), field(8..10)).ok_or_else(|| {
        ParseError::BadDate {
            text: text.to_owned(),
            reason: "no such calendar day",
        }
    })
}

/// `token = lower-alnum *( ("." | "-") lower-alnum )`
fn check_token(token: &str, segment: &'static str) -> Result<(), ParseError> {
    let bad = |reason: &str| ParseError::BadToken {
        segment,
        reason: reason.to_owned(),
    };
    if token.is_empty() {
        return Err(bad("empty segment"));
    }
    if let Some(c) = token
        .chars()
        .find(|c| !matches!(c, 'a'..='z' | '0'..='9' | '.' | '-'))
    {
        return Err(bad(&format!("illegal character {c:?}")));
    }
    let mut prev = '.';
    for c in token.chars() {
        if matches!(c, '.' | '-') && matches!(prev, '.' | '-') {
            return Err(bad("separator at start or doubled"));
        }
        prev = c;
    }
    if matches!(prev, '.' | '-') {
        return Err(bad("trailing separator"));
    }
    Ok(())
}

fn check_number(number: &str) -> Result<(), ParseError> {
    if number.is_empty() {
        return Err(ParseError::BadToken {
            segment: "number",
            reason: "empty segment".into(),
        });
    }
    if let Some(c) = number.chars().find(|c| !matches!(c, '0'..='9' | '.')) {
        if c == ';' {
            return Err(ParseError::UnsupportedFeature(';'));
        }
        return Err(ParseError::BadToken {
            segment: "number",
            reason: format!("illegal character {c:?}"),
        });
    }
    Ok(())
}
