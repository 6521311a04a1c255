//! Prompt templates and response parsers for the remote judge.
//!
//! Changing a template must bump [`TEMPLATE_VERSION`] so cached responses
//! rendered from the old wording are not reused.
//!
//! The checker prompt contains only the reference text and the claims; the
//! user query is not shown to the checker.

use ragcheck_core::EntailmentLabel;

use crate::error::PipelineError;

pub const TEMPLATE_VERSION: &str = "v1";

pub const SYSTEM_PROMPT: &str = "You are a careful annotator for factual claims.";

pub const TEXT_HEADER: &str = "### Text";
pub const REFERENCE_HEADER: &str = "### Reference";
pub const CLAIMS_HEADER: &str = "### Claims";

pub fn render_extract(text: &str) -> String {
    format!(
        "Decompose the text below into atomic factual claims.\n\
         Write one claim per line, each starting with \"- \".\n\
         If the text states no factual claim, reply with NONE.\n\
         \n\
         {TEXT_HEADER}\n\
         {text}"
    )
}

pub fn render_check<'a>(claims: impl IntoIterator<Item = &'a str>, reference: &str) -> String {
    let mut prompt = format!(
        "Decide whether each claim below is entailed by the reference text.\n\
         Answer with exactly one label per claim, one per line, in the same order as the claims.\n\
         Use only these labels: Entailment, Neutral, Contradiction.\n\
         \n\
         {REFERENCE_HEADER}\n\
         {reference}\n\
         \n\
         {CLAIMS_HEADER}"
    );
    for (i, claim) in claims.into_iter().enumerate() {
        prompt.push_str(&format!("\n{}. {}", i + 1, claim));
    }
    prompt
}

fn parse_error(reason: impl Into<String>, raw: &str) -> PipelineError {
    PipelineError::Parse {
        reason: reason.into(),
        raw: raw.to_string(),
    }
}

/// Strips a list marker: `- `, `* `, `1. ` or `1) `.
fn strip_marker(line: &str) -> Option<&str> {
    if let Some(rest) = line.strip_prefix("- ").or_else(|| line.strip_prefix("* ")) {
        return Some(rest);
    }
    let digits = line.bytes().take_while(u8::is_ascii_digit).count();
    if digits > 0 {
        let rest = &line[digits..];
        return rest
            .strip_prefix(". ")
            .or_else(|| rest.strip_prefix(") "))
            .or_else(|| rest.strip_prefix('.'))
            .or_else(|| rest.strip_prefix(')'));
    }
    None
}

pub fn parse_claims(raw: &str) -> Result<Vec<String>, PipelineError> {
    let body = raw.trim();
    if body.is_empty() {
        return Err(parse_error("empty response", raw));
    }
    if body.eq_ignore_ascii_case("none") {
        return Ok(Vec::new());
    }
    let mut claims = Vec::new();
    for line in body.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let claim = strip_marker(line)
            .ok_or_else(|| parse_error(format!("line without list marker: {line:?}"), raw))?;
        claims.push(claim.trim().to_string());
    }
    Ok(claims)
}

pub fn parse_label(token: &str) -> Option<EntailmentLabel> {
    let word = token
        .trim()
        .trim_matches(|c: char| !c.is_alphanumeric())
        .to_ascii_lowercase();
    match word.as_str() {
        "entailment" | "entailed" => Some(EntailmentLabel::Entailment),
        "neutral" => Some(EntailmentLabel::Neutral),
        "contradiction" | "contradicted" => Some(EntailmentLabel::Contradiction),
        _ => None,
    }
}

/// One label per non-empty line. Any unrecognized line is a (retriable) parse failure.
pub fn parse_labels(raw: &str) -> Result<Vec<EntailmentLabel>, PipelineError> {
    let mut labels = Vec::new();
    for line in raw.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let token = strip_marker(line).unwrap_or(line);
        let label = parse_label(token)
            .ok_or_else(|| parse_error(format!("unknown label {line:?}"), raw))?;
        labels.push(label);
    }
    if labels.is_empty() {
        return Err(parse_error("no labels", raw));
    }
    Ok(labels)
}
