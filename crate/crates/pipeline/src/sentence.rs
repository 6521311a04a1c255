use crate::backend::{ClaimExtractor, ExtractRequest};
use crate::error::PipelineError;

/// One claim per sentence. A sentence ends at `.`, `!` or `?` followed by whitespace.
#[derive(Debug, Default, Clone, Copy)]
pub struct SentenceExtractor;

pub fn split_sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if !matches!(c, '.' | '!' | '?') {
            continue;
        }
        if let Some(&(_, next)) = chars.peek() {
            if next.is_whitespace() {
                let end = i + c.len_utf8();
                out.push(text[start..end].trim());
                start = end;
            }
        }
    }
    out.push(text[start..].trim());
    out.retain(|s| !s.is_empty());
    out
}

impl ClaimExtractor for SentenceExtractor {
    fn name(&self) -> &'static str {
        "sentence"
    }

    fn extract(&self, req: &ExtractRequest<'_>) -> Result<Vec<String>, PipelineError> {
        Ok(split_sentences(req.text)
            .into_iter()
            .map(str::to_owned)
            .collect())
    }
}
