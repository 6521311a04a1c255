use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use ragcheck_core::records::{JudgmentRecord, ReportRecord};
use ragcheck_core::{aggregate, compute_all};

use crate::config::RunConfig;
use crate::io::{read_jsonl, to_jsonl, write_atomic};
use crate::render::metrics_table;
use crate::{Exit, Format};

/// Per-query report lines followed by the aggregate line.
///
/// Records that do not form a valid judgment set (G = 0, ragged matrices) are
/// skipped with a warning and make the status nonzero.
pub fn run(
    judgments: &Path,
    output: Option<&Path>,
    format: Format,
    config: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<Exit> {
    let metadata = RunConfig::load_or_default(config)?.metadata;
    let rows = read_jsonl::<JudgmentRecord>(judgments)?;

    let mut status = Exit::Success;
    let mut metrics = Vec::with_capacity(rows.len());
    let mut report = Vec::with_capacity(rows.len() + 1);
    for row in &rows {
        match row.record.to_judgments() {
            Ok(j) => {
                let m = compute_all(&j);
                report.push(ReportRecord::per_query(&row.record.query_id, &m));
                metrics.push(m);
            }
            Err(e) => {
                writeln!(
                    err,
                    "warning: line {} (query {}) skipped: {e}",
                    row.line, row.record.query_id
                )?;
                status = Exit::Partial;
            }
        }
    }
    match aggregate(&metrics) {
        Ok(a) => report.push(ReportRecord::aggregate(&a, Some(metadata))),
        Err(e) => {
            writeln!(err, "warning: no aggregate: {e}")?;
            status = Exit::Partial;
        }
    }

    let text = match format {
        Format::Jsonl => to_jsonl(&report),
        Format::Table => metrics_table(&report),
    };
    match output {
        Some(path) => write_atomic(path, text.as_bytes())
            .with_context(|| format!("writing {}", path.display()))?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(status)
}
