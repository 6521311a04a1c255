use std::io::Write;
use std::path::Path;

use anyhow::Result;
use ragcheck_core::meta_eval::{annotator_agreement, correlate_metric, Aspect};
use ragcheck_core::records::PairsRecord;

use crate::io::read_jsonl;
use crate::render::{agreement_table, correlation_table};
use crate::Exit;

/// With no `--metric`, each aspect is paired with its default metric
/// (correctness/precision, completeness/recall, overall/f1). With metrics,
/// every metric is correlated against every selected aspect.
pub fn run(
    pairs: &Path,
    metrics: &[String],
    aspects: &[String],
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<Exit> {
    let aspects: Vec<Aspect> = if aspects.is_empty() {
        Aspect::ALL.to_vec()
    } else {
        aspects
            .iter()
            .map(|a| a.parse())
            .collect::<Result<_, _>>()?
    };
    let pairs: Vec<PairsRecord> = read_jsonl(pairs)?.into_iter().map(|r| r.record).collect();

    let combos: Vec<(String, Aspect)> = if metrics.is_empty() {
        aspects
            .iter()
            .map(|a| (a.default_metric().name().to_string(), *a))
            .collect()
    } else {
        metrics
            .iter()
            .flat_map(|m| aspects.iter().map(move |a| (m.clone(), *a)))
            .collect()
    };

    let mut status = Exit::Success;
    let mut rows = Vec::new();
    for (metric, aspect) in combos {
        match correlate_metric(&pairs, &metric, aspect) {
            Ok(row) => {
                for x in &row.excluded {
                    writeln!(
                        err,
                        "{metric}/{aspect}: excluded {}: {}",
                        x.pair_id, x.reason
                    )?;
                }
                rows.push(row);
            }
            Err(e) => {
                writeln!(err, "error: {e}")?;
                status = Exit::Partial;
            }
        }
    }
    if !rows.is_empty() {
        out.write_all(correlation_table(&rows).as_bytes())?;
    }

    let agreement: Vec<_> = aspects
        .iter()
        .filter_map(|a| annotator_agreement(&pairs, *a))
        .collect();
    if !agreement.is_empty() {
        writeln!(out, "\nannotator agreement")?;
        out.write_all(agreement_table(&agreement).as_bytes())?;
    }
    Ok(status)
}
