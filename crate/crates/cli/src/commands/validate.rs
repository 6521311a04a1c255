use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Result};
use ragcheck_core::model::validate_instance;
use ragcheck_core::records::DatasetRecord;

use crate::io::read_jsonl;
use crate::Exit;

pub fn run(dataset: &Path, out: &mut dyn Write, _err: &mut dyn Write) -> Result<Exit> {
    let rows = read_jsonl::<DatasetRecord>(dataset)?;
    if rows.is_empty() {
        bail!("{}: no instances", dataset.display());
    }

    let mut problems = Vec::new();
    let mut first_seen: HashMap<&str, usize> = HashMap::new();
    for row in &rows {
        let id = row.record.query_id.as_str();
        for v in validate_instance(&row.record) {
            problems.push(format!("line {} (query {id}): {v}", row.line));
        }
        if id.is_empty() {
            continue;
        }
        if let Some(first) = first_seen.get(id) {
            problems.push(format!(
                "duplicate query_id {id:?} on lines {first} and {}",
                row.line
            ));
        } else {
            first_seen.insert(id, row.line);
        }
    }

    for p in &problems {
        writeln!(out, "{p}")?;
    }
    writeln!(
        out,
        "{} instances, {} violations",
        rows.len(),
        problems.len()
    )?;
    Ok(if problems.is_empty() {
        Exit::Success
    } else {
        Exit::Partial
    })
}
