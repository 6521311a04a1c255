use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use ragcheck_core::records::{DatasetRecord, JudgmentRecord};
use ragcheck_pipeline::Registry;
use serde::Serialize;

use crate::config::RunConfig;
use crate::io::{errors_sidecar, read_jsonl, to_jsonl, write_atomic};
use crate::Exit;

#[derive(Debug, Clone)]
pub struct JudgeArgs {
    pub dataset: PathBuf,
    pub config: Option<PathBuf>,
    pub output: PathBuf,
    pub parallelism: Option<usize>,
    pub cache_dir: Option<PathBuf>,
}

/// One line of the errors sidecar.
#[derive(Debug, Serialize)]
struct FailedInstance<'a> {
    query_id: &'a str,
    line: usize,
    error: String,
}

pub fn run(args: &JudgeArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<Exit> {
    let mut config = RunConfig::load_or_default(args.config.as_deref())?;
    if let Some(p) = args.parallelism {
        config.run.parallelism = p;
    }
    if let Some(dir) = &args.cache_dir {
        config.run.cache_dir = Some(dir.clone());
    }
    let pipeline = config
        .build_pipeline(&Registry::with_builtins())
        .context("building backends")?;

    let rows = read_jsonl::<DatasetRecord>(&args.dataset)?;
    let lines: Vec<usize> = rows.iter().map(|r| r.line).collect();
    let instances: Vec<DatasetRecord> = rows.into_iter().map(|r| r.record).collect();

    let outcome = pipeline.run_batch(&instances, config.run.parallelism);

    let judged = outcome
        .successes()
        .map(|(i, j)| JudgmentRecord::from_judgments(&instances[i].query_id, j));
    write_atomic(&args.output, to_jsonl(judged).as_bytes())
        .with_context(|| format!("writing {}", args.output.display()))?;

    let failures: Vec<FailedInstance> = outcome
        .errors()
        .map(|e| FailedInstance {
            query_id: &e.query_id,
            line: lines[e.index],
            error: e.error.to_string(),
        })
        .collect();
    let sidecar = errors_sidecar(&args.output);
    write_atomic(&sidecar, to_jsonl(&failures).as_bytes())
        .with_context(|| format!("writing {}", sidecar.display()))?;

    for f in &failures {
        writeln!(err, "query {} (line {}): {}", f.query_id, f.line, f.error)?;
    }
    writeln!(
        out,
        "judged {} of {} instances; {} failed",
        instances.len() - failures.len(),
        instances.len(),
        failures.len()
    )?;
    Ok(if failures.is_empty() {
        Exit::Success
    } else {
        Exit::Partial
    })
}
