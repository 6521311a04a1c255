//! Instance → judgment set, and bounded-parallel batches of instances.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;

use ragcheck_core::model::JudgmentParts;
use ragcheck_core::{Claim, ClaimSource, JudgmentSet, RagInstance};

use crate::backend::{
    check_claims, extract_claims, CheckRequest, ClaimExtractor, EntailmentChecker, ExtractRequest,
    Reference,
};
use crate::error::{InstanceError, PipelineError};

#[derive(Clone)]
pub struct Pipeline {
    extractor: Arc<dyn ClaimExtractor>,
    checker: Arc<dyn EntailmentChecker>,
}

impl Pipeline {
    pub fn new(extractor: Arc<dyn ClaimExtractor>, checker: Arc<dyn EntailmentChecker>) -> Self {
        Pipeline { extractor, checker }
    }

    fn entailed(
        &self,
        query_id: &str,
        claims: &[Claim],
        reference: Reference,
        reference_text: &str,
    ) -> Result<Vec<bool>, PipelineError> {
        let req = CheckRequest {
            query_id,
            claims,
            reference,
            reference_text,
        };
        Ok(check_claims(self.checker.as_ref(), &req)?
            .into_iter()
            .map(|l| l.is_entailed())
            .collect())
    }

    /// Extracts both claim lists and fills all four matrices. Each claim list is
    /// checked against the full answer text and against every chunk individually.
    pub fn judge_instance(&self, instance: &RagInstance) -> Result<JudgmentSet, PipelineError> {
        let qid = instance.query_id.as_str();
        let extract = |text: &str, source| {
            extract_claims(
                self.extractor.as_ref(),
                &ExtractRequest {
                    query_id: qid,
                    text,
                    source,
                },
            )
        };
        let response_claims = extract(&instance.response, ClaimSource::Response)?;
        let gt_claims = extract(&instance.gt_answer, ClaimSource::GroundTruth)?;

        let response_vs_gt = self.entailed(
            qid,
            &response_claims,
            Reference::GroundTruth,
            &instance.gt_answer,
        )?;
        let gt_vs_response =
            self.entailed(qid, &gt_claims, Reference::Response, &instance.response)?;

        let k = instance.retrieved.len();
        let mut response_vs_chunks = vec![Vec::with_capacity(k); response_claims.len()];
        let mut gt_vs_chunks = vec![Vec::with_capacity(k); gt_claims.len()];
        for (j, chunk) in instance.retrieved.iter().enumerate() {
            let column = self.entailed(qid, &response_claims, Reference::Chunk(j), &chunk.text)?;
            for (row, e) in response_vs_chunks.iter_mut().zip(column) {
                row.push(e);
            }
            let column = self.entailed(qid, &gt_claims, Reference::Chunk(j), &chunk.text)?;
            for (row, e) in gt_vs_chunks.iter_mut().zip(column) {
                row.push(e);
            }
        }

        Ok(JudgmentSet::try_from(JudgmentParts {
            response_claims,
            gt_claims,
            response_vs_gt,
            gt_vs_response,
            response_vs_chunks,
            gt_vs_chunks,
            k,
        })?)
    }

    /// Judges every instance using `parallelism` worker threads. Each worker has
    /// at most one backend call in flight, so remote concurrency never exceeds
    /// `parallelism`. Failures are collected per instance; output order matches input.
    pub fn run_batch(&self, instances: &[RagInstance], parallelism: usize) -> BatchOutcome {
        let workers = parallelism.max(1).min(instances.len().max(1));
        let next = AtomicUsize::new(0);
        let slots: Mutex<Vec<Option<Result<JudgmentSet, InstanceError>>>> =
            Mutex::new((0..instances.len()).map(|_| None).collect());

        thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    let Some(instance) = instances.get(i) else {
                        break;
                    };
                    let result = self.judge_instance(instance).map_err(|error| {
                        log::warn!("query {}: {error}", instance.query_id);
                        InstanceError {
                            index: i,
                            query_id: instance.query_id.clone(),
                            error,
                        }
                    });
                    slots.lock().expect("result slots poisoned")[i] = Some(result);
                });
            }
        });

        let results = slots
            .into_inner()
            .expect("result slots poisoned")
            .into_iter()
            .map(|r| r.expect("every instance is processed"))
            .collect();
        BatchOutcome { results }
    }
}

/// Per-instance results in input order.
pub struct BatchOutcome {
    pub results: Vec<Result<JudgmentSet, InstanceError>>,
}

impl BatchOutcome {
    pub fn successes(&self) -> impl Iterator<Item = (usize, &JudgmentSet)> {
        self.results
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.as_ref().ok().map(|j| (i, j)))
    }

    pub fn errors(&self) -> impl Iterator<Item = &InstanceError> {
        self.results.iter().filter_map(|r| r.as_ref().err())
    }

    pub fn n_errors(&self) -> usize {
        self.errors().count()
    }
}
