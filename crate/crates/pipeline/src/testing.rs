//! Mock judges for tests: an in-process [`Transport`] and an HTTP server
//! wrapping it. The mock answers extraction prompts by sentence splitting and
//! check prompts by lexical containment, counts every request, and can inject
//! transient 5xx failures or permanently malformed replies.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::Duration;

use crate::error::PipelineError;
use crate::judge::prompt::{CLAIMS_HEADER, REFERENCE_HEADER, TEXT_HEADER};
use crate::judge::{ChatRequest, ChatResponse, Transport, Usage};
use crate::lexical::lexically_entailed;
use crate::sentence::split_sentences;

#[derive(Debug, Default)]
pub struct Counters {
    pub requests: AtomicUsize,
    pub extract_requests: AtomicUsize,
    pub check_requests: AtomicUsize,
    pub injected_failures: AtomicUsize,
    pub malformed_replies: AtomicUsize,
    in_flight: AtomicUsize,
    pub max_in_flight: AtomicUsize,
}

impl Counters {
    pub fn requests(&self) -> usize {
        self.requests.load(Ordering::SeqCst)
    }
    pub fn check_requests(&self) -> usize {
        self.check_requests.load(Ordering::SeqCst)
    }
    pub fn extract_requests(&self) -> usize {
        self.extract_requests.load(Ordering::SeqCst)
    }
    pub fn injected_failures(&self) -> usize {
        self.injected_failures.load(Ordering::SeqCst)
    }
    pub fn max_in_flight(&self) -> usize {
        self.max_in_flight.load(Ordering::SeqCst)
    }
}

#[derive(Default)]
pub struct MockJudge {
    fail_per_mille: u64,
    seed: u64,
    malformed_markers: Vec<String>,
    delay: Duration,
    attempts: Mutex<HashMap<u64, u32>>,
    pub counters: Counters,
}

fn hash_of(v: impl Hash) -> u64 {
    let mut h = DefaultHasher::new();
    v.hash(&mut h);
    h.finish()
}

/// Error reply from the mock: HTTP status plus body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MockFailure {
    pub status: u16,
    pub body: String,
}

impl MockJudge {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fails each attempt with probability `rate`. The decision is a hash of
    /// (request content, attempt number, seed), so it does not depend on
    /// thread scheduling.
    pub fn with_failure_rate(mut self, rate: f64, seed: u64) -> Self {
        self.fail_per_mille = (rate * 1000.0).round() as u64;
        self.seed = seed;
        self
    }

    /// Any prompt containing `marker` gets an unparseable reply, every time.
    pub fn with_malformed_marker(mut self, marker: impl Into<String>) -> Self {
        self.malformed_markers.push(marker.into());
        self
    }

    pub fn with_delay(mut self, delay: Duration) -> Self {
        self.delay = delay;
        self
    }

    pub fn respond(&self, request: &ChatRequest) -> Result<ChatResponse, MockFailure> {
        let c = &self.counters;
        c.requests.fetch_add(1, Ordering::SeqCst);
        let now = c.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
        c.max_in_flight.fetch_max(now, Ordering::SeqCst);
        if !self.delay.is_zero() {
            thread::sleep(self.delay);
        }
        let out = self.answer(request);
        c.in_flight.fetch_sub(1, Ordering::SeqCst);
        out
    }

    fn answer(&self, request: &ChatRequest) -> Result<ChatResponse, MockFailure> {
        let c = &self.counters;
        let prompt = request
            .messages
            .iter()
            .rev()
            .find(|m| m.role == "user")
            .map(|m| m.content.as_str())
            .unwrap_or_default();

        if self.fail_per_mille > 0 {
            let key = hash_of(prompt);
            let attempt = {
                let mut attempts = self.attempts.lock().unwrap();
                let a = attempts.entry(key).or_insert(0);
                *a += 1;
                *a
            };
            if hash_of((key, attempt, self.seed)) % 1000 < self.fail_per_mille {
                c.injected_failures.fetch_add(1, Ordering::SeqCst);
                return Err(MockFailure {
                    status: 503,
                    body: "injected failure".into(),
                });
            }
        }

        if self
            .malformed_markers
            .iter()
            .any(|m| prompt.contains(m.as_str()))
        {
            c.malformed_replies.fetch_add(1, Ordering::SeqCst);
            return Ok(ChatResponse::text("I am not able to help with that."));
        }

        let content = if let Some((_, text)) = prompt.split_once(&format!("\n{TEXT_HEADER}\n")) {
            c.extract_requests.fetch_add(1, Ordering::SeqCst);
            let claims = split_sentences(text);
            if claims.is_empty() {
                "NONE".to_string()
            } else {
                claims
                    .iter()
                    .map(|s| format!("- {s}"))
                    .collect::<Vec<_>>()
                    .join("\n")
            }
        } else if let Some((_, rest)) = prompt.split_once(&format!("\n{REFERENCE_HEADER}\n")) {
            c.check_requests.fetch_add(1, Ordering::SeqCst);
            let (reference, claims) = rest
                .rsplit_once(&format!("\n\n{CLAIMS_HEADER}\n"))
                .ok_or_else(|| MockFailure {
                    status: 400,
                    body: "check prompt without claims".into(),
                })?;
            claims
                .lines()
                .map(|line| {
                    let claim = line.split_once(". ").map_or(line, |(_, c)| c);
                    if lexically_entailed(claim, reference) {
                        "Entailment"
                    } else {
                        "Neutral"
                    }
                })
                .collect::<Vec<_>>()
                .join("\n")
        } else {
            return Err(MockFailure {
                status: 400,
                body: "unrecognized prompt".into(),
            });
        };
        let mut response = ChatResponse::text(content);
        response.usage = Some(Usage {
            prompt_tokens: prompt.split_whitespace().count() as u64,
            completion_tokens: 1,
            total_tokens: prompt.split_whitespace().count() as u64 + 1,
        });
        Ok(response)
    }
}

impl Transport for MockJudge {
    fn send(&self, request: &ChatRequest) -> Result<ChatResponse, PipelineError> {
        self.respond(request).map_err(|f| PipelineError::Transport {
            message: format!("HTTP {}: {}", f.status, f.body),
            status: Some(f.status),
            retriable: f.status >= 500,
        })
    }
}

/// Serves a [`MockJudge`] over HTTP on an ephemeral localhost port.
pub struct MockJudgeServer {
    pub judge: Arc<MockJudge>,
    server: Arc<tiny_http::Server>,
    workers: Vec<JoinHandle<()>>,
    last_auth: Arc<Mutex<Option<String>>>,
    url: String,
}

impl MockJudgeServer {
    pub fn start(judge: MockJudge) -> Self {
        let server = Arc::new(tiny_http::Server::http("127.0.0.1:0").expect("bind mock judge"));
        let port = server.server_addr().to_ip().expect("tcp listener").port();
        let judge = Arc::new(judge);
        let last_auth = Arc::new(Mutex::new(None));
        let workers = (0..16)
            .map(|_| {
                let server = Arc::clone(&server);
                let judge = Arc::clone(&judge);
                let last_auth = Arc::clone(&last_auth);
                thread::spawn(move || {
                    while let Ok(mut req) = server.recv() {
                        if let Some(h) = req
                            .headers()
                            .iter()
                            .find(|h| h.field.equiv("Authorization"))
                        {
                            *last_auth.lock().unwrap() = Some(h.value.to_string());
                        }
                        let mut body = String::new();
                        let _ = req.as_reader().read_to_string(&mut body);
                        let (status, payload) = match serde_json::from_str::<ChatRequest>(&body) {
                            Err(e) => (400, format!("bad request: {e}")),
                            Ok(chat) => match judge.respond(&chat) {
                                Ok(r) => (200, serde_json::to_string(&r).unwrap()),
                                Err(f) => (f.status, f.body),
                            },
                        };
                        let header = tiny_http::Header::from_bytes(
                            &b"Content-Type"[..],
                            &b"application/json"[..],
                        )
                        .unwrap();
                        let _ = req.respond(
                            tiny_http::Response::from_string(payload)
                                .with_status_code(status)
                                .with_header(header),
                        );
                    }
                })
            })
            .collect();
        MockJudgeServer {
            judge,
            server,
            workers,
            last_auth,
            url: format!("http://127.0.0.1:{port}/v1/chat/completions"),
        }
    }

    pub fn url(&self) -> &str {
        &self.url
    }

    pub fn last_authorization(&self) -> Option<String> {
        self.last_auth.lock().unwrap().clone()
    }
}

impl Drop for MockJudgeServer {
    fn drop(&mut self) {
        for _ in &self.workers {
            self.server.unblock();
        }
        for w in self.workers.drain(..) {
            let _ = w.join();
        }
    }
}
