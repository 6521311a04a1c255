//! Name → factory registry for extractor and checker strategies.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::backend::{ClaimExtractor, EntailmentChecker};
use crate::error::PipelineError;
use crate::fixture::{FixtureChecker, FixtureExtractor, FixtureStore};
use crate::judge::JudgeClient;
use crate::lexical::LexicalChecker;
use crate::remote::{RemoteChecker, RemoteExtractor};
use crate::sentence::SentenceExtractor;

/// A backend selection from configuration: `kind` plus kind-specific options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendSpec {
    pub kind: String,
    #[serde(flatten)]
    pub options: Map<String, Value>,
}

impl BackendSpec {
    pub fn new(kind: impl Into<String>) -> Self {
        BackendSpec {
            kind: kind.into(),
            options: Map::new(),
        }
    }

    pub fn with_option(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.options.insert(key.to_string(), value.into());
        self
    }

    pub fn str_option(&self, key: &str) -> Option<&str> {
        self.options.get(key).and_then(Value::as_str)
    }

    pub fn bool_option(&self, key: &str) -> Option<bool> {
        self.options.get(key).and_then(Value::as_bool)
    }
}

/// Shared resources available to factories.
#[derive(Clone, Default)]
pub struct BuildContext {
    /// Relative paths in options resolve against this directory.
    pub base_dir: PathBuf,
    pub judge: Option<Arc<JudgeClient>>,
}

impl BuildContext {
    fn resolve(&self, p: &str) -> PathBuf {
        let p = Path::new(p);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    fn judge(&self, kind: &str) -> Result<Arc<JudgeClient>, PipelineError> {
        self.judge
            .clone()
            .ok_or_else(|| PipelineError::Config(format!("{kind} backend needs a [judge] section")))
    }

    fn fixture(&self, spec: &BackendSpec) -> Result<FixtureStore, PipelineError> {
        let path = spec
            .str_option("path")
            .ok_or_else(|| PipelineError::Config("fixture backend needs `path`".into()))?;
        FixtureStore::load(&self.resolve(path))
    }
}

pub type ExtractorFactory =
    fn(&BackendSpec, &BuildContext) -> Result<Arc<dyn ClaimExtractor>, PipelineError>;
pub type CheckerFactory =
    fn(&BackendSpec, &BuildContext) -> Result<Arc<dyn EntailmentChecker>, PipelineError>;

pub struct Registry {
    extractors: BTreeMap<String, ExtractorFactory>,
    checkers: BTreeMap<String, CheckerFactory>,
}

impl Default for Registry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl Registry {
    pub fn empty() -> Self {
        Registry {
            extractors: BTreeMap::new(),
            checkers: BTreeMap::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register_extractor("fixture", |spec, ctx| {
            Ok(Arc::new(FixtureExtractor::new(ctx.fixture(spec)?)))
        });
        r.register_extractor("sentence", |_, _| Ok(Arc::new(SentenceExtractor)));
        r.register_extractor("remote_judge", |spec, ctx| {
            Ok(Arc::new(RemoteExtractor::new(ctx.judge(&spec.kind)?)))
        });
        r.register_checker("fixture", |spec, ctx| {
            Ok(Arc::new(FixtureChecker::new(ctx.fixture(spec)?)))
        });
        r.register_checker("lexical", |_, _| Ok(Arc::new(LexicalChecker)));
        r.register_checker("remote_judge", |spec, ctx| {
            let per_claim = spec.bool_option("per_claim").unwrap_or(false);
            Ok(Arc::new(RemoteChecker::new(
                ctx.judge(&spec.kind)?,
                per_claim,
            )))
        });
        r
    }

    pub fn register_extractor(&mut self, name: &str, factory: ExtractorFactory) {
        self.extractors.insert(name.to_string(), factory);
    }

    pub fn register_checker(&mut self, name: &str, factory: CheckerFactory) {
        self.checkers.insert(name.to_string(), factory);
    }

    pub fn extractor_names(&self) -> impl Iterator<Item = &str> {
        self.extractors.keys().map(String::as_str)
    }

    pub fn checker_names(&self) -> impl Iterator<Item = &str> {
        self.checkers.keys().map(String::as_str)
    }

    pub fn build_extractor(
        &self,
        spec: &BackendSpec,
        ctx: &BuildContext,
    ) -> Result<Arc<dyn ClaimExtractor>, PipelineError> {
        let factory = self.extractors.get(&spec.kind).ok_or_else(|| {
            PipelineError::Config(format!(
                "unknown extractor {:?} (available: {})",
                spec.kind,
                self.extractor_names().collect::<Vec<_>>().join(", ")
            ))
        })?;
        factory(spec, ctx)
    }

    pub fn build_checker(
        &self,
        spec: &BackendSpec,
        ctx: &BuildContext,
    ) -> Result<Arc<dyn EntailmentChecker>, PipelineError> {
        let factory = self.checkers.get(&spec.kind).ok_or_else(|| {
            PipelineError::Config(format!(
                "unknown checker {:?} (available: {})",
                spec.kind,
                self.checker_names().collect::<Vec<_>>().join(", ")
            ))
        })?;
        factory(spec, ctx)
    }
}
