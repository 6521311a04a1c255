//! TOML run configuration.
//!
//! ```toml
//! [extractor]
//! kind = "remote_judge"
//!
//! [checker]
//! kind = "remote_judge"
//! per_claim = false
//!
//! [judge]
//! url = "http://localhost:8000/v1/chat/completions"
//! model = "llama3-70b"
//!
//! [run]
//! parallelism = 8
//! cache_dir = "cache"
//! ```
//!
//! Every section is optional. Relative paths resolve against the directory
//! holding the config file. The bearer token comes from `JUDGE_API_KEY`.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use anyhow::{Context, Result};
use ragcheck_core::records::RunMetadata;
use ragcheck_pipeline::{
    BackendSpec, BuildContext, CacheStore, HttpTransport, JudgeClient, JudgeSettings, Pipeline,
    Registry, RetryPolicy,
};
use serde::Deserialize;

pub const API_KEY_VAR: &str = "JUDGE_API_KEY";

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JudgeConfig {
    pub url: String,
    pub model: String,
    #[serde(default)]
    pub temperature: f64,
    #[serde(default = "default_max_tokens")]
    pub max_tokens: u32,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
}

fn default_max_tokens() -> u32 {
    2048
}

fn default_timeout() -> u64 {
    120
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub parallelism: usize,
    pub cache_dir: Option<PathBuf>,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            parallelism: 8,
            cache_dir: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub extractor: BackendSpec,
    pub checker: BackendSpec,
    pub judge: Option<JudgeConfig>,
    pub run: RunSection,
    pub retry: RetryPolicy,
    pub metadata: RunMetadata,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            extractor: BackendSpec::new("sentence"),
            checker: BackendSpec::new("lexical"),
            judge: None,
            run: RunSection::default(),
            retry: RetryPolicy::default(),
            metadata: RunMetadata::default(),
            base_dir: PathBuf::from("."),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut config: RunConfig = toml::from_str(text)?;
        config.base_dir = base_dir.to_path_buf();
        if let Some(dir) = &config.run.cache_dir {
            config.run.cache_dir = Some(config.resolve(dir));
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("{}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base).with_context(|| format!("{}", path.display()))
    }

    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    fn judge_client(&self) -> Result<Option<Arc<JudgeClient>>> {
        let Some(j) = &self.judge else {
            return Ok(None);
        };
        let api_key = std::env::var(API_KEY_VAR).ok().filter(|k| !k.is_empty());
        let transport = HttpTransport::new(&j.url, api_key, Duration::from_secs(j.timeout_secs));
        let settings = JudgeSettings {
            model: j.model.clone(),
            temperature: j.temperature,
            max_tokens: j.max_tokens,
        };
        let mut client =
            JudgeClient::new(Arc::new(transport), settings).with_retry(self.retry.clone());
        if let Some(dir) = &self.run.cache_dir {
            client = client.with_cache(CacheStore::open(dir)?);
        }
        Ok(Some(Arc::new(client)))
    }

    pub fn build_pipeline(&self, registry: &Registry) -> Result<Pipeline> {
        let ctx = BuildContext {
            base_dir: self.base_dir.clone(),
            judge: self.judge_client()?,
        };
        let extractor = registry.build_extractor(&self.extractor, &ctx)?;
        let checker = registry.build_checker(&self.checker, &ctx)?;
        Ok(Pipeline::new(extractor, checker))
    }
}
