//! On-disk response cache: one file per key, named by the lowercase hex SHA-256
//! of the request content, holding the serialized [`JudgeResponse`].

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::JudgeResponse;
use crate::error::PipelineError;

/// Content that identifies a judge response.
#[derive(Debug, Clone, Copy)]
pub struct CacheKey<'a> {
    pub backend: &'a str,
    pub model: &'a str,
    pub template_version: &'a str,
    pub input: &'a str,
    pub reference: &'a str,
}

impl CacheKey<'_> {
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for part in [
            self.backend,
            self.model,
            self.template_version,
            self.input,
            self.reference,
        ] {
            // length prefix keeps ("ab", "c") and ("a", "bc") apart
            h.update((part.len() as u64).to_le_bytes());
            h.update(part.as_bytes());
        }
        hex::encode(h.finalize())
    }
}

#[derive(Debug, Clone)]
pub struct CacheStore {
    dir: PathBuf,
}

impl CacheStore {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, PipelineError> {
        let dir = dir.into();
        fs::create_dir_all(&dir)
            .map_err(|e| PipelineError::Cache(format!("{}: {e}", dir.display())))?;
        Ok(CacheStore { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, digest: &str) -> PathBuf {
        self.dir.join(digest)
    }

    pub fn get_bytes(&self, digest: &str) -> Option<Vec<u8>> {
        fs::read(self.path_for(digest)).ok()
    }

    /// A corrupt entry is treated as a miss and overwritten on the next store.
    pub fn get(&self, digest: &str) -> Option<JudgeResponse> {
        let bytes = self.get_bytes(digest)?;
        match serde_json::from_slice(&bytes) {
            Ok(r) => Some(r),
            Err(e) => {
                log::warn!("ignoring corrupt cache entry {digest}: {e}");
                None
            }
        }
    }

    /// Atomic write-then-rename, so readers never observe a partial file.
    pub fn put(&self, digest: &str, response: &JudgeResponse) -> Result<(), PipelineError> {
        let bytes = serde_json::to_vec(response)
            .map_err(|e| PipelineError::Cache(format!("serialize: {e}")))?;
        self.write_atomic(digest, &bytes)
            .map_err(|e| PipelineError::Cache(format!("{digest}: {e}")))
    }

    fn write_atomic(&self, digest: &str, bytes: &[u8]) -> io::Result<()> {
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(bytes)?;
        tmp.as_file().sync_all()?;
        tmp.persist(self.path_for(digest)).map_err(|e| e.error)?;
        Ok(())
    }
}
