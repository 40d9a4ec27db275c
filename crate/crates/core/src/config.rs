//! Run configuration shared by the command-line tool and the examples.

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval::Hyper;
use crate::operators::{ExternalProposer, ExternalProposerConfig, LexiconProposer, Proposer, ProposerError};
use crate::strategies::{
    AugmentationConfig, ConfigError, EmbedError, Embedder, ExternalEmbedder, ExternalEmbedderConfig, ProposerSpec,
    TrigramEmbedder,
};

#[derive(Debug, Error)]
pub enum RunConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid TOML config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("invalid JSON config: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Augmentation(#[from] ConfigError),
    #[error("{field}: {path} does not exist")]
    MissingPath { field: &'static str, path: PathBuf },
    #[error("{field}: {path} is not a {expected}")]
    WrongKind {
        field: &'static str,
        path: PathBuf,
        expected: &'static str,
    },
    #[error("{0}")]
    Invalid(String),
}

/// Input and output locations. Every field is optional; stages that need a
/// missing path take it from the command line instead.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dataset: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nrc: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub se_words: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sentiwordnet: Option<PathBuf>,
    /// Directory holding previously built lexicon files.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lexicons: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub taxonomy: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// When set, overrides the augmentation and baseline seeds and is used
    /// as the split seed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub paths: Paths,
    pub augmentation: AugmentationConfig,
    pub baseline: Hyper,
    /// Root URL of the model service, e.g. `http://127.0.0.1:8080`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model_service: Option<String>,
    /// Use the service's `/embed` endpoint for the similarity gate.
    pub external_embedder: bool,
    /// Request timeout for the model service, in seconds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub service_timeout_secs: Option<u64>,
}

const DEFAULT_TIMEOUT: Duration = Duration::from_secs(10);

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

impl RunConfig {
    /// Reads TOML, or JSON when the file extension is `.json`. Does not
    /// validate paths.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, RunConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| RunConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if is_json(path) {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, RunConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn from_json(text: &str) -> Result<Self, RunConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes to TOML")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes to JSON")
    }

    pub fn split_seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// Augmentation block with the global seed applied and an external
    /// proposer with an empty URL pointed at `model_service`.
    pub fn augmentation(&self) -> AugmentationConfig {
        let mut cfg = self.augmentation.clone();
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let (ProposerSpec::External { url, .. }, Some(service)) = (&mut cfg.proposer, &self.model_service) {
            if url.is_empty() {
                url.clone_from(service);
            }
        }
        cfg
    }

    pub fn baseline(&self) -> Hyper {
        let mut h = self.baseline;
        if let Some(seed) = self.seed {
            h.seed = seed;
        }
        h
    }

    fn timeout(&self) -> Duration {
        self.service_timeout_secs.map_or(DEFAULT_TIMEOUT, Duration::from_secs)
    }

    /// Checks every referenced path and the service settings. Input paths
    /// must exist; `output_dir` must be a directory if it exists.
    pub fn validate(&self) -> Result<(), RunConfigError> {
        self.augmentation().validate()?;
        let p = &self.paths;
        let files = [
            ("paths.dataset", &p.dataset),
            ("paths.nrc", &p.nrc),
            ("paths.se_words", &p.se_words),
            ("paths.sentiwordnet", &p.sentiwordnet),
            ("paths.taxonomy", &p.taxonomy),
        ];
        for (field, path) in files {
            if let Some(path) = path {
                require(field, path, false)?;
            }
        }
        if let Some(dir) = &p.lexicons {
            require("paths.lexicons", dir, true)?;
        }
        if let Some(dir) = &p.output_dir {
            if dir.exists() && !dir.is_dir() {
                return Err(RunConfigError::WrongKind {
                    field: "paths.output_dir",
                    path: dir.clone(),
                    expected: "directory",
                });
            }
        }
        if let Some(url) = &self.model_service {
            check_url("model_service", url)?;
        } else if self.external_embedder {
            return Err(RunConfigError::Invalid("external_embedder requires model_service".into()));
        }
        if let ProposerSpec::External { url, .. } = &self.augmentation().proposer {
            if url.is_empty() {
                return Err(RunConfigError::Invalid(
                    "external proposer needs a url or model_service".into(),
                ));
            }
            check_url("augmentation.proposer.url", url)?;
        }
        Ok(())
    }

    pub fn proposer(&self) -> Result<Box<dyn Proposer>, ProposerError> {
        build_proposer(&self.augmentation().proposer, self.timeout())
    }

    pub fn embedder(&self) -> Result<Box<dyn Embedder>, EmbedError> {
        match (&self.model_service, self.external_embedder) {
            (Some(url), true) => Ok(Box::new(ExternalEmbedder::new(ExternalEmbedderConfig {
                url: url.clone(),
                timeout: self.timeout(),
                fallback: true,
            })?)),
            _ => Ok(Box::new(TrigramEmbedder)),
        }
    }
}

fn require(field: &'static str, path: &Path, dir: bool) -> Result<(), RunConfigError> {
    if !path.exists() {
        return Err(RunConfigError::MissingPath {
            field,
            path: path.to_path_buf(),
        });
    }
    if dir != path.is_dir() {
        return Err(RunConfigError::WrongKind {
            field,
            path: path.to_path_buf(),
            expected: if dir { "directory" } else { "file" },
        });
    }
    Ok(())
}

fn check_url(field: &str, url: &str) -> Result<(), RunConfigError> {
    match reqwest::Url::parse(url) {
        Ok(u) if matches!(u.scheme(), "http" | "https") => Ok(()),
        _ => Err(RunConfigError::Invalid(format!("{field}: '{url}' is not an http(s) URL"))),
    }
}

/// Proposer described by `spec`.
pub fn build_proposer(spec: &ProposerSpec, timeout: Duration) -> Result<Box<dyn Proposer>, ProposerError> {
    match spec {
        ProposerSpec::Lexicon => Ok(Box::new(LexiconProposer::default())),
        ProposerSpec::External { url, fallback, top_k } => Ok(Box::new(ExternalProposer::new(ExternalProposerConfig {
            url: url.clone(),
            top_k: *top_k,
            timeout,
            fallback: *fallback,
            ..ExternalProposerConfig::default()
        })?)),
    }
}
