use std::collections::HashMap;
use std::sync::{Arc, LazyLock, Mutex};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use reqwest::blocking::{Client, Response};
use reqwest::header::{HeaderMap, ACCEPT, AUTHORIZATION, USER_AGENT};
use reqwest::{StatusCode, Url};
use serde::Deserialize;
use thiserror::Error;

use super::{preprocess_text, CorpusError, Dataset, Source, SourceKind, Utterance};

/// Environment variable holding the API token.
pub const TOKEN_ENV: &str = "EMOAUG_TOKEN";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommentKind {
    Issues,
    Pulls,
}

impl CommentKind {
    fn segment(self) -> &'static str {
        match self {
            CommentKind::Issues => "issues",
            CommentKind::Pulls => "pulls",
        }
    }

    fn id_prefix(self) -> &'static str {
        match self {
            CommentKind::Issues => "issue",
            CommentKind::Pulls => "pull",
        }
    }

    fn source_kind(self) -> SourceKind {
        match self {
            CommentKind::Issues => SourceKind::Issue,
            CommentKind::Pulls => SourceKind::PullRequest,
        }
    }
}

impl std::str::FromStr for CommentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "issues" => Ok(CommentKind::Issues),
            "pulls" => Ok(CommentKind::Pulls),
            other => Err(format!("unknown comment kind '{other}' (expected issues|pulls)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FetchConfig {
    pub api_base: String,
    pub per_page: u32,
    /// Rate-limit waits tolerated before giving up.
    pub max_rate_limit_waits: u32,
    /// Upper bound on a single rate-limit sleep.
    pub max_wait: Duration,
    pub timeout: Duration,
}

impl Default for FetchConfig {
    fn default() -> Self {
        Self {
            api_base: "https://api.github.com".into(),
            per_page: 100,
            max_rate_limit_waits: 3,
            max_wait: Duration::from_secs(3600),
            timeout: Duration::from_secs(30),
        }
    }
}

pub trait Sleeper: Send + Sync {
    fn sleep(&self, duration: Duration);
}

struct ThreadSleeper;

impl Sleeper for ThreadSleeper {
    fn sleep(&self, duration: Duration) {
        std::thread::sleep(duration);
    }
}

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("authentication failed (HTTP {status}): {message}")]
    Auth { status: u16, message: String },
    #[error("rate limit still exhausted after {waits} waits; fetched {fetched} comments before aborting")]
    RateLimited { waits: u32, fetched: usize, partial: Dataset },
    #[error("unexpected HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("transport error: {0}")]
    Transport(String),
    #[error("malformed response: {0}")]
    Protocol(String),
    #[error("invalid repository '{0}' (expected owner/name)")]
    InvalidRepo(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

#[derive(Debug, Deserialize)]
struct ApiComment {
    id: u64,
    #[serde(default)]
    body: Option<String>,
    #[serde(default)]
    created_at: Option<String>,
}

static IN_FLIGHT: LazyLock<Mutex<HashMap<String, Arc<Mutex<()>>>>> = LazyLock::new(Default::default);

/// Blocking client for repository comment listings.
pub struct FetchClient {
    http: Client,
    config: FetchConfig,
    sleeper: Box<dyn Sleeper>,
}

impl FetchClient {
    pub fn new(config: FetchConfig) -> Result<Self, FetchError> {
        let http = Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| FetchError::Transport(e.to_string()))?;
        Ok(Self {
            http,
            config,
            sleeper: Box::new(ThreadSleeper),
        })
    }

    pub fn with_sleeper(mut self, sleeper: impl Sleeper + 'static) -> Self {
        self.sleeper = Box::new(sleeper);
        self
    }

    /// Fetches up to `limit` of the most recent comments as unlabeled
    /// utterances, newest first.
    pub fn fetch_comments(&self, repo: &str, kind: CommentKind, limit: usize, token: &str) -> Result<Dataset, FetchError> {
        let (owner, name) = repo
            .split_once('/')
            .filter(|(o, n)| !o.is_empty() && !n.is_empty() && !n.contains('/'))
            .ok_or_else(|| FetchError::InvalidRepo(repo.to_string()))?;
        let provenance = format!("{}/repos/{repo}/{}/comments?limit={limit}", self.config.api_base, kind.segment());
        if limit == 0 {
            return Ok(Dataset::new(Vec::new(), provenance)?);
        }

        let gate = {
            let mut map = IN_FLIGHT.lock().unwrap_or_else(|e| e.into_inner());
            map.entry(repo.to_string()).or_default().clone()
        };
        let _guard = gate.lock().unwrap_or_else(|e| e.into_inner());

        let endpoint = format!(
            "{}/repos/{owner}/{name}/{}/comments",
            self.config.api_base.trim_end_matches('/'),
            kind.segment()
        );
        let per_page = (self.config.per_page.max(1) as usize).min(limit).min(100);
        let mut fetched: Vec<ApiComment> = Vec::new();
        let mut waits = 0u32;
        let mut page = 1u32;

        while fetched.len() < limit {
            let url = Url::parse_with_params(
                &endpoint,
                &[
                    ("sort", "created".to_string()),
                    ("direction", "desc".to_string()),
                    ("per_page", per_page.to_string()),
                    ("page", page.to_string()),
                ],
            )
            .map_err(|e| FetchError::Protocol(e.to_string()))?;

            let mut request = self
                .http
                .get(url)
                .header(ACCEPT, "application/vnd.github+json")
                .header(USER_AGENT, concat!("emoaug/", env!("CARGO_PKG_VERSION")));
            if !token.is_empty() {
                request = request.header(AUTHORIZATION, format!("Bearer {token}"));
            }
            let response = request.send().map_err(|e| FetchError::Transport(e.to_string()))?;
            let status = response.status();

            if let Some(wait) = rate_limit_wait(status, response.headers()) {
                if waits >= self.config.max_rate_limit_waits {
                    let partial = to_dataset(fetched, repo, kind, limit, provenance)?;
                    return Err(FetchError::RateLimited {
                        waits,
                        fetched: partial.len(),
                        partial,
                    });
                }
                waits += 1;
                log::warn!("rate limited on {repo}; sleeping {}s (wait {waits})", wait.as_secs());
                self.sleeper.sleep(wait.min(self.config.max_wait));
                continue;
            }
            if status == StatusCode::UNAUTHORIZED || status == StatusCode::FORBIDDEN {
                return Err(FetchError::Auth {
                    status: status.as_u16(),
                    message: body_text(response),
                });
            }
            if !status.is_success() {
                return Err(FetchError::Status {
                    status: status.as_u16(),
                    body: body_text(response),
                });
            }

            let batch: Vec<ApiComment> = response.json().map_err(|e| FetchError::Protocol(e.to_string()))?;
            let done = batch.len() < per_page;
            fetched.extend(batch);
            if done {
                break;
            }
            page += 1;
        }

        to_dataset(fetched, repo, kind, limit, provenance)
    }
}

fn body_text(response: Response) -> String {
    let text = response.text().unwrap_or_default();
    text.lines().next().unwrap_or_default().chars().take(200).collect()
}

/// How long to sleep if this response signals an exhausted rate limit.
fn rate_limit_wait(status: StatusCode, headers: &HeaderMap) -> Option<Duration> {
    let header = |name: &str| headers.get(name).and_then(|v| v.to_str().ok()).map(str::trim);
    let exhausted = header("x-ratelimit-remaining") == Some("0");
    let limited = status == StatusCode::TOO_MANY_REQUESTS
        || (status == StatusCode::FORBIDDEN && (exhausted || header("retry-after").is_some()));
    if !limited {
        return None;
    }
    if let Some(secs) = header("retry-after").and_then(|v| v.parse::<u64>().ok()) {
        return Some(Duration::from_secs(secs));
    }
    let now = SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default().as_secs();
    let reset = header("x-ratelimit-reset").and_then(|v| v.parse::<u64>().ok()).unwrap_or(now + 60);
    Some(Duration::from_secs(reset.saturating_sub(now)))
}

fn to_dataset(
    mut comments: Vec<ApiComment>,
    repo: &str,
    kind: CommentKind,
    limit: usize,
    provenance: String,
) -> Result<Dataset, FetchError> {
    // ISO-8601 timestamps sort lexicographically; the sort is stable so
    // server order breaks ties.
    comments.sort_by(|a, b| b.created_at.cmp(&a.created_at));
    comments.truncate(limit);
    let instances = comments
        .into_iter()
        .map(|c| {
            let raw_text = c.body.unwrap_or_default();
            Utterance {
                id: format!("{}-{}", kind.id_prefix(), c.id),
                masked_text: preprocess_text(&raw_text),
                raw_text,
                labels: Default::default(),
                secondary_labels: None,
                source: Some(Source {
                    repo: repo.to_string(),
                    kind: kind.source_kind(),
                }),
            }
        })
        .collect();
    Ok(Dataset::new(instances, provenance)?)
}

/// Fetches with the default configuration against the public API.
pub fn fetch_comments(repo: &str, kind: CommentKind, limit: usize, token: &str) -> Result<Dataset, FetchError> {
    FetchClient::new(FetchConfig::default())?.fetch_comments(repo, kind, limit, token)
}
