//! Run configuration files and the resolved-config echo.
//!
//! A run config is a TOML document; every key is optional and falls back to
//! the standard analysis default. Relative paths are resolved against the
//! directory holding the config file. Command-line flags override the file.
//!
//! ```toml
//! actors = "actors.csv"
//! posts = "posts.jsonl"
//! stopwords = "stopwords.txt"      # default: built-in English list
//! url_map = "urls.csv"             # optional short -> expanded URL map
//! layers = ["co_retweet", "co_url", "co_hashtag", "fast_retweet", "text", "retweet", "reply"]
//! fast_retweet_window_seconds = 10
//! fast_retweet_key = "tweet_id"    # or "source_account"
//! min_text_tokens = 4
//! alpha = 0.05
//! interaction_mode = "pooled"      # or "directional"
//! exact_test_cap = 2000000
//! posting_cap = 10000
//! strict = false
//! out = "out"
//! threads = 8
//! ```

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use cotrace_core::interactions::InteractionMode;
use cotrace_core::pipeline::RunConfig;
use cotrace_core::similarity::DEFAULT_POSTING_CAP;
use cotrace_core::stats::DEFAULT_EXACT_CAP;
use cotrace_core::traces::{FastRetweetKey, TraceOptions};
use cotrace_core::Layer;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::formats;

/// Contents of a run config file; `None` means "use the default".
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub actors: Option<PathBuf>,
    pub posts: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub url_map: Option<PathBuf>,
    #[serde(alias = "traces")]
    pub layers: Option<Vec<String>>,
    pub fast_retweet_window_seconds: Option<i64>,
    pub fast_retweet_key: Option<FastRetweetKey>,
    pub min_text_tokens: Option<usize>,
    pub alpha: Option<f64>,
    pub interaction_mode: Option<InteractionMode>,
    pub exact_test_cap: Option<u64>,
    pub posting_cap: Option<usize>,
    pub strict: Option<bool>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl ConfigFile {
    /// Loads a config file, resolving relative paths against its directory.
    pub fn load(path: &Path) -> Result<ConfigFile> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: ConfigFile = toml::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {}", path.display(), e.message())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut cfg.actors,
            &mut cfg.posts,
            &mut cfg.stopwords,
            &mut cfg.url_map,
            &mut cfg.out,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    /// Fills unset keys from `fallback` (used for command-line overrides:
    /// `flags.or(file)`).
    pub fn or(self, fallback: ConfigFile) -> ConfigFile {
        ConfigFile {
            actors: self.actors.or(fallback.actors),
            posts: self.posts.or(fallback.posts),
            stopwords: self.stopwords.or(fallback.stopwords),
            url_map: self.url_map.or(fallback.url_map),
            layers: self.layers.or(fallback.layers),
            fast_retweet_window_seconds: self
                .fast_retweet_window_seconds
                .or(fallback.fast_retweet_window_seconds),
            fast_retweet_key: self.fast_retweet_key.or(fallback.fast_retweet_key),
            min_text_tokens: self.min_text_tokens.or(fallback.min_text_tokens),
            alpha: self.alpha.or(fallback.alpha),
            interaction_mode: self.interaction_mode.or(fallback.interaction_mode),
            exact_test_cap: self.exact_test_cap.or(fallback.exact_test_cap),
            posting_cap: self.posting_cap.or(fallback.posting_cap),
            strict: self.strict.or(fallback.strict),
            out: self.out.or(fallback.out),
            threads: self.threads.or(fallback.threads),
        }
    }
}

/// The fully resolved parameters of a run, written verbatim into
/// `run_summary.toml`. Its SHA-256 is stamped on every output table.
///
/// The output directory and thread count are deliberately absent: neither
/// changes any result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedConfig {
    pub actors: String,
    pub posts: String,
    /// Path of the stopword list, or `builtin`.
    pub stopwords: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub url_map: Option<String>,
    pub layers: Vec<Layer>,
    pub fast_retweet_window_seconds: i64,
    pub fast_retweet_key: FastRetweetKey,
    pub min_text_tokens: usize,
    pub alpha: f64,
    pub test: &'static str,
    pub alternative: &'static str,
    pub candidate_rule: &'static str,
    pub correction: &'static str,
    pub interaction_mode: InteractionMode,
    pub exact_test_cap: u64,
    pub posting_cap: usize,
    pub strict: bool,
}

pub const TEST_NAME: &str = "mann_whitney_u";
pub const ALTERNATIVE: &str = "greater";
pub const CANDIDATE_RULE: &str = "effect > 0.5";
pub const CORRECTION: &str = "bonferroni";

/// A resolved config plus the parsed auxiliary inputs it points at.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub echo: ResolvedConfig,
    pub actors: PathBuf,
    pub posts: PathBuf,
    pub run: RunConfig,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Resolved {
    /// Applies defaults and reads the stopword and URL map files.
    ///
    /// Fails with `INVALID_CONFIG` when the inputs are missing or a value is
    /// out of range.
    pub fn from_file(cfg: ConfigFile) -> Result<Resolved> {
        let actors = cfg
            .actors
            .ok_or_else(|| Error::Config("no actors file given (--actors or `actors`)".into()))?;
        let posts = cfg
            .posts
            .ok_or_else(|| Error::Config("no posts file given (--posts or `posts`)".into()))?;
        let layers: BTreeSet<Layer> = match &cfg.layers {
            None => Layer::ALL.into_iter().collect(),
            Some(names) => names
                .iter()
                .map(|n| {
                    Layer::parse(&n.trim().to_ascii_lowercase())
                        .ok_or_else(|| Error::Config(format!("unknown layer `{n}` in `layers`")))
                })
                .collect::<Result<_>>()?,
        };
        if layers.is_empty() {
            return Err(Error::Config("`layers` is empty".into()));
        }
        let alpha = cfg.alpha.unwrap_or(0.05);
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Config(format!(
                "`alpha` = {alpha} is outside (0, 1)"
            )));
        }
        let window = cfg.fast_retweet_window_seconds.unwrap_or(10);
        if window < 0 {
            return Err(Error::Config(
                "`fast_retweet_window_seconds` is negative".into(),
            ));
        }
        let posting_cap = cfg.posting_cap.unwrap_or(DEFAULT_POSTING_CAP);
        if posting_cap == 0 {
            return Err(Error::Config("`posting_cap` must be positive".into()));
        }
        if cfg.threads == Some(0) {
            return Err(Error::Config("`threads` must be positive".into()));
        }

        let mut traces = TraceOptions {
            fast_retweet_window_seconds: window,
            fast_retweet_key: cfg.fast_retweet_key.unwrap_or_default(),
            min_text_tokens: cfg.min_text_tokens.unwrap_or(4),
            ..TraceOptions::default()
        };
        if let Some(p) = &cfg.stopwords {
            traces.stopwords = formats::parse_stopwords(p)?;
        }
        if let Some(p) = &cfg.url_map {
            traces.url_expansions = formats::parse_url_map(p)?;
        }
        let run = RunConfig {
            layers,
            traces,
            alpha,
            interaction_mode: cfg.interaction_mode.unwrap_or_default(),
            exact_test_cap: cfg.exact_test_cap.unwrap_or(DEFAULT_EXACT_CAP),
            posting_cap,
        };
        let echo = ResolvedConfig {
            actors: actors.display().to_string(),
            posts: posts.display().to_string(),
            stopwords: cfg
                .stopwords
                .as_ref()
                .map_or_else(|| "builtin".to_string(), |p| p.display().to_string()),
            url_map: cfg.url_map.as_ref().map(|p| p.display().to_string()),
            layers: run.layers.iter().copied().collect(),
            fast_retweet_window_seconds: run.traces.fast_retweet_window_seconds,
            fast_retweet_key: run.traces.fast_retweet_key,
            min_text_tokens: run.traces.min_text_tokens,
            alpha: run.alpha,
            test: TEST_NAME,
            alternative: ALTERNATIVE,
            candidate_rule: CANDIDATE_RULE,
            correction: CORRECTION,
            interaction_mode: run.interaction_mode,
            exact_test_cap: run.exact_test_cap,
            posting_cap: run.posting_cap,
            strict: cfg.strict.unwrap_or(false),
        };
        Ok(Resolved {
            echo,
            actors,
            posts,
            run,
            out: cfg.out,
            threads: cfg.threads,
        })
    }

    /// TOML rendering of the echo.
    pub fn echo_toml(&self) -> String {
        toml::to_string(&self.echo).expect("config echo serializes")
    }

    /// SHA-256 of [`Resolved::echo_toml`], lowercase hex.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.echo_toml().as_bytes()))
    }
}
