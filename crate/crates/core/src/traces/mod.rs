//! Per-actor feature multisets for the five behavioral traces.

mod text;
mod url;

pub use text::{default_stopwords, is_emoji, preprocess_text, DEFAULT_STOPWORDS, EMOJI_RANGES};
pub use url::url_domain;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::ingest::{Dataset, Post, PostKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum TraceKind {
    CoRetweet,
    CoUrl,
    CoHashtag,
    FastRetweet,
    Text,
}

impl TraceKind {
    pub const ALL: [TraceKind; 5] = [
        TraceKind::CoRetweet,
        TraceKind::CoUrl,
        TraceKind::CoHashtag,
        TraceKind::FastRetweet,
        TraceKind::Text,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TraceKind::CoRetweet => "co_retweet",
            TraceKind::CoUrl => "co_url",
            TraceKind::CoHashtag => "co_hashtag",
            TraceKind::FastRetweet => "fast_retweet",
            TraceKind::Text => "text",
        }
    }

    pub fn parse(s: &str) -> Option<TraceKind> {
        TraceKind::ALL.into_iter().find(|t| t.as_str() == s)
    }
}

impl fmt::Display for TraceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What a fast retweet is keyed by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FastRetweetKey {
    /// The re-shared post id, same dimensions as co-retweet.
    #[default]
    TweetId,
    /// The account that authored the re-shared post.
    SourceAccount,
}

/// Feature counts of one actor under one trace. Never empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureBag {
    pub actor_id: String,
    pub trace: TraceKind,
    pub counts: BTreeMap<String, u32>,
}

impl FeatureBag {
    pub fn total(&self) -> u64 {
        self.counts.values().map(|&c| u64::from(c)).sum()
    }
}

/// Records skipped during extraction of one trace.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ExtractionReport {
    pub bags: usize,
    pub distinct_features: usize,
    /// Fast retweet: retweets without a source timestamp.
    pub missing_source_time: usize,
    /// Co-URL: URLs without a parseable host.
    pub unparseable_urls: usize,
    /// Co-URL: URLs rewritten through the expansion map.
    pub expanded_urls: usize,
    /// Text: original posts with fewer tokens than the minimum.
    pub short_texts: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub trace: TraceKind,
    /// Sorted by actor id.
    pub bags: Vec<FeatureBag>,
    pub report: ExtractionReport,
}

#[derive(Debug, Clone)]
pub struct TraceOptions {
    /// Inclusive upper bound on retweet latency, seconds.
    pub fast_retweet_window_seconds: i64,
    pub fast_retweet_key: FastRetweetKey,
    pub min_text_tokens: usize,
    pub stopwords: BTreeSet<String>,
    /// Short URL -> expanded URL, applied before domain extraction.
    pub url_expansions: BTreeMap<String, String>,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            fast_retweet_window_seconds: 10,
            fast_retweet_key: FastRetweetKey::TweetId,
            min_text_tokens: 4,
            stopwords: default_stopwords(),
            url_expansions: BTreeMap::new(),
        }
    }
}

fn collect<F>(
    ds: &Dataset,
    trace: TraceKind,
    report: &mut ExtractionReport,
    mut per_post: F,
) -> Vec<FeatureBag>
where
    F: FnMut(&Post, &mut ExtractionReport, &mut dyn FnMut(String)),
{
    let mut bags = Vec::new();
    for actor in ds.actors() {
        let mut counts: BTreeMap<String, u32> = BTreeMap::new();
        for post in ds.posts_by(&actor.actor_id) {
            per_post(post, report, &mut |f| *counts.entry(f).or_insert(0) += 1);
        }
        if counts.is_empty() {
            continue;
        }
        bags.push(FeatureBag {
            actor_id: actor.actor_id.clone(),
            trace,
            counts,
        });
    }
    let mut features: Vec<&str> = bags
        .iter()
        .flat_map(|b: &FeatureBag| b.counts.keys().map(String::as_str))
        .collect();
    features.sort_unstable();
    features.dedup();
    report.bags = bags.len();
    report.distinct_features = features.len();
    bags
}

/// Counts re-shared post ids per actor.
pub fn extract_co_retweet(ds: &Dataset) -> Extraction {
    let mut report = ExtractionReport::default();
    let bags = collect(ds, TraceKind::CoRetweet, &mut report, |post, _, add| {
        if post.kind == PostKind::Retweet {
            if let Some(src) = &post.retweet_of {
                add(src.post_id.clone());
            }
        }
    });
    Extraction {
        trace: TraceKind::CoRetweet,
        bags,
        report,
    }
}

/// Co-retweet restricted to retweets made within the latency window.
pub fn extract_fast_retweet(ds: &Dataset, opts: &TraceOptions) -> Extraction {
    let mut report = ExtractionReport::default();
    let window = opts.fast_retweet_window_seconds;
    let key = opts.fast_retweet_key;
    let bags = collect(
        ds,
        TraceKind::FastRetweet,
        &mut report,
        |post, report, add| {
            if post.kind != PostKind::Retweet {
                return;
            }
            let Some(src) = &post.retweet_of else { return };
            match post.retweet_latency() {
                None => report.missing_source_time += 1,
                Some(lat) if lat <= window => add(match key {
                    FastRetweetKey::TweetId => src.post_id.clone(),
                    FastRetweetKey::SourceAccount => src.author_id.clone(),
                }),
                Some(_) => {}
            }
        },
    );
    Extraction {
        trace: TraceKind::FastRetweet,
        bags,
        report,
    }
}

/// Counts normalized URL domains over every post kind.
pub fn extract_co_url(ds: &Dataset, opts: &TraceOptions) -> Extraction {
    let mut report = ExtractionReport::default();
    let bags = collect(ds, TraceKind::CoUrl, &mut report, |post, report, add| {
        for raw in &post.urls {
            let url = match opts.url_expansions.get(raw.trim()) {
                Some(expanded) => {
                    report.expanded_urls += 1;
                    expanded.as_str()
                }
                None => raw.as_str(),
            };
            match url_domain(url) {
                Some(domain) => add(domain),
                None => report.unparseable_urls += 1,
            }
        }
    });
    Extraction {
        trace: TraceKind::CoUrl,
        bags,
        report,
    }
}

/// Counts hashtags over every post kind.
pub fn extract_co_hashtag(ds: &Dataset) -> Extraction {
    let mut report = ExtractionReport::default();
    let bags = collect(ds, TraceKind::CoHashtag, &mut report, |post, _, add| {
        for tag in &post.hashtags {
            add(tag.clone());
        }
    });
    Extraction {
        trace: TraceKind::CoHashtag,
        bags,
        report,
    }
}

/// Unigram counts pooled over original posts with enough tokens.
pub fn extract_text(ds: &Dataset, opts: &TraceOptions) -> Extraction {
    let mut report = ExtractionReport::default();
    let bags = collect(ds, TraceKind::Text, &mut report, |post, report, add| {
        if post.kind != PostKind::Original {
            return;
        }
        let tokens = preprocess_text(&post.text, &opts.stopwords);
        if tokens.len() < opts.min_text_tokens {
            report.short_texts += 1;
            return;
        }
        for t in tokens {
            add(t);
        }
    });
    Extraction {
        trace: TraceKind::Text,
        bags,
        report,
    }
}

pub fn extract(ds: &Dataset, trace: TraceKind, opts: &TraceOptions) -> Extraction {
    match trace {
        TraceKind::CoRetweet => extract_co_retweet(ds),
        TraceKind::CoUrl => extract_co_url(ds, opts),
        TraceKind::CoHashtag => extract_co_hashtag(ds),
        TraceKind::FastRetweet => extract_fast_retweet(ds, opts),
        TraceKind::Text => extract_text(ds, opts),
    }
}
