//! Layers, run configuration and network construction.

use alloc::collections::{BTreeMap, BTreeSet};
use core::fmt;

use crate::ingest::Dataset;
use crate::interactions::{
    count_interactions, InteractionCounts, InteractionKind, InteractionMode, ScoreIndex,
};
use crate::similarity::{cosine_network, tfidf_vectorize, SimilarityNetwork, DEFAULT_POSTING_CAP};
use crate::stats::DEFAULT_EXACT_CAP;
use crate::traces::{extract, Extraction, TraceKind, TraceOptions};

/// One of the seven networks a state pair is tested on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Layer {
    CoRetweet,
    CoUrl,
    CoHashtag,
    FastRetweet,
    Text,
    Retweet,
    Reply,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "SCREAMING_SNAKE_CASE"))]
pub enum SampleType {
    EdgeWeights,
    NodeScores,
}

impl SampleType {
    pub fn as_str(self) -> &'static str {
        match self {
            SampleType::EdgeWeights => "EDGE_WEIGHTS",
            SampleType::NodeScores => "NODE_SCORES",
        }
    }
}

impl Layer {
    pub const ALL: [Layer; 7] = [
        Layer::CoRetweet,
        Layer::CoUrl,
        Layer::CoHashtag,
        Layer::FastRetweet,
        Layer::Text,
        Layer::Retweet,
        Layer::Reply,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Layer::CoRetweet => "co_retweet",
            Layer::CoUrl => "co_url",
            Layer::CoHashtag => "co_hashtag",
            Layer::FastRetweet => "fast_retweet",
            Layer::Text => "text",
            Layer::Retweet => "retweet",
            Layer::Reply => "reply",
        }
    }

    pub fn parse(s: &str) -> Option<Layer> {
        Layer::ALL.into_iter().find(|l| l.as_str() == s)
    }

    pub fn trace(self) -> Option<TraceKind> {
        match self {
            Layer::CoRetweet => Some(TraceKind::CoRetweet),
            Layer::CoUrl => Some(TraceKind::CoUrl),
            Layer::CoHashtag => Some(TraceKind::CoHashtag),
            Layer::FastRetweet => Some(TraceKind::FastRetweet),
            Layer::Text => Some(TraceKind::Text),
            Layer::Retweet | Layer::Reply => None,
        }
    }

    pub fn interaction(self) -> Option<InteractionKind> {
        match self {
            Layer::Retweet => Some(InteractionKind::Retweet),
            Layer::Reply => Some(InteractionKind::Reply),
            _ => None,
        }
    }

    /// Similarity layers compare edge weights, interaction layers compare
    /// per-user suspiciousness.
    pub fn sample_type(self) -> SampleType {
        if self.trace().is_some() {
            SampleType::EdgeWeights
        } else {
            SampleType::NodeScores
        }
    }
}

impl From<TraceKind> for Layer {
    fn from(t: TraceKind) -> Layer {
        match t {
            TraceKind::CoRetweet => Layer::CoRetweet,
            TraceKind::CoUrl => Layer::CoUrl,
            TraceKind::CoHashtag => Layer::CoHashtag,
            TraceKind::FastRetweet => Layer::FastRetweet,
            TraceKind::Text => Layer::Text,
        }
    }
}

impl From<InteractionKind> for Layer {
    fn from(k: InteractionKind) -> Layer {
        match k {
            InteractionKind::Retweet => Layer::Retweet,
            InteractionKind::Reply => Layer::Reply,
        }
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Tunables of a full run. `Default` gives the standard analysis: 10 s
/// fast-retweet window, 4-token text minimum, alpha 0.05, pooled scoring.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub layers: BTreeSet<Layer>,
    pub traces: TraceOptions,
    pub alpha: f64,
    pub interaction_mode: InteractionMode,
    pub exact_test_cap: u64,
    pub posting_cap: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            layers: Layer::ALL.into_iter().collect(),
            traces: TraceOptions::default(),
            alpha: 0.05,
            interaction_mode: InteractionMode::Pooled,
            exact_test_cap: DEFAULT_EXACT_CAP,
            posting_cap: DEFAULT_POSTING_CAP,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimilarityLayer {
    pub extraction: Extraction,
    pub network: SimilarityNetwork,
}

#[derive(Debug, Clone)]
pub struct InteractionLayer {
    pub counts: InteractionCounts,
    pub scores: ScoreIndex,
}

/// Every enabled network of a run.
#[derive(Debug, Clone, Default)]
pub struct Networks {
    pub similarity: BTreeMap<TraceKind, SimilarityLayer>,
    pub interactions: BTreeMap<InteractionKind, InteractionLayer>,
}

pub fn build_similarity_layer(ds: &Dataset, trace: TraceKind, cfg: &RunConfig) -> SimilarityLayer {
    let extraction = extract(ds, trace, &cfg.traces);
    let vectors = tfidf_vectorize(&extraction.bags);
    let mut network = cosine_network(&vectors, cfg.posting_cap);
    network.trace = trace;
    SimilarityLayer {
        extraction,
        network,
    }
}

pub fn build_interaction_layer(ds: &Dataset, kind: InteractionKind) -> InteractionLayer {
    let counts = count_interactions(ds, kind);
    let scores = ScoreIndex::new(ds, &counts);
    InteractionLayer { counts, scores }
}

/// Builds the enabled layers sequentially.
pub fn build(ds: &Dataset, cfg: &RunConfig) -> Networks {
    let mut nets = Networks::default();
    for layer in &cfg.layers {
        if let Some(t) = layer.trace() {
            nets.similarity
                .insert(t, build_similarity_layer(ds, t, cfg));
        } else if let Some(k) = layer.interaction() {
            nets.interactions.insert(k, build_interaction_layer(ds, k));
        }
    }
    nets
}
