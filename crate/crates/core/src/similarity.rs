//! TF-IDF user vectors and the sparse all-pairs cosine join.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::ingest::{Cohort, Dataset};
use crate::traces::{FeatureBag, TraceKind};

/// L2-normalized feature weights of one actor. Features are sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    pub actor_id: String,
    pub trace: TraceKind,
    pub weights: Vec<(String, f64)>,
}

impl SparseVector {
    pub fn norm(&self) -> f64 {
        libm::sqrt(self.weights.iter().map(|(_, w)| w * w).sum())
    }

    /// Dot product by merging the two sorted feature lists.
    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut i, mut j) = (0, 0);
        let mut acc = 0.0;
        while i < self.weights.len() && j < other.weights.len() {
            match self.weights[i].0.cmp(&other.weights[j].0) {
                core::cmp::Ordering::Less => i += 1,
                core::cmp::Ordering::Greater => j += 1,
                core::cmp::Ordering::Equal => {
                    acc += self.weights[i].1 * other.weights[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }
}

/// Smoothed inverse document frequency, `ln((1 + n) / (1 + df)) + 1`.
pub fn smoothed_idf(n_docs: usize, df: usize) -> f64 {
    libm::log((1.0 + n_docs as f64) / (1.0 + df as f64)) + 1.0
}

/// Raw-count TF times smoothed IDF, then L2 normalization.
///
/// All bags must belong to the same trace. Output follows input order.
pub fn tfidf_vectorize(bags: &[FeatureBag]) -> Vec<SparseVector> {
    let n = bags.len();
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for bag in bags {
        debug_assert!(bag.trace == bags[0].trace, "mixed traces");
        for f in bag.counts.keys() {
            *df.entry(f.as_str()).or_insert(0) += 1;
        }
    }
    let idf: BTreeMap<&str, f64> = df
        .into_iter()
        .map(|(f, d)| (f, smoothed_idf(n, d)))
        .collect();
    bags.iter()
        .map(|bag| {
            let mut weights: Vec<(String, f64)> = bag
                .counts
                .iter()
                .map(|(f, &c)| (f.clone(), f64::from(c) * idf[f.as_str()]))
                .collect();
            let norm = libm::sqrt(weights.iter().map(|(_, w)| w * w).sum());
            for (_, w) in &mut weights {
                *w /= norm;
            }
            SparseVector {
                actor_id: bag.actor_id.clone(),
                trace: bag.trace,
                weights,
            }
        })
        .collect()
}

/// Undirected weighted edge; `actor_a < actor_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityEdge<'a> {
    pub actor_a: &'a str,
    pub actor_b: &'a str,
    pub trace: TraceKind,
    pub weight: f64,
}

/// Edge between two positions of [`SimilarityNetwork::actors`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexedEdge {
    pub a: u32,
    pub b: u32,
    pub weight: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct JoinReport {
    pub vectors: usize,
    pub edges: usize,
    /// Sum of accumulator updates, i.e. shared-feature co-occurrences.
    pub pair_updates: u64,
    /// Features whose posting list is longer than the cap, with its length.
    pub heavy_features: Vec<(String, usize)>,
}

pub const DEFAULT_POSTING_CAP: usize = 10_000;

/// Cosine similarity network of one trace.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityNetwork {
    pub trace: TraceKind,
    /// Sorted actor ids; edges index into this.
    pub actors: Vec<String>,
    /// Sorted by `(a, b)`.
    pub edges: Vec<IndexedEdge>,
    pub report: JoinReport,
}

impl SimilarityNetwork {
    pub fn edges(&self) -> impl Iterator<Item = SimilarityEdge<'_>> + '_ {
        self.edges.iter().map(move |e| SimilarityEdge {
            actor_a: &self.actors[e.a as usize],
            actor_b: &self.actors[e.b as usize],
            trace: self.trace,
            weight: e.weight,
        })
    }
}

/// Emits every pair of vectors sharing at least one feature, weighted by the
/// dot product of the (normalized) vectors.
///
/// Work goes through a feature-inverted index, so the cost is the number of
/// shared-feature co-occurrences rather than the number of pairs. Features
/// with more than `posting_cap` actors are listed in the report but still
/// joined.
pub fn cosine_network(vectors: &[SparseVector], posting_cap: usize) -> SimilarityNetwork {
    let trace = vectors.first().map_or(TraceKind::CoRetweet, |v| v.trace);
    let mut order: Vec<&SparseVector> = vectors.iter().collect();
    order.sort_by(|x, y| x.actor_id.cmp(&y.actor_id));

    // Feature ids are positions in the sorted list of distinct features.
    let mut features: Vec<&str> = order
        .iter()
        .flat_map(|v| v.weights.iter().map(|(f, _)| f.as_str()))
        .collect();
    features.sort_unstable();
    features.dedup();
    let feature_id = |f: &str| features.binary_search(&f).expect("feature was collected") as u32;

    // rows[i] holds (feature, weight) in feature order; postings are filled
    // in row order so each list is sorted by row.
    let mut postings: Vec<Vec<(u32, f64)>> = vec![Vec::new(); features.len()];
    let rows: Vec<Vec<(u32, f64)>> = order
        .iter()
        .enumerate()
        .map(|(row, v)| {
            v.weights
                .iter()
                .map(|(f, w)| {
                    let fid = feature_id(f);
                    postings[fid as usize].push((row as u32, *w));
                    (fid, *w)
                })
                .collect()
        })
        .collect();

    let mut report = JoinReport {
        vectors: order.len(),
        ..JoinReport::default()
    };
    for (f, list) in features.iter().zip(&postings) {
        if list.len() > posting_cap {
            report.heavy_features.push((String::from(*f), list.len()));
        }
    }

    let mut acc = vec![0.0f64; order.len()];
    let mut touched: Vec<u32> = Vec::new();
    let mut edges = Vec::new();
    for (row, features) in rows.iter().enumerate() {
        let row = row as u32;
        for &(fid, w) in features {
            let list = &postings[fid as usize];
            let start = list.partition_point(|&(r, _)| r <= row);
            for &(other, wo) in &list[start..] {
                let slot = &mut acc[other as usize];
                if *slot == 0.0 {
                    touched.push(other);
                }
                *slot += w * wo;
            }
            report.pair_updates += (list.len() - start) as u64;
        }
        touched.sort_unstable();
        for &other in &touched {
            let weight = acc[other as usize].min(1.0);
            acc[other as usize] = 0.0;
            edges.push(IndexedEdge {
                a: row,
                b: other,
                weight,
            });
        }
        touched.clear();
    }
    report.edges = edges.len();
    SimilarityNetwork {
        trace,
        actors: order.iter().map(|v| v.actor_id.clone()).collect(),
        edges,
        report,
    }
}

/// Weights of edges joining `(state_a, cohort)` to `(state_b, cohort)`.
///
/// Edges inside one state or across cohorts never qualify.
pub fn interstate_edges(
    net: &SimilarityNetwork,
    ds: &Dataset,
    cohort: Cohort,
    state_a: &str,
    state_b: &str,
) -> Vec<f64> {
    if state_a == state_b {
        return Vec::new();
    }
    let side: Vec<u8> = net
        .actors
        .iter()
        .map(|id| match ds.actor(id) {
            Some(a) if a.cohort == cohort && a.state == state_a => 1,
            Some(a) if a.cohort == cohort && a.state == state_b => 2,
            _ => 0,
        })
        .collect();
    net.edges
        .iter()
        .filter(|e| {
            let (x, y) = (side[e.a as usize], side[e.b as usize]);
            x != 0 && y != 0 && x != y
        })
        .map(|e| e.weight)
        .collect()
}

/// All inter-state samples of a network at once, keyed by
/// `(cohort, lower state, higher state)`. Agrees with [`interstate_edges`].
pub fn interstate_samples(
    net: &SimilarityNetwork,
    ds: &Dataset,
) -> BTreeMap<(Cohort, String, String), Vec<f64>> {
    let states: Vec<&str> = ds.states().collect();
    let groups: Vec<Option<(usize, Cohort)>> = net
        .actors
        .iter()
        .map(|id| {
            let a = ds.actor(id)?;
            let s = states.binary_search(&a.state.as_str()).ok()?;
            Some((s, a.cohort))
        })
        .collect();
    let mut by_index: BTreeMap<(Cohort, usize, usize), Vec<f64>> = BTreeMap::new();
    for e in &net.edges {
        let (Some((sa, ca)), Some((sb, cb))) = (groups[e.a as usize], groups[e.b as usize]) else {
            continue;
        };
        if ca != cb || sa == sb {
            continue;
        }
        by_index
            .entry((ca, sa.min(sb), sa.max(sb)))
            .or_default()
            .push(e.weight);
    }
    by_index
        .into_iter()
        .map(|((c, a, b), v)| ((c, String::from(states[a]), String::from(states[b])), v))
        .collect()
}
