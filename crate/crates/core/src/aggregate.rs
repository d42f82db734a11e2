//! State-level aggregate networks for plotting.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::ingest::{Cohort, Dataset};
use crate::interactions::InteractionCounts;
use crate::pipeline::Layer;
use crate::traces::FeatureBag;

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateEdge {
    pub source: String,
    pub target: String,
    pub layer: Layer,
    pub weight: f64,
}

impl AggregateEdge {
    /// A state's edge to itself (interaction layers only).
    pub fn is_intra(&self) -> bool {
        self.source == self.target
    }
}

/// Interaction volume from state A to state B divided by the total
/// out-strength of A's cohort users.
///
/// Intra-state edges are included; callers can drop them with
/// [`AggregateEdge::is_intra`].
pub fn aggregate_interactions(
    counts: &InteractionCounts,
    ds: &Dataset,
    cohort: Cohort,
) -> Vec<AggregateEdge> {
    let mut out_strength: BTreeMap<&str, u64> = BTreeMap::new();
    let mut flows: BTreeMap<(&str, &str), u64> = BTreeMap::new();
    for (src, tgt, c) in counts.edges() {
        let Some(sa) = ds.actor(src) else { continue };
        if sa.cohort != cohort {
            continue;
        }
        *out_strength.entry(sa.state.as_str()).or_insert(0) += c;
        if let Some(ta) = ds.actor(tgt) {
            if ta.cohort == cohort {
                *flows
                    .entry((sa.state.as_str(), ta.state.as_str()))
                    .or_insert(0) += c;
            }
        }
    }
    let layer = Layer::from(counts.kind);
    flows
        .into_iter()
        .filter(|&(_, c)| c > 0)
        .map(|((a, b), c)| AggregateEdge {
            source: String::from(a),
            target: String::from(b),
            layer,
            weight: c as f64 / out_strength[a] as f64,
        })
        .collect()
}

/// `|a ∩ b| / |a ∪ b|`, or `None` when both sets are empty.
pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> Option<f64> {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        None
    } else {
        Some(inter as f64 / union as f64)
    }
}

/// Union of the bag supports of each state's cohort users.
pub fn state_feature_sets<'a>(
    bags: &'a [FeatureBag],
    ds: &Dataset,
    cohort: Cohort,
) -> BTreeMap<String, BTreeSet<&'a str>> {
    let mut sets: BTreeMap<String, BTreeSet<&'a str>> = BTreeMap::new();
    for bag in bags {
        let Some(a) = ds.actor(&bag.actor_id) else {
            continue;
        };
        if a.cohort != cohort {
            continue;
        }
        sets.entry(a.state.clone())
            .or_default()
            .extend(bag.counts.keys().map(String::as_str));
    }
    sets
}

/// Jaccard coefficient between every pair of states' feature sets, counts
/// ignored. Pairs with no shared feature are omitted.
pub fn aggregate_similarity(
    bags: &[FeatureBag],
    ds: &Dataset,
    cohort: Cohort,
) -> Vec<AggregateEdge> {
    let Some(first) = bags.first() else {
        return Vec::new();
    };
    let layer = Layer::from(first.trace);
    let sets = state_feature_sets(bags, ds, cohort);
    let states: Vec<(&String, &BTreeSet<&str>)> = sets.iter().collect();
    let mut edges = Vec::new();
    for (i, (sa, fa)) in states.iter().enumerate() {
        for (sb, fb) in &states[i + 1..] {
            if let Some(w) = jaccard(fa, fb) {
                if w > 0.0 {
                    edges.push(AggregateEdge {
                        source: (*sa).clone(),
                        target: (*sb).clone(),
                        layer,
                        weight: w,
                    });
                }
            }
        }
    }
    edges
}
