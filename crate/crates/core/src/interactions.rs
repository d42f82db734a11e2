//! Directed retweet/reply counts and per-user suspiciousness toward another
//! state.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::ingest::{Cohort, Dataset, PostKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum InteractionKind {
    Retweet,
    Reply,
}

impl InteractionKind {
    pub const ALL: [InteractionKind; 2] = [InteractionKind::Retweet, InteractionKind::Reply];

    pub fn as_str(self) -> &'static str {
        match self {
            InteractionKind::Retweet => "retweet",
            InteractionKind::Reply => "reply",
        }
    }
}

impl fmt::Display for InteractionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How a state pair's users are scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum InteractionMode {
    /// Users of both states, each against the other state, in one sample.
    #[default]
    Pooled,
    /// Only users of the source state, against the target state.
    Directional,
}

/// Directed actor -> actor interaction counts between known actors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionCounts {
    pub kind: InteractionKind,
    /// source -> target -> count; no self loops.
    pub out: BTreeMap<String, BTreeMap<String, u64>>,
}

impl InteractionCounts {
    pub fn out_strength(&self, actor_id: &str) -> u64 {
        self.out.get(actor_id).map_or(0, |t| t.values().sum())
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str, u64)> {
        self.out.iter().flat_map(|(s, targets)| {
            targets
                .iter()
                .map(move |(t, &c)| (s.as_str(), t.as_str(), c))
        })
    }
}

/// Counts retweets (by source post author) or replies (by target author).
///
/// Self-interactions and targets missing from the actor table are ignored.
pub fn count_interactions(ds: &Dataset, kind: InteractionKind) -> InteractionCounts {
    let mut out: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
    for post in ds.posts() {
        let target = match (kind, post.kind) {
            (InteractionKind::Retweet, PostKind::Retweet) => {
                post.retweet_of.as_ref().map(|r| r.author_id.as_str())
            }
            (InteractionKind::Reply, PostKind::Reply) => post.reply_to_author.as_deref(),
            _ => None,
        };
        let Some(target) = target else { continue };
        if target == post.author_id || ds.actor(target).is_none() {
            continue;
        }
        *out.entry(post.author_id.clone())
            .or_default()
            .entry(String::from(target))
            .or_insert(0) += 1;
    }
    InteractionCounts { kind, out }
}

/// Original posts per state, for one cohort. Every state with actors in the
/// cohort is present, possibly with zero.
pub fn original_post_counts(ds: &Dataset, cohort: Cohort) -> BTreeMap<String, u64> {
    let mut counts: BTreeMap<String, u64> = ds
        .states()
        .filter(|s| ds.group(s, cohort).is_some())
        .map(|s| (String::from(s), 0))
        .collect();
    for post in ds.posts() {
        if post.kind != PostKind::Original {
            continue;
        }
        if let Some(a) = ds.actor(&post.author_id) {
            if a.cohort == cohort {
                *counts.entry(a.state.clone()).or_insert(0) += 1;
            }
        }
    }
    counts
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuspiciousnessScore {
    pub actor_id: String,
    pub kind: InteractionKind,
    pub counterpart_state: String,
    pub s_ic: u64,
    pub s_i: u64,
    pub p_c: u64,
    pub score: f64,
}

/// `(s_ic / s_i) * (s_ic / p_c)`.
pub fn suspiciousness_score(s_ic: u64, s_i: u64, p_c: u64) -> f64 {
    let s_ic = s_ic as f64;
    (s_ic / s_i as f64) * (s_ic / p_c as f64)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SkipReason {
    /// The state has no user with activity of this kind.
    NoScoreableUsers { state: String },
    /// The counterpart state produced no original posts.
    NoOriginalPosts { state: String },
}

impl SkipReason {
    pub fn code(&self) -> &'static str {
        match self {
            SkipReason::NoScoreableUsers { .. } => "NO_SCOREABLE_USERS",
            SkipReason::NoOriginalPosts { .. } => "NO_ORIGINAL_POSTS",
        }
    }
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SkipReason::NoScoreableUsers { state } => {
                write!(f, "PAIR_SKIPPED: no scoreable users in {state}")
            }
            SkipReason::NoOriginalPosts { state } => {
                write!(f, "PAIR_SKIPPED: {state} has no original posts")
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
struct UserActivity {
    s_i: u64,
    /// Out-count toward each state, same-cohort targets only.
    by_state: BTreeMap<String, u64>,
}

/// Precomputed S_i, S_{i,c} and P_c for one interaction kind.
#[derive(Debug, Clone)]
pub struct ScoreIndex {
    kind: InteractionKind,
    users: BTreeMap<String, UserActivity>,
    originals: [BTreeMap<String, u64>; 2],
}

impl ScoreIndex {
    pub fn new(ds: &Dataset, counts: &InteractionCounts) -> ScoreIndex {
        let mut users: BTreeMap<String, UserActivity> = BTreeMap::new();
        for (src, targets) in &counts.out {
            let Some(src_actor) = ds.actor(src) else {
                continue;
            };
            let act = users.entry(src.clone()).or_default();
            for (t, &c) in targets {
                act.s_i += c;
                if let Some(ta) = ds.actor(t) {
                    if ta.cohort == src_actor.cohort {
                        *act.by_state.entry(ta.state.clone()).or_insert(0) += c;
                    }
                }
            }
        }
        ScoreIndex {
            kind: counts.kind,
            users,
            originals: [
                original_post_counts(ds, Cohort::Io),
                original_post_counts(ds, Cohort::Control),
            ],
        }
    }

    pub fn kind(&self) -> InteractionKind {
        self.kind
    }

    pub fn originals(&self, cohort: Cohort, state: &str) -> u64 {
        let idx = match cohort {
            Cohort::Io => 0,
            Cohort::Control => 1,
        };
        self.originals[idx].get(state).copied().unwrap_or(0)
    }

    /// Scores the active users of `(source, cohort)` against `counterpart`.
    fn score_side(
        &self,
        ds: &Dataset,
        cohort: Cohort,
        source: &str,
        counterpart: &str,
    ) -> Result<Vec<SuspiciousnessScore>, SkipReason> {
        let p_c = self.originals(cohort, counterpart);
        if p_c == 0 {
            return Err(SkipReason::NoOriginalPosts {
                state: String::from(counterpart),
            });
        }
        let mut scores = Vec::new();
        for id in ds.group(source, cohort).into_iter().flatten() {
            let Some(act) = self.users.get(id) else {
                continue;
            };
            if act.s_i == 0 {
                continue;
            }
            let s_ic = act.by_state.get(counterpart).copied().unwrap_or(0);
            scores.push(SuspiciousnessScore {
                actor_id: id.clone(),
                kind: self.kind,
                counterpart_state: String::from(counterpart),
                s_ic,
                s_i: act.s_i,
                p_c,
                score: suspiciousness_score(s_ic, act.s_i, p_c),
            });
        }
        if scores.is_empty() {
            return Err(SkipReason::NoScoreableUsers {
                state: String::from(source),
            });
        }
        Ok(scores)
    }

    /// Node sample for one cohort and state pair.
    ///
    /// Users without any activity of this kind have no defined score and are
    /// left out. Output is sorted by `(actor_id, counterpart_state)`.
    pub fn suspiciousness(
        &self,
        ds: &Dataset,
        cohort: Cohort,
        state_a: &str,
        state_b: &str,
        mode: InteractionMode,
    ) -> Result<Vec<SuspiciousnessScore>, SkipReason> {
        let mut scores = self.score_side(ds, cohort, state_a, state_b)?;
        if mode == InteractionMode::Pooled {
            scores.extend(self.score_side(ds, cohort, state_b, state_a)?);
            scores.sort_by(|x, y| {
                (&x.actor_id, &x.counterpart_state).cmp(&(&y.actor_id, &y.counterpart_state))
            });
        }
        Ok(scores)
    }

    /// Every defined score: each active actor against every other state of
    /// its cohort that has original posts.
    pub fn all_scores(&self, ds: &Dataset) -> Vec<SuspiciousnessScore> {
        let mut out = Vec::new();
        for (id, act) in &self.users {
            let Some(actor) = ds.actor(id) else { continue };
            if act.s_i == 0 {
                continue;
            }
            for state in ds.states() {
                if state == actor.state || ds.group(state, actor.cohort).is_none() {
                    continue;
                }
                let p_c = self.originals(actor.cohort, state);
                if p_c == 0 {
                    continue;
                }
                let s_ic = act.by_state.get(state).copied().unwrap_or(0);
                out.push(SuspiciousnessScore {
                    actor_id: id.clone(),
                    kind: self.kind,
                    counterpart_state: String::from(state),
                    s_ic,
                    s_i: act.s_i,
                    p_c,
                    score: suspiciousness_score(s_ic, act.s_i, p_c),
                });
            }
        }
        out
    }
}

/// Convenience wrapper building the counts and index for a single query.
pub fn suspiciousness(
    ds: &Dataset,
    kind: InteractionKind,
    cohort: Cohort,
    state_a: &str,
    state_b: &str,
    mode: InteractionMode,
) -> Result<Vec<SuspiciousnessScore>, SkipReason> {
    let counts = count_interactions(ds, kind);
    ScoreIndex::new(ds, &counts).suspiciousness(ds, cohort, state_a, state_b, mode)
}
