//! Actors, posts and the validated in-memory dataset.
//!
//! Reading the on-disk formats is left to the std companion crate; this module
//! owns the normalization rules (case folding, hashtag cleanup, kind
//! derivation) and dataset validation so that every front end applies them
//! identically.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// Which side of the IO/control comparison an account belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Cohort {
    Io,
    Control,
}

impl Cohort {
    pub const ALL: [Cohort; 2] = [Cohort::Io, Cohort::Control];

    /// Case-insensitive parse of `io` / `control`.
    pub fn parse(value: &str) -> Option<Cohort> {
        let v = value.trim();
        if v.eq_ignore_ascii_case("io") {
            Some(Cohort::Io)
        } else if v.eq_ignore_ascii_case("control") {
            Some(Cohort::Control)
        } else {
            None
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Cohort::Io => "io",
            Cohort::Control => "control",
        }
    }

    fn index(self) -> usize {
        match self {
            Cohort::Io => 0,
            Cohort::Control => 1,
        }
    }
}

impl fmt::Display for Cohort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Actor {
    pub actor_id: String,
    pub state: String,
    pub cohort: Cohort,
}

impl Actor {
    /// Builds an actor from raw field values, case-folding the state label.
    ///
    /// `line` is only used for error reporting.
    pub fn from_fields(
        actor_id: &str,
        state: &str,
        cohort: &str,
        line: usize,
    ) -> Result<Actor, IngestError> {
        let actor_id = actor_id.trim();
        let state = state.trim().to_lowercase();
        if actor_id.is_empty() || state.is_empty() {
            return Err(IngestError::MalformedLine { line });
        }
        let cohort = Cohort::parse(cohort).ok_or_else(|| IngestError::UnknownCohort {
            value: cohort.to_string(),
            line,
        })?;
        Ok(Actor {
            actor_id: actor_id.to_string(),
            state,
            cohort,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PostKind {
    Original,
    Retweet,
    Reply,
}

/// The post a retweet re-shares.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetweetRef {
    pub post_id: String,
    pub author_id: String,
    /// Creation time of the source post; some archives omit it.
    pub created_at: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Post {
    pub post_id: String,
    pub author_id: String,
    /// Epoch seconds, UTC.
    pub created_at: i64,
    pub kind: PostKind,
    pub text: String,
    pub retweet_of: Option<RetweetRef>,
    pub reply_to_author: Option<String>,
    pub urls: Vec<String>,
    /// Case-folded, without the leading `#`.
    pub hashtags: Vec<String>,
}

impl Post {
    /// Retweet latency in seconds when both timestamps are known.
    pub fn retweet_latency(&self) -> Option<i64> {
        let src = self.retweet_of.as_ref()?.created_at?;
        Some(self.created_at - src)
    }
}

/// Raw field values of one posts-file record before normalization.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PostRecord {
    pub post_id: String,
    pub author_id: String,
    pub created_at: i64,
    pub text: String,
    pub retweet_of_post_id: Option<String>,
    pub retweet_of_author_id: Option<String>,
    pub retweet_of_created_at: Option<i64>,
    pub reply_to_author: Option<String>,
    pub urls: Vec<String>,
    pub hashtags: Vec<String>,
}

/// Case-folds a hashtag and strips leading `#` characters.
pub fn normalize_hashtag(tag: &str) -> String {
    tag.trim().trim_start_matches('#').to_lowercase()
}

impl PostRecord {
    /// Applies the kind derivation and normalization rules.
    pub fn into_post(self, line: usize) -> Result<Post, IngestError> {
        if self.post_id.is_empty() || self.author_id.is_empty() {
            return Err(IngestError::MalformedRecord {
                line,
                reason: "empty post_id or author_id",
            });
        }
        let retweet_of = match (self.retweet_of_post_id, self.retweet_of_author_id) {
            (Some(post_id), Some(author_id)) => Some(RetweetRef {
                post_id,
                author_id,
                created_at: self.retweet_of_created_at,
            }),
            (None, None) => {
                if self.retweet_of_created_at.is_some() {
                    return Err(IngestError::MalformedRecord {
                        line,
                        reason: "retweet_of_created_at without retweet source",
                    });
                }
                None
            }
            _ => {
                return Err(IngestError::MalformedRecord {
                    line,
                    reason: "retweet_of_post_id and retweet_of_author_id must appear together",
                })
            }
        };
        let reply_to_author = self.reply_to_author.filter(|a| !a.is_empty());
        let kind = match (&retweet_of, &reply_to_author) {
            (Some(_), Some(_)) => return Err(IngestError::KindConflict { line }),
            (Some(src), None) => {
                if let Some(src_at) = src.created_at {
                    if src_at > self.created_at {
                        return Err(IngestError::NegativeLatency { line });
                    }
                }
                PostKind::Retweet
            }
            (None, Some(_)) => PostKind::Reply,
            (None, None) => PostKind::Original,
        };
        let hashtags = self
            .hashtags
            .iter()
            .map(|h| normalize_hashtag(h))
            .filter(|h| !h.is_empty())
            .collect();
        Ok(Post {
            post_id: self.post_id,
            author_id: self.author_id,
            created_at: self.created_at,
            kind,
            text: self.text,
            retweet_of,
            reply_to_author,
            urls: self.urls,
            hashtags,
        })
    }
}

impl From<&Post> for PostRecord {
    fn from(p: &Post) -> PostRecord {
        PostRecord {
            post_id: p.post_id.clone(),
            author_id: p.author_id.clone(),
            created_at: p.created_at,
            text: p.text.clone(),
            retweet_of_post_id: p.retweet_of.as_ref().map(|r| r.post_id.clone()),
            retweet_of_author_id: p.retweet_of.as_ref().map(|r| r.author_id.clone()),
            retweet_of_created_at: p.retweet_of.as_ref().and_then(|r| r.created_at),
            reply_to_author: p.reply_to_author.clone(),
            urls: p.urls.clone(),
            hashtags: p.hashtags.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IngestError {
    MalformedLine { line: usize },
    DuplicateActor { actor_id: String },
    UnknownCohort { value: String, line: usize },
    MalformedRecord { line: usize, reason: &'static str },
    KindConflict { line: usize },
    NegativeLatency { line: usize },
    DuplicatePost { post_id: String },
    UnknownAuthor { actor_id: String },
}

impl IngestError {
    /// Stable upper-case error code.
    pub fn code(&self) -> &'static str {
        match self {
            IngestError::MalformedLine { .. } => "MALFORMED_LINE",
            IngestError::DuplicateActor { .. } => "DUPLICATE_ACTOR",
            IngestError::UnknownCohort { .. } => "UNKNOWN_COHORT",
            IngestError::MalformedRecord { .. } => "MALFORMED_RECORD",
            IngestError::KindConflict { .. } => "KIND_CONFLICT",
            IngestError::NegativeLatency { .. } => "NEGATIVE_LATENCY",
            IngestError::DuplicatePost { .. } => "DUPLICATE_POST",
            IngestError::UnknownAuthor { .. } => "UNKNOWN_AUTHOR",
        }
    }
}

impl fmt::Display for IngestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IngestError::MalformedLine { line } => write!(f, "MALFORMED_LINE at line {line}"),
            IngestError::DuplicateActor { actor_id } => {
                write!(f, "DUPLICATE_ACTOR `{actor_id}`")
            }
            IngestError::UnknownCohort { value, line } => {
                write!(f, "UNKNOWN_COHORT `{value}` at line {line}")
            }
            IngestError::MalformedRecord { line, reason } => {
                write!(f, "MALFORMED_RECORD at line {line}: {reason}")
            }
            IngestError::KindConflict { line } => write!(
                f,
                "KIND_CONFLICT at line {line}: both retweet source and reply target present"
            ),
            IngestError::NegativeLatency { line } => write!(
                f,
                "NEGATIVE_LATENCY at line {line}: retweet is older than its source"
            ),
            IngestError::DuplicatePost { post_id } => write!(f, "DUPLICATE_POST `{post_id}`"),
            IngestError::UnknownAuthor { actor_id } => write!(f, "UNKNOWN_AUTHOR `{actor_id}`"),
        }
    }
}

impl core::error::Error for IngestError {}

/// Rejects repeated actor ids, keeping input order otherwise.
pub fn check_unique_actors(actors: &[Actor]) -> Result<(), IngestError> {
    let mut seen = BTreeSet::new();
    for a in actors {
        if !seen.insert(a.actor_id.as_str()) {
            return Err(IngestError::DuplicateActor {
                actor_id: a.actor_id.clone(),
            });
        }
    }
    Ok(())
}

/// Per state, per cohort actor counts plus references that could not be
/// resolved against the actor table.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ValidationReport {
    pub total_actors: usize,
    pub total_posts: usize,
    /// state -> cohort label -> actor count.
    pub counts: BTreeMap<String, BTreeMap<String, usize>>,
    /// Posts dropped in lenient mode because their author is unknown.
    pub dropped_posts: Vec<String>,
    /// Retweets whose source author is not in the actor table.
    pub dangling_retweet_sources: usize,
    /// Replies whose target author is not in the actor table.
    pub dangling_reply_targets: usize,
    /// Distinct out-of-scope account ids referenced by kept posts.
    pub dangling_accounts: Vec<String>,
}

impl ValidationReport {
    pub fn dangling_total(&self) -> usize {
        self.dangling_retweet_sources + self.dangling_reply_targets
    }
}

/// Immutable validated dataset with state/cohort and author indexes.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    actors: BTreeMap<String, Actor>,
    posts: Vec<Post>,
    groups: BTreeMap<String, [BTreeSet<String>; 2]>,
    by_author: BTreeMap<String, Vec<usize>>,
}

/// Validates actors and posts and builds the indexes.
///
/// In strict mode a post by an unknown author fails with `UNKNOWN_AUTHOR`; in
/// lenient mode such posts are dropped and listed in the report. Retweet
/// sources and reply targets outside the actor table are kept and counted in
/// both modes.
pub fn validate_dataset(
    actors: Vec<Actor>,
    posts: Vec<Post>,
    strict: bool,
) -> Result<(Dataset, ValidationReport), IngestError> {
    check_unique_actors(&actors)?;
    let mut post_ids = BTreeSet::new();
    for p in &posts {
        if !post_ids.insert(p.post_id.as_str()) {
            return Err(IngestError::DuplicatePost {
                post_id: p.post_id.clone(),
            });
        }
    }
    drop(post_ids);

    let actors: BTreeMap<String, Actor> = actors
        .into_iter()
        .map(|a| (a.actor_id.clone(), a))
        .collect();

    let mut report = ValidationReport::default();
    let mut dangling = BTreeSet::new();
    let mut kept = Vec::with_capacity(posts.len());
    for p in posts {
        if !actors.contains_key(&p.author_id) {
            if strict {
                return Err(IngestError::UnknownAuthor {
                    actor_id: p.author_id,
                });
            }
            report.dropped_posts.push(p.post_id);
            continue;
        }
        if let Some(src) = &p.retweet_of {
            if !actors.contains_key(&src.author_id) {
                report.dangling_retweet_sources += 1;
                dangling.insert(src.author_id.clone());
            }
        }
        if let Some(target) = &p.reply_to_author {
            if !actors.contains_key(target) {
                report.dangling_reply_targets += 1;
                dangling.insert(target.clone());
            }
        }
        kept.push(p);
    }
    report.dangling_accounts = dangling.into_iter().collect();

    let ds = Dataset::from_parts(actors, kept);
    report.total_actors = ds.actors.len();
    report.total_posts = ds.posts.len();
    for (state, sets) in &ds.groups {
        let entry = report.counts.entry(state.clone()).or_default();
        for c in Cohort::ALL {
            let n = sets[c.index()].len();
            if n > 0 {
                entry.insert(c.as_str().to_string(), n);
            }
        }
    }
    Ok((ds, report))
}

impl Dataset {
    fn from_parts(actors: BTreeMap<String, Actor>, posts: Vec<Post>) -> Dataset {
        let mut groups: BTreeMap<String, [BTreeSet<String>; 2]> = BTreeMap::new();
        for a in actors.values() {
            groups.entry(a.state.clone()).or_default()[a.cohort.index()].insert(a.actor_id.clone());
        }
        let mut by_author: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, p) in posts.iter().enumerate() {
            by_author.entry(p.author_id.clone()).or_default().push(i);
        }
        Dataset {
            actors,
            posts,
            groups,
            by_author,
        }
    }

    pub fn actor(&self, actor_id: &str) -> Option<&Actor> {
        self.actors.get(actor_id)
    }

    /// Actors ordered by id.
    pub fn actors(&self) -> impl Iterator<Item = &Actor> {
        self.actors.values()
    }

    pub fn actor_count(&self) -> usize {
        self.actors.len()
    }

    /// Posts in input order.
    pub fn posts(&self) -> &[Post] {
        &self.posts
    }

    /// Sorted state labels.
    pub fn states(&self) -> impl Iterator<Item = &str> {
        self.groups.keys().map(String::as_str)
    }

    /// Actors of one state and cohort, ordered by id.
    pub fn group(&self, state: &str, cohort: Cohort) -> Option<&BTreeSet<String>> {
        self.groups
            .get(state)
            .map(|g| &g[cohort.index()])
            .filter(|s| !s.is_empty())
    }

    /// Posts authored by `actor_id`, in input order.
    pub fn posts_by<'a>(&'a self, actor_id: &str) -> impl Iterator<Item = &'a Post> + 'a {
        self.by_author
            .get(actor_id)
            .map(Vec::as_slice)
            .unwrap_or(&[])
            .iter()
            .map(move |&i| &self.posts[i])
    }

    /// Rebuilds the indexes from the actor map and post list and reports
    /// whether they equal the stored ones.
    pub fn indexes_consistent(&self) -> bool {
        let rebuilt = Dataset::from_parts(self.actors.clone(), self.posts.clone());
        rebuilt.groups == self.groups && rebuilt.by_author == self.by_author
    }
}
