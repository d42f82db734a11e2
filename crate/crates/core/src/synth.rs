//! Seeded synthetic datasets with optional planted inter-state coordination.
//!
//! Organic users post originals, retweet mostly out-of-scope tweets drawn
//! from a global pool, and reply mostly to out-of-scope accounts; a small
//! share of their retweets and replies go to in-scope accounts of their own
//! cohort. Planted colluders in one state pair additionally co-retweet a
//! small dedicated pool of colluder posts (partly within the fast-retweet
//! window) and engage directly with the partner state's colluders.
//!
//! The generator is a pure function of the config: ChaCha8 seeded from
//! `seed`, consumed in a fixed order.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ingest::{Actor, Cohort, Post, PostKind, RetweetRef};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StateSpec {
    pub name: String,
    pub io_users: usize,
    pub control_users: usize,
}

/// Distribution of posts per user.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(
    feature = "serde",
    serde(tag = "distribution", rename_all = "snake_case")
)]
pub enum Activity {
    /// Uniform on `min..=max`.
    Uniform { min: usize, max: usize },
    /// `P(k)` proportional to `k^-exponent` on `1..=max`.
    Zipf { exponent: f64, max: usize },
}

impl Activity {
    fn pmf(&self) -> Vec<(usize, f64)> {
        match *self {
            Activity::Uniform { min, max } => {
                let n = (max - min + 1) as f64;
                (min..=max).map(|k| (k, 1.0 / n)).collect()
            }
            Activity::Zipf { exponent, max } => {
                let w: Vec<f64> = (1..=max).map(|k| libm::pow(k as f64, -exponent)).collect();
                let total: f64 = w.iter().sum();
                w.into_iter()
                    .enumerate()
                    .map(|(i, x)| (i + 1, x / total))
                    .collect()
            }
        }
    }

    /// Mean and variance of the post count.
    pub fn moments(&self) -> (f64, f64) {
        let pmf = self.pmf();
        let mean: f64 = pmf.iter().map(|&(k, p)| k as f64 * p).sum();
        let var: f64 = pmf
            .iter()
            .map(|&(k, p)| p * (k as f64 - mean) * (k as f64 - mean))
            .sum();
        (mean, var)
    }
}

/// Coordination planted between the colluders of two states (IO cohort).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Planting {
    pub state_pair: (String, String),
    pub colluders_per_state: usize,
    pub co_retweet_pool_size: usize,
    /// Share of colluder retweets drawn from the dedicated pool.
    pub co_retweet_rate: f64,
    /// Share of pool retweets made within the fast-retweet window.
    pub fast_retweet_fraction: f64,
    /// Share of the remaining colluder retweets, and of colluder replies,
    /// aimed at the partner state's colluders.
    pub engagement_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct ScenarioConfig {
    pub seed: u64,
    pub states: Vec<StateSpec>,
    pub activity: Activity,
    pub retweet_rate: f64,
    pub reply_rate: f64,
    /// Control user `i` reuses the post count and kind sequence of IO user
    /// `i mod io_users` of the same state.
    pub matched_activity: bool,
    pub tweet_pool: usize,
    /// Zipf exponent of tweet popularity; 0 is uniform.
    pub tweet_popularity: f64,
    pub external_accounts: usize,
    pub domain_pool: usize,
    pub hashtag_pool: usize,
    pub vocabulary: usize,
    pub vocabulary_exponent: f64,
    pub words_min: usize,
    pub words_max: usize,
    pub hashtag_rate: f64,
    pub url_rate: f64,
    /// Share of organic retweets/replies aimed at in-scope accounts.
    pub in_scope_rate: f64,
    /// For in-scope targets, probability of staying in the own state.
    pub home_bias: f64,
    pub start_time: i64,
    pub window_seconds: i64,
    /// Organic retweet latency is log-normal with this median.
    pub latency_median_seconds: f64,
    pub latency_sigma: f64,
    pub fast_window_seconds: i64,
    pub planting: Option<Planting>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            seed: 1,
            states: vec![
                StateSpec {
                    name: "alpha".into(),
                    io_users: 50,
                    control_users: 50,
                },
                StateSpec {
                    name: "beta".into(),
                    io_users: 50,
                    control_users: 50,
                },
            ],
            activity: Activity::Uniform { min: 5, max: 15 },
            retweet_rate: 0.4,
            reply_rate: 0.1,
            matched_activity: true,
            tweet_pool: 5_000,
            tweet_popularity: 0.0,
            external_accounts: 1_000,
            domain_pool: 500,
            hashtag_pool: 1_000,
            vocabulary: 20_000,
            vocabulary_exponent: 0.0,
            words_min: 3,
            words_max: 12,
            hashtag_rate: 0.3,
            url_rate: 0.2,
            in_scope_rate: 0.05,
            home_bias: 0.8,
            start_time: 1_600_000_000,
            window_seconds: 30 * 86_400,
            latency_median_seconds: 300.0,
            latency_sigma: 2.5,
            fast_window_seconds: 10,
            planting: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    /// Dotted path of the offending field.
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "INVALID_CONFIG at `{}`: {}", self.field, self.message)
    }
}

impl core::error::Error for ConfigError {}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        field: field.into(),
        message: message.into(),
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.states.is_empty() {
            return Err(invalid("states", "at least one state is required"));
        }
        let mut names = BTreeMap::new();
        for (i, s) in self.states.iter().enumerate() {
            let n = s.name.trim();
            if n.is_empty() || n.to_lowercase() != n || n.contains(',') {
                return Err(invalid(
                    format!("states[{i}].name"),
                    "must be a non-empty lowercase label without commas",
                ));
            }
            if names.insert(n, i).is_some() {
                return Err(invalid(format!("states[{i}].name"), "duplicate state"));
            }
        }
        match self.activity {
            Activity::Uniform { min, max } if min > max => {
                return Err(invalid("activity.min", "min exceeds max"))
            }
            Activity::Zipf { exponent, max } if max == 0 || exponent.is_nan() || exponent < 0.0 => {
                return Err(invalid("activity", "zipf needs max >= 1 and exponent >= 0"))
            }
            _ => {}
        }
        for (field, v) in [
            ("retweet_rate", self.retweet_rate),
            ("reply_rate", self.reply_rate),
            ("hashtag_rate", self.hashtag_rate),
            ("url_rate", self.url_rate),
            ("in_scope_rate", self.in_scope_rate),
            ("home_bias", self.home_bias),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(invalid(field, "rate must lie in [0, 1]"));
            }
        }
        if self.retweet_rate + self.reply_rate > 1.0 {
            return Err(invalid("reply_rate", "retweet_rate + reply_rate exceeds 1"));
        }
        for (field, v) in [
            ("tweet_pool", self.tweet_pool),
            ("external_accounts", self.external_accounts),
            ("domain_pool", self.domain_pool),
            ("hashtag_pool", self.hashtag_pool),
            ("vocabulary", self.vocabulary),
        ] {
            if v == 0 {
                return Err(invalid(field, "pool size must be positive"));
            }
        }
        if self.words_min > self.words_max {
            return Err(invalid("words_min", "words_min exceeds words_max"));
        }
        if self.window_seconds <= 0 {
            return Err(invalid("window_seconds", "must be positive"));
        }
        if self.latency_median_seconds.is_nan()
            || self.latency_median_seconds <= 0.0
            || self.latency_sigma.is_nan()
            || self.latency_sigma < 0.0
        {
            return Err(invalid(
                "latency_median_seconds",
                "median must be positive, sigma non-negative",
            ));
        }
        if self.tweet_popularity.is_nan()
            || self.tweet_popularity < 0.0
            || self.vocabulary_exponent.is_nan()
            || self.vocabulary_exponent < 0.0
        {
            return Err(invalid(
                "tweet_popularity",
                "exponents must be non-negative",
            ));
        }
        if let Some(p) = &self.planting {
            for (field, v) in [
                ("planting.co_retweet_rate", p.co_retweet_rate),
                ("planting.fast_retweet_fraction", p.fast_retweet_fraction),
                ("planting.engagement_rate", p.engagement_rate),
            ] {
                if !(0.0..=1.0).contains(&v) {
                    return Err(invalid(field, "rate must lie in [0, 1]"));
                }
            }
            let (a, b) = (&p.state_pair.0, &p.state_pair.1);
            if a == b {
                return Err(invalid("planting.state_pair", "states must differ"));
            }
            for (k, s) in [("0", a), ("1", b)] {
                let Some(&i) = names.get(s.as_str()) else {
                    return Err(invalid(
                        format!("planting.state_pair.{k}"),
                        format!("undeclared state `{s}`"),
                    ));
                };
                if p.colluders_per_state > self.states[i].io_users {
                    return Err(invalid(
                        "planting.colluders_per_state",
                        format!("exceeds io_users of `{s}`"),
                    ));
                }
            }
        }
        Ok(())
    }

    fn active_planting(&self) -> Option<&Planting> {
        self.planting.as_ref().filter(|p| p.colluders_per_state > 0)
    }
}

/// Analytic expectations (mean, standard deviation) for generated totals.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Expectation {
    pub users: usize,
    pub posts: (f64, f64),
    pub retweets: (f64, f64),
    pub replies: (f64, f64),
    pub originals: (f64, f64),
    pub colluder_retweets: (f64, f64),
    /// Colluder retweets drawn from the dedicated pool (assumes a non-empty pool).
    pub planted_co_retweets: (f64, f64),
}

/// Expected totals, computed from the config alone.
pub fn describe(cfg: &ScenarioConfig) -> Result<Expectation, ConfigError> {
    cfg.validate()?;
    let (mu, var) = cfg.activity.moments();
    // Sum of squared profile multiplicities, for the variance of totals.
    let mut users = 0usize;
    let mut weight_sq = 0.0;
    for s in &cfg.states {
        users += s.io_users + s.control_users;
        if cfg.matched_activity && s.io_users > 0 {
            let mut mult = vec![1.0f64; s.io_users];
            for i in 0..s.control_users {
                mult[i % s.io_users] += 1.0;
            }
            weight_sq += mult.iter().map(|m| m * m).sum::<f64>();
        } else {
            weight_sq += (s.io_users + s.control_users) as f64;
        }
    }
    let thinned = |rate: f64, n_users: f64, wsq: f64| -> (f64, f64) {
        let mean = n_users * mu * rate;
        let v = rate * (1.0 - rate) * mu + rate * rate * var;
        (mean, libm::sqrt(wsq * v))
    };
    let n = users as f64;
    let original_rate = 1.0 - cfg.retweet_rate - cfg.reply_rate;
    let colluders = cfg
        .active_planting()
        .map_or(0.0, |p| 2.0 * p.colluders_per_state as f64);
    let co_rate = cfg.active_planting().map_or(0.0, |p| p.co_retweet_rate);
    Ok(Expectation {
        users,
        posts: thinned(1.0, n, weight_sq),
        retweets: thinned(cfg.retweet_rate, n, weight_sq),
        replies: thinned(cfg.reply_rate, n, weight_sq),
        originals: thinned(original_rate, n, weight_sq),
        colluder_retweets: thinned(cfg.retweet_rate, colluders, colluders),
        planted_co_retweets: thinned(cfg.retweet_rate * co_rate, colluders, colluders),
    })
}

/// Generated dataset plus ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthOutput {
    pub actors: Vec<Actor>,
    pub posts: Vec<Post>,
    /// Colluder actor ids, sorted.
    pub colluders: Vec<String>,
    /// Post ids of the dedicated co-retweet pool.
    pub planted_pool: Vec<String>,
    pub planted_co_retweets: usize,
}

/// Inverse-CDF sampler over `0..n` with weights `(i+1)^-exponent`.
struct Popularity {
    n: usize,
    cdf: Option<Vec<f64>>,
}

impl Popularity {
    fn new(n: usize, exponent: f64) -> Popularity {
        let cdf = (exponent > 0.0).then(|| {
            let mut acc = 0.0;
            (1..=n)
                .map(|k| {
                    acc += libm::pow(k as f64, -exponent);
                    acc
                })
                .collect()
        });
        Popularity { n, cdf }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        match &self.cdf {
            None => rng.gen_range(0..self.n),
            Some(cdf) => {
                let u = rng.gen::<f64>() * cdf[self.n - 1];
                cdf.partition_point(|&c| c <= u).min(self.n - 1)
            }
        }
    }
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; 1 - u keeps the log argument in (0, 1].
    let u1 = 1.0 - rng.gen::<f64>();
    let u2 = rng.gen::<f64>();
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(core::f64::consts::TAU * u2)
}

#[derive(Clone)]
struct Content {
    text: String,
    hashtags: Vec<String>,
    urls: Vec<String>,
}

struct Pools {
    tweets: Popularity,
    vocab: Popularity,
    hashtags: Popularity,
    domains: Popularity,
}

fn make_content(cfg: &ScenarioConfig, pools: &Pools, rng: &mut ChaCha8Rng) -> Content {
    let words = rng.gen_range(cfg.words_min..=cfg.words_max);
    let mut text = String::new();
    for i in 0..words {
        if i > 0 {
            text.push(' ');
        }
        text.push_str(&format!("w{}", pools.vocab.sample(rng)));
    }
    let mut hashtags = Vec::new();
    if rng.gen::<f64>() < cfg.hashtag_rate {
        let tag = format!("h{}", pools.hashtags.sample(rng));
        text.push_str(&format!(" #{tag}"));
        hashtags.push(tag);
    }
    let mut urls = Vec::new();
    if rng.gen::<f64>() < cfg.url_rate {
        let d = pools.domains.sample(rng);
        let prefix = if rng.gen::<bool>() { "www." } else { "" };
        let url = format!(
            "https://{prefix}d{d}.example/{}",
            rng.gen_range(0..1_000_000u32)
        );
        text.push(' ');
        text.push_str(&url);
        urls.push(url);
    }
    Content {
        text,
        hashtags,
        urls,
    }
}

struct User {
    id: String,
    state: usize,
    cohort: Cohort,
    slots: Vec<PostKind>,
    colluder: bool,
}

struct Original {
    post_id: String,
    author: usize,
    created_at: i64,
    content: Content,
}

fn draw_slots(cfg: &ScenarioConfig, pmf: &[(usize, f64)], rng: &mut ChaCha8Rng) -> Vec<PostKind> {
    let u = rng.gen::<f64>();
    let mut acc = 0.0;
    let mut n = pmf.last().map_or(0, |&(k, _)| k);
    for &(k, p) in pmf {
        acc += p;
        if u < acc {
            n = k;
            break;
        }
    }
    (0..n)
        .map(|_| {
            let r = rng.gen::<f64>();
            if r < cfg.retweet_rate {
                PostKind::Retweet
            } else if r < cfg.retweet_rate + cfg.reply_rate {
                PostKind::Reply
            } else {
                PostKind::Original
            }
        })
        .collect()
}

/// Generates actors and posts. Same config, same output.
pub fn generate(cfg: &ScenarioConfig) -> Result<SynthOutput, ConfigError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pmf = cfg.activity.pmf();
    let pools = Pools {
        tweets: Popularity::new(cfg.tweet_pool, cfg.tweet_popularity),
        vocab: Popularity::new(cfg.vocabulary, cfg.vocabulary_exponent),
        hashtags: Popularity::new(cfg.hashtag_pool, 0.0),
        domains: Popularity::new(cfg.domain_pool, 0.0),
    };
    let planting = cfg.active_planting();
    let state_index = |name: &str| cfg.states.iter().position(|s| s.name == name);
    let planted_states: Option<(usize, usize)> =
        planting.and_then(|p| Some((state_index(&p.state_pair.0)?, state_index(&p.state_pair.1)?)));

    // Users and activity profiles.
    let mut users: Vec<User> = Vec::new();
    // group[state][cohort] -> user indices
    let mut groups: Vec<[Vec<usize>; 2]> = vec![[Vec::new(), Vec::new()]; cfg.states.len()];
    let mut colluders_of: Vec<Vec<usize>> = vec![Vec::new(); cfg.states.len()];
    for (si, spec) in cfg.states.iter().enumerate() {
        let planted_here = planted_states.is_some_and(|(a, b)| a == si || b == si);
        let mut io_profiles = Vec::with_capacity(spec.io_users);
        for i in 0..spec.io_users {
            let slots = draw_slots(cfg, &pmf, &mut rng);
            io_profiles.push(slots.clone());
            let colluder = planted_here && i < planting.map_or(0, |p| p.colluders_per_state);
            if colluder {
                colluders_of[si].push(users.len());
            }
            groups[si][0].push(users.len());
            users.push(User {
                id: format!("{}_io_{i:05}", spec.name),
                state: si,
                cohort: Cohort::Io,
                slots,
                colluder,
            });
        }
        for i in 0..spec.control_users {
            let slots = if cfg.matched_activity && spec.io_users > 0 {
                io_profiles[i % spec.io_users].clone()
            } else {
                draw_slots(cfg, &pmf, &mut rng)
            };
            groups[si][1].push(users.len());
            users.push(User {
                id: format!("{}_ctl_{i:05}", spec.name),
                state: si,
                cohort: Cohort::Control,
                slots,
                colluder: false,
            });
        }
    }

    // Originals first so retweets can point at them.
    let mut originals: Vec<Original> = Vec::new();
    let mut originals_of: Vec<Vec<usize>> = vec![Vec::new(); users.len()];
    let mut group_originals: Vec<[Vec<usize>; 2]> =
        vec![[Vec::new(), Vec::new()]; cfg.states.len()];
    for (ui, u) in users.iter().enumerate() {
        for (slot, kind) in u.slots.iter().enumerate() {
            if *kind != PostKind::Original {
                continue;
            }
            let created_at = cfg.start_time + rng.gen_range(0..cfg.window_seconds);
            let content = make_content(cfg, &pools, &mut rng);
            let oi = originals.len();
            originals_of[ui].push(oi);
            group_originals[u.state][cohort_slot(u.cohort)].push(oi);
            originals.push(Original {
                post_id: format!("{}_p{slot:04}", u.id),
                author: ui,
                created_at,
                content,
            });
        }
    }

    // Dedicated pool: colluder originals, round-robin over both states.
    let mut pool: Vec<usize> = Vec::new();
    if let (Some(p), Some((a, b))) = (planting, planted_states) {
        let mut order = Vec::new();
        for (&ca, &cb) in colluders_of[a]
            .iter()
            .zip(&colluders_of[b])
            .take(p.colluders_per_state)
        {
            order.push(ca);
            order.push(cb);
        }
        let mut depth = 0;
        while pool.len() < p.co_retweet_pool_size {
            let mut progressed = false;
            for &ui in &order {
                if let Some(&oi) = originals_of[ui].get(depth) {
                    progressed = true;
                    if pool.len() < p.co_retweet_pool_size {
                        pool.push(oi);
                    }
                }
            }
            if !progressed {
                break;
            }
            depth += 1;
        }
    }

    let mut external: BTreeMap<usize, (i64, Content)> = BTreeMap::new();
    let mut external_source = |idx: usize, rng: &mut ChaCha8Rng| -> (i64, Content) {
        external
            .entry(idx)
            .or_insert_with(|| {
                let at = cfg.start_time + rng.gen_range(0..cfg.window_seconds);
                (at, make_content(cfg, &pools, rng))
            })
            .clone()
    };
    let organic_latency = |rng: &mut ChaCha8Rng| -> i64 {
        let z = standard_normal(rng);
        let secs = cfg.latency_median_seconds * libm::exp(cfg.latency_sigma * z);
        libm::floor(secs.min(1e9)) as i64
    };
    let fast_latency = |rng: &mut ChaCha8Rng| rng.gen_range(0..=cfg.fast_window_seconds);

    // In-scope target state: own state with `home_bias`, else another state.
    let target_state = |own: usize, rng: &mut ChaCha8Rng| -> usize {
        let n = cfg.states.len();
        if n == 1 || rng.gen::<f64>() < cfg.home_bias {
            own
        } else {
            let k = rng.gen_range(0..n - 1);
            if k >= own {
                k + 1
            } else {
                k
            }
        }
    };

    let mut posts: Vec<Post> = Vec::new();
    let mut planted_co_retweets = 0;
    let mut next_original = vec![0usize; users.len()];
    for (ui, u) in users.iter().enumerate() {
        let partner = if u.colluder {
            planted_states.map(|(a, b)| if u.state == a { b } else { a })
        } else {
            None
        };
        for (slot, kind) in u.slots.iter().enumerate() {
            let post_id = format!("{}_p{slot:04}", u.id);
            match kind {
                PostKind::Original => {
                    let o = &originals[originals_of[ui][next_original[ui]]];
                    next_original[ui] += 1;
                    posts.push(Post {
                        post_id,
                        author_id: u.id.clone(),
                        created_at: o.created_at,
                        kind: PostKind::Original,
                        text: o.content.text.clone(),
                        retweet_of: None,
                        reply_to_author: None,
                        urls: o.content.urls.clone(),
                        hashtags: o.content.hashtags.clone(),
                    });
                }
                PostKind::Retweet => {
                    let mut source: Option<(usize, bool)> = None;
                    if let (Some(p), Some(partner)) = (planting, partner) {
                        if !pool.is_empty() && rng.gen::<f64>() < p.co_retweet_rate {
                            let oi = pool[rng.gen_range(0..pool.len())];
                            let fast = rng.gen::<f64>() < p.fast_retweet_fraction;
                            source = Some((oi, fast));
                            planted_co_retweets += 1;
                        } else if rng.gen::<f64>() < p.engagement_rate {
                            let mate = colluders_of[partner]
                                [rng.gen_range(0..colluders_of[partner].len())];
                            let theirs = &originals_of[mate];
                            if !theirs.is_empty() {
                                source = Some((theirs[rng.gen_range(0..theirs.len())], false));
                            }
                        }
                    }
                    if source.is_none() && rng.gen::<f64>() < cfg.in_scope_rate {
                        let ts = target_state(u.state, &mut rng);
                        let cands = &group_originals[ts][cohort_slot(u.cohort)];
                        if !cands.is_empty() {
                            source = Some((cands[rng.gen_range(0..cands.len())], false));
                        }
                    }
                    let (src_post, src_author, src_at, content, fast) = match source {
                        Some((oi, fast)) => {
                            let o = &originals[oi];
                            (
                                o.post_id.clone(),
                                users[o.author].id.clone(),
                                o.created_at,
                                o.content.clone(),
                                fast,
                            )
                        }
                        None => {
                            let idx = pools.tweets.sample(&mut rng);
                            let (at, content) = external_source(idx, &mut rng);
                            (
                                format!("t{idx}"),
                                format!("ext_{}", idx % cfg.external_accounts),
                                at,
                                content,
                                false,
                            )
                        }
                    };
                    let latency = if fast {
                        fast_latency(&mut rng)
                    } else {
                        organic_latency(&mut rng)
                    };
                    posts.push(Post {
                        post_id,
                        author_id: u.id.clone(),
                        created_at: src_at + latency,
                        kind: PostKind::Retweet,
                        text: format!("RT {}", content.text),
                        retweet_of: Some(RetweetRef {
                            post_id: src_post,
                            author_id: src_author,
                            created_at: Some(src_at),
                        }),
                        reply_to_author: None,
                        urls: content.urls,
                        hashtags: content.hashtags,
                    });
                }
                PostKind::Reply => {
                    let mut target: Option<String> = None;
                    if let (Some(p), Some(partner)) = (planting, partner) {
                        if rng.gen::<f64>() < p.engagement_rate {
                            let mate = colluders_of[partner]
                                [rng.gen_range(0..colluders_of[partner].len())];
                            target = Some(users[mate].id.clone());
                        }
                    }
                    if target.is_none() && rng.gen::<f64>() < cfg.in_scope_rate {
                        let ts = target_state(u.state, &mut rng);
                        let cands = &groups[ts][cohort_slot(u.cohort)];
                        if !cands.is_empty() {
                            let t = cands[rng.gen_range(0..cands.len())];
                            if t != ui {
                                target = Some(users[t].id.clone());
                            }
                        }
                    }
                    let target = target.unwrap_or_else(|| {
                        format!("ext_{}", rng.gen_range(0..cfg.external_accounts))
                    });
                    let content = make_content(cfg, &pools, &mut rng);
                    posts.push(Post {
                        post_id,
                        author_id: u.id.clone(),
                        created_at: cfg.start_time + rng.gen_range(0..cfg.window_seconds),
                        kind: PostKind::Reply,
                        text: content.text,
                        retweet_of: None,
                        reply_to_author: Some(target),
                        urls: content.urls,
                        hashtags: content.hashtags,
                    });
                }
            }
        }
    }

    let actors = users
        .iter()
        .map(|u| Actor {
            actor_id: u.id.clone(),
            state: cfg.states[u.state].name.clone(),
            cohort: u.cohort,
        })
        .collect();
    let mut colluders: Vec<String> = users
        .iter()
        .filter(|u| u.colluder)
        .map(|u| u.id.clone())
        .collect();
    colluders.sort();
    Ok(SynthOutput {
        actors,
        posts,
        colluders,
        planted_pool: pool
            .iter()
            .map(|&oi| originals[oi].post_id.to_string())
            .collect(),
        planted_co_retweets,
    })
}

fn cohort_slot(c: Cohort) -> usize {
    match c {
        Cohort::Io => 0,
        Cohort::Control => 1,
    }
}
