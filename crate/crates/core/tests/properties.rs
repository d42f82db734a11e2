//! Property tests over randomly generated datasets and samples.

use std::collections::{BTreeMap, BTreeSet};

use cotrace_core::aggregate::{aggregate_interactions, jaccard};
use cotrace_core::ingest::{validate_dataset, PostRecord};
use cotrace_core::interactions::{
    count_interactions, suspiciousness, suspiciousness_score, InteractionKind, InteractionMode,
};
use cotrace_core::similarity::{
    cosine_network, interstate_edges, interstate_samples, tfidf_vectorize,
};
use cotrace_core::stats::{mann_whitney_greater, rank_with_ties};
use cotrace_core::synth::{generate, Activity, Planting, ScenarioConfig, StateSpec};
use cotrace_core::traces::{
    default_stopwords, extract, preprocess_text, FeatureBag, TraceKind, TraceOptions,
};
use cotrace_core::{Actor, Cohort, Dataset, PostKind};
use proptest::prelude::*;

const STATES: [&str; 3] = ["egypt", "iran", "uae"];

/// A raw post description: (author, kind 0..3, target, source tweet,
/// created_at, latency, hashtags).
type RawPost = (usize, u8, usize, usize, i64, i64, Vec<u8>);

fn raw_dataset() -> impl Strategy<Value = (Vec<(u8, bool)>, Vec<RawPost>)> {
    let actors = prop::collection::vec((0u8..3, any::<bool>()), 1..16);
    actors.prop_flat_map(|actors| {
        let n = actors.len();
        // Targets may point past the actor table: dangling references.
        let post = (
            0..n,
            0u8..3,
            0..n + 3,
            0usize..12,
            1000i64..2000,
            0i64..30,
            prop::collection::vec(0u8..6, 0..3),
        );
        (Just(actors), prop::collection::vec(post, 0..60))
    })
}

fn build_dataset(actors: &[(u8, bool)], posts: &[RawPost]) -> Dataset {
    let actors: Vec<Actor> = actors
        .iter()
        .enumerate()
        .map(|(i, &(s, io))| Actor {
            actor_id: format!("u{i}"),
            state: STATES[s as usize].to_string(),
            cohort: if io { Cohort::Io } else { Cohort::Control },
        })
        .collect();
    let posts = posts
        .iter()
        .enumerate()
        .map(|(i, (author, kind, target, tweet, at, latency, tags))| {
            let mut r = PostRecord {
                post_id: format!("p{i}"),
                author_id: format!("u{author}"),
                created_at: *at,
                text: format!("post {i} words here"),
                hashtags: tags.iter().map(|t| format!("#Tag{t}")).collect(),
                ..PostRecord::default()
            };
            match kind {
                1 => {
                    r.retweet_of_post_id = Some(format!("t{tweet}"));
                    r.retweet_of_author_id = Some(format!("u{target}"));
                    r.retweet_of_created_at = Some(at - latency);
                }
                2 => r.reply_to_author = Some(format!("u{target}")),
                _ => {}
            }
            r.into_post(i + 1).expect("well-formed record")
        })
        .collect();
    validate_dataset(actors, posts, true)
        .expect("authors exist")
        .0
}

fn small_scenario() -> impl Strategy<Value = ScenarioConfig> {
    (
        any::<u64>(),
        1usize..4,
        0usize..12,
        0usize..12,
        0usize..5,
        0.0f64..0.6,
        0.0f64..0.3,
    )
        .prop_map(
            |(seed, n_states, io, ctl, colluders, retweet_rate, reply_rate)| {
                let states: Vec<StateSpec> = (0..n_states)
                    .map(|i| StateSpec {
                        name: STATES[i].to_string(),
                        io_users: io,
                        control_users: ctl,
                    })
                    .collect();
                let planting = (n_states >= 2 && colluders <= io).then(|| Planting {
                    state_pair: (STATES[0].to_string(), STATES[1].to_string()),
                    colluders_per_state: colluders,
                    co_retweet_pool_size: 3,
                    co_retweet_rate: 0.8,
                    fast_retweet_fraction: 0.5,
                    engagement_rate: 0.5,
                });
                ScenarioConfig {
                    seed,
                    states,
                    activity: Activity::Uniform { min: 0, max: 8 },
                    retweet_rate,
                    reply_rate,
                    tweet_pool: 40,
                    in_scope_rate: 0.3,
                    vocabulary: 60,
                    hashtag_pool: 20,
                    domain_pool: 10,
                    planting,
                    ..ScenarioConfig::default()
                }
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn indexes_agree_with_actor_map((actors, posts) in raw_dataset()) {
        let ds = build_dataset(&actors, &posts);
        prop_assert!(ds.indexes_consistent());
        for state in ds.states() {
            for c in Cohort::ALL {
                let want: BTreeSet<String> = ds
                    .actors()
                    .filter(|a| a.state == state && a.cohort == c)
                    .map(|a| a.actor_id.clone())
                    .collect();
                let got = ds.group(state, c).cloned().unwrap_or_default();
                prop_assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn report_counts_sum_to_actor_total(cfg in small_scenario()) {
        let out = generate(&cfg).unwrap();
        let (ds, report) = validate_dataset(out.actors, out.posts, true).unwrap();
        let sum: usize = report.counts.values().flat_map(|m| m.values()).sum();
        prop_assert_eq!(sum, ds.actor_count());
        prop_assert_eq!(report.total_actors, ds.actor_count());
    }

    #[test]
    fn synth_is_deterministic_and_strictly_valid(cfg in small_scenario()) {
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        prop_assert!(a == b);
        prop_assert!(validate_dataset(a.actors, a.posts, true).is_ok());
    }

    #[test]
    fn fast_retweets_are_a_subset_of_retweets((actors, posts) in raw_dataset()) {
        let ds = build_dataset(&actors, &posts);
        let opts = TraceOptions::default();
        let all = extract(&ds, TraceKind::CoRetweet, &opts);
        let fast = extract(&ds, TraceKind::FastRetweet, &opts);
        let all: BTreeMap<&str, &FeatureBag> = all.bags.iter().map(|b| (b.actor_id.as_str(), b)).collect();
        for bag in &fast.bags {
            let full = all.get(bag.actor_id.as_str()).expect("fast retweeter also retweets");
            for (f, c) in &bag.counts {
                prop_assert!(full.counts.get(f).copied().unwrap_or(0) >= *c);
            }
        }
        // Widening the window can only add fast retweets.
        let wide = extract(&ds, TraceKind::FastRetweet, &TraceOptions { fast_retweet_window_seconds: 20, ..opts });
        let total = |bags: &[FeatureBag]| bags.iter().map(FeatureBag::total).sum::<u64>();
        prop_assert!(total(&wide.bags) >= total(&fast.bags));
    }

    #[test]
    fn hashtag_counts_match_posts((actors, posts) in raw_dataset()) {
        let ds = build_dataset(&actors, &posts);
        let ex = extract(&ds, TraceKind::CoHashtag, &TraceOptions::default());
        for bag in &ex.bags {
            let want: u64 = ds.posts_by(&bag.actor_id).map(|p| p.hashtags.len() as u64).sum();
            prop_assert_eq!(bag.total(), want);
            prop_assert!(bag.counts.keys().all(|k| !k.starts_with('#') && k.to_lowercase() == *k));
        }
    }

    #[test]
    fn preprocessing_is_idempotent(text in "[ -~àéßΣя😀#@]{0,60}") {
        let sw = default_stopwords();
        let once = preprocess_text(&text, &sw);
        let twice = preprocess_text(&once.join(" "), &sw);
        prop_assert_eq!(once, twice);
    }
}

fn bags_strategy() -> impl Strategy<Value = Vec<FeatureBag>> {
    prop::collection::vec(prop::collection::btree_map(0u8..15, 1u32..5, 1..6), 0..25).prop_map(
        |rows| {
            rows.into_iter()
                .enumerate()
                .map(|(i, counts)| FeatureBag {
                    actor_id: format!("a{i:02}"),
                    trace: TraceKind::CoUrl,
                    counts: counts
                        .into_iter()
                        .map(|(f, c)| (format!("f{f}"), c))
                        .collect(),
                })
                .collect()
        },
    )
}

fn edge_map(bags: &[FeatureBag]) -> BTreeMap<(String, String), f64> {
    let vectors = tfidf_vectorize(bags);
    cosine_network(&vectors, 10_000)
        .edges()
        .map(|e| ((e.actor_a.to_string(), e.actor_b.to_string()), e.weight))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cosine_edges_are_ordered_and_bounded(bags in bags_strategy()) {
        for ((a, b), w) in edge_map(&bags) {
            prop_assert!(a < b);
            prop_assert!(w > 0.0 && w <= 1.0);
        }
    }

    #[test]
    fn cosine_ignores_input_order(bags in bags_strategy(), seed in any::<u64>()) {
        let mut shuffled = bags.clone();
        let n = shuffled.len();
        for i in (1..n).rev() {
            shuffled.swap(i, (seed as usize).wrapping_mul(i + 7) % (i + 1));
        }
        prop_assert_eq!(edge_map(&bags), edge_map(&shuffled));
    }

    #[test]
    fn cosine_ignores_uniform_count_scaling(bags in bags_strategy(), k in 2u32..6) {
        let scaled: Vec<FeatureBag> = bags
            .iter()
            .map(|b| FeatureBag {
                counts: b.counts.iter().map(|(f, c)| (f.clone(), c * k)).collect(),
                ..b.clone()
            })
            .collect();
        let a = edge_map(&bags);
        let b = edge_map(&scaled);
        prop_assert!(a.keys().eq(b.keys()));
        for (key, w) in &a {
            prop_assert!((w - b[key]).abs() < 1e-12);
        }
    }

    #[test]
    fn interstate_samples_agree_with_single_queries((actors, posts) in raw_dataset()) {
        let ds = build_dataset(&actors, &posts);
        let ex = extract(&ds, TraceKind::CoHashtag, &TraceOptions::default());
        let net = cosine_network(&tfidf_vectorize(&ex.bags), 10_000);
        let all = interstate_samples(&net, &ds);
        for c in Cohort::ALL {
            for (i, a) in STATES.iter().enumerate() {
                for b in &STATES[i + 1..] {
                    let mut one = interstate_edges(&net, &ds, c, a, b);
                    let mut many = all.get(&(c, a.to_string(), b.to_string())).cloned().unwrap_or_default();
                    one.sort_by(f64::total_cmp);
                    many.sort_by(f64::total_cmp);
                    prop_assert_eq!(one, many);
                }
            }
        }
    }
}

fn sample() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((0u8..8).prop_map(f64::from), 1..9)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn u_statistics_complement(io in sample(), ctrl in sample()) {
        let a = mann_whitney_greater(&io, &ctrl, 2_000_000).unwrap();
        let b = mann_whitney_greater(&ctrl, &io, 2_000_000).unwrap();
        prop_assert_eq!(a.u_io + b.u_io, (io.len() * ctrl.len()) as f64);
        prop_assert!((a.effect - a.u_io / (io.len() * ctrl.len()) as f64).abs() < 1e-15);
        prop_assert!(a.p_one_sided > 0.0 && a.p_one_sided <= 1.0);
        // One-sided tails in opposite directions cover every outcome.
        prop_assert!(a.p_one_sided + b.p_one_sided >= 1.0 - 1e-12);
    }

    /// Holds for tie-free samples: the exact null distribution is then fixed
    /// and p is a decreasing function of U. (With ties it is conditional on
    /// the tie pattern, which moving a value can change.)
    #[test]
    fn raising_an_io_value_never_raises_p(
        values in prop::collection::btree_set(0u16..1000, 2..16),
        split in any::<prop::sample::Index>(),
        pick in any::<prop::sample::Index>(),
    ) {
        let v: Vec<f64> = values.iter().rev().map(|&x| f64::from(x)).collect();
        let cut = 1 + split.index(v.len() - 1);
        let (io, ctrl) = v.split_at(cut);
        let before = mann_whitney_greater(io, ctrl, u64::MAX).unwrap();
        let mut raised = io.to_vec();
        // Above every value drawn, so no tie is created.
        let i = pick.index(raised.len());
        raised[i] = 1000.0;
        let after = mann_whitney_greater(&raised, ctrl, u64::MAX).unwrap();
        prop_assert!(after.u_io >= before.u_io);
        prop_assert!(after.p_one_sided <= before.p_one_sided + 1e-12);
    }

    #[test]
    fn approximation_agrees_with_exact_direction(io in sample(), ctrl in sample()) {
        let exact = mann_whitney_greater(&io, &ctrl, u64::MAX).unwrap();
        let approx = mann_whitney_greater(&io, &ctrl, 0).unwrap();
        prop_assert_eq!(exact.u_io, approx.u_io);
        prop_assert_eq!(exact.effect, approx.effect);
    }

    #[test]
    fn ranks_sum_to_triangular_number(values in prop::collection::vec(0u8..5, 0..30)) {
        let v: Vec<f64> = values.into_iter().map(f64::from).collect();
        let n = v.len() as f64;
        let ranks = rank_with_ties(&v);
        prop_assert!((ranks.iter().sum::<f64>() - n * (n + 1.0) / 2.0).abs() < 1e-9);
    }

    #[test]
    fn suspiciousness_is_monotone_and_bounded(s_i in 1u64..50, p_c in 1u64..500, extra in 0u64..50) {
        let s_ic = s_i.min(p_c).saturating_sub(1);
        let lower = suspiciousness_score(s_ic, s_i + extra, p_c);
        let upper = suspiciousness_score(s_ic + 1, s_i + extra, p_c);
        prop_assert!(upper > lower);
        prop_assert!((0.0..=1.0).contains(&upper));
        // More unrelated activity dilutes the score.
        prop_assert!(suspiciousness_score(s_ic + 1, s_i + extra + 1, p_c) <= upper);
    }

    #[test]
    fn jaccard_is_symmetric_and_bounded(a in prop::collection::btree_set(0u8..10, 0..8), b in prop::collection::btree_set(0u8..10, 0..8)) {
        let ab = jaccard(&a, &b);
        prop_assert_eq!(ab, jaccard(&b, &a));
        match ab {
            None => prop_assert!(a.is_empty() && b.is_empty()),
            Some(j) => {
                prop_assert!((0.0..=1.0).contains(&j));
                prop_assert_eq!(j == 1.0, a == b);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pooled_sample_is_both_directions((actors, posts) in raw_dataset()) {
        let ds = build_dataset(&actors, &posts);
        for kind in [InteractionKind::Retweet, InteractionKind::Reply] {
            for c in Cohort::ALL {
                let pooled = suspiciousness(&ds, kind, c, "egypt", "iran", InteractionMode::Pooled);
                let ab = suspiciousness(&ds, kind, c, "egypt", "iran", InteractionMode::Directional);
                let ba = suspiciousness(&ds, kind, c, "iran", "egypt", InteractionMode::Directional);
                match (pooled, ab, ba) {
                    (Ok(p), Ok(x), Ok(y)) => prop_assert_eq!(p.len(), x.len() + y.len()),
                    (Err(_), x, y) => prop_assert!(x.is_err() || y.is_err()),
                    (Ok(_), x, y) => prop_assert!(false, "pooled ok but {:?} / {:?}", x.is_ok(), y.is_ok()),
                }
            }
        }
    }

    #[test]
    fn interaction_counts_skip_self_and_unknown((actors, posts) in raw_dataset()) {
        let ds = build_dataset(&actors, &posts);
        for kind in [InteractionKind::Retweet, InteractionKind::Reply] {
            let counts = count_interactions(&ds, kind);
            let mut total = 0;
            for (s, t, c) in counts.edges() {
                prop_assert!(s != t && c > 0);
                prop_assert!(ds.actor(t).is_some());
                total += c;
            }
            let want_kind = match kind {
                InteractionKind::Retweet => PostKind::Retweet,
                InteractionKind::Reply => PostKind::Reply,
            };
            let expected = ds
                .posts()
                .iter()
                .filter(|p| p.kind == want_kind)
                .filter(|p| {
                    let t = p.retweet_of.as_ref().map(|r| r.author_id.as_str()).or(p.reply_to_author.as_deref());
                    t.is_some_and(|t| t != p.author_id && ds.actor(t).is_some())
                })
                .count() as u64;
            prop_assert_eq!(total, expected);
        }
    }

    #[test]
    fn aggregate_interactions_match_user_sums((actors, posts) in raw_dataset()) {
        let ds = build_dataset(&actors, &posts);
        let counts = count_interactions(&ds, InteractionKind::Retweet);
        for c in Cohort::ALL {
            let edges = aggregate_interactions(&counts, &ds, c);
            let mut per_source: BTreeMap<&str, f64> = BTreeMap::new();
            for e in &edges {
                *per_source.entry(e.source.as_str()).or_insert(0.0) += e.weight;
                // Recompute the weight from per-user counts.
                let (mut flow, mut strength) = (0u64, 0u64);
                for (s, t, n) in counts.edges() {
                    let sa = ds.actor(s).unwrap();
                    if sa.cohort != c || sa.state != e.source {
                        continue;
                    }
                    strength += n;
                    if ds.actor(t).is_some_and(|ta| ta.cohort == c && ta.state == e.target) {
                        flow += n;
                    }
                }
                prop_assert!((e.weight - flow as f64 / strength as f64).abs() < 1e-12);
            }
            for w in per_source.values() {
                prop_assert!(*w <= 1.0 + 1e-12);
            }
        }
    }
}

/// Across many seeds, the mean of each generated total stays within four
/// standard errors of the closed-form expectation.
#[test]
fn generated_totals_match_description() {
    const SEEDS: u64 = 50;
    let mut cfg = ScenarioConfig {
        states: ["alpha", "beta", "gamma"]
            .map(|s| StateSpec {
                name: s.to_string(),
                io_users: 40,
                control_users: 55,
            })
            .to_vec(),
        activity: Activity::Uniform { min: 2, max: 30 },
        planting: Some(Planting {
            state_pair: ("alpha".into(), "beta".into()),
            colluders_per_state: 10,
            co_retweet_pool_size: 5,
            co_retweet_rate: 0.6,
            fast_retweet_fraction: 0.5,
            engagement_rate: 0.3,
        }),
        ..ScenarioConfig::default()
    };
    let e = cotrace_core::synth::describe(&cfg).unwrap();
    let mut sums = [0.0f64; 6];
    for seed in 0..SEEDS {
        cfg.seed = seed;
        let out = generate(&cfg).unwrap();
        assert_eq!(out.actors.len(), e.users);
        let colluders: BTreeSet<&str> = out.colluders.iter().map(String::as_str).collect();
        let count = |k: PostKind| out.posts.iter().filter(|p| p.kind == k).count() as f64;
        let colluder_retweets = out
            .posts
            .iter()
            .filter(|p| p.kind == PostKind::Retweet && colluders.contains(p.author_id.as_str()))
            .count() as f64;
        let observed = [
            out.posts.len() as f64,
            count(PostKind::Retweet),
            count(PostKind::Reply),
            count(PostKind::Original),
            colluder_retweets,
            out.planted_co_retweets as f64,
        ];
        for (s, o) in sums.iter_mut().zip(observed) {
            *s += o;
        }
    }
    let expected = [
        e.posts,
        e.retweets,
        e.replies,
        e.originals,
        e.colluder_retweets,
        e.planted_co_retweets,
    ];
    let names = [
        "posts",
        "retweets",
        "replies",
        "originals",
        "colluder_retweets",
        "planted_co_retweets",
    ];
    for ((name, (mean, sd)), sum) in names.iter().zip(expected).zip(sums) {
        let avg = sum / SEEDS as f64;
        let se = sd / (SEEDS as f64).sqrt();
        assert!(
            (avg - mean).abs() <= 4.0 * se + 1e-9,
            "{name}: mean {avg} vs expected {mean} (se {se})"
        );
    }
}
