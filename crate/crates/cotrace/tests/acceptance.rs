//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the lines are always
//! printed; the process exits non-zero when any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use cotrace::artifacts::RunSummary;
use cotrace::cli::main_with;
use cotrace::scenario::write_scenario;
use cotrace_core::aggregate::jaccard;
use cotrace_core::ingest::validate_dataset;
use cotrace_core::interactions::suspiciousness_score;
use cotrace_core::pipeline::{build, RunConfig};
use cotrace_core::similarity::{cosine_network, tfidf_vectorize, DEFAULT_POSTING_CAP};
use cotrace_core::stats::{bonferroni_threshold, mann_whitney_greater, run_all, TestMethod};
use cotrace_core::synth::{generate, Activity, Planting, ScenarioConfig, StateSpec};
use cotrace_core::traces::{FeatureBag, TraceKind};
use cotrace_core::Layer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

// Criterion 1
const ORACLE_PAIRS: usize = 2_000;
const ORACLE_MAX_N: usize = 8;
const ORACLE_TOL: f64 = 1e-12;
const ORACLE_BUDGET: Duration = Duration::from_secs(30);
// Criterion 2
const APPROX_PAIRS: usize = 500;
const APPROX_MIN_N: usize = 5;
const APPROX_MAX_N: usize = 20;
const APPROX_TOL: f64 = 0.02;
const APPROX_BUDGET: Duration = Duration::from_secs(60);
// Criterion 3
const NULL_SEEDS: u64 = 200;
const NULL_ALPHA: f64 = 0.05;
const NULL_FRACTION: (f64, f64) = (0.02, 0.09);
const NULL_BUDGET: Duration = Duration::from_secs(300);
// Criterion 4
const POWER_SEEDS: u64 = 100;
const POWER_MIN_HITS: usize = 95;
const POWER_LAYERS: [Layer; 3] = [Layer::CoRetweet, Layer::FastRetweet, Layer::Retweet];
const POWER_BUDGET: Duration = Duration::from_secs(600);
// Criterion 5
const JOIN_CORPORA: u64 = 50;
const JOIN_MAX_VECTORS: usize = 200;
const JOIN_TOL: f64 = 1e-9;
// Criterion 6
const SPOT_TOL: f64 = 1e-12;
// Criterion 9
const THROUGHPUT_POSTS: usize = 100_000;
const THROUGHPUT_ACTORS: usize = 10_000;
const THROUGHPUT_BUDGET: Duration = Duration::from_secs(60);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

// ---------------------------------------------------------------------------
// Criterion 1: exact U test against brute-force enumeration.

/// Twice the U statistic of `x` against `y`, by pairwise comparison.
fn doubled_u(x: &[i64], y: &[i64]) -> i64 {
    let mut u = 0;
    for a in x {
        for b in y {
            u += match a.cmp(b) {
                std::cmp::Ordering::Greater => 2,
                std::cmp::Ordering::Equal => 1,
                std::cmp::Ordering::Less => 0,
            };
        }
    }
    u
}

/// P(U >= U_obs) over every split of the pooled values into groups of the
/// observed sizes, enumerated as index subsets.
fn enumerate_upper_tail(io: &[i64], control: &[i64]) -> f64 {
    let pooled: Vec<i64> = io.iter().chain(control).copied().collect();
    let n = pooled.len();
    let k = io.len();
    let observed = doubled_u(io, control);
    let (mut hits, mut total) = (0u64, 0u64);
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let chosen: BTreeSet<usize> = idx.iter().copied().collect();
        let x: Vec<i64> = idx.iter().map(|&i| pooled[i]).collect();
        let y: Vec<i64> = (0..n)
            .filter(|i| !chosen.contains(i))
            .map(|i| pooled[i])
            .collect();
        total += 1;
        if doubled_u(&x, &y) >= observed {
            hits += 1;
        }
        // next k-combination of 0..n in lexicographic order
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return hits as f64 / total as f64;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cases: Vec<(Vec<i64>, Vec<i64>)> = (0..ORACLE_PAIRS)
        .map(|_| {
            let n1 = rng.gen_range(1..=ORACLE_MAX_N);
            let n2 = rng.gen_range(1..=ORACLE_MAX_N);
            // A small value range forces frequent ties.
            let hi = rng.gen_range(1..=6);
            let io = (0..n1).map(|_| rng.gen_range(0..=hi)).collect();
            let ctrl = (0..n2).map(|_| rng.gen_range(0..=hi)).collect();
            (io, ctrl)
        })
        .collect();
    let mut worst = 0.0f64;
    let mut failures = 0;
    let mut tied = 0;
    for (io, ctrl) in &cases {
        let fio: Vec<f64> = io.iter().map(|&v| v as f64).collect();
        let fctrl: Vec<f64> = ctrl.iter().map(|&v| v as f64).collect();
        let pooled: BTreeSet<i64> = io.iter().chain(ctrl).copied().collect();
        if pooled.len() < io.len() + ctrl.len() {
            tied += 1;
        }
        let r = mann_whitney_greater(&fio, &fctrl, cotrace_core::stats::DEFAULT_EXACT_CAP)
            .expect("non-empty");
        let oracle = enumerate_upper_tail(io, ctrl);
        let err = (r.p_one_sided - oracle).abs();
        worst = worst.max(err);
        if r.method != TestMethod::Exact || err > ORACLE_TOL {
            failures += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures == 0 && elapsed < ORACLE_BUDGET,
        format!(
            "{ORACLE_PAIRS} pairs ({tied} with ties), max |p - oracle| = {worst:.2e} (tol {ORACLE_TOL:.0e}), {failures} mismatches, {:.2}s (budget {}s)",
            elapsed.as_secs_f64(),
            ORACLE_BUDGET.as_secs()
        ),
    )
}

// ---------------------------------------------------------------------------
// Criterion 2: normal approximation close to the exact tail without ties.

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..APPROX_PAIRS {
        let n1 = rng.gen_range(APPROX_MIN_N..=APPROX_MAX_N);
        let n2 = rng.gen_range(APPROX_MIN_N..=APPROX_MAX_N);
        // Distinct values: a shuffled range, with a random location shift.
        let shift = rng.gen_range(-5.0..5.0);
        let mut values: Vec<f64> = (0..n1 + n2).map(|i| i as f64).collect();
        for i in (1..values.len()).rev() {
            values.swap(i, rng.gen_range(0..=i));
        }
        let mut io: Vec<f64> = values[..n1].iter().map(|v| v + shift).collect();
        let ctrl = values[n1..].to_vec();
        if io.iter().any(|v| ctrl.contains(v)) {
            io = values[..n1].to_vec();
        }
        let exact = mann_whitney_greater(&io, &ctrl, u64::MAX).expect("non-empty");
        let approx = mann_whitney_greater(&io, &ctrl, 0).expect("non-empty");
        let err = (exact.p_one_sided - approx.p_one_sided).abs();
        worst = worst.max(err);
        if exact.method != TestMethod::Exact
            || approx.method != TestMethod::NormalApprox
            || err > APPROX_TOL
        {
            failures += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures == 0 && elapsed < APPROX_BUDGET,
        format!(
            "{APPROX_PAIRS} tie-free pairs, max |p_exact - p_approx| = {worst:.4} (tol {APPROX_TOL}), {failures} over, {:.2}s (budget {}s)",
            elapsed.as_secs_f64(),
            APPROX_BUDGET.as_secs()
        ),
    )
}

// ---------------------------------------------------------------------------
// Criterion 3: calibration under the null.

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let runs: Vec<(Vec<f64>, usize)> = (1..=NULL_SEEDS)
        .into_par_iter()
        .map(|seed| {
            let cfg = ScenarioConfig {
                seed,
                ..ScenarioConfig::default()
            };
            let out = generate(&cfg).expect("valid scenario");
            let (ds, _) =
                validate_dataset(out.actors, out.posts, true).expect("synth output is valid");
            let run_cfg = RunConfig::default();
            let nets = build(&ds, &run_cfg);
            let run = run_all(&ds, &nets, &run_cfg);
            let ps = run.results.iter().map(|r| r.test.p_one_sided).collect();
            (ps, run.significant().count())
        })
        .collect();
    let all_p: Vec<f64> = runs.iter().flat_map(|(p, _)| p.iter().copied()).collect();
    let m = all_p.len();
    let below = all_p.iter().filter(|&&p| p < NULL_ALPHA).count();
    let fraction = below as f64 / m as f64;
    let family_threshold = bonferroni_threshold(NULL_ALPHA, m);
    let survivors = all_p.iter().filter(|&&p| p < family_threshold).count();
    let per_run_hits = runs.iter().filter(|(_, s)| *s > 0).count();
    let elapsed = start.elapsed();
    outcome(
        (NULL_FRACTION.0..=NULL_FRACTION.1).contains(&fraction) && survivors == 0 && elapsed < NULL_BUDGET,
        format!(
            "{m} experiments over {NULL_SEEDS} runs, fraction p<{NULL_ALPHA} = {fraction:.4} (range [{}, {}]), {survivors} survive Bonferroni over the study (threshold {family_threshold:.2e}); info: {per_run_hits} runs with a per-run Bonferroni hit; {:.1}s (budget {}s)",
            NULL_FRACTION.0,
            NULL_FRACTION.1,
            elapsed.as_secs_f64(),
            NULL_BUDGET.as_secs()
        ),
    )
}

// ---------------------------------------------------------------------------
// Criterion 4: recovery of planted coordination.

fn power_scenario(seed: u64) -> ScenarioConfig {
    let state = |name: &str| StateSpec {
        name: name.into(),
        io_users: 520,
        control_users: 500,
    };
    ScenarioConfig {
        seed,
        states: vec![state("alpha"), state("beta")],
        activity: Activity::Uniform { min: 20, max: 60 },
        tweet_pool: 20_000,
        vocabulary: 1_000_000,
        hashtag_pool: 10_000,
        domain_pool: 5_000,
        in_scope_rate: 0.003,
        planting: Some(Planting {
            state_pair: ("alpha".into(), "beta".into()),
            colluders_per_state: 20,
            co_retweet_pool_size: 3,
            co_retweet_rate: 0.8,
            fast_retweet_fraction: 0.5,
            engagement_rate: 0.5,
        }),
        ..ScenarioConfig::default()
    }
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let hits: Vec<BTreeSet<Layer>> = (1..=POWER_SEEDS)
        .into_par_iter()
        .map(|seed| {
            let out = generate(&power_scenario(seed)).expect("valid scenario");
            let (ds, _) =
                validate_dataset(out.actors, out.posts, true).expect("synth output is valid");
            let cfg = RunConfig::default();
            let nets = build(&ds, &cfg);
            let run = run_all(&ds, &nets, &cfg);
            run.significant()
                .filter(|r| r.state_a == "alpha" && r.state_b == "beta")
                .map(|r| r.layer)
                .collect()
        })
        .collect();
    let counts: Vec<(Layer, usize)> = POWER_LAYERS
        .iter()
        .map(|&l| (l, hits.iter().filter(|h| h.contains(&l)).count()))
        .collect();
    let elapsed = start.elapsed();
    let per_layer: Vec<String> = counts
        .iter()
        .map(|(l, c)| format!("{l} {c}/{POWER_SEEDS}"))
        .collect();
    outcome(
        counts.iter().all(|&(_, c)| c >= POWER_MIN_HITS) && elapsed < POWER_BUDGET,
        format!(
            "significant runs: {} (need >= {POWER_MIN_HITS} each), {:.1}s (budget {}s)",
            per_layer.join(", "),
            elapsed.as_secs_f64(),
            POWER_BUDGET.as_secs()
        ),
    )
}

// ---------------------------------------------------------------------------
// Criterion 5: inverted-index join against all pairs.

fn criterion_5() -> Outcome {
    let mut worst = 0.0f64;
    let mut mismatched = 0;
    let mut total_edges = 0;
    for corpus in 0..JOIN_CORPORA {
        let mut rng = ChaCha8Rng::seed_from_u64(500 + corpus);
        let n = rng.gen_range(1..=JOIN_MAX_VECTORS);
        let vocab = rng.gen_range(5..400);
        let bags: Vec<FeatureBag> = (0..n)
            .map(|i| {
                let mut counts = BTreeMap::new();
                for _ in 0..rng.gen_range(1..12) {
                    *counts
                        .entry(format!("f{}", rng.gen_range(0..vocab)))
                        .or_insert(0) += rng.gen_range(1..4);
                }
                FeatureBag {
                    actor_id: format!("a{:03}", (i * 37) % 1000),
                    trace: TraceKind::CoHashtag,
                    counts,
                }
            })
            .collect();
        let vectors = tfidf_vectorize(&bags);
        let net = cosine_network(&vectors, DEFAULT_POSTING_CAP);
        let got: BTreeMap<(String, String), f64> = net
            .edges()
            .map(|e| ((e.actor_a.to_string(), e.actor_b.to_string()), e.weight))
            .collect();
        // Brute force: every pair, dense dot product over the feature map.
        let mut want: BTreeMap<(String, String), f64> = BTreeMap::new();
        for (i, x) in vectors.iter().enumerate() {
            let dense: BTreeMap<&str, f64> =
                x.weights.iter().map(|(f, w)| (f.as_str(), *w)).collect();
            for y in &vectors[i + 1..] {
                let mut dot = 0.0;
                let mut shared = false;
                for (f, w) in &y.weights {
                    if let Some(v) = dense.get(f.as_str()) {
                        dot += v * w;
                        shared = true;
                    }
                }
                if shared {
                    let key = if x.actor_id < y.actor_id {
                        (x.actor_id.clone(), y.actor_id.clone())
                    } else {
                        (y.actor_id.clone(), x.actor_id.clone())
                    };
                    want.insert(key, dot);
                }
            }
        }
        total_edges += want.len();
        if got.keys().ne(want.keys()) {
            mismatched += 1;
            continue;
        }
        for (k, w) in &want {
            worst = worst.max((got[k] - w).abs());
        }
    }
    outcome(
        mismatched == 0 && worst <= JOIN_TOL,
        format!(
            "{JOIN_CORPORA} corpora, {total_edges} edges, {mismatched} edge-set mismatches, max |w - brute force| = {worst:.2e} (tol {JOIN_TOL:.0e})"
        ),
    )
}

// ---------------------------------------------------------------------------
// Criterion 6: formula spot checks.

fn criterion_6() -> Outcome {
    let score = suspiciousness_score(5, 10, 100);
    let set = |xs: &[&'static str]| xs.iter().copied().collect::<BTreeSet<&str>>();
    let jac = jaccard(&set(&["a", "b", "c"]), &set(&["b", "c", "d"]));
    let thr = bonferroni_threshold(0.05, 197);
    let pass = score == 0.025 && jac == Some(0.5) && (thr - 0.05 / 197.0).abs() <= SPOT_TOL;
    outcome(
        pass,
        format!("suspiciousness(S_i=10, S_ic=5, P_c=100) = {score}, jaccard = {jac:?}, bonferroni(0.05, 197) = {thr:.6e}"),
    )
}

// ---------------------------------------------------------------------------
// Criteria 7-9 drive the command line in-process.

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = main_with(
        std::iter::once("cotrace").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8_lossy(&out).into_owned(),
        String::from_utf8_lossy(&err).into_owned(),
    )
}

fn small_fixture(dir: &Path) -> (PathBuf, PathBuf) {
    let mut cfg = ScenarioConfig {
        seed: 7,
        ..ScenarioConfig::default()
    };
    cfg.states.push(StateSpec {
        name: "gamma".into(),
        io_users: 30,
        control_users: 30,
    });
    cfg.planting = Some(Planting {
        state_pair: ("alpha".into(), "gamma".into()),
        colluders_per_state: 8,
        co_retweet_pool_size: 3,
        co_retweet_rate: 0.8,
        fast_retweet_fraction: 0.5,
        engagement_rate: 0.5,
    });
    let (_, files) = write_scenario(&cfg, dir).expect("fixture written");
    (files.actors, files.posts)
}

fn criterion_7(tmp: &Path) -> Outcome {
    let (actors, posts) = small_fixture(&tmp.join("fixture7"));
    let out = tmp.join("run7");
    let (code, _, err) = cli(&[
        "test",
        "--actors",
        actors.to_str().unwrap(),
        "--posts",
        posts.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    if code != 0 {
        return outcome(false, format!("bare test run exited {code}: {err}"));
    }
    let summary = match RunSummary::read(&out) {
        Ok(s) => s,
        Err(e) => return outcome(false, format!("no run summary: {e}")),
    };
    let c = &summary.config;
    let get = |k: &str| {
        c.get(k)
            .cloned()
            .unwrap_or(toml::Value::String("<missing>".into()))
    };
    let checks = [
        (
            "fast_retweet_window_seconds",
            get("fast_retweet_window_seconds") == toml::Value::Integer(10),
        ),
        (
            "min_text_tokens",
            get("min_text_tokens") == toml::Value::Integer(4),
        ),
        ("alpha", get("alpha") == toml::Value::Float(0.05)),
        (
            "test",
            get("test") == toml::Value::String("mann_whitney_u".into()),
        ),
        (
            "alternative",
            get("alternative") == toml::Value::String("greater".into()),
        ),
        (
            "candidate_rule",
            get("candidate_rule") == toml::Value::String("effect > 0.5".into()),
        ),
    ];
    let digest_line = fs::read_to_string(out.join("results.csv"))
        .ok()
        .and_then(|t| t.lines().next().map(str::to_string));
    let digest_ok = digest_line == Some(format!("# config_sha256={}", summary.config_sha256));
    let failed: Vec<&str> = checks
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(k, _)| *k)
        .collect();
    outcome(
        failed.is_empty() && digest_ok,
        format!(
            "echo: window={} min_tokens={} alpha={} test={} alternative={} candidate_rule={}; results digest matches echo: {digest_ok}{}",
            get("fast_retweet_window_seconds"),
            get("min_text_tokens"),
            get("alpha"),
            get("test"),
            get("alternative"),
            get("candidate_rule"),
            if failed.is_empty() { String::new() } else { format!("; wrong: {failed:?}") }
        ),
    )
}

/// Relative path -> contents for every file under `root`.
fn snapshot(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).expect("readable dir") {
            let path = entry.expect("dir entry").path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_path_buf();
                files.insert(rel, fs::read(&path).expect("readable file"));
            }
        }
    }
    files
}

fn criterion_8(tmp: &Path) -> Outcome {
    let fixture = tmp.join("fixture8");
    let (actors, posts) = small_fixture(&fixture);
    let mut trees = Vec::new();
    for name in ["run8a", "run8b"] {
        let out = tmp.join(name);
        let (code, _, err) = cli(&[
            "test",
            "--actors",
            actors.to_str().unwrap(),
            "--posts",
            posts.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        if code != 0 {
            return outcome(false, format!("run {name} exited {code}: {err}"));
        }
        trees.push(snapshot(&out));
    }
    // Rerunning into an existing directory must also reproduce it.
    let again = tmp.join("run8a");
    let (code, _, _) = cli(&[
        "test",
        "--actors",
        actors.to_str().unwrap(),
        "--posts",
        posts.to_str().unwrap(),
        "--out",
        again.to_str().unwrap(),
    ]);
    trees.push(snapshot(&again));
    let files = trees[0].len();
    let bytes: usize = trees[0].values().map(Vec::len).sum();
    let identical = code == 0 && trees[0] == trees[1] && trees[0] == trees[2];
    outcome(
        identical && files > 0,
        format!("3 runs (2 fresh dirs + 1 rerun in place), {files} files / {bytes} bytes each, byte-identical: {identical}"),
    )
}

fn throughput_scenario() -> ScenarioConfig {
    let posts_per_user = THROUGHPUT_POSTS / THROUGHPUT_ACTORS;
    ScenarioConfig {
        seed: 9,
        states: (0..10)
            .map(|i| StateSpec {
                name: format!("s{i:02}"),
                io_users: THROUGHPUT_ACTORS / 20,
                control_users: THROUGHPUT_ACTORS / 20,
            })
            .collect(),
        activity: Activity::Uniform {
            min: posts_per_user,
            max: posts_per_user,
        },
        tweet_pool: 50_000,
        vocabulary: 1_000_000,
        hashtag_pool: 10_000,
        domain_pool: 5_000,
        ..ScenarioConfig::default()
    }
}

fn criterion_9(tmp: &Path) -> Outcome {
    let fixture = tmp.join("fixture9");
    let (output, files) = match write_scenario(&throughput_scenario(), &fixture) {
        Ok(x) => x,
        Err(e) => return outcome(false, format!("fixture: {e}")),
    };
    let out = tmp.join("run9");
    let start = Instant::now();
    let (code, _, err) = cli(&[
        "test",
        "--actors",
        files.actors.to_str().unwrap(),
        "--posts",
        files.posts.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let elapsed = start.elapsed();
    let summary = RunSummary::read(&out).ok();
    let layers = summary.as_ref().map_or(0, |s| s.layers.len());
    let experiments = summary
        .as_ref()
        .and_then(|s| s.tests.as_ref())
        .map_or(0, |t| t.experiments);
    let threads = rayon::current_num_threads();
    outcome(
        code == 0
            && output.posts.len() == THROUGHPUT_POSTS
            && output.actors.len() == THROUGHPUT_ACTORS
            && layers == 7
            && elapsed < THROUGHPUT_BUDGET,
        format!(
            "{} posts / {} actors, {layers} layers, {experiments} experiments, {:.2}s on {threads} thread(s) (budget {}s){}",
            output.posts.len(),
            output.actors.len(),
            elapsed.as_secs_f64(),
            THROUGHPUT_BUDGET.as_secs(),
            if code == 0 { String::new() } else { format!("; exit {code}: {err}") }
        ),
    )
}

fn main() {
    let tmp = tempfile::tempdir().expect("temp dir");
    type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("1 U-test oracle equivalence", Box::new(criterion_1)),
        ("2 normal-approximation sanity", Box::new(criterion_2)),
        ("3 null calibration", Box::new(criterion_3)),
        ("4 planted-signal power", Box::new(criterion_4)),
        ("5 similarity-join oracle", Box::new(criterion_5)),
        ("6 formula spot-checks", Box::new(criterion_6)),
        (
            "7 default settings via config echo",
            Box::new(|| criterion_7(tmp.path())),
        ),
        ("8 determinism", Box::new(|| criterion_8(tmp.path()))),
        ("9 throughput", Box::new(|| criterion_9(tmp.path()))),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} criterion {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
