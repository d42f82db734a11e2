//! One-sided Mann-Whitney U testing of IO against control samples.
//!
//! The exact path counts, for every possible rank sum, how many ways the
//! pooled (mid)ranks can be split into an IO group of the observed size. Ranks
//! are doubled so tied midranks stay integral and the tie case is exact too.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::ingest::{Cohort, Dataset};
use crate::interactions::InteractionMode;
use crate::pipeline::{Layer, Networks, RunConfig, SampleType};
use crate::similarity::interstate_samples;

/// Default ceiling on `C(n_io + n_control, n_io)` for the exact path.
pub const DEFAULT_EXACT_CAP: u64 = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "SCREAMING_SNAKE_CASE"))]
pub enum TestMethod {
    Exact,
    NormalApprox,
}

impl TestMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            TestMethod::Exact => "EXACT",
            TestMethod::NormalApprox => "NORMAL_APPROX",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatsError {
    EmptySample,
}

impl fmt::Display for StatsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatsError::EmptySample => f.write_str("EMPTY_SAMPLE"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UTestResult {
    pub n_io: usize,
    pub n_control: usize,
    pub u_io: f64,
    /// `u_io / (n_io * n_control)`.
    pub effect: f64,
    pub p_one_sided: f64,
    pub method: TestMethod,
}

/// Average ranks (1-based) with ties sharing their mean rank.
pub fn rank_with_ties(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i..j hold ranks i+1..=j
        let mid = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = mid;
        }
        i = j;
    }
    ranks
}

/// `C(n, k)`, saturating at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

fn doubled_ranks(io: &[f64], control: &[f64]) -> Vec<u64> {
    let pooled: Vec<f64> = io.iter().chain(control).copied().collect();
    rank_with_ties(&pooled)
        .into_iter()
        .map(|r| libm::round(2.0 * r) as u64)
        .collect()
}

/// Number of `k`-subsets of `values` per subset sum, for sums `0..=max`.
fn subset_sum_counts(values: &[u64], k: usize) -> Vec<u64> {
    let max: u64 = {
        let mut sorted = values.to_vec();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        sorted.iter().take(k).sum()
    };
    let width = max as usize + 1;
    // table[j * width + s]: j-subsets summing to s
    let mut table = vec![0u64; (k + 1) * width];
    table[0] = 1;
    for (seen, &v) in values.iter().enumerate() {
        let v = v as usize;
        for j in (1..=k.min(seen + 1)).rev() {
            let (lower, upper) = table.split_at_mut(j * width);
            let prev = &lower[(j - 1) * width..];
            let cur = &mut upper[..width];
            for s in (v..width).rev() {
                cur[s] += prev[s - v];
            }
        }
    }
    table.split_off(k * width)
}

/// Exact `P(U >= u_obs)` under random assignment of the pooled values to the
/// two groups, ties handled through midranks.
///
/// Returns `None` for an empty sample or when the number of assignments
/// does not fit in a `u64`.
pub fn exact_upper_tail(io: &[f64], control: &[f64]) -> Option<f64> {
    let (n1, n2) = (io.len(), control.len());
    if n1 == 0 || n2 == 0 || binomial(n1 + n2, n1) == u64::MAX {
        return None;
    }
    let ranks = doubled_ranks(io, control);
    let observed: u64 = ranks[..n1].iter().sum();
    let total: u64 = ranks.iter().sum();
    // Enumerate the smaller group; R_io = total - R_control.
    let (tail, all) = if n1 == 1 {
        (
            ranks.iter().filter(|&&r| r >= observed).count() as u64,
            ranks.len() as u64,
        )
    } else if n2 == 1 {
        let limit = total - observed;
        (
            ranks.iter().filter(|&&r| r <= limit).count() as u64,
            ranks.len() as u64,
        )
    } else if n1 <= n2 {
        let counts = subset_sum_counts(&ranks, n1);
        let tail: u64 = counts.iter().skip(observed as usize).sum();
        (tail, counts.iter().sum::<u64>())
    } else {
        let counts = subset_sum_counts(&ranks, n2);
        let limit = (total - observed) as usize;
        let tail: u64 = counts.iter().take(limit + 1).sum();
        (tail, counts.iter().sum::<u64>())
    };
    Some(tail as f64 / all as f64)
}

fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / core::f64::consts::SQRT_2)
}

/// Upper-tail normal approximation with tie-corrected variance and a 0.5
/// continuity correction.
pub fn normal_upper_tail(io: &[f64], control: &[f64]) -> Option<f64> {
    let (n1, n2) = (io.len(), control.len());
    if n1 == 0 || n2 == 0 {
        return None;
    }
    let pooled: Vec<f64> = io.iter().chain(control).copied().collect();
    let ranks = rank_with_ties(&pooled);
    let r_io: f64 = ranks[..n1].iter().sum();
    let u = r_io - (n1 * (n1 + 1)) as f64 / 2.0;
    let (n1f, n2f) = (n1 as f64, n2 as f64);
    let n = n1f + n2f;
    let mut sorted = pooled;
    sorted.sort_by(|a, b| a.total_cmp(b));
    let mut ties = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        ties += t * t * t - t;
        i = j;
    }
    let var = n1f * n2f / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
    if var <= 0.0 {
        return Some(1.0);
    }
    let z = (u - n1f * n2f / 2.0 - 0.5) / libm::sqrt(var);
    Some(normal_sf(z).clamp(0.0, 1.0))
}

/// One-sided test of whether the IO sample is stochastically greater.
///
/// Uses the exact distribution when `C(n_io + n_control, n_io) <=
/// exact_cap`, otherwise the normal approximation.
pub fn mann_whitney_greater(
    io: &[f64],
    control: &[f64],
    exact_cap: u64,
) -> Result<UTestResult, StatsError> {
    let (n1, n2) = (io.len(), control.len());
    if n1 == 0 || n2 == 0 {
        return Err(StatsError::EmptySample);
    }
    let ranks = doubled_ranks(io, control);
    let r2: u64 = ranks[..n1].iter().sum();
    let u_io = r2 as f64 / 2.0 - (n1 * (n1 + 1)) as f64 / 2.0;
    let pairs = (n1 * n2) as f64;
    let (p, method) = if binomial(n1 + n2, n1) <= exact_cap {
        (
            exact_upper_tail(io, control).ok_or(StatsError::EmptySample)?,
            TestMethod::Exact,
        )
    } else {
        (
            normal_upper_tail(io, control).ok_or(StatsError::EmptySample)?,
            TestMethod::NormalApprox,
        )
    };
    Ok(UTestResult {
        n_io: n1,
        n_control: n2,
        u_io,
        effect: u_io / pairs,
        p_one_sided: p,
        method,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairTestResult {
    pub state_a: String,
    pub state_b: String,
    pub layer: Layer,
    pub sample_type: SampleType,
    pub test: UTestResult,
    pub candidate: bool,
    pub significant: bool,
    /// Number of evaluated experiments in the family.
    pub m: usize,
    pub threshold: f64,
}

/// A pair/layer that could not be tested, with a reason code.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SkippedExperiment {
    pub layer: Layer,
    pub state_a: String,
    pub state_b: String,
    /// `NO_IO_DATA` or `NO_CONTROL_DATA`.
    pub reason: &'static str,
    pub detail: String,
}

/// Candidate iff the IO U statistic exceeds the control one (effect > 0.5).
pub fn select_candidates(results: &mut [PairTestResult]) {
    for r in results {
        r.candidate = r.test.effect > 0.5;
    }
}

/// Marks candidates with `p < alpha / m` as significant, where `m` is the
/// number of evaluated experiments. Returns the threshold.
pub fn bonferroni(results: &mut [PairTestResult], alpha: f64) -> f64 {
    let m = results.len();
    let threshold = bonferroni_threshold(alpha, m);
    for r in results {
        r.m = m;
        r.threshold = threshold;
        r.significant = r.candidate && r.test.p_one_sided < threshold;
    }
    threshold
}

pub fn bonferroni_threshold(alpha: f64, m: usize) -> f64 {
    if m == 0 {
        alpha
    } else {
        alpha / m as f64
    }
}

#[derive(Debug, Clone, Default)]
pub struct TestRun {
    /// Sorted by `(layer, state_a, state_b)`.
    pub results: Vec<PairTestResult>,
    pub skipped: Vec<SkippedExperiment>,
    pub threshold: f64,
}

impl TestRun {
    pub fn significant(&self) -> impl Iterator<Item = &PairTestResult> {
        self.results.iter().filter(|r| r.significant)
    }
}

enum Sample {
    Data(Vec<f64>),
    Missing(String),
}

/// Tests every state pair on every built layer.
pub fn run_all(ds: &Dataset, nets: &Networks, cfg: &RunConfig) -> TestRun {
    let states: Vec<&str> = ds.states().collect();
    let mut results = Vec::new();
    let mut skipped = Vec::new();

    let mut experiment = |layer: Layer, a: &str, b: &str, io: Sample, ctrl: Sample| {
        let skip = |reason: &'static str, detail: String| SkippedExperiment {
            layer,
            state_a: String::from(a),
            state_b: String::from(b),
            reason,
            detail,
        };
        match (io, ctrl) {
            (Sample::Missing(d), _) => skipped.push(skip("NO_IO_DATA", d)),
            (_, Sample::Missing(d)) => skipped.push(skip("NO_CONTROL_DATA", d)),
            (Sample::Data(io), Sample::Data(ctrl)) => {
                let test = mann_whitney_greater(&io, &ctrl, cfg.exact_test_cap)
                    .expect("samples are non-empty");
                results.push(PairTestResult {
                    state_a: String::from(a),
                    state_b: String::from(b),
                    layer,
                    sample_type: layer.sample_type(),
                    test,
                    candidate: false,
                    significant: false,
                    m: 0,
                    threshold: 0.0,
                });
            }
        }
    };

    for (trace, built) in &nets.similarity {
        let layer = Layer::from(*trace);
        let mut samples = interstate_samples(&built.network, ds);
        for (i, a) in states.iter().enumerate() {
            for b in &states[i + 1..] {
                let mut take =
                    |c: Cohort| match samples.remove(&(c, String::from(*a), String::from(*b))) {
                        Some(v) if !v.is_empty() => Sample::Data(v),
                        _ => Sample::Missing(alloc::format!("no inter-state {} edges", c.as_str())),
                    };
                let io = take(Cohort::Io);
                let ctrl = take(Cohort::Control);
                experiment(layer, a, b, io, ctrl);
            }
        }
    }

    for (kind, built) in &nets.interactions {
        let layer = Layer::from(*kind);
        let sample = |c: Cohort, a: &str, b: &str| match built.scores.suspiciousness(
            ds,
            c,
            a,
            b,
            cfg.interaction_mode,
        ) {
            Ok(s) => Sample::Data(s.into_iter().map(|s| s.score).collect()),
            Err(e) => Sample::Missing(alloc::format!("{e}")),
        };
        for (i, a) in states.iter().enumerate() {
            for b in &states[i + 1..] {
                let directions: &[(&str, &str)] = match cfg.interaction_mode {
                    InteractionMode::Pooled => &[(a, b)],
                    InteractionMode::Directional => &[(a, b), (b, a)],
                };
                for &(x, y) in directions {
                    experiment(
                        layer,
                        x,
                        y,
                        sample(Cohort::Io, x, y),
                        sample(Cohort::Control, x, y),
                    );
                }
            }
        }
    }

    results
        .sort_by(|x, y| (x.layer, &x.state_a, &x.state_b).cmp(&(y.layer, &y.state_a, &y.state_b)));
    skipped
        .sort_by(|x, y| (x.layer, &x.state_a, &x.state_b).cmp(&(y.layer, &y.state_a, &y.state_b)));
    select_candidates(&mut results);
    let threshold = bonferroni(&mut results, cfg.alpha);
    TestRun {
        results,
        skipped,
        threshold,
    }
}

/// Counts of significant results per layer, for summaries.
pub fn significant_by_layer(run: &TestRun) -> BTreeMap<Layer, usize> {
    let mut out = BTreeMap::new();
    for r in run.significant() {
        *out.entry(r.layer).or_insert(0) += 1;
    }
    out
}
