//! Stage orchestration shared by the CLI subcommands.

use std::fmt::Write as _;
use std::path::Path;

use cotrace_core::ingest::{validate_dataset, ValidationReport};
use cotrace_core::pipeline::{
    build_interaction_layer, build_similarity_layer, Networks, RunConfig,
};
use cotrace_core::stats::{run_all, TestRun};
use cotrace_core::{Dataset, Layer};
use rayon::prelude::*;

use crate::artifacts::{self, ResultRow, RunSummary, SkippedRow};
use crate::config::Resolved;
use crate::error::{Error, Result};
use crate::formats;

/// Parses both input files (in parallel) and validates them.
pub fn load(cfg: &Resolved) -> Result<(Dataset, ValidationReport)> {
    let (actors, posts) = rayon::join(
        || formats::parse_actors(&cfg.actors),
        || formats::parse_posts(&cfg.posts),
    );
    let (actors, posts) = (actors?, posts?);
    validate_dataset(actors, posts, cfg.echo.strict).map_err(Error::Validation)
}

enum Built {
    Similarity(cotrace_core::pipeline::SimilarityLayer),
    Interaction(cotrace_core::pipeline::InteractionLayer),
}

/// Builds the enabled layers concurrently. The result does not depend on
/// the thread count.
pub fn build_networks(ds: &Dataset, cfg: &RunConfig) -> Networks {
    let layers: Vec<Layer> = cfg.layers.iter().copied().collect();
    let built: Vec<Built> = layers
        .par_iter()
        .map(|layer| match (layer.trace(), layer.interaction()) {
            (Some(t), _) => Built::Similarity(build_similarity_layer(ds, t, cfg)),
            (None, Some(k)) => Built::Interaction(build_interaction_layer(ds, k)),
            (None, None) => unreachable!("every layer is a trace or an interaction"),
        })
        .collect();
    let mut nets = Networks::default();
    for b in built {
        match b {
            Built::Similarity(l) => {
                nets.similarity.insert(l.network.trace, l);
            }
            Built::Interaction(l) => {
                nets.interactions.insert(l.counts.kind, l);
            }
        }
    }
    nets
}

/// Everything a `build` or `test` run produced, kept for summaries.
pub struct Outcome {
    pub dataset: Dataset,
    pub validation: ValidationReport,
    pub networks: Networks,
    pub tests: Option<TestRun>,
}

/// Runs build (and optionally the tests) and writes the output tree.
pub fn execute(cfg: &Resolved, out: &Path, with_tests: bool) -> Result<Outcome> {
    let (dataset, validation) = load(cfg)?;
    let networks = build_networks(&dataset, &cfg.run);
    let tests = with_tests.then(|| run_all(&dataset, &networks, &cfg.run));

    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    artifacts::clear_managed(out)?;
    let digest = cfg.digest();
    artifacts::write_validation_report(out, &validation)?;
    artifacts::write_extraction_report(out, &networks)?;
    artifacts::write_networks(out, &digest, &dataset, &networks)?;
    if let Some(run) = &tests {
        artifacts::write_results(out, &digest, run)?;
    }
    let command = if with_tests { "test" } else { "build" };
    RunSummary::new(command, cfg, &dataset, &networks, tests.as_ref()).write(out)?;
    Ok(Outcome {
        dataset,
        validation,
        networks,
        tests,
    })
}

/// Per-state × cohort actor counts, plus reference diagnostics.
pub fn render_validation(report: &ValidationReport) -> String {
    let mut s = String::new();
    let width = report
        .counts
        .keys()
        .map(String::len)
        .max()
        .unwrap_or(0)
        .max(5);
    let _ = writeln!(s, "{:<width$}  {:>8}  {:>8}", "state", "io", "control");
    let (mut io, mut ctl) = (0, 0);
    for (state, by_cohort) in &report.counts {
        let i = by_cohort.get("io").copied().unwrap_or(0);
        let c = by_cohort.get("control").copied().unwrap_or(0);
        io += i;
        ctl += c;
        let _ = writeln!(s, "{state:<width$}  {i:>8}  {c:>8}");
    }
    let _ = writeln!(s, "{:<width$}  {io:>8}  {ctl:>8}", "total");
    let _ = writeln!(s, "posts: {}", report.total_posts);
    let _ = writeln!(
        s,
        "dangling references: {} (retweet sources {}, reply targets {}, distinct accounts {})",
        report.dangling_total(),
        report.dangling_retweet_sources,
        report.dangling_reply_targets,
        report.dangling_accounts.len()
    );
    if !report.dropped_posts.is_empty() {
        let _ = writeln!(
            s,
            "dropped posts (unknown author): {}",
            report.dropped_posts.len()
        );
    }
    s
}

/// Human summary of a test run: candidates with p-values grouped by layer,
/// then the significant pairs and the skipped experiments.
pub fn render_results(rows: &[ResultRow], skipped: &[SkippedRow]) -> String {
    let mut s = String::new();
    let m = rows.first().map_or(0, |r| r.m);
    let threshold = rows.first().map_or(0.0, |r| r.threshold);
    let _ = writeln!(s, "experiments: {m}  bonferroni threshold: {threshold:.6e}");
    let mut layer = "";
    for r in rows.iter().filter(|r| r.candidate) {
        if r.layer != layer {
            layer = &r.layer;
            let _ = writeln!(s, "{layer}");
        }
        let _ = writeln!(
            s,
            "  {} - {}  n_io={} n_control={} effect={:.4} p={:.6e}{}",
            r.state_a,
            r.state_b,
            r.n_io,
            r.n_control,
            r.effect,
            r.p,
            if r.significant { "  SIGNIFICANT" } else { "" }
        );
    }
    let candidates = rows.iter().filter(|r| r.candidate).count();
    if candidates == 0 {
        let _ = writeln!(s, "no candidate pairs");
    }
    let significant: Vec<&ResultRow> = rows.iter().filter(|r| r.significant).collect();
    if significant.is_empty() {
        let _ = writeln!(s, "no significant pairs");
    } else {
        let _ = writeln!(s, "significant pairs: {}", significant.len());
        for r in significant {
            let _ = writeln!(
                s,
                "  {} {} - {}  p={:.6e}",
                r.layer, r.state_a, r.state_b, r.p
            );
        }
    }
    if !skipped.is_empty() {
        let _ = writeln!(s, "skipped:");
        for k in skipped {
            let _ = writeln!(
                s,
                "  {} {} - {}  {}: {}",
                k.layer, k.state_a, k.state_b, k.reason, k.detail
            );
        }
    }
    s
}
