//! The output tree of a run.
//!
//! ```text
//! <out>/
//!   validation_report.toml
//!   extraction_report.toml
//!   run_summary.toml
//!   results.csv                        (test only)
//!   edges/<trace>.csv                  actor_a,actor_b,trace,weight
//!   edges/retweet.csv, edges/reply.csv source,target,kind,count
//!   scores/retweet.csv, scores/reply.csv
//!                                      actor_id,kind,counterpart_state,s_ic,s_i,p_c,score
//!   aggregate/io.csv, aggregate/control.csv
//!                                      source,target,layer,weight
//!   aggregate/<cohort>_<layer>.dot
//! ```
//!
//! Every CSV starts with a `# config_sha256=<hex>` line carrying the digest
//! of the resolved config, followed by the header. Rows are emitted in a
//! fixed order, so identical inputs give byte-identical files.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use cotrace_core::aggregate::{aggregate_interactions, aggregate_similarity, AggregateEdge};
use cotrace_core::ingest::ValidationReport;
use cotrace_core::pipeline::Networks;
use cotrace_core::similarity::JoinReport;
use cotrace_core::stats::{PairTestResult, SkippedExperiment, TestRun};
use cotrace_core::traces::ExtractionReport;
use cotrace_core::{Cohort, Dataset, Layer};
use serde::{Deserialize, Serialize};

use crate::config::Resolved;
use crate::error::{Error, Result};
use crate::formats::create;

pub const EDGES_DIR: &str = "edges";
pub const SCORES_DIR: &str = "scores";
pub const AGGREGATE_DIR: &str = "aggregate";
pub const VALIDATION_REPORT: &str = "validation_report.toml";
pub const EXTRACTION_REPORT: &str = "extraction_report.toml";
pub const RUN_SUMMARY: &str = "run_summary.toml";
pub const RESULTS: &str = "results.csv";

pub const SIMILARITY_EDGE_HEADER: [&str; 4] = ["actor_a", "actor_b", "trace", "weight"];
pub const INTERACTION_EDGE_HEADER: [&str; 4] = ["source", "target", "kind", "count"];
pub const SCORE_HEADER: [&str; 7] = [
    "actor_id",
    "kind",
    "counterpart_state",
    "s_ic",
    "s_i",
    "p_c",
    "score",
];
pub const AGGREGATE_HEADER: [&str; 4] = ["source", "target", "layer", "weight"];
pub const RESULTS_HEADER: [&str; 14] = [
    "layer",
    "state_a",
    "state_b",
    "sample_type",
    "n_io",
    "n_control",
    "u_io",
    "effect",
    "p",
    "method",
    "candidate",
    "significant",
    "m",
    "threshold",
];

const DIGEST_PREFIX: &str = "# config_sha256=";

/// Edge and aggregate weights are written with nine decimals.
fn weight(w: f64) -> String {
    format!("{w:.9}")
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn mkdir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Writes a CSV table preceded by the digest line.
fn write_table<I, R>(path: &Path, digest: &str, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut out = create(path)?;
    let io = |e: std::io::Error| Error::io(path, e);
    writeln!(out, "{DIGEST_PREFIX}{digest}").map_err(io)?;
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::io(path, e.into());
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush().map_err(io)
}

/// Removes the directories and files a previous run may have left, so the
/// tree reflects only the current run. Nothing else in `out` is touched.
pub fn clear_managed(out: &Path) -> Result<()> {
    for dir in [EDGES_DIR, SCORES_DIR, AGGREGATE_DIR] {
        let p = out.join(dir);
        if p.is_dir() {
            fs::remove_dir_all(&p).map_err(|e| Error::io(&p, e))?;
        }
    }
    for file in [VALIDATION_REPORT, EXTRACTION_REPORT, RUN_SUMMARY, RESULTS] {
        let p = out.join(file);
        if p.is_file() {
            fs::remove_file(&p).map_err(|e| Error::io(&p, e))?;
        }
    }
    Ok(())
}

pub fn write_validation_report(out: &Path, report: &ValidationReport) -> Result<()> {
    let text = toml::to_string(report).expect("validation report serializes");
    write_file(&out.join(VALIDATION_REPORT), text.as_bytes())
}

#[derive(Serialize)]
struct TraceReport<'a> {
    extraction: &'a ExtractionReport,
    join: &'a JoinReport,
}

pub fn write_extraction_report(out: &Path, nets: &Networks) -> Result<()> {
    let reports: BTreeMap<&str, TraceReport> = nets
        .similarity
        .iter()
        .map(|(t, l)| {
            (
                t.as_str(),
                TraceReport {
                    extraction: &l.extraction.report,
                    join: &l.network.report,
                },
            )
        })
        .collect();
    let text = toml::to_string(&reports).expect("extraction report serializes");
    write_file(&out.join(EXTRACTION_REPORT), text.as_bytes())
}

/// Edge lists, score dumps and aggregate layers for every built network.
pub fn write_networks(
    out: &Path,
    digest: &str,
    ds: &Dataset,
    nets: &Networks,
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let edges = out.join(EDGES_DIR);
    mkdir(&edges)?;
    for (trace, layer) in &nets.similarity {
        let path = edges.join(format!("{}.csv", trace.as_str()));
        let rows = layer.network.edges().map(|e| {
            [
                e.actor_a.to_string(),
                e.actor_b.to_string(),
                e.trace.as_str().to_string(),
                weight(e.weight),
            ]
        });
        write_table(&path, digest, &SIMILARITY_EDGE_HEADER, rows)?;
        written.push(path);
    }
    if !nets.interactions.is_empty() {
        let scores = out.join(SCORES_DIR);
        mkdir(&scores)?;
        for (kind, layer) in &nets.interactions {
            let path = edges.join(format!("{}.csv", kind.as_str()));
            let rows = layer.counts.edges().map(|(s, t, c)| {
                [
                    s.to_string(),
                    t.to_string(),
                    kind.as_str().to_string(),
                    c.to_string(),
                ]
            });
            write_table(&path, digest, &INTERACTION_EDGE_HEADER, rows)?;
            written.push(path);

            let path = scores.join(format!("{}.csv", kind.as_str()));
            let rows = layer.scores.all_scores(ds).into_iter().map(|s| {
                [
                    s.actor_id,
                    kind.as_str().to_string(),
                    s.counterpart_state,
                    s.s_ic.to_string(),
                    s.s_i.to_string(),
                    s.p_c.to_string(),
                    s.score.to_string(),
                ]
            });
            write_table(&path, digest, &SCORE_HEADER, rows)?;
            written.push(path);
        }
    }

    let agg = out.join(AGGREGATE_DIR);
    mkdir(&agg)?;
    for cohort in Cohort::ALL {
        let mut all: Vec<AggregateEdge> = Vec::new();
        let mut per_layer: Vec<(Layer, Vec<AggregateEdge>)> = Vec::new();
        for (trace, layer) in &nets.similarity {
            per_layer.push((
                Layer::from(*trace),
                aggregate_similarity(&layer.extraction.bags, ds, cohort),
            ));
        }
        for (kind, layer) in &nets.interactions {
            per_layer.push((
                Layer::from(*kind),
                aggregate_interactions(&layer.counts, ds, cohort),
            ));
        }
        for (layer, edges) in per_layer {
            let path = agg.join(format!("{}_{}.dot", cohort.as_str(), layer.as_str()));
            write_file(&path, render_dot(cohort, layer, &edges).as_bytes())?;
            written.push(path);
            all.extend(edges);
        }
        let path = agg.join(format!("{}.csv", cohort.as_str()));
        let rows = all.iter().map(|e| {
            [
                e.source.clone(),
                e.target.clone(),
                e.layer.as_str().to_string(),
                weight(e.weight),
            ]
        });
        write_table(&path, digest, &AGGREGATE_HEADER, rows)?;
        written.push(path);
    }
    Ok(written)
}

fn dot_id(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz rendering of one aggregate layer. Interaction layers are
/// directed (and may contain self-loops); similarity layers are undirected.
pub fn render_dot(cohort: Cohort, layer: Layer, edges: &[AggregateEdge]) -> String {
    let directed = layer.interaction().is_some();
    let (kw, op) = if directed {
        ("digraph", "->")
    } else {
        ("graph", "--")
    };
    let mut s = format!(
        "{kw} {} {{\n",
        dot_id(&format!("{}_{}", cohort.as_str(), layer.as_str()))
    );
    for e in edges {
        let w = weight(e.weight);
        s.push_str(&format!(
            "  {} {op} {} [weight={w}, label=\"{w}\"];\n",
            dot_id(&e.source),
            dot_id(&e.target)
        ));
    }
    s.push_str("}\n");
    s
}

/// One row of `results.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub layer: String,
    pub state_a: String,
    pub state_b: String,
    pub sample_type: String,
    pub n_io: usize,
    pub n_control: usize,
    pub u_io: f64,
    pub effect: f64,
    pub p: f64,
    pub method: String,
    pub candidate: bool,
    pub significant: bool,
    pub m: usize,
    pub threshold: f64,
}

impl From<&PairTestResult> for ResultRow {
    fn from(r: &PairTestResult) -> ResultRow {
        ResultRow {
            layer: r.layer.as_str().to_string(),
            state_a: r.state_a.clone(),
            state_b: r.state_b.clone(),
            sample_type: r.sample_type.as_str().to_string(),
            n_io: r.test.n_io,
            n_control: r.test.n_control,
            u_io: r.test.u_io,
            effect: r.test.effect,
            p: r.test.p_one_sided,
            method: r.test.method.as_str().to_string(),
            candidate: r.candidate,
            significant: r.significant,
            m: r.m,
            threshold: r.threshold,
        }
    }
}

pub fn write_results(out: &Path, digest: &str, run: &TestRun) -> Result<PathBuf> {
    let path = out.join(RESULTS);
    let rows = run.results.iter().map(|r| {
        let row = ResultRow::from(r);
        [
            row.layer,
            row.state_a,
            row.state_b,
            row.sample_type,
            row.n_io.to_string(),
            row.n_control.to_string(),
            row.u_io.to_string(),
            row.effect.to_string(),
            row.p.to_string(),
            row.method,
            row.candidate.to_string(),
            row.significant.to_string(),
            row.m.to_string(),
            row.threshold.to_string(),
        ]
    });
    write_table(&path, digest, &RESULTS_HEADER, rows)?;
    Ok(path)
}

/// Reads `results.csv` back, returning the digest and the rows.
pub fn read_results(path: &Path) -> Result<(String, Vec<ResultRow>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let bad = |message: String| Error::Artifact {
        path: path.to_path_buf(),
        message,
    };
    let (first, rest) = text.split_once('\n').unwrap_or((&text, ""));
    let digest = first
        .strip_prefix(DIGEST_PREFIX)
        .ok_or_else(|| bad("missing config digest line".into()))?
        .trim()
        .to_string();
    let mut rdr = csv::Reader::from_reader(rest.as_bytes());
    let rows = rdr
        .deserialize()
        .collect::<std::result::Result<Vec<ResultRow>, _>>()
        .map_err(|e| bad(e.to_string()))?;
    Ok((digest, rows))
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct LayerSummary {
    pub edges: usize,
    pub feature_bags: usize,
    pub distinct_features: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SkippedRow {
    pub layer: String,
    pub state_a: String,
    pub state_b: String,
    pub reason: String,
    pub detail: String,
}

impl From<&SkippedExperiment> for SkippedRow {
    fn from(s: &SkippedExperiment) -> SkippedRow {
        SkippedRow {
            layer: s.layer.as_str().to_string(),
            state_a: s.state_a.clone(),
            state_b: s.state_b.clone(),
            reason: s.reason.to_string(),
            detail: s.detail.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestSummary {
    pub experiments: usize,
    pub threshold: f64,
    pub candidates: usize,
    pub significant: usize,
}

/// Contents of `run_summary.toml`. `config` is the resolved-config echo.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub command: String,
    pub config_sha256: String,
    pub config: toml::Table,
    pub actors: usize,
    pub posts: usize,
    pub states: Vec<String>,
    pub layers: BTreeMap<String, LayerSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tests: Option<TestSummary>,
    #[serde(default)]
    pub skipped: Vec<SkippedRow>,
}

impl RunSummary {
    pub fn new(
        command: &str,
        cfg: &Resolved,
        ds: &Dataset,
        nets: &Networks,
        run: Option<&TestRun>,
    ) -> RunSummary {
        let mut layers = BTreeMap::new();
        for (t, l) in &nets.similarity {
            layers.insert(
                t.as_str().to_string(),
                LayerSummary {
                    edges: l.network.edges.len(),
                    feature_bags: l.extraction.report.bags,
                    distinct_features: l.extraction.report.distinct_features,
                },
            );
        }
        for (k, l) in &nets.interactions {
            layers.insert(
                k.as_str().to_string(),
                LayerSummary {
                    edges: l.counts.edges().count(),
                    ..LayerSummary::default()
                },
            );
        }
        RunSummary {
            command: command.to_string(),
            config_sha256: cfg.digest(),
            config: toml::from_str(&cfg.echo_toml()).expect("config echo parses"),
            actors: ds.actor_count(),
            posts: ds.posts().len(),
            states: ds.states().map(str::to_string).collect(),
            layers,
            tests: run.map(|r| TestSummary {
                experiments: r.results.len(),
                threshold: r.threshold,
                candidates: r.results.iter().filter(|x| x.candidate).count(),
                significant: r.significant().count(),
            }),
            skipped: run.map_or_else(Vec::new, |r| {
                r.skipped.iter().map(SkippedRow::from).collect()
            }),
        }
    }

    pub fn write(&self, out: &Path) -> Result<()> {
        let text = toml::to_string(self).expect("run summary serializes");
        write_file(&out.join(RUN_SUMMARY), text.as_bytes())
    }

    pub fn read(out: &Path) -> Result<RunSummary> {
        let path = out.join(RUN_SUMMARY);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        toml::from_str(&text).map_err(|e| Error::Artifact {
            path,
            message: e.message().to_string(),
        })
    }
}
