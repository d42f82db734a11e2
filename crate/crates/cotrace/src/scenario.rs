//! Scenario files for the synthetic generator.
//!
//! A scenario is a TOML document whose keys mirror
//! [`ScenarioConfig`](cotrace_core::synth::ScenarioConfig); omitted keys keep
//! their defaults. See the README for the full key list.

use std::fs;
use std::path::{Path, PathBuf};

use cotrace_core::synth::{describe, generate, Expectation, ScenarioConfig, SynthOutput};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formats::{create, write_actors, write_posts};

pub const ACTORS_FILE: &str = "actors.csv";
pub const POSTS_FILE: &str = "posts.jsonl";
pub const SUMMARY_FILE: &str = "synth_summary.toml";

pub fn load_scenario(path: &Path) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {}", path.display(), e.message())))
}

#[derive(Serialize)]
struct Totals {
    actors: usize,
    posts: usize,
    retweets: usize,
    replies: usize,
    originals: usize,
    planted_co_retweets: usize,
}

#[derive(Serialize)]
struct SynthSummary<'a> {
    seed: u64,
    generated: Totals,
    expected: Expectation,
    colluders: &'a [String],
    planted_pool: &'a [String],
    scenario: &'a ScenarioConfig,
}

/// Paths of the files written by [`write_scenario`].
pub struct SynthFiles {
    pub actors: PathBuf,
    pub posts: PathBuf,
    pub summary: PathBuf,
}

/// Generates the scenario and writes actors, posts and a summary with the
/// analytic expectations next to the realized totals.
pub fn write_scenario(cfg: &ScenarioConfig, out: &Path) -> Result<(SynthOutput, SynthFiles)> {
    let output = generate(cfg)?;
    let expected = describe(cfg)?;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let files = SynthFiles {
        actors: out.join(ACTORS_FILE),
        posts: out.join(POSTS_FILE),
        summary: out.join(SUMMARY_FILE),
    };
    write_actors(create(&files.actors)?, &output.actors)
        .map_err(|e| Error::io(&files.actors, e))?;
    write_posts(create(&files.posts)?, &output.posts).map_err(|e| Error::io(&files.posts, e))?;

    use cotrace_core::PostKind;
    let count = |k: PostKind| output.posts.iter().filter(|p| p.kind == k).count();
    let summary = SynthSummary {
        seed: cfg.seed,
        generated: Totals {
            actors: output.actors.len(),
            posts: output.posts.len(),
            retweets: count(PostKind::Retweet),
            replies: count(PostKind::Reply),
            originals: count(PostKind::Original),
            planted_co_retweets: output.planted_co_retweets,
        },
        expected,
        colluders: &output.colluders,
        planted_pool: &output.planted_pool,
        scenario: cfg,
    };
    let text = toml::to_string(&summary).expect("synth summary serializes");
    fs::write(&files.summary, text).map_err(|e| Error::io(&files.summary, e))?;
    Ok((output, files))
}
