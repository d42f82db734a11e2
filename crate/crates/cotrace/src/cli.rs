//! Command-line interface.
//!
//! Exit codes: 0 success, 1 data error, 2 usage or IO error.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use cotrace_core::synth::ScenarioConfig;

use crate::artifacts::{self, RunSummary};
use crate::config::{ConfigFile, Resolved};
use crate::error::{Error, Result};
use crate::run;
use crate::scenario;

#[derive(Debug, Parser)]
#[command(
    name = "cotrace",
    version,
    about = "Test state-level coordination between IO and control cohorts"
)]
pub struct Cli {
    /// Run config (TOML); for `synth`, the scenario file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Reject posts whose author is not in the actors file.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Actors CSV (overrides the config file).
    #[arg(long, global = true)]
    pub actors: Option<PathBuf>,
    /// Posts JSON Lines file (overrides the config file).
    #[arg(long, global = true)]
    pub posts: Option<PathBuf>,
    /// Stopword list, one word per line.
    #[arg(long, global = true)]
    pub stopwords: Option<PathBuf>,
    /// URL expansion CSV (`short_url,expanded_url`).
    #[arg(long, global = true)]
    pub url_map: Option<PathBuf>,
    /// Comma-separated layers to build, e.g. `co_hashtag,retweet`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub layers: Option<Vec<String>>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate the inputs and print per-state cohort counts.
    Validate,
    /// Build all enabled networks and write them to the output directory.
    Build,
    /// Build, run the Mann-Whitney tests and write results.csv.
    Test,
    /// Print the summary of a finished `test` run from its output directory.
    Report,
    /// Generate a synthetic dataset from a scenario file.
    Synth {
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
    },
}

const DEFAULT_OUT: &str = "out";
const DEFAULT_SYNTH_OUT: &str = "synth";

impl Cli {
    fn run_config(&self) -> Result<Resolved> {
        let flags = ConfigFile {
            actors: self.actors.clone(),
            posts: self.posts.clone(),
            stopwords: self.stopwords.clone(),
            url_map: self.url_map.clone(),
            layers: self.layers.clone(),
            strict: self.strict.then_some(true),
            out: self.out.clone(),
            threads: self.threads,
            ..ConfigFile::default()
        };
        let file = match &self.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        Resolved::from_file(flags.or(file))
    }
}

fn init_threads(threads: Option<usize>) -> Result<()> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::Config("--threads must be positive".into()));
        }
        // A pool may already exist when driven from tests; keep it.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

fn out_dir(cfg: &Resolved, default: &str) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| PathBuf::from(default))
}

/// Runs a parsed command, writing human output to `stdout`.
pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let io = |e: std::io::Error| Error::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    };
    match &cli.command {
        Command::Validate => {
            let cfg = cli.run_config()?;
            init_threads(cfg.threads)?;
            let (_, report) = run::load(&cfg)?;
            if let Some(out) = &cfg.out {
                std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
                artifacts::write_validation_report(out, &report)?;
            }
            write!(stdout, "{}", run::render_validation(&report)).map_err(io)?;
        }
        Command::Build | Command::Test => {
            let cfg = cli.run_config()?;
            init_threads(cfg.threads)?;
            let out = out_dir(&cfg, DEFAULT_OUT);
            let with_tests = matches!(cli.command, Command::Test);
            let outcome = run::execute(&cfg, &out, with_tests)?;
            writeln!(stdout, "config_sha256={}", cfg.digest()).map_err(io)?;
            for (t, l) in &outcome.networks.similarity {
                writeln!(
                    stdout,
                    "{:<13} {:>10} edges",
                    t.as_str(),
                    l.network.edges.len()
                )
                .map_err(io)?;
            }
            for (k, l) in &outcome.networks.interactions {
                writeln!(
                    stdout,
                    "{:<13} {:>10} edges",
                    k.as_str(),
                    l.counts.edges().count()
                )
                .map_err(io)?;
            }
            if let Some(tests) = &outcome.tests {
                let rows: Vec<_> = tests
                    .results
                    .iter()
                    .map(artifacts::ResultRow::from)
                    .collect();
                let skipped: Vec<_> = tests
                    .skipped
                    .iter()
                    .map(artifacts::SkippedRow::from)
                    .collect();
                write!(stdout, "{}", run::render_results(&rows, &skipped)).map_err(io)?;
            }
            writeln!(stdout, "wrote {}", out.display()).map_err(io)?;
        }
        Command::Report => {
            let out = cli
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
            let (digest, rows) = artifacts::read_results(&out.join(artifacts::RESULTS))?;
            let summary = RunSummary::read(&out)?;
            writeln!(stdout, "config_sha256={digest}").map_err(io)?;
            write!(stdout, "{}", run::render_results(&rows, &summary.skipped)).map_err(io)?;
        }
        Command::Synth { seed } => {
            let mut scenario = match &cli.config {
                Some(p) => scenario::load_scenario(p)?,
                None => ScenarioConfig::default(),
            };
            if let Some(s) = seed {
                scenario.seed = *s;
            }
            let out = cli
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from(DEFAULT_SYNTH_OUT));
            let (output, files) = scenario::write_scenario(&scenario, &out)?;
            writeln!(
                stdout,
                "{} actors, {} posts -> {}, {}",
                output.actors.len(),
                output.posts.len(),
                files.actors.display(),
                files.posts.display()
            )
            .map_err(io)?;
        }
    }
    Ok(())
}

/// Parses `args` and runs; returns the process exit code. Diagnostics go to
/// `stderr`.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            if code == 0 {
                let _ = write!(stdout, "{e}");
            } else {
                let _ = write!(stderr, "{e}");
            }
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
