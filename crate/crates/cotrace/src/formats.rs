//! On-disk input formats: the actors CSV, the posts JSON Lines file, the
//! stopword list and the URL expansion map.
//!
//! Actors file: CSV with the header `actor_id,state,cohort`; cohort is `io` or
//! `control` in any case.
//!
//! Posts file: one JSON object per line with the required keys `post_id`,
//! `author_id`, `created_at` (epoch seconds; fractional seconds are
//! truncated) and `text`, and the optional keys `retweet_of_post_id`,
//! `retweet_of_author_id`, `retweet_of_created_at`, `reply_to_author`,
//! `urls` and `hashtags` (the last two are arrays of strings). Blank lines
//! are skipped; unknown keys are ignored.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use cotrace_core::ingest::{IngestError, PostRecord};
use cotrace_core::{Actor, Post};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ACTORS_HEADER: [&str; 3] = ["actor_id", "state", "cohort"];

pub(crate) fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

/// Reads actor records. Line numbers in errors are 1-based file lines.
pub fn read_actors<R: Read>(reader: R) -> std::result::Result<Vec<Actor>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut actors = Vec::new();
    let mut seen_header = false;
    for record in rdr.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line() as usize);
                return Err(IngestError::MalformedLine { line });
            }
        };
        let line = record.position().map_or(0, |p| p.line() as usize);
        if !seen_header {
            seen_header = true;
            let header: Vec<String> = record.iter().map(|f| f.to_ascii_lowercase()).collect();
            if header != ACTORS_HEADER {
                return Err(IngestError::MalformedLine { line });
            }
            continue;
        }
        if record.len() != 3 {
            return Err(IngestError::MalformedLine { line });
        }
        actors.push(Actor::from_fields(
            &record[0], &record[1], &record[2], line,
        )?);
    }
    cotrace_core::ingest::check_unique_actors(&actors)?;
    Ok(actors)
}

pub fn parse_actors(path: &Path) -> Result<Vec<Actor>> {
    read_actors(open(path)?).map_err(|source| Error::Ingest {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_actors<W: Write>(writer: W, actors: &[Actor]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(ACTORS_HEADER)?;
    for a in actors {
        w.write_record([a.actor_id.as_str(), a.state.as_str(), a.cohort.as_str()])?;
    }
    w.flush()
}

/// One line of the posts file.
#[derive(Debug, Serialize, Deserialize)]
struct PostLine {
    post_id: String,
    author_id: String,
    #[serde(deserialize_with = "epoch_seconds")]
    created_at: i64,
    text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    retweet_of_post_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    retweet_of_author_id: Option<String>,
    #[serde(
        default,
        deserialize_with = "opt_epoch_seconds",
        skip_serializing_if = "Option::is_none"
    )]
    retweet_of_created_at: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reply_to_author: Option<String>,
    #[serde(
        default,
        deserialize_with = "list_or_null",
        skip_serializing_if = "Vec::is_empty"
    )]
    urls: Vec<String>,
    #[serde(
        default,
        deserialize_with = "list_or_null",
        skip_serializing_if = "Vec::is_empty"
    )]
    hashtags: Vec<String>,
}

fn to_seconds<E: serde::de::Error>(n: serde_json::Number) -> std::result::Result<i64, E> {
    if let Some(i) = n.as_i64() {
        return Ok(i);
    }
    match n.as_f64() {
        Some(f) if f.is_finite() && f.abs() < 9.0e15 => Ok(f.floor() as i64),
        _ => Err(E::custom("timestamp out of range")),
    }
}

fn epoch_seconds<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<i64, D::Error> {
    to_seconds(serde_json::Number::deserialize(d)?)
}

fn opt_epoch_seconds<'de, D: serde::Deserializer<'de>>(
    d: D,
) -> std::result::Result<Option<i64>, D::Error> {
    Option::<serde_json::Number>::deserialize(d)?
        .map(to_seconds)
        .transpose()
}

fn list_or_null<'de, D: serde::Deserializer<'de>>(
    d: D,
) -> std::result::Result<Vec<String>, D::Error> {
    Ok(Option::<Vec<String>>::deserialize(d)?.unwrap_or_default())
}

impl From<PostLine> for PostRecord {
    fn from(l: PostLine) -> PostRecord {
        PostRecord {
            post_id: l.post_id,
            author_id: l.author_id,
            created_at: l.created_at,
            text: l.text,
            retweet_of_post_id: l.retweet_of_post_id,
            retweet_of_author_id: l.retweet_of_author_id,
            retweet_of_created_at: l.retweet_of_created_at,
            reply_to_author: l.reply_to_author,
            urls: l.urls,
            hashtags: l.hashtags,
        }
    }
}

impl From<PostRecord> for PostLine {
    fn from(r: PostRecord) -> PostLine {
        PostLine {
            post_id: r.post_id,
            author_id: r.author_id,
            created_at: r.created_at,
            text: r.text,
            retweet_of_post_id: r.retweet_of_post_id,
            retweet_of_author_id: r.retweet_of_author_id,
            retweet_of_created_at: r.retweet_of_created_at,
            reply_to_author: r.reply_to_author,
            urls: r.urls,
            hashtags: r.hashtags,
        }
    }
}

/// Parses one posts-file line; `line` is used for error reporting.
pub fn parse_post_line(text: &str, line: usize) -> std::result::Result<Post, IngestError> {
    let parsed: PostLine =
        serde_json::from_str(text).map_err(|_| IngestError::MalformedRecord {
            line,
            reason: "not a JSON object with the required keys",
        })?;
    PostRecord::from(parsed).into_post(line)
}

/// Reads post records. Line numbers in errors are 1-based file lines; an
/// unreadable line (e.g. invalid UTF-8) is reported as a malformed record.
pub fn read_posts<R: BufRead>(reader: R) -> std::result::Result<Vec<Post>, IngestError> {
    let mut posts = Vec::new();
    for (i, text) in reader.lines().enumerate() {
        let line = i + 1;
        let text = text.map_err(|_| IngestError::MalformedRecord {
            line,
            reason: "unreadable line",
        })?;
        if text.trim().is_empty() {
            continue;
        }
        posts.push(parse_post_line(&text, line)?);
    }
    Ok(posts)
}

pub fn parse_posts(path: &Path) -> Result<Vec<Post>> {
    read_posts(open(path)?).map_err(|source| Error::Ingest {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_posts<W: Write>(mut writer: W, posts: &[Post]) -> io::Result<()> {
    for p in posts {
        let line = PostLine::from(PostRecord::from(p));
        serde_json::to_writer(&mut writer, &line)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}

/// Stopword list: one word per line, `#` starts a comment line; words are
/// lowercased.
pub fn read_stopwords<R: BufRead>(reader: R) -> io::Result<BTreeSet<String>> {
    let mut words = BTreeSet::new();
    for line in reader.lines() {
        let line = line?;
        let w = line.trim();
        if w.is_empty() || w.starts_with('#') {
            continue;
        }
        words.insert(w.to_lowercase());
    }
    Ok(words)
}

pub fn parse_stopwords(path: &Path) -> Result<BTreeSet<String>> {
    read_stopwords(open(path)?).map_err(|e| Error::io(path, e))
}

/// URL expansion map: CSV with header `short_url,expanded_url`.
pub fn read_url_map<R: Read>(
    reader: R,
) -> std::result::Result<BTreeMap<String, String>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut map = BTreeMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| IngestError::MalformedLine {
            line: e.position().map_or(0, |p| p.line() as usize),
        })?;
        if record.len() != 2 {
            let line = record.position().map_or(0, |p| p.line() as usize);
            return Err(IngestError::MalformedLine { line });
        }
        map.insert(record[0].to_string(), record[1].to_string());
    }
    Ok(map)
}

pub fn parse_url_map(path: &Path) -> Result<BTreeMap<String, String>> {
    read_url_map(open(path)?).map_err(|source| Error::Ingest {
        path: path.to_path_buf(),
        source,
    })
}
