//! Persistent memo cache: one JSON-lines file per directory.
//!
//! Line 1 is a header `{format, genus, truncation}`; every further line is
//! one memo record. A header that does not match the requested `(g, N)`
//! invalidates the whole file. A last line without a trailing newline is a
//! torn write and is discarded; other unparsable lines are skipped. Readers
//! take a shared lock, writers an exclusive one.

use std::collections::BTreeSet;
use std::fs::{self, File, OpenOptions};
use std::io::{self, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use higgsmot_core::engine::MemoKey;
use higgsmot_core::{Engine, Series};
use serde::{Deserialize, Serialize};

use crate::output::SeriesRecord;

pub const FORMAT_VERSION: u32 = 1;
pub const FILE_NAME: &str = "higgsmot-memo.jsonl";

#[derive(Debug, PartialEq, Eq, Serialize, Deserialize)]
struct Header {
    format: u32,
    genus: u32,
    truncation: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct Record {
    key: String,
    coefficients: Vec<String>,
}

/// Parsed file contents: records are kept only under a matching header.
struct Contents {
    header_ok: bool,
    /// Byte length of the complete lines.
    intact: u64,
    records: Vec<(MemoKey, Series)>,
}

pub struct MemoCache {
    path: PathBuf,
    genus: u32,
    truncation: usize,
}

impl MemoCache {
    pub fn new(dir: &Path, genus: u32, truncation: usize) -> Self {
        Self {
            path: dir.join(FILE_NAME),
            genus,
            truncation,
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn header(&self) -> Header {
        Header {
            format: FORMAT_VERSION,
            genus: self.genus,
            truncation: self.truncation,
        }
    }

    fn parse(&self, text: &str) -> Contents {
        let intact = text.rfind('\n').map_or(0, |i| i + 1);
        let mut lines = text[..intact].lines();
        let header_ok = lines
            .next()
            .and_then(|l| serde_json::from_str::<Header>(l).ok())
            .is_some_and(|h| h == self.header());
        let records = if header_ok {
            lines.filter_map(|l| self.record(l)).collect()
        } else {
            Vec::new()
        };
        Contents {
            header_ok,
            intact: intact as u64,
            records,
        }
    }

    fn record(&self, line: &str) -> Option<(MemoKey, Series)> {
        let r: Record = serde_json::from_str(line).ok()?;
        let key = r.key.parse().ok()?;
        let series = SeriesRecord {
            variable: "v".into(),
            truncation: self.truncation,
            coefficients: r.coefficients,
        }
        .to_series()
        .ok()?;
        Some((key, series))
    }

    /// Seeds `engine` from the file; a missing file loads nothing.
    pub fn load_into(&self, engine: &Engine) -> io::Result<u64> {
        let mut file = match File::open(&self.path) {
            Ok(f) => f,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(0),
            Err(e) => return Err(e),
        };
        file.lock_shared()?;
        let mut text = String::new();
        file.read_to_string(&mut text)?;
        file.unlock()?;
        let contents = self.parse(&text);
        let mut n = 0;
        for (k, v) in contents.records {
            if engine.preload(k, v).is_ok() {
                n += 1;
            }
        }
        Ok(n)
    }

    /// Appends every memo entry of `engine` not yet on disk, rewriting the
    /// file when its header does not match. Returns the number written.
    pub fn store_from(&self, engine: &Engine) -> io::Result<u64> {
        if let Some(dir) = self.path.parent() {
            fs::create_dir_all(dir)?;
        }
        let mut file = OpenOptions::new()
            .read(true)
            .write(true)
            .create(true)
            .truncate(false)
            .open(&self.path)?;
        file.lock()?;
        let mut text = String::new();
        file.read_to_string(&mut text)?;
        let contents = self.parse(&text);
        let mut out = String::new();
        let known: BTreeSet<MemoKey> = if contents.header_ok {
            file.set_len(contents.intact)?;
            contents.records.into_iter().map(|(k, _)| k).collect()
        } else {
            file.set_len(0)?;
            out.push_str(&serde_json::to_string(&self.header())?);
            out.push('\n');
            BTreeSet::new()
        };
        let mut n = 0;
        for (k, v) in engine.memo_entries() {
            if known.contains(&k) {
                continue;
            }
            let rec = Record {
                key: k.to_string(),
                coefficients: SeriesRecord::new(&v).coefficients,
            };
            out.push_str(&serde_json::to_string(&rec)?);
            out.push('\n');
            n += 1;
        }
        file.seek(SeekFrom::End(0))?;
        file.write_all(out.as_bytes())?;
        file.sync_data()?;
        file.unlock()?;
        Ok(n)
    }
}
