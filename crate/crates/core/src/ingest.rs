//! Pair-list CSV ingestion (`tid,item` per line), serialization, label files,
//! and outer joins of several contexts.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::context::Context;
use crate::error::{Error, Result};

pub fn load_context(path: impl AsRef<Path>) -> Result<Context> {
    let file = File::open(path.as_ref())?;
    read_pairs(BufReader::new(file))
}

/// Reads a pair-list CSV. An optional `tid,item` header line is skipped.
pub fn read_pairs<R: Read>(reader: R) -> Result<Context> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut builder = Context::builder();
    let mut first = true;
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            Error::Parse {
                line,
                message: e.to_string(),
            }
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if first {
            first = false;
            if record.len() == 2 && &record[0] == "tid" && &record[1] == "item" {
                continue;
            }
        }
        if record.len() != 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected 2 fields `tid,item`, found {}", record.len()),
            });
        }
        let (tid, item) = (&record[0], &record[1]);
        if tid.is_empty() || item.is_empty() {
            return Err(Error::Parse {
                line,
                message: "empty tid or item".into(),
            });
        }
        builder.pair(tid, item);
    }
    if builder.is_empty() {
        return Err(Error::EmptyContext);
    }
    Ok(builder.build())
}

/// Writes the relation as pair-list CSV with a header line.
pub fn write_pairs<W: Write>(c: &Context, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["tid", "item"])?;
    for (tid, item) in c.pairs() {
        w.write_record([tid, item])?;
    }
    w.flush()?;
    Ok(())
}

/// Ground-truth file: one anomalous tid name per line; blank lines ignored.
pub fn read_labels<R: Read>(reader: R) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for line in BufReader::new(reader).lines() {
        let line = line?;
        let name = line.trim();
        if !name.is_empty() && seen.insert(name.to_owned()) {
            out.push(name.to_owned());
        }
    }
    Ok(out)
}

pub fn load_labels(path: impl AsRef<Path>) -> Result<Vec<String>> {
    read_labels(File::open(path.as_ref())?)
}

/// Outer join on tid names. Every item of part `tag` is renamed `tag:name`.
/// Objects keep first-appearance order across parts; items are laid out part
/// by part.
pub fn join_contexts(parts: &[(&str, &Context)]) -> Result<Context> {
    let mut tags = HashSet::new();
    for (tag, _) in parts {
        if tag.is_empty() {
            return Err(Error::Config("empty context tag".into()));
        }
        if !tags.insert(*tag) {
            return Err(Error::Config(format!("duplicate context tag {tag:?}")));
        }
    }
    let mut b = Context::builder();
    for (_, c) in parts {
        for name in c.tid_names() {
            b.object(name);
        }
    }
    for (tag, c) in parts {
        for item in c.items() {
            b.item(&format!("{tag}:{}", item.name), Some(tag));
        }
        for (tid, item) in c.pairs() {
            b.tagged_pair(tid, &format!("{tag}:{item}"), tag);
        }
    }
    Ok(b.build())
}
