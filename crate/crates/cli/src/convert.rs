//! Converters from third-party context exports to pair-list CSV.

use std::collections::HashSet;
use std::io::{Read, Write};

use armad_core::ingest::write_pairs;
use armad_core::{Context, Error, Result};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    /// Wide 0/1 table with a header: one tid column, one column per item.
    Matrix,
    /// One object per line: `tid,item,item,...`.
    Transactions,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvertStats {
    pub objects: usize,
    pub items: usize,
    pub pairs: usize,
    /// Objects with no item; pair lists cannot represent them.
    pub empty_objects: Vec<String>,
}

pub struct Options {
    pub format: Format,
    pub delimiter: u8,
    /// Matrix only; defaults to the first column.
    pub tid_column: Option<String>,
}

fn parse_err(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

fn cell_value(raw: &str, line: u64, column: &str) -> Result<bool> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "y" | "t" | "x" => Ok(true),
        "0" | "false" | "no" | "n" | "f" | "" => Ok(false),
        other => Err(Error::Parse {
            line,
            message: format!("column {column:?}: expected a 0/1 value, found {other:?}"),
        }),
    }
}

/// Reads an export into a context and the names of objects with no items.
pub fn read(reader: impl Read, opts: &Options) -> Result<(Context, Vec<String>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(opts.delimiter)
        .has_headers(opts.format == Format::Matrix)
        .flexible(opts.format == Format::Transactions)
        .from_reader(reader);
    let mut b = Context::builder();
    let mut empty = Vec::new();
    match opts.format {
        Format::Matrix => {
            let header = rdr.headers().map_err(parse_err)?.clone();
            let tid_col = match &opts.tid_column {
                Some(name) => header
                    .iter()
                    .position(|h| h.trim() == name)
                    .ok_or_else(|| {
                        Error::Config(format!("no column named {name:?} in the header"))
                    })?,
                None => 0,
            };
            let items: Vec<(usize, String)> = header
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != tid_col)
                .map(|(i, h)| (i, h.trim().to_owned()))
                .collect();
            if items.iter().any(|(_, h)| h.is_empty()) {
                return Err(Error::Parse {
                    line: 1,
                    message: "empty item name in header".into(),
                });
            }
            let mut seen = HashSet::new();
            for (_, name) in &items {
                if !seen.insert(name.as_str()) {
                    return Err(Error::Parse {
                        line: 1,
                        message: format!("duplicate column {name:?} in header"),
                    });
                }
                b.item(name, None);
            }
            for record in rdr.records() {
                let record = record.map_err(parse_err)?;
                let line = record.position().map(|p| p.line()).unwrap_or(0);
                let tid = record[tid_col].trim();
                if tid.is_empty() {
                    return Err(Error::Parse {
                        line,
                        message: "empty tid".into(),
                    });
                }
                b.object(tid);
                let mut any = false;
                for (i, name) in &items {
                    if cell_value(&record[*i], line, name)? {
                        b.pair(tid, name);
                        any = true;
                    }
                }
                if !any {
                    empty.push(tid.to_owned());
                }
            }
        }
        Format::Transactions => {
            for record in rdr.records() {
                let record = record.map_err(parse_err)?;
                let line = record.position().map(|p| p.line()).unwrap_or(0);
                let mut fields = record.iter().map(str::trim);
                let tid = fields.next().unwrap_or_default();
                if tid.is_empty() {
                    return Err(Error::Parse {
                        line,
                        message: "empty tid".into(),
                    });
                }
                b.object(tid);
                let mut any = false;
                for item in fields.filter(|f| !f.is_empty()) {
                    b.pair(tid, item);
                    any = true;
                }
                if !any {
                    empty.push(tid.to_owned());
                }
            }
        }
    }
    let c = b.build();
    if c.objects().iter().all(|o| o.is_empty()) {
        return Err(Error::EmptyContext);
    }
    Ok((c, empty))
}

pub fn convert(reader: impl Read, writer: impl Write, opts: &Options) -> Result<ConvertStats> {
    let (c, empty_objects) = read(reader, opts)?;
    write_pairs(&c, writer)?;
    Ok(ConvertStats {
        objects: c.m() - empty_objects.len(),
        items: c.n(),
        pairs: c.objects().iter().map(|o| o.len()).sum(),
        empty_objects,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use armad_core::ingest::read_pairs;

    fn opts(format: Format) -> Options {
        Options {
            format,
            delimiter: b',',
            tid_column: None,
        }
    }

    fn run(input: &str, o: &Options) -> (String, ConvertStats) {
        let mut out = Vec::new();
        let stats = convert(input.as_bytes(), &mut out, o).unwrap();
        (String::from_utf8(out).unwrap(), stats)
    }

    #[test]
    fn matrix_to_pairs() {
        let (csv, stats) = run(
            "Object_ID,a,b,c\no1,1,0,1\no2,0,1,0\no3,0,0,0\n",
            &opts(Format::Matrix),
        );
        assert_eq!(csv, "tid,item\no1,a\no1,c\no2,b\n");
        assert_eq!(stats.objects, 2);
        assert_eq!(stats.items, 3);
        assert_eq!(stats.empty_objects, ["o3"]);
    }

    #[test]
    fn matrix_named_tid_column() {
        let mut o = opts(Format::Matrix);
        o.tid_column = Some("id".into());
        let (csv, _) = run("a,id,b\ntrue,p1,no\n", &o);
        assert_eq!(csv, "tid,item\np1,a\n");
        o.tid_column = Some("missing".into());
        assert!(matches!(
            convert("a,b\n1,1\n".as_bytes(), Vec::new(), &o),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn matrix_bad_cell_reports_line() {
        let err = convert(
            "id,a\np1,1\np2,7\n".as_bytes(),
            Vec::new(),
            &opts(Format::Matrix),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn transactions_to_pairs() {
        let (csv, stats) = run("p1,x,y\np2\np3,y,,z\n", &opts(Format::Transactions));
        assert_eq!(csv, "tid,item\np1,x\np1,y\np3,y\np3,z\n");
        assert_eq!(stats.empty_objects, ["p2"]);
        let c = read_pairs(csv.as_bytes()).unwrap();
        assert_eq!((c.m(), c.n()), (2, 3));
    }

    #[test]
    fn semicolon_delimiter() {
        let mut o = opts(Format::Transactions);
        o.delimiter = b';';
        let (csv, _) = run("p1;a,b\n", &o);
        assert_eq!(csv, "tid,item\np1,\"a,b\"\n");
    }

    #[test]
    fn empty_input_is_an_error() {
        let e = convert("id,a\n".as_bytes(), Vec::new(), &opts(Format::Matrix)).unwrap_err();
        assert!(matches!(e, Error::EmptyContext));
    }
}
