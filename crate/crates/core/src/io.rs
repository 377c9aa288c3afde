//! File formats: CSV tables, JSON-lines alignments, tab-separated embeddings,
//! JSON manifests and CSV result and metric reports.
//!
//! Readers reject malformed input with an error naming the file and line.
//! Writers go through a temporary file in the target directory and rename it
//! into place.

use std::collections::{BTreeMap, HashSet};
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::benchgen::BenchmarkManifest;
use crate::error::{NtsError, Result};
use crate::rankers::{Method, RankedResult, ScoredTable};
use crate::sim::EmbeddingStore;
use crate::table::{Alignment, AlignmentMap, Table, Value};

/// Writes `path` atomically: the closure fills a temporary sibling file which
/// is renamed over the target on success.
pub fn atomic_write<F>(path: &Path, fill: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<&mut File>) -> std::io::Result<()>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| NtsError::io(path, e))?;
    {
        let mut w = BufWriter::new(tmp.as_file_mut());
        fill(&mut w).map_err(|e| NtsError::io(path, e))?;
        w.flush().map_err(|e| NtsError::io(path, e))?;
    }
    tmp.persist(path).map_err(|e| NtsError::io(path, e.error))?;
    Ok(())
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| NtsError::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> NtsError {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => NtsError::io(path, io),
        kind => NtsError::format(path, line, format!("{kind:?}")),
    }
}

fn file_stem(path: &Path) -> Result<String> {
    path.file_stem()
        .and_then(|s| s.to_str())
        .map(str::to_string)
        .ok_or_else(|| NtsError::format(path, 0, "file name is not valid UTF-8"))
}

/// Reads a CSV table whose first row is the header. The table id is the file
/// stem; empty cells become `Null`.
pub fn read_table(path: &Path) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(open(path)?);
    let schema: Vec<String> = rdr
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    if schema.is_empty() || (schema.len() == 1 && schema[0].is_empty()) {
        return Err(NtsError::format(path, 1, "non-empty table required"));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.len() != schema.len() {
            return Err(NtsError::format(
                path,
                line,
                format!("row has {} fields, header has {}", rec.len(), schema.len()),
            ));
        }
        rows.push(
            rec.iter()
                .map(|c| if c.is_empty() { Value::Null } else { Value::text(c) })
                .collect(),
        );
    }
    Table::new(file_stem(path)?, schema, rows).map_err(|e| NtsError::format(path, 1, e.to_string()))
}

/// Writes a table as CSV. `Null` becomes an empty cell, so an empty text value
/// cannot be represented and is rejected.
pub fn write_table(path: &Path, t: &Table) -> Result<()> {
    let mut out = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(t.schema()).map_err(|e| csv_error(path, e))?;
        for row in t.rows() {
            let mut cells = Vec::with_capacity(row.values.len());
            for v in &row.values {
                match v {
                    Value::Null => cells.push(""),
                    Value::Text(s) if s.is_empty() => {
                        return Err(NtsError::Validation(format!(
                            "table '{}' holds an empty text value, which CSV cannot distinguish from null",
                            t.id()
                        )))
                    }
                    Value::Text(s) => cells.push(s.as_str()),
                }
            }
            w.write_record(&cells).map_err(|e| csv_error(path, e))?;
        }
        w.flush().map_err(|e| NtsError::io(path, e))?;
    }
    atomic_write(path, |w| w.write_all(&out))
}

#[derive(Serialize, Deserialize)]
struct AlignmentRecord {
    query: String,
    candidate: String,
    pairs: Vec<(String, String)>,
}

/// One JSON object per line:
/// `{"query": "Q", "candidate": "T1", "pairs": [["Artist", "Artist"]]}`.
/// Blank lines are skipped.
pub fn read_alignments(path: &Path) -> Result<AlignmentMap> {
    let mut out = AlignmentMap::new();
    for (i, line) in BufReader::new(open(path)?).lines().enumerate() {
        let line = line.map_err(|e| NtsError::io(path, e))?;
        let n = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let rec: AlignmentRecord =
            serde_json::from_str(&line).map_err(|e| NtsError::format(path, n, e.to_string()))?;
        let a = Alignment::new(rec.query, rec.candidate, rec.pairs)
            .map_err(|e| NtsError::format(path, n, e.to_string()))?;
        if out.contains_key(&a.candidate_table_id) {
            return Err(NtsError::format(
                path,
                n,
                format!("second alignment for candidate '{}'", a.candidate_table_id),
            ));
        }
        out.insert(a.candidate_table_id.clone(), a);
    }
    Ok(out)
}

pub fn write_alignments(path: &Path, alignments: &AlignmentMap) -> Result<()> {
    let lines = alignments
        .values()
        .map(|a| {
            serde_json::to_string(&AlignmentRecord {
                query: a.query_table_id.clone(),
                candidate: a.candidate_table_id.clone(),
                pairs: a.pairs.clone(),
            })
        })
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| NtsError::Validation(e.to_string()))?;
    atomic_write(path, |w| {
        for l in &lines {
            writeln!(w, "{l}")?;
        }
        Ok(())
    })
}

const ATTRIBUTE_SEP: &str = "::";

/// Lines of `key<TAB>dim<TAB>v1 v2 ...`; the key is a table id for a table
/// vector or `table_id::attribute` for an attribute vector.
pub fn read_embeddings(path: &Path) -> Result<EmbeddingStore> {
    let mut store = EmbeddingStore::new();
    let mut keys = HashSet::new();
    for (i, line) in BufReader::new(open(path)?).lines().enumerate() {
        let line = line.map_err(|e| NtsError::io(path, e))?;
        let n = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let (Some(key), Some(dim), Some(values), None) = (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(NtsError::format(path, n, "expected key, dimension and values separated by tabs"));
        };
        let dim: usize = dim
            .parse()
            .map_err(|_| NtsError::format(path, n, format!("bad dimension '{dim}'")))?;
        let v = values
            .split(' ')
            .map(|x| x.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| NtsError::format(path, n, format!("bad vector component: {e}")))?;
        if v.len() != dim {
            return Err(NtsError::format(path, n, format!("declared dimension {dim}, found {} values", v.len())));
        }
        if !keys.insert(key.to_string()) {
            return Err(NtsError::format(path, n, format!("duplicate key '{key}'")));
        }
        let inserted = match key.split_once(ATTRIBUTE_SEP) {
            Some((table, attr)) => store.insert_attribute(table, attr, v),
            None => store.insert_table(key, v),
        };
        inserted.map_err(|e| NtsError::format(path, n, e.to_string()))?;
    }
    Ok(store)
}

fn vector_line(key: &str, v: &[f64]) -> String {
    let values: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("{key}\t{}\t{}", v.len(), values.join(" "))
}

pub fn write_embeddings(path: &Path, store: &EmbeddingStore) -> Result<()> {
    let mut lines: Vec<String> = store.tables().map(|(t, v)| vector_line(t, v)).collect();
    lines.extend(
        store
            .attributes()
            .map(|(t, a, v)| vector_line(&format!("{t}{ATTRIBUTE_SEP}{a}"), v)),
    );
    atomic_write(path, |w| {
        for l in &lines {
            writeln!(w, "{l}")?;
        }
        Ok(())
    })
}

pub fn read_manifest(path: &Path) -> Result<BenchmarkManifest> {
    let text = fs::read_to_string(path).map_err(|e| NtsError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| NtsError::format(path, e.line(), e.to_string()))
}

pub fn write_manifest(path: &Path, m: &BenchmarkManifest) -> Result<()> {
    let text = serde_json::to_string_pretty(m).map_err(|e| NtsError::Validation(e.to_string()))?;
    atomic_write(path, |w| writeln!(w, "{text}"))
}

/// One ranked or selected list for a query at a given `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub query_id: String,
    pub l: usize,
    pub result: RankedResult,
}

const RESULT_HEADER: [&str; 6] = ["method", "query_id", "l", "rank", "table_id", "score"];
const REPORT_HEADER: [&str; 5] = ["method", "query_id", "l", "metric_name", "value"];

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut out = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(header).map_err(|e| csv_error(path, e))?;
        for r in rows {
            w.write_record(r).map_err(|e| csv_error(path, e))?;
        }
        w.flush().map_err(|e| NtsError::io(path, e))?;
    }
    atomic_write(path, |w| w.write_all(&out))
}

/// Reads a CSV with exactly the given header, returning each row with its line.
fn read_csv(path: &Path, header: &[&str]) -> Result<Vec<(usize, csv::StringRecord)>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(open(path)?);
    let got = rdr.headers().map_err(|e| csv_error(path, e))?;
    if got.iter().ne(header.iter().copied()) {
        return Err(NtsError::format(path, 1, format!("expected header {}", header.join(","))));
    }
    rdr.records()
        .map(|r| {
            let r = r.map_err(|e| csv_error(path, e))?;
            Ok((r.position().map(|p| p.line() as usize).unwrap_or(0), r))
        })
        .collect()
}

fn parse_field<T: std::str::FromStr>(path: &Path, line: usize, what: &str, s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| NtsError::format(path, line, format!("bad {what} '{s}'")))
}

/// Rows `method,query_id,l,rank,table_id,score`, ranks starting at 1.
pub fn write_results(path: &Path, records: &[ResultRecord]) -> Result<()> {
    let rows: Vec<Vec<String>> = records
        .iter()
        .flat_map(|r| {
            r.result.ordering.iter().enumerate().map(move |(i, s)| {
                vec![
                    r.result.method.to_string(),
                    r.query_id.clone(),
                    r.l.to_string(),
                    (i + 1).to_string(),
                    s.table_id.clone(),
                    s.score.to_string(),
                ]
            })
        })
        .collect();
    write_csv(path, &RESULT_HEADER, &rows)
}

/// Groups consecutive rows sharing method, query and `l` back into records.
pub fn read_results(path: &Path) -> Result<Vec<ResultRecord>> {
    let mut out: Vec<ResultRecord> = Vec::new();
    for (line, r) in read_csv(path, &RESULT_HEADER)? {
        let method: Method = parse_field(path, line, "method", &r[0])?;
        let l: usize = parse_field(path, line, "l", &r[2])?;
        let rank: usize = parse_field(path, line, "rank", &r[3])?;
        let score: f64 = parse_field(path, line, "score", &r[5])?;
        let same = out
            .last()
            .is_some_and(|last| last.result.method == method && last.query_id == r[1] && last.l == l);
        if !same {
            out.push(ResultRecord {
                query_id: r[1].to_string(),
                l,
                result: RankedResult {
                    method,
                    ordering: Vec::new(),
                    ranked: method.is_ranked(),
                },
            });
        }
        let rec = out.last_mut().expect("pushed above");
        if rank != rec.result.ordering.len() + 1 {
            return Err(NtsError::format(path, line, format!("rank {rank} out of sequence")));
        }
        rec.result.ordering.push(ScoredTable {
            table_id: r[4].to_string(),
            score,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub method: String,
    pub query_id: String,
    pub l: usize,
    pub metric_name: String,
    pub value: f64,
}

/// Rows `method,query_id,l,metric_name,value`.
pub fn write_report(path: &Path, rows: &[MetricRow]) -> Result<()> {
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|m| {
            vec![
                m.method.clone(),
                m.query_id.clone(),
                m.l.to_string(),
                m.metric_name.clone(),
                m.value.to_string(),
            ]
        })
        .collect();
    write_csv(path, &REPORT_HEADER, &rows)
}

pub fn read_report(path: &Path) -> Result<Vec<MetricRow>> {
    read_csv(path, &REPORT_HEADER)?
        .into_iter()
        .map(|(line, r)| {
            Ok(MetricRow {
                method: r[0].to_string(),
                query_id: r[1].to_string(),
                l: parse_field(path, line, "l", &r[2])?,
                metric_name: r[3].to_string(),
                value: parse_field(path, line, "value", &r[4])?,
            })
        })
        .collect()
}

/// A directory of CSV tables addressed by file stem.
pub struct FileCatalog {
    root: PathBuf,
    index: OnceLock<BTreeMap<String, PathBuf>>,
}

impl FileCatalog {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        if !root.is_dir() {
            return Err(NtsError::io(
                &root,
                std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory"),
            ));
        }
        Ok(FileCatalog {
            root,
            index: OnceLock::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn index(&self) -> Result<&BTreeMap<String, PathBuf>> {
        if let Some(ix) = self.index.get() {
            return Ok(ix);
        }
        let mut ix = BTreeMap::new();
        for entry in fs::read_dir(&self.root).map_err(|e| NtsError::io(&self.root, e))? {
            let path = entry.map_err(|e| NtsError::io(&self.root, e))?.path();
            if path.is_file() && path.extension().is_some_and(|x| x == "csv") {
                ix.insert(file_stem(&path)?, path);
            }
        }
        Ok(self.index.get_or_init(|| ix))
    }

    /// Table ids in ascending order.
    pub fn ids(&self) -> Result<Vec<String>> {
        Ok(self.index()?.keys().cloned().collect())
    }

    pub fn path(&self, id: &str) -> Result<&Path> {
        self.index()?
            .get(id)
            .map(PathBuf::as_path)
            .ok_or_else(|| NtsError::Lookup(format!("no table '{id}' under {}", self.root.display())))
    }

    pub fn load(&self, id: &str) -> Result<Table> {
        read_table(self.path(id)?)
    }

    /// Every table, sorted by id.
    pub fn load_all(&self) -> Result<Vec<Table>> {
        self.index()?.values().map(|p| read_table(p)).collect()
    }
}
