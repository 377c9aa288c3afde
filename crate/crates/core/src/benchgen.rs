//! Benchmark pools: every unionable table plus a diluted version of it, a
//! renamed copy of the query and a diluted version of that copy.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embed::stable_hash;
use crate::error::{NtsError, Result};
use crate::metrics::EvalPool;
use crate::table::{dilute, Alignment, AlignmentMap, Table};

pub const DEFAULT_DELTA: f64 = 0.4;
pub const DEFAULT_K: usize = 20;
pub const DILUTED_SUFFIX: &str = "__diluted";
pub const COPY_SUFFIX: &str = "__copy";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Original,
    Diluted,
    QueryCopy,
    DilutedQuery,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkManifest {
    pub query_id: String,
    pub pool: EvalPool,
    pub delta: f64,
    /// Number of unionable tables taken from the input.
    pub k: usize,
    pub seed: u64,
    pub provenance: BTreeMap<String, Origin>,
}

impl BenchmarkManifest {
    pub fn pool_size(&self) -> usize {
        self.provenance.len()
    }
}

/// A generated pool with its tables and query alignments, in manifest order:
/// originals sorted by id, each followed by its diluted version, then the
/// query copy and the diluted copy.
#[derive(Debug, Clone)]
pub struct Benchmark {
    pub manifest: BenchmarkManifest,
    pub tables: Vec<Table>,
    pub alignments: AlignmentMap,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchConfig {
    pub delta: f64,
    pub k: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            delta: DEFAULT_DELTA,
            k: DEFAULT_K,
            seed: 0,
        }
    }
}

pub fn diluted_id(id: &str) -> String {
    format!("{id}{DILUTED_SUFFIX}")
}

pub fn copy_id(query_id: &str) -> String {
    format!("{query_id}{COPY_SUFFIX}")
}

fn table_seed(seed: u64, id: &str) -> u64 {
    seed ^ stable_hash(id)
}

/// Builds the pool from the first `k` unionables by id.
pub fn build_benchmark(
    query: &Table,
    unionables: &[Table],
    alignments: &AlignmentMap,
    config: BenchConfig,
) -> Result<Benchmark> {
    if unionables.is_empty() {
        return Err(NtsError::Validation("at least one unionable table is required".into()));
    }
    if config.k == 0 {
        return Err(NtsError::Parameter("k must be at least 1".into()));
    }
    let mut chosen: Vec<&Table> = unionables.iter().collect();
    chosen.sort_by(|a, b| a.id().cmp(b.id()));
    let mut ids = BTreeSet::new();
    for t in &chosen {
        if !ids.insert(t.id()) {
            return Err(NtsError::Validation(format!("unionable id '{}' appears twice", t.id())));
        }
        if t.id() == query.id() {
            return Err(NtsError::Validation(format!("unionable '{}' shares the query id", t.id())));
        }
    }
    chosen.truncate(config.k);

    let qcopy_id = copy_id(query.id());
    let qdil_id = diluted_id(&qcopy_id);
    let generated: BTreeSet<String> = chosen
        .iter()
        .map(|t| diluted_id(t.id()))
        .chain([qcopy_id.clone(), qdil_id.clone()])
        .collect();
    if let Some(clash) = chosen.iter().find(|t| generated.contains(t.id())) {
        return Err(NtsError::Validation(format!(
            "unionable id '{}' collides with a generated id",
            clash.id()
        )));
    }

    let pairs: Vec<(Table, Alignment, Table, Alignment)> = chosen
        .par_iter()
        .map(|t| {
            let a = alignments.get(t.id()).ok_or_else(|| {
                NtsError::Validation(format!("unionable '{}' has no alignment to the query", t.id()))
            })?;
            a.resolve(query, t)?;
            let did = diluted_id(t.id());
            let d = dilute(t, query, &a.reversed(), config.delta, table_seed(config.seed, t.id()))?.with_id(&did);
            Ok(((*t).clone(), a.clone(), d, a.retarget(did)))
        })
        .collect::<Result<_>>()?;

    let copy = query.clone().with_id(&qcopy_id);
    let copy_align = Alignment::identity(query.id(), &copy);
    let copy_dil = dilute(
        &copy,
        query,
        &copy_align.reversed(),
        config.delta,
        table_seed(config.seed, &qcopy_id),
    )?
    .with_id(&qdil_id);

    let mut tables = Vec::with_capacity(2 * pairs.len() + 2);
    let mut aligned = AlignmentMap::new();
    let mut provenance = BTreeMap::new();
    let mut pool = EvalPool {
        originals: BTreeSet::new(),
        diluted_of: BTreeMap::new(),
        query_id: query.id().to_string(),
        query_copy_id: Some(qcopy_id.clone()),
        diluted_query_id: Some(qdil_id.clone()),
    };
    for (t, a, d, da) in pairs {
        pool.originals.insert(t.id().to_string());
        pool.diluted_of.insert(t.id().to_string(), d.id().to_string());
        provenance.insert(t.id().to_string(), Origin::Original);
        provenance.insert(d.id().to_string(), Origin::Diluted);
        aligned.insert(t.id().to_string(), a);
        aligned.insert(d.id().to_string(), da);
        tables.push(t);
        tables.push(d);
    }
    provenance.insert(qcopy_id.clone(), Origin::QueryCopy);
    provenance.insert(qdil_id.clone(), Origin::DilutedQuery);
    aligned.insert(qdil_id.clone(), copy_align.retarget(&qdil_id));
    aligned.insert(qcopy_id, copy_align);
    tables.push(copy);
    tables.push(copy_dil);

    let k = pool.originals.len();
    Ok(Benchmark {
        manifest: BenchmarkManifest {
            query_id: query.id().to_string(),
            pool,
            delta: config.delta,
            k,
            seed: config.seed,
            provenance,
        },
        tables,
        alignments: aligned,
    })
}
