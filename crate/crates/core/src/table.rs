//! Multiset tables over nullable text values, attribute alignments, and the
//! two table-building operators used everywhere else: left-outer-union and
//! dilution.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{NtsError, Result};

/// A cell value. `Null == Null` holds (two-valued logic).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Null,
    Text(String),
}

impl Value {
    pub fn text(s: impl Into<String>) -> Self {
        Value::Text(s.into())
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Null => None,
            Value::Text(s) => Some(s),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => f.write_str("⊥"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

/// Ordinal identifier of a tuple within its table. Never used in scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TupleId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tuple {
    pub id: TupleId,
    pub values: Vec<Value>,
}

impl Tuple {
    pub fn arity(&self) -> usize {
        self.values.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    id: String,
    schema: Vec<String>,
    rows: Vec<Tuple>,
}

impl Table {
    /// Builds a non-empty table, minting tuple ids by ordinal.
    pub fn new(id: impl Into<String>, schema: Vec<String>, rows: Vec<Vec<Value>>) -> Result<Self> {
        let id = id.into();
        if rows.is_empty() {
            return Err(NtsError::Validation(format!(
                "table '{id}': non-empty table required"
            )));
        }
        Self::build(id, schema, rows)
    }

    fn build(id: String, schema: Vec<String>, rows: Vec<Vec<Value>>) -> Result<Self> {
        if schema.is_empty() {
            return Err(NtsError::Schema(format!("table '{id}' has no attributes")));
        }
        let mut seen = HashSet::new();
        for name in &schema {
            if !seen.insert(name.as_str()) {
                return Err(NtsError::Schema(format!(
                    "table '{id}' repeats attribute '{name}'"
                )));
            }
        }
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(i, values)| {
                if values.len() != schema.len() {
                    return Err(NtsError::Schema(format!(
                        "table '{id}' row {i} has {} values, schema has {}",
                        values.len(),
                        schema.len()
                    )));
                }
                Ok(Tuple {
                    id: TupleId(i),
                    values,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Table { id, schema, rows })
    }

    /// Convenience constructor from string literals; empty strings become `Null`.
    pub fn from_strs(id: &str, schema: &[&str], rows: &[&[&str]]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|c| if c.is_empty() { Value::Null } else { Value::text(*c) })
                    .collect()
            })
            .collect();
        Table::new(id, schema.iter().map(|s| s.to_string()).collect(), rows)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn schema(&self) -> &[String] {
        &self.schema
    }

    pub fn rows(&self) -> &[Tuple] {
        &self.rows
    }

    pub fn arity(&self) -> usize {
        self.schema.len()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn attribute_index(&self, name: &str) -> Result<usize> {
        self.schema
            .iter()
            .position(|a| a == name)
            .ok_or_else(|| NtsError::Schema(format!("table '{}' has no attribute '{name}'", self.id)))
    }

    /// Iterates the values of one column in row order.
    pub fn column(&self, name: &str) -> Result<impl Iterator<Item = &Value> + '_> {
        let idx = self.attribute_index(name)?;
        Ok(self.rows.iter().map(move |t| &t.values[idx]))
    }

    /// Same contents under a different table id.
    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    /// Appends `right`'s tuples projected onto this table's schema. Ids continue
    /// from the current row count.
    fn append_projected(&mut self, right: &Table, pairs: &[(usize, usize)]) {
        let base = self.rows.len();
        for (offset, t) in right.rows.iter().enumerate() {
            let mut values = vec![Value::Null; self.schema.len()];
            for &(li, ri) in pairs {
                values[li] = t.values[ri].clone();
            }
            self.rows.push(Tuple {
                id: TupleId(base + offset),
                values,
            });
        }
    }

    pub(crate) fn empty_like(&self) -> Table {
        Table {
            id: self.id.clone(),
            schema: self.schema.clone(),
            rows: Vec::new(),
        }
    }
}

/// A one-to-one, non-empty mapping between attributes of two tables.
///
/// Pairs are stored as `(query attribute, candidate attribute)`. When used as
/// the argument of [`left_outer_union`], the query side is the left table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alignment {
    pub query_table_id: String,
    pub candidate_table_id: String,
    pub pairs: Vec<(String, String)>,
}

impl Alignment {
    pub fn new(
        query_table_id: impl Into<String>,
        candidate_table_id: impl Into<String>,
        pairs: Vec<(String, String)>,
    ) -> Result<Self> {
        let a = Alignment {
            query_table_id: query_table_id.into(),
            candidate_table_id: candidate_table_id.into(),
            pairs,
        };
        a.check_one_to_one()?;
        Ok(a)
    }

    /// Aligns every attribute of `t` with itself.
    pub fn identity(query_table_id: impl Into<String>, t: &Table) -> Self {
        Alignment {
            query_table_id: query_table_id.into(),
            candidate_table_id: t.id().to_string(),
            pairs: t.schema().iter().map(|a| (a.clone(), a.clone())).collect(),
        }
    }

    /// Aligns the attributes two tables have in common, by name.
    pub fn by_name(query: &Table, candidate: &Table) -> Result<Self> {
        let pairs = query
            .schema()
            .iter()
            .filter(|a| candidate.schema().contains(a))
            .map(|a| (a.clone(), a.clone()))
            .collect();
        Alignment::new(query.id(), candidate.id(), pairs)
    }

    fn check_one_to_one(&self) -> Result<()> {
        if self.pairs.is_empty() {
            return Err(NtsError::Validation(format!(
                "alignment {} -> {} has no attribute pairs",
                self.query_table_id, self.candidate_table_id
            )));
        }
        let mut left = HashSet::new();
        let mut right = HashSet::new();
        for (q, c) in &self.pairs {
            if !left.insert(q) {
                return Err(NtsError::Validation(format!(
                    "alignment {} -> {} maps query attribute '{q}' twice",
                    self.query_table_id, self.candidate_table_id
                )));
            }
            if !right.insert(c) {
                return Err(NtsError::Validation(format!(
                    "alignment {} -> {} maps candidate attribute '{c}' twice",
                    self.query_table_id, self.candidate_table_id
                )));
            }
        }
        Ok(())
    }

    /// Swaps the two sides.
    pub fn reversed(&self) -> Alignment {
        Alignment {
            query_table_id: self.candidate_table_id.clone(),
            candidate_table_id: self.query_table_id.clone(),
            pairs: self.pairs.iter().map(|(q, c)| (c.clone(), q.clone())).collect(),
        }
    }

    /// Same pairs, pointing at a different candidate table.
    pub fn retarget(&self, candidate_table_id: impl Into<String>) -> Alignment {
        Alignment {
            candidate_table_id: candidate_table_id.into(),
            ..self.clone()
        }
    }

    /// Resolves the pairs into column indices of `query` and `candidate`.
    pub fn resolve(&self, query: &Table, candidate: &Table) -> Result<Vec<(usize, usize)>> {
        self.check_one_to_one()?;
        self.pairs
            .iter()
            .map(|(q, c)| Ok((query.attribute_index(q)?, candidate.attribute_index(c)?)))
            .collect()
    }

    /// Candidate attribute aligned with the given query attribute, if any.
    pub fn candidate_for(&self, query_attr: &str) -> Option<&str> {
        self.pairs
            .iter()
            .find(|(q, _)| q == query_attr)
            .map(|(_, c)| c.as_str())
    }
}

/// Alignments from one query to each candidate, keyed by candidate table id.
pub type AlignmentMap = BTreeMap<String, Alignment>;

/// Asymmetric multiset outer union: keeps all of `left`'s attributes and rows,
/// appends one row per `right` tuple with unaligned left attributes set to
/// `Null`, and drops `right`'s unaligned attributes.
pub fn left_outer_union(left: &Table, right: &Table, a: &Alignment) -> Result<Table> {
    let pairs = a.resolve(left, right)?;
    let mut out = left.clone();
    out.append_projected(right, &pairs);
    Ok(out)
}

/// Number of query tuples injected by a dilution of degree `delta`.
pub fn dilution_count(delta: f64, query_len: usize) -> Result<usize> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(NtsError::Parameter(format!(
            "dilution degree must lie in (0, 1], got {delta}"
        )));
    }
    // Absorb representation error so that e.g. 0.1 * 30 yields 3, not 4.
    let raw = delta * query_len as f64;
    let count = (raw - 1e-9 * raw.max(1.0)).ceil() as usize;
    Ok(count.max(1).min(query_len))
}

/// `t` outer-unioned with a seeded sample of `⌈delta·|q|⌉` tuples of `q`,
/// drawn uniformly without replacement and appended in `q`'s row order.
///
/// `a` aligns `t` (query side) to `q` (candidate side); use
/// [`Alignment::reversed`] on a query-to-candidate alignment.
pub fn dilute(t: &Table, q: &Table, a: &Alignment, delta: f64, seed: u64) -> Result<Table> {
    let count = dilution_count(delta, q.len())?;
    let pairs = a.resolve(t, q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, q.len(), count).into_vec();
    picked.sort_unstable();
    let mut sample = q.empty_like();
    sample.rows = picked.iter().map(|&i| q.rows[i].clone()).collect();
    let mut out = t.clone();
    out.append_projected(&sample, &pairs);
    Ok(out)
}
