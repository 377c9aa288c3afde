//! Syntactic normalization of cell values and extraction of attribute domains.
//!
//! Values are split on spaces, periods, underscores and dashes, lowercased,
//! and Porter-stemmed token by token. Normalization feeds the syntactic
//! similarity path and ER blocking only; novelty scoring compares raw values
//! and the semantic path never sees normalized text.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::table::Table;

fn is_delimiter(c: char) -> bool {
    matches!(c, ' ' | '.' | '_' | '-')
}

/// Normalized tokens of a raw value, in order. Empty tokens are dropped.
pub fn tokens(raw: &str) -> impl Iterator<Item = String> + '_ {
    raw.split(is_delimiter)
        .filter(|t| !t.is_empty())
        .map(|t| porter_stemmer::stem(&t.to_lowercase()))
}

pub fn normalize_value(raw: &str) -> String {
    tokens(raw).collect::<Vec<_>>().join(" ")
}

/// Normalized values of one attribute: as a multiset of counts, whose key set
/// is the set view. Nulls are excluded.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NormalizedDomain {
    counts: BTreeMap<String, usize>,
}

impl NormalizedDomain {
    pub fn from_values<'a>(values: impl IntoIterator<Item = &'a str>) -> Self {
        let mut counts = BTreeMap::new();
        for v in values {
            *counts.entry(normalize_value(v)).or_insert(0) += 1;
        }
        NormalizedDomain { counts }
    }

    /// Distinct normalized values (the set view).
    pub fn values(&self) -> impl Iterator<Item = &str> {
        self.counts.keys().map(String::as_str)
    }

    pub fn contains(&self, v: &str) -> bool {
        self.counts.contains_key(v)
    }

    pub fn count(&self, v: &str) -> usize {
        self.counts.get(v).copied().unwrap_or(0)
    }

    pub fn multiset(&self) -> &BTreeMap<String, usize> {
        &self.counts
    }

    /// Number of distinct values.
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    /// Number of non-null cells.
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

pub fn extract_domain(t: &Table, attribute: &str) -> Result<NormalizedDomain> {
    let col = t.column(attribute)?;
    Ok(NormalizedDomain::from_values(col.filter_map(|v| v.as_text())))
}
