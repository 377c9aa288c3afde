//! Deterministic, non-semantic fallback embedder for tests and demos.
//!
//! Attribute vectors are L2-normalized hashed bags of normalized tokens. They
//! only capture token overlap and stand in for learned embeddings where none
//! are available.

use crate::error::Result;
use crate::normalize::tokens;
use crate::sim::EmbeddingStore;
use crate::table::Table;

pub const FALLBACK_DIM: usize = 64;

// FNV-1a, 64 bit.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub(crate) fn stable_hash(s: &str) -> u64 {
    fnv1a(s.as_bytes())
}

fn bag<'a>(texts: impl IntoIterator<Item = &'a str>) -> Vec<f64> {
    let mut v = vec![0.0; FALLBACK_DIM];
    for text in texts {
        for tok in tokens(text) {
            v[(stable_hash(&tok) % FALLBACK_DIM as u64) as usize] += 1.0;
        }
    }
    v
}

fn unit(mut v: Vec<f64>, fallback: &str) -> Vec<f64> {
    if v.iter().all(|&x| x == 0.0) {
        v = bag([fallback]);
        if v.iter().all(|&x| x == 0.0) {
            v[0] = 1.0;
        }
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    v
}

/// Vector of one column's non-null cells. Columns without tokens fall back to
/// their header.
pub fn attribute_vector(t: &Table, attribute: &str) -> Result<Vec<f64>> {
    let col = t.column(attribute)?;
    Ok(unit(bag(col.filter_map(|v| v.as_text())), attribute))
}

/// Vector of every non-null cell in the table.
pub fn table_vector(t: &Table) -> Vec<f64> {
    let cells = t
        .rows()
        .iter()
        .flat_map(|r| r.values.iter().filter_map(|v| v.as_text()));
    unit(bag(cells), t.id())
}

/// Adds attribute and table vectors for every given table.
pub fn embed_tables<'a>(tables: impl IntoIterator<Item = &'a Table>) -> Result<EmbeddingStore> {
    let mut store = EmbeddingStore::new();
    for t in tables {
        for a in t.schema() {
            store.insert_attribute(t.id(), a, attribute_vector(t, a)?)?;
        }
        store.insert_table(t.id(), table_vector(t))?;
    }
    Ok(store)
}
