//! Attribute similarity: syntactic (Jaccard for large domains, one minus the
//! Jensen–Shannon distance for small ones) and semantic (cosine over
//! ingested embeddings).

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{NtsError, Result};
use crate::normalize::{extract_domain, NormalizedDomain};
use crate::table::Table;

/// Domain-size threshold used when none is given.
pub const DEFAULT_DOMAIN_THRESHOLD: usize = 20;

/// Precomputed dense vectors, keyed per attribute `(table_id, attribute)` and
/// per table. Read-only once loaded.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmbeddingStore {
    attribute_vectors: BTreeMap<(String, String), Vec<f64>>,
    table_vectors: BTreeMap<String, Vec<f64>>,
    attribute_dim: Option<usize>,
    table_dim: Option<usize>,
}

fn check_vector(v: &[f64], expected: Option<usize>, what: &str) -> Result<()> {
    if v.is_empty() {
        return Err(NtsError::Validation(format!("{what}: empty vector")));
    }
    if let Some(d) = expected {
        if d != v.len() {
            return Err(NtsError::Validation(format!(
                "{what}: dimension {} differs from {d}",
                v.len()
            )));
        }
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(NtsError::Validation(format!("{what}: non-finite component")));
    }
    if v.iter().all(|&x| x == 0.0) {
        return Err(NtsError::Validation(format!("{what}: zero vector")));
    }
    Ok(())
}

impl EmbeddingStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert_attribute(&mut self, table_id: &str, attribute: &str, v: Vec<f64>) -> Result<()> {
        check_vector(&v, self.attribute_dim, &format!("{table_id}::{attribute}"))?;
        self.attribute_dim = Some(v.len());
        self.attribute_vectors
            .insert((table_id.to_string(), attribute.to_string()), v);
        Ok(())
    }

    pub fn insert_table(&mut self, table_id: &str, v: Vec<f64>) -> Result<()> {
        check_vector(&v, self.table_dim, table_id)?;
        self.table_dim = Some(v.len());
        self.table_vectors.insert(table_id.to_string(), v);
        Ok(())
    }

    pub fn attribute(&self, table_id: &str, attribute: &str) -> Result<&[f64]> {
        self.attribute_vectors
            .get(&(table_id.to_string(), attribute.to_string()))
            .map(Vec::as_slice)
            .ok_or_else(|| NtsError::Lookup(format!("no attribute vector for '{table_id}::{attribute}'")))
    }

    pub fn table(&self, table_id: &str) -> Result<&[f64]> {
        self.table_vectors
            .get(table_id)
            .map(Vec::as_slice)
            .ok_or_else(|| NtsError::Lookup(format!("no table vector for '{table_id}'")))
    }

    pub fn attribute_dim(&self) -> Option<usize> {
        self.attribute_dim
    }

    pub fn table_dim(&self) -> Option<usize> {
        self.table_dim
    }

    pub fn attributes(&self) -> impl Iterator<Item = (&str, &str, &[f64])> {
        self.attribute_vectors
            .iter()
            .map(|((t, a), v)| (t.as_str(), a.as_str(), v.as_slice()))
    }

    pub fn tables(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.table_vectors.iter().map(|(t, v)| (t.as_str(), v.as_slice()))
    }

    pub fn is_empty(&self) -> bool {
        self.attribute_vectors.is_empty() && self.table_vectors.is_empty()
    }
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let sa: f64 = a.iter().map(|x| x * x).sum();
    let sb: f64 = b.iter().map(|x| x * x).sum();
    if sa == 0.0 || sb == 0.0 {
        return 0.0;
    }
    // sqrt(sa * sa) == sa, so identical vectors give exactly 1.
    (dot / (sa * sb).sqrt()).clamp(-1.0, 1.0)
}

/// A discrete distribution over an explicit support; values outside the
/// observed domain carry mass 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    mass: BTreeMap<String, f64>,
}

impl Distribution {
    /// Empirical distribution of `domain`'s multiset counts over `support`.
    pub fn over_support(domain: &NormalizedDomain, support: &BTreeSet<String>) -> Result<Self> {
        let total = domain.total();
        if total == 0 {
            return Err(NtsError::Contract("distribution of an empty domain".into()));
        }
        if let Some(v) = domain.values().find(|v| !support.contains(*v)) {
            return Err(NtsError::Contract(format!("value '{v}' outside the support")));
        }
        let mass = support
            .iter()
            .map(|v| (v.clone(), domain.count(v) as f64 / total as f64))
            .collect();
        Ok(Distribution { mass })
    }

    pub fn from_masses(mass: BTreeMap<String, f64>) -> Result<Self> {
        let sum: f64 = mass.values().sum();
        if mass.values().any(|&p| p < 0.0 || !p.is_finite()) || (sum - 1.0).abs() > 1e-9 {
            return Err(NtsError::Contract(format!("masses must be non-negative and sum to 1, got {sum}")));
        }
        Ok(Distribution { mass })
    }

    pub fn mass(&self, v: &str) -> f64 {
        self.mass.get(v).copied().unwrap_or(0.0)
    }

    pub fn support(&self) -> impl Iterator<Item = &str> {
        self.mass.keys().map(String::as_str)
    }
}

/// `|A ∩ B| / |A ∪ B|` over the set views. Two empty domains are identical.
pub fn jaccard(a: &NormalizedDomain, b: &NormalizedDomain) -> f64 {
    let inter = a.values().filter(|v| b.contains(v)).count();
    let union = a.distinct() + b.distinct() - inter;
    if union == 0 {
        return 1.0;
    }
    inter as f64 / union as f64
}

fn kl_to_mixture(p: f64, q: f64) -> f64 {
    if p == 0.0 {
        return 0.0;
    }
    p * (p / ((p + q) / 2.0)).log2()
}

/// Jensen–Shannon distance: the square root of the base-2 Jensen–Shannon
/// divergence, so the result lies in `[0, 1]`.
pub fn jsd(a: &Distribution, b: &Distribution) -> Result<f64> {
    if !a.mass.keys().eq(b.mass.keys()) {
        return Err(NtsError::Contract("distributions over different supports".into()));
    }
    // Disjoint supports: every term is p·log2(2) = p, summing to exactly 1.
    // Summing the rounded masses would land a few ulps short.
    if a.mass.values().zip(b.mass.values()).all(|(&p, &q)| p == 0.0 || q == 0.0) {
        return Ok(1.0);
    }
    let divergence: f64 = a
        .mass
        .values()
        .zip(b.mass.values())
        .map(|(&p, &q)| 0.5 * (kl_to_mixture(p, q) + kl_to_mixture(q, p)))
        .sum();
    Ok(divergence.clamp(0.0, 1.0).sqrt())
}

/// Syntactic similarity of two normalized domains: Jaccard when the union of
/// their value sets exceeds `s`, otherwise one minus the Jensen–Shannon
/// distance of their empirical distributions.
pub fn syn_sim_domains(a: &NormalizedDomain, b: &NormalizedDomain, s: usize) -> f64 {
    // An all-null column carries no values to compare; treated as identical.
    if a.is_empty() || b.is_empty() {
        return 1.0;
    }
    let support: BTreeSet<String> = a.values().chain(b.values()).map(str::to_string).collect();
    if support.len() > s {
        return jaccard(a, b);
    }
    let (Ok(da), Ok(db)) = (
        Distribution::over_support(a, &support),
        Distribution::over_support(b, &support),
    ) else {
        unreachable!("both domains are non-empty and inside the union support");
    };
    1.0 - jsd(&da, &db).expect("shared support")
}

pub fn syn_sim(query: &Table, q_attr: &str, candidate: &Table, c_attr: &str, s: usize) -> Result<f64> {
    let a = extract_domain(query, q_attr)?;
    let b = extract_domain(candidate, c_attr)?;
    Ok(syn_sim_domains(&a, &b, s))
}

/// Cosine similarity of two attribute embeddings. Not clamped; may be negative.
pub fn sem_sim(q_table: &str, q_attr: &str, c_table: &str, c_attr: &str, store: &EmbeddingStore) -> Result<f64> {
    Ok(cosine(store.attribute(q_table, q_attr)?, store.attribute(c_table, c_attr)?))
}

/// Cosine similarity of two table embeddings, clamped to `[0, 1]`.
pub fn table_sim(q_table: &str, c_table: &str, store: &EmbeddingStore) -> Result<f64> {
    Ok(cosine(store.table(q_table)?, store.table(c_table)?).clamp(0.0, 1.0))
}
