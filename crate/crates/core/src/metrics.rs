//! Evaluation against a benchmark pool: blatant duplicates, syntactic novelty
//! (SNM and its rank-oblivious variant SSNM), and the max-sum objective.
//!
//! SNM and SSNM only look at ids and positions. Every original `T` in the pool
//! forms a family with its diluted version `τ(T)`; the query and its injected
//! copy form one more family whose diluted member is the diluted copy.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{NtsError, Result};
use crate::rankers::{DiversitySpace, RankRequest, RankedResult};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalPool {
    pub originals: BTreeSet<String>,
    /// Original id to the id of its diluted version.
    pub diluted_of: BTreeMap<String, String>,
    pub query_id: String,
    pub query_copy_id: Option<String>,
    pub diluted_query_id: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Original,
    Diluted,
}

impl EvalPool {
    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for (orig, dil) in &self.diluted_of {
            if !self.originals.contains(orig) {
                return Err(NtsError::Validation(format!("diluted table '{dil}' has unknown original '{orig}'")));
            }
            if !seen.insert(dil) || self.originals.contains(dil) {
                return Err(NtsError::Validation(format!("diluted id '{dil}' is not unique in the pool")));
            }
        }
        Ok(())
    }

    /// Every table id in the pool, including the query copy and its diluted
    /// version.
    pub fn ids(&self) -> BTreeSet<&str> {
        self.originals
            .iter()
            .chain(self.diluted_of.values())
            .chain(self.query_copy_id.iter())
            .chain(self.diluted_query_id.iter())
            .map(String::as_str)
            .collect()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.ids().contains(id)
    }

    fn is_query(&self, id: &str) -> bool {
        id == self.query_id || self.query_copy_id.as_deref() == Some(id)
    }

    /// Family key and role of an id. The query family is keyed by the query id.
    fn family(&self, id: &str, reverse: &HashMap<&str, &str>) -> Option<(String, bool, Role)> {
        if self.is_query(id) {
            return Some((self.query_id.clone(), true, Role::Original));
        }
        if self.diluted_query_id.as_deref() == Some(id) {
            return Some((self.query_id.clone(), true, Role::Diluted));
        }
        if self.originals.contains(id) {
            return Some((id.to_string(), false, Role::Original));
        }
        reverse.get(id).map(|o| (o.to_string(), false, Role::Diluted))
    }
}

/// 1 when the query or its injected copy is among the returned ids.
pub fn blatant_duplicate(result: &RankedResult, pool: &EvalPool) -> u8 {
    u8::from(result.ids().into_iter().any(|id| pool.is_query(id)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Penalties {
    o: usize,
    y: usize,
    l: usize,
}

fn penalties(ids: &[&str], pool: &EvalPool) -> Result<Penalties> {
    if ids.is_empty() {
        return Err(NtsError::Validation("empty result".into()));
    }
    let reverse: HashMap<&str, &str> = pool
        .diluted_of
        .iter()
        .map(|(o, d)| (d.as_str(), o.as_str()))
        .collect();
    // Per family: (is query family, 1-based position of original, of diluted).
    let mut families: BTreeMap<String, (bool, Option<usize>, Option<usize>)> = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for (i, id) in ids.iter().enumerate() {
        if !seen.insert(*id) {
            return Err(NtsError::Validation(format!("table '{id}' appears twice in the result")));
        }
        let (key, is_q, role) = pool
            .family(id, &reverse)
            .ok_or_else(|| NtsError::Validation(format!("table '{id}' is not in the benchmark pool")))?;
        let entry = families.entry(key).or_insert((is_q, None, None));
        let slot = match role {
            Role::Original => &mut entry.1,
            Role::Diluted => &mut entry.2,
        };
        slot.get_or_insert(i + 1);
    }
    let (mut o, mut y) = (0, 0);
    for (is_q, orig, dil) in families.into_values() {
        match (orig, dil) {
            (None, Some(_)) => o += 1,
            (Some(_), None) if is_q => o += 1,
            (Some(p), Some(d)) if p > d || (is_q && p < d) => y += 1,
            _ => {}
        }
    }
    Ok(Penalties { o, y, l: ids.len() })
}

/// `1 − (|O| + |Y|)/l` over an ordered list of ids.
pub fn snm_of(ids: &[&str], pool: &EvalPool) -> Result<f64> {
    let p = penalties(ids, pool)?;
    Ok(1.0 - (p.o + p.y) as f64 / p.l as f64)
}

/// `1 − |O|/l` over a set of ids.
pub fn ssnm_of(ids: &[&str], pool: &EvalPool) -> Result<f64> {
    let p = penalties(ids, pool)?;
    Ok(1.0 - p.o as f64 / p.l as f64)
}

pub fn snm(result: &RankedResult, pool: &EvalPool) -> Result<f64> {
    if !result.ranked {
        return Err(NtsError::Contract(format!(
            "SNM needs an ordered result but '{}' returns a set; use SSNM",
            result.method
        )));
    }
    snm_of(&result.ids(), pool)
}

pub fn ssnm(result: &RankedResult, pool: &EvalPool) -> Result<f64> {
    ssnm_of(&result.ids(), pool)
}

/// Max-sum objective of a result set under the request's λ.
pub fn f_value(req: &RankRequest<'_>, ids: &[&str]) -> Result<f64> {
    let space = DiversitySpace::build(req, true)?;
    let members = ids
        .iter()
        .map(|id| {
            space
                .index_of(id)
                .ok_or_else(|| NtsError::Validation(format!("table '{id}' is not a candidate")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(space.f_value(&members, req.hyper.lambda))
}
