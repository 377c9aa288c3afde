//! Rerankers over a fixed pool of unionable candidates.
//!
//! * [`ants_rank`]: attribute novelty, syntactic dissimilarity weighted by
//!   semantic similarity, summed over aligned attributes.
//! * [`gmc_select`] / [`gmm_select`]: greedy max-sum and max-min
//!   diversification.
//! * [`semnov_rank`]: semantic similarity penalized by table-embedding
//!   similarity.
//! * [`er_rank`]: tuple overlap estimated by token blocking and Levenshtein
//!   matching.
//! * [`sem_baseline_rank`]: plain unionability (sum of attribute cosines).
//! * [`Method::Exact`]: the exhaustive solver from [`crate::novelty`].

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{NtsError, Result};
use crate::normalize::{extract_domain, tokens, NormalizedDomain};
use crate::novelty::exact_nts;
use crate::sim::{sem_sim, syn_sim_domains, table_sim, EmbeddingStore, DEFAULT_DOMAIN_THRESHOLD};
use crate::table::{AlignmentMap, Table, Value};

pub const DEFAULT_B: f64 = 1.0;
pub const DEFAULT_LAMBDA: f64 = 0.7;
pub const DEFAULT_LEV_THRESHOLD: f64 = 0.85;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyper {
    /// Domain-size threshold switching Jaccard to Jensen–Shannon.
    pub s: usize,
    /// Penalization exponent on syntactic dissimilarity.
    pub b: f64,
    /// Max-sum trade-off between similarity and diversity.
    pub lambda: f64,
    pub lev_threshold: f64,
    pub seed: u64,
}

impl Default for Hyper {
    fn default() -> Self {
        Hyper {
            s: DEFAULT_DOMAIN_THRESHOLD,
            b: DEFAULT_B,
            lambda: DEFAULT_LAMBDA,
            lev_threshold: DEFAULT_LEV_THRESHOLD,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Ants,
    Gmc,
    Gmm,
    #[serde(rename = "semnov")]
    SemNov,
    Er,
    SemBaseline,
    Exact,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Ants,
        Method::Gmc,
        Method::Gmm,
        Method::SemNov,
        Method::Er,
        Method::SemBaseline,
        Method::Exact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Ants => "ants",
            Method::Gmc => "gmc",
            Method::Gmm => "gmm",
            Method::SemNov => "semnov",
            Method::Er => "er",
            Method::SemBaseline => "sem-baseline",
            Method::Exact => "exact",
        }
    }

    /// Whether the output is an ordered list rather than a set.
    pub fn is_ranked(self) -> bool {
        !matches!(self, Method::Gmc | Method::Gmm | Method::Exact)
    }

    pub fn needs_embeddings(self) -> bool {
        matches!(self, Method::Ants | Method::Gmc | Method::SemNov | Method::SemBaseline)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = NtsError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| NtsError::Parameter(format!("unknown method '{s}'")))
    }
}

pub struct RankRequest<'a> {
    pub query: &'a Table,
    /// The unionable pool `S`, `|S| = k`.
    pub candidates: &'a [Table],
    pub alignments: &'a AlignmentMap,
    pub embeddings: Option<&'a EmbeddingStore>,
    pub l: usize,
    pub hyper: Hyper,
}

impl<'a> RankRequest<'a> {
    pub fn new(query: &'a Table, candidates: &'a [Table], alignments: &'a AlignmentMap, l: usize) -> Self {
        RankRequest {
            query,
            candidates,
            alignments,
            embeddings: None,
            l,
            hyper: Hyper::default(),
        }
    }

    pub fn with_embeddings(mut self, store: &'a EmbeddingStore) -> Self {
        self.embeddings = Some(store);
        self
    }

    pub fn with_hyper(mut self, hyper: Hyper) -> Self {
        self.hyper = hyper;
        self
    }

    pub fn k(&self) -> usize {
        self.candidates.len()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.k();
        if self.l == 0 || self.l > k {
            return Err(NtsError::Parameter(format!(
                "result size l = {} must satisfy 1 <= l <= k = {k}",
                self.l
            )));
        }
        let h = &self.hyper;
        if !(h.b >= 0.0 && h.b.is_finite()) {
            return Err(NtsError::Parameter(format!("b must be >= 0, got {}", h.b)));
        }
        if !(0.0..=1.0).contains(&h.lambda) {
            return Err(NtsError::Parameter(format!("lambda must lie in [0, 1], got {}", h.lambda)));
        }
        if !(0.0..=1.0).contains(&h.lev_threshold) {
            return Err(NtsError::Parameter(format!(
                "Levenshtein threshold must lie in [0, 1], got {}",
                h.lev_threshold
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for t in self.candidates {
            if !seen.insert(t.id()) {
                return Err(NtsError::Validation(format!("candidate id '{}' appears twice", t.id())));
            }
            self.alignment(t)?.resolve(self.query, t)?;
        }
        Ok(())
    }

    fn alignment(&self, t: &Table) -> Result<&'a crate::table::Alignment> {
        self.alignments.get(t.id()).ok_or_else(|| {
            NtsError::Validation(format!("candidate '{}' has no alignment to the query", t.id()))
        })
    }

    fn store(&self, method: Method) -> Result<&'a EmbeddingStore> {
        self.embeddings
            .ok_or_else(|| NtsError::Config(format!("method '{method}' requires embeddings")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredTable {
    pub table_id: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedResult {
    pub method: Method,
    pub ordering: Vec<ScoredTable>,
    /// False for set-valued selectors.
    pub ranked: bool,
}

impl RankedResult {
    pub fn ids(&self) -> Vec<&str> {
        self.ordering.iter().map(|s| s.table_id.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.ordering.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordering.is_empty()
    }
}

/// Sorts by descending score, ascending id on ties, and keeps the first `l`.
fn top_l(mut scored: Vec<ScoredTable>, l: usize) -> Vec<ScoredTable> {
    scored.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.table_id.cmp(&b.table_id)));
    scored.truncate(l);
    scored
}

fn score_all<F>(req: &RankRequest<'_>, f: F) -> Result<Vec<ScoredTable>>
where
    F: Fn(&Table) -> Result<f64> + Sync,
{
    req.candidates
        .par_iter()
        .map(|t| {
            Ok(ScoredTable {
                table_id: t.id().to_string(),
                score: f(t)?,
            })
        })
        .collect()
}

fn query_domains(req: &RankRequest<'_>) -> Result<HashMap<String, NormalizedDomain>> {
    req.query
        .schema()
        .iter()
        .map(|a| Ok((a.clone(), extract_domain(req.query, a)?)))
        .collect()
}

fn att_novelty_from(syn: f64, sem: f64, b: f64) -> f64 {
    (1.0 - syn).max(0.0).powf(b) * sem
}

/// `(1 − syn_sim)^b × sem_sim` for one aligned pair.
pub fn att_novelty(req: &RankRequest<'_>, candidate: &Table, q_attr: &str, c_attr: &str) -> Result<f64> {
    let store = req.store(Method::Ants)?;
    let syn = syn_sim_domains(
        &extract_domain(req.query, q_attr)?,
        &extract_domain(candidate, c_attr)?,
        req.hyper.s,
    );
    let sem = sem_sim(req.query.id(), q_attr, candidate.id(), c_attr, store)?;
    Ok(att_novelty_from(syn, sem, req.hyper.b))
}

fn table_novelty_cached(
    req: &RankRequest<'_>,
    store: &EmbeddingStore,
    qdom: &HashMap<String, NormalizedDomain>,
    t: &Table,
) -> Result<f64> {
    let a = req.alignment(t)?;
    let mut total = 0.0;
    for (q_attr, c_attr) in &a.pairs {
        let qd = qdom
            .get(q_attr)
            .ok_or_else(|| NtsError::Schema(format!("query has no attribute '{q_attr}'")))?;
        let syn = syn_sim_domains(qd, &extract_domain(t, c_attr)?, req.hyper.s);
        let sem = sem_sim(req.query.id(), q_attr, t.id(), c_attr, store)?;
        total += att_novelty_from(syn, sem, req.hyper.b);
    }
    Ok(total)
}

/// Sum of attribute novelty over the candidate's aligned pairs.
pub fn table_novelty(req: &RankRequest<'_>, candidate: &Table) -> Result<f64> {
    let store = req.store(Method::Ants)?;
    table_novelty_cached(req, store, &query_domains(req)?, candidate)
}

pub fn ants_rank(req: &RankRequest<'_>) -> Result<RankedResult> {
    req.validate()?;
    let store = req.store(Method::Ants)?;
    let qdom = query_domains(req)?;
    let scored = score_all(req, |t| table_novelty_cached(req, store, &qdom, t))?;
    Ok(RankedResult {
        method: Method::Ants,
        ordering: top_l(scored, req.l),
        ranked: true,
    })
}

pub fn semnov_rank(req: &RankRequest<'_>) -> Result<RankedResult> {
    req.validate()?;
    let store = req.store(Method::SemNov)?;
    let b = req.hyper.b;
    let scored = score_all(req, |t| {
        let penalty = (1.0 - table_sim(req.query.id(), t.id(), store)?).powf(b);
        let mut total = 0.0;
        for (q_attr, c_attr) in &req.alignment(t)?.pairs {
            total += penalty * sem_sim(req.query.id(), q_attr, t.id(), c_attr, store)?;
        }
        Ok(total)
    })?;
    Ok(RankedResult {
        method: Method::SemNov,
        ordering: top_l(scored, req.l),
        ranked: true,
    })
}

/// Unionability only: the sum of attribute cosines over aligned pairs.
pub fn sem_baseline_rank(req: &RankRequest<'_>) -> Result<RankedResult> {
    req.validate()?;
    let store = req.store(Method::SemBaseline)?;
    let scored = score_all(req, |t| {
        let mut total = 0.0;
        for (q_attr, c_attr) in &req.alignment(t)?.pairs {
            total += sem_sim(req.query.id(), q_attr, t.id(), c_attr, store)?;
        }
        Ok(total)
    })?;
    Ok(RankedResult {
        method: Method::SemBaseline,
        ordering: top_l(scored, req.l),
        ranked: true,
    })
}

/// Normalized Levenshtein similarity of two raw cells; two nulls are equal and
/// a null never matches text.
pub fn cell_similarity(a: &Value, b: &Value) -> f64 {
    match (a, b) {
        (Value::Null, Value::Null) => 1.0,
        (Value::Text(x), Value::Text(y)) => strsim::normalized_levenshtein(x, y),
        _ => 0.0,
    }
}

/// Fraction of candidate tuples that match no query tuple. Tuples are only
/// compared when they share a normalized token on an aligned attribute, and
/// match when every aligned pair clears the threshold.
pub fn er_overlap_score(query: &Table, candidate: &Table, pairs: &[(usize, usize)], threshold: f64) -> f64 {
    let mut index: HashMap<String, Vec<usize>> = HashMap::new();
    for (qi, row) in query.rows().iter().enumerate() {
        for &(qa, _) in pairs {
            if let Some(text) = row.values[qa].as_text() {
                for tok in tokens(text) {
                    let bucket = index.entry(tok).or_default();
                    if bucket.last() != Some(&qi) {
                        bucket.push(qi);
                    }
                }
            }
        }
    }
    let matched = candidate
        .rows()
        .iter()
        .filter(|row| {
            let mut block: Vec<usize> = pairs
                .iter()
                .filter_map(|&(_, ca)| row.values[ca].as_text())
                .flat_map(tokens)
                .filter_map(|tok| index.get(&tok))
                .flatten()
                .copied()
                .collect();
            block.sort_unstable();
            block.dedup();
            block.into_iter().any(|qi| {
                let q = &query.rows()[qi];
                pairs
                    .iter()
                    .all(|&(qa, ca)| cell_similarity(&q.values[qa], &row.values[ca]) >= threshold)
            })
        })
        .count();
    1.0 - matched as f64 / candidate.len() as f64
}

pub fn er_rank(req: &RankRequest<'_>) -> Result<RankedResult> {
    req.validate()?;
    let scored = score_all(req, |t| {
        let pairs = req.alignment(t)?.resolve(req.query, t)?;
        Ok(er_overlap_score(req.query, t, &pairs, req.hyper.lev_threshold))
    })?;
    Ok(RankedResult {
        method: Method::Er,
        ordering: top_l(scored, req.l),
        ranked: true,
    })
}

/// Per-table similarity to the query and pairwise syntactic diversity, as used
/// by the diversification selectors.
///
/// Two lake tables are compared through the query: attributes aligned to the
/// same query attribute are paired, and the diversity is the mean of
/// `1 − syn_sim` over those pairs (1 when no pair exists).
pub struct DiversitySpace {
    ids: Vec<String>,
    /// Candidate domains keyed by the query attribute they align with.
    anchored: Vec<BTreeMap<String, NormalizedDomain>>,
    query_div: Vec<f64>,
    sim: Option<Vec<f64>>,
    s: usize,
}

impl DiversitySpace {
    pub fn build(req: &RankRequest<'_>, with_similarity: bool) -> Result<Self> {
        req.validate()?;
        let qdom = query_domains(req)?;
        let store = if with_similarity { Some(req.store(Method::Gmc)?) } else { None };
        let per_candidate: Vec<(BTreeMap<String, NormalizedDomain>, f64, Option<f64>)> = req
            .candidates
            .par_iter()
            .map(|t| {
                let a = req.alignment(t)?;
                let mut anchored = BTreeMap::new();
                let mut div = 0.0;
                let mut sim = 0.0;
                for (q_attr, c_attr) in &a.pairs {
                    let d = extract_domain(t, c_attr)?;
                    div += 1.0 - syn_sim_domains(&qdom[q_attr], &d, req.hyper.s);
                    if let Some(store) = store {
                        sim += sem_sim(req.query.id(), q_attr, t.id(), c_attr, store)?;
                    }
                    anchored.insert(q_attr.clone(), d);
                }
                let n = a.pairs.len() as f64;
                Ok((anchored, div / n, store.map(|_| sim / n)))
            })
            .collect::<Result<_>>()?;
        let mut anchored = Vec::with_capacity(per_candidate.len());
        let mut query_div = Vec::with_capacity(per_candidate.len());
        let mut sims = Vec::with_capacity(per_candidate.len());
        for (a, d, s) in per_candidate {
            anchored.push(a);
            query_div.push(d);
            if let Some(s) = s {
                sims.push(s);
            }
        }
        Ok(DiversitySpace {
            ids: req.candidates.iter().map(|t| t.id().to_string()).collect(),
            anchored,
            query_div,
            sim: with_similarity.then_some(sims),
            s: req.hyper.s,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    /// Mean attribute cosine between the query and candidate `i`.
    pub fn tablesim(&self, i: usize) -> f64 {
        self.sim.as_ref().map(|s| s[i]).unwrap_or(0.0)
    }

    /// Mean `1 − syn_sim` between the query and candidate `i`.
    pub fn query_div(&self, i: usize) -> f64 {
        self.query_div[i]
    }

    pub fn tablediv(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (&self.anchored[i], &self.anchored[j]);
        let mut total = 0.0;
        let mut n = 0usize;
        for (anchor, da) in a {
            if let Some(db) = b.get(anchor) {
                total += 1.0 - syn_sim_domains(da, db, self.s);
                n += 1;
            }
        }
        if n == 0 {
            1.0
        } else {
            total / n as f64
        }
    }

    /// Full pairwise diversity matrix.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        (0..self.len())
            .into_par_iter()
            .map(|i| (0..self.len()).map(|j| if i == j { 0.0 } else { self.tablediv(i, j) }).collect())
            .collect()
    }

    /// `(m−1)(1−λ)·Σ tablesim + 2λ·Σ_{pairs} tablediv` for a set of size `m`.
    pub fn f_value(&self, members: &[usize], lambda: f64) -> f64 {
        let m = members.len() as f64;
        let sim: f64 = members.iter().map(|&i| self.tablesim(i)).sum();
        let mut div = 0.0;
        for (x, &i) in members.iter().enumerate() {
            for &j in &members[x + 1..] {
                div += self.tablediv(i, j);
            }
        }
        (m - 1.0) * (1.0 - lambda) * sim + 2.0 * lambda * div
    }
}

/// Candidate indices ordered by ascending id, for deterministic tie-breaks.
fn id_order(space: &DiversitySpace) -> Vec<usize> {
    let mut order: Vec<usize> = (0..space.len()).collect();
    order.sort_by(|&a, &b| space.id(a).cmp(space.id(b)));
    order
}

/// Greedy max-sum selection: each step adds the candidate with the largest
/// increase of the max-sum objective for the target size `l`.
pub fn gmc_select(req: &RankRequest<'_>) -> Result<RankedResult> {
    let space = DiversitySpace::build(req, true)?;
    let div = space.matrix();
    let l = req.l as f64;
    let lambda = req.hyper.lambda;
    let order = id_order(&space);
    let mut chosen: Vec<usize> = Vec::with_capacity(req.l);
    let mut ordering = Vec::with_capacity(req.l);
    let mut in_set = vec![false; space.len()];
    while chosen.len() < req.l {
        let mut best: Option<(usize, f64)> = None;
        for &c in order.iter().filter(|&&c| !in_set[c]) {
            let gain = (l - 1.0) * (1.0 - lambda) * space.tablesim(c)
                + 2.0 * lambda * chosen.iter().map(|&s| div[c][s]).sum::<f64>();
            if best.is_none_or(|(_, g)| gain > g) {
                best = Some((c, gain));
            }
        }
        let (c, gain) = best.expect("l <= k leaves a candidate");
        in_set[c] = true;
        chosen.push(c);
        ordering.push(ScoredTable {
            table_id: space.id(c).to_string(),
            score: gain,
        });
    }
    Ok(RankedResult {
        method: Method::Gmc,
        ordering,
        ranked: false,
    })
}

/// Greedy max-min selection from `seed_table` (default: the candidate most
/// diverse from the query). Each step adds the candidate whose minimum
/// diversity to the selected set is largest.
pub fn gmm_select(req: &RankRequest<'_>, seed_table: Option<&str>) -> Result<RankedResult> {
    let space = DiversitySpace::build(req, false)?;
    let order = id_order(&space);
    let seed = match seed_table {
        Some(id) => space
            .index_of(id)
            .ok_or_else(|| NtsError::Parameter(format!("seed table '{id}' is not a candidate")))?,
        None => {
            let mut best = order[0];
            for &c in &order[1..] {
                if space.query_div(c) > space.query_div(best) {
                    best = c;
                }
            }
            best
        }
    };
    let mut in_set = vec![false; space.len()];
    in_set[seed] = true;
    let mut ordering = vec![ScoredTable {
        table_id: space.id(seed).to_string(),
        score: space.query_div(seed),
    }];
    // Minimum diversity of every candidate to the current selection.
    let mut nearest: Vec<f64> = (0..space.len()).map(|c| space.tablediv(c, seed)).collect();
    while ordering.len() < req.l {
        let mut best: Option<usize> = None;
        for &c in order.iter().filter(|&&c| !in_set[c]) {
            if best.is_none_or(|b| nearest[c] > nearest[b]) {
                best = Some(c);
            }
        }
        let c = best.expect("l <= k leaves a candidate");
        in_set[c] = true;
        ordering.push(ScoredTable {
            table_id: space.id(c).to_string(),
            score: nearest[c],
        });
        for (o, slot) in nearest.iter_mut().enumerate() {
            if !in_set[o] {
                *slot = slot.min(space.tablediv(o, c));
            }
        }
    }
    Ok(RankedResult {
        method: Method::Gmm,
        ordering,
        ranked: false,
    })
}

/// Exhaustive search-novelty maximization, reported as a set sorted by id with
/// the subset's novelty score on every row.
pub fn exact_select(req: &RankRequest<'_>) -> Result<RankedResult> {
    req.validate()?;
    let best = exact_nts(req.query, req.candidates, req.alignments, req.l)?;
    Ok(RankedResult {
        method: Method::Exact,
        ordering: best
            .table_ids
            .into_iter()
            .map(|table_id| ScoredTable {
                table_id,
                score: best.nscore,
            })
            .collect(),
        ranked: false,
    })
}

/// Runs one method on a request.
pub fn run(method: Method, req: &RankRequest<'_>) -> Result<RankedResult> {
    match method {
        Method::Ants => ants_rank(req),
        Method::Gmc => gmc_select(req),
        Method::Gmm => gmm_select(req, None),
        Method::SemNov => semnov_rank(req),
        Method::Er => er_rank(req),
        Method::SemBaseline => sem_baseline_rank(req),
        Method::Exact => exact_select(req),
    }
}
