//! The exact syntactic novelty objective over tuples, tables, and search
//! results, plus the exhaustive subset solver.
//!
//! Every scoring function is generic over [`Scalar`], so the same code runs in
//! `f64` for production use and in exact rationals ([`BigRational`]) when a
//! result has to be compared for equality.

use std::collections::HashMap;
use std::fmt::Debug;
use std::ops::{Add, Div};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{NtsError, Result};
use crate::table::{AlignmentMap, Table, Tuple, TupleId, Value};

/// Number type the novelty objective is evaluated in.
pub trait Scalar:
    Clone + Debug + PartialOrd + Zero + One + Add<Output = Self> + Div<Output = Self> + Send + Sync
{
    fn ratio(num: u64, den: u64) -> Self;
    fn count(n: usize) -> Self;
}

impl Scalar for f64 {
    fn ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }

    fn count(n: usize) -> Self {
        n as f64
    }
}

impl Scalar for BigRational {
    fn ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn count(n: usize) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
}

/// Per-attribute credit for a null-versus-value comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaProfile<S = f64> {
    betas: Vec<S>,
}

impl<S: Scalar> BetaProfile<S> {
    pub fn from_values(betas: Vec<S>) -> Self {
        BetaProfile { betas }
    }

    pub fn get(&self, i: usize) -> &S {
        &self.betas[i]
    }

    pub fn len(&self) -> usize {
        self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.betas.is_empty()
    }

    pub fn as_slice(&self) -> &[S] {
        &self.betas
    }
}

/// `β_i = 1 − P_i`, where `P_i` is the fraction of unordered pairs of non-null
/// values on attribute `i` that are equal (raw equality). Attributes with fewer
/// than two non-null values get `P_i = 1`.
pub fn compute_betas_in<S: Scalar>(t: &Table) -> BetaProfile<S> {
    let betas = (0..t.arity())
        .map(|i| {
            let mut freq: HashMap<&str, u64> = HashMap::new();
            for v in t.rows().iter().filter_map(|r| r.values[i].as_text()) {
                *freq.entry(v).or_insert(0) += 1;
            }
            let m: u64 = freq.values().sum();
            if m < 2 {
                return S::zero();
            }
            let total = m * (m - 1) / 2;
            let matching: u64 = freq.values().map(|&c| c * (c.saturating_sub(1)) / 2).sum();
            S::ratio(total - matching, total)
        })
        .collect();
    BetaProfile { betas }
}

pub fn compute_betas(t: &Table) -> BetaProfile {
    compute_betas_in(t)
}

/// Mean per-attribute novelty of two tuples: 1 for two distinct constants,
/// `β_i` when exactly one side is null, 0 when equal (nulls included).
pub fn tuple_pair_nscore_in<S: Scalar>(t: &Tuple, u: &Tuple, betas: &BetaProfile<S>) -> Result<S> {
    let n = t.arity();
    if n == 0 || n != u.arity() || n != betas.len() {
        return Err(NtsError::Contract(format!(
            "tuple arities {} and {} against {} betas",
            t.arity(),
            u.arity(),
            betas.len()
        )));
    }
    Ok(pair_score(&t.values, &u.values, betas))
}

pub fn tuple_pair_nscore(t: &Tuple, u: &Tuple, betas: &BetaProfile) -> Result<f64> {
    tuple_pair_nscore_in(t, u, betas)
}

// Distinct constants are counted as an integer first so that the f64 path
// adds betas to an exact count.
fn pair_score<S: Scalar>(a: &[Value], b: &[Value], betas: &BetaProfile<S>) -> S {
    let mut distinct = 0usize;
    let mut partial = S::zero();
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        match (x, y) {
            (Value::Text(x), Value::Text(y)) if x != y => distinct += 1,
            (Value::Null, Value::Text(_)) | (Value::Text(_), Value::Null) => {
                partial = partial + betas.betas[i].clone();
            }
            _ => {}
        }
    }
    (S::count(distinct) + partial) / S::count(a.len())
}

/// Minimum pair score of `t` against every other tuple of `within`. A lone
/// tuple is maximally novel.
pub fn tuple_novelty_in<S: Scalar>(t: &Tuple, within: &Table, betas: &BetaProfile<S>) -> Result<S> {
    if t.arity() != within.arity() || betas.len() != within.arity() {
        return Err(NtsError::Contract(format!(
            "tuple of arity {} scored within table '{}' of arity {}",
            t.arity(),
            within.id(),
            within.arity()
        )));
    }
    Ok(min_against(t.id, &t.values, within, betas))
}

pub fn tuple_novelty(t: &Tuple, within: &Table, betas: &BetaProfile) -> Result<f64> {
    tuple_novelty_in(t, within, betas)
}

fn min_against<S: Scalar>(id: TupleId, values: &[Value], within: &Table, betas: &BetaProfile<S>) -> S {
    let mut best: Option<S> = None;
    for other in within.rows().iter().filter(|o| o.id != id) {
        let s = pair_score(values, &other.values, betas);
        if s.is_zero() {
            return s;
        }
        if best.as_ref().is_none_or(|b| s < *b) {
            best = Some(s);
        }
    }
    best.unwrap_or_else(S::one)
}

/// A table together with the novelty of each of its tuples.
#[derive(Debug, Clone)]
pub struct ScoredResultTable<S = f64> {
    pub table: Table,
    /// `N(t)` in row order, paired with the tuple id.
    pub per_tuple_novelty: Vec<(TupleId, S)>,
    pub nscore: S,
}

/// Scores every tuple of `t` with betas estimated from `t` itself.
pub fn score_table_in<S: Scalar>(t: Table) -> ScoredResultTable<S> {
    let betas = compute_betas_in::<S>(&t);
    // Collected in row order and summed sequentially so the f64 result does
    // not depend on the worker schedule.
    let per_tuple: Vec<(TupleId, S)> = t
        .rows()
        .par_iter()
        .map(|r| (r.id, min_against(r.id, &r.values, &t, &betas)))
        .collect();
    let sum = per_tuple
        .iter()
        .fold(S::zero(), |acc, (_, s)| acc + s.clone());
    let nscore = if per_tuple.is_empty() {
        S::zero()
    } else {
        sum / S::count(per_tuple.len())
    };
    ScoredResultTable {
        table: t,
        per_tuple_novelty: per_tuple,
        nscore,
    }
}

pub fn table_nscore_in<S: Scalar>(t: &Table) -> S {
    score_table_in(t.clone()).nscore
}

pub fn table_nscore(t: &Table) -> f64 {
    table_nscore_in(t)
}

/// The query followed by every result table projected onto the query schema,
/// with nulls where an alignment leaves a query attribute uncovered.
pub fn build_result_table<T: AsRef<Table>>(q: &Table, r: &[T], alignments: &AlignmentMap) -> Result<Table> {
    let mut out = q.clone();
    for t in r {
        let t = t.as_ref();
        let a = alignments.get(t.id()).ok_or_else(|| {
            NtsError::Contract(format!("no alignment from '{}' to '{}'", q.id(), t.id()))
        })?;
        out = crate::table::left_outer_union(&out, t, a)?;
    }
    Ok(out)
}

pub fn search_nscore_in<S: Scalar, T: AsRef<Table>>(q: &Table, r: &[T], alignments: &AlignmentMap) -> Result<S> {
    Ok(score_table_in(build_result_table(q, r, alignments)?).nscore)
}

pub fn search_nscore<T: AsRef<Table>>(q: &Table, r: &[T], alignments: &AlignmentMap) -> Result<f64> {
    search_nscore_in(q, r, alignments)
}

impl AsRef<Table> for Table {
    fn as_ref(&self) -> &Table {
        self
    }
}

/// Best subset found by [`exact_nts_in`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution<S = f64> {
    /// Selected table ids, ascending.
    pub table_ids: Vec<String>,
    pub nscore: S,
}

/// Exhaustively evaluates every size-`l` subset of `s` and returns the one with
/// the highest search novelty. Ties go to the lexicographically smallest
/// sorted id sequence.
pub fn exact_nts_in<S: Scalar>(
    q: &Table,
    s: &[Table],
    alignments: &AlignmentMap,
    l: usize,
) -> Result<ExactSolution<S>> {
    if l == 0 || l > s.len() {
        return Err(NtsError::Parameter(format!(
            "result size l = {l} must satisfy 1 <= l <= k = {}",
            s.len()
        )));
    }
    let mut sorted: Vec<&Table> = s.iter().collect();
    sorted.sort_by(|a, b| a.id().cmp(b.id()));
    if sorted.windows(2).any(|w| w[0].id() == w[1].id()) {
        return Err(NtsError::Validation("candidate table ids must be unique".into()));
    }
    for t in &sorted {
        if !alignments.contains_key(t.id()) {
            return Err(NtsError::Contract(format!("no alignment for candidate '{}'", t.id())));
        }
    }

    let subsets = combinations(sorted.len(), l);
    let scores: Vec<S> = subsets
        .par_iter()
        .map(|idx| {
            let members: Vec<&Table> = idx.iter().map(|&i| sorted[i]).collect();
            search_nscore_in::<S, _>(q, &members, alignments)
        })
        .collect::<Result<_>>()?;

    // Subsets are generated in lexicographic order, so keeping the first
    // maximum implements the tie-break.
    let mut best = 0;
    for (i, sc) in scores.iter().enumerate().skip(1) {
        if *sc > scores[best] {
            best = i;
        }
    }
    Ok(ExactSolution {
        table_ids: subsets[best].iter().map(|&i| sorted[i].id().to_string()).collect(),
        nscore: scores[best].clone(),
    })
}

pub fn exact_nts(q: &Table, s: &[Table], alignments: &AlignmentMap, l: usize) -> Result<ExactSolution> {
    exact_nts_in(q, s, alignments, l)
}

/// All `l`-subsets of `0..k` as ascending index vectors, in lexicographic order.
pub(crate) fn combinations(k: usize, l: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if l > k {
        return out;
    }
    let mut idx: Vec<usize> = (0..l).collect();
    loop {
        out.push(idx.clone());
        let Some(pos) = (0..l).rev().find(|&p| idx[p] < k - l + p) else {
            return out;
        };
        idx[pos] += 1;
        for p in pos + 1..l {
            idx[p] = idx[p - 1] + 1;
        }
    }
}
