//! Seeded instance generators and an independent rational re-implementation
//! of the novelty objective, shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nts_core::table::dilute;
use nts_core::{Alignment, AlignmentMap, Table, Value};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn cell(rng: &mut ChaCha8Rng, alphabet: usize, null_p: f64) -> Value {
    if rng.random_bool(null_p) {
        Value::Null
    } else {
        Value::text(format!("v{}", rng.random_range(0..alphabet)))
    }
}

/// A query of `rows × cols` with attributes `a0..`.
pub fn random_query(rng: &mut ChaCha8Rng, id: &str, max_rows: usize, max_cols: usize, null_p: f64) -> Table {
    let cols = rng.random_range(1..=max_cols);
    let rows = rng.random_range(1..=max_rows);
    let alphabet = rng.random_range(2..=6);
    let schema = (0..cols).map(|i| format!("a{i}")).collect();
    let data = (0..rows)
        .map(|_| (0..cols).map(|_| cell(rng, alphabet, null_p)).collect())
        .collect();
    Table::new(id, schema, data).unwrap()
}

/// A lake table with its own attribute names, a random non-empty partial
/// alignment to `q`, and rows that sometimes repeat query values on the
/// aligned attributes.
pub fn random_candidate(
    rng: &mut ChaCha8Rng,
    q: &Table,
    id: &str,
    max_rows: usize,
    max_cols: usize,
    null_p: f64,
) -> (Table, Alignment) {
    let cols = rng.random_range(1..=max_cols);
    let rows = rng.random_range(1..=max_rows);
    let alphabet = rng.random_range(2..=6);
    let schema: Vec<String> = (0..cols).map(|i| format!("c{i}")).collect();
    let aligned = rng.random_range(1..=cols.min(q.arity()));
    let mut q_attrs: Vec<usize> = (0..q.arity()).collect();
    q_attrs.shuffle(rng);
    let mut c_attrs: Vec<usize> = (0..cols).collect();
    c_attrs.shuffle(rng);
    let pairs: Vec<(usize, usize)> = q_attrs.into_iter().zip(c_attrs).take(aligned).collect();
    let mut data: Vec<Vec<Value>> = (0..rows)
        .map(|_| (0..cols).map(|_| cell(rng, alphabet, null_p)).collect())
        .collect();
    for row in data.iter_mut() {
        if rng.random_bool(0.3) {
            let src = &q.rows()[rng.random_range(0..q.len())];
            for &(qa, ca) in &pairs {
                row[ca] = src.values[qa].clone();
            }
        }
    }
    let t = Table::new(id, schema.clone(), data).unwrap();
    let a = Alignment::new(
        q.id(),
        id,
        pairs
            .iter()
            .map(|&(qa, ca)| (q.schema()[qa].clone(), schema[ca].clone()))
            .collect(),
    )
    .unwrap();
    (t, a)
}

pub struct Instance {
    pub query: Table,
    pub pool: Vec<Table>,
    pub alignments: AlignmentMap,
}

/// A query with `k` randomly aligned candidates `t0..`.
pub fn random_instance(rng: &mut ChaCha8Rng, k: usize, max_rows: usize, max_cols: usize, null_p: f64) -> Instance {
    let query = random_query(rng, "q", max_rows, max_cols, null_p);
    let mut pool = Vec::with_capacity(k);
    let mut alignments = AlignmentMap::new();
    for i in 0..k {
        let (t, a) = random_candidate(rng, &query, &format!("t{i}"), max_rows, max_cols, null_p);
        alignments.insert(t.id().to_string(), a);
        pool.push(t);
    }
    Instance {
        query,
        pool,
        alignments,
    }
}

/// `t` diluted with query tuples, renamed, and its alignment.
pub fn diluted_member(t: &Table, q: &Table, a: &Alignment, delta: f64, seed: u64) -> (Table, Alignment) {
    let id = format!("{}__dil", t.id());
    let d = dilute(t, q, &a.reversed(), delta, seed).unwrap().with_id(&id);
    (d, a.retarget(id))
}

pub fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Rows of the result table as optional strings: the query's rows, then each
/// result table's rows mapped onto the query schema by attribute name.
pub fn oracle_result_rows(q: &Table, r: &[&Table], al: &AlignmentMap) -> Vec<Vec<Option<String>>> {
    let text = |v: &Value| v.as_text().map(str::to_string);
    let mut rows: Vec<Vec<Option<String>>> = q.rows().iter().map(|t| t.values.iter().map(text).collect()).collect();
    for t in r {
        let a = &al[t.id()];
        let mut source: HashMap<&str, usize> = HashMap::new();
        for (qa, ca) in &a.pairs {
            let ci = t.schema().iter().position(|s| s == ca).unwrap();
            source.insert(qa.as_str(), ci);
        }
        for row in t.rows() {
            rows.push(
                q.schema()
                    .iter()
                    .map(|qa| source.get(qa.as_str()).and_then(|&ci| text(&row.values[ci])))
                    .collect(),
            );
        }
    }
    rows
}

pub fn oracle_table_score(rows: &[Vec<Option<String>>]) -> BigRational {
    let n = rows.len();
    let m = rows[0].len();
    let betas: Vec<BigRational> = (0..m)
        .map(|c| {
            let vals: Vec<&String> = rows.iter().filter_map(|r| r[c].as_ref()).collect();
            if vals.len() < 2 {
                return BigRational::zero();
            }
            let mut same = 0i64;
            for i in 0..vals.len() {
                for j in i + 1..vals.len() {
                    if vals[i] == vals[j] {
                        same += 1;
                    }
                }
            }
            let total = (vals.len() * (vals.len() - 1) / 2) as i64;
            BigRational::one() - r(same, total)
        })
        .collect();
    let pair = |x: &[Option<String>], y: &[Option<String>]| -> BigRational {
        let mut s = BigRational::zero();
        for c in 0..m {
            match (&x[c], &y[c]) {
                (Some(a), Some(b)) if a != b => s += BigRational::one(),
                (Some(_), None) | (None, Some(_)) => s += betas[c].clone(),
                _ => {}
            }
        }
        s / r(m as i64, 1)
    };
    let mut total = BigRational::zero();
    for i in 0..n {
        let mut best: Option<BigRational> = None;
        for j in 0..n {
            if i != j {
                let p = pair(&rows[i], &rows[j]);
                if best.as_ref().is_none_or(|b| &p < b) {
                    best = Some(p);
                }
            }
        }
        total += best.unwrap_or_else(BigRational::one);
    }
    total / r(n as i64, 1)
}

pub fn oracle_search_score(q: &Table, r: &[&Table], al: &AlignmentMap) -> BigRational {
    oracle_table_score(&oracle_result_rows(q, r, al))
}

/// Best score over all `l`-subsets, enumerated recursively.
pub fn oracle_best_subset(q: &Table, pool: &[Table], al: &AlignmentMap, l: usize) -> BigRational {
    fn go(
        q: &Table,
        pool: &[Table],
        al: &AlignmentMap,
        l: usize,
        start: usize,
        chosen: &mut Vec<usize>,
        best: &mut Option<BigRational>,
    ) {
        if chosen.len() == l {
            let tables: Vec<&Table> = chosen.iter().map(|&i| &pool[i]).collect();
            let s = oracle_search_score(q, &tables, al);
            if best.as_ref().is_none_or(|b| &s > b) {
                *best = Some(s);
            }
            return;
        }
        for i in start..pool.len() {
            chosen.push(i);
            go(q, pool, al, l, i + 1, chosen, best);
            chosen.pop();
        }
    }
    let mut best = None;
    go(q, pool, al, l, 0, &mut Vec::new(), &mut best);
    best.expect("l <= k")
}
