//! Acceptance checks. Runs without the libtest harness so each criterion
//! prints one PASS/FAIL line; exits non-zero if any fails.

mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;

use common::*;
use nts_core::benchgen::{build_benchmark, BenchConfig};
use nts_core::embed::embed_tables;
use nts_core::io::{
    read_alignments, read_embeddings, read_table, write_alignments, write_embeddings, write_manifest,
    write_report, write_results, write_table, MetricRow, ResultRecord,
};
use nts_core::metrics::{blatant_duplicate, f_value, snm, snm_of, ssnm, ssnm_of, EvalPool};
use nts_core::normalize::extract_domain;
use nts_core::novelty::{
    compute_betas_in, exact_nts, exact_nts_in, search_nscore, search_nscore_in, tuple_novelty_in,
    tuple_pair_nscore_in,
};
use nts_core::rankers::{self, ants_rank, gmm_select, sem_baseline_rank, table_novelty, DiversitySpace};
use nts_core::sim::{jsd, Distribution};
use nts_core::{fixtures, Alignment, AlignmentMap, EmbeddingStore, Hyper, Method, RankRequest, Table, Value};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn worked_example() -> Outcome {
    let t = fixtures::t1_diluted();
    let b = compute_betas_in::<BigRational>(&t);
    let cond = *b.get(t.attribute_index("Condition").unwrap()) == r(2, 3);
    ensure(cond, || format!("beta_Condition = {}", b.get(5)))?;
    let rows = t.rows();
    let got: Vec<BigRational> = [0, 1, 3]
        .iter()
        .map(|&j| tuple_pair_nscore_in(&rows[2], &rows[j], &b).unwrap())
        .collect();
    let want = vec![r(4, 6), r(5, 6), (r(4, 1) + r(2, 3)) / r(6, 1)];
    ensure(got == want, || format!("pair scores {got:?}"))?;
    let n = tuple_novelty_in(&rows[2], &t, &b).unwrap();
    ensure(n == r(4, 6), || format!("N(t3) = {n}"))?;
    Ok(format!("beta = 2/3, pairs = {{4/6, 5/6, 14/18}}, N(t3) = {n}"))
}

fn jsd_of(a: &Table, b: &Table, attr: &str) -> f64 {
    let da = extract_domain(a, attr).unwrap();
    let db = extract_domain(b, attr).unwrap();
    let support = da.values().chain(db.values()).map(str::to_string).collect();
    jsd(
        &Distribution::over_support(&da, &support).unwrap(),
        &Distribution::over_support(&db, &support).unwrap(),
    )
    .unwrap()
}

fn jsd_regression() -> Outcome {
    let (q, t1, t2) = (fixtures::query(), fixtures::t1(), fixtures::t2());
    let artist2 = jsd_of(&q, &t2, "Artist");
    let medium1 = jsd_of(&q, &t1, "Medium");
    let artist1 = jsd_of(&q, &t1, "Artist");
    ensure((artist2 - 0.8165).abs() <= 0.0005, || format!("Q/T2 Artist {artist2}"))?;
    ensure((medium1 - 0.4369).abs() <= 0.0005, || format!("Q/T1 Medium {medium1}"))?;
    ensure(artist1 == 1.0, || format!("Q/T1 Artist {artist1}"))?;
    Ok(format!("{artist2:.4}, {medium1:.4}, {artist1}"))
}

fn unit_store(tables: &[&Table]) -> EmbeddingStore {
    let mut store = EmbeddingStore::new();
    for t in tables {
        for a in t.schema() {
            store.insert_attribute(t.id(), a, vec![1.0]).unwrap();
        }
    }
    store
}

fn table_novelty_regression() -> Outcome {
    let q = fixtures::query();
    let pool = vec![fixtures::t1(), fixtures::t2()];
    let al: AlignmentMap = pool
        .iter()
        .map(|t| (t.id().to_string(), Alignment::by_name(&q, t).unwrap()))
        .collect();
    let store = unit_store(&[&q, &pool[0], &pool[1]]);
    let hyper = Hyper { s: 5, b: 1.0, ..Hyper::default() };
    let req = RankRequest::new(&q, &pool, &al, 2).with_embeddings(&store).with_hyper(hyper);
    let n1 = table_novelty(&req, &pool[0]).unwrap();
    let n2 = table_novelty(&req, &pool[1]).unwrap();
    ensure((n1 - 4.44).abs() <= 0.01, || format!("T1 {n1}"))?;
    ensure((n2 - 1.82).abs() <= 0.01, || format!("T2 {n2}"))?;
    let ids = ants_rank(&req).unwrap().ids().join(",");
    ensure(ids == "T1,T2", || format!("ranking {ids}"))?;
    Ok(format!("T1 {n1:.4}, T2 {n2:.4}, ranking T1 > T2"))
}

/// An instance whose result tables are all copies of the query.
fn redundant_instance(rng: &mut rand_chacha::ChaCha8Rng) -> Instance {
    let query = random_query(rng, "q", 8, 5, 0.1);
    let copies = rng.random_range(1..=3);
    let mut pool = Vec::new();
    let mut alignments = AlignmentMap::new();
    for i in 0..copies {
        let t = query.clone().with_id(format!("t{i}"));
        alignments.insert(t.id().to_string(), Alignment::identity("q", &t));
        pool.push(t);
    }
    Instance {
        query,
        pool,
        alignments,
    }
}

fn axiom_suite() -> Outcome {
    let (mut positive, mut zero) = (0, 0);
    let mut failures = Vec::new();
    for seed in 0..240u64 {
        let mut g = rng(0xA710 + seed);
        let inst = if seed % 6 == 5 {
            redundant_instance(&mut g)
        } else {
            let k = g.random_range(1..=5);
            random_instance(&mut g, k, 8, 5, 0.15)
        };
        let Instance {
            query: q,
            pool,
            mut alignments,
        } = inst;
        let base: BigRational = search_nscore_in(&q, &pool, &alignments).unwrap();

        let copy = q.clone().with_id("q__copy");
        alignments.insert(copy.id().to_string(), Alignment::identity("q", &copy));
        let mut with_q = pool.clone();
        with_q.push(copy);
        let after_q: BigRational = search_nscore_in(&q, &with_q, &alignments).unwrap();

        let victim = &pool[g.random_range(0..pool.len())];
        let delta = [0.2, 0.4, 0.6, 1.0][g.random_range(0..4)];
        let (d, da) = diluted_member(victim, &q, &alignments[victim.id()], delta, seed);
        alignments.insert(d.id().to_string(), da);
        let mut with_d = pool.clone();
        with_d.push(d);
        let after_d: BigRational = search_nscore_in(&q, &with_d, &alignments).unwrap();

        let zero_base = base == r(0, 1);
        let ok = if zero_base {
            zero += 1;
            after_q == base && after_d == base
        } else {
            positive += 1;
            after_q < base && after_d < base
        };
        if !ok {
            failures.push(format!("seed {seed}: base {base}, +Q {after_q}, +dil {after_d}"));
        }
    }
    ensure(failures.is_empty(), || {
        format!(
            "{} of {} instances violate the axioms; first: {}",
            failures.len(),
            positive + zero,
            failures[..failures.len().min(3)].join("; ")
        )
    })?;
    Ok(format!("{positive} positive-baseline and {zero} zero-baseline instances"))
}

fn exact_solver_oracle() -> Outcome {
    let mut checked = 0;
    for seed in 0..60u64 {
        let mut g = rng(0xE7AC + seed);
        let k = g.random_range(1..=8);
        let inst = random_instance(&mut g, k, 4, 4, 0.1);
        for l in 1..=k.min(3) {
            let want = oracle_best_subset(&inst.query, &inst.pool, &inst.alignments, l);
            let exact = exact_nts_in::<BigRational>(&inst.query, &inst.pool, &inst.alignments, l).unwrap();
            ensure(exact.nscore == want, || format!("seed {seed} l {l}: {} vs oracle {want}", exact.nscore))?;
            let picked: Vec<&Table> = exact
                .table_ids
                .iter()
                .map(|id| inst.pool.iter().find(|t| t.id() == id).unwrap())
                .collect();
            let again = oracle_search_score(&inst.query, &picked, &inst.alignments);
            ensure(again == want, || format!("seed {seed} l {l}: chosen subset scores {again}"))?;
            let fast = exact_nts(&inst.query, &inst.pool, &inst.alignments, l).unwrap();
            let want_f = want.numer().to_string().parse::<f64>().unwrap() / want.denom().to_string().parse::<f64>().unwrap();
            ensure((fast.nscore - want_f).abs() < 1e-12, || format!("seed {seed} l {l}: f64 {}", fast.nscore))?;
            checked += 1;
        }
    }
    ensure(checked >= 50, || format!("only {checked} cases"))?;
    Ok(format!("{checked} (instance, l) cases from 60 instances"))
}

fn metric_instance(g: &mut rand_chacha::ChaCha8Rng, k: usize) -> Instance {
    let cols = g.random_range(1..=3);
    let schema: Vec<String> = (0..cols).map(|i| format!("a{i}")).collect();
    let make = |g: &mut rand_chacha::ChaCha8Rng, id: &str| {
        let rows = g.random_range(1..=5);
        let alphabet = g.random_range(2..=8);
        let data = (0..rows)
            .map(|_| (0..cols).map(|_| Value::text(format!("v{}", g.random_range(0..alphabet)))).collect())
            .collect();
        Table::new(id, schema.clone(), data).unwrap()
    };
    let query = make(g, "q");
    let pool: Vec<Table> = (0..k).map(|i| make(g, &format!("t{i}"))).collect();
    let alignments = pool
        .iter()
        .map(|t| (t.id().to_string(), Alignment::identity("q", t)))
        .collect();
    Instance {
        query,
        pool,
        alignments,
    }
}

fn min_pairwise(space: &DiversitySpace, members: &[usize]) -> f64 {
    let mut m = f64::INFINITY;
    for (x, &i) in members.iter().enumerate() {
        for &j in &members[x + 1..] {
            m = m.min(space.tablediv(i, j));
        }
    }
    m
}

fn gmm_half_approximation() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut count = 0;
    for seed in 0..120u64 {
        let mut g = rng(0x6AA + seed);
        let k = g.random_range(2..=10);
        let l = g.random_range(2..=k.min(4));
        let inst = metric_instance(&mut g, k);
        // All Jaccard or all Jensen-Shannon, so the diversity is a metric.
        let s = if seed % 2 == 0 { 0 } else { 10_000 };
        let hyper = Hyper { s, ..Hyper::default() };
        let req = RankRequest::new(&inst.query, &inst.pool, &inst.alignments, l).with_hyper(hyper);
        let space = DiversitySpace::build(&req, false).unwrap();
        let picked: Vec<usize> = gmm_select(&req, None)
            .unwrap()
            .ids()
            .iter()
            .map(|id| space.index_of(id).unwrap())
            .collect();
        let greedy = min_pairwise(&space, &picked);
        let mut opt = 0.0f64;
        let mut subset = Vec::new();
        fn all(k: usize, l: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
            if cur.len() == l {
                f(cur);
                return;
            }
            for i in start..k {
                cur.push(i);
                all(k, l, i + 1, cur, f);
                cur.pop();
            }
        }
        all(k, l, 0, &mut subset, &mut |m| opt = opt.max(min_pairwise(&space, m)));
        ensure(greedy + 1e-12 >= 0.5 * opt, || format!("seed {seed}: greedy {greedy} vs optimum {opt}"))?;
        if opt > 0.0 {
            worst = worst.min(greedy / opt);
        }
        count += 1;
    }
    Ok(format!("{count} instances, worst greedy/optimum ratio {worst:.3}"))
}

struct Generated {
    query: Table,
    tables: Vec<Table>,
    alignments: AlignmentMap,
    pool: EvalPool,
    store: EmbeddingStore,
}

fn generated_benchmark(seed: u64) -> Generated {
    let mut g = rng(0xB1A7 + seed);
    let query = loop {
        let q = random_query(&mut g, "q", 6, 4, 0.0);
        if q.len() >= 2 {
            break q;
        }
    };
    let n = g.random_range(3..=7);
    let mut lake = Vec::new();
    let mut al = AlignmentMap::new();
    for i in 0..n {
        let (t, a) = random_candidate(&mut g, &query, &format!("t{i:02}"), 6, 4, 0.1);
        al.insert(t.id().to_string(), a);
        lake.push(t);
    }
    let cfg = BenchConfig { seed, ..BenchConfig::default() };
    let bench = build_benchmark(&query, &lake, &al, cfg).unwrap();
    let store = embed_tables(std::iter::once(&query).chain(bench.tables.iter())).unwrap();
    Generated {
        query,
        tables: bench.tables,
        alignments: bench.alignments,
        pool: bench.manifest.pool,
        store,
    }
}

fn blatant_duplicates() -> Outcome {
    let (mut novel_checks, mut baseline_checks, mut queries) = (0, 0, 0);
    for seed in 0..40u64 {
        let b = generated_benchmark(seed);
        let k = b.tables.len();
        let full = RankRequest::new(&b.query, &b.tables, &b.alignments, k).with_embeddings(&b.store);
        for method in [Method::Ants, Method::SemNov] {
            let scores = rankers::run(method, &full).unwrap();
            let positive = scores
                .ordering
                .iter()
                .filter(|s| s.score > 0.0 && Some(&s.table_id) != b.pool.query_copy_id.as_ref())
                .count();
            for l in 1..k {
                if l > positive {
                    break;
                }
                let req = RankRequest::new(&b.query, &b.tables, &b.alignments, l).with_embeddings(&b.store);
                let res = rankers::run(method, &req).unwrap();
                ensure(blatant_duplicate(&res, &b.pool) == 0, || {
                    format!("{method} returns the query copy at l = {l} (seed {seed})")
                })?;
                novel_checks += 1;
            }
        }
        let base = sem_baseline_rank(&full).unwrap();
        let copy = b.pool.query_copy_id.as_deref().unwrap();
        let copy_score = base.ordering.iter().find(|s| s.table_id == copy).unwrap().score;
        let top = base.ordering.iter().map(|s| s.score).fold(f64::MIN, f64::max);
        if copy_score >= top {
            for l in 1..=k {
                let req = RankRequest::new(&b.query, &b.tables, &b.alignments, l).with_embeddings(&b.store);
                let res = sem_baseline_rank(&req).unwrap();
                ensure(blatant_duplicate(&res, &b.pool) == 1, || {
                    format!("sem-baseline misses the copy at l = {l} (seed {seed})")
                })?;
                baseline_checks += 1;
            }
        }
        queries += 1;
    }
    ensure(baseline_checks > 0, || "no instance where the copy has maximal cosine".into())?;
    Ok(format!(
        "{queries} queries: {novel_checks} ants/semnov checks at 0, {baseline_checks} sem-baseline checks at 1"
    ))
}

fn snm_suite() -> Outcome {
    let pool = EvalPool {
        originals: ["T1", "T2"].iter().map(|s| s.to_string()).collect(),
        diluted_of: [("T1", "T1~"), ("T2", "T2~")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
        query_id: "Q".into(),
        query_copy_id: Some("Q+".into()),
        diluted_query_id: Some("Q+~".into()),
    };
    let cases = [(vec!["T1", "T1~"], 1.0), (vec!["T1~", "T1"], 0.5), (vec!["T1~", "T2~"], 0.0)];
    for (ids, want) in &cases {
        let got = snm_of(ids, &pool).unwrap();
        ensure(got == *want, || format!("SNM{ids:?} = {got}, expected {want}"))?;
    }
    let mut draws = 0;
    for seed in 0..250u64 {
        let mut g = rng(0x5A4 + seed);
        let n = g.random_range(1..=8);
        let originals: Vec<String> = (0..n).map(|i| format!("t{i}")).collect();
        let pool = EvalPool {
            originals: originals.iter().cloned().collect(),
            diluted_of: originals.iter().map(|o| (o.clone(), format!("{o}~"))).collect(),
            query_id: "q".into(),
            query_copy_id: Some("q+".into()),
            diluted_query_id: Some("q+~".into()),
        };
        let mut ids: Vec<String> = pool.ids().into_iter().map(str::to_string).collect();
        if g.random_bool(0.2) {
            ids.push("q".into());
        }
        ids.shuffle(&mut g);
        let l = g.random_range(1..=ids.len());
        let top: Vec<&str> = ids[..l].iter().map(String::as_str).collect();
        let (a, b) = (snm_of(&top, &pool).unwrap(), ssnm_of(&top, &pool).unwrap());
        ensure((0.0..=1.0).contains(&a) && a <= b && b <= 1.0, || format!("{top:?}: snm {a}, ssnm {b}"))?;
        draws += 1;
    }
    Ok(format!("3 hand cases, {draws} random draws"))
}

/// Generates benchmarks, ranks with every method and evaluates, writing every
/// artifact under `dir`.
fn full_pipeline(dir: &Path) {
    for seed in 0..3u64 {
        let b = generated_benchmark(seed);
        let qdir = dir.join(format!("query{seed}"));
        let lake = qdir.join("lake");
        fs::create_dir_all(&lake).unwrap();
        for t in &b.tables {
            write_table(&lake.join(format!("{}.csv", t.id())), t).unwrap();
        }
        write_alignments(&qdir.join("alignments.jsonl"), &b.alignments).unwrap();
        write_embeddings(&qdir.join("emb.tsv"), &b.store).unwrap();
        let mut cfg_lake = Vec::new();
        let mut cfg_al = AlignmentMap::new();
        let mut g = rng(seed);
        for i in 0..4 {
            let (t, a) = random_candidate(&mut g, &b.query, &format!("u{i}"), 6, 4, 0.1);
            cfg_al.insert(t.id().to_string(), a);
            cfg_lake.push(t);
        }
        let cfg = BenchConfig { seed, ..BenchConfig::default() };
        let manifest = build_benchmark(&b.query, &cfg_lake, &cfg_al, cfg).unwrap().manifest;
        write_manifest(&qdir.join("manifest.json"), &manifest).unwrap();

        // Keep the exact solver small.
        let small: Vec<Table> = b.tables.iter().take(8).cloned().collect();
        let mut records = Vec::new();
        let mut metrics = Vec::new();
        for method in Method::ALL {
            let pool: &[Table] = if method == Method::Exact { &small } else { &b.tables };
            for l in 1..=3 {
                let req = RankRequest::new(&b.query, pool, &b.alignments, l).with_embeddings(&b.store);
                let res = rankers::run(method, &req).unwrap();
                let mut push = |name: &str, value: f64| {
                    metrics.push(MetricRow {
                        method: method.to_string(),
                        query_id: "q".into(),
                        l,
                        metric_name: name.into(),
                        value,
                    })
                };
                push("blatant_duplicate", f64::from(blatant_duplicate(&res, &b.pool)));
                push("ssnm", ssnm(&res, &b.pool).unwrap());
                if res.ranked {
                    push("snm", snm(&res, &b.pool).unwrap());
                }
                let chosen: Vec<&Table> = res
                    .ids()
                    .iter()
                    .map(|id| pool.iter().find(|t| t.id() == *id).unwrap())
                    .collect();
                push("search_nscore", search_nscore(&b.query, &chosen, &b.alignments).unwrap());
                push("f_value", f_value(&req, &res.ids()).unwrap());
                records.push(ResultRecord {
                    query_id: "q".into(),
                    l,
                    result: res,
                });
            }
        }
        write_results(&qdir.join("results.csv"), &records).unwrap();
        write_report(&qdir.join("metrics.csv"), &metrics).unwrap();
    }
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let key = p.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.insert(key, fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn determinism() -> Outcome {
    let mut snaps = Vec::new();
    for threads in [1, 4, 4] {
        let dir = tempfile::tempdir().unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| full_pipeline(dir.path()));
        snaps.push(snapshot(dir.path()));
    }
    let files = snaps[0].len();
    ensure(files > 0, || "nothing written".into())?;
    for (i, s) in snaps.iter().enumerate().skip(1) {
        for (name, bytes) in &snaps[0] {
            ensure(s.get(name) == Some(bytes), || format!("run {i} differs in {name}"))?;
        }
        ensure(s.len() == files, || format!("run {i} wrote {} files, expected {files}", s.len()))?;
    }
    Ok(format!("{files} files byte-identical over three runs with 1, 4 and 4 workers"))
}

fn random_text(g: &mut rand_chacha::ChaCha8Rng) -> String {
    const PIECES: [&str; 12] = ["a", "Zeta", " ", ",", "\"", "\n", "é", "日本", "x y", "-", "::", "\t"];
    let n = g.random_range(1..=4);
    (0..n).map(|_| PIECES[g.random_range(0..PIECES.len())]).collect()
}

fn round_trips() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut fixtures_checked = 0;
    for seed in 0..60u64 {
        let mut g = rng(0x10 + seed);
        let cols = g.random_range(1..=5);
        let schema: Vec<String> = (0..cols).map(|i| format!("{}{i}", random_text(&mut g))).collect();
        let rows = (0..g.random_range(1..=8))
            .map(|_| {
                (0..cols)
                    .map(|_| if g.random_bool(0.2) { Value::Null } else { Value::Text(random_text(&mut g)) })
                    .collect()
            })
            .collect();
        let id = format!("t{seed}");
        let t = Table::new(&id, schema, rows).unwrap();
        let p = dir.path().join(format!("{id}.csv"));
        write_table(&p, &t).unwrap();
        let once = read_table(&p).map_err(|e| e.to_string())?;
        ensure(once == t, || format!("table {id} changed on first read"))?;
        let first = fs::read(&p).unwrap();
        write_table(&p, &once).unwrap();
        ensure(read_table(&p).unwrap() == once && fs::read(&p).unwrap() == first, || {
            format!("table {id} is not a fixed point")
        })?;

        let q = Table::from_strs("q", &["x", "y", "z"], &[&["1", "2", "3"]]).unwrap();
        let al: AlignmentMap = (0..g.random_range(1..=4))
            .map(|i| {
                let cid = format!("{}_{i}", random_text(&mut g).replace(['\n', '\t'], "_"));
                let mut attrs: Vec<String> = t.schema().to_vec();
                attrs.shuffle(&mut g);
                let n = g.random_range(1..=attrs.len().min(3));
                let pairs = q.schema().iter().cloned().zip(attrs).take(n).collect();
                (cid.clone(), Alignment::new("q", cid, pairs).unwrap())
            })
            .collect();
        let ap = dir.path().join(format!("{id}.jsonl"));
        write_alignments(&ap, &al).unwrap();
        let once = read_alignments(&ap).map_err(|e| e.to_string())?;
        ensure(once == al, || format!("alignments {id} changed"))?;
        write_alignments(&ap, &once).unwrap();
        ensure(read_alignments(&ap).unwrap() == once, || format!("alignments {id} not a fixed point"))?;

        let mut store = EmbeddingStore::new();
        let dim = g.random_range(1..=16);
        let tdim = g.random_range(1..=16);
        for (i, a) in t.schema().iter().enumerate() {
            if a.contains(['\n', '\t']) {
                continue;
            }
            let v: Vec<f64> = (0..dim).map(|_| g.random_range(-1e3..1e3)).collect();
            store.insert_attribute(&format!("tab{i}"), a, v).unwrap();
        }
        store
            .insert_table(&id, (0..tdim).map(|_| g.random::<f64>() + 1e-9).collect())
            .unwrap();
        let ep = dir.path().join(format!("{id}.tsv"));
        write_embeddings(&ep, &store).unwrap();
        let once = read_embeddings(&ep).map_err(|e| e.to_string())?;
        let same = |a: &EmbeddingStore, b: &EmbeddingStore| {
            a.attributes().collect::<Vec<_>>() == b.attributes().collect::<Vec<_>>()
                && a.tables().collect::<Vec<_>>() == b.tables().collect::<Vec<_>>()
        };
        ensure(same(&once, &store), || format!("embeddings {id} changed"))?;
        write_embeddings(&ep, &once).unwrap();
        ensure(same(&read_embeddings(&ep).unwrap(), &once), || format!("embeddings {id} not a fixed point"))?;
        fixtures_checked += 1;
    }
    Ok(format!("{fixtures_checked} fixtures each for tables, alignments and embeddings"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("worked example, exact rationals", worked_example),
        ("Jensen-Shannon distances", jsd_regression),
        ("table novelty of T1 and T2", table_novelty_regression),
        ("blatant-duplicate and dilution axioms", axiom_suite),
        ("exact solver against exhaustive oracle", exact_solver_oracle),
        ("max-min greedy within half of optimum", gmm_half_approximation),
        ("blatant-duplicate directionality", blatant_duplicates),
        ("SNM and SSNM", snm_suite),
        ("determinism across worker counts", determinism),
        ("format round trips", round_trips),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2}: {name} ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {:>2}: {name} ({why})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
