use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use nts_core::benchgen::{build_benchmark, BenchConfig, DEFAULT_DELTA, DEFAULT_K};
use nts_core::embed::embed_tables;
use nts_core::io::{
    read_alignments, read_embeddings, read_manifest, read_results, read_table, write_alignments,
    write_embeddings, write_manifest, write_report, write_results, write_table, FileCatalog, MetricRow,
    ResultRecord,
};
use nts_core::metrics::{blatant_duplicate, f_value, snm, ssnm};
use nts_core::novelty::search_nscore;
use nts_core::rankers::{self, DEFAULT_B, DEFAULT_LAMBDA, DEFAULT_LEV_THRESHOLD};
use nts_core::sim::DEFAULT_DOMAIN_THRESHOLD;
use nts_core::{AlignmentMap, EmbeddingStore, Hyper, Method, NtsError, RankRequest, Table};

#[derive(Parser)]
#[command(name = "nts", version, about = "Novelty-aware reranking of unionable tables")]
struct Cli {
    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a benchmark pool: every unionable table, a diluted version of
    /// each, a copy of the query and a diluted copy.
    Dilute(DiluteArgs),
    /// Rerank a pool of unionable tables for a query.
    Rank(RankArgs),
    /// Score ranking results against a benchmark manifest.
    Eval(EvalArgs),
    /// Write hashed bag-of-token vectors for a query and lake. These vectors
    /// only reflect token overlap and are NOT semantic embeddings.
    Embed(EmbedArgs),
}

#[derive(Args)]
struct Inputs {
    /// Query table (CSV; the file stem is the table id).
    #[arg(long)]
    query: PathBuf,
    /// Directory of candidate CSV tables.
    #[arg(long)]
    lake: PathBuf,
    /// Alignment file (JSON lines, one record per candidate).
    #[arg(long)]
    alignments: PathBuf,
}

#[derive(Args)]
struct DiluteArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Fraction of query tuples injected into each diluted table.
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    /// Unionable tables kept (first k by id).
    #[arg(long, default_value_t = DEFAULT_K)]
    k: usize,
    /// Seed for dilution sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory; receives lake/, alignments.jsonl and manifest.json.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct RankArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Embedding file (required for ants, gmc, semnov, sem-baseline).
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// One of ants, gmc, gmm, semnov, er, sem-baseline, exact.
    #[arg(long, default_value = "ants")]
    method: Method,
    /// Number of results; a comma-separated list runs each size.
    #[arg(long, value_delimiter = ',', required = true)]
    l: Vec<usize>,
    /// Keep only the top k candidates by summed attribute cosine before
    /// reranking (default: the whole pool).
    #[arg(long)]
    k: Option<usize>,
    /// Domain-size threshold above which Jaccard replaces Jensen-Shannon.
    #[arg(long, default_value_t = DEFAULT_DOMAIN_THRESHOLD)]
    s: usize,
    /// Penalization exponent on syntactic or table similarity.
    #[arg(long, default_value_t = DEFAULT_B)]
    b: f64,
    /// Max-sum trade-off between similarity and diversity.
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    lambda: f64,
    /// Normalized Levenshtein similarity for a cell match in er.
    #[arg(long, default_value_t = DEFAULT_LEV_THRESHOLD)]
    lev_threshold: f64,
    /// Seed passed to the ranker; every shipped ranker is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Result CSV.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Result CSV written by `rank`.
    #[arg(long)]
    result: PathBuf,
    /// Manifest written by `dilute`.
    #[arg(long)]
    manifest: PathBuf,
    /// With --lake and --alignments, also reports the search novelty score.
    #[arg(long, requires_all = ["lake", "alignments"])]
    query: Option<PathBuf>,
    #[arg(long)]
    lake: Option<PathBuf>,
    #[arg(long)]
    alignments: Option<PathBuf>,
    /// With the table inputs, also reports the max-sum objective.
    #[arg(long, requires = "query")]
    embeddings: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    lambda: f64,
    #[arg(long, default_value_t = DEFAULT_DOMAIN_THRESHOLD)]
    s: usize,
    /// Metrics CSV.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long)]
    query: PathBuf,
    #[arg(long)]
    lake: PathBuf,
    /// Embedding file to write.
    #[arg(long)]
    output: PathBuf,
}

/// Query, aligned candidates (sorted by id) and their alignments.
struct Loaded {
    query: Table,
    candidates: Vec<Table>,
    alignments: AlignmentMap,
}

fn load(query: &Path, lake: &Path, alignments: &Path) -> Result<Loaded> {
    let query = read_table(query)?;
    let alignments = read_alignments(alignments)?;
    let catalog = FileCatalog::open(lake)?;
    let available: BTreeSet<String> = catalog.ids()?.into_iter().collect();
    let mut candidates = Vec::with_capacity(alignments.len());
    for (id, a) in &alignments {
        if a.query_table_id != query.id() {
            return Err(NtsError::Validation(format!(
                "alignment for '{id}' names query '{}', expected '{}'",
                a.query_table_id,
                query.id()
            ))
            .into());
        }
        if !available.contains(id) {
            return Err(NtsError::Validation(format!("aligned table '{id}' is not in {}", lake.display())).into());
        }
        candidates.push(catalog.load(id)?);
    }
    Ok(Loaded {
        query,
        candidates,
        alignments,
    })
}

fn dilute(args: DiluteArgs) -> Result<()> {
    let Loaded {
        query,
        candidates,
        alignments,
    } = load(&args.inputs.query, &args.inputs.lake, &args.inputs.alignments)?;
    let config = BenchConfig {
        delta: args.delta,
        k: args.k,
        seed: args.seed,
    };
    let bench = build_benchmark(&query, &candidates, &alignments, config)?;
    let lake = args.output.join("lake");
    fs::create_dir_all(&lake).map_err(|e| NtsError::Io {
        path: lake.clone(),
        source: e,
    })?;
    for t in &bench.tables {
        write_table(&lake.join(format!("{}.csv", t.id())), t)?;
    }
    write_alignments(&args.output.join("alignments.jsonl"), &bench.alignments)?;
    write_manifest(&args.output.join("manifest.json"), &bench.manifest)?;
    eprintln!(
        "wrote {} tables for query '{}' to {}",
        bench.tables.len(),
        query.id(),
        args.output.display()
    );
    Ok(())
}

fn rank(args: RankArgs) -> Result<()> {
    let Loaded {
        query,
        mut candidates,
        alignments,
    } = load(&args.inputs.query, &args.inputs.lake, &args.inputs.alignments)?;
    let store = match &args.embeddings {
        Some(p) => Some(read_embeddings(p)?),
        None => None,
    };
    let hyper = Hyper {
        s: args.s,
        b: args.b,
        lambda: args.lambda,
        lev_threshold: args.lev_threshold,
        seed: args.seed,
    };
    if let Some(k) = args.k {
        candidates = top_k_unionable(&query, candidates, &alignments, store.as_ref(), k)?;
    }
    let mut records = Vec::with_capacity(args.l.len());
    for &l in &args.l {
        let mut req = RankRequest::new(&query, &candidates, &alignments, l).with_hyper(hyper);
        if let Some(s) = &store {
            req = req.with_embeddings(s);
        }
        let result = rankers::run(args.method, &req).with_context(|| format!("{} at l = {l}", args.method))?;
        records.push(ResultRecord {
            query_id: query.id().to_string(),
            l,
            result,
        });
    }
    write_results(&args.output, &records)?;
    Ok(())
}

/// The unionable-search step: the k candidates with the largest summed
/// attribute cosine.
fn top_k_unionable(
    query: &Table,
    candidates: Vec<Table>,
    alignments: &AlignmentMap,
    store: Option<&EmbeddingStore>,
    k: usize,
) -> Result<Vec<Table>> {
    if k == 0 {
        return Err(NtsError::Parameter("k must be at least 1".into()).into());
    }
    if k >= candidates.len() {
        return Ok(candidates);
    }
    let store = store.ok_or_else(|| NtsError::Config("--k below the pool size requires --embeddings".into()))?;
    let req = RankRequest::new(query, &candidates, alignments, k).with_embeddings(store);
    let keep: BTreeSet<String> = rankers::sem_baseline_rank(&req)?
        .ids()
        .into_iter()
        .map(str::to_string)
        .collect();
    Ok(candidates.into_iter().filter(|t| keep.contains(t.id())).collect())
}

fn eval(args: EvalArgs) -> Result<()> {
    let manifest = read_manifest(&args.manifest)?;
    manifest.pool.validate()?;
    let records = read_results(&args.result)?;
    let tables = match (&args.query, &args.lake, &args.alignments) {
        (Some(q), Some(lake), Some(a)) => Some(load(q, lake, a)?),
        _ => None,
    };
    let store = match &args.embeddings {
        Some(p) => Some(read_embeddings(p)?),
        None => None,
    };
    let mut rows = Vec::new();
    for rec in &records {
        if rec.query_id != manifest.query_id {
            return Err(NtsError::Validation(format!(
                "result for query '{}' evaluated against manifest for '{}'",
                rec.query_id, manifest.query_id
            ))
            .into());
        }
        for id in rec.result.ids() {
            if !manifest.pool.contains(id) {
                return Err(NtsError::Validation(format!("table '{id}' is not in the manifest pool")).into());
            }
        }
        let mut push = |name: &str, value: f64| {
            rows.push(MetricRow {
                method: rec.result.method.to_string(),
                query_id: rec.query_id.clone(),
                l: rec.l,
                metric_name: name.to_string(),
                value,
            })
        };
        push("blatant_duplicate", f64::from(blatant_duplicate(&rec.result, &manifest.pool)));
        push("ssnm", ssnm(&rec.result, &manifest.pool)?);
        if rec.result.ranked {
            push("snm", snm(&rec.result, &manifest.pool)?);
        }
        if let Some(t) = &tables {
            let chosen: Vec<&Table> = rec
                .result
                .ids()
                .into_iter()
                .map(|id| {
                    t.candidates
                        .iter()
                        .find(|c| c.id() == id)
                        .ok_or_else(|| NtsError::Validation(format!("table '{id}' has no alignment")))
                })
                .collect::<std::result::Result<_, _>>()?;
            let owned: Vec<Table> = chosen.into_iter().cloned().collect();
            push("search_nscore", search_nscore(&t.query, &owned, &t.alignments)?);
            if let Some(s) = &store {
                let hyper = Hyper {
                    s: args.s,
                    lambda: args.lambda,
                    ..Hyper::default()
                };
                let req = RankRequest::new(&t.query, &t.candidates, &t.alignments, rec.result.len())
                    .with_embeddings(s)
                    .with_hyper(hyper);
                push("f_value", f_value(&req, &rec.result.ids())?);
            }
        }
    }
    write_report(&args.output, &rows)?;
    Ok(())
}

fn embed(args: EmbedArgs) -> Result<()> {
    let query = read_table(&args.query)?;
    let lake = FileCatalog::open(&args.lake)?.load_all()?;
    let tables = std::iter::once(&query).chain(lake.iter().filter(|t| t.id() != query.id()));
    write_embeddings(&args.output, &embed_tables(tables)?)?;
    eprintln!("note: hashed token vectors are not semantic embeddings");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} workers: {e}");
            return ExitCode::from(4);
        }
    }
    let outcome = match cli.command {
        Command::Dilute(a) => dilute(a),
        Command::Rank(a) => rank(a),
        Command::Eval(a) => eval(a),
        Command::Embed(a) => embed(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<NtsError>().map(NtsError::exit_code).unwrap_or(1);
            ExitCode::from(code as u8)
        }
    }
}
