//! Novelty-aware reranking of unionable tables.
//!
//! Given a query table and a pool of unionable lake tables with attribute
//! alignments, this crate scores how much new information a set of tables
//! adds to the query, reranks the pool with several novelty-oriented
//! methods, builds dilution benchmarks and evaluates results against them.

pub mod benchgen;
pub mod embed;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod metrics;
pub mod normalize;
pub mod novelty;
pub mod rankers;
pub mod sim;
pub mod table;

pub use error::{NtsError, Result};
pub use rankers::{Hyper, Method, RankRequest, RankedResult};
pub use sim::EmbeddingStore;
pub use table::{Alignment, AlignmentMap, Table, Tuple, TupleId, Value};
