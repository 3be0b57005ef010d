//! Anomaly ranking for categorical transaction databases through rare and
//! frequent association rules.
//!
//! The pipeline is: load a [`Context`] (objects × items), mine the minimal
//! rare border or the maximal frequent itemsets ([`miner`]), derive valid
//! rules ([`rules`]), score and rank objects by the rules they satisfy or
//! violate ([`scorer`]), then evaluate the ranking against labels
//! ([`eval`]) and draw it ([`band`]). [`baselines`] holds FPOF, AVF and OD
//! for comparison.

pub mod band;
pub mod baselines;
pub mod context;
pub mod error;
pub mod eval;
pub mod fixtures;
pub mod ingest;
pub mod itemset;
pub mod miner;
pub mod rules;
pub mod scorer;
pub mod synthetic;

pub use context::{Context, Item, Support, SupportThresholds, Threshold};
pub use error::{Error, Result};
pub use eval::{EvalReport, LabelSet};
pub use itemset::{ItemId, Itemset, Tid, Tidset};
pub use miner::{MinedItemset, MinerParams};
pub use rules::{Rule, RuleKind, RuleSet};
pub use scorer::{
    Aggregation, ArmConfig, Detector, InterestMode, MatchMode, MatchRecord, Polarity, Ranking,
    ScoredObject,
};
