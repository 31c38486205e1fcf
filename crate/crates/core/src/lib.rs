//! Multi-omic feature selection and hybrid quantum-classical classification
//! of lung cancer subtypes (LUSC vs LUAD).
//!
//! The crate is organised by pipeline stage:
//!
//! * [`omics_io`]: TSV ingestion, cohort concatenation, clinical joins,
//!   multi-omic integration and a synthetic cohort generator.
//! * [`stats`]: per-feature t statistics, p-values and p-value windows.
//! * [`select`]: mutual information, chi-square, PCA and random-forest
//!   scorers, top-k selection, Venn partitioning and per-feature AUC screening.
//! * [`cluster`]: Euclidean distances, Ward linkage, tree cutting and
//!   cluster-importance reduction.
//! * [`quantum`]: a dense statevector simulator.
//! * [`qnn`]: the hybrid classifier (amplitude encoding, Rot/CZ ansatz,
//!   Pauli-Z readout, dense head) with parameter-shift gradients and Adam.
//! * [`baselines`]: logistic regression, MLP and random forest comparators.
//! * [`metrics`]: confusion matrices, accuracy/precision/recall/F1, ROC-AUC.
//! * [`report`]: post-training feature attribution and reporting.
//! * [`pipeline`]: file-based stages driven by a TOML config.

pub mod adam;
pub mod baselines;
pub mod checkpoint;
pub mod classifier;
pub mod cluster;
pub mod error;
pub mod forest;
pub mod metrics;
pub mod omics_io;
pub mod pipeline;
pub mod qnn;
pub mod quantum;
pub mod report;
pub mod scaling;
pub mod seeding;
pub mod select;
pub mod stats;

pub use error::{Error, Result};
