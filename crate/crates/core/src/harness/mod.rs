//! Experiment orchestration: configs, corpora, sweeps and artifacts.

pub mod artifacts;
pub mod config;
pub mod corpus;
pub mod experiment;

pub use artifacts::{ArtifactDir, ArtifactError, Failure};
pub use config::{ConfigInvalid, CoreLimits, ExperimentConfig, ExperimentKind, Language, Overrides};
pub use corpus::{generate_corpus, Label, LabeledInstance};
pub use experiment::{run_experiment, verify_certificate_files, ExperimentOutcome, HarnessError};
