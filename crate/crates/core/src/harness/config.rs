//! Experiment configuration: one JSON file plus command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::languages::pool::pool_pair;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    BSpeedup,
    CapDetect,
    StarProbe,
    Levin,
    Dominance,
    ComposeCheck,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::BSpeedup,
        ExperimentKind::CapDetect,
        ExperimentKind::StarProbe,
        ExperimentKind::Levin,
        ExperimentKind::Dominance,
        ExperimentKind::ComposeCheck,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::BSpeedup => "b-speedup",
            ExperimentKind::CapDetect => "cap-detect",
            ExperimentKind::StarProbe => "star-probe",
            ExperimentKind::Levin => "levin",
            ExperimentKind::Dominance => "dominance",
            ExperimentKind::ComposeCheck => "compose-check",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown experiment kind {s:?}"))
    }
}

/// Which complement language the reference acceptor decides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    Cobhp,
    Codbhp,
}

/// Limits of the exhaustive part of a corpus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CoreLimits {
    pub max_states: usize,
    /// Total transition entries per machine.
    pub max_entries: usize,
    pub max_input_len: usize,
    pub t_max: u64,
}

impl Default for CoreLimits {
    fn default() -> Self {
        CoreLimits {
            max_states: 1,
            max_entries: 3,
            max_input_len: 1,
            t_max: 2,
        }
    }
}

pub const ACCEPTOR_CHOICES: [&str; 5] = [
    "reference",
    "transformed",
    "shortcut-no-accept",
    "shortcut-dead-start",
    "shortcut-finite-orbit",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub t_min: u64,
    pub t_max: u64,
    /// Number of random instances added after the exhaustive core.
    pub corpus_size: usize,
    /// Exhaustive core; `null` leaves it out.
    pub core: Option<CoreLimits>,
    /// Limits of random machines.
    pub max_states: usize,
    pub max_entries: usize,
    pub max_input_len: usize,
    /// Largest pad length of random instances.
    pub corpus_t_max: u64,
    pub step_budget: u64,
    pub decider_budget: u64,
    pub levin_budget: u64,
    /// Name of a pool pair.
    pub pair: String,
    pub language: Language,
    /// Acceptor under test for `cap-detect` and `star-probe`.
    pub acceptor: String,
    pub max_degree: u32,
    pub c_cap: u64,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kind: ExperimentKind::BSpeedup,
            seed: 1,
            t_min: 0,
            t_max: 256,
            corpus_size: 200,
            core: Some(CoreLimits::default()),
            max_states: 4,
            max_entries: 6,
            max_input_len: 4,
            corpus_t_max: 8,
            step_budget: 10_000_000,
            decider_budget: 1_000_000,
            levin_budget: 1 << 24,
            pair: "loop-right".into(),
            language: Language::Cobhp,
            acceptor: "reference".into(),
            max_degree: 3,
            c_cap: crate::speedup::dominance::DEFAULT_C_CAP,
            out_dir: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldProblem {
    pub field: String,
    pub problem: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("invalid configuration: {}", .problems.iter().map(|p| format!("{}: {}", p.field, p.problem)).collect::<Vec<_>>().join("; "))]
pub struct ConfigInvalid {
    pub problems: Vec<FieldProblem>,
}

impl ConfigInvalid {
    pub fn single(field: &str, problem: impl Into<String>) -> Self {
        ConfigInvalid {
            problems: vec![FieldProblem {
                field: field.into(),
                problem: problem.into(),
            }],
        }
    }
}

/// Command-line values that replace config file entries.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub t_max: Option<u64>,
    pub out_dir: Option<PathBuf>,
    /// Step budget, or the Levin budget for `levin` runs.
    pub budget: Option<u64>,
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self, ConfigInvalid> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigInvalid::single("config", format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| ConfigInvalid::single("config", e.to_string()))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(t) = o.t_max {
            self.t_max = t;
        }
        if let Some(dir) = &o.out_dir {
            self.out_dir = dir.clone();
        }
        if let Some(b) = o.budget {
            if self.kind == ExperimentKind::Levin {
                self.levin_budget = b;
            } else {
                self.step_budget = b;
            }
        }
    }

    /// Checks every field that does not touch the filesystem.
    pub fn validate(&self) -> Result<(), ConfigInvalid> {
        let mut problems = Vec::new();
        let mut bad = |field: &str, problem: &str| {
            problems.push(FieldProblem {
                field: field.into(),
                problem: problem.into(),
            })
        };
        if self.t_min > self.t_max {
            bad("tMin", "must not exceed tMax");
        }
        if self.corpus_size == 0 {
            bad("corpusSize", "must be at least 1");
        }
        if self.max_states == 0 {
            bad("maxStates", "must be at least 1");
        }
        for (field, v) in [
            ("stepBudget", self.step_budget),
            ("deciderBudget", self.decider_budget),
            ("levinBudget", self.levin_budget),
        ] {
            if v == 0 {
                bad(field, "must be positive");
            }
        }
        if let Some(core) = &self.core {
            if core.max_states == 0 {
                bad("core.maxStates", "must be at least 1");
            }
        }
        match pool_pair(&self.pair) {
            None => bad("pair", "not a pool pair"),
            Some(p) if self.language == Language::Codbhp && !p.machine.is_deterministic() => {
                bad("pair", "coDBHP experiments need a deterministic pair")
            }
            Some(_) => {}
        }
        if !ACCEPTOR_CHOICES.contains(&self.acceptor.as_str()) {
            bad("acceptor", "unknown acceptor");
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(ConfigInvalid { problems })
        }
    }

    /// [`validate`](Self::validate) plus an existing output directory.
    pub fn validate_for_run(&self) -> Result<(), ConfigInvalid> {
        let mut problems = self.validate().err().map(|e| e.problems).unwrap_or_default();
        if !self.out_dir.is_dir() {
            problems.push(FieldProblem {
                field: "outDir".into(),
                problem: format!("{} is not an existing directory", self.out_dir.display()),
            });
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(ConfigInvalid { problems })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        ExperimentConfig::default().validate().unwrap();
    }

    #[test]
    fn problems_are_listed_per_field() {
        let cfg = ExperimentConfig {
            corpus_size: 0,
            t_min: 9,
            t_max: 3,
            step_budget: 0,
            pair: "nope".into(),
            ..Default::default()
        };
        let fields: Vec<String> = cfg.validate().unwrap_err().problems.into_iter().map(|p| p.field).collect();
        assert_eq!(fields, ["tMin", "corpusSize", "stepBudget", "pair"]);
    }

    #[test]
    fn json_with_overrides() {
        let cfg: ExperimentConfig = serde_json::from_str(r#"{"kind":"cap-detect","seed":7,"core":null}"#).unwrap();
        assert_eq!(cfg.kind, ExperimentKind::CapDetect);
        assert_eq!(cfg.core, None);
        let mut cfg = cfg;
        cfg.apply(&Overrides {
            seed: Some(9),
            budget: Some(55),
            ..Default::default()
        });
        assert_eq!((cfg.seed, cfg.step_budget), (9, 55));
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"bogus":1}"#).is_err());
    }

    #[test]
    fn missing_out_dir() {
        let cfg = ExperimentConfig {
            out_dir: "/definitely/not/here".into(),
            ..Default::default()
        };
        let err = cfg.validate_for_run().unwrap_err();
        assert_eq!(err.problems[0].field, "outDir");
    }

    #[test]
    fn kind_names_round_trip() {
        for k in ExperimentKind::ALL {
            assert_eq!(k.as_str().parse::<ExperimentKind>(), Ok(k));
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{k}\""));
        }
    }
}
