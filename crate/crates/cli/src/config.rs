//! Experiment configuration and the combiner roster.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dsfusion::baselines::DEFAULT_DENSITY_SUM;
use dsfusion::{Mode, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Every combination method the harness can evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Combiner {
    WS,
    Av,
    Md,
    Mx,
    MV,
    FI,
    DS0,
    DS1,
    DS2,
}

impl Combiner {
    /// Report column order.
    pub const ALL: [Combiner; 9] = [
        Combiner::WS,
        Combiner::Av,
        Combiner::Md,
        Combiner::Mx,
        Combiner::MV,
        Combiner::FI,
        Combiner::DS0,
        Combiner::DS1,
        Combiner::DS2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Combiner::WS => "WS",
            Combiner::Av => "Av",
            Combiner::Md => "Md",
            Combiner::Mx => "Mx",
            Combiner::MV => "MV",
            Combiner::FI => "FI",
            Combiner::DS0 => "DS0",
            Combiner::DS1 => "DS1",
            Combiner::DS2 => "DS2",
        }
    }

    /// The trainable evidence mode behind DS1/DS2.
    pub fn evidence_mode(self) -> Option<Mode> {
        match self {
            Combiner::DS1 => Some(Mode::Ds1),
            Combiner::DS2 => Some(Mode::Ds2),
            _ => None,
        }
    }

    pub fn needs_accuracy_table(self) -> bool {
        matches!(self, Combiner::WS | Combiner::FI)
    }
}

impl fmt::Display for Combiner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Combiner {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Combiner::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| CliError::Config(format!("unknown combiner {s:?}")))
    }
}

/// Parse a comma-separated combiner list, returning it in report order
/// without duplicates.
pub fn parse_combiners(list: &str) -> Result<Vec<Combiner>> {
    let mut out: Vec<Combiner> = list
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    out.sort();
    out.dedup();
    if out.is_empty() {
        return Err(CliError::Config("no combiners selected".into()));
    }
    Ok(out)
}

/// Which classifier subsets to evaluate. Subsets name classifiers by rank
/// (1 = most accurate on the test set).
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubsetPolicy {
    /// `all` up to eight classifiers, `paper-style` beyond.
    #[default]
    Auto,
    All,
    PaperStyle,
    Explicit(Vec<Vec<usize>>),
}

impl FromStr for SubsetPolicy {
    type Err = CliError;

    /// `auto`, `all`, `paper-style`, or `explicit:1,2;1,3,5`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "auto" => Ok(SubsetPolicy::Auto),
            "all" => Ok(SubsetPolicy::All),
            "paper-style" => Ok(SubsetPolicy::PaperStyle),
            other => {
                let body = other.strip_prefix("explicit:").ok_or_else(|| {
                    CliError::Config(format!(
                        "subset policy must be auto, all, paper-style or explicit:..., got {other:?}"
                    ))
                })?;
                let subsets = body
                    .split(';')
                    .map(|group| {
                        group
                            .split(',')
                            .map(|r| {
                                r.trim().parse::<usize>().map_err(|_| {
                                    CliError::Config(format!("bad classifier rank {r:?}"))
                                })
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(SubsetPolicy::Explicit(subsets))
            }
        }
    }
}

fn default_combiners() -> Vec<Combiner> {
    Combiner::ALL.to_vec()
}

fn default_fi_target_sum() -> f64 {
    DEFAULT_DENSITY_SUM
}

/// Settings shared by `train` and `evaluate`. Command-line flags override
/// the corresponding fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub train_manifest: Option<PathBuf>,
    #[serde(default)]
    pub test_manifest: Option<PathBuf>,
    #[serde(default = "default_combiners")]
    pub combiners: Vec<Combiner>,
    #[serde(default)]
    pub subset_policy: SubsetPolicy,
    #[serde(default)]
    pub train_config: TrainConfig,
    #[serde(default = "default_fi_target_sum")]
    pub fi_target_sum: f64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            train_manifest: None,
            test_manifest: None,
            combiners: default_combiners(),
            subset_policy: SubsetPolicy::Auto,
            train_config: TrainConfig::default(),
            fi_target_sum: DEFAULT_DENSITY_SUM,
            output_dir: None,
        }
    }
}

impl ExperimentConfig {
    /// Load from JSON. Relative manifest and output paths resolve against
    /// the config file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                CliError::Config(format!("{}: not found", path.display()))
            } else {
                CliError::io(path, e)
            }
        })?;
        let mut cfg: Self = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut cfg.train_manifest,
            &mut cfg.test_manifest,
            &mut cfg.output_dir,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.combiners.is_empty() {
            return Err(CliError::Config("no combiners selected".into()));
        }
        if !(self.fi_target_sum > 0.0 && self.fi_target_sum.is_finite()) {
            return Err(CliError::Config(format!(
                "fi_target_sum must be > 0, got {}",
                self.fi_target_sum
            )));
        }
        self.train_config.validate()?;
        Ok(())
    }
}
