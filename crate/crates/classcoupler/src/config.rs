//! Model configuration: JSON-serializable descriptions of every runnable
//! target, plus the built-in presets.
//!
//! A config is data only; [`ModelConfig::build`] performs all validation by
//! construction of the underlying model. Slab means default to zero, the
//! conventional centering for a null at the origin.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::distributions::{AtomMixturePrior, InvGammaParams, NormalParams};
use crate::driver::BuiltModel;
use crate::error::{Error, Result};
use crate::imh::WeightedDiscreteTarget;
use crate::models::{SingleMeanKnownVariance, SingleMeanModel, TwoSampleModel, VarianceCase};

/// Inverse-gamma hyperparameters `(shape, rate)`: the density is
/// proportional to `v^-(shape+1) * exp(-rate/v)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct IgConfig {
    pub shape: f64,
    pub rate: f64,
}

impl IgConfig {
    fn build(&self) -> Result<InvGammaParams> {
        InvGammaParams::new(self.shape, self.rate)
    }
}

/// Variance treatment for the two-sample model.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "case", rename_all = "kebab-case", deny_unknown_fields)]
pub enum VarianceCaseConfig {
    Known { v1: f64, v2: f64 },
    Common { shape: f64, rate: f64 },
    Separate { group1: IgConfig, group2: IgConfig },
}

impl VarianceCaseConfig {
    fn build(&self) -> Result<VarianceCase> {
        Ok(match self {
            VarianceCaseConfig::Known { v1, v2 } => VarianceCase::Known(*v1, *v2),
            VarianceCaseConfig::Common { shape, rate } => {
                VarianceCase::Common(InvGammaParams::new(*shape, *rate)?)
            }
            VarianceCaseConfig::Separate { group1, group2 } => {
                VarianceCase::Separate(group1.build()?, group2.build()?)
            }
        })
    }
}

/// One runnable model, as plain data.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelConfig {
    /// One-sample mean test, unknown variance.
    SingleMean {
        data: Vec<f64>,
        /// Prior mass on the null.
        null_weight: f64,
        /// Null location.
        #[serde(default)]
        null_mean: f64,
        #[serde(default)]
        slab_mean: f64,
        slab_variance: f64,
        variance_prior: IgConfig,
    },
    /// One-sample mean test, variance known.
    SingleMeanKnownVariance {
        data: Vec<f64>,
        null_weight: f64,
        #[serde(default)]
        null_mean: f64,
        #[serde(default)]
        slab_mean: f64,
        slab_variance: f64,
        variance: f64,
    },
    /// Two-sample common-mean test.
    TwoSample {
        group1: Vec<f64>,
        group2: Vec<f64>,
        /// Prior mass on the tied-means class.
        tied_weight: f64,
        #[serde(default)]
        tied_slab_mean: f64,
        tied_slab_variance: f64,
        #[serde(default)]
        split_slab_mean: f64,
        split_slab_variance: f64,
        variance_case: VarianceCaseConfig,
    },
    /// Finite-state independence-sampler demo.
    ImhDemo {
        weights: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        candidate_weights: Option<Vec<f64>>,
    },
}

pub const PRESET_NAMES: [&str; 6] = [
    "sim1",
    "sim2",
    "two-sample-case1",
    "two-sample-case2",
    "two-sample-case3",
    "imh-demo",
];

const TEN_OBS: [f64; 10] = [
    0.575, 1.808, 0.532, -0.168, 0.529, 0.888, -1.368, -0.512, 2.667, 0.874,
];

const GROUP1: [f64; 4] = [0.2, 1.1, -0.3, 0.8];
const GROUP2: [f64; 4] = [1.3, 0.9, 1.8, 0.4];

impl ModelConfig {
    /// Built-in configurations; see [`PRESET_NAMES`].
    ///
    /// `sim1` and `sim2` are the ten-observation one-sample problem with
    /// even prior odds, slab variance 100, and inverse-gamma shape 1; they
    /// differ only in the rate (0.05 vs 1). The two-sample presets share a
    /// 4+4 synthetic dataset and differ in variance treatment. `imh-demo`
    /// is a five-state chain with a uniform candidate.
    pub fn preset(name: &str) -> Result<Self> {
        let two_sample = |variance_case| ModelConfig::TwoSample {
            group1: GROUP1.to_vec(),
            group2: GROUP2.to_vec(),
            tied_weight: 0.5,
            tied_slab_mean: 0.0,
            tied_slab_variance: 4.0,
            split_slab_mean: 0.0,
            split_slab_variance: 4.0,
            variance_case,
        };
        Ok(match name {
            "sim1" | "sim2" => ModelConfig::SingleMean {
                data: TEN_OBS.to_vec(),
                null_weight: 0.5,
                null_mean: 0.0,
                slab_mean: 0.0,
                slab_variance: 100.0,
                variance_prior: IgConfig {
                    shape: 1.0,
                    rate: if name == "sim1" { 0.05 } else { 1.0 },
                },
            },
            "two-sample-case1" => two_sample(VarianceCaseConfig::Known { v1: 1.0, v2: 4.0 }),
            "two-sample-case2" => two_sample(VarianceCaseConfig::Common {
                shape: 2.0,
                rate: 2.0,
            }),
            "two-sample-case3" => two_sample(VarianceCaseConfig::Separate {
                group1: IgConfig {
                    shape: 2.0,
                    rate: 2.0,
                },
                group2: IgConfig {
                    shape: 2.0,
                    rate: 2.0,
                },
            }),
            "imh-demo" => ModelConfig::ImhDemo {
                weights: vec![1.0, 2.0, 3.0, 4.0, 5.0],
                candidate_weights: None,
            },
            other => {
                return Err(Error::Config(format!(
                    "unknown preset '{other}'; available: {}",
                    PRESET_NAMES.join(", ")
                )))
            }
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config parse: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Validate and construct the runnable model.
    pub fn build(&self) -> Result<BuiltModel> {
        Ok(match self {
            ModelConfig::SingleMean {
                data,
                null_weight,
                null_mean,
                slab_mean,
                slab_variance,
                variance_prior,
            } => {
                let slab = NormalParams::new(*slab_mean, *slab_variance)?;
                let prior = AtomMixturePrior::new(*null_weight, *null_mean, slab)?;
                BuiltModel::SingleMean(SingleMeanModel::new(data, prior, variance_prior.build()?)?)
            }
            ModelConfig::SingleMeanKnownVariance {
                data,
                null_weight,
                null_mean,
                slab_mean,
                slab_variance,
                variance,
            } => {
                let slab = NormalParams::new(*slab_mean, *slab_variance)?;
                let prior = AtomMixturePrior::new(*null_weight, *null_mean, slab)?;
                BuiltModel::SingleMeanKnownVar(SingleMeanKnownVariance::new(
                    data, prior, *variance,
                )?)
            }
            ModelConfig::TwoSample {
                group1,
                group2,
                tied_weight,
                tied_slab_mean,
                tied_slab_variance,
                split_slab_mean,
                split_slab_variance,
                variance_case,
            } => BuiltModel::TwoSample(TwoSampleModel::new(
                group1,
                group2,
                *tied_weight,
                NormalParams::new(*tied_slab_mean, *tied_slab_variance)?,
                NormalParams::new(*split_slab_mean, *split_slab_variance)?,
                variance_case.build()?,
            )?),
            ModelConfig::ImhDemo {
                weights,
                candidate_weights,
            } => BuiltModel::Discrete(WeightedDiscreteTarget::new(
                weights,
                candidate_weights.as_deref(),
            )?),
        })
    }
}
