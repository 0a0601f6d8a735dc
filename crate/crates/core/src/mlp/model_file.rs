use std::path::Path;

use serde::{Deserialize, Serialize};

use super::network::{Activation, Network};
use super::train::Algorithm;
use super::{featurize, FeatureVector, INPUTS};
use crate::error::{Error, Result};
use crate::model::{ProjectSpec, TransactionPolicy};

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Per-feature input maxima and a global target maximum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub input_max: [f64; INPUTS],
    pub target_max: f64,
}

impl Normalizer {
    /// Features that never occur in training keep a divisor of 1.
    pub fn fit<'a>(features: impl Iterator<Item = &'a FeatureVector>, targets: impl Iterator<Item = f64>) -> Self {
        let mut input_max = [0.0_f64; INPUTS];
        for f in features {
            for (m, v) in input_max.iter_mut().zip(f.to_array()) {
                *m = m.max(v);
            }
        }
        for m in &mut input_max {
            if *m == 0.0 {
                *m = 1.0;
            }
        }
        let target_max = targets.fold(0.0_f64, f64::max);
        Self {
            input_max,
            target_max: if target_max > 0.0 { target_max } else { 1.0 },
        }
    }

    pub fn normalize_input(&self, f: &FeatureVector) -> [f64; INPUTS] {
        let mut x = f.to_array();
        for (v, m) in x.iter_mut().zip(&self.input_max) {
            *v /= m;
        }
        x
    }

    pub fn normalize_target(&self, t: f64) -> f64 {
        t / self.target_max
    }

    pub fn denormalize_target(&self, y: f64) -> f64 {
        y * self.target_max
    }

    fn check(&self) -> Result<()> {
        if self
            .input_max
            .iter()
            .chain([&self.target_max])
            .any(|m| !(m.is_finite() && *m > 0.0))
        {
            return Err(Error::invalid(
                "",
                "normalization",
                "bounds must be positive and finite",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub algorithm: Algorithm,
    pub epochs: usize,
    pub final_sse: f64,
    pub samples: usize,
}

/// A trained network together with everything needed to use it.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub network: Network,
    pub normalizer: Normalizer,
    /// Extension weight the features were counted with.
    pub extension_weight: f64,
    pub rng_seed: u64,
    pub training: TrainingMeta,
}

impl TrainedModel {
    pub fn policy(&self) -> Result<TransactionPolicy> {
        TransactionPolicy::new(self.extension_weight)
    }

    /// Predicted UUCP.
    pub fn predict(&self, features: &FeatureVector) -> Result<f64> {
        let y = self.network.forward(&self.normalizer.normalize_input(features))?;
        Ok(self.normalizer.denormalize_target(y))
    }

    pub fn predict_project(&self, project: &ProjectSpec) -> Result<f64> {
        self.predict(&featurize(project, self.policy()?)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&ModelFile::from(self)).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text).map_err(Error::from_json)?;
        file.try_into()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Serialize, Deserialize)]
struct Topology {
    inputs: usize,
    hidden: usize,
    outputs: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum OutputActivation {
    Identity,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    topology: Topology,
    hidden_activation: Activation,
    output_activation: OutputActivation,
    hidden_weights: Vec<Vec<f64>>,
    hidden_biases: Vec<f64>,
    output_weights: Vec<f64>,
    output_bias: f64,
    normalization: Normalizer,
    extension_weight: f64,
    rng_seed: u64,
    training: TrainingMeta,
}

impl From<&TrainedModel> for ModelFile {
    fn from(m: &TrainedModel) -> Self {
        let net = &m.network;
        Self {
            format_version: MODEL_FORMAT_VERSION,
            topology: Topology {
                inputs: net.inputs(),
                hidden: net.hidden(),
                outputs: 1,
            },
            hidden_activation: net.activation(),
            output_activation: OutputActivation::Identity,
            hidden_weights: (0..net.hidden()).map(|j| net.hidden_weights(j).to_vec()).collect(),
            hidden_biases: net.hidden_biases().to_vec(),
            output_weights: net.output_weights().to_vec(),
            output_bias: net.output_bias(),
            normalization: m.normalizer.clone(),
            extension_weight: m.extension_weight,
            rng_seed: m.rng_seed,
            training: m.training.clone(),
        }
    }
}

impl TryFrom<ModelFile> for TrainedModel {
    type Error = Error;

    fn try_from(f: ModelFile) -> Result<Self> {
        if f.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::invalid(
                "",
                "format_version",
                format!("unsupported model format {}", f.format_version),
            ));
        }
        let Topology {
            inputs,
            hidden,
            outputs,
        } = f.topology;
        if inputs != INPUTS || outputs != 1 {
            return Err(Error::invalid(
                "",
                "topology",
                format!("expected {INPUTS} inputs and 1 output, got {inputs} and {outputs}"),
            ));
        }
        if f.hidden_weights.len() != hidden
            || f.hidden_weights.iter().any(|row| row.len() != inputs)
            || f.hidden_biases.len() != hidden
            || f.output_weights.len() != hidden
        {
            return Err(Error::invalid("", "parameters", "shapes do not match the topology"));
        }
        f.normalization.check()?;
        let mut params: Vec<f64> = f.hidden_weights.into_iter().flatten().collect();
        params.extend(f.hidden_biases);
        params.extend(f.output_weights);
        params.push(f.output_bias);
        let network = Network::from_params(inputs, hidden, f.hidden_activation, params)?;
        Ok(Self {
            network,
            normalizer: f.normalization,
            extension_weight: TransactionPolicy::new(f.extension_weight)?.extension_weight(),
            rng_seed: f.rng_seed,
            training: f.training,
        })
    }
}
