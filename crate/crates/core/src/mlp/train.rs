use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::model_file::{Normalizer, TrainedModel, TrainingMeta};
use super::network::{Activation, Network, Sample};
use super::{FeatureVector, DEFAULT_HIDDEN, HIDDEN_RANGE, INPUTS};
use crate::error::{ConvergenceFailure, Error, Result};
use crate::model::TransactionPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    #[default]
    LevenbergMarquardt,
    GradientBackprop,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::LevenbergMarquardt => "levenberg_marquardt",
            Algorithm::GradientBackprop => "gradient_backprop",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub algorithm: Algorithm,
    pub hidden: usize,
    pub activation: Activation,
    pub max_epochs: usize,
    /// Stop once the normalized SSE falls to this value.
    pub target_sse: f64,
    /// Stop once every gradient component is below this magnitude.
    pub min_gradient: f64,
    pub lm_damping_init: f64,
    pub lm_damping_factor: f64,
    pub lm_damping_max: f64,
    pub learning_rate: f64,
    pub rng_seed: u64,
    /// Fixed scaling bounds; fitted from the training data when `None`.
    pub normalization: Option<Normalizer>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::LevenbergMarquardt,
            hidden: DEFAULT_HIDDEN,
            activation: Activation::Tanh,
            max_epochs: 500,
            target_sse: 1e-8,
            min_gradient: 1e-12,
            lm_damping_init: 1e-3,
            lm_damping_factor: 10.0,
            lm_damping_max: 1e10,
            learning_rate: 0.01,
            rng_seed: 42,
            normalization: None,
        }
    }
}

impl TrainConfig {
    fn check(&self) -> Result<()> {
        let positive = [
            ("lm_damping_init", self.lm_damping_init),
            ("lm_damping_max", self.lm_damping_max),
            ("learning_rate", self.learning_rate),
        ];
        for (field, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid("", field, format!("must be positive, got {v}")));
            }
        }
        if !(self.lm_damping_factor.is_finite() && self.lm_damping_factor > 1.0) {
            return Err(Error::invalid("", "lm_damping_factor", "must exceed 1"));
        }
        if !(self.target_sse >= 0.0 && self.min_gradient >= 0.0) {
            return Err(Error::invalid(
                "",
                "target_sse",
                "stopping thresholds must be non-negative",
            ));
        }
        if self.max_epochs == 0 {
            return Err(Error::invalid("", "max_epochs", "must be at least 1"));
        }
        if !HIDDEN_RANGE.contains(&self.hidden) {
            return Err(Error::invalid(
                "",
                "hidden",
                format!("hidden width must lie in {HIDDEN_RANGE:?}, got {}", self.hidden),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    TargetReached,
    SmallGradient,
    MaxEpochs,
}

/// Normalized SSE before training and after every completed epoch.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainingHistory {
    pub sse: Vec<f64>,
    /// Damping in effect after each epoch (LM only).
    pub damping: Vec<f64>,
    pub stop: Option<StopReason>,
}

impl TrainingHistory {
    pub fn epochs(&self) -> usize {
        self.sse.len().saturating_sub(1)
    }

    pub fn best_sse(&self) -> f64 {
        self.sse.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn final_sse(&self) -> f64 {
        self.sse.last().copied().unwrap_or(f64::INFINITY)
    }
}

/// Trains `net` in place on already-normalized samples.
pub fn train_network(net: &mut Network, samples: &[Sample], cfg: &TrainConfig) -> Result<TrainingHistory> {
    cfg.check()?;
    if samples.is_empty() {
        return Err(Error::invalid("", "data", "no training samples"));
    }
    match cfg.algorithm {
        Algorithm::LevenbergMarquardt => levenberg_marquardt(net, samples, cfg),
        Algorithm::GradientBackprop => gradient_descent(net, samples, cfg),
    }
}

fn levenberg_marquardt(net: &mut Network, samples: &[Sample], cfg: &TrainConfig) -> Result<TrainingHistory> {
    let n_params = net.params().len();
    let mut history = TrainingHistory::default();
    let mut mu = cfg.lm_damping_init;
    let mut sse = net.sse(samples);
    history.sse.push(sse);
    history.damping.push(mu);

    let mut jacobian = DMatrix::<f64>::zeros(samples.len(), n_params);
    let mut residuals = DVector::<f64>::zeros(samples.len());
    let mut row = vec![0.0; n_params];

    for _ in 0..cfg.max_epochs {
        if sse <= cfg.target_sse {
            history.stop = Some(StopReason::TargetReached);
            return Ok(history);
        }
        for (k, s) in samples.iter().enumerate() {
            residuals[k] = net.output_and_jacobian(&s.input, &mut row) - s.target;
            for (p, d) in row.iter().enumerate() {
                jacobian[(k, p)] = *d;
            }
        }
        let gradient = jacobian.tr_mul(&residuals);
        if gradient.amax() < cfg.min_gradient {
            history.stop = Some(StopReason::SmallGradient);
            return Ok(history);
        }
        let normal = jacobian.tr_mul(&jacobian);

        loop {
            let mut damped = normal.clone();
            for p in 0..n_params {
                damped[(p, p)] += mu;
            }
            let accepted = match damped.cholesky() {
                Some(chol) => {
                    let step = chol.solve(&gradient);
                    let mut trial = net.clone();
                    for (p, d) in trial.params_mut().iter_mut().zip(step.iter()) {
                        *p -= d;
                    }
                    let trial_sse = trial.sse(samples);
                    if trial_sse.is_finite() && trial_sse < sse {
                        *net = trial;
                        sse = trial_sse;
                        true
                    } else {
                        false
                    }
                }
                None => false,
            };
            if accepted {
                mu = (mu / cfg.lm_damping_factor).max(f64::MIN_POSITIVE);
                break;
            }
            mu *= cfg.lm_damping_factor;
            if mu > cfg.lm_damping_max {
                return Err(Error::Convergence(Box::new(ConvergenceFailure {
                    best: net.clone(),
                    history,
                    damping: mu,
                })));
            }
        }
        history.sse.push(sse);
        history.damping.push(mu);
    }
    history.stop = Some(if sse <= cfg.target_sse {
        StopReason::TargetReached
    } else {
        StopReason::MaxEpochs
    });
    Ok(history)
}

fn gradient_descent(net: &mut Network, samples: &[Sample], cfg: &TrainConfig) -> Result<TrainingHistory> {
    let mut history = TrainingHistory::default();
    let mut sse = net.sse(samples);
    history.sse.push(sse);
    for _ in 0..cfg.max_epochs {
        if sse <= cfg.target_sse {
            history.stop = Some(StopReason::TargetReached);
            return Ok(history);
        }
        let grad = net.sse_gradient(samples);
        if grad.iter().all(|g| g.abs() < cfg.min_gradient) {
            history.stop = Some(StopReason::SmallGradient);
            return Ok(history);
        }
        for (p, g) in net.params_mut().iter_mut().zip(&grad) {
            *p -= cfg.learning_rate * g;
        }
        sse = net.sse(samples);
        if !sse.is_finite() {
            return Err(Error::Numeric(format!(
                "SSE diverged to {sse}; lower the learning rate"
            )));
        }
        history.sse.push(sse);
    }
    history.stop = Some(StopReason::MaxEpochs);
    Ok(history)
}

/// Fits a size model to `(features, UUCP)` pairs.
pub fn train(
    data: &[(FeatureVector, f64)],
    policy: TransactionPolicy,
    cfg: &TrainConfig,
) -> Result<(TrainedModel, TrainingHistory)> {
    if data.len() < 2 {
        return Err(Error::invalid(
            "",
            "data",
            format!("need at least 2 samples, got {}", data.len()),
        ));
    }
    if let Some((i, (_, t))) = data.iter().enumerate().find(|(_, (_, t))| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::invalid(
            "",
            format!("data[{i}].target"),
            format!("must be positive, got {t}"),
        ));
    }
    let normalizer = match &cfg.normalization {
        Some(n) => n.clone(),
        None => Normalizer::fit(data.iter().map(|(f, _)| f), data.iter().map(|(_, t)| *t)),
    };
    let samples: Vec<Sample> = data
        .iter()
        .map(|(f, t)| Sample {
            input: normalizer.normalize_input(f).to_vec(),
            target: normalizer.normalize_target(*t),
        })
        .collect();
    let mut network = Network::random(INPUTS, cfg.hidden, cfg.activation, cfg.rng_seed);
    let history = train_network(&mut network, &samples, cfg)?;
    let meta = TrainingMeta {
        algorithm: cfg.algorithm,
        epochs: history.epochs(),
        final_sse: history.final_sse(),
        samples: data.len(),
    };
    let model = TrainedModel {
        network,
        normalizer,
        extension_weight: policy.extension_weight(),
        rng_seed: cfg.rng_seed,
        training: meta,
    };
    Ok((model, history))
}
