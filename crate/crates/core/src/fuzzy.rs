//! Graduated use-case weights from a three-rule fuzzy system.
//!
//! Instead of three weight bands, each transaction level 1..=10 gets its
//! own weight. The level is fuzzified against three triangular sets peaked
//! at 2, 6 and 10 transactions; each set fires a rule whose consequent is a
//! triangle peaked at 5, 10 or 15; the clipped consequents are aggregated
//! and defuzzified by centroid.
//!
//! The shipped configuration lives in `config/fuzzy_default.json`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::karner::actor_weight_factor;
use crate::model::{effective_transactions, ProjectSpec, TransactionPolicy, MAX_LEVEL};

pub const DEFAULT_CONFIG_JSON: &str = include_str!("../config/fuzzy_default.json");

pub const MIN_WEIGHT: f64 = 5.0;
pub const MAX_WEIGHT: f64 = 15.0;

/// Triangle with feet at `a` and `c` and its peak at `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangularMf {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl TriangularMf {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let mf = Self { a, b, c };
        mf.check()?;
        Ok(mf)
    }

    fn check(&self) -> Result<()> {
        if !(self.a.is_finite() && self.b.is_finite() && self.c.is_finite()) || self.a > self.b || self.b > self.c {
            return Err(Error::invalid(
                "",
                "membership function",
                format!("need finite a <= b <= c, got ({}, {}, {})", self.a, self.b, self.c),
            ));
        }
        Ok(())
    }

    /// Degree of membership of `x`, in `[0, 1]`.
    pub fn membership(&self, x: f64) -> f64 {
        if x == self.b {
            1.0
        } else if x <= self.a || x >= self.c {
            0.0
        } else if x < self.b {
            (x - self.a) / (self.b - self.a)
        } else {
            (self.c - x) / (self.c - self.b)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Implication {
    Min,
    Product,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    Max,
    Sum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FuzzyRule {
    pub antecedent: usize,
    pub consequent: usize,
}

/// 2 transactions → 5, 6 → 10, 10 → 15.
pub const RULES: [FuzzyRule; 3] = [
    FuzzyRule {
        antecedent: 0,
        consequent: 0,
    },
    FuzzyRule {
        antecedent: 1,
        consequent: 1,
    },
    FuzzyRule {
        antecedent: 2,
        consequent: 2,
    },
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzyConfig {
    pub input_sets: [TriangularMf; 3],
    pub output_sets: [TriangularMf; 3],
    pub implication: Implication,
    pub aggregation: Aggregation,
    pub output_universe: [f64; 2],
    /// Number of evenly spaced samples used for the centroid.
    pub resolution: usize,
}

impl FuzzyConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: FuzzyConfig = serde_json::from_str(text).map_err(Error::from_json)?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fuzzy config serializes")
    }

    fn check(&self) -> Result<()> {
        for mf in self.input_sets.iter().chain(&self.output_sets) {
            mf.check()?;
        }
        let [lo, hi] = self.output_universe;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::invalid("", "output_universe", "need finite lo < hi"));
        }
        if self.resolution < 2 {
            return Err(Error::invalid("", "resolution", "need at least 2 samples"));
        }
        Ok(())
    }
}

impl Default for FuzzyConfig {
    fn default() -> Self {
        Self::from_json(DEFAULT_CONFIG_JSON).expect("shipped fuzzy config is valid")
    }
}

/// Mamdani-style inference over [`RULES`].
#[derive(Debug, Clone, Default)]
pub struct FuzzyEngine {
    config: FuzzyConfig,
}

impl FuzzyEngine {
    pub fn new(config: FuzzyConfig) -> Result<Self> {
        config.check()?;
        Ok(Self { config })
    }

    pub fn config(&self) -> &FuzzyConfig {
        &self.config
    }

    /// Firing strength of each rule at input `x`.
    pub fn fire(&self, x: f64) -> [f64; 3] {
        RULES.map(|r| self.config.input_sets[r.antecedent].membership(x))
    }

    /// Aggregated output membership sampled over the output universe.
    pub fn aggregate(&self, x: f64) -> Vec<(f64, f64)> {
        let strengths = self.fire(x);
        let [lo, hi] = self.config.output_universe;
        let n = self.config.resolution;
        (0..n)
            .map(|k| {
                let z = lo + (hi - lo) * k as f64 / (n - 1) as f64;
                let mut mu: f64 = 0.0;
                for (rule, s) in RULES.iter().zip(strengths) {
                    let m = self.config.output_sets[rule.consequent].membership(z);
                    let implied = match self.config.implication {
                        Implication::Min => m.min(s),
                        Implication::Product => m * s,
                    };
                    mu = match self.config.aggregation {
                        Aggregation::Max => mu.max(implied),
                        Aggregation::Sum => mu + implied,
                    };
                }
                (z, mu)
            })
            .collect()
    }

    /// Raw centroid of the aggregated output.
    pub fn infer(&self, x: f64) -> Result<f64> {
        let samples = self.aggregate(x);
        let (moment, area) = samples.iter().fold((0.0, 0.0), |(m, a), (z, mu)| (m + z * mu, a + mu));
        if area <= 0.0 {
            return Err(Error::Numeric(format!("no rule fires for input {x}")));
        }
        // One refinement pass around the first estimate removes the
        // summation rounding, so symmetric sets land exactly on their peak.
        let c = moment / area;
        let residual: f64 = samples.iter().map(|(z, mu)| (z - c) * mu).sum();
        Ok(c + residual / area)
    }

    /// Centroid clamped into the weight range `[5, 15]`.
    pub fn weight_at(&self, x: f64) -> Result<f64> {
        Ok(self.infer(x)?.clamp(MIN_WEIGHT, MAX_WEIGHT))
    }
}

/// Weights for transaction levels 1..=10.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdjustedWeightTable {
    weights: [f64; MAX_LEVEL as usize],
}

impl AdjustedWeightTable {
    pub fn from_engine(engine: &FuzzyEngine) -> Result<Self> {
        let mut weights = [0.0; MAX_LEVEL as usize];
        for (i, w) in weights.iter_mut().enumerate() {
            *w = engine.weight_at((i + 1) as f64)?;
        }
        // Edge-of-universe centroids drift; the extremes stay pinned.
        weights[0] = MIN_WEIGHT;
        weights[MAX_LEVEL as usize - 1] = MAX_WEIGHT;
        if let Some(i) = weights.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::invalid(
                "",
                "fuzzy config",
                format!("adjusted weights decrease between levels {} and {}", i + 1, i + 2),
            ));
        }
        Ok(Self { weights })
    }

    pub fn weight(&self, level: u8) -> Result<f64> {
        if !(1..=MAX_LEVEL).contains(&level) {
            return Err(Error::invalid(
                "",
                "transactions",
                format!("level {level} is outside 1..={MAX_LEVEL}"),
            ));
        }
        Ok(self.weights[usize::from(level) - 1])
    }

    pub fn weights(&self) -> &[f64; MAX_LEVEL as usize] {
        &self.weights
    }

    pub fn uucp(&self, project: &ProjectSpec, policy: TransactionPolicy) -> Result<f64> {
        project.validate()?;
        let mut total = 0.0;
        for uc in &project.use_cases {
            total += self.weight(effective_transactions(uc, policy)?.level)?;
        }
        Ok(total + actor_weight_factor(project))
    }
}

/// Table computed once from the shipped configuration.
pub fn default_table() -> &'static AdjustedWeightTable {
    static TABLE: OnceLock<AdjustedWeightTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        AdjustedWeightTable::from_engine(&FuzzyEngine::default()).expect("shipped fuzzy config is monotone")
    })
}

/// Graduated weight for a use case with `transactions` transactions (1..=10).
pub fn adjusted_weight(transactions: u8) -> Result<f64> {
    default_table().weight(transactions)
}

/// UUCP with fuzzy use-case weights and unchanged actor weights.
pub fn fuzzy_uucp(project: &ProjectSpec, policy: TransactionPolicy) -> Result<f64> {
    default_table().uucp(project, policy)
}
