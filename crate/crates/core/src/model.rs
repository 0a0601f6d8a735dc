//! Projects, use cases, actors and factor ratings, plus transaction counting.
//!
//! A use case's size is the number of transactions in its scenario. The
//! main success path always counts in full; extension steps are scaled by a
//! [`TransactionPolicy`] so that discounted counting can be compared with
//! plain summation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};

/// Largest transaction level the weight tables know about.
pub const MAX_LEVEL: u8 = 10;

pub const TECHNICAL_FACTORS: usize = 13;
pub const ENVIRONMENTAL_FACTORS: usize = 8;
pub const MAX_RATING: u8 = 5;

/// How extension-part transactions are weighted relative to main-path ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransactionPolicy {
    extension_weight: f64,
}

impl TransactionPolicy {
    /// Every extension step counts as a full transaction.
    pub const FULL: TransactionPolicy = TransactionPolicy { extension_weight: 1.0 };
    /// Extension steps count for 30% of a main-path transaction.
    pub const DISCOUNTED: TransactionPolicy = TransactionPolicy { extension_weight: 0.3 };

    pub fn new(extension_weight: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&extension_weight) {
            return Err(Error::invalid(
                "",
                "extension_weight",
                format!("must lie in [0, 1], got {extension_weight}"),
            ));
        }
        Ok(Self { extension_weight })
    }

    pub fn extension_weight(&self) -> f64 {
        self.extension_weight
    }
}

impl Default for TransactionPolicy {
    fn default() -> Self {
        Self::FULL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub main_steps: u32,
    pub extension_steps: u32,
}

/// Where a use case's transaction count comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransactionSource {
    /// A count supplied directly by the estimator.
    Transactions(u32),
    Scenario(Scenario),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    #[default]
    Base,
    Include,
    Extend,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UseCaseSpec {
    pub name: String,
    pub source: TransactionSource,
    #[serde(default)]
    pub relation: Relation,
}

impl UseCaseSpec {
    pub fn direct(name: impl Into<String>, transactions: u32) -> Self {
        Self {
            name: name.into(),
            source: TransactionSource::Transactions(transactions),
            relation: Relation::Base,
        }
    }

    pub fn scenario(name: impl Into<String>, main_steps: u32, extension_steps: u32) -> Self {
        Self {
            name: name.into(),
            source: TransactionSource::Scenario(Scenario {
                main_steps,
                extension_steps,
            }),
            relation: Relation::Base,
        }
    }

    pub fn with_relation(mut self, relation: Relation) -> Self {
        self.relation = relation;
        self
    }

    fn problem(&self) -> Option<&'static str> {
        match self.source {
            TransactionSource::Transactions(0) => Some("direct transaction count must be at least 1"),
            TransactionSource::Scenario(Scenario { main_steps: 0, .. }) => {
                Some("main success scenario must contain at least one transaction")
            }
            _ => None,
        }
    }
}

/// Actor complexity class. Simple actors are system interfaces, average
/// ones are interactive or protocol-driven, complex ones use a GUI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActorKind {
    Simple,
    Average,
    Complex,
}

impl ActorKind {
    pub const ALL: [ActorKind; 3] = [ActorKind::Simple, ActorKind::Average, ActorKind::Complex];

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActorSpec {
    pub name: String,
    pub kind: ActorKind,
}

impl ActorSpec {
    pub fn new(name: impl Into<String>, kind: ActorKind) -> Self {
        Self {
            name: name.into(),
            kind,
        }
    }
}

/// Technical (13) and environmental (8) ratings, each on the 0..=5 scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorRatings {
    pub technical: [u8; TECHNICAL_FACTORS],
    pub environmental: [u8; ENVIRONMENTAL_FACTORS],
}

impl FactorRatings {
    /// Every factor rated `value`.
    pub fn uniform(value: u8) -> Self {
        Self {
            technical: [value; TECHNICAL_FACTORS],
            environmental: [value; ENVIRONMENTAL_FACTORS],
        }
    }

    pub fn violations(&self, project: &str) -> Vec<Violation> {
        let technical = self.technical.iter().enumerate().map(|(i, r)| ("technical", i, *r));
        let environmental = self
            .environmental
            .iter()
            .enumerate()
            .map(|(i, r)| ("environmental", i, *r));
        technical
            .chain(environmental)
            .filter(|(_, _, r)| *r > MAX_RATING)
            .map(|(group, i, r)| {
                Violation::new(
                    project,
                    format!("factors.{group}.F{}", i + 1),
                    format!("rating {r} is outside 0..=5"),
                )
            })
            .collect()
    }
}

impl Default for FactorRatings {
    fn default() -> Self {
        Self::uniform(3)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectSpec {
    pub id: String,
    pub use_cases: Vec<UseCaseSpec>,
    pub actors: Vec<ActorSpec>,
    #[serde(default)]
    pub factors: FactorRatings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actual_effort_ph: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actual_size_uucp: Option<f64>,
}

impl ProjectSpec {
    pub fn new(id: impl Into<String>, use_cases: Vec<UseCaseSpec>, actors: Vec<ActorSpec>) -> Self {
        Self {
            id: id.into(),
            use_cases,
            actors,
            factors: FactorRatings::default(),
            actual_effort_ph: None,
            actual_size_uucp: None,
        }
    }

    /// Every broken invariant in this project; empty when valid.
    pub fn violations(&self) -> Vec<Violation> {
        let id = self.id.as_str();
        let mut out = Vec::new();
        if id.trim().is_empty() {
            out.push(Violation::new(id, "id", "must not be empty"));
        }
        if self.use_cases.is_empty() {
            out.push(Violation::new(id, "use_cases", "at least one use case is required"));
        }
        if self.actors.is_empty() {
            out.push(Violation::new(id, "actors", "at least one actor is required"));
        }
        for (i, uc) in self.use_cases.iter().enumerate() {
            if let Some(reason) = uc.problem() {
                out.push(Violation::new(id, format!("use_cases[{i}] `{}`", uc.name), reason));
            }
        }
        out.extend(self.factors.violations(id));
        for (field, value) in [
            ("actual_effort_ph", self.actual_effort_ph),
            ("actual_size_uucp", self.actual_size_uucp),
        ] {
            if let Some(v) = value {
                if !(v.is_finite() && v > 0.0) {
                    out.push(Violation::new(id, field, format!("must be a positive number, got {v}")));
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(v))
        }
    }

    /// Count of use cases related to others by `include` or `extend`.
    pub fn related_use_cases(&self) -> usize {
        self.use_cases.iter().filter(|u| u.relation != Relation::Base).count()
    }
}

/// Raw (possibly fractional) transaction count of a use case.
pub fn count_transactions(uc: &UseCaseSpec, policy: TransactionPolicy) -> Result<f64> {
    if let Some(reason) = uc.problem() {
        return Err(Error::invalid("", format!("use case `{}`", uc.name), reason));
    }
    Ok(match uc.source {
        TransactionSource::Transactions(n) => f64::from(n),
        TransactionSource::Scenario(s) => {
            f64::from(s.main_steps) + policy.extension_weight * f64::from(s.extension_steps)
        }
    })
}

/// Integer transaction level used for weight lookup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveTransactions {
    pub level: u8,
    /// The count before rounding and clamping.
    pub raw: f64,
}

impl EffectiveTransactions {
    pub fn is_clamped(&self) -> bool {
        self.raw.round() > f64::from(MAX_LEVEL)
    }
}

/// Rounds half away from zero, then clamps into `1..=10`.
pub fn effective_transactions(uc: &UseCaseSpec, policy: TransactionPolicy) -> Result<EffectiveTransactions> {
    let raw = count_transactions(uc, policy)?;
    let rounded = raw.round();
    if rounded > f64::from(MAX_LEVEL) {
        log::warn!("use case `{}` has {raw} transactions; clamped to {MAX_LEVEL}", uc.name);
    }
    let level = rounded.clamp(1.0, f64::from(MAX_LEVEL)) as u8;
    Ok(EffectiveTransactions { level, raw })
}
