//! The classical Use Case Points computation.
//!
//! UUCP sums class weights over use cases and actors. Multiplying by the
//! technical factor (TF) and environmental factor (EF) gives UCP, and a
//! person-hours-per-UCP rate turns that into effort.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    effective_transactions, ActorKind, FactorRatings, ProjectSpec, TransactionPolicy, ENVIRONMENTAL_FACTORS,
    TECHNICAL_FACTORS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Complexity {
    Simple,
    Average,
    Complex,
}

/// Class weights and transaction bands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightTable {
    pub use_case_weights: [f64; 3],
    pub actor_weights: [f64; 3],
    /// Highest transaction count still classed simple, then average.
    pub band_upper: [u32; 2],
}

impl WeightTable {
    pub const KARNER: WeightTable = WeightTable {
        use_case_weights: [5.0, 10.0, 15.0],
        actor_weights: [1.0, 2.0, 3.0],
        band_upper: [3, 7],
    };

    pub fn classify(&self, transactions: u32) -> Result<Complexity> {
        match transactions {
            0 => Err(Error::invalid(
                "",
                "transactions",
                "a use case needs at least one transaction",
            )),
            n if n <= self.band_upper[0] => Ok(Complexity::Simple),
            n if n <= self.band_upper[1] => Ok(Complexity::Average),
            _ => Ok(Complexity::Complex),
        }
    }

    pub fn use_case_weight(&self, class: Complexity) -> f64 {
        self.use_case_weights[class as usize]
    }

    pub fn actor_weight(&self, kind: ActorKind) -> f64 {
        self.actor_weights[kind.index()]
    }
}

pub const TF_WEIGHTS: [f64; TECHNICAL_FACTORS] = [2.0, 1.0, 1.0, 1.0, 1.0, 0.5, 0.5, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0];
pub const EF_WEIGHTS: [f64; ENVIRONMENTAL_FACTORS] = [1.5, -1.0, 0.5, 0.5, 1.0, 1.0, -1.0, 2.0];
pub const TF_C1: f64 = 0.6;
pub const TF_C2: f64 = 0.01;
pub const EF_C1: f64 = 1.4;
pub const EF_C2: f64 = -0.03;

/// Band 1–3 simple, 4–7 average, 8 and up complex.
pub fn classify_use_case(transactions: u32) -> Result<Complexity> {
    WeightTable::KARNER.classify(transactions)
}

/// Karner weight of a use case with `transactions` effective transactions.
pub fn karner_weight(transactions: u32) -> Result<f64> {
    Ok(WeightTable::KARNER.use_case_weight(classify_use_case(transactions)?))
}

pub fn actor_weight_factor(project: &ProjectSpec) -> f64 {
    project
        .actors
        .iter()
        .map(|a| WeightTable::KARNER.actor_weight(a.kind))
        .sum()
}

/// Unadjusted use case points with Karner's three-band weights.
pub fn uucp(project: &ProjectSpec, policy: TransactionPolicy) -> Result<f64> {
    project.validate()?;
    let mut use_case_weight = 0.0;
    for uc in &project.use_cases {
        let level = effective_transactions(uc, policy)?.level;
        use_case_weight += karner_weight(u32::from(level))?;
    }
    Ok(use_case_weight + actor_weight_factor(project))
}

fn weighted_sum(ratings: &[u8], weights: &[f64]) -> f64 {
    ratings.iter().zip(weights).map(|(r, w)| f64::from(*r) * w).sum()
}

pub fn technical_factor(ratings: &FactorRatings) -> f64 {
    TF_C1 + TF_C2 * weighted_sum(&ratings.technical, &TF_WEIGHTS)
}

pub fn environmental_factor(ratings: &FactorRatings) -> f64 {
    EF_C1 + EF_C2 * weighted_sum(&ratings.environmental, &EF_WEIGHTS)
}

pub fn ucp(uucp: f64, tf: f64, ef: f64) -> f64 {
    uucp * tf * ef
}

/// Inverse of [`ucp`]: recovers UUCP from an adjusted size.
pub fn uucp_from_ucp(ucp: f64, tf: f64, ef: f64) -> Result<f64> {
    let scale = tf * ef;
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::Numeric(format!("cannot invert UCP with TF x EF = {scale}")));
    }
    Ok(ucp / scale)
}

/// Person-hours per UCP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EffortRate {
    #[serde(rename = "20")]
    Twenty,
    #[serde(rename = "28")]
    TwentyEight,
}

impl EffortRate {
    pub fn person_hours(self) -> f64 {
        match self {
            EffortRate::Twenty => 20.0,
            EffortRate::TwentyEight => 28.0,
        }
    }
}

/// Number of environmental ratings out of line: F1–F6 below 3 plus F7–F8 above 3.
pub fn schneider_count(ratings: &FactorRatings) -> u8 {
    let env = &ratings.environmental;
    let low = env[..6].iter().filter(|r| **r < 3).count();
    let high = env[6..].iter().filter(|r| **r > 3).count();
    (low + high) as u8
}

/// 20 ph/UCP for a count of 0–2, 28 for 3–4, a high-risk error from 5 up.
pub fn schneider_rate(ratings: &FactorRatings) -> Result<EffortRate> {
    match schneider_count(ratings) {
        0..=2 => Ok(EffortRate::Twenty),
        3 | 4 => Ok(EffortRate::TwentyEight),
        count => Err(Error::HighRisk { count }),
    }
}

/// How an effort rate is chosen for a project.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RatePolicy {
    /// Flat 20 ph/UCP.
    Karner,
    /// Schneider's rule. With `force`, high-risk projects get 28 instead of an error.
    #[default]
    Schneider,
    SchneiderForced,
}

impl RatePolicy {
    pub fn rate_for(self, ratings: &FactorRatings) -> Result<EffortRate> {
        match self {
            RatePolicy::Karner => Ok(EffortRate::Twenty),
            RatePolicy::Schneider => schneider_rate(ratings),
            RatePolicy::SchneiderForced => match schneider_rate(ratings) {
                Err(Error::HighRisk { count }) => {
                    log::warn!("high-risk team ({count} ratings out of line); forcing 28 ph/UCP");
                    Ok(EffortRate::TwentyEight)
                }
                other => other,
            },
        }
    }
}

pub fn effort(ucp: f64, rate: EffortRate) -> f64 {
    ucp * rate.person_hours()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelTag {
    Karner,
    Fuzzy,
    Mlp,
}

impl ModelTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelTag::Karner => "karner",
            ModelTag::Fuzzy => "fuzzy",
            ModelTag::Mlp => "mlp",
        }
    }
}

impl std::fmt::Display for ModelTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A sized project: UUCP, the two adjustment factors, UCP and (when a rate
/// applies) effort.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeEstimate {
    pub model: ModelTag,
    pub uucp: f64,
    pub tf: f64,
    pub ef: f64,
    pub ucp: f64,
    pub effort_ph: Option<f64>,
    pub rate: Option<EffortRate>,
}

impl SizeEstimate {
    /// Adjusts `uucp` by the project's factors and converts to effort under
    /// `rate_policy`. A high-risk team leaves effort empty rather than failing.
    pub fn from_uucp(model: ModelTag, uucp: f64, ratings: &FactorRatings, rate_policy: RatePolicy) -> Self {
        let tf = technical_factor(ratings);
        let ef = environmental_factor(ratings);
        let size = ucp(uucp, tf, ef);
        let rate = rate_policy.rate_for(ratings).ok();
        Self {
            model,
            uucp,
            tf,
            ef,
            ucp: size,
            effort_ph: rate.map(|r| effort(size, r)),
            rate,
        }
    }
}

/// Full Karner estimate for one project.
pub fn estimate(project: &ProjectSpec, policy: TransactionPolicy, rate_policy: RatePolicy) -> Result<SizeEstimate> {
    let size = uucp(project, policy)?;
    Ok(SizeEstimate::from_uucp(
        ModelTag::Karner,
        size,
        &project.factors,
        rate_policy,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ActorSpec, UseCaseSpec};

    fn project(transactions: &[u32], actors: &[ActorKind]) -> ProjectSpec {
        let ucs = transactions
            .iter()
            .enumerate()
            .map(|(i, n)| UseCaseSpec::direct(format!("uc{i}"), *n))
            .collect();
        let acts = actors
            .iter()
            .enumerate()
            .map(|(i, k)| ActorSpec::new(format!("a{i}"), *k))
            .collect();
        ProjectSpec::new("p", ucs, acts)
    }

    #[test]
    fn classification_bands() {
        assert_eq!(classify_use_case(3).unwrap(), Complexity::Simple);
        assert_eq!(classify_use_case(4).unwrap(), Complexity::Average);
        assert_eq!(classify_use_case(7).unwrap(), Complexity::Average);
        assert_eq!(classify_use_case(8).unwrap(), Complexity::Complex);
        assert_eq!(classify_use_case(20).unwrap(), Complexity::Complex);
        assert!(classify_use_case(0).is_err());
    }

    #[test]
    fn classify_is_monotone() {
        let mut prev = Complexity::Simple;
        for n in 1..200 {
            let c = classify_use_case(n).unwrap();
            assert!(c >= prev);
            prev = c;
        }
    }

    #[test]
    fn weights_strictly_increase() {
        let t = WeightTable::KARNER;
        assert!(t.use_case_weights.windows(2).all(|w| w[0] < w[1]));
        assert!(t.actor_weights.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn factor_weight_sums() {
        assert_eq!(TF_WEIGHTS.iter().sum::<f64>(), 14.0);
        assert_eq!(EF_WEIGHTS.iter().sum::<f64>(), 4.5);
    }

    #[test]
    fn uucp_examples() {
        let p = project(&[2], &[ActorKind::Simple]);
        assert_eq!(uucp(&p, TransactionPolicy::FULL).unwrap(), 6.0);
        let p = project(&[2, 5, 9], &[ActorKind::Average]);
        assert_eq!(uucp(&p, TransactionPolicy::FULL).unwrap(), 32.0);
    }

    #[test]
    fn three_versus_four_doubles_use_case_weight() {
        // Actors are only present to satisfy validation; subtract them out.
        let mut counts = vec![3; 10];
        counts.extend([4; 10]);
        let p = project(&counts, &[ActorKind::Simple]);
        assert_eq!(uucp(&p, TransactionPolicy::FULL).unwrap() - 1.0, 150.0);

        let threes = project(&[3; 12], &[ActorKind::Simple]);
        let fours = project(&[4; 12], &[ActorKind::Simple]);
        let w3 = uucp(&threes, TransactionPolicy::FULL).unwrap() - 1.0;
        let w4 = uucp(&fours, TransactionPolicy::FULL).unwrap() - 1.0;
        assert_eq!(w4, 2.0 * w3);
    }

    #[test]
    fn factor_examples() {
        // The weight sums (14 and 4.5) put all-3 ratings slightly off 1.
        assert!((technical_factor(&FactorRatings::uniform(3)) - 1.02).abs() < 1e-12);
        assert!((environmental_factor(&FactorRatings::uniform(3)) - 0.995).abs() < 1e-12);
        assert_eq!(technical_factor(&FactorRatings::uniform(0)), 0.6);
        assert_eq!(environmental_factor(&FactorRatings::uniform(0)), 1.4);
        assert!((technical_factor(&FactorRatings::uniform(5)) - 1.3).abs() < 1e-12);

        let mut r = FactorRatings::uniform(5);
        r.environmental[1] = 0;
        r.environmental[6] = 0;
        assert!((environmental_factor(&r) - 0.425).abs() < 1e-12);
    }

    #[test]
    fn ucp_examples() {
        assert_eq!(ucp(100.0, 1.0, 1.0), 100.0);
        assert!((ucp(100.0, 1.3, 1.0) - 130.0).abs() < 1e-9);
        assert!((ucp(100.0, 0.6, 1.4) - 84.0).abs() < 1e-9);
        assert!((uucp_from_ucp(84.0, 0.6, 1.4).unwrap() - 100.0).abs() < 1e-9);
        assert!(uucp_from_ucp(84.0, 0.0, 1.4).is_err());
    }

    #[test]
    fn schneider_examples() {
        assert_eq!(schneider_rate(&FactorRatings::uniform(3)).unwrap(), EffortRate::Twenty);

        let mut r = FactorRatings::uniform(3);
        r.environmental[..6].fill(2);
        match schneider_rate(&r) {
            Err(Error::HighRisk { count }) => assert_eq!(count, 6),
            other => panic!("expected high risk, got {other:?}"),
        }
        assert_eq!(
            RatePolicy::SchneiderForced.rate_for(&r).unwrap(),
            EffortRate::TwentyEight
        );

        let mut r = FactorRatings::uniform(3);
        r.environmental[..3].fill(2);
        assert_eq!(schneider_rate(&r).unwrap(), EffortRate::TwentyEight);
    }

    #[test]
    fn schneider_threshold_reading() {
        // Counts 0..=2 give 20, 3 and 4 give 28, 5 and up are high risk.
        for count in 0..=8usize {
            let mut r = FactorRatings::uniform(3);
            for slot in r.environmental.iter_mut().take(count.min(6)) {
                *slot = 1;
            }
            for slot in r.environmental.iter_mut().skip(6).take(count.saturating_sub(6)) {
                *slot = 4;
            }
            assert_eq!(schneider_count(&r) as usize, count);
            let got = schneider_rate(&r);
            match count {
                0..=2 => assert_eq!(got.unwrap(), EffortRate::Twenty),
                3 | 4 => assert_eq!(got.unwrap(), EffortRate::TwentyEight),
                _ => assert!(matches!(got, Err(Error::HighRisk { .. }))),
            }
        }
    }

    #[test]
    fn effort_examples() {
        assert_eq!(effort(1.0, EffortRate::Twenty), 20.0);
        assert_eq!(effort(0.5, EffortRate::Twenty), 10.0);
        assert!((effort(74.33, EffortRate::TwentyEight) - 2081.24).abs() < 1e-9);
    }

    #[test]
    fn minimal_estimate() {
        let p = project(&[2], &[ActorKind::Simple]);
        let e = estimate(&p, TransactionPolicy::FULL, RatePolicy::Schneider).unwrap();
        assert_eq!(e.uucp, 6.0);
        assert!((e.ucp - 6.0 * 1.02 * 0.995).abs() < 1e-12);
        assert_eq!(e.rate, Some(EffortRate::Twenty));
        assert!((e.effort_ph.unwrap() - 121.788).abs() < 1e-9);

        let mut flat = p.clone();
        flat.factors.technical = [0; 13];
        flat.factors.technical[0] = 20; // invalid on purpose
        assert!(estimate(&flat, TransactionPolicy::FULL, RatePolicy::Karner).is_err());
    }

    #[test]
    fn high_risk_estimate_omits_effort() {
        let mut p = project(&[2], &[ActorKind::Simple]);
        p.factors.environmental = [0, 0, 0, 0, 0, 3, 3, 3];
        let e = estimate(&p, TransactionPolicy::FULL, RatePolicy::Schneider).unwrap();
        assert_eq!(e.effort_ph, None);
        assert_eq!(e.rate, None);
    }
}
