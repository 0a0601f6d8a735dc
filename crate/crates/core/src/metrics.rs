//! Estimation-accuracy statistics.
//!
//! MRE divides the absolute error by the actual value, MER by the
//! prediction. Signed errors are `actual - predicted` internally; published
//! comparison tables print `predicted - actual`, which
//! [`AccuracySummary::display_mean_error`] provides.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservationPair {
    pub project_id: String,
    pub actual: f64,
    pub predicted: f64,
}

impl ObservationPair {
    pub fn new(project_id: impl Into<String>, actual: f64, predicted: f64) -> Result<Self> {
        let pair = Self {
            project_id: project_id.into(),
            actual,
            predicted,
        };
        pair.check_positive("actual", actual)?;
        pair.check_positive("predicted", predicted)?;
        Ok(pair)
    }

    fn check_positive(&self, field: &str, v: f64) -> Result<()> {
        if v.is_finite() && v > 0.0 {
            Ok(())
        } else {
            Err(Error::invalid(
                &self.project_id,
                field,
                format!("must be positive, got {v}"),
            ))
        }
    }

    /// `actual - predicted`.
    pub fn error(&self) -> f64 {
        self.actual - self.predicted
    }
}

pub fn mre(o: &ObservationPair) -> Result<f64> {
    o.check_positive("actual", o.actual)?;
    Ok(o.error().abs() / o.actual)
}

pub fn mer(o: &ObservationPair) -> Result<f64> {
    o.check_positive("predicted", o.predicted)?;
    Ok(o.error().abs() / o.predicted)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccuracySummary {
    pub project_ids: Vec<String>,
    pub n: usize,
    pub mmre: f64,
    pub mmer: f64,
    /// Mean of `actual - predicted`.
    pub mean_error: f64,
    /// Sample standard deviation of the signed errors; `None` for one pair.
    pub sd: Option<f64>,
}

impl AccuracySummary {
    /// Mean of `predicted - actual`.
    pub fn display_mean_error(&self) -> f64 {
        -self.mean_error
    }
}

pub fn summarize(pairs: &[ObservationPair]) -> Result<AccuracySummary> {
    if pairs.is_empty() {
        return Err(Error::invalid("", "pairs", "cannot summarize an empty set"));
    }
    let n = pairs.len();
    let count = n as f64;
    let mut mmre = 0.0;
    let mut mmer = 0.0;
    for p in pairs {
        mmre += mre(p)?;
        mmer += mer(p)?;
    }
    let mean_error = pairs.iter().map(ObservationPair::error).sum::<f64>() / count;
    let sd = (n > 1).then(|| {
        let ss: f64 = pairs.iter().map(|p| (p.error() - mean_error).powi(2)).sum();
        (ss / (count - 1.0)).sqrt()
    });
    Ok(AccuracySummary {
        project_ids: pairs.iter().map(|p| p.project_id.clone()).collect(),
        n,
        mmre: mmre / count,
        mmer: mmer / count,
        mean_error,
        sd,
    })
}

/// Drop in MMRE and MMER from `base` to `candidate`, in percentage points.
/// Positive means the candidate is more accurate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Improvement {
    pub mmre_points: f64,
    pub mmer_points: f64,
}

pub fn improvement(base: &AccuracySummary, candidate: &AccuracySummary) -> Result<Improvement> {
    let mut a = base.project_ids.clone();
    let mut b = candidate.project_ids.clone();
    a.sort();
    b.sort();
    if a != b {
        return Err(Error::invalid(
            "",
            "improvement",
            "summaries cover different project sets",
        ));
    }
    Ok(Improvement {
        mmre_points: 100.0 * (base.mmre - candidate.mmre),
        mmer_points: 100.0 * (base.mmer - candidate.mmer),
    })
}
