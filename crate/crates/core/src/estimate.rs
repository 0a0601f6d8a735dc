use crate::error::Result;
use crate::fuzzy::AdjustedWeightTable;
use crate::karner::{self, ModelTag, RatePolicy, SizeEstimate};
use crate::mlp::TrainedModel;
use crate::model::{ProjectSpec, TransactionPolicy};

/// Which sizing model produces the UUCP.
#[derive(Debug, Clone, Copy)]
pub enum SizingModel<'a> {
    Karner,
    Fuzzy(&'a AdjustedWeightTable),
    /// Features are counted with the extension weight stored in the model.
    Mlp(&'a TrainedModel),
}

impl SizingModel<'_> {
    pub fn tag(&self) -> ModelTag {
        match self {
            SizingModel::Karner => ModelTag::Karner,
            SizingModel::Fuzzy(_) => ModelTag::Fuzzy,
            SizingModel::Mlp(_) => ModelTag::Mlp,
        }
    }

    pub fn uucp(&self, project: &ProjectSpec, policy: TransactionPolicy) -> Result<f64> {
        match self {
            SizingModel::Karner => karner::uucp(project, policy),
            SizingModel::Fuzzy(table) => table.uucp(project, policy),
            SizingModel::Mlp(model) => model.predict_project(project),
        }
    }
}

pub fn estimate_project(
    project: &ProjectSpec,
    model: SizingModel<'_>,
    policy: TransactionPolicy,
    rate_policy: RatePolicy,
) -> Result<SizeEstimate> {
    let uucp = model.uucp(project, policy)?;
    Ok(SizeEstimate::from_uucp(
        model.tag(),
        uucp,
        &project.factors,
        rate_policy,
    ))
}
