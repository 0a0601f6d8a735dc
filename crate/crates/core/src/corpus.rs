//! Project corpora: loading, validation, persistence, staging and splits.
//!
//! The on-disk format is JSON with a `format_version` field; see the
//! "Corpus file format" chapter of the guide for the field-by-field layout.

use std::collections::HashSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::karner::{environmental_factor, technical_factor, uucp_from_ucp, RatePolicy};
use crate::model::ProjectSpec;

pub const CORPUS_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CorpusFile {
    format_version: u32,
    #[serde(default)]
    description: String,
    projects: Vec<ProjectSpec>,
}

/// A validated set of projects with unique ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    description: String,
    projects: Vec<ProjectSpec>,
}

impl Corpus {
    /// Validates every project and id uniqueness, reporting all problems at once.
    pub fn new(description: impl Into<String>, projects: Vec<ProjectSpec>) -> Result<Self> {
        let mut problems: Vec<Violation> = Vec::new();
        let mut seen = HashSet::new();
        for p in &projects {
            if !seen.insert(p.id.as_str()) {
                problems.push(Violation::new(&p.id, "id", "duplicate project id"));
            }
            problems.extend(p.violations());
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        Ok(Self {
            description: description.into(),
            projects,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CorpusFile = serde_json::from_str(text).map_err(Error::from_json)?;
        if file.format_version != CORPUS_FORMAT_VERSION {
            return Err(Error::invalid(
                "",
                "format_version",
                format!("unsupported corpus format {}", file.format_version),
            ));
        }
        Self::new(file.description, file.projects)
    }

    pub fn to_json(&self) -> String {
        let file = CorpusFile {
            format_version: CORPUS_FORMAT_VERSION,
            description: self.description.clone(),
            projects: self.projects.clone(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("corpus serializes");
        s.push('\n');
        s
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn projects(&self) -> &[ProjectSpec] {
        &self.projects
    }

    pub fn len(&self) -> usize {
        self.projects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projects.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&ProjectSpec> {
        self.projects.iter().find(|p| p.id == id)
    }
}

/// Evaluation stage by share of `include`/`extend` use cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageLabel {
    /// Under 15%.
    Stage1,
    /// 15% to 25%, both edges included.
    Stage2,
    /// Over 25%.
    Stage3,
}

impl StageLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            StageLabel::Stage1 => "stage1",
            StageLabel::Stage2 => "stage2",
            StageLabel::Stage3 => "stage3",
        }
    }

    /// Stage for `related` of `total` use cases, compared in exact integers.
    pub fn from_counts(related: usize, total: usize) -> StageLabel {
        if 20 * related < 3 * total {
            StageLabel::Stage1
        } else if 4 * related <= total {
            StageLabel::Stage2
        } else {
            StageLabel::Stage3
        }
    }
}

impl std::fmt::Display for StageLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for StageLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "stage1" | "1" => Ok(StageLabel::Stage1),
            "stage2" | "2" => Ok(StageLabel::Stage2),
            "stage3" | "3" => Ok(StageLabel::Stage3),
            other => Err(Error::invalid("", "stage", format!("unknown stage `{other}`"))),
        }
    }
}

/// Share of use cases that are `include` or `extend`.
pub fn related_ratio(project: &ProjectSpec) -> f64 {
    if project.use_cases.is_empty() {
        return 0.0;
    }
    project.related_use_cases() as f64 / project.use_cases.len() as f64
}

pub fn stage_of(project: &ProjectSpec) -> StageLabel {
    StageLabel::from_counts(project.related_use_cases(), project.use_cases.len())
}

/// Actual size of a project in UUCP, and how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActualSize {
    pub uucp: f64,
    /// Present when the size was recovered from effort: (rate, UCP).
    pub from_effort: Option<(f64, f64)>,
}

/// Uses `actual_size_uucp` when present; otherwise converts effort to UCP
/// with the rate chosen by `rate_policy` and divides out TF and EF.
pub fn actual_uucp(project: &ProjectSpec, rate_policy: RatePolicy) -> Result<ActualSize> {
    if let Some(uucp) = project.actual_size_uucp {
        return Ok(ActualSize {
            uucp,
            from_effort: None,
        });
    }
    let Some(effort) = project.actual_effort_ph else {
        return Err(Error::invalid(
            &project.id,
            "actuals",
            "neither actual_size_uucp nor actual_effort_ph is given",
        ));
    };
    let rate = rate_policy.rate_for(&project.factors).map_err(|e| match e {
        Error::HighRisk { count } => Error::invalid(
            &project.id,
            "factors.environmental",
            format!("high-risk team ({count} ratings out of line); no effort rate applies"),
        ),
        other => other,
    })?;
    let ph = rate.person_hours();
    let ucp = effort / ph;
    let tf = technical_factor(&project.factors);
    let ef = environmental_factor(&project.factors);
    let uucp = uucp_from_ucp(ucp, tf, ef)?;
    log::debug!(
        "project `{}`: {effort} ph / {ph} ph/UCP = {ucp} UCP; / (TF {tf} x EF {ef}) = {uucp} UUCP",
        project.id
    );
    Ok(ActualSize {
        uucp,
        from_effort: Some((ph, ucp)),
    })
}

/// Splits into (train, test), keeping corpus order on each side.
pub fn split_by_ids<S: AsRef<str>>(corpus: &Corpus, train_ids: &[S]) -> Result<(Vec<ProjectSpec>, Vec<ProjectSpec>)> {
    let wanted: HashSet<&str> = train_ids.iter().map(AsRef::as_ref).collect();
    let unknown: Vec<Violation> = train_ids
        .iter()
        .map(AsRef::as_ref)
        .filter(|id| corpus.get(id).is_none())
        .map(|id| Violation::new(id, "train_ids", "no such project in the corpus"))
        .collect();
    if !unknown.is_empty() {
        return Err(Error::Validation(unknown));
    }
    let (train, test): (Vec<_>, Vec<_>) = corpus
        .projects()
        .iter()
        .cloned()
        .partition(|p| wanted.contains(p.id.as_str()));
    if train.is_empty() || test.is_empty() {
        return Err(Error::invalid("", "split", "both sides of a split must be non-empty"));
    }
    Ok((train, test))
}

/// Random split with `round(fraction * n)` training projects.
pub fn split_fraction(corpus: &Corpus, fraction: f64, seed: u64) -> Result<(Vec<ProjectSpec>, Vec<ProjectSpec>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::invalid(
            "",
            "fraction",
            format!("must lie in (0, 1), got {fraction}"),
        ));
    }
    let n = corpus.len();
    let k = (fraction * n as f64).round() as usize;
    if k == 0 || k == n {
        return Err(Error::invalid(
            "",
            "split",
            format!("fraction {fraction} of {n} projects leaves one side empty"),
        ));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let chosen: Vec<&str> = order[..k].iter().map(|&i| corpus.projects[i].id.as_str()).collect();
    split_by_ids(corpus, &chosen)
}

/// One CSV row per project: counts, stage, factors and actuals.
pub fn summary_csv(corpus: &Corpus) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "project_id",
        "use_cases",
        "related_use_cases",
        "related_ratio",
        "stage",
        "actors",
        "tf",
        "ef",
        "actual_effort_ph",
        "actual_size_uucp",
    ])
    .map_err(csv_error)?;
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or_default();
    for p in corpus.projects() {
        w.write_record([
            p.id.clone(),
            p.use_cases.len().to_string(),
            p.related_use_cases().to_string(),
            format!("{:.2}", related_ratio(p)),
            stage_of(p).to_string(),
            p.actors.len().to_string(),
            format!("{:.2}", technical_factor(&p.factors)),
            format!("{:.2}", environmental_factor(&p.factors)),
            opt(p.actual_effort_ph),
            opt(p.actual_size_uucp),
        ])
        .map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}
