//! Text and CSV renderings of estimates and accuracy comparisons.
//!
//! Numbers are printed with two decimals and no thousands separators.
//! Signed errors are printed as `estimate - actual`.

use std::fmt::Write as _;

use crate::corpus::{csv_error, StageLabel};
use crate::error::{Error, Result, Violation};
use crate::karner::{ModelTag, SizeEstimate};
use crate::metrics::{improvement, mer, mre, summarize, AccuracySummary, Improvement, ObservationPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Table,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRow {
    pub project_id: String,
    pub estimate: SizeEstimate,
}

/// Two decimals, without a sign on values that round to zero.
fn fixed2(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn opt2(v: Option<f64>) -> String {
    v.map(fixed2).unwrap_or_else(|| "-".into())
}

pub fn render_estimates(rows: &[EstimateRow], format: Format) -> Result<String> {
    let header = [
        "project_id",
        "model",
        "uucp",
        "tf",
        "ef",
        "ucp",
        "rate_ph_per_ucp",
        "effort_ph",
    ];
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let e = &r.estimate;
            vec![
                r.project_id.clone(),
                e.model.to_string(),
                fixed2(e.uucp),
                fixed2(e.tf),
                fixed2(e.ef),
                fixed2(e.ucp),
                e.rate
                    .map(|r| format!("{}", r.person_hours()))
                    .unwrap_or_else(|| "-".into()),
                opt2(e.effort_ph),
            ]
        })
        .collect();
    match format {
        Format::Csv => {
            let body: Vec<Vec<String>> = body
                .into_iter()
                .map(|row| {
                    row.into_iter()
                        .map(|c| if c == "-" { String::new() } else { c })
                        .collect()
                })
                .collect();
            write_csv(&header, &body)
        }
        Format::Table => Ok(aligned(&header, &body)),
    }
}

fn write_csv(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.write_record(row).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn aligned(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let line = |cells: Vec<&str>, out: &mut String| {
        let mut s = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i == 0 {
                let _ = write!(s, "{cell:<w$}");
            } else {
                let _ = write!(s, "  {cell:>w$}");
            }
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(header.to_vec(), &mut out);
    for row in rows {
        line(row.iter().map(String::as_str).collect(), &mut out);
    }
    out
}

/// One project's actual size and each model's estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub project_id: String,
    pub stage: Option<StageLabel>,
    pub actual: f64,
    /// Same order as the model list it is evaluated with.
    pub estimates: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationGroup {
    /// `all` or a stage name.
    pub label: String,
    pub records: Vec<EvalRecord>,
    pub summaries: Vec<AccuracySummary>,
    /// Each later model against the first; empty for a single model.
    pub improvements: Vec<Improvement>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub models: Vec<ModelTag>,
    pub groups: Vec<EvaluationGroup>,
}

pub fn evaluate(models: &[ModelTag], records: &[EvalRecord], by_stage: bool) -> Result<Evaluation> {
    if models.is_empty() {
        return Err(Error::invalid("", "models", "select at least one model"));
    }
    let mut problems = Vec::new();
    for r in records {
        if r.estimates.len() != models.len() {
            problems.push(Violation::new(
                &r.project_id,
                "estimates",
                format!("expected {} estimates, got {}", models.len(), r.estimates.len()),
            ));
        }
        if by_stage && r.stage.is_none() {
            problems.push(Violation::new(&r.project_id, "stage", "stage grouping needs a stage"));
        }
    }
    if !problems.is_empty() {
        return Err(Error::Validation(problems));
    }
    let mut groups = Vec::new();
    if by_stage {
        for stage in [StageLabel::Stage1, StageLabel::Stage2, StageLabel::Stage3] {
            let subset: Vec<EvalRecord> = records.iter().filter(|r| r.stage == Some(stage)).cloned().collect();
            if !subset.is_empty() {
                groups.push(group(stage.as_str(), models, subset)?);
            }
        }
    } else {
        groups.push(group("all", models, records.to_vec())?);
    }
    Ok(Evaluation {
        models: models.to_vec(),
        groups,
    })
}

fn group(label: &str, models: &[ModelTag], records: Vec<EvalRecord>) -> Result<EvaluationGroup> {
    let mut summaries = Vec::with_capacity(models.len());
    for m in 0..models.len() {
        let pairs = records
            .iter()
            .map(|r| ObservationPair::new(&r.project_id, r.actual, r.estimates[m]))
            .collect::<Result<Vec<_>>>()?;
        summaries.push(summarize(&pairs)?);
    }
    let improvements = summaries[1..]
        .iter()
        .map(|s| improvement(&summaries[0], s))
        .collect::<Result<Vec<_>>>()?;
    Ok(EvaluationGroup {
        label: label.to_string(),
        records,
        summaries,
        improvements,
    })
}

fn points(p: f64) -> String {
    let rounded = p.round();
    if rounded == 0.0 {
        "0%".into()
    } else {
        format!("{rounded:+.0}%")
    }
}

impl Evaluation {
    fn header(&self) -> Vec<String> {
        let mut h = vec!["project_id".to_string(), "actual".to_string()];
        for prefix in ["estimate", "mre", "mer", "error"] {
            h.extend(self.models.iter().map(|m| format!("{prefix}_{m}")));
        }
        h
    }

    fn rows(&self, g: &EvaluationGroup, blank: &str) -> Vec<Vec<String>> {
        let k = self.models.len();
        let mut rows = Vec::new();
        for r in &g.records {
            let mut row = vec![r.project_id.clone(), fixed2(r.actual)];
            row.extend(r.estimates.iter().map(|e| fixed2(*e)));
            let pairs: Vec<ObservationPair> = r
                .estimates
                .iter()
                .map(|e| ObservationPair {
                    project_id: r.project_id.clone(),
                    actual: r.actual,
                    predicted: *e,
                })
                .collect();
            row.extend(pairs.iter().map(|p| fixed2(mre(p).unwrap_or(f64::NAN))));
            row.extend(pairs.iter().map(|p| fixed2(mer(p).unwrap_or(f64::NAN))));
            row.extend(pairs.iter().map(|p| fixed2(-p.error())));
            rows.push(row);
        }
        let pad = |n: usize| vec![blank.to_string(); n];

        let mut mean = vec!["mean".to_string()];
        mean.extend(pad(1 + k));
        mean.extend(g.summaries.iter().map(|s| fixed2(s.mmre)));
        mean.extend(g.summaries.iter().map(|s| fixed2(s.mmer)));
        mean.extend(g.summaries.iter().map(|s| fixed2(s.display_mean_error())));
        rows.push(mean);

        let mut sd = vec!["sd".to_string()];
        sd.extend(pad(1 + 3 * k));
        sd.extend(g.summaries.iter().map(|s| opt2(s.sd)));
        rows.push(sd);

        for (m, imp) in self.models[1..].iter().zip(&g.improvements) {
            let mut row = vec![format!("improvement_{m}")];
            row.extend(pad(1 + k));
            let mut mre_cells = pad(k);
            mre_cells[0] = points(imp.mmre_points);
            let mut mer_cells = pad(k);
            mer_cells[0] = points(imp.mmer_points);
            row.extend(mre_cells);
            row.extend(mer_cells);
            row.extend(pad(k));
            rows.push(row);
        }
        rows
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => {
                let mut header = vec!["group".to_string()];
                header.extend(self.header());
                let mut rows = Vec::new();
                for g in &self.groups {
                    for row in self.rows(g, "") {
                        let mut r = vec![g.label.clone()];
                        r.extend(row);
                        rows.push(r);
                    }
                }
                let header: Vec<&str> = header.iter().map(String::as_str).collect();
                write_csv(&header, &rows)
            }
            Format::Table => {
                let header = self.header();
                let header: Vec<&str> = header.iter().map(String::as_str).collect();
                let mut out = String::new();
                for (i, g) in self.groups.iter().enumerate() {
                    if i > 0 {
                        out.push('\n');
                    }
                    let _ = writeln!(out, "== {} ({} projects) ==", g.label, g.records.len());
                    out.push_str(&aligned(&header, &self.rows(g, "")));
                }
                out.push_str("\nerror = estimate - actual; improvement = drop in MMRE / MMER, percentage points\n");
                Ok(out)
            }
        }
    }
}

/// Reads precomputed estimates: `project_id,[stage,]actual,<model>...`.
pub fn read_estimates_csv(text: &str) -> Result<(Vec<ModelTag>, Vec<EvalRecord>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(csv_parse_error)?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let id_col = col("project_id").ok_or_else(|| Error::invalid("", "header", "missing `project_id` column"))?;
    let actual_col = col("actual").ok_or_else(|| Error::invalid("", "header", "missing `actual` column"))?;
    let stage_col = col("stage");
    let mut models = Vec::new();
    let mut model_cols = Vec::new();
    for (i, h) in headers.iter().enumerate() {
        let tag = match h {
            "karner" => ModelTag::Karner,
            "fuzzy" => ModelTag::Fuzzy,
            "mlp" => ModelTag::Mlp,
            _ => continue,
        };
        models.push(tag);
        model_cols.push(i);
    }
    if models.is_empty() {
        return Err(Error::invalid("", "header", "no model columns (karner, fuzzy, mlp)"));
    }
    let mut records = Vec::new();
    let mut problems = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csv_parse_error)?;
        let id = row.get(id_col).unwrap_or_default().to_string();
        let mut num = |c: usize, field: &str| -> f64 {
            match row.get(c).unwrap_or_default().parse::<f64>() {
                Ok(v) => v,
                Err(_) => {
                    problems.push(Violation::new(&id, field, "not a number"));
                    f64::NAN
                }
            }
        };
        let actual = num(actual_col, "actual");
        let estimates: Vec<f64> = model_cols
            .iter()
            .zip(&models)
            .map(|(c, m)| num(*c, m.as_str()))
            .collect();
        let stage = match stage_col.map(|c| row.get(c).unwrap_or_default()) {
            None | Some("") => None,
            Some(s) => match s.parse() {
                Ok(st) => Some(st),
                Err(_) => {
                    problems.push(Violation::new(&id, "stage", format!("unknown stage `{s}`")));
                    None
                }
            },
        };
        records.push(EvalRecord {
            project_id: id,
            stage,
            actual,
            estimates,
        });
    }
    if !problems.is_empty() {
        return Err(Error::Validation(problems));
    }
    Ok((models, records))
}

fn csv_parse_error(e: csv::Error) -> Error {
    let (line, column) = e.position().map(|p| (p.line() as usize, 0)).unwrap_or((0, 0));
    Error::Parse {
        line,
        column,
        message: e.to_string(),
    }
}
