use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use ucp_core::corpus::{actual_uucp, split_by_ids, split_fraction, stage_of, summary_csv, Corpus};
use ucp_core::estimate::{estimate_project, SizingModel};
use ucp_core::fuzzy::{self, AdjustedWeightTable, FuzzyConfig, FuzzyEngine};
use ucp_core::karner::{karner_weight, schneider_count, ModelTag, RatePolicy};
use ucp_core::mlp::{featurize, train, StopReason, TrainConfig, TrainedModel};
use ucp_core::model::{ProjectSpec, MAX_LEVEL};
use ucp_core::report::{evaluate, read_estimates_csv, render_estimates, EstimateRow, EvalRecord, Format};
use ucp_core::{Error, Result, Violation};

use crate::{Command, ModelArgs, OutputArgs};

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Estimate {
            input,
            models,
            policy,
            rate,
            out,
        } => {
            let policy = policy.policy()?;
            let rate = rate.policy()?;
            let corpus = Corpus::load(&input.corpus)?;
            let selected = resolve_models(&models)?;
            let mlp = load_model(&models)?;
            let rows = estimate_rows(&corpus, &selected, mlp.as_ref(), policy, rate)?;
            emit(&out, &render_estimates(&rows, out.format.into())?)
        }
        Command::FuzzyTable { config, out } => {
            let engine = match config {
                Some(path) => FuzzyEngine::new(FuzzyConfig::load(path)?)?,
                None => FuzzyEngine::default(),
            };
            let table = AdjustedWeightTable::from_engine(&engine)?;
            emit(&out, &fuzzy_table(&table, out.format.into())?)
        }
        Command::Train {
            input,
            out_model,
            train_ids,
            train_fraction,
            seed,
            algorithm,
            hidden,
            epochs,
            learning_rate,
            policy,
            rate,
            out,
        } => {
            let policy = policy.policy()?;
            let rate = rate.policy()?;
            let corpus = Corpus::load(&input.corpus)?;
            let (train_set, test_set) = if !train_ids.is_empty() {
                split_by_ids(&corpus, &train_ids)?
            } else if let Some(f) = train_fraction {
                split_fraction(&corpus, f, seed)?
            } else {
                (corpus.projects().to_vec(), Vec::new())
            };
            let mut data = Vec::with_capacity(train_set.len());
            let mut problems = Vec::new();
            for p in &train_set {
                match (featurize(p, policy), actual_uucp(p, rate)) {
                    (Ok(f), Ok(a)) => data.push((f, a.uucp)),
                    (Err(e), _) | (_, Err(e)) => problems.extend(violations(e, &p.id)?),
                }
            }
            if !problems.is_empty() {
                return Err(Error::Validation(problems));
            }
            let cfg = TrainConfig {
                algorithm: algorithm.into(),
                hidden,
                max_epochs: epochs,
                learning_rate,
                rng_seed: seed,
                ..TrainConfig::default()
            };
            let (model, history) = train(&data, policy, &cfg)?;
            model.save(&out_model)?;

            let mut text = String::new();
            let _ = writeln!(
                text,
                "trained 13-{hidden}-1 network on {} projects: {} epochs, SSE {:.3e} ({})",
                data.len(),
                history.epochs(),
                history.final_sse(),
                match history.stop {
                    Some(StopReason::TargetReached) => "target SSE reached",
                    Some(StopReason::SmallGradient) => "gradient vanished",
                    Some(StopReason::MaxEpochs) | None => "epoch limit",
                },
            );
            let _ = writeln!(text, "model written to {}", out_model.display());
            for (label, set) in [("train", &train_set), ("test", &test_set)] {
                if set.is_empty() {
                    continue;
                }
                let models = [ModelTag::Karner, ModelTag::Mlp];
                let _ = writeln!(text, "\n-- {label} projects --");
                // The model is already saved; a prediction that cannot be
                // scored (e.g. non-positive) is reported, not fatal.
                match eval_records(set, &models, Some(&model), policy, rate)
                    .and_then(|records| evaluate(&models, &records, false))
                {
                    Ok(ev) => text.push_str(&ev.render(out.format.into())?),
                    Err(e) => {
                        let _ = writeln!(text, "not scored: {e}");
                    }
                }
            }
            emit(&out, &text)
        }
        Command::Predict {
            input,
            model_file,
            rate,
            out,
        } => {
            let rate = rate.policy()?;
            let corpus = Corpus::load(&input.corpus)?;
            let model = TrainedModel::load(&model_file)?;
            let rows = estimate_rows(&corpus, &[ModelTag::Mlp], Some(&model), model.policy()?, rate)?;
            emit(&out, &render_estimates(&rows, out.format.into())?)
        }
        Command::Evaluate {
            corpus,
            estimates,
            by_stage,
            models,
            policy,
            rate,
            out,
        } => {
            let (tags, records) = match (corpus, estimates) {
                (_, Some(path)) => {
                    let (columns, records) = read_estimates_csv(&read(&path)?)?;
                    select_columns(&models, columns, records)?
                }
                (Some(path), None) => {
                    let policy = policy.policy()?;
                    let rate = rate.policy()?;
                    let corpus = Corpus::load(path)?;
                    let tags = resolve_models(&models)?;
                    let mlp = load_model(&models)?;
                    let records = eval_records(corpus.projects(), &tags, mlp.as_ref(), policy, rate)?;
                    (tags, records)
                }
                (None, None) => unreachable!("clap requires one input"),
            };
            let report = evaluate(&tags, &records, by_stage)?;
            emit(&out, &report.render(out.format.into())?)
        }
        Command::Summary { input, output } => {
            let corpus = Corpus::load(&input.corpus)?;
            let text = summary_csv(&corpus)?;
            match output {
                Some(path) => Ok(std::fs::write(path, text)?),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
    }
}

fn read(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

fn emit(out: &OutputArgs, text: &str) -> Result<()> {
    match &out.output {
        Some(path) => Ok(std::fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Re-labels validation problems with the project they came from.
fn violations(err: Error, project: &str) -> Result<Vec<Violation>> {
    match err {
        Error::Validation(v) => Ok(v
            .into_iter()
            .map(|mut x| {
                if x.project.is_empty() {
                    x.project = project.to_string();
                }
                x
            })
            .collect()),
        other => Err(other),
    }
}

fn resolve_models(args: &ModelArgs) -> Result<Vec<ModelTag>> {
    let mut tags: Vec<ModelTag> = args.models.iter().map(|m| (*m).into()).collect();
    if tags.is_empty() {
        tags = vec![ModelTag::Karner, ModelTag::Fuzzy];
        if args.model_file.is_some() {
            tags.push(ModelTag::Mlp);
        }
    }
    let mut seen = BTreeSet::new();
    tags.retain(|t| seen.insert(*t));
    if tags.contains(&ModelTag::Mlp) && args.model_file.is_none() {
        return Err(Error::invalid("", "--model mlp", "requires --model-file"));
    }
    Ok(tags)
}

fn load_model(args: &ModelArgs) -> Result<Option<TrainedModel>> {
    args.model_file.as_ref().map(TrainedModel::load).transpose()
}

fn sizing_model<'a>(tag: ModelTag, mlp: Option<&'a TrainedModel>) -> SizingModel<'a> {
    match tag {
        ModelTag::Karner => SizingModel::Karner,
        ModelTag::Fuzzy => SizingModel::Fuzzy(fuzzy::default_table()),
        ModelTag::Mlp => SizingModel::Mlp(mlp.expect("mlp model resolved with a model file")),
    }
}

fn estimate_rows(
    corpus: &Corpus,
    tags: &[ModelTag],
    mlp: Option<&TrainedModel>,
    policy: ucp_core::model::TransactionPolicy,
    rate: RatePolicy,
) -> Result<Vec<EstimateRow>> {
    let mut rows = Vec::new();
    for p in corpus.projects() {
        let mut warned = false;
        for tag in tags {
            let estimate = estimate_project(p, sizing_model(*tag, mlp), policy, rate)?;
            if estimate.effort_ph.is_none() && !warned {
                eprintln!(
                    "warning: project `{}`: team restructure recommended ({} environmental ratings out of line); \
                     effort omitted, pass --force-rate to apply 28 ph/UCP",
                    p.id,
                    schneider_count(&p.factors)
                );
                warned = true;
            }
            rows.push(EstimateRow {
                project_id: p.id.clone(),
                estimate,
            });
        }
    }
    Ok(rows)
}

fn eval_records(
    projects: &[ProjectSpec],
    tags: &[ModelTag],
    mlp: Option<&TrainedModel>,
    policy: ucp_core::model::TransactionPolicy,
    rate: RatePolicy,
) -> Result<Vec<EvalRecord>> {
    let mut records = Vec::new();
    let mut problems = Vec::new();
    for p in projects {
        let actual = match actual_uucp(p, rate) {
            Ok(a) => a.uucp,
            Err(e) => {
                problems.extend(violations(e, &p.id)?);
                continue;
            }
        };
        let estimates = tags
            .iter()
            .map(|t| sizing_model(*t, mlp).uucp(p, policy))
            .collect::<Result<Vec<_>>>()?;
        records.push(EvalRecord {
            project_id: p.id.clone(),
            stage: Some(stage_of(p)),
            actual,
            estimates,
        });
    }
    if !problems.is_empty() {
        return Err(Error::Validation(problems));
    }
    Ok(records)
}

fn select_columns(
    args: &ModelArgs,
    columns: Vec<ModelTag>,
    records: Vec<EvalRecord>,
) -> Result<(Vec<ModelTag>, Vec<EvalRecord>)> {
    if args.models.is_empty() {
        return Ok((columns, records));
    }
    let wanted: Vec<ModelTag> = args.models.iter().map(|m| (*m).into()).collect();
    let mut index = Vec::new();
    for tag in &wanted {
        match columns.iter().position(|c| c == tag) {
            Some(i) => index.push(i),
            None => {
                return Err(Error::invalid(
                    "",
                    "--model",
                    format!("no `{tag}` column in the estimates file"),
                ))
            }
        }
    }
    let records = records
        .into_iter()
        .map(|mut r| {
            r.estimates = index.iter().map(|i| r.estimates[*i]).collect();
            r
        })
        .collect();
    Ok((wanted, records))
}

fn fuzzy_table(table: &AdjustedWeightTable, format: Format) -> Result<String> {
    let mut rows = Vec::new();
    for level in 1..=MAX_LEVEL {
        rows.push((level, karner_weight(u32::from(level))?, table.weight(level)?));
    }
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str("transactions,karner_weight,adjusted_weight\n");
            for (l, k, a) in rows {
                let _ = writeln!(out, "{l},{k},{a:.2}");
            }
        }
        Format::Table => {
            out.push_str("transactions  karner_weight  adjusted_weight\n");
            for (l, k, a) in rows {
                let _ = writeln!(out, "{l:>12}  {k:>13}  {a:>15.2}");
            }
        }
    }
    Ok(out)
}
