use std::fmt::Write as _;

use crate::autodiff::{train, TrainConfig};
use crate::data::{LabeledCorpus, Split};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::model::{ModelConfig, ModelKind};

use super::reference::EXTERNAL_BASELINES;
use super::significance::{mcnemar_test, welch_t_test_two_tailed, SignificanceReport};
use super::{split_labels, RunResult};

/// Display order of the trained models in the grid.
const ROW_ORDER: [ModelKind; 3] = [ModelKind::RealEmbed, ModelKind::CeSup, ModelKind::CeMix];

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kinds: Vec<ModelKind>,
    pub seeds: Vec<u64>,
    pub n: usize,
    /// Projector rank; `None` uses `n / 2`.
    pub r: Option<usize>,
    /// Cells trained concurrently. Each cell then trains single-threaded.
    pub jobs: usize,
}

/// One (dataset, model, seed) training run.
#[derive(Debug)]
pub struct CellOutcome {
    pub dataset: String,
    pub kind: ModelKind,
    pub seed: u64,
    pub result: Result<RunResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub name: String,
    /// `None` for stored reference rows.
    pub kind: Option<ModelKind>,
    /// Mean test accuracy in percent, per dataset column.
    pub values: Vec<Option<f64>>,
    pub best: Vec<bool>,
}

#[derive(Debug)]
pub struct ExperimentReport {
    pub datasets: Vec<String>,
    pub cells: Vec<CellOutcome>,
    pub rows: Vec<GridRow>,
    pub significance: Vec<SignificanceReport>,
}

impl ExperimentReport {
    pub fn failures(&self) -> impl Iterator<Item = &CellOutcome> {
        self.cells.iter().filter(|c| c.result.is_err())
    }

    /// Successful test accuracies of one (dataset, model), in seed order.
    pub fn accuracies(&self, dataset: &str, kind: ModelKind) -> Vec<f64> {
        self.cells
            .iter()
            .filter(|c| c.dataset == dataset && c.kind == kind)
            .filter_map(|c| c.result.as_ref().ok().map(|r| r.accuracy))
            .collect()
    }

    /// Aligned plain-text grid; `*` marks the best value of each column.
    pub fn grid_text(&self) -> String {
        let name_width = self.rows.iter().map(|r| r.name.len()).max().unwrap_or(5).max(5);
        let col_width = self.datasets.iter().map(String::len).max().unwrap_or(0).max(7);
        let mut out = format!("{:<name_width$}", "Model");
        for d in &self.datasets {
            let _ = write!(out, " {d:>col_width$}");
        }
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "{:<name_width$}", row.name);
            for (v, best) in row.values.iter().zip(&row.best) {
                let cell = match v {
                    Some(v) if *best => format!("{v:.1}*"),
                    Some(v) => format!("{v:.1} "),
                    None => "- ".to_owned(),
                };
                let _ = write!(out, " {cell:>col_width$}");
            }
            out.push('\n');
        }
        let failures: Vec<_> = self.failures().collect();
        if !failures.is_empty() {
            out.push_str("\nfailed cells:\n");
            for c in failures {
                if let Err(e) = &c.result {
                    let _ = writeln!(out, "  {} {} seed={}: {e}", c.dataset, c.kind.id(), c.seed);
                }
            }
        }
        out
    }
}

/// `dataset,model,seed,accuracy`; failed cells carry `failed` as accuracy.
pub fn results_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("dataset,model,seed,accuracy\n");
    for c in &report.cells {
        let acc = match &c.result {
            Ok(r) => r.accuracy.to_string(),
            Err(_) => "failed".to_owned(),
        };
        let _ = writeln!(out, "{},{},{},{acc}", c.dataset, c.kind.id(), c.seed);
    }
    out
}

/// `dataset,model_a,model_b,test,p_value`.
pub fn significance_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("dataset,model_a,model_b,test,p_value\n");
    for s in &report.significance {
        let _ = writeln!(out, "{},{},{},{},{}", s.dataset, s.model_a, s.model_b, s.test, s.p_value);
    }
    out
}

/// Trains every (dataset, model, seed) cell and evaluates it on the test
/// split. Failed cells are kept in the report with their error.
pub fn run_experiment(
    datasets: &[(&LabeledCorpus, TrainConfig)],
    config: &ExperimentConfig,
) -> Result<ExperimentReport> {
    if datasets.is_empty() || config.kinds.is_empty() || config.seeds.is_empty() {
        return Err(Error::Config(
            "experiment needs at least one dataset, model and seed".into(),
        ));
    }
    let mut plan = Vec::new();
    for (d, _) in datasets.iter().enumerate() {
        for &kind in &config.kinds {
            for &seed in &config.seeds {
                plan.push((d, kind, seed));
            }
        }
    }

    let exec = Executor::new(config.jobs)?;
    let cells = exec.map(plan.len(), |i| {
        let (d, kind, seed) = plan[i];
        let (corpus, settings) = &datasets[d];
        let mut settings = settings.clone();
        if config.jobs > 1 {
            settings.jobs = 1;
        }
        log::info!("training {} {} seed={seed}", corpus.name, kind.id());
        let result = run_cell(corpus, kind, seed, config, &settings);
        CellOutcome {
            dataset: corpus.name.clone(),
            kind,
            seed,
            result,
        }
    });

    let names: Vec<String> = datasets.iter().map(|(c, _)| c.name.clone()).collect();
    let mut report = ExperimentReport {
        datasets: names,
        cells,
        rows: Vec::new(),
        significance: Vec::new(),
    };
    report.rows = build_rows(&report, config);
    report.significance = significance(&report, datasets, config)?;
    Ok(report)
}

fn run_cell(
    corpus: &LabeledCorpus,
    kind: ModelKind,
    seed: u64,
    config: &ExperimentConfig,
    settings: &TrainConfig,
) -> Result<RunResult> {
    let mut model_config = ModelConfig::new(kind, config.n, corpus.vocab_size(), seed);
    if let Some(r) = config.r {
        model_config = model_config.with_rank(r);
    }
    let outcome = train(model_config, corpus, settings, |_| {})?;
    RunResult::evaluate(&outcome.model, corpus, Split::Test, &Executor::sequential())
}

fn build_rows(report: &ExperimentReport, config: &ExperimentConfig) -> Vec<GridRow> {
    let mut rows = Vec::new();
    for baseline in &EXTERNAL_BASELINES {
        let values: Vec<Option<f64>> = report.datasets.iter().map(|d| baseline.get(d)).collect();
        if values.iter().any(Option::is_some) {
            rows.push(GridRow {
                name: baseline.name.to_owned(),
                kind: None,
                best: vec![false; values.len()],
                values,
            });
        }
    }
    for kind in ROW_ORDER.into_iter().filter(|k| config.kinds.contains(k)) {
        let values: Vec<Option<f64>> = report
            .datasets
            .iter()
            .map(|d| {
                let accs = report.accuracies(d, kind);
                (!accs.is_empty()).then(|| 100.0 * accs.iter().sum::<f64>() / accs.len() as f64)
            })
            .collect();
        rows.push(GridRow {
            name: kind.display_name().to_owned(),
            kind: Some(kind),
            best: vec![false; values.len()],
            values,
        });
    }
    // best at display precision, ties flagged jointly
    let shown = |v: f64| (v * 10.0).round() as i64;
    for col in 0..report.datasets.len() {
        let top = rows.iter().filter_map(|r| r.values[col]).map(shown).max();
        if let Some(top) = top {
            for row in &mut rows {
                row.best[col] = row.values[col].is_some_and(|v| shown(v) == top);
            }
        }
    }
    rows
}

/// Welch over seed accuracies for every model pair, plus McNemar on the test
/// predictions of the first seed where both models trained.
fn significance(
    report: &ExperimentReport,
    datasets: &[(&LabeledCorpus, TrainConfig)],
    config: &ExperimentConfig,
) -> Result<Vec<SignificanceReport>> {
    let kinds: Vec<ModelKind> = ROW_ORDER.into_iter().filter(|k| config.kinds.contains(k)).collect();
    let mut out = Vec::new();
    for (corpus, _) in datasets {
        let labels = split_labels(corpus, Split::Test);
        for (i, &a) in kinds.iter().enumerate() {
            for &b in &kinds[i + 1..] {
                let (acc_a, acc_b) = (report.accuracies(&corpus.name, a), report.accuracies(&corpus.name, b));
                if acc_a.len() >= 2 && acc_b.len() >= 2 {
                    out.push(welch_t_test_two_tailed(&acc_a, &acc_b)?.labeled(&corpus.name, a.id(), b.id()));
                }
                let run = |kind: ModelKind, seed: u64| {
                    report
                        .cells
                        .iter()
                        .find(|c| c.dataset == corpus.name && c.kind == kind && c.seed == seed)
                        .and_then(|c| c.result.as_ref().ok())
                };
                let paired = config
                    .seeds
                    .iter()
                    .find_map(|&s| Some((run(a, s)?, run(b, s)?)));
                if let Some((ra, rb)) = paired {
                    out.push(mcnemar_test(&ra.labels(), &rb.labels(), &labels)?.labeled(&corpus.name, a.id(), b.id()));
                }
            }
        }
    }
    Ok(out)
}
