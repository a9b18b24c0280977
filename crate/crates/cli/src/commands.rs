use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use qembed::autodiff::{finite_diff_check_groups, train};
use qembed::clinalg::inner;
use qembed::data::{load_prepared, prepared, tokenize, write_prepared, Batch, LabeledCorpus, Sources, Split, UNK_ID};
use qembed::eval::{results_csv, run_experiment, significance_csv, split_labels, ExperimentConfig, RunResult};
use qembed::exec::Executor;
use qembed::model::{load_checkpoint, save_checkpoint, Model, ModelKind, DECISION_THRESHOLD};
use qembed::{Error, Result};

use crate::config::{dataset_name, resolve_jobs, resolve_named, FileConfig, ModelArgs};
use crate::{CliError, CliResult, Command};

fn io_err(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> Error {
    let context = context.into();
    move |source| Error::io(context, source)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io_err(format!("creating {}", parent.display())))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(io_err(format!("creating {}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut out = create(path)?;
    out.write_all(contents.as_bytes())
        .and_then(|()| out.flush())
        .map_err(io_err(format!("writing {}", path.display())))
}

pub fn run(command: Command, jobs: Option<usize>) -> CliResult<()> {
    match command {
        Command::Prepare {
            input,
            train,
            validation,
            test,
            out,
            seed,
            min_frequency,
        } => {
            let sources = match (&input, &train, &validation, &test) {
                (Some(path), None, None, None) => Sources::Single(path),
                (None, Some(train), Some(validation), Some(test)) => Sources::Predefined {
                    train,
                    validation,
                    test,
                },
                _ => {
                    return Err(Error::Config(
                        "pass either --input or all of --train, --validation and --test".into(),
                    )
                    .into())
                }
            };
            Ok(prepare(sources, &out, seed, min_frequency)?)
        }
        Command::Train {
            data,
            model,
            config,
            checkpoint,
            log,
        } => {
            let file = FileConfig::load(config.as_deref())?;
            let dir = data.resolve(&file)?;
            let checkpoint = checkpoint
                .or(file.checkpoint.clone())
                .unwrap_or_else(|| PathBuf::from("model.ckpt"));
            let log = log.unwrap_or_else(|| {
                let mut p = checkpoint.clone().into_os_string();
                p.push(".log");
                PathBuf::from(p)
            });
            let jobs = resolve_jobs(jobs, &file);
            Ok(cmd_train(&dir, &model, &file, jobs, &checkpoint, &log)?)
        }
        Command::Evaluate {
            checkpoint,
            data,
            split,
            predictions,
        } => {
            let dir = data.resolve(&FileConfig::default())?;
            let split = Split::from_tag(&split)
                .ok_or_else(|| Error::Config(format!("unknown split `{split}`; use train, val or test")))?;
            Ok(evaluate(&checkpoint, &dir, split, predictions.as_deref(), jobs.unwrap_or(1))?)
        }
        Command::Predict {
            checkpoint,
            data,
            text,
            input,
        } => {
            let dir = data.resolve(&FileConfig::default())?;
            let mut sentences = text;
            if let Some(path) = input {
                let file = File::open(&path).map_err(io_err(format!("opening {}", path.display())))?;
                for line in BufReader::new(file).lines() {
                    sentences.push(line.map_err(io_err(path.display().to_string()))?);
                }
            }
            Ok(predict(&checkpoint, &dir, &sentences)?)
        }
        Command::Inspect {
            checkpoint,
            data,
            token,
            pair,
            top_k,
        } => {
            let dir = data.resolve(&FileConfig::default())?;
            Ok(inspect(&checkpoint, &dir, &token, pair.as_deref(), top_k)?)
        }
        Command::Experiment { config, out, data_root } => {
            let file = FileConfig::load(Some(&config))?;
            experiment(&file, out, data_root.as_deref(), jobs)
        }
        Command::Gradcheck {
            data,
            model,
            checkpoint,
            step,
            sample,
            tolerance,
        } => {
            let file = FileConfig::default();
            let dir = data.resolve(&file)?;
            gradcheck(&dir, &model, checkpoint.as_deref(), step, sample, tolerance)
        }
    }
}

fn prepare(sources: Sources<'_>, out: &Path, seed: u64, min_frequency: usize) -> Result<()> {
    let (raw, splits) = prepared::gather(sources, seed)?;
    let corpus = LabeledCorpus::from_raw(dataset_name(out), &raw, splits, min_frequency)?;
    write_prepared(out, &raw, &corpus)?;
    println!("{}", prepared::stats_line(&corpus));
    Ok(())
}

fn cmd_train(dir: &Path, args: &ModelArgs, file: &FileConfig, jobs: usize, checkpoint: &Path, log_path: &Path) -> Result<()> {
    let corpus = load_prepared(dir)?;
    let settings = args.resolve(file, &dataset_name(dir), jobs)?;
    let config = settings.model_config(corpus.vocab_size());
    let mut log = create(log_path)?;
    let mut log_error = None;
    let outcome = train(config, &corpus, &settings.train, |record| {
        println!("{record}");
        if let Err(e) = writeln!(log, "{record}") {
            log_error.get_or_insert(e);
        }
    })?;
    if let Some(e) = log_error {
        return Err(Error::io(format!("writing {}", log_path.display()), e));
    }
    log.flush().map_err(io_err(format!("writing {}", log_path.display())))?;
    save_checkpoint(&outcome.model, checkpoint)?;
    match (outcome.best_epoch, outcome.best_val_acc) {
        (Some(epoch), Some(acc)) => println!("final val_acc={acc:.6} best_epoch={epoch}"),
        _ => println!("no epochs run; wrote initial parameters"),
    }
    Ok(())
}

/// Loads a checkpoint and checks it against the dataset's vocabulary.
fn compatible(checkpoint: &Path, corpus: &LabeledCorpus) -> Result<Model> {
    let model = load_checkpoint(checkpoint)?;
    if model.config().vocab_size != corpus.vocab_size() {
        return Err(Error::Checkpoint(format!(
            "vocab_size mismatch: checkpoint {} has vocab_size={}, dataset `{}` has vocab_size={}",
            checkpoint.display(),
            model.config().vocab_size,
            corpus.name,
            corpus.vocab_size()
        )));
    }
    Ok(model)
}

fn evaluate(checkpoint: &Path, dir: &Path, split: Split, predictions: Option<&Path>, jobs: usize) -> Result<()> {
    let corpus = load_prepared(dir)?;
    let model = compatible(checkpoint, &corpus)?;
    let exec = Executor::new(jobs)?;
    let result = RunResult::evaluate(&model, &corpus, split, &exec)?;
    println!("{} accuracy: {:.1}%", split.tag(), 100.0 * result.accuracy);
    if let Some(path) = predictions {
        let labels = split_labels(&corpus, split);
        let mut csv = String::from("index,label,probability,prediction\n");
        for (p, y) in result.predictions.iter().zip(labels) {
            csv.push_str(&format!("{},{y},{},{}\n", p.index, p.probability, p.label));
        }
        write_file(path, &csv)?;
    }
    Ok(())
}

fn predict(checkpoint: &Path, dir: &Path, sentences: &[String]) -> Result<()> {
    let corpus = load_prepared(dir)?;
    let model = compatible(checkpoint, &corpus)?;
    let scorer = model.scorer()?;
    println!("index,probability,prediction");
    for (i, text) in sentences.iter().enumerate() {
        let ids = corpus.vocab.encode(&tokenize(text));
        let p = scorer.probability(&ids).map_err(|e| e.in_sentence(i))?;
        println!("{i},{p},{}", u8::from(p >= DECISION_THRESHOLD));
    }
    Ok(())
}

fn token_id(corpus: &LabeledCorpus, token: &str) -> Result<u32> {
    let normalized = tokenize(token).join(" ");
    corpus.vocab.id(&normalized).ok_or_else(|| {
        Error::Config(format!(
            "token `{token}` is not in the vocabulary; it would be encoded as UNK (id {UNK_ID})"
        ))
    })
}

fn inspect(checkpoint: &Path, dir: &Path, token: &str, pair: Option<&str>, top_k: usize) -> Result<()> {
    let corpus = load_prepared(dir)?;
    let model = compatible(checkpoint, &corpus)?;
    let table = model
        .complex_table()
        .ok_or_else(|| Error::Config("the real baseline has no amplitudes or phases".into()))?;
    let id = token_id(&corpus, token)?;
    let state = table.lookup(id as usize)?;
    match pair {
        None => {
            let amplitudes = state.amplitudes();
            let phases = state.phases();
            let mut order: Vec<usize> = (0..amplitudes.len()).collect();
            order.sort_by(|&a, &b| amplitudes[b].total_cmp(&amplitudes[a]).then(a.cmp(&b)));
            println!("token {token} (id {id})");
            println!("basis\tamplitude\tphase");
            for k in order.into_iter().take(top_k) {
                println!("{k}\t{:.6}\t{:.6}", amplitudes[k], phases[k]);
            }
        }
        Some(other) => {
            let other_id = token_id(&corpus, other)?;
            let other_state = table.lookup(other_id as usize)?;
            let z = inner(state.vector(), other_state.vector())?;
            println!(
                "inner({token}, {other}) = {:.6}{:+.6}i  magnitude {:.6}  phase {:.6}",
                z.re,
                z.im,
                z.norm(),
                z.arg()
            );
        }
    }
    Ok(())
}

fn experiment(file: &FileConfig, out: Option<PathBuf>, data_root: Option<&Path>, jobs: Option<usize>) -> CliResult<()> {
    let names = file
        .datasets
        .clone()
        .filter(|d| !d.is_empty())
        .ok_or_else(|| Error::Config("experiment config needs a non-empty `datasets` list".into()))?;
    let kinds = match &file.models {
        Some(models) => models.iter().map(|m| m.parse()).collect::<Result<Vec<ModelKind>>>()?,
        None => ModelKind::ALL.to_vec(),
    };
    let seeds = file.seeds.clone().unwrap_or_else(|| (0..10).collect());
    let out = out
        .or(file.out.clone())
        .unwrap_or_else(|| PathBuf::from("results"));

    let mut corpora = Vec::new();
    let mut settings = Vec::new();
    for name in &names {
        let dir = resolve_named(name, data_root)?;
        corpora.push(load_prepared(&dir)?);
        settings.push(ModelArgs::default().resolve(file, &dataset_name(&dir), 1)?);
    }
    let first = &settings[0];
    let plan: Vec<_> = corpora.iter().zip(&settings).map(|(c, s)| (c, s.train.clone())).collect();
    let config = ExperimentConfig {
        kinds,
        seeds,
        n: first.n,
        r: Some(first.r),
        jobs: resolve_jobs(jobs, file),
    };
    let report = run_experiment(&plan, &config)?;

    let grid = report.grid_text();
    print!("{grid}");
    write_file(&out.join("grid.txt"), &grid)?;
    write_file(&out.join("results.csv"), &results_csv(&report))?;
    write_file(&out.join("significance.csv"), &significance_csv(&report))?;

    let failed: Vec<&Error> = report.failures().filter_map(|c| c.result.as_ref().err()).collect();
    match failed.first() {
        Some(first) => Err(CliError::FailedCells {
            count: failed.len(),
            first: first.to_string(),
            numeric: failed.iter().any(|e| e.is_numeric()),
        }),
        None => Ok(()),
    }
}

fn gradcheck(
    dir: &Path,
    args: &ModelArgs,
    checkpoint: Option<&Path>,
    step: f64,
    sample: usize,
    tolerance: f64,
) -> CliResult<()> {
    let corpus = load_prepared(dir)?;
    let settings = args.resolve(&FileConfig::default(), &dataset_name(dir), 1)?;
    let model = match checkpoint {
        Some(path) => compatible(path, &corpus)?,
        None => Model::init(settings.model_config(corpus.vocab_size()))?,
    };
    let indices = corpus.indices(Split::Train);
    let take = indices.len().min(settings.train.batch_size);
    let batch = Batch::from_examples(indices[..take].iter().map(|&i| (i, &corpus.examples[i])));
    let groups = finite_diff_check_groups(&model, &batch, step, sample, settings.seed)?;
    let mut worst = 0.0f64;
    for (name, err) in &groups {
        println!("{name}\tmax_relative_error={err:.3e}");
        worst = worst.max(*err);
    }
    println!("max_relative_error={worst:.3e} tolerance={tolerance:e}");
    if worst > tolerance {
        return Err(CliError::GradientMismatch { worst, tolerance });
    }
    Ok(())
}
