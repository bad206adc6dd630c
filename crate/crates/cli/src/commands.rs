//! `train`, `evaluate` and `gen`.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use dsfusion::baselines::{
    average, ds0_combine, ds0_fit, majority_vote, maximum, median, weighted_sum,
    ClassAccuracyTable, Ds0Reference, FuzzyCombiner,
};
use dsfusion::data::{
    gen_split, load_accuracy_table, load_dataset, load_ds0_reference, load_evidence,
    save_accuracy_table, save_ds0_reference, save_evidence, write_dataset, EvidenceArtifact,
    Manifest, SynthSpec, TrainingMeta,
};
use dsfusion::evidence::{argmax, predict};
use dsfusion::metrics::{accuracy, err};
use dsfusion::trainer::{train, TrainTrace};
use dsfusion::{EvidenceParams, FusionDataset, FusionError, Mode, TrainConfig};
use log::{info, warn};

use crate::config::{Combiner, ExperimentConfig};
use crate::error::{CliError, Result};
use crate::subsets::enumerate;

pub const ACCURACY_FILE: &str = "class_accuracy.json";
pub const DS0_FILE: &str = "ds0_reference.json";

pub fn params_file(mode: Mode) -> String {
    format!("{mode}_params.json")
}

pub fn trace_file(mode: Mode) -> String {
    format!("{mode}_trace.csv")
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Dataset plus the classifier names from its manifest.
pub struct LoadedData {
    pub dataset: FusionDataset,
    pub names: Vec<String>,
}

pub fn load_data(manifest_path: &Path) -> Result<LoadedData> {
    let manifest = Manifest::load(manifest_path)?;
    let dataset = load_dataset(&manifest)?;
    Ok(LoadedData {
        dataset,
        names: manifest
            .classifiers
            .iter()
            .map(|c| c.name.clone())
            .collect(),
    })
}

/// Evidence modes to train for a combiner list.
pub fn modes_for(combiners: &[Combiner]) -> Vec<Mode> {
    combiners.iter().filter_map(|c| c.evidence_mode()).collect()
}

pub struct TrainOutcome {
    pub traces: Vec<(Mode, TrainTrace)>,
    pub written: Vec<PathBuf>,
}

/// Train evidence parameters for each mode and fit the baseline tables the
/// selected combiners need, writing everything into `out`.
pub fn run_train(
    cfg: &ExperimentConfig,
    manifest: &Path,
    out: &Path,
    modes: &[Mode],
) -> Result<TrainOutcome> {
    cfg.validate()?;
    let data = load_data(manifest)?;
    let ds = &data.dataset;
    if ds.is_empty() {
        return Err(FusionError::EmptyDataset.into());
    }
    create_dir(out)?;
    let mut written = Vec::new();
    let mut traces = Vec::new();

    for &mode in modes {
        let config = TrainConfig {
            mode,
            ..cfg.train_config.clone()
        };
        let (params, trace) = train(ds, &config)?;
        info!(
            "{mode}: {} epochs, mse {} -> {} ({:?})",
            trace.epochs_run, trace.initial_mse, trace.best_mse, trace.stop_reason
        );
        let path = out.join(params_file(mode));
        save_evidence(
            &path,
            &EvidenceArtifact {
                params,
                seed: config.seed,
                training_meta: Some(TrainingMeta::new(&trace, &config)),
            },
        )?;
        written.push(path);
        let path = out.join(trace_file(mode));
        write_text(&path, &trace.to_csv())?;
        written.push(path);
        traces.push((mode, trace));
    }

    if cfg.combiners.iter().any(|c| c.needs_accuracy_table()) {
        let path = out.join(ACCURACY_FILE);
        save_accuracy_table(&path, &ClassAccuracyTable::fit(ds)?)?;
        written.push(path);
    }
    if cfg.combiners.contains(&Combiner::DS0) {
        let path = out.join(DS0_FILE);
        save_ds0_reference(&path, &ds0_fit(ds)?)?;
        written.push(path);
    }
    Ok(TrainOutcome { traces, written })
}

/// Fitted state for every requested combiner.
#[derive(Debug, Clone, Default)]
pub struct Artifacts {
    pub ds1: Option<EvidenceParams>,
    pub ds2: Option<EvidenceParams>,
    pub accuracy: Option<ClassAccuracyTable>,
    pub ds0: Option<Ds0Reference>,
}

fn require(path: PathBuf) -> Result<PathBuf> {
    if path.is_file() {
        Ok(path)
    } else {
        Err(CliError::MissingArtifact { path })
    }
}

impl Artifacts {
    /// Load what `combiners` need from `dir`.
    pub fn load(dir: &Path, combiners: &[Combiner]) -> Result<Self> {
        let mut a = Artifacts::default();
        for mode in modes_for(combiners) {
            let params = load_evidence(require(dir.join(params_file(mode)))?)?.params;
            match mode {
                Mode::Ds1 => a.ds1 = Some(params),
                Mode::Ds2 => a.ds2 = Some(params),
            }
        }
        if combiners.iter().any(|c| c.needs_accuracy_table()) {
            a.accuracy = Some(load_accuracy_table(require(dir.join(ACCURACY_FILE))?)?);
        }
        if combiners.contains(&Combiner::DS0) {
            a.ds0 = Some(load_ds0_reference(require(dir.join(DS0_FILE))?)?);
        }
        Ok(a)
    }

    /// Every loaded artifact must describe `n` classifiers and `k` classes.
    pub fn check_shape(&self, n: usize, k: usize) -> Result<()> {
        let mut shapes = Vec::new();
        for p in self.ds1.iter().chain(&self.ds2) {
            shapes.push((p.mode().to_string(), p.classifiers(), p.classes()));
        }
        if let Some(t) = &self.accuracy {
            shapes.push(("class accuracy table".into(), t.classifiers(), t.classes()));
        }
        if let Some(r) = &self.ds0 {
            shapes.push(("ds0 reference".into(), r.classifiers(), r.classes()));
        }
        for (what, an, ak) in shapes {
            if (an, ak) != (n, k) {
                return Err(CliError::Config(format!(
                    "{what} was fitted for {an} classifiers and {ak} classes, test data has {n} and {k}"
                )));
            }
        }
        Ok(())
    }
}

fn missing(combiner: Combiner) -> CliError {
    CliError::Config(format!("no fitted state loaded for {combiner}"))
}

/// Test accuracy of one combiner on the classifiers at `indices`
/// (zero-based positions in the test dataset).
pub fn evaluate_cell(
    artifacts: &Artifacts,
    test: &FusionDataset,
    combiner: Combiner,
    indices: &[usize],
    fi_target_sum: f64,
) -> Result<f64> {
    let sub = test.select_classifiers(indices)?;
    let labels: Vec<usize> = sub.patterns().iter().map(|p| p.label()).collect();
    let mut preds = Vec::with_capacity(sub.len());
    match combiner {
        Combiner::DS1 | Combiner::DS2 => {
            let params = if combiner == Combiner::DS1 {
                artifacts.ds1.as_ref()
            } else {
                artifacts.ds2.as_ref()
            }
            .ok_or_else(|| missing(combiner))?
            .select_classifiers(indices)?;
            for p in sub.patterns() {
                preds.push(predict(&params, &p.scores)?);
            }
        }
        Combiner::DS0 => {
            let reference = artifacts
                .ds0
                .as_ref()
                .ok_or_else(|| missing(combiner))?
                .select_classifiers(indices)?;
            for p in sub.patterns() {
                preds.push(argmax(&ds0_combine(&p.scores, &reference)?));
            }
        }
        Combiner::WS | Combiner::FI => {
            let table = artifacts
                .accuracy
                .as_ref()
                .ok_or_else(|| missing(combiner))?
                .select_classifiers(indices)?;
            if combiner == Combiner::WS {
                for p in sub.patterns() {
                    preds.push(argmax(&weighted_sum(&p.scores, &table)?));
                }
            } else {
                let fi = FuzzyCombiner::new(&table, fi_target_sum)?;
                for p in sub.patterns() {
                    preds.push(argmax(&fi.combine(&p.scores)?));
                }
            }
        }
        Combiner::Av | Combiner::Md | Combiner::Mx => {
            let f = match combiner {
                Combiner::Av => average,
                Combiner::Md => median,
                _ => maximum,
            };
            for p in sub.patterns() {
                preds.push(argmax(&f(&p.scores)?));
            }
        }
        Combiner::MV => {
            for p in sub.patterns() {
                preds.push(majority_vote(&p.scores)?);
            }
        }
    }
    Ok(accuracy(&preds, &labels)?)
}

/// Individual test accuracy of one classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    /// Position in the manifest.
    pub index: usize,
    pub name: String,
    pub accuracy: f64,
}

/// One (subset, combiner) evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    /// Zero-based ranks.
    pub subset: Vec<usize>,
    /// Manifest positions of the same classifiers.
    pub indices: Vec<usize>,
    pub combiner: Combiner,
    pub accuracy: f64,
    /// `None` when the best single classifier is perfect.
    pub err: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    /// Sorted by decreasing accuracy, ties by manifest position.
    pub ranked: Vec<Individual>,
    pub combiners: Vec<Combiner>,
    pub subsets: Vec<Vec<usize>>,
    /// Subset-major, combiners in report order.
    pub cells: Vec<Cell>,
}

impl ExperimentReport {
    pub fn best_single(&self) -> f64 {
        self.ranked[0].accuracy
    }

    pub fn cells_for(&self, combiner: Combiner) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(move |c| c.combiner == combiner)
    }
}

/// Rank classifiers by individual accuracy on `test`.
pub fn rank_classifiers(test: &FusionDataset, names: &[String]) -> Result<Vec<Individual>> {
    let labels: Vec<usize> = test.patterns().iter().map(|p| p.label()).collect();
    let mut out = Vec::with_capacity(test.classifier_count());
    for n in 0..test.classifier_count() {
        let preds: Vec<usize> = test
            .patterns()
            .iter()
            .map(|p| argmax(p.scores[n].scores()))
            .collect();
        out.push(Individual {
            index: n,
            name: names
                .get(n)
                .cloned()
                .unwrap_or_else(|| format!("classifier{}", n + 1)),
            accuracy: accuracy(&preds, &labels)?,
        });
    }
    out.sort_by(|a, b| {
        b.accuracy
            .total_cmp(&a.accuracy)
            .then(a.index.cmp(&b.index))
    });
    Ok(out)
}

/// Evaluate every configured combiner on every subset of the test set.
pub fn run_evaluate(
    cfg: &ExperimentConfig,
    manifest: &Path,
    artifacts_dir: &Path,
) -> Result<ExperimentReport> {
    cfg.validate()?;
    let combiners: Vec<Combiner> = cfg
        .combiners
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let data = load_data(manifest)?;
    let test = &data.dataset;
    if test.is_empty() {
        return Err(FusionError::EmptyDataset.into());
    }
    let artifacts = Artifacts::load(artifacts_dir, &combiners)?;
    artifacts.check_shape(test.classifier_count(), test.classes())?;

    let ranked = rank_classifiers(test, &data.names)?;
    let subsets = enumerate(&cfg.subset_policy, test.classifier_count())?;
    let best = ranked[0].accuracy;
    if best >= 100.0 {
        warn!("best single classifier is perfect on the test set; ERR is undefined");
    }

    let mut cells = Vec::with_capacity(subsets.len() * combiners.len());
    for subset in &subsets {
        let indices: Vec<usize> = subset.iter().map(|&r| ranked[r].index).collect();
        for &combiner in &combiners {
            let acc = evaluate_cell(&artifacts, test, combiner, &indices, cfg.fi_target_sum)?;
            let err = match err(best, acc) {
                Ok(v) => Some(v),
                Err(FusionError::PerfectBaseline) => None,
                Err(e) => return Err(e.into()),
            };
            cells.push(Cell {
                subset: subset.clone(),
                indices: indices.clone(),
                combiner,
                accuracy: acc,
                err,
            });
        }
    }
    Ok(ExperimentReport {
        ranked,
        combiners,
        subsets,
        cells,
    })
}

/// Generate a synthetic dataset. Without held-out patterns the files go
/// straight into `out`; otherwise into `out/train` and `out/test`.
/// Returns the manifest paths written.
pub fn run_gen(spec: &SynthSpec, out: &Path) -> Result<Vec<PathBuf>> {
    let (train, test) = gen_split(spec)?;
    let names: Vec<String> = (1..=spec.classifiers).map(|n| format!("clf{n}")).collect();
    let dirs: Vec<(PathBuf, &FusionDataset)> = if spec.test_pattern_count == 0 {
        vec![(out.to_path_buf(), &train)]
    } else {
        vec![(out.join("train"), &train), (out.join("test"), &test)]
    };
    let mut manifests = Vec::new();
    for (dir, ds) in dirs {
        write_dataset(ds, &dir, &names)?;
        manifests.push(dir.join("manifest.json"));
    }
    Ok(manifests)
}

/// Load a synthetic spec from JSON.
pub fn load_spec(path: &Path) -> Result<SynthSpec> {
    let text = fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            CliError::Config(format!("{}: not found", path.display()))
        } else {
            CliError::io(path, e)
        }
    })?;
    let spec: SynthSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    spec.validate()?;
    Ok(spec)
}
