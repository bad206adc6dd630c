//! Versioned JSON documents for trained parameters and fitted tables.
//!
//! Every document carries `format`, `version` and `kind`. Floats are written
//! in their shortest round-trip form, so a load after a save reproduces every
//! binary64 value exactly.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::baselines::{ClassAccuracyTable, Ds0Reference};
use crate::error::{FusionError, Result};
use crate::model::{EvidenceParams, Mode, TrainConfig};
use crate::trainer::{StopReason, TrainTrace};

use super::csv_io::json_error;

pub const FORMAT: &str = "dsfusion-params";
pub const PARAMS_VERSION: u64 = 1;

/// Summary of the run that produced a parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub epochs_run: usize,
    pub stop_reason: StopReason,
    pub initial_mse: f64,
    pub best_mse: f64,
    pub config: TrainConfig,
}

impl TrainingMeta {
    pub fn new(trace: &TrainTrace, config: &TrainConfig) -> Self {
        Self {
            epochs_run: trace.epochs_run,
            stop_reason: trace.stop_reason,
            initial_mse: trace.initial_mse,
            best_mse: trace.best_mse,
            config: config.clone(),
        }
    }
}

/// Evidence parameters with their provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceArtifact {
    pub params: EvidenceParams,
    pub seed: u64,
    pub training_meta: Option<TrainingMeta>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EvidenceDoc {
    format: String,
    version: u64,
    kind: String,
    mode: Mode,
    n: usize,
    k: usize,
    /// `weights[n][k]` is the reference of classifier n for class k
    /// (length K in ds1, 1 in ds2).
    weights: Vec<Vec<Vec<f64>>>,
    ignorance: Vec<f64>,
    seed: u64,
    training_meta: Option<TrainingMeta>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableDoc<T> {
    format: String,
    version: u64,
    kind: String,
    n: usize,
    k: usize,
    #[serde(flatten)]
    body: T,
}

#[derive(Debug, Serialize, Deserialize)]
struct AccuracyBody {
    accuracy: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Ds0Body {
    means: Vec<Vec<Vec<f64>>>,
}

const KIND_EVIDENCE: &str = "evidence";
const KIND_ACCURACY: &str = "class_accuracy";
const KIND_DS0: &str = "ds0_reference";

fn write_json<T: Serialize>(path: &Path, doc: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(doc).expect("documents serialize");
    fs::write(path, text + "\n").map_err(|e| FusionError::io(path, e))
}

/// Parse, then check format, version and kind before decoding the body.
fn read_doc<T: DeserializeOwned>(path: &Path, kind: &str) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| FusionError::io(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| json_error(path, e))?;
    let field_error = |message: String| FusionError::Parse {
        path: path.to_path_buf(),
        line: 0,
        column: 0,
        message,
    };
    if value.get("format").and_then(|f| f.as_str()) != Some(FORMAT) {
        return Err(field_error(format!("not a {FORMAT} document")));
    }
    let version = value
        .get("version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| field_error("missing version".into()))?;
    if version != PARAMS_VERSION {
        return Err(FusionError::VersionMismatch {
            found: version,
            expected: PARAMS_VERSION,
        });
    }
    let found = value.get("kind").and_then(|k| k.as_str()).unwrap_or("");
    if found != kind {
        return Err(field_error(format!(
            "expected kind {kind:?}, found {found:?}"
        )));
    }
    serde_json::from_value(value).map_err(|e| field_error(e.to_string()))
}

pub fn save_evidence(path: impl AsRef<Path>, artifact: &EvidenceArtifact) -> Result<()> {
    let p = &artifact.params;
    let weights = (0..p.classifiers())
        .map(|n| {
            (0..p.classes())
                .map(|k| p.reference(n, k).to_vec())
                .collect()
        })
        .collect();
    write_json(
        path.as_ref(),
        &EvidenceDoc {
            format: FORMAT.into(),
            version: PARAMS_VERSION,
            kind: KIND_EVIDENCE.into(),
            mode: p.mode(),
            n: p.classifiers(),
            k: p.classes(),
            weights,
            ignorance: p.ignorance().to_vec(),
            seed: artifact.seed,
            training_meta: artifact.training_meta.clone(),
        },
    )
}

pub fn load_evidence(path: impl AsRef<Path>) -> Result<EvidenceArtifact> {
    let path = path.as_ref();
    let doc: EvidenceDoc = read_doc(path, KIND_EVIDENCE)?;
    let dim = doc.mode.reference_len(doc.k);
    let shaped = doc.weights.len() == doc.n
        && doc
            .weights
            .iter()
            .all(|row| row.len() == doc.k && row.iter().all(|w| w.len() == dim));
    if !shaped {
        return Err(FusionError::ShapeMismatch(format!(
            "{} weights must be {}x{}x{dim}",
            doc.mode, doc.n, doc.k
        )));
    }
    let weights = doc.weights.into_iter().flatten().flatten().collect();
    Ok(EvidenceArtifact {
        params: EvidenceParams::new(doc.mode, doc.n, doc.k, weights, doc.ignorance)?,
        seed: doc.seed,
        training_meta: doc.training_meta,
    })
}

pub fn save_accuracy_table(path: impl AsRef<Path>, table: &ClassAccuracyTable) -> Result<()> {
    write_json(
        path.as_ref(),
        &TableDoc {
            format: FORMAT.into(),
            version: PARAMS_VERSION,
            kind: KIND_ACCURACY.into(),
            n: table.classifiers(),
            k: table.classes(),
            body: AccuracyBody {
                accuracy: table.rows().to_vec(),
            },
        },
    )
}

pub fn load_accuracy_table(path: impl AsRef<Path>) -> Result<ClassAccuracyTable> {
    let doc: TableDoc<AccuracyBody> = read_doc(path.as_ref(), KIND_ACCURACY)?;
    let table = ClassAccuracyTable::new(doc.body.accuracy)?;
    if table.classifiers() != doc.n || table.classes() != doc.k {
        return Err(FusionError::ShapeMismatch(
            "accuracy table shape differs from header".into(),
        ));
    }
    Ok(table)
}

pub fn save_ds0_reference(path: impl AsRef<Path>, reference: &Ds0Reference) -> Result<()> {
    write_json(
        path.as_ref(),
        &TableDoc {
            format: FORMAT.into(),
            version: PARAMS_VERSION,
            kind: KIND_DS0.into(),
            n: reference.classifiers(),
            k: reference.classes(),
            body: Ds0Body {
                means: reference.means().to_vec(),
            },
        },
    )
}

pub fn load_ds0_reference(path: impl AsRef<Path>) -> Result<Ds0Reference> {
    let doc: TableDoc<Ds0Body> = read_doc(path.as_ref(), KIND_DS0)?;
    let reference = Ds0Reference::new(doc.body.means)?;
    if reference.classifiers() != doc.n || reference.classes() != doc.k {
        return Err(FusionError::ShapeMismatch(
            "reference shape differs from header".into(),
        ));
    }
    Ok(reference)
}
