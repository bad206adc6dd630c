use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{FusionError, Result};
use crate::model::{one_hot, Frame, FusionDataset, Pattern, ScoreVector};

pub const MANIFEST_VERSION: u64 = 1;

/// Score preprocessing applied at load time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rescale {
    #[default]
    None,
    /// Per-classifier min-max scaling to [0, 1].
    Minmax,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestOptions {
    #[serde(default)]
    pub rescale: Rescale,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifierEntry {
    pub name: String,
    /// Relative paths resolve against the manifest's directory.
    pub scores_path: PathBuf,
}

/// Describes a dataset spread over one scores CSV per classifier plus a
/// targets CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub version: u64,
    pub frame: Vec<String>,
    pub classifiers: Vec<ClassifierEntry>,
    pub targets_path: PathBuf,
    #[serde(default)]
    pub options: ManifestOptions,
    /// Directory relative paths are resolved against; not serialized.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn parse_error(path: &Path, line: u64, column: u64, message: impl Into<String>) -> FusionError {
    FusionError::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message: message.into(),
    }
}

pub(crate) fn json_error(path: &Path, e: serde_json::Error) -> FusionError {
    parse_error(path, e.line() as u64, e.column() as u64, e.to_string())
}

impl Manifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| FusionError::io(path, e))?;
        let mut manifest: Manifest =
            serde_json::from_str(&text).map_err(|e| json_error(path, e))?;
        if manifest.version != MANIFEST_VERSION {
            return Err(FusionError::VersionMismatch {
                found: manifest.version,
                expected: MANIFEST_VERSION,
            });
        }
        manifest.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn validate(&self) -> Result<()> {
        if self.classifiers.is_empty() {
            return Err(FusionError::InvalidConfig(
                "manifest lists no classifiers".into(),
            ));
        }
        let mut paths: Vec<&PathBuf> = self.classifiers.iter().map(|c| &c.scores_path).collect();
        paths.push(&self.targets_path);
        let before = paths.len();
        paths.sort();
        paths.dedup();
        if paths.len() != before {
            return Err(FusionError::InvalidConfig(
                "manifest paths must be distinct".into(),
            ));
        }
        Frame::new(self.frame.clone())?;
        Ok(())
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(path, text + "\n").map_err(|e| FusionError::io(path, e))
    }
}

fn read_csv(path: &Path) -> Result<csv::Reader<fs::File>> {
    let file = fs::File::open(path).map_err(|e| FusionError::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn csv_error(path: &Path, e: csv::Error) -> FusionError {
    let (line, column) = e.position().map(|p| (p.line(), 0)).unwrap_or((0, 0));
    parse_error(path, line, column, e.to_string())
}

fn parse_id(path: &Path, line: u64, field: &str) -> Result<u64> {
    field
        .parse()
        .map_err(|_| parse_error(path, line, 1, format!("invalid pattern_id {field:?}")))
}

/// Rows of one classifier's scores file keyed by pattern id.
fn read_scores(path: &Path, k: usize) -> Result<BTreeMap<u64, Vec<f64>>> {
    let mut reader = read_csv(path)?;
    let header = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.len() != k + 1 || header.get(0) != Some("pattern_id") {
        return Err(parse_error(
            path,
            1,
            1,
            format!(
                "expected header pattern_id,s1..s{k}, got {:?}",
                header.iter().collect::<Vec<_>>()
            ),
        ));
    }
    let mut rows = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != k + 1 {
            return Err(parse_error(
                path,
                line,
                record.len() as u64,
                format!("expected {} fields, found {}", k + 1, record.len()),
            ));
        }
        let id = parse_id(path, line, &record[0])?;
        let mut scores = Vec::with_capacity(k);
        for (col, field) in record.iter().enumerate().skip(1) {
            let value: f64 = field.parse().map_err(|_| {
                parse_error(
                    path,
                    line,
                    col as u64 + 1,
                    format!("invalid score {field:?}"),
                )
            })?;
            if !value.is_finite() {
                return Err(parse_error(path, line, col as u64 + 1, "non-finite score"));
            }
            scores.push(value);
        }
        if rows.insert(id, scores).is_some() {
            return Err(parse_error(
                path,
                line,
                1,
                format!("duplicate pattern_id {id}"),
            ));
        }
    }
    Ok(rows)
}

fn read_targets(path: &Path, frame: &Frame) -> Result<BTreeMap<u64, usize>> {
    let mut reader = read_csv(path)?;
    let header = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.len() != 2 || header.get(0) != Some("pattern_id") || header.get(1) != Some("label") {
        return Err(parse_error(path, 1, 1, "expected header pattern_id,label"));
    }
    let mut rows = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != 2 {
            return Err(parse_error(
                path,
                line,
                record.len() as u64,
                format!("expected 2 fields, found {}", record.len()),
            ));
        }
        let id = parse_id(path, line, &record[0])?;
        let label = frame
            .index_of(&record[1])
            .ok_or_else(|| FusionError::UnknownLabel {
                label: record[1].to_string(),
            })?;
        if rows.insert(id, label).is_some() {
            return Err(parse_error(
                path,
                line,
                1,
                format!("duplicate pattern_id {id}"),
            ));
        }
    }
    Ok(rows)
}

/// Load and join the files of a manifest. Patterns are ordered by id.
pub fn load_dataset(manifest: &Manifest) -> Result<FusionDataset> {
    manifest.validate()?;
    let frame = Frame::new(manifest.frame.clone())?;
    let k = frame.len();
    let targets_path = manifest.resolve(&manifest.targets_path);
    let targets = read_targets(&targets_path, &frame)?;
    let mut per_classifier = Vec::with_capacity(manifest.classifiers.len());
    for entry in &manifest.classifiers {
        let path = manifest.resolve(&entry.scores_path);
        let rows = read_scores(&path, k)?;
        if let Some(&id) = rows.keys().find(|id| !targets.contains_key(id)) {
            return Err(FusionError::MissingPattern {
                pattern_id: id,
                present: path.display().to_string(),
                missing: targets_path.display().to_string(),
            });
        }
        if let Some(&id) = targets.keys().find(|id| !rows.contains_key(id)) {
            return Err(FusionError::MissingPattern {
                pattern_id: id,
                present: targets_path.display().to_string(),
                missing: path.display().to_string(),
            });
        }
        per_classifier.push(rows);
    }
    let patterns = targets
        .iter()
        .map(|(&id, &label)| {
            let scores = per_classifier
                .iter_mut()
                .enumerate()
                .map(|(n, rows)| ScoreVector::new(rows.remove(&id).expect("joined"), n))
                .collect::<Result<Vec<_>>>()?;
            Ok(Pattern {
                id,
                scores,
                target: one_hot(label + 1, k)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let dataset = FusionDataset::new(frame, manifest.classifiers.len(), patterns)?;
    Ok(match manifest.options.rescale {
        Rescale::None => dataset,
        Rescale::Minmax => dataset.minmax_rescaled(),
    })
}

/// Load a manifest file and the dataset it describes.
pub fn load_dataset_from(path: impl AsRef<Path>) -> Result<FusionDataset> {
    load_dataset(&Manifest::load(path)?)
}

/// Write a dataset as CSV files plus `manifest.json` into `dir`.
///
/// Scores are written with the shortest representation that parses back to
/// the same binary64 value.
pub fn write_dataset(
    dataset: &FusionDataset,
    dir: impl AsRef<Path>,
    classifier_names: &[String],
) -> Result<Manifest> {
    let dir = dir.as_ref();
    if classifier_names.len() != dataset.classifier_count() {
        return Err(FusionError::ShapeMismatch(format!(
            "{} names for {} classifiers",
            classifier_names.len(),
            dataset.classifier_count()
        )));
    }
    fs::create_dir_all(dir).map_err(|e| FusionError::io(dir, e))?;
    let k = dataset.classes();
    let header: String = std::iter::once("pattern_id".to_string())
        .chain((1..=k).map(|i| format!("s{i}")))
        .collect::<Vec<_>>()
        .join(",");

    let mut entries = Vec::new();
    for (n, name) in classifier_names.iter().enumerate() {
        let file = PathBuf::from(format!("scores_{name}.csv"));
        let mut out = String::with_capacity(dataset.len() * (k + 1) * 20);
        out.push_str(&header);
        out.push('\n');
        for p in dataset.patterns() {
            out.push_str(&p.id.to_string());
            for s in p.scores[n].scores() {
                out.push(',');
                out.push_str(&s.to_string());
            }
            out.push('\n');
        }
        let path = dir.join(&file);
        fs::write(&path, out).map_err(|e| FusionError::io(&path, e))?;
        entries.push(ClassifierEntry {
            name: name.clone(),
            scores_path: file,
        });
    }

    let mut out = String::from("pattern_id,label\n");
    for p in dataset.patterns() {
        out.push_str(&format!(
            "{},{}\n",
            p.id,
            dataset.frame().labels()[p.label()]
        ));
    }
    let targets = PathBuf::from("targets.csv");
    let path = dir.join(&targets);
    fs::write(&path, out).map_err(|e| FusionError::io(&path, e))?;

    let manifest = Manifest {
        version: MANIFEST_VERSION,
        frame: dataset.frame().labels().to_vec(),
        classifiers: entries,
        targets_path: targets,
        options: ManifestOptions::default(),
        base_dir: dir.to_path_buf(),
    };
    manifest.save(dir.join("manifest.json"))?;
    Ok(manifest)
}
