use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::{TaskDataset, TaskError};
use crate::elm::TaskKind;
use crate::numerics::RealMatrix;

/// Feature count the banknote task is described with.
pub const BANKNOTE_PAPER_FEATURES: usize = 5;
/// Feature count of the public banknote-authentication file (variance,
/// skewness, curtosis and entropy of the wavelet-transformed image).
pub const BANKNOTE_PUBLIC_FEATURES: usize = 4;

/// Column layout of a comma-separated dataset file.
///
/// * `Iris`: four features, then the species name.
/// * `Wine`: class `1..=3`, then thirteen features.
/// * `Banknote`: `features` numeric columns, then class `0` or `1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TabularSchema {
    Iris,
    Wine,
    Banknote { features: usize },
}

const IRIS_CLASSES: [&str; 3] = ["Iris-setosa", "Iris-versicolor", "Iris-virginica"];

impl TabularSchema {
    pub fn banknote() -> Self {
        TabularSchema::Banknote {
            features: BANKNOTE_PAPER_FEATURES,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TabularSchema::Iris => "iris",
            TabularSchema::Wine => "wine",
            TabularSchema::Banknote { .. } => "banknote",
        }
    }

    fn feature_count(&self) -> usize {
        match *self {
            TabularSchema::Iris => 4,
            TabularSchema::Wine => 13,
            TabularSchema::Banknote { features } => features,
        }
    }

    fn kind(&self) -> TaskKind {
        match self {
            TabularSchema::Iris | TabularSchema::Wine => TaskKind::MultiClassOneHot { classes: 3 },
            TabularSchema::Banknote { .. } => TaskKind::BinaryThreshold,
        }
    }

    fn labels(&self) -> Vec<String> {
        match self {
            TabularSchema::Iris => IRIS_CLASSES.iter().map(|s| s.to_string()).collect(),
            TabularSchema::Wine => (1..=3).map(|c| c.to_string()).collect(),
            TabularSchema::Banknote { .. } => vec!["0".into(), "1".into()],
        }
    }

    /// Splits one record into features and a class index.
    fn parse_record(&self, fields: &[&str]) -> Result<(Vec<f64>, usize), String> {
        let nf = self.feature_count();
        if fields.len() != nf + 1 {
            return Err(format!("expected {} columns, found {}", nf + 1, fields.len()));
        }
        let (label, feats) = match self {
            TabularSchema::Wine => (fields[0], &fields[1..]),
            _ => (fields[nf], &fields[..nf]),
        };
        let values = feats
            .iter()
            .enumerate()
            .map(|(i, f)| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| format!("feature {} is not a number: {f:?}", i + 1))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let class = match self {
            TabularSchema::Iris => IRIS_CLASSES.iter().position(|c| *c == label),
            TabularSchema::Wine => match label {
                "1" => Some(0),
                "2" => Some(1),
                "3" => Some(2),
                _ => None,
            },
            TabularSchema::Banknote { .. } => match label {
                "0" => Some(0),
                "1" => Some(1),
                _ => None,
            },
        }
        .ok_or_else(|| format!("unknown label {label:?}"))?;
        Ok((values, class))
    }
}

/// Parses dataset text under `schema`. Blank lines and lines starting with
/// `#` are skipped; `origin` names the source in error messages.
pub fn parse_tabular_task(text: &str, schema: TabularSchema, origin: &str) -> Result<TaskDataset, TaskError> {
    let kind = schema.kind();
    let outputs = kind.output_nodes();
    let mut features = Vec::new();
    let mut targets = Vec::new();
    let mut rows = 0;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let (values, class) = schema.parse_record(&fields).map_err(|message| TaskError::Parse {
            path: origin.to_string(),
            line: i + 1,
            message,
        })?;
        features.extend(values);
        match kind {
            TaskKind::MultiClassOneHot { classes } => {
                targets.extend((0..classes).map(|c| if c == class { 1.0 } else { 0.0 }))
            }
            _ => targets.push(class as f64),
        }
        rows += 1;
    }
    Ok(TaskDataset {
        name: schema.name().to_string(),
        features: RealMatrix::new(rows, schema.feature_count(), features)?,
        targets: RealMatrix::new(rows, outputs, targets)?,
        kind,
        labels: schema.labels(),
    })
}

/// Reads and parses a dataset file.
pub fn load_tabular_task(path: &Path, schema: TabularSchema) -> Result<TaskDataset, TaskError> {
    let text = std::fs::read_to_string(path).map_err(|source| TaskError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_tabular_task(&text, schema, &path.display().to_string())
}

/// Directory holding the dataset files shipped with the crate.
pub fn bundled_data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
}

/// Loads a shipped dataset by task name. The banknote file carries the four
/// public features.
pub fn bundled(task: &str) -> Result<TaskDataset, TaskError> {
    let (file, schema) = match task {
        "iris" => ("iris.csv", TabularSchema::Iris),
        "wine" => ("wine.csv", TabularSchema::Wine),
        "banknote" => (
            "banknote.csv",
            TabularSchema::Banknote {
                features: BANKNOTE_PUBLIC_FEATURES,
            },
        ),
        other => {
            return Err(TaskError::Parse {
                path: other.to_string(),
                line: 0,
                message: "no bundled dataset with this name".into(),
            })
        }
    };
    load_tabular_task(&bundled_data_dir().join(file), schema)
}

/// Outcome of checking one file against the checksum list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataCheck {
    pub file: String,
    pub expected: String,
    pub actual: Option<String>,
}

impl DataCheck {
    pub fn ok(&self) -> bool {
        self.actual.as_deref() == Some(self.expected.as_str())
    }
}

/// Compares every file listed in `SHA256SUMS` under `dir` with its digest.
pub fn verify_bundled_data(dir: &Path) -> Result<Vec<DataCheck>, TaskError> {
    let sums_path = dir.join("SHA256SUMS");
    let sums = std::fs::read_to_string(&sums_path).map_err(|source| TaskError::Io {
        path: sums_path.display().to_string(),
        source,
    })?;
    let mut checks = Vec::new();
    for (i, line) in sums.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(expected), Some(file)) = (parts.next(), parts.next()) else {
            return Err(TaskError::Parse {
                path: sums_path.display().to_string(),
                line: i + 1,
                message: "expected `<sha256> <file>`".into(),
            });
        };
        let actual = std::fs::read(dir.join(file)).ok().map(|bytes| {
            Sha256::digest(&bytes)
                .iter()
                .map(|b| format!("{b:02x}"))
                .collect::<String>()
        });
        checks.push(DataCheck {
            file: file.to_string(),
            expected: expected.to_lowercase(),
            actual,
        });
    }
    Ok(checks)
}
