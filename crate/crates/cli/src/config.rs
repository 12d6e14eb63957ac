//! Config files: TOML with `[run]`, `[model]`, `[training]`, `[nlc]`,
//! `[noise]` and `[sweep]` sections. Every key is optional.
//!
//! Result files embed the resolved config on `#! ` lines, so a result file
//! can be passed back as `--config`.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use serde::{Deserialize, Serialize};

use fmelm::elm::{InputScale, WeightMapping};
use fmelm::experiments::{CSource, RunConfig, TaskId, WeightingMode};
use fmelm::tasks::SnrReference;

pub const EMBED_PREFIX: &str = "#! ";

#[derive(Debug, Default, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub run: RunSection,
    pub model: ModelSection,
    pub training: TrainingSection,
    pub nlc: NlcSection,
    pub noise: NoiseSection,
    pub sweep: SweepSection,
}

#[derive(Debug, Default, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub task: Option<TaskId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repeats: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub banknote_features: Option<usize>,
}

#[derive(Debug, Default, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_scale: Option<InputScale>,
}

#[derive(Debug, Default, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<WeightingMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mapping: Option<WeightMapping>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_source: Option<CSource>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_fraction: Option<f64>,
}

#[derive(Debug, Default, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NlcSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symbols: Option<usize>,
    /// Absent means no noise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<SnrReference>,
}

#[derive(Debug, Default, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hidden_sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub readout_sigma: Option<f64>,
}

/// Grid specs: a value, a comma list, or `start:stop:step`.
#[derive(Debug, Default, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m1: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m2: Option<String>,
}

impl FileConfig {
    /// Reads a config file, or the embedded config of a result file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let embedded: Vec<&str> = text.lines().filter_map(|l| l.strip_prefix(EMBED_PREFIX)).collect();
        let body = if embedded.is_empty() {
            text.clone()
        } else {
            embedded.join("\n")
        };
        toml::from_str(&body).map_err(|e| anyhow!("{}: {e}", path.display()))
    }

    /// Applies `section.key=value` overrides. Values are TOML; anything that
    /// does not parse as TOML is taken as a string.
    pub fn with_overrides(self, overrides: &[String]) -> Result<Self> {
        if overrides.is_empty() {
            return Ok(self);
        }
        let mut table = toml::Table::try_from(&self)?;
        for o in overrides {
            let (key, value) = o
                .split_once('=')
                .ok_or_else(|| anyhow!("override {o:?} is not key=value"))?;
            let (section, field) = key
                .trim()
                .split_once('.')
                .ok_or_else(|| anyhow!("override key {key:?} must be section.key"))?;
            let value = value.trim();
            let parsed: toml::Value = toml::from_str::<toml::Table>(&format!("v = {value}"))
                .ok()
                .and_then(|mut t| t.remove("v"))
                .unwrap_or_else(|| toml::Value::String(value.to_string()));
            table
                .entry(section.to_string())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()))
                .as_table_mut()
                .ok_or_else(|| anyhow!("{section} is not a section"))?
                .insert(field.to_string(), parsed);
        }
        toml::Value::Table(table)
            .try_into()
            .map_err(|e| anyhow!("invalid override: {e}"))
    }

    /// Fills `cfg` with every value present in the file.
    pub fn apply(&self, cfg: &mut RunConfig) {
        let r = &self.run;
        set(&mut cfg.seed, r.seed);
        set(&mut cfg.repeats, r.repeats);
        if let Some(p) = &r.data {
            cfg.data_path = Some(p.clone());
        }
        set(&mut cfg.banknote_features, r.banknote_features);
        let m = &self.model;
        set(&mut cfg.d, m.d);
        set(&mut cfg.m1, m.m1);
        set(&mut cfg.m2, m.m2);
        set(&mut cfg.epsilon, m.epsilon);
        set(&mut cfg.phi, m.phi);
        set(&mut cfg.input_scale, m.input_scale);
        let t = &self.training;
        set(&mut cfg.lambdas, t.lambda.clone());
        set(&mut cfg.mode, t.mode);
        set(&mut cfg.mapping, t.mapping);
        set(&mut cfg.c_source, t.c_source);
        set(&mut cfg.train_fraction, t.train_fraction);
        let n = &self.nlc;
        set(&mut cfg.nlc.symbols, n.symbols);
        if n.snr_db.is_some() {
            cfg.nlc.snr_db = n.snr_db;
        }
        set(&mut cfg.nlc.reference, n.reference);
        set(&mut cfg.noise.hidden_sigma, self.noise.hidden_sigma);
        set(&mut cfg.noise.readout_sigma, self.noise.readout_sigma);
    }

    /// The fully resolved form of `cfg`, for embedding in result files.
    pub fn resolved(cfg: &RunConfig, sweep: Option<SweepSection>) -> Self {
        Self {
            run: RunSection {
                task: Some(cfg.task),
                seed: Some(cfg.seed),
                repeats: Some(cfg.repeats),
                data: cfg.data_path.clone(),
                banknote_features: Some(cfg.banknote_features),
            },
            model: ModelSection {
                d: Some(cfg.d),
                m1: Some(cfg.m1),
                m2: Some(cfg.m2),
                epsilon: Some(cfg.epsilon),
                phi: Some(cfg.phi),
                input_scale: Some(cfg.input_scale),
            },
            training: TrainingSection {
                lambda: Some(cfg.lambdas.clone()),
                mode: Some(cfg.mode),
                mapping: Some(cfg.mapping),
                c_source: Some(cfg.c_source),
                train_fraction: Some(cfg.train_fraction),
            },
            nlc: NlcSection {
                symbols: Some(cfg.nlc.symbols),
                snr_db: cfg.nlc.snr_db,
                reference: Some(cfg.nlc.reference),
            },
            noise: NoiseSection {
                hidden_sigma: Some(cfg.noise.hidden_sigma),
                readout_sigma: Some(cfg.noise.readout_sigma),
            },
            sweep: sweep.unwrap_or_default(),
        }
    }

    /// TOML text with every line prefixed by [`EMBED_PREFIX`].
    pub fn embedded(&self) -> Result<String> {
        let text = toml::to_string(self)?;
        Ok(text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| format!("{EMBED_PREFIX}{l}\n"))
            .collect())
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

/// Expands a grid spec: `3`, `1,2,3` or `start:stop:step` (inclusive).
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let spec = spec.trim();
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("{s:?} is not a number in grid {spec:?}"))
    };
    match parts.as_slice() {
        [single] => single.split(',').map(num).collect(),
        [start, stop, step] => {
            let (a, b, h) = (num(start)?, num(stop)?, num(step)?);
            if h <= 0.0 || b < a {
                return Err(format!("grid {spec:?} needs start <= stop and step > 0"));
            }
            let n = ((b - a) / h + 1e-9).floor() as usize + 1;
            if n > fmelm::experiments::MAX_SWEEP_CELLS {
                return Err(format!("grid {spec:?} has {n} points"));
            }
            Ok((0..n).map(|i| round10(a + i as f64 * h)).collect())
        }
        _ => Err(format!("grid {spec:?} must be a value, a list, or start:stop:step")),
    }
}

fn round10(v: f64) -> f64 {
    (v * 1e10).round() / 1e10
}

pub fn parse_int_grid(spec: &str) -> Result<Vec<usize>, String> {
    parse_grid(spec)?
        .into_iter()
        .map(|v| {
            if v >= 1.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(format!("{v} is not a positive integer in grid {spec:?}"))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("2.5").unwrap(), vec![2.5]);
        assert_eq!(parse_grid("1,2,4").unwrap(), vec![1.0, 2.0, 4.0]);
        let g = parse_grid("4:10:0.2").unwrap();
        assert_eq!(g.len(), 31);
        assert_eq!(g[1], 4.2);
        assert_eq!(*g.last().unwrap(), 10.0);
        assert_eq!(parse_grid("0.5:3:0.25").unwrap().len(), 11);
        assert!(parse_grid("3:1:1").is_err());
        assert!(parse_grid("1:2:0").is_err());
        assert!(parse_grid("a").is_err());
        assert_eq!(parse_int_grid("1:3:1").unwrap(), vec![1, 2, 3]);
        assert!(parse_int_grid("1.5").is_err());
    }

    #[test]
    fn overrides_and_round_trip() {
        let f = FileConfig::default()
            .with_overrides(&["model.d=2".into(), "training.mode=optical".into(), "run.task=\"wine\"".into()])
            .unwrap();
        assert_eq!(f.model.d, Some(2));
        assert_eq!(f.training.mode, Some(WeightingMode::Optical));
        assert_eq!(f.run.task, Some(TaskId::Wine));
        assert!(FileConfig::default().with_overrides(&["nodot=1".into()]).is_err());
        assert!(FileConfig::default().with_overrides(&["model.q=1".into()]).is_err());

        let cfg = RunConfig::for_task(TaskId::Nlc, WeightingMode::Digital);
        let resolved = FileConfig::resolved(&cfg, None);
        let text = resolved.embedded().unwrap();
        let body: String = text.lines().map(|l| l.strip_prefix(EMBED_PREFIX).unwrap()).collect::<Vec<_>>().join("\n");
        let back: FileConfig = toml::from_str(&body).unwrap();
        let mut rebuilt = RunConfig::for_task(TaskId::Nlc, WeightingMode::Digital);
        rebuilt.seed = 99;
        back.apply(&mut rebuilt);
        assert_eq!(rebuilt, cfg);
    }
}
