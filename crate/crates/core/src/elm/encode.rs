use serde::{Deserialize, Serialize};

use super::{ElmError, HIDDEN_NODES};
use crate::numerics::RealMatrix;
use crate::optics::{FilterShape, MIN_ATTENUATION_DB};

/// How a feature scaled to `[0, 1]` becomes an attenuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputScale {
    /// Affine in dB between floor and ceiling.
    #[default]
    Db,
    /// Affine in power transmission between `10^(floor/10)` and
    /// `10^(ceiling/10)`. Same endpoints, different interior.
    Power,
}

/// Input scaling and replication.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreprocessConfig {
    /// Number of consecutive comb lines carrying each feature.
    pub d: usize,
    pub attenuation_floor_db: f64,
    pub attenuation_ceiling_db: f64,
    #[serde(default)]
    pub scale: InputScale,
}

impl PreprocessConfig {
    pub fn new(d: usize) -> Self {
        Self {
            d,
            attenuation_floor_db: MIN_ATTENUATION_DB,
            attenuation_ceiling_db: 0.0,
            scale: InputScale::Db,
        }
    }

    pub fn with_scale(self, scale: InputScale) -> Self {
        Self { scale, ..self }
    }

    pub fn validate(&self) -> Result<(), ElmError> {
        if self.d == 0 || self.d > HIDDEN_NODES {
            return Err(ElmError::InvalidConfig(format!("d = {} outside 1..=31", self.d)));
        }
        let (lo, hi) = (self.attenuation_floor_db, self.attenuation_ceiling_db);
        if !(lo >= MIN_ATTENUATION_DB && lo < hi && hi <= 0.0) {
            return Err(ElmError::InvalidConfig(format!(
                "attenuation range [{lo}, {hi}] dB must satisfy -30 <= floor < ceiling <= 0"
            )));
        }
        Ok(())
    }
}

/// Filter attenuations for every sample, plus features that were constant on
/// the training rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Preprocessed {
    /// One row per sample, `d · features` dB values.
    pub attenuations: RealMatrix,
    pub constant_features: Vec<usize>,
}

/// Min-max scales each feature on the training rows, maps it affinely onto
/// the attenuation range (clamping values outside the training range) and
/// repeats every feature `d` times in place.
///
/// A feature constant on the training rows maps to the ceiling.
pub fn preprocess(
    features: &RealMatrix,
    cfg: &PreprocessConfig,
    train_indices: &[usize],
) -> Result<Preprocessed, ElmError> {
    cfg.validate()?;
    if train_indices.is_empty() {
        return Err(ElmError::EmptyTrainSet);
    }
    let n = features.nrows();
    if let Some(&bad) = train_indices.iter().find(|&&i| i >= n) {
        return Err(ElmError::IndexOutOfRange { index: bad, len: n });
    }
    let nf = features.ncols();
    if nf * cfg.d > HIDDEN_NODES {
        return Err(ElmError::Capacity(nf * cfg.d));
    }

    let mut lo = vec![f64::INFINITY; nf];
    let mut hi = vec![f64::NEG_INFINITY; nf];
    for &i in train_indices {
        for (j, &v) in features.row(i).iter().enumerate() {
            lo[j] = lo[j].min(v);
            hi[j] = hi[j].max(v);
        }
    }
    let constant_features: Vec<usize> = (0..nf).filter(|&j| lo[j] == hi[j]).collect();
    for &j in &constant_features {
        log::warn!("feature {j} is constant on the training rows; mapped to the ceiling attenuation");
    }

    let floor = cfg.attenuation_floor_db;
    let span = cfg.attenuation_ceiling_db - floor;
    let (t_lo, t_hi) = (db_to_power(floor), db_to_power(cfg.attenuation_ceiling_db));
    let width = nf * cfg.d;
    let mut data = Vec::with_capacity(n * width);
    for row in features.rows_iter() {
        for (j, &v) in row.iter().enumerate() {
            let db = if lo[j] == hi[j] {
                cfg.attenuation_ceiling_db
            } else {
                let unit = ((v - lo[j]) / (hi[j] - lo[j])).clamp(0.0, 1.0);
                match cfg.scale {
                    InputScale::Db => floor + unit * span,
                    InputScale::Power => {
                        (10.0 * (t_lo + unit * (t_hi - t_lo)).log10()).clamp(floor, cfg.attenuation_ceiling_db)
                    }
                }
            };
            data.extend(std::iter::repeat_n(db, cfg.d));
        }
    }
    Ok(Preprocessed {
        attenuations: RealMatrix::new(n, width, data)?,
        constant_features,
    })
}

fn db_to_power(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Places `M` attenuations on the central comb lines of the input filter.
///
/// Odd `M` covers `k = -(M-1)/2 ..= (M-1)/2`; even `M` covers
/// `k = -M/2 ..= M/2 - 1`. All other lines pass unattenuated.
pub fn encode_input(attens: &[f64]) -> Result<FilterShape, ElmError> {
    let m = attens.len();
    if m > HIDDEN_NODES {
        return Err(ElmError::Capacity(m));
    }
    let start = -((m / 2) as i32);
    Ok(FilterShape::from_db(start, attens)?)
}
