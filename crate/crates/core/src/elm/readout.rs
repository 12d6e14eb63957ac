use serde::{Deserialize, Serialize};

use super::{decide, ElmError, HiddenMatrix, Prediction, TaskKind, HIDDEN_HALF_WIDTH, HIDDEN_NODES};
use crate::numerics::{ols_solve, ridge_solve, RealMatrix};
use crate::optics::{total_intensity, CombState, DarkNoise, FilterShape, LineAttenuation, MIN_ATTENUATION_DB};

/// How a non-negative weight becomes a readout filter setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightMapping {
    /// Weights rescaled to `[0, 1]` and mapped linearly onto `[-30, 0]` dB,
    /// as a real programmable filter would be driven.
    DbLinear,
    /// Power transmission proportional to the weight. Not limited by the
    /// filter's dB range; used to check optical against digital weighting.
    PowerLinear,
}

/// Output reconstruction `y = c_plus·I₁ + c_minus·I₂ + c_zero`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadoutCoefficients {
    pub c_plus: f64,
    pub c_minus: f64,
    pub c_zero: f64,
}

impl ReadoutCoefficients {
    pub fn apply(&self, i1: f64, i2: f64) -> f64 {
        self.c_plus * i1 + self.c_minus * i2 + self.c_zero
    }
}

/// Output weights `W` (31 × outputs) and, once split, their positive and
/// negative parts.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSet {
    pub w: RealMatrix,
    pub w_plus: Option<RealMatrix>,
    pub w_minus: Option<RealMatrix>,
    /// One entry per output node once trained.
    pub c: Vec<ReadoutCoefficients>,
    pub weight_mapping: WeightMapping,
}

impl WeightSet {
    pub fn from_weights(w: RealMatrix) -> Self {
        Self {
            w,
            w_plus: None,
            w_minus: None,
            c: Vec::new(),
            weight_mapping: WeightMapping::DbLinear,
        }
    }

    pub fn outputs(&self) -> usize {
        self.w.ncols()
    }
}

/// Ridge regression of the targets on the hidden matrix.
pub fn train_digital(h: &HiddenMatrix, y: &RealMatrix, lambda: f64) -> Result<WeightSet, ElmError> {
    Ok(WeightSet::from_weights(ridge_solve(h.matrix(), y, lambda)?))
}

/// `y = h · W` followed by the task's decision rule.
pub fn predict_digital(h: &[f64], ws: &WeightSet, kind: TaskKind) -> Result<Prediction, ElmError> {
    if h.len() != ws.w.nrows() {
        return Err(ElmError::Dimension(format!(
            "hidden row has {} entries, weights expect {}",
            h.len(),
            ws.w.nrows()
        )));
    }
    Ok(decide(&ws.w.left_mul_vec(h), kind))
}

/// `W⁺ = max(W, 0)`, `W⁻ = max(-W, 0)`.
pub fn split_weights(ws: &WeightSet) -> WeightSet {
    let plus = ws.w.map(|v| if v > 0.0 { v } else { 0.0 });
    let minus = ws.w.map(|v| if v < 0.0 { -v } else { 0.0 });
    WeightSet {
        w_plus: Some(plus),
        w_minus: Some(minus),
        ..ws.clone()
    }
}

/// Common scale of the two weight halves of one output node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightScale {
    pub min_nonzero: f64,
    pub max: f64,
}

impl WeightScale {
    /// Scale over both halves together, so the two filters stay comparable.
    /// `None` when every weight is zero.
    pub fn joint(plus: &[f64], minus: &[f64]) -> Option<Self> {
        let nonzero = plus.iter().chain(minus).copied().filter(|&v| v > 0.0);
        let (lo, hi) = nonzero.fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
        (hi > 0.0).then_some(Self {
            min_nonzero: lo,
            max: hi,
        })
    }
}

/// Readout filter for one non-negative weight half. Hidden node `j` sits on
/// line `k = j - 15`; lines outside the hidden window are blocked.
///
/// Zero weights block their line. Otherwise [`WeightMapping::DbLinear`] maps
/// the joint minimum to -30 dB and the joint maximum to 0 dB, and
/// [`WeightMapping::PowerLinear`] transmits `w / max`.
pub fn weights_to_filter(
    w_half: &[f64],
    scale: Option<WeightScale>,
    mapping: WeightMapping,
) -> Result<FilterShape, ElmError> {
    if w_half.len() != HIDDEN_NODES {
        return Err(ElmError::Dimension(format!(
            "weight half has {} entries, expected {HIDDEN_NODES}",
            w_half.len()
        )));
    }
    if let Some(&bad) = w_half.iter().find(|&&v| v < 0.0 || !v.is_finite()) {
        return Err(ElmError::Dimension(format!("weight half has invalid entry {bad}")));
    }
    let settings = w_half
        .iter()
        .map(|&w| match scale {
            Some(s) if w > 0.0 => match mapping {
                WeightMapping::DbLinear => {
                    let unit = if s.max > s.min_nonzero {
                        ((w - s.min_nonzero) / (s.max - s.min_nonzero)).clamp(0.0, 1.0)
                    } else {
                        1.0
                    };
                    LineAttenuation::Db(MIN_ATTENUATION_DB * (1.0 - unit))
                }
                WeightMapping::PowerLinear => LineAttenuation::Transmission((w / s.max).min(1.0)),
            },
            _ => LineAttenuation::Block,
        })
        .collect();
    Ok(FilterShape::new(-HIDDEN_HALF_WIDTH, settings)?.with_outside(LineAttenuation::Block))
}

/// `(F⁺, F⁻)` for each output node of a split weight set.
pub fn readout_filters(ws: &WeightSet) -> Result<Vec<(FilterShape, FilterShape)>, ElmError> {
    let (plus, minus) = match (&ws.w_plus, &ws.w_minus) {
        (Some(p), Some(m)) => (p, m),
        _ => return Err(ElmError::NotSplit),
    };
    (0..ws.outputs())
        .map(|o| {
            let p = plus.col(o);
            let m = minus.col(o);
            let scale = WeightScale::joint(&p, &m);
            Ok((
                weights_to_filter(&p, scale, ws.weight_mapping)?,
                weights_to_filter(&m, scale, ws.weight_mapping)?,
            ))
        })
        .collect()
}

/// Photodiode readings `(I₁, I₂)` behind the two readout filters.
pub fn optical_readout(
    hidden: &CombState,
    f_plus: &FilterShape,
    f_minus: &FilterShape,
    noise: Option<(DarkNoise, DarkNoise)>,
) -> (f64, f64) {
    let (n1, n2) = noise.unzip();
    (
        total_intensity(hidden, f_plus, n1).intensity,
        total_intensity(hidden, f_minus, n2).intensity,
    )
}

/// Least-squares fit of `y ≈ c_plus·I₁ + c_minus·I₂ + c_zero`.
///
/// A photodiode that read exactly zero on every sample (its filter blocks
/// everything, e.g. when all weights share one sign) gets coefficient 0, the
/// minimum-norm choice. Any other rank deficiency is an error.
pub fn train_c(readings: &[(f64, f64)], targets: &[f64]) -> Result<ReadoutCoefficients, ElmError> {
    if readings.len() != targets.len() {
        return Err(ElmError::Dimension(format!(
            "{} readings but {} targets",
            readings.len(),
            targets.len()
        )));
    }
    if readings.len() < 3 {
        return Err(ElmError::TooFewReadings(readings.len()));
    }
    let use1 = readings.iter().any(|r| r.0 != 0.0);
    let use2 = readings.iter().any(|r| r.1 != 0.0);
    let rows: Vec<Vec<f64>> = readings
        .iter()
        .map(|&(a, b)| {
            let mut row = Vec::with_capacity(3);
            if use1 {
                row.push(a);
            }
            if use2 {
                row.push(b);
            }
            row.push(1.0);
            row
        })
        .collect();
    let a = RealMatrix::from_rows(&rows)?;
    let c = ols_solve(&a, &RealMatrix::column(targets)?)?.col(0);
    let mut it = c.into_iter();
    let c_plus = if use1 { it.next().unwrap_or(0.0) } else { 0.0 };
    let c_minus = if use2 { it.next().unwrap_or(0.0) } else { 0.0 };
    Ok(ReadoutCoefficients {
        c_plus,
        c_minus,
        c_zero: it.next().unwrap_or(0.0),
    })
}

/// Coefficients implied by the weights themselves under
/// [`WeightMapping::PowerLinear`]: `I₁ - I₂ = h·w / max`, so
/// `c = (max, -max, 0)`.
pub fn implied_c(ws: &WeightSet) -> Result<Vec<ReadoutCoefficients>, ElmError> {
    if ws.weight_mapping != WeightMapping::PowerLinear {
        return Err(ElmError::NoClosedForm);
    }
    let (plus, minus) = match (&ws.w_plus, &ws.w_minus) {
        (Some(p), Some(m)) => (p, m),
        _ => return Err(ElmError::NotSplit),
    };
    Ok((0..ws.outputs())
        .map(|o| {
            let max = WeightScale::joint(&plus.col(o), &minus.col(o)).map_or(0.0, |s| s.max);
            ReadoutCoefficients {
                c_plus: max,
                c_minus: -max,
                c_zero: 0.0,
            }
        })
        .collect())
}

/// Reconstructs each output node from its readings and applies the decision
/// rule.
pub fn predict_optical(
    readings: &[(f64, f64)],
    c: &[ReadoutCoefficients],
    kind: TaskKind,
) -> Result<Prediction, ElmError> {
    if readings.len() != c.len() {
        return Err(ElmError::Dimension(format!(
            "{} reading pairs for {} output nodes",
            readings.len(),
            c.len()
        )));
    }
    let y: Vec<f64> = readings.iter().zip(c).map(|(&(i1, i2), c)| c.apply(i1, i2)).collect();
    Ok(decide(&y, kind))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::CombState;
    use num_complex::Complex64;

    fn column_set(w: &[f64]) -> WeightSet {
        WeightSet::from_weights(RealMatrix::column(w).unwrap())
    }

    fn padded(head: &[f64]) -> Vec<f64> {
        let mut v = head.to_vec();
        v.resize(HIDDEN_NODES, 0.0);
        v
    }

    #[test]
    fn split_examples() {
        let s = split_weights(&column_set(&[1.0, -2.0, 0.0]));
        assert_eq!(s.w_plus.as_ref().unwrap().as_slice(), &[1.0, 0.0, 0.0]);
        assert_eq!(s.w_minus.as_ref().unwrap().as_slice(), &[0.0, 2.0, 0.0]);
        let s = split_weights(&column_set(&[1.0, 2.0]));
        assert_eq!(s.w_minus.unwrap().as_slice(), &[0.0, 0.0]);
        let s = split_weights(&column_set(&[0.0, 0.0]));
        assert_eq!(s.w_plus.unwrap().as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn db_linear_filter() {
        let plus = padded(&[4.0, 1.0, 0.0]);
        let minus = padded(&[0.0, 0.0, 2.5]);
        let scale = WeightScale::joint(&plus, &minus);
        let f = weights_to_filter(&plus, scale, WeightMapping::DbLinear).unwrap();
        assert_eq!(f.at(-15), LineAttenuation::Db(0.0));
        assert_eq!(f.at(-14), LineAttenuation::Db(-30.0));
        assert_eq!(f.at(-13), LineAttenuation::Block);
        assert_eq!(f.at(16), LineAttenuation::Block);
        let g = weights_to_filter(&minus, scale, WeightMapping::DbLinear).unwrap();
        assert_eq!(g.at(-13), LineAttenuation::Db(-15.0));
    }

    #[test]
    fn power_linear_filter() {
        let plus = padded(&[2.0, 1.0]);
        let scale = WeightScale::joint(&plus, &padded(&[]));
        let f = weights_to_filter(&plus, scale, WeightMapping::PowerLinear).unwrap();
        assert_eq!(f.at(-15).power_factor(), 1.0);
        assert_eq!(f.at(-14).power_factor(), 0.5);
        assert_eq!(f.at(-13), LineAttenuation::Block);
    }

    #[test]
    fn all_zero_weights_block_everything() {
        let zeros = padded(&[]);
        let scale = WeightScale::joint(&zeros, &zeros);
        assert!(scale.is_none());
        let f = weights_to_filter(&zeros, scale, WeightMapping::DbLinear).unwrap();
        assert!(f.attenuations().iter().all(|a| *a == LineAttenuation::Block));
    }

    #[test]
    fn readout_examples() {
        let c = CombState::new(0, vec![Complex64::new(0.0, 3.0)]).unwrap();
        let (i1, i2) = optical_readout(&c, &FilterShape::block_all(), &FilterShape::pass_through(), None);
        assert_eq!((i1, i2), (0.0, 9.0));
        let (i1, i2) = optical_readout(&c, &FilterShape::pass_through(), &FilterShape::pass_through(), None);
        assert_eq!(i1, i2);
    }

    #[test]
    fn c_fit_examples() {
        let targets = [0.5, 1.0, 2.0, 3.5, 4.0];
        let readings: Vec<(f64, f64)> = targets.iter().map(|&t| (t, 0.0)).collect();
        let c = train_c(&readings, &targets).unwrap();
        assert!((c.c_plus - 1.0).abs() < 1e-12);
        assert_eq!(c.c_minus, 0.0);
        assert!(c.c_zero.abs() < 1e-12);

        let both: Vec<(f64, f64)> = readings.iter().enumerate().map(|(i, r)| (r.0, (i * i) as f64)).collect();
        let c = train_c(&both, &targets).unwrap();
        let shifted: Vec<f64> = targets.iter().map(|t| t + 0.75).collect();
        let d = train_c(&both, &shifted).unwrap();
        assert!((d.c_zero - c.c_zero - 0.75).abs() < 1e-12);
        assert!((d.c_plus - c.c_plus).abs() < 1e-12);
        assert!((d.c_minus - c.c_minus).abs() < 1e-12);

        assert!(matches!(train_c(&readings[..2], &targets[..2]), Err(ElmError::TooFewReadings(2))));
        let constant = vec![(1.0, 2.0); 5];
        assert!(matches!(train_c(&constant, &targets), Err(ElmError::Numerics(_))));
    }

    #[test]
    fn optical_prediction_examples() {
        let c = ReadoutCoefficients {
            c_plus: 1.0,
            c_minus: -1.0,
            c_zero: 0.0,
        };
        assert_eq!(c.apply(3.0, 1.0), 2.0);
        let bias = ReadoutCoefficients {
            c_plus: 0.0,
            c_minus: 0.0,
            c_zero: 0.7,
        };
        assert_eq!(
            predict_optical(&[(123.0, 4.0)], &[bias], TaskKind::BinaryThreshold).unwrap(),
            Prediction::Class(1)
        );
    }

    #[test]
    fn implied_c_needs_power_linear() {
        let ws = split_weights(&column_set(&padded(&[1.0, -3.0])));
        assert!(matches!(implied_c(&ws), Err(ElmError::NoClosedForm)));
        let ws = WeightSet {
            weight_mapping: WeightMapping::PowerLinear,
            ..ws
        };
        let c = implied_c(&ws).unwrap();
        assert_eq!(c[0].c_plus, 3.0);
        assert_eq!(c[0].c_minus, -3.0);
    }
}
