use num_complex::Complex64;

use super::{CombState, OpticsError};

/// Lowest attenuation a programmable filter line can be set to, in dB.
pub const MIN_ATTENUATION_DB: f64 = -30.0;

/// Setting of one filter line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LineAttenuation {
    /// Power attenuation in dB, within `[-30, 0]`.
    Db(f64),
    /// Power transmission factor in `[0, 1]`, for ideal filters that are not
    /// limited to the device's dB range.
    Transmission(f64),
    /// Complete block.
    Block,
}

impl LineAttenuation {
    pub const PASS: LineAttenuation = LineAttenuation::Db(0.0);

    /// Power transmission factor `F_k`.
    pub fn power_factor(&self) -> f64 {
        match *self {
            LineAttenuation::Db(db) => 10f64.powf(db / 10.0),
            LineAttenuation::Transmission(t) => t,
            LineAttenuation::Block => 0.0,
        }
    }

    /// Amplitude factor `sqrt(F_k)`.
    pub fn amplitude_factor(&self) -> f64 {
        match *self {
            LineAttenuation::Db(db) if db == 0.0 => 1.0,
            other => other.power_factor().sqrt(),
        }
    }

    fn validate(&self, k: i32) -> Result<(), OpticsError> {
        let ok = match *self {
            LineAttenuation::Db(db) => (MIN_ATTENUATION_DB..=0.0).contains(&db),
            LineAttenuation::Transmission(t) => (0.0..=1.0).contains(&t),
            LineAttenuation::Block => true,
        };
        if ok {
            Ok(())
        } else {
            Err(OpticsError::InvalidAttenuation { k, setting: *self })
        }
    }
}

/// Per-line attenuation profile of a programmable spectral filter.
///
/// Entries cover `k = center_offset ..`; every other line gets `outside`,
/// which is pass-through unless set otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterShape {
    center_offset: i32,
    attenuations: Vec<LineAttenuation>,
    outside: LineAttenuation,
}

impl FilterShape {
    pub fn new(center_offset: i32, attenuations: Vec<LineAttenuation>) -> Result<Self, OpticsError> {
        for (i, a) in attenuations.iter().enumerate() {
            a.validate(center_offset + i as i32)?;
        }
        Ok(Self {
            center_offset,
            attenuations,
            outside: LineAttenuation::PASS,
        })
    }

    /// Builds a filter from dB values.
    pub fn from_db(center_offset: i32, db: &[f64]) -> Result<Self, OpticsError> {
        Self::new(center_offset, db.iter().map(|&d| LineAttenuation::Db(d)).collect())
    }

    /// Filter that lets every line through.
    pub fn pass_through() -> Self {
        Self {
            center_offset: 0,
            attenuations: Vec::new(),
            outside: LineAttenuation::PASS,
        }
    }

    /// Filter that blocks every line.
    pub fn block_all() -> Self {
        Self::pass_through().with_outside(LineAttenuation::Block)
    }

    /// Replaces the setting applied to lines outside the stored range.
    pub fn with_outside(mut self, outside: LineAttenuation) -> Self {
        self.outside = outside;
        self
    }

    pub fn center_offset(&self) -> i32 {
        self.center_offset
    }

    pub fn attenuations(&self) -> &[LineAttenuation] {
        &self.attenuations
    }

    pub fn outside(&self) -> LineAttenuation {
        self.outside
    }

    /// Setting applied to line `k`.
    pub fn at(&self, k: i32) -> LineAttenuation {
        let idx = k as i64 - self.center_offset as i64;
        if idx < 0 || idx >= self.attenuations.len() as i64 {
            self.outside
        } else {
            self.attenuations[idx as usize]
        }
    }
}

/// `E'_k = E_k sqrt(F_k)` on every stored line of the comb.
pub fn apply_filter(comb: &CombState, filter: &FilterShape) -> CombState {
    let amplitudes: Vec<Complex64> = comb
        .lines()
        .map(|(k, a)| {
            let f = filter.at(k).amplitude_factor();
            if f == 1.0 {
                a
            } else {
                a * f
            }
        })
        .collect();
    comb.with_amplitudes(comb.center_offset(), amplitudes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_lines() -> CombState {
        CombState::new(-1, vec![Complex64::new(1.0, 0.0), Complex64::new(0.3, -0.4)]).unwrap()
    }

    #[test]
    fn zero_db_is_identity() {
        let c = two_lines();
        let f = FilterShape::from_db(-5, &[0.0; 11]).unwrap();
        assert_eq!(apply_filter(&c, &f), c);
        assert_eq!(apply_filter(&c, &FilterShape::pass_through()), c);
    }

    #[test]
    fn thirty_db_is_one_thousandth_power() {
        let c = CombState::monochromatic(1.0);
        let out = apply_filter(&c, &FilterShape::from_db(0, &[-30.0]).unwrap());
        assert!((out.total_power() - 1e-3).abs() < 1e-18);
        assert!((out.amplitude(0).re - 10f64.powf(-1.5)).abs() < 1e-16);
    }

    #[test]
    fn block_zeroes_line() {
        let c = two_lines();
        let f = FilterShape::new(0, vec![LineAttenuation::Block]).unwrap();
        let out = apply_filter(&c, &f);
        assert_eq!(out.amplitude(0), Complex64::new(0.0, 0.0));
        assert_eq!(out.amplitude(-1), c.amplitude(-1));
        assert_eq!(apply_filter(&c, &FilterShape::block_all()).total_power(), 0.0);
    }

    #[test]
    fn out_of_range_settings_rejected() {
        assert!(FilterShape::from_db(0, &[-30.5]).is_err());
        assert!(FilterShape::from_db(0, &[0.1]).is_err());
        assert!(FilterShape::new(0, vec![LineAttenuation::Transmission(1.5)]).is_err());
        assert!(FilterShape::from_db(0, &[-30.0, 0.0]).is_ok());
    }
}
