//! Periodic request-rate profiles.
//!
//! Rates are in requests per minute over a period of `T` minutes. Both
//! profiles are piecewise linear and symmetric about `T / 2`, so window
//! volumes are exact trapezoid sums and the busiest window of any duration is
//! the one centred on the peak.

use crate::error::{invalid, Error, Result};

/// Default period: one day in minutes.
pub const DEFAULT_PERIOD: f64 = 1440.0;
/// Default peak rate of the triangular profile.
pub const DEFAULT_LAMBDA_HIGH: f64 = 20.0;
/// Default low rate relative to the peak for plateau/valley profiles.
pub const DEFAULT_LOW_RATIO: f64 = 0.1;

/// Shape parameters of a rate profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileShape {
    /// Rises linearly from zero at `t = 0` to `lambda_high` at `T / 2`, then
    /// falls back to zero at `T`.
    Triangular { lambda_high: f64 },
    /// Linear ramps between `lambda_low` and `lambda_high` occupying a
    /// fraction `1 - |h|` of the period. For `h > 0` the rest is a
    /// `lambda_low` plateau split across both ends (a valley around a narrow
    /// peak); for `h < 0` it is a `lambda_high` plateau in the middle.
    PlateauValley {
        lambda_high: f64,
        lambda_low: f64,
        h: f64,
    },
}

/// A rate profile `lambda(t)` over `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateProfile {
    period: f64,
    shape: ProfileShape,
    knots: Vec<(f64, f64)>,
    cumulative: Vec<f64>,
}

/// A chosen allocation interval `[start, end]` and its expected request count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstantiationWindow {
    pub start: f64,
    pub end: f64,
    pub volume: f64,
}

impl InstantiationWindow {
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }
}

impl RateProfile {
    pub fn triangular(period: f64, lambda_high: f64) -> Result<Self> {
        check_period(period)?;
        check_rate("lambda_high", lambda_high)?;
        Ok(Self::build(
            period,
            ProfileShape::Triangular { lambda_high },
            vec![(0.0, 0.0), (period / 2.0, lambda_high), (period, 0.0)],
        ))
    }

    pub fn plateau_valley(period: f64, lambda_high: f64, lambda_low: f64, h: f64) -> Result<Self> {
        check_period(period)?;
        check_rate("lambda_high", lambda_high)?;
        check_rate("lambda_low", lambda_low)?;
        if lambda_low > lambda_high {
            return Err(invalid("lambda_low must not exceed lambda_high"));
        }
        if !(-1.0..=1.0).contains(&h) {
            return Err(invalid(format!("shape parameter h = {h} outside [-1, 1]")));
        }
        let half = period / 2.0;
        let knots = if h >= 1.0 {
            vec![(0.0, lambda_low), (period, lambda_low)]
        } else if h <= -1.0 {
            vec![(0.0, lambda_high), (period, lambda_high)]
        } else if h > 0.0 {
            let a = h * half;
            vec![
                (0.0, lambda_low),
                (a, lambda_low),
                (half, lambda_high),
                (period - a, lambda_low),
                (period, lambda_low),
            ]
        } else if h < 0.0 {
            let a = (1.0 + h) * half;
            vec![
                (0.0, lambda_low),
                (a, lambda_high),
                (period - a, lambda_high),
                (period, lambda_low),
            ]
        } else {
            vec![(0.0, lambda_low), (half, lambda_high), (period, lambda_low)]
        };
        Ok(Self::build(
            period,
            ProfileShape::PlateauValley {
                lambda_high,
                lambda_low,
                h,
            },
            knots,
        ))
    }

    fn build(period: f64, shape: ProfileShape, knots: Vec<(f64, f64)>) -> Self {
        let mut cumulative = Vec::with_capacity(knots.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in knots.windows(2) {
            acc += (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0;
            cumulative.push(acc);
        }
        Self {
            period,
            shape,
            knots,
            cumulative,
        }
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn shape(&self) -> ProfileShape {
        self.shape
    }

    /// Nominal peak rate `lambda_high`.
    pub fn peak_rate(&self) -> f64 {
        match self.shape {
            ProfileShape::Triangular { lambda_high } => lambda_high,
            ProfileShape::PlateauValley { lambda_high, .. } => lambda_high,
        }
    }

    pub fn mean_rate(&self) -> f64 {
        self.total_volume() / self.period
    }

    pub fn total_volume(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// `lambda(t)` for `t` in `[0, T]`.
    pub fn rate_at(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        let i = self.segment(t);
        let (t0, r0) = self.knots[i];
        let (t1, r1) = self.knots[i + 1];
        Ok(r0 + (r1 - r0) * (t - t0) / (t1 - t0))
    }

    /// Expected requests in `[t1, t2]`.
    pub fn volume(&self, t1: f64, t2: f64) -> Result<f64> {
        self.check_time(t1)?;
        self.check_time(t2)?;
        if t1 > t2 {
            return Err(invalid(format!("window start {t1} after end {t2}")));
        }
        Ok((self.volume_to(t2) - self.volume_to(t1)).max(0.0))
    }

    /// The window of duration `d` with the largest volume, centred on the peak.
    pub fn best_window(&self, d: f64) -> Result<InstantiationWindow> {
        if !(d > 0.0 && d <= self.period) {
            return Err(invalid(format!(
                "duration {d} outside (0, {}]",
                self.period
            )));
        }
        let start = (self.period - d) / 2.0;
        let end = start + d;
        Ok(InstantiationWindow {
            start,
            end,
            volume: self.volume_to(end) - self.volume_to(start),
        })
    }

    /// The same shape with rates scaled so the period holds `reference_volume`
    /// requests.
    pub fn scale_for_constant_volume(&self, reference_volume: f64) -> Result<Self> {
        if !(reference_volume > 0.0 && reference_volume.is_finite()) {
            return Err(invalid("reference volume must be positive"));
        }
        let factor = reference_volume / self.total_volume();
        match self.shape {
            ProfileShape::Triangular { lambda_high } => {
                Self::triangular(self.period, lambda_high * factor)
            }
            ProfileShape::PlateauValley {
                lambda_high,
                lambda_low,
                h,
            } => Self::plateau_valley(self.period, lambda_high * factor, lambda_low * factor, h),
        }
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if t >= 0.0 && t <= self.period {
            Ok(())
        } else {
            Err(Error::TimeOutOfRange {
                t,
                period: self.period,
            })
        }
    }

    /// Index of the segment containing `t`.
    fn segment(&self, t: f64) -> usize {
        let i = self.knots.partition_point(|&(k, _)| k <= t);
        i.clamp(1, self.knots.len() - 1) - 1
    }

    fn volume_to(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let (t0, r0) = self.knots[i];
        let (t1, r1) = self.knots[i + 1];
        let x = t - t0;
        let slope = (r1 - r0) / (t1 - t0);
        self.cumulative[i] + x * (r0 + slope * x / 2.0)
    }
}

fn check_period(period: f64) -> Result<()> {
    if period > 0.0 && period.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("period {period} must be positive")))
    }
}

fn check_rate(name: &str, rate: f64) -> Result<()> {
    if rate >= 0.0 && rate.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!(
            "{name} = {rate} must be a nonnegative rate"
        )))
    }
}
