//! Closed series for the cavity amplitude when `gamma == kappa` and
//! `kappa1 == 0`, valid at all times as a finite sum over delayed towers.
//!
//! With `gamma = kappa` the undelayed part of `D(s)` is a perfect square. The
//! continuous-mode series expands around `s = -kappa` and is finite in the
//! delay index. The discrete-mode series expands around `s = +kappa`; its
//! individual terms grow like `exp(5 kappa t)` before cancelling, which sets a
//! double-precision horizon.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::params::FeedbackParams;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Largest accepted change between truncation `m_max` and `2 m_max`, and the
/// largest accepted rounding estimate.
pub const HORIZON_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEstimate {
    pub value: C64,
    /// `|value(2 m_max) - value(m_max)|`.
    pub truncation_change: f64,
    /// Machine epsilon times the sum of term magnitudes.
    pub rounding: f64,
    pub m_max: usize,
}

fn check_params(params: &FeedbackParams) -> Result<()> {
    if params.kappa1() != 0.0 || (params.gamma() - params.kappa()).abs() > 1e-12 * params.kappa() {
        return Err(Error::SeriesParams);
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    crate::error::check_finite("t", t)?;
    if t < 0.0 {
        return Err(Error::InvalidParameter { name: "t", value: t, reason: "must be non-negative" });
    }
    Ok(())
}

/// Compensated (Neumaier) accumulator.
#[derive(Debug, Default, Clone, Copy)]
struct Neumaier {
    sum: f64,
    comp: f64,
    abs: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs += x.abs();
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `ln k!` for `k = 0..len`.
fn ln_factorials(len: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(len);
    let mut acc = 0.0;
    table.push(0.0);
    for k in 1..len {
        acc += (k as f64).ln();
        table.push(acc);
    }
    table
}

fn ln_binomial(lf: &[f64], n: usize, k: usize) -> f64 {
    lf[n] - lf[k] - lf[n - k]
}

/// Truncation used when the caller does not supply one.
pub fn default_order(params: &FeedbackParams, t: f64) -> usize {
    (8.0 * params.kappa() * t).ceil() as usize + 40
}

/// Discrete-mode tower sum for `m <= m_max`, all delays `p <= p_max` with
/// `t > p tau`. Returns the value and the summed term magnitudes.
fn dm_partial(params: &FeedbackParams, t: f64, m_max: usize, p_max: usize) -> (C64, f64) {
    let (k, tau, phi) = (params.kappa(), params.tau(), params.phi());
    let lf = ln_factorials(2 * m_max + p_max + 3);
    let mut total = C64::new(0.0, 0.0);
    let mut magnitude = 0.0;
    let mut p = 0;
    while p <= p_max && t > p as f64 * tau {
        let x = k * (t - p as f64 * tau);
        let lnx = x.ln();
        let mut acc = Neumaier::default();
        for m in 0..=m_max {
            // C(p + m - 1, p) with C(-1, 0) = 1 and C(p - 1, p) = 0
            let ln_pm = match (m, p) {
                (0, 0) => 0.0,
                (0, _) => continue,
                _ => ln_binomial(&lf, p + m - 1, p),
            };
            let sign = if (m + p) % 2 == 0 { 1.0 } else { -1.0 };
            for l in 0..=m {
                let n = m + l + 1;
                let ln_term = m as f64 * 4f64.ln() + ln_binomial(&lf, m, l) + ln_pm + n as f64 * lnx - lf[n] + x;
                acc.add(sign * ln_term.exp());
            }
        }
        total += acc.value() * C64::from_polar(1.0, -(p as f64) * phi);
        magnitude += acc.abs;
        p += 1;
    }
    (I * total, magnitude)
}

/// Continuous-mode sum; only delays `m tau < t` contribute.
fn cm_partial(params: &FeedbackParams, t: f64, m_max: usize) -> (C64, f64) {
    let (k, tau, phi) = (params.kappa(), params.tau(), params.phi());
    let lf = ln_factorials(2 * m_max + 3);
    let mut total = C64::new(0.0, 0.0);
    let mut magnitude = 0.0;
    let mut m = 0;
    while m <= m_max && t > m as f64 * tau {
        let y = k * (t - m as f64 * tau);
        let lny = y.ln();
        let mut acc = Neumaier::default();
        for l in 0..=m {
            let n = m + l + 1;
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            let ln_term = m as f64 * 2f64.ln() + ln_binomial(&lf, m, l) + n as f64 * lny - lf[n] - y;
            acc.add(sign * ln_term.exp());
        }
        total += acc.value() * C64::from_polar(1.0, m as f64 * phi);
        magnitude += acc.abs;
        m += 1;
    }
    (I * total, magnitude)
}

fn estimate(t: f64, m_max: usize, eval: impl Fn(usize) -> (C64, f64)) -> SeriesEstimate {
    let (value, magnitude) = eval(m_max);
    let (doubled, _) = eval(2 * m_max);
    SeriesEstimate {
        value,
        truncation_change: (doubled - value).norm(),
        rounding: f64::EPSILON * magnitude * if t > 0.0 { 1.0 } else { 0.0 },
        m_max,
    }
}

fn accept(t: f64, est: SeriesEstimate) -> Result<C64> {
    let change = est.truncation_change.max(est.rounding);
    if !est.value.is_finite() || !(change < HORIZON_TOL) {
        return Err(Error::SeriesHorizon { t, change });
    }
    Ok(est.value)
}

/// Discrete-mode series with its truncation diagnostics.
pub fn series_dm_estimate(params: &FeedbackParams, t: f64, m_max: usize, p_max: usize) -> Result<SeriesEstimate> {
    check_params(params)?;
    check_time(t)?;
    Ok(estimate(t, m_max, |m| dm_partial(params, t, m, p_max)))
}

/// `c_g(t)` from the discrete-mode series.
///
/// Fails with [`Error::SeriesHorizon`] when doubling `m_max` moves the result
/// by `HORIZON_TOL` or more, or when rounding in the cancelling sum could.
pub fn series_dm(params: &FeedbackParams, t: f64, m_max: usize, p_max: usize) -> Result<C64> {
    accept(t, series_dm_estimate(params, t, m_max, p_max)?)
}

pub fn series_cm_estimate(params: &FeedbackParams, t: f64, m_max: usize) -> Result<SeriesEstimate> {
    check_params(params)?;
    check_time(t)?;
    Ok(estimate(t, m_max, |m| cm_partial(params, t, m)))
}

/// `c_g(t)` from the continuous-mode series.
pub fn series_cm(params: &FeedbackParams, t: f64, m_max: usize) -> Result<C64> {
    accept(t, series_cm_estimate(params, t, m_max)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params() -> FeedbackParams {
        FeedbackParams::new(1.0, 1.0, 0.0, PI / 3.0, PI).unwrap()
    }

    #[test]
    fn vanishes_at_origin() {
        let p = params();
        assert_eq!(series_dm(&p, 0.0, 10, 10).unwrap(), C64::new(0.0, 0.0));
        assert_eq!(series_cm(&p, 0.0, 10).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn first_interval_is_critically_damped() {
        let p = params();
        for t in [0.1, 0.5, 1.0] {
            let exact = I * t * (-t).exp();
            let dm = series_dm(&p, t, default_order(&p, t), 10).unwrap();
            let cm = series_cm(&p, t, 10).unwrap();
            assert!((dm - exact).norm() < 1e-12, "dm at {t}: {dm} vs {exact}");
            assert!((cm - exact).norm() < 1e-15, "cm at {t}");
        }
    }

    #[test]
    fn rejects_unsupported_parameters() {
        let p = FeedbackParams::new(2.0, 1.0, 0.0, 1.0, PI).unwrap();
        assert_eq!(series_cm(&p, 1.0, 5), Err(Error::SeriesParams));
        let p = FeedbackParams::new(1.0, 1.0, 0.1, 1.0, PI).unwrap();
        assert_eq!(series_dm(&p, 1.0, 5, 5), Err(Error::SeriesParams));
    }

    #[test]
    fn short_truncation_hits_horizon() {
        let p = params();
        assert!(matches!(series_dm(&p, 3.0, 5, 10), Err(Error::SeriesHorizon { .. })));
        assert!(matches!(series_dm(&p, 60.0, default_order(&p, 60.0), 100), Err(Error::SeriesHorizon { .. })));
    }

    #[test]
    fn neumaier_recovers_cancelled_unit() {
        let mut acc = Neumaier::default();
        for x in [1e16, 1.0, -1e16] {
            acc.add(x);
        }
        assert_eq!(acc.value(), 1.0);
    }
}
