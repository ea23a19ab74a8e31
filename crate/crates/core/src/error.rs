use num_complex::Complex64 as C64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("delay grid: {0}")]
    Grid(String),

    #[error("non-finite state encountered at t = {t}")]
    NonFinite { t: f64 },

    #[error("history lookup at t = {t} lies beyond the integration frontier t = {frontier}")]
    BeyondFrontier { t: f64, frontier: f64 },

    #[error("history lookup at t = {t} is not on the sample grid")]
    OffGrid { t: f64 },

    #[error("history at t = {t} is no longer retained")]
    Evicted { t: f64 },

    #[error("feedback kernel is singular at s = {s}")]
    KernelPole { s: C64 },

    #[error(
        "series at t = {t} is outside its stable horizon (doubling the truncation changes it by \
         {change:e}); use the delay-equation backend instead"
    )]
    SeriesHorizon { t: f64, change: f64 },

    #[error("series solutions require gamma == kappa and kappa1 == 0")]
    SeriesParams,
}

pub(crate) fn check_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value, reason: "must be finite" })
    }
}
