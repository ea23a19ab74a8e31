//! Physical parameter set shared by every simulator and analysis routine.
//!
//! All rates are in units of inverse time and are stored exactly as supplied;
//! nothing is normalized here. The feedback phase is the canonical input and
//! the detuning of the central reservoir mode is derived from it.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{check_finite, Error, Result};

/// Atom-cavity coupling `gamma`, feedback-channel coupling `kappa`, extra loss
/// channel `kappa1`, roundtrip delay `tau` and feedback phase `phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeedbackParams {
    gamma: f64,
    kappa: f64,
    kappa1: f64,
    tau: f64,
    phi: f64,
}

impl FeedbackParams {
    pub fn new(gamma: f64, kappa: f64, kappa1: f64, tau: f64, phi: f64) -> Result<Self> {
        check_finite("gamma", gamma)?;
        check_finite("kappa", kappa)?;
        check_finite("kappa1", kappa1)?;
        check_finite("tau", tau)?;
        check_finite("phi", phi)?;
        if gamma < 0.0 {
            return Err(Error::InvalidParameter {
                name: "gamma",
                value: gamma,
                reason: "must be non-negative",
            });
        }
        if kappa <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "kappa",
                value: kappa,
                reason: "must be positive",
            });
        }
        if kappa1 < 0.0 {
            return Err(Error::InvalidParameter {
                name: "kappa1",
                value: kappa1,
                reason: "must be non-negative",
            });
        }
        if tau <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "tau",
                value: tau,
                reason: "must be positive",
            });
        }
        Ok(Self { gamma, kappa, kappa1, tau, phi })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn kappa1(&self) -> f64 {
        self.kappa1
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Detuning of the central reservoir mode, `phi / tau`.
    pub fn delta0(&self) -> f64 {
        self.phi / self.tau
    }

    /// Coupling between the cavity and each discrete reservoir mode,
    /// `2 sqrt(kappa / tau)`.
    pub fn mode_coupling(&self) -> f64 {
        2.0 * (self.kappa / self.tau).sqrt()
    }

    /// `gamma^2 tau / (4 kappa)`; sets the trapped population `1 / (1 + eta)`.
    pub fn eta(&self) -> f64 {
        self.gamma * self.gamma * self.tau / (4.0 * self.kappa)
    }

    /// `kappa * tau`.
    pub fn delay_parameter(&self) -> f64 {
        self.kappa * self.tau
    }

    /// `gamma / kappa`.
    pub fn coupling_parameter(&self) -> f64 {
        self.gamma / self.kappa
    }

    /// True when `phi` is an odd multiple of pi (to within `1e-9` rad).
    pub fn phase_is_odd_pi(&self) -> bool {
        let r = (self.phi / PI - 1.0).rem_euclid(2.0);
        r.min(2.0 - r) * PI < 1e-9
    }

    /// True when `phi` is an even multiple of pi (to within `1e-9` rad).
    pub fn phase_is_even_pi(&self) -> bool {
        let r = (self.phi / PI).rem_euclid(2.0);
        r.min(2.0 - r) * PI < 1e-9
    }

    pub fn with_gamma(self, gamma: f64) -> Result<Self> {
        Self::new(gamma, self.kappa, self.kappa1, self.tau, self.phi)
    }

    pub fn with_kappa1(self, kappa1: f64) -> Result<Self> {
        Self::new(self.gamma, self.kappa, kappa1, self.tau, self.phi)
    }

    pub fn with_tau(self, tau: f64) -> Result<Self> {
        Self::new(self.gamma, self.kappa, self.kappa1, tau, self.phi)
    }

    pub fn with_phi(self, phi: f64) -> Result<Self> {
        Self::new(self.gamma, self.kappa, self.kappa1, self.tau, phi)
    }

    pub fn regime(&self) -> Regime {
        Regime::classify(self.delay_parameter(), self.coupling_parameter())
    }
}

impl fmt::Display for FeedbackParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "gamma={:.16e} kappa={:.16e} kappa1={:.16e} tau={:.16e} phi={:.16e}",
            self.gamma, self.kappa, self.kappa1, self.tau, self.phi
        )
    }
}

fn short(x: f64) -> String {
    if x == 0.0 || (1e-3..1e6).contains(&x.abs()) {
        format!("{}", (x * 1e6).round() / 1e6)
    } else {
        format!("{x:.6e}")
    }
}

/// Thresholds on `kappa * tau`.
pub const SHORT_DELAY_BELOW: f64 = 0.1;
pub const LONG_DELAY_ABOVE: f64 = 10.0;
/// Thresholds on `gamma / kappa`.
pub const STRONG_COUPLING_ABOVE: f64 = 10.0;
pub const BAD_CAVITY_BELOW: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DelayRegime {
    Short,
    Intermediate,
    Long,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingRegime {
    Strong,
    Weak,
    BadCavity,
}

/// Informational classification; never consulted by the physics code.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regime {
    pub delay_parameter: f64,
    pub coupling_parameter: f64,
    pub delay: DelayRegime,
    pub coupling: CouplingRegime,
}

impl Regime {
    pub fn classify(delay_parameter: f64, coupling_parameter: f64) -> Self {
        let delay = if delay_parameter < SHORT_DELAY_BELOW {
            DelayRegime::Short
        } else if delay_parameter > LONG_DELAY_ABOVE {
            DelayRegime::Long
        } else {
            DelayRegime::Intermediate
        };
        let coupling = if coupling_parameter > STRONG_COUPLING_ABOVE {
            CouplingRegime::Strong
        } else if coupling_parameter < BAD_CAVITY_BELOW {
            CouplingRegime::BadCavity
        } else {
            CouplingRegime::Weak
        };
        Self { delay_parameter, coupling_parameter, delay, coupling }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let delay = match self.delay {
            DelayRegime::Short => "short-delay",
            DelayRegime::Intermediate => "intermediate",
            DelayRegime::Long => "long-delay",
        };
        let coupling = match self.coupling {
            CouplingRegime::Strong => "strong",
            CouplingRegime::Weak => "weak",
            CouplingRegime::BadCavity => "bad-cavity",
        };
        write!(
            f,
            "kappa*tau={} ({delay}), gamma/kappa={} ({coupling})",
            short(self.delay_parameter),
            short(self.coupling_parameter)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quantities() {
        let p = FeedbackParams::new(1.0, 1.0, 0.0, PI, PI).unwrap();
        assert_eq!(p.delay_parameter(), PI);
        assert_eq!(p.coupling_parameter(), 1.0);
        assert_eq!(p.delta0(), 1.0);
        assert!((p.mode_coupling() - 2.0 / PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn eta_for_trapping_parameters() {
        let p = FeedbackParams::new(1.0, 1.0, 0.5, PI / 3.0, PI).unwrap();
        assert!((p.eta() - PI / 12.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            FeedbackParams::new(1.0, 0.0, 0.0, 1.0, 0.0),
            Err(Error::InvalidParameter { name: "kappa", .. })
        ));
        assert!(FeedbackParams::new(-1.0, 1.0, 0.0, 1.0, 0.0).is_err());
        assert!(FeedbackParams::new(1.0, 1.0, -0.1, 1.0, 0.0).is_err());
        assert!(FeedbackParams::new(1.0, 1.0, 0.0, 0.0, 0.0).is_err());
        assert!(FeedbackParams::new(1.0, 1.0, 0.0, 1.0, f64::NAN).is_err());
        assert!(FeedbackParams::new(f64::INFINITY, 1.0, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn regime_labels() {
        let r = Regime::classify(0.01, 10.0);
        assert_eq!(r.delay, DelayRegime::Short);
        assert_eq!(r.coupling, CouplingRegime::Weak);

        let r = Regime::classify(100.0 * PI, 1.0);
        assert_eq!(r.delay, DelayRegime::Long);
        assert_eq!(r.coupling, CouplingRegime::Weak);

        let r = Regime::classify(1.0, 1.0);
        assert_eq!(r.delay, DelayRegime::Intermediate);
        assert_eq!(r.coupling, CouplingRegime::Weak);

        assert_eq!(Regime::classify(1.0, 10.5).coupling, CouplingRegime::Strong);
        assert_eq!(Regime::classify(1.0, 0.05).coupling, CouplingRegime::BadCavity);
    }

    #[test]
    fn phase_parity() {
        let p = FeedbackParams::new(1.0, 1.0, 0.0, 1.0, PI).unwrap();
        assert!(p.phase_is_odd_pi());
        assert!(!p.phase_is_even_pi());
        let p = p.with_phi(3.0 * PI).unwrap();
        assert!(p.phase_is_odd_pi());
        let p = p.with_phi(2.0 * PI).unwrap();
        assert!(p.phase_is_even_pi());
        assert!(!p.phase_is_odd_pi());
        let p = p.with_phi(-PI).unwrap();
        assert!(p.phase_is_odd_pi());
        let p = p.with_phi(1.0).unwrap();
        assert!(!p.phase_is_odd_pi() && !p.phase_is_even_pi());
    }
}
