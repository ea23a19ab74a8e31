//! Emission spectra through the extra loss channel,
//! `S(omega) = (2 kappa1 / pi) |c_g(s = -i omega)|^2`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::models::ModelKind;
use crate::params::FeedbackParams;

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub kind: ModelKind,
    pub omega: Vec<f64>,
    pub density: Vec<f64>,
}

impl Spectrum {
    /// Trapezoid rule over the (not necessarily uniform) frequency grid.
    pub fn integral(&self) -> f64 {
        self.omega
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(w, s)| 0.5 * (w[1] - w[0]) * (s[0] + s[1]))
            .sum()
    }
}

/// `(cos(pi x), sin(pi x))`, exact at integers and half-integers.
fn cos_sin_pi(x: f64) -> (f64, f64) {
    let r = x.rem_euclid(2.0);
    match r {
        r if r == 0.0 => (1.0, 0.0),
        r if r == 0.5 => (0.0, 1.0),
        r if r == 1.0 => (-1.0, 0.0),
        r if r == 1.5 => (0.0, -1.0),
        r => {
            let (s, c) = (PI * r).sin_cos();
            (c, s)
        }
    }
}

fn nofb(params: &FeedbackParams, omega: f64) -> f64 {
    let (g, k1, kt) = (params.gamma(), params.kappa1(), params.kappa() + params.kappa1());
    let a = omega * omega - g * g;
    2.0 * g * g * k1 / PI / (a * a + 4.0 * kt * kt * omega * omega)
}

fn cm(params: &FeedbackParams, omega: f64) -> f64 {
    let (g, k, k1, tau) = (params.gamma(), params.kappa(), params.kappa1(), params.tau());
    let (sin, cos) = (omega * tau - params.phi()).sin_cos();
    let a = omega * omega - g * g + 2.0 * omega * k * sin;
    let b = 2.0 * (k1 + k - k * cos) * omega;
    2.0 * g * g * k1 / PI / (a * a + b * b)
}

/// `tan[(omega tau - phi)/2]` multiplied through by `cos[(omega tau - phi)/2]`,
/// so the closed form stays finite where the tangent diverges.
fn dm(params: &FeedbackParams, omega: f64) -> f64 {
    let (g, k, k1, tau) = (params.gamma(), params.kappa(), params.kappa1(), params.tau());
    let (c, sn) = cos_sin_pi((omega * tau - params.phi()) / (2.0 * PI));
    if c == 0.0 && omega == 0.0 {
        // omega tan[(omega tau - phi)/2] -> -2 / tau
        let d = g * g + 4.0 * k / tau;
        return 2.0 * g * g * k1 / PI / (d * d);
    }
    let a = (omega * omega - g * g) * c + 2.0 * k * omega * sn;
    let b = 2.0 * k1 * omega * c;
    2.0 * g * g * k1 / PI * c * c / (a * a + b * b)
}

/// Closed-form spectrum of `kind` on `omegas`. The mode-sum kind shares the
/// discrete-mode closed form.
pub fn spectrum(params: &FeedbackParams, kind: ModelKind, omegas: &[f64]) -> Result<Spectrum> {
    if params.kappa1() <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "kappa1",
            value: params.kappa1(),
            reason: "must be positive for a detected spectrum",
        });
    }
    if let Some(&w) = omegas.iter().find(|w| !w.is_finite()) {
        return Err(Error::InvalidParameter { name: "omega", value: w, reason: "must be finite" });
    }
    let f = match kind {
        ModelKind::NoFeedback => nofb,
        ModelKind::ContinuousMode => cm,
        ModelKind::DiscreteModeDelay | ModelKind::DiscreteModeSum { .. } => dm,
    };
    let density = omegas
        .iter()
        .map(|&w| if params.gamma() == 0.0 { 0.0 } else { f(params, w) })
        .collect();
    Ok(Spectrum { kind, omega: omegas.to_vec(), density })
}

/// `n` evenly spaced points on `[-half_width, half_width]`, mirror-symmetric
/// and containing `0` exactly when `n` is odd.
pub fn symmetric_grid(half_width: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![0.0; n];
    }
    let d = (n - 1) as f64;
    (0..n).map(|i| half_width * (2.0 * i as f64 - d) / d).collect()
}

/// Half-width `50 max(gamma, kappa, 2 pi / tau)` used for frequency-domain
/// normalization checks.
pub fn parseval_half_width(params: &FeedbackParams) -> f64 {
    50.0 * params.gamma().max(params.kappa()).max(2.0 * PI / params.tau())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trapping(tau: f64) -> FeedbackParams {
        FeedbackParams::new(1.0, 1.0, 0.5, tau, PI).unwrap()
    }

    #[test]
    fn exact_trig_at_special_points() {
        assert_eq!(cos_sin_pi(-0.5), (0.0, -1.0));
        assert_eq!(cos_sin_pi(2.5), (0.0, 1.0));
        assert_eq!(cos_sin_pi(3.0), (-1.0, 0.0));
        let (c, s) = cos_sin_pi(0.3);
        assert!((c - (0.3 * PI).cos()).abs() < 1e-15 && (s - (0.3 * PI).sin()).abs() < 1e-15);
    }

    #[test]
    fn nofb_on_resonance() {
        let p = FeedbackParams::new(1.3, 1.0, 0.4, 1.0, 0.0).unwrap();
        let s = spectrum(&p, ModelKind::NoFeedback, &[0.0]).unwrap();
        assert!((s.density[0] - 2.0 * 0.4 / (PI * 1.69)).abs() < 1e-15);
    }

    #[test]
    fn dm_zero_at_tangent_poles() {
        let p = trapping(1.0);
        // omega tau - phi = pi
        let s = spectrum(&p, ModelKind::DiscreteModeDelay, &[2.0 * PI, 4.0 * PI]).unwrap();
        assert_eq!(s.density[0], 0.0);
    }

    #[test]
    fn dm_resonance_matches_its_limit() {
        let p = trapping(1.0);
        let s = spectrum(&p, ModelKind::DiscreteModeDelay, &[0.0, 1e-7, -1e-7]).unwrap();
        let limit = 2.0 * 0.5 / PI / 25.0;
        assert!((s.density[0] - limit).abs() < 1e-15);
        assert!((s.density[1] - limit).abs() < 1e-6 * limit);
        assert!((s.density[2] - limit).abs() < 1e-6 * limit);
        let nofb = spectrum(&p, ModelKind::NoFeedback, &[0.0]).unwrap();
        assert!(s.density[0] < nofb.density[0]);
    }

    #[test]
    fn dm_matches_tangent_form_away_from_poles() {
        let p = FeedbackParams::new(0.8, 1.1, 0.3, 1.7, 0.9).unwrap();
        let omegas = [-2.3, -0.4, 0.2, 1.1, 3.7];
        let s = spectrum(&p, ModelKind::DiscreteModeDelay, &omegas).unwrap();
        for (w, v) in omegas.iter().zip(&s.density) {
            let t = ((w * 1.7 - 0.9) / 2.0).tan();
            let a = w * w - 0.64 + 2.0 * 1.1 * w * t;
            let direct = 2.0 * 0.64 * 0.3 / PI / (a * a + 4.0 * 0.09 * w * w);
            assert!((v - direct).abs() < 1e-12 * direct.max(1e-300));
        }
    }

    #[test]
    fn requires_detection_channel() {
        let p = FeedbackParams::new(1.0, 1.0, 0.0, 1.0, PI).unwrap();
        assert!(spectrum(&p, ModelKind::NoFeedback, &[0.0]).is_err());
        let p = trapping(1.0);
        assert!(spectrum(&p, ModelKind::NoFeedback, &[f64::NAN]).is_err());
    }

    #[test]
    fn decoupled_atom_is_dark() {
        let p = FeedbackParams::new(0.0, 1.0, 0.5, 1.0, PI).unwrap();
        for kind in [ModelKind::NoFeedback, ModelKind::ContinuousMode, ModelKind::DiscreteModeDelay] {
            let s = spectrum(&p, kind, &[0.0, 1.0]).unwrap();
            assert_eq!(s.density, vec![0.0, 0.0]);
        }
    }

    #[test]
    fn grid_is_symmetric() {
        let g = symmetric_grid(2.0, 5);
        assert_eq!(g, vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
        let g = symmetric_grid(314.159, 200_001);
        assert_eq!(g[100_000], 0.0);
        assert!(g.iter().zip(g.iter().rev()).all(|(a, b)| *a == -*b));
    }
}
