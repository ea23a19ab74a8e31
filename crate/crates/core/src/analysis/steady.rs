//! Long-time trapped amplitude of the discrete-mode system and the normal
//! modes of the atom, lossy cavity and effective second cavity.

use crate::error::{Error, Result};
use crate::params::FeedbackParams;

/// `lim_{t -> inf} |c_e(t)|` for an initially excited atom.
///
/// For `phi` an odd multiple of pi the kernel `sK(s)` tends to `2 / tau` as
/// `s -> 0` and the residue is `1 / (1 + eta)`; for any other phase it stays
/// finite at `s = 0` and the amplitude decays to zero.
pub fn steady_state_dm(params: &FeedbackParams) -> f64 {
    if params.phase_is_odd_pi() {
        1.0 / (1.0 + params.eta())
    } else {
        0.0
    }
}

/// Normal modes in the basis `(|A>, |C1>, |C2>)`: atom, lossy cavity and the
/// cavity that stands in for the discrete reservoir.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalModeSet {
    pub xi: f64,
    /// Energy `+xi`.
    pub bright_plus: [f64; 3],
    /// Energy `-xi`.
    pub bright_minus: [f64; 3],
    /// Energy 0; no weight on `|C1>`.
    pub dark: [f64; 3],
    /// `|<A|D>|^2 = G^2 / xi^2`.
    pub dark_overlap: f64,
}

impl NormalModeSet {
    pub fn energies(&self) -> [f64; 3] {
        [self.xi, -self.xi, 0.0]
    }
}

pub fn normal_modes(gamma: f64, big_g: f64) -> Result<NormalModeSet> {
    crate::error::check_finite("gamma", gamma)?;
    crate::error::check_finite("G", big_g)?;
    if gamma < 0.0 || big_g < 0.0 {
        return Err(Error::InvalidParameter {
            name: "gamma/G",
            value: gamma.min(big_g),
            reason: "couplings must be non-negative",
        });
    }
    if gamma == 0.0 && big_g == 0.0 {
        return Err(Error::InvalidParameter { name: "gamma/G", value: 0.0, reason: "couplings must not both vanish" });
    }
    let xi = gamma.hypot(big_g);
    let n = std::f64::consts::SQRT_2 * xi;
    Ok(NormalModeSet {
        xi,
        bright_plus: [gamma / n, xi / n, big_g / n],
        bright_minus: [gamma / n, -xi / n, big_g / n],
        dark: [-big_g / xi, 0.0, gamma / xi],
        dark_overlap: (big_g / xi).powi(2),
    })
}

/// Dark-state overlap for the coupling `G = 2 sqrt(kappa / tau)` of `params`.
pub fn dark_overlap(params: &FeedbackParams) -> Result<f64> {
    Ok(normal_modes(params.gamma(), params.mode_coupling())?.dark_overlap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    #[test]
    fn trapping_parameters() {
        let tau = PI / 3.0;
        let p = FeedbackParams::new(1.0, 1.0, 0.5, tau, PI).unwrap();
        let expected = 1.0 / (1.0 + PI / 12.0);
        assert!((steady_state_dm(&p) - expected).abs() < 1e-15);
        assert!((steady_state_dm(&p) - 0.792519).abs() < 1e-6);
        assert!((dark_overlap(&p).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn long_delay_and_decoupled_limits() {
        let p = FeedbackParams::new(1.0, 1.0, 0.0, 1e6, PI).unwrap();
        assert!(steady_state_dm(&p) < 1e-5);
        let p = FeedbackParams::new(0.0, 1.0, 0.0, 2.0, PI).unwrap();
        assert_eq!(steady_state_dm(&p), 1.0);
        let p = FeedbackParams::new(1.0, 1.0, 0.0, 2.0, 0.0).unwrap();
        assert_eq!(steady_state_dm(&p), 0.0);
    }

    #[test]
    fn symmetric_and_dark_atom_cases() {
        let m = normal_modes(1.5, 1.5).unwrap();
        assert!((m.xi - 1.5 * 2.0f64.sqrt()).abs() < 1e-15);
        assert!((m.dark_overlap - 0.5).abs() < 1e-15);
        let m = normal_modes(0.0, 2.0).unwrap();
        assert_eq!(m.dark, [-1.0, 0.0, 0.0]);
        assert_eq!(m.dark_overlap, 1.0);
        assert!(normal_modes(0.0, 0.0).is_err());
        assert!(normal_modes(-1.0, 1.0).is_err());
    }

    #[test]
    fn orthonormal_basis() {
        let m = normal_modes(0.7, 2.3).unwrap();
        let vs = [m.bright_plus, m.bright_minus, m.dark];
        for (i, a) in vs.iter().enumerate() {
            for (j, b) in vs.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((dot(a, b) - expected).abs() < 1e-14);
            }
        }
        assert_eq!(m.dark[1], 0.0);
    }

    #[test]
    fn eigenvectors_of_coupling_chain() {
        let (g, big_g) = (0.9, 1.7);
        let m = normal_modes(g, big_g).unwrap();
        let h = [[0.0, g, 0.0], [g, 0.0, big_g], [0.0, big_g, 0.0]];
        for (v, e) in [m.bright_plus, m.bright_minus, m.dark].iter().zip(m.energies()) {
            for (row, vi) in h.iter().zip(v) {
                assert!((dot(row, v) - e * vi).abs() < 1e-14);
            }
        }
    }
}
