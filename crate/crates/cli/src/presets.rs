//! Named parameter sets with `kappa = 1`.

use std::f64::consts::PI;

use jcfeedback::ModelKind;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub gamma: f64,
    pub kappa: f64,
    pub kappa1: f64,
    /// `None` when the delay must be supplied with `--kappa-tau`.
    pub tau: Option<f64>,
    pub phi: f64,
    pub t_max: f64,
    pub steps_per_delay: Option<usize>,
    pub models: &'static [ModelKind],
}

const ALL_DELAY: &[ModelKind] = &[ModelKind::NoFeedback, ModelKind::ContinuousMode, ModelKind::DiscreteModeDelay];

pub const PRESETS: &[Preset] = &[
    Preset {
        // "10 kappa tau = gamma tau = 0.1", read as kappa tau = 0.01
        name: "fig-shortdelay-a",
        summary: "short delay, kappa tau = 0.01, gamma tau = 0.1, phi = 2 pi",
        gamma: 10.0,
        kappa: 1.0,
        kappa1: 0.0,
        tau: Some(0.01),
        phi: 2.0 * PI,
        t_max: 5.0,
        steps_per_delay: None,
        models: ALL_DELAY,
    },
    Preset {
        name: "fig-shortdelay-b",
        summary: "short delay, kappa tau = 0.01, gamma tau = 0.1, phi = pi",
        gamma: 10.0,
        kappa: 1.0,
        kappa1: 0.0,
        tau: Some(0.01),
        phi: PI,
        t_max: 5.0,
        steps_per_delay: None,
        models: ALL_DELAY,
    },
    Preset {
        name: "fig-longdelay",
        summary: "long delay, kappa tau = gamma tau = 100 pi, phi = 2 pi",
        gamma: 1.0,
        kappa: 1.0,
        kappa1: 0.0,
        tau: Some(100.0 * PI),
        phi: 2.0 * PI,
        t_max: 400.0 * PI,
        steps_per_delay: Some(10_000),
        models: ALL_DELAY,
    },
    Preset {
        name: "fig-3tau",
        summary: "kappa tau = 0.5 gamma tau = 5 pi, phi = pi",
        gamma: 2.0,
        kappa: 1.0,
        kappa1: 0.0,
        tau: Some(5.0 * PI),
        phi: PI,
        t_max: 20.0 * PI,
        steps_per_delay: None,
        models: ALL_DELAY,
    },
    Preset {
        name: "fig-trapped",
        summary: "trapping, kappa tau = gamma tau = pi/3, 2 kappa1 = kappa, phi = pi",
        gamma: 1.0,
        kappa: 1.0,
        kappa1: 0.5,
        tau: Some(PI / 3.0),
        phi: PI,
        t_max: 50.0,
        steps_per_delay: None,
        models: ALL_DELAY,
    },
    Preset {
        // only kappa1 = 0 and kappa tau = pi are fixed; gamma = kappa and
        // phi = pi put (Delta_0 + gamma) tau at 2 pi
        name: "fig-rabi-inset",
        summary: "stabilized oscillation, kappa1 = 0, kappa tau = pi, gamma = kappa, phi = pi",
        gamma: 1.0,
        kappa: 1.0,
        kappa1: 0.0,
        tau: Some(PI),
        phi: PI,
        t_max: 60.0 * PI,
        steps_per_delay: None,
        models: &[ModelKind::ContinuousMode],
    },
    Preset {
        name: "fig-comparison",
        summary: "mode sum against delay equation, kappa tau = gamma tau = pi/3, phi = pi",
        gamma: 1.0,
        kappa: 1.0,
        kappa1: 0.0,
        tau: Some(PI / 3.0),
        phi: PI,
        t_max: 10.0 * PI / 3.0,
        steps_per_delay: None,
        models: &[ModelKind::DiscreteModeDelay, ModelKind::DiscreteModeSum { modes: 0 }],
    },
    Preset {
        name: "fig-spectrum-short",
        summary: "spectrum, kappa1 = kappa/2, gamma = kappa, phi = pi; needs --kappa-tau",
        gamma: 1.0,
        kappa: 1.0,
        kappa1: 0.5,
        tau: None,
        phi: PI,
        t_max: 200.0,
        steps_per_delay: None,
        models: ALL_DELAY,
    },
    Preset {
        name: "fig-spectrum-long",
        summary: "spectrum, kappa1 = kappa/2, gamma = kappa, phi = pi; needs --kappa-tau",
        gamma: 1.0,
        kappa: 1.0,
        kappa1: 0.5,
        tau: None,
        phi: PI,
        t_max: 200.0,
        steps_per_delay: None,
        models: ALL_DELAY,
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

pub fn listing() -> String {
    PRESETS.iter().map(|p| format!("  {:<20} {}", p.name, p.summary)).collect::<Vec<_>>().join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(name: &str, kappa_tau: f64, gamma_tau: f64, kappa1_over_kappa: f64, phi: f64) {
        let p = find(name).unwrap();
        let tau = p.tau.unwrap();
        assert_eq!(p.kappa, 1.0, "{name}");
        assert!((p.kappa * tau - kappa_tau).abs() < 1e-12 * kappa_tau, "{name}");
        assert!((p.gamma * tau - gamma_tau).abs() < 1e-12 * gamma_tau, "{name}");
        assert_eq!(p.kappa1 / p.kappa, kappa1_over_kappa, "{name}");
        assert_eq!(p.phi, phi, "{name}");
    }

    #[test]
    fn frozen_values() {
        check("fig-shortdelay-a", 0.01, 0.1, 0.0, 2.0 * PI);
        check("fig-shortdelay-b", 0.01, 0.1, 0.0, PI);
        check("fig-longdelay", 100.0 * PI, 100.0 * PI, 0.0, 2.0 * PI);
        check("fig-3tau", 5.0 * PI, 10.0 * PI, 0.0, PI);
        check("fig-trapped", PI / 3.0, PI / 3.0, 0.5, PI);
        check("fig-rabi-inset", PI, PI, 0.0, PI);
        check("fig-comparison", PI / 3.0, PI / 3.0, 0.0, PI);
        for name in ["fig-spectrum-short", "fig-spectrum-long"] {
            let p = find(name).unwrap();
            assert_eq!((p.gamma, p.kappa, p.kappa1, p.phi, p.tau), (1.0, 1.0, 0.5, PI, None));
        }
    }

    #[test]
    fn names_unique() {
        for (i, a) in PRESETS.iter().enumerate() {
            assert!(PRESETS[i + 1..].iter().all(|b| b.name != a.name));
        }
    }
}
