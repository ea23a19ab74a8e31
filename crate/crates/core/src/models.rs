//! Dynamics backends: closed-form no-feedback evolution, the continuous-mode
//! single-delay equation, the discrete-mode multi-delay equation and the
//! truncated discrete-mode sum that serves as its independent oracle.
//!
//! State layout for the delay backends is `[c_e, c_g]`; the mode sum appends
//! `c_{g,q}` for `q = -N..=N`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use crate::engine::{CombTap, DelayRhs, Delayed, Integrator, DEFAULT_STEPS_PER_DELAY};
use crate::error::{Error, Result};
use crate::params::FeedbackParams;
use crate::trajectory::{ModeRegister, Trajectory};

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    NoFeedback,
    ContinuousMode,
    DiscreteModeDelay,
    DiscreteModeSum { modes: usize },
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::NoFeedback => "nofb",
            ModelKind::ContinuousMode => "cm",
            ModelKind::DiscreteModeDelay => "dm",
            ModelKind::DiscreteModeSum { .. } => "modesum",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::DiscreteModeSum { modes } => write!(f, "modesum(N={modes})"),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownModel(pub String);

impl fmt::Display for UnknownModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown model `{}` (expected nofb, cm, dm or modesum)", self.0)
    }
}

impl std::error::Error for UnknownModel {}

impl FromStr for ModelKind {
    type Err = UnknownModel;

    /// `modesum` takes its truncation from the bandwidth heuristic unless
    /// given as `modesum:N`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "nofb" | "none" | "no-feedback" => Ok(ModelKind::NoFeedback),
            "cm" | "continuous" => Ok(ModelKind::ContinuousMode),
            "dm" | "discrete" | "dm-delay" => Ok(ModelKind::DiscreteModeDelay),
            "modesum" | "dm-modesum" => Ok(ModelKind::DiscreteModeSum { modes: 0 }),
            _ => match s.strip_prefix("modesum:").map(str::parse::<usize>) {
                Some(Ok(modes)) => Ok(ModelKind::DiscreteModeSum { modes }),
                _ => Err(UnknownModel(s)),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState {
    pub c_e: C64,
    pub c_g: C64,
}

impl Default for InitialState {
    /// Excited atom, empty cavity.
    fn default() -> Self {
        Self { c_e: C64::new(1.0, 0.0), c_g: C64::new(0.0, 0.0) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub t_max: f64,
    pub steps_per_delay: usize,
    pub initial: InitialState,
}

impl SimConfig {
    pub fn new(t_max: f64) -> Self {
        Self { t_max, steps_per_delay: DEFAULT_STEPS_PER_DELAY, initial: InitialState::default() }
    }

    pub fn steps_per_delay(mut self, m: usize) -> Self {
        self.steps_per_delay = m;
        self
    }

    pub fn initial(mut self, initial: InitialState) -> Self {
        self.initial = initial;
        self
    }
}

/// Closed-form solution of `dc_e/dt = i gamma c_g`,
/// `dc_g/dt = i gamma c_e - 2 kappa_total c_g` at time `t`.
pub fn no_feedback_amplitudes(
    gamma: f64,
    kappa_total: f64,
    t: f64,
    initial: InitialState,
) -> (C64, C64) {
    let k = kappa_total;
    if gamma == 0.0 {
        return (initial.c_e, initial.c_g * (-2.0 * k * t).exp());
    }
    let disc = gamma * gamma - k * k;
    // ec = e^{-k t} cos(Omega t), ef = e^{-k t} sin(Omega t) / Omega with
    // Omega = sqrt(gamma^2 - k^2), continued through zero and imaginary Omega.
    let (ec, ef) = if disc > 0.0 {
        let omega = disc.sqrt();
        let decay = (-k * t).exp();
        (decay * (omega * t).cos(), decay * (omega * t).sin() / omega)
    } else if disc < 0.0 {
        let lambda = (-disc).sqrt();
        // lambda - k without cancellation
        let slow = (-gamma * gamma / (lambda + k) * t).exp();
        let fast = (-(lambda + k) * t).exp();
        (0.5 * (slow + fast), 0.5 * (slow - fast) / lambda)
    } else {
        let decay = (-k * t).exp();
        (decay, decay * t)
    };
    let c_e = initial.c_e * (ec + k * ef) + initial.c_g * I * gamma * ef;
    let c_g = initial.c_g * (ec - k * ef) + initial.c_e * I * gamma * ef;
    (c_e, c_g)
}

pub fn simulate_no_feedback(params: &FeedbackParams, config: &SimConfig) -> Result<Trajectory> {
    let grid = Integrator::new(params.tau(), config.steps_per_delay)?;
    if !(config.t_max.is_finite() && config.t_max > 0.0) {
        return Err(Error::InvalidParameter { name: "t_max", value: config.t_max, reason: "must be positive and finite" });
    }
    let dt = grid.dt();
    let n = grid.output_steps(config.t_max);
    let kt = params.kappa() + params.kappa1();
    let mut traj = Trajectory {
        dt,
        times: Vec::with_capacity(n + 1),
        c_e: Vec::with_capacity(n + 1),
        c_g: Vec::with_capacity(n + 1),
    };
    for i in 0..=n {
        let t = i as f64 * dt;
        let (ce, cg) = no_feedback_amplitudes(params.gamma(), kt, t, config.initial);
        traj.times.push(t);
        traj.c_e.push(ce);
        traj.c_g.push(cg);
    }
    Ok(traj)
}

/// `dc_g/dt = i gamma c_e - 2 kappa1 c_g - 2 kappa [c_g(t) - e^{i phi} c_g(t - tau)]`.
#[derive(Debug, Clone)]
pub struct ContinuousModeRhs {
    gamma: f64,
    decay: f64,
    feedback: C64,
}

impl ContinuousModeRhs {
    pub fn new(params: &FeedbackParams) -> Self {
        Self {
            gamma: params.gamma(),
            decay: 2.0 * (params.kappa() + params.kappa1()),
            feedback: 2.0 * params.kappa() * C64::from_polar(1.0, params.phi()),
        }
    }
}

impl DelayRhs for ContinuousModeRhs {
    fn dim(&self) -> usize {
        2
    }

    fn max_delay(&self) -> usize {
        1
    }

    fn eval(&self, _t: f64, y: &[C64], delayed: &Delayed<'_>, dy: &mut [C64]) {
        let (ce, cg) = (y[0], y[1]);
        dy[0] = I * self.gamma * cg;
        dy[1] = I * self.gamma * ce - self.decay * cg + self.feedback * delayed.state(1)[1];
    }
}

/// `dc_g/dt = i gamma c_e - 2 kappa1 c_g
///     + 4 kappa [c_g(t)/2 - sum_{q>=0} (-1)^q e^{-i Delta_0 q tau} c_g(t - q tau)]`.
///
/// The `q = 0` tap merges with the half-weight term into `-2 kappa c_g(t)`; the
/// remaining taps form a geometric comb with ratio `-e^{-i phi}`.
#[derive(Debug, Clone)]
pub struct DiscreteModeRhs {
    gamma: f64,
    decay: f64,
    comb_weight: f64,
    combs: [CombTap; 1],
}

impl DiscreteModeRhs {
    pub fn new(params: &FeedbackParams) -> Self {
        Self {
            gamma: params.gamma(),
            decay: 2.0 * (params.kappa() + params.kappa1()),
            comb_weight: 4.0 * params.kappa(),
            combs: [CombTap { component: 1, ratio: -C64::from_polar(1.0, -params.phi()) }],
        }
    }
}

impl DelayRhs for DiscreteModeRhs {
    fn dim(&self) -> usize {
        2
    }

    fn combs(&self) -> &[CombTap] {
        &self.combs
    }

    fn eval(&self, _t: f64, y: &[C64], delayed: &Delayed<'_>, dy: &mut [C64]) {
        let (ce, cg) = (y[0], y[1]);
        dy[0] = I * self.gamma * cg;
        dy[1] = I * self.gamma * ce - self.decay * cg - self.comb_weight * delayed.comb(0);
    }
}

/// Time-local equations over the discrete modes `q = -N..=N` in the
/// interaction picture, with `sin(k_q L) -> (-1)^q`.
#[derive(Debug, Clone)]
pub struct ModeSumRhs {
    gamma: f64,
    kappa1: f64,
    coupling: f64,
    modes: usize,
    /// `pi / tau - Delta_0`, the detuning of mode `q = 0`.
    base_detuning: f64,
    /// `2 pi / tau`, the mode spacing.
    spacing: f64,
}

impl ModeSumRhs {
    pub fn new(params: &FeedbackParams, modes: usize) -> Self {
        Self {
            gamma: params.gamma(),
            kappa1: params.kappa1(),
            coupling: params.mode_coupling(),
            modes,
            base_detuning: PI / params.tau() - params.delta0(),
            spacing: 2.0 * PI / params.tau(),
        }
    }

    pub fn detuning(&self, q: i64) -> f64 {
        self.base_detuning + q as f64 * self.spacing
    }

    pub fn max_abs_detuning(&self) -> f64 {
        let n = self.modes as i64;
        self.detuning(n).abs().max(self.detuning(-n).abs())
    }
}

impl DelayRhs for ModeSumRhs {
    fn dim(&self) -> usize {
        2 * self.modes + 3
    }

    fn eval(&self, t: f64, y: &[C64], _delayed: &Delayed<'_>, dy: &mut [C64]) {
        let n = self.modes;
        let (ce, cg) = (y[0], y[1]);
        let g = self.coupling;
        // e^{i delta_q t} = e^{i delta_0 t} * u^q
        let center = C64::from_polar(1.0, self.base_detuning * t);
        let u = C64::from_polar(1.0, self.spacing * t);
        let mut feed = C64::new(0.0, 0.0);

        let mut phase = center;
        for q in 0..=n {
            let j = n + q;
            let sign = if q % 2 == 0 { g } else { -g };
            feed += sign * phase.conj() * y[2 + j];
            dy[2 + j] = I * sign * phase * cg;
            phase *= u;
        }
        let mut phase = center;
        let ubar = u.conj();
        for q in 1..=n {
            phase *= ubar;
            let j = n - q;
            let sign = if q % 2 == 0 { g } else { -g };
            feed += sign * phase.conj() * y[2 + j];
            dy[2 + j] = I * sign * phase * cg;
        }

        dy[0] = I * self.gamma * cg;
        dy[1] = I * self.gamma * ce - 2.0 * self.kappa1 * cg + I * feed;
    }
}

/// Truncation for which the largest mode detuning reaches
/// `40 * max(gamma, kappa, 2 pi / tau)`.
pub fn recommended_modes(params: &FeedbackParams) -> usize {
    let target = 40.0 * params.gamma().max(params.kappa()).max(2.0 * PI / params.tau());
    let mut n = 1;
    while ModeSumRhs::new(params, n).max_abs_detuning() < target {
        n += 1;
    }
    n
}

fn to_trajectory(sol: &crate::engine::Solution) -> Trajectory {
    Trajectory { dt: sol.dt, times: sol.times.clone(), c_e: sol.component(0), c_g: sol.component(1) }
}

fn initial_vector(initial: &InitialState, dim: usize) -> Vec<C64> {
    let mut y = vec![C64::new(0.0, 0.0); dim];
    y[0] = initial.c_e;
    y[1] = initial.c_g;
    y
}

pub fn simulate_cm(params: &FeedbackParams, config: &SimConfig) -> Result<Trajectory> {
    let rhs = ContinuousModeRhs::new(params);
    let sol = Integrator::new(params.tau(), config.steps_per_delay)?.run(
        &rhs,
        &initial_vector(&config.initial, 2),
        config.t_max,
    )?;
    Ok(to_trajectory(&sol))
}

pub fn simulate_dm_delay(params: &FeedbackParams, config: &SimConfig) -> Result<Trajectory> {
    let rhs = DiscreteModeRhs::new(params);
    let sol = Integrator::new(params.tau(), config.steps_per_delay)?.run(
        &rhs,
        &initial_vector(&config.initial, 2),
        config.t_max,
    )?;
    Ok(to_trajectory(&sol))
}

/// Integrates the truncated mode sum. Output samples sit on the same
/// `tau / steps_per_delay` grid as the delay backends; the internal step is
/// refined until `dt <= 2 pi / (20 max |delta_q|)`.
pub fn simulate_dm_modesum(
    params: &FeedbackParams,
    modes: usize,
    config: &SimConfig,
) -> Result<(Trajectory, ModeRegister)> {
    if modes == 0 {
        return Err(Error::InvalidParameter {
            name: "modes",
            value: 0.0,
            reason: "mode-sum truncation must be at least 1",
        });
    }
    let recommended = recommended_modes(params);
    if modes < recommended {
        log::warn!(
            "mode sum truncated at N = {modes}, below the bandwidth estimate N = {recommended}; \
             check convergence by doubling N"
        );
    }
    let rhs = ModeSumRhs::new(params, modes);
    let base = Integrator::new(params.tau(), config.steps_per_delay)?;
    let cap = 2.0 * PI / (20.0 * rhs.max_abs_detuning());
    let substeps = (base.dt() / cap).ceil().max(1.0) as usize;
    let sol = base.substeps(substeps).run(&rhs, &initial_vector(&config.initial, rhs.dim()), config.t_max)?;

    let q_indices: Vec<i64> = (-(modes as i64)..=modes as i64).collect();
    let frequencies = q_indices.iter().map(|&q| (2 * q + 1) as f64 * PI / params.tau()).collect();
    let detunings = q_indices.iter().map(|&q| rhs.detuning(q)).collect();
    let amplitudes = (0..sol.len()).map(|i| sol.state(i)[2..].to_vec()).collect();
    Ok((to_trajectory(&sol), ModeRegister { q_indices, frequencies, detunings, amplitudes }))
}

/// Dispatches on `kind`. A mode sum with `modes == 0` uses
/// [`recommended_modes`].
pub fn simulate(kind: ModelKind, params: &FeedbackParams, config: &SimConfig) -> Result<Trajectory> {
    match kind {
        ModelKind::NoFeedback => simulate_no_feedback(params, config),
        ModelKind::ContinuousMode => simulate_cm(params, config),
        ModelKind::DiscreteModeDelay => simulate_dm_delay(params, config),
        ModelKind::DiscreteModeSum { modes } => {
            let modes = if modes == 0 { recommended_modes(params) } else { modes };
            simulate_dm_modesum(params, modes, config).map(|(t, _)| t)
        }
    }
}
