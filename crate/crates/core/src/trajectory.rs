//! Result containers for time-domain runs.

use num_complex::Complex64 as C64;

/// Atomic (`c_e`) and one-photon cavity (`c_g`) amplitudes on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub times: Vec<f64>,
    pub c_e: Vec<C64>,
    pub c_g: Vec<C64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn abs2_ce(&self) -> Vec<f64> {
        self.c_e.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn abs2_cg(&self) -> Vec<f64> {
        self.c_g.iter().map(|c| c.norm_sqr()).collect()
    }

    /// `|c_e|^2 + |c_g|^2` at every sample.
    pub fn system_norm(&self) -> Vec<f64> {
        self.c_e
            .iter()
            .zip(&self.c_g)
            .map(|(e, g)| e.norm_sqr() + g.norm_sqr())
            .collect()
    }

    /// Index of the sample closest to `t`.
    pub fn index_at(&self, t: f64) -> usize {
        let i = (t / self.dt).round();
        (i.max(0.0) as usize).min(self.len().saturating_sub(1))
    }

    pub fn last(&self) -> Option<(f64, C64, C64)> {
        let i = self.len().checked_sub(1)?;
        Some((self.times[i], self.c_e[i], self.c_g[i]))
    }

    /// Trapezoid estimate of the integral of `|c_g|^2` over the whole run.
    pub fn integrated_cavity_population(&self) -> f64 {
        let p = self.abs2_cg();
        if p.len() < 2 {
            return 0.0;
        }
        let inner: f64 = p[1..p.len() - 1].iter().sum();
        self.dt * (inner + 0.5 * (p[0] + p[p.len() - 1]))
    }
}

/// Truncated register of discrete reservoir modes `q in [-N, N]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeRegister {
    pub q_indices: Vec<i64>,
    /// `omega_q = (2q + 1) pi / tau`.
    pub frequencies: Vec<f64>,
    /// `delta_q = omega_q - Delta_0`.
    pub detunings: Vec<f64>,
    /// One row per output sample, one column per mode (same order as `q_indices`).
    pub amplitudes: Vec<Vec<C64>>,
}

impl ModeRegister {
    pub fn modes(&self) -> usize {
        self.q_indices.len()
    }

    /// Total reservoir population at each sample.
    pub fn population(&self) -> Vec<f64> {
        self.amplitudes
            .iter()
            .map(|row| row.iter().map(|c| c.norm_sqr()).sum())
            .collect()
    }
}
