//! Laplace-domain characteristic functions `D(s)`; `c_g(s) = i gamma / D(s)`
//! for an initially excited atom.

use std::fmt;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::params::FeedbackParams;

/// Number of roundtrip intervals kept in the discrete-mode kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DmOrder {
    Finite(usize),
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharKind {
    ContinuousMode,
    DiscreteMode(DmOrder),
}

impl fmt::Display for CharKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CharKind::ContinuousMode => f.write_str("cm"),
            CharKind::DiscreteMode(DmOrder::Finite(n)) => write!(f, "dm(n={n})"),
            CharKind::DiscreteMode(DmOrder::Infinite) => f.write_str("dm(n=inf)"),
        }
    }
}

/// `D(s) = s^2 + gamma^2 + 2 kappa1 s + 2 kappa s K(s)` with
/// `E = exp(-(s + i Delta_0) tau)` and
///
/// * continuous mode: `K = 1 - E`
/// * discrete mode, order `n`: `K = 2 sum_{q=0}^n (-E)^q - 1`
/// * discrete mode, all orders: `K = (1 - E) / (1 + E)`, used as the analytic
///   continuation of the geometric sum outside `Re s > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicFunction {
    kind: CharKind,
    params: FeedbackParams,
}

/// Relative distance from the kernel pole `E = -1` treated as singular.
const KERNEL_POLE_TOL: f64 = 1e-14;

impl CharacteristicFunction {
    pub fn new(kind: CharKind, params: FeedbackParams) -> Self {
        Self { kind, params }
    }

    pub fn cm(params: FeedbackParams) -> Self {
        Self::new(CharKind::ContinuousMode, params)
    }

    pub fn dm(params: FeedbackParams, order: DmOrder) -> Self {
        Self::new(CharKind::DiscreteMode(order), params)
    }

    pub fn kind(&self) -> CharKind {
        self.kind
    }

    pub fn params(&self) -> &FeedbackParams {
        &self.params
    }

    fn echo(&self, s: C64) -> C64 {
        let p = &self.params;
        (-(s + C64::new(0.0, p.delta0())) * p.tau()).exp()
    }

    /// Kernel `K(s)` and its derivative.
    fn kernel(&self, s: C64) -> Result<(C64, C64)> {
        let e = self.echo(s);
        let tau = self.params.tau();
        // dE/ds = -tau E
        Ok(match self.kind {
            CharKind::ContinuousMode => (1.0 - e, tau * e),
            CharKind::DiscreteMode(DmOrder::Finite(n)) => {
                let mut sum = C64::new(0.0, 0.0);
                let mut dsum = C64::new(0.0, 0.0);
                let mut pow = C64::new(1.0, 0.0);
                for q in 0..=n {
                    sum += pow;
                    dsum += q as f64 * pow;
                    pow *= -e;
                }
                (2.0 * sum - 1.0, -2.0 * tau * dsum)
            }
            CharKind::DiscreteMode(DmOrder::Infinite) => {
                let den = 1.0 + e;
                if den.norm() <= KERNEL_POLE_TOL * (1.0 + e.norm()) {
                    return Err(Error::KernelPole { s });
                }
                ((1.0 - e) / den, 2.0 * tau * e / (den * den))
            }
        })
    }

    pub fn eval(&self, s: C64) -> Result<C64> {
        Ok(self.eval_with_derivative(s)?.0)
    }

    /// `(D(s), D'(s))`.
    pub fn eval_with_derivative(&self, s: C64) -> Result<(C64, C64)> {
        let p = &self.params;
        let (k, dk) = self.kernel(s)?;
        let g2 = p.gamma() * p.gamma();
        let d = s * s + g2 + 2.0 * p.kappa1() * s + 2.0 * p.kappa() * s * k;
        let dd = 2.0 * s + 2.0 * p.kappa1() + 2.0 * p.kappa() * (k + s * dk);
        Ok((d, dd))
    }

    /// Magnitude of the individual terms of `D(s)`; the yardstick for
    /// deciding that `D(s)` vanishes.
    pub fn scale(&self, s: C64) -> f64 {
        let p = &self.params;
        let k = self.kernel(s).map(|(k, _)| k.norm()).unwrap_or(f64::INFINITY);
        let floor = (p.gamma() * p.gamma()).max(p.kappa() * p.kappa());
        (s.norm_sqr() + p.gamma() * p.gamma() + 2.0 * s.norm() * (p.kappa1() + p.kappa() * (1.0 + k)))
            .max(floor)
    }
}
