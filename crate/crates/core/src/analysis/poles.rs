//! Roots of a characteristic function by grid-seeded Newton iteration.

use num_complex::Complex64 as C64;

use super::charfn::CharacteristicFunction;
use crate::error::{Error, Result};

/// Closed rectangle `re.0 <= Re s <= re.1`, `im.0 <= Im s <= im.1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBox {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl SearchBox {
    pub fn new(re: (f64, f64), im: (f64, f64)) -> Result<Self> {
        for (name, v) in [("re_min", re.0), ("re_max", re.1), ("im_min", im.0), ("im_max", im.1)] {
            crate::error::check_finite(name, v)?;
        }
        if re.0 > re.1 || im.0 > im.1 {
            return Err(Error::InvalidParameter {
                name: "search box",
                value: f64::NAN,
                reason: "lower bounds must not exceed upper bounds",
            });
        }
        Ok(Self { re, im })
    }

    fn contains(&self, s: C64, slack: f64) -> bool {
        s.re >= self.re.0 - slack
            && s.re <= self.re.1 + slack
            && s.im >= self.im.0 - slack
            && s.im <= self.im.1 + slack
    }

    fn seed(&self, i: usize, j: usize, grid: usize) -> C64 {
        let frac = |k: usize| if grid == 1 { 0.5 } else { k as f64 / (grid - 1) as f64 };
        C64::new(
            self.re.0 + (self.re.1 - self.re.0) * frac(i),
            self.im.0 + (self.im.1 - self.im.0) * frac(j),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    pub s: C64,
    pub abs_d: f64,
    /// 2 when `D'` also vanishes at the root, else 1.
    pub multiplicity: u32,
}

const ACCEPT_TOL: f64 = 1e-10;
const DEDUP_TOL: f64 = 1e-6;
const MAX_ITER: usize = 200;

fn newton(cf: &CharacteristicFunction, mut s: C64) -> Option<C64> {
    for _ in 0..MAX_ITER {
        let (d, dd) = cf.eval_with_derivative(s).ok()?;
        if d == C64::new(0.0, 0.0) {
            return Some(s);
        }
        if !dd.is_finite() || dd.norm() == 0.0 {
            return None;
        }
        let step = d / dd;
        s -= step;
        if !s.is_finite() {
            return None;
        }
        if step.norm() <= 1e-15 * (1.0 + s.norm()) {
            return Some(s);
        }
    }
    Some(s)
}

/// Newton iterations from a `grid x grid` mesh of seeds over `area`.
///
/// A converged point is kept if `|D(s)| < 1e-10 * scale(s)` and it lies in the
/// box; roots closer than `1e-6 * max(kappa, gamma)` are merged. Seeds that do
/// not converge are dropped silently, so an empty result is not an error.
pub fn find_poles(cf: &CharacteristicFunction, area: &SearchBox, grid: usize) -> Vec<Pole> {
    let p = cf.params();
    let radius = DEDUP_TOL * p.kappa().max(p.gamma());
    let slack = 1e-9 * (1.0 + area.re.0.abs().max(area.re.1.abs()).max(area.im.0.abs()).max(area.im.1.abs()));
    let mut roots: Vec<Pole> = Vec::new();
    for i in 0..grid {
        for j in 0..grid {
            let Some(s) = newton(cf, area.seed(i, j, grid)) else { continue };
            if !area.contains(s, slack) {
                continue;
            }
            let Ok((d, dd)) = cf.eval_with_derivative(s) else { continue };
            let scale = cf.scale(s);
            if d.norm() >= ACCEPT_TOL * scale {
                continue;
            }
            if let Some(existing) = roots.iter_mut().find(|r| (r.s - s).norm() < radius) {
                if d.norm() < existing.abs_d {
                    existing.s = s;
                    existing.abs_d = d.norm();
                }
                continue;
            }
            let multiplicity = if dd.norm() < 1e-5 * scale.sqrt() { 2 } else { 1 };
            roots.push(Pole { s, abs_d: d.norm(), multiplicity });
        }
    }
    roots.sort_by(|a, b| a.s.re.total_cmp(&b.s.re).then(a.s.im.total_cmp(&b.s.im)));
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::charfn::DmOrder;
    use crate::params::FeedbackParams;

    #[test]
    fn quadratic_complex_pair() {
        let p = FeedbackParams::new(2.0, 1.0, 0.0, 1.0, 0.0).unwrap();
        let cf = CharacteristicFunction::dm(p, DmOrder::Finite(0));
        let area = SearchBox::new((-3.0, 0.0), (-3.0, 3.0)).unwrap();
        let roots = find_poles(&cf, &area, 12);
        assert_eq!(roots.len(), 2);
        let r3 = 3.0f64.sqrt();
        assert!((roots[0].s - C64::new(-1.0, -r3)).norm() < 1e-10);
        assert!((roots[1].s - C64::new(-1.0, r3)).norm() < 1e-10);
        assert!(roots.iter().all(|r| r.multiplicity == 1));
    }

    #[test]
    fn double_root_reported_once() {
        let p = FeedbackParams::new(1.0, 1.0, 0.0, 1.0, 0.0).unwrap();
        let cf = CharacteristicFunction::dm(p, DmOrder::Finite(0));
        let area = SearchBox::new((-3.0, 0.0), (-3.0, 3.0)).unwrap();
        let roots = find_poles(&cf, &area, 10);
        assert_eq!(roots.len(), 1);
        assert!((roots[0].s + 1.0).norm() < 1e-6);
        assert_eq!(roots[0].multiplicity, 2);
    }

    #[test]
    fn roots_outside_box_are_dropped() {
        let p = FeedbackParams::new(2.0, 1.0, 0.0, 1.0, 0.0).unwrap();
        let cf = CharacteristicFunction::dm(p, DmOrder::Finite(0));
        let area = SearchBox::new((-3.0, 0.0), (0.0, 3.0)).unwrap();
        let roots = find_poles(&cf, &area, 10);
        assert_eq!(roots.len(), 1);
        assert!(roots[0].s.im > 0.0);
    }

    #[test]
    fn inverted_box_rejected() {
        assert!(SearchBox::new((1.0, 0.0), (0.0, 1.0)).is_err());
        assert!(SearchBox::new((0.0, f64::INFINITY), (0.0, 1.0)).is_err());
    }
}
