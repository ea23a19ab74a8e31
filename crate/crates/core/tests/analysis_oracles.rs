use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use jcfeedback::analysis::series::{default_order, series_dm_estimate};
use jcfeedback::analysis::{
    find_poles, series_cm, series_dm, spectrum, CharacteristicFunction, DmOrder, SearchBox,
};
use jcfeedback::models::{simulate_cm, simulate_dm_delay, simulate_no_feedback, SimConfig};
use jcfeedback::validation::stabilized_rabi_params;
use jcfeedback::{Error, FeedbackParams, ModelKind};

/// The discrete-mode tower with the exponent sign flipped, evaluated naively.
fn flipped_sign_dm(p: &FeedbackParams, t: f64, m_max: usize) -> C64 {
    let k = p.kappa();
    let mut sum = 0.0;
    let x = k * t;
    let fact = |n: usize| (1..=n).map(|v| v as f64).product::<f64>();
    let binom = |n: usize, r: usize| fact(n) / (fact(r) * fact(n - r));
    for m in 0..=m_max {
        for l in 0..=m {
            let n = m + l + 1;
            sum += (-4.0f64).powi(m as i32) * binom(m, l) * x.powi(n as i32) / fact(n) * (-x).exp();
        }
    }
    C64::new(0.0, sum)
}

#[test]
fn printed_sign_is_the_one_that_matches_first_interval() {
    let p = FeedbackParams::new(1.0, 1.0, 0.0, PI / 3.0, PI).unwrap();
    let config = SimConfig::new(p.tau()).steps_per_delay(1000);
    let traj = simulate_dm_delay(&p, &config).unwrap();
    for frac in [0.2, 0.5, 0.9] {
        let i = traj.index_at(frac * p.tau());
        let t = traj.times[i];
        let printed = series_dm(&p, t, default_order(&p, t), 4).unwrap();
        let flipped = flipped_sign_dm(&p, t, 30);
        assert!((printed - traj.c_g[i]).norm() < 1e-9);
        assert!((flipped - traj.c_g[i]).norm() > 1e-2);
    }
}

#[test]
fn series_follow_delay_equations_past_several_roundtrips() {
    let p = FeedbackParams::new(1.0, 1.0, 0.0, PI / 3.0, PI).unwrap();
    let config = SimConfig::new(2.5 * p.tau()).steps_per_delay(1000);
    let (cm, dm) = (simulate_cm(&p, &config).unwrap(), simulate_dm_delay(&p, &config).unwrap());
    let (_, _, cm_end) = cm.last().unwrap();
    let (t, _, dm_end) = dm.last().unwrap();
    assert!((series_cm(&p, t, 10).unwrap() - cm_end).norm() < 1e-4);
    assert!((series_dm(&p, t, default_order(&p, t), 5).unwrap() - dm_end).norm() < 1e-4);
}

#[test]
fn series_reports_its_horizon() {
    let p = FeedbackParams::new(1.0, 1.0, 0.0, 1.0, PI).unwrap();
    let est = series_dm_estimate(&p, 2.0, default_order(&p, 2.0), 3).unwrap();
    assert!(est.truncation_change < 1e-12 && est.rounding < 1e-8);
    assert!(matches!(series_dm(&p, 40.0, default_order(&p, 40.0), 50), Err(Error::SeriesHorizon { .. })));
}

#[test]
fn cm_has_marginal_pole_at_stabilization_point() {
    let p = stabilized_rabi_params();
    let area = SearchBox::new((-1.0, 1.0), (-3.0, 3.0)).unwrap();
    let roots = find_poles(&CharacteristicFunction::cm(p), &area, 20);
    let plus = roots.iter().find(|r| (r.s - C64::new(0.0, 1.0)).norm() < 1e-6).expect("root at i gamma");
    assert!(plus.s.re.abs() < 1e-8);
    assert!(roots.iter().any(|r| (r.s - C64::new(0.0, -1.0)).norm() < 1e-6));
}

#[test]
fn lossy_dm_kernel_has_no_marginal_pole() {
    // with an extra loss channel every pole moves into the left half plane
    let p = stabilized_rabi_params().with_kappa1(0.3).unwrap();
    let area = SearchBox::new((-1.0, 1.0), (-3.0, 3.0)).unwrap();
    let roots = find_poles(&CharacteristicFunction::dm(p, DmOrder::Infinite), &area, 20);
    assert!(!roots.is_empty());
    assert!(roots.iter().all(|r| r.s.re < -1e-4), "{roots:?}");
}

#[test]
fn parseval_for_the_closed_form_without_feedback() {
    let p = FeedbackParams::new(1.5, 1.0, 0.5, 1.0, 0.0).unwrap();
    let grid: Vec<f64> = (0..100_001).map(|i| -200.0 + i as f64 * 0.004).collect();
    let s = spectrum(&p, ModelKind::NoFeedback, &grid).unwrap();
    let traj = simulate_no_feedback(&p, &SimConfig::new(40.0).steps_per_delay(1000)).unwrap();
    let time = 4.0 * p.kappa1() * traj.integrated_cavity_population();
    assert!((s.integral() - time).abs() / time < 1e-3);
}

#[test]
fn discrete_mode_suppresses_resonant_emission() {
    let p = FeedbackParams::new(1.0, 1.0, 0.5, 1.0, PI).unwrap();
    let dm = spectrum(&p, ModelKind::DiscreteModeDelay, &[0.0]).unwrap().density[0];
    let nofb = spectrum(&p, ModelKind::NoFeedback, &[0.0]).unwrap().density[0];
    assert!(dm < nofb);
    assert!((dm - 2.0 * 0.5 / PI / 25.0).abs() < 1e-15);
}
