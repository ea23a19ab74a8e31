use std::f64::consts::PI;
use std::path::PathBuf;

use jcfeedback::analysis::series::{default_order, series_cm_estimate, series_dm_estimate, HORIZON_TOL};
use jcfeedback::analysis::spectrum::symmetric_grid;
use jcfeedback::analysis::{
    dark_overlap, find_poles, normal_modes as modes_of, spectrum as spectrum_of, steady_state_dm,
    CharacteristicFunction, DmOrder, SearchBox,
};
use jcfeedback::models::{self, recommended_modes, simulate_dm_modesum, SimConfig};
use jcfeedback::validation::{find_check, run_checks, Level};
use jcfeedback::{Error, FeedbackParams, ModelKind};

use crate::output::{num, params_line, Sink};
use crate::resolve::{parse_models, resolve};
use crate::{CliError, Common, FeedbackModel, SpectrumKind};

/// Marginal roots have `|Re s|` below this.
const MARGINAL: f64 = 1e-8;

fn complex(s: num_complex::Complex64) -> String {
    format!("{} {} {}i", num(s.re), if s.im.is_sign_negative() { '-' } else { '+' }, num(s.im.abs()))
}

fn print_regime(params: &FeedbackParams) {
    println!("params {params}");
    println!("regime {}", params.regime());
}

pub fn simulate(common: &Common, models_flag: Option<&str>) -> Result<(), CliError> {
    let r = resolve(common)?;
    let p = r.params;
    let models = match models_flag {
        Some(list) => parse_models(list)?,
        None => r.models.clone().unwrap_or_else(|| {
            vec![ModelKind::NoFeedback, ModelKind::ContinuousMode, ModelKind::DiscreteModeDelay]
        }),
    };
    if models.is_empty() {
        return Err(CliError::Usage("no models selected".into()));
    }
    let t_max = r.t_max.ok_or_else(|| CliError::Usage("missing --tmax".into()))?;
    let mut config = SimConfig::new(t_max);
    if let Some(m) = r.steps_per_delay {
        config = config.steps_per_delay(m);
    }
    let dir = r.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Io { path: dir.clone(), source: e })?;

    print_regime(&p);
    for kind in models {
        let kind = match (kind, r.modes) {
            (ModelKind::DiscreteModeSum { modes: 0 }, Some(n)) => ModelKind::DiscreteModeSum { modes: n },
            (ModelKind::DiscreteModeSum { modes: 0 }, None) => {
                ModelKind::DiscreteModeSum { modes: recommended_modes(&p) }
            }
            (k, _) => k,
        };
        let traj = match kind {
            ModelKind::DiscreteModeSum { modes } => simulate_dm_modesum(&p, modes, &config)?.0,
            k => models::simulate(k, &p, &config)?,
        };
        let path = dir.join(format!("{}_{}.csv", r.label, kind.name()));
        let mut sink = Sink::open(Some(&path))?;
        let mut extra = vec![
            ("model", kind.to_string()),
            ("t_max", num(t_max)),
            ("steps_per_delay", config.steps_per_delay.to_string()),
        ];
        if let ModelKind::DiscreteModeSum { modes } = kind {
            extra.push(("modes", modes.to_string()));
        }
        sink.line(&params_line(&p, &extra))?;
        sink.line("t,re_ce,im_ce,abs2_ce,re_cg,im_cg,abs2_cg,t_over_tau")?;
        for i in 0..traj.len() {
            let (t, ce, cg) = (traj.times[i], traj.c_e[i], traj.c_g[i]);
            sink.row(&[t, ce.re, ce.im, ce.norm_sqr(), cg.re, cg.im, cg.norm_sqr(), t / p.tau()])?;
        }
        sink.finish()?;
        println!("wrote {} ({} rows)", path.display(), traj.len());
        if matches!(kind, ModelKind::DiscreteModeDelay | ModelKind::DiscreteModeSum { .. }) {
            let ss = steady_state_dm(&p);
            if p.phase_is_odd_pi() {
                println!("steady_state {} (|c_e| -> 1/(1+eta), eta = {})", num(ss), num(p.eta()));
            } else {
                println!("steady_state {} (phi is not an odd multiple of pi)", num(ss));
            }
        }
    }
    Ok(())
}

pub fn spectrum(
    common: &Common,
    kind: SpectrumKind,
    all: bool,
    omega_max: Option<f64>,
    points: usize,
) -> Result<(), CliError> {
    let r = resolve(common)?;
    let p = r.params;
    if points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let half = omega_max.unwrap_or(10.0 * p.gamma().max(p.kappa()));
    if !(half > 0.0) {
        return Err(CliError::Usage("--omega-max must be positive".into()));
    }
    let grid = symmetric_grid(half, points);
    let kinds: Vec<ModelKind> = if all {
        vec![ModelKind::NoFeedback, ModelKind::ContinuousMode, ModelKind::DiscreteModeDelay]
    } else {
        vec![match kind {
            SpectrumKind::Nofb => ModelKind::NoFeedback,
            SpectrumKind::Cm => ModelKind::ContinuousMode,
            SpectrumKind::Dm => ModelKind::DiscreteModeDelay,
        }]
    };
    let spectra = kinds.iter().map(|&k| spectrum_of(&p, k, &grid)).collect::<Result<Vec<_>, Error>>()?;
    let mut sink = Sink::open(r.out.as_deref())?;
    let names: Vec<&str> = kinds.iter().map(|k| k.name()).collect();
    sink.line(&params_line(&p, &[("kinds", names.join("+"))]))?;
    sink.line(if all { "omega,S_nofb,S_cm,S_dm" } else { "omega,S" })?;
    for (i, &w) in grid.iter().enumerate() {
        let mut row = vec![w];
        row.extend(spectra.iter().map(|s| s.density[i]));
        sink.row(&row)?;
    }
    sink.finish()
}

pub fn validate(fast: bool, only: &[String]) -> Result<(), CliError> {
    let level = if fast { Level::Fast } else { Level::Full };
    let selected = only
        .iter()
        .filter(|s| !s.trim().is_empty())
        .map(|key| find_check(key).ok_or_else(|| CliError::Usage(format!("unknown check `{key}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    let outcomes = run_checks(level, &selected);
    for o in &outcomes {
        println!("{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} passed, {} failed", outcomes.len() - failed, failed);
    if failed > 0 {
        Err(CliError::ChecksFailed(failed))
    } else {
        Ok(())
    }
}

pub fn poles(
    common: &Common,
    model: FeedbackModel,
    order: &str,
    bounds: [Option<f64>; 4],
    grid: usize,
    check_rabi: bool,
) -> Result<(), CliError> {
    let r = resolve(common)?;
    let p = r.params;
    let cf = match model {
        FeedbackModel::Cm => CharacteristicFunction::cm(p),
        FeedbackModel::Dm => {
            let order = match order.trim() {
                "inf" | "infinite" => DmOrder::Infinite,
                n => DmOrder::Finite(n.parse().map_err(|_| CliError::Usage(format!("bad --order `{n}`")))?),
            };
            CharacteristicFunction::dm(p, order)
        }
    };
    if grid == 0 {
        return Err(CliError::Usage("--grid must be at least 1".into()));
    }
    let reach = 3.0 * p.gamma().max(p.kappa());
    let area = SearchBox::new(
        (bounds[0].unwrap_or(-2.0 * (p.kappa() + p.kappa1())), bounds[1].unwrap_or(p.kappa())),
        (bounds[2].unwrap_or(-reach), bounds[3].unwrap_or(reach)),
    )?;
    let roots = find_poles(&cf, &area, grid);

    let mut sink = Sink::open(r.out.as_deref())?;
    let to_stdout = sink.is_stdout();
    sink.line(&params_line(&p, &[("model", cf.kind().to_string())]))?;
    sink.line("re_s,im_s,abs_D")?;
    for root in &roots {
        sink.row(&[root.s.re, root.s.im, root.abs_d])?;
    }
    sink.finish()?;

    let mut notes = Vec::new();
    for root in &roots {
        if root.s.re.abs() < MARGINAL {
            notes.push(format!("marginal root s = {}", complex(root.s)));
        }
        if root.multiplicity > 1 {
            notes.push(format!("double root s = {}", complex(root.s)));
        }
    }
    notes.push(format!("{} root(s) found", roots.len()));
    if check_rabi {
        let phase = ((p.delta0() + p.gamma()) * p.tau()).rem_euclid(2.0 * PI);
        let distance = phase.min(2.0 * PI - phase);
        let met = distance < 1e-9;
        notes.push(format!(
            "stabilization condition (Delta0 + gamma) tau mod 2pi = {}: {}",
            num(distance),
            if met { "met" } else { "not met" }
        ));
        notes.push(format!("predicted amplitude 1/(1 + kappa tau) = {}", num(1.0 / (1.0 + p.delay_parameter()))));
    }
    for n in notes {
        if to_stdout {
            eprintln!("{n}");
        } else {
            println!("{n}");
        }
    }
    Ok(())
}

pub fn steady_state(common: &Common) -> Result<(), CliError> {
    let p = resolve(common)?.params;
    print_regime(&p);
    println!("eta {}", num(p.eta()));
    println!("steady_state {}", num(steady_state_dm(&p)));
    println!("steady_population {}", num(steady_state_dm(&p).powi(2)));
    println!("dark_overlap {}", num(dark_overlap(&p)?));
    if !p.phase_is_odd_pi() {
        println!("note: phi is not an odd multiple of pi; no excitation is trapped");
    }
    Ok(())
}

pub fn normal_modes(common: &Common, coupling: Option<f64>) -> Result<(), CliError> {
    let (gamma, big_g) = match (coupling, common.gamma) {
        (Some(g), Some(gamma)) if common.preset.is_none() && common.config.is_none() => (gamma, g),
        (c, _) => {
            let p = resolve(common)?.params;
            (p.gamma(), c.unwrap_or(p.mode_coupling()))
        }
    };
    let m = modes_of(gamma, big_g)?;
    println!("gamma {}", num(gamma));
    println!("G {}", num(big_g));
    println!("xi {}", num(m.xi));
    println!("basis A,C1,C2");
    for (name, energy, v) in
        [("bright+", m.xi, m.bright_plus), ("bright-", -m.xi, m.bright_minus), ("dark", 0.0, m.dark)]
    {
        println!("{name} E={} [{}, {}, {}]", num(energy), num(v[0]), num(v[1]), num(v[2]));
    }
    println!("dark_overlap {}", num(m.dark_overlap));
    Ok(())
}

pub fn series(
    common: &Common,
    model: FeedbackModel,
    points: usize,
    m_max: Option<usize>,
    p_max: Option<usize>,
) -> Result<(), CliError> {
    let r = resolve(common)?;
    let p = r.params;
    let t_max = r.t_max.ok_or_else(|| CliError::Usage("missing --tmax".into()))?;
    if points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let mut sink = Sink::open(r.out.as_deref())?;
    let label = match model {
        FeedbackModel::Cm => "cm",
        FeedbackModel::Dm => "dm",
    };
    sink.line(&params_line(&p, &[("series", label.to_string())]))?;
    sink.line("t,re_cg,im_cg,abs2_cg")?;
    for i in 0..points {
        let t = t_max * i as f64 / (points - 1) as f64;
        let order = m_max.unwrap_or_else(|| default_order(&p, t));
        let est = match model {
            FeedbackModel::Cm => series_cm_estimate(&p, t, order)?,
            FeedbackModel::Dm => {
                let delays = p_max.unwrap_or((t / p.tau()).floor() as usize + 1);
                series_dm_estimate(&p, t, order, delays)?
            }
        };
        let change = est.truncation_change.max(est.rounding);
        if !est.value.is_finite() || !(change < HORIZON_TOL) {
            sink.finish()?;
            return Err(Error::SeriesHorizon { t, change }.into());
        }
        sink.row(&[t, est.value.re, est.value.im, est.value.norm_sqr()])?;
    }
    sink.finish()
}
