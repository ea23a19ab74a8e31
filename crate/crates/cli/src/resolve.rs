//! Merges preset, config file and flags into one parameter set.

use std::collections::BTreeMap;
use std::path::PathBuf;

use jcfeedback::{FeedbackParams, ModelKind};

use crate::presets::{self, Preset};
use crate::quantity::parse_quantity;
use crate::{config, CliError, Common};

#[derive(Debug, Clone)]
pub struct Resolved {
    pub label: String,
    pub params: FeedbackParams,
    pub t_max: Option<f64>,
    pub steps_per_delay: Option<usize>,
    pub modes: Option<usize>,
    pub models: Option<Vec<ModelKind>>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default)]
struct Raw {
    gamma: Option<f64>,
    kappa: Option<f64>,
    kappa1: Option<f64>,
    tau: Option<f64>,
    kappa_tau: Option<f64>,
    phi: Option<f64>,
    t_max: Option<f64>,
    steps_per_delay: Option<usize>,
    modes: Option<usize>,
    models: Option<Vec<ModelKind>>,
    out: Option<PathBuf>,
}

pub fn parse_models(list: &str) -> Result<Vec<ModelKind>, CliError> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse::<ModelKind>().map_err(|e| CliError::Usage(e.to_string())))
        .collect()
}

fn usage<E: std::fmt::Display>(key: &str) -> impl Fn(E) -> CliError + '_ {
    move |e| CliError::Usage(format!("{key}: {e}"))
}

fn apply_config(raw: &mut Raw, map: &BTreeMap<String, String>) -> Result<(), CliError> {
    for (key, value) in map {
        let q = || parse_quantity(value).map_err(usage(key));
        match key.as_str() {
            "gamma" => raw.gamma = Some(q()?),
            "kappa" => raw.kappa = Some(q()?),
            "kappa1" => raw.kappa1 = Some(q()?),
            "tau" => raw.tau = Some(q()?),
            "kappa-tau" => raw.kappa_tau = Some(q()?),
            "phi" => raw.phi = Some(q()?),
            "tmax" => raw.t_max = Some(q()?),
            "steps-per-delay" => raw.steps_per_delay = Some(value.parse().map_err(usage(key))?),
            "modes" => raw.modes = Some(value.parse().map_err(usage(key))?),
            "models" => raw.models = Some(parse_models(value)?),
            "out" => raw.out = Some(PathBuf::from(value)),
            _ => {}
        }
    }
    Ok(())
}

fn from_preset(p: &Preset) -> Raw {
    Raw {
        gamma: Some(p.gamma),
        kappa: Some(p.kappa),
        kappa1: Some(p.kappa1),
        tau: p.tau,
        phi: Some(p.phi),
        t_max: Some(p.t_max),
        steps_per_delay: p.steps_per_delay,
        models: Some(p.models.to_vec()),
        ..Raw::default()
    }
}

pub fn resolve(common: &Common) -> Result<Resolved, CliError> {
    let file = match &common.config {
        Some(path) => config::load(path)?,
        None => BTreeMap::new(),
    };
    let preset_name = common.preset.clone().or_else(|| file.get("preset").cloned());
    let preset = match &preset_name {
        Some(name) => Some(presets::find(name).ok_or_else(|| {
            CliError::Usage(format!("unknown preset `{name}`; available presets:\n{}", presets::listing()))
        })?),
        None => None,
    };
    let mut raw = preset.map(from_preset).unwrap_or_default();
    apply_config(&mut raw, &file)?;

    let c = common;
    macro_rules! overlay {
        ($($field:ident <- $flag:ident),*) => {$(if c.$flag.is_some() { raw.$field = c.$flag.clone(); })*};
    }
    overlay!(gamma <- gamma, kappa <- kappa, kappa1 <- kappa1, tau <- tau, kappa_tau <- kappa_tau, phi <- phi,
        t_max <- tmax, steps_per_delay <- steps_per_delay, modes <- modes, out <- out);

    let need = |v: Option<f64>, flag: &str| {
        v.ok_or_else(|| CliError::Usage(format!("missing --{flag} (give it, a --config entry, or a --preset)")))
    };
    let kappa = need(raw.kappa, "kappa")?;
    let tau = match raw.kappa_tau {
        Some(kt) => kt / kappa,
        None if preset.is_some_and(|p| p.tau.is_none()) => {
            return Err(CliError::Usage(format!(
                "preset `{}` does not fix the delay; pass --kappa-tau",
                preset_name.unwrap_or_default()
            )))
        }
        None => need(raw.tau, "tau")?,
    };
    let params = FeedbackParams::new(
        need(raw.gamma, "gamma")?,
        kappa,
        raw.kappa1.unwrap_or(0.0),
        tau,
        need(raw.phi, "phi")?,
    )?;
    Ok(Resolved {
        label: preset_name.unwrap_or_else(|| "custom".to_string()),
        params,
        t_max: raw.t_max,
        steps_per_delay: raw.steps_per_delay,
        modes: raw.modes,
        models: raw.models,
        out: raw.out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn flags_override_preset() {
        let common = Common { preset: Some("fig-trapped".into()), gamma: Some(2.0), ..Common::default() };
        let r = resolve(&common).unwrap();
        assert_eq!(r.params.gamma(), 2.0);
        assert_eq!(r.params.tau(), PI / 3.0);
        assert_eq!(r.label, "fig-trapped");
    }

    #[test]
    fn spectrum_presets_need_delay() {
        let common = Common { preset: Some("fig-spectrum-short".into()), ..Common::default() };
        assert!(matches!(resolve(&common), Err(CliError::Usage(_))));
        let common = Common { kappa_tau: Some(2.0), ..common };
        assert_eq!(resolve(&common).unwrap().params.tau(), 2.0);
    }

    #[test]
    fn explicit_mode_requires_all_rates() {
        let common = Common { gamma: Some(1.0), kappa: Some(1.0), phi: Some(0.0), ..Common::default() };
        assert!(matches!(resolve(&common), Err(CliError::Usage(_))));
    }

    #[test]
    fn unknown_preset_lists_names() {
        let common = Common { preset: Some("nope".into()), ..Common::default() };
        match resolve(&common) {
            Err(CliError::Usage(msg)) => assert!(msg.contains("fig-trapped")),
            other => panic!("{other:?}"),
        }
    }
}
