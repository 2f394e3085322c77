//! Flat JSON configuration files.

use std::f64::consts::PI;
use std::path::Path;

use manifold_regress::eval::{default_candidates, CurveSpec, ExperimentConfig, HyperPolicy};
use manifold_regress::sampling::max_sd;
use manifold_regress::{FitConfig, Hyper, Method};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::fail::Failure;

/// Parses `path`, naming the offending key on failure.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    parse(&text).map_err(|m| Failure::usage(format!("{}: {m}", path.display())))
}

pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T, String> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            e.inner().to_string()
        } else {
            format!("key `{path}`: {}", e.inner())
        }
    })
}

fn bad_key(key: &str, msg: impl std::fmt::Display) -> Failure {
    Failure::usage(format!("key `{key}`: {msg}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveName {
    Simple,
    Spiral,
    Geodesic,
}

fn curve_spec(curve: CurveName, speed: Option<f64>, prefix: &str) -> Result<CurveSpec, Failure> {
    match (curve, speed) {
        (CurveName::Simple, _) => Ok(CurveSpec::Simple),
        (CurveName::Spiral, _) => Ok(CurveSpec::Spiral),
        (CurveName::Geodesic, Some(s)) if s >= 0.0 && s.is_finite() => Ok(CurveSpec::Geodesic { speed: s }),
        (CurveName::Geodesic, Some(s)) => Err(bad_key(&format!("{prefix}speed"), format!("{s} must be finite and ≥ 0"))),
        (CurveName::Geodesic, None) => Err(bad_key(&format!("{prefix}speed"), "required for curve `geodesic`")),
    }
}

fn check_sd(sd: f64, key: &str) -> Result<(), Failure> {
    let top = max_sd();
    if (0.0..=top).contains(&sd) {
        Ok(())
    } else {
        Err(bad_key(key, format!("{sd} outside [0, {top:.6}]")))
    }
}

fn check_n(n: usize, key: &str) -> Result<(), Failure> {
    if n >= 4 {
        Ok(())
    } else {
        Err(bad_key(key, format!("{n} < 4")))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub curve: CurveName,
    pub n: usize,
    pub sd: f64,
    pub seed: u64,
    /// Geodesic speed, for `curve = "geodesic"`.
    #[serde(default)]
    pub speed: Option<f64>,
}

impl SimulateConfig {
    pub fn curve_spec(&self) -> Result<CurveSpec, Failure> {
        check_n(self.n, "n")?;
        check_sd(self.sd, "sd")?;
        curve_spec(self.curve, self.speed, "")
    }
}

/// Estimator options shared by `mise` and `rate`.
#[derive(Debug, Clone, Default)]
pub struct EstimatorOptions {
    pub h: Option<f64>,
    pub n_terms: Option<usize>,
    pub loocv: bool,
    pub lambda_max: Option<f64>,
    pub vmax: Option<f64>,
    pub reflect: Option<bool>,
}

fn yes() -> bool {
    true
}

impl EstimatorOptions {
    pub fn hyper_policy(&self, method: Method) -> Result<HyperPolicy, Failure> {
        if let Some(h) = self.h {
            if !(h > 0.0) {
                return Err(bad_key("h", format!("{h} must be positive")));
            }
        }
        if self.n_terms == Some(0) {
            return Err(bad_key("N", "must be at least 1"));
        }
        Ok(if method.uses_bandwidth() {
            match self.h {
                Some(h) => HyperPolicy::Fixed(Hyper::Bandwidth(h)),
                None => HyperPolicy::Loocv(default_candidates(method)),
            }
        } else if method.uses_terms() {
            match self.n_terms {
                Some(n) => HyperPolicy::Fixed(Hyper::Terms(n)),
                None if self.loocv && method == Method::TriFre => HyperPolicy::Loocv(default_candidates(method)),
                None => HyperPolicy::Fixed(Hyper::None),
            }
        } else {
            HyperPolicy::Fixed(Hyper::None)
        })
    }

    pub fn fit_config(&self) -> Result<FitConfig, Failure> {
        let mut cfg = FitConfig { lambda_max: Some(self.lambda_max.unwrap_or(4.0 * PI)), ..FitConfig::default() };
        if let Some(l) = self.lambda_max {
            if !(l > 0.0) {
                return Err(bad_key("lambda_max", format!("{l} must be positive")));
            }
        }
        if let Some(v) = self.vmax {
            if !(v > 0.0) {
                return Err(bad_key("vmax", format!("{v} must be positive")));
            }
            cfg.speed_bound = v;
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Setting {
    pub curve: CurveName,
    #[serde(default)]
    pub speed: Option<f64>,
    pub n: usize,
    pub sd: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MiseConfig {
    pub methods: Vec<Method>,
    pub settings: Vec<Setting>,
    pub reps: usize,
    pub seed: u64,
    /// Fixed bandwidth for local methods (otherwise LOOCV).
    #[serde(default)]
    pub h: Option<f64>,
    /// Fixed number of basis functions for trigonometric methods.
    #[serde(default, rename = "N")]
    pub n_terms: Option<usize>,
    /// Select `N` for TriFre by LOOCV when `N` is not given.
    #[serde(default = "yes")]
    pub loocv: bool,
    #[serde(default)]
    pub lambda_max: Option<f64>,
    #[serde(default)]
    pub vmax: Option<f64>,
    #[serde(default)]
    pub reflect: Option<bool>,
}

impl MiseConfig {
    fn options(&self) -> EstimatorOptions {
        EstimatorOptions {
            h: self.h,
            n_terms: self.n_terms,
            loocv: self.loocv,
            lambda_max: self.lambda_max,
            vmax: self.vmax,
            reflect: self.reflect,
        }
    }

    /// One experiment per (setting, method), settings outermost.
    pub fn experiments(&self) -> Result<Vec<(usize, ExperimentConfig)>, Failure> {
        if self.methods.is_empty() {
            return Err(bad_key("methods", "empty list"));
        }
        if self.settings.is_empty() {
            return Err(bad_key("settings", "empty list"));
        }
        if self.reps == 0 {
            return Err(bad_key("reps", "must be at least 1"));
        }
        let fit = self.options().fit_config()?;
        let mut out = Vec::new();
        for (i, s) in self.settings.iter().enumerate() {
            let prefix = format!("settings[{i}].");
            check_n(s.n, &format!("{prefix}n"))?;
            check_sd(s.sd, &format!("{prefix}sd"))?;
            let curve = curve_spec(s.curve, s.speed, &prefix)?;
            for &m in &self.methods {
                let mut exp = ExperimentConfig::new(m, curve.clone(), s.n, s.sd, self.reps, self.seed)
                    .with_hyper(self.options().hyper_policy(m)?);
                exp.fit = fit.clone();
                exp.reflect = self.options().reflect;
                out.push((i, exp));
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateConfig {
    pub method: Method,
    pub curve: CurveName,
    #[serde(default)]
    pub speed: Option<f64>,
    pub sd: f64,
    pub ladder: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    #[serde(default)]
    pub target_exponent: Option<f64>,
    /// Fixed bandwidth for local methods (otherwise LOOCV).
    #[serde(default)]
    pub h: Option<f64>,
    /// Fixed number of basis functions for trigonometric methods.
    #[serde(default, rename = "N")]
    pub n_terms: Option<usize>,
    /// Select `N` for TriFre by LOOCV when `N` is not given.
    #[serde(default = "yes")]
    pub loocv: bool,
    #[serde(default)]
    pub lambda_max: Option<f64>,
    #[serde(default)]
    pub vmax: Option<f64>,
    #[serde(default)]
    pub reflect: Option<bool>,
}

impl RateConfig {
    fn options(&self) -> EstimatorOptions {
        EstimatorOptions {
            h: self.h,
            n_terms: self.n_terms,
            loocv: self.loocv,
            lambda_max: self.lambda_max,
            vmax: self.vmax,
            reflect: self.reflect,
        }
    }

    pub fn rate_check(&self) -> Result<manifold_regress::RateCheckConfig, Failure> {
        check_sd(self.sd, "sd")?;
        if self.reps == 0 {
            return Err(bad_key("reps", "must be at least 1"));
        }
        if self.ladder.len() < 3 || self.ladder.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad_key("ladder", "needs at least 3 strictly increasing sample sizes"));
        }
        check_n(self.ladder[0], "ladder")?;
        let curve = curve_spec(self.curve, self.speed, "")?;
        let mut base = ExperimentConfig::new(self.method, curve, self.ladder[0], self.sd, self.reps, self.seed)
            .with_hyper(self.options().hyper_policy(self.method)?);
        base.fit = self.options().fit_config()?;
        base.reflect = self.options().reflect;
        Ok(manifold_regress::RateCheckConfig { base, ladder: self.ladder.clone(), target_exponent: self.target_exponent })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn errors_name_the_key() {
        let err = parse::<SimulateConfig>(r#"{"curve":"simple","n":"x","sd":0.1,"seed":1}"#).unwrap_err();
        assert!(err.contains("`n`"), "{err}");
        let err = parse::<SimulateConfig>(r#"{"curve":"simple","n":5,"sd":0.1,"seed":1,"bogus":2}"#).unwrap_err();
        assert!(err.contains("bogus"), "{err}");
        let err = parse::<SimulateConfig>(r#"{"curve":"simple","n":5,"seed":1}"#).unwrap_err();
        assert!(err.contains("sd"), "{err}");
    }

    #[test]
    fn range_checks() {
        let cfg: SimulateConfig = parse(r#"{"curve":"simple","n":20,"sd":3.0,"seed":1}"#).unwrap();
        assert!(cfg.curve_spec().unwrap_err().message.contains("`sd`"));
        let cfg: SimulateConfig = parse(r#"{"curve":"geodesic","n":20,"sd":0.3,"seed":1}"#).unwrap();
        assert!(cfg.curve_spec().unwrap_err().message.contains("`speed`"));
    }

    #[test]
    fn mise_config_expands_settings_by_methods() {
        let cfg: MiseConfig = parse(
            r#"{"methods":["lingeo","locfre"],"settings":[{"curve":"simple","n":20,"sd":0.1},
               {"curve":"geodesic","speed":1.0,"n":30,"sd":0.5}],"reps":3,"seed":9,"h":0.2}"#,
        )
        .unwrap();
        let exps = cfg.experiments().unwrap();
        assert_eq!(exps.len(), 4);
        assert_eq!(exps[1].1.hyper, HyperPolicy::Fixed(Hyper::Bandwidth(0.2)));
        assert_eq!(exps[3].0, 1);
        let empty: MiseConfig = parse(r#"{"methods":[],"settings":[{"curve":"simple","n":20,"sd":0.1}],"reps":3,"seed":9}"#).unwrap();
        assert!(empty.experiments().is_err());
    }
}
