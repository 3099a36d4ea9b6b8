//! Run configuration shared by the command-line front end.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::counts::NoiseConfig;
use crate::error::{Error, Result};
use crate::experiments::{dimension_sources, SourcePair};
use crate::observables::{load_h2_table, FactorLayout};
use crate::optimizers::{GdConfig, GpConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    VqeH2,
    Vqf,
    ScanH2,
    Dissociation,
    Interference,
    CertifyDim,
    Fidelity,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::VqeH2 => "vqe-h2",
            Experiment::Vqf => "vqf",
            Experiment::ScanH2 => "scan-h2",
            Experiment::Dissociation => "dissociation",
            Experiment::Interference => "interference",
            Experiment::CertifyDim => "certify-dim",
            Experiment::Fidelity => "fidelity",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Bayes,
    Gd,
}

impl FromStr for OptimizerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bayes" => Ok(OptimizerKind::Bayes),
            "gd" => Ok(OptimizerKind::Gd),
            _ => Err(Error::InvalidArgument(format!("optimizer {s:?} is not one of bayes, gd"))),
        }
    }
}

/// Either the literal string `"exact"` or a sampling budget.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NoiseSpec {
    Named(String),
    Sampled {
        total_counts_per_setting: u64,
        #[serde(default = "default_car")]
        car: toml::Value,
        #[serde(default)]
        subtract_accidentals: bool,
    },
}

fn default_car() -> toml::Value {
    toml::Value::String("inf".into())
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec::Named("exact".into())
    }
}

fn parse_car(v: &toml::Value) -> Option<f64> {
    match v {
        toml::Value::Float(x) => Some(*x),
        toml::Value::Integer(i) => Some(*i as f64),
        toml::Value::String(s) if matches!(s.as_str(), "inf" | "infinite" | "infinity") => Some(f64::INFINITY),
        _ => None,
    }
}

/// Complete description of one experiment run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub noise: NoiseSpec,
    pub optimizer: Option<OptimizerKind>,
    pub gd: Option<GdConfig>,
    pub gp: Option<GpConfig>,
    pub output_dir: Option<PathBuf>,
    /// Bond length in Å for the H2 experiments.
    #[serde(rename = "R")]
    pub r: Option<f64>,
    /// Bond lengths of a dissociation sweep; defaults to the full grid.
    #[serde(rename = "R_values")]
    pub r_values: Option<Vec<f64>>,
    /// Number to factor.
    #[serde(rename = "N")]
    pub n: Option<u64>,
    #[serde(default = "one")]
    pub epsilon: f64,
    pub pair: Option<String>,
    pub d: Option<usize>,
    pub sources: Option<String>,
    pub source: Option<usize>,
    pub grid_points: Option<usize>,
    pub init: Option<Vec<f64>>,
}

fn one() -> f64 {
    1.0
}

impl RunConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            seed: 0,
            noise: NoiseSpec::default(),
            optimizer: None,
            gd: None,
            gp: None,
            output_dir: None,
            r: None,
            r_values: None,
            n: None,
            epsilon: 1.0,
            pair: None,
            d: None,
            sources: None,
            source: None,
            grid_points: None,
            init: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidArgument(format!("config: {e}")))
    }

    /// Noise model, `None` for exact evaluation. Call after validation.
    pub fn noise_config(&self) -> Result<Option<NoiseConfig>> {
        match &self.noise {
            NoiseSpec::Named(s) if s == "exact" => Ok(None),
            NoiseSpec::Named(s) => Err(Error::InvalidArgument(format!("noise must be \"exact\" or a table, got {s:?}"))),
            NoiseSpec::Sampled { total_counts_per_setting, car, subtract_accidentals } => {
                let car = parse_car(car).ok_or_else(|| Error::InvalidArgument(format!("car must be a number or \"inf\", got {car}")))?;
                let mut cfg = NoiseConfig::new(*total_counts_per_setting, car, self.seed);
                cfg.subtract_accidentals = *subtract_accidentals;
                cfg.validate()?;
                Ok(Some(cfg))
            }
        }
    }

    pub fn optimizer_kind(&self) -> OptimizerKind {
        self.optimizer.unwrap_or(match self.experiment {
            Experiment::Vqf => OptimizerKind::Gd,
            _ => OptimizerKind::Bayes,
        })
    }

    pub fn gd_config(&self) -> GdConfig {
        self.gd.unwrap_or(match self.experiment {
            Experiment::Vqf => GdConfig::vqf(),
            _ => GdConfig::h2(),
        })
    }

    pub fn gp_config(&self) -> GpConfig {
        self.gp.unwrap_or_default()
    }
}

/// Every violation in `cfg`, or `Ok` when it can run.
pub fn validate_config(cfg: &RunConfig) -> std::result::Result<(), Vec<String>> {
    let mut errs = Vec::new();
    if !(0.0..=1.0).contains(&cfg.epsilon) {
        errs.push(format!("epsilon must lie in [0, 1], got {}", cfg.epsilon));
    }
    if let Err(e) = cfg.noise_config() {
        errs.push(e.to_string());
    }
    if let Some(gd) = &cfg.gd {
        if let Err(e) = gd.validate() {
            errs.push(e.to_string());
        }
    }
    if let Some(gp) = &cfg.gp {
        if let Err(e) = gp.validate() {
            errs.push(e.to_string());
        }
    }
    if cfg.grid_points.is_some_and(|g| g < 4) {
        errs.push("grid_points must be at least 4".into());
    }
    let check_r = |r: f64, errs: &mut Vec<String>| {
        if let Err(e) = load_h2_table(r) {
            errs.push(e.to_string());
        }
    };
    match cfg.experiment {
        Experiment::VqeH2 | Experiment::ScanH2 => match cfg.r {
            Some(r) => check_r(r, &mut errs),
            None => errs.push(format!("{} requires R", cfg.experiment)),
        },
        Experiment::Dissociation => {
            for &r in cfg.r_values.iter().flatten() {
                check_r(r, &mut errs);
            }
        }
        Experiment::Vqf => match cfg.n {
            Some(n) => {
                if let Err(e) = FactorLayout::new(n, 2, 2) {
                    errs.push(e.to_string());
                }
            }
            None => errs.push("vqf requires N".into()),
        },
        Experiment::Interference => {
            if let Some(p) = &cfg.pair {
                if let Err(e) = p.parse::<SourcePair>() {
                    errs.push(e.to_string());
                }
            }
        }
        Experiment::CertifyDim => match cfg.d {
            Some(d) if (2..=4).contains(&d) => {
                if let Some(s) = &cfg.sources {
                    if !dimension_sources(d).contains(&s.as_str()) {
                        errs.push(format!("sources {s:?} do not prepare a dimension-{d} state; choose one of {:?}", dimension_sources(d)));
                    }
                }
            }
            Some(d) => errs.push(format!("d must be 2, 3 or 4, got {d}")),
            None => errs.push("certify-dim requires d".into()),
        },
        Experiment::Fidelity => {
            if cfg.source.is_some_and(|m| !(1..=4).contains(&m)) {
                errs.push(format!("source must be in 1..=4, got {}", cfg.source.unwrap_or(0)));
            }
        }
    }
    if let Some(init) = &cfg.init {
        let want = match cfg.experiment {
            Experiment::Vqf => Some(3),
            Experiment::VqeH2 => Some(1),
            _ => None,
        };
        if want.is_some_and(|w| w != init.len()) {
            errs.push(format!("init must have {} entries for {}", want.unwrap_or(0), cfg.experiment));
        }
    }
    if cfg.experiment == Experiment::VqeH2 && cfg.optimizer_kind() == OptimizerKind::Bayes && cfg.gd.is_some() && cfg.gp.is_none() {
        errs.push("gd settings given but the bayes optimizer is selected".into());
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs)
    }
}
