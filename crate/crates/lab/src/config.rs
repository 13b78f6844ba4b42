//! Experiment configuration, shared by the CLI and config files.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use cusp_core::{HeightFloor, RealSpec};
use serde::{Deserialize, Serialize};

use crate::error::LabError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Expand,
    Rates,
    Stats,
    Levy,
    Loglaw,
    Zonal,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Expand => "expand",
            Command::Rates => "rates",
            Command::Stats => "stats",
            Command::Levy => "levy",
            Command::Loglaw => "loglaw",
            Command::Zonal => "zonal",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Command {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, LabError> {
        Ok(match s {
            "expand" => Command::Expand,
            "rates" => Command::Rates,
            "stats" => Command::Stats,
            "levy" => Command::Levy,
            "loglaw" => Command::Loglaw,
            "zonal" => Command::Zonal,
            _ => return Err(LabError::Config(format!("unknown command {s:?}"))),
        })
    }
}

/// Pass thresholds; relative ones are fractions of the predicted value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub levy_rel: f64,
    pub rate_rel: f64,
    pub gap_rel: f64,
    pub chord_rel: f64,
    pub theta_abs: f64,
    pub ln_theta_abs: f64,
    pub cdf_sup: f64,
    pub hecke_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            levy_rel: 0.01,
            rate_rel: 0.02,
            gap_rel: 0.02,
            chord_rel: 0.02,
            theta_abs: 0.01,
            ln_theta_abs: 0.02,
            cdf_sup: 0.02,
            hecke_rel: 0.02,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    /// Explicit points; when empty the points are `rand:` samples drawn
    /// from `seed`.
    pub x: Vec<RealSpec>,
    pub seed: u64,
    pub samples: usize,
    pub digits: usize,
    pub terms: usize,
    pub k: Vec<f64>,
    /// Height floor for the zonal command, `1e-6` or `exp:-2000`.
    pub hmin: String,
    pub q: u32,
    /// Smallest acceptable number of Γ-convergents per Hecke sample.
    pub min_convergents: usize,
    pub out: PathBuf,
    pub jobs: usize,
    pub burn_in: usize,
    /// Stored regression band for the loglaw command.
    pub band: PathBuf,
    pub tolerances: Tolerances,
}

pub const DEFAULT_K: [f64; 5] = [0.25, 0.5, 1.0, 1.5, 2.0];

pub fn default_band_path() -> PathBuf {
    PathBuf::from(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/data/loglaw_band.json"
    ))
}

impl ExperimentConfig {
    /// Defaults for a command: the desk-scale run of the acceptance suite.
    pub fn defaults(command: Command) -> Self {
        let mut c = ExperimentConfig {
            command,
            x: Vec::new(),
            seed: 1,
            samples: 100,
            digits: 3000,
            terms: 2000,
            k: DEFAULT_K.to_vec(),
            hmin: "1e-6".into(),
            q: 5,
            min_convergents: 200,
            out: PathBuf::from("out"),
            jobs: 1,
            burn_in: 10,
            band: default_band_path(),
            tolerances: Tolerances::default(),
        };
        match command {
            Command::Expand => {
                c.samples = 1;
                c.terms = 20;
                c.digits = 200;
            }
            Command::Zonal => c.set_zonal_q(5),
            _ => {}
        }
        c
    }

    /// Zonal defaults depend on the group: the modular cross-check runs at
    /// height `1e-6` on 20 points, Hecke estimates need a far lower floor.
    pub fn set_zonal_q(&mut self, q: u32) {
        self.q = q;
        if q == 3 {
            self.samples = 20;
            self.hmin = "1e-6".into();
            self.digits = 200;
        } else {
            self.samples = 30;
            self.hmin = "exp:-3000".into();
            self.digits = 1800;
        }
    }

    pub fn from_json(s: &str) -> Result<Self, LabError> {
        let c: ExperimentConfig =
            serde_json::from_str(s).map_err(|e| LabError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    /// Pretty JSON with a trailing newline; `from_json` of the output
    /// reproduces it byte for byte.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config is serializable");
        s.push('\n');
        s
    }

    pub fn floor(&self) -> Result<HeightFloor, LabError> {
        self.hmin
            .parse()
            .map_err(|e: cusp_core::Error| LabError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), LabError> {
        let bad = |m: String| Err(LabError::Config(m));
        if self.samples == 0 || self.digits == 0 || self.terms == 0 || self.jobs == 0 {
            return bad("samples, digits, terms and jobs must be positive".into());
        }
        if !self.x.is_empty() && self.x.len() != self.samples {
            return bad(format!(
                "{} points given but samples = {}",
                self.x.len(),
                self.samples
            ));
        }
        if self.k.is_empty() {
            return bad("k grid is empty".into());
        }
        if let Some(k) = self.k.iter().find(|k| !(**k > 0.0 && **k <= 2.0)) {
            return bad(format!("k = {k} is outside (0, 2]"));
        }
        if self.q < 3 {
            return bad(format!("q must be at least 3, got {}", self.q));
        }
        if self.q > cusp_core::numfield::MAX_HECKE_Q {
            return bad(format!(
                "q must be at most {}",
                cusp_core::numfield::MAX_HECKE_Q
            ));
        }
        if self.min_convergents == 0 {
            return bad("min_convergents must be positive".into());
        }
        let t = &self.tolerances;
        let tols = [
            t.levy_rel,
            t.rate_rel,
            t.gap_rel,
            t.chord_rel,
            t.theta_abs,
            t.ln_theta_abs,
            t.cdf_sup,
            t.hecke_rel,
        ];
        if tols.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return bad("tolerances must be positive".into());
        }
        self.floor()?;
        Ok(())
    }

    /// The points studied, in sample order.
    pub fn points(&self) -> Vec<RealSpec> {
        if !self.x.is_empty() {
            return self.x.clone();
        }
        (0..self.samples as u64)
            .map(|i| RealSpec::random_sample(self.seed, i, self.digits))
            .collect()
    }
}
