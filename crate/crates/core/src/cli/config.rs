//! Scenario files.
//!
//! One scenario per TOML file, with dotted keys such as `params.g = 0.1`:
//!
//! ```toml
//! name = "fig2"
//! tasks = ["fig2"]
//! params.lambda_a = 0.01
//! sweep.param = "g"
//! sweep.values = [0.02, 0.05, 0.1, 0.2, 0.5]
//! ```

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::SystemParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    SteadyMoments,
    Qfi,
    Uncertainty,
    Meanfield,
    Gap,
    Fig2,
    Sensor,
}

impl Task {
    pub const ALL: [Task; 7] =
        [Task::SteadyMoments, Task::Qfi, Task::Uncertainty, Task::Meanfield, Task::Gap, Task::Fig2, Task::Sensor];

    pub fn tag(self) -> &'static str {
        match self {
            Task::SteadyMoments => "steady_moments",
            Task::Qfi => "qfi",
            Task::Uncertainty => "uncertainty",
            Task::Meanfield => "meanfield",
            Task::Gap => "gap",
            Task::Fig2 => "fig2",
            Task::Sensor => "sensor",
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Task::SteadyMoments => "reduced-model steady moments against the hypergeometric series",
            Task::Qfi => "Fisher information of the steady-state family (Gaussian and spectral)",
            Task::Uncertainty => "closed-form uncertainties for every applicable regime",
            Task::Meanfield => "mean-field branches, stability and normal-phase fluctuations",
            Task::Gap => "Liouvillian spectral gap of the reduced model",
            Task::Fig2 => "three-level photon number against the exact reduced model",
            Task::Sensor => "driving-strength sensor uncertainty and its optimum",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub param: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Truncation {
    pub signal: usize,
    pub pump: usize,
    /// Raise the signal dimension until the top level holds less than
    /// `tolerances.top_population`.
    pub auto_raise: bool,
    pub max_signal: usize,
    /// Also solve the two-mode model in `steady_moments`.
    pub full_model: bool,
}

impl Default for Truncation {
    fn default() -> Self {
        Self { signal: 40, pump: 15, auto_raise: true, max_signal: 200, full_model: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceConfig {
    /// Largest accepted `max |L[ρ]|` of a steady state.
    pub residual: f64,
    pub rtol: f64,
    pub atol: f64,
    pub top_population: f64,
    /// Moment series against the steady state, absolute.
    pub moments: f64,
    /// Simulated against closed-form Fisher information, relative.
    pub qfi: f64,
    /// Algebraic identities, relative.
    pub identity: f64,
    /// Lyapunov oracle against closed-form moments, relative.
    pub lyapunov: f64,
    /// Three-level against exact photon number at the smallest `g`.
    pub fig2: f64,
    pub fd_step: f64,
    pub eigen_floor: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            residual: 1e-9,
            rtol: 1e-10,
            atol: 1e-13,
            top_population: 1e-8,
            moments: 1e-6,
            qfi: 1e-2,
            identity: 1e-12,
            lyapunov: 1e-8,
            fig2: 0.02,
            fd_step: 1e-4,
            eigen_floor: 1e-30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub params: SystemParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    pub tasks: Vec<Task>,
    #[serde(default)]
    pub truncation: Truncation,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            name: "default".into(),
            params: SystemParams::default(),
            sweep: Some(Sweep { param: "g".into(), values: vec![0.02, 0.05, 0.1, 0.2, 0.5] }),
            tasks: vec![Task::Fig2],
            truncation: Truncation::default(),
            tolerances: ToleranceConfig::default(),
        }
    }
}

const TOP_KEYS: &[&str] = &["name", "params", "sweep", "tasks", "truncation", "tolerances"];
const SWEEP_KEYS: &[&str] = &["param", "values"];
const TRUNCATION_KEYS: &[&str] = &["signal", "pump", "auto_raise", "max_signal", "full_model"];
const TOLERANCE_KEYS: &[&str] = &[
    "residual",
    "rtol",
    "atol",
    "top_population",
    "moments",
    "qfi",
    "identity",
    "lyapunov",
    "fig2",
    "fd_step",
    "eigen_floor",
];

/// Drops keys outside `known`, returning their dotted names.
fn prune(table: &mut toml::Table, prefix: &str, known: &[&str]) -> Vec<String> {
    let unknown: Vec<String> = table.keys().filter(|k| !known.contains(&k.as_str())).cloned().collect();
    for k in &unknown {
        table.remove(k);
    }
    unknown.into_iter().map(|k| if prefix.is_empty() { k } else { format!("{prefix}.{k}") }).collect()
}

impl Scenario {
    /// Parses a scenario. In strict mode any unknown key is an error;
    /// otherwise unknown keys are dropped and returned.
    pub fn parse(text: &str, strict: bool) -> Result<(Self, Vec<String>)> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        let mut ignored = Vec::new();
        if !strict {
            ignored.extend(prune(&mut table, "", TOP_KEYS));
            let nested: [(&str, &[&str]); 4] = [
                ("params", &SystemParams::FIELDS),
                ("sweep", SWEEP_KEYS),
                ("truncation", TRUNCATION_KEYS),
                ("tolerances", TOLERANCE_KEYS),
            ];
            for (key, known) in nested {
                if let Some(toml::Value::Table(t)) = table.get_mut(key) {
                    ignored.extend(prune(t, key, known));
                }
            }
        }
        let scenario: Scenario =
            toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        scenario.validate()?;
        Ok((scenario, ignored))
    }

    pub fn load(path: &Path, strict: bool) -> Result<(Self, Vec<String>)> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text, strict)
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(Error::Config(format!("name {:?} must be non-empty [A-Za-z0-9_-]", self.name)));
        }
        if self.tasks.is_empty() {
            return Err(Error::Config("task list is empty".into()));
        }
        if let Some(s) = &self.sweep {
            if !SystemParams::FIELDS.contains(&s.param.as_str()) {
                return Err(Error::Config(format!("unknown sweep parameter {:?}", s.param)));
            }
            if s.values.is_empty() {
                return Err(Error::Config("sweep grid is empty".into()));
            }
            if let Some(v) = s.values.iter().find(|v| !v.is_finite()) {
                return Err(Error::Config(format!("sweep value {v} is not finite")));
            }
        }
        let t = &self.truncation;
        if t.signal < 3 || t.pump < 1 || t.max_signal < t.signal {
            return Err(Error::Config("truncation needs signal >= 3, pump >= 1, max_signal >= signal".into()));
        }
        let tol = &self.tolerances;
        let all = [
            tol.residual,
            tol.rtol,
            tol.atol,
            tol.top_population,
            tol.moments,
            tol.qfi,
            tol.identity,
            tol.lyapunov,
            tol.fig2,
            tol.fd_step,
        ];
        if all.iter().any(|v| !(v.is_finite() && *v > 0.0)) || !(tol.eigen_floor >= 0.0) {
            return Err(Error::Config("tolerances must be positive and finite".into()));
        }
        for p in self.points()? {
            p.1.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(())
    }

    /// `(grid value, parameters)` for every sweep point, in grid order; a
    /// scenario without a sweep is a single point at `g`.
    pub fn points(&self) -> Result<Vec<(f64, SystemParams)>> {
        match &self.sweep {
            None => Ok(vec![(self.params.g, self.params)]),
            Some(s) => {
                let mut pts = s
                    .values
                    .iter()
                    .map(|&v| Ok((v, self.params.with(&s.param, v)?)))
                    .collect::<Result<Vec<_>>>()?;
                pts.sort_by(|a, b| a.0.total_cmp(&b.0));
                Ok(pts)
            }
        }
    }

    pub fn sweep_param(&self) -> &str {
        self.sweep.as_ref().map_or("g", |s| s.param.as_str())
    }
}
