//! TOML run configuration: one file describes one experiment.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use specdet::{DetOptions, OracleOptions, PerturbationSpec, PotentialSpec, Tolerances, WronskianOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub beta: f64,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default = "zero_q")]
    pub q: PerturbationSpec,
    /// Integration support `[a, b]`; must contain the support of `q`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<[f64; 2]>,
}

fn zero_q() -> PerturbationSpec {
    PerturbationSpec::Zero
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_rtol")]
    pub rtol: f64,
    #[serde(default = "default_atol")]
    pub atol: f64,
    #[serde(default)]
    pub matching_point: f64,
    /// `det(T_0)` for non-integer `beta`, if known from elsewhere.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub det0: Option<f64>,
}

fn default_rtol() -> f64 {
    1e-10
}

fn default_atol() -> f64 {
    1e-12
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { rtol: default_rtol(), atol: default_atol(), matching_point: 0.0, det0: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    #[serde(default = "default_n")]
    pub n: usize,
    /// Truncation half-width; the heuristic is used when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_n() -> usize {
    100
}

fn default_tol() -> f64 {
    1e-8
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { n: default_n(), half_width: None, tol: default_tol() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Alpha,
    /// Right end of the support of `q`.
    B,
}

impl SweepParameter {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParameter::Alpha => "alpha",
            SweepParameter::B => "b",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl SweepConfig {
    /// `steps` equally spaced values, both ends included exactly.
    pub fn values(&self) -> Vec<f64> {
        let n = self.steps;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.to
                } else {
                    self.from + (self.to - self.from) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub potential: PotentialConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).context("malformed config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.solver;
        if !(s.rtol > 0.0) || !(s.atol >= 0.0) {
            bail!("solver tolerances must satisfy rtol > 0, atol >= 0");
        }
        if !s.matching_point.is_finite() {
            bail!("matching point must be finite");
        }
        let o = &self.oracle;
        if o.n == 0 || !(o.tol > 0.0) {
            bail!("oracle needs n >= 1 and tol > 0");
        }
        if let Some(l) = o.half_width {
            if !(l > 0.0) || !l.is_finite() {
                bail!("oracle half_width must be positive");
            }
        }
        if let Some(sw) = &self.sweep {
            if sw.steps < 2 {
                bail!("sweep needs steps >= 2");
            }
            if !sw.from.is_finite() || !sw.to.is_finite() {
                bail!("sweep range must be finite");
            }
        }
        self.potential_spec()?;
        Ok(())
    }

    pub fn potential_spec(&self) -> Result<PotentialSpec> {
        let p = &self.potential;
        let spec = PotentialSpec::new(p.beta, p.alpha, p.q.clone())?;
        Ok(match p.support {
            Some([a, b]) => spec.with_support(a, b)?,
            None => spec,
        })
    }

    /// The potential at one sweep value.
    pub fn spec_at(&self, parameter: SweepParameter, value: f64) -> Result<PotentialSpec> {
        let p = &self.potential;
        let spec = match parameter {
            SweepParameter::Alpha => PotentialSpec::new(p.beta, value, p.q.clone())?,
            SweepParameter::B => PotentialSpec::new(p.beta, p.alpha, p.q.with_right_end(value)?)?,
        };
        Ok(match p.support {
            Some([a, b]) => spec.with_support(a, b)?,
            None => spec,
        })
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances::new(self.solver.rtol, self.solver.atol)
    }

    pub fn det_options(&self) -> DetOptions {
        DetOptions {
            wronskian: WronskianOptions { tol: self.tolerances(), matching_point: self.solver.matching_point },
            det0: self.solver.det0,
        }
    }

    pub fn oracle_options(&self) -> OracleOptions {
        OracleOptions { n: self.oracle.n, half_width: self.oracle.half_width, tol: self.oracle.tol, ode: self.tolerances() }
    }
}
