//! Experiment configuration: a JSON document validated field by field.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use trunc_ivp_core::instances::{
    make_decoupled_linear, make_finite_support, make_lp_coupled, make_lp_sin, make_zero,
    InstanceLabel, ProblemInstance,
};
use trunc_ivp_core::integrator::TailMode;

use crate::error::{HarnessError, Result};

/// Which subcommand a configuration is checked for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Converge,
    Truncate,
    WorkPrecision,
    LowerBound,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    pub label: String,
    #[serde(default = "default_p")]
    pub p: f64,
    /// Rate of the `linear` instance.
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    /// Support size of the `finite_support` instance.
    #[serde(default = "default_n0")]
    pub n0: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeshConfig {
    #[default]
    Uniform,
    Graded {
        sigma: f64,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
pub enum TailConfig {
    #[default]
    Certified,
    Projected,
}

impl From<TailConfig> for TailMode {
    fn from(t: TailConfig) -> Self {
        match t {
            TailConfig::Certified => TailMode::Certified,
            TailConfig::Projected => TailMode::Projected,
        }
    }
}

/// Error coefficients `(A, B)` of the bound `A·N^{-(1−1/p)} + B/n` used by
/// the work-precision planner.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Default)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConstantsConfig {
    /// From the generic formulas with the ball radius of the instance.
    #[default]
    Radius,
    /// Sharper constants valid for `lp_sin` with one stage per interval.
    LpSinCertified,
    Explicit {
        a: f64,
        b: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LowerBoundConfig {
    /// Coefficient `A` of the constant field `A·e_1` in the third case.
    #[serde(default = "default_case3_a")]
    pub case3_a: f64,
}

impl Default for LowerBoundConfig {
    fn default() -> Self {
        Self {
            case3_a: default_case3_a(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instance: InstanceConfig,
    #[serde(default = "default_r")]
    pub r: usize,
    #[serde(default)]
    pub mesh: MeshConfig,
    /// Step counts.
    #[serde(default)]
    pub n: Vec<usize>,
    /// Uniform truncation dimensions.
    #[serde(default)]
    pub dims: Vec<usize>,
    /// Explicit `[N_{-1}, N_0, …, N_{n−1}]` for `solve`; overrides `dims`.
    #[serde(default)]
    pub schedule: Option<Vec<usize>>,
    /// Error targets.
    #[serde(default)]
    pub epsilon: Vec<f64>,
    /// Cost exponent: `c(N) = N^β`.
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_samples")]
    pub samples_per_interval: usize,
    #[serde(default)]
    pub tail: TailConfig,
    #[serde(default)]
    pub output: Option<String>,
    /// Only used by randomized property sampling; solver runs are seed-free.
    #[serde(default)]
    pub seed: u64,
    /// Number of leading components written by `solve`.
    #[serde(default = "default_components")]
    pub components: usize,
    #[serde(default)]
    pub constants: ConstantsConfig,
    /// Whether `workprecision` runs the closed-form plans.
    #[serde(default = "default_true")]
    pub realize: bool,
    #[serde(default)]
    pub lowerbound: LowerBoundConfig,
}

fn default_p() -> f64 {
    2.0
}
fn default_lambda() -> f64 {
    1.0
}
fn default_n0() -> usize {
    8
}
fn default_r() -> usize {
    1
}
fn default_beta() -> f64 {
    1.0
}
fn default_samples() -> usize {
    8
}
fn default_components() -> usize {
    8
}
fn default_true() -> bool {
    true
}
fn default_case3_a() -> f64 {
    0.1
}

const MAX_R: usize = 8;

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| HarnessError::config("config", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn label(&self) -> Result<InstanceLabel> {
        InstanceLabel::from_str(&self.instance.label).map_err(|_| {
            HarnessError::config(
                "instance.label",
                format!("unknown instance `{}`", self.instance.label),
            )
        })
    }

    /// Checks every field, then the fields `command` needs.
    pub fn validate(&self, command: Command) -> Result<()> {
        let label = self.label()?;
        let p = self.instance.p;
        if !(p.is_finite() && p > 1.0) {
            return Err(HarnessError::config("instance.p", "must be finite and > 1"));
        }
        if !self.instance.lambda.is_finite() {
            return Err(HarnessError::config("instance.lambda", "must be finite"));
        }
        if self.instance.n0 == 0 {
            return Err(HarnessError::config("instance.n0", "must be at least 1"));
        }
        if self.r > MAX_R {
            return Err(HarnessError::config(
                "r",
                format!("must be at most {MAX_R}"),
            ));
        }
        if let MeshConfig::Graded { sigma } = self.mesh {
            if !(1.0..=2.0).contains(&sigma) {
                return Err(HarnessError::config("mesh.sigma", "must lie in [1, 2]"));
            }
        }
        for (i, &n) in self.n.iter().enumerate() {
            if n == 0 {
                return Err(HarnessError::config(
                    format!("n[{i}]"),
                    "must be at least 1",
                ));
            }
        }
        for (i, &d) in self.dims.iter().enumerate() {
            if d == 0 {
                return Err(HarnessError::config(
                    format!("dims[{i}]"),
                    "must be at least 1",
                ));
            }
        }
        for (i, &e) in self.epsilon.iter().enumerate() {
            if !(e.is_finite() && e > 0.0) {
                return Err(HarnessError::config(
                    format!("epsilon[{i}]"),
                    "must be positive and finite",
                ));
            }
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(HarnessError::config("beta", "must be finite and >= 0"));
        }
        if self.samples_per_interval < 8 {
            return Err(HarnessError::config(
                "samples_per_interval",
                "must be at least 8",
            ));
        }
        if self.components == 0 {
            return Err(HarnessError::config("components", "must be at least 1"));
        }
        if let ConstantsConfig::Explicit { a, b } = self.constants {
            if !(a.is_finite() && a > 0.0) {
                return Err(HarnessError::config(
                    "constants.a",
                    "must be positive and finite",
                ));
            }
            if !(b.is_finite() && b > 0.0) {
                return Err(HarnessError::config(
                    "constants.b",
                    "must be positive and finite",
                ));
            }
        }
        let a3 = self.lowerbound.case3_a;
        if !(a3.is_finite() && a3 > 0.0) {
            return Err(HarnessError::config(
                "lowerbound.case3_a",
                "must be positive and finite",
            ));
        }
        if let Some(s) = &self.schedule {
            if let Some(i) = s.iter().position(|&d| d == 0) {
                return Err(HarnessError::config(
                    format!("schedule[{i}]"),
                    "must be at least 1",
                ));
            }
        }

        let adversarial = matches!(
            label,
            InstanceLabel::Case1 | InstanceLabel::Case2 | InstanceLabel::Case3
        );
        let needs = |ok: bool, field: &str, reason: &str| -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(HarnessError::config(field, reason))
            }
        };
        match command {
            Command::LowerBound => {
                needs(!self.n.is_empty(), "n", "must list at least one step count")?;
                needs(
                    !self.dims.is_empty(),
                    "dims",
                    "must list at least one dimension",
                )?;
            }
            _ if adversarial => {
                return Err(HarnessError::config(
                    "instance.label",
                    "adversarial pairs are built by the lowerbound command",
                ));
            }
            Command::Solve => {
                needs(!self.n.is_empty(), "n", "must list the step count")?;
                match &self.schedule {
                    Some(s) => needs(
                        s.len() == self.n[0] + 1,
                        "schedule",
                        "must hold n[0] + 1 dimensions",
                    )?,
                    None => needs(
                        !self.dims.is_empty(),
                        "dims",
                        "must list the truncation dimension",
                    )?,
                }
            }
            Command::Converge => {
                needs(
                    self.n.len() >= 3,
                    "n",
                    "need at least three step counts to fit an order",
                )?;
                needs(
                    !self.dims.is_empty(),
                    "dims",
                    "must list the truncation dimension",
                )?;
            }
            Command::Truncate => {
                needs(
                    self.dims.len() >= 3,
                    "dims",
                    "need at least three dimensions to fit a rate",
                )?;
                needs(!self.n.is_empty(), "n", "must list the step count")?;
            }
            Command::WorkPrecision => {
                needs(
                    !self.epsilon.is_empty(),
                    "epsilon",
                    "must list at least one target",
                )?;
                if self.constants == ConstantsConfig::LpSinCertified {
                    needs(
                        label == InstanceLabel::LpSin && self.r <= 1,
                        "constants",
                        "lp_sin_certified applies to lp_sin with r <= 1 only",
                    )?;
                }
            }
        }
        if matches!(command, Command::Converge | Command::Truncate) {
            let inst = self.instance()?;
            needs(
                inst.has_exact(),
                "instance.label",
                "instance has no closed-form solution",
            )?;
        }
        Ok(())
    }

    /// Builds the (non-adversarial) instance.
    pub fn instance(&self) -> Result<ProblemInstance> {
        let p = self.instance.p;
        let inst = match self.label()? {
            InstanceLabel::LpSin => make_lp_sin(p),
            InstanceLabel::LpCoupled => make_lp_coupled(p),
            InstanceLabel::Linear => make_decoupled_linear(self.instance.lambda, p),
            InstanceLabel::Zero => make_zero(p),
            InstanceLabel::FiniteSupport => make_finite_support(self.instance.n0, p),
            _ => {
                return Err(HarnessError::config(
                    "instance.label",
                    "adversarial pairs are built by the lowerbound command",
                ))
            }
        };
        inst.map_err(|e| HarnessError::config("instance", e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ExperimentConfig {
        ExperimentConfig::from_json(
            r#"{"instance": {"label": "lp_sin"}, "n": [16, 32, 64], "dims": [64]}"#,
        )
        .unwrap()
    }

    fn field_of(err: HarnessError) -> String {
        match err {
            HarnessError::Config { field, .. } => field,
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn defaults() {
        let c = base();
        assert_eq!(c.r, 1);
        assert_eq!(c.samples_per_interval, 8);
        assert_eq!(c.mesh, MeshConfig::Uniform);
        c.validate(Command::Converge).unwrap();
    }

    #[test]
    fn named_rejections() {
        let mut c = base();
        c.instance.p = 1.0;
        assert_eq!(
            field_of(c.validate(Command::Solve).unwrap_err()),
            "instance.p"
        );
        let mut c = base();
        c.n[1] = 0;
        assert_eq!(field_of(c.validate(Command::Solve).unwrap_err()), "n[1]");
        let mut c = base();
        c.samples_per_interval = 4;
        assert_eq!(
            field_of(c.validate(Command::Solve).unwrap_err()),
            "samples_per_interval"
        );
        let mut c = base();
        c.mesh = MeshConfig::Graded { sigma: 3.0 };
        assert_eq!(
            field_of(c.validate(Command::Solve).unwrap_err()),
            "mesh.sigma"
        );
        let mut c = base();
        c.instance.label = "nope".into();
        assert_eq!(
            field_of(c.validate(Command::Solve).unwrap_err()),
            "instance.label"
        );
        let c = base();
        assert_eq!(
            field_of(c.validate(Command::WorkPrecision).unwrap_err()),
            "epsilon"
        );
        let mut c = base();
        c.instance.label = "lp_coupled".into();
        assert_eq!(
            field_of(c.validate(Command::Converge).unwrap_err()),
            "instance.label"
        );
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = ExperimentConfig::from_json(r#"{"instance": {"label": "lp_sin"}, "steps": [1]}"#)
            .unwrap_err();
        assert!(err.to_string().contains("steps"));
    }
}
