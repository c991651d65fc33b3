//! Run configuration: a single TOML file with flat key paths, validated on
//! load. The key-to-symbol mapping is documented in `docs/formats.md`.
//!
//! Parameter admissibility is cross-checked before a run starts: hard
//! constraint failures reject the config, soft ones (and an out-of-range
//! gamma) are returned as warnings.

// Negated comparisons (`!(x > y)`) reject NaN config values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::admissibility::{check_theorem11, gamma_exponent};
use crate::error::{FbsqError, Result};
use crate::init::InitSpec;
use crate::physics::{MuProfile, PhysParams};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub grid: GridConfig,
    pub phys: PhysConfig,
    pub init: InitConfig,
    pub time: TimeConfig,
    pub diagnostics: DiagConfig,
    pub output: OutputConfig,
}

fn default_schema_version() -> u32 {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    /// Box length as a multiple of pi (L = l_pi * pi). Default 32.
    #[serde(default = "default_l_pi")]
    pub l_pi: f64,
}

fn default_l_pi() -> f64 {
    32.0
}

impl GridConfig {
    pub fn box_length(&self) -> f64 {
        self.l_pi * std::f64::consts::PI
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PhysConfig {
    pub alpha: f64,
    pub epsilon: f64,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default = "default_mu_profile")]
    pub mu_profile: MuProfile,
}

fn default_kappa() -> f64 {
    1.0
}

fn default_mu_profile() -> MuProfile {
    MuProfile::ExpSaturating
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InitConfig {
    pub seed: u64,
    pub amp_theta: f64,
    pub amp_u: f64,
    #[serde(default = "default_envelope_exponent")]
    pub envelope_exponent: f64,
    #[serde(default = "default_xi_c")]
    pub xi_c: f64,
    #[serde(default = "default_true")]
    pub nonnegative_shift: bool,
}

fn default_envelope_exponent() -> f64 {
    1.0
}

fn default_xi_c() -> f64 {
    4.0
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Steps between diagnostic samples.
    #[serde(default = "default_sample_every")]
    pub sample_every: usize,
    #[serde(default = "default_cfl_factor")]
    pub cfl_factor: f64,
    #[serde(default = "default_dt_max")]
    pub dt_max: f64,
    /// Test switch: disable the advection terms (linear problems).
    #[serde(default = "default_true")]
    pub advection: bool,
}

fn default_sample_every() -> usize {
    10
}

fn default_cfl_factor() -> f64 {
    0.4
}

fn default_dt_max() -> f64 {
    0.1
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DiagConfig {
    /// L^p monitor exponents; `inf` is legal TOML.
    #[serde(default = "default_p_list")]
    pub p_list: Vec<f64>,
    /// Schonbek splitting betas; each must exceed s0/alpha.
    #[serde(default = "default_beta_list")]
    pub beta_list: Vec<f64>,
    pub s0: f64,
    pub q: f64,
    /// Besov integrability index p of B^{alpha/2}_{p,inf} and the
    /// difference-system gamma.
    pub p: f64,
    /// Decay-fit window [t_a, t_b]; t_b is clamped to the resolvability gate.
    #[serde(default = "default_fit_window")]
    pub fit_window: (f64, f64),
    /// Resolvability gate: g(t) = (gate_beta <t>)^{-1/alpha} >= gate_factor * 2pi/L.
    #[serde(default = "default_gate_beta")]
    pub gate_beta: f64,
    #[serde(default = "default_gate_factor")]
    pub gate_factor: f64,
    /// Stand-in for the non-explicit constant in the soft p upper bound.
    #[serde(default = "default_c_mu")]
    pub c_mu: f64,
}

fn default_p_list() -> Vec<f64> {
    vec![2.0, 4.0, f64::INFINITY]
}

fn default_beta_list() -> Vec<f64> {
    vec![2.0]
}

fn default_fit_window() -> (f64, f64) {
    (1.0, 0.0) // t_b = 0 means "up to the gate limit"
}

fn default_gate_beta() -> f64 {
    2.0
}

fn default_gate_factor() -> f64 {
    4.0
}

fn default_c_mu() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
    #[serde(default = "default_true")]
    pub write_csv: bool,
    #[serde(default = "default_true")]
    pub write_summary: bool,
    #[serde(default = "default_true")]
    pub write_checkpoint: bool,
}

impl RunConfig {
    pub fn phys_params(&self) -> PhysParams {
        PhysParams {
            alpha: self.phys.alpha,
            epsilon: self.phys.epsilon,
            kappa: self.phys.kappa,
            mu_profile: self.phys.mu_profile,
        }
    }

    pub fn init_spec(&self) -> InitSpec {
        InitSpec {
            seed: self.init.seed,
            amp_theta: self.init.amp_theta,
            amp_u: self.init.amp_u,
            envelope_exponent: self.init.envelope_exponent,
            xi_c: self.init.xi_c,
            nonnegative_shift: self.init.nonnegative_shift,
        }
    }

    pub fn load(path: &Path) -> Result<(RunConfig, Vec<String>)> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Parse and validate; returns warnings for the soft checks.
    pub fn parse(text: &str) -> Result<(RunConfig, Vec<String>)> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| FbsqError::ConfigInvalid(e.to_string()))?;
        let warnings = cfg.validate()?;
        Ok((cfg, warnings))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        let fail = |msg: String| Err(FbsqError::ConfigInvalid(msg));

        if self.schema_version != 1 {
            return fail(format!("unsupported schema_version {}", self.schema_version));
        }
        if !(self.grid.n >= 16 && self.grid.n.is_power_of_two()) {
            return fail(format!("grid.n must be a power of two >= 16, got {}", self.grid.n));
        }
        if !(self.grid.l_pi > 0.0 && self.grid.l_pi.is_finite()) {
            return fail(format!("grid.l_pi must be positive, got {}", self.grid.l_pi));
        }
        self.phys_params().validate().map_err(FbsqError::ConfigInvalid)?;
        if self.phys.kappa != 1.0 {
            warnings.push(format!(
                "phys.kappa = {} departs from the analysis (kappa = 1); exploration only",
                self.phys.kappa
            ));
        }
        if !(self.time.dt > 0.0 && self.time.t_end >= 0.0) {
            return fail("time.dt must be positive and time.t_end nonnegative".into());
        }
        if self.time.sample_every == 0 {
            return fail("time.sample_every must be >= 1".into());
        }
        if self.time.cfl_factor <= 0.0 {
            return fail("time.cfl_factor must be positive".into());
        }
        if self.time.cfl_factor > 1.0 {
            warnings.push(format!(
                "time.cfl_factor = {} > 1 disables the stability margin",
                self.time.cfl_factor
            ));
        }
        if self.time.dt > self.time.dt_max {
            return fail(format!(
                "time.dt = {} exceeds time.dt_max = {}",
                self.time.dt, self.time.dt_max
            ));
        }
        for &p in &self.diagnostics.p_list {
            if !(p >= 1.0) {
                return fail(format!("diagnostics.p_list entries must be >= 1, got {p}"));
            }
        }
        // Admissibility cross-check: hard constraints enforced, soft warned.
        let tuple = check_theorem11(
            self.phys.alpha,
            self.diagnostics.p,
            self.diagnostics.q,
            self.diagnostics.s0,
            self.phys.epsilon,
            self.diagnostics.c_mu,
        );
        for v in &tuple.verdicts {
            if !v.satisfied {
                if v.soft {
                    warnings.push(format!(
                        "soft admissibility bound violated: {} (slack {:.3e})",
                        v.name, v.slack
                    ));
                } else {
                    return fail(format!(
                        "admissibility constraint failed: {} (slack {:.3e})",
                        v.name, v.slack
                    ));
                }
            }
        }
        // Schonbek precondition beta > s0/alpha for every beta in the list.
        let beta_min = self.diagnostics.s0 / self.phys.alpha;
        for &beta in &self.diagnostics.beta_list {
            if !(beta > beta_min) {
                return fail(format!(
                    "diagnostics.beta_list entry {beta} violates beta > s0/alpha = {beta_min}"
                ));
            }
        }
        if !(self.diagnostics.gate_beta > 0.0 && self.diagnostics.gate_factor > 0.0) {
            return fail("gate_beta and gate_factor must be positive".into());
        }
        if self.diagnostics.fit_window.0 < 1.0 {
            return fail(format!(
                "diagnostics.fit_window must start at t >= 1, got {}",
                self.diagnostics.fit_window.0
            ));
        }
        // gamma range is advisory (it exceeds 2 on the admissible region).
        match gamma_exponent(self.phys.alpha, self.diagnostics.p) {
            Ok(g) if !g.in_unit_range => warnings.push(format!(
                "gamma = {:.4} outside (1, 2]; stability experiment proceeds with it as written",
                g.value
            )),
            Ok(_) => {}
            Err(e) => return fail(format!("gamma precondition: {e}")),
        }
        Ok(warnings)
    }
}
