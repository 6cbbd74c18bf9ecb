//! Scenario configuration and its flat `key = value` file format.
//!
//! Keys are exactly the field names documented on [`ScenarioConfig`],
//! [`crate::types::KppConfig`], [`PfConfig`] and [`OptimizerConfig`]. Lines
//! starting with `#` (or anything after a `#`) are comments. Unknown keys are
//! rejected with an error naming the key.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::types::KppConfig;

/// Particle filter settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PfConfig {
    /// Number of particles (`n_particles`).
    pub n_particles: usize,
    /// 1-sigma position spread of the initial particle cloud, meters
    /// (`pf_init_pos_sigma`).
    pub init_pos_sigma: f64,
    /// 1-sigma heading spread of the initial particle cloud, degrees
    /// (`pf_init_heading_sigma`).
    pub init_heading_sigma: f64,
}

impl Default for PfConfig {
    fn default() -> Self {
        Self { n_particles: 1000, init_pos_sigma: 2.0, init_heading_sigma: 1.0 }
    }
}

/// Gradient-descent settings for the mixture translation optimizer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerConfig {
    /// Gradient-norm convergence threshold (`grad_tol`).
    pub grad_tol: f64,
    /// Iteration cap (`max_iters`).
    pub max_iters: usize,
    /// Central-difference step for the standard-error Hessian, meters
    /// (`hessian_step_m`).
    pub hessian_step_m: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { grad_tol: 1e-6, max_iters: 500, hessian_step_m: 1e-3 }
    }
}

/// Full description of one simulated scenario.
///
/// The default configuration is the 400 m x 400 m, 100-crater field with a
/// 50-step x 10 m diagonal traverse used by the headline evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    /// World extent in meters (`extent = WIDTHxHEIGHT`).
    pub extent: (f64, f64),
    /// Number of synthetic craters to generate (`n_craters`). Ignored when
    /// `crater_db` points at a database file.
    pub n_craters: usize,
    pub kpp: KppConfig,
    /// Fraction of orbital (map) craters withheld from the matcher; the
    /// corresponding ground detections act as false positives
    /// (`orbital_mask_frac`).
    pub orbital_mask_frac: f64,
    /// Fraction of ground detections withheld per step, i.e. false negatives
    /// (`ground_mask_frac`).
    pub ground_mask_frac: f64,
    /// Commanded distance per step, meters (`step_length`).
    pub step_length: f64,
    /// Number of traverse steps (`n_steps`).
    pub n_steps: usize,
    /// Commanded per-step heading change is uniform in +/- this bound,
    /// degrees (`heading_change_bound`).
    pub heading_change_bound: f64,
    /// 1-sigma odometry heading noise per step, degrees
    /// (`heading_noise_sigma`).
    pub heading_noise_sigma: f64,
    /// Master seed; every random draw in a run derives from it (`seed`).
    pub seed: u64,
    /// Optional crater database CSV to use instead of a generated field
    /// (`crater_db`).
    pub crater_db: Option<PathBuf>,
    pub pf: PfConfig,
    pub optimizer: OptimizerConfig,
    /// Feed each mixture-matcher correction back into its own odometry track
    /// (`gmm_feedback`). When false the matcher corrects raw dead reckoning
    /// independently at every step.
    pub gmm_feedback: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            extent: (400.0, 400.0),
            n_craters: 100,
            kpp: KppConfig::default(),
            orbital_mask_frac: 0.0,
            ground_mask_frac: 0.0,
            step_length: 10.0,
            n_steps: 50,
            heading_change_bound: 5.0,
            heading_noise_sigma: 0.25,
            seed: 1,
            crater_db: None,
            pf: PfConfig::default(),
            optimizer: OptimizerConfig::default(),
            gmm_feedback: true,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.kpp.validate()?;
        if !(self.extent.0 > 0.0 && self.extent.1 > 0.0) {
            return Err(Error::Validation(format!(
                "extent must be positive, got {}x{}",
                self.extent.0, self.extent.1
            )));
        }
        for (name, v) in [
            ("orbital_mask_frac", self.orbital_mask_frac),
            ("ground_mask_frac", self.ground_mask_frac),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Validation(format!("{name} {v} outside [0, 1]")));
            }
        }
        if !(self.step_length > 0.0) {
            return Err(Error::Validation(format!(
                "step_length must be > 0, got {}",
                self.step_length
            )));
        }
        if !(self.heading_change_bound >= 0.0 && self.heading_noise_sigma >= 0.0) {
            return Err(Error::Validation(
                "heading_change_bound and heading_noise_sigma must be >= 0".into(),
            ));
        }
        if self.pf.n_particles == 0 {
            return Err(Error::Validation("n_particles must be >= 1".into()));
        }
        if !(self.pf.init_pos_sigma >= 0.0 && self.pf.init_heading_sigma >= 0.0) {
            return Err(Error::Validation("particle init sigmas must be >= 0".into()));
        }
        if !(self.optimizer.grad_tol > 0.0 && self.optimizer.hessian_step_m > 0.0) {
            return Err(Error::Validation(
                "grad_tol and hessian_step_m must be > 0".into(),
            ));
        }
        Ok(())
    }

    /// Serialize to the flat key-value format; `parse_config_str` inverts this.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "extent = {}x{}", self.extent.0, self.extent.1);
        let _ = writeln!(s, "n_craters = {}", self.n_craters);
        let _ = writeln!(s, "seed = {}", self.seed);
        if let Some(p) = &self.crater_db {
            let _ = writeln!(s, "crater_db = {}", p.display());
        }
        let _ = writeln!(s, "orbital_mask_frac = {}", self.orbital_mask_frac);
        let _ = writeln!(s, "ground_mask_frac = {}", self.ground_mask_frac);
        let _ = writeln!(s, "step_length = {}", self.step_length);
        let _ = writeln!(s, "n_steps = {}", self.n_steps);
        let _ = writeln!(s, "heading_change_bound = {}", self.heading_change_bound);
        let _ = writeln!(s, "heading_noise_sigma = {}", self.heading_noise_sigma);
        let _ = writeln!(s, "detection_prob_pd = {}", self.kpp.detection_prob_pd);
        let _ = writeln!(s, "sensing_range = {}", self.kpp.sensing_range);
        let _ = writeln!(s, "crater_pos_sigma = {}", self.kpp.crater_pos_sigma);
        let _ = writeln!(s, "crater_size_sigma = {}", self.kpp.crater_size_sigma);
        let _ = writeln!(s, "motion_noise_frac = {}", self.kpp.motion_noise_frac);
        let _ = writeln!(s, "min_diameter = {}", self.kpp.min_diameter);
        let _ = writeln!(s, "max_diameter = {}", self.kpp.max_diameter);
        let _ = writeln!(s, "n_particles = {}", self.pf.n_particles);
        let _ = writeln!(s, "pf_init_pos_sigma = {}", self.pf.init_pos_sigma);
        let _ = writeln!(s, "pf_init_heading_sigma = {}", self.pf.init_heading_sigma);
        let _ = writeln!(s, "grad_tol = {}", self.optimizer.grad_tol);
        let _ = writeln!(s, "max_iters = {}", self.optimizer.max_iters);
        let _ = writeln!(s, "hessian_step_m = {}", self.optimizer.hessian_step_m);
        let _ = writeln!(s, "gmm_feedback = {}", self.gmm_feedback);
        s
    }
}

/// Load a scenario configuration file, applying defaults for omitted keys.
pub fn load_config(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text)
}

/// Parse the flat `key = value` format, applying defaults for omitted keys.
pub fn parse_config_str(text: &str) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Config(format!(
            "line {}: expected `key = value`, found `{line}`",
            idx + 1
        )))?;
        let key = key.trim();
        let value = value.trim();
        apply_key(&mut cfg, key, value)
            .map_err(|e| Error::Config(format!("line {}: {e}", idx + 1)))?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn apply_key(cfg: &mut ScenarioConfig, key: &str, value: &str) -> Result<()> {
    fn num(key: &str, value: &str) -> Result<f64> {
        value
            .parse::<f64>()
            .map_err(|e| Error::Config(format!("bad value for `{key}`: {e}")))
    }
    fn int(key: &str, value: &str) -> Result<u64> {
        value
            .parse::<u64>()
            .map_err(|e| Error::Config(format!("bad value for `{key}`: {e}")))
    }

    match key {
        "extent" => {
            let (w, h) = value.split_once(['x', 'X']).ok_or_else(|| {
                Error::Config(format!("bad value for `extent`: expected WIDTHxHEIGHT, found `{value}`"))
            })?;
            cfg.extent = (num("extent", w.trim())?, num("extent", h.trim())?);
        }
        "n_craters" => cfg.n_craters = int(key, value)? as usize,
        "seed" => cfg.seed = int(key, value)?,
        "crater_db" => {
            cfg.crater_db = if value.is_empty() { None } else { Some(PathBuf::from(value)) }
        }
        "orbital_mask_frac" => cfg.orbital_mask_frac = num(key, value)?,
        "ground_mask_frac" => cfg.ground_mask_frac = num(key, value)?,
        "step_length" => cfg.step_length = num(key, value)?,
        "n_steps" => cfg.n_steps = int(key, value)? as usize,
        "heading_change_bound" => cfg.heading_change_bound = num(key, value)?,
        "heading_noise_sigma" => cfg.heading_noise_sigma = num(key, value)?,
        "detection_prob_pd" => cfg.kpp.detection_prob_pd = num(key, value)?,
        "sensing_range" => cfg.kpp.sensing_range = num(key, value)?,
        "crater_pos_sigma" => cfg.kpp.crater_pos_sigma = num(key, value)?,
        "crater_size_sigma" => cfg.kpp.crater_size_sigma = num(key, value)?,
        "motion_noise_frac" => cfg.kpp.motion_noise_frac = num(key, value)?,
        "min_diameter" => cfg.kpp.min_diameter = num(key, value)?,
        "max_diameter" => cfg.kpp.max_diameter = num(key, value)?,
        "n_particles" => cfg.pf.n_particles = int(key, value)? as usize,
        "pf_init_pos_sigma" => cfg.pf.init_pos_sigma = num(key, value)?,
        "pf_init_heading_sigma" => cfg.pf.init_heading_sigma = num(key, value)?,
        "grad_tol" => cfg.optimizer.grad_tol = num(key, value)?,
        "max_iters" => cfg.optimizer.max_iters = int(key, value)? as usize,
        "hessian_step_m" => cfg.optimizer.hessian_step_m = num(key, value)?,
        "gmm_feedback" => {
            cfg.gmm_feedback = match value {
                "true" | "1" => true,
                "false" | "0" => false,
                other => {
                    return Err(Error::Config(format!(
                        "bad value for `gmm_feedback`: expected true/false, found `{other}`"
                    )))
                }
            }
        }
        other => return Err(Error::Config(format!("unknown config key `{other}`"))),
    }
    Ok(())
}
