//! Flat TOML configuration. Every key is optional; missing keys take the
//! reference defaults and unknown keys are rejected.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::link_budget::{LinkModel, LinkTarget, NoiseModel};
use crate::pointing::PointingCase;
use crate::relay_af::AmplifierModel;
use crate::routing::{Objective, Scheme};
use crate::water::{OpticsConfig, WaterProfile, WaterType};

/// How true positions are drawn around their estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UncertaintyDist {
    /// Uniform over the uncertainty disk.
    UniformDisk,
    /// Uniform direction at exactly the uncertainty radius.
    FixedRadius,
}

impl fmt::Display for UncertaintyDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UncertaintyDist::UniformDisk => "uniform_disk",
            UncertaintyDist::FixedRadius => "fixed_radius",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub tx_power_w: f64,
    pub max_tx_power_w: f64,
    pub eta_t: f64,
    pub eta_r: f64,
    pub eta_d: f64,
    pub aperture_m2: f64,
    pub fov_rad: f64,
    pub refractive_index: f64,
    pub pulse_s: f64,
    pub wavelength_m: f64,
    pub water_type: WaterType,
    pub dark_count_rate: f64,
    pub bg_count_rate: f64,
    pub noise_power_dbm: f64,
    pub theta_min_rad: f64,
    pub theta_max_rad: f64,
    pub frame_radius_m: f64,
    pub uncertainty_m: f64,
    pub ber_target: f64,
    pub rate_target_bps: f64,
    pub n_sinks: usize,
    pub n_nodes: usize,
    pub area_m: f64,
    pub trials: usize,
    pub seed: u64,
    pub case: PointingCase,
    pub scheme: Scheme,
    pub objective: Objective,
    pub ksp_k: usize,
    pub hop_budget_factor: usize,
    pub ber_slot_normalized: bool,
    pub lipar_literal_angle_filter: bool,
    pub uncertainty_dist: UncertaintyDist,
    pub equal_hop_distance_m: f64,
    pub equal_hop_jitter_rad: f64,
    pub amp_nsp: f64,
    /// Defaults to the inverse pulse width.
    pub amp_bandwidth_hz: Option<f64>,
}

impl Default for Config {
    fn default() -> Self {
        let optics = OpticsConfig::default();
        Self {
            tx_power_w: 0.01,
            max_tx_power_w: 1.0,
            eta_t: optics.eta_t,
            eta_r: optics.eta_r,
            eta_d: optics.eta_d,
            aperture_m2: optics.aperture_m2,
            fov_rad: optics.fov_rad,
            refractive_index: optics.refractive_index,
            pulse_s: 1e-9,
            wavelength_m: 532e-9,
            water_type: WaterType::Ocean,
            dark_count_rate: 1e6,
            bg_count_rate: 1e6,
            noise_power_dbm: -84.0,
            theta_min_rad: optics.theta_min,
            theta_max_rad: optics.theta_max,
            frame_radius_m: 0.25,
            uncertainty_m: 0.75,
            ber_target: 1e-5,
            rate_target_bps: 1e9,
            n_sinks: 3,
            n_nodes: 60,
            area_m: 100.0,
            trials: 2000,
            seed: 1,
            case: PointingCase::PerfectPat,
            scheme: Scheme::Df,
            objective: Objective::Ber,
            ksp_k: 10,
            hop_budget_factor: 4,
            ber_slot_normalized: false,
            lipar_literal_angle_filter: false,
            uncertainty_dist: UncertaintyDist::UniformDisk,
            equal_hop_distance_m: 200.0,
            equal_hop_jitter_rad: 0.2,
            amp_nsp: 2.0,
            amp_bandwidth_hz: None,
        }
    }
}

fn parse_err(e: toml::de::Error) -> Error {
    let msg = e.message().to_string();
    let key = msg
        .split('`')
        .nth(1)
        .map(str::to_string)
        .unwrap_or_else(|| "<file>".to_string());
    Error::config(key, msg)
}

impl FromStr for Config {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(parse_err)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::config("--config", format!("{}: {e}", path.display())))?;
        text.parse()
    }

    /// Override one key. The value is read as a TOML literal and falls back
    /// to a plain string.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        let mut table = toml::Table::try_from(&*self).map_err(|e| Error::config(key, e.to_string()))?;
        let parsed: toml::Value = format!("v = {value}")
            .parse::<toml::Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(value.trim().to_string()));
        if !table.contains_key(key) && !(key == "amp_bandwidth_hz") {
            return Err(Error::config(key, "unknown key"));
        }
        table.insert(key.to_string(), parsed);
        let next: Config = table
            .try_into()
            .map_err(|e: toml::de::Error| Error::config(key, e.message().to_string()))?;
        next.validate()?;
        *self = next;
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.optics().validate()?;
        self.target().validate()?;
        let positive = |k: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(k, format!("must be positive, got {v}")))
            }
        };
        positive("tx_power_w", self.tx_power_w)?;
        positive("max_tx_power_w", self.max_tx_power_w)?;
        positive("wavelength_m", self.wavelength_m)?;
        positive("frame_radius_m", self.frame_radius_m)?;
        positive("area_m", self.area_m)?;
        positive("equal_hop_distance_m", self.equal_hop_distance_m)?;
        if !(self.uncertainty_m >= 0.0) {
            return Err(Error::config("uncertainty_m", "must be non-negative"));
        }
        if !(self.dark_count_rate >= 0.0) {
            return Err(Error::config("dark_count_rate", "must be non-negative"));
        }
        if !(self.bg_count_rate >= 0.0) {
            return Err(Error::config("bg_count_rate", "must be non-negative"));
        }
        if !self.noise_power_dbm.is_finite() {
            return Err(Error::config("noise_power_dbm", "must be finite"));
        }
        if self.n_sinks == 0 {
            return Err(Error::config("n_sinks", "need at least one sink"));
        }
        if self.n_nodes == 0 {
            return Err(Error::config("n_nodes", "need at least one node"));
        }
        if self.trials == 0 {
            return Err(Error::config("trials", "need at least one trial"));
        }
        if self.ksp_k == 0 {
            return Err(Error::config("ksp_k", "must be at least 1"));
        }
        if self.hop_budget_factor == 0 {
            return Err(Error::config("hop_budget_factor", "must be at least 1"));
        }
        if !(0.0..PI / 2.0).contains(&self.equal_hop_jitter_rad) {
            return Err(Error::config("equal_hop_jitter_rad", "must lie in [0, pi/2)"));
        }
        if !(self.amp_nsp >= 1.0) {
            return Err(Error::config("amp_nsp", "must be >= 1"));
        }
        if let Some(b) = self.amp_bandwidth_hz {
            positive("amp_bandwidth_hz", b)?;
        }
        Ok(())
    }

    pub fn optics(&self) -> OpticsConfig {
        OpticsConfig {
            aperture_m2: self.aperture_m2,
            fov_rad: self.fov_rad,
            refractive_index: self.refractive_index,
            theta_min: self.theta_min_rad,
            theta_max: self.theta_max_rad,
            eta_t: self.eta_t,
            eta_r: self.eta_r,
            eta_d: self.eta_d,
        }
    }

    pub fn target(&self) -> LinkTarget {
        LinkTarget {
            rate_bps: self.rate_target_bps,
            ber: self.ber_target,
            pulse_s: self.pulse_s,
        }
    }

    pub fn noise(&self) -> NoiseModel {
        NoiseModel::from_dbm(self.dark_count_rate, self.bg_count_rate, self.noise_power_dbm)
    }

    pub fn profile(&self) -> WaterProfile {
        WaterProfile::from_extinction(self.wavelength_m, self.water_type.extinction()).expect("validated wavelength")
    }

    pub fn link_model(&self) -> LinkModel {
        LinkModel {
            optics: self.optics(),
            profile: self.profile(),
            noise: self.noise(),
            target: self.target(),
            slot_normalized: self.ber_slot_normalized,
        }
    }

    pub fn amplifier(&self) -> AmplifierModel {
        let mut amp = AmplifierModel::new(self.wavelength_m, self.pulse_s, self.amp_nsp);
        if let Some(b) = self.amp_bandwidth_hz {
            amp.bandwidth = b;
        }
        amp
    }
}
