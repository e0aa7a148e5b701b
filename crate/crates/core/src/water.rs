//! Aquatic line-of-sight channel: Beer-Lambert propagation loss, geometric
//! spreading loss and the receiver concentrator gain.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Green wavelength used by every preset (m).
pub const DEFAULT_WAVELENGTH_M: f64 = 532e-9;

/// Fraction of the extinction attributed to absorption in presets. Only the
/// extinction coefficient enters the link equations.
const ABSORPTION_SHARE: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum WaterType {
    Pure,
    Ocean,
    Coastal,
}

impl WaterType {
    pub const ALL: [WaterType; 3] = [WaterType::Pure, WaterType::Ocean, WaterType::Coastal];

    pub fn extinction(self) -> f64 {
        match self {
            WaterType::Pure => 0.056,
            WaterType::Ocean => 0.1514,
            WaterType::Coastal => 0.398,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            WaterType::Pure => "pure",
            WaterType::Ocean => "ocean",
            WaterType::Coastal => "coastal",
        }
    }
}

impl fmt::Display for WaterType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WaterType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pure" => Ok(WaterType::Pure),
            "ocean" => Ok(WaterType::Ocean),
            "coastal" => Ok(WaterType::Coastal),
            other => Err(Error::config(
                "water_type",
                format!("expected pure, ocean or coastal, got `{other}`"),
            )),
        }
    }
}

/// Absorption, scattering and extinction coefficients (1/m) at one wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaterProfile {
    pub wavelength_m: f64,
    pub absorption: f64,
    pub scattering: f64,
    pub extinction: f64,
}

impl WaterProfile {
    pub fn new(wavelength_m: f64, absorption: f64, scattering: f64) -> Result<Self> {
        if !(wavelength_m > 0.0) || !(absorption >= 0.0) || !(scattering >= 0.0) {
            return Err(Error::domain(
                "water profile needs wavelength > 0 and non-negative coefficients",
            ));
        }
        Ok(Self {
            wavelength_m,
            absorption,
            scattering,
            extinction: absorption + scattering,
        })
    }

    /// Profile with a given extinction, split between absorption and
    /// scattering by the preset share.
    pub fn from_extinction(wavelength_m: f64, extinction: f64) -> Result<Self> {
        let absorption = ABSORPTION_SHARE * extinction;
        let mut p = Self::new(wavelength_m, absorption, extinction - absorption)?;
        p.extinction = extinction;
        Ok(p)
    }

    pub fn preset(kind: WaterType) -> Self {
        Self::from_extinction(DEFAULT_WAVELENGTH_M, kind.extinction()).expect("preset coefficients are valid")
    }
}

/// Transceiver optics shared by every node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticsConfig {
    /// Receiver aperture area (m^2).
    pub aperture_m2: f64,
    /// Concentrator field-of-view half-angle (rad).
    pub fov_rad: f64,
    /// Internal refractive index of the concentrator.
    pub refractive_index: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    pub eta_t: f64,
    pub eta_r: f64,
    pub eta_d: f64,
}

impl Default for OpticsConfig {
    fn default() -> Self {
        Self {
            // 5 cm aperture diameter
            aperture_m2: PI * 0.025 * 0.025,
            fov_rad: PI / 2.0,
            refractive_index: 1.5,
            theta_min: 0.01,
            theta_max: 0.25,
            eta_t: 0.9,
            eta_r: 0.9,
            eta_d: 0.16,
        }
    }
}

impl OpticsConfig {
    pub fn validate(&self) -> Result<()> {
        let eff = |k: &str, v: f64| {
            if v > 0.0 && v <= 1.0 {
                Ok(())
            } else {
                Err(Error::config(k, format!("efficiency must lie in (0, 1], got {v}")))
            }
        };
        eff("eta_t", self.eta_t)?;
        eff("eta_r", self.eta_r)?;
        eff("eta_d", self.eta_d)?;
        if !(self.aperture_m2 > 0.0) {
            return Err(Error::config("aperture_m2", "must be positive"));
        }
        if !(self.theta_min > 0.0 && self.theta_min <= self.theta_max && self.theta_max <= PI) {
            return Err(Error::config("theta_min_rad", "need 0 < theta_min <= theta_max <= pi"));
        }
        if !(self.fov_rad > 0.0 && self.fov_rad <= PI / 2.0) {
            return Err(Error::config("fov_rad", "need 0 < fov <= pi/2"));
        }
        if !(self.refractive_index >= 1.0) {
            return Err(Error::config("refractive_index", "must be >= 1"));
        }
        Ok(())
    }
}

/// Beer-Lambert loss over a path of perpendicular length `d` tilted by `phi`.
pub fn propagation_loss(profile: &WaterProfile, d: f64, phi: f64) -> Result<f64> {
    let c = phi.cos();
    if !(d >= 0.0) {
        return Err(Error::domain(format!("negative distance {d}")));
    }
    if !(phi.abs() < PI / 2.0 && c > 0.0) {
        return Err(Error::domain(format!("cos(phi) <= 0 for phi = {phi}")));
    }
    Ok((-profile.extinction * d / c).exp())
}

/// Concentrator gain: `iota^2 / sin^2(Psi)` inside the field of view, else 0.
pub fn concentrator_gain(optics: &OpticsConfig, psi: f64) -> f64 {
    if psi <= optics.fov_rad {
        let s = optics.fov_rad.sin();
        optics.refractive_index * optics.refractive_index / (s * s)
    } else {
        0.0
    }
}

/// Geometric gain of a beam with half-angle `theta_half` onto the receiver
/// aperture; zero outside `|phi| <= pi/2`.
pub fn geometric_gain(optics: &OpticsConfig, d: f64, phi: f64, theta_half: f64, psi: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::domain(format!("geometric gain is singular at d = {d}")));
    }
    if !(theta_half > 0.0 && theta_half <= PI) {
        return Err(Error::domain(format!("half-angle {theta_half} outside (0, pi]")));
    }
    if !(-PI / 2.0..=PI / 2.0).contains(&phi) {
        return Ok(0.0);
    }
    let xi = concentrator_gain(optics, psi);
    // 1 - cos(theta) without cancellation for narrow beams
    let one_minus_cos = 2.0 * (0.5 * theta_half).sin().powi(2);
    Ok(optics.aperture_m2 / (d * d) * phi.cos() / (2.0 * PI * one_minus_cos) * xi)
}

/// Composite channel gain: propagation loss times geometric gain.
pub fn composite_gain(
    profile: &WaterProfile,
    optics: &OpticsConfig,
    d: f64,
    phi: f64,
    theta_half: f64,
    psi: f64,
) -> Result<f64> {
    let g = geometric_gain(optics, d, phi, theta_half, psi)?;
    if g == 0.0 {
        return Ok(0.0);
    }
    Ok(propagation_loss(profile, d, phi)? * g)
}

impl TryFrom<String> for WaterType {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<WaterType> for String {
    fn from(v: WaterType) -> String {
        v.as_str().to_string()
    }
}
