//! Single-hop IM/DD on-off keying budget: photon counts, BER, achievable
//! rate, minimum transmit power and maximum range.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::special::{erfc, erfc_inv, lambert_w0};
use crate::water::{composite_gain, OpticsConfig, WaterProfile};

/// Planck constant (J s).
pub const PLANCK: f64 = 6.62e-34;
/// Speed of light in water (m/s).
pub const LIGHT_SPEED_WATER: f64 = 2.55e8;
/// Speed of light in vacuum (m/s).
pub const LIGHT_SPEED_VACUUM: f64 = 3e8;

pub fn dbm_to_watts(dbm: f64) -> f64 {
    1e-3 * 10f64.powf(dbm / 10.0)
}

/// Receiver noise: dark/background photon count rates and the total noise
/// power they correspond to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub dark_count_rate: f64,
    pub bg_count_rate: f64,
    /// Total noise power P_n (W).
    pub power_w: f64,
}

impl NoiseModel {
    pub fn from_dbm(dark_count_rate: f64, bg_count_rate: f64, dbm: f64) -> Self {
        Self {
            dark_count_rate,
            bg_count_rate,
            power_w: dbm_to_watts(dbm),
        }
    }

    pub fn total_count_rate(&self) -> f64 {
        self.dark_count_rate + self.bg_count_rate
    }
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::from_dbm(1e6, 1e6, -84.0)
    }
}

/// Per-hop (or end-to-end) operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkTarget {
    pub rate_bps: f64,
    pub ber: f64,
    pub pulse_s: f64,
}

impl Default for LinkTarget {
    fn default() -> Self {
        Self {
            rate_bps: 1e9,
            ber: 1e-5,
            pulse_s: 1e-9,
        }
    }
}

impl LinkTarget {
    pub fn validate(&self) -> Result<()> {
        if !(self.rate_bps > 0.0) {
            return Err(Error::config("rate_target_bps", "must be positive"));
        }
        if !(self.ber > 0.0 && self.ber <= 0.5) {
            return Err(Error::config("ber_target", "must lie in (0, 0.5]"));
        }
        if !(self.pulse_s > 0.0) {
            return Err(Error::config("pulse_s", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudgetResult {
    pub gain: f64,
    pub received_w: f64,
    pub p0: f64,
    pub p1: f64,
    pub ber: f64,
    pub rate_bps: f64,
}

/// Everything a hop computation needs besides geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkModel {
    pub optics: OpticsConfig,
    pub profile: WaterProfile,
    pub noise: NoiseModel,
    pub target: LinkTarget,
    /// Treat the pulse as one slot in the BER argument.
    pub slot_normalized: bool,
}

impl LinkModel {
    pub fn wavelength(&self) -> f64 {
        self.profile.wavelength_m
    }

    pub fn received_power(&self, pt: f64, gain: f64) -> f64 {
        received_power(pt, self.optics.eta_t, self.optics.eta_r, gain)
    }

    /// Photon count per slot for power `p` at bit rate `rate`.
    pub fn photon_count(&self, p: f64, rate: f64) -> Result<f64> {
        photon_rate(p, rate, self.target.pulse_s, self.wavelength(), self.optics.eta_d)
    }

    /// Noise photon count per slot at bit rate `rate`.
    pub fn noise_count(&self, rate: f64) -> Result<f64> {
        self.photon_count(self.noise.power_w, rate)
    }

    /// BER of one hop with received signal power `pr` at bit rate `rate`.
    pub fn ber(&self, pr: f64, rate: f64) -> Result<f64> {
        let p1 = self.photon_count(pr + self.noise.power_w, rate)?;
        let p0 = self.noise_count(rate)?;
        Ok(self.ber_from_counts(p1, p0))
    }

    pub fn ber_from_counts(&self, p1: f64, p0: f64) -> f64 {
        if self.slot_normalized {
            let t = self.target.pulse_s;
            hop_ber(p1 * t, p0 * t, 1.0)
        } else {
            hop_ber(p1, p0, self.target.pulse_s)
        }
    }

    pub fn rate(&self, pr: f64, ber: f64) -> Result<f64> {
        hop_rate(pr, self.noise.power_w, ber, self.wavelength(), self.optics.eta_d)
    }

    pub fn min_tx_power(&self, gain: f64, rate: f64, ber: f64) -> Result<f64> {
        min_tx_power(
            rate,
            ber,
            gain,
            self.optics.eta_t,
            self.optics.eta_r,
            self.optics.eta_d,
            self.wavelength(),
            self.noise.power_w,
        )
    }

    /// Full budget of a hop with gain `gain` at transmit power `pt`. The BER
    /// is evaluated at the target rate, the rate at the target BER.
    pub fn budget(&self, pt: f64, gain: f64) -> Result<LinkBudgetResult> {
        let pr = self.received_power(pt, gain);
        let rate = self.target.rate_bps;
        let p1 = self.photon_count(pr + self.noise.power_w, rate)?;
        let p0 = self.noise_count(rate)?;
        Ok(LinkBudgetResult {
            gain,
            received_w: pr,
            p0,
            p1,
            ber: self.ber_from_counts(p1, p0),
            rate_bps: self.rate(pr, self.target.ber)?,
        })
    }

    pub fn comm_range(&self, pt: f64, theta_half: f64, phi: f64, psi: f64) -> Result<f64> {
        comm_range(
            pt,
            self.target.rate_bps,
            self.target.ber,
            theta_half,
            phi,
            psi,
            &self.optics,
            &self.profile,
            self.noise.power_w,
        )
    }
}

pub fn received_power(pt: f64, eta_t: f64, eta_r: f64, gain: f64) -> f64 {
    pt * eta_t * eta_r * gain
}

/// Photon count per slot: `P eta_d lambda / (R T h c)`.
pub fn photon_rate(p: f64, rate: f64, pulse: f64, wavelength: f64, eta_d: f64) -> Result<f64> {
    let denom = rate * pulse * PLANCK * LIGHT_SPEED_WATER;
    if !(denom > 0.0) {
        return Err(Error::domain(format!(
            "photon rate needs R T > 0, got R={rate}, T={pulse}"
        )));
    }
    Ok(p * eta_d * wavelength / denom)
}

/// OOK BER from signal and noise photon counts.
pub fn hop_ber(p1: f64, p0: f64, pulse: f64) -> f64 {
    let z = (0.5 * pulse).sqrt() * (p1.max(0.0).sqrt() - p0.max(0.0).sqrt());
    (0.5 * erfc(z)).clamp(0.0, 0.5)
}

fn check_ber(ber: f64) -> Result<()> {
    if ber > 0.0 && ber <= 0.5 {
        Ok(())
    } else {
        Err(Error::domain(format!("BER target {ber} outside (0, 0.5]")))
    }
}

/// Rate at which a hop with received power `pr` meets BER `ber`.
pub fn hop_rate(pr: f64, pn: f64, ber: f64, wavelength: f64, eta_d: f64) -> Result<f64> {
    check_ber(ber)?;
    let q = erfc_inv(2.0 * ber);
    let pr = pr.max(0.0);
    if q == 0.0 {
        return Ok(if pr > 0.0 { f64::INFINITY } else { 0.0 });
    }
    // sqrt(Pr + Pn) - sqrt(Pn) without cancellation
    let diff = pr / ((pr + pn).sqrt() + pn.sqrt());
    Ok(eta_d * wavelength / (2.0 * PLANCK * LIGHT_SPEED_WATER) * (diff / q).powi(2))
}

/// Amplitude term `a = erfcinv(2P) sqrt(2 R h c / (eta_d lambda))`.
pub fn ber_amplitude(rate: f64, ber: f64, wavelength: f64, eta_d: f64) -> Result<f64> {
    check_ber(ber)?;
    Ok(erfc_inv(2.0 * ber) * (2.0 * rate * PLANCK * LIGHT_SPEED_WATER / (eta_d * wavelength)).sqrt())
}

/// Received signal power needed to meet (`rate`, `ber`).
pub fn required_received_power(rate: f64, ber: f64, wavelength: f64, eta_d: f64, pn: f64) -> Result<f64> {
    let a = ber_amplitude(rate, ber, wavelength, eta_d)?;
    Ok(a * a + 2.0 * a * pn.sqrt())
}

/// Minimum transmit power so a hop with gain `gain` carries `rate` at `ber`.
#[allow(clippy::too_many_arguments)]
pub fn min_tx_power(
    rate: f64,
    ber: f64,
    gain: f64,
    eta_t: f64,
    eta_r: f64,
    eta_d: f64,
    wavelength: f64,
    pn: f64,
) -> Result<f64> {
    let pr = required_received_power(rate, ber, wavelength, eta_d, pn)?;
    if !(gain > 0.0) {
        return Err(Error::infeasible("zero channel gain"));
    }
    Ok(pr / (gain * eta_t * eta_r))
}

/// Maximum Euclidean distance at which transmit power `pt` still meets
/// (`rate`, `ber`) with the given beam and tilt. The channel is evaluated at
/// the distance projected on the pointing vector.
#[allow(clippy::too_many_arguments)]
pub fn comm_range(
    pt: f64,
    rate: f64,
    ber: f64,
    theta_half: f64,
    phi: f64,
    psi: f64,
    optics: &OpticsConfig,
    profile: &WaterProfile,
    pn: f64,
) -> Result<f64> {
    let cos_phi = phi.cos();
    if !(cos_phi > 0.0) {
        return Err(Error::domain(format!("|phi| = {} must be below pi/2", phi.abs())));
    }
    if !(theta_half > 0.0 && theta_half <= PI) {
        return Err(Error::domain(format!("half-angle {theta_half} outside (0, pi]")));
    }
    if !(pt > 0.0) {
        return Err(Error::infeasible("no transmit power"));
    }
    let xi = crate::water::concentrator_gain(optics, psi);
    if xi == 0.0 {
        return Err(Error::infeasible("receiver outside field of view"));
    }
    let need = required_received_power(rate, ber, profile.wavelength_m, optics.eta_d, pn)?;
    let b = need / (pt * optics.eta_t * optics.eta_r);
    if b == 0.0 {
        return Ok(f64::INFINITY);
    }
    let one_minus_cos = 2.0 * (0.5 * theta_half).sin().powi(2);
    let c = 2.0 * b * PI * one_minus_cos / (optics.aperture_m2 * cos_phi * xi);
    let e = profile.extinction;
    let x = if e > 0.0 {
        2.0 * cos_phi / e * lambert_w0(e / (2.0 * c.sqrt() * cos_phi))?
    } else {
        1.0 / c.sqrt()
    };
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::infeasible("link closes at no positive distance"));
    }
    Ok(x / cos_phi)
}

/// Gain of a hop whose Euclidean length is `distance` with tilt `phi`.
pub fn hop_gain(
    profile: &WaterProfile,
    optics: &OpticsConfig,
    distance: f64,
    phi: f64,
    theta_half: f64,
    psi: f64,
) -> Result<f64> {
    composite_gain(profile, optics, distance * phi.cos(), phi, theta_half, psi)
}
