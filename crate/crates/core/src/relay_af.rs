//! All-optical amplify-and-forward relaying with fixed per-hop transmit
//! power: amplifier gains, power recursion with local and ASE noise, sink
//! SNR, end-to-end BER/rate and the minimum-power line search.

use crate::error::{Error, Result};
use crate::link_budget::{hop_rate, required_received_power, LinkModel, LIGHT_SPEED_VACUUM, PLANCK};
use crate::special::erfc;

/// Optical amplifier noise parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplifierModel {
    /// Spontaneous emission factor.
    pub n_sp: f64,
    /// Optical carrier frequency (Hz).
    pub f0: f64,
    /// Amplifier bandwidth (Hz).
    pub bandwidth: f64,
}

impl AmplifierModel {
    pub fn new(wavelength: f64, pulse: f64, n_sp: f64) -> Self {
        Self {
            n_sp,
            f0: LIGHT_SPEED_VACUUM / wavelength,
            bandwidth: 1.0 / pulse,
        }
    }

    /// ASE power added by an amplifier of gain `amp_gain`.
    pub fn ase_power(&self, amp_gain: f64) -> f64 {
        PLANCK * self.f0 * (amp_gain - 1.0).max(0.0) * self.n_sp * self.bandwidth
    }
}

/// Amplifier gain keeping the transmit power at `pt` after a hop of gain `g`.
pub fn amp_gain(pt: f64, g: f64, eta_t: f64, eta_r: f64, pn: f64) -> Result<f64> {
    let denom = g * eta_t * eta_r * pt + pn;
    if !(denom > 0.0) {
        return Err(Error::domain("amplifier gain denominator is zero"));
    }
    Ok(pt / denom)
}

pub fn hop_snr(pt: f64, pn: f64, g: f64, eta_t: f64, eta_r: f64) -> f64 {
    g * eta_t * eta_r * pt / pn
}

/// `prod(1 + 1/gamma_h) - 1`, computed without cancellation.
fn snr_product_minus_one(gammas: &[f64]) -> f64 {
    gammas.iter().map(|&g| (1.0 / g).ln_1p()).sum::<f64>().exp_m1()
}

/// SNR at the sink of a chain of hops with per-hop SNRs `gammas`.
pub fn sink_snr(gammas: &[f64]) -> f64 {
    1.0 / snr_product_minus_one(gammas)
}

/// Power levels of one hop of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AfHopPowers {
    /// Total received power at the end of the hop.
    pub received: f64,
    pub signal: f64,
    pub local_noise: f64,
    pub ase_noise: f64,
    /// Power re-transmitted by the node at the end of the hop (zero at the sink).
    pub transmitted: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AfChain {
    pub hops: Vec<AfHopPowers>,
    /// Received power from the closed-form sums.
    pub closed_form_received: Vec<f64>,
    /// Transmitted power from the closed-form sums.
    pub closed_form_transmitted: Vec<f64>,
    pub amp_gains: Vec<f64>,
}

impl AfChain {
    pub fn sink(&self) -> &AfHopPowers {
        self.hops.last().expect("chain has at least one hop")
    }

    /// Signal-to-noise ratio at the sink.
    pub fn sink_snr(&self) -> f64 {
        let s = self.sink();
        s.signal / (s.local_noise + s.ase_noise)
    }
}

/// Propagate power hop by hop. Relays use gains from `amp_gain` at `pt`;
/// with `include_ase` each relay also injects ASE noise.
pub fn simulate_af_chain(
    pt: f64,
    gains: &[f64],
    eta_t: f64,
    eta_r: f64,
    pn: f64,
    amp: &AmplifierModel,
    include_ase: bool,
) -> Result<AfChain> {
    if gains.is_empty() {
        return Err(Error::domain("empty route"));
    }
    let h = gains.len();
    let eta = eta_t * eta_r;
    let amp_gains: Vec<f64> = gains[..h - 1]
        .iter()
        .map(|&g| amp_gain(pt, g, eta_t, eta_r, pn))
        .collect::<Result<_>>()?;
    let ase: Vec<f64> = amp_gains
        .iter()
        .map(|&a| if include_ase { amp.ase_power(a) } else { 0.0 })
        .collect();

    let mut hops = Vec::with_capacity(h);
    let (mut s, mut nl, mut na) = (pt, 0.0, 0.0);
    for (i, &g) in gains.iter().enumerate() {
        let rs = eta * g * s;
        let rl = eta * g * nl + pn;
        let ra = eta * g * na;
        let mut hop = AfHopPowers {
            received: rs + rl + ra,
            signal: rs,
            local_noise: rl,
            ase_noise: ra,
            transmitted: 0.0,
        };
        if i + 1 < h {
            let a = amp_gains[i];
            s = a * rs;
            nl = a * rl;
            na = a * ra + ase[i];
            hop.transmitted = s + nl + na;
        }
        hops.push(hop);
    }

    // closed forms: products of link and amplifier gains between stages
    let link = |from: usize, to: usize| -> f64 { gains[from..to].iter().map(|&g| eta * g).product() };
    let amps = |from: usize, to: usize| -> f64 { amp_gains[from..to].iter().product() };
    let mut closed_rx = Vec::with_capacity(h);
    let mut closed_tx = Vec::with_capacity(h);
    for m in 0..h {
        // received at the end of hop m (0-based)
        let mut r = pt * link(0, m + 1) * amps(0, m);
        for j in 0..=m {
            r += pn * link(j + 1, m + 1) * amps(j, m);
        }
        for (j, a) in ase.iter().enumerate().take(m) {
            r += a * link(j + 1, m + 1) * amps(j + 1, m);
        }
        closed_rx.push(r);
        closed_tx.push(if m + 1 < h { amp_gains[m] * r + ase[m] } else { 0.0 });
    }

    Ok(AfChain {
        hops,
        closed_form_received: closed_rx,
        closed_form_transmitted: closed_tx,
        amp_gains,
    })
}

/// End-to-end BER of an AF chain given the sink noise photon count `p0`.
pub fn e2e_ber_af(gammas: &[f64], p0: f64, pulse: f64) -> f64 {
    let gamma_h = sink_snr(gammas);
    // sqrt(Pi / (Pi - 1)) - 1 with Pi / (Pi - 1) = 1 + gamma_H
    let bracket = gamma_h / ((1.0 + gamma_h).sqrt() + 1.0);
    (0.5 * erfc((0.5 * pulse * p0).sqrt() * bracket)).clamp(0.0, 0.5)
}

/// End-to-end achievable rate of an AF chain at BER `ber`.
pub fn e2e_rate_af(gammas: &[f64], ber: f64, pn: f64, wavelength: f64, eta_d: f64) -> Result<f64> {
    hop_rate(sink_snr(gammas) * pn, pn, ber, wavelength, eta_d)
}

impl LinkModel {
    pub fn af_snrs(&self, pt: f64, gains: &[f64]) -> Vec<f64> {
        gains
            .iter()
            .map(|&g| hop_snr(pt, self.noise.power_w, g, self.optics.eta_t, self.optics.eta_r))
            .collect()
    }

    /// AF end-to-end BER at bit rate `rate`, noise count from the sink.
    pub fn af_ber(&self, gammas: &[f64], rate: f64) -> Result<f64> {
        let p0 = self.noise_count(rate)?;
        let t = self.target.pulse_s;
        Ok(if self.slot_normalized {
            e2e_ber_af(gammas, p0 * t, 1.0)
        } else {
            e2e_ber_af(gammas, p0, t)
        })
    }

    pub fn af_rate(&self, gammas: &[f64], ber: f64) -> Result<f64> {
        e2e_rate_af(gammas, ber, self.noise.power_w, self.wavelength(), self.optics.eta_d)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AfPowerSolution {
    pub pt: f64,
    pub amp_gains: Vec<f64>,
    pub gammas: Vec<f64>,
    pub total_w: f64,
}

/// Sink SNR a chain needs to carry `rate` at BER `ber`.
pub fn required_sink_snr(model: &LinkModel, rate: f64, ber: f64) -> Result<f64> {
    Ok(
        required_received_power(rate, ber, model.wavelength(), model.optics.eta_d, model.noise.power_w)?
            / model.noise.power_w,
    )
}

/// Smallest common transmit power in `(0, pt_max]` meeting (`rate`, `ber`)
/// end to end, by bisection on the monotone sink SNR.
pub fn min_power_af(gains: &[f64], rate: f64, ber: f64, pt_max: f64, model: &LinkModel) -> Result<AfPowerSolution> {
    if gains.is_empty() {
        return Err(Error::domain("empty route"));
    }
    if gains.iter().any(|&g| !(g > 0.0)) || !(pt_max > 0.0) {
        return Err(Error::infeasible("route has a zero-gain hop"));
    }
    let need = required_sink_snr(model, rate, ber)?;
    let snr_at = |pt: f64| sink_snr(&model.af_snrs(pt, gains));
    if snr_at(pt_max) < need {
        return Err(Error::infeasible(format!(
            "sink SNR {} at {pt_max} W is below the required {need}",
            snr_at(pt_max)
        )));
    }
    // the sink SNR is at most the single-hop SNR of the weakest hop
    let weakest = gains.iter().copied().fold(f64::MAX, f64::min);
    let mut lo = (need * model.noise.power_w / (weakest * model.optics.eta_t * model.optics.eta_r)).min(pt_max);
    let mut hi = pt_max;
    if snr_at(lo) >= need {
        hi = lo;
        lo = 0.0;
    }
    while hi - lo > 1e-15 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if snr_at(mid) >= need {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let pt = hi;
    let amp_gains = gains[..gains.len() - 1]
        .iter()
        .map(|&g| amp_gain(pt, g, model.optics.eta_t, model.optics.eta_r, model.noise.power_w))
        .collect::<Result<_>>()?;
    Ok(AfPowerSolution {
        pt,
        amp_gains,
        gammas: model.af_snrs(pt, gains),
        total_w: pt * gains.len() as f64,
    })
}
