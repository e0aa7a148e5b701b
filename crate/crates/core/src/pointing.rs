//! Adaptive divergence angles for the three pointing regimes: perfect
//! pointing/tracking, tracking under location uncertainty, and no tracking
//! (beam kept on the nearest sink).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{wrap_angle, Vec2};
use crate::water::OpticsConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum PointingCase {
    PerfectPat,
    UncertainPat,
    NoPat,
}

impl PointingCase {
    pub const ALL: [PointingCase; 3] = [
        PointingCase::PerfectPat,
        PointingCase::UncertainPat,
        PointingCase::NoPat,
    ];

    /// 1-based case number used on the command line and in CSV output.
    pub fn number(self) -> u8 {
        match self {
            PointingCase::PerfectPat => 1,
            PointingCase::UncertainPat => 2,
            PointingCase::NoPat => 3,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(PointingCase::PerfectPat),
            2 => Some(PointingCase::UncertainPat),
            3 => Some(PointingCase::NoPat),
            _ => None,
        }
    }
}

impl fmt::Display for PointingCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

impl FromStr for PointingCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .parse::<u8>()
            .ok()
            .and_then(PointingCase::from_number)
            .ok_or_else(|| Error::config("case", format!("expected 1, 2 or 3, got `{s}`")))
    }
}

impl TryFrom<u8> for PointingCase {
    type Error = Error;
    fn try_from(n: u8) -> Result<Self> {
        PointingCase::from_number(n).ok_or_else(|| Error::config("case", format!("expected 1, 2 or 3, got {n}")))
    }
}

impl From<PointingCase> for u8 {
    fn from(c: PointingCase) -> u8 {
        c.number()
    }
}

/// Position knowledge of one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeState {
    pub id: usize,
    /// Estimated location.
    pub estimate: Vec2,
    /// True location, within `uncertainty` of the estimate.
    pub actual: Vec2,
    /// Radius of the node frame (m).
    pub frame_radius: f64,
    /// Location uncertainty radius (m).
    pub uncertainty: f64,
    /// Index of the sink the transmitter keeps its beam on.
    pub pointing_target: Option<usize>,
}

impl NodeState {
    pub fn new(id: usize, estimate: Vec2, frame_radius: f64, uncertainty: f64) -> Self {
        Self {
            id,
            estimate,
            actual: estimate,
            frame_radius,
            uncertainty,
            pointing_target: None,
        }
    }

    /// Radius of the disk guaranteed to contain the node frame.
    pub fn disk_radius(&self) -> f64 {
        self.frame_radius + self.uncertainty
    }
}

/// Geometry of one directed link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    /// Euclidean distance between the estimates (m).
    pub distance: f64,
    /// Angle between the pointing vector and the link trajectory (rad).
    pub phi: f64,
    /// Incidence angle at the receiver (rad).
    pub psi: f64,
    /// Full cone angle required to cover the receiver.
    pub theta_full: f64,
    /// Half-angle fed to the channel model, floored at theta_min.
    pub theta_half: f64,
}

impl LinkGeometry {
    /// Distance projected on the pointing vector.
    pub fn perpendicular_distance(&self) -> f64 {
        self.distance * self.phi.cos()
    }
}

fn checked_asin(x: f64, what: &str) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("{what}: arcsin argument {x} outside [0, 1]")));
    }
    Ok(x.asin())
}

/// Full divergence angle that just covers a frame of radius `r` at distance `d`.
pub fn theta_perfect(r: f64, d: f64, theta_min: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::domain(format!("distance {d} must be positive")));
    }
    Ok(theta_min.max(checked_asin(r / d, "frame radius exceeds distance")?))
}

/// Worst-case divergence angle with the transmitter on a tangent of its own
/// uncertainty disk.
pub fn theta_uncertain(eps: f64, r: f64, d: f64, theta_min: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::domain(format!("distance {d} must be positive")));
    }
    Ok(theta_min.max(checked_asin((2.0 * eps + r) / d, "uncertainty disk exceeds distance")?))
}

pub fn bearing(from: Vec2, to: Vec2) -> Result<f64> {
    let v = to - from;
    if v.x == 0.0 && v.y == 0.0 {
        return Err(Error::domain("bearing between coincident points"));
    }
    Ok(v.angle())
}

/// Bearings from `li` to the receiver `lj` and to the sink `lm`.
pub fn bearing_angles(li: Vec2, lj: Vec2, lm: Vec2) -> Result<(f64, f64)> {
    Ok((bearing(li, lj)?, bearing(li, lm)?))
}

/// Divergence angle from one origin for a beam centred on the sink bearing
/// `phi_s` that must cover the receiver disk seen at bearing `phi_j`.
///
/// Case order: exact alignment, sink bearing inside the receiver disk, then
/// the off-disk case (same- and opposite-sign variants coincide once the
/// offset is wrapped to (-pi, pi]).
pub fn theta_no_pat_from_origin(phi_s: f64, phi_j: f64, eps: f64, r: f64, d: f64, theta_min: f64) -> Result<f64> {
    if 2.0 * eps + r > d {
        return Err(Error::domain(format!(
            "uncertainty disk (2eps + r = {}) exceeds distance {d}",
            2.0 * eps + r
        )));
    }
    let delta = wrap_angle(phi_s - phi_j);
    if delta == 0.0 {
        return theta_uncertain(eps, r, d, theta_min);
    }
    let pp = theta_perfect(r + eps, d, theta_min)?;
    let half = 0.5 * pp;
    let theta = if delta.abs() <= half {
        2.0 * (delta - half).abs().max((delta + half).abs())
    } else {
        2.0 * delta.abs() + half
    };
    Ok(theta.min(PI))
}

/// Tangent points of the transmitter uncertainty disk, perpendicular to the
/// sink bearing.
pub fn tangent_origins(li: Vec2, eps: f64, phi_s: f64) -> (Vec2, Vec2) {
    (
        li + Vec2::from_angle(phi_s + PI / 2.0) * eps,
        li + Vec2::from_angle(phi_s - PI / 2.0) * eps,
    )
}

/// Sink-directed divergence angle with uncertainty on both sides: the worst
/// of the estimated origin and the two tangent origins, keeping the sink
/// bearing of the estimated origin.
pub fn theta_no_pat(tx: &NodeState, rx: &NodeState, sink: Vec2, theta_min: f64) -> Result<f64> {
    let phi_s = bearing(tx.estimate, sink)?;
    let (o1, o2) = tangent_origins(tx.estimate, tx.uncertainty, phi_s);
    let mut theta = theta_min;
    for origin in [tx.estimate, o1, o2] {
        let v = rx.estimate - origin;
        let d = v.norm();
        if d == 0.0 {
            return Err(Error::domain("receiver coincides with a transmitter origin"));
        }
        let t = theta_no_pat_from_origin(phi_s, v.angle(), rx.uncertainty, rx.frame_radius, d, theta_min)?;
        theta = theta.max(t);
    }
    Ok(theta)
}

/// Nearest sink by estimated location.
pub fn nearest_sink(p: Vec2, sinks: &[Vec2]) -> Option<usize> {
    sinks
        .iter()
        .enumerate()
        .min_by(|a, b| p.distance(*a.1).total_cmp(&p.distance(*b.1)).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
}

fn pointing_sink(node: &NodeState, sinks: &[Vec2]) -> Result<Vec2> {
    let idx = match node.pointing_target {
        Some(i) if i < sinks.len() => i,
        _ => nearest_sink(node.estimate, sinks).ok_or_else(|| Error::domain("no sink to point at"))?,
    };
    Ok(sinks[idx])
}

/// Direction the receiver aperture faces: along the bearing to its own
/// nearest sink, or straight up for a node sitting on a sink.
pub fn receiver_axis(rx: &NodeState, sinks: &[Vec2]) -> Vec2 {
    match pointing_sink(rx, sinks) {
        Ok(s) if s.distance(rx.estimate) > 1e-9 => {
            let v = s - rx.estimate;
            v * (1.0 / v.norm())
        }
        _ => Vec2::new(0.0, 1.0),
    }
}

/// Full divergence angle needed by `tx` to cover `rx` under a pointing case.
pub fn divergence_angle(
    tx: &NodeState,
    rx: &NodeState,
    sinks: &[Vec2],
    case: PointingCase,
    theta_min: f64,
) -> Result<f64> {
    let d = tx.estimate.distance(rx.estimate);
    match case {
        PointingCase::PerfectPat => theta_perfect(rx.frame_radius, d, theta_min),
        PointingCase::UncertainPat => theta_uncertain(rx.uncertainty, rx.frame_radius, d, theta_min),
        PointingCase::NoPat => theta_no_pat(tx, rx, pointing_sink(tx, sinks)?, theta_min),
    }
}

/// Link geometry for `tx -> rx`. Returns `Infeasible` when the beam cannot
/// cover the receiver within `theta_max`, the receiver lies outside its
/// field of view, or the geometry is degenerate.
pub fn link_geometry(
    tx: &NodeState,
    rx: &NodeState,
    sinks: &[Vec2],
    case: PointingCase,
    optics: &OpticsConfig,
) -> Result<LinkGeometry> {
    let distance = tx.estimate.distance(rx.estimate);
    if distance == 0.0 {
        return Err(Error::domain("transmitter and receiver coincide"));
    }
    let theta_full = divergence_angle(tx, rx, sinks, case, optics.theta_min)
        .map_err(|e| Error::infeasible(format!("link {} -> {}: {e}", tx.id, rx.id)))?;
    let (phi, psi) = match case {
        PointingCase::PerfectPat | PointingCase::UncertainPat => (0.0, 0.0),
        PointingCase::NoPat => {
            let sink = pointing_sink(tx, sinks)?;
            let phi_s = bearing(tx.estimate, sink)?;
            let phi_j = bearing(tx.estimate, rx.estimate)?;
            let ray = (rx.estimate - tx.estimate) * (1.0 / distance);
            let axis = receiver_axis(rx, sinks);
            let psi = ray.dot(axis).clamp(-1.0, 1.0).acos();
            (wrap_angle(phi_s - phi_j).abs(), psi)
        }
    };
    if 0.5 * theta_full > optics.theta_max {
        return Err(Error::infeasible(format!(
            "link {} -> {} needs half-angle {} > theta_max {}",
            tx.id,
            rx.id,
            0.5 * theta_full,
            optics.theta_max
        )));
    }
    if phi >= PI / 2.0 {
        return Err(Error::infeasible("receiver behind the pointing vector"));
    }
    if psi > optics.fov_rad {
        return Err(Error::infeasible("receiver outside concentrator field of view"));
    }
    Ok(LinkGeometry {
        distance,
        phi,
        psi,
        theta_full,
        theta_half: optics.theta_min.max(0.5 * theta_full),
    })
}
