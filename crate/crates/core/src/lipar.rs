//! Distributed light-path routing: each node forwards to the feasible
//! neighbour with the best reliability-weighted distance progress, keeping
//! its beam on the nearest sink.

use std::fmt;

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::link_budget::{hop_gain, LinkModel};
use crate::pointing::{link_geometry, LinkGeometry, PointingCase};
use crate::routing::Topology;

/// Why a trial produced no route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FailReason {
    Disconnected,
    InfeasibleTarget,
    DeadEnd,
    HopBudget,
}

impl FailReason {
    pub fn as_str(self) -> &'static str {
        match self {
            FailReason::Disconnected => "disconnected",
            FailReason::InfeasibleTarget => "infeasible_target",
            FailReason::DeadEnd => "dead_end",
            FailReason::HopBudget => "hop_budget",
        }
    }
}

impl fmt::Display for FailReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub id: usize,
    pub distance: f64,
    /// Link BER at the target rate.
    pub ber: f64,
    pub gain: f64,
    pub geometry: LinkGeometry,
}

impl Candidate {
    pub fn score(&self) -> f64 {
        (1.0 - self.ber) * self.distance
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiparParams {
    pub tx_power: f64,
    /// Check the raw bearing offset against the divergence limits instead
    /// of the required divergence angle.
    pub literal_angle_filter: bool,
    pub hop_budget: usize,
}

/// Feasible relays of `node`: receivers within communication range of the
/// sink-directed beam whose required divergence fits the beam limits.
pub fn neighbor_set(topo: &Topology, node: usize, model: &LinkModel, params: &LiparParams) -> Vec<Candidate> {
    let sink_pos: Vec<Vec2> = topo.sink_positions();
    let tx = &topo.nodes[node];
    let o = &model.optics;
    let mut out = Vec::new();
    for (j, rx) in topo.nodes.iter().enumerate() {
        if j == node || j == topo.source {
            continue;
        }
        let Ok(geo) = link_geometry(tx, rx, &sink_pos, PointingCase::NoPat, o) else {
            continue;
        };
        if params.literal_angle_filter && !(o.theta_min <= geo.phi && geo.phi <= o.theta_max) {
            continue;
        }
        let Ok(range) = model.comm_range(params.tx_power, geo.theta_half, geo.phi, geo.psi) else {
            continue;
        };
        if range < geo.distance {
            continue;
        }
        let Ok(gain) = hop_gain(&model.profile, o, geo.distance, geo.phi, geo.theta_half, geo.psi) else {
            continue;
        };
        let pr = model.received_power(params.tx_power, gain);
        let Ok(ber) = model.ber(pr, model.target.rate_bps) else {
            continue;
        };
        out.push(Candidate {
            id: j,
            distance: geo.distance,
            ber,
            gain,
            geometry: geo,
        });
    }
    out
}

/// Candidate maximizing `(1 - BER) * distance`, smaller id on ties.
pub fn select_forwarder(candidates: &[Candidate]) -> Option<&Candidate> {
    candidates
        .iter()
        .max_by(|a, b| a.score().total_cmp(&b.score()).then(b.id.cmp(&a.id)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiparRoute {
    pub vertices: Vec<usize>,
    pub hops: Vec<Candidate>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LiparOutcome {
    Reached(LiparRoute),
    Failed { reason: FailReason, trace: Vec<usize> },
}

/// Hop-by-hop forwarding from the source. A sink in the feasible set is
/// always taken; visited nodes are never revisited.
pub fn lipar_route(topo: &Topology, model: &LinkModel, params: &LiparParams) -> Result<LiparOutcome> {
    if topo.sinks.is_empty() {
        return Err(Error::domain("no sinks"));
    }
    let mut visited = vec![false; topo.nodes.len()];
    let mut current = topo.source;
    visited[current] = true;
    let mut trace = vec![current];
    let mut hops = Vec::new();
    for _ in 0..params.hop_budget {
        let mut cands = neighbor_set(topo, current, model, params);
        cands.retain(|c| !visited[c.id]);
        let sinks: Vec<Candidate> = cands.iter().copied().filter(|c| topo.sinks.contains(&c.id)).collect();
        let pick = if sinks.is_empty() {
            select_forwarder(&cands)
        } else {
            select_forwarder(&sinks)
        };
        let Some(&next) = pick else {
            return Ok(LiparOutcome::Failed {
                reason: FailReason::DeadEnd,
                trace,
            });
        };
        visited[next.id] = true;
        trace.push(next.id);
        hops.push(next);
        if topo.sinks.contains(&next.id) {
            return Ok(LiparOutcome::Reached(LiparRoute { vertices: trace, hops }));
        }
        current = next.id;
    }
    Ok(LiparOutcome::Failed {
        reason: FailReason::HopBudget,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::link_budget::{LinkTarget, NoiseModel};
    use crate::pointing::NodeState;
    use crate::water::{OpticsConfig, WaterProfile, WaterType};

    fn model() -> LinkModel {
        LinkModel {
            optics: OpticsConfig::default(),
            profile: WaterProfile::preset(WaterType::Ocean),
            noise: NoiseModel::default(),
            target: LinkTarget::default(),
            slot_normalized: false,
        }
    }

    fn params() -> LiparParams {
        LiparParams {
            tx_power: 0.01,
            literal_angle_filter: false,
            hop_budget: 100,
        }
    }

    fn topo(points: &[(f64, f64)], n_sinks: usize) -> Topology {
        let nodes = points
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| NodeState::new(i, Vec2::new(x, y), 0.25, 0.0))
            .collect::<Vec<_>>();
        let n = nodes.len();
        Topology {
            nodes,
            source: 0,
            sinks: (n - n_sinks..n).collect(),
        }
    }

    fn cand(id: usize, distance: f64, ber: f64) -> Candidate {
        Candidate {
            id,
            distance,
            ber,
            gain: 1.0,
            geometry: LinkGeometry {
                distance,
                phi: 0.0,
                psi: 0.0,
                theta_full: 0.02,
                theta_half: 0.01,
            },
        }
    }

    #[test]
    fn forwarder_rules() {
        assert_eq!(
            select_forwarder(&[cand(1, 10.0, 0.2), cand(2, 10.0, 0.1)]).unwrap().id,
            2
        );
        assert_eq!(
            select_forwarder(&[cand(1, 5.0, 0.1), cand(2, 10.0, 0.1)]).unwrap().id,
            2
        );
        assert_eq!(select_forwarder(&[cand(3, 5.0, 0.1), cand(2, 5.0, 0.1)]).unwrap().id, 2);
        assert!(select_forwarder(&[]).is_none());
    }

    #[test]
    fn isolated_node_has_no_neighbors() {
        let t = topo(&[(50.0, 0.0), (50.0, 100.0)], 1);
        assert!(neighbor_set(&t, 0, &model(), &params()).is_empty());
        match lipar_route(&t, &model(), &params()).unwrap() {
            LiparOutcome::Failed { reason, trace } => {
                assert_eq!(reason, FailReason::DeadEnd);
                assert_eq!(trace, vec![0]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn adjacent_sink_is_one_hop() {
        let t = topo(&[(50.0, 90.0), (50.0, 100.0)], 1);
        match lipar_route(&t, &model(), &params()).unwrap() {
            LiparOutcome::Reached(r) => assert_eq!(r.vertices, vec![0, 1]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn chain_is_followed() {
        let t = topo(
            &[
                (50.0, 0.0),
                (50.0, 20.0),
                (50.0, 40.0),
                (50.0, 60.0),
                (50.0, 80.0),
                (50.0, 100.0),
            ],
            1,
        );
        match lipar_route(&t, &model(), &params()).unwrap() {
            LiparOutcome::Reached(r) => {
                assert_eq!(r.vertices.first(), Some(&0));
                assert_eq!(r.vertices.last(), Some(&5));
                assert!(r.vertices.windows(2).all(|w| w[0] < w[1]));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
