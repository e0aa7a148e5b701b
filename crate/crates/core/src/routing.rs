//! Feasibility graph and centralized route computation: Dijkstra with a
//! deterministic tie-break, widest path, Yen's k shortest paths, and the
//! per-objective route analyses for DF and AF relaying.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::link_budget::{hop_gain, LinkModel};
use crate::pointing::{link_geometry, LinkGeometry, NodeState, PointingCase};
use crate::relay_af::{min_power_af, sink_snr};
use crate::relay_df::{e2e_ber_df, max_rate_df, min_power_df};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Scheme {
    Df,
    Af,
}

impl Scheme {
    pub const ALL: [Scheme; 2] = [Scheme::Df, Scheme::Af];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Df => "df",
            Scheme::Af => "af",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "df" => Ok(Scheme::Df),
            "af" => Ok(Scheme::Af),
            _ => Err(Error::config("scheme", format!("expected df or af, got `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Objective {
    Ber,
    Rate,
    Power,
    Lipar,
}

impl Objective {
    pub const ALL: [Objective; 4] = [Objective::Ber, Objective::Rate, Objective::Power, Objective::Lipar];

    pub fn as_str(self) -> &'static str {
        match self {
            Objective::Ber => "ber",
            Objective::Rate => "rate",
            Objective::Power => "power",
            Objective::Lipar => "lipar",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Objective {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ber" => Ok(Objective::Ber),
            "rate" => Ok(Objective::Rate),
            "power" => Ok(Objective::Power),
            "lipar" => Ok(Objective::Lipar),
            _ => Err(Error::config(
                "objective",
                format!("expected ber, rate, power or lipar, got `{s}`"),
            )),
        }
    }
}

impl TryFrom<String> for Scheme {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Scheme> for String {
    fn from(v: Scheme) -> String {
        v.as_str().to_string()
    }
}

impl TryFrom<String> for Objective {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Objective> for String {
    fn from(v: Objective) -> String {
        v.as_str().to_string()
    }
}

/// Directed feasible link with its cached metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub gain: f64,
    /// BER at the target rate and the graph transmit power.
    pub ber: f64,
    /// Rate at the target BER and the graph transmit power.
    pub rate: f64,
    /// Minimum power meeting the target rate and BER on this hop.
    pub power: f64,
    /// Hop SNR at the graph transmit power.
    pub snr: f64,
    pub geometry: Option<LinkGeometry>,
}

#[derive(Debug, Clone)]
pub struct NetworkGraph {
    pub source: usize,
    pub sinks: Vec<usize>,
    /// Transmit power the edge metrics were evaluated at.
    pub tx_power: f64,
    is_sink: Vec<bool>,
    adj: Vec<Vec<Edge>>,
}

impl NetworkGraph {
    pub fn empty(n: usize, source: usize, sinks: &[usize], tx_power: f64) -> Self {
        let mut is_sink = vec![false; n];
        for &s in sinks {
            is_sink[s] = true;
        }
        Self {
            source,
            sinks: sinks.to_vec(),
            tx_power,
            is_sink,
            adj: vec![Vec::new(); n],
        }
    }

    /// Graph from explicit composite gains. Edges leaving sinks, self
    /// loops, zero-gain edges and edges whose minimum power exceeds
    /// `tx_power` are dropped.
    pub fn from_gains(
        n: usize,
        source: usize,
        sinks: &[usize],
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
        model: &LinkModel,
        tx_power: f64,
    ) -> Result<Self> {
        let mut g = Self::empty(n, source, sinks, tx_power);
        for (u, v, gain) in edges {
            g.try_add(u, v, gain, None, model)?;
        }
        g.sort();
        Ok(g)
    }

    fn try_add(
        &mut self,
        u: usize,
        v: usize,
        gain: f64,
        geometry: Option<LinkGeometry>,
        model: &LinkModel,
    ) -> Result<bool> {
        if u == v || self.is_sink[u] || !(gain > 0.0) {
            return Ok(false);
        }
        let t = &model.target;
        let power = model.min_tx_power(gain, t.rate_bps, t.ber)?;
        if power > self.tx_power {
            return Ok(false);
        }
        let pr = model.received_power(self.tx_power, gain);
        self.adj[u].push(Edge {
            from: u,
            to: v,
            gain,
            ber: model.ber(pr, t.rate_bps)?,
            rate: model.rate(pr, t.ber)?,
            power,
            snr: model.af_snrs(self.tx_power, &[gain])[0],
            geometry,
        });
        Ok(true)
    }

    fn sort(&mut self) {
        for list in &mut self.adj {
            list.sort_by_key(|e| e.to);
            list.dedup_by_key(|e| e.to);
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn is_sink(&self, v: usize) -> bool {
        self.is_sink[v]
    }

    pub fn out_edges(&self, v: usize) -> &[Edge] {
        &self.adj[v]
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.adj.iter().flatten()
    }

    pub fn n_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn edge(&self, u: usize, v: usize) -> Option<&Edge> {
        self.adj[u]
            .binary_search_by_key(&v, |e| e.to)
            .ok()
            .map(|i| &self.adj[u][i])
    }

    /// Edges along a vertex path.
    pub fn path_edges(&self, path: &[usize]) -> Result<Vec<&Edge>> {
        path.windows(2)
            .map(|w| {
                self.edge(w[0], w[1])
                    .ok_or_else(|| Error::domain(format!("no edge {} -> {}", w[0], w[1])))
            })
            .collect()
    }

    pub fn path_gains(&self, path: &[usize]) -> Result<Vec<f64>> {
        Ok(self.path_edges(path)?.iter().map(|e| e.gain).collect())
    }
}

/// Vertex layout: source 0, relays `1..=n_relays`, then the sinks.
#[derive(Debug, Clone)]
pub struct Topology {
    pub nodes: Vec<NodeState>,
    pub source: usize,
    pub sinks: Vec<usize>,
}

impl Topology {
    pub fn sink_positions(&self) -> Vec<Vec2> {
        self.sinks.iter().map(|&s| self.nodes[s].estimate).collect()
    }
}

/// Geometry and gain of the link `tx -> rx`, or `None` when infeasible.
pub fn link_gain(
    topo: &Topology,
    sink_pos: &[Vec2],
    tx: usize,
    rx: usize,
    case: PointingCase,
    model: &LinkModel,
) -> Option<(LinkGeometry, f64)> {
    let geo = link_geometry(&topo.nodes[tx], &topo.nodes[rx], sink_pos, case, &model.optics).ok()?;
    let gain = hop_gain(
        &model.profile,
        &model.optics,
        geo.distance,
        geo.phi,
        geo.theta_half,
        geo.psi,
    )
    .ok()?;
    (gain > 0.0).then_some((geo, gain))
}

/// Directed feasibility graph of a topology under one pointing case at
/// transmit power `tx_power`.
pub fn build_graph(topo: &Topology, case: PointingCase, model: &LinkModel, tx_power: f64) -> Result<NetworkGraph> {
    let n = topo.nodes.len();
    let sink_pos = topo.sink_positions();
    let mut g = NetworkGraph::empty(n, topo.source, &topo.sinks, tx_power);
    // no feasible link is longer than the narrowest-beam range; the 5%
    // margin covers the tilt factor at the widest feasible offset
    let reach = model
        .comm_range(tx_power, model.optics.theta_min, 0.0, 0.0)
        .map(|r| 1.05 * r)
        .unwrap_or(f64::INFINITY);
    for u in 0..n {
        if g.is_sink(u) {
            continue;
        }
        for v in 0..n {
            if v == u || v == topo.source {
                continue;
            }
            if topo.nodes[u].estimate.distance(topo.nodes[v].estimate) > reach {
                continue;
            }
            if let Some((geo, gain)) = link_gain(topo, &sink_pos, u, v, case, model) {
                g.try_add(u, v, gain, Some(geo), model)?;
            }
        }
    }
    g.sort();
    Ok(g)
}

/// A simple path from the source to a sink with its objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub vertices: Vec<usize>,
    pub weight: f64,
}

impl Route {
    pub fn hops(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }
}

/// Ordering used everywhere: total weight, then hop count, then the vertex
/// sequence.
pub fn route_order(wa: f64, pa: &[usize], wb: f64, pb: &[usize]) -> Ordering {
    wa.total_cmp(&wb).then(pa.len().cmp(&pb.len())).then_with(|| pa.cmp(pb))
}

#[derive(Debug, Clone, PartialEq)]
struct Label {
    weight: f64,
    path: Vec<usize>,
}

impl Eq for Label {}

impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed for a min-heap
        route_order(other.weight, &other.path, self.weight, &self.path)
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sequential sum of edge weights along a path.
pub fn path_weight(g: &NetworkGraph, path: &[usize], weight: &dyn Fn(&Edge) -> f64) -> Result<f64> {
    Ok(g.path_edges(path)?.into_iter().fold(0.0, |acc, e| acc + weight(e)))
}

/// Least-cost extension of `root` to any sink, avoiding root vertices and
/// `blocked` edges. Sinks terminate paths.
fn extend_shortest(
    g: &NetworkGraph,
    root: &[usize],
    root_weight: f64,
    weight: &dyn Fn(&Edge) -> f64,
    blocked: &HashSet<(usize, usize)>,
) -> Option<Route> {
    let n = g.n_vertices();
    let start = *root.last()?;
    let mut banned = vec![false; n];
    for &v in &root[..root.len() - 1] {
        banned[v] = true;
    }
    let mut best: Vec<Option<Label>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    let init = Label {
        weight: root_weight,
        path: root.to_vec(),
    };
    best[start] = Some(init.clone());
    heap.push(init);
    while let Some(label) = heap.pop() {
        let u = *label.path.last().expect("non-empty");
        if done[u] {
            continue;
        }
        done[u] = true;
        if g.is_sink(u) && label.path.len() > 1 {
            return Some(Route {
                vertices: label.path,
                weight: label.weight,
            });
        }
        for e in g.out_edges(u) {
            let v = e.to;
            if banned[v] || done[v] || blocked.contains(&(u, v)) {
                continue;
            }
            let w = label.weight + weight(e);
            let better = match &best[v] {
                None => true,
                Some(b) => {
                    let mut p = label.path.clone();
                    p.push(v);
                    route_order(w, &p, b.weight, &b.path) == Ordering::Less
                }
            };
            if better {
                let mut path = label.path.clone();
                path.push(v);
                let l = Label { weight: w, path };
                best[v] = Some(l.clone());
                heap.push(l);
            }
        }
    }
    None
}

/// Minimum-weight path from the source to the cheapest sink.
pub fn dijkstra(g: &NetworkGraph, weight: &dyn Fn(&Edge) -> f64) -> Result<Route> {
    extend_shortest(g, &[g.source], 0.0, weight, &HashSet::new()).ok_or(Error::NoRoute)
}

pub fn df_ber_weight(e: &Edge) -> f64 {
    -(-e.ber).ln_1p()
}

pub fn af_snr_weight(e: &Edge) -> f64 {
    (1.0 / e.snr).ln_1p()
}

pub fn power_weight(e: &Edge) -> f64 {
    e.power
}

pub fn min_ber_route_df(g: &NetworkGraph) -> Result<Route> {
    dijkstra(g, &df_ber_weight)
}

pub fn min_ber_route_af(g: &NetworkGraph) -> Result<Route> {
    dijkstra(g, &af_snr_weight)
}

pub fn min_power_edge_route_df(g: &NetworkGraph) -> Result<Route> {
    dijkstra(g, &power_weight)
}

/// Largest achievable bottleneck edge rate from the source to any sink.
pub fn max_bottleneck(g: &NetworkGraph) -> Option<f64> {
    let n = g.n_vertices();
    let mut width = vec![f64::NEG_INFINITY; n];
    let mut done = vec![false; n];
    width[g.source] = f64::INFINITY;
    loop {
        let u = (0..n)
            .filter(|&v| !done[v] && width[v] > f64::NEG_INFINITY)
            .max_by(|&a, &b| width[a].total_cmp(&width[b]).then(b.cmp(&a)))?;
        done[u] = true;
        if g.is_sink(u) {
            return Some(width[u]);
        }
        for e in g.out_edges(u) {
            let w = width[u].min(e.rate);
            if !done[e.to] && w > width[e.to] {
                width[e.to] = w;
            }
        }
    }
}

/// Path maximizing the minimum edge rate; ties broken by fewer hops, then
/// vertex sequence. The route weight is the bottleneck rate.
pub fn widest_path_route_df(g: &NetworkGraph) -> Result<Route> {
    let b = max_bottleneck(g).ok_or(Error::NoRoute)?;
    let blocked: HashSet<(usize, usize)> = g.edges().filter(|e| e.rate < b).map(|e| (e.from, e.to)).collect();
    let r = extend_shortest(g, &[g.source], 0.0, &|_| 1.0, &blocked).ok_or(Error::NoRoute)?;
    Ok(Route {
        vertices: r.vertices,
        weight: b,
    })
}

/// Yen's k loopless shortest paths, ascending in the route order.
pub fn yen_ksp(g: &NetworkGraph, k: usize, weight: &dyn Fn(&Edge) -> f64) -> Vec<Route> {
    let mut found: Vec<Route> = Vec::new();
    let Some(first) = extend_shortest(g, &[g.source], 0.0, weight, &HashSet::new()) else {
        return found;
    };
    found.push(first);
    let mut candidates: Vec<Route> = Vec::new();
    while found.len() < k {
        let prev = found.last().expect("non-empty").vertices.clone();
        for i in 0..prev.len() - 1 {
            let root = &prev[..=i];
            let mut blocked = HashSet::new();
            for p in &found {
                if p.vertices.len() > i + 1 && &p.vertices[..=i] == root {
                    blocked.insert((p.vertices[i], p.vertices[i + 1]));
                }
            }
            let root_w = path_weight(g, root, weight).expect("root follows graph edges");
            if let Some(r) = extend_shortest(g, root, root_w, weight, &blocked) {
                let known = found.iter().chain(candidates.iter()).any(|q| q.vertices == r.vertices);
                if !known {
                    candidates.push(r);
                }
            }
        }
        if candidates.is_empty() {
            break;
        }
        let best = (0..candidates.len())
            .min_by(|&a, &b| {
                let (ra, rb) = (&candidates[a], &candidates[b]);
                route_order(ra.weight, &ra.vertices, rb.weight, &rb.vertices)
            })
            .expect("non-empty");
        found.push(candidates.swap_remove(best));
    }
    found
}

/// Every simple path from the source to a sink.
pub fn all_simple_paths(g: &NetworkGraph) -> Vec<Vec<usize>> {
    fn walk(g: &NetworkGraph, path: &mut Vec<usize>, on: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let u = *path.last().expect("non-empty");
        if g.is_sink(u) {
            out.push(path.clone());
            return;
        }
        for e in g.out_edges(u) {
            if !on[e.to] {
                on[e.to] = true;
                path.push(e.to);
                walk(g, path, on, out);
                path.pop();
                on[e.to] = false;
            }
        }
    }
    let mut out = Vec::new();
    let mut on = vec![false; g.n_vertices()];
    on[g.source] = true;
    walk(g, &mut vec![g.source], &mut on, &mut out);
    out
}

/// Per-hop assignments and end-to-end metrics of an analysed route.
#[derive(Debug, Clone, PartialEq)]
pub struct PathAnalysis {
    pub vertices: Vec<usize>,
    pub scheme: Scheme,
    pub bers: Vec<f64>,
    pub rates: Vec<f64>,
    pub powers: Vec<f64>,
    pub e2e_ber: f64,
    pub e2e_rate: f64,
    pub total_power: f64,
    pub bsr: f64,
}

impl PathAnalysis {
    pub fn hops(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }
}

fn bsr_df(bers: &[f64]) -> f64 {
    bers.iter().map(|&p| 1.0 - p).product()
}

/// DF route at fixed power, target rate per hop.
pub fn analyze_df_fixed(g: &NetworkGraph, path: &[usize], model: &LinkModel) -> Result<PathAnalysis> {
    let edges = g.path_edges(path)?;
    let bers: Vec<f64> = edges.iter().map(|e| e.ber).collect();
    let h = edges.len();
    Ok(PathAnalysis {
        vertices: path.to_vec(),
        scheme: Scheme::Df,
        e2e_ber: e2e_ber_df(&bers),
        bsr: bsr_df(&bers),
        bers,
        rates: vec![model.target.rate_bps; h],
        powers: vec![g.tx_power; h],
        e2e_rate: model.target.rate_bps,
        total_power: g.tx_power * h as f64,
    })
}

/// AF route at fixed power: BER at the target rate, rate at the target BER.
pub fn analyze_af_fixed(g: &NetworkGraph, path: &[usize], model: &LinkModel) -> Result<PathAnalysis> {
    analyze_af_gains(path, &g.path_gains(path)?, g.tx_power, model)
}

/// AF analysis of a chain with explicit hop gains at common power `pt`.
pub fn analyze_af_gains(path: &[usize], gains: &[f64], pt: f64, model: &LinkModel) -> Result<PathAnalysis> {
    let gammas = model.af_snrs(pt, gains);
    let h = gains.len();
    let e2e_ber = model.af_ber(&gammas, model.target.rate_bps)?;
    let e2e_rate = model.af_rate(&gammas, model.target.ber)?;
    Ok(PathAnalysis {
        vertices: path.to_vec(),
        scheme: Scheme::Af,
        bers: vec![e2e_ber; h],
        rates: vec![e2e_rate; h],
        powers: vec![pt; h],
        e2e_ber,
        e2e_rate,
        total_power: pt * h as f64,
        bsr: 1.0 - e2e_ber,
    })
}

/// Minimum end-to-end BER route.
pub fn min_ber(g: &NetworkGraph, scheme: Scheme, model: &LinkModel) -> Result<PathAnalysis> {
    match scheme {
        Scheme::Df => analyze_df_fixed(g, &min_ber_route_df(g)?.vertices, model),
        Scheme::Af => analyze_af_fixed(g, &min_ber_route_af(g)?.vertices, model),
    }
}

/// Maximum end-to-end rate at the target BER.
pub fn max_rate(g: &NetworkGraph, scheme: Scheme, model: &LinkModel) -> Result<PathAnalysis> {
    match scheme {
        Scheme::Df => {
            let route = widest_path_route_df(g)?;
            let gains = g.path_gains(&route.vertices)?;
            let sol = max_rate_df(&gains, g.tx_power, model.target.ber, model)?;
            let h = gains.len();
            Ok(PathAnalysis {
                vertices: route.vertices,
                scheme,
                bsr: bsr_df(&sol.bers),
                bers: sol.bers,
                rates: vec![sol.rate_bps; h],
                powers: vec![g.tx_power; h],
                e2e_ber: sol.e2e_ber,
                e2e_rate: sol.rate_bps,
                total_power: g.tx_power * h as f64,
            })
        }
        Scheme::Af => {
            let route = min_ber_route_af(g)?;
            let gains = g.path_gains(&route.vertices)?;
            let gammas = model.af_snrs(g.tx_power, &gains);
            let rate = model.af_rate(&gammas, model.target.ber)?;
            let ber = model.af_ber(&gammas, rate)?;
            let h = gains.len();
            Ok(PathAnalysis {
                vertices: route.vertices,
                scheme,
                bers: vec![ber; h],
                rates: vec![rate; h],
                powers: vec![g.tx_power; h],
                e2e_ber: ber,
                e2e_rate: rate,
                total_power: g.tx_power * h as f64,
                bsr: 1.0 - ber,
            })
        }
    }
}

/// Minimum total transmit power meeting the end-to-end targets. DF picks
/// the route by summed single-hop power and refines the per-hop BERs; AF
/// solves the power line search on the `k` best-SNR routes.
pub fn min_power(
    g: &NetworkGraph,
    scheme: Scheme,
    model: &LinkModel,
    k: usize,
    max_power: f64,
) -> Result<PathAnalysis> {
    let t = model.target;
    match scheme {
        Scheme::Df => {
            let route = min_power_edge_route_df(g)?;
            let gains = g.path_gains(&route.vertices)?;
            let sol = min_power_df(&gains, t.rate_bps, t.ber, model, max_power)?;
            let h = gains.len();
            Ok(PathAnalysis {
                vertices: route.vertices,
                scheme,
                e2e_ber: e2e_ber_df(&sol.bers),
                bsr: bsr_df(&sol.bers),
                bers: sol.bers,
                rates: vec![t.rate_bps; h],
                total_power: sol.total_w,
                powers: sol.powers,
                e2e_rate: t.rate_bps,
            })
        }
        Scheme::Af => {
            let routes = yen_ksp(g, k.max(1), &af_snr_weight);
            if routes.is_empty() {
                return Err(Error::NoRoute);
            }
            let mut best: Option<(Route, crate::relay_af::AfPowerSolution)> = None;
            for r in routes {
                let gains = g.path_gains(&r.vertices)?;
                if let Ok(sol) = min_power_af(&gains, t.rate_bps, t.ber, g.tx_power.min(max_power), model) {
                    if best.as_ref().is_none_or(|(_, b)| sol.total_w < b.total_w) {
                        best = Some((r, sol));
                    }
                }
            }
            let (route, sol) = best.ok_or_else(|| Error::infeasible("no candidate route meets the targets"))?;
            let h = route.hops();
            let ber = model.af_ber(&sol.gammas, t.rate_bps)?;
            Ok(PathAnalysis {
                vertices: route.vertices,
                scheme,
                bers: vec![ber; h],
                rates: vec![t.rate_bps; h],
                powers: vec![sol.pt; h],
                e2e_ber: ber,
                e2e_rate: t.rate_bps,
                total_power: sol.total_w,
                bsr: 1.0 - ber,
            })
        }
    }
}

/// Sink SNR of an AF route at the graph power.
pub fn route_sink_snr(g: &NetworkGraph, path: &[usize], model: &LinkModel) -> Result<f64> {
    Ok(sink_snr(&model.af_snrs(g.tx_power, &g.path_gains(path)?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::link_budget::{LinkTarget, NoiseModel};
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

    fn graph(n: usize, sinks: &[usize], edges: &[(usize, usize, f64)]) -> NetworkGraph {
        NetworkGraph::from_gains(n, 0, sinks, edges.iter().copied(), &model(), 0.01).unwrap()
    }

    #[test]
    fn single_edge() {
        let g = graph(2, &[1], &[(0, 1, 1e-4)]);
        let r = min_ber_route_df(&g).unwrap();
        assert_eq!(r.vertices, vec![0, 1]);
        let r = min_power_edge_route_df(&g).unwrap();
        assert_eq!(r.weight, model().min_tx_power(1e-4, 1e9, 1e-5).unwrap());
    }

    #[test]
    fn sinks_have_no_out_edges() {
        let g = graph(3, &[2], &[(0, 1, 1e-4), (2, 1, 1e-4), (1, 2, 1e-4)]);
        assert!(g.out_edges(2).is_empty());
        assert_eq!(g.n_edges(), 2);
    }

    #[test]
    fn equal_weights_prefer_fewer_hops() {
        let g = graph(
            4,
            &[3],
            &[(0, 1, 1e-4), (1, 2, 1e-4), (2, 3, 1e-4), (0, 2, 1e-4), (1, 3, 1e-4)],
        );
        let r = min_ber_route_df(&g).unwrap();
        assert_eq!(r.vertices, vec![0, 1, 3]);
    }

    #[test]
    fn disconnected_is_no_route() {
        let g = graph(3, &[2], &[(0, 1, 1e-4)]);
        assert_eq!(min_ber_route_df(&g), Err(Error::NoRoute));
        assert!(yen_ksp(&g, 3, &af_snr_weight).is_empty());
    }

    #[test]
    fn yen_lists_sorted_paths() {
        let g = graph(
            5,
            &[4],
            &[
                (0, 1, 2e-4),
                (0, 2, 1e-4),
                (1, 2, 3e-4),
                (1, 3, 1e-4),
                (2, 3, 2e-4),
                (3, 4, 1e-4),
                (2, 4, 5e-5),
            ],
        );
        let ks = yen_ksp(&g, 10, &af_snr_weight);
        let mut all: Vec<(f64, Vec<usize>)> = all_simple_paths(&g)
            .into_iter()
            .map(|p| (path_weight(&g, &p, &af_snr_weight).unwrap(), p))
            .collect();
        all.sort_by(|a, b| route_order(a.0, &a.1, b.0, &b.1));
        assert_eq!(ks.len(), all.len());
        for (r, (w, p)) in ks.iter().zip(&all) {
            assert_eq!(&r.vertices, p);
            assert_eq!(r.weight, *w);
        }
        assert_eq!(yen_ksp(&g, 1, &af_snr_weight)[0], dijkstra(&g, &af_snr_weight).unwrap());
    }

    #[test]
    fn widest_path_bottleneck() {
        let g = graph(4, &[3], &[(0, 1, 1e-4), (1, 3, 1e-4), (0, 2, 5e-4), (2, 3, 3e-4)]);
        let r = widest_path_route_df(&g).unwrap();
        assert_eq!(r.vertices, vec![0, 2, 3]);
        assert_eq!(r.weight, g.edge(2, 3).unwrap().rate);
    }
}
