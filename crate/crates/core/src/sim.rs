//! Monte Carlo harness: seeded topology generation, single trials for every
//! objective/scheme/case combination, campaign aggregation and the
//! equal-hop-length study.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Config, UncertaintyDist};
use crate::error::{Error, Result};
use crate::geom::{wrap_angle, Vec2};
use crate::link_budget::{hop_gain, LinkBudgetResult};
use crate::lipar::{lipar_route, FailReason, LiparOutcome, LiparParams};
use crate::pointing::{link_geometry, nearest_sink, LinkGeometry, NodeState, PointingCase};
use crate::relay_af::min_power_af;
use crate::relay_df::{e2e_ber_df, max_rate_df, min_power_df};
use crate::routing::{
    analyze_af_gains, build_graph, max_rate, min_ber, min_power, Objective, PathAnalysis, Scheme, Topology,
};
use crate::water::WaterType;

pub const TRIAL_HEADER: &str = "trial,objective,scheme,case,water,success,hops,e2e_rate_bps,total_power_w,e2e_bsr";
pub const AGGREGATE_HEADER: &str = "objective,scheme,case,water,n_nodes,n_sinks,trials,fail_frac,mean_hops,mean_rate_bps,mean_power_w,mean_bsr,stderr_rate,stderr_power";
pub const FAILURE_HEADER: &str = "trial,objective,scheme,case,water,n_nodes,n_sinks,fail_reason";

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `index` under master seed `seed`.
pub fn trial_seed(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ index)
}

pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(seed, index))
}

fn displacement(rng: &mut impl Rng, eps: f64, dist: UncertaintyDist) -> Vec2 {
    let angle = rng.random::<f64>() * 2.0 * PI;
    let radius = match dist {
        UncertaintyDist::UniformDisk => eps * rng.random::<f64>().sqrt(),
        UncertaintyDist::FixedRadius => eps,
    };
    Vec2::from_angle(angle) * radius
}

/// Sink positions: equidistant along the top edge, centred.
pub fn sink_positions(cfg: &Config) -> Vec<Vec2> {
    let w = cfg.area_m;
    (1..=cfg.n_sinks)
        .map(|k| Vec2::new(w * k as f64 / (cfg.n_sinks + 1) as f64, w))
        .collect()
}

/// Random topology: source on the bottom edge, relays uniform in the area,
/// sinks on the top edge. True positions are displaced from the estimates
/// inside the uncertainty disk; sink positions are exact.
pub fn generate_network(cfg: &Config, rng: &mut impl Rng) -> Topology {
    let w = cfg.area_m;
    let (r, eps) = (cfg.frame_radius_m, cfg.uncertainty_m);
    let mut nodes = Vec::with_capacity(cfg.n_nodes + cfg.n_sinks + 1);
    let push = |nodes: &mut Vec<NodeState>, p: Vec2, rng: &mut dyn FnMut() -> Vec2| {
        let mut s = NodeState::new(nodes.len(), p, r, eps);
        s.actual = p + rng();
        nodes.push(s);
    };
    let src = Vec2::new(rng.random::<f64>() * w, 0.0);
    let mut positions = vec![src];
    for _ in 0..cfg.n_nodes {
        positions.push(Vec2::new(rng.random::<f64>() * w, rng.random::<f64>() * w));
    }
    let offsets: Vec<Vec2> = (0..positions.len())
        .map(|_| displacement(rng, eps, cfg.uncertainty_dist))
        .collect();
    for (p, off) in positions.into_iter().zip(offsets) {
        push(&mut nodes, p, &mut || off);
    }
    let sinks_at = sink_positions(cfg);
    let first_sink = nodes.len();
    for &p in &sinks_at {
        let mut s = NodeState::new(nodes.len(), p, r, 0.0);
        s.actual = p;
        nodes.push(s);
    }
    for n in &mut nodes {
        n.pointing_target = nearest_sink(n.estimate, &sinks_at);
    }
    Topology {
        nodes,
        source: 0,
        sinks: (first_sink..first_sink + cfg.n_sinks).collect(),
    }
}

pub fn generate_trial_network(cfg: &Config, index: u64) -> Topology {
    generate_network(cfg, &mut trial_rng(cfg.seed, index))
}

/// One Monte Carlo realisation.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: u64,
    pub objective: Objective,
    pub scheme: Scheme,
    pub case: PointingCase,
    pub water: WaterType,
    pub outcome: std::result::Result<PathAnalysis, FailReason>,
}

impl TrialRecord {
    pub fn success(&self) -> bool {
        self.outcome.is_ok()
    }

    pub fn path(&self) -> Option<&PathAnalysis> {
        self.outcome.as_ref().ok()
    }

    pub fn fail_reason(&self) -> Option<FailReason> {
        self.outcome.as_ref().err().copied()
    }

    pub fn csv_row(&self) -> String {
        let head = format!(
            "{},{},{},{},{},{}",
            self.trial,
            self.objective,
            self.scheme,
            self.case,
            self.water,
            self.success()
        );
        match &self.outcome {
            Ok(p) => format!("{head},{},{},{},{}", p.hops(), p.e2e_rate, p.total_power, p.bsr),
            Err(_) => format!("{head},,,,"),
        }
    }
}

fn fail_reason(e: &Error) -> FailReason {
    match e {
        Error::NoRoute => FailReason::Disconnected,
        _ => FailReason::InfeasibleTarget,
    }
}

/// Route and analyse one objective on a given topology.
pub fn route_topology(
    cfg: &Config,
    topo: &Topology,
    objective: Objective,
    scheme: Scheme,
    case: PointingCase,
) -> std::result::Result<PathAnalysis, FailReason> {
    let model = cfg.link_model();
    if objective == Objective::Lipar {
        let params = LiparParams {
            tx_power: cfg.tx_power_w,
            literal_angle_filter: cfg.lipar_literal_angle_filter,
            hop_budget: cfg.hop_budget_factor * cfg.n_nodes,
        };
        let route = match lipar_route(topo, &model, &params) {
            Ok(LiparOutcome::Reached(r)) => r,
            Ok(LiparOutcome::Failed { reason, .. }) => return Err(reason),
            Err(_) => return Err(FailReason::Disconnected),
        };
        let gains: Vec<f64> = route.hops.iter().map(|c| c.gain).collect();
        let h = gains.len();
        let t = model.target;
        return match scheme {
            Scheme::Df => {
                let bers: Vec<f64> = route.hops.iter().map(|c| c.ber).collect();
                let powers = gains
                    .iter()
                    .map(|&g| model.min_tx_power(g, t.rate_bps, t.ber))
                    .collect::<Result<Vec<f64>>>()
                    .map_err(|e| fail_reason(&e))?;
                Ok(PathAnalysis {
                    vertices: route.vertices,
                    scheme,
                    e2e_ber: e2e_ber_df(&bers),
                    bsr: bers.iter().map(|p| 1.0 - p).product(),
                    bers,
                    rates: vec![t.rate_bps; h],
                    total_power: powers.iter().sum(),
                    powers,
                    e2e_rate: t.rate_bps,
                })
            }
            Scheme::Af => {
                let gammas = model.af_snrs(cfg.tx_power_w, &gains);
                let ber = model.af_ber(&gammas, t.rate_bps).map_err(|e| fail_reason(&e))?;
                let rate = model.af_rate(&gammas, t.ber).map_err(|e| fail_reason(&e))?;
                Ok(PathAnalysis {
                    vertices: route.vertices,
                    scheme,
                    bers: vec![ber; h],
                    rates: vec![rate; h],
                    powers: vec![cfg.tx_power_w; h],
                    e2e_ber: ber,
                    e2e_rate: rate,
                    total_power: cfg.tx_power_w * h as f64,
                    bsr: 1.0 - ber,
                })
            }
        };
    }
    let graph = build_graph(topo, case, &model, cfg.tx_power_w).map_err(|e| fail_reason(&e))?;
    let res = match objective {
        Objective::Ber => min_ber(&graph, scheme, &model),
        Objective::Rate => max_rate(&graph, scheme, &model),
        Objective::Power => min_power(&graph, scheme, &model, cfg.ksp_k, cfg.max_tx_power_w),
        Objective::Lipar => unreachable!("handled above"),
    };
    res.map_err(|e| fail_reason(&e))
}

pub fn run_trial(cfg: &Config, objective: Objective, scheme: Scheme, case: PointingCase, index: u64) -> TrialRecord {
    let topo = generate_trial_network(cfg, index);
    TrialRecord {
        trial: index,
        objective,
        scheme,
        case,
        water: cfg.water_type,
        outcome: route_topology(cfg, &topo, objective, scheme, case),
    }
}

/// Aggregate over a campaign; means are over successful trials.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub objective: String,
    pub scheme: Scheme,
    pub case: PointingCase,
    pub water: WaterType,
    pub n_nodes: usize,
    pub n_sinks: usize,
    pub trials: usize,
    pub fail_frac: f64,
    pub mean_hops: f64,
    pub mean_rate_bps: f64,
    pub mean_power_w: f64,
    pub mean_bsr: f64,
    pub stderr_rate: f64,
    pub stderr_power: f64,
}

fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else {
        String::new()
    }
}

impl Aggregate {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.objective,
            self.scheme,
            self.case,
            self.water,
            self.n_nodes,
            self.n_sinks,
            self.trials,
            fmt_num(self.fail_frac),
            fmt_num(self.mean_hops),
            fmt_num(self.mean_rate_bps),
            fmt_num(self.mean_power_w),
            fmt_num(self.mean_bsr),
            fmt_num(self.stderr_rate),
            fmt_num(self.stderr_power),
        )
    }
}

/// Mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn aggregate(
    cfg: &Config,
    records: &[TrialRecord],
    objective: Objective,
    scheme: Scheme,
    case: PointingCase,
) -> Aggregate {
    let ok: Vec<&PathAnalysis> = records.iter().filter_map(TrialRecord::path).collect();
    let pick = |f: fn(&PathAnalysis) -> f64| ok.iter().map(|p| f(p)).collect::<Vec<f64>>();
    let (mean_rate, se_rate) = mean_stderr(&pick(|p| p.e2e_rate));
    let (mean_power, se_power) = mean_stderr(&pick(|p| p.total_power));
    Aggregate {
        objective: objective.to_string(),
        scheme,
        case,
        water: cfg.water_type,
        n_nodes: cfg.n_nodes,
        n_sinks: cfg.n_sinks,
        trials: records.len(),
        fail_frac: (records.len() - ok.len()) as f64 / records.len().max(1) as f64,
        mean_hops: mean_stderr(&pick(|p| p.hops() as f64)).0,
        mean_rate_bps: mean_rate,
        mean_power_w: mean_power,
        mean_bsr: mean_stderr(&pick(|p| p.bsr)).0,
        stderr_rate: se_rate,
        stderr_power: se_power,
    }
}

#[derive(Debug, Clone)]
pub struct Campaign {
    pub records: Vec<TrialRecord>,
    pub aggregate: Aggregate,
}

impl Campaign {
    pub fn trials_csv(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            let _ = writeln!(s, "{}", r.csv_row());
        }
        s
    }

    pub fn failures_csv(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            if let Some(f) = r.fail_reason() {
                let a = &self.aggregate;
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{f}",
                    r.trial, r.objective, r.scheme, r.case, r.water, a.n_nodes, a.n_sinks
                );
            }
        }
        s
    }
}

/// Runs trials `0..cfg.trials` in parallel and folds them in index order.
pub fn run_campaign(cfg: &Config, objective: Objective, scheme: Scheme, case: PointingCase) -> Campaign {
    let records: Vec<TrialRecord> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|i| run_trial(cfg, objective, scheme, case, i))
        .collect();
    let aggregate = aggregate(cfg, &records, objective, scheme, case);
    Campaign { records, aggregate }
}

/// Positions of an `h`-hop path of equal hop length between a source at the
/// origin and a sink near the positive x axis. Relay `k` sits on a ray from
/// the source at a random angle within `±jitter` (narrowed to the rays that
/// still meet the hop circle), one hop length beyond relay `k - 1`. The sink
/// is one hop length beyond the last relay, on the axis when reachable.
pub fn equal_hop_positions(h: usize, total: f64, jitter: f64, rng: &mut impl Rng) -> Vec<Vec2> {
    let len = total / h as f64;
    let mut pts = vec![Vec2::new(0.0, 0.0)];
    for _ in 1..h {
        let alpha = if jitter > 0.0 {
            rng.random_range(-jitter..=jitter)
        } else {
            0.0
        };
        let prev = *pts.last().expect("non-empty");
        let rho = prev.norm();
        let alpha = if rho > len {
            let beta = prev.angle();
            let spread = (len / rho).asin();
            beta + wrap_angle(alpha - beta).clamp(-spread, spread)
        } else {
            alpha
        };
        let dir = Vec2::from_angle(alpha);
        // farther intersection of the ray t*dir with |p - prev| = len
        let b = dir.dot(prev);
        let c = rho * rho - len * len;
        pts.push(dir * (b + (b * b - c).max(0.0).sqrt()));
    }
    let prev = *pts.last().expect("non-empty");
    let sink = if prev.y.abs() <= len {
        Vec2::new(prev.x + (len * len - prev.y * prev.y).sqrt(), 0.0)
    } else {
        Vec2::new(prev.x, prev.y - prev.y.signum() * len)
    };
    pts.push(sink);
    pts
}

/// End-to-end rate of one random equal-hop path; infeasible hops give a
/// zero rate. Returns (rate, bsr).
pub fn equal_hop_trial(cfg: &Config, h: usize, case: PointingCase, scheme: Scheme, index: u64) -> Result<(f64, f64)> {
    let mut rng = trial_rng(trial_seed(cfg.seed, 0xE9A1_0000 + h as u64), index);
    let pts = equal_hop_positions(h, cfg.equal_hop_distance_m, cfg.equal_hop_jitter_rad, &mut rng);
    let sink = *pts.last().expect("non-empty");
    let nodes: Vec<NodeState> = pts
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let eps = if i == h { 0.0 } else { cfg.uncertainty_m };
            let mut n = NodeState::new(i, p, cfg.frame_radius_m, eps);
            n.pointing_target = Some(0);
            n
        })
        .collect();
    let model = cfg.link_model();
    let mut gains = Vec::with_capacity(h);
    for w in nodes.windows(2) {
        let g = link_geometry(&w[0], &w[1], &[sink], case, &model.optics)
            .ok()
            .and_then(|geo| {
                hop_gain(
                    &model.profile,
                    &model.optics,
                    geo.distance,
                    geo.phi,
                    geo.theta_half,
                    geo.psi,
                )
                .ok()
            })
            .unwrap_or(0.0);
        gains.push(g);
    }
    if gains.iter().any(|&g| g <= 0.0) {
        return Ok((0.0, 0.0));
    }
    match scheme {
        Scheme::Df => {
            let sol = max_rate_df(&gains, cfg.tx_power_w, cfg.ber_target, &model)?;
            Ok((sol.rate_bps, sol.bers.iter().map(|p| 1.0 - p).product()))
        }
        Scheme::Af => {
            let gammas = model.af_snrs(cfg.tx_power_w, &gains);
            let rate = model.af_rate(&gammas, cfg.ber_target)?;
            Ok((rate, 1.0 - cfg.ber_target))
        }
    }
}

/// Mean equal-hop rate for each hop count in `hops`; rows reuse the
/// aggregate schema with `objective = equal_hop` and `mean_hops = H`.
pub fn equal_hop_study(cfg: &Config, case: PointingCase, scheme: Scheme, hops: &[usize]) -> Result<Vec<Aggregate>> {
    hops.iter()
        .map(|&h| {
            let runs: Vec<(f64, f64)> = (0..cfg.trials as u64)
                .into_par_iter()
                .map(|i| equal_hop_trial(cfg, h, case, scheme, i))
                .collect::<Result<_>>()?;
            let rates: Vec<f64> = runs.iter().map(|r| r.0).collect();
            let bsr: Vec<f64> = runs.iter().map(|r| r.1).collect();
            let (mean_rate, se_rate) = mean_stderr(&rates);
            let fails = rates.iter().filter(|&&r| r <= 0.0).count();
            Ok(Aggregate {
                objective: "equal_hop".to_string(),
                scheme,
                case,
                water: cfg.water_type,
                n_nodes: h.saturating_sub(1),
                n_sinks: 1,
                trials: cfg.trials,
                fail_frac: fails as f64 / cfg.trials as f64,
                mean_hops: h as f64,
                mean_rate_bps: mean_rate,
                mean_power_w: cfg.tx_power_w * h as f64,
                mean_bsr: mean_stderr(&bsr).0,
                stderr_rate: se_rate,
                stderr_power: 0.0,
            })
        })
        .collect()
}

/// Geometry and budget of a single link of length `distance`. The sink
/// lies beyond the receiver on the transmitter's pointing line; the
/// receiver sits `offset` radians off that line.
pub fn single_link(
    cfg: &Config,
    distance: f64,
    case: PointingCase,
    offset: f64,
) -> Result<(LinkGeometry, LinkBudgetResult)> {
    if !(distance > 0.0) {
        return Err(Error::domain(format!("distance {distance} must be positive")));
    }
    let model = cfg.link_model();
    let sink = Vec2::new(0.0, distance + cfg.area_m);
    let tx = NodeState::new(0, Vec2::new(0.0, 0.0), cfg.frame_radius_m, cfg.uncertainty_m);
    let rx = NodeState::new(
        1,
        Vec2::from_angle(PI / 2.0 - offset) * distance,
        cfg.frame_radius_m,
        cfg.uncertainty_m,
    );
    let geo = link_geometry(&tx, &rx, &[sink], case, &model.optics)?;
    let gain = hop_gain(
        &model.profile,
        &model.optics,
        geo.distance,
        geo.phi,
        geo.theta_half,
        geo.psi,
    )?;
    Ok((geo, model.budget(cfg.tx_power_w, gain)?))
}

/// Analysis of an explicit node chain: first point is the source, last the
/// sink, every node pointing at the sink.
#[derive(Debug, Clone, PartialEq)]
pub struct PathReport {
    pub geometry: Vec<LinkGeometry>,
    pub gains: Vec<f64>,
    /// Fixed-power analysis at the target rate.
    pub fixed: PathAnalysis,
    /// Largest end-to-end rate at the target BER.
    pub max_rate_bps: f64,
    /// Minimum-power operating point at the targets, if reachable.
    pub min_power: Option<PathAnalysis>,
}

pub fn analyze_points(cfg: &Config, points: &[Vec2], scheme: Scheme, case: PointingCase) -> Result<PathReport> {
    if points.len() < 2 {
        return Err(Error::domain("a path needs at least two points"));
    }
    let model = cfg.link_model();
    let h = points.len() - 1;
    let sink = points[h];
    let nodes: Vec<NodeState> = points
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let eps = if i == h { 0.0 } else { cfg.uncertainty_m };
            let mut n = NodeState::new(i, p, cfg.frame_radius_m, eps);
            n.pointing_target = Some(0);
            n
        })
        .collect();
    let mut geometry = Vec::with_capacity(h);
    let mut gains = Vec::with_capacity(h);
    for w in nodes.windows(2) {
        let geo = link_geometry(&w[0], &w[1], &[sink], case, &model.optics)?;
        gains.push(hop_gain(
            &model.profile,
            &model.optics,
            geo.distance,
            geo.phi,
            geo.theta_half,
            geo.psi,
        )?);
        geometry.push(geo);
    }
    let vertices: Vec<usize> = (0..=h).collect();
    let t = model.target;
    let (fixed, max_rate_bps, min_power) = match scheme {
        Scheme::Df => {
            let bers = gains
                .iter()
                .map(|&gn| model.ber(model.received_power(cfg.tx_power_w, gn), t.rate_bps))
                .collect::<Result<Vec<f64>>>()?;
            let fixed = PathAnalysis {
                vertices: vertices.clone(),
                scheme,
                e2e_ber: e2e_ber_df(&bers),
                bsr: bers.iter().map(|p| 1.0 - p).product(),
                bers,
                rates: vec![t.rate_bps; h],
                powers: vec![cfg.tx_power_w; h],
                e2e_rate: t.rate_bps,
                total_power: cfg.tx_power_w * h as f64,
            };
            let rate = max_rate_df(&gains, cfg.tx_power_w, t.ber, &model)?.rate_bps;
            let mp = min_power_df(&gains, t.rate_bps, t.ber, &model, cfg.max_tx_power_w)
                .ok()
                .map(|sol| PathAnalysis {
                    vertices: vertices.clone(),
                    scheme,
                    e2e_ber: e2e_ber_df(&sol.bers),
                    bsr: sol.bers.iter().map(|p| 1.0 - p).product(),
                    bers: sol.bers,
                    rates: vec![t.rate_bps; h],
                    total_power: sol.total_w,
                    powers: sol.powers,
                    e2e_rate: t.rate_bps,
                });
            (fixed, rate, mp)
        }
        Scheme::Af => {
            let fixed = analyze_af_gains(&vertices, &gains, cfg.tx_power_w, &model)?;
            let rate = fixed.e2e_rate;
            let mp = min_power_af(&gains, t.rate_bps, t.ber, cfg.max_tx_power_w, &model)
                .ok()
                .map(|sol| {
                    let ber = model.af_ber(&sol.gammas, t.rate_bps).unwrap_or(f64::NAN);
                    PathAnalysis {
                        vertices: vertices.clone(),
                        scheme,
                        bers: vec![ber; h],
                        rates: vec![t.rate_bps; h],
                        powers: vec![sol.pt; h],
                        e2e_ber: ber,
                        e2e_rate: t.rate_bps,
                        total_power: sol.total_w,
                        bsr: 1.0 - ber,
                    }
                });
            (fixed, rate, mp)
        }
    };
    Ok(PathReport {
        geometry,
        gains,
        fixed,
        max_rate_bps,
        min_power,
    })
}
