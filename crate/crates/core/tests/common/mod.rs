//! Reference implementations for the integration tests. They recompute
//! every quantity from first principles (direct arithmetic, exhaustive
//! enumeration, grid scans) without going through the library solvers.
#![allow(dead_code)]

use std::cmp::Ordering;

use uowc::config::Config;
use uowc::link_budget::LinkModel;
use uowc::routing::{Edge, NetworkGraph};
use uowc::special::erfc_inv;
use uowc::water::WaterType;

pub const H_PLANCK: f64 = 6.62e-34;
pub const C_WATER: f64 = 2.55e8;

pub fn model(water: WaterType) -> LinkModel {
    let cfg = Config {
        water_type: water,
        ..Config::default()
    };
    cfg.link_model()
}

pub fn default_model() -> LinkModel {
    model(WaterType::Ocean)
}

/// Photon count per slot of optical power `p`.
pub fn counts(m: &LinkModel, p: f64, rate: f64) -> f64 {
    p * m.optics.eta_d * m.profile.wavelength_m / (rate * m.target.pulse_s * H_PLANCK * C_WATER)
}

/// Hop BER with received power `pr` at bit rate `rate`.
pub fn ber(m: &LinkModel, pr: f64, rate: f64) -> f64 {
    let pn = m.noise.power_w;
    let x = (0.5 * m.target.pulse_s).sqrt() * (counts(m, pr + pn, rate).sqrt() - counts(m, pn, rate).sqrt());
    0.5 * libm::erfc(x)
}

/// Inverse complementary error function by bisection on `libm::erfc`.
pub fn erfc_inv_bisect(y: f64) -> f64 {
    assert!(y > 0.0 && y < 2.0);
    let (mut lo, mut hi) = (-30.0f64, 30.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        // erfc is decreasing
        if libm::erfc(mid) > y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Received signal power a hop needs for (`rate`, `ber`), from the BER
/// expression solved for the signal count.
pub fn required_pr_with(m: &LinkModel, rate: f64, ber: f64, inv: impl Fn(f64) -> f64) -> f64 {
    let pn = m.noise.power_w;
    let p0 = counts(m, pn, rate);
    let root = p0.sqrt() + inv(2.0 * ber) / (0.5 * m.target.pulse_s).sqrt();
    let p1 = root * root;
    let scale = rate * m.target.pulse_s * H_PLANCK * C_WATER / (m.optics.eta_d * m.profile.wavelength_m);
    (p1 - p0) * scale
}

pub fn required_pr(m: &LinkModel, rate: f64, ber: f64) -> f64 {
    required_pr_with(m, rate, ber, erfc_inv_bisect)
}

/// Transmit power a hop with composite gain `gain` needs.
pub fn hop_power(m: &LinkModel, gain: f64, rate: f64, ber: f64, inv: impl Fn(f64) -> f64) -> f64 {
    required_pr_with(m, rate, ber, inv) / (gain * m.optics.eta_t * m.optics.eta_r)
}

/// Sum over all error patterns with an odd number of flips.
pub fn e2e_ber_enumerate(bers: &[f64]) -> f64 {
    let h = bers.len();
    let mut total = 0.0;
    for mask in 0u64..(1u64 << h) {
        if mask.count_ones() % 2 == 1 {
            total += (0..h)
                .map(|i| if mask >> i & 1 == 1 { bers[i] } else { 1.0 - bers[i] })
                .product::<f64>();
        }
    }
    total
}

pub fn hop_snr(m: &LinkModel, pt: f64, gain: f64) -> f64 {
    gain * m.optics.eta_t * m.optics.eta_r * pt / m.noise.power_w
}

/// Sink SNR as the plain product form.
pub fn sink_snr(gammas: &[f64]) -> f64 {
    1.0 / (gammas.iter().map(|g| 1.0 + 1.0 / g).product::<f64>() - 1.0)
}

/// Dense simplex grid over the split of the end-to-end parity budget
/// `ln(1 - 2 P)` among the hops; every grid point meets the end-to-end BER
/// with equality. Returns the least total power found.
pub fn p1_grid(m: &LinkModel, gains: &[f64], rate: f64, ber_target: f64, n: usize) -> f64 {
    let budget = (1.0 - 2.0 * ber_target).ln();
    let h = gains.len();
    let cost = |share: f64, g: f64| -> f64 {
        let p = -0.5 * (share * budget).exp_m1();
        hop_power(m, g, rate, p, erfc_inv)
    };
    // per-hop cost tables on the grid shares k / n
    let tables: Vec<Vec<f64>> = gains
        .iter()
        .map(|&g| {
            (0..=n)
                .map(|k| {
                    if k == 0 {
                        f64::INFINITY
                    } else {
                        cost(k as f64 / n as f64, g)
                    }
                })
                .collect()
        })
        .collect();
    fn rec(tables: &[Vec<f64>], hop: usize, left: usize, acc: f64, best: &mut f64) {
        if acc >= *best {
            return;
        }
        if hop + 1 == tables.len() {
            let v = acc + tables[hop][left];
            if v < *best {
                *best = v;
            }
            return;
        }
        for k in 1..left {
            rec(tables, hop + 1, left - k, acc + tables[hop][k], best);
        }
    }
    let mut best = f64::INFINITY;
    if h == 1 {
        return tables[0][n];
    }
    rec(&tables, 0, n, 0.0, &mut best);
    best
}

/// Smallest common AF transmit power on a grid of pitch `resolution` that
/// meets the required sink SNR, by a decade-refined scan. `None` when even
/// `pt_max` falls short.
pub fn p2_scan(m: &LinkModel, gains: &[f64], rate: f64, ber: f64, pt_max: f64, resolution: f64) -> Option<f64> {
    let need = required_pr(m, rate, ber) / m.noise.power_w;
    let ok = |pt: f64| sink_snr(&gains.iter().map(|&g| hop_snr(m, pt, g)).collect::<Vec<_>>()) >= need;
    if !ok(pt_max) {
        return None;
    }
    let mut lo = 0.0;
    let mut step = 10f64.powf(pt_max.log10().ceil());
    loop {
        // first grid point above lo that is feasible
        let mut x = lo + step;
        while !ok(x.min(pt_max)) {
            lo = x;
            x += step;
        }
        if step <= resolution {
            return Some(x.min(pt_max));
        }
        step /= 10.0;
    }
}

pub fn edge_weight(g: &NetworkGraph, path: &[usize], w: &dyn Fn(&Edge) -> f64) -> f64 {
    path.windows(2)
        .fold(0.0, |acc, p| acc + w(g.edge(p[0], p[1]).expect("edge on path")))
}

/// All simple source-to-sink paths, found by an explicit stack over every
/// vertex pair.
pub fn enumerate_paths(g: &NetworkGraph) -> Vec<Vec<usize>> {
    let n = g.n_vertices();
    let mut out = Vec::new();
    let mut stack = vec![vec![g.source]];
    while let Some(p) = stack.pop() {
        let u = *p.last().unwrap();
        if g.sinks.contains(&u) {
            out.push(p);
            continue;
        }
        for v in 0..n {
            if !p.contains(&v) && g.edge(u, v).is_some() {
                let mut q = p.clone();
                q.push(v);
                stack.push(q);
            }
        }
    }
    out
}

pub fn route_cmp(wa: f64, pa: &[usize], wb: f64, pb: &[usize]) -> Ordering {
    wa.partial_cmp(&wb)
        .expect("finite weights")
        .then(pa.len().cmp(&pb.len()))
        .then_with(|| pa.cmp(pb))
}

/// Paths sorted by (weight, hops, vertex sequence) with their weights.
pub fn ranked_paths(g: &NetworkGraph, w: &dyn Fn(&Edge) -> f64) -> Vec<(f64, Vec<usize>)> {
    let mut all: Vec<(f64, Vec<usize>)> = enumerate_paths(g)
        .into_iter()
        .map(|p| (edge_weight(g, &p, w), p))
        .collect();
    all.sort_by(|a, b| route_cmp(a.0, &a.1, b.0, &b.1));
    all
}

/// Widest path: largest bottleneck rate, then fewest hops, then vertex
/// sequence.
pub fn widest_path(g: &NetworkGraph) -> Option<(f64, Vec<usize>)> {
    let bottleneck = |p: &[usize]| {
        p.windows(2)
            .map(|e| g.edge(e[0], e[1]).unwrap().rate)
            .fold(f64::INFINITY, f64::min)
    };
    enumerate_paths(g)
        .into_iter()
        .map(|p| (bottleneck(&p), p))
        .min_by(|a, b| {
            b.0.partial_cmp(&a.0)
                .unwrap()
                .then(a.1.len().cmp(&b.1.len()))
                .then_with(|| a.1.cmp(&b.1))
        })
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
