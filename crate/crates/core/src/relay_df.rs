//! Decode-and-forward relaying: end-to-end BER of a chain of independent
//! hard-decision hops, bottleneck rate, minimum total power at a target
//! end-to-end BER, and the maximum common rate of a fixed-power route.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::link_budget::{ber_amplitude, LinkModel};
use crate::special::erfc_inv;

/// Largest per-hop BER the solvers will assign.
pub const BER_CEILING: f64 = 0.5 - 1e-12;

/// Probability that an odd number of hops flip the bit, via the
/// generating polynomial of the error count.
pub fn e2e_ber_df(bers: &[f64]) -> f64 {
    let mut poly = vec![1.0];
    for &p in bers {
        let mut next = vec![0.0; poly.len() + 1];
        for (k, &c) in poly.iter().enumerate() {
            next[k] += c * (1.0 - p);
            next[k + 1] += c * p;
        }
        poly = next;
    }
    poly.iter().skip(1).step_by(2).sum()
}

/// Same quantity via `(1 - prod(1 - 2p)) / 2`.
pub fn e2e_ber_parity(bers: &[f64]) -> f64 {
    let s: f64 = bers.iter().map(|&p| (-2.0 * p).ln_1p()).sum();
    -0.5 * s.exp_m1()
}

/// Exhaustive sum over all 2^H error patterns with an odd error count.
pub fn brute_force_e2e_ber(bers: &[f64]) -> Result<f64> {
    let h = bers.len();
    if h > 20 {
        return Err(Error::domain(format!("brute force limited to 20 hops, got {h}")));
    }
    let mut total = 0.0;
    for mask in 0u32..(1u32 << h) {
        if mask.count_ones() % 2 == 0 {
            continue;
        }
        let mut prob = 1.0;
        for (i, &p) in bers.iter().enumerate() {
            prob *= if mask & (1 << i) != 0 { p } else { 1.0 - p };
        }
        total += prob;
    }
    Ok(total)
}

/// Bottleneck rate of a path.
pub fn e2e_rate_df(rates: &[f64]) -> Result<f64> {
    rates
        .iter()
        .copied()
        .reduce(f64::min)
        .ok_or_else(|| Error::domain("empty rate vector"))
}

/// Second derivative of `erfcinv(2p)` with respect to `p`.
pub fn erfc_inv_second_derivative(p: f64) -> f64 {
    let z = erfc_inv(2.0 * p);
    2.0 * PI * z * (2.0 * z * z).exp()
}

/// Second derivative of `erfcinv(2p)^2` with respect to `p`.
pub fn erfc_inv_sq_second_derivative(p: f64) -> f64 {
    let z = erfc_inv(2.0 * p);
    2.0 * PI * (2.0 * z * z + 1.0) * (2.0 * z * z).exp()
}

/// Optimal per-hop operating point of a DF route.
#[derive(Debug, Clone, PartialEq)]
pub struct DfPowerSolution {
    pub bers: Vec<f64>,
    pub powers: Vec<f64>,
    pub total_w: f64,
    pub iterations: usize,
    /// Relative spread of the marginal costs over unclamped hops.
    pub kkt_residual: f64,
}

/// Per-hop power as a function of the log-parity coordinate
/// `s = ln(1 - 2p)`: `c (k^2 z^2 + 2 k sqrt(Pn) z)` with `z = erfcinv(2p)`.
struct HopCost {
    c: f64,
    k: f64,
    sqrt_pn: f64,
}

impl HopCost {
    fn ber(s: f64) -> f64 {
        -0.5 * s.exp_m1()
    }

    fn z(s: f64) -> f64 {
        erfc_inv(-s.exp_m1())
    }

    fn value(&self, s: f64) -> f64 {
        let z = Self::z(s);
        self.c * (self.k * self.k * z * z + 2.0 * self.k * self.sqrt_pn * z)
    }

    /// First and second derivative in `s`.
    fn derivs(&self, s: f64) -> (f64, f64) {
        let z = Self::z(s);
        let zs = 0.5 * PI.sqrt() * (z * z + s).exp();
        let zss = zs * (2.0 * z * zs + 1.0);
        let g1 = 2.0 * self.k * self.k * z + 2.0 * self.k * self.sqrt_pn;
        let g2 = 2.0 * self.k * self.k;
        (self.c * g1 * zs, self.c * (g2 * zs * zs + g1 * zss))
    }
}

const MAX_ITER: usize = 10_000;
const KKT_TOL: f64 = 1e-8;
const BACKTRACK: f64 = 0.5;

/// Minimum total transmit power over a DF route with composite gains
/// `gains`, every hop carrying `rate`, subject to the end-to-end BER being
/// at most `ber_target`. Each hop's power must not exceed `max_power`.
///
/// Solved in log-parity coordinates where the end-to-end constraint is the
/// half-space `sum s_h >= ln(1 - 2 P)`; each step is a diagonally scaled
/// Newton step projected onto that half-space and the box, followed by a
/// backtracking line search.
pub fn min_power_df(
    gains: &[f64],
    rate: f64,
    ber_target: f64,
    model: &LinkModel,
    max_power: f64,
) -> Result<DfPowerSolution> {
    if gains.is_empty() {
        return Err(Error::domain("empty route"));
    }
    if gains.iter().any(|&g| !(g > 0.0)) {
        return Err(Error::infeasible("route has a zero-gain hop"));
    }
    if !(ber_target > 0.0 && ber_target <= 0.5) {
        return Err(Error::domain(format!("BER target {ber_target} outside (0, 0.5]")));
    }
    let o = &model.optics;
    let k = ber_amplitude(rate, 0.25, model.wavelength(), o.eta_d)? / erfc_inv(0.5);
    let sqrt_pn = model.noise.power_w.sqrt();
    let hops: Vec<HopCost> = gains
        .iter()
        .map(|&g| HopCost {
            c: 1.0 / (g * o.eta_t * o.eta_r),
            k,
            sqrt_pn,
        })
        .collect();
    let h = hops.len();
    let lo = (1.0 - 2.0 * BER_CEILING).ln();
    let hi = (-2.0 * f64::MIN_POSITIVE).ln_1p().min(-1e-300);
    let target = (-2.0 * ber_target.min(BER_CEILING)).ln_1p();

    let finish = |s: Vec<f64>, iterations: usize, kkt: f64| -> Result<DfPowerSolution> {
        let powers: Vec<f64> = hops.iter().zip(&s).map(|(c, &x)| c.value(x)).collect();
        if let Some(p) = powers.iter().find(|&&p| p > max_power) {
            return Err(Error::infeasible(format!(
                "hop power {p} W exceeds the {max_power} W cap"
            )));
        }
        Ok(DfPowerSolution {
            bers: s.iter().map(|&x| HopCost::ber(x)).collect(),
            total_w: powers.iter().sum(),
            powers,
            iterations,
            kkt_residual: kkt,
        })
    };

    if target <= lo * h as f64 {
        return finish(vec![lo; h], 0, 0.0);
    }
    if h == 1 {
        let p = model.min_tx_power(gains[0], rate, ber_target)?;
        if p > max_power {
            return Err(Error::infeasible(format!(
                "hop power {p} W exceeds the {max_power} W cap"
            )));
        }
        return Ok(DfPowerSolution {
            bers: vec![ber_target],
            powers: vec![p],
            total_w: p,
            iterations: 0,
            kkt_residual: 0.0,
        });
    }

    let objective = |s: &[f64]| -> f64 { hops.iter().zip(s).map(|(c, &x)| c.value(x)).sum() };
    let mut s = vec![target / h as f64; h];
    let mut f = objective(&s);

    for iter in 0..MAX_ITER {
        let (g, d): (Vec<f64>, Vec<f64>) = hops.iter().zip(&s).map(|(c, &x)| c.derivs(x)).unzip();
        let kkt = kkt_residual(&s, &g, lo, hi);
        if kkt <= KKT_TOL {
            return finish(s, iter, kkt);
        }
        let step_to = projected_newton_target(&s, &g, &d, lo, hi, target);
        let dir: Vec<f64> = step_to.iter().zip(&s).map(|(a, b)| a - b).collect();
        let slope: f64 = g.iter().zip(&dir).map(|(a, b)| a * b).sum();
        let mut t = 1.0;
        let mut accepted = false;
        while t > 1e-20 {
            let trial: Vec<f64> = s.iter().zip(&dir).map(|(x, dx)| x + t * dx).collect();
            let ft = objective(&trial);
            // the Hessian is exactly diagonal, so a full step whose change
            // is lost in rounding of the objective is still a Newton step
            let flat = t == 1.0 && (ft - f).abs() <= 8.0 * f64::EPSILON * f.abs();
            if ft <= f + 1e-4 * t * slope.min(0.0) || flat {
                s = trial;
                f = ft;
                accepted = true;
                break;
            }
            t *= BACKTRACK;
        }
        if !accepted {
            // no descent left at machine precision
            let (g, _): (Vec<f64>, Vec<f64>) = hops.iter().zip(&s).map(|(c, &x)| c.derivs(x)).unzip();
            let kkt = kkt_residual(&s, &g, lo, hi);
            if kkt <= KKT_TOL {
                return finish(s, iter, kkt);
            }
            return Err(Error::Solver(format!("line search stalled at KKT residual {kkt:e}")));
        }
    }
    Err(Error::Solver(format!("no convergence in {MAX_ITER} iterations")))
}

/// Relative spread of marginal costs over hops strictly inside the box,
/// plus sign violations at clamped hops.
fn kkt_residual(s: &[f64], g: &[f64], lo: f64, hi: f64) -> f64 {
    let free: Vec<f64> = s
        .iter()
        .zip(g)
        .filter(|(&x, _)| x > lo && x < hi)
        .map(|(_, &gi)| gi)
        .collect();
    if free.is_empty() {
        return 0.0;
    }
    let max = free.iter().copied().fold(f64::MIN, f64::max);
    let min = free.iter().copied().fold(f64::MAX, f64::min);
    let mean = free.iter().sum::<f64>() / free.len() as f64;
    let mut r = (max - min) / mean.abs();
    for (&x, &gi) in s.iter().zip(g) {
        if x <= lo && gi < min {
            r = r.max((min - gi) / mean.abs());
        }
        if x >= hi && gi > max {
            r = r.max((gi - max) / mean.abs());
        }
    }
    r
}

/// Minimiser of the diagonal quadratic model over `{sum x = target} ∩ box`.
fn projected_newton_target(s: &[f64], g: &[f64], d: &[f64], lo: f64, hi: f64, target: f64) -> Vec<f64> {
    let at = |lambda: f64| -> Vec<f64> {
        s.iter()
            .zip(g.iter().zip(d))
            .map(|(&x, (&gi, &di))| (x + (lambda - gi) / di).clamp(lo, hi))
            .collect()
    };
    let sum = |v: &[f64]| v.iter().sum::<f64>();
    let mut a = s
        .iter()
        .zip(g.iter().zip(d))
        .map(|(&x, (&gi, &di))| gi + di * (lo - x))
        .fold(f64::MAX, f64::min);
    let mut b = s
        .iter()
        .zip(g.iter().zip(d))
        .map(|(&x, (&gi, &di))| gi + di * (hi - x))
        .fold(f64::MIN, f64::max);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if sum(&at(m)) < target {
            a = m;
        } else {
            b = m;
        }
    }
    at(b)
}

/// Largest common rate a fixed-power DF route supports at end-to-end BER
/// `ber_target`, with per-hop BERs at that rate.
#[derive(Debug, Clone, PartialEq)]
pub struct DfRateSolution {
    pub rate_bps: f64,
    pub bers: Vec<f64>,
    pub e2e_ber: f64,
}

pub fn max_rate_df(gains: &[f64], pt: f64, ber_target: f64, model: &LinkModel) -> Result<DfRateSolution> {
    if gains.is_empty() {
        return Err(Error::domain("empty route"));
    }
    if !(ber_target > 0.0 && ber_target <= 0.5) {
        return Err(Error::domain(format!("BER target {ber_target} outside (0, 0.5]")));
    }
    if gains.iter().any(|&g| !(g > 0.0)) || !(pt > 0.0) {
        return Err(Error::infeasible("route has a zero-gain hop"));
    }
    let received: Vec<f64> = gains.iter().map(|&g| model.received_power(pt, g)).collect();
    let bers_at = |rate: f64| -> Result<Vec<f64>> { received.iter().map(|&pr| model.ber(pr, rate)).collect() };
    let weakest = received.iter().copied().fold(f64::MAX, f64::min);
    let mut hi = model.rate(weakest, ber_target)?;
    if gains.len() == 1 {
        let bers = bers_at(hi)?;
        return Ok(DfRateSolution {
            rate_bps: hi,
            e2e_ber: bers[0],
            bers,
        });
    }
    let mut lo = model.rate(weakest, ber_target / gains.len() as f64)?;
    if !(lo > 0.0 && hi.is_finite()) {
        return Err(Error::infeasible("no positive rate meets the BER target"));
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if !(mid > lo && mid < hi) {
            break;
        }
        if e2e_ber_df(&bers_at(mid)?) <= ber_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let bers = bers_at(lo)?;
    Ok(DfRateSolution {
        rate_bps: lo,
        e2e_ber: e2e_ber_df(&bers),
        bers,
    })
}
