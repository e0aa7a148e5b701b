//! C ABI over the `uowc` simulator.
//!
//! Every fallible function returns a [`UowcStatus`]; on failure a message
//! describing the error is available from [`uowc_last_error`] on the same
//! thread. Configurations and campaigns are opaque handles owned by the
//! caller and released with their `_free` function. Panics never cross the
//! boundary; they surface as [`UowcStatus::Panic`].
#![allow(clippy::missing_safety_doc, clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use uowc::config::Config;
use uowc::lipar::FailReason;
use uowc::pointing::PointingCase;
use uowc::routing::{Objective, Scheme};
use uowc::sim::{self, Campaign, AGGREGATE_HEADER, FAILURE_HEADER, TRIAL_HEADER};
use uowc::{relay_af, relay_df, special, Error};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UowcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Domain = 4,
    Infeasible = 5,
    NoRoute = 6,
    Solver = 7,
    Io = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UowcScheme {
    Df = 0,
    Af = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UowcPointingCase {
    PerfectPat = 1,
    UncertainPat = 2,
    NoPat = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UowcObjective {
    Ber = 0,
    Rate = 1,
    Power = 2,
    Lipar = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UowcFailReason {
    None = 0,
    Disconnected = 1,
    InfeasibleTarget = 2,
    DeadEnd = 3,
    HopBudget = 4,
}

/// Geometry and budget of one link.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct UowcLinkBudget {
    pub distance_m: f64,
    pub phi_rad: f64,
    pub psi_rad: f64,
    pub theta_half_rad: f64,
    pub gain: f64,
    pub received_w: f64,
    pub p0: f64,
    pub p1: f64,
    pub ber: f64,
    pub rate_bps: f64,
}

/// Outcome of one Monte Carlo trial. Path metrics are NaN on failure.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UowcTrialResult {
    pub success: bool,
    pub fail_reason: UowcFailReason,
    pub hops: u32,
    pub e2e_ber: f64,
    pub e2e_rate_bps: f64,
    pub total_power_w: f64,
    pub bsr: f64,
}

/// Campaign aggregate; means are over successful trials.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UowcAggregate {
    pub trials: u64,
    pub fail_frac: f64,
    pub mean_hops: f64,
    pub mean_rate_bps: f64,
    pub mean_power_w: f64,
    pub mean_bsr: f64,
    pub stderr_rate: f64,
    pub stderr_power: f64,
}

/// Opaque simulator configuration.
pub struct UowcConfig(Config);

/// Opaque result of a campaign.
pub struct UowcCampaign(Campaign);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn uowc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

struct Fail(UowcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) => UowcStatus::Domain,
            Error::Infeasible(_) => UowcStatus::Infeasible,
            Error::NoRoute => UowcStatus::NoRoute,
            Error::Solver(_) => UowcStatus::Solver,
            Error::Config { .. } => UowcStatus::Config,
            Error::Io(_) => UowcStatus::Io,
        };
        Fail(code, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(UowcStatus::NullPointer, format!("{what} is NULL"))
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> UowcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => UowcStatus::Ok,
        Ok(Err(Fail(code, msg))) => {
            set_last_error(msg);
            code
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("panic: {msg}"));
            UowcStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(UowcStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn slice_arg<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

impl From<UowcScheme> for Scheme {
    fn from(s: UowcScheme) -> Self {
        match s {
            UowcScheme::Df => Scheme::Df,
            UowcScheme::Af => Scheme::Af,
        }
    }
}

impl From<UowcPointingCase> for PointingCase {
    fn from(c: UowcPointingCase) -> Self {
        match c {
            UowcPointingCase::PerfectPat => PointingCase::PerfectPat,
            UowcPointingCase::UncertainPat => PointingCase::UncertainPat,
            UowcPointingCase::NoPat => PointingCase::NoPat,
        }
    }
}

impl From<UowcObjective> for Objective {
    fn from(o: UowcObjective) -> Self {
        match o {
            UowcObjective::Ber => Objective::Ber,
            UowcObjective::Rate => Objective::Rate,
            UowcObjective::Power => Objective::Power,
            UowcObjective::Lipar => Objective::Lipar,
        }
    }
}

impl From<Option<FailReason>> for UowcFailReason {
    fn from(r: Option<FailReason>) -> Self {
        match r {
            None => UowcFailReason::None,
            Some(FailReason::Disconnected) => UowcFailReason::Disconnected,
            Some(FailReason::InfeasibleTarget) => UowcFailReason::InfeasibleTarget,
            Some(FailReason::DeadEnd) => UowcFailReason::DeadEnd,
            Some(FailReason::HopBudget) => UowcFailReason::HopBudget,
        }
    }
}

/// New configuration holding the defaults. Never NULL.
#[no_mangle]
pub extern "C" fn uowc_config_new() -> *mut UowcConfig {
    Box::into_raw(Box::new(UowcConfig(Config::default())))
}

/// Parses TOML text into a new configuration stored in `*out`.
#[no_mangle]
pub unsafe extern "C" fn uowc_config_from_toml(toml: *const c_char, out: *mut *mut UowcConfig) -> UowcStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let cfg: Config = str_arg(toml, "toml")?.parse()?;
        *out = Box::into_raw(Box::new(UowcConfig(cfg)));
        Ok(())
    })
}

/// Sets one configuration key from its text value; the configuration is
/// left unchanged on error.
#[no_mangle]
pub unsafe extern "C" fn uowc_config_set(cfg: *mut UowcConfig, key: *const c_char, value: *const c_char) -> UowcStatus {
    guard(|| {
        let cfg = out_arg(cfg, "cfg")?;
        let (key, value) = (str_arg(key, "key")?, str_arg(value, "value")?);
        let mut next = cfg.0.clone();
        next.set(key, value)?;
        cfg.0 = next;
        Ok(())
    })
}

/// Releases a configuration; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn uowc_config_free(cfg: *mut UowcConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Budget of a link of length `distance_m` whose receiver sits `offset_rad`
/// off the transmitter's pointing line, at the configured transmit power.
#[no_mangle]
pub unsafe extern "C" fn uowc_link_budget(
    cfg: *const UowcConfig,
    distance_m: f64,
    pointing_case: UowcPointingCase,
    offset_rad: f64,
    out: *mut UowcLinkBudget,
) -> UowcStatus {
    guard(|| {
        let cfg = ref_arg(cfg, "cfg")?;
        let out = out_arg(out, "out")?;
        let (geo, b) = sim::single_link(&cfg.0, distance_m, pointing_case.into(), offset_rad)?;
        *out = UowcLinkBudget {
            distance_m: geo.distance,
            phi_rad: geo.phi,
            psi_rad: geo.psi,
            theta_half_rad: geo.theta_half,
            gain: b.gain,
            received_w: b.received_w,
            p0: b.p0,
            p1: b.p1,
            ber: b.ber,
            rate_bps: b.rate_bps,
        };
        Ok(())
    })
}

/// Runs trial `index` of the configured seed. A routing failure is not an
/// error: it returns `Ok` with `success == false` and the reason set.
#[no_mangle]
pub unsafe extern "C" fn uowc_run_trial(
    cfg: *const UowcConfig,
    objective: UowcObjective,
    scheme: UowcScheme,
    pointing_case: UowcPointingCase,
    index: u64,
    out: *mut UowcTrialResult,
) -> UowcStatus {
    guard(|| {
        let cfg = ref_arg(cfg, "cfg")?;
        let out = out_arg(out, "out")?;
        cfg.0.validate()?;
        let r = sim::run_trial(&cfg.0, objective.into(), scheme.into(), pointing_case.into(), index);
        *out = match r.path() {
            Some(p) => UowcTrialResult {
                success: true,
                fail_reason: UowcFailReason::None,
                hops: p.hops() as u32,
                e2e_ber: p.e2e_ber,
                e2e_rate_bps: p.e2e_rate,
                total_power_w: p.total_power,
                bsr: p.bsr,
            },
            None => UowcTrialResult {
                success: false,
                fail_reason: r.fail_reason().into(),
                hops: 0,
                e2e_ber: f64::NAN,
                e2e_rate_bps: f64::NAN,
                total_power_w: f64::NAN,
                bsr: f64::NAN,
            },
        };
        Ok(())
    })
}

/// Runs the configured number of trials in parallel; the result is stored
/// in `*out` and is identical for any thread count.
#[no_mangle]
pub unsafe extern "C" fn uowc_campaign_run(
    cfg: *const UowcConfig,
    objective: UowcObjective,
    scheme: UowcScheme,
    pointing_case: UowcPointingCase,
    out: *mut *mut UowcCampaign,
) -> UowcStatus {
    guard(|| {
        let cfg = ref_arg(cfg, "cfg")?;
        let out = out_arg(out, "out")?;
        cfg.0.validate()?;
        let c = sim::run_campaign(&cfg.0, objective.into(), scheme.into(), pointing_case.into());
        *out = Box::into_raw(Box::new(UowcCampaign(c)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn uowc_campaign_aggregate(campaign: *const UowcCampaign, out: *mut UowcAggregate) -> UowcStatus {
    guard(|| {
        let a = &ref_arg(campaign, "campaign")?.0.aggregate;
        *out_arg(out, "out")? = UowcAggregate {
            trials: a.trials as u64,
            fail_frac: a.fail_frac,
            mean_hops: a.mean_hops,
            mean_rate_bps: a.mean_rate_bps,
            mean_power_w: a.mean_power_w,
            mean_bsr: a.mean_bsr,
            stderr_rate: a.stderr_rate,
            stderr_power: a.stderr_power,
        };
        Ok(())
    })
}

/// Writes `aggregate.csv`, `trials.csv` and `failures.csv` into `dir`,
/// creating it if needed.
#[no_mangle]
pub unsafe extern "C" fn uowc_campaign_write_csv(campaign: *const UowcCampaign, dir: *const c_char) -> UowcStatus {
    guard(|| {
        let c = &ref_arg(campaign, "campaign")?.0;
        let dir = Path::new(str_arg(dir, "dir")?);
        let io = |e: std::io::Error| Fail::from(Error::from(e));
        fs::create_dir_all(dir).map_err(io)?;
        let files = [
            (
                "aggregate.csv",
                AGGREGATE_HEADER,
                format!("{}\n", c.aggregate.csv_row()),
            ),
            ("trials.csv", TRIAL_HEADER, c.trials_csv()),
            ("failures.csv", FAILURE_HEADER, c.failures_csv()),
        ];
        for (name, header, body) in files {
            fs::write(dir.join(name), format!("{header}\n{body}")).map_err(io)?;
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn uowc_campaign_free(campaign: *mut UowcCampaign) {
    if !campaign.is_null() {
        drop(Box::from_raw(campaign));
    }
}

/// End-to-end BER of a decode-and-forward chain with hop BERs `bers`.
#[no_mangle]
pub unsafe extern "C" fn uowc_e2e_ber_df(bers: *const f64, len: usize, out: *mut f64) -> UowcStatus {
    guard(|| {
        let bers = slice_arg(bers, len, "bers")?;
        let out = out_arg(out, "out")?;
        if bers.iter().any(|b| !(0.0..=0.5).contains(b)) {
            return Err(Error::Domain("hop BERs must lie in [0, 0.5]".into()).into());
        }
        *out = relay_df::e2e_ber_df(bers);
        Ok(())
    })
}

/// Sink SNR of an amplify-and-forward chain with hop SNRs `gammas`.
#[no_mangle]
pub unsafe extern "C" fn uowc_sink_snr(gammas: *const f64, len: usize, out: *mut f64) -> UowcStatus {
    guard(|| {
        let gammas = slice_arg(gammas, len, "gammas")?;
        let out = out_arg(out, "out")?;
        if gammas.is_empty() || gammas.iter().any(|g| !(*g > 0.0)) {
            return Err(Error::Domain("need at least one positive hop SNR".into()).into());
        }
        *out = relay_af::sink_snr(gammas);
        Ok(())
    })
}

/// Principal branch of the Lambert W function.
#[no_mangle]
pub unsafe extern "C" fn uowc_lambert_w0(x: f64, out: *mut f64) -> UowcStatus {
    guard(|| {
        *out_arg(out, "out")? = special::lambert_w0(x)?;
        Ok(())
    })
}
