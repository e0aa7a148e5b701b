use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use uowc::config::Config;
use uowc::pointing::PointingCase;
use uowc::routing::{Objective, Scheme};
use uowc::sim::{generate_trial_network, route_topology, single_link, AGGREGATE_HEADER, TRIAL_HEADER};

fn uowc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uowc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// `name value` lines of a key/value report.
fn fields(text: &str) -> HashMap<String, String> {
    text.lines()
        .filter_map(|l| {
            let mut it = l.split_whitespace();
            Some((it.next()?.to_string(), it.next()?.to_string()))
        })
        .collect()
}

#[test]
fn link_matches_library() {
    let o = uowc(&["link", "--distance", "10", "--case", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let f = fields(&stdout(&o));
    let (geo, b) = single_link(&Config::default(), 10.0, PointingCase::PerfectPat, 0.0).unwrap();
    let get = |k: &str| f[k].parse::<f64>().unwrap();
    assert_eq!(get("gain"), b.gain);
    assert_eq!(get("received_w"), b.received_w);
    assert_eq!(get("p0"), b.p0);
    assert_eq!(get("p1"), b.p1);
    assert_eq!(get("ber"), b.ber);
    assert_eq!(get("rate_bps"), b.rate_bps);
    assert_eq!(get("theta_half_rad"), geo.theta_half);
    assert_eq!(get("distance_m"), geo.distance);
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "water_type = \"coastal\"\ntx_power_w = 0.02\n").unwrap();
    let c = cfg.to_str().unwrap();
    let base = fields(&stdout(&uowc(&["link", "--distance", "5"])));
    let file = fields(&stdout(&uowc(&["--config", c, "link", "--distance", "5"])));
    assert_eq!(file["water"], "coastal");
    assert_ne!(file["received_w"], base["received_w"]);
    let flag = fields(&stdout(&uowc(&[
        "--config",
        c,
        "--water",
        "pure",
        "link",
        "--distance",
        "5",
    ])));
    assert_eq!(flag["water"], "pure");
}

#[test]
fn config_errors_exit_2() {
    let o = uowc(&["--set", "ber_target=0.7", "link", "--distance", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ber_target"));
    let o = uowc(&["--set", "no_such_key=1", "link", "--distance", "5"]);
    assert_eq!(o.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "colour = 3\n").unwrap();
    let o = uowc(&["--config", bad.to_str().unwrap(), "link", "--distance", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));
}

#[test]
fn infeasible_link_exits_3() {
    // a receiver inside its own frame radius cannot be covered
    let o = uowc(&["link", "--distance", "0.1", "--case", "2"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn route_is_deterministic() {
    let a = uowc(&["route", "--objective", "lipar", "--trial", "3"]);
    let b = uowc(&["route", "--objective", "lipar", "--trial", "3"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), b.status.code());
}

#[test]
fn route_failure_exits_3_with_reason() {
    let cfg = Config::default();
    let trial = (0..200)
        .find(|&i| {
            let topo = generate_trial_network(&cfg, i);
            route_topology(&cfg, &topo, Objective::Rate, Scheme::Df, PointingCase::NoPat).is_err()
        })
        .expect("some no-pointing trial fails");
    let o = uowc(&[
        "route",
        "--objective",
        "rate",
        "--case",
        "3",
        "--trial",
        &trial.to_string(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("failed: disconnected"));
}

#[test]
fn path_reports_every_hop() {
    let o = uowc(&["path", "--points", "0,0;0,15;0,30;0,45", "--scheme", "af"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(
        text.lines()
            .filter(|l| l.starts_with(|c: char| c.is_ascii_digit()))
            .count(),
        3
    );
    assert!(text.contains("scheme          af"));
}

fn run_campaign(out: &Path) -> Output {
    uowc(&[
        "--out",
        out.to_str().unwrap(),
        "--trials",
        "40",
        "--n-nodes",
        "40",
        "campaign",
        "--objective",
        "rate,lipar",
        "--scheme",
        "df,af",
        "--case",
        "2,3",
    ])
}

#[test]
fn campaign_then_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = run_campaign(&out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let agg = fs::read_to_string(out.join("aggregate.csv")).unwrap();
    assert_eq!(agg.lines().next(), Some(AGGREGATE_HEADER));
    assert_eq!(agg.lines().count(), 1 + 8);
    let trials = fs::read_to_string(out.join("trials.csv")).unwrap();
    assert_eq!(trials.lines().next(), Some(TRIAL_HEADER));
    assert_eq!(trials.lines().count(), 1 + 8 * 40);
    assert!(out.join("failures.csv").exists());

    let o = uowc(&[
        "--out",
        out.to_str().unwrap(),
        "plot",
        "--input",
        out.join("aggregate.csv").to_str().unwrap(),
        "--x",
        "scheme",
        "--y",
        "fail_frac",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let svg = fs::read_to_string(out.join("fail_frac_vs_scheme.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    assert!(svg.contains("</svg>"));

    // reruns are byte-identical
    let again = dir.path().join("again");
    assert!(run_campaign(&again).status.success());
    for f in ["aggregate.csv", "trials.csv", "failures.csv"] {
        assert_eq!(fs::read(out.join(f)).unwrap(), fs::read(again.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn sweep_and_equal_hop() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep");
    let o = uowc(&[
        "--out",
        out.to_str().unwrap(),
        "--trials",
        "20",
        "campaign",
        "--objective",
        "ber",
        "--sweep",
        "n_nodes=20,40",
        "--sweep",
        "water_type=pure,coastal",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let agg = fs::read_to_string(out.join("aggregate.csv")).unwrap();
    assert_eq!(agg.lines().count(), 1 + 4);
    assert!(agg.contains(",pure,20,") && agg.contains(",coastal,40,"));

    let o = uowc(&[
        "--out",
        out.to_str().unwrap(),
        "--trials",
        "20",
        "campaign",
        "--equal-hop",
        "1-4",
        "--case",
        "3",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let agg = fs::read_to_string(out.join("aggregate.csv")).unwrap();
    assert_eq!(agg.lines().filter(|l| l.starts_with("equal_hop")).count(), 4);
    let o = uowc(&[
        "--out",
        out.to_str().unwrap(),
        "plot",
        "--input",
        out.join("aggregate.csv").to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("mean_rate_bps_vs_mean_hops.svg").exists());
}

#[test]
fn plot_rejects_other_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("x.csv");
    fs::write(&bad, "a,b\n1,2\n").unwrap();
    let o = uowc(&[
        "--out",
        dir.path().to_str().unwrap(),
        "plot",
        "--input",
        bad.to_str().unwrap(),
    ]);
    assert!(!o.status.success());
}
