use std::collections::HashSet;

use uowc::config::Config;
use uowc::lipar::FailReason;
use uowc::plot::{build_chart, render_svg, AggregateTable};
use uowc::pointing::PointingCase;
use uowc::routing::{Objective, Scheme};
use uowc::sim::{
    generate_trial_network, run_campaign, sink_positions, trial_seed, Campaign, AGGREGATE_HEADER, TRIAL_HEADER,
};
use uowc::water::WaterType;
use uowc::Error;

#[test]
fn empty_config_is_table_defaults() {
    let c: Config = "".parse().unwrap();
    assert_eq!(c, Config::default());
    assert_eq!(c.tx_power_w, 0.01);
    assert_eq!((c.eta_t, c.eta_r, c.eta_d), (0.9, 0.9, 0.16));
    assert_eq!(c.pulse_s, 1e-9);
    assert_eq!(c.wavelength_m, 532e-9);
    assert_eq!(c.water_type, WaterType::Ocean);
    assert_eq!((c.n_nodes, c.n_sinks, c.area_m), (60, 3, 100.0));
    assert_eq!((c.ber_target, c.rate_target_bps), (1e-5, 1e9));
    assert_eq!((c.theta_min_rad, c.theta_max_rad), (0.01, 0.25));
    assert_eq!((c.frame_radius_m, c.uncertainty_m), (0.25, 0.75));
    assert_eq!(c.trials, 2000);
    assert_eq!(c.noise_power_dbm, -84.0);
}

#[test]
fn config_validation_names_the_key() {
    match "ber_target = 0.7".parse::<Config>() {
        Err(Error::Config { key, .. }) => assert_eq!(key, "ber_target"),
        other => panic!("{other:?}"),
    }
    match "wavelenght_m = 1e-7".parse::<Config>() {
        Err(Error::Config { key, .. }) => assert_eq!(key, "wavelenght_m"),
        other => panic!("{other:?}"),
    }
    assert!("n_nodes = -3".parse::<Config>().is_err());
    assert!("water_type = \"murky\"".parse::<Config>().is_err());
}

#[test]
fn config_set_and_roundtrip() {
    let mut c: Config = "n_nodes = 40\ncase = 3".parse().unwrap();
    assert_eq!(c.case, PointingCase::NoPat);
    c.set("n_nodes", "80").unwrap();
    c.set("water_type", "pure").unwrap();
    c.set("scheme", "af").unwrap();
    assert_eq!(c.n_nodes, 80);
    assert_eq!(c.water_type, WaterType::Pure);
    assert_eq!(c.scheme, Scheme::Af);
    assert!(c.set("ber_target", "0.9").is_err());
    assert!(c.set("bogus", "1").is_err());
    let back: Config = c.to_toml().parse().unwrap();
    assert_eq!(back, c);
}

#[test]
fn seeds_and_topologies_are_reproducible() {
    let seeds: HashSet<u64> = (0..10_000).map(|i| trial_seed(1, i)).collect();
    assert_eq!(seeds.len(), 10_000);
    assert_ne!(trial_seed(1, 5), trial_seed(2, 5));
    let cfg = Config::default();
    let a = generate_trial_network(&cfg, 17);
    let b = generate_trial_network(&cfg, 17);
    assert_eq!(a.nodes, b.nodes);
    assert_eq!(a.nodes.len(), 1 + cfg.n_nodes + cfg.n_sinks);
    let sinks = sink_positions(&cfg);
    for (k, &s) in a.sinks.iter().enumerate() {
        assert_eq!(a.nodes[s].estimate, sinks[k]);
        assert_eq!(a.nodes[s].uncertainty, 0.0);
    }
    for n in &a.nodes {
        assert!(n.estimate.distance(n.actual) <= cfg.uncertainty_m + 1e-12);
        assert!((0.0..=cfg.area_m).contains(&n.estimate.x));
        assert!((0.0..=cfg.area_m).contains(&n.estimate.y));
    }
}

fn campaign_in_pool(
    threads: usize,
    cfg: &Config,
    objective: Objective,
    scheme: Scheme,
    case: PointingCase,
) -> Campaign {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(|| run_campaign(cfg, objective, scheme, case))
}

#[test]
fn campaigns_are_independent_of_thread_count() {
    let cfg = Config {
        trials: 60,
        n_nodes: 40,
        ..Config::default()
    };
    for (objective, scheme, case) in [
        (Objective::Power, Scheme::Df, PointingCase::UncertainPat),
        (Objective::Power, Scheme::Af, PointingCase::PerfectPat),
        (Objective::Lipar, Scheme::Af, PointingCase::NoPat),
    ] {
        let one = campaign_in_pool(1, &cfg, objective, scheme, case);
        let four = campaign_in_pool(4, &cfg, objective, scheme, case);
        assert_eq!(one.trials_csv(), four.trials_csv());
        assert_eq!(one.failures_csv(), four.failures_csv());
        assert_eq!(one.aggregate.csv_row(), four.aggregate.csv_row());
    }
}

#[test]
fn aggregate_means_cover_successes() {
    let cfg = Config {
        trials: 200,
        ..Config::default()
    };
    let c = run_campaign(&cfg, Objective::Rate, Scheme::Df, PointingCase::NoPat);
    let ok: Vec<f64> = c.records.iter().filter_map(|r| r.path()).map(|p| p.e2e_rate).collect();
    let fails = c.records.iter().filter(|r| !r.success()).count();
    assert!(fails > 0 && !ok.is_empty());
    assert_eq!(c.aggregate.fail_frac, fails as f64 / 200.0);
    let mean = ok.iter().sum::<f64>() / ok.len() as f64;
    assert!((c.aggregate.mean_rate_bps - mean).abs() <= 1e-12 * mean);
    for r in &c.records {
        if let Some(reason) = r.fail_reason() {
            assert!(matches!(
                reason,
                FailReason::Disconnected | FailReason::InfeasibleTarget
            ));
        }
    }
    let failures = c.failures_csv();
    assert_eq!(failures.lines().count(), fails);
    assert!(failures
        .lines()
        .all(|l| l.ends_with(",disconnected") || l.ends_with(",infeasible_target")));
}

#[test]
fn aggregate_csv_feeds_plot() {
    let cfg = Config {
        trials: 30,
        ..Config::default()
    };
    let mut text = format!("{AGGREGATE_HEADER}\n");
    for scheme in Scheme::ALL {
        for case in PointingCase::ALL {
            text.push_str(&run_campaign(&cfg, Objective::Ber, scheme, case).aggregate.csv_row());
            text.push('\n');
        }
    }
    let table = AggregateTable::parse(&text).unwrap();
    assert_eq!(table.rows.len(), 6);
    let chart = build_chart(&table, "case", "fail_frac").unwrap();
    assert_eq!(chart.series.len(), 2);
    let svg = render_svg(&chart);
    assert!(svg.contains("<svg") && svg.contains("</svg>"));
    assert!(AggregateTable::parse(TRIAL_HEADER).is_err());
}
