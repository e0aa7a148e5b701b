#![allow(clippy::neg_cmp_op_on_partial_ord)]
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use uowc::config::Config;
use uowc::geom::Vec2;
use uowc::plot::{build_chart, render_svg, AggregateTable};
use uowc::pointing::PointingCase;
use uowc::routing::{Objective, Scheme};
use uowc::sim::{
    analyze_points, equal_hop_study, generate_trial_network, route_topology, run_campaign, single_link,
    AGGREGATE_HEADER, FAILURE_HEADER, TRIAL_HEADER,
};
use uowc::Error;

/// Multihop underwater optical wireless link, relay and routing simulator.
#[derive(Parser, Debug)]
#[command(name = "uowc", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Number of relay nodes.
    #[arg(long, global = true)]
    n_nodes: Option<usize>,
    /// Number of surface sinks.
    #[arg(long, global = true)]
    n_sinks: Option<usize>,
    /// Monte Carlo trials per campaign.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Water type: pure, ocean or coastal.
    #[arg(long, global = true)]
    water: Option<String>,
    /// Override any config key, e.g. `--set tx_power_w=0.02`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Budget of a single link.
    Link {
        /// Link length (m).
        #[arg(long)]
        distance: f64,
        /// Pointing case: 1 (perfect), 2 (uncertain), 3 (none).
        #[arg(long)]
        case: Option<String>,
        /// Receiver offset from the sink line (rad).
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        offset: f64,
    },
    /// Analyse an explicit chain `x,y;x,y;...` from source to sink.
    Path {
        /// Node positions in metres, source first, sink last.
        #[arg(long, value_name = "X,Y;X,Y;...")]
        points: String,
        /// Relaying scheme: df or af.
        #[arg(long)]
        scheme: Option<String>,
        /// Pointing case: 1 (perfect), 2 (uncertain), 3 (none).
        #[arg(long)]
        case: Option<String>,
    },
    /// Route one seeded topology.
    Route {
        /// Objective: ber, rate, power or lipar.
        #[arg(long)]
        objective: Option<String>,
        /// Relaying scheme: df or af.
        #[arg(long)]
        scheme: Option<String>,
        /// Pointing case: 1 (perfect), 2 (uncertain), 3 (none).
        #[arg(long)]
        case: Option<String>,
        /// Trial index selecting the topology.
        #[arg(long, default_value_t = 0)]
        trial: u64,
    },
    /// Monte Carlo campaign; list arguments take comma-separated values.
    Campaign {
        /// Objectives: ber, rate, power, lipar.
        #[arg(long)]
        objective: Option<String>,
        /// Relaying schemes: df, af.
        #[arg(long)]
        scheme: Option<String>,
        /// Pointing cases: 1 (perfect), 2 (uncertain), 3 (none).
        #[arg(long)]
        case: Option<String>,
        /// Sweep a config key, e.g. `--sweep n_nodes=40,60,80`.
        #[arg(long, value_name = "KEY=V1,V2")]
        sweep: Vec<String>,
        /// Run the equal-hop-length study over these hop counts instead,
        /// e.g. `1-8` or `2,4,6`.
        #[arg(long, value_name = "HOPS")]
        equal_hop: Option<String>,
    },
    /// Render SVG charts from an aggregate CSV.
    Plot {
        /// Aggregate CSV written by `campaign`.
        #[arg(long)]
        input: PathBuf,
        /// Column for the x axis; defaults to the column that varies.
        #[arg(long)]
        x: Option<String>,
        /// Metric columns; defaults to all of them.
        #[arg(long)]
        y: Vec<String>,
    },
}

/// Compact float rendering; scientific outside [1e-3, 1e7).
fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-3..1e7).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } => 2,
        Error::Infeasible(_) | Error::NoRoute | Error::Domain(_) => 3,
        Error::Solver(_) => 4,
        Error::Io(_) => 1,
    }
}

fn split_kv(s: &str) -> Result<(&str, &str), Error> {
    s.split_once('=').ok_or_else(|| Error::Config {
        key: s.to_string(),
        msg: "expected KEY=VALUE".to_string(),
    })
}

fn load_config(c: &Common) -> Result<Config, Error> {
    let mut cfg = match &c.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(n) = c.n_nodes {
        cfg.set("n_nodes", &n.to_string())?;
    }
    if let Some(n) = c.n_sinks {
        cfg.set("n_sinks", &n.to_string())?;
    }
    if let Some(n) = c.trials {
        cfg.set("trials", &n.to_string())?;
    }
    if let Some(w) = &c.water {
        cfg.set("water_type", w)?;
    }
    for kv in &c.set {
        let (k, v) = split_kv(kv)?;
        cfg.set(k, v)?;
    }
    Ok(cfg)
}

fn list<T: std::str::FromStr<Err = Error>>(arg: &Option<String>, default: T) -> Result<Vec<T>, Error> {
    match arg {
        None => Ok(vec![default]),
        Some(s) => s.split(',').map(|v| v.trim().parse()).collect(),
    }
}

fn one<T: std::str::FromStr<Err = Error> + Copy>(arg: &Option<String>, default: T) -> Result<T, Error> {
    Ok(list(arg, default)?[0])
}

fn hop_list(s: &str) -> Result<Vec<usize>, Error> {
    let bad = || Error::Config {
        key: "--equal-hop".to_string(),
        msg: format!("expected a range like 1-8 or a list like 2,4, got `{s}`"),
    };
    let hops: Vec<usize> = if let Some((a, b)) = s.split_once('-') {
        let (a, b): (usize, usize) = (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        );
        (a..=b).collect()
    } else {
        s.split(',')
            .map(|v| v.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?
    };
    if hops.is_empty() || hops.contains(&0) {
        return Err(bad());
    }
    Ok(hops)
}

fn write_file(path: &Path, body: &str) -> Result<(), Error> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, body)?;
    Ok(())
}

fn cmd_link(cfg: &Config, distance: f64, case: PointingCase, offset: f64) -> Result<(), Error> {
    let (geo, b) = single_link(cfg, distance, case, offset)?;
    let model = cfg.link_model();
    let range = model.comm_range(cfg.tx_power_w, geo.theta_half, geo.phi, geo.psi)?;
    let min_power = model.min_tx_power(b.gain, cfg.rate_target_bps, cfg.ber_target)?;
    println!("case            {case}");
    println!("water           {}", cfg.water_type);
    println!("distance_m      {}", num(geo.distance));
    println!("phi_rad         {}", num(geo.phi));
    println!("psi_rad         {}", num(geo.psi));
    println!("theta_full_rad  {}", num(geo.theta_full));
    println!("theta_half_rad  {}", num(geo.theta_half));
    println!("gain            {}", num(b.gain));
    println!("received_w      {}", num(b.received_w));
    println!("p0              {}", num(b.p0));
    println!("p1              {}", num(b.p1));
    println!("ber             {}", num(b.ber));
    println!("rate_bps        {}", num(b.rate_bps));
    println!("min_tx_power_w  {}", num(min_power));
    println!("comm_range_m    {}", num(range));
    Ok(())
}

fn parse_points(s: &str) -> Result<Vec<Vec2>, Error> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (x, y) = p.split_once(',').ok_or_else(|| Error::Config {
                key: "--points".to_string(),
                msg: format!("bad point `{p}`"),
            })?;
            let num = |v: &str| {
                v.trim().parse::<f64>().map_err(|_| Error::Config {
                    key: "--points".to_string(),
                    msg: format!("bad coordinate `{v}`"),
                })
            };
            Ok(Vec2::new(num(x)?, num(y)?))
        })
        .collect()
}

fn cmd_path(cfg: &Config, points: &str, scheme: Scheme, case: PointingCase) -> Result<(), Error> {
    let pts = parse_points(points)?;
    let r = analyze_points(cfg, &pts, scheme, case)?;
    println!("hop,distance_m,phi_rad,theta_half_rad,gain,ber");
    for (i, (g, gain)) in r.geometry.iter().zip(&r.gains).enumerate() {
        println!(
            "{},{},{},{},{},{}",
            i + 1,
            g.distance,
            g.phi,
            g.theta_half,
            num(*gain),
            num(r.fixed.bers[i])
        );
    }
    println!("scheme          {scheme}");
    println!("e2e_ber         {}", num(r.fixed.e2e_ber));
    println!("e2e_bsr         {}", num(r.fixed.bsr));
    println!("max_rate_bps    {}", num(r.max_rate_bps));
    match &r.min_power {
        Some(p) => {
            println!("min_total_w     {}", num(p.total_power));
            let powers: Vec<String> = p.powers.iter().map(|&x| num(x)).collect();
            println!("min_hop_w       {}", powers.join(" "));
        }
        None => println!("min_total_w     infeasible"),
    }
    Ok(())
}

fn cmd_route(cfg: &Config, objective: Objective, scheme: Scheme, case: PointingCase, trial: u64) -> Result<(), Error> {
    let topo = generate_trial_network(cfg, trial);
    match route_topology(cfg, &topo, objective, scheme, case) {
        Ok(p) => {
            println!("objective {objective} scheme {scheme} case {case} trial {trial}");
            println!("vertex,x,y");
            for &v in &p.vertices {
                let e = topo.nodes[v].estimate;
                println!("{v},{},{}", e.x, e.y);
            }
            println!("hops            {}", p.hops());
            println!("e2e_ber         {}", num(p.e2e_ber));
            println!("e2e_bsr         {}", num(p.bsr));
            println!("e2e_rate_bps    {}", num(p.e2e_rate));
            println!("total_power_w   {}", num(p.total_power));
            Ok(())
        }
        Err(reason) => {
            println!("objective {objective} scheme {scheme} case {case} trial {trial}");
            println!("failed: {reason}");
            Err(Error::Infeasible(reason.to_string()))
        }
    }
}

/// Cartesian product of all sweep assignments.
fn sweep_points(sweeps: &[String]) -> Result<Vec<Vec<(String, String)>>, Error> {
    let mut points: Vec<Vec<(String, String)>> = vec![Vec::new()];
    for s in sweeps {
        let (k, vs) = split_kv(s)?;
        let mut next = Vec::new();
        for p in &points {
            for v in vs.split(',') {
                let mut q = p.clone();
                q.push((k.trim().to_string(), v.trim().to_string()));
                next.push(q);
            }
        }
        points = next;
    }
    Ok(points)
}

fn cmd_campaign(
    base: &Config,
    out: &Path,
    objectives: &[Objective],
    schemes: &[Scheme],
    cases: &[PointingCase],
    sweeps: &[String],
    equal_hop: Option<&str>,
) -> Result<(), Error> {
    let mut aggregate = format!("{AGGREGATE_HEADER}\n");
    let mut trials = format!("{TRIAL_HEADER}\n");
    let mut failures = format!("{FAILURE_HEADER}\n");
    let points = sweep_points(sweeps)?;
    for point in &points {
        let mut cfg = base.clone();
        for (k, v) in point {
            cfg.set(k, v)?;
        }
        if let Some(h) = equal_hop {
            let hops = hop_list(h)?;
            for &case in cases {
                for &scheme in schemes {
                    let t0 = Instant::now();
                    for row in equal_hop_study(&cfg, case, scheme, &hops)? {
                        aggregate.push_str(&row.csv_row());
                        aggregate.push('\n');
                    }
                    eprintln!(
                        "equal_hop scheme={scheme} case={case} {:?} {:.1}s",
                        point,
                        t0.elapsed().as_secs_f64()
                    );
                }
            }
            continue;
        }
        for &objective in objectives {
            for &scheme in schemes {
                for &case in cases {
                    let t0 = Instant::now();
                    let c = run_campaign(&cfg, objective, scheme, case);
                    aggregate.push_str(&c.aggregate.csv_row());
                    aggregate.push('\n');
                    trials.push_str(&c.trials_csv());
                    failures.push_str(&c.failures_csv());
                    eprintln!(
                        "{objective} scheme={scheme} case={case} {:?}: fail_frac={} mean_rate={} ({:.1}s)",
                        point,
                        c.aggregate.fail_frac,
                        c.aggregate.mean_rate_bps,
                        t0.elapsed().as_secs_f64()
                    );
                }
            }
        }
    }
    write_file(&out.join("aggregate.csv"), &aggregate)?;
    if equal_hop.is_none() {
        write_file(&out.join("trials.csv"), &trials)?;
        write_file(&out.join("failures.csv"), &failures)?;
    }
    print!("{aggregate}");
    Ok(())
}

fn cmd_plot(input: &Path, out: &Path, x: Option<&str>, ys: &[String]) -> Result<(), Error> {
    let text = fs::read_to_string(input)?;
    let table = AggregateTable::parse(&text)?;
    let x = x.map(str::to_string).unwrap_or_else(|| table.default_x());
    let ys: Vec<String> = if ys.is_empty() {
        ["fail_frac", "mean_hops", "mean_rate_bps", "mean_power_w", "mean_bsr"]
            .iter()
            .filter(|&&y| y != x)
            .map(|y| y.to_string())
            .collect()
    } else {
        ys.to_vec()
    };
    for y in &ys {
        let chart = build_chart(&table, &x, y)?;
        let path = out.join(format!("{y}_vs_{x}.svg"));
        write_file(&path, &render_svg(&chart))?;
        println!("{}", path.display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    let cfg = load_config(&cli.common)?;
    let out = &cli.common.out;
    match &cli.command {
        Command::Link { distance, case, offset } => cmd_link(&cfg, *distance, one(case, cfg.case)?, *offset),
        Command::Path { points, scheme, case } => {
            cmd_path(&cfg, points, one(scheme, cfg.scheme)?, one(case, cfg.case)?)
        }
        Command::Route {
            objective,
            scheme,
            case,
            trial,
        } => cmd_route(
            &cfg,
            one(objective, cfg.objective)?,
            one(scheme, cfg.scheme)?,
            one(case, cfg.case)?,
            *trial,
        ),
        Command::Campaign {
            objective,
            scheme,
            case,
            sweep,
            equal_hop,
        } => cmd_campaign(
            &cfg,
            out,
            &list(objective, cfg.objective)?,
            &list(scheme, cfg.scheme)?,
            &list(case, cfg.case)?,
            sweep,
            equal_hop.as_deref(),
        ),
        Command::Plot { input, x, y } => cmd_plot(input, out, x.as_deref(), y),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
