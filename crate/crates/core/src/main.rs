use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use savanna_pulse::closed_form::{grassland_orbit_with, solve_savanna_with, OrbitKind, DEFAULT_H_SCAN};
use savanna_pulse::config::{Meta, OrbitSpec, ScenarioConfig, SweepSpec, DEFAULT_HORIZON};
use savanna_pulse::output::{write_basin, write_orbit, write_sweep, write_trajectory};
use savanna_pulse::presets::{preset, presets};
use savanna_pulse::simulate::{
    basin_map, parameter_sweep, run, Scheme, SweptParam, DEFAULT_PROBES,
};
use savanna_pulse::stability::{
    classify_regime, compute_thresholds, grassland_floquet, savanna_floquet, trivial_equilibria_eigenvalues,
};
use savanna_pulse::{apply_impulse, Error, Model, OmegaArg, State};

#[derive(Parser, Debug)]
#[command(name = "savanna-pulse", version, about = "Tree-grass dynamics under periodic pulse fires")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Scenario JSON file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Built-in parameter set (see `presets list`).
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Grass quantity that drives fire intensity.
    #[arg(long, global = true, value_enum)]
    omega_arg: Option<OmegaChoice>,
    /// Integration step in years (default τ/1000).
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Number of fire periods to simulate.
    #[arg(long, global = true)]
    horizon: Option<usize>,
    /// Output directory for CSV and scenario files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[arg(long, global = true, allow_hyphen_values = true)]
    gamma_tg: Option<f64>,
    #[arg(long, global = true)]
    lambda_fg: Option<f64>,
    #[arg(long, global = true)]
    lambda_ft: Option<f64>,
    #[arg(long, global = true)]
    tau: Option<f64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OmegaChoice {
    Burnt,
    Standing,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SchemeChoice {
    Nsfd,
    Reference,
    ClosedForm,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq)]
enum OrbitChoice {
    Auto,
    Grassland,
    Savanna,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the threshold quantities as JSON.
    Thresholds,
    /// Print the regime case and per-equilibrium verdicts as JSON.
    Classify {
        /// Print only the case label.
        #[arg(long)]
        label_only: bool,
    },
    /// Simulate trajectories and write `trajectory*.csv`.
    Simulate {
        #[arg(long, value_enum)]
        scheme: Option<SchemeChoice>,
        /// Initial state as `G,T`; may be repeated.
        #[arg(long = "initial", value_parser = parse_pair)]
        initial: Vec<(f64, f64)>,
    },
    /// Sample a periodic orbit over one period and write `orbit.csv`.
    Orbit {
        #[arg(long, value_enum, default_value = "auto")]
        kind: OrbitChoice,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Classify the attractor reached from a grid of initial states; writes `basin.csv`.
    Basin {
        #[arg(long)]
        n_g: Option<usize>,
        #[arg(long)]
        n_t: Option<usize>,
        #[arg(long)]
        max_periods: Option<usize>,
        #[arg(long, value_enum)]
        scheme: Option<SchemeChoice>,
    },
    /// Vary one parameter and write `sweep.csv`.
    Sweep {
        /// One of gamma_TG, tau, lambda_fT, lambda_fG.
        #[arg(long)]
        param: Option<String>,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Option<Vec<f64>>,
    },
    /// Built-in parameter sets.
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand, Debug)]
enum PresetAction {
    List,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected G,T but got `{s}`"))?;
    let g = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let t = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((g, t))
}

enum Failure {
    Config(String),
    Model(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Model(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) | Failure::Io(_) => 2,
            Failure::Model(e) if e.is_config_error() => 2,
            Failure::Model(e) if e.is_existence_error() => 3,
            Failure::Model(_) => 4,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Config(s) => format!("configuration error: {s}"),
            Failure::Io(s) => format!("i/o error: {s}"),
            Failure::Model(e) => e.to_string(),
        }
    }
}

fn load_scenario(g: &Global) -> Result<ScenarioConfig, Failure> {
    let mut cfg = match (&g.config, &g.preset) {
        (Some(_), Some(_)) => {
            return Err(Failure::Config("use either --config or --preset, not both".into()));
        }
        (Some(path), None) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
            ScenarioConfig::from_json(&text)?
        }
        (None, Some(name)) => {
            let p = preset(name).ok_or_else(|| Failure::Config(format!("unknown preset `{name}`")))?;
            let mut c = ScenarioConfig::new(p.params);
            c.region = Some(p.region);
            c
        }
        (None, None) => return Err(Failure::Config("one of --config or --preset is required".into())),
    };
    if let Some(o) = g.omega_arg {
        cfg.params.omega_arg_convention = match o {
            OmegaChoice::Burnt => OmegaArg::BurntGrass,
            OmegaChoice::Standing => OmegaArg::StandingGrass,
        };
    }
    if let Some(v) = g.gamma_tg {
        cfg.params.gamma_tg = v;
    }
    if let Some(v) = g.lambda_fg {
        cfg.params.lambda_fg = v;
    }
    if let Some(v) = g.lambda_ft {
        cfg.params.lambda_ft = v;
    }
    if let Some(v) = g.tau {
        cfg.params.tau = v;
    }
    if g.dt.is_some() {
        cfg.dt = g.dt;
    }
    if g.horizon.is_some() {
        cfg.horizon = g.horizon;
    }
    cfg.meta = None;
    Ok(cfg)
}

fn scheme_of(c: SchemeChoice) -> Scheme {
    match c {
        SchemeChoice::Nsfd => Scheme::Nsfd,
        SchemeChoice::Reference => Scheme::Reference,
        SchemeChoice::ClosedForm => Scheme::ClosedForm,
    }
}

fn reproduction(cfg: &ScenarioConfig, command: &str) -> ScenarioConfig {
    let mut c = cfg.clone();
    c.meta = Some(Meta {
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.to_string(),
        note: "deterministic: no random seeds; rerun with --config on this file".to_string(),
    });
    c
}

fn write_scenario(out: &Path, cfg: &ScenarioConfig, command: &str) -> Result<(), Failure> {
    let path = out.join("scenario.json");
    fs::write(&path, reproduction(cfg, command).to_json() + "\n")?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn create(out: &Path, name: &str) -> Result<BufWriter<File>, Failure> {
    fs::create_dir_all(out)?;
    let path = out.join(name);
    eprintln!("wrote {}", path.display());
    Ok(BufWriter::new(File::create(path)?))
}

fn print_json(v: &serde_json::Value) {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let _ = serde_json::to_writer_pretty(&mut lock, v);
    let _ = writeln!(lock);
}

fn execute(cli: Cli) -> Result<(), Failure> {
    if let Command::Presets { action: PresetAction::List } = cli.command {
        let list = serde_json::to_value(presets()).expect("presets serialize");
        print_json(&list);
        return Ok(());
    }
    let mut cfg = load_scenario(&cli.global)?;
    let out = cli.global.out.clone();
    match cli.command {
        Command::Thresholds => {
            for w in cfg.validate()? {
                eprintln!("warning: {w}");
            }
            let m = Model::new(cfg.params)?;
            let orbit = solve_savanna_with(&m, DEFAULT_H_SCAN, 1).ok();
            let t = compute_thresholds(&m, orbit.as_ref());
            print_json(&json!({
                "omega_arg": cfg.params.omega_arg_convention.as_str(),
                "derived": m.derived,
                "thresholds": t,
                "scenario": reproduction(&cfg, "thresholds"),
            }));
        }
        Command::Classify { label_only } => {
            for w in cfg.validate()? {
                eprintln!("warning: {w}");
            }
            let m = Model::new(cfg.params)?;
            let c = classify_regime(&m);
            if label_only {
                println!("{}", c.case_label);
            } else {
                print_json(&json!({
                    "case": c.case_label,
                    "omega_arg": cfg.params.omega_arg_convention.as_str(),
                    "equilibria": c.equilibria,
                    "boundary": c.boundary,
                    "thresholds": c.thresholds,
                    "eigenvalues": trivial_equilibria_eigenvalues(&m),
                    "scenario": reproduction(&cfg, "classify"),
                }));
            }
        }
        Command::Simulate { scheme, initial } => {
            if let Some(s) = scheme {
                cfg.scheme = scheme_of(s);
            }
            let m = Model::new(cfg.params)?;
            if !initial.is_empty() {
                cfg.initial_conditions = initial.iter().map(|&(g, t)| State::at(g, t)).collect();
            }
            if cfg.initial_conditions.is_empty() {
                cfg.initial_conditions = vec![State::at(0.5 * m.derived.x_g, 0.5 * m.derived.y_t)];
            }
            cfg.horizon = Some(cfg.horizon.unwrap_or(DEFAULT_HORIZON));
            cfg.dt = Some(cfg.dt_for(m.tau()));
            for w in cfg.validate()? {
                eprintln!("warning: {w}");
            }
            let many = cfg.initial_conditions.len() > 1;
            for (k, s) in cfg.initial_conditions.iter().enumerate() {
                let traj = run(*s, &m, cfg.horizon.unwrap(), cfg.dt.unwrap(), cfg.scheme)?;
                let name = if many { format!("trajectory_{k}.csv") } else { "trajectory.csv".to_string() };
                write_trajectory(create(&out, &name)?, &traj)?;
            }
            write_scenario(&out, &cfg, "simulate")?;
        }
        Command::Orbit { kind, samples } => {
            let spec = OrbitSpec {
                samples: samples.or(cfg.orbit.map(|o| o.samples)).unwrap_or(OrbitSpec::default().samples),
            };
            cfg.orbit = Some(spec);
            for w in cfg.validate()? {
                eprintln!("warning: {w}");
            }
            let m = Model::new(cfg.params)?;
            let orbit = match kind {
                OrbitChoice::Grassland => grassland_orbit_with(&m, spec.samples)?,
                OrbitChoice::Savanna => solve_savanna_with(&m, DEFAULT_H_SCAN, spec.samples)?,
                OrbitChoice::Auto => solve_savanna_with(&m, DEFAULT_H_SCAN, spec.samples)
                    .or_else(|_| grassland_orbit_with(&m, spec.samples))?,
            };
            let floquet = match orbit.kind {
                OrbitKind::Grassland => grassland_floquet(&m)?,
                OrbitKind::Savanna => savanna_floquet(&orbit, &m)?,
            };
            let pre = orbit.pre_fire(&m)?;
            let post = apply_impulse(&pre, &m.params).0;
            write_orbit(create(&out, "orbit.csv")?, &orbit, &pre, &post)?;
            write_scenario(&out, &cfg, "orbit")?;
            print_json(&json!({
                "kind": orbit.kind,
                "post_fire": {"G": orbit.g_star, "T": orbit.t_star},
                "pre_fire": {"G": pre.grass, "T": pre.tree},
                "multipliers": [floquet.multipliers.0, floquet.multipliers.1],
                "stable": floquet.stable,
            }));
        }
        Command::Basin {
            n_g,
            n_t,
            max_periods,
            scheme,
        } => {
            let mut grid = cfg.basin.unwrap_or_default();
            if let Some(n) = n_g {
                grid.n_g = n;
            }
            if let Some(n) = n_t {
                grid.n_t = n;
            }
            let mut opts = cfg.detect.unwrap_or_default();
            if let Some(n) = max_periods {
                opts.max_periods = n;
            }
            if let Some(s) = scheme {
                opts.scheme = scheme_of(s);
            }
            if cfg.dt.is_some() {
                opts.dt = cfg.dt;
            }
            cfg.basin = Some(grid);
            cfg.detect = Some(opts);
            for w in cfg.validate()? {
                eprintln!("warning: {w}");
            }
            let m = Model::new(cfg.params)?;
            let b = basin_map(&m, &grid, &opts)?;
            write_basin(create(&out, "basin.csv")?, &b)?;
            write_scenario(&out, &cfg, "basin")?;
            let kinds: Vec<&str> = b.kinds().iter().map(|k| k.as_str()).collect();
            print_json(&json!({ "cells": b.cells.len(), "attractors": kinds }));
        }
        Command::Sweep { param, values } => {
            let mut spec = cfg.sweep.clone();
            if let Some(name) = param {
                let parameter = SweptParam::parse(&name)
                    .ok_or_else(|| Failure::Config(format!("cannot sweep `{name}`")))?;
                let keep = spec.as_ref().filter(|s| s.parameter == parameter).map(|s| s.values.clone());
                spec = Some(SweepSpec {
                    parameter,
                    values: keep.unwrap_or_default(),
                    probes: spec.and_then(|s| s.probes),
                });
            }
            let mut spec = spec.ok_or_else(|| Failure::Config("sweep needs --param or a sweep block".into()))?;
            if let Some(v) = values {
                spec.values = v;
            } else if spec.values.is_empty() {
                if let Some(p) = cli.global.preset.as_deref().and_then(preset) {
                    spec.values = match spec.parameter {
                        SweptParam::GammaTg => p.gamma_tg_panels,
                        SweptParam::Tau => p.tau_panels,
                        _ => Vec::new(),
                    };
                }
            }
            let mut opts = cfg.detect.unwrap_or_default();
            if cfg.dt.is_some() {
                opts.dt = cfg.dt;
            }
            cfg.detect = Some(opts);
            cfg.sweep = Some(spec.clone());
            for w in cfg.validate()? {
                eprintln!("warning: {w}");
            }
            let probes = spec.probes.clone().unwrap_or_else(|| DEFAULT_PROBES.to_vec());
            let rows = parameter_sweep(&cfg.params, spec.parameter, &spec.values, &probes, &opts);
            write_sweep(create(&out, "sweep.csv")?, &rows)?;
            write_scenario(&out, &cfg, "sweep")?;
            for row in &rows {
                match &row.outcome {
                    Ok(r) => println!("{} {}", row.value, r.regime.case_label),
                    Err(e) => println!("{} error: {e}", row.value),
                }
            }
        }
        Command::Presets { .. } => unreachable!(),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
