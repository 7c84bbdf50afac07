// Copyright 2026 The qar Authors
// SPDX-License-Identifier: Apache-2.0

//! Command-line front end. Exit codes: 0 success, 1 config or usage error,
//! 2 solver failure.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::config::{validate, MediumVariant, SystemConfig, Topology, ValidatedConfig};
use crate::io::{self, ConfigFile, IoError, OutputDir, RunManifest, StudyCount};
use crate::studies::{self, StudyError, SweepSpec};
use crate::thermo::{self, REPORT_CSV_HEADER};

#[derive(Debug, Parser)]
#[command(name = "qar", version, about = "Two-body quantum absorption refrigerator simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Config file (dotted key = value).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; without it results go to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for `sample` (overrides sample.seed).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Fixed oscillator truncation; disables automatic growth.
    #[arg(long, global = true)]
    pub truncation: Option<usize>,
    /// Overwrite an output directory that already holds a run.
    #[arg(long, global = true)]
    pub force: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Steady state of one configuration.
    Steady,
    /// Sweep one parameter (sweep.* keys).
    Sweep,
    /// Maximum cooling power over ω_c (maxpower.lo/hi, default: cooling window).
    Maxpower,
    /// Random efficiency-at-maximum-power campaign (sample.* keys).
    Sample,
    /// Power-efficiency loops with a heat leak (leak_curves.* keys).
    Leak,
    /// Maximum-power bound check in the swapped topology (swapped.* keys).
    Swapped,
    /// Validate the config and print its canonical form and hash.
    Validate,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Steady => "steady",
            Command::Sweep => "sweep",
            Command::Maxpower => "maxpower",
            Command::Sample => "sample",
            Command::Leak => "leak",
            Command::Swapped => "swapped",
            Command::Validate => "validate",
        }
    }
}

enum Failure {
    Config(String),
    Solver(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Config(_) => 1,
            Failure::Solver(_) => 2,
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<crate::config::ConfigError> for Failure {
    fn from(e: crate::config::ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<thermo::SolveError> for Failure {
    fn from(e: thermo::SolveError) -> Self {
        Failure::Solver(e.to_string())
    }
}

impl From<StudyError> for Failure {
    fn from(e: StudyError) -> Self {
        match e {
            StudyError::Config(c) => Failure::Config(c.to_string()),
            StudyError::Invalid(m) => Failure::Config(m),
            other => Failure::Solver(other.to_string()),
        }
    }
}

/// What a subcommand produced: rows for `rows.csv`, a JSON summary, and
/// optional extra files.
struct Output {
    rows_csv: String,
    summary: serde_json::Value,
    extra: Vec<(&'static str, String)>,
    counts: Vec<StudyCount>,
    warnings: Vec<String>,
}

fn json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("outputs serialize")
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), num)
}

fn load(cli: &Cli) -> Result<ConfigFile, Failure> {
    let path = cli.config.as_ref().ok_or_else(|| Failure::Config("--config <path> is required".into()))?;
    Ok(io::read_config(path)?)
}

fn system(cli: &Cli, file: &ConfigFile) -> Result<ValidatedConfig, Failure> {
    let mut c: SystemConfig = file.system.clone().ok_or_else(|| Failure::Config("MissingKey: the config has no system section".into()))?;
    if let Some(n) = cli.truncation {
        match c.medium.variant {
            MediumVariant::Tls => {}
            MediumVariant::Tlos => c.medium.truncation_b = n,
            MediumVariant::Oms => {
                c.medium.truncation_a = n;
                c.medium.truncation_b = n;
            }
        }
        c.medium.auto_truncation = false;
    }
    Ok(validate(c)?)
}

fn report_warnings(r: &thermo::SteadyStateReport) -> Vec<String> {
    let mut w = Vec::new();
    if !r.flags.weak_coupling_valid {
        w.push(format!("ValidityWarning: g = {} exceeds the weak-coupling range of {}", r.g, r.medium));
    }
    if r.flags.truncation_warning {
        w.push(format!("TruncationWarning: tail population {:e}", r.tail_population[0].max(r.tail_population[1])));
    }
    w
}

fn steady(cli: &Cli, file: &ConfigFile) -> Result<Output, Failure> {
    let cfg = system(cli, file)?;
    let r = thermo::solve(&cfg)?;
    Ok(Output {
        rows_csv: format!("{REPORT_CSV_HEADER}\n{}\n", r.csv_row()),
        summary: json(&r),
        extra: Vec::new(),
        counts: vec![StudyCount { study: "steady".into(), rows: 1, failures: 0 }],
        warnings: report_warnings(&r),
    })
}

fn sweep(cli: &Cli, file: &ConfigFile) -> Result<Output, Failure> {
    let cfg = system(cli, file)?;
    let s = file.studies.sweep.clone().ok_or_else(|| Failure::Config("MissingKey: sweep.param".into()))?;
    let res = studies::run_sweep(&SweepSpec { base: cfg, param: s.param, grid: s.grid, correlations: s.correlations })?;
    let mut warnings: Vec<String> = res.rows.iter().filter_map(|r| r.warning().map(|w| format!("row {}: {w}", r.index))).collect();
    warnings.extend(res.rows.iter().filter_map(|r| r.error.as_ref().map(|e| format!("row {}: {e}", r.index))));
    Ok(Output {
        rows_csv: res.csv(),
        summary: json(&res.summary),
        extra: Vec::new(),
        counts: vec![StudyCount { study: "sweep".into(), rows: res.rows.len(), failures: res.summary.failures }],
        warnings,
    })
}

const MAXPOWER_CSV_HEADER: &str = "omega_c_star,omega_c_dressed,J_c_star,eps_star,cop_ratio,carnot,bound,surpassed,evaluations";

fn maxpower_row(p: &studies::MaxPowerPoint) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        num(p.omega_c),
        num(p.omega_c_dressed),
        num(p.j_c),
        num(p.cop),
        num(p.cop_ratio),
        num(p.carnot),
        num(p.bound),
        p.surpassed,
        p.evaluations
    )
}

fn maxpower(cli: &Cli, file: &ConfigFile) -> Result<Output, Failure> {
    let cfg = system(cli, file)?;
    let (lo, hi) = match file.studies.maxpower {
        Some(x) => x,
        None => studies::search_interval(&cfg)?,
    };
    let p = studies::max_power_point(&cfg, lo, hi)?;
    Ok(Output {
        rows_csv: format!("{MAXPOWER_CSV_HEADER}\n{}\n", maxpower_row(&p)),
        summary: json(&p),
        extra: Vec::new(),
        counts: vec![StudyCount { study: "maxpower".into(), rows: 1, failures: 0 }],
        warnings: Vec::new(),
    })
}

#[derive(Serialize)]
struct SampleSummary<'a> {
    spec: &'a studies::SamplingSpec,
    successes: usize,
    failures: usize,
    surpassing_fraction: f64,
    max_ratio: f64,
    above_carnot: usize,
    near_carnot_ratio: f64,
    near_carnot_fit: Option<studies::PowerFit>,
}

fn sample(cli: &Cli, file: &ConfigFile) -> Result<Output, Failure> {
    let mut spec = file.studies.sample;
    if let Some(seed) = cli.seed {
        spec.seed = seed;
    }
    let res = studies::random_campaign(&spec);
    let summary = SampleSummary {
        spec: &res.spec,
        successes: res.rows.len() - res.failures,
        failures: res.failures,
        surpassing_fraction: res.surpassing_fraction,
        max_ratio: res.max_ratio,
        above_carnot: res.above_carnot,
        near_carnot_ratio: studies::NEAR_CARNOT_RATIO,
        near_carnot_fit: res.near_carnot_fit,
    };
    Ok(Output {
        rows_csv: res.csv(),
        summary: json(&summary),
        extra: vec![("hist.csv", res.histogram.csv())],
        counts: vec![StudyCount { study: "sample".into(), rows: res.rows.len(), failures: res.failures }],
        warnings: res.rows.iter().filter_map(|r| r.error.as_ref().map(|e| format!("sample {}: {e}", r.sample.index))).collect(),
    })
}

#[derive(Serialize)]
struct LeakSummary {
    g: f64,
    j_0: f64,
    max_cop_ratio: Option<f64>,
    gap: Option<f64>,
    closed: bool,
}

fn leak(cli: &Cli, file: &ConfigFile) -> Result<Output, Failure> {
    let cfg = system(cli, file)?;
    let st = &file.studies;
    let curves = studies::leak_curves(&cfg, &st.leak_g, st.leak_target, st.leak_points)?;
    let mut csv = String::from("g,omega_c,J_c,J_c_over_J_0,cop_ratio\n");
    for c in &curves {
        for p in &c.points {
            csv.push_str(&format!("{},{},{},{},{}\n", num(c.g), num(p.omega_c), num(p.j_c), num(p.j_c / c.j_0), opt(p.cop_ratio)));
        }
    }
    let summary: Vec<LeakSummary> = curves
        .iter()
        .map(|c| LeakSummary { g: c.g, j_0: c.j_0, max_cop_ratio: c.max_cop_ratio, gap: c.gap, closed: c.closed })
        .collect();
    let warnings = curves.iter().filter(|c| !c.cools()).map(|c| format!("g = {}: no cooling anywhere on the scan", c.g)).collect();
    Ok(Output {
        rows_csv: csv,
        summary: json(&summary),
        extra: Vec::new(),
        counts: vec![StudyCount { study: "leak".into(), rows: curves.iter().map(|c| c.points.len()).sum(), failures: 0 }],
        warnings,
    })
}

fn swapped(cli: &Cli, file: &ConfigFile) -> Result<Output, Failure> {
    let cfg = system(cli, file)?;
    if cfg.topology != Topology::Swapped {
        return Err(Failure::Config("BadValue: topology must be swapped".into()));
    }
    let st = &file.studies;
    let rows = studies::swapped_bound_check(&cfg, &st.swapped_g, st.swapped_tolerance)?;
    let mut csv = format!("g,omega_w_dressed,{MAXPOWER_CSV_HEADER},holds\n");
    for r in &rows {
        csv.push_str(&format!("{},{},{},{}\n", num(r.g), num(r.omega_w_dressed), maxpower_row(&r.point), r.holds));
    }
    Ok(Output {
        rows_csv: csv,
        summary: serde_json::json!({ "all_hold": rows.iter().all(|r| r.holds), "rows": rows }),
        extra: Vec::new(),
        counts: vec![StudyCount { study: "swapped".into(), rows: rows.len(), failures: 0 }],
        warnings: Vec::new(),
    })
}

fn run_command(cli: &Cli) -> Result<(), Failure> {
    let file = load(cli)?;
    if cli.command == Command::Validate {
        let cfg = system(cli, &file)?;
        println!("ok {}", cfg.hash());
        println!("{}", cfg.canonical_text());
        return Ok(());
    }
    let hash = file.system.clone().and_then(|c| validate(c).ok()).map(|c| c.hash());
    let seed = (cli.command == Command::Sample).then(|| cli.seed.unwrap_or(file.studies.sample.seed));
    let manifest = RunManifest::start(cli.command.name(), hash, seed);
    // refuse an occupied directory before doing any work
    let dir = cli.out.as_ref().map(|p| OutputDir::create(p, cli.force)).transpose()?;
    let out = match cli.command {
        Command::Steady => steady(cli, &file)?,
        Command::Sweep => sweep(cli, &file)?,
        Command::Maxpower => maxpower(cli, &file)?,
        Command::Sample => sample(cli, &file)?,
        Command::Leak => leak(cli, &file)?,
        Command::Swapped => swapped(cli, &file)?,
        Command::Validate => unreachable!(),
    };
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    let summary = serde_json::to_string_pretty(&out.summary).expect("summary serializes") + "\n";
    match dir {
        Some(mut dir) => {
            dir.write("rows.csv", &out.rows_csv)?;
            dir.write("summary.json", &summary)?;
            for (name, text) in &out.extra {
                dir.write(name, text)?;
            }
            let mut manifest = manifest;
            manifest.studies = out.counts;
            manifest.warnings = out.warnings;
            dir.finish(manifest)?;
        }
        None => match cli.format {
            Format::Csv => print!("{}", out.rows_csv),
            Format::Json => print!("{summary}"),
        },
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs; returns the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: --threads ignored: {e}");
        }
    }
    match run_command(&cli) {
        Ok(()) => 0,
        Err(f) => {
            match &f {
                Failure::Config(m) => eprintln!("error: {m}"),
                Failure::Solver(m) => eprintln!("solver failure: {m}"),
            }
            f.code()
        }
    }
}
