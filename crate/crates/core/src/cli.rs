//! Command-line experiment runner.
//!
//! Every subcommand reads an optional TOML file (`--config`), applies flag
//! overrides, validates the result and writes CSV (and for `evolve`, SVG)
//! files into the output directory. Reruns with the same inputs produce
//! byte-identical files.

use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Deserialize;

use crate::dynamics::{sigma_series, theta_grid, theta_sweep, InitialState};
use crate::error::{Error, Result};
use crate::evolution::{evolve, probability_distribution, StateVector, WalkAngles};
use crate::lattice::{HexLattice, Vertex};
use crate::localization::{decay_fit, find_critical_points};
use crate::search::{analyze, verify_appendix_bounds, SearchConfig};

#[derive(Debug, Parser)]
#[command(name = "hexwalk", version, about = "Staggered quantum walk on the hexagonal lattice")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Evolve,
    Sigma,
    Localization,
    Search,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Probability distribution after t steps (CSV + SVG heatmap)
    Evolve(Options),
    /// σ(t) line fits for a list of angles and the σ/t angle sweep
    Sigma(Options),
    /// Stationary points of the phase and return-probability decay
    Localization(Options),
    /// Search eigenphase, constants, predictions and simulation
    Search(Options),
}

impl Command {
    fn split(&self) -> (Kind, &Options) {
        match self {
            Command::Evolve(o) => (Kind::Evolve, o),
            Command::Sigma(o) => (Kind::Sigma, o),
            Command::Localization(o) => (Kind::Localization, o),
            Command::Search(o) => (Kind::Search, o),
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// TOML file with the same keys as the flags
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Lattice size(s); `search` accepts a comma-separated list
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Angle(s), e.g. `pi/3`, `11pi/30`, `1.047`; comma-separated for `sigma`
    #[arg(long, value_delimiter = ',')]
    pub theta: Vec<String>,
    /// Number of steps (probe time for the sweep, window end for decay)
    #[arg(long)]
    pub tmax: Option<usize>,
    /// Initial state: two-node, hexagon, single, single:x,y,s, random
    #[arg(long)]
    pub init: Option<String>,
    /// Marked vertex for `search`, probe vertex for `localization`: x,y,s
    #[arg(long)]
    pub marked: Option<String>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for the `random` initial state
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum AngleValue {
    Number(f64),
    Text(String),
}

/// Keys accepted in the TOML file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    n: Option<OneOrMany<usize>>,
    theta: Option<OneOrMany<AngleValue>>,
    tmax: Option<usize>,
    tmin: Option<usize>,
    init: Option<String>,
    marked: Option<String>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    grid_points: Option<usize>,
    seeds: Option<usize>,
}

/// Initial-state choice before it is tied to a lattice.
#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    Named(InitialState),
    /// Single node at the lattice centre.
    Centre,
    Random,
}

/// Fully resolved and validated parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub sizes: Vec<usize>,
    pub thetas: Vec<(String, f64)>,
    pub t_max: usize,
    pub t_min: usize,
    pub init: InitSpec,
    pub marked: Option<Vertex>,
    pub out: PathBuf,
    pub seed: u64,
    pub grid_points: usize,
    pub seeds: usize,
}

/// Parses `pi/3`, `11pi/30`, `2*pi/3`, `π/2`, `pi`, `-pi/4` or a plain number.
pub fn parse_angle(text: &str) -> Result<f64> {
    let bad = || Error::invalid(format!("cannot parse angle '{text}'"));
    let s: String = text
        .trim()
        .to_lowercase()
        .replace('π', "pi")
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect();
    if s.is_empty() {
        return Err(bad());
    }
    let Some(pos) = s.find("pi") else {
        return s.parse::<f64>().map_err(|_| bad()).and_then(finite_or(bad));
    };
    let coeff = s[..pos].trim_end_matches('*');
    let coeff = match coeff {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let rest = &s[pos + 2..];
    let denom = if rest.is_empty() {
        1.0
    } else {
        rest.strip_prefix('/')
            .ok_or_else(bad)?
            .parse::<f64>()
            .map_err(|_| bad())?
    };
    if denom == 0.0 {
        return Err(bad());
    }
    finite_or(bad)(coeff * PI / denom)
}

fn finite_or(bad: impl Fn() -> Error) -> impl Fn(f64) -> Result<f64> {
    move |x| if x.is_finite() { Ok(x) } else { Err(bad()) }
}

/// Parses `x,y,s`.
pub fn parse_vertex(text: &str) -> Result<Vertex> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || Error::invalid(format!("vertex '{text}' is not of the form x,y,s"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let x = parts[0].parse().map_err(|_| bad())?;
    let y = parts[1].parse().map_err(|_| bad())?;
    let s: u8 = parts[2].parse().map_err(|_| bad())?;
    if s > 1 {
        return Err(bad());
    }
    Ok(Vertex::new(x, y, s))
}

pub fn parse_init(text: &str) -> Result<InitSpec> {
    match text.trim() {
        "two-node" => Ok(InitSpec::Named(InitialState::TwoNode)),
        "hexagon" => Ok(InitSpec::Named(InitialState::Hexagon)),
        "single" => Ok(InitSpec::Centre),
        "random" => Ok(InitSpec::Random),
        other => match other.strip_prefix("single:") {
            Some(v) => Ok(InitSpec::Named(InitialState::SingleNode(parse_vertex(v)?))),
            None => Err(Error::invalid(format!("unknown initial state '{other}'"))),
        },
    }
}

impl InitSpec {
    fn resolve(&self, lat: &HexLattice, seed: u64) -> InitialState {
        match self {
            InitSpec::Named(s) => s.clone(),
            InitSpec::Centre => InitialState::SingleNode(Vertex::new(lat.n() / 2, lat.n() / 2, 0)),
            InitSpec::Random => {
                let psi = StateVector::random(lat, seed);
                InitialState::Custom(
                    lat.vertices()
                        .zip(psi.amplitudes().iter().copied())
                        .collect::<Vec<(Vertex, Complex64)>>(),
                )
            }
        }
    }

    fn label(&self) -> String {
        match self {
            InitSpec::Named(InitialState::SingleNode(v)) => format!("single:{},{},{}", v.x, v.y, v.s),
            InitSpec::Named(s) => s.name().to_string(),
            InitSpec::Centre => "single".into(),
            InitSpec::Random => "random".into(),
        }
    }
}

fn defaults(kind: Kind) -> ExperimentConfig {
    let third = ("pi/3".to_string(), PI / 3.0);
    let base = ExperimentConfig {
        sizes: vec![128],
        thetas: vec![third.clone()],
        t_max: 58,
        t_min: 0,
        init: InitSpec::Named(InitialState::TwoNode),
        marked: None,
        out: PathBuf::from("out"),
        seed: 0,
        grid_points: 65,
        seeds: 24,
    };
    match kind {
        Kind::Evolve => base,
        Kind::Sigma => ExperimentConfig {
            sizes: vec![256],
            thetas: ["pi/30", "4pi/30", "7pi/30", "pi/3", "11pi/30"]
                .iter()
                .map(|s| (s.to_string(), parse_angle(s).expect("static angle")))
                .collect(),
            t_max: 100,
            init: InitSpec::Named(InitialState::Hexagon),
            ..base
        },
        Kind::Localization => ExperimentConfig {
            sizes: vec![1024],
            t_max: 400,
            t_min: 50,
            ..base
        },
        Kind::Search => ExperimentConfig {
            sizes: vec![16, 32, 64],
            t_max: 0,
            marked: Some(Vertex::new(0, 0, 0)),
            ..base
        },
    }
}

fn angle_entry(v: AngleValue) -> Result<(String, f64)> {
    match v {
        AngleValue::Number(x) => Ok((format!("{x}"), finite_or(|| Error::invalid("angle is not finite"))(x)?)),
        AngleValue::Text(s) => Ok((s.clone(), parse_angle(&s)?)),
    }
}

fn resolve(kind: Kind, opts: &Options) -> Result<ExperimentConfig> {
    let file = match &opts.config {
        Some(p) => {
            let text = fs::read_to_string(p)?;
            toml::from_str::<FileConfig>(&text)
                .map_err(|e| Error::invalid(format!("{}: {e}", p.display())))?
        }
        None => FileConfig::default(),
    };
    let mut cfg = defaults(kind);

    if let Some(n) = file.n {
        cfg.sizes = n.into_vec();
    }
    if let Some(t) = file.theta {
        cfg.thetas = t.into_vec().into_iter().map(angle_entry).collect::<Result<_>>()?;
    }
    if let Some(t) = file.tmax {
        cfg.t_max = t;
    }
    if let Some(t) = file.tmin {
        cfg.t_min = t;
    }
    if let Some(i) = &file.init {
        cfg.init = parse_init(i)?;
    }
    if let Some(m) = &file.marked {
        cfg.marked = Some(parse_vertex(m)?);
    }
    if let Some(o) = file.out {
        cfg.out = o;
    }
    if let Some(s) = file.seed {
        cfg.seed = s;
    }
    if let Some(g) = file.grid_points {
        cfg.grid_points = g;
    }
    if let Some(s) = file.seeds {
        cfg.seeds = s;
    }

    if !opts.n.is_empty() {
        cfg.sizes = opts.n.clone();
    }
    if !opts.theta.is_empty() {
        cfg.thetas = opts
            .theta
            .iter()
            .map(|s| Ok((s.clone(), parse_angle(s)?)))
            .collect::<Result<_>>()?;
    }
    if let Some(t) = opts.tmax {
        cfg.t_max = t;
    }
    if let Some(i) = &opts.init {
        cfg.init = parse_init(i)?;
    }
    if let Some(m) = &opts.marked {
        cfg.marked = Some(parse_vertex(m)?);
    }
    if let Some(o) = &opts.out {
        cfg.out = o.clone();
    }
    if let Some(s) = opts.seed {
        cfg.seed = s;
    }
    validate(kind, &cfg)?;
    Ok(cfg)
}

fn validate(kind: Kind, cfg: &ExperimentConfig) -> Result<()> {
    if cfg.sizes.is_empty() {
        return Err(Error::invalid("no lattice size given"));
    }
    for &n in &cfg.sizes {
        HexLattice::new(n)?;
    }
    if kind != Kind::Search && cfg.sizes.len() > 1 {
        return Err(Error::invalid("only `search` accepts several lattice sizes"));
    }
    if cfg.thetas.is_empty() {
        return Err(Error::invalid("θ list is empty"));
    }
    if kind != Kind::Sigma && cfg.thetas.len() > 1 {
        return Err(Error::invalid("only `sigma` accepts several angles"));
    }
    if let Some(m) = cfg.marked {
        for &n in &cfg.sizes {
            HexLattice::new(n)?.index(m)?;
        }
    }
    if let InitSpec::Named(InitialState::SingleNode(v)) = &cfg.init {
        HexLattice::new(cfg.sizes[0])?.index(*v)?;
    }
    match kind {
        Kind::Sigma if cfg.grid_points < 2 => Err(Error::invalid("θ grid needs at least two points")),
        Kind::Sigma if cfg.t_max < 2 => Err(Error::invalid("tmax must be at least 2")),
        Kind::Localization if cfg.t_min == 0 || cfg.t_max <= cfg.t_min + 2 => Err(Error::invalid(
            format!("decay window [{}, {}] is too short", cfg.t_min, cfg.t_max),
        )),
        Kind::Localization if cfg.seeds == 0 => Err(Error::invalid("seed grid is empty")),
        Kind::Search => {
            let th = cfg.thetas[0].1;
            if th > 0.0 && th < PI {
                Ok(())
            } else {
                Err(Error::invalid(format!("search θ = {th} outside (0, π)")))
            }
        }
        _ => Ok(()),
    }
}

/// Process exit code for an error: 1 validation, 2 numerical, 3 I/O.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidParameter(_)
        | Error::DimensionMismatch { .. }
        | Error::Unsupported(_)
        | Error::LatticeTooLarge { .. } => 1,
        Error::SingularPoint { .. } | Error::NumericalFailure(_) => 2,
        Error::Io(_) => 3,
    }
}

/// Runs one subcommand; returns the files written.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    let (kind, opts) = cli.command.split();
    let cfg = resolve(kind, opts)?;
    fs::create_dir_all(&cfg.out)?;
    match kind {
        Kind::Evolve => cmd_evolve(&cfg),
        Kind::Sigma => cmd_sigma(&cfg),
        Kind::Localization => cmd_localization(&cfg),
        Kind::Search => cmd_search(&cfg),
    }
}

/// Parses `args` (including the program name) and runs.
pub fn run_from_args<I, T>(args: I) -> Result<Vec<PathBuf>>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::invalid(e.to_string()))?;
    run(&cli)
}

/// CSV with `#` metadata lines ahead of the header.
struct CsvFile {
    path: PathBuf,
    writer: csv::Writer<BufWriter<File>>,
}

impl CsvFile {
    fn create(dir: &Path, name: &str, meta: &[String], header: &[&str]) -> Result<Self> {
        let path = dir.join(name);
        let mut file = BufWriter::new(File::create(&path)?);
        for line in meta {
            writeln!(file, "# {line}")?;
        }
        let mut writer = csv::Writer::from_writer(file);
        writer.write_record(header).map_err(csv_error)?;
        Ok(CsvFile { path, writer })
    }

    fn row(&mut self, fields: &[String]) -> Result<()> {
        self.writer.write_record(fields).map_err(csv_error)
    }

    fn finish(mut self) -> Result<PathBuf> {
        self.writer.flush()?;
        Ok(self.path)
    }
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::NumericalFailure(format!("csv: {other:?}")),
    }
}

macro_rules! fields {
    ($($x:expr),* $(,)?) => { [$(format!("{}", $x)),*] };
}

fn meta(command: &str, cfg: &ExperimentConfig) -> Vec<String> {
    let sizes: Vec<String> = cfg.sizes.iter().map(|n| n.to_string()).collect();
    let thetas: Vec<String> = cfg.thetas.iter().map(|(l, v)| format!("{l}={v}")).collect();
    let mut m = vec![
        format!("hexwalk {command}"),
        format!("n = {}", sizes.join(" ")),
        format!("theta = {}", thetas.join(" ")),
        format!("tmax = {}", cfg.t_max),
        format!("init = {}", cfg.init.label()),
    ];
    if cfg.init == InitSpec::Random {
        m.push(format!("seed = {}", cfg.seed));
    }
    m
}

fn cmd_evolve(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let lat = HexLattice::new(cfg.sizes[0])?;
    let theta = cfg.thetas[0].1;
    let psi = cfg.init.resolve(&lat, cfg.seed).build(&lat)?;
    let out = evolve(&psi, cfg.t_max, &WalkAngles::uniform(theta), &lat)?;
    let probs = probability_distribution(&out);

    let mut csv = CsvFile::create(&cfg.out, "distribution.csv", &meta("evolve", cfg), &["x", "y", "s", "px", "py", "p"])?;
    for (v, p) in lat.vertices().zip(&probs) {
        let r = lat.position(v);
        csv.row(&fields![v.x, v.y, v.s, r.x, r.y, p])?;
    }
    let csv_path = csv.finish()?;
    let svg_path = cfg.out.join("distribution.svg");
    write_svg(&svg_path, &lat, &probs, cfg.t_max, theta)?;
    Ok(vec![csv_path, svg_path])
}

/// Light yellow → dark red ramp for `x ∈ [0, 1]`.
fn heat_colour(x: f64) -> String {
    let x = x.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| (a + (b - a) * x).round() as u8;
    format!("#{:02x}{:02x}{:02x}", lerp(255.0, 128.0), lerp(247.0, 0.0), lerp(188.0, 38.0))
}

fn write_svg(path: &Path, lat: &HexLattice, probs: &[f64], t: usize, theta: f64) -> Result<()> {
    let positions = lat.positions();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for r in &positions {
        x0 = x0.min(r.x);
        x1 = x1.max(r.x);
        y0 = y0.min(r.y);
        y1 = y1.max(r.y);
    }
    let top = probs.iter().copied().fold(0.0, f64::max);
    let mut f = BufWriter::new(File::create(path)?);
    writeln!(
        f,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
        x0 - 1.0,
        -(y1 + 1.0),
        x1 - x0 + 2.0,
        y1 - y0 + 2.0
    )?;
    writeln!(f, "<title>probability after {t} steps, theta = {theta}</title>")?;
    writeln!(f, r#"<rect x="{}" y="{}" width="{}" height="{}" fill="white"/>"#, x0 - 1.0, -(y1 + 1.0), x1 - x0 + 2.0, y1 - y0 + 2.0)?;
    if top > 0.0 {
        for (r, &p) in positions.iter().zip(probs) {
            if p < top * 1e-6 {
                continue;
            }
            // y axis points up in the lattice, down in SVG
            writeln!(
                f,
                r#"<circle cx="{:.4}" cy="{:.4}" r="0.5" fill="{}"/>"#,
                r.x,
                -r.y,
                heat_colour((p / top).sqrt())
            )?;
        }
    }
    writeln!(f, "</svg>")?;
    f.flush()?;
    Ok(())
}

fn cmd_sigma(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let lat = HexLattice::new(cfg.sizes[0])?;
    let init = cfg.init.resolve(&lat, cfg.seed);
    let meta = meta("sigma", cfg);

    let mut series = Vec::with_capacity(cfg.thetas.len());
    for (_, theta) in &cfg.thetas {
        series.push(sigma_series(&init, *theta, cfg.t_max, &lat)?);
    }
    let mut sigma = CsvFile::create(&cfg.out, "sigma.csv", &meta, &["theta", "t", "sigma"])?;
    for s in &series {
        for (t, v) in &s.points {
            sigma.row(&fields![s.theta, t, v])?;
        }
    }
    let mut fit_meta = meta.clone();
    fit_meta.push(format!("fit window = [{}, {}]", cfg.t_max as f64 / 5.0, cfg.t_max));
    let mut fit = CsvFile::create(&cfg.out, "sigma_fit.csv", &fit_meta, &["theta_label", "theta", "slope", "intercept", "r_squared"])?;
    for ((label, _), s) in cfg.thetas.iter().zip(&series) {
        fit.row(&fields![label, s.theta, s.fit.slope, s.fit.intercept, s.fit.r_squared])?;
    }

    let grid = theta_grid(cfg.grid_points)?;
    let sweep = theta_sweep(&init, cfg.t_max, &grid, &lat)?;
    let mut sweep_meta = meta;
    sweep_meta.push(format!("grid = {} uniform points on [0, pi] plus pi/3 and 2pi/3", cfg.grid_points));
    let mut sw = CsvFile::create(&cfg.out, "sweep.csv", &sweep_meta, &["theta", "sigma_over_t"])?;
    for (theta, v) in sweep {
        sw.row(&fields![theta, v])?;
    }
    Ok(vec![sigma.finish()?, fit.finish()?, sw.finish()?])
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn cmd_localization(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let n = cfg.sizes[0];
    let lat = HexLattice::new(n)?;
    let theta = cfg.thetas[0].1;
    let meta = meta("localization", cfg);

    let points = find_critical_points(theta, cfg.seeds);
    let mut cp = CsvFile::create(
        &cfg.out,
        "critical_points.csv",
        &meta,
        &["k", "l", "residual", "sin_phi", "gradient_residual", "hessian_det", "hessian_det_formula", "hessian_det_numerical"],
    )?;
    for p in &points {
        cp.row(&fields![
            p.k,
            p.l,
            p.residual,
            p.sin_phi,
            opt(p.gradient_residual),
            opt(p.hessian_det),
            opt(p.hessian_det_formula),
            p.hessian_det_numerical,
        ])?;
    }

    let vertex = cfg.marked.unwrap_or(Vertex::new(n / 2, n / 2, 0));
    let init = cfg.init.resolve(&lat, cfg.seed);
    let fit = decay_fit(vertex, &init, theta, (cfg.t_min, cfg.t_max), &lat)?;
    let mut decay_meta = meta;
    decay_meta.push(format!("vertex = {vertex}"));
    decay_meta.push(format!("window = [{}, {}]", cfg.t_min, cfg.t_max));
    decay_meta.push(format!("exponent r_squared = {}", fit.r_squared));
    let mut dc = CsvFile::create(&cfg.out, "decay.csv", &decay_meta, &["t", "p_vertex", "local_max", "exponent"])?;
    for &(t, p) in &fit.series {
        let is_max = fit.maxima.iter().any(|m| m.0 == t);
        dc.row(&fields![t, p, u8::from(is_max), fit.exponent])?;
    }
    Ok(vec![cp.finish()?, dc.finish()?])
}

fn cmd_search(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let theta = cfg.thetas[0].1;
    let marked = cfg.marked.unwrap_or(Vertex::new(0, 0, 0));
    let mut sizes = cfg.sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();

    let mut analyses = Vec::with_capacity(sizes.len());
    for &n in &sizes {
        let sc = SearchConfig {
            n,
            marked,
            theta,
            t_max: cfg.t_max,
        };
        let a = analyze(&sc)?;
        let bounds = if n >= 4 { verify_appendix_bounds(n)?.all_hold() } else { false };
        analyses.push((a, bounds));
    }

    let mut meta = meta("search", cfg);
    meta.push(format!("marked = {marked}"));
    if cfg.t_max == 0 {
        meta.push("simulation length = ceil(2.5 t_pred)".into());
    }
    let mut table = CsvFile::create(
        &cfg.out,
        "search_scaling.csv",
        &meta,
        &[
            "n", "N", "lambda", "C", "S", "t_pred", "P_pred", "t_sim", "P_sim",
            "t_pred_over_sqrt_NlnN", "t_sim_over_sqrt_NlnN", "P_pred_lnN", "lambda_n_C", "status", "bounds",
        ],
    )?;
    for (a, bounds) in &analyses {
        let big_n = a.vertices() as f64;
        let scale = (big_n * big_n.ln()).sqrt();
        table.row(&fields![
            a.n,
            a.vertices(),
            a.lambda,
            a.c,
            a.s,
            a.t_pred,
            a.p_pred,
            a.run.t_sim,
            a.run.p_sim,
            a.t_pred / scale,
            a.run.t_sim as f64 / scale,
            a.p_pred * big_n.ln(),
            a.lambda * a.n as f64 * a.c,
            format!("{:?}", a.run.status).to_lowercase(),
            if *bounds { "pass" } else { "fail" },
        ])?;
    }

    let (last, _) = analyses.last().expect("sizes validated non-empty");
    let mut curve_meta = meta;
    curve_meta.push(format!("curve for n = {}", last.n));
    let mut curve = CsvFile::create(&cfg.out, "search_curve.csv", &curve_meta, &["t", "p_marked"])?;
    for (t, p) in last.run.series.iter().enumerate() {
        curve.row(&fields![t, p])?;
    }
    Ok(vec![table.finish()?, curve.finish()?])
}
