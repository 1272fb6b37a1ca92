//! Command-line front end.
//!
//! Exit codes: 0 success, 1 configuration or I/O error, 2 hypothesis failure
//! or position outside the bistable interval, 3 non-convergence, 4 grid too
//! coarse for the requested `eps`.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::info;
use rayon::prelude::*;

use crate::config::{ConfigError, InitChoice, RunConfig};
use crate::experiment::{
    classify_limit, epsilon_sweep, monotone_random_state, reproduce_figure2, zero_diffusion_demo, ExperimentError,
    Figure2Options, SweepOptions, DEFAULT_SUPPORT_THRESHOLD,
};
use crate::model::{find_bistable_interval, verify_hypotheses, CompetitionModel, ModelError, DEFAULT_SAMPLES};
use crate::output::{atomic_write, fmt_f64, speed_table, state_table, summary_text, LinePlot, Series, Table};
use crate::pde::{run_to_steady, wkb_transform, Grid1D, InitialCondition, PdeError};
use crate::wave::{
    front_tracking_speed, locate_boundary, speed_map, SpeedSample, TrackingOptions, WaveError, WaveProblem,
};

/// Smallest `eps` run without `--large-grid`.
pub const DESK_EPS: f64 = 1e-5;

#[derive(Debug, Parser)]
#[command(name = "frontier", version, about = "Boundaries between competing species driven by opposing gradients")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `output.directory`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Random seed (overrides `solver.seed`).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for sweeps and maps.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Run even when hypotheses fail.
    #[arg(long, global = true)]
    pub force: bool,
    /// Allow grids for `eps` below 1e-5.
    #[arg(long, global = true)]
    pub large_grid: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the structural hypotheses.
    Check,
    /// Run the parabolic problem to its steady state.
    Steady,
    /// Traveling-wave speed at one position or over a map.
    Wavespeed {
        #[arg(long, conflicts_with = "map", required_unless_present = "map")]
        x: Option<f64>,
        #[arg(long)]
        map: bool,
        /// Add the front-tracking speed as a second column.
        #[arg(long)]
        oracle: bool,
    },
    /// Locate `x*` with `c(x*) = 0`.
    Locate,
    /// Steady states over `solver.eps_list`.
    Sweep,
    /// Zero-diffusion patchworks next to small-diffusion steady states.
    Figure2,
    /// Pointwise limits of the diffusion-free system from random data.
    ZeroDiffusion,
}

/// A failed command: the exit code and the message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::new(1, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(1, format!("i/o error: {e}"))
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        Failure::new(2, e.to_string())
    }
}

fn trace_text(trace: &[(f64, f64)]) -> String {
    let mut s = String::from("residual trace (t, residual):\n");
    for (t, r) in trace {
        s.push_str(&format!("  {t:.6e} {r:.3e}\n"));
    }
    s
}

impl From<PdeError> for Failure {
    fn from(e: PdeError) -> Self {
        match &e {
            PdeError::Hypothesis(_) => Failure::new(2, e.to_string()),
            PdeError::Resolution { required, .. } => Failure::new(4, format!("{e}\nrequired n = {required}")),
            PdeError::NotConverged { trace, .. } => Failure::new(3, format!("{e}\n{}", trace_text(trace))),
            PdeError::Grid(_) => Failure::new(1, e.to_string()),
            _ => Failure::new(3, e.to_string()),
        }
    }
}

impl From<WaveError> for Failure {
    fn from(e: WaveError) -> Self {
        match e {
            WaveError::Model(m) => m.into(),
            WaveError::OutsideInterval { .. } | WaveError::BoundaryAtEndpoint { .. } => Failure::new(2, e.to_string()),
            WaveError::Setting(_) => Failure::new(1, e.to_string()),
            _ => Failure::new(3, e.to_string()),
        }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Model(m) => m.into(),
            ExperimentError::Pde(p) => p.into(),
            ExperimentError::Wave(w) => w.into(),
            ExperimentError::Setting(s) => Failure::new(1, s),
        }
    }
}

struct Context {
    config: RunConfig,
    model: CompetitionModel,
    out: PathBuf,
    seed: u64,
    force: bool,
    large_grid: bool,
}

/// Files produced by a command, written only after it succeeds.
#[derive(Default)]
struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    fn table(&mut self, name: &str, t: &Table) -> Result<(), Failure> {
        self.add(name, t.to_bytes()?);
        Ok(())
    }

    fn commit(self, dir: &Path) -> Result<Vec<PathBuf>, Failure> {
        let mut written = Vec::new();
        for (name, bytes) in self.files {
            let p = dir.join(name);
            atomic_write(&p, &bytes)?;
            written.push(p);
        }
        Ok(written)
    }
}

impl Context {
    fn new(global: &GlobalArgs) -> Result<Self, Failure> {
        let path = global.config.as_ref().ok_or_else(|| Failure::new(1, "--config <path> is required"))?;
        let config = RunConfig::load(path)?;
        let model = config.build_model()?;
        let out = global.out.clone().unwrap_or_else(|| config.output.directory.clone());
        let seed = global.seed.unwrap_or(config.solver.seed);
        Ok(Self { config, model, out, seed, force: global.force, large_grid: global.large_grid })
    }

    fn require_hypotheses(&self) -> Result<(), Failure> {
        let report = verify_hypotheses(&self.model, DEFAULT_SAMPLES);
        if report.all_passed() || self.force {
            return Ok(());
        }
        Err(Failure::new(2, format!("{report}\nrerun with --force to proceed anyway")))
    }

    fn eps(&self) -> Result<f64, Failure> {
        self.config.solver.eps.ok_or_else(|| Failure::new(1, "solver.eps is required for this command"))
    }

    /// The configured grid, or the smallest resolving one. Below the desk
    /// scale the automatic grid needs `--large-grid`.
    fn grid(&self, eps: f64) -> Result<Grid1D, Failure> {
        match self.config.solver.n {
            Some(n) => {
                let g = Grid1D::new(n)?;
                if eps > 0.0 && !g.resolves(eps) {
                    return Err(PdeError::Resolution { n, eps, required: Grid1D::required_nodes(eps) }.into());
                }
                Ok(g)
            }
            None if eps == 0.0 => Ok(Grid1D::new(self.config.solver.zero_cells)?),
            None => {
                if eps < DESK_EPS && !self.large_grid {
                    let required = Grid1D::required_nodes(eps);
                    return Err(Failure::new(
                        4,
                        format!("eps = {eps:e} needs a grid of {required} nodes; pass --large-grid to run it\nrequired n = {required}"),
                    ));
                }
                Ok(Grid1D::auto(eps)?)
            }
        }
    }
}

fn state_plot(title: &str, grid: Grid1D, a: &[f64], b: &[f64], guide: Option<f64>) -> String {
    let mut p = LinePlot::new(title, "x", "concentration");
    p.series.push(Series::line("A", "#c0392b", grid.nodes().zip(a).map(|(x, &v)| (x, v)).collect()));
    p.series.push(Series::line("B", "#2c7fb8", grid.nodes().zip(b).map(|(x, &v)| (x, v)).collect()));
    p.x_range = Some((0.0, 1.0));
    if let Some(x) = guide {
        p.guides.push((x, "x*_eps".into()));
    }
    p.render()
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), fmt_f64)
}

fn check(ctx: &Context) -> Result<String, Failure> {
    let report = verify_hypotheses(&ctx.model, DEFAULT_SAMPLES);
    let mut text = report.to_string();
    if let Ok(iv) = find_bistable_interval(&ctx.model) {
        text.push_str(&format!("\nbistable interval: ({}, {})", fmt_f64(iv.x_b), fmt_f64(iv.x_a)));
    }
    if report.all_passed() {
        Ok(text)
    } else {
        Err(Failure::new(2, text))
    }
}

fn steady(ctx: &Context) -> Result<(String, Artifacts), Failure> {
    ctx.require_hypotheses()?;
    let eps = ctx.eps()?;
    let grid = ctx.grid(eps)?;
    let init = match ctx.config.initial_condition() {
        Some(i) => i,
        None => InitialCondition::Custom(monotone_random_state(&ctx.model, grid, ctx.seed)),
    };
    let s = run_to_steady(&ctx.model, eps, grid, init, &ctx.config.steady_options(!ctx.force))?;
    let wkb = if eps > 0.0 { wkb_transform(&s.state, &ctx.model, eps, true).ok() } else { None };
    let mut art = Artifacts::default();
    if ctx.config.wants("csv") {
        art.table("steady.csv", &state_table(&s.state, wkb.as_ref()))?;
    }
    if ctx.config.wants("svg") {
        let title = format!("steady state, eps = {eps:e}");
        art.add("steady.svg", state_plot(&title, grid, &s.state.a, &s.state.b, s.front.map(|f| f.x_star_eps)).into_bytes());
    }
    let summary = summary_text(&[
        ("eps", fmt_f64(eps)),
        ("n", grid.len().to_string()),
        ("x_star_eps", opt(s.front.map(|f| f.x_star_eps))),
        ("width", opt(s.front.map(|f| f.width))),
        ("residual", fmt_f64(s.residual)),
        ("iterations", s.iterations.to_string()),
        ("a_at_zero", fmt_f64(s.state.a[0])),
        ("max_bound_violation", fmt_f64(s.monitors.max_bound_violation)),
        ("max_space_violation", fmt_f64(s.monitors.max_space_violation)),
        ("max_time_violation", fmt_f64(s.monitors.max_time_violation)),
    ]);
    art.add("summary.txt", summary.clone().into_bytes());
    Ok((summary, art))
}

fn default_map_xs(model: &CompetitionModel) -> Result<Vec<f64>, Failure> {
    let iv = find_bistable_interval(model)?;
    let (lo, hi) = (iv.x_b + 0.02 * iv.width(), iv.x_a - 0.02 * iv.width());
    Ok((0..9).map(|i| lo + (hi - lo) * i as f64 / 8.0).collect())
}

fn wavespeed(ctx: &Context, x: Option<f64>, oracle: bool) -> Result<(String, Artifacts), Failure> {
    let xs = match x {
        Some(x) => vec![x],
        None => match &ctx.config.wave.xs {
            Some(xs) => xs.clone(),
            None => default_map_xs(&ctx.model)?,
        },
    };
    let settings = ctx.config.wave_settings();
    for &x in &xs {
        WaveProblem::new(&ctx.model, x).with_settings(settings).validate()?;
    }
    let samples: Vec<SpeedSample> = speed_map(&ctx.model, &xs, &settings)?;
    let oracle_c = if oracle {
        let opts = TrackingOptions::default();
        let cs = xs
            .par_iter()
            .map(|&x| front_tracking_speed(&WaveProblem::new(&ctx.model, x).with_settings(settings), &opts).map(|r| r.c))
            .collect::<Result<Vec<_>, _>>()?;
        Some(cs)
    } else {
        None
    };
    let table = speed_table(&samples, oracle_c.as_deref());
    let mut text = String::new();
    for (k, s) in samples.iter().enumerate() {
        text.push_str(&format!("x = {}  c = {}", fmt_f64(s.x), fmt_f64(s.c)));
        if let Some(o) = &oracle_c {
            text.push_str(&format!("  c_oracle = {}", fmt_f64(o[k])));
        }
        text.push('\n');
    }
    let mut art = Artifacts::default();
    art.table("wavespeed.csv", &table)?;
    if ctx.config.wants("svg") && samples.len() > 1 {
        let mut p = LinePlot::new("traveling-wave speed", "x", "c(x)");
        p.series.push(Series::line("c (BVP)", "#333333", samples.iter().map(|s| (s.x, s.c)).collect()));
        if let Some(o) = &oracle_c {
            p.series.push(Series::line("c (tracking)", "#c0392b", xs.iter().copied().zip(o.iter().copied()).collect()).markers());
        }
        art.add("wavespeed.svg", p.render().into_bytes());
    }
    Ok((text, art))
}

fn locate(ctx: &Context) -> Result<(String, Artifacts), Failure> {
    let loc = locate_boundary(&ctx.model, ctx.config.wave.tol_x, &ctx.config.wave_settings())?;
    let summary = summary_text(&[
        ("x_star", fmt_f64(loc.x_star)),
        ("bracket_lo", fmt_f64(loc.bracket.0)),
        ("bracket_hi", fmt_f64(loc.bracket.1)),
        ("iterations", loc.iterations.to_string()),
        ("x_b", fmt_f64(loc.interval.x_b)),
        ("x_a", fmt_f64(loc.interval.x_a)),
    ]);
    let mut art = Artifacts::default();
    art.add("locate.txt", summary.clone().into_bytes());
    let mut t = Table::new(&["x", "c"]);
    for &(x, c) in &loc.c_values {
        t.push_numbers(&[x, c]);
    }
    art.table("locate.csv", &t)?;
    Ok((summary, art))
}

fn sweep(ctx: &Context) -> Result<(String, Artifacts), Failure> {
    ctx.require_hypotheses()?;
    let eps_list = ctx
        .config
        .solver
        .eps_list
        .clone()
        .ok_or_else(|| Failure::new(1, "solver.eps_list is required for sweep"))?;
    for &eps in &eps_list {
        ctx.grid(eps)?;
    }
    let init = ctx.config.initial_condition().ok_or_else(|| Failure::new(1, "sweep supports the ramp and corner inits"))?;
    let options = SweepOptions {
        steady: ctx.config.steady_options(!ctx.force),
        wave: ctx.config.wave_settings(),
        tol_x: ctx.config.wave.tol_x,
        init,
        parallel: true,
        keep_states: true,
    };
    let report = epsilon_sweep(&ctx.model, &eps_list, ctx.config.solver.tol, &options)?;
    if let Some(e) = report.entries.iter().find_map(|e| e.error.clone()) {
        return Err(Failure::new(3, format!("sweep entry failed: {e}")));
    }
    let mut t = Table::new(&["eps", "n", "x_star_eps", "width", "gap", "max_slope_a", "residual", "iterations"]);
    for e in &report.entries {
        t.push(vec![
            fmt_f64(e.eps),
            e.n.to_string(),
            opt(e.x_star_eps),
            opt(e.width),
            opt(e.gap),
            opt(e.max_slope_a),
            opt(e.residual),
            e.iterations.map_or_else(|| "none".into(), |i| i.to_string()),
        ]);
    }
    let last = report.entries.len() - 1;
    let verdict = report.states[last].as_ref().map(|s| classify_limit(s, &ctx.model, DEFAULT_SUPPORT_THRESHOLD));
    let mut pairs = vec![
        ("x_star", opt(report.x_star_wave.as_ref().map(|b| b.x_star))),
        ("width_exponent", opt(report.width_exponent)),
        ("gap_non_increasing", report.gap_non_increasing(Grid1D::auto(eps_list[last])?.h()).to_string()),
    ];
    if let Some(v) = &verdict {
        pairs.push(("verdict", format!("{:?}", v.verdict)));
    }
    let summary = summary_text(&pairs);
    let mut art = Artifacts::default();
    art.table("sweep.csv", &t)?;
    art.add("summary.txt", summary.clone().into_bytes());
    if ctx.config.wants("svg") {
        let mut p = LinePlot::new("steady states along the sweep", "x", "A");
        let colors = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"];
        for (k, (e, s)) in report.entries.iter().zip(&report.states).enumerate() {
            if let Some(s) = s {
                let pts = s.state.grid.nodes().zip(&s.state.a).map(|(x, &v)| (x, v)).collect();
                p.series.push(Series::line(&format!("eps {:e}", e.eps), colors[k % colors.len()], pts));
            }
        }
        art.add("sweep.svg", p.render().into_bytes());
    }
    Ok((summary, art))
}

fn figure2(ctx: &Context) -> Result<(String, Artifacts), Failure> {
    ctx.require_hypotheses()?;
    let eps = ctx.config.solver.eps.unwrap_or(DESK_EPS);
    let grid = ctx.grid(eps)?;
    let options = Figure2Options {
        eps_small: eps,
        seeds: [ctx.seed, ctx.seed.wrapping_add(1)],
        n_cells_zero: ctx.config.solver.zero_cells,
        n: Some(grid.len()),
        steady: ctx.config.steady_options(!ctx.force),
        wave: ctx.config.wave_settings(),
        tol_x: ctx.config.wave.tol_x,
    };
    let r = reproduce_figure2(&ctx.model, &options)?;
    let mut art = Artifacts::default();
    if ctx.config.wants("csv") {
        let mut t = Table::new(&["x", "A_seed1", "B_seed1", "outcome_seed1", "A_seed2", "B_seed2", "outcome_seed2"]);
        for (p, q) in r.zero[0].nodes.iter().zip(&r.zero[1].nodes) {
            t.push(vec![
                fmt_f64(p.x),
                fmt_f64(p.a),
                fmt_f64(p.b),
                p.outcome.label().into(),
                fmt_f64(q.a),
                fmt_f64(q.b),
                q.outcome.label().into(),
            ]);
        }
        art.table("figure2_zero.csv", &t)?;
        let mut t = Table::new(&["x", "A_seed1", "B_seed1", "A_seed2", "B_seed2"]);
        let (s1, s2) = (&r.steady[0].state, &r.steady[1].state);
        for (i, x) in s1.grid.nodes().enumerate() {
            t.push_numbers(&[x, s1.a[i], s1.b[i], s2.a[i], s2.b[i]]);
        }
        art.table("figure2_steady.csv", &t)?;
    }
    art.add("figure2_zero.svg", r.svg_zero.clone().into_bytes());
    art.add("figure2_steady.svg", r.svg_steady.clone().into_bytes());
    let summary = summary_text(&[
        ("eps", fmt_f64(eps)),
        ("n", grid.len().to_string()),
        ("seeds", format!("{} {}", options.seeds[0], options.seeds[1])),
        ("patchworks_differ", r.patchworks_differ.to_string()),
        ("steady_gap", fmt_f64(r.steady_gap)),
        ("x_star", opt(r.boundary.as_ref().map(|b| b.x_star))),
        ("x_star_eps_seed1", opt(r.steady[0].front.map(|f| f.x_star_eps))),
        ("x_star_eps_seed2", opt(r.steady[1].front.map(|f| f.x_star_eps))),
        ("front_error", opt(r.front_error)),
        ("front_tolerance", fmt_f64(r.front_tolerance)),
    ]);
    art.add("summary.txt", summary.clone().into_bytes());
    Ok((summary, art))
}

fn zero_diffusion(ctx: &Context) -> Result<(String, Artifacts), Failure> {
    let r = zero_diffusion_demo(&ctx.model, ctx.seed, ctx.config.solver.zero_cells)?;
    let mut t = Table::new(&["x", "A0", "B0", "A", "B", "outcome", "distance"]);
    for n in &r.nodes {
        t.push(vec![
            fmt_f64(n.x),
            fmt_f64(n.a0),
            fmt_f64(n.b0),
            fmt_f64(n.a),
            fmt_f64(n.b),
            n.outcome.label().into(),
            fmt_f64(n.distance),
        ]);
    }
    let (to_a, to_b) = r.bistable_split();
    let summary = summary_text(&[
        ("seed", r.seed.to_string()),
        ("x_b", fmt_f64(r.interval.x_b)),
        ("x_a", fmt_f64(r.interval.x_a)),
        ("bistable_to_a", to_a.to_string()),
        ("bistable_to_b", to_b.to_string()),
        ("outside_mismatches", r.outside_mismatches().to_string()),
        ("max_distance", fmt_f64(r.max_distance())),
    ]);
    let mut art = Artifacts::default();
    art.table("zero_diffusion.csv", &t)?;
    if ctx.config.wants("svg") {
        let grid = Grid1D::new(r.nodes.len())?;
        let s = r.to_state(grid);
        art.add("zero_diffusion.svg", state_plot("eps = 0 pointwise limits", grid, &s.a, &s.b, None).into_bytes());
    }
    art.add("summary.txt", summary.clone().into_bytes());
    Ok((summary, art))
}

/// Runs one parsed invocation; stdout text on success.
pub fn run(cli: &Cli) -> Result<String, Failure> {
    if let Some(n) = cli.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::new(1, format!("thread pool: {e}")))?;
    }
    let ctx = Context::new(&cli.global)?;
    let (text, art) = match &cli.command {
        Command::Check => return check(&ctx),
        Command::Steady => steady(&ctx)?,
        Command::Wavespeed { x, map: _, oracle } => wavespeed(&ctx, *x, *oracle)?,
        Command::Locate => locate(&ctx)?,
        Command::Sweep => sweep(&ctx)?,
        Command::Figure2 => figure2(&ctx)?,
        Command::ZeroDiffusion => zero_diffusion(&ctx)?,
    };
    if ctx.config.solver.init == InitChoice::Random {
        info!("random initial data from seed {}", ctx.seed);
    }
    let written = art.commit(&ctx.out)?;
    for p in &written {
        info!("wrote {}", p.display());
    }
    Ok(text)
}

/// Parses `args` and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            0
        }
        Err(f) => {
            eprintln!("{}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_for_errors() {
        assert_eq!(Failure::from(PdeError::Resolution { n: 11, eps: 1e-6, required: 10001 }).code, 4);
        assert_eq!(Failure::from(WaveError::OutsideInterval { x: 0.1, x_b: 0.2, x_a: 0.8 }).code, 2);
        let f = Failure::from(PdeError::NotConverged { steps: 3, t: 1.0, residual: 0.1, trace: vec![(0.5, 0.2)] });
        assert_eq!(f.code, 3);
        assert!(f.message.contains("residual trace"));
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(main_with_args(["frontier", "no-such-command"]), 1);
        assert_eq!(main_with_args(["frontier", "check"]), 1);
    }
}
