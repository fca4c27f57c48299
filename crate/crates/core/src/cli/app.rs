use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use super::model_io::SavedModel;
use super::pipeline::{Pipeline, RunConfig, Schedule, StepRecord};
use crate::bounds::{bounds_report, fmt_g, sink_section_from, sink_sections, SinkSection, DEFAULT_M};
use crate::boxtree::PruneOptions;
use crate::error::{Error, ResourceKind, Result};
use crate::maps::{fixed_points, MapKind, MapModel, Param, Stability};
use crate::render::{render_plane, render_slice, unstable_parameterization, LabeledCover, RenderConfig};

#[derive(Parser, Debug)]
#[command(name = "boxchain", version, about = "Box chain recurrent models of Hénon maps and polynomials")]
pub struct Cli {
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the subdivide / prune / edges / SCC pipeline.
    Run(RunArgs),
    /// Print accuracy and sink separation constants.
    Bounds(BoundsArgs),
    /// Render a saved model.
    Render(RenderArgs),
    /// Summarize a saved model.
    Inspect(InspectArgs),
}

#[derive(Args, Debug, Clone)]
pub struct MapArgs {
    /// Map kind (henon, real_henon, quad, cubic) or preset
    /// (altper2, per31, complexhorse, realhorse, cubicdouble).
    #[arg(long)]
    pub map: String,
    /// Parameter a, "re" or "re,im".
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Parameter c, "re" or "re,im".
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    /// Trapping box half-width R' (default: preset value, else 1.05 R).
    #[arg(long)]
    pub rprime: Option<f64>,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[command(flatten)]
    pub map: MapArgs,
    /// Steps, e.g. "uniform*6,sink_basin*2".
    #[arg(long)]
    pub schedule: String,
    /// delta = epsilon_min / ratio.
    #[arg(long, default_value_t = 1000.0)]
    pub delta_ratio: f64,
    /// Forward and backward iterates used to prune escaping boxes.
    #[arg(long, default_value_t = 6)]
    pub prune_iters: usize,
    /// Abort when edge storage would exceed this many MiB.
    #[arg(long)]
    pub mem_budget_mb: Option<usize>,
    /// Centre-orbit iterates checked by the sink_basin selector.
    #[arg(long, default_value_t = crate::boxtree::DEFAULT_SINK_ITERATES)]
    pub sink_iterates: usize,
    /// sink_basin selects a box when the iterated Jacobian's largest singular value is below this.
    #[arg(long, default_value_t = crate::boxtree::DEFAULT_SINK_THRESHOLD)]
    pub sink_threshold: f64,
    /// Evaluate epsilon' and delta' with outward rounding.
    #[arg(long)]
    pub conservative: bool,
    /// Save the recurrent model of the last completed step.
    #[arg(long)]
    pub model_out: Option<PathBuf>,
    /// Write the model as JSON instead of text.
    #[arg(long)]
    pub model_json: bool,
    /// Include edges in the saved model.
    #[arg(long)]
    pub edges: bool,
    /// Print step records as JSON lines.
    #[arg(long)]
    pub json: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Rounded,
    Both,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub map: MapArgs,
    /// Ratio M in delta < epsilon / M.
    #[arg(long = "m", default_value_t = DEFAULT_M)]
    pub m: f64,
    /// Which sink data to use.
    #[arg(long, value_enum, default_value_t = ModeArg::Both)]
    pub mode: ModeArg,
    /// Override the sink eigenvalues: "l1;l2", each "re" or "re,im".
    #[arg(long, allow_hyphen_values = true)]
    pub eigenvalues: Option<String>,
    /// Override the sink norm |p|.
    #[arg(long)]
    pub pnorm: Option<f64>,
    /// Box size for the epsilon'/delta' ledger.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Smallest box size (default: epsilon).
    #[arg(long)]
    pub epsilon_min: Option<f64>,
    /// Edge fattening (default: epsilon_min / 1000).
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub conservative: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct RenderArgs {
    #[arg(long)]
    pub model_in: PathBuf,
    /// Output path; PNG if it ends in .png, PPM otherwise.
    #[arg(long)]
    pub image_out: PathBuf,
    /// "cx,cy,half" or "cx,cy,half_w,half_h".
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
    /// "N" or "WxH".
    #[arg(long, default_value = "512")]
    pub resolution: String,
    #[arg(long, default_value_t = 20)]
    pub gamma_depth: usize,
    #[arg(long, default_value_t = 100)]
    pub kplus_iters: usize,
    #[arg(long)]
    pub escape_radius: Option<f64>,
    /// Skip the K+ lightening.
    #[arg(long)]
    pub no_kplus: bool,
    /// Which saddle fixed point to slice along (0-based).
    #[arg(long, default_value_t = 0)]
    pub saddle: usize,
}

#[derive(Args, Debug)]
pub struct InspectArgs {
    #[arg(long)]
    pub model_in: PathBuf,
    #[arg(long)]
    pub json: bool,
}

/// A named parameter set.
pub struct Preset {
    pub name: &'static str,
    pub kind: MapKind,
    pub a: Option<&'static str>,
    pub c: &'static str,
    pub rprime: f64,
}

pub const PRESETS: &[Preset] = &[
    Preset { name: "altper2", kind: MapKind::HenonComplex, a: Some("0.15"), c: "-1.1875", rprime: 1.9 },
    Preset { name: "per31", kind: MapKind::HenonComplex, a: Some("0.3"), c: "-1.17", rprime: 2.01 },
    Preset { name: "complexhorse", kind: MapKind::HenonComplex, a: Some("-0.74"), c: "-2.75", rprime: 2.84 },
    Preset { name: "realhorse", kind: MapKind::HenonReal, a: Some("-0.25"), c: "-3", rprime: 2.57 },
    Preset { name: "cubicdouble", kind: MapKind::CubicPoly, a: Some("0,0.1"), c: "-0.19,1.1", rprime: 2.1 },
];

impl MapArgs {
    pub fn build(&self) -> Result<MapModel> {
        if let Some(p) = PRESETS.iter().find(|p| p.name == self.map) {
            let a = self.a.as_deref().or(p.a);
            let c = self.c.as_deref().unwrap_or(p.c);
            return MapModel::new(p.kind, a, c, Some(self.rprime.unwrap_or(p.rprime)));
        }
        let kind: MapKind = self.map.parse()?;
        let c = self.c.as_deref().ok_or_else(|| Error::usage("--c is required"))?;
        MapModel::new(kind, self.a.as_deref(), c, self.rprime)
    }
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_) | Error::Domain(_) => 2,
        Error::Resource { what: ResourceKind::MemoryBudget, .. } => 3,
        Error::Resource { what: ResourceKind::DepthLimit, .. } => 2,
        Error::Parse { .. } => 4,
        Error::Io(_) => 1,
    }
}

/// Parses arguments, runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return 2;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    if let Some(n) = cli.threads {
        // Only the first call in a process can set the global pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a, out, err),
        Command::Bounds(a) => cmd_bounds(a, out),
        Command::Render(a) => cmd_render(a, out),
        Command::Inspect(a) => cmd_inspect(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

const TABLE_HEADER: &str = "step  kind        boxes     escaping  graph     edges       gamma     gamma_edges comps  eps        eps'       delta'     sep    time_s  mem_MB";

fn table_row(r: &StepRecord) -> String {
    format!(
        "{:<5} {:<11} {:<9} {:<9} {:<9} {:<11} {:<9} {:<11} {:<6} {:<10} {:<10} {:<10} {:<6} {:<7.2} {}",
        r.step,
        r.kind.to_string(),
        r.boxes,
        r.escaping,
        r.graph_boxes,
        r.graph_edges,
        r.gamma_boxes,
        r.gamma_edges,
        r.components,
        short(r.bounds.epsilon),
        short(r.bounds.epsilon_prime),
        short(r.bounds.delta_prime),
        r.separating,
        r.seconds,
        r.memory_bytes >> 20
    )
}

fn short(x: f64) -> String {
    format!("{x:.4e}")
}

fn cmd_run(args: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let map = args.map.build()?;
    let schedule: Schedule = args.schedule.parse()?;
    let mut config = RunConfig::new(schedule);
    config.delta_ratio = args.delta_ratio;
    config.prune = PruneOptions::symmetric(args.prune_iters);
    config.mem_budget = args.mem_budget_mb.map(|mb| mb << 20);
    config.sink_iterates = args.sink_iterates;
    config.sink_threshold = args.sink_threshold;
    config.conservative_bounds = args.conservative;
    let mut pipe = Pipeline::new(&map, config)?;

    if !args.json {
        writeln!(out, "# {}", map.describe())?;
        writeln!(out, "# schedule {}", pipe.record().schedule)?;
        writeln!(out, "{TABLE_HEADER}")?;
    }
    let steps = pipe.config().schedule.0.clone();
    let mut failure = None;
    for kind in steps {
        match pipe.step(kind) {
            Ok(rec) => {
                if args.json {
                    writeln!(out, "{}", serde_json::to_string(rec).expect("record serializes"))?;
                } else {
                    writeln!(out, "{}", table_row(rec))?;
                }
                out.flush()?;
            }
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }

    if let (Some(path), Some(model)) = (&args.model_out, pipe.model()) {
        let bounds = pipe.record().steps.last().map(|s| &s.bounds);
        SavedModel::from_model(&map, model, bounds, args.edges).save(path, args.model_json)?;
    }
    if let Some(e) = failure {
        let _ = writeln!(err, "run aborted after {} completed steps", pipe.record().steps.len());
        return Err(e);
    }
    if !args.json {
        write_summary(&pipe, &map, out)?;
    }
    Ok(())
}

fn write_summary(pipe: &Pipeline, map: &MapModel, out: &mut dyn Write) -> Result<()> {
    let Some(last) = pipe.record().steps.last() else { return Ok(()) };
    let comps = pipe.components();
    writeln!(out, "# components (largest first): {:?}", last.largest_components)?;
    if let Some(c) = comps {
        for s in &c.sinks {
            writeln!(out, "# sink point period {} at {:?} in components {:?}", s.period, s.point, s.components)?;
        }
    }
    writeln!(
        out,
        "# separating = {}   epsilon = {}   epsilon_min = {}",
        last.separating,
        fmt_g(last.bounds.epsilon),
        fmt_g(last.epsilon_min)
    )?;
    for s in sink_sections(map, DEFAULT_M) {
        writeln!(
            out,
            "# sink bound ({}): boxes of side below epsilon* = {} guarantee separation (current epsilon {})",
            s.mode,
            fmt_g(s.epsilon_star),
            fmt_g(last.bounds.epsilon)
        )?;
    }
    Ok(())
}

fn parse_complex(s: &str) -> Result<Complex64> {
    Ok(Param::parse(s)?.value())
}

fn cmd_bounds(args: &BoundsArgs, out: &mut dyn Write) -> Result<()> {
    let map = args.map.build()?;
    let mut sections: Vec<SinkSection> = Vec::new();
    let sinks: Vec<_> = fixed_points(&map).into_iter().filter(|f| f.classification == Stability::Sink).collect();

    if let Some(ev) = &args.eigenvalues {
        let ev: Vec<Complex64> = ev.split(';').map(parse_complex).collect::<Result<_>>()?;
        let expected = if map.kind().is_henon() { 2 } else { 1 };
        if ev.len() != expected {
            return Err(Error::usage(format!("{} expects {expected} eigenvalue(s)", map.kind())));
        }
        let ncoords = if map.kind().is_henon() { 2 } else { 1 };
        let p: Vec<Complex64> = sinks.first().map(|s| s.location[..ncoords].to_vec()).unwrap_or_default();
        let p_norm = match args.pnorm {
            Some(v) => v,
            None => p.iter().map(|z| z.norm()).fold(0.0, f64::max),
        };
        sections.push(sink_section_from(&p, &ev, p_norm, map.jacobian_a_mod(), args.m, "override")?);
    } else {
        for s in sink_sections(&map, args.m) {
            let keep = match args.mode {
                ModeArg::Both => true,
                ModeArg::Exact => s.mode == "exact",
                ModeArg::Rounded => s.mode == "rounded",
            };
            if keep {
                if let Some(pn) = args.pnorm {
                    let p: Vec<Complex64> = s.p.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
                    let mut ev = vec![Complex64::new(s.lambda1.0, s.lambda1.1)];
                    if let Some((re, im)) = s.lambda2 {
                        ev.push(Complex64::new(re, im));
                    }
                    sections.push(sink_section_from(&p, &ev, pn, map.jacobian_a_mod(), args.m, &s.mode)?);
                } else {
                    sections.push(s);
                }
            }
        }
    }

    let ledger = args.epsilon.map(|eps| {
        let eps_min = args.epsilon_min.unwrap_or(eps);
        let delta = args.delta.unwrap_or(eps_min / 1000.0);
        bounds_report(&map, eps, delta, args.conservative)
    });

    if args.json {
        let v = serde_json::json!({
            "map": map.describe(),
            "delta0_prime": map.delta0_prime(),
            "ledger": ledger,
            "sinks": sections,
        });
        writeln!(out, "{v}")?;
        return Ok(());
    }
    writeln!(out, "# {}", map.describe())?;
    writeln!(out, "delta0'          = {}", fmt_g(map.delta0_prime()))?;
    if let Some(l) = &ledger {
        write!(out, "{}", l.to_kv_text())?;
    }
    if sections.is_empty() {
        writeln!(out, "sink section absent: no attracting fixed point")?;
    }
    for s in &sections {
        write!(out, "{}", s.to_kv_text())?;
    }
    Ok(())
}

fn parse_window(s: &str) -> Result<((f64, f64), (f64, f64))> {
    let v: Vec<f64> = s
        .split(',')
        .map(|w| w.trim().parse::<f64>().map_err(|_| Error::usage(format!("bad window value '{w}'"))))
        .collect::<Result<_>>()?;
    match v.as_slice() {
        [cx, cy, h] => Ok(((*cx, *cy), (*h, *h))),
        [cx, cy, hw, hh] => Ok(((*cx, *cy), (*hw, *hh))),
        _ => Err(Error::usage("window is cx,cy,half or cx,cy,half_w,half_h")),
    }
}

fn parse_resolution(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::usage(format!("bad resolution '{s}'"));
    match s.split_once(['x', 'X']) {
        Some((w, h)) => Ok((w.trim().parse().map_err(|_| bad())?, h.trim().parse().map_err(|_| bad())?)),
        None => {
            let n = s.trim().parse().map_err(|_| bad())?;
            Ok((n, n))
        }
    }
}

fn cmd_render(args: &RenderArgs, out: &mut dyn Write) -> Result<()> {
    let saved = SavedModel::load(&args.model_in)?;
    let map = saved.map()?;
    let tree = saved.tree(&map)?;
    let cover = LabeledCover::new(&tree, &saved.addresses(), &saved.components())?;
    let (width, height) = parse_resolution(&args.resolution)?;
    let default_half = if map.kind() == MapKind::HenonComplex { 1.0 } else { map.rprime() };
    let (center, half) = match &args.window {
        Some(w) => parse_window(w)?,
        None => ((0.0, 0.0), (default_half, default_half)),
    };
    let config = RenderConfig {
        center,
        half,
        width,
        height,
        gamma_depth: args.gamma_depth,
        kplus_iters: args.kplus_iters,
        escape_radius: args.escape_radius,
        kplus: !args.no_kplus,
    };
    let image = if map.kind() == MapKind::HenonComplex {
        let saddles: Vec<_> =
            fixed_points(&map).into_iter().filter(|f| f.classification == Stability::Saddle).collect();
        let saddle = saddles
            .get(args.saddle)
            .ok_or_else(|| Error::usage(format!("no saddle fixed point with index {}", args.saddle)))?;
        let param = unstable_parameterization(&map, saddle, config.gamma_depth)?;
        render_slice(&cover, &param, &config)?
    } else {
        render_plane(&cover, &config)?
    };
    image.save(&args.image_out)?;
    writeln!(out, "wrote {} ({}x{})", args.image_out.display(), width, height)?;
    Ok(())
}

fn cmd_inspect(args: &InspectArgs, out: &mut dyn Write) -> Result<()> {
    let saved = SavedModel::load(&args.model_in)?;
    let map = saved.map()?;
    let mut sizes = std::collections::BTreeMap::<u32, usize>::new();
    let mut depths = std::collections::BTreeMap::<u8, usize>::new();
    for b in &saved.boxes {
        *sizes.entry(b.component).or_default() += 1;
        *depths.entry(b.address.depth).or_default() += 1;
    }
    let cross = saved.edges.iter().filter(|e| e.cross).count();
    if args.json {
        let v = serde_json::json!({
            "map": map.describe(),
            "boxes": saved.boxes.len(),
            "edges": saved.edges.len() - cross,
            "cross_edges": cross,
            "components": sizes.values().collect::<Vec<_>>(),
            "depths": depths,
            "delta": saved.delta,
            "epsilon": saved.epsilon,
            "epsilon_min": saved.epsilon_min,
            "bounds": saved.bounds,
        });
        writeln!(out, "{v}")?;
        return Ok(());
    }
    writeln!(out, "map          {}", map.describe())?;
    writeln!(out, "boxes        {}", saved.boxes.len())?;
    writeln!(out, "depths       {depths:?}")?;
    writeln!(out, "components   {:?}", sizes.values().collect::<Vec<_>>())?;
    writeln!(out, "edges        {} (+{cross} cross-component)", saved.edges.len() - cross)?;
    writeln!(out, "delta        {}", fmt_g(saved.delta))?;
    writeln!(out, "epsilon      {}", fmt_g(saved.epsilon))?;
    writeln!(out, "epsilon_min  {}", fmt_g(saved.epsilon_min))?;
    if let Some(b) = &saved.bounds {
        write!(out, "{}", b.to_kv_text())?;
    }
    Ok(())
}
