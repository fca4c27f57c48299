use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bounds::{bounds_report, BoundsReport};
use crate::boxtree::{
    sink_basin_selector, BoxTree, PruneOptions, DEFAULT_SINK_ITERATES, DEFAULT_SINK_THRESHOLD,
};
use crate::chain_graph::{
    build_edges_with_budget, classify_components, recurrent_model, scc_decompose, sink_points, ComponentReport,
    RecurrentModel, SinkPoint, DEFAULT_DELTA_RATIO,
};
use crate::error::{Error, Result};
use crate::maps::{fixed_points, MapModel};

/// One refinement step of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Uniform,
    SinkBasin,
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepKind::Uniform => "uniform",
            StepKind::SinkBasin => "sink_basin",
        })
    }
}

/// A nonempty list of steps, written like `uniform*6,sink_basin*2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule(pub Vec<StepKind>);

impl FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut steps = Vec::new();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (name, count) = match item.split_once(['*', 'x']) {
                Some((n, c)) => {
                    let c: usize =
                        c.trim().parse().map_err(|_| Error::usage(format!("bad repeat count in '{item}'")))?;
                    (n.trim(), c)
                }
                None => (item, 1),
            };
            let kind = match name {
                "uniform" | "u" => StepKind::Uniform,
                "sink_basin" | "sink" | "s" => StepKind::SinkBasin,
                _ => return Err(Error::usage(format!("unknown step '{name}'"))),
            };
            steps.extend(std::iter::repeat_n(kind, count));
        }
        if steps.is_empty() {
            return Err(Error::usage("schedule must contain at least one step"));
        }
        Ok(Schedule(steps))
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut groups: Vec<(StepKind, usize)> = Vec::new();
        for &k in &self.0 {
            match groups.last_mut() {
                Some((g, n)) if *g == k => *n += 1,
                _ => groups.push((k, 1)),
            }
        }
        let parts: Vec<String> = groups.iter().map(|(k, n)| format!("{k}*{n}")).collect();
        f.write_str(&parts.join(","))
    }
}

/// Everything a run needs besides the map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub schedule: Schedule,
    /// `delta = epsilon_min / delta_ratio`.
    pub delta_ratio: f64,
    pub prune: PruneOptions,
    /// Edge storage budget in bytes.
    pub mem_budget: Option<usize>,
    pub sink_iterates: usize,
    pub sink_threshold: f64,
    /// Longest sink cycle searched for when classifying components.
    pub max_sink_period: usize,
    pub conservative_bounds: bool,
}

impl RunConfig {
    pub fn new(schedule: Schedule) -> Self {
        RunConfig {
            schedule,
            delta_ratio: 1.0 / DEFAULT_DELTA_RATIO,
            prune: PruneOptions::default(),
            mem_budget: None,
            sink_iterates: DEFAULT_SINK_ITERATES,
            sink_threshold: DEFAULT_SINK_THRESHOLD,
            max_sink_period: 12,
            conservative_bounds: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schedule.0.is_empty() {
            return Err(Error::usage("schedule must contain at least one step"));
        }
        if !(self.delta_ratio > 1.0) {
            return Err(Error::usage(format!("delta ratio must exceed 1, got {}", self.delta_ratio)));
        }
        if self.prune.forward == 0 {
            return Err(Error::usage("prune iterations must be at least 1"));
        }
        if !(self.sink_threshold > 0.0 && self.sink_threshold <= 1.0) || self.sink_iterates == 0 {
            return Err(Error::usage("sink selector needs iterates >= 1 and threshold in (0, 1]"));
        }
        Ok(())
    }
}

/// Counts and bounds for one pipeline step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub kind: StepKind,
    pub subdivided: usize,
    /// Live boxes after subdivision.
    pub boxes: usize,
    pub escaping: usize,
    /// Vertices of the box chain model.
    pub graph_boxes: usize,
    pub graph_edges: usize,
    pub gamma_boxes: usize,
    pub gamma_edges: usize,
    pub cross_edges: usize,
    pub components: usize,
    /// Up to ten largest component sizes.
    pub largest_components: Vec<usize>,
    pub depths: Vec<(u8, usize)>,
    pub epsilon_min: f64,
    pub bounds: BoundsReport,
    pub separating: bool,
    pub sinks_covered: bool,
    pub fixed_points_covered: bool,
    pub seconds: f64,
    pub memory_bytes: usize,
}

/// All steps of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub map: String,
    pub schedule: String,
    pub sink_cycles: Vec<usize>,
    pub steps: Vec<StepRecord>,
}

/// A run in progress: tree, current model and record.
pub struct Pipeline {
    config: RunConfig,
    tree: BoxTree,
    sinks: Vec<SinkPoint>,
    model: Option<RecurrentModel>,
    components: Option<ComponentReport>,
    record: RunRecord,
    last_delta: Option<f64>,
}

impl Pipeline {
    /// Step (0): the trapping box as a single live leaf.
    pub fn new(map: &MapModel, config: RunConfig) -> Result<Pipeline> {
        config.validate()?;
        let sinks = sink_points(map, config.max_sink_period);
        let record = RunRecord {
            map: map.describe(),
            schedule: config.schedule.to_string(),
            sink_cycles: sinks.iter().map(|s| s.period).collect(),
            steps: Vec::new(),
        };
        Ok(Pipeline {
            tree: BoxTree::init_root(map),
            config,
            sinks,
            model: None,
            components: None,
            record,
            last_delta: None,
        })
    }

    pub fn tree(&self) -> &BoxTree {
        &self.tree
    }

    pub fn model(&self) -> Option<&RecurrentModel> {
        self.model.as_ref()
    }

    pub fn components(&self) -> Option<&ComponentReport> {
        self.components.as_ref()
    }

    pub fn record(&self) -> &RunRecord {
        &self.record
    }

    pub fn sinks(&self) -> &[SinkPoint] {
        &self.sinks
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    /// Runs the whole schedule, calling `on_step` after each step.
    pub fn run<F: FnMut(&StepRecord)>(&mut self, mut on_step: F) -> Result<()> {
        let steps = self.config.schedule.0.clone();
        for kind in steps {
            let rec = self.step(kind)?;
            on_step(rec);
        }
        Ok(())
    }

    /// Subdivide, prune escaping boxes, build edges, keep the recurrent part.
    pub fn step(&mut self, kind: StepKind) -> Result<&StepRecord> {
        let start = Instant::now();
        let map = self.tree.map().clone();
        let sub = match kind {
            StepKind::Uniform => self.tree.subdivide_uniform()?,
            StepKind::SinkBasin => {
                let sel = sink_basin_selector(&self.tree, self.config.sink_iterates, self.config.sink_threshold);
                self.tree.subdivide(|_, b| sel.select(b))?
            }
        };
        let escaping = self.tree.prune_escaping_with(&self.config.prune);
        self.tree.compact();
        let graph_boxes = self.tree.len();

        // delta_{n+1} <= delta_n / 2 is kept even when a selective step leaves
        // the smallest box size unchanged.
        let mut delta = self.tree.epsilon_min() / self.config.delta_ratio;
        if let Some(prev) = self.last_delta {
            delta = delta.min(prev / 2.0);
        }
        let (graph, model, peak) = if graph_boxes == 0 {
            (None, None, self.tree.memory_bytes())
        } else {
            let graph = build_edges_with_budget(&self.tree, delta, self.config.mem_budget)?;
            let labeling = scc_decompose(&graph);
            let model = recurrent_model(&graph, &labeling, Some(&mut self.tree));
            let peak = self.tree.memory_bytes() + graph.memory_bytes() + model.gamma.memory_bytes();
            (Some(graph), Some(model), peak)
        };
        self.tree.compact();
        self.last_delta = Some(delta);

        let empty = RecurrentModel {
            gamma: crate::chain_graph::ChainGraph::from_edges(0, &[])?,
            components: Vec::new(),
            sizes: Vec::new(),
            cross_edges: Vec::new(),
        };
        let m = model.as_ref().unwrap_or(&empty);
        let report = classify_components(m, &self.tree, &self.sinks);
        let fixed_points_covered = fixed_points(&map)
            .iter()
            .all(|f| !self.tree.query_intersect(&map.point_box(&f.location)).is_empty());
        let epsilon = if self.tree.is_empty() { 0.0 } else { self.tree.epsilon() };
        let bounds = bounds_report(&map, epsilon, delta, self.config.conservative_bounds);

        let rec = StepRecord {
            step: self.record.steps.len() + 1,
            kind,
            subdivided: sub.selected,
            boxes: sub.leaves_after,
            escaping,
            graph_boxes,
            graph_edges: graph.as_ref().map_or(0, |g| g.edge_count()),
            gamma_boxes: m.gamma.vertex_count(),
            gamma_edges: m.gamma.edge_count(),
            cross_edges: m.cross_edges.len(),
            components: m.component_count(),
            largest_components: m.sizes.iter().take(10).copied().collect(),
            depths: self.tree.depth_counts(),
            epsilon_min: self.tree.epsilon_min(),
            bounds,
            separating: report.separating,
            sinks_covered: report.sinks_covered,
            fixed_points_covered,
            seconds: start.elapsed().as_secs_f64(),
            memory_bytes: peak,
        };
        self.model = model;
        self.components = Some(report);
        self.record.steps.push(rec);
        Ok(self.record.steps.last().expect("just pushed"))
    }
}
