use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{ChainGraph, SccLabeling};
use crate::boxtree::{Address, BoxTree};
use crate::maps::{find_sink_cycles, fixed_points, MapModel, Point, Stability};

/// The recurrent subgraph `Gamma`: vertices on cycles and the edges inside their components.
#[derive(Clone, Debug, PartialEq)]
pub struct RecurrentModel {
    pub gamma: ChainGraph,
    /// Component id of each `gamma` vertex.
    pub components: Vec<u32>,
    /// Component sizes indexed by id, non-increasing.
    pub sizes: Vec<usize>,
    /// Edges of the full graph joining different components, in `gamma` numbering.
    /// They lie on no cycle and are kept only as flagged extra information.
    pub cross_edges: Vec<(u32, u32)>,
}

impl RecurrentModel {
    pub fn component_count(&self) -> usize {
        self.sizes.len()
    }
}

/// Restricts `graph` to its labeled vertices and prunes every other leaf from `tree`.
///
/// `tree` must be the tree `graph` was built from, unchanged since.
pub fn recurrent_model(graph: &ChainGraph, labeling: &SccLabeling, tree: Option<&mut BoxTree>) -> RecurrentModel {
    let n = graph.vertex_count();
    let mut new_id = vec![u32::MAX; n];
    let mut kept = Vec::new();
    for v in 0..n {
        if labeling.component(v as u32).is_some() {
            new_id[v] = kept.len() as u32;
            kept.push(v as u32);
        }
    }
    let mut offsets = Vec::with_capacity(kept.len() + 1);
    offsets.push(0);
    let mut targets = Vec::new();
    let mut cross_edges = Vec::new();
    let mut components = Vec::with_capacity(kept.len());
    for &v in &kept {
        let cv = labeling.component(v).expect("kept vertices are labeled");
        components.push(cv);
        for &w in graph.out_edges(v) {
            match labeling.component(w) {
                Some(cw) if cw == cv => targets.push(new_id[w as usize]),
                Some(_) => cross_edges.push((new_id[v as usize], new_id[w as usize])),
                None => {}
            }
        }
        offsets.push(targets.len());
    }
    if let Some(tree) = tree {
        let dropped: Vec<u32> = (0..n).filter(|&v| new_id[v] == u32::MAX).map(|v| graph.leaves[v]).collect();
        debug_assert!(dropped.iter().all(|&id| id != u32::MAX));
        tree.prune_leaves(&dropped);
    }
    let gamma = ChainGraph {
        leaves: kept.iter().map(|&v| graph.leaves[v as usize]).collect(),
        addresses: kept.iter().map(|&v| graph.addresses[v as usize]).collect(),
        offsets,
        targets,
        delta: graph.delta,
        epsilon: graph.epsilon,
        epsilon_min: graph.epsilon_min,
    };
    RecurrentModel { gamma, components, sizes: labeling.sizes().to_vec(), cross_edges }
}

/// A point of an attracting cycle found numerically.
#[derive(Clone, Debug, PartialEq)]
pub struct SinkPoint {
    pub point: Point,
    pub period: usize,
}

/// Points of sink fixed points and of attracting cycles up to `max_period`.
///
/// The cycle search is numerical and may miss sinks with tiny basins.
pub fn sink_points(map: &MapModel, max_period: usize) -> Vec<SinkPoint> {
    let mut out: Vec<SinkPoint> = fixed_points(map)
        .into_iter()
        .filter(|f| f.classification == Stability::Sink)
        .map(|f| SinkPoint { point: f.location, period: 1 })
        .collect();
    for orbit in find_sink_cycles(map, max_period) {
        for p in &orbit.points {
            let dup = out.iter().any(|s| map.sup_norm(&[s.point[0] - p[0], s.point[1] - p[1]]) < 1e-8);
            if !dup {
                out.push(SinkPoint { point: *p, period: orbit.period() });
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SinkLocation {
    /// Real coordinates in box axis order.
    pub point: Vec<f64>,
    pub period: usize,
    /// Components whose boxes contain the point (empty if uncovered).
    pub components: Vec<u32>,
}

/// Component classification of a recurrent model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub component_sizes: Vec<usize>,
    /// The largest component, the candidate for the part containing `J`.
    pub j_candidate: Option<u32>,
    pub sink_components: Vec<u32>,
    pub sinks: Vec<SinkLocation>,
    /// Every sink point lies in boxes of `Gamma`.
    pub sinks_covered: bool,
    /// Some sink is found and none of its boxes belongs to the `J` candidate.
    pub separating: bool,
}

/// Locates the given sink points in `model` and decides separation.
///
/// `tree`'s live leaves must be the vertices of `model.gamma`.
pub fn classify_components(model: &RecurrentModel, tree: &BoxTree, sinks: &[SinkPoint]) -> ComponentReport {
    let map = tree.map();
    let vertex_of: HashMap<Address, u32> =
        model.gamma.addresses().iter().enumerate().map(|(v, a)| (*a, v as u32)).collect();
    let j_candidate = if model.sizes.is_empty() { None } else { Some(0) };
    let mut located = Vec::with_capacity(sinks.len());
    for s in sinks {
        let mut comps: Vec<u32> = tree
            .query_intersect(&map.point_box(&s.point))
            .into_iter()
            .filter_map(|id| vertex_of.get(&tree.address(id)))
            .map(|&v| model.components[v as usize])
            .collect();
        comps.sort_unstable();
        comps.dedup();
        located.push(SinkLocation { point: map.point_axes(&s.point), period: s.period, components: comps });
    }
    let mut sink_components: Vec<u32> = located.iter().flat_map(|s| s.components.iter().copied()).collect();
    sink_components.sort_unstable();
    sink_components.dedup();
    let sinks_covered = located.iter().all(|s| !s.components.is_empty());
    let separating = !located.is_empty()
        && located.iter().all(|s| !s.components.is_empty() && s.components.iter().all(|&c| Some(c) != j_candidate));
    ComponentReport {
        component_sizes: model.sizes.clone(),
        j_candidate,
        sink_components,
        sinks: located,
        sinks_covered,
        separating,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain_graph::scc_decompose;

    #[test]
    fn chain_without_return_is_empty() {
        let g = ChainGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let m = recurrent_model(&g, &scc_decompose(&g), None);
        assert_eq!(m.gamma.vertex_count(), 0);
    }

    #[test]
    fn cycle_with_pendant() {
        let g = ChainGraph::from_edges(3, &[(0, 1), (1, 0), (1, 2)]).unwrap();
        let m = recurrent_model(&g, &scc_decompose(&g), None);
        assert_eq!(m.gamma.vertex_count(), 2);
        assert_eq!(m.gamma.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn cross_edges_are_flagged() {
        let g = ChainGraph::from_edges(3, &[(0, 1), (1, 0), (1, 2), (2, 2)]).unwrap();
        let m = recurrent_model(&g, &scc_decompose(&g), None);
        assert_eq!(m.gamma.vertex_count(), 3);
        assert_eq!(m.cross_edges, vec![(1, 2)]);
        assert!(!m.gamma.has_edge(1, 2));
    }
}
