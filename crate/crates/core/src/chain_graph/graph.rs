use rayon::prelude::*;

use crate::boxtree::{Address, BoxTree, LeafId};
use crate::error::{Error, ResourceKind, Result};
use crate::ia::BoxRegion;

/// Bytes charged per stored edge against the memory budget.
pub const BYTES_PER_EDGE: usize = 8;

/// Default edge fattening: `delta = epsilon_min / 1000`.
pub const DEFAULT_DELTA_RATIO: f64 = 1.0 / 1000.0;

/// Directed graph on boxes with compressed sparse row adjacency.
///
/// Vertex `v` corresponds to the box with grid address `addresses()[v]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainGraph {
    pub(crate) leaves: Vec<LeafId>,
    pub(crate) addresses: Vec<Address>,
    pub(crate) offsets: Vec<usize>,
    pub(crate) targets: Vec<u32>,
    pub delta: f64,
    pub epsilon: f64,
    pub epsilon_min: f64,
}

impl ChainGraph {
    /// A graph from explicit adjacency lists; targets are sorted and deduplicated.
    pub fn from_adjacency(addresses: Vec<Address>, adjacency: Vec<Vec<u32>>) -> Result<ChainGraph> {
        if addresses.len() != adjacency.len() {
            return Err(Error::usage("one adjacency list per vertex required"));
        }
        let n = addresses.len();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for mut out in adjacency {
            out.sort_unstable();
            out.dedup();
            if out.last().is_some_and(|&t| t as usize >= n) {
                return Err(Error::usage("edge target out of range"));
            }
            targets.extend(out);
            offsets.push(targets.len());
        }
        Ok(ChainGraph {
            leaves: vec![u32::MAX; n],
            addresses,
            offsets,
            targets,
            delta: 0.0,
            epsilon: 0.0,
            epsilon_min: 0.0,
        })
    }

    /// A graph on `n` anonymous vertices, for algorithms that ignore geometry.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<ChainGraph> {
        let mut adj = vec![Vec::new(); n];
        for &(s, t) in edges {
            adj.get_mut(s as usize).ok_or_else(|| Error::usage("edge source out of range"))?.push(t);
        }
        ChainGraph::from_adjacency(vec![crate::boxtree::Address::ROOT; n], adj)
    }

    pub fn vertex_count(&self) -> usize {
        self.addresses.len()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    /// Sorted out-neighbours of `v`.
    pub fn out_edges(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn has_edge(&self, s: u32, t: u32) -> bool {
        self.out_edges(s).binary_search(&t).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.vertex_count() as u32).flat_map(move |s| self.out_edges(s).iter().map(move |&t| (s, t)))
    }

    pub fn addresses(&self) -> &[Address] {
        &self.addresses
    }

    /// Tree leaf ids at build time; stale once the tree changes shape.
    pub fn leaves(&self) -> &[LeafId] {
        &self.leaves
    }

    /// Approximate heap footprint in bytes.
    pub fn memory_bytes(&self) -> usize {
        self.targets.capacity() * 4
            + self.offsets.capacity() * std::mem::size_of::<usize>()
            + self.addresses.capacity() * std::mem::size_of::<Address>()
            + self.leaves.capacity() * 4
    }
}

/// Whether the box chain model has an edge `B_k -> B_j`: `F(B_k)` meets `N_delta(B_j)`.
#[inline]
pub fn edge_predicate(image_k: &BoxRegion, b_j: &BoxRegion, delta: f64) -> bool {
    image_k.intersects(&b_j.widen(delta))
}

/// Builds the box chain model on the live leaves of `tree`.
pub fn build_edges(tree: &BoxTree, delta: f64) -> Result<ChainGraph> {
    build_edges_with_budget(tree, delta, None)
}

/// As [`build_edges`], aborting once the edge storage would exceed `budget` bytes.
pub fn build_edges_with_budget(tree: &BoxTree, delta: f64, budget: Option<usize>) -> Result<ChainGraph> {
    if !(delta > 0.0) {
        return Err(Error::usage(format!("delta must be positive, got {delta}")));
    }
    let leaves = tree.live_leaves();
    if leaves.is_empty() {
        return Err(Error::usage("tree has no live leaves"));
    }
    let mut vertex_of = vec![u32::MAX; tree.node_count()];
    for (v, &id) in leaves.iter().enumerate() {
        vertex_of[id as usize] = v as u32;
    }
    let map = tree.map();
    let n = leaves.len();
    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0usize);
    let mut targets: Vec<u32> = Vec::new();

    const CHUNK: usize = 1 << 14;
    for (ci, chunk) in leaves.chunks(CHUNK).enumerate() {
        let lists: Vec<Vec<u32>> = chunk
            .par_iter()
            .map_init(Vec::new, |hits, &id| {
                let image = map.image(&tree.leaf_box(id));
                // The query uses a slightly larger probe; the literal predicate
                // then decides each candidate, so rounding in the two widenings
                // cannot drop or add edges.
                hits.clear();
                tree.query_intersect_into(&image.widen(2.0 * delta), hits);
                let mut out: Vec<u32> = hits
                    .iter()
                    .filter(|&&j| edge_predicate(&image, &tree.leaf_box(j), delta))
                    .map(|&j| vertex_of[j as usize])
                    .collect();
                out.sort_unstable();
                out
            })
            .collect();
        let added: usize = lists.iter().map(Vec::len).sum();
        if let Some(limit) = budget {
            let needed = (targets.len() + added) * BYTES_PER_EDGE;
            if needed > limit {
                let done = ci * CHUNK;
                return Err(Error::Resource {
                    what: ResourceKind::MemoryBudget,
                    detail: format!(
                        "{} edges from {done} of {n} vertices would need {needed} bytes, budget {limit}",
                        targets.len() + added
                    ),
                });
            }
        }
        targets.reserve(added);
        for l in lists {
            targets.extend(l);
            offsets.push(targets.len());
        }
    }
    targets.shrink_to_fit();
    Ok(ChainGraph {
        addresses: leaves.iter().map(|&id| tree.address(id)).collect(),
        leaves,
        offsets,
        targets,
        delta,
        epsilon: tree.epsilon(),
        epsilon_min: tree.epsilon_min(),
    })
}
