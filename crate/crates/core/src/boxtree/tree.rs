use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, ResourceKind, Result};
use crate::ia::round::{add_down, add_up, mul_down, mul_up};
use crate::ia::{BoxRegion, Interval, Layout};
use crate::maps::MapModel;

/// Index of a live leaf. Valid until the next structural change of the tree.
pub type LeafId = u32;

/// Deepest level a tree may reach unless configured otherwise.
pub const DEFAULT_MAX_DEPTH: u8 = 24;

/// Grid address of a node: depth plus one grid index per real axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Address {
    pub depth: u8,
    pub idx: [u32; 4],
}

impl Address {
    pub const ROOT: Address = Address { depth: 0, idx: [0; 4] };

    /// Child number `j`: bit `k` of `j` selects the upper half along axis `k`.
    pub fn child(&self, j: usize, naxes: usize) -> Address {
        let mut idx = [0u32; 4];
        for k in 0..naxes {
            idx[k] = self.idx[k] * 2 + ((j >> k) & 1) as u32;
        }
        Address { depth: self.depth + 1, idx }
    }

    /// Ancestor at depth `d <= self.depth`.
    pub fn ancestor(&self, d: u8) -> Address {
        debug_assert!(d <= self.depth);
        let shift = self.depth - d;
        let mut idx = self.idx;
        for v in idx.iter_mut() {
            *v = v.checked_shr(shift as u32).unwrap_or(0);
        }
        Address { depth: d, idx }
    }

    /// Which child of its parent this address is.
    pub fn child_number(&self, naxes: usize) -> usize {
        (0..naxes).map(|k| ((self.idx[k] & 1) as usize) << k).sum()
    }

    /// Whether `other` lies in the subtree rooted here (inclusive).
    pub fn is_ancestor_of(&self, other: &Address) -> bool {
        other.depth >= self.depth && other.ancestor(self.depth) == *self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeStatus {
    Live,
    Pruned,
    Subdivided,
}

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
struct Node {
    addr: Address,
    status: NodeStatus,
    first_child: u32,
    parent: u32,
}

/// Summary of a [`BoxTree::subdivide`] call.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubdivideReport {
    pub selected: usize,
    pub leaves_before: usize,
    pub leaves_after: usize,
    /// Largest live side length afterwards.
    pub epsilon: f64,
}

/// Escaping-box elimination settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PruneOptions {
    pub forward: usize,
    /// Ignored for maps without an inverse.
    pub backward: usize,
    /// Stop iterating a leaf once its iterate is wider than `blowup * R'`.
    pub blowup: f64,
}

impl Default for PruneOptions {
    fn default() -> Self {
        PruneOptions { forward: 6, backward: 6, blowup: 8.0 }
    }
}

impl PruneOptions {
    pub fn symmetric(max_iter: usize) -> Self {
        PruneOptions { forward: max_iter, backward: max_iter, ..Default::default() }
    }
}

/// Adaptive `2^n`-ary subdivision tree over the trapping box `V0`.
///
/// Nodes live in an arena; the children of a subdivided node occupy a
/// contiguous block. Pruned leaves stay in the arena as placeholders until
/// [`compact`](Self::compact), which also drops fully pruned subtrees.
#[derive(Clone, Debug)]
pub struct BoxTree {
    map: MapModel,
    nodes: Vec<Node>,
    live: usize,
    max_depth: u8,
}

impl BoxTree {
    /// A single live leaf equal to `V0`.
    pub fn init_root(map: &MapModel) -> BoxTree {
        let root = Node { addr: Address::ROOT, status: NodeStatus::Live, first_child: NONE, parent: NONE };
        BoxTree { map: map.clone(), nodes: vec![root], live: 1, max_depth: DEFAULT_MAX_DEPTH }
    }

    pub fn with_max_depth(mut self, max_depth: u8) -> Self {
        self.max_depth = max_depth.min(31);
        self
    }

    /// Rebuilds a tree whose live leaves are exactly `leaves`.
    ///
    /// Fails if two addresses overlap or one lies outside the grid.
    pub fn from_leaves(map: &MapModel, leaves: &[Address]) -> Result<BoxTree> {
        let mut tree = BoxTree::init_root(map);
        let naxes = tree.naxes();
        let max_depth = leaves.iter().map(|a| a.depth).max().unwrap_or(0);
        tree.max_depth = tree.max_depth.max(max_depth);
        let mut claimed = vec![false; 1];
        for a in leaves {
            if a.depth > 31 {
                return Err(Error::parse(0, format!("depth {} too large", a.depth)));
            }
            let bound = 1u64 << a.depth;
            if a.idx[..naxes].iter().any(|&i| u64::from(i) >= bound) || a.idx[naxes..].iter().any(|&i| i != 0) {
                return Err(Error::parse(0, format!("address {a:?} outside the grid")));
            }
            let mut n = 0usize;
            loop {
                let node = tree.nodes[n];
                if claimed[n] {
                    return Err(Error::parse(0, format!("address {a:?} overlaps another leaf")));
                }
                if node.addr.depth == a.depth {
                    if node.status == NodeStatus::Subdivided {
                        return Err(Error::parse(0, format!("address {a:?} overlaps another leaf")));
                    }
                    claimed[n] = true;
                    break;
                }
                if node.status == NodeStatus::Live {
                    tree.split(n);
                    claimed.resize(tree.nodes.len(), false);
                }
                let child = a.ancestor(node.addr.depth + 1).child_number(naxes);
                n = tree.nodes[n].first_child as usize + child;
            }
        }
        let unclaimed: Vec<LeafId> = (0..tree.nodes.len())
            .filter(|&n| tree.nodes[n].status == NodeStatus::Live && !claimed[n])
            .map(|n| n as LeafId)
            .collect();
        tree.prune_leaves(&unclaimed);
        tree.compact();
        Ok(tree)
    }

    pub fn map(&self) -> &MapModel {
        &self.map
    }

    pub fn layout(&self) -> Layout {
        self.map.layout()
    }

    fn naxes(&self) -> usize {
        self.layout().naxes()
    }

    pub fn max_depth(&self) -> u8 {
        self.max_depth
    }

    /// Number of live leaves.
    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    /// Arena size, including subdivided nodes and pruned placeholders.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Approximate heap footprint in bytes.
    pub fn memory_bytes(&self) -> usize {
        self.nodes.capacity() * std::mem::size_of::<Node>()
    }

    /// Live leaf ids in arena order.
    pub fn live_leaves(&self) -> Vec<LeafId> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.status == NodeStatus::Live)
            .map(|(i, _)| i as LeafId)
            .collect()
    }

    pub fn status(&self, id: LeafId) -> NodeStatus {
        self.nodes[id as usize].status
    }

    pub fn address(&self, id: LeafId) -> Address {
        self.nodes[id as usize].addr
    }

    /// Box of a live leaf (or of any node id).
    pub fn leaf_box(&self, id: LeafId) -> BoxRegion {
        self.box_of(&self.nodes[id as usize].addr)
    }

    /// Side length `2R' / 2^depth`.
    pub fn side_at(&self, depth: u8) -> f64 {
        2.0 * self.map.rprime() * (-f64::from(depth)).exp2()
    }

    /// The closed box with the given grid address.
    pub fn box_of(&self, addr: &Address) -> BoxRegion {
        let rp = self.map.rprime();
        let side = self.side_at(addr.depth);
        let mut axes = [Interval::ZERO; 4];
        for (k, ax) in axes.iter_mut().enumerate().take(self.naxes()) {
            let i = f64::from(addr.idx[k]);
            let lo = add_down(-rp, mul_down(i, side));
            let hi = add_up(-rp, mul_up(i + 1.0, side));
            *ax = Interval::from_sorted(lo, hi);
        }
        BoxRegion::from_axes_unchecked(self.layout(), axes)
    }

    /// Largest live side length, `epsilon`. Zero for an empty tree.
    pub fn epsilon(&self) -> f64 {
        self.live_depths().min().map(|d| self.side_at(d)).unwrap_or(0.0)
    }

    /// Smallest live side length, `epsilon_min`.
    pub fn epsilon_min(&self) -> f64 {
        self.live_depths().max().map(|d| self.side_at(d)).unwrap_or(0.0)
    }

    fn live_depths(&self) -> impl Iterator<Item = u8> + '_ {
        self.nodes.iter().filter(|n| n.status == NodeStatus::Live).map(|n| n.addr.depth)
    }

    /// Live leaf count per depth, ascending by depth.
    pub fn depth_counts(&self) -> Vec<(u8, usize)> {
        let mut counts = std::collections::BTreeMap::new();
        for d in self.live_depths() {
            *counts.entry(d).or_insert(0usize) += 1;
        }
        counts.into_iter().collect()
    }

    fn split(&mut self, n: usize) {
        let naxes = self.naxes();
        let first = self.nodes.len() as u32;
        let addr = self.nodes[n].addr;
        for j in 0..(1usize << naxes) {
            self.nodes.push(Node {
                addr: addr.child(j, naxes),
                status: NodeStatus::Live,
                first_child: NONE,
                parent: n as u32,
            });
        }
        let node = &mut self.nodes[n];
        node.status = NodeStatus::Subdivided;
        node.first_child = first;
        self.live += (1 << naxes) - 1;
    }

    /// Replaces every selected live leaf by its `2^n` children.
    ///
    /// The selector sees each live leaf once (possibly from several threads).
    /// Refuses without modifying the tree if a selected leaf is already at
    /// the maximum depth.
    pub fn subdivide<F>(&mut self, selector: F) -> Result<SubdivideReport>
    where
        F: Fn(LeafId, &BoxRegion) -> bool + Sync,
    {
        let leaves = self.live_leaves();
        let chosen: Vec<LeafId> = leaves
            .par_iter()
            .filter(|&&id| selector(id, &self.leaf_box(id)))
            .copied()
            .collect();
        if let Some(&id) = chosen.iter().find(|&&id| self.nodes[id as usize].addr.depth >= self.max_depth) {
            return Err(Error::Resource {
                what: ResourceKind::DepthLimit,
                detail: format!("leaf {:?} is at the depth limit {}", self.address(id), self.max_depth),
            });
        }
        let before = self.live;
        self.nodes.reserve(chosen.len() << self.naxes());
        for &id in &chosen {
            self.split(id as usize);
        }
        Ok(SubdivideReport {
            selected: chosen.len(),
            leaves_before: before,
            leaves_after: self.live,
            epsilon: self.epsilon(),
        })
    }

    pub fn subdivide_uniform(&mut self) -> Result<SubdivideReport> {
        self.subdivide(|_, _| true)
    }

    /// Marks the given live leaves pruned; fully pruned parents become pruned too.
    pub fn prune_leaves(&mut self, ids: &[LeafId]) {
        let fanout = 1usize << self.naxes();
        for &id in ids {
            let n = id as usize;
            if self.nodes[n].status != NodeStatus::Live {
                continue;
            }
            self.nodes[n].status = NodeStatus::Pruned;
            self.live -= 1;
            let mut p = self.nodes[n].parent;
            while p != NONE {
                let first = self.nodes[p as usize].first_child as usize;
                if self.nodes[first..first + fanout].iter().any(|c| c.status != NodeStatus::Pruned) {
                    break;
                }
                self.nodes[p as usize].status = NodeStatus::Pruned;
                p = self.nodes[p as usize].parent;
            }
        }
    }

    /// Rebuilds the arena without pruned subtrees. Invalidates leaf ids.
    pub fn compact(&mut self) {
        let fanout = 1usize << self.naxes();
        let mut out: Vec<Node> = Vec::with_capacity(self.nodes.len());
        let mut root = self.nodes[0];
        root.parent = NONE;
        if root.status == NodeStatus::Pruned {
            root.first_child = NONE;
        }
        out.push(root);
        // `out[i].first_child` still refers to the old arena until `i` is visited.
        let mut i = 0;
        while i < out.len() {
            if out[i].status == NodeStatus::Subdivided {
                let old_first = out[i].first_child as usize;
                let new_first = out.len() as u32;
                for c in &self.nodes[old_first..old_first + fanout] {
                    let mut c = *c;
                    c.parent = i as u32;
                    if c.status == NodeStatus::Pruned {
                        c.first_child = NONE;
                    }
                    out.push(c);
                }
                out[i].first_child = new_first;
            }
            i += 1;
        }
        out.shrink_to_fit();
        self.nodes = out;
    }

    /// Live leaves whose closed boxes meet `probe`.
    pub fn query_intersect(&self, probe: &BoxRegion) -> Vec<LeafId> {
        let mut out = Vec::new();
        self.query_intersect_into(probe, &mut out);
        out
    }

    /// Appends matching live leaves to `out`, in arena order of discovery.
    pub fn query_intersect_into(&self, probe: &BoxRegion, out: &mut Vec<LeafId>) {
        debug_assert_eq!(probe.layout(), self.layout());
        let fanout = 1usize << self.naxes();
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            if node.status == NodeStatus::Pruned || !self.box_of(&node.addr).intersects(probe) {
                continue;
            }
            match node.status {
                NodeStatus::Live => out.push(n as LeafId),
                NodeStatus::Subdivided => {
                    let first = node.first_child as usize;
                    stack.extend((first..first + fanout).rev());
                }
                NodeStatus::Pruned => {}
            }
        }
    }

    /// Whether some forward or backward interval iterate of `b` misses `V0`.
    pub fn escapes(&self, b: &BoxRegion, opts: &PruneOptions) -> bool {
        let v0 = self.map.v0();
        let limit = opts.blowup * self.map.rprime();
        let mut cur = *b;
        for _ in 0..opts.forward {
            cur = self.map.image(&cur);
            if !cur.intersects(&v0) {
                return true;
            }
            if cur.side_length() > limit {
                break;
            }
        }
        if let Some(inv_a) = self.map.inverse_factor() {
            let mut cur = *b;
            for _ in 0..opts.backward {
                cur = self.map.preimage_with(&cur, inv_a);
                if !cur.intersects(&v0) {
                    return true;
                }
                if cur.side_length() > limit {
                    break;
                }
            }
        }
        false
    }

    /// Prunes every live leaf certified to contain no point whose orbit stays in `V0`.
    pub fn prune_escaping_with(&mut self, opts: &PruneOptions) -> usize {
        let doomed: Vec<LeafId> = self
            .live_leaves()
            .into_par_iter()
            .filter(|&id| self.escapes(&self.leaf_box(id), opts))
            .collect();
        self.prune_leaves(&doomed);
        doomed.len()
    }

    /// [`prune_escaping_with`](Self::prune_escaping_with) using `max_iter`
    /// forward and backward iterates.
    pub fn prune_escaping(&mut self, max_iter: usize) -> Result<usize> {
        if max_iter == 0 {
            return Err(Error::usage("prune max_iter must be at least 1"));
        }
        Ok(self.prune_escaping_with(&PruneOptions::symmetric(max_iter)))
    }
}
