use super::ChainGraph;

/// Component ids of vertices lying on a cycle.
///
/// Components are numbered by decreasing size, ties broken by smallest member
/// vertex, so the labeling depends only on the graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SccLabeling {
    labels: Vec<Option<u32>>,
    sizes: Vec<usize>,
}

impl SccLabeling {
    /// Component of `v`, or `None` if `v` lies on no cycle.
    pub fn component(&self, v: u32) -> Option<u32> {
        self.labels[v as usize]
    }

    pub fn labels(&self) -> &[Option<u32>] {
        &self.labels
    }

    /// Sizes indexed by component id (non-increasing).
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn component_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn labeled_count(&self) -> usize {
        self.sizes.iter().sum()
    }
}

const UNVISITED: u32 = u32::MAX;

/// Tarjan's algorithm with an explicit stack.
pub fn scc_decompose(graph: &ChainGraph) -> SccLabeling {
    let n = graph.vertex_count();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    // (vertex, position in its out-edge list)
    let mut call: Vec<(u32, usize)> = Vec::new();
    let mut next = 0u32;
    let mut raw: Vec<Vec<u32>> = Vec::new();

    for root in 0..n as u32 {
        if index[root as usize] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        index[root as usize] = next;
        low[root as usize] = next;
        next += 1;
        stack.push(root);
        on_stack[root as usize] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            let out = graph.out_edges(v);
            if *pos < out.len() {
                let w = out[*pos];
                *pos += 1;
                if index[w as usize] == UNVISITED {
                    index[w as usize] = next;
                    low[w as usize] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w as usize] = true;
                    call.push((w, 0));
                } else if on_stack[w as usize] {
                    low[v as usize] = low[v as usize].min(index[w as usize]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent as usize] = low[parent as usize].min(low[v as usize]);
            }
            if low[v as usize] == index[v as usize] {
                let mut members = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w as usize] = false;
                    members.push(w);
                    if w == v {
                        break;
                    }
                }
                if members.len() > 1 || graph.has_edge(v, v) {
                    raw.push(members);
                }
            }
        }
    }

    let mut order: Vec<(usize, u32, usize)> =
        raw.iter().enumerate().map(|(i, m)| (m.len(), *m.iter().min().unwrap(), i)).collect();
    order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut labels = vec![None; n];
    let mut sizes = Vec::with_capacity(order.len());
    for (id, &(size, _, i)) in order.iter().enumerate() {
        for &v in &raw[i] {
            labels[v as usize] = Some(id as u32);
        }
        sizes.push(size);
    }
    SccLabeling { labels, sizes }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_cycle_is_one_component() {
        let g = ChainGraph::from_edges(2, &[(0, 1), (1, 0)]).unwrap();
        let l = scc_decompose(&g);
        assert_eq!(l.sizes(), &[2]);
        assert_eq!(l.component(0), l.component(1));
    }

    #[test]
    fn isolated_vertex_unlabeled_unless_self_loop() {
        let g = ChainGraph::from_edges(3, &[(1, 1)]).unwrap();
        let l = scc_decompose(&g);
        assert_eq!(l.labels(), &[None, Some(0), None]);
    }

    #[test]
    fn size_order_then_smallest_vertex() {
        let g = ChainGraph::from_edges(7, &[(5, 6), (6, 5), (0, 0), (1, 2), (2, 3), (3, 1), (4, 4)]).unwrap();
        let l = scc_decompose(&g);
        assert_eq!(l.sizes(), &[3, 2, 1, 1]);
        assert_eq!(l.component(1), Some(0));
        assert_eq!(l.component(5), Some(1));
        assert_eq!(l.component(0), Some(2));
        assert_eq!(l.component(4), Some(3));
    }

    #[test]
    fn long_path_does_not_overflow() {
        let n = 1_000_000u32;
        let mut edges: Vec<(u32, u32)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        edges.push((n - 1, 0));
        let g = ChainGraph::from_edges(n as usize, &edges).unwrap();
        assert_eq!(scc_decompose(&g).sizes(), &[n as usize]);
    }
}
