//! Reachability augmentation: add an edge to every descendant.
//!
//! A package transitively depends on everything its dependencies pull in, so
//! the analysis graph gains an edge `(u, v)` for every node `v` reachable
//! from `u` over at least one edge. Cycles are handled by condensing strongly
//! connected components first, closing the resulting DAG in reverse
//! topological order, and expanding back to nodes. Self-loops are never
//! produced and the operation is idempotent.

use crate::error::{Error, Result};
use crate::graph::{DependencyGraph, GraphBuilder, NodeId};

/// Tuning knobs for [`descendant_closure`].
#[derive(Debug, Clone)]
pub struct ClosureOptions {
    /// Abort when the closed graph would exceed this many edges.
    pub edge_budget: u64,
}

impl Default for ClosureOptions {
    fn default() -> Self {
        ClosureOptions {
            edge_budget: 50_000_000,
        }
    }
}

/// Fixed-width bitset over component ids.
#[derive(Clone)]
struct BitSet {
    blocks: Vec<u64>,
}

impl BitSet {
    fn new(bits: usize) -> Self {
        BitSet {
            blocks: vec![0; bits.div_ceil(64)],
        }
    }

    fn insert(&mut self, bit: usize) {
        self.blocks[bit / 64] |= 1u64 << (bit % 64);
    }

    fn union_with(&mut self, other: &BitSet) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a |= b;
        }
    }

    fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().enumerate().flat_map(|(i, &block)| {
            let mut b = block;
            std::iter::from_fn(move || {
                if b == 0 {
                    None
                } else {
                    let bit = b.trailing_zeros() as usize;
                    b &= b - 1;
                    Some(i * 64 + bit)
                }
            })
        })
    }
}

/// Strongly connected components in reverse topological order of the
/// condensation: every component precedes the components that reach it.
fn tarjan_scc(g: &DependencyGraph) -> (Vec<u32>, usize) {
    const UNVISITED: u32 = u32::MAX;
    let n = g.node_count();
    let mut index = vec![UNVISITED; n];
    let mut lowlink = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNVISITED; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut next_index = 0u32;
    let mut comp_count = 0usize;

    // Explicit DFS frames: (node, position in its out-adjacency list).
    let mut frames: Vec<(u32, usize)> = Vec::new();
    for root in 0..n as u32 {
        if index[root as usize] != UNVISITED {
            continue;
        }
        frames.push((root, 0));
        index[root as usize] = next_index;
        lowlink[root as usize] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root as usize] = true;

        while let Some(&mut (v, ref mut pos)) = frames.last_mut() {
            let out = g.out_neighbors(NodeId(v));
            if *pos < out.len() {
                let w = out[*pos].0;
                *pos += 1;
                if index[w as usize] == UNVISITED {
                    index[w as usize] = next_index;
                    lowlink[w as usize] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w as usize] = true;
                    frames.push((w, 0));
                } else if on_stack[w as usize] {
                    lowlink[v as usize] = lowlink[v as usize].min(index[w as usize]);
                }
            } else {
                frames.pop();
                if let Some(&mut (parent, _)) = frames.last_mut() {
                    lowlink[parent as usize] = lowlink[parent as usize].min(lowlink[v as usize]);
                }
                if lowlink[v as usize] == index[v as usize] {
                    loop {
                        let w = stack.pop().expect("stack holds the open component");
                        on_stack[w as usize] = false;
                        comp[w as usize] = comp_count as u32;
                        if w == v {
                            break;
                        }
                    }
                    comp_count += 1;
                }
            }
        }
    }
    (comp, comp_count)
}

/// Returns a graph augmented with an edge from every node to each of its
/// descendants (reachable over one or more edges, excluding itself unless it
/// lies on a cycle, in which case the self edge is still dropped).
pub fn descendant_closure(g: &DependencyGraph, options: &ClosureOptions) -> Result<DependencyGraph> {
    let n = g.node_count();
    let (comp, comp_count) = tarjan_scc(g);

    // Dense per-component reach sets; refuse sizes where they stop being viable.
    const MAX_BITSET_BYTES: u64 = 256 * 1024 * 1024;
    if (comp_count as u64).pow(2) / 8 > MAX_BITSET_BYTES {
        return Err(Error::ClosureBudget {
            budget: options.edge_budget,
        });
    }

    let mut members: Vec<Vec<u32>> = vec![Vec::new(); comp_count];
    for v in 0..n {
        members[comp[v] as usize].push(v as u32);
    }

    // Component ids come out of Tarjan in reverse topological order, so every
    // successor component is finished before the components that point at it.
    let mut reach: Vec<BitSet> = Vec::with_capacity(comp_count);
    for c in 0..comp_count {
        let mut set = BitSet::new(comp_count);
        for &v in &members[c] {
            for &t in g.out_neighbors(NodeId(v)) {
                let d = comp[t.index()] as usize;
                if d != c {
                    set.insert(d);
                    set.union_with(&reach[d]);
                }
            }
        }
        reach.push(set);
    }

    // Count closed edges before materializing anything.
    let mut total_edges = 0u64;
    for c in 0..comp_count {
        let cyclic = members[c].len() > 1;
        let mut reachable_nodes = 0u64;
        for d in reach[c].iter_ones() {
            reachable_nodes += members[d].len() as u64;
        }
        if cyclic {
            reachable_nodes += members[c].len() as u64 - 1;
        }
        total_edges += reachable_nodes * members[c].len() as u64;
        if total_edges > options.edge_budget {
            return Err(Error::ClosureBudget {
                budget: options.edge_budget,
            });
        }
    }

    let mut builder = GraphBuilder::new();
    for v in g.node_ids() {
        let id = builder
            .add_node(g.label(v).to_owned())
            .expect("labels in a frozen graph are unique");
        if g.is_external(v) {
            builder.mark_external(id);
        }
    }
    for c in 0..comp_count {
        let mut targets: Vec<u32> = Vec::new();
        for d in reach[c].iter_ones() {
            targets.extend_from_slice(&members[d]);
        }
        let cyclic = members[c].len() > 1;
        for &u in &members[c] {
            for &t in &targets {
                builder.add_edge(NodeId(u), NodeId(t))?;
            }
            if cyclic {
                for &w in &members[c] {
                    if w != u {
                        builder.add_edge(NodeId(u), NodeId(w))?;
                    }
                }
            }
        }
    }
    Ok(builder.build())
}
