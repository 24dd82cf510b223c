//! Directed dependency graph with dense node ids and frozen adjacency.
//!
//! Graphs are assembled through [`GraphBuilder`] and are immutable once
//! [`GraphBuilder::build`] returns. Every analysis in this crate operates on
//! the frozen [`DependencyGraph`]: out-edges point from a package to the
//! packages it depends on, in-edges are the derived dependent view.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};

/// Dense node identifier, contiguous from 0 to `node_count - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub(crate) u32);

impl NodeId {
    /// Creates an id from a dense index.
    pub fn new(index: usize) -> Self {
        NodeId(index as u32)
    }

    /// Returns the dense index of this id.
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Edge orientation selector for degree queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Dependencies: edges leaving the node.
    Out,
    /// Dependents: edges entering the node.
    In,
    /// Sum of both orientations.
    Total,
}

/// Incremental graph assembly; deduplicates edges and rejects self-loops.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    labels: Vec<String>,
    external: Vec<bool>,
    lookup: HashMap<String, u32>,
    out: Vec<BTreeSet<u32>>,
    edge_count: usize,
}

impl GraphBuilder {
    /// Creates an empty builder.
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of nodes registered so far.
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Adds a node with a unique label; rejects duplicates.
    pub fn add_node(&mut self, label: impl Into<String>) -> Result<NodeId> {
        let label = label.into();
        if self.lookup.contains_key(&label) {
            return Err(Error::DuplicateLabel(label));
        }
        Ok(self.insert(label, false))
    }

    /// Returns the node for `label`, creating it as external if absent.
    ///
    /// External nodes stand in for packages that are referenced as a
    /// dependency but carry no record of their own.
    pub fn ensure_node(&mut self, label: &str) -> NodeId {
        match self.lookup.get(label) {
            Some(&id) => NodeId(id),
            None => self.insert(label.to_owned(), true),
        }
    }

    /// Clears the external flag, marking `v` as a first-class package.
    pub fn mark_internal(&mut self, v: NodeId) {
        self.external[v.index()] = false;
    }

    /// Sets the external flag, marking `v` as a dangling placeholder.
    pub fn mark_external(&mut self, v: NodeId) {
        self.external[v.index()] = true;
    }

    /// True when `v` was created as a dangling dependency target.
    pub fn is_external(&self, v: NodeId) -> bool {
        self.external[v.index()]
    }

    fn insert(&mut self, label: String, external: bool) -> NodeId {
        let id = self.labels.len() as u32;
        self.lookup.insert(label.clone(), id);
        self.labels.push(label);
        self.external.push(external);
        self.out.push(BTreeSet::new());
        NodeId(id)
    }

    /// Adds the directed edge `from -> to`; duplicates are ignored.
    pub fn add_edge(&mut self, from: NodeId, to: NodeId) -> Result<()> {
        let n = self.labels.len();
        if from.index() >= n {
            return Err(Error::NodeOutOfRange(from.index(), n));
        }
        if to.index() >= n {
            return Err(Error::NodeOutOfRange(to.index(), n));
        }
        if from == to {
            return Err(Error::SelfLoop(self.labels[from.index()].clone()));
        }
        if self.out[from.index()].insert(to.0) {
            self.edge_count += 1;
        }
        Ok(())
    }

    /// Freezes the builder into an immutable graph with sorted adjacency.
    pub fn build(self) -> DependencyGraph {
        let n = self.labels.len();
        let mut incoming: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        let mut outgoing: Vec<Vec<NodeId>> = Vec::with_capacity(n);
        for (u, targets) in self.out.iter().enumerate() {
            // BTreeSet iteration is already sorted.
            outgoing.push(targets.iter().map(|&v| NodeId(v)).collect());
            for &v in targets {
                incoming[v as usize].push(NodeId(u as u32));
            }
        }
        // Sources are visited in ascending order, so each in-list is sorted.
        DependencyGraph {
            labels: self.labels,
            external: self.external,
            lookup: self.lookup,
            outgoing,
            incoming,
            edge_count: self.edge_count,
        }
    }
}

/// Immutable directed graph over packages.
#[derive(Debug, Clone)]
pub struct DependencyGraph {
    labels: Vec<String>,
    external: Vec<bool>,
    lookup: HashMap<String, u32>,
    outgoing: Vec<Vec<NodeId>>,
    incoming: Vec<Vec<NodeId>>,
    edge_count: usize,
}

impl DependencyGraph {
    /// Number of nodes.
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Number of directed edges.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Iterates all node ids in ascending order.
    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.labels.len() as u32).map(NodeId)
    }

    /// Label of `v`. Panics when `v` is out of range.
    pub fn label(&self, v: NodeId) -> &str {
        &self.labels[v.index()]
    }

    /// All labels indexed by node id.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// True when `v` was created as a dangling dependency target.
    pub fn is_external(&self, v: NodeId) -> bool {
        self.external[v.index()]
    }

    /// Looks a node up by its label.
    pub fn node_by_label(&self, label: &str) -> Option<NodeId> {
        self.lookup.get(label).map(|&id| NodeId(id))
    }

    /// Dependencies of `v`, sorted ascending. Panics when out of range.
    pub fn out_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.outgoing[v.index()]
    }

    /// Dependents of `v`, sorted ascending. Panics when out of range.
    pub fn in_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.incoming[v.index()]
    }

    /// Degree of `v` in the requested orientation. Panics when out of range.
    pub fn degree(&self, v: NodeId, direction: Direction) -> usize {
        match direction {
            Direction::Out => self.outgoing[v.index()].len(),
            Direction::In => self.incoming[v.index()].len(),
            Direction::Total => self.outgoing[v.index()].len() + self.incoming[v.index()].len(),
        }
    }

    /// Neighbors of `v` ignoring direction: the sorted union of the out- and
    /// in-adjacency lists. Derived on demand; nothing extra is stored.
    pub fn undirected_neighbors(&self, v: NodeId) -> Vec<NodeId> {
        let out = &self.outgoing[v.index()];
        let inc = &self.incoming[v.index()];
        let mut merged = Vec::with_capacity(out.len() + inc.len());
        let (mut i, mut j) = (0, 0);
        while i < out.len() && j < inc.len() {
            match out[i].cmp(&inc[j]) {
                std::cmp::Ordering::Less => {
                    merged.push(out[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    merged.push(inc[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    merged.push(out[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        merged.extend_from_slice(&out[i..]);
        merged.extend_from_slice(&inc[j..]);
        merged
    }

    /// Subgraph induced by `nodes`: ids are reassigned densely in ascending
    /// order of the original ids, labels and external flags carry over.
    /// Duplicate ids in `nodes` are collapsed; an empty set is an error.
    pub fn induced_subgraph(&self, nodes: &[NodeId]) -> Result<DependencyGraph> {
        if nodes.is_empty() {
            return Err(Error::EmptyNodeSet("induced subgraph"));
        }
        let n = self.node_count();
        let mut keep: Vec<NodeId> = Vec::with_capacity(nodes.len());
        for &v in nodes {
            if v.index() >= n {
                return Err(Error::NodeOutOfRange(v.index(), n));
            }
            keep.push(v);
        }
        keep.sort_unstable();
        keep.dedup();

        let mut remap: HashMap<u32, u32> = HashMap::with_capacity(keep.len());
        let mut builder = GraphBuilder::new();
        for (new_id, &old) in keep.iter().enumerate() {
            remap.insert(old.0, new_id as u32);
            let id = builder
                .add_node(self.labels[old.index()].clone())
                .expect("labels in a frozen graph are unique");
            if self.external[old.index()] {
                builder.mark_external(id);
            }
        }
        for &old in &keep {
            let from = NodeId(remap[&old.0]);
            for &t in self.out_neighbors(old) {
                if let Some(&to) = remap.get(&t.0) {
                    builder.add_edge(from, NodeId(to))?;
                }
            }
        }
        Ok(builder.build())
    }

    /// Undirected copy: every edge is mirrored so that the out-adjacency of
    /// each node equals its undirected neighborhood.
    pub fn symmetrized(&self) -> DependencyGraph {
        let mut builder = GraphBuilder::new();
        for v in self.node_ids() {
            let id = builder
                .add_node(self.labels[v.index()].clone())
                .expect("labels in a frozen graph are unique");
            if self.external[v.index()] {
                builder.mark_external(id);
            }
        }
        for v in self.node_ids() {
            for &t in self.out_neighbors(v) {
                builder.add_edge(v, t).expect("endpoints exist");
                builder.add_edge(t, v).expect("endpoints exist");
            }
        }
        builder.build()
    }
}
