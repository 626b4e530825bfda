//! Hostgraph construction and macro-structure.

mod bowtie;
mod scc;

use std::collections::{BTreeMap, HashMap};

use crate::snapshot::{SiteId, Snapshot};
use crate::{Error, Result};

pub use bowtie::{
    decompose, decompose_bowtie, decompose_main, ComponentLabel, Decomposition, DecompositionSummary,
    MainSubLabel,
};
pub use scc::strongly_connected_components;

/// Directed site graph in compressed adjacency form.
///
/// Nodes are the crawled sites of one snapshot in hostname order. Both
/// directions are stored so that forward and backward traversals are
/// equally cheap.
#[derive(Debug, Clone)]
pub struct HostGraph {
    nodes: Vec<SiteId>,
    pages: Vec<u64>,
    index: HashMap<SiteId, usize>,
    out_offsets: Vec<usize>,
    out_targets: Vec<usize>,
    out_weights: Vec<u64>,
    in_offsets: Vec<usize>,
    in_sources: Vec<usize>,
    in_weights: Vec<u64>,
}

impl HostGraph {
    /// One node per crawled site, one arc per site link.
    pub fn from_snapshot(snapshot: &Snapshot) -> Self {
        let (nodes, pages): (Vec<SiteId>, Vec<u64>) = snapshot
            .crawled()
            .map(|r| (r.id.clone(), r.page_count))
            .unzip();
        let index: HashMap<SiteId, usize> =
            nodes.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
        let arcs: Vec<(usize, usize, u64)> = snapshot
            .links()
            .iter()
            .map(|l| (index[&l.src], index[&l.dst], l.multiplicity))
            .collect();
        Self::assemble(nodes, pages, index, arcs)
    }

    /// Builds a graph from explicit arcs over `nodes`. Parallel arcs are
    /// merged by summing multiplicity and self-loops are dropped.
    pub fn from_arcs(
        nodes: Vec<SiteId>,
        pages: Vec<u64>,
        arcs: impl IntoIterator<Item = (usize, usize, u64)>,
    ) -> Result<Self> {
        if pages.len() != nodes.len() {
            return Err(Error::InconsistentInput(format!(
                "{} nodes but {} page counts",
                nodes.len(),
                pages.len()
            )));
        }
        let n = nodes.len();
        let mut merged: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for (u, v, w) in arcs {
            if u >= n || v >= n {
                return Err(Error::InconsistentInput(format!(
                    "arc ({u}, {v}) out of range for {n} nodes"
                )));
            }
            if u != v && w > 0 {
                *merged.entry((u, v)).or_insert(0) += w;
            }
        }
        let mut index = HashMap::with_capacity(n);
        for (i, id) in nodes.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::InconsistentInput(format!("duplicate node {id}")));
            }
        }
        let arcs = merged.into_iter().map(|((u, v), w)| (u, v, w)).collect();
        Ok(Self::assemble(nodes, pages, index, arcs))
    }

    fn assemble(
        nodes: Vec<SiteId>,
        pages: Vec<u64>,
        index: HashMap<SiteId, usize>,
        arcs: Vec<(usize, usize, u64)>,
    ) -> Self {
        let n = nodes.len();
        let (out_offsets, out_targets, out_weights) = csr(n, arcs.iter().map(|&(u, v, w)| (u, v, w)));
        let (in_offsets, in_sources, in_weights) = csr(n, arcs.iter().map(|&(u, v, w)| (v, u, w)));
        HostGraph {
            nodes,
            pages,
            index,
            out_offsets,
            out_targets,
            out_weights,
            in_offsets,
            in_sources,
            in_weights,
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn arc_count(&self) -> usize {
        self.out_targets.len()
    }

    pub fn nodes(&self) -> &[SiteId] {
        &self.nodes
    }

    pub fn node(&self, v: usize) -> &SiteId {
        &self.nodes[v]
    }

    pub fn index_of(&self, id: &SiteId) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn pages(&self, v: usize) -> u64 {
        self.pages[v]
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.out_targets[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    pub fn predecessors(&self, v: usize) -> &[usize] {
        &self.in_sources[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    /// `(target, multiplicity)` pairs of the arcs leaving `v`.
    pub fn out_arcs(&self, v: usize) -> impl Iterator<Item = (usize, u64)> + '_ {
        let range = self.out_offsets[v]..self.out_offsets[v + 1];
        self.out_targets[range.clone()]
            .iter()
            .copied()
            .zip(self.out_weights[range].iter().copied())
    }

    /// `(source, multiplicity)` pairs of the arcs entering `v`.
    pub fn in_arcs(&self, v: usize) -> impl Iterator<Item = (usize, u64)> + '_ {
        let range = self.in_offsets[v]..self.in_offsets[v + 1];
        self.in_sources[range.clone()]
            .iter()
            .copied()
            .zip(self.in_weights[range].iter().copied())
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_offsets[v + 1] - self.out_offsets[v]
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_offsets[v + 1] - self.in_offsets[v]
    }

    /// Sum of multiplicities of the arcs leaving `v`.
    pub fn out_weight(&self, v: usize) -> u64 {
        self.out_weights[self.out_offsets[v]..self.out_offsets[v + 1]].iter().sum()
    }
}

fn csr(
    n: usize,
    arcs: impl Iterator<Item = (usize, usize, u64)> + Clone,
) -> (Vec<usize>, Vec<usize>, Vec<u64>) {
    let mut offsets = vec![0usize; n + 1];
    for (u, _, _) in arcs.clone() {
        offsets[u + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let m = offsets[n];
    let mut cursor = offsets.clone();
    let mut targets = vec![0usize; m];
    let mut weights = vec![0u64; m];
    for (u, v, w) in arcs {
        targets[cursor[u]] = v;
        weights[cursor[u]] = w;
        cursor[u] += 1;
    }
    // Sorted neighbor lists keep traversal order independent of input order.
    for u in 0..n {
        let (lo, hi) = (offsets[u], offsets[u + 1]);
        let mut pairs: Vec<(usize, u64)> = targets[lo..hi]
            .iter()
            .copied()
            .zip(weights[lo..hi].iter().copied())
            .collect();
        pairs.sort_unstable();
        for (k, (v, w)) in pairs.into_iter().enumerate() {
            targets[lo + k] = v;
            weights[lo + k] = w;
        }
    }
    (offsets, targets, weights)
}
