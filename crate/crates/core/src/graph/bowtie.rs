//! Bow-tie macro-structure of a hostgraph.
//!
//! MAIN is the giant strongly connected component. IN can reach MAIN, OUT
//! is reachable from MAIN. Of the nodes left over, those reachable from IN
//! and reaching OUT form TUNNEL, those only reachable from IN are TIN, those
//! only reaching OUT are TOUT, and everything else is an ISLAND.
//!
//! MAIN is further split by direct adjacency: MAIN_MAIN nodes have an arc
//! from IN and an arc into OUT, MAIN_IN only the former, MAIN_OUT only the
//! latter, MAIN_NORM neither.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{strongly_connected_components, HostGraph};
use crate::snapshot::SiteId;

/// Declaration order is the column order of the migration tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ComponentLabel {
    Main,
    Out,
    In,
    Island,
    Tunnel,
    Tin,
    Tout,
}

impl ComponentLabel {
    pub const ALL: [ComponentLabel; 7] = [
        ComponentLabel::Main,
        ComponentLabel::Out,
        ComponentLabel::In,
        ComponentLabel::Island,
        ComponentLabel::Tunnel,
        ComponentLabel::Tin,
        ComponentLabel::Tout,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ComponentLabel::Main => "MAIN",
            ComponentLabel::Out => "OUT",
            ComponentLabel::In => "IN",
            ComponentLabel::Island => "ISLAND",
            ComponentLabel::Tunnel => "TUNNEL",
            ComponentLabel::Tin => "TIN",
            ComponentLabel::Tout => "TOUT",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|l| l.as_str().eq_ignore_ascii_case(s.trim()))
    }
}

impl fmt::Display for ComponentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MainSubLabel {
    MainMain,
    MainIn,
    MainOut,
    MainNorm,
}

impl MainSubLabel {
    pub const ALL: [MainSubLabel; 4] = [
        MainSubLabel::MainMain,
        MainSubLabel::MainIn,
        MainSubLabel::MainOut,
        MainSubLabel::MainNorm,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MainSubLabel::MainMain => "MAIN_MAIN",
            MainSubLabel::MainIn => "MAIN_IN",
            MainSubLabel::MainOut => "MAIN_OUT",
            MainSubLabel::MainNorm => "MAIN_NORM",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|l| l.as_str().eq_ignore_ascii_case(s.trim()))
    }
}

impl fmt::Display for MainSubLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-node component labels of one hostgraph, aligned with its node order.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    sites: Vec<SiteId>,
    index: HashMap<SiteId, usize>,
    component: Vec<ComponentLabel>,
    main_sub: Vec<Option<MainSubLabel>>,
    pages: Vec<u64>,
}

/// Component sizes in sites and in pages.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionSummary {
    pub sizes_sites: BTreeMap<ComponentLabel, u64>,
    pub sizes_pages: BTreeMap<ComponentLabel, u64>,
    pub main_sub_sites: BTreeMap<MainSubLabel, u64>,
    pub main_sub_pages: BTreeMap<MainSubLabel, u64>,
}

impl Decomposition {
    pub fn len(&self) -> usize {
        self.component.len()
    }

    pub fn is_empty(&self) -> bool {
        self.component.is_empty()
    }

    pub fn sites(&self) -> &[SiteId] {
        &self.sites
    }

    /// Labels aligned with the hostgraph node order.
    pub fn labels(&self) -> &[ComponentLabel] {
        &self.component
    }

    pub fn main_sub_labels(&self) -> &[Option<MainSubLabel>] {
        &self.main_sub
    }

    pub fn component_of(&self, id: &SiteId) -> Option<ComponentLabel> {
        self.index.get(id).map(|&v| self.component[v])
    }

    pub fn main_sub_of(&self, id: &SiteId) -> Option<MainSubLabel> {
        self.index.get(id).and_then(|&v| self.main_sub[v])
    }

    pub fn members(&self, label: ComponentLabel) -> impl Iterator<Item = usize> + '_ {
        self.component
            .iter()
            .enumerate()
            .filter(move |(_, &l)| l == label)
            .map(|(v, _)| v)
    }

    pub fn sizes_sites(&self) -> BTreeMap<ComponentLabel, u64> {
        let mut sizes: BTreeMap<ComponentLabel, u64> =
            ComponentLabel::ALL.iter().map(|&l| (l, 0)).collect();
        for &l in &self.component {
            *sizes.get_mut(&l).unwrap() += 1;
        }
        sizes
    }

    pub fn sizes_pages(&self) -> BTreeMap<ComponentLabel, u64> {
        let mut sizes: BTreeMap<ComponentLabel, u64> =
            ComponentLabel::ALL.iter().map(|&l| (l, 0)).collect();
        for (&l, &p) in self.component.iter().zip(&self.pages) {
            *sizes.get_mut(&l).unwrap() += p;
        }
        sizes
    }

    pub fn summary(&self) -> DecompositionSummary {
        let mut main_sub_sites: BTreeMap<MainSubLabel, u64> =
            MainSubLabel::ALL.iter().map(|&l| (l, 0)).collect();
        let mut main_sub_pages = main_sub_sites.clone();
        for (sub, &p) in self.main_sub.iter().zip(&self.pages) {
            if let Some(sub) = sub {
                *main_sub_sites.get_mut(sub).unwrap() += 1;
                *main_sub_pages.get_mut(sub).unwrap() += p;
            }
        }
        DecompositionSummary {
            sizes_sites: self.sizes_sites(),
            sizes_pages: self.sizes_pages(),
            main_sub_sites,
            main_sub_pages,
        }
    }

    /// TSV `hostname component main_sub`, one row per node in node order.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("hostname\tcomponent\tmain_sub\n");
        for ((site, label), sub) in self.sites.iter().zip(&self.component).zip(&self.main_sub) {
            out.push_str(site.as_str());
            out.push('\t');
            out.push_str(label.as_str());
            out.push('\t');
            if let Some(sub) = sub {
                out.push_str(sub.as_str());
            }
            out.push('\n');
        }
        out
    }
}

/// Giant SCC: the largest component with at least two nodes, ties going to
/// the one holding the lexicographically smallest hostname.
fn giant_component(g: &HostGraph) -> Vec<usize> {
    strongly_connected_components(g)
        .into_iter()
        .filter(|c| c.len() >= 2)
        .map(|c| {
            let smallest = c.iter().map(|&v| g.node(v)).min().cloned();
            (c, smallest)
        })
        .max_by(|(a, sa), (b, sb)| a.len().cmp(&b.len()).then_with(|| sb.cmp(sa)))
        .map(|(c, _)| c)
        .unwrap_or_default()
}

/// Component labels of every node. MAIN sublabels are left empty; see
/// [`decompose_main`].
pub fn decompose_bowtie(g: &HostGraph) -> Decomposition {
    let n = g.node_count();
    let mut component = vec![ComponentLabel::Island; n];
    let main = giant_component(g);
    for &v in &main {
        component[v] = ComponentLabel::Main;
    }

    let in_set = bfs(g, &main, Direction::Backward, |v| component[v] != ComponentLabel::Main);
    let out_set = bfs(g, &main, Direction::Forward, |v| component[v] != ComponentLabel::Main);
    for v in 0..n {
        if in_set[v] {
            component[v] = ComponentLabel::In;
        } else if out_set[v] {
            component[v] = ComponentLabel::Out;
        }
    }

    let remaining = |v: usize| component[v] == ComponentLabel::Island;
    let in_nodes: Vec<usize> = (0..n).filter(|&v| in_set[v]).collect();
    let out_nodes: Vec<usize> = (0..n).filter(|&v| out_set[v]).collect();
    let from_in = bfs(g, &in_nodes, Direction::Forward, remaining);
    let to_out = bfs(g, &out_nodes, Direction::Backward, remaining);
    for v in 0..n {
        component[v] = match (component[v], from_in[v], to_out[v]) {
            (ComponentLabel::Island, true, true) => ComponentLabel::Tunnel,
            (ComponentLabel::Island, true, false) => ComponentLabel::Tin,
            (ComponentLabel::Island, false, true) => ComponentLabel::Tout,
            (label, _, _) => label,
        };
    }

    Decomposition {
        sites: g.nodes().to_vec(),
        index: (0..n).map(|v| (g.node(v).clone(), v)).collect(),
        component,
        main_sub: vec![None; n],
        pages: (0..n).map(|v| g.pages(v)).collect(),
    }
}

#[derive(Clone, Copy)]
enum Direction {
    Forward,
    Backward,
}

/// Nodes reachable from `seeds` (seeds themselves excluded unless reached
/// again) moving only through nodes accepted by `allowed`.
fn bfs(g: &HostGraph, seeds: &[usize], dir: Direction, allowed: impl Fn(usize) -> bool) -> Vec<bool> {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut queue: VecDeque<usize> = seeds.iter().copied().collect();
    while let Some(v) = queue.pop_front() {
        let next = match dir {
            Direction::Forward => g.successors(v),
            Direction::Backward => g.predecessors(v),
        };
        for &w in next {
            if !seen[w] && allowed(w) {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Fills in the MAIN sublabels of a component decomposition of `g`.
pub fn decompose_main(g: &HostGraph, d: &Decomposition) -> Decomposition {
    let mut out = d.clone();
    for v in 0..d.len() {
        if d.component[v] != ComponentLabel::Main {
            out.main_sub[v] = None;
            continue;
        }
        let has_in = g.predecessors(v).iter().any(|&u| d.component[u] == ComponentLabel::In);
        let has_out = g.successors(v).iter().any(|&w| d.component[w] == ComponentLabel::Out);
        out.main_sub[v] = Some(match (has_in, has_out) {
            (true, true) => MainSubLabel::MainMain,
            (true, false) => MainSubLabel::MainIn,
            (false, true) => MainSubLabel::MainOut,
            (false, false) => MainSubLabel::MainNorm,
        });
    }
    out
}

/// Both steps: components, then MAIN sublabels.
pub fn decompose(g: &HostGraph) -> Decomposition {
    decompose_main(g, &decompose_bowtie(g))
}
