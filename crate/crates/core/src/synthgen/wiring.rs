//! Draws hostgraph arcs so that the bow-tie decomposition of the result
//! puts every node in the component it was assigned.
//!
//! Arcs only ever go MAIN -> {MAIN, OUT}, IN -> {MAIN, OUT, TIN, TUNNEL},
//! TUNNEL -> OUT and TOUT -> OUT, so no cycle can form outside MAIN. A
//! random cycle through MAIN plus one forced arc per non-MAIN node pins the
//! labels down; the remaining degree targets are matched stub to stub.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use super::sampler::{DiscretePowerLaw, WeightedIndex};
use crate::graph::ComponentLabel;

#[derive(Debug, Clone, Copy)]
pub(crate) struct WireNode {
    pub label: ComponentLabel,
    pub out_target: u64,
    pub in_target: u64,
}

struct Arcs {
    list: Vec<(usize, usize)>,
    seen: HashSet<(usize, usize)>,
    remaining: Vec<u64>,
    in_count: Vec<u64>,
}

impl Arcs {
    fn add(&mut self, u: usize, v: usize) -> bool {
        if u == v || !self.seen.insert((u, v)) {
            return false;
        }
        self.list.push((u, v));
        self.remaining[u] = self.remaining[u].saturating_sub(1);
        self.in_count[v] += 1;
        true
    }
}

/// Returns arcs `(u, v, multiplicity)` over indices into `nodes`.
pub(crate) fn wire<R: Rng>(
    nodes: &[WireNode],
    multiplicity: &DiscretePowerLaw,
    rng: &mut R,
) -> Vec<(usize, usize, u64)> {
    let of = |label: ComponentLabel| -> Vec<usize> {
        (0..nodes.len()).filter(|&v| nodes[v].label == label).collect()
    };
    let main = of(ComponentLabel::Main);
    let out = of(ComponentLabel::Out);
    let inn = of(ComponentLabel::In);
    let tin = of(ComponentLabel::Tin);
    let tout = of(ComponentLabel::Tout);
    let tunnel = of(ComponentLabel::Tunnel);

    let cap = |label: ComponentLabel| -> u64 {
        (match label {
            ComponentLabel::Main => (main.len() + out.len()).saturating_sub(1),
            ComponentLabel::In => main.len() + out.len() + tin.len() + tunnel.len(),
            ComponentLabel::Tunnel | ComponentLabel::Tout => out.len(),
            _ => 0,
        }) as u64
    };
    let mut arcs = Arcs {
        list: Vec::new(),
        seen: HashSet::new(),
        remaining: nodes.iter().map(|n| n.out_target.min(cap(n.label))).collect(),
        in_count: vec![0; nodes.len()],
    };

    if main.len() >= 2 {
        let mut ring = main.clone();
        ring.shuffle(rng);
        for i in 0..ring.len() {
            arcs.add(ring[i], ring[(i + 1) % ring.len()]);
        }
    }

    let main_by_weight = WeightedIndex::new(main.clone(), |v| nodes[v].in_target as f64);
    for &i in &inn {
        if let Some(m) = main_by_weight.sample(rng) {
            arcs.add(i, m);
        }
    }
    let out_by_weight = WeightedIndex::new(out.clone(), |v| nodes[v].in_target as f64);
    for &s in tunnel.iter().chain(&tout) {
        if let Some(o) = out_by_weight.sample(rng) {
            arcs.add(s, o);
        }
    }

    // One parent per OUT node from MAIN, per TIN/TUNNEL node from IN, taken
    // from spare out-stubs while they last.
    let parents = |sources: &[usize], children: &[usize], arcs: &mut Arcs, rng: &mut R| {
        if sources.is_empty() {
            return;
        }
        let mut pool: Vec<usize> = sources
            .iter()
            .flat_map(|&s| std::iter::repeat_n(s, arcs.remaining[s] as usize))
            .collect();
        pool.shuffle(rng);
        for &c in children {
            let mut placed = false;
            while let Some(s) = pool.pop() {
                if arcs.add(s, c) {
                    placed = true;
                    break;
                }
            }
            while !placed {
                placed = arcs.add(*sources.choose(rng).expect("non-empty"), c);
            }
        }
    };
    parents(&main, &out, &mut arcs, rng);
    let tin_tunnel: Vec<usize> = tin.iter().chain(&tunnel).copied().collect();
    parents(&inn, &tin_tunnel, &mut arcs, rng);

    // Remaining out-stubs are matched to remaining in-stubs. The larger side
    // is cut down from the top, which leaves small degrees untouched; each
    // sender then picks distinct receivers in proportion to their stubs.
    let mut senders: Vec<usize> = main.iter().chain(&inn).chain(&tunnel).chain(&tout).copied().collect();
    let receivers: [&[usize]; 4] = [&main, &out, &tin, &tunnel];
    let in_cap = |label: ComponentLabel| -> u64 {
        (match label {
            ComponentLabel::Main => (main.len() + inn.len()).saturating_sub(1),
            ComponentLabel::Out => main.len() + inn.len() + tunnel.len() + tout.len(),
            ComponentLabel::Tin | ComponentLabel::Tunnel => inn.len(),
            _ => 0,
        }) as u64
    };
    let mut in_left: Vec<u64> = nodes
        .iter()
        .zip(&arcs.in_count)
        .map(|(n, &c)| n.in_target.min(in_cap(n.label)).saturating_sub(c))
        .collect();
    let out_total: u64 = senders.iter().map(|&v| arcs.remaining[v]).sum();
    let in_total: u64 = receivers.iter().flat_map(|r| r.iter()).map(|&v| in_left[v]).sum();
    if out_total > in_total {
        cut_from_top(&mut arcs.remaining, &senders, in_total);
    } else {
        let all: Vec<usize> = receivers.iter().flat_map(|r| r.iter().copied()).collect();
        cut_from_top(&mut in_left, &all, out_total);
    }

    let mut trees: [Fenwick; 4] = receivers.map(|r| Fenwick::new(r.iter().map(|&v| in_left[v])));
    senders.shuffle(rng);
    senders.sort_by_key(|&v| std::cmp::Reverse(arcs.remaining[v]));
    const MAIN_OUT: &[usize] = &[0, 1];
    const ANY: &[usize] = &[0, 1, 2, 3];
    const OUT_ONLY: &[usize] = &[1];
    let mut taken: Vec<(usize, usize, usize)> = Vec::new();
    for u in senders {
        let allowed = match nodes[u].label {
            ComponentLabel::Main => MAIN_OUT,
            ComponentLabel::In => ANY,
            _ => OUT_ONLY,
        };
        taken.clear();
        while arcs.remaining[u] > 0 {
            let total: u64 = allowed.iter().map(|&c| trees[c].total()).sum();
            if total == 0 {
                break;
            }
            let mut x = rng.gen_range(0..total);
            let c = *allowed
                .iter()
                .find(|&&c| {
                    let t = trees[c].total();
                    if x < t {
                        true
                    } else {
                        x -= t;
                        false
                    }
                })
                .expect("x is below the total");
            let pos = trees[c].find(x);
            let v = receivers[c][pos];
            trees[c].sub(pos, in_left[v]);
            taken.push((c, pos, v));
            if arcs.add(u, v) {
                in_left[v] -= 1;
            }
        }
        for &(c, pos, v) in &taken {
            trees[c].add(pos, in_left[v]);
        }
    }

    arcs.list
        .into_iter()
        .map(|(u, v)| (u, v, multiplicity.sample(rng)))
        .collect()
}

/// Lowers the largest `values[members]` until they sum to at most `total`.
fn cut_from_top(values: &mut [u64], members: &[usize], total: u64) {
    let sum_below = |level: u64| -> u64 { members.iter().map(|&v| values[v].min(level)).sum() };
    let (mut lo, mut hi) = (0u64, members.iter().map(|&v| values[v]).max().unwrap_or(0));
    if sum_below(hi) <= total {
        return;
    }
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if sum_below(mid) <= total {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    let mut spare = total - sum_below(lo);
    for &v in members {
        if values[v] > lo {
            values[v] = lo + u64::from(spare > 0);
            spare = spare.saturating_sub(1);
        }
    }
}

/// Prefix sums over non-negative weights with point updates.
struct Fenwick {
    tree: Vec<u64>,
    total: u64,
}

impl Fenwick {
    fn new(weights: impl Iterator<Item = u64>) -> Self {
        let mut tree: Vec<u64> = std::iter::once(0).chain(weights).collect();
        let n = tree.len();
        for i in 1..n {
            let j = i + (i & i.wrapping_neg());
            if j < n {
                tree[j] += tree[i];
            }
        }
        let mut f = Fenwick { tree, total: 0 };
        f.total = f.prefix(n - 1);
        f
    }

    fn prefix(&self, mut i: usize) -> u64 {
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i &= i - 1;
        }
        s
    }

    fn total(&self) -> u64 {
        self.total
    }

    fn add(&mut self, pos: usize, delta: u64) {
        self.total += delta;
        let mut i = pos + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    fn sub(&mut self, pos: usize, delta: u64) {
        self.total -= delta;
        let mut i = pos + 1;
        while i < self.tree.len() {
            self.tree[i] -= delta;
            i += i & i.wrapping_neg();
        }
    }

    /// Position whose cumulative range contains `x` (`x < total`).
    fn find(&self, mut x: u64) -> usize {
        let mut pos = 0;
        let mut step = self.tree.len().next_power_of_two() / 2;
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= x {
                x -= self.tree[next];
                pos = next;
            }
            step /= 2;
        }
        pos
    }
}
