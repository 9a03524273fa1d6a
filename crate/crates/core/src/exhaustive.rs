//! Enumeration-based reference oracles for small instances.
//!
//! A chain `S_1 ⊆ … ⊆ S_k` is the same as a level function `ℓ: V → {0..k}`
//! with `S_i = {v : ℓ(v) ≥ k + 1 − i}`. The enumerator walks all level
//! functions, counts for every arc how many of the sets it crosses, and keeps
//! the chains whose crossings are pairwise disjoint. No LP is involved.

use std::collections::{BTreeMap, BTreeSet};

use crate::inequality::CutChain;
use crate::model::Instance;

/// Largest node count the enumerators accept.
pub const MAX_NODES: usize = 12;
/// Largest arc count the enumerators accept.
pub const MAX_ARCS: usize = 64;

/// The part of a valid chain that matters for the inequalities: which
/// terminals it pins and which arcs it crosses.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChainPattern {
    pub k: usize,
    /// Entries lying in `S_1` (bit per node).
    pub top_entries: u32,
    /// Exits lying in `S_k` (bit per node); these must belong to `X`.
    pub raised_exits: u32,
    /// Arcs crossed by some set of the chain (bit per arc).
    pub crossed: u64,
    /// One chain realizing the pattern.
    pub levels: Vec<usize>,
}

impl ChainPattern {
    /// Whether the chain is an `(X ∩ T⁺, T⁻ ∖ X)`-chain for `X` (bit per node).
    pub fn admits(&self, subset: u32, entries: u32) -> bool {
        subset & entries & !self.top_entries == 0 && self.raised_exits & !subset == 0
    }

    pub fn weight(&self, weights: &[f64]) -> f64 {
        weights
            .iter()
            .enumerate()
            .filter(|(a, _)| self.crossed >> a & 1 == 1)
            .map(|(_, w)| w)
            .sum()
    }

    pub fn chain(&self) -> CutChain {
        CutChain::from_levels(&self.levels, self.k)
    }
}

/// Bit mask of the given nodes.
pub fn node_mask(nodes: &[usize]) -> u32 {
    nodes.iter().fold(0, |m, &v| m | 1 << v)
}

/// Nodes of a bit mask, increasing.
pub fn mask_nodes(mask: u32) -> Vec<usize> {
    (0..32).filter(|v| mask >> v & 1 == 1).collect()
}

/// All chain patterns with exactly `k` sets, keeping for each terminal
/// signature only the crossing sets that are minimal under inclusion.
pub fn chain_patterns(inst: &Instance, k: usize) -> Vec<ChainPattern> {
    let n = inst.num_nodes();
    let g = inst.graph();
    assert!(n <= MAX_NODES && g.num_arcs() <= MAX_ARCS, "instance too large to enumerate");
    assert!(k >= 1);
    let entries = node_mask(&inst.entries());
    let exits = node_mask(&inst.exits());
    let order = search_order(inst);
    let mut levels = vec![0usize; n];
    let mut found: BTreeMap<(u32, u32), BTreeMap<u64, Vec<usize>>> = BTreeMap::new();
    enumerate(inst, &order, 0, k, &mut levels, &mut |levels: &[usize]| {
        let sets: Vec<Vec<bool>> = (1..=k)
            .map(|i| levels.iter().map(|&l| l >= k + 1 - i).collect())
            .collect();
        let mut crossed = 0u64;
        for (a, arc) in g.arcs().iter().enumerate() {
            let count = sets.iter().filter(|s| s[arc.tail] != s[arc.head]).count();
            if count > 1 {
                return;
            }
            if count == 1 {
                crossed |= 1 << a;
            }
        }
        let top = (0..n).filter(|&v| sets[0][v]).fold(0u32, |m, v| m | 1 << v) & entries;
        let raised = (0..n).filter(|&v| sets[k - 1][v]).fold(0u32, |m, v| m | 1 << v) & exits;
        found
            .entry((top, raised))
            .or_default()
            .entry(crossed)
            .or_insert_with(|| levels.to_vec());
    });
    let mut patterns = Vec::new();
    for ((top, raised), by_mask) in found {
        let masks: Vec<u64> = by_mask.keys().copied().collect();
        for (&crossed, lv) in &by_mask {
            let dominated = masks.iter().any(|&m| m != crossed && m & crossed == m);
            if !dominated {
                patterns.push(ChainPattern {
                    k,
                    top_entries: top,
                    raised_exits: raised,
                    crossed,
                    levels: lv.clone(),
                });
            }
        }
    }
    patterns
}

/// Nodes in breadth-first order so that most nodes have an assigned neighbour.
fn search_order(inst: &Instance) -> Vec<usize> {
    let n = inst.num_nodes();
    let mut adj = vec![Vec::new(); n];
    for arc in inst.graph().arcs() {
        adj[arc.tail].push(arc.head);
        adj[arc.head].push(arc.tail);
    }
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        order.push(start);
        let mut i = order.len() - 1;
        while i < order.len() {
            for &w in &adj[order[i]] {
                if !seen[w] {
                    seen[w] = true;
                    order.push(w);
                }
            }
            i += 1;
        }
    }
    order
}

/// Assigns levels in `order`, skipping partial assignments where an arc
/// already spans more than one level (it would cross two sets).
fn enumerate(
    inst: &Instance,
    order: &[usize],
    pos: usize,
    k: usize,
    levels: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    if pos == order.len() {
        visit(levels);
        return;
    }
    let v = order[pos];
    let placed = &order[..pos];
    'level: for l in 0..=k {
        for arc in inst.graph().arcs() {
            if let Some(u) = arc.other(v) {
                if u != v && placed.contains(&u) && levels[u].abs_diff(l) > 1 {
                    continue 'level;
                }
            }
        }
        levels[v] = l;
        enumerate(inst, order, pos + 1, k, levels, visit);
    }
}

/// `σ_k(X)` by enumeration; `None` if no chain admits `X`.
pub fn sigma_k(inst: &Instance, patterns: &[ChainPattern], x: &[f64], subset: &[usize]) -> Option<f64> {
    let k = patterns.first()?.k;
    let weights = arc_weights(inst, x);
    let entries = node_mask(&inst.entries());
    let mask = node_mask(subset);
    patterns
        .iter()
        .filter(|p| p.admits(mask, entries))
        .map(|p| p.weight(&weights))
        .min_by(f64::total_cmp)
        .map(|w| w * crate::separation::normalization(k, inst.degree()))
}

/// `μ_a x_a`.
pub fn arc_weights(inst: &Instance, x: &[f64]) -> Vec<f64> {
    x.iter()
        .enumerate()
        .map(|(a, &xa)| inst.network.conductance(a) * xa)
        .collect()
}

/// Most negative `g_k(X)` over all `k`, `X` and chains.
#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveMinimum {
    pub k: usize,
    pub subset: Vec<usize>,
    pub g: f64,
}

/// Patterns for `k = 1 ..= k_max`, computed once per instance.
pub fn all_patterns(inst: &Instance, k_max: usize) -> Vec<Vec<ChainPattern>> {
    (1..=k_max).map(|k| chain_patterns(inst, k)).collect()
}

/// Minimizes `g_k(X)` over every `k`, every terminal subset and every chain.
/// The empty subset gives `g = 0`, so the result is never positive.
pub fn minimize_g(inst: &Instance, patterns: &[Vec<ChainPattern>], x: &[f64]) -> ExhaustiveMinimum {
    let weights = arc_weights(inst, x);
    let entries = node_mask(&inst.entries());
    let terminals = inst.terminals();
    let root = inst.pi_bar.powf(1.0 / inst.degree());
    let mut best = ExhaustiveMinimum {
        k: 1,
        subset: Vec::new(),
        g: 0.0,
    };
    let subsets: BTreeSet<Vec<usize>> = (0u32..1 << terminals.len())
        .map(|m| mask_nodes(m).into_iter().map(|i| terminals[i]).collect())
        .collect();
    for per_k in patterns.iter().filter(|p| !p.is_empty()) {
        let k = per_k[0].k;
        let norm = crate::separation::normalization(k, inst.degree());
        let pattern_weights: Vec<f64> = per_k.iter().map(|p| p.weight(&weights)).collect();
        for subset in &subsets {
            let mask = node_mask(subset);
            let demand: f64 = subset.iter().map(|&v| inst.balance[v]).sum();
            let Some(w) = per_k
                .iter()
                .zip(&pattern_weights)
                .filter(|(p, _)| p.admits(mask, entries))
                .map(|(_, &w)| w)
                .min_by(f64::total_cmp)
            else {
                continue;
            };
            let g = w * norm - demand / root;
            if g < best.g - 1e-12 {
                best = ExhaustiveMinimum {
                    k,
                    subset: subset.clone(),
                    g,
                };
            }
        }
    }
    best
}

/// Every binary vector over `m` arcs, in bit-mask order.
pub fn binary_vectors(m: usize) -> impl Iterator<Item = Vec<f64>> {
    assert!(m < 32);
    (0u32..1 << m).map(move |mask| (0..m).map(|a| (mask >> a & 1) as f64).collect())
}
