//! Exact separation of the disjoint-cut inequalities.
//!
//! For fixed `k` and terminal subset `X`, the best chain is a minimum-weight
//! family of `k` nested `(X ∩ T⁺, T⁻ ∖ X)`-cuts with disjoint crossings, under
//! edge weights `μ_a x_a`. The source group and the sink group are contracted
//! into single nodes and the chain is found from an LP over node levels:
//! every undirected edge is replaced by two auxiliary nodes and four directed
//! arcs, each arc carrying a level drop in `[0, 1]`, and the source sits `k`
//! levels above the sink. The constraint matrix is totally unimodular, so the
//! basic optimum has integral levels and the level sets form the chain.
//!
//! `g_k(X) = σ_k(X) − b(X)/π̄^(1/r)` is minimized by enumerating terminal
//! subsets, which is exact for up to [`MAX_ENUMERATED_TERMINALS`] terminals.

use std::collections::{BTreeMap, VecDeque};

use rayon::prelude::*;
use thiserror::Error;

use crate::inequality::{build_inequality, CutChain, InequalityError, ValidInequality};
use crate::lp::{solve_lp, LinearProgram, LpError, LpStatus, Relation};
use crate::model::{Instance, ModelError, NodeSet};

/// Default violation threshold for reporting a cut.
pub const EPS_CUT: f64 = 1e-6;
/// Largest terminal count for which subsets are enumerated.
pub const MAX_ENUMERATED_TERMINALS: usize = 16;
/// Largest distance of an LP level from an integer that is still rounded.
pub const INTEGRALITY_TOL: f64 = 1e-7;
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeparationError {
    #[error("the number of cuts must be at least 1")]
    ZeroCuts,
    #[error("edge {edge} has invalid weight {weight}")]
    BadWeight { edge: usize, weight: f64 },
    #[error("edge {edge} references node {node} outside the graph")]
    BadEndpoint { edge: usize, node: usize },
    #[error("super-source and super-sink coincide")]
    SameTerminal,
    #[error("expected {expected} arc values, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("value {value} for arc {arc} is outside [0, 1]")]
    OutOfRange { arc: usize, value: f64 },
    #[error("{count} terminals exceed the enumeration limit of {MAX_ENUMERATED_TERMINALS}")]
    TooManyTerminals { count: usize },
    #[error("cut LP returned the non-integral level {value}")]
    NonIntegral { value: f64 },
    #[error("cut LP ended with status {0:?}")]
    UnexpectedStatus(LpStatus),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Inequality(#[from] InequalityError),
}

/// Undirected weighted graph with a designated source and sink.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedCutGraph {
    num_nodes: usize,
    edges: Vec<(usize, usize, f64)>,
    source: usize,
    sink: usize,
}

impl WeightedCutGraph {
    /// Loops are dropped since they never cross a cut.
    pub fn new(
        num_nodes: usize,
        edges: Vec<(usize, usize, f64)>,
        source: usize,
        sink: usize,
    ) -> Result<Self, SeparationError> {
        for (i, &(u, v, w)) in edges.iter().enumerate() {
            for node in [u, v] {
                if node >= num_nodes {
                    return Err(SeparationError::BadEndpoint { edge: i, node });
                }
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(SeparationError::BadWeight { edge: i, weight: w });
            }
        }
        for node in [source, sink] {
            if node >= num_nodes {
                return Err(SeparationError::BadEndpoint { edge: usize::MAX, node });
            }
        }
        if source == sink {
            return Err(SeparationError::SameTerminal);
        }
        let edges = edges.into_iter().filter(|&(u, v, _)| u != v).collect();
        Ok(Self {
            num_nodes,
            edges,
            source,
            sink,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    /// Number of edges on a shortest source–sink path; `None` if disconnected.
    /// Exactly this many disjoint cuts are possible at most.
    pub fn hop_distance(&self) -> Option<usize> {
        let mut adj = vec![Vec::new(); self.num_nodes];
        for &(u, v, _) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut dist = vec![usize::MAX; self.num_nodes];
        dist[self.source] = 0;
        let mut queue = VecDeque::from([self.source]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        (dist[self.sink] != usize::MAX).then_some(dist[self.sink])
    }

    /// `Σ_e w_e |level_u − level_v|`, the total weight of the chain.
    pub fn chain_weight(&self, levels: &[usize]) -> f64 {
        self.edges
            .iter()
            .map(|&(u, v, w)| w * levels[u].abs_diff(levels[v]) as f64)
            .sum()
    }
}

/// The level LP for `k` cuts and the column holding each graph node's level.
#[derive(Debug, Clone)]
pub struct KCutLp {
    pub lp: LinearProgram,
    pub level_vars: Vec<usize>,
}

/// Builds the level LP: one level variable per graph node and per auxiliary
/// node, one drop variable in `[0, 1]` per gadget arc with the edge weight as
/// cost on the two weighted arcs, and `level_s − level_t = k`.
pub fn k_cut_lp(g: &WeightedCutGraph, k: usize) -> KCutLp {
    let kf = k as f64;
    let mut lp = LinearProgram::new();
    let level_vars: Vec<usize> = (0..g.num_nodes)
        .map(|v| {
            let hi = if v == g.sink { 0.0 } else { kf };
            lp.add_var(0.0, 0.0, hi)
        })
        .collect();
    for &(u, v, w) in &g.edges {
        let first = lp.add_var(0.0, 0.0, kf);
        let second = lp.add_var(0.0, 0.0, kf);
        let gadget = [
            (level_vars[u], first, w),
            (level_vars[v], first, 0.0),
            (level_vars[v], second, w),
            (level_vars[u], second, 0.0),
        ];
        for (tail, head, cost) in gadget {
            let drop = lp.add_var(cost, 0.0, 1.0);
            lp.add_constraint(vec![(tail, 1.0), (head, -1.0), (drop, -1.0)], Relation::Eq, 0.0);
        }
    }
    lp.add_constraint(
        vec![(level_vars[g.source], 1.0), (level_vars[g.sink], -1.0)],
        Relation::Eq,
        kf,
    );
    KCutLp { lp, level_vars }
}

/// An optimal chain given as node levels in `0..=k`, with its weight.
#[derive(Debug, Clone, PartialEq)]
pub struct KCut {
    pub levels: Vec<usize>,
    pub weight: f64,
}

impl KCut {
    pub fn chain(&self, k: usize) -> CutChain {
        CutChain::from_levels(&self.levels, k)
    }
}

/// Minimum-weight chain of `k` nested source–sink cuts with pairwise disjoint
/// crossings; `None` when no such chain exists.
pub fn solve_k_disjoint_cut(g: &WeightedCutGraph, k: usize) -> Result<Option<KCut>, SeparationError> {
    if k == 0 {
        return Err(SeparationError::ZeroCuts);
    }
    if g.hop_distance().is_some_and(|d| d < k) {
        return Ok(None);
    }
    let KCutLp { lp, level_vars } = k_cut_lp(g, k);
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Ok(None),
        status => return Err(SeparationError::UnexpectedStatus(status)),
    }
    let mut levels = Vec::with_capacity(g.num_nodes);
    for &var in &level_vars {
        let value = sol.x[var];
        let rounded = value.round();
        if (value - rounded).abs() > INTEGRALITY_TOL {
            return Err(SeparationError::NonIntegral { value });
        }
        levels.push(rounded.clamp(0.0, k as f64) as usize);
    }
    let weight = g.chain_weight(&levels);
    Ok(Some(KCut { levels, weight }))
}

/// Cut graph for a terminal subset after contracting the source and sink groups.
#[derive(Debug, Clone, PartialEq)]
pub struct Contraction {
    pub graph: WeightedCutGraph,
    /// Contracted node of each original node.
    pub node_of: Vec<usize>,
}

fn check_x(inst: &Instance, x: &[f64]) -> Result<(), SeparationError> {
    if x.len() != inst.num_arcs() {
        return Err(SeparationError::Dimension {
            expected: inst.num_arcs(),
            got: x.len(),
        });
    }
    for (arc, &value) in x.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(SeparationError::OutOfRange { arc, value });
        }
    }
    Ok(())
}

fn check_subset(inst: &Instance, subset: &[usize]) -> Result<(), SeparationError> {
    for &v in subset {
        if v >= inst.num_nodes() {
            return Err(ModelError::UnknownNode(v).into());
        }
        if !(inst.is_entry(v) || inst.is_exit(v)) {
            return Err(ModelError::NotATerminal(v).into());
        }
    }
    Ok(())
}

/// Contracts `X ∩ T⁺` into node 0 and `T⁻ ∖ X` into node 1 and merges
/// parallel edges. `None` when one of the groups is empty, in which case the
/// chain of empty sets (or of full sets) is free.
pub fn contract(inst: &Instance, x: &[f64], subset: &[usize]) -> Result<Option<Contraction>, SeparationError> {
    check_x(inst, x)?;
    check_subset(inst, subset)?;
    let n = inst.num_nodes();
    let in_x = NodeSet::from_nodes(n, subset.iter().copied())?;
    let is_source = |v: usize| inst.is_entry(v) && in_x.contains(v);
    let is_sink = |v: usize| inst.is_exit(v) && !in_x.contains(v);
    if !(0..n).any(is_source) || !(0..n).any(is_sink) {
        return Ok(None);
    }
    let mut node_of = vec![0; n];
    let mut next = 2;
    for (v, slot) in node_of.iter_mut().enumerate() {
        *slot = if is_source(v) {
            0
        } else if is_sink(v) {
            1
        } else {
            next += 1;
            next - 1
        };
    }
    let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (a, arc) in inst.graph().arcs().iter().enumerate() {
        let (u, v) = (node_of[arc.tail], node_of[arc.head]);
        if u != v {
            *merged.entry((u.min(v), u.max(v))).or_insert(0.0) += inst.network.conductance(a) * x[a];
        }
    }
    let edges = merged.into_iter().map(|((u, v), w)| (u, v, w)).collect();
    Ok(Some(Contraction {
        graph: WeightedCutGraph::new(next, edges, 0, 1)?,
        node_of,
    }))
}

/// `σ_k(X)` with its optimal chain.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaK {
    /// Normalized value `weight / (k · k^(1/r))`.
    pub value: f64,
    pub weight: f64,
    pub chain: CutChain,
}

/// `1 / (k · k^(1/r))`.
pub fn normalization(k: usize, degree: f64) -> f64 {
    let kf = k as f64;
    1.0 / (kf * kf.powf(1.0 / degree))
}

/// `σ_k(X)`, or `None` if `X ∉ X_k`.
pub fn sigma_k(inst: &Instance, x: &[f64], subset: &[usize], k: usize) -> Result<Option<SigmaK>, SeparationError> {
    if k == 0 {
        return Err(SeparationError::ZeroCuts);
    }
    let n = inst.num_nodes();
    let Some(contraction) = contract(inst, x, subset)? else {
        let any_source = subset.iter().any(|&v| inst.is_entry(v));
        let set = if any_source { NodeSet::full(n) } else { NodeSet::empty(n) };
        return Ok(Some(SigmaK {
            value: 0.0,
            weight: 0.0,
            chain: CutChain::new(vec![set; k]),
        }));
    };
    let Some(cut) = solve_k_disjoint_cut(&contraction.graph, k)? else {
        return Ok(None);
    };
    let levels: Vec<usize> = contraction.node_of.iter().map(|&c| cut.levels[c]).collect();
    let weight: f64 = inst
        .graph()
        .arcs()
        .iter()
        .enumerate()
        .map(|(a, arc)| inst.network.conductance(a) * x[a] * levels[arc.tail].abs_diff(levels[arc.head]) as f64)
        .sum();
    Ok(Some(SigmaK {
        value: weight * normalization(k, inst.degree()),
        weight,
        chain: CutChain::from_levels(&levels, k),
    }))
}

/// `σ(X) = min_k σ_k(X)` over `k = 1 ..= k_max`, with the minimizing `k`.
pub fn sigma(inst: &Instance, x: &[f64], subset: &[usize], k_max: usize) -> Result<Option<(usize, SigmaK)>, SeparationError> {
    let mut best: Option<(usize, SigmaK)> = None;
    for k in 1..=k_max {
        if let Some(s) = sigma_k(inst, x, subset, k)? {
            if best.as_ref().map_or(true, |(_, b)| s.value < b.value - TIE_TOL) {
                best = Some((k, s));
            }
        }
    }
    Ok(best)
}

/// One evaluated `(k, X)` pair; `sigma` and `g` are `None` when `X ∉ X_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogEntry {
    pub k: usize,
    pub subset: Vec<usize>,
    pub sigma: Option<f64>,
    pub g: Option<f64>,
}

/// The minimizer of `g_k` over `X_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct GkMinimum {
    pub k: usize,
    pub subset: Vec<usize>,
    pub g: f64,
    pub sigma: SigmaK,
}

fn subsets_of(terminals: &[usize]) -> Result<Vec<Vec<usize>>, SeparationError> {
    if terminals.len() > MAX_ENUMERATED_TERMINALS {
        return Err(SeparationError::TooManyTerminals {
            count: terminals.len(),
        });
    }
    let mut all: Vec<Vec<usize>> = (0u32..1 << terminals.len())
        .map(|mask| {
            terminals
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &v)| v)
                .collect()
        })
        .collect();
    all.sort();
    Ok(all)
}

fn minimize_with_log(
    inst: &Instance,
    x: &[f64],
    k: usize,
    subsets: &[Vec<usize>],
) -> Result<(GkMinimum, Vec<LogEntry>), SeparationError> {
    let root = inst.pi_bar.powf(1.0 / inst.degree());
    // The empty set is always in X_k with g = 0 and is lexicographically first.
    let mut best = GkMinimum {
        k,
        subset: Vec::new(),
        g: 0.0,
        sigma: sigma_k(inst, x, &[], k)?.expect("empty subset admits the empty chain"),
    };
    let mut log = Vec::new();
    for subset in subsets.iter().filter(|s| !s.is_empty()) {
        let demand: f64 = subset.iter().map(|&v| inst.balance[v]).sum();
        // g ≥ −b(X)/π̄^(1/r), and b(X) ≤ 0 cannot beat the empty set.
        if demand <= 0.0 || -demand / root > best.g - TIE_TOL {
            continue;
        }
        let s = sigma_k(inst, x, subset, k)?;
        let g = s.as_ref().map(|s| s.value - demand / root);
        log.push(LogEntry {
            k,
            subset: subset.clone(),
            sigma: s.as_ref().map(|s| s.value),
            g,
        });
        if let (Some(s), Some(g)) = (s, g) {
            if g < best.g - TIE_TOL {
                best = GkMinimum {
                    k,
                    subset: subset.clone(),
                    g,
                    sigma: s,
                };
            }
        }
    }
    Ok((best, log))
}

/// Minimizes `g_k` over all terminal subsets that admit `k` disjoint cuts.
/// Ties go to the lexicographically smallest subset.
pub fn minimize_g_k(inst: &Instance, x: &[f64], k: usize) -> Result<GkMinimum, SeparationError> {
    check_x(inst, x)?;
    if k == 0 {
        return Err(SeparationError::ZeroCuts);
    }
    let subsets = subsets_of(&inst.terminals())?;
    Ok(minimize_with_log(inst, x, k, &subsets)?.0)
}

/// Which values of `k` a separation call tries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KStrategy {
    /// `k = 1 ..= min(|V| − 1, cap)`; `None` means no cap.
    All(Option<usize>),
    /// A single value of `k`.
    Fixed(usize),
}

impl KStrategy {
    pub fn values(&self, num_nodes: usize) -> Vec<usize> {
        let longest = num_nodes.saturating_sub(1);
        match *self {
            KStrategy::All(cap) => (1..=cap.map_or(longest, |c| c.min(longest))).collect(),
            KStrategy::Fixed(k) => vec![k],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationOptions {
    pub k: KStrategy,
    pub eps_cut: f64,
    /// Evaluate different `k` on the rayon pool.
    pub parallel: bool,
}

impl Default for SeparationOptions {
    fn default() -> Self {
        Self {
            k: KStrategy::All(None),
            eps_cut: EPS_CUT,
            parallel: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparationResult {
    /// The most violated inequality, if any beats `−eps_cut`.
    pub violated: Option<ValidInequality>,
    /// One violated inequality per `k` that has one, most violated first.
    pub candidates: Vec<ValidInequality>,
    /// `(k, min g_k)` for every `k` tried.
    pub certificate: Vec<(usize, f64)>,
    pub log: Vec<LogEntry>,
}

impl SeparationResult {
    pub fn min_g(&self) -> f64 {
        self.certificate.iter().map(|&(_, g)| g).fold(f64::INFINITY, f64::min)
    }
}

/// Finds a most violated disjoint-cut inequality at `x`, or certifies that
/// `g_k ≥ −eps_cut` for every `k` tried.
pub fn separate(inst: &Instance, x: &[f64], opts: &SeparationOptions) -> Result<SeparationResult, SeparationError> {
    check_x(inst, x)?;
    let ks = opts.k.values(inst.num_nodes());
    if ks.contains(&0) {
        return Err(SeparationError::ZeroCuts);
    }
    let subsets = subsets_of(&inst.terminals())?;
    let per_k: Vec<Result<(GkMinimum, Vec<LogEntry>), SeparationError>> = if opts.parallel {
        ks.par_iter().map(|&k| minimize_with_log(inst, x, k, &subsets)).collect()
    } else {
        ks.iter().map(|&k| minimize_with_log(inst, x, k, &subsets)).collect()
    };
    let mut certificate = Vec::with_capacity(ks.len());
    let mut log = Vec::new();
    let mut minima = Vec::new();
    for item in per_k {
        let (minimum, entries) = item?;
        certificate.push((minimum.k, minimum.g));
        log.extend(entries);
        minima.push(minimum);
    }
    let mut candidates = Vec::new();
    for m in minima.iter().filter(|m| m.g < -opts.eps_cut) {
        candidates.push(build_inequality(inst, &m.subset, &m.sigma.chain)?);
    }
    // Stable sort keeps smaller k first among equal violations.
    candidates.sort_by(|a, b| {
        let (va, vb) = (a.evaluate_violation(x), b.evaluate_violation(x));
        if (va - vb).abs() <= TIE_TOL {
            std::cmp::Ordering::Equal
        } else {
            va.total_cmp(&vb)
        }
    });
    Ok(SeparationResult {
        violated: candidates.first().cloned(),
        candidates,
        certificate,
        log,
    })
}
