//! Graph, network and instance data model.
//!
//! Nodes and arcs are dense indices. External names live in [`Labels`] and are
//! only consulted by the document format and the command line.

use std::fmt;

use thiserror::Error;

/// Relative tolerance used when testing `Σ b_v = 0`.
pub const BALANCE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("arc {arc} references unknown node {node}")]
    UnknownArcEndpoint { arc: usize, node: usize },
    #[error("unknown node {0}")]
    UnknownNode(usize),
    #[error("node {0} is not a terminal")]
    NotATerminal(usize),
    #[error("expected {expected} {what}, got {got}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },
}

/// A directed arc `tail -> head`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
}

impl Arc {
    pub fn new(tail: usize, head: usize) -> Self {
        Self { tail, head }
    }

    /// The endpoint opposite to `v`, if `v` is an endpoint.
    pub fn other(&self, v: usize) -> Option<usize> {
        if v == self.tail {
            Some(self.head)
        } else if v == self.head {
            Some(self.tail)
        } else {
            None
        }
    }
}

/// Subset of the node set, stored as a membership vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NodeSet {
    members: Vec<bool>,
}

impl NodeSet {
    pub fn empty(num_nodes: usize) -> Self {
        Self {
            members: vec![false; num_nodes],
        }
    }

    pub fn full(num_nodes: usize) -> Self {
        Self {
            members: vec![true; num_nodes],
        }
    }

    pub fn from_nodes<I>(num_nodes: usize, nodes: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut set = Self::empty(num_nodes);
        for v in nodes {
            if v >= num_nodes {
                return Err(ModelError::UnknownNode(v));
            }
            set.members[v] = true;
        }
        Ok(set)
    }

    pub fn from_mask(members: Vec<bool>) -> Self {
        Self { members }
    }

    pub fn universe_size(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.get(v).copied().unwrap_or(false)
    }

    pub fn insert(&mut self, v: usize) {
        self.members[v] = true;
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&m| m)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter_map(|(v, &m)| m.then_some(v))
    }

    pub fn is_subset_of(&self, other: &NodeSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    pub fn union(&self, other: &NodeSet) -> NodeSet {
        NodeSet {
            members: self
                .members
                .iter()
                .zip(&other.members)
                .map(|(a, b)| *a || *b)
                .collect(),
        }
    }

    pub fn intersection(&self, other: &NodeSet) -> NodeSet {
        NodeSet {
            members: self
                .members
                .iter()
                .zip(&other.members)
                .map(|(a, b)| *a && *b)
                .collect(),
        }
    }

    pub fn complement(&self) -> NodeSet {
        NodeSet {
            members: self.members.iter().map(|m| !m).collect(),
        }
    }

    pub fn as_mask(&self) -> &[bool] {
        &self.members
    }
}

/// Directed multigraph. Parallel arcs are kept as distinct arcs.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiGraph {
    num_nodes: usize,
    arcs: Vec<Arc>,
}

impl MultiGraph {
    /// Builds a graph, checking only that arc endpoints exist. Loops are
    /// accepted here and reported by [`MultiGraph::structural_violations`].
    pub fn new(num_nodes: usize, arcs: Vec<Arc>) -> Result<Self, ModelError> {
        for (a, arc) in arcs.iter().enumerate() {
            for node in [arc.tail, arc.head] {
                if node >= num_nodes {
                    return Err(ModelError::UnknownArcEndpoint { arc: a, node });
                }
            }
        }
        Ok(Self { num_nodes, arcs })
    }

    pub fn from_pairs(num_nodes: usize, pairs: &[(usize, usize)]) -> Result<Self, ModelError> {
        Self::new(
            num_nodes,
            pairs.iter().map(|&(u, v)| Arc::new(u, v)).collect(),
        )
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, a: usize) -> Arc {
        self.arcs[a]
    }

    /// Arcs with one endpoint inside `set` and the other outside, in either
    /// orientation. Returned in increasing arc order.
    pub fn crossing_arcs(&self, set: &NodeSet) -> Result<Vec<usize>, ModelError> {
        if set.universe_size() != self.num_nodes {
            return Err(ModelError::Dimension {
                what: "node memberships",
                expected: self.num_nodes,
                got: set.universe_size(),
            });
        }
        Ok(self
            .arcs
            .iter()
            .enumerate()
            .filter(|(_, arc)| set.contains(arc.tail) != set.contains(arc.head))
            .map(|(a, _)| a)
            .collect())
    }

    /// Weakly connected components, ignoring orientation.
    pub fn components(&self) -> Components {
        self.components_filtered(|_| true)
    }

    /// Components of the subgraph containing only arcs for which `keep` is true.
    pub fn components_filtered<F: Fn(usize) -> bool>(&self, keep: F) -> Components {
        let mut parent: Vec<usize> = (0..self.num_nodes).collect();
        fn find(parent: &mut [usize], mut v: usize) -> usize {
            while parent[v] != v {
                parent[v] = parent[parent[v]];
                v = parent[v];
            }
            v
        }
        for (a, arc) in self.arcs.iter().enumerate() {
            if !keep(a) {
                continue;
            }
            let (ru, rv) = (find(&mut parent, arc.tail), find(&mut parent, arc.head));
            if ru != rv {
                parent[ru.max(rv)] = ru.min(rv);
            }
        }
        let mut label = vec![usize::MAX; self.num_nodes];
        let mut of_node = vec![0; self.num_nodes];
        let mut count = 0;
        for v in 0..self.num_nodes {
            let root = find(&mut parent, v);
            if label[root] == usize::MAX {
                label[root] = count;
                count += 1;
            }
            of_node[v] = label[root];
        }
        Components { of_node, count }
    }

    pub fn is_weakly_connected(&self) -> bool {
        self.num_nodes <= 1 || self.components().count == 1
    }

    /// Loop arcs and connectivity problems.
    pub fn structural_violations(&self, require_connected: bool) -> Vec<Violation> {
        let mut out: Vec<Violation> = self
            .arcs
            .iter()
            .enumerate()
            .filter(|(_, arc)| arc.tail == arc.head)
            .map(|(a, arc)| Violation::LoopArc {
                arc: a,
                node: arc.tail,
            })
            .collect();
        if require_connected && !self.is_weakly_connected() {
            out.push(Violation::Disconnected {
                components: self.components().count,
            });
        }
        out
    }
}

/// Component labelling of the nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    pub of_node: Vec<usize>,
    pub count: usize,
}

impl Components {
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count];
        for (v, &c) in self.of_node.iter().enumerate() {
            out[c].push(v);
        }
        out
    }
}

/// A potential-based flow network `(G, β, r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    graph: MultiGraph,
    beta: Vec<f64>,
    degree: f64,
}

impl Network {
    pub fn new(graph: MultiGraph, beta: Vec<f64>, degree: f64) -> Result<Self, ModelError> {
        if beta.len() != graph.num_arcs() {
            return Err(ModelError::Dimension {
                what: "arc resistances",
                expected: graph.num_arcs(),
                got: beta.len(),
            });
        }
        Ok(Self {
            graph,
            beta,
            degree,
        })
    }

    pub fn graph(&self) -> &MultiGraph {
        &self.graph
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn degree(&self) -> f64 {
        self.degree
    }

    pub fn num_nodes(&self) -> usize {
        self.graph.num_nodes()
    }

    pub fn num_arcs(&self) -> usize {
        self.graph.num_arcs()
    }

    /// `μ_a = β_a^(-1/r)`.
    pub fn conductance(&self, a: usize) -> f64 {
        self.beta[a].powf(-1.0 / self.degree)
    }

    pub fn conductances(&self) -> Vec<f64> {
        (0..self.num_arcs()).map(|a| self.conductance(a)).collect()
    }

    /// Replaces each bundle of parallel arcs (same unordered endpoint pair) by
    /// one arc whose conductance is the bundle's sum. Returns the reduced
    /// network and, for every original arc, the index of its replacement.
    pub fn merge_parallel(&self) -> (Network, Vec<usize>) {
        let mut keys: Vec<(usize, usize)> = Vec::new();
        let mut sums: Vec<f64> = Vec::new();
        let mut map = Vec::with_capacity(self.num_arcs());
        for (a, arc) in self.graph.arcs().iter().enumerate() {
            let key = (arc.tail.min(arc.head), arc.tail.max(arc.head));
            let idx = match keys.iter().position(|&k| k == key) {
                Some(i) => i,
                None => {
                    keys.push(key);
                    sums.push(0.0);
                    keys.len() - 1
                }
            };
            sums[idx] += self.conductance(a);
            map.push(idx);
        }
        let arcs = keys.iter().map(|&(u, v)| Arc::new(u, v)).collect();
        let beta = sums.iter().map(|mu| mu.powf(-self.degree)).collect();
        let graph = MultiGraph {
            num_nodes: self.num_nodes(),
            arcs,
        };
        (
            Network {
                graph,
                beta,
                degree: self.degree,
            },
            map,
        )
    }

    pub fn parameter_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !(self.degree > 0.0 && self.degree.is_finite()) {
            out.push(Violation::NonPositiveDegree(self.degree));
        }
        for (a, &b) in self.beta.iter().enumerate() {
            if !(b > 0.0 && b.is_finite()) {
                out.push(Violation::NonPositiveResistance { arc: a, beta: b });
            } else if self.degree > 0.0 {
                let mu = self.conductance(a);
                if !(mu.is_finite() && mu > 0.0) {
                    out.push(Violation::DegenerateConductance { arc: a });
                }
            }
        }
        out
    }
}

/// Role of a node with respect to the demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    /// Member of `T⁺`.
    Entry,
    /// Member of `T⁻`.
    Exit,
    Inner,
}

/// Individual potential bounds `[π̲_v, π̄_v]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialBounds {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ArcMeta {
    pub diameter: Option<f64>,
    pub length: Option<f64>,
}

/// External names and descriptive metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Labels {
    pub nodes: Vec<String>,
    pub arcs: Vec<String>,
    pub arc_meta: Vec<ArcMeta>,
}

impl Labels {
    pub fn numbered(num_nodes: usize, num_arcs: usize) -> Self {
        Self {
            nodes: (0..num_nodes).map(|v| format!("v{v}")).collect(),
            arcs: (0..num_arcs).map(|a| format!("a{a}")).collect(),
            arc_meta: vec![ArcMeta::default(); num_arcs],
        }
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name)
    }

    pub fn arc_index(&self, name: &str) -> Option<usize> {
        self.arcs.iter().position(|n| n == name)
    }
}

/// A design instance `(N, T⁺, T⁻, b, π̄, c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub network: Network,
    pub kinds: Vec<NodeKind>,
    pub balance: Vec<f64>,
    pub pi_bar: f64,
    pub cost: Vec<f64>,
    /// Individual bounds; when present, `pi_bar` is their derived global bound.
    pub bounds: Option<Vec<PotentialBounds>>,
    pub labels: Labels,
}

impl Instance {
    /// Instance with numbered labels and no individual bounds.
    pub fn new(
        network: Network,
        kinds: Vec<NodeKind>,
        balance: Vec<f64>,
        pi_bar: f64,
        cost: Vec<f64>,
    ) -> Result<Self, ModelError> {
        let (n, m) = (network.num_nodes(), network.num_arcs());
        for (what, expected, got) in [
            ("node kinds", n, kinds.len()),
            ("balances", n, balance.len()),
            ("arc costs", m, cost.len()),
        ] {
            if expected != got {
                return Err(ModelError::Dimension {
                    what,
                    expected,
                    got,
                });
            }
        }
        Ok(Self {
            labels: Labels::numbered(n, m),
            network,
            kinds,
            balance,
            pi_bar,
            cost,
            bounds: None,
        })
    }

    /// Two-node helper used throughout the tests: entry `0`, exit `last`.
    pub fn single_pair(network: Network, source: usize, sink: usize, demand: f64, pi_bar: f64, cost: Vec<f64>) -> Result<Self, ModelError> {
        let n = network.num_nodes();
        if source >= n {
            return Err(ModelError::UnknownNode(source));
        }
        if sink >= n {
            return Err(ModelError::UnknownNode(sink));
        }
        let mut kinds = vec![NodeKind::Inner; n];
        let mut balance = vec![0.0; n];
        kinds[source] = NodeKind::Entry;
        kinds[sink] = NodeKind::Exit;
        balance[source] = demand;
        balance[sink] = -demand;
        Self::new(network, kinds, balance, pi_bar, cost)
    }

    pub fn num_nodes(&self) -> usize {
        self.network.num_nodes()
    }

    pub fn num_arcs(&self) -> usize {
        self.network.num_arcs()
    }

    pub fn graph(&self) -> &MultiGraph {
        self.network.graph()
    }

    pub fn degree(&self) -> f64 {
        self.network.degree()
    }

    pub fn entries(&self) -> Vec<usize> {
        self.nodes_of_kind(NodeKind::Entry)
    }

    pub fn exits(&self) -> Vec<usize> {
        self.nodes_of_kind(NodeKind::Exit)
    }

    /// `T = T⁺ ∪ T⁻` in increasing node order.
    pub fn terminals(&self) -> Vec<usize> {
        (0..self.num_nodes())
            .filter(|&v| self.kinds[v] != NodeKind::Inner)
            .collect()
    }

    fn nodes_of_kind(&self, kind: NodeKind) -> Vec<usize> {
        (0..self.num_nodes())
            .filter(|&v| self.kinds[v] == kind)
            .collect()
    }

    pub fn is_entry(&self, v: usize) -> bool {
        self.kinds[v] == NodeKind::Entry
    }

    pub fn is_exit(&self, v: usize) -> bool {
        self.kinds[v] == NodeKind::Exit
    }

    /// Total cost `c·x`.
    pub fn cost_of(&self, x: &[f64]) -> f64 {
        self.cost.iter().zip(x).map(|(c, x)| c * x).sum()
    }

    /// At most one node carries positive and at most one negative balance.
    /// Feasibility is then monotone in the built arc set.
    pub fn is_single_pair(&self) -> bool {
        let pos = self.balance.iter().filter(|&&b| b > 0.0).count();
        let neg = self.balance.iter().filter(|&&b| b < 0.0).count();
        pos <= 1 && neg <= 1
    }

    /// Sets individual bounds and derives `π̄ := max π̄_v − min π̲_v`.
    pub fn set_individual_bounds(&mut self, bounds: Vec<PotentialBounds>) {
        let hi = bounds.iter().map(|b| b.upper).fold(f64::NEG_INFINITY, f64::max);
        let lo = bounds.iter().map(|b| b.lower).fold(f64::INFINITY, f64::min);
        self.pi_bar = hi - lo;
        self.bounds = Some(bounds);
    }
}

/// A single broken model invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    LoopArc { arc: usize, node: usize },
    Disconnected { components: usize },
    NonPositiveDegree(f64),
    NonPositiveResistance { arc: usize, beta: f64 },
    DegenerateConductance { arc: usize },
    Unbalanced { sum: f64 },
    EntryWithNegativeBalance { node: usize, balance: f64 },
    ExitWithPositiveBalance { node: usize, balance: f64 },
    InnerWithBalance { node: usize, balance: f64 },
    NonFiniteBalance { node: usize },
    NonPositivePiBar(f64),
    NonPositiveCost { arc: usize, cost: f64 },
    InvertedBounds { node: usize },
    Dimension { what: &'static str, expected: usize, got: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::LoopArc { arc, node } => write!(f, "loop arc {arc} at node {node}"),
            Violation::Disconnected { components } => {
                write!(f, "graph is not weakly connected ({components} components)")
            }
            Violation::NonPositiveDegree(r) => write!(f, "degree r = {r} must be positive"),
            Violation::NonPositiveResistance { arc, beta } => {
                write!(f, "arc {arc} has non-positive resistance {beta}")
            }
            Violation::DegenerateConductance { arc } => {
                write!(f, "arc {arc} has a non-finite conductance")
            }
            Violation::Unbalanced { sum } => write!(f, "balance sums to {sum} ≠ 0"),
            Violation::EntryWithNegativeBalance { node, balance } => {
                write!(f, "entry node {node} has negative balance {balance}")
            }
            Violation::ExitWithPositiveBalance { node, balance } => {
                write!(f, "exit node {node} has positive balance {balance}")
            }
            Violation::InnerWithBalance { node, balance } => {
                write!(f, "non-terminal node {node} has nonzero balance {balance}")
            }
            Violation::NonFiniteBalance { node } => write!(f, "node {node} has a non-finite balance"),
            Violation::NonPositivePiBar(p) => write!(f, "potential bound {p} must be positive"),
            Violation::NonPositiveCost { arc, cost } => {
                write!(f, "arc {arc} has non-positive cost {cost}")
            }
            Violation::InvertedBounds { node } => {
                write!(f, "node {node} has lower potential bound above its upper bound")
            }
            Violation::Dimension {
                what,
                expected,
                got,
            } => write!(f, "expected {expected} {what}, got {got}"),
        }
    }
}

/// Outcome of [`validate_instance`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

pub fn validate_instance(inst: &Instance) -> ValidationReport {
    let n = inst.num_nodes();
    let m = inst.num_arcs();
    let mut violations = Vec::new();
    for (what, expected, got) in [
        ("node kinds", n, inst.kinds.len()),
        ("balances", n, inst.balance.len()),
        ("arc costs", m, inst.cost.len()),
    ] {
        if expected != got {
            violations.push(Violation::Dimension {
                what,
                expected,
                got,
            });
        }
    }
    if !violations.is_empty() {
        return ValidationReport { violations };
    }

    violations.extend(inst.graph().structural_violations(true));
    violations.extend(inst.network.parameter_violations());

    let mut sum = 0.0;
    let mut scale = 0.0f64;
    for (v, &b) in inst.balance.iter().enumerate() {
        if !b.is_finite() {
            violations.push(Violation::NonFiniteBalance { node: v });
            continue;
        }
        sum += b;
        scale += b.abs();
        match inst.kinds[v] {
            NodeKind::Entry if b < 0.0 => violations.push(Violation::EntryWithNegativeBalance {
                node: v,
                balance: b,
            }),
            NodeKind::Exit if b > 0.0 => violations.push(Violation::ExitWithPositiveBalance {
                node: v,
                balance: b,
            }),
            NodeKind::Inner if b != 0.0 => violations.push(Violation::InnerWithBalance {
                node: v,
                balance: b,
            }),
            _ => {}
        }
    }
    if sum.abs() > BALANCE_TOL * scale.max(1.0) {
        violations.push(Violation::Unbalanced { sum });
    }
    if !(inst.pi_bar > 0.0 && inst.pi_bar.is_finite()) {
        violations.push(Violation::NonPositivePiBar(inst.pi_bar));
    }
    for (a, &c) in inst.cost.iter().enumerate() {
        if !(c > 0.0 && c.is_finite()) {
            violations.push(Violation::NonPositiveCost { arc: a, cost: c });
        }
    }
    if let Some(bounds) = &inst.bounds {
        if bounds.len() != n {
            violations.push(Violation::Dimension {
                what: "potential bounds",
                expected: n,
                got: bounds.len(),
            });
        } else {
            for (v, b) in bounds.iter().enumerate() {
                if !(b.lower <= b.upper) {
                    violations.push(Violation::InvertedBounds { node: v });
                }
            }
        }
    }
    ValidationReport { violations }
}

/// `b(X) = Σ_{v ∈ X} b_v` for a set of terminals.
pub fn balance_of_subset(inst: &Instance, subset: &[usize]) -> Result<f64, ModelError> {
    let mut total = 0.0;
    for &v in subset {
        if v >= inst.num_nodes() {
            return Err(ModelError::UnknownNode(v));
        }
        if inst.kinds[v] == NodeKind::Inner {
            return Err(ModelError::NotATerminal(v));
        }
        total += inst.balance[v];
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_node(balance: Vec<f64>, arcs: &[(usize, usize)]) -> Instance {
        let g = MultiGraph::from_pairs(2, arcs).unwrap();
        let m = g.num_arcs();
        let net = Network::new(g, vec![1.0; m], 2.0).unwrap();
        Instance::new(
            net,
            vec![NodeKind::Entry, NodeKind::Exit],
            balance,
            1.0,
            vec![1.0; m],
        )
        .unwrap()
    }

    #[test]
    fn minimal_instance_is_valid() {
        let inst = two_node(vec![1.0, -1.0], &[(0, 1)]);
        let report = validate_instance(&inst);
        assert!(report.is_ok(), "{report}");
    }

    #[test]
    fn imbalance_is_reported() {
        let inst = two_node(vec![1.0, 0.0], &[(0, 1)]);
        let report = validate_instance(&inst);
        assert_eq!(report.violations, vec![Violation::Unbalanced { sum: 1.0 }]);
        assert_eq!(report.to_string(), "balance sums to 1 ≠ 0");
    }

    #[test]
    fn loop_is_reported() {
        let inst = two_node(vec![1.0, -1.0], &[(0, 1), (1, 1)]);
        let report = validate_instance(&inst);
        assert!(report
            .violations
            .contains(&Violation::LoopArc { arc: 1, node: 1 }));
        assert!(report.to_string().contains("loop arc"));
    }

    #[test]
    fn disconnected_and_bad_parameters() {
        let g = MultiGraph::from_pairs(3, &[(0, 1)]).unwrap();
        let net = Network::new(g, vec![-1.0], 2.0).unwrap();
        let inst = Instance::new(
            net,
            vec![NodeKind::Entry, NodeKind::Inner, NodeKind::Exit],
            vec![1.0, 0.5, -1.0],
            0.0,
            vec![0.0],
        )
        .unwrap();
        let v = validate_instance(&inst).violations;
        assert!(v.contains(&Violation::Disconnected { components: 2 }));
        assert!(v.contains(&Violation::NonPositiveResistance { arc: 0, beta: -1.0 }));
        assert!(v.contains(&Violation::InnerWithBalance {
            node: 1,
            balance: 0.5
        }));
        assert!(v.contains(&Violation::NonPositivePiBar(0.0)));
        assert!(v.contains(&Violation::NonPositiveCost { arc: 0, cost: 0.0 }));
    }

    #[test]
    fn crossing_arcs_on_paths() {
        // s - v - t
        let g = MultiGraph::from_pairs(3, &[(0, 1), (1, 2)]).unwrap();
        let s = NodeSet::from_nodes(3, [0]).unwrap();
        assert_eq!(g.crossing_arcs(&s).unwrap(), vec![0]);
        assert!(g.crossing_arcs(&NodeSet::full(3)).unwrap().is_empty());
        assert!(g.crossing_arcs(&NodeSet::empty(3)).unwrap().is_empty());
    }

    #[test]
    fn crossing_arcs_counterexample_graph() {
        // s1 = 0, s2 = 1, v = 2, t = 3; arcs s1v, vt, s2t
        let g = MultiGraph::from_pairs(4, &[(0, 2), (2, 3), (1, 3)]).unwrap();
        let s = NodeSet::from_nodes(4, [0, 2]).unwrap();
        assert_eq!(g.crossing_arcs(&s).unwrap(), vec![1]);
    }

    #[test]
    fn unknown_node_in_cut() {
        assert_eq!(
            NodeSet::from_nodes(3, [5]).unwrap_err(),
            ModelError::UnknownNode(5)
        );
    }

    #[test]
    fn subset_balances() {
        let g = MultiGraph::from_pairs(3, &[(0, 1), (0, 2)]).unwrap();
        let net = Network::new(g, vec![1.0; 2], 2.0).unwrap();
        let inst = Instance::new(
            net,
            vec![NodeKind::Entry, NodeKind::Exit, NodeKind::Exit],
            vec![3.0, -1.0, -2.0],
            1.0,
            vec![1.0; 2],
        )
        .unwrap();
        assert_eq!(balance_of_subset(&inst, &[0, 1]).unwrap(), 2.0);
        assert_eq!(balance_of_subset(&inst, &[]).unwrap(), 0.0);
        assert_eq!(balance_of_subset(&inst, &inst.terminals()).unwrap(), 0.0);
    }

    #[test]
    fn non_terminal_subset_is_rejected() {
        let g = MultiGraph::from_pairs(3, &[(0, 1), (1, 2)]).unwrap();
        let net = Network::new(g, vec![1.0; 2], 2.0).unwrap();
        let inst = Instance::single_pair(net, 0, 2, 1.0, 1.0, vec![1.0; 2]).unwrap();
        assert_eq!(
            balance_of_subset(&inst, &[1]).unwrap_err(),
            ModelError::NotATerminal(1)
        );
    }

    #[test]
    fn merge_parallel_sums_conductances() {
        let g = MultiGraph::from_pairs(2, &[(0, 1), (1, 0), (0, 1)]).unwrap();
        let net = Network::new(g, vec![1.0, 4.0, 1.0], 2.0).unwrap();
        let (merged, map) = net.merge_parallel();
        assert_eq!(merged.num_arcs(), 1);
        assert_eq!(map, vec![0, 0, 0]);
        assert!((merged.conductance(0) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn derived_global_bound() {
        let g = MultiGraph::from_pairs(2, &[(0, 1)]).unwrap();
        let net = Network::new(g, vec![1.0], 2.0).unwrap();
        let mut inst = Instance::single_pair(net, 0, 1, 1.0, 1.0, vec![1.0]).unwrap();
        inst.set_individual_bounds(vec![
            PotentialBounds {
                lower: 2.0,
                upper: 10.0,
            },
            PotentialBounds {
                lower: 1.0,
                upper: 6.0,
            },
        ]);
        assert_eq!(inst.pi_bar, 9.0);
    }
}
