//! Cost-minimal design: branch-and-cut master and brute-force reference.
//!
//! The master LP is `min c·x` over `x ∈ [0,1]^A` and the current cut pool.
//! Fractional optima are first fed to the separation routine, then branched
//! on. Integral optima are checked with the flow oracle; an infeasible point
//! is cut off by a separated disjoint-cut inequality when one exists and by a
//! no-good cut otherwise, since the inequality family is necessary but not
//! sufficient for feasibility.

use std::collections::HashSet;
use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::flow::{check_feasibility, FlowError};
use crate::inequality::{InequalityKey, ValidInequality};
use crate::lp::{solve_lp, LinearProgram, LpError, LpStatus, Relation, FEASIBILITY_TOL};
use crate::model::{validate_instance, Instance};
use crate::separation::{separate, KStrategy, SeparationError, SeparationOptions, EPS_CUT};

/// Largest arc count accepted by [`solve_bruteforce`].
pub const BRUTE_FORCE_MAX_ARCS: usize = 20;
/// Distance from an integer below which an LP value counts as integral.
pub const INTEGRALITY_TOL: f64 = 1e-6;
/// Largest violation of a pool cut by a feasible design that is tolerated.
pub const SOUNDNESS_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("instance is invalid: {0}")]
    Invalid(String),
    #[error("brute force is limited to {BRUTE_FORCE_MAX_ARCS} arcs, instance has {0}")]
    TooLarge(usize),
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("cut {cut} is violated by {violation} at a feasible design")]
    UnsoundCut { cut: usize, violation: f64 },
    #[error("master LP ended with status {0:?}")]
    MasterStatus(LpStatus),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Separation(#[from] SeparationError),
    #[error(transparent)]
    Lp(#[from] LpError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchingRule {
    /// Variable closest to 1/2; ties go to the larger cost, then the smaller index.
    MostFractional,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub k: KStrategy,
    /// Separate disjoint-cut inequalities; without them only no-goods are used.
    pub cuts: bool,
    pub eps_cut: f64,
    pub node_limit: Option<usize>,
    pub time_limit: Option<Duration>,
    /// Separate fractional points only at the root.
    pub root_only_cuts: bool,
    /// Separation rounds on fractional points per node.
    pub max_rounds: usize,
    pub branching: BranchingRule,
    /// Run separation for different `k` on the rayon pool.
    pub parallel: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            k: KStrategy::All(None),
            cuts: true,
            eps_cut: EPS_CUT,
            node_limit: None,
            time_limit: None,
            root_only_cuts: false,
            max_rounds: 50,
            branching: BranchingRule::MostFractional,
            parallel: false,
        }
    }
}

impl SolverConfig {
    fn check(&self) -> Result<(), SolveError> {
        if self.node_limit == Some(0) {
            return Err(SolveError::Config("node limit must be positive".into()));
        }
        if self.time_limit.is_some_and(|t| t.is_zero()) {
            return Err(SolveError::Config("time limit must be positive".into()));
        }
        if !(self.eps_cut > 0.0) {
            return Err(SolveError::Config("cut tolerance must be positive".into()));
        }
        if matches!(self.k, KStrategy::Fixed(0) | KStrategy::All(Some(0))) {
            return Err(SolveError::Config("k must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    LimitReached,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::LimitReached => "limit",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveStats {
    /// Disjoint-cut inequalities added to the pool.
    pub cuts_added: usize,
    pub nogoods_added: usize,
    pub nodes_explored: usize,
    /// Child nodes created by branching; zero means solved at the root.
    pub branch_nodes: usize,
    pub lp_solves: usize,
    pub lp_iterations: usize,
    pub separation_calls: usize,
    pub feasibility_checks: usize,
    pub wall_time: Duration,
}

/// What happened after one master LP solve.
#[derive(Debug, Clone, PartialEq)]
pub enum NodeAction {
    /// Disjoint-cut inequalities added.
    Cuts(usize),
    NoGood,
    Branch(usize),
    Incumbent,
    /// Bound not better than the incumbent.
    Pruned,
    Infeasible,
    Limit,
}

impl fmt::Display for NodeAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeAction::Cuts(n) => write!(f, "cuts {n}"),
            NodeAction::NoGood => f.write_str("nogood"),
            NodeAction::Branch(a) => write!(f, "branch x{a}"),
            NodeAction::Incumbent => f.write_str("incumbent"),
            NodeAction::Pruned => f.write_str("pruned"),
            NodeAction::Infeasible => f.write_str("infeasible"),
            NodeAction::Limit => f.write_str("limit"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogLine {
    pub node: usize,
    pub depth: usize,
    /// `None` when the node LP is infeasible.
    pub lp_value: Option<f64>,
    pub pool_size: usize,
    pub action: NodeAction,
}

impl fmt::Display for LogLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let value = self.lp_value.map_or("-".to_string(), |v| format!("{v:.6}"));
        write!(
            f,
            "node {} depth {} lp {} pool {} {}",
            self.node, self.depth, value, self.pool_size, self.action
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CutKind {
    Disjoint(ValidInequality),
    NoGood,
}

/// A pool row `coefficients · x ≥ rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolCut {
    pub coefficients: Vec<f64>,
    pub rhs: f64,
    pub kind: CutKind,
}

impl PoolCut {
    pub fn slack(&self, x: &[f64]) -> f64 {
        self.coefficients.iter().zip(x).map(|(c, x)| c * x).sum::<f64>() - self.rhs
    }
}

/// No-good cut for an infeasible binary point. With one entry and one exit
/// (and no individual bounds) feasibility is monotone in the built set, so
/// every subset is cut off too; otherwise only the point itself is.
pub fn nogood(inst: &Instance, point: &[f64]) -> PoolCut {
    let monotone = inst.is_single_pair() && inst.bounds.is_none();
    let mut coefficients = vec![0.0; point.len()];
    let mut rhs = 1.0;
    for (a, &v) in point.iter().enumerate() {
        if v < 0.5 {
            coefficients[a] = 1.0;
        } else if !monotone {
            coefficients[a] = -1.0;
            rhs -= 1.0;
        }
    }
    PoolCut {
        coefficients,
        rhs,
        kind: CutKind::NoGood,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub best_x: Option<Vec<f64>>,
    pub best_cost: Option<f64>,
    pub dual_bound: f64,
    pub stats: SolveStats,
    pub log: Vec<LogLine>,
    pub pool: Vec<PoolCut>,
}

impl SolveOutcome {
    /// `100 · (primal − dual) / |primal|`; `None` without an incumbent.
    pub fn gap_pct(&self) -> Option<f64> {
        let best = self.best_cost?;
        if self.status == SolveStatus::Optimal {
            return Some(0.0);
        }
        let gap = (best - self.dual_bound).max(0.0);
        Some(if best.abs() > 0.0 { 100.0 * gap / best.abs() } else if gap > 0.0 { f64::INFINITY } else { 0.0 })
    }
}

fn validated(inst: &Instance) -> Result<(), SolveError> {
    let report = validate_instance(inst);
    if report.is_ok() {
        Ok(())
    } else {
        Err(SolveError::Invalid(report.to_string()))
    }
}

/// Cheapest feasible binary design by enumeration in order of cost.
pub fn solve_bruteforce(inst: &Instance) -> Result<SolveOutcome, SolveError> {
    validated(inst)?;
    let m = inst.num_arcs();
    if m > BRUTE_FORCE_MAX_ARCS {
        return Err(SolveError::TooLarge(m));
    }
    let start = Instant::now();
    let mut stats = SolveStats::default();
    let decode = |mask: u32| -> Vec<f64> { (0..m).map(|a| (mask >> a & 1) as f64).collect() };
    let mut outcome = SolveOutcome {
        status: SolveStatus::Infeasible,
        best_x: None,
        best_cost: None,
        dual_bound: f64::INFINITY,
        stats: SolveStats::default(),
        log: Vec::new(),
        pool: Vec::new(),
    };
    let monotone = inst.is_single_pair() && inst.bounds.is_none();
    let full = decode(((1u64 << m) - 1) as u32);
    if monotone {
        stats.feasibility_checks += 1;
        if !check_feasibility(inst, &full)?.feasible {
            stats.wall_time = start.elapsed();
            outcome.stats = stats;
            return Ok(outcome);
        }
    }
    let mut order: Vec<(f64, u32)> = (0..(1u64 << m) as u32)
        .map(|mask| (inst.cost_of(&decode(mask)), mask))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for (cost, mask) in order {
        let x = decode(mask);
        stats.feasibility_checks += 1;
        if check_feasibility(inst, &x)?.feasible {
            outcome.status = SolveStatus::Optimal;
            outcome.best_x = Some(x);
            outcome.best_cost = Some(cost);
            outcome.dual_bound = cost;
            break;
        }
    }
    stats.wall_time = start.elapsed();
    outcome.stats = stats;
    Ok(outcome)
}

#[derive(Debug, Clone)]
struct Node {
    id: usize,
    depth: usize,
    bound: f64,
    lower: Vec<f64>,
    upper: Vec<f64>,
    /// Pool rows included in this node's LP; children inherit them.
    active: Vec<usize>,
}

struct Master<'a> {
    inst: &'a Instance,
    cfg: &'a SolverConfig,
    pool: Vec<PoolCut>,
    keys: HashSet<InequalityKey>,
    nogood_points: HashSet<Vec<bool>>,
    stats: SolveStats,
    log: Vec<LogLine>,
    incumbent: Option<(f64, Vec<f64>)>,
    start: Instant,
}

enum NodeResult {
    Done,
    Children(Node, Node),
    /// Interrupted by a limit; the node is still open with this bound.
    Interrupted(f64),
}

impl Master<'_> {
    fn out_of_time(&self) -> bool {
        self.cfg.time_limit.is_some_and(|t| self.start.elapsed() >= t)
    }

    fn incumbent_cost(&self) -> f64 {
        self.incumbent.as_ref().map_or(f64::INFINITY, |(c, _)| *c)
    }

    fn prunes(&self, bound: f64) -> bool {
        let inc = self.incumbent_cost();
        bound >= inc - 1e-9 * inc.abs().max(1.0)
    }

    fn node_lp(&self, node: &Node) -> LinearProgram {
        let mut lp = LinearProgram::new();
        for a in 0..self.inst.num_arcs() {
            lp.add_var(self.inst.cost[a], node.lower[a], node.upper[a]);
        }
        for cut in node.active.iter().map(|&i| &self.pool[i]) {
            let coeffs = cut
                .coefficients
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0.0)
                .map(|(a, &c)| (a, c))
                .collect();
            lp.add_constraint(coeffs, Relation::Ge, cut.rhs);
        }
        lp
    }

    /// Pool rows outside the node LP that `x` violates.
    fn violated_inactive(&self, node: &Node, x: &[f64]) -> Vec<usize> {
        let mut included = vec![false; self.pool.len()];
        for &i in &node.active {
            included[i] = true;
        }
        (0..self.pool.len())
            .filter(|&i| !included[i])
            .filter(|&i| self.pool[i].slack(x) < -FEASIBILITY_TOL * self.pool[i].rhs.abs().max(1.0))
            .collect()
    }

    fn log(&mut self, node: &Node, lp_value: Option<f64>, action: NodeAction) {
        self.log.push(LogLine {
            node: node.id,
            depth: node.depth,
            lp_value,
            pool_size: self.pool.len(),
            action,
        });
    }

    /// Adds the separated inequalities that are not in the pool yet.
    fn add_separated(&mut self, x: &[f64], node: &mut Node) -> Result<usize, SolveError> {
        let opts = SeparationOptions {
            k: self.cfg.k,
            eps_cut: self.cfg.eps_cut,
            parallel: self.cfg.parallel,
        };
        self.stats.separation_calls += 1;
        let result = separate(self.inst, x, &opts)?;
        let mut added = 0;
        for ineq in result.candidates {
            if self.keys.insert(ineq.key()) {
                node.active.push(self.pool.len());
                self.pool.push(PoolCut {
                    coefficients: ineq.coefficients.clone(),
                    rhs: ineq.rhs,
                    kind: CutKind::Disjoint(ineq),
                });
                added += 1;
            }
        }
        self.stats.cuts_added += added;
        Ok(added)
    }

    fn check_soundness(&self, x: &[f64]) -> Result<(), SolveError> {
        for (i, cut) in self.pool.iter().enumerate() {
            let slack = cut.slack(x);
            if slack < -SOUNDNESS_TOL {
                return Err(SolveError::UnsoundCut {
                    cut: i,
                    violation: -slack,
                });
            }
        }
        Ok(())
    }

    /// Solves the node LP over its active rows, pulling in violated pool rows
    /// until the solution satisfies the whole pool.
    fn process(&mut self, mut node: Node) -> Result<NodeResult, SolveError> {
        let mut rounds = 0;
        loop {
            if self.out_of_time() {
                self.log(&node, None, NodeAction::Limit);
                return Ok(NodeResult::Interrupted(node.bound));
            }
            let lp = self.node_lp(&node);
            let sol = solve_lp(&lp)?;
            self.stats.lp_solves += 1;
            self.stats.lp_iterations += sol.iterations;
            match sol.status {
                LpStatus::Optimal => {}
                LpStatus::Infeasible => {
                    self.log(&node, None, NodeAction::Infeasible);
                    return Ok(NodeResult::Done);
                }
                status => return Err(SolveError::MasterStatus(status)),
            }
            let value = sol.objective;
            if self.prunes(value) {
                self.log(&node, Some(value), NodeAction::Pruned);
                return Ok(NodeResult::Done);
            }
            let x = &sol.x;
            let missing = self.violated_inactive(&node, x);
            if !missing.is_empty() {
                node.active.extend(missing);
                continue;
            }
            let integral = x.iter().all(|v| (v - v.round()).abs() <= INTEGRALITY_TOL);
            if integral {
                let point: Vec<f64> = x.iter().map(|v| v.round()).collect();
                self.stats.feasibility_checks += 1;
                if check_feasibility(self.inst, &point)?.feasible {
                    self.check_soundness(&point)?;
                    let cost = self.inst.cost_of(&point);
                    if cost < self.incumbent_cost() {
                        self.incumbent = Some((cost, point));
                    }
                    self.log(&node, Some(value), NodeAction::Incumbent);
                    return Ok(NodeResult::Done);
                }
                let may_cut = self.cfg.cuts && (!self.cfg.root_only_cuts || node.depth == 0);
                let added = if may_cut { self.add_separated(&point, &mut node)? } else { 0 };
                if added > 0 {
                    self.log(&node, Some(value), NodeAction::Cuts(added));
                } else {
                    let key: Vec<bool> = point.iter().map(|&v| v > 0.5).collect();
                    if !self.nogood_points.insert(key) {
                        return Err(SolveError::Lp(LpError::Numerical(
                            "master LP returned a point that is already cut off".into(),
                        )));
                    }
                    node.active.push(self.pool.len());
                    self.pool.push(nogood(self.inst, &point));
                    self.stats.nogoods_added += 1;
                    self.log(&node, Some(value), NodeAction::NoGood);
                }
                continue;
            }
            let may_cut = self.cfg.cuts
                && rounds < self.cfg.max_rounds
                && (!self.cfg.root_only_cuts || node.depth == 0);
            if may_cut {
                let clamped: Vec<f64> = x.iter().map(|v| v.clamp(0.0, 1.0)).collect();
                let added = self.add_separated(&clamped, &mut node)?;
                if added > 0 {
                    rounds += 1;
                    self.log(&node, Some(value), NodeAction::Cuts(added));
                    continue;
                }
            }
            let var = self.branching_variable(x);
            self.log(&node, Some(value), NodeAction::Branch(var));
            let mut down = node.clone();
            down.upper[var] = 0.0;
            let mut up = node;
            up.lower[var] = 1.0;
            for child in [&mut down, &mut up] {
                child.depth += 1;
                child.bound = value;
            }
            return Ok(NodeResult::Children(down, up));
        }
    }

    fn branching_variable(&self, x: &[f64]) -> usize {
        match self.cfg.branching {
            BranchingRule::MostFractional => {
                let mut best: Option<(f64, usize)> = None;
                for (a, &v) in x.iter().enumerate() {
                    let frac = (v - v.round()).abs();
                    if frac <= INTEGRALITY_TOL {
                        continue;
                    }
                    let better = match best {
                        None => true,
                        Some((bf, ba)) => {
                            frac > bf + 1e-12
                                || ((frac - bf).abs() <= 1e-12 && self.inst.cost[a] > self.inst.cost[ba])
                        }
                    };
                    if better {
                        best = Some((frac, a));
                    }
                }
                best.expect("fractional point has a fractional variable").1
            }
        }
    }
}

/// Branch-and-cut over binary designs. Node selection is best-bound with
/// ties broken by creation order; the run is deterministic.
pub fn solve_branch_and_cut(inst: &Instance, cfg: &SolverConfig) -> Result<SolveOutcome, SolveError> {
    validated(inst)?;
    cfg.check()?;
    let m = inst.num_arcs();
    let mut master = Master {
        inst,
        cfg,
        pool: Vec::new(),
        keys: HashSet::new(),
        nogood_points: HashSet::new(),
        stats: SolveStats::default(),
        log: Vec::new(),
        incumbent: None,
        start: Instant::now(),
    };
    let mut open = vec![Node {
        id: 0,
        depth: 0,
        bound: f64::NEG_INFINITY,
        lower: vec![0.0; m],
        upper: vec![1.0; m],
        active: Vec::new(),
    }];
    let mut next_id = 1;
    let mut limited = false;
    while !open.is_empty() {
        let pick = (0..open.len())
            .min_by(|&i, &j| open[i].bound.total_cmp(&open[j].bound).then(open[i].id.cmp(&open[j].id)))
            .expect("open list is not empty");
        if cfg.node_limit.is_some_and(|l| master.stats.nodes_explored >= l) || master.out_of_time() {
            master.log(&open[pick], None, NodeAction::Limit);
            limited = true;
            break;
        }
        let node = open.swap_remove(pick);
        if master.prunes(node.bound) {
            continue;
        }
        master.stats.nodes_explored += 1;
        match master.process(node.clone())? {
            NodeResult::Done => {}
            NodeResult::Children(mut down, mut up) => {
                down.id = next_id;
                up.id = next_id + 1;
                next_id += 2;
                master.stats.branch_nodes += 2;
                open.push(down);
                open.push(up);
            }
            NodeResult::Interrupted(bound) => {
                open.push(Node { bound, ..node });
                limited = true;
                break;
            }
        }
    }
    let inc_cost = master.incumbent_cost();
    let open_bound = open
        .iter()
        .filter(|n| !master.prunes(n.bound))
        .map(|n| n.bound)
        .fold(f64::INFINITY, f64::min);
    let status = if limited && open_bound < inc_cost {
        SolveStatus::LimitReached
    } else if master.incumbent.is_some() {
        SolveStatus::Optimal
    } else {
        SolveStatus::Infeasible
    };
    let dual_bound = match status {
        SolveStatus::LimitReached => open_bound.min(inc_cost),
        SolveStatus::Optimal => inc_cost,
        SolveStatus::Infeasible => f64::INFINITY,
    };
    master.stats.wall_time = master.start.elapsed();
    let (best_cost, best_x) = match master.incumbent {
        Some((c, x)) => (Some(c), Some(x)),
        None => (None, None),
    };
    Ok(SolveOutcome {
        status,
        best_x,
        best_cost,
        dual_bound,
        stats: master.stats,
        log: master.log,
        pool: master.pool,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{MultiGraph, Network};
    use approx::assert_relative_eq;

    fn parallel_pair(demand: f64) -> Instance {
        // Cheap weak pipe (beta 4) and expensive strong pipe (beta 1).
        let g = MultiGraph::from_pairs(2, &[(0, 1), (0, 1)]).unwrap();
        let net = Network::new(g, vec![4.0, 1.0], 2.0).unwrap();
        Instance::single_pair(net, 0, 1, demand, 2.0, vec![1.0, 3.0]).unwrap()
    }

    #[test]
    fn zero_demand_builds_nothing() {
        let inst = parallel_pair(0.0);
        let out = solve_bruteforce(&inst).unwrap();
        assert_eq!(out.best_x, Some(vec![0.0, 0.0]));
        assert_eq!(out.best_cost, Some(0.0));
        let bc = solve_branch_and_cut(&inst, &SolverConfig::default()).unwrap();
        assert_eq!(bc.best_cost, Some(0.0));
        assert_eq!(bc.status, SolveStatus::Optimal);
    }

    #[test]
    fn two_options_pick_the_cheapest_sufficient_set() {
        // Weak alone carries sqrt(2/4) ≈ 0.707, strong alone sqrt(2) ≈ 1.414,
        // both (μ = 0.5 + 1) carry 1.5·sqrt(2) ≈ 2.12.
        for (demand, want) in [(0.5, vec![1.0, 0.0]), (1.0, vec![0.0, 1.0]), (2.0, vec![1.0, 1.0])] {
            let inst = parallel_pair(demand);
            let brute = solve_bruteforce(&inst).unwrap();
            assert_eq!(brute.best_x.as_deref(), Some(&want[..]), "demand {demand}");
            let bc = solve_branch_and_cut(&inst, &SolverConfig::default()).unwrap();
            assert_eq!(bc.best_x.as_deref(), Some(&want[..]), "demand {demand}");
            assert_relative_eq!(bc.dual_bound, bc.best_cost.unwrap());
        }
    }

    #[test]
    fn too_much_demand_is_infeasible() {
        let inst = parallel_pair(2.5);
        assert_eq!(solve_bruteforce(&inst).unwrap().status, SolveStatus::Infeasible);
        let bc = solve_branch_and_cut(&inst, &SolverConfig::default()).unwrap();
        assert_eq!(bc.status, SolveStatus::Infeasible);
        let nc = solve_branch_and_cut(&inst, &SolverConfig { cuts: false, ..Default::default() }).unwrap();
        assert_eq!(nc.status, SolveStatus::Infeasible);
    }

    #[test]
    fn nogood_shapes() {
        let inst = parallel_pair(1.0);
        let cut = nogood(&inst, &[1.0, 0.0]);
        assert_eq!(cut.coefficients, vec![0.0, 1.0]);
        assert_eq!(cut.rhs, 1.0);

        let g = MultiGraph::from_pairs(3, &[(0, 1), (1, 2)]).unwrap();
        let net = Network::new(g, vec![1.0; 2], 2.0).unwrap();
        let kinds = vec![crate::model::NodeKind::Entry, crate::model::NodeKind::Exit, crate::model::NodeKind::Exit];
        let multi = Instance::new(net, kinds, vec![2.0, -1.0, -1.0], 5.0, vec![1.0; 2]).unwrap();
        let cut = nogood(&multi, &[1.0, 0.0]);
        assert_eq!(cut.coefficients, vec![-1.0, 1.0]);
        assert_eq!(cut.rhs, 0.0);
        assert!(cut.slack(&[1.0, 0.0]) < 0.0);
        assert!(cut.slack(&[1.0, 1.0]) >= 0.0);
        assert!(cut.slack(&[0.0, 0.0]) >= 0.0);
    }

    #[test]
    fn brute_force_guard() {
        let pairs: Vec<(usize, usize)> = (0..21).map(|_| (0, 1)).collect();
        let g = MultiGraph::from_pairs(2, &pairs).unwrap();
        let net = Network::new(g, vec![1.0; 21], 2.0).unwrap();
        let inst = Instance::single_pair(net, 0, 1, 1.0, 1.0, vec![1.0; 21]).unwrap();
        assert!(matches!(solve_bruteforce(&inst), Err(SolveError::TooLarge(21))));
    }

    #[test]
    fn config_is_checked() {
        let inst = parallel_pair(1.0);
        let bad = SolverConfig {
            node_limit: Some(0),
            ..Default::default()
        };
        assert!(matches!(solve_branch_and_cut(&inst, &bad), Err(SolveError::Config(_))));
    }

    #[test]
    fn log_lines_render() {
        let inst = parallel_pair(1.0);
        let out = solve_branch_and_cut(&inst, &SolverConfig::default()).unwrap();
        assert!(!out.log.is_empty());
        assert_eq!(out.log[0].to_string(), "node 0 depth 0 lp 0.000000 pool 1 cuts 1");
    }
}
