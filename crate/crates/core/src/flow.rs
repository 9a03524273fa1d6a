//! Potential-based transshipments.
//!
//! Arc flows obey `π_u − π_v = β_a sign(f_a) |f_a|^r`. For a balance vector `b`
//! the potentials are found by damped Newton on the strictly convex energy
//!
//! ```text
//! E(π) = Σ_a β_a^(-1/r) |π_u − π_v|^(1+1/r) / (1+1/r) − Σ_v b_v π_v
//! ```
//!
//! whose gradient is the node-balance residual. Each weakly connected
//! component is solved separately with one node pinned, then shifted so that
//! its smallest potential is zero.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::model::{Instance, MultiGraph, Network, BALANCE_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("balance of component {component} sums to {sum}, not 0")]
    Unbalanced { component: usize, sum: f64 },
    #[error("expected {expected} entries, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("source and sink must differ")]
    SameTerminal,
    #[error("unknown node {0}")]
    UnknownNode(usize),
    #[error("build value {value} on arc {arc} is outside [0, 1]")]
    BuildValueOutOfRange { arc: usize, value: f64 },
    #[error("multi-path needs at least one segment")]
    EmptyMultipath,
    #[error("segment conductances and the degree must be positive")]
    NonPositiveSegment,
}

/// Solver tolerances.
#[derive(Debug, Clone, Copy)]
pub struct FlowOptions {
    /// Bound on the max node-balance residual, relative to `max(1, |b|_∞)`.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Half-width of the zone around a zero potential drop where the law is
    /// linearized, relative to the potential scale. Flows there are off by at
    /// most `μ · width^(1/r)`, which is below what rounding in the potentials
    /// can resolve anyway.
    pub regularization: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-9,
            max_iterations: 200,
            regularization: 1e-15,
        }
    }
}

/// Arc flows and node potentials of one solved transshipment.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub flow: Vec<f64>,
    pub potential: Vec<f64>,
    /// Max absolute node-balance residual.
    pub residual: f64,
    pub iterations: usize,
}

impl FlowState {
    /// `max_v |π_u − π_v − β_a sign(f_a)|f_a|^r|` over all arcs.
    pub fn law_residual(&self, net: &Network) -> f64 {
        let r = net.degree();
        net.graph()
            .arcs()
            .iter()
            .enumerate()
            .map(|(a, arc)| {
                let f = self.flow[a];
                let lhs = self.potential[arc.tail] - self.potential[arc.head];
                (lhs - net.beta()[a] * f.signum() * f.abs().powf(r)).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Node-balance residual of the stored flows against `balance`.
    pub fn conservation_residual(&self, graph: &MultiGraph, balance: &[f64]) -> f64 {
        let mut net = balance.iter().map(|b| -b).collect::<Vec<_>>();
        for (a, arc) in graph.arcs().iter().enumerate() {
            net[arc.tail] += self.flow[a];
            net[arc.head] -= self.flow[a];
        }
        net.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

#[inline]
fn arc_flow(delta: f64, inv_beta_root: f64, inv_r: f64) -> f64 {
    delta.signum() * inv_beta_root * delta.abs().powf(inv_r)
}

/// Newton solve of a single connected component given by local data.
struct ComponentProblem<'a> {
    n: usize,
    arcs: Vec<(usize, usize, f64)>,
    balance: Vec<f64>,
    inv_r: f64,
    opts: &'a FlowOptions,
    /// Absolute half-width of the linearized zone; set once potentials have a scale.
    kink: f64,
}

impl ComponentProblem<'_> {
    /// Flow with the law replaced by its secant inside the linearized zone.
    fn smooth_flow(&self, delta: f64, k: f64) -> f64 {
        if delta.abs() < self.kink {
            k * delta * self.kink.powf(self.inv_r - 1.0)
        } else {
            arc_flow(delta, k, self.inv_r)
        }
    }

    /// Derivative of [`Self::smooth_flow`].
    fn smooth_slope(&self, delta: f64, k: f64) -> f64 {
        if delta.abs() < self.kink {
            k * self.kink.powf(self.inv_r - 1.0)
        } else {
            self.inv_r * k * delta.abs().powf(self.inv_r - 1.0)
        }
    }

    fn residual(&self, pi: &[f64]) -> Vec<f64> {
        let mut res: Vec<f64> = self.balance.iter().map(|b| -b).collect();
        for &(u, v, k) in &self.arcs {
            let f = self.smooth_flow(pi[u] - pi[v], k);
            res[u] += f;
            res[v] -= f;
        }
        res
    }

    /// Convex potential whose gradient is the residual.
    fn energy(&self, pi: &[f64]) -> f64 {
        let p = 1.0 + self.inv_r;
        let w = self.kink;
        let mut e = 0.0;
        for &(u, v, k) in &self.arcs {
            let d = (pi[u] - pi[v]).abs();
            e += if d < w {
                k * w.powf(self.inv_r - 1.0) * d * d / 2.0
            } else {
                k * d.powf(p) / p + k * w.powf(p) * (0.5 - 1.0 / p)
            };
        }
        for (b, x) in self.balance.iter().zip(pi) {
            e -= b * x;
        }
        e
    }

    /// Reduced Hessian with node 0 pinned.
    fn hessian(&self, pi: &[f64]) -> DMatrix<f64> {
        let m = self.n - 1;
        let mut h = DMatrix::zeros(m, m);
        for &(u, v, k) in &self.arcs {
            let g = self.smooth_slope(pi[u] - pi[v], k);
            let (iu, iv) = (u.checked_sub(1), v.checked_sub(1));
            if let Some(i) = iu {
                h[(i, i)] += g;
            }
            if let Some(j) = iv {
                h[(j, j)] += g;
            }
            if let (Some(i), Some(j)) = (iu, iv) {
                h[(i, j)] -= g;
                h[(j, i)] -= g;
            }
        }
        h
    }

    fn newton_direction(&self, pi: &[f64], res: &[f64]) -> Option<Vec<f64>> {
        let m = self.n - 1;
        let mut h = self.hessian(pi);
        let rhs = DVector::from_iterator(m, res[1..].iter().map(|r| -r));
        let scale = (0..m).map(|i| h[(i, i)]).fold(0.0, f64::max).max(1e-300);
        let mut shift = 0.0;
        for _ in 0..12 {
            if let Some(ch) = h.clone().cholesky() {
                let d = ch.solve(&rhs);
                let mut dir = vec![0.0; self.n];
                dir[1..].copy_from_slice(d.as_slice());
                if dir.iter().all(|x| x.is_finite()) {
                    return Some(dir);
                }
            }
            let next = if shift == 0.0 { 1e-14 * scale } else { shift * 100.0 };
            for i in 0..m {
                h[(i, i)] += next - shift;
            }
            shift = next;
        }
        None
    }

    /// Residual that rounding in the potentials alone can cause: an arc with
    /// a drop near zero turns a potential error `ε` into a flow error
    /// `k ε^(1/r)`, which exceeds the tolerance for `r > 1`.
    fn attainable_residual(&self, pi: &[f64]) -> f64 {
        let scale = pi.iter().fold(1.0f64, |m, p| m.max(p.abs()));
        let kmax = self.arcs.iter().fold(0.0f64, |m, a| m.max(a.2));
        16.0 * kmax * (f64::EPSILON * scale).powf(self.inv_r)
    }

    fn initial_potentials(&self) -> Vec<f64> {
        // Linear (r = 1) solve with conductance weights as a starting point.
        let m = self.n - 1;
        let mut h = DMatrix::zeros(m, m);
        for &(u, v, k) in &self.arcs {
            let (iu, iv) = (u.checked_sub(1), v.checked_sub(1));
            if let Some(i) = iu {
                h[(i, i)] += k;
            }
            if let Some(j) = iv {
                h[(j, j)] += k;
            }
            if let (Some(i), Some(j)) = (iu, iv) {
                h[(i, j)] -= k;
                h[(j, i)] -= k;
            }
        }
        let rhs = DVector::from_iterator(m, self.balance[1..].iter().copied());
        let mut pi = vec![0.0; self.n];
        if let Some(ch) = h.cholesky() {
            pi[1..].copy_from_slice(ch.solve(&rhs).as_slice());
        }
        pi
    }

    fn solve(&mut self) -> Result<(Vec<f64>, f64, usize), FlowError> {
        let bscale = self.balance.iter().fold(1.0f64, |m, b| m.max(b.abs()));
        let tol = self.opts.tolerance * bscale;
        if self.n == 1 {
            return Ok((vec![0.0], 0.0, 0));
        }
        let mut pi = self.initial_potentials();
        if !pi.iter().all(|x| x.is_finite()) {
            pi = vec![0.0; self.n];
        }
        let scale = pi.iter().fold(1.0f64, |m, p| m.max(p.abs()));
        self.kink = self.opts.regularization * scale;
        let inf_norm = |r: &[f64]| r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut res = self.residual(&pi);
        let mut norm = inf_norm(&res);
        let mut iterations = 0;
        let mut best = norm;
        let mut since_progress = 0;
        while norm > tol {
            let floor = self.attainable_residual(&pi);
            if norm <= floor && since_progress >= 3 {
                break;
            }
            if iterations >= self.opts.max_iterations {
                if norm <= floor {
                    break;
                }
                return Err(FlowError::NoConvergence {
                    iterations,
                    residual: norm,
                });
            }
            iterations += 1;
            let Some(dir) = self.newton_direction(&pi, &res) else {
                if norm <= floor {
                    break;
                }
                return Err(FlowError::NoConvergence {
                    iterations,
                    residual: norm,
                });
            };
            let slope: f64 = dir.iter().zip(&res).map(|(d, r)| d * r).sum();
            let e0 = self.energy(&pi);
            let mut alpha = 1.0;
            let mut accepted = None;
            // Below this the predicted decrease drowns in rounding of the energy
            // and only the residual can judge a step.
            let energy_blind = -slope <= 1e-12 * e0.abs().max(1.0);
            for _ in 0..if energy_blind { 0 } else { 60 } {
                let trial: Vec<f64> = pi.iter().zip(&dir).map(|(p, d)| p + alpha * d).collect();
                let e = self.energy(&trial);
                if e <= e0 + 1e-4 * alpha * slope {
                    // Keep halving while that still lowers the energy; this damps
                    // the sign flips of full steps across a zero drop.
                    let (mut best, mut best_e) = (trial, e);
                    for _ in 0..30 {
                        let half = alpha * 0.5;
                        let t: Vec<f64> = pi.iter().zip(&dir).map(|(p, d)| p + half * d).collect();
                        let te = self.energy(&t);
                        if te >= best_e {
                            break;
                        }
                        alpha = half;
                        best = t;
                        best_e = te;
                    }
                    accepted = Some(best);
                    break;
                }
                alpha *= 0.5;
            }
            if energy_blind {
                accepted = Some(pi.iter().zip(&dir).map(|(p, d)| p + d).collect());
            }
            // Near an arc with zero drop the flow behaves like a square root and
            // full steps flip the drop's sign; halve until the residual shrinks.
            if let Some(t) = &accepted {
                if inf_norm(&self.residual(t)) >= norm {
                    let mut beta = 0.5;
                    for _ in 0..60 {
                        let trial: Vec<f64> = pi.iter().zip(&dir).map(|(p, d)| p + beta * d).collect();
                        if inf_norm(&self.residual(&trial)) < norm {
                            accepted = Some(trial);
                            break;
                        }
                        beta *= 0.5;
                    }
                }
            }
            let next = match accepted {
                Some(t) => t,
                None => {
                    // Energy differences fall below rounding near the optimum.
                    let trial: Vec<f64> = pi.iter().zip(&dir).map(|(p, d)| p + d).collect();
                    if inf_norm(&self.residual(&trial)) < norm {
                        trial
                    } else if norm <= floor {
                        break;
                    } else {
                        return Err(FlowError::NoConvergence {
                            iterations,
                            residual: norm,
                        });
                    }
                }
            };
            pi = next;
            res = self.residual(&pi);
            norm = inf_norm(&res);
            if norm < 0.5 * best {
                best = norm;
                since_progress = 0;
            } else {
                since_progress += 1;
            }
        }
        // A couple of polishing steps while they help.
        for _ in 0..2 {
            if norm == 0.0 {
                break;
            }
            let Some(dir) = self.newton_direction(&pi, &res) else {
                break;
            };
            let trial: Vec<f64> = pi.iter().zip(&dir).map(|(p, d)| p + d).collect();
            let tres = self.residual(&trial);
            let tnorm = inf_norm(&tres);
            if tnorm < norm {
                pi = trial;
                res = tres;
                norm = tnorm;
            } else {
                break;
            }
        }
        Ok((pi, norm, iterations))
    }
}

/// Unique potential-based `b`-transshipment with default tolerances.
pub fn solve_transshipment(net: &Network, balance: &[f64]) -> Result<FlowState, FlowError> {
    solve_transshipment_with(net, balance, &FlowOptions::default())
}

/// Solves every weakly connected component independently. Each component
/// must be balanced; its smallest potential is normalized to zero.
pub fn solve_transshipment_with(
    net: &Network,
    balance: &[f64],
    opts: &FlowOptions,
) -> Result<FlowState, FlowError> {
    let n = net.num_nodes();
    if balance.len() != n {
        return Err(FlowError::Dimension {
            expected: n,
            got: balance.len(),
        });
    }
    let graph = net.graph();
    let comps = graph.components();
    let members = comps.members();
    let inv_r = 1.0 / net.degree();
    let inv_beta_root: Vec<f64> = net.conductances();

    let mut potential = vec![0.0; n];
    let mut flow = vec![0.0; net.num_arcs()];
    let mut residual = 0.0f64;
    let mut iterations = 0;

    let mut local = vec![0usize; n];
    let mut comp_arcs: Vec<Vec<usize>> = vec![Vec::new(); comps.count];
    for (a, arc) in graph.arcs().iter().enumerate() {
        if arc.tail != arc.head {
            comp_arcs[comps.of_node[arc.tail]].push(a);
        }
    }

    for (c, nodes) in members.iter().enumerate() {
        let sum: f64 = nodes.iter().map(|&v| balance[v]).sum();
        let scale: f64 = nodes.iter().map(|&v| balance[v].abs()).sum();
        if sum.abs() > BALANCE_TOL * scale.max(1.0) {
            return Err(FlowError::Unbalanced { component: c, sum });
        }
        for (i, &v) in nodes.iter().enumerate() {
            local[v] = i;
        }
        let mut problem = ComponentProblem {
            n: nodes.len(),
            arcs: comp_arcs[c]
                .iter()
                .map(|&a| {
                    let arc = graph.arc(a);
                    (local[arc.tail], local[arc.head], inv_beta_root[a])
                })
                .collect(),
            balance: nodes.iter().map(|&v| balance[v]).collect(),
            inv_r,
            opts,
            kink: 0.0,
        };
        let (pi, res, it) = problem.solve()?;
        let min = pi.iter().copied().fold(f64::INFINITY, f64::min);
        for (i, &v) in nodes.iter().enumerate() {
            potential[v] = pi[i] - min;
        }
        residual = residual.max(res);
        iterations = iterations.max(it);
    }
    for (a, arc) in graph.arcs().iter().enumerate() {
        flow[a] = arc_flow(
            potential[arc.tail] - potential[arc.head],
            inv_beta_root[a],
            inv_r,
        );
    }
    Ok(FlowState {
        flow,
        potential,
        residual,
        iterations,
    })
}

/// Potential drop of the unit `(s,t)`-flow. Infinite when `s` and `t` lie in
/// different components.
pub fn effective_resistance(net: &Network, s: usize, t: usize) -> Result<f64, FlowError> {
    let n = net.num_nodes();
    for v in [s, t] {
        if v >= n {
            return Err(FlowError::UnknownNode(v));
        }
    }
    if s == t {
        return Err(FlowError::SameTerminal);
    }
    let comps = net.graph().components();
    if comps.of_node[s] != comps.of_node[t] {
        return Ok(f64::INFINITY);
    }
    let mut b = vec![0.0; n];
    b[s] = 1.0;
    b[t] = -1.0;
    let state = solve_transshipment(net, &b)?;
    Ok(state.potential[s] - state.potential[t])
}

/// `U_{s,t} = R_{s,t}^(-1/r)`.
pub fn effective_conductance(net: &Network, s: usize, t: usize) -> Result<f64, FlowError> {
    Ok(effective_resistance(net, s, t)?.powf(-1.0 / net.degree()))
}

/// Closed-form effective conductance of a multi-path whose consecutive
/// segments have total conductances `segments`: `(Σ u_i^(-r))^(-1/r)`.
pub fn multipath_conductance(segments: &[f64], degree: f64) -> Result<f64, FlowError> {
    if segments.is_empty() {
        return Err(FlowError::EmptyMultipath);
    }
    if !(degree > 0.0) || segments.iter().any(|&u| !(u > 0.0)) {
        return Err(FlowError::NonPositiveSegment);
    }
    let total: f64 = segments.iter().map(|u| u.powf(-degree)).sum();
    Ok(total.powf(-1.0 / degree))
}

/// `N^x`: arcs with `x_a = 0` dropped, the rest with resistance `β_a / x_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedNetwork {
    pub network: Network,
    /// Original arc index of every kept arc.
    pub original_arc: Vec<usize>,
}

pub fn induced_network(net: &Network, x: &[f64]) -> Result<InducedNetwork, FlowError> {
    if x.len() != net.num_arcs() {
        return Err(FlowError::Dimension {
            expected: net.num_arcs(),
            got: x.len(),
        });
    }
    let mut arcs = Vec::new();
    let mut beta = Vec::new();
    let mut original_arc = Vec::new();
    for (a, &xa) in x.iter().enumerate() {
        if !(0.0..=1.0).contains(&xa) {
            return Err(FlowError::BuildValueOutOfRange { arc: a, value: xa });
        }
        if xa != 0.0 {
            arcs.push(net.graph().arc(a));
            beta.push(net.beta()[a] / xa);
            original_arc.push(a);
        }
    }
    let graph = MultiGraph::new(net.num_nodes(), arcs).expect("endpoints come from a valid graph");
    let network = Network::new(graph, beta, net.degree()).expect("one resistance per arc");
    Ok(InducedNetwork {
        network,
        original_arc,
    })
}

/// Relative slack allowed when comparing a potential spread with its bound.
pub const SPREAD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Infeasibility {
    IsolatedTerminal { node: usize, balance: f64 },
    UnbalancedComponent { component: usize, sum: f64 },
    SpreadExceeded { component: usize, spread: f64, pi_bar: f64 },
    IndividualBounds { component: usize },
}

impl std::fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Infeasibility::IsolatedTerminal { node, balance } => {
                write!(f, "isolated terminal with nonzero balance (node {node}, b = {balance})")
            }
            Infeasibility::UnbalancedComponent { component, sum } => {
                write!(f, "component {component} has unbalanced demand {sum}")
            }
            Infeasibility::SpreadExceeded {
                component,
                spread,
                pi_bar,
            } => write!(
                f,
                "potential spread {spread} in component {component} exceeds bound {pi_bar}"
            ),
            Infeasibility::IndividualBounds { component } => write!(
                f,
                "no common shift places component {component} within the individual bounds"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentReport {
    pub nodes: Vec<usize>,
    pub balance_sum: f64,
    /// `max π − min π`, or `None` when the component was not solved.
    pub spread: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub components: Vec<ComponentReport>,
    /// Witness potentials and flows on the original arcs (zero on unbuilt arcs).
    pub state: Option<FlowState>,
    pub reason: Option<Infeasibility>,
}

impl FeasibilityReport {
    pub fn max_spread(&self) -> f64 {
        self.components
            .iter()
            .filter_map(|c| c.spread)
            .fold(0.0, f64::max)
    }
}

/// Decides whether `x` admits a potential-based `b`-transshipment in `N^x`
/// with potentials within the global (and, if given, individual) bounds.
pub fn check_feasibility(inst: &Instance, x: &[f64]) -> Result<FeasibilityReport, FlowError> {
    let induced = induced_network(&inst.network, x)?;
    let net = &induced.network;
    let comps = net.graph().components();
    let members = comps.members();
    let mut reports = Vec::with_capacity(comps.count);
    let mut reason = None;
    for (c, nodes) in members.iter().enumerate() {
        let sum: f64 = nodes.iter().map(|&v| inst.balance[v]).sum();
        let scale: f64 = nodes.iter().map(|&v| inst.balance[v].abs()).sum();
        reports.push(ComponentReport {
            nodes: nodes.clone(),
            balance_sum: sum,
            spread: None,
        });
        if reason.is_none() && sum.abs() > BALANCE_TOL * scale.max(1.0) {
            reason = Some(if nodes.len() == 1 {
                Infeasibility::IsolatedTerminal {
                    node: nodes[0],
                    balance: inst.balance[nodes[0]],
                }
            } else {
                Infeasibility::UnbalancedComponent { component: c, sum }
            });
        }
    }
    if let Some(reason) = reason {
        return Ok(FeasibilityReport {
            feasible: false,
            components: reports,
            state: None,
            reason: Some(reason),
        });
    }

    let sub = solve_transshipment(net, &inst.balance)?;
    let mut flow = vec![0.0; inst.num_arcs()];
    for (i, &a) in induced.original_arc.iter().enumerate() {
        flow[a] = sub.flow[i];
    }
    let state = FlowState {
        flow,
        potential: sub.potential,
        residual: sub.residual,
        iterations: sub.iterations,
    };

    let limit = inst.pi_bar * (1.0 + SPREAD_TOL);
    for (c, nodes) in members.iter().enumerate() {
        let (lo, hi) = nodes.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(state.potential[v]), hi.max(state.potential[v]))
        });
        let spread = hi - lo;
        reports[c].spread = Some(spread);
        if reason.is_some() {
            continue;
        }
        if spread > limit {
            reason = Some(Infeasibility::SpreadExceeded {
                component: c,
                spread,
                pi_bar: inst.pi_bar,
            });
        } else if let Some(bounds) = &inst.bounds {
            // Need λ with lower_v ≤ π_v + λ ≤ upper_v on the whole component.
            let (need, room) = nodes.iter().fold(
                (f64::NEG_INFINITY, f64::INFINITY),
                |(need, room), &v| {
                    let p = state.potential[v];
                    (need.max(bounds[v].lower - p), room.min(bounds[v].upper - p))
                },
            );
            if need > room + SPREAD_TOL * inst.pi_bar.max(1.0) {
                reason = Some(Infeasibility::IndividualBounds { component: c });
            }
        }
    }
    Ok(FeasibilityReport {
        feasible: reason.is_none(),
        components: reports,
        state: Some(state),
        reason,
    })
}
