//! Seeded instance generators.
//!
//! Multi-path instances are a chain of nodes `v0 … vS` where each segment
//! offers several parallel pipe options. Option `j` has diameter `D_j`, and a
//! segment of length `L` gets resistance `β = L / D^5` and cost
//! `L · (α₀ + α₁ D²)` scaled by a per-segment jitter factor. Random instances
//! are a spanning tree plus extra arcs with random terminals.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::flow::{check_feasibility, FlowError};
use crate::model::{ArcMeta, Instance, ModelError, MultiGraph, Network, NodeKind};

/// Constant cost per unit length.
pub const ALPHA0: f64 = 1.0;
/// Cost per unit length and squared diameter.
pub const ALPHA1: f64 = 2.0;
/// Relative slack added to the tight potential bound of [`PiBarRule::UniformMixThreshold`].
pub const THRESHOLD_SLACK: f64 = 1e-7;

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("invalid generator spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Flow(#[from] FlowError),
}

/// How the global potential bound of a multi-path instance is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PiBarRule {
    Value(f64),
    /// `d^r · Σ_segments β_widest · (1 + slack)`: building the widest option
    /// everywhere is just feasible.
    UniformMixThreshold { slack: f64 },
    /// `factor` times the spread with every option built.
    FullNetworkSpread { factor: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultipathSpec {
    pub segments: usize,
    pub options: usize,
    pub demand: f64,
    pub degree: f64,
    pub pi_bar: PiBarRule,
    pub segment_length: f64,
    /// Per-segment cost factors are drawn from `[1 − jitter, 1 + jitter]`.
    pub cost_jitter: f64,
    pub seed: u64,
}

impl Default for MultipathSpec {
    fn default() -> Self {
        Self {
            segments: 8,
            options: 3,
            demand: 1.0,
            degree: 2.0,
            pi_bar: PiBarRule::UniformMixThreshold {
                slack: THRESHOLD_SLACK,
            },
            segment_length: 1.0,
            cost_jitter: 0.1,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomSpec {
    pub nodes: usize,
    pub arcs: usize,
    pub entries: usize,
    pub exits: usize,
    pub degree: f64,
    pub beta_range: (f64, f64),
    pub cost_range: (f64, f64),
    /// `π̄` is this factor times the spread with every arc built.
    pub pi_bar_factor: f64,
    pub seed: u64,
}

impl Default for RandomSpec {
    fn default() -> Self {
        Self {
            nodes: 6,
            arcs: 9,
            entries: 1,
            exits: 2,
            degree: 2.0,
            beta_range: (0.5, 2.0),
            cost_range: (1.0, 10.0),
            pi_bar_factor: 1.5,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    Multipath(MultipathSpec),
    Random(RandomSpec),
}

pub fn generate(spec: &GeneratorSpec) -> Result<Instance, GenerateError> {
    match spec {
        GeneratorSpec::Multipath(s) => generate_multipath(s),
        GeneratorSpec::Random(s) => generate_random(s),
    }
}

/// Diameters of the options, evenly spaced in `[0.4, 0.8]`.
pub fn option_diameters(options: usize) -> Vec<f64> {
    if options == 1 {
        return vec![0.4];
    }
    (0..options)
        .map(|j| 0.4 + 0.4 * j as f64 / (options - 1) as f64)
        .collect()
}

fn positive(value: f64, what: &str) -> Result<(), GenerateError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(GenerateError::Spec(format!("{what} must be positive, got {value}")))
    }
}

pub fn generate_multipath(spec: &MultipathSpec) -> Result<Instance, GenerateError> {
    if spec.segments == 0 || spec.options == 0 {
        return Err(GenerateError::Spec("segments and options must be at least 1".into()));
    }
    positive(spec.demand, "demand")?;
    positive(spec.degree, "degree")?;
    positive(spec.segment_length, "segment length")?;
    if !(0.0..1.0).contains(&spec.cost_jitter) {
        return Err(GenerateError::Spec("cost jitter must lie in [0, 1)".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let diameters = option_diameters(spec.options);
    let length = spec.segment_length;
    let mut pairs = Vec::new();
    let mut beta = Vec::new();
    let mut cost = Vec::new();
    let mut arc_names = Vec::new();
    let mut meta = Vec::new();
    for seg in 0..spec.segments {
        let factor = 1.0 + spec.cost_jitter * (2.0 * rng.gen::<f64>() - 1.0);
        for (j, &d) in diameters.iter().enumerate() {
            pairs.push((seg, seg + 1));
            beta.push(length / d.powi(5));
            cost.push(factor * length * (ALPHA0 + ALPHA1 * d * d));
            arc_names.push(format!("s{seg}o{j}"));
            meta.push(ArcMeta {
                diameter: Some(d),
                length: Some(length),
            });
        }
    }
    let n = spec.segments + 1;
    let graph = MultiGraph::from_pairs(n, &pairs)?;
    let network = Network::new(graph, beta.clone(), spec.degree)?;
    let mut inst = Instance::single_pair(network, 0, spec.segments, spec.demand, 1.0, cost)?;
    inst.labels.arcs = arc_names;
    inst.labels.arc_meta = meta;
    inst.pi_bar = match spec.pi_bar {
        PiBarRule::Value(v) => {
            positive(v, "pi_bar")?;
            v
        }
        PiBarRule::UniformMixThreshold { slack } => {
            let widest = beta[spec.options - 1];
            spec.demand.powf(spec.degree) * widest * spec.segments as f64 * (1.0 + slack)
        }
        PiBarRule::FullNetworkSpread { factor } => {
            positive(factor, "spread factor")?;
            factor * full_spread(&inst)?
        }
    };
    Ok(inst)
}

fn full_spread(inst: &Instance) -> Result<f64, GenerateError> {
    let report = check_feasibility(inst, &vec![1.0; inst.num_arcs()])?;
    Ok(report.max_spread())
}

pub fn generate_random(spec: &RandomSpec) -> Result<Instance, GenerateError> {
    if spec.nodes < 2 {
        return Err(GenerateError::Spec("need at least two nodes".into()));
    }
    if spec.arcs + 1 < spec.nodes {
        return Err(GenerateError::Spec("too few arcs for a spanning tree".into()));
    }
    if spec.entries == 0 || spec.exits == 0 || spec.entries + spec.exits > spec.nodes {
        return Err(GenerateError::Spec("invalid terminal counts".into()));
    }
    positive(spec.degree, "degree")?;
    positive(spec.pi_bar_factor, "spread factor")?;
    let (blo, bhi) = spec.beta_range;
    let (clo, chi) = spec.cost_range;
    if !(blo > 0.0 && blo <= bhi && clo >= 0.0 && clo <= chi) {
        return Err(GenerateError::Spec("invalid beta or cost range".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.nodes;
    let mut pairs = Vec::with_capacity(spec.arcs);
    for v in 1..n {
        pairs.push((rng.gen_range(0..v), v));
    }
    while pairs.len() < spec.arcs {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            pairs.push((u, v));
        }
    }
    let beta: Vec<f64> = pairs.iter().map(|_| rng.gen_range(blo..=bhi)).collect();
    let cost: Vec<f64> = pairs.iter().map(|_| rng.gen_range(clo..=chi)).collect();

    let mut nodes: Vec<usize> = (0..n).collect();
    nodes.shuffle(&mut rng);
    let mut kinds = vec![NodeKind::Inner; n];
    let mut balance = vec![0.0; n];
    let supply: Vec<f64> = (0..spec.entries).map(|_| rng.gen_range(0.5..=1.5)).collect();
    let share: Vec<f64> = (0..spec.exits).map(|_| rng.gen_range(0.5..=1.5)).collect();
    let total: f64 = supply.iter().sum();
    let share_total: f64 = share.iter().sum();
    for (i, &v) in nodes[..spec.entries].iter().enumerate() {
        kinds[v] = NodeKind::Entry;
        balance[v] = supply[i];
    }
    for (i, &v) in nodes[spec.entries..spec.entries + spec.exits].iter().enumerate() {
        kinds[v] = NodeKind::Exit;
        balance[v] = -total * share[i] / share_total;
    }
    // Make the balance sum to zero exactly.
    let last = nodes[spec.entries + spec.exits - 1];
    let residual: f64 = balance.iter().sum();
    balance[last] -= residual;

    let graph = MultiGraph::from_pairs(n, &pairs)?;
    let network = Network::new(graph, beta, spec.degree)?;
    let mut inst = Instance::new(network, kinds, balance, 1.0, cost)?;
    inst.pi_bar = spec.pi_bar_factor * full_spread(&inst)?;
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_instance;

    #[test]
    fn multipath_counts() {
        let inst = generate_multipath(&MultipathSpec::default()).unwrap();
        assert_eq!(inst.num_nodes(), 9);
        assert_eq!(inst.num_arcs(), 24);
        assert!(validate_instance(&inst).is_ok());
        let single = generate_multipath(&MultipathSpec {
            segments: 1,
            options: 1,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(single.num_arcs(), 1);
        assert_eq!(single.num_nodes(), 2);
    }

    #[test]
    fn multipath_is_deterministic() {
        let spec = MultipathSpec {
            seed: 7,
            ..Default::default()
        };
        assert_eq!(generate_multipath(&spec).unwrap(), generate_multipath(&spec).unwrap());
        let other = MultipathSpec { seed: 8, ..spec.clone() };
        assert_ne!(generate_multipath(&spec).unwrap().cost, generate_multipath(&other).unwrap().cost);
    }

    #[test]
    fn threshold_rule_makes_widest_mix_just_feasible() {
        let inst = generate_multipath(&MultipathSpec::default()).unwrap();
        let widest: Vec<f64> = (0..24).map(|a| if a % 3 == 2 { 1.0 } else { 0.0 }).collect();
        let report = check_feasibility(&inst, &widest).unwrap();
        assert!(report.feasible);
        assert!(report.max_spread() > inst.pi_bar * (1.0 - 1e-6));
        // Swapping one segment to the middle option breaks it.
        let mut weaker = widest.clone();
        weaker[2] = 0.0;
        weaker[1] = 1.0;
        assert!(!check_feasibility(&inst, &weaker).unwrap().feasible);
    }

    #[test]
    fn diameters_and_costs() {
        assert_eq!(option_diameters(3), vec![0.4, 0.6000000000000001, 0.8]);
        let inst = generate_multipath(&MultipathSpec {
            cost_jitter: 0.0,
            ..Default::default()
        })
        .unwrap();
        approx::assert_relative_eq!(inst.network.beta()[0], 1.0 / 0.4f64.powi(5), max_relative = 1e-12);
        approx::assert_relative_eq!(inst.cost[2], 1.0 + 2.0 * 0.64);
    }

    #[test]
    fn random_instances_are_valid() {
        for seed in 0..20 {
            let inst = generate_random(&RandomSpec {
                seed,
                ..Default::default()
            })
            .unwrap();
            assert!(validate_instance(&inst).is_ok(), "{}", validate_instance(&inst));
            assert_eq!(inst.num_arcs(), 9);
            assert_eq!(inst.entries().len(), 1);
            assert_eq!(inst.exits().len(), 2);
            assert!(check_feasibility(&inst, &[1.0; 9]).unwrap().feasible);
        }
    }

    #[test]
    fn bad_specs_are_rejected() {
        assert!(generate_multipath(&MultipathSpec {
            segments: 0,
            ..Default::default()
        })
        .is_err());
        assert!(generate_random(&RandomSpec {
            arcs: 2,
            ..Default::default()
        })
        .is_err());
    }
}
