//! Random networks and instances shared by the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use potnet::generate::{generate_random, RandomSpec};
use potnet::model::{Arc, Instance, MultiGraph, Network, NodeKind};

/// Connected multigraph: a random spanning tree plus `extra` arcs, with
/// random orientations and possibly parallel arcs.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, extra: usize) -> MultiGraph {
    let mut arcs = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        arcs.push(if rng.gen_bool(0.5) { Arc::new(u, v) } else { Arc::new(v, u) });
    }
    for _ in 0..extra {
        let u = rng.gen_range(0..n);
        let mut v = rng.gen_range(0..n - 1);
        if v >= u {
            v += 1;
        }
        arcs.push(Arc::new(u, v));
    }
    arcs.shuffle(rng);
    MultiGraph::new(n, arcs).unwrap()
}

pub const DEGREES: [f64; 3] = [1.0, 1.852, 2.0];

/// Random connected network with resistances in `[0.2, 5]`.
pub fn random_network(rng: &mut ChaCha8Rng, n: usize, extra: usize, degree: f64) -> Network {
    let g = random_graph(rng, n, extra);
    let beta = (0..g.num_arcs()).map(|_| rng.gen_range(0.2..5.0)).collect();
    Network::new(g, beta, degree).unwrap()
}

/// Balanced `b` on a random set of terminals; at least one entry and exit.
pub fn random_balance(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut nodes: Vec<usize> = (0..n).collect();
    nodes.shuffle(rng);
    let terminals = rng.gen_range(2..=n.min(5));
    let entries = rng.gen_range(1..terminals);
    let mut b = vec![0.0; n];
    let mut total = 0.0;
    for &v in &nodes[..entries] {
        b[v] = rng.gen_range(0.2..2.0);
        total += b[v];
    }
    let exits = &nodes[entries..terminals];
    let shares: Vec<f64> = exits.iter().map(|_| rng.gen_range(0.2..1.0)).collect();
    let sum: f64 = shares.iter().sum();
    let mut left = total;
    for (i, &v) in exits.iter().enumerate() {
        b[v] = if i + 1 == exits.len() { -left } else { -total * shares[i] / sum };
        left += b[v];
    }
    b
}

/// Instance family of the validity and separation sweeps: at most 8 nodes,
/// 12 arcs and 4 terminals, degree 1 or 2.
pub fn small_instance(rng: &mut ChaCha8Rng) -> Instance {
    let nodes = rng.gen_range(4..=8);
    let arcs = rng.gen_range(nodes - 1..=12).max(nodes);
    let entries = rng.gen_range(1..=2);
    let exits = rng.gen_range(1..=2);
    generate_random(&RandomSpec {
        nodes,
        arcs,
        entries,
        exits,
        degree: if rng.gen_bool(0.5) { 1.0 } else { 2.0 },
        pi_bar_factor: rng.gen_range(1.1..3.0),
        seed: rng.gen(),
        ..RandomSpec::default()
    })
    .unwrap()
}

/// Instance family of the solver comparison: at most 14 arcs, mixed degrees,
/// some instances infeasible even with every arc built.
pub fn guarded_instance(rng: &mut ChaCha8Rng) -> Instance {
    let nodes = rng.gen_range(4..=8);
    let arcs = rng.gen_range(nodes..=14);
    let factor = if rng.gen_bool(0.1) { rng.gen_range(0.5..0.95) } else { rng.gen_range(1.05..2.5) };
    generate_random(&RandomSpec {
        nodes,
        arcs,
        entries: rng.gen_range(1..=2),
        exits: rng.gen_range(1..=2),
        degree: *DEGREES.choose(rng).unwrap(),
        pi_bar_factor: factor,
        seed: rng.gen(),
        ..RandomSpec::default()
    })
    .unwrap()
}

/// Random point of `[0,1]^m` with some coordinates pinned to 0 or 1.
pub fn random_fractional(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    (0..m)
        .map(|_| match rng.gen_range(0..6) {
            0 => 0.0,
            1 => 1.0,
            _ => rng.gen_range(0.0..1.0),
        })
        .collect()
}

/// Random subset of `items`.
pub fn random_subset(rng: &mut ChaCha8Rng, items: &[usize]) -> Vec<usize> {
    items.iter().copied().filter(|_| rng.gen_bool(0.5)).collect()
}

/// Entries and exits of a node-kind vector with balance `b`.
pub fn kinds_of(b: &[f64]) -> Vec<NodeKind> {
    b.iter()
        .map(|&x| {
            if x > 0.0 {
                NodeKind::Entry
            } else if x < 0.0 {
                NodeKind::Exit
            } else {
                NodeKind::Inner
            }
        })
        .collect()
}
