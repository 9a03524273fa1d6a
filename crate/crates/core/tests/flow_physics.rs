mod common;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{random_balance, random_network, DEGREES};
use potnet::flow::{check_feasibility, effective_resistance, induced_network, solve_transshipment};
use potnet::model::{Arc, Instance, MultiGraph, Network};

fn spread(p: &[f64]) -> f64 {
    p.iter().cloned().fold(f64::MIN, f64::max) - p.iter().cloned().fold(f64::MAX, f64::min)
}

fn without_arc(net: &Network, a: usize) -> Network {
    let keep: Vec<usize> = (0..net.num_arcs()).filter(|&e| e != a).collect();
    let arcs = keep.iter().map(|&e| net.graph().arc(e)).collect();
    let beta = keep.iter().map(|&e| net.beta()[e]).collect();
    Network::new(MultiGraph::new(net.num_nodes(), arcs).unwrap(), beta, net.degree()).unwrap()
}

fn with_beta(net: &Network, a: usize, beta_a: f64) -> Network {
    let mut beta = net.beta().to_vec();
    beta[a] = beta_a;
    Network::new(net.graph().clone(), beta, net.degree()).unwrap()
}

/// Merges node `v` into node `u`, dropping arcs that become loops.
fn contract(net: &Network, u: usize, v: usize) -> (Network, Vec<usize>) {
    let n = net.num_nodes();
    let map: Vec<usize> = (0..n)
        .map(|w| {
            let w = if w == v { u } else { w };
            if w > v {
                w - 1
            } else {
                w
            }
        })
        .collect();
    let mut arcs = Vec::new();
    let mut beta = Vec::new();
    for (a, arc) in net.graph().arcs().iter().enumerate() {
        let (t, h) = (map[arc.tail], map[arc.head]);
        if t != h {
            arcs.push(Arc::new(t, h));
            beta.push(net.beta()[a]);
        }
    }
    (Network::new(MultiGraph::new(n - 1, arcs).unwrap(), beta, net.degree()).unwrap(), map)
}

/// Potentials of the linear law (`r = 1`) from the grounded Laplacian.
fn laplacian_potentials(net: &Network, b: &[f64]) -> Vec<f64> {
    let n = net.num_nodes();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for (a, arc) in net.graph().arcs().iter().enumerate() {
        let c = 1.0 / net.beta()[a];
        l[(arc.tail, arc.tail)] += c;
        l[(arc.head, arc.head)] += c;
        l[(arc.tail, arc.head)] -= c;
        l[(arc.head, arc.tail)] -= c;
    }
    let reduced = l.view((1, 1), (n - 1, n - 1)).into_owned();
    let rhs = DVector::from_iterator(n - 1, b[1..].iter().copied());
    let p = reduced.lu().solve(&rhs).unwrap();
    std::iter::once(0.0).chain(p.iter().copied()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn linear_law_matches_laplacian_solve(seed in any::<u64>(), n in 2usize..9, extra in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = random_network(&mut rng, n, extra, 1.0);
        let b = random_balance(&mut rng, n);
        let state = solve_transshipment(&net, &b).unwrap();
        let oracle = laplacian_potentials(&net, &b);
        let scale = spread(&oracle).max(1e-12);
        for v in 0..n {
            let got = state.potential[v] - state.potential[0];
            prop_assert!((got - oracle[v]).abs() <= 1e-8 * scale, "node {v}: {got} vs {}", oracle[v]);
        }
    }

    #[test]
    fn solution_satisfies_law_and_conservation(seed in any::<u64>(), n in 2usize..10, extra in 0usize..8, d in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = random_network(&mut rng, n, extra, DEGREES[d]);
        let b = random_balance(&mut rng, n);
        let state = solve_transshipment(&net, &b).unwrap();
        prop_assert!(state.conservation_residual(net.graph(), &b) <= 1e-9 * 2.0f64.max(b.iter().map(|x| x.abs()).fold(0.0, f64::max)));
        let scale = spread(&state.potential).max(1e-12);
        prop_assert!(state.law_residual(&net) <= 1e-7 * scale);
    }

    #[test]
    fn scaling_and_shift_invariance(seed in any::<u64>(), n in 2usize..9, extra in 0usize..6, d in 0usize..3, lambda in 0.05f64..20.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let degree = DEGREES[d];
        let net = random_network(&mut rng, n, extra, degree);
        let b = random_balance(&mut rng, n);
        let base = solve_transshipment(&net, &b).unwrap();
        let scaled_b: Vec<f64> = b.iter().map(|x| lambda * x).collect();
        let scaled = solve_transshipment(&net, &scaled_b).unwrap();
        let factor = lambda.powf(degree);
        let s0 = spread(&base.potential);
        for v in 0..n {
            let want = factor * (base.potential[v] - base.potential[0]);
            let got = scaled.potential[v] - scaled.potential[0];
            prop_assert!((got - want).abs() <= 1e-7 * factor * s0);
        }
        let fmax = base.flow.iter().fold(0.0f64, |m, f| m.max(f.abs()));
        for (f, g) in base.flow.iter().zip(&scaled.flow) {
            prop_assert!((g - lambda * f).abs() <= 1e-7 * lambda * fmax.max(1e-12));
        }
        let mut shifted = base.clone();
        for p in &mut shifted.potential {
            *p += 123.25;
        }
        prop_assert!((shifted.law_residual(&net) - base.law_residual(&net)).abs() <= 1e-9 * s0.max(1.0) * 1e3);
    }

    #[test]
    fn st_flow_has_extremal_terminal_potentials(seed in any::<u64>(), n in 2usize..10, extra in 0usize..8, d in 0usize..3, demand in 0.1f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let degree = DEGREES[d];
        let net = random_network(&mut rng, n, extra, degree);
        let s = rng.gen_range(0..n);
        let t = (s + rng.gen_range(1..n)) % n;
        let mut b = vec![0.0; n];
        b[s] = demand;
        b[t] = -demand;
        let state = solve_transshipment(&net, &b).unwrap();
        let p = &state.potential;
        let drop = p[s] - p[t];
        let tol = 1e-9 * drop;
        prop_assert!(p.iter().all(|&v| v <= p[s] + tol && v >= p[t] - tol));
        let r = effective_resistance(&net, s, t).unwrap();
        prop_assert!((drop - demand.powf(degree) * r).abs() <= 1e-7 * drop);
    }

    #[test]
    fn resistance_is_monotone(seed in any::<u64>(), n in 3usize..9, extra in 0usize..6, d in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = random_network(&mut rng, n, extra, DEGREES[d]);
        let (s, t) = (0, n - 1);
        let r = effective_resistance(&net, s, t).unwrap();
        let tol = 1e-9 * r;
        for a in 0..net.num_arcs() {
            prop_assert!(effective_resistance(&without_arc(&net, a), s, t).unwrap() >= r - tol);
            let beta = net.beta()[a];
            prop_assert!(effective_resistance(&with_beta(&net, a, beta * 2.5), s, t).unwrap() >= r - tol);
            prop_assert!(effective_resistance(&with_beta(&net, a, beta * 0.4), s, t).unwrap() <= r + tol);
        }
        // Contract an inner node into its neighbour.
        let arc = net.graph().arc(rng.gen_range(0..net.num_arcs()));
        if ![arc.tail, arc.head].contains(&s) || ![arc.tail, arc.head].contains(&t) {
            let (keep, gone) = if arc.head == s || arc.head == t { (arc.head, arc.tail) } else { (arc.tail, arc.head) };
            let (smaller, map) = contract(&net, keep, gone);
            if map[s] != map[t] {
                prop_assert!(effective_resistance(&smaller, map[s], map[t]).unwrap() <= r + tol);
            }
        }
    }

    #[test]
    fn parallel_bundle_reduces_to_single_arc(seed in any::<u64>(), d in 0usize..3, width in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let degree = DEGREES[d];
        let n = 5;
        let base = random_network(&mut rng, n, 3, degree);
        // Attach a bundle of `width` parallel arcs between nodes 0 and 1 and
        // compare with one arc whose conductance is the bundle's sum.
        let mut arcs = base.graph().arcs().to_vec();
        let mut beta = base.beta().to_vec();
        let mut mu_total = 0.0;
        for _ in 0..width {
            let mu: f64 = rng.gen_range(0.2..3.0);
            mu_total += mu;
            arcs.push(Arc::new(0, 1));
            beta.push(mu.powf(-degree));
        }
        let bundled = Network::new(MultiGraph::new(n, arcs.clone()).unwrap(), beta.clone(), degree).unwrap();
        arcs.truncate(base.num_arcs());
        beta.truncate(base.num_arcs());
        arcs.push(Arc::new(0, 1));
        beta.push(mu_total.powf(-degree));
        let reduced = Network::new(MultiGraph::new(n, arcs).unwrap(), beta, degree).unwrap();
        let b = random_balance(&mut rng, n);
        let p1 = solve_transshipment(&bundled, &b).unwrap().potential;
        let p2 = solve_transshipment(&reduced, &b).unwrap().potential;
        let scale = spread(&p1).max(1e-12);
        for v in 0..n {
            prop_assert!(((p1[v] - p1[0]) - (p2[v] - p2[0])).abs() <= 1e-7 * scale);
        }
    }
}

#[test]
fn induced_network_scales_resistance() {
    let g = MultiGraph::from_pairs(2, &[(0, 1), (0, 1)]).unwrap();
    let net = Network::new(g, vec![1.0, 2.0], 2.0).unwrap();
    let induced = induced_network(&net, &[0.25, 0.0]).unwrap();
    assert_eq!(induced.network.num_arcs(), 1);
    assert_eq!(induced.original_arc, vec![0]);
    assert_eq!(induced.network.beta(), &[4.0]);
    assert!((induced.network.conductance(0) - 0.5).abs() < 1e-15);
}

#[test]
fn three_two_throughput_threshold() {
    let g = MultiGraph::from_pairs(3, &[(0, 1), (0, 1), (0, 1), (1, 2), (1, 2)]).unwrap();
    let net = Network::new(g, vec![1.0; 5], 2.0).unwrap();
    let at = |d: f64| {
        let inst = Instance::single_pair(net.clone(), 0, 2, d, 1.0, vec![1.0; 5]).unwrap();
        check_feasibility(&inst, &[1.0; 5]).unwrap().feasible
    };
    assert!(at(1.6));
    assert!(at(6.0 / 13f64.sqrt() - 1e-6));
    assert!(!at(6.0 / 13f64.sqrt() + 1e-6));
    assert!(!at(1.7));
}

#[test]
fn disconnected_design_with_demand_is_infeasible() {
    let g = MultiGraph::from_pairs(2, &[(0, 1)]).unwrap();
    let net = Network::new(g, vec![1.0], 2.0).unwrap();
    let inst = Instance::single_pair(net, 0, 1, 1.0, 1.0, vec![1.0]).unwrap();
    let report = check_feasibility(&inst, &[0.0]).unwrap();
    assert!(!report.feasible);
    assert!(report.reason.unwrap().to_string().contains("isolated terminal with nonzero balance"));
}
