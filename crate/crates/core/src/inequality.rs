//! Disjoint-cut inequalities on the build variables.
//!
//! For a terminal subset `X` and nested node sets `S_1 ⊆ … ⊆ S_k` that are
//! `(X ∩ T⁺, T⁻ ∖ X)`-cuts with pairwise disjoint crossing arcs, every feasible
//! design satisfies
//!
//! ```text
//! 1/(k·k^(1/r)) Σ_i Σ_{a ∈ δ(S_i)} μ_a x_a  ≥  b(X) / π̄^(1/r)
//! ```

use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::{balance_of_subset, Instance, ModelError, MultiGraph, NodeSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InequalityError {
    #[error("cut chain is not a nested family of disjoint cuts for the given terminal set")]
    InvalidChain,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("malformed cut line: {0}")]
    Parse(String),
}

/// Nested node sets `S_1 ⊆ … ⊆ S_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CutChain {
    sets: Vec<NodeSet>,
}

impl CutChain {
    pub fn new(sets: Vec<NodeSet>) -> Self {
        Self { sets }
    }

    /// Builds the chain from per-node levels in `0..=k`: `S_i` holds the nodes
    /// with level at least `k + 1 − i`.
    pub fn from_levels(levels: &[usize], k: usize) -> Self {
        let sets = (1..=k)
            .map(|i| NodeSet::from_mask(levels.iter().map(|&l| l > k - i).collect()))
            .collect();
        Self { sets }
    }

    pub fn k(&self) -> usize {
        self.sets.len()
    }

    pub fn sets(&self) -> &[NodeSet] {
        &self.sets
    }

    pub fn crossings(&self, g: &MultiGraph) -> Result<Vec<Vec<usize>>, ModelError> {
        self.sets.iter().map(|s| g.crossing_arcs(s)).collect()
    }

    pub fn is_nested(&self) -> bool {
        self.sets.windows(2).all(|w| w[0].is_subset_of(&w[1]))
    }

    /// Nested, pairwise disjoint crossings, and every set contains `sources`
    /// while avoiding `sinks`.
    pub fn separates(&self, g: &MultiGraph, sources: &NodeSet, sinks: &NodeSet) -> bool {
        if self.sets.is_empty() || !self.is_nested() {
            return false;
        }
        if self.sets.iter().any(|s| s.universe_size() != g.num_nodes()) {
            return false;
        }
        let sources_in = sources.is_subset_of(&self.sets[0]);
        let sinks_out = sinks
            .iter()
            .all(|v| !self.sets[self.sets.len() - 1].contains(v));
        if !(sources_in && sinks_out) {
            return false;
        }
        let Ok(crossings) = self.crossings(g) else {
            return false;
        };
        let mut seen = vec![false; g.num_arcs()];
        for level in &crossings {
            for &a in level {
                if seen[a] {
                    return false;
                }
                seen[a] = true;
            }
        }
        true
    }

    /// Union of two chains level by level.
    pub fn union(&self, other: &CutChain) -> CutChain {
        CutChain {
            sets: self
                .sets
                .iter()
                .zip(&other.sets)
                .map(|(a, b)| a.union(b))
                .collect(),
        }
    }

    pub fn intersection(&self, other: &CutChain) -> CutChain {
        CutChain {
            sets: self
                .sets
                .iter()
                .zip(&other.sets)
                .map(|(a, b)| a.intersection(b))
                .collect(),
        }
    }
}

/// `(X ∩ T⁺, T⁻ ∖ X)` as node sets.
pub fn cut_terminals(inst: &Instance, subset: &[usize]) -> Result<(NodeSet, NodeSet), ModelError> {
    let n = inst.num_nodes();
    let x = NodeSet::from_nodes(n, subset.iter().copied())?;
    let sources = NodeSet::from_nodes(n, inst.entries().into_iter().filter(|&v| x.contains(v)))?;
    let sinks = NodeSet::from_nodes(n, inst.exits().into_iter().filter(|&v| !x.contains(v)))?;
    Ok((sources, sinks))
}

/// True iff `chain` is a family of `k` disjoint `(X ∩ T⁺, T⁻ ∖ X)`-cuts.
pub fn check_chain(inst: &Instance, subset: &[usize], chain: &CutChain) -> bool {
    if subset.iter().any(|&v| v >= inst.num_nodes() || !(inst.is_entry(v) || inst.is_exit(v))) {
        return false;
    }
    match cut_terminals(inst, subset) {
        Ok((sources, sinks)) => chain.separates(inst.graph(), &sources, &sinks),
        Err(_) => false,
    }
}

/// A linear inequality `coefficients · x ≥ rhs` with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidInequality {
    pub coefficients: Vec<f64>,
    pub rhs: f64,
    pub k: usize,
    /// Terminal subset `X`, increasing.
    pub subset: Vec<usize>,
    /// The generating chain; absent for inequalities read back from text.
    pub chain: Option<CutChain>,
}

/// Normalized identity of an inequality: `(k, X, support)`.
pub type InequalityKey = (usize, Vec<usize>, Vec<usize>);

impl ValidInequality {
    pub fn support(&self) -> Vec<usize> {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(a, _)| a)
            .collect()
    }

    pub fn key(&self) -> InequalityKey {
        (self.k, self.subset.clone(), self.support())
    }

    pub fn lhs(&self, x: &[f64]) -> f64 {
        self.coefficients.iter().zip(x).map(|(c, x)| c * x).sum()
    }

    /// Left-hand side with `x_a^(1/r)` in place of `x_a`.
    pub fn lhs_root(&self, x: &[f64], degree: f64) -> f64 {
        self.coefficients
            .iter()
            .zip(x)
            .map(|(c, x)| c * x.powf(1.0 / degree))
            .sum()
    }

    /// `lhs − rhs`; negative means violated.
    pub fn evaluate_violation(&self, x: &[f64]) -> f64 {
        self.lhs(x) - self.rhs
    }

    /// `k; X; rhs; arc:coef ...` with node and arc indices.
    pub fn to_line(&self) -> String {
        let subset = self
            .subset
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let terms = self
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(a, c)| format!("{a}:{c:?}"))
            .collect::<Vec<_>>()
            .join(" ");
        format!("{}; {}; {:?}; {}", self.k, subset, self.rhs, terms)
    }

    pub fn from_line(line: &str, num_arcs: usize) -> Result<Self, InequalityError> {
        let bad = |what: &str| InequalityError::Parse(format!("{what} in {line:?}"));
        let parts: Vec<&str> = line.split(';').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(bad("expected four ';'-separated fields"));
        }
        let k: usize = parts[0].parse().map_err(|_| bad("bad k"))?;
        let subset = if parts[1].is_empty() {
            Vec::new()
        } else {
            parts[1]
                .split(',')
                .map(|v| v.trim().parse::<usize>().map_err(|_| bad("bad node index")))
                .collect::<Result<Vec<_>, _>>()?
        };
        let rhs: f64 = parts[2].parse().map_err(|_| bad("bad rhs"))?;
        let mut coefficients = vec![0.0; num_arcs];
        for term in parts[3].split_whitespace() {
            let (a, c) = term.split_once(':').ok_or_else(|| bad("bad term"))?;
            let a: usize = a.parse().map_err(|_| bad("bad arc index"))?;
            if a >= num_arcs {
                return Err(bad("arc index out of range"));
            }
            coefficients[a] = c.parse().map_err(|_| bad("bad coefficient"))?;
        }
        Ok(Self {
            coefficients,
            rhs,
            k,
            subset,
            chain: None,
        })
    }
}

/// Builds the inequality for `X` and `chain`, which must pass [`check_chain`].
pub fn build_inequality(
    inst: &Instance,
    subset: &[usize],
    chain: &CutChain,
) -> Result<ValidInequality, InequalityError> {
    if !check_chain(inst, subset, chain) {
        return Err(InequalityError::InvalidChain);
    }
    let k = chain.k();
    let r = inst.degree();
    let kf = k as f64;
    let scale = 1.0 / (kf * kf.powf(1.0 / r));
    let mut coefficients = vec![0.0; inst.num_arcs()];
    for level in chain.crossings(inst.graph())? {
        for a in level {
            coefficients[a] = inst.network.conductance(a) * scale;
        }
    }
    let rhs = balance_of_subset(inst, subset)? / inst.pi_bar.powf(1.0 / r);
    let subset: Vec<usize> = subset.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    Ok(ValidInequality {
        coefficients,
        rhs,
        k,
        subset,
        chain: Some(chain.clone()),
    })
}
