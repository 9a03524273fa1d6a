//! Dense bounded-variable primal simplex.
//!
//! Minimizes `c·x` subject to rows `a_i·x {≤,=,≥} b_i` and `l ≤ x ≤ u` (bounds
//! may be infinite). Each row gets a slack `s_i` so that `a_i·x + s_i = b_i`,
//! and an artificial variable for phase one. Pricing is Dantzig's rule until
//! [`DEGENERATE_PIVOT_LIMIT`] degenerate pivots have been seen, then Bland's
//! rule for the rest of the solve. Identical input gives identical output.

use std::fmt;

use thiserror::Error;

pub const FEASIBILITY_TOL: f64 = 1e-8;
pub const PIVOT_TOL: f64 = 1e-10;
pub const OPTIMALITY_TOL: f64 = 1e-9;
pub const DEGENERATE_PIVOT_LIMIT: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("constraint {row} references variable {var} but the program has {num_vars}")]
    UnknownVariable { row: usize, var: usize, num_vars: usize },
    #[error("non-finite coefficient in {0}")]
    NonFinite(&'static str),
    #[error("variable {0} has lower bound above upper bound")]
    InvertedBounds(usize),
    #[error("numerical breakdown: {0}")]
    Numerical(String),
    #[error("iteration limit {0} reached")]
    IterationLimit(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A minimization problem in row form.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram {
    objective: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a variable with objective coefficient `cost` and bounds `[lower, upper]`.
    pub fn add_var(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        self.objective.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.objective.len() - 1
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> usize {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self.constraints.len() - 1
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn bounds(&self, var: usize) -> (f64, f64) {
        (self.lower[var], self.upper[var])
    }

    fn check(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::NonFinite("objective"));
        }
        for j in 0..n {
            if self.lower[j].is_nan() || self.upper[j].is_nan() {
                return Err(LpError::NonFinite("bounds"));
            }
            if self.lower[j] > self.upper[j] || self.lower[j] == f64::INFINITY || self.upper[j] == f64::NEG_INFINITY {
                return Err(LpError::InvertedBounds(j));
            }
        }
        for (i, row) in self.constraints.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(LpError::NonFinite("right-hand side"));
            }
            for &(j, a) in &row.coeffs {
                if j >= n {
                    return Err(LpError::UnknownVariable {
                        row: i,
                        var: j,
                        num_vars: n,
                    });
                }
                if !a.is_finite() {
                    return Err(LpError::NonFinite("constraint matrix"));
                }
            }
        }
        Ok(())
    }

    /// Row activities `a_i·x`.
    pub fn activities(&self, x: &[f64]) -> Vec<f64> {
        self.constraints
            .iter()
            .map(|row| row.coeffs.iter().map(|&(j, a)| a * x[j]).sum())
            .collect()
    }

    /// Largest bound or row violation of `x`.
    pub fn primal_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.num_vars() {
            worst = worst.max(self.lower[j] - x[j]).max(x[j] - self.upper[j]);
        }
        for (row, act) in self.constraints.iter().zip(self.activities(x)) {
            let v = match row.relation {
                Relation::Le => act - row.rhs,
                Relation::Ge => row.rhs - act,
                Relation::Eq => (act - row.rhs).abs(),
            };
            worst = worst.max(v);
        }
        worst
    }
}

fn fmt_num(x: f64) -> String {
    if x == f64::INFINITY {
        "+inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

/// LP-format style dump for debugging.
impl fmt::Display for LinearProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term = |f: &mut fmt::Formatter<'_>, first: bool, a: f64, j: usize| -> fmt::Result {
            let sign = if a < 0.0 { "-" } else if first { "" } else { "+" };
            if first {
                write!(f, "{sign}{} x{j}", a.abs())
            } else {
                write!(f, " {sign} {} x{j}", a.abs())
            }
        };
        writeln!(f, "minimize")?;
        write!(f, "  obj:")?;
        let mut first = true;
        for (j, &c) in self.objective.iter().enumerate() {
            if c != 0.0 {
                if first {
                    write!(f, " ")?;
                }
                term(f, first, c, j)?;
                first = false;
            }
        }
        if first {
            write!(f, " 0")?;
        }
        writeln!(f)?;
        writeln!(f, "subject to")?;
        for (i, row) in self.constraints.iter().enumerate() {
            write!(f, "  c{i}:")?;
            let mut first = true;
            for &(j, a) in &row.coeffs {
                if first {
                    write!(f, " ")?;
                }
                term(f, first, a, j)?;
                first = false;
            }
            if first {
                write!(f, " 0")?;
            }
            let rel = match row.relation {
                Relation::Le => "<=",
                Relation::Eq => "=",
                Relation::Ge => ">=",
            };
            writeln!(f, " {rel} {}", fmt_num(row.rhs))?;
        }
        writeln!(f, "bounds")?;
        for j in 0..self.num_vars() {
            writeln!(f, "  {} <= x{j} <= {}", fmt_num(self.lower[j]), fmt_num(self.upper[j]))?;
        }
        write!(f, "end")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Structural values (meaningful on `Optimal`).
    pub x: Vec<f64>,
    pub objective: f64,
    /// Row duals `y` with `c − Aᵀy` the reduced costs.
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub iterations: usize,
}

impl LpSolution {
    /// `bᵀy + Σ_j d_j · bound_j`, where each nonzero reduced cost is charged
    /// at the bound it pushes against. Equals the primal objective at optimality.
    pub fn dual_objective(&self, lp: &LinearProgram) -> f64 {
        let mut total: f64 = lp
            .constraints
            .iter()
            .zip(&self.duals)
            .map(|(row, y)| row.rhs * y)
            .sum();
        for (j, &d) in self.reduced_costs.iter().enumerate() {
            if d.abs() <= OPTIMALITY_TOL {
                // Nonbasic at a bound or basic: contributes d_j x_j.
                total += d * self.x[j];
            } else if d > 0.0 {
                total += d * lp.lower[j];
            } else {
                total += d * lp.upper[j];
            }
        }
        total
    }

    /// Max of `|d_j|·dist(x_j, bound)` and `|y_i|·slack_i` over the program.
    pub fn complementarity_residual(&self, lp: &LinearProgram) -> f64 {
        let mut worst = 0.0f64;
        for (j, &d) in self.reduced_costs.iter().enumerate() {
            let gap = if d > 0.0 {
                self.x[j] - lp.lower[j]
            } else if d < 0.0 {
                lp.upper[j] - self.x[j]
            } else {
                0.0
            };
            worst = worst.max((d * gap).abs());
        }
        for ((row, act), &y) in lp.constraints.iter().zip(lp.activities(&self.x)).zip(&self.duals) {
            worst = worst.max((y * (act - row.rhs)).abs());
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Phase {
    One,
    Two,
}

struct Tableau {
    m: usize,
    /// Structural + slack + artificial.
    ncols: usize,
    n_struct: usize,
    t: Vec<f64>,
    /// Objective row: reduced costs of all columns.
    d: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    /// Current value of every column.
    value: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    art_sign: Vec<f64>,
    rhs: Vec<f64>,
    degenerate: usize,
    iterations: usize,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.ncols + j]
    }

    fn art(&self, i: usize) -> usize {
        self.n_struct + self.m + i
    }

    fn build(lp: &LinearProgram) -> Tableau {
        let m = lp.num_constraints();
        let n = lp.num_vars();
        let ncols = n + 2 * m;
        let mut lower = Vec::with_capacity(ncols);
        let mut upper = Vec::with_capacity(ncols);
        lower.extend_from_slice(&lp.lower);
        upper.extend_from_slice(&lp.upper);
        for row in &lp.constraints {
            let (l, u) = match row.relation {
                Relation::Le => (0.0, f64::INFINITY),
                Relation::Ge => (f64::NEG_INFINITY, 0.0),
                Relation::Eq => (0.0, 0.0),
            };
            lower.push(l);
            upper.push(u);
        }
        lower.extend(std::iter::repeat(0.0).take(m));
        upper.extend(std::iter::repeat(f64::INFINITY).take(m));

        // Nonbasic start: nearest finite bound, or zero when free.
        let mut value: Vec<f64> = (0..ncols)
            .map(|j| {
                if lower[j].is_finite() {
                    lower[j]
                } else if upper[j].is_finite() {
                    upper[j]
                } else {
                    0.0
                }
            })
            .collect();

        let mut t = vec![0.0; m * ncols];
        let mut art_sign = vec![1.0; m];
        let mut basis = Vec::with_capacity(m);
        let mut is_basic = vec![false; ncols];
        let rhs: Vec<f64> = lp.constraints.iter().map(|r| r.rhs).collect();
        for (i, row) in lp.constraints.iter().enumerate() {
            let mut residual = row.rhs;
            for &(j, a) in &row.coeffs {
                t[i * ncols + j] += a;
                residual -= a * value[j];
            }
            t[i * ncols + n + i] = 1.0;
            residual -= value[n + i];
            let sign = if residual < 0.0 { -1.0 } else { 1.0 };
            art_sign[i] = sign;
            // Row scaled by the artificial's sign so its column is e_i.
            for j in 0..(n + m) {
                t[i * ncols + j] *= sign;
            }
            let art = n + m + i;
            t[i * ncols + art] = 1.0;
            value[art] = residual.abs();
            basis.push(art);
            is_basic[art] = true;
        }
        Tableau {
            m,
            ncols,
            n_struct: n,
            t,
            d: vec![0.0; ncols],
            basis,
            is_basic,
            value,
            lower,
            upper,
            art_sign,
            rhs,
            degenerate: 0,
            iterations: 0,
        }
    }

    fn set_costs(&mut self, cost: &[f64]) {
        self.d.copy_from_slice(cost);
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.t[i * self.ncols..(i + 1) * self.ncols];
                for (dj, &tij) in self.d.iter_mut().zip(row) {
                    *dj -= cb * tij;
                }
            }
        }
    }

    fn eligible(&self, j: usize, phase: Phase) -> bool {
        !(self.is_basic[j]
            || self.lower[j] == self.upper[j]
            || (phase == Phase::Two && j >= self.art(0)))
    }

    /// Entering column and direction (+1 increase, −1 decrease).
    fn price(&self, phase: Phase) -> Option<(usize, f64)> {
        let bland = self.degenerate >= DEGENERATE_PIVOT_LIMIT;
        let mut best: Option<(usize, f64)> = None;
        let mut best_score = 0.0;
        for j in 0..self.ncols {
            if !self.eligible(j, phase) {
                continue;
            }
            let dj = self.d[j];
            let dir = if dj < -OPTIMALITY_TOL && self.value[j] < self.upper[j] {
                1.0
            } else if dj > OPTIMALITY_TOL && self.value[j] > self.lower[j] {
                -1.0
            } else {
                continue;
            };
            if bland {
                return Some((j, dir));
            }
            if dj.abs() > best_score {
                best_score = dj.abs();
                best = Some((j, dir));
            }
        }
        best
    }

    /// Returns false when the direction is unbounded.
    fn step(&mut self, q: usize, dir: f64) -> Result<bool, LpError> {
        let bland = self.degenerate >= DEGENERATE_PIVOT_LIMIT;
        let mut theta = self.upper[q] - self.lower[q];
        let mut leave: Option<(usize, f64)> = None;
        let mut leave_pivot = 0.0;
        for i in 0..self.m {
            let tiq = self.at(i, q);
            if tiq.abs() <= PIVOT_TOL {
                continue;
            }
            let delta = -dir * tiq;
            let b = self.basis[i];
            let (limit, bound) = if delta < 0.0 {
                if !self.lower[b].is_finite() {
                    continue;
                }
                (((self.value[b] - self.lower[b]) / -delta).max(0.0), self.lower[b])
            } else {
                if !self.upper[b].is_finite() {
                    continue;
                }
                (((self.upper[b] - self.value[b]) / delta).max(0.0), self.upper[b])
            };
            if limit < theta - 1e-12 {
                theta = limit;
                leave = Some((i, bound));
                leave_pivot = tiq.abs();
            } else if limit <= theta + 1e-12 {
                if let Some((r, _)) = leave {
                    let take = if bland {
                        self.basis[i] < self.basis[r]
                    } else {
                        tiq.abs() > leave_pivot
                    };
                    if take {
                        theta = theta.min(limit);
                        leave = Some((i, bound));
                        leave_pivot = tiq.abs();
                    }
                }
            }
        }
        if theta == f64::INFINITY {
            return Ok(false);
        }
        self.iterations += 1;
        if theta <= 1e-12 {
            self.degenerate += 1;
        }
        // Move along the edge.
        self.value[q] += dir * theta;
        for i in 0..self.m {
            let tiq = self.at(i, q);
            if tiq != 0.0 {
                let b = self.basis[i];
                self.value[b] -= dir * theta * tiq;
            }
        }
        match leave {
            None => {
                // Bound flip of the entering variable.
                self.value[q] = if dir > 0.0 { self.upper[q] } else { self.lower[q] };
            }
            Some((r, bound)) => {
                let leaving = self.basis[r];
                self.value[leaving] = bound;
                self.pivot(r, q)?;
            }
        }
        Ok(true)
    }

    fn pivot(&mut self, r: usize, q: usize) -> Result<(), LpError> {
        let nc = self.ncols;
        let p = self.t[r * nc + q];
        if p.abs() <= PIVOT_TOL {
            return Err(LpError::Numerical(format!("pivot element {p:e} too small")));
        }
        let inv = 1.0 / p;
        for j in 0..nc {
            self.t[r * nc + j] *= inv;
        }
        let pivot_row: Vec<f64> = self.t[r * nc..(r + 1) * nc].to_vec();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * nc + q];
            if f != 0.0 {
                let row = &mut self.t[i * nc..(i + 1) * nc];
                for (x, &pr) in row.iter_mut().zip(&pivot_row) {
                    *x -= f * pr;
                }
                row[q] = 0.0;
            }
        }
        let f = self.d[q];
        if f != 0.0 {
            for (x, &pr) in self.d.iter_mut().zip(&pivot_row) {
                *x -= f * pr;
            }
            self.d[q] = 0.0;
        }
        let leaving = self.basis[r];
        self.is_basic[leaving] = false;
        self.is_basic[q] = true;
        self.basis[r] = q;
        Ok(())
    }

    fn run(&mut self, phase: Phase, limit: usize) -> Result<bool, LpError> {
        while let Some((q, dir)) = self.price(phase) {
            if self.iterations >= limit {
                return Err(LpError::IterationLimit(limit));
            }
            if !self.step(q, dir)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `B⁻¹` column `i`, read from the artificial columns.
    fn binv_col(&self, i: usize) -> impl Iterator<Item = f64> + '_ {
        let col = self.art(i);
        (0..self.m).map(move |r| self.at(r, col) * self.art_sign[i])
    }

    /// Recomputes basic values from the nonbasic ones to limit drift.
    fn refresh_basic_values(&mut self, lp: &LinearProgram) {
        let mut residual = self.rhs.clone();
        for (i, row) in lp.constraints.iter().enumerate() {
            for &(j, a) in &row.coeffs {
                if !self.is_basic[j] {
                    residual[i] -= a * self.value[j];
                }
            }
            let s = self.n_struct + i;
            if !self.is_basic[s] {
                residual[i] -= self.value[s];
            }
            let art = self.art(i);
            if !self.is_basic[art] {
                residual[i] -= self.art_sign[i] * self.value[art];
            }
        }
        let mut basic = vec![0.0; self.m];
        for (i, &ri) in residual.iter().enumerate() {
            if ri == 0.0 {
                continue;
            }
            for (r, bi) in self.binv_col(i).enumerate() {
                basic[r] += bi * ri;
            }
        }
        for r in 0..self.m {
            self.value[self.basis[r]] = basic[r];
        }
    }
}

pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp.check()?;
    let n = lp.num_vars();
    let m = lp.num_constraints();
    let mut tab = Tableau::build(lp);
    let limit = 50 * (tab.ncols + m) + 10_000;

    let infeasible = |tab: &Tableau| LpSolution {
        status: LpStatus::Infeasible,
        x: tab.value[..n].to_vec(),
        objective: f64::NAN,
        duals: vec![0.0; m],
        reduced_costs: vec![0.0; n],
        iterations: tab.iterations,
    };

    // Phase one: drive the artificials to zero.
    let mut cost1 = vec![0.0; tab.ncols];
    for i in 0..m {
        cost1[tab.art(i)] = 1.0;
    }
    tab.set_costs(&cost1);
    let bounded = tab.run(Phase::One, limit)?;
    if !bounded {
        return Err(LpError::Numerical("phase one reported unbounded".into()));
    }
    tab.refresh_basic_values(lp);
    let rhs_scale = lp.constraints.iter().fold(1.0f64, |s, r| s.max(r.rhs.abs()));
    let infeasibility: f64 = (0..m).map(|i| tab.value[tab.art(i)]).sum();
    if infeasibility > FEASIBILITY_TOL * rhs_scale {
        return Ok(infeasible(&tab));
    }

    // Phase two: artificials are fixed at zero.
    for i in 0..m {
        let a = tab.art(i);
        tab.upper[a] = 0.0;
        if !tab.is_basic[a] {
            tab.value[a] = 0.0;
        }
    }
    let mut cost2 = vec![0.0; tab.ncols];
    cost2[..n].copy_from_slice(&lp.objective);
    tab.set_costs(&cost2);
    let bounded = tab.run(Phase::Two, limit)?;
    if !bounded {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            x: tab.value[..n].to_vec(),
            objective: f64::NEG_INFINITY,
            duals: vec![0.0; m],
            reduced_costs: vec![0.0; n],
            iterations: tab.iterations,
        });
    }
    tab.refresh_basic_values(lp);

    let x: Vec<f64> = tab.value[..n].to_vec();
    // y_i = Σ_r c_{B_r} (B⁻¹)_{r,i}
    let duals: Vec<f64> = (0..m)
        .map(|i| {
            tab.binv_col(i)
                .enumerate()
                .map(|(r, b)| cost2[tab.basis[r]] * b)
                .sum()
        })
        .collect();
    let mut reduced_costs = lp.objective.clone();
    for (row, &y) in lp.constraints.iter().zip(&duals) {
        for &(j, a) in &row.coeffs {
            reduced_costs[j] -= a * y;
        }
    }
    for (j, d) in reduced_costs.iter_mut().enumerate() {
        if tab.is_basic[j] {
            *d = 0.0;
        }
    }
    let objective = lp.objective.iter().zip(&x).map(|(c, x)| c * x).sum();
    let violation = lp.primal_violation(&x);
    let x_scale = x.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    if violation > FEASIBILITY_TOL * rhs_scale.max(x_scale) {
        return Err(LpError::Numerical(format!(
            "primal residual {violation:e} after phase two"
        )));
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        objective,
        duals,
        reduced_costs,
        iterations: tab.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn single_variable_bounds() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(1.0, f64::NEG_INFINITY, f64::INFINITY);
        lp.add_constraint(vec![(x, 1.0)], Relation::Ge, 3.0);
        lp.add_constraint(vec![(x, 1.0)], Relation::Le, 10.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_relative_eq!(sol.x[0], 3.0);
        assert_relative_eq!(sol.objective, 3.0);
        assert_relative_eq!(sol.dual_objective(&lp), 3.0);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(1.0, 0.0, 1.0);
        lp.add_constraint(vec![(x, 1.0)], Relation::Ge, 2.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);

        let mut lp = LinearProgram::new();
        let x = lp.add_var(-1.0, 0.0, f64::INFINITY);
        let y = lp.add_var(0.0, 0.0, f64::INFINITY);
        lp.add_constraint(vec![(x, 1.0), (y, -1.0)], Relation::Le, 1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn empty_row_is_infeasible() {
        let mut lp = LinearProgram::new();
        lp.add_var(1.0, 0.0, 1.0);
        lp.add_constraint(vec![], Relation::Ge, 1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn classic_two_variable() {
        // max x + 2y  s.t. x + y ≤ 4, 2x + y ≥ 2, 0 ≤ y ≤ 3
        let mut lp = LinearProgram::new();
        let x = lp.add_var(-1.0, 0.0, f64::INFINITY);
        let y = lp.add_var(-2.0, 0.0, 3.0);
        lp.add_constraint(vec![(x, 1.0), (y, 1.0)], Relation::Le, 4.0);
        lp.add_constraint(vec![(x, 2.0), (y, 1.0)], Relation::Ge, 2.0);
        let sol = solve_lp(&lp).unwrap();
        assert_relative_eq!(sol.objective, -7.0, epsilon = 1e-12);
        assert_relative_eq!(sol.x[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(sol.x[1], 3.0, epsilon = 1e-12);
        assert_relative_eq!(sol.dual_objective(&lp), -7.0, epsilon = 1e-9);
        assert!(sol.complementarity_residual(&lp) < 1e-9);
    }

    #[test]
    fn max_flow_on_a_path_and_its_cut() {
        // Unit capacities on s-a-b-t; variables f0, f1, f2, value v.
        let mut lp = LinearProgram::new();
        let f: Vec<usize> = (0..3).map(|_| lp.add_var(0.0, 0.0, 1.0)).collect();
        let v = lp.add_var(-1.0, 0.0, f64::INFINITY);
        lp.add_constraint(vec![(f[0], 1.0), (v, -1.0)], Relation::Eq, 0.0);
        lp.add_constraint(vec![(f[1], 1.0), (f[0], -1.0)], Relation::Eq, 0.0);
        lp.add_constraint(vec![(f[2], 1.0), (f[1], -1.0)], Relation::Eq, 0.0);
        let sol = solve_lp(&lp).unwrap();
        assert_relative_eq!(-sol.objective, 1.0, epsilon = 1e-12);
        assert_relative_eq!(sol.dual_objective(&lp), sol.objective, epsilon = 1e-9);
        // The capacity duals pick out exactly one saturated arc of unit price.
        let cut: Vec<f64> = f.iter().map(|&j| -sol.reduced_costs[j]).collect();
        assert_relative_eq!(cut.iter().sum::<f64>(), 1.0, epsilon = 1e-9);
        assert_eq!(cut.iter().filter(|c| c.abs() > 1e-9).count(), 1);
    }

    #[test]
    fn free_variables_and_equalities() {
        // min |p1 - p0| style: p0 fixed 0, p1 - p0 = 2.5, minimize p1.
        let mut lp = LinearProgram::new();
        let p0 = lp.add_var(0.0, 0.0, 0.0);
        let p1 = lp.add_var(1.0, f64::NEG_INFINITY, f64::INFINITY);
        lp.add_constraint(vec![(p1, 1.0), (p0, -1.0)], Relation::Eq, 2.5);
        let sol = solve_lp(&lp).unwrap();
        assert_relative_eq!(sol.x[1], 2.5);
        assert_relative_eq!(sol.duals[0], 1.0);
    }

    #[test]
    fn display_dump() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(2.0, 0.0, 1.0);
        let y = lp.add_var(-1.0, f64::NEG_INFINITY, f64::INFINITY);
        lp.add_constraint(vec![(x, 1.0), (y, -3.0)], Relation::Ge, 1.5);
        let text = lp.to_string();
        assert_eq!(
            text,
            "minimize\n  obj: 2 x0 - 1 x1\nsubject to\n  c0: 1 x0 - 3 x1 >= 1.5\nbounds\n  0 <= x0 <= 1\n  -inf <= x1 <= +inf\nend"
        );
    }

    #[test]
    fn rejects_bad_input() {
        let mut lp = LinearProgram::new();
        lp.add_var(1.0, 0.0, 1.0);
        lp.add_constraint(vec![(3, 1.0)], Relation::Le, 1.0);
        assert!(matches!(solve_lp(&lp), Err(LpError::UnknownVariable { var: 3, .. })));
        let mut lp = LinearProgram::new();
        lp.add_var(1.0, 2.0, 1.0);
        assert_eq!(solve_lp(&lp), Err(LpError::InvertedBounds(0)));
    }

    #[test]
    fn deterministic() {
        let mut lp = LinearProgram::new();
        let vars: Vec<usize> = (0..6).map(|j| lp.add_var(1.0 + (j % 3) as f64, 0.0, 1.0)).collect();
        lp.add_constraint(vars.iter().map(|&j| (j, 1.0)).collect(), Relation::Ge, 2.5);
        lp.add_constraint(vec![(vars[0], 1.0), (vars[3], 1.0)], Relation::Le, 1.0);
        let a = solve_lp(&lp).unwrap();
        let b = solve_lp(&lp).unwrap();
        assert_eq!(a, b);
    }
}
