//! Dense revised simplex for small linear programs.
//!
//! The problems solved here have few rows (family dimension + 1, or a
//! handful of active constraints) and possibly many columns (one per
//! duality pair in a phase closure), so the basis inverse is refactored
//! from scratch every iteration and pricing is a parallel scan over the
//! columns.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::par::{self, Exec};

/// `min cᵀx  s.t.  A x = b,  x ≥ 0`, with `A` stored column by column.
#[derive(Debug, Clone)]
pub struct StandardLp {
    pub rows: usize,
    pub columns: Vec<Vec<f64>>,
    pub cost: Vec<f64>,
    pub rhs: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    /// Row multipliers `y` with `c − Aᵀy ≥ 0` at the optimum.
    pub duals: Vec<f64>,
    pub objective: f64,
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal(LpSolution),
    /// `y` with `Aᵀy ≤ 0` and `bᵀy > 0`.
    Infeasible { farkas: Vec<f64> },
    Unbounded,
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub feasibility_tol: f64,
    pub optimality_tol: f64,
    pub max_iterations: usize,
    pub exec: Exec,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            feasibility_tol: 1e-10,
            optimality_tol: 1e-11,
            max_iterations: 200_000,
            exec: Exec::default(),
        }
    }
}

const PIVOT_TOL: f64 = 1e-9;
const DEGENERATE_LIMIT: usize = 50;

struct Tableau<'a> {
    lp: &'a StandardLp,
    sign: Vec<f64>,
    basis: Vec<usize>,
    binv: DMatrix<f64>,
    opts: SimplexOptions,
}

impl<'a> Tableau<'a> {
    fn n(&self) -> usize {
        self.lp.columns.len()
    }

    fn col(&self, j: usize) -> DVector<f64> {
        let r = self.lp.rows;
        if j < self.n() {
            DVector::from_fn(r, |i, _| self.sign[i] * self.lp.columns[j][i])
        } else {
            let mut e = DVector::zeros(r);
            e[j - self.n()] = 1.0;
            e
        }
    }

    fn dot_col(&self, y: &DVector<f64>, j: usize) -> f64 {
        if j < self.n() {
            self.lp.columns[j]
                .iter()
                .enumerate()
                .map(|(i, a)| self.sign[i] * a * y[i])
                .sum()
        } else {
            y[j - self.n()]
        }
    }

    fn rhs(&self) -> DVector<f64> {
        DVector::from_fn(self.lp.rows, |i, _| self.sign[i] * self.lp.rhs[i])
    }

    fn refactor(&mut self) -> Result<()> {
        let r = self.lp.rows;
        let mut b = DMatrix::zeros(r, r);
        for (k, &j) in self.basis.iter().enumerate() {
            b.set_column(k, &self.col(j));
        }
        self.binv = b
            .try_inverse()
            .ok_or_else(|| Error::Solver("singular simplex basis".into()))?;
        Ok(())
    }

    /// Runs simplex iterations for `cost`; returns `false` on unboundedness.
    fn run(&mut self, cost: &(dyn Fn(usize) -> f64 + Sync), allow_artificial: bool) -> Result<bool> {
        let n = self.n();
        let r = self.lp.rows;
        let total = if allow_artificial { n + r } else { n };
        let cscale = (0..n + r).map(|j| cost(j).abs()).fold(1.0, f64::max);
        let tol = self.opts.optimality_tol * cscale;
        let mut bland = false;
        let mut degenerate = 0usize;
        for _ in 0..self.opts.max_iterations {
            self.refactor()?;
            let xb = &self.binv * self.rhs();
            let cb = DVector::from_fn(r, |i, _| cost(self.basis[i]));
            let y = self.binv.transpose() * cb;
            let mut is_basic = vec![false; n + r];
            for &j in &self.basis {
                is_basic[j] = true;
            }
            let reduced = |j: usize| {
                if is_basic[j] {
                    f64::INFINITY
                } else {
                    cost(j) - self.dot_col(&y, j)
                }
            };
            let entering = if bland {
                par::first_index(self.opts.exec, total, |j| reduced(j) < -tol)
            } else {
                par::argmin_range(self.opts.exec, total, reduced)
                    .filter(|&(_, d)| d < -tol)
                    .map(|(j, _)| j)
            };
            let Some(q) = entering else {
                return Ok(true);
            };
            let u = &self.binv * self.col(q);
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..r {
                if u[i] > PIVOT_TOL {
                    let theta = xb[i].max(0.0) / u[i];
                    leave = match leave {
                        None => Some((i, theta)),
                        Some((li, lt)) => {
                            let tie = (theta - lt).abs() <= 1e-12 * (1.0 + lt);
                            let better = if tie {
                                if bland {
                                    self.basis[i] < self.basis[li]
                                } else {
                                    u[i] > u[li]
                                }
                            } else {
                                theta < lt
                            };
                            if better {
                                Some((i, theta))
                            } else {
                                Some((li, lt))
                            }
                        }
                    };
                }
            }
            let Some((row, theta)) = leave else {
                return Ok(false);
            };
            if theta <= 1e-12 {
                degenerate += 1;
                if degenerate > DEGENERATE_LIMIT {
                    bland = true;
                }
            } else {
                degenerate = 0;
            }
            self.basis[row] = q;
        }
        Err(Error::Solver("simplex iteration limit reached".into()))
    }
}

/// Two-phase revised simplex with Dantzig pricing, switching to Bland's
/// rule after a run of degenerate pivots.
pub fn solve_standard(lp: &StandardLp, opts: SimplexOptions) -> Result<LpOutcome> {
    let r = lp.rows;
    let n = lp.columns.len();
    if lp.rhs.len() != r || lp.cost.len() != n || lp.columns.iter().any(|c| c.len() != r) {
        return Err(Error::InvalidInput("inconsistent LP shape".into()));
    }
    let sign: Vec<f64> = lp.rhs.iter().map(|&b| if b < 0.0 { -1.0 } else { 1.0 }).collect();
    let mut t = Tableau {
        lp,
        sign,
        basis: (n..n + r).collect(),
        binv: DMatrix::identity(r, r),
        opts,
    };

    // Phase I: minimise the sum of artificials.
    let phase1 = |j: usize| if j < n { 0.0 } else { 1.0 };
    t.run(&phase1, true)?;
    t.refactor()?;
    let xb = &t.binv * t.rhs();
    let infeas: f64 = (0..r).filter(|&i| t.basis[i] >= n).map(|i| xb[i]).sum();
    let bscale = lp.rhs.iter().fold(1.0f64, |m, b| m.max(b.abs()));
    if infeas > opts.feasibility_tol * bscale {
        let cb = DVector::from_fn(r, |i, _| phase1(t.basis[i]));
        let y = t.binv.transpose() * cb;
        let farkas = (0..r).map(|i| t.sign[i] * y[i]).collect();
        return Ok(LpOutcome::Infeasible { farkas });
    }

    // Drive zero-level artificials out of the basis where possible.
    for row in 0..r {
        if t.basis[row] < n {
            continue;
        }
        let binv_row = t.binv.row(row).transpose();
        let candidate = (0..n)
            .filter(|j| !t.basis.contains(j))
            .map(|j| (j, t.dot_col(&binv_row, j).abs()))
            .filter(|&(_, v)| v > PIVOT_TOL)
            .fold(None, |best: Option<(usize, f64)>, c| match best {
                Some(b) if b.1 >= c.1 => Some(b),
                _ => Some(c),
            });
        if let Some((j, _)) = candidate {
            t.basis[row] = j;
            t.refactor()?;
        }
    }

    let phase2 = |j: usize| if j < n { lp.cost[j] } else { 0.0 };
    if !t.run(&phase2, false)? {
        return Ok(LpOutcome::Unbounded);
    }
    t.refactor()?;
    let xb = &t.binv * t.rhs();
    let mut x = vec![0.0; n];
    for (i, &j) in t.basis.iter().enumerate() {
        if j < n {
            x[j] = xb[i].max(0.0);
        }
    }
    let cb = DVector::from_fn(r, |i, _| phase2(t.basis[i]));
    let y = t.binv.transpose() * cb;
    let duals = (0..r).map(|i| t.sign[i] * y[i]).collect();
    let objective = x.iter().zip(&lp.cost).map(|(a, b)| a * b).sum();
    Ok(LpOutcome::Optimal(LpSolution { x, duals, objective }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    NonNegative,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

/// Builder for small general-form LPs (`min cᵀx`, mixed row relations,
/// free or non-negative variables), lowered to [`StandardLp`].
#[derive(Debug, Clone, Default)]
pub struct LpBuilder {
    kinds: Vec<VarKind>,
    cost: Vec<f64>,
    rows: Vec<(Vec<f64>, Relation, f64)>,
}

impl LpBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn var(&mut self, kind: VarKind, cost: f64) -> usize {
        self.kinds.push(kind);
        self.cost.push(cost);
        self.kinds.len() - 1
    }

    pub fn constraint(&mut self, coeffs: Vec<f64>, rel: Relation, rhs: f64) {
        self.rows.push((coeffs, rel, rhs));
    }

    pub fn minimize(&self, opts: SimplexOptions) -> Result<LpOutcome> {
        let nv = self.kinds.len();
        let mut columns = Vec::new();
        let mut cost = Vec::new();
        let mut owner = Vec::new();
        for (v, kind) in self.kinds.iter().enumerate() {
            let col: Vec<f64> = self.rows.iter().map(|(c, _, _)| c.get(v).copied().unwrap_or(0.0)).collect();
            columns.push(col.clone());
            cost.push(self.cost[v]);
            owner.push((v, 1.0));
            if *kind == VarKind::Free {
                columns.push(col.iter().map(|a| -a).collect());
                cost.push(-self.cost[v]);
                owner.push((v, -1.0));
            }
        }
        for (i, (_, rel, _)) in self.rows.iter().enumerate() {
            let s = match rel {
                Relation::Le => 1.0,
                Relation::Ge => -1.0,
                Relation::Eq => continue,
            };
            let mut col = vec![0.0; self.rows.len()];
            col[i] = s;
            columns.push(col);
            cost.push(0.0);
            owner.push((usize::MAX, 0.0));
        }
        let lp = StandardLp {
            rows: self.rows.len(),
            columns,
            cost,
            rhs: self.rows.iter().map(|r| r.2).collect(),
        };
        Ok(match solve_standard(&lp, opts)? {
            LpOutcome::Optimal(sol) => {
                let mut x = vec![0.0; nv];
                for (k, &(v, s)) in owner.iter().enumerate() {
                    if v != usize::MAX {
                        x[v] += s * sol.x[k];
                    }
                }
                let objective = x.iter().zip(&self.cost).map(|(a, b)| a * b).sum();
                LpOutcome::Optimal(LpSolution { x, duals: sol.duals, objective })
            }
            other => other,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimal(o: LpOutcome) -> LpSolution {
        match o {
            LpOutcome::Optimal(s) => s,
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6).
        let mut b = LpBuilder::new();
        let x = b.var(VarKind::NonNegative, -3.0);
        let y = b.var(VarKind::NonNegative, -5.0);
        let _ = (x, y);
        b.constraint(vec![1.0, 0.0], Relation::Le, 4.0);
        b.constraint(vec![0.0, 2.0], Relation::Le, 12.0);
        b.constraint(vec![3.0, 2.0], Relation::Le, 18.0);
        let s = optimal(b.minimize(SimplexOptions::default()).unwrap());
        assert!((s.objective + 36.0).abs() < 1e-12);
        assert!((s.x[0] - 2.0).abs() < 1e-12 && (s.x[1] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn free_variables_and_equalities() {
        // min |t| style: min t s.t. t >= x - 1, t >= 1 - x, x free -> 0 at x = 1.
        let mut b = LpBuilder::new();
        b.var(VarKind::Free, 1.0);
        b.var(VarKind::Free, 0.0);
        b.constraint(vec![1.0, -1.0], Relation::Ge, -1.0);
        b.constraint(vec![1.0, 1.0], Relation::Ge, 1.0);
        let s = optimal(b.minimize(SimplexOptions::default()).unwrap());
        assert!(s.objective.abs() < 1e-12);
        assert!((s.x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_gives_farkas_ray() {
        // x1 + x2 = 1 and x1 + x2 = 2 cannot both hold.
        let lp = StandardLp {
            rows: 2,
            columns: vec![vec![1.0, 1.0], vec![1.0, 1.0]],
            cost: vec![0.0, 0.0],
            rhs: vec![1.0, 2.0],
        };
        match solve_standard(&lp, SimplexOptions::default()).unwrap() {
            LpOutcome::Infeasible { farkas } => {
                for c in &lp.columns {
                    assert!(c.iter().zip(&farkas).map(|(a, y)| a * y).sum::<f64>() <= 1e-12);
                }
                assert!(lp.rhs.iter().zip(&farkas).map(|(a, y)| a * y).sum::<f64>() > 0.0);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn unbounded_detected() {
        let mut b = LpBuilder::new();
        b.var(VarKind::Free, -1.0);
        b.constraint(vec![1.0], Relation::Ge, 0.0);
        assert!(matches!(b.minimize(SimplexOptions::default()).unwrap(), LpOutcome::Unbounded));
    }

    #[test]
    fn duals_satisfy_complementarity() {
        let lp = StandardLp {
            rows: 2,
            columns: vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]],
            cost: vec![2.0, 3.0, 4.0],
            rhs: vec![1.0, 1.0],
        };
        let s = optimal(solve_standard(&lp, SimplexOptions::default()).unwrap());
        assert!((s.objective - 4.0).abs() < 1e-12);
        let dual_obj: f64 = s.duals.iter().zip(&lp.rhs).map(|(y, b)| y * b).sum();
        assert!((dual_obj - s.objective).abs() < 1e-12);
        for (j, c) in lp.columns.iter().enumerate() {
            let d = lp.cost[j] - c.iter().zip(&s.duals).map(|(a, y)| a * y).sum::<f64>();
            assert!(d >= -1e-12);
        }
    }
}
