//! Best approximation `min_c ‖T − offset − Σ c_k B_k‖_W` over an affine
//! operator family, solved exactly for finite pair sets as a minimax LP.
//!
//! The LP is solved in its dual form: one weight per closure column,
//! `Σ w = 1`, `Σ w·g = 0`, maximize `Σ w·b`. The primal minimizer is read off
//! the simplex multipliers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{self, LpOutcome, SimplexOptions, StandardLp};
use crate::par::{self, Exec};
use crate::radius::{self, Operator};
use crate::scalar::C64;
use crate::space::{DualityPair, PairSet, ScalarField, Space};

/// Rank tolerance for family bases.
pub const BASIS_RANK_TOL: f64 = 1e-10;
/// Coefficient spread above which the optimal set counts as non-trivial.
pub const UNIQUENESS_TOL: f64 = 1e-6;

/// Real-linear span of operators. Complex families store the realified basis.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSubspace {
    dim: usize,
    basis: Vec<Operator>,
}

impl OperatorSubspace {
    /// Real span of `basis`; fails on linear dependence.
    pub fn new(dim: usize, basis: Vec<Operator>) -> Result<Self> {
        if let Some(b) = basis.iter().find(|b| b.dim() != dim) {
            return Err(Error::dim(dim, b.dim()));
        }
        let rows: Vec<Vec<f64>> = basis.iter().map(flatten).collect();
        if !basis.is_empty() && crate::linalg::rank_real(&rows, BASIS_RANK_TOL) < basis.len() {
            return Err(Error::Degenerate("family basis is linearly dependent".into()));
        }
        Ok(OperatorSubspace { dim, basis })
    }

    /// Complex span of `basis`, realified as `{B, iB}` per element when the
    /// field is complex.
    pub fn over(field: ScalarField, dim: usize, basis: Vec<Operator>) -> Result<Self> {
        match field {
            ScalarField::Real => OperatorSubspace::new(dim, basis),
            ScalarField::Complex => OperatorSubspace::new(
                dim,
                basis.into_iter().flat_map(|b| [b.clone(), b.scale(C64::new(0.0, 1.0))]).collect(),
            ),
        }
    }

    pub fn zero(dim: usize) -> Self {
        OperatorSubspace { dim, basis: Vec::new() }
    }

    /// Real dimension `m`.
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn op_dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[Operator] {
        &self.basis
    }

    /// `Σ c_k B_k`.
    pub fn combine(&self, coeffs: &[f64]) -> Operator {
        let mut out = Operator::zeros(self.dim);
        for (b, &c) in self.basis.iter().zip(coeffs) {
            out.0 += &b.0 * C64::new(c, 0.0);
        }
        out
    }

    /// Least-squares coordinates of `u` in the basis and the residual norm.
    pub fn coordinates(&self, u: &Operator) -> (Vec<f64>, f64) {
        if self.basis.is_empty() {
            return (Vec::new(), flatten(u).iter().map(|x| x * x).sum::<f64>().sqrt());
        }
        let cols: Vec<Vec<f64>> = self.basis.iter().map(flatten).collect();
        let a = nalgebra::DMatrix::from_fn(cols[0].len(), cols.len(), |i, j| cols[j][i]);
        crate::linalg::least_squares(&a, &flatten(u))
    }
}

fn flatten(b: &Operator) -> Vec<f64> {
    b.0.iter().flat_map(|z| [z.re, z.im]).collect()
}

#[derive(Debug, Clone)]
pub struct ApproxProblem {
    pub space: Space,
    pub target: Operator,
    pub offset: Operator,
    pub family: OperatorSubspace,
    pub pairs: PairSet,
}

impl ApproxProblem {
    pub fn new(space: Space, target: Operator, offset: Operator, family: OperatorSubspace, pairs: PairSet) -> Result<Self> {
        target.check(&space)?;
        offset.check(&space)?;
        space.check_dim(family.op_dim())?;
        if pairs.is_empty() {
            return Err(Error::EmptyPairSet);
        }
        space.check_dim(pairs.dim())?;
        if pairs.field != space.field() {
            return Err(Error::InvalidInput("pair set field differs from the space field".into()));
        }
        if space.is_real() && family.basis().iter().any(|b| !b.is_real()) {
            return Err(Error::InvalidInput("complex family operator on a real space".into()));
        }
        Ok(ApproxProblem { space, target, offset, family, pairs })
    }

    /// Problem over the extreme pairs of the space.
    pub fn with_extreme_pairs(space: Space, target: Operator, family: OperatorSubspace, resolution: usize) -> Result<Self> {
        let n = space.dim();
        let pairs = space.extreme_pair_set(resolution)?;
        ApproxProblem::new(space, target, Operator::zeros(n), family, pairs)
    }

    /// `L = offset + Σ c_k B_k`.
    pub fn element(&self, coeffs: &[f64]) -> Operator {
        self.offset.add(&self.family.combine(coeffs))
    }

    /// `‖T − L(c)‖_W`.
    pub fn objective(&self, coeffs: &[f64]) -> Result<f64> {
        radius::seminorm(&self.target.sub(&self.element(coeffs)), &self.pairs)
    }

    /// Columns of the minimax LP: `(b_j, g_j)` per closure element, with
    /// `b_j = re(rot·x*((T − offset)x))` and `g_j,k = re(rot·x*(B_k x))`.
    pub fn lp_columns(&self, exec: Exec) -> Vec<(f64, Vec<f64>)> {
        let rhs = self.target.sub(&self.offset);
        let phases = self.pairs.closure_phases();
        let per_pair = par::map(exec, &self.pairs.pairs, |p| {
            let bt = p.eval(&rhs);
            let gb: Vec<C64> = self.family.basis().iter().map(|b| p.eval(b)).collect();
            phases
                .iter()
                .map(|&r| ((r * bt).re, gb.iter().map(|g| (r * g).re).collect()))
                .collect::<Vec<_>>()
        });
        per_pair.into_iter().flatten().collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let complex = self.space.field() == ScalarField::Complex;
        // Complex families are stored realified; emit one operator per pair.
        let step = if complex { 2 } else { 1 };
        let generated = self.space.extreme_pair_set(self.pairs.resolution).is_ok_and(|w| w == self.pairs);
        let mut v = serde_json::json!({
            "space": self.space.to_json(),
            "target": self.target.to_json(complex),
            "offset": self.offset.to_json(complex),
            "basis": self.family.basis().iter().step_by(step).map(|b| b.to_json(complex)).collect::<Vec<_>>(),
            "pairs": if generated { serde_json::json!("auto-extreme") } else { self.pairs.to_json() },
            "phase_resolution": self.pairs.resolution,
        });
        if !generated {
            v["closed"] = serde_json::json!(self.pairs.closed);
        }
        v
    }

    /// Parses the problem schema. `pairs` is `"auto-extreme"` or an explicit
    /// list, optionally marked `"closed"`; complex `basis` entries span over
    /// ℂ and are realified.
    pub fn from_json(v: &serde_json::Value, default_resolution: usize) -> Result<Self> {
        let field = |k: &str| v.get(k).ok_or_else(|| Error::InvalidInput(format!("problem is missing \"{k}\"")));
        let space = Space::from_json(field("space")?)?;
        let n = space.dim();
        let target = Operator::from_json(field("target")?)?;
        let offset = match v.get("offset") {
            Some(o) if !o.is_null() => Operator::from_json(o)?,
            _ => Operator::zeros(n),
        };
        let basis = match v.get("basis") {
            Some(b) => b
                .as_array()
                .ok_or_else(|| Error::InvalidInput("\"basis\" must be a list of operators".into()))?
                .iter()
                .map(Operator::from_json)
                .collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        let family = OperatorSubspace::over(space.field(), n, basis)?;
        let resolution = v
            .get("phase_resolution")
            .and_then(|r| r.as_u64())
            .map(|r| r as usize)
            .unwrap_or(default_resolution);
        let pairs = match v.get("pairs") {
            None => space.extreme_pair_set(resolution)?,
            Some(serde_json::Value::String(s)) if s == "auto-extreme" => space.extreme_pair_set(resolution)?,
            Some(serde_json::Value::Array(list)) => {
                let pairs = list.iter().map(DualityPair::from_json).collect::<Result<Vec<_>>>()?;
                let mut set = PairSet::explicit(space.field(), pairs)?;
                set.resolution = resolution;
                set.closed = v.get("closed").and_then(|c| c.as_bool()).unwrap_or(false);
                set
            }
            Some(other) => return Err(Error::InvalidInput(format!("unrecognized \"pairs\": {other}"))),
        };
        ApproxProblem::new(space, target, offset, family, pairs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Uniqueness {
    Unique,
    NonUnique,
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxResult {
    pub coeffs: Vec<f64>,
    pub l: Operator,
    /// `‖T − L‖_W`, recomputed from `L`.
    pub value: f64,
    /// Optimal value of the LP (grid-closure value for complex problems).
    pub lp_value: f64,
    pub active: Vec<DualityPair>,
    pub unique: Uniqueness,
    /// Another optimal coefficient vector when `unique = NonUnique` and one
    /// was located.
    pub alternative: Option<Vec<f64>>,
    /// Optimal dual weights per LP column (the zero-in-hull certificate).
    pub weights: Vec<f64>,
}

impl ApproxResult {
    pub fn to_json(&self, complex: bool) -> serde_json::Value {
        serde_json::json!({
            "coefficients": self.coeffs,
            "L": self.l.to_json(complex),
            "value": self.value,
            "lp_value": self.lp_value,
            "active": self.active.iter().map(|p| p.to_json(complex)).collect::<Vec<_>>(),
            "unique": self.unique,
            "alternative": self.alternative,
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ApproxOptions {
    pub simplex: SimplexOptions,
    pub check_uniqueness: bool,
    pub exec: Exec,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        ApproxOptions { simplex: SimplexOptions::default(), check_uniqueness: true, exec: Exec::default() }
    }
}

pub fn solve(problem: &ApproxProblem) -> Result<ApproxResult> {
    solve_with(problem, ApproxOptions::default())
}

/// Global minimizer of the minimax problem.
pub fn solve_with(problem: &ApproxProblem, opts: ApproxOptions) -> Result<ApproxResult> {
    let m = problem.family.len();
    let simplex = SimplexOptions { exec: opts.exec, ..opts.simplex };
    let complex = problem.space.field() == ScalarField::Complex;
    let mut cols = problem.lp_columns(opts.exec);
    let mut rounds = 0;
    let (coeffs, lp_value, weights, value, residual) = loop {
        let (lp_value, weights, first) = minimax_lp(&cols, m, simplex)?;
        let (coeffs, residual, value) = if m == 0 {
            let residual = problem.target.sub(&problem.element(&first));
            let value = radius::seminorm_with(opts.exec, &residual, &problem.pairs)?;
            (first, residual, value)
        } else {
            let relaxed = min_l1_optimal(&cols, m, lp_value + 1e-14 * lp_value.max(1.0), simplex)?.unwrap_or(first);
            let polished = polish(&cols, lp_value, &relaxed);
            let mut best: Option<(Vec<f64>, Operator, f64)> = None;
            for c in [relaxed, polished] {
                let residual = problem.target.sub(&problem.element(&c));
                let value = radius::seminorm_with(opts.exec, &residual, &problem.pairs)?;
                if best.as_ref().is_none_or(|b| value < b.2) {
                    best = Some((c, residual, value));
                }
            }
            best.expect("two candidates")
        };
        let gap = value - lp_value;
        if !complex || gap <= 1e-12 * lp_value.max(1.0) || rounds >= MAX_CUT_ROUNDS {
            break (coeffs, lp_value, weights, value, residual);
        }
        // Exact-phase cuts for pairs whose modulus exceeds the LP value.
        let rhs = problem.target.sub(&problem.offset);
        for p in &problem.pairs.pairs {
            let z = p.eval(&residual);
            if z.norm() > lp_value + 0.5 * gap {
                let rot = crate::scalar::phase(z).conj();
                let g = problem.family.basis().iter().map(|b| (rot * p.eval(b)).re).collect();
                cols.push(((rot * p.eval(&rhs)).re, g));
            }
        }
        rounds += 1;
    };
    let l = problem.element(&coeffs);
    let active = radius::active_set(&residual, &problem.pairs, radius::default_tol(value))?;

    let (unique, alternative) = if !opts.check_uniqueness || m == 0 {
        (if m == 0 { Uniqueness::Unique } else { Uniqueness::Unknown }, None)
    } else if !problem.pairs.exact || complex {
        (Uniqueness::Unknown, None)
    } else {
        uniqueness(&cols, lp_value, &coeffs, simplex)?
    };
    Ok(ApproxResult { coeffs, l, value, lp_value, active, unique, alternative, weights })
}

/// Cutting-plane rounds for complex problems.
const MAX_CUT_ROUNDS: usize = 100;

/// Optimal value, dual weights and multiplier-based minimizer.
fn minimax_lp(cols: &[(f64, Vec<f64>)], m: usize, simplex: SimplexOptions) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let lp = StandardLp {
        rows: m + 1,
        columns: cols
            .iter()
            .map(|(_, g)| std::iter::once(1.0).chain(g.iter().copied()).collect())
            .collect(),
        cost: cols.iter().map(|(b, _)| -b).collect(),
        rhs: std::iter::once(1.0).chain(std::iter::repeat_n(0.0, m)).collect(),
    };
    match lp::solve_standard(&lp, simplex)? {
        LpOutcome::Optimal(s) => Ok((-s.objective, s.x, s.duals[1..].iter().map(|y| -y).collect())),
        // A seminorm is bounded below, so neither can happen on valid input.
        LpOutcome::Infeasible { .. } => Err(Error::Solver("minimax LP reported infeasible dual".into())),
        LpOutcome::Unbounded => Err(Error::Solver("minimax LP reported unbounded dual".into())),
    }
}

/// Minimizer of `Σ|c_k|` over `{c : b_j − g_j·c ≤ bound}`, via the dual
/// `min Σ w (bound − b)` s.t. `Σ w g − u⁺ + u⁻ = 0`, `u⁺ + u⁻ ≤ 1`.
fn min_l1_optimal(cols: &[(f64, Vec<f64>)], m: usize, bound: f64, simplex: SimplexOptions) -> Result<Option<Vec<f64>>> {
    let rows = 2 * m;
    let mut columns: Vec<Vec<f64>> = cols
        .iter()
        .map(|(_, g)| g.iter().copied().chain(std::iter::repeat_n(0.0, m)).collect())
        .collect();
    let mut cost: Vec<f64> = cols.iter().map(|(b, _)| bound - b).collect();
    for k in 0..m {
        for (sign, slack) in [(-1.0, false), (1.0, false), (0.0, true)] {
            let mut col = vec![0.0; rows];
            if !slack {
                col[k] = sign;
            }
            col[m + k] = 1.0;
            columns.push(col);
            cost.push(0.0);
        }
    }
    let lp = StandardLp {
        rows,
        columns,
        cost,
        rhs: std::iter::repeat_n(0.0, m).chain(std::iter::repeat_n(1.0, m)).collect(),
    };
    Ok(match lp::solve_standard(&lp, simplex)? {
        LpOutcome::Optimal(s) => Some(s.duals[..m].iter().map(|y| -y).collect()),
        _ => None,
    })
}

/// Snaps a near-optimal vertex onto the exact optimal face: the rows tight
/// at `c` and its zero coordinates are solved as equalities at value `v`,
/// with the smallest correction.
fn polish(cols: &[(f64, Vec<f64>)], v: f64, c: &[f64]) -> Vec<f64> {
    let m = c.len();
    let slack = 1e-9 * v.max(1.0);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for (b, g) in cols {
        let r = b - crate::linalg::dot(g, c);
        if r >= v - slack {
            rows.push(g.clone());
            rhs.push(r - v);
        }
    }
    for (k, &ck) in c.iter().enumerate() {
        if ck.abs() <= 1e-12 {
            rows.push((0..m).map(|i| if i == k { 1.0 } else { 0.0 }).collect());
            rhs.push(-ck);
        }
    }
    if rows.is_empty() {
        return c.to_vec();
    }
    let a = nalgebra::DMatrix::from_fn(rows.len(), m, |i, j| rows[i][j]);
    let (delta, _) = crate::linalg::least_squares(&a, &rhs);
    if delta.iter().any(|d| !d.is_finite() || d.abs() > 1e-8 * (1.0 + v)) {
        return c.to_vec();
    }
    c.iter().zip(&delta).map(|(a, d)| a + d).collect()
}

/// Spread of each coefficient over the (slightly relaxed) optimal set,
/// `max s·c_k` over `{c : b_j − g_j·c ≤ v* + ε}` for `s = ±1`, through the
/// dual `min Σ w (v* + ε − b)` s.t. `Σ w g = −s e_k`, `w ≥ 0`.
fn uniqueness(cols: &[(f64, Vec<f64>)], v: f64, c: &[f64], opts: SimplexOptions) -> Result<(Uniqueness, Option<Vec<f64>>)> {
    let m = c.len();
    let bound = v + 1e-12 * v.max(1.0);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for k in 0..m {
        let mut extent = [0.0; 2];
        for (si, s) in [1.0, -1.0].into_iter().enumerate() {
            let lp = StandardLp {
                rows: m,
                columns: cols.iter().map(|(_, g)| g.clone()).collect(),
                cost: cols.iter().map(|(b, _)| bound - b).collect(),
                rhs: (0..m).map(|i| if i == k { -s } else { 0.0 }).collect(),
            };
            match lp::solve_standard(&lp, opts)? {
                LpOutcome::Optimal(sol) => {
                    extent[si] = sol.objective;
                    let alt: Vec<f64> = sol.duals.iter().map(|y| -y).collect();
                    let dist = alt.iter().zip(c).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                    if best.as_ref().is_none_or(|(d, _)| dist > *d) {
                        best = Some((dist, alt));
                    }
                }
                // Primal unbounded: the optimal set is a ray in direction ±e_k.
                LpOutcome::Infeasible { .. } => return Ok((Uniqueness::NonUnique, None)),
                LpOutcome::Unbounded => return Err(Error::Solver("uniqueness LP unbounded".into())),
            }
        }
        if extent[0] + extent[1] > UNIQUENESS_TOL {
            let alt = best.filter(|(d, _)| *d > UNIQUENESS_TOL / 4.0).map(|(_, a)| a);
            return Ok((Uniqueness::NonUnique, alt));
        }
    }
    Ok((Uniqueness::Unique, None))
}

/// Optimal value only.
pub fn distance(problem: &ApproxProblem) -> Result<f64> {
    Ok(solve_with(problem, ApproxOptions { check_uniqueness: false, ..ApproxOptions::default() })?.value)
}
