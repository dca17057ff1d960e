//! Optimality certificates for best approximations: zero in the convex hull
//! of restricted active functionals, Carathéodory reduction, descent
//! directions, and strong-unicity constants.

use serde::{Deserialize, Serialize};

use crate::approx::{ApproxProblem, OperatorSubspace};
use crate::error::{Error, Result};
use crate::linalg::{self, Combinations};
use crate::lp::{self, LpBuilder, LpOutcome, Relation, SimplexOptions, StandardLp, VarKind};
use crate::radius::{self, Operator};
use crate::space::DualityPair;

/// Residual bound for `Σ a_j g_j = 0`.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Coordinates closer than this are the same restricted functional.
pub const MERGE_TOL: f64 = 1e-10;
/// Largest vertex enumeration attempted for strong-unicity constants.
pub const MAX_SUBA_SUBSETS: f64 = 1e5;
const MAX_K0_SUBSETS: f64 = 2e4;

/// `g_k = re(x*(B_k x))` over the family basis.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedFunctional {
    pub pair: DualityPair,
    pub g: Vec<f64>,
}

pub fn restrict(pair: &DualityPair, family: &OperatorSubspace) -> RestrictedFunctional {
    RestrictedFunctional { pair: pair.clone(), g: family.basis().iter().map(|b| pair.eval(b).re).collect() }
}

impl RestrictedFunctional {
    /// `g(U)` for family coordinates `u`.
    pub fn apply(&self, u: &[f64]) -> f64 {
        linalg::dot(&self.g, u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Optimal,
    NotOptimal,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub functional: RestrictedFunctional,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub verdict: Verdict,
    pub atoms: Vec<Atom>,
    /// `‖Σ a_j g_j‖_∞`.
    pub residual: f64,
    pub k: usize,
    /// Every active restricted functional.
    pub candidates: Vec<RestrictedFunctional>,
    /// Family coordinates `U` with `g_j(U) > 0` on all active pairs.
    pub descent: Option<Vec<f64>>,
    /// `‖T − L‖_W`.
    pub value: f64,
    pub tol: f64,
    /// Active pairs that narrowly missed the tolerance.
    pub near_active: usize,
}

impl Certificate {
    pub fn to_json(&self, complex: bool) -> serde_json::Value {
        serde_json::json!({
            "verdict": self.verdict,
            "atoms": self.atoms.iter().map(|a| serde_json::json!({
                "pair": a.functional.pair.to_json(complex),
                "g": a.functional.g,
                "weight": a.weight,
            })).collect::<Vec<_>>(),
            "residual": self.residual,
            "k": self.k,
            "value": self.value,
            "tol": self.tol,
            "descent": self.descent,
        })
    }

    /// Whether the atoms' restricted functionals are pairwise linearly
    /// independent.
    pub fn pairwise_independent(&self) -> bool {
        pairwise_independent(&self.atoms.iter().map(|a| a.functional.g.clone()).collect::<Vec<_>>())
    }
}

pub fn pairwise_independent(gs: &[Vec<f64>]) -> bool {
    (0..gs.len()).all(|i| (i + 1..gs.len()).all(|j| linalg::rank_real(&[gs[i].clone(), gs[j].clone()], 1e-9) == 2))
}

fn residual_of(atoms: &[Atom], m: usize) -> f64 {
    (0..m)
        .map(|k| atoms.iter().map(|a| a.weight * a.functional.g[k]).sum::<f64>().abs())
        .fold(0.0, f64::max)
}

/// Checks `L` against the criterion `0 ∈ conv{g_j : j active for T − L}`.
///
/// `tol` defaults to the active-set tolerance `1e-8·max(1, ‖T − L‖_W)`.
pub fn best_approx_certificate(problem: &ApproxProblem, l: &Operator, tol: Option<f64>) -> Result<Certificate> {
    let family = &problem.family;
    let m = family.len();
    let (_, off) = family.coordinates(&l.sub(&problem.offset));
    let scale = l.0.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if off > 1e-9 * scale {
        return Err(Error::Precondition(format!("L is not in the affine family (residual {off:.3e})")));
    }
    let residual_op = problem.target.sub(l);
    let value = radius::seminorm(&residual_op, &problem.pairs)?;
    let tol = tol.unwrap_or_else(|| radius::default_tol(value));
    let active = radius::active_set(&residual_op, &problem.pairs, tol)?;
    let near_active = problem
        .pairs
        .pairs
        .iter()
        .map(|p| p.eval(&residual_op).norm())
        .filter(|&z| z < value - tol && z >= value - 10.0 * tol)
        .count();
    let candidates: Vec<RestrictedFunctional> = active.iter().map(|p| restrict(p, family)).collect();

    let lp = StandardLp {
        rows: m + 1,
        columns: candidates.iter().map(|c| std::iter::once(1.0).chain(c.g.iter().copied()).collect()).collect(),
        cost: vec![0.0; candidates.len()],
        rhs: std::iter::once(1.0).chain(std::iter::repeat_n(0.0, m)).collect(),
    };
    let (mut verdict, atoms, descent) = match lp::solve_standard(&lp, SimplexOptions::default())? {
        LpOutcome::Optimal(sol) => {
            let atoms: Vec<Atom> = candidates
                .iter()
                .zip(&sol.x)
                .filter(|(_, &w)| w > 1e-14)
                .map(|(c, &w)| Atom { functional: c.clone(), weight: w })
                .collect();
            (Verdict::Optimal, atoms, None)
        }
        LpOutcome::Infeasible { farkas } => {
            let u: Vec<f64> = farkas[1..].iter().map(|y| -y).collect();
            let top = u.iter().map(|x| x.abs()).fold(0.0, f64::max);
            let u = if top > 0.0 { u.iter().map(|x| x / top).collect() } else { u };
            (Verdict::NotOptimal, Vec::new(), Some(u))
        }
        LpOutcome::Unbounded => return Err(Error::Solver("feasibility LP unbounded".into())),
    };
    let residual = residual_of(&atoms, m);
    if verdict == Verdict::Optimal && residual > RESIDUAL_TOL {
        verdict = Verdict::Inconclusive;
    }
    if verdict == Verdict::NotOptimal && (near_active > 0 || !problem.pairs.exact) {
        verdict = Verdict::Inconclusive;
    }
    if verdict == Verdict::Optimal && !problem.pairs.exact {
        verdict = Verdict::Inconclusive;
    }
    Ok(Certificate { verdict, k: atoms.len(), atoms, residual, candidates, descent, value, tol, near_active })
}

/// Shrinks an optimal certificate to at most `m + 1` atoms and then to the
/// smallest atom count `k₀` supporting `0 ∈ conv{g_j}`.
pub fn caratheodory_reduce(cert: &Certificate, m: usize) -> Result<Certificate> {
    if cert.verdict != Verdict::Optimal {
        return Err(Error::Precondition("Carathéodory reduction needs an optimal certificate".into()));
    }
    // Merge atoms with coincident functionals.
    let mut atoms: Vec<Atom> = Vec::new();
    for a in &cert.atoms {
        match atoms.iter_mut().find(|b| close(&b.functional.g, &a.functional.g)) {
            Some(b) => b.weight += a.weight,
            None => atoms.push(a.clone()),
        }
    }
    // Classical reduction along affine dependences.
    while atoms.len() > m + 1 {
        let k = atoms.len();
        let mat = nalgebra::DMatrix::from_fn(m + 1, k, |i, j| {
            crate::scalar::C64::new(if i == 0 { 1.0 } else { atoms[j].functional.g[i - 1] }, 0.0)
        });
        let null = linalg::null_space(&mat, 1e-12);
        let Some(mu) = null.first() else { break };
        let mu: Vec<f64> = mu.iter().map(|z| z.re).collect();
        let mu = if mu.iter().any(|&x| x > 1e-14) { mu } else { mu.iter().map(|x| -x).collect() };
        let t = atoms
            .iter()
            .zip(&mu)
            .filter(|(_, &u)| u > 1e-14)
            .map(|(a, &u)| a.weight / u)
            .fold(f64::INFINITY, f64::min);
        for (a, u) in atoms.iter_mut().zip(&mu) {
            a.weight -= t * u;
        }
        atoms.retain(|a| a.weight > 1e-14);
    }
    // Smallest supporting subset among all distinct active functionals.
    let mut pool: Vec<RestrictedFunctional> = Vec::new();
    for c in &cert.candidates {
        if !pool.iter().any(|p| close(&p.g, &c.g)) {
            pool.push(c.clone());
        }
    }
    let total: f64 = (1..=atoms.len()).map(|s| linalg::binomial(pool.len(), s)).sum();
    if total > MAX_K0_SUBSETS {
        pool = atoms.iter().map(|a| a.functional.clone()).collect();
    }
    'search: for s in 1..atoms.len() {
        for idx in Combinations::new(pool.len(), s) {
            let sub: Vec<&RestrictedFunctional> = idx.iter().map(|&i| &pool[i]).collect();
            if let Some(w) = convex_zero(&sub, m)? {
                atoms = sub.iter().zip(w).map(|(f, w)| Atom { functional: (*f).clone(), weight: w }).collect();
                break 'search;
            }
        }
    }
    let residual = residual_of(&atoms, m);
    Ok(Certificate { k: atoms.len(), atoms, residual, ..cert.clone() })
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= MERGE_TOL)
}

/// Strictly positive convex weights with `Σ w g = 0`, if they exist.
fn convex_zero(fs: &[&RestrictedFunctional], m: usize) -> Result<Option<Vec<f64>>> {
    let lp = StandardLp {
        rows: m + 1,
        columns: fs.iter().map(|c| std::iter::once(1.0).chain(c.g.iter().copied()).collect()).collect(),
        cost: vec![0.0; fs.len()],
        rhs: std::iter::once(1.0).chain(std::iter::repeat_n(0.0, m)).collect(),
    };
    Ok(match lp::solve_standard(&lp, SimplexOptions::default())? {
        LpOutcome::Optimal(sol) if sol.x.iter().all(|&w| w > 1e-12) && residual_weights(fs, &sol.x, m) <= RESIDUAL_TOL => {
            Some(sol.x)
        }
        _ => None,
    })
}

fn residual_weights(fs: &[&RestrictedFunctional], w: &[f64], m: usize) -> f64 {
    (0..m).map(|k| fs.iter().zip(w).map(|(f, a)| a * f.g[k]).sum::<f64>().abs()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    /// Vertex of `{h ≤ 1}` attaining the largest seminorm (`r > 0`).
    Vertex,
    /// Direction with `g_j(L₀) ≥ 0` on every active pair (`r = 0`).
    Direction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubaReport {
    pub r: f64,
    /// The proof's `s`, equal to `−r`.
    pub s: f64,
    pub kind: WitnessKind,
    pub witness: Vec<f64>,
    pub witness_operator: Operator,
    pub vertices: usize,
    pub certificate: Certificate,
}

impl SubaReport {
    pub fn to_json(&self, complex: bool) -> serde_json::Value {
        serde_json::json!({
            "r": self.r,
            "s": self.s,
            "witness": {
                "kind": self.kind,
                "coefficients": self.witness,
                "operator": self.witness_operator.to_json(complex),
            },
            "vertices": self.vertices,
        })
    }
}

/// Strong-unicity constant `r = 1 / max{‖U‖_W : h(U) ≤ 1}` with
/// `h(U) = max_j(−g_j(U))` over active restricted functionals.
pub fn suba_constant(problem: &ApproxProblem, l: &Operator, tol: Option<f64>) -> Result<SubaReport> {
    let m = problem.family.len();
    if m == 0 {
        return Err(Error::Precondition("the family has no approximation directions".into()));
    }
    let cert = best_approx_certificate(problem, l, tol)?;
    if cert.verdict != Verdict::Optimal {
        return Err(Error::Precondition(format!("L is not certified optimal (verdict {:?})", cert.verdict)));
    }
    let mut gs: Vec<Vec<f64>> = Vec::new();
    for c in &cert.candidates {
        if !gs.iter().any(|g| close(g, &c.g)) {
            gs.push(c.g.clone());
        }
    }
    let op_norm = |u: &[f64]| radius::seminorm(&problem.family.combine(u), &problem.pairs);

    if let Some(dir) = recession_direction(&gs, m)? {
        let nrm = op_norm(&dir)?;
        let dir: Vec<f64> = if nrm > 0.0 { dir.iter().map(|x| x / nrm).collect() } else { dir };
        return Ok(SubaReport {
            r: 0.0,
            s: 0.0,
            kind: WitnessKind::Direction,
            witness_operator: problem.family.combine(&dir),
            witness: dir,
            vertices: 0,
            certificate: cert,
        });
    }

    let subsets = linalg::binomial(gs.len(), m);
    if subsets > MAX_SUBA_SUBSETS {
        return Err(Error::Capability(format!(
            "{subsets} vertex candidates for the strong-unicity polytope exceed the exact enumeration limit"
        )));
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut vertices = 0;
    for idx in Combinations::new(gs.len(), m) {
        let a = nalgebra::DMatrix::from_fn(m, m, |i, k| -gs[idx[i]][k]);
        let Some(u) = linalg::solve_real(&a, &vec![1.0; m]) else { continue };
        if gs.iter().any(|g| -linalg::dot(g, &u) > 1.0 + 1e-9) {
            continue;
        }
        vertices += 1;
        let val = op_norm(&u)?;
        if best.as_ref().is_none_or(|(b, _)| val > *b) {
            best = Some((val, u));
        }
    }
    let (top, u) = best.ok_or_else(|| Error::Solver("strong-unicity polytope has no vertices".into()))?;
    let r = if top > 0.0 { 1.0 / top } else { f64::INFINITY };
    Ok(SubaReport {
        r,
        s: -r,
        kind: WitnessKind::Vertex,
        witness_operator: problem.family.combine(&u),
        witness: u,
        vertices,
        certificate: cert,
    })
}

/// Nonzero `U` with `g_j(U) ≥ 0` for all `j`, if the cone is non-trivial.
fn recession_direction(gs: &[Vec<f64>], m: usize) -> Result<Option<Vec<f64>>> {
    let mat = nalgebra::DMatrix::from_fn(gs.len().max(1), m, |i, k| {
        crate::scalar::C64::new(gs.get(i).map_or(0.0, |g| g[k]), 0.0)
    });
    if let Some(v) = linalg::null_space(&mat, 1e-10).first() {
        let u: Vec<f64> = v.iter().map(|z| z.re).collect();
        let top = u.iter().map(|x| x.abs()).fold(0.0, f64::max);
        return Ok(Some(u.iter().map(|x| x / top).collect()));
    }
    // max Σ g_j(U) over g_j(U) ≥ 0, |U_k| ≤ 1.
    let mut b = LpBuilder::new();
    let sum: Vec<f64> = (0..m).map(|k| gs.iter().map(|g| g[k]).sum()).collect();
    let vars: Vec<usize> = (0..m).map(|k| b.var(VarKind::Free, -sum[k])).collect();
    for g in gs {
        b.constraint(g.clone(), Relation::Ge, 0.0);
    }
    for &v in &vars {
        let mut e = vec![0.0; m];
        e[v] = 1.0;
        b.constraint(e.clone(), Relation::Le, 1.0);
        b.constraint(e, Relation::Ge, -1.0);
    }
    match b.minimize(SimplexOptions::default())? {
        LpOutcome::Optimal(sol) if -sol.objective > 1e-9 => Ok(Some(sol.x[..m].to_vec())),
        LpOutcome::Optimal(_) => Ok(None),
        _ => Err(Error::Solver("recession LP failed".into())),
    }
}
