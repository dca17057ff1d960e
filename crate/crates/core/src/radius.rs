//! Seminorms `‖L‖_W = sup |x*(Lx)|`, numerical radius engines, active sets,
//! q-numerical radius and numerical-index estimates.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::scalar::{self, coords_from_json, phase, phase_grid, JsonScalar, C64, ONE, ZERO};
use crate::space::{
    canonical_order, signed_closure, DualityPair, Functional, NormSpec, PairSet, ScalarField, Space,
    Vector,
};

/// Grid size of the complex ℓ2 phase sweep before golden-section refinement.
pub const SWEEP_GRID: usize = 720;
const GOLDEN_TOL: f64 = 1e-10;

/// Default active-set tolerance `1e-8·max(1, value)`.
pub fn default_tol(value: f64) -> f64 {
    1e-8 * value.max(1.0)
}

/// Square operator in coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator(pub DMatrix<C64>);

pub type OperatorMatrix = Operator;

impl Operator {
    pub fn real(rows: &[Vec<f64>]) -> Result<Operator> {
        let c: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect()).collect();
        Operator::complex(&c)
    }

    pub fn complex(rows: &[Vec<C64>]) -> Result<Operator> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidInput("operator must have at least one row".into()));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::InvalidInput(format!("operator is not square: row of length {} in {n} rows", r.len())));
        }
        Ok(Operator(DMatrix::from_fn(n, n, |i, j| rows[i][j])))
    }

    pub fn zeros(n: usize) -> Operator {
        Operator(DMatrix::from_element(n, n, ZERO))
    }

    pub fn identity(n: usize) -> Operator {
        Operator(DMatrix::identity(n, n))
    }

    /// Rank-one operator `x ↦ f(x)·v`.
    pub fn rank_one(f: &[C64], v: &[C64]) -> Operator {
        Operator(DMatrix::from_fn(v.len(), f.len(), |i, j| v[i] * f[j]))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn is_real(&self) -> bool {
        self.0.iter().all(|z| z.im == 0.0)
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        Vector(&self.0 * &x.0)
    }

    pub fn scale(&self, c: C64) -> Operator {
        Operator(&self.0 * c)
    }

    pub fn add(&self, other: &Operator) -> Operator {
        Operator(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Operator) -> Operator {
        Operator(&self.0 - &other.0)
    }

    pub fn transpose(&self) -> Operator {
        Operator(self.0.transpose())
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        (&self.0 - &other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn check(&self, space: &Space) -> Result<()> {
        space.check_dim(self.dim())?;
        if space.is_real() && !self.is_real() {
            return Err(Error::InvalidInput("complex operator on a real space".into()));
        }
        Ok(())
    }

    pub fn to_json(&self, complex: bool) -> serde_json::Value {
        serde_json::Value::Array(
            self.0
                .row_iter()
                .map(|r| scalar::coords_to_json(&r.iter().copied().collect::<Vec<_>>(), complex))
                .collect(),
        )
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Operator> {
        let rows = v
            .as_array()
            .ok_or_else(|| Error::InvalidInput("operator must be a list of rows".into()))?
            .iter()
            .map(|r| coords_from_json(r).map_err(|e| Error::InvalidInput(format!("operator row: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Operator::complex(&rows)
    }
}

impl DualityPair {
    /// `x*(T x)`.
    pub fn eval(&self, t: &Operator) -> C64 {
        let (f, x) = (&self.xstar.0, &self.x.0);
        (0..x.len()).map(|j| x[j] * (0..f.len()).map(|i| f[i] * t.0[(i, j)]).sum::<C64>()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Enumeration,
    Eigensweep,
    Sampled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadiusReport {
    pub value: f64,
    pub active: Vec<DualityPair>,
    pub method: Method,
    pub tol: f64,
}

impl RadiusReport {
    pub fn to_json(&self, complex: bool) -> serde_json::Value {
        serde_json::json!({
            "value": self.value,
            "method": self.method,
            "tol": self.tol,
            "active": self.active.iter().map(|p| p.to_json(complex)).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<RadiusReport> {
        let bad = |what: &str| Error::InvalidInput(format!("radius report: bad \"{what}\""));
        Ok(RadiusReport {
            value: v.get("value").and_then(|x| x.as_f64()).ok_or_else(|| bad("value"))?,
            tol: v.get("tol").and_then(|x| x.as_f64()).ok_or_else(|| bad("tol"))?,
            method: serde_json::from_value(v.get("method").cloned().ok_or_else(|| bad("method"))?)
                .map_err(|_| bad("method"))?,
            active: v
                .get("active")
                .and_then(|a| a.as_array())
                .ok_or_else(|| bad("active"))?
                .iter()
                .map(DualityPair::from_json)
                .collect::<Result<_>>()?,
        })
    }
}

/// `max |x*(Tx)|` over the pair list.
pub fn seminorm(t: &Operator, w: &PairSet) -> Result<f64> {
    seminorm_with(Exec::default(), t, w)
}

pub fn seminorm_with(exec: Exec, t: &Operator, w: &PairSet) -> Result<f64> {
    if w.is_empty() {
        return Err(Error::EmptyPairSet);
    }
    if w.dim() != t.dim() {
        return Err(Error::dim(w.dim(), t.dim()));
    }
    Ok(par::max_range(exec, w.len(), |i| w.pairs[i].eval(t).norm()).unwrap_or(0.0))
}

/// `‖L − T‖_W ≤ tol`: the two operators coincide in the seminorm quotient.
pub fn w_equivalent(l: &Operator, t: &Operator, w: &PairSet, tol: f64) -> Result<bool> {
    Ok(seminorm(&l.sub(t), w)? <= tol)
}

/// Operator norm `sup_{‖x‖ ≤ 1} ‖Tx‖`.
pub fn operator_norm(space: &Space, t: &Operator) -> Result<f64> {
    t.check(space)?;
    let m = &t.0;
    Ok(match space.norm_spec() {
        NormSpec::Max => m.row_iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max),
        NormSpec::Sum => m.column_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max),
        NormSpec::Euclidean => m.clone().singular_values().iter().copied().fold(0.0, f64::max),
        NormSpec::Polytope { .. } => {
            let ext = space.extreme_points(1)?;
            let dual = space.dual_extreme_points(1)?;
            ext.iter()
                .flat_map(|v| {
                    let tv = t.apply(v);
                    dual.iter().map(move |f| f.apply(&tv).norm())
                })
                .fold(0.0, f64::max)
        }
    })
}

/// Pairs of the closure of `W` attaining `x*(Tx) = ‖T‖_W` (a real number)
/// within `tol`, in canonical order. Complex pairs are phase-aligned exactly
/// and reduced modulo `(c x*, c̄ x)`.
pub fn active_set(t: &Operator, w: &PairSet, tol: f64) -> Result<Vec<DualityPair>> {
    let v = seminorm(t, w)?;
    active_at(t, w, v, tol)
}

fn active_at(t: &Operator, w: &PairSet, v: f64, tol: f64) -> Result<Vec<DualityPair>> {
    let mut out = Vec::new();
    for p in &w.pairs {
        let z = p.eval(t);
        if z.norm() < v - tol {
            continue;
        }
        match w.field {
            ScalarField::Real => {
                if z.norm() <= tol {
                    out.push(p.clone());
                    out.push(p.rotated(-ONE));
                } else {
                    out.push(p.rotated(if z.re >= 0.0 { ONE } else { -ONE }));
                }
            }
            ScalarField::Complex => {
                if z.norm() <= tol {
                    out.push(p.canonical_phase());
                } else {
                    out.push(p.rotated(phase(z).conj()).canonical_phase());
                }
            }
        }
    }
    if out.is_empty() {
        return Err(Error::Solver("active set is empty; tolerance too small for the attained value".into()));
    }
    Ok(canonical_order(out))
}

#[derive(Debug, Clone, Copy)]
pub struct RadiusOptions {
    /// Phase grid for complex polyhedral enumeration and for free phases in
    /// reported active pairs.
    pub phase_resolution: usize,
    /// Active-set tolerance; `None` selects [`default_tol`].
    pub tol: Option<f64>,
    pub exec: Exec,
}

impl Default for RadiusOptions {
    fn default() -> Self {
        RadiusOptions { phase_resolution: 4, tol: None, exec: Exec::default() }
    }
}

/// `‖T‖_w` with its active set.
pub fn numerical_radius(space: &Space, t: &Operator) -> Result<RadiusReport> {
    numerical_radius_opts(space, t, RadiusOptions::default())
}

pub fn numerical_radius_opts(space: &Space, t: &Operator, opts: RadiusOptions) -> Result<RadiusReport> {
    t.check(space)?;
    match space.norm_spec() {
        NormSpec::Max => Ok(linf_radius(space, t, opts)),
        NormSpec::Sum => {
            let r = linf_radius(space, &t.transpose(), opts);
            let active = r
                .active
                .iter()
                .map(|p| {
                    let swapped = DualityPair::new(Functional(p.x.0.clone()), Vector(p.xstar.0.clone()));
                    if space.is_real() {
                        swapped
                    } else {
                        swapped.canonical_phase()
                    }
                })
                .collect();
            Ok(RadiusReport { active: canonical_order(active), ..r })
        }
        NormSpec::Euclidean => Ok(euclid_radius(space, t, opts)),
        NormSpec::Polytope { .. } => {
            let w = signed_closure(&space.extreme_pair_set(1)?);
            let value = seminorm_with(opts.exec, t, &w)?;
            let tol = opts.tol.unwrap_or_else(|| default_tol(value));
            Ok(RadiusReport { value, active: active_at(t, &w, value, tol)?, method: Method::Enumeration, tol })
        }
    }
}

/// Closed form `max_j (|T_jj| + Σ_{k≠j} |T_jk|)` on ℓ∞.
fn linf_radius(space: &Space, t: &Operator, opts: RadiusOptions) -> RadiusReport {
    let n = t.dim();
    let rows: Vec<f64> = (0..n).map(|j| (0..n).map(|k| t.0[(j, k)].norm()).sum()).collect();
    let value = rows.iter().copied().fold(0.0, f64::max);
    let tol = opts.tol.unwrap_or_else(|| default_tol(value));
    let free: Vec<C64> = if space.is_real() { vec![ONE, -ONE] } else { phase_grid(opts.phase_resolution.max(1)) };
    let mut active = Vec::new();
    for j in (0..n).filter(|&j| rows[j] >= value - tol) {
        // Choices per coordinate for x given x* = e_j (complex) or ±e_j (real).
        let signs: Vec<C64> = if space.is_real() { vec![ONE, -ONE] } else { vec![ONE] };
        for &s in &signs {
            let choices: Vec<Vec<C64>> = (0..n)
                .map(|k| {
                    let c = t.0[(j, k)];
                    if c.norm() > 0.0 {
                        vec![phase(c).conj() * s]
                    } else if k == j && space.is_real() {
                        // x_j = ±1 either way; the closure sign is free when T_jj = 0.
                        vec![s, -s]
                    } else {
                        free.clone()
                    }
                })
                .collect();
            for x in cartesian(&choices) {
                let xstar = Functional::unit(n, j, s);
                active.push(DualityPair::new(xstar, Vector::complex(&x)));
            }
        }
    }
    RadiusReport { value, active: canonical_order(active), method: Method::ClosedForm, tol }
}

fn cartesian(choices: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let mut out = vec![Vec::new()];
    for c in choices {
        out = out
            .into_iter()
            .flat_map(|p| {
                c.iter().map(move |&z| {
                    let mut q = p.clone();
                    q.push(z);
                    q
                })
            })
            .collect();
    }
    out
}

/// Hermitian part of `e^{iθ} T`.
fn hermitian_part(t: &DMatrix<C64>, theta: f64) -> DMatrix<C64> {
    let r = t * C64::from_polar(1.0, theta);
    (&r + r.adjoint()) * C64::new(0.5, 0.0)
}

fn lambda_max(t: &DMatrix<C64>, theta: f64) -> f64 {
    hermitian_part(t, theta).symmetric_eigenvalues().iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// `max_θ λ_max(H(e^{iθ}T))`: grid sweep with golden-section refinement of
/// every grid local maximum that could beat the best grid value.
fn phase_sweep(t: &DMatrix<C64>, exec: Exec) -> (f64, f64) {
    let h = 2.0 * std::f64::consts::PI / SWEEP_GRID as f64;
    let vals = par::map_range(exec, SWEEP_GRID, |k| lambda_max(t, k as f64 * h));
    let best_grid = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lip = t.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut best = (best_grid, vals.iter().position(|&v| v == best_grid).unwrap() as f64 * h);
    for k in 0..SWEEP_GRID {
        let (l, r) = (vals[(k + SWEEP_GRID - 1) % SWEEP_GRID], vals[(k + 1) % SWEEP_GRID]);
        if vals[k] < l || vals[k] < r || vals[k] < best_grid - lip * h {
            continue;
        }
        let (th, v) = golden_max(|th| lambda_max(t, th), (k as f64 - 1.0) * h, (k as f64 + 1.0) * h);
        if v > best.0 {
            best = (v, th);
        }
    }
    best
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > GOLDEN_TOL {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let m = 0.5 * (a + b);
    (m, f(m))
}

fn euclid_radius(space: &Space, t: &Operator, opts: RadiusOptions) -> RadiusReport {
    let (value, active) = if space.is_real() {
        let re = t.0.map(|z| z.re);
        let eig = ((&re + re.transpose()) * 0.5).symmetric_eigen();
        let value = eig.eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max);
        let tol = opts.tol.unwrap_or_else(|| default_tol(value));
        let mut active = Vec::new();
        for (i, l) in eig.eigenvalues.iter().enumerate() {
            if l.abs() < value - tol {
                continue;
            }
            let u: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            let signs: &[f64] = if value <= tol { &[1.0, -1.0] } else if *l >= 0.0 { &[1.0] } else { &[-1.0] };
            for &s in signs {
                for &flip in &[1.0, -1.0] {
                    let x: Vec<f64> = u.iter().map(|c| c * flip).collect();
                    let xs: Vec<f64> = x.iter().map(|c| c * s).collect();
                    active.push(DualityPair::new(Functional::real(&xs), Vector::real(&x)));
                }
            }
        }
        (value, active)
    } else {
        let (value, theta) = phase_sweep(&t.0, opts.exec);
        let tol = opts.tol.unwrap_or_else(|| default_tol(value.max(0.0)));
        let eig = hermitian_part(&t.0, theta).symmetric_eigen();
        let rot = C64::from_polar(1.0, theta);
        let mut active = Vec::new();
        for (i, l) in eig.eigenvalues.iter().enumerate() {
            if *l < value - tol {
                continue;
            }
            let x: DVector<C64> = eig.eigenvectors.column(i).into_owned();
            let xs = x.map(|z| z.conj() * rot);
            active.push(DualityPair::new(Functional(xs), Vector(x)).canonical_phase());
        }
        (value.max(0.0), active)
    };
    let tol = opts.tol.unwrap_or_else(|| default_tol(value));
    RadiusReport { value, active: canonical_order(active), method: Method::Eigensweep, tol }
}

/// `‖T‖_{W_q}` over a deterministic sample of `W_q` followed by one local
/// refinement pass (Euclidean norms).
pub fn q_radius(space: &Space, t: &Operator, q: f64, resolution: usize) -> Result<RadiusReport> {
    t.check(space)?;
    let w = space.q_pairs(q, resolution)?;
    let mut value = seminorm(t, &w)?;
    let mut best_pairs = w.pairs.clone();
    if matches!(space.norm_spec(), NormSpec::Euclidean) {
        let refined = refine_euclid(t, &w, q);
        if refined.1 > value {
            value = refined.1;
            best_pairs = vec![refined.0];
        }
    }
    let exact = w.exact;
    let tol = if exact {
        default_tol(value)
    } else {
        // Lipschitz estimate of the sampling error.
        operator_norm(space, t)? * std::f64::consts::PI / resolution as f64
    };
    let set = PairSet { pairs: best_pairs, ..w };
    let act_tol = if exact { tol } else { default_tol(value) };
    let active = active_at(t, &set, value, act_tol).unwrap_or_default();
    Ok(RadiusReport {
        value,
        active,
        method: Method::Sampled,
        tol,
    })
}

/// Deterministic hill climb from the best sampled pair, keeping `‖x‖ = 1`,
/// `x* = conj(q x + s w)`, `w ⟂ x`.
fn refine_euclid(t: &Operator, w: &PairSet, q: f64) -> (DualityPair, f64) {
    let start = w
        .pairs
        .iter()
        .max_by(|a, b| a.eval(t).norm().total_cmp(&b.eval(t).norm()))
        .expect("non-empty")
        .clone();
    let n = start.x.dim();
    let complex = w.field == ScalarField::Complex;
    let s = (1.0 - q * q).max(0.0).sqrt();
    let u0: Vec<C64> = start.x.coords().to_vec();
    let y: Vec<C64> = start.xstar.coords().iter().map(|z| z.conj()).collect();
    let w0: Vec<C64> = if s > 0.0 { y.iter().zip(&u0).map(|(a, b)| (a - b * q) / s).collect() } else { vec![ZERO; n] };
    let build = |u: &[C64], v: &[C64]| -> DualityPair {
        let un = unit(u.to_vec());
        let proj: C64 = un.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
        let vn: Vec<C64> = v.iter().zip(&un).map(|(b, a)| b - a * proj).collect();
        let vnorm = vn.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let vn: Vec<C64> = if vnorm > 1e-12 { vn.iter().map(|z| z / vnorm).collect() } else { vec![ZERO; n] };
        let xs: Vec<C64> = un.iter().zip(&vn).map(|(a, b)| (a * q + b * s).conj()).collect();
        DualityPair::new(Functional::complex(&xs), Vector::complex(&un))
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x7265_6669_6e65);
    let (mut u, mut v) = (u0, w0);
    let mut best = build(&u, &v);
    let mut best_val = best.eval(t).norm();
    let mut step = 0.1;
    while step > 1e-9 {
        let mut improved = false;
        for _ in 0..4 * n {
            let mut d = || -> Vec<C64> {
                (0..n)
                    .map(|_| {
                        C64::new(rng.random::<f64>() - 0.5, if complex { rng.random::<f64>() - 0.5 } else { 0.0 })
                    })
                    .collect()
            };
            let du = d();
            let dv = d();
            let u2: Vec<C64> = u.iter().zip(&du).map(|(a, b)| a + b * step).collect();
            let v2: Vec<C64> = v.iter().zip(&dv).map(|(a, b)| a + b * step).collect();
            let p = build(&u2, &v2);
            let val = p.eval(t).norm();
            if val > best_val {
                best_val = val;
                best = p;
                u = unit(u2);
                v = v2;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (best, best_val)
}

fn unit(v: Vec<C64>) -> Vec<C64> {
    let r = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / r).collect()
}

/// Upper estimate of `n(X)` with the operator realizing it.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexEstimate {
    pub value: f64,
    pub witness: Operator,
    pub candidates: usize,
}

/// Minimum of `‖T‖_w / ‖T‖` over structured candidates and `trials` seeded
/// random operators. An upper bound for `n(X)`, not its exact value.
pub fn numerical_index(space: &Space, trials: usize, seed: u64) -> Result<IndexEstimate> {
    numerical_index_with(Exec::default(), space, trials, seed)
}

pub fn numerical_index_with(exec: Exec, space: &Space, trials: usize, seed: u64) -> Result<IndexEstimate> {
    let structured = structured_candidates(space);
    let total = structured.len() + trials;
    let complex = !space.is_real();
    let n = space.dim();
    let candidate = |i: usize| -> Operator {
        if i < structured.len() {
            return structured[i].clone();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream((i - structured.len()) as u64);
        Operator(DMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.random::<f64>() * 2.0 - 1.0, if complex { rng.random::<f64>() * 2.0 - 1.0 } else { 0.0 })
        }))
    };
    let opts = RadiusOptions { exec: Exec::Sequential, ..RadiusOptions::default() };
    let ratio = |i: usize| -> f64 {
        let t = candidate(i);
        let op = operator_norm(space, &t).unwrap_or(0.0);
        if op < 1e-12 {
            return f64::INFINITY;
        }
        match numerical_radius_opts(space, &t, opts) {
            Ok(r) => r.value / op,
            Err(_) => f64::INFINITY,
        }
    };
    // Probe once sequentially so unsupported spaces surface their error.
    numerical_radius_opts(space, &candidate(0), opts)?;
    let (idx, value) = par::argmin_range(exec, total, ratio).expect("at least one candidate");
    Ok(IndexEstimate { value: value.min(1.0), witness: candidate(idx), candidates: total })
}

fn structured_candidates(space: &Space) -> Vec<Operator> {
    let n = space.dim();
    let mut out = vec![Operator::identity(n)];
    let real_op = |f: &dyn Fn(usize, usize) -> f64| Operator(DMatrix::from_fn(n, n, |i, j| C64::new(f(i, j), 0.0)));
    // Cyclic shift and nilpotent shift.
    out.push(real_op(&|i, j| if j == (i + 1) % n { 1.0 } else { 0.0 }));
    if n > 1 {
        out.push(real_op(&|i, j| if j == i + 1 { 1.0 } else { 0.0 }));
    }
    // Transpositions and skew rotations in each coordinate plane.
    for a in 0..n {
        for b in a + 1..n {
            out.push(real_op(&|i, j| {
                if (i, j) == (a, b) || (i, j) == (b, a) || (i == j && i != a && i != b) {
                    1.0
                } else {
                    0.0
                }
            }));
            out.push(real_op(&|i, j| {
                if (i, j) == (a, b) {
                    1.0
                } else if (i, j) == (b, a) {
                    -1.0
                } else {
                    0.0
                }
            }));
        }
    }
    // Alternating diagonal.
    out.push(real_op(&|i, j| if i == j { if i % 2 == 0 { 1.0 } else { -1.0 } } else { 0.0 }));
    out
}

/// Support points of the numerical range: for each direction `θ` on a grid
/// of `samples` angles, a value `λ = x*(Tx)` maximizing `re(e^{−iθ}λ)`.
pub fn range_support_points(space: &Space, t: &Operator, samples: usize, resolution: usize) -> Result<Vec<(f64, C64)>> {
    t.check(space)?;
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be positive".into()));
    }
    let thetas: Vec<f64> = (0..samples).map(|k| 2.0 * std::f64::consts::PI * k as f64 / samples as f64).collect();
    match space.norm_spec() {
        NormSpec::Euclidean => Ok(thetas
            .iter()
            .map(|&th| {
                let eig = hermitian_part(&t.0, -th).symmetric_eigen();
                let i = (0..eig.eigenvalues.len())
                    .max_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]))
                    .expect("non-empty");
                let x = eig.eigenvectors.column(i).into_owned();
                let lam = (x.adjoint() * &t.0 * &x)[(0, 0)];
                (th, lam)
            })
            .collect()),
        _ => {
            let pairs = space.extreme_pairs(resolution)?;
            let vals: Vec<C64> = pairs.iter().map(|p| p.eval(t)).collect();
            Ok(thetas
                .iter()
                .map(|&th| {
                    let d = C64::from_polar(1.0, -th);
                    let best = vals
                        .iter()
                        .copied()
                        .reduce(|a, b| if (d * b).re > (d * a).re { b } else { a })
                        .expect("non-empty");
                    (th, best)
                })
                .collect())
        }
    }
}

/// Pair set used by approximation problems: `auto-extreme` or an explicit list.
pub fn auto_pairs(space: &Space, resolution: usize) -> Result<PairSet> {
    space.extreme_pair_set(resolution)
}

/// Scalars written as JSON numbers when real.
pub fn scalar_json(z: C64) -> serde_json::Value {
    serde_json::to_value(JsonScalar(z)).expect("scalar serializes")
}
