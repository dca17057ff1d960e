//! Minimal numerical-radius extensions and projections onto subspaces.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::approx::{self, ApproxOptions, ApproxProblem, OperatorSubspace, Uniqueness};
use crate::certify::{self, Certificate, SubaReport, Verdict};
use crate::error::{Error, Result};
use crate::linalg::{self, symmetric_vertices};
use crate::lp::{LpBuilder, LpOutcome, Relation, SimplexOptions, VarKind};
use crate::par::{self, Exec};
use crate::radius::{self, Operator};
use crate::scalar::{coords_from_json, coords_to_json, C64, ONE, ZERO};
use crate::space::{DualityPair, Functional, NormSpec, ScalarField, Space, Vector};

/// A subspace `V ⊂ X` with a basis and a basis of its annihilator.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    n: usize,
    basis: Vec<Vec<C64>>,
    annihilator: Vec<Vec<C64>>,
}

impl Subspace {
    pub fn from_basis(n: usize, basis: Vec<Vec<C64>>) -> Result<Subspace> {
        check_vectors(n, &basis)?;
        let rows = DMatrix::from_fn(basis.len().max(1), n, |i, j| basis.get(i).map_or(ZERO, |v| v[j]));
        let annihilator = if basis.is_empty() {
            (0..n).map(|j| unit(n, j)).collect()
        } else {
            linalg::null_space(&rows, 1e-12).into_iter().map(|v| tidy(v.as_slice())).collect()
        };
        let s = Subspace { n, basis, annihilator };
        s.check_independent()?;
        Ok(s)
    }

    /// `V = ∩ ker f` over the given functionals.
    pub fn kernel_of(n: usize, functionals: Vec<Vec<C64>>) -> Result<Subspace> {
        check_vectors(n, &functionals)?;
        let rows = DMatrix::from_fn(functionals.len().max(1), n, |i, j| functionals.get(i).map_or(ZERO, |v| v[j]));
        if linalg::rank(&rows, 1e-12) < functionals.len() {
            return Err(Error::Degenerate("kernel functionals are linearly dependent".into()));
        }
        let basis = linalg::null_space(&rows, 1e-12).into_iter().map(|v| tidy(v.as_slice())).collect();
        Ok(Subspace { n, basis, annihilator: functionals })
    }

    /// Explicit basis and annihilator; checked for consistency.
    pub fn with_annihilator(n: usize, basis: Vec<Vec<C64>>, annihilator: Vec<Vec<C64>>) -> Result<Subspace> {
        check_vectors(n, &basis)?;
        check_vectors(n, &annihilator)?;
        if basis.len() + annihilator.len() != n {
            return Err(Error::InvalidInput("basis and annihilator dimensions must add up to the space dimension".into()));
        }
        for f in &annihilator {
            for v in &basis {
                let z: C64 = f.iter().zip(v).map(|(a, b)| a * b).sum();
                if z.norm() > 1e-12 {
                    return Err(Error::InvalidInput("annihilator functional does not vanish on the basis".into()));
                }
            }
        }
        let s = Subspace { n, basis, annihilator };
        s.check_independent()?;
        Ok(s)
    }

    fn check_independent(&self) -> Result<()> {
        let m = DMatrix::from_fn(self.basis.len().max(1), self.n, |i, j| self.basis.get(i).map_or(ZERO, |v| v[j]));
        if !self.basis.is_empty() && linalg::rank(&m, 1e-12) < self.basis.len() {
            return Err(Error::Degenerate("subspace basis is linearly dependent".into()));
        }
        Ok(())
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<C64>] {
        &self.basis
    }

    pub fn annihilator(&self) -> &[Vec<C64>] {
        &self.annihilator
    }

    /// `n × k` matrix with the basis as columns.
    pub fn matrix(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.n, self.basis.len(), |i, j| self.basis[j][i])
    }

    /// Left inverse `(VᴴV)⁻¹Vᴴ`.
    fn left_inverse(&self) -> DMatrix<C64> {
        let v = self.matrix();
        let g = v.adjoint() * &v;
        g.try_inverse().expect("independent basis") * v.adjoint()
    }

    pub fn to_json(&self, complex: bool) -> serde_json::Value {
        serde_json::json!({
            "basis": self.basis.iter().map(|v| coords_to_json(v, complex)).collect::<Vec<_>>(),
        })
    }

    /// `{"basis": [[...]]}` or `{"kernel_of": [...] | [[...]]}`. A list of
    /// length-`n` vectors takes priority over a single vector.
    pub fn from_json(v: &serde_json::Value, n: usize) -> Result<Subspace> {
        let parse = |x: &serde_json::Value| coords_from_json(x).map_err(|e| Error::InvalidInput(e.to_string()));
        let list = |x: &serde_json::Value| -> Result<Vec<Vec<C64>>> {
            let arr = x.as_array().ok_or_else(|| Error::InvalidInput("expected a list".into()))?;
            let as_list: Option<Vec<Vec<C64>>> =
                arr.iter().map(|e| parse(e).ok().filter(|c| c.len() == n)).collect();
            match as_list {
                Some(l) if !l.is_empty() => Ok(l),
                _ => Ok(vec![parse(x)?]),
            }
        };
        if let Some(b) = v.get("basis") {
            Subspace::from_basis(n, list(b)?)
        } else if let Some(k) = v.get("kernel_of") {
            Subspace::kernel_of(n, list(k)?)
        } else {
            Err(Error::InvalidInput("subspace needs \"basis\" or \"kernel_of\"".into()))
        }
    }
}

fn check_vectors(n: usize, vs: &[Vec<C64>]) -> Result<()> {
    match vs.iter().find(|v| v.len() != n) {
        Some(v) => Err(Error::dim(n, v.len())),
        None => Ok(()),
    }
}

fn unit(n: usize, j: usize) -> Vec<C64> {
    (0..n).map(|i| if i == j { ONE } else { ZERO }).collect()
}

fn tidy(v: &[C64]) -> Vec<C64> {
    v.iter()
        .map(|z| C64::new(if z.re.abs() < 1e-15 { 0.0 } else { z.re }, if z.im.abs() < 1e-15 { 0.0 } else { z.im }))
        .collect()
}

fn proper(v: &Subspace) -> Result<()> {
    if v.dim() == 0 || v.dim() >= v.ambient_dim() {
        return Err(Error::Precondition(format!(
            "V must be a proper nontrivial subspace (dim {} in dim {})",
            v.dim(),
            v.ambient_dim()
        )));
    }
    Ok(())
}

/// Basis `{f_j(·) v_i}` of operators `X → V` vanishing on `V`, realified over ℂ.
pub fn annihilator_basis(x: &Space, v: &Subspace) -> Result<OperatorSubspace> {
    x.check_dim(v.ambient_dim())?;
    proper(v)?;
    let ops = v
        .annihilator()
        .iter()
        .flat_map(|f| v.basis().iter().map(move |b| Operator::rank_one(f, b)))
        .collect();
    OperatorSubspace::over(x.field(), x.dim(), ops)
}

/// `V` with the norm inherited from a real space, as a polytope space in
/// basis coordinates.
pub fn induced_space(x: &Space, v: &Subspace) -> Result<Space> {
    if !x.is_real() {
        return Err(Error::Capability("induced norms are computed for real spaces only".into()));
    }
    if matches!(x.norm_spec(), NormSpec::Euclidean) {
        return Err(Error::Capability("induced Euclidean norms are not polytopes".into()));
    }
    let k = v.dim();
    let vm = v.matrix().map(|z| z.re);
    let normals: Vec<Vec<f64>> = x
        .dual_extreme_points(1)?
        .iter()
        .map(|f| {
            let fr = DVector::from_iterator(x.dim(), f.coords().iter().map(|z| z.re));
            (vm.transpose() * fr).iter().copied().collect::<Vec<f64>>()
        })
        .filter(|h: &Vec<f64>| h.iter().any(|c| c.abs() > 1e-14))
        .collect();
    let verts = symmetric_vertices(&normals, k, 1e-9);
    Space::polytope(verts)
}

/// `‖A‖` and `‖A‖_w` for `A : V → V` in the inherited norm.
fn norms_on_subspace(x: &Space, v: &Subspace, a: &Operator) -> Result<(f64, f64)> {
    if x.is_real() {
        let iv = induced_space(x, v)?;
        Ok((radius::operator_norm(&iv, a)?, radius::numerical_radius(&iv, a)?.value))
    } else {
        // Scalar multiples of the identity: ‖c·id‖ = ‖c·id‖_w = |c|.
        let c = if a.dim() == 0 { ZERO } else { a.0[(0, 0)] };
        if a.max_abs_diff(&Operator::identity(a.dim()).scale(c)) <= 1e-12 {
            Ok((c.norm(), c.norm()))
        } else {
            Err(Error::Capability("‖A‖ on complex subspaces is supported for scalar multiples of id only".into()))
        }
    }
}

/// `V·A·(VᴴV)⁻¹Vᴴ`: extends `A` by zero on the orthogonal complement.
pub fn default_extension(v: &Subspace, a: &Operator) -> Operator {
    Operator(v.matrix() * &a.0 * v.left_inverse())
}

fn check_extension(v: &Subspace, a: &Operator, a0: &Operator) -> Result<()> {
    let vm = v.matrix();
    let restr = (&a0.0 * &vm - &vm * &a.0).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let scale = a0.0.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if restr > 1e-12 * scale {
        return Err(Error::Precondition(format!("A₀ does not restrict to A on V (error {restr:.2e})")));
    }
    let proj = &vm * v.left_inverse();
    let out = (&a0.0 - &proj * &a0.0).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if out > 1e-10 * scale {
        return Err(Error::Precondition(format!("A₀ does not map into V (error {out:.2e})")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
pub struct ExtendOptions {
    pub phase_resolution: usize,
    pub compute_suba: bool,
    pub exec: Exec,
}

impl Default for ExtendOptions {
    fn default() -> Self {
        ExtendOptions { phase_resolution: 4, compute_suba: true, exec: Exec::default() }
    }
}

#[derive(Debug, Clone)]
pub struct ExtensionResult {
    pub minimizer: Operator,
    /// `λ_w^A = ‖minimizer‖_w`.
    pub lambda_w: f64,
    /// `‖A‖` on `V`.
    pub op_norm_a: f64,
    /// `‖A‖_w` on `V`.
    pub radius_a: f64,
    pub unique: Uniqueness,
    pub alternative: Option<Operator>,
    /// Coefficients of `A₀ − minimizer` in the annihilator basis.
    pub coeffs: Vec<f64>,
    pub problem: ApproxProblem,
    /// Reduced optimality certificate for the correction.
    pub certificate: Option<Certificate>,
    pub suba: Option<SubaReport>,
    /// Why `suba` is absent, when it was requested.
    pub suba_error: Option<String>,
}

impl ExtensionResult {
    pub fn to_json(&self) -> serde_json::Value {
        let complex = self.problem.space.field() == ScalarField::Complex;
        serde_json::json!({
            "minimizer": self.minimizer.to_json(complex),
            "lambda_w": self.lambda_w,
            "op_norm_a": self.op_norm_a,
            "radius_a": self.radius_a,
            "unique": self.unique,
            "alternative": self.alternative.as_ref().map(|a| a.to_json(complex)),
            "certificate": self.certificate.as_ref().map(|c| c.to_json(complex)),
            "suba": self.suba.as_ref().map(|s| s.to_json(complex)),
            "suba_error": self.suba_error,
        })
    }
}

/// Extension of `A : V → V` to `X → V` of least numerical radius.
pub fn minimal_extension(x: &Space, v: &Subspace, a: &Operator, a0: Option<&Operator>, opts: ExtendOptions) -> Result<ExtensionResult> {
    x.check_dim(v.ambient_dim())?;
    proper(v)?;
    if a.dim() != v.dim() {
        return Err(Error::dim(v.dim(), a.dim()));
    }
    let a0 = match a0 {
        Some(op) => {
            op.check(x)?;
            check_extension(v, a, op)?;
            op.clone()
        }
        None => default_extension(v, a),
    };
    let (op_norm_a, radius_a) = norms_on_subspace(x, v, a)?;
    if radius_a <= 1e-12 {
        return Err(Error::Degenerate("‖A‖_w = 0 on V; the seminorm need not be a norm on the extension family".into()));
    }
    let family = annihilator_basis(x, v)?;
    let problem = ApproxProblem::with_extreme_pairs(x.clone(), a0.clone(), family, opts.phase_resolution)?;
    let sol = approx::solve_with(&problem, ApproxOptions { exec: opts.exec, ..ApproxOptions::default() })?;
    let minimizer = a0.sub(&sol.l);
    let alternative = sol.alternative.as_ref().map(|c| a0.sub(&problem.family.combine(c)));
    let m = problem.family.len();
    let certificate = match certify::best_approx_certificate(&problem, &sol.l, None) {
        Ok(c) if c.verdict == Verdict::Optimal => Some(certify::caratheodory_reduce(&c, m)?),
        Ok(c) => Some(c),
        Err(_) => None,
    };
    let (suba, suba_error) = if opts.compute_suba {
        match certify::suba_constant(&problem, &sol.l, None) {
            Ok(s) => (Some(s), None),
            Err(e) => (None, Some(e.to_string())),
        }
    } else {
        (None, None)
    };
    Ok(ExtensionResult {
        minimizer,
        lambda_w: sol.value,
        op_norm_a,
        radius_a,
        unique: sol.unique,
        alternative,
        coeffs: sol.coeffs,
        problem,
        certificate,
        suba,
        suba_error,
    })
}

/// Projection onto `V` of least numerical radius.
pub fn minimal_projection(x: &Space, v: &Subspace, opts: ExtendOptions) -> Result<ExtensionResult> {
    minimal_extension(x, v, &Operator::identity(v.dim()), None, opts)
}

/// `1 + (Σ_{i≥2} f_i/(1 − 2f_i))⁻¹` for `V = ker f ⊂ ℓ∞ⁿ`,
/// `f = (0, f₂, …, f_n)`, `f_i > 0`, `Σ f_i = 1`, `f_i < 1/2`.
pub fn linf_hyperplane_lambda(f: &[f64], n: usize) -> Result<f64> {
    if f.len() != n {
        return Err(Error::dim(n, f.len()));
    }
    if n < 2 || f[0].abs() > 1e-12 {
        return Err(Error::Precondition("f must have the form (0, f₂, …, f_n)".into()));
    }
    if let Some(&bad) = f[1..].iter().find(|&&fi| !(fi > 0.0 && fi < 0.5)) {
        return Err(Error::Precondition(format!("coordinate {bad} is outside (0, 1/2)")));
    }
    let total: f64 = f.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!("coordinates sum to {total}, not 1")));
    }
    Ok(1.0 + 1.0 / f[1..].iter().map(|fi| fi / (1.0 - 2.0 * fi)).sum::<f64>())
}

/// The two projections `x − f(x)y` and `x − f(x)z` onto `ker f ⊂ ℓ∞ⁿ`
/// attaining [`linf_hyperplane_lambda`]: `y_i = (λ−1)/(1−2f_i)`, `y₁ = λ−1`,
/// `z = (0, y₂, …, y_n)`.
pub fn linf_hyperplane_projections(f: &[f64]) -> Result<(Operator, Operator)> {
    let n = f.len();
    let lam = linf_hyperplane_lambda(f, n)?;
    let y: Vec<f64> = (0..n).map(|i| (lam - 1.0) / (1.0 - 2.0 * f[i])).collect();
    let mut z = y.clone();
    z[0] = 0.0;
    let fc: Vec<C64> = f.iter().map(|&a| C64::new(a, 0.0)).collect();
    let proj = |w: &[f64]| {
        let wc: Vec<C64> = w.iter().map(|&a| C64::new(a, 0.0)).collect();
        Operator::identity(n).sub(&Operator::rank_one(&fc, &wc))
    };
    Ok((proj(&y), proj(&z)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormCheck {
    pub holds: bool,
    pub samples: usize,
    /// Smallest `‖E‖_w / ‖E‖_max` over the sampled elements.
    pub min_ratio: f64,
    /// Pair realizing `x*(E x) ≠ 0` for `E ∈ Z_A` with a nonzero `A₀` part.
    pub extension_witness: Option<bool>,
    /// Pairs realizing `x*(E x) ≠ 0` for each annihilator basis element.
    pub annihilator_witness: Option<bool>,
}

/// Checks that `‖·‖_w` is a norm on `Z_A = span[A₀] ⊕ B_V(X, V)` by
/// sampling, plus explicit witness pairs for polyhedral norms.
pub fn seminorm_is_norm_check(x: &Space, v: &Subspace, a: &Operator, a0: Option<&Operator>, trials: usize, seed: u64) -> Result<NormCheck> {
    let (_, radius_a) = norms_on_subspace(x, v, a)?;
    if radius_a <= 1e-12 {
        return Err(Error::Precondition("‖A‖_w must be positive on V".into()));
    }
    let a0 = match a0 {
        Some(op) => {
            check_extension(v, a, op)?;
            op.clone()
        }
        None => default_extension(v, a),
    };
    let family = annihilator_basis(x, v)?;
    let pairs = x.extreme_pair_set(4)?;
    let floor = |e: &Operator| 10.0 * f64::EPSILON * x.dim() as f64 * e.0.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_ratio = f64::INFINITY;
    let mut holds = true;
    let mut samples = 0;
    for _ in 0..trials {
        let alpha: f64 = rng.random::<f64>() * 2.0 - 1.0;
        let c: Vec<f64> = (0..family.len()).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let e = a0.scale(C64::new(alpha, 0.0)).add(&family.combine(&c));
        let size = e.0.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if size == 0.0 {
            continue;
        }
        samples += 1;
        let w = radius::seminorm(&e, &pairs)?;
        min_ratio = min_ratio.min(w / size);
        if w <= floor(&e) {
            holds = false;
        }
    }

    let (mut extension_witness, mut annihilator_witness) = (None, None);
    if x.is_real() && x.is_polyhedral() {
        extension_witness = Some(hahn_banach_witness(x, v, a, &a0)?);
        let ok = family.basis().iter().all(|b| annihilator_pair(x, v, b).is_some_and(|p| p.eval(b).norm() > floor(b)));
        annihilator_witness = Some(ok);
        holds &= extension_witness == Some(true) && ok;
    }
    Ok(NormCheck { holds, samples, min_ratio: if samples == 0 { 0.0 } else { min_ratio }, extension_witness, annihilator_witness })
}

/// Pair `(x*, x)` on `X` with `x*(A₀x) ≠ 0`: a pair `(v*, v)` on `V` with
/// `v*(Av) ≠ 0`, whose functional is extended norm-preservingly to `X`.
fn hahn_banach_witness(x: &Space, v: &Subspace, a: &Operator, a0: &Operator) -> Result<bool> {
    let iv = induced_space(x, v)?;
    let report = radius::numerical_radius(&iv, a)?;
    let Some(pv) = report.active.first() else { return Ok(false) };
    let vm = v.matrix().map(|z| z.re);
    let vstar: Vec<f64> = pv.xstar.coords().iter().map(|z| z.re).collect();
    // min Σ|λ_i| subject to (Σ λ_i f_i)∘V = v*, over the dual vertices f_i.
    let dual = x.dual_extreme_points(1)?;
    let k = v.dim();
    let mut lp = LpBuilder::new();
    let vars: Vec<usize> = dual.iter().map(|_| lp.var(VarKind::NonNegative, 1.0)).collect();
    for r in 0..k {
        let coeffs: Vec<f64> = dual
            .iter()
            .map(|f| (0..x.dim()).map(|i| f.coords()[i].re * vm[(i, r)]).sum())
            .collect();
        lp.constraint(coeffs, Relation::Eq, vstar[r]);
    }
    let sol = match lp.minimize(SimplexOptions::default())? {
        LpOutcome::Optimal(s) => s,
        _ => return Ok(false),
    };
    if sol.objective > 1.0 + 1e-9 {
        return Ok(false);
    }
    let xs: Vec<f64> = (0..x.dim())
        .map(|i| vars.iter().zip(&dual).map(|(&j, f)| sol.x[j] * f.coords()[i].re).sum())
        .collect();
    let xv: Vec<f64> = (vm * DVector::from_iterator(k, pv.x.coords().iter().map(|z| z.re))).iter().copied().collect();
    let pair = DualityPair::new(Functional::real(&xs), Vector::real(&xv));
    let ok_pair = (x.dual_norm(&pair.xstar)? - 1.0).abs() < 1e-9
        && (x.norm(&pair.x)? - 1.0).abs() < 1e-9
        && (pair.pairing.re - 1.0).abs() < 1e-9;
    Ok(ok_pair && pair.eval(a0).norm() > 1e-12)
}

/// For `E ≠ 0` vanishing on `V`: an extreme point `u` with `Eu ≠ 0`, moved
/// along `V` as `x = (u + βv)/‖u + βv‖` until its peak functional sees `Ex`.
fn annihilator_pair(x: &Space, v: &Subspace, e: &Operator) -> Option<DualityPair> {
    let ext = x.extreme_points(1).ok()?;
    let u = ext.iter().find(|u| e.apply(u).coords().iter().any(|z| z.norm() > 1e-12))?;
    for vb in v.basis() {
        for k in 0..=64 {
            let beta = -4.0 + 8.0 * k as f64 / 64.0;
            let y: Vec<C64> = u.coords().iter().zip(vb).map(|(a, b)| a + b * beta).collect();
            let yv = Vector::complex(&y);
            let nrm = x.norm(&yv).ok()?;
            if nrm < 1e-12 {
                continue;
            }
            let xv = Vector::complex(&y.iter().map(|z| z / nrm).collect::<Vec<_>>());
            let f = x.peak_functional(&xv).ok()?;
            let p = DualityPair::new(f, xv);
            if p.eval(e).norm() > 1e-12 {
                return Some(p);
            }
        }
    }
    x.extreme_pairs(1).ok()?.into_iter().find(|p| p.eval(e).norm() > 1e-12)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproCheck {
    pub label: String,
    pub expected: f64,
    pub computed: f64,
    pub tol: f64,
    pub pass: bool,
}

impl ReproCheck {
    fn new(label: &str, expected: f64, computed: f64, tol: f64) -> Self {
        ReproCheck { label: label.into(), expected, computed, tol, pass: (expected - computed).abs() <= tol }
    }

    fn flag(label: &str, ok: bool) -> Self {
        ReproCheck::new(label, 1.0, if ok { 1.0 } else { 0.0 }, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproEntry {
    pub name: String,
    pub checks: Vec<ReproCheck>,
    pub pass: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproReport {
    pub entries: Vec<ReproEntry>,
    pub pass: bool,
}

/// Runs the reference constructions end to end against their known values.
pub fn reference_examples() -> ReproReport {
    type Case = fn() -> Result<Vec<ReproCheck>>;
    let cases: [(&str, Case); 4] = [
        ("linf3_norm_one_projections", norm_one_case),
        ("linf4_hyperplane_projections", || hyperplane_case(&[0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0])),
        ("linf5_hyperplane_projections", || hyperplane_case(&[0.0, 0.25, 0.25, 0.25, 0.25])),
        ("complex_linf3_averaging_projection", complex_case),
    ];
    let entries = par::map(Exec::default(), &cases, |(name, f)| match f() {
        Ok(checks) => {
            ReproEntry { name: name.to_string(), pass: checks.iter().all(|c| c.pass), checks, error: None }
        }
        Err(e) => ReproEntry { name: name.to_string(), checks: Vec::new(), pass: false, error: Some(e.to_string()) },
    });
    ReproReport { pass: entries.iter().all(|e| e.pass), entries }
}

fn real(v: &[f64]) -> Vec<C64> {
    v.iter().map(|&a| C64::new(a, 0.0)).collect()
}

fn norm_one_case() -> Result<Vec<ReproCheck>> {
    let x = Space::max(3, ScalarField::Real)?;
    let v = Subspace::kernel_of(3, vec![real(&[1.0, 1.0, 0.0])])?;
    let res = minimal_projection(&x, &v, ExtendOptions { compute_suba: false, ..ExtendOptions::default() })?;
    let p1 = Operator::identity(3).sub(&Operator::rank_one(&real(&[1.0, 1.0, 0.0]), &real(&[1.0, 0.0, 0.0])));
    let p2 = Operator::identity(3).sub(&Operator::rank_one(&real(&[1.0, 1.0, 0.0]), &real(&[0.0, 1.0, 0.0])));
    let w1 = radius::numerical_radius(&x, &p1)?.value;
    let w2 = radius::numerical_radius(&x, &p2)?.value;
    let distinct = 1 + usize::from(res.unique == Uniqueness::NonUnique) + usize::from(p1.max_abs_diff(&p2) > 0.5);
    Ok(vec![
        ReproCheck::new("value", 1.0, res.lambda_w, 1e-12),
        ReproCheck::new("norm_w(P1)", 1.0, w1, 1e-12),
        ReproCheck::new("norm_w(P2)", 1.0, w2, 1e-12),
        ReproCheck::new("norm(P1)", 1.0, radius::operator_norm(&x, &p1)?, 1e-12),
        ReproCheck::new("norm(P2)", 1.0, radius::operator_norm(&x, &p2)?, 1e-12),
        ReproCheck::flag("solver_non_unique", res.unique == Uniqueness::NonUnique),
        ReproCheck::new("distinct_minimizers", 2.0, distinct.min(2) as f64, 0.0),
    ])
}

fn hyperplane_case(f: &[f64]) -> Result<Vec<ReproCheck>> {
    let n = f.len();
    let lam = linf_hyperplane_lambda(f, n)?;
    let x = Space::max(n, ScalarField::Real)?;
    let v = Subspace::kernel_of(n, vec![real(f)])?;
    let res = minimal_projection(&x, &v, ExtendOptions { compute_suba: false, ..ExtendOptions::default() })?;
    let (p1, p2) = linf_hyperplane_projections(f)?;
    let is_projection = |p: &Operator| {
        let idem = (&p.0 * &p.0 - &p.0).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-12;
        let onto = v.basis().iter().all(|b| (&p.0 * DVector::from_column_slice(b) - DVector::from_column_slice(b)).norm() < 1e-12);
        idem && onto
    };
    Ok(vec![
        ReproCheck::new("lambda_vs_lp", lam, res.lambda_w, 1e-8),
        ReproCheck::new("norm_w(P1)", lam, radius::numerical_radius(&x, &p1)?.value, 1e-12),
        ReproCheck::new("norm_w(P2)", lam, radius::numerical_radius(&x, &p2)?.value, 1e-12),
        ReproCheck::flag("P1_is_projection", is_projection(&p1)),
        ReproCheck::flag("P2_is_projection", is_projection(&p2)),
        ReproCheck::flag("P1_ne_P2", p1.max_abs_diff(&p2) > 1e-6),
        ReproCheck::flag("solver_non_unique", res.unique == Uniqueness::NonUnique),
    ])
}

/// `P = I − J/3` on complex ℓ∞³ with its certificate data.
pub fn averaging_projection() -> Operator {
    let third = C64::new(1.0 / 3.0, 0.0);
    Operator::identity(3).sub(&Operator::rank_one(&[third; 3], &[ONE; 3]))
}

fn complex_case() -> Result<Vec<ReproCheck>> {
    let x = Space::max(3, ScalarField::Complex)?;
    let p = averaging_projection();
    let rep = radius::numerical_radius(&x, &p)?;
    let v = Subspace::with_annihilator(3, vec![real(&[1.0, -1.0, 0.0]), real(&[0.0, 1.0, -1.0])], vec![real(&[1.0 / 3.0; 3])])?;
    let res = minimal_extension(&x, &v, &Operator::identity(2), Some(&p), ExtendOptions::default())?;
    let cert = res.certificate.as_ref().ok_or_else(|| Error::Solver("no certificate".into()))?;
    let weights_ok = cert.atoms.len() == 3 && cert.atoms.iter().all(|a| (a.weight - 1.0 / 3.0).abs() < 1e-12);
    let r = res.suba.as_ref().map_or(f64::NAN, |s| s.r);
    Ok(vec![
        ReproCheck::new("norm_w(P)", 4.0 / 3.0, rep.value, 1e-12),
        ReproCheck::new("active_pairs", 3.0, rep.active.len() as f64, 0.0),
        ReproCheck::new("lambda_w", 4.0 / 3.0, res.lambda_w, 1e-9),
        ReproCheck::new("minimizer_is_P", 0.0, res.minimizer.max_abs_diff(&p), 1e-9),
        ReproCheck::flag("certificate_optimal", cert.verdict == Verdict::Optimal),
        ReproCheck::flag("certificate_residual", cert.residual <= 1e-12),
        ReproCheck::flag("weights_one_third", weights_ok),
        ReproCheck::new("k0", 3.0, cert.k as f64, 0.0),
        ReproCheck::new("suba_r", 0.0, r, 0.0),
    ])
}
