//! Finite-dimensional normed spaces, their duals and the normalized duality
//! pairs `(x*, x)` that index numerical-radius-type seminorms.
//!
//! Functionals act bilinearly on coordinates: `f(x) = Σ fᵢ xᵢ`, with no
//! conjugation. Complex extreme points are represented on a phase grid of
//! configurable resolution.

use std::collections::HashSet;
use std::sync::Arc;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, rank_real, symmetric_vertices};
use crate::lp::{self, LpOutcome, SimplexOptions, StandardLp};
use crate::scalar::{self, coords_from_json, coords_to_json, phase, phase_grid, C64, ONE, ZERO};

/// Default phase resolution for complex closures.
pub const DEFAULT_PHASE_RESOLUTION: usize = 360;
/// Coordinate tolerance for pair deduplication.
pub const DEDUP_TOL: f64 = 1e-12;
/// Tolerance for membership tests `x*(x) = 1`, `‖x‖ = 1`.
pub const PAIR_TOL: f64 = 1e-10;
/// Largest complex extreme-pair enumeration we are willing to materialize.
pub const MAX_ENUMERATION: usize = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarField {
    Real,
    Complex,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NormSpec {
    /// ℓ∞
    Max,
    /// ℓ1
    Sum,
    /// ℓ2
    Euclidean,
    /// Minkowski gauge of the convex hull of a symmetric vertex set (real only).
    Polytope { vertices: Vec<Vec<f64>> },
}

#[derive(Debug)]
struct PolytopeCache {
    /// Extreme points of the unit ball, lexicographically sorted.
    extreme: Vec<Vec<f64>>,
    /// Extreme points of the dual unit ball (facet normals), sorted.
    dual_extreme: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct Space {
    dim: usize,
    field: ScalarField,
    norm: NormSpec,
    poly: Option<Arc<PolytopeCache>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vector(pub DVector<C64>);

#[derive(Debug, Clone, PartialEq)]
pub struct Functional(pub DVector<C64>);

impl Vector {
    pub fn real(coords: &[f64]) -> Self {
        Vector(DVector::from_iterator(coords.len(), coords.iter().map(|&x| C64::new(x, 0.0))))
    }

    pub fn complex(coords: &[C64]) -> Self {
        Vector(DVector::from_column_slice(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[C64] {
        self.0.as_slice()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| *z == ZERO)
    }
}

impl Functional {
    pub fn real(coords: &[f64]) -> Self {
        Functional(Vector::real(coords).0)
    }

    pub fn complex(coords: &[C64]) -> Self {
        Functional(DVector::from_column_slice(coords))
    }

    pub fn unit(dim: usize, j: usize, scale: C64) -> Self {
        let mut v = DVector::from_element(dim, ZERO);
        v[j] = scale;
        Functional(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[C64] {
        self.0.as_slice()
    }

    /// Bilinear evaluation `Σ fᵢ xᵢ`.
    pub fn apply(&self, x: &Vector) -> C64 {
        self.0.iter().zip(x.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn scaled(&self, c: C64) -> Functional {
        Functional(self.0.map(|z| z * c))
    }
}

/// A normalized pair `(x*, x)` with cached `x*(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualityPair {
    pub xstar: Functional,
    pub x: Vector,
    pub pairing: C64,
}

impl DualityPair {
    pub fn new(xstar: Functional, x: Vector) -> Self {
        let pairing = xstar.apply(&x);
        DualityPair { xstar, x, pairing }
    }

    pub fn rotated(&self, c: C64) -> DualityPair {
        DualityPair::new(self.xstar.scaled(c), self.x.clone())
    }

    /// Representative modulo `(x*, x) ~ (c x*, c̄ x)`, `|c| = 1`, which leaves
    /// the tensor `x* ⊗ x` unchanged: the first non-negligible coordinate of
    /// `x*` is made real and positive.
    pub fn canonical_phase(&self) -> DualityPair {
        let top = self.xstar.0.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let Some(lead) = self.xstar.0.iter().find(|z| z.norm() > 1e-9 * top.max(1e-300)) else {
            return self.clone();
        };
        let c = phase(*lead).conj();
        let snap = |z: C64| {
            C64::new(
                if z.re.abs() < 1e-15 { 0.0 } else { z.re },
                if z.im.abs() < 1e-15 { 0.0 } else { z.im },
            )
        };
        let xstar = Functional(self.xstar.0.map(|z| snap(z * c)));
        let x = Vector(self.x.0.map(|z| snap(z * c.conj())));
        DualityPair::new(xstar, x)
    }

    fn key(&self) -> Vec<i64> {
        self.xstar
            .0
            .iter()
            .chain(self.x.0.iter())
            .flat_map(|z| [quantize(z.re), quantize(z.im)])
            .collect()
    }

    pub fn to_json(&self, complex: bool) -> serde_json::Value {
        serde_json::json!({
            "xstar": coords_to_json(self.xstar.coords(), complex),
            "x": coords_to_json(self.x.coords(), complex),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<DualityPair> {
        let get = |k: &str| {
            v.get(k)
                .ok_or_else(|| Error::InvalidInput(format!("pair is missing \"{k}\"")))
                .and_then(|c| coords_from_json(c).map_err(|e| Error::InvalidInput(e.to_string())))
        };
        let xs = get("xstar")?;
        let x = get("x")?;
        if xs.len() != x.len() {
            return Err(Error::dim(xs.len(), x.len()));
        }
        Ok(DualityPair::new(Functional::complex(&xs), Vector::complex(&x)))
    }
}

fn quantize(x: f64) -> i64 {
    (x / DEDUP_TOL).round() as i64
}

fn pair_cmp(a: &DualityPair, b: &DualityPair) -> std::cmp::Ordering {
    scalar::lex_cmp(a.xstar.coords(), b.xstar.coords()).then_with(|| scalar::lex_cmp(a.x.coords(), b.x.coords()))
}

/// Sorts pairs lexicographically on `(x*, x)` and removes duplicates.
pub fn canonical_order(pairs: Vec<DualityPair>) -> Vec<DualityPair> {
    let mut seen = HashSet::new();
    let mut out: Vec<DualityPair> = pairs.into_iter().filter(|p| seen.insert(p.key())).collect();
    out.sort_by(pair_cmp);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum PairSetKind {
    /// Pairs with `x*(x) = 1` on the unit spheres.
    NumericalRadius,
    /// Pairs with `x*(x) = q`.
    Q(f64),
    /// User-supplied pairs, no pairing constraint assumed.
    Explicit,
}

/// Finite index set `W` of a seminorm `‖L‖_W = sup |x*(Lx)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSet {
    pub kind: PairSetKind,
    pub field: ScalarField,
    pub pairs: Vec<DualityPair>,
    /// Already invariant under the sign (real) or phase-grid (complex) closure.
    pub closed: bool,
    /// Phase-grid resolution used for complex closures.
    pub resolution: usize,
    /// `false` when the list is a sample of a continuum.
    pub exact: bool,
}

impl PairSet {
    pub fn new(kind: PairSetKind, field: ScalarField, pairs: Vec<DualityPair>, resolution: usize, exact: bool) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptyPairSet);
        }
        if resolution == 0 {
            return Err(Error::InvalidInput("phase resolution must be positive".into()));
        }
        Ok(PairSet { kind, field, pairs, closed: false, resolution, exact })
    }

    pub fn explicit(field: ScalarField, pairs: Vec<DualityPair>) -> Result<Self> {
        PairSet::new(PairSetKind::Explicit, field, pairs, DEFAULT_PHASE_RESOLUTION, true)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.pairs[0].x.dim()
    }

    /// Rotations applied lazily to represent the closure `Z` (complex) or
    /// `Z_ℝ` (real) of this set without materializing it.
    pub fn closure_phases(&self) -> Vec<C64> {
        if self.closed {
            vec![ONE]
        } else {
            match self.field {
                ScalarField::Real => vec![ONE, -ONE],
                ScalarField::Complex => phase_grid(self.resolution),
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let complex = self.field == ScalarField::Complex;
        serde_json::Value::Array(self.pairs.iter().map(|p| p.to_json(complex)).collect())
    }
}

/// Closure of a pair set under `x* ↦ −x*` (real) or `x* ↦ e^{iθ}x*` on the
/// phase grid (complex). Idempotent.
pub fn signed_closure(pairs: &PairSet) -> PairSet {
    if pairs.closed {
        return pairs.clone();
    }
    let phases = pairs.closure_phases();
    let all = pairs
        .pairs
        .iter()
        .flat_map(|p| phases.iter().map(move |&c| p.rotated(c)))
        .collect();
    PairSet { pairs: canonical_order(all), closed: true, ..pairs.clone() }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct NormJson {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vertices: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SpaceJson {
    dim: usize,
    field: ScalarField,
    norm: NormJson,
}

impl Space {
    pub fn new(dim: usize, field: ScalarField, norm: NormSpec) -> Result<Space> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        let poly = match &norm {
            NormSpec::Polytope { vertices } => {
                if field == ScalarField::Complex {
                    return Err(Error::Capability("polytope norms are supported over the reals only".into()));
                }
                Some(Arc::new(polytope_cache(dim, vertices)?))
            }
            _ => None,
        };
        Ok(Space { dim, field, norm, poly })
    }

    pub fn max(dim: usize, field: ScalarField) -> Result<Space> {
        Space::new(dim, field, NormSpec::Max)
    }

    pub fn sum(dim: usize, field: ScalarField) -> Result<Space> {
        Space::new(dim, field, NormSpec::Sum)
    }

    pub fn euclidean(dim: usize, field: ScalarField) -> Result<Space> {
        Space::new(dim, field, NormSpec::Euclidean)
    }

    /// Real polytope norm from a symmetric vertex list.
    pub fn polytope(vertices: Vec<Vec<f64>>) -> Result<Space> {
        let dim = vertices.first().map_or(0, Vec::len);
        Space::new(dim, ScalarField::Real, NormSpec::Polytope { vertices })
    }

    /// Real polytope norm whose unit ball is `conv{±p}` over the given
    /// points; interior and non-extreme points are discarded.
    pub fn polytope_hull(points: &[Vec<f64>]) -> Result<Space> {
        let dim = points.first().map_or(0, Vec::len);
        if dim == 0 || points.iter().any(|p| p.len() != dim) {
            return Err(Error::InvalidInput("points must share a positive dimension".into()));
        }
        if rank_real(points, 1e-10) < dim {
            return Err(Error::Degenerate("points do not span the space".into()));
        }
        let dual = symmetric_vertices(&half(points), dim, 1e-9);
        let ext = symmetric_vertices(&half(&dual), dim, 1e-9);
        let snapped = ext
            .iter()
            .map(|e| {
                points
                    .iter()
                    .flat_map(|p| [p.clone(), p.iter().map(|x| -x).collect::<Vec<_>>()])
                    .find(|p| p.iter().zip(e).all(|(a, b)| (a - b).abs() < 1e-7))
                    .unwrap_or_else(|| e.clone())
            })
            .collect();
        Space::polytope(snapped)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    pub fn norm_spec(&self) -> &NormSpec {
        &self.norm
    }

    pub fn is_real(&self) -> bool {
        self.field == ScalarField::Real
    }

    /// Norm is polyhedral (finitely many extreme points in the real case).
    pub fn is_polyhedral(&self) -> bool {
        !matches!(self.norm, NormSpec::Euclidean)
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if n == self.dim {
            Ok(())
        } else {
            Err(Error::dim(self.dim, n))
        }
    }

    fn check_coords(&self, c: &[C64]) -> Result<()> {
        self.check_dim(c.len())?;
        if self.is_real() && c.iter().any(|z| z.im != 0.0) {
            return Err(Error::InvalidInput("complex coordinates in a real space".into()));
        }
        Ok(())
    }

    /// `‖x‖`. Polytope norms are evaluated as the Minkowski gauge of the
    /// vertex hull by a small LP.
    pub fn norm(&self, x: &Vector) -> Result<f64> {
        self.check_coords(x.coords())?;
        let c = x.coords();
        Ok(match &self.norm {
            NormSpec::Max => c.iter().map(|z| z.norm()).fold(0.0, f64::max),
            NormSpec::Sum => c.iter().map(|z| z.norm()).sum(),
            NormSpec::Euclidean => c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
            NormSpec::Polytope { .. } => {
                if x.is_zero() {
                    return Ok(0.0);
                }
                let ext = &self.poly.as_ref().expect("polytope cache").extreme;
                let lp = StandardLp {
                    rows: self.dim,
                    columns: ext.clone(),
                    cost: vec![1.0; ext.len()],
                    rhs: c.iter().map(|z| z.re).collect(),
                };
                match lp::solve_standard(&lp, SimplexOptions::default())? {
                    LpOutcome::Optimal(s) => s.objective,
                    _ => return Err(Error::Solver("gauge LP failed".into())),
                }
            }
        })
    }

    /// `‖x‖` through the facet description `max_f |f(x)|`; agrees with
    /// [`Space::norm`] and is LP-free.
    pub fn norm_fast(&self, x: &[C64]) -> f64 {
        match &self.norm {
            NormSpec::Polytope { .. } => self
                .poly
                .as_ref()
                .expect("polytope cache")
                .dual_extreme
                .iter()
                .map(|f| f.iter().zip(x).map(|(a, b)| a * b.re).sum::<f64>().abs())
                .fold(0.0, f64::max),
            _ => self.norm(&Vector::complex(x)).unwrap_or(f64::NAN),
        }
    }

    /// `‖f‖* = sup_{‖x‖≤1} |f(x)|`.
    pub fn dual_norm(&self, f: &Functional) -> Result<f64> {
        self.check_coords(f.coords())?;
        let c = f.coords();
        Ok(match &self.norm {
            NormSpec::Max => c.iter().map(|z| z.norm()).sum(),
            NormSpec::Sum => c.iter().map(|z| z.norm()).fold(0.0, f64::max),
            NormSpec::Euclidean => c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
            NormSpec::Polytope { .. } => self
                .poly
                .as_ref()
                .expect("polytope cache")
                .extreme
                .iter()
                .map(|v| v.iter().zip(c).map(|(a, b)| a * b.re).sum::<f64>().abs())
                .fold(0.0, f64::max),
        })
    }

    /// An extreme point `f` of the dual ball with `f(x) = ‖x‖`. Ties go to
    /// the first attaining coordinate (ℓ∞) or the lexicographically
    /// smallest dual vertex (polytopes).
    pub fn peak_functional(&self, x: &Vector) -> Result<Functional> {
        self.check_coords(x.coords())?;
        if x.is_zero() {
            return Err(Error::Degenerate("peak functional of the zero vector".into()));
        }
        let c = x.coords();
        let n = self.dim;
        Ok(match &self.norm {
            NormSpec::Max => {
                let m = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
                let j = c.iter().position(|z| z.norm() >= m * (1.0 - 1e-12)).expect("max attained");
                Functional::unit(n, j, phase(c[j]).conj())
            }
            NormSpec::Sum => Functional::complex(&c.iter().map(|&z| phase(z).conj()).collect::<Vec<_>>()),
            NormSpec::Euclidean => {
                let r = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                Functional::complex(&c.iter().map(|z| z.conj() / r).collect::<Vec<_>>())
            }
            NormSpec::Polytope { .. } => {
                let dual = &self.poly.as_ref().expect("polytope cache").dual_extreme;
                let val = |f: &Vec<f64>| f.iter().zip(c).map(|(a, b)| a * b.re).sum::<f64>();
                let best = dual.iter().map(val).fold(f64::NEG_INFINITY, f64::max);
                let f = dual.iter().find(|f| val(f) >= best - 1e-10 * best.abs().max(1.0)).expect("dual vertex");
                Functional::real(f)
            }
        })
    }

    /// Extreme points of the unit ball. Complex ℓ∞/ℓ1 use the phase grid.
    pub fn extreme_points(&self, resolution: usize) -> Result<Vec<Vector>> {
        self.polyhedral_points(resolution, false)
    }

    /// Extreme points of the dual unit ball.
    pub fn dual_extreme_points(&self, resolution: usize) -> Result<Vec<Functional>> {
        Ok(self
            .polyhedral_points(resolution, true)?
            .into_iter()
            .map(|v| Functional(v.0))
            .collect())
    }

    fn polyhedral_points(&self, resolution: usize, dual: bool) -> Result<Vec<Vector>> {
        let n = self.dim;
        let grid = self.grid(resolution)?;
        let axes = |scale: &[C64]| -> Vec<Vector> {
            (0..n)
                .flat_map(|j| {
                    scale.iter().map(move |&s| {
                        let mut v = DVector::from_element(n, ZERO);
                        v[j] = s;
                        Vector(v)
                    })
                })
                .collect()
        };
        let corners = |g: &[C64]| -> Result<Vec<Vector>> {
            let count = (g.len() as f64).powi(n as i32);
            if count > MAX_ENUMERATION as f64 {
                return Err(Error::Capability(format!(
                    "{count} extreme points at this phase resolution; lower the resolution or sample pairs instead"
                )));
            }
            Ok(product(n, g).into_iter().map(|c| Vector::complex(&c)).collect())
        };
        let mut pts = match (&self.norm, dual) {
            (NormSpec::Max, false) | (NormSpec::Sum, true) => corners(&grid)?,
            (NormSpec::Max, true) | (NormSpec::Sum, false) => axes(&grid),
            (NormSpec::Polytope { .. }, _) => {
                let cache = self.poly.as_ref().expect("polytope cache");
                let list = if dual { &cache.dual_extreme } else { &cache.extreme };
                list.iter().map(|v| Vector::real(v)).collect()
            }
            (NormSpec::Euclidean, _) => {
                return Err(Error::Capability(
                    "the Euclidean ball has a continuum of extreme points; use q_pairs sampling".into(),
                ))
            }
        };
        pts.sort_by(|a, b| scalar::lex_cmp(a.coords(), b.coords()));
        Ok(pts)
    }

    fn grid(&self, resolution: usize) -> Result<Vec<C64>> {
        match self.field {
            ScalarField::Real => Ok(vec![-ONE, ONE]),
            ScalarField::Complex => {
                if resolution == 0 {
                    return Err(Error::InvalidInput("phase resolution must be positive".into()));
                }
                Ok(phase_grid(resolution))
            }
        }
    }

    /// All pairs `(x*, x)` of extreme points with `x*(x) = 1`.
    pub fn extreme_pairs(&self, resolution: usize) -> Result<Vec<DualityPair>> {
        let n = self.dim;
        let grid = self.grid(resolution)?;
        let m = grid.len();
        let count = n as f64 * (m as f64).powi(n as i32);
        let mut pairs = Vec::new();
        match &self.norm {
            NormSpec::Max | NormSpec::Sum => {
                if count > MAX_ENUMERATION as f64 {
                    return Err(Error::Capability(format!(
                        "{count} extreme pairs at phase resolution {resolution}; lower the resolution or use q_pairs sampling"
                    )));
                }
                let others = product(n - 1, &grid);
                for j in 0..n {
                    for &w in &grid {
                        let axis = Functional::unit(n, j, w);
                        for rest in &others {
                            let mut full = rest.clone();
                            full.insert(j, w.conj());
                            let corner = Vector::complex(&full);
                            let pair = if self.norm == NormSpec::Max {
                                DualityPair::new(axis.clone(), corner)
                            } else {
                                DualityPair::new(Functional(corner.0), Vector(axis.0.clone()))
                            };
                            pairs.push(pair);
                        }
                    }
                }
            }
            NormSpec::Polytope { .. } => {
                let cache = self.poly.as_ref().expect("polytope cache");
                for f in &cache.dual_extreme {
                    for v in &cache.extreme {
                        if (linalg::dot(f, v) - 1.0).abs() <= 1e-9 {
                            pairs.push(DualityPair::new(Functional::real(f), Vector::real(v)));
                        }
                    }
                }
            }
            NormSpec::Euclidean => {
                return Err(Error::Capability(
                    "extreme pairs of the Euclidean ball form a continuum; use q_pairs sampling".into(),
                ))
            }
        }
        Ok(canonical_order(pairs))
    }

    /// Extreme pairs wrapped as a numerical-radius [`PairSet`].
    pub fn extreme_pair_set(&self, resolution: usize) -> Result<PairSet> {
        PairSet::new(PairSetKind::NumericalRadius, self.field, self.extreme_pairs(resolution)?, resolution.max(1), true)
    }

    /// Deterministic finite sample of `W_q = {(x*, x) : ‖x‖ = ‖x*‖ = 1, x*(x) = q}`.
    pub fn q_pairs(&self, q: f64, resolution: usize) -> Result<PairSet> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::Precondition(format!("q = {q} is outside (0, 1]")));
        }
        if resolution == 0 {
            return Err(Error::InvalidInput("resolution must be positive".into()));
        }
        let pairs = match self.norm {
            NormSpec::Euclidean => self.euclidean_q_pairs(q, resolution),
            _ => self.polyhedral_q_pairs(q, resolution)?,
        };
        let exact = q == 1.0 && self.is_polyhedral() && self.is_real();
        PairSet::new(PairSetKind::Q(q), self.field, canonical_order(pairs), resolution, exact)
    }

    fn euclidean_q_pairs(&self, q: f64, resolution: usize) -> Vec<DualityPair> {
        let n = self.dim;
        let s = (1.0 - q * q).max(0.0).sqrt();
        let mut out = Vec::new();
        let mut emit = |u: &[C64], w: Option<&[C64]>| {
            let y: Vec<C64> = match w {
                Some(w) => u.iter().zip(w).map(|(a, b)| a * q + b * s).collect(),
                None => u.to_vec(),
            };
            let xstar = Functional::complex(&y.iter().map(|z| z.conj()).collect::<Vec<_>>());
            out.push(DualityPair::new(xstar, Vector::complex(u)));
        };
        if n == 1 {
            // Only q = 1 is attainable on a line.
            if q == 1.0 {
                for &g in &self.grid(resolution).unwrap_or_else(|_| vec![ONE]) {
                    emit(&[g], None);
                }
            }
            return out;
        }
        if n == 2 && self.is_real() {
            for k in 0..resolution {
                let t = 2.0 * std::f64::consts::PI * k as f64 / resolution as f64;
                let u = [C64::new(t.cos(), 0.0), C64::new(t.sin(), 0.0)];
                if q == 1.0 {
                    emit(&u, None);
                } else {
                    for sgn in [1.0, -1.0] {
                        let w = [C64::new(-t.sin() * sgn, 0.0), C64::new(t.cos() * sgn, 0.0)];
                        emit(&u, Some(&w));
                    }
                }
            }
            return out;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ (n as u64) << 8 ^ resolution as u64 ^ q.to_bits());
        let complex = !self.is_real();
        let draw = |rng: &mut ChaCha8Rng| -> Vec<C64> {
            (0..n)
                .map(|_| {
                    let re: f64 = rng.random::<f64>() * 2.0 - 1.0;
                    let im = if complex { rng.random::<f64>() * 2.0 - 1.0 } else { 0.0 };
                    C64::new(re, im)
                })
                .collect()
        };
        for _ in 0..resolution {
            let u = normalize(draw(&mut rng));
            if q == 1.0 {
                emit(&u, None);
                continue;
            }
            let r = draw(&mut rng);
            let proj: C64 = u.iter().zip(&r).map(|(a, b)| a.conj() * b).sum();
            let w = normalize(r.iter().zip(&u).map(|(b, a)| b - a * proj).collect());
            emit(&u, Some(&w));
            emit(&u, Some(&w.iter().map(|z| -z).collect::<Vec<_>>()));
        }
        out
    }

    fn polyhedral_q_pairs(&self, q: f64, resolution: usize) -> Result<Vec<DualityPair>> {
        let base = self.extreme_pairs(resolution)?;
        let mut points: Vec<DualityPair> = base.clone();
        if self.is_real() {
            // Points interpolated along each facet between its vertices.
            let mut by_face: Vec<(Functional, Vec<Vector>)> = Vec::new();
            for p in &base {
                match by_face.iter_mut().find(|(f, _)| f == &p.xstar) {
                    Some((_, xs)) => xs.push(p.x.clone()),
                    None => by_face.push((p.xstar.clone(), vec![p.x.clone()])),
                }
            }
            for (f, xs) in &by_face {
                for a in 0..xs.len() {
                    for b in a + 1..xs.len() {
                        for k in 1..=resolution {
                            let s = k as f64 / (resolution + 1) as f64;
                            let x = Vector(&xs[a].0 * C64::new(s, 0.0) + &xs[b].0 * C64::new(1.0 - s, 0.0));
                            if (self.norm_fast(x.coords()) - 1.0).abs() < 1e-9 {
                                points.push(DualityPair::new(f.clone(), x));
                            }
                        }
                    }
                }
            }
        }
        if q == 1.0 {
            return Ok(points);
        }
        let duals = self.dual_extreme_points(resolution)?;
        let mut out = Vec::new();
        for p in &points {
            for g in &duals {
                let gx = g.apply(&p.x);
                if gx.im.abs() > 1e-12 || gx.re > q {
                    continue;
                }
                // Skip g proportional to x*: the segment would pass through 0.
                let cross: f64 = g.coords().iter().zip(p.xstar.coords()).map(|(a, b)| (a * b.conj()).norm()).sum();
                if (cross - 1.0).abs() < 1e-12 && self.dual_norm(&Functional(&g.0 + &p.xstar.0))? < 1e-12 {
                    continue;
                }
                if let Some(xs) = self.bisect_functional(&p.xstar, g, &p.x, q)? {
                    out.push(DualityPair::new(xs, p.x.clone()));
                }
            }
        }
        Ok(out)
    }

    /// Finds `t` with `(t f + (1−t) g)/‖·‖* (x) = q` by bisection.
    fn bisect_functional(&self, f: &Functional, g: &Functional, x: &Vector, q: f64) -> Result<Option<Functional>> {
        let at = |t: f64| -> Result<Option<(Functional, f64)>> {
            let v = Functional(&f.0 * C64::new(t, 0.0) + &g.0 * C64::new(1.0 - t, 0.0));
            let nv = self.dual_norm(&v)?;
            if nv < 1e-12 {
                return Ok(None);
            }
            let v = v.scaled(C64::new(1.0 / nv, 0.0));
            let val = v.apply(x).re;
            Ok(Some((v, val)))
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        let Some((g0, v0)) = at(0.0)? else { return Ok(None) };
        if (v0 - q).abs() < 1e-14 {
            return Ok(Some(g0));
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            match at(mid)? {
                Some((_, v)) if v < q => lo = mid,
                Some(_) => hi = mid,
                None => return Ok(None),
            }
        }
        Ok(at(hi)?.map(|(v, _)| v))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let (kind, vertices) = match &self.norm {
            NormSpec::Max => ("max", None),
            NormSpec::Sum => ("sum", None),
            NormSpec::Euclidean => ("euclid", None),
            NormSpec::Polytope { vertices } => ("polytope", Some(vertices.clone())),
        };
        serde_json::to_value(SpaceJson {
            dim: self.dim,
            field: self.field,
            norm: NormJson { kind: kind.into(), vertices },
        })
        .expect("space serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Space> {
        let raw: SpaceJson = serde_json::from_value(v.clone()).map_err(|e| Error::InvalidInput(e.to_string()))?;
        let norm = match raw.norm.kind.as_str() {
            "max" => NormSpec::Max,
            "sum" => NormSpec::Sum,
            "euclid" => NormSpec::Euclidean,
            "polytope" => NormSpec::Polytope {
                vertices: raw
                    .norm
                    .vertices
                    .ok_or_else(|| Error::InvalidInput("polytope norm needs \"vertices\"".into()))?,
            },
            other => return Err(Error::InvalidInput(format!("unknown norm kind \"{other}\""))),
        };
        Space::new(raw.dim, raw.field, norm)
    }
}

fn normalize(v: Vec<C64>) -> Vec<C64> {
    let r = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / r).collect()
}

/// Cartesian power `gridⁿ` in lexicographic order.
fn product(n: usize, grid: &[C64]) -> Vec<Vec<C64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                grid.iter().map(move |&g| {
                    let mut p = prefix.clone();
                    p.push(g);
                    p
                })
            })
            .collect();
    }
    out
}

/// One representative of each `±p` pair.
fn half(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for p in points {
        let lead = p.iter().find(|x| x.abs() > 1e-12).copied().unwrap_or(0.0);
        let q: Vec<f64> = if lead < 0.0 { p.iter().map(|x| -x).collect() } else { p.clone() };
        if !out.iter().any(|o| o.iter().zip(&q).all(|(a, b)| (a - b).abs() < 1e-12)) {
            out.push(q);
        }
    }
    out
}

fn polytope_cache(dim: usize, vertices: &[Vec<f64>]) -> Result<PolytopeCache> {
    if vertices.is_empty() {
        return Err(Error::InvalidInput("polytope needs vertices".into()));
    }
    if let Some(v) = vertices.iter().find(|v| v.len() != dim) {
        return Err(Error::dim(dim, v.len()));
    }
    for v in vertices {
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        if !vertices.iter().any(|w| w.iter().zip(&neg).all(|(a, b)| (a - b).abs() < 1e-12)) {
            return Err(Error::InvalidInput(format!("vertex set is not symmetric: missing −{v:?}")));
        }
    }
    if rank_real(vertices, 1e-10) < dim {
        return Err(Error::Degenerate("polytope vertices do not span the space".into()));
    }
    let dual = symmetric_vertices(&half(vertices), dim, 1e-9);
    for v in vertices {
        let g = dual.iter().map(|f| linalg::dot(f, v).abs()).fold(0.0, f64::max);
        if (g - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("vertex {v:?} has norm {g}, not 1")));
        }
    }
    let ext = symmetric_vertices(&half(&dual), dim, 1e-9)
        .into_iter()
        .map(|e| {
            vertices
                .iter()
                .find(|v| v.iter().zip(&e).all(|(a, b)| (a - b).abs() < 1e-7))
                .cloned()
                .unwrap_or(e)
        })
        .collect();
    Ok(PolytopeCache { extreme: linalg::dedup_sorted(ext, 1e-12), dual_extreme: dual })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hexagon() -> Space {
        Space::polytope(vec![
            vec![1.0, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
            vec![1.0, 1.0],
            vec![-1.0, -1.0],
        ])
        .unwrap()
    }

    #[test]
    fn norms_of_examples() {
        let linf = Space::max(3, ScalarField::Real).unwrap();
        assert_eq!(linf.norm(&Vector::real(&[1.0, -1.0, -1.0])).unwrap(), 1.0);
        assert_eq!(linf.norm(&Vector::real(&[0.0, 0.0, 0.0])).unwrap(), 0.0);
        assert!((hexagon().norm(&Vector::real(&[1.0, 1.0])).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(hexagon().norm(&Vector::real(&[0.0, 0.0])).unwrap(), 0.0);
    }

    #[test]
    fn hexagon_gauge_matches_hull_membership() {
        // Brute force: the gauge is the smallest s on a fine grid with x/s in
        // the hull, where hull membership is tested by the facet inequalities
        // derived by hand: |x1| <= 1, |x2| <= 1, |x1 - x2| <= 1.
        let h = hexagon();
        let inside = |p: [f64; 2]| p[0].abs() <= 1.0 + 1e-12 && p[1].abs() <= 1.0 + 1e-12 && (p[0] - p[1]).abs() <= 1.0 + 1e-12;
        for x in [[0.3, -0.7], [2.0, 0.5], [-1.5, 1.5], [0.2, 0.9]] {
            let mut s = 0.0f64;
            while !inside([x[0] / s.max(1e-300), x[1] / s.max(1e-300)]) {
                s += 1e-5;
            }
            let g = h.norm(&Vector::real(&x)).unwrap();
            assert!((g - s).abs() < 2e-5, "{x:?}: {g} vs {s}");
        }
    }

    #[test]
    fn dual_norm_examples() {
        let linf = Space::max(3, ScalarField::Real).unwrap();
        assert!((linf.dual_norm(&Functional::real(&[1.0 / 3.0; 3])).unwrap() - 1.0).abs() < 1e-15);
        let l2 = Space::euclidean(2, ScalarField::Real).unwrap();
        assert_eq!(l2.dual_norm(&Functional::real(&[3.0, 4.0])).unwrap(), 5.0);
        let l1poly = Space::polytope(vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]]).unwrap();
        assert_eq!(l1poly.dual_norm(&Functional::real(&[2.0, -1.0])).unwrap(), 2.0);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let linf = Space::max(3, ScalarField::Real).unwrap();
        assert_eq!(linf.norm(&Vector::real(&[1.0])), Err(Error::dim(3, 1)));
        assert_eq!(linf.dual_norm(&Functional::real(&[1.0, 2.0])), Err(Error::dim(3, 2)));
    }

    #[test]
    fn peak_functional_examples() {
        let linf = Space::max(3, ScalarField::Real).unwrap();
        assert_eq!(linf.peak_functional(&Vector::real(&[1.0, -1.0, -1.0])).unwrap(), Functional::real(&[1.0, 0.0, 0.0]));
        let l2 = Space::euclidean(2, ScalarField::Real).unwrap();
        assert_eq!(l2.peak_functional(&Vector::real(&[0.0, 2.0])).unwrap(), Functional::real(&[0.0, 1.0]));
        let l1poly = Space::polytope(vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]]).unwrap();
        assert_eq!(l1poly.peak_functional(&Vector::real(&[1.0, 1.0])).unwrap(), Functional::real(&[1.0, 1.0]));
        assert!(matches!(linf.peak_functional(&Vector::real(&[0.0; 3])), Err(Error::Degenerate(_))));
    }

    #[test]
    fn extreme_pairs_of_linf2_and_l1_2() {
        let linf = Space::max(2, ScalarField::Real).unwrap();
        let pairs = linf.extreme_pairs(1).unwrap();
        assert_eq!(pairs.len(), 8);
        // Brute force: every (±e_j, sign vector) combination with pairing 1.
        let mut brute = 0;
        for j in 0..2 {
            for s in [-1.0, 1.0] {
                for a in [-1.0, 1.0] {
                    for b in [-1.0, 1.0] {
                        let f = Functional::unit(2, j, C64::new(s, 0.0));
                        if (f.apply(&Vector::real(&[a, b])).re - 1.0).abs() < 1e-15 {
                            brute += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(brute, 8);
        let l1 = Space::sum(2, ScalarField::Real).unwrap();
        let swapped = l1.extreme_pairs(1).unwrap();
        assert_eq!(swapped.len(), 8);
        for p in &swapped {
            assert!(pairs.iter().any(|q| q.xstar.0 == p.x.0 && q.x.0 == p.xstar.0));
        }
    }

    #[test]
    fn complex_linf3_pair_count() {
        let c = Space::max(3, ScalarField::Complex).unwrap();
        for m in [1, 2, 4] {
            assert_eq!(c.extreme_pairs(m).unwrap().len(), 3 * m * m * m);
        }
        assert!(matches!(c.extreme_pairs(360), Err(Error::Capability(_))));
    }

    #[test]
    fn q_pairs_examples() {
        let l2 = Space::euclidean(2, ScalarField::Real).unwrap();
        let set = l2.q_pairs(0.5, 24).unwrap();
        for p in &set.pairs {
            assert!((p.pairing.re - 0.5).abs() < 1e-12);
            assert!((l2.norm(&p.x).unwrap() - 1.0).abs() < 1e-12);
            assert!((l2.dual_norm(&p.xstar).unwrap() - 1.0).abs() < 1e-12);
            let xs: Vec<f64> = p.xstar.coords().iter().map(|z| z.re).collect();
            let x: Vec<f64> = p.x.coords().iter().map(|z| z.re).collect();
            let angle = linalg::dot(&xs, &x).clamp(-1.0, 1.0).acos();
            assert!((angle - std::f64::consts::FRAC_PI_3).abs() < 1e-12);
        }
        assert!(matches!(l2.q_pairs(1.5, 4), Err(Error::Precondition(_))));
        assert!(matches!(l2.q_pairs(0.0, 4), Err(Error::Precondition(_))));

        let linf = Space::max(2, ScalarField::Real).unwrap();
        let ext = linf.extreme_pairs(1).unwrap();
        let q1 = linf.q_pairs(1.0, 1).unwrap();
        for p in q1.pairs.iter().filter(|p| p.x.coords().iter().all(|z| z.norm() == 1.0)) {
            assert!(ext.contains(p));
        }
        let half_pairs = linf.q_pairs(0.5, 3).unwrap();
        assert!(!half_pairs.is_empty());
        for p in &half_pairs.pairs {
            assert!((p.pairing.re - 0.5).abs() < 1e-10);
            assert!((linf.dual_norm(&p.xstar).unwrap() - 1.0).abs() < 1e-10);
            assert!((linf.norm(&p.x).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn closure_examples() {
        let e1x = DualityPair::new(Functional::real(&[1.0, 0.0]), Vector::real(&[1.0, 1.0]));
        let set = PairSet::explicit(ScalarField::Real, vec![e1x.clone()]).unwrap();
        let closed = signed_closure(&set);
        assert_eq!(closed.len(), 2);
        assert!(closed.pairs.contains(&e1x));
        assert!(closed.pairs.contains(&e1x.rotated(-ONE)));
        assert_eq!(signed_closure(&closed), closed);

        let cset = PairSet::new(PairSetKind::Explicit, ScalarField::Complex, vec![e1x.clone()], 4, true).unwrap();
        let cc = signed_closure(&cset);
        assert_eq!(cc.len(), 4);
        for k in 0..4 {
            let ik = C64::new(0.0, 1.0).powu(k);
            assert!(cc.pairs.iter().any(|p| close(p.xstar.coords(), &[ik, ZERO])));
        }
    }

    fn close(a: &[C64], b: &[C64]) -> bool {
        scalar::close(a, b, 1e-12)
    }

    #[test]
    fn polytope_validation() {
        assert!(matches!(Space::polytope(vec![vec![1.0, 0.0], vec![0.0, 1.0]]), Err(Error::InvalidInput(_))));
        assert!(matches!(Space::polytope(vec![vec![1.0, 0.0], vec![-1.0, 0.0]]), Err(Error::Degenerate(_))));
        // (0.5, 0) is interior.
        assert!(Space::polytope(vec![
            vec![1.0, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
            vec![0.5, 0.0],
            vec![-0.5, 0.0]
        ])
        .is_err());
        let hull = Space::polytope_hull(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.2, 0.2], vec![0.5, 0.5]]).unwrap();
        match hull.norm_spec() {
            NormSpec::Polytope { vertices } => assert_eq!(vertices.len(), 4),
            _ => unreachable!(),
        }
        assert!(matches!(
            Space::new(2, ScalarField::Complex, NormSpec::Polytope { vertices: vec![vec![1.0, 0.0]] }),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        for s in [hexagon(), Space::max(3, ScalarField::Complex).unwrap(), Space::euclidean(2, ScalarField::Real).unwrap()] {
            let j = s.to_json();
            let back = Space::from_json(&j).unwrap();
            assert_eq!(back.to_json(), j);
        }
        let j: serde_json::Value = serde_json::from_str(r#"{"dim": 2, "field": "real", "norm": {"kind": "max"}}"#).unwrap();
        assert_eq!(Space::from_json(&j).unwrap().norm_spec(), &NormSpec::Max);
    }
}
