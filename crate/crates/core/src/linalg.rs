//! Small dense linear-algebra helpers: row reduction over `C64`, null
//! spaces, subset iteration and vertex enumeration for centrally symmetric
//! polytopes `{a : |h_i · a| ≤ 1}`.

use nalgebra::{DMatrix, DVector};

use crate::scalar::{C64, ZERO};

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut DMatrix<C64>, tol: f64) -> Vec<usize> {
    let (rows, cols) = m.shape();
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (best, mag) = (r..rows)
            .map(|i| (i, m[(i, c)].norm()))
            .fold((r, -1.0), |a, b| if b.1 > a.1 { b } else { a });
        if mag <= tol * scale {
            for i in r..rows {
                m[(i, c)] = ZERO;
            }
            continue;
        }
        m.swap_rows(r, best);
        let p = m[(r, c)];
        for j in 0..cols {
            m[(r, j)] /= p;
        }
        for i in 0..rows {
            if i != r {
                let f = m[(i, c)];
                if f != ZERO {
                    for j in 0..cols {
                        let v = m[(r, j)];
                        m[(i, j)] -= f * v;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &DMatrix<C64>, tol: f64) -> usize {
    let mut w = m.clone();
    rref(&mut w, tol).len()
}

pub fn rank_real(rows: &[Vec<f64>], tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| C64::new(rows[i][j], 0.0));
    rank(&m, tol)
}

/// Basis of `{x : m x = 0}`, returned as columns.
pub fn null_space(m: &DMatrix<C64>, tol: f64) -> Vec<DVector<C64>> {
    let cols = m.ncols();
    let mut w = m.clone();
    let pivots = rref(&mut w, tol);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = DVector::from_element(cols, ZERO);
            v[fc] = C64::new(1.0, 0.0);
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -w[(r, fc)];
            }
            v
        })
        .collect()
}

/// Solves a square real system, `None` when (numerically) singular.
pub fn solve_real(a: &DMatrix<f64>, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.nrows();
    let lu = a.clone().full_piv_lu();
    let scale = a.iter().fold(0.0f64, |s, x| s.max(x.abs())).max(1e-300);
    let u = lu.u();
    let min_piv = (0..n).map(|i| u[(i, i)].abs()).fold(f64::INFINITY, f64::min);
    if min_piv <= 1e-12 * scale {
        return None;
    }
    lu.solve(&DVector::from_column_slice(b)).map(|x| x.iter().copied().collect())
}

/// Least-squares solution of `a x ≈ b` together with the residual norm.
pub fn least_squares(a: &DMatrix<f64>, b: &[f64]) -> (Vec<f64>, f64) {
    let bv = DVector::from_column_slice(b);
    if a.ncols() == 0 {
        return (Vec::new(), bv.norm());
    }
    let svd = a.clone().svd(true, true);
    let x = svd.solve(&bv, 1e-12).expect("svd computed with both factors");
    let res = (a * &x - &bv).norm();
    (x.iter().copied().collect(), res)
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Combinations { n, idx: (0..k).collect(), done: k > n }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn lex_cmp_real(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.total_cmp(y);
        if o != std::cmp::Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

/// Sorts lexicographically and removes near-duplicates (sup-distance `tol`).
pub fn dedup_sorted(mut pts: Vec<Vec<f64>>, tol: f64) -> Vec<Vec<f64>> {
    pts.sort_by(|a, b| lex_cmp_real(a, b));
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(pts.len());
    for p in pts {
        if !out
            .iter()
            .any(|q| q.iter().zip(&p).all(|(a, b)| (a - b).abs() <= tol))
        {
            out.push(p);
        }
    }
    out
}

/// Vertices of the centrally symmetric polyhedron `{a ∈ ℝ^dim : |h·a| ≤ 1}`.
///
/// Every `dim`-subset of the constraint normals with full rank and every
/// sign pattern is solved as an equality system; feasible solutions are the
/// vertices. Returns an empty list when the polyhedron has no vertices
/// (the normals do not span `ℝ^dim`).
pub fn symmetric_vertices(normals: &[Vec<f64>], dim: usize, tol: f64) -> Vec<Vec<f64>> {
    let mut found = Vec::new();
    if normals.len() < dim {
        return found;
    }
    for subset in Combinations::new(normals.len(), dim) {
        let rows: Vec<Vec<f64>> = subset.iter().map(|&i| normals[i].clone()).collect();
        if rank_real(&rows, 1e-10) < dim {
            continue;
        }
        let lu = DMatrix::from_fn(dim, dim, |i, j| rows[i][j]).full_piv_lu();
        for signs in 0..(1u32 << dim) {
            let rhs = DVector::from_fn(dim, |i, _| if signs >> i & 1 == 1 { -1.0 } else { 1.0 });
            let Some(x) = lu.solve(&rhs) else { continue };
            let feasible = normals
                .iter()
                .all(|h| h.iter().zip(x.iter()).map(|(p, q)| p * q).sum::<f64>().abs() <= 1.0 + tol);
            if feasible {
                found.push(x.iter().copied().collect());
            }
        }
    }
    dedup_sorted(found, 1e-9)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
