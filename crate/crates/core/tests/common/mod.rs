//! Independent oracles and seeded generators shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use numrad_core::radius::Operator;
use numrad_core::space::Space;
use numrad_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    rng.random::<f64>() * 2.0 - 1.0
}

pub fn random_real_op(rng: &mut ChaCha8Rng, n: usize) -> Operator {
    Operator(DMatrix::from_fn(n, n, |_, _| C64::new(uniform(rng), 0.0)))
}

pub fn random_complex_op(rng: &mut ChaCha8Rng, n: usize) -> Operator {
    Operator(DMatrix::from_fn(n, n, |_, _| C64::new(uniform(rng), uniform(rng))))
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| uniform(rng)).collect()
}

/// Symmetric polytope norm on `R^n` from `k` random points on the sphere.
pub fn random_polytope(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Space {
    loop {
        let pts: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                let v = random_vec(rng, n);
                let r = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-3);
                v.iter().map(|x| x / r).collect()
            })
            .collect();
        if let Ok(s) = Space::polytope_hull(&pts) {
            return s;
        }
    }
}

pub fn linspace(a: f64, b: f64, k: usize) -> Vec<f64> {
    (0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect()
}

fn tx(t: &Operator, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n).map(|i| (0..n).map(|j| t.0[(i, j)].re * x[j]).sum()).collect()
}

/// Dense grid over the faces of the real ℓ∞ sphere; for each point every
/// peak functional `sign(x_k) e_k` with `|x_k| = 1` is evaluated.
pub fn linf_brute(t: &Operator, samples: usize) -> f64 {
    let n = t.dim();
    let faces = 2 * n;
    let per_face = samples / faces;
    let side = ((per_face as f64).powf(1.0 / (n - 1) as f64).floor() as usize).max(2);
    let grid = linspace(-1.0, 1.0, side);
    let mut best = 0.0f64;
    for j in 0..n {
        for s in [-1.0, 1.0] {
            let mut idx = vec![0usize; n - 1];
            loop {
                let mut x = Vec::with_capacity(n);
                let mut it = idx.iter();
                for k in 0..n {
                    x.push(if k == j { s } else { grid[*it.next().unwrap()] });
                }
                let y = tx(t, &x);
                for k in 0..n {
                    if (x[k].abs() - 1.0).abs() < 1e-15 {
                        best = best.max((x[k].signum() * y[k]).abs());
                    }
                }
                if !advance(&mut idx, side) {
                    break;
                }
            }
        }
    }
    best
}

fn advance(idx: &mut [usize], side: usize) -> bool {
    for d in idx.iter_mut() {
        *d += 1;
        if *d < side {
            return true;
        }
        *d = 0;
    }
    false
}

/// Dense grid over the real ℓ1 sphere (sign pattern times simplex lattice);
/// supporting functionals are `s_k` on the support and `±1` elsewhere.
pub fn l1_brute(t: &Operator, samples: usize) -> f64 {
    let n = t.dim();
    let signs = 1usize << n;
    let per = samples / signs;
    // Lattice points of the simplex with denominator `d`: C(d + n − 1, n − 1).
    let mut d = 1usize;
    while simplex_count(d + 1, n) <= per {
        d += 1;
    }
    let mut best = 0.0f64;
    let mut lam = vec![0usize; n];
    simplex_points(d, n, 0, &mut lam, &mut |l| {
        for mask in 0..signs {
            let x: Vec<f64> = (0..n)
                .map(|k| if mask >> k & 1 == 1 { -1.0 } else { 1.0 } * l[k] as f64 / d as f64)
                .collect();
            let y = tx(t, &x);
            let zeros: Vec<usize> = (0..n).filter(|&k| l[k] == 0).collect();
            for choice in 0..1usize << zeros.len() {
                let mut f = vec![0.0; n];
                for k in 0..n {
                    f[k] = if l[k] > 0 { x[k].signum() } else { 0.0 };
                }
                for (b, &k) in zeros.iter().enumerate() {
                    f[k] = if choice >> b & 1 == 1 { -1.0 } else { 1.0 };
                }
                let v: f64 = f.iter().zip(&y).map(|(a, b)| a * b).sum();
                best = best.max(v.abs());
            }
        }
    });
    best
}

fn simplex_count(d: usize, n: usize) -> usize {
    let mut c = 1usize;
    for i in 0..n - 1 {
        c = c * (d + n - 1 - i) / (i + 1);
    }
    c
}

fn simplex_points(rem: usize, n: usize, k: usize, lam: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if k == n - 1 {
        lam[k] = rem;
        f(lam);
        return;
    }
    for a in 0..=rem {
        lam[k] = a;
        simplex_points(rem - a, n, k + 1, lam, f);
    }
}

/// `max |x^H T x|` over the complex unit sphere of `C^2`, by grid search
/// over `x = (cos a, e^{iφ} sin a)` followed by repeated local zooming.
pub fn l2_circle_brute(t: &Operator) -> f64 {
    let eval = |a: f64, p: f64| -> f64 {
        let x = [C64::new(a.cos(), 0.0), C64::from_polar(a.sin(), p)];
        let mut s = C64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                s += x[i].conj() * t.0[(i, j)] * x[j];
            }
        }
        s.norm()
    };
    let (na, np) = (200usize, 400usize);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut cells: Vec<(f64, f64, f64)> = Vec::with_capacity((na + 1) * np);
    for i in 0..=na {
        for j in 0..np {
            let (a, p) = (half_pi * i as f64 / na as f64, two_pi * j as f64 / np as f64);
            cells.push((eval(a, p), a, p));
        }
    }
    cells.sort_by(|x, y| y.0.total_cmp(&x.0));
    let mut best = cells[0].0;
    for &(_, a0, p0) in cells.iter().take(12) {
        let (mut a, mut p) = (a0, p0);
        let (mut ha, mut hp) = (half_pi / na as f64, two_pi / np as f64);
        for _ in 0..14 {
            let mut top = (eval(a, p), a, p);
            for i in -10..=10 {
                for j in -10..=10 {
                    let aa = (a + ha * i as f64 / 5.0).clamp(0.0, half_pi);
                    let pp = p + hp * j as f64 / 5.0;
                    let v = eval(aa, pp);
                    if v > top.0 {
                        top = (v, aa, pp);
                    }
                }
            }
            a = top.1;
            p = top.2;
            best = best.max(top.0);
            ha /= 4.0;
            hp /= 4.0;
        }
    }
    best
}
