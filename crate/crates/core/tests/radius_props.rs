mod common;

use common::*;
use nalgebra::DMatrix;
use numrad_core::radius::{self, Method, Operator, RadiusReport};
use numrad_core::space::{ScalarField, Space};
use numrad_core::C64;
use proptest::prelude::*;

fn op_from(v: &[f64], n: usize, complex: bool) -> Operator {
    Operator(DMatrix::from_fn(n, n, |i, j| C64::new(v[i * n + j], if complex { v[n * n + i * n + j] } else { 0.0 })))
}

fn space_by(idx: usize, n: usize) -> Space {
    match idx {
        0 => Space::max(n, ScalarField::Real).unwrap(),
        1 => Space::sum(n, ScalarField::Real).unwrap(),
        2 => Space::euclidean(n, ScalarField::Real).unwrap(),
        3 => Space::max(n, ScalarField::Complex).unwrap(),
        4 => Space::sum(n, ScalarField::Complex).unwrap(),
        5 => Space::euclidean(n, ScalarField::Complex).unwrap(),
        _ => random_polytope(&mut rng(idx as u64), n, n + 3),
    }
}

#[test]
fn nilpotent_on_real_and_complex_l2() {
    let t = Operator::real(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
    for field in [ScalarField::Real, ScalarField::Complex] {
        let s = Space::euclidean(2, field).unwrap();
        assert!((radius::numerical_radius(&s, &t).unwrap().value - 0.5).abs() <= 1e-12);
        let q1 = radius::q_radius(&s, &t, 1.0, 64).unwrap();
        assert!((q1.value - 0.5).abs() <= q1.tol.max(1e-6));
    }
}

#[test]
fn q_radius_of_identity_is_q() {
    for s in [Space::euclidean(2, ScalarField::Real).unwrap(), Space::max(3, ScalarField::Real).unwrap()] {
        for q in [0.25, 0.5, 1.0] {
            let r = radius::q_radius(&s, &Operator::identity(s.dim()), q, 16).unwrap();
            assert!((r.value - q).abs() <= 1e-10);
            assert_eq!(r.method, Method::Sampled);
        }
    }
}

#[test]
fn zero_operator_has_zero_radius() {
    for idx in 0..7 {
        let s = space_by(idx, 3);
        assert_eq!(radius::numerical_radius(&s, &Operator::zeros(3)).unwrap().value, 0.0);
    }
}

#[test]
fn complex_max_norm_dominates_phase_grid() {
    let mut r = rng(21);
    let s = Space::max(2, ScalarField::Complex).unwrap();
    let grid = s.extreme_pair_set(360).unwrap();
    for _ in 0..30 {
        let t = random_complex_op(&mut r, 2);
        let closed = radius::numerical_radius(&s, &t).unwrap().value;
        let sampled = radius::seminorm(&t, &grid).unwrap();
        assert!(closed + 1e-12 >= sampled);
        assert!(closed - sampled <= 1e-3, "{closed} vs {sampled}");
    }
}

#[test]
fn sum_norm_matches_polytope_cross_polytope() {
    let cross = Space::polytope(vec![
        vec![1.0, 0.0, 0.0],
        vec![-1.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0],
        vec![0.0, -1.0, 0.0],
        vec![0.0, 0.0, 1.0],
        vec![0.0, 0.0, -1.0],
    ])
    .unwrap();
    let l1 = Space::sum(3, ScalarField::Real).unwrap();
    let mut r = rng(22);
    for _ in 0..50 {
        let t = random_real_op(&mut r, 3);
        let a = radius::numerical_radius(&l1, &t).unwrap();
        let b = radius::numerical_radius(&cross, &t).unwrap();
        assert_eq!(a.method, Method::ClosedForm);
        assert_eq!(b.method, Method::Enumeration);
        assert!((a.value - b.value).abs() <= 1e-12);
        assert!((a.value - l1_brute(&t, 20_000)).abs() <= 1e-3);
    }
}

#[test]
fn numerical_index_is_deterministic() {
    let s = Space::sum(2, ScalarField::Real).unwrap();
    let a = radius::numerical_index(&s, 300, 9).unwrap();
    let b = radius::numerical_index(&s, 300, 9).unwrap();
    assert_eq!(a, b);
    assert!(a.value > 0.0 && a.value <= 1.0);
}

#[test]
fn range_support_points_lie_on_the_radius_circle_or_inside() {
    let s = Space::max(3, ScalarField::Complex).unwrap();
    let p = numrad_core::extend::averaging_projection();
    let pts = radius::range_support_points(&s, &p, 64, 8).unwrap();
    assert_eq!(pts.len(), 64);
    let w = radius::numerical_radius(&s, &p).unwrap().value;
    assert!(pts.iter().all(|(_, z)| z.norm() <= w + 1e-9));
    assert!(pts.iter().any(|(_, z)| (z.norm() - w).abs() <= 1e-9));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn seminorm_axioms(idx in 0usize..7, n in 2usize..4, v in prop::collection::vec(-1.0f64..1.0, 18), u in prop::collection::vec(-1.0f64..1.0, 18), cre in -3.0f64..3.0, cim in -3.0f64..3.0) {
        let s = space_by(idx, n);
        let complex = !s.is_real();
        let (t, q) = (op_from(&v, n, complex), op_from(&u, n, complex));
        let c = if complex { C64::new(cre, cim) } else { C64::new(cre, 0.0) };
        let w = |o: &Operator| radius::numerical_radius(&s, o).unwrap().value;
        let (wt, wq) = (w(&t), w(&q));
        let scale = 1.0 + wt + wq;
        prop_assert!(wt >= 0.0);
        prop_assert!(w(&t.add(&q)) <= wt + wq + 1e-10 * scale);
        prop_assert!((w(&t.scale(c)) - c.norm() * wt).abs() <= 1e-10 * scale * (1.0 + c.norm()));
        prop_assert!(wt <= radius::operator_norm(&s, &t).unwrap() + 1e-10 * scale);
    }

    #[test]
    fn active_set_reproduces_value(idx in 0usize..7, v in prop::collection::vec(-1.0f64..1.0, 18)) {
        prop_assume!(idx != 2 && idx != 5);
        let s = space_by(idx, 3);
        let t = op_from(&v, 3, !s.is_real());
        let rep = radius::numerical_radius(&s, &t).unwrap();
        prop_assert!(!rep.active.is_empty());
        for p in &rep.active {
            let z = p.eval(&t);
            prop_assert!((z.re - rep.value).abs() <= rep.tol && z.im.abs() <= rep.tol);
        }
        let back = RadiusReport::from_json(&rep.to_json(!s.is_real())).unwrap();
        prop_assert_eq!(back.value, rep.value);
        prop_assert_eq!(back.active.len(), rep.active.len());
    }

    #[test]
    fn max_norm_closed_form_matches_enumeration_and_brute_force(n in 2usize..4, v in prop::collection::vec(-1.0f64..1.0, 9)) {
        let s = Space::max(n, ScalarField::Real).unwrap();
        let t = op_from(&v, n, false);
        let closed = radius::numerical_radius(&s, &t).unwrap().value;
        let enumerated = radius::seminorm(&t, &s.extreme_pair_set(1).unwrap()).unwrap();
        prop_assert!((closed - enumerated).abs() <= 1e-12);
        prop_assert!((closed - linf_brute(&t, 20_000)).abs() <= 1e-3);
    }

    #[test]
    fn l2_radius_is_unitarily_invariant(v in prop::collection::vec(-1.0f64..1.0, 8), a in 0.0f64..6.3, b in 0.0f64..6.3, c in 0.0f64..6.3) {
        let s = Space::euclidean(2, ScalarField::Complex).unwrap();
        let t = op_from(&v, 2, true);
        let u = DMatrix::from_row_slice(2, 2, &[
            C64::from_polar(a.cos(), b), C64::from_polar(a.sin(), c),
            -C64::from_polar(a.sin(), -c), C64::from_polar(a.cos(), -b),
        ]);
        let conj = Operator(u.adjoint() * &t.0 * &u);
        let w1 = radius::numerical_radius(&s, &t).unwrap().value;
        let w2 = radius::numerical_radius(&s, &conj).unwrap().value;
        prop_assert!((w1 - w2).abs() <= 1e-8);
        prop_assert!((w1 - l2_circle_brute(&t)).abs() <= 1e-6);
    }

    #[test]
    fn real_l2_radius_is_symmetric_part_spectral_radius(v in prop::collection::vec(-1.0f64..1.0, 9)) {
        let s = Space::euclidean(3, ScalarField::Real).unwrap();
        let t = op_from(&v, 3, false);
        let mut best = 0.0f64;
        for i in 0..=60 {
            for j in 0..120 {
                let (th, ph) = (std::f64::consts::PI * i as f64 / 60.0, std::f64::consts::PI * j as f64 / 60.0);
                let x = [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
                let q: f64 = (0..3).map(|r| (0..3).map(|k| x[r] * v[r * 3 + k] * x[k]).sum::<f64>()).sum();
                best = best.max(q.abs());
            }
        }
        let w = radius::numerical_radius(&s, &t).unwrap().value;
        prop_assert!(w + 1e-12 >= best);
        prop_assert!(w - best <= 5e-3 * (1.0 + w));
    }
}
