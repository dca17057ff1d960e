mod common;

use common::*;
use nalgebra::DMatrix;
use numrad_core::approx::Uniqueness;
use numrad_core::certify::Verdict;
use numrad_core::extend::{self, ExtendOptions, Subspace};
use numrad_core::radius::Operator;
use numrad_core::space::{ScalarField, Space};
use numrad_core::{Error, C64};

fn rc(v: &[f64]) -> Vec<C64> {
    v.iter().map(|&a| C64::new(a, 0.0)).collect()
}

fn random_a(r: &mut rand_chacha::ChaCha8Rng, k: usize) -> Operator {
    Operator(DMatrix::from_fn(k, k, |i, j| C64::new(if i == j { 1.0 } else { 0.0 } + 0.4 * uniform(r), 0.0)))
}

/// Largest entry of `E·V − V·A` and of the component of `range E` outside `V`.
fn extension_errors(v: &Subspace, a: &Operator, e: &Operator) -> (f64, f64) {
    let vm = v.matrix();
    let restrict = (&e.0 * &vm - &vm * &a.0).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let svd = vm.clone().svd(true, false);
    let u = svd.u.unwrap();
    let proj = &u * u.adjoint();
    let outside = (&e.0 - &proj * &e.0).iter().map(|z| z.norm()).fold(0.0, f64::max);
    (restrict, outside)
}

#[test]
fn extensions_are_valid_and_bounded_below() {
    let mut r = rng(31);
    for i in 0..30 {
        let n = 3 + i % 2;
        let x = if i % 3 == 0 { Space::max(n, ScalarField::Real).unwrap() } else { random_polytope(&mut r, n, n + 3) };
        let k = 1 + i % (n - 1);
        let Ok(v) = Subspace::from_basis(n, (0..k).map(|_| rc(&random_vec(&mut r, n))).collect()) else { continue };
        let a = random_a(&mut r, k);
        let opts = ExtendOptions { compute_suba: false, ..ExtendOptions::default() };
        let res = match extend::minimal_extension(&x, &v, &a, None, opts) {
            Ok(res) => res,
            Err(Error::Degenerate(_)) => continue,
            Err(e) => panic!("{e}"),
        };
        let (restrict, outside) = extension_errors(&v, &a, &res.minimizer);
        assert!(restrict <= 1e-12 * (1.0 + res.lambda_w) * 10.0, "restriction error {restrict:e}");
        assert!(outside <= 1e-10, "range error {outside:e}");
        assert!(res.lambda_w + 1e-9 >= res.radius_a);
        assert!(res.radius_a <= res.op_norm_a + 1e-9);
        let w = numrad_core::radius::numerical_radius(&x, &res.minimizer).unwrap().value;
        assert!((w - res.lambda_w).abs() <= 1e-9);
    }
}

#[test]
fn result_does_not_depend_on_the_initial_extension() {
    let mut r = rng(32);
    for _ in 0..20 {
        let x = random_polytope(&mut r, 3, 6);
        let Ok(v) = Subspace::from_basis(3, vec![rc(&random_vec(&mut r, 3)), rc(&random_vec(&mut r, 3))]) else { continue };
        let a = random_a(&mut r, 2);
        let opts = ExtendOptions { compute_suba: false, ..ExtendOptions::default() };
        let base = extend::minimal_extension(&x, &v, &a, None, opts).unwrap();
        let family = extend::annihilator_basis(&x, &v).unwrap();
        let shift = family.combine(&random_vec(&mut r, family.len()).iter().map(|c| 3.0 * c).collect::<Vec<_>>());
        let a0 = extend::default_extension(&v, &a).add(&shift);
        let moved = extend::minimal_extension(&x, &v, &a, Some(&a0), opts).unwrap();
        assert!((base.lambda_w - moved.lambda_w).abs() <= 1e-9);
        if base.unique == Uniqueness::Unique {
            assert!(base.minimizer.max_abs_diff(&moved.minimizer) <= 1e-7);
        }
    }
}

#[test]
fn two_dimensional_subspaces_of_three_space_are_strongly_unique() {
    let mut r = rng(33);
    let mut seen = 0;
    while seen < 25 {
        let x = random_polytope(&mut r, 3, 6);
        let Ok(v) = Subspace::from_basis(3, vec![rc(&random_vec(&mut r, 3)), rc(&random_vec(&mut r, 3))]) else { continue };
        let a = random_a(&mut r, 2);
        let Ok(res) = extend::minimal_extension(&x, &v, &a, None, ExtendOptions::default()) else { continue };
        if res.lambda_w <= res.op_norm_a + 1e-6 {
            continue;
        }
        seen += 1;
        assert_eq!(res.unique, Uniqueness::Unique);
        let cert = res.certificate.as_ref().unwrap();
        assert_eq!(cert.verdict, Verdict::Optimal);
        assert_eq!(cert.k, 3);
        assert!(cert.pairwise_independent());
        assert!(res.suba.as_ref().unwrap().r > 0.0);
    }
}

#[test]
fn norm_one_projection_case_is_not_unique() {
    let x = Space::max(3, ScalarField::Real).unwrap();
    let v = Subspace::kernel_of(3, vec![rc(&[1.0, 1.0, 0.0])]).unwrap();
    let res = extend::minimal_projection(&x, &v, ExtendOptions::default()).unwrap();
    assert!((res.lambda_w - 1.0).abs() <= 1e-12);
    assert!((res.op_norm_a - 1.0).abs() <= 1e-12);
    assert_eq!(res.unique, Uniqueness::NonUnique);
    let alt = res.alternative.as_ref().unwrap();
    assert!(alt.max_abs_diff(&res.minimizer) > 1e-6);
    let w = numrad_core::radius::numerical_radius(&x, alt).unwrap().value;
    assert!((w - 1.0).abs() <= 1e-9);
}

#[test]
fn hyperplanes_in_four_and_five_dimensions_are_not_unique() {
    for f in [vec![0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], vec![0.0, 0.25, 0.25, 0.25, 0.25]] {
        let n = f.len();
        let x = Space::max(n, ScalarField::Real).unwrap();
        let v = Subspace::kernel_of(n, vec![rc(&f)]).unwrap();
        let res = extend::minimal_projection(&x, &v, ExtendOptions { compute_suba: false, ..ExtendOptions::default() }).unwrap();
        assert!(res.lambda_w > 1.0 + 1e-3);
        assert_eq!(res.unique, Uniqueness::NonUnique);
        assert!((res.lambda_w - extend::linf_hyperplane_lambda(&f, n).unwrap()).abs() <= 1e-8);
    }
}

#[test]
fn hyperplane_formula_rejects_inadmissible_functionals() {
    assert!(extend::linf_hyperplane_lambda(&[0.6, 0.4, 0.0], 3).is_err());
    assert!(extend::linf_hyperplane_lambda(&[0.5, 0.5], 3).is_err());
}

#[test]
fn norm_checks() {
    let x = Space::max(3, ScalarField::Complex).unwrap();
    let v = Subspace::with_annihilator(3, vec![rc(&[1.0, -1.0, 0.0]), rc(&[0.0, 1.0, -1.0])], vec![rc(&[1.0 / 3.0; 3])]).unwrap();
    let p = extend::averaging_projection();
    let chk = extend::seminorm_is_norm_check(&x, &v, &Operator::identity(2), Some(&p), 200, 1).unwrap();
    assert!(chk.holds && chk.samples > 0 && chk.min_ratio > 0.0);

    let mut r = rng(34);
    for _ in 0..10 {
        let xr = random_polytope(&mut r, 3, 6);
        let Ok(vr) = Subspace::from_basis(3, vec![rc(&random_vec(&mut r, 3))]) else { continue };
        let chk = extend::seminorm_is_norm_check(&xr, &vr, &Operator::identity(1), None, 100, 2).unwrap();
        assert!(chk.holds);
        assert_eq!(chk.extension_witness, Some(true));
        assert_eq!(chk.annihilator_witness, Some(true));
    }

    let zero = Operator::zeros(2);
    assert!(matches!(extend::seminorm_is_norm_check(&x, &v, &zero, None, 10, 1), Err(Error::Precondition(_))));
}

#[test]
fn reference_report_passes() {
    let rep = extend::reference_examples();
    assert!(rep.pass, "{:?}", rep.entries.iter().filter(|e| !e.pass).collect::<Vec<_>>());
    assert_eq!(rep.entries.len(), 4);
}

#[test]
fn subspace_json_round_trip() {
    let v = Subspace::kernel_of(3, vec![rc(&[1.0, 2.0, 3.0])]).unwrap();
    let back = Subspace::from_json(&v.to_json(false), 3).unwrap();
    assert_eq!(back.to_json(false), v.to_json(false));
    let k = Subspace::from_json(&serde_json::json!({"kernel_of": [[1.0, 1.0, 0.0]]}), 3).unwrap();
    assert_eq!(k.dim(), 2);
}

