mod common;

use common::{block3, both, random_form, rel, safe_norm, sphere2};
use ymlattice_core::calculus::{coboundary, codifferential, cup, dual, green_boundary_term, inner_product};
use ymlattice_core::gauge::{
    anti_self_dual_part, bianchi_form, conjugate_form, covariant_d, gauge_transform, is_paired_gauge,
    left_gauge_dual_defect, right_gauge_dual_defect, self_dual_part, ym_residual_norm,
};
use ymlattice_core::{
    curvature, random_connection, random_gauge, sum_gauge, DirectionSet, Domain, Matrix2, MultiIndex, Su2Vector,
    SumProfile, Topology,
};

fn e(axis: usize) -> DirectionSet {
    DirectionSet::single(axis)
}

#[test]
fn curvature_matches_component_formula() {
    for d in both() {
        for seed in 0..20 {
            let a = random_connection(d, 1.0, seed).unwrap();
            let f = curvature(&a).unwrap();
            let mut worst: f64 = 0.0;
            for (chart, k) in d.interior_sites() {
                for i in 1..=4 {
                    for j in i + 1..=4 {
                        let at = |axis: usize, site: MultiIndex| a.get(chart, site, e(axis)).unwrap();
                        let ti = k.shift(i, 1);
                        let tj = k.shift(j, 1);
                        let direct = (at(j, ti) - at(j, k)) - (at(i, tj) - at(i, k)) + at(i, k) * at(j, ti)
                            - at(j, k) * at(i, tj);
                        let got = f.get(chart, k, DirectionSet::from_axes(&[i, j])).unwrap();
                        worst = worst.max((got - direct).max_abs());
                    }
                }
            }
            assert!(worst <= 1e-13, "{d:?} seed {seed}: {worst}");
        }
    }
}

#[test]
fn coboundary_squares_to_zero() {
    for d in both() {
        for p in 0..=2 {
            let f = random_form(d, p, 100 + p as u64);
            let dd = coboundary(&coboundary(&f).unwrap()).unwrap();
            assert!(safe_norm(&dd) <= 1e-12 * safe_norm(&f), "{d:?} p={p}");
        }
    }
}

#[test]
fn leibniz_rule() {
    for d in both() {
        for p in 0..=3 {
            for q in 0..=(3 - p) {
                for seed in 0..5 {
                    let f = random_form(d, p, 1000 + seed);
                    let g = random_form(d, q, 2000 + seed);
                    let lhs = coboundary(&cup(&f, &g).unwrap()).unwrap();
                    let a = cup(&coboundary(&f).unwrap(), &g).unwrap();
                    let b = cup(&f, &coboundary(&g).unwrap()).unwrap();
                    let rhs = if p % 2 == 0 { a.add(&b) } else { a.sub(&b) }.unwrap();
                    let defect = safe_norm(&lhs.sub(&rhs).unwrap());
                    assert!(rel(defect, safe_norm(&lhs)) <= 1e-10, "{d:?} p={p} q={q}: {defect}");
                }
            }
        }
    }
}

#[test]
fn green_formula_with_boundary_term() {
    for d in both() {
        for p in 1..=4 {
            for seed in 0..3 {
                let phi = random_form(d, p - 1, 10 * p as u64 + seed);
                let omega = random_form(d, p, 500 + 10 * p as u64 + seed);
                let lhs = inner_product(&coboundary(&phi).unwrap(), &omega).unwrap();
                let inner = inner_product(&phi, &codifferential(&omega).unwrap()).unwrap();
                let b = green_boundary_term(&phi, &omega).unwrap();
                let defect = (lhs - inner - b).norm();
                assert!(defect <= 1e-10 * (lhs.norm() + inner.norm()), "{d:?} p={p}: {defect}");
            }
        }
    }
}

#[test]
fn green_boundary_term_on_sphere_is_generically_nonzero() {
    // The codifferential is built from forward differences on both sides of
    // the star, so it is not the adjoint of the coboundary and the boundary
    // term absorbs the mismatch even without a boundary.
    let d = sphere2();
    let phi = random_form(d, 0, 1);
    let omega = random_form(d, 1, 2);
    assert!(green_boundary_term(&phi, &omega).unwrap().norm() > 1e-3);
}

#[test]
fn gauge_covariance_of_curvature() {
    for d in both() {
        for seed in 0..10 {
            let a = random_connection(d, 1.0, seed).unwrap();
            let h = random_gauge(d, 50 + seed);
            let transformed = gauge_transform(&a, &h).unwrap().field;
            let lhs = curvature(&transformed).unwrap();
            let rhs = conjugate_form(&curvature(&a).unwrap(), &h).unwrap();
            let defect = safe_norm(&lhs.sub(&rhs).unwrap());
            assert!(rel(defect, safe_norm(&rhs)) <= 1e-12, "{d:?} seed {seed}: {defect}");
        }
    }
}

#[test]
fn gauge_transforms_compose() {
    for d in both() {
        let a = random_connection(d, 1.0, 3).unwrap();
        let h = random_gauge(d, 4);
        let g = random_gauge(d, 5);
        let twice = gauge_transform(&gauge_transform(&a, &h).unwrap().field, &g)
            .unwrap()
            .field;
        let once = gauge_transform(&a, &g.compose(&h).unwrap()).unwrap().field;
        assert!(twice.sub(&once).unwrap().interior_max_abs() <= 1e-13);
    }
}

#[test]
fn paired_gauges_form_a_group() {
    for d in both() {
        let h = sum_gauge(d, SumProfile::Random, 1);
        let g = sum_gauge(d, SumProfile::Linear(Su2Vector::new(0.2, -0.5, 0.9)), 0);
        assert!(is_paired_gauge(&h).unwrap());
        assert!(is_paired_gauge(&h.inverse()).unwrap());
        assert!(is_paired_gauge(&h.compose(&g).unwrap()).unwrap());
    }
}

#[test]
fn ym_residual_is_invariant_under_paired_gauges() {
    for d in both() {
        for seed in 0..5 {
            let a = random_connection(d, 1.0, seed).unwrap();
            let h = sum_gauge(d, SumProfile::Random, 70 + seed);
            let before = ym_residual_norm(&a).unwrap();
            let after = ym_residual_norm(&gauge_transform(&a, &h).unwrap().field).unwrap();
            assert!(
                (before - after).abs() <= 1e-9 * before,
                "{d:?} seed {seed}: {before} vs {after}"
            );
        }
    }
}

#[test]
fn ym_residual_is_not_invariant_under_generic_gauges() {
    let d = sphere2();
    let a = random_connection(d, 1.0, 0).unwrap();
    let h = random_gauge(d, 1);
    let before = ym_residual_norm(&a).unwrap();
    let after = ym_residual_norm(&gauge_transform(&a, &h).unwrap().field).unwrap();
    assert!((before - after).abs() > 1e-3 * before);
}

#[test]
fn left_multiplication_commutes_with_dual() {
    for d in both() {
        for p in 0..=4 {
            let f = random_form(d, p, 300 + p as u64);
            let h = random_gauge(d, 301);
            let defect = left_gauge_dual_defect(&h, &f).unwrap();
            assert!(defect <= 1e-13 * safe_norm(&f), "{d:?} p={p}: {defect}");
        }
    }
}

#[test]
fn right_multiplication_commutes_with_dual_iff_gauge_is_paired() {
    for d in both() {
        let f = random_form(d, 2, 9);
        let good = sum_gauge(d, SumProfile::Random, 9);
        let bad = random_gauge(d, 9);
        assert!(right_gauge_dual_defect(&good, &f).unwrap() <= 1e-13 * safe_norm(&f));
        assert!(!is_paired_gauge(&bad).unwrap());
        assert!(right_gauge_dual_defect(&bad, &f).unwrap() > 1e-2 * safe_norm(&f));
    }
}

#[test]
fn right_gauge_dual_fails_for_a_single_unpaired_site() {
    // Identity everywhere except at one site.
    let d = sphere2();
    let flip = MultiIndex::new(2, 2, 1, 1);
    let mut form = ymlattice_core::GaugeField::identity(d).into_cochain();
    let chart = ymlattice_core::Chart::V;
    form.set(chart, flip, DirectionSet::EMPTY, Matrix2::lambda(1).scale(2.0))
        .unwrap();
    let h = ymlattice_core::GaugeField::new(form).unwrap();
    assert!(!is_paired_gauge(&h).unwrap());
    let f = random_form(d, 2, 3);
    assert!(right_gauge_dual_defect(&h, &f).unwrap() > 1e-3);
}

#[test]
fn covariant_bianchi_identity() {
    for d in both() {
        for seed in 0..10 {
            let a = random_connection(d, 1.0, seed).unwrap();
            let f = curvature(&a).unwrap();
            let defect = safe_norm(&bianchi_form(&a).unwrap());
            assert!(defect <= 1e-12 * (1.0 + safe_norm(&f)), "{d:?} seed {seed}: {defect}");
        }
    }
}

#[test]
fn bianchi_with_opposite_commutator_sign_fails() {
    // d^c F = A ∪ F - F ∪ A is violated; d^c F = F ∪ A - A ∪ F holds.
    let d = sphere2();
    let a = random_connection(d, 1.0, 11).unwrap();
    let f = curvature(&a).unwrap();
    let df = coboundary(&f).unwrap();
    let comm = cup(&a, &f).unwrap().sub(&cup(&f, &a).unwrap()).unwrap();
    assert!(safe_norm(&df.sub(&comm).unwrap()) > 1e-2 * safe_norm(&df));
    assert!(safe_norm(&df.add(&comm).unwrap()) <= 1e-12 * safe_norm(&df));
    let via_covariant = covariant_d(&a, &f).unwrap();
    assert!(via_covariant.sub(&df.add(&comm).unwrap()).unwrap().interior_max_abs() <= 1e-13);
}

#[test]
fn action_splits_into_self_dual_and_anti_self_dual_parts() {
    for d in both() {
        for seed in 0..10 {
            let f = curvature(&random_connection(d, 1.0, seed).unwrap()).unwrap();
            let fp = self_dual_part(&f).unwrap();
            let fm = anti_self_dual_part(&f).unwrap();
            let s = f.interior_norm_sq();
            let split = fp.interior_norm_sq() + fm.interior_norm_sq();
            assert!((s - split).abs() <= 1e-10 * s);
            assert!(inner_product(&fp, &fm).unwrap().norm() <= 1e-10 * s);
            assert!(dual(&fp).sub(&fp).unwrap().interior_max_abs() <= 1e-13);
            assert!(dual(&fm).add(&fm).unwrap().interior_max_abs() <= 1e-13);
        }
    }
}

#[test]
fn block_and_sphere_agree_away_from_the_gluing() {
    // Forms built from the same function agree at sites whose stencils do
    // not wrap, so the curvature does too.
    let s = Domain::sphere([3, 3, 3, 3]).unwrap();
    let b = block3();
    let field = |k: MultiIndex, axis: usize| {
        let t =
            k.0.iter()
                .enumerate()
                .map(|(i, &x)| (i + 1) as f64 * x as f64)
                .sum::<f64>();
        Su2Vector::new((0.3 * t + axis as f64).sin(), (0.2 * t).cos(), 0.1 * axis as f64)
    };
    let fs = curvature(&ymlattice_core::Connection::from_su2_fn(s, |_, k, i| field(k, i))).unwrap();
    let fb = curvature(&ymlattice_core::Connection::from_su2_fn(b, |_, k, i| field(k, i))).unwrap();
    assert_eq!(b.topology(), Topology::Block);
    for (chart, k) in b.interior_sites() {
        if k.0.iter().any(|&x| x >= 3) {
            continue;
        }
        for &p in DirectionSet::of_degree(2) {
            assert_eq!(fs.get(chart, k, p).unwrap(), fb.get(chart, k, p).unwrap());
        }
    }
}
