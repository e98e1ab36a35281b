use super::*;
use alloc::vec;
use alloc::vec::Vec;
use crate::measure::{Atom, Component, DensityShape};

fn chi01() -> Measure {
    Measure::indicator_interval(0.0, 1.0).unwrap()
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn bump(dim: Dim) -> Measure {
    Measure::from_components(
        dim,
        vec![Component::density(
            1.0,
            DensityShape::GaussianBump {
                center: Point::ORIGIN,
                width: 1.0,
            },
        )],
    )
    .unwrap()
}

fn default() -> (ScaleLadder, Thresholds) {
    (ScaleLadder::default(), Thresholds::default())
}

#[test]
fn ladder() {
    let l = ScaleLadder::default();
    let s = l.scales();
    assert_eq!(s.len(), 21);
    assert!(s.windows(2).all(|w| w[1] < w[0]));
    assert_eq!(s[20], 2f64.powi(-20));
    assert!(ScaleLadder::new(1.0, 1.0, 20).is_err());
    assert!(ScaleLadder::new(0.0, 0.5, 20).is_err());
    assert!(ScaleLadder::new(1.0, 0.5, 2).is_err());
    let third = ScaleLadder::new(2.0, 1.0 / 3.0, 6).unwrap().scales();
    assert!((third[6] - 2.0 / 729.0).abs() < 1e-15);
}

#[test]
fn symmetric_derivatives() {
    let (l, th) = default();
    let s = symmetric_derivative(&chi01(), Point::d1(0.0), &l, &th).unwrap();
    assert_eq!(s.kind, LimitKind::Exists);
    assert!((s.limit.unwrap() - c(0.5)).norm() < 1e-10);
    let z = Complex64::new(2.0, -1.0);
    let s = symmetric_derivative(&Measure::lebesgue(Dim::Two, z), Point::d2(0.3, 0.1), &l, &th).unwrap();
    assert!((s.limit.unwrap() - z).norm() < 1e-8);
    // q_k = 1 / (2 delta_k)
    let dirac = Measure::dirac(Dim::One, Point::d1(0.0)).unwrap();
    let s = symmetric_derivative(&dirac, Point::d1(0.0), &l, &th).unwrap();
    assert_eq!(s.kind, LimitKind::Infinite);
    for row in &s.rows {
        assert!((row.value.re - 0.5 / row.delta).abs() < 1e-9 / row.delta);
    }
    assert!(symmetric_derivative(&chi01(), Point::d2(0.0, 1.0), &l, &th).is_err());
}

#[test]
fn oscillating_ratio_has_no_limit() {
    // atoms at 2^-k with alternating sign make mu(B(0, 2^-k)) / 2^(1-k) swing
    let atoms = (1..60)
        .map(|k| Atom {
            at: Point::d1(0.75 * 2f64.powi(-k)),
            mass: c(if k % 2 == 0 { 1.0 } else { -1.0 } * 2f64.powi(-k)),
        })
        .collect();
    let mu = Measure::from_components(Dim::One, vec![Component::atoms(atoms)]).unwrap();
    let (l, th) = default();
    let s = symmetric_derivative(&mu, Point::d1(0.0), &l, &th).unwrap();
    assert_eq!(s.kind, LimitKind::NoLimit);
    let t = lebesgue_point_test(&mu, Point::d1(0.0), &l, &th).unwrap();
    assert_eq!(t.verdict, Verdict::No);
}

#[test]
fn lebesgue_points() {
    let (l, th) = default();
    let t = lebesgue_point_test(&chi01(), Point::d1(0.5), &l, &th).unwrap();
    assert_eq!(t.verdict, Verdict::Yes);
    assert!((t.limit.unwrap() - c(1.0)).norm() < 1e-10);
    // (delta |1 - L| + delta |L|) / (2 delta) at L = 1/2
    let t = lebesgue_point_test(&chi01(), Point::d1(0.0), &l, &th).unwrap();
    assert_eq!(t.verdict, Verdict::No);
    assert!((t.lower_bound.unwrap() - 0.5).abs() < 1e-8);
    let dirac = Measure::dirac(Dim::One, Point::d1(0.0)).unwrap();
    let t = lebesgue_point_test(&dirac, Point::d1(1.0), &l, &th).unwrap();
    assert_eq!(t.verdict, Verdict::Yes);
    assert_eq!(t.limit, Some(c(0.0)));
    let t = lebesgue_point_test(&dirac, Point::d1(0.0), &l, &th).unwrap();
    assert_eq!(t.verdict, Verdict::No);
}

#[test]
fn sigma_quotient() {
    // mu(B(r, r)) = 2r and mu(B(-r, r)) = 0 for r <= 1/2
    for &lv in &[0.0, 0.25, 0.5, 0.8, 1.0] {
        for &delta in &[0.5, 1e-3] {
            let e = sigma_quotient_sup(&chi01(), Point::d1(0.0), c(lv), delta).unwrap();
            let witness = f64::max((1.0 - lv).abs(), lv.abs());
            assert!(e.value >= witness - 1e-9, "L = {lv}");
            assert!(e.value >= 0.5 - 1e-9);
        }
    }
    let z = Complex64::new(0.5, 0.5);
    let e = sigma_quotient_sup(&Measure::lebesgue(Dim::Two, z), Point::d2(1.0, 1.0), z, 0.1).unwrap();
    assert!(e.value < 1e-8);
    let e = sigma_quotient_sup(&chi01(), Point::d1(0.5), c(1.0), 0.2).unwrap();
    assert!(e.value < 1e-9);
    assert!(sigma_quotient_sup(&chi01(), Point::d1(0.5), c(1.0), 0.0).is_err());
}

#[test]
fn sigma_points() {
    let (l, th) = default();
    let t = sigma_point_test(&chi01(), Point::d1(0.0), &l, &th).unwrap();
    assert_eq!(t.verdict, Verdict::No);
    assert!(t.lower_bound.unwrap() >= 0.49);
    assert!(t.rows.windows(2).all(|w| w[1].value.re <= w[0].value.re));
    for dim in [Dim::One, Dim::Two] {
        let x0 = if dim == Dim::One { Point::d1(0.3) } else { Point::d2(0.3, -0.2) };
        let t = sigma_point_test(&bump(dim), x0, &l, &th).unwrap();
        assert_eq!(t.verdict, Verdict::Yes, "{dim:?}");
        let f = (-x0.dot(x0) / 2.0).exp();
        assert!((t.limit.unwrap() - c(f)).norm() < 1e-6);
    }
    let dirac = Measure::dirac(Dim::One, Point::d1(0.0)).unwrap();
    let t = sigma_point_test(&dirac, Point::d1(1.0), &l, &th).unwrap();
    assert_eq!(t.verdict, Verdict::Yes);
    assert_eq!(t.limit, Some(c(0.0)));
}

#[test]
fn half_line_quotient_is_scale_free() {
    let mu = Measure::from_components(
        Dim::One,
        vec![Component::density(1.0, DensityShape::HalfSpace { axis: 0, at: 0.0 })],
    )
    .unwrap();
    let values: Vec<f64> = [1.0, 0.5, 1e-2, 2f64.powi(-20)]
        .iter()
        .map(|&d| sigma_quotient_sup(&mu, Point::d1(0.0), c(0.5), d).unwrap().value)
        .collect();
    for v in &values {
        assert!((v - values[0]).abs() < 1e-6);
    }
    assert!((values[0] - 0.5).abs() < 1e-9);
}

#[test]
fn strong_derivatives() {
    let (l, th) = default();
    let r = strong_derivative(&chi01(), Point::d1(0.0), &default_prototypes(Dim::One), &l, &th).unwrap();
    assert_eq!(r.verdict, Verdict::No);
    // (0, 2r) and (-2r, 0)
    let balls: Vec<Prototype> = r.witnesses.iter().map(|&i| r.prototypes[i].0).collect();
    assert_eq!(balls, vec![Prototype::new(Point::d1(1.0), 1.0), Prototype::new(Point::d1(-1.0), 1.0)]);
    assert!((r.prototypes[1].1.limit.unwrap() - c(1.0)).norm() < 1e-10);
    assert!(r.prototypes[2].1.limit.unwrap().norm() < 1e-10);

    let z = Complex64::new(-1.0, 3.0);
    let r = strong_derivative(&Measure::lebesgue(Dim::Two, z), Point::ORIGIN, &default_prototypes(Dim::Two), &l, &th).unwrap();
    assert_eq!(r.verdict, Verdict::Yes);
    assert!((r.limit.unwrap() - z).norm() < 1e-8);

    let x0 = Point::d2(-0.4, 0.7);
    let r = strong_derivative(&bump(Dim::Two), x0, &default_prototypes(Dim::Two), &l, &th).unwrap();
    assert_eq!(r.verdict, Verdict::Yes);
    assert!((r.limit.unwrap() - c((-x0.dot(x0) / 2.0).exp())).norm() < 1e-6);
    assert!(strong_derivative(&chi01(), Point::d1(0.0), &[], &l, &th).is_err());
}

#[test]
fn maximal_ratios() {
    let grid = default_ratio_grid();
    assert_eq!(grid.len(), 91);
    let m = maximal_ratio(&Measure::lebesgue(Dim::Two, 3.0), Point::d2(1.0, 2.0), &grid).unwrap();
    assert!((m.value - 3.0).abs() < 1e-7);
    assert!(!m.unbounded);
    // min(r, 1) / (2r)
    let m = maximal_ratio(&chi01(), Point::d1(0.0), &grid).unwrap();
    assert!((m.value - 0.5).abs() < 1e-9);
    for row in &m.rows {
        assert!((row.value.re - row.delta.min(1.0) / (2.0 * row.delta)).abs() < 1e-8);
    }
    let dirac = Measure::dirac(Dim::One, Point::d1(0.0)).unwrap();
    let m = maximal_ratio(&dirac, Point::d1(0.0), &grid).unwrap();
    assert!(m.unbounded);
    assert!((m.value - 0.5e6).abs() < 1e-3);
}

#[test]
fn classification() {
    let (l, th) = default();
    let r = classify_point(&chi01(), Point::d1(0.0), &l, &th).unwrap();
    assert!((r.symmetric.limit.unwrap() - c(0.5)).norm() < 1e-10);
    assert_eq!(r.lebesgue.verdict, Verdict::No);
    assert_eq!(r.sigma.verdict, Verdict::No);
    assert_eq!(r.strong.verdict, Verdict::No);

    let r = classify_point(&chi01(), Point::d1(0.5), &l, &th).unwrap();
    for v in [r.lebesgue.verdict, r.sigma.verdict, r.strong.verdict] {
        assert_eq!(v, Verdict::Yes);
    }
    assert!((r.strong.limit.unwrap() - c(1.0)).norm() < 1e-10);

    // the Cantor function is constant near the middle of the first gap
    let r = classify_point(&Measure::cantor(), Point::d1(0.5), &l, &th).unwrap();
    assert_eq!(r.symmetric.limit, Some(c(0.0)));
    for v in [r.lebesgue.verdict, r.sigma.verdict, r.strong.verdict] {
        assert_eq!(v, Verdict::Yes);
    }
}

#[test]
fn planar_edges_and_corners() {
    let (l, th) = default();
    let square = Measure::from_components(
        Dim::Two,
        vec![Component::density(
            1.0,
            DensityShape::IndicatorBox {
                lo: Point::d2(0.0, 0.0),
                hi: Point::d2(1.0, 1.0),
            },
        )],
    )
    .unwrap();
    let corner = classify_point(&square, Point::ORIGIN, &l, &th).unwrap();
    assert!((corner.symmetric.limit.unwrap() - c(0.25)).norm() < 1e-7);
    assert_eq!(corner.sigma.verdict, Verdict::No);
    assert_eq!(corner.strong.verdict, Verdict::No);
    let edge = classify_point(&square, Point::d2(0.0, 0.5), &l, &th).unwrap();
    assert!((edge.symmetric.limit.unwrap() - c(0.5)).norm() < 1e-7);
    assert_eq!(edge.lebesgue.verdict, Verdict::No);
    assert_eq!(edge.sigma.verdict, Verdict::No);
    let inside = classify_point(&square, Point::d2(0.5, 0.25), &l, &th).unwrap();
    assert_eq!(inside.sigma.verdict, Verdict::Yes);
    assert_eq!(inside.strong.verdict, Verdict::Yes);
}

#[test]
fn symmetric_derivative_of_a_translate() {
    let (l, th) = default();
    let mu = chi01()
        .with(Component::density(
            0.5,
            DensityShape::GaussianBump {
                center: Point::d1(0.2),
                width: 0.3,
            },
        ))
        .unwrap();
    for &x0 in &[0.0, 0.37, 1.0] {
        let a = symmetric_derivative(&mu, Point::d1(x0), &l, &th).unwrap();
        let b = symmetric_derivative(&mu.translate(Point::d1(x0)), Point::d1(0.0), &l, &th).unwrap();
        assert_eq!(a.kind, b.kind, "{x0}: {a:?} {b:?}");
        assert!((a.limit.unwrap() - b.limit.unwrap()).norm() <= a.error + b.error, "{x0}: {a:?}\n{b:?}");
    }
}
