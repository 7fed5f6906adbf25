use std::f64::consts::PI;

use proptest::prelude::*;
use specdet::closedform::{example3_det, w0_closed};
use specdet::determinant::{
    boundary_right, det_interval, det_real_line, green_diagonal, wronskian, wronskian_beta_two, DetOptions,
    Method, Normalization, WronskianOptions,
};
use specdet::ode::{integrate, Tolerances};
use specdet::potential::{PerturbationSpec, PolyPiece, PotentialSpec};
use specdet::specfun::{bessel_i, bessel_k};

fn quartic_bump(alpha: f64) -> PotentialSpec {
    let q = PerturbationSpec::Polynomial { pieces: vec![PolyPiece { lo: 0.0, hi: 1.0, coeffs: vec![0.0, 0.0, 0.0, 0.0, 1.0] }] };
    PotentialSpec::new(4.0, alpha, q).unwrap()
}

fn step(alpha: f64) -> PotentialSpec {
    PotentialSpec::new(2.0, alpha, PerturbationSpec::step(-1.0, 1.0, 1.0)).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// `sqrt(x) Z_{1/6}(c x^3/3)` and its derivative for `Z = I` or `K`.
fn sextic_bessel(c: f64, x: f64, k: bool) -> (f64, f64) {
    let t = c.powf(1.0 / 3.0) * x;
    let z = t.powi(3) / 3.0;
    let s = c.powf(-1.0 / 6.0);
    if k {
        let v = bessel_k(1.0 / 6.0, z).unwrap().to_f64();
        let d = bessel_k(5.0 / 6.0, z).unwrap().to_f64();
        (s * t.sqrt() * v, -s * c.powf(1.0 / 3.0) * t.powf(2.5) * d)
    } else {
        let v = bessel_i(1.0 / 6.0, z).unwrap().to_f64();
        let d = bessel_i(-5.0 / 6.0, z).unwrap().to_f64();
        (s * t.sqrt() * v, s * c.powf(1.0 / 3.0) * t.powf(2.5) * d)
    }
}

#[test]
fn quartic_trajectory_matches_bessel_combination() {
    let tol = Tolerances::new(1e-12, 1e-14);
    let alpha = 3.0;
    let spec = quartic_bump(alpha);
    let w = |x: f64| spec.w(x);
    let start = boundary_right(4.0, 2.5, Normalization::RawBessel).unwrap();
    // outside the bump the recessive solution is the plain K form
    let at_one = integrate(w, start, 1.0, tol, &spec.breakpoints()).unwrap();
    let (k1, dk1) = sextic_bessel(1.0, 1.0, true);
    assert!(rel(at_one.y, k1) < 1e-9 && rel(at_one.dy, dk1) < 1e-9);
    // inside, w = (1 + alpha) x^4: a combination of the I and K forms with c = 2
    let c = (1.0 + alpha).sqrt();
    let (i0, di0) = sextic_bessel(c, 1.0, false);
    let (kk0, dkk0) = sextic_bessel(c, 1.0, true);
    let det = i0 * dkk0 - kk0 * di0;
    let a = (at_one.y * dkk0 - kk0 * at_one.dy) / det;
    let b = (i0 * at_one.dy - at_one.y * di0) / det;
    for x in [0.8, 0.5, 0.3, 0.05] {
        let got = integrate(w, at_one, x, tol, &spec.breakpoints()).unwrap();
        let (iv, div) = sextic_bessel(c, x, false);
        let (kv, dkv) = sextic_bessel(c, x, true);
        assert!(rel(got.y, a * iv + b * kv) < 1e-8, "x={x}");
        assert!(rel(got.dy, a * div + b * dkv) < 1e-8, "x={x}");
    }
}

#[test]
fn normalizations_differ_by_the_constant() {
    let opts = WronskianOptions::default();
    for beta in [1.0, 2.0, 3.0, 5.5] {
        let spec = PotentialSpec::new(beta, 1.3, PerturbationSpec::step(-0.4, 0.9, 1.0)).unwrap();
        let raw = wronskian(&spec, Normalization::RawBessel, &opts).unwrap().w;
        let norm = wronskian(&spec, Normalization::Normalized, &opts).unwrap().w;
        assert!(rel(norm * PI * (1.0 + 0.5 * beta), raw) < 1e-10, "beta={beta}");
    }
}

#[test]
fn non_integer_unperturbed_wronskian() {
    for beta in [0.5, 1.5, 2.7] {
        let spec = PotentialSpec::unperturbed(beta).unwrap();
        let r = wronskian(&spec, Normalization::RawBessel, &WronskianOptions::default()).unwrap();
        assert!(rel(r.w, w0_closed(beta).unwrap()) < 1e-8, "beta={beta}");
    }
}

#[test]
fn matching_point_does_not_matter() {
    let spec = step(-5.0);
    let w0 = wronskian(&spec, Normalization::RawBessel, &WronskianOptions::default()).unwrap().w;
    for c in [-1.0, -0.7, 0.37, 0.95] {
        let opts = WronskianOptions { matching_point: c, ..Default::default() };
        let w = wronskian(&spec, Normalization::RawBessel, &opts).unwrap().w;
        assert!(rel(w, w0) < 1e-9, "c={c}");
    }
    let outside = WronskianOptions { matching_point: 1.8, ..Default::default() };
    assert!(wronskian(&spec, Normalization::RawBessel, &outside).is_err());
}

#[test]
fn even_perturbation_gives_mirror_solutions() {
    let spec = step(2.5);
    let r = wronskian(&spec, Normalization::RawBessel, &WronskianOptions::default()).unwrap();
    let (l, rr) = (r.left_at_c, r.right_at_c);
    assert!(rel(l.y, rr.y) < 1e-9);
    assert!(rel(l.dy, -rr.dy) < 1e-9);
}

#[test]
fn reflected_perturbation_has_same_determinant() {
    let o = DetOptions::default();
    let right = PerturbationSpec::Polynomial { pieces: vec![PolyPiece { lo: 0.2, hi: 1.1, coeffs: vec![0.5, -1.0, 2.0, 0.3] }] };
    let left = PerturbationSpec::Polynomial { pieces: vec![PolyPiece { lo: -1.1, hi: -0.2, coeffs: vec![0.5, 1.0, 2.0, -0.3] }] };
    for beta in [1.0, 2.0, 3.0] {
        let a = det_real_line(&PotentialSpec::new(beta, 1.7, right.clone()).unwrap(), &o).unwrap().det.unwrap();
        let b = det_real_line(&PotentialSpec::new(beta, 1.7, left.clone()).unwrap(), &o).unwrap().det.unwrap();
        assert!(rel(a, b) < 1e-9, "beta={beta}");
    }
}

#[test]
fn quartic_bump_is_continuous_in_coupling() {
    let o = DetOptions::default();
    for i in 0..12 {
        let alpha = -0.9 + 0.5 * i as f64;
        let d = det_real_line(&quartic_bump(alpha), &o).unwrap();
        assert_eq!(d.method, Method::IntegerBeta);
        assert!(rel(d.det.unwrap(), example3_det(alpha).unwrap()) < 1e-8, "alpha={alpha}");
    }
}

#[test]
fn constant_interval_perturbation() {
    let tol = Tolerances::new(1e-12, 1e-14);
    for alpha in [0.5f64, 1.0, 4.0] {
        let exact = 2.0 * (2.0 * alpha.sqrt()).sinh() / alpha.sqrt();
        assert!(rel(det_interval(|_| 1.0, alpha, 2.0, tol, &[]).unwrap(), exact) < 1e-9);
    }
    let k = 3f64.sqrt();
    let exact = 2.0 * (2.0 * k).sin() / k;
    assert!(rel(det_interval(|_| 1.0, -3.0, 2.0, tol, &[]).unwrap(), exact) < 1e-9);
}

#[test]
fn harmonic_green_diagonal_at_origin() {
    let spec = PotentialSpec::unperturbed(2.0).unwrap();
    let g = green_diagonal(&spec, 0.0, Tolerances::new(1e-12, 1e-14)).unwrap();
    assert!(rel(g, 0.739_668_779_797_159_7) < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn harmonic_routes_agree(lo in -2.0f64..1.5, len in 0.1f64..2.0, alpha in -4.0f64..6.0, quad in any::<bool>()) {
        let q = if quad {
            PerturbationSpec::quadratic(lo, lo + len, 1.0)
        } else {
            PerturbationSpec::step(lo, lo + len, 1.0)
        };
        let spec = PotentialSpec::new(2.0, alpha, q).unwrap();
        let opts = WronskianOptions::default();
        let raw = wronskian(&spec, Normalization::RawBessel, &opts).unwrap();
        let pcf = wronskian_beta_two(&spec, &opts).unwrap();
        let bound = 1e-9 * pcf.w.abs().max(pcf.scale);
        prop_assert!((pcf.w - raw.w / (2.0 * PI)).abs() <= bound, "pcf={} raw={}", pcf.w, raw.w);
    }
}
