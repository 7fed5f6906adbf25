//! Self-validation: named invariant checks across all modules.

use std::f64::consts::{PI, SQRT_2};
use std::time::{Duration, Instant};

use crate::Result;
use serde::Serialize;
use crate::closedform::{det0_integer, example1_w1, example3_det, w0_closed};
use crate::determinant::{det_interval, wronskian, wronskian_beta_two, Method, Normalization, WronskianOptions};
use crate::oracle::{
    eigenpairs, eigenvalues, green_diagonal_residuals, hellmann_feynman_residual, partial_product,
    product_comparison, OracleOptions,
};
use crate::specfun::{bessel_i, bessel_ik, bessel_k, gamma, pcf_d, pcf_d_prime};
use crate::{det_real_line, DetOptions, PerturbationSpec, PolyPiece, PotentialSpec, Tolerances};

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    #[serde(skip)]
    pub elapsed: Duration,
}

type Outcome = Result<(bool, String)>;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn five_point_first(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

fn five_point_second(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h)) / (12.0 * h * h)
}

fn worst(name: &str, err: f64, limit: f64) -> (bool, String) {
    (err <= limit, format!("max {name} {err:.3e} (limit {limit:.0e})"))
}

fn cancelled_well(b: f64) -> Result<PotentialSpec> {
    Ok(PotentialSpec::new(2.0, 1.0, PerturbationSpec::quadratic(0.0, 1.0, -1.0).with_right_end(b)?)?)
}

fn step(alpha: f64) -> PotentialSpec {
    PotentialSpec::new(2.0, alpha, PerturbationSpec::step(-1.0, 1.0, 1.0)).expect("valid step")
}

fn quartic_bump(alpha: f64) -> PotentialSpec {
    let q = PerturbationSpec::Polynomial { pieces: vec![PolyPiece { lo: 0.0, hi: 1.0, coeffs: vec![0.0, 0.0, 0.0, 0.0, 1.0] }] };
    PotentialSpec::new(4.0, alpha, q).expect("valid bump")
}

fn example_specs() -> Result<Vec<PotentialSpec>> {
    Ok(vec![cancelled_well(1.0)?, step(-5.0), step(1.0), quartic_bump(1.0), quartic_bump(3.0)])
}

fn gamma_reflection() -> Outcome {
    let mut err: f64 = 0.0;
    for i in 1..20 {
        let x = 0.05 * i as f64;
        err = err.max(rel(gamma(x)? * gamma(1.0 - x)?, PI / (PI * x).sin()));
    }
    Ok(worst("reflection error", err, 1e-13))
}

fn bessel_identities() -> Outcome {
    let mut err: f64 = 0.0;
    for nu in [-0.9, -0.5, -0.3, -1.0 / 6.0] {
        for z in [0.05, 0.5, 1.0, 3.0, 10.0] {
            let (i0, k0) = bessel_ik(nu, z)?;
            let (i1, k1) = bessel_ik(nu + 1.0, z)?;
            let lhs = i0.to_f64() * k1.to_f64() + i1.to_f64() * k0.to_f64();
            err = err.max(rel(lhs, 1.0 / z));
            err = err.max(rel(bessel_k(-nu, z)?.to_f64(), k0.to_f64()));
        }
    }
    Ok(worst("K symmetry / Wronskian identity error", err, 1e-12))
}

fn bessel_derivatives() -> Outcome {
    let mut err: f64 = 0.0;
    for nu in [1.0 / 6.0, 1.0 / 3.0, 0.5, 0.8] {
        for z in [0.3, 1.0, 2.5, 6.0] {
            let k = |x: f64| bessel_k(nu, x).unwrap().to_f64();
            let i = |x: f64| bessel_i(nu, x).unwrap().to_f64();
            let dk = -bessel_k(nu - 1.0, z)?.to_f64() - nu / z * k(z);
            let di = bessel_i(nu - 1.0, z)?.to_f64() - nu / z * i(z);
            err = err.max(rel(five_point_first(k, z, 1e-3), dk));
            err = err.max(rel(five_point_first(i, z, 1e-3), di));
        }
    }
    Ok(worst("derivative recurrence vs finite difference", err, 1e-7))
}

fn bessel_ode_residual() -> Outcome {
    let mut err: f64 = 0.0;
    for beta in 1..=4 {
        let beta = beta as f64;
        let nu = 1.0 / (2.0 + beta);
        let u = |z: f64| z.sqrt() * bessel_k(nu, 2.0 / (2.0 + beta) * z.powf(1.0 + 0.5 * beta)).unwrap().to_f64();
        for i in 0..=28 {
            let z = 0.2 + 0.1 * i as f64;
            err = err.max(rel(five_point_second(u, z, 3e-3), z.powf(beta) * u(z)));
        }
    }
    Ok(worst("recessive solution residual", err, 1e-7))
}

fn pcf_identities() -> Outcome {
    let mut err: f64 = 0.0;
    for nu in [-1.5, -0.5, 0.3, 0.5] {
        for i in 0..=16 {
            let z = -4.0 + 0.5 * i as f64;
            let f = |x: f64| pcf_d(nu, x).unwrap().to_f64();
            let coef = 0.25 * z * z - 0.5 - nu;
            let d2 = five_point_second(f, z, 1e-3);
            let scale = (coef * f(z)).abs().max(d2.abs()).max(f(z).abs());
            err = err.max((d2 - coef * f(z)).abs() / scale);
            let d1 = five_point_first(f, z, 1e-3);
            let exact = pcf_d_prime(nu, z)?.to_f64();
            err = err.max((d1 - exact).abs() / exact.abs().max(f(z).abs()));
        }
    }
    Ok(worst("Weber residual / derivative recurrence", err, 1e-7))
}

fn harmonic_det(o: &DetOptions) -> Outcome {
    let d = det_real_line(&PotentialSpec::unperturbed(2.0)?, o)?.det.unwrap_or(f64::NAN);
    Ok(worst("relative error vs sqrt(2)", rel(d, SQRT_2), 1e-8))
}

fn integer_beta(o: &DetOptions) -> Outcome {
    let mut err: f64 = 0.0;
    for beta in 1..=6 {
        let beta = beta as f64;
        let r = det_real_line(&PotentialSpec::unperturbed(beta)?, o)?;
        err = err.max(rel(r.w_zero.w, w0_closed(beta)?));
        err = err.max(rel(r.det.unwrap_or(f64::NAN), det0_integer(beta)?));
    }
    Ok(worst("W(0) / det error over beta = 1..6", err, 1e-8))
}

fn quartic_closed_form(o: &DetOptions) -> Outcome {
    let mut err = rel(det_real_line(&quartic_bump(0.0), o)?.w_zero.w, 6.0 * PI);
    for alpha in [-0.99, -0.5, 0.0, 1.0, 5.0, 20.0, 100.0] {
        let d = det_real_line(&quartic_bump(alpha), o)?.det.unwrap_or(f64::NAN);
        err = err.max(rel(d, example3_det(alpha)?));
    }
    Ok(worst("relative error", err, 1e-7))
}

fn cancelled_closed_form(o: &DetOptions) -> Outcome {
    let mut err: f64 = 0.0;
    for i in 0..=16 {
        let b = 0.25 * i as f64;
        let d = det_real_line(&cancelled_well(b)?, o)?.det.unwrap_or(f64::NAN);
        err = err.max(rel(d, example1_w1(b)?.to_f64()));
    }
    Ok(worst("relative error over b in [0, 4]", err, 1e-7))
}

fn constancy(o: &DetOptions) -> Outcome {
    let mut err: f64 = 0.0;
    for spec in example_specs()? {
        for s in [spec.clone(), spec.with_alpha(0.0)] {
            err = err.max(wronskian(&s, Normalization::RawBessel, &o.wronskian)?.constancy_residual);
        }
    }
    Ok(worst("Wronskian variation", err, 1e-7))
}

fn route_agreement(o: &DetOptions) -> Outcome {
    let mut err: f64 = 0.0;
    for spec in [cancelled_well(0.5)?, cancelled_well(2.0)?, step(-5.0), step(1.0)] {
        let raw = wronskian(&spec, Normalization::RawBessel, &o.wronskian)?;
        let pcf = wronskian_beta_two(&spec, &o.wronskian)?;
        err = err.max((pcf.w - raw.w / (2.0 * PI)).abs() / pcf.w.abs().max(pcf.scale));
        if det_real_line(&spec, o)?.method != Method::BetaTwoNormalized {
            return Ok((false, "beta = 2 did not use the parabolic-cylinder route".into()));
        }
    }
    Ok(worst("Bessel vs parabolic-cylinder Wronskian", err, 1e-9))
}

fn reflection_symmetry(o: &DetOptions) -> Outcome {
    let right = PerturbationSpec::Polynomial { pieces: vec![PolyPiece { lo: 0.2, hi: 1.1, coeffs: vec![0.5, -1.0, 2.0, 0.3] }] };
    let left = PerturbationSpec::Polynomial { pieces: vec![PolyPiece { lo: -1.1, hi: -0.2, coeffs: vec![0.5, 1.0, 2.0, -0.3] }] };
    let mut err: f64 = 0.0;
    for beta in [1.0, 2.0, 3.0] {
        let a = det_real_line(&PotentialSpec::new(beta, 1.7, right.clone())?, o)?.ratio;
        let b = det_real_line(&PotentialSpec::new(beta, 1.7, left.clone())?, o)?.ratio;
        err = err.max(rel(a, b));
    }
    let r = wronskian(&step(2.5), Normalization::RawBessel, &o.wronskian)?;
    err = err.max(rel(r.left_at_c.y, r.right_at_c.y)).max(rel(r.left_at_c.dy, -r.right_at_c.dy));
    Ok(worst("x -> -x mismatch", err, 1e-8))
}

fn matching_point(o: &DetOptions) -> Outcome {
    let spec = step(-5.0);
    let w0 = wronskian(&spec, Normalization::RawBessel, &o.wronskian)?.w;
    let mut err: f64 = 0.0;
    for c in [-1.0, -0.4, 0.6, 1.0] {
        let opts = WronskianOptions { matching_point: c, ..o.wronskian };
        err = err.max(rel(wronskian(&spec, Normalization::RawBessel, &opts)?.w, w0));
    }
    Ok(worst("W spread over matching points", err, 1e-8))
}

fn interval(tol: Tolerances) -> Outcome {
    let mut err: f64 = 0.0;
    for alpha in [0.5f64, 1.0, 4.0] {
        let exact = 2.0 * (2.0 * alpha.sqrt()).sinh() / alpha.sqrt();
        err = err.max(rel(det_interval(|_| 1.0, alpha, 2.0, tol, &[])?, exact));
    }
    Ok(worst("error vs 2 sinh(2 sqrt(a))/sqrt(a)", err, 1e-9))
}

fn hellmann_feynman() -> Outcome {
    let mut err: f64 = 0.0;
    for (spec, j) in [(step(0.0), 1), (quartic_bump(2.0), 3), (cancelled_well(1.0)?, 2)] {
        err = err.max(hellmann_feynman_residual(&spec, j, 1e-4, &OracleOptions::tight(j))?.residual);
    }
    Ok(worst("residual", err, 1e-5))
}

fn green_decreasing(oo: &OracleOptions) -> Outcome {
    let r = green_diagonal_residuals(&cancelled_well(1.0)?, 0.5, &[50, 200], oo)?;
    Ok((r[1].residual < r[0].residual, format!("N=50: {:.3e}, N=200: {:.3e}", r[0].residual, r[1].residual)))
}

fn harmonic_spectrum(oo: &OracleOptions) -> Outcome {
    let opts = OracleOptions { n: 10, half_width: Some(8.0), ..*oo };
    let est = eigenvalues(&PotentialSpec::unperturbed(2.0)?, &opts)?;
    let err = est.eigenvalues.iter().enumerate().map(|(k, l)| (l - (2 * k + 1) as f64).abs()).fold(0.0, f64::max);
    Ok(worst("|lambda_k - (2k-1)|", err, 1e-6))
}

fn growth_exponent(oo: &OracleOptions) -> Outcome {
    let mut err: f64 = 0.0;
    for beta in [1.0, 2.0, 4.0] {
        let est = eigenvalues(&PotentialSpec::unperturbed(beta)?, &OracleOptions { n: 60, ..*oo })?;
        err = err.max(rel(est.asym_fit.tau, 2.0 * beta / (beta + 2.0)));
    }
    Ok(worst("relative tau deviation", err, 0.05))
}

fn nodes_and_norms(oo: &OracleOptions) -> Outcome {
    let q = PerturbationSpec::Polynomial { pieces: vec![PolyPiece { lo: -1.0, hi: 1.0, coeffs: vec![1.0, 0.0, -2.0, 0.0, 1.0] }] };
    let pairs = eigenpairs(&PotentialSpec::new(2.0, 0.7, q)?, &OracleOptions { n: 8, ..*oo }, &[])?;
    let nodes_ok = pairs.iter().all(|p| p.nodes() + 1 == p.index);
    let err = pairs.iter().map(|p| (p.grid_norm - 1.0).abs()).fold(0.0, f64::max);
    let (ok, msg) = worst("|norm - 1|", err, 1e-8);
    Ok((ok && nodes_ok, format!("{msg}, node counts {}", if nodes_ok { "exact" } else { "wrong" })))
}

fn truncation(oo: &OracleOptions) -> Outcome {
    let spec = step(1.0);
    let opts = OracleOptions { n: 20, ..*oo };
    let a = eigenvalues(&spec, &opts)?;
    let b = eigenvalues(&spec, &OracleOptions { half_width: Some(1.25 * a.half_width), ..opts })?;
    let ok = a.eigenvalues.iter().zip(&b.eigenvalues).all(|(x, y)| (x - y).abs() < opts.tol * x.abs().max(1.0));
    let err = a.eigenvalues.iter().zip(&b.eigenvalues).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    Ok((ok, format!("max change {err:.3e} with L x 1.25")))
}

fn unit_product(oo: &OracleOptions) -> Outcome {
    let f = partial_product(&PotentialSpec::unperturbed(3.0)?, &OracleOptions { n: 30, ..*oo })?;
    Ok((f == 1.0, format!("f_N = {f}")))
}

fn product_convergence(oo: &OracleOptions) -> Outcome {
    let spec = quartic_bump(1.0);
    let target = example3_det(1.0)? / 2.0;
    let p = product_comparison(&spec, &OracleOptions { n: 100, ..*oo }, &[25, 50, 100])?;
    let errs: Vec<f64> = p.prefixes.iter().map(|(_, f)| rel(*f, target)).collect();
    let eps = p.perturbed.asym_fit.eps_proxy.unwrap_or(f64::NAN);
    let ok = errs.windows(2).all(|e| e[1] < e[0]) && eps > 0.0;
    let shown: Vec<String> = errs.iter().map(|e| format!("{e:.2e}")).collect();
    Ok((ok, format!("errors [{}] at N = 25, 50, 100; eps proxy {eps:.3}", shown.join(", "))))
}

/// Runs every check with the given solver tolerances. Derivative checks in
/// the oracle always use tight settings.
pub fn run_checks(tol: Tolerances) -> Vec<CheckResult> {
    let det = DetOptions { wronskian: WronskianOptions { tol, matching_point: 0.0 }, det0: None };
    let oo = OracleOptions { ode: tol, ..Default::default() };
    let checks: Vec<(&'static str, Box<dyn Fn() -> Outcome>)> = vec![
        ("gamma_reflection", Box::new(gamma_reflection)),
        ("bessel_identities", Box::new(bessel_identities)),
        ("bessel_derivative_recurrence", Box::new(bessel_derivatives)),
        ("bessel_ode_residual", Box::new(bessel_ode_residual)),
        ("pcf_weber_and_recurrence", Box::new(pcf_identities)),
        ("harmonic_det", Box::new(move || harmonic_det(&det))),
        ("integer_beta_unperturbed", Box::new(move || integer_beta(&det))),
        ("quartic_bump_closed_form", Box::new(move || quartic_closed_form(&det))),
        ("cancelled_well_closed_form", Box::new(move || cancelled_closed_form(&det))),
        ("wronskian_constancy", Box::new(move || constancy(&det))),
        ("beta_two_route_agreement", Box::new(move || route_agreement(&det))),
        ("reflection_symmetry", Box::new(move || reflection_symmetry(&det))),
        ("matching_point_independence", Box::new(move || matching_point(&det))),
        ("interval_determinant", Box::new(move || interval(tol))),
        ("hellmann_feynman", Box::new(hellmann_feynman)),
        ("green_diagonal_decreasing", Box::new(move || green_decreasing(&oo))),
        ("harmonic_spectrum", Box::new(move || harmonic_spectrum(&oo))),
        ("growth_exponent", Box::new(move || growth_exponent(&oo))),
        ("nodes_and_norms", Box::new(move || nodes_and_norms(&oo))),
        ("truncation_stability", Box::new(move || truncation(&oo))),
        ("unit_product_for_zero_q", Box::new(move || unit_product(&oo))),
        ("product_convergence", Box::new(move || product_convergence(&oo))),
    ];
    checks
        .into_iter()
        .map(|(name, f)| {
            let t = Instant::now();
            let (passed, detail) = match f() {
                Ok(v) => v,
                Err(e) => (false, format!("error: {e:#}")),
            };
            CheckResult { name, passed, detail, elapsed: t.elapsed() }
        })
        .collect()
}

pub fn render(results: &[CheckResult]) -> String {
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut s = String::new();
    for r in results {
        let mark = if r.passed { "PASS" } else { "FAIL" };
        s += &format!("{mark}  {:width$}  {:>8.2}s  {}\n", r.name, r.elapsed.as_secs_f64(), r.detail);
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    s += &format!("{} checks, {} failed\n", results.len(), failed);
    s
}
