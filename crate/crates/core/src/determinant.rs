//! Determinants from the Wronskian of the two recessive solutions.
//!
//! Outside `[a, b]` the equation is `y'' = |x|^beta y`, whose solutions
//! decaying at `+inf` / `-inf` are `sqrt(|x|) K_nu(zeta)` with
//! `nu = 1/(beta+2)` and `zeta = 2|x|^{1+beta/2}/(beta+2)`. Their values at
//! `b` and `a` start two inward integrations through the perturbed region;
//! the Wronskian at the matching point `c` gives `W(alpha)`, and
//! `det(T_alpha) = det(T_0) W(alpha)/W(0)`.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::closedform::{det0_integer, w0_closed};
use crate::error::{Error, Result};
use crate::ode::{integrate, integrate_sampled, State, Tolerances};
use crate::potential::PotentialSpec;
use crate::specfun::{bessel_k, gamma, pcf_d, SpecialValue};

/// Endpoints closer to the origin than this use the limiting values.
pub const ORIGIN_THRESHOLD: f64 = 1e-8;
/// `|W| < NEAR_ZERO * |y_-(c)| |y_+(c)|` counts as a zero eigenvalue.
pub const NEAR_ZERO: f64 = 1e-10;
/// Accepted relative drift of `W` across the interval.
pub const CONSTANCY_LIMIT: f64 = 1e-7;
/// Allowed mismatch between numerical and closed-form `W(0)`.
pub const W0_CHECK: f64 = 1e-8;
/// Allowed mismatch between the two determinant routes at `beta = 2`.
pub const ROUTE_CHECK: f64 = 1e-9;
/// Half-width of the integration window when `q = 0` leaves `[a, b] = {0}`.
pub const UNPERTURBED_WINDOW: f64 = 1.0;
const CONSTANCY_GRID: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `y_+(x) = sqrt(x) K_nu(zeta)` as is.
    RawBessel,
    /// `v_+ = y_+ / sqrt(pi (1 + beta/2))`; the Wronskian of these is the
    /// determinant itself for integer `beta`.
    Normalized,
}

impl Normalization {
    pub fn factor(self, beta: f64) -> f64 {
        match self {
            Normalization::RawBessel => 1.0,
            Normalization::Normalized => 1.0 / (PI * (1.0 + 0.5 * beta)).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    IntegerBeta,
    BetaTwoNormalized,
    RatioOnly,
    Interval,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::IntegerBeta => "integer_beta",
            Method::BetaTwoNormalized => "beta_two_normalized",
            Method::RatioOnly => "ratio_only",
            Method::Interval => "interval",
        }
    }
}

/// A state whose true value is `state * e^{log_scale}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledState {
    pub state: State,
    pub log_scale: f64,
}

impl ScaledState {
    fn from_pair(x: f64, y: SpecialValue, dy: SpecialValue) -> Self {
        let e = if y.is_zero() {
            dy.scale_exponent
        } else if dy.is_zero() {
            y.scale_exponent
        } else {
            y.scale_exponent.max(dy.scale_exponent)
        };
        let shrink = |v: SpecialValue| v.value * (v.scale_exponent - e).exp();
        ScaledState { state: State::new(x, shrink(y), shrink(dy)), log_scale: e }
    }

    pub fn to_state(self) -> State {
        self.state.scaled(self.log_scale.exp())
    }
}

/// Initial data for `y_-` at `a` and `y_+` at `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryData {
    pub left: ScaledState,
    pub right: ScaledState,
    pub normalization: Normalization,
}

/// `(y_+(x), -y_+'(x))` for `x >= 0`, raw Bessel normalization.
fn recessive_raw(beta: f64, x: f64) -> Result<(SpecialValue, SpecialValue)> {
    let nu = 1.0 / (beta + 2.0);
    if x < ORIGIN_THRESHOLD {
        let y = 0.5 * gamma(nu)? * (beta + 2.0).powf(nu);
        let dy = 0.5 * gamma(1.0 - nu)? * (beta + 2.0).powf(1.0 - nu);
        return Ok((SpecialValue::from_f64(y), SpecialValue::from_f64(dy)));
    }
    let zeta = 2.0 / (beta + 2.0) * x.powf(1.0 + 0.5 * beta);
    let y = bessel_k(nu, zeta)?.scale(x.sqrt());
    let dy = bessel_k(1.0 - nu, zeta)?.scale(x.powf(0.5 * (beta + 1.0)));
    Ok((y, dy))
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidPotential(format!("beta must be positive, got {beta}")))
    }
}

/// `y_-` and `y_-'` at `a <= 0`, scaled.
pub fn boundary_left_scaled(beta: f64, a: f64, norm: Normalization) -> Result<ScaledState> {
    check_beta(beta)?;
    if !(a <= 0.0) {
        return Err(Error::Domain(format!("left endpoint must be <= 0, got {a}")));
    }
    let (y, dy) = recessive_raw(beta, -a)?;
    let f = norm.factor(beta);
    Ok(ScaledState::from_pair(a, y.scale(f), dy.scale(f)))
}

/// `y_+` and `y_+'` at `b >= 0`, scaled.
pub fn boundary_right_scaled(beta: f64, b: f64, norm: Normalization) -> Result<ScaledState> {
    check_beta(beta)?;
    if !(b >= 0.0) {
        return Err(Error::Domain(format!("right endpoint must be >= 0, got {b}")));
    }
    let (y, dy) = recessive_raw(beta, b)?;
    let f = norm.factor(beta);
    Ok(ScaledState::from_pair(b, y.scale(f), dy.scale(-f)))
}

/// `(a, y_-(a), y_-'(a))`. Underflows for endpoints far out in the tail;
/// use [`boundary_left_scaled`] there.
pub fn boundary_left(beta: f64, a: f64, norm: Normalization) -> Result<State> {
    Ok(boundary_left_scaled(beta, a, norm)?.to_state())
}

/// `(b, y_+(b), y_+'(b))`.
pub fn boundary_right(beta: f64, b: f64, norm: Normalization) -> Result<State> {
    Ok(boundary_right_scaled(beta, b, norm)?.to_state())
}

/// `beta = 2` data from parabolic cylinder functions:
/// `v_+(x) = 2^{-1/4} D_{-1/2}(sqrt(2) x)`, `v_-(x) = v_+(-x)`, already in
/// the normalized convention.
pub fn boundary_beta_two_pcf(a: f64, b: f64) -> Result<BoundaryData> {
    if !(a <= 0.0 && b >= 0.0) {
        return Err(Error::Domain(format!("need a <= 0 <= b, got [{a}, {b}]")));
    }
    let c1 = 2f64.powf(-0.25);
    let c2 = 2f64.powf(0.25);
    // v_+(b), v_+'(b) = 2^{-1/4} b D_{-1/2} - 2^{1/4} D_{1/2}
    let dm = pcf_d(-0.5, SQRT_2 * b)?;
    let dp = pcf_d(0.5, SQRT_2 * b)?;
    let right = ScaledState::from_pair(b, dm.scale(c1), dm.scale(c1 * b).sub(dp.scale(c2)));
    // v_-(a) = 2^{-1/4} D_{-1/2}(-sqrt 2 a), v_-'(a) = 2^{-1/4} a D_{-1/2} + 2^{1/4} D_{1/2}
    let dm = pcf_d(-0.5, -SQRT_2 * a)?;
    let dp = pcf_d(0.5, -SQRT_2 * a)?;
    let left = ScaledState::from_pair(a, dm.scale(c1), dm.scale(c1 * a).add(dp.scale(c2)));
    Ok(BoundaryData { left, right, normalization: Normalization::Normalized })
}

pub fn boundary_data(beta: f64, a: f64, b: f64, norm: Normalization) -> Result<BoundaryData> {
    Ok(BoundaryData {
        left: boundary_left_scaled(beta, a, norm)?,
        right: boundary_right_scaled(beta, b, norm)?,
        normalization: norm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WronskianOptions {
    pub tol: Tolerances,
    /// Matching point `c`; must lie in the integration interval.
    pub matching_point: f64,
}

impl Default for WronskianOptions {
    fn default() -> Self {
        WronskianOptions { tol: Tolerances::default(), matching_point: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WronskianResult {
    /// `y_-'(c) y_+(c) - y_-(c) y_+'(c)`.
    pub w: f64,
    pub c: f64,
    /// `max_x |W(x) - W(c)| / |W(c)|` over a uniform grid of the interval.
    pub constancy_residual: f64,
    pub alpha: f64,
    pub normalization: Normalization,
    /// `|(y_-, y_-')(c)| |(y_+, y_+')(c)|`, the size `W` is compared with.
    pub scale: f64,
    pub left_at_c: State,
    pub right_at_c: State,
    /// The interval actually integrated over.
    pub interval: (f64, f64),
}

/// `[a, b]` of the potential, widened to a window around the origin when `q = 0`
/// shrinks it to a point (so the Wronskian still comes from integration).
pub fn integration_interval(spec: &PotentialSpec) -> (f64, f64) {
    let (a, b) = spec.support();
    if a == b {
        (-UNPERTURBED_WINDOW, UNPERTURBED_WINDOW)
    } else {
        (a, b)
    }
}

fn grid(a: f64, b: f64, c: f64) -> Vec<f64> {
    let mut g: Vec<f64> = (0..=CONSTANCY_GRID).map(|i| a + (b - a) * i as f64 / CONSTANCY_GRID as f64).collect();
    g.push(c);
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

fn norm2(s: State) -> f64 {
    s.y.hypot(s.dy)
}

fn wronskian_from(spec: &PotentialSpec, data: BoundaryData, opts: &WronskianOptions) -> Result<WronskianResult> {
    let (a, b) = (data.left.state.x, data.right.state.x);
    let c = opts.matching_point;
    if !(a <= c && c <= b) {
        return Err(Error::Domain(format!("matching point {c} outside [{a}, {b}]")));
    }
    // the grid is read off the continuous extension so it leaves the step
    // sizes (and hence the measured drift) to the tolerance alone
    let nodes = grid(a, b, c);
    let mut stops = spec.breakpoints();
    stops.push(c);
    let w = |x: f64| spec.w(x);
    let (left, right) = rayon::join(
        || integrate_sampled(w, data.left.state, b, opts.tol, &stops, &nodes),
        || integrate_sampled(w, data.right.state, a, opts.tol, &stops, &nodes),
    );
    let (left, right) = (left?, right?);
    let wr = |i: usize| -> (f64, State, State) {
        let (l, r) = (left[i], right[i]);
        (l.dy * r.y - l.y * r.dy, l, r)
    };
    let ic = nodes.iter().position(|&x| x == c).expect("matching point is a node");
    let (wc, lc, rc) = wr(ic);
    let scale = norm2(lc) * norm2(rc);
    let mut drift: f64 = 0.0;
    for i in 0..nodes.len() {
        drift = drift.max((wr(i).0 - wc).abs());
    }
    let unscale = (data.left.log_scale + data.right.log_scale).exp();
    let (el, er) = (data.left.log_scale.exp(), data.right.log_scale.exp());
    let result = WronskianResult {
        w: wc * unscale,
        c,
        constancy_residual: drift / wc.abs(),
        alpha: spec.alpha,
        normalization: data.normalization,
        scale: scale * unscale,
        left_at_c: lc.scaled(el),
        right_at_c: rc.scaled(er),
        interval: (a, b),
    };
    if wc.abs() < NEAR_ZERO * scale {
        return Err(Error::NearZeroWronskian { alpha: spec.alpha, w: result.w });
    }
    Ok(result)
}

/// `W(alpha)` for the potential's `alpha`.
pub fn wronskian(spec: &PotentialSpec, norm: Normalization, opts: &WronskianOptions) -> Result<WronskianResult> {
    let (a, b) = integration_interval(spec);
    wronskian_from(spec, boundary_data(spec.beta, a, b, norm)?, opts)
}

/// `W(alpha)` for `beta = 2` from parabolic-cylinder boundary data
/// (normalized convention); independent of the Bessel route.
pub fn wronskian_beta_two(spec: &PotentialSpec, opts: &WronskianOptions) -> Result<WronskianResult> {
    if spec.beta != 2.0 {
        return Err(Error::Domain(format!("parabolic-cylinder route needs beta = 2, got {}", spec.beta)));
    }
    let (a, b) = integration_interval(spec);
    wronskian_from(spec, boundary_beta_two_pcf(a, b)?, opts)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetOptions {
    pub wronskian: WronskianOptions,
    /// `det(T_0)` supplied by the caller for non-integer `beta`.
    pub det0: Option<f64>,
}

impl Default for DetOptions {
    fn default() -> Self {
        DetOptions { wronskian: WronskianOptions::default(), det0: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeterminantResult {
    /// `W(alpha)/W(0)`.
    pub ratio: f64,
    pub det0: Option<f64>,
    pub det: Option<f64>,
    pub method: Method,
    pub w_alpha: WronskianResult,
    pub w_zero: WronskianResult,
    /// The normalized parabolic-cylinder Wronskian at `beta = 2`.
    pub normalized: Option<WronskianResult>,
}

impl DeterminantResult {
    pub fn max_constancy_residual(&self) -> f64 {
        let mut r = self.w_alpha.constancy_residual.max(self.w_zero.constancy_residual);
        if let Some(n) = &self.normalized {
            r = r.max(n.constancy_residual);
        }
        r
    }
}

/// `det(T_alpha)` on the real line.
pub fn det_real_line(spec: &PotentialSpec, opts: &DetOptions) -> Result<DeterminantResult> {
    let base = spec.with_alpha(0.0);
    let wo = &opts.wronskian;
    let (wa, w0) = rayon::join(
        || wronskian(spec, Normalization::RawBessel, wo),
        || wronskian(&base, Normalization::RawBessel, wo),
    );
    let wa = wa?;
    let w0 = match w0 {
        Err(Error::NearZeroWronskian { w, .. }) => return Err(Error::VanishingUnperturbedDeterminant { w0: w }),
        other => other?,
    };
    let integer = spec.integer_beta().filter(|&n| n >= 1);
    if integer.is_some() {
        let closed = w0_closed(spec.beta)?;
        if ((w0.w - closed) / closed).abs() > W0_CHECK {
            return Err(Error::UnperturbedWronskianMismatch { numeric: w0.w, closed });
        }
    }
    let ratio = wa.w / w0.w;
    if spec.beta == 2.0 {
        let wn = wronskian_beta_two(spec, wo)?;
        let det0 = det0_integer(2.0)?;
        let via_ratio = ratio * det0;
        if (wn.w - via_ratio).abs() > ROUTE_CHECK * wn.w.abs().max(wn.scale) {
            return Err(Error::RouteMismatch { integer_beta: via_ratio, normalized: wn.w });
        }
        return Ok(DeterminantResult {
            ratio,
            det0: Some(det0),
            det: Some(wn.w),
            method: Method::BetaTwoNormalized,
            w_alpha: wa,
            w_zero: w0,
            normalized: Some(wn),
        });
    }
    let (det0, method) = match integer {
        Some(_) => (Some(det0_integer(spec.beta)?), Method::IntegerBeta),
        None => (opts.det0, Method::RatioOnly),
    };
    Ok(DeterminantResult {
        ratio,
        det0,
        det: det0.map(|d| ratio * d),
        method,
        w_alpha: wa,
        w_zero: w0,
        normalized: None,
    })
}

/// Dirichlet determinant of `-d^2/dx^2 + alpha q` on `[0, length]`, normalized
/// so that `alpha = 0` on the unit interval gives 2: solve `y'' = alpha q y`,
/// `y(0) = 0`, `y'(0) = 1`, and return `2 y(length)`.
pub fn det_interval<Q: Fn(f64) -> f64>(
    q: Q,
    alpha: f64,
    length: f64,
    tol: Tolerances,
    breakpoints: &[f64],
) -> Result<f64> {
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::Domain(format!("interval length must be positive, got {length}")));
    }
    let end = integrate(|x| alpha * q(x), State::new(0.0, 0.0, 1.0), length, tol, breakpoints)?;
    Ok(2.0 * end.y)
}

/// Diagonal of the Green's function, `G(x, x) = y_-(x) y_+(x) / W`.
pub fn green_diagonal(spec: &PotentialSpec, x: f64, tol: Tolerances) -> Result<f64> {
    let (a, b) = integration_interval(spec);
    let data = boundary_data(spec.beta, a, b, Normalization::RawBessel)?;
    let bp = spec.breakpoints();
    let w = |t: f64| spec.w(t);
    let l = integrate(w, data.left.state, x, tol, &bp)?;
    let r = integrate(w, data.right.state, x, tol, &bp)?;
    let wr = l.dy * r.y - l.y * r.dy;
    if wr.abs() < NEAR_ZERO * norm2(l) * norm2(r) {
        return Err(Error::NearZeroWronskian { alpha: spec.alpha, w: wr });
    }
    Ok(l.y * r.y / wr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::PerturbationSpec;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn origin_limits() {
        let l = boundary_left(4.0, 0.0, Normalization::RawBessel).unwrap();
        let g16 = gamma(1.0 / 6.0).unwrap();
        let g56 = gamma(5.0 / 6.0).unwrap();
        assert!(rel(l.y, 3f64.powf(1.0 / 6.0) * 2f64.powf(-5.0 / 6.0) * g16) < 1e-14);
        assert!(rel(l.dy, 3f64.powf(5.0 / 6.0) * 2f64.powf(-1.0 / 6.0) * g56) < 1e-14);

        let l = boundary_left(2.0, 0.0, Normalization::Normalized).unwrap();
        let r = boundary_right(2.0, 0.0, Normalization::Normalized).unwrap();
        let v0 = PI.sqrt() / (SQRT_2 * gamma(0.75).unwrap());
        let dv0 = (2.0 * PI).sqrt() / gamma(0.25).unwrap();
        assert!(rel(l.y, v0) < 1e-14 && rel(l.dy, dv0) < 1e-14);
        assert!(rel(r.y, v0) < 1e-14 && rel(r.dy, -dv0) < 1e-14);
    }

    #[test]
    fn bessel_values_away_from_origin() {
        // mpmath: K_{1/4}(1/2), K_{3/4}(1/2), K_{1/6}(1/3), K_{5/6}(1/3)
        let l = boundary_left(2.0, -1.0, Normalization::RawBessel).unwrap();
        assert!(rel(l.y, 0.960_316_324_931_886_02) < 1e-12);
        assert!(rel(l.dy, 1.291_749_816_217_912_7) < 1e-12);
        let r = boundary_right(4.0, 1.0, Normalization::RawBessel).unwrap();
        assert!(rel(r.y, 1.305_398_862_091_974_8) < 1e-12);
        assert!(rel(r.dy, -2.174_051_683_071_299_6) < 1e-12);
    }

    #[test]
    fn mirror_symmetry() {
        for &beta in &[0.7, 1.0, 2.0, 3.5] {
            for &s in &[0.0, 1e-9, 0.3, 1.0, 2.5] {
                let r = boundary_right(beta, s, Normalization::RawBessel).unwrap();
                let l = boundary_left(beta, -s, Normalization::RawBessel).unwrap();
                assert_eq!((r.y, r.dy), (l.y, -l.dy));
            }
        }
    }

    #[test]
    fn pcf_and_bessel_data_agree_at_beta_two() {
        for &(a, b) in &[(0.0, 0.0), (-1.0, 0.5), (-0.2, 3.0), (-6.0, 6.0)] {
            let pcf = boundary_beta_two_pcf(a, b).unwrap();
            let bes = boundary_data(2.0, a, b, Normalization::Normalized).unwrap();
            for (p, q) in [(pcf.left, bes.left), (pcf.right, bes.right)] {
                let (p, q) = (p.to_state(), q.to_state());
                assert!(rel(p.y, q.y) < 1e-11 && rel(p.dy, q.dy) < 1e-11, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn scaled_data_survive_far_tails() {
        let r = boundary_right_scaled(2.0, 40.0, Normalization::RawBessel).unwrap();
        assert!(r.state.y > 0.0 && r.state.dy < 0.0);
        assert!(r.log_scale < -700.0);
        assert_eq!(boundary_right(2.0, 40.0, Normalization::RawBessel).unwrap().y, 0.0);
    }

    #[test]
    fn harmonic_wronskian() {
        let spec = PotentialSpec::unperturbed(2.0).unwrap();
        let w = wronskian(&spec, Normalization::RawBessel, &WronskianOptions::default()).unwrap();
        assert!(rel(w.w, 2.0 * SQRT_2 * PI) < 1e-9);
        assert!(w.constancy_residual < CONSTANCY_LIMIT);
        assert_eq!(w.interval, (-1.0, 1.0));
    }

    #[test]
    fn rejects_bad_endpoints() {
        assert!(boundary_left(2.0, 0.5, Normalization::RawBessel).is_err());
        assert!(boundary_right(2.0, -0.5, Normalization::RawBessel).is_err());
        assert!(boundary_right(0.0, 1.0, Normalization::RawBessel).is_err());
    }

    #[test]
    fn free_interval_determinant() {
        assert!((det_interval(|_| 1.0, 0.0, 1.0, Tolerances::default(), &[]).unwrap() - 2.0).abs() < 1e-14);
        let d = det_interval(|_| 1.0, 1.0, 1.0, Tolerances::default(), &[]).unwrap();
        assert!(rel(d, 2.0 * 1f64.sinh()) < 1e-10);
    }

    #[test]
    fn near_zero_wronskian_detected() {
        // the first even level of the harmonic oscillator crossed by a step:
        // scan alpha for a sign change of W and refine to hit it closely
        let spec = PotentialSpec::new(2.0, 0.0, PerturbationSpec::step(-1.0, 1.0, 1.0)).unwrap();
        let opts = WronskianOptions::default();
        let w = |a: f64| wronskian(&spec.with_alpha(a), Normalization::RawBessel, &opts).map(|r| r.w);
        let (mut lo, mut hi) = (-3.0, -1.0);
        assert!(w(lo).unwrap().signum() != w(hi).unwrap().signum());
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            match w(mid) {
                Ok(v) if v.signum() == w(lo).unwrap().signum() => lo = mid,
                Ok(_) => hi = mid,
                Err(Error::NearZeroWronskian { .. }) => return,
                Err(e) => panic!("{e}"),
            }
        }
        panic!("zero of W never flagged");
    }
}
