//! Eigenvalue oracle: the low Dirichlet spectrum of `-d^2/dx^2 + w` on
//! `[-L, L]` by Prufer shooting, and the checks built on it (truncated
//! spectral products, Hellmann-Feynman, Green's function diagonal).
//!
//! Only `w` and the Dirichlet conditions enter here; none of the boundary
//! data of the determinant pipeline is reused.
//!
//! Scaled Prufer variables `y = R sin(theta)`, `y' = s R cos(theta)`:
//!
//! ```text
//! theta' = s cos^2(theta) - ((w - lambda)/s) sin^2(theta)
//! (ln R)' = (s + (w - lambda)/s) sin(theta) cos(theta)
//! ```
//!
//! With `theta = 0` at both walls, `F(lambda) = theta_left(0) - theta_right(0)`
//! increases through `k pi` exactly at the k-th eigenvalue, so
//! `floor(F/pi)` counts eigenvalues below `lambda`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::determinant::green_diagonal;
use crate::error::{Error, Result};
use crate::ode::{solve, Tolerances};
use crate::potential::PotentialSpec;
use crate::specfun::gamma;

/// Uniform panels of the eigenfunction grid on `[-L, L]`.
pub const GRID_PANELS: usize = 2048;
const MAX_BRACKET_EXPANSIONS: usize = 80;
const MAX_ROOT_ITERATIONS: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleOptions {
    /// Number of eigenvalues.
    pub n: usize,
    /// Truncation half-width `L`; `None` picks [`heuristic_half_width`].
    pub half_width: Option<f64>,
    /// Eigenvalue tolerance, relative to `max(1, |lambda|)`.
    pub tol: f64,
    pub ode: Tolerances,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { n: 100, half_width: None, tol: 1e-8, ode: Tolerances::default() }
    }
}

impl OracleOptions {
    /// Settings for derivative checks, where eigenvalue noise is divided by
    /// a small coupling step.
    pub fn tight(n: usize) -> Self {
        OracleOptions { n, half_width: None, tol: 1e-13, ode: Tolerances::new(1e-12, 1e-14) }
    }
}

/// Least-squares fit `lambda_k ~ c k^tau` over the upper half of the indices,
/// and, when an unperturbed spectrum is at hand, the decay exponent proxy
/// `eps` in `|lambda_k(alpha)/lambda_k(0) - 1| ~ k^{-1-eps}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymFit {
    pub c: f64,
    pub tau: f64,
    pub eps_proxy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEstimate {
    pub eigenvalues: Vec<f64>,
    pub half_width: f64,
    pub n: usize,
    pub tol: f64,
    pub asym_fit: AsymFit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub index: usize,
    pub lambda: f64,
    /// Uniform grid on `[-L, L]` with [`GRID_PANELS`] panels.
    pub grid: Vec<f64>,
    /// Unit-norm eigenfunction on `grid`.
    pub u: Vec<f64>,
    /// `u` at the extra points requested by the caller.
    pub extra: Vec<(f64, f64)>,
    /// `int q u^2`, integrated along with the solution.
    pub q_moment: f64,
    /// Composite Simpson `int u^2` on the grid (1 up to quadrature error).
    pub grid_norm: f64,
}

impl Eigenpair {
    /// Interior sign changes of `u` on the grid.
    pub fn nodes(&self) -> usize {
        let mut last = 0.0;
        let mut count = 0;
        for &v in &self.u {
            if v == 0.0 {
                continue;
            }
            if last != 0.0 && v.signum() != f64::signum(last) {
                count += 1;
            }
            last = v;
        }
        count
    }

    pub fn at(&self, x: f64) -> Option<f64> {
        self.extra.iter().find(|p| p.0 == x).map(|p| p.1)
    }
}

/// `2 int_0^1 sqrt(1 - t^beta) dt`.
fn wkb_constant(beta: f64) -> f64 {
    let g = |x: f64| gamma(x).expect("positive argument");
    2.0 * g(1.0 / beta) * g(1.5) / (beta * g(1.0 / beta + 1.5))
}

/// Semiclassical estimate of the k-th (1-based) eigenvalue of
/// `-d^2/dx^2 + |x|^beta`: `((k - 1/2) pi / D)^{2 beta/(beta+2)}`.
pub fn wkb_eigenvalue(beta: f64, k: usize) -> f64 {
    ((k as f64 - 0.5) * std::f64::consts::PI / wkb_constant(beta)).powf(2.0 * beta / (beta + 2.0))
}

/// `L = max(3, (4 lambda_N)^{1/beta})` with `lambda_N` the semiclassical
/// value shifted by `|alpha| sup|q|`; never inside the support of `q`.
pub fn heuristic_half_width(spec: &PotentialSpec, n: usize) -> f64 {
    let target = wkb_eigenvalue(spec.beta, n.max(1)) + spec.alpha.abs() * spec.q.sup_abs();
    let (a, b) = spec.support();
    3f64.max((4.0 * target).powf(1.0 / spec.beta)).max(a.abs().max(b.abs()) + 1.0)
}

/// Prufer shooting on `[lo, hi]` with Dirichlet ends, matched at `mid`.
struct Shooter<'a, W: Fn(f64) -> f64 + Sync> {
    w: &'a W,
    lo: f64,
    hi: f64,
    mid: f64,
    stops: Vec<f64>,
    ode: Tolerances,
}

impl<W: Fn(f64) -> f64 + Sync> Shooter<'_, W> {
    fn mismatch(&self, lambda: f64, s: f64) -> Result<f64> {
        let w = self.w;
        let f = |x: f64, th: &[f64; 1]| {
            let (sn, cs) = th[0].sin_cos();
            [s * cs * cs - (w(x) - lambda) / s * sn * sn]
        };
        let (l, _) = solve(&f, self.lo, [0.0], self.mid, self.ode, &self.stops, None, |_, _| {})?;
        let r = if self.mid < self.hi {
            solve(&f, self.hi, [0.0], self.mid, self.ode, &self.stops, None, |_, _| {})?.0[0]
        } else {
            0.0
        };
        Ok(l[0] - r)
    }

    /// The k-th eigenvalue, searched around `guess` with initial half-width `spread`.
    fn eigenvalue(&self, k: usize, guess: f64, spread: f64, tol: f64) -> Result<f64> {
        let target = k as f64 * std::f64::consts::PI;
        let s = guess.abs().max(1.0).sqrt();
        let g = |lambda: f64| self.mismatch(lambda, s).map(|v| v - target);
        let mut step = spread.max(1e-3);
        let mut lo = guess - step;
        let mut glo = g(lo)?;
        let mut n = 0;
        while glo >= 0.0 {
            step *= 2.0;
            lo -= step;
            glo = g(lo)?;
            n += 1;
            if n > MAX_BRACKET_EXPANSIONS {
                return Err(Error::NoConvergence(format!("no lower bracket for eigenvalue {k}")));
            }
        }
        let mut step = spread.max(1e-3);
        let mut hi = guess + step;
        let mut ghi = g(hi)?;
        let mut n = 0;
        while ghi <= 0.0 {
            lo = lo.max(hi);
            glo = if lo == hi { ghi } else { glo };
            step *= 2.0;
            hi += step;
            ghi = g(hi)?;
            n += 1;
            if n > MAX_BRACKET_EXPANSIONS {
                return Err(Error::NoConvergence(format!("no upper bracket for eigenvalue {k}")));
            }
        }
        // Illinois false position, bisecting when it stalls
        let mut side = 0i8;
        for it in 0..MAX_ROOT_ITERATIONS {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= tol * mid.abs().max(1.0) {
                return Ok(mid);
            }
            let mut c = (lo * ghi - hi * glo) / (ghi - glo);
            if !(c > lo && c < hi) || it % 8 == 7 {
                c = mid;
            }
            let gc = g(c)?;
            if gc == 0.0 {
                return Ok(c);
            }
            if gc < 0.0 {
                lo = c;
                glo = gc;
                if side == -1 {
                    ghi *= 0.5;
                }
                side = -1;
            } else {
                hi = c;
                ghi = gc;
                if side == 1 {
                    glo *= 0.5;
                }
                side = 1;
            }
        }
        Err(Error::NoConvergence(format!("eigenvalue {k} did not converge")))
    }
}

fn line_shooter<'a, W: Fn(f64) -> f64 + Sync>(spec: &PotentialSpec, w: &'a W, l: f64, ode: Tolerances) -> Shooter<'a, W> {
    let stops = spec.breakpoints().into_iter().filter(|x| x.abs() < l).collect();
    Shooter { w, lo: -l, hi: l, mid: 0.0, stops, ode }
}

fn fit_power_law(ks: &[f64], vals: &[f64]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = ks.iter().zip(vals).filter(|(_, v)| **v > 0.0).map(|(k, v)| (k.ln(), v.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

fn upper_half(n: usize) -> std::ops::Range<usize> {
    if n < 4 {
        0..n
    } else {
        n / 2..n
    }
}

fn asym_fit(eigenvalues: &[f64]) -> AsymFit {
    let r = upper_half(eigenvalues.len());
    let ks: Vec<f64> = r.clone().map(|i| (i + 1) as f64).collect();
    match fit_power_law(&ks, &eigenvalues[r]) {
        Some((tau, lnc)) => AsymFit { c: lnc.exp(), tau, eps_proxy: None },
        None => AsymFit { c: f64::NAN, tau: f64::NAN, eps_proxy: None },
    }
}

/// `eps` from the slope of `ln |lambda_k(alpha)/lambda_k(0) - 1|` against `ln k`.
pub fn eps_proxy(perturbed: &[f64], unperturbed: &[f64]) -> Option<f64> {
    let n = perturbed.len().min(unperturbed.len());
    let r = upper_half(n);
    let ks: Vec<f64> = r.clone().map(|i| (i + 1) as f64).collect();
    let dev: Vec<f64> = r.map(|i| (perturbed[i] / unperturbed[i] - 1.0).abs()).collect();
    fit_power_law(&ks, &dev).map(|(slope, _)| -slope - 1.0)
}

fn check_truncation(spec: &PotentialSpec, l: f64, eigenvalues: &[f64]) -> Result<()> {
    let half_wall = 0.5 * spec.w(l).min(spec.w(-l));
    let top = eigenvalues.last().copied().unwrap_or(f64::NEG_INFINITY);
    if top >= half_wall {
        return Err(Error::TruncationTooSmall { lambda_n: top, half_wall });
    }
    Ok(())
}

fn check_order(eigenvalues: &[f64]) -> Result<()> {
    for (i, p) in eigenvalues.windows(2).enumerate() {
        if !(p[1] > p[0]) {
            return Err(Error::MissedEigenvalue { index: i + 2 });
        }
    }
    Ok(())
}

fn line_spectrum(spec: &PotentialSpec, n: usize, l: f64, tol: f64, ode: Tolerances) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Domain("need at least one eigenvalue".into()));
    }
    let w = |x: f64| spec.w(x);
    let shooter = line_shooter(spec, &w, l, ode);
    let shift = spec.alpha.abs() * spec.q.sup_abs();
    let eig: Vec<f64> = (1..=n)
        .into_par_iter()
        .map(|k| {
            let guess = wkb_eigenvalue(spec.beta, k);
            let gap = wkb_eigenvalue(spec.beta, k + 1) - guess;
            shooter.eigenvalue(k, guess, 0.5 * gap + shift, tol)
        })
        .collect::<Result<_>>()?;
    check_order(&eig)?;
    check_truncation(spec, l, &eig)?;
    Ok(eig)
}

/// The `opts.n` lowest Dirichlet eigenvalues on `[-L, L]`.
pub fn eigenvalues(spec: &PotentialSpec, opts: &OracleOptions) -> Result<SpectrumEstimate> {
    let l = opts.half_width.unwrap_or_else(|| heuristic_half_width(spec, opts.n));
    let eig = line_spectrum(spec, opts.n, l, opts.tol, opts.ode)?;
    Ok(SpectrumEstimate { asym_fit: asym_fit(&eig), eigenvalues: eig, half_width: l, n: opts.n, tol: opts.tol })
}

/// Truncated products `f_N(alpha) = prod_{j<=N} lambda_j(alpha)/lambda_j(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductEstimate {
    pub perturbed: SpectrumEstimate,
    pub unperturbed: SpectrumEstimate,
    /// `(N, f_N)` for every requested prefix length.
    pub prefixes: Vec<(usize, f64)>,
    /// `f_N` at `N = opts.n`.
    pub value: f64,
}

fn prefix_products(num: &[f64], den: &[f64], ns: &[usize]) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    let mut log = 0.0;
    let mut sign = 1.0;
    let mut j = 0;
    let mut ns: Vec<usize> = ns.iter().copied().filter(|&m| m >= 1 && m <= num.len()).collect();
    ns.sort_unstable();
    ns.dedup();
    for m in ns {
        while j < m {
            let r = num[j] / den[j];
            log += r.abs().ln();
            sign *= r.signum();
            j += 1;
        }
        out.push((m, sign * log.exp()));
    }
    out
}

/// Spectra at `alpha` and at 0 with identical `(N, L, tol)`, and the
/// truncated products for each prefix length in `ns` (plus `N` itself).
pub fn product_comparison(spec: &PotentialSpec, opts: &OracleOptions, ns: &[usize]) -> Result<ProductEstimate> {
    let l = opts.half_width.unwrap_or_else(|| heuristic_half_width(spec, opts.n));
    let fixed = OracleOptions { half_width: Some(l), ..*opts };
    let base = spec.with_alpha(0.0);
    let (p, u) = rayon::join(|| eigenvalues(spec, &fixed), || eigenvalues(&base, &fixed));
    let (mut p, u) = (p?, u?);
    p.asym_fit.eps_proxy = eps_proxy(&p.eigenvalues, &u.eigenvalues);
    let mut all: Vec<usize> = ns.to_vec();
    all.push(opts.n);
    let prefixes = prefix_products(&p.eigenvalues, &u.eigenvalues, &all);
    let value = prefixes.iter().find(|e| e.0 == opts.n).map(|e| e.1).expect("N is a prefix");
    Ok(ProductEstimate { perturbed: p, unperturbed: u, prefixes, value })
}

/// `f_N(alpha)` alone.
pub fn partial_product(spec: &PotentialSpec, opts: &OracleOptions) -> Result<f64> {
    Ok(product_comparison(spec, opts, &[])?.value)
}

struct SideSample {
    x: f64,
    theta: f64,
    log_amp: f64,
}

struct SideIntegrals {
    // (log amplitude at segment start, int R_local^2 sin^2, int q R_local^2 sin^2)
    segments: Vec<(f64, f64, f64)>,
}

/// Integrates `(theta, ln R, int y^2, int q y^2)` from the wall at `from`
/// to the origin through the nodes `pts` (ordered from the wall inward),
/// restarting the local amplitude on every panel.
fn walk_side(
    spec: &PotentialSpec,
    lambda: f64,
    s: f64,
    pts: &[f64],
    stops: &[f64],
    ode: Tolerances,
) -> Result<(Vec<SideSample>, SideIntegrals)> {
    let f = |x: f64, v: &[f64; 4]| {
        let w = spec.w(x);
        let (sn, cs) = v[0].sin_cos();
        let y2 = (2.0 * v[1]).exp() * sn * sn;
        [s * cs * cs - (w - lambda) / s * sn * sn, (s + (w - lambda) / s) * sn * cs, y2, spec.q(x) * y2]
    };
    let mut samples = vec![SideSample { x: pts[0], theta: 0.0, log_amp: 0.0 }];
    let mut segments = Vec::with_capacity(pts.len());
    let mut theta = 0.0;
    let mut amp = 0.0;
    for p in pts.windows(2) {
        let (v, _) = solve(&f, p[0], [theta, 0.0, 0.0, 0.0], p[1], ode, stops, None, |_, _| {})?;
        // integrals come out negative when walking towards smaller x
        let sign = (p[1] - p[0]).signum();
        segments.push((amp, sign * v[2], sign * v[3]));
        theta = v[0];
        amp += v[1];
        samples.push(SideSample { x: p[1], theta, log_amp: amp });
    }
    Ok((samples, SideIntegrals { segments }))
}

fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = terms.filter(|t| t.is_finite()).collect();
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

fn simpson(h: f64, f: &[f64]) -> f64 {
    let n = f.len() - 1;
    let mut s = f[0] + f[n];
    for (i, v) in f.iter().enumerate().take(n).skip(1) {
        s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    s * h / 3.0
}

/// Unit-norm eigenfunction for eigenvalue `lambda` (the `index`-th), sampled
/// on the uniform grid and at `extra` points of `(-L, L)`.
pub fn eigenfunction(
    spec: &PotentialSpec,
    index: usize,
    lambda: f64,
    l: f64,
    extra: &[f64],
    ode: Tolerances,
) -> Result<Eigenpair> {
    let grid: Vec<f64> = (0..=GRID_PANELS).map(|i| -l + 2.0 * l * i as f64 / GRID_PANELS as f64).collect();
    let stops: Vec<f64> = spec.breakpoints().into_iter().filter(|x| x.abs() < l).collect();
    let mut nodes: Vec<f64> = grid.iter().chain(extra).chain(&stops).copied().filter(|x| x.abs() <= l).collect();
    nodes.push(0.0);
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    let left: Vec<f64> = nodes.iter().copied().filter(|&x| x <= 0.0).collect();
    let right: Vec<f64> = nodes.iter().rev().copied().filter(|&x| x >= 0.0).collect();
    let s = lambda.abs().max(1.0).sqrt();
    let ((ls, li), (rs, ri)) = match rayon::join(
        || walk_side(spec, lambda, s, &left, &stops, ode),
        || walk_side(spec, lambda, s, &right, &stops, ode),
    ) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    let (l0, r0) = (ls.last().expect("origin"), rs.last().expect("origin"));
    // right branch times c matches the left one at 0; |cos| = 1 at an eigenvalue
    let dtheta = l0.theta - r0.theta;
    let c_sign = dtheta.cos().signum();
    let ln_c = l0.log_amp - r0.log_amp;
    let ln_norm = log_sum_exp(
        li.segments
            .iter()
            .map(|seg| 2.0 * seg.0 + seg.1.ln())
            .chain(ri.segments.iter().map(|seg| 2.0 * (seg.0 + ln_c) + seg.1.ln())),
    );
    let q_moment = li.segments.iter().map(|seg| seg.2 * (2.0 * seg.0 - ln_norm).exp()).sum::<f64>()
        + ri.segments.iter().map(|seg| seg.2 * (2.0 * (seg.0 + ln_c) - ln_norm).exp()).sum::<f64>();
    let half = 0.5 * ln_norm;
    let value = |x: f64| -> f64 {
        if x <= 0.0 {
            let p = ls.iter().find(|p| p.x == x).expect("node");
            p.theta.sin() * (p.log_amp - half).exp()
        } else {
            let p = rs.iter().find(|p| p.x == x).expect("node");
            c_sign * p.theta.sin() * (p.log_amp + ln_c - half).exp()
        }
    };
    let mut lookup = std::collections::HashMap::new();
    for p in ls.iter() {
        lookup.insert(p.x.to_bits(), p.theta.sin() * (p.log_amp - half).exp());
    }
    for p in rs.iter().filter(|p| p.x > 0.0) {
        lookup.insert(p.x.to_bits(), c_sign * p.theta.sin() * (p.log_amp + ln_c - half).exp());
    }
    let at = |x: f64| lookup.get(&x.to_bits()).copied().unwrap_or_else(|| value(x));
    let u: Vec<f64> = grid.iter().map(|&x| at(x)).collect();
    let extra: Vec<(f64, f64)> = extra.iter().map(|&x| (x, at(x))).collect();
    let sq: Vec<f64> = u.iter().map(|v| v * v).collect();
    let grid_norm = simpson(2.0 * l / GRID_PANELS as f64, &sq);
    Ok(Eigenpair { index, lambda, grid, u, extra, q_moment, grid_norm })
}

/// The first `n` eigenpairs.
pub fn eigenpairs(spec: &PotentialSpec, opts: &OracleOptions, extra: &[f64]) -> Result<Vec<Eigenpair>> {
    let est = eigenvalues(spec, opts)?;
    est.eigenvalues
        .par_iter()
        .enumerate()
        .map(|(i, &lam)| eigenfunction(spec, i + 1, lam, est.half_width, extra, opts.ode))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HellmannFeynman {
    /// Central difference of `lambda_j` in `alpha`.
    pub derivative: f64,
    /// `int q u_j^2`.
    pub expectation: f64,
    pub residual: f64,
}

/// `|d lambda_j/d alpha - int q u_j^2|` at the potential's `alpha`; `L` is fixed
/// for all three eigenvalue solves.
pub fn hellmann_feynman_residual(
    spec: &PotentialSpec,
    j: usize,
    dalpha: f64,
    opts: &OracleOptions,
) -> Result<HellmannFeynman> {
    if j == 0 {
        return Err(Error::Domain("eigenvalue indices start at 1".into()));
    }
    let l = opts.half_width.unwrap_or_else(|| {
        let wide = spec.with_alpha(spec.alpha.abs() + dalpha);
        heuristic_half_width(&wide, j.max(opts.n))
    });
    let at = |a: f64| line_spectrum(&spec.with_alpha(a), j, l, opts.tol, opts.ode).map(|v| v[j - 1]);
    let (plus, minus) = rayon::join(|| at(spec.alpha + dalpha), || at(spec.alpha - dalpha));
    let lam = at(spec.alpha)?;
    let derivative = (plus? - minus?) / (2.0 * dalpha);
    let expectation = eigenfunction(spec, j, lam, l, &[], opts.ode)?.q_moment;
    Ok(HellmannFeynman { derivative, expectation, residual: (derivative - expectation).abs() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreenResidual {
    pub n: usize,
    /// `sum_{j<=N} u_j(x)^2 / lambda_j`.
    pub series: f64,
    /// `y_-(x) y_+(x) / W`.
    pub exact: f64,
    pub residual: f64,
}

/// `|sum_{j<=N} u_j(x)^2/lambda_j - G(x, x)|` for each `N` in `ns`, from one
/// set of `max(ns)` eigenpairs.
pub fn green_diagonal_residuals(
    spec: &PotentialSpec,
    x: f64,
    ns: &[usize],
    opts: &OracleOptions,
) -> Result<Vec<GreenResidual>> {
    let n = ns.iter().copied().max().unwrap_or(0);
    let o = OracleOptions { n, ..*opts };
    let pairs = eigenpairs(spec, &o, &[x])?;
    if let Some(p) = pairs.iter().find(|p| p.lambda <= 0.0) {
        return Err(Error::NonPositiveSpectrum { index: p.index, lambda: p.lambda });
    }
    let exact = green_diagonal(spec, x, opts.ode)?;
    let mut out = Vec::new();
    for &m in ns {
        let series: f64 = pairs[..m].iter().map(|p| p.at(x).expect("extra point").powi(2) / p.lambda).sum();
        out.push(GreenResidual { n: m, series, exact, residual: (series - exact).abs() });
    }
    Ok(out)
}

/// Single-`N` form of [`green_diagonal_residuals`].
pub fn green_diagonal_residual(spec: &PotentialSpec, x: f64, n: usize, opts: &OracleOptions) -> Result<GreenResidual> {
    Ok(green_diagonal_residuals(spec, x, &[n], opts)?[0])
}

/// The `n` lowest Dirichlet eigenvalues of `-d^2/dx^2 + alpha q` on `[0, length]`.
pub fn interval_eigenvalues<Q: Fn(f64) -> f64 + Sync>(
    q: Q,
    alpha: f64,
    length: f64,
    n: usize,
    q_sup: f64,
    tol: f64,
    ode: Tolerances,
    breakpoints: &[f64],
) -> Result<Vec<f64>> {
    let w = |x: f64| alpha * q(x);
    let shooter = Shooter { w: &w, lo: 0.0, hi: length, mid: length, stops: breakpoints.to_vec(), ode };
    let unit = (std::f64::consts::PI / length).powi(2);
    let shift = alpha.abs() * q_sup;
    let eig: Vec<f64> = (1..=n)
        .into_par_iter()
        .map(|k| {
            let kf = k as f64;
            shooter.eigenvalue(k, unit * kf * kf, unit * (kf + 0.5) + shift, tol)
        })
        .collect::<Result<_>>()?;
    check_order(&eig)?;
    Ok(eig)
}
