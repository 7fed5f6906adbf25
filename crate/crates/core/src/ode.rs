//! Adaptive Dormand-Prince 5(4) integration of `y'' = w(x) y`.
//!
//! The stepper is generic over the state dimension so the eigenvalue oracle
//! can drive its Prufer system through the same code. Breakpoints split the
//! span into segments; inside a segment the right-hand side is never sampled
//! on an endpoint (stage abscissae are clamped one ulp inside), so a jump of
//! `w` at a breakpoint is seen from the correct side only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Guard on `|y|`, `|y'|` for the linear equation.
pub const OVERFLOW_GUARD: f64 = 1e150;

const MAX_STEPS: usize = 5_000_000;
const SAFETY: f64 = 0.9;
const PI_BETA: f64 = 0.04;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const SLIVER: f64 = 16.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rtol: 1e-10, atol: 1e-12 }
    }
}

impl Tolerances {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Tolerances { rtol, atol }
    }
}

/// A point `(x, y(x), y'(x))` on a solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub x: f64,
    pub y: f64,
    pub dy: f64,
}

impl State {
    pub fn new(x: f64, y: f64, dy: f64) -> Self {
        State { x, y, dy }
    }

    pub fn scaled(self, c: f64) -> Self {
        State { x: self.x, y: c * self.y, dy: c * self.dy }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

impl StepStats {
    fn absorb(&mut self, other: StepStats) {
        self.accepted += other.accepted;
        self.rejected += other.rejected;
        self.evaluations += other.evaluations;
    }
}

/// States at every accepted step (and every breakpoint), in integration order.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<State>,
    pub tol: Tolerances,
    pub stats: StepStats,
}

impl Trajectory {
    pub fn last(&self) -> State {
        *self.states.last().expect("trajectory holds the initial state")
    }

    /// The recorded state at exactly `x`, if `x` was a breakpoint or node.
    pub fn at(&self, x: f64) -> Option<State> {
        self.states.iter().find(|s| s.x == x).copied()
    }
}

// Dormand-Prince coefficients.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

// continuous extension of the fifth-order solution (Hairer's DOPRI5)
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Requested output abscissae, consumed in integration order.
struct Samples<'a, const N: usize> {
    xs: Vec<(usize, f64)>,
    next: usize,
    out: &'a mut [[f64; N]],
}

impl<const N: usize> Samples<'_, N> {
    fn pending(&self, dir: f64, upto: f64) -> bool {
        self.next < self.xs.len() && (upto - self.xs[self.next].1) * dir >= 0.0
    }

    fn flush(&mut self, dir: f64, upto: f64, y: &[f64; N]) {
        while self.pending(dir, upto) {
            self.out[self.xs[self.next].0] = *y;
            self.next += 1;
        }
    }

    /// Fills every pending sample up to `x1` from the step `x0 -> x1`.
    fn fill(&mut self, x0: f64, y0: &[f64; N], x1: f64, y1: &[f64; N], k: &[[f64; N]; 7]) {
        let dir = (x1 - x0).signum();
        if !self.pending(dir, x1) {
            return;
        }
        let h = x1 - x0;
        let mut r = [[0.0; N]; 4];
        for i in 0..N {
            let diff = y1[i] - y0[i];
            let bspl = h * k[0][i] - diff;
            r[0][i] = diff;
            r[1][i] = bspl;
            r[2][i] = diff - h * k[6][i] - bspl;
            r[3][i] = h * (0..7).map(|s| D[s] * k[s][i]).sum::<f64>();
        }
        while self.pending(dir, x1) {
            let (idx, x) = self.xs[self.next];
            let th = (x - x0) / h;
            let th1 = 1.0 - th;
            let mut v = [0.0; N];
            for i in 0..N {
                v[i] = if x == x1 { y1[i] } else { y0[i] + th * (r[0][i] + th1 * (r[1][i] + th * (r[2][i] + th1 * r[3][i]))) };
            }
            self.out[idx] = v;
            self.next += 1;
        }
    }
}

struct Segment {
    lo: f64,
    hi: f64,
}

impl Segment {
    fn clamp(&self, x: f64) -> f64 {
        let (inner_lo, inner_hi) = (self.lo.next_up(), self.hi.next_down());
        if inner_lo > inner_hi {
            0.5 * (self.lo + self.hi)
        } else {
            x.clamp(inner_lo, inner_hi)
        }
    }
}

fn rms_norm<const N: usize>(v: &[f64; N], y0: &[f64; N], y1: &[f64; N], tol: Tolerances) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        let sc = tol.atol + tol.rtol * y0[i].abs().max(y1[i].abs());
        s += (v[i] / sc).powi(2);
    }
    (s / N as f64).sqrt()
}

/// Integrates `y' = f(x, y)` from `x0` to `x1`, restarting at every stop that
/// lies strictly between them. `observe` sees the initial point and every
/// accepted step; `guard` bounds every component's magnitude.
pub(crate) fn solve<const N: usize, F, O>(
    f: &F,
    x0: f64,
    y0: [f64; N],
    x1: f64,
    tol: Tolerances,
    stops: &[f64],
    guard: Option<f64>,
    observe: O,
) -> Result<([f64; N], StepStats)>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    O: FnMut(f64, &[f64; N]),
{
    solve_sampled(f, x0, y0, x1, tol, stops, guard, observe, &[], &mut [])
}

/// [`solve`] that also interpolates the solution at `samples` (each within
/// the span) from the continuous extension of the step covering it.
#[allow(clippy::too_many_arguments)]
pub(crate) fn solve_sampled<const N: usize, F, O>(
    f: &F,
    x0: f64,
    y0: [f64; N],
    x1: f64,
    tol: Tolerances,
    stops: &[f64],
    guard: Option<f64>,
    mut observe: O,
    samples: &[f64],
    sampled: &mut [[f64; N]],
) -> Result<([f64; N], StepStats)>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    O: FnMut(f64, &[f64; N]),
{
    if !x0.is_finite() || !x1.is_finite() {
        return Err(Error::Domain(format!("integration span [{x0}, {x1}] must be finite")));
    }
    let dir = if x1 >= x0 { 1.0 } else { -1.0 };
    if samples.iter().any(|&t| !((t - x0) * dir >= 0.0 && (x1 - t) * dir >= 0.0)) {
        return Err(Error::Domain(format!("sample point outside [{x0}, {x1}]")));
    }
    let mut xs: Vec<(usize, f64)> = samples.iter().copied().enumerate().collect();
    xs.sort_by(|a, b| (dir * a.1).total_cmp(&(dir * b.1)));
    let mut cursor = Samples { xs, next: 0, out: sampled };
    cursor.flush(dir, x0, &y0);
    let mut ends: Vec<f64> = stops.iter().copied().filter(|s| (s - x0) * dir > 0.0 && (x1 - s) * dir > 0.0).collect();
    ends.sort_by(|a, b| (dir * a).total_cmp(&(dir * b)));
    ends.dedup();
    ends.push(x1);

    let mut stats = StepStats::default();
    let mut y = y0;
    let mut x = x0;
    let mut h_prev: Option<f64> = None;
    observe(x, &y);
    for &end in &ends {
        if (end - x).abs() <= SLIVER * x.abs().max(end.abs()) {
            // nothing to integrate across a few ulps
            x = end;
            cursor.flush(dir, x, &y);
            continue;
        }
        let seg = Segment { lo: x.min(end), hi: x.max(end) };
        let g = |t: f64, s: &[f64; N]| f(seg.clamp(t), s);
        let (yn, h_last, st) = segment(&g, x, y, end, tol, h_prev, guard, &mut observe, &mut cursor)?;
        stats.absorb(st);
        y = yn;
        x = end;
        h_prev = Some(h_last);
    }
    Ok((y, stats))
}

fn initial_step<const N: usize, F>(f: &F, x: f64, y: &[f64; N], f0: &[f64; N], span: f64, tol: Tolerances) -> f64
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let d0 = rms_norm(y, y, y, tol);
    let d1 = rms_norm(f0, y, y, tol);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(span.abs());
    let dir = span.signum();
    let mut y1 = [0.0; N];
    for i in 0..N {
        y1[i] = y[i] + dir * h0 * f0[i];
    }
    let f1 = f(x + dir * h0, &y1);
    let mut diff = [0.0; N];
    for i in 0..N {
        diff[i] = f1[i] - f0[i];
    }
    let d2 = rms_norm(&diff, y, y, tol) / h0;
    let dm = d1.max(d2);
    let h1 = if dm <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / dm).powf(0.2) };
    (100.0 * h0).min(h1).min(span.abs())
}

#[allow(clippy::too_many_arguments)]
fn segment<const N: usize, F, O>(
    f: &F,
    x0: f64,
    y0: [f64; N],
    x1: f64,
    tol: Tolerances,
    h_prev: Option<f64>,
    guard: Option<f64>,
    observe: &mut O,
    cursor: &mut Samples<'_, N>,
) -> Result<([f64; N], f64, StepStats)>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    O: FnMut(f64, &[f64; N]),
{
    let dir = (x1 - x0).signum();
    let mut stats = StepStats::default();
    let mut x = x0;
    let mut y = y0;
    let mut k = [[0.0; N]; 7];
    k[0] = f(x, &y);
    stats.evaluations += 1;
    let mut h = match h_prev {
        Some(h) => h.abs(),
        None => {
            stats.evaluations += 1;
            initial_step(f, x, &y, &k[0], x1 - x0, tol)
        }
    };
    let mut err_old: f64 = 1e-4;
    let mut rejected_last = false;
    loop {
        let remaining = (x1 - x) * dir;
        if remaining <= 0.0 {
            return Ok((y, h, stats));
        }
        let mut last = false;
        // stretch rather than leave a sliver before the segment end
        if h * (1.0 + 1e-3) >= remaining {
            h = remaining;
            last = true;
        }
        if h <= SLIVER * x.abs().max(1e-300) {
            return Err(Error::StepUnderflow { x });
        }
        if stats.accepted + stats.rejected > MAX_STEPS {
            return Err(Error::NoConvergence(format!("step budget exhausted at x = {x}")));
        }
        let hs = dir * h;
        let mut yt = [0.0; N];
        for s in 1..7 {
            for i in 0..N {
                let mut acc = 0.0;
                for j in 0..s {
                    acc += A[s][j] * k[j][i];
                }
                yt[i] = y[i] + hs * acc;
            }
            let xs = if s >= 5 && last { x1 } else { x + C[s] * hs };
            k[s] = f(xs, &yt);
        }
        stats.evaluations += 6;
        // yt now holds the fifth-order solution (stage 7 is FSAL)
        let mut errv = [0.0; N];
        for i in 0..N {
            let mut acc = 0.0;
            for s in 0..7 {
                acc += E[s] * k[s][i];
            }
            errv[i] = hs * acc;
        }
        let err = rms_norm(&errv, &y, &yt, tol);
        if !err.is_finite() {
            h *= FAC_MIN;
            stats.rejected += 1;
            rejected_last = true;
            continue;
        }
        let fac11 = err.powf(0.2 - 0.75 * PI_BETA);
        if err <= 1.0 {
            let mut fac = fac11 / err_old.powf(PI_BETA);
            fac = (fac / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_new = h / fac;
            if rejected_last {
                h_new = h_new.min(h);
            }
            err_old = err.max(1e-4);
            let x_new = if last { x1 } else { x + hs };
            cursor.fill(x, &y, x_new, &yt, &k);
            x = x_new;
            y = yt;
            k[0] = k[6];
            stats.accepted += 1;
            rejected_last = false;
            if let Some(g) = guard {
                if y.iter().any(|v| !(v.abs() <= g)) {
                    return Err(Error::Overflow { x });
                }
            }
            observe(x, &y);
            if last {
                return Ok((y, h, stats));
            }
            h = h_new;
        } else {
            h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
            stats.rejected += 1;
            rejected_last = true;
        }
    }
}

fn linear_rhs<W: Fn(f64) -> f64>(w: &W) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] + '_ {
    move |x, s| [s[1], w(x) * s[0]]
}

/// The state at `to_x` of the solution of `y'' = w y` through `from`.
pub fn integrate<W: Fn(f64) -> f64>(
    w: W,
    from: State,
    to_x: f64,
    tol: Tolerances,
    breakpoints: &[f64],
) -> Result<State> {
    let f = linear_rhs(&w);
    let (y, _) = solve(&f, from.x, [from.y, from.dy], to_x, tol, breakpoints, Some(OVERFLOW_GUARD), |_, _| {})?;
    Ok(State::new(to_x, y[0], y[1]))
}

/// As [`integrate`], recording every accepted step.
pub fn integrate_dense<W: Fn(f64) -> f64>(
    w: W,
    from: State,
    to_x: f64,
    tol: Tolerances,
    breakpoints: &[f64],
) -> Result<Trajectory> {
    let f = linear_rhs(&w);
    let mut states = Vec::new();
    let (_, stats) = solve(&f, from.x, [from.y, from.dy], to_x, tol, breakpoints, Some(OVERFLOW_GUARD), |x, y| {
        states.push(State::new(x, y[0], y[1]))
    })?;
    Ok(Trajectory { states, tol, stats })
}

/// States at `samples` (each between `from.x` and `to_x`), interpolated from
/// the continuous extension of the steps, so they do not constrain the step size.
pub fn integrate_sampled<W: Fn(f64) -> f64>(
    w: W,
    from: State,
    to_x: f64,
    tol: Tolerances,
    breakpoints: &[f64],
    samples: &[f64],
) -> Result<Vec<State>> {
    let f = linear_rhs(&w);
    let mut out = vec![[0.0; 2]; samples.len()];
    solve_sampled(&f, from.x, [from.y, from.dy], to_x, tol, breakpoints, Some(OVERFLOW_GUARD), |_, _| {}, samples, &mut out)?;
    Ok(samples.iter().zip(out).map(|(&x, v)| State::new(x, v[0], v[1])).collect())
}
