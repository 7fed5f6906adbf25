//! The operator's coefficient `w(x) = |x|^beta + alpha q(x)` with a compactly
//! supported, bounded perturbation `q`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One polynomial piece `q(x) = sum_k coeffs[k] x^k` on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyPiece {
    pub lo: f64,
    pub hi: f64,
    pub coeffs: Vec<f64>,
}

/// A constant piece `q(x) = height` on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepPiece {
    pub lo: f64,
    pub hi: f64,
    pub height: f64,
}

/// The perturbation `q`. It vanishes identically outside the listed pieces
/// (or outside the knot range of a table).
///
/// Pieces are closed intervals; where two pieces touch, the one listed first
/// supplies the value at the shared endpoint. The
/// integrator never evaluates exactly on a breakpoint, so this choice has no
/// numerical effect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PerturbationSpec {
    Zero,
    Polynomial { pieces: Vec<PolyPiece> },
    Step { pieces: Vec<StepPiece> },
    /// Linear interpolation between `(knots[i], values[i])`.
    Table { knots: Vec<f64>, values: Vec<f64> },
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn check_piece(lo: f64, hi: f64) -> Result<()> {
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidPotential(format!("piece [{lo}, {hi}] is not finite")));
    }
    if !(lo < hi) {
        return Err(Error::InvalidPotential(format!("piece [{lo}, {hi}] is empty")));
    }
    Ok(())
}

fn check_disjoint(mut spans: Vec<(f64, f64)>) -> Result<()> {
    spans.sort_by(|a, b| a.0.total_cmp(&b.0));
    for pair in spans.windows(2) {
        if pair[1].0 < pair[0].1 {
            return Err(Error::InvalidPotential(format!(
                "pieces [{}, {}] and [{}, {}] overlap",
                pair[0].0, pair[0].1, pair[1].0, pair[1].1
            )));
        }
    }
    Ok(())
}

impl PerturbationSpec {
    /// The harmonic-type perturbation `c x^2` on `[lo, hi]`.
    pub fn quadratic(lo: f64, hi: f64, c: f64) -> Self {
        PerturbationSpec::Polynomial { pieces: vec![PolyPiece { lo, hi, coeffs: vec![0.0, 0.0, c] }] }
    }

    /// `q = height` on `[lo, hi]`.
    pub fn step(lo: f64, hi: f64, height: f64) -> Self {
        PerturbationSpec::Step { pieces: vec![StepPiece { lo, hi, height }] }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PerturbationSpec::Zero => Ok(()),
            PerturbationSpec::Polynomial { pieces } => {
                for p in pieces {
                    check_piece(p.lo, p.hi)?;
                    if p.coeffs.iter().any(|c| !c.is_finite()) {
                        return Err(Error::InvalidPotential("non-finite polynomial coefficient".into()));
                    }
                }
                check_disjoint(pieces.iter().map(|p| (p.lo, p.hi)).collect())
            }
            PerturbationSpec::Step { pieces } => {
                for p in pieces {
                    check_piece(p.lo, p.hi)?;
                    if !p.height.is_finite() {
                        return Err(Error::InvalidPotential("non-finite step height".into()));
                    }
                }
                check_disjoint(pieces.iter().map(|p| (p.lo, p.hi)).collect())
            }
            PerturbationSpec::Table { knots, values } => {
                if knots.len() < 2 || knots.len() != values.len() {
                    return Err(Error::InvalidPotential(
                        "table needs at least two knots and one value per knot".into(),
                    ));
                }
                if knots.iter().chain(values).any(|v| !v.is_finite()) {
                    return Err(Error::InvalidPotential("non-finite table entry".into()));
                }
                if knots.windows(2).any(|k| !(k[0] < k[1])) {
                    return Err(Error::InvalidPotential("table knots must increase strictly".into()));
                }
                Ok(())
            }
        }
    }

    /// Hull of the pieces, or `None` for `q = 0`.
    pub fn raw_support(&self) -> Option<(f64, f64)> {
        let spans: Vec<(f64, f64)> = match self {
            PerturbationSpec::Zero => return None,
            PerturbationSpec::Polynomial { pieces } => pieces.iter().map(|p| (p.lo, p.hi)).collect(),
            PerturbationSpec::Step { pieces } => pieces.iter().map(|p| (p.lo, p.hi)).collect(),
            PerturbationSpec::Table { knots, .. } => vec![(knots[0], knots[knots.len() - 1])],
        };
        let lo = spans.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
        let hi = spans.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
        if lo <= hi {
            Some((lo, hi))
        } else {
            None
        }
    }

    /// Points where `q` (or a derivative) may jump: piece endpoints and knots.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = match self {
            PerturbationSpec::Zero => vec![],
            PerturbationSpec::Polynomial { pieces } => pieces.iter().flat_map(|p| [p.lo, p.hi]).collect(),
            PerturbationSpec::Step { pieces } => pieces.iter().flat_map(|p| [p.lo, p.hi]).collect(),
            PerturbationSpec::Table { knots, .. } => knots.clone(),
        };
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            PerturbationSpec::Zero => 0.0,
            PerturbationSpec::Polynomial { pieces } => pieces
                .iter()
                .find(|p| p.lo <= x && x <= p.hi)
                .map_or(0.0, |p| horner(&p.coeffs, x)),
            PerturbationSpec::Step { pieces } => {
                pieces.iter().find(|p| p.lo <= x && x <= p.hi).map_or(0.0, |p| p.height)
            }
            PerturbationSpec::Table { knots, values } => {
                let n = knots.len();
                if x < knots[0] || x > knots[n - 1] {
                    return 0.0;
                }
                let i = knots.partition_point(|k| *k <= x).clamp(1, n - 1);
                let t = (x - knots[i - 1]) / (knots[i] - knots[i - 1]);
                values[i - 1] + t * (values[i] - values[i - 1])
            }
        }
    }

    /// An upper bound for `sup |q|`: exact for steps and tables, a
    /// coefficient-wise bound for polynomials.
    pub fn sup_abs(&self) -> f64 {
        match self {
            PerturbationSpec::Zero => 0.0,
            PerturbationSpec::Polynomial { pieces } => pieces
                .iter()
                .map(|p| {
                    let r = p.lo.abs().max(p.hi.abs());
                    p.coeffs.iter().enumerate().map(|(k, c)| c.abs() * r.powi(k as i32)).sum::<f64>()
                })
                .fold(0.0, f64::max),
            PerturbationSpec::Step { pieces } => pieces.iter().map(|p| p.height.abs()).fold(0.0, f64::max),
            PerturbationSpec::Table { values, .. } => values.iter().map(|v| v.abs()).fold(0.0, f64::max),
        }
    }

    /// Moves every piece endpoint equal to the current right end of the
    /// support to `b` (the sweep over the support length). Pieces that become
    /// empty are dropped; dropping all of them leaves `q = 0`.
    pub fn with_right_end(&self, b: f64) -> Result<Self> {
        let Some((_, hi)) = self.raw_support() else {
            return Err(Error::InvalidPotential("q = 0 has no right end to move".into()));
        };
        let mv = |x: f64| if x == hi { b } else { x };
        let out = match self {
            PerturbationSpec::Zero => unreachable!(),
            PerturbationSpec::Polynomial { pieces } => {
                let pieces: Vec<PolyPiece> = pieces
                    .iter()
                    .map(|p| PolyPiece { lo: p.lo, hi: mv(p.hi), coeffs: p.coeffs.clone() })
                    .filter(|p| p.lo < p.hi)
                    .collect();
                if pieces.is_empty() {
                    PerturbationSpec::Zero
                } else {
                    PerturbationSpec::Polynomial { pieces }
                }
            }
            PerturbationSpec::Step { pieces } => {
                let pieces: Vec<StepPiece> = pieces
                    .iter()
                    .map(|p| StepPiece { lo: p.lo, hi: mv(p.hi), height: p.height })
                    .filter(|p| p.lo < p.hi)
                    .collect();
                if pieces.is_empty() {
                    PerturbationSpec::Zero
                } else {
                    PerturbationSpec::Step { pieces }
                }
            }
            PerturbationSpec::Table { .. } => {
                return Err(Error::InvalidPotential("tables cannot be stretched".into()));
            }
        };
        out.validate()?;
        Ok(out)
    }
}

/// Smallest interval containing `[lo, hi]` and the origin.
pub fn normalize_support(lo: f64, hi: f64) -> Result<(f64, f64)> {
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidPotential(format!("support [{lo}, {hi}] must be finite")));
    }
    if lo > hi {
        return Err(Error::InvalidPotential(format!("support [{lo}, {hi}] is empty")));
    }
    Ok((lo.min(0.0), hi.max(0.0)))
}

/// `-d^2/dx^2 + |x|^beta + alpha q(x)` together with the interval `[a, b]`,
/// `a <= 0 <= b`, outside which `q` vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    pub beta: f64,
    pub alpha: f64,
    pub q: PerturbationSpec,
    a: f64,
    b: f64,
}

impl PotentialSpec {
    pub fn new(beta: f64, alpha: f64, q: PerturbationSpec) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidPotential(format!("beta must be positive, got {beta}")));
        }
        if !alpha.is_finite() {
            return Err(Error::InvalidPotential(format!("alpha must be finite, got {alpha}")));
        }
        q.validate()?;
        let (a, b) = match q.raw_support() {
            Some((lo, hi)) => normalize_support(lo, hi)?,
            None => (0.0, 0.0),
        };
        Ok(PotentialSpec { beta, alpha, q, a, b })
    }

    /// The unperturbed operator `-d^2/dx^2 + |x|^beta`.
    pub fn unperturbed(beta: f64) -> Result<Self> {
        Self::new(beta, 0.0, PerturbationSpec::Zero)
    }

    /// Widens `[a, b]`; the new interval must contain the current one.
    pub fn with_support(mut self, a: f64, b: f64) -> Result<Self> {
        let (a, b) = normalize_support(a, b)?;
        if a > self.a || b < self.b {
            return Err(Error::InvalidPotential(format!(
                "support [{a}, {b}] does not contain [{}, {}]",
                self.a, self.b
            )));
        }
        self.a = a;
        self.b = b;
        Ok(self)
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        PotentialSpec { alpha, ..self.clone() }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn q(&self, x: f64) -> f64 {
        if x < self.a || x > self.b {
            return 0.0;
        }
        self.q.eval(x)
    }

    /// `w(x) = |x|^beta + alpha q(x)`.
    pub fn w(&self, x: f64) -> f64 {
        let base = x.abs().powf(self.beta);
        if self.alpha == 0.0 {
            return base;
        }
        base + self.alpha * self.q(x)
    }

    /// Breakpoints of `w` inside `[lo, hi]`: those of `q`, plus the origin
    /// where `|x|^beta` is not smooth unless beta is an even integer.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts = self.q.breakpoints();
        pts.push(0.0);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// `beta` as an integer when it is one.
    pub fn integer_beta(&self) -> Option<u32> {
        (self.beta == self.beta.round() && self.beta <= u32::MAX as f64).then_some(self.beta as u32)
    }
}

pub fn eval_w(spec: &PotentialSpec, x: f64) -> f64 {
    spec.w(x)
}
