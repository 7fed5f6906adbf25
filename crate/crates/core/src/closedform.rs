//! Explicit formulas: unperturbed determinants and Wronskians for integer
//! `beta`, and two perturbed families with closed-form determinants.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{bessel_i, bessel_k, gamma, pcf_d, SpecialValue};

/// Which closed form; each one rejects parameters outside its validity range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClosedFormTag {
    /// `det(-d^2/dx^2 + x^2) = sqrt(2)`.
    HarmonicDet,
    /// `1/sin(pi/(beta+2))`, positive integer `beta`.
    IntegerBetaDet0,
    /// `(pi/2)(beta+2)/sin(pi/(beta+2))`, `beta > 0`.
    IntegerBetaW0,
    /// `beta = 2`, `q = -x^2` on `[0, b]`, `alpha = 1`; parameter `b >= 0`.
    Example1,
    /// `beta = 4`, `q = x^4` on `[0, 1]`; parameter `alpha >= -1`.
    Example3,
}

impl ClosedFormTag {
    pub fn name(self) -> &'static str {
        match self {
            ClosedFormTag::HarmonicDet => "harmonic_det",
            ClosedFormTag::IntegerBetaDet0 => "integer_beta_det0",
            ClosedFormTag::IntegerBetaW0 => "integer_beta_w0",
            ClosedFormTag::Example1 => "cancelled_well_w1",
            ClosedFormTag::Example3 => "quartic_bump_det",
        }
    }

    pub fn validity(self) -> &'static str {
        match self {
            ClosedFormTag::HarmonicDet => "no parameter",
            ClosedFormTag::IntegerBetaDet0 => "beta in {1, 2, 3, ...}",
            ClosedFormTag::IntegerBetaW0 => "beta > 0",
            ClosedFormTag::Example1 => "b >= 0",
            ClosedFormTag::Example3 => "alpha >= -1",
        }
    }

    /// Rejects `p` outside the validity range.
    pub fn check(self, p: f64) -> Result<()> {
        let ok = match self {
            ClosedFormTag::HarmonicDet => true,
            ClosedFormTag::IntegerBetaDet0 => p >= 1.0 && p == p.round() && p.is_finite(),
            ClosedFormTag::IntegerBetaW0 => p > 0.0 && p.is_finite(),
            ClosedFormTag::Example1 => p >= 0.0 && p.is_finite(),
            ClosedFormTag::Example3 => p >= -1.0 && p.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::ClosedFormDomain { form: self.name(), reason: format!("{p} violates {}", self.validity()) })
        }
    }
}

pub fn harmonic_det() -> f64 {
    SQRT_2
}

/// `det(-d^2/dx^2 + |x|^beta) = 1/sin(pi/(beta+2))` for positive integer `beta`.
pub fn det0_integer(beta: f64) -> Result<f64> {
    ClosedFormTag::IntegerBetaDet0.check(beta)?;
    Ok(1.0 / (PI / (beta + 2.0)).sin())
}

/// Wronskian of the Bessel-normalized recessive solutions of the
/// unperturbed problem, `(pi/2)(beta+2)/sin(pi/(beta+2))`.
pub fn w0_closed(beta: f64) -> Result<f64> {
    ClosedFormTag::IntegerBetaW0.check(beta)?;
    Ok(0.5 * PI * (beta + 2.0) / (PI / (beta + 2.0)).sin())
}

/// Determinant of `-d^2/dx^2 + x^2 - x^2 1_{[0,b]}`, which is the normalized
/// Wronskian of the two parabolic-cylinder solutions joined by straight
/// lines across `[0, b]`. Kept scaled: it decays like `e^{-b^2/2}`.
pub fn example1_w1(b: f64) -> Result<SpecialValue> {
    ClosedFormTag::Example1.check(b)?;
    let z = SQRT_2 * b;
    let dm = pcf_d(-0.5, z)?;
    let dp = pcf_d(0.5, z)?;
    let c1 = 2f64.powf(0.25) * PI.sqrt() / gamma(0.25)?;
    let c2 = PI.sqrt() / (2f64.powf(0.75) * gamma(0.75)?);
    let first = dm.scale(1.0 - b * b).add(dp.scale(SQRT_2 * b));
    let second = dm.scale(b).sub(dp.scale(SQRT_2));
    Ok(first.scale(c1).sub(second.scale(c2)))
}

/// Leading large-`b` behaviour of [`example1_w1`], `e^{-b^2/2} b^{3/2} sqrt(pi)/Gamma(1/4)`.
pub fn example1_asymptote(b: f64) -> Result<SpecialValue> {
    ClosedFormTag::Example1.check(b)?;
    Ok(SpecialValue::new(b.powf(1.5) * PI.sqrt() / gamma(0.25)?, -0.5 * b * b))
}

/// Determinant of `-d^2/dx^2 + x^4 + alpha x^4 1_{[0,1]}`, `alpha >= -1`.
pub fn example3_det(alpha: f64) -> Result<f64> {
    ClosedFormTag::Example3.check(alpha)?;
    let k16 = bessel_k(1.0 / 6.0, 1.0 / 3.0)?.to_f64();
    let k56 = bessel_k(5.0 / 6.0, 1.0 / 3.0)?.to_f64();
    let p = 1.0 + alpha;
    if p == 0.0 {
        // I_mu(s/3) ~ (s/6)^mu / Gamma(1+mu) as s -> 0; only the terms with
        // matching powers of s survive
        let six = 6f64;
        let t1 = six.powf(1.0 / 6.0) / gamma(5.0 / 6.0)? + six.powf(-1.0 / 6.0) / gamma(7.0 / 6.0)?;
        let t2 = six.powf(5.0 / 6.0) / gamma(1.0 / 6.0)?;
        return Ok((k56 * t1 + k16 * t2) / 3.0);
    }
    let z = p.sqrt() / 3.0;
    let i = |nu: f64| bessel_i(nu, z).map(|v| v.to_f64());
    let t1 = p.powf(1.0 / 12.0) * i(-1.0 / 6.0)? + p.powf(-1.0 / 12.0) * i(1.0 / 6.0)?;
    let t2 = p.powf(5.0 / 12.0) * i(-5.0 / 6.0)? + p.powf(7.0 / 12.0) * i(5.0 / 6.0)?;
    Ok((k56 * t1 + k16 * t2) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn unperturbed_determinants() {
        assert!(rel(det0_integer(2.0).unwrap(), SQRT_2) < 1e-15);
        assert!(rel(det0_integer(4.0).unwrap(), 2.0) < 1e-15);
        assert!(rel(det0_integer(1.0).unwrap(), 2.0 / 3f64.sqrt()) < 1e-15);
        assert!(det0_integer(2.5).is_err());
        assert!(det0_integer(0.0).is_err());
    }

    #[test]
    fn unperturbed_wronskians() {
        assert!(rel(w0_closed(4.0).unwrap(), 6.0 * PI) < 1e-15);
        assert!(rel(w0_closed(2.0).unwrap(), 2.0 * SQRT_2 * PI) < 1e-15);
        assert!(rel(w0_closed(1.0).unwrap(), 3f64.sqrt() * PI) < 1e-15);
        assert!(w0_closed(-1.0).is_err());
    }

    #[test]
    fn normalization_squared() {
        for beta in 1..=8 {
            let beta = beta as f64;
            let r = det0_integer(beta).unwrap() / w0_closed(beta).unwrap();
            assert!(rel(r, 2.0 / (PI * (beta + 2.0))) < 1e-14);
            assert!(rel(r, 1.0 / (PI * (1.0 + 0.5 * beta))) < 1e-14);
        }
    }

    // mpmath with 30 digits
    const W1_REF: [(f64, f64); 7] = [
        (0.0, SQRT_2),
        (1e-3, 1.414_213_562_024_411_9),
        (1e-2, 1.414_213_213_699_448),
        (0.1, 1.413_865_833_871_899_7),
        (1.0, 1.148_220_649_011_205_4),
        (4.0, 0.001_911_732_400_107_232_5),
        (6.0, 1.405_874_306_718_658_1e-7),
    ];

    #[test]
    fn cancelled_well_reference() {
        for (b, w) in W1_REF {
            let got = example1_w1(b).unwrap().to_f64();
            assert!(rel(got, w) < 1e-12, "b={b} got={got} want={w}");
        }
    }

    #[test]
    fn cancelled_well_small_b_is_cubic() {
        let c: Vec<f64> = [1e-1, 1e-2, 1e-3]
            .iter()
            .map(|&b: &f64| (example1_w1(b).unwrap().to_f64() - SQRT_2) / b.powi(3))
            .collect();
        for v in &c {
            assert!(v.is_finite() && v.abs() < 1.0, "{c:?}");
        }
        assert!(rel(c[1], c[2]) < 0.05, "{c:?}");
    }

    #[test]
    fn cancelled_well_positive_and_scaled() {
        for i in 0..=80 {
            let b = 0.1 * i as f64;
            assert!(example1_w1(b).unwrap().signum() > 0.0, "b={b}");
        }
        // far past f64 range of e^{-b^2/2}
        let v = example1_w1(40.0).unwrap();
        assert!(v.signum() > 0.0 && v.to_f64() == 0.0);
        assert!((v.ln_abs() - example1_asymptote(40.0).unwrap().ln_abs()).abs() < 0.05);
        assert!(example1_w1(-1.0).is_err());
    }

    // mpmath, printed I/K combination
    const DET3_REF: [(f64, f64); 10] = [
        (-1.0, 1.792_852_634_735_058_3),
        (-0.99, 1.794_898_528_708_091_1),
        (-0.5, 1.895_778_934_739_269_6),
        (0.0, 2.0),
        (1.0, 2.212_361_635_213_189_7),
        (3.0, 2.653_011_665_040_626_9),
        (5.0, 3.115_377_182_358_716_7),
        (20.0, 7.336_143_193_430_562_9),
        (100.0, 63.910_946_973_712_432),
        (-0.999_999, 1.792_852_634_735_058_3),
    ];

    #[test]
    fn quartic_bump_reference() {
        for (a, d) in DET3_REF {
            let tol = if a == -0.999_999 { 1e-6 } else { 1e-12 };
            assert!(rel(example3_det(a).unwrap(), d) < tol, "alpha={a}");
        }
        assert!((example3_det(0.0).unwrap() - det0_integer(4.0).unwrap()).abs() < 1e-12);
        assert!(example3_det(-1.5).is_err());
    }
}
