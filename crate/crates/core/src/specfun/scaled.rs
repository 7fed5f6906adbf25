use std::fmt;
use std::ops::{Mul, Neg};

/// A real number stored as `value * exp(scale_exponent)`.
///
/// Evaluations of `K_nu`, `I_nu` and `D_nu` carry factors like `e^{-z}` or
/// `e^{-z^2/4}` that leave the `f64` range long before the interesting part
/// of the function does. Keeping the exponent separate lets callers form
/// products and ratios first and only materialize the final quantity.
///
/// Canonical form: `value` is zero (and then `scale_exponent` is zero) or
/// `|value|` lies in `[1/e, e]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialValue {
    pub value: f64,
    pub scale_exponent: f64,
}

impl SpecialValue {
    pub const ZERO: SpecialValue = SpecialValue { value: 0.0, scale_exponent: 0.0 };

    /// Builds a canonical value from an arbitrary `(value, exponent)` pair.
    pub fn new(value: f64, scale_exponent: f64) -> Self {
        if value == 0.0 {
            return Self::ZERO;
        }
        let shift = value.abs().ln().round();
        SpecialValue {
            value: value / shift.exp(),
            scale_exponent: scale_exponent + shift,
        }
    }

    pub fn from_f64(x: f64) -> Self {
        Self::new(x, 0.0)
    }

    /// The represented quantity; may overflow to infinity or underflow to 0.
    pub fn to_f64(self) -> f64 {
        if self.value == 0.0 {
            return 0.0;
        }
        self.value * self.scale_exponent.exp()
    }

    /// Natural log of the absolute value.
    pub fn ln_abs(self) -> f64 {
        self.value.abs().ln() + self.scale_exponent
    }

    pub fn is_zero(self) -> bool {
        self.value == 0.0
    }

    pub fn signum(self) -> f64 {
        if self.value == 0.0 {
            0.0
        } else {
            self.value.signum()
        }
    }

    pub fn scale(self, factor: f64) -> Self {
        Self::new(self.value * factor, self.scale_exponent)
    }

    pub fn div(self, other: SpecialValue) -> Self {
        Self::new(self.value / other.value, self.scale_exponent - other.scale_exponent)
    }

    /// Sum of two scaled values, aligned on the larger exponent.
    pub fn add(self, other: SpecialValue) -> Self {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let e = self.scale_exponent.max(other.scale_exponent);
        let a = self.value * (self.scale_exponent - e).exp();
        let b = other.value * (other.scale_exponent - e).exp();
        Self::new(a + b, e)
    }

    pub fn sub(self, other: SpecialValue) -> Self {
        self.add(-other)
    }
}

impl Mul for SpecialValue {
    type Output = SpecialValue;
    fn mul(self, rhs: SpecialValue) -> SpecialValue {
        SpecialValue::new(self.value * rhs.value, self.scale_exponent + rhs.scale_exponent)
    }
}

impl Neg for SpecialValue {
    type Output = SpecialValue;
    fn neg(self) -> SpecialValue {
        SpecialValue { value: -self.value, scale_exponent: self.scale_exponent }
    }
}

impl fmt::Display for SpecialValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*exp({})", self.value, self.scale_exponent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_is_canonical() {
        let z = SpecialValue::new(0.0, 12.0);
        assert_eq!(z, SpecialValue::ZERO);
        assert_eq!(z.to_f64(), 0.0);
    }

    #[test]
    fn survives_underflow_range() {
        // e^{-900} underflows f64, the scaled product does not
        let tiny = SpecialValue::new(2.0, -900.0);
        let big = SpecialValue::new(3.0, 900.0);
        assert!((( tiny * big).to_f64() - 6.0).abs() < 1e-12);
        assert_eq!(tiny.to_f64(), 0.0);
    }

    proptest! {
        #[test]
        fn canonical_range(v in -1e300f64..1e300, e in -500.0f64..500.0) {
            prop_assume!(v != 0.0);
            let s = SpecialValue::new(v, e);
            let m = s.value.abs();
            prop_assert!(m >= (-1.0f64).exp() && m <= 1.0f64.exp());
            prop_assert!(((s.ln_abs() - (v.abs().ln() + e)) / (1.0 + e.abs())).abs() < 1e-13);
        }

        #[test]
        fn add_matches_plain(a in -1e6f64..1e6, b in -1e6f64..1e6) {
            let s = SpecialValue::from_f64(a).add(SpecialValue::from_f64(b)).to_f64();
            prop_assert!((s - (a + b)).abs() <= 1e-12 * (a.abs() + b.abs() + 1.0));
        }
    }
}
