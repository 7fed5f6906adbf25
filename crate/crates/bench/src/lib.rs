//! Shared fixtures for the criterion benches.

use specdet::{PerturbationSpec, PolyPiece, PotentialSpec};

/// `x^2` switched off on `[0, b]`.
pub fn cancelled_well(b: f64) -> PotentialSpec {
    let q = PerturbationSpec::quadratic(0.0, 1.0, -1.0).with_right_end(b).expect("b >= 0");
    PotentialSpec::new(2.0, 1.0, q).expect("valid spec")
}

/// Harmonic oscillator plus `alpha` on `[-1, 1]`.
pub fn step(alpha: f64) -> PotentialSpec {
    PotentialSpec::new(2.0, alpha, PerturbationSpec::step(-1.0, 1.0, 1.0)).expect("valid spec")
}

/// `x^4 + alpha x^4` on `[0, 1]`.
pub fn quartic_bump(alpha: f64) -> PotentialSpec {
    let q = PerturbationSpec::Polynomial { pieces: vec![PolyPiece { lo: 0.0, hi: 1.0, coeffs: vec![0.0, 0.0, 0.0, 0.0, 1.0] }] };
    PotentialSpec::new(4.0, alpha, q).expect("valid spec")
}
