//! Real special functions needed for the boundary data and the closed forms.

mod bessel;
mod gamma;
mod pcf;
mod scaled;

pub use bessel::{bessel_i, bessel_ik, bessel_k};
pub use gamma::{gamma, rgamma, sin_pi};
pub use pcf::{pcf_d, pcf_d_at_zero, pcf_d_prime};
pub use scaled::SpecialValue;
