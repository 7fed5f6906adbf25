//! Modified Bessel functions `I_nu`, `K_nu` of real order `|nu| < 1` and
//! positive real argument.
//!
//! Temme's series gives `K_mu`, `K_{mu+1}` for `|mu| <= 1/2` and `x < 2`;
//! Steed's continued fraction (CF2) takes over for `x >= 2`. `I_nu` comes from
//! the ratio continued fraction (CF1) and the Wronskian
//! `I_nu K_nu' - I_nu' K_nu = -1/x`, so no branch ever subtracts two large
//! numbers. For `x >= 2` the `K` values carry `e^{-x}` in the scale exponent
//! and the `I` values carry `e^{x}`.

use std::f64::consts::PI;

use super::gamma::{sin_pi, RGAMMA_TAYLOR};
use super::SpecialValue;
use crate::error::{Error, Result};

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const MAXIT: usize = 100_000;
const TEMME_XMAX: f64 = 2.0;

/// `(1/Gamma(1-x) - 1/Gamma(1+x)) / 2x`, `(1/Gamma(1-x) + 1/Gamma(1+x)) / 2`,
/// `1/Gamma(1+x)`, `1/Gamma(1-x)` for `|x| <= 1/2`, free of cancellation.
fn temme_gammas(x: f64) -> (f64, f64, f64, f64) {
    // 1/Gamma(1+x) = sum_{k>=1} c_k x^{k-1}; split into even and odd parts.
    let x2 = x * x;
    let mut odd = 0.0; // c_1 + c_3 x^2 + ...
    let mut even = 0.0; // c_2 + c_4 x^2 + ...
    for (i, c) in RGAMMA_TAYLOR.iter().enumerate().rev() {
        if i % 2 == 0 {
            odd = odd * x2 + c;
        } else {
            even = even * x2 + c;
        }
    }
    let gam1 = -even;
    let gam2 = odd;
    (gam1, gam2, gam2 + x * even, gam2 - x * even)
}

/// `(K_mu, K_{mu+1})` with a shared scale exponent, `|mu| <= 1/2`.
fn k_pair(mu: f64, x: f64) -> Result<(f64, f64, f64)> {
    let xi = 1.0 / x;
    if x < TEMME_XMAX {
        let x2 = 0.5 * x;
        let pimu = PI * mu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = mu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = 0.5 * ee / gampl;
        let mut q = 0.5 / (ee * gammi);
        let mut c = 1.0;
        let dd = x2 * x2;
        let mut sum1 = p;
        let mu2 = mu * mu;
        let mut converged = false;
        for i in 1..MAXIT {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - mu2);
            c *= dd / fi;
            p /= fi - mu;
            q /= fi + mu;
            let del = c * ff;
            sum += del;
            let del1 = c * (p - fi * ff);
            sum1 += del1;
            if del.abs() < sum.abs() * EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence(format!("Temme series K_{mu}({x})")));
        }
        Ok((sum, sum1 * 2.0 * xi, 0.0))
    } else {
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut delh = d;
        let mut h = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - mu * mu;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        let mut converged = false;
        for i in 2..MAXIT {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh = (b * d - 1.0) * delh;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence(format!("CF2 K_{mu}({x})")));
        }
        h *= a1;
        let kmu = (PI / (2.0 * x)).sqrt() / s;
        let k1 = kmu * (mu + x + 0.5 - h) * xi;
        Ok((kmu, k1, -x))
    }
}

/// `I_nu'/I_nu` by the modified Lentz evaluation of CF1.
fn i_log_derivative(nu: f64, x: f64) -> Result<f64> {
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    for _ in 0..MAXIT {
        b += xi2;
        d = 1.0 / (b + d);
        c = b + 1.0 / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < EPS {
            return Ok(h);
        }
    }
    Err(Error::NoConvergence(format!("CF1 I_{nu}({x})")))
}

/// `(I_nu(x), K_nu(x))` for `0 <= nu < 1`, `x > 0`.
fn bessel_ik_nonneg(nu: f64, x: f64) -> Result<(SpecialValue, SpecialValue)> {
    let nl = (nu + 0.5).floor() as usize;
    let mu = nu - nl as f64;
    let xi = 1.0 / x;

    // f_nu = I_nu'/I_nu, then recur down to mu with an arbitrary start.
    let h = i_log_derivative(nu, x)?;
    let mut ril = FPMIN;
    let mut ripl = h * ril;
    let ril1 = ril;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let ritemp = fact * ril + ripl;
        fact -= xi;
        ripl = fact * ritemp + ril;
        ril = ritemp;
    }
    let f = ripl / ril;

    let (mut kmu, mut k1, kscale) = k_pair(mu, x)?;
    let kmup = mu * xi * kmu - k1;
    let imu = xi / (f * kmu - kmup);
    let inu = imu * ril1 / ril;
    for i in 1..=nl {
        let ktemp = (mu + i as f64) * 2.0 * xi * k1 + kmu;
        kmu = k1;
        k1 = ktemp;
    }
    Ok((SpecialValue::new(inu, -kscale), SpecialValue::new(kmu, kscale)))
}

fn check_args(nu: f64, z: f64) -> Result<()> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("modified Bessel function needs z > 0, got {z}")));
    }
    if !(nu.abs() < 1.0) {
        return Err(Error::Domain(format!("order |nu| < 1 required, got {nu}")));
    }
    Ok(())
}

/// Modified Bessel function of the second kind, `K_nu(z)`.
///
/// Computed from `|nu|`, so `bessel_k(-nu, z)` and `bessel_k(nu, z)` are
/// bit-identical.
pub fn bessel_k(nu: f64, z: f64) -> Result<SpecialValue> {
    check_args(nu, z)?;
    Ok(bessel_ik_nonneg(nu.abs(), z)?.1)
}

/// Modified Bessel function of the first kind, `I_nu(z)`.
///
/// Negative orders use `I_{-nu} = I_nu + (2/pi) sin(nu pi) K_nu`.
pub fn bessel_i(nu: f64, z: f64) -> Result<SpecialValue> {
    check_args(nu, z)?;
    let (i, k) = bessel_ik_nonneg(nu.abs(), z)?;
    if nu >= 0.0 {
        Ok(i)
    } else {
        Ok(i.add(k.scale(2.0 / PI * sin_pi(-nu))))
    }
}

/// Both `I_nu(z)` and `K_nu(z)` from a single evaluation.
pub fn bessel_ik(nu: f64, z: f64) -> Result<(SpecialValue, SpecialValue)> {
    check_args(nu, z)?;
    let (i, k) = bessel_ik_nonneg(nu.abs(), z)?;
    if nu >= 0.0 {
        Ok((i, k))
    } else {
        Ok((i.add(k.scale(2.0 / PI * sin_pi(-nu))), k))
    }
}
