//! Parabolic cylinder functions D_ν(z) for real order and complex argument.
//!
//! The workhorse is the scaled function u(z) = e^{z²/4} D_ν(z), which solves
//! u'' = z u' − ν u. It is evaluated as follows:
//!
//! * |z| ≤ 1: the two-term ₁F₁ representation.
//! * Re z > 0: start from the large-|z| expansion u ~ z^ν Σ c_s z^{−2s} at a
//!   point far to the right on the same horizontal line, then integrate the ODE
//!   back to z with Taylor steps. In that direction the competing solution
//!   (∝ e^{z²/2}) decays, so errors are damped.
//! * Re z ≤ 0: integrate from the origin along the imaginary axis and then
//!   horizontally. For non-integer ν the wanted solution is the dominant one
//!   there; nonnegative integer orders use D_n(−z) = (−1)^n D_n(z).
//!
//! Working with u keeps the e^{±z²/4} factors out of the arithmetic, so the
//! Gaussian–power integral identity can be evaluated without overflow.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::{gamma_real, rgamma};
use super::hypergeometric::{kummer_1f1, SeriesControl};
use crate::error::{Error, Result};

type C = Complex64;

const SERIES_RADIUS: f64 = 1.0;
const TAYLOR_TOL: f64 = 1e-17;
const MAX_TAYLOR_TERMS: usize = 800;

/// D_ν(z).
pub fn pcf_d(order: f64, z: C) -> Result<C> {
    let u = pcf_d_scaled(order, z)?;
    Ok(u * (-z * z / 4.0).exp())
}

/// e^{z²/4} D_ν(z).
pub fn pcf_d_scaled(order: f64, z: C) -> Result<C> {
    scaled_with_derivative(order, z).map(|(u, _)| u)
}

/// ∫₀^∞ x^{α−1} e^{−p x² − q x} dx = Γ(α) (2p)^{−α/2} e^{q²/8p} D_{−α}(q/√(2p)),
/// evaluated through the right-hand side with principal branches.
///
/// Requires α > 0 and Re p > 0.
pub fn gaussian_power_integral(alpha: f64, p: C, q: C) -> Result<C> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    if !(p.re > 0.0) {
        return Err(Error::Domain(format!("Re p must be positive, got {p}")));
    }
    let two_p = 2.0 * p;
    let z = q / two_p.sqrt();
    // e^{q²/8p} D(z) = e^{z²/4} D(z) exactly, whatever branch of the root is used
    let u = pcf_d_scaled(-alpha, z)?;
    Ok(gamma_real(alpha)? * (-0.5 * alpha * two_p.ln()).exp() * u)
}

/// The single-term ₁F₁ expression 2^{−ν/2} e^{−z²/4} ₁F₁(−ν; ½; z²/2) / Γ(½ + ν).
///
/// It is not D_ν in general; it is exposed so that its deviation from
/// [`pcf_d`] can be reported.
pub fn pcf_d_single_term(order: f64, z: C, ctl: &SeriesControl) -> Result<C> {
    let f = kummer_1f1(-order, 0.5, z * z / 2.0, ctl)?;
    Ok(2f64.powf(-order / 2.0) * (-z * z / 4.0).exp() * f * rgamma(0.5 + order))
}

fn scaled_with_derivative(nu: f64, z: C) -> Result<(C, C)> {
    if !nu.is_finite() || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("pcf_D at order {nu}, z = {z}")));
    }
    if z.norm() <= SERIES_RADIUS {
        return small_z(nu, z);
    }
    if z.re >= 0.0 {
        // the expansion holds up to exponentially small terms on the closed right half-plane
        if let Some(v) = asymptotic(nu, z) {
            return Ok(v);
        }
        return from_right(nu, z);
    }
    if nu >= 0.0 && nu == nu.floor() {
        // D_n(−z) = (−1)^n D_n(z); u is even/odd the same way, u' picks up another sign
        let (u, du) = scaled_with_derivative(nu, -z)?;
        let s = if (nu as i64) % 2 == 0 { 1.0 } else { -1.0 };
        return Ok((u * s, -du * s));
    }
    if asymptotic(nu, -z).is_some() {
        return connection(nu, z);
    }
    from_origin(nu, z)
}

/// Left half-plane via
/// D_ν(z) = e^{∓iπν} D_ν(−z) + √(2π)/Γ(−ν) · e^{∓iπ(ν+1)/2} D_{−ν−1}(±iz),
/// taking the sign for which ±iz lies in the right half-plane.
fn connection(nu: f64, z: C) -> Result<(C, C)> {
    let sg = if z.im <= 0.0 { 1.0 } else { -1.0 };
    let w = C::new(0.0, sg) * z;
    let (a, da) = scaled_with_derivative(nu, -z)?;
    let ph1 = C::from_polar(1.0, -sg * PI * nu);
    let mut u = ph1 * a;
    let mut du = -(ph1 * da);
    let k = rgamma(-nu);
    if k != 0.0 {
        let (b, db) = scaled_with_derivative(-nu - 1.0, w)?;
        let coef = C::from_polar((2.0 * PI).sqrt() * k, -sg * PI * (nu + 1.0) / 2.0);
        // e^{z²/4} D_{−ν−1}(w) = e^{z²/2} u_{−ν−1}(w) because w² = −z²
        let g = (z * z / 2.0).exp();
        u += coef * g * b;
        du += coef * g * (z * b + C::new(0.0, sg) * db);
    }
    Ok((u, du))
}

fn values_at_origin(nu: f64) -> (C, C) {
    let sp = PI.sqrt();
    let u0 = 2f64.powf(nu / 2.0) * sp * rgamma((1.0 - nu) / 2.0);
    let du0 = -(2f64.powf((nu + 1.0) / 2.0)) * sp * rgamma(-nu / 2.0);
    (C::new(u0, 0.0), C::new(du0, 0.0))
}

fn small_z(nu: f64, z: C) -> Result<(C, C)> {
    let ctl = SeriesControl { max_terms: 500, rel_tol: 1e-17, abs_floor: 1e-300 };
    let w = z * z / 2.0;
    let g1 = rgamma((1.0 - nu) / 2.0);
    let g2 = rgamma(-nu / 2.0);
    let f1 = kummer_1f1(-nu / 2.0, 0.5, w, &ctl)?;
    let f2 = kummer_1f1((1.0 - nu) / 2.0, 1.5, w, &ctl)?;
    let pref = 2f64.powf(nu / 2.0) * PI.sqrt();
    let s2 = 2f64.sqrt();
    let u = pref * (f1 * g1 - s2 * z * f2 * g2);
    // derivatives of the ₁F₁ factors via d/dw ₁F₁(a;b;w) = (a/b) ₁F₁(a+1;b+1;w), dw/dz = z
    let df1 = if g1 == 0.0 {
        C::new(0.0, 0.0)
    } else {
        kummer_1f1(-nu / 2.0 + 1.0, 1.5, w, &ctl)? * (-nu / 2.0 / 0.5) * z
    };
    let df2 = if g2 == 0.0 {
        C::new(0.0, 0.0)
    } else {
        kummer_1f1((1.0 - nu) / 2.0 + 1.0, 2.5, w, &ctl)? * ((1.0 - nu) / 2.0 / 1.5) * z
    };
    let du = pref * (df1 * g1 - s2 * (f2 + z * df2) * g2);
    Ok((u, du))
}

/// Large-|z| expansion of u and u'; `None` if it cannot reach full precision at z.
fn asymptotic(nu: f64, z: C) -> Option<(C, C)> {
    let zi2 = (z * z).inv();
    let mut c = 1.0f64;
    let mut zpow = C::new(1.0, 0.0);
    let mut s = C::new(1.0, 0.0);
    let mut ds = C::new(0.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 0..200 {
        let kf = k as f64;
        c *= -(nu - 2.0 * kf) * (nu - 2.0 * kf - 1.0) / (2.0 * (kf + 1.0));
        zpow *= zi2;
        let term = zpow * c;
        let mag = term.norm();
        if mag > last {
            return None;
        }
        last = mag;
        s += term;
        // d/dz z^{−2(k+1)} = −2(k+1) z^{−2k−3}
        ds += term * (-2.0 * (kf + 1.0)) / z;
        if mag <= TAYLOR_TOL * s.norm() || c == 0.0 {
            let zn = z.powf(nu);
            let u = zn * s;
            let du = zn * (s * nu / z + ds);
            return Some((u, du));
        }
    }
    None
}

fn step_length(z0: C, nu: f64) -> f64 {
    2.5 / (1.0 + z0.norm() + nu.abs().sqrt())
}

fn taylor_step(nu: f64, z0: C, u: C, du: C, h: C) -> Result<(C, C)> {
    let mut a0 = u;
    let mut a1 = du;
    let mut su = u + du * h;
    let mut sdu = du;
    let mut hk = h; // h^{k+1}
    let mut quiet = 0;
    for k in 0..MAX_TAYLOR_TERMS {
        let kf = k as f64;
        let a2 = (z0 * (kf + 1.0) * a1 + a0 * (kf - nu)) / ((kf + 2.0) * (kf + 1.0));
        let tdu = a2 * hk * (kf + 2.0);
        hk *= h;
        let tu = a2 * hk;
        su += tu;
        sdu += tdu;
        let small_u = tu.norm() <= TAYLOR_TOL * su.norm() || tu.norm() < 1e-300;
        let small_du = tdu.norm() <= TAYLOR_TOL * sdu.norm() || tdu.norm() < 1e-300;
        if small_u && small_du && k >= 2 {
            quiet += 1;
            if quiet >= 2 {
                return Ok((su, sdu));
            }
        } else {
            quiet = 0;
        }
        a0 = a1;
        a1 = a2;
    }
    Err(Error::NonConvergence { terms: MAX_TAYLOR_TERMS, last_rel: f64::NAN })
}

/// Integrate u from `start` to `end` along a straight segment.
fn integrate_segment(nu: f64, start: C, end: C, mut u: C, mut du: C) -> Result<(C, C)> {
    let mut z0 = start;
    loop {
        let rem = end - z0;
        let dist = rem.norm();
        if dist == 0.0 {
            return Ok((u, du));
        }
        let hmax = step_length(z0, nu).min(step_length(end, nu).max(0.05));
        let h = if dist <= hmax { rem } else { rem * (hmax / dist) };
        let (nu_, ndu) = taylor_step(nu, z0, u, du, h)?;
        u = nu_;
        du = ndu;
        z0 = if dist <= hmax { end } else { z0 + h };
    }
}

fn from_right(nu: f64, z: C) -> Result<(C, C)> {
    let mut x = z.re.max(z.im.abs() + 2.0).max(4.0 + 1.2 * nu.abs().sqrt());
    for _ in 0..60 {
        let start = C::new(x, z.im);
        if let Some((u, du)) = asymptotic(nu, start) {
            return integrate_segment(nu, start, z, u, du);
        }
        x *= 1.25;
    }
    Err(Error::NonConvergence { terms: 200, last_rel: f64::NAN })
}

fn from_origin(nu: f64, z: C) -> Result<(C, C)> {
    let (u0, du0) = values_at_origin(nu);
    let corner = C::new(0.0, z.im);
    let (u1, du1) = integrate_segment(nu, C::new(0.0, 0.0), corner, u0, du0)?;
    integrate_segment(nu, corner, z, u1, du1)
}
