use std::f64::consts::PI;

use crate::error::{Error, Result};

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_nonpositive_integer(z: f64) -> bool {
    z <= 0.0 && z == z.floor()
}

fn lanczos_sum(z: f64) -> f64 {
    // z is the shifted argument (Γ(z + 1))
    let mut x = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    x
}

/// Γ(z) for real z away from the poles at 0, −1, −2, …
///
/// Positive integers up to 20 are returned exactly as factorials.
pub fn gamma_real(z: f64) -> Result<f64> {
    if is_nonpositive_integer(z) {
        return Err(Error::GammaPole(z));
    }
    if z.is_nan() {
        return Err(Error::Domain("gamma of NaN".into()));
    }
    if z == z.floor() && z <= 21.0 {
        let mut f = 1.0;
        for k in 2..(z as u64) {
            f *= k as f64;
        }
        return Ok(f);
    }
    if z < 0.5 {
        // reflection
        let s = (PI * z).sin();
        return Ok(PI / (s * gamma_real(1.0 - z)?));
    }
    let zm = z - 1.0;
    let t = zm + LANCZOS_G + 0.5;
    Ok((2.0 * PI).sqrt() * t.powf(zm + 0.5) * (-t).exp() * lanczos_sum(zm))
}

/// 1/Γ(z), an entire function: zero at the poles of Γ.
pub fn rgamma(z: f64) -> f64 {
    if is_nonpositive_integer(z) {
        0.0
    } else {
        // gamma_real can only fail at the poles handled above
        1.0 / gamma_real(z).unwrap_or(f64::INFINITY)
    }
}

/// ln|Γ(z)| for z > 0.
pub fn ln_gamma(z: f64) -> Result<f64> {
    if z <= 0.0 {
        return Err(Error::Domain(format!("ln_gamma requires z > 0, got {z}")));
    }
    if z < 0.5 {
        return Ok((PI / (PI * z).sin()).ln() - ln_gamma(1.0 - z)?);
    }
    let zm = z - 1.0;
    let t = zm + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (zm + 0.5) * t.ln() - t + lanczos_sum(zm).ln())
}

/// Rising factorial (a)_k = a (a+1) ⋯ (a+k−1), with (a)_0 = 1.
pub fn pochhammer(a: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (a + j as f64))
}
