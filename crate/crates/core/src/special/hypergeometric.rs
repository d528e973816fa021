use num_complex::Complex64;

use crate::error::{Error, Result};

/// Truncation controls for power series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub max_terms: usize,
    /// Stop once three consecutive terms fall below `rel_tol · |partial sum|`.
    pub rel_tol: f64,
    /// Absolute floor used when the partial sum is itself tiny.
    pub abs_floor: f64,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self { max_terms: 500, rel_tol: 1e-12, abs_floor: 1e-300 }
    }
}

/// Kummer's confluent hypergeometric function ₁F₁(a; b; z) by its power series.
///
/// A nonpositive integer `a` terminates the series exactly. A nonpositive
/// integer `b` is a domain error.
pub fn kummer_1f1(a: f64, b: f64, z: Complex64, ctl: &SeriesControl) -> Result<Complex64> {
    if b <= 0.0 && b == b.floor() {
        return Err(Error::Domain(format!("1F1 with nonpositive integer b = {b}")));
    }
    let mut sum = Complex64::new(1.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    let mut small = 0usize;
    for k in 0..ctl.max_terms {
        let kf = k as f64;
        term *= z * ((a + kf) / ((b + kf) * (kf + 1.0)));
        if term == Complex64::new(0.0, 0.0) {
            return Ok(sum);
        }
        sum += term;
        let threshold = (ctl.rel_tol * sum.norm()).max(ctl.abs_floor);
        if term.norm() < threshold {
            small += 1;
            if small >= 3 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NonConvergence {
        terms: ctl.max_terms,
        last_rel: term.norm() / sum.norm().max(f64::MIN_POSITIVE),
    })
}
