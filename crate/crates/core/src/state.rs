//! Catalog of pure states and their coordinate wavefunctions.
//!
//! Descriptor grammar (also accepted by the CLI):
//!
//! ```text
//! ho:n=2
//! pho:a=10,n=1,xw=1      (xw defaults to 1)
//! coh:re=1,im=0.5        (im defaults to 0)
//! ccat:re=2,im=0
//! ```

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_real, AdaptiveConfig, Range};
use crate::special::{assoc_laguerre, hermite, ln_gamma};

/// π^{−1/4}
pub const PI_M_QUARTER: f64 = 0.751_125_544_464_942_5;

/// A catalog state. The crystallized cat carries its normalization constant,
/// computed once at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateModel {
    Ho { n: usize },
    Pho { a: f64, n: usize, xw: f64 },
    Coherent { alpha: Complex64 },
    CrystallizedCat { alpha: Complex64, norm: f64 },
}

/// The three C₃ rotations α·e^{2πij/3}, j = 0, 1, 2.
pub fn cat_amplitudes(alpha: Complex64) -> [Complex64; 3] {
    let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    [alpha, alpha * w, alpha * w * w]
}

impl StateModel {
    pub fn ho(n: usize) -> Self {
        StateModel::Ho { n }
    }

    pub fn pho(a: f64, n: usize, xw: f64) -> Result<Self> {
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::InvalidParameter(format!("PHO requires a >= 0, got {a}")));
        }
        if !(xw > 0.0) || !xw.is_finite() {
            return Err(Error::InvalidParameter(format!("PHO requires xw > 0, got {xw}")));
        }
        Ok(StateModel::Pho { a, n, xw })
    }

    pub fn coherent(alpha: Complex64) -> Self {
        StateModel::Coherent { alpha }
    }

    /// Builds the C₃ superposition and fixes N so that ∫|Ψ|² = 1 by quadrature.
    pub fn crystallized_cat(alpha: Complex64) -> Result<Self> {
        if !alpha.re.is_finite() || !alpha.im.is_finite() {
            return Err(Error::InvalidParameter("non-finite cat amplitude".into()));
        }
        let amps = cat_amplitudes(alpha);
        let half = 12.0 * alpha.norm().max(1.0);
        let cfg = AdaptiveConfig { abs_tol: 1e-15, rel_tol: 1e-13, ..Default::default() };
        let total = integrate_real(
            |x| amps.iter().map(|&a| coherent_wavefunction(a, x)).sum::<Complex64>().norm_sqr(),
            Range::Finite(-half, half),
            &cfg,
        )?;
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::Quadrature(format!("cat norm integral = {total}")));
        }
        Ok(StateModel::CrystallizedCat { alpha, norm: total.powf(-0.5) })
    }

    /// Ψ(x). PHO states vanish on x ≤ 0.
    pub fn wavefunction(&self, x: f64) -> Complex64 {
        match *self {
            StateModel::Ho { n } => Complex64::new(ho_wavefunction(n, x), 0.0),
            StateModel::Pho { a, n, xw } => Complex64::new(pho_wavefunction(a, n, xw, x), 0.0),
            StateModel::Coherent { alpha } => coherent_wavefunction(alpha, x),
            StateModel::CrystallizedCat { alpha, norm } => {
                cat_amplitudes(alpha).iter().map(|&a| coherent_wavefunction(a, x)).sum::<Complex64>()
                    * norm
            }
        }
    }

    /// N for the cat state; every other catalog state is normalized by construction.
    pub fn normalization_constant(&self) -> f64 {
        match *self {
            StateModel::CrystallizedCat { norm, .. } => norm,
            _ => 1.0,
        }
    }

    /// Length scale used to size integration domains.
    pub fn scale(&self) -> f64 {
        match *self {
            StateModel::Ho { n } => 1.0 + (n as f64).sqrt(),
            StateModel::Pho { n, xw, .. } => xw * (1.0 + (n as f64).sqrt()),
            StateModel::Coherent { alpha } | StateModel::CrystallizedCat { alpha, .. } => {
                alpha.norm().max(1.0)
            }
        }
    }

    /// Where |Ψ|² is concentrated; integration windows are centred here.
    pub fn center(&self) -> f64 {
        match *self {
            StateModel::Ho { .. } | StateModel::CrystallizedCat { .. } => 0.0,
            StateModel::Coherent { alpha } => 2f64.sqrt() * alpha.re,
            StateModel::Pho { a, n, xw } => xw * (2.0 * n as f64 + pho_b(a) + 1.0).sqrt(),
        }
    }

    /// Interval outside of which |Ψ| is negligible (below ~1e−18 relative).
    pub fn support(&self) -> (f64, f64) {
        match *self {
            StateModel::Ho { n } => {
                let r = (2.0 * n as f64 + 1.0).sqrt() + 9.0;
                (-r, r)
            }
            StateModel::Pho { a, n, xw } => {
                let r = (4.0 * n as f64 + 2.0 * pho_b(a) + 2.0).sqrt() + 9.0;
                (0.0, xw * r)
            }
            StateModel::Coherent { alpha } => {
                let c = 2f64.sqrt() * alpha.re;
                (c - 9.5, c + 9.5)
            }
            StateModel::CrystallizedCat { alpha, .. } => {
                let cs = cat_amplitudes(alpha).map(|a| 2f64.sqrt() * a.re);
                let lo = cs.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = cs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                (lo - 9.5, hi + 9.5)
            }
        }
    }

    /// Short human-readable label.
    pub fn label(&self) -> String {
        self.to_string()
    }
}

/// b = ½√(1 + 4a)
pub fn pho_b(a: f64) -> f64 {
    0.5 * (1.0 + 4.0 * a).sqrt()
}

/// Normalized Hermite function via the stable three-term recurrence.
pub fn ho_wavefunction(n: usize, x: f64) -> f64 {
    let mut p0 = PI_M_QUARTER * (-0.5 * x * x).exp();
    if n == 0 {
        return p0;
    }
    let mut p1 = 2f64.sqrt() * x * p0;
    for k in 1..n {
        let kf = k as f64;
        let p2 = (2.0 / (kf + 1.0)).sqrt() * x * p1 - (kf / (kf + 1.0)).sqrt() * p0;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// π^{−1/4} exp(−x²/2 − |α|²/2 + √2 α x − α²/2)
pub fn coherent_wavefunction(alpha: Complex64, x: f64) -> Complex64 {
    let e = -0.5 * x * x - 0.5 * alpha.norm_sqr() + 2f64.sqrt() * alpha * x - alpha * alpha * 0.5;
    e.exp() * PI_M_QUARTER
}

/// PHO eigenfunction. At a = 0 the Hermite form (with its (−1)ⁿ sign) is used.
pub fn pho_wavefunction(a: f64, n: usize, xw: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let t = x / xw;
    let nf = n as f64;
    if a == 0.0 {
        // (−1)ⁿ / (√xw 2^{2n+½} √(n! Γ(n+3/2))) e^{−t²/2} H_{2n+1}(t)
        let ln_pref = -(2.0 * nf + 0.5) * 2f64.ln()
            - 0.5 * (ln_gamma(nf + 1.0).unwrap_or(0.0) + ln_gamma(nf + 1.5).unwrap_or(0.0));
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        return sign * (ln_pref - 0.5 * t * t).exp() * hermite(2 * n + 1, t) / xw.sqrt();
    }
    let b = pho_b(a);
    // √(2 n! / Γ(n+b+1)) in log form to stay finite for large b
    let ln_norm = 0.5 * (2f64.ln() + ln_gamma(nf + 1.0).unwrap_or(0.0)
        - ln_gamma(nf + b + 1.0).unwrap_or(0.0));
    let ln_mag = ln_norm + (b + 0.5) * t.ln() - 0.5 * t * t;
    ln_mag.exp() * assoc_laguerre(n, b, t * t) / xw.sqrt()
}

impl fmt::Display for StateModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            StateModel::Ho { n } => write!(f, "ho:n={n}"),
            StateModel::Pho { a, n, xw } => write!(f, "pho:a={a},n={n},xw={xw}"),
            StateModel::Coherent { alpha } => write!(f, "coh:re={},im={}", alpha.re, alpha.im),
            StateModel::CrystallizedCat { alpha, .. } => {
                write!(f, "ccat:re={},im={}", alpha.re, alpha.im)
            }
        }
    }
}

/// Split `kind:k=v,k=v` into the kind and a list of key/value pairs.
pub(crate) fn split_descriptor(s: &str) -> Result<(String, Vec<(String, String)>)> {
    let s = s.trim();
    let (kind, rest) = match s.split_once(':') {
        Some((k, r)) => (k.trim(), r.trim()),
        None => (s, ""),
    };
    if kind.is_empty() {
        return Err(Error::Parse(format!("empty descriptor kind in '{s}'")));
    }
    let mut pairs = Vec::new();
    if !rest.is_empty() {
        for item in rest.split(',') {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got '{item}'")))?;
            pairs.push((k.trim().to_ascii_lowercase(), v.trim().to_string()));
        }
    }
    Ok((kind.to_ascii_lowercase(), pairs))
}

/// Typed access to descriptor parameters, rejecting unknown keys.
pub(crate) struct Params {
    kind: String,
    pairs: Vec<(String, String)>,
}

impl Params {
    pub(crate) fn new(kind: &str, pairs: Vec<(String, String)>, allowed: &[&str]) -> Result<Self> {
        for (k, _) in &pairs {
            if !allowed.contains(&k.as_str()) {
                return Err(Error::Parse(format!("unknown key '{k}' for '{kind}'")));
            }
        }
        Ok(Self { kind: kind.to_string(), pairs })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.pairs.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub(crate) fn f64_or(&self, key: &str, default: Option<f64>) -> Result<f64> {
        match self.raw(key) {
            Some(v) => v.parse::<f64>().map_err(|_| {
                Error::Parse(format!("'{key}' of '{}' is not a number: '{v}'", self.kind))
            }),
            None => default
                .ok_or_else(|| Error::Parse(format!("'{}' requires '{key}'", self.kind))),
        }
    }

    pub(crate) fn usize_or(&self, key: &str, default: Option<usize>) -> Result<usize> {
        match self.raw(key) {
            Some(v) => v.parse::<usize>().map_err(|_| {
                Error::Parse(format!("'{key}' of '{}' must be a nonnegative integer", self.kind))
            }),
            None => default
                .ok_or_else(|| Error::Parse(format!("'{}' requires '{key}'", self.kind))),
        }
    }
}

impl FromStr for StateModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, pairs) = split_descriptor(s)?;
        match kind.as_str() {
            "ho" => {
                let p = Params::new(&kind, pairs, &["n"])?;
                Ok(StateModel::ho(p.usize_or("n", Some(0))?))
            }
            "pho" => {
                let p = Params::new(&kind, pairs, &["a", "n", "xw"])?;
                StateModel::pho(
                    p.f64_or("a", None)?,
                    p.usize_or("n", Some(0))?,
                    p.f64_or("xw", Some(1.0))?,
                )
            }
            "coh" | "ccat" => {
                let p = Params::new(&kind, pairs, &["re", "im"])?;
                let alpha = Complex64::new(p.f64_or("re", None)?, p.f64_or("im", Some(0.0))?);
                if kind == "coh" {
                    Ok(StateModel::coherent(alpha))
                } else {
                    StateModel::crystallized_cat(alpha)
                }
            }
            other => Err(Error::Parse(format!("unknown state kind '{other}'"))),
        }
    }
}
