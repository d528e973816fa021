//! Symplectic and optical tomograms.
//!
//! For a pure state the tomogram is
//! W(X|μ,ν) = (2π|ν|)^{−1} |∫ Ψ(y) exp(iμy²/2ν − iXy/ν) dy|²,
//! with the limit |Ψ(X/μ)|²/|μ| as ν → 0. [`tomogram_numeric`] evaluates this
//! integral directly for any catalog state and serves as the reference for
//! the closed forms in [`tomogram_analytic`].

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::composite_nodes;
use crate::special::{gamma_real, gaussian_power_integral, ln_gamma, pochhammer, SeriesControl};
use crate::state::{cat_amplitudes, ho_wavefunction, pho_b, StateModel};

type C = Complex64;

/// Reference frame (μ, ν).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameParams {
    pub mu: f64,
    pub nu: f64,
}

impl FrameParams {
    pub fn new(mu: f64, nu: f64) -> Self {
        Self { mu, nu }
    }

    /// μ = cos φ, ν = sin φ
    pub fn optical(phi: f64) -> Self {
        Self { mu: phi.cos(), nu: phi.sin() }
    }

    /// μ² + ν²
    pub fn s(&self) -> f64 {
        self.mu * self.mu + self.nu * self.nu
    }

    pub fn check(&self) -> Result<()> {
        if !self.mu.is_finite() || !self.nu.is_finite() || self.s() == 0.0 {
            return Err(Error::DegenerateFrame { mu: self.mu, nu: self.nu });
        }
        Ok(())
    }
}

/// (s cos φ, s⁻¹ sin φ)
pub fn frame_from_squeeze(s: f64, phi: f64) -> Result<FrameParams> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::InvalidParameter(format!("squeeze must be positive, got {s}")));
    }
    Ok(FrameParams { mu: s * phi.cos(), nu: phi.sin() / s })
}

/// Settings for the direct quadrature of the tomogram integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Half-width of the integration window in units of the state's length scale.
    pub x_max: f64,
    /// Minimum number of Gauss–Legendre nodes; more are used when the phase oscillates fast.
    pub nodes: usize,
    /// Below this |ν| the ν → 0 limit formula is used.
    pub nu_epsilon: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { x_max: 12.0, nodes: 4096, nu_epsilon: 1e-3 }
    }
}

impl QuadratureConfig {
    pub fn check(&self) -> Result<()> {
        if self.nodes < 64 {
            return Err(Error::InvalidParameter(format!("nodes must be >= 64, got {}", self.nodes)));
        }
        if !(self.x_max > 0.0) {
            return Err(Error::InvalidParameter(format!("x_max must be > 0, got {}", self.x_max)));
        }
        if !(self.nu_epsilon >= 0.0) {
            return Err(Error::InvalidParameter("nu_epsilon must be >= 0".into()));
        }
        Ok(())
    }
}

/// Which reading of the PHO closed forms to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhoForm {
    /// Forms re-derived from the Gaussian–power integral identity: the
    /// Laguerre expansion terminates with (−n)_k and carries (b+1)_n/n!;
    /// the a = 0 double sum uses ((ν − iμx_ω²)/4ν)^m.
    #[default]
    Corrected,
    /// The expressions as printed: (n)_k with prefactor ((b+1)_n/n)², and
    /// (x_ω²/16ν)^m (ν − iμx_ω²)^m with ν^{2n+1}. Kept for comparison only.
    PaperLiteral,
}

/// Options for [`tomogram_analytic_with`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AnalyticOptions {
    pub pho_form: PhoForm,
    pub series: SeriesControl,
}

/// Tomogram by direct quadrature of the pure-state formula.
pub fn tomogram_numeric(model: &StateModel, x: f64, frame: FrameParams, cfg: &QuadratureConfig) -> Result<f64> {
    frame.check()?;
    cfg.check()?;
    let FrameParams { mu, nu } = frame;
    if nu.abs() < cfg.nu_epsilon && mu != 0.0 {
        return Ok(model.wavefunction(x / mu).norm_sqr() / mu.abs());
    }
    let amp = overlap_integral(model, x, frame, cfg)?;
    Ok(amp.norm_sqr() / (2.0 * PI * nu.abs()))
}

/// ∫ Ψ(y) exp(iμy²/2ν − iXy/ν) dy on composite Gauss–Legendre panels.
fn overlap_integral(model: &StateModel, x: f64, frame: FrameParams, cfg: &QuadratureConfig) -> Result<C> {
    let FrameParams { mu, nu } = frame;
    let (slo, shi) = model.support();
    let c = model.center();
    let half = cfg.x_max * model.scale();
    let lo = slo.max(c - half);
    let hi = shi.min(c + half);
    if !(hi > lo) {
        return Err(Error::Quadrature(format!("empty integration window [{lo}, {hi}]")));
    }
    // largest phase derivative of the kernel plus the state's own wavenumber
    let kernel = (mu * lo - x).abs().max((mu * hi - x).abs()) / nu.abs();
    let k = kernel + state_wavenumber(model);
    let panels = (cfg.nodes / 16).max(((hi - lo) * k / 3.0).ceil() as usize + 1);
    if panels > 4_000_000 {
        return Err(Error::Quadrature(format!("{panels} panels needed at nu = {nu}")));
    }
    let (ys, ws) = composite_nodes(lo, hi, panels);
    let a = mu / (2.0 * nu);
    let b = x / nu;
    let mut acc = C::new(0.0, 0.0);
    for (y, w) in ys.iter().zip(&ws) {
        let psi = model.wavefunction(*y);
        if psi.re == 0.0 && psi.im == 0.0 {
            continue;
        }
        let ph = a * y * y - b * y;
        acc += psi * C::from_polar(*w, ph);
    }
    if !acc.re.is_finite() || !acc.im.is_finite() {
        return Err(Error::Quadrature("non-finite tomogram integral".into()));
    }
    Ok(acc)
}

fn state_wavenumber(model: &StateModel) -> f64 {
    match *model {
        StateModel::Ho { n } => 2.0 * (2.0 * n as f64 + 1.0).sqrt(),
        StateModel::Pho { a, n, xw } => 2.0 * (4.0 * n as f64 + 2.0 * pho_b(a) + 2.0).sqrt() / xw,
        StateModel::Coherent { alpha } | StateModel::CrystallizedCat { alpha, .. } => {
            2.0 + 2.0 * 2f64.sqrt() * alpha.norm()
        }
    }
}

/// Closed-form tomogram with the default (corrected) PHO forms.
pub fn tomogram_analytic(model: &StateModel, x: f64, frame: FrameParams) -> Result<f64> {
    tomogram_analytic_with(model, x, frame, &AnalyticOptions::default())
}

pub fn tomogram_analytic_with(
    model: &StateModel,
    x: f64,
    frame: FrameParams,
    opts: &AnalyticOptions,
) -> Result<f64> {
    frame.check()?;
    let s = frame.s();
    match *model {
        StateModel::Ho { n } => {
            let r = s.sqrt();
            Ok(ho_wavefunction(n, x / r).powi(2) / r)
        }
        StateModel::Coherent { alpha } => Ok(cat_term(alpha, 0, 0, x, frame).re),
        StateModel::CrystallizedCat { alpha, norm } => {
            let g: C = (0..3).map(|j| cat_amplitude_factor(alpha, j, x, frame)).sum();
            Ok(norm * norm * g.norm_sqr() / (PI * s).sqrt())
        }
        StateModel::Pho { a, n, xw } => {
            if frame.nu == 0.0 {
                return Err(Error::UnsupportedFrame(
                    "PHO closed forms need nu != 0; use the quadrature path".into(),
                ));
            }
            if a == 0.0 {
                pho_half_oscillator(n, xw, x, frame, opts.pho_form)
            } else {
                pho_general(a, n, xw, x, frame, opts)
            }
        }
    }
}

/// e^{−X²/2s} G_j with G_j = exp(−|α|²/2 + α_j²(ν+iμ)²/2s − √2 i α_j X (ν+iμ)/s),
/// where W_cat = N² e^{−X²/s}/√(πs) |Σ_j G_j|². The envelope is folded into the
/// exponent so that large |X| cannot produce 0·∞.
fn cat_amplitude_factor(alpha: C, j: usize, x: f64, frame: FrameParams) -> C {
    let aj = cat_amplitudes(alpha)[j];
    let s = frame.s();
    let w = C::new(frame.nu, frame.mu);
    let e = -0.5 * alpha.norm_sqr() - x * x / (2.0 * s) + aj * aj * w * w / (2.0 * s)
        - C::new(0.0, 2f64.sqrt()) * aj * x * w / s;
    e.exp()
}

/// The (j, k) term of the cat tomogram without the N² factor,
/// e^{−X²/s}/√(πs) G_j conj(G_k); indices 0, 1, 2 label α, αω, αω².
/// The (0, 0) term is the coherent-state tomogram of α.
pub fn cat_term(alpha: C, j: usize, k: usize, x: f64, frame: FrameParams) -> C {
    let g = cat_amplitude_factor(alpha, j, x, frame) * cat_amplitude_factor(alpha, k, x, frame).conj();
    g / (PI * frame.s()).sqrt()
}

/// p = ½ − iμx_ω²/2ν and q = iXx_ω/ν, so that the PHO overlap integral is
/// x_ω ∫₀^∞ t^{…} e^{−pt² − qt} (…) dt.
fn pho_pq(xw: f64, x: f64, frame: FrameParams) -> (C, C) {
    let p = C::new(0.5, -frame.mu * xw * xw / (2.0 * frame.nu));
    let q = C::new(0.0, x * xw / frame.nu);
    (p, q)
}

/// a = 0: expansion of H_{2n+1} into parabolic cylinder functions.
fn pho_half_oscillator(n: usize, xw: f64, x: f64, frame: FrameParams, form: PhoForm) -> Result<f64> {
    let FrameParams { mu, nu } = frame;
    let nf = n as f64;
    let sx = nu * nu + mu * mu * xw.powi(4);
    let (p, q) = pho_pq(xw, x, frame);
    let z = q / (2.0 * p).sqrt();
    let ratio = match form {
        PhoForm::Corrected => C::new(nu, -mu * xw * xw) / (4.0 * nu),
        PhoForm::PaperLiteral => C::new(nu, -mu * xw * xw) * (xw * xw / (16.0 * nu)),
    };
    let mut sum = C::new(0.0, 0.0);
    let mut rpow = C::new(1.0, 0.0);
    let mut mfact = 1.0;
    for m in 0..=n {
        if m > 0 {
            rpow *= ratio;
            mfact *= m as f64;
        }
        let order = -(2.0 * (nf - m as f64) + 2.0);
        // e^{q²/8p} D(z) is the scaled function, which absorbs the Gaussian envelope
        let u = crate::special::pcf_d_scaled(order, z)?;
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        sum += rpow * u * (sign / mfact);
    }
    let ln_fact = ln_gamma(2.0 * nf + 2.0)?;
    let ln_pref = 2.0 * ln_fact - ln_gamma(nf + 1.0)? - ln_gamma(nf + 1.5)?
        + (2.0 * nf + 1.0) * nu.abs().ln()
        - (nf + 1.0) * sx.ln();
    let mut w = ln_pref.exp() * xw / PI * sum.norm_sqr();
    if form == PhoForm::PaperLiteral && nu < 0.0 {
        // ν^{2n+1} as printed is negative for ν < 0
        w = -w;
    }
    Ok(w)
}

/// General a: Laguerre expansion of Ψ_n and the Gaussian–power integral identity term by term.
fn pho_general(a: f64, n: usize, xw: f64, x: f64, frame: FrameParams, opts: &AnalyticOptions) -> Result<f64> {
    let b = pho_b(a);
    let nf = n as f64;
    let (p, q) = pho_pq(xw, x, frame);
    let norm = 2.0 * (ln_gamma(nf + 1.0)? - ln_gamma(nf + b + 1.0)?).exp();
    let mut sum = C::new(0.0, 0.0);
    let lead;
    match opts.pho_form {
        PhoForm::Corrected => {
            lead = pochhammer(b + 1.0, n) / gamma_real(nf + 1.0)?;
            let mut coef = 1.0; // (−n)_k / ((b+1)_k k!)
            for k in 0..=n {
                let kf = k as f64;
                if k > 0 {
                    coef *= (kf - 1.0 - nf) / ((b + kf) * kf);
                }
                sum += gaussian_power_integral(2.0 * kf + b + 1.5, p, q)? * coef;
            }
        }
        PhoForm::PaperLiteral => {
            if n == 0 {
                return Err(Error::Domain("printed PHO prefactor divides by n = 0".into()));
            }
            lead = pochhammer(b + 1.0, n) / nf;
            let ctl = opts.series;
            let mut coef = 1.0; // (n)_k / ((b+1)_k k!)
            let mut small = 0;
            let mut converged = false;
            let mut last_rel = f64::NAN;
            for k in 0..ctl.max_terms {
                let kf = k as f64;
                if k > 0 {
                    coef *= (nf + kf - 1.0) / ((b + kf) * kf);
                }
                let term = gaussian_power_integral(2.0 * kf + b + 1.5, p, q)? * coef;
                if !term.norm().is_finite() || !sum.norm().is_finite() {
                    return Err(Error::NonConvergence { terms: k, last_rel: f64::INFINITY });
                }
                sum += term;
                last_rel = term.norm() / sum.norm().max(f64::MIN_POSITIVE);
                if term.norm() <= (ctl.rel_tol * sum.norm()).max(ctl.abs_floor) {
                    small += 1;
                    if small >= 3 {
                        converged = true;
                        break;
                    }
                } else {
                    small = 0;
                }
            }
            if !converged {
                return Err(Error::NonConvergence { terms: ctl.max_terms, last_rel });
            }
        }
    }
    Ok(xw / (2.0 * PI * frame.nu.abs()) * norm * lead * lead * sum.norm_sqr())
}

/// Closed form when one exists for this (model, frame), otherwise quadrature.
pub fn tomogram(model: &StateModel, x: f64, frame: FrameParams, cfg: &QuadratureConfig) -> Result<f64> {
    match tomogram_analytic(model, x, frame) {
        Err(Error::UnsupportedFrame(_)) => tomogram_numeric(model, x, frame, cfg),
        other => other,
    }
}

/// Optical tomogram: μ = cos φ, ν = sin φ.
pub fn optical_tomogram(model: &StateModel, x: f64, phi: f64) -> Result<f64> {
    tomogram(model, x, FrameParams::optical(phi), &QuadratureConfig::default())
}

/// Evaluation path for grid sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    Numeric,
    Auto,
}

/// One grid sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TomogramPoint {
    #[serde(rename = "X")]
    pub x: f64,
    pub mu: f64,
    pub nu: f64,
    #[serde(rename = "W")]
    pub w: f64,
}

/// Evaluate on every (X, frame) pair, frames outermost. Points are independent
/// and evaluated in parallel.
pub fn evaluate_grid(
    model: &StateModel,
    xs: &[f64],
    frames: &[FrameParams],
    method: Method,
    cfg: &QuadratureConfig,
) -> Result<Vec<TomogramPoint>> {
    let jobs: Vec<(f64, FrameParams)> =
        frames.iter().flat_map(|f| xs.iter().map(move |&x| (x, *f))).collect();
    jobs.par_iter()
        .map(|&(x, f)| {
            let w = match method {
                Method::Analytic => tomogram_analytic(model, x, f)?,
                Method::Numeric => tomogram_numeric(model, x, f, cfg)?,
                Method::Auto => tomogram(model, x, f, cfg)?,
            };
            Ok(TomogramPoint { x, mu: f.mu, nu: f.nu, w })
        })
        .collect()
}

/// CSV with header `X,mu,nu,W`.
pub fn points_to_csv(points: &[TomogramPoint]) -> String {
    let mut out = String::from("X,mu,nu,W\n");
    for p in points {
        out.push_str(&format!("{:?},{:?},{:?},{:?}\n", p.x, p.mu, p.nu, p.w));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn gauss(x: f64, mean: f64, var: f64) -> f64 {
        (-(x - mean) * (x - mean) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
    }

    #[test]
    fn ground_state_values() {
        let cfg = QuadratureConfig::default();
        let ho = StateModel::ho(0);
        let v = tomogram_numeric(&ho, 0.0, FrameParams::new(1.0, 0.0), &cfg).unwrap();
        assert!((v - 0.564_189_583_5).abs() < 1e-10);
        let v = tomogram_numeric(&ho, 1.0, FrameParams::new(1.0, 1.0), &cfg).unwrap();
        // N(0, (μ²+ν²)/2) at X = 1
        let e = gauss(1.0, 0.0, 1.0);
        assert!((v - e).abs() < 1e-8 * e);
        assert!((e - 0.241_970_724_5).abs() < 1e-10);
        let a = tomogram_analytic(&ho, 1.0, FrameParams::new(1.0, 1.0)).unwrap();
        assert!((a - e).abs() < 1e-14);
    }

    #[test]
    fn excited_state_zero_at_origin() {
        let v = tomogram_analytic(&StateModel::ho(1), 0.0, FrameParams::new(1.0, 0.0)).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn coherent_is_shifted_gaussian() {
        let cfg = QuadratureConfig::default();
        let coh = StateModel::coherent(c(1.0, 0.0));
        let v = tomogram_numeric(&coh, 2f64.sqrt(), FrameParams::new(1.0, 0.0), &cfg).unwrap();
        assert!((v - 0.564_189_583_5).abs() < 1e-10);
        let alpha = c(0.7, -1.2);
        let coh = StateModel::coherent(alpha);
        for (mu, nu) in [(1.0, 0.5), (-0.3, 2.0), (0.0, 1.0)] {
            let s: f64 = mu * mu + nu * nu;
            let mean = 2f64.sqrt() * (mu * alpha.re + nu * alpha.im);
            for x in [-2.0, 0.1, 1.5] {
                let a = tomogram_analytic(&coh, x, FrameParams::new(mu, nu)).unwrap();
                let e = gauss(x, mean, s / 2.0);
                assert!((a - e).abs() < 1e-13 * e.max(1e-3), "mu={mu} nu={nu} x={x}");
            }
        }
    }

    #[test]
    fn optical_and_squeeze_frames() {
        let ho = StateModel::ho(0);
        let a = optical_tomogram(&ho, 0.7, PI / 2.0).unwrap();
        let b = tomogram_analytic(&ho, 0.7, FrameParams::new(0.0, 1.0)).unwrap();
        assert!((a - b).abs() < 1e-15);
        for phi in [0.0, 0.4, 2.0, -1.0] {
            let v = optical_tomogram(&ho, 0.0, phi).unwrap();
            assert!((v - 0.564_189_583_5).abs() < 1e-10);
        }
        let coh = StateModel::coherent(c(1.0, 0.0));
        let w0 = optical_tomogram(&coh, 0.5, 0.0).unwrap();
        let wpi = optical_tomogram(&coh, -0.5, PI).unwrap();
        assert!((w0 - wpi).abs() < 1e-14);

        let f = frame_from_squeeze(1.0, 0.3).unwrap();
        assert!((f.mu - 0.3f64.cos()).abs() < 1e-16 && (f.nu - 0.3f64.sin()).abs() < 1e-16);
        assert_eq!(frame_from_squeeze(2.0, 0.0).unwrap(), FrameParams::new(2.0, 0.0));
        let f = frame_from_squeeze(2.0, PI / 2.0).unwrap();
        assert!(f.mu.abs() < 1e-15 && (f.nu - 0.5).abs() < 1e-16);
        assert!(frame_from_squeeze(0.0, 1.0).is_err());
        assert!(frame_from_squeeze(-1.0, 1.0).is_err());
    }

    #[test]
    fn degenerate_frame_rejected() {
        let cfg = QuadratureConfig::default();
        let ho = StateModel::ho(0);
        let f = FrameParams::new(0.0, 0.0);
        assert!(matches!(tomogram_numeric(&ho, 0.0, f, &cfg), Err(Error::DegenerateFrame { .. })));
        assert!(matches!(tomogram_analytic(&ho, 0.0, f), Err(Error::DegenerateFrame { .. })));
    }

    #[test]
    fn pho_needs_nonzero_nu() {
        let pho = StateModel::pho(0.0, 0, 1.0).unwrap();
        let f = FrameParams::new(1.0, 0.0);
        assert!(matches!(tomogram_analytic(&pho, 1.0, f), Err(Error::UnsupportedFrame(_))));
        let v = tomogram(&pho, 1.0, f, &QuadratureConfig::default()).unwrap();
        assert!((v - pho.wavefunction(1.0).norm_sqr()).abs() < 1e-15);
    }

    #[test]
    fn pho_closed_forms_match_quadrature() {
        let cfg = QuadratureConfig::default();
        let frames = [(1.0, 1.0), (0.5, -1.0), (-2.0, 0.5), (0.0, 1.0), (1.0, 2.0)];
        for &(a, n, xw) in &[(0.0, 0usize, 1.0), (0.0, 2, 1.0), (0.0, 1, 0.7), (10.0, 0, 1.0), (10.0, 1, 1.0), (1000.0, 3, 1.0), (2.5, 2, 1.4)] {
            let m = StateModel::pho(a, n, xw).unwrap();
            for &(mu, nu) in &frames {
                for x in [-3.0, -0.5, 0.0, 1.0, 2.5, 6.0] {
                    let f = FrameParams::new(mu, nu);
                    let an = tomogram_analytic(&m, x, f).unwrap();
                    let nm = tomogram_numeric(&m, x, f, &cfg).unwrap();
                    assert!(
                        (an - nm).abs() <= 1e-6 * nm.abs().max(1e-4),
                        "a={a} n={n} xw={xw} mu={mu} nu={nu} x={x}: {an} vs {nm}"
                    );
                }
            }
        }
    }

    #[test]
    fn pho_zero_a_two_forms_agree() {
        // a = 0 via the Hermite double sum and via the general Laguerre sum at b = ½
        let opts = AnalyticOptions::default();
        for n in 0..4 {
            for &(mu, nu) in &[(1.0, 1.0), (-0.4, 0.8), (2.0, -0.6)] {
                for x in [-1.0, 0.3, 2.2] {
                    let f = FrameParams::new(mu, nu);
                    let h = pho_half_oscillator(n, 1.2, x, f, PhoForm::Corrected).unwrap();
                    let g = pho_general(0.0, n, 1.2, x, f, &opts).unwrap();
                    assert!((h - g).abs() < 1e-11 * g.max(1e-6), "n={n} x={x}: {h} {g}");
                }
            }
        }
    }

    #[test]
    fn printed_pho_forms_disagree_with_quadrature() {
        let cfg = QuadratureConfig::default();
        let lit = AnalyticOptions { pho_form: PhoForm::PaperLiteral, ..Default::default() };
        let f = FrameParams::new(1.0, 1.0);
        // a = 0, n = 1: the m = 1 term is weighted by x_ω²/16ν instead of 1/4ν
        let m = StateModel::pho(0.0, 1, 1.0).unwrap();
        let printed = tomogram_analytic_with(&m, 1.0, f, &lit).unwrap();
        let truth = tomogram_numeric(&m, 1.0, f, &cfg).unwrap();
        assert!((printed - truth).abs() > 1e-3 * truth);
        // general a: the nonterminating (n)_k series does not settle
        let m = StateModel::pho(10.0, 1, 1.0).unwrap();
        assert!(tomogram_analytic_with(&m, 1.0, f, &lit).is_err());
        let m = StateModel::pho(10.0, 0, 1.0).unwrap();
        assert!(matches!(tomogram_analytic_with(&m, 1.0, f, &lit), Err(Error::Domain(_))));
    }

    #[test]
    fn cat_diagonal_term_is_coherent() {
        let alpha = c(1.3, 0.4);
        let coh = StateModel::coherent(alpha);
        for &(mu, nu) in &[(1.0, 0.0), (0.3, 0.9), (-1.0, 2.0)] {
            for x in [-1.0, 0.0, 2.0] {
                let f = FrameParams::new(mu, nu);
                let t = cat_term(alpha, 0, 0, x, f);
                let w = tomogram_analytic(&coh, x, f).unwrap();
                assert!((t.re - w).abs() < 1e-15 && t.im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn cat_closed_form_matches_quadrature() {
        let cfg = QuadratureConfig::default();
        for alpha in [c(2.0, 0.0), c(0.5, 1.0)] {
            let m = StateModel::crystallized_cat(alpha).unwrap();
            for &(mu, nu) in &[(1.0, 0.5), (0.0, 1.0), (-1.5, -0.7)] {
                for x in [-2.0, 0.0, 1.0, 3.0] {
                    let f = FrameParams::new(mu, nu);
                    let a = tomogram_analytic(&m, x, f).unwrap();
                    let q = tomogram_numeric(&m, x, f, &cfg).unwrap();
                    assert!((a - q).abs() < 1e-8 * q.max(1e-3), "alpha={alpha} x={x}: {a} {q}");
                }
            }
        }
    }

    #[test]
    fn homogeneity() {
        // W(X|λμ, λν) = W(X/λ|μ, ν)/λ
        let cfg = QuadratureConfig::default();
        for m in [StateModel::ho(2), StateModel::coherent(c(0.5, -1.0))] {
            for lam in [0.5, 2.0, 3.0] {
                let f = FrameParams::new(0.8, 0.6);
                let g = FrameParams::new(0.8 * lam, 0.6 * lam);
                for x in [-1.0, 0.4, 2.0] {
                    let l = tomogram_numeric(&m, x, g, &cfg).unwrap();
                    let r = tomogram_numeric(&m, x / lam, f, &cfg).unwrap() / lam;
                    assert!((l - r).abs() < 1e-10, "{m} lam={lam} x={x}");
                }
            }
        }
    }

    #[test]
    fn grid_and_csv() {
        let xs = [-1.0, 0.0, 1.0];
        let frames = [FrameParams::new(1.0, 0.0), FrameParams::new(0.0, 1.0)];
        let pts = evaluate_grid(&StateModel::ho(0), &xs, &frames, Method::Auto, &QuadratureConfig::default()).unwrap();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[4].x, 0.0);
        assert_eq!(pts[4].nu, 1.0);
        let csv = points_to_csv(&pts);
        assert!(csv.starts_with("X,mu,nu,W\n"));
        assert_eq!(csv.lines().count(), 7);
        let json = serde_json::to_string(&pts[0]).unwrap();
        assert!(json.contains("\"X\"") && json.contains("\"W\""));
    }

    #[test]
    fn config_checks() {
        let bad = QuadratureConfig { nodes: 10, ..Default::default() };
        assert!(tomogram_numeric(&StateModel::ho(0), 0.0, FrameParams::new(1.0, 1.0), &bad).is_err());
    }
}
