//! Characteristic functions φ(t; μ, ν) = ∫ W(X|μ,ν) e^{itX} dX.
//!
//! Providers come in several flavours: closed forms for the catalog states,
//! the Weyl overlap ∫ψ*(y − ν/2)ψ(y + ν/2)e^{iμy}dy (any catalog state,
//! including PHO), quadrature over an arbitrary frame-dependent pdf,
//! exponential-family specifications, convex mixtures and empirical
//! estimates from samples.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{EmpiricalCharFn, EmpiricalFamily};
use crate::quadrature::{composite_nodes, integrate_adaptive, AdaptiveConfig, Range};
use crate::special::laguerre;
use crate::state::{cat_amplitudes, split_descriptor, Params, StateModel};
use crate::tomogram::{tomogram, FrameParams, QuadratureConfig};

type C = Complex64;

/// A family of pdfs W(X|μ,ν) indexed by the frame.
pub trait FramePdf: Send + Sync {
    fn density(&self, x: f64, frame: FrameParams) -> Result<f64>;
    /// Integration range at this frame.
    fn range(&self, frame: FrameParams) -> Range;
    fn label(&self) -> String;
}

/// The tomogram of a catalog state as a pdf family.
#[derive(Debug, Clone)]
pub struct TomogramPdf {
    pub model: StateModel,
    pub cfg: QuadratureConfig,
}

impl TomogramPdf {
    pub fn new(model: StateModel) -> Self {
        Self { model, cfg: QuadratureConfig::default() }
    }
}

/// Rough location of the tomogram: μ⟨x⟩ + ν⟨p⟩ for the states that have one.
pub fn tomogram_center(model: &StateModel, frame: FrameParams) -> f64 {
    match *model {
        StateModel::Coherent { alpha } => 2f64.sqrt() * (frame.mu * alpha.re + frame.nu * alpha.im),
        _ => frame.mu * model.center(),
    }
}

impl FramePdf for TomogramPdf {
    fn density(&self, x: f64, frame: FrameParams) -> Result<f64> {
        tomogram(&self.model, x, frame, &self.cfg)
    }

    fn range(&self, frame: FrameParams) -> Range {
        let scale = frame.s().sqrt() * self.model.scale();
        Range::Whole { center: tomogram_center(&self.model, frame), scale: scale.max(1e-3) }
    }

    fn label(&self) -> String {
        format!("tomogram({})", self.model)
    }
}

/// A frame-independent pdf tabulated at nodes and interpolated linearly; zero outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedPdf {
    pub xs: Vec<f64>,
    pub ws: Vec<f64>,
}

impl TabulatedPdf {
    pub fn new(xs: Vec<f64>, ws: Vec<f64>) -> Result<Self> {
        if xs.len() != ws.len() || xs.len() < 2 {
            return Err(Error::InvalidParameter("tabulated pdf needs >= 2 matching (X, W) rows".into()));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("tabulated X must be strictly increasing".into()));
        }
        if ws.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidParameter("tabulated W must be finite and nonnegative".into()));
        }
        Ok(Self { xs, ws })
    }

    /// Parse CSV with header `X,W` (extra columns ignored, `#` lines skipped).
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty CSV".into()))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        let ix = cols.iter().position(|c| *c == "X").ok_or_else(|| Error::Parse("CSV lacks column X".into()))?;
        let iw = cols.iter().position(|c| *c == "W").ok_or_else(|| Error::Parse("CSV lacks column W".into()))?;
        let mut xs = Vec::new();
        let mut ws = Vec::new();
        for (i, line) in lines.enumerate() {
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            let get = |k: usize| -> Result<f64> {
                f.get(k)
                    .ok_or_else(|| Error::Parse(format!("row {} is short", i + 2)))?
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("row {}: bad number", i + 2)))
            };
            xs.push(get(ix)?);
            ws.push(get(iw)?);
        }
        Self::new(xs, ws)
    }

    pub fn value(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x < self.xs[0] || x > self.xs[n - 1] {
            return 0.0;
        }
        let i = self.xs.partition_point(|&v| v <= x).clamp(1, n - 1);
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let (w0, w1) = (self.ws[i - 1], self.ws[i]);
        w0 + (w1 - w0) * (x - x0) / (x1 - x0)
    }

    /// Trapezoid mass of the table.
    pub fn mass(&self) -> f64 {
        crate::quadrature::trapezoid(&self.xs, &self.ws)
    }

    /// ∫ W(X) e^{itX} dX for the piecewise-linear interpolant, exactly.
    pub fn fourier(&self, t: f64) -> C {
        let mut acc = C::new(0.0, 0.0);
        for i in 1..self.xs.len() {
            let (a, b) = (self.xs[i - 1], self.xs[i]);
            let (fa, fb) = (self.ws[i - 1], self.ws[i]);
            let h = b - a;
            let th = t * h;
            if th.abs() < 1e-4 {
                // series for small t h: ∫ (fa + (fb−fa)u/h) e^{it(a+u)} du
                let e = C::from_polar(1.0, t * a);
                let i_t = C::new(0.0, t);
                let m0 = h + i_t * h * h / 2.0 + i_t * i_t * h.powi(3) / 6.0;
                let m1 = h * h / 2.0 + i_t * h.powi(3) / 3.0 + i_t * i_t * h.powi(4) / 8.0;
                acc += e * (m0 * fa + m1 * ((fb - fa) / h));
            } else {
                let ea = C::from_polar(1.0, t * a);
                let eb = C::from_polar(1.0, t * b);
                let it = C::new(0.0, t);
                // ∫ f e^{itx} = [f e^{itx}/(it)] − f'·[e^{itx}/(it)²]
                let slope = (fb - fa) / h;
                acc += (eb * fb - ea * fa) / it - (eb - ea) * slope / (it * it);
            }
        }
        acc
    }
}

impl FramePdf for TabulatedPdf {
    fn density(&self, x: f64, _frame: FrameParams) -> Result<f64> {
        Ok(self.value(x))
    }

    fn range(&self, _frame: FrameParams) -> Range {
        Range::Finite(self.xs[0], self.xs[self.xs.len() - 1])
    }

    fn label(&self) -> String {
        format!("tabulated({} nodes)", self.xs.len())
    }
}

/// ∫ W(X|μ,ν) e^{itX} dX by adaptive quadrature.
pub fn charfn_numeric(pdf: &dyn FramePdf, t: f64, frame: FrameParams, cfg: &AdaptiveConfig) -> Result<C> {
    let mut err = None;
    let cell = Mutex::new(&mut err);
    let v = integrate_adaptive(
        |x| match pdf.density(x, frame) {
            Ok(w) => C::from_polar(w, t * x),
            Err(e) => {
                let mut g = cell.lock().unwrap_or_else(|p| p.into_inner());
                if g.is_none() {
                    **g = Some(e);
                }
                C::new(0.0, 0.0)
            }
        },
        pdf.range(frame),
        cfg,
    )?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(v)
}

/// Closed-form φ(±1; μ, ν) for HO, coherent and cat states. t = −1 is evaluated
/// as φ(1; −μ, −ν), which equals the conjugate for a real pdf.
pub fn charfn_analytic(model: &StateModel, t: f64, frame: FrameParams) -> Result<C> {
    let sign = if t == 1.0 {
        1.0
    } else if t == -1.0 {
        -1.0
    } else {
        return Err(Error::InvalidParameter(format!("closed forms are for t = ±1, got {t}")));
    };
    let mu = sign * frame.mu;
    let nu = sign * frame.nu;
    let s = mu * mu + nu * nu;
    let g = (-s / 4.0).exp();
    match *model {
        StateModel::Ho { n } => Ok(C::new(g * laguerre(n, s / 2.0), 0.0)),
        StateModel::Coherent { alpha } => {
            Ok(C::from_polar(g, 2f64.sqrt() * (mu * alpha.re + nu * alpha.im)))
        }
        StateModel::CrystallizedCat { alpha, norm } => {
            let amps = cat_amplitudes(alpha);
            let w = C::new(nu, mu); // ν + iμ
            let r2 = 2f64.sqrt();
            let mut acc = C::new(0.0, 0.0);
            for aj in amps {
                for ak in amps {
                    // ⟨α_k|D|α_j⟩ e^{s/4} = exp(ᾱ_kα_j − |α|² + [(ν+iμ)α_j − (ν−iμ)ᾱ_k]/√2)
                    let e = ak.conj() * aj - alpha.norm_sqr() + (w * aj - w.conj() * ak.conj()) / r2;
                    acc += e.exp();
                }
            }
            Ok(acc * (g * norm * norm))
        }
        StateModel::Pho { .. } => Err(Error::UnsupportedModel(
            "no closed-form characteristic function for PHO; use the overlap or numeric provider".into(),
        )),
    }
}

/// φ(t; μ, ν) = ∫ ψ*(y − tν/2) ψ(y + tν/2) e^{itμy} dy for any catalog state.
pub fn charfn_state_overlap(model: &StateModel, t: f64, frame: FrameParams) -> Result<C> {
    let mu = t * frame.mu;
    let (ys, cs) = overlap_nodes(model, t * frame.nu, mu.abs());
    Ok(ys.iter().zip(&cs).map(|(&y, &c)| c * C::from_polar(1.0, mu * y)).sum())
}

/// φ(t; μ_i, ν) for many μ at one ν. The wavefunction product is tabulated once;
/// for uniformly spaced μ the phases follow a recurrence.
pub fn charfn_state_overlap_row(model: &StateModel, t: f64, mus: &[f64], nu: f64) -> Vec<C> {
    if mus.is_empty() {
        return Vec::new();
    }
    let mmax = mus.iter().fold(0.0f64, |m, v| m.max(v.abs())) * t.abs();
    let (ys, cs) = overlap_nodes(model, t * nu, mmax);
    let uniform = mus.len() > 2 && {
        let h = mus[1] - mus[0];
        mus.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-12 * h.abs().max(1.0))
    };
    if !uniform {
        return mus
            .iter()
            .map(|&m| ys.iter().zip(&cs).map(|(&y, &c)| c * C::from_polar(1.0, t * m * y)).sum())
            .collect();
    }
    let h = t * (mus[1] - mus[0]);
    let mut ph: Vec<C> = ys.iter().zip(&cs).map(|(&y, &c)| c * C::from_polar(1.0, t * mus[0] * y)).collect();
    let step: Vec<C> = ys.iter().map(|&y| C::from_polar(1.0, h * y)).collect();
    let mut out = Vec::with_capacity(mus.len());
    for i in 0..mus.len() {
        if i > 0 {
            if i % 64 == 0 {
                // restart from exact phases to stop drift
                for ((p, &y), &c) in ph.iter_mut().zip(&ys).zip(&cs) {
                    *p = c * C::from_polar(1.0, t * mus[i] * y);
                }
            } else {
                for (p, s) in ph.iter_mut().zip(&step) {
                    *p *= s;
                }
            }
        }
        out.push(ph.iter().sum());
    }
    out
}

/// Quadrature nodes y_k and coefficients w_k ψ*(y_k − ν/2)ψ(y_k + ν/2), resolving
/// phases e^{iμy} up to |μ| = `mu_max`.
fn overlap_nodes(model: &StateModel, nu: f64, mu_max: f64) -> (Vec<f64>, Vec<C>) {
    let (slo, shi) = model.support();
    let half = 0.5 * nu.abs();
    let lo = slo + half;
    let hi = shi - half;
    if !(hi > lo) {
        return (Vec::new(), Vec::new());
    }
    let k = mu_max + 2.0 * (model.scale() + 2.0);
    let panels = (((hi - lo) * k / 3.0).ceil() as usize).max(24);
    let mut ys = Vec::new();
    let mut ws = Vec::new();
    let mut start = lo;
    if matches!(model, StateModel::Pho { .. }) {
        // the PHO wavefunctions behave like x^{b+1/2} at the wall; grade the first panel
        let rule = crate::quadrature::GaussLegendre::gl16();
        let h = (hi - lo) / panels as f64;
        let mut right = lo + h;
        let mut push = |a: f64, b: f64| {
            let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                ys.push(m + r * x);
                ws.push(r * w);
            }
        };
        for _ in 0..12 {
            let mid = lo + (right - lo) / 4.0;
            push(mid, right);
            right = mid;
        }
        push(lo, right);
        start = lo + h;
    }
    let (y2, w2) = composite_nodes(start, hi, panels);
    ys.extend(y2);
    ws.extend(w2);
    let cs = ys
        .iter()
        .zip(&ws)
        .map(|(&y, &w)| model.wavefunction(y - nu / 2.0).conj() * model.wavefunction(y + nu / 2.0) * w)
        .collect();
    (ys, cs)
}

/// p^α / (p − i)^α on the principal branch.
pub fn power_exponential_charfn(alpha: f64, p: f64) -> C {
    let z = C::new(p, 0.0) / C::new(p, -1.0);
    z.powf(alpha)
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type EtaFn = Arc<dyn Fn(f64, f64) -> Vec<f64> + Send + Sync>;

/// Frame at which an exponential-family normalizer diverged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameMarker {
    pub mu: f64,
    pub nu: f64,
    /// `true` when the value was replaced by the limit from neighbouring frames.
    pub regularized: bool,
}

/// Exponential-family pdf h(X) exp(η(μ,ν)·τ(X) − A(η)).
pub struct ExpFamilySpec {
    pub name: String,
    h: RealFn,
    tau: Vec<RealFn>,
    eta_map: EtaFn,
    pub support: (f64, f64),
    hint: Option<Arc<dyn Fn(&[f64]) -> (f64, f64) + Send + Sync>>,
    pub cfg: AdaptiveConfig,
    memo: RwLock<HashMap<Vec<u64>, f64>>,
    /// φ(t; η) keyed by (t, η); many frames share an η.
    cf_memo: RwLock<HashMap<Vec<u64>, C>>,
    markers: Mutex<Vec<FrameMarker>>,
}

impl fmt::Debug for ExpFamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExpFamilySpec").field("name", &self.name).field("support", &self.support).finish()
    }
}

impl ExpFamilySpec {
    pub fn new(
        name: impl Into<String>,
        h: impl Fn(f64) -> f64 + Send + Sync + 'static,
        tau: Vec<RealFn>,
        eta_map: impl Fn(f64, f64) -> Vec<f64> + Send + Sync + 'static,
        support: (f64, f64),
    ) -> Self {
        Self {
            name: name.into(),
            h: Arc::new(h),
            tau,
            eta_map: Arc::new(eta_map),
            support,
            hint: None,
            cfg: AdaptiveConfig { abs_tol: 1e-14, rel_tol: 1e-12, max_intervals: 50_000, initial_pieces: 16 },
            memo: RwLock::new(HashMap::new()),
            cf_memo: RwLock::new(HashMap::new()),
            markers: Mutex::new(Vec::new()),
        }
    }

    /// Centre/scale hint for whole-line supports, as a function of η.
    pub fn with_hint(mut self, hint: impl Fn(&[f64]) -> (f64, f64) + Send + Sync + 'static) -> Self {
        self.hint = Some(Arc::new(hint));
        self
    }

    pub fn eta(&self, frame: FrameParams) -> Vec<f64> {
        (self.eta_map)(frame.mu, frame.nu)
    }

    fn range(&self, eta: &[f64]) -> Range {
        let (lo, hi) = self.support;
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => Range::Finite(lo, hi),
            (true, false) => Range::UpperInfinite(lo),
            (false, true) => Range::UpperInfinite(-hi), // mirrored by the caller
            (false, false) => {
                let (c, s) = self.hint.as_ref().map(|h| h(eta)).unwrap_or((0.0, 1.0));
                Range::Whole { center: c, scale: s }
            }
        }
    }

    fn exponent(&self, eta: &[f64], x: f64) -> f64 {
        eta.iter().zip(&self.tau).map(|(e, t)| e * t(x)).sum()
    }

    fn integrate(&self, eta: &[f64], t: f64) -> Result<C> {
        let mirrored = !self.support.0.is_finite() && self.support.1.is_finite();
        let f = |x: f64| {
            let x = if mirrored { -x } else { x };
            let h = (self.h)(x);
            if h == 0.0 {
                return C::new(0.0, 0.0);
            }
            C::from_polar(h * self.exponent(eta, x).exp(), t * x)
        };
        integrate_adaptive(f, self.range(eta), &self.cfg)
    }

    /// Divergence screen: the integrand must decay towards every infinite end.
    fn check_decay(&self, eta: &[f64]) -> Result<()> {
        let div = || Error::DivergentNormalizer { eta: eta.to_vec() };
        if eta.iter().any(|e| !e.is_finite()) {
            return Err(div());
        }
        let (lo, hi) = self.support;
        let base = if lo.is_finite() { lo } else if hi.is_finite() { hi } else { 0.0 };
        let mut ends = Vec::new();
        if !hi.is_finite() {
            ends.push(1.0);
        }
        if !lo.is_finite() {
            ends.push(-1.0);
        }
        for dir in ends {
            let g = |d: f64| {
                let x = base + dir * d;
                ((self.h)(x).abs().ln() + self.exponent(eta, x), x)
            };
            let (l3, _) = g(1e3);
            let (l5, _) = g(1e5);
            if !(l5 < l3 - 20.0) && !(l5 == f64::NEG_INFINITY) {
                return Err(div());
            }
        }
        Ok(())
    }

    /// A(η) = log ∫ h e^{η·τ}, memoized per η.
    pub fn log_normalizer(&self, eta: &[f64]) -> Result<f64> {
        let key: Vec<u64> = eta.iter().map(|e| e.to_bits()).collect();
        if let Some(v) = self.memo.read().unwrap_or_else(|p| p.into_inner()).get(&key) {
            return Ok(*v);
        }
        self.check_decay(eta)?;
        let z = self
            .integrate(eta, 0.0)
            .map_err(|_| Error::DivergentNormalizer { eta: eta.to_vec() })?
            .re;
        if !(z > 0.0) || !z.is_finite() {
            return Err(Error::DivergentNormalizer { eta: eta.to_vec() });
        }
        let a = z.ln();
        self.memo.write().unwrap_or_else(|p| p.into_inner()).insert(key, a);
        Ok(a)
    }

    /// Number of cached normalizers.
    pub fn memo_len(&self) -> usize {
        self.memo.read().unwrap_or_else(|p| p.into_inner()).len()
    }

    /// Density at X for the given frame.
    pub fn density(&self, x: f64, frame: FrameParams) -> Result<f64> {
        let eta = self.eta(frame);
        let a = self.log_normalizer(&eta)?;
        let (lo, hi) = self.support;
        if x < lo || x > hi {
            return Ok(0.0);
        }
        Ok((self.h)(x) * (self.exponent(&eta, x) - a).exp())
    }

    /// Markers recorded by the provider layer since the last call.
    pub fn take_markers(&self) -> Vec<FrameMarker> {
        std::mem::take(&mut *self.markers.lock().unwrap_or_else(|p| p.into_inner()))
    }

    fn push_marker(&self, m: FrameMarker) {
        self.markers.lock().unwrap_or_else(|p| p.into_inner()).push(m);
    }

    /// Built-in families: `exponential:lambda=`, `gamma:k=,theta=`, `chisq:k=`,
    /// `powerlaw:alpha=,p=`, `gauss-eta:p1=,p2=`.
    pub fn builtin(desc: &str) -> Result<Self> {
        let (kind, pairs) = split_descriptor(desc)?;
        let x_tau: Vec<RealFn> = vec![Arc::new(|x| x)];
        let positive = (0.0, f64::INFINITY);
        let check_pos = |name: &str, v: f64| -> Result<f64> {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
            }
        };
        let power = |k: f64, rate: f64, name: String| {
            ExpFamilySpec::new(
                name,
                move |x: f64| if x > 0.0 { x.powf(k - 1.0) } else { 0.0 },
                vec![Arc::new(|x| x) as RealFn],
                move |_, _| vec![-rate],
                (0.0, f64::INFINITY),
            )
        };
        match kind.as_str() {
            "exponential" => {
                let p = Params::new(&kind, pairs, &["lambda"])?;
                let l = check_pos("lambda", p.f64_or("lambda", Some(1.0))?)?;
                Ok(ExpFamilySpec::new(format!("exponential:lambda={l}"), |_| 1.0, x_tau, move |_, _| vec![-l], positive))
            }
            "gamma" => {
                let p = Params::new(&kind, pairs, &["k", "theta"])?;
                let k = check_pos("k", p.f64_or("k", None)?)?;
                let th = check_pos("theta", p.f64_or("theta", Some(1.0))?)?;
                Ok(power(k, 1.0 / th, format!("gamma:k={k},theta={th}")))
            }
            "chisq" => {
                let p = Params::new(&kind, pairs, &["k"])?;
                let k = check_pos("k", p.f64_or("k", None)?)?;
                Ok(power(k / 2.0, 0.5, format!("chisq:k={k}")))
            }
            "powerlaw" => {
                let p = Params::new(&kind, pairs, &["alpha", "p"])?;
                let a = check_pos("alpha", p.f64_or("alpha", None)?)?;
                let pp = p.f64_or("p", Some(1.0))?;
                if !(pp >= 0.0) {
                    return Err(Error::InvalidParameter(format!("p must be >= 0, got {pp}")));
                }
                Ok(power(a, pp, format!("powerlaw:alpha={a},p={pp}")))
            }
            "gauss-eta" => {
                let p = Params::new(&kind, pairs, &["p1", "p2"])?;
                let p1 = p.f64_or("p1", Some(0.0))?;
                let p2 = check_pos("p2", p.f64_or("p2", Some(1.0))?)?;
                let tau: Vec<RealFn> = vec![Arc::new(|x| x), Arc::new(|x| x * x)];
                Ok(ExpFamilySpec::new(
                    format!("gauss-eta:p1={p1},p2={p2}"),
                    |_| 1.0,
                    tau,
                    move |mu, nu| {
                        let s = mu * mu + nu * nu;
                        vec![p1, if s > 0.0 { -p2 / s } else { f64::NEG_INFINITY }]
                    },
                    (f64::NEG_INFINITY, f64::INFINITY),
                )
                .with_hint(|eta| {
                    if eta.len() == 2 && eta[1] < 0.0 && eta[1].is_finite() {
                        (-eta[0] / (2.0 * eta[1]), (-0.5 / eta[1]).sqrt().max(1e-6))
                    } else {
                        (0.0, 1.0)
                    }
                }))
            }
            other => Err(Error::Parse(format!("unknown exponential-family name '{other}'"))),
        }
    }
}

/// φ(t; η(μ,ν)) = e^{−A(η)} ∫ h e^{itX + η·τ} dX.
pub fn charfn_expfamily(spec: &ExpFamilySpec, t: f64, frame: FrameParams) -> Result<C> {
    let eta = spec.eta(frame);
    let a = spec.log_normalizer(&eta)?;
    if t == 0.0 {
        return Ok(C::new(1.0, 0.0));
    }
    let key: Vec<u64> = std::iter::once(t.to_bits()).chain(eta.iter().map(|e| e.to_bits())).collect();
    if let Some(v) = spec.cf_memo.read().unwrap_or_else(|p| p.into_inner()).get(&key) {
        return Ok(*v);
    }
    let v = spec.integrate(&eta, t)? * (-a).exp();
    spec.cf_memo.write().unwrap_or_else(|p| p.into_inner()).insert(key, v);
    Ok(v)
}

/// Any source of φ(t; μ, ν).
#[derive(Clone)]
pub enum CharFnProvider {
    /// Closed forms (HO, coherent, cat).
    Analytic(StateModel),
    /// Weyl overlap of the wavefunction; any catalog state.
    StateOverlap(StateModel),
    /// Quadrature over a pdf family.
    Numeric { pdf: Arc<dyn FramePdf>, cfg: AdaptiveConfig },
    ExpFamily(Arc<ExpFamilySpec>),
    /// Convex combination; weights are nonnegative and sum to one.
    Mixture(Vec<(f64, CharFnProvider)>),
    /// Sample mean at the sample set's own frame only.
    Empirical(Arc<EmpiricalCharFn>),
    /// Sample means over a set of homodyne angles.
    EmpiricalFamily(Arc<EmpiricalFamily>),
    /// Arbitrary function, e.g. deliberately corrupted providers.
    Custom { label: String, f: Arc<dyn Fn(f64, f64, f64) -> Result<C> + Send + Sync>, empirical: bool },
}

impl fmt::Debug for CharFnProvider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl CharFnProvider {
    /// Closed form where available, otherwise the wavefunction overlap.
    pub fn catalog(model: StateModel) -> Self {
        match model {
            StateModel::Pho { .. } => CharFnProvider::StateOverlap(model),
            m => CharFnProvider::Analytic(m),
        }
    }

    pub fn mixture(items: Vec<(f64, CharFnProvider)>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::InvalidParameter("empty mixture".into()));
        }
        if items.iter().any(|(w, _)| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParameter("mixture weights must be nonnegative".into()));
        }
        let total: f64 = items.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("mixture weights sum to {total}, not 1")));
        }
        Ok(CharFnProvider::Mixture(items))
    }

    pub fn custom(
        label: impl Into<String>,
        f: impl Fn(f64, f64, f64) -> Result<C> + Send + Sync + 'static,
    ) -> Self {
        CharFnProvider::Custom { label: label.into(), f: Arc::new(f), empirical: false }
    }

    pub fn eval(&self, t: f64, mu: f64, nu: f64) -> Result<C> {
        let frame = FrameParams { mu, nu };
        match self {
            CharFnProvider::Analytic(m) => charfn_analytic(m, t, frame),
            CharFnProvider::StateOverlap(m) => charfn_state_overlap(m, t, frame),
            CharFnProvider::Numeric { pdf, cfg } => charfn_numeric(pdf.as_ref(), t, frame, cfg),
            CharFnProvider::ExpFamily(spec) => eval_expfamily_regularized(spec, t, frame),
            CharFnProvider::Mixture(items) => {
                let mut acc = C::new(0.0, 0.0);
                for (w, p) in items {
                    acc += p.eval(t, mu, nu)? * *w;
                }
                Ok(acc)
            }
            CharFnProvider::Empirical(e) => e.eval(t, frame),
            CharFnProvider::EmpiricalFamily(e) => e.eval(t, frame),
            CharFnProvider::Custom { f, .. } => f(t, mu, nu),
        }
    }

    /// φ(t; μ_i, ν_j) for all pairs, row-major in μ.
    pub fn eval_grid(&self, t: f64, mus: &[f64], nus: &[f64]) -> Result<Vec<C>> {
        use rayon::prelude::*;
        match self {
            CharFnProvider::StateOverlap(m) => {
                let cols: Vec<Vec<C>> = nus.par_iter().map(|&n| charfn_state_overlap_row(m, t, mus, n)).collect();
                Ok((0..mus.len() * nus.len()).map(|k| cols[k % nus.len()][k / nus.len()]).collect())
            }
            CharFnProvider::Mixture(items) => {
                let mut acc = vec![C::new(0.0, 0.0); mus.len() * nus.len()];
                for (w, p) in items {
                    for (a, v) in acc.iter_mut().zip(p.eval_grid(t, mus, nus)?) {
                        *a += v * *w;
                    }
                }
                Ok(acc)
            }
            _ => {
                let jobs: Vec<(f64, f64)> = mus.iter().flat_map(|&m| nus.iter().map(move |&n| (m, n))).collect();
                jobs.par_iter().map(|&(m, n)| self.eval(t, m, n)).collect()
            }
        }
    }

    /// Whether the looser Monte Carlo tolerance class applies.
    pub fn is_empirical(&self) -> bool {
        match self {
            CharFnProvider::Empirical(_) | CharFnProvider::EmpiricalFamily(_) => true,
            CharFnProvider::Custom { empirical, .. } => *empirical,
            CharFnProvider::Mixture(items) => items.iter().any(|(_, p)| p.is_empirical()),
            _ => false,
        }
    }

    pub fn label(&self) -> String {
        match self {
            CharFnProvider::Analytic(m) => format!("analytic({m})"),
            CharFnProvider::StateOverlap(m) => format!("overlap({m})"),
            CharFnProvider::Numeric { pdf, .. } => format!("numeric({})", pdf.label()),
            CharFnProvider::ExpFamily(s) => format!("expfamily({})", s.name),
            CharFnProvider::Mixture(items) => {
                let parts: Vec<String> = items.iter().map(|(w, p)| format!("{w}@{}", p.label())).collect();
                format!("mix({})", parts.join(" + "))
            }
            CharFnProvider::Empirical(e) => format!("empirical({} samples)", e.len()),
            CharFnProvider::EmpiricalFamily(e) => format!("empirical-family({} angles)", e.angles()),
            CharFnProvider::Custom { label, .. } => label.clone(),
        }
    }

    /// Frames where an exponential-family normalizer diverged.
    pub fn take_markers(&self) -> Vec<FrameMarker> {
        match self {
            CharFnProvider::ExpFamily(s) => s.take_markers(),
            CharFnProvider::Mixture(items) => items.iter().flat_map(|(_, p)| p.take_markers()).collect(),
            _ => Vec::new(),
        }
    }

    /// Parse a provider descriptor: a state descriptor, an exponential-family
    /// name, or `mix:w@desc|w@desc|...`.
    pub fn parse(desc: &str) -> Result<Self> {
        let desc = desc.trim();
        if let Some(rest) = desc.strip_prefix("mix:") {
            let mut items = Vec::new();
            for part in rest.split('|') {
                let (w, d) = part
                    .split_once('@')
                    .ok_or_else(|| Error::Parse(format!("mixture item '{part}' lacks 'weight@'")))?;
                let w: f64 = w.trim().parse().map_err(|_| Error::Parse(format!("bad weight '{w}'")))?;
                items.push((w, CharFnProvider::parse(d)?));
            }
            return CharFnProvider::mixture(items);
        }
        let kind = desc.split(':').next().unwrap_or("").trim().to_ascii_lowercase();
        match kind.as_str() {
            "ho" | "pho" | "coh" | "ccat" => Ok(CharFnProvider::catalog(desc.parse()?)),
            _ => Ok(CharFnProvider::ExpFamily(Arc::new(ExpFamilySpec::builtin(desc)?))),
        }
    }
}

/// At a frame where A(η) diverges, fall back to the limit from the four
/// neighbouring frames if they agree; the frame is recorded either way.
fn eval_expfamily_regularized(spec: &ExpFamilySpec, t: f64, frame: FrameParams) -> Result<C> {
    match charfn_expfamily(spec, t, frame) {
        Err(Error::DivergentNormalizer { eta }) => {
            let eps = 1e-4 * (1.0 + frame.mu.abs() + frame.nu.abs());
            let nbrs = [(eps, 0.0), (-eps, 0.0), (0.0, eps), (0.0, -eps)];
            let vals: Result<Vec<C>> = nbrs
                .iter()
                .map(|(dm, dn)| charfn_expfamily(spec, t, FrameParams::new(frame.mu + dm, frame.nu + dn)))
                .collect();
            if let Ok(v) = vals {
                let mean = v.iter().sum::<C>() / 4.0;
                if v.iter().all(|z| (z - mean).norm() < 1e-3) {
                    spec.push_marker(FrameMarker { mu: frame.mu, nu: frame.nu, regularized: true });
                    return Ok(mean);
                }
            }
            spec.push_marker(FrameMarker { mu: frame.mu, nu: frame.nu, regularized: false });
            Err(Error::DivergentNormalizer { eta })
        }
        other => other,
    }
}
