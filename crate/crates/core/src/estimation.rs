//! Sampling from tomograms, density estimation and empirical characteristic
//! functions.
//!
//! Random numbers come from ChaCha20 (RFC 8439 block function, as implemented
//! by `rand_chacha`) seeded with `seed_from_u64`; uniforms are the top 53 bits
//! of `next_u64` scaled by 2⁻⁵³.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand_chacha::ChaCha20Rng;
use rand_core::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::StateModel;
use crate::tomogram::{tomogram, FrameParams, QuadratureConfig};

type C = Complex64;

/// Nodes of the tabulated CDF used for inverse-transform sampling.
pub const CDF_NODES: usize = 4096;

/// Draws of X at one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub values: Vec<f64>,
    pub frame: FrameParams,
    /// Descriptor of the sampled state, if known.
    pub model: Option<String>,
    pub seed: u64,
}

/// JSON sidecar stored next to the CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMeta {
    pub frame: FrameParams,
    pub model: Option<String>,
    pub seed: u64,
    pub n: usize,
}

impl SampleSet {
    pub fn new(values: Vec<f64>, frame: FrameParams, model: Option<String>, seed: u64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("empty sample set".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("samples must be finite".into()));
        }
        Ok(Self { values, frame, model, seed })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        let n = self.len() as f64;
        if n < 2.0 {
            return 0.0;
        }
        let m = self.mean();
        self.values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.len() * 24 + 2);
        s.push_str("X\n");
        for v in &self.values {
            s.push_str(&format!("{v:?}\n"));
        }
        s
    }

    pub fn meta(&self) -> SampleMeta {
        SampleMeta { frame: self.frame, model: self.model.clone(), seed: self.seed, n: self.len() }
    }

    pub fn sidecar_json(&self) -> String {
        serde_json::to_string_pretty(&self.meta()).expect("sidecar serializes")
    }

    /// Rebuild from the CSV body and the JSON sidecar.
    pub fn from_csv(csv: &str, sidecar: &str) -> Result<Self> {
        let meta: SampleMeta =
            serde_json::from_str(sidecar).map_err(|e| Error::Parse(format!("sidecar: {e}")))?;
        let mut lines = csv.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty sample CSV".into()))?;
        let col = header
            .split(',')
            .position(|c| c.trim() == "X")
            .ok_or_else(|| Error::Parse("sample CSV lacks column X".into()))?;
        let mut values = Vec::new();
        for (i, l) in lines.enumerate() {
            let v = l
                .split(',')
                .nth(col)
                .and_then(|f| f.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::Parse(format!("sample row {} unreadable", i + 2)))?;
            values.push(v);
        }
        if values.len() != meta.n {
            return Err(Error::Parse(format!("sidecar says {} samples, CSV has {}", meta.n, values.len())));
        }
        Self::new(values, meta.frame, meta.model, meta.seed)
    }
}

/// The generator used for every draw.
pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Uniform on [0, 1) from the top 53 bits.
pub fn uniform(r: &mut ChaCha20Rng) -> f64 {
    (r.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Tabulated CDF of W(·|μ,ν) on `CDF_NODES` nodes.
#[derive(Debug, Clone)]
pub struct TabulatedCdf {
    pub xs: Vec<f64>,
    pub pdf: Vec<f64>,
    /// Normalized cumulative trapezoid sums, last entry exactly 1.
    pub cdf: Vec<f64>,
    /// Trapezoid mass before normalization.
    pub mass: f64,
}

impl TabulatedCdf {
    pub fn for_tomogram(model: &StateModel, frame: FrameParams) -> Result<Self> {
        frame.check()?;
        let (lo, hi) = tomogram_window(model, frame);
        let h = (hi - lo) / (CDF_NODES - 1) as f64;
        let xs: Vec<f64> = (0..CDF_NODES).map(|i| lo + i as f64 * h).collect();
        let cfg = QuadratureConfig::default();
        let pdf: Vec<f64> = xs.iter().map(|&x| tomogram(model, x, frame, &cfg).map(|w| w.max(0.0))).collect::<Result<_>>()?;
        Self::from_pdf(xs, pdf)
    }

    pub fn from_pdf(xs: Vec<f64>, pdf: Vec<f64>) -> Result<Self> {
        let mut cdf = vec![0.0; xs.len()];
        for i in 1..xs.len() {
            cdf[i] = cdf[i - 1] + 0.5 * (pdf[i] + pdf[i - 1]) * (xs[i] - xs[i - 1]);
        }
        let mass = *cdf.last().unwrap_or(&0.0);
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::Quadrature("tabulated pdf has no mass".into()));
        }
        for c in &mut cdf {
            *c /= mass;
        }
        Ok(Self { xs, pdf, cdf, mass })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return 0.0;
        }
        if x >= self.xs[n - 1] {
            return 1.0;
        }
        let i = self.xs.partition_point(|&v| v <= x).clamp(1, n - 1);
        let t = (x - self.xs[i - 1]) / (self.xs[i] - self.xs[i - 1]);
        self.cdf[i - 1] + t * (self.cdf[i] - self.cdf[i - 1])
    }

    pub fn inverse(&self, u: f64) -> f64 {
        let n = self.cdf.len();
        let i = self.cdf.partition_point(|&c| c <= u).clamp(1, n - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let t = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
        self.xs[i - 1] + t * (self.xs[i] - self.xs[i - 1])
    }
}

/// X-window holding essentially all of W(·|μ,ν).
pub fn tomogram_window(model: &StateModel, frame: FrameParams) -> (f64, f64) {
    let c = crate::charfun::tomogram_center(model, frame);
    let r = frame.s().sqrt();
    let half = match model {
        // algebraic tails when ν ≠ 0
        StateModel::Pho { .. } => 40.0 * r * model.scale(),
        _ => 10.0 * r * model.scale() + 2.0 * r,
    };
    (c - half, c + half)
}

/// n draws from W(X|μ,ν) by inverse transform on the tabulated CDF.
pub fn sample_tomogram(model: &StateModel, frame: FrameParams, n: usize, seed: u64) -> Result<SampleSet> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    let cdf = TabulatedCdf::for_tomogram(model, frame)?;
    let mut r = rng(seed);
    let values = (0..n).map(|_| cdf.inverse(uniform(&mut r))).collect();
    SampleSet::new(values, frame, Some(model.to_string()), seed)
}

/// Kernel bandwidth choice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bandwidth {
    /// 1.06 σ̂ n^{−1/5}
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub bins: usize,
    pub bandwidth: Bandwidth,
    /// Histogram range; defaults to the sample range.
    pub range: Option<(f64, f64)>,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self { bins: 64, bandwidth: Bandwidth::Auto, range: None }
    }
}

impl EstimatorConfig {
    pub fn check(&self) -> Result<()> {
        if self.bins < 2 {
            return Err(Error::InvalidParameter("bins must be >= 2".into()));
        }
        if let Bandwidth::Fixed(h) = self.bandwidth {
            if !(h > 0.0) || !h.is_finite() {
                return Err(Error::InvalidParameter("bandwidth must be positive".into()));
            }
        }
        if let Some((a, b)) = self.range {
            if !(b > a) {
                return Err(Error::InvalidParameter("empty estimator range".into()));
            }
        }
        Ok(())
    }
}

/// A one-dimensional pdf that can be compared by [`distance`].
#[derive(Debug, Clone)]
pub enum PdfEstimate {
    /// Bin edges and densities.
    Histogram { edges: Vec<f64>, density: Vec<f64> },
    /// Gaussian kernels at the (sorted) samples.
    Kde { samples: Vec<f64>, bandwidth: f64 },
    /// Piecewise-linear table, e.g. an analytic tomogram.
    Table(TabulatedCdf),
    /// Empirical measure (step CDF, no density).
    Empirical(Vec<f64>),
}

pub fn histogram_estimate(samples: &SampleSet, cfg: &EstimatorConfig) -> Result<PdfEstimate> {
    cfg.check()?;
    if samples.len() < 2 {
        return Err(Error::InvalidParameter("histogram needs >= 2 samples".into()));
    }
    let (lo, hi) = cfg.range.unwrap_or_else(|| {
        let lo = samples.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = samples.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    });
    if !(hi > lo) {
        return Err(Error::InvalidParameter("samples span an empty range".into()));
    }
    let w = (hi - lo) / cfg.bins as f64;
    let mut counts = vec![0usize; cfg.bins];
    let mut inside = 0usize;
    for &v in &samples.values {
        if v < lo || v > hi {
            continue;
        }
        let k = (((v - lo) / w) as usize).min(cfg.bins - 1);
        counts[k] += 1;
        inside += 1;
    }
    if inside == 0 {
        return Err(Error::InvalidParameter("no samples fall in the histogram range".into()));
    }
    let edges = (0..=cfg.bins).map(|i| lo + i as f64 * w).collect();
    let density = counts.iter().map(|&c| c as f64 / (inside as f64 * w)).collect();
    Ok(PdfEstimate::Histogram { edges, density })
}

pub fn auto_bandwidth(samples: &SampleSet) -> f64 {
    1.06 * samples.variance().sqrt() * (samples.len() as f64).powf(-0.2)
}

pub fn kde_estimate(samples: &SampleSet, cfg: &EstimatorConfig) -> Result<PdfEstimate> {
    cfg.check()?;
    if samples.len() < 2 {
        return Err(Error::InvalidParameter("kernel estimate needs >= 2 samples".into()));
    }
    let h = match cfg.bandwidth {
        Bandwidth::Fixed(h) => h,
        Bandwidth::Auto => {
            let h = auto_bandwidth(samples);
            if !(h > 0.0) {
                return Err(Error::InvalidParameter("zero sample variance".into()));
            }
            h
        }
    };
    let mut s = samples.values.clone();
    s.sort_by(f64::total_cmp);
    Ok(PdfEstimate::Kde { samples: s, bandwidth: h })
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Complementary error function (Numerical Recipes erfcc, rel. error < 1.2e−7).
fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let r = t
        * (-z * z - 1.265_512_23
            + t * (1.000_023_68
                + t * (0.374_091_96
                    + t * (0.096_784_18
                        + t * (-0.186_288_06
                            + t * (0.278_868_07
                                + t * (-1.135_203_98 + t * (1.488_515_87 + t * (-0.822_152_23 + t * 0.170_872_77)))))))))
            .exp();
    if x >= 0.0 {
        r
    } else {
        2.0 - r
    }
}

impl PdfEstimate {
    pub fn density(&self, x: f64) -> Option<f64> {
        match self {
            PdfEstimate::Histogram { edges, density } => {
                let n = density.len();
                if x < edges[0] || x > edges[n] {
                    return Some(0.0);
                }
                let k = (edges.partition_point(|&e| e <= x).max(1) - 1).min(n - 1);
                Some(density[k])
            }
            PdfEstimate::Kde { samples, bandwidth } => {
                let h = *bandwidth;
                let lo = samples.partition_point(|&s| s < x - 9.0 * h);
                let hi = samples.partition_point(|&s| s <= x + 9.0 * h);
                let sum: f64 = samples[lo..hi].iter().map(|s| (-0.5 * ((x - s) / h).powi(2)).exp()).sum();
                Some(sum / (samples.len() as f64 * h * (2.0 * PI).sqrt()))
            }
            PdfEstimate::Table(t) => {
                let n = t.xs.len();
                if x < t.xs[0] || x > t.xs[n - 1] {
                    return Some(0.0);
                }
                let i = t.xs.partition_point(|&v| v <= x).clamp(1, n - 1);
                let u = (x - t.xs[i - 1]) / (t.xs[i] - t.xs[i - 1]);
                Some((t.pdf[i - 1] + u * (t.pdf[i] - t.pdf[i - 1])) / t.mass)
            }
            PdfEstimate::Empirical(_) => None,
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            PdfEstimate::Histogram { edges, density } => {
                let mut acc = 0.0;
                for (k, d) in density.iter().enumerate() {
                    let (a, b) = (edges[k], edges[k + 1]);
                    if x >= b {
                        acc += d * (b - a);
                    } else {
                        if x > a {
                            acc += d * (x - a);
                        }
                        break;
                    }
                }
                acc
            }
            PdfEstimate::Kde { samples, bandwidth } => {
                samples.iter().map(|s| std_normal_cdf((x - s) / bandwidth)).sum::<f64>() / samples.len() as f64
            }
            PdfEstimate::Table(t) => t.eval(x),
            PdfEstimate::Empirical(s) => s.partition_point(|&v| v <= x) as f64 / s.len() as f64,
        }
    }

    /// Interval carrying the mass.
    pub fn span(&self) -> (f64, f64) {
        match self {
            PdfEstimate::Histogram { edges, .. } => (edges[0], edges[edges.len() - 1]),
            PdfEstimate::Kde { samples, bandwidth } => {
                (samples[0] - 9.0 * bandwidth, samples[samples.len() - 1] + 9.0 * bandwidth)
            }
            PdfEstimate::Table(t) => (t.xs[0], t.xs[t.xs.len() - 1]),
            PdfEstimate::Empirical(s) => (s[0], s[s.len() - 1]),
        }
    }

    /// ∫ density over the span by a fine trapezoid rule.
    pub fn integral(&self) -> Option<f64> {
        match self {
            PdfEstimate::Histogram { edges, density } => {
                Some(density.iter().enumerate().map(|(k, d)| d * (edges[k + 1] - edges[k])).sum())
            }
            PdfEstimate::Empirical(_) => None,
            _ => {
                let (a, b) = self.span();
                let n = 20_001;
                let h = (b - a) / (n - 1) as f64;
                let ys: Vec<f64> = (0..n).map(|i| self.density(a + i as f64 * h).unwrap_or(0.0)).collect();
                let xs: Vec<f64> = (0..n).map(|i| a + i as f64 * h).collect();
                Some(crate::quadrature::trapezoid(&xs, &ys))
            }
        }
    }

    /// Analytic tomogram at a frame as a comparison target.
    pub fn analytic(model: &StateModel, frame: FrameParams) -> Result<Self> {
        Ok(PdfEstimate::Table(TabulatedCdf::for_tomogram(model, frame)?))
    }

    pub fn empirical(samples: &SampleSet) -> Self {
        let mut s = samples.values.clone();
        s.sort_by(f64::total_cmp);
        PdfEstimate::Empirical(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Metric {
    L1,
    KS,
}

/// L1 = ∫|p − q| on a shared grid; KS = sup|P − Q|. KS against an empirical
/// measure is evaluated exactly at the jumps.
pub fn distance(p: &PdfEstimate, q: &PdfEstimate, metric: Metric) -> Result<f64> {
    match metric {
        Metric::L1 => {
            let (a1, b1) = p.span();
            let (a2, b2) = q.span();
            let (a, b) = (a1.min(a2), b1.max(b2));
            let n = 40_001;
            let h = (b - a) / (n - 1) as f64;
            let mut acc = 0.0;
            let mut prev = None;
            for i in 0..n {
                let x = a + i as f64 * h;
                let (dp, dq) = match (p.density(x), q.density(x)) {
                    (Some(u), Some(v)) => (u, v),
                    _ => return Err(Error::InvalidParameter("L1 needs densities on both sides".into())),
                };
                let d = (dp - dq).abs();
                if let Some(pd) = prev {
                    acc += 0.5 * (pd + d) * h;
                }
                prev = Some(d);
            }
            Ok(acc)
        }
        Metric::KS => {
            let emp = |s: &Vec<f64>, other: &PdfEstimate| {
                let n = s.len() as f64;
                let mut sup: f64 = 0.0;
                for (i, &x) in s.iter().enumerate() {
                    let f = other.cdf(x);
                    sup = sup.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
                }
                sup
            };
            match (p, q) {
                (PdfEstimate::Empirical(s), o) | (o, PdfEstimate::Empirical(s)) if !matches!(o, PdfEstimate::Empirical(_)) => {
                    Ok(emp(s, o))
                }
                _ => {
                    let mut xs: Vec<f64> = Vec::new();
                    for e in [p, q] {
                        if let PdfEstimate::Empirical(s) = e {
                            xs.extend(s.iter().copied());
                        }
                    }
                    let (a1, b1) = p.span();
                    let (a2, b2) = q.span();
                    let (a, b) = (a1.min(a2), b1.max(b2));
                    let n = 20_001;
                    xs.extend((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64));
                    Ok(xs.iter().map(|&x| (p.cdf(x) - q.cdf(x)).abs()).fold(0.0, f64::max))
                }
            }
        }
    }
}

/// Sample mean of e^{itX}, valid only at the recorded frame.
#[derive(Debug, Clone)]
pub struct EmpiricalCharFn {
    samples: SampleSet,
}

impl EmpiricalCharFn {
    pub fn new(samples: SampleSet) -> Self {
        Self { samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn frame(&self) -> FrameParams {
        self.samples.frame
    }

    pub fn eval(&self, t: f64, frame: FrameParams) -> Result<C> {
        let f = self.samples.frame;
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + a.abs());
        if !(close(frame.mu, f.mu) && close(frame.nu, f.nu)) {
            return Err(Error::FrameMismatch { rec_mu: f.mu, rec_nu: f.nu, mu: frame.mu, nu: frame.nu });
        }
        if t == 0.0 {
            return Ok(C::new(1.0, 0.0));
        }
        let sum: C = self.samples.values.iter().map(|&x| C::from_polar(1.0, t * x)).sum();
        Ok(sum / self.len() as f64)
    }
}

pub fn empirical_charfn(samples: SampleSet) -> crate::charfun::CharFnProvider {
    crate::charfun::CharFnProvider::Empirical(std::sync::Arc::new(EmpiricalCharFn::new(samples)))
}

/// Samples of one frame binned on a uniform grid. Each bin keeps its weight and
/// mean offset from the bin centre so that Σ w e^{irX} is exact to second order.
#[derive(Debug, Clone)]
struct Binned {
    x0: f64,
    delta: f64,
    w: Vec<f64>,
    d: Vec<f64>,
    /// Radius of the frame the samples were drawn at.
    radius: f64,
}

impl Binned {
    fn new(set: &SampleSet, delta: f64) -> Self {
        let lo = set.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = set.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let nb = (((hi - lo) / delta).floor() as usize) + 1;
        let x0 = lo + 0.5 * delta;
        let mut w = vec![0.0; nb];
        let mut d = vec![0.0; nb];
        for &v in &set.values {
            let k = (((v - lo) / delta) as usize).min(nb - 1);
            w[k] += 1.0;
            d[k] += v - (x0 + k as f64 * delta);
        }
        let n = set.len() as f64;
        for k in 0..nb {
            if w[k] > 0.0 {
                d[k] /= w[k];
                w[k] /= n;
            }
        }
        Self { x0, delta, w, d, radius: set.frame.s().sqrt() }
    }

    /// mean of e^{i r X / radius}
    fn fourier(&self, r: f64) -> C {
        let k = r / self.radius;
        let step = C::from_polar(1.0, k * self.delta);
        let mut ph = C::from_polar(1.0, k * self.x0);
        let mut acc = C::new(0.0, 0.0);
        for (j, (&w, &d)) in self.w.iter().zip(&self.d).enumerate() {
            if w > 0.0 {
                acc += ph * C::new(w, w * k * d);
            }
            ph *= step;
            if j % 256 == 255 {
                // renormalize against drift in the phasor recurrence
                ph /= ph.norm();
            }
        }
        acc
    }
}

/// Empirical characteristic function over all frames, from one sample set per
/// homodyne angle θ in [0, π). Angles in [π, 2π) reuse the set at θ − π with
/// negated samples, since X_{θ+π} = −X_θ. Other frames use
/// φ(1; r cos θ, r sin θ) = E[e^{irX_θ}] with four-point Lagrange interpolation in θ.
#[derive(Debug, Clone)]
pub struct EmpiricalFamily {
    sets: Vec<Binned>,
    n_per_angle: usize,
}

/// Bin width used by [`EmpiricalFamily`].
pub const FAMILY_BIN: f64 = 2e-3;

impl EmpiricalFamily {
    /// Sets must be at frames with equally spaced angles covering [0, π).
    pub fn from_sets(sets: &[SampleSet]) -> Result<Self> {
        let m = sets.len();
        if m < 2 {
            return Err(Error::InvalidParameter("empirical family needs >= 2 angles".into()));
        }
        for (k, s) in sets.iter().enumerate() {
            s.frame.check()?;
            let th = s.frame.nu.atan2(s.frame.mu).rem_euclid(2.0 * PI);
            let want = PI * k as f64 / m as f64;
            let diff = (th - want).rem_euclid(2.0 * PI);
            if diff.min(2.0 * PI - diff) > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "set {k} is at angle {th}, expected {want} for {m} equally spaced angles on [0, pi)"
                )));
            }
        }
        let n_per_angle = sets.iter().map(|s| s.len()).min().unwrap_or(0);
        Ok(Self { sets: sets.iter().map(|s| Binned::new(s, FAMILY_BIN)).collect(), n_per_angle })
    }

    /// Sample `angles` optical frames on [0, π) of a catalog state, `n` draws each; set k uses seed + k.
    pub fn sample(model: &StateModel, angles: usize, n: usize, seed: u64) -> Result<Self> {
        let sets: Vec<SampleSet> = (0..angles)
            .map(|k| {
                let th = PI * k as f64 / angles as f64;
                sample_tomogram(model, FrameParams::new(th.cos(), th.sin()), n, seed.wrapping_add(k as u64))
            })
            .collect::<Result<_>>()?;
        Self::from_sets(&sets)
    }

    pub fn angles(&self) -> usize {
        self.sets.len()
    }

    pub fn samples_per_angle(&self) -> usize {
        self.n_per_angle
    }

    // node j of the 2M-point circle
    fn node(&self, j: usize, r: f64) -> C {
        let m = self.sets.len();
        let v = self.sets[j % m].fourier(r);
        if j % (2 * m) < m {
            v
        } else {
            v.conj()
        }
    }

    pub fn eval(&self, t: f64, frame: FrameParams) -> Result<C> {
        let (mu, nu) = (t * frame.mu, t * frame.nu);
        let r = (mu * mu + nu * nu).sqrt();
        if r == 0.0 {
            return Ok(C::new(1.0, 0.0));
        }
        let m2 = 2 * self.sets.len();
        let pos = nu.atan2(mu).rem_euclid(2.0 * PI) / (2.0 * PI / m2 as f64);
        let k = (pos.floor() as usize) % m2;
        let u = pos - pos.floor();
        if u < 1e-12 {
            return Ok(self.node(k, r));
        }
        // Lagrange weights for nodes −1, 0, 1, 2
        let w = [
            -u * (u - 1.0) * (u - 2.0) / 6.0,
            (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0,
            -(u + 1.0) * u * (u - 2.0) / 2.0,
            (u + 1.0) * u * (u - 1.0) / 6.0,
        ];
        let mut acc = C::new(0.0, 0.0);
        for (j, wj) in w.iter().enumerate() {
            acc += self.node(k + m2 + j - 1, r) * *wj;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_is_deterministic_and_in_range() {
        let mut a = rng(7);
        let mut b = rng(7);
        for _ in 0..1000 {
            let u = uniform(&mut a);
            assert!((0.0..1.0).contains(&u));
            assert_eq!(u.to_bits(), uniform(&mut b).to_bits());
        }
    }

    #[test]
    fn ground_state_sample_moments() {
        let s = sample_tomogram(&StateModel::ho(0), FrameParams::new(1.0, 0.0), 100_000, 42).unwrap();
        assert!(s.mean().abs() <= 0.01, "mean {}", s.mean());
        assert!((s.variance() - 0.5).abs() <= 0.02, "var {}", s.variance());
        let c = sample_tomogram(&StateModel::coherent(C::new(1.0, 0.0)), FrameParams::new(1.0, 0.0), 100_000, 1)
            .unwrap();
        assert!((c.mean() - 2f64.sqrt()).abs() <= 0.01);
        assert!(sample_tomogram(&StateModel::ho(0), FrameParams::new(0.0, 0.0), 10, 1).is_err());
    }

    #[test]
    fn estimators_integrate_to_one() {
        let s = sample_tomogram(&StateModel::ho(0), FrameParams::new(1.0, 0.0), 2000, 3).unwrap();
        let h = histogram_estimate(&s, &EstimatorConfig::default()).unwrap();
        assert!((h.integral().unwrap() - 1.0).abs() < 1e-12);
        let k = kde_estimate(&s, &EstimatorConfig::default()).unwrap();
        assert!((k.integral().unwrap() - 1.0).abs() < 1e-6);
        let bad = EstimatorConfig { bins: 1, ..Default::default() };
        assert!(histogram_estimate(&s, &bad).is_err());
        let flat = SampleSet::new(vec![1.0, 1.0, 1.0], s.frame, None, 0).unwrap();
        assert!(kde_estimate(&flat, &EstimatorConfig::default()).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let s = sample_tomogram(&StateModel::ho(1), FrameParams::new(0.6, 0.8), 50, 9).unwrap();
        let back = SampleSet::from_csv(&s.to_csv(), &s.sidecar_json()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn empirical_charfn_is_frame_locked() {
        let s = sample_tomogram(&StateModel::ho(0), FrameParams::new(1.0, 0.0), 10_000, 5).unwrap();
        let e = EmpiricalCharFn::new(s);
        let f = FrameParams::new(1.0, 0.0);
        assert_eq!(e.eval(0.0, f).unwrap(), C::new(1.0, 0.0));
        let v = e.eval(1.0, f).unwrap();
        assert!((v - C::new((-0.25f64).exp(), 0.0)).norm() < 0.02);
        assert!(matches!(e.eval(1.0, FrameParams::new(0.0, 1.0)), Err(Error::FrameMismatch { .. })));
    }

    #[test]
    fn binned_fourier_matches_direct_sum() {
        let s = sample_tomogram(&StateModel::coherent(C::new(1.0, 0.5)), FrameParams::new(0.6, 0.8), 20_000, 11)
            .unwrap();
        let b = Binned::new(&s, FAMILY_BIN);
        for r in [0.3, 2.0, 8.5] {
            let direct: C = s.values.iter().map(|&x| C::from_polar(1.0, r * x)).sum::<C>() / s.len() as f64;
            assert!((b.fourier(r) - direct).norm() < 1e-5, "r={r}");
        }
    }

    #[test]
    fn family_interpolates_coherent_state() {
        let m = StateModel::coherent(C::new(0.8, -0.4));
        let fam = EmpiricalFamily::sample(&m, 64, 20_000, 2).unwrap();
        for &(mu, nu) in &[(0.3, 0.4), (-1.0, 0.7), (1.5, -1.5)] {
            let v = fam.eval(1.0, FrameParams::new(mu, nu)).unwrap();
            let e = crate::charfun::charfn_analytic(&m, 1.0, FrameParams::new(mu, nu)).unwrap();
            assert!((v - e).norm() < 0.03, "({mu},{nu}): {v} vs {e}");
            let back = fam.eval(1.0, FrameParams::new(-mu, -nu)).unwrap();
            assert!((back - v.conj()).norm() < 1e-12);
        }
    }
}
