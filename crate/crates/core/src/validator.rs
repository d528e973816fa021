//! Necessary conditions for a characteristic function to describe a quantum
//! state: unit trace, hermiticity of the reconstructed kernel, purity within
//! [0, 1] and a nonnegative diagonal.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::charfun::{CharFnProvider, ExpFamilySpec, FrameMarker};
use crate::error::{Error, Result};

type C = Complex64;

/// Label carried by every report: the checks are necessary, not sufficient.
pub const OVERALL_LABEL: &str = "passes the paper's necessary conditions";

/// Boundary magnitude above which a truncation warning is issued.
pub const TRUNCATION_WARN: f64 = 1e-8;

/// Uniform grid of `n` nodes on [min, max].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1 {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Grid1 {
    pub fn new(min: f64, max: f64, n: usize) -> Result<Self> {
        if n < 2 || !(max > min) || !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidParameter(format!("bad grid {min}:{max}:{n}")));
        }
        Ok(Self { min, max, n })
    }

    /// Symmetric grid on [−r, r] with spacing at most `h` and an odd node count.
    pub fn symmetric(r: f64, h: f64) -> Self {
        let half = (r / h).ceil().max(1.0) as usize;
        Self { min: -r, max: r, n: 2 * half + 1 }
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.n - 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.n).map(|i| if i == self.n - 1 { self.max } else { self.min + i as f64 * h }).collect()
    }

    /// Trapezoid weights.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.n).map(|i| if i == 0 || i == self.n - 1 { 0.5 * h } else { h }).collect()
    }

    fn is_symmetric(&self) -> bool {
        (self.min + self.max).abs() <= 1e-12 * self.max.abs().max(1.0)
    }
}

impl Default for Grid1 {
    fn default() -> Self {
        Self { min: -6.0, max: 6.0, n: 121 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// |φ(1;0,0) − 1|
    pub trace: f64,
    /// sup |φ(1;μ,ν) − φ*(1;−μ,−ν)|
    pub hermiticity: f64,
    /// purity must lie in [−tol, 1 + tol]
    pub purity: f64,
    /// ρ(y,y) ≥ −tol
    pub diag: f64,
    /// |Im ρ(y,y)| ≤ tol
    pub diag_imag: f64,
}

impl Tolerances {
    pub fn analytic() -> Self {
        Self { trace: 1e-6, hermiticity: 1e-8, purity: 1e-3, diag: 1e-6, diag_imag: 1e-8 }
    }

    /// Looser class for Monte Carlo providers.
    pub fn empirical() -> Self {
        Self { trace: 1e-3, hermiticity: 1e-2, purity: 1e-2, diag: 1e-2, diag_imag: 1e-2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidatorConfig {
    /// (μ, ν) lattice; both axes use it.
    pub lattice: Grid1,
    pub y_grid: Grid1,
    /// Widen the lattice when the provider has not decayed at its edge.
    pub auto_extend: bool,
    pub decay_eps: f64,
    pub max_radius: f64,
    /// Largest lattice spacing used when extending.
    pub spacing: f64,
    /// Cap on the 1D μ range of the diagonal check, which may run far past the lattice.
    pub diag_max_radius: f64,
    /// Overrides the class chosen from the provider.
    pub tolerances: Option<Tolerances>,
}

impl Default for ValidatorConfig {
    fn default() -> Self {
        Self {
            lattice: Grid1::default(),
            y_grid: Grid1::default(),
            auto_extend: true,
            decay_eps: 1e-9,
            max_radius: 24.0,
            spacing: 0.1,
            diag_max_radius: 400.0,
            tolerances: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceCheck {
    /// φ(1;0,0) as [re, im]
    pub value: [f64; 2],
    pub deviation: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PurityCheck {
    pub value: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeInfo {
    pub mu: Grid1,
    pub nu: Grid1,
    pub y: Grid1,
    /// μ grid of the diagonal check (ν = 0).
    pub diag_mu: Grid1,
    pub class: String,
    pub auto_extended: bool,
    /// Whether |φ| fell below the decay threshold inside the lattice.
    pub decayed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckError {
    pub check: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub provider: String,
    pub trace_check: Option<TraceCheck>,
    pub hermiticity_sup: Option<f64>,
    pub hermiticity_pass: bool,
    /// sup |φ(1;μ,ν) − φ(−1;μ,−ν)|, the condition as printed; diagnostic only.
    pub hermiticity_literal_sup: Option<f64>,
    pub purity: Option<PurityCheck>,
    pub diag_min: Option<f64>,
    pub diag_imag_max: Option<f64>,
    pub diag_pass: bool,
    pub overall: bool,
    pub overall_label: String,
    pub tolerances: Tolerances,
    pub lattice: LatticeInfo,
    pub warnings: Vec<String>,
    pub divergence_markers: Vec<FrameMarker>,
    pub errors: Vec<CheckError>,
}

impl ValidationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Result of a 2D lattice quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quad2 {
    pub value: f64,
    pub imag: f64,
    /// Largest |integrand| on the lattice boundary.
    pub boundary_max: f64,
}

impl Quad2 {
    pub fn truncated(&self) -> bool {
        self.boundary_max > TRUNCATION_WARN
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagResult {
    pub min: f64,
    pub imag_max: f64,
    pub values: Vec<f64>,
    pub boundary_max: f64,
}

/// φ(t; σμ_i, σν_j) over the lattice, row-major in μ.
pub fn eval_lattice(p: &CharFnProvider, t: f64, sign: f64, mus: &[f64], nus: &[f64]) -> Result<Vec<C>> {
    let m: Vec<f64> = mus.iter().map(|v| sign * v).collect();
    let n: Vec<f64> = nus.iter().map(|v| sign * v).collect();
    p.eval_grid(t, &m, &n)
}

pub fn check_trace(p: &CharFnProvider, tol: f64) -> Result<TraceCheck> {
    let v = p.eval(1.0, 0.0, 0.0)?;
    let dev = (v - C::new(1.0, 0.0)).norm();
    Ok(TraceCheck { value: [v.re, v.im], deviation: dev, pass: dev <= tol })
}

/// sup |φ(1;μ,ν) − φ*(1;−μ,−ν)|: the condition ρ*(y,y′) = ρ(y′,y) written on φ.
pub fn check_hermiticity(p: &CharFnProvider, mus: &[f64], nus: &[f64]) -> Result<f64> {
    let a = eval_lattice(p, 1.0, 1.0, mus, nus)?;
    let b = eval_lattice(p, 1.0, -1.0, mus, nus)?;
    Ok(sup_diff_conj(&a, &b))
}

/// sup |φ(1;μ,ν) − φ(−1;μ,−ν)| as printed; holds only for states even in momentum.
pub fn hermiticity_literal(p: &CharFnProvider, mus: &[f64], nus: &[f64]) -> Result<f64> {
    let a = eval_lattice(p, 1.0, 1.0, mus, nus)?;
    literal_against(p, &a, mus, nus)
}

fn literal_against(p: &CharFnProvider, a: &[C], mus: &[f64], nus: &[f64]) -> Result<f64> {
    let neg: Vec<f64> = nus.iter().map(|n| -n).collect();
    let b = p.eval_grid(-1.0, mus, &neg)?;
    Ok(sup_diff(a, &b))
}

fn sup_diff(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn sup_diff_conj(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y.conj()).norm()).fold(0.0, f64::max)
}

/// (1/2π) ∬ φ₁(1;μ,ν) φ₂(1;−μ,−ν) dμ dν by the tensor trapezoid rule.
pub fn check_overlap(p1: &CharFnProvider, p2: &CharFnProvider, mu: &Grid1, nu: &Grid1) -> Result<Quad2> {
    let (mus, nus) = (mu.nodes(), nu.nodes());
    let a = eval_lattice(p1, 1.0, 1.0, &mus, &nus)?;
    let b = eval_lattice(p2, 1.0, -1.0, &mus, &nus)?;
    Ok(lattice_integral(&a, &b, mu, nu))
}

fn lattice_integral(a: &[C], b: &[C], mu: &Grid1, nu: &Grid1) -> Quad2 {
    let (wm, wn) = (mu.weights(), nu.weights());
    let mut acc = C::new(0.0, 0.0);
    let mut boundary: f64 = 0.0;
    for i in 0..mu.n {
        for j in 0..nu.n {
            let v = a[i * nu.n + j] * b[i * nu.n + j];
            acc += v * (wm[i] * wn[j]);
            if i == 0 || j == 0 || i == mu.n - 1 || j == nu.n - 1 {
                boundary = boundary.max(v.norm());
            }
        }
    }
    acc /= 2.0 * PI;
    Quad2 { value: acc.re, imag: acc.im, boundary_max: boundary }
}

/// ρ(y,y) = (1/2π) ∫ φ(1;μ,0) e^{−iμy} dμ by the trapezoid rule on `mu`.
pub fn check_diag_positivity(p: &CharFnProvider, ys: &[f64], mu: &Grid1) -> Result<DiagResult> {
    let mus = mu.nodes();
    let row = eval_lattice(p, 1.0, 1.0, &mus, &[0.0])?;
    Ok(diag_from_row(&row, mu, ys))
}

/// Trapezoid ∫ φ(1;μ_k, ·) e^{−iμ_k c} dμ / 2π for a tabulated row.
pub fn fourier_row(row: &[C], mus: &[f64], weights: &[f64], c: f64) -> C {
    let mut acc = C::new(0.0, 0.0);
    for k in 0..row.len() {
        acc += row[k] * C::from_polar(weights[k], -mus[k] * c);
    }
    acc / (2.0 * PI)
}

fn diag_from_row(row: &[C], mu: &Grid1, ys: &[f64]) -> DiagResult {
    let (mus, w) = (mu.nodes(), mu.weights());
    let vals: Vec<C> = ys.iter().map(|&y| fourier_row(row, &mus, &w, y)).collect();
    DiagResult {
        min: vals.iter().map(|v| v.re).fold(f64::INFINITY, f64::min),
        imag_max: vals.iter().map(|v| v.im.abs()).fold(0.0, f64::max),
        values: vals.iter().map(|v| v.re).collect(),
        boundary_max: row[0].norm().max(row[row.len() - 1].norm()),
    }
}

/// Smallest radius (stepping by 1 from `start`) beyond which |φ(1;·)| < eps on
/// a ring of probes at that radius and the next; `None` if `cap` is reached.
pub fn decay_radius(providers: &[&CharFnProvider], start: f64, eps: f64, cap: f64) -> Option<f64> {
    let ring = |r: f64| -> f64 {
        let mut m: f64 = 0.0;
        for p in providers {
            for k in 0..48 {
                let th = 2.0 * PI * k as f64 / 48.0;
                match p.eval(1.0, r * th.cos(), r * th.sin()) {
                    Ok(v) => m = m.max(v.norm()),
                    Err(_) => return f64::INFINITY,
                }
            }
        }
        m
    };
    let mut r = start;
    while r <= cap {
        if ring(r) < eps && ring(r + 1.0) < eps {
            return Some(r);
        }
        r += 1.0;
    }
    None
}

/// Lattice used for `providers`: the configured one, widened to the radius
/// where they have decayed, or to `max_radius` if they never do. The flag
/// reports whether the decay threshold was reached.
pub fn effective_lattice(providers: &[&CharFnProvider], cfg: &ValidatorConfig) -> (Grid1, bool, bool) {
    let base = cfg.lattice;
    let empirical = providers.iter().any(|p| p.is_empirical());
    if !cfg.auto_extend || empirical || !base.is_symmetric() {
        return (base, false, true);
    }
    let h = cfg.spacing.min(base.step());
    match decay_radius(providers, base.max, cfg.decay_eps, cfg.max_radius) {
        Some(r) if r > base.max => (Grid1::symmetric(r, h), true, true),
        Some(_) => (base, false, true),
        None if cfg.max_radius > base.max => (Grid1::symmetric(cfg.max_radius, h), true, false),
        None => (base, false, false),
    }
}

/// μ grid for the diagonal check: out to where |φ(1;μ,0)| < eps, capped.
pub fn diag_mu_grid(p: &CharFnProvider, lattice: &Grid1, cfg: &ValidatorConfig) -> Result<(Grid1, bool)> {
    if p.is_empirical() || !cfg.auto_extend || !lattice.is_symmetric() {
        return Ok((*lattice, true));
    }
    let h = cfg.spacing.min(lattice.step());
    let cap = cfg.diag_max_radius.max(lattice.max);
    let probe = Grid1::symmetric(cap, 0.25);
    let mus = probe.nodes();
    let row = p.eval_grid(1.0, &mus, &[0.0])?;
    let last = mus.iter().zip(&row).filter(|(_, v)| v.norm() >= cfg.decay_eps).map(|(m, _)| m.abs()).fold(0.0, f64::max);
    if last + 1.0 >= cap {
        return Ok((Grid1::symmetric(cap, h), false));
    }
    let r = (last + 1.0).ceil().max(lattice.max);
    if r <= lattice.max {
        return Ok((*lattice, true));
    }
    Ok((Grid1::symmetric(r, h), true))
}

pub fn validate(p: &CharFnProvider, cfg: &ValidatorConfig) -> ValidationReport {
    let empirical = p.is_empirical();
    let tol = cfg.tolerances.unwrap_or(if empirical { Tolerances::empirical() } else { Tolerances::analytic() });
    let (lat, extended, decayed) = effective_lattice(&[p], cfg);
    let mut report = ValidationReport {
        provider: p.label(),
        trace_check: None,
        hermiticity_sup: None,
        hermiticity_pass: false,
        hermiticity_literal_sup: None,
        purity: None,
        diag_min: None,
        diag_imag_max: None,
        diag_pass: false,
        overall: false,
        overall_label: OVERALL_LABEL.to_string(),
        tolerances: tol,
        lattice: LatticeInfo {
            mu: lat,
            nu: lat,
            y: cfg.y_grid,
            diag_mu: lat,
            class: if empirical { "empirical" } else { "analytic" }.into(),
            auto_extended: extended,
            decayed,
        },
        warnings: Vec::new(),
        divergence_markers: Vec::new(),
        errors: Vec::new(),
    };
    let err = |r: &mut ValidationReport, check: &str, e: Error| {
        r.errors.push(CheckError { check: check.into(), message: e.to_string() })
    };

    match check_trace(p, tol.trace) {
        Ok(t) => report.trace_check = Some(t),
        Err(e) => err(&mut report, "trace", e),
    }

    let nodes = lat.nodes();
    let a = eval_lattice(p, 1.0, 1.0, &nodes, &nodes);
    // φ(1;−μ,−ν); on a symmetric lattice it is the mirrored entry
    let b = match &a {
        Ok(a) if lat.is_symmetric() => Ok(a.iter().rev().copied().collect()),
        _ => eval_lattice(p, 1.0, -1.0, &nodes, &nodes),
    };
    match (&a, &b) {
        (Ok(a), Ok(mirrored)) => {
            let h = sup_diff_conj(a, mirrored);
            report.hermiticity_sup = Some(h);
            report.hermiticity_pass = h <= tol.hermiticity;
            let q = lattice_integral(a, mirrored, &lat, &lat);
            if q.truncated() {
                report.warnings.push(format!(
                    "purity integrand reaches {:.2e} on the lattice boundary; truncation may bias the value",
                    q.boundary_max
                ));
            }
            let pass = q.value >= -tol.purity && q.value <= 1.0 + tol.purity;
            report.purity = Some(PurityCheck { value: q.value, pass });
            let diag = diag_mu_grid(p, &lat, cfg).and_then(|(g, ok)| {
                let row = if g == lat {
                    let mid = lat.n / 2;
                    (0..lat.n).map(|i| a[i * lat.n + mid]).collect()
                } else {
                    p.eval_grid(1.0, &g.nodes(), &[0.0])?
                };
                Ok((g, ok, row))
            });
            let (g, ok, row) = match diag {
                Ok(v) => v,
                Err(e) => {
                    err(&mut report, "diag", e);
                    return finish(report, p);
                }
            };
            report.lattice.diag_mu = g;
            if !ok {
                report.warnings.push(format!("φ(1;μ,0) has not decayed below {:.0e} within |μ| ≤ {}", cfg.decay_eps, g.max));
            }
            let d = diag_from_row(&row, &g, &cfg.y_grid.nodes());
            if d.boundary_max > TRUNCATION_WARN {
                report.warnings.push(format!(
                    "φ(1;μ,0) reaches {:.2e} at the lattice edge; diagonal may show truncation ripple",
                    d.boundary_max
                ));
            }
            report.diag_pass = d.min >= -tol.diag && d.imag_max <= tol.diag_imag;
            report.diag_min = Some(d.min);
            report.diag_imag_max = Some(d.imag_max);
        }
        (Err(e), _) | (_, Err(e)) => {
            for c in ["hermiticity", "purity", "diag"] {
                err(&mut report, c, e.clone());
            }
        }
    }
    let literal = match &a {
        Ok(a) => literal_against(p, a, &nodes, &nodes),
        Err(_) => hermiticity_literal(p, &nodes, &nodes),
    };
    match literal {
        Ok(h) => report.hermiticity_literal_sup = Some(h),
        Err(e) => report.warnings.push(format!("literal hermiticity diagnostic unavailable: {e}")),
    }

    finish(report, p)
}

fn finish(mut report: ValidationReport, p: &CharFnProvider) -> ValidationReport {
    if !report.lattice.decayed {
        report.warnings.push(format!(
            "φ has not decayed below the threshold within |μ|,|ν| ≤ {}; lattice integrals are truncated",
            report.lattice.mu.max
        ));
    }
    report.divergence_markers = p.take_markers();
    if !report.divergence_markers.is_empty() {
        let hard = report.divergence_markers.iter().filter(|m| !m.regularized).count();
        report.warnings.push(format!(
            "normalizer diverged at {} frame(s); {} replaced by the limit from neighbouring frames",
            report.divergence_markers.len(),
            report.divergence_markers.len() - hard
        ));
    }
    report.overall = report.errors.is_empty()
        && report.trace_check.map(|t| t.pass).unwrap_or(false)
        && report.hermiticity_pass
        && report.purity.map(|p| p.pass).unwrap_or(false)
        && report.diag_pass;
    report
}

/// The Theorem-2 battery applied to an exponential-family specification.
pub fn expfamily_gate(spec: Arc<ExpFamilySpec>, cfg: &ValidatorConfig) -> ValidationReport {
    validate(&CharFnProvider::ExpFamily(spec), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::StateModel;

    fn prov(d: &str) -> CharFnProvider {
        CharFnProvider::parse(d).unwrap()
    }

    #[test]
    fn grid_nodes_and_weights() {
        let g = Grid1::default();
        let n = g.nodes();
        assert_eq!(n.len(), 121);
        assert_eq!(n[60], 0.0);
        assert!((g.weights().iter().sum::<f64>() - 12.0).abs() < 1e-12);
        assert_eq!(Grid1::symmetric(10.0, 0.1).n, 201);
    }

    #[test]
    fn trace_examples() {
        let t = check_trace(&prov("ho:n=0"), 1e-6).unwrap();
        assert!(t.pass && t.deviation == 0.0);
        let t = check_trace(&prov("exponential:lambda=1"), 1e-6).unwrap();
        assert!(!t.pass);
        assert!((t.deviation - 0.707_106_781_2).abs() < 1e-9);
        let half = CharFnProvider::custom("0.9 ho0", |t, m, n| {
            Ok(CharFnProvider::Analytic(StateModel::ho(0)).eval(t, m, n)? * 0.9)
        });
        assert!(!check_trace(&half, 1e-6).unwrap().pass);
    }

    #[test]
    fn hermiticity_examples() {
        let g = Grid1::default().nodes();
        assert!(check_hermiticity(&prov("ho:n=0"), &g, &g).unwrap() <= 1e-15);
        for d in ["ho:n=3", "coh:re=1,im=0.5", "ccat:re=2,im=0"] {
            assert!(check_hermiticity(&prov(d), &g, &g).unwrap() <= 1e-10, "{d}");
        }
        let base = prov("coh:re=1,im=0.5");
        // an odd imaginary term keeps ρ Hermitian, an even one does not
        let b2 = base.clone();
        let odd = CharFnProvider::custom("odd", move |t, m, n| Ok(b2.eval(t, m, n)? + C::new(0.0, 0.1 * m)));
        assert!(check_hermiticity(&odd, &g, &g).unwrap() <= 1e-10);
        let bad = CharFnProvider::custom("corrupted", move |t, m, n| Ok(base.eval(t, m, n)? + C::new(0.0, 0.1 * m * m)));
        assert!(check_hermiticity(&bad, &g, &g).unwrap() >= 0.2 * 36.0 - 1e-9);
        // frame-independent families are not symmetric under (μ,ν) → (−μ,−ν)
        assert!(check_hermiticity(&prov("exponential:lambda=1"), &g, &g).unwrap() > 0.5);
        // the printed form flags states with ⟨p⟩ ≠ 0
        assert!(hermiticity_literal(&prov("coh:re=1,im=0.5"), &g, &g).unwrap() > 0.1);
        assert!(hermiticity_literal(&prov("ho:n=2"), &g, &g).unwrap() < 1e-12);
    }

    #[test]
    fn overlap_examples() {
        let g = Grid1::default();
        let v = check_overlap(&prov("ho:n=0"), &prov("ho:n=0"), &g, &g).unwrap();
        assert!((v.value - 1.0).abs() < 1e-3);
        let v = check_overlap(&prov("ho:n=0"), &prov("ho:n=1"), &g, &g).unwrap();
        assert!(v.value.abs() < 1e-3);
        let m = prov("mix:0.5@ho:n=0|0.5@ho:n=1");
        let v = check_overlap(&m, &m, &g, &g).unwrap();
        assert!((v.value - 0.5).abs() < 1e-3);
        let a = prov("coh:re=1,im=0.5");
        let b = prov("ccat:re=1,im=0");
        let ab = check_overlap(&a, &b, &g, &g).unwrap().value;
        let ba = check_overlap(&b, &a, &g, &g).unwrap().value;
        assert!((ab - ba).abs() < 1e-9);
    }

    #[test]
    fn diag_examples() {
        let ys = Grid1::default().nodes();
        let g = Grid1::symmetric(12.0, 0.1);
        let d = check_diag_positivity(&prov("ho:n=0"), &ys, &g).unwrap();
        for (y, v) in ys.iter().zip(&d.values) {
            let e = (-y * y).exp() / PI.sqrt();
            assert!((v - e).abs() < 1e-10);
        }
        assert!(d.min > 0.0);
        let coh = StateModel::coherent(C::new(1.0, 0.0));
        let d = check_diag_positivity(&CharFnProvider::Analytic(coh.clone()), &ys, &g).unwrap();
        for (y, v) in ys.iter().zip(&d.values) {
            assert!((v - coh.wavefunction(*y).norm_sqr()).abs() < 1e-10);
        }
        // cos(3μ)e^{−s/4} transforms into two displaced positive Gaussians on the diagonal
        let split = CharFnProvider::custom("cos3mu", |_, m, n| Ok(C::new((3.0 * m).cos() * (-(m * m + n * n) / 4.0).exp(), 0.0)));
        let d = check_diag_positivity(&split, &ys, &g).unwrap();
        assert!(d.min > -1e-12);
        for (y, v) in ys.iter().zip(&d.values) {
            let e = 0.5 * ((-(y - 3.0).powi(2)).exp() + (-(y + 3.0).powi(2)).exp()) / PI.sqrt();
            assert!((v - e).abs() < 1e-10);
        }
        // (1 + μ²/2)e^{−μ²/4} gives ρ(y,y) = (2 − 2y²)e^{−y²}/√π, negative for |y| > 1
        let bad = CharFnProvider::custom("neg", |_, m, n| Ok(C::new((1.0 + m * m / 2.0) * (-(m * m + n * n) / 4.0).exp(), 0.0)));
        let d = check_diag_positivity(&bad, &ys, &g).unwrap();
        let e = -2.0 * (-2.0f64).exp() / PI.sqrt(); // at y² = 2
        assert!((d.min - e).abs() < 1e-3, "{} vs {e}", d.min);
    }

    #[test]
    fn validate_examples() {
        let cfg = ValidatorConfig::default();
        let r = validate(&prov("ho:n=0"), &cfg);
        assert!(r.overall, "{}", r.to_json());
        let r = validate(&prov("ccat:re=2,im=0"), &cfg);
        assert!(r.overall, "{}", r.to_json());
        let r = validate(&prov("gamma:k=2,theta=1"), &cfg);
        assert!(!r.overall);
        assert!(!r.trace_check.unwrap().pass);
        let r = validate(&prov("exponential:lambda=1"), &cfg);
        let v = r.trace_check.unwrap().value;
        assert!((v[0] - 0.5).abs() < 1e-10 && (v[1] - 0.5).abs() < 1e-10);
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        for k in ["trace_check", "hermiticity_sup", "purity", "diag_min", "overall", "tolerances", "lattice"] {
            assert!(json.get(k).is_some(), "{k}");
        }
    }

    #[test]
    fn expfamily_gate_examples() {
        let cfg = ValidatorConfig::default();
        let g = expfamily_gate(Arc::new(ExpFamilySpec::builtin("gauss-eta:p1=0,p2=1").unwrap()), &cfg);
        assert!(g.overall, "{}", g.to_json());
        assert!(!g.divergence_markers.is_empty());
        let g = expfamily_gate(Arc::new(ExpFamilySpec::builtin("powerlaw:alpha=2,p=1.5").unwrap()), &cfg);
        assert!(!g.overall && !g.trace_check.unwrap().pass);
    }

    #[test]
    fn tightening_never_helps() {
        let p = prov("mix:0.9@ho:n=0|0.1@ho:n=1");
        let loose = validate(&p, &ValidatorConfig::default());
        let mut t = Tolerances::analytic();
        t.trace = 0.0;
        t.hermiticity = 0.0;
        let tight = validate(&p, &ValidatorConfig { tolerances: Some(t), ..Default::default() });
        assert!(!tight.overall || loose.overall);
    }
}
