//! Gauss–Legendre rules, composite panels and a bisecting adaptive integrator.
//!
//! Everything here works on complex integrands; real integrands are wrapped
//! by the callers. Semi-infinite and infinite ranges are handled by a
//! rational change of variables before the adaptive pass.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Nodes and weights of an n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Cached 16-point rule used by the composite panels.
    pub fn gl16() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(16))
    }

    fn gl12() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(12))
    }

    /// Apply the rule to [a, b].
    pub fn integrate<F: FnMut(f64) -> Complex64>(&self, a: f64, b: f64, mut f: F) -> Complex64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(mid + half * x) * *w;
        }
        acc * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite nodes/weights: `panels` equal panels of the 16-point rule on [a, b].
pub fn composite_nodes(a: f64, b: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = GaussLegendre::gl16();
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    let mut xs = Vec::with_capacity(panels * 16);
    let mut ws = Vec::with_capacity(panels * 16);
    for p in 0..panels {
        let lo = a + width * p as f64;
        let mid = lo + 0.5 * width;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            xs.push(mid + 0.5 * width * x);
            ws.push(0.5 * width * w);
        }
    }
    (xs, ws)
}

/// Tolerances and budget for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
    /// Number of equal pieces the range is cut into before refinement starts.
    pub initial_pieces: usize,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-13, rel_tol: 1e-11, max_intervals: 20_000, initial_pieces: 8 }
    }
}

/// Integration range, possibly unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Range {
    Finite(f64, f64),
    /// [a, +inf)
    UpperInfinite(f64),
    /// (-inf, +inf), centred at `center` with characteristic `scale`.
    Whole { center: f64, scale: f64 },
}

/// Adaptive integration by interval bisection with a 12-point Gauss–Legendre
/// rule; the error estimate is |I(whole) − I(left) − I(right)|.
pub fn integrate_adaptive<F>(f: F, range: Range, cfg: &AdaptiveConfig) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    match range {
        Range::Finite(a, b) => adaptive_finite(&f, a, b, cfg),
        Range::UpperInfinite(a) => {
            // x = a + t / (1 - t)
            let g = |t: f64| {
                let one_m = 1.0 - t;
                let x = a + t / one_m;
                let v = f(x);
                if v == Complex64::new(0.0, 0.0) {
                    v
                } else {
                    v / (one_m * one_m)
                }
            };
            adaptive_finite(&g, 0.0, 1.0, cfg)
        }
        Range::Whole { center, scale } => {
            // x = c + s t / (1 - t^2)
            let g = |t: f64| {
                let d = 1.0 - t * t;
                let x = center + scale * t / d;
                let v = f(x);
                if v == Complex64::new(0.0, 0.0) {
                    v
                } else {
                    v * (scale * (1.0 + t * t) / (d * d))
                }
            };
            adaptive_finite(&g, -1.0, 1.0, cfg)
        }
    }
}

/// Convenience wrapper for real integrands.
pub fn integrate_real<F>(f: F, range: Range, cfg: &AdaptiveConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate_adaptive(|x| Complex64::new(f(x), 0.0), range, cfg).map(|z| z.re)
}

fn adaptive_finite<F>(f: &F, a: f64, b: f64, cfg: &AdaptiveConfig) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let rule = GaussLegendre::gl12();
    let pieces = cfg.initial_pieces.max(1);
    let width = (b - a) / pieces as f64;

    struct Seg {
        a: f64,
        b: f64,
        val: Complex64,
    }
    let mut stack: Vec<(Seg, usize)> = Vec::new();
    for i in 0..pieces {
        let lo = a + width * i as f64;
        let hi = if i + 1 == pieces { b } else { lo + width };
        let val = rule.integrate(lo, hi, f);
        stack.push((Seg { a: lo, b: hi, val }, 0));
    }

    // Scale for the relative tolerance: a rough first pass over the whole range.
    let rough: Complex64 = stack.iter().map(|(s, _)| s.val).sum();
    let rough_abs: f64 = stack.iter().map(|(s, _)| s.val.norm()).sum();
    let scale = rough.norm().max(rough_abs * 1e-3);

    let mut total = Complex64::new(0.0, 0.0);
    let mut processed = 0usize;
    let total_len = (b - a).abs();
    while let Some((seg, depth)) = stack.pop() {
        processed += 1;
        if processed > cfg.max_intervals {
            return Err(Error::Quadrature(format!(
                "interval budget {} exhausted on [{a}, {b}]",
                cfg.max_intervals
            )));
        }
        let mid = 0.5 * (seg.a + seg.b);
        let left = rule.integrate(seg.a, mid, f);
        let right = rule.integrate(mid, seg.b, f);
        let refined = left + right;
        let err = (refined - seg.val).norm();
        let share = (seg.b - seg.a).abs() / total_len;
        let allowed = (cfg.abs_tol.max(cfg.rel_tol * scale)) * share.sqrt().max(share);
        if !refined.re.is_finite() || !refined.im.is_finite() {
            return Err(Error::Quadrature(format!("non-finite integrand near x = {mid}")));
        }
        if err <= allowed || depth > 60 || (seg.b - seg.a).abs() < 1e-15 * total_len {
            total += refined;
        } else {
            stack.push((Seg { a: seg.a, b: mid, val: left }, depth + 1));
            stack.push((Seg { a: mid, b: seg.b, val: right }, depth + 1));
        }
    }
    Ok(total)
}

/// Trapezoid sum of tabulated values on a uniform or non-uniform grid.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}
