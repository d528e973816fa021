//! Curves behind the two tomogram figures: PHO at a = 0 for several n, and
//! PHO for growing a next to the oscillator.

use serde::Serialize;
use tomokit::quadrature::trapezoid;
use tomokit::tomogram::{evaluate_grid, Method, QuadratureConfig};
use tomokit::{FrameParams, Result, StateModel};

/// The figures do not state their frame; this one is used unless overridden.
pub const FIGURE_FRAME: FrameParams = FrameParams { mu: 1.0, nu: 0.3 };

/// Local maxima lower than this fraction of the peak are not counted. For
/// ν ≠ 0 the a = 0 tomograms carry small tail oscillations.
pub const PROMINENCE: f64 = 1e-2;

#[derive(Debug, Clone, Serialize)]
pub struct Curve {
    /// `pho` or `ho`
    pub kind: &'static str,
    pub a: Option<f64>,
    pub n: usize,
    pub frame: FrameParams,
    pub xs: Vec<f64>,
    pub ws: Vec<f64>,
}

impl Curve {
    pub fn compute(model: &StateModel, frame: FrameParams, xs: &[f64]) -> Result<Self> {
        let pts = evaluate_grid(model, xs, &[frame], Method::Auto, &QuadratureConfig::default())?;
        let (kind, a, n) = match *model {
            StateModel::Pho { a, n, .. } => ("pho", Some(a), n),
            StateModel::Ho { n } => ("ho", None, n),
            _ => ("state", None, 0),
        };
        Ok(Self { kind, a, n, frame, xs: xs.to_vec(), ws: pts.iter().map(|p| p.w).collect() })
    }

    /// X of the global maximum.
    pub fn mode(&self) -> f64 {
        let i = self.ws.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map_or(0, |(i, _)| i);
        self.xs[i]
    }

    /// Interior local maxima above `PROMINENCE` times the peak.
    pub fn maxima(&self) -> usize {
        let w = &self.ws;
        let peak = w.iter().copied().fold(0.0, f64::max);
        (1..w.len().saturating_sub(1))
            .filter(|&i| w[i] > w[i - 1] && w[i] >= w[i + 1] && w[i] > PROMINENCE * peak)
            .count()
    }

    pub fn mass(&self) -> f64 {
        trapezoid(&self.xs, &self.ws)
    }

    pub fn min(&self) -> f64 {
        self.ws.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn label(&self) -> String {
        match self.a {
            Some(a) => format!("{} a={a} n={}", self.kind, self.n),
            None => format!("{} n={}", self.kind, self.n),
        }
    }
}

pub fn figure1(ns: &[usize], frame: FrameParams, xs: &[f64]) -> Result<Vec<Curve>> {
    ns.iter().map(|&n| Curve::compute(&StateModel::pho(0.0, n, 1.0)?, frame, xs)).collect()
}

/// For each n: PHO at every a, then the oscillator.
pub fn figure2(a_values: &[f64], ns: &[usize], frame: FrameParams, xs: &[f64]) -> Result<Vec<Curve>> {
    let mut out = Vec::new();
    for &n in ns {
        for &a in a_values {
            out.push(Curve::compute(&StateModel::pho(a, n, 1.0)?, frame, xs)?);
        }
        out.push(Curve::compute(&StateModel::ho(n), frame, xs)?);
    }
    Ok(out)
}

/// Long format `curve,a,n,mu,nu,X,W`, with a summary comment per curve.
pub fn to_csv(curves: &[Curve]) -> String {
    let mut s = String::new();
    for c in curves {
        s.push_str(&format!(
            "# {}: mass={:.9} mode={} maxima={} min={:e}\n",
            c.label(),
            c.mass(),
            c.mode(),
            c.maxima(),
            c.min()
        ));
    }
    s.push_str("curve,a,n,mu,nu,X,W\n");
    for c in curves {
        let a = c.a.map(|a| a.to_string()).unwrap_or_default();
        for (x, w) in c.xs.iter().zip(&c.ws) {
            s.push_str(&format!("{},{a},{},{:?},{:?},{x:?},{w:?}\n", c.kind, c.n, c.frame.mu, c.frame.nu));
        }
    }
    s
}

pub fn to_json(curves: &[Curve]) -> serde_json::Value {
    let items: Vec<serde_json::Value> = curves
        .iter()
        .map(|c| {
            serde_json::json!({
                "curve": c.kind, "a": c.a, "n": c.n, "frame": c.frame,
                "mass": c.mass(), "mode": c.mode(), "maxima": c.maxima(), "min": c.min(),
                "X": c.xs, "W": c.ws,
            })
        })
        .collect();
    serde_json::json!({ "prominence": PROMINENCE, "curves": items })
}
