//! Density matrices from characteristic functions,
//! ρ(y,y′) = (1/2π) ∫ φ(1;μ,y−y′) e^{−iμ(y+y′)/2} dμ,
//! and the state functionals built on φ.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charfun::CharFnProvider;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_adaptive, AdaptiveConfig, Range};
use crate::state::StateModel;
use crate::validator::{check_overlap, decay_radius, effective_lattice, eval_lattice, fourier_row, Grid1, ValidatorConfig};

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReconConfig {
    /// μ quadrature grid; chosen from the decay of φ when absent.
    pub mu: Option<Grid1>,
    pub spacing: f64,
    pub decay_eps: f64,
    pub max_radius: f64,
}

impl Default for ReconConfig {
    fn default() -> Self {
        Self { mu: None, spacing: 0.1, decay_eps: 1e-10, max_radius: 30.0 }
    }
}

impl ReconConfig {
    /// The μ grid used for `p`, and whether φ was seen to decay within it.
    pub fn mu_grid(&self, p: &CharFnProvider) -> (Grid1, bool) {
        if let Some(g) = self.mu {
            return (g, true);
        }
        match decay_radius(&[p], 6.0, self.decay_eps, self.max_radius) {
            Some(r) => (Grid1::symmetric(r, self.spacing), true),
            None => (Grid1::symmetric(self.max_radius, self.spacing), false),
        }
    }
}

/// Kernel ρ(y_i, y_j) on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrixGrid {
    pub y_nodes: Vec<f64>,
    pub values: DMatrix<C>,
    pub dy: f64,
    /// sup |ρ(y,y′) − ρ*(y′,y)|
    pub hermiticity_defect: f64,
    /// Σ ρ(y_i,y_i) dy
    pub trace: f64,
    /// Eigenvalues of the Hermitian part of ρ·dy, descending.
    pub eigenvalues: Vec<f64>,
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
struct GridJson<'a> {
    y_nodes: &'a [f64],
    dy: f64,
    /// row-major [re, im]
    values: Vec<[f64; 2]>,
    trace: f64,
    hermiticity_defect: f64,
    eigenvalues: &'a [f64],
    warnings: &'a [String],
}

impl DensityMatrixGrid {
    fn from_matrix(y_nodes: Vec<f64>, values: DMatrix<C>, dy: f64, warnings: Vec<String>) -> Self {
        let n = y_nodes.len();
        let mut defect: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                defect = defect.max((values[(i, j)] - values[(j, i)].conj()).norm());
            }
        }
        let trace = (0..n).map(|i| values[(i, i)].re).sum::<f64>() * dy;
        let herm = (&values + values.adjoint()) * C::new(0.5 * dy, 0.0);
        let mut eigenvalues: Vec<f64> = SymmetricEigen::new(herm).eigenvalues.iter().copied().collect();
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        Self { y_nodes, values, dy, hermiticity_defect: defect, trace, eigenvalues, warnings }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Σ λ²
    pub fn purity(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l * l).sum()
    }

    pub fn sup_distance(&self, other: &DensityMatrixGrid) -> f64 {
        (&self.values - &other.values).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        let n = self.y_nodes.len();
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let z = self.values[(i, j)];
                values.push([z.re, z.im]);
            }
        }
        serde_json::to_string(&GridJson {
            y_nodes: &self.y_nodes,
            dy: self.dy,
            values,
            trace: self.trace,
            hermiticity_defect: self.hermiticity_defect,
            eigenvalues: &self.eigenvalues,
            warnings: &self.warnings,
        })
        .expect("grid serializes")
    }

    /// `y,y2,abs_rho` rows for plotting.
    pub fn to_abs_csv(&self) -> String {
        let mut s = String::from("y,y2,abs_rho\n");
        for (i, y) in self.y_nodes.iter().enumerate() {
            for (j, y2) in self.y_nodes.iter().enumerate() {
                s.push_str(&format!("{y:?},{y2:?},{:?}\n", self.values[(i, j)].norm()));
            }
        }
        s
    }
}

pub fn density_matrix_element(p: &CharFnProvider, y: f64, y2: f64, mu: &Grid1) -> Result<C> {
    let mus = mu.nodes();
    let row = eval_lattice(p, 1.0, 1.0, &mus, &[y - y2])?;
    Ok(fourier_row(&row, &mus, &mu.weights(), 0.5 * (y + y2)))
}

/// Full kernel on `ys`. φ is tabulated once per distinct y − y′ and the
/// phase factors once per distinct y + y′.
pub fn density_matrix_grid(p: &CharFnProvider, ys: &Grid1, cfg: &ReconConfig) -> Result<DensityMatrixGrid> {
    let (mu, decayed) = cfg.mu_grid(p);
    let mut warnings = Vec::new();
    if !decayed {
        warnings.push(format!(
            "φ has not decayed below {:.0e} within |μ| ≤ {}; reconstruction is truncated",
            cfg.decay_eps, cfg.max_radius
        ));
    }
    let n = ys.n;
    let dy = ys.step();
    let y = ys.nodes();
    let mus = mu.nodes();
    let w = mu.weights();
    let diffs: Vec<f64> = (0..2 * n - 1).map(|d| (d as f64 - (n - 1) as f64) * dy).collect();
    // table[d][k] = w_k φ(1; μ_k, diff_d) / 2π
    let flat = p.eval_grid(1.0, &mus, &diffs)?;
    let nd = diffs.len();
    let table: Vec<Vec<C>> = (0..nd)
        .map(|d| mus.iter().enumerate().map(|(k, _)| flat[k * nd + d] * (w[k] / (2.0 * std::f64::consts::PI))).collect())
        .collect();
    // phase[c][k] = e^{−iμ_k (y_i + y_j)/2}, c = i + j
    let phase: Vec<Vec<C>> = (0..2 * n - 1)
        .map(|c| {
            let centre = 0.5 * (2.0 * ys.min + c as f64 * dy);
            mus.iter().map(|&m| C::from_polar(1.0, -m * centre)).collect()
        })
        .collect();
    let rows: Vec<Vec<C>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    let t = &table[i + n - 1 - j];
                    let ph = &phase[i + j];
                    t.iter().zip(ph).map(|(a, b)| a * b).sum()
                })
                .collect()
        })
        .collect();
    let values = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    Ok(DensityMatrixGrid::from_matrix(y, values, dy, warnings))
}

/// Ψ(y)Ψ*(y′) on the grid.
pub fn pure_state_oracle(model: &StateModel, ys: &Grid1) -> DensityMatrixGrid {
    let y = ys.nodes();
    let psi: Vec<C> = y.iter().map(|&v| model.wavefunction(v)).collect();
    let values = DMatrix::from_fn(y.len(), y.len(), |i, j| psi[i] * psi[j].conj());
    DensityMatrixGrid::from_matrix(y, values, ys.step(), Vec::new())
}

/// Tr ρ² as the self-overlap of φ on the validator lattice.
pub fn purity(p: &CharFnProvider, cfg: &ValidatorConfig) -> Result<f64> {
    let (lat, _, _) = effective_lattice(&[p], cfg);
    Ok(check_overlap(p, p, &lat, &lat)?.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityResult {
    /// (1/2π) ∬ φ₂(1;μ,ν) φ₁(−1;−μ,−ν) dμ dν
    pub value: f64,
    /// (1/2π) ∬ φ₁(1;μ,ν) φ₂(1;−μ,−ν) dμ dν = Tr ρ₁ρ₂
    pub trace_overlap: f64,
    /// |⟨ψ₁|ψ₂⟩|² when both providers are pure catalog states.
    pub pure_state_overlap: Option<f64>,
    pub truncated: bool,
}

/// The fidelity integral evaluated as written, with two cross-checks.
pub fn overlap_fidelity(p1: &CharFnProvider, p2: &CharFnProvider, cfg: &ValidatorConfig) -> Result<FidelityResult> {
    let (lat, _, _) = effective_lattice(&[p1, p2], cfg);
    let nodes = lat.nodes();
    let a = eval_lattice(p2, 1.0, 1.0, &nodes, &nodes)?;
    let b = eval_lattice(p1, -1.0, -1.0, &nodes, &nodes)?;
    let (w, h) = (lat.weights(), lat.n);
    let mut acc = C::new(0.0, 0.0);
    let mut edge: f64 = 0.0;
    for i in 0..h {
        for j in 0..h {
            let v = a[i * h + j] * b[i * h + j];
            acc += v * (w[i] * w[j]);
            if i == 0 || j == 0 || i == h - 1 || j == h - 1 {
                edge = edge.max(v.norm());
            }
        }
    }
    let value = acc.re / (2.0 * std::f64::consts::PI);
    let trace_overlap = check_overlap(p1, p2, &lat, &lat)?.value;
    let pure = match (pure_model(p1), pure_model(p2)) {
        (Some(m1), Some(m2)) => Some(pure_overlap(m1, m2)?),
        _ => None,
    };
    Ok(FidelityResult { value, trace_overlap, pure_state_overlap: pure, truncated: edge > 1e-8 })
}

fn pure_model(p: &CharFnProvider) -> Option<&StateModel> {
    match p {
        CharFnProvider::Analytic(m) | CharFnProvider::StateOverlap(m) => Some(m),
        _ => None,
    }
}

/// |∫ ψ₁*(x) ψ₂(x) dx|²
pub fn pure_overlap(m1: &StateModel, m2: &StateModel) -> Result<f64> {
    let (a1, b1) = m1.support();
    let (a2, b2) = m2.support();
    let (lo, hi) = (a1.max(a2), b1.min(b2));
    if !(hi > lo) {
        return Ok(0.0);
    }
    let cfg = AdaptiveConfig { abs_tol: 1e-14, rel_tol: 1e-12, ..Default::default() };
    let v = integrate_adaptive(|x| m1.wavefunction(x).conj() * m2.wavefunction(x), Range::Finite(lo, hi), &cfg)
        .map_err(|e| Error::Quadrature(format!("pure-state overlap: {e}")))?;
    Ok(v.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prov(d: &str) -> CharFnProvider {
        CharFnProvider::parse(d).unwrap()
    }

    #[test]
    fn element_examples() {
        let mu = Grid1::symmetric(12.0, 0.1);
        let p = prov("ho:n=0");
        let v = density_matrix_element(&p, 0.0, 0.0, &mu).unwrap();
        assert!((v.re - 0.564_189_583_5).abs() < 1e-9 && v.im.abs() < 1e-12);
        let v = density_matrix_element(&p, 1.0, -1.0, &mu).unwrap();
        let m = StateModel::ho(0);
        let e = m.wavefunction(1.0) * m.wavefunction(-1.0).conj();
        assert!((v - e).norm() < 1e-10);
        assert!((e.re - 0.207_553_748_9).abs() < 1e-9);
        let c = prov("coh:re=1,im=0.5");
        let a = density_matrix_element(&c, 0.3, -0.8, &mu).unwrap();
        let b = density_matrix_element(&c, -0.8, 0.3, &mu).unwrap();
        assert!((a - b.conj()).norm() < 1e-12);
    }

    #[test]
    fn oracle_properties() {
        let ys = Grid1::default();
        let g = pure_state_oracle(&StateModel::ho(0), &ys);
        assert!((g.values[(60, 60)].re - 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-15);
        assert_eq!(g.hermiticity_defect, 0.0);
        assert!((g.trace - 1.0).abs() < 1e-6);
        let g = pure_state_oracle(&StateModel::crystallized_cat(C::new(1.0, 1.0)).unwrap(), &ys);
        assert!((g.trace - 1.0).abs() < 1e-6);
        assert!((g.eigenvalues[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn round_trip_against_oracle() {
        let ys = Grid1::default();
        for m in [StateModel::ho(0), StateModel::ho(1), StateModel::coherent(C::new(1.0, 0.5))] {
            let rec = density_matrix_grid(&CharFnProvider::Analytic(m.clone()), &ys, &ReconConfig::default()).unwrap();
            let ora = pure_state_oracle(&m, &ys);
            let d = rec.sup_distance(&ora);
            assert!(d < 1e-6, "{m}: {d}");
            assert!(rec.warnings.is_empty());
        }
    }

    #[test]
    fn mixture_spectrum_and_purity() {
        let ys = Grid1::default();
        let p = prov("mix:0.5@ho:n=0|0.5@ho:n=1");
        let g = density_matrix_grid(&p, &ys, &ReconConfig::default()).unwrap();
        assert!((g.eigenvalues[0] - 0.5).abs() < 1e-3 && (g.eigenvalues[1] - 0.5).abs() < 1e-3);
        assert!(g.eigenvalues[2].abs() < 1e-3);
        let pu = purity(&p, &ValidatorConfig::default()).unwrap();
        assert!((pu - 0.5).abs() < 1e-3);
        assert!((pu - g.purity()).abs() < 2e-3);
        let p = prov("mix:0.9@ho:n=0|0.1@ho:n=1");
        assert!((purity(&p, &ValidatorConfig::default()).unwrap() - 0.82).abs() < 1e-3);
        for n in [0, 3, 7] {
            let pu = purity(&prov(&format!("ho:n={n}")), &ValidatorConfig::default()).unwrap();
            assert!((pu - 1.0).abs() < 1e-3, "n={n}: {pu}");
        }
    }

    #[test]
    fn fidelity_examples() {
        let cfg = ValidatorConfig::default();
        let f = overlap_fidelity(&prov("ho:n=0"), &prov("ho:n=0"), &cfg).unwrap();
        assert!((f.value - 1.0).abs() < 1e-3);
        let f = overlap_fidelity(&prov("ho:n=0"), &prov("ho:n=1"), &cfg).unwrap();
        assert!(f.value.abs() < 1e-3);
        let f = overlap_fidelity(&prov("ho:n=0"), &prov("coh:re=1,im=0"), &cfg).unwrap();
        assert!((f.value - (-1f64).exp()).abs() < 1e-3);
        assert!((f.pure_state_overlap.unwrap() - (-1f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn printed_fidelity_is_the_parity_reflected_overlap() {
        // |⟨α|β⟩|² = e^{−|α−β|²}; the printed integral gives e^{−|α+β|²}
        let cfg = ValidatorConfig::default();
        let (a, b) = ("coh:re=0.5,im=0", "coh:re=1,im=0.3");
        let f = overlap_fidelity(&prov(a), &prov(b), &cfg).unwrap();
        let minus = (-((0.5f64 - 1.0).powi(2) + 0.09)).exp();
        let plus = (-((0.5f64 + 1.0).powi(2) + 0.09)).exp();
        assert!((f.pure_state_overlap.unwrap() - minus).abs() < 1e-9);
        assert!((f.trace_overlap - minus).abs() < 1e-6);
        assert!((f.value - plus).abs() < 1e-6);
    }

    #[test]
    fn diagonal_matches_validator_path() {
        let ys = Grid1::default();
        let p = prov("ccat:re=1.2,im=0.4");
        let mu = Grid1::symmetric(14.0, 0.1);
        let g = density_matrix_grid(&p, &ys, &ReconConfig { mu: Some(mu), ..Default::default() }).unwrap();
        let d = crate::validator::check_diag_positivity(&p, &ys.nodes(), &mu).unwrap();
        for (i, v) in d.values.iter().enumerate() {
            assert!((g.values[(i, i)].re - v).abs() < 1e-8);
        }
    }
}
