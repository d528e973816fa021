//! Parsing of grids, frames, tolerance overrides and provider descriptors.

use std::path::Path;
use std::sync::Arc;

use tomokit::charfun::TabulatedPdf;
use tomokit::estimation::{empirical_charfn, SampleSet};
use tomokit::quadrature::AdaptiveConfig;
use tomokit::tomogram::frame_from_squeeze;
use tomokit::validator::{Grid1, Tolerances};
use tomokit::{CharFnProvider, FrameParams};

use crate::args::FrameArgs;
use crate::error::{CliError, CliResult};

fn usage(m: impl Into<String>) -> CliError {
    CliError::Usage(m.into())
}

/// `min:max:count`
pub fn parse_grid(s: &str) -> CliResult<Grid1> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(usage(format!("grid '{s}' is not min:max:count")));
    }
    let num = |v: &str| v.parse::<f64>().map_err(|_| usage(format!("grid '{s}': '{v}' is not a number")));
    let n = parts[2].parse::<usize>().map_err(|_| usage(format!("grid '{s}': count must be a positive integer")))?;
    Ok(Grid1::new(num(parts[0])?, num(parts[1])?, n)?)
}

pub fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> CliResult<Vec<T>> {
    s.split(',')
        .map(|v| v.trim().parse::<T>().map_err(|_| usage(format!("bad {what} '{v}' in '{s}'"))))
        .collect()
}

impl FrameArgs {
    pub fn given(&self) -> bool {
        self.mu.is_some() || self.nu.is_some() || self.phi.is_some() || self.squeeze.is_some()
    }

    pub fn resolve(&self, default: FrameParams) -> CliResult<FrameParams> {
        let direct = self.mu.is_some() || self.nu.is_some();
        let angular = self.phi.is_some() || self.squeeze.is_some();
        if direct && angular {
            return Err(usage("give either --mu/--nu or --phi/--squeeze, not both"));
        }
        let frame = if let Some(s) = self.squeeze {
            frame_from_squeeze(s, self.phi.unwrap_or(0.0))?
        } else if let Some(phi) = self.phi {
            FrameParams::optical(phi)
        } else if direct {
            FrameParams::new(self.mu.unwrap_or(default.mu), self.nu.unwrap_or(default.nu))
        } else {
            default
        };
        frame.check()?;
        Ok(frame)
    }
}

/// `analytic`, `empirical`, or `key=value` overrides on top of `base`.
pub fn parse_tolerances(s: &str, base: Tolerances) -> CliResult<Tolerances> {
    match s.trim() {
        "analytic" => return Ok(Tolerances::analytic()),
        "empirical" => return Ok(Tolerances::empirical()),
        _ => {}
    }
    let mut t = base;
    for item in s.split(',') {
        let (k, v) = item.split_once('=').ok_or_else(|| usage(format!("tolerance '{item}' is not key=value")))?;
        let v: f64 = v.trim().parse().map_err(|_| usage(format!("tolerance '{item}': bad number")))?;
        if !(v >= 0.0) || !v.is_finite() {
            return Err(usage(format!("tolerance '{item}' must be finite and nonnegative")));
        }
        match k.trim() {
            "trace" => t.trace = v,
            "herm" | "hermiticity" => t.hermiticity = v,
            "purity" => t.purity = v,
            "diag" => t.diag = v,
            "imag" | "diag_imag" => t.diag_imag = v,
            other => return Err(usage(format!("unknown tolerance key '{other}'"))),
        }
    }
    Ok(t)
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Sidecar location for a sample CSV.
pub fn sidecar_path(csv: &Path) -> std::path::PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".json");
    s.into()
}

pub fn load_samples(path: &Path) -> CliResult<SampleSet> {
    let csv = read(path)?;
    let meta = read(&sidecar_path(path))?;
    Ok(SampleSet::from_csv(&csv, &meta)?)
}

/// Library descriptors plus two file forms: `file:<csv>` (tabulated X,W pdf,
/// integrated numerically) and `samples:<csv>` (sample mean at the recorded frame).
pub fn provider(desc: &str) -> CliResult<CharFnProvider> {
    let desc = desc.trim();
    if let Some(path) = desc.strip_prefix("file:") {
        let pdf = TabulatedPdf::from_csv(&read(Path::new(path))?)?;
        let cfg = AdaptiveConfig { abs_tol: 1e-12, rel_tol: 1e-10, ..Default::default() };
        return Ok(CharFnProvider::Numeric { pdf: Arc::new(pdf), cfg });
    }
    if let Some(path) = desc.strip_prefix("samples:") {
        return Ok(empirical_charfn(load_samples(Path::new(path))?));
    }
    Ok(CharFnProvider::parse(desc)?)
}
