use std::sync::Arc;

use serde_json::json;
use tomokit::estimation::{
    distance, histogram_estimate, kde_estimate, Bandwidth, EmpiricalCharFn, EmpiricalFamily, EstimatorConfig,
    Metric, PdfEstimate, sample_tomogram,
};
use tomokit::reconstruction::{density_matrix_grid, overlap_fidelity, purity, ReconConfig};
use tomokit::tomogram::{evaluate_grid, points_to_csv, Method, QuadratureConfig};
use tomokit::validator::{check_overlap, effective_lattice, validate, Tolerances, ValidationReport, ValidatorConfig};
use tomokit::{CharFnProvider, FrameParams, StateModel};

use crate::args::{CheckArgs, Command, EstimatorArg, Format, MethodArg, Output};
use crate::error::{CliError, CliResult};
use crate::figures;
use crate::inputs::{load_samples, parse_grid, parse_list, parse_tolerances, provider, sidecar_path};
use crate::output::{emit, json_text, write_atomic, Provenance};

const DEFAULT_FRAME: FrameParams = FrameParams { mu: 1.0, nu: 0.0 };

fn state(desc: &str) -> CliResult<StateModel> {
    Ok(desc.parse::<StateModel>()?)
}

fn format_of(o: &Output, default: Format) -> Format {
    o.format.unwrap_or(match o.out.as_ref().and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some("json") => Format::Json,
        Some("csv") => Format::Csv,
        _ => default,
    })
}

fn write(o: &Output, prov: &Provenance, fmt: Format, csv: impl FnOnce() -> String, js: serde_json::Value) -> CliResult<()> {
    let text = match fmt {
        Format::Csv => format!("{}{}", prov.csv_header(), csv()),
        Format::Json => json_text(&prov.wrap_json(js)),
    };
    emit(o.out.as_deref(), &text)
}

fn validator_config(check: &CheckArgs) -> CliResult<ValidatorConfig> {
    let mut cfg = ValidatorConfig::default();
    if let Some(g) = &check.grid {
        cfg.lattice = parse_grid(g)?;
    }
    cfg.auto_extend = !check.fixed_grid;
    Ok(cfg)
}

fn report_csv(r: &ValidationReport) -> String {
    let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    let mut s = String::from("check,value,pass\n");
    s.push_str(&format!(
        "trace_deviation,{},{}\n",
        opt(r.trace_check.map(|t| t.deviation)),
        r.trace_check.is_some_and(|t| t.pass)
    ));
    s.push_str(&format!("hermiticity_sup,{},{}\n", opt(r.hermiticity_sup), r.hermiticity_pass));
    s.push_str(&format!("purity,{},{}\n", opt(r.purity.map(|p| p.value)), r.purity.is_some_and(|p| p.pass)));
    s.push_str(&format!("diag_min,{},{}\n", opt(r.diag_min), r.diag_pass));
    s.push_str(&format!("overall,,{}\n", r.overall));
    s
}

/// Run one command; returns the process exit code.
pub fn run(cmd: &Command, argv: &[String]) -> CliResult<i32> {
    let prov = Provenance::new(argv, cmd);
    match cmd {
        Command::Tomogram { state: desc, frame, x, method, output } => {
            let model = state(desc)?;
            let f = frame.resolve(DEFAULT_FRAME)?;
            let xs = parse_grid(x)?.nodes();
            let m = match method {
                MethodArg::Auto => Method::Auto,
                MethodArg::Analytic => Method::Analytic,
                MethodArg::Numeric => Method::Numeric,
            };
            let pts = evaluate_grid(&model, &xs, &[f], m, &QuadratureConfig::default())?;
            let js = json!({ "state": model.to_string(), "frame": f, "points": pts });
            write(output, &prov, format_of(output, Format::Csv), || points_to_csv(&pts), js)?;
        }
        Command::Charfun { charfn, t, frame, grid, output } => {
            let p = provider(charfn)?;
            let (mus, nus) = match grid {
                Some(g) => {
                    if frame.given() {
                        return Err(CliError::Usage("--grid and a frame are exclusive".into()));
                    }
                    let n = parse_grid(g)?.nodes();
                    (n.clone(), n)
                }
                None => {
                    let f = frame.resolve(DEFAULT_FRAME)?;
                    (vec![f.mu], vec![f.nu])
                }
            };
            let vals = p.eval_grid(*t, &mus, &nus)?;
            let rows: Vec<(f64, f64, f64, f64)> = mus
                .iter()
                .flat_map(|&m| nus.iter().map(move |&n| (m, n)))
                .zip(&vals)
                .map(|((m, n), v)| (m, n, v.re, v.im))
                .collect();
            let csv = || {
                let mut s = String::from("t,mu,nu,re,im\n");
                for (m, n, re, im) in &rows {
                    s.push_str(&format!("{t:?},{m:?},{n:?},{re:?},{im:?}\n"));
                }
                s
            };
            let js = if rows.len() == 1 {
                let (m, n, re, im) = rows[0];
                json!({ "provider": p.label(), "t": t, "mu": m, "nu": n, "re": re, "im": im })
            } else {
                let values: Vec<[f64; 4]> = rows.iter().map(|r| [r.0, r.1, r.2, r.3]).collect();
                json!({ "provider": p.label(), "t": t, "columns": ["mu", "nu", "re", "im"], "values": values })
            };
            write(output, &prov, format_of(output, Format::Json), csv, js)?;
        }
        Command::Validate { charfn, check, y, tol, empirical, angles, n_samples, seed, output } => {
            let p = if *empirical {
                let model = state(charfn)?;
                CharFnProvider::EmpiricalFamily(Arc::new(EmpiricalFamily::sample(&model, *angles, *n_samples, *seed)?))
            } else {
                provider(charfn)?
            };
            let mut cfg = validator_config(check)?;
            if let Some(y) = y {
                cfg.y_grid = parse_grid(y)?;
            }
            if let Some(t) = tol {
                let base = if p.is_empirical() { Tolerances::empirical() } else { Tolerances::analytic() };
                cfg.tolerances = Some(parse_tolerances(t, base)?);
            }
            let report = validate(&p, &cfg);
            let js: serde_json::Value = serde_json::from_str(&report.to_json()).expect("report is JSON");
            write(output, &prov, format_of(output, Format::Json), || report_csv(&report), js)?;
            return Ok(if report.overall { 0 } else { 1 });
        }
        Command::Purity { charfn, check, output } => {
            let p = provider(charfn)?;
            let cfg = validator_config(check)?;
            let value = purity(&p, &cfg)?;
            let (lat, extended, decayed) = effective_lattice(&[&p], &cfg);
            let js = json!({
                "provider": p.label(), "purity": value,
                "lattice": lat, "auto_extended": extended, "decayed": decayed,
            });
            let csv = || format!("purity\n{value:?}\n");
            write(output, &prov, format_of(output, Format::Json), csv, js)?;
        }
        Command::Overlap { charfn, charfn2, check, output } => {
            let p1 = provider(charfn)?;
            let p2 = provider(charfn2)?;
            let cfg = validator_config(check)?;
            let fid = overlap_fidelity(&p1, &p2, &cfg)?;
            let (lat, _, _) = effective_lattice(&[&p1, &p2], &cfg);
            let q = check_overlap(&p1, &p2, &lat, &lat)?;
            let js = json!({
                "provider": p1.label(), "provider2": p2.label(),
                "fidelity": fid.value, "trace_overlap": fid.trace_overlap,
                "trace_overlap_imag": q.imag, "pure_state_overlap": fid.pure_state_overlap,
                "truncated": fid.truncated, "lattice": lat,
            });
            let csv = || {
                let pure = fid.pure_state_overlap.map(|v| v.to_string()).unwrap_or_default();
                format!("fidelity,trace_overlap,pure_state_overlap\n{},{},{pure}\n", fid.value, fid.trace_overlap)
            };
            write(output, &prov, format_of(output, Format::Json), csv, js)?;
        }
        Command::Reconstruct { charfn, grid, mu_grid, output } => {
            let p = provider(charfn)?;
            let ys = parse_grid(grid)?;
            let mut cfg = ReconConfig::default();
            if let Some(g) = mu_grid {
                cfg.mu = Some(parse_grid(g)?);
            }
            let rho = density_matrix_grid(&p, &ys, &cfg)?;
            let mut js: serde_json::Value = serde_json::from_str(&rho.to_json()).expect("grid is JSON");
            js["provider"] = json!(p.label());
            js["purity"] = json!(rho.purity());
            write(output, &prov, format_of(output, Format::Json), || rho.to_abs_csv(), js)?;
        }
        Command::Sample { state: desc, frame, n_samples, seed, out } => {
            let model = state(desc)?;
            let f = frame.resolve(DEFAULT_FRAME)?;
            if *n_samples == 0 {
                return Err(CliError::Usage("--n-samples must be positive".into()));
            }
            let set = sample_tomogram(&model, f, *n_samples, *seed)?;
            let meta = serde_json::to_value(set.meta()).expect("meta serializes");
            write_atomic(&sidecar_path(out), &json_text(&prov.wrap_json(meta)))?;
            write_atomic(out, &format!("{}{}", prov.csv_header(), set.to_csv()))?;
        }
        Command::Estimate { samples, method, bins, bandwidth, x, state: desc, output } => {
            let set = load_samples(samples)?;
            let bw = match bandwidth.trim() {
                "auto" => Bandwidth::Auto,
                v => Bandwidth::Fixed(v.parse().map_err(|_| CliError::Usage(format!("bad bandwidth '{v}'")))?),
            };
            let cfg = EstimatorConfig { bins: *bins, bandwidth: bw, range: None };
            let est = match method {
                EstimatorArg::Hist => histogram_estimate(&set, &cfg)?,
                EstimatorArg::Kde => kde_estimate(&set, &cfg)?,
            };
            let xs = match x {
                Some(g) => parse_grid(g)?.nodes(),
                None => {
                    let (a, b) = est.span();
                    (0..201).map(|i| a + (b - a) * i as f64 / 200.0).collect()
                }
            };
            let dens: Vec<f64> = xs.iter().map(|&v| est.density(v).unwrap_or(0.0)).collect();
            let phi = EmpiricalCharFn::new(set.clone()).eval(1.0, set.frame)?;
            let model = match desc.as_deref().or(set.model.as_deref()) {
                Some(d) => Some(state(d)?),
                None => None,
            };
            let (ks, l1) = match &model {
                Some(m) => {
                    let exact = PdfEstimate::analytic(m, set.frame)?;
                    let ks = distance(&PdfEstimate::empirical(&set), &exact, Metric::KS)?;
                    (Some(ks), Some(distance(&est, &exact, Metric::L1)?))
                }
                None => (None, None),
            };
            let js = json!({
                "n": set.len(), "frame": set.frame, "state": model.as_ref().map(|m| m.to_string()),
                "mean": set.mean(), "variance": set.variance(),
                "charfn_t1": [phi.re, phi.im], "ks": ks, "l1": l1,
                "X": xs, "density": dens,
            });
            let csv = || {
                let mut s = format!(
                    "# n={} mean={} variance={} charfn_t1=({},{})\n",
                    set.len(),
                    set.mean(),
                    set.variance(),
                    phi.re,
                    phi.im
                );
                if let (Some(ks), Some(l1)) = (ks, l1) {
                    s.push_str(&format!("# ks={ks} l1={l1}\n"));
                }
                s.push_str("X,density\n");
                for (x, d) in xs.iter().zip(&dens) {
                    s.push_str(&format!("{x:?},{d:?}\n"));
                }
                s
            };
            write(output, &prov, format_of(output, Format::Csv), csv, js)?;
        }
        Command::Figures { fig, n, a, frame, x, output } => {
            let f = frame.resolve(figures::FIGURE_FRAME)?;
            let xs = parse_grid(x)?.nodes();
            let curves = if *fig == 1 {
                if a.is_some() {
                    return Err(CliError::Usage("figure 1 is fixed at a = 0; --a applies to figure 2".into()));
                }
                let ns = n.as_deref().map_or(Ok(vec![0, 1, 2, 10]), |s| parse_list(s, "n"))?;
                figures::figure1(&ns, f, &xs)?
            } else {
                let ns = n.as_deref().map_or(Ok(vec![0, 1]), |s| parse_list(s, "n"))?;
                let av = a.as_deref().map_or(Ok(vec![0.0, 10.0, 100.0, 1000.0]), |s| parse_list(s, "a"))?;
                figures::figure2(&av, &ns, f, &xs)?
            };
            let js = figures::to_json(&curves);
            write(output, &prov, format_of(output, Format::Csv), || figures::to_csv(&curves), js)?;
        }
    }
    Ok(0)
}
