//! Scenario execution: certification, density, coordinates, classification, definiteness.

use std::collections::BTreeMap;
use std::time::Instant;

use eventloc::definiteness::ProbeOptions;
use eventloc::observables::EstimateStatus;
use eventloc::pov::certify_poincare_sectors;
use eventloc::{
    casimir_values, certify_kernel, classify_kernel, definiteness_probe, density, mean_coordinates_abc,
    mean_coordinates_moment, mean_coordinates_operator, proper_time_delay, xi_argument, BaricentricClass,
    CertificationReport, CoordinateEstimate, DefinitenessReport, Error, FourVector, HalfInt, Kernel, WaveFunction,
};
use log::{info, warn};
use serde::Serialize;
use serde_json::json;

use crate::config::{self, BuiltState, Pipeline, ScenarioConfig};
use crate::report::Report;
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    InvariantFailure,
    CertificationFailure,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::InvariantFailure => 1,
            Status::CertificationFailure => 3,
        }
    }
}

/// Named pass/fail decision with the value and threshold behind it.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, passed: value <= tolerance }
    }
}

#[derive(Clone, Debug, Serialize)]
struct CertificationSection {
    kernel: CertificationReport,
    /// Spins the state occupies; empty for translation kernels.
    occupied_spins: Vec<String>,
    occupied_isometry_residual: f64,
    contraction_ok: bool,
    isometric: bool,
}

#[derive(Clone, Debug, Serialize)]
struct DensitySection {
    nodes: usize,
    total: f64,
    state_norm: f64,
    k_space_total: f64,
    capture_fraction: f64,
    min: f64,
    max: f64,
    first_moments: Vec<f64>,
    widths: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
struct RouteDifference {
    a: String,
    b: String,
    max_difference: f64,
}

#[derive(Clone, Debug, Serialize)]
struct TimeDelaySummary {
    masses: usize,
    max_abs: f64,
    hermiticity_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
struct CoordsSection {
    routes: Vec<CoordinateEstimate<f64>>,
    skipped: Vec<String>,
    differences: Vec<RouteDifference>,
    time_delay: Option<TimeDelaySummary>,
}

#[derive(Clone, Debug, Serialize)]
struct EntrySummary {
    nu: u32,
    m: String,
    c: [f64; 2],
    j: String,
    omega: f64,
    c3: [f64; 2],
    c4: [f64; 2],
    xi: f64,
}

#[derive(Clone, Debug, Serialize)]
struct ClassifySection {
    kind: &'static str,
    class: Option<BaricentricClass>,
    mu_independent: bool,
    /// Mass at which Casimir values and `Ξ` are reported.
    reference_mass: Option<f64>,
    entries: Vec<EntrySummary>,
    irrep_residuals: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
struct DefinitenessSection {
    probe: DefinitenessReport,
    final_probability: f64,
    definite_trend: bool,
    expected: Option<bool>,
}

#[derive(Default, Serialize)]
struct Body {
    config: Option<ScenarioConfig>,
    pipelines: Vec<Pipeline>,
    state: Option<serde_json::Value>,
    certification: Option<CertificationSection>,
    density: Option<DensitySection>,
    coords: Option<CoordsSection>,
    classification: Option<ClassifySection>,
    definiteness: Option<DefinitenessSection>,
    checks: Vec<Check>,
    notes: Vec<String>,
    status: Option<Status>,
}

pub struct RunOutcome {
    pub report: Report,
    /// `(file name, contents)` for tabular exports.
    pub exports: Vec<(String, String)>,
    pub status: Status,
}

/// Runs the configured pipelines, or `only` when given.
pub fn run_scenario(config: &ScenarioConfig, only: Option<&[Pipeline]>) -> Result<RunOutcome, CliError> {
    let mut config = config.clone();
    if let Some(p) = only {
        config.pipelines = p.to_vec();
    }
    config.pipelines.sort();
    config.pipelines.dedup();
    config.validate()?;
    let mut timings = BTreeMap::new();
    let mut body = Body { config: Some(config.clone()), pipelines: config.pipelines.clone(), ..Default::default() };
    let mut exports = Vec::new();
    let tol = config.tolerances.clone();
    let wants = |p: Pipeline| config.pipelines.contains(&p);

    let t = Instant::now();
    let state = config::build_state(&config)?;
    let kernel = config::build_kernel(&config.kernel)?;
    let psi = state.psi();
    check_kernel_shape(&kernel, psi)?;
    body.state = Some(json!({
        "dimension": psi.dim(),
        "channels": psi.channels().len(),
        "grid_nodes": psi.grid().len(),
        "norm_squared": psi.norm_squared(),
    }));
    timings.insert("build", t.elapsed().as_millis() as u64);

    let needs_cert = wants(Pipeline::Certify) || wants(Pipeline::Density) || wants(Pipeline::Coords) || wants(Pipeline::Definiteness);
    let mut status = Status::Ok;
    let mut isometric = false;
    if needs_cert {
        let t = Instant::now();
        let masses = config::certification_masses(&config, psi.grid());
        let section = certify(&kernel, psi, &masses, &tol);
        body.checks.push(Check::at_most("contraction", section.kernel.max_operator_norm - 1.0, tol.contraction));
        isometric = section.isometric;
        if !section.contraction_ok {
            warn!("kernel violates the contraction bound: ‖K‖ = {}", section.kernel.max_operator_norm);
            body.notes.push("kernel is not a contraction; no density computed".into());
            status = Status::CertificationFailure;
        }
        body.certification = Some(section);
        timings.insert("certify", t.elapsed().as_millis() as u64);
    }

    if status == Status::Ok && (wants(Pipeline::Density) || wants(Pipeline::Coords)) {
        let t = Instant::now();
        let x = config::spacetime_grid(config.spacetime_grid.as_ref().expect("validated"))?;
        let field = density(psi, &kernel, &x)?;
        let s = DensitySection {
            nodes: x.len(),
            total: field.total(),
            state_norm: field.state_norm(),
            k_space_total: field.k_space_total(),
            capture_fraction: field.capture_fraction(),
            min: field.min(),
            max: field.max(),
            first_moments: field.first_moments(),
            widths: field.widths(),
        };
        info!("density: total {:.12} of {:.12}, capture {:.6}", s.total, s.state_norm, s.capture_fraction);
        body.checks.push(Check::at_most("boundedness", s.total - s.state_norm, tol.boundedness));
        body.checks.push(Check::at_most("positivity", (-s.min).max(0.0), tol.boundedness));
        if isometric && s.capture_fraction >= tol.capture_min {
            body.checks.push(Check::at_most("normalization", (s.total - s.state_norm).abs(), tol.normalization));
        } else {
            body.notes.push("normalization not judged: kernel not isometric or density not captured".into());
        }
        if let Some(y) = &config.checks.translation_shift {
            let y = FourVector::new(y)?;
            let shifted = density(&psi.apply_translation(&y)?, &kernel, &x.shifted(&y)?)?;
            let err = shifted.values().iter().zip(field.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            body.checks.push(Check::at_most("translation_covariance", err, tol.covariance));
        }
        if config.output.csv {
            exports.push(("density.csv".to_string(), field.to_csv()));
        }
        timings.insert("density", t.elapsed().as_millis() as u64);

        if wants(Pipeline::Coords) && !isometric {
            body.notes.push("coordinate routes need a kernel isometric on the occupied sectors".into());
            status = Status::CertificationFailure;
        } else if wants(Pipeline::Coords) {
            let t = Instant::now();
            let section = coordinates(&kernel, psi, &field, &config, &mut body.checks)?;
            if config.output.csv {
                exports.push(("coords.csv".to_string(), coords_csv(&section)));
            }
            body.coords = Some(section);
            timings.insert("coords", t.elapsed().as_millis() as u64);
        }
        body.density = Some(s);
    }

    if wants(Pipeline::Classify) {
        body.classification = Some(classify(&kernel, &config));
    }

    if status == Status::Ok && wants(Pipeline::Definiteness) {
        let t = Instant::now();
        let BuiltState::Family(fam, _) = &state else { unreachable!("validated") };
        let def = config.definiteness.as_ref().expect("validated");
        let mut opts = ProbeOptions::new(def.window.clone());
        opts.region_panels = def.region_panels;
        opts.region_order = def.region_order;
        opts.window_panels = def.window_panels;
        opts.window_order = def.window_order;
        opts.noise = tol.definiteness_noise;
        opts.offsets = def.offsets.clone();
        opts.spin = HalfInt::from_f64(def.spin)?;
        let region = (def.region_min.clone(), def.region_max.clone());
        let probe = definiteness_probe(&kernel, fam, &region, &def.schedule, &opts)?;
        let final_probability = *probe.probabilities.last().unwrap_or(&0.0);
        let definite_trend = probe.monotone && final_probability > tol.final_probability;
        if let Some(e) = def.expect_definite {
            body.checks.push(Check {
                name: "definiteness_expectation".into(),
                value: final_probability,
                tolerance: tol.final_probability,
                passed: e == definite_trend,
            });
        }
        if config.output.csv {
            exports.push(("definiteness.csv".to_string(), probe.to_csv()));
        }
        body.definiteness = Some(DefinitenessSection { probe, final_probability, definite_trend, expected: def.expect_definite });
        timings.insert("definiteness", t.elapsed().as_millis() as u64);
    }

    if status == Status::Ok && body.checks.iter().any(|c| !c.passed) {
        status = Status::InvariantFailure;
    }
    for c in body.checks.iter().filter(|c| !c.passed) {
        warn!("check {} failed: {:e} > {:e}", c.name, c.value, c.tolerance);
    }
    body.status = Some(status);
    let body = serde_json::to_value(&body).map_err(|e| CliError::Io(e.to_string()))?;
    let meta = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "threads": rayon::current_num_threads(),
        "elapsed_ms": timings,
    });
    Ok(RunOutcome { report: Report::new(&config.name, body, meta), exports, status })
}

fn check_kernel_shape(kernel: &Kernel<f64>, psi: &WaveFunction<f64>) -> Result<(), CliError> {
    let (cols, name) = match kernel {
        Kernel::Translation(k) => (k.n_sigma(), "translation"),
        Kernel::Poincare(k) => (k.n_sigma(), "poincare"),
    };
    let need = match kernel {
        Kernel::Translation(_) => psi.channels().len(),
        Kernel::Poincare(_) => psi.channels().channels().iter().map(|c| c.sigma as usize + 1).max().unwrap_or(0),
    };
    if cols < need {
        return Err(CliError::Config(format!("{name} kernel has {cols} columns, the state needs {need}")));
    }
    Ok(())
}

fn certify(kernel: &Kernel<f64>, psi: &WaveFunction<f64>, masses: &[f64], tol: &config::Tolerances) -> CertificationSection {
    let report = certify_kernel(kernel, masses);
    let (spins, occupied) = match kernel {
        Kernel::Translation(_) => (vec![], report.isometry_residual),
        Kernel::Poincare(k) => {
            let spins = psi.channels().spins();
            let r = certify_poincare_sectors(k, masses, &spins);
            (spins.iter().map(|j| j.to_string()).collect(), r.isometry_residual)
        }
    };
    CertificationSection {
        contraction_ok: report.max_operator_norm <= 1.0 + tol.contraction,
        isometric: occupied <= tol.isometry,
        kernel: report,
        occupied_spins: spins,
        occupied_isometry_residual: occupied,
    }
}

fn coordinates(
    kernel: &Kernel<f64>,
    psi: &WaveFunction<f64>,
    field: &eventloc::DensityField<f64>,
    config: &ScenarioConfig,
    checks: &mut Vec<Check>,
) -> Result<CoordsSection, CliError> {
    let tol = &config.tolerances;
    let mut routes = Vec::new();
    let mut skipped = Vec::new();
    let moment = mean_coordinates_moment(field);
    let moment_ok = moment.diagnostics.status == EstimateStatus::Ok
        && moment.diagnostics.capture_fraction.unwrap_or(0.0) >= tol.capture_min;
    if !moment_ok {
        skipped.push("moment route excluded from agreement: density not captured".into());
    }
    routes.push(moment);
    let d = psi.dim();
    let abc_applies = matches!(kernel, Kernel::Translation(_)) || d == 4;
    if abc_applies {
        routes.push(mean_coordinates_abc(psi, kernel)?);
    } else {
        skipped.push(format!("abc route needs d = 4 for Poincaré kernels, got {d}"));
    }
    match mean_coordinates_operator(psi, kernel) {
        Ok(e) => routes.push(e),
        Err(e @ (Error::KernelNotQuasiBaricentric | Error::UnsupportedDimension(_))) => skipped.push(format!("operator route: {e}")),
        Err(e) => return Err(e.into()),
    }
    let mut differences = Vec::new();
    for i in 0..routes.len() {
        for j in i + 1..routes.len() {
            let diff = routes[i].max_difference(&routes[j]);
            let name = |r: &CoordinateEstimate<f64>| format!("{:?}", r.route).to_lowercase();
            differences.push(RouteDifference { a: name(&routes[i]), b: name(&routes[j]), max_difference: diff });
            let involves_moment = i == 0;
            if !involves_moment || moment_ok {
                checks.push(Check::at_most(&format!("route_agreement_{}_{}", name(&routes[i]), name(&routes[j])), diff, tol.route_agreement));
            }
        }
    }
    let masses = config::time_delay_masses(config, psi.grid());
    let time_delay = if masses.len() >= 3 {
        let td = proper_time_delay(kernel, &masses)?;
        let s = TimeDelaySummary { masses: masses.len(), max_abs: td.max_abs(), hermiticity_residual: td.hermiticity_residual() };
        checks.push(Check::at_most("time_delay_hermiticity", s.hermiticity_residual, tol.hermiticity));
        Some(s)
    } else {
        None
    };
    Ok(CoordsSection { routes, skipped, differences, time_delay })
}

fn coords_csv(s: &CoordsSection) -> String {
    let d = s.routes.first().map_or(0, |r| r.values.len());
    let mut out = String::from("route");
    for a in 0..d {
        out.push_str(&format!(",re{a},im{a}"));
    }
    out.push('\n');
    for r in &s.routes {
        out.push_str(&format!("{:?}", r.route).to_lowercase());
        for v in &r.values {
            out.push_str(&format!(",{:e},{:e}", v.re, v.im));
        }
        out.push('\n');
    }
    out
}

fn classify(kernel: &Kernel<f64>, config: &ScenarioConfig) -> ClassifySection {
    match kernel {
        Kernel::Translation(k) => ClassifySection {
            kind: "translation",
            class: None,
            mu_independent: k.is_mu_independent(),
            reference_mass: None,
            entries: vec![],
            irrep_residuals: vec![],
        },
        Kernel::Poincare(k) => {
            let center = match &config.state {
                config::StateConfig::Packet { envelope, .. } | config::StateConfig::Family { envelope, .. } => &envelope.center,
            };
            let mu = FourVector::new(center).ok().and_then(|v| v.mass().ok());
            let entries = k
                .entries()
                .iter()
                .map(|e| {
                    let m = mu.unwrap_or(1.0);
                    let cv = casimir_values(m, e.j, &e.gamma.irrep);
                    EntrySummary {
                        nu: e.gamma.nu,
                        m: e.gamma.irrep.m.to_string(),
                        c: [e.gamma.irrep.c.re, e.gamma.irrep.c.im],
                        j: e.j.to_string(),
                        omega: e.omega,
                        c3: [cv.c3.re, cv.c3.im],
                        c4: [cv.c4.re, cv.c4.im],
                        xi: xi_argument(m, e.j, &e.gamma.irrep),
                    }
                })
                .collect();
            ClassifySection {
                kind: "poincare",
                class: Some(classify_kernel(k)),
                mu_independent: k.is_mu_independent(),
                reference_mass: mu,
                entries,
                irrep_residuals: k.groups().iter().map(|g| g.irrep.certify().max_residual()).collect(),
            }
        }
    }
}
