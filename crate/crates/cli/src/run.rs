//! Executes one resolved config and writes its output directory.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use szego_core::diagnostics::{
    boundedness_certificate, concentration_profile, conservation_drift, dominant_mode_series,
    fit_growth, profile_peak, spectral_drift, wiener_track, SobolevWeight,
};
use szego_core::dynamics::{
    integrate_full, integrate_reduced, sample_exact, RecordState, StopReason, Trajectory,
};
use szego_core::hankel::{
    numerical_rank, random_polynomial, random_rational, shifted_hankel_matrix, verify_hpi,
    verify_k_square, RANK_TOL,
};
use szego_core::hardy::HardyCoeffs;
use szego_core::reduced::{self, ExactSolutionParams, L1State};

use crate::config::{complex, pair, Check, Initial, Mode, RunConfig};
use crate::error::Result;
use crate::output::{content_hash, create_dir, write_file, OutputFile, Table};

const TRACKED_MODES: usize = 4;
const IDENTITY_SECTION: usize = 16;
const MAX_POLY_DEGREE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    NumericalAbort,
    VerificationFailure,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::NumericalAbort => 2,
            Status::VerificationFailure => 3,
        }
    }
}

/// Everything a run produces before it touches the filesystem.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub table: Option<Table>,
    pub diagnostics: Value,
    pub warnings: Vec<String>,
    pub stop: Option<StopReason>,
    pub status: Status,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: &'a RunConfig,
    pub initial_state: Option<Value>,
    pub outputs: Vec<OutputFile>,
    pub content_hash: String,
    pub warnings: &'a [String],
    pub stop: Option<Value>,
    pub status: Status,
    pub exit_code: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub status: Status,
    pub content_hash: String,
    pub warnings: Vec<String>,
}

/// Runs `cfg` and writes trajectory, diagnostics and manifest into `cfg.out`.
pub fn run(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let outcome = execute(cfg)?;
    create_dir(&cfg.out)?;

    let mut outputs = Vec::new();
    if let Some(table) = &outcome.table {
        let (text, name) = table.render(cfg.format)?;
        outputs.push(write_file(&cfg.out, name, &text)?);
    }
    let diag = serde_json::to_string_pretty(&outcome.diagnostics)? + "\n";
    outputs.push(write_file(&cfg.out, "diagnostics.json", &diag)?);
    let hash = content_hash(&outputs);

    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config: cfg,
        initial_state: cfg.l1_state().ok().flatten().map(|s| state_json(&s)),
        outputs,
        content_hash: hash.clone(),
        warnings: &outcome.warnings,
        stop: outcome.stop.map(|s| stop_json(&s)),
        status: outcome.status,
        exit_code: outcome.status.exit_code(),
    };
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    write_file(&cfg.out, "manifest.json", &text)?;

    Ok(Report {
        status: outcome.status,
        content_hash: hash,
        warnings: outcome.warnings,
    })
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.mode {
        Mode::Verify => Ok(verify(cfg)),
        Mode::Full => full(cfg),
        Mode::Reduced => {
            let s0 = cfg.l1_state()?.expect("validated rank-one datum");
            let traj = integrate_reduced(&s0, cfg.alpha, &cfg.integrator(), &cfg.record_options())?;
            Ok(trajectory_outcome(cfg, traj, Vec::new()))
        }
        Mode::Exact => {
            let params = ExactSolutionParams::new(cfg.alpha)?;
            let traj = sample_exact(&params, &cfg.integrator(), &cfg.record_options())?;
            Ok(trajectory_outcome(cfg, traj, Vec::new()))
        }
    }
}

/// `e^{2√α t_end} ≤ N/8`: the energy front stays well inside the truncation.
pub fn horizon_warning(alpha: f64, t_end: f64, n: usize) -> Option<String> {
    if alpha <= 0.0 {
        return None;
    }
    let front = (2.0 * alpha.sqrt() * t_end.abs()).exp();
    let limit = n as f64 / 8.0;
    (front > limit).then(|| {
        format!(
            "horizon: e^(2 sqrt(alpha) t_end) = {} exceeds N/8 = {}; data on the growth surface would reach the truncation",
            crate::output::float(front),
            crate::output::float(limit)
        )
    })
}

fn full(cfg: &RunConfig) -> Result<Outcome> {
    let u0 = match &cfg.initial {
        Initial::Coefficients { coeffs } => {
            let prefix: Vec<Complex64> = coeffs.iter().map(|&p| complex(p)).collect();
            HardyCoeffs::from_prefix(&prefix, cfg.n)?
        }
        _ => reduced::to_fourier(&cfg.l1_state()?.expect("rank-one datum"), cfg.n)?,
    };
    let warnings: Vec<String> = horizon_warning(cfg.alpha, cfg.t_end, cfg.n).into_iter().collect();
    let traj = integrate_full(&u0, cfg.alpha, &cfg.integrator(), &cfg.record_options())?;
    Ok(trajectory_outcome(cfg, traj, warnings))
}

fn trajectory_outcome(cfg: &RunConfig, traj: Trajectory, mut warnings: Vec<String>) -> Outcome {
    if let Some(stop) = &traj.stop {
        warnings.push(format!("run stopped early ({}) at t = {}", stop.label(), crate::output::float(stop.time())));
    }
    let diagnostics = trajectory_diagnostics(cfg, &traj);
    Outcome {
        table: Some(trajectory_table(cfg, &traj)),
        diagnostics,
        warnings,
        stop: traj.stop,
        status: if traj.stop.is_some() {
            Status::NumericalAbort
        } else {
            Status::Ok
        },
    }
}

fn trajectory_table(cfg: &RunConfig, traj: &Trajectory) -> Table {
    let mut columns = vec!["t".to_string()];
    let tracked = match cfg.mode {
        Mode::Full => {
            let count = TRACKED_MODES.min(cfg.n);
            for k in 0..count {
                columns.push(format!("u{k}_re"));
                columns.push(format!("u{k}_im"));
            }
            count
        }
        _ => {
            for name in ["b", "c", "p"] {
                columns.push(format!("{name}_re"));
                columns.push(format!("{name}_im"));
            }
            3
        }
    };
    for name in ["Q", "M", "E_alpha", "discriminant", "wiener"] {
        columns.push(name.to_string());
    }
    for &s in &cfg.s_list {
        columns.push(format!("H^{}", crate::output::float(s)));
    }

    let rows = traj
        .records
        .iter()
        .map(|rec| {
            let mut row = vec![Some(rec.t)];
            let values: Vec<Complex64> = match &rec.state {
                RecordState::Full(u) => (0..tracked).map(|k| u.mode(k)).collect(),
                RecordState::Reduced(s) => vec![s.b, s.c, s.p],
            };
            for z in values {
                row.push(Some(z.re));
                row.push(Some(z.im));
            }
            row.extend([
                Some(rec.conserved.q),
                Some(rec.conserved.m),
                Some(rec.conserved.e_alpha),
                rec.discriminant,
                Some(rec.wiener),
            ]);
            for &s in &cfg.s_list {
                row.push(rec.sobolev_at(s).map(|x| x.norm));
            }
            row
        })
        .collect();
    Table { columns, rows }
}

fn state_json(s: &L1State) -> Value {
    json!({ "b": pair(s.b), "c": pair(s.c), "p": pair(s.p) })
}

fn stop_json(stop: &StopReason) -> Value {
    let mut v = json!({ "reason": stop.label(), "t": stop.time() });
    match *stop {
        StopReason::PoleGuard { modulus, .. } => v["modulus"] = json!(modulus),
        StopReason::Stiff { dt, .. } => v["dt"] = json!(dt),
        StopReason::Underflow { .. } | StopReason::NonFinite { .. } => {}
    }
    v
}

/// Whether the datum sits on the growth surface `|disc|² = α`.
fn growth_rate_alpha(cfg: &RunConfig) -> Option<f64> {
    let s = cfg.l1_state().ok().flatten()?;
    (cfg.alpha > 0.0 && reduced::condition_gap(&s, cfg.alpha) <= reduced::condition_tolerance(cfg.alpha))
        .then_some(cfg.alpha)
}

fn trajectory_diagnostics(cfg: &RunConfig, traj: &Trajectory) -> Value {
    let records = &traj.records;
    let window = cfg.fit_window();
    let growth_alpha = growth_rate_alpha(cfg);

    let mut fits = Vec::new();
    for &s in &cfg.s_list {
        for (weight, label) in [
            (SobolevWeight::Homogeneous, "homogeneous"),
            (SobolevWeight::Inhomogeneous, "inhomogeneous"),
        ] {
            let entry = match fit_growth(records, s, window, weight) {
                Ok(fit) => {
                    let fit = match growth_alpha {
                        Some(a) => fit.with_prediction(a),
                        None => fit,
                    };
                    json!({
                        "s": s,
                        "weight": label,
                        "window": [fit.window.0, fit.window.1],
                        "slope": fit.slope,
                        "intercept": fit.intercept,
                        "r_squared": fit.r_squared,
                        "samples": fit.samples,
                        "predicted": fit.predicted,
                        "relative_error": fit.relative_error(),
                    })
                }
                Err(e) => json!({ "s": s, "weight": label, "error": e.to_string() }),
            };
            fits.push(entry);
        }
    }

    let bounded: Vec<Value> = cfg
        .s_list
        .iter()
        .filter_map(|&s| boundedness_certificate(records, s).ok().map(|c| (s, c)))
        .map(|(s, c)| json!({ "s": s, "sup_norm": c.sup_norm, "ratio_late_to_early": c.ratio_late_to_early }))
        .collect();

    let wiener = wiener_track(records);
    let (dq, dm, de) = conservation_drift(records);
    let mut diag = json!({
        "mode": cfg.mode,
        "samples": records.len(),
        "steps": { "accepted": traj.accepted_steps, "rejected": traj.rejected_steps },
        "stop": traj.stop.map(|s| stop_json(&s)),
        "conservation_drift": { "q": dq, "m": dm, "e_alpha": de },
        "growth_fits": fits,
        "boundedness": bounded,
        "wiener": { "sup": wiener.sup_wiener, "max_trace_deviation": wiener.max_trace_deviation },
    });

    let discs: Vec<f64> = records.iter().filter_map(|r| r.discriminant).collect();
    if let Some(&first) = discs.first() {
        diag["discriminant"] = json!({
            "initial": first,
            "min": discs.iter().cloned().fold(f64::INFINITY, f64::min),
            "max": discs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            "growth_condition": growth_alpha.is_some(),
        });
    }
    if let Some(drift) = spectral_drift(records) {
        diag["spectral_drift"] = json!(drift);
    }
    if cfg.mode != Mode::Reduced {
        if let Ok(series) = dominant_mode_series(records, cfg.n) {
            diag["dominant_modes"] = json!(series);
        }
        if let Some(profile) = final_profile(cfg, traj) {
            diag["profile"] = profile;
        }
    }
    if let Some(reference) = reference_error(cfg, traj) {
        diag["reference"] = reference;
    }
    diag
}

fn final_profile(cfg: &RunConfig, traj: &Trajectory) -> Option<Value> {
    let last = traj.records.last()?;
    let u = match &last.state {
        RecordState::Full(u) => u.clone(),
        RecordState::Reduced(s) => reduced::to_fourier(s, cfg.n).ok()?,
    };
    let profile = concentration_profile(&u, cfg.profile_grid);
    let (theta, value) = profile_peak(&profile)?;
    Some(json!({
        "t": last.t,
        "peak_theta": theta,
        "peak_value": value,
        "points": profile,
    }))
}

/// Distance to a closed-form trajectory when one is known: `c e^{−i|c|²t} z`
/// for `u₀ = cz`, and the explicit solution for a reduced run from z + √α.
fn reference_error(cfg: &RunConfig, traj: &Trajectory) -> Option<Value> {
    let s0 = cfg.l1_state().ok().flatten()?;
    if cfg.mode == Mode::Full && s0.b.norm() == 0.0 && s0.p.norm() == 0.0 {
        let worst = traj
            .records
            .iter()
            .filter_map(|r| r.state.as_full().map(|u| (r.t, u)))
            .map(|(t, u)| {
                let expected = s0.c * Complex64::from_polar(1.0, -s0.c.norm_sqr() * t);
                u.as_slice()
                    .iter()
                    .enumerate()
                    .map(|(k, z)| (z - if k == 1 { expected } else { Complex64::new(0.0, 0.0) }).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max);
        return Some(json!({ "kind": "phase-rotation", "max_l2_error": worst }));
    }
    if cfg.mode == Mode::Reduced && matches!(cfg.initial, Initial::GrowthDatum) {
        let params = ExactSolutionParams::new(cfg.alpha).ok()?;
        let worst = traj
            .records
            .iter()
            .filter_map(|r| r.state.as_reduced().map(|s| s.max_abs_diff(&reduced::exact_solution(&params, r.t))))
            .fold(0.0, f64::max);
        return Some(json!({ "kind": "closed-form", "max_abs_error": worst }));
    }
    None
}

fn verify(cfg: &RunConfig) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pass = true;
    let mut diag = json!({ "mode": cfg.mode, "trials": cfg.trials, "seed": cfg.seed });
    let mut warnings = Vec::new();

    for check in &cfg.checks {
        match check {
            Check::Identities => {
                let n = cfg.n.max(3 * IDENTITY_SECTION);
                if n != cfg.n {
                    warnings.push(format!("identities use n = {n} so that 3M <= n"));
                }
                let (mut hpi, mut k2) = (0.0f64, 0.0f64);
                let mut failures = 0;
                for _ in 0..cfg.trials {
                    let degree = rng.random_range(0..=MAX_POLY_DEGREE);
                    let u = random_polynomial(&mut rng, degree, n).expect("degree below n");
                    let a = verify_hpi(&u, IDENTITY_SECTION).expect("section fits");
                    let b = verify_k_square(&u, IDENTITY_SECTION).expect("section fits");
                    failures += usize::from(!(a <= cfg.hpi_tol && b <= cfg.k_square_tol));
                    hpi = hpi.max(a);
                    k2 = k2.max(b);
                }
                pass &= failures == 0;
                diag["identities"] = json!({
                    "n": n,
                    "section": IDENTITY_SECTION,
                    "max_hpi_residual": hpi,
                    "max_k_square_residual": k2,
                    "hpi_tolerance": cfg.hpi_tol,
                    "k_square_tolerance": cfg.k_square_tol,
                    "failures": failures,
                });
            }
            Check::Kronecker => {
                let mut rows = Vec::new();
                let mut mismatches = 0;
                for k in 1..=4usize {
                    let section = 4 * k;
                    let n = cfg.n.max(section);
                    let mut hits = 0;
                    for trial in 0..cfg.trials {
                        let (dn, dd) = match trial % 3 {
                            0 => (k, k),
                            1 => (k - 1, k),
                            _ => (k, rng.random_range(0..k)),
                        };
                        let symbol = random_rational(&mut rng, dn, dd);
                        let rank = symbol
                            .coefficients(n)
                            .and_then(|u| shifted_hankel_matrix(&u, section))
                            .map(|m| numerical_rank(m.matrix(), RANK_TOL));
                        if matches!(rank, Ok(r) if r == k) {
                            hits += 1;
                        }
                    }
                    mismatches += cfg.trials - hits;
                    rows.push(json!({ "k": k, "section": section, "trials": cfg.trials, "matches": hits }));
                }
                pass &= mismatches == 0;
                diag["kronecker"] = json!({ "rank_tolerance": RANK_TOL, "by_degree": rows, "mismatches": mismatches });
            }
        }
    }
    diag["passed"] = json!(pass);
    Outcome {
        table: None,
        diagnostics: diag,
        warnings,
        stop: None,
        status: if pass {
            Status::Ok
        } else {
            Status::VerificationFailure
        },
    }
}
