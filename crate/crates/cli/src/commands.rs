use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};
use susy_feshbach::feshbach::{potential_matrix, superpotential_closed_form};
use susy_feshbach::oracle::{integrate_jost_inward, jost_solution_profile, oracle_compare, OracleConfig, RadialGrid};
use susy_feshbach::scattering::{
    eigenphases, energy_grid, find_det_zero_with, phase_sample, s_matrix_at, snap_off_thresholds, unwrap_scan,
    NewtonConfig, PhaseSample, THRESHOLD_EXCLUSION,
};
use susy_feshbach::source::{ClosedFormSource, JostSource, ModelContext, SourceRegistry};
use susy_feshbach::susy::{self_wronskian, transformed_potential, RICCATI_STEP};
use susy_feshbach::{ChannelMomenta, Error};

use crate::config::{Format, Settings};
use crate::output::{complex, csv_header, csv_row, json_table, num, pretty, r12};
use crate::{core_failure, Failure, Outcome};

pub const ORACLE_TOLERANCE: f64 = 1e-6;
pub const RICCATI_TOLERANCE: f64 = 1e-7;
pub const SELF_WRONSKIAN_TOLERANCE: f64 = 1e-12;
pub const JOST_WRONSKIAN_TOLERANCE: f64 = 1e-8;
pub const UNITARITY_TOLERANCE: f64 = 1e-10;
/// Oracle energies closer than this to a threshold are moved outward.
pub const ORACLE_THRESHOLD_GAP: f64 = 0.01;

fn grid(s: &Settings) -> Result<RadialGrid, Failure> {
    let p = s.params;
    RadialGrid::with_default_origin(s.rmax, s.step)
        .and_then(|g| g.validated_for(|r| potential_matrix(&p, r).expect("radius is nonnegative")))
        .map_err(|e| Failure::Config(format!("radial grid: {e}")))
}

fn source(s: &Settings) -> Result<Box<dyn JostSource>, Failure> {
    // only the numeric route needs a grid that covers the potential
    let grid = if s.source == "numeric" {
        grid(s)?
    } else {
        RadialGrid::with_default_origin(s.rmax, s.step).map_err(core_failure)?
    };
    let ctx = ModelContext {
        params: s.params,
        grid,
        oracle: OracleConfig::default(),
    };
    SourceRegistry::default().create(&s.source, &ctx).map_err(core_failure)
}

fn only_json(s: &Settings, command: &str) -> Result<(), Failure> {
    match s.format {
        Some(Format::Csv) => Err(Failure::Config(format!("`{command}` only writes JSON"))),
        _ => Ok(()),
    }
}

fn uniform(from: f64, to: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| if i + 1 == points { to } else { from + (to - from) * i as f64 / (points - 1) as f64 })
        .collect()
}

pub fn potential(s: &Settings) -> Result<Outcome, Failure> {
    const COLUMNS: [&str; 4] = ["r", "V11", "V12", "V22"];
    let spec = (s.source == "susy").then(|| s.params.transform_spec());
    let mut notes = Vec::new();
    if spec.is_some() {
        notes.push("potential from the generic transformation formula".to_string());
    }
    let rows = uniform(0.0, s.rmax, s.points)
        .into_iter()
        .map(|r| {
            let v = match &spec {
                Some(spec) => transformed_potential(spec, r),
                None => potential_matrix(&s.params, r),
            }
            .map_err(core_failure)?;
            Ok([r, v[(0, 0)], v[(0, 1)], v[(1, 1)]])
        })
        .collect::<Result<Vec<_>, Failure>>()?;

    let text = match s.format_or(Format::Csv) {
        Format::Csv => {
            let mut out = csv_header("potential", s, &notes, &COLUMNS);
            for row in &rows {
                out += &csv_row(&row.map(|x| Some(num(x))));
            }
            out
        }
        Format::Json => json_table(
            "potential",
            s,
            &notes,
            &COLUMNS,
            rows.iter().map(|row| row.iter().map(|&x| r12(x)).collect()).collect(),
        ),
    };
    Ok(Outcome::success(text))
}

pub fn scan(s: &Settings) -> Result<Outcome, Failure> {
    const COLUMNS: [&str; 5] = ["E", "delta1", "delta2", "epsilon", "open_channel_count"];
    let channels = s.params.channels();
    let nominal = energy_grid(s.emin, s.emax, s.points);
    let (energies, moved) = snap_off_thresholds(&nominal, &channels, THRESHOLD_EXCLUSION);
    let notes: Vec<String> = moved
        .iter()
        .map(|&i| {
            format!(
                "E = {} lies within {} of a threshold and was moved to {}",
                num(nominal[i]),
                num(THRESHOLD_EXCLUSION),
                num(energies[i])
            )
        })
        .collect();

    let source = source(s)?;
    let raw = energies
        .par_iter()
        .map(|&e| s_matrix_at(source.as_ref(), &channels, e).and_then(|m| phase_sample(&m)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(core_failure)?;
    let samples = unwrap_scan(&raw).map_err(core_failure)?;

    let open = |p: &PhaseSample| match p {
        PhaseSample::Single { .. } => 1,
        PhaseSample::Coupled(_) => 2,
    };
    let text = match s.format_or(Format::Csv) {
        Format::Csv => {
            let mut out = csv_header("scan", s, &notes, &COLUMNS);
            for p in &samples {
                out += &csv_row(&[
                    Some(num(p.energy())),
                    Some(num(p.delta1())),
                    p.delta2().map(num),
                    p.epsilon().map(num),
                    Some(open(p).to_string()),
                ]);
            }
            out
        }
        Format::Json => {
            let rows = samples
                .iter()
                .map(|p| {
                    vec![
                        r12(p.energy()),
                        r12(p.delta1()),
                        p.delta2().map_or(Value::Null, r12),
                        p.epsilon().map_or(Value::Null, r12),
                        json!(open(p)),
                    ]
                })
                .collect();
            json_table("scan", s, &notes, &COLUMNS, rows)
        }
    };
    Ok(Outcome::success(text))
}

pub fn resonance(s: &Settings) -> Result<Outcome, Failure> {
    only_json(s, "resonance")?;
    if !(s.seed.im < 0.0) {
        return Err(Failure::Config(format!(
            "seed {} + {}i must lie in the lower half k1 plane",
            s.seed.re, s.seed.im
        )));
    }
    let source = source(s)?;
    let channels = s.params.channels();
    let newton = if s.source == "numeric" {
        // an integrated determinant is only accurate to ~1e-11
        NewtonConfig {
            det_tolerance: 1e-9,
            step_tolerance: 1e-10,
            ..Default::default()
        }
    } else {
        NewtonConfig::default()
    };
    let det = |k1: Complex64| {
        source
            .jost(&ChannelMomenta::from_k1(&channels, k1))
            .map(|f| f.determinant())
    };
    let delta = s.params.delta;
    match find_det_zero_with(det, s.seed, delta, &newton) {
        Ok(report) => {
            let pole = report.pole;
            let doc = json!({
                "command": "resonance",
                "config": s.echo(),
                "converged": true,
                "k1_re": r12(pole.k1.re),
                "k1_im": r12(pole.k1.im),
                "k2_re": r12(pole.k2.re),
                "k2_im": r12(pole.k2.im),
                "E_R": r12(pole.resonance_energy()),
                "Gamma": r12(pole.width()),
                "iterations": report.iterations,
                "residual": r12(report.residual),
                "above_threshold": pole.resonance_energy() > delta,
            });
            Ok(Outcome::success(pretty(&doc)))
        }
        Err(e) => {
            let (kind, iterations, residual) = match &e {
                Error::NoConvergence { iterations, residual } => ("no-convergence", Some(*iterations), Some(*residual)),
                Error::WrongSheet { .. } => ("wrong-sheet", None, None),
                _ => ("evaluation-failure", None, None),
            };
            let doc = json!({
                "command": "resonance",
                "config": s.echo(),
                "converged": false,
                "error": kind,
                "message": e.to_string(),
                "iterations": iterations,
                "residual": residual.map_or(Value::Null, r12),
            });
            Ok(Outcome::failure(pretty(&doc)))
        }
    }
}

pub fn jost(s: &Settings) -> Result<Outcome, Failure> {
    only_json(s, "jost")?;
    let energy = s
        .energy
        .ok_or_else(|| Failure::Config("`jost` needs --energy".into()))?;
    let source = source(s)?;
    let channels = s.params.channels();
    let momenta = ChannelMomenta::physical(&channels, energy);
    let f = source.jost(&momenta).map_err(core_failure)?;
    let matrix: Vec<Vec<Value>> = f
        .matrix
        .row_iter()
        .map(|row| row.iter().map(|&z| complex(z)).collect())
        .collect();
    let doc = json!({
        "command": "jost",
        "config": s.echo(),
        "model": s.model_summary(),
        "source": s.source,
        "energy": r12(energy),
        "open_channel_count": channels.open_count(energy),
        "k": momenta.k().iter().map(|&k| complex(k)).collect::<Vec<_>>(),
        "F": matrix,
        "det": complex(f.determinant()),
    });
    Ok(Outcome::success(pretty(&doc)))
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// The standard oracle energies `0.8 j`, `j = 1..=25`, kept clear of thresholds.
pub fn oracle_energies(s: &Settings) -> Vec<f64> {
    let nominal: Vec<f64> = (1..=25).map(|j| 0.8 * j as f64).collect();
    snap_off_thresholds(&nominal, &s.params.channels(), ORACLE_THRESHOLD_GAP).0
}

fn oracle_check(s: &Settings, grid: &RadialGrid) -> Value {
    let p = s.params;
    if p.is_decoupled() {
        // the closed form is the limit of a well receding to infinity; the potential it
        // leaves on the half-line is identically zero
        return json!({
            "pass": true,
            "skipped": true,
            "reason": "beta = 0: the potential vanishes identically, the closed-form Jost matrix is the limit of a well at infinity",
        });
    }
    let analytic = ClosedFormSource::new(p);
    let channels = p.channels();
    let cfg = OracleConfig::default();
    let results: Vec<(f64, Result<f64, String>)> = oracle_energies(s)
        .par_iter()
        .map(|&e| {
            let m = ChannelMomenta::physical(&channels, e);
            let d = analytic.jost(&m).and_then(|a| {
                let n = integrate_jost_inward(|r| potential_matrix(&p, r).expect("radius is nonnegative"), &m, grid, &cfg)?;
                oracle_compare(&a, &n)
            });
            (e, d.map(|r| r.max_abs).map_err(|e| e.to_string()))
        })
        .collect();

    let mut worst = (0.0_f64, f64::NAN);
    let mut pass = true;
    let entries: Vec<Value> = results
        .iter()
        .map(|(e, r)| match r {
            Ok(d) => {
                if !(*d < ORACLE_TOLERANCE) {
                    pass = false;
                }
                if *d > worst.0 || worst.1.is_nan() {
                    worst = (*d, *e);
                }
                json!({ "energy": r12(*e), "max_abs": r12(*d) })
            }
            Err(msg) => {
                pass = false;
                json!({ "energy": r12(*e), "error": msg })
            }
        })
        .collect();
    json!({
        "pass": pass,
        "tolerance": ORACLE_TOLERANCE,
        "rmax": r12(grid.r_max()),
        "step": r12(grid.step()),
        "worst_abs": r12(worst.0),
        "worst_energy": r12(worst.1),
        "energies": entries,
    })
}

fn riccati_check(s: &Settings) -> Value {
    let p = s.params;
    let u = |r: f64| superpotential_closed_form(&p, r).expect("radius is nonnegative");
    let h = RICCATI_STEP;
    let kappa2 = DMatrix::from_diagonal(&nalgebra::dvector![p.kappa1 * p.kappa1, p.kappa2 * p.kappa2]);
    let radii = uniform(2.0 * h, s.rmax, 100);
    let (worst, at) = radii
        .iter()
        .map(|&r| {
            let du = (u(r - 2.0 * h) - u(r - h) * 8.0 + u(r + h) * 8.0 - u(r + 2.0 * h)) / (12.0 * h);
            let ur = u(r);
            (max_abs(&(du + &ur * &ur - &kappa2)), r)
        })
        .fold((0.0, 0.0), |a, b| if b.0 > a.0 { b } else { a });
    json!({
        "pass": worst < RICCATI_TOLERANCE,
        "tolerance": RICCATI_TOLERANCE,
        "points": radii.len(),
        "worst": r12(worst),
        "worst_r": r12(at),
    })
}

fn wronskian_check(s: &Settings, grid: &RadialGrid) -> Value {
    let p = s.params;
    let spec = p.transform_spec();
    let self_worst = uniform(0.0, s.rmax, 100)
        .iter()
        .map(|&r| self_wronskian(&spec, r).map(|w| max_abs(&w)).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);

    // W[f(−k), f(k)] = 2ik with both channels open
    let energy = 1.2 * p.delta;
    let m = ChannelMomenta::physical(&p.channels(), energy);
    let radii: Vec<f64> = (1..=10).map(|i| s.rmax * i as f64 / 11.0).collect();
    let cfg = OracleConfig::default();
    let potential = |r: f64| potential_matrix(&p, r).expect("radius is nonnegative");
    let jost_worst = jost_solution_profile(potential, &m, grid, &radii, &cfg).and_then(|plus| {
        let minus = jost_solution_profile(potential, &m.negated(), grid, &radii, &cfg)?;
        let two_ik = m.diagonal() * Complex64::new(0.0, 2.0);
        let scale = two_ik.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
        Ok(minus
            .iter()
            .zip(&plus)
            .map(|(a, b)| {
                let w = a.value.transpose() * &b.derivative - a.derivative.transpose() * &b.value;
                (w - &two_ik).iter().fold(0.0_f64, |acc, z| acc.max(z.norm())) / scale
            })
            .fold(0.0, f64::max))
    });
    let (jost_value, jost_pass) = match jost_worst {
        Ok(w) => (r12(w), w < JOST_WRONSKIAN_TOLERANCE),
        Err(e) => (json!(e.to_string()), false),
    };
    let self_pass = self_worst < SELF_WRONSKIAN_TOLERANCE;
    json!({
        "pass": self_pass && jost_pass,
        "self_wronskian": { "pass": self_pass, "tolerance": SELF_WRONSKIAN_TOLERANCE, "worst": r12(self_worst) },
        "jost_wronskian": {
            "pass": jost_pass,
            "tolerance": JOST_WRONSKIAN_TOLERANCE,
            "energy": r12(energy),
            "worst_relative": jost_value,
        },
    })
}

struct SymmetrySummary {
    unitarity: f64,
    symmetry: f64,
    modulus: f64,
    off_diagonal: f64,
    epsilon: f64,
    failures: Vec<String>,
}

fn s_matrix_survey(s: &Settings) -> SymmetrySummary {
    let p = s.params;
    let channels = p.channels();
    let source = ClosedFormSource::new(p);
    let (energies, _) = snap_off_thresholds(&energy_grid(s.emin, s.emax, s.points), &channels, THRESHOLD_EXCLUSION);
    let per_point: Vec<Result<[f64; 5], String>> = energies
        .par_iter()
        .map(|&e| {
            let m = s_matrix_at(&source, &channels, e).map_err(|err| format!("E = {e}: {err}"))?;
            if m.dim() == 1 {
                return Ok([0.0, 0.0, (m.matrix[(0, 0)].norm() - 1.0).abs(), 0.0, 0.0]);
            }
            let eps = eigenphases(&m).map(|ph| ph.epsilon.abs()).map_err(|err| format!("E = {e}: {err}"))?;
            Ok([m.unitarity_defect(), m.symmetry_defect(), 0.0, m.max_off_diagonal(), eps])
        })
        .collect();
    let mut out = SymmetrySummary {
        unitarity: 0.0,
        symmetry: 0.0,
        modulus: 0.0,
        off_diagonal: 0.0,
        epsilon: 0.0,
        failures: Vec::new(),
    };
    for r in per_point {
        match r {
            Ok([u, sy, md, off, eps]) => {
                out.unitarity = out.unitarity.max(u);
                out.symmetry = out.symmetry.max(sy);
                out.modulus = out.modulus.max(md);
                out.off_diagonal = out.off_diagonal.max(off);
                out.epsilon = out.epsilon.max(eps);
            }
            Err(msg) => out.failures.push(msg),
        }
    }
    out
}

pub fn validate(s: &Settings) -> Result<Outcome, Failure> {
    only_json(s, "validate")?;
    let grid = grid(s)?;
    let oracle = oracle_check(s, &grid);
    let riccati = riccati_check(s);
    let wronskian = wronskian_check(s, &grid);
    let survey = s_matrix_survey(s);

    let unitarity_pass = survey.failures.is_empty()
        && survey.unitarity < UNITARITY_TOLERANCE
        && survey.symmetry < UNITARITY_TOLERANCE
        && survey.modulus < UNITARITY_TOLERANCE;
    let unitarity = json!({
        "pass": unitarity_pass,
        "tolerance": UNITARITY_TOLERANCE,
        "points": s.points,
        "worst_unitarity_defect": r12(survey.unitarity),
        "worst_symmetry_defect": r12(survey.symmetry),
        "worst_single_channel_modulus_defect": r12(survey.modulus),
        "errors": survey.failures,
    });
    let decoupled = s.params.is_decoupled();
    let diagonality = json!({
        "applicable": decoupled,
        "pass": !decoupled || (survey.off_diagonal == 0.0 && survey.epsilon == 0.0),
        "max_off_diagonal": r12(survey.off_diagonal),
        "max_abs_epsilon": r12(survey.epsilon),
    });

    let checks = [&oracle, &riccati, &wronskian, &unitarity, &diagonality];
    let pass = checks.iter().all(|c| c["pass"] == json!(true));
    let doc = json!({
        "command": "validate",
        "config": s.echo(),
        "model": s.model_summary(),
        "pass": pass,
        "checks": {
            "oracle": oracle,
            "riccati": riccati,
            "wronskian": wronskian,
            "unitarity": unitarity,
            "diagonality": diagonality,
        },
    });
    let text = pretty(&doc);
    Ok(if pass { Outcome::success(text) } else { Outcome::failure(text) })
}
