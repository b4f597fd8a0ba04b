use nalgebra::dmatrix;
use num_complex::Complex64;
use susy_feshbach::feshbach::{det_jost_k1, potential_matrix, resonance_zeros};
use susy_feshbach::oracle::{integrate_jost_inward, OracleConfig, RadialGrid};
use susy_feshbach::scattering::{
    eigenphases, energy_grid, find_det_zero, phase_scan, s_matrix_at, snap_off_thresholds,
    threshold_cusp_metric, PhaseSample, THRESHOLD_EXCLUSION,
};
use susy_feshbach::source::{ClosedFormSource, SusySource};
use susy_feshbach::susy::nonconservative_jost;
use susy_feshbach::{ChannelMomenta, Error, FeshbachParams, TransformSpec};

fn fig() -> FeshbachParams {
    FeshbachParams::from_physical(10.0, 7.0, 1.0).unwrap()
}

fn scan(params: FeshbachParams, e_min: f64, e_max: f64, points: usize) -> Vec<PhaseSample> {
    let ch = params.channels();
    let (energies, _) = snap_off_thresholds(&energy_grid(e_min, e_max, points), &ch, THRESHOLD_EXCLUSION);
    phase_scan(&ClosedFormSource::new(params), &ch, &energies).unwrap()
}

#[test]
fn s_matrix_properties_over_the_reference_scan() {
    let p = fig();
    let ch = p.channels();
    let source = ClosedFormSource::new(p);
    let (energies, moved) = snap_off_thresholds(&energy_grid(0.05, 20.0, 800), &ch, THRESHOLD_EXCLUSION);
    assert!(moved.is_empty());
    for e in energies {
        let s = s_matrix_at(&source, &ch, e).unwrap();
        if e > 10.0 {
            assert_eq!(s.dim(), 2);
            assert!(s.unitarity_defect() < 1e-10, "E = {e}");
            assert!(s.symmetry_defect() < 1e-10, "E = {e}");
            let phases = eigenphases(&s).unwrap();
            let back = phases.reconstruct();
            assert!((back - &s.matrix).iter().all(|z| z.norm() < 1e-10), "E = {e}");
        } else {
            assert_eq!(s.dim(), 1);
            assert!((s.matrix[(0, 0)].norm() - 1.0).abs() < 1e-10, "E = {e}");
        }
    }
}

#[test]
fn generic_and_closed_form_routes_give_the_same_s() {
    let p = fig();
    let ch = p.channels();
    let a = ClosedFormSource::new(p);
    let b = SusySource::new(p.transform_spec()).unwrap();
    for e in [0.4, 6.9, 10.2, 17.0] {
        let sa = s_matrix_at(&a, &ch, e).unwrap();
        let sb = s_matrix_at(&b, &ch, e).unwrap();
        assert!((sa.matrix - sb.matrix).iter().all(|z| z.norm() < 1e-12));
    }
}

#[test]
fn reference_scan_shape() {
    let out = scan(fig(), 0.05, 20.0, 800);
    assert_eq!(out.len(), 800);
    for s in &out {
        assert_eq!(s.delta2().is_some(), s.energy() > 10.0);
    }
    // δ1 rises steeply through the resonance
    let at = |e: f64| {
        out.iter()
            .min_by(|a, b| (a.energy() - e).abs().total_cmp(&(b.energy() - e).abs()))
            .unwrap()
            .delta1()
    };
    assert!(at(7.5) - at(6.5) > 1.5);
    assert!(at(9.5) > at(5.0));
    // coupling is visible above threshold
    let max_eps = out.iter().filter_map(|s| s.epsilon()).fold(0.0f64, |a, e| a.max(e.abs()));
    assert!(max_eps > 1e-3);
}

#[test]
fn decoupled_model_never_mixes() {
    let p = FeshbachParams::from_raw(0.5, 2.0, 0.0).unwrap();
    let out = scan(p, 0.05, 20.0, 400);
    let coupled: Vec<_> = out.iter().filter_map(|s| s.epsilon()).collect();
    assert!(!coupled.is_empty());
    assert!(coupled.iter().all(|&e| e == 0.0));
}

#[test]
fn cusp_at_threshold() {
    let out = scan(fig(), 0.05, 20.0, 4000);
    let samples: Vec<(f64, f64)> = out.iter().map(|s| (s.energy(), s.delta1())).collect();
    let report = threshold_cusp_metric(&samples, 10.0).unwrap();
    assert!(report.cusp, "{report:?}");
    // the slope changes sign across the threshold
    assert!(report.below.slope * report.above.slope < 0.0 || (report.below.slope - report.above.slope).abs() > 1.0, "{report:?}");
}

#[test]
fn resonance_from_analytic_determinant() {
    let p = fig();
    let report = find_det_zero(|k| det_jost_k1(&p, k), Complex64::new(2.6, -0.1), p.delta).unwrap();
    // 40-digit value of the lower-half-plane root of 7 − 0.5i
    let expected = Complex64::new(2.647_435_969_368_201_7, -0.094_430_990_170_335_01);
    assert!((report.pole.k1 - expected).norm() < 1e-6);
    assert!((report.pole.resonance_energy() - 7.0).abs() < 1e-8);
    assert!((report.pole.width() - 1.0).abs() < 1e-8);
    assert!(report.iterations < 50);
    let (closed, _) = resonance_zeros(&p);
    assert!((report.pole.k2 - closed.k2).norm() < 1e-8);
}

#[test]
fn resonance_from_numeric_determinant() {
    let p = fig();
    let grid = RadialGrid::with_default_origin(12.0, 1e-3).unwrap();
    let cfg = OracleConfig::default();
    let det = |k1: Complex64| {
        let m = ChannelMomenta::from_k1(&p.channels(), k1);
        integrate_jost_inward(|r| potential_matrix(&p, r).unwrap(), &m, &grid, &cfg)
            .map(|f| f.determinant())
    };
    // the integrated determinant only reaches ~1e-11, so converge on the step alone
    let numeric = susy_feshbach::scattering::find_det_zero_with(
        det,
        Complex64::new(2.6, -0.1),
        p.delta,
        &susy_feshbach::scattering::NewtonConfig {
            det_tolerance: 1e-9,
            step_tolerance: 1e-10,
            ..Default::default()
        },
    )
    .unwrap();
    let analytic = find_det_zero(|k| det_jost_k1(&p, k), Complex64::new(2.6, -0.1), p.delta).unwrap();
    assert!((numeric.pole.k1 - analytic.pole.k1).norm() < 1e-6);
}

#[test]
fn diagonal_cox_zero_is_exact() {
    let (k1, k2, a1, a2) = (0.8, 2.1, 0.35, 1.3);
    let spec = TransformSpec::from_kappa(&[k1, k2], dmatrix![a1, 0.0; 0.0, a2]).unwrap();
    let ch = spec.channels().clone();
    let delta = ch.threshold(1);
    let det = |k: Complex64| {
        let m = ChannelMomenta::from_k1(&ch, k);
        nonconservative_jost(&spec, &m).map(|f| f.determinant())
    };
    let r = find_det_zero(det, Complex64::new(0.02, -0.3), delta).unwrap();
    assert!((r.pole.k1 - Complex64::new(0.0, -a1)).norm() < 1e-12);
}

#[test]
fn far_seed_does_not_converge() {
    let p = fig();
    let err = find_det_zero(|k| det_jost_k1(&p, k), Complex64::new(10.0, 10.0), p.delta).unwrap_err();
    assert!(matches!(err, Error::NoConvergence { .. }), "{err:?}");
}

#[test]
fn threshold_window_is_rejected() {
    let p = fig();
    let err = s_matrix_at(&ClosedFormSource::new(p), &p.channels(), 10.0 + 1e-8).unwrap_err();
    assert!(matches!(err, Error::NearThreshold { channel: 1, .. }));
}
