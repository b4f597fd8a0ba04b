use nalgebra::DMatrix;
use num_complex::Complex64;
use susy_feshbach::feshbach::{jost_matrix, potential_matrix, superpotential_closed_form};
use susy_feshbach::oracle::{
    integrate_jost_inward, integrate_regular_outward, jost_solution_profile, oracle_compare,
    OracleConfig, RadialGrid,
};
use susy_feshbach::scattering::{eigenphases, s_matrix, s_matrix_at};
use susy_feshbach::source::{ClosedFormSource, NumericSource};
use susy_feshbach::susy::{transform_solution, SolutionSample};
use susy_feshbach::{ChannelMomenta, FeshbachParams};

type CMatrix = DMatrix<Complex64>;

fn fig() -> FeshbachParams {
    FeshbachParams::from_physical(10.0, 7.0, 1.0).unwrap()
}

fn potential(p: FeshbachParams) -> impl Fn(f64) -> DMatrix<f64> {
    move |r| potential_matrix(&p, r).unwrap()
}

fn grid(step: f64) -> RadialGrid {
    RadialGrid::with_default_origin(12.0, step)
        .unwrap()
        .validated_for(potential(fig()))
        .unwrap()
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

fn numeric_jost(e: f64, step: f64) -> CMatrix {
    let m = ChannelMomenta::physical(&fig().channels(), e);
    integrate_jost_inward(potential(fig()), &m, &grid(step), &OracleConfig::default())
        .unwrap()
        .matrix
}

fn analytic_jost(e: f64) -> CMatrix {
    let m = ChannelMomenta::physical(&fig().channels(), e);
    jost_matrix(&fig(), &m).unwrap().matrix
}

#[test]
fn grid_validation_rejects_short_range() {
    let short = RadialGrid::with_default_origin(3.0, 1e-3).unwrap();
    assert!(short.validated_for(potential(fig())).is_err());
}

#[test]
fn jost_above_threshold() {
    let d = max_abs(&(numeric_jost(12.0, 1e-3) - analytic_jost(12.0)));
    assert!(d < 1e-6, "{d}");
}

#[test]
fn jost_below_threshold() {
    let m = ChannelMomenta::physical(&fig().channels(), 5.0);
    assert!((m.k()[1] - Complex64::new(0.0, 5f64.sqrt())).norm() < 1e-15);
    let d = max_abs(&(numeric_jost(5.0, 1e-3) - analytic_jost(5.0)));
    assert!(d < 1e-6, "{d}");
}

#[test]
fn jost_at_a_complex_momentum() {
    // near the resonance zero, off the real axis
    let p = fig();
    let m = ChannelMomenta::from_k1(&p.channels(), Complex64::new(2.6, -0.05));
    let numeric =
        integrate_jost_inward(potential(p), &m, &grid(1e-3), &OracleConfig::default()).unwrap();
    let analytic = jost_matrix(&p, &m).unwrap();
    assert!(oracle_compare(&analytic, &numeric).unwrap().max_abs < 1e-6);
}

#[test]
fn regular_solution_reconstruction() {
    let p = fig();
    let m = ChannelMomenta::physical(&p.channels(), 12.0);
    let cfg = OracleConfig::default();
    let outer = grid(1e-3);
    let f_plus = jost_solution_profile(potential(p), &m, &outer, &[6.0], &cfg).unwrap();
    let f_minus = jost_solution_profile(potential(p), &m.negated(), &outer, &[6.0], &cfg).unwrap();
    let jost_plus = integrate_jost_inward(potential(p), &m, &outer, &cfg).unwrap().matrix;
    let jost_minus = integrate_jost_inward(potential(p), &m.negated(), &outer, &cfg).unwrap().matrix;
    let k_inv = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        2,
        m.k().iter().map(|k| k.inv()),
    ));
    let reconstructed = (&f_plus[0].value * &k_inv * &jost_minus - &f_minus[0].value * &k_inv * &jost_plus)
        / Complex64::new(0.0, 2.0);

    let direct = integrate_regular_outward(
        potential(p),
        &m,
        &RadialGrid::with_default_origin(6.0, 1e-3).unwrap(),
        &cfg,
    )
    .unwrap();
    assert!(direct.reliable);
    let scale = max_abs(&direct.value);
    let d = max_abs(&(reconstructed - &direct.value));
    assert!(d < 1e-6 * scale, "{d} vs {scale}");
}

#[test]
fn transformed_free_jost_solution() {
    // f̃(k, r) = A⁻ f(k, r) [U(∞) − ik]⁻¹ with the free f = e^{ikr}
    let p = fig();
    let m = ChannelMomenta::physical(&p.channels(), 12.0);
    let r = 8.0;
    let i = Complex64::i();
    let free = SolutionSample {
        r,
        value: CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            2,
            m.k().iter().map(|k| (i * k * r).exp()),
        )),
        derivative: CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            2,
            m.k().iter().map(|k| i * k * (i * k * r).exp()),
        )),
    };
    let u = superpotential_closed_form(&p, r).unwrap();
    let mut predicted = transform_solution(&free, &u).unwrap();
    let u_inf = [-p.kappa1, p.kappa2];
    for (j, (&a, k)) in u_inf.iter().zip(m.k()).enumerate() {
        let mut col = predicted.column_mut(j);
        col /= a - i * k;
    }
    let numeric =
        jost_solution_profile(potential(p), &m, &grid(1e-3), &[r], &OracleConfig::default()).unwrap();
    assert!(max_abs(&(predicted - &numeric[0].value)) < 1e-6);
}

#[test]
fn wronskian_is_conserved() {
    let p = fig();
    let m = ChannelMomenta::physical(&p.channels(), 12.0);
    let radii: Vec<f64> = (1..=10).map(|i| 1.1 * i as f64).collect();
    let cfg = OracleConfig::default();
    let plus = jost_solution_profile(potential(p), &m, &grid(1e-3), &radii, &cfg).unwrap();
    let minus = jost_solution_profile(potential(p), &m.negated(), &grid(1e-3), &radii, &cfg).unwrap();
    let two_ik = m.diagonal() * Complex64::new(0.0, 2.0);
    for (a, b) in minus.iter().zip(&plus) {
        let w = a.value.transpose() * &b.derivative - a.derivative.transpose() * &b.value;
        let rel = max_abs(&(w - &two_ik)) / max_abs(&two_ik);
        assert!(rel < 1e-8, "r = {}: {rel}", a.r);
    }
}

#[test]
fn numeric_determinant_of_s_matches_eigenphases() {
    let p = fig();
    let numeric = NumericSource::new(p, grid(1e-3), OracleConfig::default());
    let analytic = ClosedFormSource::new(p);
    for e in [10.5, 12.0, 15.0, 19.5] {
        let s_num = s_matrix_at(&numeric, &p.channels(), e).unwrap();
        let s_ana = s_matrix_at(&analytic, &p.channels(), e).unwrap();
        let phases = eigenphases(&s_ana).unwrap();
        let expected = Complex64::new(0.0, 2.0 * (phases.delta1 + phases.delta2)).exp();
        assert!((s_num.matrix.determinant() - expected).norm() < 1e-8, "E = {e}");
    }
}

#[test]
fn numeric_s_matrix_is_unitary_and_symmetric() {
    let p = fig();
    let numeric = NumericSource::new(p, grid(1e-3), OracleConfig::default());
    for e in [0.5, 5.0, 9.9, 10.1, 14.0, 20.0] {
        let s = s_matrix_at(&numeric, &p.channels(), e).unwrap();
        assert!(s.unitarity_defect() < 1e-10, "E = {e}");
        assert!(s.symmetry_defect() < 1e-10, "E = {e}");
    }
}

#[test]
fn s_matrix_below_threshold_has_unit_modulus() {
    let p = fig();
    let m = ChannelMomenta::physical(&p.channels(), 5.0);
    let plus = jost_matrix(&p, &m).unwrap();
    let minus = jost_matrix(&p, &m.reflect_open()).unwrap();
    let s = s_matrix(&plus, &minus, &p.channels()).unwrap();
    assert_eq!(s.dim(), 1);
    assert!((s.matrix[(0, 0)].norm() - 1.0).abs() < 1e-10);
}
