use nalgebra::DMatrix;
use num_complex::Complex64;
use susy_feshbach::feshbach::{
    det_jost_k1, jost_matrix, potential_matrix, resonance_zeros, superpotential_closed_form,
};
use susy_feshbach::susy::{self, AsymptoticBranch};
use susy_feshbach::{ChannelMomenta, Error, FeshbachParams};

fn fig() -> FeshbachParams {
    FeshbachParams::from_physical(10.0, 7.0, 1.0).unwrap()
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.abs()))
}

fn max_abs_c(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

// 40-digit evaluation of the unreduced parameter formulas
const KAPPA1: f64 = 0.172_069_301_384_950_2;
const KAPPA2: f64 = 3.166_955_611_384_394_6;
const BETA: f64 = 0.617_100_892_731_409_6;
const ALPHA1: f64 = 0.094_430_990_170_335_01;
const ALPHA2: f64 = -1.738_013_415_533_538;

#[test]
fn reference_triple_parameters() {
    let p = fig();
    for (got, quoted, exact) in [
        (p.kappa1, 0.172069, KAPPA1),
        (p.kappa2, 3.166956, KAPPA2),
        (p.beta, 0.617101, BETA),
        (p.alpha1, 0.094433, ALPHA1),
        (p.alpha2, -1.738008, ALPHA2),
    ] {
        assert!((got - quoted).abs() < 1e-5, "{got} vs {quoted}");
        assert!((got - exact).abs() < 1e-13, "{got} vs {exact}");
    }
    assert!((p.kappa1 * p.kappa2 - 0.544936).abs() < 1e-6);
    assert!((p.beta * p.beta - 0.380814).abs() < 1e-6);
    assert!(p.kappa1 * p.kappa2 > p.beta * p.beta);
    assert!(((p.kappa2.powi(2) - p.kappa1.powi(2)) - 10.0).abs() < 1e-12 * 10.0);
    assert!(!p.above_threshold());
}

#[test]
fn reference_triple_zeros() {
    let (pole, mirror) = resonance_zeros(&fig());
    assert!((pole.k1 - Complex64::new(2.647436, -0.094432)).norm() < 1e-5);
    assert!((pole.k2 - Complex64::new(-0.143844, 1.738008)).norm() < 1e-5);
    // independently: the lower-half-plane root of 7 − 0.5i
    let root = Complex64::new(7.0, -0.5).sqrt();
    assert!((pole.k1 - root).norm() < 1e-12);
    assert!((pole.energy - Complex64::new(7.0, -0.5)).norm() < 1e-10 * 7.0);
    assert!((pole.k1 * pole.k1 - pole.k2 * pole.k2 - 10.0).norm() < 1e-10);
    assert_eq!(mirror.k1, -pole.k1.conj());
    assert_eq!(mirror.k2, -pole.k2.conj());
    assert!(det_jost_k1(&fig(), pole.k1).unwrap().norm() < 1e-12);
}

#[test]
fn potential_at_origin() {
    let v = potential_matrix(&fig(), 0.0).unwrap();
    let expected = [[0.7202, -2.0286], [-2.0286, -13.2553]];
    for i in 0..2 {
        for j in 0..2 {
            assert!((v[(i, j)] - expected[i][j]).abs() < 1e-3, "{i}{j}: {}", v[(i, j)]);
        }
    }
    // high-precision values
    assert!((v[(0, 0)] - 0.720_245_758_470_695_7).abs() < 1e-12);
    assert!((v[(0, 1)] + 2.028_512_363_938_576).abs() < 1e-12);
    assert!((v[(1, 1)] + 13.256_207_400_189_294).abs() < 1e-11);
}

#[test]
fn potential_decays_and_keeps_sign_structure() {
    for (d, e, g) in [(10.0, 7.0, 1.0), (4.0, 1.5, 0.3), (10.0, 12.0, 1.0), (1.0, 0.2, 0.05)] {
        let p = FeshbachParams::from_physical(d, e, g).unwrap();
        // diagonal entries fall off as sech²y, the coupling only as sinh y · sech²y
        let far = 30.0 / (p.kappa2 - p.kappa1);
        let v = potential_matrix(&p, far).unwrap();
        assert!(v[(0, 0)].abs() < 1e-20 && v[(1, 1)].abs() < 1e-20);
        assert!(v[(0, 1)].abs() > 1e-20);
        assert!(potential_matrix(&p, 2.0 * far).unwrap()[(0, 1)].abs() < 1e-20);
        for i in 0..=400 {
            let r = i as f64 * 0.025;
            let v = potential_matrix(&p, r).unwrap();
            assert!(v[(0, 0)] >= 0.0);
            assert!(v[(1, 1)] <= 0.0);
            assert!(v[(0, 0)] * v[(1, 1)] <= 0.0);
            assert_eq!(v[(0, 1)], v[(1, 0)]);
        }
    }
}

#[test]
fn superpotential_boundary_and_saturation() {
    let p = fig();
    let u0 = superpotential_closed_form(&p, 0.0).unwrap();
    assert!(max_abs(&(u0 - p.boundary_superpotential())) < 1e-12);
    let far = superpotential_closed_form(&p, 30.0 / (p.kappa2 - p.kappa1)).unwrap();
    let target = DMatrix::from_diagonal(&nalgebra::dvector![-p.kappa1, p.kappa2]);
    assert!(max_abs(&(far - target)) < 1e-10);
}

#[test]
fn closed_form_superpotential_matches_generic() {
    let p = fig();
    let generic = susy::superpotential(&p.transform_spec(), 1.0).unwrap();
    let closed = superpotential_closed_form(&p, 1.0).unwrap();
    assert!(max_abs(&(generic - &closed)) < 1e-10);
    assert!((closed[(0, 0)] + 0.169_136_298_019_484_34).abs() < 1e-12);
    assert!((closed[(0, 1)] - 0.135_716_810_873_567_14).abs() < 1e-12);
    assert!((closed[(1, 1)] - 3.112_973_341_498_315_5).abs() < 1e-12);
}

#[test]
fn generic_superpotential_saturates_to_degenerate_asymptote() {
    let p = fig();
    let spec = p.transform_spec();
    let asym = susy::asymptotic_superpotential(&spec).unwrap();
    assert_eq!(asym.diagonal, vec![-p.kappa1, p.kappa2]);
    assert_eq!(
        asym.branch,
        AsymptoticBranch::Degenerate {
            decaying_also_singular: true
        }
    );
    let u = susy::superpotential(&spec, 8.0).unwrap();
    assert!(max_abs(&(u - asym.matrix())) < 1e-6);
}

#[test]
fn closed_form_jost_matches_generic_transform() {
    let p = fig();
    let spec = p.transform_spec();
    for e in [12.0, 5.0, 0.3, 19.0] {
        let m = ChannelMomenta::physical(&p.channels(), e);
        let a = jost_matrix(&p, &m).unwrap();
        let b = susy::nonconservative_jost(&spec, &m).unwrap();
        assert!(max_abs_c(&(a.matrix - b.matrix)) < 1e-12, "E = {e}");
    }
}

#[test]
fn jost_matrix_reference_values() {
    let p = fig();
    let m = ChannelMomenta::physical(&p.channels(), 12.0);
    let f = jost_matrix(&p, &m).unwrap().matrix;
    let expected = [
        Complex64::new(0.996_188_028_772_039_4, 0.076_742_658_808_702_08),
        Complex64::new(-0.008_826_897_839_820_700, 0.177_703_232_461_971_5),
        Complex64::new(0.162_460_086_836_744_4, 0.072_547_040_862_502_32),
        Complex64::new(-0.291_298_883_911_126_5, -0.576_633_404_061_532_7),
    ];
    for (idx, z) in expected.iter().enumerate() {
        let (i, j) = (idx / 2, idx % 2);
        assert!((f[(i, j)] - z).norm() < 1e-12, "F{i}{j}");
    }
}

#[test]
fn decoupled_limit_is_diagonal() {
    let p = FeshbachParams::from_raw(0.5, 2.0, 0.0).unwrap();
    assert!(p.is_decoupled());
    let m = ChannelMomenta::physical(&p.channels(), 6.0);
    assert_eq!(jost_matrix(&p, &m).unwrap().max_off_diagonal(), 0.0);
    for r in [0.0, 0.5, 3.0] {
        let v = potential_matrix(&p, r).unwrap();
        assert_eq!(v[(0, 1)], 0.0);
    }
}

#[test]
fn jost_tends_to_identity_at_high_energy() {
    let p = fig();
    let m = ChannelMomenta::physical(&p.channels(), 1e8);
    let f = jost_matrix(&p, &m).unwrap().matrix;
    assert!(max_abs_c(&(f - DMatrix::<Complex64>::identity(2, 2))) < 1e-3);
}

#[test]
fn construction_errors() {
    assert!(matches!(
        FeshbachParams::from_physical(10.0, 7.0, 0.0),
        Err(Error::InvalidWidth(_))
    ));
    assert!(matches!(
        FeshbachParams::from_physical(10.0, 7.0, -1.0),
        Err(Error::InvalidWidth(_))
    ));
    assert!(matches!(
        FeshbachParams::from_physical(10.0, -1.0, 1.0),
        Err(Error::InvalidArgument(_))
    ));
    assert!(matches!(
        FeshbachParams::from_physical(0.0, 7.0, 1.0),
        Err(Error::InvalidArgument(_))
    ));
    assert!(matches!(
        FeshbachParams::from_raw(1.0, 2.0, 1.5),
        Err(Error::ConstraintViolation(_))
    ));
    assert!(FeshbachParams::from_raw(1.0, 1.0, 0.1).is_err());
}

#[test]
fn above_threshold_resonance_is_flagged() {
    let p = FeshbachParams::from_physical(10.0, 12.0, 1.0).unwrap();
    assert!(p.above_threshold());
    let (pole, _) = resonance_zeros(&p);
    assert!((pole.resonance_energy() - 12.0).abs() < 1e-10 * 12.0);
    assert!((pole.width() - 1.0).abs() < 1e-10);
}

#[test]
fn small_width_approaches_bound_state() {
    let mut last = (f64::INFINITY, f64::INFINITY);
    for g in [1.0, 0.3, 0.1, 0.03, 0.01, 0.003, 0.001] {
        let (pole, _) = resonance_zeros(&FeshbachParams::from_physical(10.0, 7.0, g).unwrap());
        let now = (pole.k1.im.abs(), pole.k2.re.abs());
        assert!(now.0 < last.0 && now.1 < last.1, "Γ = {g}");
        last = now;
    }
    let (pole, _) = resonance_zeros(&FeshbachParams::from_physical(10.0, 7.0, 1e-3).unwrap());
    assert!((pole.k1 - Complex64::new(7f64.sqrt(), 0.0)).norm() < 1e-3);
    assert!((pole.k2 - Complex64::new(0.0, 3f64.sqrt())).norm() < 1e-3);
}
