//! Randomized structural properties of the entropy and capacity
//! machinery.

use nalgebra::DMatrix;
use proptest::prelude::*;

use gausscap::gaussian_channel::GaussianChannel;
use gausscap::gaussian_state::{g_function, GaussianState};
use gausscap::onemode::{report, OneModeParams};
use gausscap::symplectic::{symplectic_spectrum, CovarianceMatrix, SymplecticForm};

/// Per-mode rotation-times-squeeze symplectic matrix in interleaved
/// (q1, p1, q2, p2, ...) ordering.
fn symplectic_blocks(angles: &[f64], squeezes: &[f64]) -> DMatrix<f64> {
    let modes = angles.len();
    let mut s = DMatrix::zeros(2 * modes, 2 * modes);
    for (j, (&t, &r)) in angles.iter().zip(squeezes).enumerate() {
        let (c, sn) = (t.cos(), t.sin());
        let rot = nalgebra::Matrix2::new(c, sn, -sn, c);
        let sq = nalgebra::Matrix2::new(r.exp(), 0.0, 0.0, (-r).exp());
        let block = rot * sq;
        s.view_mut((2 * j, 2 * j), (2, 2)).copy_from(&block);
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn g_is_nonnegative_and_increasing(x in 1e-12f64..1e6, step in 1e-9f64..1e3) {
        let a = g_function(x).unwrap();
        let b = g_function(x + step).unwrap();
        prop_assert!(a >= 0.0);
        prop_assert!(b > a);
    }

    #[test]
    fn spectrum_is_symplectic_invariant(
        ns in proptest::collection::vec(0.0f64..5.0, 1..4),
        seed_angle in 0.0f64..std::f64::consts::TAU,
        seed_squeeze in -1.0f64..1.0,
    ) {
        let modes = ns.len();
        let st = GaussianState::thermal_multi(&ns, 1.0).unwrap();
        let angles: Vec<f64> = (0..modes).map(|j| seed_angle * (j + 1) as f64).collect();
        let squeezes: Vec<f64> = (0..modes).map(|j| seed_squeeze / (j + 1) as f64).collect();
        let s = symplectic_blocks(&angles, &squeezes);
        let moved = CovarianceMatrix::new(&s * st.cov().matrix() * s.transpose()).unwrap();
        let before = symplectic_spectrum(st.cov(), st.form()).unwrap();
        let after = symplectic_spectrum(&moved, st.form()).unwrap();
        for (a, b) in before.gammas().iter().zip(after.gammas()) {
            prop_assert!((a - b).abs() < 1e-8 * a.max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn spectrum_and_entropy_add_over_direct_sums(n1 in 0.0f64..8.0, n2 in 0.0f64..8.0) {
        let joint = GaussianState::thermal_multi(&[n1, n2], 1.0).unwrap();
        let spec = symplectic_spectrum(joint.cov(), joint.form()).unwrap();
        let mut got: Vec<f64> = spec.gammas().to_vec();
        let mut want = [n1 + 0.5, n2 + 0.5];
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (g, w) in got.iter().zip(want) {
            prop_assert!((g - w).abs() < 1e-9, "{g} vs {w}");
        }
        let sum = GaussianState::thermal(n1, 1.0).unwrap().entropy().unwrap()
            + GaussianState::thermal(n2, 1.0).unwrap().entropy().unwrap();
        prop_assert!((joint.entropy().unwrap() - sum).abs() < 1e-9);
    }

    #[test]
    fn report_inequalities(k in 0.05f64..3.0, nc in 0.0f64..2.0, n in 0.01f64..20.0) {
        let rep = report(OneModeParams::new(k, nc).unwrap(), n).unwrap();
        prop_assert!(rep.c_e >= -1e-9, "c_e = {}", rep.c_e);
        prop_assert!(rep.c_e >= rep.j - 1e-9, "c_e = {} < j = {}", rep.c_e, rep.j);
        prop_assert!(rep.c_e >= rep.c1_lower - 1e-9, "assistance gain below one");
        prop_assert!(rep.h_exch >= (rep.h_in - rep.h_out).abs() - 1e-8, "triangle inequality");
        prop_assert!(rep.h_exch <= rep.h_in + rep.h_out + 1e-8, "subadditivity");
        prop_assert!(rep.q_theta >= 0.0);
        prop_assert!(rep.lambda_abs.iter().all(|&l| l >= 0.5 - 1e-9));
    }

    #[test]
    fn channel_information_ordering(k in 0.05f64..3.0, nc in 0.0f64..2.0, n in 0.01f64..10.0) {
        let ch = GaussianChannel::one_mode(k, nc, 1.0).unwrap();
        let st = GaussianState::thermal(n, 1.0).unwrap();
        let mi = ch.mutual_info(&st).unwrap();
        let ci = ch.coherent_info(&st).unwrap();
        prop_assert!(mi >= -1e-9, "mutual information negative: {mi}");
        prop_assert!(mi >= ci - 1e-9, "I = {mi} < J = {ci}");
    }

    #[test]
    fn q_theta_adds_over_direct_sums(
        k1 in 0.05f64..3.0, nc1 in 0.01f64..2.0,
        k2 in 0.05f64..3.0, nc2 in 0.01f64..2.0,
    ) {
        let a = GaussianChannel::one_mode(k1, nc1, 1.0).unwrap();
        let b = GaussianChannel::one_mode(k2, nc2, 1.0).unwrap();
        let sum = a.direct_sum(&b).unwrap().q_theta().unwrap();
        let parts = a.q_theta().unwrap() + b.q_theta().unwrap();
        prop_assert!((sum - parts).abs() < 1e-10, "{sum} vs {parts}");
    }

    #[test]
    fn one_mode_report_matches_general_pipeline(
        k in 0.1f64..2.5, nc in 0.0f64..1.5, n in 0.05f64..5.0,
    ) {
        let rep = report(OneModeParams::new(k, nc).unwrap(), n).unwrap();
        let ch = GaussianChannel::one_mode(k, nc, 1.0).unwrap();
        let st = GaussianState::thermal(n, 1.0).unwrap();
        prop_assert!((ch.mutual_info(&st).unwrap() - rep.c_e).abs() < 1e-8);
        prop_assert!((ch.coherent_info(&st).unwrap() - rep.j).abs() < 1e-8);
    }
}

/// The canonical form direct-sums consistently with the covariance: a
/// reflected-form composite still reports the same spectrum moduli.
#[test]
fn reflected_form_spectrum_moduli() {
    let st = GaussianState::thermal(1.5, 1.0).unwrap();
    let refl = st.form().reflected();
    let spec = symplectic_spectrum(st.cov(), &refl).unwrap();
    assert!((spec.gammas()[0] - 2.0).abs() < 1e-10);
    let _ = SymplecticForm::canonical(2, 1.0).unwrap();
}
