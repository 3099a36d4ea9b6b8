use std::f64::consts::PI;

use num_complex::Complex64;
use photonic_vqa::mesh::*;
use photonic_vqa::state::inner;
use proptest::prelude::*;

fn angle() -> impl Strategy<Value = f64> {
    -PI..PI
}

fn ket() -> impl Strategy<Value = [Complex64; 4]> {
    prop::array::uniform8(-1.0f64..1.0)
        .prop_filter("non-zero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
        .prop_map(|v| {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            std::array::from_fn(|k| Complex64::new(v[2 * k] / n, v[2 * k + 1] / n))
        })
}

proptest! {
    #[test]
    fn stages_are_unitary(t in prop::array::uniform3(angle()), p in prop::array::uniform4(angle())) {
        let pump = PhaseVector::new(t, p, Stage::Pump).unwrap();
        let idler = PhaseVector::new(t, p, Stage::Idler).unwrap();
        prop_assert!(stage_one_matrix(&pump).unwrap().unitarity_error() < 1e-12);
        prop_assert!(stage_four_matrix(&idler).unwrap().unitarity_error() < 1e-12);
    }

    #[test]
    fn mzi_is_unitary_for_both_arms(theta in -10.0f64..10.0) {
        for sign in [ArmSign::Plus, ArmSign::Minus] {
            prop_assert!(mzi_unitary(theta, sign).unwrap().unitarity_error() < 1e-12);
        }
    }

    #[test]
    fn block_is_phase_stripped_mzi(theta in angle()) {
        for sign in [ArmSign::Plus, ArmSign::Minus] {
            let s = sign.value();
            let m = mzi_unitary(2.0 * s * theta, sign).unwrap();
            let phase = Complex64::i() * Complex64::from_polar(1.0, theta);
            let stripped = ComplexMatrix::from_fn(2, 2, |r, c| m.get(r, c) / phase);
            prop_assert!(stripped.max_abs_diff(&mzi_block(theta)) < 1e-12);
        }
    }

    #[test]
    fn projector_round_trip(beta in ket(), signal in any::<bool>()) {
        let stage = if signal { Stage::Signal } else { Stage::Idler };
        let xi = projector_vector(&phases_for_projector(&beta, stage).unwrap()).unwrap();
        prop_assert!(1.0 - inner(&beta, &xi).norm_sqr() < 1e-9);
    }

    #[test]
    fn prepared_amplitudes_are_normalized(t in prop::array::uniform3(angle()), p in prop::array::uniform4(angle())) {
        let a = amplitudes_from_phases(&PhaseVector::new(t, p, Stage::Pump).unwrap()).unwrap();
        prop_assert!((a.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn canonical_angle_range_and_equivalence(x in -100.0f64..100.0) {
        let y = canonical_angle(x);
        prop_assert!(y > -PI && y <= PI);
        prop_assert!(((x - y) / (2.0 * PI)).fract().abs() < 1e-9 || (1.0 - ((x - y) / (2.0 * PI)).fract().abs()) < 1e-9);
    }

    #[test]
    fn calibration_fit_recovers_curve(w in 0.05f64..0.3, t0 in -1.4f64..1.4, plus in any::<bool>()) {
        let sign = if plus { 1.0 } else { -1.0 };
        let truth = CalibrationCurve { w_ps: w, theta0: t0, sign };
        let samples: Vec<(f64, f64)> = (0..60).map(|k| {
            let x = 40.0 * k as f64 / 59.0;
            (x, truth.intensity_at_phase(w * x + t0))
        }).collect();
        let fit = fit_calibration(&samples, sign).unwrap();
        prop_assert!(fit.residual_rms < 1e-6);
        prop_assert!((fit.curve.w_ps - w).abs() < 1e-6);
    }
}

#[test]
fn wrong_stage_tags_are_rejected() {
    let p = PhaseVector::new([0.0; 3], [0.0; 4], Stage::Idler).unwrap();
    assert!(stage_one_matrix(&p).is_err());
    let q = PhaseVector::new([0.0; 3], [0.0; 4], Stage::Pump).unwrap();
    assert!(stage_four_matrix(&q).is_err());
    assert!(PhaseVector::new([f64::NAN, 0.0, 0.0], [0.0; 4], Stage::Pump).is_err());
}
