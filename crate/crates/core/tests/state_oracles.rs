#![allow(clippy::needless_range_loop)]

use std::f64::consts::PI;

use num_complex::Complex64;
use photonic_vqa::cost::vqf_outcome_map;
use photonic_vqa::mesh::{phases_for_projector, stage_four_matrix, Stage};
use photonic_vqa::state::*;
use photonic_vqa::tables::phase_table;
use proptest::prelude::*;

fn ket() -> impl Strategy<Value = Ket4> {
    prop::array::uniform8(-1.0f64..1.0)
        .prop_filter("non-zero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
        .prop_map(|v| {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            std::array::from_fn(|k| Complex64::new(v[2 * k] / n, v[2 * k + 1] / n))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Closed-form coincidence probability against the density matrix pushed
    /// through the two projection stages.
    #[test]
    fn coincidence_matches_dense_route(
        alpha in ket(), xi_i in ket(), xi_s in ket(),
        delta in prop::array::uniform4(-PI..PI), eps in 0.0f64..=1.0,
    ) {
        let state = TwoQuquartState::new(alpha, delta, eps).unwrap();
        let u_i = stage_four_matrix(&phases_for_projector(&xi_i, Stage::Idler).unwrap()).unwrap();
        let u_s = stage_four_matrix(&phases_for_projector(&xi_s, Stage::Signal).unwrap()).unwrap();
        let closed = coincidence_probability(&state, &ProjectorPair::new(xi_i, xi_s).unwrap());
        let dense = detection_probability(&state, &u_i, &u_s);
        prop_assert!((closed - dense).abs() < 1e-10);
    }

    #[test]
    fn complete_settings_conserve_probability(alpha in ket(), a in ket(), b in ket(), eps in 0.0f64..=1.0) {
        let basis = |v: Ket4| {
            let mut out = vec![v];
            for m in 1..=4 {
                let mut w = basis_ket(m);
                for u in &out {
                    let c = inner(u, &w);
                    for k in 0..4 { w[k] -= u[k] * c; }
                }
                let n = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if n > 1e-6 && out.len() < 4 { out.push(w.map(|z| z / n)); }
            }
            [out[0], out[1], out[2], out[3]]
        };
        let setting = MeasurementSetting::from_bases(&basis(a), &basis(b)).unwrap();
        prop_assert!(setting.is_complete(1e-10));
        let p = probability_tensor(&TwoQuquartState::new(alpha, [0.0; 4], eps).unwrap(), &setting);
        prop_assert!((p.sum() - 1.0).abs() < 1e-10);
        prop_assert!(p.p.iter().flatten().all(|x| *x >= -1e-15));
    }
}

#[test]
fn factoring_projector_table_realizes_relabeling() {
    let table = phase_table("vqf-projectors").unwrap();
    let map = vqf_outcome_map();
    for a in 0..4 {
        for b in 0..4 {
            let label = format!("P{}xP{}", a + 1, b + 1);
            let pair = ProjectorPair::from_phases(
                &table.phases(&format!("{label}:i"), Stage::Idler).unwrap(),
                &table.phases(&format!("{label}:s"), Stage::Signal).unwrap(),
            )
            .unwrap();
            let (r, s) = map[a][b];
            let want = ProjectorPair::new(basis_ket(r + 1), basis_ket(s + 1)).unwrap();
            assert!((pair.overlap(&want).norm() - 1.0).abs() < 1e-12, "{label}");
        }
    }
    // the relabeling is an involution, so applying it twice restores the setting
    let comp = MeasurementSetting::computational();
    assert_eq!(comp.relabeled(&map).relabeled(&map), comp);
}

#[test]
fn dephasing_keeps_populations() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let alpha = [Complex64::new(0.0, 0.0), Complex64::new(h, 0.0), Complex64::new(h, 0.0), Complex64::new(0.0, 0.0)];
    let pure = TwoQuquartState::new(alpha, [0.0; 4], 1.0).unwrap();
    let mixed = TwoQuquartState::new(alpha, [0.0; 4], 0.0).unwrap();
    let comp = MeasurementSetting::computational();
    assert_eq!(probability_tensor(&pure, &comp), probability_tensor(&mixed, &comp));
}

#[test]
fn invalid_states_are_rejected() {
    let a = [Complex64::new(1.0, 0.0); 4];
    assert!(TwoQuquartState::new(a, [0.0; 4], 1.0).is_err());
    assert!(TwoQuquartState::new(basis_ket(1), [0.0; 4], 1.5).is_err());
    assert!(TwoQuquartState::new(basis_ket(1), [f64::NAN, 0.0, 0.0, 0.0], 1.0).is_err());
}
