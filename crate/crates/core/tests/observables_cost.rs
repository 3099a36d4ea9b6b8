use num_complex::Complex64;
use photonic_vqa::cost::*;
use photonic_vqa::observables::*;
use photonic_vqa::state::TwoQuquartState;
use photonic_vqa::tables::h2_grid;
use proptest::prelude::*;

fn ket() -> impl Strategy<Value = [Complex64; 4]> {
    prop::array::uniform8(-1.0f64..1.0)
        .prop_filter("non-zero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
        .prop_map(|v| {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            std::array::from_fn(|k| Complex64::new(v[2 * k] / n, v[2 * k + 1] / n))
        })
}

#[test]
fn groups_partition_and_commute() {
    for r in h2_grid() {
        let obs = load_h2_table(r).unwrap();
        let groups = group_commuting(&obs).unwrap();
        let mut seen: Vec<usize> = groups.iter().flat_map(|g| g.member_indices.clone()).collect();
        seen.sort();
        assert_eq!(seen, (0..obs.len()).collect::<Vec<_>>());
        for g in &groups {
            for &a in &g.member_indices {
                for &b in &g.member_indices {
                    assert!(obs.terms[a].string.commutes_per_photon(&obs.terms[b].string));
                }
            }
        }
    }
}

#[test]
fn every_grid_point_uses_two_settings() {
    for r in h2_grid() {
        assert_eq!(CostModel::h2(r).unwrap().settings().len(), 2, "R = {r}");
    }
}

#[test]
fn factoring_diagonal_is_squared_residual() {
    for n in [15u64, 21, 35] {
        let layout = FactorLayout::new(n, 2, 2).unwrap();
        let h = build_vqf_hamiltonian(n, 2, 2).unwrap();
        for k in 0..16u8 {
            let bits = [k >> 3 & 1, k >> 2 & 1, k >> 1 & 1, k & 1];
            let e = h.matrix_element(bits, bits).re;
            assert_eq!(e, layout.cost(bits) as f64);
        }
    }
}

#[test]
fn factoring_cost_vanishes_on_the_factor_source() {
    let model = CostModel::vqf(35).unwrap();
    let mut alpha = [Complex64::new(0.0, 0.0); 4];
    alpha[3] = Complex64::new(1.0, 0.0);
    let state = TwoQuquartState::new(alpha, [0.0; 4], 1.0).unwrap();
    assert!(model.evaluate_exact(&state).value.abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn grouped_evaluation_matches_dense(alpha in ket(), eps in 0.0f64..=1.0, k in 0usize..31) {
        let r = h2_grid()[k];
        let model = CostModel::h2(r).unwrap();
        let state = TwoQuquartState::new(alpha, [0.0; 4], eps).unwrap();
        let pure = TwoQuquartState::new(alpha, [0.0; 4], 1.0).unwrap();
        if eps == 1.0 {
            prop_assert!((model.evaluate_exact(&state).value - model.dense_expectation(&pure)).abs() < 1e-10);
        }
        let vqf = CostModel::vqf(35).unwrap();
        prop_assert!((vqf.evaluate_exact(&pure).value - vqf.dense_expectation(&pure)).abs() < 1e-9);
    }

    #[test]
    fn sampled_estimate_tracks_exact(theta in -0.7f64..1.5, seed in any::<u64>()) {
        let model = CostModel::h2(0.736).unwrap();
        let state = Ansatz::Ucc.state(&[theta], [0.0; 4], 1.0).unwrap();
        let exact = model.evaluate_exact(&state).value;
        let cfg = photonic_vqa::counts::NoiseConfig::new(20_000, f64::INFINITY, seed);
        let s = model.evaluate_sampled(&state, &cfg, 0).unwrap();
        prop_assert!((s.value - exact).abs() <= 6.0 * s.std_err.max(1e-4));
    }

    #[test]
    fn pauli_strings_round_trip(ops in prop::array::uniform4(0usize..4)) {
        let text: String = ops.iter().map(|&k| ['I', 'X', 'Y', 'Z'][k]).collect();
        let p: PauliString = text.parse().unwrap();
        prop_assert_eq!(p.to_string(), text);
    }
}
