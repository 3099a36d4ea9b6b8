#![allow(clippy::needless_range_loop)]

use photonic_vqa::counts::*;
use photonic_vqa::state::ProbabilityTensor;
use proptest::prelude::*;

fn skewed() -> ProbabilityTensor {
    let mut p = [[0.0; 4]; 4];
    let mut total = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            p[a][b] = (1 + a * 4 + b) as f64;
            total += p[a][b];
        }
    }
    ProbabilityTensor::new(p.map(|r| r.map(|x| x / total))).unwrap()
}

#[test]
fn frequencies_converge() {
    let p = skewed();
    let rec = sample_counts(&p, &NoiseConfig::new(2_000_000, f64::INFINITY, 1), 0, 0).unwrap();
    let q = estimate_probabilities(&rec).unwrap();
    for (x, y) in q.p.iter().flatten().zip(p.p.iter().flatten()) {
        assert!((x - y).abs() < 2e-3, "{x} vs {y}");
    }
}

#[test]
fn estimates_are_unbiased_across_seeds() {
    let p = skewed();
    let mut mean = [[0.0; 4]; 4];
    let runs = 400;
    for seed in 0..runs {
        let q = estimate_probabilities(&sample_counts(&p, &NoiseConfig::new(500, f64::INFINITY, seed), 0, 0).unwrap()).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                mean[a][b] += q.p[a][b] / runs as f64;
            }
        }
    }
    for a in 0..4 {
        for b in 0..4 {
            let pk = p.p[a][b];
            let se = (pk * (1.0 - pk) / (500.0 * runs as f64)).sqrt();
            assert!((mean[a][b] - pk).abs() < 5.0 * se, "cell {a},{b}");
        }
    }
}

#[test]
fn scatter_scales_as_inverse_square_root() {
    let p = skewed();
    let spread = |n: u64| {
        let xs: Vec<f64> = (0..300)
            .map(|seed| estimate_probabilities(&sample_counts(&p, &NoiseConfig::new(n, f64::INFINITY, seed), 0, 0).unwrap()).unwrap().p[3][3])
            .collect();
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
    };
    let ratio = spread(400) / spread(6400);
    assert!((ratio - 4.0).abs() < 0.8, "ratio {ratio}");
}

#[test]
fn accidentals_add_a_uniform_floor() {
    let p = ProbabilityTensor::delta(2, 2);
    let rec = sample_counts(&p, &NoiseConfig::new(1_000_000, 10.0, 2), 0, 0).unwrap();
    let q = estimate_probabilities(&rec).unwrap();
    let floor = 1.0 / 160.0 / (1.0 + 0.1);
    assert!((q.p[0][0] - floor).abs() < 5e-4);
}

proptest! {
    #[test]
    fn totals_and_determinism(n in 1u64..5000, seed in any::<u64>(), setting in 0u32..8, eval in 0u64..1000) {
        let cfg = NoiseConfig::new(n, 25.0, seed);
        let a = sample_counts(&skewed(), &cfg, setting, eval).unwrap();
        prop_assert_eq!(a.cc_total, n);
        prop_assert_eq!(a.cc.iter().flatten().sum::<u64>(), n);
        prop_assert_eq!(&a, &sample_counts(&skewed(), &cfg, setting, eval).unwrap());
        prop_assert_eq!(a.seed_path, format!("{seed}/{eval}/{setting}"));
    }

    #[test]
    fn stream_ids_are_distinct(e1 in 0u64..1 << 40, e2 in 0u64..1 << 40, s1 in 0u32..1 << 16, s2 in 0u32..1 << 16) {
        let a = SeedPath { root: 0, eval_index: e1, setting_id: s1 };
        let b = SeedPath { root: 0, eval_index: e2, setting_id: s2 };
        prop_assert_eq!(a.stream() == b.stream(), (e1, s1) == (e2, s2));
    }
}
