//! Cost-function evaluation from exact probabilities or sampled counts.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::counts::{estimate_probabilities, sample_counts, subtract_accidental_floor, CountsRecord, NoiseConfig};
use crate::error::{Error, Result};
use crate::mesh::{PhaseVector, Stage};
use crate::observables::{group_commuting, outcome_bits, CommutingGroup, WeightedObservable};
use crate::state::{pair_index, prepare_state, probability_tensor, MeasurementSetting, ProbabilityTensor, TwoQuquartState};

/// Raw-pair cell measured for each trial outcome, 0-based.
pub type OutcomeMap = [[(usize, usize); 4]; 4];

/// How the logical trial state sits on the pair state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[allow(clippy::large_enum_variant)]
pub enum Encoding {
    /// Pair `|m>|m>` is the logical basis state of outcome `(m, m)`.
    Direct,
    /// Logical outcome `(a, b)` is read from the raw projector `map[a][b]`.
    Relabeled(OutcomeMap),
}

impl Encoding {
    /// Logical 16-vector of a pure pair state.
    pub fn trial_vector(&self, state: &TwoQuquartState) -> Vec<Complex64> {
        let raw = crate::state::state_vector(state);
        match self {
            Encoding::Direct => raw,
            Encoding::Relabeled(map) => {
                let mut v = vec![Complex64::new(0.0, 0.0); 16];
                for a in 0..4 {
                    for b in 0..4 {
                        let (r, s) = map[a][b];
                        v[4 * a + b] = raw[4 * r + s];
                    }
                }
                v
            }
        }
    }
}

/// Logical two-qubit-pair states reached from each source in the factoring
/// encoding, as 1-based `(m1, m2)`: `|0110>, |0101>, |1101>, |1110>`.
pub const VQF_ADMISSIBLE: [(usize, usize); 4] = [(2, 3), (2, 2), (4, 2), (4, 3)];

/// Involution swapping raw `(m, m)` with the admissible outcome of source `m`.
pub fn vqf_outcome_map() -> OutcomeMap {
    let mut map: OutcomeMap = std::array::from_fn(|a| std::array::from_fn(|b| (a, b)));
    for (m, &(a, b)) in VQF_ADMISSIBLE.iter().enumerate() {
        map[a - 1][b - 1] = (m, m);
        map[m][m] = (a - 1, b - 1);
    }
    map
}

/// One evaluation's per-group data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupRecord {
    Exact(ProbabilityTensor),
    Sampled(CountsRecord),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostEvaluation {
    pub value: f64,
    pub std_err: f64,
    pub records: Vec<GroupRecord>,
    pub n_settings_used: usize,
}

struct MeasuredGroup {
    setting: MeasurementSetting,
    /// `Σ_k w_k π_k` over the non-identity members.
    f: [[f64; 4]; 4],
}

/// Observable with its groups and settings prepared for repeated evaluation.
pub struct CostModel {
    obs: WeightedObservable,
    encoding: Encoding,
    groups: Vec<CommutingGroup>,
    measured: Vec<MeasuredGroup>,
    constant: f64,
}

impl CostModel {
    pub fn new(obs: WeightedObservable, encoding: Encoding) -> Result<Self> {
        let groups = group_commuting(&obs)?;
        let constant: f64 = obs.terms.iter().filter(|t| t.string.is_identity()).map(|t| t.coeff).sum();
        let mut measured = Vec::new();
        for g in &groups {
            let active: Vec<(usize, usize)> = g
                .member_indices
                .iter()
                .enumerate()
                .filter(|(_, &k)| !obs.terms[k].string.is_identity())
                .map(|(j, &k)| (j, k))
                .collect();
            if active.is_empty() {
                continue;
            }
            let mut f = [[0.0; 4]; 4];
            for &(j, k) in &active {
                let w = obs.terms[k].coeff;
                for a in 0..4 {
                    for b in 0..4 {
                        f[a][b] += w * g.eig[j][a][b];
                    }
                }
            }
            let setting = match &encoding {
                Encoding::Direct => g.setting(),
                Encoding::Relabeled(map) => {
                    if !g.is_computational() {
                        return Err(Error::Construction(
                            "relabeled encodings only support diagonal groups".into(),
                        ));
                    }
                    g.setting().relabeled(map)
                }
            };
            measured.push(MeasuredGroup { setting, f });
        }
        Ok(Self { obs, encoding, groups, measured, constant })
    }

    pub fn h2(r: f64) -> Result<Self> {
        Self::new(crate::observables::load_h2_table(r)?, Encoding::Direct)
    }

    pub fn vqf(n: u64) -> Result<Self> {
        Self::new(crate::observables::build_vqf_hamiltonian(n, 2, 2)?, Encoding::Relabeled(vqf_outcome_map()))
    }

    pub fn observable(&self) -> &WeightedObservable {
        &self.obs
    }

    pub fn encoding(&self) -> &Encoding {
        &self.encoding
    }

    pub fn groups(&self) -> &[CommutingGroup] {
        &self.groups
    }

    /// Settings actually measured, one per group with non-identity members.
    pub fn settings(&self) -> Vec<&MeasurementSetting> {
        self.measured.iter().map(|m| &m.setting).collect()
    }

    pub fn evaluate_exact(&self, state: &TwoQuquartState) -> CostEvaluation {
        let mut value = self.constant;
        let mut records = Vec::with_capacity(self.measured.len());
        for g in &self.measured {
            let p = probability_tensor(state, &g.setting);
            value += p.expect(&g.f);
            records.push(GroupRecord::Exact(p));
        }
        CostEvaluation { value, std_err: 0.0, records, n_settings_used: self.measured.len() }
    }

    /// Sampled estimate; group `j` draws from stream `(seed, eval_index, j)`.
    pub fn evaluate_sampled(&self, state: &TwoQuquartState, cfg: &NoiseConfig, eval_index: u64) -> Result<CostEvaluation> {
        cfg.validate()?;
        let mut value = self.constant;
        let mut var = 0.0;
        let mut records = Vec::with_capacity(self.measured.len());
        for (j, g) in self.measured.iter().enumerate() {
            let exact = probability_tensor(state, &g.setting);
            let rec = sample_counts(&exact, cfg, j as u32, eval_index)?;
            let mut p_hat = estimate_probabilities(&rec).map_err(|_| Error::Numerical("empty counts record".into()))?;
            if cfg.subtract_accidentals {
                p_hat = subtract_accidental_floor(&p_hat, cfg.car);
            }
            let mean = p_hat.expect(&g.f);
            let second = p_hat.expect(&g.f.map(|row| row.map(|x| x * x)));
            var += ((second - mean * mean) / rec.cc_total as f64).max(0.0);
            value += mean;
            records.push(GroupRecord::Sampled(rec));
        }
        Ok(CostEvaluation { value, std_err: var.sqrt(), records, n_settings_used: self.measured.len() })
    }

    /// `<ψ|H|ψ>` from the dense Kronecker matrix on the logical pure state.
    pub fn dense_expectation(&self, state: &TwoQuquartState) -> f64 {
        let v = self.encoding.trial_vector(state);
        let h = self.obs.dense_matrix();
        let hv = h.apply(&v);
        v.iter().zip(&hv).map(|(a, b)| a.conj() * b).sum::<Complex64>().re
    }
}

/// Convenience wrapper for a one-off exact evaluation.
pub fn evaluate_exact(obs: &WeightedObservable, state: &TwoQuquartState) -> Result<CostEvaluation> {
    Ok(CostModel::new(obs.clone(), Encoding::Direct)?.evaluate_exact(state))
}

/// Convenience wrapper for a one-off sampled evaluation.
pub fn evaluate_sampled(obs: &WeightedObservable, state: &TwoQuquartState, cfg: &NoiseConfig, eval_index: u64) -> Result<CostEvaluation> {
    CostModel::new(obs.clone(), Encoding::Direct)?.evaluate_sampled(state, cfg, eval_index)
}

/// Map from optimizer parameters to pump phases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ansatz {
    /// One angle: `cos θ |3,3> - sin θ |2,2>` via pump `(θ, π/2, π/2)`.
    Ucc,
    /// The three pump MZI angles.
    PumpAngles,
}

impl Ansatz {
    pub fn dim(self) -> usize {
        match self {
            Ansatz::Ucc => 1,
            Ansatz::PumpAngles => 3,
        }
    }

    pub fn pump(self, params: &[f64]) -> Result<PhaseVector> {
        if params.len() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "ansatz expects {} parameters, got {}",
                self.dim(),
                params.len()
            )));
        }
        let theta = match self {
            Ansatz::Ucc => [params[0], FRAC_PI_2, FRAC_PI_2],
            Ansatz::PumpAngles => [params[0], params[1], params[2]],
        };
        PhaseVector::with_zero_phi(theta, Stage::Pump)
    }

    pub fn state(self, params: &[f64], delta: [f64; 4], epsilon: f64) -> Result<TwoQuquartState> {
        prepare_state(&self.pump(params)?, delta, epsilon)
    }
}

/// Ansatz plus cost model plus noise: a callable cost function.
pub struct Objective {
    pub model: CostModel,
    pub ansatz: Ansatz,
    pub delta: [f64; 4],
    pub epsilon: f64,
    pub noise: Option<NoiseConfig>,
}

impl Objective {
    pub fn new(model: CostModel, ansatz: Ansatz) -> Self {
        Self { model, ansatz, delta: [0.0; 4], epsilon: 1.0, noise: None }
    }

    pub fn with_noise(mut self, noise: Option<NoiseConfig>) -> Self {
        self.noise = noise;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn evaluate(&self, params: &[f64], eval_index: u64) -> Result<CostEvaluation> {
        let state = self.ansatz.state(params, self.delta, self.epsilon)?;
        match &self.noise {
            None => Ok(self.model.evaluate_exact(&state)),
            Some(cfg) => self.model.evaluate_sampled(&state, cfg, eval_index),
        }
    }
}

/// Logical bits of trial outcome `(m1, m2)`.
pub fn trial_bits(m1: usize, m2: usize) -> [u8; 4] {
    outcome_bits(m1, m2)
}

/// Position of logical outcome `(m1, m2)` in the 16-vector.
pub fn trial_index(m1: usize, m2: usize) -> usize {
    pair_index(m1, m2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::basis_ket;

    #[test]
    fn outcome_map_is_an_involution() {
        let map = vqf_outcome_map();
        for a in 0..4 {
            for b in 0..4 {
                let (r, s) = map[a][b];
                assert_eq!(map[r][s], (a, b));
            }
        }
        assert_eq!(map[0][0], (1, 2));
        assert_eq!(map[1][1], (1, 1));
    }

    #[test]
    fn vqf_true_factor_state_is_zero() {
        let model = CostModel::vqf(35).unwrap();
        let s = TwoQuquartState::pure(basis_ket(4)).unwrap();
        let e = model.evaluate_exact(&s);
        assert_eq!(e.value, 0.0);
        assert_eq!(e.n_settings_used, 1);
    }

    #[test]
    fn h2_uses_two_settings() {
        let model = CostModel::h2(0.736).unwrap();
        let s = Ansatz::Ucc.state(&[0.0], [0.0; 4], 1.0).unwrap();
        let e = model.evaluate_exact(&s);
        assert_eq!(e.records.len(), 2);
        assert!((e.value + 1.1168).abs() < 5e-4);
        let cfg = NoiseConfig::new(2000, f64::INFINITY, 1);
        let e = model.evaluate_sampled(&s, &cfg, 0).unwrap();
        assert_eq!(e.records.len(), 2);
        assert!(e.std_err > 0.0);
    }

    #[test]
    fn zero_weight_observable() {
        let obs = WeightedObservable::new([(0.0, "ZZII".parse().unwrap()), (0.0, "XXXX".parse().unwrap())]).unwrap();
        let model = CostModel::new(obs, Encoding::Direct).unwrap();
        let s = TwoQuquartState::pure([Complex64::new(0.5, 0.0); 4]).unwrap();
        let e = model.evaluate_sampled(&s, &NoiseConfig::new(500, 10.0, 2), 0).unwrap();
        assert_eq!(e.value, 0.0);
        assert_eq!(e.std_err, 0.0);
    }

    #[test]
    fn identity_only_needs_no_measurement() {
        let obs = WeightedObservable::new([(2.5, "IIII".parse().unwrap())]).unwrap();
        let model = CostModel::new(obs, Encoding::Direct).unwrap();
        let s = TwoQuquartState::pure(basis_ket(1)).unwrap();
        let e = model.evaluate_exact(&s);
        assert_eq!((e.value, e.n_settings_used), (2.5, 0));
    }

    #[test]
    fn ansatz_arity_checked() {
        assert!(Ansatz::Ucc.pump(&[0.1, 0.2]).is_err());
        assert!(Ansatz::PumpAngles.pump(&[0.1, 0.2, 0.3]).is_ok());
    }
}
