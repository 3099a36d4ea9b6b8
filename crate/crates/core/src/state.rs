//! Post-selected two-ququart pair state and its coincidence statistics.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{amplitudes_from_phases, projector_vector, ComplexMatrix, PhaseVector};

pub type Ket4 = [Complex64; 4];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const NORM_TOL: f64 = 1e-10;

fn norm_sqr(v: &Ket4) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn inner(a: &Ket4, b: &Ket4) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Computational basis ket `|m>` for 1-based `m`.
pub fn basis_ket(m: usize) -> Ket4 {
    let mut v = [ZERO; 4];
    v[m - 1] = Complex64::new(1.0, 0.0);
    v
}

/// `Σ_m α_m e^{iδ_m} |m>_i |m>_s` mixed with weight `1-ε` with its
/// which-source dephased counterpart.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "StateJson", try_from = "StateJson")]
pub struct TwoQuquartState {
    alpha: Ket4,
    delta: [f64; 4],
    epsilon: f64,
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    alpha_re: [f64; 4],
    alpha_im: [f64; 4],
    delta: [f64; 4],
    epsilon: f64,
}

impl From<TwoQuquartState> for StateJson {
    fn from(s: TwoQuquartState) -> Self {
        Self {
            alpha_re: s.alpha.map(|z| z.re),
            alpha_im: s.alpha.map(|z| z.im),
            delta: s.delta,
            epsilon: s.epsilon,
        }
    }
}

impl TryFrom<StateJson> for TwoQuquartState {
    type Error = Error;
    fn try_from(j: StateJson) -> Result<Self> {
        let alpha = std::array::from_fn(|m| Complex64::new(j.alpha_re[m], j.alpha_im[m]));
        TwoQuquartState::new(alpha, j.delta, j.epsilon)
    }
}

impl TwoQuquartState {
    pub fn new(alpha: Ket4, delta: [f64; 4], epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::InvalidArgument(format!("epsilon {epsilon} outside [0, 1]")));
        }
        if alpha.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) || delta.iter().any(|d| !d.is_finite()) {
            return Err(Error::InvalidArgument("state parameters must be finite".into()));
        }
        if (norm_sqr(&alpha) - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidArgument("pump amplitudes must be normalized".into()));
        }
        Ok(Self { alpha, delta, epsilon })
    }

    /// Pure state with no spurious phases.
    pub fn pure(alpha: Ket4) -> Result<Self> {
        Self::new(alpha, [0.0; 4], 1.0)
    }

    pub fn alpha(&self) -> &Ket4 {
        &self.alpha
    }

    pub fn delta(&self) -> &[f64; 4] {
        &self.delta
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `α_m e^{iδ_m}`.
    pub fn dressed_amplitudes(&self) -> Ket4 {
        std::array::from_fn(|m| self.alpha[m] * Complex64::from_polar(1.0, self.delta[m]))
    }
}

/// Prepares the pair state produced by the pump phases.
pub fn prepare_state(pump: &PhaseVector, delta: [f64; 4], epsilon: f64) -> Result<TwoQuquartState> {
    TwoQuquartState::new(amplitudes_from_phases(pump)?, delta, epsilon)
}

/// Idler and signal kets selected by one coincidence detection.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectorPair {
    pub xi_i: Ket4,
    pub xi_s: Ket4,
}

impl ProjectorPair {
    pub fn new(xi_i: Ket4, xi_s: Ket4) -> Result<Self> {
        if (norm_sqr(&xi_i) - 1.0).abs() > NORM_TOL || (norm_sqr(&xi_s) - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidArgument("projector vectors must be unit-norm".into()));
        }
        Ok(Self { xi_i, xi_s })
    }

    /// Pair realized by idler and signal projection-stage phases.
    pub fn from_phases(idler: &PhaseVector, signal: &PhaseVector) -> Result<Self> {
        Self::new(projector_vector(idler)?, projector_vector(signal)?)
    }

    /// Overlap with another pair as product vectors.
    pub fn overlap(&self, other: &Self) -> Complex64 {
        inner(&self.xi_i, &other.xi_i) * inner(&self.xi_s, &other.xi_s)
    }
}

/// Probability of a coincidence on the given projector pair.
pub fn coincidence_probability(state: &TwoQuquartState, proj: &ProjectorPair) -> f64 {
    let eps = state.epsilon;
    let dressed = state.dressed_amplitudes();
    let coherent: Complex64 = (0..4)
        .map(|m| dressed[m] * proj.xi_i[m].conj() * proj.xi_s[m].conj())
        .sum();
    let incoherent: f64 = (0..4)
        .map(|m| state.alpha[m].norm_sqr() * proj.xi_i[m].norm_sqr() * proj.xi_s[m].norm_sqr())
        .sum();
    (eps * coherent.norm_sqr() + (1.0 - eps) * incoherent).clamp(0.0, 1.0)
}

/// Outcome probabilities of one measurement setting, indexed `[m1-1][m2-1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityTensor {
    pub p: [[f64; 4]; 4],
}

impl ProbabilityTensor {
    pub fn new(p: [[f64; 4]; 4]) -> Result<Self> {
        if p.iter().flatten().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidArgument("probabilities must be finite and non-negative".into()));
        }
        Ok(Self { p })
    }

    pub fn uniform() -> Self {
        Self { p: [[1.0 / 16.0; 4]; 4] }
    }

    /// All weight on 1-based cell `(m1, m2)`.
    pub fn delta(m1: usize, m2: usize) -> Self {
        let mut p = [[0.0; 4]; 4];
        p[m1 - 1][m2 - 1] = 1.0;
        Self { p }
    }

    pub fn sum(&self) -> f64 {
        self.p.iter().flatten().sum()
    }

    /// 1-based accessor.
    pub fn get(&self, m1: usize, m2: usize) -> f64 {
        self.p[m1 - 1][m2 - 1]
    }

    /// `Σ p·f` for an outcome function `f`.
    pub fn expect(&self, f: &[[f64; 4]; 4]) -> f64 {
        (0..4).flat_map(|a| (0..4).map(move |b| (a, b))).map(|(a, b)| self.p[a][b] * f[a][b]).sum()
    }
}

/// Sixteen projector pairs, one per outcome `(m1, m2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSetting {
    pub pairs: [[ProjectorPair; 4]; 4],
}

impl MeasurementSetting {
    /// Product setting `idler[m1] ⊗ signal[m2]` from two orthonormal bases.
    pub fn from_bases(idler: &[Ket4; 4], signal: &[Ket4; 4]) -> Result<Self> {
        for (name, basis) in [("idler", idler), ("signal", signal)] {
            if !is_orthonormal(basis, 1e-12) {
                return Err(Error::InvalidArgument(format!("{name} basis is not orthonormal")));
            }
        }
        let pairs = std::array::from_fn(|a| std::array::from_fn(|b| ProjectorPair { xi_i: idler[a], xi_s: signal[b] }));
        Ok(Self { pairs })
    }

    pub fn computational() -> Self {
        let basis: [Ket4; 4] = std::array::from_fn(|m| basis_ket(m + 1));
        Self::from_bases(&basis, &basis).expect("computational basis is orthonormal")
    }

    /// Setting given per outcome by projection-stage phases `(idler, signal)`.
    pub fn from_phase_rows(rows: &[[(PhaseVector, PhaseVector); 4]; 4]) -> Result<Self> {
        let mut pairs = [[ProjectorPair { xi_i: [ZERO; 4], xi_s: [ZERO; 4] }; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                pairs[a][b] = ProjectorPair::from_phases(&rows[a][b].0, &rows[a][b].1)?;
            }
        }
        Ok(Self { pairs })
    }

    /// Same projectors with outcome `(a, b)` read from `map[a][b]` (0-based).
    pub fn relabeled(&self, map: &[[(usize, usize); 4]; 4]) -> Self {
        let pairs = std::array::from_fn(|a| std::array::from_fn(|b| {
            let (r, s) = map[a][b];
            self.pairs[r][s]
        }));
        Self { pairs }
    }

    /// True when the 16 pairs are mutually orthogonal product vectors,
    /// so the outcome probabilities of any pair state sum to one.
    pub fn is_complete(&self, tol: f64) -> bool {
        let flat: Vec<&ProjectorPair> = self.pairs.iter().flatten().collect();
        for (j, a) in flat.iter().enumerate() {
            for (k, b) in flat.iter().enumerate() {
                let want = if j == k { 1.0 } else { 0.0 };
                if (a.overlap(b).norm() - want).abs() > tol {
                    return false;
                }
            }
        }
        true
    }
}

pub fn is_orthonormal(basis: &[Ket4; 4], tol: f64) -> bool {
    for a in 0..4 {
        for b in 0..4 {
            let want = if a == b { 1.0 } else { 0.0 };
            if (inner(&basis[a], &basis[b]) - Complex64::new(want, 0.0)).norm() > tol {
                return false;
            }
        }
    }
    true
}

/// Outcome probabilities of `state` in `setting`.
pub fn probability_tensor(state: &TwoQuquartState, setting: &MeasurementSetting) -> ProbabilityTensor {
    let p = std::array::from_fn(|a| std::array::from_fn(|b| coincidence_probability(state, &setting.pairs[a][b])));
    ProbabilityTensor { p }
}

/// Index of `|m1>_i |m2>_s` (1-based modes) in the 16-dimensional pair space.
pub fn pair_index(m1: usize, m2: usize) -> usize {
    4 * (m1 - 1) + (m2 - 1)
}

/// Pure part of the pair state as a 16-vector.
pub fn state_vector(state: &TwoQuquartState) -> Vec<Complex64> {
    let mut v = vec![ZERO; 16];
    for (m, a) in state.dressed_amplitudes().iter().enumerate() {
        v[pair_index(m + 1, m + 1)] = *a;
    }
    v
}

/// Full 16×16 density matrix including the dephased component.
pub fn density_matrix(state: &TwoQuquartState) -> DMatrix<Complex64> {
    let v = nalgebra::DVector::from_vec(state_vector(state));
    let mut rho = (&v * v.adjoint()) * Complex64::new(state.epsilon, 0.0);
    for m in 1..=4 {
        let k = pair_index(m, m);
        rho[(k, k)] += Complex64::new((1.0 - state.epsilon) * state.alpha[m - 1].norm_sqr(), 0.0);
    }
    rho
}

/// Probability that both photons exit at mode 2 after the projection stages
/// `u_idler ⊗ u_signal`, computed on the full density matrix.
pub fn detection_probability(state: &TwoQuquartState, u_idler: &ComplexMatrix, u_signal: &ComplexMatrix) -> f64 {
    let u = u_idler.kron(u_signal).into_nalgebra();
    let out = &u * density_matrix(state) * u.adjoint();
    let k = pair_index(2, 2);
    out[(k, k)].re
}
