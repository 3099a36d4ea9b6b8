//! Scripted reproductions of the calibration, certification and
//! variational experiments.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{Ansatz, CostModel, Objective, VQF_ADMISSIBLE};
use crate::counts::{estimate_probabilities, sample_counts, subtract_accidental_floor, NoiseConfig};
use crate::error::{Error, Result};
use crate::mesh::{amplitudes_from_phases, projector_vector, PhaseVector, Stage};
use crate::observables::{load_h2_table, outcome_bits, FactorLayout, WeightedObservable};
use crate::optimizers::{bayesian_optimize, gradient_descent, GdConfig, GpConfig, OptRun};
use crate::state::{basis_ket, coincidence_probability, inner, prepare_state, probability_tensor, Ket4, MeasurementSetting, ProbabilityTensor, ProjectorPair, TwoQuquartState};
use crate::tables::phase_table;

/// Completes `first` (placed at index `slot`) to an orthonormal basis using
/// computational vectors in order.
pub fn complete_basis(fixed: &[(usize, Ket4)]) -> Result<[Ket4; 4]> {
    let mut vecs: Vec<Ket4> = Vec::new();
    for (_, v) in fixed {
        vecs.push(gram_schmidt_step(&vecs, v).ok_or_else(|| Error::Construction("fixed vectors are not independent".into()))?);
    }
    for m in 1..=4 {
        if vecs.len() == 4 {
            break;
        }
        if let Some(v) = gram_schmidt_step(&vecs, &basis_ket(m)) {
            vecs.push(v);
        }
    }
    let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
    let mut used = [false; 4];
    for (k, (slot, _)) in fixed.iter().enumerate() {
        if *slot >= 4 || used[*slot] {
            return Err(Error::InvalidArgument("invalid basis slot".into()));
        }
        out[*slot] = vecs[k];
        used[*slot] = true;
    }
    let mut rest = vecs[fixed.len()..].iter();
    for slot in 0..4 {
        if !used[slot] {
            out[slot] = *rest.next().expect("four vectors");
        }
    }
    Ok(out)
}

fn gram_schmidt_step(basis: &[Ket4], v: &Ket4) -> Option<Ket4> {
    let mut w = *v;
    for b in basis {
        let c = inner(b, &w);
        for k in 0..4 {
            w[k] -= b[k] * c;
        }
    }
    let n = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    (n > 1e-9).then(|| w.map(|z| z / n))
}

/// Source pairs used for the heralded interference fringes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SourcePair {
    #[serde(rename = "2-3")]
    P23,
    #[serde(rename = "1-3")]
    P13,
    #[serde(rename = "3-4")]
    P34,
}

impl SourcePair {
    pub const ALL: [SourcePair; 3] = [SourcePair::P23, SourcePair::P13, SourcePair::P34];

    pub fn label(self) -> &'static str {
        match self {
            SourcePair::P23 => "2-3",
            SourcePair::P13 => "1-3",
            SourcePair::P34 => "3-4",
        }
    }

    /// Swept phase shifter: stage and 0-based index of the input array.
    pub fn swept(self) -> (Stage, usize) {
        match self {
            SourcePair::P23 => (Stage::Idler, 1),
            SourcePair::P13 => (Stage::Signal, 0),
            SourcePair::P34 => (Stage::Signal, 3),
        }
    }

    pub fn sources(self) -> (usize, usize) {
        match self {
            SourcePair::P23 => (2, 3),
            SourcePair::P13 => (1, 3),
            SourcePair::P34 => (3, 4),
        }
    }
}

impl FromStr for SourcePair {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2-3" | "23" => Ok(SourcePair::P23),
            "1-3" | "13" => Ok(SourcePair::P13),
            "3-4" | "34" => Ok(SourcePair::P34),
            _ => Err(Error::InvalidArgument(format!("source pair {s:?} is not one of 2-3, 1-3, 3-4"))),
        }
    }
}

impl fmt::Display for SourcePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Fitted fringe `offset + amplitude·cos(φ + phase0)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FringeFit {
    pub amplitude: f64,
    pub offset: f64,
    pub phase0: f64,
    pub residual_rms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FringeScan {
    pub pair: SourcePair,
    pub phase_grid: Vec<f64>,
    pub normalized_cc: Vec<f64>,
    pub visibility: Option<f64>,
    pub visibility_std_err: Option<f64>,
    pub fit_params: Option<FringeFit>,
}

/// Least-squares sinusoid fit and its visibility with a 1σ error from the
/// residual scatter.
pub fn fit_fringe(phases: &[f64], ys: &[f64]) -> Option<(FringeFit, f64, f64)> {
    let n = phases.len();
    if n < 4 || ys.len() != n {
        return None;
    }
    let mut ata = nalgebra::Matrix3::<f64>::zeros();
    let mut aty = nalgebra::Vector3::<f64>::zeros();
    for (&p, &y) in phases.iter().zip(ys) {
        let row = nalgebra::Vector3::new(1.0, p.cos(), p.sin());
        ata += row * row.transpose();
        aty += row * y;
    }
    let inv = ata.try_inverse()?;
    let c = inv * aty;
    let (c0, c1, c2) = (c[0], c[1], c[2]);
    if !(c0 > 0.0) {
        return None;
    }
    let amp = (c1 * c1 + c2 * c2).sqrt();
    let ss: f64 = phases
        .iter()
        .zip(ys)
        .map(|(&p, &y)| {
            let r = c0 + c1 * p.cos() + c2 * p.sin() - y;
            r * r
        })
        .sum();
    let rms = (ss / n as f64).sqrt();
    let hi = c0 + amp;
    let lo = (c0 - amp).max(0.0);
    let vis = (hi - lo) / (hi + lo);

    // delta-method error of amp/c0 from the LS covariance
    let dof = (n as f64 - 3.0).max(1.0);
    let cov = inv * (ss / dof);
    let grad = if amp > 0.0 {
        nalgebra::Vector3::new(-amp / (c0 * c0), c1 / (amp * c0), c2 / (amp * c0))
    } else {
        nalgebra::Vector3::new(0.0, 0.0, 0.0)
    };
    let var = (grad.transpose() * cov * grad)[(0, 0)].max(0.0);
    Some((FringeFit { amplitude: amp, offset: c0, phase0: (-c2).atan2(c1), residual_rms: rms }, vis, var.sqrt()))
}

fn table_phases(table: &str, label: &str, stage: Stage) -> Result<PhaseVector> {
    phase_table(table)?.phases(label, stage)
}

/// Sweeps one input phase of a projection stage on a two-source entangled
/// state and records the normalized coincidences at `(2, 2)`.
pub fn heralded_interference(pair: SourcePair, epsilon: f64, grid: &[f64], noise: Option<&NoiseConfig>) -> Result<FringeScan> {
    let label = pair.label();
    let pump = table_phases("interference", &format!("{label}:p"), Stage::Pump)?;
    let state = prepare_state(&pump, [0.0; 4], epsilon)?;
    let idler0 = table_phases("interference", &format!("{label}:i"), Stage::Idler)?;
    let signal0 = table_phases("interference", &format!("{label}:s"), Stage::Signal)?;
    let (stage, k) = pair.swept();

    let mut ys = Vec::with_capacity(grid.len());
    for (j, &phi) in grid.iter().enumerate() {
        let (mut idler, mut signal) = (idler0, signal0);
        let target = if stage == Stage::Idler { &mut idler } else { &mut signal };
        let mut p = target.phi;
        p[k] = phi;
        *target = PhaseVector::new(target.theta, p, stage)?;
        let xi_i = projector_vector(&idler)?;
        let xi_s = projector_vector(&signal)?;
        let y = match noise {
            None => coincidence_probability(&state, &ProjectorPair::new(xi_i, xi_s)?),
            Some(cfg) => {
                let setting = MeasurementSetting::from_bases(&complete_basis(&[(1, xi_i)])?, &complete_basis(&[(1, xi_s)])?)?;
                let rec = sample_counts(&probability_tensor(&state, &setting), cfg, 0, j as u64)?;
                let mut p_hat = estimate_probabilities(&rec)?;
                if cfg.subtract_accidentals {
                    p_hat = subtract_accidental_floor(&p_hat, cfg.car);
                }
                p_hat.p[1][1]
            }
        };
        ys.push(y);
    }
    let fit = fit_fringe(grid, &ys);
    Ok(FringeScan {
        pair,
        phase_grid: grid.to_vec(),
        normalized_cc: ys,
        visibility: fit.map(|f| f.1),
        visibility_std_err: fit.map(|f| f.2),
        fit_params: fit.map(|f| f.0),
    })
}

/// Indistinguishability implied by a fringe visibility for a two-source
/// state with pump weights `w_a`, `w_b` (`|α|²`).
pub fn epsilon_from_visibility(visibility: f64, w_a: f64, w_b: f64) -> Result<f64> {
    if !(w_a > 0.0 && w_b > 0.0) {
        return Err(Error::InvalidArgument("both sources must be pumped".into()));
    }
    Ok(visibility * (w_a + w_b) / (2.0 * (w_a * w_b).sqrt()))
}

/// Uniform phase grid over one period.
pub fn phase_grid(points: usize) -> Vec<f64> {
    (0..points).map(|j| -PI + 2.0 * PI * j as f64 / points as f64).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimCertResult {
    pub d: usize,
    pub sources: String,
    pub p1: Vec<Vec<f64>>,
    pub p2: Vec<Vec<f64>>,
    pub certified_dimension: f64,
}

/// Source sets available for each dimension.
pub fn dimension_sources(d: usize) -> &'static [&'static str] {
    match d {
        2 => &["2-3", "1-3", "3-4"],
        3 => &["1-2-3", "1-3-4", "2-3-4"],
        4 => &["all"],
        _ => &[],
    }
}

/// `1/D = Σ_{b1,b2} (Σ_a √(P1[a,b1]·P2[a,b2]))²`.
pub fn certified_dimension_from(p1: &[Vec<f64>], p2: &[Vec<f64>]) -> f64 {
    let d = p1.len();
    let mut inv = 0.0;
    for b1 in 0..d {
        for b2 in 0..d {
            let s: f64 = (0..d).map(|a| (p1[a][b1] * p2[a][b2]).sqrt()).sum();
            inv += s * s;
        }
    }
    1.0 / inv
}

fn setting_kets(sources: &str, who: &str, d: usize, stage: Stage) -> Result<Vec<Ket4>> {
    (1..=d)
        .map(|j| projector_vector(&table_phases("dimcert-settings", &format!("{sources}:{who}:{j}"), stage)?))
        .collect()
}

fn correlation(state: &TwoQuquartState, alice: &[Ket4], bob: &[Ket4], noise: Option<&NoiseConfig>, setting_id: u32) -> Result<Vec<Vec<f64>>> {
    let d = alice.len();
    let full = |kets: &[Ket4]| complete_basis(&kets.iter().copied().enumerate().collect::<Vec<_>>());
    let setting = MeasurementSetting::from_bases(&full(alice)?, &full(bob)?)?;
    let exact = probability_tensor(state, &setting);
    let p: ProbabilityTensor = match noise {
        None => exact,
        Some(cfg) => {
            let rec = sample_counts(&exact, cfg, setting_id, 0)?;
            let p_hat = estimate_probabilities(&rec)?;
            if cfg.subtract_accidentals {
                subtract_accidental_floor(&p_hat, cfg.car)
            } else {
                p_hat
            }
        }
    };
    let block: Vec<Vec<f64>> = (0..d).map(|a| (0..d).map(|b| p.p[a][b]).collect()).collect();
    let total: f64 = block.iter().flatten().sum();
    if !(total > 0.0) {
        return Err(Error::Numerical("no coincidences inside the certified subspace".into()));
    }
    Ok(block.into_iter().map(|r| r.into_iter().map(|x| x / total).collect()).collect())
}

/// Certified dimension of the maximally entangled state on `sources`.
pub fn certified_dimension(d: usize, sources: &str, epsilon: f64, noise: Option<&NoiseConfig>) -> Result<DimCertResult> {
    if !dimension_sources(d).contains(&sources) {
        return Err(Error::InvalidArgument(format!(
            "sources {sources:?} do not prepare a dimension-{d} state; choose one of {:?}",
            dimension_sources(d)
        )));
    }
    let pump = table_phases("entangled-prep", sources, Stage::Pump)?;
    let state = prepare_state(&pump, [0.0; 4], epsilon)?;
    let alice = setting_kets(sources, "alice", d, Stage::Idler)?;
    let bob1 = setting_kets(sources, "bob1", d, Stage::Signal)?;
    let bob2 = setting_kets(sources, "bob2", d, Stage::Signal)?;
    let p1 = correlation(&state, &alice, &bob1, noise, 0)?;
    let p2 = correlation(&state, &alice, &bob2, noise, 1)?;
    let certified_dimension = certified_dimension_from(&p1, &p2);
    Ok(DimCertResult { d, sources: sources.to_string(), p1, p2, certified_dimension })
}

/// `|Tr(M_ideal† M)|² / Tr(M† M)` with `M_ideal` a single one at `(m, m)`.
pub fn fidelity_from_matrix(m: usize, matrix: &[[f64; 4]; 4]) -> f64 {
    let norm: f64 = matrix.iter().flatten().map(|x| x * x).sum();
    if norm == 0.0 {
        return 0.0;
    }
    let diag = matrix[m - 1][m - 1];
    diag * diag / norm
}

/// Routes the pump to source `m` and measures all sixteen computational
/// projector pairs realized from the single-source phase rows.
pub fn projector_fidelity(m: usize, epsilon: f64, noise: Option<&NoiseConfig>) -> Result<f64> {
    if !(1..=4).contains(&m) {
        return Err(Error::InvalidArgument(format!("source {m} not in 1..=4")));
    }
    let pump = table_phases("single-source", &format!("source{m}:p"), Stage::Pump)?;
    let state = prepare_state(&pump, [0.0; 4], epsilon)?;
    let rows: [[(PhaseVector, PhaseVector); 4]; 4] = {
        let idler: Vec<PhaseVector> = (1..=4)
            .map(|k| table_phases("single-source", &format!("source{k}:i"), Stage::Idler))
            .collect::<Result<_>>()?;
        let signal: Vec<PhaseVector> = (1..=4)
            .map(|k| table_phases("single-source", &format!("source{k}:s"), Stage::Signal))
            .collect::<Result<_>>()?;
        std::array::from_fn(|a| std::array::from_fn(|b| (idler[a], signal[b])))
    };
    let setting = MeasurementSetting::from_phase_rows(&rows)?;
    let exact = probability_tensor(&state, &setting);
    let matrix = match noise {
        None => exact,
        Some(cfg) => estimate_probabilities(&sample_counts(&exact, cfg, 0, 0)?)?,
    };
    Ok(fidelity_from_matrix(m, &matrix.p))
}

/// `(g0, g1, g2)` with `E(θ) = g0 + g1 cos 2θ + g2 sin 2θ` on the UCC state,
/// from matrix elements between `|1010>` and `|0101>`.
pub fn h2_ucc_coefficients(obs: &WeightedObservable) -> (f64, f64, f64) {
    let hf = [1, 0, 1, 0];
    let dx = [0, 1, 0, 1];
    let e_hf = obs.matrix_element(hf, hf).re;
    let e_dx = obs.matrix_element(dx, dx).re;
    let off = obs.matrix_element(hf, dx).re;
    (0.5 * (e_hf + e_dx), 0.5 * (e_hf - e_dx), -off)
}

/// Minimum `(E_min, θ_min)` of `A + B cos 2θ + C sin 2θ`, θ in (-π/2, π/2].
pub fn landscape_minimum(a: f64, b: f64, c: f64) -> (f64, f64) {
    let mut t = 0.5 * (c.atan2(b) + PI);
    if t > FRAC_PI_2 {
        t -= PI;
    }
    (a - (b * b + c * c).sqrt(), t)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub theta: f64,
    pub energy: f64,
    pub std_err: f64,
}

pub fn h2_theta_scan(r: f64, grid: &[f64], noise: Option<&NoiseConfig>, epsilon: f64) -> Result<Vec<ScanPoint>> {
    let obj = Objective::new(CostModel::h2(r)?, Ansatz::Ucc).with_noise(noise.copied()).with_epsilon(epsilon);
    grid.iter()
        .enumerate()
        .map(|(j, &t)| {
            let e = obj.evaluate(&[t], j as u64)?;
            Ok(ScanPoint { theta: t, energy: e.value, std_err: e.std_err })
        })
        .collect()
}

/// Least-squares `(A, B, C)` of `A + B cos 2θ + C sin 2θ`.
pub fn fit_landscape(points: &[ScanPoint]) -> Result<(f64, f64, f64)> {
    let doubled: Vec<f64> = points.iter().map(|p| 2.0 * p.theta).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.energy).collect();
    let mut ata = nalgebra::Matrix3::<f64>::zeros();
    let mut aty = nalgebra::Vector3::<f64>::zeros();
    for (&x, &y) in doubled.iter().zip(&ys) {
        let row = nalgebra::Vector3::new(1.0, x.cos(), x.sin());
        ata += row * row.transpose();
        aty += row * y;
    }
    let c = ata
        .try_inverse()
        .ok_or_else(|| Error::Fit("scan grid does not determine the landscape".into()))?
        * aty;
    Ok((c[0], c[1], c[2]))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DissociationPoint {
    #[serde(rename = "R")]
    pub r: f64,
    pub e_min: f64,
    pub theta_min: f64,
    pub fit: [f64; 3],
}

/// Default scan grid over the search domain.
pub fn default_theta_grid(points: usize) -> Vec<f64> {
    (0..points)
        .map(|j| -FRAC_PI_4 + (FRAC_PI_2 + FRAC_PI_4) * j as f64 / (points - 1) as f64)
        .collect()
}

pub fn h2_dissociation(rs: &[f64], grid: &[f64], noise: Option<&NoiseConfig>) -> Result<Vec<DissociationPoint>> {
    rs.par_iter()
        .map(|&r| {
            let scan = h2_theta_scan(r, grid, noise, 1.0)?;
            let (a, b, c) = fit_landscape(&scan)?;
            let (e_min, theta_min) = landscape_minimum(a, b, c);
            Ok(DissociationPoint { r, e_min, theta_min, fit: [a, b, c] })
        })
        .collect()
}

/// Optimizer outcome together with noiseless diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqeResult {
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(flatten)]
    pub run: OptRun,
    /// Noiseless energy at the best parameters.
    pub exact_energy_at_best: f64,
    /// Analytic minimum of the UCC landscape.
    pub reference_minimum: f64,
    pub reference_theta: f64,
}

fn vqe_reference(r: f64) -> Result<(f64, f64)> {
    let (g0, g1, g2) = h2_ucc_coefficients(&load_h2_table(r)?);
    Ok(landscape_minimum(g0, g1, g2))
}

pub fn run_vqe_bayesian(r: f64, noise: Option<&NoiseConfig>, gp: &GpConfig, init: f64) -> Result<VqeResult> {
    let obj = Objective::new(CostModel::h2(r)?, Ansatz::Ucc).with_noise(noise.copied());
    let run = bayesian_optimize(|x, k| obj.evaluate(x, k), init, gp)?;
    finish_vqe(r, run)
}

pub fn run_vqe_gd(r: f64, noise: Option<&NoiseConfig>, gd: &GdConfig, init: f64) -> Result<VqeResult> {
    let obj = Objective::new(CostModel::h2(r)?, Ansatz::Ucc).with_noise(noise.copied());
    let run = gradient_descent(|x, k| obj.evaluate(x, k), &[init], gd)?;
    finish_vqe(r, run)
}

fn finish_vqe(r: f64, run: OptRun) -> Result<VqeResult> {
    let exact = Objective::new(CostModel::h2(r)?, Ansatz::Ucc);
    let exact_energy_at_best = exact.evaluate(&run.best.params, 0)?.value;
    let (reference_minimum, reference_theta) = vqe_reference(r)?;
    Ok(VqeResult { r, run, exact_energy_at_best, reference_minimum, reference_theta })
}

/// Pump angles that split the power equally over the four sources.
pub const DEMOCRATIC_INIT: [f64; 3] = [FRAC_PI_4, -FRAC_PI_4, FRAC_PI_4];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqfResult {
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(flatten)]
    pub run: OptRun,
    /// `|α_m|²` at the best parameters.
    pub source_weights: [f64; 4],
    /// Logical bit strings of the four admissible states.
    pub admissible_states: [String; 4],
    pub decoded_state: String,
    pub factors: Option<[u64; 2]>,
    pub exact_cost_at_best: f64,
}

/// Factor pair encoded by admissible state `m` (0-based), or `None` when
/// it is trivial or does not multiply to `n`.
pub fn decode_factors(layout: &FactorLayout, m: usize) -> Option<[u64; 2]> {
    let (a, b) = VQF_ADMISSIBLE[m];
    let bits = outcome_bits(a, b);
    let (p, q) = (layout.p_of(bits), layout.q_of(bits));
    (p > 1 && q > 1 && p * q == layout.n).then_some([p, q])
}

pub fn bits_string(bits: [u8; 4]) -> String {
    bits.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect()
}

pub fn run_vqf(n: u64, noise: Option<&NoiseConfig>, gd: &GdConfig, init: [f64; 3]) -> Result<VqfResult> {
    let layout = FactorLayout::new(n, 2, 2)?;
    let obj = Objective::new(CostModel::vqf(n)?, Ansatz::PumpAngles).with_noise(noise.copied());
    let run = gradient_descent(|x, k| obj.evaluate(x, k), &init, gd)?;
    let alpha = amplitudes_from_phases(&Ansatz::PumpAngles.pump(&run.best.params)?)?;
    let weights = alpha.map(|z| z.norm_sqr());
    let best = (0..4).max_by(|&a, &b| weights[a].total_cmp(&weights[b])).expect("four sources");
    let admissible_states = VQF_ADMISSIBLE.map(|(a, b)| bits_string(outcome_bits(a, b)));
    let exact = Objective::new(CostModel::vqf(n)?, Ansatz::PumpAngles);
    let exact_cost_at_best = exact.evaluate(&run.best.params, 0)?.value;
    Ok(VqfResult {
        n,
        decoded_state: admissible_states[best].clone(),
        admissible_states,
        factors: decode_factors(&layout, best),
        source_weights: weights,
        exact_cost_at_best,
        run,
    })
}

/// Writes rows of serializable records as CSV text.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Data(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Data(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Data(format!("csv: {e}")))
}

/// Pure pair state with given pump weights, for tests and examples.
pub fn balanced_state(sources: &[usize], epsilon: f64) -> Result<TwoQuquartState> {
    let mut alpha = [Complex64::new(0.0, 0.0); 4];
    let a = 1.0 / (sources.len() as f64).sqrt();
    for &m in sources {
        alpha[m - 1] = Complex64::new(a, 0.0);
    }
    TwoQuquartState::new(alpha, [0.0; 4], epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_completion_keeps_slot() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = [Complex64::new(0.0, 0.0), Complex64::new(h, 0.0), Complex64::new(h, 0.0), Complex64::new(0.0, 0.0)];
        let b = complete_basis(&[(1, v)]).unwrap();
        assert_eq!(b[1], v);
        assert!(crate::state::is_orthonormal(&b, 1e-12));
    }

    #[test]
    fn pure_fringe_has_unit_visibility() {
        let scan = heralded_interference(SourcePair::P23, 1.0, &phase_grid(36), None).unwrap();
        assert!((scan.visibility.unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn dimension_two_ideal() {
        let r = certified_dimension(2, "2-3", 1.0, None).unwrap();
        assert!((r.certified_dimension - 2.0).abs() < 1e-9);
        assert!(certified_dimension(3, "2-3", 1.0, None).is_err());
    }

    #[test]
    fn uniform_matrix_fidelity() {
        assert!((fidelity_from_matrix(2, &[[1.0 / 16.0; 4]; 4]) - 1.0 / 16.0).abs() < 1e-15);
        assert!((projector_fidelity(3, 1.0, None).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn landscape_minimum_closed_form() {
        let (e, t) = landscape_minimum(1.0, -0.6, -0.8);
        assert!((e - 0.0).abs() < 1e-15);
        let v = 1.0 - 0.6 * (2.0 * t).cos() - 0.8 * (2.0 * t).sin();
        assert!((v - e).abs() < 1e-12);
    }

    #[test]
    fn decode_admissible_states() {
        let l = FactorLayout::new(35, 2, 2).unwrap();
        assert_eq!(decode_factors(&l, 3), Some([7, 5]));
        assert_eq!(decode_factors(&l, 0), None);
        let l = FactorLayout::new(15, 2, 2).unwrap();
        assert_eq!(decode_factors(&l, 0), Some([3, 5]));
    }
}
