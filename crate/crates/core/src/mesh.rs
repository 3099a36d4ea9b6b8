//! Transfer matrices of the photonic circuit.
//!
//! Modes are numbered 1..=4 in the public API (matching the ket labels
//! `|1>..|4>`) and stored 0-based. Every stage is a triangular network of
//! three MZIs followed (pump stage) or preceded (projection stages) by an
//! array of four phase shifters.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Mul;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense complex matrix backed by `nalgebra`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    /// Builds a square or rectangular matrix from row slices.
    pub fn from_rows(rows: &[&[Complex64]]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map(|r| r.len()).unwrap_or(0);
        if n == 0 || m == 0 || rows.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidArgument("ragged or empty matrix rows".into()));
        }
        Ok(Self::from_fn(n, m, |r, c| rows[r][c]))
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |r, c| if r == c { diag[r] } else { ZERO })
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    /// Entry at 0-based `(r, c)`.
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.0[(r, c)]
    }

    pub fn row(&self, r: usize) -> Vec<Complex64> {
        (0..self.cols()).map(|c| self.0[(r, c)]).collect()
    }

    pub fn col(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows()).map(|r| self.0[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.rows())
            .map(|r| (0..self.cols()).map(|c| self.0[(r, c)] * v[c]).sum())
            .collect()
    }

    pub fn as_nalgebra(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_nalgebra(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn from_nalgebra(m: DMatrix<Complex64>) -> Self {
        Self(m)
    }

    /// `max |(U^dagger U - 1)_jk|`.
    pub fn unitarity_error(&self) -> f64 {
        if self.rows() != self.cols() {
            return f64::INFINITY;
        }
        let g = self.0.adjoint() * &self.0;
        let n = self.rows();
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in 0..n {
                let target = if r == c { ONE } else { ZERO };
                worst = worst.max((g[(r, c)] - target).norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    /// Largest entry-wise deviation.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return f64::INFINITY;
        }
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Entry-wise deviation after aligning `other` to `self` by the
    /// least-squares global phase.
    pub fn max_abs_diff_mod_phase(&self, other: &Self) -> f64 {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return f64::INFINITY;
        }
        let overlap: Complex64 = self.0.iter().zip(other.0.iter()).map(|(a, b)| b.conj() * a).sum();
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { ONE };
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - phase * b).norm())
            .fold(0.0, f64::max)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 * rhs.0)
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows() {
            let cells: Vec<String> = self
                .row(r)
                .iter()
                .map(|z| format!("{:+.6}{:+.6}i", z.re, z.im))
                .collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Which mesh a phase vector drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Pump,
    Idler,
    Signal,
}

impl Stage {
    /// Internal-arm sign of the MZIs in this stage.
    pub fn arm_sign(self) -> ArmSign {
        match self {
            Stage::Pump => ArmSign::Minus,
            Stage::Idler | Stage::Signal => ArmSign::Plus,
        }
    }
}

/// Position of the phase shifter between the MZI arms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArmSign {
    Plus,
    Minus,
}

impl ArmSign {
    pub fn value(self) -> f64 {
        match self {
            ArmSign::Plus => 1.0,
            ArmSign::Minus => -1.0,
        }
    }
}

/// Maps an angle to its representative in (-pi, pi].
pub fn canonical_angle(x: f64) -> f64 {
    if x > -PI && x <= PI {
        return x;
    }
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Three MZI angles and four phase-shifter phases of one triangular stage.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseVector {
    pub theta: [f64; 3],
    pub phi: [f64; 4],
    pub stage: Stage,
}

impl PhaseVector {
    pub fn new(theta: [f64; 3], phi: [f64; 4], stage: Stage) -> Result<Self> {
        if theta.iter().chain(phi.iter()).any(|a| !a.is_finite()) {
            return Err(Error::InvalidArgument("phase angles must be finite".into()));
        }
        Ok(Self {
            theta: theta.map(canonical_angle),
            phi: phi.map(canonical_angle),
            stage,
        })
    }

    /// Phases with all four phase shifters at zero.
    pub fn with_zero_phi(theta: [f64; 3], stage: Stage) -> Result<Self> {
        Self::new(theta, [0.0; 4], stage)
    }
}

/// The literal MZI transfer matrix
/// `i e^{±iθ/2} [[±sin(θ/2), cos(θ/2)], [cos(θ/2), ∓sin(θ/2)]]`.
pub fn mzi_unitary(theta: f64, sign: ArmSign) -> Result<ComplexMatrix> {
    if !theta.is_finite() {
        return Err(Error::InvalidArgument("MZI phase must be finite".into()));
    }
    let s = sign.value();
    let pre = I * Complex64::from_polar(1.0, s * theta / 2.0);
    let (sn, cs) = ((theta / 2.0).sin(), (theta / 2.0).cos());
    ComplexMatrix::from_rows(&[
        &[pre * (s * sn), pre * cs],
        &[pre * cs, pre * (-s * sn)],
    ])
}

/// Splitting block `[[sin θ, cos θ], [cos θ, -sin θ]]` used by the stage
/// networks. It equals `mzi_unitary(2·s·θ, s)` divided by `i e^{iθ}` for
/// either arm sign `s`, so `θ` is the splitting angle and the stripped
/// per-block phase is carried by the phase-shifter arrays.
pub fn mzi_block(theta: f64) -> ComplexMatrix {
    let (s, c) = theta.sin_cos();
    ComplexMatrix::from_fn(2, 2, |r, k| match (r, k) {
        (0, 0) => Complex64::new(s, 0.0),
        (0, 1) | (1, 0) => Complex64::new(c, 0.0),
        _ => Complex64::new(-s, 0.0),
    })
}

/// Places a 2×2 block on modes `(k, k+1)` (1-based) of an `m`-mode identity.
pub fn embed(u: &ComplexMatrix, k: usize, m: usize) -> Result<ComplexMatrix> {
    if u.rows() != 2 || u.cols() != 2 {
        return Err(Error::InvalidArgument("embed expects a 2x2 block".into()));
    }
    if k < 1 || k >= m {
        return Err(Error::IndexOutOfRange(format!("block index {k} not in 1..{m}")));
    }
    let k0 = k - 1;
    let mut out = ComplexMatrix::identity(m);
    for r in 0..2 {
        for c in 0..2 {
            out.0[(k0 + r, k0 + c)] = u.get(r, c);
        }
    }
    Ok(out)
}

/// `diag(e^{iφ_1}, ..., e^{iφ_4})`.
pub fn phase_shifter_array(phi: &[f64; 4]) -> ComplexMatrix {
    let d: Vec<Complex64> = phi.iter().map(|&p| Complex64::from_polar(1.0, p)).collect();
    ComplexMatrix::from_diagonal(&d)
}

fn block(theta: f64, k: usize) -> ComplexMatrix {
    embed(&mzi_block(theta), k, 4).expect("fixed block index")
}

/// Pump-stage matrix `U_PS(φ) · T_34(θ3) · T_12(θ2) · T_23(θ1)`.
pub fn stage_one_matrix(p: &PhaseVector) -> Result<ComplexMatrix> {
    if p.stage != Stage::Pump {
        return Err(Error::Contract(format!("stage one needs pump phases, got {:?}", p.stage)));
    }
    let [t1, t2, t3] = p.theta;
    Ok(&(&(&phase_shifter_array(&p.phi) * &block(t3, 3)) * &block(t2, 1)) * &block(t1, 2))
}

/// Projection-stage matrix `T_23(θ1) · T_12(θ2) · T_34(θ3) · U_PS(φ)`.
pub fn stage_four_matrix(p: &PhaseVector) -> Result<ComplexMatrix> {
    if p.stage == Stage::Pump {
        return Err(Error::Contract("stage four needs idler or signal phases".into()));
    }
    let [t1, t2, t3] = p.theta;
    Ok(&(&(&block(t1, 2) * &block(t2, 1)) * &block(t3, 3)) * &phase_shifter_array(&p.phi))
}

/// Pump amplitudes reaching the four sources when the laser enters mode 2.
pub fn amplitudes_from_phases(p: &PhaseVector) -> Result<[Complex64; 4]> {
    if p.stage != Stage::Pump {
        return Err(Error::Contract("amplitudes need pump phases".into()));
    }
    let [t1, t2, t3] = p.theta;
    let e = |k: usize| Complex64::from_polar(1.0, p.phi[k]);
    let (s1, c1) = t1.sin_cos();
    let (s2, c2) = t2.sin_cos();
    let (s3, c3) = t3.sin_cos();
    Ok([e(0) * (s1 * c2), e(1) * (-s1 * s2), e(2) * (c1 * s3), e(3) * (c1 * c3)])
}

/// Row 2 of the projection-stage matrix: the bra routed to output mode 2.
pub fn projection_row(p: &PhaseVector) -> Result<[Complex64; 4]> {
    let u = stage_four_matrix(p)?;
    Ok([u.get(1, 0), u.get(1, 1), u.get(1, 2), u.get(1, 3)])
}

/// Ket measured by a projection stage (complex conjugate of row 2).
pub fn projector_vector(p: &PhaseVector) -> Result<[Complex64; 4]> {
    Ok(projection_row(p)?.map(|z| z.conj()))
}

fn arg_or_zero(z: Complex64) -> f64 {
    if z.norm() > 0.0 {
        z.arg()
    } else {
        0.0
    }
}

/// Phases whose projection stage measures the ket `beta`.
pub fn phases_for_projector(beta: &[Complex64; 4], stage: Stage) -> Result<PhaseVector> {
    if stage == Stage::Pump {
        return Err(Error::Contract("projectors are realized by idler or signal stages".into()));
    }
    let norm = beta.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !norm.is_finite() || norm < 1e-12 {
        return Err(Error::InvalidArgument("projector vector must be non-zero".into()));
    }
    let t = beta.map(|z| z.conj() / norm);
    let upper = (t[0].norm_sqr() + t[1].norm_sqr()).sqrt();
    let lower = (t[2].norm_sqr() + t[3].norm_sqr()).sqrt();
    let theta1 = upper.atan2(lower);
    let theta2 = if upper > 0.0 { t[1].norm().atan2(t[0].norm()) } else { 0.0 };
    let theta3 = if lower > 0.0 { t[2].norm().atan2(t[3].norm()) } else { 0.0 };
    let phi = [
        arg_or_zero(t[0]),
        arg_or_zero(t[1]) + PI,
        arg_or_zero(t[2]),
        arg_or_zero(t[3]),
    ];
    PhaseVector::new([theta1, theta2, theta3], phi, stage)
}

/// Thermal phase-shifter response `θ = w·I² + θ0` with fringe orientation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationCurve {
    pub w_ps: f64,
    pub theta0: f64,
    pub sign: f64,
}

impl CalibrationCurve {
    pub fn current_to_phase(&self, current: f64) -> f64 {
        self.w_ps * current * current + self.theta0
    }

    /// Normalized output `½(1 ± cos 2θ)` at phase `theta`.
    pub fn intensity_at_phase(&self, theta: f64) -> f64 {
        0.5 * (1.0 + self.sign * (2.0 * theta).cos())
    }

    pub fn intensity(&self, current: f64) -> f64 {
        self.intensity_at_phase(self.current_to_phase(current))
    }
}

/// Free function form of [`CalibrationCurve::current_to_phase`].
pub fn current_to_phase(c: &CalibrationCurve, current: f64) -> f64 {
    c.current_to_phase(current)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationFit {
    pub curve: CalibrationCurve,
    pub residual_rms: f64,
}

fn calib_rms(xs: &[f64], ys: &[f64], w: f64, t0: f64, sign: f64) -> f64 {
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = 0.5 * (1.0 + sign * (2.0 * (w * x + t0)).cos()) - y;
            r * r
        })
        .sum();
    (ss / xs.len() as f64).sqrt()
}

fn calib_offset_for(xs: &[f64], ys: &[f64], w: f64, sign: f64) -> f64 {
    // s(2y-1) ≈ a cos(2wx) + b sin(2wx) with a = cos 2θ0, b = -sin 2θ0
    let (mut scc, mut sss, mut scs, mut syc, mut sys) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (s, c) = (2.0 * w * x).sin_cos();
        let t = sign * (2.0 * y - 1.0);
        scc += c * c;
        sss += s * s;
        scs += c * s;
        syc += t * c;
        sys += t * s;
    }
    let det = scc * sss - scs * scs;
    if det.abs() < 1e-300 {
        return 0.0;
    }
    let a = (syc * sss - sys * scs) / det;
    let b = (sys * scc - syc * scs) / det;
    0.5 * (-b).atan2(a)
}

fn wrap_offset(t0: f64) -> f64 {
    // the fringe is π-periodic in θ0
    let y = (t0 + PI / 2.0).rem_euclid(PI) - PI / 2.0;
    if y <= -PI / 2.0 {
        y + PI
    } else {
        y
    }
}

/// Fits `y = ½(1 + s·cos(2(w·x + θ0)))` to `(x = I², y)` samples with a
/// known fringe orientation `sign`. `w` is taken positive.
pub fn fit_calibration(samples: &[(f64, f64)], sign: f64) -> Result<CalibrationFit> {
    if samples.len() < 4 {
        return Err(Error::Fit("need at least four samples".into()));
    }
    if sign != 1.0 && sign != -1.0 {
        return Err(Error::InvalidArgument("fringe sign must be +1 or -1".into()));
    }
    if samples.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::Fit("non-finite sample".into()));
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let xmin = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let xmax = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = xmax - xmin;
    if span <= 0.0 {
        return Err(Error::Fit("degenerate samples: all currents equal".into()));
    }

    let mut sorted = xs.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let mut gaps: Vec<f64> = sorted.windows(2).map(|w| w[1] - w[0]).filter(|g| *g > 0.0).collect();
    gaps.sort_by(|a, b| a.total_cmp(b));
    let median_gap = gaps[gaps.len() / 2];
    let w_max = PI / (2.0 * median_gap);
    let xabs = xmax.abs().max(xmin.abs());
    let n_scan = ((w_max * xabs * 16.0 / PI).ceil() as usize).clamp(400, 400_000);

    let mut best = (f64::INFINITY, 0.0, 0.0);
    for j in 1..=n_scan {
        let w = w_max * j as f64 / n_scan as f64;
        let t0 = calib_offset_for(&xs, &ys, w, sign);
        let rms = calib_rms(&xs, &ys, w, t0, sign);
        if rms < best.0 {
            best = (rms, w, t0);
        }
    }

    // Gauss-Newton with Levenberg damping on (w, θ0)
    let (mut w, mut t0) = (best.1, best.2);
    let mut rms = best.0;
    let mut lambda = 1e-6;
    for _ in 0..200 {
        let (mut jtj, mut jtr) = ([[0.0f64; 2]; 2], [0.0f64; 2]);
        for (&x, &y) in xs.iter().zip(&ys) {
            let arg = 2.0 * (w * x + t0);
            let r = 0.5 * (1.0 + sign * arg.cos()) - y;
            let d = -sign * arg.sin();
            let g = [d * x, d];
            for a in 0..2 {
                jtr[a] += g[a] * r;
                for b in 0..2 {
                    jtj[a][b] += g[a] * g[b];
                }
            }
        }
        let m00 = jtj[0][0] * (1.0 + lambda);
        let m11 = jtj[1][1] * (1.0 + lambda);
        let det = m00 * m11 - jtj[0][1] * jtj[1][0];
        if det.abs() < 1e-300 {
            break;
        }
        let dw = -(m11 * jtr[0] - jtj[0][1] * jtr[1]) / det;
        let dt = -(m00 * jtr[1] - jtj[1][0] * jtr[0]) / det;
        let cand = calib_rms(&xs, &ys, w + dw, t0 + dt, sign);
        if cand <= rms {
            w += dw;
            t0 += dt;
            let done = (rms - cand).abs() < 1e-16 && dw.abs() < 1e-15 * w.abs().max(1.0);
            rms = cand;
            lambda = (lambda * 0.3).max(1e-12);
            if done {
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
    }

    if w * span < PI / 2.0 - 1e-9 {
        return Err(Error::Fit(format!(
            "samples span {:.3} rad of phase, less than half a fringe",
            w * span
        )));
    }
    Ok(CalibrationFit {
        curve: CalibrationCurve { w_ps: w, theta0: wrap_offset(t0), sign },
        residual_rms: rms,
    })
}
