//! Weighted Pauli observables on four qubits and their measurement settings.
//!
//! Qubits 1 and 2 live on the idler photon, qubits 3 and 4 on the signal
//! photon; within a photon the first qubit is the most significant bit of
//! the mode label, so `|b1 b2>` is mode `1 + 2·b1 + b2`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::ComplexMatrix;
use crate::state::{basis_ket, inner, is_orthonormal, Ket4, MeasurementSetting};
use crate::tables::{h2_table, HamiltonianRow, HamiltonianTable};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);
const EIG_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        match self {
            Pauli::I => [[ONE, ZERO], [ZERO, ONE]],
            Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
            Pauli::Y => [[ZERO, -I], [I, ZERO]],
            Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }

    fn as_matrix(self) -> ComplexMatrix {
        let m = self.matrix();
        ComplexMatrix::from_fn(2, 2, |r, c| m[r][c])
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of four single-qubit Paulis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    pub ops: [Pauli; 4],
}

impl PauliString {
    pub fn new(ops: [Pauli; 4]) -> Self {
        Self { ops }
    }

    pub fn identity() -> Self {
        Self { ops: [Pauli::I; 4] }
    }

    /// Product of `Z` on the given 1-based qubits.
    pub fn z_on(qubits: &[usize]) -> Self {
        let mut ops = [Pauli::I; 4];
        for &q in qubits {
            ops[q - 1] = Pauli::Z;
        }
        Self { ops }
    }

    pub fn is_identity(&self) -> bool {
        self.ops.iter().all(|p| *p == Pauli::I)
    }

    pub fn is_diagonal(&self) -> bool {
        self.ops.iter().all(|p| matches!(p, Pauli::I | Pauli::Z))
    }

    /// Two-qubit factor acting on photon 0 (idler) or 1 (signal).
    pub fn photon_part(&self, photon: usize) -> [Pauli; 2] {
        [self.ops[2 * photon], self.ops[2 * photon + 1]]
    }

    pub fn photon_matrix(&self, photon: usize) -> ComplexMatrix {
        let [a, b] = self.photon_part(photon);
        a.as_matrix().kron(&b.as_matrix())
    }

    /// 16×16 Kronecker product, qubit 1 most significant.
    pub fn dense_matrix(&self) -> ComplexMatrix {
        self.ops
            .iter()
            .skip(1)
            .fold(self.ops[0].as_matrix(), |acc, p| acc.kron(&p.as_matrix()))
    }

    /// `<bra|P|ket>` for computational bit strings.
    pub fn matrix_element(&self, bra: [u8; 4], ket: [u8; 4]) -> Complex64 {
        (0..4)
            .map(|q| self.ops[q].matrix()[bra[q] as usize][ket[q] as usize])
            .product()
    }

    /// Eigenvalue of a diagonal string on a computational bit string.
    pub fn z_eigenvalue(&self, bits: [u8; 4]) -> Option<f64> {
        if !self.is_diagonal() {
            return None;
        }
        let flips = (0..4).filter(|&q| self.ops[q] == Pauli::Z && bits[q] == 1).count();
        Some(if flips % 2 == 0 { 1.0 } else { -1.0 })
    }

    /// True when the two strings commute as operators on each photon
    /// separately, so one local basis per photon diagonalizes both.
    pub fn commutes_per_photon(&self, other: &Self) -> bool {
        (0..2).all(|ph| {
            let a = self.photon_part(ph);
            let b = other.photon_part(ph);
            let anti = (0..2).filter(|&q| a[q] != Pauli::I && b[q] != Pauli::I && a[q] != b[q]).count();
            anti % 2 == 0
        })
    }

    /// Qubit-wise commutation (every position equal or identity).
    pub fn commutes_qubitwise(&self, other: &Self) -> bool {
        (0..4).all(|q| self.ops[q] == Pauli::I || other.ops[q] == Pauli::I || self.ops[q] == other.ops[q])
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.ops {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.trim().chars().collect();
        if chars.len() != 4 {
            return Err(Error::InvalidArgument(format!("Pauli string {s:?} must have length 4")));
        }
        let mut ops = [Pauli::I; 4];
        for (k, ch) in chars.iter().enumerate() {
            ops[k] = match ch.to_ascii_uppercase() {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => return Err(Error::InvalidArgument(format!("bad Pauli symbol {ch:?} in {s:?}"))),
            };
        }
        Ok(Self { ops })
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Mode label `1 + 2·b1 + b2` of a two-qubit register.
pub fn qubit_to_ququart(b1: u8, b2: u8) -> Result<usize> {
    if b1 > 1 || b2 > 1 {
        return Err(Error::InvalidArgument("qubit values must be 0 or 1".into()));
    }
    Ok(1 + 2 * b1 as usize + b2 as usize)
}

/// Inverse of [`qubit_to_ququart`].
pub fn ququart_to_qubits(m: usize) -> (u8, u8) {
    let k = (m - 1) as u8;
    (k >> 1, k & 1)
}

/// Bits `|b1 b2 b3 b4>` of the pair outcome `(m1, m2)`.
pub fn outcome_bits(m1: usize, m2: usize) -> [u8; 4] {
    let (a, b) = ququart_to_qubits(m1);
    let (c, d) = ququart_to_qubits(m2);
    [a, b, c, d]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: f64,
    pub string: PauliString,
}

/// `Σ_k w_k P_k` with distinct strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedObservable {
    pub terms: Vec<Term>,
}

impl WeightedObservable {
    /// Builds the observable, summing the weights of repeated strings.
    pub fn new(terms: impl IntoIterator<Item = (f64, PauliString)>) -> Result<Self> {
        let mut out: Vec<Term> = Vec::new();
        for (coeff, string) in terms {
            if !coeff.is_finite() {
                return Err(Error::InvalidArgument(format!("coefficient of {string} is not finite")));
            }
            match out.iter_mut().find(|t| t.string == string) {
                Some(t) => t.coeff += coeff,
                None => out.push(Term { coeff, string }),
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidArgument("observable has no terms".into()));
        }
        Ok(Self { terms: out })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn dense_matrix(&self) -> ComplexMatrix {
        self.terms.iter().fold(ComplexMatrix::zeros(16, 16), |acc, t| {
            let m = t.string.dense_matrix();
            ComplexMatrix::from_fn(16, 16, |r, c| acc.get(r, c) + m.get(r, c) * t.coeff)
        })
    }

    /// `<bra|H|ket>` on computational bit strings.
    pub fn matrix_element(&self, bra: [u8; 4], ket: [u8; 4]) -> Complex64 {
        self.terms.iter().map(|t| t.string.matrix_element(bra, ket) * t.coeff).sum()
    }

    /// Same strings with scaled weights.
    pub fn scaled(&self, factor: f64) -> Self {
        Self { terms: self.terms.iter().map(|t| Term { coeff: t.coeff * factor, string: t.string }).collect() }
    }
}

/// Members of one simultaneously measurable group with their common basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutingGroup {
    pub member_indices: Vec<usize>,
    pub idler_basis: [Ket4; 4],
    pub signal_basis: [Ket4; 4],
    /// Eigenvalue of each member on outcome `[m1-1][m2-1]`.
    pub eig: Vec<[[f64; 4]; 4]>,
}

impl CommutingGroup {
    /// Local rotation of one photon: row `m` is the bra of basis ket `m`.
    pub fn rotation(&self, photon: usize) -> ComplexMatrix {
        let basis = if photon == 0 { &self.idler_basis } else { &self.signal_basis };
        ComplexMatrix::from_fn(4, 4, |r, c| basis[r][c].conj())
    }

    pub fn setting(&self) -> MeasurementSetting {
        MeasurementSetting::from_bases(&self.idler_basis, &self.signal_basis)
            .expect("group bases are orthonormal by construction")
    }

    pub fn is_computational(&self) -> bool {
        let comp: [Ket4; 4] = std::array::from_fn(|m| basis_ket(m + 1));
        self.idler_basis == comp && self.signal_basis == comp
    }
}

fn normalize_phase(v: &mut Ket4) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(lead) = v.iter().find(|z| z.norm() >= max - 1e-12) {
        let ph = lead.conj() / lead.norm();
        for z in v.iter_mut() {
            *z *= ph;
        }
    }
}

/// Orthonormal basis of common eigenvectors of commuting 4×4 Paulis.
pub fn joint_eigenbasis(ops: &[ComplexMatrix]) -> Result<[Ket4; 4]> {
    let comp: [Ket4; 4] = std::array::from_fn(|m| basis_ket(m + 1));
    let mut distinct: Vec<&ComplexMatrix> = Vec::new();
    for op in ops {
        let is_identity = op.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12;
        if !is_identity && !distinct.iter().any(|d| d.max_abs_diff(op) < 1e-12) {
            distinct.push(op);
        }
    }
    let diagonal = distinct
        .iter()
        .all(|op| (0..4).all(|r| (0..4).all(|c| r == c || op.get(r, c).norm() < 1e-12)));
    if diagonal {
        return Ok(comp);
    }

    // spectral projectors Π_λ = Π_j (1 + λ_j P_j)/2 over sign patterns λ
    let r = distinct.len();
    let mut projectors: Vec<ComplexMatrix> = Vec::new();
    for mask in 0..(1usize << r) {
        let mut proj = ComplexMatrix::identity(4);
        for (j, op) in distinct.iter().enumerate() {
            let sign = if mask >> j & 1 == 0 { 1.0 } else { -1.0 };
            let f = ComplexMatrix::from_fn(4, 4, |a, b| {
                let id = if a == b { ONE } else { ZERO };
                (id + op.get(a, b) * sign) * 0.5
            });
            proj = &proj * &f;
        }
        let trace: f64 = (0..4).map(|k| proj.get(k, k).re).sum();
        if trace > 0.5 {
            projectors.push(proj);
        }
    }

    let mut basis: Vec<Ket4> = Vec::new();
    let try_add = |basis: &mut Vec<Ket4>, proj: &ComplexMatrix, e: &Ket4| -> bool {
        let mut v: Ket4 = proj.apply(e).try_into().expect("length 4");
        for b in basis.iter() {
            let c = inner(b, &v);
            for k in 0..4 {
                v[k] -= b[k] * c;
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-8 {
            for z in v.iter_mut() {
                *z /= n;
            }
            normalize_phase(&mut v);
            basis.push(v);
            true
        } else {
            false
        }
    };
    for e in &comp {
        for proj in &projectors {
            if try_add(&mut basis, proj, e) {
                break;
            }
        }
    }
    for e in &comp {
        for proj in &projectors {
            if basis.len() < 4 {
                try_add(&mut basis, proj, e);
            }
        }
    }
    if basis.len() != 4 {
        return Err(Error::Construction("operators do not share a complete eigenbasis".into()));
    }
    let out: [Ket4; 4] = [basis[0], basis[1], basis[2], basis[3]];
    if !is_orthonormal(&out, 1e-10) {
        return Err(Error::Construction("joint eigenbasis is not orthonormal".into()));
    }
    Ok(out)
}

fn local_eigenvalue(op: &ComplexMatrix, v: &Ket4) -> Result<f64> {
    let w = op.apply(v);
    let lambda = inner(v, &w.clone().try_into().expect("length 4"));
    let resid = (0..4).map(|k| (w[k] - v[k] * lambda).norm_sqr()).sum::<f64>().sqrt();
    if resid > EIG_TOL || lambda.im.abs() > EIG_TOL {
        return Err(Error::Construction("basis vector is not an eigenvector of a group member".into()));
    }
    Ok(lambda.re)
}

/// Eigenvalue tensor of `string` on the product basis, by direct matrix action.
pub fn eigenvalue_tensor(string: &PauliString, idler: &[Ket4; 4], signal: &[Ket4; 4]) -> Result<[[f64; 4]; 4]> {
    let oi = string.photon_matrix(0);
    let os = string.photon_matrix(1);
    let mut out = [[0.0; 4]; 4];
    for a in 0..4 {
        let li = local_eigenvalue(&oi, &idler[a])?;
        for b in 0..4 {
            out[a][b] = li * local_eigenvalue(&os, &signal[b])?;
        }
    }
    Ok(out)
}

/// `Re <b|P|b>` on the product basis. Equal to the eigenvalue tensor when
/// the basis diagonalizes `string`, and usable on states confined to a
/// subspace where a partial rotation suffices.
pub fn expectation_tensor(string: &PauliString, idler: &[Ket4; 4], signal: &[Ket4; 4]) -> [[f64; 4]; 4] {
    let oi = string.photon_matrix(0);
    let os = string.photon_matrix(1);
    let ev = |op: &ComplexMatrix, v: &Ket4| inner(v, &op.apply(v).try_into().expect("length 4"));
    std::array::from_fn(|a| std::array::from_fn(|b| (ev(&oi, &idler[a]) * ev(&os, &signal[b])).re))
}

/// Builds a group with per-photon joint eigenbases for the given members.
pub fn build_group(obs: &WeightedObservable, member_indices: Vec<usize>) -> Result<CommutingGroup> {
    let strings: Vec<PauliString> = member_indices.iter().map(|&k| obs.terms[k].string).collect();
    let idler_ops: Vec<ComplexMatrix> = strings.iter().map(|s| s.photon_matrix(0)).collect();
    let signal_ops: Vec<ComplexMatrix> = strings.iter().map(|s| s.photon_matrix(1)).collect();
    let idler_basis = joint_eigenbasis(&idler_ops)?;
    let signal_basis = joint_eigenbasis(&signal_ops)?;
    let eig = strings
        .iter()
        .map(|s| eigenvalue_tensor(s, &idler_basis, &signal_basis))
        .collect::<Result<Vec<_>>>()?;
    Ok(CommutingGroup { member_indices, idler_basis, signal_basis, eig })
}

/// Greedy first-fit partition into per-photon commuting groups.
pub fn group_commuting(obs: &WeightedObservable) -> Result<Vec<CommutingGroup>> {
    let mut parts: Vec<Vec<usize>> = Vec::new();
    for (k, term) in obs.terms.iter().enumerate() {
        let slot = parts
            .iter_mut()
            .find(|g| g.iter().all(|&j| obs.terms[j].string.commutes_per_photon(&term.string)));
        match slot {
            Some(g) => g.push(k),
            None => parts.push(vec![k]),
        }
    }
    parts.into_iter().map(|g| build_group(obs, g)).collect()
}

/// Measurement setting and eigenvalue tensors of a group.
pub fn build_setting(group: &CommutingGroup) -> (MeasurementSetting, Vec<[[f64; 4]; 4]>) {
    (group.setting(), group.eig.clone())
}

/// Partial rotation that only separates modes 2 and 3 of each photon.
/// Rows are the bras measured on output 2.
pub fn partial_rotation() -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let r = Complex64::new(h, 0.0);
    let ih = Complex64::new(0.0, h);
    ComplexMatrix::from_rows(&[
        &[ONE, ZERO, ZERO, ZERO],
        &[ZERO, r, ih, ZERO],
        &[ZERO, r, -ih, ZERO],
        &[ZERO, ZERO, ZERO, ONE],
    ])
    .expect("fixed shape")
}

/// Kets measured by the partial rotation.
pub fn partial_rotation_basis() -> [Ket4; 4] {
    let u = partial_rotation();
    std::array::from_fn(|m| std::array::from_fn(|k| u.get(m, k).conj()))
}

/// H2 observable at bond length `r` (Å) from the bundled table.
pub fn load_h2_table(r: f64) -> Result<WeightedObservable> {
    let table = h2_table();
    let row = table
        .rows
        .iter()
        .find(|row| row.r.is_some_and(|x| (x - r).abs() < 1e-9))
        .ok_or_else(|| {
            let grid: Vec<String> = crate::tables::h2_grid().iter().map(|g| format!("{g}")).collect();
            Error::Lookup(format!("R = {r} is not on the tabulated grid {{{}}}", grid.join(", ")))
        })?;
    observable_from_row(table, row)
}

pub fn observable_from_row(table: &HamiltonianTable, row: &HamiltonianRow) -> Result<WeightedObservable> {
    if row.coeffs.len() != table.operators.len() {
        return Err(Error::Data("coefficient count does not match operator list".into()));
    }
    let terms = table
        .operators
        .iter()
        .zip(&row.coeffs)
        .map(|(op, &c)| Ok((c, op.parse::<PauliString>()?)))
        .collect::<Result<Vec<_>>>()?;
    WeightedObservable::new(terms)
}

/// Register layout of the factoring problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorLayout {
    pub n: u64,
    pub mx: u32,
    pub my: u32,
}

impl FactorLayout {
    pub fn new(n: u64, mx: u32, my: u32) -> Result<Self> {
        if n.is_multiple_of(2) || !(3..=49).contains(&n) {
            return Err(Error::InvalidArgument(format!("N must be an odd semiprime in [3, 49], got {n}")));
        }
        if !is_semiprime(n) {
            return Err(Error::InvalidArgument(format!("N must be an odd semiprime, {n} is not")));
        }
        if mx == 0 || my == 0 || mx + my != 4 {
            return Err(Error::InvalidArgument("register widths must be positive and sum to 4".into()));
        }
        Ok(Self { n, mx, my })
    }

    /// `p = 1 + Σ 2^{mx-j+1} x_j` from bits of qubits `1..=mx`.
    pub fn p_of(&self, bits: [u8; 4]) -> u64 {
        1 + (0..self.mx as usize).map(|j| (bits[j] as u64) << (self.mx as usize - j)).sum::<u64>()
    }

    /// `q = 1 + Σ 2^{my-j+1} y_j` from bits of qubits `mx+1..=4`.
    pub fn q_of(&self, bits: [u8; 4]) -> u64 {
        let off = self.mx as usize;
        1 + (0..self.my as usize).map(|j| (bits[off + j] as u64) << (self.my as usize - j)).sum::<u64>()
    }

    pub fn cost(&self, bits: [u8; 4]) -> i64 {
        let d = self.n as i64 - (self.p_of(bits) * self.q_of(bits)) as i64;
        d * d
    }
}

fn is_prime(k: u64) -> bool {
    k >= 2 && (2..).take_while(|d| d * d <= k).all(|d| !k.is_multiple_of(d))
}

pub fn is_semiprime(n: u64) -> bool {
    (2..n).find(|d| n.is_multiple_of(*d)).is_some_and(|d| is_prime(d) && is_prime(n / d))
}

/// All `Z` strings on four qubits ordered by weight, then lexicographically.
pub fn z_strings() -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for size in 0..=4usize {
        let mut subsets: Vec<Vec<usize>> = (0u8..16)
            .filter(|m| m.count_ones() as usize == size)
            .map(|m| (1..=4).filter(|q| m >> (q - 1) & 1 == 1).collect())
            .collect();
        subsets.sort();
        out.extend(subsets);
    }
    out
}

/// Exact integer weights of the factoring Hamiltonian `(N - p·q)²` written
/// over `Z` strings in [`z_strings`] order.
pub fn vqf_coefficients(layout: &FactorLayout) -> Result<Vec<(i64, PauliString)>> {
    // multilinear polynomial over bits, indexed by variable bitmask
    let mut p = [0i64; 16];
    let mut q = [0i64; 16];
    p[0] = 1;
    q[0] = 1;
    for j in 0..layout.mx as usize {
        p[1 << j] += 1i64 << (layout.mx as usize - j);
    }
    for j in 0..layout.my as usize {
        q[1 << (layout.mx as usize + j)] += 1i64 << (layout.my as usize - j);
    }
    let mul = |a: &[i64; 16], b: &[i64; 16]| {
        let mut out = [0i64; 16];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i | j] += x * y;
            }
        }
        out
    };
    let pq = mul(&p, &q);
    let mut d = pq.map(|c| -c);
    d[0] += layout.n as i64;
    let poly = mul(&d, &d);

    // x_i = (1 - Z_i)/2, so x_S contributes 2^{-|S|} (-1)^{|T|} to Z_T for T ⊆ S
    let mut out = Vec::with_capacity(16);
    for qubits in z_strings() {
        let t: usize = qubits.iter().map(|q| 1usize << (q - 1)).sum();
        let mut scaled = 0i64;
        for (s, &c) in poly.iter().enumerate() {
            if s & t == t {
                scaled += c << (4 - (s as u32).count_ones());
            }
        }
        if t.count_ones() % 2 == 1 {
            scaled = -scaled;
        }
        if scaled % 16 != 0 {
            return Err(Error::Numerical("factoring weights are not integral".into()));
        }
        out.push((scaled / 16, PauliString::z_on(&qubits)));
    }
    Ok(out)
}

pub fn build_vqf_hamiltonian(n: u64, mx: u32, my: u32) -> Result<WeightedObservable> {
    let layout = FactorLayout::new(n, mx, my)?;
    WeightedObservable::new(vqf_coefficients(&layout)?.into_iter().map(|(w, s)| (w as f64, s)))
}

/// Factoring observables exported in the Hamiltonian table schema.
pub fn vqf_table(ns: &[u64]) -> Result<HamiltonianTable> {
    let operators = z_strings().iter().map(|q| PauliString::z_on(q).to_string()).collect();
    let rows = ns
        .iter()
        .map(|&n| {
            let layout = FactorLayout::new(n, 2, 2)?;
            let coeffs = vqf_coefficients(&layout)?.into_iter().map(|(w, _)| w as f64).collect();
            Ok(HamiltonianRow { r: None, n: Some(n), coeffs })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HamiltonianTable { system: "VQF-2x2".into(), units: None, operators, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_mapping() {
        assert_eq!(qubit_to_ququart(0, 0).unwrap(), 1);
        assert_eq!(qubit_to_ququart(0, 1).unwrap(), 2);
        assert_eq!(qubit_to_ququart(1, 0).unwrap(), 3);
        assert_eq!(qubit_to_ququart(1, 1).unwrap(), 4);
        assert!(qubit_to_ququart(2, 0).is_err());
        for m in 1..=4 {
            let (a, b) = ququart_to_qubits(m);
            assert_eq!(qubit_to_ququart(a, b).unwrap(), m);
        }
    }

    #[test]
    fn parse_and_display() {
        let p: PauliString = "yxxy".parse().unwrap();
        assert_eq!(p.to_string(), "YXXY");
        assert!("ZZZ".parse::<PauliString>().is_err());
        assert!("ZZQZ".parse::<PauliString>().is_err());
    }

    #[test]
    fn z1_eigenvalues_on_computational_basis() {
        let obs = WeightedObservable::new([(1.0, PauliString::z_on(&[1]))]).unwrap();
        let groups = group_commuting(&obs).unwrap();
        assert_eq!(groups.len(), 1);
        assert!(groups[0].is_computational());
        for a in 0..4 {
            let want = if a < 2 { 1.0 } else { -1.0 };
            assert!(groups[0].eig[0][a].iter().all(|&x| x == want));
        }
    }

    #[test]
    fn h2_split_into_two_groups() {
        let obs = load_h2_table(0.736).unwrap();
        let groups = group_commuting(&obs).unwrap();
        let sizes: Vec<usize> = groups.iter().map(|g| g.member_indices.len()).collect();
        assert_eq!(sizes, vec![11, 4]);
        assert_eq!(groups[1].member_indices, vec![11, 12, 13, 14]);
        assert!(groups[0].is_computational());
        // the XY group is not qubit-wise commuting
        let a = obs.terms[11].string;
        let b = obs.terms[12].string;
        assert!(!a.commutes_qubitwise(&b));
        assert!(a.commutes_per_photon(&b));
    }

    #[test]
    fn h2_table_values() {
        let obs = load_h2_table(0.736).unwrap();
        assert_eq!(obs.terms[0].coeff, -0.097066);
        assert_eq!(obs.terms[11].coeff, -0.045303);
        assert_eq!(load_h2_table(3.0).unwrap().terms[0].coeff, -0.54551);
        let err = load_h2_table(0.75).unwrap_err();
        assert!(matches!(err, Error::Lookup(ref m) if m.contains("0.736")));
    }

    #[test]
    fn hartree_fock_energy() {
        let obs = load_h2_table(0.736).unwrap();
        let e: f64 = obs.terms.iter().map(|t| t.coeff * t.string.z_eigenvalue([1, 0, 1, 0]).unwrap_or(0.0)).sum();
        assert!((e + 1.1168).abs() < 5e-4, "{e}");
    }

    #[test]
    fn vqf_rows_are_exact() {
        let rows: [(u64, [i64; 16]); 3] = [
            (15, [186, -96, -48, -96, -48, 84, 136, 68, 68, 34, 84, -64, -32, -64, -32, 16]),
            (21, [210, 0, 0, 0, 0, 84, 88, 44, 44, 22, 84, -64, -32, -64, -32, 16]),
            (35, [546, 224, 112, 224, 112, 84, -24, -12, -12, -6, 84, -64, -32, -64, -32, 16]),
        ];
        for (n, want) in rows {
            let got: Vec<i64> = vqf_coefficients(&FactorLayout::new(n, 2, 2).unwrap()).unwrap().iter().map(|t| t.0).collect();
            assert_eq!(got, want.to_vec(), "N = {n}");
        }
    }

    #[test]
    fn vqf_diagonal_matches_brute_force() {
        for n in [9u64, 15, 21, 25, 33, 35, 39, 49] {
            let layout = FactorLayout::new(n, 2, 2).unwrap();
            let terms = vqf_coefficients(&layout).unwrap();
            for k in 0..16u8 {
                let bits = [k >> 3 & 1, k >> 2 & 1, k >> 1 & 1, k & 1];
                let e: i64 = terms.iter().map(|(w, s)| *w * s.z_eigenvalue(bits).unwrap() as i64).sum();
                assert_eq!(e, layout.cost(bits), "N = {n} bits {bits:?}");
            }
        }
    }

    #[test]
    fn vqf_layout_checks() {
        assert!(FactorLayout::new(34, 2, 2).is_err());
        assert!(FactorLayout::new(51, 2, 2).is_err());
        assert!(FactorLayout::new(45, 2, 2).is_err());
        assert!(FactorLayout::new(35, 1, 2).is_err());
        let l = FactorLayout::new(35, 2, 2).unwrap();
        assert_eq!((l.p_of([1, 1, 1, 0]), l.q_of([1, 1, 1, 0])), (7, 5));
        assert_eq!(l.cost([1, 1, 1, 0]), 0);
        let msg = build_vqf_hamiltonian(20, 2, 2).unwrap_err().to_string();
        assert!(msg.contains("N must be an odd semiprime"));
    }

    #[test]
    fn partial_rotation_rows() {
        let u = partial_rotation();
        assert!(u.is_unitary(1e-12));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((u.get(1, 2) - Complex64::new(0.0, h)).norm() < 1e-15);
    }
}
