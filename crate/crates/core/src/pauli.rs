//! Symplectic representation of N-qubit Pauli operators.
//!
//! An operator is stored as `phase · i^{|x∧z|} · X^x Z^z`, so that a
//! qubit with both bits set reads as `Y = i·X·Z`. Qubit 0 is the leftmost
//! letter of a label and the most significant tensor factor of the dense
//! matrix; it lives in bit `n - 1` of `x_bits`/`z_bits`. With this choice
//! the bit pattern of a label read left to right is the binary numeral of
//! the stored word, and dense basis index `j` has the same layout.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{MubError, Result};

/// Largest supported qubit count. Keeps dense realizations at or below
/// 1024 x 1024.
pub const MAX_QUBITS: usize = 10;

pub(crate) fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        Err(MubError::QubitCount { n, max: MAX_QUBITS })
    } else {
        Ok(())
    }
}

/// A power of `i`: `+1`, `+i`, `-1`, `-i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: i64) -> Self {
        Phase(k.rem_euclid(4) as u8)
    }

    /// Exponent `k` such that the phase is `i^k`.
    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// `+1` or `-1` for real phases.
    pub fn sign(self) -> Option<i64> {
        match self.0 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    fn token(self) -> &'static str {
        match self.0 {
            0 => "",
            1 => "+i",
            2 => "-",
            _ => "-i",
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => f.write_str("+1"),
            1 => f.write_str("+i"),
            2 => f.write_str("-1"),
            _ => f.write_str("-i"),
        }
    }
}

/// Tensor product of single-qubit Pauli matrices times a phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    n_qubits: usize,
    x_bits: u64,
    z_bits: u64,
    phase: Phase,
}

impl PauliOperator {
    pub fn new(n_qubits: usize, x_bits: u64, z_bits: u64, phase: Phase) -> Result<Self> {
        check_qubits(n_qubits)?;
        let mask = Self::mask(n_qubits);
        if x_bits & !mask != 0 || z_bits & !mask != 0 {
            return Err(MubError::InvalidLabel {
                label: format!("x={x_bits:#b}, z={z_bits:#b}"),
                reason: format!("bits outside {n_qubits} qubits"),
            });
        }
        Ok(Self { n_qubits, x_bits, z_bits, phase })
    }

    /// Phase-`+1` operator from its bit vectors.
    pub fn from_bits(n_qubits: usize, x_bits: u64, z_bits: u64) -> Result<Self> {
        Self::new(n_qubits, x_bits, z_bits, Phase::ONE)
    }

    pub fn identity(n_qubits: usize) -> Result<Self> {
        Self::from_bits(n_qubits, 0, 0)
    }

    pub(crate) fn mask(n_qubits: usize) -> u64 {
        if n_qubits >= 64 {
            u64::MAX
        } else {
            (1u64 << n_qubits) - 1
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_bits(&self) -> u64 {
        self.x_bits
    }

    pub fn z_bits(&self) -> u64 {
        self.z_bits
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    /// Same tensor factors with phase `+1`.
    pub fn canonical(&self) -> Self {
        Self { phase: Phase::ONE, ..*self }
    }

    pub fn with_phase(&self, phase: Phase) -> Self {
        Self { phase, ..*self }
    }

    pub fn is_identity(&self) -> bool {
        self.x_bits == 0 && self.z_bits == 0
    }

    /// Letter on qubit `k` (0 = leftmost).
    pub fn letter(&self, k: usize) -> char {
        let bit = 1u64 << (self.n_qubits - 1 - k);
        match (self.x_bits & bit != 0, self.z_bits & bit != 0) {
            (false, false) => 'I',
            (true, false) => 'X',
            (true, true) => 'Y',
            (false, true) => 'Z',
        }
    }

    /// Number of non-identity tensor factors.
    pub fn weight(&self) -> u32 {
        (self.x_bits | self.z_bits).count_ones()
    }

    /// Qubits (0 = leftmost) carrying a non-identity factor.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n_qubits).filter(|&k| self.letter(k) != 'I').collect()
    }

    fn y_count(&self) -> u32 {
        (self.x_bits & self.z_bits).count_ones()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            Err(MubError::QubitMismatch { left: self.n_qubits, right: other.n_qubits })
        } else {
            Ok(())
        }
    }

    /// Operator product `self · other` with exact phase tracking.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let x = self.x_bits ^ other.x_bits;
        let z = self.z_bits ^ other.z_bits;
        // Z^z1 X^x2 = (-1)^{|z1 & x2|} X^x2 Z^z1
        let swap = 2 * (self.z_bits & other.x_bits).count_ones() as i64;
        let y_out = (x & z).count_ones() as i64;
        let k = self.phase.exponent() as i64
            + other.phase.exponent() as i64
            + self.y_count() as i64
            + other.y_count() as i64
            + swap
            - y_out;
        Self { n_qubits: self.n_qubits, x_bits: x, z_bits: z, phase: Phase::from_exponent(k) }
    }

    /// Symplectic commutation test.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.check_same(other)?;
        Ok(self.commutes_unchecked(other))
    }

    pub(crate) fn commutes_unchecked(&self, other: &Self) -> bool {
        ((self.x_bits & other.z_bits) ^ (other.x_bits & self.z_bits)).count_ones().is_multiple_of(2)
    }

    /// `Tr(self · other)` as an exact integer. Both phases must be real.
    pub fn trace_inner_product(&self, other: &Self) -> Result<i64> {
        self.check_same(other)?;
        for p in [self, other] {
            if !p.phase.is_real() {
                return Err(MubError::ComplexPhase(p.to_string()));
            }
        }
        if self.x_bits != other.x_bits || self.z_bits != other.z_bits {
            return Ok(0);
        }
        let product = self.mul_unchecked(other);
        let sign = product.phase.sign().expect("self-product of real-phase Paulis is real");
        Ok(sign << self.n_qubits)
    }

    /// Column `j` of the dense matrix: the single nonzero entry `(row, value)`.
    pub(crate) fn column_entry(&self, j: usize) -> (usize, Complex64) {
        let row = j ^ self.x_bits as usize;
        let k = self.phase.exponent() as u32
            + self.y_count()
            + 2 * ((j as u64) & self.z_bits).count_ones();
        (row, Phase::from_exponent(k as i64).to_complex())
    }

    /// `m += coeff · dense(self)` without materializing the operator.
    pub(crate) fn add_scaled_to(&self, m: &mut DMatrix<Complex64>, coeff: Complex64) {
        for j in 0..m.ncols() {
            let (row, v) = self.column_entry(j);
            m[(row, j)] += coeff * v;
        }
    }

    /// `dense(self) · v` in O(d).
    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        let mut out = DVector::zeros(v.len());
        for j in 0..v.len() {
            let (row, val) = self.column_entry(j);
            out[row] += val * v[j];
        }
        out
    }

    /// Dense `2^N x 2^N` matrix.
    pub fn dense_matrix(&self) -> Result<DMatrix<Complex64>> {
        check_qubits(self.n_qubits)?;
        let d = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(d, d);
        self.add_scaled_to(&mut m, Complex64::new(1.0, 0.0));
        Ok(m)
    }
}

impl PartialOrd for PauliOperator {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: by qubit count, then lexicographic in `(x_bits, z_bits)`,
/// then phase.
impl Ord for PauliOperator {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.n_qubits, self.x_bits, self.z_bits, self.phase).cmp(&(
            other.n_qubits,
            other.x_bits,
            other.z_bits,
            other.phase,
        ))
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.phase.token())?;
        for k in 0..self.n_qubits {
            write!(f, "{}", self.letter(k))?;
        }
        Ok(())
    }
}

/// Parses `[+|-|+i|-i]?[IXYZ]{N}`. A Unicode minus sign is accepted in place
/// of `-`.
impl FromStr for PauliOperator {
    type Err = MubError;

    fn from_str(text: &str) -> Result<Self> {
        let bad = |reason: &str| MubError::InvalidLabel { label: text.to_string(), reason: reason.to_string() };
        let normalized = text.trim().replace('\u{2212}', "-");
        let (phase, body) = if let Some(rest) = normalized.strip_prefix("+i") {
            (Phase::I, rest)
        } else if let Some(rest) = normalized.strip_prefix("-i") {
            (Phase::MINUS_I, rest)
        } else if let Some(rest) = normalized.strip_prefix('+') {
            (Phase::ONE, rest)
        } else if let Some(rest) = normalized.strip_prefix('-') {
            (Phase::MINUS_ONE, rest)
        } else {
            (Phase::ONE, normalized.as_str())
        };
        if body.is_empty() {
            return Err(bad("empty operator string"));
        }
        let n = body.chars().count();
        if n > MAX_QUBITS {
            return Err(bad(&format!("more than {MAX_QUBITS} qubits")));
        }
        let (mut x, mut z) = (0u64, 0u64);
        for c in body.chars() {
            let (xb, zb) = match c {
                'I' => (0, 0),
                'X' => (1, 0),
                'Y' => (1, 1),
                'Z' => (0, 1),
                other => return Err(bad(&format!("unexpected character {other:?}"))),
            };
            x = (x << 1) | xb;
            z = (z << 1) | zb;
        }
        PauliOperator::new(n, x, z, phase)
    }
}

/// Parses a label; alias for [`str::parse`].
pub fn parse_label(text: &str) -> Result<PauliOperator> {
    text.parse()
}

/// All `4^N` phase-`+1` operators in canonical order; identity first.
pub fn enumerate_all(n_qubits: usize) -> Result<Vec<PauliOperator>> {
    check_qubits(n_qubits)?;
    let size = 1u64 << n_qubits;
    let mut out = Vec::with_capacity((size * size) as usize);
    for x in 0..size {
        for z in 0..size {
            out.push(PauliOperator { n_qubits, x_bits: x, z_bits: z, phase: Phase::ONE });
        }
    }
    Ok(out)
}

/// Non-identity operators in canonical order.
pub fn non_identity(n_qubits: usize) -> Result<Vec<PauliOperator>> {
    Ok(enumerate_all(n_qubits)?.into_iter().skip(1).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single(letter: char) -> DMatrix<Complex64> {
        let (a, b, cc, d) = match letter {
            'I' => (c(1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)),
            'X' => (c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)),
            'Y' => (c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)),
            _ => (c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)),
        };
        DMatrix::from_row_slice(2, 2, &[a, b, cc, d])
    }

    // Hand-written Kronecker product, independent of nalgebra's.
    fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let (ar, ac, br, bc) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
        DMatrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
    }

    fn oracle(label: &str) -> DMatrix<Complex64> {
        label.chars().skip(1).fold(single(label.chars().next().unwrap()), |acc, ch| kron(&acc, &single(ch)))
    }

    fn all_labels(n: usize) -> Vec<String> {
        let mut out = vec![String::new()];
        for _ in 0..n {
            out = out.iter().flat_map(|s| "IXYZ".chars().map(move |ch| format!("{s}{ch}"))).collect();
        }
        out
    }

    #[test]
    fn decode_table_and_endianness() {
        let zi: PauliOperator = "ZI".parse().unwrap();
        assert_eq!((zi.x_bits(), zi.z_bits()), (0b00, 0b10));
        let y: PauliOperator = "Y".parse().unwrap();
        assert_eq!((y.x_bits(), y.z_bits(), y.phase()), (1, 1, Phase::ONE));
        assert_eq!(y.dense_matrix().unwrap(), single('Y'));
    }

    #[test]
    fn dense_matches_kronecker_oracle() {
        for n in 1..=3 {
            for label in all_labels(n) {
                let p: PauliOperator = label.parse().unwrap();
                assert_eq!(p.dense_matrix().unwrap(), oracle(&label), "{label}");
            }
        }
        let zz: PauliOperator = "ZZ".parse().unwrap();
        let diag: Vec<f64> = (0..4).map(|i| zz.dense_matrix().unwrap()[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, -1.0, -1.0, 1.0]);
        let ii: PauliOperator = "II".parse().unwrap();
        assert_eq!(ii.dense_matrix().unwrap(), DMatrix::identity(4, 4));
    }

    #[test]
    fn phase_prefixes() {
        for (text, phase) in [("+XY", Phase::ONE), ("-XY", Phase::MINUS_ONE), ("+iXY", Phase::I), ("-iXY", Phase::MINUS_I), ("\u{2212}XY", Phase::MINUS_ONE)] {
            let p: PauliOperator = text.parse().unwrap();
            assert_eq!(p.phase(), phase);
            assert_eq!(p.dense_matrix().unwrap(), oracle("XY") * phase.to_complex());
        }
        assert_eq!("-iXY".parse::<PauliOperator>().unwrap().to_string(), "-iXY");
        assert_eq!("+XY".parse::<PauliOperator>().unwrap().to_string(), "XY");
    }

    #[test]
    fn parse_errors() {
        for bad in ["", "+", "XQ", "*X", "ix", "+jX", "XYZXYZXYZXY"] {
            assert!(bad.parse::<PauliOperator>().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn multiply_examples() {
        let x: PauliOperator = "X".parse().unwrap();
        let z: PauliOperator = "Z".parse().unwrap();
        assert_eq!(x.multiply(&z).unwrap().to_string(), "-iY");
        let zx: PauliOperator = "ZX".parse().unwrap();
        let xz: PauliOperator = "XZ".parse().unwrap();
        let prod = zx.multiply(&xz).unwrap();
        assert_eq!(prod.canonical().to_string(), "YY");
        assert!(prod.phase().is_real());
        assert_eq!(prod.dense_matrix().unwrap(), oracle("ZX") * oracle("XZ"));
        assert!(x.multiply(&"XX".parse().unwrap()).is_err());
    }

    #[test]
    fn multiply_phase_agrees_with_dense_exhaustively() {
        for n in 1..=2 {
            let ops = enumerate_all(n).unwrap();
            for p in &ops {
                for q in &ops {
                    let lhs = p.multiply(q).unwrap().dense_matrix().unwrap();
                    let rhs = p.dense_matrix().unwrap() * q.dense_matrix().unwrap();
                    assert_eq!(lhs, rhs, "{p} * {q}");
                }
                assert!(p.multiply(p).unwrap().is_identity());
                assert_eq!(p.multiply(p).unwrap().phase(), Phase::ONE);
            }
        }
    }

    #[test]
    fn commutation_examples() {
        let p = |s: &str| s.parse::<PauliOperator>().unwrap();
        assert!(p("ZI").commutes(&p("IZ")).unwrap());
        assert!(!p("X").commutes(&p("Z")).unwrap());
        assert!(p("XY").commutes(&p("YX")).unwrap());
        assert!(p("X").commutes(&p("XX")).is_err());
    }

    #[test]
    fn commutation_agrees_with_dense_exhaustively() {
        for n in 1..=2 {
            let ops = enumerate_all(n).unwrap();
            for p in &ops {
                for q in &ops {
                    let (a, b) = (p.dense_matrix().unwrap(), q.dense_matrix().unwrap());
                    let zero = (&a * &b - &b * &a).iter().all(|v| v.norm() == 0.0);
                    assert_eq!(p.commutes(q).unwrap(), zero);
                }
            }
        }
    }

    #[test]
    fn trace_inner_product_examples() {
        let p = |s: &str| s.parse::<PauliOperator>().unwrap();
        assert_eq!(p("XY").trace_inner_product(&p("XY")).unwrap(), 4);
        assert_eq!(p("XI").trace_inner_product(&p("IZ")).unwrap(), 0);
        assert_eq!(p("-XY").trace_inner_product(&p("XY")).unwrap(), -4);
        assert!(p("+iXY").trace_inner_product(&p("XY")).is_err());
        let ops = enumerate_all(2).unwrap();
        for a in &ops {
            for b in &ops {
                let dense = (a.dense_matrix().unwrap() * b.dense_matrix().unwrap()).trace();
                assert_eq!(a.trace_inner_product(b).unwrap() as f64, dense.re);
            }
        }
    }

    #[test]
    fn enumerate_order_and_counts() {
        let one: Vec<String> = enumerate_all(1).unwrap().iter().map(|p| p.to_string()).collect();
        assert_eq!(one, vec!["I", "Z", "X", "Y"]);
        let two = enumerate_all(2).unwrap();
        assert_eq!(two.len(), 16);
        assert_eq!(two.iter().filter(|p| p.is_identity()).count(), 1);
        assert!(two.windows(2).all(|w| w[0] < w[1]));
        assert!(enumerate_all(0).is_err());
        assert!(enumerate_all(MAX_QUBITS + 1).is_err());
    }

    #[test]
    fn non_identity_are_traceless_involutions() {
        for p in non_identity(3).unwrap() {
            let m = p.dense_matrix().unwrap();
            assert_eq!(m.trace(), Complex64::new(0.0, 0.0));
            assert_eq!(&m * &m, DMatrix::identity(8, 8));
            assert_eq!(m.adjoint(), m);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn pauli(n: usize) -> impl Strategy<Value = PauliOperator> {
            let size = 1u64 << n;
            (0..size, 0..size, 0u8..4)
                .prop_map(move |(x, z, k)| PauliOperator::new(n, x, z, Phase::from_exponent(k as i64)).unwrap())
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]

            #[test]
            fn commutes_matches_dense_n3((p, q) in (pauli(3), pauli(3))) {
                let (a, b) = (p.dense_matrix().unwrap(), q.dense_matrix().unwrap());
                let zero = (&a * &b - &b * &a).iter().all(|v| v.norm() == 0.0);
                prop_assert_eq!(p.commutes(&q).unwrap(), zero);
            }

            #[test]
            fn commutes_matches_dense_n4((p, q) in (pauli(4), pauli(4))) {
                let (a, b) = (p.dense_matrix().unwrap(), q.dense_matrix().unwrap());
                let zero = (&a * &b - &b * &a).iter().all(|v| v.norm() == 0.0);
                prop_assert_eq!(p.commutes(&q).unwrap(), zero);
            }

            #[test]
            fn multiply_is_associative((a, b, c) in (pauli(4), pauli(4), pauli(4))) {
                let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
                let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
                prop_assert_eq!(left, right);
            }

            #[test]
            fn label_round_trip(p in pauli(5)) {
                prop_assert_eq!(p.to_string().parse::<PauliOperator>().unwrap(), p);
            }

            #[test]
            fn trace_matches_dense_n3((p, q) in (pauli(3), pauli(3))) {
                let (p, q) = (p.canonical(), q.canonical());
                let dense = (p.dense_matrix().unwrap() * q.dense_matrix().unwrap()).trace();
                prop_assert_eq!(p.trace_inner_product(&q).unwrap() as f64, dense.re);
            }
        }
    }
}
