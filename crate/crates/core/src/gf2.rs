//! Arithmetic in GF(2^N) and the self-dual-basis machinery used by the
//! standard partition.
//!
//! Elements are polynomials over GF(2) packed into a `u32`, bit `k` holding
//! the coefficient of `x^k`.

use std::fmt;

use crate::error::{MubError, Result};
use crate::pauli::MAX_QUBITS;

/// Largest supported field degree.
pub const MAX_DEGREE: usize = MAX_QUBITS;

/// Default irreducible polynomial per degree, lowest weight first
/// (trinomials where one exists). Index = degree.
const DEFAULT_POLYS: [u32; MAX_DEGREE + 1] = [
    0,
    0b11,          // x + 1
    0b111,         // x^2 + x + 1
    0b1011,        // x^3 + x + 1
    0b1_0011,      // x^4 + x + 1
    0b10_0101,     // x^5 + x^2 + 1
    0b100_0011,    // x^6 + x + 1
    0b1000_0011,   // x^7 + x + 1
    0b1_0001_1011, // x^8 + x^4 + x^3 + x + 1
    0b10_0001_0001, // x^9 + x^4 + 1
    0b100_0000_1001, // x^10 + x^3 + 1
];

pub fn default_polynomial(degree: usize) -> Result<u32> {
    if degree == 0 || degree > MAX_DEGREE {
        return Err(MubError::QubitCount { n: degree, max: MAX_DEGREE });
    }
    Ok(DEFAULT_POLYS[degree])
}

/// Parses a coefficient bit string, most significant coefficient first
/// (`"111"` is `x^2 + x + 1`).
pub fn parse_polynomial(text: &str) -> Result<u32> {
    let text = text.trim();
    let bad = |why: &str| MubError::MalformedPolynomial(text.to_string(), why.to_string());
    if text.is_empty() {
        return Err(bad("empty"));
    }
    if text.len() > 32 {
        return Err(bad("too long"));
    }
    text.chars().try_fold(0u32, |acc, c| match c {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        other => Err(bad(&format!("unexpected character {other:?}"))),
    })
}

pub fn format_polynomial(poly: u32) -> String {
    format!("{poly:b}")
}

fn degree_of(poly: u32) -> Option<usize> {
    (poly != 0).then(|| 31 - poly.leading_zeros() as usize)
}

fn clmul_mod(mut a: u32, mut b: u32, poly: u32, degree: usize) -> u32 {
    let top = 1u32 << degree;
    let mut acc = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & top != 0 {
            a ^= poly;
        }
    }
    acc
}

fn poly_rem(mut a: u64, b: u64) -> u64 {
    let db = 63 - b.leading_zeros();
    while a != 0 && 63 - a.leading_zeros() >= db {
        a ^= b << (63 - a.leading_zeros() - db);
    }
    a
}

/// Trial division by every polynomial of degree `1..=deg/2`.
pub fn is_irreducible(poly: u32) -> bool {
    let Some(deg) = degree_of(poly) else { return false };
    if deg == 0 {
        return false;
    }
    (2u64..(1u64 << (deg / 2 + 1))).all(|d| poly_rem(poly as u64, d) != 0)
}

/// Multiplication table for GF(2^N).
#[derive(Clone, Debug)]
pub struct FieldTables {
    degree: usize,
    poly: u32,
    mul: Vec<u32>,
}

impl FieldTables {
    pub fn new(degree: usize, poly: u32) -> Result<Self> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(MubError::QubitCount { n: degree, max: MAX_DEGREE });
        }
        if degree_of(poly) != Some(degree) || !is_irreducible(poly) {
            return Err(MubError::ReduciblePolynomial(format_polynomial(poly)));
        }
        let size = 1usize << degree;
        let mut mul = vec![0u32; size * size];
        for a in 0..size {
            for b in a..size {
                let v = clmul_mod(a as u32, b as u32, poly, degree);
                mul[a * size + b] = v;
                mul[b * size + a] = v;
            }
        }
        Ok(Self { degree, poly, mul })
    }

    pub fn with_default_polynomial(degree: usize) -> Result<Self> {
        Self::new(degree, default_polynomial(degree)?)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn polynomial(&self) -> u32 {
        self.poly
    }

    pub fn size(&self) -> usize {
        1 << self.degree
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.size() as u32
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        a ^ b
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize * self.size() + b as usize]
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let (mut base, mut acc) = (a, 1u32);
        while e != 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.pow(a, self.size() as u64 - 2))
    }

    /// Absolute trace `e + e^2 + ... + e^(2^(N-1))`, which always lands in GF(2).
    pub fn trace(&self, e: u32) -> u8 {
        let mut acc = 0;
        let mut term = e;
        for _ in 0..self.degree {
            acc ^= term;
            term = self.mul(term, term);
        }
        debug_assert!(acc <= 1, "trace left the prime field");
        acc as u8
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: u32) -> Option<u64> {
        if a == 0 {
            return None;
        }
        let mut k = 1;
        let mut cur = a;
        while cur != 1 {
            cur = self.mul(cur, a);
            k += 1;
        }
        Some(k)
    }
}

/// Basis `b_1..b_N` of GF(2^N) over GF(2) with `Tr(b_i b_j) = δ_ij`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfDualBasis {
    elements: Vec<u32>,
}

impl SelfDualBasis {
    pub fn elements(&self) -> &[u32] {
        &self.elements
    }
}

/// Depth-first search over elements in increasing order; the first complete
/// basis found is returned, so the result is deterministic.
pub fn find_self_dual_basis(field: &FieldTables) -> Result<SelfDualBasis> {
    fn extend(field: &FieldTables, chosen: &mut Vec<u32>, start: u32) -> bool {
        if chosen.len() == field.degree() {
            return true;
        }
        for e in start..field.size() as u32 {
            // Tr(e^2) = Tr(e)
            if field.trace(e) != 1 || chosen.iter().any(|&b| field.trace(field.mul(b, e)) != 0) {
                continue;
            }
            chosen.push(e);
            if extend(field, chosen, e + 1) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    let mut chosen = Vec::with_capacity(field.degree());
    if extend(field, &mut chosen, 1) {
        Ok(SelfDualBasis { elements: chosen })
    } else {
        Err(MubError::NoSelfDualBasis(field.degree()))
    }
}

/// Square matrix over GF(2); row `i` is packed in `rows[i]`, bit `j` = column `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    size: usize,
    rows: Vec<u64>,
}

impl BitMatrix {
    pub fn zero(size: usize) -> Self {
        Self { size, rows: vec![0; size] }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        if value {
            self.rows[i] |= 1 << j;
        } else {
            self.rows[i] &= !(1 << j);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.size);
        for i in 0..self.size {
            for j in 0..self.size {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.transpose()
    }

    pub fn xor(&self, other: &Self) -> Self {
        Self { size: self.size, rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a ^ b).collect() }
    }

    /// Matrix-vector product; bit `i` of the result is `row_i · v`.
    pub fn apply(&self, v: u64) -> u64 {
        self.rows
            .iter()
            .enumerate()
            .fold(0, |acc, (i, row)| acc | (((row & v).count_ones() as u64 & 1) << i))
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.size {
            for j in 0..self.size {
                f.write_str(if self.get(i, j) { "1" } else { "0" })?;
            }
            if i + 1 < self.size {
                f.write_str("\n")?;
            }
        }
        Ok(())
    }
}

/// `(M_λ)_ij = Tr(λ b_i b_j)`. Symmetric by construction.
pub fn multiplication_matrix(field: &FieldTables, basis: &SelfDualBasis, lambda: u32) -> BitMatrix {
    let n = field.degree();
    let mut m = BitMatrix::zero(n);
    for (i, &bi) in basis.elements.iter().enumerate() {
        let lb = field.mul(lambda, bi);
        for (j, &bj) in basis.elements.iter().enumerate() {
            m.set(i, j, field.trace(field.mul(lb, bj)) == 1);
        }
    }
    m
}
