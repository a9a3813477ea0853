//! Joint eigenbases of commuting sets, built from the sign matrix of
//! eigenvalues and the rank-1 projectors it determines, plus explicit
//! product / Bell / GHZ constructors.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{MubError, Result};
use crate::partition::CommutingSet;
use crate::pauli::check_qubits;

/// Tolerance for identities that hold exactly in exact arithmetic.
pub const EXACT_TOL: f64 = 1e-12;
/// Tolerance for results of chained floating-point constructions.
pub const CHAINED_TOL: f64 = 1e-10;

pub type State = DVector<Complex64>;

/// Quantization axis of a single qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn letter(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }

    /// `|1_w⟩` (`up = true`, the +1 eigenvector of σ_w) or `|0_w⟩`.
    pub fn eigenvector(self, up: bool) -> [Complex64; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = if up { 1.0 } else { -1.0 };
        match self {
            Axis::Z if up => [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            Axis::Z => [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            Axis::X => [Complex64::new(h, 0.0), Complex64::new(s * h, 0.0)],
            Axis::Y => [Complex64::new(h, 0.0), Complex64::new(0.0, s * h)],
        }
    }
}

impl TryFrom<char> for Axis {
    type Error = char;
    fn try_from(c: char) -> std::result::Result<Self, char> {
        match c.to_ascii_lowercase() {
            'x' => Ok(Axis::X),
            'y' => Ok(Axis::Y),
            'z' => Ok(Axis::Z),
            other => Err(other),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Relative phase between the two branches of a cat state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum CatPhase {
    #[default]
    One,
    I,
}

impl CatPhase {
    pub fn value(self) -> Complex64 {
        match self {
            CatPhase::One => Complex64::new(1.0, 0.0),
            CatPhase::I => Complex64::new(0.0, 1.0),
        }
    }
}

/// Where a basis came from.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Members of the commuting set, in sign-matrix row order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub members: Vec<String>,
    /// Generators whose signs index the columns.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<String>,
}

/// `2^N` orthonormal state vectors of dimension `2^N`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthonormalBasis {
    n_qubits: usize,
    vectors: Vec<State>,
    provenance: Provenance,
}

impl OrthonormalBasis {
    pub fn new(vectors: Vec<State>, provenance: Provenance) -> Result<Self> {
        let d = vectors.len();
        if d < 2 || !d.is_power_of_two() {
            return Err(MubError::BasisCount { expected: d.next_power_of_two().max(2), got: d });
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != d) {
            return Err(MubError::DimensionMismatch { left: d, right: v.len() });
        }
        let n_qubits = d.trailing_zeros() as usize;
        check_qubits(n_qubits)?;
        let basis = Self { n_qubits, vectors, provenance };
        let dev = basis.gram_deviation();
        if dev > EXACT_TOL {
            return Err(MubError::NotOrthonormal(dev));
        }
        Ok(basis)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[State] {
        &self.vectors
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.provenance.label = Some(label.into());
        self
    }

    /// Largest entry of `|G - I|` for the Gram matrix `G`.
    pub fn gram_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.dotc(b) - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// `|v⟩⟨v|` for state `alpha`.
    pub fn projector(&self, alpha: usize) -> Projector {
        let v = &self.vectors[alpha];
        Projector(v * v.adjoint())
    }
}

/// Rank-1 orthogonal projector.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector(DMatrix<Complex64>);

impl Projector {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.0
    }

    /// Largest deviation from `P² = P`, `P = P†`, `Tr P = 1`.
    pub fn deviation(&self) -> f64 {
        let p = &self.0;
        let idem = (p * p - p).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let herm = (p - p.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let tr = (p.trace() - Complex64::new(1.0, 0.0)).norm();
        idem.max(herm).max(tr)
    }
}

/// Eigenvalue signs `ε[a][α]` of member `a` on joint eigenstate `α`. The
/// last row belongs to the identity and is all `+1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsilonMatrix {
    rows: Vec<Vec<i8>>,
}

impl EpsilonMatrix {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<i8>] {
        &self.rows
    }

    pub fn entry(&self, a: usize, alpha: usize) -> i8 {
        self.rows[a][alpha]
    }

    /// Integer Gram matrix of the rows; `d·I` when the rows are orthogonal.
    pub fn row_gram(&self) -> Vec<Vec<i64>> {
        self.rows
            .iter()
            .map(|r| {
                self.rows
                    .iter()
                    .map(|s| r.iter().zip(s).map(|(&a, &b)| a as i64 * b as i64).sum())
                    .collect()
            })
            .collect()
    }

    pub fn row_sums(&self) -> Vec<i64> {
        self.rows.iter().map(|r| r.iter().map(|&v| v as i64).sum()).collect()
    }
}

/// Column `α` assigns sign `-1` to generator `j` iff bit `N-1-j` of `α` is
/// set (first generator = most significant bit); row `a` is the product of
/// the generator signs in member `a`'s factorization, times its sign.
pub fn epsilon_matrix(set: &CommutingSet) -> Result<EpsilonMatrix> {
    let n = set.n_qubits();
    if set.generators().len() != n || set.len() != (1 << n) - 1 {
        return Err(MubError::InvalidGenerators(format!("set {set} is not a maximal commuting set")));
    }
    let d = 1usize << n;
    let mut rows = Vec::with_capacity(d);
    for m in set.members() {
        let (mask, sign) = set
            .factorize(m)
            .ok_or_else(|| MubError::InvalidGenerators(format!("{m} is not generated")))?;
        if sign == 0 {
            return Err(MubError::InvalidGenerators(format!("{m} has a complex factorization phase")));
        }
        let row = (0..d)
            .map(|alpha| {
                let flips = (0..n).filter(|&j| mask >> j & 1 == 1 && alpha >> (n - 1 - j) & 1 == 1).count();
                if flips % 2 == 0 {
                    sign
                } else {
                    -sign
                }
            })
            .collect();
        rows.push(row);
    }
    rows.push(vec![1; d]);
    Ok(EpsilonMatrix { rows })
}

/// `P_α = 2^{-N} (I + Σ_a ε[a][α] O_a)`.
pub fn projector(set: &CommutingSet, eps: &EpsilonMatrix, alpha: usize) -> Result<Projector> {
    let d = 1usize << set.n_qubits();
    if eps.dim() != d || alpha >= d {
        return Err(MubError::DimensionMismatch { left: d, right: eps.dim().max(alpha + 1) });
    }
    let scale = 1.0 / d as f64;
    let mut m = DMatrix::<Complex64>::identity(d, d) * Complex64::new(scale, 0.0);
    for (a, op) in set.members().iter().enumerate() {
        op.add_scaled_to(&mut m, Complex64::new(eps.entry(a, alpha) as f64 * scale, 0.0));
    }
    let p = Projector(m);
    let dev = p.deviation();
    if dev > EXACT_TOL {
        return Err(MubError::ProjectorCheck(format!("state {alpha} of {set}: deviation {dev:e}")));
    }
    Ok(p)
}

/// Multiplies by a unit phase so the first non-negligible component is real
/// and positive.
pub fn fix_global_phase(v: &mut State) {
    if let Some(first) = v.iter().copied().find(|c| c.norm() > 1e-9) {
        let rot = first.conj() / first.norm();
        for c in v.iter_mut() {
            *c *= rot;
        }
    }
}

/// Joint eigenbasis of a maximal commuting set; state `α` is the range of
/// projector `α`, read off its largest column.
pub fn eigenbasis(set: &CommutingSet) -> Result<OrthonormalBasis> {
    let eps = epsilon_matrix(set)?;
    let d = eps.dim();
    let mut vectors = Vec::with_capacity(d);
    for alpha in 0..d {
        let p = projector(set, &eps, alpha)?.into_matrix();
        let (col, norm) = (0..d)
            .map(|j| (j, p.column(j).norm()))
            .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if norm < 0.5 / (d as f64).sqrt() {
            return Err(MubError::ProjectorCheck(format!("state {alpha}: projector rank deficient")));
        }
        let mut v: State = p.column(col) / Complex64::new(norm, 0.0);
        fix_global_phase(&mut v);
        vectors.push(v);
    }
    let provenance = Provenance {
        label: None,
        members: set.members().iter().map(|m| m.to_string()).collect(),
        generators: set.generators().iter().map(|g| g.to_string()).collect(),
    };
    OrthonormalBasis::new(vectors, provenance)
}

/// Outcome of comparing two bases.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnbiasednessReport {
    /// `max | |⟨a_α|b_β⟩|² - 1/d |`.
    pub max_deviation: f64,
    /// Same quantity computed as `Tr(P_α Q_β) - 1/d` from dense projectors.
    pub trace_form_deviation: f64,
    /// Every state of one basis coincides with a state of the other, up to
    /// phase. The deviation is then `1 - 1/d` and says nothing about bias.
    pub same_basis: bool,
}

impl UnbiasednessReport {
    pub fn is_unbiased(&self, tol: f64) -> bool {
        !self.same_basis && self.max_deviation < tol && self.trace_form_deviation < tol
    }
}

pub fn verify_unbiased(a: &OrthonormalBasis, b: &OrthonormalBasis) -> Result<UnbiasednessReport> {
    if a.dim() != b.dim() {
        return Err(MubError::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    let target = 1.0 / a.dim() as f64;
    let mut max_dev = 0.0f64;
    let mut trace_dev = 0.0f64;
    let mut matched = vec![false; a.dim()];
    let qs: Vec<Projector> = (0..b.dim()).map(|beta| b.projector(beta)).collect();
    for (alpha, u) in a.vectors().iter().enumerate() {
        let p = a.projector(alpha);
        for (v, q) in b.vectors().iter().zip(&qs) {
            let overlap = u.dotc(v).norm_sqr();
            max_dev = max_dev.max((overlap - target).abs());
            let tr = p.matrix().dotc(q.matrix()).re;
            trace_dev = trace_dev.max((tr - target).abs());
            if (overlap - 1.0).abs() < CHAINED_TOL {
                matched[alpha] = true;
            }
        }
    }
    Ok(UnbiasednessReport {
        max_deviation: max_dev,
        trace_form_deviation: trace_dev,
        same_basis: matched.iter().all(|&m| m),
    })
}

fn single_qubit_states(axis: Axis) -> [State; 2] {
    [DVector::from_row_slice(&axis.eigenvector(true)), DVector::from_row_slice(&axis.eigenvector(false))]
}

/// Tensor product of factors, each acting on the listed qubits (0 = leftmost).
fn embed(n_qubits: usize, factors: &[(&[usize], &State)]) -> State {
    let d = 1usize << n_qubits;
    DVector::from_fn(d, |index, _| {
        factors.iter().fold(Complex64::new(1.0, 0.0), |acc, (qubits, state)| {
            let sub = qubits
                .iter()
                .fold(0usize, |s, &q| (s << 1) | (index >> (n_qubits - 1 - q) & 1));
            acc * state[sub]
        })
    })
}

/// Product states `|n_1 ... n_N⟩` over the given axes. State index bits
/// (most significant = qubit 0) are `1 - n_k`, so index 0 is all-up.
pub fn product_basis(axes: &[Axis]) -> Result<OrthonormalBasis> {
    let n = axes.len();
    check_qubits(n)?;
    let singles: Vec<[State; 2]> = axes.iter().map(|&a| single_qubit_states(a)).collect();
    let qubits: Vec<[usize; 1]> = (0..n).map(|k| [k]).collect();
    let vectors = (0..1usize << n)
        .map(|idx| {
            let factors: Vec<(&[usize], &State)> =
                (0..n).map(|k| (&qubits[k][..], &singles[k][idx >> (n - 1 - k) & 1])).collect();
            embed(n, &factors)
        })
        .collect();
    let label: String = axes.iter().map(|a| a.letter()).collect();
    OrthonormalBasis::new(vectors, Provenance { label: Some(format!("({label})pi")), ..Default::default() })
}

/// Cat states `(|n⟩ ± φ|n̄⟩)/√2` with `n_1 = 1` and the remaining labels
/// enumerated in binary order (all-up first); the `+` state precedes `-`.
pub fn cat_basis(axes: &[Axis], phase: CatPhase) -> Result<OrthonormalBasis> {
    let vectors = cat_states(axes, phase)?;
    OrthonormalBasis::new(vectors, Provenance::default())
}

fn cat_states(axes: &[Axis], phase: CatPhase) -> Result<Vec<State>> {
    let n = axes.len();
    if n < 2 {
        return Err(MubError::QubitCount { n, max: crate::pauli::MAX_QUBITS });
    }
    check_qubits(n)?;
    let product = product_basis(axes)?;
    let d = 1usize << n;
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut out = Vec::with_capacity(d);
    for idx in 0..d / 2 {
        let flipped = idx ^ (d - 1);
        for sign in [1.0, -1.0] {
            let v = (&product.vectors[idx] + &product.vectors[flipped] * (phase.value() * sign)) * h;
            out.push(v);
        }
    }
    Ok(out)
}

/// Two-qubit Bell basis `(|n¹ n²⟩ ± φ|n̄¹ n̄²⟩)/√2`.
pub fn bell_basis(axis1: Axis, axis2: Axis, phase: CatPhase) -> Result<OrthonormalBasis> {
    cat_basis(&[axis1, axis2], phase)
}

/// Three-qubit GHZ basis `(|n¹ n² n³⟩ ± φ|n̄¹ n̄² n̄³⟩)/√2`.
pub fn ghz_basis(axes: [Axis; 3], phase: CatPhase) -> Result<OrthonormalBasis> {
    cat_basis(&axes, phase)
}

/// One free qubit in the `free_axis` eigenbasis times a Bell pair on the
/// other two qubits of a three-qubit register (in ascending qubit order).
pub fn bell_product_basis(free_qubit: usize, free_axis: Axis, pair_axes: [Axis; 2], phase: CatPhase) -> Result<OrthonormalBasis> {
    if free_qubit > 2 {
        return Err(MubError::BadSubset(format!("free qubit {free_qubit} outside a 3-qubit register")));
    }
    let pair: Vec<usize> = (0..3).filter(|&q| q != free_qubit).collect();
    let singles = single_qubit_states(free_axis);
    let bells = cat_states(&pair_axes, phase)?;
    let free = [free_qubit];
    let mut vectors = Vec::with_capacity(8);
    for s in &singles {
        for b in &bells {
            vectors.push(embed(3, &[(&free[..], s), (&pair[..], b)]));
        }
    }
    OrthonormalBasis::new(vectors, Provenance::default())
}

impl FromStr for Axis {
    type Err = MubError;
    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Axis::try_from(c).map_err(|c| MubError::InvalidBasisSpec {
                spec: s.to_string(),
                reason: format!("unknown axis {c:?}"),
            }),
            _ => Err(MubError::InvalidBasisSpec { spec: s.to_string(), reason: "expected one axis letter".into() }),
        }
    }
}
