//! Maximal commuting sets of Pauli operators and partitions of the
//! `4^N - 1` non-identity operators into `2^N + 1` of them.

mod enumerate;
mod labels;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

pub use enumerate::{enumerate_partitions, maximal_commuting_sets, MAX_ENUMERATION_QUBITS};
pub use labels::{partition_from_labels, preset, stabilizing_set, BasisKind, BasisLabelSpec, Preset};

use crate::error::{MubError, Result};
use crate::gf2::{find_self_dual_basis, multiplication_matrix, FieldTables};
use crate::pauli::{check_qubits, non_identity, PauliOperator, Phase};

/// Incremental GF(2) row reduction over `(x|z)` rows.
#[derive(Default)]
struct XorBasis {
    pivots: Vec<u64>,
}

impl XorBasis {
    fn reduce(&self, mut v: u64) -> u64 {
        for &p in &self.pivots {
            v = v.min(v ^ p);
        }
        v
    }

    /// Inserts `v`; false if it was already in the span.
    fn insert(&mut self, v: u64) -> bool {
        let r = self.reduce(v);
        if r == 0 {
            return false;
        }
        self.pivots.push(r);
        self.pivots.sort_unstable_by(|a, b| b.cmp(a));
        true
    }
}

fn packed(p: &PauliOperator) -> u64 {
    (p.x_bits() << p.n_qubits()) | p.z_bits()
}

/// Greedy choice of independent members in the given order.
fn greedy_generators(members: &[PauliOperator], limit: usize) -> Vec<PauliOperator> {
    let mut basis = XorBasis::default();
    let mut out = Vec::new();
    for m in members {
        if out.len() == limit {
            break;
        }
        if basis.insert(packed(m)) {
            out.push(*m);
        }
    }
    out
}

/// A set of pairwise commuting non-identity Pauli operators (phase `+1`),
/// stored in canonical order with a designated generating subset.
///
/// Sets built through [`CommutingSet::new`] or
/// [`close_under_multiplication`] are guaranteed maximal (`2^N - 1`
/// members, closed under multiplication). [`CommutingSet::from_members_unchecked`]
/// exists so malformed input can still be carried to the validator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CommutingSet {
    n_qubits: usize,
    members: Vec<PauliOperator>,
    generators: Vec<PauliOperator>,
}

impl CommutingSet {
    /// Validates that `members` form a maximal commuting set.
    pub fn new(n_qubits: usize, members: Vec<PauliOperator>) -> Result<Self> {
        let set = Self::from_members_unchecked(n_qubits, members);
        let issues = set.issues(0);
        if issues.is_empty() {
            Ok(set)
        } else {
            Err(MubError::InvalidPartition(ValidationReport { violations: issues }))
        }
    }

    /// Canonicalizes phases and order without checking any invariant.
    /// Generators are the first independent members, possibly fewer than N.
    pub fn from_members_unchecked(n_qubits: usize, members: Vec<PauliOperator>) -> Self {
        let mut members: Vec<PauliOperator> = members.iter().map(PauliOperator::canonical).collect();
        members.sort();
        let generators = greedy_generators(&members, n_qubits);
        Self { n_qubits, members, generators }
    }

    /// Replaces the designated generators. They must be members, independent,
    /// and exactly `N` of them.
    pub fn with_generators(mut self, generators: Vec<PauliOperator>) -> Result<Self> {
        let generators: Vec<PauliOperator> = generators.iter().map(PauliOperator::canonical).collect();
        if generators.len() != self.n_qubits {
            return Err(MubError::InvalidGenerators(format!(
                "expected {} generators, got {}",
                self.n_qubits,
                generators.len()
            )));
        }
        if let Some(g) = generators.iter().find(|g| !self.members.contains(g)) {
            return Err(MubError::InvalidGenerators(format!("{g} is not a member")));
        }
        if greedy_generators(&generators, self.n_qubits).len() != self.n_qubits {
            return Err(MubError::InvalidGenerators("generators are dependent".into()));
        }
        self.generators = generators;
        Ok(self)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn members(&self) -> &[PauliOperator] {
        &self.members
    }

    pub fn generators(&self) -> &[PauliOperator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, p: &PauliOperator) -> bool {
        self.members.binary_search(&p.canonical()).is_ok()
    }

    /// Smallest member in canonical order; sort key for partitions.
    pub fn key(&self) -> Option<&PauliOperator> {
        self.members.first()
    }

    /// Writes `p` as `sign · g_{j1} g_{j2} ...` over the generators (in
    /// generator order). Returns the subset mask (bit `j` = generator `j`) and
    /// the sign, or `None` if `p` is not generated.
    pub fn factorize(&self, p: &PauliOperator) -> Option<(u64, i8)> {
        let target = p.canonical();
        (1u64..1 << self.generators.len()).find_map(|mask| {
            let prod = self.product_of(mask);
            (prod.canonical() == target).then(|| (mask, prod.phase().sign().map_or(0, |s| s as i8)))
        })
    }

    fn product_of(&self, mask: u64) -> PauliOperator {
        let start = PauliOperator::identity(self.n_qubits).expect("qubit count already validated");
        self.generators
            .iter()
            .enumerate()
            .filter(|(j, _)| mask >> j & 1 == 1)
            .fold(start, |acc, (_, g)| acc.mul_unchecked(g))
    }

    /// Problems with this set in isolation; `index` labels them in reports.
    fn issues(&self, index: usize) -> Vec<Violation> {
        let n = self.n_qubits;
        let mut out = Vec::new();
        if self.members.iter().any(|m| m.n_qubits() != n) {
            out.push(Violation::QubitMismatch { set: index });
            return out;
        }
        let expected = (1usize << n) - 1;
        let distinct: BTreeSet<&PauliOperator> = self.members.iter().collect();
        if distinct.len() != self.members.len() {
            for w in self.members.windows(2).filter(|w| w[0] == w[1]) {
                out.push(Violation::DuplicateMember { set: index, op: w[0].to_string() });
            }
        }
        if self.members.iter().any(PauliOperator::is_identity) {
            out.push(Violation::IdentityMember { set: index });
        }
        if distinct.len() != expected {
            out.push(Violation::SetSize { set: index, expected, got: distinct.len() });
        }
        for (i, a) in self.members.iter().enumerate() {
            for b in &self.members[i + 1..] {
                if !a.commutes_unchecked(b) {
                    out.push(Violation::NonCommuting { set: index, a: a.to_string(), b: b.to_string() });
                    continue;
                }
                let prod = a.mul_unchecked(b).canonical();
                if !prod.is_identity() && !distinct.contains(&prod) {
                    out.push(Violation::NotClosed {
                        set: index,
                        a: a.to_string(),
                        b: b.to_string(),
                        product: prod.to_string(),
                    });
                }
            }
        }
        out
    }
}

impl fmt::Display for CommutingSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.members.iter().map(|m| m.to_string()).collect();
        write!(f, "{{{}}}", labels.join(", "))
    }
}

/// Closure of `N` independent, pairwise commuting generators.
pub fn close_under_multiplication(generators: &[PauliOperator]) -> Result<CommutingSet> {
    let n = match generators.first() {
        Some(g) => g.n_qubits(),
        None => return Err(MubError::InvalidGenerators("no generators".into())),
    };
    check_qubits(n)?;
    if generators.len() != n {
        return Err(MubError::InvalidGenerators(format!("expected {n} generators, got {}", generators.len())));
    }
    for (i, a) in generators.iter().enumerate() {
        for b in &generators[i + 1..] {
            if !a.commutes(b)? {
                return Err(MubError::InvalidGenerators(format!("{a} and {b} do not commute")));
            }
        }
    }
    let canonical: Vec<PauliOperator> = generators.iter().map(PauliOperator::canonical).collect();
    if greedy_generators(&canonical, n).len() != n {
        return Err(MubError::InvalidGenerators("generators are dependent".into()));
    }
    let mut members = Vec::with_capacity((1 << n) - 1);
    for mask in 1u64..1 << n {
        let prod = canonical
            .iter()
            .enumerate()
            .filter(|(j, _)| mask >> j & 1 == 1)
            .fold(PauliOperator::identity(n)?, |acc, (_, g)| acc.mul_unchecked(g));
        members.push(prod.canonical());
    }
    members.sort();
    Ok(CommutingSet { n_qubits: n, members, generators: canonical })
}

/// One way a candidate partition fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    SetCount { expected: usize, got: usize },
    SetSize { set: usize, expected: usize, got: usize },
    QubitMismatch { set: usize },
    IdentityMember { set: usize },
    DuplicateMember { set: usize, op: String },
    NonCommuting { set: usize, a: String, b: String },
    NotClosed { set: usize, a: String, b: String, product: String },
    Overlap { op: String, sets: Vec<usize> },
    Missing { op: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SetCount { expected, got } => write!(f, "expected {expected} sets, found {got}"),
            Violation::SetSize { set, expected, got } => {
                write!(f, "set {set}: expected {expected} distinct members, found {got}")
            }
            Violation::QubitMismatch { set } => write!(f, "set {set}: qubit count mismatch"),
            Violation::IdentityMember { set } => write!(f, "set {set}: contains the identity"),
            Violation::DuplicateMember { set, op } => write!(f, "set {set}: {op} listed twice"),
            Violation::NonCommuting { set, a, b } => write!(f, "set {set}: {a} and {b} anticommute"),
            Violation::NotClosed { set, a, b, product } => {
                write!(f, "set {set}: product of {a} and {b} ({product}) is missing")
            }
            Violation::Overlap { op, sets } => write!(f, "{op} appears in sets {sets:?}"),
            Violation::Missing { op } => write!(f, "{op} is not covered"),
        }
    }
}

/// Result of [`validate_partition`]; empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}

/// `2^N + 1` commuting sets, sorted by smallest member.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MubPartition {
    n_qubits: usize,
    sets: Vec<CommutingSet>,
}

impl MubPartition {
    /// Canonicalizes and validates.
    pub fn new(n_qubits: usize, sets: Vec<CommutingSet>) -> Result<Self> {
        let p = Self::from_sets_unchecked(n_qubits, sets);
        let report = validate_partition(&p);
        if report.is_valid() {
            Ok(p)
        } else {
            Err(MubError::InvalidPartition(report))
        }
    }

    /// Canonical ordering only; use [`validate_partition`] to check.
    pub fn from_sets_unchecked(n_qubits: usize, mut sets: Vec<CommutingSet>) -> Self {
        sets.sort_by(|a, b| a.key().cmp(&b.key()));
        Self { n_qubits, sets }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn sets(&self) -> &[CommutingSet] {
        &self.sets
    }

    /// Index of the set containing `p`.
    pub fn set_of(&self, p: &PauliOperator) -> Option<usize> {
        self.sets.iter().position(|s| s.contains(p))
    }
}

/// Checks set count, sizes, internal commutation, closure, disjointness and
/// coverage.
pub fn validate_partition(p: &MubPartition) -> ValidationReport {
    let n = p.n_qubits;
    let mut violations = Vec::new();
    if check_qubits(n).is_err() {
        violations.push(Violation::SetCount { expected: 0, got: p.sets.len() });
        return ValidationReport { violations };
    }
    let expected_sets = (1usize << n) + 1;
    if p.sets.len() != expected_sets {
        violations.push(Violation::SetCount { expected: expected_sets, got: p.sets.len() });
    }
    let mut owners: HashMap<PauliOperator, Vec<usize>> = HashMap::new();
    for (i, set) in p.sets.iter().enumerate() {
        if set.n_qubits != n {
            violations.push(Violation::QubitMismatch { set: i });
            continue;
        }
        violations.extend(set.issues(i));
        let distinct: BTreeSet<&PauliOperator> = set.members.iter().collect();
        for m in distinct {
            owners.entry(*m).or_default().push(i);
        }
    }
    let all = non_identity(n).expect("qubit count checked above");
    for op in &all {
        match owners.get(op) {
            None => violations.push(Violation::Missing { op: op.to_string() }),
            Some(sets) if sets.len() > 1 => {
                violations.push(Violation::Overlap { op: op.to_string(), sets: sets.clone() })
            }
            _ => {}
        }
    }
    ValidationReport { violations }
}

/// The finite-field construction: the pure-Z set plus, for each field
/// element λ, the set `{(x = v, z = M_λ v) : v ≠ 0}`. Symmetric `M_λ` makes
/// each set commute; distinct `M_λ` make the sets disjoint.
pub fn standard_partition(n_qubits: usize, poly: Option<u32>) -> Result<MubPartition> {
    check_qubits(n_qubits)?;
    let field = match poly {
        Some(poly) => FieldTables::new(n_qubits, poly)?,
        None => FieldTables::with_default_polynomial(n_qubits)?,
    };
    let basis = find_self_dual_basis(&field)?;
    let size = 1u64 << n_qubits;
    let mut sets = Vec::with_capacity(size as usize + 1);
    let z_members = (1..size).map(|v| PauliOperator::from_bits(n_qubits, 0, v)).collect::<Result<Vec<_>>>()?;
    sets.push(CommutingSet::from_members_unchecked(n_qubits, z_members));
    for lambda in field.elements() {
        let m = multiplication_matrix(&field, &basis, lambda);
        let members = (1..size)
            .map(|v| PauliOperator::new(n_qubits, v, m.apply(v), Phase::ONE))
            .collect::<Result<Vec<_>>>()?;
        sets.push(CommutingSet::from_members_unchecked(n_qubits, members));
    }
    MubPartition::new(n_qubits, sets)
}
