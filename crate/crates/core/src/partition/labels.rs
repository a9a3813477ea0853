//! Basis descriptors in the `(axes)subscript` notation and the route from
//! explicit basis states back to Pauli operator sets.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{CommutingSet, MubPartition};
use crate::basis::{
    bell_product_basis, cat_basis, product_basis, Axis, CatPhase, OrthonormalBasis, CHAINED_TOL,
};
use crate::error::{MubError, Result};
use crate::pauli::{non_identity, MAX_QUBITS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasisKind {
    Product,
    /// Two-qubit cat basis.
    Bell,
    /// Cat basis on three or more qubits.
    Ghz,
    /// Three qubits: one unentangled qubit (0-based index) times a Bell pair.
    BellProduct { free_qubit: usize },
}

/// A basis such as `(zz)pi`, `(yz)Bi`, `(xxx)Gi` or `(x1)(yz)Bi`.
///
/// `axes` holds one letter per qubit in qubit order; for
/// [`BasisKind::BellProduct`] the free qubit's axis sits at its own
/// position and the pair axes fill the other two positions in ascending
/// order. In text form the free qubit is numbered from 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisLabelSpec {
    pub kind: BasisKind,
    pub axes: Vec<Axis>,
    pub phase: CatPhase,
}

impl BasisLabelSpec {
    pub fn n_qubits(&self) -> usize {
        self.axes.len()
    }

    /// Explicit basis states for this descriptor.
    pub fn basis(&self) -> Result<OrthonormalBasis> {
        let basis = match self.kind {
            BasisKind::Product => product_basis(&self.axes)?,
            BasisKind::Bell | BasisKind::Ghz => cat_basis(&self.axes, self.phase)?,
            BasisKind::BellProduct { free_qubit } => {
                let pair: Vec<Axis> =
                    (0..3).filter(|&q| q != free_qubit).map(|q| self.axes[q]).collect();
                bell_product_basis(free_qubit, self.axes[free_qubit], [pair[0], pair[1]], self.phase)?
            }
        };
        Ok(basis.with_label(self.to_string()))
    }

    fn check(&self, text: &str) -> Result<()> {
        let bad = |reason: String| Err(MubError::InvalidBasisSpec { spec: text.to_string(), reason });
        let n = self.n_qubits();
        if n == 0 || n > MAX_QUBITS {
            return bad(format!("{n} qubits"));
        }
        match self.kind {
            BasisKind::Product if self.phase != CatPhase::One => bad("product bases carry no phase".into()),
            BasisKind::Bell if n != 2 => bad("Bell bases act on two qubits".into()),
            BasisKind::Ghz if n < 3 => bad("GHZ bases need at least three qubits".into()),
            BasisKind::BellProduct { free_qubit } if n != 3 || free_qubit > 2 => {
                bad("product-Bell bases act on three qubits".into())
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for BasisLabelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters = |axes: &mut dyn Iterator<Item = &Axis>| axes.map(|a| a.letter()).collect::<String>();
        let i = if self.phase == CatPhase::I { "i" } else { "" };
        match self.kind {
            BasisKind::Product => write!(f, "({})pi", letters(&mut self.axes.iter())),
            BasisKind::Bell => write!(f, "({})B{i}", letters(&mut self.axes.iter())),
            BasisKind::Ghz => write!(f, "({})G{i}", letters(&mut self.axes.iter())),
            BasisKind::BellProduct { free_qubit } => {
                let pair = letters(&mut self.axes.iter().enumerate().filter(|(q, _)| *q != free_qubit).map(|(_, a)| a));
                write!(f, "({}{})({pair})B{i}", self.axes[free_qubit].letter(), free_qubit + 1)
            }
        }
    }
}

fn parse_axes(text: &str, letters: &str) -> Result<Vec<Axis>> {
    letters
        .chars()
        .map(|c| {
            Axis::try_from(c).map_err(|c| MubError::InvalidBasisSpec {
                spec: text.to_string(),
                reason: format!("unknown axis {c:?}"),
            })
        })
        .collect()
}

/// Accepts `pi`/`π` for product bases, `B`/`Bi` and `G`/`Gi` for cat bases,
/// optional `_` before the subscript, and `(x1)` or `(x^1)` for a free qubit.
impl FromStr for BasisLabelSpec {
    type Err = MubError;

    fn from_str(text: &str) -> Result<Self> {
        let bad = |reason: &str| MubError::InvalidBasisSpec { spec: text.to_string(), reason: reason.to_string() };
        let compact: String = text.chars().filter(|c| !c.is_whitespace() && *c != '_' && *c != '^').collect();
        let mut groups = Vec::new();
        let mut rest = compact.as_str();
        while let Some(stripped) = rest.strip_prefix('(') {
            let close = stripped.find(')').ok_or_else(|| bad("unbalanced parenthesis"))?;
            groups.push(&stripped[..close]);
            rest = &stripped[close + 1..];
        }
        let suffix = rest;
        let (kind_letter, phase) = match suffix {
            "pi" | "π" | "" => ('p', CatPhase::One),
            "B" => ('B', CatPhase::One),
            "Bi" => ('B', CatPhase::I),
            "G" => ('G', CatPhase::One),
            "Gi" => ('G', CatPhase::I),
            _ => return Err(bad("unknown subscript")),
        };
        let spec = match (groups.as_slice(), kind_letter) {
            ([axes], 'p') => BasisLabelSpec { kind: BasisKind::Product, axes: parse_axes(text, axes)?, phase },
            ([axes], 'B') => BasisLabelSpec { kind: BasisKind::Bell, axes: parse_axes(text, axes)?, phase },
            ([axes], 'G') => BasisLabelSpec { kind: BasisKind::Ghz, axes: parse_axes(text, axes)?, phase },
            ([free, pair], 'B') => {
                let mut chars = free.chars();
                let axis = chars.next().ok_or_else(|| bad("empty free-qubit group"))?;
                let qubit: usize = chars.as_str().parse().map_err(|_| bad("free qubit needs a 1-based index"))?;
                if !(1..=3).contains(&qubit) {
                    return Err(bad("free qubit must be 1, 2 or 3"));
                }
                let pair = parse_axes(text, pair)?;
                if pair.len() != 2 {
                    return Err(bad("Bell pair needs two axes"));
                }
                let mut axes = Vec::with_capacity(3);
                let mut pair_iter = pair.into_iter();
                for q in 0..3 {
                    if q == qubit - 1 {
                        axes.push(parse_axes(text, &axis.to_string())?[0]);
                    } else {
                        axes.push(pair_iter.next().expect("two pair axes"));
                    }
                }
                BasisLabelSpec { kind: BasisKind::BellProduct { free_qubit: qubit - 1 }, axes, phase }
            }
            _ => return Err(bad("expected (axes)pi, (axes)B[i], (axes)G[i] or (aK)(axes)B[i]")),
        };
        spec.check(text)?;
        Ok(spec)
    }
}

/// Named basis choices for two and three qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// Two qubits: three product bases and two Bell bases.
    Fig1,
    /// Three qubits: three product bases and six GHZ bases.
    Fig2,
    /// Three qubits: nine product-Bell bases in three groups of three.
    Fig4,
}

impl Preset {
    pub fn labels(self) -> &'static [&'static str] {
        match self {
            Preset::Fig1 => &["(zz)pi", "(xy)pi", "(yx)pi", "(zx)B", "(yz)Bi"],
            Preset::Fig2 => &[
                "(xyz)pi", "(yzx)pi", "(zxy)pi", "(xxx)Gi", "(yyy)G", "(zzz)G", "(xzy)G", "(yxz)G", "(zyx)G",
            ],
            Preset::Fig4 => &[
                "(x1)(yz)Bi", "(y1)(zx)B", "(z1)(xy)B", "(x2)(xy)B", "(y2)(yz)Bi", "(z2)(zx)B", "(x3)(zx)B",
                "(y3)(xy)B", "(z3)(yz)Bi",
            ],
        }
    }

    pub fn specs(self) -> Vec<BasisLabelSpec> {
        self.labels().iter().map(|l| l.parse().expect("preset labels parse")).collect()
    }
}

impl FromStr for Preset {
    type Err = MubError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fig1" => Ok(Preset::Fig1),
            "fig2" => Ok(Preset::Fig2),
            "fig4" => Ok(Preset::Fig4),
            _ => Err(MubError::InvalidBasisSpec { spec: s.to_string(), reason: "unknown preset".into() }),
        }
    }
}

pub fn preset(which: Preset) -> Vec<BasisLabelSpec> {
    which.specs()
}

/// All non-identity Pauli operators having every basis vector as an
/// eigenvector, found by brute force.
pub fn stabilizing_set(basis: &OrthonormalBasis) -> Result<CommutingSet> {
    let dev = basis.gram_deviation();
    if dev > CHAINED_TOL {
        return Err(MubError::NotOrthonormal(dev));
    }
    let n = basis.n_qubits();
    let members: Vec<_> = non_identity(n)?
        .into_iter()
        .filter(|p| {
            basis.vectors().iter().all(|v| {
                // |⟨v|P v⟩| = 1 iff v is an eigenvector of the ±1-valued P
                (v.dotc(&p.apply(v)).norm() - 1.0).abs() < CHAINED_TOL
            })
        })
        .collect();
    let expected = (1usize << n) - 1;
    if members.len() != expected {
        return Err(MubError::NotPauliEigenbasis { found: members.len(), expected });
    }
    CommutingSet::new(n, members)
}

/// Builds each described basis, recovers its operator set and assembles the
/// (validated) partition.
pub fn partition_from_labels(specs: &[BasisLabelSpec]) -> Result<MubPartition> {
    let n = specs.first().map(BasisLabelSpec::n_qubits).ok_or_else(|| MubError::InvalidBasisSpec {
        spec: String::new(),
        reason: "no bases given".into(),
    })?;
    if let Some(s) = specs.iter().find(|s| s.n_qubits() != n) {
        return Err(MubError::QubitMismatch { left: n, right: s.n_qubits() });
    }
    let sets = specs
        .iter()
        .map(|s| stabilizing_set(&s.basis()?))
        .collect::<Result<Vec<_>>>()?;
    MubPartition::new(n, sets)
}
