//! Entanglement census of basis states via reduced-state purities.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{eigenbasis, OrthonormalBasis, State};
use crate::error::{MubError, Result};
use crate::partition::MubPartition;

/// Purity classification threshold.
pub const PURITY_TOL: f64 = 1e-8;

/// Reduced density matrix of `state` on the qubits in `keep` (0 = leftmost),
/// ordered as listed.
pub fn reduced_density(state: &State, keep: &[usize]) -> Result<DMatrix<Complex64>> {
    let d = state.len();
    if !d.is_power_of_two() || d < 2 {
        return Err(MubError::BadSubset(format!("state length {d} is not a power of two")));
    }
    let n = d.trailing_zeros() as usize;
    if keep.is_empty() || keep.len() >= n {
        return Err(MubError::BadSubset(format!("{keep:?} is not a nonempty proper subset of {n} qubits")));
    }
    let mut seen = vec![false; n];
    for &q in keep {
        if q >= n || std::mem::replace(&mut seen[q], true) {
            return Err(MubError::BadSubset(format!("{keep:?} has an out-of-range or repeated qubit")));
        }
    }
    let traced: Vec<usize> = (0..n).filter(|q| !seen[*q]).collect();
    let bit = |q: usize| 1usize << (n - 1 - q);
    let compose = |kept: usize, env: usize| {
        let mut idx = 0;
        for (i, &q) in keep.iter().enumerate() {
            if kept >> (keep.len() - 1 - i) & 1 == 1 {
                idx |= bit(q);
            }
        }
        for (i, &q) in traced.iter().enumerate() {
            if env >> (traced.len() - 1 - i) & 1 == 1 {
                idx |= bit(q);
            }
        }
        idx
    };
    let dk = 1usize << keep.len();
    let de = 1usize << traced.len();
    let mut rho = DMatrix::zeros(dk, dk);
    for r in 0..dk {
        for c in 0..dk {
            rho[(r, c)] = (0..de).map(|e| state[compose(r, e)] * state[compose(c, e)].conj()).sum();
        }
    }
    Ok(rho)
}

/// `Tr ρ²`.
pub fn purity(rho: &DMatrix<Complex64>) -> f64 {
    rho.iter().map(|z| z.norm_sqr()).sum()
}

fn single_purities(state: &State) -> Result<Vec<f64>> {
    let n = state.len().trailing_zeros() as usize;
    if n == 1 {
        return Ok(vec![1.0]);
    }
    (0..n).map(|q| reduced_density(state, &[q]).map(|r| purity(&r))).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "category", rename_all = "snake_case")]
pub enum Category {
    Product,
    Bell,
    /// Free qubit numbered from 1.
    BellProduct { free_qubit: usize },
    Ghz,
    Other,
}

impl Category {
    /// Key used in category counts.
    pub fn name(&self) -> &'static str {
        match self {
            Category::Product => "product",
            Category::Bell => "bell",
            Category::BellProduct { .. } => "bell_product",
            Category::Ghz => "ghz",
            Category::Other => "other",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Category::BellProduct { free_qubit } => write!(f, "bell_product(free={free_qubit})"),
            other => f.write_str(other.name()),
        }
    }
}

fn near(x: f64, target: f64) -> bool {
    (x - target).abs() < PURITY_TOL
}

/// Category of one pure state from its single-qubit purities (and, for
/// three qubits, two-qubit purities).
pub fn classify_state(state: &State) -> Result<Category> {
    let p = single_purities(state)?;
    let pure = |x: f64| near(x, 1.0);
    let mixed = |x: f64| near(x, 0.5);
    let n = p.len();
    if p.iter().all(|&x| pure(x)) {
        return Ok(Category::Product);
    }
    Ok(match n {
        2 if p.iter().all(|&x| mixed(x)) => Category::Bell,
        3 => {
            let free: Vec<usize> = (0..3).filter(|&q| pure(p[q])).collect();
            if free.len() == 1 && (0..3).filter(|&q| q != free[0]).all(|q| mixed(p[q])) {
                Category::BellProduct { free_qubit: free[0] + 1 }
            } else if p.iter().all(|&x| mixed(x)) {
                let pairs_mixed = [[0, 1], [0, 2], [1, 2]]
                    .iter()
                    .map(|pair| reduced_density(state, pair).map(|r| mixed(purity(&r))))
                    .collect::<Result<Vec<bool>>>()?;
                if pairs_mixed.iter().all(|&m| m) {
                    Category::Ghz
                } else {
                    Category::Other
                }
            } else {
                Category::Other
            }
        }
        _ => Category::Other,
    })
}

/// Category shared by every state of `basis`.
pub fn classify_basis(basis: &OrthonormalBasis) -> Result<Category> {
    let mut cats = basis.vectors().iter().map(classify_state);
    let first = cats.next().expect("bases are nonempty")?;
    for (alpha, cat) in cats.enumerate() {
        let cat = cat?;
        if cat != first {
            return Err(MubError::MixedCategories(format!("state 0 is {first}, state {} is {cat}", alpha + 1)));
        }
    }
    Ok(first)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisFingerprint {
    #[serde(flatten)]
    pub category: Category,
    /// Single-qubit purities of the basis' first state.
    pub purities: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub members: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglementFingerprint {
    pub per_basis: Vec<BasisFingerprint>,
    pub counts: BTreeMap<String, usize>,
}

impl EntanglementFingerprint {
    pub fn count(&self, name: &str) -> usize {
        self.counts.get(name).copied().unwrap_or(0)
    }

    /// Sorted free-qubit numbers of the product-Bell bases.
    pub fn free_qubits(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .per_basis
            .iter()
            .filter_map(|b| match b.category {
                Category::BellProduct { free_qubit } => Some(free_qubit),
                _ => None,
            })
            .collect();
        out.sort_unstable();
        out
    }
}

pub fn fingerprint_bases(bases: &[OrthonormalBasis]) -> Result<EntanglementFingerprint> {
    let mut per_basis = Vec::with_capacity(bases.len());
    let mut counts = BTreeMap::new();
    for b in bases {
        let category = classify_basis(b)?;
        *counts.entry(category.name().to_string()).or_insert(0) += 1;
        per_basis.push(BasisFingerprint {
            category,
            purities: single_purities(&b.vectors()[0])?,
            members: b.provenance().members.clone(),
        });
    }
    Ok(EntanglementFingerprint { per_basis, counts })
}

/// Synthesizes every set's eigenbasis and tallies categories.
pub fn partition_fingerprint(p: &MubPartition) -> Result<EntanglementFingerprint> {
    let bases = p.sets().iter().map(eigenbasis).collect::<Result<Vec<_>>>()?;
    fingerprint_bases(&bases)
}
