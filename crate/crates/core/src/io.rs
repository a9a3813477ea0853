//! JSON and CSV interchange formats. Pauli operators are written as labels
//! (`[+|-|+i|-i]?[IXYZ]{N}`), complex numbers as `[re, im]` pairs.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{OrthonormalBasis, Provenance};
use crate::error::{MubError, Result};
use crate::partition::{CommutingSet, MubPartition};
use crate::pauli::PauliOperator;
use crate::tomography::{DensityMatrix, ProbabilityTable};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetDoc {
    pub members: Vec<String>,
    #[serde(default)]
    pub generators: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionDoc {
    pub n_qubits: usize,
    pub sets: Vec<SetDoc>,
}

fn labels(ops: &[PauliOperator]) -> Vec<String> {
    ops.iter().map(|p| p.to_string()).collect()
}

fn parse_all(texts: &[String]) -> Result<Vec<PauliOperator>> {
    texts.iter().map(|t| t.parse()).collect()
}

impl From<&CommutingSet> for SetDoc {
    fn from(s: &CommutingSet) -> Self {
        SetDoc { members: labels(s.members()), generators: labels(s.generators()) }
    }
}

impl From<&MubPartition> for PartitionDoc {
    fn from(p: &MubPartition) -> Self {
        PartitionDoc { n_qubits: p.n_qubits(), sets: p.sets().iter().map(SetDoc::from).collect() }
    }
}

impl PartitionDoc {
    /// Parses labels and canonicalizes without validating; generators are
    /// honored when they are a valid choice, otherwise recomputed.
    pub fn to_partition_unchecked(&self) -> Result<MubPartition> {
        let sets = self
            .sets
            .iter()
            .map(|s| {
                let set = CommutingSet::from_members_unchecked(self.n_qubits, parse_all(&s.members)?);
                if s.generators.is_empty() {
                    return Ok(set);
                }
                let gens = parse_all(&s.generators)?;
                Ok(set.clone().with_generators(gens).unwrap_or(set))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MubPartition::from_sets_unchecked(self.n_qubits, sets))
    }

    pub fn to_partition(&self) -> Result<MubPartition> {
        let p = self.to_partition_unchecked()?;
        let report = crate::partition::validate_partition(&p);
        if report.is_valid() {
            Ok(p)
        } else {
            Err(MubError::InvalidPartition(report))
        }
    }
}

pub fn partition_to_json(p: &MubPartition) -> Result<String> {
    Ok(serde_json::to_string_pretty(&PartitionDoc::from(p))?)
}

pub fn partition_from_json(text: &str) -> Result<MubPartition> {
    serde_json::from_str::<PartitionDoc>(text)?.to_partition_unchecked()
}

fn to_pairs(v: &DVector<Complex64>) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn from_pairs(pairs: &[[f64; 2]]) -> DVector<Complex64> {
    DVector::from_iterator(pairs.len(), pairs.iter().map(|[re, im]| Complex64::new(*re, *im)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisDoc {
    pub n_qubits: usize,
    pub vectors: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    pub provenance: Provenance,
}

impl From<&OrthonormalBasis> for BasisDoc {
    fn from(b: &OrthonormalBasis) -> Self {
        BasisDoc {
            n_qubits: b.n_qubits(),
            vectors: b.vectors().iter().map(to_pairs).collect(),
            provenance: b.provenance().clone(),
        }
    }
}

impl BasisDoc {
    pub fn to_basis(&self) -> Result<OrthonormalBasis> {
        let basis = OrthonormalBasis::new(self.vectors.iter().map(|v| from_pairs(v)).collect(), self.provenance.clone())?;
        if basis.n_qubits() != self.n_qubits {
            return Err(MubError::QubitMismatch { left: self.n_qubits, right: basis.n_qubits() });
        }
        Ok(basis)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrixDoc {
    pub n_qubits: usize,
    /// Row-major entries.
    pub rows: Vec<Vec<[f64; 2]>>,
}

impl From<&DensityMatrix> for DensityMatrixDoc {
    fn from(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        DensityMatrixDoc {
            n_qubits: rho.n_qubits(),
            rows: (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect(),
        }
    }
}

impl DensityMatrixDoc {
    pub fn to_density_matrix(&self) -> Result<DensityMatrix> {
        let d = self.rows.len();
        if d != 1 << self.n_qubits || self.rows.iter().any(|r| r.len() != d) {
            return Err(MubError::InvalidDensityMatrix("rows do not match n_qubits".into()));
        }
        let m = DMatrix::from_fn(d, d, |r, c| Complex64::new(self.rows[r][c][0], self.rows[r][c][1]));
        DensityMatrix::new(m)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct TableRecord {
    basis: usize,
    state: usize,
    probability: f64,
}

/// CSV with header `basis,state,probability`, one line per entry, rows in
/// basis-major order.
pub fn table_to_csv(t: &ProbabilityTable) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for (basis, row) in t.rows().iter().enumerate() {
        for (state, &probability) in row.iter().enumerate() {
            w.serialize(TableRecord { basis, state, probability })?;
        }
    }
    let bytes = w.into_inner().map_err(|e| MubError::InvalidTable(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| MubError::InvalidTable(e.to_string()))
}

pub fn table_from_csv(text: &str) -> Result<ProbabilityTable> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let records = r.deserialize::<TableRecord>().collect::<std::result::Result<Vec<_>, _>>()?;
    let n_bases = records.iter().map(|r| r.basis + 1).max().unwrap_or(0);
    let dim = records.iter().map(|r| r.state + 1).max().unwrap_or(0);
    if records.len() != n_bases * dim {
        return Err(MubError::InvalidTable(format!("{} records for a {n_bases}x{dim} table", records.len())));
    }
    let mut rows = vec![vec![f64::NAN; dim]; n_bases];
    for rec in records {
        if !rows[rec.basis][rec.state].is_nan() {
            return Err(MubError::InvalidTable(format!("duplicate entry ({}, {})", rec.basis, rec.state)));
        }
        rows[rec.basis][rec.state] = rec.probability;
    }
    ProbabilityTable::new(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::eigenbasis;
    use crate::partition::{standard_partition, validate_partition};

    #[test]
    fn partition_json_shape() {
        let p = standard_partition(2, None).unwrap();
        let json = partition_to_json(&p).unwrap();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["n_qubits"], 2);
        assert_eq!(value["sets"][0]["members"], serde_json::json!(["IZ", "ZI", "ZZ"]));
        assert_eq!(value["sets"][0]["generators"], serde_json::json!(["IZ", "ZI"]));
        let back = partition_from_json(&json).unwrap();
        assert_eq!(back, p);
        assert!(validate_partition(&back).is_valid());
    }

    #[test]
    fn malformed_partition_json() {
        assert!(partition_from_json("{\"n_qubits\": 1, \"sets\": [{\"members\": [\"Q\"]}]}").is_err());
        let doc = PartitionDoc { n_qubits: 1, sets: vec![SetDoc { members: vec!["X".into()], generators: vec![] }] };
        assert!(matches!(doc.to_partition(), Err(MubError::InvalidPartition(_))));
    }

    #[test]
    fn invalid_generators_fall_back_to_greedy() {
        let doc = PartitionDoc {
            n_qubits: 2,
            sets: vec![SetDoc { members: vec!["ZZ".into(), "ZI".into(), "IZ".into()], generators: vec!["ZZ".into(), "XX".into()] }],
        };
        let p = doc.to_partition_unchecked().unwrap();
        assert_eq!(labels(p.sets()[0].generators()), vec!["IZ", "ZI"]);
    }

    #[test]
    fn basis_and_density_docs() {
        let p = standard_partition(2, None).unwrap();
        let b = eigenbasis(&p.sets()[3]).unwrap();
        let doc = BasisDoc::from(&b);
        let text = serde_json::to_string(&doc).unwrap();
        let back: BasisDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_basis().unwrap(), b);
        let rho = DensityMatrix::pure(&b.vectors()[1]).unwrap();
        let doc = DensityMatrixDoc::from(&rho);
        assert_eq!(doc.to_density_matrix().unwrap(), rho);
    }

    #[test]
    fn table_csv() {
        let t = ProbabilityTable::new(vec![vec![0.25, 0.75], vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        let csv = table_to_csv(&t).unwrap();
        assert!(csv.starts_with("basis,state,probability\n0,0,0.25\n0,1,0.75\n"));
        assert_eq!(table_from_csv(&csv).unwrap(), t);
        assert!(table_from_csv("basis,state,probability\n0,0,1.0\n0,0,0.0\n").is_err());
        assert!(table_from_csv("basis,state,probability\n0,0,1.0\n1,1,1.0\n").is_err());
    }
}
