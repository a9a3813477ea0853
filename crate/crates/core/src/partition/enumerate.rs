use std::collections::BTreeSet;

use super::{close_under_multiplication, CommutingSet, MubPartition};
use crate::error::{MubError, Result};
use crate::pauli::{check_qubits, non_identity, PauliOperator};

/// Exhaustive partition search is limited to this many qubits.
pub const MAX_ENUMERATION_QUBITS: usize = 2;

const MAX_SET_LISTING_QUBITS: usize = 3;

/// Every maximal commuting set, in canonical order (by member list).
/// Supported for `N <= 3`.
pub fn maximal_commuting_sets(n_qubits: usize) -> Result<Vec<CommutingSet>> {
    check_qubits(n_qubits)?;
    if n_qubits > MAX_SET_LISTING_QUBITS {
        return Err(MubError::EnumerationTooLarge { n: n_qubits, max: MAX_SET_LISTING_QUBITS });
    }
    let ops = non_identity(n_qubits)?;
    let mut found: BTreeSet<Vec<PauliOperator>> = BTreeSet::new();
    let mut chosen = Vec::with_capacity(n_qubits);
    collect(&ops, 0, &mut chosen, n_qubits, &mut found);
    found
        .into_iter()
        .map(|members| CommutingSet::new(n_qubits, members))
        .collect()
}

fn collect(
    ops: &[PauliOperator],
    start: usize,
    chosen: &mut Vec<PauliOperator>,
    n: usize,
    found: &mut BTreeSet<Vec<PauliOperator>>,
) {
    if chosen.len() == n {
        if let Ok(set) = close_under_multiplication(chosen) {
            // Keep only the set's own canonical generators to avoid revisiting
            // the same set through every generator choice.
            if set.generators() == super::greedy_generators(set.members(), n).as_slice() {
                found.insert(set.members().to_vec());
            }
        }
        return;
    }
    for (i, op) in ops.iter().enumerate().skip(start) {
        if chosen.iter().all(|c| c.commutes_unchecked(op)) {
            chosen.push(*op);
            collect(ops, i + 1, chosen, n, found);
            chosen.pop();
        }
    }
}

/// All partitions for `N <= 2`, canonical and sorted.
pub fn enumerate_partitions(n_qubits: usize) -> Result<Vec<MubPartition>> {
    check_qubits(n_qubits)?;
    if n_qubits > MAX_ENUMERATION_QUBITS {
        return Err(MubError::EnumerationTooLarge { n: n_qubits, max: MAX_ENUMERATION_QUBITS });
    }
    let ops = non_identity(n_qubits)?;
    let index = |p: &PauliOperator| ops.binary_search(p).expect("member of the operator list");
    let sets = maximal_commuting_sets(n_qubits)?;
    let masks: Vec<u64> = sets
        .iter()
        .map(|s| s.members().iter().fold(0u64, |m, p| m | 1 << index(p)))
        .collect();
    let full = (1u64 << ops.len()) - 1;

    let mut out = Vec::new();
    let mut chosen = Vec::new();
    exact_cover(&masks, full, 0, &mut chosen, &mut |picked| {
        let parts = picked.iter().map(|&i| sets[i].clone()).collect();
        out.push(MubPartition::from_sets_unchecked(n_qubits, parts));
    });
    out.sort_by(|a, b| {
        let ka: Vec<&[PauliOperator]> = a.sets().iter().map(|s| s.members()).collect();
        let kb: Vec<&[PauliOperator]> = b.sets().iter().map(|s| s.members()).collect();
        ka.cmp(&kb)
    });
    Ok(out)
}

/// Branches on the lowest uncovered element, so each cover is produced once.
fn exact_cover(masks: &[u64], full: u64, covered: u64, chosen: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize])) {
    if covered == full {
        emit(chosen);
        return;
    }
    let lowest = (!covered & full).trailing_zeros();
    for (i, &m) in masks.iter().enumerate() {
        if m >> lowest & 1 == 1 && m & covered == 0 {
            chosen.push(i);
            exact_cover(masks, full, covered | m, chosen, emit);
            chosen.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::validate_partition;

    #[test]
    fn maximal_set_counts() {
        // Number of Lagrangian subspaces of the symplectic space over GF(2):
        // prod_{k=1..N} (2^k + 1).
        assert_eq!(maximal_commuting_sets(1).unwrap().len(), 3);
        assert_eq!(maximal_commuting_sets(2).unwrap().len(), 15);
        assert_eq!(maximal_commuting_sets(3).unwrap().len(), 135);
        assert!(maximal_commuting_sets(4).is_err());
    }

    #[test]
    fn one_qubit_is_forced() {
        let all = enumerate_partitions(1).unwrap();
        assert_eq!(all.len(), 1);
        assert!(validate_partition(&all[0]).is_valid());
    }

    #[test]
    fn two_qubit_partitions_are_valid_and_distinct() {
        let all = enumerate_partitions(2).unwrap();
        assert!(all.iter().all(|p| validate_partition(p).is_valid()));
        let distinct: BTreeSet<Vec<Vec<PauliOperator>>> =
            all.iter().map(|p| p.sets().iter().map(|s| s.members().to_vec()).collect()).collect();
        assert_eq!(distinct.len(), all.len());
        for p in &all {
            for op in non_identity(2).unwrap() {
                assert_eq!(p.sets().iter().filter(|s| s.contains(&op)).count(), 1);
            }
        }
    }

    #[test]
    fn rejects_three_qubits() {
        assert!(matches!(enumerate_partitions(3), Err(MubError::EnumerationTooLarge { .. })));
    }
}
