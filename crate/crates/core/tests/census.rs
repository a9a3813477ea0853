use std::collections::BTreeSet;

use mub_core::entanglement::{partition_fingerprint, Category};
use mub_core::partition::{enumerate_partitions, maximal_commuting_sets, validate_partition, CommutingSet};
use mub_core::pauli::{non_identity, PauliOperator};

/// Regression constant from the exhaustive search at two qubits.
const TWO_QUBIT_PARTITIONS: usize = 6;

fn member_set(s: &CommutingSet) -> BTreeSet<PauliOperator> {
    s.members().iter().copied().collect()
}

#[test]
fn enumeration_count_matches_subset_brute_force() {
    let sets = maximal_commuting_sets(2).unwrap();
    assert_eq!(sets.len(), 15);
    // Independent oracle: every 5-subset of the 15 maximal sets, kept when disjoint.
    let mut brute = BTreeSet::new();
    let idx: Vec<usize> = (0..sets.len()).collect();
    for a in 0..15 {
        for b in a + 1..15 {
            for c in b + 1..15 {
                for d in c + 1..15 {
                    for e in d + 1..15 {
                        let pick = [a, b, c, d, e];
                        let union: BTreeSet<PauliOperator> = pick.iter().flat_map(|&i| member_set(&sets[i])).collect();
                        if union.len() == 15 {
                            brute.insert(pick.iter().map(|&i| idx[i]).collect::<Vec<_>>());
                        }
                    }
                }
            }
        }
    }
    assert_eq!(brute.len(), TWO_QUBIT_PARTITIONS);
    let all = enumerate_partitions(2).unwrap();
    assert_eq!(all.len(), TWO_QUBIT_PARTITIONS);
    let from_search: BTreeSet<Vec<BTreeSet<PauliOperator>>> =
        all.iter().map(|p| p.sets().iter().map(member_set).collect()).collect();
    let from_brute: BTreeSet<Vec<BTreeSet<PauliOperator>>> = brute
        .iter()
        .map(|pick| {
            let mut v: Vec<BTreeSet<PauliOperator>> = pick.iter().map(|&i| member_set(&sets[i])).collect();
            v.sort_by(|x, y| x.iter().next().cmp(&y.iter().next()));
            v
        })
        .collect();
    assert_eq!(from_search, from_brute);
}

#[test]
fn enumeration_is_deterministic() {
    assert_eq!(enumerate_partitions(2).unwrap(), enumerate_partitions(2).unwrap());
}

#[test]
fn every_two_qubit_partition_has_three_product_two_bell() {
    let mut max_product = 0;
    for p in enumerate_partitions(2).unwrap() {
        assert!(validate_partition(&p).is_valid());
        let f = partition_fingerprint(&p).unwrap();
        assert_eq!(f.count("product"), 3);
        assert_eq!(f.count("bell"), 2);
        assert_eq!(f.counts.values().sum::<usize>(), 5);
        // Product bases are exactly the sets generated by single-qubit operators.
        for (set, basis) in p.sets().iter().zip(&f.per_basis) {
            let local = set.members().iter().filter(|m| m.weight() == 1).count();
            assert_eq!(basis.category == Category::Product, local == 2);
        }
        max_product = max_product.max(f.count("product"));
    }
    assert_eq!(max_product, 3);
}

#[test]
fn three_disjoint_bell_sets_leave_no_completion() {
    let sets = maximal_commuting_sets(2).unwrap();
    let bell: Vec<&CommutingSet> = sets
        .iter()
        .filter(|s| {
            let f = mub_core::entanglement::classify_basis(&mub_core::basis::eigenbasis(s).unwrap()).unwrap();
            f == Category::Bell
        })
        .collect();
    assert_eq!(bell.len(), 6);
    let all: BTreeSet<PauliOperator> = non_identity(2).unwrap().into_iter().collect();
    let mut triples = 0;
    for i in 0..bell.len() {
        for j in i + 1..bell.len() {
            for k in j + 1..bell.len() {
                let used: Vec<BTreeSet<PauliOperator>> = [i, j, k].iter().map(|&t| member_set(bell[t])).collect();
                let union: BTreeSet<PauliOperator> = used.iter().flatten().copied().collect();
                if union.len() != 9 {
                    continue;
                }
                triples += 1;
                let rest: BTreeSet<PauliOperator> = all.difference(&union).copied().collect();
                assert_eq!(rest.len(), 6);
                let mut completions = 0;
                for a in &sets {
                    for b in &sets {
                        let (ma, mb) = (member_set(a), member_set(b));
                        if ma < mb && ma.is_disjoint(&mb) && ma.union(&mb).copied().collect::<BTreeSet<_>>() == rest {
                            completions += 1;
                        }
                    }
                }
                assert_eq!(completions, 0);
            }
        }
    }
    assert!(triples > 0);
}
