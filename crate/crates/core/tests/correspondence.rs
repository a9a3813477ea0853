use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

use mub_core::basis::{eigenbasis, epsilon_matrix, projector, verify_unbiased};
use mub_core::partition::{enumerate_partitions, partition_from_labels, preset, stabilizing_set, standard_partition, BasisKind};
use mub_core::{BasisLabelSpec, CommutingSet};
use mub_core::tomography::{mub_probabilities, reconstruct, trace_distance, DensityMatrix, MubFrame};
use mub_core::{CatPhase, MubPartition, Preset};

fn tested_partitions() -> Vec<MubPartition> {
    let mut out: Vec<MubPartition> = (1..=4).map(|n| standard_partition(n, None).unwrap()).collect();
    out.extend(enumerate_partitions(2).unwrap());
    for which in [Preset::Fig1, Preset::Fig2, Preset::Fig4] {
        out.push(partition_from_labels(&preset(which)).unwrap());
    }
    out
}

#[test]
fn stabilizing_set_inverts_eigenbasis() {
    for p in tested_partitions().iter().filter(|p| p.n_qubits() <= 3) {
        for s in p.sets() {
            let back = stabilizing_set(&eigenbasis(s).unwrap()).unwrap();
            assert_eq!(back.members(), s.members());
        }
    }
}

#[test]
fn projector_overlaps_follow_operator_traces() {
    // Tr(P^A_α P^B_β) - 2^{-N} = 4^{-N} Σ'Σ' ε ε Tr(O^A O^B), with the traces taken exactly.
    for p in tested_partitions().iter().filter(|p| p.n_qubits() <= 3) {
        let d = 1usize << p.n_qubits();
        let eps: Vec<_> = p.sets().iter().map(|s| epsilon_matrix(s).unwrap()).collect();
        for (ia, sa) in p.sets().iter().enumerate() {
            for (ib, sb) in p.sets().iter().enumerate() {
                for alpha in 0..d {
                    for beta in 0..d {
                        let pa = projector(sa, &eps[ia], alpha).unwrap();
                        let pb = projector(sb, &eps[ib], beta).unwrap();
                        let lhs = (pa.matrix() * pb.matrix()).trace().re - 1.0 / d as f64;
                        let mut sum = 0i64;
                        for (a, oa) in sa.members().iter().enumerate() {
                            for (b, ob) in sb.members().iter().enumerate() {
                                let tr = oa.trace_inner_product(ob).unwrap();
                                sum += eps[ia].entry(a, alpha) as i64 * eps[ib].entry(b, beta) as i64 * tr;
                            }
                        }
                        let rhs = sum as f64 / (d * d) as f64;
                        assert!((lhs - rhs).abs() < 1e-12);
                        let expect = if ia == ib { (alpha == beta) as u8 as f64 } else { 1.0 / d as f64 };
                        assert!(((pa.matrix() * pb.matrix()).trace().re - expect).abs() < 1e-12);
                    }
                }
            }
        }
    }
}

#[test]
fn noiseless_tomography_round_trip_for_every_partition() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(2024);
    for p in tested_partitions() {
        let frame = MubFrame::new(&p).unwrap();
        for _ in 0..3 {
            let rho = DensityMatrix::random(p.n_qubits(), &mut rng).unwrap();
            let table = mub_probabilities(&rho, frame.bases()).unwrap();
            let back = reconstruct(&table, &frame).unwrap();
            assert!(trace_distance(&rho, &back).unwrap() < 1e-10);
        }
    }
}

#[test]
fn alternative_polynomials_give_valid_unbiased_partitions() {
    for (n, poly) in [(3, 0b1101u32), (4, 0b11001), (4, 0b11111)] {
        let p = standard_partition(n, Some(poly)).unwrap();
        let bases: Vec<_> = p.sets().iter().map(|s| eigenbasis(s).unwrap()).collect();
        for i in 0..bases.len() {
            for j in i + 1..bases.len() {
                assert!(verify_unbiased(&bases[i], &bases[j]).unwrap().is_unbiased(1e-10));
            }
        }
    }
}

fn valid_flag_assignments(which: Preset) -> Vec<Vec<CatPhase>> {
    let base = preset(which);
    let n = base[0].n_qubits();
    // Stabilizing sets for both flag values of every basis, computed once.
    let variants: Vec<[CommutingSet; 2]> = base
        .iter()
        .map(|spec| {
            [CatPhase::One, CatPhase::I].map(|phase| {
                let spec = BasisLabelSpec { phase, ..spec.clone() };
                stabilizing_set(&spec.basis().unwrap()).unwrap()
            })
        })
        .collect();
    let cats: Vec<usize> = (0..base.len()).filter(|&i| base[i].kind != BasisKind::Product).collect();
    (0u32..1 << cats.len())
        .filter_map(|mask| {
            let mut flags: Vec<CatPhase> = base.iter().map(|s| s.phase).collect();
            for (j, &i) in cats.iter().enumerate() {
                flags[i] = if mask >> j & 1 == 1 { CatPhase::I } else { CatPhase::One };
            }
            let sets = flags.iter().enumerate().map(|(i, f)| variants[i][usize::from(*f == CatPhase::I)].clone()).collect();
            MubPartition::new(n, sets).ok().map(|_| flags)
        })
        .collect()
}

#[test]
fn ghz_phase_flags_by_search() {
    let valid = valid_flag_assignments(Preset::Fig2);
    assert_eq!(valid.len(), 2);
    let ours: Vec<CatPhase> = preset(Preset::Fig2).iter().map(|s| s.phase).collect();
    assert!(valid.contains(&ours));
    // (xxx) is the only GHZ basis carrying the factor i.
    assert_eq!(ours.iter().filter(|&&f| f == CatPhase::I).count(), 1);
    assert_eq!(preset(Preset::Fig2)[3].to_string(), "(xxx)Gi");
}

#[test]
fn product_bell_phase_flags_are_unique() {
    let valid = valid_flag_assignments(Preset::Fig4);
    assert_eq!(valid.len(), 1);
    let ours: Vec<CatPhase> = preset(Preset::Fig4).iter().map(|s| s.phase).collect();
    assert_eq!(valid[0], ours);
    for group in ours.chunks(3) {
        assert_eq!(group.iter().filter(|&&f| f == CatPhase::I).count(), 1);
    }
}

#[test]
fn spectral_decomposition_reproduces_operators() {
    for p in tested_partitions() {
        let d = 1usize << p.n_qubits();
        for s in p.sets() {
            let eps = epsilon_matrix(s).unwrap();
            let ps: Vec<DMatrix<Complex64>> = (0..d).map(|a| projector(s, &eps, a).unwrap().into_matrix()).collect();
            for (a, op) in s.members().iter().enumerate() {
                let sum = ps.iter().enumerate().fold(DMatrix::zeros(d, d), |acc, (alpha, pm)| {
                    acc + pm * Complex64::new(eps.entry(a, alpha) as f64, 0.0)
                });
                assert!((sum - op.dense_matrix().unwrap()).camax() < 1e-12);
            }
        }
    }
}
