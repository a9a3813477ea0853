//! State tomography from the outcome probabilities of a complete set of
//! `d + 1` mutually unbiased bases.
//!
//! Reconstruction is the linear inversion `⟨O_a⟩ = Σ_α ε[a][α] p_α` per
//! basis followed by `ρ = 2^{-N} (I + Σ ⟨O⟩ O)` over all `4^N - 1`
//! operators, which is exact on noiseless input.
//!
//! # Shot sampling
//!
//! [`sample_shots`] is reproducible from the seed alone: a single
//! SplitMix64 stream (state initialized to `seed`, reference output
//! function) drives every draw. Rows are sampled in order, `shots_per_basis`
//! draws each. A draw takes `u = (next_u64() >> 11) · 2^-53` and selects
//! the first outcome whose cumulative probability exceeds `u`; if rounding
//! leaves none, the last outcome with nonzero probability is taken.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_distr::{Distribution, StandardNormal};
use rand_xoshiro::SplitMix64;

use crate::basis::{eigenbasis, epsilon_matrix, verify_unbiased, EpsilonMatrix, OrthonormalBasis, CHAINED_TOL, EXACT_TOL};
use crate::error::{MubError, Result};
use crate::partition::{CommutingSet, MubPartition};
use crate::pauli::check_qubits;

const EIGEN_FLOOR: f64 = -1e-10;

/// Hermitian, unit-trace matrix. Positivity is checked by [`DensityMatrix::new`]
/// but not required of reconstructions from noisy data.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(DMatrix<Complex64>);

impl DensityMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        let rho = Self::hermitian_unit_trace(m)?;
        let min = rho.min_eigenvalue();
        if min < EIGEN_FLOOR {
            return Err(MubError::InvalidDensityMatrix(format!("negative eigenvalue {min:e}")));
        }
        Ok(rho)
    }

    /// Checks shape, hermiticity and trace only.
    pub fn hermitian_unit_trace(m: DMatrix<Complex64>) -> Result<Self> {
        let d = m.nrows();
        if d != m.ncols() || d < 2 || !d.is_power_of_two() {
            return Err(MubError::InvalidDensityMatrix(format!("shape {}x{}", m.nrows(), m.ncols())));
        }
        check_qubits(d.trailing_zeros() as usize)?;
        let herm = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > CHAINED_TOL {
            return Err(MubError::InvalidDensityMatrix(format!("not Hermitian ({herm:e})")));
        }
        let tr = m.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > EXACT_TOL {
            return Err(MubError::InvalidDensityMatrix(format!("trace {tr}")));
        }
        Ok(Self(m))
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let d = 1usize << n_qubits;
        Ok(Self(DMatrix::identity(d, d) * Complex64::new(1.0 / d as f64, 0.0)))
    }

    pub fn pure(state: &crate::basis::State) -> Result<Self> {
        Self::new(state * state.adjoint())
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.0.clone().symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(|a, b| a.total_cmp(b));
        e
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn is_physical(&self) -> bool {
        self.min_eigenvalue() >= EIGEN_FLOOR
    }

    /// Clips negative eigenvalues to zero and renormalizes.
    pub fn clipped(&self) -> Self {
        let eig = self.0.clone().symmetric_eigen();
        let vals: Vec<f64> = eig.eigenvalues.iter().map(|&v| v.max(0.0)).collect();
        let total: f64 = vals.iter().sum();
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for (k, &v) in vals.iter().enumerate() {
            let u = eig.eigenvectors.column(k);
            m += u * u.adjoint() * Complex64::new(v / total, 0.0);
        }
        Self(m)
    }

    /// Ginibre-ensemble random state `G G† / Tr(G G†)`.
    pub fn random(n_qubits: usize, rng: &mut impl RngCore) -> Result<Self> {
        check_qubits(n_qubits)?;
        let d = 1usize << n_qubits;
        let g = DMatrix::from_fn(d, d, |_, _| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        });
        let m = &g * g.adjoint();
        let tr = m.trace();
        let mut m = m / tr;
        // exact hermiticity
        m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        Self::new(m)
    }
}

/// Half the sum of absolute eigenvalues of `a - b`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(MubError::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    let diff = a.matrix() - b.matrix();
    Ok(0.5 * diff.symmetric_eigenvalues().iter().map(|v| v.abs()).sum::<f64>())
}

/// `p[A][α]`: probability of outcome `α` when measuring in basis `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityTable {
    rows: Vec<Vec<f64>>,
}

impl ProbabilityTable {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if d < 2 || !d.is_power_of_two() {
            return Err(MubError::InvalidTable(format!("row length {d} is not a power of two >= 2")));
        }
        for (a, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(MubError::InvalidTable(format!("row {a} has {} entries, expected {d}", row.len())));
            }
            if let Some(p) = row.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                return Err(MubError::InvalidTable(format!("row {a} has entry {p} outside [0, 1]")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > EXACT_TOL {
                return Err(MubError::InvalidTable(format!("row {a} sums to {sum}")));
            }
        }
        Ok(Self { rows })
    }

    pub fn uniform(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let d = 1usize << n_qubits;
        Self::new(vec![vec![1.0 / d as f64; d]; d + 1])
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn n_bases(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.rows[0].len()
    }
}

/// The sets of a partition with their sign matrices and eigenbases, in
/// partition order. Table row `A` refers to `sets()[A]`.
#[derive(Clone, Debug)]
pub struct MubFrame {
    n_qubits: usize,
    sets: Vec<CommutingSet>,
    epsilons: Vec<EpsilonMatrix>,
    bases: Vec<OrthonormalBasis>,
}

impl MubFrame {
    pub fn new(partition: &MubPartition) -> Result<Self> {
        let sets = partition.sets().to_vec();
        let epsilons = sets.iter().map(epsilon_matrix).collect::<Result<Vec<_>>>()?;
        let bases = sets.iter().map(eigenbasis).collect::<Result<Vec<_>>>()?;
        Ok(Self { n_qubits: partition.n_qubits(), sets, epsilons, bases })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn sets(&self) -> &[CommutingSet] {
        &self.sets
    }

    pub fn epsilons(&self) -> &[EpsilonMatrix] {
        &self.epsilons
    }

    pub fn bases(&self) -> &[OrthonormalBasis] {
        &self.bases
    }
}

/// Born-rule probabilities `Tr(ρ P^A_α)` for `d + 1` pairwise unbiased bases.
pub fn mub_probabilities(rho: &DensityMatrix, bases: &[OrthonormalBasis]) -> Result<ProbabilityTable> {
    let d = rho.dim();
    if bases.len() != d + 1 {
        return Err(MubError::BasisCount { expected: d + 1, got: bases.len() });
    }
    if let Some(b) = bases.iter().find(|b| b.dim() != d) {
        return Err(MubError::DimensionMismatch { left: d, right: b.dim() });
    }
    for (i, a) in bases.iter().enumerate() {
        for (j, b) in bases.iter().enumerate().skip(i + 1) {
            let report = verify_unbiased(a, b)?;
            if !report.is_unbiased(CHAINED_TOL) {
                return Err(MubError::NotUnbiased { a: i, b: j, deviation: report.max_deviation });
            }
        }
    }
    let rows = bases
        .iter()
        .map(|b| {
            let raw: Vec<f64> = b
                .vectors()
                .iter()
                .map(|v| v.dotc(&(rho.matrix() * v)).re.clamp(0.0, 1.0))
                .collect();
            let sum: f64 = raw.iter().sum();
            raw.into_iter().map(|p| p / sum).collect()
        })
        .collect();
    ProbabilityTable::new(rows)
}

/// Linear-inversion reconstruction. Exact on noiseless tables; noisy
/// tables may give a slightly non-positive result (see
/// [`DensityMatrix::clipped`]).
pub fn reconstruct(table: &ProbabilityTable, frame: &MubFrame) -> Result<DensityMatrix> {
    let d = 1usize << frame.n_qubits;
    if table.dim() != d || table.n_bases() != frame.sets.len() {
        return Err(MubError::InvalidTable(format!(
            "table is {}x{}, frame needs {}x{d}",
            table.n_bases(),
            table.dim(),
            frame.sets.len()
        )));
    }
    let scale = 1.0 / d as f64;
    let mut m = DMatrix::<Complex64>::identity(d, d) * Complex64::new(scale, 0.0);
    for ((set, eps), row) in frame.sets.iter().zip(&frame.epsilons).zip(table.rows()) {
        for (a, op) in set.members().iter().enumerate() {
            let expectation: f64 = row.iter().enumerate().map(|(alpha, p)| eps.entry(a, alpha) as f64 * p).sum();
            op.add_scaled_to(&mut m, Complex64::new(expectation * scale, 0.0));
        }
    }
    DensityMatrix::hermitian_unit_trace(m)
}

fn unit_interval(rng: &mut SplitMix64) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Empirical frequencies from `shots_per_basis` multinomial draws per row.
pub fn sample_shots(table: &ProbabilityTable, shots_per_basis: u64, seed: u64) -> Result<ProbabilityTable> {
    if shots_per_basis == 0 {
        return Err(MubError::ZeroShots);
    }
    let mut rng = SplitMix64::seed_from_u64(seed);
    let rows = table
        .rows()
        .iter()
        .map(|row| {
            let cumulative: Vec<f64> = row
                .iter()
                .scan(0.0, |acc, p| {
                    *acc += p;
                    Some(*acc)
                })
                .collect();
            let fallback = row.iter().rposition(|&p| p > 0.0).unwrap_or(row.len() - 1);
            let mut counts = vec![0u64; row.len()];
            for _ in 0..shots_per_basis {
                let u = unit_interval(&mut rng);
                let k = cumulative.iter().position(|&c| u < c).unwrap_or(fallback);
                counts[k] += 1;
            }
            counts.into_iter().map(|c| c as f64 / shots_per_basis as f64).collect()
        })
        .collect();
    ProbabilityTable::new(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::standard_partition;
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn frame(n: usize) -> MubFrame {
        MubFrame::new(&standard_partition(n, None).unwrap()).unwrap()
    }

    #[test]
    fn maximally_mixed_is_uniform() {
        let f = frame(2);
        let t = mub_probabilities(&DensityMatrix::maximally_mixed(2).unwrap(), f.bases()).unwrap();
        assert!(t.rows().iter().flatten().all(|&p| (p - 0.25).abs() < 1e-15));
        let rho = reconstruct(&ProbabilityTable::uniform(2).unwrap(), &f).unwrap();
        assert!(trace_distance(&rho, &DensityMatrix::maximally_mixed(2).unwrap()).unwrap() < 1e-15);
    }

    #[test]
    fn basis_state_gives_certainty_and_uniformity() {
        let f = frame(2);
        for a in 0..5 {
            let rho = DensityMatrix::pure(&f.bases()[a].vectors()[0]).unwrap();
            let t = mub_probabilities(&rho, f.bases()).unwrap();
            for (b, row) in t.rows().iter().enumerate() {
                for (alpha, &p) in row.iter().enumerate() {
                    let expect = if a == b { (alpha == 0) as u8 as f64 } else { 0.25 };
                    assert!((p - expect).abs() < 1e-12);
                }
            }
            let back = reconstruct(&t, &f).unwrap();
            assert!(trace_distance(&back, &rho).unwrap() < 1e-10);
        }
    }

    #[test]
    fn probabilities_match_born_rule_oracle() {
        let f = frame(2);
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(3);
        let rho = DensityMatrix::random(2, &mut rng).unwrap();
        let t = mub_probabilities(&rho, f.bases()).unwrap();
        for (b, row) in f.bases().iter().zip(t.rows()) {
            for (alpha, &p) in row.iter().enumerate() {
                let tr = (rho.matrix() * b.projector(alpha).matrix()).trace().re;
                assert!((p - tr).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_wrong_inputs() {
        let f = frame(2);
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(matches!(mub_probabilities(&rho, &f.bases()[..4]), Err(MubError::BasisCount { .. })));
        let mut biased = f.bases().to_vec();
        biased[1] = biased[0].clone();
        assert!(matches!(mub_probabilities(&rho, &biased), Err(MubError::NotUnbiased { .. })));
        assert!(reconstruct(&ProbabilityTable::uniform(3).unwrap(), &f).is_err());
        assert!(ProbabilityTable::new(vec![vec![0.5, 0.6]]).is_err());
        assert!(ProbabilityTable::new(vec![vec![1.5, -0.5]]).is_err());
        assert!(ProbabilityTable::new(vec![vec![1.0, 0.0, 0.0]]).is_err());
        assert!(matches!(sample_shots(&ProbabilityTable::uniform(1).unwrap(), 0, 1), Err(MubError::ZeroShots)));
    }

    #[test]
    fn density_matrix_checks() {
        let bad = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![Complex64::new(1.5, 0.0), Complex64::new(-0.5, 0.0)]));
        assert!(DensityMatrix::new(bad.clone()).is_err());
        let unchecked = DensityMatrix::hermitian_unit_trace(bad).unwrap();
        assert!(!unchecked.is_physical());
        let clipped = unchecked.clipped();
        assert!(clipped.is_physical());
        assert!((clipped.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trace_distance_examples() {
        let f = frame(1);
        let up = DensityMatrix::pure(&f.bases()[0].vectors()[0]).unwrap();
        let down = DensityMatrix::pure(&f.bases()[0].vectors()[1]).unwrap();
        assert!(trace_distance(&up, &up).unwrap().abs() < 1e-15);
        assert!((trace_distance(&up, &down).unwrap() - 1.0).abs() < 1e-12);
        // 2x2 closed form: Δ = [[a, b], [b*, -a]] has eigenvalues ±sqrt(a² + |b|²).
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(5);
        for _ in 0..20 {
            let r1 = DensityMatrix::random(1, &mut rng).unwrap();
            let r2 = DensityMatrix::random(1, &mut rng).unwrap();
            let diff = r1.matrix() - r2.matrix();
            let a = diff[(0, 0)].re;
            let closed = (a * a + diff[(0, 1)].norm_sqr()).sqrt();
            assert!((trace_distance(&r1, &r2).unwrap() - closed).abs() < 1e-12);
        }
    }

    #[test]
    fn sampling_is_deterministic_and_normalized() {
        let f = frame(2);
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(9);
        let t = mub_probabilities(&DensityMatrix::random(2, &mut rng).unwrap(), f.bases()).unwrap();
        let a = sample_shots(&t, 1000, 42).unwrap();
        let b = sample_shots(&t, 1000, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_shots(&t, 1000, 43).unwrap());
        let one = sample_shots(&t, 1, 7).unwrap();
        for row in one.rows() {
            assert_eq!(row.iter().filter(|&&p| p == 1.0).count(), 1);
            assert_eq!(row.iter().filter(|&&p| p == 0.0).count(), 3);
        }
    }

    #[test]
    fn sampling_never_picks_zero_probability_outcomes() {
        let t = ProbabilityTable::new(vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        let s = sample_shots(&t, 500, 1).unwrap();
        assert_eq!(s.rows()[0], vec![0.0, 1.0]);
        assert_eq!(s.rows()[1], vec![1.0, 0.0]);
    }

    #[test]
    fn splitmix_reference_stream() {
        // First output of the reference splitmix64.c for seed 0.
        let mut rng = SplitMix64::seed_from_u64(0);
        assert_eq!(rng.next_u64(), 0xe220a8397b1dcdaf);
    }

    #[test]
    fn every_independent_probability_matters() {
        let f = frame(2);
        let base = reconstruct(&ProbabilityTable::uniform(2).unwrap(), &f).unwrap();
        let mut count = 0;
        for a in 0..5 {
            for alpha in 0..3 {
                let mut rows = ProbabilityTable::uniform(2).unwrap().rows().to_vec();
                rows[a][alpha] += 0.01;
                rows[a][3] -= 0.01;
                let rho = reconstruct(&ProbabilityTable::new(rows).unwrap(), &f).unwrap();
                assert!(trace_distance(&rho, &base).unwrap() > 1e-4);
                count += 1;
            }
        }
        assert_eq!(count, 15);
    }

    #[test]
    fn reconstruction_is_affine() {
        let f = frame(2);
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(12);
        let r1 = DensityMatrix::random(2, &mut rng).unwrap();
        let r2 = DensityMatrix::random(2, &mut rng).unwrap();
        let t1 = mub_probabilities(&r1, f.bases()).unwrap();
        let t2 = mub_probabilities(&r2, f.bases()).unwrap();
        let mixed: Vec<Vec<f64>> = t1.rows().iter().zip(t2.rows()).map(|(a, b)| a.iter().zip(b).map(|(x, y)| 0.3 * x + 0.7 * y).collect()).collect();
        let rho = reconstruct(&ProbabilityTable::new(mixed).unwrap(), &f).unwrap();
        let expect = r1.matrix() * Complex64::new(0.3, 0.0) + r2.matrix() * Complex64::new(0.7, 0.0);
        assert!((rho.matrix() - expect).norm() < 1e-12);
    }
}
