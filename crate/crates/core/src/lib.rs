//! Partitions of the N-qubit Pauli operators into maximal commuting sets,
//! the mutually unbiased bases they define, their entanglement structure,
//! and state tomography from MUB measurement statistics.
//!
//! ```
//! use mub_core::{partition::standard_partition, partition::validate_partition};
//!
//! let p = standard_partition(3, None).unwrap();
//! assert_eq!(p.sets().len(), 9);
//! assert!(validate_partition(&p).is_valid());
//! ```

pub mod basis;
pub mod entanglement;
pub mod error;
pub mod gf2;
pub mod io;
pub mod partition;
pub mod pauli;
pub mod tomography;

pub use basis::{Axis, CatPhase, EpsilonMatrix, OrthonormalBasis, Projector};
pub use entanglement::{Category, EntanglementFingerprint};
pub use error::{MubError, Result};
pub use partition::{BasisLabelSpec, CommutingSet, MubPartition, Preset, ValidationReport};
pub use pauli::{PauliOperator, Phase, MAX_QUBITS};
pub use tomography::{DensityMatrix, MubFrame, ProbabilityTable};
