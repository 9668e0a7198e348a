//! Optimal transmission of a Cartesian reference frame through N spins.
//!
//! The crate models a sender who encodes three spatial axes in a rotationally
//! covariant N-spin state and a receiver who estimates the rotation with a
//! maximum-likelihood covariant measurement. It provides:
//!
//! * exact group kinematics for SU(2) as unit quaternions ([`su2`]),
//! * irreducible rotation matrices and characters ([`wigner`]),
//! * deterministic Haar quadrature ([`quadrature`]),
//! * Clebsch-Gordan data for coupling N spins ([`representation`]),
//! * the tridiagonal fidelity matrix whose leading eigenpair yields the
//!   optimal encoding ([`spectral`]),
//! * the estimation protocol itself with exact likelihoods and Monte Carlo
//!   simulation ([`protocol`]),
//! * a brute-force 2^N-dimensional oracle that checks every structural claim
//!   against dense linear algebra ([`fullspace`]).

pub mod error;
pub mod fullspace;
pub mod half;
pub mod protocol;
pub mod quadrature;
pub mod representation;
pub mod spectral;
pub mod su2;
pub mod wigner;

pub use error::{Error, Result};
pub use fullspace::{tensor_rotation, SchurBasis, MAX_ORACLE_SPINS};
pub use half::{HalfInt, Projection};
pub use protocol::{EstimationResult, LikelihoodModel, ReferenceState};
pub use quadrature::{haar_integrate, HaarGrid};
pub use representation::{
    cg_coefficient, classes_for, clebsch_series, max_useful_reps, multiplicity, orbit_dimension,
    IrrepDecomposition, SpinSector,
};
pub use spectral::{
    asymptotic_error, fidelity_matrix, optimal_protocol, sigma_closed_form, truncated_matrix,
    OptimalProtocol, TridiagonalSymmetric,
};
pub use su2::{haar_sample, transmission_error, EulerZyz, GroupElement};
pub use wigner::{character, highest_weight_element, wigner_d, wigner_small_d};
