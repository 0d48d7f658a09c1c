//! State-conversion cones for a qutrit in contact with a heat bath.
//!
//! Two families of operations act on the system: covariant Gibbs-preserving
//! channels, and the strict subset realized by an energy-preserving unitary
//! on the system plus a thermal bath. For the input `(|0> + |1>)/sqrt(2)`
//! this crate computes the reachable-state cone of the first family
//! analytically, synthesizes the optimal channels, builds finite ladder
//! baths with their block unitaries for the second family, and certifies
//! the coherence gap between the two together with its robustness bounds
//! under population perturbation.
//!
//! The main entry points:
//!
//! - [`ento::max_coherence_ento`] / [`ento::sweep_cone`] for the cone,
//!   with [`ento::lp_oracle_max`] as a brute-force cross-check;
//! - [`ento::optimal_transition`] and [`ento::kraus_from_transition`] for
//!   the channel attaining the cone boundary;
//! - [`bath::make_bath`], [`bath::optimal_pointb_unitary`] and
//!   [`bath::dense_channel_oracle`] for the dilation picture;
//! - [`gap::pointb_values`], [`gap::gap_bound_main`] and
//!   [`gap::gap_bound_refined`] for the gap and its certified bounds;
//! - [`acceptance::run_criteria`] for the full verification suite.

pub mod acceptance;
pub mod bath;
pub mod ento;
pub mod error;
pub mod gap;
pub mod gibbs;
pub mod majorization;
pub mod state;

pub use bath::{BathSpec, BlockUnitary, DeltaReport, Scheme};
pub use ento::{CaseId, ConeRecord, EntoChannel, EntryBounds};
pub use error::{Error, Result};
pub use gap::{EmpiricalGapSummary, GapRecord, MuGapCheck, PointBValues, SamplePattern};
pub use gibbs::{GibbsVector, TransitionMatrix};
pub use majorization::LorenzCurve;
pub use state::{DensityMatrix, ModeDecomposition};
