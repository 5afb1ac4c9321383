//! Discrete Morse theory on simplicial complexes of dimension at most two.
//!
//! The pipeline: a [`CellComplex`] carries a [`ScalarField`]; the lower-star
//! matching gives a [`DiscreteGradient`]; [`cancel`] decides whether a
//! critical pair can be removed, reverses its unique connecting V-path, and
//! rebuilds a vertex field whose gradient has the reduced critical census
//! while agreeing with the input outside a computed support.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cancel;
pub mod complex;
pub mod error;
pub mod field;
pub mod gradient;
pub mod io;
pub mod meshes;
pub mod persist;
pub mod report;
pub mod synth;

pub use cancel::{
    cancel_1d, cancel_pair, is_cancelable, lower_critical_value, realize_function, sample_deformation, simplify,
    CancellationPlan, MonotoneProfile, PathCensus, Rejection, SimplifyReport,
};
pub use complex::{CellComplex, CellId};
pub use error::{MorseError, Result};
pub use field::{LevelThreshold, ScalarField};
pub use gradient::{connecting_paths, descending_paths, CriticalCell, DiscreteGradient, PathEnd, VPath};
pub use persist::{persistence_pairs, schedule, PersistencePair};
