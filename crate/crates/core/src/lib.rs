//! Multipartite concurrence for pure states and analytical lower bounds for
//! mixed states.
//!
//! - [`state`], [`ops`], [`random`], [`io`]: dense states and tensor-index
//!   operations.
//! - [`partitions`], [`weights`]: set partitions of subsystems and the
//!   coverage condition for weighted partition bounds.
//! - [`pure`]: exact concurrence of pure states.
//! - [`bounds`]: bipartite providers and the multipartite bounds built on
//!   them.
//! - [`example`]: the noisy two-Bell-pair family and its closed-form bound.
//! - [`selftest`]: seeded invariant suites usable outside `cargo test`.

pub mod bounds;
pub mod error;
pub mod example;
pub mod io;
pub mod ops;
pub mod partitions;
pub mod pure;
pub mod random;
pub mod selftest;
pub mod state;
pub mod weights;

pub use error::{Error, Result};
pub use partitions::Partition;
pub use pure::{ConcurrenceValue, LevelPair};
pub use state::{DensityMatrix, PureState, SubsetMask, SystemShape};
pub use weights::WeightScheme;
