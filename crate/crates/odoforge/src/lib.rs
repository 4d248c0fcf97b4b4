//! Odometers, Toeplitz arrays and tower measures over finitely generated
//! groups, computed exactly at a chosen truncation depth.
//!
//! The crate is organized around a few layers:
//!
//! * [`word`]: group elements as reduced words with a fixed shortlex order;
//! * [`coset`]: finite-index subgroups as coset tables (Stallings foldings
//!   for free groups, Hermite bases for free-abelian ones);
//! * [`chain`]: nested subgroup chains as truncated (sub)odometers with
//!   their actions, stabilizers, factor maps and character groups;
//! * [`toeplitz`]: the explicit `{0,1}` Toeplitz array attached to a chain,
//!   with exactness certificates and period reports;
//! * [`partition`]: clopen partition refinement, Kakutani–Rohlin towers,
//!   incidence matrices and invariant-measure estimates;
//! * [`config`], [`report`]: the deterministic CLI harness.

pub mod word;
pub mod snf;
pub mod coset;
pub mod chain;
pub mod toeplitz;
pub mod partition;
pub mod config;
pub mod report;

pub use coset::{CosetError, SubgroupHandle};
pub use word::{GroupDescriptor, GroupKind, Word, WordError};
