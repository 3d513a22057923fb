//! Spoofing equivalence classes of quantum channels under fixed-basis
//! measurement.
//!
//! A channel measured only in the computational basis reveals just the
//! diagonal `d x d` blocks of its Choi matrix. This crate builds the set of
//! channels sharing those blocks, finds a member of minimal Kraus rank, and
//! measures how visible a swap is to shot-based experiments.
//!
//! * [`chanrep`]: Kraus, Choi and natural representations and conversions.
//! * [`spoofing`]: Type-I gauges, Type-II classes, parameter counts.
//! * [`rankmin`]: alternating-projection rank minimization.
//! * [`pauli`]: Pauli channels and their analytic reduction.
//! * [`detect`]: sampling and detection statistics.
//! * [`format`]: JSON channel, family and report files.
//!
//! ```
//! use chanspoof::chanrep::{kraus_rank, random_channel, kraus_to_choi};
//! use chanspoof::rankmin::{sinkhorn_minimize, MinimizerConfig};
//! use chanspoof::spoofing::same_class;
//!
//! let j = kraus_to_choi(&random_channel(3, 9, 1)?);
//! let out = sinkhorn_minimize(&j, &MinimizerConfig::default())?;
//! assert!(out.converged);
//! assert_eq!(kraus_rank(&out.choi, 1e-9)?, 3);
//! assert!(same_class(&j, &out.choi, 1e-10)?.same_class);
//! # Ok::<(), chanspoof::Error>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chanrep;
pub mod detect;
pub mod error;
pub mod format;
pub mod linalg;
pub mod pauli;
pub mod random;
pub mod rankmin;
pub mod spoofing;

pub use error::{Error, Result};
