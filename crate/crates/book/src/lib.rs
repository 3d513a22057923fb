//! The `chanspoof` guide, compiled as documentation so that every snippet in
//! it is tested.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/representations.md")]
pub mod representations {}

#[doc = include_str!("../../../book/src/spoofing-classes.md")]
pub mod spoofing_classes {}

#[doc = include_str!("../../../book/src/rank-minimization.md")]
pub mod rank_minimization {}

#[doc = include_str!("../../../book/src/pauli-channels.md")]
pub mod pauli_channels {}

#[doc = include_str!("../../../book/src/detection.md")]
pub mod detection {}

#[doc = include_str!("../../../book/src/command-line.md")]
pub mod command_line {}
