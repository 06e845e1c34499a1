//! Scheduling of ICM circuits whose magic-state initialisations come from
//! heralded, probabilistic distillations.
//!
//! Circuits ([`icm`]) are laid out as rigid space-time boxes ([`layout`]).
//! The redundancy needed to reach a target failure probability comes from
//! [`reliability`]. [`schedulers`] implements the offline ASAP policy and the
//! online ALAPT and ALAPS policies. [`bench`] builds benchmark circuits and
//! checks the published results table.

pub mod bench;
pub mod icm;
pub mod layout;
pub mod reliability;
pub mod report;
pub mod schedulers;
