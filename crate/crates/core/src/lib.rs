//! Quantum total-variation denoising.
//!
//! The crate contains the classical median-formula TV solver, a small
//! reversible-circuit IR with depth analysis and OpenQASM export, builders for
//! the QTV circuit and its sub-modules, exact simulators, a patch pipeline that
//! applies the circuit across an image, and noise/metric utilities.

pub mod assets;
pub mod circuit;
pub mod degrade;
pub mod image;
pub mod modules;
pub mod pipeline;
pub mod reproduce;
pub mod sim;
pub mod tv;
