//! Exact, invertible maps between a two-integer lattice basis `|Q,P⟩` and
//! the continuum position and momentum bases, built from the phase of a
//! Jacobi theta function, with the operator algebra, edge state and
//! harmonic oscillator that follow from them.
//!
//! Phases are in E-units throughout: `E^{ix} = e^{2πix}`.

pub mod lattice_ops;
pub mod legacy_maps;
pub mod numerics;
pub mod oscillator;
pub mod phase_field;
pub mod template_state;

#[cfg(feature = "acceptance")]
pub mod acceptance;

#[cfg(feature = "cli")]
pub mod cli;
