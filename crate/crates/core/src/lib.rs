//! Finite-dimensional consistent-histories toolkit.
//!
//! * [`hilbert`]: kets, operators, projectors, PDIs and spectral forms.
//! * [`histories`]: history families, chain vectors, consistency and the
//!   extended Born rule, plus a projective measurement model.
//! * [`bell`]: CHSH operators, hidden-variable models and their feasibility,
//!   singlet correlations, collapse and no-signaling checks.
//! * [`sampler`]: seeded finite-shot measurement simulation.
//! * [`dsl`]: the `.spec` experiment description language.

pub mod bell;
pub mod dsl;
pub mod hilbert;
pub mod histories;
pub mod sampler;
pub mod tolerance;
