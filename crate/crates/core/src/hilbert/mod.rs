//! Dense complex linear algebra and the projector calculus of finite
//! Hilbert spaces: kets, operators, projectors, projective decompositions of
//! the identity (PDIs), spectral forms and position regions.
//!
//! Equality tests between spectral data are always made on projector
//! matrices, never on eigenvectors, since degenerate eigenbases are not
//! unique.

pub mod builtins;
mod error;
mod operator;
mod pdi;
mod region;
mod spectral;

pub use builtins::{builtin_operator, pauli_x, pauli_y, pauli_z, spin_along, spin_zx};
pub use error::HilbertError;
pub use operator::{max_entry, tensor_product, Ket, Operator, C64};
pub use pdi::{
    common_refinement, left_factor, partial_trace_left, partial_trace_right, pdi_compatible,
    pdi_validate, possesses, right_factor, Pdi, PdiReport, Projector,
};
pub use region::{region_projector, GridWavefunction, Region};
pub use spectral::{spectral_decompose, Observable};
