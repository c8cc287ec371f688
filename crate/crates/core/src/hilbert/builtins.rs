//! Pauli matrices and spin components along a direction.

use super::operator::{Operator, C64, ONE, ZERO};
use super::HilbertError;

const I: C64 = C64::new(0.0, 1.0);

pub fn pauli_x() -> Operator {
    Operator::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]).unwrap()
}

pub fn pauli_y() -> Operator {
    Operator::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]).unwrap()
}

pub fn pauli_z() -> Operator {
    Operator::from_rows(&[vec![ONE, ZERO], vec![ZERO, -ONE]]).unwrap()
}

/// `"I"` (2x2), `"X"`, `"Y"` or `"Z"`.
pub fn builtin_operator(name: &str) -> Result<Operator, HilbertError> {
    match name {
        "I" => Ok(Operator::identity(2)),
        "X" => Ok(pauli_x()),
        "Y" => Ok(pauli_y()),
        "Z" => Ok(pauli_z()),
        other => Err(HilbertError::UnknownName(other.to_string())),
    }
}

/// `w·σ` for a unit 3-vector `w`.
pub fn spin_along(w: [f64; 3]) -> Result<Operator, HilbertError> {
    let norm = w.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !norm.is_finite() || (norm - 1.0).abs() >= 1e-9 {
        return Err(HilbertError::NonUnitDirection { norm });
    }
    let [x, y, z] = w;
    Operator::from_rows(&[
        vec![C64::new(z, 0.0), C64::new(x, -y)],
        vec![C64::new(x, y), C64::new(-z, 0.0)],
    ])
}

/// Spin along `w = (sin θ, 0, cos θ)`, i.e. `cos θ Z + sin θ X`.
pub fn spin_zx(theta: f64) -> Operator {
    spin_along([theta.sin(), 0.0, theta.cos()]).expect("unit by construction")
}
