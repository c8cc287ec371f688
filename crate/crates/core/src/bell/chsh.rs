use nalgebra::DVector;

use super::BellError;
use crate::hilbert::{
    common_refinement, pauli_x, pauli_z, spectral_decompose, spin_zx, Ket, Observable, Operator,
    Pdi, Projector, C64,
};
use crate::tolerance;

/// Label of the `+1` eigenspace in a sign PDI.
pub const PLUS: &str = "+";
/// Label of the `-1` eigenspace in a sign PDI.
pub const MINUS: &str = "-";

/// Measurement settings `(a, b)`, each 0 or 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SettingPair {
    pub a: usize,
    pub b: usize,
}

impl SettingPair {
    pub fn new(a: usize, b: usize) -> Self {
        assert!(a < 2 && b < 2, "settings are 0 or 1");
        SettingPair { a, b }
    }

    /// The four pairs in the order (0,0), (0,1), (1,0), (1,1).
    pub fn all() -> [SettingPair; 4] {
        [
            SettingPair { a: 0, b: 0 },
            SettingPair { a: 0, b: 1 },
            SettingPair { a: 1, b: 0 },
            SettingPair { a: 1, b: 1 },
        ]
    }

    /// Position in [`SettingPair::all`].
    pub fn index(self) -> usize {
        2 * self.a + self.b
    }
}

/// `A0, A1, B0, B1`: ±1-valued observables on one space with every `A_j`
/// commuting with every `B_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChshOperators {
    a: [Operator; 2],
    b: [Operator; 2],
}

fn check_involution(name: &str, op: &Operator) -> Result<(), BellError> {
    let herm = op.hermiticity_defect();
    if herm >= tolerance::algebraic() {
        return Err(BellError::Hilbert(
            crate::hilbert::HilbertError::NotHermitian { defect: herm },
        ));
    }
    let defect = (&(op * op) - &Operator::identity(op.dim())).max_entry();
    if defect >= 1e-9 {
        return Err(BellError::NotInvolution {
            name: name.to_string(),
            defect,
        });
    }
    Ok(())
}

impl ChshOperators {
    pub fn new(a0: Operator, a1: Operator, b0: Operator, b1: Operator) -> Result<Self, BellError> {
        let dim = a0.dim();
        for op in [&a1, &b0, &b1] {
            if op.dim() != dim {
                return Err(BellError::DimensionMismatch {
                    expected: dim,
                    found: op.dim(),
                });
            }
        }
        for (name, op) in [("A0", &a0), ("A1", &a1), ("B0", &b0), ("B1", &b1)] {
            check_involution(name, op)?;
        }
        for (j, a) in [&a0, &a1].into_iter().enumerate() {
            for (k, b) in [&b0, &b1].into_iter().enumerate() {
                let defect = a.commutation_defect(b)?;
                if defect >= tolerance::algebraic() {
                    return Err(BellError::NonCommutingAB { a: j, b: k, defect });
                }
            }
        }
        Ok(ChshOperators {
            a: [a0, a1],
            b: [b0, b1],
        })
    }

    pub fn dim(&self) -> usize {
        self.a[0].dim()
    }

    pub fn alice(&self, setting: usize) -> &Operator {
        &self.a[setting]
    }

    pub fn bob(&self, setting: usize) -> &Operator {
        &self.b[setting]
    }

    /// `M_ab = A_a B_b`.
    pub fn product(&self, s: SettingPair) -> Operator {
        &self.a[s.a] * &self.b[s.b]
    }
}

/// Two-outcome PDI `{P_+, P_-}` of a ±1-valued observable, labelled `+` and
/// `-`. A sign that does not occur in the spectrum is omitted.
pub fn sign_pdi(op: &Operator) -> Result<Pdi, BellError> {
    let obs = spectral_decompose(op)?;
    let mut projectors = Vec::new();
    let mut labels = Vec::new();
    for (f, p) in obs.eigenvalues().iter().zip(obs.pdi().projectors()) {
        let label = if (f - 1.0).abs() < 1e-9 {
            PLUS
        } else if (f + 1.0).abs() < 1e-9 {
            MINUS
        } else {
            return Err(BellError::NotInvolution {
                name: "observable".into(),
                defect: (f.abs() - 1.0).abs(),
            });
        };
        projectors.push(p.clone());
        labels.push(label.to_string());
    }
    Ok(Pdi::new(projectors, labels)?)
}

/// `P_+` or `P_-` of a sign PDI, the zero projector if the sign is absent.
pub(crate) fn sign_projector(pdi: &Pdi, label: &str) -> Projector {
    pdi.get(label)
        .cloned()
        .unwrap_or_else(|| Projector::zero(pdi.dim()))
}

pub(crate) fn sign_value(label: &str) -> f64 {
    if label == PLUS {
        1.0
    } else {
        -1.0
    }
}

/// `S = A0 B0 + A0 B1 + A1 B0 - A1 B1`.
pub fn chsh_operator(ops: &ChshOperators) -> Operator {
    let m = |a, b| ops.product(SettingPair::new(a, b));
    &(&(&m(0, 0) + &m(0, 1)) + &m(1, 0)) - &m(1, 1)
}

/// Signs of the CHSH combination with an odd number of minus signs, applied
/// to `(E00, E01, E10, E11)`. The first is the standard one.
pub const CHSH_VARIANTS: [[i8; 4]; 8] = [
    [1, 1, 1, -1],
    [1, 1, -1, 1],
    [1, -1, 1, 1],
    [-1, 1, 1, 1],
    [1, -1, -1, -1],
    [-1, 1, -1, -1],
    [-1, -1, 1, -1],
    [-1, -1, -1, 1],
];

/// Correlators `E(a, b)` for the four setting pairs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationData {
    e: [[f64; 2]; 2],
}

impl CorrelationData {
    pub fn new(e: [[f64; 2]; 2]) -> Result<Self, BellError> {
        for row in &e {
            for &v in row {
                if !v.is_finite() || v.abs() > 1.0 + tolerance::PROBABILITY {
                    return Err(BellError::CorrelatorOutOfRange { value: v });
                }
            }
        }
        Ok(CorrelationData { e })
    }

    pub fn from_flat(e: [f64; 4]) -> Result<Self, BellError> {
        Self::new([[e[0], e[1]], [e[2], e[3]]])
    }

    pub fn get(&self, s: SettingPair) -> f64 {
        self.e[s.a][s.b]
    }

    pub fn table(&self) -> [[f64; 2]; 2] {
        self.e
    }

    pub fn flat(&self) -> [f64; 4] {
        [self.e[0][0], self.e[0][1], self.e[1][0], self.e[1][1]]
    }

    /// `E00 + E01 + E10 - E11`.
    pub fn chsh(&self) -> f64 {
        self.variant(CHSH_VARIANTS[0])
    }

    pub fn variant(&self, signs: [i8; 4]) -> f64 {
        self.flat()
            .iter()
            .zip(signs)
            .map(|(e, s)| e * f64::from(s))
            .sum()
    }

    /// The sign variant of largest magnitude, with its signed value.
    pub fn best_variant(&self) -> ([i8; 4], f64) {
        CHSH_VARIANTS
            .iter()
            .map(|&s| (s, self.variant(s)))
            .fold(([0; 4], 0.0), |best, cur| {
                if cur.1.abs() > best.1.abs() {
                    cur
                } else {
                    best
                }
            })
    }
}

/// Correlators from four separate refinement experiments, and the direct
/// expectation `<ψ|S|ψ>`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChshValue {
    pub correlations: CorrelationData,
    pub direct: f64,
}

/// `E(a, b) = Σ_{pq} p·q <ψ|P_p Q_q|ψ>` over the common refinement of the
/// sign PDIs of `A_a` and `B_b`.
pub fn correlator(state: &Ket, ops: &ChshOperators, s: SettingPair) -> Result<f64, BellError> {
    check_state(state, ops.dim())?;
    let pa = sign_pdi(ops.alice(s.a))?;
    let pb = sign_pdi(ops.bob(s.b))?;
    let refined = common_refinement(&pa, &pb)?;
    let mut e = 0.0;
    for (label, proj) in refined.iter() {
        let (p, q) = label.split_at(1);
        e += sign_value(p) * sign_value(q) * proj.probability(state)?;
    }
    Ok(e)
}

pub(crate) fn check_state(state: &Ket, dim: usize) -> Result<(), BellError> {
    if state.dim() == dim {
        Ok(())
    } else {
        Err(BellError::DimensionMismatch {
            expected: dim,
            found: state.dim(),
        })
    }
}

pub fn chsh_value(state: &Ket, ops: &ChshOperators) -> Result<ChshValue, BellError> {
    check_state(state, ops.dim())?;
    let mut e = [[0.0; 2]; 2];
    for s in SettingPair::all() {
        e[s.a][s.b] = correlator(state, ops, s)?;
    }
    let direct = chsh_operator(ops).expectation(state)?.re;
    Ok(ChshValue {
        correlations: CorrelationData::new(e)?,
        direct,
    })
}

/// CHSH operators `A_a = σ(θ_a) ⊗ I`, `B_b = I ⊗ σ(θ_b)` for spin
/// components in the z–x plane. Angles in radians.
pub fn ops_from_angles(alice: [f64; 2], bob: [f64; 2]) -> ChshOperators {
    let i2 = Operator::identity(2);
    ChshOperators::new(
        spin_zx(alice[0]).kron(&i2),
        spin_zx(alice[1]).kron(&i2),
        i2.kron(&spin_zx(bob[0])),
        i2.kron(&spin_zx(bob[1])),
    )
    .expect("local spin operators on distinct factors commute")
}

/// Default z–x plane angles (degrees) for the singlet: Alice 0°, 90°; Bob
/// 45°, 135°.
pub const SINGLET_ALICE_DEG: [f64; 2] = [0.0, 90.0];
pub const SINGLET_BOB_DEG: [f64; 2] = [45.0, 135.0];

/// The spin-3/2 (four-level) CHSH construction on `C² ⊗ C²`.
#[derive(Clone, Debug, PartialEq)]
pub struct NeonSetup {
    pub ops: ChshOperators,
    /// `M[j][k] = A_j B_k`.
    pub m: [[Operator; 2]; 2],
    pub s: Operator,
    pub spectrum: Observable,
    /// Eigenvector of the largest eigenvalue of `S`, first nonzero amplitude
    /// real and positive.
    pub top_eigenstate: Ket,
}

/// `A0 = Z⊗I, A1 = X⊗I, B0 = I⊗X, B1 = I⊗Z` and everything derived from
/// them.
pub fn neon_setup() -> NeonSetup {
    let i2 = Operator::identity(2);
    let ops = ChshOperators::new(
        pauli_z().kron(&i2),
        pauli_x().kron(&i2),
        i2.kron(&pauli_x()),
        i2.kron(&pauli_z()),
    )
    .expect("valid by construction");
    let m = [
        [
            ops.product(SettingPair::new(0, 0)),
            ops.product(SettingPair::new(0, 1)),
        ],
        [
            ops.product(SettingPair::new(1, 0)),
            ops.product(SettingPair::new(1, 1)),
        ],
    ];
    let s = chsh_operator(&ops);
    let spectrum = spectral_decompose(&s).expect("S is Hermitian");
    let top_eigenstate = top_vector(spectrum.pdi().projectors()[0].op());
    NeonSetup {
        ops,
        m,
        s,
        spectrum,
        top_eigenstate,
    }
}

/// Normalized column of largest norm of a rank-one projector.
fn top_vector(p: &Operator) -> Ket {
    let m = p.matrix();
    let col = (0..m.ncols())
        .max_by(|&a, &b| m.column(a).norm().total_cmp(&m.column(b).norm()))
        .expect("nonempty");
    let v: DVector<C64> = m.column(col).into_owned();
    Ket::from_vector(v)
        .expect("projector of rank one has a nonzero column")
        .with_canonical_phase()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    #[test]
    fn neon_spectrum() {
        let n = neon_setup();
        let ev = n.spectrum.eigenvalues();
        assert_eq!(n.spectrum.ranks(), vec![1, 2, 1]);
        assert!((ev[0] - 2.0 * SQRT_2).abs() < 1e-9);
        assert!(ev[1].abs() < 1e-9);
        assert!((ev[2] + 2.0 * SQRT_2).abs() < 1e-9);
        let top = n.s.expectation(&n.top_eigenstate).unwrap();
        assert!((top.re - 2.0 * SQRT_2).abs() < 1e-10);
        assert!(n.top_eigenstate.amplitudes()[0].re > 0.0);
    }

    #[test]
    fn neon_products_and_noncommutation() {
        let n = neon_setup();
        assert_eq!(n.m[0][1], pauli_z().kron(&pauli_z()));
        assert_eq!(n.m[0][0], pauli_z().kron(&pauli_x()));
        assert_eq!(n.m[1][0], pauli_x().kron(&pauli_x()));
        assert_eq!(n.m[1][1], pauli_x().kron(&pauli_z()));
        let flat = [&n.m[0][0], &n.m[0][1], &n.m[1][0], &n.m[1][1]];
        // products sharing a setting index anticommute; M00/M11 and M01/M10
        // commute because both factors anticommute
        for i in 0..4 {
            for j in 0..4 {
                if i == j {
                    continue;
                }
                let shares = i / 2 == j / 2 || i % 2 == j % 2;
                assert_eq!(
                    flat[i].commutes_with(flat[j]).unwrap(),
                    !shares,
                    "M{i} vs M{j}"
                );
            }
        }
        let sum = &(&(&n.m[0][0] + &n.m[0][1]) + &n.m[1][0]) - &n.m[1][1];
        assert_eq!(sum, n.s);
        assert!(!n.ops.alice(0).commutes_with(n.ops.alice(1)).unwrap());
    }

    #[test]
    fn all_identity_gives_two() {
        let i = Operator::identity(2);
        let ops = ChshOperators::new(i.clone(), i.clone(), i.clone(), i.clone()).unwrap();
        assert_eq!(
            chsh_operator(&ops),
            Operator::identity(2).scale(C64::new(2.0, 0.0))
        );
        let v = chsh_value(&Ket::basis(2, 0), &ops).unwrap();
        assert_eq!(v.correlations.chsh(), 2.0);
    }

    #[test]
    fn product_state_correlators() {
        // oracle: <00|Z⊗X|00> = 0, <00|Z⊗Z|00> = 1, <00|X⊗X|00> = 0, <00|X⊗Z|00> = 0
        let n = neon_setup();
        let v = chsh_value(&Ket::basis(4, 0), &n.ops).unwrap();
        let e = v.correlations.table();
        assert!(e[0][0].abs() < 1e-15);
        assert!((e[0][1] - 1.0).abs() < 1e-15);
        assert!(e[1][0].abs() < 1e-15);
        assert!(e[1][1].abs() < 1e-15);
        assert!((v.correlations.chsh() - 1.0).abs() < 1e-15);
        assert!((v.direct - 1.0).abs() < 1e-15);
    }

    #[test]
    fn noncommuting_across_parties_rejected() {
        let z = pauli_z();
        let x = pauli_x();
        assert!(matches!(
            ChshOperators::new(z.clone(), z.clone(), x.clone(), z.clone()),
            Err(BellError::NonCommutingAB { a: 0, b: 0, .. })
        ));
        let two = Operator::identity(2).scale(C64::new(2.0, 0.0));
        assert!(matches!(
            ChshOperators::new(two, z.clone(), z.clone(), z),
            Err(BellError::NotInvolution { .. })
        ));
    }

    #[test]
    fn variants_cover_both_signs() {
        let c = CorrelationData::from_flat([1.0, 1.0, 1.0, -1.0]).unwrap();
        assert_eq!(c.chsh(), 4.0);
        assert_eq!(c.best_variant(), ([1, 1, 1, -1], 4.0));
        let neg = CorrelationData::from_flat([-1.0, -1.0, -1.0, 1.0]).unwrap();
        assert_eq!(neg.best_variant().1, -4.0);
        for s in CHSH_VARIANTS {
            assert_eq!(s.iter().filter(|&&x| x < 0).count() % 2, 1);
        }
        assert!(CorrelationData::from_flat([1.5, 0.0, 0.0, 0.0]).is_err());
    }
}
