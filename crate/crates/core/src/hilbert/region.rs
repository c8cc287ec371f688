//! Position regions on a discretized one-dimensional grid.

use std::collections::BTreeSet;

use nalgebra::DVector;

use super::operator::{Ket, Operator, C64, ONE, ZERO};
use super::pdi::Projector;
use super::HilbertError;

/// Set of grid indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    indices: BTreeSet<usize>,
}

impl Region {
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Result<Self, HilbertError> {
        let mut set = BTreeSet::new();
        for i in indices {
            if !set.insert(i) {
                return Err(HilbertError::DuplicateIndex(i));
            }
        }
        Ok(Region { indices: set })
    }

    pub fn span(range: std::ops::Range<usize>) -> Self {
        Region {
            indices: range.collect(),
        }
    }

    pub fn indices(&self) -> &BTreeSet<usize> {
        &self.indices
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.contains(&i)
    }

    pub fn union(&self, other: &Region) -> Region {
        Region {
            indices: self.indices.union(&other.indices).copied().collect(),
        }
    }

    pub fn is_disjoint(&self, other: &Region) -> bool {
        self.indices.is_disjoint(&other.indices)
    }
}

/// Diagonal 0/1 mask keeping amplitudes inside `r`.
pub fn region_projector(grid_size: usize, r: &Region) -> Result<Projector, HilbertError> {
    if grid_size == 0 {
        return Err(HilbertError::Empty);
    }
    if let Some(&bad) = r.indices.iter().find(|&&i| i >= grid_size) {
        return Err(HilbertError::IndexOutOfRange {
            index: bad,
            size: grid_size,
        });
    }
    let diag: Vec<C64> = (0..grid_size)
        .map(|i| if r.contains(i) { ONE } else { ZERO })
        .collect();
    Projector::new(Operator::diagonal(&diag))
}

/// Normalized wavefunction sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridWavefunction {
    ket: Ket,
}

impl GridWavefunction {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self, HilbertError> {
        Ok(GridWavefunction {
            ket: Ket::new(amplitudes)?,
        })
    }

    pub fn points(&self) -> usize {
        self.ket.dim()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        self.ket.amplitudes()
    }

    pub fn as_ket(&self) -> &Ket {
        &self.ket
    }

    /// `Σ_{r ∈ R} |ψ(r)|²`.
    pub fn probability_in(&self, r: &Region) -> Result<f64, HilbertError> {
        region_projector(self.points(), r)?.probability(&self.ket)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::possesses;

    #[test]
    fn full_region_is_identity() {
        let p = region_projector(5, &Region::span(0..5)).unwrap();
        assert_eq!(p.op(), &Operator::identity(5));
    }

    #[test]
    fn disjoint_regions_multiply_to_zero() {
        let r1 = region_projector(8, &Region::span(0..3)).unwrap();
        let r2 = region_projector(8, &Region::span(5..8)).unwrap();
        let prod = r1.op() * r2.op();
        assert!(prod.matrix().iter().all(|z| *z == ZERO));
    }

    #[test]
    fn union_mask_is_sum_of_masks() {
        let a = Region::span(0..3);
        let b = Region::new([5, 7]).unwrap();
        let sum = region_projector(8, &a).unwrap().op() + region_projector(8, &b).unwrap().op();
        // oracle: indicator of the union, built directly
        let expected: Vec<C64> = (0..8)
            .map(|i| if i < 3 || i == 5 || i == 7 { ONE } else { ZERO })
            .collect();
        assert_eq!(sum, Operator::diagonal(&expected));
        assert_eq!(region_projector(8, &a.union(&b)).unwrap().op(), &sum);
    }

    #[test]
    fn bad_regions() {
        assert!(matches!(
            Region::new([1, 2, 1]),
            Err(HilbertError::DuplicateIndex(1))
        ));
        assert!(matches!(
            region_projector(4, &Region::new([4]).unwrap()),
            Err(HilbertError::IndexOutOfRange { index: 4, size: 4 })
        ));
    }

    #[test]
    fn spread_wavefunction_is_in_union_but_neither_half() {
        let psi = GridWavefunction::new(
            [1.0, 2.0, 0.0, 0.0, 2.0, 1.0]
                .iter()
                .map(|&x| C64::new(x, 0.0))
                .collect(),
        )
        .unwrap();
        let r1 = Region::span(0..2);
        let r2 = Region::span(4..6);
        let both = region_projector(6, &r1.union(&r2)).unwrap();
        assert!(possesses(psi.as_ket(), &both).unwrap());
        assert!(!possesses(psi.as_ket(), &region_projector(6, &r1).unwrap()).unwrap());
        assert!((psi.probability_in(&r1).unwrap() - 0.5).abs() < 1e-15);
    }
}
