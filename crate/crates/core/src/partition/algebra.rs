use super::Partition;
use crate::error::{Error, Result};
use crate::system::EpistemicState;

/// Largest base partition for which the algebra is materialised.
pub const N_ALG: usize = 20;

/// Boolean algebra of all unions of cells of a base partition. Elements are
/// addressed by bit masks over cell ids.
#[derive(Debug, Clone)]
pub struct PartitionAlgebra {
    base: Partition,
}

pub fn algebra(p: &Partition) -> Result<PartitionAlgebra> {
    PartitionAlgebra::new(p.clone())
}

impl PartitionAlgebra {
    pub fn new(base: Partition) -> Result<Self> {
        if base.len() > N_ALG {
            return Err(Error::TooManyCells {
                cells: base.len(),
                cap: N_ALG,
            });
        }
        Ok(PartitionAlgebra { base })
    }

    pub fn base(&self) -> &Partition {
        &self.base
    }

    /// Number of atoms (base cells).
    pub fn atoms(&self) -> usize {
        self.base.len()
    }

    /// Number of elements, `2^atoms`.
    pub fn len(&self) -> usize {
        1 << self.atoms()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn top(&self) -> u32 {
        ((1u64 << self.atoms()) - 1) as u32
    }

    pub fn complement(&self, mask: u32) -> u32 {
        !mask & self.top()
    }

    pub fn union(&self, a: u32, b: u32) -> u32 {
        a | b
    }

    pub fn intersection(&self, a: u32, b: u32) -> u32 {
        a & b
    }

    pub fn masks(&self) -> impl Iterator<Item = u32> {
        0..=self.top()
    }

    /// Realise an element as a set of sample points.
    pub fn element(&self, mask: u32) -> EpistemicState {
        let members = (0..self.atoms())
            .filter(|c| mask >> c & 1 == 1)
            .flat_map(|c| self.base.cell(c).iter().map(|&i| i as usize));
        EpistemicState::new(self.base.space().len(), members).expect("cells hold valid indices")
    }

    /// Address of `state` when it is a union of cells.
    pub fn mask_of(&self, state: &EpistemicState) -> Option<u32> {
        if !self.base.is_union_of_cells(state).ok()? {
            return None;
        }
        Some(
            state
                .members()
                .iter()
                .fold(0u32, |m, &i| m | 1 << self.base.cell_of(i)),
        )
    }

    pub fn contains(&self, state: &EpistemicState) -> bool {
        self.mask_of(state).is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::SampleSpace;
    use std::sync::Arc;

    #[test]
    fn three_cells_give_eight_elements() {
        let s = Arc::new(SampleSpace::discrete(5).unwrap());
        let p = Partition::from_labels(&s, &[0, 0, 1, 1, 2]).unwrap();
        let a = algebra(&p).unwrap();
        assert_eq!(a.len(), 8);
        assert_eq!(a.masks().count(), 8);
        let a1_a3 = EpistemicState::new(5, [0, 1, 4]).unwrap();
        assert_eq!(a.mask_of(&a1_a3), Some(0b101));
        assert!(!a.contains(&EpistemicState::singleton(0)));
        assert_eq!(a.element(a.complement(0b101)).members(), &[2, 3]);
        assert!(a.contains(&EpistemicState::empty()) && a.contains(&EpistemicState::full(5)));
    }

    #[test]
    fn cap_is_enforced() {
        let s = Arc::new(SampleSpace::discrete(21).unwrap());
        let err = algebra(&Partition::identity(&s)).unwrap_err();
        assert_eq!(err, Error::TooManyCells { cells: 21, cap: 20 });
    }
}
