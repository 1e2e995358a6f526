//! Built-in lattices used as positive and negative controls.

use std::sync::Arc;

use super::{boolean_from_partition, partition_logic, FiniteLattice, LatticeElement};
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::system::SampleSpace;

fn abstract_lattice(labels: &[&str], less: &[(usize, usize)], ortho: Vec<usize>) -> FiniteLattice {
    let n = labels.len();
    let mut leq = vec![vec![false; n]; n];
    for (a, row) in leq.iter_mut().enumerate() {
        row[a] = true;
        row[n - 1] = true;
    }
    leq[0] = vec![true; n];
    for &(a, b) in less {
        leq[a][b] = true;
    }
    let elements = labels.iter().map(|&l| LatticeElement::new(l)).collect();
    FiniteLattice::new(elements, &leq, Some(ortho)).expect("fixture is an ortholattice")
}

/// Power set of an `n`-point set, `1 ≤ n ≤ 4`, atoms labelled `p0..`.
pub fn boolean(n: usize) -> Result<FiniteLattice> {
    if !(1..=4).contains(&n) {
        return Err(Error::InvalidParameter(format!(
            "boolean fixtures cover 1..=4 atoms, got {n}"
        )));
    }
    let space = Arc::new(SampleSpace::discrete(n)?);
    let cells = (0..n).map(|i| (vec![i], Some(format!("p{i}")))).collect();
    boolean_from_partition(&Partition::from_cells(&space, cells)?)
}

/// Benzene ring: the hexagon `0 < a < b < 1`, `0 < ¬b < ¬a < 1`. An
/// ortholattice that is not orthomodular.
pub fn o6() -> FiniteLattice {
    abstract_lattice(
        &["0", "a", "b", "¬b", "¬a", "1"],
        &[(1, 2), (3, 4)],
        vec![5, 4, 3, 2, 1, 0],
    )
}

/// Horizontal sum of two four-element Boolean algebras.
pub fn mo2() -> FiniteLattice {
    abstract_lattice(&["0", "a", "¬a", "b", "¬b", "1"], &[], vec![5, 2, 1, 4, 3, 0])
}

/// The firefly box: a firefly in one of four quadrants (left/right by front
/// window, front/back by side window) or not glowing.
pub struct Firefly {
    /// Points `LF, LB, RF, RB, dark`.
    pub space: Arc<SampleSpace>,
    /// Cells `L, R, N`.
    pub front: Partition,
    /// Cells `F, B, N`.
    pub side: Partition,
    pub front_lattice: FiniteLattice,
    pub side_lattice: FiniteLattice,
    pub logic: FiniteLattice,
}

impl Firefly {
    /// Pairs of elements of the two Boolean lattices with equal point sets.
    pub fn overlap(&self) -> Vec<(usize, usize)> {
        let (a, b) = (self.front_lattice.elements(), self.side_lattice.elements());
        (0..a.len())
            .filter_map(|i| {
                (0..b.len())
                    .find(|&j| a[i].members == b[j].members)
                    .map(|j| (i, j))
            })
            .collect()
    }
}

pub fn firefly() -> Firefly {
    let space = Arc::new(SampleSpace::discrete(5).expect("five points"));
    let cells = |spec: [(&[usize], &str); 3]| {
        spec.iter()
            .map(|(m, l)| (m.to_vec(), Some(l.to_string())))
            .collect()
    };
    let front = Partition::from_cells(&space, cells([(&[0, 1], "L"), (&[2, 3], "R"), (&[4], "N")]))
        .expect("front view partitions the box")
        .with_name("front");
    let side = Partition::from_cells(&space, cells([(&[0, 2], "F"), (&[1, 3], "B"), (&[4], "N")]))
        .expect("side view partitions the box")
        .with_name("side");
    let front_lattice = boolean_from_partition(&front).expect("three cells");
    let side_lattice = boolean_from_partition(&side).expect("three cells");
    let logic = partition_logic(&front, &side).expect("firefly logic is a lattice");
    Firefly {
        space,
        front,
        side,
        front_lattice,
        side_lattice,
        logic,
    }
}
