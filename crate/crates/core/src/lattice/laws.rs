use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{FiniteLattice, MAX_LATTICE};
use crate::error::{Error, Result};

/// Outcome of the exhaustive law checks. Witnesses are element ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawReport {
    pub size: usize,
    pub is_lattice: bool,
    pub distributive: bool,
    /// `(a, b, c)` with `a∧(b∨c) ≠ (a∧b)∨(a∧c)`.
    pub distributivity_witness: Option<[usize; 3]>,
    pub modular: bool,
    /// `(a, b, c)` with `a ≤ c` and `a∨(b∧c) ≠ (a∨b)∧c`.
    pub modularity_witness: Option<[usize; 3]>,
    pub orthocomplemented: bool,
    pub orthomodular: bool,
    /// `(a, b)` with `a ≤ b` and `b ≠ a∨(a⊥∧b)`.
    pub orthomodularity_witness: Option<[usize; 2]>,
    /// Maximal Boolean sublattices found by greedy growth, each sorted.
    pub boolean_blocks: Vec<Vec<usize>>,
}

pub fn violates_distributivity(l: &FiniteLattice, a: usize, b: usize, c: usize) -> bool {
    l.meet(a, l.join(b, c)) != l.join(l.meet(a, b), l.meet(a, c))
}

pub fn violates_modularity(l: &FiniteLattice, a: usize, b: usize, c: usize) -> bool {
    l.leq(a, c) && l.join(a, l.meet(b, c)) != l.meet(l.join(a, b), c)
}

pub fn violates_orthomodularity(l: &FiniteLattice, a: usize, b: usize) -> bool {
    match l.ortho(a) {
        Some(oa) => l.leq(a, b) && l.join(a, l.meet(oa, b)) != b,
        None => false,
    }
}

/// `a = (a∧b) ∨ (a∧b⊥)`; false without an orthocomplement.
pub fn commutes(l: &FiniteLattice, a: usize, b: usize) -> bool {
    match l.ortho(b) {
        Some(ob) => l.join(l.meet(a, b), l.meet(a, ob)) == a,
        None => false,
    }
}

fn mutually_commute(l: &FiniteLattice, a: usize, b: usize) -> bool {
    commutes(l, a, b) && commutes(l, b, a)
}

/// First failing triple in id order, searching triples with `b ⊥ c` first
/// when an orthocomplement exists (the textbook failures of partition
/// logics live among orthogonal pairs).
fn distributivity_witness(l: &FiniteLattice) -> Option<[usize; 3]> {
    let n = l.len();
    if let Some(ortho) = l.ortho_map() {
        let orthogonal = (0..n).into_par_iter().find_map_first(|a| {
            (0..n).find_map(|b| {
                (b + 1..n)
                    .filter(|&c| l.leq(b, ortho[c]))
                    .find(|&c| violates_distributivity(l, a, b, c))
                    .map(|c| [a, b, c])
            })
        });
        if orthogonal.is_some() {
            return orthogonal;
        }
    }
    (0..n).into_par_iter().find_map_first(|a| {
        (0..n).find_map(|b| {
            (0..n)
                .find(|&c| violates_distributivity(l, a, b, c))
                .map(|c| [a, b, c])
        })
    })
}

fn modularity_witness(l: &FiniteLattice) -> Option<[usize; 3]> {
    let n = l.len();
    (0..n).into_par_iter().find_map_first(|a| {
        (0..n).find_map(|b| {
            l.up_set(a)
                .ones()
                .find(|&c| violates_modularity(l, a, b, c))
                .map(|c| [a, b, c])
        })
    })
}

fn orthomodularity_witness(l: &FiniteLattice) -> Option<[usize; 2]> {
    let n = l.len();
    (0..n).into_par_iter().find_map_first(|a| {
        l.up_set(a)
            .ones()
            .find(|&b| violates_orthomodularity(l, a, b))
            .map(|b| [a, b])
    })
}

/// Smallest subset containing `set` closed under meet, join and ortho.
fn closure(l: &FiniteLattice, set: &mut FixedBitSet) {
    let mut members: Vec<usize> = set.ones().collect();
    let mut i = 0;
    while i < members.len() {
        let x = members[i];
        let mut fresh = Vec::new();
        if let Some(ox) = l.ortho(x) {
            fresh.push(ox);
        }
        for &y in &members[..=i] {
            fresh.push(l.meet(x, y));
            fresh.push(l.join(x, y));
        }
        for z in fresh {
            if !set.put(z) {
                members.push(z);
            }
        }
        i += 1;
    }
}

fn is_distributive_on(l: &FiniteLattice, set: &[usize]) -> bool {
    set.par_iter().all(|&a| {
        set.iter()
            .all(|&b| set.iter().all(|&c| !violates_distributivity(l, a, b, c)))
    })
}

/// Greedy block search: every uncovered pair of mutually commuting elements
/// seeds a block, grown by adding (in id order) each element commuting with
/// everything already in it, and closed under the lattice operations.
/// Blocks contained in another block are dropped.
fn boolean_blocks(l: &FiniteLattice, orthomodular: bool) -> Vec<Vec<usize>> {
    let n = l.len();
    if l.ortho_map().is_none() {
        return Vec::new();
    }
    if n == 1 {
        return vec![vec![0]];
    }
    let mut blocks: Vec<FixedBitSet> = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if blocks.iter().any(|s| s.contains(a) && s.contains(b)) || !mutually_commute(l, a, b) {
                continue;
            }
            let mut block = FixedBitSet::with_capacity(n);
            block.insert(a);
            block.insert(b);
            closure(l, &mut block);
            if !block.ones().all(|x| block.ones().all(|y| mutually_commute(l, x, y))) {
                continue;
            }
            for c in 0..n {
                if block.contains(c) || !block.ones().all(|x| mutually_commute(l, c, x)) {
                    continue;
                }
                let mut grown = block.clone();
                grown.insert(c);
                closure(l, &mut grown);
                if grown.ones().all(|x| grown.ones().all(|y| mutually_commute(l, x, y))) {
                    block = grown;
                }
            }
            // pairwise commuting subalgebras of orthomodular lattices are Boolean
            if !orthomodular && !is_distributive_on(l, &block.ones().collect::<Vec<_>>()) {
                continue;
            }
            blocks.retain(|s| !s.is_subset(&block));
            if !blocks.iter().any(|s| block.is_subset(s)) {
                blocks.push(block);
            }
        }
    }
    let mut out: Vec<Vec<usize>> = blocks.into_iter().map(|s| s.ones().collect()).collect();
    out.sort();
    out
}

/// Exhaustive law checks (no sampling).
pub fn laws(l: &FiniteLattice) -> Result<LawReport> {
    if l.len() > MAX_LATTICE {
        return Err(Error::TooLarge {
            size: l.len(),
            cap: MAX_LATTICE,
        });
    }
    let ((dist, modular), orthomod) = rayon::join(
        || rayon::join(|| distributivity_witness(l), || modularity_witness(l)),
        || orthomodularity_witness(l),
    );
    let orthocomplemented = l.is_orthocomplemented();
    let orthomodular = orthocomplemented && orthomod.is_none();
    Ok(LawReport {
        size: l.len(),
        is_lattice: true,
        distributive: dist.is_none(),
        distributivity_witness: dist,
        modular: modular.is_none(),
        modularity_witness: modular,
        orthocomplemented,
        orthomodular,
        orthomodularity_witness: orthomod,
        boolean_blocks: boolean_blocks(l, orthomodular),
    })
}
