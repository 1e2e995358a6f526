use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use super::{FiniteLattice, LatticeElement, MAX_LATTICE};
use crate::error::{Error, Result};
use crate::partition::{algebra, Partition, N_ALG};

/// Elements carry their point sets only on spaces up to this size; larger
/// spaces keep the structure but drop the realisation.
pub const MAX_REALIZED_POINTS: usize = 4096;

fn check_cells(p: &Partition) -> Result<()> {
    if p.len() > N_ALG {
        return Err(Error::TooManyCells {
            cells: p.len(),
            cap: N_ALG,
        });
    }
    if 1usize << p.len() > MAX_LATTICE {
        return Err(Error::TooLarge {
            size: 1 << p.len(),
            cap: MAX_LATTICE,
        });
    }
    Ok(())
}

fn mask_label(p: &Partition, mask: u32) -> String {
    let n = p.len();
    let full = ((1u64 << n) - 1) as u32;
    if mask == 0 {
        return "0".into();
    }
    if mask == full {
        return "1".into();
    }
    let ones: Vec<usize> = (0..n).filter(|c| mask >> c & 1 == 1).collect();
    if ones.len() == 1 {
        return p.display_label(ones[0]);
    }
    let zeros: Vec<usize> = (0..n).filter(|c| mask >> c & 1 == 0).collect();
    if zeros.len() == 1 {
        return format!("¬{}", p.display_label(zeros[0]));
    }
    ones.iter()
        .map(|&c| p.display_label(c))
        .collect::<Vec<_>>()
        .join("∨")
}

/// Boolean algebra of all unions of cells of `p`, ordered by inclusion.
/// Element `i` is the union of the cells whose bits are set in `i`.
pub fn boolean_from_partition(p: &Partition) -> Result<FiniteLattice> {
    check_cells(p)?;
    let alg = algebra(p)?;
    let size = alg.len();
    let realize = p.space().len() <= MAX_REALIZED_POINTS;
    let elements = alg
        .masks()
        .map(|m| {
            let label = mask_label(p, m);
            if realize {
                LatticeElement::realized(label, alg.element(m))
            } else {
                LatticeElement::new(label)
            }
        })
        .collect();
    let up = (0..size as u32)
        .map(|a| {
            let mut set = FixedBitSet::with_capacity(size);
            for b in 0..size as u32 {
                set.set(b as usize, a & b == a);
            }
            set
        })
        .collect();
    let ortho = (0..size).map(|a| alg.complement(a as u32) as usize).collect();
    FiniteLattice::from_up_sets(elements, up, Some(ortho))
}

/// Union of the algebras of `f` and `g` realised as subsets of the common
/// sample space, elements identified by set equality. Elements of `f`'s
/// algebra come first (in mask order), then the new elements of `g`'s.
pub fn partition_logic(f: &Partition, g: &Partition) -> Result<FiniteLattice> {
    if !f.same_space(g) {
        return Err(Error::SpaceMismatch);
    }
    check_cells(f)?;
    check_cells(g)?;
    // every element of either algebra is a union of cells of the product
    let product = f.product(g)?;
    let atoms = product.len();
    let atom_in = |base: &Partition, atom: usize| base.cell_of(product.cell(atom)[0] as usize);
    let to_atoms = |base: &Partition, mask: u32| {
        let mut set = FixedBitSet::with_capacity(atoms);
        for atom in 0..atoms {
            set.set(atom, mask >> atom_in(base, atom) & 1 == 1);
        }
        set
    };

    let realize = f.space().len() <= MAX_REALIZED_POINTS;
    let mut sets: Vec<FixedBitSet> = Vec::new();
    let mut elements = Vec::new();
    let mut seen: HashMap<FixedBitSet, usize> = HashMap::new();
    for base in [f, g] {
        let alg = algebra(base)?;
        for m in alg.masks() {
            let set = to_atoms(base, m);
            if seen.contains_key(&set) {
                continue;
            }
            seen.insert(set.clone(), sets.len());
            let label = mask_label(base, m);
            elements.push(if realize {
                LatticeElement::realized(label, alg.element(m))
            } else {
                LatticeElement::new(label)
            });
            sets.push(set);
        }
    }
    let n = sets.len();
    if n > MAX_LATTICE {
        return Err(Error::TooLarge {
            size: n,
            cap: MAX_LATTICE,
        });
    }
    let up = (0..n)
        .map(|a| {
            let mut row = FixedBitSet::with_capacity(n);
            for b in 0..n {
                row.set(b, sets[a].is_subset(&sets[b]));
            }
            row
        })
        .collect();
    let ortho = sets
        .iter()
        .map(|s| {
            let mut c = s.clone();
            c.toggle_range(..);
            seen[&c]
        })
        .collect();
    FiniteLattice::from_up_sets(elements, up, Some(ortho))
}

/// Paste `l2` onto `l1` along `identify`, a list of `(id in l1, id in l2)`
/// pairs. The identified elements must form sub-ortholattices containing
/// both bounds on which the pairing is an order (and ortho) isomorphism.
/// The result lists `l1`'s elements first, then the unidentified elements
/// of `l2`.
pub fn paste(
    l1: &FiniteLattice,
    l2: &FiniteLattice,
    identify: &[(usize, usize)],
) -> Result<FiniteLattice> {
    let bad = |msg: String| Err(Error::BadIdentification(msg));
    let (n1, n2) = (l1.len(), l2.len());
    let mut to1 = vec![None; n2];
    let mut from1 = vec![None; n1];
    for &(a, b) in identify {
        if a >= n1 || b >= n2 {
            return bad(format!("pair ({a}, {b}) out of range"));
        }
        if from1[a].is_some() || to1[b].is_some() {
            return bad(format!("pair ({a}, {b}) reuses an element"));
        }
        from1[a] = Some(b);
        to1[b] = Some(a);
    }
    if from1[l1.bottom()] != Some(l2.bottom()) || from1[l1.top()] != Some(l2.top()) {
        return bad("bounds are not identified with each other".into());
    }
    if l1.is_orthocomplemented() != l2.is_orthocomplemented() {
        return bad("only one of the lattices is orthocomplemented".into());
    }
    for &(a, b) in identify {
        if let (Some(oa), Some(ob)) = (l1.ortho(a), l2.ortho(b)) {
            if from1[oa] != Some(ob) {
                return bad(format!("pair ({a}, {b}) does not respect orthocomplements"));
            }
        }
        for &(c, d) in identify {
            if l1.leq(a, c) != l2.leq(b, d) {
                return bad(format!("pairs ({a}, {b}) and ({c}, {d}) disagree on order"));
            }
            if from1[l1.meet(a, c)] != Some(l2.meet(b, d))
                || from1[l1.join(a, c)] != Some(l2.join(b, d))
            {
                return bad(format!(
                    "identified elements are not closed under meet and join at ({a}, {c})"
                ));
            }
        }
    }

    let mut index2 = vec![0usize; n2];
    let mut elements: Vec<LatticeElement> = l1.elements().to_vec();
    for b in 0..n2 {
        index2[b] = match to1[b] {
            Some(a) => a,
            None => {
                elements.push(l2.elements()[b].clone());
                elements.len() - 1
            }
        };
    }
    let n = elements.len();
    if n > MAX_LATTICE {
        return Err(Error::TooLarge {
            size: n,
            cap: MAX_LATTICE,
        });
    }
    let mut up = vec![FixedBitSet::with_capacity(n); n];
    for a in 0..n1 {
        for b in l1.up_set(a).ones() {
            up[a].insert(b);
        }
    }
    for a in 0..n2 {
        for b in l2.up_set(a).ones() {
            up[index2[a]].insert(index2[b]);
        }
    }
    transitive_closure(&mut up);
    let ortho = l1.ortho_map().zip(l2.ortho_map()).map(|(o1, o2)| {
        let mut o = o1.to_vec();
        o.resize(n, 0);
        for b in 0..n2 {
            o[index2[b]] = index2[o2[b]];
        }
        o
    });
    let members_known = elements.iter().all(|e| e.members.is_some());
    if !members_known {
        for e in &mut elements {
            e.members = None;
        }
    }
    FiniteLattice::from_up_sets(elements, up, ortho)
}

/// Warshall's algorithm on up-set rows.
fn transitive_closure(up: &mut [FixedBitSet]) {
    let n = up.len();
    for k in 0..n {
        let row_k = up[k].clone();
        for row in up.iter_mut() {
            if row.contains(k) {
                row.union_with(&row_k);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::SampleSpace;
    use std::sync::Arc;

    #[test]
    fn small_boolean_algebras() {
        let s = Arc::new(SampleSpace::discrete(4).unwrap());
        let one = boolean_from_partition(&Partition::trivial(&s)).unwrap();
        assert_eq!(one.len(), 2);
        assert_eq!((one.label(0), one.label(1)), ("0", "1"));
        let two = boolean_from_partition(&Partition::from_labels(&s, &[0, 0, 1, 1]).unwrap()).unwrap();
        assert_eq!(two.len(), 4);
        assert_eq!(two.ortho(1), Some(2));
        assert_eq!(two.elements()[2].members.as_ref().unwrap().members(), &[2, 3]);
    }

    #[test]
    fn labels_follow_cells() {
        let s = Arc::new(SampleSpace::discrete(5).unwrap());
        let p = Partition::from_cells(
            &s,
            vec![
                (vec![0, 1], Some("L".into())),
                (vec![2, 3], Some("R".into())),
                (vec![4], Some("N".into())),
            ],
        )
        .unwrap();
        let l = boolean_from_partition(&p).unwrap();
        let labels: Vec<&str> = (0..8).map(|a| l.label(a)).collect();
        assert_eq!(labels, ["0", "L", "R", "¬N", "N", "¬R", "¬L", "1"]);
    }

    #[test]
    fn parity_and_value_give_six_elements() {
        let s = Arc::new(SampleSpace::discrete(4).unwrap());
        let value = Partition::from_labels(&s, &[0, 0, 1, 1]).unwrap();
        let parity = Partition::from_labels(&s, &[0, 1, 0, 1]).unwrap();
        let l = partition_logic(&value, &parity).unwrap();
        assert_eq!(l.len(), 6);
        let same = partition_logic(&value, &value).unwrap();
        assert_eq!(same.len(), 4);
    }

    #[test]
    fn paste_rejects_bad_identifications() {
        let s = Arc::new(SampleSpace::discrete(2).unwrap());
        let b = boolean_from_partition(&Partition::identity(&s)).unwrap();
        assert!(matches!(paste(&b, &b, &[(0, 0)]), Err(Error::BadIdentification(_))));
        assert!(matches!(
            paste(&b, &b, &[(0, 0), (3, 3), (1, 2)]),
            Err(Error::BadIdentification(_))
        ));
        assert!(matches!(paste(&b, &b, &[(0, 0), (3, 3), (9, 1)]), Err(Error::BadIdentification(_))));
        let full: Vec<(usize, usize)> = (0..4).map(|i| (i, i)).collect();
        let same = paste(&b, &b, &full).unwrap();
        assert_eq!(same.leq_matrix(), b.leq_matrix());
    }
}
