//! Finite propositional lattices: Boolean partition algebras, partition
//! logics, pasting, law checking and Hasse diagrams.

mod build;
mod dot;
pub mod fixtures;
mod json;
mod laws;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::system::EpistemicState;

pub use build::{boolean_from_partition, partition_logic, paste, MAX_REALIZED_POINTS};
pub use dot::hasse_dot;
pub use json::{ElementDoc, LatticeDoc};
pub use laws::{
    commutes, laws, violates_distributivity, violates_modularity, violates_orthomodularity,
    LawReport,
};

/// Largest lattice accepted for construction and exhaustive law checks.
pub const MAX_LATTICE: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeElement {
    pub label: String,
    /// Realisation as a subset of a sample space, when known.
    pub members: Option<EpistemicState>,
}

impl LatticeElement {
    pub fn new(label: impl Into<String>) -> Self {
        LatticeElement {
            label: label.into(),
            members: None,
        }
    }

    pub fn realized(label: impl Into<String>, members: EpistemicState) -> Self {
        LatticeElement {
            label: label.into(),
            members: Some(members),
        }
    }
}

/// An explicit finite lattice with optional orthocomplement. Meets and joins
/// are tabulated at construction; construction fails unless every pair has a
/// unique meet and join and the orthocomplement (if any) satisfies the
/// ortholattice axioms.
#[derive(Debug, Clone)]
pub struct FiniteLattice {
    elements: Vec<LatticeElement>,
    up: Vec<FixedBitSet>,
    down: Vec<FixedBitSet>,
    ortho: Option<Vec<usize>>,
    meet: Vec<u16>,
    join: Vec<u16>,
    bottom: usize,
    top: usize,
}

impl FiniteLattice {
    /// Build from a dense `leq[a][b] ⇔ a ≤ b` matrix.
    pub fn new(
        elements: Vec<LatticeElement>,
        leq: &[Vec<bool>],
        ortho: Option<Vec<usize>>,
    ) -> Result<Self> {
        let n = elements.len();
        if leq.len() != n || leq.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidLattice(format!(
                "order matrix is not {n} x {n}"
            )));
        }
        if n > MAX_LATTICE {
            return Err(Error::TooLarge {
                size: n,
                cap: MAX_LATTICE,
            });
        }
        let up = leq
            .iter()
            .map(|row| {
                let mut set = FixedBitSet::with_capacity(n);
                for (b, &le) in row.iter().enumerate() {
                    set.set(b, le);
                }
                set
            })
            .collect();
        Self::from_up_sets(elements, up, ortho)
    }

    pub(crate) fn from_up_sets(
        elements: Vec<LatticeElement>,
        up: Vec<FixedBitSet>,
        ortho: Option<Vec<usize>>,
    ) -> Result<Self> {
        let n = elements.len();
        if n == 0 {
            return Err(Error::InvalidLattice("a lattice needs at least one element".into()));
        }
        if n > MAX_LATTICE {
            return Err(Error::TooLarge {
                size: n,
                cap: MAX_LATTICE,
            });
        }
        let mut down = vec![FixedBitSet::with_capacity(n); n];
        for a in 0..n {
            if !up[a].contains(a) {
                return Err(Error::InvalidLattice(format!("order is not reflexive at {a}")));
            }
            for b in up[a].ones() {
                down[b].insert(a);
            }
        }
        for a in 0..n {
            for b in up[a].ones() {
                if b != a && up[b].contains(a) {
                    return Err(Error::InvalidLattice(format!(
                        "order is not antisymmetric at ({a}, {b})"
                    )));
                }
                if !up[b].is_subset(&up[a]) {
                    return Err(Error::InvalidLattice(format!(
                        "order is not transitive through ({a}, {b})"
                    )));
                }
            }
        }
        let meet = bound_table(&down, "meet")?;
        let join = bound_table(&up, "join")?;
        let bottom = (0..n).find(|&a| up[a].count_ones(..) == n).ok_or_else(|| {
            Error::InvalidLattice("no bottom element".into())
        })?;
        let top = (0..n).find(|&a| down[a].count_ones(..) == n).ok_or_else(|| {
            Error::InvalidLattice("no top element".into())
        })?;
        let lattice = FiniteLattice {
            elements,
            up,
            down,
            ortho: None,
            meet,
            join,
            bottom,
            top,
        };
        match ortho {
            None => Ok(lattice),
            Some(o) => lattice.with_ortho(o),
        }
    }

    fn with_ortho(mut self, ortho: Vec<usize>) -> Result<Self> {
        let n = self.len();
        if ortho.len() != n || ortho.iter().any(|&o| o >= n) {
            return Err(Error::InvalidLattice("orthocomplement is not a map on the elements".into()));
        }
        for a in 0..n {
            let oa = ortho[a];
            if ortho[oa] != a {
                return Err(Error::InvalidLattice(format!("orthocomplement is not an involution at {a}")));
            }
            if self.meet(a, oa) != self.bottom || self.join(a, oa) != self.top {
                return Err(Error::InvalidLattice(format!(
                    "{a} and its orthocomplement are not complements"
                )));
            }
            for b in self.up[a].ones() {
                if !self.leq(ortho[b], oa) {
                    return Err(Error::InvalidLattice(format!(
                        "orthocomplement does not reverse {a} <= {b}"
                    )));
                }
            }
        }
        self.ortho = Some(ortho);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[LatticeElement] {
        &self.elements
    }

    pub fn label(&self, a: usize) -> &str {
        &self.elements[a].label
    }

    /// First element carrying `label`.
    pub fn find(&self, label: &str) -> Option<usize> {
        self.elements.iter().position(|e| e.label == label)
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(b)
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.len() + b] as usize
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.len() + b] as usize
    }

    pub fn ortho(&self, a: usize) -> Option<usize> {
        self.ortho.as_ref().map(|o| o[a])
    }

    pub fn ortho_map(&self) -> Option<&[usize]> {
        self.ortho.as_deref()
    }

    pub fn is_orthocomplemented(&self) -> bool {
        self.ortho.is_some()
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn leq_matrix(&self) -> Vec<Vec<bool>> {
        (0..self.len())
            .map(|a| (0..self.len()).map(|b| self.leq(a, b)).collect())
            .collect()
    }

    pub(crate) fn up_set(&self, a: usize) -> &FixedBitSet {
        &self.up[a]
    }

    /// Covering pairs `(a, b)`: `a < b` with nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in self.up[a].ones() {
                if b == a {
                    continue;
                }
                let between = self.up[a]
                    .intersection(&self.down[b])
                    .any(|c| c != a && c != b);
                if !between {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Length of the longest chain from the bottom to `a`.
    pub fn ranks(&self) -> Vec<usize> {
        let n = self.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&a| self.down[a].count_ones(..));
        let mut rank = vec![0usize; n];
        for &b in &order {
            rank[b] = self.down[b]
                .ones()
                .filter(|&a| a != b)
                .map(|a| rank[a] + 1)
                .max()
                .unwrap_or(0);
        }
        rank
    }

    /// An order isomorphism `self → other` (respecting orthocomplements when
    /// both carry one), found by backtracking.
    pub fn isomorphism(&self, other: &FiniteLattice) -> Option<Vec<usize>> {
        let n = self.len();
        if n != other.len() || self.ortho.is_some() != other.ortho.is_some() {
            return None;
        }
        let sig = |l: &FiniteLattice, a: usize| {
            (l.down[a].count_ones(..), l.up[a].count_ones(..))
        };
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&a| sig(self, a));
        let mut image = vec![usize::MAX; n];
        let mut used = vec![false; n];
        if self.extend_iso(other, &order, 0, &mut image, &mut used, &sig) {
            Some(image)
        } else {
            None
        }
    }

    fn extend_iso(
        &self,
        other: &FiniteLattice,
        order: &[usize],
        depth: usize,
        image: &mut Vec<usize>,
        used: &mut Vec<bool>,
        sig: &impl Fn(&FiniteLattice, usize) -> (usize, usize),
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let a = order[depth];
        if image[a] != usize::MAX {
            return self.extend_iso(other, order, depth + 1, image, used, sig);
        }
        for b in 0..other.len() {
            if used[b] || sig(self, a) != sig(other, b) {
                continue;
            }
            let consistent = order[..depth].iter().all(|&c| {
                let d = image[c];
                self.leq(a, c) == other.leq(b, d) && self.leq(c, a) == other.leq(d, b)
            });
            if !consistent {
                continue;
            }
            let mut assigned = vec![a];
            image[a] = b;
            used[b] = true;
            let mut ok = true;
            if let (Some(oa), Some(ob)) = (self.ortho(a), other.ortho(b)) {
                if oa != a {
                    if image[oa] == usize::MAX && !used[ob] {
                        image[oa] = ob;
                        used[ob] = true;
                        assigned.push(oa);
                    } else if image[oa] != ob {
                        ok = false;
                    }
                } else if ob != b {
                    ok = false;
                }
            }
            if ok {
                // the paired orthocomplement must also respect every mapped element
                ok = assigned.iter().all(|&x| {
                    (0..self.len()).all(|c| {
                        let d = image[c];
                        d == usize::MAX
                            || (self.leq(x, c) == other.leq(image[x], d)
                                && self.leq(c, x) == other.leq(d, image[x]))
                    })
                });
            }
            if ok && self.extend_iso(other, order, depth + 1, image, used, sig) {
                return true;
            }
            for &x in &assigned {
                used[image[x]] = false;
                image[x] = usize::MAX;
            }
        }
        false
    }
}

/// Tabulate the greatest element of `sets[a] ∩ sets[b]` (lower bounds when
/// `sets` are down-sets, upper bounds for up-sets).
fn bound_table(sets: &[FixedBitSet], op: &'static str) -> Result<Vec<u16>> {
    let n = sets.len();
    let sizes: Vec<usize> = sets.iter().map(|s| s.count_ones(..)).collect();
    let mut table = vec![0u16; n * n];
    for a in 0..n {
        for b in a..n {
            let mut common = sets[a].clone();
            common.intersect_with(&sets[b]);
            let best = common.ones().max_by_key(|&c| (sizes[c], std::cmp::Reverse(c)));
            let c = match best {
                Some(c) if sets[c] == common => c,
                _ => return Err(Error::NotALattice { a, b, op }),
            };
            table[a * n + b] = c as u16;
            table[b * n + a] = c as u16;
        }
    }
    Ok(table)
}
