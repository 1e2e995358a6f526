use super::Partition;
use crate::error::Result;

/// Disjoint-set forest with path compression and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(len: usize) -> Self {
        UnionFind {
            parent: (0..len).collect(),
            size: vec![1; len],
        }
    }

    pub fn find(&mut self, mut i: usize) -> usize {
        let mut root = i;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[i] != root {
            let next = self.parent[i];
            self.parent[i] = root;
            i = next;
        }
        root
    }

    /// Merge the sets of `a` and `b`; returns whether they were distinct.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}

/// Finest common coarsening: the partition whose algebra is the
/// intersection of the two algebras. Connected components of the bipartite
/// overlap graph between the cells of `p` and of `q`.
pub fn common_coarsening(p: &Partition, q: &Partition) -> Result<Partition> {
    p.check_space(q)?;
    let np = p.len();
    let mut uf = UnionFind::new(np + q.len());
    for (&a, &b) in p.labels.iter().zip(&q.labels) {
        uf.union(a as usize, np + b as usize);
    }
    let roots: Vec<u64> = p.labels.iter().map(|&a| uf.find(a as usize) as u64).collect();
    Ok(Partition::from_keys(
        &p.space,
        roots.into_iter(),
        Some((np + q.len()) as u64),
        |_| None,
    ))
}
