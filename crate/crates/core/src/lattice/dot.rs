use std::fmt::Write;

use super::FiniteLattice;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Hasse diagram in DOT: one node per element (ordered by rank, then
/// label, then id), one edge per covering pair drawn bottom to top.
pub fn hasse_dot(l: &FiniteLattice) -> String {
    let ranks = l.ranks();
    let mut order: Vec<usize> = (0..l.len()).collect();
    order.sort_by(|&a, &b| (ranks[a], l.label(a), a).cmp(&(ranks[b], l.label(b), b)));
    let mut edges = l.covers();
    let pos: Vec<usize> = {
        let mut p = vec![0; l.len()];
        for (i, &a) in order.iter().enumerate() {
            p[a] = i;
        }
        p
    };
    edges.sort_by_key(|&(a, b)| (pos[a], pos[b]));

    let mut out = String::from("digraph lattice {\n  rankdir=BT;\n  node [shape=plaintext];\n");
    for &a in &order {
        writeln!(out, "  n{a} [label={}];", quote(l.label(a))).unwrap();
    }
    for (a, b) in edges {
        writeln!(out, "  n{a} -> n{b};").unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::fixtures;

    #[test]
    fn diamond() {
        let dot = hasse_dot(&fixtures::boolean(2).unwrap());
        assert_eq!(dot.matches("[label=").count(), 4);
        assert_eq!(dot.matches("->").count(), 4);
        assert!(dot.starts_with("digraph lattice {"));
    }

    #[test]
    fn two_element_lattice() {
        let dot = hasse_dot(&fixtures::boolean(1).unwrap());
        assert_eq!(dot.matches("[label=").count(), 2);
        assert_eq!(dot.matches("->").count(), 1);
    }

    #[test]
    fn labels_are_escaped() {
        assert_eq!(quote("a\"b"), "\"a\\\"b\"");
    }
}
