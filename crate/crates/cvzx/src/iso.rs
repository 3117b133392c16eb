//! Diagram isomorphism respecting boundary order, edge direction, node
//! labels, and spider leg symmetry. Closed scalar components are ignored.

use std::collections::BTreeMap;

use crate::diagram::{BoundId, Diagram, Edge, End, NodeId, NodeKind};

/// Positional stand-in for ends so that boundary ids compare by list index.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Slot {
    Node(usize, u8),
    Input(usize),
    Output(usize),
}

struct Side<'a> {
    d: &'a Diagram,
    nodes: Vec<NodeId>,
    node_pos: BTreeMap<NodeId, usize>,
    bound_pos: BTreeMap<BoundId, Slot>,
    edges: Vec<&'a Edge>,
}

impl<'a> Side<'a> {
    fn new(d: &'a Diagram) -> Self {
        let (keep_nodes, keep_edges) = d.boundary_component();
        let nodes: Vec<NodeId> = keep_nodes.iter().copied().collect();
        let node_pos = nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let mut bound_pos = BTreeMap::new();
        for (k, b) in d.inputs.iter().enumerate() {
            bound_pos.insert(*b, Slot::Input(k));
        }
        for (k, b) in d.outputs.iter().enumerate() {
            bound_pos.insert(*b, Slot::Output(k));
        }
        let edges = d
            .edges()
            .filter(|(id, _)| keep_edges.contains(id))
            .map(|(_, e)| e)
            .collect();
        Side { d, nodes, node_pos, bound_pos, edges }
    }

    fn kind(&self, i: usize) -> &NodeKind {
        self.d.node(self.nodes[i]).expect("node present")
    }

    /// Signature used for pruning: (degree, out-degree, sorted boundary
    /// attachments).
    fn signature(&self, i: usize) -> (usize, usize, Vec<(Slot, bool, u8)>) {
        let n = self.nodes[i];
        let ends = self.d.ends_at(n);
        let degree = ends.len();
        let out_degree = ends.iter().filter(|(_, is_src, _)| *is_src).count();
        let mut bounds = Vec::new();
        for (eid, is_src, port) in &ends {
            let e = self.d.edge(*eid).unwrap();
            let other = if *is_src { e.dst } else { e.src };
            if let End::Bound(b) = other {
                bounds.push((self.bound_pos[&b], *is_src, *port));
            }
        }
        bounds.sort();
        (degree, out_degree, bounds)
    }

    fn slot(&self, end: End, map: &[Option<usize>]) -> Option<Slot> {
        match end {
            End::Bound(b) => Some(self.bound_pos[&b]),
            End::Node(n, p) => {
                let i = self.node_pos[&n];
                map.get(i)
                    .copied()
                    .flatten()
                    .map(|j| Slot::Node(j, normalize_port(self.kind(i), p)))
            }
        }
    }
}

fn normalize_port(kind: &NodeKind, p: u8) -> u8 {
    if kind.is_spider() {
        0
    } else {
        p
    }
}

fn kinds_match(a: &NodeKind, b: &NodeKind) -> bool {
    a == b
}

/// True iff the diagrams are isomorphic as labeled port graphs, matching
/// boundary lists pointwise.
pub fn iso_equal(d1: &Diagram, d2: &Diagram) -> bool {
    let s1 = Side::new(d1);
    let s2 = Side::new(d2);
    if d1.num_inputs() != d2.num_inputs() || d1.num_outputs() != d2.num_outputs() {
        return false;
    }
    if s1.nodes.len() != s2.nodes.len() || s1.edges.len() != s2.edges.len() {
        return false;
    }
    let sig2: Vec<_> = (0..s2.nodes.len()).map(|i| s2.signature(i)).collect();
    let sig1: Vec<_> = (0..s1.nodes.len()).map(|i| s1.signature(i)).collect();
    let mut map: Vec<Option<usize>> = vec![None; s1.nodes.len()];
    let mut used: Vec<bool> = vec![false; s2.nodes.len()];
    backtrack(&s1, &s2, &sig1, &sig2, 0, &mut map, &mut used)
}

fn backtrack(
    s1: &Side,
    s2: &Side,
    sig1: &[(usize, usize, Vec<(Slot, bool, u8)>)],
    sig2: &[(usize, usize, Vec<(Slot, bool, u8)>)],
    i: usize,
    map: &mut Vec<Option<usize>>,
    used: &mut Vec<bool>,
) -> bool {
    if i == s1.nodes.len() {
        return edges_match(s1, s2, map);
    }
    for j in 0..s2.nodes.len() {
        if used[j] || sig1[i] != sig2[j] || !kinds_match(s1.kind(i), s2.kind(j)) {
            continue;
        }
        map[i] = Some(j);
        used[j] = true;
        if backtrack(s1, s2, sig1, sig2, i + 1, map, used) {
            return true;
        }
        map[i] = None;
        used[j] = false;
    }
    false
}

fn edges_match(s1: &Side, s2: &Side, map: &[Option<usize>]) -> bool {
    let ident: Vec<Option<usize>> = (0..s2.nodes.len()).map(Some).collect();
    let mut list1 = Vec::new();
    for e in &s1.edges {
        let (Some(a), Some(b)) = (s1.slot(e.src, map), s1.slot(e.dst, map)) else {
            return false;
        };
        list1.push((a, b));
    }
    let mut list2 = Vec::new();
    for e in &s2.edges {
        let (Some(a), Some(b)) = (s2.slot(e.src, &ident), s2.slot(e.dst, &ident)) else {
            return false;
        };
        list2.push((a, b));
    }
    list1.sort();
    list2.sort();
    list1 == list2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{Diagram, End, NodeKind};
    use crate::phase::PhasePoly;
    use crate::scalar::Scalar;

    fn q(c: i64) -> NodeKind {
        NodeKind::QSpider(PhasePoly::quadratic(Scalar::int(c)))
    }

    #[test]
    fn identical_diagrams_match() {
        let d = Diagram::spider1(q(2));
        assert!(iso_equal(&d, &d.clone()));
    }

    #[test]
    fn label_mismatch_detected() {
        let a = Diagram::spider1(q(1));
        let b = Diagram::spider1(q(2));
        assert!(!iso_equal(&a, &b));
    }

    #[test]
    fn spider_leg_permutation_is_invisible() {
        // Two 2-output spiders whose legs attach to the boundary in
        // different construction orders.
        let mut a = Diagram::new();
        let n = a.add_node(q(0));
        let o0 = a.add_output();
        let o1 = a.add_output();
        a.add_edge(End::Node(n, 0), End::Bound(o0));
        a.add_edge(End::Node(n, 0), End::Bound(o1));

        let mut b = Diagram::new();
        let m = b.add_node(q(0));
        let p0 = b.add_output();
        let p1 = b.add_output();
        b.add_edge(End::Node(m, 0), End::Bound(p1));
        b.add_edge(End::Node(m, 0), End::Bound(p0));

        assert!(iso_equal(&a, &b));
    }

    #[test]
    fn direction_matters() {
        let mut a = Diagram::new();
        let n = a.add_node(q(0));
        let m = a.add_node(NodeKind::PSpider(PhasePoly::zero()));
        let i = a.add_input();
        let o = a.add_output();
        a.add_edge(End::Bound(i), End::Node(m, 0));
        a.add_edge(End::Node(m, 0), End::Node(n, 0));
        a.add_edge(End::Node(n, 0), End::Bound(o));

        let mut b = a.clone();
        // Reverse the internal wire: antipode-style, not isomorphic.
        let internal = b
            .edges()
            .find(|(_, e)| e.src.node().is_some() && e.dst.node().is_some())
            .map(|(id, _)| id)
            .unwrap();
        let e = b.remove_edge(internal).unwrap();
        b.add_edge(e.dst, e.src);

        assert!(!iso_equal(&a, &b));
    }

    #[test]
    fn closed_components_are_ignored() {
        let a = Diagram::identity(1);
        let mut b = Diagram::identity(1);
        // Add a disconnected closed bubble.
        let n = b.add_node(q(3));
        b.add_edge(End::Node(n, 0), End::Node(n, 0));
        assert!(iso_equal(&a, &b));
    }
}
