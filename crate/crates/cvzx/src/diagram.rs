//! The diagram IR: open directed graphs of generator nodes with ordered
//! boundaries.
//!
//! Edges are directed; at a node end the direction decides whether the leg
//! is a ket (edge pointing away) or a bra (edge pointing in). Spider legs
//! are an unordered multiset, while Fourier-family nodes and gate boxes have
//! fixed ports. Boundary points carry stable ids and live in the ordered
//! `inputs`/`outputs` lists.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::phase::PhasePoly;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BoundId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// Boxed gates from the representative CV gate table. Parameters are the
/// quadrature-level ones: `Displacement` stores the real and imaginary parts
/// of the coherent amplitude.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum GateRef {
    Displacement { re: Scalar, im: Scalar },
    Rotation(Scalar),
    Squeeze(Scalar),
    CSum(Scalar),
    CZ(Scalar),
    BeamSplitter(Scalar),
    Cubic(Scalar),
}

impl GateRef {
    /// Number of modes the gate acts on.
    pub fn modes(&self) -> usize {
        match self {
            GateRef::CSum(_) | GateRef::CZ(_) | GateRef::BeamSplitter(_) => 2,
            _ => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateRef::Displacement { .. } => "D",
            GateRef::Rotation(_) => "R",
            GateRef::Squeeze(_) => "Sq",
            GateRef::CSum(_) => "CSUM",
            GateRef::CZ(_) => "CZ",
            GateRef::BeamSplitter(_) => "BS",
            GateRef::Cubic(_) => "CPG",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum NodeKind {
    /// White spider, diagonal in the position basis.
    QSpider(PhasePoly),
    /// Gray spider, diagonal in the momentum basis.
    PSpider(PhasePoly),
    Fourier,
    FourierDag,
    FourierSq,
    Gate(GateRef),
}

impl NodeKind {
    pub fn is_spider(&self) -> bool {
        matches!(self, NodeKind::QSpider(_) | NodeKind::PSpider(_))
    }

    pub fn phase(&self) -> Option<&PhasePoly> {
        match self {
            NodeKind::QSpider(f) | NodeKind::PSpider(f) => Some(f),
            _ => None,
        }
    }

    /// Port count for nodes with ordered ports; `None` for spiders.
    pub fn port_count(&self) -> Option<u8> {
        match self {
            NodeKind::QSpider(_) | NodeKind::PSpider(_) => None,
            NodeKind::Fourier | NodeKind::FourierDag | NodeKind::FourierSq => Some(2),
            NodeKind::Gate(g) => Some(2 * g.modes() as u8),
        }
    }
}

/// One endpoint of an edge. Spider ends always use port 0; ordered nodes use
/// their fixed port layout (1-mode boxes and Fourier nodes: 0 = in, 1 = out;
/// 2-mode boxes: 0,1 = ins, 2,3 = outs).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum End {
    Node(NodeId, u8),
    Bound(BoundId),
}

impl End {
    pub fn node(self) -> Option<NodeId> {
        match self {
            End::Node(n, _) => Some(n),
            End::Bound(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub src: End,
    pub dst: End,
}

impl Edge {
    pub fn other(&self, end: End) -> End {
        if self.src == end {
            self.dst
        } else {
            self.src
        }
    }

    pub fn touches(&self, node: NodeId) -> bool {
        self.src.node() == Some(node) || self.dst.node() == Some(node)
    }
}

/// Which boundary port an operation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryRef {
    Input(usize),
    Output(usize),
}

#[derive(Debug, Error)]
pub enum DiagramError {
    #[error("arity mismatch: composing {lhs_inputs} inputs against {rhs_outputs} outputs")]
    ArityMismatch { lhs_inputs: usize, rhs_outputs: usize },
    #[error("unknown boundary port {0:?}")]
    UnknownPort(BoundaryRef),
    #[error("gate decomposition is singular: {0}")]
    SingularDecomposition(String),
    #[error("gate parameter must be nonzero: {0}")]
    ZeroParam(&'static str),
    #[error("malformed diagram: {0}")]
    Malformed(String),
}

#[derive(Clone, Debug, Default)]
pub struct Diagram {
    pub(crate) nodes: BTreeMap<NodeId, NodeKind>,
    pub(crate) edges: BTreeMap<EdgeId, Edge>,
    pub(crate) inputs: Vec<BoundId>,
    pub(crate) outputs: Vec<BoundId>,
    /// Count of bare closed loops (node-free scalar subdiagrams).
    pub(crate) loops: u32,
    next_node: u32,
    next_edge: u32,
    next_bound: u32,
    revision: u64,
}

impl Diagram {
    pub fn new() -> Self {
        Diagram::default()
    }

    /// The n-mode identity: n parallel wires.
    pub fn identity(n: usize) -> Self {
        let mut d = Diagram::new();
        for _ in 0..n {
            let i = d.add_input();
            let o = d.add_output();
            d.add_edge(End::Bound(i), End::Bound(o));
        }
        d
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn loops(&self) -> u32 {
        self.loops
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &NodeKind)> {
        self.nodes.iter().map(|(k, v)| (*k, v))
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, &Edge)> {
        self.edges.iter().map(|(k, v)| (*k, v))
    }

    pub fn node(&self, id: NodeId) -> Option<&NodeKind> {
        self.nodes.get(&id)
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.get(&id)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub(crate) fn bump(&mut self) {
        self.revision += 1;
    }

    pub fn add_node(&mut self, kind: NodeKind) -> NodeId {
        let id = NodeId(self.next_node);
        self.next_node += 1;
        self.nodes.insert(id, kind);
        self.bump();
        id
    }

    pub fn add_input(&mut self) -> BoundId {
        let id = BoundId(self.next_bound);
        self.next_bound += 1;
        self.inputs.push(id);
        self.bump();
        id
    }

    pub fn add_output(&mut self) -> BoundId {
        let id = BoundId(self.next_bound);
        self.next_bound += 1;
        self.outputs.push(id);
        self.bump();
        id
    }

    pub fn add_edge(&mut self, src: End, dst: End) -> EdgeId {
        let id = EdgeId(self.next_edge);
        self.next_edge += 1;
        self.edges.insert(id, Edge { src, dst });
        self.bump();
        id
    }

    pub fn set_node(&mut self, id: NodeId, kind: NodeKind) {
        self.nodes.insert(id, kind);
        self.bump();
    }

    pub fn remove_node(&mut self, id: NodeId) {
        self.nodes.remove(&id);
        self.bump();
    }

    pub fn remove_edge(&mut self, id: EdgeId) -> Option<Edge> {
        self.bump();
        self.edges.remove(&id)
    }

    pub fn add_loop_scalar(&mut self) {
        self.loops += 1;
        self.bump();
    }

    /// Inserts a node under an explicit id (deserialization support).
    pub(crate) fn insert_node_raw(&mut self, id: NodeId, kind: NodeKind) {
        self.next_node = self.next_node.max(id.0 + 1);
        self.nodes.insert(id, kind);
        self.bump();
    }

    /// Inserts an edge under an explicit id (deserialization support).
    pub(crate) fn insert_edge_raw(&mut self, id: EdgeId, src: End, dst: End) {
        self.next_edge = self.next_edge.max(id.0 + 1);
        self.edges.insert(id, Edge { src, dst });
        self.bump();
    }

    pub(crate) fn push_input_raw(&mut self, b: BoundId) {
        self.next_bound = self.next_bound.max(b.0 + 1);
        self.inputs.push(b);
        self.bump();
    }

    pub(crate) fn push_output_raw(&mut self, b: BoundId) {
        self.next_bound = self.next_bound.max(b.0 + 1);
        self.outputs.push(b);
        self.bump();
    }

    /// Edge ends incident to a node, in edge-id order: `(edge, is_src, port)`.
    pub fn ends_at(&self, node: NodeId) -> Vec<(EdgeId, bool, u8)> {
        let mut out = Vec::new();
        for (id, e) in &self.edges {
            if let End::Node(n, p) = e.src {
                if n == node {
                    out.push((*id, true, p));
                }
            }
            if let End::Node(n, p) = e.dst {
                if n == node {
                    out.push((*id, false, p));
                }
            }
        }
        out
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.ends_at(node).len()
    }

    /// The unique edge incident to a boundary point, with `true` when the
    /// boundary is the edge's source.
    pub fn boundary_edge(&self, b: BoundId) -> Option<(EdgeId, bool)> {
        for (id, e) in &self.edges {
            if e.src == End::Bound(b) {
                return Some((*id, true));
            }
            if e.dst == End::Bound(b) {
                return Some((*id, false));
            }
        }
        None
    }

    pub fn input_bound(&self, k: usize) -> Option<BoundId> {
        self.inputs.get(k).copied()
    }

    pub fn output_bound(&self, k: usize) -> Option<BoundId> {
        self.outputs.get(k).copied()
    }

    /// Structural well-formedness: every boundary point and every ordered
    /// port carries exactly one edge end.
    pub fn validate(&self) -> Result<(), DiagramError> {
        let mut bound_seen: BTreeMap<BoundId, usize> = BTreeMap::new();
        let mut port_seen: BTreeMap<(NodeId, u8), usize> = BTreeMap::new();
        let mut check_end = |end: &End| -> Result<(), DiagramError> {
            match end {
                End::Bound(b) => {
                    *bound_seen.entry(*b).or_insert(0) += 1;
                }
                End::Node(n, p) => {
                    let kind = self
                        .nodes
                        .get(n)
                        .ok_or_else(|| DiagramError::Malformed(format!("edge references missing node {n}")))?;
                    match kind.port_count() {
                        None => {
                            if *p != 0 {
                                return Err(DiagramError::Malformed(format!(
                                    "spider {n} referenced with port {p}"
                                )));
                            }
                        }
                        Some(k) => {
                            if *p >= k {
                                return Err(DiagramError::Malformed(format!(
                                    "node {n} has no port {p}"
                                )));
                            }
                            *port_seen.entry((*n, *p)).or_insert(0) += 1;
                        }
                    }
                }
            }
            Ok(())
        };
        for e in self.edges.values() {
            check_end(&e.src)?;
            check_end(&e.dst)?;
        }
        for b in self.inputs.iter().chain(self.outputs.iter()) {
            if bound_seen.get(b).copied().unwrap_or(0) != 1 {
                return Err(DiagramError::Malformed(format!(
                    "boundary point {b:?} must have exactly one wire"
                )));
            }
        }
        if bound_seen.len() != self.inputs.len() + self.outputs.len() {
            return Err(DiagramError::Malformed(
                "edge references a boundary point not in the input/output lists".into(),
            ));
        }
        for ((n, _), count) in port_seen.iter() {
            if *count != 1 {
                return Err(DiagramError::Malformed(format!(
                    "ordered port on node {n} wired {count} times"
                )));
            }
        }
        for (n, kind) in &self.nodes {
            if let Some(k) = kind.port_count() {
                for p in 0..k {
                    if !port_seen.contains_key(&(*n, p)) {
                        return Err(DiagramError::Malformed(format!(
                            "port {p} of node {n} is dangling"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Merges another diagram's nodes and edges, returning the id offsets
    /// applied to it. Boundaries are *not* appended to the lists; callers
    /// decide where they go.
    fn absorb(&mut self, other: &Diagram) -> (u32, u32, u32) {
        let (dn, de, db) = (self.next_node, self.next_edge, self.next_bound);
        for (id, kind) in &other.nodes {
            self.nodes.insert(NodeId(id.0 + dn), kind.clone());
        }
        let remap = |end: &End| match end {
            End::Node(n, p) => End::Node(NodeId(n.0 + dn), *p),
            End::Bound(b) => End::Bound(BoundId(b.0 + db)),
        };
        for (id, e) in &other.edges {
            self.edges.insert(
                EdgeId(id.0 + de),
                Edge { src: remap(&e.src), dst: remap(&e.dst) },
            );
        }
        self.loops += other.loops;
        self.next_node += other.next_node;
        self.next_edge += other.next_edge;
        self.next_bound += other.next_bound;
        self.bump();
        (dn, de, db)
    }

    /// Vertical stacking: inputs and outputs concatenate, interpretation is
    /// the tensor product.
    pub fn parallel(&self, other: &Diagram) -> Diagram {
        let mut d = self.clone();
        let (_, _, db) = d.absorb(other);
        d.inputs
            .extend(other.inputs.iter().map(|b| BoundId(b.0 + db)));
        d.outputs
            .extend(other.outputs.iter().map(|b| BoundId(b.0 + db)));
        d
    }

    /// Joins two wire stubs after their shared junction point disappears.
    /// `a_end`/`b_end` are the surviving ends; `a_out`/`b_out` tell whether
    /// the removed junction acted as the wire's head (`true` means the old
    /// edge pointed *into* the junction from that side).
    fn join_stubs(&mut self, a_end: End, a_into: bool, b_end: End, b_into: bool) {
        match (a_into, b_into) {
            // a -> junction -> b
            (true, false) => {
                self.add_edge(a_end, b_end);
            }
            // b -> junction -> a
            (false, true) => {
                self.add_edge(b_end, a_end);
            }
            // both point into the junction: delta pairing, kept as a blank
            // q-spider (its kernel is exactly the cup)
            (true, true) => {
                let j = self.add_node(NodeKind::QSpider(PhasePoly::zero()));
                self.add_edge(a_end, End::Node(j, 0));
                self.add_edge(b_end, End::Node(j, 0));
            }
            // both point away from the junction: the cap, same spider
            (false, false) => {
                let j = self.add_node(NodeKind::QSpider(PhasePoly::zero()));
                self.add_edge(End::Node(j, 0), a_end);
                self.add_edge(End::Node(j, 0), b_end);
            }
        }
    }

    /// Fuses a pair of boundary points (already removed from the lists) by
    /// splicing their wires together.
    fn splice_bounds(&mut self, a: BoundId, b: BoundId) {
        let (ea, _) = self.boundary_edge(a).expect("boundary has a wire");
        let (eb, _) = self.boundary_edge(b).expect("boundary has a wire");
        if ea == eb {
            // One wire ran directly between the two points; it closes into a
            // bare loop scalar.
            self.remove_edge(ea);
            self.add_loop_scalar();
            return;
        }
        let edge_a = self.remove_edge(ea).unwrap();
        let edge_b = self.remove_edge(eb).unwrap();
        let (a_end, a_into) = if edge_a.dst == End::Bound(a) {
            (edge_a.src, true)
        } else {
            (edge_a.dst, false)
        };
        let (b_end, b_into) = if edge_b.dst == End::Bound(b) {
            (edge_b.src, true)
        } else {
            (edge_b.dst, false)
        };
        self.join_stubs(a_end, a_into, b_end, b_into);
    }

    /// Sequential composition `self . earlier`: every output of `earlier`
    /// is connected to the matching input of `self`.
    pub fn compose(&self, earlier: &Diagram) -> Result<Diagram, DiagramError> {
        if self.num_inputs() != earlier.num_outputs() {
            return Err(DiagramError::ArityMismatch {
                lhs_inputs: self.num_inputs(),
                rhs_outputs: earlier.num_outputs(),
            });
        }
        let mut d = earlier.clone();
        let (_, _, db) = d.absorb(self);
        let later_inputs: Vec<BoundId> = self.inputs.iter().map(|b| BoundId(b.0 + db)).collect();
        let later_outputs: Vec<BoundId> = self.outputs.iter().map(|b| BoundId(b.0 + db)).collect();
        let earlier_outputs = std::mem::take(&mut d.outputs);
        d.outputs = later_outputs;
        for (o, i) in earlier_outputs.into_iter().zip(later_inputs) {
            d.splice_bounds(o, i);
        }
        Ok(d)
    }

    /// Conjugate diagram: all arrows invert, phase functions negate, the
    /// Fourier node swaps with its inverse, and inputs trade places with
    /// outputs. Gate boxes are expanded first.
    pub fn conjugate(&self) -> Result<Diagram, DiagramError> {
        let mut d = self.expand_gates()?;
        for kind in d.nodes.values_mut() {
            *kind = match kind {
                NodeKind::QSpider(f) => NodeKind::QSpider(f.neg()),
                NodeKind::PSpider(f) => NodeKind::PSpider(f.neg()),
                NodeKind::Fourier => NodeKind::FourierDag,
                NodeKind::FourierDag => NodeKind::Fourier,
                NodeKind::FourierSq => NodeKind::FourierSq,
                NodeKind::Gate(_) => unreachable!("gates expanded"),
            };
        }
        for e in d.edges.values_mut() {
            std::mem::swap(&mut e.src, &mut e.dst);
        }
        std::mem::swap(&mut d.inputs, &mut d.outputs);
        d.bump();
        Ok(d)
    }

    /// Moves a boundary point between the input and output lists (the
    /// generalized Choi-Jamiolkowski bend). The wire itself is untouched:
    /// its direction, read against the port's new role, is thereby flipped.
    pub fn reverse_leg(&self, port: BoundaryRef) -> Result<Diagram, DiagramError> {
        let mut d = self.clone();
        match port {
            BoundaryRef::Input(k) => {
                if k >= d.inputs.len() {
                    return Err(DiagramError::UnknownPort(port));
                }
                let b = d.inputs.remove(k);
                d.outputs.push(b);
            }
            BoundaryRef::Output(k) => {
                if k >= d.outputs.len() {
                    return Err(DiagramError::UnknownPort(port));
                }
                let b = d.outputs.remove(k);
                d.inputs.push(b);
            }
        }
        d.bump();
        Ok(d)
    }

    /// Contraction: joins an output port to an input port into an internal
    /// wire (self-loops permitted).
    pub fn contract(&self, out_k: usize, in_k: usize) -> Result<Diagram, DiagramError> {
        let mut d = self.clone();
        if out_k >= d.outputs.len() {
            return Err(DiagramError::UnknownPort(BoundaryRef::Output(out_k)));
        }
        if in_k >= d.inputs.len() {
            return Err(DiagramError::UnknownPort(BoundaryRef::Input(in_k)));
        }
        let o = d.outputs.remove(out_k);
        let i = d.inputs.remove(in_k);
        d.splice_bounds(o, i);
        Ok(d)
    }

    /// Replaces a gate-box node by an expansion diagram whose boundary
    /// lists line up with the box ports (inputs then outputs, mode order).
    pub(crate) fn inline_expansion(&mut self, node: NodeId, expansion: &Diagram) {
        let modes = match self.nodes.get(&node) {
            Some(NodeKind::Gate(g)) => g.modes(),
            _ => panic!("inline_expansion on a non-gate node"),
        };
        debug_assert_eq!(expansion.num_inputs(), modes);
        debug_assert_eq!(expansion.num_outputs(), modes);
        let (_, _, db) = self.absorb(expansion);
        self.nodes.remove(&node);
        // Ports 0..modes are ins, modes..2*modes are outs.
        for m in 0..modes {
            let in_port = m as u8;
            let out_port = (modes + m) as u8;
            let exp_in = BoundId(expansion.inputs[m].0 + db);
            let exp_out = BoundId(expansion.outputs[m].0 + db);
            self.retarget_port(node, in_port, exp_in);
            self.retarget_port(node, out_port, exp_out);
        }
    }

    /// Splices the edge at `(node, port)` to the wire hanging off boundary
    /// `b` of an absorbed expansion.
    fn retarget_port(&mut self, node: NodeId, port: u8, b: BoundId) {
        let outer = self
            .edges
            .iter()
            .find(|(_, e)| {
                e.src == End::Node(node, port) || e.dst == End::Node(node, port)
            })
            .map(|(id, _)| *id)
            .expect("gate port is wired");
        let (inner, _) = self.boundary_edge(b).expect("expansion boundary wired");
        if outer == inner {
            unreachable!("outer edge cannot reach the absorbed expansion yet");
        }
        let edge_o = self.remove_edge(outer).unwrap();
        let edge_i = self.remove_edge(inner).unwrap();
        let (o_end, o_into) = if edge_o.dst == End::Node(node, port) {
            (edge_o.src, true)
        } else {
            (edge_o.dst, false)
        };
        let (i_end, i_into) = if edge_i.dst == End::Bound(b) {
            (edge_i.src, true)
        } else {
            (edge_i.dst, false)
        };
        self.join_stubs(o_end, o_into, i_end, i_into);
    }

    /// True when the diagram contains at least one gate box.
    pub fn has_gates(&self) -> bool {
        self.nodes
            .values()
            .any(|k| matches!(k, NodeKind::Gate(_)))
    }

    /// Node + edge ids of the subgraph reachable from the boundary. Closed
    /// scalar components are excluded (they are ignored by equivalence).
    pub(crate) fn boundary_component(&self) -> (BTreeSet<NodeId>, BTreeSet<EdgeId>) {
        let mut nodes = BTreeSet::new();
        let mut edges = BTreeSet::new();
        let mut stack: Vec<NodeId> = Vec::new();
        for b in self.inputs.iter().chain(self.outputs.iter()) {
            if let Some((eid, _)) = self.boundary_edge(*b) {
                edges.insert(eid);
                let e = &self.edges[&eid];
                for end in [e.src, e.dst] {
                    if let Some(n) = end.node() {
                        if nodes.insert(n) {
                            stack.push(n);
                        }
                    }
                }
            }
        }
        while let Some(n) = stack.pop() {
            for (eid, _, _) in self.ends_at(n) {
                if edges.insert(eid) {
                    let e = &self.edges[&eid];
                    for end in [e.src, e.dst] {
                        if let Some(m) = end.node() {
                            if nodes.insert(m) {
                                stack.push(m);
                            }
                        }
                    }
                }
            }
        }
        (nodes, edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_shape() {
        let d = Diagram::identity(2);
        assert_eq!(d.num_inputs(), 2);
        assert_eq!(d.num_outputs(), 2);
        assert_eq!(d.edge_count(), 2);
        d.validate().unwrap();
    }

    #[test]
    fn parallel_counts_arity() {
        let mut state = Diagram::new();
        let n = state.add_node(NodeKind::QSpider(PhasePoly::zero()));
        let o = state.add_output();
        state.add_edge(End::Node(n, 0), End::Bound(o));
        let d = state.parallel(&Diagram::identity(1));
        assert_eq!(d.num_inputs(), 1);
        assert_eq!(d.num_outputs(), 2);
        d.validate().unwrap();
    }

    #[test]
    fn compose_wire_is_identity_shaped() {
        let d = Diagram::identity(1).compose(&Diagram::identity(1)).unwrap();
        assert_eq!(d.num_inputs(), 1);
        assert_eq!(d.num_outputs(), 1);
        assert_eq!(d.edge_count(), 1);
        d.validate().unwrap();
    }

    #[test]
    fn compose_arity_mismatch() {
        let err = Diagram::identity(2).compose(&Diagram::identity(1));
        assert!(matches!(err, Err(DiagramError::ArityMismatch { .. })));
    }

    #[test]
    fn contract_wire_gives_loop_scalar() {
        let d = Diagram::identity(1).contract(0, 0).unwrap();
        assert_eq!(d.num_inputs(), 0);
        assert_eq!(d.num_outputs(), 0);
        assert_eq!(d.loops(), 1);
        assert_eq!(d.edge_count(), 0);
    }

    #[test]
    fn contract_then_reverse_is_rejected() {
        let d = Diagram::identity(1).contract(0, 0).unwrap();
        assert!(matches!(
            d.reverse_leg(BoundaryRef::Output(0)),
            Err(DiagramError::UnknownPort(_))
        ));
    }

    #[test]
    fn reverse_twice_restores_boundary_shape() {
        let d = Diagram::identity(1);
        let r = d.reverse_leg(BoundaryRef::Output(0)).unwrap();
        assert_eq!(r.num_inputs(), 2);
        assert_eq!(r.num_outputs(), 0);
        let rr = r.reverse_leg(BoundaryRef::Input(1)).unwrap();
        assert_eq!(rr.num_inputs(), 1);
        assert_eq!(rr.num_outputs(), 1);
    }
}
