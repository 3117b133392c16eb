//! Polynomial Heisenberg semantics for unitary diagrams, including
//! non-Gaussian ones.
//!
//! The interpreter assigns to every edge end a pair of phase-space values as
//! multivariate polynomials in the input quadratures, then propagates node
//! constraints until the outputs resolve. A q-spider with phase `f` kicks
//! momentum by `f'(q)`; a p-spider kicks position by `f'(p)`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::diagram::{Diagram, NodeKind};
use crate::phase::PhasePoly;
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum HeisenbergError {
    #[error("diagram is not unitary (or not orientable): {0}")]
    NotUnitary(String),
    #[error("gate boxes must expand before interpretation: {0}")]
    Expansion(String),
}

/// Monomial exponents over the `2n` input variables `(q1, p1, ..)`.
type Expts = Vec<u16>;

/// Multivariate polynomial with scalar coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct MPoly {
    pub nvars: usize,
    /// exponent vector -> coefficient; zero coefficients are absent.
    pub terms: BTreeMap<Expts, Scalar>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        let mut p = MPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0u16; nvars];
        e[i] = 1;
        let mut p = MPoly::zero(nvars);
        p.terms.insert(e, Scalar::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert(&mut self, e: Expts, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(Scalar::zero);
        *entry = entry.add(&c);
        if entry.is_zero() {
            let key = self
                .terms
                .iter()
                .find(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> MPoly {
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Scalar) -> MPoly {
        if s.is_zero() {
            return MPoly::zero(self.nvars);
        }
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.mul(s))).collect(),
        }
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Expts = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                out.insert(e, ca.mul(cb));
            }
        }
        out
    }

    /// Substitutes a univariate polynomial: `f(self)`.
    pub fn compose_univariate(&self, f: &PhasePoly) -> MPoly {
        let mut acc = MPoly::zero(self.nvars);
        for c in f.coeffs().iter().rev() {
            acc = acc.mul(self);
            acc = acc.add(&MPoly::constant(self.nvars, c.clone()));
        }
        acc
    }

    pub fn partial(&self, var: usize) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            out.insert(e2, c.mul(&Scalar::int(e[var] as i64)));
        }
        out
    }

    pub fn total_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|x| *x as usize).sum())
            .max()
            .unwrap_or(0)
    }
}

impl std::fmt::Display for MPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names: Vec<String> = (0..self.nvars / 2)
            .flat_map(|m| [format!("q{}", m + 1), format!("p{}", m + 1)])
            .collect();
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (i, k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*{}", names[i])?,
                    _ => write!(f, "*{}^{}", names[i], k)?,
                }
            }
        }
        Ok(())
    }
}

/// Heisenberg action of a unitary diagram: output quadratures as
/// polynomials in the input quadratures.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMap {
    pub modes: usize,
    /// Interleaved `(Q1, P1, ..., Qn, Pn)`.
    pub outputs: Vec<MPoly>,
}

/// Poisson bracket `{a, b}` with respect to the input quadratures.
pub fn poisson_bracket(a: &MPoly, b: &MPoly) -> MPoly {
    let n = a.nvars / 2;
    let mut acc = MPoly::zero(a.nvars);
    for m in 0..n {
        let (qi, pi) = (2 * m, 2 * m + 1);
        let t1 = a.partial(qi).mul(&b.partial(pi));
        let t2 = a.partial(pi).mul(&b.partial(qi));
        acc = acc.add(&t1).sub(&t2);
    }
    acc
}

/// True iff the map preserves canonical commutation relations as exact
/// polynomial identities.
pub fn check_poisson(map: &PolyMap) -> bool {
    let n = map.modes;
    for i in 0..n {
        for j in 0..n {
            let qq = poisson_bracket(&map.outputs[2 * i], &map.outputs[2 * j]);
            if !qq.is_zero() {
                return false;
            }
            let pp = poisson_bracket(&map.outputs[2 * i + 1], &map.outputs[2 * j + 1]);
            if !pp.is_zero() {
                return false;
            }
            let qp = poisson_bracket(&map.outputs[2 * i], &map.outputs[2 * j + 1]);
            let expect = if i == j {
                MPoly::constant(2 * n, Scalar::one())
            } else {
                MPoly::zero(2 * n)
            };
            if qp != expect {
                return false;
            }
        }
    }
    true
}

/// Slot key: (edge id, end-is-src).
type Slot = (u32, bool);

struct Assignments {
    nvars: usize,
    q: BTreeMap<Slot, MPoly>,
    p: BTreeMap<Slot, MPoly>,
}

impl Assignments {
    fn set_q(&mut self, s: Slot, v: MPoly) -> bool {
        if self.q.contains_key(&s) {
            return false;
        }
        self.q.insert(s, v);
        true
    }
    fn set_p(&mut self, s: Slot, v: MPoly) -> bool {
        if self.p.contains_key(&s) {
            return false;
        }
        self.p.insert(s, v);
        true
    }
}

/// Interprets a unitary diagram as a polynomial quadrature map by worklist
/// constraint propagation. Fails with `NotUnitary` if the constraints do
/// not orient (e.g. post-selected diagrams whose outcome algebra is not
/// sequentially solvable).
pub fn interp_heisenberg(d: &Diagram) -> Result<PolyMap, HeisenbergError> {
    let d = d
        .expand_gates()
        .map_err(|e| HeisenbergError::Expansion(e.to_string()))?;
    let n_in = d.num_inputs();
    let n_out = d.num_outputs();
    if n_in != n_out {
        return Err(HeisenbergError::NotUnitary(format!(
            "map requires equal arities, got {n_out} <- {n_in}"
        )));
    }
    let nvars = 2 * n_in;
    let mut asg = Assignments { nvars, q: BTreeMap::new(), p: BTreeMap::new() };

    // Seed boundary inputs: q_slot = q_in, p_slot = -p_in.
    for k in 0..n_in {
        let b = d.input_bound(k).unwrap();
        let (eid, bound_is_src) = d
            .boundary_edge(b)
            .ok_or_else(|| HeisenbergError::NotUnitary("dangling boundary".into()))?;
        let slot = (eid.0, !bound_is_src);
        asg.set_q(slot, MPoly::var(nvars, 2 * k));
        asg.set_p(slot, MPoly::var(nvars, 2 * k + 1).neg());
    }

    // Propagate until fixpoint.
    let mut progressed = true;
    while progressed {
        progressed = false;
        // Edge ties: q equal, p opposite.
        for (eid, e) in d.edges() {
            if e.src.node().is_none() || e.dst.node().is_none() {
                // Boundary edges: only tie if both ends are boundaries
                // (a through-wire); node-boundary edges use one slot.
                if !(e.src.node().is_none() && e.dst.node().is_none()) {
                    continue;
                }
            }
            let s = (eid.0, true);
            let t = (eid.0, false);
            if let Some(v) = asg.q.get(&s).cloned() {
                progressed |= asg.set_q(t, v);
            }
            if let Some(v) = asg.q.get(&t).cloned() {
                progressed |= asg.set_q(s, v);
            }
            if let Some(v) = asg.p.get(&s).cloned() {
                progressed |= asg.set_p(t, v.neg());
            }
            if let Some(v) = asg.p.get(&t).cloned() {
                progressed |= asg.set_p(s, v.neg());
            }
        }
        for (n, kind) in d.nodes() {
            let legs: Vec<Slot> = d
                .ends_at(n)
                .iter()
                .map(|(eid, is_src, _)| (eid.0, *is_src))
                .collect();
            let oriented: Vec<(Slot, i64)> = d
                .ends_at(n)
                .iter()
                .map(|(eid, is_src, _)| ((eid.0, *is_src), if *is_src { 1 } else { -1 }))
                .collect();
            match kind {
                NodeKind::QSpider(f) => {
                    // All q equal.
                    if let Some(v) = legs.iter().find_map(|s| asg.q.get(s)).cloned() {
                        for s in &legs {
                            progressed |= asg.set_q(*s, v.clone());
                        }
                        // Momentum conservation: sum p = f'(Q).
                        let unknown: Vec<Slot> = legs
                            .iter()
                            .filter(|s| !asg.p.contains_key(*s))
                            .copied()
                            .collect();
                        if unknown.len() == 1 {
                            let mut rhs = v.compose_univariate(&f.derivative());
                            for s in &legs {
                                if let Some(pv) = asg.p.get(s) {
                                    rhs = rhs.sub(pv);
                                }
                            }
                            progressed |= asg.set_p(unknown[0], rhs);
                        }
                    }
                }
                NodeKind::PSpider(f) => {
                    // All oriented p equal: sign * p = T.
                    let t = oriented
                        .iter()
                        .find_map(|(s, sg)| asg.p.get(s).map(|v| v.scale(&Scalar::int(*sg))));
                    if let Some(t) = t {
                        for (s, sg) in &oriented {
                            progressed |= asg.set_p(*s, t.scale(&Scalar::int(*sg)));
                        }
                        // sum sign*q = f'(T)
                        let unknown: Vec<(Slot, i64)> = oriented
                            .iter()
                            .filter(|(s, _)| !asg.q.contains_key(s))
                            .copied()
                            .collect();
                        if unknown.len() == 1 {
                            let mut rhs = t.compose_univariate(&f.derivative());
                            for (s, sg) in &oriented {
                                if let Some(qv) = asg.q.get(s) {
                                    rhs = rhs.sub(&qv.scale(&Scalar::int(*sg)));
                                }
                            }
                            let (slot, sg) = unknown[0];
                            progressed |= asg.set_q(slot, rhs.scale(&Scalar::int(sg)));
                        }
                    }
                }
                NodeKind::Fourier | NodeKind::FourierDag => {
                    let ends = d.ends_at(n);
                    let a = ends.iter().find(|(_, _, p)| *p == 0);
                    let b = ends.iter().find(|(_, _, p)| *p == 1);
                    let (Some(&(ea, sa, _)), Some(&(eb, sb, _))) = (a, b) else {
                        return Err(HeisenbergError::NotUnitary(format!(
                            "Fourier node {n} missing a port"
                        )));
                    };
                    let sa = (ea.0, sa);
                    let sb = (eb.0, sb);
                    let ob = Scalar::int(if sb.1 { 1 } else { -1 });
                    let conj = Scalar::int(if matches!(kind, NodeKind::FourierDag) { -1 } else { 1 });
                    let k = ob.mul(&conj);
                    // p_b = k q_a ; p_a = k q_b (and inverses)
                    if let Some(v) = asg.q.get(&sa).cloned() {
                        progressed |= asg.set_p(sb, v.scale(&k));
                    }
                    if let Some(v) = asg.q.get(&sb).cloned() {
                        progressed |= asg.set_p(sa, v.scale(&k));
                    }
                    if let Some(v) = asg.p.get(&sb).cloned() {
                        progressed |= asg.set_q(sa, v.scale(&k.recip().unwrap()));
                    }
                    if let Some(v) = asg.p.get(&sa).cloned() {
                        progressed |= asg.set_q(sb, v.scale(&k.recip().unwrap()));
                    }
                }
                NodeKind::FourierSq => {
                    let ends = d.ends_at(n);
                    let a = ends.iter().find(|(_, _, p)| *p == 0);
                    let b = ends.iter().find(|(_, _, p)| *p == 1);
                    let (Some(&(ea, sa, _)), Some(&(eb, sb, _))) = (a, b) else {
                        return Err(HeisenbergError::NotUnitary(format!(
                            "Fourier node {n} missing a port"
                        )));
                    };
                    let sa = (ea.0, sa);
                    let sb = (eb.0, sb);
                    // q_a = -q_b, p_a = p_b.
                    if let Some(v) = asg.q.get(&sa).cloned() {
                        progressed |= asg.set_q(sb, v.neg());
                    }
                    if let Some(v) = asg.q.get(&sb).cloned() {
                        progressed |= asg.set_q(sa, v.neg());
                    }
                    if let Some(v) = asg.p.get(&sa).cloned() {
                        progressed |= asg.set_p(sb, v);
                    }
                    if let Some(v) = asg.p.get(&sb).cloned() {
                        progressed |= asg.set_p(sa, v);
                    }
                }
                NodeKind::Gate(_) => unreachable!("gates expanded"),
            }
        }
    }

    validate(&d, &asg)?;

    // Read outputs.
    let mut outputs = Vec::with_capacity(nvars);
    for k in 0..n_out {
        let b = d.output_bound(k).unwrap();
        let (eid, bound_is_src) = d
            .boundary_edge(b)
            .ok_or_else(|| HeisenbergError::NotUnitary("dangling boundary".into()))?;
        let slot = (eid.0, !bound_is_src);
        let q = asg.q.get(&slot).cloned();
        let p = asg.p.get(&slot).cloned();
        match (q, p) {
            (Some(q), Some(p)) => {
                outputs.push(q);
                outputs.push(p);
            }
            _ => {
                return Err(HeisenbergError::NotUnitary(format!(
                    "output {k} did not resolve"
                )))
            }
        }
    }
    Ok(PolyMap { modes: n_out, outputs })
}

/// Rechecks every fully-assigned constraint exactly; the worklist may have
/// satisfied a node through one equation while another, redundant one was
/// violated (which would mean the diagram is not a consistent unitary).
fn validate(d: &Diagram, asg: &Assignments) -> Result<(), HeisenbergError> {
    let fail = |what: String| Err(HeisenbergError::NotUnitary(what));
    for (eid, e) in d.edges() {
        let both_nodes = e.src.node().is_some() && e.dst.node().is_some();
        let both_bounds = e.src.node().is_none() && e.dst.node().is_none();
        if !(both_nodes || both_bounds) {
            continue;
        }
        let s = (eid.0, true);
        let t = (eid.0, false);
        if let (Some(a), Some(b)) = (asg.q.get(&s), asg.q.get(&t)) {
            if a != b {
                return fail(format!("edge {eid:?} position mismatch"));
            }
        }
        if let (Some(a), Some(b)) = (asg.p.get(&s), asg.p.get(&t)) {
            if *a != b.neg() {
                return fail(format!("edge {eid:?} momentum mismatch"));
            }
        }
    }
    for (n, kind) in d.nodes() {
        let oriented: Vec<(Slot, i64)> = d
            .ends_at(n)
            .iter()
            .map(|(eid, is_src, _)| ((eid.0, *is_src), if *is_src { 1 } else { -1 }))
            .collect();
        match kind {
            NodeKind::QSpider(f) => {
                let qs: Vec<&MPoly> = oriented.iter().filter_map(|(s, _)| asg.q.get(s)).collect();
                if qs.len() == oriented.len() && !oriented.is_empty() {
                    if qs.iter().any(|v| **v != *qs[0]) {
                        return fail(format!("q-spider {n} legs disagree"));
                    }
                    let ps: Vec<&MPoly> =
                        oriented.iter().filter_map(|(s, _)| asg.p.get(s)).collect();
                    if ps.len() == oriented.len() {
                        let mut sum = MPoly::zero(asg.nvars);
                        for p in ps {
                            sum = sum.add(p);
                        }
                        if sum != qs[0].compose_univariate(&f.derivative()) {
                            return fail(format!("q-spider {n} momentum kick mismatch"));
                        }
                    }
                }
            }
            NodeKind::PSpider(f) => {
                let ts: Vec<MPoly> = oriented
                    .iter()
                    .filter_map(|(s, sg)| asg.p.get(s).map(|v| v.scale(&Scalar::int(*sg))))
                    .collect();
                if ts.len() == oriented.len() && !oriented.is_empty() {
                    if ts.iter().any(|v| *v != ts[0]) {
                        return fail(format!("p-spider {n} legs disagree"));
                    }
                    let qs: Vec<MPoly> = oriented
                        .iter()
                        .filter_map(|(s, sg)| asg.q.get(s).map(|v| v.scale(&Scalar::int(*sg))))
                        .collect();
                    if qs.len() == oriented.len() {
                        let mut sum = MPoly::zero(asg.nvars);
                        for q in &qs {
                            sum = sum.add(q);
                        }
                        if sum != ts[0].compose_univariate(&f.derivative()) {
                            return fail(format!("p-spider {n} position kick mismatch"));
                        }
                    }
                }
            }
            NodeKind::Fourier | NodeKind::FourierDag | NodeKind::FourierSq => {
                // Two equations, both enforced during propagation; recheck
                // when everything resolved.
                let ends = d.ends_at(n);
                let a = ends.iter().find(|(_, _, p)| *p == 0);
                let b = ends.iter().find(|(_, _, p)| *p == 1);
                let (Some(&(ea, sa, _)), Some(&(eb, sb, _))) = (a, b) else {
                    continue;
                };
                let sa = (ea.0, sa);
                let sb = (eb.0, sb);
                let (qa, pa, qb, pb) = (
                    asg.q.get(&sa),
                    asg.p.get(&sa),
                    asg.q.get(&sb),
                    asg.p.get(&sb),
                );
                let (Some(qa), Some(pa), Some(qb), Some(pb)) = (qa, pa, qb, pb) else {
                    continue;
                };
                if matches!(kind, NodeKind::FourierSq) {
                    if *qa != qb.neg() || pa != pb {
                        return fail(format!("squared Fourier {n} constraint mismatch"));
                    }
                } else {
                    let ob = if sb.1 { 1 } else { -1 };
                    let c = if matches!(kind, NodeKind::FourierDag) { -1 } else { 1 };
                    let k = Scalar::int(ob * c);
                    if *pb != qa.scale(&k) || *pa != qb.scale(&k) {
                        return fail(format!("Fourier {n} constraint mismatch"));
                    }
                }
            }
            NodeKind::Gate(_) => unreachable!("gates expanded"),
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{Diagram, GateRef};

    #[test]
    fn cubic_gate_heisenberg_row() {
        let d = Diagram::gate1(GateRef::Cubic(Scalar::int(2)));
        let m = interp_heisenberg(&d).unwrap();
        // q -> q, p -> p + 6 q^2
        assert_eq!(m.outputs[0], MPoly::var(2, 0));
        let expect = MPoly::var(2, 1).add(&MPoly::var(2, 0).mul(&MPoly::var(2, 0)).scale(&Scalar::int(6)));
        assert_eq!(m.outputs[1], expect);
        assert!(check_poisson(&m));
    }

    #[test]
    fn p_spider_linear_is_position_displacement() {
        use crate::diagram::NodeKind;
        use crate::phase::PhasePoly;
        let d = Diagram::spider1(NodeKind::PSpider(PhasePoly::linear(Scalar::int(3))));
        let m = interp_heisenberg(&d).unwrap();
        assert_eq!(m.outputs[0], MPoly::var(2, 0).add(&MPoly::constant(2, Scalar::int(3))));
        assert_eq!(m.outputs[1], MPoly::var(2, 1));
    }

    #[test]
    fn empty_diagram_is_identity_map() {
        let d = Diagram::identity(2);
        let m = interp_heisenberg(&d).unwrap();
        for (i, out) in m.outputs.iter().enumerate() {
            assert_eq!(out, &MPoly::var(4, i));
        }
        assert!(check_poisson(&m));
    }

    #[test]
    fn poisson_rejects_scaling() {
        let good = PolyMap {
            modes: 1,
            outputs: vec![MPoly::var(2, 0), MPoly::var(2, 1).add(&MPoly::var(2, 0))],
        };
        assert!(check_poisson(&good));
        let bad = PolyMap {
            modes: 1,
            outputs: vec![MPoly::var(2, 0), MPoly::var(2, 1).scale(&Scalar::int(2))],
        };
        assert!(!check_poisson(&bad));
    }
}
