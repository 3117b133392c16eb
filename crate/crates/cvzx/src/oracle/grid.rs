//! Discretized-kernel tensor semantics on a centered position grid.
//!
//! Position indices live on `s_j = (j - N/2) h` with `h = 2L/N`; the
//! momentum basis is defined through the centered unitary DFT, so momentum
//! values live on `t_b = (b - N/2) 2pi/(N h)`. Spiders become diagonal
//! weight vectors over their own basis grid, wires become delta or DFT
//! kernels, and the whole diagram contracts by variable elimination. Group
//! structure (fusion, copy, antipode, Hopf, bialgebra) is exact on the
//! grid; sampled phases contribute the only discretization error.

use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

use crate::diagram::{Diagram, End, NodeKind};
use crate::phase::PhasePoly;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("tensor too large: {0}")]
    TooLarge(String),
    #[error("shape mismatch between tensors")]
    ShapeMismatch,
    #[error("gate boxes must expand before interpretation: {0}")]
    Expansion(String),
}

/// Grid parameters.
#[derive(Clone, Copy, Debug)]
pub struct GridSpec {
    pub points: usize,
    pub length: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { points: 128, length: 8.0 }
    }
}

impl GridSpec {
    pub fn new(points: usize, length: f64) -> Self {
        GridSpec { points, length }
    }

    /// Position spacing `h`.
    pub fn dq(&self) -> f64 {
        2.0 * self.length / self.points as f64
    }

    /// Momentum spacing `2pi/(N h)`.
    pub fn dp(&self) -> f64 {
        2.0 * std::f64::consts::PI / (self.points as f64 * self.dq())
    }

    pub fn q_value(&self, j: usize) -> f64 {
        (j as f64 - self.points as f64 / 2.0) * self.dq()
    }

    pub fn p_value(&self, b: usize) -> f64 {
        (b as f64 - self.points as f64 / 2.0) * self.dp()
    }

    /// The centered unitary DFT matrix entry `exp(i s_a t_b)/sqrt(N)`.
    pub fn dft(&self) -> Vec<Complex64> {
        let n = self.points;
        let norm = 1.0 / (n as f64).sqrt();
        let mut m = vec![Complex64::new(0.0, 0.0); n * n];
        for a in 0..n {
            let sa = self.q_value(a);
            for b in 0..n {
                let phase = sa * self.p_value(b);
                m[a * n + b] = Complex64::from_polar(norm, phase);
            }
        }
        m
    }
}

/// Dense complex tensor with one grid-sized index per boundary leg,
/// outputs first then inputs.
#[derive(Clone, Debug)]
pub struct GridTensor {
    pub points: usize,
    pub legs: usize,
    pub data: Vec<Complex64>,
}

impl GridTensor {
    fn max_abs(&self) -> (usize, f64) {
        let mut idx = 0;
        let mut best = 0.0;
        for (i, v) in self.data.iter().enumerate() {
            let m = v.norm();
            if m > best {
                best = m;
                idx = i;
            }
        }
        (idx, best)
    }
}

/// `a = c b` for a nonzero complex `c`, compared after normalizing both by
/// their largest-magnitude entry; `tol` is relative to that normalization.
pub fn equal_up_to_scalar(a: &GridTensor, b: &GridTensor, tol: f64) -> Result<bool, GridError> {
    if a.points != b.points || a.legs != b.legs || a.data.len() != b.data.len() {
        return Err(GridError::ShapeMismatch);
    }
    let (ia, ma) = a.max_abs();
    let (_, mb) = b.max_abs();
    if ma == 0.0 || mb == 0.0 {
        return Ok(ma == 0.0 && mb == 0.0);
    }
    // Phase-align on a's peak entry.
    let ca = a.data[ia] / ma;
    let cb = b.data[ia] / mb;
    if cb.norm() < tol {
        return Ok(false);
    }
    let phase = cb / ca;
    let mut worst = 0.0f64;
    for (x, y) in a.data.iter().zip(b.data.iter()) {
        let diff = (x / ma) * phase - y / mb;
        worst = worst.max(diff.norm());
    }
    Ok(worst <= tol)
}

type VarId = usize;

#[derive(Clone)]
struct Factor {
    vars: Vec<VarId>,
    data: Vec<Complex64>,
}

impl Factor {
    fn unary(v: VarId, data: Vec<Complex64>) -> Self {
        Factor { vars: vec![v], data }
    }

    fn size(&self, n: usize) -> usize {
        n.pow(self.vars.len() as u32)
    }
}

/// Leg kernel exposed by a node on one wire.
#[derive(Clone, Copy, Debug, PartialEq)]
enum LegKind {
    /// Exposes the variable's own index (position-diagonal legs).
    Delta,
    /// Exposes the reflected index `(N - j) mod N` (squared Fourier).
    DeltaNeg,
    /// DFT kernel `exp(sign i s_a t_v)/sqrt(N)` toward the position side.
    Wave(i8),
}

struct Network {
    n: usize,
    spec: GridSpec,
    /// Union-find over variables.
    parent: Vec<VarId>,
    weights: Vec<Option<Vec<Complex64>>>,
    factors: Vec<Factor>,
    /// Boundary legs in final order: each reads one variable.
    boundary: Vec<VarId>,
}

impl Network {
    fn fresh(&mut self) -> VarId {
        let v = self.parent.len();
        self.parent.push(v);
        self.weights.push(None);
        v
    }

    fn find(&mut self, v: VarId) -> VarId {
        if self.parent[v] != v {
            let r = self.find(self.parent[v]);
            self.parent[v] = r;
            r
        } else {
            v
        }
    }

    fn merge(&mut self, a: VarId, b: VarId) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return;
        }
        self.parent[rb] = ra;
        let wb = self.weights[rb].take();
        if let Some(wb) = wb {
            match &mut self.weights[ra] {
                Some(wa) => {
                    for (x, y) in wa.iter_mut().zip(wb.iter()) {
                        *x *= y;
                    }
                }
                None => self.weights[ra] = Some(wb),
            }
        }
    }

    fn add_weight(&mut self, v: VarId, w: Vec<Complex64>) {
        let r = self.find(v);
        match &mut self.weights[r] {
            Some(wr) => {
                for (x, y) in wr.iter_mut().zip(w.iter()) {
                    *x *= y;
                }
            }
            None => self.weights[r] = Some(w),
        }
    }

    fn reflection_factor(&self) -> Vec<Complex64> {
        let n = self.n;
        let mut m = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let k = (n - j) % n;
            m[j * n + k] = Complex64::new(1.0, 0.0);
        }
        m
    }

    fn wave_factor(&self, sign: i8, reflected: bool) -> Vec<Complex64> {
        let n = self.n;
        let norm = 1.0 / (n as f64).sqrt();
        let mut m = vec![Complex64::new(0.0, 0.0); n * n];
        for a in 0..n {
            let idx = if reflected { (n - a) % n } else { a };
            let sa = self.spec.q_value(idx);
            for b in 0..n {
                let phase = sign as f64 * sa * self.spec.p_value(b);
                m[a * n + b] = Complex64::from_polar(norm, phase);
            }
        }
        m
    }

    /// Connects two legs across a wire.
    fn connect(&mut self, (va, ka): (VarId, LegKind), (vb, kb): (VarId, LegKind)) {
        use LegKind::*;
        match (ka, kb) {
            (Delta, Delta) => self.merge(va, vb),
            (Delta, DeltaNeg) | (DeltaNeg, Delta) => {
                let (d, r) = if ka == Delta { (va, vb) } else { (vb, va) };
                let m = self.reflection_factor();
                self.factors.push(Factor { vars: vec![r, d], data: m });
            }
            (DeltaNeg, DeltaNeg) => {
                // double reflection = identity
                self.merge(va, vb);
            }
            (Delta, Wave(s)) | (Wave(s), Delta) => {
                let (d, w) = if matches!(ka, Delta) { (va, vb) } else { (vb, va) };
                let m = self.wave_factor(s, false);
                self.factors.push(Factor { vars: vec![d, w], data: m });
            }
            (DeltaNeg, Wave(s)) | (Wave(s), DeltaNeg) => {
                let (d, w) = if matches!(ka, DeltaNeg) { (va, vb) } else { (vb, va) };
                let m = self.wave_factor(s, true);
                self.factors.push(Factor { vars: vec![d, w], data: m });
            }
            (Wave(s1), Wave(s2)) => {
                if s1 == -s2 {
                    // sum_a e^{i a (t1 - t2)} = N delta(t1, t2)
                    self.merge(va, vb);
                } else {
                    // delta(t1 + t2 = 0): momentum reflection, same matrix
                    // shape as the position one on the index grid.
                    let m = self.reflection_factor();
                    self.factors.push(Factor { vars: vec![va, vb], data: m });
                }
            }
        }
    }
}

fn phase_weights_q(spec: &GridSpec, f: &PhasePoly) -> Vec<Complex64> {
    (0..spec.points)
        .map(|j| Complex64::from_polar(1.0, f.eval_f64(spec.q_value(j))))
        .collect()
}

fn phase_weights_p(spec: &GridSpec, f: &PhasePoly) -> Vec<Complex64> {
    (0..spec.points)
        .map(|b| Complex64::from_polar(1.0, -f.eval_f64(spec.p_value(b))))
        .collect()
}

const MAX_ENTRIES: usize = 1 << 24;

/// Evaluates a diagram as a dense tensor over its boundary legs (outputs
/// first, then inputs).
pub fn interp_grid(d: &Diagram, spec: &GridSpec) -> Result<GridTensor, GridError> {
    let d = d
        .expand_gates()
        .map_err(|e| GridError::Expansion(e.to_string()))?;
    let n = spec.points;
    let legs = d.num_outputs() + d.num_inputs();
    if n.pow(legs as u32) > MAX_ENTRIES {
        return Err(GridError::TooLarge(format!(
            "{legs} boundary legs at {n} points"
        )));
    }

    let mut net = Network {
        n,
        spec: *spec,
        parent: Vec::new(),
        weights: Vec::new(),
        factors: Vec::new(),
        boundary: Vec::new(),
    };

    // One variable per node; legs typed per node kind and orientation.
    let mut node_var: BTreeMap<crate::diagram::NodeId, VarId> = BTreeMap::new();
    for (id, kind) in d.nodes() {
        let v = net.fresh();
        node_var.insert(id, v);
        match kind {
            NodeKind::QSpider(f) => net.add_weight(v, phase_weights_q(spec, f)),
            NodeKind::PSpider(f) => net.add_weight(v, phase_weights_p(spec, f)),
            NodeKind::Fourier | NodeKind::FourierDag | NodeKind::FourierSq => {}
            NodeKind::Gate(_) => {
                return Err(GridError::Expansion("gate survived expansion".into()))
            }
        }
    }

    // Leg kind of a node end.
    let leg_kind = |kind: &NodeKind, port: u8, outgoing: bool| -> LegKind {
        match kind {
            NodeKind::QSpider(_) => LegKind::Delta,
            NodeKind::PSpider(_) => LegKind::Wave(if outgoing { 1 } else { -1 }),
            NodeKind::Fourier => {
                if port == 0 {
                    LegKind::Delta
                } else {
                    LegKind::Wave(if outgoing { 1 } else { -1 })
                }
            }
            NodeKind::FourierDag => {
                if port == 0 {
                    LegKind::Delta
                } else {
                    LegKind::Wave(if outgoing { -1 } else { 1 })
                }
            }
            NodeKind::FourierSq => {
                if port == 0 {
                    LegKind::Delta
                } else {
                    LegKind::DeltaNeg
                }
            }
            NodeKind::Gate(_) => unreachable!(),
        }
    };

    // Boundary legs each get a fresh delta variable.
    let mut bound_var: BTreeMap<crate::diagram::BoundId, VarId> = BTreeMap::new();
    for b in d.outputs.iter().chain(d.inputs.iter()) {
        let v = net.fresh();
        bound_var.insert(*b, v);
    }

    let end_leg = |end: End, is_src: bool| -> (VarId, LegKind) {
        match end {
            End::Bound(b) => (bound_var[&b], LegKind::Delta),
            End::Node(nid, port) => {
                let kind = d.node(nid).unwrap();
                (node_var[&nid], leg_kind(kind, port, is_src))
            }
        }
    };

    for (_, e) in d.edges() {
        let la = end_leg(e.src, true);
        let lb = end_leg(e.dst, false);
        net.connect(la, lb);
    }

    // Boundary order: outputs then inputs.
    let bounds: Vec<VarId> = d
        .outputs
        .iter()
        .chain(d.inputs.iter())
        .map(|b| net.find(bound_var[b]))
        .collect();
    net.boundary = bounds.clone();

    // Canonicalize factors to root variables; fold weights in as unary
    // factors.
    let mut factors: Vec<Factor> = Vec::new();
    let nets_factors = std::mem::take(&mut net.factors);
    for mut f in nets_factors {
        for v in f.vars.iter_mut() {
            *v = net.find(*v);
        }
        factors.push(f);
    }
    for v in 0..net.parent.len() {
        if net.find(v) == v {
            if let Some(w) = net.weights[v].clone() {
                factors.push(Factor::unary(v, w));
            }
        }
    }

    // Variables to keep (boundary roots); everything else eliminated.
    let mut keep: Vec<VarId> = net.boundary.clone();
    keep.sort_unstable();
    keep.dedup();
    let mut all_vars: Vec<VarId> = Vec::new();
    for f in &factors {
        for v in &f.vars {
            if !all_vars.contains(v) {
                all_vars.push(*v);
            }
        }
    }
    for v in 0..net.parent.len() {
        if net.find(v) == v && !all_vars.contains(&v) {
            all_vars.push(v);
        }
    }

    let mut internal: Vec<VarId> = all_vars
        .iter()
        .copied()
        .filter(|v| !keep.contains(v))
        .collect();

    // Min-fill-ish greedy elimination.
    while !internal.is_empty() {
        let mut best: Option<(usize, usize)> = None; // (cost-exponent, var idx)
        for (i, v) in internal.iter().enumerate() {
            let mut union: Vec<VarId> = Vec::new();
            for f in factors.iter().filter(|f| f.vars.contains(v)) {
                for w in &f.vars {
                    if w != v && !union.contains(w) {
                        union.push(*w);
                    }
                }
            }
            let cost = union.len();
            if best.map(|(c, _)| cost < c).unwrap_or(true) {
                best = Some((cost, i));
            }
        }
        let (_, i) = best.unwrap();
        let v = internal.remove(i);
        eliminate(&mut factors, v, n)?;
    }

    // Multiply the remaining factors into a single tensor over `keep`.
    let mut acc = Factor { vars: vec![], data: vec![Complex64::new(1.0, 0.0)] };
    let rest = std::mem::take(&mut factors);
    for f in rest {
        acc = multiply(&acc, &f, n)?;
    }
    // Expand to one axis per boundary leg.
    expand_boundary(acc, &net.boundary, n, legs)
}

fn multiply(a: &Factor, b: &Factor, n: usize) -> Result<Factor, GridError> {
    let mut vars = a.vars.clone();
    for v in &b.vars {
        if !vars.contains(v) {
            vars.push(*v);
        }
    }
    let size = n
        .checked_pow(vars.len() as u32)
        .filter(|s| *s <= MAX_ENTRIES)
        .ok_or_else(|| GridError::TooLarge(format!("{}-variable contraction", vars.len())))?;
    let mut data = vec![Complex64::new(0.0, 0.0); size];
    let strides = |fvars: &[VarId]| -> Vec<usize> {
        // row-major strides of each var inside its own factor
        let mut s = vec![0usize; fvars.len()];
        let mut acc = 1usize;
        for i in (0..fvars.len()).rev() {
            s[i] = acc;
            acc *= n;
        }
        s
    };
    let sa = strides(&a.vars);
    let sb = strides(&b.vars);
    let sr = strides(&vars);
    // Per result-variable stride contribution into each operand.
    let mut ca = vec![0usize; vars.len()];
    let mut cb = vec![0usize; vars.len()];
    for (i, v) in a.vars.iter().enumerate() {
        ca[vars.iter().position(|w| w == v).unwrap()] = sa[i];
    }
    for (i, v) in b.vars.iter().enumerate() {
        cb[vars.iter().position(|w| w == v).unwrap()] = sb[i];
    }
    for (flat, slot) in data.iter_mut().enumerate() {
        let mut rem = flat;
        let mut ia = 0usize;
        let mut ib = 0usize;
        for i in 0..vars.len() {
            let val = rem / sr[i];
            rem %= sr[i];
            ia += val * ca[i];
            ib += val * cb[i];
        }
        *slot = a.data[ia] * b.data[ib];
    }
    Ok(Factor { vars, data })
}

fn sum_out(f: Factor, v: VarId, n: usize) -> Factor {
    let pos = f.vars.iter().position(|w| *w == v).expect("var in factor");
    let mut vars = f.vars.clone();
    vars.remove(pos);
    let out_size = n.pow(vars.len() as u32);
    let mut data = vec![Complex64::new(0.0, 0.0); out_size];
    // strides in the input
    let mut strides = vec![0usize; f.vars.len()];
    let mut acc = 1usize;
    for i in (0..f.vars.len()).rev() {
        strides[i] = acc;
        acc *= n;
    }
    let mut out_strides = vec![0usize; vars.len()];
    let mut acc2 = 1usize;
    for i in (0..vars.len()).rev() {
        out_strides[i] = acc2;
        acc2 *= n;
    }
    let mut idx = vec![0usize; f.vars.len()];
    for flat in 0..f.data.len() {
        let mut rem = flat;
        for (i, s) in strides.iter().enumerate() {
            idx[i] = rem / s;
            rem %= s;
        }
        let mut of = 0usize;
        let mut oi = 0usize;
        for (i, _) in f.vars.iter().enumerate() {
            if i == pos {
                continue;
            }
            of += idx[i] * out_strides[oi];
            oi += 1;
        }
        data[of] += f.data[flat];
    }
    Factor { vars, data }
}

fn eliminate(factors: &mut Vec<Factor>, v: VarId, n: usize) -> Result<(), GridError> {
    let mut involved: Vec<Factor> = Vec::new();
    let mut rest: Vec<Factor> = Vec::new();
    for f in factors.drain(..) {
        if f.vars.contains(&v) {
            involved.push(f);
        } else {
            rest.push(f);
        }
    }
    if involved.is_empty() {
        // Free variable: summing over it contributes a factor N (a global
        // scalar; keep it implicit).
        *factors = rest;
        return Ok(());
    }
    let mut acc = involved.remove(0);
    for f in involved {
        acc = multiply(&acc, &f, n)?;
    }
    rest.push(sum_out(acc, v, n));
    *factors = rest;
    Ok(())
}

fn expand_boundary(
    acc: Factor,
    boundary: &[VarId],
    n: usize,
    legs: usize,
) -> Result<GridTensor, GridError> {
    let size = n
        .checked_pow(legs as u32)
        .filter(|s| *s <= MAX_ENTRIES)
        .ok_or_else(|| GridError::TooLarge(format!("{legs} boundary legs")))?;
    let mut data = vec![Complex64::new(0.0, 0.0); size];
    let mut strides = vec![0usize; acc.vars.len()];
    let mut s = 1usize;
    for i in (0..acc.vars.len()).rev() {
        strides[i] = s;
        s *= n;
    }
    let mut idx = vec![0usize; legs];
    for (flat, slot) in data.iter_mut().enumerate() {
        let mut rem = flat;
        for (i, v) in idx.iter_mut().enumerate() {
            let stride = n.pow((legs - 1 - i) as u32);
            *v = rem / stride;
            rem %= stride;
        }
        // Legs sharing one variable carry a delta pattern: all must agree.
        let mut ok = true;
        let mut assign: BTreeMap<VarId, usize> = BTreeMap::new();
        for (leg, var) in boundary.iter().enumerate() {
            match assign.get(var) {
                Some(prev) if *prev != idx[leg] => {
                    ok = false;
                    break;
                }
                _ => {
                    assign.insert(*var, idx[leg]);
                }
            }
        }
        if !ok {
            continue;
        }
        // Every variable of acc is a boundary root, so it is assigned.
        let mut ia = 0usize;
        for (i, v) in acc.vars.iter().enumerate() {
            ia += assign[v] * strides[i];
        }
        *slot = acc.data[ia];
    }
    Ok(GridTensor { points: n, legs, data })
}
