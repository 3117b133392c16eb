//! Exact symplectic-affine semantics for Gaussian diagrams.
//!
//! Every edge end carries a pair of phase-space variables for the array the
//! node exposes on that leg. Node kinds impose linear constraints between
//! their legs, internal wires tie the two ends together (with the momentum
//! sign flip of the bilinear pairing), and boundary rows are read off by
//! eliminating everything else.
//!
//! Two views are offered: [`interp_symplectic`] demands the diagram be the
//! graph of an affine map (unitary Gaussian) and returns `S, t`;
//! [`boundary_relation`] returns the canonical affine relation between the
//! boundary quadratures, defined for states, effects, and projections too.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::diagram::{Diagram, NodeKind};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum SymplecticError {
    #[error("diagram is not unitary-Gaussian: {0}")]
    NotGaussian(String),
    #[error("gate boxes must expand before interpretation: {0}")]
    Expansion(String),
}

/// A 2n x 2n symplectic matrix with a 2n displacement, variable order
/// `(q1, p1, ..., qn, pn)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticAffine {
    pub modes: usize,
    pub matrix: Vec<Vec<Scalar>>,
    pub displacement: Vec<Scalar>,
}

impl SymplecticAffine {
    pub fn identity(modes: usize) -> Self {
        let dim = 2 * modes;
        let mut matrix = vec![vec![Scalar::zero(); dim]; dim];
        for (i, row) in matrix.iter_mut().enumerate() {
            row[i] = Scalar::one();
        }
        SymplecticAffine { modes, matrix, displacement: vec![Scalar::zero(); dim] }
    }

    /// `self . earlier`: matrix product plus displacement transport.
    pub fn compose(&self, earlier: &SymplecticAffine) -> SymplecticAffine {
        assert_eq!(self.modes, earlier.modes);
        let dim = 2 * self.modes;
        let mut matrix = vec![vec![Scalar::zero(); dim]; dim];
        let mut displacement = self.displacement.clone();
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = Scalar::zero();
                for (k, earlier_row) in earlier.matrix.iter().enumerate() {
                    acc = acc.add(&self.matrix[i][k].mul(&earlier_row[j]));
                }
                matrix[i][j] = acc;
            }
            for (k, t) in earlier.displacement.iter().enumerate() {
                displacement[i] = displacement[i].add(&self.matrix[i][k].mul(t));
            }
        }
        SymplecticAffine { modes: self.modes, matrix, displacement }
    }

    /// Checks `S^T Omega S = Omega` with the per-mode block form of Omega.
    pub fn is_symplectic(&self) -> bool {
        let dim = 2 * self.modes;
        let omega = |i: usize, j: usize| -> i64 {
            if i / 2 != j / 2 {
                0
            } else if i % 2 == 0 && j % 2 == 1 {
                1
            } else if i % 2 == 1 && j % 2 == 0 {
                -1
            } else {
                0
            }
        };
        for a in 0..dim {
            for b in 0..dim {
                let mut acc = Scalar::zero();
                for i in 0..dim {
                    for j in 0..dim {
                        let w = omega(i, j);
                        if w == 0 {
                            continue;
                        }
                        let term = self.matrix[i][a].mul(&self.matrix[j][b]);
                        acc = if w > 0 { acc.add(&term) } else { acc.sub(&term) };
                    }
                }
                if acc != Scalar::int(omega(a, b)) {
                    return false;
                }
            }
        }
        true
    }
}

/// Canonical affine relation between boundary quadratures: reduced rows
/// over the columns `(q_in1, p_in1, ..., q_out1, p_out1, ..., 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryRelation {
    pub columns: usize,
    pub rows: Vec<Vec<Scalar>>,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Var {
    /// Array-space position/momentum at an edge end (`bool`: source end).
    Q(u32, bool),
    P(u32, bool),
    /// Physical boundary quadratures, indexed into ins-then-outs order.
    Bq(u32),
    Bp(u32),
}

#[derive(Debug)]
struct Row {
    coeffs: BTreeMap<Var, Scalar>,
    constant: Scalar,
}

impl Row {
    fn new() -> Self {
        Row { coeffs: BTreeMap::new(), constant: Scalar::zero() }
    }

    fn add_term(&mut self, v: Var, c: Scalar) {
        let entry = self.coeffs.entry(v).or_insert_with(Scalar::zero);
        *entry = entry.add(&c);
        if entry.is_zero() {
            self.coeffs.remove(&v);
        }
    }
}

struct System {
    rows: Vec<Row>,
}

impl System {
    fn tie(&mut self, a: Var, b: Var, sign: i64) {
        let mut r = Row::new();
        r.add_term(a, Scalar::one());
        r.add_term(b, Scalar::int(-sign));
        self.rows.push(r);
    }
}

/// Builds the constraint system with explicit physical boundary variables
/// `Bq(i), Bp(i)`, ins first then outs.
fn build_system(d: &Diagram) -> Result<(System, usize, usize), SymplecticError> {
    let mut sys = System { rows: Vec::new() };

    // Ties across every edge that has two node-free... across every edge:
    // same position, opposite momentum between the two end arrays.
    for (eid, _) in d.edges() {
        sys.tie(Var::Q(eid.0, true), Var::Q(eid.0, false), 1);
        sys.tie(Var::P(eid.0, true), Var::P(eid.0, false), -1);
    }

    for (n, kind) in d.nodes() {
        let legs: Vec<(u32, bool, u8)> = d
            .ends_at(n)
            .into_iter()
            .map(|(eid, is_src, port)| (eid.0, is_src, port))
            .collect();
        match kind {
            NodeKind::QSpider(f) | NodeKind::PSpider(f) => {
                if f.degree().unwrap_or(0) > 2 {
                    return Err(SymplecticError::NotGaussian(format!(
                        "spider {n} carries phase of degree > 2"
                    )));
                }
                let c1 = f.coeff(1);
                let c2 = f.coeff(2);
                let is_q = matches!(kind, NodeKind::QSpider(_));
                if legs.is_empty() {
                    continue;
                }
                let (e0, out0, _) = legs[0];
                let diag0 = if is_q { Var::Q(e0, out0) } else { Var::P(e0, out0) };
                let sign0: i64 = if is_q || out0 { 1 } else { -1 };
                for &(e, out, _) in &legs[1..] {
                    let diag = if is_q { Var::Q(e, out) } else { Var::P(e, out) };
                    let sign: i64 = if is_q || out { 1 } else { -1 };
                    let mut r = Row::new();
                    r.add_term(diag, Scalar::int(sign));
                    r.add_term(diag0, Scalar::int(-sign0));
                    sys.rows.push(r);
                }
                // q-spider: sum_legs p = f'(Q); p-spider: sum_legs
                // orientation * q = f'(T) with T the signed diagonal.
                let mut r = Row::new();
                for &(e, out, _) in &legs {
                    if is_q {
                        r.add_term(Var::P(e, out), Scalar::one());
                    } else {
                        r.add_term(Var::Q(e, out), Scalar::int(if out { 1 } else { -1 }));
                    }
                }
                r.add_term(diag0, c2.mul(&Scalar::int(-2 * sign0)));
                r.constant = c1.neg();
                sys.rows.push(r);
            }
            NodeKind::Fourier | NodeKind::FourierDag => {
                let leg = |p: u8| {
                    legs.iter().find(|(_, _, port)| *port == p).copied().ok_or_else(|| {
                        SymplecticError::NotGaussian(format!("Fourier node {n} missing port {p}"))
                    })
                };
                let (ea, outa, _) = leg(0)?;
                let (eb, outb, _) = leg(1)?;
                let ob: i64 = if outb { 1 } else { -1 };
                let conj: i64 = if matches!(kind, NodeKind::FourierDag) { -1 } else { 1 };
                let mut r = Row::new();
                r.add_term(Var::P(eb, outb), Scalar::one());
                r.add_term(Var::Q(ea, outa), Scalar::int(-conj * ob));
                sys.rows.push(r);
                let mut r = Row::new();
                r.add_term(Var::P(ea, outa), Scalar::one());
                r.add_term(Var::Q(eb, outb), Scalar::int(-conj * ob));
                sys.rows.push(r);
            }
            NodeKind::FourierSq => {
                let leg = |p: u8| {
                    legs.iter().find(|(_, _, port)| *port == p).copied().ok_or_else(|| {
                        SymplecticError::NotGaussian(format!("Fourier node {n} missing port {p}"))
                    })
                };
                let (ea, outa, _) = leg(0)?;
                let (eb, outb, _) = leg(1)?;
                let mut r = Row::new();
                r.add_term(Var::Q(ea, outa), Scalar::one());
                r.add_term(Var::Q(eb, outb), Scalar::one());
                sys.rows.push(r);
                sys.tie(Var::P(ea, outa), Var::P(eb, outb), 1);
            }
            NodeKind::Gate(g) => {
                return Err(SymplecticError::Expansion(format!(
                    "unexpanded gate {} in interpretation",
                    g.name()
                )))
            }
        }
    }

    // Boundary definitions: q_in = q_slot, p_in = -p_slot; outputs read the
    // slot arrays directly.
    let n_in = d.num_inputs();
    let n_out = d.num_outputs();
    for k in 0..(n_in + n_out) {
        let (b, is_input) = if k < n_in {
            (d.input_bound(k).unwrap(), true)
        } else {
            (d.output_bound(k - n_in).unwrap(), false)
        };
        let (eid, bound_is_src) = d
            .boundary_edge(b)
            .ok_or_else(|| SymplecticError::NotGaussian("dangling boundary".into()))?;
        let node_end_is_src = !bound_is_src;
        let mut r = Row::new();
        r.add_term(Var::Bq(k as u32), Scalar::one());
        r.add_term(Var::Q(eid.0, node_end_is_src), Scalar::int(-1));
        sys.rows.push(r);
        let mut r = Row::new();
        r.add_term(Var::Bp(k as u32), Scalar::one());
        let sgn = if is_input { 1 } else { -1 };
        r.add_term(Var::P(eid.0, node_end_is_src), Scalar::int(sgn));
        sys.rows.push(r);
    }
    Ok((sys, n_in, n_out))
}

/// Eliminates edge variables and returns the reduced relation rows over the
/// boundary columns plus a trailing constant column.
pub fn boundary_relation(d: &Diagram) -> Result<BoundaryRelation, SymplecticError> {
    let d = d
        .expand_gates()
        .map_err(|e| SymplecticError::Expansion(e.to_string()))?;
    let (sys, n_in, n_out) = build_system(&d)?;
    let nb = n_in + n_out;

    // Column order: edge variables first (eliminated), boundary variables
    // last in a fixed order, then the constant.
    let mut edge_vars: Vec<Var> = Vec::new();
    for row in &sys.rows {
        for v in row.coeffs.keys() {
            if matches!(v, Var::Q(..) | Var::P(..)) && !edge_vars.contains(v) {
                edge_vars.push(*v);
            }
        }
    }
    edge_vars.sort();
    let mut columns: Vec<Var> = edge_vars.clone();
    for k in 0..nb {
        columns.push(Var::Bq(k as u32));
        columns.push(Var::Bp(k as u32));
    }
    let idx: BTreeMap<Var, usize> = columns.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let ncols = columns.len();
    let mut mat: Vec<Vec<Scalar>> = sys
        .rows
        .iter()
        .map(|r| {
            let mut row = vec![Scalar::zero(); ncols + 1];
            for (v, c) in &r.coeffs {
                row[idx[v]] = c.clone();
            }
            row[ncols] = r.constant.clone();
            row
        })
        .collect();

    // Full Gauss-Jordan in column order: edge variables get eliminated
    // first, then boundary columns are reduced, which leaves the canonical
    // relation in the pivot-free structure of the remaining rows.
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; ncols];
    let mut used = vec![false; mat.len()];
    for col in 0..ncols {
        let Some(r) = (0..mat.len()).find(|&r| !used[r] && mat[r][col].is_nonzero()) else {
            continue;
        };
        used[r] = true;
        pivot_of_col[col] = Some(r);
        let pivot = mat[r][col].clone();
        for c in 0..=ncols {
            mat[r][c] = mat[r][c].div(&pivot).unwrap();
        }
        for rr in 0..mat.len() {
            if rr != r && mat[rr][col].is_nonzero() {
                let factor = mat[rr][col].clone();
                for c in 0..=ncols {
                    let delta = factor.mul(&mat[r][c]);
                    mat[rr][c] = mat[rr][c].sub(&delta);
                }
            }
        }
    }

    // Inconsistent system (a row 0 = c with c != 0) means the diagram pins
    // incompatible values; surface it as a degenerate relation.
    for (r, row) in mat.iter().enumerate() {
        if !used[r] && row[ncols].is_nonzero() {
            return Err(SymplecticError::NotGaussian(
                "inconsistent boundary constraints".into(),
            ));
        }
    }

    // The relation rows are the pivot rows whose pivot column is a boundary
    // variable; edge-pivot rows define internal variables and may still
    // reference boundary columns, but those describe interior values, not
    // constraints between boundary quadratures.
    let n_edge = edge_vars.len();
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for pivot in pivot_of_col.iter().skip(n_edge) {
        if let Some(r) = *pivot {
            // Guard: a boundary-pivot row must not reference unresolved
            // edge variables (it cannot after full elimination unless an
            // edge column never had a pivot; check and reject those).
            let row = &mat[r];
            let clean = row[..n_edge]
                .iter()
                .enumerate()
                .all(|(c, v)| !v.is_nonzero() || pivot_of_col[c].is_some());
            if !clean {
                return Err(SymplecticError::NotGaussian(
                    "relation depends on a free internal variable".into(),
                ));
            }
            rows.push(row[n_edge..].to_vec());
        }
    }
    // Rows with any unresolved edge coefficient would relate boundary to
    // interior freedom; drop pure-zero rows and sort for canonicity.
    let mut cleaned: Vec<Vec<Scalar>> = rows
        .into_iter()
        .filter(|r| r.iter().any(|c| c.is_nonzero()))
        .collect();
    cleaned.sort_by_key(|r| {
        r.iter()
            .position(|c| c.is_nonzero())
            .unwrap_or(usize::MAX)
    });
    Ok(BoundaryRelation { columns: 2 * nb, rows: cleaned })
}

/// Interprets a unitary-Gaussian diagram as `x_out = S x_in + t`, exactly in
/// rational mode.
pub fn interp_symplectic(d: &Diagram) -> Result<SymplecticAffine, SymplecticError> {
    let n_in = d.num_inputs();
    let n_out = d.num_outputs();
    if n_in != n_out {
        return Err(SymplecticError::NotGaussian(format!(
            "map requires equal arities, got {n_out} <- {n_in}"
        )));
    }
    let rel = boundary_relation(d)?;
    let modes = n_in;
    let dim = 2 * modes;
    // Columns: ins at 0..dim, outs at dim..2dim, constant last.
    let mut matrix = vec![vec![Scalar::zero(); dim]; dim];
    let mut displacement = vec![Scalar::zero(); dim];
    let mut seen = vec![false; dim];
    if rel.rows.len() != dim {
        return Err(SymplecticError::NotGaussian(format!(
            "boundary relation has {} rows, expected {dim}",
            rel.rows.len()
        )));
    }
    for row in &rel.rows {
        // Expect: an output-pivot row: out_var + sum c_j in_j + const = 0.
        let Some(pivot_col) = row.iter().position(|c| c.is_nonzero()) else {
            continue;
        };
        if pivot_col < dim {
            return Err(SymplecticError::NotGaussian(
                "relation constrains the inputs (post-selected diagram)".into(),
            ));
        }
        let out_idx = pivot_col - dim;
        if !row[pivot_col].is_one() {
            return Err(SymplecticError::NotGaussian("non-normalized pivot".into()));
        }
        if row[pivot_col + 1..dim * 2].iter().any(|c| c.is_nonzero()) {
            return Err(SymplecticError::NotGaussian(
                "outputs are mutually constrained".into(),
            ));
        }
        for j in 0..dim {
            matrix[out_idx][j] = row[j].neg();
        }
        displacement[out_idx] = row[dim * 2].neg();
        seen[out_idx] = true;
    }
    if !seen.iter().all(|s| *s) {
        return Err(SymplecticError::NotGaussian(
            "some outputs are undetermined".into(),
        ));
    }
    Ok(SymplecticAffine { modes, matrix, displacement })
}
