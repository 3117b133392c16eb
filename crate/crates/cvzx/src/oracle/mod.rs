//! Independent semantic interpreters used to validate rewriting: exact
//! symplectic-affine matrices, polynomial Heisenberg maps, and a
//! discretized-kernel grid tensor.

pub mod grid;
pub mod heisenberg;
pub mod symplectic;

pub use grid::{equal_up_to_scalar, interp_grid, GridError, GridSpec, GridTensor};
pub use heisenberg::{check_poisson, interp_heisenberg, HeisenbergError, MPoly, PolyMap};
pub use symplectic::{
    boundary_relation, interp_symplectic, BoundaryRelation, SymplecticAffine, SymplecticError,
};

use crate::diagram::GateRef;
use crate::scalar::Scalar;

/// Reference quadrature transformation of each gate, straight from the gate
/// table: the matrix acting on `(q1, p1, ..., qn, pn)`.
pub fn reference_matrix(g: &GateRef) -> Vec<Vec<f64>> {
    match g {
        GateRef::Displacement { .. } => vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        GateRef::Rotation(theta) => {
            let (s, c) = theta.to_f64().sin_cos();
            vec![vec![c, s], vec![-s, c]]
        }
        GateRef::Squeeze(tau) => {
            let t = tau.to_f64();
            vec![vec![t, 0.0], vec![0.0, 1.0 / t]]
        }
        GateRef::CSum(g) => {
            let g = g.to_f64();
            vec![
                vec![1.0, 0.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0, -g],
                vec![g, 0.0, 1.0, 0.0],
                vec![0.0, 0.0, 0.0, 1.0],
            ]
        }
        GateRef::CZ(g) => {
            let g = g.to_f64();
            vec![
                vec![1.0, 0.0, 0.0, 0.0],
                vec![0.0, 1.0, g, 0.0],
                vec![0.0, 0.0, 1.0, 0.0],
                vec![g, 0.0, 0.0, 1.0],
            ]
        }
        GateRef::BeamSplitter(theta) => {
            let (s, c) = theta.to_f64().sin_cos();
            vec![
                vec![c, 0.0, -s, 0.0],
                vec![0.0, c, 0.0, -s],
                vec![s, 0.0, c, 0.0],
                vec![0.0, s, 0.0, c],
            ]
        }
        GateRef::Cubic(_) => vec![vec![1.0, 0.0], vec![0.0, 1.0]],
    }
}

/// Reference displacement vector of each gate.
pub fn reference_displacement(g: &GateRef) -> Vec<f64> {
    match g {
        GateRef::Displacement { re, im } => {
            let rt2 = std::f64::consts::SQRT_2;
            vec![rt2 * re.to_f64(), rt2 * im.to_f64()]
        }
        GateRef::CSum(_) | GateRef::CZ(_) | GateRef::BeamSplitter(_) => vec![0.0; 4],
        _ => vec![0.0; 2],
    }
}

/// Max absolute entry difference between an exact/float symplectic result
/// and a float reference.
pub fn matrix_deviation(got: &SymplecticAffine, matrix: &[Vec<f64>], displacement: &[f64]) -> f64 {
    let mut dev: f64 = 0.0;
    for (i, row) in got.matrix.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            dev = dev.max((v.to_f64() - matrix[i][j]).abs());
        }
    }
    for (i, v) in got.displacement.iter().enumerate() {
        dev = dev.max((v.to_f64() - displacement[i]).abs());
    }
    dev
}

/// Exact equality against an integer-rational reference matrix.
pub fn matrix_equals_exact(got: &SymplecticAffine, matrix: &[Vec<Scalar>]) -> bool {
    got.matrix.len() == matrix.len()
        && got
            .matrix
            .iter()
            .zip(matrix.iter())
            .all(|(a, b)| a.iter().zip(b.iter()).all(|(x, y)| x == y))
}
