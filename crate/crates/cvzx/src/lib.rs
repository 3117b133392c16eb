//! A graphical calculus engine for continuous-variable quantum processes.
//!
//! Diagrams are open directed graphs of q/p-spiders, Fourier nodes, and
//! gate boxes. The crate provides rewriting under the calculus rule set
//! with replayable proof traces, reduction of 1-mode Gaussian chains to
//! canonical forms, and three independent semantic oracles (exact
//! symplectic-affine maps, polynomial Heisenberg maps, and a discretized
//! grid tensor) used to validate every transformation.

pub mod diagram;
pub mod dsl;
pub mod export;
pub mod gates;
pub mod iso;
pub mod normalform;
pub mod oracle;
pub mod phase;
pub mod protocols;
pub mod rewrite;
pub mod scalar;

pub use diagram::{BoundaryRef, Diagram, DiagramError, End, GateRef, NodeId, NodeKind};
pub use iso::iso_equal;
pub use phase::PhasePoly;
pub use scalar::Scalar;
