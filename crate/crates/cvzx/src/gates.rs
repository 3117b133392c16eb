//! Gate-box construction and expansion into generator diagrams.

use crate::diagram::{Diagram, DiagramError, End, GateRef, NodeKind};
use crate::phase::PhasePoly;
use crate::scalar::{epsilon, Scalar};

impl Diagram {
    /// A single 1-mode gate box with its wires.
    pub fn gate1(g: GateRef) -> Diagram {
        debug_assert_eq!(g.modes(), 1);
        let mut d = Diagram::new();
        let n = d.add_node(NodeKind::Gate(g));
        let i = d.add_input();
        let o = d.add_output();
        d.add_edge(End::Bound(i), End::Node(n, 0));
        d.add_edge(End::Node(n, 1), End::Bound(o));
        d
    }

    /// A single 2-mode gate box with its wires (mode order preserved).
    pub fn gate2(g: GateRef) -> Diagram {
        debug_assert_eq!(g.modes(), 2);
        let mut d = Diagram::new();
        let n = d.add_node(NodeKind::Gate(g));
        for p in 0..2u8 {
            let i = d.add_input();
            d.add_edge(End::Bound(i), End::Node(n, p));
        }
        for p in 2..4u8 {
            let o = d.add_output();
            d.add_edge(End::Node(n, p), End::Bound(o));
        }
        d
    }

    /// 1-to-1 spider on a wire.
    pub fn spider1(kind: NodeKind) -> Diagram {
        let mut d = Diagram::new();
        let n = d.add_node(kind);
        let i = d.add_input();
        let o = d.add_output();
        d.add_edge(End::Bound(i), End::Node(n, 0));
        d.add_edge(End::Node(n, 0), End::Bound(o));
        d
    }

    /// Spider state with `outs` output legs (no inputs).
    pub fn spider_state(kind: NodeKind, outs: usize) -> Diagram {
        let mut d = Diagram::new();
        let n = d.add_node(kind);
        for _ in 0..outs {
            let o = d.add_output();
            d.add_edge(End::Node(n, 0), End::Bound(o));
        }
        d
    }

    /// Spider effect with `ins` input legs (no outputs).
    pub fn spider_effect(kind: NodeKind, ins: usize) -> Diagram {
        let mut d = Diagram::new();
        let n = d.add_node(kind);
        for _ in 0..ins {
            let i = d.add_input();
            d.add_edge(End::Bound(i), End::Node(n, 0));
        }
        d
    }

    /// 1-mode chain composed left to right: `chain([a, b, c])` applies `a`
    /// first. Each element is a 1-in 1-out diagram.
    pub fn chain(stages: &[Diagram]) -> Result<Diagram, DiagramError> {
        let mut acc = Diagram::identity(1);
        for stage in stages {
            acc = stage.compose(&acc)?;
        }
        Ok(acc)
    }

    /// Expands every gate box into its defining generator diagram,
    /// repeating until none remain.
    pub fn expand_gates(&self) -> Result<Diagram, DiagramError> {
        let mut d = self.clone();
        loop {
            let target = d.nodes().find_map(|(id, kind)| match kind {
                NodeKind::Gate(g) => Some((id, g.clone())),
                _ => None,
            });
            let Some((id, gate)) = target else {
                return Ok(d);
            };
            let expansion = gate_expansion(&gate)?;
            d.inline_expansion(id, &expansion);
        }
    }
}

fn q(f: PhasePoly) -> NodeKind {
    NodeKind::QSpider(f)
}

fn p(f: PhasePoly) -> NodeKind {
    NodeKind::PSpider(f)
}

fn quad(c: Scalar) -> PhasePoly {
    PhasePoly::quadratic(c)
}

/// Four-shear expansion of `Sq(tau)`: reading input to output,
/// `Z(x^2) . X((tau-1)/4 x^2) . Z(-x^2/tau) . X(tau(1-tau)/4 x^2)`.
pub fn squeeze_shears(tau: &Scalar) -> Result<Vec<NodeKind>, DiagramError> {
    if tau.is_zero() {
        return Err(DiagramError::ZeroParam("Sq"));
    }
    let one = Scalar::one();
    let quarter = Scalar::ratio(1, 4);
    Ok(vec![
        q(quad(Scalar::one())),
        p(quad(tau.sub(&one).mul(&quarter))),
        q(quad(tau.recip().expect("nonzero").neg())),
        p(quad(tau.mul(&one.sub(tau)).mul(&quarter))),
    ])
}

/// Three-shear expansion of `R(theta)` (valid away from odd multiples of
/// pi): `X(t/2 x^2) . Z(-sin/2 x^2) . X(t/2 x^2)` with `t = tan(theta/2)`.
pub fn rotation_shears(theta: f64) -> Vec<NodeKind> {
    let t = (theta / 2.0).tan();
    let s = theta.sin();
    let shear = p(quad(Scalar::float(t / 2.0)));
    vec![
        shear.clone(),
        q(quad(Scalar::float(-s / 2.0))),
        shear,
    ]
}

fn chain_of(kinds: Vec<NodeKind>) -> Diagram {
    let stages: Vec<Diagram> = kinds.into_iter().map(Diagram::spider1).collect();
    Diagram::chain(&stages).expect("1-mode stages compose")
}

/// True when `theta` is within tolerance of `k * period` for integer `k`.
fn near_multiple(theta: f64, period: f64) -> bool {
    let r = theta.rem_euclid(period);
    r <= epsilon() || (period - r) <= epsilon()
}

/// The unbiased CSUM pair: a blank q-spider on the control mode wired into
/// a blank p-spider on the target mode.
fn csum_core() -> Diagram {
    let mut d = Diagram::new();
    let zc = d.add_node(q(PhasePoly::zero()));
    let xa = d.add_node(p(PhasePoly::zero()));
    let i1 = d.add_input();
    let i2 = d.add_input();
    let o1 = d.add_output();
    let o2 = d.add_output();
    d.add_edge(End::Bound(i1), End::Node(zc, 0));
    d.add_edge(End::Node(zc, 0), End::Bound(o1));
    d.add_edge(End::Bound(i2), End::Node(xa, 0));
    d.add_edge(End::Node(xa, 0), End::Bound(o2));
    d.add_edge(End::Node(zc, 0), End::Node(xa, 0));
    d
}

/// The unbiased CZ: two blank q-spiders joined through a Fourier node.
fn cz_core() -> Diagram {
    let mut d = Diagram::new();
    let z1 = d.add_node(q(PhasePoly::zero()));
    let z2 = d.add_node(q(PhasePoly::zero()));
    let f = d.add_node(NodeKind::Fourier);
    let i1 = d.add_input();
    let i2 = d.add_input();
    let o1 = d.add_output();
    let o2 = d.add_output();
    d.add_edge(End::Bound(i1), End::Node(z1, 0));
    d.add_edge(End::Node(z1, 0), End::Bound(o1));
    d.add_edge(End::Bound(i2), End::Node(z2, 0));
    d.add_edge(End::Node(z2, 0), End::Bound(o2));
    // Mode 2 copies, the Fourier node turns the copy into a momentum kick
    // on mode 1.
    d.add_edge(End::Node(z2, 0), End::Node(f, 0));
    d.add_edge(End::Node(f, 1), End::Node(z1, 0));
    d
}

/// Places a 1-mode stage on one mode of a 2-mode diagram.
fn on_mode(stage: Diagram, mode: usize) -> Diagram {
    match mode {
        0 => stage.parallel(&Diagram::identity(1)),
        1 => Diagram::identity(1).parallel(&stage),
        _ => unreachable!(),
    }
}

fn sq_box(tau: Scalar) -> Diagram {
    Diagram::gate1(GateRef::Squeeze(tau))
}

/// Defining diagram of each gate box (inputs then outputs in mode order).
pub fn gate_expansion(g: &GateRef) -> Result<Diagram, DiagramError> {
    match g {
        GateRef::Displacement { re, im } => {
            let rt2 = Scalar::float(std::f64::consts::SQRT_2);
            Ok(chain_of(vec![
                q(PhasePoly::linear(rt2.mul(im))),
                p(PhasePoly::linear(rt2.mul(re))),
            ]))
        }
        GateRef::Rotation(theta) => {
            let th = theta.to_f64();
            if near_multiple(th - std::f64::consts::PI, 2.0 * std::f64::consts::PI) {
                // A pi rotation is the squared Fourier, defined through
                // Sq(-1).
                Ok(chain_of(squeeze_shears(&Scalar::int(-1))?))
            } else {
                Ok(chain_of(rotation_shears(th)))
            }
        }
        GateRef::Squeeze(tau) => Ok(chain_of(squeeze_shears(tau)?)),
        GateRef::Cubic(gamma) => Ok(Diagram::spider1(q(PhasePoly::monomial(gamma.clone(), 3)))),
        GateRef::CSum(gain) => {
            if gain.is_zero() {
                return Err(DiagramError::ZeroParam("CSUM"));
            }
            if gain.is_one() {
                return Ok(csum_core());
            }
            let pre = on_mode(sq_box(gain.clone()), 0);
            let post = on_mode(sq_box(gain.recip().expect("nonzero")), 0);
            post.compose(&csum_core())?.compose(&pre)
        }
        GateRef::CZ(gain) => {
            if gain.is_zero() {
                return Err(DiagramError::ZeroParam("CZ"));
            }
            if gain.is_one() {
                return Ok(cz_core());
            }
            let pre = on_mode(sq_box(gain.clone()), 0);
            let post = on_mode(sq_box(gain.recip().expect("nonzero")), 0);
            post.compose(&cz_core())?.compose(&pre)
        }
        GateRef::BeamSplitter(theta) => {
            let th = theta.to_f64();
            let (s, c) = th.sin_cos();
            if s.abs() <= epsilon() || c.abs() <= epsilon() {
                return Err(DiagramError::SingularDecomposition(format!(
                    "beamsplitter angle {th} lies on a multiple of pi/2"
                )));
            }
            // Sq1(1/tan) . CS_{1,2} . Sq1(sin^2/cos) . Sq2(1/cos) . CS_{2,1}^dag . Sq1(1/tan)
            let inv_tan = Scalar::float(c / s);
            let mid1 = Scalar::float(s * s / c);
            let mid2 = Scalar::float(1.0 / c);
            let swap_csum = {
                // CS_{2,1}: control on mode 2.
                let mut d = csum_core();
                d.inputs.swap(0, 1);
                d.outputs.swap(0, 1);
                d.bump();
                d
            };
            let cs21_dag = swap_csum.conjugate()?;
            let mut acc = on_mode(sq_box(inv_tan.clone()), 0);
            acc = cs21_dag.compose(&acc)?;
            acc = on_mode(sq_box(mid2), 1).compose(&acc)?;
            acc = on_mode(sq_box(mid1), 0).compose(&acc)?;
            acc = csum_core().compose(&acc)?;
            on_mode(sq_box(inv_tan), 0).compose(&acc)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_expands_to_single_spider() {
        let d = Diagram::gate1(GateRef::Cubic(Scalar::int(2)))
            .expand_gates()
            .unwrap();
        assert_eq!(d.node_count(), 1);
        let (_, kind) = d.nodes().next().unwrap();
        assert_eq!(
            kind,
            &NodeKind::QSpider(PhasePoly::monomial(Scalar::int(2), 3))
        );
        d.validate().unwrap();
    }

    #[test]
    fn squeeze_expands_to_four_shears() {
        let d = Diagram::gate1(GateRef::Squeeze(Scalar::int(5)))
            .expand_gates()
            .unwrap();
        assert_eq!(d.node_count(), 4);
        d.validate().unwrap();
    }

    #[test]
    fn squeeze_zero_rejected() {
        assert!(matches!(
            Diagram::gate1(GateRef::Squeeze(Scalar::zero())).expand_gates(),
            Err(DiagramError::ZeroParam(_))
        ));
    }

    #[test]
    fn beamsplitter_singular_at_half_pi() {
        let d = Diagram::gate2(GateRef::BeamSplitter(Scalar::float(
            std::f64::consts::FRAC_PI_2,
        )));
        assert!(matches!(
            d.expand_gates(),
            Err(DiagramError::SingularDecomposition(_))
        ));
    }

    #[test]
    fn biased_csum_expands() {
        let d = Diagram::gate2(GateRef::CSum(Scalar::int(3)))
            .expand_gates()
            .unwrap();
        d.validate().unwrap();
        assert!(!d.has_gates());
    }

    #[test]
    fn conjugate_is_involution_after_expansion() {
        let d = Diagram::gate2(GateRef::CZ(Scalar::int(2)))
            .expand_gates()
            .unwrap();
        let cc = d.conjugate().unwrap().conjugate().unwrap();
        assert!(crate::iso::iso_equal(&d, &cc));
    }
}
