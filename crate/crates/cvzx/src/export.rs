//! JSON and DOT serialization of diagrams, plus the structural hash used by
//! proof traces. All output is deterministically ordered.

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::diagram::{BoundId, Diagram, DiagramError, EdgeId, End, GateRef, NodeId, NodeKind};
use crate::phase::PhasePoly;
use crate::scalar::Scalar;

fn scalar_json(s: &Scalar) -> Value {
    match s {
        Scalar::Exact(_) => Value::String(s.to_string()),
        Scalar::Float(x) => json!(x),
    }
}

fn poly_json(p: &PhasePoly) -> Value {
    Value::Array(p.coeffs().iter().map(scalar_json).collect())
}

fn kind_json(kind: &NodeKind) -> Value {
    match kind {
        NodeKind::QSpider(f) => json!({"kind": "Q", "phase": poly_json(f)}),
        NodeKind::PSpider(f) => json!({"kind": "P", "phase": poly_json(f)}),
        NodeKind::Fourier => json!({"kind": "F"}),
        NodeKind::FourierDag => json!({"kind": "Fdag"}),
        NodeKind::FourierSq => json!({"kind": "Fsq"}),
        NodeKind::Gate(g) => match g {
            GateRef::Displacement { re, im } => {
                json!({"kind": "gate", "gate": "D", "re": scalar_json(re), "im": scalar_json(im)})
            }
            GateRef::Rotation(t) => json!({"kind": "gate", "gate": "R", "param": scalar_json(t)}),
            GateRef::Squeeze(t) => json!({"kind": "gate", "gate": "Sq", "param": scalar_json(t)}),
            GateRef::CSum(t) => json!({"kind": "gate", "gate": "CSUM", "param": scalar_json(t)}),
            GateRef::CZ(t) => json!({"kind": "gate", "gate": "CZ", "param": scalar_json(t)}),
            GateRef::BeamSplitter(t) => {
                json!({"kind": "gate", "gate": "BS", "param": scalar_json(t)})
            }
            GateRef::Cubic(t) => json!({"kind": "gate", "gate": "CPG", "param": scalar_json(t)}),
        },
    }
}

fn end_json(end: &End) -> Value {
    match end {
        End::Node(n, p) => json!({"node": n.0, "port": p}),
        End::Bound(b) => json!({"bound": b.0}),
    }
}

/// IR-mirroring JSON with a versioned schema.
pub fn diagram_to_json(d: &Diagram) -> Value {
    let mut nodes = Map::new();
    for (id, kind) in d.nodes() {
        nodes.insert(id.0.to_string(), kind_json(kind));
    }
    let mut edges = Map::new();
    for (id, e) in d.edges() {
        edges.insert(
            id.0.to_string(),
            json!({"src": end_json(&e.src), "dst": end_json(&e.dst)}),
        );
    }
    json!({
        "schema": 1,
        "nodes": Value::Object(nodes),
        "edges": Value::Object(edges),
        "inputs": d.inputs.iter().map(|b| json!(b.0)).collect::<Vec<_>>(),
        "outputs": d.outputs.iter().map(|b| json!(b.0)).collect::<Vec<_>>(),
        "loops": d.loops(),
    })
}

fn scalar_from_json(v: &Value) -> Result<Scalar, DiagramError> {
    match v {
        Value::String(s) => s
            .parse()
            .map_err(|e: String| DiagramError::Malformed(e)),
        Value::Number(n) => n
            .as_f64()
            .map(Scalar::float)
            .ok_or_else(|| DiagramError::Malformed("bad number".into())),
        _ => Err(DiagramError::Malformed(format!("bad scalar: {v}"))),
    }
}

fn poly_from_json(v: &Value) -> Result<PhasePoly, DiagramError> {
    let arr = v
        .as_array()
        .ok_or_else(|| DiagramError::Malformed("phase must be an array".into()))?;
    let coeffs = arr
        .iter()
        .map(scalar_from_json)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PhasePoly::from_coeffs(coeffs))
}

fn kind_from_json(v: &Value) -> Result<NodeKind, DiagramError> {
    let kind = v
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| DiagramError::Malformed("node missing kind".into()))?;
    let param = |v: &Value| -> Result<Scalar, DiagramError> {
        scalar_from_json(
            v.get("param")
                .ok_or_else(|| DiagramError::Malformed("gate missing param".into()))?,
        )
    };
    Ok(match kind {
        "Q" => NodeKind::QSpider(poly_from_json(v.get("phase").unwrap_or(&json!([])))?),
        "P" => NodeKind::PSpider(poly_from_json(v.get("phase").unwrap_or(&json!([])))?),
        "F" => NodeKind::Fourier,
        "Fdag" => NodeKind::FourierDag,
        "Fsq" => NodeKind::FourierSq,
        "gate" => {
            let g = v.get("gate").and_then(Value::as_str).unwrap_or_default();
            NodeKind::Gate(match g {
                "D" => GateRef::Displacement {
                    re: scalar_from_json(v.get("re").unwrap_or(&json!(0)))?,
                    im: scalar_from_json(v.get("im").unwrap_or(&json!(0)))?,
                },
                "R" => GateRef::Rotation(param(v)?),
                "Sq" => GateRef::Squeeze(param(v)?),
                "CSUM" => GateRef::CSum(param(v)?),
                "CZ" => GateRef::CZ(param(v)?),
                "BS" => GateRef::BeamSplitter(param(v)?),
                "CPG" => GateRef::Cubic(param(v)?),
                other => return Err(DiagramError::Malformed(format!("unknown gate {other}"))),
            })
        }
        other => return Err(DiagramError::Malformed(format!("unknown node kind {other}"))),
    })
}

fn end_from_json(v: &Value) -> Result<End, DiagramError> {
    if let Some(n) = v.get("node") {
        let node = n
            .as_u64()
            .ok_or_else(|| DiagramError::Malformed("bad node id".into()))?;
        let port = v.get("port").and_then(Value::as_u64).unwrap_or(0);
        Ok(End::Node(NodeId(node as u32), port as u8))
    } else if let Some(b) = v.get("bound") {
        let b = b
            .as_u64()
            .ok_or_else(|| DiagramError::Malformed("bad bound id".into()))?;
        Ok(End::Bound(BoundId(b as u32)))
    } else {
        Err(DiagramError::Malformed(format!("bad edge end: {v}")))
    }
}

pub fn diagram_from_json(v: &Value) -> Result<Diagram, DiagramError> {
    let mut d = Diagram::new();
    let nodes = v
        .get("nodes")
        .and_then(Value::as_object)
        .ok_or_else(|| DiagramError::Malformed("missing nodes".into()))?;
    let mut pairs: Vec<(u32, &Value)> = nodes
        .iter()
        .map(|(k, v)| {
            k.parse::<u32>()
                .map(|id| (id, v))
                .map_err(|_| DiagramError::Malformed(format!("bad node id {k}")))
        })
        .collect::<Result<_, _>>()?;
    pairs.sort_by_key(|(id, _)| *id);
    for (id, kv) in pairs {
        d.insert_node_raw(NodeId(id), kind_from_json(kv)?);
    }
    let edges = v
        .get("edges")
        .and_then(Value::as_object)
        .ok_or_else(|| DiagramError::Malformed("missing edges".into()))?;
    let mut epairs: Vec<(u32, &Value)> = edges
        .iter()
        .map(|(k, v)| {
            k.parse::<u32>()
                .map(|id| (id, v))
                .map_err(|_| DiagramError::Malformed(format!("bad edge id {k}")))
        })
        .collect::<Result<_, _>>()?;
    epairs.sort_by_key(|(id, _)| *id);
    for (id, ev) in epairs {
        let src = end_from_json(
            ev.get("src")
                .ok_or_else(|| DiagramError::Malformed("edge missing src".into()))?,
        )?;
        let dst = end_from_json(
            ev.get("dst")
                .ok_or_else(|| DiagramError::Malformed("edge missing dst".into()))?,
        )?;
        d.insert_edge_raw(EdgeId(id), src, dst);
    }
    let bound_list = |key: &str| -> Result<Vec<BoundId>, DiagramError> {
        v.get(key)
            .and_then(Value::as_array)
            .ok_or_else(|| DiagramError::Malformed(format!("missing {key}")))?
            .iter()
            .map(|x| {
                x.as_u64()
                    .map(|b| BoundId(b as u32))
                    .ok_or_else(|| DiagramError::Malformed("bad bound id".into()))
            })
            .collect()
    };
    for b in bound_list("inputs")? {
        d.push_input_raw(b);
    }
    for b in bound_list("outputs")? {
        d.push_output_raw(b);
    }
    for _ in 0..v.get("loops").and_then(Value::as_u64).unwrap_or(0) {
        d.add_loop_scalar();
    }
    d.validate()?;
    Ok(d)
}

/// Structural hash over the canonical JSON form.
pub fn diagram_hash(d: &Diagram) -> String {
    let text = serde_json::to_string(&diagram_to_json(d)).expect("serializable");
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// GraphViz rendering: q-spiders white, p-spiders gray, phase labels on
/// nodes, arrowheads per edge direction.
pub fn diagram_to_dot(d: &Diagram) -> String {
    let mut out = String::from("digraph cvzx {\n  rankdir=RL;\n");
    for (id, kind) in d.nodes() {
        let line = match kind {
            NodeKind::QSpider(f) => format!(
                "  n{} [shape=circle, style=filled, fillcolor=white, label=\"{}\"];\n",
                id.0, f
            ),
            NodeKind::PSpider(f) => format!(
                "  n{} [shape=circle, style=filled, fillcolor=gray, label=\"{}\"];\n",
                id.0, f
            ),
            NodeKind::Fourier => format!("  n{} [shape=box, label=\"F\"];\n", id.0),
            NodeKind::FourierDag => format!("  n{} [shape=box, label=\"F+\"];\n", id.0),
            NodeKind::FourierSq => format!("  n{} [shape=box, label=\"F2\"];\n", id.0),
            NodeKind::Gate(g) => format!("  n{} [shape=box, label=\"{}\"];\n", id.0, g.name()),
        };
        out.push_str(&line);
    }
    for (k, b) in d.inputs.iter().enumerate() {
        out.push_str(&format!("  b{} [shape=plaintext, label=\"in.{}\"];\n", b.0, k));
    }
    for (k, b) in d.outputs.iter().enumerate() {
        out.push_str(&format!("  b{} [shape=plaintext, label=\"out.{}\"];\n", b.0, k));
    }
    let name = |e: &End| match e {
        End::Node(n, _) => format!("n{}", n.0),
        End::Bound(b) => format!("b{}", b.0),
    };
    for (_, e) in d.edges() {
        out.push_str(&format!("  {} -> {};\n", name(&e.src), name(&e.dst)));
    }
    out.push_str("}\n");
    out
}
