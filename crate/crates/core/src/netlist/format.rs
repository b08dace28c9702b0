//! JSON interchange.
//!
//! Wire ids in the document follow a fixed convention: input bus bits
//! occupy ids `0..` in declaration order, output bus bits take the next
//! block, and internal wires use any ids after that. Export renumbers
//! wires to match; import reconstructs the buses from the widths alone.
//!
//! Because every output bit must own a dedicated id, an output fed
//! straight from an input bit (or sharing a driver with another output
//! bit) is split off through an `AND(w, w)` buffer at export. Round
//! trips therefore preserve behavior, not gate counts.

use super::{Bus, Gate, GateId, GateKind, Netlist, NetlistError, Register, WireId};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("invalid netlist JSON: {0}")]
    Json(String),
    #[error("gate {id} has unknown kind \"{kind}\"")]
    UnknownGateKind { id: u32, kind: String },
    #[error("gate {id} has {got} input(s); gates take 1 or 2")]
    GateInputCount { id: u32, got: usize },
    #[error(transparent)]
    Structure(#[from] NetlistError),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Doc {
    name: String,
    inputs: Vec<PortDoc>,
    outputs: Vec<PortDoc>,
    gates: Vec<GateDoc>,
    #[serde(default)]
    registers: Vec<RegisterDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PortDoc {
    name: String,
    width: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateDoc {
    id: u32,
    kind: String,
    #[serde(rename = "in")]
    input: Vec<u32>,
    out: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegisterDoc {
    #[serde(rename = "in")]
    input: u32,
    out: u32,
    stage: u32,
}

/// Serializes a netlist to pretty-printed interchange JSON.
pub fn to_json(nl: &Netlist) -> String {
    let mut gates = nl.gates().to_vec();
    let mut outputs = nl.outputs().to_vec();
    let mut next_id = gates.iter().map(|g| g.id.0 + 1).max().unwrap_or(0);
    let mut next_wire = nl.wire_count();

    // Give every output bit its own driver distinct from the input bits.
    let input_bits: HashSet<WireId> =
        nl.inputs().iter().flat_map(|b| b.wires.iter().copied()).collect();
    let mut taken: HashSet<WireId> = HashSet::new();
    for bus in &mut outputs {
        for w in &mut bus.wires {
            if input_bits.contains(w) || !taken.insert(*w) {
                let fresh = next_wire;
                next_wire += 1;
                gates.push(Gate {
                    id: GateId(next_id),
                    kind: GateKind::And,
                    a: *w,
                    b: Some(*w),
                    out: fresh,
                });
                next_id += 1;
                taken.insert(fresh);
                *w = fresh;
            }
        }
    }

    // Canonical numbering: inputs, then outputs, then internals in order
    // of first appearance.
    let mut map: HashMap<WireId, u32> = HashMap::new();
    let mut next = 0u32;
    let mut id_of = move |w: WireId, map: &mut HashMap<WireId, u32>| -> u32 {
        *map.entry(w).or_insert_with(|| {
            let v = next;
            next += 1;
            v
        })
    };
    for bus in nl.inputs() {
        for &w in &bus.wires {
            id_of(w, &mut map);
        }
    }
    for bus in &outputs {
        for &w in &bus.wires {
            id_of(w, &mut map);
        }
    }
    let gate_docs: Vec<GateDoc> = gates
        .iter()
        .map(|g| GateDoc {
            id: g.id.0,
            kind: g.kind.name().to_string(),
            input: g.inputs().map(|w| id_of(w, &mut map)).collect(),
            out: id_of(g.out, &mut map),
        })
        .collect();
    let register_docs: Vec<RegisterDoc> = nl
        .registers()
        .iter()
        .map(|r| RegisterDoc {
            input: id_of(r.input, &mut map),
            out: id_of(r.output, &mut map),
            stage: r.stage,
        })
        .collect();

    let doc = Doc {
        name: nl.name().to_string(),
        inputs: nl
            .inputs()
            .iter()
            .map(|b| PortDoc { name: b.name.clone(), width: b.width() as u32 })
            .collect(),
        outputs: outputs
            .iter()
            .map(|b| PortDoc { name: b.name.clone(), width: b.width() as u32 })
            .collect(),
        gates: gate_docs,
        registers: register_docs,
    };
    serde_json::to_string_pretty(&doc).expect("netlist document serializes")
}

/// Parses interchange JSON and validates the result.
pub fn from_json(text: &str) -> Result<Netlist, FormatError> {
    let doc: Doc = serde_json::from_str(text).map_err(|e| FormatError::Json(e.to_string()))?;

    let mut next = 0u32;
    let mut make_buses = |ports: &[PortDoc]| -> Vec<Bus> {
        ports
            .iter()
            .map(|p| Bus {
                name: p.name.clone(),
                wires: (0..p.width)
                    .map(|_| {
                        let w = next;
                        next += 1;
                        w
                    })
                    .collect(),
            })
            .collect()
    };
    let inputs = make_buses(&doc.inputs);
    let outputs = make_buses(&doc.outputs);

    let mut gates = Vec::with_capacity(doc.gates.len());
    for g in &doc.gates {
        let kind = GateKind::from_name(&g.kind)
            .ok_or_else(|| FormatError::UnknownGateKind { id: g.id, kind: g.kind.clone() })?;
        let (a, b) = match g.input.as_slice() {
            [a] => (*a, None),
            [a, b] => (*a, Some(*b)),
            other => return Err(FormatError::GateInputCount { id: g.id, got: other.len() }),
        };
        gates.push(Gate { id: GateId(g.id), kind, a, b, out: g.out });
    }
    let registers: Vec<Register> = doc
        .registers
        .iter()
        .map(|r| Register { input: r.input, output: r.out, stage: r.stage })
        .collect();

    let referenced = gates
        .iter()
        .flat_map(|g| g.inputs().chain(std::iter::once(g.out)))
        .chain(registers.iter().flat_map(|r| [r.input, r.output]));
    let wire_count = referenced.map(|w| w + 1).max().unwrap_or(0).max(next);
    let stage_count = registers.iter().map(|r| r.stage + 1).max().unwrap_or(0);

    let nl = Netlist::from_parts(
        doc.name,
        wire_count,
        inputs,
        outputs,
        gates,
        registers,
        stage_count,
        None,
    );
    nl.ensure_valid()?;
    Ok(nl)
}
