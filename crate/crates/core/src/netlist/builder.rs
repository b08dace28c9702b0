//! Construction API for netlists.

use super::{Bus, Gate, GateId, GateKind, Netlist, Register, WireId};

/// Builds a combinational netlist wire by wire.
///
/// Gates may be tagged with a pipeline segment via [`set_stage`]; the tags
/// become cut markers that [`crate::netlist::insert_pipeline`] can register
/// along. A finished netlist is combinational (no registers) until a cut
/// pass runs.
///
/// [`set_stage`]: NetlistBuilder::set_stage
pub struct NetlistBuilder {
    name: String,
    wire_count: u32,
    inputs: Vec<Bus>,
    outputs: Vec<Bus>,
    gates: Vec<Gate>,
    tags: Vec<u32>,
    current_stage: u32,
}

impl NetlistBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        NetlistBuilder {
            name: name.into(),
            wire_count: 0,
            inputs: Vec::new(),
            outputs: Vec::new(),
            gates: Vec::new(),
            tags: Vec::new(),
            current_stage: 0,
        }
    }

    pub fn fresh_wire(&mut self) -> WireId {
        let w = self.wire_count;
        self.wire_count += 1;
        w
    }

    /// Declares an input bus and returns its wires, LSB first.
    pub fn input_bus(&mut self, name: impl Into<String>, width: usize) -> Vec<WireId> {
        let wires: Vec<WireId> = (0..width).map(|_| self.fresh_wire()).collect();
        self.inputs.push(Bus { name: name.into(), wires: wires.clone() });
        wires
    }

    /// Declares an output bus over existing wires, LSB first.
    pub fn output_bus(&mut self, name: impl Into<String>, wires: &[WireId]) {
        self.outputs.push(Bus { name: name.into(), wires: wires.to_vec() });
    }

    /// Pipeline segment tag applied to gates emitted from here on.
    pub fn set_stage(&mut self, stage: u32) {
        self.current_stage = stage;
    }

    pub fn current_stage(&self) -> u32 {
        self.current_stage
    }

    pub fn gate(&mut self, kind: GateKind, a: WireId, b: Option<WireId>) -> WireId {
        debug_assert_eq!(b.is_some(), kind.arity() == 2);
        let out = self.fresh_wire();
        let id = GateId(self.gates.len() as u32);
        self.gates.push(Gate { id, kind, a, b, out });
        self.tags.push(self.current_stage);
        out
    }

    pub fn not(&mut self, a: WireId) -> WireId {
        self.gate(GateKind::Not, a, None)
    }

    pub fn and(&mut self, a: WireId, b: WireId) -> WireId {
        self.gate(GateKind::And, a, Some(b))
    }

    pub fn or(&mut self, a: WireId, b: WireId) -> WireId {
        self.gate(GateKind::Or, a, Some(b))
    }

    pub fn xor(&mut self, a: WireId, b: WireId) -> WireId {
        self.gate(GateKind::Xor, a, Some(b))
    }

    pub fn nand(&mut self, a: WireId, b: WireId) -> WireId {
        self.gate(GateKind::Nand, a, Some(b))
    }

    pub fn xnor(&mut self, a: WireId, b: WireId) -> WireId {
        self.gate(GateKind::Xnor, a, Some(b))
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn finish(self) -> Netlist {
        let tags = if self.tags.iter().any(|&t| t > 0) { Some(self.tags) } else { None };
        Netlist::from_parts(
            self.name,
            self.wire_count,
            self.inputs,
            self.outputs,
            self.gates,
            Vec::<Register>::new(),
            0,
            tags,
        )
    }
}
