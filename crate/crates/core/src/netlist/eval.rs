//! Bit-accurate simulation, combinational and cycle-by-cycle.

use super::{Netlist, NetlistError};
use crate::bits::BitVec;
use std::collections::BTreeMap;

/// Reusable combinational simulator. Holds the topological order and the
/// wire value buffer so sweeps over many input pairs do not reallocate.
pub struct Evaluator<'n> {
    nl: &'n Netlist,
    order: Vec<u32>,
    values: Vec<bool>,
}

impl<'n> Evaluator<'n> {
    /// Fails if the netlist is invalid or contains registers.
    pub fn new(nl: &'n Netlist) -> Result<Self, NetlistError> {
        nl.ensure_valid()?;
        if !nl.is_combinational() {
            return Err(NetlistError::NotCombinational(nl.stage_count()));
        }
        let order = nl.gate_topo_order().expect("valid netlist is acyclic");
        Ok(Evaluator { nl, order, values: vec![false; nl.wire_count() as usize] })
    }

    pub fn netlist(&self) -> &'n Netlist {
        self.nl
    }

    /// Drives one input bus. `bus` indexes `netlist().inputs()`.
    pub fn set_input(&mut self, bus: usize, value: &BitVec) {
        let wires = &self.nl.inputs()[bus].wires;
        debug_assert_eq!(wires.len(), value.width());
        for (i, &w) in wires.iter().enumerate() {
            self.values[w as usize] = value.get(i);
        }
    }

    /// Propagates every gate once, in topological order.
    pub fn run(&mut self) {
        for &gi in &self.order {
            let g = &self.nl.gates()[gi as usize];
            let a = self.values[g.a as usize];
            let b = g.b.map(|w| self.values[w as usize]).unwrap_or(false);
            self.values[g.out as usize] = g.kind.apply(a, b);
        }
    }

    /// Reads one output bus. `bus` indexes `netlist().outputs()`.
    pub fn output(&self, bus: usize) -> BitVec {
        let wires = &self.nl.outputs()[bus].wires;
        BitVec::from_bits(wires.iter().map(|&w| self.values[w as usize]).collect())
    }
}

fn check_assignment(nl: &Netlist, inputs: &BTreeMap<String, BitVec>) -> Result<(), NetlistError> {
    for name in inputs.keys() {
        if nl.input_bus(name).is_none() {
            return Err(NetlistError::UnknownInput(name.clone()));
        }
    }
    for bus in nl.inputs() {
        match inputs.get(&bus.name) {
            None => return Err(NetlistError::MissingInput(bus.name.clone())),
            Some(v) if v.width() != bus.width() => {
                return Err(NetlistError::WidthMismatch {
                    name: bus.name.clone(),
                    expected: bus.width(),
                    got: v.width(),
                })
            }
            Some(_) => {}
        }
    }
    Ok(())
}

/// Evaluates a combinational netlist on one full input assignment.
pub fn evaluate(
    nl: &Netlist,
    inputs: &BTreeMap<String, BitVec>,
) -> Result<BTreeMap<String, BitVec>, NetlistError> {
    check_assignment(nl, inputs)?;
    let mut ev = Evaluator::new(nl)?;
    for (i, bus) in nl.inputs().iter().enumerate() {
        ev.set_input(i, &inputs[&bus.name]);
    }
    ev.run();
    Ok(nl
        .outputs()
        .iter()
        .enumerate()
        .map(|(i, bus)| (bus.name.clone(), ev.output(i)))
        .collect())
}

/// Result of streaming inputs through a pipelined netlist.
pub struct PipelineRun {
    /// Cycles before the first output is valid; equals the register rank count.
    pub latency: u32,
    /// One assignment per streamed input, already shifted by `latency`:
    /// `outputs[i]` is the result for `stream[i]`.
    pub outputs: Vec<BTreeMap<String, BitVec>>,
}

/// Clocks an input stream through a pipelined netlist, one assignment per
/// cycle, then flushes with zeros until every result has drained.
///
/// All registers latch simultaneously at the end of each cycle, so a rank
/// adds exactly one cycle of delay and the pipeline accepts a new input
/// every cycle.
pub fn simulate_pipelined(
    nl: &Netlist,
    stream: &[BTreeMap<String, BitVec>],
) -> Result<PipelineRun, NetlistError> {
    nl.ensure_valid()?;
    for inputs in stream {
        check_assignment(nl, inputs)?;
    }
    let order = nl.gate_topo_order().expect("valid netlist is acyclic");
    let latency = nl.stage_count();

    let mut values = vec![false; nl.wire_count() as usize];
    let mut latched = vec![false; nl.registers().len()];
    let total = stream.len() + latency as usize;
    let mut trace: Vec<BTreeMap<String, BitVec>> = Vec::with_capacity(total);

    for t in 0..total {
        for bus in nl.inputs() {
            let value = stream.get(t).map(|a| &a[&bus.name]);
            for (i, &w) in bus.wires.iter().enumerate() {
                values[w as usize] = value.map(|v| v.get(i)).unwrap_or(false);
            }
        }
        for &gi in &order {
            let g = &nl.gates()[gi as usize];
            let a = values[g.a as usize];
            let b = g.b.map(|w| values[w as usize]).unwrap_or(false);
            values[g.out as usize] = g.kind.apply(a, b);
        }
        trace.push(
            nl.outputs()
                .iter()
                .map(|bus| {
                    let bits = bus.wires.iter().map(|&w| values[w as usize]).collect();
                    (bus.name.clone(), BitVec::from_bits(bits))
                })
                .collect(),
        );
        // Two-phase latch: read every register input before writing any
        // output, so back-to-back register chains shift correctly.
        for (r, slot) in nl.registers().iter().zip(latched.iter_mut()) {
            *slot = values[r.input as usize];
        }
        for (r, &v) in nl.registers().iter().zip(latched.iter()) {
            values[r.output as usize] = v;
        }
    }

    trace.drain(..latency as usize);
    Ok(PipelineRun { latency, outputs: trace })
}
