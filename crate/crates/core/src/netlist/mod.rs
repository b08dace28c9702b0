//! Gate-level netlists with optional pipeline registers.
//!
//! A netlist is a directed graph of one/two-input gates over a flat space of
//! wires, together with named input and output buses and a set of pipeline
//! registers. Registers are tagged with a stage index: the registers at
//! stage `k` form the rank separating combinational segment `k` from
//! segment `k + 1`, so a netlist with `stage_count = S` has `S` register
//! ranks, `S + 1` combinational segments, and a simulation latency of `S`
//! cycles from an input to the matching output.
//!
//! Wires are untyped: a wire is driven either by a primary input bit, by
//! exactly one gate, or by exactly one register, and may fan out freely.
//! Bus wires are listed LSB first.

mod builder;
mod cost;
mod eval;
pub mod format;
mod pipeline;
mod timing;
mod validate;

pub use builder::NetlistBuilder;
pub use cost::{cost_report, CostModel, CostReport, UnitCost};
pub use eval::{evaluate, simulate_pipelined, Evaluator, PipelineRun};
pub use pipeline::{flatten, insert_pipeline, CutPolicy};
pub use timing::{critical_path, DelayTable, TimingReport};
pub use validate::{validate, Defect};

use std::fmt;

/// Index into a netlist's wire space.
pub type WireId = u32;

/// Stable gate identifier, preserved across export/import.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(transparent)]
pub struct GateId(pub u32);

impl fmt::Display for GateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum GateKind {
    And,
    Or,
    Xor,
    Not,
    Nand,
    Xnor,
}

impl GateKind {
    pub const ALL: [GateKind; 6] = [
        GateKind::And,
        GateKind::Or,
        GateKind::Xor,
        GateKind::Not,
        GateKind::Nand,
        GateKind::Xnor,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::Not => 1,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Or => "OR",
            GateKind::Xor => "XOR",
            GateKind::Not => "NOT",
            GateKind::Nand => "NAND",
            GateKind::Xnor => "XNOR",
        }
    }

    pub fn from_name(name: &str) -> Option<GateKind> {
        Self::ALL.iter().copied().find(|k| k.name() == name)
    }

    pub fn apply(self, a: bool, b: bool) -> bool {
        match self {
            GateKind::And => a && b,
            GateKind::Or => a || b,
            GateKind::Xor => a ^ b,
            GateKind::Not => !a,
            GateKind::Nand => !(a && b),
            GateKind::Xnor => !(a ^ b),
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct Gate {
    pub id: GateId,
    pub kind: GateKind,
    pub a: WireId,
    /// Second input; `None` for NOT gates.
    pub b: Option<WireId>,
    pub out: WireId,
}

impl Gate {
    pub fn inputs(&self) -> impl Iterator<Item = WireId> + '_ {
        std::iter::once(self.a).chain(self.b)
    }
}

#[derive(Clone, Debug)]
pub struct Register {
    pub input: WireId,
    pub output: WireId,
    /// Rank index: this register sits between combinational segments
    /// `stage` and `stage + 1`.
    pub stage: u32,
}

/// A named bundle of wires, LSB first.
#[derive(Clone, Debug)]
pub struct Bus {
    pub name: String,
    pub wires: Vec<WireId>,
}

impl Bus {
    pub fn width(&self) -> usize {
        self.wires.len()
    }
}

#[derive(Clone, Debug)]
pub struct Netlist {
    name: String,
    wire_count: u32,
    inputs: Vec<Bus>,
    outputs: Vec<Bus>,
    gates: Vec<Gate>,
    registers: Vec<Register>,
    stage_count: u32,
    /// Generator-provided pipeline cut markers: one segment tag per gate.
    /// Transient — not carried through the interchange format.
    stage_tags: Option<Vec<u32>>,
}

impl Netlist {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        name: String,
        wire_count: u32,
        inputs: Vec<Bus>,
        outputs: Vec<Bus>,
        gates: Vec<Gate>,
        registers: Vec<Register>,
        stage_count: u32,
        stage_tags: Option<Vec<u32>>,
    ) -> Self {
        Netlist { name, wire_count, inputs, outputs, gates, registers, stage_count, stage_tags }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn wire_count(&self) -> u32 {
        self.wire_count
    }

    pub fn inputs(&self) -> &[Bus] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Bus] {
        &self.outputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn stage_count(&self) -> u32 {
        self.stage_count
    }

    pub fn is_combinational(&self) -> bool {
        self.stage_count == 0 && self.registers.is_empty()
    }

    pub fn has_stage_markers(&self) -> bool {
        self.stage_tags.is_some()
    }

    pub(crate) fn stage_tags(&self) -> Option<&[u32]> {
        self.stage_tags.as_deref()
    }

    pub fn input_bus(&self, name: &str) -> Option<&Bus> {
        self.inputs.iter().find(|b| b.name == name)
    }

    pub fn output_bus(&self, name: &str) -> Option<&Bus> {
        self.outputs.iter().find(|b| b.name == name)
    }

    /// Validates and errors with the full defect list on failure.
    pub fn ensure_valid(&self) -> Result<(), NetlistError> {
        let defects = validate(self);
        if defects.is_empty() {
            Ok(())
        } else {
            Err(NetlistError::Invalid(defects))
        }
    }

    /// Gate indices in dependency order, register outputs treated as
    /// sources. `Err` carries the indices of gates caught in a cycle.
    pub(crate) fn gate_topo_order(&self) -> Result<Vec<u32>, Vec<u32>> {
        let n = self.gates.len();
        // driver_gate[w] = index of the gate driving wire w, if any.
        let mut driver_gate = vec![u32::MAX; self.wire_count as usize];
        for (i, g) in self.gates.iter().enumerate() {
            if (g.out as usize) < driver_gate.len() {
                driver_gate[g.out as usize] = i as u32;
            }
        }
        let mut indegree = vec![0u32; n];
        let mut consumers: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (i, g) in self.gates.iter().enumerate() {
            for w in g.inputs() {
                if let Some(&d) = driver_gate.get(w as usize) {
                    if d != u32::MAX && d as usize != i {
                        indegree[i] += 1;
                        consumers[d as usize].push(i as u32);
                    } else if d as usize == i {
                        // self-loop
                        indegree[i] += 1;
                        consumers[i].push(i as u32);
                    }
                }
            }
        }
        let mut ready: Vec<u32> = (0..n as u32).filter(|&i| indegree[i as usize] == 0).collect();
        let mut order = Vec::with_capacity(n);
        let mut head = 0;
        while head < ready.len() {
            let i = ready[head];
            head += 1;
            order.push(i);
            for &c in &consumers[i as usize] {
                indegree[c as usize] -= 1;
                if indegree[c as usize] == 0 {
                    ready.push(c);
                }
            }
        }
        if order.len() == n {
            Ok(order)
        } else {
            Err((0..n as u32).filter(|&i| indegree[i as usize] > 0).collect())
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum NetlistError {
    #[error("netlist failed validation:\n{}", format_defects(.0))]
    Invalid(Vec<Defect>),
    #[error("netlist has {0} pipeline stage(s); evaluate applies only to combinational netlists")]
    NotCombinational(u32),
    #[error("no assignment supplied for input bus \"{0}\"")]
    MissingInput(String),
    #[error("assignment names \"{0}\", which is not an input bus")]
    UnknownInput(String),
    #[error("bus \"{name}\" has width {expected} but the assignment has width {got}")]
    WidthMismatch { name: String, expected: usize, got: usize },
    #[error("gate kind {0} has no entry in the delay table")]
    MissingDelay(GateKind),
    #[error("bad delay table: {0}")]
    BadDelayTable(String),
    #[error("delay for gate kind {0} is negative")]
    NegativeDelay(GateKind),
    #[error("stage depth bound must be at least 1")]
    DepthBoundTooSmall,
    #[error("netlist carries no stage markers to cut at")]
    NoMarkers,
    #[error("netlist already contains registers; pipeline insertion needs a combinational netlist")]
    AlreadyPipelined,
    #[error("stage markers are unreachable: gate {0} is tagged for an earlier stage than one of its inputs")]
    MarkerOrder(GateId),
}

fn format_defects(defects: &[Defect]) -> String {
    defects.iter().map(|d| format!("  - {d}")).collect::<Vec<_>>().join("\n")
}
