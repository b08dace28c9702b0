//! Structural well-formedness checks.

use super::{GateId, GateKind, Netlist, WireId};
use std::collections::BTreeSet;
use std::fmt;

/// A single structural problem found by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Defect {
    EmptyBus { name: String },
    DuplicateBusName { name: String },
    WireOutOfRange { wire: WireId, context: String },
    DuplicateGateId { id: GateId },
    BadArity { gate: GateId, kind: GateKind, got: usize },
    MultiplyDriven { wire: WireId, drivers: Vec<String> },
    Undriven { wire: WireId, context: String },
    CombinationalCycle { stage: u32, gates: Vec<GateId> },
    StageCountMismatch { declared: u32, implied: u32 },
    RegisterStageMismatch { index: usize, expected: u32, declared: u32 },
    UnbalancedGate { gate: GateId, earliest: u32, latest: u32 },
    OutputNotFinal { bus: String, bit: usize, stage: u32, expected: u32 },
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Defect::EmptyBus { name } => write!(f, "bus \"{name}\" has width 0"),
            Defect::DuplicateBusName { name } => write!(f, "bus name \"{name}\" is used more than once"),
            Defect::WireOutOfRange { wire, context } => {
                write!(f, "wire {wire} ({context}) is outside the wire space")
            }
            Defect::DuplicateGateId { id } => write!(f, "gate id {id} is used more than once"),
            Defect::BadArity { gate, kind, got } => {
                write!(f, "gate {gate} is a {kind} but has {got} input(s)")
            }
            Defect::MultiplyDriven { wire, drivers } => {
                write!(f, "wire {wire} is driven more than once ({})", drivers.join(", "))
            }
            Defect::Undriven { wire, context } => {
                write!(f, "wire {wire} ({context}) has no driver")
            }
            Defect::CombinationalCycle { stage, gates } => {
                let names: Vec<String> = gates.iter().map(|g| g.to_string()).collect();
                write!(f, "combinational cycle in stage {stage} through {}", names.join(", "))
            }
            Defect::StageCountMismatch { declared, implied } => {
                write!(f, "stage_count is {declared} but the registers imply {implied}")
            }
            Defect::RegisterStageMismatch { index, expected, declared } => {
                write!(
                    f,
                    "register {index} latches a stage-{expected} wire but is tagged stage {declared}"
                )
            }
            Defect::UnbalancedGate { gate, earliest, latest } => {
                write!(
                    f,
                    "gate {gate} mixes wires from stages {earliest} and {latest}; every path must cross the same register ranks"
                )
            }
            Defect::OutputNotFinal { bus, bit, stage, expected } => {
                write!(
                    f,
                    "output {bus}[{bit}] settles in stage {stage}, not the final stage {expected}"
                )
            }
        }
    }
}

/// Checks the netlist invariants and returns every defect found (empty
/// means valid).
///
/// Beyond single drivers and per-stage acyclicity this also demands
/// *balanced* staging: every input-to-output path crosses each register
/// rank exactly once, which is what gives pipelined simulation its fixed
/// latency.
pub fn validate(nl: &Netlist) -> Vec<Defect> {
    let mut defects = Vec::new();
    let wire_count = nl.wire_count() as usize;

    // Bus shape.
    let mut seen_names = BTreeSet::new();
    for bus in nl.inputs().iter().chain(nl.outputs()) {
        if bus.wires.is_empty() {
            defects.push(Defect::EmptyBus { name: bus.name.clone() });
        }
        if !seen_names.insert(bus.name.clone()) {
            defects.push(Defect::DuplicateBusName { name: bus.name.clone() });
        }
    }

    // Wire references.
    let mut range_ok = true;
    let check_wire = |w: WireId, context: String, defects: &mut Vec<Defect>| {
        if w as usize >= wire_count {
            defects.push(Defect::WireOutOfRange { wire: w, context });
            false
        } else {
            true
        }
    };
    for bus in nl.inputs().iter().chain(nl.outputs()) {
        for (i, &w) in bus.wires.iter().enumerate() {
            range_ok &= check_wire(w, format!("{}[{}]", bus.name, i), &mut defects);
        }
    }
    for g in nl.gates() {
        range_ok &= check_wire(g.a, format!("input of gate {}", g.id), &mut defects);
        if let Some(b) = g.b {
            range_ok &= check_wire(b, format!("input of gate {}", g.id), &mut defects);
        }
        range_ok &= check_wire(g.out, format!("output of gate {}", g.id), &mut defects);
    }
    for (i, r) in nl.registers().iter().enumerate() {
        range_ok &= check_wire(r.input, format!("input of register {i}"), &mut defects);
        range_ok &= check_wire(r.output, format!("output of register {i}"), &mut defects);
    }
    if !range_ok {
        return defects;
    }

    // Gate ids and arity.
    let mut ids = BTreeSet::new();
    for g in nl.gates() {
        if !ids.insert(g.id) {
            defects.push(Defect::DuplicateGateId { id: g.id });
        }
        let got = g.inputs().count();
        if got != g.kind.arity() {
            defects.push(Defect::BadArity { gate: g.id, kind: g.kind, got });
        }
    }

    // Exactly one driver per driven wire.
    let mut drivers: Vec<Vec<String>> = vec![Vec::new(); wire_count];
    for bus in nl.inputs() {
        for (i, &w) in bus.wires.iter().enumerate() {
            drivers[w as usize].push(format!("input {}[{}]", bus.name, i));
        }
    }
    for g in nl.gates() {
        drivers[g.out as usize].push(format!("gate {}", g.id));
    }
    for (i, r) in nl.registers().iter().enumerate() {
        drivers[r.output as usize].push(format!("register {i}"));
    }
    let mut structurally_sound = true;
    for (w, d) in drivers.iter().enumerate() {
        if d.len() > 1 {
            defects.push(Defect::MultiplyDriven { wire: w as WireId, drivers: d.clone() });
            structurally_sound = false;
        }
    }
    let mut reported_undriven = BTreeSet::new();
    let mut require_driver = |w: WireId, context: String, defects: &mut Vec<Defect>| {
        if drivers[w as usize].is_empty() && reported_undriven.insert(w) {
            defects.push(Defect::Undriven { wire: w, context });
        }
    };
    for g in nl.gates() {
        for w in g.inputs() {
            require_driver(w, format!("input of gate {}", g.id), &mut defects);
        }
    }
    for (i, r) in nl.registers().iter().enumerate() {
        require_driver(r.input, format!("input of register {i}"), &mut defects);
    }
    for bus in nl.outputs() {
        for (i, &w) in bus.wires.iter().enumerate() {
            require_driver(w, format!("output {}[{}]", bus.name, i), &mut defects);
        }
    }
    structurally_sound &= reported_undriven.is_empty();

    // Stage bookkeeping.
    let implied = nl.registers().iter().map(|r| r.stage + 1).max().unwrap_or(0);
    if implied != nl.stage_count() {
        defects.push(Defect::StageCountMismatch { declared: nl.stage_count(), implied });
        structurally_sound = false;
    }

    // Acyclicity (registers break the gate graph).
    let topo = match nl.gate_topo_order() {
        Ok(order) => order,
        Err(stuck) => {
            // Kahn leaves everything downstream of a cycle unordered too;
            // trim to the gates actually on cycles by repeatedly dropping
            // stuck gates that feed no other stuck gate.
            let mut cyclic: BTreeSet<u32> = stuck.iter().copied().collect();
            loop {
                let retained: BTreeSet<u32> = cyclic
                    .iter()
                    .copied()
                    .filter(|&i| {
                        let out = nl.gates()[i as usize].out;
                        cyclic.iter().any(|&j| nl.gates()[j as usize].inputs().any(|w| w == out))
                    })
                    .collect();
                if retained.len() == cyclic.len() {
                    break;
                }
                cyclic = retained;
            }
            let members: Vec<u32> = cyclic.into_iter().collect();
            let gates: Vec<GateId> = members.iter().map(|&i| nl.gates()[i as usize].id).collect();
            defects.push(Defect::CombinationalCycle { stage: cycle_stage(nl, &members), gates });
            return defects;
        }
    };

    if !structurally_sound {
        return defects;
    }

    // Balanced staging: every wire settles in exactly one stage, gates do
    // not mix stages, registers latch the stage they are tagged with, and
    // outputs settle in the final stage.
    let mut stage = vec![0u32; wire_count];
    for r in nl.registers() {
        stage[r.output as usize] = r.stage + 1;
    }
    for &gi in &topo {
        let g = &nl.gates()[gi as usize];
        let lo = g.inputs().map(|w| stage[w as usize]).min().unwrap_or(0);
        let hi = g.inputs().map(|w| stage[w as usize]).max().unwrap_or(0);
        if lo != hi {
            defects.push(Defect::UnbalancedGate { gate: g.id, earliest: lo, latest: hi });
        }
        stage[g.out as usize] = hi;
    }
    for (i, r) in nl.registers().iter().enumerate() {
        let expected = stage[r.input as usize];
        if expected != r.stage {
            defects.push(Defect::RegisterStageMismatch { index: i, expected, declared: r.stage });
        }
    }
    for bus in nl.outputs() {
        for (i, &w) in bus.wires.iter().enumerate() {
            if stage[w as usize] != nl.stage_count() {
                defects.push(Defect::OutputNotFinal {
                    bus: bus.name.clone(),
                    bit: i,
                    stage: stage[w as usize],
                    expected: nl.stage_count(),
                });
            }
        }
    }

    defects
}

/// Best-effort stage attribution for a cycle: the latest register rank
/// feeding it from outside, or stage 0 in a combinational netlist.
fn cycle_stage(nl: &Netlist, cyclic: &[u32]) -> u32 {
    if nl.stage_count() == 0 {
        return 0;
    }
    let mut reg_stage = vec![None::<u32>; nl.wire_count() as usize];
    for r in nl.registers() {
        reg_stage[r.output as usize] = Some(r.stage + 1);
    }
    cyclic
        .iter()
        .flat_map(|&i| nl.gates()[i as usize].inputs())
        .filter_map(|w| reg_stage[w as usize])
        .max()
        .unwrap_or(0)
}

/// Per-wire stage map for a netlist that already passed [`validate`].
pub(crate) fn wire_stages_unchecked(nl: &Netlist, topo: &[u32]) -> Vec<u32> {
    let mut stage = vec![0u32; nl.wire_count() as usize];
    for r in nl.registers() {
        stage[r.output as usize] = r.stage + 1;
    }
    for &gi in topo {
        let g = &nl.gates()[gi as usize];
        let s = g.inputs().map(|w| stage[w as usize]).max().unwrap_or(0);
        stage[g.out as usize] = s;
    }
    stage
}
