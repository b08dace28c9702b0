//! Critical-path analysis under a per-gate-kind delay model.

use super::pipeline::flatten;
use super::validate::wire_stages_unchecked;
use super::{GateId, GateKind, Netlist, NetlistError};
use serde::Serialize;
use std::collections::BTreeMap;

/// Propagation delay per gate kind. Defaults to one unit per gate, which
/// makes critical paths plain logic-level counts.
#[derive(Clone, Debug, PartialEq)]
pub struct DelayTable {
    delays: BTreeMap<GateKind, f64>,
}

impl Default for DelayTable {
    fn default() -> Self {
        DelayTable::unit()
    }
}

impl DelayTable {
    /// Every gate kind costs exactly 1.0.
    pub fn unit() -> Self {
        DelayTable { delays: GateKind::ALL.iter().map(|&k| (k, 1.0)).collect() }
    }

    pub fn empty() -> Self {
        DelayTable { delays: BTreeMap::new() }
    }

    pub fn set(&mut self, kind: GateKind, delay: f64) {
        self.delays.insert(kind, delay);
    }

    pub fn get(&self, kind: GateKind) -> Option<f64> {
        self.delays.get(&kind).copied()
    }

    /// Parses `{"AND": 1.0, "XOR": 1.4, ...}`. Unknown gate names and
    /// negative delays are rejected; omitted kinds fall back to 1.0.
    pub fn from_json(text: &str) -> Result<Self, NetlistError> {
        let raw: BTreeMap<String, f64> = serde_json::from_str(text)
            .map_err(|e| NetlistError::BadDelayTable(e.to_string()))?;
        let mut table = DelayTable::unit();
        for (name, delay) in raw {
            let kind = GateKind::from_name(&name)
                .ok_or_else(|| NetlistError::BadDelayTable(format!("unknown gate kind \"{name}\"")))?;
            if !delay.is_finite() || delay < 0.0 {
                return Err(NetlistError::NegativeDelay(kind));
            }
            table.set(kind, delay);
        }
        Ok(table)
    }
}

/// Longest-path summary of a netlist.
#[derive(Clone, Debug, Serialize)]
pub struct TimingReport {
    /// Longest path inside each stage, indexed by stage (one entry for a
    /// combinational netlist).
    pub per_stage_delay: Vec<f64>,
    /// The clock-period bound: the slowest stage.
    pub max_stage_delay: f64,
    /// Longest path with every register removed; what a single-cycle
    /// implementation would pay.
    pub total_unpipelined_delay: f64,
    /// Gate ids along a path realizing `max_stage_delay`, in signal order.
    pub witness_path: Vec<GateId>,
}

struct ArrivalPass {
    /// Worst-case settle time per wire, measured from its stage boundary.
    arrival: Vec<f64>,
    /// Driving gate index per wire, for witness reconstruction.
    producer: Vec<Option<u32>>,
}

fn arrival_pass(nl: &Netlist, table: &DelayTable, topo: &[u32]) -> Result<ArrivalPass, NetlistError> {
    let mut arrival = vec![0f64; nl.wire_count() as usize];
    let mut producer = vec![None; nl.wire_count() as usize];
    for &gi in topo {
        let g = &nl.gates()[gi as usize];
        let delay = table.get(g.kind).ok_or(NetlistError::MissingDelay(g.kind))?;
        if !delay.is_finite() || delay < 0.0 {
            return Err(NetlistError::NegativeDelay(g.kind));
        }
        let worst = g.inputs().map(|w| arrival[w as usize]).fold(0f64, f64::max);
        arrival[g.out as usize] = worst + delay;
        producer[g.out as usize] = Some(gi);
    }
    Ok(ArrivalPass { arrival, producer })
}

/// Computes per-stage and unpipelined critical paths. Register outputs
/// restart the clock, so a stage's delay is the longest register-to-register
/// (or boundary-to-boundary) combinational path inside it.
pub fn critical_path(nl: &Netlist, table: &DelayTable) -> Result<TimingReport, NetlistError> {
    nl.ensure_valid()?;
    let topo = nl.gate_topo_order().expect("valid netlist is acyclic");
    let pass = arrival_pass(nl, table, &topo)?;
    let stages = wire_stages_unchecked(nl, &topo);

    let stage_total = nl.stage_count() as usize + 1;
    let mut per_stage_delay = vec![0f64; stage_total];
    let mut per_stage_tail: Vec<Option<u32>> = vec![None; stage_total];
    for &gi in &topo {
        let g = &nl.gates()[gi as usize];
        let s = stages[g.out as usize] as usize;
        if pass.arrival[g.out as usize] > per_stage_delay[s] {
            per_stage_delay[s] = pass.arrival[g.out as usize];
            per_stage_tail[s] = Some(gi);
        }
    }

    let mut worst_stage = 0usize;
    for (s, &d) in per_stage_delay.iter().enumerate() {
        if d > per_stage_delay[worst_stage] {
            worst_stage = s;
        }
    }
    let max_stage_delay = per_stage_delay[worst_stage];

    // Walk back from the slowest gate, always following the latest-arriving
    // gate-driven input.
    let mut witness_path = Vec::new();
    let mut cursor = per_stage_tail[worst_stage];
    while let Some(gi) = cursor {
        let g = &nl.gates()[gi as usize];
        witness_path.push(g.id);
        cursor = g
            .inputs()
            .filter_map(|w| pass.producer[w as usize].map(|p| (pass.arrival[w as usize], p)))
            .max_by(|x, y| x.0.partial_cmp(&y.0).expect("delays are finite"))
            .map(|(_, p)| p);
    }
    witness_path.reverse();

    let total_unpipelined_delay = if nl.is_combinational() {
        max_stage_delay
    } else {
        let flat = flatten(nl);
        let topo = flat.gate_topo_order().expect("flattening preserves acyclicity");
        let pass = arrival_pass(&flat, table, &topo)?;
        pass.arrival.iter().copied().fold(0f64, f64::max)
    };

    Ok(TimingReport { per_stage_delay, max_stage_delay, total_unpipelined_delay, witness_path })
}
