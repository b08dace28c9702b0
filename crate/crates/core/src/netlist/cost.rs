//! Resource accounting, structural or calibrated against measured unit costs.

use super::{Netlist, NetlistError};
use serde::Serialize;

/// Measured resource cost of one multiplier instance on the target part.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnitCost {
    pub slice_registers: u64,
    pub slice_luts: u64,
    pub lut_ff_pairs: u64,
    pub bonded_iobs: u64,
}

/// How to price a netlist.
#[derive(Clone, Copy, Debug)]
pub enum CostModel<'a> {
    /// Count the structure itself: one LUT per gate, one slice register
    /// per pipeline register.
    Structural,
    /// Report the attached measured figures instead of structural counts.
    Calibrated(&'a UnitCost),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CostReport {
    pub slice_registers: u64,
    pub slice_luts: u64,
    pub lut_ff_pairs: u64,
    pub bonded_iobs: u64,
    /// Structural gate count, regardless of model.
    pub gate_count: u64,
    /// Structural register count, regardless of model.
    pub register_count: u64,
    /// Deepest single-stage logic level count, regardless of model.
    pub depth: u64,
}

/// Prices a netlist under the given model.
pub fn cost_report(nl: &Netlist, model: CostModel<'_>) -> Result<CostReport, NetlistError> {
    nl.ensure_valid()?;
    let topo = nl.gate_topo_order().expect("valid netlist is acyclic");

    // Logic depth: gate levels, restarting at register outputs. Register
    // outputs are never gate outputs, so they simply stay at level 0.
    let mut level = vec![0u64; nl.wire_count() as usize];
    let mut depth = 0u64;
    for &gi in &topo {
        let g = &nl.gates()[gi as usize];
        let l = 1 + g.inputs().map(|w| level[w as usize]).max().unwrap_or(0);
        level[g.out as usize] = l;
        depth = depth.max(l);
    }

    let gate_count = nl.gates().len() as u64;
    let register_count = nl.registers().len() as u64;
    let io_bits: u64 = nl
        .inputs()
        .iter()
        .chain(nl.outputs())
        .map(|b| b.width() as u64)
        .sum();

    let (slice_registers, slice_luts, lut_ff_pairs, bonded_iobs) = match model {
        CostModel::Structural => {
            (register_count, gate_count, gate_count.min(register_count), io_bits)
        }
        CostModel::Calibrated(unit) => {
            (unit.slice_registers, unit.slice_luts, unit.lut_ff_pairs, unit.bonded_iobs)
        }
    };

    Ok(CostReport {
        slice_registers,
        slice_luts,
        lut_ff_pairs,
        bonded_iobs,
        gate_count,
        register_count,
        depth,
    })
}
