//! Register insertion and removal.

use super::{Netlist, NetlistError, Register, WireId};
use std::collections::HashMap;

/// Where to cut a combinational netlist into pipeline stages.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutPolicy {
    /// Cut so no stage exceeds this many gate levels. Must be >= 1.
    AtDepth(u32),
    /// Cut at the stage markers recorded by the generator.
    AtMarkers,
}

/// Inserts register ranks into a combinational netlist.
///
/// Every wire that crosses from segment `s` into a later segment `t` gets
/// a chain of `t - s` registers, one per rank crossed, so the result is a
/// balanced pipeline: equal register counts on every input-to-output path.
/// Gate ids and output wire assignments are preserved.
pub fn insert_pipeline(nl: &Netlist, policy: CutPolicy) -> Result<Netlist, NetlistError> {
    nl.ensure_valid()?;
    if !nl.is_combinational() {
        return Err(NetlistError::AlreadyPipelined);
    }
    let topo = nl.gate_topo_order().expect("valid netlist is acyclic");
    let wire_count = nl.wire_count() as usize;

    // Segment index per gate (by topological position), 0-based.
    let mut seg = vec![0u32; nl.gates().len()];
    match policy {
        CutPolicy::AtDepth(bound) => {
            if bound == 0 {
                return Err(NetlistError::DepthBoundTooSmall);
            }
            let mut level = vec![0u32; wire_count];
            for &gi in &topo {
                let g = &nl.gates()[gi as usize];
                let l = 1 + g.inputs().map(|w| level[w as usize]).max().unwrap_or(0);
                level[g.out as usize] = l;
                seg[gi as usize] = (l - 1) / bound;
            }
        }
        CutPolicy::AtMarkers => {
            let tags = nl.stage_tags().ok_or(NetlistError::NoMarkers)?;
            // Normalize sparse tags to dense segment indices.
            let mut used: Vec<u32> = tags.to_vec();
            used.sort_unstable();
            used.dedup();
            let rank: HashMap<u32, u32> =
                used.iter().enumerate().map(|(i, &t)| (t, i as u32)).collect();
            for (i, &t) in tags.iter().enumerate() {
                seg[i] = rank[&t];
            }
            // Markers must not send a wire backwards in time.
            let mut producer = vec![None::<usize>; wire_count];
            for (i, g) in nl.gates().iter().enumerate() {
                producer[g.out as usize] = Some(i);
            }
            for (i, g) in nl.gates().iter().enumerate() {
                for w in g.inputs() {
                    if let Some(p) = producer[w as usize] {
                        if seg[p] > seg[i] {
                            return Err(NetlistError::MarkerOrder(g.id));
                        }
                    }
                }
            }
        }
    }

    let final_seg = seg.iter().max().copied().unwrap_or(0);
    if final_seg == 0 {
        // One segment: nothing to cut.
        return Ok(Netlist::from_parts(
            nl.name().to_string(),
            nl.wire_count(),
            nl.inputs().to_vec(),
            nl.outputs().to_vec(),
            nl.gates().to_vec(),
            Vec::new(),
            0,
            None,
        ));
    }

    // Producing segment and last consuming segment of every wire.
    let mut produced = vec![0u32; wire_count];
    for (i, g) in nl.gates().iter().enumerate() {
        produced[g.out as usize] = seg[i];
    }
    let mut needed = produced.clone();
    for (i, g) in nl.gates().iter().enumerate() {
        for w in g.inputs() {
            let slot = &mut needed[w as usize];
            *slot = (*slot).max(seg[i]);
        }
    }
    for bus in nl.outputs() {
        for &w in &bus.wires {
            needed[w as usize] = final_seg;
        }
    }

    // Register chains. staged[(w, s)] is the copy of wire w valid in
    // segment s (only present for s past the producing segment).
    let mut next_wire = nl.wire_count();
    let mut registers = Vec::new();
    let mut staged: HashMap<(WireId, u32), WireId> = HashMap::new();
    for w in 0..nl.wire_count() {
        let (from, to) = (produced[w as usize], needed[w as usize]);
        let mut cur = w;
        for s in from..to {
            let out = next_wire;
            next_wire += 1;
            registers.push(Register { input: cur, output: out, stage: s });
            staged.insert((w, s + 1), out);
            cur = out;
        }
    }

    let resolve = |w: WireId, s: u32| -> WireId {
        if s > produced[w as usize] {
            staged[&(w, s)]
        } else {
            w
        }
    };
    let gates = nl
        .gates()
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let mut g = g.clone();
            g.a = resolve(g.a, seg[i]);
            g.b = g.b.map(|w| resolve(w, seg[i]));
            g
        })
        .collect();
    let outputs = nl
        .outputs()
        .iter()
        .map(|bus| {
            let mut bus = bus.clone();
            for w in &mut bus.wires {
                *w = resolve(*w, final_seg);
            }
            bus
        })
        .collect();

    Ok(Netlist::from_parts(
        nl.name().to_string(),
        next_wire,
        nl.inputs().to_vec(),
        outputs,
        gates,
        registers,
        final_seg,
        None,
    ))
}

/// Strips every register, splicing its input wire through to all readers
/// of its output. Inverse of [`insert_pipeline`] up to wire numbering:
/// the result computes the same function combinationally.
pub fn flatten(nl: &Netlist) -> Netlist {
    let mut alias: Vec<WireId> = (0..nl.wire_count()).collect();
    for r in nl.registers() {
        alias[r.output as usize] = r.input;
    }
    // Register chains alias through to the original source.
    let find = |mut w: WireId, alias: &[WireId]| -> WireId {
        while alias[w as usize] != w {
            w = alias[w as usize];
        }
        w
    };
    let gates = nl
        .gates()
        .iter()
        .map(|g| {
            let mut g = g.clone();
            g.a = find(g.a, &alias);
            g.b = g.b.map(|w| find(w, &alias));
            g
        })
        .collect();
    let outputs = nl
        .outputs()
        .iter()
        .map(|bus| {
            let mut bus = bus.clone();
            for w in &mut bus.wires {
                *w = find(*w, &alias);
            }
            bus
        })
        .collect();
    Netlist::from_parts(
        nl.name().to_string(),
        nl.wire_count(),
        nl.inputs().to_vec(),
        outputs,
        gates,
        Vec::new(),
        0,
        None,
    )
}
