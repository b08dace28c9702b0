//! Structural recognition of the 2x2 kernel.
//!
//! A kernel is the eight-gate subcircuit
//!
//! ```text
//! p0 = AND(a0, b0)   t1 = AND(a1, b0)   t2 = AND(a0, b1)   t3 = AND(a1, b1)
//! p1 = XOR(t1, t2)   c1 = AND(t1, t2)
//! p2 = XOR(t3, c1)   p3 = AND(t3, c1)
//! ```
//!
//! The matcher anchors on `p3` candidates (an AND with a sibling XOR over
//! the same pair) and then demands the rest of the shape: the inner AND
//! over two partial-product leaves with its own sibling XOR, the three
//! leaves arranged in a 2x2 grid over four distinct source wires, and the
//! fourth grid AND present. Merge-level adders also emit AND/XOR sibling
//! pairs, but their operands never close the grid, so kernels are counted
//! exactly.

use crate::netlist::{Gate, GateKind, Netlist, WireId};
use std::collections::HashSet;

fn pair(a: WireId, b: WireId) -> (WireId, WireId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Counts the 2x2 kernels a recursive generator placed.
pub fn count_base_multipliers(nl: &Netlist) -> usize {
    let wire_count = nl.wire_count() as usize;
    let mut driver: Vec<Option<u32>> = vec![None; wire_count];
    for (i, g) in nl.gates().iter().enumerate() {
        driver[g.out as usize] = Some(i as u32);
    }
    let gate_of = |w: WireId| driver[w as usize].map(|i| &nl.gates()[i as usize]);

    let two_input = |g: &Gate| g.b.map(|b| (g.a, b));
    let xor_pairs: HashSet<(WireId, WireId)> = nl
        .gates()
        .iter()
        .filter(|g| g.kind == GateKind::Xor)
        .filter_map(two_input)
        .map(|(a, b)| pair(a, b))
        .collect();
    let and_pairs: HashSet<(WireId, WireId)> = nl
        .gates()
        .iter()
        .filter(|g| g.kind == GateKind::And)
        .filter_map(two_input)
        .map(|(a, b)| pair(a, b))
        .collect();

    // A partial-product leaf: an AND whose operands are not produced by
    // other ANDs (primary inputs or pre-adder sums).
    let leaf = |w: WireId| -> Option<(WireId, WireId)> {
        let g = gate_of(w)?;
        if g.kind != GateKind::And {
            return None;
        }
        let (a, b) = two_input(g)?;
        let and_driven = |x: WireId| {
            gate_of(x).map(|d| d.kind == GateKind::And).unwrap_or(false)
        };
        if and_driven(a) || and_driven(b) {
            return None;
        }
        Some((a, b))
    };

    // t3 = AND(p, q); t1 and t2 each share one distinct side of it, and
    // the complementary product over the two remaining wires exists.
    let grid_closes = |t3: (WireId, WireId), t1: (WireId, WireId), t2: (WireId, WireId)| {
        let (p, q) = t3;
        let arrangements = [(p, q), (q, p)];
        arrangements.iter().any(|&(p, q)| {
            let r = match t1 {
                (x, y) if x == p => y,
                (x, y) if y == p => x,
                _ => return false,
            };
            let s = match t2 {
                (x, y) if x == q => y,
                (x, y) if y == q => x,
                _ => return false,
            };
            r != q && s != p && and_pairs.contains(&pair(r, s))
        })
    };

    let is_kernel_tail = |u: WireId, v: WireId| -> bool {
        // u plays t3, v plays c1.
        let Some(t3) = leaf(u) else { return false };
        let Some(c1_gate) = gate_of(v) else { return false };
        if c1_gate.kind != GateKind::And {
            return false;
        }
        let Some((t1w, t2w)) = two_input(c1_gate) else { return false };
        if !xor_pairs.contains(&pair(t1w, t2w)) {
            return false;
        }
        let (Some(t1), Some(t2)) = (leaf(t1w), leaf(t2w)) else { return false };
        grid_closes(t3, t1, t2) || grid_closes(t3, t2, t1)
    };

    nl.gates()
        .iter()
        .filter(|g| g.kind == GateKind::And)
        .filter(|g| {
            let Some((u, v)) = two_input(g) else { return false };
            xor_pairs.contains(&pair(u, v)) && (is_kernel_tail(u, v) || is_kernel_tail(v, u))
        })
        .count()
}
