//! Unsigned multiplier with staged column compression.
//!
//! The partial-product matrix is reduced through a fixed schedule of
//! height targets (2, 3, 4, 6, 9, 13, ...; each next allowance is 1.5x
//! the previous, floored). Each stage compresses just enough columns to
//! meet its target, using a full adder while a column is two or more over
//! and a half adder for the final one-over, with carries landing in the
//! next column of the same stage. Two rows remain for the final
//! carry-propagate pass.

use super::arith::{and_op, full_add, half_add, sum3, xor_op, Operand, ZERO};
use crate::netlist::NetlistBuilder;

/// Column-height targets visited by a width-`n` reduction, tallest first.
pub fn stage_targets(n: usize) -> Vec<usize> {
    let mut seq = Vec::new();
    let mut d = 2usize;
    while d < n {
        seq.push(d);
        d = d * 3 / 2;
    }
    seq.reverse();
    seq
}

pub(super) fn product(b: &mut NetlistBuilder, a: &[Operand], x: &[Operand]) -> Vec<Operand> {
    let n = a.len();
    let width = 2 * n;
    let mut cols: Vec<Vec<Operand>> = vec![Vec::new(); width];
    for (j, &xb) in x.iter().enumerate() {
        for (i, &ab) in a.iter().enumerate() {
            let pp = and_op(b, ab, xb);
            if pp != ZERO {
                cols[i + j].push(pp);
            }
        }
    }

    for target in stage_targets(n) {
        for j in 0..width {
            while cols[j].len() > target {
                if cols[j].len() == target + 1 {
                    let y = cols[j].remove(1);
                    let z = cols[j].remove(0);
                    if j + 1 < width {
                        let (s, c) = half_add(b, z, y);
                        cols[j].push(s);
                        cols[j + 1].push(c);
                    } else {
                        let s = xor_op(b, z, y);
                        cols[j].push(s);
                    }
                } else {
                    let z = cols[j].remove(2);
                    let y = cols[j].remove(1);
                    let x0 = cols[j].remove(0);
                    if j + 1 < width {
                        let (s, c) = full_add(b, x0, y, z);
                        cols[j].push(s);
                        cols[j + 1].push(c);
                    } else {
                        cols[j].push(sum3(b, x0, y, z));
                    }
                }
            }
        }
    }

    // Two rows left: a plain ripple-carry pass, the incoming carry wired
    // as an ordinary addend of each full-adder cell. The wrap-around
    // carry out of the top position is dropped.
    let mut carry = ZERO;
    let mut out = Vec::with_capacity(width);
    for (j, col) in cols.iter().enumerate() {
        let p = col.first().copied().unwrap_or(ZERO);
        let q = col.get(1).copied().unwrap_or(ZERO);
        if j + 1 < width {
            let (s, c) = full_add(b, carry, p, q);
            out.push(s);
            carry = c;
        } else {
            out.push(sum3(b, carry, p, q));
        }
    }
    out
}
