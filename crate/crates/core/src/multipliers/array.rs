//! Plain unsigned array multiplier: one AND per partial product, summed
//! row by row through a carry-save adder array.

use super::arith::{and_op, array_accumulate, Operand};
use crate::netlist::NetlistBuilder;

pub(super) fn product(b: &mut NetlistBuilder, a: &[Operand], x: &[Operand]) -> Vec<Operand> {
    let n = a.len();
    let rows: Vec<(usize, Vec<Operand>)> = x
        .iter()
        .enumerate()
        .map(|(j, &xb)| (j, a.iter().map(|&ab| and_op(b, ab, xb)).collect()))
        .collect();
    array_accumulate(b, 2 * n, &rows)
}
