//! Two's-complement multiplier with sign handling folded into the
//! partial-product array.
//!
//! Writing the operands as `A = -a_{n-1} 2^{n-1} + sum a_i 2^i`, the
//! cross terms involving exactly one sign bit enter negated. Each negated
//! term is replaced by its complement (a NAND instead of an AND) plus a
//! correction, and the corrections collapse to constant ones at weights
//! `2^n` and `2^(2n-1)`, exact modulo `2^(2n)`.

use super::arith::{and_op, array_accumulate, nand_op, Operand, ONE};
use crate::netlist::NetlistBuilder;

pub(super) fn product(b: &mut NetlistBuilder, a: &[Operand], x: &[Operand]) -> Vec<Operand> {
    let n = a.len();
    let width = 2 * n;
    let mut rows: Vec<(usize, Vec<Operand>)> = vec![
        (n, vec![ONE]),
        (2 * n - 1, vec![ONE]),
    ];
    for (j, &xb) in x.iter().enumerate() {
        let row: Vec<Operand> = a
            .iter()
            .enumerate()
            .map(|(i, &ab)| {
                if (i == n - 1) ^ (j == n - 1) {
                    nand_op(b, ab, xb)
                } else {
                    and_op(b, ab, xb)
                }
            })
            .collect();
        rows.push((j, row));
    }
    array_accumulate(b, width, &rows)
}
