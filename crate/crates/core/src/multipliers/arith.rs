//! Bit-level arithmetic building blocks with constant folding.
//!
//! Generators work over [`Operand`]s rather than raw wires so that known
//! bits (zero padding, correction constants, inverted sign extensions)
//! melt away instead of turning into gates. A half adder fed one constant
//! one costs a single NOT; fed a constant zero it costs nothing.

use super::super::netlist::{NetlistBuilder, WireId};
use num_bigint::BigUint;
use num_traits::Zero;

/// A bit that is either settled at generation time or carried by a wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Operand {
    Const(bool),
    Wire(WireId),
}

pub const ZERO: Operand = Operand::Const(false);
pub const ONE: Operand = Operand::Const(true);

pub fn wires(ws: &[WireId]) -> Vec<Operand> {
    ws.iter().map(|&w| Operand::Wire(w)).collect()
}

pub fn not_op(b: &mut NetlistBuilder, x: Operand) -> Operand {
    match x {
        Operand::Const(v) => Operand::Const(!v),
        Operand::Wire(w) => Operand::Wire(b.not(w)),
    }
}

pub fn and_op(b: &mut NetlistBuilder, x: Operand, y: Operand) -> Operand {
    match (x, y) {
        (Operand::Const(false), _) | (_, Operand::Const(false)) => ZERO,
        (Operand::Const(true), v) | (v, Operand::Const(true)) => v,
        (Operand::Wire(u), Operand::Wire(v)) => Operand::Wire(b.and(u, v)),
    }
}

pub fn nand_op(b: &mut NetlistBuilder, x: Operand, y: Operand) -> Operand {
    match (x, y) {
        (Operand::Const(false), _) | (_, Operand::Const(false)) => ONE,
        (Operand::Const(true), v) | (v, Operand::Const(true)) => not_op(b, v),
        (Operand::Wire(u), Operand::Wire(v)) => Operand::Wire(b.nand(u, v)),
    }
}

pub fn xor_op(b: &mut NetlistBuilder, x: Operand, y: Operand) -> Operand {
    match (x, y) {
        (Operand::Const(u), Operand::Const(v)) => Operand::Const(u ^ v),
        (Operand::Const(false), v) | (v, Operand::Const(false)) => v,
        (Operand::Const(true), v) | (v, Operand::Const(true)) => not_op(b, v),
        (Operand::Wire(u), Operand::Wire(v)) => Operand::Wire(b.xor(u, v)),
    }
}

/// Sum and carry of three bits, spending as few gates as the constants
/// allow: two live bits and a constant one become XNOR + OR, a lone live
/// bit with one constant one becomes a single NOT, and so on.
pub fn full_add(b: &mut NetlistBuilder, x: Operand, y: Operand, z: Operand) -> (Operand, Operand) {
    let mut ws: Vec<WireId> = Vec::with_capacity(3);
    let mut ones = 0usize;
    for op in [x, y, z] {
        match op {
            Operand::Wire(w) => ws.push(w),
            Operand::Const(true) => ones += 1,
            Operand::Const(false) => {}
        }
    }
    match (ws.as_slice(), ones) {
        ([], t) => (Operand::Const(t % 2 == 1), Operand::Const(t >= 2)),
        ([w], 0) => (Operand::Wire(*w), ZERO),
        ([w], 1) => (Operand::Wire(b.not(*w)), Operand::Wire(*w)),
        ([w], _) => (Operand::Wire(*w), ONE),
        ([u, v], 0) => (Operand::Wire(b.xor(*u, *v)), Operand::Wire(b.and(*u, *v))),
        ([u, v], _) => (Operand::Wire(b.xnor(*u, *v)), Operand::Wire(b.or(*u, *v))),
        ([u, v, w], _) => {
            let s1 = b.xor(*u, *v);
            let sum = b.xor(s1, *w);
            let c1 = b.and(*u, *v);
            let c2 = b.and(s1, *w);
            let carry = b.or(c1, c2);
            (Operand::Wire(sum), Operand::Wire(carry))
        }
        _ => unreachable!("at most three operands"),
    }
}

pub fn half_add(b: &mut NetlistBuilder, x: Operand, y: Operand) -> (Operand, Operand) {
    full_add(b, x, y, ZERO)
}

/// Sum of three bits when the carry is known to be discarded (the top
/// position of a modular adder); emits no carry logic.
pub fn sum3(b: &mut NetlistBuilder, x: Operand, y: Operand, z: Operand) -> Operand {
    let t = xor_op(b, x, y);
    xor_op(b, t, z)
}

/// Elementwise ripple addition of two equal-width vectors; returns the
/// sum bits and the carry out.
pub fn ripple_add(
    b: &mut NetlistBuilder,
    xs: &[Operand],
    ys: &[Operand],
) -> (Vec<Operand>, Operand) {
    assert_eq!(xs.len(), ys.len());
    let mut carry = ZERO;
    let mut sum = Vec::with_capacity(xs.len());
    for (&x, &y) in xs.iter().zip(ys) {
        let (s, c) = full_add(b, x, y, carry);
        sum.push(s);
        carry = c;
    }
    (sum, carry)
}

/// A multi-operand adder: `cols[j]` holds the bits of weight `2^j`.
/// Everything at or beyond `width` is discarded, so the final value is
/// taken modulo `2^width`.
pub struct Columns {
    width: usize,
    cols: Vec<Vec<Operand>>,
}

impl Columns {
    pub fn new(width: usize) -> Self {
        Columns { width, cols: vec![Vec::new(); width] }
    }

    pub fn deposit_bit(&mut self, pos: usize, bit: Operand) {
        if pos < self.width && bit != ZERO {
            self.cols[pos].push(bit);
        }
    }

    /// Deposits a bit vector starting at weight `2^offset`.
    pub fn deposit(&mut self, offset: usize, bits: &[Operand]) {
        for (k, &bit) in bits.iter().enumerate() {
            self.deposit_bit(offset + k, bit);
        }
    }

    pub fn max_height(&self) -> usize {
        self.cols.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Folds every constant one into a single binary value and re-deposits
    /// it, leaving at most one constant bit per column.
    pub fn normalize_consts(&mut self) {
        let mut total = BigUint::zero();
        for (j, col) in self.cols.iter_mut().enumerate() {
            let ones = col.iter().filter(|&&x| x == ONE).count();
            total += BigUint::from(ones) << j;
            col.retain(|&x| x != ONE);
        }
        total %= BigUint::from(1u8) << self.width;
        for j in 0..self.width {
            if total.bit(j as u64) {
                self.cols[j].push(ONE);
            }
        }
    }

    /// Carry-save reduction: repeated 3:2 compression until every column
    /// holds at most two bits. Carries out of the top column are dropped.
    pub fn reduce(&mut self, b: &mut NetlistBuilder) {
        while self.max_height() > 2 {
            let mut next: Vec<Vec<Operand>> = vec![Vec::new(); self.width];
            for j in 0..self.width {
                let bits = std::mem::take(&mut self.cols[j]);
                if bits.len() <= 2 {
                    next[j].extend(bits);
                    continue;
                }
                for chunk in bits.chunks(3) {
                    match *chunk {
                        [x, y, z] if j + 1 < self.width => {
                            let (s, c) = full_add(b, x, y, z);
                            next[j].push(s);
                            next[j + 1].push(c);
                        }
                        [x, y, z] => next[j].push(sum3(b, x, y, z)),
                        [x, y] if j + 1 < self.width => {
                            let (s, c) = half_add(b, x, y);
                            next[j].push(s);
                            next[j + 1].push(c);
                        }
                        [x, y] => next[j].push(xor_op(b, x, y)),
                        [x] => next[j].push(x),
                        _ => unreachable!("chunks of three"),
                    }
                }
            }
            self.cols = next;
        }
    }

    /// Final carry-propagate pass over the (at most two deep) columns.
    /// The carry out of the top position is provably discarded, so no
    /// gates are spent on it.
    pub fn finish(mut self, b: &mut NetlistBuilder) -> Vec<Operand> {
        self.reduce(b);
        let mut carry = ZERO;
        let mut out = Vec::with_capacity(self.width);
        for j in 0..self.width {
            let x = self.cols[j].first().copied().unwrap_or(ZERO);
            let y = self.cols[j].get(1).copied().unwrap_or(ZERO);
            if j + 1 < self.width {
                let (s, c) = full_add(b, x, y, carry);
                out.push(s);
                carry = c;
            } else {
                out.push(sum3(b, x, y, carry));
            }
        }
        out
    }
}

/// Sums weighted rows with a carry-save adder array: one full-adder rank
/// per row, then a final carry-propagate pass. Classic array-multiplier
/// shape; depth grows linearly with the row count.
///
/// Rows are processed in order, each as `(offset, bits)`. Constant rows
/// (correction terms) fold into the running state for free, so callers
/// should list them first.
pub fn array_accumulate(
    b: &mut NetlistBuilder,
    width: usize,
    rows: &[(usize, Vec<Operand>)],
) -> Vec<Operand> {
    let mut s = vec![ZERO; width];
    let mut c = vec![ZERO; width];
    for (offset, bits) in rows {
        let mut nc = vec![ZERO; width];
        for j in 0..width {
            let bit = if j >= *offset { bits.get(j - offset).copied().unwrap_or(ZERO) } else { ZERO };
            // The saved carry rides the adder's last operand: that input
            // reaches the carry-out through one AND and one OR, so the
            // accumulated chain grows two gate levels per row instead of
            // three. This is the carry-chain ordering that keeps the
            // array shape competitive on depth.
            if j + 1 < width {
                let (s2, cout) = full_add(b, s[j], bit, c[j]);
                s[j] = s2;
                nc[j + 1] = cout;
            } else {
                s[j] = sum3(b, s[j], bit, c[j]);
            }
        }
        c = nc;
    }
    let mut carry = ZERO;
    let mut out = Vec::with_capacity(width);
    for j in 0..width {
        if j + 1 < width {
            let (sum, cout) = full_add(b, s[j], c[j], carry);
            out.push(sum);
            carry = cout;
        } else {
            out.push(sum3(b, s[j], c[j], carry));
        }
    }
    out
}
