//! Recursive multipliers built from a 2x2-bit kernel.
//!
//! Both constructions split the operands in half and recurse down to a
//! fixed eight-gate 2x2 multiplier. The three-multiplier form trades the
//! fourth sub-product for two half-width pre-adders and a gated
//! cross-term correction; the four-multiplier form keeps all four
//! sub-products and skips the pre-adders entirely.
//!
//! Every recombination level is tagged as a pipeline segment: kernels and
//! pre-adders sit in segment 0 and the merge at node width `w` sits in
//! segment `log2(w) - 1`, so a width-`n` netlist cut at its markers gets
//! `log2(n) - 1` register ranks.

use super::arith::{self, and_op, not_op, ripple_add, Columns, Operand, ONE};
use crate::netlist::NetlistBuilder;

fn merge_tag(width: usize) -> u32 {
    width.trailing_zeros() - 1
}

/// The 2x2 kernel: four partial products and two half adders, eight gates.
fn kernel2(b: &mut NetlistBuilder, a: &[Operand], x: &[Operand]) -> Vec<Operand> {
    debug_assert_eq!(a.len(), 2);
    debug_assert_eq!(x.len(), 2);
    b.set_stage(0);
    let p0 = and_op(b, a[0], x[0]);
    let t1 = and_op(b, a[1], x[0]);
    let t2 = and_op(b, a[0], x[1]);
    let (p1, c1) = arith::half_add(b, t1, t2);
    let t3 = and_op(b, a[1], x[1]);
    let (p2, p3) = arith::half_add(b, t3, c1);
    vec![p0, p1, p2, p3]
}

/// Three-multiplier recursion: `A*B = Pll + 2^h*(S - Pll - Phh) + 2^w*Phh`
/// where `S` is the product of the half sums. The subtractions enter the
/// merge as inverted, one-extended vectors plus a folded constant, which
/// is exact modulo `2^(2w)`.
pub(super) fn three_product(
    b: &mut NetlistBuilder,
    a: &[Operand],
    x: &[Operand],
) -> Vec<Operand> {
    let w = a.len();
    if w == 2 {
        return kernel2(b, a, x);
    }
    let h = w / 2;

    b.set_stage(0);
    let (sa, ca) = ripple_add(b, &a[..h], &a[h..]);
    let (sx, cx) = ripple_add(b, &x[..h], &x[h..]);

    let pll = three_product(b, &a[..h], &x[..h]);
    let phh = three_product(b, &a[h..], &x[h..]);
    let pss = three_product(b, &sa, &sx);

    b.set_stage(merge_tag(w));
    let mut cols = Columns::new(2 * w);
    cols.deposit(0, &pll);
    cols.deposit(w, &phh);

    // (sa + 2^h*ca)(sx + 2^h*cx), all shifted by h.
    cols.deposit(h, &pss);
    for (k, &s) in sx.iter().enumerate() {
        let g = and_op(b, ca, s);
        cols.deposit_bit(h + h + k, g);
    }
    for (k, &s) in sa.iter().enumerate() {
        let g = and_op(b, cx, s);
        cols.deposit_bit(h + h + k, g);
    }
    let cc = and_op(b, ca, cx);
    cols.deposit_bit(h + 2 * h, cc);

    // -(Pll + Phh) * 2^h as two's complement over 2w - h positions.
    for sub in [&pll, &phh] {
        for k in 0..(2 * w - h) {
            let bit = sub.get(k).copied().unwrap_or(arith::ZERO);
            let inv = not_op(b, bit);
            cols.deposit_bit(h + k, inv);
        }
        cols.deposit_bit(h, ONE);
    }

    cols.normalize_consts();
    cols.finish(b)
}

/// Four-multiplier recursion: all four half-width sub-products, merged at
/// their natural offsets. No pre-adders, no negative terms.
pub(super) fn four_product(b: &mut NetlistBuilder, a: &[Operand], x: &[Operand]) -> Vec<Operand> {
    let w = a.len();
    if w == 2 {
        return kernel2(b, a, x);
    }
    let h = w / 2;

    let pll = four_product(b, &a[..h], &x[..h]);
    let plh = four_product(b, &a[..h], &x[h..]);
    let phl = four_product(b, &a[h..], &x[..h]);
    let phh = four_product(b, &a[h..], &x[h..]);

    b.set_stage(merge_tag(w));
    let mut cols = Columns::new(2 * w);
    cols.deposit(0, &pll);
    cols.deposit(h, &plh);
    cols.deposit(h, &phl);
    cols.deposit(w, &phh);
    cols.finish(b)
}
