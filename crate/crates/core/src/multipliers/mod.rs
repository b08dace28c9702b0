//! Gate-level multiplier generators.
//!
//! Four constructions, all emitting netlists with input buses `A` and `B`
//! of the requested width and a product bus `P` of twice that width:
//!
//! * [`Family::Recursive`] — the Karatsuba-Ofman split, in a
//!   three-multiplier ([`KomVariant::ThreeMult`]) and a four-multiplier
//!   ([`KomVariant::FourMult`]) variant, recursing to an eight-gate 2x2
//!   kernel. Carries pipeline stage markers, one segment per merge level,
//!   and can be emitted pre-pipelined.
//! * [`Family::BaughWooley`] — two's-complement array multiplier with the
//!   sign logic folded into the partial products.
//! * [`Family::Dadda`] — unsigned multiplier with the staged column
//!   compression schedule.
//! * [`Family::Array`] — plain unsigned carry-save array.

mod arith;
mod array;
mod baugh_wooley;
pub mod check;
mod dadda;
mod kom;
mod structure;

pub use dadda::stage_targets as dadda_stage_targets;
pub use structure::count_base_multipliers;

use crate::netlist::{insert_pipeline, CutPolicy, Netlist, NetlistBuilder, WireId};
use arith::Operand;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Recursive,
    BaughWooley,
    Dadda,
    Array,
}

impl Family {
    pub const ALL: [Family; 4] =
        [Family::Recursive, Family::BaughWooley, Family::Dadda, Family::Array];

    /// Short name used in netlist names and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            Family::Recursive => "kom",
            Family::BaughWooley => "bw",
            Family::Dadda => "dadda",
            Family::Array => "array",
        }
    }

    pub fn from_name(name: &str) -> Option<Family> {
        Self::ALL.iter().copied().find(|f| f.name() == name)
    }

    /// Whether operands are read as two's complement.
    pub fn signed(self) -> bool {
        matches!(self, Family::BaughWooley)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KomVariant {
    /// Three half-width sub-products plus pre-adders and gated cross terms.
    ThreeMult,
    /// Four half-width sub-products, no pre-adders.
    FourMult,
}

/// What to generate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MultiplierSpec {
    pub family: Family,
    pub width: usize,
    /// Recursive family only; defaults to [`KomVariant::ThreeMult`].
    pub variant: Option<KomVariant>,
    /// Cut the netlist at its stage markers (recursive family only).
    pub pipelined: bool,
}

impl MultiplierSpec {
    pub fn new(family: Family, width: usize) -> Self {
        MultiplierSpec { family, width, variant: None, pipelined: false }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GenError {
    #[error("multiplier widths start at 2, got {0}")]
    WidthTooSmall(usize),
    #[error("the recursive family needs a power-of-two width, got {0}")]
    WidthNotPowerOfTwo(usize),
    #[error("the {0} family has a single construction; variants select recursive splits")]
    VariantNotApplicable(Family),
    #[error("only the recursive family carries stage markers to pipeline at")]
    PipelineNotSupported(Family),
}

/// Generates the multiplier netlist described by `spec`.
pub fn generate(spec: &MultiplierSpec) -> Result<Netlist, GenError> {
    let n = spec.width;
    if n < 2 {
        return Err(GenError::WidthTooSmall(n));
    }
    if spec.family != Family::Recursive {
        if spec.variant.is_some() {
            return Err(GenError::VariantNotApplicable(spec.family));
        }
        if spec.pipelined {
            return Err(GenError::PipelineNotSupported(spec.family));
        }
    }
    if spec.family == Family::Recursive && !n.is_power_of_two() {
        return Err(GenError::WidthNotPowerOfTwo(n));
    }

    let variant = spec.variant.unwrap_or(KomVariant::ThreeMult);
    let mut name = format!("{}{}", spec.family.name(), n);
    if spec.family == Family::Recursive && variant == KomVariant::FourMult {
        name.push_str("-fourproduct");
    }
    if spec.pipelined {
        name.push_str("-pipelined");
    }

    let mut b = NetlistBuilder::new(name);
    let a = arith::wires(&b.input_bus("A", n));
    let x = arith::wires(&b.input_bus("B", n));
    let product = match spec.family {
        Family::Recursive => match variant {
            KomVariant::ThreeMult => kom::three_product(&mut b, &a, &x),
            KomVariant::FourMult => kom::four_product(&mut b, &a, &x),
        },
        Family::BaughWooley => baugh_wooley::product(&mut b, &a, &x),
        Family::Dadda => dadda::product(&mut b, &a, &x),
        Family::Array => array::product(&mut b, &a, &x),
    };
    debug_assert_eq!(product.len(), 2 * n);

    let bits: Vec<WireId> = product
        .iter()
        .map(|&p| match p {
            Operand::Wire(w) => w,
            // Product bits never fold to constants for live inputs, but
            // the type admits it; synthesize the constant from an input.
            Operand::Const(v) => {
                let a0 = match a[0] {
                    Operand::Wire(w) => w,
                    Operand::Const(_) => unreachable!("inputs are wires"),
                };
                if v {
                    b.xnor(a0, a0)
                } else {
                    b.xor(a0, a0)
                }
            }
        })
        .collect();
    b.output_bus("P", &bits);
    let nl = b.finish();

    if spec.pipelined && nl.has_stage_markers() {
        Ok(insert_pipeline(&nl, CutPolicy::AtMarkers).expect("markers are well ordered"))
    } else {
        // Width 2 is a lone kernel: a single segment with no rank to cut.
        Ok(nl)
    }
}
