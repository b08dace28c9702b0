//! Gate-level arithmetic circuits and the tooling around them.
//!
//! The crate has four parts:
//!
//! * [`netlist`] — a minimal gate-level netlist model (six two/one-input
//!   primitives plus pipeline registers), with evaluation, cycle-accurate
//!   pipelined simulation, static timing, structural/calibrated cost
//!   reporting, retiming-free pipeline insertion, and a JSON interchange
//!   format.
//! * [`multipliers`] — generators that emit multiplier netlists in four
//!   families (recursive Karatsuba-Ofman, Baugh-Wooley, Dadda, ripple
//!   array), plus oracle-based equivalence checking helpers.
//! * [`systolic`] — an exact-integer systolic MAC engine covering 1-D/2-D
//!   convolution, matrix multiplication, pooling and fully-connected
//!   layers, programmable through a small instruction script.
//! * [`workload`] — a calibrated FPGA resource model for CNN convolution
//!   workloads, backed by a shipped per-kernel-order resource dataset.

pub mod bits;
pub mod multipliers;
pub mod netlist;
pub mod systolic;
pub mod workload;
