//! CNN layer inventories and the calibrated multiplier-cost model.
//!
//! A measured resource table ships with the crate: for matrix orders 3,
//! 5, 7 and 11 and four multiplier builds, it lists the FPGA resources
//! used when every scalar multiply of an order-n matrix product gets its
//! own multiplier (n^3 instances). Every cell is an exact integer
//! multiple of the order-3 cell divided by 27, so [`calibrate`] recovers
//! per-multiplier unit costs and re-derives all 64 cells as a
//! consistency check, hard-failing on any mismatch. The same unit costs
//! then price whole convolutional workloads: each k x k kernel of an
//! architecture is costed as an order-k matrix product.

use crate::netlist::{CostReport, UnitCost};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

static TABLE_DATA: &str = include_str!("tables.csv");

/// Matrix orders covered by the shipped table.
pub const TABLE_ORDERS: [usize; 4] = [3, 5, 7, 11];

/// The four multiplier builds the table was measured for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MultiplierKind {
    Kom16,
    Kom32,
    Bw32,
    Dadda32,
}

impl MultiplierKind {
    pub const ALL: [MultiplierKind; 4] =
        [MultiplierKind::Kom16, MultiplierKind::Kom32, MultiplierKind::Bw32, MultiplierKind::Dadda32];

    /// Lowercase name used on the command line.
    pub fn name(self) -> &'static str {
        match self {
            MultiplierKind::Kom16 => "kom16",
            MultiplierKind::Kom32 => "kom32",
            MultiplierKind::Bw32 => "bw32",
            MultiplierKind::Dadda32 => "dadda32",
        }
    }

    /// Uppercase label used in the data file and reports.
    pub fn label(self) -> &'static str {
        match self {
            MultiplierKind::Kom16 => "KOM16",
            MultiplierKind::Kom32 => "KOM32",
            MultiplierKind::Bw32 => "BW32",
            MultiplierKind::Dadda32 => "DADDA32",
        }
    }

    pub fn from_name(name: &str) -> Option<MultiplierKind> {
        Self::ALL.iter().copied().find(|k| k.name() == name || k.label() == name)
    }
}

impl fmt::Display for MultiplierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One resource category of the table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CostField {
    SliceRegisters,
    SliceLuts,
    LutFfPairs,
    BondedIobs,
}

impl CostField {
    pub const ALL: [CostField; 4] = [
        CostField::SliceRegisters,
        CostField::SliceLuts,
        CostField::LutFfPairs,
        CostField::BondedIobs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CostField::SliceRegisters => "slice_registers",
            CostField::SliceLuts => "slice_luts",
            CostField::LutFfPairs => "lut_ff_pairs",
            CostField::BondedIobs => "bonded_iobs",
        }
    }

    pub fn from_name(name: &str) -> Option<CostField> {
        Self::ALL.iter().copied().find(|f| f.name() == name)
    }

    pub fn of_unit(self, unit: &UnitCost) -> u64 {
        match self {
            CostField::SliceRegisters => unit.slice_registers,
            CostField::SliceLuts => unit.slice_luts,
            CostField::LutFfPairs => unit.lut_ff_pairs,
            CostField::BondedIobs => unit.bonded_iobs,
        }
    }

    pub fn of_report(self, report: &CostReport) -> u64 {
        match self {
            CostField::SliceRegisters => report.slice_registers,
            CostField::SliceLuts => report.slice_luts,
            CostField::LutFfPairs => report.lut_ff_pairs,
            CostField::BondedIobs => report.bonded_iobs,
        }
    }
}

impl fmt::Display for CostField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One cell of the measured table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableRow {
    pub order: usize,
    pub kind: MultiplierKind,
    pub field: CostField,
    pub value: u64,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CalibrationError {
    #[error("bad table row {0:?}")]
    BadRow(String),
    #[error("table holds {got} cells, expected {expected}")]
    WrongRowCount { expected: usize, got: usize },
    #[error("table is missing the ({order}, {kind}, {field}) cell")]
    MissingCell { order: usize, kind: MultiplierKind, field: CostField },
    #[error("cell (3, {kind}, {field}) = {value} is not an exact multiple of 27")]
    NotDivisible { kind: MultiplierKind, field: CostField, value: u64 },
    #[error("cell ({order}, {kind}, {field}) is {value} but the unit model gives {predicted}")]
    Mismatch { order: usize, kind: MultiplierKind, field: CostField, value: u64, predicted: u64 },
}

/// Parses `order,kind,field,value` rows (one header line first).
pub fn parse_rows(text: &str) -> Result<Vec<TableRow>, CalibrationError> {
    let bad = |line: &str| CalibrationError::BadRow(line.to_string());
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if i == 0 {
            if trimmed != "order,kind,field,value" {
                return Err(bad(line));
            }
            continue;
        }
        let mut parts = trimmed.split(',');
        let (Some(order), Some(kind), Some(field), Some(value), None) =
            (parts.next(), parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(bad(line));
        };
        rows.push(TableRow {
            order: order.parse().map_err(|_| bad(line))?,
            kind: MultiplierKind::from_name(kind).ok_or_else(|| bad(line))?,
            field: CostField::from_name(field).ok_or_else(|| bad(line))?,
            value: value.parse().map_err(|_| bad(line))?,
        });
    }
    Ok(rows)
}

/// The table as shipped.
pub fn shipped_rows() -> Result<Vec<TableRow>, CalibrationError> {
    parse_rows(TABLE_DATA)
}

/// Unit costs recovered from the table, keyed by multiplier build.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CalibratedCosts {
    units: BTreeMap<MultiplierKind, UnitCost>,
}

impl CalibratedCosts {
    pub fn get(&self, kind: MultiplierKind) -> &UnitCost {
        &self.units[&kind]
    }
}

/// Recovers per-multiplier unit costs from table rows: each unit figure
/// is the order-3 cell divided by 27 (required exact), and every one of
/// the 64 cells must equal unit x order^3. Any violation aborts.
pub fn calibrate_from(rows: &[TableRow]) -> Result<CalibratedCosts, CalibrationError> {
    let expected = TABLE_ORDERS.len() * MultiplierKind::ALL.len() * CostField::ALL.len();
    if rows.len() != expected {
        return Err(CalibrationError::WrongRowCount { expected, got: rows.len() });
    }
    let mut cells = BTreeMap::new();
    for row in rows {
        cells.insert((row.order, row.kind, row.field), row.value);
    }
    let cell = |order, kind, field| {
        cells
            .get(&(order, kind, field))
            .copied()
            .ok_or(CalibrationError::MissingCell { order, kind, field })
    };

    let mut units = BTreeMap::new();
    for kind in MultiplierKind::ALL {
        let figure = |field: CostField| -> Result<u64, CalibrationError> {
            let base = cell(3, kind, field)?;
            if base % 27 != 0 {
                return Err(CalibrationError::NotDivisible { kind, field, value: base });
            }
            let unit = base / 27;
            for order in TABLE_ORDERS {
                let value = cell(order, kind, field)?;
                let predicted = unit * (order as u64).pow(3);
                if value != predicted {
                    return Err(CalibrationError::Mismatch { order, kind, field, value, predicted });
                }
            }
            Ok(unit)
        };
        units.insert(
            kind,
            UnitCost {
                slice_registers: figure(CostField::SliceRegisters)?,
                slice_luts: figure(CostField::SliceLuts)?,
                lut_ff_pairs: figure(CostField::LutFfPairs)?,
                bonded_iobs: figure(CostField::BondedIobs)?,
            },
        );
    }
    Ok(CalibratedCosts { units })
}

/// Calibrates against the shipped table.
pub fn calibrate() -> Result<CalibratedCosts, CalibrationError> {
    calibrate_from(&shipped_rows()?)
}

/// Multipliers needed to compute an order-n matrix product with one
/// multiplier per scalar multiplication: n^3.
pub fn multiplier_count(n: usize) -> u64 {
    (n as u64).pow(3)
}

/// Resources for an order-n matrix product built from `kind` multipliers:
/// every priced field is unit cost x n^3. The structural netlist figures
/// do not apply to the calibrated model and are zero.
pub fn estimate_matrix_mult_resources(
    n: usize,
    kind: MultiplierKind,
    costs: &CalibratedCosts,
) -> CostReport {
    let unit = costs.get(kind);
    let cube = multiplier_count(n);
    CostReport {
        slice_registers: unit.slice_registers * cube,
        slice_luts: unit.slice_luts * cube,
        lut_ff_pairs: unit.lut_ff_pairs * cube,
        bonded_iobs: unit.bonded_iobs * cube,
        gate_count: 0,
        register_count: 0,
        depth: 0,
    }
}

/// Convolutional inventory of one network architecture.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CnnArchSpec {
    pub name: String,
    /// Input image extents (H, W, C).
    pub input_dims: (usize, usize, usize),
    pub conv_layers: usize,
    /// (kernel size, kernel count) entries.
    pub kernel_inventory: Vec<(usize, usize)>,
    /// Where the figures come from. The shipped inventories are stored
    /// verbatim from their source dataset, including layer tallies that
    /// differ from other published descriptions of the same networks.
    pub source: &'static str,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("unknown architecture {0:?}; known: alexnet, vgg16, vgg19")]
pub struct UnknownArch(pub String);

/// The three networks the shipped dataset describes.
pub fn builtin_arch(name: &str) -> Result<CnnArchSpec, UnknownArch> {
    let source = "shipped dataset";
    match name.to_ascii_lowercase().as_str() {
        "alexnet" => Ok(CnnArchSpec {
            name: "alexnet".to_string(),
            input_dims: (227, 227, 3),
            conv_layers: 5,
            kernel_inventory: vec![(11, 96), (5, 256), (3, 1024)],
            source,
        }),
        "vgg16" => Ok(CnnArchSpec {
            name: "vgg16".to_string(),
            input_dims: (224, 224, 3),
            conv_layers: 12,
            kernel_inventory: vec![(3, 3968)],
            source,
        }),
        "vgg19" => Ok(CnnArchSpec {
            name: "vgg19".to_string(),
            input_dims: (224, 224, 3),
            conv_layers: 14,
            kernel_inventory: vec![(3, 4992)],
            source,
        }),
        _ => Err(UnknownArch(name.to_string())),
    }
}

/// One kernel-inventory entry priced out.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WorkloadEntry {
    pub kernel_size: usize,
    pub kernel_count: usize,
    /// kernel_count x kernel_size^3 multiplier instances.
    pub multiplier_instances: u64,
    pub cost: CostReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WorkloadReport {
    pub architecture: String,
    pub multiplier: MultiplierKind,
    pub total_kernels: u64,
    pub total_instances: u64,
    pub entries: Vec<WorkloadEntry>,
    pub total: CostReport,
}

/// Prices an architecture's convolutions: each k x k kernel costs one
/// order-k matrix product, so an entry of `count` kernels instantiates
/// count x k^3 multipliers. The aggregate is the exact sum of the
/// per-entry rows.
pub fn workload_report(
    arch: &CnnArchSpec,
    kind: MultiplierKind,
    costs: &CalibratedCosts,
) -> WorkloadReport {
    let unit = costs.get(kind);
    let mut entries = Vec::with_capacity(arch.kernel_inventory.len());
    let mut total_kernels = 0u64;
    let mut total_instances = 0u64;
    let mut total = CostReport {
        slice_registers: 0,
        slice_luts: 0,
        lut_ff_pairs: 0,
        bonded_iobs: 0,
        gate_count: 0,
        register_count: 0,
        depth: 0,
    };
    for &(k, count) in &arch.kernel_inventory {
        let instances = count as u64 * multiplier_count(k);
        let cost = CostReport {
            slice_registers: unit.slice_registers * instances,
            slice_luts: unit.slice_luts * instances,
            lut_ff_pairs: unit.lut_ff_pairs * instances,
            bonded_iobs: unit.bonded_iobs * instances,
            gate_count: 0,
            register_count: 0,
            depth: 0,
        };
        total.slice_registers += cost.slice_registers;
        total.slice_luts += cost.slice_luts;
        total.lut_ff_pairs += cost.lut_ff_pairs;
        total.bonded_iobs += cost.bonded_iobs;
        total_kernels += count as u64;
        total_instances += instances;
        entries.push(WorkloadEntry {
            kernel_size: k,
            kernel_count: count,
            multiplier_instances: instances,
            cost,
        });
    }
    WorkloadReport {
        architecture: arch.name.clone(),
        multiplier: kind,
        total_kernels,
        total_instances,
        entries,
        total,
    }
}
