//! Python module over the core crate: multiplier generation and
//! oracle-checked evaluation, netlist timing/pipelining/interchange, the
//! systolic engine, and the calibrated CNN resource model.

use karacell_core::bits::BitVec;
use karacell_core::multipliers::{self, check, Family, KomVariant, MultiplierSpec};
use karacell_core::netlist::{
    cost_report, critical_path, format, insert_pipeline, simulate_pipelined, CostModel, CostReport,
    CutPolicy, DelayTable, Evaluator, GateKind, Netlist,
};
use karacell_core::systolic::{self, Activation, PoolMode, Tensor};
use karacell_core::workload::{self, CostField, MultiplierKind};
use num_bigint::BigInt;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use std::collections::BTreeMap;

fn value_err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn report_dict(report: &CostReport) -> BTreeMap<String, u64> {
    BTreeMap::from([
        ("slice_registers".to_string(), report.slice_registers),
        ("slice_luts".to_string(), report.slice_luts),
        ("lut_ff_pairs".to_string(), report.lut_ff_pairs),
        ("bonded_iobs".to_string(), report.bonded_iobs),
        ("gate_count".to_string(), report.gate_count),
        ("register_count".to_string(), report.register_count),
        ("depth".to_string(), report.depth),
    ])
}

/// A gate-level netlist with optional pipeline registers.
#[pyclass(frozen, name = "Netlist")]
struct PyNetlist {
    inner: Netlist,
}

#[pymethods]
impl PyNetlist {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = format::from_json(text).map_err(value_err)?;
        inner.ensure_valid().map_err(value_err)?;
        Ok(PyNetlist { inner })
    }

    fn to_json(&self) -> String {
        format::to_json(&self.inner)
    }

    #[getter]
    fn name(&self) -> &str {
        self.inner.name()
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.input_bus("A").map(|b| b.width()).unwrap_or(0)
    }

    #[getter]
    fn gate_count(&self) -> usize {
        self.inner.gates().len()
    }

    #[getter]
    fn register_count(&self) -> usize {
        self.inner.registers().len()
    }

    #[getter]
    fn stage_count(&self) -> u32 {
        self.inner.stage_count()
    }

    #[getter]
    fn is_combinational(&self) -> bool {
        self.inner.is_combinational()
    }

    /// Multiplies two integers on the netlist. `signed` defaults to the
    /// design's own convention (two's complement for bw* netlists).
    #[pyo3(signature = (a, b, signed=None))]
    fn multiply(&self, a: BigInt, b: BigInt, signed: Option<bool>) -> PyResult<BigInt> {
        let signed = signed.unwrap_or_else(|| self.inner.name().starts_with("bw"));
        let width = self.width();
        let encode = |v: &BigInt| -> PyResult<BitVec> {
            if signed {
                BitVec::from_bigint(v, width).map_err(value_err)
            } else {
                let mag = v.to_biguint().ok_or_else(|| {
                    value_err(format!("operand {v} is negative; pass signed=True"))
                })?;
                BitVec::from_biguint(&mag, width).map_err(value_err)
            }
        };
        let (a, b) = (encode(&a)?, encode(&b)?);
        let product = if self.inner.is_combinational() {
            let mut ev = Evaluator::new(&self.inner).map_err(value_err)?;
            ev.set_input(0, &a);
            ev.set_input(1, &b);
            ev.run();
            ev.output(0)
        } else {
            let stream = vec![BTreeMap::from([("A".to_string(), a), ("B".to_string(), b)])];
            let run = simulate_pipelined(&self.inner, &stream).map_err(value_err)?;
            run.outputs[0]["P"].clone()
        };
        Ok(if signed { product.to_bigint() } else { product.to_biguint().into() })
    }

    /// Checks `count` seeded random operand pairs against the exact
    /// product; returns (passed, total).
    #[pyo3(signature = (count, seed=1729, signed=None))]
    fn sweep_random(&self, count: usize, seed: u64, signed: Option<bool>) -> PyResult<(u64, u64)> {
        let signed = signed.unwrap_or_else(|| self.inner.name().starts_with("bw"));
        let pairs = check::random_pairs(self.width(), count, seed);
        let outcome = check::check_pairs(&self.inner, &pairs, signed).map_err(value_err)?;
        Ok((outcome.passed, outcome.total))
    }

    /// Checks every operand pair (width <= 8) against the exact product;
    /// returns (passed, total).
    #[pyo3(signature = (signed=None))]
    fn sweep_exhaustive(&self, signed: Option<bool>) -> PyResult<(u64, u64)> {
        let width = self.width();
        if width > 8 {
            return Err(value_err(format!("exhaustive sweeps cover 4^width pairs; width {width} is too wide")));
        }
        let signed = signed.unwrap_or_else(|| self.inner.name().starts_with("bw"));
        let pairs = check::exhaustive_pairs(width);
        let outcome = check::check_pairs(&self.inner, &pairs, signed).map_err(value_err)?;
        Ok((outcome.passed, outcome.total))
    }

    /// Base (leaf) multipliers reachable in a recursive build.
    fn count_base_multipliers(&self) -> usize {
        multipliers::count_base_multipliers(&self.inner)
    }

    /// Cuts the combinational netlist so no stage exceeds `max_depth`
    /// gate levels.
    fn insert_pipeline(&self, max_depth: u32) -> PyResult<PyNetlist> {
        let inner = insert_pipeline(&self.inner, CutPolicy::AtDepth(max_depth)).map_err(value_err)?;
        Ok(PyNetlist { inner })
    }

    /// Removes every register, collapsing the pipeline.
    fn flatten(&self) -> PyNetlist {
        PyNetlist { inner: karacell_core::netlist::flatten(&self.inner) }
    }

    /// Critical-path report under per-gate-kind delays (unit by default).
    #[pyo3(signature = (delays=None))]
    fn critical_path(&self, delays: Option<BTreeMap<String, f64>>) -> PyResult<PyTimingReport> {
        let table = match delays {
            None => DelayTable::unit(),
            Some(map) => {
                let mut table = DelayTable::empty();
                for (name, delay) in map {
                    let kind = GateKind::from_name(&name)
                        .ok_or_else(|| value_err(format!("unknown gate kind {name:?}")))?;
                    table.set(kind, delay);
                }
                table
            }
        };
        let report = critical_path(&self.inner, &table).map_err(value_err)?;
        Ok(PyTimingReport {
            per_stage_delay: report.per_stage_delay,
            max_stage_delay: report.max_stage_delay,
            total_unpipelined_delay: report.total_unpipelined_delay,
        })
    }

    /// Structural resource counts as a dict.
    fn cost_report(&self) -> PyResult<BTreeMap<String, u64>> {
        let report = cost_report(&self.inner, CostModel::Structural).map_err(value_err)?;
        Ok(report_dict(&report))
    }

    fn __repr__(&self) -> String {
        format!(
            "Netlist({}, {} gates, {} registers, {} stages)",
            self.inner.name(),
            self.inner.gates().len(),
            self.inner.registers().len(),
            self.inner.stage_count()
        )
    }
}

/// Longest-path summary of a netlist.
#[pyclass(frozen, name = "TimingReport")]
struct PyTimingReport {
    #[pyo3(get)]
    per_stage_delay: Vec<f64>,
    #[pyo3(get)]
    max_stage_delay: f64,
    #[pyo3(get)]
    total_unpipelined_delay: f64,
}

#[pymethods]
impl PyTimingReport {
    fn __repr__(&self) -> String {
        format!(
            "TimingReport(max_stage_delay={}, total_unpipelined_delay={})",
            self.max_stage_delay, self.total_unpipelined_delay
        )
    }
}

/// An H x W x C integer tensor, row-major with channels last.
#[pyclass(frozen, name = "Tensor")]
#[derive(Clone)]
struct PyTensor {
    inner: Tensor,
}

#[pymethods]
impl PyTensor {
    #[new]
    fn new(h: usize, w: usize, c: usize, data: Vec<i64>) -> PyResult<Self> {
        Ok(PyTensor { inner: Tensor::new(h, w, c, data).map_err(value_err)? })
    }

    #[staticmethod]
    fn row(data: Vec<i64>) -> PyResult<Self> {
        Ok(PyTensor { inner: Tensor::row(data).map_err(value_err)? })
    }

    #[staticmethod]
    fn filled(h: usize, w: usize, c: usize, value: i64) -> PyResult<Self> {
        Ok(PyTensor { inner: Tensor::filled(h, w, c, value).map_err(value_err)? })
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyTensor { inner: Tensor::parse(text).map_err(value_err)? })
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[getter]
    fn dims(&self) -> (usize, usize, usize) {
        self.inner.dims()
    }

    #[getter]
    fn data(&self) -> Vec<i64> {
        self.inner.data().to_vec()
    }

    fn at(&self, y: usize, x: usize, ch: usize) -> PyResult<i64> {
        let (h, w, c) = self.inner.dims();
        if y >= h || x >= w || ch >= c {
            return Err(value_err(format!("index ({y}, {x}, {ch}) outside {h}x{w}x{c}")));
        }
        Ok(self.inner.at(y, x, ch))
    }

    fn __repr__(&self) -> String {
        let (h, w, c) = self.inner.dims();
        format!("Tensor({h}x{w}x{c})")
    }
}

/// One RUN of a systolic engine script.
#[pyclass(frozen, name = "RunRecord")]
struct PyRunRecord {
    #[pyo3(get)]
    mode: String,
    #[pyo3(get)]
    output: PyTensor,
    #[pyo3(get)]
    multiplications: u64,
    #[pyo3(get)]
    latency: Option<usize>,
}

#[pymethods]
impl PyRunRecord {
    fn __repr__(&self) -> String {
        let (h, w, c) = self.output.inner.dims();
        format!("RunRecord({}, {h}x{w}x{c}, {} multiplications)", self.mode, self.multiplications)
    }
}

/// Generates a multiplier netlist.
///
/// family: "kom", "bw", "dadda" or "array"; variant: "three-product"
/// (default) or "four-product", recursive family only; pipelined cuts
/// the recursive combine ladder into stages.
#[pyfunction]
#[pyo3(signature = (family, width, variant=None, pipelined=false))]
fn generate(family: &str, width: usize, variant: Option<&str>, pipelined: bool) -> PyResult<PyNetlist> {
    let family = Family::from_name(family)
        .ok_or_else(|| value_err(format!("unknown family {family:?}; expected kom, bw, dadda or array")))?;
    let variant = match variant {
        None => None,
        Some("three-product") => Some(KomVariant::ThreeMult),
        Some("four-product") => Some(KomVariant::FourMult),
        Some(other) => {
            return Err(value_err(format!(
                "unknown variant {other:?}; expected three-product or four-product"
            )))
        }
    };
    let spec = MultiplierSpec { family, width, variant, pipelined };
    Ok(PyNetlist { inner: multipliers::generate(&spec).map_err(value_err)? })
}

/// Streams x through a weight-stationary MAC chain holding taps h;
/// returns (y, latency_cycles, multiplications).
#[pyfunction]
fn run_fir(h: Vec<i64>, x: Vec<i64>) -> PyResult<(Vec<i64>, usize, u64)> {
    let run = systolic::run_fir(&h, &x).map_err(value_err)?;
    Ok((run.y, run.latency, run.multiplications))
}

/// Multiplies two square single-channel tensors; returns (product,
/// multiplications).
#[pyfunction]
fn run_matmul(a: &PyTensor, b: &PyTensor) -> PyResult<(PyTensor, u64)> {
    let run = systolic::run_matmul(&a.inner, &b.inner).map_err(value_err)?;
    Ok((PyTensor { inner: run.product }, run.multiplications))
}

/// Valid 2-D convolution via im2col; returns (map, multiplications).
#[pyfunction]
fn run_conv2d(image: &PyTensor, kernel: &PyTensor) -> PyResult<(PyTensor, u64)> {
    let run = systolic::run_conv2d(&image.inner, &kernel.inner).map_err(value_err)?;
    Ok((PyTensor { inner: run.map }, run.multiplications))
}

/// Non-overlapping ph x pw pooling; mode is "max" or "avg".
#[pyfunction]
#[pyo3(signature = (map, ph, pw, mode="max"))]
fn run_pool(map: &PyTensor, ph: usize, pw: usize, mode: &str) -> PyResult<PyTensor> {
    let mode = match mode {
        "max" => PoolMode::Max,
        "avg" => PoolMode::Avg,
        other => return Err(value_err(format!("unknown pool mode {other:?}; expected max or avg"))),
    };
    Ok(PyTensor { inner: systolic::run_pool(&map.inner, ph, pw, mode).map_err(value_err)? })
}

/// Fully-connected layer out[i] = activation(W[i] . x + b[i]); weights
/// is an m x d x 1 tensor, activation "relu" or "identity".
#[pyfunction]
#[pyo3(signature = (weights, x, bias, activation="relu"))]
fn run_fc(weights: &PyTensor, x: Vec<i64>, bias: Vec<i64>, activation: &str) -> PyResult<Vec<i64>> {
    let activation = match activation {
        "relu" => Activation::Relu,
        "identity" => Activation::Identity,
        other => {
            return Err(value_err(format!("unknown activation {other:?}; expected relu or identity")))
        }
    };
    systolic::run_fc(&weights.inner, &x, &bias, activation).map_err(value_err)
}

/// Parses and runs an engine script (SET_MODE / SET_PARAMS /
/// LOAD_WEIGHTS / RUN) against an input tensor. Bare LOAD_WEIGHTS lines
/// take `weights`.
#[pyfunction]
#[pyo3(signature = (script, input, weights=None))]
fn run_program(script: &str, input: &PyTensor, weights: Option<Vec<i64>>) -> PyResult<Vec<PyRunRecord>> {
    let mut program = systolic::parse_program(script).map_err(value_err)?;
    for instr in &mut program {
        if let systolic::Instruction::LoadWeights(values) = instr {
            if values.is_empty() {
                match &weights {
                    Some(w) => *values = w.clone(),
                    None => return Err(value_err("the script has a bare LOAD_WEIGHTS line; pass weights=")),
                }
            }
        }
    }
    let records = systolic::run_program(&program, &input.inner).map_err(value_err)?;
    Ok(records
        .into_iter()
        .map(|r| PyRunRecord {
            mode: r.mode.name().to_string(),
            output: PyTensor { inner: r.output },
            multiplications: r.multiplications,
            latency: r.latency,
        })
        .collect())
}

fn kind_from_name(name: &str) -> PyResult<MultiplierKind> {
    MultiplierKind::from_name(name)
        .ok_or_else(|| value_err(format!("unknown multiplier {name:?}; expected kom16, kom32, bw32 or dadda32")))
}

/// Per-multiplier unit costs calibrated from the shipped table, as
/// {kind: {field: value}}.
#[pyfunction]
fn unit_costs() -> PyResult<BTreeMap<String, BTreeMap<String, u64>>> {
    let costs = workload::calibrate().map_err(value_err)?;
    Ok(MultiplierKind::ALL
        .iter()
        .map(|&kind| {
            let unit = costs.get(kind);
            let fields = CostField::ALL
                .iter()
                .map(|&f| (f.name().to_string(), f.of_unit(unit)))
                .collect();
            (kind.name().to_string(), fields)
        })
        .collect())
}

/// The shipped resource table as (order, kind, field, value) rows.
#[pyfunction]
fn table_rows() -> PyResult<Vec<(usize, String, String, u64)>> {
    Ok(workload::shipped_rows()
        .map_err(value_err)?
        .into_iter()
        .map(|r| (r.order, r.kind.label().to_string(), r.field.name().to_string(), r.value))
        .collect())
}

/// Multipliers needed for an order-n matrix product: n**3.
#[pyfunction]
fn multiplier_count(n: usize) -> u64 {
    workload::multiplier_count(n)
}

/// Calibrated resources for an order-n matrix product on the given
/// multiplier kind, as a dict.
#[pyfunction]
fn estimate_matrix_mult(n: usize, kind: &str) -> PyResult<BTreeMap<String, u64>> {
    let kind = kind_from_name(kind)?;
    let costs = workload::calibrate().map_err(value_err)?;
    let report = workload::estimate_matrix_mult_resources(n, kind, &costs);
    Ok(CostField::ALL.iter().map(|&f| (f.name().to_string(), f.of_report(&report))).collect())
}

/// Convolution workload report for a built-in architecture ("alexnet",
/// "vgg16", "vgg19") priced on one multiplier kind.
#[pyfunction]
fn workload_report(arch: &str, kind: &str) -> PyResult<BTreeMap<String, PyObject>> {
    let kind = kind_from_name(kind)?;
    let arch = workload::builtin_arch(arch).map_err(value_err)?;
    let costs = workload::calibrate().map_err(value_err)?;
    let report = workload::workload_report(&arch, kind, &costs);
    Python::with_gil(|py| {
        let entries: Vec<BTreeMap<String, u64>> = report
            .entries
            .iter()
            .map(|e| {
                let mut row = BTreeMap::from([
                    ("kernel_size".to_string(), e.kernel_size as u64),
                    ("kernel_count".to_string(), e.kernel_count as u64),
                    ("multiplier_instances".to_string(), e.multiplier_instances),
                ]);
                for field in CostField::ALL {
                    row.insert(field.name().to_string(), field.of_report(&e.cost));
                }
                row
            })
            .collect();
        let totals: BTreeMap<String, u64> =
            CostField::ALL.iter().map(|&f| (f.name().to_string(), f.of_report(&report.total))).collect();
        Ok(BTreeMap::from([
            ("architecture".to_string(), report.architecture.into_py(py)),
            ("multiplier".to_string(), report.multiplier.name().into_py(py)),
            ("total_kernels".to_string(), report.total_kernels.into_py(py)),
            ("total_instances".to_string(), report.total_instances.into_py(py)),
            ("entries".to_string(), entries.into_py(py)),
            ("total".to_string(), totals.into_py(py)),
        ]))
    })
}

#[pymodule]
fn karacell(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyNetlist>()?;
    m.add_class::<PyTimingReport>()?;
    m.add_class::<PyTensor>()?;
    m.add_class::<PyRunRecord>()?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(run_fir, m)?)?;
    m.add_function(wrap_pyfunction!(run_matmul, m)?)?;
    m.add_function(wrap_pyfunction!(run_conv2d, m)?)?;
    m.add_function(wrap_pyfunction!(run_pool, m)?)?;
    m.add_function(wrap_pyfunction!(run_fc, m)?)?;
    m.add_function(wrap_pyfunction!(run_program, m)?)?;
    m.add_function(wrap_pyfunction!(unit_costs, m)?)?;
    m.add_function(wrap_pyfunction!(table_rows, m)?)?;
    m.add_function(wrap_pyfunction!(multiplier_count, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_matrix_mult, m)?)?;
    m.add_function(wrap_pyfunction!(workload_report, m)?)?;
    Ok(())
}
