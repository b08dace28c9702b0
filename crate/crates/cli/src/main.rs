//! Command-line front end: multiplier generation, oracle-checked
//! evaluation, timing, pipelining, the systolic engine, the calibrated
//! resource tables, and CNN workload pricing.
//!
//! Every failure path (oracle mismatch, validation defect, calibration
//! drift, malformed input) exits nonzero with a message naming the
//! failing case. Reports are deterministic; random sweeps take a seed
//! flag with a fixed default.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use karacell_core::bits::BitVec;
use karacell_core::multipliers::{check, generate, Family, KomVariant, MultiplierSpec};
use karacell_core::netlist::{
    critical_path, format, insert_pipeline, simulate_pipelined, CutPolicy, DelayTable, Evaluator,
    Netlist,
};
use karacell_core::systolic::{parse_program, run_program, Instruction, Tensor};
use karacell_core::workload::{
    builtin_arch, calibrate, estimate_matrix_mult_resources, multiplier_count, shipped_rows,
    CostField, MultiplierKind, TABLE_ORDERS,
};
use num_bigint::{BigInt, BigUint, Sign};
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

/// Default seed for `eval --random`, so repeated runs compare equal.
const DEFAULT_SEED: u64 = 1729;

#[derive(Parser)]
#[command(
    name = "karacell",
    about = "Gate-level multiplier generator, systolic engine, and FPGA resource estimator",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a multiplier netlist and write it as JSON.
    Gen(GenArgs),
    /// Evaluate a multiplier on operands, or sweep it against the exact oracle.
    Eval(EvalArgs),
    /// Print the critical-path timing report of a netlist.
    Timing(TimingArgs),
    /// Insert pipeline registers into a combinational netlist.
    Pipeline(PipelineArgs),
    /// Run a systolic engine script against tensor files.
    Systolic(SystolicArgs),
    /// Print the calibrated resource tables and diff them against the shipped data.
    Tables(TablesArgs),
    /// Price a CNN architecture's convolutions on a chosen multiplier.
    Workload(WorkloadArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

fn family_from_name(name: &str) -> Result<Family, String> {
    Family::from_name(name).ok_or_else(|| format!("unknown family {name:?}; expected kom, bw, dadda or array"))
}

fn variant_from_name(name: &str) -> Result<KomVariant, String> {
    match name {
        "three-product" => Ok(KomVariant::ThreeMult),
        "four-product" => Ok(KomVariant::FourMult),
        _ => Err(format!("unknown variant {name:?}; expected three-product or four-product")),
    }
}

fn kind_from_name(name: &str) -> Result<MultiplierKind, String> {
    MultiplierKind::from_name(name)
        .ok_or_else(|| format!("unknown multiplier {name:?}; expected kom16, kom32, bw32 or dadda32"))
}

#[derive(Args)]
struct GenArgs {
    /// Multiplier family: kom, bw, dadda or array.
    #[arg(long, value_parser = family_from_name)]
    family: Family,
    /// Operand width in bits.
    #[arg(long)]
    width: usize,
    /// Recursive split: three-product (default) or four-product.
    #[arg(long, value_parser = variant_from_name)]
    variant: Option<KomVariant>,
    /// Cut the recursive combine ladder into pipeline stages.
    #[arg(long)]
    pipelined: bool,
    /// Netlist output path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Netlist file to evaluate; replaces --family/--width.
    #[arg(long)]
    netlist: Option<PathBuf>,
    /// Multiplier family to generate and evaluate.
    #[arg(long, value_parser = family_from_name)]
    family: Option<Family>,
    /// Operand width in bits.
    #[arg(long)]
    width: Option<usize>,
    /// Recursive split for --family kom.
    #[arg(long, value_parser = variant_from_name)]
    variant: Option<KomVariant>,
    /// Generate the pipelined form.
    #[arg(long)]
    pipelined: bool,
    /// First operand, decimal or 0x-hex.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Second operand, decimal or 0x-hex.
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    /// Sweep every operand pair against the oracle.
    #[arg(long)]
    exhaustive: bool,
    /// Sweep COUNT random pairs against the oracle.
    #[arg(long, value_name = "COUNT")]
    random: Option<usize>,
    /// Seed for --random.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Read operands and product as two's complement. Default: on for
    /// the Baugh-Wooley family (and netlists named bw*), off otherwise.
    #[arg(long, conflicts_with = "unsigned")]
    signed: bool,
    /// Read operands and product as plain binary.
    #[arg(long)]
    unsigned: bool,
}

#[derive(Args)]
struct TimingArgs {
    #[arg(long)]
    netlist: PathBuf,
    /// JSON gate-delay table, {"AND": 1.0, ...}; unit delays when absent.
    #[arg(long)]
    delays: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    netlist: PathBuf,
    /// Largest gate depth allowed inside any stage.
    #[arg(long)]
    max_depth: u32,
    /// Rewritten netlist output path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SystolicArgs {
    /// Engine script (SET_MODE / SET_PARAMS / LOAD_WEIGHTS / RUN).
    #[arg(long)]
    config: PathBuf,
    /// Input tensor file.
    #[arg(long)]
    input: PathBuf,
    /// Tensor whose flattened values fill bare LOAD_WEIGHTS lines.
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Output path for the last run's tensor.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TablesArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct WorkloadArgs {
    /// Architecture: alexnet, vgg16 or vgg19.
    #[arg(long)]
    arch: String,
    /// Multiplier to price with: kom16, kom32, bw32 or dadda32.
    #[arg(long, value_parser = kind_from_name)]
    multiplier: MultiplierKind,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Timing(args) => cmd_timing(args),
        Command::Pipeline(args) => cmd_pipeline(args),
        Command::Systolic(args) => cmd_systolic(args),
        Command::Tables(args) => cmd_tables(args),
        Command::Workload(args) => cmd_workload(args),
    };
    if let Err(err) = outcome {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_netlist(path: &Path) -> Result<Netlist> {
    let nl = format::from_json(&read(path)?)
        .with_context(|| format!("netlist {} is malformed", path.display()))?;
    nl.ensure_valid()
        .with_context(|| format!("netlist {} failed validation", path.display()))?;
    Ok(nl)
}

fn parse_int(text: &str) -> Result<BigInt> {
    let t = text.trim();
    let (negative, digits) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let magnitude = if let Some(hex) = digits.strip_prefix("0x").or_else(|| digits.strip_prefix("0X")) {
        BigUint::parse_bytes(hex.as_bytes(), 16)
    } else {
        BigUint::parse_bytes(digits.as_bytes(), 10)
    }
    .ok_or_else(|| anyhow!("{text:?} is not a decimal or 0x-hex integer"))?;
    let value = BigInt::from(magnitude);
    Ok(if negative { -value } else { value })
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let spec = MultiplierSpec {
        family: args.family,
        width: args.width,
        variant: args.variant,
        pipelined: args.pipelined,
    };
    let nl = generate(&spec)?;
    write(&args.out, &format::to_json(&nl))?;
    println!(
        "wrote {} ({} gates, {} registers, {} stages) to {}",
        nl.name(),
        nl.gates().len(),
        nl.registers().len(),
        nl.stage_count(),
        args.out.display()
    );
    Ok(())
}

/// Encodes one operand onto a bus of the given width.
fn encode(value: &BigInt, width: usize, signed: bool) -> Result<BitVec> {
    if signed {
        BitVec::from_bigint(value, width)
            .map_err(|e| anyhow!("operand {value} does not fit {width} signed bits: {e}"))
    } else {
        if value.sign() == Sign::Minus {
            bail!("operand {value} is negative; pass --signed for two's complement");
        }
        let mag = value.to_biguint().expect("non-negative");
        BitVec::from_biguint(&mag, width)
            .map_err(|e| anyhow!("operand {value} does not fit {width} bits: {e}"))
    }
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    // Resolve the netlist under test.
    let (nl, family) = match (&args.netlist, args.family) {
        (Some(path), None) => {
            if args.width.is_some() || args.variant.is_some() || args.pipelined {
                bail!("--netlist already fixes the design; drop --width/--variant/--pipelined");
            }
            (load_netlist(path)?, None)
        }
        (None, Some(family)) => {
            let width = args.width.context("--family needs --width")?;
            let spec = MultiplierSpec { family, width, variant: args.variant, pipelined: args.pipelined };
            (generate(&spec)?, Some(family))
        }
        (Some(_), Some(_)) => bail!("give either --netlist PATH or --family F --width N, not both"),
        (None, None) => bail!("give either --netlist PATH or --family F --width N"),
    };
    let width = nl
        .input_bus("A")
        .map(|bus| bus.width())
        .context("netlist has no input bus named A")?;

    let signed = if args.signed {
        true
    } else if args.unsigned {
        false
    } else {
        match family {
            Some(f) => f.signed(),
            None => nl.name().starts_with("bw"),
        }
    };

    // Exactly one evaluation mode.
    let single = args.a.is_some() || args.b.is_some();
    match (single, args.exhaustive, args.random.is_some()) {
        (true, false, false) => {
            let a = parse_int(args.a.as_deref().context("--a needs --b")?)?;
            let b = parse_int(args.b.as_deref().context("--b needs --a")?)?;
            let product = run_once(&nl, &encode(&a, width, signed)?, &encode(&b, width, signed)?)?;
            if signed {
                println!("{}", product.to_bigint());
            } else {
                println!("{}", product.to_biguint());
            }
            Ok(())
        }
        (false, true, false) => {
            if width > 8 {
                bail!("--exhaustive covers 4^width pairs; at width {width} use --random COUNT instead");
            }
            let pairs = check::exhaustive_pairs(width);
            report_sweep(&nl, &pairs, signed)
        }
        (false, false, true) => {
            let pairs = check::random_pairs(width, args.random.unwrap(), args.seed);
            report_sweep(&nl, &pairs, signed)
        }
        _ => bail!("pick one of --a/--b, --exhaustive, or --random COUNT"),
    }
}

fn run_once(nl: &Netlist, a: &BitVec, b: &BitVec) -> Result<BitVec> {
    if nl.is_combinational() {
        let mut ev = Evaluator::new(nl)?;
        ev.set_input(0, a);
        ev.set_input(1, b);
        ev.run();
        Ok(ev.output(0))
    } else {
        let stream = vec![BTreeMap::from([
            ("A".to_string(), a.clone()),
            ("B".to_string(), b.clone()),
        ])];
        let run = simulate_pipelined(nl, &stream)?;
        Ok(run.outputs[0]["P"].clone())
    }
}

fn report_sweep(nl: &Netlist, pairs: &[(BigUint, BigUint)], signed: bool) -> Result<()> {
    let outcome = check::check_pairs(nl, pairs, signed)?;
    if outcome.all_passed() {
        println!("{}/{} pass", outcome.passed, outcome.total);
        Ok(())
    } else {
        for f in &outcome.failures {
            eprintln!("mismatch: a={} b={} expected {} got {}", f.a, f.b, f.expected, f.got);
        }
        bail!("{} of {} pairs failed the oracle on {}", outcome.total - outcome.passed, outcome.total, nl.name());
    }
}

fn cmd_timing(args: TimingArgs) -> Result<()> {
    let nl = load_netlist(&args.netlist)?;
    let table = match &args.delays {
        Some(path) => DelayTable::from_json(&read(path)?)
            .with_context(|| format!("delay table {} is malformed", path.display()))?,
        None => DelayTable::unit(),
    };
    let report = critical_path(&nl, &table)?;
    match args.format {
        Format::Machine => println!("{}", serde_json::to_string_pretty(&report)?),
        Format::Text => {
            println!("{}: {} stages", nl.name(), nl.stage_count() + 1);
            for (i, d) in report.per_stage_delay.iter().enumerate() {
                println!("  stage {i}: {d}");
            }
            println!("max stage delay: {}", report.max_stage_delay);
            println!("unpipelined delay: {}", report.total_unpipelined_delay);
            let path: Vec<String> = report.witness_path.iter().map(|g| format!("g{}", g.0)).collect();
            println!("witness: {}", path.join(" -> "));
        }
    }
    Ok(())
}

fn cmd_pipeline(args: PipelineArgs) -> Result<()> {
    let nl = load_netlist(&args.netlist)?;
    let cut = insert_pipeline(&nl, CutPolicy::AtDepth(args.max_depth))?;
    write(&args.out, &format::to_json(&cut))?;
    println!(
        "cut {} into {} stages ({} registers) at depth {}; wrote {}",
        nl.name(),
        cut.stage_count() + 1,
        cut.registers().len(),
        args.max_depth,
        args.out.display()
    );
    Ok(())
}

fn cmd_systolic(args: SystolicArgs) -> Result<()> {
    let mut program = parse_program(&read(&args.config)?)
        .with_context(|| format!("script {} is malformed", args.config.display()))?;
    let input = Tensor::parse(&read(&args.input)?)
        .with_context(|| format!("tensor {} is malformed", args.input.display()))?;

    // A bare LOAD_WEIGHTS line takes its values from the --weights tensor.
    let flat: Option<Vec<i64>> = match &args.weights {
        Some(path) => Some(
            Tensor::parse(&read(path)?)
                .with_context(|| format!("tensor {} is malformed", path.display()))?
                .data()
                .to_vec(),
        ),
        None => None,
    };
    for instr in &mut program {
        if let Instruction::LoadWeights(values) = instr {
            if values.is_empty() {
                match &flat {
                    Some(values_from_file) => *values = values_from_file.clone(),
                    None => bail!("the script has a bare LOAD_WEIGHTS line; pass --weights TENSOR to fill it"),
                }
            }
        }
    }

    let records = run_program(&program, &input)?;
    let last = records.last().context("the script never reached a RUN")?;
    for (i, r) in records.iter().enumerate() {
        let (h, w, c) = r.output.dims();
        let latency = match r.latency {
            Some(cycles) => format!(", latency {cycles} cycles"),
            None => String::new(),
        };
        println!("run {}: {} -> {}x{}x{}, {} multiplications{}", i + 1, r.mode, h, w, c, r.multiplications, latency);
    }
    write(&args.out, &last.output.to_text())?;
    let (h, w, c) = last.output.dims();
    println!("wrote {h}x{w}x{c} tensor to {}", args.out.display());
    Ok(())
}

fn cmd_tables(args: TablesArgs) -> Result<()> {
    let costs = calibrate().context("calibration against the shipped table failed")?;
    let rows = shipped_rows()?;
    let cell = |order, kind, field: CostField| -> u64 {
        rows.iter()
            .find(|r| r.order == order && r.kind == kind && r.field == field)
            .map(|r| r.value)
            .expect("calibrate() checked completeness")
    };

    let mut matched = 0usize;
    let mut total = 0usize;
    let mut cells = Vec::new();
    for order in TABLE_ORDERS {
        for kind in MultiplierKind::ALL {
            let report = estimate_matrix_mult_resources(order, kind, &costs);
            for field in CostField::ALL {
                let model = field.of_report(&report);
                let shipped = cell(order, kind, field);
                total += 1;
                matched += (model == shipped) as usize;
                cells.push((order, kind, field, model, shipped));
            }
        }
    }

    match args.format {
        Format::Machine => {
            let units: BTreeMap<&str, _> =
                MultiplierKind::ALL.iter().map(|&k| (k.name(), costs.get(k))).collect();
            let cells: Vec<_> = cells
                .iter()
                .map(|&(order, kind, field, model, shipped)| {
                    serde_json::json!({
                        "order": order,
                        "kind": kind.label(),
                        "field": field.name(),
                        "model": model,
                        "shipped": shipped,
                    })
                })
                .collect();
            let doc = serde_json::json!({
                "units": units,
                "cells": cells,
                "matched": matched,
                "total": total,
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        Format::Text => {
            println!("unit costs per multiplier (slice_registers slice_luts lut_ff_pairs bonded_iobs)");
            for kind in MultiplierKind::ALL {
                let u = costs.get(kind);
                println!("  {kind}: {} {} {} {}", u.slice_registers, u.slice_luts, u.lut_ff_pairs, u.bonded_iobs);
            }
            for order in TABLE_ORDERS {
                println!("{order}\u{d7}{order} matrix product, {} multipliers of each kind", multiplier_count(order));
                for kind in MultiplierKind::ALL {
                    let report = estimate_matrix_mult_resources(order, kind, &costs);
                    println!(
                        "  {order}\u{d7}{order}, {kind}: {} {} {} {}",
                        report.slice_registers, report.slice_luts, report.lut_ff_pairs, report.bonded_iobs
                    );
                }
            }
            println!("{matched}/{total} cells match");
        }
    }
    if matched != total {
        bail!("{} of {total} cells diverge from the shipped table", total - matched);
    }
    Ok(())
}

fn cmd_workload(args: WorkloadArgs) -> Result<()> {
    let arch = builtin_arch(&args.arch)?;
    let costs = calibrate().context("calibration against the shipped table failed")?;
    let report = karacell_core::workload::workload_report(&arch, args.multiplier, &costs);
    match args.format {
        Format::Machine => println!("{}", serde_json::to_string_pretty(&report)?),
        Format::Text => {
            let (h, w, c) = arch.input_dims;
            println!("{} priced on {}", report.architecture, report.multiplier);
            println!("  input {h}x{w}x{c}, {} convolutional layers", arch.conv_layers);
            for e in &report.entries {
                println!(
                    "  {}\u{d7}{} kernels \u{d7}{}: {} multipliers -> {} {} {} {}",
                    e.kernel_size,
                    e.kernel_size,
                    e.kernel_count,
                    e.multiplier_instances,
                    e.cost.slice_registers,
                    e.cost.slice_luts,
                    e.cost.lut_ff_pairs,
                    e.cost.bonded_iobs
                );
            }
            println!("  total: {} kernels, {} multiplier instances", report.total_kernels, report.total_instances);
            println!(
                "  resources: {} {} {} {}",
                report.total.slice_registers, report.total.slice_luts, report.total.lut_ff_pairs, report.total.bonded_iobs
            );
            println!("  columns: slice_registers slice_luts lut_ff_pairs bonded_iobs");
        }
    }
    Ok(())
}
