//! The acceptance gate: one test per top-level claim the crate makes.
//! Each prints an `ACCEPTANCE PASS` line once its checks hold; run with
//! `cargo test --test acceptance -- --nocapture` to see them all.

use karacell_core::bits::BitVec;
use karacell_core::multipliers::{
    check, count_base_multipliers, generate, Family, KomVariant, MultiplierSpec,
};
use karacell_core::netlist::{critical_path, evaluate, format, simulate_pipelined, DelayTable, Evaluator};
use karacell_core::systolic::{run_conv2d, run_fir, run_matmul, Tensor};
use karacell_core::workload::{
    builtin_arch, calibrate, estimate_matrix_mult_resources, multiplier_count, shipped_rows,
    workload_report, CostField, MultiplierKind,
};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::collections::BTreeMap;

fn pass(line: &str) {
    println!("ACCEPTANCE PASS: {line}");
}

fn spec(family: Family, width: usize) -> MultiplierSpec {
    MultiplierSpec::new(family, width)
}

#[test]
fn criterion_1_table_reproduction() {
    let costs = calibrate().expect("calibration divides the base cells by 27 exactly");
    let rows = shipped_rows().expect("shipped table parses");
    assert_eq!(rows.len(), 64);
    for row in &rows {
        let report = estimate_matrix_mult_resources(row.order, row.kind, &costs);
        assert_eq!(
            row.field.of_report(&report),
            row.value,
            "cell ({}, {}, {})",
            row.order,
            row.kind,
            row.field
        );
    }
    pass("table reproduction: all 64 calibrated cells match the shipped data with zero tolerance");
}

#[test]
fn criterion_2_multiplier_functional_correctness() {
    let families = [Family::Recursive, Family::BaughWooley, Family::Dadda, Family::Array];

    for width in [2usize, 4, 8] {
        let pairs = check::exhaustive_pairs(width);
        for family in families {
            let nl = generate(&spec(family, width)).unwrap();
            let outcome = check::check_pairs(&nl, &pairs, family.signed()).unwrap();
            assert!(
                outcome.all_passed(),
                "{} failed exhaustive width {width}: {:?}",
                nl.name(),
                outcome.failures.first()
            );
            // The exhaustive set includes the signed corner
            // (-2^(n-1)) x (-2^(n-1)) for the signed family.
        }
    }

    for width in [16usize, 32] {
        let mut pairs = check::random_pairs(width, 100_000, 0xACCE97 ^ width as u64);
        let most_negative = BigUint::from(1u8) << (width - 1);
        pairs.push((most_negative.clone(), most_negative));
        for family in families {
            let nl = generate(&spec(family, width)).unwrap();
            let outcome = check::check_pairs(&nl, &pairs, family.signed()).unwrap();
            assert!(
                outcome.all_passed(),
                "{} failed random width {width}: {:?}",
                nl.name(),
                outcome.failures.first()
            );
        }
    }
    pass("multiplier correctness: exhaustive at widths 2/4/8 and 100001 random pairs at 16/32, all four families, zero mismatches");
}

#[test]
fn criterion_3_recursive_structure() {
    for n in [4usize, 8, 16, 32] {
        let k = n.trailing_zeros() as u32 - 1;
        let three = {
            let mut s = spec(Family::Recursive, n);
            s.variant = Some(KomVariant::ThreeMult);
            count_base_multipliers(&generate(&s).unwrap())
        };
        let four = {
            let mut s = spec(Family::Recursive, n);
            s.variant = Some(KomVariant::FourMult);
            count_base_multipliers(&generate(&s).unwrap())
        };
        assert_eq!(three, 3usize.pow(k), "three-product at width {n}");
        assert_eq!(four, 4usize.pow(k), "four-product at width {n}");
        assert!(three < four, "width {n}");
    }
    pass("recursive structure: 3^k vs 4^k base multipliers for n in {4,8,16,32}, three-product strictly fewer");
}

fn fir_oracle(h: &[i64], x: &[i64]) -> Vec<i64> {
    (0..x.len())
        .map(|i| h.iter().enumerate().map(|(j, &hv)| if i >= j { hv * x[i - j] } else { 0 }).sum())
        .collect()
}

fn matmul_oracle(a: &Tensor, b: &Tensor) -> Vec<i64> {
    let (n, _, _) = a.dims();
    let mut out = vec![0i64; n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out[i * n + j] += a.at(i, k, 0) * b.at(k, j, 0);
            }
        }
    }
    out
}

fn conv2d_oracle(image: &Tensor, kernel: &Tensor) -> Vec<i64> {
    let (ih, iw, c) = image.dims();
    let (kh, kw, _) = kernel.dims();
    let (oh, ow) = (ih - kh + 1, iw - kw + 1);
    let mut out = vec![0i64; oh * ow];
    for oy in 0..oh {
        for ox in 0..ow {
            let mut acc = 0i64;
            for dy in 0..kh {
                for dx in 0..kw {
                    for ch in 0..c {
                        acc += image.at(oy + dy, ox + dx, ch) * kernel.at(dy, dx, ch);
                    }
                }
            }
            out[oy * ow + ox] = acc;
        }
    }
    out
}

fn random_values(rng: &mut ChaCha12Rng, len: usize) -> Vec<i64> {
    (0..len).map(|_| rng.gen_range(-50..=50)).collect()
}

#[test]
fn criterion_4_systolic_equivalence() {
    let mut rng = ChaCha12Rng::seed_from_u64(0x5157);

    for _ in 0..100 {
        let k = rng.gen_range(1..=6);
        let n = rng.gen_range(1..=24);
        let h = random_values(&mut rng, k);
        let x = random_values(&mut rng, n);
        let run = run_fir(&h, &x).unwrap();
        assert_eq!(run.y, fir_oracle(&h, &x));
        assert_eq!(run.latency, k, "first output after exactly K cycles");
    }

    for n in [1usize, 3, 5, 7, 11] {
        let a = Tensor::new(n, n, 1, random_values(&mut rng, n * n)).unwrap();
        let b = Tensor::new(n, n, 1, random_values(&mut rng, n * n)).unwrap();
        let run = run_matmul(&a, &b).unwrap();
        assert_eq!(run.product.data(), matmul_oracle(&a, &b));
        assert_eq!(run.multiplications, (n * n * n) as u64, "exactly n^3 multiplications");
    }

    for _ in 0..50 {
        let (kh, kw, c) = (rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(1..=3));
        let (ih, iw) = (kh + rng.gen_range(0..=5), kw + rng.gen_range(0..=5));
        let image = Tensor::new(ih, iw, c, random_values(&mut rng, ih * iw * c)).unwrap();
        let kernel = Tensor::new(kh, kw, c, random_values(&mut rng, kh * kw * c)).unwrap();
        let run = run_conv2d(&image, &kernel).unwrap();
        assert_eq!(run.map.data(), conv2d_oracle(&image, &kernel));
    }
    let ones = Tensor::filled(5, 5, 3, 1).unwrap();
    let kernel = Tensor::filled(3, 3, 3, 1).unwrap();
    let run = run_conv2d(&ones, &kernel).unwrap();
    assert_eq!(run.map.dims(), (3, 3, 1));
    assert!(run.map.data().iter().all(|&v| v == 27));

    pass("systolic equivalence: 100 FIR instances with latency K, matmul at n in {1,3,5,7,11} with n^3 multiplications, 50 conv2d instances plus the 5x5x3 all-ones case");
}

#[test]
fn criterion_5_pipelining() {
    for width in [16usize, 32] {
        let comb = generate(&spec(Family::Recursive, width)).unwrap();
        let piped = {
            let mut s = spec(Family::Recursive, width);
            s.pipelined = true;
            generate(&s).unwrap()
        };
        let stages = width.trailing_zeros() - 1;
        assert_eq!(piped.stage_count(), stages);

        let pairs = check::random_pairs(width, 10_000, 0xF1FE ^ width as u64);
        let stream: Vec<BTreeMap<String, BitVec>> = pairs
            .iter()
            .map(|(a, b)| {
                BTreeMap::from([
                    ("A".to_string(), BitVec::from_biguint(a, width).unwrap()),
                    ("B".to_string(), BitVec::from_biguint(b, width).unwrap()),
                ])
            })
            .collect();
        let run = simulate_pipelined(&piped, &stream).unwrap();
        assert_eq!(run.latency, stages, "outputs shifted by exactly stage_count cycles");

        let mut ev = Evaluator::new(&comb).unwrap();
        for (i, (a, b)) in pairs.iter().enumerate() {
            ev.set_input(0, &BitVec::from_biguint(a, width).unwrap());
            ev.set_input(1, &BitVec::from_biguint(b, width).unwrap());
            ev.run();
            assert_eq!(run.outputs[i]["P"], ev.output(0), "pair {i} at width {width}");
        }
    }

    let unit = DelayTable::unit();
    let piped_kom32 = {
        let mut s = spec(Family::Recursive, 32);
        s.pipelined = true;
        generate(&s).unwrap()
    };
    let kom_stage = critical_path(&piped_kom32, &unit).unwrap().max_stage_delay;
    let bw_total = critical_path(&generate(&spec(Family::BaughWooley, 32)).unwrap(), &unit)
        .unwrap()
        .total_unpipelined_delay;
    let dadda_total = critical_path(&generate(&spec(Family::Dadda, 32)).unwrap(), &unit)
        .unwrap()
        .total_unpipelined_delay;
    assert!(
        kom_stage < bw_total && bw_total < dadda_total,
        "depth ordering violated: recursive stage {kom_stage}, bw {bw_total}, dadda {dadda_total}"
    );

    pass("pipelining: pipelined recursive multipliers match combinational outputs on 10000 pairs at widths 16/32 with latency stage_count, and stage depth orders recursive < bw < dadda under unit delays");
}

#[test]
fn criterion_6_workload_model() {
    let costs = calibrate().unwrap();

    let alexnet = builtin_arch("alexnet").unwrap();
    assert_eq!(alexnet.kernel_inventory, vec![(11, 96), (5, 256), (3, 1024)]);
    assert_eq!(alexnet.input_dims, (227, 227, 3));
    let vgg16 = builtin_arch("vgg16").unwrap();
    assert_eq!(vgg16.kernel_inventory, vec![(3, 3968)]);
    let vgg19 = builtin_arch("vgg19").unwrap();
    assert_eq!(vgg19.kernel_inventory, vec![(3, 4992)]);

    for arch in [&alexnet, &vgg16, &vgg19] {
        for kind in MultiplierKind::ALL {
            let report = workload_report(arch, kind, &costs);
            for (entry, &(k, count)) in report.entries.iter().zip(&arch.kernel_inventory) {
                assert_eq!(entry.multiplier_instances, count as u64 * multiplier_count(k));
            }
            for field in CostField::ALL {
                let sum: u64 = report.entries.iter().map(|e| field.of_report(&e.cost)).sum();
                assert_eq!(field.of_report(&report.total), sum, "conservation of {field}");
            }
            let instances: u64 = report.entries.iter().map(|e| e.multiplier_instances).sum();
            assert_eq!(report.total_instances, instances);
        }
    }

    pass("workload model: built-in inventories match exactly; aggregates equal count x k^3 sums with row conservation");
}

#[test]
fn criterion_7_netlist_interchange() {
    let mut specs = vec![
        spec(Family::BaughWooley, 16),
        spec(Family::Dadda, 16),
        spec(Family::Array, 16),
    ];
    let mut three = spec(Family::Recursive, 16);
    three.variant = Some(KomVariant::ThreeMult);
    specs.push(three);
    let mut four = spec(Family::Recursive, 16);
    four.variant = Some(KomVariant::FourMult);
    specs.push(four);

    for s in &specs {
        let nl = generate(s).unwrap();
        let back = format::from_json(&format::to_json(&nl)).unwrap();
        for (i, (a, b)) in check::random_pairs(s.width, 100, 0x707 + s.width as u64).iter().enumerate() {
            let assignment = BTreeMap::from([
                ("A".to_string(), BitVec::from_biguint(a, s.width).unwrap()),
                ("B".to_string(), BitVec::from_biguint(b, s.width).unwrap()),
            ]);
            let original = evaluate(&nl, &assignment).unwrap();
            let round_tripped = evaluate(&back, &assignment).unwrap();
            assert_eq!(original, round_tripped, "{} assignment {i}", nl.name());
        }
    }

    // The pipelined form round-trips its registers too.
    let mut piped_spec = spec(Family::Recursive, 16);
    piped_spec.pipelined = true;
    let piped = generate(&piped_spec).unwrap();
    let back = format::from_json(&format::to_json(&piped)).unwrap();
    assert_eq!(back.stage_count(), piped.stage_count());
    let stream: Vec<BTreeMap<String, BitVec>> = check::random_pairs(16, 100, 0x717)
        .iter()
        .map(|(a, b)| {
            BTreeMap::from([
                ("A".to_string(), BitVec::from_biguint(a, 16).unwrap()),
                ("B".to_string(), BitVec::from_biguint(b, 16).unwrap()),
            ])
        })
        .collect();
    let original = simulate_pipelined(&piped, &stream).unwrap();
    let round_tripped = simulate_pipelined(&back, &stream).unwrap();
    for (a, b) in original.outputs.iter().zip(&round_tripped.outputs) {
        assert_eq!(a, b);
    }

    pass("netlist interchange: JSON round trip preserves evaluation on 100 random assignments per generated multiplier, pipelined form included");
}
