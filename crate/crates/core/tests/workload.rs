//! Calibration and workload-estimate checks against the shipped
//! resource table.

use karacell_core::netlist::UnitCost;
use karacell_core::workload::{
    builtin_arch, calibrate, calibrate_from, estimate_matrix_mult_resources, multiplier_count,
    parse_rows, shipped_rows, workload_report, CalibrationError, CostField, MultiplierKind,
    TableRow, UnknownArch, TABLE_ORDERS,
};

fn units(kind: MultiplierKind) -> UnitCost {
    let costs = calibrate().expect("shipped table calibrates");
    costs.get(kind).clone()
}

#[test]
fn shipped_table_has_all_sixty_four_cells() {
    let rows = shipped_rows().expect("shipped table parses");
    assert_eq!(rows.len(), 64);
    for order in TABLE_ORDERS {
        for kind in MultiplierKind::ALL {
            for field in CostField::ALL {
                assert!(
                    rows.iter()
                        .any(|r| r.order == order && r.kind == kind && r.field == field),
                    "missing ({order}, {kind}, {field})"
                );
            }
        }
    }
}

#[test]
fn calibration_recovers_the_unit_costs() {
    let expect = |kind, sr, sl, lf, io| {
        let u = units(kind);
        assert_eq!(
            (u.slice_registers, u.slice_luts, u.lut_ff_pairs, u.bonded_iobs),
            (sr, sl, lf, io),
            "unit costs for {kind}"
        );
    };
    expect(MultiplierKind::Kom16, 192, 616, 160, 65);
    expect(MultiplierKind::Kom32, 948, 1973, 948, 129);
    expect(MultiplierKind::Bw32, 227, 2609, 67, 137);
    expect(MultiplierKind::Dadda32, 0, 2040, 0, 128);
}

#[test]
fn every_table_cell_matches_the_cubic_model() {
    let costs = calibrate().unwrap();
    let rows = shipped_rows().unwrap();
    for row in &rows {
        let predicted = row.field.of_unit(costs.get(row.kind)) * (row.order as u64).pow(3);
        assert_eq!(
            row.value, predicted,
            "cell ({}, {}, {})",
            row.order, row.kind, row.field
        );
    }
}

#[test]
fn estimates_reproduce_known_rows() {
    let costs = calibrate().unwrap();
    let check = |n, kind, expected: [u64; 4]| {
        let report = estimate_matrix_mult_resources(n, kind, &costs);
        assert_eq!(
            [report.slice_registers, report.slice_luts, report.lut_ff_pairs, report.bonded_iobs],
            expected,
            "order {n} on {kind}"
        );
        assert_eq!((report.gate_count, report.register_count, report.depth), (0, 0, 0));
    };
    check(3, MultiplierKind::Kom16, [5184, 16632, 4320, 1755]);
    check(5, MultiplierKind::Kom32, [118500, 246625, 118500, 16125]);
    check(7, MultiplierKind::Bw32, [77861, 894887, 22981, 46991]);
    check(11, MultiplierKind::Dadda32, [0, 2715240, 0, 170368]);
}

#[test]
fn estimates_scale_with_the_cube_of_the_order() {
    let costs = calibrate().unwrap();
    for kind in MultiplierKind::ALL {
        for n in [3, 5, 7] {
            let single = estimate_matrix_mult_resources(n, kind, &costs);
            let doubled = estimate_matrix_mult_resources(2 * n, kind, &costs);
            for field in CostField::ALL {
                let (a, b) = (field.of_report(&single), field.of_report(&doubled));
                assert_eq!(b, 8 * a, "{field} for {kind} at order {n}");
            }
        }
    }
}

#[test]
fn multiplier_counts_are_cubes() {
    assert_eq!(multiplier_count(1), 1);
    assert_eq!(multiplier_count(3), 27);
    assert_eq!(multiplier_count(5), 125);
    assert_eq!(multiplier_count(11), 1331);
}

#[test]
fn builtin_architectures_match_their_inventories() {
    let alexnet = builtin_arch("alexnet").unwrap();
    assert_eq!(alexnet.input_dims, (227, 227, 3));
    assert_eq!(alexnet.conv_layers, 5);
    assert_eq!(alexnet.kernel_inventory, vec![(11, 96), (5, 256), (3, 1024)]);

    let vgg16 = builtin_arch("vgg16").unwrap();
    assert_eq!(vgg16.input_dims, (224, 224, 3));
    assert_eq!(vgg16.conv_layers, 12);
    assert_eq!(vgg16.kernel_inventory, vec![(3, 3968)]);

    let vgg19 = builtin_arch("vgg19").unwrap();
    assert_eq!(vgg19.input_dims, (224, 224, 3));
    assert_eq!(vgg19.conv_layers, 14);
    assert_eq!(vgg19.kernel_inventory, vec![(3, 4992)]);

    assert_eq!(builtin_arch("ALEXNET").unwrap().name, "alexnet");
    assert_eq!(builtin_arch("lenet"), Err(UnknownArch("lenet".to_string())));
}

#[test]
fn vgg16_workload_on_kom16_hits_the_frozen_figures() {
    let costs = calibrate().unwrap();
    let arch = builtin_arch("vgg16").unwrap();
    let report = workload_report(&arch, MultiplierKind::Kom16, &costs);
    assert_eq!(report.total_kernels, 3968);
    assert_eq!(report.total_instances, 107_136);
    assert_eq!(report.total.slice_luts, 65_995_776);
    assert_eq!(report.total.slice_registers, 107_136 * 192);
}

#[test]
fn alexnet_entries_break_down_by_kernel_size() {
    let costs = calibrate().unwrap();
    let arch = builtin_arch("alexnet").unwrap();
    let report = workload_report(&arch, MultiplierKind::Bw32, &costs);
    assert_eq!(report.entries.len(), 3);
    let eleven = &report.entries[0];
    assert_eq!((eleven.kernel_size, eleven.kernel_count), (11, 96));
    assert_eq!(eleven.multiplier_instances, 127_776);
    assert_eq!(report.entries[1].multiplier_instances, 256 * 125);
    assert_eq!(report.entries[2].multiplier_instances, 1024 * 27);
    assert_eq!(
        report.total_instances,
        127_776 + 256 * 125 + 1024 * 27
    );
}

#[test]
fn vgg19_carries_exactly_1024_more_kernels_than_vgg16() {
    let costs = calibrate().unwrap();
    let kind = MultiplierKind::Kom32;
    let vgg16 = workload_report(&builtin_arch("vgg16").unwrap(), kind, &costs);
    let vgg19 = workload_report(&builtin_arch("vgg19").unwrap(), kind, &costs);
    assert_eq!(vgg19.total_kernels - vgg16.total_kernels, 1024);
    assert_eq!(vgg19.total_instances - vgg16.total_instances, 1024 * 27);
}

#[test]
fn aggregate_rows_are_the_exact_sum_of_the_breakdown() {
    let costs = calibrate().unwrap();
    for name in ["alexnet", "vgg16", "vgg19"] {
        let arch = builtin_arch(name).unwrap();
        for kind in MultiplierKind::ALL {
            let report = workload_report(&arch, kind, &costs);
            for field in CostField::ALL {
                let sum: u64 = report.entries.iter().map(|e| field.of_report(&e.cost)).sum();
                assert_eq!(field.of_report(&report.total), sum, "{field} on {name}/{kind}");
            }
            let instances: u64 = report.entries.iter().map(|e| e.multiplier_instances).sum();
            assert_eq!(report.total_instances, instances);
        }
    }
}

#[test]
fn a_single_unit_kernel_prices_at_exactly_one_unit_cost() {
    let costs = calibrate().unwrap();
    let arch = karacell_core::workload::CnnArchSpec {
        name: "unit".to_string(),
        input_dims: (1, 1, 1),
        conv_layers: 1,
        kernel_inventory: vec![(1, 1)],
        source: "test",
    };
    for kind in MultiplierKind::ALL {
        let report = workload_report(&arch, kind, &costs);
        let unit = costs.get(kind);
        assert_eq!(report.total_instances, 1);
        assert_eq!(report.total.slice_registers, unit.slice_registers);
        assert_eq!(report.total.slice_luts, unit.slice_luts);
        assert_eq!(report.total.lut_ff_pairs, unit.lut_ff_pairs);
        assert_eq!(report.total.bonded_iobs, unit.bonded_iobs);
    }
}

#[test]
fn a_perturbed_cell_fails_calibration() {
    let mut rows = shipped_rows().unwrap();
    let target = rows
        .iter_mut()
        .find(|r| r.order == 7 && r.kind == MultiplierKind::Kom16 && r.field == CostField::SliceLuts)
        .unwrap();
    target.value += 1;
    let err = calibrate_from(&rows).unwrap_err();
    assert_eq!(
        err,
        CalibrationError::Mismatch {
            order: 7,
            kind: MultiplierKind::Kom16,
            field: CostField::SliceLuts,
            value: 616 * 343 + 1,
            predicted: 616 * 343,
        }
    );
}

#[test]
fn a_non_cubic_base_cell_fails_calibration() {
    let mut rows = shipped_rows().unwrap();
    for row in &mut rows {
        if row.order == 3 && row.kind == MultiplierKind::Bw32 && row.field == CostField::BondedIobs {
            row.value += 1;
        }
    }
    let err = calibrate_from(&rows).unwrap_err();
    assert_eq!(
        err,
        CalibrationError::NotDivisible {
            kind: MultiplierKind::Bw32,
            field: CostField::BondedIobs,
            value: 137 * 27 + 1,
        }
    );
}

#[test]
fn missing_or_malformed_rows_are_rejected() {
    let mut rows = shipped_rows().unwrap();
    rows.pop();
    assert_eq!(
        calibrate_from(&rows).unwrap_err(),
        CalibrationError::WrongRowCount { expected: 64, got: 63 }
    );

    // Same count, but one cell duplicated and another gone.
    let clone = rows[0].clone();
    rows.push(clone);
    assert!(matches!(
        calibrate_from(&rows).unwrap_err(),
        CalibrationError::MissingCell { .. }
    ));

    assert_eq!(
        parse_rows("order,kind,field,value\n3,KOM16,slice_luts,many"),
        Err(CalibrationError::BadRow("3,KOM16,slice_luts,many".to_string()))
    );
    assert_eq!(
        parse_rows("not,a,header\n"),
        Err(CalibrationError::BadRow("not,a,header".to_string()))
    );
    assert_eq!(
        parse_rows("order,kind,field,value\n3,KOM99,slice_luts,5"),
        Err(CalibrationError::BadRow("3,KOM99,slice_luts,5".to_string()))
    );
}

#[test]
fn rows_round_trip_through_the_text_form() {
    let rows = shipped_rows().unwrap();
    let mut text = String::from("order,kind,field,value\n");
    for r in &rows {
        text.push_str(&format!("{},{},{},{}\n", r.order, r.kind.label(), r.field.name(), r.value));
    }
    assert_eq!(parse_rows(&text).unwrap(), rows);
    let reparsed: Vec<TableRow> = parse_rows(&text).unwrap();
    assert!(calibrate_from(&reparsed).is_ok());
}
