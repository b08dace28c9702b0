#!/usr/bin/env python3
"""Smoke test for the karacell Python module.

Expects a compiled extension library: run `cargo build -p
karacell-python` first (or pass the path to a libkaracell.so). The
library is copied into a temp dir under the importable name and driven
through one example of each major operation.
"""

import shutil
import sys
import tempfile
from pathlib import Path


def locate_library() -> Path:
    root = Path(__file__).resolve().parent.parent
    candidates = [
        root / "target" / "debug" / "libkaracell.so",
        root / "target" / "release" / "libkaracell.so",
    ]
    if len(sys.argv) > 1:
        candidates.insert(0, Path(sys.argv[1]))
    for path in candidates:
        if path.exists():
            return path
    sys.exit("no libkaracell.so found; run: cargo build -p karacell-python")


def main() -> None:
    lib = locate_library()
    with tempfile.TemporaryDirectory() as tmp:
        shutil.copy(lib, Path(tmp) / "karacell.so")
        sys.path.insert(0, tmp)
        import karacell

        # Multiplier generation and evaluation.
        nl = karacell.generate("kom", 16)
        assert nl.multiply(13, 11) == 143
        assert nl.count_base_multipliers() == 27
        assert nl.sweep_random(200, seed=7) == (200, 200)

        bw = karacell.generate("bw", 8)
        assert bw.multiply(-3, 5) == -15
        assert bw.multiply(-128, -128) == 16384
        assert bw.sweep_exhaustive() == (65536, 65536)

        # Interchange round trip, pipelining, timing.
        again = karacell.Netlist.from_json(nl.to_json())
        assert again.multiply(255, 255) == 65025
        piped = karacell.generate("kom", 16, pipelined=True)
        assert piped.stage_count == 3
        assert piped.multiply(123, 456) == 123 * 456
        timing = piped.critical_path()
        assert timing.max_stage_delay <= timing.total_unpipelined_delay
        assert len(timing.per_stage_delay) == piped.stage_count + 1

        # Systolic engine.
        y, latency, _ = karacell.run_fir([1, 2, 3], [1, 0, 0, 0, 0])
        assert y == [1, 2, 3, 0, 0] and latency == 3

        ones = karacell.Tensor.filled(5, 5, 3, 1)
        kernel = karacell.Tensor.filled(3, 3, 3, 1)
        feature_map, _ = karacell.run_conv2d(ones, kernel)
        assert feature_map.dims == (3, 3, 1)
        assert feature_map.data == [27] * 9

        a = karacell.Tensor(2, 2, 1, [1, 2, 3, 4])
        product, mults = karacell.run_matmul(a, a)
        assert product.data == [7, 10, 15, 22] and mults == 8

        pooled = karacell.run_pool(karacell.Tensor(2, 2, 1, [4, 6, 8, 10]), 2, 2, mode="avg")
        assert pooled.data == [7]
        assert karacell.run_fc(karacell.Tensor(1, 2, 1, [2, 2]), [1, 2], [0]) == [6]

        records = karacell.run_program(
            "SET_MODE CONV1D\nSET_PARAMS K=3\nLOAD_WEIGHTS\nRUN\n",
            karacell.Tensor.row([1, 0, 0, 0, 0]),
            weights=[4, 5, 6],
        )
        assert records[0].output.data == [4, 5, 6, 0, 0]
        assert records[0].latency == 3

        # Calibrated resource model.
        units = karacell.unit_costs()
        assert units["kom16"]["slice_luts"] == 616
        assert len(karacell.table_rows()) == 64
        assert karacell.multiplier_count(3) == 27
        est = karacell.estimate_matrix_mult(3, "kom16")
        assert est == {
            "slice_registers": 5184,
            "slice_luts": 16632,
            "lut_ff_pairs": 4320,
            "bonded_iobs": 1755,
        }
        report = karacell.workload_report("vgg16", "kom16")
        assert report["total_instances"] == 107136
        assert report["total"]["slice_luts"] == 65995776

    print("smoke test passed")


if __name__ == "__main__":
    main()
