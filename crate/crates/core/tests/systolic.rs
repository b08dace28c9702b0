//! Oracle checks for the MAC-chain engine and its configuration scripts.

use karacell_core::systolic::{
    cell_step, im2col, parse_program, run_conv2d, run_fc, run_fir, run_matmul, run_pool,
    run_program, Activation, Engine, EngineError, Mode, PoolMode, ProgramError,
    SystolicCell, Tensor, TensorError,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<i64> {
    (0..len).map(|_| rng.gen_range(-50..=50)).collect()
}

fn random_tensor(rng: &mut ChaCha8Rng, h: usize, w: usize, c: usize) -> Tensor {
    Tensor::new(h, w, c, random_vec(rng, h * w * c)).unwrap()
}

/// y[n] = sum over k of h[k] * x[n-k], zeros before the stream.
fn convolution_oracle(h: &[i64], x: &[i64]) -> Vec<i64> {
    (0..x.len())
        .map(|n| {
            h.iter()
                .enumerate()
                .filter(|(k, _)| *k <= n)
                .map(|(k, &tap)| tap * x[n - k])
                .sum()
        })
        .collect()
}

fn matmul_oracle(a: &Tensor, b: &Tensor) -> Vec<i64> {
    let n = a.height();
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
    let (h, w, c) = image.dims();
    let (kh, kw, _) = kernel.dims();
    let (oh, ow) = (h - kh + 1, w - kw + 1);
    let mut out = Vec::with_capacity(oh * ow);
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
            out.push(acc);
        }
    }
    out
}

#[test]
fn cell_step_applies_the_mac_equation() {
    let mut cell = SystolicCell::new(3);
    assert_eq!(cell_step(&mut cell, 5, 2), Ok(11));
    assert_eq!(cell.y_reg, 11);
    let mut zero = SystolicCell::new(0);
    assert_eq!(cell_step(&mut zero, 0, 12345), Ok(0));
    let mut neg = SystolicCell::new(-2);
    assert_eq!(cell_step(&mut neg, -7, 3), Ok(-13));
    let mut big = SystolicCell::new(i64::MAX);
    assert_eq!(cell_step(&mut big, 0, 2), Err(EngineError::Overflow));
}

#[test]
fn fir_identity_and_impulse() {
    let x = vec![4, -1, 7, 0, 2];
    let run = run_fir(&[1], &x).unwrap();
    assert_eq!(run.y, x);
    assert_eq!(run.latency, 1);

    let run = run_fir(&[1, 2, 3], &[1, 0, 0, 0, 0]).unwrap();
    assert_eq!(run.y, vec![1, 2, 3, 0, 0]);
    assert_eq!(run.latency, 3);

    assert_eq!(run_fir(&[], &x).unwrap_err(), EngineError::NoTaps);
}

#[test]
fn fir_matches_direct_convolution() {
    let mut r = rng(7);
    for _ in 0..100 {
        let k = r.gen_range(1..=8);
        let n = r.gen_range(1..=60);
        let h = random_vec(&mut r, k);
        let x = random_vec(&mut r, n);
        let run = run_fir(&h, &x).unwrap();
        assert_eq!(run.y, convolution_oracle(&h, &x));
        assert_eq!(run.latency, k);
    }
}

#[test]
fn matmul_matches_triple_loop_and_counts_macs() {
    let mut r = rng(11);
    for n in [1usize, 3, 5, 7, 11] {
        let a = random_tensor(&mut r, n, n, 1);
        let b = random_tensor(&mut r, n, n, 1);
        let run = run_matmul(&a, &b).unwrap();
        assert_eq!(run.product.data(), matmul_oracle(&a, &b));
        assert_eq!(run.multiplications, (n * n * n) as u64);
    }

    let eye = Tensor::new(3, 3, 1, vec![1, 0, 0, 0, 1, 0, 0, 0, 1]).unwrap();
    let b = random_tensor(&mut r, 3, 3, 1);
    assert_eq!(run_matmul(&eye, &b).unwrap().product, b);

    let a = Tensor::new(1, 1, 1, vec![6]).unwrap();
    let b = Tensor::new(1, 1, 1, vec![-7]).unwrap();
    let run = run_matmul(&a, &b).unwrap();
    assert_eq!(run.product.data(), &[-42]);
    assert_eq!(run.multiplications, 1);

    let thin = Tensor::new(2, 3, 1, vec![0; 6]).unwrap();
    assert!(matches!(run_matmul(&thin, &b), Err(EngineError::MatrixShape { .. })));
}

#[test]
fn conv2d_window_sum_example() {
    let image = Tensor::filled(5, 5, 3, 1).unwrap();
    let kernel = Tensor::filled(3, 3, 3, 1).unwrap();
    let run = run_conv2d(&image, &kernel).unwrap();
    assert_eq!(run.map.dims(), (3, 3, 1));
    assert!(run.map.data().iter().all(|&v| v == 27));
    assert_eq!(run.multiplications, 9 * 27);
}

#[test]
fn conv2d_pointwise_scale() {
    let mut r = rng(13);
    let image = random_tensor(&mut r, 4, 6, 1);
    let kernel = Tensor::new(1, 1, 1, vec![2]).unwrap();
    let run = run_conv2d(&image, &kernel).unwrap();
    let doubled: Vec<i64> = image.data().iter().map(|v| v * 2).collect();
    assert_eq!(run.map.data(), doubled);
}

#[test]
fn conv2d_matches_sliding_window_oracle() {
    let mut r = rng(17);
    for _ in 0..50 {
        let c = r.gen_range(1..=3);
        let kh = r.gen_range(1..=3);
        let kw = r.gen_range(1..=3);
        let h = kh + r.gen_range(0..=4);
        let w = kw + r.gen_range(0..=4);
        let image = random_tensor(&mut r, h, w, c);
        let kernel = random_tensor(&mut r, kh, kw, c);
        let run = run_conv2d(&image, &kernel).unwrap();
        assert_eq!(run.map.dims(), (h - kh + 1, w - kw + 1, 1));
        assert_eq!(run.map.data(), conv2d_oracle(&image, &kernel));
    }
}

#[test]
fn conv2d_shape_errors() {
    let image = Tensor::filled(4, 4, 2, 1).unwrap();
    let wrong_c = Tensor::filled(2, 2, 3, 1).unwrap();
    assert_eq!(
        run_conv2d(&image, &wrong_c).unwrap_err(),
        EngineError::ChannelMismatch { image: 2, kernel: 3 }
    );
    let too_big = Tensor::filled(5, 2, 2, 1).unwrap();
    assert!(matches!(run_conv2d(&image, &too_big), Err(EngineError::KernelTooLarge { .. })));
}

#[test]
fn im2col_unrolls_windows_in_kernel_order() {
    // 3x3 single-channel image, 2x2 kernel: four windows, four rows each.
    let image = Tensor::new(3, 3, 1, vec![1, 2, 3, 4, 5, 6, 7, 8, 9]).unwrap();
    let cols = im2col(&image, 2, 2).unwrap();
    assert_eq!(cols.dims(), (4, 4, 1));
    // Column 0 is the top-left window read row by row.
    let col = |j: usize| (0..4).map(|i| cols.at(i, j, 0)).collect::<Vec<_>>();
    assert_eq!(col(0), vec![1, 2, 4, 5]);
    assert_eq!(col(1), vec![2, 3, 5, 6]);
    assert_eq!(col(2), vec![4, 5, 7, 8]);
    assert_eq!(col(3), vec![5, 6, 8, 9]);
}

#[test]
fn pooling_rules() {
    let map = Tensor::new(2, 2, 1, vec![1, 2, 3, 4]).unwrap();
    assert_eq!(run_pool(&map, 2, 2, PoolMode::Max).unwrap().data(), &[4]);
    assert_eq!(run_pool(&map, 2, 2, PoolMode::Avg).unwrap().data(), &[2]);

    // Floor rounding pulls a negative mean downward.
    let neg = Tensor::new(2, 2, 1, vec![-1, -2, -3, -4]).unwrap();
    assert_eq!(run_pool(&neg, 2, 2, PoolMode::Avg).unwrap().data(), &[-3]);

    let mut r = rng(19);
    let wide = random_tensor(&mut r, 8, 8, 1);
    for mode in [PoolMode::Max, PoolMode::Avg] {
        let pooled = run_pool(&wide, 2, 2, mode).unwrap();
        assert_eq!(pooled.dims(), (4, 4, 1));
        for oy in 0..4 {
            for ox in 0..4 {
                let window = [
                    wide.at(oy * 2, ox * 2, 0),
                    wide.at(oy * 2, ox * 2 + 1, 0),
                    wide.at(oy * 2 + 1, ox * 2, 0),
                    wide.at(oy * 2 + 1, ox * 2 + 1, 0),
                ];
                let expected = match mode {
                    PoolMode::Max => *window.iter().max().unwrap(),
                    PoolMode::Avg => window.iter().sum::<i64>().div_euclid(4),
                };
                assert_eq!(pooled.at(oy, ox, 0), expected);
            }
        }
    }

    assert_eq!(
        run_pool(&map, 3, 2, PoolMode::Max).unwrap_err(),
        EngineError::PoolWindow { h: 2, w: 2, ph: 3, pw: 2 }
    );
    let multi = Tensor::filled(2, 2, 2, 0).unwrap();
    assert_eq!(
        run_pool(&multi, 2, 2, PoolMode::Max).unwrap_err(),
        EngineError::PoolChannels(2)
    );
}

#[test]
fn fully_connected_layer() {
    let w = Tensor::new(1, 2, 1, vec![1, 1]).unwrap();
    assert_eq!(run_fc(&w, &[2, 3], &[1], Activation::Relu).unwrap(), vec![6]);

    let w = Tensor::new(1, 2, 1, vec![-1, 0]).unwrap();
    assert_eq!(run_fc(&w, &[5, 9], &[0], Activation::Relu).unwrap(), vec![0]);
    assert_eq!(run_fc(&w, &[5, 9], &[0], Activation::Identity).unwrap(), vec![-5]);

    let mut r = rng(23);
    let (m, d) = (4, 6);
    let w = random_tensor(&mut r, m, d, 1);
    let x = random_vec(&mut r, d);
    let b = random_vec(&mut r, m);
    let got = run_fc(&w, &x, &b, Activation::Identity).unwrap();
    for i in 0..m {
        let want: i64 = (0..d).map(|j| w.at(i, j, 0) * x[j]).sum::<i64>() + b[i];
        assert_eq!(got[i], want);
    }

    assert!(matches!(
        run_fc(&w, &x[..3], &b, Activation::Relu),
        Err(EngineError::FcShape { .. })
    ));
}

#[test]
fn tensor_text_round_trip() {
    let mut r = rng(29);
    let t = random_tensor(&mut r, 3, 4, 2);
    let text = t.to_text();
    assert!(text.starts_with("3 4 2\n"));
    assert_eq!(Tensor::parse(&text).unwrap(), t);

    assert!(matches!(Tensor::parse(""), Err(TensorError::BadHeader(_))));
    assert!(matches!(Tensor::parse("2 2\n1 2 3 4"), Err(TensorError::BadHeader(_))));
    assert!(matches!(Tensor::parse("2 2 1\n1 x 3 4"), Err(TensorError::BadValue(_))));
    assert_eq!(
        Tensor::parse("2 2 1\n1 2 3").unwrap_err(),
        TensorError::WrongCount { expected: 4, got: 3 }
    );
    assert_eq!(Tensor::new(0, 2, 1, vec![]).unwrap_err(), TensorError::ZeroExtent);
}

#[test]
fn scripts_drive_the_same_operations() {
    let program = parse_program(
        "# impulse response\nSET_MODE CONV1D\nSET_PARAMS K=3\nLOAD_WEIGHTS 1 2 3\nRUN\n",
    )
    .unwrap();
    let input = Tensor::row(vec![1, 0, 0, 0, 0]).unwrap();
    let records = run_program(&program, &input).unwrap();
    assert_eq!(records.len(), 1);
    assert_eq!(records[0].mode, Mode::Conv1d);
    assert_eq!(records[0].output.data(), &[1, 2, 3, 0, 0]);
    assert_eq!(records[0].latency, Some(3));

    // The config path must agree with the direct call.
    let direct = run_fir(&[1, 2, 3], input.data()).unwrap();
    assert_eq!(records[0].output.data(), direct.y);
}

#[test]
fn script_fc_example() {
    let program = parse_program("SET_MODE FC\nSET_PARAMS m=1 d=2\nLOAD_WEIGHTS 1 1\nRUN").unwrap();
    let input = Tensor::row(vec![2, 3, 1]).unwrap();
    let records = run_program(&program, &input).unwrap();
    assert_eq!(records[0].output.data(), &[6]);
}

#[test]
fn script_matmul_matches_direct_call() {
    let mut r = rng(31);
    let a = random_tensor(&mut r, 3, 3, 1);
    let b = random_tensor(&mut r, 3, 3, 1);
    let mut engine = Engine::new();
    engine.set_mode(Mode::Matmul);
    engine.merge_params(&[("n".to_string(), "3".to_string())]);
    engine.load_weights(a.data().to_vec());
    let record = engine.run(&b).unwrap();
    let direct = run_matmul(&a, &b).unwrap();
    assert_eq!(record.output, direct.product);
    assert_eq!(record.multiplications, 27);
}

#[test]
fn script_errors() {
    let program = parse_program("LOAD_WEIGHTS 1 2\nRUN").unwrap();
    let input = Tensor::row(vec![1, 2]).unwrap();
    let err = run_program(&program, &input).unwrap_err();
    assert_eq!(err, ProgramError::RunBeforeSetMode);
    assert_eq!(err.to_string(), "RUN before SET_MODE");

    let program =
        parse_program("SET_MODE CONV1D\nSET_PARAMS K=3\nLOAD_WEIGHTS 1 2\nRUN").unwrap();
    assert_eq!(
        run_program(&program, &input).unwrap_err(),
        ProgramError::WeightCount { mode: Mode::Conv1d, expected: 3, got: 2 }
    );

    assert_eq!(
        parse_program("JUMP 3").unwrap_err(),
        ProgramError::UnknownInstruction { line: 1, word: "JUMP".to_string() }
    );
    assert!(matches!(
        parse_program("SET_MODE WIBBLE"),
        Err(ProgramError::Malformed { line: 1, .. })
    ));
    assert!(matches!(
        parse_program("SET_PARAMS K"),
        Err(ProgramError::Malformed { .. })
    ));

    // Stale parameters from another mode are rejected, fresh ones accepted.
    let program = parse_program(
        "SET_MODE CONV1D\nSET_PARAMS K=2 ph=9\nLOAD_WEIGHTS 5 5\nRUN",
    )
    .unwrap();
    assert_eq!(
        run_program(&program, &input).unwrap_err(),
        ProgramError::UnknownParam { mode: Mode::Conv1d, key: "ph".to_string() }
    );
}

#[test]
fn mode_switch_resets_params_but_keeps_weights() {
    let text = "SET_MODE CONV1D\nSET_PARAMS K=4\nLOAD_WEIGHTS 1 1 1 1\nRUN\n\
                SET_MODE POOL_AVG\nSET_PARAMS ph=2 pw=2\nLOAD_WEIGHTS\nRUN";
    let program = parse_program(text).unwrap();
    // A 2x2 map works for pooling; CONV1D reads the same four values flat.
    let input = Tensor::new(2, 2, 1, vec![4, 6, 8, 10]).unwrap();
    let records = run_program(&program, &input).unwrap();
    assert_eq!(records.len(), 2);
    assert_eq!(records[0].output.data(), &[4, 10, 18, 28]);
    assert_eq!(records[1].output.data(), &[7]);
}
