//! Cycle-accurate model of a chain of multiply-accumulate cells.
//!
//! Each cell stores one coefficient and computes y = y_prev + h*x per
//! clock, with partial sums marching one cell to the right each cycle.
//! On top of that single primitive sit five operating modes: 1D filtering
//! ([`run_fir`]), square matrix multiplication ([`run_matmul`]), 2D
//! convolution lowered through [`im2col`] ([`run_conv2d`]), window
//! pooling ([`run_pool`]), and fully-connected layers ([`run_fc`]).
//! All arithmetic is exact signed 64-bit; any overflow is reported as an
//! error rather than wrapped.
//!
//! The [`program`] module drives the same operations from a line-oriented
//! configuration script, picking the mode at run time.

mod program;
mod tensor;

pub use program::{
    parse_program, run_program, Engine, Instruction, Mode, ProgramError, RunRecord,
};
pub use tensor::{Tensor, TensorError};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("64-bit accumulator overflow")]
    Overflow,
    #[error("a filter needs at least one tap")]
    NoTaps,
    #[error("matrix multiply needs square single-channel tensors of equal order, got {a} and {b}")]
    MatrixShape { a: String, b: String },
    #[error("kernel has {kernel} channels but the image has {image}")]
    ChannelMismatch { image: usize, kernel: usize },
    #[error("kernel {kernel} does not fit inside image {image}")]
    KernelTooLarge { image: String, kernel: String },
    #[error("pool window {ph}x{pw} does not tile the {h}x{w} map")]
    PoolWindow { h: usize, w: usize, ph: usize, pw: usize },
    #[error("pooling expects a single-channel map, got {0} channels")]
    PoolChannels(usize),
    #[error("weight matrix is {m}x{d} but got {xs} inputs and {bs} biases")]
    FcShape { m: usize, d: usize, xs: usize, bs: usize },
}

fn shape((h, w, c): (usize, usize, usize)) -> String {
    format!("{h}x{w}x{c}")
}

/// One processing element: a held coefficient and the accumulator
/// register behind it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SystolicCell {
    pub h: i64,
    pub y_reg: i64,
}

impl SystolicCell {
    pub fn new(h: i64) -> Self {
        SystolicCell { h, y_reg: 0 }
    }
}

/// One clock of one cell: latches and returns y_prev + h*x.
pub fn cell_step(cell: &mut SystolicCell, y_prev: i64, x: i64) -> Result<i64, EngineError> {
    let y = cell
        .h
        .checked_mul(x)
        .and_then(|p| y_prev.checked_add(p))
        .ok_or(EngineError::Overflow)?;
    cell.y_reg = y;
    Ok(y)
}

/// Result of streaming samples through the filter chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FirRun {
    /// One output per input sample: y[n] = sum over k of h[k]*x[n-k].
    pub y: Vec<i64>,
    /// Cycles from the first sample entering to the first output, always
    /// equal to the tap count.
    pub latency: usize,
    /// Multiply operations performed (every cell multiplies every cycle).
    pub multiplications: u64,
}

/// Streams `x` through a chain of `h.len()` cells, one clock at a time.
///
/// Cell k holds tap h\[k\] and sees the input stream delayed by 2k
/// cycles, while partial sums advance one cell per clock; the skew makes
/// the emitted stream equal the direct convolution sum with zeros assumed
/// before the first sample.
pub fn run_fir(h: &[i64], x: &[i64]) -> Result<FirRun, EngineError> {
    if h.is_empty() {
        return Err(EngineError::NoTaps);
    }
    let k = h.len();
    let n = x.len();
    let mut cells: Vec<SystolicCell> = h.iter().map(|&tap| SystolicCell::new(tap)).collect();
    let mut y = Vec::with_capacity(n);
    let mut multiplications = 0u64;
    let total_cycles = n + k - 1;
    for cycle in 0..total_cycles {
        // Rightmost cell first, so every read of a left neighbor sees
        // the value it latched on the previous clock.
        for i in (0..k).rev() {
            let y_prev = if i == 0 { 0 } else { cells[i - 1].y_reg };
            let sample = cycle
                .checked_sub(2 * i)
                .and_then(|idx| x.get(idx).copied())
                .unwrap_or(0);
            cell_step(&mut cells[i], y_prev, sample)?;
            multiplications += 1;
        }
        if cycle + 1 >= k {
            y.push(cells[k - 1].y_reg);
        }
    }
    Ok(FirRun { y, latency: k, multiplications })
}

/// Dot product on a freshly configured MAC chain: cell j holds
/// weights[j], the partial sum enters as `init` and passes through every
/// cell once. Returns the sum and the multiply count.
fn dot_chain(weights: &[i64], inputs: &[i64], init: i64) -> Result<(i64, u64), EngineError> {
    debug_assert_eq!(weights.len(), inputs.len());
    let mut y = init;
    for (&h, &x) in weights.iter().zip(inputs) {
        let mut cell = SystolicCell::new(h);
        y = cell_step(&mut cell, y, x)?;
    }
    Ok((y, weights.len() as u64))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatmulRun {
    pub product: Tensor,
    /// Always n^3 for order-n operands: one per MAC step.
    pub multiplications: u64,
}

/// Multiplies two order-n matrices (n x n x 1 tensors), one MAC chain
/// per output element.
pub fn run_matmul(a: &Tensor, b: &Tensor) -> Result<MatmulRun, EngineError> {
    let n = a.height();
    let square = |t: &Tensor| t.height() == t.width() && t.channels() == 1;
    if !square(a) || !square(b) || b.height() != n {
        return Err(EngineError::MatrixShape { a: shape(a.dims()), b: shape(b.dims()) });
    }
    let mut data = Vec::with_capacity(n * n);
    let mut multiplications = 0u64;
    let mut column = vec![0i64; n];
    for i in 0..n {
        let row = &a.data()[i * n..(i + 1) * n];
        for j in 0..n {
            for (k, slot) in column.iter_mut().enumerate() {
                *slot = b.at(k, j, 0);
            }
            let (value, mults) = dot_chain(row, &column, 0)?;
            data.push(value);
            multiplications += mults;
        }
    }
    let product = Tensor::new(n, n, 1, data).expect("square result");
    Ok(MatmulRun { product, multiplications })
}

/// Unrolls every kernel-sized window of `image` into one column: row
/// ((dy*kw)+dx)*C + ch of column (oy*out_w + ox) holds
/// image(oy+dy, ox+dx, ch), matching the flat order of a kernel tensor.
/// The result is a (kh*kw*C) x (out_h*out_w) x 1 tensor.
pub fn im2col(image: &Tensor, kh: usize, kw: usize) -> Result<Tensor, EngineError> {
    let (h, w, c) = image.dims();
    if kh > h || kw > w {
        return Err(EngineError::KernelTooLarge {
            image: shape(image.dims()),
            kernel: format!("{kh}x{kw}x{c}"),
        });
    }
    let (oh, ow) = (h - kh + 1, w - kw + 1);
    let depth = kh * kw * c;
    let mut data = vec![0i64; depth * oh * ow];
    for oy in 0..oh {
        for ox in 0..ow {
            let col = oy * ow + ox;
            for dy in 0..kh {
                for dx in 0..kw {
                    for ch in 0..c {
                        let row = (dy * kw + dx) * c + ch;
                        data[row * (oh * ow) + col] = image.at(oy + dy, ox + dx, ch);
                    }
                }
            }
        }
    }
    Ok(Tensor::new(depth, oh * ow, 1, data).expect("unrolled dims"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conv2dRun {
    /// (H-kh+1) x (W-kw+1) x 1 feature map.
    pub map: Tensor,
    pub multiplications: u64,
}

/// Valid (no padding, stride 1) cross-correlation of a kernel over an
/// image with matching channel count, lowered through [`im2col`]: the
/// flattened kernel is one MAC-chain weight vector, applied to each
/// unrolled window column.
pub fn run_conv2d(image: &Tensor, kernel: &Tensor) -> Result<Conv2dRun, EngineError> {
    let (h, w, c) = image.dims();
    let (kh, kw, kc) = kernel.dims();
    if kc != c {
        return Err(EngineError::ChannelMismatch { image: c, kernel: kc });
    }
    let columns = im2col(image, kh, kw)?;
    let (oh, ow) = (h - kh + 1, w - kw + 1);
    let depth = kh * kw * c;
    let mut data = Vec::with_capacity(oh * ow);
    let mut multiplications = 0u64;
    let mut window = vec![0i64; depth];
    for col in 0..oh * ow {
        for (row, slot) in window.iter_mut().enumerate() {
            *slot = columns.at(row, col, 0);
        }
        let (value, mults) = dot_chain(kernel.data(), &window, 0)?;
        data.push(value);
        multiplications += mults;
    }
    let map = Tensor::new(oh, ow, 1, data).expect("map dims");
    Ok(Conv2dRun { map, multiplications })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PoolMode {
    Max,
    /// Integer average, rounded toward negative infinity.
    Avg,
}

/// Non-overlapping window pooling over a single-channel map. Window
/// extents must divide the map extents exactly.
pub fn run_pool(map: &Tensor, ph: usize, pw: usize, mode: PoolMode) -> Result<Tensor, EngineError> {
    let (h, w, c) = map.dims();
    if c != 1 {
        return Err(EngineError::PoolChannels(c));
    }
    if ph == 0 || pw == 0 || h % ph != 0 || w % pw != 0 {
        return Err(EngineError::PoolWindow { h, w, ph, pw });
    }
    let (oh, ow) = (h / ph, w / pw);
    let mut data = Vec::with_capacity(oh * ow);
    for oy in 0..oh {
        for ox in 0..ow {
            let mut best = i64::MIN;
            let mut sum = 0i64;
            for dy in 0..ph {
                for dx in 0..pw {
                    let v = map.at(oy * ph + dy, ox * pw + dx, 0);
                    best = best.max(v);
                    sum = sum.checked_add(v).ok_or(EngineError::Overflow)?;
                }
            }
            data.push(match mode {
                PoolMode::Max => best,
                PoolMode::Avg => sum.div_euclid((ph * pw) as i64),
            });
        }
    }
    Ok(Tensor::new(oh, ow, 1, data).expect("pooled dims"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Identity,
}

impl Activation {
    fn apply(self, v: i64) -> i64 {
        match self {
            Activation::Relu => v.max(0),
            Activation::Identity => v,
        }
    }
}

/// Fully-connected layer: out[i] = activation(W[i] . x + b[i]), one MAC
/// chain per output row seeded with its bias.
pub fn run_fc(
    weights: &Tensor,
    x: &[i64],
    bias: &[i64],
    activation: Activation,
) -> Result<Vec<i64>, EngineError> {
    let (m, d, c) = weights.dims();
    if c != 1 || x.len() != d || bias.len() != m {
        return Err(EngineError::FcShape { m, d, xs: x.len(), bs: bias.len() });
    }
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let row = &weights.data()[i * d..(i + 1) * d];
        let (value, _) = dot_chain(row, x, bias[i])?;
        out.push(activation.apply(value));
    }
    Ok(out)
}
