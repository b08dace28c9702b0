//! Integer tensors in row-major, channel-last order, with a plain text
//! interchange form: a header line `H W C` followed by H*W*C whitespace
//! separated integers.

use std::fmt::Write as _;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TensorError {
    #[error("tensor extents must all be at least 1")]
    ZeroExtent,
    #[error("bad tensor header {0:?}: expected three integers H W C")]
    BadHeader(String),
    #[error("bad tensor value {0:?}")]
    BadValue(String),
    #[error("tensor data holds {got} values, dims call for {expected}")]
    WrongCount { expected: usize, got: usize },
}

/// H x W x C block of signed integers. Element (y, x, ch) lives at flat
/// index (y*W + x)*C + ch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor {
    h: usize,
    w: usize,
    c: usize,
    data: Vec<i64>,
}

impl Tensor {
    pub fn new(h: usize, w: usize, c: usize, data: Vec<i64>) -> Result<Self, TensorError> {
        if h == 0 || w == 0 || c == 0 {
            return Err(TensorError::ZeroExtent);
        }
        let expected = h * w * c;
        if data.len() != expected {
            return Err(TensorError::WrongCount { expected, got: data.len() });
        }
        Ok(Tensor { h, w, c, data })
    }

    /// 1 x N x 1 tensor around a flat value list.
    pub fn row(data: Vec<i64>) -> Result<Self, TensorError> {
        let n = data.len();
        Tensor::new(1, n, 1, data)
    }

    pub fn filled(h: usize, w: usize, c: usize, value: i64) -> Result<Self, TensorError> {
        Tensor::new(h, w, c, vec![value; h * w * c])
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.h, self.w, self.c)
    }

    pub fn height(&self) -> usize {
        self.h
    }

    pub fn width(&self) -> usize {
        self.w
    }

    pub fn channels(&self) -> usize {
        self.c
    }

    pub fn data(&self) -> &[i64] {
        &self.data
    }

    pub fn at(&self, y: usize, x: usize, ch: usize) -> i64 {
        debug_assert!(y < self.h && x < self.w && ch < self.c);
        self.data[(y * self.w + x) * self.c + ch]
    }

    /// `H W C` on a header line, then the values of one y-row per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.h, self.w, self.c);
        for y in 0..self.h {
            let row = &self.data[y * self.w * self.c..(y + 1) * self.w * self.c];
            let mut line = String::new();
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    line.push(' ');
                }
                let _ = write!(line, "{v}");
            }
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    /// Parses the text form. Values may be broken across lines any way;
    /// only the header line's position is fixed.
    pub fn parse(text: &str) -> Result<Self, TensorError> {
        let mut lines = text.lines();
        let header = loop {
            match lines.next() {
                Some(l) if l.trim().is_empty() => continue,
                Some(l) => break l,
                None => return Err(TensorError::BadHeader(String::new())),
            }
        };
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| TensorError::BadHeader(header.to_string())))
            .collect::<Result<_, _>>()?;
        let [h, w, c] = dims[..] else {
            return Err(TensorError::BadHeader(header.to_string()));
        };
        let mut data = Vec::new();
        for line in lines {
            for tok in line.split_whitespace() {
                data.push(tok.parse().map_err(|_| TensorError::BadValue(tok.to_string()))?);
            }
        }
        Tensor::new(h, w, c, data)
    }
}
