//! Line-oriented configuration scripts for the MAC-chain engine.
//!
//! One instruction per line: `SET_MODE CONV1D`, `SET_PARAMS K=3`,
//! `LOAD_WEIGHTS 1 2 3`, `RUN`. Blank lines and `#` comments are
//! skipped. SET_PARAMS entries merge key by key; SET_MODE switches the
//! mode and drops previously set parameters (they are mode-specific)
//! while loaded weights survive until the next LOAD_WEIGHTS. RUN
//! validates the accumulated configuration against the current input
//! tensor and dispatches to the matching operation.
//!
//! Per-mode parameters and weights:
//!   CONV1D   K            weights = the K filter taps; input read flat
//!   CONV2D   kh kw c      weights = the kh*kw*c kernel; input = image
//!   MATMUL   n            weights = left matrix, row-major; input = right
//!   POOL_MAX ph pw        no weights; input = single-channel map
//!   POOL_AVG ph pw        no weights; input = single-channel map
//!   FC       m d [act]    weights = m*d matrix; input = x then the m
//!                         biases, flat; act is relu (default) or identity
//!
//! FC folds the bias vector into the tail of the input tensor so a
//! script plus one input file fully determines a run.

use super::tensor::Tensor;
use super::{
    run_conv2d, run_fc, run_fir, run_matmul, run_pool, Activation, EngineError, PoolMode,
};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Conv1d,
    Conv2d,
    Matmul,
    PoolMax,
    PoolAvg,
    Fc,
}

impl Mode {
    pub const ALL: [Mode; 6] =
        [Mode::Conv1d, Mode::Conv2d, Mode::Matmul, Mode::PoolMax, Mode::PoolAvg, Mode::Fc];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Conv1d => "CONV1D",
            Mode::Conv2d => "CONV2D",
            Mode::Matmul => "MATMUL",
            Mode::PoolMax => "POOL_MAX",
            Mode::PoolAvg => "POOL_AVG",
            Mode::Fc => "FC",
        }
    }

    pub fn from_name(name: &str) -> Option<Mode> {
        Self::ALL.iter().copied().find(|m| m.name() == name)
    }

    fn param_keys(self) -> &'static [&'static str] {
        match self {
            Mode::Conv1d => &["K"],
            Mode::Conv2d => &["kh", "kw", "c"],
            Mode::Matmul => &["n"],
            Mode::PoolMax | Mode::PoolAvg => &["ph", "pw"],
            Mode::Fc => &["m", "d", "act"],
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instruction {
    LoadWeights(Vec<i64>),
    SetMode(Mode),
    SetParams(Vec<(String, String)>),
    Run,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ProgramError {
    #[error("RUN before SET_MODE")]
    RunBeforeSetMode,
    #[error("line {line}: unknown instruction {word:?}")]
    UnknownInstruction { line: usize, word: String },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("{mode} expects {expected} weights, got {got}")]
    WeightCount { mode: Mode, expected: usize, got: usize },
    #[error("{mode} needs parameter {key}")]
    MissingParam { mode: Mode, key: &'static str },
    #[error("{mode} does not take parameter {key:?}")]
    UnknownParam { mode: Mode, key: String },
    #[error("parameter {key} has bad value {value:?}")]
    BadParam { key: String, value: String },
    #[error("{mode} expects input of {expected}, got {got}")]
    InputShape { mode: Mode, expected: String, got: String },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Parses one instruction per non-empty, non-comment line.
pub fn parse_program(text: &str) -> Result<Vec<Instruction>, ProgramError> {
    let mut program = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let word = tokens.next().expect("non-empty line");
        let rest: Vec<&str> = tokens.collect();
        let malformed = |message: String| ProgramError::Malformed { line, message };
        let instr = match word {
            "SET_MODE" => {
                let [name] = rest[..] else {
                    return Err(malformed("SET_MODE takes exactly one mode name".into()));
                };
                let mode = Mode::from_name(name)
                    .ok_or_else(|| malformed(format!("unknown mode {name:?}")))?;
                Instruction::SetMode(mode)
            }
            "SET_PARAMS" => {
                if rest.is_empty() {
                    return Err(malformed("SET_PARAMS needs key=value entries".into()));
                }
                let mut pairs = Vec::with_capacity(rest.len());
                for entry in rest {
                    let Some((key, value)) = entry.split_once('=') else {
                        return Err(malformed(format!("expected key=value, got {entry:?}")));
                    };
                    pairs.push((key.to_string(), value.to_string()));
                }
                Instruction::SetParams(pairs)
            }
            "LOAD_WEIGHTS" => {
                let mut values = Vec::with_capacity(rest.len());
                for tok in rest {
                    let v = tok
                        .parse()
                        .map_err(|_| malformed(format!("bad weight {tok:?}")))?;
                    values.push(v);
                }
                Instruction::LoadWeights(values)
            }
            "RUN" => {
                if !rest.is_empty() {
                    return Err(malformed("RUN takes no operands".into()));
                }
                Instruction::Run
            }
            other => {
                return Err(ProgramError::UnknownInstruction { line, word: other.to_string() })
            }
        };
        program.push(instr);
    }
    Ok(program)
}

/// Outcome of one RUN instruction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunRecord {
    pub mode: Mode,
    pub output: Tensor,
    pub multiplications: u64,
    /// Cycles to the first output; only the streaming CONV1D mode has one.
    pub latency: Option<usize>,
}

/// Accumulated configuration state: the mode, its parameters, and the
/// loaded weights.
#[derive(Clone, Debug, Default)]
pub struct Engine {
    mode: Option<Mode>,
    params: BTreeMap<String, String>,
    weights: Option<Vec<i64>>,
}

impl Engine {
    pub fn new() -> Self {
        Engine::default()
    }

    pub fn set_mode(&mut self, mode: Mode) {
        self.mode = Some(mode);
        self.params.clear();
    }

    pub fn merge_params(&mut self, pairs: &[(String, String)]) {
        for (key, value) in pairs {
            self.params.insert(key.clone(), value.clone());
        }
    }

    pub fn load_weights(&mut self, weights: Vec<i64>) {
        self.weights = Some(weights);
    }

    fn param_usize(&self, mode: Mode, key: &'static str) -> Result<usize, ProgramError> {
        let value = self
            .params
            .get(key)
            .ok_or(ProgramError::MissingParam { mode, key })?;
        value.parse().map_err(|_| ProgramError::BadParam {
            key: key.to_string(),
            value: value.clone(),
        })
    }

    fn check_weight_count(&self, mode: Mode, expected: usize) -> Result<&[i64], ProgramError> {
        let got = self.weights.as_deref().unwrap_or(&[]);
        if got.len() != expected {
            return Err(ProgramError::WeightCount { mode, expected, got: got.len() });
        }
        Ok(got)
    }

    /// Validates the accumulated configuration and executes one run over
    /// `input`.
    pub fn run(&self, input: &Tensor) -> Result<RunRecord, ProgramError> {
        let mode = self.mode.ok_or(ProgramError::RunBeforeSetMode)?;
        for key in self.params.keys() {
            if !mode.param_keys().contains(&key.as_str()) {
                return Err(ProgramError::UnknownParam { mode, key: key.clone() });
            }
        }
        match mode {
            Mode::Conv1d => {
                let k = self.param_usize(mode, "K")?;
                let taps = self.check_weight_count(mode, k)?;
                let run = run_fir(taps, input.data())?;
                Ok(RunRecord {
                    mode,
                    output: Tensor::row(run.y).expect("stream row"),
                    multiplications: run.multiplications,
                    latency: Some(run.latency),
                })
            }
            Mode::Conv2d => {
                let kh = self.param_usize(mode, "kh")?;
                let kw = self.param_usize(mode, "kw")?;
                let c = self.param_usize(mode, "c")?;
                let weights = self.check_weight_count(mode, kh.saturating_mul(kw).saturating_mul(c))?;
                let kernel = Tensor::new(kh, kw, c, weights.to_vec())
                    .map_err(|_| ProgramError::BadParam {
                        key: "kh".to_string(),
                        value: format!("{kh}x{kw}x{c}"),
                    })?;
                let run = run_conv2d(input, &kernel)?;
                Ok(RunRecord {
                    mode,
                    output: run.map,
                    multiplications: run.multiplications,
                    latency: None,
                })
            }
            Mode::Matmul => {
                let n = self.param_usize(mode, "n")?;
                let weights = self.check_weight_count(mode, n.saturating_mul(n))?;
                let a = Tensor::new(n, n, 1, weights.to_vec()).map_err(|_| {
                    ProgramError::BadParam { key: "n".to_string(), value: n.to_string() }
                })?;
                let run = run_matmul(&a, input)?;
                Ok(RunRecord {
                    mode,
                    output: run.product,
                    multiplications: run.multiplications,
                    latency: None,
                })
            }
            Mode::PoolMax | Mode::PoolAvg => {
                let ph = self.param_usize(mode, "ph")?;
                let pw = self.param_usize(mode, "pw")?;
                self.check_weight_count(mode, 0)?;
                let pooled = match mode {
                    Mode::PoolMax => run_pool(input, ph, pw, PoolMode::Max)?,
                    _ => run_pool(input, ph, pw, PoolMode::Avg)?,
                };
                Ok(RunRecord { mode, output: pooled, multiplications: 0, latency: None })
            }
            Mode::Fc => {
                let m = self.param_usize(mode, "m")?;
                let d = self.param_usize(mode, "d")?;
                let activation = match self.params.get("act").map(String::as_str) {
                    None | Some("relu") => Activation::Relu,
                    Some("identity") => Activation::Identity,
                    Some(other) => {
                        return Err(ProgramError::BadParam {
                            key: "act".to_string(),
                            value: other.to_string(),
                        })
                    }
                };
                let weights = self.check_weight_count(mode, m.saturating_mul(d))?;
                let flat = input.data();
                if flat.len() != d + m {
                    return Err(ProgramError::InputShape {
                        mode,
                        expected: format!("{d} inputs then {m} biases"),
                        got: format!("{} values", flat.len()),
                    });
                }
                let w = Tensor::new(m, d, 1, weights.to_vec()).map_err(|_| {
                    ProgramError::BadParam { key: "m".to_string(), value: m.to_string() }
                })?;
                let out = run_fc(&w, &flat[..d], &flat[d..], activation)?;
                Ok(RunRecord {
                    mode,
                    output: Tensor::row(out).expect("fc row"),
                    multiplications: (m * d) as u64,
                    latency: None,
                })
            }
        }
    }
}

/// Feeds a parsed program through a fresh engine, collecting one record
/// per RUN. Every RUN sees the same input tensor.
pub fn run_program(program: &[Instruction], input: &Tensor) -> Result<Vec<RunRecord>, ProgramError> {
    let mut engine = Engine::new();
    let mut records = Vec::new();
    for instr in program {
        match instr {
            Instruction::SetMode(mode) => engine.set_mode(*mode),
            Instruction::SetParams(pairs) => engine.merge_params(pairs),
            Instruction::LoadWeights(values) => engine.load_weights(values.clone()),
            Instruction::Run => records.push(engine.run(input)?),
        }
    }
    Ok(records)
}
