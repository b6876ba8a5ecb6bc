use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatError {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("expected {rows}x{cols} = {} entries, got {len}", rows * cols)]
    EntryCount { rows: usize, cols: usize, len: usize },
    #[error("matrix is not square: {0:?}")]
    NotSquare((usize, usize)),
    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
    #[error("{0} did not converge")]
    NoConvergence(&'static str),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("empty Kraus list")]
    Empty,
    #[error("Kraus operator {index} has shape {shape:?}, expected {dim}x{dim}")]
    Ragged {
        index: usize,
        shape: (usize, usize),
        dim: usize,
    },
    #[error("not trace preserving: ||sum E_a^dag E_a - I||_F = {residual:.3e}")]
    NotTracePreserving { residual: f64 },
    #[error("channel dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("operator shape {shape:?} does not match channel dimension {dim}")]
    OperandShape { shape: (usize, usize), dim: usize },
    #[error("Choi matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("Choi matrix has shape {shape:?}, expected {expected}x{expected}")]
    ChoiShape { shape: (usize, usize), expected: usize },
    #[error(transparent)]
    Mat(#[from] MatError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("generators must be square matrices of one dimension")]
    Generators,
    #[error("algebra is not closed under {0}")]
    NotClosed(&'static str),
    #[error("algebra does not contain the identity")]
    NotUnital,
    #[error(
        "numerical degeneracy while splitting blocks ({detail}); seeds tried: {seeds:?}. \
         Retry with a different seed or a looser tolerance"
    )]
    Degenerate { detail: String, seeds: Vec<u64> },
    #[error("matrix units must be a non-empty square array of equally sized operators")]
    MatrixUnits,
    #[error("operator shape {shape:?} does not match ambient dimension {dim}")]
    Shape { shape: (usize, usize), dim: usize },
    #[error(transparent)]
    Mat(#[from] MatError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiselessError {
    #[error("decomposition does not fit: m*n = {mn} exceeds dimension {dim}")]
    TooLarge { mn: usize, dim: usize },
    #[error("isometry has shape {shape:?}, expected {dim}x{mn}")]
    IsometryShape {
        shape: (usize, usize),
        dim: usize,
        mn: usize,
    },
    #[error("isometry columns are not orthonormal (residual {residual:.3e})")]
    NotIsometry { residual: f64 },
    #[error("channel dimension {channel} differs from decomposition dimension {decomposition}")]
    DimensionMismatch { channel: usize, decomposition: usize },
    #[error("operator shape {shape:?}, expected {expected}x{expected}")]
    OperandShape { shape: (usize, usize), expected: usize },
    #[error("the subsystem is not noiseless for this channel (cond1 {cond1:.3e}, cond2 {cond2:.3e})")]
    NotNoiseless { cond1: f64, cond2: f64 },
    #[error(
        "channel is not unital (residual {residual:.3e}); commutant discovery needs a unital \
         channel. Use verify_ns with a candidate decomposition, or the UNS tools"
    )]
    NotUnital { residual: f64 },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Mat(#[from] MatError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CorrectionError {
    #[error("operator is not an orthogonal projector (residual {residual:.3e})")]
    NotProjector { residual: f64 },
    #[error("projector shape {shape:?} does not match channel dimension {dim}")]
    ProjectorShape { shape: (usize, usize), dim: usize },
    #[error("code projector is zero")]
    EmptyCode,
    #[error("Knill-Laflamme condition violated (residual {residual:.3e})")]
    KnillLaflamme { residual: f64 },
    #[error("correctability condition violated (residual {residual:.3e})")]
    NotCorrectable { residual: f64 },
    #[error("recovery synthesis failed: {0}")]
    Synthesis(String),
    #[error("index k = {k} out of range 1..={m}")]
    IndexOutOfRange { k: usize, m: usize },
    #[error("the triple is not correctable (deviation {deviation:.3e})")]
    TripleNotCorrectable { deviation: f64 },
    #[error(transparent)]
    Noiseless(#[from] NoiselessError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Mat(#[from] MatError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UnsError {
    #[error("U is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },
    #[error(
        "channel is not unital (residual {residual:.3e}); the commutant characterization of \
         unitarily noiseless subsystems requires a unital channel"
    )]
    NotUnital { residual: f64 },
    #[error("U has shape {shape:?}, channel dimension is {dim}")]
    Shape { shape: (usize, usize), dim: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Correction(#[from] CorrectionError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExampleError {
    #[error("parameter {name} = {value} outside {range}")]
    ParameterRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("basis must be a 4x4 unitary (residual {residual:.3e})")]
    Basis { residual: f64 },
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Noiseless(#[from] NoiselessError),
    #[error(transparent)]
    Uns(#[from] UnsError),
}
