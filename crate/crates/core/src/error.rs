use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("k = {k} exceeds the number of points n = {n}")]
    KTooLarge { k: usize, n: usize },
    #[error("delta = {0} is outside [0, 0.5)")]
    BadDelta(f64),
    #[error("round budget must be at least 1")]
    BadM,
    #[error("c_mult = {0} must be finite and positive")]
    BadCMult(f64),
    #[error("safety cap must be at least 1")]
    BadSafetyCap,
    #[error("input contains a non-finite value at position {0}")]
    NonFiniteInput(usize),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("point buffer of length {len} is not a multiple of dimension {d}")]
    ShapeMismatch { len: usize, d: usize },
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("distribution has zero total mass")]
    ZeroMass,
    #[error("acceptance ratio has a zero denominator but a positive distance")]
    ZeroDenominator,
    #[error("rejection loop exceeded the safety cap of {0} rounds")]
    SafetyCapExceeded(u64),
    #[error("probability {0} is outside (0, 1]")]
    BadProbability(f64),
    #[error("worker count must be at least 1")]
    BadWorkerCount,
    #[error("partition has {got} labels but the dataset has {expected} points")]
    PartitionMismatch { got: usize, expected: usize },
    #[error("partition label {label} is not below the cluster count {clusters}")]
    PartitionLabel { label: usize, clusters: usize },
    #[error("center set is empty")]
    EmptyCenters,
    #[error("estimated clustering cost is zero")]
    ZeroCost,
    #[error("at least {needed} samples required, got {got}")]
    TooFewSamples { needed: usize, got: usize },
}
