use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Levels do not form a strictly increasing divisibility chain.
    InvalidChain(String),
    /// Two objects were built at different truncation depths or chains.
    DepthMismatch { expected: usize, found: usize },
    /// The integer is not a level of the chain.
    NotAChainLevel(u64),
    /// Fibers over 0 and infinity are singletons.
    Cusp,
    /// No chain rational reproduces the linear growth of the samples.
    NotSolenoidal(String),
    /// A frequency denominator does not divide the top level.
    DenominatorOutsideChain { den: u64, top: u64 },
    /// `n` does not divide `m`.
    NotDivisible { n: u64, m: u64 },
    /// A reality-flagged series violates `a_{-q} = conj(a_q)`.
    RealityViolation,
    /// Fixed-point iteration did not reach the tolerance.
    NonConvergence { iterations: usize, update: f64 },
    /// A normalization or lift met a degenerate value.
    Degenerate(String),
    /// A target lies outside the computational window.
    OutsideWindow(String),
    /// The grid is too small for the requested support.
    WindowTooSmall { required_half_width: f64 },
    /// The branch of the logarithm could not be continued.
    BranchAmbiguity(String),
    /// An operation restricted to mean-zero series received a constant term.
    NonzeroMean,
    /// A Beltrami coefficient violates `sup |mu| < 1` or its certificate.
    NotAdmissible(String),
    InvalidInput(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidChain(m) => write!(f, "invalid chain: {m}"),
            Error::DepthMismatch { expected, found } => {
                write!(f, "depth mismatch: expected {expected}, found {found}")
            }
            Error::NotAChainLevel(n) => write!(f, "{n} is not a level of the chain"),
            Error::Cusp => write!(f, "point is a cusp (0 or infinity)"),
            Error::NotSolenoidal(m) => write!(f, "not solenoidal at this depth: {m}"),
            Error::DenominatorOutsideChain { den, top } => {
                write!(f, "frequency denominator {den} does not divide top level {top}")
            }
            Error::NotDivisible { n, m } => write!(f, "{n} does not divide {m}"),
            Error::RealityViolation => write!(f, "reality symmetry a(-q) = conj a(q) violated"),
            Error::NonConvergence { iterations, update } => {
                write!(f, "no convergence after {iterations} iterations (last update {update:e})")
            }
            Error::Degenerate(m) => write!(f, "degenerate: {m}"),
            Error::OutsideWindow(m) => write!(f, "outside window: {m}"),
            Error::WindowTooSmall { required_half_width } => {
                write!(f, "grid window too small; half-width must exceed {required_half_width}")
            }
            Error::BranchAmbiguity(m) => write!(f, "branch ambiguity: {m}"),
            Error::NonzeroMean => write!(f, "series has a nonzero constant term"),
            Error::NotAdmissible(m) => write!(f, "not admissible: {m}"),
            Error::InvalidInput(m) => write!(f, "invalid input: {m}"),
        }
    }
}

impl core::error::Error for Error {}
