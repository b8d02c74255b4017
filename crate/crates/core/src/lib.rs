//! Density-matrix quantum-channel simulation and verification toolkit.
//!
//! The crate simulates finite-dimensional quantum channels in Kraus form and
//! certifies two families of claims about channels that approximate the
//! quantum Fourier transform (QFT) or its inverse:
//!
//! * **Average-case closeness** ([`closeness`]): six functionals (`s1`..`t3`)
//!   measuring how close a channel is to `F_N⁻¹` (the `S` family) or to `F_N`
//!   (the `T` family) on average over basis states, together with the exact
//!   composition inequalities that relate them, and lightweight shot-based
//!   verification protocols ([`verify`]) whose per-shot success probabilities
//!   equal those functionals.
//! * **Worst-case pipeline bounds** ([`hhl`]): a seven-step
//!   phase-estimation/controlled-rotation pipeline (the HHL linear-system
//!   circuit) run with imperfect QFT channels over a random-shift ensemble
//!   `A + l·I/N`, certifying fidelity, expectation-value, and trace-distance
//!   bounds that degrade gracefully in the average-case deviation `η`.
//!
//! Everything is deterministic: randomness flows from explicit 64-bit seeds
//! through named substreams ([`rng`]), closeness measures are evaluated by
//! exact enumeration, and theorem checks consume exact measures rather than
//! sampled estimates.

#![forbid(unsafe_code)]

pub mod channel;
pub mod closeness;
pub mod config;
pub mod hhl;
pub mod noise;
pub mod numerics;
pub mod report;
pub mod rng;
pub mod suite;
pub mod tol;
pub mod verify;

pub use num_complex::Complex64;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch in {context}: expected {expected}, got {found}")]
    DimMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("matrix is not Hermitian: max |H - H†| entry {defect:.3e} exceeds {tol:.1e}")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("matrix is not unitary: max |U†U - I| entry {defect:.3e} exceeds {tol:.1e}")]
    NotUnitary { defect: f64, tol: f64 },

    #[error("operator is not positive semidefinite: eigenvalue {eigenvalue:.3e} below -{tol:.1e}")]
    NotPsd { eigenvalue: f64, tol: f64 },

    #[error("trace is {trace:.15}, expected 1 within {tol:.1e}")]
    BadTrace { trace: f64, tol: f64 },

    #[error("vector norm is {norm:.15}, expected 1 within {tol:.1e}")]
    BadNorm { norm: f64, tol: f64 },

    #[error("Kraus family does not preserve trace: max |ΣA†A - I| entry {defect:.3e} exceeds {tol:.1e}")]
    NotTracePreserving { defect: f64, tol: f64 },

    #[error("Kraus family is empty")]
    EmptyKraus,

    #[error("register width {n} outside supported range 1..={max}")]
    BadRegisterCount { n: u32, max: u32 },

    #[error("dimension {dim} is not a power of two")]
    NotPowerOfTwo { dim: usize },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off:.3e})")]
    EigNoConvergence { sweeps: usize, off: f64 },

    #[error("channel application produced a value with imaginary residue {imag:.3e} beyond {tol:.1e}; the channel is not a valid CPTP map")]
    ImaginaryResidue { imag: f64, tol: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    BadParam { name: &'static str, reason: String },

    #[error("channel file: {0}")]
    ChannelFile(String),

    #[error("report file: {0}")]
    ReportFile(String),

    #[error("configuration invalid:\n{}", .errors.join("\n"))]
    ConfigInvalid { errors: Vec<String> },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
