//! Bound states of the ultrarelativistic Hamiltonian `sqrt(-Δ) + V` in a
//! finite spherical well.
//!
//! The kinetic term is the Cauchy operator, the `α = 1` fractional Laplacian,
//! defined through a principal-value integral. The well is the step potential
//! that vanishes inside the unit ball and equals `V0` outside; the energy
//! scale puts the continuum edge at `V0`, so a bound state is an eigenvalue
//! strictly below `V0`.
//!
//! The crate discretizes the principal-value kernels on uniform midpoint
//! grids ([`grid`]), applies them per orbital sector ([`operators`]), and
//! converges eigenpairs by an imaginary-time Strang-splitting power iteration
//! with Gram-Schmidt deflation for excited states ([`evolution`]). Finite
//! integration cutoffs are extrapolated to infinity by a `c/a` tail law
//! ([`renorm`]). On top of that sit existence verdicts, well-depth threshold
//! scans and tunneling observables ([`spectrum`]), and an independent
//! dense-matrix Jacobi diagonalization used to cross-check the iterative
//! solver ([`oracle`]).
//!
//! Kernel applications are data-parallel over output nodes and fan out with
//! rayon when the default `parallel` feature is enabled; disabling it yields
//! a bit-identical sequential build.

pub mod evolution;
pub mod grid;
pub mod operators;
pub mod oracle;
pub mod renorm;
pub mod spectrum;

pub(crate) mod exec;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid node limit exceeded: requested {requested} nodes, limit {limit}")]
    NodeLimit { requested: usize, limit: usize },

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("sector mismatch: {0}")]
    SectorMismatch(String),

    #[error("states live on different grids")]
    GridMismatch,

    #[error("state has {got} samples but grid has {expected} nodes")]
    SampleCount { got: usize, expected: usize },

    #[error("non-finite samples produced during {context}")]
    NonFinite { context: &'static str },

    #[error("invalid solver parameters: {0}")]
    InvalidParams(String),

    #[error("overlap <phi|S phi> = {value} is not positive; iteration left the physical cone")]
    OverlapNotPositive { value: f64 },

    #[error("cannot normalize a state with zero norm")]
    ZeroNorm,

    #[error("evolution became unstable: {0}; try a smaller step h")]
    Unstable(String),

    #[error("invalid tail interval: a = {a}, b = {b}")]
    InvalidTailInterval { a: f64, b: f64 },

    #[error("undetermined existence verdict at v0 = {v0} (sector {sector}, n = {n}); finer solver settings needed")]
    Undetermined { v0: f64, sector: String, n: usize },

    #[error("oracle node limit exceeded: grid has {nodes} nodes, limit {limit}")]
    OracleNodeLimit { nodes: usize, limit: usize },

    #[error("Jacobi rotations failed to converge after {sweeps} sweeps")]
    JacobiNoConvergence { sweeps: usize },

    #[error("invalid spherical harmonic indices: l = {l}, m = {m}")]
    InvalidHarmonic { l: i32, m: i32 },

    #[error("v0 = {v0} sits on a degenerate nonrelativistic threshold")]
    DegenerateThreshold { v0: f64 },

    #[error("state is not normalized in its sector norm (norm = {norm})")]
    Unnormalized { norm: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
