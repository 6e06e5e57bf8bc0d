//! Exact moduli of the generalized concave Kurdyka-Łojasiewicz property for
//! one-dimensional piecewise functions, rival desingularizing-function
//! constructions, and a PALM solver with a verified per-iteration ledger and
//! trajectory-length certificates.
//!
//! Everything is immutable after construction and safe to use from multiple
//! threads.

pub mod analytic;
pub mod catalog;
pub mod dc;
pub mod desingularizers;
pub mod modulus;
pub mod numerics;
pub mod palm;
pub mod piecewise;

pub use modulus::{
    exact_modulus, exact_modulus_convex_c1, h_of_s, setwise_modulus, verify_gkl, Desingularizer,
    ExactModulus, KlContext, KlOracle, ModulusError, Provenance,
};
pub use piecewise::{BandSet, FunctionError, Interval, Piece, PieceForm, Piecewise1D, SubdiffSet};
