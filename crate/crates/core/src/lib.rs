//! Exact GF(2) computations for oriented Grassmann manifolds `G~_{n,k}`.
//!
//! * [`gf2poly`]: weighted polynomials over GF(2) in `w1..wk`.
//! * [`duals`]: dual Stiefel-Whitney classes `wbar_i` and their reductions (`g_i`, ...).
//! * [`cohomology`]: the Borel presentation of `H*(G_{n,k})` degree by degree, multiplication by
//!   `w1`, and Betti numbers of the double cover from the Gysin sequence.
//! * [`rank_cup`]: characteristic rank of the canonical bundle over `G~_{n,k}` and cup-length
//!   bounds.
//! * [`verify`]: reproducible check suites used by the CLI.

pub mod cache;
pub mod cohomology;
pub mod duals;
pub mod error;
pub mod gf2poly;
pub mod linalg;
pub mod rank_cup;
pub mod verify;

pub use cohomology::{Cohomology, DegreeSlice, GrassmannContext, GysinReport, GysinRow};
pub use duals::{
    dual_class, g, scan_vanishing, verify_frobenius_recurrence, DualTable, ReductionScan,
};
pub use error::{Error, Result};
pub use gf2poly::{enumerate_monomials, Monomial, Poly, VarSpec};
pub use rank_cup::{
    charrank_oriented, cup_lower_sw, cup_upper, predicted_charrank, CharrankResult, CharrankValue,
    CupBoundReport, Prediction,
};
