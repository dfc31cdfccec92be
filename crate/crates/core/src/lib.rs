//! Conic-programming upper bounds on the independence number of graphs.
//!
//! The crate computes the Lovász number `ϑ`, Schrijver's `ϑ′` and the
//! sum-of-squares hierarchy `ϑ^(r)` as instances of one conic program over a
//! family of cones, tests whether cone families are closed under the `⊙`
//! product, and builds explicit certificates that cones strictly larger than
//! the PSD cone lose that closure.
//!
//! Modules:
//! - [`graphs`]: graphs, strong products, exact `α` and `χ`.
//! - [`symmat`]: symmetric matrices, `⊗`, `⊙`, PSD and copositivity oracles.
//! - [`sdp`]: a dense primal-dual interior-point solver for PSD/LP block programs.
//! - [`bounds`]: the `ϑ` family and cone-membership tests.
//! - [`productprop`]: product-property checks and the counterexample pipeline.

pub mod bounds;
pub mod error;
pub mod graphs;
pub mod limits;
pub mod productprop;
pub mod sdp;
pub mod symmat;
pub mod tolerance;

pub use error::{Error, Result};
pub use graphs::Graph;
pub use limits::Limits;
pub use symmat::SymMatrix;
