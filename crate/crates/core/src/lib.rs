//! Laboratory for quantum order finding with a single run.
//!
//! The crate simulates the measured frequency of the order-finding circuit
//! exactly, solves each frequency (and its neighbours) for candidate orders
//! with continued fractions or two-dimensional lattice reduction, recovers
//! the order from a candidate multiple with bounded classical effort, and
//! evaluates the analytic lower bounds on the success probability.
//!
//! ```
//! use ofsim::bounds::{floor5, single_run_success_bound, BoundInputs, REliminationMode};
//!
//! let p = single_run_success_bound(&BoundInputs {
//!     m: 128,
//!     ell: 128,
//!     b: 10,
//!     c: 10.0,
//!     r_elimination: REliminationMode::Sqrt,
//! })
//! .unwrap();
//! assert_eq!(floor5(p), "0.96920");
//! ```

// `!(x >= lo)` is used deliberately so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arith;
pub mod bounds;
pub mod cf;
pub mod distribution;
pub mod error;
pub mod exec;
pub mod group;
pub mod lattice;
pub mod model;
pub mod numeric;
pub mod pipeline;
pub mod recovery;

pub use error::{Error, Result};
pub use group::{CyclicGroup, ModNGroup, SimulatedGroup};
pub use model::{DerivedParams, Params, SimRng};
