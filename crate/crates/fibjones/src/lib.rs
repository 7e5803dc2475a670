//! Jones polynomial of braid trace closures at t = e^{2πi/5}.
//!
//! Three independent evaluation routes share one set of constants:
//!
//! - [`jones`]: the weighted Markov trace of the Fibonacci representation
//!   built in [`fibrep`];
//! - [`oracle`]: a brute-force Temperley-Lieb state sum with diagrammatic
//!   loop counting, used as ground truth;
//! - [`compiler`] + [`dqc1`]: a reversible-arithmetic circuit over the
//!   Zeckendorf bit encoding whose one-clean-qubit trace estimate recovers
//!   the same value.
//!
//! [`reduction`] holds the hardness-direction building blocks: superblock
//! bit coding, the inchworm swap, SU(2) density diagnostics, and the
//! two-level and seven-block unitary decompositions.

pub mod braid;
pub mod cli;
pub mod compiler;
pub mod dqc1;
pub mod error;
pub mod fibrep;
pub mod jones;
pub mod linalg;
pub mod oracle;
pub mod reduction;

pub use braid::{format_braid, parse_braid, BraidWord, MarkovMove};
pub use error::{Error, Result};
pub use fibrep::{constants, fibonacci, Sector, SymbolString};
pub use jones::{jones_value, weighted_trace, JonesResult};
pub use oracle::{oracle_jones, oracle_trace};
