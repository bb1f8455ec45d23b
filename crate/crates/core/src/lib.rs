//! Monotone quantum metrics and metric adjusted skew information.
//!
//! * [`mcfunc`]: Morozova–Chentsov functions, their metric constants and
//!   the kernels `ĉ` and `d` behind skew information.
//! * [`repr`]: representing measures on `[0, 1]` and the `h` representation,
//!   with reconstruction back to the kernel.
//! * [`qig`]: density matrices, observables, channels and the quantities
//!   built from a metric (skew information, correlation, λ-skew information).
//! * [`harness`]: seeded random sampling and the property suites.
//! * [`cli`]: the `skewinfo` command.

pub mod cli;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod matfile;
pub mod mcfunc;
pub mod qig;
pub mod quad;
pub mod report;
pub mod repr;

pub use error::{Error, Result};
pub use mcfunc::{MCFunction, MetricConstant};
pub use qig::{DensityMatrix, Observable, QuantumChannel};
