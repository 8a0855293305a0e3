//! q-special functions of the Ramanujan equation and their connection formulae.
//!
//! - [`qcore`]: q-Pochhammer symbols, theta, `r_phi_s`, q-exponentials
//! - [`series`]: truncated formal power series and q-difference operators
//! - [`transforms`]: q-Borel/q-Laplace transforms of both kinds, covering transformation
//! - [`special`]: Ramanujan function, q-Airy function, resummed `2phi0`
//! - [`verify`]: connection formulae as numerical identity checks over complex grids
//! - [`cli`]: helpers behind the `qconnect` binary

pub mod cli;
pub mod error;
pub mod qcore;
pub mod series;
pub mod special;
pub mod transforms;
pub mod verify;

pub use error::{QError, Result};
pub use num_complex::Complex64;
pub use qcore::{QModulus, Spiral, Summed, Truncation};
