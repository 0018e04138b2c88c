//! Logarithms of filtered automorphisms: the Maclaurin series for the
//! unipotent case, the extended logarithm for exponential solvable degree-one
//! parts, and BCH utilities used to cross-check them.

mod bch;
mod ln_aut;
mod unipotent;

pub use bch::{bch_series, bch_single_y_kernel, BchResult};
pub use ln_aut::{ln_aut, DegreeTrace, LogOptions, LogReport};
pub use unipotent::log_unipotent;
