//! Secure key leasing for public-key, functional and attribute-based
//! encryption, run on a classical simulator of the quantum key states.

pub mod abeskl;
pub mod bits;
pub mod circuits;
pub mod coic;
pub mod cpfe;
pub mod error;
pub mod harness;
pub mod pke;
pub mod qsim;
pub mod skl;

pub use bits::{inner_product_bits, BitString};
pub use error::{Error, Result};

/// Code listings from the guide in `book/`, run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/lifecycle.md")]
    mod lifecycle {}
    #[doc = include_str!("../../../book/src/simulator.md")]
    mod simulator {}
    #[doc = include_str!("../../../book/src/circuits.md")]
    mod circuits {}
    #[doc = include_str!("../../../book/src/abe.md")]
    mod abe {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
