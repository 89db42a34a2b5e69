//! Attribute-based encryption with leased keys.
//!
//! * [`toy_abe`]: equality-relation ABE from public-key encryption.
//! * [`xor_skl`]: a leasing scheme with XOR-only encryption.
//! * [`abe1`]: one-key ABE from the two above and garbling.
//! * [`qabe`]: many-key ABE over a grid of one-key instances.

pub mod abe1;
pub mod qabe;
pub mod toy_abe;
pub mod xor_skl;

pub use abe1::{Abe1Ciphertext, Abe1ClassicalKey, Abe1MasterKey, Abe1Params, Abe1PublicKey, Abe1Scheme};
pub use qabe::{
    bins_distinctness_probability, bins_monte_carlo, qabe_params, QabeCiphertext, QabeClassicalKey, QabeParams,
    QabePublicKey, QabeScheme, QabeVerKey, SecurityMode,
};
pub use toy_abe::{ToyAbeCiphertext, ToyAbeMasterKey, ToyAbeParams, ToyAbePublicKey, ToyAbeSecretKey};
pub use xor_skl::{XorSklCiphertext, XorSklEncKey, XorSklVerKey};
