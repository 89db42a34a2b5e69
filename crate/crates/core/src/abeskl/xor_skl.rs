//! A leasing scheme whose encryption is XOR-only, so it can be garbled.
//!
//! `ek = (p0, p1)`, the key is `(|0, p0> + |1, p1>) / sqrt(2)` and
//! `Enc(ek, m; R) = (m ^ p0 ^ R, m ^ p1 ^ R, R)`. Branch `b` decrypts with
//! `ct_b ^ d_b ^ R`.
//!
//! The encryption key reveals both branch keys, so this scheme hides
//! nothing by itself. It only carries the leasing mechanics (superposed key,
//! coherent decryption, projective verification) inside the ABE
//! conversions, where confidentiality comes from the ABE and garbling layers.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::circuits::{BoolCircuit, CircuitBuilder};
use crate::error::{Error, Result};
use crate::qsim::Ket;
use crate::skl::{coherent_block_decrypt, project_onto_blocks, superposed_block, QuantumKey, VerificationOutcome};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct XorSklEncKey {
    pub p0: BitString,
    pub p1: BitString,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct XorSklVerKey {
    pub block: usize,
    pub d0: BitString,
    pub d1: BitString,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct XorSklCiphertext {
    pub c0: BitString,
    pub c1: BitString,
    pub r: BitString,
}

impl XorSklEncKey {
    pub fn msg_bits(&self) -> usize {
        self.p0.len()
    }

    /// `p0 || p1`, the input of the encryption circuit.
    pub fn to_bits(&self) -> BitString {
        self.p0.concat(&self.p1)
    }

    pub fn from_bits(bits: &BitString) -> Result<Self> {
        if !bits.len().is_multiple_of(2) {
            return Err(Error::Length {
                what: "encryption key encoding",
                expected: bits.len() + 1,
                actual: bits.len(),
            });
        }
        let l = bits.len() / 2;
        Ok(Self {
            p0: bits.slice(0..l),
            p1: bits.slice(l..2 * l),
        })
    }
}

impl XorSklVerKey {
    pub fn target(&self) -> Result<Ket> {
        superposed_block(self.block, &self.d0, &self.d1)
    }
}

impl XorSklCiphertext {
    pub fn to_bits(&self) -> BitString {
        BitString::concat_all([&self.c0, &self.c1, &self.r])
    }

    pub fn from_bits(bits: &BitString, msg_bits: usize) -> Result<Self> {
        if bits.len() != 3 * msg_bits {
            return Err(Error::Length {
                what: "ciphertext encoding",
                expected: 3 * msg_bits,
                actual: bits.len(),
            });
        }
        let l = msg_bits;
        Ok(Self {
            c0: bits.slice(0..l),
            c1: bits.slice(l..2 * l),
            r: bits.slice(2 * l..3 * l),
        })
    }
}

/// Key triple for block `block`; the key occupies registers `b{block}` and
/// `dk{block}`.
pub fn keygen<R: Rng + ?Sized>(
    msg_bits: usize,
    block: usize,
    rng: &mut R,
) -> Result<(XorSklEncKey, Ket, XorSklVerKey)> {
    if msg_bits == 0 {
        return Err(Error::Params("message length must be at least 1".into()));
    }
    let p0 = BitString::random(msg_bits, rng);
    let mut p1 = BitString::random(msg_bits, rng);
    while p1 == p0 {
        p1 = BitString::random(msg_bits, rng);
    }
    let vk = XorSklVerKey {
        block,
        d0: p0.clone(),
        d1: p1.clone(),
    };
    Ok((XorSklEncKey { p0, p1 }, vk.target()?, vk))
}

pub fn encrypt_with(ek: &XorSklEncKey, m: &BitString, r: &BitString) -> Result<XorSklCiphertext> {
    if m.len() != ek.msg_bits() || r.len() != ek.msg_bits() {
        return Err(Error::Length {
            what: "message",
            expected: ek.msg_bits(),
            actual: m.len(),
        });
    }
    let k = m.xor(r)?;
    Ok(XorSklCiphertext {
        c0: k.xor(&ek.p0)?,
        c1: k.xor(&ek.p1)?,
        r: r.clone(),
    })
}

pub fn encrypt<R: Rng + ?Sized>(ek: &XorSklEncKey, m: &BitString, rng: &mut R) -> Result<XorSklCiphertext> {
    let r = BitString::random(ek.msg_bits(), rng);
    encrypt_with(ek, m, &r)
}

/// Circuit mapping `p0 || p1` to the encoding of `Enc(ek, m; R)`.
///
/// `m ^ R` and `R` are constant gates, so the wiring depends only on `|m|`.
pub fn enc_circuit(m: &BitString, r: &BitString) -> Result<BoolCircuit> {
    if m.len() != r.len() || m.is_empty() {
        return Err(Error::Length {
            what: "randomness",
            expected: m.len(),
            actual: r.len(),
        });
    }
    let l = m.len();
    let mut c = CircuitBuilder::new(2 * l);
    let masks: Vec<usize> = m.iter().zip(r.iter()).map(|(a, b)| c.constant(a ^ b)).collect();
    let rs: Vec<usize> = r.iter().map(|b| c.constant(b)).collect();
    let c0: Vec<usize> = (0..l).map(|j| c.xor(j, masks[j])).collect();
    let c1: Vec<usize> = (0..l).map(|j| c.xor(l + j, masks[j])).collect();
    let outs = c0.into_iter().chain(c1).chain(rs).collect();
    Ok(c.finish(outs)?)
}

/// Coherent decryption with the key of block `block`.
pub fn decrypt<R: Rng + ?Sized>(
    key: &QuantumKey,
    block: usize,
    ct: &XorSklCiphertext,
    rng: &mut R,
) -> Result<(Option<BitString>, QuantumKey)> {
    let l = ct.r.len();
    if ct.c0.len() != l || ct.c1.len() != l {
        return Err(Error::CorruptCiphertext("ciphertext parts differ in length".into()));
    }
    coherent_block_decrypt(
        key,
        block,
        l,
        |b, d| {
            let c = if b { &ct.c1 } else { &ct.c0 };
            c.xor(d).ok()?.xor(&ct.r).ok()
        },
        rng,
    )
}

pub fn verify<R: Rng + ?Sized>(vk: &XorSklVerKey, key: &QuantumKey, rng: &mut R) -> Result<VerificationOutcome> {
    project_onto_blocks(&[vk.target()?], key, rng)
}
