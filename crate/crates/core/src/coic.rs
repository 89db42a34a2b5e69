//! PKE built from one-key CPFE: the key is a functional key for a random
//! attribute `x`, and a ciphertext of `m` is a CPFE encryption of the constant
//! circuit `C[m]` laid out on the canonical mux skeleton.
//!
//! Decryption is deterministic, which lets the leasing layer run it as a
//! classical map inside a superposition of keys.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::circuits::{build_const_circuit, CircuitShape};
use crate::cpfe::{self, CpfeCiphertext, CpfeMasterPublicKey, CpfeParams, CpfeSecretKey};
use crate::error::{Error, Result};
use crate::pke::{Pke, Regev};

pub const DEFAULT_ATTR_LEN: usize = 8;
pub const DEFAULT_MSG_BITS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CoicParams<P: Pke = Regev> {
    pub attr_len: usize,
    pub msg_bits: usize,
    pub pke: P::Params,
}

impl Default for CoicParams<Regev> {
    fn default() -> Self {
        Self {
            attr_len: DEFAULT_ATTR_LEN,
            msg_bits: DEFAULT_MSG_BITS,
            pke: Default::default(),
        }
    }
}

impl<P: Pke> CoicParams<P> {
    pub fn cpfe(&self) -> CpfeParams<P> {
        CpfeParams::new(self.attr_len, self.pke.clone())
    }

    pub fn validate(&self) -> Result<()> {
        if self.msg_bits == 0 {
            return Err(Error::Params("message length must be at least 1".into()));
        }
        self.cpfe().validate()
    }

    /// Width of a decryption key's bit encoding.
    pub fn dk_bits(&self) -> usize {
        self.cpfe().secret_key_bits()
    }

    /// The public shape every ciphertext circuit must have.
    pub fn ciphertext_shape(&self) -> Result<CircuitShape> {
        Ok(build_const_circuit(&BitString::zeros(self.msg_bits), self.attr_len)?.shape())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CoicEncKey<P: Pke = Regev> {
    pub params: CoicParams<P>,
    mpk: CpfeMasterPublicKey<P>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CoicDecKey<P: Pke = Regev> {
    pub params: CoicParams<P>,
    sk: CpfeSecretKey<P>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CoicKeyPair<P: Pke = Regev> {
    pub ek: CoicEncKey<P>,
    pub dk: CoicDecKey<P>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CoicCiphertext<P: Pke = Regev> {
    pub inner: CpfeCiphertext<P>,
}

impl<P: Pke> CoicDecKey<P> {
    pub fn attribute(&self) -> &BitString {
        &self.sk.x
    }

    pub fn to_bits(&self) -> BitString {
        self.sk.to_bits()
    }

    pub fn from_bits(params: &CoicParams<P>, bits: &BitString) -> Result<Self> {
        Ok(Self {
            params: params.clone(),
            sk: CpfeSecretKey::from_bits(&params.cpfe(), bits)?,
        })
    }
}

pub fn keygen<P: Pke, R: Rng + ?Sized>(params: &CoicParams<P>, rng: &mut R) -> Result<CoicKeyPair<P>> {
    params.validate()?;
    let keys = cpfe::setup(&params.cpfe(), rng)?;
    let x = BitString::random(params.attr_len, rng);
    let sk = cpfe::keygen(&keys.msk, &x)?;
    Ok(CoicKeyPair {
        ek: CoicEncKey {
            params: params.clone(),
            mpk: keys.mpk,
        },
        dk: CoicDecKey {
            params: params.clone(),
            sk,
        },
    })
}

pub fn encrypt<P: Pke, R: Rng + ?Sized>(ek: &CoicEncKey<P>, m: &BitString, rng: &mut R) -> Result<CoicCiphertext<P>> {
    if m.len() != ek.params.msg_bits {
        return Err(Error::Length {
            what: "message",
            expected: ek.params.msg_bits,
            actual: m.len(),
        });
    }
    let c = build_const_circuit(m, ek.params.attr_len)?;
    Ok(CoicCiphertext {
        inner: cpfe::encrypt(&ek.mpk, &c, rng)?,
    })
}

pub fn decrypt<P: Pke>(dk: &CoicDecKey<P>, ct: &CoicCiphertext<P>) -> Result<BitString> {
    if ct.inner.shape() != &dk.params.ciphertext_shape()? {
        return Err(Error::CorruptCiphertext("circuit is not the canonical skeleton".into()));
    }
    cpfe::decrypt(&dk.sk, &ct.inner)
}
