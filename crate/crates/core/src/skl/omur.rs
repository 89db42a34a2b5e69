//! Verification that first checks the returned key still decrypts: encrypt a
//! fresh random message, decrypt it coherently with the returned key, reject
//! on a wrong answer, and otherwise run the inner verification on the
//! post-decryption state.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{LeasedKeys, LeasingScheme, QuantumKey, VerificationOutcome};
use crate::bits::BitString;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct OmurVerKey<S: LeasingScheme> {
    pub vk: S::VerKey,
    pub ek: S::EncKey,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OmurScheme<S> {
    pub inner: S,
}

impl<S> OmurScheme<S> {
    pub fn new(inner: S) -> Self {
        Self { inner }
    }
}

pub fn omur_vrfy<S, R>(scheme: &S, vk: &OmurVerKey<S>, key: &QuantumKey, rng: &mut R) -> Result<VerificationOutcome>
where
    S: LeasingScheme<Aux = ()>,
    R: Rng + ?Sized,
{
    let m = scheme.sample_message(rng);
    let ct = scheme.encrypt(&vk.ek, &m, rng)?;
    let (decrypted, post) = scheme.decrypt(&(), key, &ct, rng)?;
    if decrypted.as_ref() != Some(&m) {
        return Ok(VerificationOutcome {
            accepted: false,
            post_key: post,
        });
    }
    scheme.verify(&vk.vk, &post, rng)
}

impl<S> LeasingScheme for OmurScheme<S>
where
    S: LeasingScheme<Aux = ()> + Clone + std::fmt::Debug + PartialEq + 'static,
{
    type EncKey = S::EncKey;
    type VerKey = OmurVerKey<S>;
    type Ciphertext = S::Ciphertext;
    type Aux = ();

    fn name(&self) -> &'static str {
        self.inner.name()
    }

    fn message_bits(&self) -> usize {
        self.inner.message_bits()
    }

    fn blocks(&self) -> usize {
        self.inner.blocks()
    }

    fn keygen<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<LeasedKeys<Self>> {
        let k = self.inner.keygen(rng)?;
        Ok(LeasedKeys {
            ek: k.ek.clone(),
            aux: (),
            qdk: k.qdk,
            vk: OmurVerKey { vk: k.vk, ek: k.ek },
        })
    }

    fn encrypt<R: Rng + ?Sized>(&self, ek: &S::EncKey, m: &BitString, rng: &mut R) -> Result<S::Ciphertext> {
        self.inner.encrypt(ek, m, rng)
    }

    fn decrypt<R: Rng + ?Sized>(
        &self,
        aux: &(),
        key: &QuantumKey,
        ct: &S::Ciphertext,
        rng: &mut R,
    ) -> Result<(Option<BitString>, QuantumKey)> {
        self.inner.decrypt(aux, key, ct, rng)
    }

    fn verify<R: Rng + ?Sized>(&self, vk: &OmurVerKey<S>, key: &QuantumKey, rng: &mut R) -> Result<VerificationOutcome> {
        omur_vrfy(&self.inner, vk, key, rng)
    }

    fn sample_message<R: Rng + ?Sized>(&self, rng: &mut R) -> BitString {
        self.inner.sample_message(rng)
    }
}
