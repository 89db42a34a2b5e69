//! Single-bit encryption from the one-way scheme: encrypt a random `x`,
//! publish a random `r`, and mask the bit with `x · r`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ow::{self, SklCiphertext, SklEncKey, SklParams, SklVerKey};
use super::{LeasedKeys, LeasingScheme, QuantumKey, VerificationOutcome};
use crate::bits::{inner_product_bits, BitString};
use crate::error::{Error, Result};
use crate::pke::{Pke, Regev};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct GlCiphertext<P: Pke = Regev> {
    pub ow_ct: SklCiphertext<P>,
    pub r: BitString,
    pub b: bool,
}

pub fn gl_enc<P: Pke, R: Rng + ?Sized>(ek: &SklEncKey<P>, m: bool, rng: &mut R) -> Result<GlCiphertext<P>> {
    let n = ek.params.message_bits();
    let x = BitString::random(n, rng);
    let r = BitString::random(n, rng);
    gl_enc_with(ek, m, &x, r, rng)
}

/// Encryption with caller-chosen `x` and `r`.
pub fn gl_enc_with<P: Pke, R: Rng + ?Sized>(
    ek: &SklEncKey<P>,
    m: bool,
    x: &BitString,
    r: BitString,
    rng: &mut R,
) -> Result<GlCiphertext<P>> {
    let b = inner_product_bits(x, &r)? ^ m;
    Ok(GlCiphertext {
        ow_ct: ow::encrypt(ek, x, rng)?,
        r,
        b,
    })
}

pub fn gl_dec<P: Pke, R: Rng + ?Sized>(
    params: &SklParams<P>,
    qdk: &QuantumKey,
    ct: &GlCiphertext<P>,
    rng: &mut R,
) -> Result<(Option<bool>, QuantumKey)> {
    let (x, post) = ow::decrypt(params, qdk, &ct.ow_ct, rng)?;
    let bit = x.map(|x| inner_product_bits(&x, &ct.r)).transpose()?.map(|p| p ^ ct.b);
    Ok((bit, post))
}

/// Bit-by-bit encryption of a multi-bit message.
pub fn gl_enc_multi<P: Pke, R: Rng + ?Sized>(
    ek: &SklEncKey<P>,
    m: &BitString,
    rng: &mut R,
) -> Result<Vec<GlCiphertext<P>>> {
    m.iter().map(|bit| gl_enc(ek, bit, rng)).collect()
}

pub fn gl_dec_multi<P: Pke, R: Rng + ?Sized>(
    params: &SklParams<P>,
    qdk: &QuantumKey,
    cts: &[GlCiphertext<P>],
    rng: &mut R,
) -> Result<(Option<BitString>, QuantumKey)> {
    let mut key = qdk.clone();
    let mut bits = Vec::with_capacity(cts.len());
    for ct in cts {
        let (bit, post) = gl_dec(params, &key, ct, rng)?;
        key = post;
        bits.push(bit);
    }
    let m = bits.into_iter().collect::<Option<Vec<_>>>().map(BitString::from_bools);
    Ok((m, key))
}

/// Single-bit scheme over the parallel-repetition keys; verification is
/// unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct GlScheme<P: Pke = Regev> {
    pub params: SklParams<P>,
}

impl GlScheme<Regev> {
    pub fn with_blocks(blocks: usize) -> Self {
        Self {
            params: SklParams::with_blocks(blocks),
        }
    }
}

impl<P: Pke> LeasingScheme for GlScheme<P> {
    type EncKey = SklEncKey<P>;
    type VerKey = SklVerKey<P>;
    type Ciphertext = GlCiphertext<P>;
    type Aux = ();

    fn name(&self) -> &'static str {
        "ind"
    }

    fn message_bits(&self) -> usize {
        1
    }

    fn blocks(&self) -> usize {
        self.params.blocks
    }

    fn keygen<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<LeasedKeys<Self>> {
        let k = ow::keygen(&self.params, rng)?;
        Ok(LeasedKeys {
            ek: k.ek,
            aux: (),
            qdk: k.qdk,
            vk: k.vk,
        })
    }

    fn encrypt<R: Rng + ?Sized>(&self, ek: &SklEncKey<P>, m: &BitString, rng: &mut R) -> Result<GlCiphertext<P>> {
        if m.len() != 1 {
            return Err(Error::Length {
                what: "message",
                expected: 1,
                actual: m.len(),
            });
        }
        gl_enc(ek, m.get(0), rng)
    }

    fn decrypt<R: Rng + ?Sized>(
        &self,
        _aux: &(),
        key: &QuantumKey,
        ct: &GlCiphertext<P>,
        rng: &mut R,
    ) -> Result<(Option<BitString>, QuantumKey)> {
        let (bit, post) = gl_dec(&self.params, key, ct, rng)?;
        Ok((bit.map(|b| BitString::from_bools([b])), post))
    }

    fn verify<R: Rng + ?Sized>(&self, vk: &SklVerKey<P>, key: &QuantumKey, rng: &mut R) -> Result<VerificationOutcome> {
        ow::verify(vk, key, rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn bit_round_trips() {
        let mut rng = ChaCha20Rng::seed_from_u64(31);
        let params = SklParams::with_blocks(1);
        let k = ow::keygen(&params, &mut rng).unwrap();
        for m in [false, true] {
            let ct = gl_enc(&k.ek, m, &mut rng).unwrap();
            assert_eq!(gl_dec(&params, &k.qdk, &ct, &mut rng).unwrap().0, Some(m));
        }
    }

    #[test]
    fn zero_mask_leaves_the_bit_in_the_clear() {
        let mut rng = ChaCha20Rng::seed_from_u64(32);
        let params = SklParams::with_blocks(1);
        let k = ow::keygen(&params, &mut rng).unwrap();
        let x = BitString::random(16, &mut rng);
        for m in [false, true] {
            let ct = gl_enc_with(&k.ek, m, &x, BitString::zeros(16), &mut rng).unwrap();
            assert_eq!(ct.b, m);
        }
    }

    #[test]
    fn multi_bit_round_trip_preserves_order() {
        let mut rng = ChaCha20Rng::seed_from_u64(33);
        let params = SklParams::with_blocks(1);
        let k = ow::keygen(&params, &mut rng).unwrap();
        let m = BitString::parse_binary("10110001").unwrap();
        let cts = gl_enc_multi(&k.ek, &m, &mut rng).unwrap();
        assert_eq!(cts.len(), 8);
        let (out, post) = gl_dec_multi(&params, &k.qdk, &cts, &mut rng).unwrap();
        assert_eq!(out, Some(m));
        assert!(ow::verify(&k.vk, &post, &mut rng).unwrap().accepted);
        assert!(gl_enc_multi(&k.ek, &BitString::zeros(0), &mut rng).unwrap().is_empty());
    }
}
