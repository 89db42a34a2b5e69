//! Parallel repetition over CoIC encryption: `blocks` independent key pairs
//! per branch, and a message split into `blocks` consecutive chunks.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{
    coherent_block_decrypt, project_onto_blocks, superposed_block, LeasedKeys, LeasingScheme, QuantumKey,
    VerificationOutcome,
};
use crate::bits::BitString;
use crate::coic::{self, CoicCiphertext, CoicDecKey, CoicEncKey, CoicParams};
use crate::error::{Error, Result};
use crate::pke::{Pke, Regev};
use crate::qsim::Ket;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SklParams<P: Pke = Regev> {
    pub blocks: usize,
    pub coic: CoicParams<P>,
}

impl SklParams<Regev> {
    pub fn with_blocks(blocks: usize) -> Self {
        Self {
            blocks,
            coic: CoicParams::default(),
        }
    }
}

impl<P: Pke> SklParams<P> {
    pub fn message_bits(&self) -> usize {
        self.blocks * self.coic.msg_bits
    }

    pub fn validate(&self) -> Result<()> {
        if self.blocks == 0 {
            return Err(Error::Params("at least one block is required".into()));
        }
        self.coic.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SklEncKey<P: Pke = Regev> {
    pub params: SklParams<P>,
    eks: Vec<[CoicEncKey<P>; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SklVerKey<P: Pke = Regev> {
    pub params: SklParams<P>,
    dks: Vec<[CoicDecKey<P>; 2]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SklKeyTriple<P: Pke = Regev> {
    pub ek: SklEncKey<P>,
    pub qdk: QuantumKey,
    pub vk: SklVerKey<P>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SklCiphertext<P: Pke = Regev> {
    pub block_bits: usize,
    cts: Vec<[CoicCiphertext<P>; 2]>,
}

impl<P: Pke> SklEncKey<P> {
    pub fn coic_keys(&self, i: usize) -> &[CoicEncKey<P>; 2] {
        &self.eks[i]
    }
}

impl<P: Pke> SklVerKey<P> {
    pub fn coic_keys(&self, i: usize) -> &[CoicDecKey<P>; 2] {
        &self.dks[i]
    }

    /// The honest key, block by block.
    pub fn target_blocks(&self) -> Result<Vec<Ket>> {
        self.dks
            .iter()
            .enumerate()
            .map(|(i, [d0, d1])| superposed_block(i, &d0.to_bits(), &d1.to_bits()))
            .collect()
    }

    pub fn honest_key(&self) -> Result<QuantumKey> {
        Ok(QuantumKey::Blocks(self.target_blocks()?))
    }
}

impl<P: Pke> SklCiphertext<P> {
    pub fn blocks(&self) -> usize {
        self.cts.len()
    }

    pub fn coic_ciphertexts(&self, i: usize) -> &[CoicCiphertext<P>; 2] {
        &self.cts[i]
    }

    /// Assembles a ciphertext from per-block branch ciphertexts, for
    /// experiments that encrypt different blocks per branch.
    pub fn from_parts(block_bits: usize, cts: Vec<[CoicCiphertext<P>; 2]>) -> Self {
        Self { block_bits, cts }
    }
}

pub fn keygen<P: Pke, R: Rng + ?Sized>(params: &SklParams<P>, rng: &mut R) -> Result<SklKeyTriple<P>> {
    params.validate()?;
    let mut eks = Vec::with_capacity(params.blocks);
    let mut dks = Vec::with_capacity(params.blocks);
    let mut blocks = Vec::with_capacity(params.blocks);
    for i in 0..params.blocks {
        let k0 = coic::keygen(&params.coic, rng)?;
        let k1 = coic::keygen(&params.coic, rng)?;
        blocks.push(superposed_block(i, &k0.dk.to_bits(), &k1.dk.to_bits())?);
        eks.push([k0.ek, k1.ek]);
        dks.push([k0.dk, k1.dk]);
    }
    Ok(SklKeyTriple {
        ek: SklEncKey {
            params: params.clone(),
            eks,
        },
        qdk: QuantumKey::Blocks(blocks),
        vk: SklVerKey {
            params: params.clone(),
            dks,
        },
    })
}

/// Encrypts block `m_i = m[i*l .. (i+1)*l]` under both branch keys of block `i`.
pub fn encrypt<P: Pke, R: Rng + ?Sized>(ek: &SklEncKey<P>, m: &BitString, rng: &mut R) -> Result<SklCiphertext<P>> {
    let p = &ek.params;
    if m.len() != p.message_bits() {
        return Err(Error::Length {
            what: "message",
            expected: p.message_bits(),
            actual: m.len(),
        });
    }
    let cts = m
        .chunks(p.coic.msg_bits)?
        .iter()
        .zip(&ek.eks)
        .map(|(mi, [e0, e1])| Ok([coic::encrypt(e0, mi, rng)?, coic::encrypt(e1, mi, rng)?]))
        .collect::<Result<Vec<_>>>()?;
    Ok(SklCiphertext {
        block_bits: p.coic.msg_bits,
        cts,
    })
}

/// Coherent decryption of every block. Yields `None` if any block fails.
pub fn decrypt<P: Pke, R: Rng + ?Sized>(
    params: &SklParams<P>,
    qdk: &QuantumKey,
    ct: &SklCiphertext<P>,
    rng: &mut R,
) -> Result<(Option<BitString>, QuantumKey)> {
    if ct.cts.len() != params.blocks || ct.block_bits != params.coic.msg_bits {
        return Err(Error::CorruptCiphertext(format!(
            "ciphertext has {} blocks of {} bits, expected {} of {}",
            ct.cts.len(),
            ct.block_bits,
            params.blocks,
            params.coic.msg_bits
        )));
    }
    let mut key = qdk.clone();
    let mut parts = Vec::with_capacity(params.blocks);
    for (i, pair) in ct.cts.iter().enumerate() {
        let (mi, post) = coherent_block_decrypt(
            &key,
            i,
            params.coic.msg_bits,
            |b, dk_bits| {
                let dk = CoicDecKey::from_bits(&params.coic, dk_bits).ok()?;
                coic::decrypt(&dk, &pair[usize::from(b)]).ok()
            },
            rng,
        )?;
        key = post;
        parts.push(mi);
    }
    let message = parts
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .map(|p| BitString::concat_all(&p));
    Ok((message, key))
}

pub fn verify<P: Pke, R: Rng + ?Sized>(vk: &SklVerKey<P>, key: &QuantumKey, rng: &mut R) -> Result<VerificationOutcome> {
    project_onto_blocks(&vk.target_blocks()?, key, rng)
}

/// The parallel-repetition scheme; one block gives the basic scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SklScheme<P: Pke = Regev> {
    pub params: SklParams<P>,
}

impl SklScheme<Regev> {
    pub fn with_blocks(blocks: usize) -> Self {
        Self {
            params: SklParams::with_blocks(blocks),
        }
    }
}

impl<P: Pke> LeasingScheme for SklScheme<P> {
    type EncKey = SklEncKey<P>;
    type VerKey = SklVerKey<P>;
    type Ciphertext = SklCiphertext<P>;
    type Aux = ();

    fn name(&self) -> &'static str {
        if self.params.blocks == 1 {
            "basic"
        } else {
            "ow"
        }
    }

    fn message_bits(&self) -> usize {
        self.params.message_bits()
    }

    fn blocks(&self) -> usize {
        self.params.blocks
    }

    fn keygen<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<LeasedKeys<Self>> {
        let k = keygen(&self.params, rng)?;
        Ok(LeasedKeys {
            ek: k.ek,
            aux: (),
            qdk: k.qdk,
            vk: k.vk,
        })
    }

    fn encrypt<R: Rng + ?Sized>(&self, ek: &SklEncKey<P>, m: &BitString, rng: &mut R) -> Result<SklCiphertext<P>> {
        encrypt(ek, m, rng)
    }

    fn decrypt<R: Rng + ?Sized>(
        &self,
        _aux: &(),
        key: &QuantumKey,
        ct: &SklCiphertext<P>,
        rng: &mut R,
    ) -> Result<(Option<BitString>, QuantumKey)> {
        decrypt(&self.params, key, ct, rng)
    }

    fn verify<R: Rng + ?Sized>(&self, vk: &SklVerKey<P>, key: &QuantumKey, rng: &mut R) -> Result<VerificationOutcome> {
        verify(vk, key, rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn honest_lifecycle() {
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        let params = SklParams::with_blocks(2);
        let k = keygen(&params, &mut rng).unwrap();
        assert_eq!(k.qdk.kets().len(), 2);
        let m = BitString::random(32, &mut rng);
        let ct = encrypt(&k.ek, &m, &mut rng).unwrap();
        assert_eq!(ct.blocks(), 2);
        let (out, post) = decrypt(&params, &k.qdk, &ct, &mut rng).unwrap();
        assert_eq!(out, Some(m));
        assert!((post.fidelity(&k.qdk).unwrap() - 1.0).abs() < 1e-9);
        assert!(verify(&k.vk, &post, &mut rng).unwrap().accepted);
        assert!(encrypt(&k.ek, &BitString::zeros(31), &mut rng).is_err());
    }

    #[test]
    fn collapsed_key_still_decrypts() {
        let mut rng = ChaCha20Rng::seed_from_u64(22);
        let params = SklParams::with_blocks(1);
        let k = keygen(&params, &mut rng).unwrap();
        let (_, collapsed) = k.qdk.measure_blocks(&[0], &mut rng).unwrap();
        let m = BitString::random(16, &mut rng);
        let ct = encrypt(&k.ek, &m, &mut rng).unwrap();
        assert_eq!(decrypt(&params, &collapsed, &ct, &mut rng).unwrap().0, Some(m));
    }

    #[test]
    fn inconsistent_branches_collapse_the_key() {
        let mut rng = ChaCha20Rng::seed_from_u64(23);
        let params = SklParams::with_blocks(1);
        let k = keygen(&params, &mut rng).unwrap();
        let [e0, e1] = k.ek.coic_keys(0);
        let m0 = BitString::zeros(16);
        let m1 = BitString::ones(16);
        let ct = SklCiphertext::from_parts(
            16,
            vec![[
                coic::encrypt(e0, &m0, &mut rng).unwrap(),
                coic::encrypt(e1, &m1, &mut rng).unwrap(),
            ]],
        );
        let (out, post) = decrypt(&params, &k.qdk, &ct, &mut rng).unwrap();
        assert!(out == Some(m0) || out == Some(m1));
        assert!((post.fidelity(&k.qdk).unwrap() - 0.5).abs() < 1e-9);
    }
}
