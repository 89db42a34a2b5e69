//! One-key ABE with leased keys.
//!
//! Setup creates an ABE instance for every (position, bit) of the inner
//! leasing scheme's encryption key. A user key pairs a fresh inner key
//! triple with ABE keys for the instances selected by the bits of its
//! encryption key. A ciphertext garbles the inner encryption circuit with the
//! message and randomness built in, and ABE-encrypts every label.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::toy_abe::{self, ToyAbeCiphertext, ToyAbeMasterKey, ToyAbeParams, ToyAbePublicKey, ToyAbeSecretKey};
use super::xor_skl::{self, XorSklCiphertext, XorSklEncKey, XorSklVerKey};
use crate::bits::BitString;
use crate::circuits::{garble, gc_eval, GarbledCircuit, Label};
use crate::error::{Error, Result};
use crate::pke::{Pke, Regev};
use crate::qsim::Ket;
use crate::skl::{LeasedKeys, LeasingScheme, QuantumKey, VerificationOutcome};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Abe1Params<P: Pke = Regev> {
    pub id_bits: usize,
    pub msg_bits: usize,
    pub pke: P::Params,
}

impl Abe1Params<Regev> {
    pub fn new(id_bits: usize, msg_bits: usize) -> Self {
        Self {
            id_bits,
            msg_bits,
            pke: Default::default(),
        }
    }
}

impl<P: Pke> Abe1Params<P> {
    /// Length of the inner encryption key, `2 * msg_bits`.
    pub fn ek_bits(&self) -> usize {
        2 * self.msg_bits
    }

    fn abe(&self) -> ToyAbeParams<P> {
        ToyAbeParams {
            id_bits: self.id_bits,
            pke: self.pke.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.msg_bits == 0 {
            return Err(Error::Params("message length must be at least 1".into()));
        }
        self.abe().validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Abe1PublicKey<P: Pke = Regev> {
    pub params: Abe1Params<P>,
    pks: Vec<[ToyAbePublicKey<P>; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Abe1MasterKey<P: Pke = Regev> {
    pub params: Abe1Params<P>,
    msks: Vec<[ToyAbeMasterKey<P>; 2]>,
}

/// Classical part of a user key: the identity, one ABE key per encryption
/// key bit, and the inner encryption key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Abe1ClassicalKey<P: Pke = Regev> {
    pub y: BitString,
    pub block: usize,
    abe_sks: Vec<ToyAbeSecretKey<P>>,
    pub skl_ek: XorSklEncKey,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Abe1Ciphertext<P: Pke = Regev> {
    pub x: BitString,
    pub gc: GarbledCircuit,
    label_cts: Vec<[ToyAbeCiphertext<P>; 2]>,
}

impl<P: Pke> Abe1ClassicalKey<P> {
    pub fn abe_keys(&self) -> &[ToyAbeSecretKey<P>] {
        &self.abe_sks
    }
}

pub fn setup<P: Pke, R: Rng + ?Sized>(
    params: &Abe1Params<P>,
    rng: &mut R,
) -> Result<(Abe1PublicKey<P>, Abe1MasterKey<P>)> {
    params.validate()?;
    let abe = params.abe();
    let mut pks = Vec::with_capacity(params.ek_bits());
    let mut msks = Vec::with_capacity(params.ek_bits());
    for _ in 0..params.ek_bits() {
        let (pk0, msk0) = toy_abe::setup(&abe, rng)?;
        let (pk1, msk1) = toy_abe::setup(&abe, rng)?;
        pks.push([pk0, pk1]);
        msks.push([msk0, msk1]);
    }
    Ok((
        Abe1PublicKey {
            params: params.clone(),
            pks,
        },
        Abe1MasterKey {
            params: params.clone(),
            msks,
        },
    ))
}

/// User key for identity `y` whose quantum part lives in block `block`.
pub fn keygen<P: Pke, R: Rng + ?Sized>(
    msk: &Abe1MasterKey<P>,
    y: &BitString,
    block: usize,
    rng: &mut R,
) -> Result<(Abe1ClassicalKey<P>, Ket, XorSklVerKey)> {
    let (skl_ek, ket, vk) = xor_skl::keygen(msk.params.msg_bits, block, rng)?;
    let abe_sks = skl_ek
        .to_bits()
        .iter()
        .enumerate()
        .map(|(i, b)| toy_abe::keygen(&msk.msks[i][usize::from(b)], y))
        .collect::<Result<Vec<_>>>()?;
    Ok((
        Abe1ClassicalKey {
            y: y.clone(),
            block,
            abe_sks,
            skl_ek,
        },
        ket,
        vk,
    ))
}

pub fn encrypt<P: Pke, R: Rng + ?Sized>(
    pk: &Abe1PublicKey<P>,
    x: &BitString,
    m: &BitString,
    rng: &mut R,
) -> Result<Abe1Ciphertext<P>> {
    if m.len() != pk.params.msg_bits {
        return Err(Error::Length {
            what: "message",
            expected: pk.params.msg_bits,
            actual: m.len(),
        });
    }
    let r = BitString::random(m.len(), rng);
    let e = xor_skl::enc_circuit(m, &r)?;
    let (pairs, gc) = garble(&e, rng);
    let label_cts = pairs
        .iter()
        .enumerate()
        .map(|(i, pair)| {
            Ok([
                toy_abe::encrypt(&pk.pks[i][0], x, &pair.lab0.to_bits(), rng)?,
                toy_abe::encrypt(&pk.pks[i][1], x, &pair.lab1.to_bits(), rng)?,
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Abe1Ciphertext {
        x: x.clone(),
        gc,
        label_cts,
    })
}

/// Recovers the inner ciphertext, or `None` if the relation fails or the
/// labels do not evaluate.
pub fn recover_inner_ciphertext<P: Pke>(
    key: &Abe1ClassicalKey<P>,
    x: &BitString,
    ct: &Abe1Ciphertext<P>,
) -> Result<Option<XorSklCiphertext>> {
    let bits = key.skl_ek.to_bits();
    if ct.label_cts.len() != bits.len() || key.abe_sks.len() != bits.len() {
        return Err(Error::CorruptCiphertext(format!(
            "{} label ciphertexts for a {}-bit encryption key",
            ct.label_cts.len(),
            bits.len()
        )));
    }
    let mut labels = Vec::with_capacity(bits.len());
    for (i, b) in bits.iter().enumerate() {
        match toy_abe::decrypt(&key.abe_sks[i], x, &ct.label_cts[i][usize::from(b)])? {
            Some(l) => labels.push(Label::from_bits(&l)),
            None => return Ok(None),
        }
    }
    let Ok(out) = gc_eval(&ct.gc, &labels) else {
        return Ok(None);
    };
    XorSklCiphertext::from_bits(&out, key.skl_ek.msg_bits()).map(Some)
}

pub fn decrypt<P: Pke, R: Rng + ?Sized>(
    key: &Abe1ClassicalKey<P>,
    qdk: &QuantumKey,
    x: &BitString,
    ct: &Abe1Ciphertext<P>,
    rng: &mut R,
) -> Result<(Option<BitString>, QuantumKey)> {
    match recover_inner_ciphertext(key, x, ct)? {
        Some(inner) => xor_skl::decrypt(qdk, key.block, &inner, rng),
        None => Ok((None, qdk.clone())),
    }
}

/// Checks only the quantum part of the returned key.
pub fn verify<R: Rng + ?Sized>(vk: &XorSklVerKey, key: &QuantumKey, rng: &mut R) -> Result<VerificationOutcome> {
    xor_skl::verify(vk, key, rng)
}

/// One-key ABE for a fixed identity, as a [`LeasingScheme`]: keys are issued
/// for `identity` and messages are encrypted to `identity`.
#[derive(Debug, Clone, PartialEq)]
pub struct Abe1Scheme<P: Pke = Regev> {
    pub params: Abe1Params<P>,
    pub identity: BitString,
}

impl<P: Pke> LeasingScheme for Abe1Scheme<P> {
    type EncKey = Abe1PublicKey<P>;
    type VerKey = XorSklVerKey;
    type Ciphertext = Abe1Ciphertext<P>;
    type Aux = Abe1ClassicalKey<P>;

    fn name(&self) -> &'static str {
        "abe1"
    }

    fn message_bits(&self) -> usize {
        self.params.msg_bits
    }

    fn blocks(&self) -> usize {
        1
    }

    fn keygen<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<LeasedKeys<Self>> {
        let (pk, msk) = setup(&self.params, rng)?;
        let (aux, ket, vk) = keygen(&msk, &self.identity, 0, rng)?;
        Ok(LeasedKeys {
            ek: pk,
            aux,
            qdk: QuantumKey::Blocks(vec![ket]),
            vk,
        })
    }

    fn encrypt<R: Rng + ?Sized>(&self, ek: &Abe1PublicKey<P>, m: &BitString, rng: &mut R) -> Result<Abe1Ciphertext<P>> {
        encrypt(ek, &self.identity, m, rng)
    }

    fn decrypt<R: Rng + ?Sized>(
        &self,
        aux: &Abe1ClassicalKey<P>,
        key: &QuantumKey,
        ct: &Abe1Ciphertext<P>,
        rng: &mut R,
    ) -> Result<(Option<BitString>, QuantumKey)> {
        decrypt(aux, key, &ct.x, ct, rng)
    }

    fn verify<R: Rng + ?Sized>(&self, vk: &XorSklVerKey, key: &QuantumKey, rng: &mut R) -> Result<VerificationOutcome> {
        verify(vk, key, rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn matching_identity_round_trip() {
        let mut rng = ChaCha20Rng::seed_from_u64(71);
        let params = Abe1Params::new(2, 4);
        let (pk, msk) = setup(&params, &mut rng).unwrap();
        assert_eq!(pk.pks.len() * 2, 2 * params.ek_bits());
        let y = BitString::parse_binary("10").unwrap();
        let (key, ket, vk) = keygen(&msk, &y, 0, &mut rng).unwrap();
        assert_eq!(key.abe_keys().len(), params.ek_bits());
        let qdk = QuantumKey::Blocks(vec![ket]);
        let m = BitString::parse_binary("1101").unwrap();
        let ct = encrypt(&pk, &y, &m, &mut rng).unwrap();
        let (out, post) = decrypt(&key, &qdk, &y, &ct, &mut rng).unwrap();
        assert_eq!(out, Some(m.clone()));
        assert!(verify(&vk, &post, &mut rng).unwrap().accepted);

        let other = BitString::parse_binary("11").unwrap();
        let ct = encrypt(&pk, &other, &m, &mut rng).unwrap();
        assert_eq!(decrypt(&key, &qdk, &other, &ct, &mut rng).unwrap().0, None);
    }

    #[test]
    fn keys_for_one_identity_are_independent() {
        let mut rng = ChaCha20Rng::seed_from_u64(72);
        let params = Abe1Params::new(1, 4);
        let (_, msk) = setup(&params, &mut rng).unwrap();
        let y = BitString::zeros(1);
        let (a, _, _) = keygen(&msk, &y, 0, &mut rng).unwrap();
        let (b, _, _) = keygen(&msk, &y, 0, &mut rng).unwrap();
        assert_ne!(a.skl_ek, b.skl_ek);
    }
}
