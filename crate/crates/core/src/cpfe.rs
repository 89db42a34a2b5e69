//! One-key ciphertext-policy functional encryption from PKE and garbling.
//!
//! The master key holds a PKE keypair for every (position, bit) pair of an
//! `attr_len`-bit attribute. A secret key for `x` is the decryption key of
//! each position's `x_i` instance. Encrypting a circuit garbles it and
//! encrypts label `lab_{i,b}` under instance `(i, b)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::circuits::{garble_with_kappa, gc_eval, BoolCircuit, CircuitShape, GarbledCircuit, Label};
use crate::error::{Error, Result};
use crate::pke::{Pke, Regev};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CpfeParams<P: Pke = Regev> {
    pub attr_len: usize,
    pub label_bytes: usize,
    pub pke: P::Params,
}

impl<P: Pke> CpfeParams<P> {
    pub fn new(attr_len: usize, pke: P::Params) -> Self {
        Self {
            attr_len,
            label_bytes: crate::circuits::DEFAULT_LABEL_BYTES,
            pke,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.attr_len == 0 {
            return Err(Error::Params("attribute length must be at least 1".into()));
        }
        P::validate(&self.pke)?;
        let need = self.label_bytes * 8;
        if P::payload_bits(&self.pke) < need {
            return Err(Error::Params(format!(
                "PKE payload of {} bits cannot carry {need}-bit wire labels",
                P::payload_bits(&self.pke)
            )));
        }
        Ok(())
    }

    /// Width of a secret key's bit encoding: `x` then each position's key.
    pub fn secret_key_bits(&self) -> usize {
        self.attr_len * (1 + P::dk_bit_len(&self.pke))
    }
}

impl Default for CpfeParams<Regev> {
    fn default() -> Self {
        Self::new(8, Default::default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CpfeMasterPublicKey<P: Pke = Regev> {
    pub params: CpfeParams<P>,
    eks: Vec<[P::EncKey; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CpfeMasterSecretKey<P: Pke = Regev> {
    pub params: CpfeParams<P>,
    dks: Vec<[P::DecKey; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CpfeMasterKeys<P: Pke = Regev> {
    pub mpk: CpfeMasterPublicKey<P>,
    pub msk: CpfeMasterSecretKey<P>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CpfeSecretKey<P: Pke = Regev> {
    pub x: BitString,
    dks: Vec<P::DecKey>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CpfeCiphertext<P: Pke = Regev> {
    pub gc: GarbledCircuit,
    label_cts: Vec<[P::Ciphertext; 2]>,
}

impl<P: Pke> CpfeMasterPublicKey<P> {
    pub fn encryption_key(&self, i: usize, b: bool) -> &P::EncKey {
        &self.eks[i][usize::from(b)]
    }
}

impl<P: Pke> CpfeMasterSecretKey<P> {
    pub fn decryption_key(&self, i: usize, b: bool) -> &P::DecKey {
        &self.dks[i][usize::from(b)]
    }
}

impl<P: Pke> CpfeSecretKey<P> {
    pub fn dks(&self) -> &[P::DecKey] {
        &self.dks
    }

    /// `x || dk_1 || ... || dk_l`.
    pub fn to_bits(&self) -> BitString {
        let mut out = self.x.clone();
        for dk in &self.dks {
            out = out.concat(&P::dk_to_bits(dk));
        }
        out
    }

    pub fn from_bits(params: &CpfeParams<P>, bits: &BitString) -> Result<Self> {
        if bits.len() != params.secret_key_bits() {
            return Err(Error::Length {
                what: "functional secret key encoding",
                expected: params.secret_key_bits(),
                actual: bits.len(),
            });
        }
        let l = params.attr_len;
        let w = P::dk_bit_len(&params.pke);
        let x = bits.slice(0..l);
        let dks = (0..l)
            .map(|i| P::dk_from_bits(&params.pke, &bits.slice(l + i * w..l + (i + 1) * w)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { x, dks })
    }
}

impl<P: Pke> CpfeCiphertext<P> {
    pub fn shape(&self) -> &CircuitShape {
        self.gc.shape()
    }

    pub fn label_ciphertext_mut(&mut self, i: usize, b: bool) -> &mut P::Ciphertext {
        &mut self.label_cts[i][usize::from(b)]
    }
}

pub fn setup<P: Pke, R: Rng + ?Sized>(params: &CpfeParams<P>, rng: &mut R) -> Result<CpfeMasterKeys<P>> {
    params.validate()?;
    let mut eks = Vec::with_capacity(params.attr_len);
    let mut dks = Vec::with_capacity(params.attr_len);
    for _ in 0..params.attr_len {
        let k0 = P::keygen(&params.pke, rng)?;
        let k1 = P::keygen(&params.pke, rng)?;
        eks.push([k0.ek, k1.ek]);
        dks.push([k0.dk, k1.dk]);
    }
    Ok(CpfeMasterKeys {
        mpk: CpfeMasterPublicKey {
            params: params.clone(),
            eks,
        },
        msk: CpfeMasterSecretKey {
            params: params.clone(),
            dks,
        },
    })
}

pub fn keygen<P: Pke>(msk: &CpfeMasterSecretKey<P>, x: &BitString) -> Result<CpfeSecretKey<P>> {
    if x.len() != msk.params.attr_len {
        return Err(Error::Length {
            what: "attribute",
            expected: msk.params.attr_len,
            actual: x.len(),
        });
    }
    Ok(CpfeSecretKey {
        x: x.clone(),
        dks: x.iter().enumerate().map(|(i, b)| msk.decryption_key(i, b).clone()).collect(),
    })
}

pub fn encrypt<P: Pke, R: Rng + ?Sized>(
    mpk: &CpfeMasterPublicKey<P>,
    c: &BoolCircuit,
    rng: &mut R,
) -> Result<CpfeCiphertext<P>> {
    if c.input_width() != mpk.params.attr_len {
        return Err(Error::Length {
            what: "circuit input width",
            expected: mpk.params.attr_len,
            actual: c.input_width(),
        });
    }
    let (pairs, gc) = garble_with_kappa(c, mpk.params.label_bytes, rng)?;
    let label_cts = pairs
        .iter()
        .enumerate()
        .map(|(i, pair)| {
            Ok([
                P::encrypt(mpk.encryption_key(i, false), &pair.lab0.to_bits(), rng)?,
                P::encrypt(mpk.encryption_key(i, true), &pair.lab1.to_bits(), rng)?,
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CpfeCiphertext { gc, label_cts })
}

pub fn decrypt<P: Pke>(sk: &CpfeSecretKey<P>, ct: &CpfeCiphertext<P>) -> Result<BitString> {
    if ct.label_cts.len() != sk.x.len() || ct.gc.shape().input_width != sk.x.len() {
        return Err(Error::CorruptCiphertext(format!(
            "ciphertext is for {}-bit attributes, key for {}",
            ct.label_cts.len(),
            sk.x.len()
        )));
    }
    let labels = sk
        .x
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let bits = P::decrypt(&sk.dks[i], &ct.label_cts[i][usize::from(b)])?;
            if bits.len() != ct.gc.label_bytes() * 8 {
                return Err(Error::CorruptCiphertext(format!("label {i} has {} bits", bits.len())));
            }
            Ok(Label::from_bits(&bits))
        })
        .collect::<Result<Vec<_>>>()?;
    gc_eval(&ct.gc, &labels).map_err(|e| Error::CorruptCiphertext(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{build_const_circuit, build_mux_circuit};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn params(l: usize) -> CpfeParams {
        CpfeParams::new(l, Default::default())
    }

    #[test]
    fn setup_counts_and_errors() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let keys = setup(&params(4), &mut rng).unwrap();
        assert_eq!(keys.mpk.eks.len() * 2, 8);
        assert!(matches!(setup(&params(0), &mut rng), Err(Error::Params(_))));
        let other = setup(&params(4), &mut rng).unwrap();
        assert_ne!(keys.msk, other.msk);
    }

    #[test]
    fn keygen_selects_positional_keys() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let keys = setup(&params(3), &mut rng).unwrap();
        let x = BitString::parse_binary("101").unwrap();
        let sk = keygen(&keys.msk, &x).unwrap();
        for (i, b) in x.iter().enumerate() {
            assert_eq!(&sk.dks()[i], keys.msk.decryption_key(i, b));
            assert_ne!(&sk.dks()[i], keys.msk.decryption_key(i, !b));
        }
        assert_eq!(CpfeSecretKey::from_bits(&keys.msk.params, &sk.to_bits()).unwrap(), sk);
        assert!(keygen(&keys.msk, &BitString::zeros(2)).is_err());
    }

    #[test]
    fn mux_round_trip_exhaustive() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let keys = setup(&params(4), &mut rng).unwrap();
        let (m0, m1) = (BitString::parse_binary("0110").unwrap(), BitString::parse_binary("1100").unwrap());
        let c = build_mux_circuit(true, &m0, &m1, 3, 4).unwrap();
        let ct = encrypt(&keys.mpk, &c, &mut rng).unwrap();
        for x in 0..16 {
            let x = BitString::from_u64(x, 4);
            let sk = keygen(&keys.msk, &x).unwrap();
            assert_eq!(decrypt(&sk, &ct).unwrap(), c.eval(&x).unwrap());
        }
    }

    #[test]
    fn const_and_mux_ciphertexts_have_equal_size() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let keys = setup(&params(4), &mut rng).unwrap();
        let m = BitString::parse_binary("10100101").unwrap();
        let a = encrypt(&keys.mpk, &build_const_circuit(&m, 4).unwrap(), &mut rng).unwrap();
        let b = encrypt(
            &keys.mpk,
            &build_mux_circuit(true, &BitString::zeros(8), &m, 2, 4).unwrap(),
            &mut rng,
        )
        .unwrap();
        assert_eq!(a.shape(), b.shape());
        assert_eq!(
            serde_json::to_string(&a).unwrap().len(),
            serde_json::to_string(&b).unwrap().len()
        );
    }
}
