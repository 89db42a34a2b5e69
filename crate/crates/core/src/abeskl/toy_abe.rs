//! Identity-based encryption from `2n` PKE instances: the message is split
//! into `n` XOR shares and share `i` is encrypted under instance
//! `(i, id_i)`. A key for `y` holds the decryption keys of instances
//! `(i, y_i)`. Collusion resistance is not a goal.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::pke::{Pke, Regev};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ToyAbeParams<P: Pke = Regev> {
    pub id_bits: usize,
    pub pke: P::Params,
}

impl<P: Pke> ToyAbeParams<P> {
    pub fn validate(&self) -> Result<()> {
        if self.id_bits == 0 {
            return Err(Error::Params("identities need at least one bit".into()));
        }
        P::validate(&self.pke)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ToyAbePublicKey<P: Pke = Regev> {
    pub params: ToyAbeParams<P>,
    eks: Vec<[P::EncKey; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ToyAbeMasterKey<P: Pke = Regev> {
    pub params: ToyAbeParams<P>,
    dks: Vec<[P::DecKey; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ToyAbeSecretKey<P: Pke = Regev> {
    pub y: BitString,
    dks: Vec<P::DecKey>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ToyAbeCiphertext<P: Pke = Regev> {
    pub x: BitString,
    shares: Vec<P::Ciphertext>,
}

/// The relation: equality of identities.
pub fn relation(x: &BitString, y: &BitString) -> bool {
    x == y
}

pub fn setup<P: Pke, R: Rng + ?Sized>(
    params: &ToyAbeParams<P>,
    rng: &mut R,
) -> Result<(ToyAbePublicKey<P>, ToyAbeMasterKey<P>)> {
    params.validate()?;
    let mut eks = Vec::with_capacity(params.id_bits);
    let mut dks = Vec::with_capacity(params.id_bits);
    for _ in 0..params.id_bits {
        let k0 = P::keygen(&params.pke, rng)?;
        let k1 = P::keygen(&params.pke, rng)?;
        eks.push([k0.ek, k1.ek]);
        dks.push([k0.dk, k1.dk]);
    }
    Ok((
        ToyAbePublicKey {
            params: params.clone(),
            eks,
        },
        ToyAbeMasterKey {
            params: params.clone(),
            dks,
        },
    ))
}

fn check_identity(what: &'static str, id: &BitString, n: usize) -> Result<()> {
    if id.len() != n {
        return Err(Error::Length {
            what,
            expected: n,
            actual: id.len(),
        });
    }
    Ok(())
}

pub fn keygen<P: Pke>(msk: &ToyAbeMasterKey<P>, y: &BitString) -> Result<ToyAbeSecretKey<P>> {
    check_identity("identity", y, msk.params.id_bits)?;
    Ok(ToyAbeSecretKey {
        y: y.clone(),
        dks: y.iter().enumerate().map(|(i, b)| msk.dks[i][usize::from(b)].clone()).collect(),
    })
}

pub fn encrypt<P: Pke, R: Rng + ?Sized>(
    pk: &ToyAbePublicKey<P>,
    x: &BitString,
    m: &BitString,
    rng: &mut R,
) -> Result<ToyAbeCiphertext<P>> {
    check_identity("identity", x, pk.params.id_bits)?;
    let n = pk.params.id_bits;
    let mut shares: Vec<BitString> = (0..n - 1).map(|_| BitString::random(m.len(), rng)).collect();
    let last = shares.iter().try_fold(m.clone(), |acc, s| acc.xor(s))?;
    shares.push(last);
    let shares = shares
        .iter()
        .zip(x.iter())
        .enumerate()
        .map(|(i, (s, b))| P::encrypt(&pk.eks[i][usize::from(b)], s, rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(ToyAbeCiphertext { x: x.clone(), shares })
}

/// Decrypts every share with the key's instances and XORs them, without
/// checking the relation. On a mismatched identity the result is
/// unrelated to the plaintext.
pub fn open_shares<P: Pke>(sk: &ToyAbeSecretKey<P>, ct: &ToyAbeCiphertext<P>) -> Result<BitString> {
    if ct.shares.len() != sk.dks.len() {
        return Err(Error::CorruptCiphertext(format!(
            "{} shares for a {}-bit identity",
            ct.shares.len(),
            sk.dks.len()
        )));
    }
    let mut parts = sk.dks.iter().zip(&ct.shares).map(|(dk, c)| P::decrypt(dk, c));
    let first = parts.next().expect("identities are non-empty")?;
    parts.try_fold(first, |acc, s| acc.xor(&s?))
}

/// `None` when the relation does not hold.
pub fn decrypt<P: Pke>(sk: &ToyAbeSecretKey<P>, x: &BitString, ct: &ToyAbeCiphertext<P>) -> Result<Option<BitString>> {
    if !relation(x, &sk.y) || &ct.x != x {
        return Ok(None);
    }
    open_shares(sk, ct).map(Some)
}
