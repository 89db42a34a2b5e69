//! Many-key ABE from a `v x w` grid of one-key instances.
//!
//! A user key picks one column `j_i` per row and holds a one-key user key of
//! instance `(i, j_i)`. A ciphertext XOR-shares the message into `v` shares
//! and encrypts share `i` under every instance of row `i`. Keys that share
//! no column in some row never reuse a one-key instance there.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::abe1::{self, Abe1Ciphertext, Abe1ClassicalKey, Abe1MasterKey, Abe1Params, Abe1PublicKey};
use super::xor_skl::XorSklVerKey;
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::pke::{Pke, Regev};
use crate::skl::{project_onto_blocks, LeasedKeys, LeasingScheme, QuantumKey, VerificationOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SecurityMode {
    Selective,
    Adaptive,
}

/// Grid dimensions `(v, w)` for `q` keys: `(lambda, q^2)` in selective mode
/// and `(2 (lambda + n), q^2)` in adaptive mode, `n` being the identity length.
pub fn qabe_params(mode: SecurityMode, lambda: usize, q: usize, n: usize) -> (usize, usize) {
    let w = q * q;
    match mode {
        SecurityMode::Selective => (lambda, w),
        SecurityMode::Adaptive => (2 * (lambda + n), w),
    }
}

/// Probability that, for `q` keys each choosing a uniform column in every
/// one of `v` rows of width `w`, no row has pairwise distinct choices:
/// `(1 - w! / ((w - q)! w^q))^v`, and 1 when `q > w`.
pub fn bins_distinctness_probability(v: usize, w: usize, q: usize) -> f64 {
    if q > w {
        return 1.0;
    }
    let distinct: f64 = (0..q).map(|k| (w - k) as f64 / w as f64).product();
    (1.0 - distinct).powi(v as i32)
}

/// Sampling estimate of [`bins_distinctness_probability`].
pub fn bins_monte_carlo<R: Rng + ?Sized>(v: usize, w: usize, q: usize, samples: usize, rng: &mut R) -> f64 {
    let mut hits = 0usize;
    let mut seen = vec![false; w];
    for _ in 0..samples {
        let mut some_row_distinct = false;
        for _ in 0..v {
            seen.iter_mut().for_each(|s| *s = false);
            let mut distinct = true;
            for _ in 0..q {
                let j = rng.gen_range(0..w);
                distinct &= !std::mem::replace(&mut seen[j], true);
            }
            some_row_distinct |= distinct;
        }
        hits += usize::from(!some_row_distinct);
    }
    hits as f64 / samples as f64
}

/// `v` shares whose XOR is `m`: `v - 1` uniform strings and a correction.
pub fn share_message<R: Rng + ?Sized>(m: &BitString, v: usize, rng: &mut R) -> Result<Vec<BitString>> {
    if v == 0 {
        return Err(Error::Params("at least one share is required".into()));
    }
    let mut shares: Vec<BitString> = (0..v - 1).map(|_| BitString::random(m.len(), rng)).collect();
    let last = shares.iter().try_fold(m.clone(), |acc, s| acc.xor(s))?;
    shares.push(last);
    Ok(shares)
}

pub fn combine_shares(shares: &[BitString]) -> Result<BitString> {
    let (first, rest) = shares
        .split_first()
        .ok_or_else(|| Error::Params("no shares to combine".into()))?;
    rest.iter().try_fold(first.clone(), |acc, s| acc.xor(s))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct QabeParams<P: Pke = Regev> {
    pub v: usize,
    pub w: usize,
    pub inner: Abe1Params<P>,
}

impl<P: Pke> QabeParams<P> {
    pub fn validate(&self) -> Result<()> {
        if self.v == 0 || self.w == 0 {
            return Err(Error::Params("grid dimensions must be positive".into()));
        }
        self.inner.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct QabePublicKey<P: Pke = Regev> {
    pub params: QabeParams<P>,
    /// Row-major `v x w`.
    grid: Vec<Vec<Abe1PublicKey<P>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct QabeMasterKey<P: Pke = Regev> {
    pub params: QabeParams<P>,
    grid: Vec<Vec<Abe1MasterKey<P>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct QabeClassicalKey<P: Pke = Regev> {
    pub columns: Vec<usize>,
    pub rows: Vec<Abe1ClassicalKey<P>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QabeVerKey {
    pub vks: Vec<XorSklVerKey>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct QabeCiphertext<P: Pke = Regev> {
    pub x: BitString,
    grid: Vec<Vec<Abe1Ciphertext<P>>>,
}

impl<P: Pke> QabeCiphertext<P> {
    pub fn instance(&self, i: usize, j: usize) -> &Abe1Ciphertext<P> {
        &self.grid[i][j]
    }
}

pub fn setup<P: Pke, R: Rng + ?Sized>(
    params: &QabeParams<P>,
    rng: &mut R,
) -> Result<(QabePublicKey<P>, QabeMasterKey<P>)> {
    params.validate()?;
    let mut pks = Vec::with_capacity(params.v);
    let mut msks = Vec::with_capacity(params.v);
    for _ in 0..params.v {
        let (row_pk, row_msk): (Vec<_>, Vec<_>) = (0..params.w)
            .map(|_| abe1::setup(&params.inner, rng))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .unzip();
        pks.push(row_pk);
        msks.push(row_msk);
    }
    Ok((
        QabePublicKey {
            params: params.clone(),
            grid: pks,
        },
        QabeMasterKey {
            params: params.clone(),
            grid: msks,
        },
    ))
}

pub fn keygen<P: Pke, R: Rng + ?Sized>(
    msk: &QabeMasterKey<P>,
    y: &BitString,
    rng: &mut R,
) -> Result<(QabeClassicalKey<P>, QuantumKey, QabeVerKey)> {
    let p = &msk.params;
    let columns: Vec<usize> = (0..p.v).map(|_| rng.gen_range(0..p.w)).collect();
    let mut rows = Vec::with_capacity(p.v);
    let mut kets = Vec::with_capacity(p.v);
    let mut vks = Vec::with_capacity(p.v);
    for (i, &j) in columns.iter().enumerate() {
        let (key, ket, vk) = abe1::keygen(&msk.grid[i][j], y, i, rng)?;
        rows.push(key);
        kets.push(ket);
        vks.push(vk);
    }
    Ok((QabeClassicalKey { columns, rows }, QuantumKey::Blocks(kets), QabeVerKey { vks }))
}

pub fn encrypt_shares<P: Pke, R: Rng + ?Sized>(
    pk: &QabePublicKey<P>,
    x: &BitString,
    shares: &[BitString],
    rng: &mut R,
) -> Result<QabeCiphertext<P>> {
    if shares.len() != pk.params.v {
        return Err(Error::Length {
            what: "share count",
            expected: pk.params.v,
            actual: shares.len(),
        });
    }
    let grid = pk
        .grid
        .iter()
        .zip(shares)
        .map(|(row, mu)| row.iter().map(|inst| abe1::encrypt(inst, x, mu, rng)).collect())
        .collect::<Result<Vec<Vec<_>>>>()?;
    Ok(QabeCiphertext { x: x.clone(), grid })
}

pub fn encrypt<P: Pke, R: Rng + ?Sized>(
    pk: &QabePublicKey<P>,
    x: &BitString,
    m: &BitString,
    rng: &mut R,
) -> Result<QabeCiphertext<P>> {
    let shares = share_message(m, pk.params.v, rng)?;
    encrypt_shares(pk, x, &shares, rng)
}

pub fn decrypt<P: Pke, R: Rng + ?Sized>(
    key: &QabeClassicalKey<P>,
    qdk: &QuantumKey,
    x: &BitString,
    ct: &QabeCiphertext<P>,
    rng: &mut R,
) -> Result<(Option<BitString>, QuantumKey)> {
    if ct.grid.len() != key.rows.len() {
        return Err(Error::CorruptCiphertext(format!(
            "ciphertext has {} rows, key has {}",
            ct.grid.len(),
            key.rows.len()
        )));
    }
    let mut state = qdk.clone();
    let mut shares = Vec::with_capacity(key.rows.len());
    for (i, (row_key, &j)) in key.rows.iter().zip(&key.columns).enumerate() {
        let inst = ct
            .grid
            .get(i)
            .and_then(|r| r.get(j))
            .ok_or_else(|| Error::CorruptCiphertext(format!("missing instance ({i}, {j})")))?;
        let (mu, post) = abe1::decrypt(row_key, &state, x, inst, rng)?;
        state = post;
        shares.push(mu);
    }
    let m = shares
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .map(|s| combine_shares(&s))
        .transpose()?;
    Ok((m, state))
}

/// Accepts iff every row's key passes its verification.
pub fn verify<R: Rng + ?Sized>(vk: &QabeVerKey, key: &QuantumKey, rng: &mut R) -> Result<VerificationOutcome> {
    let targets = vk.vks.iter().map(XorSklVerKey::target).collect::<Result<Vec<_>>>()?;
    project_onto_blocks(&targets, key, rng)
}

/// Many-key ABE for a fixed identity, as a [`LeasingScheme`].
#[derive(Debug, Clone, PartialEq)]
pub struct QabeScheme<P: Pke = Regev> {
    pub params: QabeParams<P>,
    pub identity: BitString,
}

impl<P: Pke> LeasingScheme for QabeScheme<P> {
    type EncKey = QabePublicKey<P>;
    type VerKey = QabeVerKey;
    type Ciphertext = QabeCiphertext<P>;
    type Aux = QabeClassicalKey<P>;

    fn name(&self) -> &'static str {
        "qabe"
    }

    fn message_bits(&self) -> usize {
        self.params.inner.msg_bits
    }

    fn blocks(&self) -> usize {
        self.params.v
    }

    fn keygen<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<LeasedKeys<Self>> {
        let (pk, msk) = setup(&self.params, rng)?;
        let (aux, qdk, vk) = keygen(&msk, &self.identity, rng)?;
        Ok(LeasedKeys { ek: pk, aux, qdk, vk })
    }

    fn encrypt<R: Rng + ?Sized>(&self, ek: &QabePublicKey<P>, m: &BitString, rng: &mut R) -> Result<QabeCiphertext<P>> {
        encrypt(ek, &self.identity, m, rng)
    }

    fn decrypt<R: Rng + ?Sized>(
        &self,
        aux: &QabeClassicalKey<P>,
        key: &QuantumKey,
        ct: &QabeCiphertext<P>,
        rng: &mut R,
    ) -> Result<(Option<BitString>, QuantumKey)> {
        decrypt(aux, key, &ct.x, ct, rng)
    }

    fn verify<R: Rng + ?Sized>(&self, vk: &QabeVerKey, key: &QuantumKey, rng: &mut R) -> Result<VerificationOutcome> {
        verify(vk, key, rng)
    }
}
