//! Public-key encryption interface and a Regev-style lattice instantiation
//! with exact (error-free) decryption.
//!
//! The toy parameters are chosen for correctness and speed, not security.

use std::fmt::Debug;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};

/// Bound bundle for the data types a scheme exposes.
pub trait Material: Clone + Debug + PartialEq + Serialize + DeserializeOwned + Send + Sync + 'static {}

impl<T> Material for T where T: Clone + Debug + PartialEq + Serialize + DeserializeOwned + Send + Sync + 'static {}

/// A PKE scheme whose decryption keys have a fixed-width bit encoding, so
/// they can sit in a simulated quantum register.
pub trait Pke: Clone + Debug + PartialEq + Default + Send + Sync + 'static {
    type Params: Material;
    type EncKey: Material;
    type DecKey: Material;
    type Ciphertext: Material;

    fn validate(params: &Self::Params) -> Result<()>;

    fn keygen<R: Rng + ?Sized>(params: &Self::Params, rng: &mut R) -> Result<PkeKeyPair<Self>>;

    /// Encrypts up to `payload_bits` bits.
    fn encrypt<R: Rng + ?Sized>(ek: &Self::EncKey, m: &BitString, rng: &mut R) -> Result<Self::Ciphertext>;

    /// Deterministic decryption.
    fn decrypt(dk: &Self::DecKey, ct: &Self::Ciphertext) -> Result<BitString>;

    fn payload_bits(params: &Self::Params) -> usize;

    fn dk_bit_len(params: &Self::Params) -> usize;

    fn dk_to_bits(dk: &Self::DecKey) -> BitString;

    fn dk_from_bits(params: &Self::Params, bits: &BitString) -> Result<Self::DecKey>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct PkeKeyPair<P: Pke> {
    pub ek: P::EncKey,
    pub dk: P::DecKey,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegevParams {
    /// Secret dimension.
    pub n: usize,
    pub q: u16,
    /// Maximum message length in bits.
    pub payload_bits: usize,
}

impl Default for RegevParams {
    fn default() -> Self {
        Self {
            n: 32,
            q: 12289,
            payload_bits: 128,
        }
    }
}

impl RegevParams {
    /// Number of LWE samples in the public key.
    pub fn samples(&self) -> usize {
        self.n + 1
    }

    /// Largest possible |noise| in a decryption: ternary randomness against
    /// ternary errors over `samples()` rows.
    pub fn worst_case_noise(&self) -> usize {
        self.samples()
    }

    pub fn half_q(&self) -> u16 {
        self.q / 2
    }
}

pub const SEED_BYTES: usize = 16;
const SECRET_DOMAIN: &[u8; 16] = b"keylease/regev/s";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Regev;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegevEncKey {
    pub params: RegevParams,
    /// `samples x n`, row-major.
    #[serde(with = "hex_u16")]
    a: Vec<u16>,
    /// `samples x payload_bits`, row-major.
    #[serde(with = "hex_u16")]
    b: Vec<u16>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegevDecKey {
    pub params: RegevParams,
    #[serde(with = "hex::serde")]
    seed: [u8; SEED_BYTES],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegevCiphertext {
    #[serde(with = "hex_u16")]
    u: Vec<u16>,
    /// One slot per message bit.
    #[serde(with = "hex_u16")]
    v: Vec<u16>,
}

impl RegevCiphertext {
    pub fn payload_len(&self) -> usize {
        self.v.len()
    }

    /// Adds `delta` to the payload slot `i` (for tamper tests).
    pub fn perturb_slot(&mut self, i: usize, delta: u16, q: u16) {
        self.v[i] = ((u32::from(self.v[i]) + u32::from(delta)) % u32::from(q)) as u16;
    }
}

fn sample_ternary<R: RngCore + ?Sized>(rng: &mut R, count: usize) -> Vec<i8> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut w = rng.next_u64();
        for _ in 0..32 {
            let t = (w & 3) as i8;
            w >>= 2;
            if t < 3 {
                out.push(t - 1);
                if out.len() == count {
                    break;
                }
            }
        }
    }
    out
}

/// Expands the 128-bit seed into the ternary secret (`n x payload_bits`).
fn expand_secret(params: &RegevParams, seed: &[u8; SEED_BYTES]) -> Vec<i8> {
    let mut key = [0u8; 32];
    key[..SEED_BYTES].copy_from_slice(seed);
    key[SEED_BYTES..].copy_from_slice(SECRET_DOMAIN);
    let mut rng = ChaCha20Rng::from_seed(key);
    sample_ternary(&mut rng, params.n * params.payload_bits)
}

/// `acc += a * row`, written so the loop vectorizes.
#[inline]
fn mac(acc: &mut [i32], a: i32, row: &[i32]) {
    let row = &row[..acc.len()];
    for j in 0..acc.len() {
        acc[j] = acc[j].wrapping_add(a.wrapping_mul(row[j]));
    }
}

fn reduce(x: i64, q: u16) -> u16 {
    x.rem_euclid(i64::from(q)) as u16
}

impl Pke for Regev {
    type Params = RegevParams;
    type EncKey = RegevEncKey;
    type DecKey = RegevDecKey;
    type Ciphertext = RegevCiphertext;

    fn validate(p: &RegevParams) -> Result<()> {
        if p.n == 0 || p.payload_bits == 0 {
            return Err(Error::Params("n and payload_bits must be positive".into()));
        }
        if 2 * p.worst_case_noise() >= usize::from(p.half_q()) {
            return Err(Error::Params(format!(
                "q = {} leaves no margin for worst-case noise {} (need 2(n+1) < q/2)",
                p.q,
                p.worst_case_noise()
            )));
        }
        Ok(())
    }

    fn keygen<R: Rng + ?Sized>(p: &RegevParams, rng: &mut R) -> Result<PkeKeyPair<Self>> {
        Self::validate(p)?;
        let (n, l, m) = (p.n, p.payload_bits, p.samples());
        let mut seed = [0u8; SEED_BYTES];
        rng.fill_bytes(&mut seed);
        let s: Vec<i32> = expand_secret(p, &seed).into_iter().map(i32::from).collect();
        let a: Vec<u16> = (0..m * n).map(|_| rng.gen_range(0..p.q)).collect();
        let e = sample_ternary(rng, m * l);
        let mut b = Vec::with_capacity(m * l);
        let mut acc = vec![0i32; l];
        for (a_row, e_row) in a.chunks_exact(n).zip(e.chunks_exact(l)) {
            acc.iter_mut().zip(e_row).for_each(|(x, &e)| *x = i32::from(e));
            for (&aik, s_row) in a_row.iter().zip(s.chunks_exact(l)) {
                mac(&mut acc, i32::from(aik), s_row);
            }
            b.extend(acc.iter().map(|&x| reduce(i64::from(x), p.q)));
        }
        Ok(PkeKeyPair {
            ek: RegevEncKey { params: *p, a, b },
            dk: RegevDecKey { params: *p, seed },
        })
    }

    fn encrypt<R: Rng + ?Sized>(ek: &RegevEncKey, msg: &BitString, rng: &mut R) -> Result<RegevCiphertext> {
        let p = &ek.params;
        if msg.len() > p.payload_bits {
            return Err(Error::PayloadOverflow {
                max: p.payload_bits,
                actual: msg.len(),
            });
        }
        let (n, l, m) = (p.n, p.payload_bits, p.samples());
        let r = sample_ternary(rng, m);
        let mut u = vec![0i64; n];
        let mut v = vec![0i64; msg.len()];
        for (i, &ri) in r.iter().enumerate() {
            if ri == 0 {
                continue;
            }
            let ri = i64::from(ri);
            for (uk, &a) in u.iter_mut().zip(&ek.a[i * n..(i + 1) * n]) {
                *uk += ri * i64::from(a);
            }
            for (vc, &b) in v.iter_mut().zip(&ek.b[i * l..(i + 1) * l]) {
                *vc += ri * i64::from(b);
            }
        }
        let h = i64::from(p.half_q());
        Ok(RegevCiphertext {
            u: u.into_iter().map(|x| reduce(x, p.q)).collect(),
            v: v
                .into_iter()
                .zip(msg.iter())
                .map(|(x, bit)| reduce(x + if bit { h } else { 0 }, p.q))
                .collect(),
        })
    }

    fn decrypt(dk: &RegevDecKey, ct: &RegevCiphertext) -> Result<BitString> {
        let p = &dk.params;
        let (n, l) = (p.n, p.payload_bits);
        if ct.u.len() != n {
            return Err(Error::CorruptCiphertext(format!("u has {} entries, expected {n}", ct.u.len())));
        }
        if ct.v.len() > l {
            return Err(Error::PayloadOverflow {
                max: l,
                actual: ct.v.len(),
            });
        }
        if ct.u.iter().chain(&ct.v).any(|&x| x >= p.q) {
            return Err(Error::CorruptCiphertext("coefficient out of range".into()));
        }
        let s = expand_secret(p, &dk.seed);
        let mut inner = vec![0i64; ct.v.len()];
        for (k, &uk) in ct.u.iter().enumerate() {
            let uk = i64::from(uk);
            for (acc, &sk) in inner.iter_mut().zip(&s[k * l..(k + 1) * l]) {
                *acc += uk * i64::from(sk);
            }
        }
        let q = i64::from(p.q);
        let h = i64::from(p.half_q());
        Ok(BitString::from_bools(ct.v.iter().zip(&inner).map(|(&v, &ip)| {
            let d = (i64::from(v) - ip).rem_euclid(q);
            let to_zero = d.min(q - d);
            (d - h).abs() < to_zero
        })))
    }

    fn payload_bits(p: &RegevParams) -> usize {
        p.payload_bits
    }

    fn dk_bit_len(_: &RegevParams) -> usize {
        SEED_BYTES * 8
    }

    fn dk_to_bits(dk: &RegevDecKey) -> BitString {
        BitString::from_bytes(dk.seed.to_vec(), SEED_BYTES * 8)
    }

    fn dk_from_bits(p: &RegevParams, bits: &BitString) -> Result<RegevDecKey> {
        if bits.len() != SEED_BYTES * 8 {
            return Err(Error::Length {
                what: "decryption key encoding",
                expected: SEED_BYTES * 8,
                actual: bits.len(),
            });
        }
        let mut seed = [0u8; SEED_BYTES];
        seed.copy_from_slice(bits.as_bytes());
        Ok(RegevDecKey { params: *p, seed })
    }
}

/// Fixed-width hex for `u16` vectors, so serialized sizes depend only on shape.
mod hex_u16 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[u16], s: S) -> Result<S::Ok, S::Error> {
        let bytes: Vec<u8> = v.iter().flat_map(|x| x.to_be_bytes()).collect();
        s.serialize_str(&hex::encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u16>, D::Error> {
        let s = String::deserialize(d)?;
        let bytes = hex::decode(s).map_err(serde::de::Error::custom)?;
        if bytes.len() % 2 != 0 {
            return Err(serde::de::Error::custom("odd byte count in u16 vector"));
        }
        Ok(bytes.chunks(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(seed: u64) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(seed)
    }

    #[test]
    fn boundary_messages_round_trip() {
        let mut r = rng(1);
        let kp = Regev::keygen(&RegevParams::default(), &mut r).unwrap();
        for m in [BitString::zeros(16), BitString::ones(16), BitString::ones(128)] {
            let ct = Regev::encrypt(&kp.ek, &m, &mut r).unwrap();
            assert_eq!(Regev::decrypt(&kp.dk, &ct).unwrap(), m);
            assert_eq!(Regev::decrypt(&kp.dk, &ct).unwrap(), Regev::decrypt(&kp.dk, &ct).unwrap());
        }
    }

    #[test]
    fn rejects_tight_modulus() {
        let p = RegevParams {
            n: 32,
            q: 4 * 33,
            payload_bits: 16,
        };
        assert!(matches!(Regev::keygen(&p, &mut rng(0)), Err(Error::Params(_))));
        let p = RegevParams { q: 4 * 33 + 1, ..p };
        assert!(Regev::validate(&p).is_err());
        let p = RegevParams { q: 4 * 33 + 3, ..p };
        assert!(Regev::validate(&p).is_ok());
    }

    #[test]
    fn payload_overflow() {
        let mut r = rng(2);
        let kp = Regev::keygen(&RegevParams::default(), &mut r).unwrap();
        let err = Regev::encrypt(&kp.ek, &BitString::zeros(129), &mut r).unwrap_err();
        assert!(matches!(err, Error::PayloadOverflow { max: 128, actual: 129 }));
    }

    #[test]
    fn dk_bits_round_trip() {
        let kp = Regev::keygen(&RegevParams::default(), &mut rng(3)).unwrap();
        let bits = Regev::dk_to_bits(&kp.dk);
        assert_eq!(bits.len(), Regev::dk_bit_len(&kp.dk.params));
        assert_eq!(Regev::dk_from_bits(&kp.dk.params, &bits).unwrap(), kp.dk);
    }

    #[test]
    fn json_sizes_depend_only_on_shape() {
        let mut r = rng(4);
        let kp = Regev::keygen(&RegevParams::default(), &mut r).unwrap();
        let c0 = Regev::encrypt(&kp.ek, &BitString::zeros(16), &mut r).unwrap();
        let c1 = Regev::encrypt(&kp.ek, &BitString::ones(16), &mut r).unwrap();
        let (s0, s1) = (serde_json::to_string(&c0).unwrap(), serde_json::to_string(&c1).unwrap());
        assert_eq!(s0.len(), s1.len());
        let back: RegevCiphertext = serde_json::from_str(&s0).unwrap();
        assert_eq!(back, c0);
        let ek: RegevEncKey = serde_json::from_str(&serde_json::to_string(&kp.ek).unwrap()).unwrap();
        assert_eq!(ek, kp.ek);
    }
}
