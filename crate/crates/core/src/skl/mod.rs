//! Public-key encryption with secure key leasing.
//!
//! A decryption key is a product of blocks, block `i` being
//! `(|0, dk_{i,0}> + |1, dk_{i,1}>) / sqrt(2)` over registers `b{i}` and
//! `dk{i}`. Decryption runs the classical decryption coherently into a fresh
//! register `out{i}`, measures it and discards it; when both branches agree
//! this leaves the key untouched. Verification projects the returned key
//! onto the honest state.
//!
//! * [`ow`]: the parallel-repetition scheme (one block is the basic scheme).
//! * [`gl`]: single-bit encryption through a Goldreich-Levin hardcore bit.
//! * [`omur`]: verification preceded by a decryptability check.

pub mod gl;
pub mod omur;
pub mod ow;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::pke::Material;
use crate::qsim::{Ket, QsimError, Register, RegisterLayout};

pub use gl::{GlCiphertext, GlScheme};
pub use omur::{OmurScheme, OmurVerKey};
pub use ow::{SklCiphertext, SklEncKey, SklKeyTriple, SklParams, SklScheme, SklVerKey};

pub fn branch_register(i: usize) -> String {
    format!("b{i}")
}

pub fn key_register(i: usize) -> String {
    format!("dk{i}")
}

pub fn output_register(i: usize) -> String {
    format!("out{i}")
}

/// `(|0, dk0> + |1, dk1>) / sqrt(2)` on the registers of block `i`.
pub fn superposed_block(i: usize, dk0: &BitString, dk1: &BitString) -> Result<Ket> {
    if dk0.len() != dk1.len() {
        return Err(Error::Length {
            what: "branch key",
            expected: dk0.len(),
            actual: dk1.len(),
        });
    }
    let layout = RegisterLayout::new(vec![
        Register::new(branch_register(i), 1),
        Register::new(key_register(i), dk0.len()),
    ])?;
    let one = num_complex::Complex64::new(1.0, 0.0);
    Ok(Ket::superpose(
        layout,
        vec![
            (vec![BitString::zeros(1), dk0.clone()], one),
            (vec![BitString::ones(1), dk1.clone()], one),
        ],
    )?)
}

/// A simulated quantum decryption key.
///
/// Honest keys are stored block by block. Adversarial strategies may merge
/// blocks into one joint state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantumKey {
    Blocks(Vec<Ket>),
    Joint(Ket),
}

impl QuantumKey {
    pub fn kets(&self) -> &[Ket] {
        match self {
            QuantumKey::Blocks(k) => k,
            QuantumKey::Joint(k) => std::slice::from_ref(k),
        }
    }

    fn into_kets(self) -> Vec<Ket> {
        match self {
            QuantumKey::Blocks(k) => k,
            QuantumKey::Joint(k) => vec![k],
        }
    }

    fn rebuild(&self, kets: Vec<Ket>) -> QuantumKey {
        match self {
            QuantumKey::Joint(_) => QuantumKey::Joint(kets.into_iter().next().expect("one ket")),
            QuantumKey::Blocks(_) => QuantumKey::Blocks(kets),
        }
    }

    /// Index of the ket holding `register`.
    fn locate(&self, register: &str) -> Result<usize> {
        self.kets()
            .iter()
            .position(|k| k.layout().index_of(register).is_ok())
            .ok_or_else(|| Error::Quantum(QsimError::UnknownRegister(register.to_string())))
    }

    /// Tensor of all blocks as a single state. `cap` bounds the joint label
    /// width and must cover every register.
    pub fn merge(&self, cap: usize) -> Result<QuantumKey> {
        let mut kets = self.kets().iter();
        let first = kets.next().ok_or(Error::Quantum(QsimError::Degenerate))?.clone();
        let joint = kets.try_fold(first, |acc, k| acc.tensor_with_cap(k, cap))?;
        Ok(QuantumKey::Joint(joint))
    }

    pub fn total_width(&self) -> usize {
        self.kets().iter().map(|k| k.layout().total_width()).sum()
    }

    /// True when every block is a computational-basis state, i.e. the key is
    /// classical and can be copied.
    pub fn is_classical(&self) -> bool {
        self.kets().iter().all(Ket::is_basis_state)
    }

    /// Measures `b{i}` then `dk{i}` for each listed block; returns the
    /// outcomes `(branch, key)` and the collapsed key.
    pub fn measure_blocks<R: Rng + ?Sized>(
        &self,
        blocks: &[usize],
        rng: &mut R,
    ) -> Result<(Vec<(bool, BitString)>, QuantumKey)> {
        let mut kets = self.kets().to_vec();
        let mut outcomes = Vec::with_capacity(blocks.len());
        for &i in blocks {
            let at = self.locate(&branch_register(i))?;
            let (b, k) = kets[at].measure_register(&branch_register(i), rng)?;
            let (dk, k) = k.measure_register(&key_register(i), rng)?;
            kets[at] = k;
            outcomes.push((b.get(0), dk));
        }
        Ok((outcomes, self.rebuild(kets)))
    }

    /// `|<self|other>|^2`, computed block-wise when both keys share the same
    /// block structure.
    pub fn fidelity(&self, other: &QuantumKey) -> Result<f64> {
        let (a, b) = (self.kets(), other.kets());
        if a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.layout() == y.layout()) {
            return a.iter().zip(b).try_fold(1.0, |acc, (x, y)| Ok(acc * x.fidelity(y)?));
        }
        let cap = self.total_width().max(other.total_width());
        let (ja, jb) = (self.merge(cap)?, other.merge(cap)?);
        Ok(ja.kets()[0].fidelity(&jb.kets()[0])?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationOutcome {
    pub accepted: bool,
    pub post_key: QuantumKey,
}

/// Coherently evaluates `f(branch, key) -> Option<message>` on block `i`,
/// measures the result and discards the output register.
///
/// The output register holds a validity flag followed by the message, so a
/// branch whose key fails to decrypt yields `None` without aborting.
pub(crate) fn coherent_block_decrypt<F, R>(
    key: &QuantumKey,
    i: usize,
    msg_bits: usize,
    f: F,
    rng: &mut R,
) -> Result<(Option<BitString>, QuantumKey)>
where
    F: Fn(bool, &BitString) -> Option<BitString>,
    R: Rng + ?Sized,
{
    let (b, dk, out) = (branch_register(i), key_register(i), output_register(i));
    let at = key.locate(&b)?;
    let mut kets = key.kets().to_vec();
    let extended = kets[at].apply_classical(&[&b, &dk], Register::new(&out, msg_bits + 1), |v| {
        let value = match f(v[0].get(0), v[1]) {
            Some(m) if m.len() == msg_bits => BitString::ones(1).concat(&m),
            _ => BitString::zeros(msg_bits + 1),
        };
        Ok::<_, std::convert::Infallible>(value)
    })?;
    let (value, measured) = extended.measure_register(&out, rng)?;
    kets[at] = measured.discard_register(&out)?;
    let message = value.get(0).then(|| value.slice(1..msg_bits + 1));
    Ok((message, key.rebuild(kets)))
}

/// Binary projective measurement of `key` onto the product of `targets`.
///
/// A block-structured key is measured block by block and accepted iff every
/// block accepts; a joint key is projected onto the joint target. Any other
/// register layout is a layout error.
pub(crate) fn project_onto_blocks<R: Rng + ?Sized>(
    targets: &[Ket],
    key: &QuantumKey,
    rng: &mut R,
) -> Result<VerificationOutcome> {
    match key {
        QuantumKey::Blocks(kets) => {
            if kets.len() != targets.len() {
                return Err(Error::Quantum(QsimError::Layout(format!(
                    "returned key has {} blocks, expected {}",
                    kets.len(),
                    targets.len()
                ))));
            }
            let mut accepted = true;
            let mut post = Vec::with_capacity(kets.len());
            for (k, t) in kets.iter().zip(targets) {
                let (ok, p) = k.project(t, rng)?;
                accepted &= ok;
                post.push(p);
            }
            Ok(VerificationOutcome {
                accepted,
                post_key: QuantumKey::Blocks(post),
            })
        }
        QuantumKey::Joint(k) => {
            let cap = k.layout().cap().max(k.layout().total_width());
            let joint = QuantumKey::Blocks(targets.to_vec()).merge(cap)?;
            let (accepted, post) = k.project(&joint.into_kets().remove(0), rng)?;
            Ok(VerificationOutcome {
                accepted,
                post_key: QuantumKey::Joint(post),
            })
        }
    }
}

/// Keys produced by a leasing scheme's key generation.
#[derive(Debug, Clone)]
pub struct LeasedKeys<S: LeasingScheme + ?Sized> {
    pub ek: S::EncKey,
    /// Classical part of the decryption key (unit for plain SKL).
    pub aux: S::Aux,
    pub qdk: QuantumKey,
    pub vk: S::VerKey,
}

/// Common interface of every scheme with leased quantum keys.
pub trait LeasingScheme: Send + Sync {
    type EncKey: Material;
    type VerKey: Material;
    type Ciphertext: Material;
    type Aux: Material;

    fn name(&self) -> &'static str;

    fn message_bits(&self) -> usize;

    /// Number of superposed blocks in an honest key.
    fn blocks(&self) -> usize;

    fn keygen<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<LeasedKeys<Self>>;

    fn encrypt<R: Rng + ?Sized>(&self, ek: &Self::EncKey, m: &BitString, rng: &mut R) -> Result<Self::Ciphertext>;

    /// Returns `None` when decryption yields no valid message.
    fn decrypt<R: Rng + ?Sized>(
        &self,
        aux: &Self::Aux,
        key: &QuantumKey,
        ct: &Self::Ciphertext,
        rng: &mut R,
    ) -> Result<(Option<BitString>, QuantumKey)>;

    fn verify<R: Rng + ?Sized>(&self, vk: &Self::VerKey, key: &QuantumKey, rng: &mut R) -> Result<VerificationOutcome>;

    fn sample_message<R: Rng + ?Sized>(&self, rng: &mut R) -> BitString {
        BitString::random(self.message_bits(), rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn key() -> (Ket, QuantumKey) {
        let t = superposed_block(0, &BitString::parse_binary("0011").unwrap(), &BitString::parse_binary("0101").unwrap())
            .unwrap();
        (t.clone(), QuantumKey::Blocks(vec![t]))
    }

    #[test]
    fn measured_block_is_classical() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let (_, k) = key();
        assert!(!k.is_classical());
        let (outcomes, m) = k.measure_blocks(&[0], &mut rng).unwrap();
        assert!(m.is_classical());
        assert_eq!(outcomes.len(), 1);
        assert!((m.fidelity(&k).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn agreeing_branches_leave_the_key_intact() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let (_, k) = key();
        let m = BitString::parse_binary("110").unwrap();
        let (out, post) = coherent_block_decrypt(&k, 0, 3, |_, _| Some(m.clone()), &mut rng).unwrap();
        assert_eq!(out, Some(m));
        assert!((post.fidelity(&k).unwrap() - 1.0).abs() < 1e-12);
        let (out, _) = coherent_block_decrypt(&k, 0, 3, |_, _| None, &mut rng).unwrap();
        assert_eq!(out, None);
    }

    #[test]
    fn disagreeing_branches_collapse_the_key() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let (_, k) = key();
        let (_, post) = coherent_block_decrypt(&k, 0, 1, |b, _| Some(BitString::from_bools([b])), &mut rng).unwrap();
        assert!(post.is_classical());
        assert!((post.fidelity(&k).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn joint_and_block_projection_agree_on_honest_keys() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let a = superposed_block(0, &BitString::zeros(2), &BitString::ones(2)).unwrap();
        let b = superposed_block(1, &BitString::zeros(2), &BitString::ones(2)).unwrap();
        let targets = vec![a.clone(), b.clone()];
        let k = QuantumKey::Blocks(targets.clone());
        assert!(project_onto_blocks(&targets, &k, &mut rng).unwrap().accepted);
        let joint = k.merge(64).unwrap();
        assert!(project_onto_blocks(&targets, &joint, &mut rng).unwrap().accepted);
        assert!((joint.fidelity(&k).unwrap() - 1.0).abs() < 1e-12);
        let short = QuantumKey::Blocks(vec![a]);
        assert!(project_onto_blocks(&targets, &short, &mut rng).is_err());
    }
}
