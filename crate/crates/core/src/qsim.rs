//! Exact sparse simulator for superpositions over labeled classical registers.
//!
//! A [`Ket`] maps basis labels (one bit string per register) to complex
//! amplitudes. The only state-changing primitives are the ones the leasing
//! constructions need: reversible classical computation into a fresh register,
//! computational-basis measurement of one register, and the binary projective
//! measurement onto a known target state. Every operation returns a new value;
//! nothing is mutated in place.
//!
//! Terms are kept in a `BTreeMap`, so iteration and serialization follow the
//! lexicographic order of basis labels.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::bits::BitString;

/// Amplitudes with squared magnitude below this are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-12;
/// Allowed deviation of the squared norm from one.
pub const NORM_TOLERANCE: f64 = 1e-9;
/// Default upper bound on the total width of a basis label.
pub const DEFAULT_WIDTH_CAP: usize = 4096;

pub type Amplitude = Complex64;
pub type BasisLabel = Vec<BitString>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QsimError {
    #[error("layout error: {0}")]
    Layout(String),
    #[error("unknown register {0:?}")]
    UnknownRegister(String),
    #[error("duplicate basis label {0}")]
    DuplicateLabel(String),
    #[error("degenerate state: all amplitudes vanish")]
    Degenerate,
    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),
    #[error("register {0:?} does not hold a definite value")]
    NotDefinite(String),
    #[error("non-finite amplitude")]
    NonFinite,
    #[error("classical map failed on basis label {label}: {message}")]
    Classical { label: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    pub name: String,
    pub width: usize,
}

impl Register {
    pub fn new(name: impl Into<String>, width: usize) -> Self {
        Self {
            name: name.into(),
            width,
        }
    }
}

/// Ordered register names and widths.
#[derive(Debug, Clone)]
pub struct RegisterLayout {
    registers: Vec<Register>,
    cap: usize,
}

impl PartialEq for RegisterLayout {
    fn eq(&self, other: &Self) -> bool {
        self.registers == other.registers
    }
}

impl Eq for RegisterLayout {}

impl RegisterLayout {
    pub fn new(registers: Vec<Register>) -> Result<Self, QsimError> {
        Self::with_cap(registers, DEFAULT_WIDTH_CAP)
    }

    pub fn with_cap(registers: Vec<Register>, cap: usize) -> Result<Self, QsimError> {
        let mut names = BTreeSet::new();
        for r in &registers {
            if r.width == 0 {
                return Err(QsimError::Layout(format!("register {:?} has width 0", r.name)));
            }
            if !names.insert(r.name.as_str()) {
                return Err(QsimError::Layout(format!("duplicate register name {:?}", r.name)));
            }
        }
        let total: usize = registers.iter().map(|r| r.width).sum();
        if total > cap {
            return Err(QsimError::Layout(format!(
                "total width {total} exceeds the cap of {cap} bits"
            )));
        }
        Ok(Self { registers, cap })
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn total_width(&self) -> usize {
        self.registers.iter().map(|r| r.width).sum()
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn index_of(&self, name: &str) -> Result<usize, QsimError> {
        self.registers
            .iter()
            .position(|r| r.name == name)
            .ok_or_else(|| QsimError::UnknownRegister(name.to_string()))
    }

    fn check_label(&self, label: &[BitString]) -> Result<(), QsimError> {
        if label.len() != self.registers.len() {
            return Err(QsimError::Layout(format!(
                "label has {} registers, layout has {}",
                label.len(),
                self.registers.len()
            )));
        }
        for (value, reg) in label.iter().zip(&self.registers) {
            if value.len() != reg.width {
                return Err(QsimError::Layout(format!(
                    "register {:?} expects {} bits, got {}",
                    reg.name,
                    reg.width,
                    value.len()
                )));
            }
        }
        Ok(())
    }
}

/// Outcome analysis of the binary measurement `(I - |t><t|, |t><t|)`.
#[derive(Debug, Clone)]
pub struct ProjectionResult {
    pub accept_probability: f64,
    pub accepted_state: Option<Ket>,
    pub rejected_state: Option<Ket>,
}

#[derive(Clone, PartialEq)]
pub struct Ket {
    layout: RegisterLayout,
    terms: BTreeMap<BasisLabel, Amplitude>,
}

fn label_string(label: &[BitString]) -> String {
    let parts: Vec<String> = label.iter().map(|b| b.to_hex()).collect();
    format!("({})", parts.join(","))
}

impl Ket {
    pub fn basis(layout: RegisterLayout, values: BasisLabel) -> Result<Self, QsimError> {
        layout.check_label(&values)?;
        let mut terms = BTreeMap::new();
        terms.insert(values, Complex64::new(1.0, 0.0));
        Ok(Self { layout, terms })
    }

    /// Normalized superposition of the given terms. Labels must be distinct.
    pub fn superpose(
        layout: RegisterLayout,
        terms: Vec<(BasisLabel, Amplitude)>,
    ) -> Result<Self, QsimError> {
        if terms.is_empty() {
            return Err(QsimError::Degenerate);
        }
        let mut map = BTreeMap::new();
        for (label, amp) in terms {
            layout.check_label(&label)?;
            if !amp.re.is_finite() || !amp.im.is_finite() {
                return Err(QsimError::NonFinite);
            }
            let shown = label_string(&label);
            if map.insert(label, amp).is_some() {
                return Err(QsimError::DuplicateLabel(shown));
            }
        }
        Self::normalized(layout, map)
    }

    fn normalized(
        layout: RegisterLayout,
        mut terms: BTreeMap<BasisLabel, Amplitude>,
    ) -> Result<Self, QsimError> {
        let norm_sqr: f64 = terms.values().map(|a| a.norm_sqr()).sum();
        if norm_sqr <= PRUNE_THRESHOLD {
            return Err(QsimError::Degenerate);
        }
        let scale = 1.0 / norm_sqr.sqrt();
        for amp in terms.values_mut() {
            *amp *= scale;
        }
        terms.retain(|_, a| a.norm_sqr() >= PRUNE_THRESHOLD);
        if terms.is_empty() {
            return Err(QsimError::Degenerate);
        }
        Ok(Self { layout, terms })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisLabel, &Amplitude)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn amplitude(&self, label: &[BitString]) -> Amplitude {
        self.terms.get(label).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_basis_state(&self) -> bool {
        self.terms.len() == 1
    }

    /// Tensor product; register names must be disjoint. The width cap of the
    /// result is the larger of the two operands' caps.
    pub fn tensor(&self, other: &Ket) -> Result<Ket, QsimError> {
        self.tensor_with_cap(other, self.layout.cap.max(other.layout.cap))
    }

    pub fn tensor_with_cap(&self, other: &Ket, cap: usize) -> Result<Ket, QsimError> {
        let mut regs = self.layout.registers.clone();
        regs.extend(other.layout.registers.iter().cloned());
        let layout = RegisterLayout::with_cap(regs, cap)?;
        let mut terms = BTreeMap::new();
        for (la, aa) in &self.terms {
            for (lb, ab) in &other.terms {
                let mut label = la.clone();
                label.extend(lb.iter().cloned());
                let amp = aa * ab;
                if amp.norm_sqr() >= PRUNE_THRESHOLD {
                    terms.insert(label, amp);
                }
            }
        }
        Ok(Ket { layout, terms })
    }

    /// Applies `|v>|0> -> |v>|f(v)>` writing into a fresh register.
    ///
    /// `f` sees the values of `inputs` in the given order. The labels are
    /// extended injectively, so amplitudes never interfere.
    pub fn apply_classical<F, E>(
        &self,
        inputs: &[&str],
        output: Register,
        f: F,
    ) -> Result<Ket, QsimError>
    where
        F: Fn(&[&BitString]) -> Result<BitString, E>,
        E: fmt::Display,
    {
        if self.layout.index_of(&output.name).is_ok() {
            return Err(QsimError::Layout(format!(
                "output register {:?} already exists",
                output.name
            )));
        }
        let idx = inputs
            .iter()
            .map(|n| self.layout.index_of(n))
            .collect::<Result<Vec<_>, _>>()?;
        let mut regs = self.layout.registers.clone();
        let width = output.width;
        regs.push(output);
        let layout = RegisterLayout::with_cap(regs, self.layout.cap)?;
        let mut terms = BTreeMap::new();
        for (label, amp) in &self.terms {
            let args: Vec<&BitString> = idx.iter().map(|&i| &label[i]).collect();
            let out = f(&args).map_err(|e| QsimError::Classical {
                label: label_string(label),
                message: e.to_string(),
            })?;
            if out.len() != width {
                return Err(QsimError::Classical {
                    label: label_string(label),
                    message: format!("map produced {} bits for a {width}-bit register", out.len()),
                });
            }
            let mut extended = label.clone();
            extended.push(out);
            terms.insert(extended, *amp);
        }
        Ok(Ket { layout, terms })
    }

    /// Outcome distribution of a computational-basis measurement of `register`.
    pub fn register_distribution(&self, register: &str) -> Result<BTreeMap<BitString, f64>, QsimError> {
        let i = self.layout.index_of(register)?;
        let mut dist = BTreeMap::new();
        for (label, amp) in &self.terms {
            *dist.entry(label[i].clone()).or_insert(0.0) += amp.norm_sqr();
        }
        Ok(dist)
    }

    /// Measures one register in the computational basis (Born rule).
    pub fn measure_register<R: Rng + ?Sized>(
        &self,
        register: &str,
        rng: &mut R,
    ) -> Result<(BitString, Ket), QsimError> {
        let dist = self.register_distribution(register)?;
        let total: f64 = dist.values().sum();
        let u = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = None;
        for (value, p) in &dist {
            acc += p;
            if u < acc {
                chosen = Some(value.clone());
                break;
            }
        }
        // Rounding can leave u just past the last cumulative bucket.
        let value = chosen.unwrap_or_else(|| dist.keys().next_back().cloned().expect("non-empty"));
        let post = self.condition_on(register, &value)?;
        Ok((value, post))
    }

    /// Post-measurement state for a given outcome of `register`.
    pub fn condition_on(&self, register: &str, value: &BitString) -> Result<Ket, QsimError> {
        let i = self.layout.index_of(register)?;
        let terms: BTreeMap<_, _> = self
            .terms
            .iter()
            .filter(|(l, _)| &l[i] == value)
            .map(|(l, a)| (l.clone(), *a))
            .collect();
        Self::normalized(self.layout.clone(), terms)
    }

    /// Drops a register that holds the same value in every term.
    pub fn discard_register(&self, register: &str) -> Result<Ket, QsimError> {
        let i = self.layout.index_of(register)?;
        let mut values = self.terms.keys().map(|l| &l[i]);
        let first = values.next().expect("kets are never empty");
        if values.any(|v| v != first) {
            return Err(QsimError::NotDefinite(register.to_string()));
        }
        let mut regs = self.layout.registers.clone();
        regs.remove(i);
        let layout = RegisterLayout::with_cap(regs, self.layout.cap)?;
        let terms = self
            .terms
            .iter()
            .map(|(l, a)| {
                let mut l = l.clone();
                l.remove(i);
                (l, *a)
            })
            .collect();
        Ok(Ket { layout, terms })
    }

    fn check_same_layout(&self, other: &Ket) -> Result<(), QsimError> {
        if self.layout != other.layout {
            return Err(QsimError::Layout(format!(
                "layout mismatch: {:?} vs {:?}",
                self.layout.registers, other.layout.registers
            )));
        }
        Ok(())
    }

    /// `<self|other>`.
    pub fn inner_product(&self, other: &Ket) -> Result<Amplitude, QsimError> {
        self.check_same_layout(other)?;
        let (small, large, conj_small) = if self.terms.len() <= other.terms.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (label, a) in &small.terms {
            if let Some(b) = large.terms.get(label) {
                acc += if conj_small { a.conj() * b } else { b.conj() * a };
            }
        }
        Ok(acc)
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &Ket) -> Result<f64, QsimError> {
        Ok(self.inner_product(other)?.norm_sqr())
    }

    /// Analyzes the projective measurement onto `target` without sampling.
    pub fn projection_analysis(&self, target: &Ket) -> Result<ProjectionResult, QsimError> {
        self.check_same_layout(target)?;
        if (target.norm_sqr() - 1.0).abs() > NORM_TOLERANCE {
            return Err(QsimError::NotNormalized(target.norm_sqr()));
        }
        let overlap = target.inner_product(self)?;
        let p = overlap.norm_sqr().clamp(0.0, 1.0);
        let accepted_state = (p >= PRUNE_THRESHOLD).then(|| target.clone());
        let rejected_state = if 1.0 - p >= PRUNE_THRESHOLD {
            let mut terms = self.terms.clone();
            for (label, t) in &target.terms {
                *terms.entry(label.clone()).or_default() -= overlap * t;
            }
            Self::normalized(self.layout.clone(), terms).ok()
        } else {
            None
        };
        Ok(ProjectionResult {
            accept_probability: p,
            accepted_state,
            rejected_state,
        })
    }

    /// Samples the binary measurement onto `target`; returns whether the
    /// state was projected onto it, with the post-measurement state.
    pub fn project<R: Rng + ?Sized>(&self, target: &Ket, rng: &mut R) -> Result<(bool, Ket), QsimError> {
        let analysis = self.projection_analysis(target)?;
        let accept = rng.gen::<f64>() < analysis.accept_probability;
        let post = if accept {
            analysis.accepted_state
        } else {
            analysis.rejected_state
        };
        // A branch with probability below the pruning threshold is never drawn
        // except through floating-point rounding; fall back to the other one.
        let post = post.unwrap_or_else(|| target.clone());
        Ok((accept, post))
    }
}

impl fmt::Debug for Ket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let regs: Vec<String> = self
            .layout
            .registers
            .iter()
            .map(|r| format!("{}:{}", r.name, r.width))
            .collect();
        write!(f, "Ket[{}]{{", regs.join(", "))?;
        for (i, (label, amp)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}: {:.6}{:+.6}i", label_string(label), amp.re, amp.im)?;
        }
        f.write_str("}")
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    label: Vec<String>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct KetRepr {
    layout: Vec<Register>,
    terms: Vec<TermRepr>,
}

impl Serialize for Ket {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        KetRepr {
            layout: self.layout.registers.clone(),
            terms: self
                .terms
                .iter()
                .map(|(label, amp)| TermRepr {
                    label: label.iter().map(|b| b.to_hex()).collect(),
                    re: amp.re,
                    im: amp.im,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Ket {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = KetRepr::deserialize(deserializer)?;
        let total: usize = repr.layout.iter().map(|r| r.width).sum();
        let layout = RegisterLayout::with_cap(repr.layout, total.max(DEFAULT_WIDTH_CAP))
            .map_err(D::Error::custom)?;
        let mut terms = BTreeMap::new();
        for t in repr.terms {
            if t.label.len() != layout.registers.len() {
                return Err(D::Error::custom("term label does not match the layout"));
            }
            let label = t
                .label
                .iter()
                .zip(&layout.registers)
                .map(|(h, r)| BitString::from_hex(h, r.width))
                .collect::<Result<Vec<_>, _>>()
                .map_err(D::Error::custom)?;
            let amp = Complex64::new(t.re, t.im);
            if !amp.re.is_finite() || !amp.im.is_finite() {
                return Err(D::Error::custom(QsimError::NonFinite));
            }
            let shown = label_string(&label);
            if terms.insert(label, amp).is_some() {
                return Err(D::Error::custom(QsimError::DuplicateLabel(shown)));
            }
        }
        if terms.is_empty() {
            return Err(D::Error::custom(QsimError::Degenerate));
        }
        let ket = Ket { layout, terms };
        let norm = ket.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(D::Error::custom(QsimError::NotNormalized(norm)));
        }
        Ok(ket)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn bits(s: &str) -> BitString {
        BitString::parse_binary(s).unwrap()
    }

    fn layout_b_dk() -> RegisterLayout {
        RegisterLayout::new(vec![Register::new("b", 1), Register::new("dk", 2)]).unwrap()
    }

    fn two_branch() -> Ket {
        let one = Complex64::new(1.0, 0.0);
        Ket::superpose(
            layout_b_dk(),
            vec![(vec![bits("0"), bits("01")], one), (vec![bits("1"), bits("10")], one)],
        )
        .unwrap()
    }

    #[test]
    fn basis_ket_checks_widths() {
        let k = Ket::basis(layout_b_dk(), vec![bits("0"), bits("01")]).unwrap();
        assert_eq!(k.num_terms(), 1);
        assert_eq!(k.amplitude(&[bits("0"), bits("01")]), Complex64::new(1.0, 0.0));
        let err = Ket::basis(layout_b_dk(), vec![bits("0"), bits("011")]).unwrap_err();
        assert!(matches!(err, QsimError::Layout(_)));
    }

    #[test]
    fn superpose_normalizes_and_rejects_duplicates() {
        let k = two_branch();
        for (_, a) in k.terms() {
            assert!((a.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        }
        let one = Complex64::new(1.0, 0.0);
        let dup = Ket::superpose(
            layout_b_dk(),
            vec![(vec![bits("0"), bits("01")], one), (vec![bits("0"), bits("01")], one)],
        );
        assert!(matches!(dup, Err(QsimError::DuplicateLabel(_))));
        let zero = Ket::superpose(layout_b_dk(), vec![(vec![bits("0"), bits("01")], Complex64::default())]);
        assert!(matches!(zero, Err(QsimError::Degenerate)));
    }

    #[test]
    fn layout_rejects_bad_registers() {
        assert!(RegisterLayout::new(vec![Register::new("a", 0)]).is_err());
        assert!(RegisterLayout::new(vec![Register::new("a", 1), Register::new("a", 2)]).is_err());
        assert!(RegisterLayout::new(vec![Register::new("a", DEFAULT_WIDTH_CAP + 1)]).is_err());
    }

    #[test]
    fn tensor_of_two_branch_kets() {
        let a = two_branch();
        let l2 = RegisterLayout::new(vec![Register::new("c", 1)]).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let b = Ket::superpose(l2, vec![(vec![bits("0")], one), (vec![bits("1")], one)]).unwrap();
        let t = a.tensor(&b).unwrap();
        assert_eq!(t.num_terms(), 4);
        for (_, amp) in t.terms() {
            assert!((amp.re - 0.5).abs() < 1e-15);
        }
        assert!((t.norm_sqr() - 1.0).abs() < NORM_TOLERANCE);
        assert!(a.tensor(&a).is_err());
    }

    #[test]
    fn apply_classical_extends_labels() {
        let k = two_branch();
        let copied = k
            .apply_classical(&["b"], Register::new("out", 1), |v| Ok::<_, String>(v[0].clone()))
            .unwrap();
        for (label, _) in copied.terms() {
            assert_eq!(label[0], label[2]);
        }
        let zeroed = k
            .apply_classical(&["b"], Register::new("out", 1), |_| Ok::<_, String>(bits("0")))
            .unwrap();
        let expected = k
            .tensor(&Ket::basis(RegisterLayout::new(vec![Register::new("out", 1)]).unwrap(), vec![bits("0")]).unwrap())
            .unwrap();
        assert!((zeroed.fidelity(&expected).unwrap() - 1.0).abs() < 1e-12);
        let err = k
            .apply_classical(&["dk"], Register::new("out", 1), |v| {
                if v[0].get(0) {
                    Err("boom")
                } else {
                    Ok(bits("1"))
                }
            })
            .unwrap_err();
        assert!(matches!(err, QsimError::Classical { .. }));
        assert!(k
            .apply_classical(&["b"], Register::new("dk", 1), |v| Ok::<_, String>(v[0].clone()))
            .is_err());
    }

    #[test]
    fn measurement_collapses_branches() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let k = two_branch();
        let (v, post) = k.measure_register("b", &mut rng).unwrap();
        assert!(post.is_basis_state());
        let (label, _) = post.terms().next().unwrap();
        assert_eq!(label[0], v);
        let basis = Ket::basis(layout_b_dk(), vec![bits("1"), bits("10")]).unwrap();
        let (v, post) = basis.measure_register("dk", &mut rng).unwrap();
        assert_eq!(v, bits("10"));
        assert_eq!(post, basis);
    }

    #[test]
    fn projection_examples() {
        let target = two_branch();
        let a = target.projection_analysis(&target).unwrap();
        assert!((a.accept_probability - 1.0).abs() < 1e-12);
        assert!(a.rejected_state.is_none());

        let half = Ket::basis(layout_b_dk(), vec![bits("0"), bits("01")]).unwrap();
        let a = half.projection_analysis(&target).unwrap();
        assert!((a.accept_probability - 0.5).abs() < 1e-12);
        let rej = a.rejected_state.unwrap();
        assert!(rej.inner_product(&target).unwrap().norm() < 1e-9);

        let orth = Ket::basis(layout_b_dk(), vec![bits("1"), bits("11")]).unwrap();
        let a = orth.projection_analysis(&target).unwrap();
        assert_eq!(a.accept_probability, 0.0);
        assert!(a.accepted_state.is_none());
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        assert!(!orth.project(&target, &mut rng).unwrap().0);
    }

    #[test]
    fn fidelity_examples() {
        let k = two_branch();
        assert!((k.inner_product(&k).unwrap().re - 1.0).abs() < 1e-12);
        let b0 = Ket::basis(layout_b_dk(), vec![bits("0"), bits("01")]).unwrap();
        let b1 = Ket::basis(layout_b_dk(), vec![bits("1"), bits("01")]).unwrap();
        assert_eq!(b0.inner_product(&b1).unwrap().norm(), 0.0);
        assert!((k.fidelity(&b0).unwrap() - 0.5).abs() < 1e-12);
        let other = Ket::basis(RegisterLayout::new(vec![Register::new("x", 1)]).unwrap(), vec![bits("0")]).unwrap();
        assert!(k.inner_product(&other).is_err());
    }

    #[test]
    fn discard_requires_definite_value() {
        let k = two_branch();
        let out = k
            .apply_classical(&[], Register::new("out", 2), |_| Ok::<_, String>(bits("11")))
            .unwrap();
        let stripped = out.discard_register("out").unwrap();
        assert_eq!(stripped, k);
        assert!(matches!(k.discard_register("b"), Err(QsimError::NotDefinite(_))));
    }

    #[test]
    fn json_round_trip_is_exact() {
        let k = two_branch();
        let s = serde_json::to_string(&k).unwrap();
        let back: Ket = serde_json::from_str(&s).unwrap();
        assert_eq!(back, k);
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
        assert!(s.starts_with("{\"layout\":[{\"name\":\"b\",\"width\":1}"));
    }
}
