//! Yao garbling with point-and-permute.
//!
//! Each AND/XOR gate gets a four-row table. The row selected by the color
//! bits of the two active input labels holds `PRF(gate, A, B) XOR (C || 0^k)`,
//! where `C` is the active output label; the zero half authenticates the row
//! so a wrong label is detected instead of yielding garbage. NOT gates cost
//! nothing (the output pair is the input pair swapped). Constant gates publish
//! only their active label, whose random color bit reveals nothing about the
//! constant.

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::prf::prf;
use super::{BoolCircuit, CircuitError, CircuitShape, GateKind, GateOp};
use crate::bits::BitString;

pub const DEFAULT_LABEL_BYTES: usize = 16;
const MIN_LABEL_BYTES: usize = 8;
const MAX_LABEL_BYTES: usize = 32;

const ROW_DOMAIN: &[u8] = b"keylease/gc/row";
const OUT_DOMAIN: &[u8] = b"keylease/gc/out";

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Label(Vec<u8>);

impl Label {
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut b = vec![0u8; len];
        rng.fill_bytes(&mut b);
        Label(b)
    }

    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        Label(bytes)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Point-and-permute bit: the last bit of the label.
    pub fn color(&self) -> bool {
        self.0.last().is_some_and(|b| b & 1 == 1)
    }

    fn with_color(mut self, color: bool) -> Self {
        let last = self.0.len() - 1;
        self.0[last] = (self.0[last] & !1) | u8::from(color);
        self
    }

    pub fn to_bits(&self) -> BitString {
        BitString::from_bytes(self.0.clone(), self.0.len() * 8)
    }

    pub fn from_bits(bits: &BitString) -> Self {
        Label(bits.as_bytes().to_vec())
    }
}

impl std::fmt::Debug for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Label({})", hex::encode(&self.0))
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(&self.0))
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        hex::decode(s).map(Label).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireLabelPair {
    pub lab0: Label,
    pub lab1: Label,
}

impl WireLabelPair {
    fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let lab0 = Label::random(len, rng);
        let lab1 = Label::random(len, rng).with_color(!lab0.color());
        Self { lab0, lab1 }
    }

    pub fn get(&self, bit: bool) -> &Label {
        if bit {
            &self.lab1
        } else {
            &self.lab0
        }
    }

    fn swapped(&self) -> Self {
        Self {
            lab0: self.lab1.clone(),
            lab1: self.lab0.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GarbledGate {
    Table(Vec<Label>),
    Free,
    Const(Label),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GarbledCircuit {
    shape: CircuitShape,
    label_bytes: usize,
    gates: Vec<GarbledGate>,
    decode: Vec<[Label; 2]>,
}

fn row_pad(gate: usize, a: &Label, b: &Label, len: usize) -> Vec<u8> {
    prf(ROW_DOMAIN, &[&(gate as u64).to_le_bytes(), &a.0, &b.0], 2 * len)
}

fn out_digest(index: usize, label: &Label) -> Label {
    Label(prf(OUT_DOMAIN, &[&(index as u64).to_le_bytes(), &label.0], label.len()))
}

fn seal_row(gate: usize, a: &Label, b: &Label, out: &Label) -> Label {
    let len = out.len();
    let mut row = row_pad(gate, a, b, len);
    for (r, o) in row.iter_mut().zip(&out.0) {
        *r ^= o;
    }
    Label(row)
}

fn row_index(a: &Label, b: &Label) -> usize {
    (usize::from(a.color()) << 1) | usize::from(b.color())
}

fn check_label_bytes(n: usize) -> Result<(), CircuitError> {
    if !(MIN_LABEL_BYTES..=MAX_LABEL_BYTES).contains(&n) {
        return Err(CircuitError::Shape(format!(
            "label width of {n} bytes outside {MIN_LABEL_BYTES}..={MAX_LABEL_BYTES}"
        )));
    }
    Ok(())
}

/// Garbles with the default 128-bit labels.
pub fn garble<R: Rng + ?Sized>(c: &BoolCircuit, rng: &mut R) -> (Vec<WireLabelPair>, GarbledCircuit) {
    garble_with_kappa(c, DEFAULT_LABEL_BYTES, rng).expect("default label width is valid")
}

pub fn garble_with_kappa<R: Rng + ?Sized>(
    c: &BoolCircuit,
    label_bytes: usize,
    rng: &mut R,
) -> Result<(Vec<WireLabelPair>, GarbledCircuit), CircuitError> {
    check_label_bytes(label_bytes)?;
    let mut pairs: Vec<WireLabelPair> = (0..c.input_width())
        .map(|_| WireLabelPair::random(label_bytes, rng))
        .collect();
    let mut gates = Vec::with_capacity(c.gates().len());
    for (g, gate) in c.gates().iter().enumerate() {
        let (pair, garbled) = match gate.op {
            GateOp::Not => (pairs[gate.inputs[0]].swapped(), GarbledGate::Free),
            GateOp::Const0 | GateOp::Const1 => {
                let pair = WireLabelPair::random(label_bytes, rng);
                let active = pair.get(gate.op == GateOp::Const1).clone();
                (pair, GarbledGate::Const(active))
            }
            GateOp::And | GateOp::Xor => {
                let out = WireLabelPair::random(label_bytes, rng);
                let (pa, pb) = (&pairs[gate.inputs[0]], &pairs[gate.inputs[1]]);
                let mut rows = vec![Label(Vec::new()); 4];
                for a in [false, true] {
                    for b in [false, true] {
                        let (la, lb) = (pa.get(a), pb.get(b));
                        let v = gate.op.apply(a, b);
                        rows[row_index(la, lb)] = seal_row(g, la, lb, out.get(v));
                    }
                }
                (out, GarbledGate::Table(rows))
            }
        };
        pairs.push(pair);
        gates.push(garbled);
    }
    let decode = c
        .outputs()
        .iter()
        .enumerate()
        .map(|(j, &w)| [out_digest(j, &pairs[w].lab0), out_digest(j, &pairs[w].lab1)])
        .collect();
    pairs.truncate(c.input_width());
    Ok((
        pairs,
        GarbledCircuit {
            shape: c.shape(),
            label_bytes,
            gates,
            decode,
        },
    ))
}

impl GarbledCircuit {
    pub fn shape(&self) -> &CircuitShape {
        &self.shape
    }

    pub fn label_bytes(&self) -> usize {
        self.label_bytes
    }

    pub fn gates(&self) -> &[GarbledGate] {
        &self.gates
    }

    /// Checks that the tables agree with the declared shape.
    pub fn validate(&self) -> Result<(), CircuitError> {
        self.shape.validate()?;
        check_label_bytes(self.label_bytes)?;
        if self.gates.len() != self.shape.gates.len() || self.decode.len() != self.shape.output_width {
            return Err(CircuitError::Shape("table count disagrees with shape".into()));
        }
        let k = self.label_bytes;
        for (g, (gg, sg)) in self.gates.iter().zip(&self.shape.gates).enumerate() {
            let ok = match (gg, sg.kind) {
                (GarbledGate::Table(rows), GateKind::And | GateKind::Xor) => {
                    rows.len() == 4 && rows.iter().all(|r| r.len() == 2 * k)
                }
                (GarbledGate::Free, GateKind::Not) => true,
                (GarbledGate::Const(l), GateKind::Const) => l.len() == k,
                _ => false,
            };
            if !ok {
                return Err(CircuitError::Shape(format!("garbled gate {g} does not match its kind")));
            }
        }
        if self.decode.iter().flatten().any(|d| d.len() != k) {
            return Err(CircuitError::Shape("decode digest of wrong width".into()));
        }
        Ok(())
    }
}

pub fn gc_eval(gc: &GarbledCircuit, labels: &[Label]) -> Result<BitString, CircuitError> {
    gc.validate()?;
    let k = gc.label_bytes;
    if labels.len() != gc.shape.input_width {
        return Err(CircuitError::InputWidth {
            expected: gc.shape.input_width,
            actual: labels.len(),
        });
    }
    if let Some(i) = labels.iter().position(|l| l.len() != k) {
        return Err(CircuitError::InvalidLabel(format!("input label {i} has the wrong width")));
    }
    let mut wires: Vec<Label> = labels.to_vec();
    wires.reserve(gc.gates.len());
    for (g, (gate, sg)) in gc.gates.iter().zip(&gc.shape.gates).enumerate() {
        let active = match gate {
            GarbledGate::Free => wires[sg.inputs[0]].clone(),
            GarbledGate::Const(l) => l.clone(),
            GarbledGate::Table(rows) => {
                let (a, b) = (&wires[sg.inputs[0]], &wires[sg.inputs[1]]);
                let mut row = rows[row_index(a, b)].0.clone();
                for (r, p) in row.iter_mut().zip(row_pad(g, a, b, k)) {
                    *r ^= p;
                }
                if row[k..].iter().any(|&z| z != 0) {
                    return Err(CircuitError::InvalidLabel(format!("authentication failed at gate {g}")));
                }
                row.truncate(k);
                Label(row)
            }
        };
        wires.push(active);
    }
    let mut out = Vec::with_capacity(gc.decode.len());
    for (j, (&w, [d0, d1])) in gc.shape.outputs.iter().zip(&gc.decode).enumerate() {
        let d = out_digest(j, &wires[w]);
        if &d == d0 {
            out.push(false);
        } else if &d == d1 {
            out.push(true);
        } else {
            return Err(CircuitError::InvalidLabel(format!("output {j} does not decode")));
        }
    }
    Ok(BitString::from_bools(out))
}

/// Simulated garbling from the public shape and the output value alone.
pub fn sim_gc<R: Rng + ?Sized>(
    shape: &CircuitShape,
    y: &BitString,
    rng: &mut R,
) -> Result<(Vec<Label>, GarbledCircuit), CircuitError> {
    shape.validate()?;
    if y.len() != shape.output_width {
        return Err(CircuitError::Shape(format!(
            "output value has {} bits, shape has {} outputs",
            y.len(),
            shape.output_width
        )));
    }
    let k = DEFAULT_LABEL_BYTES;
    let mut wires: Vec<Label> = (0..shape.input_width).map(|_| Label::random(k, rng)).collect();
    let mut gates = Vec::with_capacity(shape.gates.len());
    for (g, sg) in shape.gates.iter().enumerate() {
        let (active, garbled) = match sg.kind {
            GateKind::Not => (wires[sg.inputs[0]].clone(), GarbledGate::Free),
            GateKind::Const => {
                let l = Label::random(k, rng);
                (l.clone(), GarbledGate::Const(l))
            }
            GateKind::And | GateKind::Xor => {
                let out = Label::random(k, rng);
                let (a, b) = (&wires[sg.inputs[0]], &wires[sg.inputs[1]]);
                let mut rows: Vec<Label> = (0..4).map(|_| Label::random(2 * k, rng)).collect();
                rows[row_index(a, b)] = seal_row(g, a, b, &out);
                (out, GarbledGate::Table(rows))
            }
        };
        wires.push(active);
        gates.push(garbled);
    }
    let decode = shape
        .outputs
        .iter()
        .enumerate()
        .map(|(j, &w)| {
            let real = out_digest(j, &wires[w]);
            let filler = Label::random(k, rng);
            if y.get(j) {
                [filler, real]
            } else {
                [real, filler]
            }
        })
        .collect();
    wires.truncate(shape.input_width);
    Ok((
        wires,
        GarbledCircuit {
            shape: shape.clone(),
            label_bytes: k,
            gates,
            decode,
        },
    ))
}
