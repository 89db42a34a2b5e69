//! Boolean circuits: a gate-list IR, plain evaluation, a text format, Yao
//! garbling, and the circuit builders used by the encryption layers.
//!
//! Wires are numbered densely. Wires `0..input_width` carry the input bits;
//! gate `g` drives wire `input_width + g`.

mod garble;
pub mod prf;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitString;

pub use garble::{
    garble, garble_with_kappa, gc_eval, sim_gc, GarbledCircuit, GarbledGate, Label, WireLabelPair,
    DEFAULT_LABEL_BYTES,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("gate {gate}: {op} takes {expected} inputs, got {actual}")]
    Arity {
        gate: usize,
        op: GateOp,
        expected: usize,
        actual: usize,
    },
    #[error("gate {gate} reads wire {wire}, which is not driven before it")]
    ForwardReference { gate: usize, wire: usize },
    #[error("output wire {0} does not exist")]
    MissingOutputWire(usize),
    #[error("expected {expected} input bits, got {actual}")]
    InputWidth { expected: usize, actual: usize },
    #[error("selector index {index} outside 1..={width}")]
    IndexOutOfRange { index: usize, width: usize },
    #[error("width mismatch: {0}")]
    WidthMismatch(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid wire label: {0}")]
    InvalidLabel(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GateOp {
    And,
    Xor,
    Not,
    Const0,
    Const1,
}

impl GateOp {
    pub fn arity(self) -> usize {
        match self {
            GateOp::And | GateOp::Xor => 2,
            GateOp::Not => 1,
            GateOp::Const0 | GateOp::Const1 => 0,
        }
    }

    pub fn kind(self) -> GateKind {
        match self {
            GateOp::And => GateKind::And,
            GateOp::Xor => GateKind::Xor,
            GateOp::Not => GateKind::Not,
            GateOp::Const0 | GateOp::Const1 => GateKind::Const,
        }
    }

    fn keyword(self) -> &'static str {
        match self {
            GateOp::And => "AND",
            GateOp::Xor => "XOR",
            GateOp::Not => "NOT",
            GateOp::Const0 => "CONST0",
            GateOp::Const1 => "CONST1",
        }
    }

    fn apply(self, a: bool, b: bool) -> bool {
        match self {
            GateOp::And => a & b,
            GateOp::Xor => a ^ b,
            GateOp::Not => !a,
            GateOp::Const0 => false,
            GateOp::Const1 => true,
        }
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// Gate operation with constant values erased. Garbled circuits reveal only
/// this much about each gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GateKind {
    And,
    Xor,
    Not,
    Const,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub op: GateOp,
    pub inputs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ShapeGate {
    pub kind: GateKind,
    pub inputs: Vec<usize>,
}

/// Public skeleton of a circuit: widths, gate kinds and wiring.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CircuitShape {
    pub input_width: usize,
    pub output_width: usize,
    pub gates: Vec<ShapeGate>,
    pub outputs: Vec<usize>,
}

impl CircuitShape {
    pub fn num_wires(&self) -> usize {
        self.input_width + self.gates.len()
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        for (g, gate) in self.gates.iter().enumerate() {
            let expected = match gate.kind {
                GateKind::And | GateKind::Xor => 2,
                GateKind::Not => 1,
                GateKind::Const => 0,
            };
            if gate.inputs.len() != expected {
                return Err(CircuitError::Shape(format!(
                    "gate {g} of kind {:?} has {} inputs",
                    gate.kind,
                    gate.inputs.len()
                )));
            }
            if let Some(&wire) = gate.inputs.iter().find(|&&w| w >= self.input_width + g) {
                return Err(CircuitError::ForwardReference { gate: g, wire });
            }
        }
        if self.outputs.len() != self.output_width {
            return Err(CircuitError::Shape(format!(
                "{} output wires for output width {}",
                self.outputs.len(),
                self.output_width
            )));
        }
        if let Some(&w) = self.outputs.iter().find(|&&w| w >= self.num_wires()) {
            return Err(CircuitError::MissingOutputWire(w));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CircuitRepr", into = "CircuitRepr")]
pub struct BoolCircuit {
    input_width: usize,
    gates: Vec<Gate>,
    outputs: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct CircuitRepr {
    input_width: usize,
    gates: Vec<Gate>,
    outputs: Vec<usize>,
}

impl TryFrom<CircuitRepr> for BoolCircuit {
    type Error = CircuitError;

    fn try_from(r: CircuitRepr) -> Result<Self, CircuitError> {
        BoolCircuit::new(r.input_width, r.gates, r.outputs)
    }
}

impl From<BoolCircuit> for CircuitRepr {
    fn from(c: BoolCircuit) -> Self {
        CircuitRepr {
            input_width: c.input_width,
            gates: c.gates,
            outputs: c.outputs,
        }
    }
}

impl BoolCircuit {
    /// Validates arity, topological order and output wires.
    pub fn new(input_width: usize, gates: Vec<Gate>, outputs: Vec<usize>) -> Result<Self, CircuitError> {
        for (g, gate) in gates.iter().enumerate() {
            if gate.inputs.len() != gate.op.arity() {
                return Err(CircuitError::Arity {
                    gate: g,
                    op: gate.op,
                    expected: gate.op.arity(),
                    actual: gate.inputs.len(),
                });
            }
            if let Some(&wire) = gate.inputs.iter().find(|&&w| w >= input_width + g) {
                return Err(CircuitError::ForwardReference { gate: g, wire });
            }
        }
        let wires = input_width + gates.len();
        if let Some(&w) = outputs.iter().find(|&&w| w >= wires) {
            return Err(CircuitError::MissingOutputWire(w));
        }
        Ok(Self {
            input_width,
            gates,
            outputs,
        })
    }

    pub fn input_width(&self) -> usize {
        self.input_width
    }

    pub fn output_width(&self) -> usize {
        self.outputs.len()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn num_wires(&self) -> usize {
        self.input_width + self.gates.len()
    }

    pub fn shape(&self) -> CircuitShape {
        CircuitShape {
            input_width: self.input_width,
            output_width: self.outputs.len(),
            gates: self
                .gates
                .iter()
                .map(|g| ShapeGate {
                    kind: g.op.kind(),
                    inputs: g.inputs.clone(),
                })
                .collect(),
            outputs: self.outputs.clone(),
        }
    }

    pub fn eval(&self, x: &BitString) -> Result<BitString, CircuitError> {
        if x.len() != self.input_width {
            return Err(CircuitError::InputWidth {
                expected: self.input_width,
                actual: x.len(),
            });
        }
        let mut wires: Vec<bool> = x.iter().collect();
        wires.reserve(self.gates.len());
        for gate in &self.gates {
            let a = gate.inputs.first().is_some_and(|&w| wires[w]);
            let b = gate.inputs.get(1).is_some_and(|&w| wires[w]);
            wires.push(gate.op.apply(a, b));
        }
        Ok(BitString::from_bools(self.outputs.iter().map(|&w| wires[w])))
    }
}

pub fn eval_circuit(c: &BoolCircuit, x: &BitString) -> Result<BitString, CircuitError> {
    c.eval(x)
}

impl fmt::Display for BoolCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "inputs {} outputs {}", self.input_width, self.outputs.len())?;
        for (g, gate) in self.gates.iter().enumerate() {
            write!(f, "w{} = {}", self.input_width + g, gate.op)?;
            for w in &gate.inputs {
                write!(f, " w{w}")?;
            }
            writeln!(f)?;
        }
        f.write_str("out")?;
        for w in &self.outputs {
            write!(f, " w{w}")?;
        }
        writeln!(f)
    }
}

fn parse_wire(tok: &str, line: usize) -> Result<usize, CircuitError> {
    tok.strip_prefix('w')
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| CircuitError::Parse {
            line,
            message: format!("expected a wire like w7, got {tok:?}"),
        })
}

impl FromStr for BoolCircuit {
    type Err = CircuitError;

    /// Parses the line format written by `Display`. Blank lines and `#`
    /// comments are ignored.
    fn from_str(s: &str) -> Result<Self, CircuitError> {
        let perr = |line: usize, message: String| CircuitError::Parse { line, message };
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (hline, header) = lines.next().ok_or_else(|| perr(1, "empty circuit".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        let (input_width, output_width) = match h.as_slice() {
            ["inputs", i, "outputs", o] => (
                i.parse::<usize>().map_err(|e| perr(hline, format!("bad input count: {e}")))?,
                o.parse::<usize>().map_err(|e| perr(hline, format!("bad output count: {e}")))?,
            ),
            _ => return Err(perr(hline, "expected header `inputs <n> outputs <k>`".into())),
        };

        let mut gates = Vec::new();
        let mut outputs = None;
        for (ln, text) in lines {
            if outputs.is_some() {
                return Err(perr(ln, "content after the `out` line".into()));
            }
            let toks: Vec<&str> = text.split_whitespace().collect();
            if toks[0] == "out" {
                let outs = toks[1..]
                    .iter()
                    .map(|t| parse_wire(t, ln))
                    .collect::<Result<Vec<_>, _>>()?;
                if outs.len() != output_width {
                    return Err(perr(
                        ln,
                        format!("header declares {output_width} outputs, `out` lists {}", outs.len()),
                    ));
                }
                outputs = Some(outs);
                continue;
            }
            if toks.len() < 3 || toks[1] != "=" {
                return Err(perr(ln, "expected `wN = OP ...`".into()));
            }
            let target = parse_wire(toks[0], ln)?;
            let expected = input_width + gates.len();
            if target != expected {
                return Err(perr(ln, format!("gate drives w{target}, expected w{expected}")));
            }
            let op = match toks[2] {
                "AND" => GateOp::And,
                "XOR" => GateOp::Xor,
                "NOT" => GateOp::Not,
                "CONST0" => GateOp::Const0,
                "CONST1" => GateOp::Const1,
                other => return Err(perr(ln, format!("unknown gate {other:?}"))),
            };
            let inputs = toks[3..]
                .iter()
                .map(|t| parse_wire(t, ln))
                .collect::<Result<Vec<_>, _>>()?;
            gates.push(Gate { op, inputs });
        }
        let outputs = outputs.ok_or_else(|| perr(s.lines().count(), "missing `out` line".into()))?;
        BoolCircuit::new(input_width, gates, outputs)
    }
}

/// Incremental construction helper; wire ids follow the dense numbering.
#[derive(Debug)]
pub struct CircuitBuilder {
    input_width: usize,
    gates: Vec<Gate>,
}

impl CircuitBuilder {
    pub fn new(input_width: usize) -> Self {
        Self {
            input_width,
            gates: Vec::new(),
        }
    }

    pub fn input(&self, i: usize) -> usize {
        assert!(i < self.input_width);
        i
    }

    fn push(&mut self, op: GateOp, inputs: Vec<usize>) -> usize {
        self.gates.push(Gate { op, inputs });
        self.input_width + self.gates.len() - 1
    }

    pub fn and(&mut self, a: usize, b: usize) -> usize {
        self.push(GateOp::And, vec![a, b])
    }

    pub fn xor(&mut self, a: usize, b: usize) -> usize {
        self.push(GateOp::Xor, vec![a, b])
    }

    pub fn not(&mut self, a: usize) -> usize {
        self.push(GateOp::Not, vec![a])
    }

    pub fn constant(&mut self, bit: bool) -> usize {
        self.push(if bit { GateOp::Const1 } else { GateOp::Const0 }, vec![])
    }

    pub fn finish(self, outputs: Vec<usize>) -> Result<BoolCircuit, CircuitError> {
        BoolCircuit::new(self.input_width, self.gates, outputs)
    }
}

/// Circuit computing `x -> m_{b XOR x[i]}` (selector `i` is 1-based).
///
/// All data (`b`, `m0`, `m1`, and the selector as a one-hot constant vector)
/// lives in constant gates, so the wiring depends only on `(input_width,
/// |m0|)`. [`build_const_circuit`] reuses this skeleton.
pub fn build_mux_circuit(
    b: bool,
    m0: &BitString,
    m1: &BitString,
    i: usize,
    input_width: usize,
) -> Result<BoolCircuit, CircuitError> {
    if m0.len() != m1.len() {
        return Err(CircuitError::WidthMismatch(format!(
            "branch messages have {} and {} bits",
            m0.len(),
            m1.len()
        )));
    }
    if i == 0 || i > input_width {
        return Err(CircuitError::IndexOutOfRange {
            index: i,
            width: input_width,
        });
    }
    let mut c = CircuitBuilder::new(input_width);
    let sel: Vec<usize> = (1..=input_width).map(|k| c.constant(k == i)).collect();
    let cb = c.constant(b);
    let c0: Vec<usize> = m0.iter().map(|bit| c.constant(bit)).collect();
    let c1: Vec<usize> = m1.iter().map(|bit| c.constant(bit)).collect();
    let picked: Vec<usize> = (0..input_width).map(|k| c.and(k, sel[k])).collect();
    let s = picked.into_iter().fold(cb, |acc, w| c.xor(acc, w));
    let outs = c0
        .iter()
        .zip(&c1)
        .map(|(&z, &o)| {
            let d = c.xor(z, o);
            let t = c.and(s, d);
            c.xor(t, z)
        })
        .collect();
    c.finish(outs)
}

/// Constant circuit outputting `m`, padded to the mux skeleton.
pub fn build_const_circuit(m: &BitString, input_width: usize) -> Result<BoolCircuit, CircuitError> {
    if input_width == 0 {
        return Err(CircuitError::IndexOutOfRange { index: 1, width: 0 });
    }
    build_mux_circuit(false, m, m, 1, input_width)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> BitString {
        BitString::parse_binary(s).unwrap()
    }

    #[test]
    fn xor_gate_truth_table() {
        let c: BoolCircuit = "inputs 2 outputs 1\nw2 = XOR w0 w1\nout w2\n".parse().unwrap();
        assert_eq!(c.eval(&bits("11")).unwrap(), bits("0"));
        assert_eq!(c.eval(&bits("10")).unwrap(), bits("1"));
        assert!(matches!(c.eval(&bits("1")), Err(CircuitError::InputWidth { .. })));
    }

    #[test]
    fn rejects_malformed_circuits() {
        let fwd = BoolCircuit::new(1, vec![Gate { op: GateOp::Not, inputs: vec![1] }], vec![1]);
        assert!(matches!(fwd, Err(CircuitError::ForwardReference { .. })));
        let arity = BoolCircuit::new(2, vec![Gate { op: GateOp::And, inputs: vec![0] }], vec![2]);
        assert!(matches!(arity, Err(CircuitError::Arity { .. })));
        assert!(matches!(
            BoolCircuit::new(1, vec![], vec![3]),
            Err(CircuitError::MissingOutputWire(3))
        ));
        assert!("inputs 1 outputs 1\nw2 = NOT w0\nout w2".parse::<BoolCircuit>().is_err());
        assert!("inputs 1 outputs 2\nw1 = NOT w0\nout w1".parse::<BoolCircuit>().is_err());
    }

    #[test]
    fn text_format_round_trip() {
        let c = build_mux_circuit(true, &bits("01"), &bits("10"), 2, 3).unwrap();
        let back: BoolCircuit = c.to_string().parse().unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn const_circuit_outputs_m() {
        let m = bits("101");
        let c = build_const_circuit(&m, 4).unwrap();
        assert_eq!(c.output_width(), 3);
        for x in 0..16 {
            assert_eq!(c.eval(&BitString::from_u64(x, 4)).unwrap(), m);
        }
    }

    #[test]
    fn mux_selects_by_bit() {
        let (m0, m1) = (bits("0011"), bits("0101"));
        for b in [false, true] {
            for i in 1..=4 {
                let c = build_mux_circuit(b, &m0, &m1, i, 4).unwrap();
                for x in 0..16u64 {
                    let x = BitString::from_u64(x, 4);
                    let want = if b ^ x.get(i - 1) { &m1 } else { &m0 };
                    assert_eq!(&c.eval(&x).unwrap(), want);
                }
            }
        }
        assert!(matches!(
            build_mux_circuit(false, &m0, &m1, 5, 4),
            Err(CircuitError::IndexOutOfRange { .. })
        ));
        assert!(build_mux_circuit(false, &m0, &bits("1"), 1, 4).is_err());
    }

    #[test]
    fn const_and_mux_share_a_shape() {
        let m = bits("1100110011001100");
        let a = build_const_circuit(&m, 8).unwrap().shape();
        let b = build_mux_circuit(true, &bits("0000000011111111"), &m, 5, 8)
            .unwrap()
            .shape();
        assert_eq!(a, b);
        assert_eq!(a.gate_count(), 3 * 8 + 1 + 5 * 16);
    }
}
