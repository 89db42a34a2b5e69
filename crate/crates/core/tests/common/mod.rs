#![allow(dead_code)]

use std::path::PathBuf;

use keylease::circuits::{BoolCircuit, CircuitBuilder};
use keylease::BitString;
use rand::Rng;

/// The corpus lives with the core crate; the path is resolved from the crates
/// directory so sibling crates can include this module too.
pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/corpus")
}

/// Every `.circ` file in the corpus, sorted by name.
pub fn load_corpus() -> Vec<(String, BoolCircuit)> {
    let mut entries: Vec<_> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "circ"))
        .collect();
    entries.sort();
    entries
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            let text = std::fs::read_to_string(&p).unwrap();
            let c = text.parse().unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, c)
        })
        .collect()
}

fn num(bits: &[bool]) -> u32 {
    bits.iter().fold(0, |acc, &b| (acc << 1) | u32::from(b))
}

/// Independent truth function for each corpus circuit.
pub fn oracle(name: &str, x: &BitString) -> BitString {
    let v: Vec<bool> = x.iter().collect();
    let out: Vec<bool> = match name {
        "and_or" => vec![v[0] & v[1], v[0] | v[1]],
        "full_adder" => {
            let s = v.iter().filter(|&&b| b).count();
            vec![s % 2 == 1, s >= 2]
        }
        "parity4" => vec![v.iter().filter(|&&b| b).count() % 2 == 1],
        "majority3" => vec![v.iter().filter(|&&b| b).count() >= 2],
        "mux2" => vec![if v[0] { v[2] } else { v[1] }],
        "adder4" => {
            let s = num(&v[..4]) + num(&v[4..]);
            (0..5).rev().map(|k| (s >> k) & 1 == 1).collect()
        }
        "eq4" => vec![v[..4] == v[4..]],
        "consts" => vec![false, true, !v[0], v[0]],
        "inner_product3" => {
            let p = (v[0] & v[1]) ^ (v[2] & v[3]) ^ (v[4] & v[5]);
            vec![p, !p]
        }
        other => panic!("no oracle for corpus circuit {other}"),
    };
    BitString::from_bools(out)
}

/// A random circuit over `inputs` wires with `gates` gates and up to four
/// outputs drawn from any wire.
pub fn random_circuit<R: Rng>(inputs: usize, gates: usize, rng: &mut R) -> BoolCircuit {
    let mut c = CircuitBuilder::new(inputs);
    let mut wires = inputs;
    for _ in 0..gates {
        let a = rng.gen_range(0..wires);
        let b = rng.gen_range(0..wires);
        match rng.gen_range(0..5) {
            0 => c.and(a, b),
            1 => c.xor(a, b),
            2 => c.not(a),
            3 => c.constant(rng.gen()),
            _ => c.and(b, a),
        };
        wires += 1;
    }
    let k = rng.gen_range(1..=4);
    let outs = (0..k).map(|_| rng.gen_range(0..wires)).collect();
    c.finish(outs).unwrap()
}
