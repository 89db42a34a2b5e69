mod common;

use keylease::circuits::{build_mux_circuit, garble, garble_with_kappa, gc_eval, sim_gc, BoolCircuit, Label};
use keylease::BitString;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn labels_for(pairs: &[keylease::circuits::WireLabelPair], x: &BitString) -> Vec<Label> {
    x.iter().enumerate().map(|(i, b)| pairs[i].get(b).clone()).collect()
}

#[test]
fn corpus_circuits_match_their_oracles_on_every_input() {
    let mut rng = ChaCha20Rng::seed_from_u64(100);
    let corpus = common::load_corpus();
    assert!(corpus.len() >= 8);
    for (name, c) in corpus {
        let l = c.input_width();
        assert!(l <= 8, "{name} has {l} inputs");
        let (pairs, gc) = garble(&c, &mut rng);
        for v in 0..1u64 << l {
            let x = BitString::from_u64(v, l);
            let want = common::oracle(&name, &x);
            assert_eq!(c.eval(&x).unwrap(), want, "{name} plain eval on {x:?}");
            assert_eq!(gc_eval(&gc, &labels_for(&pairs, &x)).unwrap(), want, "{name} garbled on {x:?}");
        }
    }
}

#[test]
fn corpus_text_round_trips() {
    for (name, c) in common::load_corpus() {
        let again: BoolCircuit = c.to_string().parse().unwrap();
        assert_eq!(again, c, "{name}");
    }
}

#[test]
fn every_label_width_evaluates() {
    let mut rng = ChaCha20Rng::seed_from_u64(101);
    let (_, c) = common::load_corpus().into_iter().find(|(n, _)| n == "adder4").unwrap();
    for kappa in [8, 16, 32] {
        let (pairs, gc) = garble_with_kappa(&c, kappa, &mut rng).unwrap();
        assert_eq!(gc.label_bytes(), kappa);
        let x = BitString::parse_binary("10110111").unwrap();
        assert_eq!(gc_eval(&gc, &labels_for(&pairs, &x)).unwrap(), common::oracle("adder4", &x));
    }
    assert!(garble_with_kappa(&c, 7, &mut rng).is_err());
    assert!(garble_with_kappa(&c, 33, &mut rng).is_err());
}

#[test]
fn simulated_garbling_has_the_real_shape_and_output() {
    let mut rng = ChaCha20Rng::seed_from_u64(102);
    for (name, c) in common::load_corpus() {
        let x = BitString::random(c.input_width(), &mut rng);
        let y = c.eval(&x).unwrap();
        let (labels, sim) = sim_gc(&c.shape(), &y, &mut rng).unwrap();
        assert_eq!(sim.shape(), &c.shape(), "{name}");
        assert_eq!(gc_eval(&sim, &labels).unwrap(), y, "{name}");
    }
}

#[test]
fn wrong_label_is_detected_or_misdecodes() {
    let mut rng = ChaCha20Rng::seed_from_u64(103);
    let c = build_mux_circuit(true, &BitString::zeros(8), &BitString::ones(8), 2, 4).unwrap();
    let (pairs, gc) = garble(&c, &mut rng);
    let x = BitString::parse_binary("0100").unwrap();
    let mut labels = labels_for(&pairs, &x);
    assert_eq!(gc_eval(&gc, &labels).unwrap(), BitString::zeros(8));
    labels[1] = Label::random(labels[1].len(), &mut rng);
    assert!(gc_eval(&gc, &labels).is_err());
}
