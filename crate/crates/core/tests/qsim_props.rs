use std::collections::BTreeMap;

use keylease::qsim::{Ket, Register, RegisterLayout};
use keylease::BitString;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

const TOL: f64 = 1e-9;

fn layout(wa: usize, wb: usize) -> RegisterLayout {
    RegisterLayout::new(vec![Register::new("a", wa), Register::new("b", wb)]).unwrap()
}

/// A random normalized state on registers `a` and `b`.
fn arb_ket() -> impl Strategy<Value = Ket> {
    (1usize..=3, 1usize..=3).prop_flat_map(|(wa, wb)| {
        let space = 1u64 << (wa + wb);
        prop::collection::btree_map(0..space, (-1.0f64..1.0, -1.0f64..1.0), 1..=6).prop_filter_map(
            "amplitudes vanish",
            move |m| {
                let terms = m
                    .into_iter()
                    .map(|(v, (re, im))| {
                        let label = vec![BitString::from_u64(v >> wb, wa), BitString::from_u64(v & ((1 << wb) - 1), wb)];
                        (label, Complex64::new(re, im))
                    })
                    .collect();
                Ket::superpose(layout(wa, wb), terms).ok()
            },
        )
    })
}

/// A random state on the same layout as `k`.
fn sibling(k: &Ket, seed: u64) -> Ket {
    use rand::Rng;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let regs = k.layout().registers();
    let mut terms = BTreeMap::new();
    for _ in 0..4 {
        let label: Vec<BitString> = regs.iter().map(|r| BitString::random(r.width, &mut rng)).collect();
        terms.insert(label, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    }
    terms.insert(k.terms().next().unwrap().0.clone(), Complex64::new(0.3, 0.1));
    Ket::superpose(k.layout().clone(), terms.into_iter().collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn constructed_states_are_normalized(k in arb_ket()) {
        prop_assert!((k.norm_sqr() - 1.0).abs() < TOL);
    }

    #[test]
    fn classical_maps_preserve_the_norm(k in arb_ket(), mask in any::<u64>()) {
        let wb = k.layout().registers()[1].width;
        let out = k
            .apply_classical(&["a", "b"], Register::new("f", wb), |v| {
                Ok::<_, std::convert::Infallible>(BitString::from_u64((v[0].to_u64() ^ mask) & ((1 << wb) - 1), wb))
            })
            .unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < TOL);
        prop_assert_eq!(out.num_terms(), k.num_terms());
        prop_assert!((out.discard_register("f").is_ok()) == out.register_distribution("f").unwrap().len().eq(&1));
    }

    #[test]
    fn measurement_collapses_and_renormalizes(k in arb_ket(), seed in any::<u64>()) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let dist = k.register_distribution("a").unwrap();
        prop_assert!((dist.values().sum::<f64>() - 1.0).abs() < TOL);
        let (v, post) = k.measure_register("a", &mut rng).unwrap();
        prop_assert!(dist[&v] > 0.0);
        prop_assert!((post.norm_sqr() - 1.0).abs() < TOL);
        let again = post.register_distribution("a").unwrap();
        prop_assert_eq!(again.len(), 1);
        prop_assert!((again[&v] - 1.0).abs() < TOL);
    }

    #[test]
    fn projection_is_idempotent(k in arb_ket(), seed in any::<u64>()) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let t = sibling(&k, seed);
        let (accepted, post) = k.project(&t, &mut rng).unwrap();
        prop_assert!((post.norm_sqr() - 1.0).abs() < TOL);
        let p_again = post.projection_analysis(&t).unwrap().accept_probability;
        if accepted {
            prop_assert!((p_again - 1.0).abs() < TOL);
        } else {
            prop_assert!(p_again < TOL);
        }
    }

    #[test]
    fn post_states_are_orthogonal(k in arb_ket(), seed in any::<u64>()) {
        let t = sibling(&k, seed);
        let a = k.projection_analysis(&t).unwrap();
        prop_assert!((0.0..=1.0).contains(&a.accept_probability));
        prop_assert!((a.accept_probability - k.fidelity(&t).unwrap()).abs() < TOL);
        if let (Some(acc), Some(rej)) = (&a.accepted_state, &a.rejected_state) {
            prop_assert!(acc.fidelity(rej).unwrap() < TOL);
            prop_assert!((rej.norm_sqr() - 1.0).abs() < TOL);
        }
    }

    #[test]
    fn tensor_is_normalized_and_factorizes(k in arb_ket(), seed in any::<u64>()) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let other = Ket::basis(
            RegisterLayout::new(vec![Register::new("c", 2)]).unwrap(),
            vec![BitString::random(2, &mut rng)],
        ).unwrap();
        let joint = k.tensor(&other).unwrap();
        prop_assert!((joint.norm_sqr() - 1.0).abs() < TOL);
        prop_assert_eq!(joint.num_terms(), k.num_terms());
        let back = joint.discard_register("c").unwrap();
        prop_assert!((back.fidelity(&k).unwrap() - 1.0).abs() < TOL);
    }

    #[test]
    fn json_round_trip_is_exact(k in arb_ket()) {
        let text = serde_json::to_string(&k).unwrap();
        let back: Ket = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, k);
    }
}

#[test]
fn measurement_frequencies_pass_chi_square() {
    let probs: [f64; 3] = [0.5, 0.3, 0.2];
    let l = RegisterLayout::new(vec![Register::new("r", 2)]).unwrap();
    let k = Ket::superpose(
        l,
        probs
            .iter()
            .enumerate()
            .map(|(v, p)| (vec![BitString::from_u64(v as u64, 2)], Complex64::new(p.sqrt(), 0.0)))
            .collect(),
    )
    .unwrap();
    let n = 20_000;
    let mut rng = ChaCha20Rng::seed_from_u64(400);
    let mut counts = [0u64; 3];
    for _ in 0..n {
        let (v, _) = k.measure_register("r", &mut rng).unwrap();
        counts[v.to_u64() as usize] += 1;
    }
    let stat: f64 = counts
        .iter()
        .zip(probs)
        .map(|(&c, p)| {
            let e = p * n as f64;
            (c as f64 - e).powi(2) / e
        })
        .sum();
    let critical = ChiSquared::new(2.0).unwrap().inverse_cdf(0.999);
    assert!((critical - 13.8155).abs() < 1e-3);
    assert!(stat < critical, "chi-square {stat} >= {critical} for counts {counts:?}");
}

#[test]
fn projection_onto_a_branch_of_a_uniform_pair_is_half() {
    let l = RegisterLayout::new(vec![Register::new("b", 1), Register::new("k", 3)]).unwrap();
    let one = Complex64::new(1.0, 0.0);
    let t = Ket::superpose(
        l.clone(),
        vec![
            (vec![BitString::zeros(1), BitString::from_u64(5, 3)], one),
            (vec![BitString::ones(1), BitString::from_u64(2, 3)], one),
        ],
    )
    .unwrap();
    let collapsed = Ket::basis(l, vec![BitString::ones(1), BitString::from_u64(2, 3)]).unwrap();
    let a = collapsed.projection_analysis(&t).unwrap();
    assert!((a.accept_probability - 0.5).abs() < 1e-15);
}
