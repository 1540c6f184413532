use std::collections::VecDeque;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use wcka::exec::Execution;
use wcka::gen::{GenConfig, TermGenerator};
use wcka::io::{automaton_from_json, automaton_to_json};
use wcka::observation::{observe, trace_leq, Observation};
use wcka::ops;
use wcka::probability::{
    check_prob_simulation, epsilon_traced, greatest_p_simulation, lift_check, p_leq, prob_leq, restrict_to_epsilon,
    Distribution, ProbRelation,
};
use wcka::rational::ratio;
use wcka::simulation::{equiv, leq};
use wcka::{laws, Alphabet, Automaton, StateId};

fn alphabet() -> Arc<Alphabet> {
    Arc::new(
        Alphabet::from_config("external a, b, c; internal tau; prob flip: 1/2 h, 1/2 t; sync {a, b};").unwrap(),
    )
}

fn samples(seed: u64, n: usize) -> Vec<Automaton> {
    let al = alphabet();
    let mut config = GenConfig::for_alphabet(&al);
    config.max_depth = 3;
    config.state_cap = 16;
    let mut gen = TermGenerator::new(al, config, seed);
    (0..n).map(|_| gen.sample().unwrap().1).collect()
}

fn p_samples(seed: u64, n: usize) -> Vec<Automaton> {
    let al = Arc::new(Alphabet::from_config("external a, b; prob flip: 1/3 h, 2/3 t; sync {a, b};").unwrap());
    let mut config = GenConfig::p_automata(&al);
    config.state_cap = 20;
    let mut gen = TermGenerator::new(al, config, seed);
    (0..n).map(|_| gen.sample().unwrap().1).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn operators_preserve_well_formedness(seed in any::<u64>()) {
        let v = samples(seed, 2);
        let (x, y) = (&v[0], &v[1]);
        let frame = x.alphabet().frame().clone();
        for out in [
            ops::plus(x, y).unwrap(),
            ops::seq(x, y).unwrap(),
            ops::star(x),
            ops::par(x, y, &frame).unwrap(),
        ] {
            prop_assert!(out.validate().is_ok());
        }
    }

    #[test]
    fn par_is_symmetric(seed in any::<u64>()) {
        let v = samples(seed, 2);
        let frame = v[0].alphabet().frame().clone();
        let xy = ops::par(&v[0], &v[1], &frame).unwrap();
        let yx = ops::par(&v[1], &v[0], &frame).unwrap();
        prop_assert!(equiv(&xy, &yx).unwrap());
    }

    #[test]
    fn json_round_trip(seed in any::<u64>()) {
        let p = &samples(seed, 1)[0];
        let text = automaton_to_json(p);
        let back = automaton_from_json(&text).unwrap();
        prop_assert_eq!(automaton_to_json(&back), text);
        prop_assert!(ops::isomorphic(p, &back));
    }

    #[test]
    fn leq_is_a_preorder(seed in any::<u64>()) {
        let v = samples(seed, 3);
        let x = &v[0];
        let xy = ops::plus(x, &v[1]).unwrap();
        let xyz = ops::plus(&xy, &v[2]).unwrap();
        prop_assert!(leq(x, x).unwrap());
        prop_assert!(leq(x, &xy).unwrap());
        prop_assert!(leq(&xy, &xyz).unwrap());
        prop_assert!(leq(x, &xyz).unwrap());
        // Transitivity on arbitrary triples.
        let (p, q, r) = (&v[0], &v[1], &v[2]);
        if leq(p, q).unwrap() && leq(q, r).unwrap() {
            prop_assert!(leq(p, r).unwrap());
        }
    }

    #[test]
    fn operators_are_monotone(seed in any::<u64>()) {
        let v = samples(seed, 3);
        let (x, z) = (&v[0], &v[2]);
        let y = ops::plus(x, &v[1]).unwrap();
        let frame = x.alphabet().frame().clone();
        prop_assert!(leq(&ops::seq(x, z).unwrap(), &ops::seq(&y, z).unwrap()).unwrap());
        prop_assert!(leq(&ops::seq(z, x).unwrap(), &ops::seq(z, &y).unwrap()).unwrap());
        prop_assert!(leq(&ops::plus(z, x).unwrap(), &ops::plus(z, &y).unwrap()).unwrap());
        prop_assert!(leq(&ops::star(x), &ops::star(&y)).unwrap());
        prop_assert!(leq(&ops::par(x, z, &frame).unwrap(), &ops::par(&y, z, &frame).unwrap()).unwrap());
    }

    #[test]
    fn simulation_implies_trace_inclusion(seed in any::<u64>()) {
        let v = samples(seed, 2);
        for (p, q) in [(&v[0], &v[1]), (&v[1], &v[0])] {
            if leq(p, q).unwrap() {
                prop_assert!(trace_leq(p, q).unwrap());
            }
        }
        let sum = ops::plus(&v[0], &v[1]).unwrap();
        prop_assert!(trace_leq(&v[0], &sum).unwrap());
    }

    #[test]
    fn observation_is_monotone_and_homomorphic(seed in any::<u64>()) {
        let v = samples(seed, 2);
        let (x, y) = (&v[0], &v[1]);
        let (ox, oy) = (observe(x), observe(y));
        prop_assert_eq!(observe(&ops::plus(x, y).unwrap()), ox.or(oy));
        prop_assert_eq!(observe(&ops::seq(x, y).unwrap()), ox.then(oy));
        prop_assert_eq!(observe(&ops::star(x)), Observation::One);
        if leq(x, y).unwrap() {
            prop_assert!(ox <= oy);
        }
    }

    #[test]
    fn p_simulation_restricts_to_probabilistic_simulation(seed in any::<u64>()) {
        let v = p_samples(seed, 2);
        let p = &v[0];
        let q = ops::plus(p, &v[1]).unwrap();
        prop_assert!(p_leq(p, &q).unwrap());
        let rel = greatest_p_simulation(p, &q).unwrap().unwrap();
        let (ep, eq) = (epsilon_traced(p).unwrap(), epsilon_traced(&q).unwrap());
        let restricted = restrict_to_epsilon(&rel, &ep, &eq);
        prop_assert!(check_prob_simulation(&ep.automaton, &eq.automaton, &restricted, 2));
        prop_assert!(prob_leq(&ep.automaton, &eq.automaton, 2).unwrap());
    }
}

fn distribution(weights: &[u8], offset: usize) -> Option<Distribution> {
    let total: i64 = weights.iter().map(|&w| w as i64).sum();
    if total == 0 {
        return None;
    }
    Distribution::new(
        weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0)
            .map(|(i, &w)| (StateId::from_index(i + offset), ratio(w as i64, total))),
    )
    .ok()
}

/// Edmonds–Karp over exact rationals. Node 0 is the source, 1 the sink.
fn max_flow(cap: &mut [Vec<BigRational>]) -> BigRational {
    let n = cap.len();
    let mut total = BigRational::zero();
    loop {
        let mut prev = vec![usize::MAX; n];
        prev[0] = 0;
        let mut queue = VecDeque::from([0]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if prev[v] == usize::MAX && cap[u][v].is_positive() {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if prev[1] == usize::MAX {
            return total;
        }
        let mut push = None::<BigRational>;
        let mut v = 1;
        while v != 0 {
            let u = prev[v];
            push = Some(match push {
                Some(p) if p < cap[u][v] => p,
                _ => cap[u][v].clone(),
            });
            v = u;
        }
        let push = push.unwrap();
        let mut v = 1;
        while v != 0 {
            let u = prev[v];
            cap[u][v] -= &push;
            cap[v][u] += &push;
            v = u;
        }
        total += push;
    }
}

/// Lifting of a relation to point distributions, as a transport problem.
fn lift_by_flow(edges: &[(usize, usize)], phi: &Distribution, psi: &Distribution, n: usize) -> bool {
    // Nodes: 0 source, 1 sink, 2.. left states, 2+n.. right states.
    let size = 2 + 2 * n;
    let mut cap = vec![vec![BigRational::zero(); size]; size];
    for (x, w) in phi.iter() {
        cap[0][2 + x.index()] = w.clone();
    }
    for (y, w) in psi.iter() {
        cap[2 + n + y.index()][1] = w.clone();
    }
    for &(x, y) in edges {
        cap[2 + x][2 + n + y] = ratio(2, 1);
    }
    max_flow(&mut cap) == ratio(1, 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn lifting_agrees_with_max_flow(
        phi in prop::collection::vec(0u8..4, 4),
        psi in prop::collection::vec(0u8..4, 4),
        edges in prop::collection::vec((0usize..4, 0usize..4), 0..10),
    ) {
        let (Some(phi), Some(psi)) = (distribution(&phi, 0), distribution(&psi, 0)) else {
            return Ok(());
        };
        let rel: ProbRelation = edges
            .iter()
            .map(|&(x, y)| (StateId::from_index(x), Distribution::point(StateId::from_index(y))))
            .collect();
        prop_assert_eq!(lift_check(&rel, &phi, &psi), lift_by_flow(&edges, &phi, &psi, 4));
    }
}

#[test]
fn law_suite_is_deterministic() {
    let al = laws::suite_alphabet();
    let a = laws::run_suite(&al, 11, 12, Execution::Parallel).unwrap();
    let b = laws::run_suite(&al, 11, 12, Execution::Sequential).unwrap();
    let c = laws::run_suite(&al, 12, 12, Execution::Sequential).unwrap();
    let ja = serde_json::to_string(&a).unwrap();
    assert_eq!(ja, serde_json::to_string(&b).unwrap());
    assert_ne!(ja, serde_json::to_string(&c).unwrap());
}
