mod common;

use std::collections::BTreeMap;

use common::load;
use equiform::config::parse_config;
use equiform::dictionary::{Dictionary, DictionaryOptions};
use equiform::ring::Point;
use equiform::tasks::{self, Overrides};
use proptest::prelude::*;

const LETTERS: [&str; 5] = ["a", "b", "beta", "eps", "tbeta"];

fn sign_of_permutation(perm: &[usize], degrees: &[usize]) -> bool {
    // sign of reordering graded factors: count inversions between odd factors
    let mut odd_swaps = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] && degrees[perm[i]] % 2 == 1 && degrees[perm[j]] % 2 == 1 {
                odd_swaps += 1;
            }
        }
    }
    odd_swaps % 2 == 1
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn d_squared_vanishes_on_words(word in prop::collection::vec(0usize..20, 1..4)) {
        let (_, m) = load("su3_tcp2");
        let d = Dictionary::generate(&m.setup, &m.alphabet, &DictionaryOptions { max_length: Some(1), ..Default::default() }).unwrap();
        let n = d.syllables().len();
        let w: Vec<usize> = word.iter().map(|&s| s % n).collect();
        let x = d.translate_word(&w);
        let dd = m.setup.d_extended(&m.setup.d_extended(&x));
        prop_assert!(dd.is_zero(), "d^2 of {} is {}", d.label_of(&w), dd);
    }

    #[test]
    fn reordering_a_word_only_changes_sign(
        word in prop::collection::vec(0usize..20, 2..4),
        perm_seed in any::<u64>(),
    ) {
        let (_, m) = load("su3_tcp2");
        let d = Dictionary::generate(&m.setup, &m.alphabet, &DictionaryOptions { max_length: Some(1), ..Default::default() }).unwrap();
        let n = d.syllables().len();
        let w: Vec<usize> = word.iter().map(|&s| s % n).collect();
        let mut perm: Vec<usize> = (0..w.len()).collect();
        let mut s = perm_seed;
        for i in (1..perm.len()).rev() {
            perm.swap(i, (s % (i as u64 + 1)) as usize);
            s /= i as u64 + 1;
        }
        let reordered: Vec<usize> = perm.iter().map(|&i| w[i]).collect();
        let degrees: Vec<usize> = w.iter().map(|&i| d.syllables()[i].degree()).collect();
        let x = d.translate_word(&w);
        let y = d.translate_word(&reordered);
        if sign_of_permutation(&perm, &degrees) {
            prop_assert_eq!(y, x.neg());
        } else {
            prop_assert_eq!(y, x);
        }
    }
}

#[test]
fn covariant_derivative_is_compatible_with_contractions() {
    let (_, m) = load("su3_tcp2");
    let s = &m.setup;
    for c in ["dot", "sigma"] {
        let c = m.alphabet.contraction(c).unwrap();
        for x in LETTERS {
            for y in LETTERS {
                let (lx, ly) = (m.alphabet.letter(x).unwrap(), m.alphabet.letter(y).unwrap());
                let (dx, dy) = (lx.covariant_derivative(s, "dx").unwrap(), ly.covariant_derivative(s, "dy").unwrap());
                let lhs = s.d_extended(&c.contract(s, &[lx, ly]).unwrap());
                let first = c.contract(s, &[&dx, ly]).unwrap();
                let second = c.contract(s, &[lx, &dy]).unwrap();
                let rhs = if lx.degree() % 2 == 0 { first.add(&second) } else { first.sub(&second) };
                assert_eq!(lhs, rhs, "{}({x},{y})", c.name());
            }
        }
    }
}

#[test]
fn sigma_of_a_and_eps_factors() {
    let (_, m) = load("su3_tcp2");
    let cx = m.context().unwrap();
    let lhs = cx.eval_str("sigma(a,eps)").unwrap();
    let rhs = cx.eval_str("dot(a,beta)*sigma(a,beta)").unwrap();
    assert_eq!(lhs, rhs);
}

#[test]
fn every_generator_is_needed() {
    let (_, m) = load("su3_tcp2");
    let s = &m.setup;
    let d = Dictionary::generate(s, &m.alphabet, &DictionaryOptions::default()).unwrap();
    let ring = s.ring();
    let points = [
        Point::origin(ring).unwrap(),
        Point::fiber_only(ring, d.generic_point().to_vec()).unwrap(),
    ];
    let full: Vec<BTreeMap<_, _>> = points.iter().map(|p| d.ranks(p, |_| true).unwrap()).collect();
    for g in 0..d.generators().len() {
        let bd = d.generators()[g].bidegree;
        let dropped = points.iter().zip(&full).any(|(p, f)| {
            let r = d.ranks(p, |i| i != g).unwrap();
            r.get(&bd).copied().unwrap_or(0) < f[&bd]
        });
        assert!(dropped, "{} is redundant", d.label(g));
    }
}

#[test]
fn removing_sigma_a_eps_breaks_completeness() {
    let (_, m) = load("su3_tcp2");
    let s = &m.setup;
    let d = Dictionary::generate(s, &m.alphabet, &DictionaryOptions::default()).unwrap();
    let syl = d.find_syllable("sigma", &["a", "eps"]).unwrap();
    let g = d.generators().iter().position(|g| g.word == [syl]).unwrap();
    let generic = Point::fiber_only(s.ring(), d.generic_point().to_vec()).unwrap();
    assert_eq!(d.ranks(&generic, |_| true).unwrap()[&(2, 0)], 2);
    assert_eq!(d.ranks(&generic, |i| i != g).unwrap()[&(2, 0)], 1);
}

#[test]
fn reports_are_deterministic() {
    let text = equiform::config::bundled("su2_ts2").unwrap();
    let run = || {
        let doc = parse_config(text).unwrap();
        tasks::run("su2_ts2", &doc, &doc.tasks, &Overrides::default()).unwrap().to_json()
    };
    assert_eq!(run(), run());
}
