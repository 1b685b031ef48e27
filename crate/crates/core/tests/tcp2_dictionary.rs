mod common;

use std::collections::BTreeMap;

use common::{load, sparse, GENERATORS, DIFFERENTIALS};
use equiform::dictionary::{Dictionary, DictionaryOptions, ExpressOptions};
use equiform::linalg::rank;
use equiform::ring::Point;

#[test]
fn generator_counts_per_bidegree() {
    let (_, m) = load("su3_tcp2");
    let d = Dictionary::generate(&m.setup, &m.alphabet, &DictionaryOptions::default()).unwrap();
    let mut counts = d.counts();
    counts.remove(&(0, 0));
    let expected: BTreeMap<(usize, usize), usize> = GENERATORS.iter().map(|(bd, xs)| (*bd, xs.len())).collect();
    assert_eq!(counts, expected);
    assert_eq!(counts.values().sum::<usize>(), 95);
}

#[test]
fn generator_spans_agree_at_both_points() {
    let (_, m) = load("su3_tcp2");
    let s = &m.setup;
    let d = Dictionary::generate(s, &m.alphabet, &DictionaryOptions::default()).unwrap();
    let cx = m.context().unwrap();
    let ring = s.ring();
    let points = [
        Point::origin(ring).unwrap(),
        Point::fiber_only(ring, d.generic_point().to_vec()).unwrap(),
    ];
    for ((p, q), entries) in GENERATORS {
        let listed: Vec<_> = entries.iter().map(|e| cx.eval_str(e).unwrap()).collect();
        for f in &listed {
            assert_eq!(f.bidegree_split().keys().copied().collect::<Vec<_>>(), vec![(*p, *q)]);
        }
        let ours: Vec<_> = (0..d.generators().len())
            .filter(|&i| d.generators()[i].bidegree == (*p, *q))
            .map(|i| d.translate(i))
            .collect();
        for pt in &points {
            let a: Vec<_> = listed.iter().map(|f| sparse(&f.evaluate(pt).unwrap())).collect();
            let b: Vec<_> = ours.iter().map(|f| sparse(&f.evaluate(pt).unwrap())).collect();
            let both: Vec<_> = a.iter().chain(&b).cloned().collect();
            let (ra, rb, rab) = (rank(&a), rank(&b), rank(&both));
            assert_eq!((ra, rb), (rab, rab), "bidegree ({p},{q}) at {:?}", pt.fiber());
        }
        // generic independence of the listed entries
        let generic: Vec<_> = listed.iter().map(|f| sparse(&f.evaluate(&points[1]).unwrap())).collect();
        assert_eq!(rank(&generic), entries.len(), "bidegree ({p},{q})");
    }
}

#[test]
fn differential_identities_hold_exactly() {
    let (_, m) = load("su3_tcp2");
    let cx = m.context().unwrap();
    let mut failures = Vec::new();
    for (lhs, rhs) in DIFFERENTIALS {
        let x = cx.eval_str(&format!("d({lhs})")).unwrap();
        let y = cx.eval_str(rhs).unwrap();
        if !x.sub(&y).is_zero() {
            failures.push(format!("d({lhs}) = {x}"));
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
    assert_eq!(DIFFERENTIALS.len(), 35);
}

#[test]
fn differential_table_matches_up_to_word_order() {
    let (_, m) = load("su3_tcp2");
    let s = &m.setup;
    let d = Dictionary::generate(s, &m.alphabet, &DictionaryOptions::default()).unwrap();
    let rows = d.differential_table(3, &ExpressOptions::default()).unwrap();
    assert_eq!(rows.len(), DIFFERENTIALS.len());
    assert!(rows.iter().all(|r| !r.image.residual));
    let cx = m.context().unwrap();
    let by_label: BTreeMap<String, usize> = (0..d.generators().len()).map(|i| (d.label(i), i)).collect();
    let mut matched = 0;
    for (lhs, rhs) in DIFFERENTIALS.iter().skip(1) {
        let target = cx.eval_str(lhs).unwrap();
        let rhs = cx.eval_str(rhs).unwrap();
        let row = rows
            .iter()
            .skip(1)
            .find(|r| {
                let g = d.translate(by_label[&r.source]);
                g == target || g.neg() == target
            })
            .unwrap_or_else(|| panic!("no generator matches {lhs}"));
        let g = d.translate(by_label[&row.source]);
        let sign_flip = g != target;
        let image = d.combination_form(&row.image).unwrap();
        let image = if sign_flip { image.neg() } else { image };
        assert!(image.sub(&rhs).is_zero(), "{lhs}: {}", row.image);
        matched += 1;
    }
    assert_eq!(matched, 34);
    assert_eq!(rows[0].source, "aa");
    assert_eq!(rows[0].image.to_string(), "2 dot(a,b)");
}

#[test]
fn pinned_rows_literal() {
    let (_, m) = load("su3_tcp2");
    let d = Dictionary::generate(&m.setup, &m.alphabet, &DictionaryOptions::default()).unwrap();
    let cx = m.context().unwrap();
    let o = ExpressOptions::default();
    let e = |x: &str| d.express(&cx.eval_str(x).unwrap(), &o).unwrap().to_string();
    assert_eq!(e("d(aa)"), "2 dot(a,b)");
    assert_eq!(e("d(sigma(a,b))"), "-2 sigma(a,eps) + sigma(b,b) - aa sigma(beta,beta)");
    assert_eq!(
        e("d(sigma(a,b)*sigma(beta,beta))"),
        "3*aa dot(beta,tbeta) + sigma(b,b) sigma(beta,beta)"
    );
    assert_eq!(e("d(dot(b,beta))"), "0");
}
