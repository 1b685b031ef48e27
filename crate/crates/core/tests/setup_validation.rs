mod common;

use common::load;
use equiform::config::{build_setup, bundled, parse_config, Literal};
use equiform::error::Error;
use std::collections::BTreeMap;

#[test]
fn su3_constants_satisfy_every_check() {
    let (_, m) = load("su3_tcp2");
    let s = &m.setup;
    assert_eq!(s.dimension(), 8);
    assert_eq!(s.horizontal(), vec![2, 3, 4, 5]);
    assert_eq!(s.gauge(), vec![1, 6, 7, 8]);
    assert!(s.warnings().is_empty(), "{:?}", s.warnings());
    for a in 0..s.gauge_count() {
        assert_eq!(s.ad_t(a), s.rho(a));
    }
}

#[test]
fn every_single_constant_perturbation_is_rejected() {
    let doc = parse_config(bundled("su3_tcp2").unwrap()).unwrap();
    let n = doc.lie_algebra.constants.len();
    assert_eq!(n, 27);
    for idx in 0..n {
        for delta in ["1", "-1/2"] {
            let mut d = doc.clone();
            let (_, _, v) = &d.lie_algebra.constants[idx];
            let bumped = format!("({}) + {delta}", v.value().unwrap());
            d.lie_algebra.constants[idx].2 = Literal::Text(bumped);
            let r = build_setup(&d, &BTreeMap::new());
            assert!(r.is_err(), "perturbing constant {idx} by {delta} was accepted");
        }
    }
}

#[test]
fn dropping_a_constant_breaks_jacobi_or_representation() {
    let doc = parse_config(bundled("su3_tcp2").unwrap()).unwrap();
    for idx in 0..doc.lie_algebra.constants.len() {
        let mut d = doc.clone();
        d.lie_algebra.constants.remove(idx);
        assert!(build_setup(&d, &BTreeMap::new()).is_err(), "constant {idx}");
    }
}

#[test]
fn splitting_must_partition() {
    let text = bundled("su2_ts2").unwrap().replace("horizontal = [1, 2]", "horizontal = [1, 2, 3]");
    let doc = parse_config(&text).unwrap();
    assert!(build_setup(&doc, &BTreeMap::new()).is_err());
}

#[test]
fn representation_must_be_a_homomorphism() {
    let text = bundled("su3_tcp2").unwrap().replace(
        "[[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]",
        "[[0, -2, 0, 0], [2, 0, 0, 0], [0, 0, 0, -2], [0, 0, 2, 0]]",
    );
    let doc = parse_config(&text).unwrap();
    match build_setup(&doc, &BTreeMap::new()) {
        Err(Error::NotHomomorphism(_)) | Err(Error::SetupInvalid(_)) => {}
        other => panic!("{other:?}"),
    }
}

#[test]
fn config_errors_carry_positions() {
    let text = "[ring]\nfiber_vars = [\"a1\"]\n[lie_algebra]\ndimension = \"three\"\n";
    match parse_config(text) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
        other => panic!("{other:?}"),
    }
}
