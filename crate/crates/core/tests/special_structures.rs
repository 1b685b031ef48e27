mod common;

use common::load;
use equiform::config::{bundled, parse_config, ConfigDocument, Model};
use equiform::dictionary::{Dictionary, DictionaryOptions};
use equiform::report::TaskReport;
use equiform::tasks::{run_task, Overrides};

fn task(doc: &ConfigDocument, m: &Model, name: &str) -> TaskReport {
    let t = doc.tasks.iter().find(|t| t.name == name).unwrap();
    run_task(doc, m, t, &Overrides::default()).unwrap()
}

fn patched(name: &str, from: &str, to: &str) -> (ConfigDocument, Model) {
    let text = bundled(name).unwrap();
    assert!(text.contains(from), "{from}");
    let doc = parse_config(&text.replacen(from, to, 1)).unwrap();
    let m = Model::from_config(&doc).unwrap();
    (doc, m)
}

#[test]
fn cone_forms_are_closed() {
    let (_, m) = load("su3_tcp2");
    let cx = m.context().unwrap();
    for w in ["omega1", "omega2", "omega3"] {
        assert!(cx.eval_str(&format!("d({w})")).unwrap().is_zero(), "{w}");
    }
}

#[test]
fn cone_forms_need_the_radial_weights() {
    let (_, m) = load("su3_tcp2");
    let cx = m.context().unwrap();
    let bad = "-1/2*dot(b,beta) - 1/2*aa^(-1/2)*dot(a,b)*dot(a,beta)";
    assert!(!cx.eval_str(&format!("d({bad})")).unwrap().is_zero());
}

#[test]
fn hypo_contact_family() {
    let (doc, m) = load("su3_tcp2");
    for name in ["contact", "hypo_closed", "contact_origin", "hypo_closed_origin", "nondegenerate"] {
        let r = task(&doc, &m, name);
        assert!(r.pass, "{name}: {r:?}");
    }
}

#[test]
fn contact_equation_only_holds_on_the_unit_sphere_bundle() {
    let (_, m) = load("su3_tcp2");
    let cx = m.context().unwrap();
    assert!(!cx.eval_str("d(alpha) + 2*F").unwrap().is_zero());
}

#[test]
fn perturbed_hypo_forms_fail() {
    let (doc, m) = patched("su3_tcp2", "4*(C^2 + 1)*(B^2 + C^2)", "4*(C^2 + 2)*(B^2 + C^2)");
    assert!(!task(&doc, &m, "hypo_closed").pass);
    let (doc, m) = patched("su3_tcp2", "- 1/2*B*dot(b,beta)", "+ 1/2*B*dot(b,beta)");
    assert!(!task(&doc, &m, "contact").pass);
    let (doc, m) = patched("su3_tcp2", "- 1/2*dot(b,eps)\"", "+ 1/2*dot(b,eps)\"");
    assert!(!task(&doc, &m, "hypo_closed_origin").pass);
}

#[test]
fn degenerate_forms_are_detected() {
    let (doc, m) = patched("su3_tcp2", "expr = \"alpha*F*F*F\"", "expr = \"alpha*F*F*F*dot(a,b)\"");
    assert!(!task(&doc, &m, "nondegenerate").pass);
}

#[test]
fn cotangent_sphere_dictionary() {
    let (_, m) = load("su2_ts2");
    let d = Dictionary::generate(&m.setup, &m.alphabet, &DictionaryOptions::default()).unwrap();
    let single: Vec<String> = (0..d.generators().len())
        .filter(|&i| d.generators()[i].len() == 1)
        .map(|i| d.label(i))
        .collect();
    assert_eq!(
        single,
        [
            "det(a,b)",
            "det(a,beta)",
            "dot(a,b)",
            "dot(a,beta)",
            "det(b,b)",
            "det(b,beta)",
            "det(beta,beta)",
            "dot(b,beta)"
        ]
    );
    let rep = d.completeness(&[]).unwrap();
    assert!(rep.pass);
    assert_eq!(rep.origin_total(), 6);
}

#[test]
fn cotangent_sphere_hyperkahler() {
    let (doc, m) = load("su2_ts2");
    assert!(task(&doc, &m, "hyperkahler").pass);
    assert!(task(&doc, &m, "hyperkahler_flat").pass);
    let (doc, m) = patched("su2_ts2", "(k + aa)^(-1/2)", "(k + aa)^(1/2)");
    assert!(!task(&doc, &m, "hyperkahler").pass);
}
