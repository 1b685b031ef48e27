#![allow(dead_code)]

use equiform::config::{bundled, parse_config, ConfigDocument, Model};
use equiform::forms::Form;
use equiform::linalg::SparseVec;
use equiform::number::Number;
use equiform::forms::Word;

pub fn load(name: &str) -> (ConfigDocument, Model) {
    let doc = parse_config(bundled(name).expect("bundled config")).expect("parses");
    let model = Model::from_config(&doc).expect("valid model");
    (doc, model)
}

pub fn sparse(f: &Form<Number>) -> SparseVec<Word> {
    f.terms().map(|(w, c)| (w, c.clone())).collect()
}

/// Generators of invariant forms on TCP^2 by bidegree (horizontal, vertical),
/// transcribed into the expression language.
pub const GENERATORS: &[((usize, usize), &[&str])] = &[
    ((0, 1), &["dot(a,b)", "sigma(a,b)"]),
    ((1, 0), &["dot(a,beta)", "sigma(a,beta)"]),
    ((0, 2), &["sigma(b,b)", "dot(a,b)*sigma(a,b)"]),
    (
        (1, 1),
        &[
            "dot(b,beta)",
            "sigma(b,beta)",
            "dot(a,b)*dot(a,beta)",
            "dot(a,b)*sigma(a,beta)",
            "sigma(a,b)*dot(a,beta)",
            "sigma(a,b)*sigma(a,beta)",
        ],
    ),
    ((2, 0), &["sigma(beta,beta)", "sigma(a,eps)"]),
    ((0, 3), &["dot(a,b)*sigma(b,b)", "sigma(a,b)*sigma(b,b)"]),
    (
        (1, 2),
        &[
            "dot(a,b)*dot(b,beta)",
            "dot(a,b)*sigma(b,beta)",
            "sigma(a,b)*dot(b,beta)",
            "sigma(a,b)*sigma(b,beta)",
            "dot(a,beta)*sigma(b,b)",
            "sigma(a,beta)*sigma(b,b)",
            "dot(a,b)*sigma(a,b)*dot(a,beta)",
            "dot(a,b)*sigma(a,b)*sigma(a,beta)",
        ],
    ),
    (
        (2, 1),
        &[
            "dot(b,eps)",
            "sigma(b,eps)",
            "dot(a,b)*sigma(beta,beta)",
            "dot(a,b)*sigma(a,eps)",
            "sigma(a,b)*sigma(beta,beta)",
            "sigma(a,b)*sigma(a,eps)",
            "sigma(a,beta)*dot(b,beta)",
            "sigma(a,beta)*sigma(b,beta)",
        ],
    ),
    ((3, 0), &["dot(a,tbeta)", "sigma(a,tbeta)"]),
    ((0, 4), &["sigma(b,b)*sigma(b,b)"]),
    (
        (1, 3),
        &[
            "sigma(b,b)*dot(b,beta)",
            "sigma(b,b)*sigma(b,beta)",
            "dot(a,b)*sigma(a,b)*dot(b,beta)",
            "dot(a,b)*sigma(a,b)*sigma(b,beta)",
            "dot(a,b)*dot(a,beta)*sigma(b,b)",
            "dot(a,b)*sigma(a,beta)*sigma(b,b)",
        ],
    ),
    (
        (2, 2),
        &[
            "sigma(b,b)*sigma(beta,beta)",
            "dot(b,beta)*dot(b,beta)",
            "dot(b,beta)*sigma(b,beta)",
            "sigma(b,beta)*sigma(b,beta)",
            "dot(a,b)*dot(b,eps)",
            "dot(a,b)*sigma(b,eps)",
            "sigma(a,b)*dot(b,eps)",
            "sigma(a,b)*sigma(b,eps)",
            "sigma(a,eps)*sigma(b,b)",
            "dot(a,b)*sigma(a,b)*sigma(beta,beta)",
            "dot(a,b)*sigma(a,b)*sigma(a,eps)",
            "dot(a,b)*sigma(a,beta)*dot(b,beta)",
        ],
    ),
    (
        (3, 1),
        &[
            "dot(b,tbeta)",
            "sigma(b,tbeta)",
            "dot(a,b)*dot(a,tbeta)",
            "dot(a,b)*sigma(a,tbeta)",
            "sigma(a,b)*dot(a,tbeta)",
            "sigma(a,b)*sigma(a,tbeta)",
        ],
    ),
    ((4, 0), &["dot(beta,tbeta)"]),
    ((1, 4), &["dot(a,b)*sigma(b,b)*dot(b,beta)", "dot(a,b)*sigma(b,b)*sigma(b,beta)"]),
    (
        (2, 3),
        &[
            "sigma(b,b)*dot(b,eps)",
            "sigma(b,b)*sigma(b,eps)",
            "dot(a,b)*sigma(a,b)*dot(b,eps)",
            "dot(a,b)*sigma(a,b)*sigma(b,eps)",
            "dot(a,b)*sigma(b,b)*sigma(beta,beta)",
            "dot(a,b)*dot(b,beta)*dot(b,beta)",
            "dot(a,b)*dot(b,beta)*sigma(b,beta)",
            "sigma(a,b)*sigma(b,b)*sigma(beta,beta)",
        ],
    ),
    (
        (3, 2),
        &[
            "dot(b,beta)*dot(b,eps)",
            "dot(b,beta)*sigma(b,eps)",
            "sigma(b,beta)*sigma(b,eps)",
            "dot(a,b)*dot(b,tbeta)",
            "dot(a,b)*sigma(b,tbeta)",
            "dot(a,tbeta)*sigma(b,b)",
            "dot(a,b)*sigma(a,b)*dot(a,tbeta)",
            "dot(a,b)*sigma(a,b)*sigma(a,tbeta)",
        ],
    ),
    ((4, 1), &["dot(a,b)*dot(beta,tbeta)", "sigma(a,b)*dot(beta,tbeta)"]),
    ((2, 4), &["sigma(b,b)*sigma(b,b)*sigma(beta,beta)", "dot(a,b)*sigma(b,b)*dot(b,eps)"]),
    (
        (3, 3),
        &[
            "sigma(b,b)*dot(b,tbeta)",
            "sigma(b,b)*sigma(b,tbeta)",
            "dot(a,b)*dot(b,beta)*dot(b,eps)",
            "dot(a,b)*dot(b,beta)*sigma(b,eps)",
            "dot(a,b)*sigma(b,beta)*sigma(b,eps)",
            "sigma(a,b)*dot(b,beta)*dot(b,eps)",
        ],
    ),
    ((4, 2), &["sigma(b,b)*dot(beta,tbeta)", "dot(a,b)*sigma(a,b)*dot(beta,tbeta)"]),
    ((3, 4), &["sigma(b,b)*dot(b,beta)*dot(b,eps)", "dot(a,b)*sigma(b,b)*sigma(b,tbeta)"]),
    ((4, 3), &["dot(b,beta)*dot(b,beta)*dot(b,eps)", "dot(b,beta)*dot(b,beta)*sigma(b,eps)"]),
    ((4, 4), &["dot(beta,tbeta)*sigma(b,b)*sigma(b,b)"]),
];

/// The action of d on invariant forms of degree at most three on TCP^2,
/// as (form, differential) in the expression language.
pub const DIFFERENTIALS: &[(&str, &str)] = &[
    ("aa", "2*dot(a,b)"),
    ("dot(a,b)", "0"),
    ("sigma(a,b)", "-2*sigma(a,eps) + sigma(b,b) - aa*sigma(beta,beta)"),
    ("dot(a,beta)", "dot(b,beta)"),
    ("sigma(a,beta)", "sigma(b,beta)"),
    ("sigma(b,b)", "2*dot(a,b)*sigma(beta,beta) + 2*sigma(a,beta)*dot(b,beta) + 2*sigma(b,eps)"),
    ("dot(b,beta)", "0"),
    ("sigma(b,beta)", "0"),
    ("sigma(beta,beta)", "0"),
    ("sigma(a,eps)", "sigma(a,beta)*dot(b,beta) + sigma(b,eps)"),
    (
        "dot(a,b)*sigma(a,b)",
        "2*dot(a,b)*sigma(a,eps) - dot(a,b)*sigma(b,b) + aa*dot(a,b)*sigma(beta,beta)",
    ),
    ("dot(a,b)*dot(a,beta)", "-dot(a,b)*dot(b,beta)"),
    ("dot(a,b)*sigma(a,beta)", "-dot(a,b)*sigma(b,beta)"),
    (
        "sigma(a,b)*dot(a,beta)",
        "-sigma(a,b)*dot(b,beta) + dot(a,beta)*sigma(b,b) - 2*aa*sigma(a,tbeta)",
    ),
    (
        "sigma(a,b)*sigma(a,beta)",
        "-sigma(a,b)*sigma(b,beta) + sigma(a,beta)*sigma(b,b) + 2*aa*dot(a,tbeta)",
    ),
    ("dot(a,tbeta)", "dot(b,tbeta)"),
    ("sigma(a,tbeta)", "sigma(b,tbeta)"),
    ("dot(b,eps)", "-dot(b,beta)*dot(b,beta)"),
    ("sigma(b,eps)", "-dot(b,beta)*sigma(b,beta)"),
    (
        "dot(a,b)*sigma(b,b)",
        "-2*dot(a,b)*sigma(a,beta)*dot(b,beta) - 2*dot(a,b)*sigma(b,eps)",
    ),
    ("dot(a,b)*dot(b,beta)", "0"),
    ("dot(a,b)*sigma(b,beta)", "0"),
    ("dot(a,b)*sigma(beta,beta)", "0"),
    (
        "dot(a,b)*sigma(a,eps)",
        "-dot(a,b)*sigma(a,beta)*dot(b,beta) - dot(a,b)*sigma(b,eps)",
    ),
    (
        "sigma(a,b)*sigma(b,b)",
        "-3/2*aa*sigma(b,b)*sigma(beta,beta) - aa*dot(b,beta)*dot(b,beta) \
         + 3*dot(a,b)*sigma(a,b)*sigma(beta,beta) - 2*dot(a,b)*dot(b,eps) \
         - 2*sigma(a,b)*sigma(b,eps) - sigma(a,eps)*sigma(b,b) + sigma(b,b)*sigma(b,b)",
    ),
    (
        "sigma(a,b)*dot(b,beta)",
        "-4*aa*sigma(b,tbeta) + 2*dot(a,b)*sigma(a,tbeta) - 2*sigma(a,b)*dot(a,tbeta) + sigma(b,b)*dot(b,beta)",
    ),
    (
        "sigma(a,b)*sigma(b,beta)",
        "4*aa*dot(b,tbeta) - 2*dot(a,b)*dot(a,tbeta) - 2*sigma(a,b)*sigma(a,tbeta) + sigma(b,b)*sigma(b,beta)",
    ),
    (
        "sigma(a,b)*sigma(beta,beta)",
        "3*aa*dot(beta,tbeta) + sigma(b,b)*sigma(beta,beta)",
    ),
    (
        "sigma(a,b)*sigma(a,eps)",
        "-1/4*aa*sigma(b,b)*sigma(beta,beta) - 1/2*aa*dot(b,beta)*dot(b,beta) \
         + 1/2*dot(a,b)*sigma(a,b)*sigma(beta,beta) - dot(a,b)*dot(b,eps) \
         - sigma(a,b)*sigma(b,eps) + 3/2*sigma(a,eps)*sigma(b,b) + 1/2*aa^2*dot(beta,tbeta)",
    ),
    (
        "dot(a,beta)*sigma(b,b)",
        "-2*aa*sigma(b,tbeta) + 6*dot(a,b)*sigma(a,tbeta) - 2*sigma(a,b)*dot(a,tbeta) + sigma(b,b)*dot(b,beta)",
    ),
    (
        "sigma(a,beta)*sigma(b,b)",
        "2*aa*dot(b,tbeta) - 6*dot(a,b)*dot(a,tbeta) - 2*sigma(a,b)*sigma(a,tbeta) + sigma(b,b)*sigma(b,beta)",
    ),
    ("sigma(a,beta)*dot(b,beta)", "dot(b,beta)*sigma(b,beta)"),
    ("sigma(a,beta)*sigma(b,beta)", "sigma(b,beta)*sigma(b,beta)"),
    (
        "dot(a,b)*sigma(a,b)*dot(a,beta)",
        "2*aa*dot(a,b)*sigma(a,tbeta) + dot(a,b)*sigma(a,b)*dot(b,beta) - dot(a,b)*dot(a,beta)*sigma(b,b)",
    ),
    (
        "dot(a,b)*sigma(a,b)*sigma(a,beta)",
        "-2*aa*dot(a,b)*dot(a,tbeta) + dot(a,b)*sigma(a,b)*sigma(b,beta) - dot(a,b)*sigma(a,beta)*sigma(b,b)",
    ),
];
