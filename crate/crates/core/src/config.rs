//! TOML configuration documents and the model built from them.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use crate::dictionary::Alphabet;
use crate::error::{Error, Result};
use crate::expr::{eval_poly, parse, parse_number, FormContext};
use crate::forms::Form;
use crate::letters::{Contraction, Letter};
use crate::number::Number;
use crate::poly::{Exps, Poly};
use crate::ring::{RadicalDecl, Ring, RingSpec, Scalar};
use crate::setup::{HomogeneousSetup, Mat, SetupInput, StructureConstant};

const BUNDLED: &[(&str, &str)] = &[
    ("su3_tcp2", include_str!("../configs/su3_tcp2.toml")),
    ("su2_ts2", include_str!("../configs/su2_ts2.toml")),
];

/// Names of the configurations shipped with the crate.
pub fn bundled_names() -> Vec<&'static str> {
    BUNDLED.iter().map(|(n, _)| *n).collect()
}

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// A numeric literal: an integer or an expression string such as `"-sqrt(3)/2"`.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Literal {
    Int(i64),
    Text(String),
}

impl Literal {
    pub fn value(&self) -> Result<Number> {
        match self {
            Literal::Int(n) => Ok(Number::from_int(*n)),
            Literal::Text(t) => parse_number(t),
        }
    }

    fn index(&self) -> Option<usize> {
        match self {
            Literal::Int(n) if *n > 0 => Some(*n as usize),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub ring: RingSection,
    pub lie_algebra: LieAlgebraSection,
    pub splitting: SplittingSection,
    #[serde(default)]
    pub representation: RepresentationSection,
    #[serde(default)]
    pub letters: Vec<LetterDecl>,
    #[serde(default)]
    pub contractions: Vec<ContractionDecl>,
    #[serde(default)]
    pub definitions: Vec<Definition>,
    #[serde(default)]
    pub tasks: Vec<TaskDecl>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingSection {
    #[serde(default)]
    pub sqrt_constants: Vec<u64>,
    #[serde(default)]
    pub fiber_vars: Option<Vec<String>>,
    #[serde(default)]
    pub params: Vec<String>,
    #[serde(default)]
    pub radicals: Vec<RadicalSection>,
    #[serde(default)]
    pub laurent_bound: Option<u16>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadicalSection {
    pub name: String,
    pub relation: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieAlgebraSection {
    pub dimension: usize,
    /// `[i, "jk", value]` meaning `de^i` contains `value * e^{jk}`.
    pub constants: Vec<(usize, String, Literal)>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplittingSection {
    pub horizontal: Vec<usize>,
    pub gauge: Vec<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationSection {
    /// One matrix per gauge element, as a list of rows.
    #[serde(default)]
    pub matrices: Vec<Vec<Vec<Literal>>>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum LetterKind {
    A,
    B,
    Horizontal,
    Bilinear,
    Components,
    CovariantDerivative,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LetterDecl {
    pub name: String,
    pub kind: LetterKind,
    #[serde(default)]
    pub components: Option<Vec<String>>,
    /// Bilinear map as `matrix[j][i] = ψ(v_j, v_i)`.
    #[serde(default)]
    pub matrix: Option<Vec<Vec<String>>>,
    /// Bilinear map `ψ(v_j, v_i) = L_j ∧ L_i` for a previously declared letter.
    #[serde(default)]
    pub wedge: Option<String>,
    #[serde(default)]
    pub of: Option<String>,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ContractionKind {
    Dot,
    Det,
    #[default]
    Tensor,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractionDecl {
    pub name: String,
    #[serde(default)]
    pub kind: ContractionKind,
    /// Entries `[i_1, ..., i_r, value]` with 1-based indices.
    #[serde(default)]
    pub entries: Vec<Vec<Literal>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Definition {
    pub name: String,
    pub expr: String,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Generate,
    DimTable,
    DTable,
    VerifyClosed,
    VerifyEquation,
    VerifyNonzero,
    Express,
}

impl TaskKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TaskKind::Generate => "generate",
            TaskKind::DimTable => "dim_table",
            TaskKind::DTable => "d_table",
            TaskKind::VerifyClosed => "verify_closed",
            TaskKind::VerifyEquation => "verify_equation",
            TaskKind::VerifyNonzero => "verify_nonzero",
            TaskKind::Express => "express",
        }
    }
}

/// Restrict a verification to the level set `function = value`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Restriction {
    pub function: String,
    pub value: Literal,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointDecl {
    pub fiber: Vec<Literal>,
    #[serde(default)]
    pub params: BTreeMap<String, Literal>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskDecl {
    pub name: String,
    pub kind: TaskKind,
    #[serde(default)]
    pub max_length: Option<usize>,
    #[serde(default)]
    pub max_degree: Option<usize>,
    #[serde(default)]
    pub laurent_bounds: Option<(i32, i32)>,
    #[serde(default)]
    pub pairs: bool,
    #[serde(default)]
    pub generic_point: Option<Vec<Literal>>,
    /// Row/column classes for grouping a dimension table.
    #[serde(default)]
    pub classes: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    pub forms: Vec<String>,
    #[serde(default)]
    pub lhs: Option<String>,
    #[serde(default)]
    pub rhs: Option<String>,
    #[serde(default)]
    pub expr: Option<String>,
    #[serde(default)]
    pub restrict: Option<Restriction>,
    /// Parameter values substituted before verifying.
    #[serde(default)]
    pub substitute: BTreeMap<String, Literal>,
    #[serde(default)]
    pub at: Option<PointDecl>,
}

impl TaskDecl {
    pub fn new(name: &str, kind: TaskKind) -> TaskDecl {
        TaskDecl {
            name: name.into(),
            kind,
            max_length: None,
            max_degree: None,
            laurent_bounds: None,
            pairs: false,
            generic_point: None,
            classes: None,
            forms: Vec::new(),
            lhs: None,
            rhs: None,
            expr: None,
            restrict: None,
            substitute: BTreeMap::new(),
            at: None,
        }
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |p| before.len() - p - 1) + 1;
    (line, col)
}

pub fn parse_config(text: &str) -> Result<ConfigDocument> {
    toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| line_col(text, s.start));
        Error::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })
}

/// Read a configuration from a path, or by bundled name if no such file exists.
pub fn load(path_or_name: &str) -> Result<(String, ConfigDocument)> {
    let p = Path::new(path_or_name);
    let (name, text) = if p.exists() {
        let text = std::fs::read_to_string(p).map_err(|e| Error::Config(format!("{path_or_name}: {e}")))?;
        let name = p.file_stem().and_then(|s| s.to_str()).unwrap_or(path_or_name).to_string();
        (name, text)
    } else if let Some(t) = bundled(path_or_name) {
        (path_or_name.to_string(), t.to_string())
    } else {
        return Err(Error::Config(format!(
            "no such file `{path_or_name}` and no bundled config of that name (bundled: {})",
            bundled_names().join(", ")
        )));
    };
    Ok((name, parse_config(&text)?))
}

fn ctx(section: &str, e: Error) -> Error {
    match e {
        Error::Config(m) => Error::Config(format!("{section}: {m}")),
        other => Error::Config(format!("{section}: {other}")),
    }
}

fn parse_pair(jk: &str, n: usize) -> Option<(usize, usize)> {
    let parts: Vec<&str> = if jk.contains(',') {
        jk.split(',').map(|s| s.trim()).collect()
    } else if n < 10 && jk.len() == 2 {
        vec![&jk[..1], &jk[1..]]
    } else {
        return None;
    };
    match parts.as_slice() {
        [j, k] => Some((j.parse().ok()?, k.parse().ok()?)),
        _ => None,
    }
}

/// A validated setup with its alphabet and named definitions.
pub struct Model {
    pub setup: HomogeneousSetup,
    pub alphabet: Alphabet,
    pub definitions: Vec<Definition>,
    /// Parameters replaced by constants.
    pub fixed: BTreeMap<String, Number>,
}

impl std::fmt::Debug for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Model").field("setup", &self.setup).finish()
    }
}

fn fix_params(p: &Poly, nfib: usize, fixed: &[Option<Number>]) -> Result<Poly> {
    let mut out = Poly::zero();
    for (e, c) in p.iter() {
        let mut c = c.clone();
        let mut ne: Exps = e[..nfib].iter().copied().collect();
        for (k, v) in fixed.iter().enumerate() {
            let x = e[nfib + k];
            match v {
                Some(v) if x > 0 => c = c.mul(&v.pow(x as u32)),
                Some(v) if x < 0 => c = c.mul(&v.inv().ok_or(Error::DenominatorVanishes)?.pow((-x) as u32)),
                Some(_) => {}
                None => ne.push(x),
            }
        }
        out.add_term(ne, c);
    }
    Ok(out)
}

/// Ring of a configuration; parameters named in `fixed` are replaced by
/// their values and dropped.
pub fn build_ring(doc: &ConfigDocument, fixed: &BTreeMap<String, Number>) -> Result<Arc<Ring>> {
    let k = doc
        .representation
        .matrices
        .first()
        .map(|m| m.len())
        .or_else(|| doc.ring.fiber_vars.as_ref().map(|v| v.len()))
        .unwrap_or(0);
    let fiber_vars = doc
        .ring
        .fiber_vars
        .clone()
        .unwrap_or_else(|| (1..=k).map(|i| format!("a{i}")).collect());
    for name in fixed.keys() {
        if !doc.ring.params.contains(name) {
            return Err(Error::UnknownName(name.clone()));
        }
    }
    let mut vars = fiber_vars.clone();
    vars.extend(doc.ring.params.iter().cloned());
    let values: Vec<Option<Number>> = doc.ring.params.iter().map(|p| fixed.get(p).cloned()).collect();
    let radicals = doc
        .ring
        .radicals
        .iter()
        .map(|r| {
            let rel = parse(&r.relation)
                .and_then(|e| eval_poly(&e, &vars, fiber_vars.len()))
                .and_then(|p| fix_params(&p, fiber_vars.len(), &values));
            rel.map(|relation| RadicalDecl {
                name: r.name.clone(),
                relation,
            })
            .map_err(|e| ctx(&format!("ring.radicals.{}", r.name), e))
        })
        .collect::<Result<Vec<_>>>()?;
    let ring = Ring::new(RingSpec {
        sqrt_constants: doc.ring.sqrt_constants.clone(),
        fiber_vars,
        params: doc.ring.params.iter().filter(|p| !fixed.contains_key(*p)).cloned().collect(),
        radicals,
    })?;
    Ok(match doc.ring.laurent_bound {
        Some(b) => ring.with_laurent_bound(b),
        None => ring,
    })
}

pub fn build_setup(doc: &ConfigDocument, fixed: &BTreeMap<String, Number>) -> Result<HomogeneousSetup> {
    let ring = build_ring(doc, fixed)?;
    let n = doc.lie_algebra.dimension;
    let constants = doc
        .lie_algebra
        .constants
        .iter()
        .enumerate()
        .map(|(idx, (i, jk, v))| {
            let (j, k) = parse_pair(jk, n).ok_or_else(|| {
                Error::Config(format!("lie_algebra.constants[{idx}]: cannot read index pair `{jk}`"))
            })?;
            let value = v.value().map_err(|e| ctx(&format!("lie_algebra.constants[{idx}]"), e))?;
            Ok(StructureConstant { i: *i, j, k, value })
        })
        .collect::<Result<Vec<_>>>()?;
    let representation: Vec<Mat> = doc
        .representation
        .matrices
        .iter()
        .enumerate()
        .map(|(mi, m)| {
            m.iter()
                .map(|row| row.iter().map(|x| x.value()).collect::<Result<Vec<_>>>())
                .collect::<Result<Mat>>()
                .map_err(|e| ctx(&format!("representation.matrices[{mi}]"), e))
        })
        .collect::<Result<_>>()?;
    HomogeneousSetup::validate(SetupInput {
        ring,
        dimension: n,
        constants,
        horizontal: doc.splitting.horizontal.clone(),
        gauge: doc.splitting.gauge.clone(),
        representation,
    })
}

impl Model {
    pub fn from_config(doc: &ConfigDocument) -> Result<Model> {
        Model::with_fixed(doc, &BTreeMap::new())
    }

    pub fn with_fixed(doc: &ConfigDocument, fixed: &BTreeMap<String, Number>) -> Result<Model> {
        let setup = build_setup(doc, fixed)?;
        let mut alphabet = Alphabet::default();
        let k = setup.fiber_dim();
        for c in &doc.contractions {
            let con = match c.kind {
                ContractionKind::Dot => Contraction::dot(k).renamed(&c.name),
                ContractionKind::Det => Contraction::det(k).renamed(&c.name),
                ContractionKind::Tensor => {
                    let sec = format!("contractions.{}", c.name);
                    let arity = c
                        .entries
                        .first()
                        .map(|e| e.len().saturating_sub(1))
                        .ok_or_else(|| Error::Config(format!("{sec}: no entries")))?;
                    let mut entries = BTreeMap::new();
                    for e in &c.entries {
                        if e.len() != arity + 1 {
                            return Err(Error::Config(format!("{sec}: entries have different lengths")));
                        }
                        let idx = e[..arity]
                            .iter()
                            .map(|x| x.index().map(|i| i - 1))
                            .collect::<Option<Vec<_>>>()
                            .ok_or_else(|| Error::Config(format!("{sec}: indices must be positive integers")))?;
                        entries.insert(idx, e[arity].value().map_err(|er| ctx(&sec, er))?);
                    }
                    Contraction::new(&c.name, k, arity, entries)?
                }
            };
            con.check_invariant(&setup)?;
            alphabet.contractions.push(con);
        }
        for l in &doc.letters {
            let letter = build_letter(&setup, &alphabet, l)?;
            alphabet.letters.push(letter);
        }
        Ok(Model {
            setup,
            alphabet,
            definitions: doc.definitions.clone(),
            fixed: fixed.clone(),
        })
    }

    /// Expression context with every definition evaluated in order.
    pub fn context(&self) -> Result<FormContext<'_>> {
        let mut cx = FormContext::new(&self.setup, &self.alphabet);
        let ring = self.setup.ring();
        for (name, v) in &self.fixed {
            cx.definitions
                .insert(name.clone(), self.setup.scalar_form(Scalar::constant(ring, v.clone())));
        }
        for d in &self.definitions {
            cx.define(&d.name, &d.expr).map_err(|e| ctx(&format!("definitions.{}", d.name), e))?;
        }
        Ok(cx)
    }

    /// Parameter assignment from a name → literal map, in ring order.
    pub fn param_values(&self, values: &BTreeMap<String, Literal>) -> Result<Vec<Option<Number>>> {
        let ring = self.setup.ring();
        for name in values.keys() {
            if !ring.params().contains(name) {
                return Err(Error::UnknownName(name.clone()));
            }
        }
        ring.params()
            .iter()
            .map(|p| values.get(p).map(|v| v.value()).transpose())
            .collect()
    }
}

fn build_letter(setup: &HomogeneousSetup, alphabet: &Alphabet, l: &LetterDecl) -> Result<Letter> {
    let sec = format!("letters.{}", l.name);
    let k = setup.fiber_dim();
    let cx = FormContext::new(setup, alphabet);
    let eval_all = |xs: &[String]| -> Result<Vec<Form<Scalar>>> {
        xs.iter().map(|x| cx.eval_str(x).map_err(|e| ctx(&sec, e))).collect()
    };
    let need = |o: &Option<Vec<String>>| -> Result<Vec<String>> {
        o.clone().ok_or_else(|| Error::Config(format!("{sec}: `components` required")))
    };
    match l.kind {
        LetterKind::A => Ok(Letter::a(setup).renamed(&l.name)),
        LetterKind::B => Ok(Letter::b(setup).renamed(&l.name)),
        LetterKind::Horizontal => Letter::from_horizontal(setup, &l.name, eval_all(&need(&l.components)?)?),
        LetterKind::Components => Letter::new(setup, &l.name, eval_all(&need(&l.components)?)?),
        LetterKind::Bilinear => {
            let psi: Vec<Vec<Form<Scalar>>> = if let Some(base) = &l.wedge {
                let b = alphabet
                    .letter(base)
                    .ok_or_else(|| Error::Config(format!("{sec}: unknown letter `{base}`")))?;
                let c = b.components();
                (0..k)
                    .map(|j| (0..k).map(|i| c[j].wedge(&c[i])).collect::<Result<Vec<_>>>())
                    .collect::<Result<_>>()?
            } else if let Some(m) = &l.matrix {
                m.iter().map(|row| eval_all(row)).collect::<Result<_>>()?
            } else {
                return Err(Error::Config(format!("{sec}: bilinear letters need `wedge` or `matrix`")));
            };
            Letter::from_bilinear(setup, &l.name, &psi)
        }
        LetterKind::CovariantDerivative => {
            let base = l
                .of
                .as_ref()
                .ok_or_else(|| Error::Config(format!("{sec}: `of` required")))?;
            let b = alphabet
                .letter(base)
                .ok_or_else(|| Error::Config(format!("{sec}: unknown letter `{base}`")))?;
            b.covariant_derivative(setup, &l.name)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_configs_parse() {
        for name in bundled_names() {
            let doc = parse_config(bundled(name).unwrap()).unwrap();
            Model::from_config(&doc).unwrap();
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = bundled("su2_ts2").unwrap().replace("[splitting]", "[splitting]\ncolour = 3");
        match parse_config(&text) {
            Err(Error::Parse { line, message, .. }) => {
                assert!(line > 0);
                assert!(message.contains("colour"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pair_indices() {
        assert_eq!(parse_pair("23", 8), Some((2, 3)));
        assert_eq!(parse_pair("10,11", 12), Some((10, 11)));
        assert_eq!(parse_pair("101", 12), None);
    }
}
