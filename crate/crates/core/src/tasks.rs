//! Task execution: turns configuration tasks into report records.

use std::collections::BTreeMap;

use crate::config::{ConfigDocument, Literal, Model, Restriction, TaskDecl, TaskKind};
use crate::dictionary::{Dictionary, DictionaryOptions, ExpressOptions};
use crate::error::{Error, Result};
use crate::expr::FormContext;
use crate::forms::Form;
use crate::number::Number;
use crate::report::{
    CellRecord, DRow, DictionaryRecord, DimTableRecord, ExpressRecord, GeneratorRecord, ReportDocument,
    SetupSummary, TaskReport, TaskResult, VerifyItem, SCHEMA,
};
use crate::ring::{Point, Scalar};
use crate::setup::{HomogeneousSetup, IndexConvention};

/// Command-line values that take precedence over the task's own settings.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub max_length: Option<usize>,
    pub max_degree: Option<usize>,
    pub laurent_bounds: Option<(i32, i32)>,
}

pub fn summary(setup: &HomogeneousSetup) -> SetupSummary {
    SetupSummary {
        dimension: setup.dimension(),
        horizontal: setup.horizontal(),
        gauge: setup.gauge(),
        fiber_dim: setup.fiber_dim(),
        convention: match setup.convention() {
            IndexConvention::Row => "row".into(),
            IndexConvention::Column => "column".into(),
        },
        warnings: setup.warnings().to_vec(),
    }
}

/// Run the given tasks in order and collect their reports.
pub fn run(config: &str, doc: &ConfigDocument, tasks: &[TaskDecl], overrides: &Overrides) -> Result<ReportDocument> {
    let model = Model::from_config(doc)?;
    let mut reports = Vec::new();
    for t in tasks {
        reports.push(run_task(doc, &model, t, overrides)?);
    }
    Ok(ReportDocument {
        schema: SCHEMA.into(),
        config: config.into(),
        setup: summary(&model.setup),
        pass: reports.iter().all(|r| r.pass),
        tasks: reports,
    })
}

fn literals(xs: &[Literal]) -> Result<Vec<Number>> {
    xs.iter().map(|x| x.value()).collect()
}

fn dictionary_options(task: &TaskDecl, ov: &Overrides) -> Result<DictionaryOptions> {
    Ok(DictionaryOptions {
        max_length: ov.max_length.or(task.max_length),
        generic_point: task.generic_point.as_deref().map(literals).transpose()?,
    })
}

fn express_options(task: &TaskDecl, ov: &Overrides) -> ExpressOptions {
    let mut o = ExpressOptions::default();
    if let Some(b) = ov.laurent_bounds.or(task.laurent_bounds) {
        o.laurent = b;
    }
    o.pairs = task.pairs;
    o
}

pub fn run_task(doc: &ConfigDocument, model: &Model, task: &TaskDecl, ov: &Overrides) -> Result<TaskReport> {
    if !task.substitute.is_empty() {
        let fixed = task
            .substitute
            .iter()
            .map(|(k, v)| Ok((k.clone(), v.value()?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        let sub = Model::with_fixed(doc, &fixed)?;
        let mut report = execute(&sub, task, ov)?;
        let vals: Vec<String> = fixed.iter().map(|(k, v)| format!("{k} = {v}")).collect();
        report.notes.insert(0, format!("with {}", vals.join(", ")));
        return Ok(report);
    }
    execute(model, task, ov)
}

fn execute(model: &Model, task: &TaskDecl, ov: &Overrides) -> Result<TaskReport> {
    let mut notes = Vec::new();
    let (pass, result) = match task.kind {
        TaskKind::Generate => generate(model, task, ov, &mut notes)?,
        TaskKind::DimTable => dim_table(model, task, &mut notes)?,
        TaskKind::DTable => d_table(model, task, ov, &mut notes)?,
        TaskKind::VerifyClosed => verify_closed(model, task)?,
        TaskKind::VerifyEquation => verify_equation(model, task)?,
        TaskKind::VerifyNonzero => verify_nonzero(model, task)?,
        TaskKind::Express => express(model, task, ov)?,
    };
    if let Some(r) = &task.restrict {
        notes.push(format!("restricted to {} = {}", r.function, r.value.value()?));
    }
    Ok(TaskReport {
        name: task.name.clone(),
        kind: task.kind.as_str().into(),
        pass,
        notes,
        result,
    })
}

fn dictionary_record(d: &Dictionary, cells: &crate::dictionary::CompletenessReport) -> DictionaryRecord {
    let counts = d.counts();
    DictionaryRecord {
        syllables: d.syllables().iter().map(|s| s.label()).collect(),
        generic_point: d.generic_point().iter().map(|x| x.to_string()).collect(),
        generators: d
            .generators()
            .iter()
            .enumerate()
            .map(|(i, g)| GeneratorRecord {
                label: d.label(i),
                p: g.bidegree.0,
                q: g.bidegree.1,
                phase: match g.phase {
                    crate::dictionary::Phase::Origin => "origin".into(),
                    crate::dictionary::Phase::Generic => "generic".into(),
                },
            })
            .collect(),
        positive: d.generators().iter().filter(|g| g.degree() > 0).count(),
        cells: cells
            .cells
            .iter()
            .map(|c| CellRecord {
                p: c.p,
                q: c.q,
                count: counts.get(&(c.p, c.q)).copied().unwrap_or(0),
                origin_span: c.origin_span,
                origin_target: c.origin_target,
                generic_span: c.generic_span,
                generic_target: c.generic_target,
                pass: c.pass,
            })
            .collect(),
        origin_total: cells.origin_total(),
        generic_total: cells.generic_total(),
        rejected: {
            let (a, b) = d.rejected();
            [a, b]
        },
    }
}

fn generate(model: &Model, task: &TaskDecl, ov: &Overrides, notes: &mut Vec<String>) -> Result<(bool, TaskResult)> {
    let d = Dictionary::generate(&model.setup, &model.alphabet, &dictionary_options(task, ov)?)?;
    let rep = d.completeness(&[])?;
    for c in rep.cells.iter().filter(|c| !c.pass) {
        notes.push(format!(
            "incomplete in bidegree ({},{}): origin {}/{}, generic {}/{}",
            c.p, c.q, c.origin_span, c.origin_target, c.generic_span, c.generic_target
        ));
    }
    Ok((rep.pass, TaskResult::Dictionary(dictionary_record(&d, &rep))))
}

fn dim_table(model: &Model, task: &TaskDecl, notes: &mut Vec<String>) -> Result<(bool, TaskResult)> {
    let s = &model.setup;
    let nt = s.horizontal().len();
    let k = s.fiber_dim();
    let v = match &task.generic_point {
        Some(p) => literals(p)?,
        None => s.generic_fiber_point(),
    };
    if v.len() != k {
        return Err(Error::PointRejected(format!("generic point needs {k} coordinates")));
    }
    let zero = vec![Number::zero(); k];
    let stab0 = s.stabilizer_of(&zero);
    let stabv = s.stabilizer_of(&v);
    let full = |stab: &[Vec<Number>]| -> Result<Vec<Vec<usize>>> {
        (0..=nt)
            .map(|p| (0..=k).map(|q| s.invariant_dimension((p, q), stab, &[])).collect())
            .collect()
    };
    let f0 = full(&stab0)?;
    let fv = full(&stabv)?;
    let mut pass = true;
    let (rows, cols, origin, generic) = match &task.classes {
        None => (
            (0..=nt).map(|p| p.to_string()).collect(),
            (0..=k).map(|q| q.to_string()).collect(),
            f0,
            fv,
        ),
        Some(classes) => {
            let label = |c: &Vec<usize>| c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
            let mut grouped = |t: &Vec<Vec<usize>>, which: &str, notes: &mut Vec<String>| -> Vec<Vec<usize>> {
                let mut ok = true;
                let out = classes
                    .iter()
                    .map(|rc| {
                        classes
                            .iter()
                            .map(|cc| {
                                let vals: Vec<usize> = rc
                                    .iter()
                                    .flat_map(|&p| cc.iter().map(move |&q| (p, q)))
                                    .filter(|&(p, q)| p <= nt && q <= k)
                                    .map(|(p, q)| t[p][q])
                                    .collect();
                                if vals.windows(2).any(|w| w[0] != w[1]) {
                                    ok = false;
                                    notes.push(format!(
                                        "{which}: class ({}) x ({}) is not constant: {vals:?}",
                                        label(rc),
                                        label(cc)
                                    ));
                                }
                                vals.first().copied().unwrap_or(0)
                            })
                            .collect()
                    })
                    .collect();
                if !ok {
                    pass = false;
                }
                out
            };
            let o = grouped(&f0, "origin", notes);
            let g = grouped(&fv, "generic point", notes);
            let labels: Vec<String> = classes.iter().map(label).collect();
            (labels.clone(), labels, o, g)
        }
    };
    Ok((
        pass,
        TaskResult::DimTable(DimTableRecord {
            stabilizer_dims: [stab0.len(), stabv.len()],
            generic_point: v.iter().map(|x| x.to_string()).collect(),
            row_labels: rows,
            col_labels: cols,
            origin,
            generic,
        }),
    ))
}

fn d_table(model: &Model, task: &TaskDecl, ov: &Overrides, notes: &mut Vec<String>) -> Result<(bool, TaskResult)> {
    let s = &model.setup;
    let d = Dictionary::generate(s, &model.alphabet, &dictionary_options(task, ov)?)?;
    let rep = d.completeness(&[])?;
    let mut pass = rep.pass;
    if !rep.pass {
        notes.push("dictionary is incomplete".into());
    }
    let max_degree = ov.max_degree.or(task.max_degree).unwrap_or(3);
    for (i, g) in d.generators().iter().enumerate() {
        if g.degree() == 0 || g.degree() > max_degree {
            continue;
        }
        let x = s.exterior_derivative(&d.translate(i))?;
        if !s.is_invariant(&x) || !s.is_basic(&x) {
            pass = false;
            notes.push(format!("d({}) is not an invariant basic form", d.label(i)));
        }
    }
    let rows = d.differential_table(max_degree, &express_options(task, ov))?;
    let residual: Vec<&str> = rows.iter().filter(|r| r.image.residual).map(|r| r.source.as_str()).collect();
    if !residual.is_empty() {
        pass = false;
        notes.push(Error::Residual(residual.iter().map(|x| x.to_string()).collect()).to_string());
    }
    notes.push("word order follows the syllable order; reordering a word changes its sign by the Koszul rule".into());
    Ok((
        pass,
        TaskResult::DTable {
            rows: rows
                .iter()
                .map(|r| DRow {
                    source: r.source.clone(),
                    degree: r.degree,
                    image: r.image.to_string(),
                    residual: r.image.residual,
                })
                .collect(),
        },
    ))
}

/// Whether the pullback of `x` to the level set `f = c` vanishes: the
/// coefficients of `x ∧ df` must all be divisible by `f - c`.
pub fn vanishes_on_level_set(setup: &HomogeneousSetup, x: &Form<Scalar>, f: &Scalar, c: &Number) -> Result<bool> {
    if x.is_zero() {
        return Ok(true);
    }
    let ring = setup.ring();
    let g = f.sub(&Scalar::constant(ring, c.clone()));
    if g.den_exps().iter().any(|&e| e > 0) {
        return Err(Error::Unsupported("level sets of non-polynomial functions".into()));
    }
    let df = setup.d_scalar(f);
    if df.is_zero() {
        return Err(Error::Unsupported("level set of a constant function".into()));
    }
    let y = x.wedge(&df)?;
    let ok = y
        .terms()
        .all(|(_, s)| s.numerator().exact_div(g.numerator(), ring.laurent_flags()).is_some());
    Ok(ok)
}

struct Verifier<'a> {
    cx: FormContext<'a>,
    restrict: Option<(Scalar, Number)>,
}

impl<'a> Verifier<'a> {
    fn new(model: &'a Model, restrict: &Option<Restriction>) -> Result<Verifier<'a>> {
        let cx = model.context()?;
        let restrict = match restrict {
            None => None,
            Some(r) => {
                let f = cx.eval_str(&r.function)?;
                let s = match f.terms().next() {
                    None => Scalar::zero(model.setup.ring()),
                    Some((0, c)) if f.len() == 1 => c.clone(),
                    _ => return Err(Error::Config(format!("restriction `{}` is not a function", r.function))),
                };
                Some((s, r.value.value()?))
            }
        };
        Ok(Verifier { cx, restrict })
    }

    fn vanishes(&self, x: &Form<Scalar>) -> Result<bool> {
        match &self.restrict {
            None => Ok(x.is_zero()),
            Some((f, c)) => vanishes_on_level_set(self.cx.setup, x, f, c),
        }
    }
}

fn shorten(s: String) -> String {
    const MAX: usize = 400;
    if s.len() <= MAX {
        return s;
    }
    let mut cut = MAX;
    while !s.is_char_boundary(cut) {
        cut -= 1;
    }
    format!("{} ...", &s[..cut])
}

fn verify_closed(model: &Model, task: &TaskDecl) -> Result<(bool, TaskResult)> {
    let v = Verifier::new(model, &task.restrict)?;
    if task.forms.is_empty() {
        return Err(Error::Config(format!("task `{}` lists no forms", task.name)));
    }
    let mut items = Vec::new();
    for f in &task.forms {
        let x = v.cx.eval_str(f)?;
        let dx = model.setup.exterior_derivative(&x)?;
        let pass = v.vanishes(&dx)?;
        items.push(VerifyItem {
            expr: f.clone(),
            pass,
            detail: if pass { "closed".into() } else { shorten(format!("d = {dx}")) },
        });
    }
    Ok((items.iter().all(|i| i.pass), TaskResult::Verify { items }))
}

fn required<'t>(task: &'t TaskDecl, field: &str, v: &'t Option<String>) -> Result<&'t str> {
    v.as_deref()
        .ok_or_else(|| Error::Config(format!("task `{}` needs `{field}`", task.name)))
}

fn verify_equation(model: &Model, task: &TaskDecl) -> Result<(bool, TaskResult)> {
    let v = Verifier::new(model, &task.restrict)?;
    let lhs = required(task, "lhs", &task.lhs)?;
    let rhs = required(task, "rhs", &task.rhs)?;
    let diff = v.cx.eval_str(lhs)?.sub(&v.cx.eval_str(rhs)?);
    let pass = v.vanishes(&diff)?;
    let item = VerifyItem {
        expr: format!("{lhs} = {rhs}"),
        pass,
        detail: if pass { "holds".into() } else { shorten(format!("difference {diff}")) },
    };
    Ok((pass, TaskResult::Verify { items: vec![item] }))
}

fn verify_nonzero(model: &Model, task: &TaskDecl) -> Result<(bool, TaskResult)> {
    let v = Verifier::new(model, &task.restrict)?;
    let text = required(task, "expr", &task.expr)?;
    let at = task
        .at
        .as_ref()
        .ok_or_else(|| Error::Config(format!("task `{}` needs `at`", task.name)))?;
    let mut x = v.cx.eval_str(text)?;
    if let Some((f, _)) = &v.restrict {
        x = x.wedge(&model.setup.d_scalar(f))?;
    }
    let ring = model.setup.ring();
    let pt = Point::new(ring, literals(&at.fiber)?, model.param_values(&at.params)?)?;
    if let Some((f, c)) = &v.restrict {
        if &f.evaluate(&pt)? != c {
            return Err(Error::PointRejected("evaluation point is not on the level set".into()));
        }
    }
    let val = x.evaluate(&pt)?;
    let pass = !val.is_zero();
    let item = VerifyItem {
        expr: text.into(),
        pass,
        detail: shorten(format!("value {val}")),
    };
    Ok((pass, TaskResult::Verify { items: vec![item] }))
}

fn express(model: &Model, task: &TaskDecl, ov: &Overrides) -> Result<(bool, TaskResult)> {
    let text = required(task, "expr", &task.expr)?;
    let cx = model.context()?;
    let target = cx.eval_str(text)?;
    let d = Dictionary::generate(&model.setup, &model.alphabet, &dictionary_options(task, ov)?)?;
    let c = d.express(&target, &express_options(task, ov))?;
    Ok((
        !c.residual,
        TaskResult::Express(ExpressRecord {
            expr: text.into(),
            result: c.to_string(),
            residual: c.residual,
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{bundled, parse_config};

    fn su2() -> (ConfigDocument, Model) {
        let doc = parse_config(bundled("su2_ts2").unwrap()).unwrap();
        let m = Model::from_config(&doc).unwrap();
        (doc, m)
    }

    #[test]
    fn level_set_restriction() {
        let (_, m) = su2();
        let cx = m.context().unwrap();
        let aa = cx.eval_str("aa").unwrap();
        let f = aa.terms().next().unwrap().1.clone();
        let one = Number::one();
        // (aa - 1) dot(a,b) vanishes on the unit circle bundle, dot(a,b) does not
        let x = cx.eval_str("(aa - 1)*dot(beta,b)").unwrap();
        assert!(vanishes_on_level_set(&m.setup, &x, &f, &one).unwrap());
        let y = cx.eval_str("dot(beta,b)").unwrap();
        assert!(!vanishes_on_level_set(&m.setup, &y, &f, &one).unwrap());
        // d(aa) itself restricts to zero
        let z = cx.eval_str("d(aa)").unwrap();
        assert!(vanishes_on_level_set(&m.setup, &z, &f, &one).unwrap());
    }

    #[test]
    fn su2_tasks_pass() {
        let (doc, _) = su2();
        let r = run("su2_ts2", &doc, &doc.tasks, &Overrides::default()).unwrap();
        for t in &r.tasks {
            assert!(t.pass, "{}: {}", t.name, r.to_text());
        }
    }
}
