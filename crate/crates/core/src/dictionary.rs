//! The dictionary of invariant forms: formal words over syllables, reduced
//! to a minimal generating set by exact elimination at the origin and at a
//! generic point.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::Mutex;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{Form, Word};
use crate::letters::{Contraction, Letter, Symmetry};
use crate::linalg::{Echelon, SparseVec};
use crate::number::Number;
use crate::poly::Exps;
use crate::ring::{norm_squared_poly, Point, Scalar};
use crate::setup::HomogeneousSetup;

/// A formal contraction of letters, or an extra constant invariant form.
#[derive(Clone, Debug)]
pub struct Syllable {
    pub contraction: String,
    pub letters: Vec<String>,
    pub form: Form<Scalar>,
    pub bidegree: (usize, usize),
}

impl Syllable {
    pub fn degree(&self) -> usize {
        self.bidegree.0 + self.bidegree.1
    }

    pub fn label(&self) -> String {
        if self.letters.is_empty() {
            self.contraction.clone()
        } else {
            format!("{}({})", self.contraction, self.letters.join(","))
        }
    }

    fn key(&self) -> (usize, &str, &[String]) {
        (self.degree(), &self.contraction, &self.letters)
    }
}

/// Letters, contractions and optional extra syllables.
#[derive(Clone, Debug, Default)]
pub struct Alphabet {
    pub letters: Vec<Letter>,
    pub contractions: Vec<Contraction>,
    /// Named constant invariant forms added to the syllable set.
    pub extras: Vec<(String, Form<Scalar>)>,
}

impl Alphabet {
    pub fn letter(&self, name: &str) -> Option<&Letter> {
        self.letters.iter().find(|l| l.name() == name)
    }

    pub fn contraction(&self, name: &str) -> Option<&Contraction> {
        self.contractions.iter().find(|c| c.name() == name)
    }

    /// All nonzero syllables, sorted by (degree, contraction, letter names).
    /// Symmetric and antisymmetric contractions only use nondecreasing
    /// letter tuples, since permuting arguments changes at most the sign.
    pub fn syllables(&self, setup: &HomogeneousSetup) -> Result<Vec<Syllable>> {
        let mut letters: Vec<&Letter> = self.letters.iter().collect();
        letters.sort_by(|a, b| a.name().cmp(b.name()));
        let mut out = Vec::new();
        for c in &self.contractions {
            let r = c.arity();
            let sorted_only = c.symmetry() != Symmetry::None;
            let n = letters.len();
            if n == 0 {
                continue;
            }
            let mut idx = vec![0usize; r];
            loop {
                if !sorted_only || idx.windows(2).all(|w| w[0] <= w[1]) {
                    let ls: Vec<&Letter> = idx.iter().map(|&i| letters[i]).collect();
                    let form = c.contract(setup, &ls)?;
                    if !form.is_zero() {
                        let bidegree = ls.iter().fold((0, 0), |acc, l| {
                            (acc.0 + l.bidegree().0, acc.1 + l.bidegree().1)
                        });
                        out.push(Syllable {
                            contraction: c.name().to_string(),
                            letters: ls.iter().map(|l| l.name().to_string()).collect(),
                            form,
                            bidegree,
                        });
                    }
                }
                // odometer
                let mut pos = r;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < n {
                        break;
                    }
                    idx[pos] = 0;
                }
                if idx.iter().all(|&i| i == 0) {
                    break;
                }
            }
        }
        for (name, form) in &self.extras {
            if form.is_zero() {
                continue;
            }
            let bds: Vec<(usize, usize)> = form.bidegree_split().keys().copied().collect();
            if bds.len() != 1 {
                return Err(Error::InvalidLetter(name.clone(), "extra syllable must be bidegree-homogeneous".into()));
            }
            out.push(Syllable {
                contraction: name.clone(),
                letters: Vec::new(),
                form: form.clone(),
                bidegree: bds[0],
            });
        }
        out.sort_by(|a, b| a.key().cmp(&b.key()));
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Origin,
    Generic,
}

#[derive(Clone, Debug)]
pub struct Generator {
    /// Syllable indices, nondecreasing.
    pub word: Vec<usize>,
    pub phase: Phase,
    pub bidegree: (usize, usize),
}

impl Generator {
    pub fn degree(&self) -> usize {
        self.bidegree.0 + self.bidegree.1
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }
}

#[derive(Clone, Debug, Default)]
pub struct DictionaryOptions {
    /// Stop after words of this length.
    pub max_length: Option<usize>,
    /// Fiber coordinates of the generic point; defaults to the first basis
    /// vector.
    pub generic_point: Option<Vec<Number>>,
}

pub struct Dictionary<'a> {
    setup: &'a HomogeneousSetup,
    syllables: Vec<Syllable>,
    generators: Vec<Generator>,
    generic_point: Vec<Number>,
    rejected: [usize; 2],
    cache: Mutex<HashMap<Vec<usize>, Form<Scalar>>>,
}

impl fmt::Debug for Dictionary<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Dictionary")
            .field("syllables", &self.syllables.len())
            .field("generators", &self.generators.len())
            .finish()
    }
}

fn word_bidegree(syl: &[Syllable], w: &[usize]) -> (usize, usize) {
    w.iter().fold((0, 0), |acc, &s| {
        (acc.0 + syl[s].bidegree.0, acc.1 + syl[s].bidegree.1)
    })
}

/// Stabilizer dimensions at the origin, at the generic point and at a few
/// further points; errors unless the group acts transitively on spheres.
pub fn check_transitive_sphere(setup: &HomogeneousSetup, v: &[Number]) -> Result<(usize, usize)> {
    let k = setup.fiber_dim();
    let g = setup.gauge_count();
    let zero = vec![Number::zero(); k];
    let d0 = setup.stabilizer_of(&zero).len();
    if k == 0 {
        return Ok((d0, d0));
    }
    if v.iter().all(|x| x.is_zero()) {
        return Err(Error::TransitiveSphere("generic point is the origin".into()));
    }
    let dv = setup.stabilizer_of(v).len();
    if g - dv != k - 1 {
        return Err(Error::TransitiveSphere(format!(
            "orbit of the generic point has dimension {}, the sphere has dimension {}",
            g - dv,
            k - 1
        )));
    }
    let probes: Vec<Vec<Number>> = vec![
        (0..k).map(|i| Number::from_int(i as i64 + 1)).collect(),
        (0..k).map(|i| Number::from_int(if i % 2 == 0 { 1 } else { -2 })).collect(),
        (0..k).map(|i| Number::from_int(if i + 1 == k { 1 } else { 0 })).collect(),
    ];
    let mut dims: Vec<usize> = vec![d0, dv];
    for p in &probes {
        let d = setup.stabilizer_of(p).len();
        if !dims.contains(&d) {
            dims.push(d);
        }
    }
    if dims.len() > 2 {
        dims.sort();
        return Err(Error::TransitiveSphere(format!(
            "found stabilizer dimensions {dims:?}, expected two orbit types"
        )));
    }
    Ok((d0, dv))
}

fn evaluate_image(syl_images: &[Form<Number>], w: &[usize], frame: &std::sync::Arc<crate::forms::Frame>) -> Form<Number> {
    let mut acc = Form::monomial(frame, 0, Number::one());
    for &s in w {
        acc = acc.wedge_unchecked(&syl_images[s]);
        if acc.is_zero() {
            break;
        }
    }
    acc
}

fn to_sparse(f: &Form<Number>) -> SparseVec<Word> {
    f.terms().map(|(w, c)| (w, c.clone())).collect()
}

impl<'a> Dictionary<'a> {
    pub fn generate(
        setup: &'a HomogeneousSetup,
        alphabet: &Alphabet,
        options: &DictionaryOptions,
    ) -> Result<Dictionary<'a>> {
        let ring = setup.ring();
        let k = setup.fiber_dim();
        let v = options.generic_point.clone().unwrap_or_else(|| setup.generic_fiber_point());
        if v.len() != k {
            return Err(Error::PointRejected(format!("generic point needs {k} coordinates")));
        }
        check_transitive_sphere(setup, &v)?;
        for l in &alphabet.letters {
            if !l.components().iter().all(|c| c.terms().all(|(_, s)| s.params_used().is_empty())) {
                return Err(Error::InvalidLetter(
                    l.name().into(),
                    "letters used for generation must not involve parameters".into(),
                ));
            }
        }
        let syllables = alphabet.syllables(setup)?;
        let origin = Point::origin(ring)?;
        let generic = Point::fiber_only(ring, v.clone())?;
        let mut dict = Dictionary {
            setup,
            syllables,
            generators: Vec::new(),
            generic_point: v,
            rejected: [0, 0],
            cache: Mutex::new(HashMap::new()),
        };
        let c0 = dict.run_phase(&origin, &[Vec::new()], options.max_length, Phase::Origin)?;
        let mut gens: Vec<Generator> = c0
            .iter()
            .map(|w| Generator {
                word: w.clone(),
                phase: Phase::Origin,
                bidegree: word_bidegree(&dict.syllables, w),
            })
            .collect();
        let cv = dict.run_phase(&generic, &c0, options.max_length, Phase::Generic)?;
        let c0set: HashSet<&Vec<usize>> = c0.iter().collect();
        gens.extend(cv.iter().filter(|w| !c0set.contains(w)).map(|w| Generator {
            word: w.clone(),
            phase: Phase::Generic,
            bidegree: word_bidegree(&dict.syllables, w),
        }));
        gens.sort_by(|a, b| a.word.len().cmp(&b.word.len()).then_with(|| a.word.cmp(&b.word)));
        dict.generators = gens;
        Ok(dict)
    }

    fn prunable(&self, w: &[usize]) -> bool {
        let (p, q) = word_bidegree(&self.syllables, w);
        let nt = self.setup.horizontal().len();
        if p > nt || q > self.setup.fiber_dim() {
            return true;
        }
        w.windows(2)
            .any(|x| x[0] == x[1] && self.syllables[x[0]].degree() % 2 == 1)
    }

    /// One elimination pass. `initial` is the set carried over from the
    /// previous phase (all lengths); returns the full generating set.
    fn run_phase(
        &mut self,
        pt: &Point,
        initial: &[Vec<usize>],
        max_length: Option<usize>,
        phase: Phase,
    ) -> Result<Vec<Vec<usize>>> {
        let frame = self.setup.frame().clone();
        let images: Vec<Form<Number>> = self
            .syllables
            .iter()
            .map(|s| s.form.evaluate(pt))
            .collect::<Result<_>>()?;
        let mut ech: Echelon<Word> = Echelon::new();
        let init_set: HashSet<&Vec<usize>> = initial.iter().collect();
        for w in initial {
            let img = to_sparse(&evaluate_image(&images, w, &frame));
            if !ech.insert(&img) {
                return Err(Error::TransitiveSphere(format!(
                    "origin generator `{}` is dependent at the generic point",
                    self.label_of(w)
                )));
            }
        }
        let mut all: Vec<Vec<usize>> = initial.to_vec();
        let mut prev: Vec<Vec<usize>> = initial.iter().filter(|w| w.is_empty()).cloned().collect();
        let mut level1: Vec<usize> = Vec::new();
        let mut l = 1;
        loop {
            if max_length.is_some_and(|m| l > m) {
                break;
            }
            let prev_set: HashSet<&Vec<usize>> = prev.iter().collect();
            let mut cands: Vec<Vec<usize>> = Vec::new();
            if l == 1 {
                cands.extend((0..self.syllables.len()).map(|s| vec![s]));
            } else {
                for w in &prev {
                    let last = *w.last().unwrap();
                    for &s in level1.iter().filter(|&&s| s >= last) {
                        let mut c = w.clone();
                        c.push(s);
                        let ok = (0..c.len() - 1).all(|j| {
                            let mut sub = c.clone();
                            sub.remove(j);
                            prev_set.contains(&sub)
                        });
                        if ok {
                            cands.push(c);
                        }
                    }
                }
            }
            cands.sort();
            let mut next: Vec<Vec<usize>> = Vec::new();
            for c in cands {
                if init_set.contains(&c) {
                    continue;
                }
                if self.prunable(&c) {
                    continue;
                }
                let img = to_sparse(&evaluate_image(&images, &c, &frame));
                if ech.insert(&img) {
                    next.push(c);
                } else {
                    self.rejected[phase as usize] += 1;
                }
            }
            all.extend(next.iter().cloned());
            next.extend(initial.iter().filter(|w| w.len() == l).cloned());
            next.sort();
            if next.is_empty() {
                break;
            }
            if l == 1 {
                level1 = next.iter().map(|w| w[0]).collect();
                level1.sort();
            }
            prev = next;
            l += 1;
        }
        all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(all)
    }

    pub fn setup(&self) -> &HomogeneousSetup {
        self.setup
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    /// All generators including the empty word, in word order.
    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generic_point(&self) -> &[Number] {
        &self.generic_point
    }

    /// Number of candidates found dependent in each phase.
    pub fn rejected(&self) -> (usize, usize) {
        (self.rejected[0], self.rejected[1])
    }

    pub fn label_of(&self, w: &[usize]) -> String {
        if w.is_empty() {
            "1".into()
        } else {
            w.iter().map(|&s| self.syllables[s].label()).collect::<Vec<_>>().join(" ")
        }
    }

    pub fn label(&self, g: usize) -> String {
        self.label_of(&self.generators[g].word)
    }

    /// Wedge of the syllable forms.
    pub fn translate_word(&self, w: &[usize]) -> Form<Scalar> {
        if let Some(f) = self.cache.lock().unwrap().get(w) {
            return f.clone();
        }
        let mut acc = self.setup.scalar_form(self.setup.one());
        for &s in w {
            acc = acc.wedge_unchecked(&self.syllables[s].form);
        }
        self.cache.lock().unwrap().insert(w.to_vec(), acc.clone());
        acc
    }

    pub fn translate(&self, g: usize) -> Form<Scalar> {
        self.translate_word(&self.generators[g].word)
    }

    /// Look up a syllable index by contraction and letter names (in any
    /// order for symmetric contractions); returns the sign picked up.
    pub fn find_syllable(&self, contraction: &str, letters: &[&str]) -> Option<usize> {
        self.syllables.iter().position(|s| {
            s.contraction == contraction && s.letters.iter().map(|x| x.as_str()).eq(letters.iter().copied())
        })
    }

    /// Counts of positive-degree generators per bidegree.
    pub fn counts(&self) -> BTreeMap<(usize, usize), usize> {
        let mut m = BTreeMap::new();
        for g in &self.generators {
            if g.degree() > 0 {
                *m.entry(g.bidegree).or_insert(0) += 1;
            }
        }
        m
    }

    /// Rank of the evaluated images of the selected generators, per bidegree.
    pub fn ranks(&self, pt: &Point, select: impl Fn(usize) -> bool) -> Result<BTreeMap<(usize, usize), usize>> {
        let frame = self.setup.frame().clone();
        let images: Vec<Form<Number>> = self
            .syllables
            .iter()
            .map(|s| s.form.evaluate(pt))
            .collect::<Result<_>>()?;
        let mut ech: BTreeMap<(usize, usize), Echelon<Word>> = BTreeMap::new();
        for (i, g) in self.generators.iter().enumerate() {
            if !select(i) {
                continue;
            }
            let img = to_sparse(&evaluate_image(&images, &g.word, &frame));
            ech.entry(g.bidegree).or_default().insert(&img);
        }
        Ok(ech.into_iter().map(|(k, e)| (k, e.rank())).collect())
    }

    /// Compare spans at both points with the invariant dimensions of the
    /// respective stabilizers, in every bidegree.
    pub fn completeness(&self, extras: &[(crate::setup::Mat, crate::setup::Mat)]) -> Result<CompletenessReport> {
        let setup = self.setup;
        let ring = setup.ring();
        let origin = Point::origin(ring)?;
        let generic = Point::fiber_only(ring, self.generic_point.clone())?;
        let r0 = self.ranks(&origin, |_| true)?;
        let rv = self.ranks(&generic, |_| true)?;
        let s0 = setup.stabilizer_of(origin.fiber());
        let sv = setup.stabilizer_of(generic.fiber());
        let nt = setup.horizontal().len();
        let k = setup.fiber_dim();
        let mut cells = Vec::new();
        for p in 0..=nt {
            for q in 0..=k {
                let t0 = setup.invariant_dimension((p, q), &s0, extras)?;
                let tv = setup.invariant_dimension((p, q), &sv, extras)?;
                let o = r0.get(&(p, q)).copied().unwrap_or(0);
                let g = rv.get(&(p, q)).copied().unwrap_or(0);
                cells.push(CompletenessCell {
                    p,
                    q,
                    origin_span: o,
                    origin_target: t0,
                    generic_span: g,
                    generic_target: tv,
                    pass: o == t0 && g == tv,
                });
            }
        }
        let pass = cells.iter().all(|c| c.pass);
        Ok(CompletenessReport { cells, pass })
    }

    /// The radial factor used in expression ansätze.
    fn radial(&self) -> Radial {
        let ring = self.setup.ring();
        let aa = norm_squared_poly(ring.nfib(), ring.npar()).pad(ring.nvars());
        for j in 0..ring.nrad() {
            if ring.relation(j) == &aa {
                return Radial::Radical(j);
            }
        }
        Radial::NormSquared
    }

    fn radial_power(&self, e: i32) -> Option<Scalar> {
        let ring = self.setup.ring();
        match self.radial() {
            Radial::Radical(j) => {
                let s = Scalar::radical(ring, j);
                if e >= 0 {
                    Some(s.pow(e as u32))
                } else {
                    s.pow((-e) as u32).inv().ok()
                }
            }
            Radial::NormSquared => {
                if e < 0 || e % 2 != 0 {
                    None
                } else {
                    let aa = Scalar::from_base_poly(ring, &norm_squared_poly(ring.nfib(), ring.npar()));
                    Some(aa.pow((e / 2) as u32))
                }
            }
        }
    }

    fn radial_name(&self) -> String {
        match self.radial() {
            Radial::Radical(j) => self.setup.ring().radical_names()[j].clone(),
            Radial::NormSquared => "aa".into(),
        }
    }

    /// Write `target` as `sum_g c_g(s) g` with Laurent polynomial
    /// coefficients in the radial function, by exact coefficient matching.
    pub fn express(&self, target: &Form<Scalar>, options: &ExpressOptions) -> Result<GeneratorCombination> {
        let setup = self.setup;
        let ring = setup.ring();
        if !target.same_frame(&Form::zero(setup.frame())) {
            return Err(Error::FrameMismatch);
        }
        let bidegrees: HashSet<(usize, usize)> = target.bidegree_split().keys().copied().collect();
        let mut products: Vec<Vec<usize>> = Vec::new();
        for (i, g) in self.generators.iter().enumerate() {
            if bidegrees.contains(&g.bidegree) {
                products.push(vec![i]);
            }
        }
        if options.pairs {
            for i in 1..self.generators.len() {
                for j in i..self.generators.len() {
                    let (a, b) = (&self.generators[i], &self.generators[j]);
                    let bd = (a.bidegree.0 + b.bidegree.0, a.bidegree.1 + b.bidegree.1);
                    if bidegrees.contains(&bd) {
                        products.push(vec![i, j]);
                    }
                }
            }
        }
        let (lo, hi) = options.laurent;
        let mut cands: Vec<(usize, i32, Form<Scalar>)> = Vec::new();
        for (pi, prod) in products.iter().enumerate() {
            let mut base = self.translate(prod[0]);
            for &g in &prod[1..] {
                base = base.wedge_unchecked(&self.translate(g));
            }
            if base.is_zero() {
                continue;
            }
            for e in lo..=hi {
                if let Some(f) = self.radial_power(e) {
                    cands.push((pi, e, base.scale(&f)));
                }
            }
        }
        // common denominator
        let mut den = vec![0u16; ring.nrad()];
        for f in cands.iter().map(|c| &c.2).chain(std::iter::once(target)) {
            for (_, c) in f.terms() {
                for (j, &m) in c.den_exps().iter().enumerate() {
                    den[j] = den[j].max(m);
                }
            }
        }
        let flatten = |f: &Form<Scalar>| -> SparseVec<(Word, Exps)> {
            let mut out = SparseVec::new();
            for (w, c) in f.terms() {
                let mut n = c.numerator().clone();
                for (j, &m) in c.den_exps().iter().enumerate() {
                    for _ in m..den[j] {
                        n = n.mul(ring.relation(j));
                    }
                }
                for (e, v) in n.iter() {
                    out.insert((w, e.clone()), v.clone());
                }
            }
            out
        };
        let mut ech: Echelon<(Word, Exps)> = Echelon::tracking();
        for c in &cands {
            ech.insert(&flatten(&c.2));
        }
        let mut terms: BTreeMap<usize, BTreeMap<i32, Number>> = BTreeMap::new();
        let mut residual = true;
        if let Some(sol) = ech.solve(&flatten(target)) {
            let mut check = target.neg();
            for (i, c) in &sol {
                let (pi, e, f) = &cands[*i];
                check = check.add(&f.scale(&Scalar::constant(ring, c.clone())));
                let slot = terms.entry(*pi).or_default().entry(*e).or_insert_with(Number::zero);
                *slot = slot.add(c);
            }
            residual = !check.is_zero();
        }
        let radial = self.radial_name();
        let is_norm = matches!(self.radial(), Radial::NormSquared);
        let terms = terms
            .into_iter()
            .filter_map(|(pi, coef)| {
                let coef: BTreeMap<i32, Number> = coef.into_iter().filter(|(_, v)| !v.is_zero()).collect();
                if coef.is_empty() {
                    return None;
                }
                Some(CombinationTerm {
                    generators: products[pi].clone(),
                    label: products[pi].iter().map(|&g| self.label(g)).collect::<Vec<_>>().join(" "),
                    coefficient: Coefficient {
                        powers: coef,
                        radial: radial.clone(),
                        norm_squared: is_norm,
                    },
                })
            })
            .collect();
        Ok(GeneratorCombination { terms, residual })
    }

    /// The form `sum c(s) g` described by a combination.
    pub fn combination_form(&self, c: &GeneratorCombination) -> Result<Form<Scalar>> {
        let mut acc = Form::zero(self.setup.frame());
        for t in &c.terms {
            let mut base = self.setup.scalar_form(self.setup.one());
            for &g in &t.generators {
                base = base.wedge(&self.translate(g))?;
            }
            for (&e, v) in &t.coefficient.powers {
                let f = self
                    .radial_power(e)
                    .ok_or_else(|| Error::Unsupported(format!("radial power {e}")))?;
                acc = acc.add(&base.scale(&f.scale(v)));
            }
        }
        Ok(acc)
    }

    /// `d` of the radial function and of every generator of degree
    /// `1..=max_degree`, expressed over the dictionary.
    pub fn differential_table(&self, max_degree: usize, options: &ExpressOptions) -> Result<Vec<DifferentialRow>> {
        let setup = self.setup;
        let ring = setup.ring();
        let mut rows = Vec::new();
        if ring.nfib() > 0 {
            let aa = Scalar::from_base_poly(ring, &norm_squared_poly(ring.nfib(), ring.npar()));
            let form = setup.scalar_form(aa);
            let d = setup.exterior_derivative(&form)?;
            let expr = self.express(&d, options)?;
            rows.push(DifferentialRow {
                source: "aa".into(),
                degree: 0,
                image: expr,
            });
        }
        for (i, g) in self.generators.iter().enumerate() {
            if g.degree() == 0 || g.degree() > max_degree {
                continue;
            }
            let d = setup.exterior_derivative(&self.translate(i))?;
            rows.push(DifferentialRow {
                source: self.label(i),
                degree: g.degree(),
                image: self.express(&d, options)?,
            });
        }
        Ok(rows)
    }
}

#[derive(Clone, Copy, Debug)]
enum Radial {
    Radical(usize),
    NormSquared,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompletenessCell {
    pub p: usize,
    pub q: usize,
    pub origin_span: usize,
    pub origin_target: usize,
    pub generic_span: usize,
    pub generic_target: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompletenessReport {
    pub cells: Vec<CompletenessCell>,
    pub pass: bool,
}

impl CompletenessReport {
    pub fn origin_total(&self) -> usize {
        self.cells.iter().map(|c| c.origin_target).sum()
    }

    pub fn generic_total(&self) -> usize {
        self.cells.iter().map(|c| c.generic_target).sum()
    }
}

#[derive(Clone, Debug)]
pub struct ExpressOptions {
    /// Inclusive range of radial exponents.
    pub laurent: (i32, i32),
    /// Also use products of two generators.
    pub pairs: bool,
}

impl Default for ExpressOptions {
    fn default() -> Self {
        ExpressOptions {
            laurent: (-2, 4),
            pairs: false,
        }
    }
}

/// Laurent polynomial in the radial function `s`; even powers of a radical
/// with `s^2 = aa` are rendered as powers of `aa`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Coefficient {
    pub powers: BTreeMap<i32, Number>,
    pub radial: String,
    #[serde(skip)]
    norm_squared: bool,
}

impl Coefficient {
    fn monomial(&self, e: i32) -> String {
        if e == 0 {
            String::new()
        } else if e > 0 && e % 2 == 0 {
            if e == 2 {
                "aa".into()
            } else {
                format!("aa^{}", e / 2)
            }
        } else if e == 1 && !self.norm_squared {
            self.radial.clone()
        } else {
            format!("{}^{}", self.radial, e)
        }
    }

    pub fn is_constant(&self) -> bool {
        self.powers.keys().all(|&e| e == 0)
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (&e, c) in self.powers.iter().rev() {
            let mono = self.monomial(e);
            let (neg, mag) = if c.signum() < 0 && !c.is_compound() {
                (true, c.neg())
            } else {
                (false, c.clone())
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let num = if mag.is_compound() { format!("({mag})") } else { mag.to_string() };
            match (mag.is_one(), mono.is_empty()) {
                (true, true) => write!(f, "1")?,
                (true, false) => write!(f, "{mono}")?,
                (false, true) => write!(f, "{num}")?,
                (false, false) => write!(f, "{num}*{mono}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CombinationTerm {
    /// Generator indices whose product is taken.
    pub generators: Vec<usize>,
    pub label: String,
    pub coefficient: Coefficient,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorCombination {
    pub terms: Vec<CombinationTerm>,
    pub residual: bool,
}

impl fmt::Display for GeneratorCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.residual {
            return write!(f, "<no expression found>");
        }
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let c = t.coefficient.to_string();
            let single = t.coefficient.powers.len() == 1;
            let (neg, c) = match c.strip_prefix('-') {
                Some(rest) if single => (true, rest.to_string()),
                _ => (false, c),
            };
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let label = if t.label == "1" { String::new() } else { t.label.clone() };
            if c == "1" {
                write!(f, "{}", if label.is_empty() { "1" } else { &label })?;
            } else if single {
                write!(f, "{c}")?;
                if !label.is_empty() {
                    write!(f, " {label}")?;
                }
            } else {
                write!(f, "({c})")?;
                if !label.is_empty() {
                    write!(f, " {label}")?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DifferentialRow {
    pub source: String,
    pub degree: usize,
    pub image: GeneratorCombination,
}
