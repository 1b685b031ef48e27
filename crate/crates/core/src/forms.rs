//! Exterior algebra over a frame of degree-one generators.
//!
//! Basis words are bitmasks over the frame (at most 64 generators); the sign
//! of a product is the parity of the inversions needed to sort the
//! concatenated index sequence.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::number::Number;
use crate::ring::{Point, Scalar};

/// Coefficient types usable in [`Form`].
pub trait Coeff: Clone + PartialEq + fmt::Display {
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
}

impl Coeff for Number {
    fn is_zero(&self) -> bool {
        Number::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        Number::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        Number::mul(self, other)
    }
    fn neg(&self) -> Self {
        Number::neg(self)
    }
}

impl Coeff for Scalar {
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        Scalar::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        Scalar::mul(self, other)
    }
    fn neg(&self) -> Self {
        Scalar::neg(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tag {
    Horizontal,
    Vertical,
    Gauge,
    RawVertical,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    /// Symbol used when rendering words, e.g. `e` or `b`.
    pub symbol: String,
    /// Index label, e.g. `2` for `e^2`.
    pub label: String,
    pub tag: Tag,
}

impl Generator {
    pub fn new(symbol: &str, label: impl ToString, tag: Tag) -> Self {
        Generator {
            symbol: symbol.to_string(),
            label: label.to_string(),
            tag,
        }
    }

    /// Name accepted by the expression language, e.g. `e2`, `b1`, `da3`.
    pub fn name(&self) -> String {
        format!("{}{}", self.symbol, self.label)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    gens: Vec<Generator>,
}

pub type Word = u64;

impl Frame {
    pub fn new(gens: Vec<Generator>) -> Result<Arc<Frame>> {
        if gens.len() > 64 {
            return Err(Error::Unsupported("frames with more than 64 generators".into()));
        }
        for (i, g) in gens.iter().enumerate() {
            if gens[..i].iter().any(|h| h.name() == g.name()) {
                return Err(Error::Config(format!("duplicate frame generator `{}`", g.name())));
            }
        }
        Ok(Arc::new(Frame { gens }))
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn generator(&self, i: usize) -> &Generator {
        &self.gens[i]
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name() == name)
    }

    pub fn mask(&self, tag: Tag) -> Word {
        self.gens
            .iter()
            .enumerate()
            .filter(|(_, g)| g.tag == tag)
            .fold(0, |m, (i, _)| m | (1u64 << i))
    }

    pub fn bidegree(&self, w: Word) -> (usize, usize) {
        (
            (w & self.mask(Tag::Horizontal)).count_ones() as usize,
            (w & self.mask(Tag::Vertical)).count_ones() as usize,
        )
    }

    /// Render a word as `e^{23} b_{14}`, grouping runs of equal symbols.
    pub fn render_word(&self, w: Word) -> String {
        if w == 0 {
            return "1".into();
        }
        let mut groups: Vec<(String, Tag, Vec<String>)> = Vec::new();
        for i in bits(w) {
            let g = &self.gens[i];
            match groups.last_mut() {
                Some((s, t, labels)) if *s == g.symbol && *t == g.tag => labels.push(g.label.clone()),
                _ => groups.push((g.symbol.clone(), g.tag, vec![g.label.clone()])),
            }
        }
        groups
            .into_iter()
            .map(|(s, t, labels)| {
                let sep = if labels.iter().any(|l| l.len() > 1) { "," } else { "" };
                let joined = labels.join(sep);
                match t {
                    Tag::Vertical => format!("{s}_{{{joined}}}"),
                    _ => format!("{s}^{{{joined}}}"),
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Indices of the set bits of a word, ascending.
pub fn bits(w: Word) -> impl Iterator<Item = usize> {
    let mut rest = w;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(i)
        }
    })
}

/// Sign of `e^a ∧ e^b` relative to the sorted word `a | b`, or `None` if the
/// words overlap.
pub fn wedge_sign(a: Word, b: Word) -> Option<bool> {
    if a & b != 0 {
        return None;
    }
    let mut inversions = 0u32;
    for j in bits(b) {
        inversions += (a >> j).count_ones();
    }
    Some(inversions % 2 == 1)
}

/// Sparse element of the exterior algebra over `frame`.
#[derive(Clone)]
pub struct Form<C: Coeff> {
    frame: Arc<Frame>,
    terms: BTreeMap<Word, C>,
}

impl<C: Coeff> PartialEq for Form<C> {
    fn eq(&self, other: &Self) -> bool {
        self.same_frame(other) && self.terms == other.terms
    }
}

impl<C: Coeff> Form<C> {
    pub fn zero(frame: &Arc<Frame>) -> Self {
        Form {
            frame: frame.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(frame: &Arc<Frame>, w: Word, c: C) -> Self {
        let mut f = Form::zero(frame);
        f.add_term(w, c);
        f
    }

    /// The generator `i` with coefficient `one`.
    pub fn generator(frame: &Arc<Frame>, i: usize, one: C) -> Self {
        Form::monomial(frame, 1u64 << i, one)
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Word, &C)> {
        self.terms.iter().map(|(w, c)| (*w, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: Word) -> Option<&C> {
        self.terms.get(&w)
    }

    pub fn same_frame(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.frame, &other.frame) || self.frame == other.frame
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.same_frame(other) {
            Ok(())
        } else {
            Err(Error::FrameMismatch)
        }
    }

    pub fn add_term(&mut self, w: Word, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(v) => {
                let s = v.add(&c);
                if s.is_zero() {
                    self.terms.remove(&w);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert!(self.same_frame(other));
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(*w, c.clone());
        }
        out
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.add(other))
    }

    pub fn neg(&self) -> Self {
        Form {
            frame: self.frame.clone(),
            terms: self.terms.iter().map(|(w, c)| (*w, c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Form::zero(&self.frame);
        if c.is_zero() {
            return out;
        }
        for (w, v) in &self.terms {
            out.add_term(*w, v.mul(c));
        }
        out
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.wedge_unchecked(other))
    }

    pub(crate) fn wedge_unchecked(&self, other: &Self) -> Self {
        let mut out = Form::zero(&self.frame);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if let Some(neg) = wedge_sign(*a, *b) {
                    let c = ca.mul(cb);
                    out.add_term(a | b, if neg { c.neg() } else { c });
                }
            }
        }
        out
    }

    /// Interior product with the vector dual to generator `i`.
    pub fn interior(&self, i: usize) -> Self {
        let bit = 1u64 << i;
        let mut out = Form::zero(&self.frame);
        for (w, c) in &self.terms {
            if w & bit != 0 {
                let before = (w & (bit - 1)).count_ones();
                out.add_term(w & !bit, if before % 2 == 1 { c.neg() } else { c.clone() });
            }
        }
        out
    }

    /// Homogeneous degree, or `None` for zero or mixed-degree forms.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|w| w.count_ones() as usize);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut ds: Vec<usize> = self.terms.keys().map(|w| w.count_ones() as usize).collect();
        ds.sort();
        ds.dedup();
        ds
    }

    pub fn bidegree_split(&self) -> BTreeMap<(usize, usize), Self> {
        let mut out: BTreeMap<(usize, usize), Self> = BTreeMap::new();
        for (w, c) in &self.terms {
            out.entry(self.frame.bidegree(*w))
                .or_insert_with(|| Form::zero(&self.frame))
                .terms
                .insert(*w, c.clone());
        }
        out
    }

    /// Whether any word contains a generator from `mask`.
    pub fn touches(&self, mask: Word) -> bool {
        self.terms.keys().any(|w| w & mask != 0)
    }

    pub fn map_coeffs<D: Coeff>(&self, mut f: impl FnMut(&C) -> D) -> Form<D> {
        let mut out = Form::zero(&self.frame);
        for (w, c) in &self.terms {
            out.add_term(*w, f(c));
        }
        out
    }

    pub fn try_map_coeffs<D: Coeff>(&self, mut f: impl FnMut(&C) -> Result<D>) -> Result<Form<D>> {
        let mut out = Form::zero(&self.frame);
        for (w, c) in &self.terms {
            out.add_term(*w, f(c)?);
        }
        Ok(out)
    }

    /// Move the form to an equal frame object (e.g. one rebuilt elsewhere).
    pub fn reframe(&self, frame: &Arc<Frame>) -> Result<Self> {
        if *frame.as_ref() != *self.frame.as_ref() {
            return Err(Error::FrameMismatch);
        }
        Ok(Form {
            frame: frame.clone(),
            terms: self.terms.clone(),
        })
    }

    /// Replace every generator `g` by `images[g]` (forms over `target`) and
    /// expand.
    pub fn substitute(&self, target: &Arc<Frame>, images: &[Form<C>]) -> Form<C> {
        let mut out = Form::zero(target);
        for (w, c) in &self.terms {
            let mut acc = Form::monomial(target, 0, c.clone());
            for g in bits(*w) {
                acc = acc.wedge_unchecked(&images[g]);
                if acc.is_zero() {
                    break;
                }
            }
            for (w2, c2) in acc.terms {
                out.add_term(w2, c2);
            }
        }
        out
    }

    /// Terms sorted by (degree, ascending index sequence) for rendering.
    pub fn sorted_terms(&self) -> Vec<(Word, &C)> {
        let mut v: Vec<(Word, &C)> = self.terms.iter().map(|(w, c)| (*w, c)).collect();
        v.sort_by_key(|(w, _)| (w.count_ones(), bits(*w).collect::<Vec<_>>()));
        v
    }
}

impl Form<Scalar> {
    pub fn evaluate(&self, pt: &Point) -> Result<Form<Number>> {
        self.try_map_coeffs(|c| c.evaluate(pt))
    }

    /// Multiply by a scalar function.
    pub fn times(&self, f: &Scalar) -> Self {
        self.scale(f)
    }
}

/// `evaluate_form` of the specification: coefficient-wise evaluation.
pub fn evaluate_form(x: &Form<Scalar>, pt: &Point) -> Result<Form<Number>> {
    x.evaluate(pt)
}

fn needs_parens(s: &str) -> bool {
    let body = s.strip_prefix('-').unwrap_or(s);
    body.contains(" + ") || body.contains(" - ")
}

impl<C: Coeff> fmt::Display for Form<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in self.sorted_terms() {
            let cs = c.to_string();
            let word = self.frame.render_word(w);
            let (neg, body) = match cs.strip_prefix('-') {
                Some(rest) if !needs_parens(&cs) => (true, rest.to_string()),
                _ => (false, cs.clone()),
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let body = if needs_parens(&body) { format!("({body})") } else { body };
            if w == 0 {
                write!(f, "{body}")?;
            } else if body == "1" {
                write!(f, "{word}")?;
            } else {
                write!(f, "{body}*{word}")?;
            }
        }
        Ok(())
    }
}

impl<C: Coeff> fmt::Debug for Form<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form({self})")
    }
}
