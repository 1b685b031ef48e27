//! Letters (vector-valued invariant basic forms) and invariant contractions.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{Form, Tag};
use crate::number::Number;
use crate::ring::{Point, Scalar};
use crate::setup::HomogeneousSetup;

/// A `V`-valued form, one component per fiber direction, homogeneous of a
/// single bidegree.
#[derive(Clone, Debug)]
pub struct Letter {
    name: String,
    components: Vec<Form<Scalar>>,
    bidegree: (usize, usize),
}

impl Letter {
    /// Build a letter and check homogeneity, basicness and equivariance.
    pub fn new(setup: &HomogeneousSetup, name: &str, components: Vec<Form<Scalar>>) -> Result<Letter> {
        let bidegree = homogeneous_bidegree(name, &components)?;
        let l = Letter {
            name: name.to_string(),
            components,
            bidegree: bidegree.unwrap_or((0, 0)),
        };
        l.check(setup)?;
        Ok(l)
    }

    /// `a = sum_i a_i v_i`
    pub fn a(setup: &HomogeneousSetup) -> Letter {
        let ring = setup.ring();
        Letter {
            name: "a".into(),
            components: (0..setup.fiber_dim())
                .map(|i| setup.scalar_form(Scalar::fiber(ring, i)))
                .collect(),
            bidegree: (0, 0),
        }
    }

    /// `b = sum_i b_i v_i`
    pub fn b(setup: &HomogeneousSetup) -> Letter {
        Letter {
            name: "b".into(),
            components: (1..=setup.fiber_dim()).map(|i| setup.b(i)).collect(),
            bidegree: (0, 1),
        }
    }

    /// Letter induced by an equivariant map `V -> Λ^p T`, given by the images
    /// of the basis vectors. Components must be horizontal with constant
    /// coefficients.
    pub fn from_horizontal(setup: &HomogeneousSetup, name: &str, components: Vec<Form<Scalar>>) -> Result<Letter> {
        let hmask = setup.frame().mask(Tag::Horizontal);
        for c in &components {
            for (w, coef) in c.terms() {
                if w & !hmask != 0 || coef.as_number().is_none() {
                    return Err(Error::InvalidLetter(
                        name.into(),
                        "components must be horizontal with constant coefficients".into(),
                    ));
                }
            }
        }
        Letter::new(setup, name, components)
    }

    /// Letter `ε(v) = sum_i ψ(v, v_i) v_i` induced by an equivariant bilinear
    /// map `ψ: V ⊗ V -> Λ^p T`, given as `psi[j][i] = ψ(v_j, v_i)`.
    pub fn from_bilinear(setup: &HomogeneousSetup, name: &str, psi: &[Vec<Form<Scalar>>]) -> Result<Letter> {
        let k = setup.fiber_dim();
        if psi.len() != k || psi.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidLetter(name.into(), format!("bilinear map must be {k}x{k}")));
        }
        let ring = setup.ring();
        let components = (0..k)
            .map(|i| {
                (0..k).fold(Form::zero(setup.frame()), |acc, j| {
                    acc.add(&psi[j][i].scale(&Scalar::fiber(ring, j)))
                })
            })
            .collect();
        Letter::new(setup, name, components)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn components(&self) -> &[Form<Scalar>] {
        &self.components
    }

    pub fn bidegree(&self) -> (usize, usize) {
        self.bidegree
    }

    pub fn degree(&self) -> usize {
        self.bidegree.0 + self.bidegree.1
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    pub fn renamed(mut self, name: &str) -> Letter {
        self.name = name.to_string();
        self
    }

    /// Basicness and infinitesimal equivariance:
    /// `δ_A α_i + sum_j ρ(A)_{ij} α_j = 0`.
    pub fn check(&self, setup: &HomogeneousSetup) -> Result<()> {
        let k = setup.fiber_dim();
        if self.components.len() != k {
            return Err(Error::InvalidLetter(
                self.name.clone(),
                format!("expected {k} components, got {}", self.components.len()),
            ));
        }
        for c in &self.components {
            if !c.same_frame(&Form::zero(setup.frame())) {
                return Err(Error::FrameMismatch);
            }
            if !setup.is_basic(c) {
                return Err(Error::InvalidLetter(self.name.clone(), "component is not basic".into()));
            }
        }
        for a in 0..setup.gauge_count() {
            let rho = setup.rho(a);
            for i in 0..k {
                let mut v = setup.variation(a, &self.components[i]);
                for j in 0..k {
                    if !rho[i][j].is_zero() {
                        let c = Scalar::constant(setup.ring(), rho[i][j].clone());
                        v = v.add(&self.components[j].scale(&c));
                    }
                }
                if !v.is_zero() {
                    return Err(Error::Equivariance {
                        letter: self.name.clone(),
                        element: format!("e{}", setup.gauge()[a]),
                    });
                }
            }
        }
        Ok(())
    }

    /// Covariant derivative `D α = dα + ρ_*(ω) ∧ α`.
    pub fn covariant_derivative(&self, setup: &HomogeneousSetup, name: &str) -> Result<Letter> {
        let k = setup.fiber_dim();
        let mut comps = Vec::with_capacity(k);
        for i in 0..k {
            let mut x = setup.d_extended(&self.components[i]);
            for a in 0..setup.gauge_count() {
                let r = setup.connection(a);
                let ea = setup.e(setup.gauge()[a]);
                for j in 0..k {
                    if !r[i][j].is_zero() {
                        let c = Scalar::constant(setup.ring(), r[i][j].clone());
                        x = x.add(&ea.wedge(&self.components[j])?.scale(&c));
                    }
                }
            }
            if x.touches(setup.gauge_mask()) {
                return Err(Error::ResultNotBasic(x.to_string()));
            }
            comps.push(x);
        }
        let bideg = homogeneous_bidegree(name, &comps)?;
        let l = Letter {
            name: name.to_string(),
            components: comps,
            bidegree: bideg.unwrap_or((self.bidegree.0 + 1, self.bidegree.1)),
        };
        l.check(setup)?;
        Ok(l)
    }

    /// Components evaluated at a point.
    pub fn evaluate(&self, pt: &Point) -> Result<Vec<Form<Number>>> {
        self.components.iter().map(|c| c.evaluate(pt)).collect()
    }
}

fn homogeneous_bidegree(name: &str, comps: &[Form<Scalar>]) -> Result<Option<(usize, usize)>> {
    let mut found: Option<(usize, usize)> = None;
    for c in comps {
        for (w, _) in c.terms() {
            let bd = c.frame().bidegree(w);
            match found {
                None => found = Some(bd),
                Some(f) if f != bd => {
                    return Err(Error::InvalidLetter(
                        name.into(),
                        format!("components mix bidegrees {:?} and {:?}", f, bd),
                    ))
                }
                _ => {}
            }
        }
    }
    Ok(found)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    Symmetric,
    Antisymmetric,
    None,
}

/// An invariant multilinear form `m: V^{⊗r} -> K`, stored sparsely.
#[derive(Clone, Debug)]
pub struct Contraction {
    name: String,
    arity: usize,
    dim: usize,
    entries: BTreeMap<Vec<usize>, Number>,
    symmetry: Symmetry,
}

impl Contraction {
    /// Build from entries with 0-based indices; zero entries are dropped.
    pub fn new(name: &str, dim: usize, arity: usize, entries: BTreeMap<Vec<usize>, Number>) -> Result<Contraction> {
        for idx in entries.keys() {
            if idx.len() != arity || idx.iter().any(|&i| i >= dim) {
                return Err(Error::Config(format!(
                    "contraction `{name}`: entry {:?} does not fit arity {arity} on dimension {dim}",
                    idx.iter().map(|i| i + 1).collect::<Vec<_>>()
                )));
            }
        }
        let entries: BTreeMap<_, _> = entries.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        let symmetry = detect_symmetry(&entries, arity);
        Ok(Contraction {
            name: name.to_string(),
            arity,
            dim,
            entries,
            symmetry,
        })
    }

    /// Euclidean scalar product.
    pub fn dot(dim: usize) -> Contraction {
        let entries = (0..dim).map(|i| (vec![i, i], Number::one())).collect();
        Contraction::new("dot", dim, 2, entries).expect("valid")
    }

    /// Determinant, of arity equal to the dimension.
    pub fn det(dim: usize) -> Contraction {
        let mut entries = BTreeMap::new();
        permutations(dim, &mut |p, odd| {
            entries.insert(p.to_vec(), if odd { Number::from_int(-1) } else { Number::one() });
        });
        Contraction::new("det", dim, dim, entries).expect("valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn entries(&self) -> &BTreeMap<Vec<usize>, Number> {
        &self.entries
    }

    pub fn renamed(mut self, name: &str) -> Contraction {
        self.name = name.to_string();
        self
    }

    /// `sum_slots m(v, .., ρ(A) w, .., v) = 0` for every gauge element.
    pub fn check_invariant(&self, setup: &HomogeneousSetup) -> Result<()> {
        if self.dim != setup.fiber_dim() {
            return Err(Error::ContractionNotInvariant(
                self.name.clone(),
                format!("defined on dimension {}, fiber has {}", self.dim, setup.fiber_dim()),
            ));
        }
        for a in 0..setup.gauge_count() {
            let rho = setup.rho(a);
            let mut acc: BTreeMap<Vec<usize>, Number> = BTreeMap::new();
            for (idx, v) in &self.entries {
                for s in 0..self.arity {
                    for j in 0..self.dim {
                        let r = &rho[idx[s]][j];
                        if r.is_zero() {
                            continue;
                        }
                        let mut key = idx.clone();
                        key[s] = j;
                        let e = acc.entry(key).or_insert_with(Number::zero);
                        *e = e.add(&v.mul(r));
                    }
                }
            }
            if acc.values().any(|v| !v.is_zero()) {
                return Err(Error::ContractionNotInvariant(
                    self.name.clone(),
                    format!("fails under e{}", setup.gauge()[a]),
                ));
            }
        }
        Ok(())
    }

    /// `sum m(i_1..i_r) α^1_{i_1} ∧ .. ∧ α^r_{i_r}` over generic coefficients.
    pub fn apply<C: crate::forms::Coeff>(&self, comps: &[&[Form<C>]], scalar: impl Fn(&Number) -> C) -> Result<Form<C>> {
        if comps.len() != self.arity {
            return Err(Error::ArityMismatch {
                name: self.name.clone(),
                expected: self.arity,
                got: comps.len(),
            });
        }
        let frame = comps
            .first()
            .and_then(|c| c.first())
            .map(|f| f.frame().clone())
            .ok_or_else(|| Error::Unsupported("contraction of empty letters".into()))?;
        let mut out = Form::zero(&frame);
        for (idx, v) in &self.entries {
            let mut term = comps[0][idx[0]].scale(&scalar(v));
            for s in 1..self.arity {
                if term.is_zero() {
                    break;
                }
                term = term.wedge(&comps[s][idx[s]])?;
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    /// Contract letters into an invariant scalar-valued form.
    pub fn contract(&self, setup: &HomogeneousSetup, letters: &[&Letter]) -> Result<Form<Scalar>> {
        let comps: Vec<&[Form<Scalar>]> = letters.iter().map(|l| l.components()).collect();
        let ring = setup.ring().clone();
        self.apply(&comps, |v| Scalar::constant(&ring, v.clone()))
    }
}

fn detect_symmetry(entries: &BTreeMap<Vec<usize>, Number>, arity: usize) -> Symmetry {
    if arity < 2 {
        return Symmetry::Symmetric;
    }
    let check = |sign: bool| {
        (0..arity - 1).all(|s| {
            entries.iter().all(|(idx, v)| {
                let mut sw = idx.clone();
                sw.swap(s, s + 1);
                let other = entries.get(&sw).cloned().unwrap_or_else(Number::zero);
                if sign {
                    other == v.neg()
                } else {
                    other == *v
                }
            })
        })
    };
    if check(false) {
        Symmetry::Symmetric
    } else if check(true) {
        Symmetry::Antisymmetric
    } else {
        Symmetry::None
    }
}

/// Heap's algorithm, reporting each permutation with its parity.
fn permutations(n: usize, f: &mut dyn FnMut(&[usize], bool)) {
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0; n];
    let mut odd = false;
    f(&a, odd);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            odd = !odd;
            f(&a, odd);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}
