//! The coefficient ring: polynomials in fiber variables, Laurent polynomials in
//! parameters, and radical variables `u_j` with `u_j^2 = p_j`, over a
//! multi-quadratic number field.
//!
//! A [`Scalar`] is stored as `N / prod_j p_j^{m_j}` where `N` has radical
//! exponents in `{0, 1}`. Since `1/u_j = u_j / p_j`, this covers every Laurent
//! monomial in the radicals. The representation is canonical once no `p_j` with
//! `m_j > 0` divides `N`, which [`Scalar`] maintains after every operation.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::number::{is_square_free, Number, Rational};
use crate::poly::{Exps, Poly};

/// A radical variable `name` with `name^2 = relation`; the relation is a
/// polynomial in the fiber variables followed by the parameters.
#[derive(Clone, Debug)]
pub struct RadicalDecl {
    pub name: String,
    pub relation: Poly,
}

#[derive(Clone, Debug, Default)]
pub struct RingSpec {
    pub sqrt_constants: Vec<u64>,
    pub fiber_vars: Vec<String>,
    pub params: Vec<String>,
    pub radicals: Vec<RadicalDecl>,
}

#[derive(Debug)]
pub struct Ring {
    sqrt_constants: Vec<u64>,
    fiber_vars: Vec<String>,
    params: Vec<String>,
    radical_names: Vec<String>,
    // p_j padded to the full variable count
    relations: Vec<Poly>,
    laurent: Vec<bool>,
    laurent_bound: u16,
}

pub const DEFAULT_LAURENT_BOUND: u16 = 4;

impl Ring {
    pub fn new(spec: RingSpec) -> Result<Arc<Ring>> {
        let mut seen = BTreeSet::new();
        for &d in &spec.sqrt_constants {
            if d < 2 || !is_square_free(d) {
                return Err(Error::RingSpec(format!(
                    "sqrt constant {d} is not a square-free integer > 1"
                )));
            }
            if !seen.insert(d) {
                return Err(Error::RingSpec(format!("sqrt constant {d} declared twice")));
            }
        }
        let mut names = BTreeSet::new();
        let all_names = spec
            .fiber_vars
            .iter()
            .chain(&spec.params)
            .chain(spec.radicals.iter().map(|r| &r.name));
        for n in all_names {
            if n.is_empty() || !n.chars().next().unwrap().is_ascii_alphabetic() {
                return Err(Error::RingSpec(format!("invalid variable name `{n}`")));
            }
            if !names.insert(n.clone()) {
                return Err(Error::RingSpec(format!("name `{n}` declared twice")));
            }
        }
        let nf = spec.fiber_vars.len();
        let np = spec.params.len();
        let nr = spec.radicals.len();
        let nvars = nf + np + nr;
        let mut relations = Vec::new();
        for r in &spec.radicals {
            if r.relation.is_zero() {
                return Err(Error::RingSpec(format!(
                    "radical `{}` has a zero defining polynomial",
                    r.name
                )));
            }
            if r.relation.iter().any(|(e, _)| e.len() != nf + np) {
                return Err(Error::RingSpec(format!(
                    "relation of `{}` must involve only fiber variables and parameters",
                    r.name
                )));
            }
            if r.relation.iter().any(|(e, _)| e[..nf].iter().any(|&x| x < 0)) {
                return Err(Error::RingSpec(format!(
                    "relation of `{}` has negative fiber exponents",
                    r.name
                )));
            }
            relations.push(r.relation.pad(nvars));
        }
        let laurent = (0..nvars).map(|i| i >= nf && i < nf + np).collect();
        Ok(Arc::new(Ring {
            sqrt_constants: spec.sqrt_constants,
            fiber_vars: spec.fiber_vars,
            params: spec.params,
            radical_names: spec.radicals.into_iter().map(|r| r.name).collect(),
            relations,
            laurent,
            laurent_bound: DEFAULT_LAURENT_BOUND,
        }))
    }

    pub fn with_laurent_bound(self: &Arc<Ring>, n: u16) -> Arc<Ring> {
        Arc::new(Ring {
            sqrt_constants: self.sqrt_constants.clone(),
            fiber_vars: self.fiber_vars.clone(),
            params: self.params.clone(),
            radical_names: self.radical_names.clone(),
            relations: self.relations.clone(),
            laurent: self.laurent.clone(),
            laurent_bound: n,
        })
    }

    pub fn nfib(&self) -> usize {
        self.fiber_vars.len()
    }

    pub fn npar(&self) -> usize {
        self.params.len()
    }

    pub fn nrad(&self) -> usize {
        self.radical_names.len()
    }

    pub fn nvars(&self) -> usize {
        self.nfib() + self.npar() + self.nrad()
    }

    /// Which variables may carry negative exponents (the parameters).
    pub fn laurent_flags(&self) -> &[bool] {
        &self.laurent
    }

    pub fn laurent_bound(&self) -> u16 {
        self.laurent_bound
    }

    pub fn sqrt_constants(&self) -> &[u64] {
        &self.sqrt_constants
    }

    pub fn fiber_vars(&self) -> &[String] {
        &self.fiber_vars
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn radical_names(&self) -> &[String] {
        &self.radical_names
    }

    /// Defining polynomial `p_j` of radical `j`, in the full variable set.
    pub fn relation(&self, j: usize) -> &Poly {
        &self.relations[j]
    }

    fn var_name(&self, i: usize) -> &str {
        let nf = self.nfib();
        let np = self.npar();
        if i < nf {
            &self.fiber_vars[i]
        } else if i < nf + np {
            &self.params[i - nf]
        } else {
            &self.radical_names[i - nf - np]
        }
    }

    /// Whether `d` is a product of declared square-root constants.
    pub fn sqrt_is_declared(&self, d: u64) -> bool {
        if d == 1 {
            return true;
        }
        let s = self.sqrt_constants.len();
        (1u32..(1 << s)).any(|mask| {
            let mut prod = 1u64;
            for (k, c) in self.sqrt_constants.iter().enumerate() {
                if mask & (1 << k) != 0 {
                    prod = prod.saturating_mul(*c);
                }
            }
            let g = crate::number::Number::sqrt_rational(&Rational::from_integer(prod.into()));
            g.map(|n| n.radicands().all(|m| m == d)).unwrap_or(false)
        })
    }

    fn unit_exps(&self) -> Exps {
        SmallVec::from_elem(0, self.nvars())
    }

    /// Reduce radical exponents into `{0, 1}` using `u_j^2 = p_j`.
    fn reduce(&self, p: Poly) -> Poly {
        let nf = self.nfib() + self.npar();
        if self.nrad() == 0 {
            return p;
        }
        let mut out = Poly::zero();
        let mut stack: Vec<(Exps, Number)> = p.terms.into_iter().collect();
        while let Some((mut e, c)) = stack.pop() {
            let hit = (0..self.nrad()).find(|&j| e[nf + j] >= 2);
            match hit {
                None => out.add_term(e, c),
                Some(j) => {
                    e[nf + j] -= 2;
                    for (re, rc) in self.relations[j].iter() {
                        let ne: Exps = e.iter().zip(re).map(|(a, b)| a + b).collect();
                        stack.push((ne, c.mul(rc)));
                    }
                }
            }
        }
        out
    }

    fn rel_power(&self, j: usize, k: u32) -> Poly {
        self.relations[j].pow(k, self.nvars())
    }
}

/// Exact element of the coefficient ring.
#[derive(Clone)]
pub struct Scalar {
    ring: Arc<Ring>,
    num: Poly,
    den: SmallVec<[u16; 2]>,
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num && self.den == other.den
    }
}

impl Eq for Scalar {}

impl Scalar {
    pub fn zero(ring: &Arc<Ring>) -> Scalar {
        Scalar {
            ring: ring.clone(),
            num: Poly::zero(),
            den: SmallVec::from_elem(0, ring.nrad()),
        }
    }

    pub fn constant(ring: &Arc<Ring>, c: Number) -> Scalar {
        Scalar {
            ring: ring.clone(),
            num: Poly::constant(c, ring.nvars()),
            den: SmallVec::from_elem(0, ring.nrad()),
        }
    }

    pub fn from_int(ring: &Arc<Ring>, n: i64) -> Scalar {
        Scalar::constant(ring, Number::from_int(n))
    }

    pub fn one(ring: &Arc<Ring>) -> Scalar {
        Scalar::from_int(ring, 1)
    }

    fn var(ring: &Arc<Ring>, idx: usize) -> Scalar {
        let mut e = ring.unit_exps();
        e[idx] = 1;
        Scalar {
            ring: ring.clone(),
            num: Poly::monomial(Number::one(), e),
            den: SmallVec::from_elem(0, ring.nrad()),
        }
    }

    pub fn fiber(ring: &Arc<Ring>, i: usize) -> Scalar {
        assert!(i < ring.nfib());
        Scalar::var(ring, i)
    }

    pub fn param(ring: &Arc<Ring>, i: usize) -> Scalar {
        assert!(i < ring.npar());
        Scalar::var(ring, ring.nfib() + i)
    }

    pub fn radical(ring: &Arc<Ring>, j: usize) -> Scalar {
        assert!(j < ring.nrad());
        Scalar::var(ring, ring.nfib() + ring.npar() + j)
    }

    /// Build from a polynomial over fiber variables and parameters only.
    pub fn from_base_poly(ring: &Arc<Ring>, p: &Poly) -> Scalar {
        Scalar {
            ring: ring.clone(),
            num: p.pad(ring.nvars()),
            den: SmallVec::from_elem(0, ring.nrad()),
        }
    }

    /// Look up a variable by name.
    pub fn named(ring: &Arc<Ring>, name: &str) -> Option<Scalar> {
        (0..ring.nvars())
            .find(|&i| ring.var_name(i) == name)
            .map(|i| Scalar::var(ring, i))
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn den_exps(&self) -> &[u16] {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.as_number().is_some_and(|c| c.is_one())
    }

    /// The value if the scalar is a constant of the number field.
    pub fn as_number(&self) -> Option<Number> {
        if self.den.iter().any(|&m| m > 0) {
            return None;
        }
        match self.num.len() {
            0 => Some(Number::zero()),
            1 => {
                let (e, c) = self.num.leading().unwrap();
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Whether the scalar involves any fiber variable.
    pub fn depends_on_fiber(&self) -> bool {
        let nf = self.ring.nfib();
        let np = self.ring.npar();
        let nr = self.ring.nrad();
        // radicals whose relation involves fiber variables count as well
        let radical_fiber: Vec<bool> = (0..nr)
            .map(|j| {
                self.ring.relations[j]
                    .iter()
                    .any(|(e, _)| e[..nf].iter().any(|&x| x != 0))
            })
            .collect();
        self.num.iter().any(|(e, _)| {
            e[..nf].iter().any(|&x| x != 0)
                || (0..nr).any(|j| e[nf + np + j] != 0 && radical_fiber[j])
        }) || (0..nr).any(|j| self.den[j] > 0 && radical_fiber[j])
    }

    /// Parameters that occur in the scalar (including through radicals).
    pub fn params_used(&self) -> BTreeSet<usize> {
        let nf = self.ring.nfib();
        let np = self.ring.npar();
        let nr = self.ring.nrad();
        let mut out = BTreeSet::new();
        let mut rad_used = vec![false; nr];
        for (e, _) in self.num.iter() {
            for k in 0..np {
                if e[nf + k] != 0 {
                    out.insert(k);
                }
            }
            for j in 0..nr {
                if e[nf + np + j] != 0 {
                    rad_used[j] = true;
                }
            }
        }
        for j in 0..nr {
            if rad_used[j] || self.den[j] > 0 {
                for (e, _) in self.ring.relations[j].iter() {
                    for k in 0..np {
                        if e[nf + k] != 0 {
                            out.insert(k);
                        }
                    }
                }
            }
        }
        out
    }

    fn check_ring(&self, other: &Scalar) {
        debug_assert!(Arc::ptr_eq(&self.ring, &other.ring), "scalars from different rings");
    }

    fn canonical(ring: &Arc<Ring>, mut num: Poly, mut den: SmallVec<[u16; 2]>) -> Scalar {
        if num.is_zero() {
            return Scalar::zero(ring);
        }
        for j in 0..den.len() {
            while den[j] > 0 {
                match num.exact_div(&ring.relations[j], &ring.laurent) {
                    Some(q) => {
                        num = q;
                        den[j] -= 1;
                    }
                    None => break,
                }
            }
        }
        Scalar {
            ring: ring.clone(),
            num,
            den,
        }
    }

    /// `num / prod p_j^{den_j}` where negative exponents multiply the numerator.
    fn from_parts(ring: &Arc<Ring>, num: Poly, den: &[i32]) -> Scalar {
        let mut num = num;
        let mut d: SmallVec<[u16; 2]> = SmallVec::new();
        for (j, &m) in den.iter().enumerate() {
            if m < 0 {
                num = ring.reduce(num.mul(&ring.rel_power(j, (-m) as u32)));
                d.push(0);
            } else {
                d.push(m as u16);
            }
        }
        Scalar::canonical(ring, num, d)
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        self.check_ring(other);
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        if self.den == other.den {
            return Scalar::canonical(&self.ring, self.num.add(&other.num), self.den.clone());
        }
        let mut n1 = self.num.clone();
        let mut n2 = other.num.clone();
        let mut den = SmallVec::new();
        for j in 0..self.den.len() {
            let (a, b) = (self.den[j], other.den[j]);
            let m = a.max(b);
            if m > a {
                n1 = self.ring.reduce(n1.mul(&self.ring.rel_power(j, (m - a) as u32)));
            }
            if m > b {
                n2 = self.ring.reduce(n2.mul(&self.ring.rel_power(j, (m - b) as u32)));
            }
            den.push(m);
        }
        Scalar::canonical(&self.ring, n1.add(&n2), den)
    }

    pub fn neg(&self) -> Scalar {
        Scalar {
            ring: self.ring.clone(),
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        self.check_ring(other);
        if self.is_zero() || other.is_zero() {
            return Scalar::zero(&self.ring);
        }
        if let Some(c) = other.as_number() {
            return self.scale(&c);
        }
        if let Some(c) = self.as_number() {
            return other.scale(&c);
        }
        let num = self.ring.reduce(self.num.mul(&other.num));
        let den = self.den.iter().zip(&other.den).map(|(a, b)| a + b).collect();
        Scalar::canonical(&self.ring, num, den)
    }

    pub fn scale(&self, c: &Number) -> Scalar {
        if c.is_zero() {
            return Scalar::zero(&self.ring);
        }
        Scalar {
            ring: self.ring.clone(),
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn pow(&self, n: u32) -> Scalar {
        let mut acc = Scalar::one(&self.ring);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Inverse of a unit: a product of a nonzero constant, a parameter
    /// monomial, radicals and defining polynomials `p_j`.
    pub fn inv(&self) -> Result<Scalar> {
        let ring = &self.ring;
        if self.is_zero() {
            return Err(Error::NonInvertible("0".into()));
        }
        let mut num = self.num.clone();
        let mut den: Vec<i32> = self.den.iter().map(|&m| m as i32).collect();
        for j in 0..ring.nrad() {
            while num.len() > 1 {
                match num.exact_div(&ring.relations[j], &ring.laurent) {
                    Some(q) => {
                        num = q;
                        den[j] -= 1;
                    }
                    None => break,
                }
            }
        }
        let nf = ring.nfib();
        let np = ring.npar();
        if num.len() != 1 {
            return Err(Error::NonInvertible(self.to_string()));
        }
        let (e, c) = num.leading().unwrap();
        if e[..nf].iter().any(|&x| x != 0) {
            return Err(Error::NonInvertible(self.to_string()));
        }
        // 1 / (c * t^e * u^S * prod p^{-den}) = c^-1 t^-e u^S prod p^{den - [j in S]}
        let mut ie = ring.unit_exps();
        for k in 0..np {
            ie[nf + k] = -e[nf + k];
        }
        let mut new_den: Vec<i32> = den.iter().map(|m| -m).collect();
        for j in 0..ring.nrad() {
            if e[nf + np + j] == 1 {
                ie[nf + np + j] = 1;
                new_den[j] += 1;
            }
        }
        let inv_c = c.inv().expect("nonzero leading coefficient");
        if new_den.iter().any(|&m| m > ring.laurent_bound as i32) {
            return Err(Error::NonInvertible(format!(
                "{self}: radical exponent exceeds the Laurent bound"
            )));
        }
        Ok(Scalar::from_parts(ring, Poly::monomial(inv_c, ie), &new_den))
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        Ok(self.mul(&other.inv()?))
    }

    /// Partial derivative along fiber variable `var`.
    pub fn differentiate(&self, var: usize) -> Scalar {
        let ring = &self.ring;
        assert!(var < ring.nfib(), "can only differentiate along fiber variables");
        let nr = ring.nrad();
        let base = ring.nfib() + ring.npar();
        // d(N / P) = (dN_plain + sum_j (N_{u_j}/2 - m_j N) dp_j / p_j) / P
        let mut acc = Scalar::canonical(ring, self.num.derivative(var), self.den.clone());
        for j in 0..nr {
            let dp = ring.relations[j].derivative(var);
            if dp.is_zero() {
                continue;
            }
            let mut part = Poly::zero();
            for (e, c) in self.num.iter() {
                let mut coef = Number::zero();
                if e[base + j] == 1 {
                    coef = coef.add(&Number::from_frac(1, 2));
                }
                if self.den[j] > 0 {
                    coef = coef.sub(&Number::from_int(self.den[j] as i64));
                }
                if !coef.is_zero() {
                    part.add_term(e.clone(), c.mul(&coef));
                }
            }
            if part.is_zero() {
                continue;
            }
            let mut den = self.den.clone();
            den[j] += 1;
            let term = Scalar::canonical(ring, ring.reduce(part.mul(&dp)), den);
            acc = acc.add(&term);
        }
        acc
    }

    pub fn evaluate(&self, pt: &Point) -> Result<Number> {
        let ring = &self.ring;
        let nf = ring.nfib();
        let np = ring.npar();
        let mut missing = BTreeSet::new();
        let mut total = Number::zero();
        for (e, c) in self.num.iter() {
            let mut v = c.clone();
            for i in 0..nf {
                if e[i] > 0 {
                    v = v.mul(&pt.fiber[i].pow(e[i] as u32));
                }
            }
            for k in 0..np {
                let ex = e[nf + k];
                if ex == 0 {
                    continue;
                }
                match &pt.params[k] {
                    None => {
                        missing.insert(ring.params[k].clone());
                    }
                    Some(p) => {
                        let pv = if ex > 0 {
                            p.pow(ex as u32)
                        } else {
                            p.inv().ok_or(Error::DenominatorVanishes)?.pow((-ex) as u32)
                        };
                        v = v.mul(&pv);
                    }
                }
            }
            for j in 0..ring.nrad() {
                if e[nf + np + j] > 0 {
                    v = v.mul(pt.radical_value(j)?);
                }
            }
            total = total.add(&v);
        }
        if !missing.is_empty() {
            return Err(Error::UnassignedParameter(missing.into_iter().collect()));
        }
        for j in 0..ring.nrad() {
            if self.den[j] > 0 {
                let p = pt.relation_value(j)?;
                if p.is_zero() {
                    return Err(Error::DenominatorVanishes);
                }
                total = total.mul(&p.pow(self.den[j] as u32).inv().unwrap());
            }
        }
        Ok(total)
    }

    /// Substitute values for some parameters, leaving the rest symbolic.
    pub fn substitute_params(&self, values: &[Option<Number>]) -> Result<Scalar> {
        let ring = &self.ring;
        let nf = ring.nfib();
        let np = ring.npar();
        let mut num = Poly::zero();
        for (e, c) in self.num.iter() {
            let mut ne = e.clone();
            let mut v = c.clone();
            for k in 0..np {
                if let Some(p) = &values[k] {
                    let ex = e[nf + k];
                    if ex > 0 {
                        v = v.mul(&p.pow(ex as u32));
                    } else if ex < 0 {
                        v = v.mul(&p.inv().ok_or(Error::DenominatorVanishes)?.pow((-ex) as u32));
                    }
                    ne[nf + k] = 0;
                }
            }
            num.add_term(ne, v);
        }
        if ring.relations.iter().any(|r| {
            r.iter()
                .any(|(e, _)| (0..np).any(|k| values[k].is_some() && e[nf + k] != 0))
        }) {
            return Err(Error::Unsupported(
                "substituting a parameter that occurs in a radical relation".into(),
            ));
        }
        Ok(Scalar::canonical(ring, num, self.den.clone()))
    }

    fn fmt_term(&self, e: &Exps, c: &Number, first: bool, out: &mut String) {
        let ring = &self.ring;
        let nf = ring.nfib();
        let np = ring.npar();
        let mut factors = Vec::new();
        for i in 0..ring.nvars() {
            let mut ex = e[i] as i32;
            if i >= nf + np {
                ex -= 2 * self.den[i - nf - np] as i32;
            }
            match ex {
                0 => {}
                1 => factors.push(ring.var_name(i).to_string()),
                _ => factors.push(format!("{}^{}", ring.var_name(i), ex)),
            }
        }
        let (neg, mag) = if c.is_compound() || c.signum() >= 0 {
            (false, c.clone())
        } else {
            (true, c.neg())
        };
        if first {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let cs = if mag.is_compound() {
            format!("({mag})")
        } else {
            mag.to_string()
        };
        if factors.is_empty() {
            out.push_str(&cs);
        } else if mag.is_one() {
            out.push_str(&factors.join("*"));
        } else {
            out.push_str(&cs);
            out.push('*');
            out.push_str(&factors.join("*"));
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut s = String::new();
        // highest monomials first
        for (i, (e, c)) in self.num.iter().rev().enumerate() {
            self.fmt_term(e, c, i == 0, &mut s);
        }
        f.write_str(&s)
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

/// An evaluation point: values for the fiber variables and optionally for
/// the parameters. Radical values are fixed on the nonnegative branch.
#[derive(Clone, Debug)]
pub struct Point {
    fiber: Vec<Number>,
    params: Vec<Option<Number>>,
    radicals: Vec<Result<Number>>,
    relation_values: Vec<Result<Number>>,
}

impl Point {
    pub fn new(ring: &Arc<Ring>, fiber: Vec<Number>, params: Vec<Option<Number>>) -> Result<Point> {
        if fiber.len() != ring.nfib() || params.len() != ring.npar() {
            return Err(Error::PointRejected(format!(
                "expected {} fiber values and {} parameter values",
                ring.nfib(),
                ring.npar()
            )));
        }
        let mut pt = Point {
            fiber,
            params,
            radicals: Vec::new(),
            relation_values: Vec::new(),
        };
        for j in 0..ring.nrad() {
            let p = Scalar::canonical(ring, ring.relations[j].clone(), SmallVec::from_elem(0, ring.nrad()));
            let pv = p.evaluate(&pt);
            let root = match &pv {
                Err(e) => Err(e.clone()),
                Ok(v) => Point::root(ring, j, v),
            };
            if let Err(Error::PointRejected(m)) = &root {
                return Err(Error::PointRejected(m.clone()));
            }
            pt.relation_values.push(pv);
            pt.radicals.push(root);
        }
        Ok(pt)
    }

    /// Point with every fiber coordinate rational and no parameters assigned.
    pub fn fiber_only(ring: &Arc<Ring>, fiber: Vec<Number>) -> Result<Point> {
        let np = ring.npar();
        Point::new(ring, fiber, vec![None; np])
    }

    pub fn origin(ring: &Arc<Ring>) -> Result<Point> {
        Point::fiber_only(ring, vec![Number::zero(); ring.nfib()])
    }

    fn root(ring: &Ring, j: usize, v: &Number) -> Result<Number> {
        let name = &ring.radical_names[j];
        let q = v.as_rational().ok_or_else(|| {
            Error::PointRejected(format!("value of `{name}`^2 = {v} is not rational"))
        })?;
        let r = Number::sqrt_rational(&q).ok_or_else(|| {
            Error::PointRejected(format!("`{name}`^2 = {v} has no real square root"))
        })?;
        if r.radicands().all(|d| ring.sqrt_is_declared(d)) {
            Ok(r)
        } else {
            Err(Error::PointRejected(format!(
                "`{name}`^2 = {v} is not a square in the coefficient field"
            )))
        }
    }

    pub fn fiber(&self) -> &[Number] {
        &self.fiber
    }

    pub fn params(&self) -> &[Option<Number>] {
        &self.params
    }

    fn radical_value(&self, j: usize) -> Result<&Number> {
        self.radicals[j].as_ref().map_err(|e| e.clone())
    }

    fn relation_value(&self, j: usize) -> Result<&Number> {
        self.relation_values[j].as_ref().map_err(|e| e.clone())
    }
}

/// A raw ring expression prior to normalization.
#[derive(Clone, Debug)]
pub enum ScalarExpr {
    Num(Number),
    Var(String),
    Add(Box<ScalarExpr>, Box<ScalarExpr>),
    Sub(Box<ScalarExpr>, Box<ScalarExpr>),
    Mul(Box<ScalarExpr>, Box<ScalarExpr>),
    Div(Box<ScalarExpr>, Box<ScalarExpr>),
    Neg(Box<ScalarExpr>),
    Pow(Box<ScalarExpr>, u32),
}

pub fn normalize(ring: &Arc<Ring>, x: &ScalarExpr) -> Result<Scalar> {
    Ok(match x {
        ScalarExpr::Num(n) => Scalar::constant(ring, n.clone()),
        ScalarExpr::Var(name) => {
            Scalar::named(ring, name).ok_or_else(|| Error::UnknownName(name.clone()))?
        }
        ScalarExpr::Add(a, b) => normalize(ring, a)?.add(&normalize(ring, b)?),
        ScalarExpr::Sub(a, b) => normalize(ring, a)?.sub(&normalize(ring, b)?),
        ScalarExpr::Mul(a, b) => normalize(ring, a)?.mul(&normalize(ring, b)?),
        ScalarExpr::Div(a, b) => normalize(ring, a)?.div(&normalize(ring, b)?)?,
        ScalarExpr::Neg(a) => normalize(ring, a)?.neg(),
        ScalarExpr::Pow(a, n) => normalize(ring, a)?.pow(*n),
    })
}

/// `sum_i x_i^2` over the fiber variables, as a base polynomial.
pub fn norm_squared_poly(nfib: usize, npar: usize) -> Poly {
    let mut p = Poly::zero();
    for i in 0..nfib {
        let mut e: Exps = SmallVec::from_elem(0, nfib + npar);
        e[i] = 2;
        p.add_term(e, Number::one());
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Fiber a1..a4, parameter k, radical u^2 = k + aa.
    fn test_ring() -> Arc<Ring> {
        let mut rel = norm_squared_poly(4, 1);
        let mut e: Exps = SmallVec::from_elem(0, 5);
        e[4] = 1;
        rel.add_term(e, Number::one());
        Ring::new(RingSpec {
            sqrt_constants: vec![3],
            fiber_vars: (1..=4).map(|i| format!("a{i}")).collect(),
            params: vec!["k".into()],
            radicals: vec![RadicalDecl {
                name: "u".into(),
                relation: rel,
            }],
        })
        .unwrap()
    }

    fn aa(r: &Arc<Ring>) -> Scalar {
        (0..4).fold(Scalar::zero(r), |acc, i| {
            acc.add(&Scalar::fiber(r, i).pow(2))
        })
    }

    #[test]
    fn sqrt_constant_squares() {
        let r = test_ring();
        let s3 = Scalar::constant(&r, Number::sqrt_of(3));
        assert_eq!(s3.mul(&s3), Scalar::from_int(&r, 3));
        let one = Scalar::one(&r);
        let x = one.add(&s3).mul(&one.sub(&s3));
        assert_eq!(x, Scalar::from_int(&r, -2));
    }

    #[test]
    fn radical_relation_reduces() {
        let r = test_ring();
        let u = Scalar::radical(&r, 0);
        let k = Scalar::param(&r, 0);
        assert!(u.mul(&u).sub(&k.add(&aa(&r))).is_zero());
    }

    #[test]
    fn derivative_of_radical() {
        let r = test_ring();
        let u = Scalar::radical(&r, 0);
        let du = u.differentiate(0);
        let expected = Scalar::fiber(&r, 0).mul(&u.inv().unwrap());
        assert_eq!(du, expected);
        // oracle: differentiate u^2 = p on both sides, 2 u du = dp
        let lhs = u.mul(&du).scale(&Number::from_int(2));
        assert_eq!(lhs, Scalar::fiber(&r, 0).scale(&Number::from_int(2)));
    }

    #[test]
    fn power_rule_and_constants() {
        let r = test_ring();
        let a1 = Scalar::fiber(&r, 0);
        let a2 = Scalar::fiber(&r, 1);
        let x = a1.pow(2).mul(&a2);
        assert_eq!(x.differentiate(0), a1.mul(&a2).scale(&Number::from_int(2)));
        let y = a1.scale(&Number::sqrt_of(3));
        assert!(y.differentiate(1).is_zero());
    }

    #[test]
    fn inverse_of_units() {
        let r = test_ring();
        let u = Scalar::radical(&r, 0);
        let k = Scalar::param(&r, 0);
        for x in [u.clone(), u.pow(3), k.clone(), u.mul(&u).mul(&k), u.mul(&k).scale(&Number::sqrt_of(3))] {
            let xi = x.inv().unwrap();
            assert!(x.mul(&xi).is_one(), "{x} * {xi}");
        }
        let a1 = Scalar::fiber(&r, 0);
        assert!(matches!(a1.inv(), Err(Error::NonInvertible(_))));
        assert!(matches!(a1.add(&k).inv(), Err(Error::NonInvertible(_))));
    }

    #[test]
    fn evaluation() {
        let r = test_ring();
        let pt = Point::new(
            &r,
            vec![Number::from_int(1), Number::zero(), Number::zero(), Number::zero()],
            vec![Some(Number::zero())],
        )
        .unwrap();
        assert_eq!(aa(&r).evaluate(&pt).unwrap(), Number::one());
        assert_eq!(Scalar::radical(&r, 0).evaluate(&pt).unwrap(), Number::one());
        let pt2 = Point::new(
            &r,
            vec![Number::from_int(2), Number::zero(), Number::zero(), Number::zero()],
            vec![None],
        )
        .unwrap();
        let y = Scalar::fiber(&r, 0).scale(&Number::sqrt_of(3));
        assert_eq!(y.evaluate(&pt2).unwrap(), Number::sqrt_of(3).scale(&Rational::from_integer(2.into())));
        let k = Scalar::param(&r, 0);
        assert_eq!(
            k.evaluate(&pt2),
            Err(Error::UnassignedParameter(vec!["k".into()]))
        );
    }

    #[test]
    fn display_uses_radical_powers() {
        let r = test_ring();
        let u = Scalar::radical(&r, 0);
        assert_eq!(u.inv().unwrap().to_string(), "u^-1");
        assert_eq!(Scalar::fiber(&r, 0).scale(&Number::from_int(-2)).to_string(), "-2*a1");
    }

    #[test]
    fn rejects_bad_specs() {
        let bad = Ring::new(RingSpec {
            sqrt_constants: vec![4],
            ..Default::default()
        });
        assert!(matches!(bad, Err(Error::RingSpec(_))));
        let dup = Ring::new(RingSpec {
            fiber_vars: vec!["a".into(), "a".into()],
            ..Default::default()
        });
        assert!(matches!(dup, Err(Error::RingSpec(_))));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn shared() -> Arc<Ring> {
            static RING: std::sync::OnceLock<Arc<Ring>> = std::sync::OnceLock::new();
            RING.get_or_init(test_ring).clone()
        }

        // small combinations of a1, a2, k, 1/k, u and 1/u
        fn scalar(r: Arc<Ring>) -> impl Strategy<Value = Scalar> {
            prop::collection::vec((-3i64..=3, 0usize..6, 0u32..3), 1..4).prop_map(move |ts| {
                ts.into_iter().fold(Scalar::zero(&r), |acc, (c, g, e)| {
                    let base = match g {
                        0 => Scalar::fiber(&r, 0),
                        1 => Scalar::fiber(&r, 1),
                        2 => Scalar::param(&r, 0),
                        3 => Scalar::param(&r, 0).inv().unwrap(),
                        4 => Scalar::radical(&r, 0),
                        _ => Scalar::radical(&r, 0).inv().unwrap(),
                    };
                    acc.add(&base.pow(e).scale(&Number::from_int(c)))
                })
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn ring_axioms(
                (x, y, z) in (scalar(shared()), scalar(shared()), scalar(shared()))
            ) {
                prop_assert_eq!(x.mul(&y), y.mul(&x));
                prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
                prop_assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
                prop_assert!(x.sub(&x).is_zero());
            }

            #[test]
            fn evaluation_is_a_homomorphism(
                (x, y) in (scalar(shared()), scalar(shared())),
                a in prop::collection::vec(-3i64..=3, 4),
                k in 1i64..4,
            ) {
                let r = x.ring().clone();
                let fib: Vec<Number> = a.iter().map(|&v| Number::from_int(v)).collect();
                let pt = Point::new(&r, fib, vec![Some(Number::from_int(k))]);
                // points where k + aa is not a square are rejected
                prop_assume!(pt.is_ok());
                let pt = pt.unwrap();
                let (ex, ey) = (x.evaluate(&pt).unwrap(), y.evaluate(&pt).unwrap());
                prop_assert_eq!(x.mul(&y).evaluate(&pt).unwrap(), ex.mul(&ey));
                prop_assert_eq!(x.add(&y).evaluate(&pt).unwrap(), ex.add(&ey));
            }

            #[test]
            fn derivative_is_a_derivation((x, y) in (scalar(shared()), scalar(shared())), v in 0usize..4) {
                let lhs = x.mul(&y).differentiate(v);
                let rhs = x.differentiate(v).mul(&y).add(&x.mul(&y.differentiate(v)));
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}
