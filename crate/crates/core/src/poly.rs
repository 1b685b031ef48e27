//! Sparse Laurent polynomials over [`Number`] with a fixed number of variables.
//!
//! Exponent vectors are compared lexicographically (variable 0 most
//! significant), which doubles as the monomial order for exact division.

use std::collections::BTreeMap;

use smallvec::SmallVec;

use crate::number::Number;

pub type Exps = SmallVec<[i16; 8]>;

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    pub(crate) terms: BTreeMap<Exps, Number>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn constant(c: Number, nvars: usize) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(SmallVec::from_elem(0, nvars), c);
        }
        p
    }

    pub fn monomial(c: Number, exps: Exps) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (&Exps, &Number)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, exps: Exps, c: Number) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(v) => {
                let s = v.add(&c);
                if s.is_zero() {
                    self.terms.remove(&exps);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (big, small) = if self.terms.len() >= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = big.clone();
        for (e, c) in &small.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn add_assign(&mut self, other: &Poly) {
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c.clone());
        }
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Number) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        if c.is_one() {
            return self.clone();
        }
        let mut out = Poly::zero();
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v.mul(c));
        }
        out
    }

    pub fn mul_monomial(&self, c: &Number, exps: &[i16]) -> Poly {
        let mut out = Poly::zero();
        for (e, v) in &self.terms {
            let ne: Exps = e.iter().zip(exps).map(|(a, b)| a + b).collect();
            out.add_term(ne, v.mul(c));
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let ne: Exps = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(ne, c1.mul(c2));
            }
        }
        out
    }

    pub fn pow(&self, n: u32, nvars: usize) -> Poly {
        let mut acc = Poly::constant(Number::one(), nvars);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn leading(&self) -> Option<(&Exps, &Number)> {
        self.terms.last_key_value()
    }

    /// Componentwise minimum exponent over all terms, restricted to `range`.
    fn min_exps(&self, nvars: usize) -> Vec<i16> {
        let mut m = vec![i16::MAX; nvars];
        for e in self.terms.keys() {
            for (slot, v) in m.iter_mut().zip(e) {
                *slot = (*slot).min(*v);
            }
        }
        m
    }

    /// Exact quotient `self / divisor` in the Laurent ring where only the
    /// variables flagged in `laurent` may carry negative exponents.
    pub fn exact_div(&self, divisor: &Poly, laurent: &[bool]) -> Option<Poly> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let nvars = laurent.len();
        // Shift Laurent variables to exponent 0 in both operands.
        let ms = self.min_exps(nvars);
        let md = divisor.min_exps(nvars);
        let shift_s: Vec<i16> = (0..nvars).map(|i| if laurent[i] { -ms[i] } else { 0 }).collect();
        let shift_d: Vec<i16> = (0..nvars).map(|i| if laurent[i] { -md[i] } else { 0 }).collect();
        let mut rem = self.mul_monomial(&Number::one(), &shift_s);
        let d = divisor.mul_monomial(&Number::one(), &shift_d);
        let (ld_e, ld_c) = {
            let (e, c) = d.leading()?;
            (e.clone(), c.clone())
        };
        let ld_inv = ld_c.inv()?;
        let mut quot = Poly::zero();
        while let Some((le, lc)) = rem.leading() {
            if le.iter().zip(&ld_e).any(|(a, b)| a < b) {
                return None;
            }
            let qe: Exps = le.iter().zip(&ld_e).map(|(a, b)| a - b).collect();
            let qc = lc.mul(&ld_inv);
            rem = rem.sub(&d.mul_monomial(&qc, &qe));
            quot.add_term(qe, qc);
        }
        // self * t^shift_s = (divisor * t^shift_d) * quot
        let back: Vec<i16> = (0..nvars).map(|i| shift_d[i] - shift_s[i]).collect();
        Some(quot.mul_monomial(&Number::one(), &back))
    }

    /// Partial derivative with respect to variable `var` (nonnegative exponent).
    pub fn derivative(&self, var: usize) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            let k = e[var];
            if k == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[var] -= 1;
            out.add_term(ne, c.scale(&crate::number::Rational::from_integer(k.into())));
        }
        out
    }

    /// Pad exponent vectors with zeros up to `nvars`.
    pub fn pad(&self, nvars: usize) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut ne = e.clone();
                    ne.resize(nvars, 0);
                    (ne, c.clone())
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(exps: &[i16]) -> Poly {
        Poly::monomial(Number::one(), exps.iter().copied().collect())
    }

    #[test]
    fn exact_division_detects_factor() {
        // (x^2 + y^2 + 1) * (x - y) / (x^2 + y^2 + 1)
        let p = x(&[2, 0]).add(&x(&[0, 2])).add(&x(&[0, 0]));
        let q = x(&[1, 0]).sub(&x(&[0, 1]));
        let prod = p.mul(&q);
        assert_eq!(prod.exact_div(&p, &[false, false]).unwrap(), q);
        assert!(q.exact_div(&p, &[false, false]).is_none());
    }

    #[test]
    fn laurent_division() {
        // (k + x^2) * k^-1 / (k + x^2) = k^-1
        let p = x(&[0, 1]).add(&x(&[2, 0]));
        let kinv = x(&[0, -1]);
        let prod = p.mul(&kinv);
        assert_eq!(prod.exact_div(&p, &[false, true]).unwrap(), kinv);
    }
}
