//! Exact elements of a multi-quadratic number field `Q(sqrt d_1, ..., sqrt d_s)`.
//!
//! An element is stored as a sparse sum `sum_m c_m * sqrt(m)` over square-free
//! positive radicands `m`. Because distinct square-free radicands are linearly
//! independent over `Q`, this representation is canonical and the product rule
//! `sqrt(m1) * sqrt(m2) = g * sqrt(m1 m2 / g^2)` (with `g = gcd(m1, m2)`) needs no
//! external context.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;

pub type Rational = BigRational;

/// Exact algebraic number with square-root radicands.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Number {
    // sorted by radicand, coefficients nonzero
    terms: SmallVec<[(u64, Rational); 1]>,
}

impl Number {
    pub fn zero() -> Self {
        Number { terms: SmallVec::new() }
    }

    pub fn one() -> Self {
        Number::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Number::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn from_frac(n: i64, d: i64) -> Self {
        Number::from_rational(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_rational(q: Rational) -> Self {
        let mut terms = SmallVec::new();
        if !q.is_zero() {
            terms.push((1, q));
        }
        Number { terms }
    }

    /// `sqrt(d)` for a positive square-free integer `d`.
    pub fn sqrt_of(d: u64) -> Self {
        assert!(d > 0 && is_square_free(d), "sqrt radicand must be square-free");
        let mut terms = SmallVec::new();
        terms.push((d, Rational::one()));
        Number { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 1 && self.terms[0].1.is_one()
    }

    /// The rational value, if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(1, q)] => Some(q.clone()),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.terms.iter().map(|(m, q)| (*m, q))
    }

    /// Radicands appearing with nonzero coefficient.
    pub fn radicands(&self) -> impl Iterator<Item = u64> + '_ {
        self.terms.iter().map(|(m, _)| *m)
    }

    fn from_terms(mut raw: Vec<(u64, Rational)>) -> Self {
        raw.sort_by_key(|(m, _)| *m);
        let mut terms: SmallVec<[(u64, Rational); 1]> = SmallVec::new();
        for (m, q) in raw {
            match terms.last_mut() {
                Some((lm, lq)) if *lm == m => *lq += q,
                _ => terms.push((m, q)),
            }
        }
        terms.retain(|(_, q)| !q.is_zero());
        Number { terms }
    }

    pub fn add(&self, other: &Number) -> Number {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        let mut out: SmallVec<[(u64, Rational); 1]> = SmallVec::new();
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() || j < b.len() {
            if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i].clone());
                i += 1;
            } else if i >= a.len() || b[j].0 < a[i].0 {
                out.push(b[j].clone());
                j += 1;
            } else {
                let s = &a[i].1 + &b[j].1;
                if !s.is_zero() {
                    out.push((a[i].0, s));
                }
                i += 1;
                j += 1;
            }
        }
        Number { terms: out }
    }

    pub fn neg(&self) -> Number {
        Number {
            terms: self.terms.iter().map(|(m, q)| (*m, -q)).collect(),
        }
    }

    pub fn sub(&self, other: &Number) -> Number {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Number) -> Number {
        if self.is_zero() || other.is_zero() {
            return Number::zero();
        }
        if self.terms.len() == 1 && other.terms.len() == 1 {
            let (m1, q1) = &self.terms[0];
            let (m2, q2) = &other.terms[0];
            let (g, m) = radicand_product(*m1, *m2);
            let mut terms = SmallVec::new();
            terms.push((m, q1 * q2 * Rational::from_integer(BigInt::from(g))));
            return Number { terms };
        }
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (m1, q1) in &self.terms {
            for (m2, q2) in &other.terms {
                let (g, m) = radicand_product(*m1, *m2);
                raw.push((m, q1 * q2 * Rational::from_integer(BigInt::from(g))));
            }
        }
        Number::from_terms(raw)
    }

    pub fn scale(&self, q: &Rational) -> Number {
        if q.is_zero() {
            return Number::zero();
        }
        Number {
            terms: self.terms.iter().map(|(m, c)| (*m, c * q)).collect(),
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Number> {
        if self.is_zero() {
            return None;
        }
        if let Some(q) = self.as_rational() {
            return Some(Number::from_rational(q.recip()));
        }
        // Split x = y + z*sqrt(p) for a prime p dividing some radicand; then
        // x * (y - z sqrt p) = y^2 - p z^2 no longer involves sqrt(p).
        let p = self
            .terms
            .iter()
            .filter(|(m, _)| *m > 1)
            .map(|(m, _)| smallest_prime_factor(*m))
            .min()
            .expect("irrational element has a radicand > 1");
        let mut y = Vec::new();
        let mut z = Vec::new();
        for (m, q) in &self.terms {
            if m % p == 0 {
                z.push((m / p, q.clone()));
            } else {
                y.push((*m, q.clone()));
            }
        }
        let y = Number::from_terms(y);
        let z = Number::from_terms(z);
        let sp = Number::sqrt_of(p);
        let conj = y.sub(&z.mul(&sp));
        let norm = y.mul(&y).sub(&z.mul(&z).scale(&Rational::from_integer(BigInt::from(p))));
        Some(conj.mul(&norm.inv()?))
    }

    pub fn div(&self, other: &Number) -> Option<Number> {
        Some(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: u32) -> Number {
        let mut acc = Number::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Nonnegative square root of a nonnegative rational, as an element with a
    /// single square-free radicand. `None` if the radicand cannot be factored
    /// with trial division (values in this crate are small).
    pub fn sqrt_rational(q: &Rational) -> Option<Number> {
        if q.is_negative() {
            return None;
        }
        if q.is_zero() {
            return Some(Number::zero());
        }
        let n = q.numer() * q.denom();
        let (s, m) = square_free_split(&n)?;
        let m = m.to_u64()?;
        let coeff = Rational::new(s, q.denom().clone());
        let mut terms = SmallVec::new();
        terms.push((m, coeff));
        Some(Number { terms })
    }

    /// Sign of a real element (exact for rationals, via interval bounds otherwise).
    pub fn signum(&self) -> i32 {
        if let Some(q) = self.as_rational() {
            return if q.is_zero() {
                0
            } else if q.is_positive() {
                1
            } else {
                -1
            };
        }
        let v: f64 = self
            .terms
            .iter()
            .map(|(m, q)| q.to_f64().unwrap_or(0.0) * (*m as f64).sqrt())
            .sum();
        if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(m, q)| q.to_f64().unwrap_or(f64::NAN) * (*m as f64).sqrt())
            .sum()
    }

    /// Whether the element needs parentheses when used as a factor.
    pub fn is_compound(&self) -> bool {
        self.terms.len() > 1
    }
}

fn radicand_product(m1: u64, m2: u64) -> (u64, u64) {
    let g = m1.gcd(&m2);
    (g, (m1 / g) * (m2 / g))
}

pub(crate) fn is_square_free(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut n = n;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return false;
            }
        }
        p += 1;
    }
    true
}

pub(crate) fn smallest_prime_factor(n: u64) -> u64 {
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return p;
        }
        p += 1;
    }
    n
}

const TRIAL_LIMIT: u64 = 1_000_000;

/// Write `n = s^2 * m` with `m` square-free. `None` when trial division up to
/// the limit leaves a cofactor whose square-freeness cannot be decided.
fn square_free_split(n: &BigInt) -> Option<(BigInt, BigInt)> {
    let mut rest = n.clone();
    let mut s = BigInt::one();
    let mut m = BigInt::one();
    let mut p = 2u64;
    while p <= TRIAL_LIMIT {
        let bp = BigInt::from(p);
        if &bp * &bp > rest {
            break;
        }
        let mut e = 0u32;
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            e += 1;
        }
        for _ in 0..e / 2 {
            s *= &bp;
        }
        if e % 2 == 1 {
            m *= &bp;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest.is_one() {
        return Some((s, m));
    }
    let bp = BigInt::from(p);
    if &bp * &bp > rest {
        // rest is prime
        return Some((s, m * rest));
    }
    let r = rest.sqrt();
    if &r * &r == rest {
        return Some((s * r, m));
    }
    None
}

fn fmt_rational(q: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if q.denom().is_one() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

impl serde::Serialize for Number {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, q)) in self.terms.iter().enumerate() {
            let mut q = q.clone();
            if i > 0 {
                if q.is_negative() {
                    write!(f, " - ")?;
                    q = -q;
                } else {
                    write!(f, " + ")?;
                }
            }
            if *m == 1 {
                fmt_rational(&q, f)?;
            } else if q.is_one() {
                write!(f, "sqrt({m})")?;
            } else if (-&q).is_one() {
                write!(f, "-sqrt({m})")?;
            } else {
                fmt_rational(&q, f)?;
                write!(f, "*sqrt({m})")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt3_squared_is_three() {
        let s = Number::sqrt_of(3);
        assert_eq!(s.mul(&s), Number::from_int(3));
    }

    #[test]
    fn difference_of_squares() {
        let s = Number::sqrt_of(3);
        let x = Number::one().add(&s);
        let y = Number::one().sub(&s);
        assert_eq!(x.mul(&y), Number::from_int(-2));
    }

    #[test]
    fn mixed_radicands_reduce() {
        // sqrt2 * sqrt6 = 2 sqrt3
        let a = Number::sqrt_of(2).mul(&Number::sqrt_of(6));
        assert_eq!(a, Number::sqrt_of(3).scale(&Rational::from_integer(2.into())));
    }

    #[test]
    fn inverse_in_biquadratic_field() {
        let x = Number::one()
            .add(&Number::sqrt_of(2))
            .add(&Number::sqrt_of(3).scale(&Rational::new(1.into(), 2.into())));
        let inv = x.inv().unwrap();
        assert!(x.mul(&inv).is_one());
        assert!(Number::zero().inv().is_none());
    }

    #[test]
    fn rational_square_roots() {
        let q = Rational::new(BigInt::from(25), BigInt::from(4));
        assert_eq!(Number::sqrt_rational(&q).unwrap(), Number::from_frac(5, 2));
        let q = Rational::from_integer(BigInt::from(12));
        assert_eq!(
            Number::sqrt_rational(&q).unwrap(),
            Number::sqrt_of(3).scale(&Rational::from_integer(2.into()))
        );
        assert!(Number::sqrt_rational(&Rational::from_integer((-1).into())).is_none());
    }

    #[test]
    fn display_forms() {
        let x = Number::from_frac(-1, 2).add(&Number::sqrt_of(3).scale(&Rational::from_integer(2.into())));
        assert_eq!(x.to_string(), "-1/2 + 2*sqrt(3)");
        assert_eq!(Number::sqrt_of(3).neg().to_string(), "-sqrt(3)");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn number() -> impl Strategy<Value = Number> {
            prop::collection::vec((-6i64..=6, 1i64..=4), 4).prop_map(|cs| {
                [1u64, 2, 3, 6]
                    .iter()
                    .zip(cs)
                    .fold(Number::zero(), |acc, (&d, (n, q))| {
                        let c = Number::from_frac(n, q);
                        acc.add(&if d == 1 { c } else { c.mul(&Number::sqrt_of(d)) })
                    })
            })
        }

        proptest! {
            #[test]
            fn field_axioms(x in number(), y in number(), z in number()) {
                prop_assert_eq!(x.add(&y), y.add(&x));
                prop_assert_eq!(x.mul(&y), y.mul(&x));
                prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
                prop_assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
                prop_assert!(x.sub(&x).is_zero());
            }

            #[test]
            fn nonzero_elements_are_invertible(x in number()) {
                prop_assume!(!x.is_zero());
                prop_assert!(x.mul(&x.inv().unwrap()).is_one());
            }
        }
    }
}
