use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::{Float, Num, ToPrimitive};

use super::monomial::Monomial;

/// Coefficient field for polynomial arithmetic.
pub trait Coefficient:
    Clone + PartialEq + Debug + Display + FromStr + Num + Neg<Output = Self> + ToPrimitive + Send + Sync
{
}

impl<C> Coefficient for C where
    C: Clone + PartialEq + Debug + Display + FromStr + Num + Neg<Output = Self> + ToPrimitive + Send + Sync
{
}

/// Sparse polynomial, terms sorted by strictly decreasing grevlex monomial,
/// no zero coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<C> {
    terms: Vec<(Monomial, C)>,
}

impl<C: Coefficient> Polynomial<C> {
    pub fn zero() -> Self {
        Polynomial { terms: Vec::new() }
    }

    pub fn constant(c: C) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn term(m: Monomial, c: C) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Polynomial { terms: vec![(m, c)] }
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut v: Vec<(Monomial, C)> = terms.into_iter().collect();
        v.sort_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<(Monomial, C)> = Vec::with_capacity(v.len());
        for (m, c) in v {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc = lc.clone() + c,
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Polynomial { terms: out }
    }

    /// Wraps already-normalized terms (strictly decreasing, nonzero).
    pub(crate) fn from_sorted_unchecked(terms: Vec<(Monomial, C)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
        debug_assert!(terms.iter().all(|(_, c)| !c.is_zero()));
        Polynomial { terms }
    }

    pub fn terms(&self) -> &[(Monomial, C)] {
        &self.terms
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

    pub fn leading_term(&self) -> Option<&(Monomial, C)> {
        self.terms.first()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|(m, _)| m)
    }

    pub fn leading_coefficient(&self) -> Option<&C> {
        self.terms.first().map(|(_, c)| c)
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.terms.windows(2).all(|w| w[0].0.degree() == w[1].0.degree())
    }

    pub fn coefficient(&self, m: &Monomial) -> C {
        self.terms.binary_search_by(|(t, _)| m.cmp(t)).map_or_else(|_| C::zero(), |i| self.terms[i].1.clone())
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Polynomial { terms: self.terms.iter().map(|(m, a)| (m.clone(), a.clone() * c.clone())).collect() }
    }

    /// `c * m * self`.
    pub fn mul_term(&self, m: &Monomial, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        // multiplication by a monomial preserves the order
        Polynomial { terms: self.terms.iter().map(|(t, a)| (t.mul(m), a.clone() * c.clone())).collect() }
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Self {
        match self.leading_coefficient() {
            None => Self::zero(),
            Some(lc) => {
                let inv = C::one() / lc.clone();
                self.scale(&inv)
            }
        }
    }

    fn merge(&self, other: &Self, negate_other: bool) -> Self {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        let sgn = |c: &C| if negate_other { -c.clone() } else { c.clone() };
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push((b[j].0.clone(), sgn(&b[j].1)));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = a[i].1.clone() + sgn(&b[j].1);
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(m, c)| (m.clone(), sgn(c))));
        Polynomial { terms: out }
    }

    /// Evaluates at a point indexed by packed variable.
    pub fn eval<T: Float>(&self, x: &[T]) -> Option<T> {
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let mut t = T::from(c.to_f64()?)?;
            for &(v, e) in m.factors() {
                t = t * x.get(v as usize)?.powi(e as i32);
            }
            acc = acc + t;
        }
        Some(acc)
    }

    /// Largest variable index + 1 appearing in the polynomial.
    pub fn num_vars_used(&self) -> usize {
        self.terms.iter().filter_map(|(m, _)| m.factors().last().map(|&(v, _)| v as usize + 1)).max().unwrap_or(0)
    }
}

impl<C: Coefficient> Add for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn add(self, rhs: Self) -> Polynomial<C> {
        self.merge(rhs, false)
    }
}

impl<C: Coefficient> Sub for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn sub(self, rhs: Self) -> Polynomial<C> {
        self.merge(rhs, true)
    }
}

impl<C: Coefficient> Neg for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        Polynomial { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

impl<C: Coefficient> Mul for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn mul(self, rhs: Self) -> Polynomial<C> {
        let mut acc = Polynomial::zero();
        for (m, c) in &rhs.terms {
            acc = &acc + &self.mul_term(m, c);
        }
        acc
    }
}

impl<C: Coefficient> Add for Polynomial<C> {
    type Output = Polynomial<C>;
    fn add(self, rhs: Self) -> Polynomial<C> {
        &self + &rhs
    }
}

impl<C: Coefficient> Sub for Polynomial<C> {
    type Output = Polynomial<C>;
    fn sub(self, rhs: Self) -> Polynomial<C> {
        &self - &rhs
    }
}

impl<C: Coefficient> Mul for Polynomial<C> {
    type Output = Polynomial<C>;
    fn mul(self, rhs: Self) -> Polynomial<C> {
        &self * &rhs
    }
}

impl<C: Coefficient> Neg for Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    type P = Polynomial<BigRational>;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn x(v: u32) -> P {
        P::term(Monomial::var(v), q(1))
    }

    #[test]
    fn difference_of_squares() {
        let a = &x(0) + &x(1);
        let b = &x(0) - &x(1);
        let prod = &a * &b;
        let expect = P::from_terms([(Monomial::from_vars([0, 0]), q(1)), (Monomial::from_vars([1, 1]), q(-1))]);
        assert_eq!(prod, expect);
        assert!((&prod - &expect).is_zero());
    }

    #[test]
    fn leading_term_is_grevlex_max() {
        // x12 x21 - x11 x22 in 2x2 packing
        let f = P::from_terms([(Monomial::from_vars([0, 3]), q(-1)), (Monomial::from_vars([1, 2]), q(1))]);
        assert_eq!(f.leading_monomial(), Some(&Monomial::from_vars([1, 2])));
        assert_eq!(f.coefficient(&Monomial::from_vars([0, 3])), q(-1));
        assert_eq!(f.coefficient(&Monomial::from_vars([0, 0])), q(0));
    }

    #[test]
    fn eval_at_point() {
        let f = P::from_terms([(Monomial::from_vars([0, 1]), q(2)), (Monomial::one(), q(-3))]);
        assert_eq!(f.eval(&[2.0_f64, 5.0]), Some(17.0));
        assert_eq!(f.eval(&[2.0_f64]), None);
    }

    fn poly() -> impl Strategy<Value = P> {
        prop::collection::vec((prop::collection::vec(0u32..4, 0..3), -3i64..4), 0..5)
            .prop_map(|ts| P::from_terms(ts.into_iter().map(|(vs, c)| (Monomial::from_vars(vs), q(c)))))
    }

    proptest! {
        #[test]
        fn ring_axioms(a in poly(), b in poly(), c in poly()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn terms_stay_sorted(a in poly(), b in poly()) {
            let p = &a * &b;
            prop_assert!(p.terms().windows(2).all(|w| w[0].0 > w[1].0));
            prop_assert!(p.terms().iter().all(|(_, c)| *c != q(0)));
        }
    }
}
