use std::collections::{BTreeMap, HashMap};

use super::monomial::{Monomial, Var};
use super::polynomial::{Coefficient, Polynomial};
use crate::error::{input, Result};

/// Quotients and remainder of multivariate division.
#[derive(Clone, Debug, PartialEq)]
pub struct Division<C> {
    pub quotients: Vec<Polynomial<C>>,
    pub remainder: Polynomial<C>,
}

/// Finds the first divisor whose leading monomial divides a query monomial.
/// Divisors are bucketed by the smallest variable of their leading monomial.
#[derive(Clone, Debug, Default)]
pub(crate) struct LeadIndex {
    leads: Vec<Monomial>,
    by_first_var: HashMap<Var, Vec<usize>>,
    units: Vec<usize>,
}

impl LeadIndex {
    pub(crate) fn new<C: Coefficient>(divisors: &[Polynomial<C>]) -> Self {
        let mut idx = LeadIndex::default();
        for (i, g) in divisors.iter().enumerate() {
            let lm = g.leading_monomial().cloned().unwrap_or_default();
            match lm.factors().first() {
                None if !g.is_zero() => idx.units.push(i),
                None => {}
                Some(&(v, _)) => idx.by_first_var.entry(v).or_default().push(i),
            }
            idx.leads.push(lm);
        }
        idx
    }

    pub(crate) fn find(&self, m: &Monomial) -> Option<usize> {
        let mut best = self.units.first().copied();
        for &(v, _) in m.factors() {
            if let Some(bucket) = self.by_first_var.get(&v) {
                for &i in bucket {
                    if best.is_some_and(|b| b <= i) {
                        break;
                    }
                    if self.leads[i].divides(m) {
                        best = Some(i);
                        break;
                    }
                }
            }
        }
        best
    }
}

pub(crate) fn divide_indexed<C: Coefficient>(
    f: &Polynomial<C>,
    divisors: &[Polynomial<C>],
    index: &LeadIndex,
    want_quotients: bool,
) -> Division<C> {
    let mut p: BTreeMap<Monomial, C> = f.terms().iter().cloned().collect();
    let mut q: Vec<Vec<(Monomial, C)>> = vec![Vec::new(); if want_quotients { divisors.len() } else { 0 }];
    let mut rem: Vec<(Monomial, C)> = Vec::new();
    while let Some((m, c)) = p.pop_last() {
        match index.find(&m) {
            None => rem.push((m, c)),
            Some(i) => {
                let g = &divisors[i];
                let (lm, lc) = g.leading_term().expect("indexed divisor is nonzero");
                let qm = lm.quotient_of(&m).expect("index returned a divisor");
                let qc = c / lc.clone();
                for (t, a) in &g.terms()[1..] {
                    let key = t.mul(&qm);
                    let delta = a.clone() * qc.clone();
                    match p.entry(key) {
                        std::collections::btree_map::Entry::Vacant(e) => {
                            e.insert(-delta);
                        }
                        std::collections::btree_map::Entry::Occupied(mut e) => {
                            let v = e.get().clone() - delta;
                            if v.is_zero() {
                                e.remove();
                            } else {
                                *e.get_mut() = v;
                            }
                        }
                    }
                }
                if want_quotients {
                    q[i].push((qm, qc));
                }
            }
        }
    }
    Division {
        quotients: q.into_iter().map(Polynomial::from_terms).collect(),
        remainder: Polynomial::from_sorted_unchecked(rem),
    }
}

/// Multivariate division of `f` by an ordered list of divisors.
///
/// At each step the leading term of the running dividend is cancelled by the
/// first divisor whose leading monomial divides it, or moved to the remainder.
/// Satisfies `f = sum q_i g_i + r` with no term of `r` divisible by any
/// `LM(g_i)`.
pub fn divide<C: Coefficient>(f: &Polynomial<C>, divisors: &[Polynomial<C>]) -> Result<Division<C>> {
    if let Some(i) = divisors.iter().position(Polynomial::is_zero) {
        return input(format!("divisor {i} is the zero polynomial"));
    }
    Ok(divide_indexed(f, divisors, &LeadIndex::new(divisors), true))
}

/// `S(f, g) = (L / LT(f)) f - (L / LT(g)) g` with `L = lcm(LM f, LM g)`.
pub fn s_polynomial<C: Coefficient>(f: &Polynomial<C>, g: &Polynomial<C>) -> Result<Polynomial<C>> {
    let (Some((mf, cf)), Some((mg, cg))) = (f.leading_term(), g.leading_term()) else {
        return input("S-polynomial of the zero polynomial");
    };
    let l = mf.lcm(mg);
    let uf = mf.quotient_of(&l).expect("lcm is a multiple");
    let ug = mg.quotient_of(&l).expect("lcm is a multiple");
    let a = f.mul_term(&uf, &(C::one() / cf.clone()));
    let b = g.mul_term(&ug, &(C::one() / cg.clone()));
    Ok(&a - &b)
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

    fn p(ts: &[(&[u32], i64)]) -> P {
        P::from_terms(ts.iter().map(|(vs, c)| (Monomial::from_vars(vs.iter().copied()), q(*c))))
    }

    #[test]
    fn textbook_division() {
        // f = x0^2 x1 + x0 x1^2 + x1^2 by (x0 x1 - 1, x1^2 - 1)
        let f = p(&[(&[0, 0, 1], 1), (&[0, 1, 1], 1), (&[1, 1], 1)]);
        let g1 = p(&[(&[0, 1], 1), (&[], -1)]);
        let g2 = p(&[(&[1, 1], 1), (&[], -1)]);
        let d = divide(&f, &[g1.clone(), g2.clone()]).unwrap();
        let recombined = &(&(&d.quotients[0] * &g1) + &(&d.quotients[1] * &g2)) + &d.remainder;
        assert_eq!(recombined, f);
        for (m, _) in d.remainder.terms() {
            assert!(!g1.leading_monomial().unwrap().divides(m));
            assert!(!g2.leading_monomial().unwrap().divides(m));
        }
    }

    #[test]
    fn s_poly_cancels_leads() {
        let f = p(&[(&[1, 2], 1), (&[0, 3], -1)]);
        let g = p(&[(&[1, 1], 1), (&[0, 0], -1)]);
        let s = s_polynomial(&f, &g).unwrap();
        let l = f.leading_monomial().unwrap().lcm(g.leading_monomial().unwrap());
        assert_eq!(s.coefficient(&l), q(0));
        assert!(s_polynomial(&f, &P::zero()).is_err());
    }

    #[test]
    fn zero_divisor_rejected() {
        assert!(divide(&p(&[(&[0], 1)]), &[P::zero()]).is_err());
    }

    fn poly() -> impl Strategy<Value = P> {
        prop::collection::vec((prop::collection::vec(0u32..4, 0..4), -3i64..4), 1..5)
            .prop_map(|ts| P::from_terms(ts.into_iter().map(|(vs, c)| (Monomial::from_vars(vs), q(c)))))
    }

    proptest! {
        #[test]
        fn division_identity(f in poly(), g1 in poly(), g2 in poly()) {
            prop_assume!(!g1.is_zero() && !g2.is_zero());
            let gs = vec![g1, g2];
            let d = divide(&f, &gs).unwrap();
            let mut acc = d.remainder.clone();
            for (qi, gi) in d.quotients.iter().zip(&gs) {
                acc = &acc + &(qi * gi);
            }
            prop_assert_eq!(acc, f);
            for (m, _) in d.remainder.terms() {
                for g in &gs {
                    prop_assert!(!g.leading_monomial().unwrap().divides(m));
                }
            }
        }
    }
}
