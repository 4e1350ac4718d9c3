use rayon::prelude::*;
use serde::Serialize;

use super::division::{divide_indexed, Division, LeadIndex};
use super::monomial::Monomial;
use super::polynomial::{Coefficient, Polynomial};
use crate::error::{input, Error, Result};

/// Outcome of checking Buchberger's criterion on a generating set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BuchbergerReport {
    pub passes: bool,
    /// Lexicographically smallest pair `(i, j)`, `i < j`, whose S-polynomial
    /// leaves a nonzero remainder.
    pub failing_pair: Option<(usize, usize)>,
    pub pairs: usize,
    pub coprime_skipped: usize,
}

/// Checks that every S-polynomial `S(g_i, g_j)` reduces to zero modulo the
/// set (in the given order). Pairs with coprime leading monomials are skipped.
pub fn buchberger_check<C: Coefficient>(gens: &[Polynomial<C>]) -> Result<BuchbergerReport> {
    if let Some(i) = gens.iter().position(Polynomial::is_zero) {
        return input(format!("generator {i} is the zero polynomial"));
    }
    let index = LeadIndex::new(gens);
    let leads: Vec<&Monomial> = gens.iter().map(|g| g.leading_monomial().expect("nonzero")).collect();
    let n = gens.len();
    let mut pairs = Vec::new();
    let mut coprime = 0;
    for i in 0..n {
        for j in i + 1..n {
            if leads[i].coprime(leads[j]) {
                coprime += 1;
            } else {
                pairs.push((i, j));
            }
        }
    }
    let failing = pairs
        .par_iter()
        .find_first(|&&(i, j)| {
            let s = super::division::s_polynomial(&gens[i], &gens[j]).expect("nonzero generators");
            !divide_indexed(&s, gens, &index, false).remainder.is_zero()
        })
        .copied();
    Ok(BuchbergerReport {
        passes: failing.is_none(),
        failing_pair: failing,
        pairs: n * n.saturating_sub(1) / 2,
        coprime_skipped: coprime,
    })
}

/// True when every generator is monic and no term of `g_i` is divisible by
/// `LM(g_j)` for `j != i`.
pub fn is_reduced<C: Coefficient>(gens: &[Polynomial<C>]) -> bool {
    if gens.iter().any(|g| g.leading_coefficient() != Some(&C::one())) {
        return false;
    }
    let leads: Vec<&Monomial> = gens.iter().filter_map(Polynomial::leading_monomial).collect();
    gens.par_iter()
        .enumerate()
        .all(|(i, g)| g.terms().iter().all(|(m, _)| leads.iter().enumerate().all(|(j, l)| j == i || !l.divides(m))))
}

/// A generating set that has passed Buchberger's criterion. Generators are
/// kept sorted by decreasing leading monomial.
#[derive(Clone, Debug)]
pub struct GroebnerBasis<C> {
    gens: Vec<Polynomial<C>>,
    index: LeadIndex,
}

impl<C: Coefficient> GroebnerBasis<C> {
    /// Sorts the generators by decreasing leading monomial and verifies
    /// Buchberger's criterion. On failure the reported indices refer to the
    /// sorted order.
    pub fn certify(mut gens: Vec<Polynomial<C>>) -> Result<Self> {
        gens.sort_by(|a, b| b.leading_monomial().cmp(&a.leading_monomial()));
        let report = buchberger_check(&gens)?;
        if let Some((i, j)) = report.failing_pair {
            return Err(Error::NotGroebner(i, j));
        }
        let index = LeadIndex::new(&gens);
        Ok(GroebnerBasis { gens, index })
    }

    pub fn generators(&self) -> &[Polynomial<C>] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn leading_monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.gens.iter().filter_map(Polynomial::leading_monomial)
    }

    /// True if some leading monomial divides `m`.
    pub fn is_leading_multiple(&self, m: &Monomial) -> bool {
        self.index.find(m).is_some()
    }

    /// Unique remainder of `f` modulo the ideal.
    pub fn normal_form(&self, f: &Polynomial<C>) -> Polynomial<C> {
        divide_indexed(f, &self.gens, &self.index, false).remainder
    }

    /// Full division, quotients indexed like [`Self::generators`].
    pub fn reduce(&self, f: &Polynomial<C>) -> Division<C> {
        divide_indexed(f, &self.gens, &self.index, true)
    }

    pub fn contains(&self, f: &Polynomial<C>) -> bool {
        self.normal_form(f).is_zero()
    }

    pub fn is_reduced(&self) -> bool {
        is_reduced(&self.gens)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type P = Polynomial<BigRational>;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn p(ts: &[(&[u32], i64)]) -> P {
        P::from_terms(ts.iter().map(|(vs, c)| (Monomial::from_vars(vs.iter().copied()), q(*c))))
    }

    #[test]
    fn single_2x2_minor_is_a_basis() {
        // x12 x21 - x11 x22
        let f = p(&[(&[1, 2], 1), (&[0, 3], -1)]);
        let gb = GroebnerBasis::certify(vec![f.clone()]).unwrap();
        assert!(gb.is_reduced());
        assert!(gb.contains(&(&f * &p(&[(&[0], 3), (&[], 1)]))));
        assert!(!gb.contains(&p(&[(&[0, 3], 1)])));
    }

    #[test]
    fn non_basis_reports_pair() {
        // {x0^2 - x1, x0 x1 - 1}: S-pair leaves x1^2 - x0
        let a = p(&[(&[0, 0], 1), (&[1], -1)]);
        let b = p(&[(&[0, 1], 1), (&[], -1)]);
        let r = buchberger_check(&[a.clone(), b.clone()]).unwrap();
        assert!(!r.passes);
        assert_eq!(r.failing_pair, Some((0, 1)));
        assert!(matches!(GroebnerBasis::certify(vec![a, b]), Err(Error::NotGroebner(0, 1))));
    }

    #[test]
    fn reducedness_detects_divisible_tail() {
        let a = p(&[(&[0, 1], 1), (&[2, 2], -1)]);
        let b = p(&[(&[2, 2], 1), (&[3], -1)]);
        assert!(!is_reduced(&[a.clone(), b.clone()]));
        assert!(is_reduced(std::slice::from_ref(&b)));
        assert!(!is_reduced(&[b.scale(&q(2))]));
    }
}
