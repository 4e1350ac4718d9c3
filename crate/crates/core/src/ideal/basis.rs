use std::collections::HashMap;

use crate::grobner::{Coefficient, GroebnerBasis, Monomial, Var};
use crate::tensor::Dims;

/// Standard monomials of degree at most `2k`.
///
/// Ordered by degree, then lexicographically on the ascending list of
/// variable offsets, so the constant comes first and then the variables in
/// vectorization order. The first [`ThetaBasis::rows`] entries (degree at
/// most `k`) index the moment matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaBasis {
    pub k: usize,
    monomials: Vec<Monomial>,
    /// `by_degree[j]` is the number of monomials of degree at most `j`.
    by_degree: Vec<usize>,
    position: HashMap<Monomial, usize>,
}

fn lex_key(m: &Monomial) -> (u32, Vec<Var>) {
    (m.degree(), m.vars().collect())
}

impl ThetaBasis {
    pub(crate) fn from_monomials(k: usize, mut monomials: Vec<Monomial>) -> Self {
        monomials.sort_by_cached_key(lex_key);
        monomials.dedup();
        let mut by_degree = vec![0; 2 * k + 1];
        for m in &monomials {
            for slot in by_degree.iter_mut().skip(m.degree() as usize) {
                *slot += 1;
            }
        }
        let position = monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        ThetaBasis { k, monomials, by_degree, position }
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Number of monomials of degree at most `j`.
    pub fn count_up_to(&self, j: usize) -> usize {
        self.by_degree[j.min(self.by_degree.len() - 1)]
    }

    /// Moment-matrix index set `B_k`.
    pub fn rows(&self) -> &[Monomial] {
        &self.monomials[..self.count_up_to(self.k)]
    }

    pub fn position(&self, m: &Monomial) -> Option<usize> {
        self.position.get(m).copied()
    }

    /// Evaluates every basis monomial at `x` (vectorized tensor entries).
    pub fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        self.monomials
            .iter()
            .map(|m| m.factors().iter().map(|&(v, e)| x[v as usize].powi(e as i32)).product())
            .collect()
    }
}

/// Monomials of degree at most `2k` not divisible by any leading monomial of
/// `gb`, grown degree by degree from the standard monomials one degree lower.
pub fn standard_monomials_of<C: Coefficient>(gb: &GroebnerBasis<C>, dims: &Dims, k: usize) -> ThetaBasis {
    let n = dims.num_entries() as Var;
    let mut all = vec![Monomial::one()];
    let mut frontier: Vec<(Monomial, Var)> = vec![(Monomial::one(), 0)];
    for _ in 0..2 * k {
        let mut next = Vec::new();
        for (m, last) in &frontier {
            for v in *last..n {
                let cand = m.mul(&Monomial::var(v));
                if !gb.is_leading_multiple(&cand) {
                    next.push((cand, v));
                }
            }
        }
        all.extend(next.iter().map(|(m, _)| m.clone()));
        frontier = next;
    }
    ThetaBasis::from_monomials(k, all)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_degree_then_lex() {
        let b = ThetaBasis::from_monomials(
            1,
            vec![Monomial::from_vars([1, 1]), Monomial::var(3), Monomial::one(), Monomial::from_vars([0, 3])],
        );
        assert_eq!(b.monomials()[0], Monomial::one());
        assert_eq!(b.monomials()[1], Monomial::var(3));
        assert_eq!(b.monomials()[2], Monomial::from_vars([0, 3]));
        assert_eq!(b.count_up_to(1), 2);
        assert_eq!(b.rows().len(), 2);
        assert_eq!(b.position(&Monomial::from_vars([1, 1])), Some(3));
    }
}
