use std::collections::BTreeSet;

use crate::error::Result;
use crate::grobner::{Coefficient, Monomial, Polynomial, Var};
use crate::tensor::Dims;

use super::{Format, IdealSpec};

/// Minors of the ideal plus the unit-norm polynomial `g = sum x_a^2 - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSet<C> {
    pub minors: Vec<Polynomial<C>>,
    pub frobenius_poly: Polynomial<C>,
}

impl<C: Coefficient> GeneratorSet<C> {
    /// Minors followed by the unit-norm polynomial.
    pub fn all(&self) -> Vec<Polynomial<C>> {
        let mut v = self.minors.clone();
        v.push(self.frobenius_poly.clone());
        v
    }

    pub fn len(&self) -> usize {
        self.minors.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

pub(crate) fn var(dims: &Dims, idx: &[usize]) -> Var {
    dims.linear_index(idx).expect("index built in range") as Var
}

/// `x_a x_b - x_c x_d`.
pub(crate) fn binomial<C: Coefficient>(
    dims: &Dims,
    a: &[usize],
    b: &[usize],
    c: &[usize],
    d: &[usize],
) -> Polynomial<C> {
    Polynomial::from_terms([
        (Monomial::from_vars([var(dims, a), var(dims, b)]), C::one()),
        (Monomial::from_vars([var(dims, c), var(dims, d)]), -C::one()),
    ])
}

pub(crate) fn frobenius_poly<C: Coefficient>(dims: &Dims) -> Polynomial<C> {
    let n = dims.num_entries() as Var;
    Polynomial::from_terms(
        (0..n).map(|v| (Monomial::from_vars([v, v]), C::one())).chain(std::iter::once((Monomial::one(), -C::one()))),
    )
}

/// `x_a x_b - x_{a∧b} x_{a∨b}`.
pub(crate) fn meet_join_minor<C: Coefficient>(dims: &Dims, a: &[usize], b: &[usize]) -> Polynomial<C> {
    let meet: Vec<usize> = a.iter().zip(b).map(|(x, y)| *x.min(y)).collect();
    let join: Vec<usize> = a.iter().zip(b).map(|(x, y)| *x.max(y)).collect();
    binomial(dims, a, b, &meet, &join)
}

/// Subsets of `0..d` (0-based modes) as sorted vectors, by size then lex.
fn subsets(d: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> =
        (0u32..(1 << d)).map(|mask| (0..d).filter(|&i| mask & (1 << i) != 0).collect()).collect();
    out.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Swap sets `M` for a difference set `S`: nonempty, `|M| < |S|/2`, or
/// `|M| = |S|/2` containing `min S`.
fn swap_sets(s: &[usize]) -> Vec<Vec<usize>> {
    let k = s.len();
    subsets(k)
        .into_iter()
        .filter(|m| !m.is_empty())
        .filter(|m| 2 * m.len() < k || (2 * m.len() == k && m.contains(&0)))
        .map(|m| m.into_iter().map(|i| s[i]).collect())
        .collect()
}

/// Cartesian product of per-coordinate `(alpha_i, beta_i)` choices.
fn index_pairs(choices: &[Vec<(usize, usize)>]) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut acc: Vec<(Vec<usize>, Vec<usize>)> = vec![(Vec::new(), Vec::new())];
    for c in choices {
        let mut next = Vec::with_capacity(acc.len() * c.len());
        for (a, b) in &acc {
            for &(x, y) in c {
                let (mut a2, mut b2) = (a.clone(), b.clone());
                a2.push(x);
                b2.push(y);
                next.push((a2, b2));
            }
        }
        acc = next;
    }
    acc
}

/// The generating set of the ideal of rank-one unit-norm tensors: for every
/// difference set `S` (`|S| >= 2`) and swap set `M`, the minors
/// `x_a x_b - x_{a∧b} x_{a∨b}` with `a_i = b_i` off `S`, `a_j > b_j` on `M`
/// and `a_k < b_k` on `S \ M`.
pub fn full_minors<C: Coefficient>(dims: &Dims) -> Vec<Polynomial<C>> {
    let d = dims.order();
    let n = dims.sizes();
    let mut out = Vec::new();
    for s in subsets(d).into_iter().filter(|s| s.len() >= 2) {
        for m in swap_sets(&s) {
            let choices: Vec<Vec<(usize, usize)>> = (0..d)
                .map(|i| {
                    let vals = 1..=n[i];
                    if !s.contains(&i) {
                        vals.map(|v| (v, v)).collect()
                    } else if m.contains(&i) {
                        vals.clone().flat_map(|x| (1..x).map(move |y| (x, y))).collect()
                    } else {
                        vals.clone().flat_map(|x| (x + 1..=n[i]).map(move |y| (x, y))).collect()
                    }
                })
                .collect();
            for (a, b) in index_pairs(&choices) {
                out.push(meet_join_minor(dims, &a, &b));
            }
        }
    }
    out
}

/// Monic binomials are identified by their monomials.
fn support<C: Coefficient>(f: &Polynomial<C>) -> Vec<Monomial> {
    f.terms().iter().map(|(m, _)| m.clone()).collect()
}

/// All 2x2 minors of the matricization with row modes `tau` (0-based),
/// made monic and deduplicated.
pub fn matricization_minors<C: Coefficient>(dims: &Dims, tau: &[usize]) -> Vec<Polynomial<C>> {
    let d = dims.order();
    let in_tau: Vec<bool> = (0..d).map(|i| tau.contains(&i)).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let all: Vec<Vec<usize>> = dims.indices().map(|m| m.0).collect();
    for (ia, a) in all.iter().enumerate() {
        for b in &all[ia + 1..] {
            let differs = |want: bool| (0..d).any(|i| in_tau[i] == want && a[i] != b[i]);
            if !differs(true) || !differs(false) {
                continue;
            }
            let swap = |x: &[usize], y: &[usize]| -> Vec<usize> {
                (0..d).map(|i| if in_tau[i] { y[i] } else { x[i] }).collect()
            };
            let (at, bt) = (swap(a, b), swap(b, a));
            let f: Polynomial<C> = binomial(dims, a, b, &at, &bt).monic();
            if seen.insert(support(&f)) {
                out.push(f);
            }
        }
    }
    out
}

/// Minors of the ideal for `spec`. `Full` yields the Groebner generating
/// set; the other formats yield every minor of their matricizations.
pub fn generators<C: Coefficient>(spec: &IdealSpec) -> Result<GeneratorSet<C>> {
    spec.validate()?;
    let dims = &spec.dims;
    let minors = match &spec.format {
        Format::Full => full_minors(dims),
        _ => {
            let mut seen = BTreeSet::new();
            let mut out = Vec::new();
            for tau in spec.matricizations() {
                let zero_based: Vec<usize> = tau.iter().map(|m| m - 1).collect();
                for f in matricization_minors::<C>(dims, &zero_based) {
                    if seen.insert(support(&f)) {
                        out.push(f);
                    }
                }
            }
            out
        }
    };
    Ok(GeneratorSet { minors, frobenius_poly: frobenius_poly(dims) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grobner::to_text;
    use num_rational::BigRational;

    type Q = BigRational;

    fn dims(s: &str) -> Dims {
        s.parse().unwrap()
    }

    #[test]
    fn swap_set_counts() {
        // |S| = 2: {min S}; |S| = 3: three singletons; |S| = 4: 4 + 3
        assert_eq!(swap_sets(&[0, 1]), vec![vec![0]]);
        assert_eq!(swap_sets(&[0, 1, 2]).len(), 3);
        assert_eq!(swap_sets(&[0, 1, 2, 3]).len(), 7);
    }

    #[test]
    fn matrix_case_single_minor() {
        let d = dims("2x2");
        let g: Vec<Polynomial<Q>> = full_minors(&d);
        assert_eq!(g.len(), 1);
        assert_eq!(to_text(&g[0], &d), "1*x[1,2]*x[2,1] - 1*x[1,1]*x[2,2]");
    }

    #[test]
    fn unfolding_minors_2x2x2() {
        let d = dims("2x2x2");
        // X^{1} is 2x4: C(4,2) = 6 minors
        assert_eq!(matricization_minors::<Q>(&d, &[0]).len(), 6);
        // X^{1,2} is 4x2, same count
        assert_eq!(matricization_minors::<Q>(&d, &[0, 1]).len(), 6);
    }
}
