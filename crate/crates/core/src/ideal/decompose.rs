use crate::error::{input, Result};
use crate::grobner::{Coefficient, Polynomial};
use crate::tensor::Dims;

use super::generators::binomial;
use super::Format;

/// A minor `x_a x_b - x_{a^T} x_{b^T}`, where `a^T` takes the coordinates in
/// `swap` from `b`. Indices are 1-based, modes 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Minor {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub swap: Vec<usize>,
}

impl Minor {
    fn swapped(&self) -> (Vec<usize>, Vec<usize>) {
        let mut at = self.a.clone();
        let mut bt = self.b.clone();
        for &i in &self.swap {
            at[i] = self.b[i];
            bt[i] = self.a[i];
        }
        (at, bt)
    }

    /// Coordinates where `a` and `b` differ.
    pub fn difference(&self) -> Vec<usize> {
        (0..self.a.len()).filter(|&i| self.a[i] != self.b[i]).collect()
    }

    pub fn to_poly<C: Coefficient>(&self, dims: &Dims) -> Polynomial<C> {
        let (at, bt) = self.swapped();
        binomial(dims, &self.a, &self.b, &at, &bt)
    }

    /// True if this is a minor of the matricization with row modes `sigma`
    /// (0-based).
    pub fn belongs_to(&self, sigma: &[usize]) -> bool {
        let d = self.difference();
        let on: Vec<usize> = d.iter().copied().filter(|i| sigma.contains(i)).collect();
        let off: Vec<usize> = d.iter().copied().filter(|i| !sigma.contains(i)).collect();
        let mut t = self.swap.clone();
        t.sort_unstable();
        on == t || off == t
    }
}

/// Reads `c * (x_a x_b - x_p x_q)` as a minor, inferring the swap set.
pub fn parse_minor<C: Coefficient>(f: &Polynomial<C>, dims: &Dims) -> Result<(Minor, C)> {
    let t = f.terms();
    if t.len() != 2 || t[0].1.clone() + t[1].1.clone() != C::zero() {
        return input("not a two-term binomial with opposite coefficients");
    }
    let pair = |k: usize| -> Result<(Vec<usize>, Vec<usize>)> {
        let vs: Vec<_> = t[k].0.vars().collect();
        if vs.len() != 2 {
            return input("minor terms must be quadratic");
        }
        Ok((dims.multi_index(vs[0] as usize).0, dims.multi_index(vs[1] as usize).0))
    };
    let (a, b) = pair(0)?;
    let (p, q) = pair(1)?;
    for (c, _) in [(&p, &q), (&q, &p)] {
        let swap: Vec<usize> = (0..a.len()).filter(|&i| a[i] != b[i] && c[i] == b[i]).collect();
        let m = Minor { a: a.clone(), b: b.clone(), swap };
        let (at, bt) = m.swapped();
        let diff = m.difference().len();
        if !m.swap.is_empty() && m.swap.len() < diff && ((at == p && bt == q) || (at == q && bt == p)) {
            return Ok((m, t[0].1.clone()));
        }
    }
    input("binomial is not a 2x2 minor of any matricization")
}

fn family(format: &Format, d: usize) -> Result<Vec<Vec<usize>>> {
    match format {
        Format::Tt => Ok((1..d).map(|k| (0..k).collect()).collect()),
        Format::Hosvd => Ok((0..d).map(|k| vec![k]).collect()),
        _ => input("decomposition target must be TT or HOSVD"),
    }
}

/// One-coordinate swaps: `x_a x_b - x_{a^T} x_{b^T}` as a telescoping sum of
/// single-unfolding minors.
fn hosvd_chain(m: &Minor) -> Vec<Minor> {
    let mut out = Vec::new();
    let (mut a, mut b) = (m.a.clone(), m.b.clone());
    for &t in &m.swap {
        out.push(Minor { a: a.clone(), b: b.clone(), swap: vec![t] });
        std::mem::swap(&mut a[t], &mut b[t]);
    }
    out
}

/// Splits a single-unfolding minor into prefix-matricization minors.
fn tt_split(m: &Minor, fam: &[Vec<usize>]) -> Vec<(Minor, bool)> {
    if fam.iter().any(|s| m.belongs_to(s)) {
        return vec![(m.clone(), false)];
    }
    let k = m.swap[0];
    let diff = m.difference();
    let u: Vec<usize> = diff.iter().copied().filter(|&i| i < k).collect();
    let mut uk = u.clone();
    uk.push(k);
    // x_a x_b - x_{a^{U+k}} x_{b^{U+k}}
    let first = Minor { a: m.a.clone(), b: m.b.clone(), swap: uk };
    // -(x_{a'} x_{b'} - x_{a'^U} x_{b'^U}) with a' = a^{k}
    let (ak, bk) = m.swapped();
    let second = Minor { a: ak, b: bk, swap: u };
    vec![(first, false), (second, true)]
}

/// Writes a matricization minor `f` as a sum of minors of the TT or HOSVD
/// family. The summands add up to `f` exactly.
pub fn decompose_minor<C: Coefficient>(f: &Polynomial<C>, dims: &Dims, target: &Format) -> Result<Vec<Polynomial<C>>> {
    let (m, c) = parse_minor(f, dims)?;
    let fam = family(target, dims.order())?;
    if fam.iter().any(|s| m.belongs_to(s)) {
        return Ok(vec![f.clone()]);
    }
    let chain = hosvd_chain(&m);
    let mut pieces: Vec<(Minor, bool)> = Vec::new();
    for g in chain {
        match target {
            Format::Hosvd => pieces.push((g, false)),
            _ => pieces.extend(tt_split(&g, &fam)),
        }
    }
    Ok(pieces
        .into_iter()
        .map(|(g, neg)| {
            let p = g.to_poly::<C>(dims).scale(&c);
            if neg {
                -p
            } else {
                p
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grobner::parse;
    use num_rational::BigRational;

    type P = Polynomial<BigRational>;

    fn d(s: &str) -> Dims {
        s.parse().unwrap()
    }

    fn sum(ps: &[P]) -> P {
        ps.iter().fold(P::zero(), |acc, p| &acc + p)
    }

    #[test]
    fn parse_rejects_non_minors() {
        let dims = d("2x2x2");
        let bad: P = parse("x[1,1,1]*x[2,2,2] - x[1,1,1]*x[1,1,2]", &dims).unwrap();
        assert!(parse_minor(&bad, &dims).is_err());
        let three: P = parse("x[1,1,1]*x[2,2,2] - x[1,1,1]^2 + 1", &dims).unwrap();
        assert!(parse_minor(&three, &dims).is_err());
    }

    #[test]
    fn order3_mode2_minor_splits_in_two() {
        let dims = d("2x2x2");
        // minor of X^{2}, all three indices differ
        let f: P = parse("-x[1,1,1]*x[2,2,2] + x[2,1,2]*x[1,2,1]", &dims).unwrap();
        let parts = decompose_minor(&f, &dims, &Format::Tt).unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(sum(&parts), f);
        for p in &parts {
            let (m, _) = parse_minor(p, &dims).unwrap();
            assert!(m.belongs_to(&[0]) || m.belongs_to(&[0, 1]));
        }
    }

    #[test]
    fn member_is_returned_as_is() {
        let dims = d("2x2x2");
        let f: P = parse("x[1,2,1]*x[2,1,1] - x[1,1,1]*x[2,2,1]", &dims).unwrap();
        assert_eq!(decompose_minor(&f, &dims, &Format::Hosvd).unwrap(), vec![f.clone()]);
        assert_eq!(decompose_minor(&f, &dims, &Format::Tt).unwrap(), vec![f]);
    }
}
