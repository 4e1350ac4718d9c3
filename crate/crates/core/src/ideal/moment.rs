use std::collections::BTreeMap;

use crate::error::{input, Error, Result};
use crate::grobner::{Coefficient, GroebnerBasis, Monomial, Polynomial, Var};
use crate::linalg::Matrix;
use crate::tensor::Dims;

use super::basis::ThetaBasis;

/// One upper-triangle entry of the combinatorial moment matrix: the linear
/// form `sum_l c_l y_l` over basis positions `l`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentEntry<C> {
    pub row: usize,
    pub col: usize,
    pub form: Vec<(usize, C)>,
}

/// Combinatorial moment matrix `M_{B_k}(y)`: rows and columns indexed by
/// `basis.rows()`, entries linear in the coordinates `y_l`, one per basis
/// monomial (`y_0` belongs to the constant).
#[derive(Clone, Debug, PartialEq)]
pub struct MomentStructure<C> {
    pub dims: Dims,
    pub basis: ThetaBasis,
    entries: Vec<MomentEntry<C>>,
}

impl<C: Coefficient> MomentStructure<C> {
    fn from_map(dims: Dims, basis: ThetaBasis, map: BTreeMap<(usize, usize), BTreeMap<usize, C>>) -> Self {
        let entries = map
            .into_iter()
            .filter_map(|((row, col), form)| {
                let form: Vec<(usize, C)> = form.into_iter().filter(|(_, c)| !c.is_zero()).collect();
                (!form.is_empty()).then_some(MomentEntry { row, col, form })
            })
            .collect();
        MomentStructure { dims, basis, entries }
    }

    /// Side length of the matrix, `|B_k|`.
    pub fn size(&self) -> usize {
        self.basis.rows().len()
    }

    /// Number of coordinates `y_l`, `|B_2k|`.
    pub fn num_coordinates(&self) -> usize {
        self.basis.len()
    }

    /// Nonzero upper-triangle entries, sorted by `(row, col)`.
    pub fn entries(&self) -> &[MomentEntry<C>] {
        &self.entries
    }

    /// Linear form at `(i, j)`; empty when the entry is identically zero.
    pub fn entry(&self, i: usize, j: usize) -> &[(usize, C)] {
        let key = (i.min(j), i.max(j));
        self.entries.binary_search_by(|e| (e.row, e.col).cmp(&key)).map_or(&[], |p| &self.entries[p].form)
    }

    /// For each coordinate `l`, the upper-triangle positions it touches.
    pub fn by_coordinate(&self) -> Vec<Vec<(usize, usize, C)>> {
        let mut out = vec![Vec::new(); self.num_coordinates()];
        for e in &self.entries {
            for (l, c) in &e.form {
                out[*l].push((e.row, e.col, c.clone()));
            }
        }
        out
    }

    /// `M(y)` as a dense symmetric matrix.
    pub fn evaluate(&self, y: &[f64]) -> Result<Matrix<f64>> {
        if y.len() != self.num_coordinates() {
            return input(format!("expected {} coordinates, got {}", self.num_coordinates(), y.len()));
        }
        let n = self.size();
        let mut m = Matrix::zeros(n, n);
        for e in &self.entries {
            let v: f64 = e.form.iter().map(|(l, c)| c.to_f64().unwrap_or(f64::NAN) * y[*l]).sum();
            m[(e.row, e.col)] = v;
            m[(e.col, e.row)] = v;
        }
        Ok(m)
    }

    /// Coordinates at a point: `y_l` is the `l`-th basis monomial at `x`.
    pub fn point_coordinates(&self, x: &[f64]) -> Vec<f64> {
        self.basis.evaluate(x)
    }
}

/// Builds the moment structure by reducing every product of two row
/// monomials modulo the certified basis.
pub fn moment_structure_from<C: Coefficient>(
    gb: &GroebnerBasis<C>,
    basis: ThetaBasis,
    dims: Dims,
) -> Result<MomentStructure<C>> {
    let rows = basis.rows().to_vec();
    let mut map = BTreeMap::new();
    for (i, a) in rows.iter().enumerate() {
        for (j, b) in rows.iter().enumerate().skip(i) {
            let nf = gb.normal_form(&Polynomial::term(a.mul(b), C::one()));
            let mut form = BTreeMap::new();
            for (m, c) in nf.terms() {
                let l = basis.position(m).ok_or_else(|| {
                    Error::Invariant(format!("normal form of row product ({i}, {j}) leaves the theta basis"))
                })?;
                form.insert(l, c.clone());
            }
            map.insert((i, j), form);
        }
    }
    Ok(MomentStructure::from_map(dims, basis, map))
}

/// Degree-two standard monomials for order-3 tensors: products
/// `x_a x_b` with `a <= b` componentwise, except `x_{111}^2`.
fn order3_basis(dims: &Dims) -> ThetaBasis {
    let n = dims.num_entries();
    let idx: Vec<Vec<usize>> = dims.indices().map(|m| m.0).collect();
    let mut mons = vec![Monomial::one()];
    mons.extend((0..n as Var).map(Monomial::var));
    for a in 0..n {
        for b in a..n {
            if (a, b) != (0, 0) && idx[a].iter().zip(&idx[b]).all(|(x, y)| x <= y) {
                mons.push(Monomial::from_vars([a as Var, b as Var]));
            }
        }
    }
    ThetaBasis::from_monomials(1, mons)
}

/// The order-3, level-1 moment structure assembled directly from the
/// closed-form families `M_0`, `M_ijk` and `M^2` .. `M^9`, without any
/// polynomial reduction. Agrees entry for entry with the general path.
pub fn moment_structure_order3_fast<C: Coefficient>(dims: &Dims) -> Result<MomentStructure<C>> {
    if dims.order() != 3 {
        return input(format!("fast moment structure needs an order-3 shape, got {dims}"));
    }
    let (n1, n2, n3) = (dims.size(0), dims.size(1), dims.size(2));
    let basis = order3_basis(dims);
    // 1-based matrix position of x_ijk; row 1 is the constant
    let f = |i: usize, j: usize, k: usize| (i - 1) * n2 * n3 + (j - 1) * n3 + k + 1;
    let v = |i: usize, j: usize, k: usize| (f(i, j, k) - 2) as Var;
    let mut map: BTreeMap<(usize, usize), BTreeMap<usize, C>> = BTreeMap::new();
    let mut hits = vec![0usize; basis.len()];
    let mut put = |p: usize, q: usize, l: usize, c: C| {
        let key = ((p - 1).min(q - 1), (p - 1).max(q - 1));
        let slot = map.entry(key).or_default().entry(l).or_insert_with(C::zero);
        *slot = slot.clone() + c;
    };
    let pos = |m: Monomial| basis.position(&m).expect("family monomial is standard");
    let quad = |a: Var, b: Var| pos(Monomial::from_vars([a, b]));

    // M_0
    put(1, 1, 0, C::one());
    put(2, 2, 0, C::one());
    for i in 1..=n1 {
        for j in 1..=n2 {
            for k in 1..=n3 {
                // M_ijk
                put(1, f(i, j, k), pos(Monomial::var(v(i, j, k))), C::one());
                // M^2
                if (i, j, k) != (1, 1, 1) {
                    let l = quad(v(i, j, k), v(i, j, k));
                    hits[l] += 1;
                    put(2, 2, l, -C::one());
                    put(f(i, j, k), f(i, j, k), l, C::one());
                }
            }
        }
    }
    let lt = |n: usize| (1..=n).flat_map(move |a| (a + 1..=n).map(move |b| (a, b))).collect::<Vec<_>>();
    let eq = |n: usize| (1..=n).map(|a| (a, a)).collect::<Vec<_>>();
    // (family index pairs for modes 1, 2, 3)
    let families: [(Vec<(usize, usize)>, Vec<(usize, usize)>, Vec<(usize, usize)>); 7] = [
        (eq(n1), lt(n2), lt(n3)), // M^3
        (lt(n1), lt(n2), lt(n3)), // M^4
        (lt(n1), eq(n2), lt(n3)), // M^5
        (lt(n1), lt(n2), eq(n3)), // M^6
        (lt(n1), eq(n2), eq(n3)), // M^7
        (eq(n1), lt(n2), eq(n3)), // M^8
        (eq(n1), eq(n2), lt(n3)), // M^9
    ];
    for (fi, fj, fk) in &families {
        for &(i, ih) in fi {
            for &(j, jh) in fj {
                for &(k, kh) in fk {
                    let l = quad(v(i, j, k), v(ih, jh, kh));
                    hits[l] += 1;
                    // every (a, b) with meet (i,j,k) and join (ih,jh,kh), taken once
                    let mut seen = Vec::new();
                    for a in [i, ih] {
                        for b in [j, jh] {
                            for c in [k, kh] {
                                let (a2, b2, c2) = (i + ih - a, j + jh - b, k + kh - c);
                                let p = f(a, b, c).min(f(a2, b2, c2));
                                let q = f(a, b, c).max(f(a2, b2, c2));
                                if !seen.contains(&(p, q)) {
                                    seen.push((p, q));
                                    put(p, q, l, C::one());
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let quadratics = basis.len() - 1 - dims.num_entries();
    if hits.iter().filter(|&&h| h > 0).count() != quadratics || hits.iter().any(|&h| h > 1) {
        return Err(Error::Invariant("fast moment families do not cover the quadratic basis exactly once".into()));
    }
    Ok(MomentStructure::from_map(dims.clone(), basis, map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn fast_path_sizes_2x2x2() {
        let d: Dims = "2x2x2".parse().unwrap();
        let m = moment_structure_order3_fast::<BigRational>(&d).unwrap();
        assert_eq!(m.size(), 9);
        assert_eq!(m.num_coordinates(), 35);
        assert!(moment_structure_order3_fast::<BigRational>(&"2x2".parse().unwrap()).is_err());
    }

    #[test]
    fn entry_lookup_is_symmetric() {
        let d: Dims = "2x2x3".parse().unwrap();
        let m = moment_structure_order3_fast::<BigRational>(&d).unwrap();
        for i in 0..m.size() {
            for j in 0..m.size() {
                assert_eq!(m.entry(i, j), m.entry(j, i));
            }
        }
        assert_eq!(m.entry(0, 0), &[(0, BigRational::from_integer(1.into()))]);
    }
}
