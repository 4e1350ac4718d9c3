use std::cmp::Ordering;

use smallvec::SmallVec;

/// Packed variable index: the vectorization offset of the tensor entry.
/// Smaller index means larger variable (`x_{11..1}` is index 0).
pub type Var = u32;

/// A monomial as a sparse exponent map, sorted by variable index with no
/// zero exponents. `Ord` is grevlex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    factors: SmallVec<[(Var, u32); 4]>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(v: Var) -> Self {
        Monomial { factors: smallvec::smallvec![(v, 1)] }
    }

    /// Product of the given variables (repeats allowed).
    pub fn from_vars(vars: impl IntoIterator<Item = Var>) -> Self {
        let mut vs: Vec<Var> = vars.into_iter().collect();
        vs.sort_unstable();
        let mut factors: SmallVec<[(Var, u32); 4]> = SmallVec::new();
        for v in vs {
            match factors.last_mut() {
                Some((last, e)) if *last == v => *e += 1,
                _ => factors.push((v, 1)),
            }
        }
        Monomial { factors }
    }

    /// From `(variable, exponent)` pairs in any order; zero exponents dropped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, u32)>) -> Self {
        let mut vs: Vec<(Var, u32)> = pairs.into_iter().filter(|&(_, e)| e > 0).collect();
        vs.sort_unstable();
        let mut factors: SmallVec<[(Var, u32); 4]> = SmallVec::new();
        for (v, e) in vs {
            match factors.last_mut() {
                Some((last, acc)) if *last == v => *acc += e,
                _ => factors.push((v, e)),
            }
        }
        Monomial { factors }
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.factors
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.factors.binary_search_by_key(&v, |&(w, _)| w).map_or(0, |i| self.factors[i].1)
    }

    /// Variables with multiplicity, ascending.
    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.factors.iter().flat_map(|&(v, e)| std::iter::repeat_n(v, e as usize))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        self.merge(other, |a, b| a + b)
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        self.merge(other, |a, b| a.max(b))
    }

    fn merge(&self, other: &Monomial, f: impl Fn(u32, u32) -> u32) -> Monomial {
        let (a, b) = (&self.factors, &other.factors);
        let mut out: SmallVec<[(Var, u32); 4]> = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push((a[i].0, f(a[i].1, 0)));
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0, f(0, b[j].1)));
                j += 1;
            } else {
                out.push((a[i].0, f(a[i].1, b[j].1)));
                i += 1;
                j += 1;
            }
        }
        out.retain(|&mut (_, e)| e > 0);
        Monomial { factors: out }
    }

    /// True if `self` divides `other`.
    pub fn divides(&self, other: &Monomial) -> bool {
        let mut j = 0;
        let b = &other.factors;
        for &(v, e) in &self.factors {
            while j < b.len() && b[j].0 < v {
                j += 1;
            }
            if j == b.len() || b[j].0 != v || b[j].1 < e {
                return false;
            }
        }
        true
    }

    /// `other / self` when `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        let mut out: SmallVec<[(Var, u32); 4]> = SmallVec::new();
        for &(v, e) in &other.factors {
            let d = e - self.exponent(v);
            if d > 0 {
                out.push((v, d));
            }
        }
        Some(Monomial { factors: out })
    }

    /// No variable in common.
    pub fn coprime(&self, other: &Monomial) -> bool {
        let (a, b) = (&self.factors, &other.factors);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => return false,
            }
        }
        true
    }
}

/// Graded reverse lexicographic order.
///
/// Total degree first; on ties `a > b` iff the last nonzero entry of the
/// exponent difference `a - b` (in variable order, largest index last) is
/// negative.
pub fn grevlex_cmp(a: &Monomial, b: &Monomial) -> Ordering {
    let (da, db) = (a.degree(), b.degree());
    if da != db {
        return da.cmp(&db);
    }
    let (fa, fb) = (&a.factors, &b.factors);
    let (mut i, mut j) = (fa.len(), fb.len());
    while i > 0 && j > 0 {
        let (va, ea) = fa[i - 1];
        let (vb, eb) = fb[j - 1];
        match va.cmp(&vb) {
            Ordering::Equal => {
                if ea != eb {
                    // difference ea - eb at the rightmost differing variable
                    return if ea < eb { Ordering::Greater } else { Ordering::Less };
                }
                i -= 1;
                j -= 1;
            }
            // a has a positive entry further right
            Ordering::Greater => return Ordering::Less,
            Ordering::Less => return Ordering::Greater,
        }
    }
    // Equal degree and one exhausted implies both exhausted.
    debug_assert!(i == 0 && j == 0);
    Ordering::Equal
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        grevlex_cmp(self, other)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
