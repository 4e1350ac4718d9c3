//! Dense order-d tensors.
//!
//! Entries are stored in vectorization order with the last index running
//! fastest, so `x_{11..1}` sits at offset 0 and `x_{n1 n2 .. nd}` at the end.
//! The same packing is used for the polynomial variables in
//! [`crate::grobner`] and the moment-matrix rows in [`crate::ideal`].

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::linalg::{self, Matrix};

/// Tensor shape `(n_1, .., n_d)` with `d >= 2` and every `n_i >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Dims(Vec<usize>);

impl Dims {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.len() < 2 {
            return input(format!("tensor order must be at least 2, got {}", sizes.len()));
        }
        if sizes.contains(&0) {
            return input(format!("zero-length mode in {sizes:?}"));
        }
        Ok(Dims(sizes))
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.0
    }

    pub fn size(&self, mode: usize) -> usize {
        self.0[mode]
    }

    /// Number of entries `prod n_i`.
    pub fn num_entries(&self) -> usize {
        self.0.iter().product()
    }

    /// Offset of a 1-based multi-index in vectorization order.
    pub fn linear_index(&self, idx: &[usize]) -> Result<usize> {
        if idx.len() != self.order() {
            return input(format!("multi-index of length {} for order {}", idx.len(), self.order()));
        }
        let mut lin = 0;
        for (&a, &n) in idx.iter().zip(&self.0) {
            if a == 0 || a > n {
                return input(format!("index {a} out of range 1..={n}"));
            }
            lin = lin * n + (a - 1);
        }
        Ok(lin)
    }

    /// Inverse of [`Dims::linear_index`]. Panics if `lin` is out of range.
    pub fn multi_index(&self, mut lin: usize) -> MultiIndex {
        assert!(lin < self.num_entries(), "linear index out of range");
        let mut out = vec![0; self.order()];
        for (slot, &n) in out.iter_mut().zip(&self.0).rev() {
            *slot = lin % n + 1;
            lin /= n;
        }
        MultiIndex(out)
    }

    /// All multi-indices in vectorization order.
    pub fn indices(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        (0..self.num_entries()).map(move |l| self.multi_index(l))
    }

    /// True when `idx` is a valid multi-index for this shape.
    pub fn contains(&self, idx: &MultiIndex) -> bool {
        idx.0.len() == self.order() && idx.0.iter().zip(&self.0).all(|(&a, &n)| a >= 1 && a <= n)
    }
}

impl TryFrom<Vec<usize>> for Dims {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Dims::new(v)
    }
}

impl From<Dims> for Vec<usize> {
    fn from(d: Dims) -> Self {
        d.0
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// Parses `2,2,3` or `2x2x3`.
impl FromStr for Dims {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let sizes = s
            .split([',', 'x'])
            .map(|p| p.trim().parse::<usize>().map_err(|e| Error::Parse(format!("dims `{s}`: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Dims::new(sizes)
    }
}

/// A 1-based multi-index `(alpha_1, .., alpha_d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Self {
        MultiIndex(entries)
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Componentwise comparability.
    pub fn comparable(&self, other: &MultiIndex) -> bool {
        self.le(other) || other.le(self)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&a| a < 10) {
            for a in &self.0 {
                write!(f, "{a}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

/// Componentwise minimum and maximum `(a ∧ b, a ∨ b)`.
pub fn meet_join(a: &MultiIndex, b: &MultiIndex) -> Result<(MultiIndex, MultiIndex)> {
    if a.len() != b.len() {
        return input(format!("multi-indices of lengths {} and {}", a.len(), b.len()));
    }
    let meet = a.0.iter().zip(&b.0).map(|(x, y)| *x.min(y)).collect();
    let join = a.0.iter().zip(&b.0).map(|(x, y)| *x.max(y)).collect();
    Ok((MultiIndex(meet), MultiIndex(join)))
}

/// Dense tensor stored in vectorization order.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor<T> {
    dims: Dims,
    values: Vec<T>,
}

/// An S-matricization: rows indexed by the modes in `row_modes` (in the
/// listed order, last fastest), columns by the remaining modes ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct Matricization<T> {
    pub row_modes: Vec<usize>,
    pub col_modes: Vec<usize>,
    pub matrix: Matrix<T>,
}

impl<T: Float> DenseTensor<T> {
    pub fn new(dims: Dims, values: Vec<T>) -> Result<Self> {
        if values.len() != dims.num_entries() {
            return input(format!("tensor of shape {dims} needs {} values, got {}", dims.num_entries(), values.len()));
        }
        Ok(DenseTensor { dims, values })
    }

    pub fn zeros(dims: Dims) -> Self {
        let n = dims.num_entries();
        DenseTensor { dims, values: vec![T::zero(); n] }
    }

    pub fn from_fn(dims: Dims, mut f: impl FnMut(&MultiIndex) -> T) -> Self {
        let values = dims.indices().map(|idx| f(&idx)).collect();
        DenseTensor { dims, values }
    }

    /// Outer product `v_1 ⊗ .. ⊗ v_d`.
    pub fn outer(factors: &[Vec<T>]) -> Result<Self> {
        let dims = Dims::new(factors.iter().map(Vec::len).collect())?;
        Ok(Self::from_fn(dims, |idx| idx.0.iter().zip(factors).fold(T::one(), |acc, (&a, v)| acc * v[a - 1])))
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// Entry at a 1-based multi-index.
    pub fn get(&self, idx: &[usize]) -> Result<T> {
        Ok(self.values[self.dims.linear_index(idx)?])
    }

    pub fn set(&mut self, idx: &[usize], v: T) -> Result<()> {
        let l = self.dims.linear_index(idx)?;
        self.values[l] = v;
        Ok(())
    }

    pub fn frobenius(&self) -> T {
        self.values.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
    }

    pub fn scale(&self, c: T) -> Self {
        DenseTensor { dims: self.dims.clone(), values: self.values.iter().map(|&x| x * c).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        if self.dims != other.dims {
            return input(format!("shape mismatch: {} vs {}", self.dims, other.dims));
        }
        Ok(DenseTensor {
            dims: self.dims.clone(),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        Ok(self.sub(other)?.values.iter().fold(T::zero(), |m, x| m.max(x.abs())))
    }

    /// The matricization with rows indexed by `row_modes` (1-based modes).
    pub fn matricize(&self, row_modes: &[usize]) -> Result<Matricization<T>> {
        let d = self.dims.order();
        if row_modes.is_empty() {
            return input("empty row-mode set");
        }
        let mut seen = vec![false; d];
        for &m in row_modes {
            if m == 0 || m > d {
                return input(format!("mode {m} out of range 1..={d}"));
            }
            if std::mem::replace(&mut seen[m - 1], true) {
                return input(format!("mode {m} listed twice"));
            }
        }
        let col_modes: Vec<usize> = (1..=d).filter(|m| !seen[m - 1]).collect();
        let n = self.dims.sizes();
        let rows: usize = row_modes.iter().map(|&m| n[m - 1]).product();
        let cols: usize = col_modes.iter().map(|&m| n[m - 1]).product();
        let pack =
            |idx: &MultiIndex, modes: &[usize]| modes.iter().fold(0, |acc, &m| acc * n[m - 1] + (idx.0[m - 1] - 1));
        let mut matrix = Matrix::zeros(rows, cols);
        for (lin, idx) in self.dims.indices().enumerate() {
            matrix[(pack(&idx, row_modes), pack(&idx, &col_modes))] = self.values[lin];
        }
        Ok(Matricization { row_modes: row_modes.to_vec(), col_modes, matrix })
    }

    /// The mode-`k` unfolding (1-based).
    pub fn unfolding(&self, mode: usize) -> Result<Matrix<T>> {
        Ok(self.matricize(&[mode])?.matrix)
    }

    pub fn cast<U: Float>(&self) -> DenseTensor<U> {
        DenseTensor {
            dims: self.dims.clone(),
            values: self.values.iter().map(|&x| U::from(x).unwrap_or_else(U::nan)).collect(),
        }
    }
}

/// On-disk tensor document `{"dims": [..], "values": [..]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TensorFile {
    pub dims: Vec<usize>,
    pub values: Vec<f64>,
}

impl<T: Float> DenseTensor<T> {
    pub fn to_file(&self) -> TensorFile {
        TensorFile {
            dims: self.dims.sizes().to_vec(),
            values: self.values.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect(),
        }
    }

    pub fn from_file(doc: TensorFile) -> Result<Self> {
        let dims = Dims::new(doc.dims)?;
        let values = doc
            .values
            .into_iter()
            .map(|x| T::from(x).ok_or_else(|| Error::Input(format!("value {x} not representable"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dims, values)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(text)?)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// Matrix nuclear norm via the one-sided Jacobi SVD.
pub fn svd_nuclear<T: Float>(m: &Matrix<T>) -> Result<T> {
    linalg::nuclear_norm(m)
}

/// Frobenius norm of a tensor.
pub fn frobenius<T: Float>(x: &DenseTensor<T>) -> T {
    x.frobenius()
}

/// The generator used for every seeded draw in the crate.
pub fn seeded_rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn gaussian_vec<T: Float, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<T> {
    (0..n)
        .map(|_| {
            let g: f64 = rng.sample(StandardNormal);
            T::from(g).unwrap_or_else(T::zero)
        })
        .collect()
}

/// Sum of `rank` outer products with i.i.d. standard normal factor entries,
/// drawn from `rng`.
pub fn random_low_rank_with<T: Float, R: Rng + ?Sized>(
    rng: &mut R,
    dims: &Dims,
    rank: usize,
) -> Result<DenseTensor<T>> {
    if rank == 0 {
        return input("rank must be at least 1");
    }
    let mut acc = DenseTensor::zeros(dims.clone());
    for _ in 0..rank {
        let factors: Vec<Vec<T>> = dims.sizes().iter().map(|&n| gaussian_vec(rng, n)).collect();
        acc = acc.add(&DenseTensor::outer(&factors)?)?;
    }
    Ok(acc)
}

/// Deterministic random tensor of CP rank at most `rank`.
pub fn random_low_rank<T: Float>(dims: &Dims, rank: usize, seed: u64) -> Result<DenseTensor<T>> {
    random_low_rank_with(&mut seeded_rng(seed), dims, rank)
}

/// Rank-one tensor with unit Frobenius norm, from unit-normalised Gaussian
/// factors.
pub fn random_unit_rank_one<T: Float, R: Rng + ?Sized>(rng: &mut R, dims: &Dims) -> Result<DenseTensor<T>> {
    let factors: Vec<Vec<T>> = dims
        .sizes()
        .iter()
        .map(|&n| {
            let v: Vec<T> = gaussian_vec(rng, n);
            let norm = v.iter().fold(T::zero(), |a, &x| a + x * x).sqrt();
            v.into_iter().map(|x| x / norm).collect()
        })
        .collect();
    DenseTensor::outer(&factors)
}
