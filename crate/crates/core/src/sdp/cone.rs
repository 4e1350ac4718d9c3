use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{input, Error, Result};
use crate::linalg::Matrix;

use super::{svec_index, svec_len};

const EIG_MAX_ITER: usize = 100_000;

fn unpack(v: &[f64], p: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(p, p);
    for c in 0..p {
        for r in 0..=c {
            let x = v[svec_index(r, c)];
            let x = if r == c { x } else { x * std::f64::consts::FRAC_1_SQRT_2 };
            m[(r, c)] = x;
            m[(c, r)] = x;
        }
    }
    m
}

fn pack(m: &DMatrix<f64>, out: &mut [f64]) {
    let p = m.nrows();
    for c in 0..p {
        for r in 0..c {
            out[svec_index(r, c)] = (m[(r, c)] + m[(c, r)]) * std::f64::consts::FRAC_1_SQRT_2;
        }
        out[svec_index(c, c)] = m[(c, c)];
    }
}

/// `sum_k w_k v_k v_k'` over the selected eigenpairs.
fn partial(eig: &SymmetricEigen<f64, nalgebra::Dyn>, keep: &[usize], w: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let p = eig.eigenvectors.nrows();
    let mut v = DMatrix::zeros(p, keep.len());
    let mut vw = DMatrix::zeros(p, keep.len());
    for (j, &k) in keep.iter().enumerate() {
        let s = w(eig.eigenvalues[k]);
        v.set_column(j, &eig.eigenvectors.column(k));
        vw.set_column(j, &(eig.eigenvectors.column(k) * s));
    }
    vw * v.transpose()
}

/// Projects a packed symmetric matrix onto the PSD cone in place.
/// Returns the number of positive eigenvalues kept.
pub(crate) fn project_in_place(v: &mut [f64], p: usize) -> Result<usize> {
    let m = unpack(v, p);
    let eig = SymmetricEigen::try_new(m, f64::EPSILON, EIG_MAX_ITER).ok_or_else(|| Error::Numerical {
        what: format!("symmetric eigensolver on a {p}x{p} block"),
        iterations: EIG_MAX_ITER,
    })?;
    let pos: Vec<usize> = (0..p).filter(|&k| eig.eigenvalues[k] > 0.0).collect();
    if pos.len() == p {
        return Ok(p);
    }
    if 2 * pos.len() <= p {
        pack(&partial(&eig, &pos, |x| x), v);
    } else {
        let neg: Vec<usize> = (0..p).filter(|&k| eig.eigenvalues[k] <= 0.0).collect();
        let n = partial(&eig, &neg, |x| x);
        let mut packed = vec![0.0; svec_len(p)];
        pack(&n, &mut packed);
        for (a, b) in v.iter_mut().zip(&packed) {
            *a -= b;
        }
    }
    Ok(pos.len())
}

/// Nearest PSD matrix in Frobenius norm, for a packed input.
pub fn psd_project_packed(v: &[f64], p: usize) -> Result<Vec<f64>> {
    if v.len() != svec_len(p) {
        return input(format!("packed length {} does not match a {p}x{p} block", v.len()));
    }
    let mut out = v.to_vec();
    project_in_place(&mut out, p)?;
    Ok(out)
}

/// Nearest PSD matrix in Frobenius norm: negative eigenvalues clamped to 0.
pub fn psd_project(s: &Matrix<f64>) -> Result<Matrix<f64>> {
    if !s.is_square() {
        return input("PSD projection needs a square matrix");
    }
    let scale = 1.0 + s.frobenius();
    if s.asymmetry() > 1e-12 * scale {
        return input("PSD projection needs a symmetric matrix");
    }
    let p = s.nrows();
    let out = psd_project_packed(&super::svec(s), p)?;
    Ok(super::smat(&out, p))
}
