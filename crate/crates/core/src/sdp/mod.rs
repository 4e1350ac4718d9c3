//! Dense semidefinite programs in the form
//!
//! ```text
//! minimize    c'z
//! subject to  F0 + sum_i z_i F_i  is PSD
//!             A z = b
//! ```
//!
//! solved by an ADMM splitting between the affine set and the PSD cone.
//! Symmetric matrices are handled as scaled packed upper triangles
//! ([`svec`]), so the trace inner product becomes the Euclidean one.

mod admm;
mod cone;

use std::path::Path;

use serde::{Deserialize, Serialize};

pub use admm::solve;
pub use cone::{psd_project, psd_project_packed};

use crate::error::{input, Result};
use crate::linalg::Matrix;

/// Upper-triangle entries `(row, col, value)` of a sparse symmetric matrix,
/// `row <= col`. Repeated positions add up.
pub type SymEntries = Vec<(usize, usize, f64)>;

/// Sparse row `(column, value)` of the equality matrix.
pub type SparseRow = Vec<(usize, f64)>;

/// A linear objective, an affine PSD constraint and linear equalities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeProgram {
    pub dim_z: usize,
    pub psd_dim: usize,
    pub objective: Vec<f64>,
    /// `F0`.
    pub constant: SymEntries,
    /// `(i, F_i)` for every variable that enters the PSD constraint.
    pub psd_map: Vec<(usize, SymEntries)>,
    pub eq_rows: Vec<SparseRow>,
    pub eq_rhs: Vec<f64>,
}

impl ConeProgram {
    /// An unconstrained program of the given sizes with zero objective.
    pub fn new(dim_z: usize, psd_dim: usize) -> Self {
        ConeProgram {
            dim_z,
            psd_dim,
            objective: vec![0.0; dim_z],
            constant: Vec::new(),
            psd_map: Vec::new(),
            eq_rows: Vec::new(),
            eq_rhs: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.psd_dim;
        if p == 0 {
            return input("PSD block must be nonempty");
        }
        if self.objective.len() != self.dim_z {
            return input(format!("objective has {} entries, expected {}", self.objective.len(), self.dim_z));
        }
        let check = |e: &SymEntries| -> Result<()> {
            for &(r, c, v) in e {
                if r > c || c >= p || !v.is_finite() {
                    return input(format!("bad symmetric entry ({r}, {c}, {v}) for a {p}x{p} block"));
                }
            }
            Ok(())
        };
        check(&self.constant)?;
        for (i, e) in &self.psd_map {
            if *i >= self.dim_z {
                return input(format!("PSD term refers to variable {i} of {}", self.dim_z));
            }
            check(e)?;
        }
        if self.eq_rows.len() != self.eq_rhs.len() {
            return input("equality rows and right-hand side differ in length");
        }
        for row in &self.eq_rows {
            if row.iter().any(|&(j, v)| j >= self.dim_z || !v.is_finite()) {
                return input("equality row refers to a missing variable or is not finite");
            }
        }
        if self.objective.iter().chain(&self.eq_rhs).any(|v| !v.is_finite()) {
            return input("objective and right-hand side must be finite");
        }
        Ok(())
    }

    /// `F0 + sum_i z_i F_i` as a dense matrix.
    pub fn psd_value(&self, z: &[f64]) -> Matrix<f64> {
        let p = self.psd_dim;
        let mut m = Matrix::zeros(p, p);
        let mut add = |e: &SymEntries, s: f64| {
            for &(r, c, v) in e {
                m[(r, c)] += s * v;
                if r != c {
                    m[(c, r)] += s * v;
                }
            }
        };
        add(&self.constant, 1.0);
        for (i, e) in &self.psd_map {
            add(e, z[*i]);
        }
        m
    }

    /// Largest `|(Az - b)_i|`.
    pub fn equality_residual(&self, z: &[f64]) -> f64 {
        self.eq_rows
            .iter()
            .zip(&self.eq_rhs)
            .map(|(row, b)| (row.iter().map(|&(j, v)| v * z[j]).sum::<f64>() - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn objective_value(&self, z: &[f64]) -> f64 {
        self.objective.iter().zip(z).map(|(c, x)| c * x).sum()
    }

    /// Self-describing JSON dump for offline cross-checks.
    pub fn to_json(&self) -> Result<String> {
        let doc = serde_json::json!({
            "form": "minimize objective.z s.t. constant + sum_i z_i psd_map[i] PSD (upper triangles), eq_rows z = eq_rhs",
            "program": self,
        });
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text)?;
        let prog: ConeProgram = serde_json::from_value(v.get("program").cloned().unwrap_or(v))?;
        prog.validate()?;
        Ok(prog)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub eps_abs: f64,
    pub eps_rel: f64,
    pub max_iter: usize,
    /// Initial penalty.
    pub rho: f64,
    /// Adapt the penalty to balance primal and dual residuals.
    pub adaptive_rho: bool,
    /// Over-relaxation factor in `(0, 2)`.
    pub alpha: f64,
    /// Log residuals to stderr every `verbose` iterations; 0 is silent.
    pub verbose: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            eps_abs: 1e-8,
            eps_rel: 1e-8,
            max_iter: 200_000,
            rho: 1.0,
            adaptive_rho: true,
            alpha: 1.6,
            verbose: 0,
        }
    }
}

impl SolverSettings {
    /// Default settings with both tolerances set to `eps`.
    pub fn with_eps(eps: f64) -> Self {
        SolverSettings { eps_abs: eps, eps_rel: eps, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps_abs > 0.0 && self.eps_rel > 0.0) {
            return input("tolerances must be positive");
        }
        if !(self.alpha > 0.0 && self.alpha < 2.0) {
            return input("over-relaxation factor must lie in (0, 2)");
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return input("penalty must be positive");
        }
        if self.max_iter == 0 {
            return input("max_iter must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Optimal,
    MaxIter,
    InfeasibleSuspected,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `||F0 + F z - S||`.
    pub primal: f64,
    /// `rho ||F'(S - S_prev)||`.
    pub dual: f64,
    /// `|primal objective - dual objective|`.
    pub gap: f64,
    /// Largest equality violation.
    pub equality: f64,
    /// Smallest eigenvalue of `F0 + F z`, from the Jacobi solver.
    pub min_eigenvalue: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub status: Status,
    pub z: Vec<f64>,
    /// Dual PSD matrix, packed.
    pub dual: Vec<f64>,
    pub objective_value: f64,
    pub dual_objective: f64,
    pub residuals: Residuals,
    pub iterations: usize,
    pub seconds: f64,
}

/// Optional starting point `(z, Y)` with `Y` packed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WarmStart {
    pub z: Vec<f64>,
    pub dual: Vec<f64>,
}

/// Length of the packed form of a `p x p` symmetric matrix.
pub fn svec_len(p: usize) -> usize {
    p * (p + 1) / 2
}

/// Packed position of `(r, c)`, `r <= c`, column by column.
#[inline]
pub fn svec_index(r: usize, c: usize) -> usize {
    c * (c + 1) / 2 + r
}

/// Scaled packed upper triangle: off-diagonal entries times `sqrt 2`.
pub fn svec(m: &Matrix<f64>) -> Vec<f64> {
    let p = m.nrows();
    let mut out = vec![0.0; svec_len(p)];
    for c in 0..p {
        for r in 0..=c {
            let s = if r == c { 1.0 } else { std::f64::consts::SQRT_2 };
            out[svec_index(r, c)] = s * m[(r, c)];
        }
    }
    out
}

/// Inverse of [`svec`].
pub fn smat(v: &[f64], p: usize) -> Matrix<f64> {
    let mut m = Matrix::zeros(p, p);
    for c in 0..p {
        for r in 0..=c {
            let x = v[svec_index(r, c)];
            let x = if r == c { x } else { x / std::f64::consts::SQRT_2 };
            m[(r, c)] = x;
            m[(c, r)] = x;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svec_preserves_inner_products() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![2.0, -1.0, 0.5], vec![3.0, 0.5, 4.0]]).unwrap();
        let b = Matrix::from_rows(&[vec![0.0, 1.0, -2.0], vec![1.0, 2.0, 1.0], vec![-2.0, 1.0, 1.0]]).unwrap();
        let tr: f64 = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| a[(i, j)] * b[(i, j)]).sum();
        let dot: f64 = svec(&a).iter().zip(svec(&b)).map(|(x, y)| x * y).sum();
        assert!((tr - dot).abs() < 1e-12);
        assert_eq!(smat(&svec(&a), 3), a);
    }

    #[test]
    fn json_dump_round_trips() {
        let mut p = ConeProgram::new(2, 2);
        p.objective = vec![1.0, 0.0];
        p.constant = vec![(0, 1, 1.0)];
        p.psd_map = vec![(0, vec![(0, 0, 1.0), (1, 1, 1.0)])];
        p.eq_rows = vec![vec![(1, 1.0)]];
        p.eq_rhs = vec![0.5];
        assert_eq!(ConeProgram::from_json(&p.to_json().unwrap()).unwrap(), p);
        p.constant.push((1, 0, 1.0));
        assert!(p.validate().is_err());
    }
}
