//! Theta norms, theta-norm minimisation under linear measurements, and the
//! semidefinite formulation of the matrix nuclear norm.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::grobner::Monomial;
use crate::ideal::{solver_structure, IdealSpec};
use crate::linalg::Matrix;
use crate::sdp::{solve, ConeProgram, Solution, SolverSettings, Status, SymEntries};
use crate::tensor::DenseTensor;
use crate::{RationalMomentStructure, Tensor};

/// Tolerance used when none is given.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Optimal value of a norm program together with the solver record.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormReport {
    pub value: f64,
    pub solution: Solution,
}

/// Minimiser of a theta-norm program.
#[derive(Clone, Debug)]
pub struct ThetaMinimizer {
    pub tensor: Tensor,
    pub t: f64,
    pub solution: Solution,
}

fn ensure_optimal(sol: &Solution, what: &str) -> Result<()> {
    if sol.status == Status::Optimal {
        Ok(())
    } else {
        Err(Error::Numerical {
            what: format!(
                "{what}: solver stopped with {:?} (primal {:.2e}, dual {:.2e}, gap {:.2e})",
                sol.status, sol.residuals.primal, sol.residuals.dual, sol.residuals.gap
            ),
            iterations: sol.iterations,
        })
    }
}

/// Positions of the degree-one coordinates `y_{x_v}`, in variable order.
fn linear_positions(ms: &RationalMomentStructure) -> Result<Vec<usize>> {
    (0..ms.dims.num_entries())
        .map(|v| {
            ms.basis
                .position(&Monomial::var(v as u32))
                .ok_or_else(|| Error::Invariant(format!("variable {v} missing from the theta basis")))
        })
        .collect()
}

/// The moment-matrix program `min y_0 s.t. M(y) PSD`. With `pinned`, the
/// linear coordinates are fixed to those values and drop out of `z`.
/// Returns the program and, per coordinate, its `z` index if free.
fn moment_program(ms: &RationalMomentStructure, pinned: Option<&[f64]>) -> Result<(ConeProgram, Vec<Option<usize>>)> {
    let lin = linear_positions(ms)?;
    let mut fixed = vec![None; ms.num_coordinates()];
    if let Some(x) = pinned {
        for (v, &l) in lin.iter().enumerate() {
            fixed[l] = Some(x[v]);
        }
    }
    let mut index = vec![None; ms.num_coordinates()];
    let mut n = 0;
    for (l, slot) in index.iter_mut().enumerate() {
        if fixed[l].is_none() {
            *slot = Some(n);
            n += 1;
        }
    }
    let mut prog = ConeProgram::new(n, ms.size());
    prog.objective[index[0].ok_or_else(|| Error::Invariant("constant coordinate pinned".into()))?] = 1.0;
    for (l, positions) in ms.by_coordinate().into_iter().enumerate() {
        let entries: SymEntries =
            positions.into_iter().map(|(r, c, q)| (r, c, q.to_f64().unwrap_or(f64::NAN))).collect();
        match (index[l], fixed[l]) {
            (Some(i), _) => prog.psd_map.push((i, entries)),
            (None, Some(x)) => prog.constant.extend(entries.into_iter().map(|(r, c, v)| (r, c, v * x))),
            (None, None) => unreachable!(),
        }
    }
    Ok((prog, index))
}

/// `theta_k` norm of `x` with full solver diagnostics.
pub fn theta_norm_with(x: &Tensor, spec: &IdealSpec, k: usize, settings: &SolverSettings) -> Result<NormReport> {
    if x.dims() != &spec.dims {
        return input(format!("tensor shape {} does not match ideal shape {}", x.dims(), spec.dims));
    }
    if x.values().iter().any(|v| !v.is_finite()) {
        return input("tensor entries must be finite");
    }
    let ms = solver_structure(spec, k)?;
    let (prog, _) = moment_program(&ms, Some(x.values()))?;
    let solution = solve(&prog, settings, None)?;
    ensure_optimal(&solution, "theta norm")?;
    Ok(NormReport { value: solution.objective_value, solution })
}

/// `theta_k` norm of `x`: `min t` subject to `M_{B_k}(y)` PSD, `y_0 = t` and
/// the linear coordinates equal to the entries of `x`.
pub fn theta_norm(x: &Tensor, spec: &IdealSpec, k: usize) -> Result<f64> {
    Ok(theta_norm_with(x, spec, k, &SolverSettings::with_eps(DEFAULT_EPS))?.value)
}

/// The theta-minimisation program `min t s.t. M(t, y, Z) PSD, Phi vec(Z) = b`.
/// Variables are all coordinates of the moment structure, `z_0 = t` and
/// the returned indices locate the entries of `Z` in `z`.
pub fn theta_minimize_program(
    phi: &Matrix<f64>,
    b: &[f64],
    spec: &IdealSpec,
    k: usize,
) -> Result<(ConeProgram, Vec<usize>)> {
    let ms = solver_structure(spec, k)?;
    let n = spec.dims.num_entries();
    if phi.ncols() != n || phi.nrows() != b.len() {
        return input(format!("measurement map is {}x{}, expected {}x{n}", phi.nrows(), phi.ncols(), b.len()));
    }
    if !phi.is_finite() || b.iter().any(|v| !v.is_finite()) {
        return input("measurements must be finite");
    }
    let (mut prog, index) = moment_program(&ms, None)?;
    let lin: Vec<usize> = linear_positions(&ms)?.into_iter().map(|l| index[l].expect("free coordinate")).collect();
    prog.eq_rows = (0..phi.nrows())
        .map(|i| lin.iter().enumerate().map(|(v, &j)| (j, phi[(i, v)])).filter(|e| e.1 != 0.0).collect())
        .collect();
    prog.eq_rhs = b.to_vec();
    Ok((prog, lin))
}

pub fn theta_minimize_with(
    phi: &Matrix<f64>,
    b: &[f64],
    spec: &IdealSpec,
    k: usize,
    settings: &SolverSettings,
) -> Result<ThetaMinimizer> {
    let (prog, lin) = theta_minimize_program(phi, b, spec, k)?;
    let solution = solve(&prog, settings, None)?;
    ensure_optimal(&solution, "theta minimisation")?;
    let tensor = DenseTensor::new(spec.dims.clone(), lin.iter().map(|&j| solution.z[j]).collect())?;
    Ok(ThetaMinimizer { tensor, t: solution.objective_value, solution })
}

/// Minimiser `(Z, t)` of the theta norm over `{Z : Phi vec(Z) = b}`.
pub fn theta_minimize(phi: &Matrix<f64>, b: &[f64], spec: &IdealSpec, k: usize) -> Result<(Tensor, f64)> {
    let m = theta_minimize_with(phi, b, spec, k, &SolverSettings::with_eps(DEFAULT_EPS))?;
    Ok((m.tensor, m.t))
}

/// `min (tr W + tr Z)/2 s.t. [[W, X], [X', Z]] PSD`.
pub fn nuclear_norm_program(x: &Matrix<f64>) -> ConeProgram {
    let (m, n) = (x.nrows(), x.ncols());
    let p = m + n;
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    for c in 0..m {
        for r in 0..=c {
            blocks.push((r, c));
        }
    }
    for c in 0..n {
        for r in 0..=c {
            blocks.push((m + r, m + c));
        }
    }
    let mut prog = ConeProgram::new(blocks.len(), p);
    for (i, &(r, c)) in blocks.iter().enumerate() {
        if r == c {
            prog.objective[i] = 0.5;
        }
        prog.psd_map.push((i, vec![(r, c, 1.0)]));
    }
    for i in 0..m {
        for j in 0..n {
            if x[(i, j)] != 0.0 {
                prog.constant.push((i, m + j, x[(i, j)]));
            }
        }
    }
    prog
}

pub fn nuclear_norm_sdp_with(x: &Matrix<f64>, settings: &SolverSettings) -> Result<NormReport> {
    if !x.is_finite() {
        return input("matrix entries must be finite");
    }
    let solution = solve(&nuclear_norm_program(x), settings, None)?;
    ensure_optimal(&solution, "nuclear norm")?;
    Ok(NormReport { value: solution.objective_value, solution })
}

/// Nuclear norm of `x` through its semidefinite characterisation.
pub fn nuclear_norm_sdp(x: &Matrix<f64>) -> Result<f64> {
    Ok(nuclear_norm_sdp_with(x, &SolverSettings::with_eps(DEFAULT_EPS))?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::nuclear_norm;
    use crate::tensor::{random_unit_rank_one, seeded_rng, Dims};

    fn dims(s: &str) -> Dims {
        s.parse().unwrap()
    }

    #[test]
    fn zero_tensor_has_norm_zero() {
        let spec = IdealSpec::full(dims("2x2x2"));
        assert!(theta_norm(&Tensor::zeros(spec.dims.clone()), &spec, 1).unwrap().abs() < 1e-7);
    }

    #[test]
    fn unit_rank_one_has_norm_one() {
        let spec = IdealSpec::full(dims("2x2x2"));
        let x: Tensor = random_unit_rank_one(&mut seeded_rng(2), &spec.dims).unwrap();
        assert!((theta_norm(&x, &spec, 1).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn identity_matrix_has_theta_norm_two() {
        let spec = IdealSpec::full(dims("2x2"));
        let mut x = Tensor::zeros(spec.dims.clone());
        x.set(&[1, 1], 1.0).unwrap();
        x.set(&[2, 2], 1.0).unwrap();
        assert!((theta_norm(&x, &spec, 1).unwrap() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn nuclear_sdp_matches_svd() {
        let x = Matrix::from_rows(&[vec![1.0, 2.0, 0.0, -1.0], vec![0.5, -1.0, 3.0, 0.0], vec![2.0, 0.0, 1.0, 1.0]])
            .unwrap();
        let sdp = nuclear_norm_sdp(&x).unwrap();
        assert!((sdp - nuclear_norm(&x).unwrap()).abs() < 1e-6);
        assert!((nuclear_norm_sdp(&Matrix::identity(2)).unwrap() - 2.0).abs() < 1e-7);
    }

    #[test]
    fn shape_mismatch_is_an_input_error() {
        let spec = IdealSpec::full(dims("2x2x2"));
        assert!(matches!(theta_norm(&Tensor::zeros(dims("2x2")), &spec, 1), Err(Error::Input(_))));
        let phi = Matrix::zeros(3, 7);
        assert!(theta_minimize(&phi, &[0.0; 3], &spec, 1).is_err());
    }

    #[test]
    fn zero_measurements_give_zero() {
        let spec = IdealSpec::full(dims("2x2x2"));
        let mut rng = seeded_rng(4);
        let phi = Matrix::from_fn(4, 8, |_, _| rand::Rng::random_range(&mut rng, -1.0..1.0));
        let (z, t) = theta_minimize(&phi, &[0.0; 4], &spec, 1).unwrap();
        assert!(t.abs() < 1e-7);
        assert!(z.values().iter().all(|v| v.abs() < 1e-7));
    }
}
