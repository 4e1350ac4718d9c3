use std::time::Instant;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{input, Result};
use crate::linalg::min_eigenvalue;

use super::cone::project_in_place;
use super::{svec_index, svec_len, ConeProgram, Residuals, Solution, SolverSettings, Status, WarmStart};

const ADAPT_EVERY: usize = 50;
const RHO_MIN: f64 = 1e-6;
const RHO_MAX: f64 = 1e6;
const DIVERGED: f64 = 1e14;

/// Factored affine part of a program, reused across iterations.
struct Affine {
    n: usize,
    s: usize,
    /// Packed columns of `F`.
    cols: Vec<Vec<(usize, f64)>>,
    f0: Vec<f64>,
    c: DVector<f64>,
    b: DVector<f64>,
    a: DMatrix<f64>,
    /// Proximal weight keeping the normal matrix definite.
    prox: f64,
    chol: Cholesky<f64, Dyn>,
    /// `K^{-1} A'`.
    kinv_at: DMatrix<f64>,
    schur: Option<Cholesky<f64, Dyn>>,
}

fn packed(r: usize, c: usize, v: f64) -> (usize, f64) {
    let (r, c) = (r.min(c), r.max(c));
    (svec_index(r, c), if r == c { v } else { v * std::f64::consts::SQRT_2 })
}

impl Affine {
    fn new(p: &ConeProgram) -> Result<Self> {
        let n = p.dim_z;
        let s = svec_len(p.psd_dim);
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (i, e) in &p.psd_map {
            cols[*i].extend(e.iter().map(|&(r, c, v)| packed(r, c, v)));
        }
        for col in &mut cols {
            col.sort_by_key(|x| x.0);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(col.len());
            for &(k, v) in col.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == k => last.1 += v,
                    _ => merged.push((k, v)),
                }
            }
            merged.retain(|x| x.1 != 0.0);
            *col = merged;
        }
        let mut f0 = vec![0.0; s];
        for &(r, c, v) in &p.constant {
            let (k, v) = packed(r, c, v);
            f0[k] += v;
        }
        // K = F'F, accumulated through the rows of F
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); s];
        for (j, col) in cols.iter().enumerate() {
            for &(k, v) in col {
                rows[k].push((j, v));
            }
        }
        let mut k = DMatrix::<f64>::zeros(n, n);
        for row in &rows {
            for &(i, vi) in row {
                for &(j, vj) in row {
                    k[(i, j)] += vi * vj;
                }
            }
        }
        let (chol, prox) = match Cholesky::new(k.clone()) {
            Some(ch) if (0..n).all(|i| ch.l_dirty()[(i, i)] > 1e-10) => (ch, 0.0),
            _ => {
                let prox = 1e-8 * (0..n).map(|i| k[(i, i)]).fold(1.0, f64::max);
                let ch = Cholesky::new(k + DMatrix::identity(n, n) * prox)
                    .ok_or_else(|| crate::Error::Invariant("regularized normal matrix is not definite".into()))?;
                (ch, prox)
            }
        };
        let m = p.eq_rows.len();
        let mut a = DMatrix::zeros(m, n);
        for (i, row) in p.eq_rows.iter().enumerate() {
            for &(j, v) in row {
                a[(i, j)] += v;
            }
        }
        let kinv_at = chol.solve(&a.transpose());
        let schur = if m > 0 {
            let sc = &a * &kinv_at;
            let scale = (0..m).map(|i| sc[(i, i)]).fold(0.0, f64::max);
            let ch = Cholesky::new(sc).filter(|ch| (0..m).all(|i| ch.l_dirty()[(i, i)].powi(2) > 1e-13 * scale));
            match ch {
                Some(ch) => Some(ch),
                None => return input("equality constraints are linearly dependent"),
            }
        } else {
            None
        };
        Ok(Affine {
            n,
            s,
            cols,
            f0,
            c: DVector::from_column_slice(&p.objective),
            b: DVector::from_column_slice(&p.eq_rhs),
            a,
            prox,
            chol,
            kinv_at,
            schur,
        })
    }

    fn apply(&self, z: &DVector<f64>, out: &mut [f64]) {
        out.copy_from_slice(&self.f0);
        for (j, col) in self.cols.iter().enumerate() {
            let zj = z[j];
            if zj != 0.0 {
                for &(k, v) in col {
                    out[k] += v * zj;
                }
            }
        }
    }

    fn apply_t(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.n, self.cols.iter().map(|col| col.iter().map(|&(k, v)| v * x[k]).sum()))
    }

    /// argmin c'z + rho/2 (||Fz - r||^2 + prox ||z - z_prev||^2) s.t. Az = b.
    /// Returns `(z, nu)`.
    fn z_step(&self, r: &[f64], z_prev: &DVector<f64>, rho: f64) -> (DVector<f64>, DVector<f64>) {
        let mut w = self.apply_t(r) * rho - &self.c;
        if self.prox > 0.0 {
            w += z_prev * (rho * self.prox);
        }
        self.chol.solve_mut(&mut w);
        match &self.schur {
            None => (w / rho, DVector::zeros(0)),
            Some(sc) => {
                let mut nu = &self.a * &w - &self.b * rho;
                sc.solve_mut(&mut nu);
                let z = (w - &self.kinv_at * &nu) / rho;
                (z, nu)
            }
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `p` by ADMM. Deterministic for fixed inputs.
///
/// On convergence the PSD constraint is re-checked with the Jacobi
/// eigensolver; if `lambda_min(F0 + F z)` is below `-10 eps` the
/// tolerances are tightened and the iteration continues.
pub fn solve(p: &ConeProgram, settings: &SolverSettings, warm: Option<&WarmStart>) -> Result<Solution> {
    p.validate()?;
    settings.validate()?;
    let start = Instant::now();
    let af = Affine::new(p)?;
    let (n, s, dim) = (af.n, af.s, p.psd_dim);
    let mut rho = settings.rho;
    let alpha = settings.alpha;

    let mut z = DVector::<f64>::zeros(n);
    let mut big_s = vec![0.0; s];
    let mut u = vec![0.0; s];
    if let Some(w) = warm {
        if w.z.len() != n || w.dual.len() != s {
            return input("warm start has the wrong dimensions");
        }
        z = DVector::from_column_slice(&w.z);
        af.apply(&z, &mut big_s);
        project_in_place(&mut big_s, dim)?;
        u = w.dual.iter().map(|y| -y / rho).collect();
    }

    let c_norm = af.c.norm();
    let mut tighten = 1.0;
    let mut g = vec![0.0; s];
    let mut h = vec![0.0; s];
    let mut r = vec![0.0; s];
    let mut res = Residuals::default();
    let mut status = Status::MaxIter;
    let mut pobj = 0.0;
    let mut dobj = 0.0;
    let mut iter = 0;

    while iter < settings.max_iter {
        iter += 1;
        for k in 0..s {
            r[k] = big_s[k] - af.f0[k] - u[k];
        }
        let (zn, nu) = af.z_step(&r, &z, rho);
        z = zn;
        af.apply(&z, &mut g);
        for k in 0..s {
            h[k] = alpha * g[k] + (1.0 - alpha) * big_s[k] + u[k];
        }
        let s_prev = std::mem::replace(&mut big_s, h.clone());
        project_in_place(&mut big_s, dim)?;
        for k in 0..s {
            // u + h_relaxed - S, with h already holding h_relaxed + u
            u[k] = h[k] - big_s[k];
        }

        let diff: Vec<f64> = g.iter().zip(&big_s).map(|(a, b)| a - b).collect();
        res.primal = norm(&diff);
        let ds: Vec<f64> = big_s.iter().zip(&s_prev).map(|(a, b)| a - b).collect();
        res.dual = rho * af.apply_t(&ds).norm();
        let y: Vec<f64> = u.iter().map(|x| -rho * x).collect();
        pobj = af.c.dot(&z);
        dobj = -dot(&y, &af.f0) - nu.dot(&af.b);
        res.gap = (pobj - dobj).abs();

        let g_norm = norm(&g).max(norm(&big_s));
        let fy_norm = af.apply_t(&y).norm();
        let (ea, er) = (settings.eps_abs * tighten, settings.eps_rel * tighten);
        let p_ok = res.primal <= ea + er * g_norm;
        let d_ok = res.dual <= ea + er * c_norm.max(fy_norm);
        let gap_ok = res.gap <= ea + er * (pobj.abs() + dobj.abs());

        if settings.verbose > 0 && iter % settings.verbose == 0 {
            eprintln!(
                "iter {iter:>7}  pobj {pobj:+.9e}  dobj {dobj:+.9e}  pres {:.2e}  dres {:.2e}  gap {:.2e}  rho {rho:.2e}",
                res.primal, res.dual, res.gap
            );
        }
        if !(pobj.is_finite() && res.primal.is_finite()) || norm(&y) > DIVERGED {
            status = Status::InfeasibleSuspected;
            break;
        }
        if p_ok && d_ok && gap_ok {
            let lmin = min_eigenvalue(&p.psd_value(z.as_slice()))?;
            let eq = p.equality_residual(z.as_slice());
            let b_norm = af.b.amax();
            if lmin >= -10.0 * settings.eps_abs && eq <= settings.eps_abs * (1.0 + b_norm) {
                res.min_eigenvalue = lmin;
                status = Status::Optimal;
                break;
            }
            tighten *= 0.1;
        }

        if settings.adaptive_rho && iter % ADAPT_EVERY == 0 {
            let pr = res.primal / g_norm.max(1e-30);
            let dr = res.dual / c_norm.max(fy_norm).max(1e-30);
            if pr > 0.0 && dr > 0.0 {
                let ratio = (pr / dr).sqrt();
                if !(0.2..=5.0).contains(&ratio) {
                    let new_rho = (rho * ratio).clamp(RHO_MIN, RHO_MAX);
                    let scale = rho / new_rho;
                    u.iter_mut().for_each(|x| *x *= scale);
                    rho = new_rho;
                }
            }
        }
    }

    if status != Status::Optimal {
        res.min_eigenvalue = min_eigenvalue(&p.psd_value(z.as_slice())).unwrap_or(f64::NAN);
    }
    res.equality = p.equality_residual(z.as_slice());
    Ok(Solution {
        status,
        dual: u.iter().map(|x| -rho * x).collect(),
        z: z.as_slice().to_vec(),
        objective_value: pobj,
        dual_objective: dobj,
        residuals: res,
        iterations: iter,
        seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tight() -> SolverSettings {
        SolverSettings::with_eps(1e-9)
    }

    #[test]
    fn two_by_two_lower_bound() {
        // min t  s.t. [[t, 1], [1, t]] PSD
        let mut p = ConeProgram::new(1, 2);
        p.objective = vec![1.0];
        p.constant = vec![(0, 1, 1.0)];
        p.psd_map = vec![(0, vec![(0, 0, 1.0), (1, 1, 1.0)])];
        let sol = solve(&p, &tight(), None).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.z[0] - 1.0).abs() < 1e-7, "{}", sol.z[0]);
    }

    #[test]
    fn equality_constraints_hold() {
        // min x + y  s.t. [[x, 1], [1, y]] PSD, x - y = 3  ->  x = (3 + sqrt 13)/2
        let mut p = ConeProgram::new(2, 2);
        p.objective = vec![1.0, 1.0];
        p.constant = vec![(0, 1, 1.0)];
        p.psd_map = vec![(0, vec![(0, 0, 1.0)]), (1, vec![(1, 1, 1.0)])];
        p.eq_rows = vec![vec![(0, 1.0), (1, -1.0)]];
        p.eq_rhs = vec![3.0];
        let sol = solve(&p, &tight(), None).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        let x = (3.0 + 13f64.sqrt()) / 2.0;
        assert!((sol.z[0] - x).abs() < 1e-6);
        assert!(sol.residuals.equality < 1e-9);
    }

    #[test]
    fn dependent_equalities_are_rejected() {
        let mut p = ConeProgram::new(1, 1);
        p.psd_map = vec![(0, vec![(0, 0, 1.0)])];
        p.eq_rows = vec![vec![(0, 1.0)], vec![(0, 2.0)]];
        p.eq_rhs = vec![1.0, 2.0];
        assert!(solve(&p, &tight(), None).is_err());
    }

    #[test]
    fn warm_start_from_the_optimum_is_quick() {
        let mut p = ConeProgram::new(1, 2);
        p.objective = vec![1.0];
        p.constant = vec![(0, 1, 1.0)];
        p.psd_map = vec![(0, vec![(0, 0, 1.0), (1, 1, 1.0)])];
        let cold = solve(&p, &tight(), None).unwrap();
        let warm = WarmStart { z: cold.z.clone(), dual: cold.dual.clone() };
        let again = solve(&p, &tight(), Some(&warm)).unwrap();
        assert_eq!(again.status, Status::Optimal);
        assert!(again.iterations <= cold.iterations);
    }
}
