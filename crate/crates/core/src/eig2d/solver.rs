//! Smallest-eigenpair solvers: Jacobi-preconditioned CG inner solves with
//! zero shift, a Rayleigh–Ritz accelerated outer iteration, and a dense
//! cross-validation oracle.

use super::Operator2d;
use crate::error::Error;
use crate::Result;
use nalgebra::{DMatrix, DVector};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    // Sequential fixed-order reduction: results do not depend on the
    // worker-thread count.
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solve A z = b by preconditioned conjugate gradients to a relative
/// residual of `tol`. A is SPD (Dirichlet Laplacian plus V ≥ 1).
pub fn cg_solve(op: &Operator2d, b: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = b.len();
    let inv_diag: Vec<f64> = op.diag().iter().map(|d| 1.0 / d).collect();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let b_norm = norm(b).max(1e-300);
    let mut ap = vec![0.0; n];
    for _ in 0..max_iter {
        if norm(&r) <= tol * b_norm {
            return Ok(x);
        }
        op.matvec(&p, &mut ap);
        let p_ap = dot(&p, &ap);
        if p_ap <= 0.0 {
            return Err(Error::LinearSolveFailed(
                "CG lost positive definiteness".into(),
            ));
        }
        let alpha = rz / p_ap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    if norm(&r) <= tol * b_norm {
        Ok(x)
    } else {
        Err(Error::LinearSolveFailed(format!(
            "CG stalled at relative residual {:.3e} after {max_iter} iterations",
            norm(&r) / b_norm
        )))
    }
}

/// Smallest eigenpair of the operator. Inner solves use CG with zero
/// shift (the operator itself is SPD); the outer iteration is inverse
/// iteration accelerated by a Rayleigh–Ritz step on span{x, A⁻¹x, p},
/// which keeps the step budget bounded when the spectral gap is small.
/// Returns (eigenvalue, unit eigenvector in unknown ordering, residual).
pub fn smallest_eigenpair(op: &Operator2d, max_outer: usize) -> Result<(f64, Vec<f64>, f64)> {
    let n = op.n();
    if n == 0 {
        return Err(Error::EmptyDomain("operator has no unknowns"));
    }
    let cg_iters = 10 * n;
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut p: Option<Vec<f64>> = None;
    let mut rho_prev = f64::INFINITY;
    let mut ax = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    let mut rho_est = 0.0;
    let mut stagnant = 0usize;
    let mut polish = false;
    for _ in 0..max_outer {
        // Clean the stiff capped-potential rows before measuring: their
        // entries are slaved to the neighbors and must not carry
        // iteration noise into the residual or the Ritz matrix.
        op.slave_stiff_rows(&mut x, rho_est, 1e3);
        let nx0 = norm(&x);
        for v in &mut x {
            *v /= nx0;
        }
        op.matvec(&x, &mut ax);
        let rho = dot(&x, &ax);
        rho_est = rho;
        let r: Vec<f64> = ax.iter().zip(&x).map(|(a, b)| a - rho * b).collect();
        let resid = norm(&r);
        if std::env::var("LENSCALE_TRACE").is_ok() {
            eprintln!(
                "outer: rho={rho:.14e} resid={resid:.3e} drho={:.3e}",
                (rho - rho_prev).abs()
            );
        }
        let rho_settled = (rho - rho_prev).abs() <= 1e-12 * (1.0 + rho.abs());
        if rho_settled && resid <= 1e-8 {
            // Sign convention: ground state positive.
            if x.iter().sum::<f64>() < 0.0 {
                for v in &mut x {
                    *v = -*v;
                }
            }
            return Ok((rho, x, resid));
        }
        // The Rayleigh-Ritz recombination stops helping once rho has
        // converged to machine precision: its small-subspace algebra
        // reinjects noise at the residual scale. Switch to plain inverse
        // iteration, which contracts the residual monotonically.
        if rho_settled && !polish {
            stagnant += 1;
            if stagnant >= 3 {
                polish = true;
            }
        }
        rho_prev = rho;
        if polish {
            let z = cg_solve(op, &x, 1e-14, cg_iters)?;
            let nz = norm(&z);
            for (xi, zi) in x.iter_mut().zip(&z) {
                *xi = zi / nz;
            }
            continue;
        }
        let w = cg_solve(op, &x, 1e-12, cg_iters)?;
        // Jacobi-preconditioned residual: dividing by the diagonal damps
        // the stiff high-V rows, whose raw-residual noise otherwise
        // stalls the iteration just above the residual target.
        let rp: Vec<f64> = r.iter().zip(op.diag()).map(|(ri, d)| ri / d).collect();
        // Orthonormal basis of span{x, w, D^-1 r, p} by repeated Gram-Schmidt.
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(4);
        for cand in [Some(&x), Some(&w), Some(&rp), p.as_ref()]
            .into_iter()
            .flatten()
        {
            let mut v = cand.clone();
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(&v, b);
                    for i in 0..n {
                        v[i] -= c * b[i];
                    }
                }
            }
            let nv = norm(&v);
            if nv > 1e-10 * norm(cand).max(1.0) {
                for vi in &mut v {
                    *vi /= nv;
                }
                basis.push(v);
            }
        }
        let k = basis.len();
        let mut avs: Vec<Vec<f64>> = Vec::with_capacity(k);
        for b in &basis {
            op.matvec(b, &mut scratch);
            avs.push(scratch.clone());
        }
        let mut g = DMatrix::zeros(k, k);
        for a in 0..k {
            for bb in a..k {
                let val = dot(&basis[a], &avs[bb]);
                g[(a, bb)] = val;
                g[(bb, a)] = val;
            }
        }
        let eig = g.symmetric_eigen();
        let mut best = 0;
        for idx in 1..k {
            if eig.eigenvalues[idx] < eig.eigenvalues[best] {
                best = idx;
            }
        }
        let coeffs: DVector<f64> = eig.eigenvectors.column(best).into();
        let mut x_new = vec![0.0; n];
        for (a, b) in basis.iter().enumerate() {
            let c = coeffs[a];
            for i in 0..n {
                x_new[i] += c * b[i];
            }
        }
        let nv = norm(&x_new);
        for v in &mut x_new {
            *v /= nv;
        }
        // Search direction: the part of the new iterate orthogonal to x.
        let cx = dot(&x_new, &x);
        let mut pd: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - cx * b).collect();
        let np = norm(&pd);
        p = if np > 1e-12 {
            for v in &mut pd {
                *v /= np;
            }
            Some(pd)
        } else {
            None
        };
        x = x_new;
    }
    Err(Error::EigSolveFailed(format!(
        "eigen iteration did not converge in {max_outer} outer steps"
    )))
}

/// Full dense symmetric eigendecomposition; smallest pair. Capped so the
/// O(n³) cost stays sane.
pub fn dense_smallest(op: &Operator2d, cap: usize) -> Result<(f64, Vec<f64>)> {
    let n = op.n();
    if n > cap {
        return Err(Error::OracleTooLarge(n, cap));
    }
    let dense = op.to_dense();
    let eig = dense.symmetric_eigen();
    let mut best = 0;
    for i in 1..n {
        if eig.eigenvalues[i] < eig.eigenvalues[best] {
            best = i;
        }
    }
    let mut v: Vec<f64> = eig.eigenvectors.column(best).iter().cloned().collect();
    if v.iter().sum::<f64>() < 0.0 {
        for x in &mut v {
            *x = -*x;
        }
    }
    Ok((eig.eigenvalues[best], v))
}
