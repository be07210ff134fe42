//! Thick-restart Krylov-Schur iteration for the algebraically largest
//! eigenvalues of a symmetric operator, with full double Gram-Schmidt
//! reorthogonalization.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::quad::{dot, norm};

/// A symmetric linear map on `R^dim`.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// Which part of the spectrum is wanted.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Target {
    /// The `k` algebraically largest eigenvalues.
    Largest(usize),
    /// Every eigenvalue above the threshold.
    Above(f64),
}

#[derive(Clone, Debug)]
pub struct KrylovOptions {
    pub target: Target,
    /// Initial basis size; grows when more pairs are wanted.
    pub max_dim: usize,
    /// Converged when `|β y_m| <= tol * |θ_max|`.
    pub tol: f64,
    pub max_restarts: usize,
    pub seed: u64,
    /// Extra converged pairs required past the wanted ones, so that no
    /// eigenvalue inside the wanted range is skipped.
    pub guard: usize,
}

impl KrylovOptions {
    pub fn new(target: Target) -> Self {
        Self { target, max_dim: 60, tol: 1e-11, max_restarts: 400, seed: 0x5eed, guard: 4 }
    }
}

/// Ritz pairs, eigenvalues in descending order.
#[derive(Clone, Debug)]
pub struct RitzPairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residual_estimates: Vec<f64>,
    pub restarts: usize,
    pub operator_applications: usize,
}

fn random_unit(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let n = norm(&v);
    v.iter_mut().for_each(|x| *x /= n);
    v
}

/// Removes the components of `w` along `basis` (two passes) and returns the
/// accumulated coefficients.
fn orthogonalize(basis: &[Vec<f64>], w: &mut [f64]) -> Vec<f64> {
    let mut h = vec![0.0; basis.len()];
    for _ in 0..2 {
        let c: Vec<f64> = basis.iter().map(|b| dot(b, w)).collect();
        for (b, ci) in basis.iter().zip(&c) {
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= ci * bi;
            }
        }
        h.iter_mut().zip(&c).for_each(|(a, b)| *a += b);
    }
    h
}

/// Linear combinations `Σ_l basis[l] * y[(l, i)]` for the first `count`
/// columns of `y`.
fn combine(basis: &[Vec<f64>], y: &DMatrix<f64>, count: usize) -> Vec<Vec<f64>> {
    use rayon::prelude::*;
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut out = vec![0.0; basis[0].len()];
            for (l, b) in basis.iter().enumerate().take(y.nrows()) {
                let c = y[(l, i)];
                for (o, bi) in out.iter_mut().zip(b) {
                    *o += c * bi;
                }
            }
            out
        })
        .collect()
}

pub fn krylov_schur(op: &dyn LinearOperator, opts: &KrylovOptions) -> Result<RitzPairs> {
    let dim = op.dim();
    if dim == 0 {
        return Err(Error::InvalidParameter("operator has dimension zero".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut m = opts.max_dim.min(dim).max(2);
    if let Target::Largest(k) = opts.target {
        m = m.max((2 * (k + opts.guard) + 10).min(dim));
    }
    let mut basis: Vec<Vec<f64>> = vec![random_unit(dim, &mut rng)];
    let mut t = DMatrix::<f64>::zeros(m, m);
    let mut kept = 0usize;
    let mut applications = 0usize;
    let mut w = vec![0.0; dim];
    for restart in 0..=opts.max_restarts {
        let mut beta = 0.0;
        let mut j = kept;
        while j < m {
            op.apply(&basis[j], &mut w);
            applications += 1;
            let h = orthogonalize(&basis, &mut w);
            for (i, hi) in h.iter().enumerate().take(j + 1) {
                t[(i, j)] = *hi;
                t[(j, i)] = *hi;
            }
            beta = norm(&w);
            let scale = h[j].abs().max(1e-300);
            if j + 1 == dim {
                beta = 0.0;
                j += 1;
                break;
            }
            if beta <= 1e-13 * scale {
                // invariant subspace: continue with a fresh direction
                let mut fresh = random_unit(dim, &mut rng);
                orthogonalize(&basis, &mut fresh);
                let n = norm(&fresh);
                fresh.iter_mut().for_each(|x| *x /= n);
                basis.push(fresh);
                beta = 0.0;
            } else {
                basis.push(w.iter().map(|x| x / beta).collect());
            }
            if j + 1 < m {
                t[(j + 1, j)] = beta;
                t[(j, j + 1)] = beta;
            }
            j += 1;
        }
        let size = j;
        let sub = t.view((0, 0), (size, size)).into_owned();
        let sym = (&sub + sub.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);
        let mut order: Vec<usize> = (0..size).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let theta: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let y = DMatrix::from_fn(size, size, |r, c| eig.eigenvectors[(r, order[c])]);
        let res: Vec<f64> = (0..size).map(|i| (beta * y[(size - 1, i)]).abs()).collect();
        let scale = theta.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let wanted = match opts.target {
            Target::Largest(k) => k.min(size),
            Target::Above(th) => theta.iter().take_while(|&&x| x > th).count(),
        };
        let need = (wanted + opts.guard).min(size);
        let done = size == dim || res[..need].iter().all(|r| *r <= opts.tol * scale);
        if done || restart == opts.max_restarts {
            if !done {
                let worst = res[..need].iter().fold(0.0f64, |a, b| a.max(*b));
                return Err(Error::NoConvergence { iterations: applications, residual: worst / scale });
            }
            let vectors = combine(&basis[..size], &y, wanted);
            return Ok(RitzPairs {
                values: theta[..wanted].to_vec(),
                vectors,
                residual_estimates: res[..wanted].to_vec(),
                restarts: restart,
                operator_applications: applications,
            });
        }
        // grow the basis if the wanted set crowds it
        if need + 10 > (m * 3) / 5 && m < dim {
            m = (2 * m).max(2 * need + 20).min(dim);
        }
        let keep = (need + (m - need) / 3).min(m.saturating_sub(8)).max(need).min(size - 1);
        let mut next = combine(&basis[..size], &y, keep);
        next.push(basis[size].clone());
        basis = next;
        t = DMatrix::zeros(m, m);
        for i in 0..keep {
            t[(i, i)] = theta[i];
            let b = beta * y[(size - 1, i)];
            t[(i, keep)] = b;
            t[(keep, i)] = b;
        }
        kept = keep;
    }
    unreachable!("loop returns on the final restart")
}
