//! Brute-force finite-difference oracle: 1D and 2D Schrödinger operators
//! `-Δ + V` with Dirichlet boundaries, lowest eigenpairs by shift-invert
//! Krylov-Schur, and grid-refinement utilities.
//!
//! Two-dimensional domains are squares `[lo, hi]²` sampled with `n` nodes per
//! axis (boundary included). Besides the full square the oracle supports the
//! upper triangle `x2 > x1` with Dirichlet nodes on and near the diagonal,
//! which is also the sector of functions odd under `x1 <-> x2`, and the
//! sector of even functions, where the diagonal nodes couple to their
//! off-diagonal neighbours with weight `√2`.

use rayon::prelude::*;
use serde::Serialize;

use crate::eigen::{krylov_schur, KrylovOptions, LinearOperator, Target};
use crate::error::{Error, Result};
use crate::field::Field2D;
use crate::grid::{Grid2D, SampledField};
use crate::quad::{dot, norm};

/// Shape of the discretized domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    /// One-dimensional interval; the potential is evaluated at `(x, 0)`.
    Interval,
    Square,
    /// Unknowns at interior nodes with `j - i >= offset` (`j` indexes `x2`).
    UpperTriangle {
        offset: usize,
    },
    /// Functions even under `x1 <-> x2`, unknowns at interior nodes `j >= i`.
    SymmetricSector,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    /// Nodes per axis, boundary included.
    pub n: usize,
    pub domain: Domain,
}

/// Fewer nodes than this per axis are rejected for 2D production runs.
pub const MIN_PRODUCTION_NODES: usize = 64;

impl GridSpec {
    pub fn new(lo: f64, hi: f64, n: usize, domain: Domain) -> Result<Self> {
        if !(hi > lo) || n < 5 {
            return Err(Error::GridTooCoarse(format!("[{lo}, {hi}] with {n} nodes")));
        }
        if let Domain::UpperTriangle { offset } = domain {
            if offset == 0 {
                return Err(Error::InvalidParameter("triangle offset must be at least one cell".into()));
            }
        }
        Ok(Self { lo, hi, n, domain })
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.spacing()
    }

    /// Tensor grid carrying the 2D unknowns.
    pub fn grid(&self) -> Grid2D {
        Grid2D::square(self.lo, self.hi, self.n).expect("validated on construction")
    }

    /// Same domain with half the spacing.
    pub fn refined(&self) -> Self {
        Self { n: 2 * (self.n - 1) + 1, ..*self }
    }

    /// Same domain with twice the spacing.
    pub fn coarsened(&self) -> Result<Self> {
        if self.n % 2 == 0 {
            return Err(Error::GridTooCoarse("coarsening needs an odd node count".into()));
        }
        Self::new(self.lo, self.hi, (self.n - 1) / 2 + 1, self.domain)
    }

    fn is_unknown(&self, i: usize, j: usize) -> bool {
        let interior = |k: usize| k >= 1 && k + 1 < self.n;
        match self.domain {
            Domain::Interval => interior(i),
            Domain::Square => interior(i) && interior(j),
            Domain::UpperTriangle { offset } => interior(i) && interior(j) && j >= i + offset,
            Domain::SymmetricSector => interior(i) && interior(j) && j >= i,
        }
    }
}

/// `-Δ + V` on the unknowns of a [`GridSpec`], stored as a diagonal plus up
/// to four off-diagonal couplings per row.
#[derive(Clone, Debug)]
pub struct DiscreteHamiltonian {
    pub spec: GridSpec,
    /// `(i, j)` grid indices of each unknown, row-major.
    pub nodes: Vec<(u32, u32)>,
    pub potential: Vec<f64>,
    pub diag: Vec<f64>,
    neighbours: Vec<[u32; 4]>,
    weights: Vec<[f64; 4]>,
}

const NONE: u32 = u32::MAX;

impl DiscreteHamiltonian {
    pub fn assemble(potential: &dyn Field2D, spec: GridSpec) -> Result<Self> {
        let n = spec.n;
        let h = spec.spacing();
        let inv_h2 = 1.0 / (h * h);
        let one_d = spec.domain == Domain::Interval;
        let mut nodes = Vec::new();
        let mut index = vec![NONE; if one_d { n } else { n * n }];
        let rows = if one_d { 1 } else { n };
        for j in 0..rows {
            for i in 0..n {
                if spec.is_unknown(i, j) {
                    index[j * n + i] = nodes.len() as u32;
                    nodes.push((i as u32, j as u32));
                }
            }
        }
        if nodes.is_empty() {
            return Err(Error::EmptyMask);
        }
        let sampled: Vec<Result<f64>> = nodes
            .par_iter()
            .map(|&(i, j)| {
                let (x1, x2) =
                    if one_d { (spec.node(i as usize), 0.0) } else { (spec.node(i as usize), spec.node(j as usize)) };
                match potential.value(x1, x2) {
                    Ok(v) if v.is_finite() => Ok(v),
                    _ => Err(Error::SingularNode { x1, x2 }),
                }
            })
            .collect();
        let potential: Vec<f64> = sampled.into_iter().collect::<Result<_>>()?;
        let mut neighbours = vec![[NONE; 4]; nodes.len()];
        let mut weights = vec![[0.0; 4]; nodes.len()];
        let mut diag = Vec::with_capacity(nodes.len());
        for (k, &(i, j)) in nodes.iter().enumerate() {
            let (i, j) = (i as i64, j as i64);
            let lap = if one_d { 2.0 } else { 4.0 };
            diag.push(potential[k] + lap * inv_h2);
            let cand: Vec<(i64, i64)> =
                if one_d { vec![(i - 1, 0), (i + 1, 0)] } else { vec![(i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)] };
            for (slot, (ci, cj)) in cand.into_iter().enumerate() {
                let (mut ci, mut cj) = (ci, cj);
                let mut w = -inv_h2;
                if spec.domain == Domain::SymmetricSector {
                    if cj < ci {
                        std::mem::swap(&mut ci, &mut cj);
                    }
                    // even sector: unknowns scaled by √(multiplicity) so the
                    // folded stencil stays symmetric
                    if i == j && ci != cj {
                        w *= std::f64::consts::FRAC_1_SQRT_2;
                    } else if i != j && ci == cj {
                        w *= std::f64::consts::SQRT_2;
                    }
                }
                if ci < 0 || cj < 0 || ci >= n as i64 || cj >= n as i64 {
                    continue;
                }
                let idx = index[(cj as usize) * n + ci as usize];
                if idx != NONE {
                    neighbours[k][slot] = idx;
                    weights[k][slot] = w;
                }
            }
        }
        Ok(Self { spec, nodes, potential, diag, neighbours, weights })
    }

    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        const CHUNK: usize = 2048;
        y.par_chunks_mut(CHUNK).enumerate().for_each(|(c, out)| {
            for (off, yk) in out.iter_mut().enumerate() {
                let k = c * CHUNK + off;
                let mut acc = self.diag[k] * x[k];
                for s in 0..4 {
                    let nb = self.neighbours[k][s];
                    if nb != NONE {
                        acc += self.weights[k][s] * x[nb as usize];
                    }
                }
                *yk = acc;
            }
        });
    }

    /// `⟨x, H y⟩ - ⟨H x, y⟩`, zero up to round-off.
    pub fn symmetry_defect(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut hx = vec![0.0; self.dim()];
        let mut hy = vec![0.0; self.dim()];
        self.apply(x, &mut hx);
        self.apply(y, &mut hy);
        (dot(x, &hy) - dot(&hx, y)).abs()
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..self.dim() {
            let r: f64 = self.weights[k].iter().map(|w| w.abs()).sum();
            lo = lo.min(self.diag[k] - r);
            hi = hi.max(self.diag[k] + r);
        }
        (lo, hi)
    }

    pub fn norm_estimate(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    pub fn min_potential(&self) -> f64 {
        self.potential.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Grid function of a vector of unknowns, normalized to unit discrete
    /// L² norm on the full square. Sector solutions are unfolded: odd under
    /// reflection for the triangle and even for the symmetric sector.
    pub fn to_field(&self, v: &[f64]) -> Result<SampledField> {
        if self.spec.domain == Domain::Interval {
            return Err(Error::InvalidParameter("interval vectors have no 2D field".into()));
        }
        let grid = self.spec.grid();
        let n = self.spec.n;
        let mut out = SampledField::zeros(grid);
        let scale = match self.spec.domain {
            Domain::UpperTriangle { .. } => std::f64::consts::FRAC_1_SQRT_2,
            _ => 1.0,
        };
        for (k, &(i, j)) in self.nodes.iter().enumerate() {
            let (i, j) = (i as usize, j as usize);
            match self.spec.domain {
                Domain::Square => out.values[j * n + i] = v[k],
                Domain::UpperTriangle { .. } => {
                    out.values[j * n + i] = scale * v[k];
                    out.values[i * n + j] = -scale * v[k];
                }
                Domain::SymmetricSector => {
                    let u = if i == j { v[k] } else { v[k] * std::f64::consts::FRAC_1_SQRT_2 };
                    out.values[j * n + i] = u;
                    out.values[i * n + j] = u;
                }
                Domain::Interval => unreachable!(),
            }
        }
        let h2 = self.spec.spacing().powi(2);
        out.values.iter_mut().for_each(|x| *x /= h2.sqrt());
        Ok(out)
    }

    /// Fraction of the squared weight of `v` at nodes where `far` holds.
    pub fn weight_fraction(&self, v: &[f64], far: impl Fn(f64, f64) -> bool) -> f64 {
        let total: f64 = v.iter().map(|x| x * x).sum();
        let outer: f64 = self
            .nodes
            .iter()
            .zip(v)
            .filter(|(&(i, j), _)| far(self.spec.node(i as usize), self.spec.node(j as usize)))
            .map(|(_, x)| x * x)
            .sum();
        outer / total
    }
}

/// Lower Cholesky factor stored by rows over the envelope of a sparse
/// symmetric positive definite matrix.
pub struct EnvelopeCholesky {
    first: Vec<usize>,
    offsets: Vec<usize>,
    values: Vec<f64>,
}

/// Dot product with eight independent accumulators.
fn fast_dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for l in 0..8 {
            acc[l] += x[l] * y[l];
        }
    }
    let mut s = acc.iter().sum::<f64>();
    for (x, y) in ra.iter().zip(rb) {
        s += x * y;
    }
    s
}

impl EnvelopeCholesky {
    /// Factors `H - shift`.
    pub fn factor(h: &DiscreteHamiltonian, shift: f64) -> Result<Self> {
        let dim = h.dim();
        let first: Vec<usize> = (0..dim)
            .map(|k| h.neighbours[k].iter().filter(|&&nb| nb != NONE).map(|&nb| nb as usize).fold(k, usize::min))
            .collect();
        let mut offsets = Vec::with_capacity(dim + 1);
        offsets.push(0);
        for k in 0..dim {
            offsets.push(offsets[k] + (k - first[k] + 1));
        }
        let mut values = vec![0.0; offsets[dim]];
        for k in 0..dim {
            values[offsets[k + 1] - 1] = h.diag[k] - shift;
            for s in 0..4 {
                let nb = h.neighbours[k][s];
                if nb != NONE && (nb as usize) < k {
                    values[offsets[k] + nb as usize - first[k]] += h.weights[k][s];
                }
            }
        }
        for k in 0..dim {
            let (fk, ok) = (first[k], offsets[k]);
            let (prev, rest) = values.split_at_mut(ok);
            let cur = &mut rest[..k - fk + 1];
            for c in fk..k {
                let (fc, oc) = (first[c], offsets[c]);
                let start = fk.max(fc);
                let row_c = &prev[oc..oc + c - fc + 1];
                let s = fast_dot(&cur[start - fk..c - fk], &row_c[start - fc..c - fc]);
                cur[c - fk] = (cur[c - fk] - s) / row_c[c - fc];
            }
            let d = cur[k - fk] - fast_dot(&cur[..k - fk], &cur[..k - fk]);
            if !(d > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "shift {shift} is not below the spectrum (pivot {d:.3e} at row {k})"
                )));
            }
            cur[k - fk] = d.sqrt();
        }
        Ok(Self { first, offsets, values })
    }

    pub fn dim(&self) -> usize {
        self.first.len()
    }

    /// Solves `L Lᵀ x = b` in place.
    pub fn solve(&self, x: &mut [f64]) {
        let dim = self.dim();
        for k in 0..dim {
            let fk = self.first[k];
            let row = &self.values[self.offsets[k]..self.offsets[k + 1]];
            let s = fast_dot(&row[..k - fk], &x[fk..k]);
            x[k] = (x[k] - s) / row[k - fk];
        }
        for k in (0..dim).rev() {
            let fk = self.first[k];
            let row = &self.values[self.offsets[k]..self.offsets[k + 1]];
            x[k] /= row[k - fk];
            let xk = x[k];
            for (xi, l) in x[fk..k].iter_mut().zip(&row[..k - fk]) {
                *xi -= l * xk;
            }
        }
    }

    /// Stored entries, a measure of factorization cost.
    pub fn stored(&self) -> usize {
        self.values.len()
    }
}

/// `(H - shift)^{-1}` through a Cholesky factor.
struct ShiftInvert<'a> {
    chol: &'a EnvelopeCholesky,
}

impl LinearOperator for ShiftInvert<'_> {
    fn dim(&self) -> usize {
        self.chol.dim()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(x);
        self.chol.solve(y);
    }
}

/// Eigenpairs in ascending order of eigenvalue.
#[derive(Clone, Debug, Serialize)]
pub struct EigenResult {
    pub values: Vec<f64>,
    #[serde(skip)]
    pub vectors: Vec<Vec<f64>>,
    /// `‖H v - λ v‖` for each unit vector `v`.
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub shift: f64,
    pub norm_estimate: f64,
}

/// Which eigenpairs to compute.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Selection {
    Lowest(usize),
    Below(f64),
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    pub selection: Selection,
    /// Residual bound relative to the Gershgorin norm estimate.
    pub tol: f64,
    pub seed: u64,
    /// Shift for the inversion; defaults to just below the smallest
    /// potential sample, which bounds the spectrum from below.
    pub shift: Option<f64>,
}

/// Default start-vector seed.
pub const DEFAULT_SEED: u64 = 20_240_917;

impl SolverOptions {
    pub fn lowest(k: usize) -> Self {
        Self { selection: Selection::Lowest(k), tol: 1e-8, seed: DEFAULT_SEED, shift: None }
    }

    pub fn below(e_max: f64) -> Self {
        Self { selection: Selection::Below(e_max), tol: 1e-8, seed: DEFAULT_SEED, shift: None }
    }
}

/// Lowest eigenpairs of `h`. Every returned pair has
/// `‖H v - λ v‖ <= tol * ‖H‖_est`.
pub fn lowest_eigenpairs(h: &DiscreteHamiltonian, opts: &SolverOptions) -> Result<EigenResult> {
    if let Selection::Lowest(0) = opts.selection {
        return Err(Error::InvalidParameter("need at least one eigenpair".into()));
    }
    let shift = opts.shift.unwrap_or_else(|| h.min_potential() - 1.0);
    let chol = EnvelopeCholesky::factor(h, shift)?;
    let target = match opts.selection {
        Selection::Lowest(k) => Target::Largest(k.min(h.dim())),
        Selection::Below(e) => {
            if e <= shift {
                return Err(Error::InvalidParameter(format!("energy cap {e} is below the shift {shift}")));
            }
            Target::Above(1.0 / (e - shift))
        }
    };
    let mut kopts = KrylovOptions::new(target);
    kopts.seed = opts.seed;
    let ritz = krylov_schur(&ShiftInvert { chol: &chol }, &kopts)?;
    let norm_estimate = h.norm_estimate();
    let mut pairs: Vec<(f64, Vec<f64>, f64)> = ritz
        .vectors
        .into_par_iter()
        .map(|mut v| {
            let nv = norm(&v);
            v.iter_mut().for_each(|x| *x /= nv);
            let mut hv = vec![0.0; v.len()];
            h.apply(&v, &mut hv);
            let lambda = dot(&v, &hv);
            let r: f64 = hv.iter().zip(&v).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
            (lambda, v, r)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let worst = pairs.iter().map(|p| p.2).fold(0.0f64, f64::max);
    if worst > opts.tol * norm_estimate {
        return Err(Error::NoConvergence { iterations: ritz.operator_applications, residual: worst });
    }
    Ok(EigenResult {
        values: pairs.iter().map(|p| p.0).collect(),
        residuals: pairs.iter().map(|p| p.2).collect(),
        vectors: pairs.into_iter().map(|p| p.1).collect(),
        iterations: ritz.operator_applications,
        shift,
        norm_estimate,
    })
}

/// Richardson extrapolation of a quantity with `O(h²)` error:
/// `fine + (fine - coarse) / (r² - 1)` with `r = h_coarse / h_fine`.
pub fn richardson(fine: f64, coarse: f64, ratio: f64) -> f64 {
    fine + (fine - coarse) / (ratio * ratio - 1.0)
}

/// Pairs each fine-grid value with the nearest unused coarse-grid value
/// within `window`, in order of the fine values.
pub fn match_levels(fine: &[f64], coarse: &[f64], window: f64) -> Vec<Option<usize>> {
    let mut used = vec![false; coarse.len()];
    fine.iter()
        .map(|&f| {
            let best = coarse
                .iter()
                .enumerate()
                .filter(|(k, c)| !used[*k] && (*c - f).abs() <= window)
                .min_by(|a, b| (a.1 - f).abs().total_cmp(&(b.1 - f).abs()))
                .map(|(k, _)| k);
            if let Some(k) = best {
                used[k] = true;
            }
            best
        })
        .collect()
}

/// Default box for 2D bound-state scans at the reference couplings.
pub const DEFAULT_2D_DOMAIN: (f64, f64) = (-1.5, 9.5);
pub const DEFAULT_2D_NODES: usize = 400;
/// Eigenvectors with more than this fraction of their weight in the outer
/// part of the box are box states rather than bound states.
pub const LOCALIZATION_WEIGHT: f64 = 0.05;
/// Fraction of the box, measured from `lo`, inside which bound states live.
pub const LOCALIZATION_EXTENT: f64 = 0.7;

#[derive(Clone, Debug, Serialize)]
pub struct ScanLevel {
    pub energy: f64,
    pub residual: f64,
    /// Weight at nodes with `max(x1, x2)` beyond the localization extent.
    pub outer_weight: f64,
    pub localized: bool,
}

/// Every eigenvalue below a cap on one grid, with localization flags.
#[derive(Clone, Debug, Serialize)]
pub struct Scan {
    pub spec: GridSpec,
    pub levels: Vec<ScanLevel>,
    pub iterations: usize,
    pub norm_estimate: f64,
}

impl Scan {
    pub fn localized(&self) -> Vec<f64> {
        self.levels.iter().filter(|l| l.localized).map(|l| l.energy).collect()
    }

    /// Largest residual relative to the norm estimate.
    pub fn worst_residual(&self) -> f64 {
        self.levels.iter().map(|l| l.residual).fold(0.0, f64::max) / self.norm_estimate
    }
}

/// Eigenvalues of `-Δ + V` below `e_max` on `spec`.
pub fn scan_below(potential: &dyn Field2D, spec: GridSpec, e_max: f64, seed: u64) -> Result<Scan> {
    let h = DiscreteHamiltonian::assemble(potential, spec)?;
    let mut opts = SolverOptions::below(e_max);
    opts.seed = seed;
    let r = lowest_eigenpairs(&h, &opts)?;
    let edge = spec.lo + LOCALIZATION_EXTENT * (spec.hi - spec.lo);
    let levels = r
        .values
        .iter()
        .zip(&r.vectors)
        .zip(&r.residuals)
        .map(|((&energy, v), &residual)| {
            let outer_weight = h.weight_fraction(v, |x1, x2| x1.max(x2) > edge);
            ScanLevel { energy, residual, outer_weight, localized: outer_weight < LOCALIZATION_WEIGHT }
        })
        .collect();
    Ok(Scan { spec, levels, iterations: r.iterations, norm_estimate: r.norm_estimate })
}

/// Localized fine-grid levels, Richardson-extrapolated against their match
/// among the coarse localized levels. Unmatched levels keep the fine value.
pub fn extrapolate_localized(fine: &Scan, coarse: &Scan, window: f64) -> Vec<f64> {
    let (f, c) = (fine.localized(), coarse.localized());
    let ratio = coarse.spec.spacing() / fine.spec.spacing();
    match_levels(&f, &c, window)
        .into_iter()
        .zip(&f)
        .map(|(m, &x)| m.map_or(x, |k| richardson(x, c[k], ratio)))
        .collect()
}

/// For each target, the distance to the nearest value.
pub fn nearest_distances(targets: &[f64], values: &[f64]) -> Vec<f64> {
    targets.iter().map(|t| values.iter().map(|v| (v - t).abs()).fold(f64::INFINITY, f64::min)).collect()
}

/// Observed convergence order from errors at spacings `h` and `h / 2`.
pub fn observed_order(coarse_error: f64, fine_error: f64) -> f64 {
    (coarse_error / fine_error).log2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FnField;
    use crate::field::Jet2;
    use crate::special1d::{MorseParams, MorseWell};

    fn zero_potential() -> impl Field2D {
        FnField::new(2, |_, _| Ok(Jet2::ZERO))
    }

    #[test]
    fn particle_in_a_box_converges_at_second_order() {
        let l = 2.0;
        let exact = (std::f64::consts::PI / l).powi(2);
        let err = |n: usize| {
            let h =
                DiscreteHamiltonian::assemble(&zero_potential(), GridSpec::new(0.0, l, n, Domain::Interval).unwrap())
                    .unwrap();
            (lowest_eigenpairs(&h, &SolverOptions::lowest(1)).unwrap().values[0] - exact).abs()
        };
        let order = observed_order(err(101), err(201));
        assert!((1.9..2.1).contains(&order), "{order}");
    }

    #[test]
    fn harmonic_ground_state() {
        let v = FnField::new(2, |x: f64, _| Ok(Jet2::constant(x * x)));
        let h = DiscreteHamiltonian::assemble(&v, GridSpec::new(-8.0, 8.0, 1601, Domain::Interval).unwrap()).unwrap();
        let r = lowest_eigenpairs(&h, &SolverOptions::lowest(1)).unwrap();
        assert!((r.values[0] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn morse_calibration_levels() {
        let well = MorseWell(MorseParams::new(30.25, 1.0).unwrap());
        let h =
            DiscreteHamiltonian::assemble(&well, GridSpec::new(-2.0, 16.0, 2000, Domain::Interval).unwrap()).unwrap();
        let r = lowest_eigenpairs(&h, &SolverOptions::lowest(5)).unwrap();
        for (e, x) in r.values.iter().zip([-25.0, -16.0, -9.0, -4.0, -1.0]) {
            assert!((e - x).abs() < 1e-3, "{e} vs {x}");
        }
        assert!(r.residuals.iter().all(|x| *x <= 1e-8 * r.norm_estimate));
    }

    #[test]
    fn sectors_reproduce_the_full_square() {
        let v = FnField::new(2, |x1: f64, x2: f64| Ok(Jet2::constant(0.5 * (x1 * x1 + x2 * x2) + 0.1 * x1 * x2)));
        let spec = |d| GridSpec::new(-5.0, 5.0, 61, d).unwrap();
        let solve = |d| {
            let h = DiscreteHamiltonian::assemble(&v, spec(d)).unwrap();
            lowest_eigenpairs(&h, &SolverOptions::below(4.0)).unwrap().values
        };
        let full = solve(Domain::Square);
        let mut sectors = solve(Domain::SymmetricSector);
        sectors.extend(solve(Domain::UpperTriangle { offset: 1 }));
        sectors.sort_by(f64::total_cmp);
        assert_eq!(full.len(), sectors.len());
        for (a, b) in full.iter().zip(&sectors) {
            assert!((a - b).abs() < 1e-9, "{a} {b}");
        }
    }

    #[test]
    fn assembled_operator_is_symmetric() {
        let v = FnField::new(2, |x1: f64, x2: f64| Ok(Jet2::constant((x1 - x2).cos())));
        for d in [Domain::Square, Domain::SymmetricSector, Domain::UpperTriangle { offset: 2 }] {
            let h = DiscreteHamiltonian::assemble(&v, GridSpec::new(-1.0, 1.0, 31, d).unwrap()).unwrap();
            let x: Vec<f64> = (0..h.dim()).map(|k| (k as f64 * 0.3).sin()).collect();
            let y: Vec<f64> = (0..h.dim()).map(|k| (k as f64 * 0.7).cos()).collect();
            assert!(h.symmetry_defect(&x, &y) < 1e-9 * h.norm_estimate());
        }
    }

    #[test]
    fn cholesky_solves() {
        let v = FnField::new(2, |x1: f64, _| Ok(Jet2::constant(x1)));
        let h = DiscreteHamiltonian::assemble(
            &v,
            GridSpec::new(0.0, 1.0, 21, Domain::UpperTriangle { offset: 1 }).unwrap(),
        )
        .unwrap();
        let chol = EnvelopeCholesky::factor(&h, -3.0).unwrap();
        let b: Vec<f64> = (0..h.dim()).map(|k| (k as f64).sqrt()).collect();
        let mut x = b.clone();
        chol.solve(&mut x);
        let mut hx = vec![0.0; h.dim()];
        h.apply(&x, &mut hx);
        let err: f64 = hx.iter().zip(&x).zip(&b).map(|((a, xi), bi)| (a + 3.0 * xi - bi).abs()).fold(0.0, f64::max);
        assert!(err < 1e-9);
        assert!(EnvelopeCholesky::factor(&h, 1e6).is_err());
    }

    #[test]
    fn singular_node_is_reported() {
        let v = FnField::new(2, |x1: f64, x2: f64| Ok(Jet2::constant(1.0 / (x1 - x2))));
        let r = DiscreteHamiltonian::assemble(&v, GridSpec::new(0.0, 1.0, 11, Domain::Square).unwrap());
        assert!(matches!(r, Err(Error::SingularNode { .. })));
        assert!(DiscreteHamiltonian::assemble(
            &v,
            GridSpec::new(0.0, 1.0, 11, Domain::UpperTriangle { offset: 1 }).unwrap()
        )
        .is_ok());
    }

    #[test]
    fn deterministic_eigenvalues() {
        let well = MorseWell(MorseParams::new(30.25, 1.0).unwrap());
        let h =
            DiscreteHamiltonian::assemble(&well, GridSpec::new(-2.0, 16.0, 800, Domain::Interval).unwrap()).unwrap();
        let a = lowest_eigenpairs(&h, &SolverOptions::lowest(3)).unwrap();
        let b = lowest_eigenpairs(&h, &SolverOptions::lowest(3)).unwrap();
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn richardson_and_matching() {
        // E(h) = 1 + 3h²
        assert!((richardson(1.0 + 3.0 * 0.01, 1.0 + 3.0 * 0.04, 2.0) - 1.0).abs() < 1e-14);
        assert_eq!(match_levels(&[1.0, 2.0, 5.0], &[2.1, 0.95], 0.2), vec![Some(1), Some(0), None]);
    }
}
