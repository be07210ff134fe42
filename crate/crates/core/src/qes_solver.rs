//! Zero-mode construction for `H⁽¹⁾`: the zero modes `Ω_n` of `Q⁺`, the
//! coupling matrix `Ĉ` with `H⁽¹⁾ Ω_n = Σ_k c_{nk} Ω_k`, the algebraic part
//! of the spectrum and its eigenfunctions, and the descent along the
//! shape-invariance chain.
//!
//! The zero modes are `Ω_n = e^{χ} η_n(x1) η_n(x2)` with the Morse bound
//! states `η_n`; they are normalizable when `a < -1/4 - 1/(4√2)` and
//! `s_n > -2a`. All energies here use the full energy zero.

use std::sync::Arc;

use nalgebra::{DMatrix, SVD};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Combination, Field2D, FnField, Jet2};
use crate::grid::SampledField;
use crate::model2d::{
    hamiltonian, shape_invariance_shift, supercharge, Branch, EnergyZero, ModelParams, Sign, SuperchargeField,
    SuperchargePart,
};
use crate::operators::OperatorChain;
use crate::oracle::{richardson, Domain, GridSpec, DEFAULT_2D_DOMAIN, DEFAULT_2D_NODES};
use crate::special1d::{morse_eigenfunction, MorseEigenfunction};
use crate::spectrum::{Level, SpectrumTable};

/// Largest Gram condition number accepted by the Galerkin projection.
pub const MAX_GRAM_CONDITION: f64 = 1e10;
/// Relative gap below which two diagonal entries count as coinciding.
pub const DEGENERATE_DIAGONAL_TOL: f64 = 1e-6;
/// Image norms below this fraction of the input norm are treated as zero.
pub const NULL_IMAGE_RATIO: f64 = 1e-6;

/// Why `n` does or does not carry a normalizable zero mode.
pub fn admissibility(n: usize, params: &ModelParams) -> Result<()> {
    if !params.qes_admissible() {
        return Err(Error::Inadmissible {
            n,
            reason: format!("a = {} is outside the window a < -1/4 - 1/(4√2)", params.a),
        });
    }
    let s = params.morse.s(n);
    if s <= -2.0 * params.a {
        return Err(Error::Inadmissible { n, reason: format!("s_n = {s} does not exceed -2a = {}", -2.0 * params.a) });
    }
    Ok(())
}

/// Indices `n` with a normalizable zero mode, ascending.
pub fn admissible_indices(params: &ModelParams) -> Vec<usize> {
    (0..).take_while(|&n| params.morse.s(n) > 0.0).filter(|&n| admissibility(n, params).is_ok()).collect()
}

/// `E_k = -2α² s_k (s_k + 2a)`.
pub fn qes_energy(k: usize, params: &ModelParams) -> f64 {
    let s = params.morse.s(k);
    -2.0 * params.alpha() * params.alpha() * s * (s + 2.0 * params.a)
}

/// Zero mode `Ω_n` with analytic derivatives up to second order.
#[derive(Clone, Debug)]
pub struct ZeroMode {
    pub n: usize,
    pub params: ModelParams,
    eta: MorseEigenfunction,
}

impl ZeroMode {
    pub fn new(n: usize, params: &ModelParams) -> Result<Self> {
        admissibility(n, params)?;
        Ok(Self { n, params: *params, eta: morse_eigenfunction(n, &params.morse)? })
    }
}

impl Field2D for ZeroMode {
    fn jet(&self, x1: f64, x2: f64) -> Result<Jet2> {
        let chi = SuperchargeField::new(SuperchargePart::Chi, self.params).jet(x1, x2)?;
        let envelope = Jet2::along_x1(self.eta.log_envelope(x1)) + Jet2::along_x2(self.eta.log_envelope(x2));
        let log = envelope + chi;
        if log.value < -700.0 {
            return Ok(Jet2::ZERO);
        }
        let poly = Jet2::along_x1(self.eta.polynomial(x1)) * Jet2::along_x2(self.eta.polynomial(x2));
        Ok(log.exp() * poly)
    }
}

/// All admissible zero modes of a parameter point.
#[derive(Clone, Debug)]
pub struct ZeroModeFamily {
    pub params: ModelParams,
    pub indices: Vec<usize>,
    pub modes: Vec<ZeroMode>,
}

pub fn zero_mode_family(params: &ModelParams) -> Result<ZeroModeFamily> {
    let indices = admissible_indices(params);
    if indices.is_empty() {
        return Err(admissibility(0, params)
            .err()
            .unwrap_or(Error::Inadmissible { n: 0, reason: "no bound level satisfies s_n > -2a".into() }));
    }
    let modes = indices.iter().map(|&n| ZeroMode::new(n, params)).collect::<Result<_>>()?;
    Ok(ZeroModeFamily { params: *params, indices, modes })
}

/// The algebraic levels `E_k`, full energy zero.
pub fn qes_spectrum(params: &ModelParams) -> Result<SpectrumTable> {
    let family = zero_mode_family(params)?;
    let levels = family.indices.iter().map(|&k| Level::closed_form(k, None, qes_energy(k, params))).collect();
    Ok(SpectrumTable {
        branch: "qes".into(),
        params: *params,
        energy_zero: EnergyZero::Full,
        partial: true,
        levels,
        notes: vec!["partial spectrum: only the levels reachable from zero modes are known".into()],
    })
}

/// Samples a field that vanishes on the diagonal onto the nodes with
/// `x2 >= x1`, writing zero on the diagonal itself.
pub fn sample_upper(spec: &GridSpec, f: &dyn Field2D) -> SampledField {
    let grid = spec.grid();
    let mut out = SampledField::from_fn(grid, |x1, x2| if x2 > x1 { f.value(x1, x2).ok() } else { None });
    for i in 0..grid.x1.len {
        let idx = grid.index(i, i);
        out.values[idx] = 0.0;
        out.mask[idx] = true;
    }
    out
}

/// Which triangle of `Ĉ` carries the couplings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Triangle {
    /// `c_{nk} = 0` for `k > n`.
    Lower,
    /// `c_{nk} = 0` for `k < n`.
    Upper,
}

/// Least-squares expansion of `H⁽¹⁾ Ω_n` in the zero modes on one grid.
#[derive(Clone, Debug, Serialize)]
pub struct GalerkinFit {
    pub n_nodes: usize,
    pub spacing: f64,
    /// `c[n][k]`: coefficient of `Ω_k` in `H⁽¹⁾ Ω_n`.
    pub c: Vec<Vec<f64>>,
    pub gram_condition: f64,
    /// `‖H Ω_n - Σ_k c_{nk} Ω_k‖ / ‖H Ω_n‖`.
    pub reconstruction_error: Vec<f64>,
}

/// Orthonormalizes the columns (modified Gram-Schmidt, two passes) and
/// returns `(Q, R)`.
fn thin_qr(cols: &[Vec<f64>]) -> (Vec<Vec<f64>>, DMatrix<f64>) {
    use crate::quad::{dot, norm};
    let k = cols.len();
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut r = DMatrix::zeros(k, k);
    for (j, c) in cols.iter().enumerate() {
        let mut v = c.clone();
        for _ in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                let p = dot(qi, &v);
                r[(i, j)] += p;
                v.iter_mut().zip(qi).for_each(|(a, b)| *a -= p * b);
            }
        }
        let nv = norm(&v);
        r[(j, j)] = nv;
        v.iter_mut().for_each(|a| *a /= nv);
        q.push(v);
    }
    (q, r)
}

pub fn galerkin_fit(family: &ZeroModeFamily, spec: &GridSpec) -> Result<GalerkinFit> {
    let h1 = hamiltonian(Branch::One, &family.params, EnergyZero::Full);
    let samples: Vec<SampledField> = family.modes.iter().map(|m| sample_upper(spec, m)).collect();
    let images: Vec<SampledField> = samples.iter().map(|s| h1.apply_grid(s)).collect::<Result<_>>()?;
    let grid = spec.grid();
    let rows: Vec<usize> =
        (0..grid.len()).filter(|&k| images.iter().all(|f| f.mask[k]) && samples.iter().all(|f| f.mask[k])).collect();
    if rows.is_empty() {
        return Err(Error::EmptyMask);
    }
    let sw: Vec<f64> = rows.iter().map(|&k| grid.weight(k).sqrt()).collect();
    let column = |f: &SampledField| -> Vec<f64> { rows.iter().zip(&sw).map(|(&k, w)| f.values[k] * w).collect() };
    let basis: Vec<Vec<f64>> = samples.iter().map(column).collect();
    let (q, r) = thin_qr(&basis);
    let sv = SVD::new(r.clone(), false, false).singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    let gram_condition = if smin > 0.0 { (smax / smin).powi(2) } else { f64::INFINITY };
    if gram_condition > MAX_GRAM_CONDITION {
        return Err(Error::IllConditioned { condition: gram_condition });
    }
    let k = basis.len();
    let mut c = vec![vec![0.0; k]; k];
    let mut reconstruction_error = Vec::with_capacity(k);
    for (n, img) in images.iter().enumerate() {
        let b = column(img);
        let qtb: Vec<f64> = q.iter().map(|qi| crate::quad::dot(qi, &b)).collect();
        // back-substitution R x = Qᵀ b
        let mut x = vec![0.0; k];
        for i in (0..k).rev() {
            let s: f64 = (i + 1..k).map(|j| r[(i, j)] * x[j]).sum();
            x[i] = (qtb[i] - s) / r[(i, i)];
        }
        let fitted_sq: f64 = qtb.iter().map(|v| v * v).sum();
        let total_sq = crate::quad::dot(&b, &b);
        reconstruction_error.push(((total_sq - fitted_sq).max(0.0) / total_sq).sqrt());
        c[n] = x;
    }
    Ok(GalerkinFit { n_nodes: spec.n, spacing: spec.spacing(), c, gram_condition, reconstruction_error })
}

/// `Ĉ` extrapolated from two grids, with its triangular structure.
#[derive(Clone, Debug, Serialize)]
pub struct CouplingMatrix {
    pub indices: Vec<usize>,
    pub fine: GalerkinFit,
    pub coarse: GalerkinFit,
    /// Richardson combination of the two fits.
    pub c: Vec<Vec<f64>>,
    pub orientation: Triangle,
    /// Largest entry of the vanishing triangle over the largest entry.
    pub off_triangle_ratio: f64,
}

impl CouplingMatrix {
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.c.len()).map(|i| self.c[i][i]).collect()
    }
}

fn triangle_maxima(c: &[Vec<f64>]) -> (f64, f64, f64) {
    let (mut lower, mut upper, mut all) = (0.0f64, 0.0f64, 0.0f64);
    for (n, row) in c.iter().enumerate() {
        for (k, v) in row.iter().enumerate() {
            all = all.max(v.abs());
            if k < n {
                lower = lower.max(v.abs());
            } else if k > n {
                upper = upper.max(v.abs());
            }
        }
    }
    (lower, upper, all)
}

/// Default production domain for the two-dimensional numerics.
pub const DEFAULT_DOMAIN: (f64, f64) = DEFAULT_2D_DOMAIN;
/// Default nodes per axis on the fine grid; the companion grid has half.
pub const DEFAULT_NODES: usize = DEFAULT_2D_NODES;

/// Fine triangle grid and its half-resolution companion.
pub fn grid_pair(lo: f64, hi: f64, n: usize) -> Result<(GridSpec, GridSpec)> {
    let tri = Domain::UpperTriangle { offset: 1 };
    Ok((GridSpec::new(lo, hi, n, tri)?, GridSpec::new(lo, hi, n / 2, tri)?))
}

/// Richardson ratio `h_coarse / h_fine`.
pub fn spacing_ratio(fine: &GridSpec, coarse: &GridSpec) -> f64 {
    coarse.spacing() / fine.spacing()
}

pub fn coupling_matrix(params: &ModelParams, fine: &GridSpec, coarse: &GridSpec) -> Result<CouplingMatrix> {
    let family = zero_mode_family(params)?;
    let f = galerkin_fit(&family, fine)?;
    let g = galerkin_fit(&family, coarse)?;
    let ratio = spacing_ratio(fine, coarse);
    let k = family.indices.len();
    let c: Vec<Vec<f64>> = (0..k).map(|n| (0..k).map(|j| richardson(f.c[n][j], g.c[n][j], ratio)).collect()).collect();
    let (lower, upper, all) = triangle_maxima(&c);
    let (orientation, off) = if upper <= lower { (Triangle::Lower, upper) } else { (Triangle::Upper, lower) };
    Ok(CouplingMatrix {
        indices: family.indices,
        fine: f,
        coarse: g,
        c,
        orientation,
        off_triangle_ratio: if all > 0.0 { off / all } else { 0.0 },
    })
}

/// A state `ψ = Σ_n b_n Ω_n` with `H⁽¹⁾ ψ = E ψ`.
#[derive(Clone, Debug, Serialize)]
pub struct QesState {
    pub k: usize,
    pub energy: f64,
    /// Expansion coefficients over the admissible zero modes.
    pub coefficients: Vec<f64>,
    /// `‖(H⁽¹⁾ - E) ψ‖ / ‖ψ‖` with `H⁽¹⁾` applied through exact jets,
    /// sampled on the fine grid.
    pub residual: f64,
    /// The same with `H⁽¹⁾` applied by finite differences.
    pub grid_residual: f64,
    #[serde(skip)]
    pub field: SampledField,
}

/// Left eigenvectors of the triangular `Ĉ` by back-substitution:
/// `Σ_n b_n c_{nk} = λ b_k`.
pub fn back_substitute(c: &[Vec<f64>], orientation: Triangle) -> Result<Vec<(f64, Vec<f64>)>> {
    let k = c.len();
    for i in 0..k {
        for j in i + 1..k {
            if (c[i][i] - c[j][j]).abs() < DEGENERATE_DIAGONAL_TOL * c[i][i].abs() {
                return Err(Error::DegenerateDiagonal { i, j, value: c[i][i] });
            }
        }
    }
    let mut out = Vec::with_capacity(k);
    for j in 0..k {
        let lambda = c[j][j];
        let mut b = vec![0.0; k];
        b[j] = 1.0;
        match orientation {
            Triangle::Lower => {
                for t in (0..j).rev() {
                    let s: f64 = (t + 1..=j).map(|n| b[n] * c[n][t]).sum();
                    b[t] = s / (lambda - c[t][t]);
                }
            }
            Triangle::Upper => {
                for t in j + 1..k {
                    let s: f64 = (j..t).map(|n| b[n] * c[n][t]).sum();
                    b[t] = s / (lambda - c[t][t]);
                }
            }
        }
        out.push((lambda, b));
    }
    Ok(out)
}

/// Eigenstates of `H⁽¹⁾` within the zero-mode span.
pub fn qes_eigenfunctions(params: &ModelParams, matrix: &CouplingMatrix, fine: &GridSpec) -> Result<Vec<QesState>> {
    let family = zero_mode_family(params)?;
    let samples: Vec<SampledField> = family.modes.iter().map(|m| sample_upper(fine, m)).collect();
    let h1 = hamiltonian(Branch::One, params, EnergyZero::Full);
    let mut states = Vec::new();
    for (j, (lambda, b)) in back_substitute(&matrix.c, matrix.orientation)?.into_iter().enumerate() {
        let mut psi = samples[0].scaled(b[0]);
        for (bn, s) in b.iter().zip(&samples).skip(1) {
            psi = psi.combine(1.0, s, *bn)?;
        }
        let nrm = psi.norm()?;
        let psi = psi.scaled(1.0 / nrm);
        let coefficients: Vec<f64> = b.iter().map(|x| x / nrm).collect();
        let analytic = Combination {
            terms: coefficients
                .iter()
                .zip(&family.modes)
                .map(|(c, m)| (*c, Arc::new(m.clone()) as Arc<dyn Field2D>))
                .collect(),
        };
        let exact = SampledField::from_fn(fine.grid(), |x1, x2| {
            if x2 > x1 {
                Some(h1.apply_analytic(&analytic, x1, x2).ok()? - lambda * analytic.value(x1, x2).ok()?)
            } else {
                None
            }
        });
        let residual = exact.norm()? / psi.clone().restrict_to(&exact).norm()?;
        let grid_residual = h1.apply_grid(&psi)?.combine(1.0, &psi, -lambda)?.norm()?;
        states.push(QesState {
            k: family.indices[j],
            energy: lambda,
            coefficients,
            residual,
            grid_residual,
            field: psi,
        });
    }
    Ok(states)
}

/// Result of descending `M` steps along the shape-invariance chain.
#[derive(Clone, Debug)]
pub struct Descent {
    pub field: SampledField,
    pub energy: f64,
    /// `‖image‖ / ‖input‖`.
    pub norm_ratio: f64,
    /// Parameter point whose `H⁽¹⁾` has the image as an eigenstate.
    pub params: ModelParams,
}

/// Applies `Q⁻(a) Q⁻(a - 1/2) ··· Q⁻(a - (M-1)/2)` to an eigenstate of
/// `H⁽¹⁾(a - M/2)` with energy `energy` (full energy zero). The image is an
/// eigenstate of `H⁽¹⁾(a)` with energy `energy + Σ_j R(a - j/2)`.
pub fn shape_descend(state: &SampledField, energy: f64, params: &ModelParams, m: usize) -> Result<Descent> {
    if m == 0 {
        return Ok(Descent { field: state.clone(), energy, norm_ratio: 1.0, params: *params });
    }
    let mut ops = Vec::with_capacity(m);
    let mut shift = 0.0;
    for j in 0..m {
        let pj = params.with_a(params.a - 0.5 * j as f64);
        shift += shape_invariance_shift(&pj).1;
        ops.push(supercharge(Sign::Minus, &pj));
    }
    let image = OperatorChain::new(ops)?.apply_grid(state)?;
    let ratio = image.norm()? / state.norm()?;
    if ratio < NULL_IMAGE_RATIO {
        return Err(Error::NullImage { ratio });
    }
    Ok(Descent { field: image, energy: energy + shift, norm_ratio: ratio, params: *params })
}

/// As [`shape_descend`] for an analytic input: the first supercharge acts
/// through exact jets at the nodes with `x2 > x1`, the remaining `M - 1` by
/// finite differences. The diagonal is set to zero.
pub fn shape_descend_analytic(
    state: &dyn Field2D,
    spec: &GridSpec,
    energy: f64,
    params: &ModelParams,
    m: usize,
) -> Result<Descent> {
    if m == 0 {
        return shape_descend(&sample_upper(spec, state), energy, params, 0);
    }
    let last = params.with_a(params.a - 0.5 * (m - 1) as f64);
    let q = supercharge(Sign::Minus, &last);
    let input = sample_upper(spec, state);
    let first = FnField::new(0, |x1, x2| Ok(Jet2::constant(q.apply_analytic(state, x1, x2)?)));
    let image = sample_upper(spec, &first);
    let (mut out, ratio) = if m > 1 {
        let rest = shape_descend(&image, 0.0, params, m - 1)?;
        (rest.field, rest.norm_ratio * image.norm()? / input.norm()?)
    } else {
        let r = image.norm()? / input.norm()?;
        (image, r)
    };
    if ratio < NULL_IMAGE_RATIO {
        return Err(Error::NullImage { ratio });
    }
    out.mask.iter_mut().zip(&input.mask).for_each(|(a, b)| *a &= *b);
    let shift: f64 = (0..m).map(|j| shape_invariance_shift(&params.with_a(params.a - 0.5 * j as f64)).1).sum();
    Ok(Descent { field: out, energy: energy + shift, norm_ratio: ratio, params: *params })
}

/// `‖(H⁽¹⁾ - E) Φ‖ / ‖Φ‖` for a grid state, full energy zero.
pub fn h1_residual(field: &SampledField, energy: f64, params: &ModelParams) -> Result<f64> {
    let h1 = hamiltonian(Branch::One, params, EnergyZero::Full);
    let image = h1.apply_grid(field)?;
    let r = image.combine(1.0, field, -energy)?;
    Ok(r.norm()? / field.clone().restrict_to(&r).norm()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::testing::jet_fd_mismatch;
    use crate::model2d::Sign;

    fn reference(a: f64) -> ModelParams {
        ModelParams::new(30.25, 1.0, a).unwrap()
    }

    #[test]
    fn spectrum_examples() {
        let t = qes_spectrum(&reference(-1.0)).unwrap();
        assert_eq!(t.energies(), vec![-30.0, -16.0, -6.0]);
        assert!(t.partial);
    }

    #[test]
    fn admissible_sets() {
        assert_eq!(admissible_indices(&reference(-1.0)), vec![0, 1, 2]);
        assert!(admissible_indices(&reference(-0.3)).is_empty());
        assert!(matches!(zero_mode_family(&reference(-0.3)), Err(Error::Inadmissible { .. })));
        assert!(matches!(ZeroMode::new(3, &reference(-1.0)), Err(Error::Inadmissible { n: 3, .. })));
        // a single admissible mode: s_n > 4 only for n = 0
        assert_eq!(admissible_indices(&reference(-2.0)), vec![0]);
    }

    #[test]
    fn zero_mode_is_symmetric_and_vanishes_on_the_diagonal() {
        let om = ZeroMode::new(1, &reference(-1.0)).unwrap();
        for k in 0..50 {
            let (x1, x2) = (-1.0 + 0.17 * k as f64, 0.3 + 0.11 * k as f64);
            assert_eq!(om.value(x1, x2).unwrap(), om.value(x2, x1).unwrap());
        }
        assert!(om.value(1.0, 1.0 + 1e-6).unwrap().abs() < 1e-9);
    }

    #[test]
    fn zero_mode_jets_match_differences() {
        let om = ZeroMode::new(2, &reference(-1.0)).unwrap();
        for (x1, x2) in [(0.0, 1.5), (1.0, 3.0), (-0.5, 0.7)] {
            assert!(jet_fd_mismatch(&om, x1, x2, 1e-5) < 1e-5);
        }
    }

    #[test]
    fn supercharge_annihilates_zero_modes_pointwise() {
        let p = reference(-1.0);
        let q = supercharge(Sign::Plus, &p);
        for n in 0..3 {
            let om = ZeroMode::new(n, &p).unwrap();
            let mut scale = 0.0f64;
            let mut worst = 0.0f64;
            for k in 0..40 {
                let (x1, x2) = (-0.8 + 0.13 * k as f64, 0.1 + 0.19 * k as f64);
                if (x1 - x2).abs() < 0.1 {
                    continue;
                }
                scale = scale.max(om.value(x1, x2).unwrap().abs());
                worst = worst.max(q.apply_analytic(&om, x1, x2).unwrap().abs());
            }
            assert!(worst < 1e-8 * scale, "n={n}: {worst} vs {scale}");
        }
    }

    #[test]
    fn back_substitution_of_a_lower_triangle() {
        let c = vec![vec![-30.0, 0.0, 0.0], vec![0.05, -16.0, 0.0], vec![3e-4, 0.18, -6.0]];
        let states = back_substitute(&c, Triangle::Lower).unwrap();
        assert_eq!(states[0].1, vec![1.0, 0.0, 0.0]);
        for (lambda, b) in &states {
            for k in 0..3 {
                let lhs: f64 = (0..3).map(|n| b[n] * c[n][k]).sum();
                assert!((lhs - lambda * b[k]).abs() < 1e-12);
            }
        }
        let degenerate = vec![vec![-1.0, 0.0], vec![0.3, -1.0]];
        assert!(matches!(back_substitute(&degenerate, Triangle::Lower), Err(Error::DegenerateDiagonal { .. })));
    }

    #[test]
    fn single_mode_matrix_is_trivially_triangular() {
        let p = reference(-2.0);
        let (fine, coarse) = grid_pair(-1.5, 9.5, 160).unwrap();
        let m = coupling_matrix(&p, &fine, &coarse).unwrap();
        assert_eq!(m.c.len(), 1);
        assert_eq!(m.off_triangle_ratio, 0.0);
    }

    #[test]
    fn descent_with_no_steps_is_the_identity() {
        let p = reference(-1.0);
        let spec = GridSpec::new(-1.5, 9.5, 41, Domain::UpperTriangle { offset: 1 }).unwrap();
        let f = sample_upper(&spec, &ZeroMode::new(0, &p).unwrap());
        let d = shape_descend(&f, -30.0, &p, 0).unwrap();
        assert_eq!(d.field, f);
        assert_eq!(d.energy, -30.0);
    }

    #[test]
    fn descent_shift_for_one_step() {
        let p = reference(-1.0);
        let lower = p.with_a(-1.5);
        let spec = GridSpec::new(-1.5, 9.5, 121, Domain::UpperTriangle { offset: 1 }).unwrap();
        let f = sample_upper(&spec, &ZeroMode::new(0, &lower).unwrap());
        let d = shape_descend(&f, qes_energy(0, &lower), &p, 1).unwrap();
        assert_eq!(d.energy, -25.0);
    }
}
