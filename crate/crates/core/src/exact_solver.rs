//! The separable point `a = -1/2`: `H⁽¹⁾` splits into two Morse problems,
//! its antisymmetric states are carried to `H⁽⁰⁾` by `Q⁺`, and the chain of
//! partners `a_k = -(k + 1)/2` inherits the spectrum with a selection rule.
//!
//! Energies here use the reduced energy zero, where the separable levels
//! are `ε_n + ε_m`. The symmetry operator of `H⁽¹⁾` is `Q⁻Q⁺`, acting on
//! separable states as `r_{nm} = (ε_n - ε_m)² + 2α²(ε_n + ε_m) + α⁴`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field2D, Jet2};
use crate::grid::SampledField;
use crate::model2d::{hamiltonian, hierarchy_a, supercharge, Branch, EnergyZero, ModelParams, Sign};
use crate::operators::OperatorChain;
use crate::oracle::{Domain, GridSpec};
use crate::special1d::{count_bound_states, morse_eigenfunction, MorseEigenfunction};
use crate::spectrum::{Level, Parity, SpectrumTable};

/// The separable point.
pub const SEPARABLE_A: f64 = -0.5;
/// `‖Q⁺Ψ‖² / ‖Ψ‖²` below which the image counts as vanishing.
pub const VANISHING_RATIO: f64 = 1e-3;
/// Default grid for the separable branch: wide enough for the shallowest
/// level at the reference couplings.
pub const DEFAULT_DOMAIN: (f64, f64) = (-2.0, 16.0);
pub const DEFAULT_NODES: usize = 601;

pub fn default_spec() -> GridSpec {
    GridSpec::new(DEFAULT_DOMAIN.0, DEFAULT_DOMAIN.1, DEFAULT_NODES, Domain::Square).expect("valid default grid")
}

fn require_separable(params: &ModelParams) -> Result<()> {
    if params.a != SEPARABLE_A {
        return Err(Error::NotSeparable { a: params.a });
    }
    Ok(())
}

fn epsilon(n: usize, params: &ModelParams) -> Result<f64> {
    let s = params.morse.s(n);
    if s <= 0.0 {
        return Err(Error::NotBound { n, s });
    }
    Ok(-params.alpha().powi(2) * s * s)
}

/// `(n, m)` with `n <= m` over all bound levels, in lexicographic order.
pub fn bound_pairs(params: &ModelParams) -> Vec<(usize, usize)> {
    let count = count_bound_states(&params.morse);
    (0..count).flat_map(|n| (n..count).map(move |m| (n, m))).collect()
}

/// A product state of two Morse levels, symmetrized or antisymmetrized.
#[derive(Clone, Debug, Serialize)]
pub struct SeparableState {
    pub n: usize,
    pub m: usize,
    pub energy: f64,
    pub parity: Parity,
}

/// All separable eigenstates of `H⁽¹⁾(-1/2)`. Antisymmetric states exist
/// only for `n != m`.
pub fn separable_states(params: &ModelParams) -> Result<Vec<SeparableState>> {
    require_separable(params)?;
    let mut out = Vec::new();
    for (n, m) in bound_pairs(params) {
        let energy = epsilon(n, params)? + epsilon(m, params)?;
        out.push(SeparableState { n, m, energy, parity: Parity::Symmetric });
        if n != m {
            out.push(SeparableState { n, m, energy, parity: Parity::Antisymmetric });
        }
    }
    Ok(out)
}

/// `E_{nm} = ε_n + ε_m` with degeneracy and parity labels, reduced zero.
pub fn separable_spectrum(params: &ModelParams) -> Result<SpectrumTable> {
    require_separable(params)?;
    let mut levels = Vec::new();
    for (n, m) in bound_pairs(params) {
        let mut level = Level::closed_form(n, Some(m), epsilon(n, params)? + epsilon(m, params)?);
        level.parities = if n == m { vec![Parity::Symmetric] } else { vec![Parity::Symmetric, Parity::Antisymmetric] };
        level.degeneracy = level.parities.len();
        levels.push(level);
    }
    let mut table = SpectrumTable {
        branch: "separable".into(),
        params: *params,
        energy_zero: EnergyZero::Reduced,
        partial: false,
        levels,
        notes: vec!["H1(a = -0.5) separates into two Morse problems".into()],
    };
    table.sort();
    Ok(table)
}

/// `η_n(x1) η_m(x2) + sign · η_m(x1) η_n(x2)`; a plain product when `sign`
/// is zero.
#[derive(Clone, Debug)]
pub struct SeparableField {
    first: MorseEigenfunction,
    second: MorseEigenfunction,
    sign: f64,
}

impl SeparableField {
    pub fn product(n: usize, m: usize, params: &ModelParams) -> Result<Self> {
        Ok(Self {
            first: morse_eigenfunction(n, &params.morse)?,
            second: morse_eigenfunction(m, &params.morse)?,
            sign: 0.0,
        })
    }

    pub fn with_parity(n: usize, m: usize, parity: Parity, params: &ModelParams) -> Result<Self> {
        let sign = match parity {
            Parity::Symmetric => 1.0,
            Parity::Antisymmetric if n != m => -1.0,
            Parity::Antisymmetric => {
                return Err(Error::InvalidParameter(format!("no antisymmetric state for n = m = {n}")))
            }
        };
        Ok(Self { sign, ..Self::product(n, m, params)? })
    }
}

impl Field2D for SeparableField {
    fn jet(&self, x1: f64, x2: f64) -> Result<Jet2> {
        let direct = Jet2::along_x1(self.first.jet(x1)) * Jet2::along_x2(self.second.jet(x2));
        if self.sign == 0.0 {
            return Ok(direct);
        }
        let swapped = Jet2::along_x1(self.second.jet(x1)) * Jet2::along_x2(self.first.jet(x2));
        Ok(direct + swapped.scale(self.sign))
    }
}

/// `r_{nm} = α⁴[(n - m)² - 1][(s_n + s_m)² - 1]`, eigenvalue of `Q⁻Q⁺` on
/// the separable states `(n, m)`.
pub fn sym_eigenvalue(n: usize, m: usize, params: &ModelParams) -> Result<f64> {
    epsilon(n, params)?;
    epsilon(m, params)?;
    let d = n as f64 - m as f64;
    let s = params.morse.s(n) + params.morse.s(m);
    Ok(params.alpha().powi(4) * (d * d - 1.0) * (s * s - 1.0))
}

/// The same eigenvalue through the Morse energies:
/// `(ε_n - ε_m)² + 2α²(ε_n + ε_m) + α⁴`.
pub fn sym_eigenvalue_from_energies(n: usize, m: usize, params: &ModelParams) -> Result<f64> {
    let (en, em) = (epsilon(n, params)?, epsilon(m, params)?);
    let a2 = params.alpha().powi(2);
    Ok((en - em).powi(2) + 2.0 * a2 * (en + em) + a2 * a2)
}

/// Relative `Q⁺` image norms over a sequence of grids, coarse to fine.
#[derive(Clone, Debug, Serialize)]
pub struct NormStudy {
    pub spacing: Vec<f64>,
    /// `‖Q⁺Ψ‖² / ‖Ψ‖²`, the quantity `r_{nm}` predicts.
    pub ratio: Vec<f64>,
}

impl NormStudy {
    pub fn finest(&self) -> f64 {
        *self.ratio.last().expect("at least one level")
    }

    pub fn decreasing(&self) -> bool {
        self.ratio.windows(2).all(|w| w[1] < w[0])
    }
}

/// A state of `H⁽⁰⁾(-1/2)` obtained as `Q⁺Ψ^A_{nm}`.
#[derive(Clone, Debug, Serialize)]
pub struct PartnerState {
    pub n: usize,
    pub m: usize,
    pub energy: f64,
    pub r: f64,
    /// `‖Q⁺Ψ^A‖² / ‖Ψ^A‖²` with `Q⁺` applied by finite differences, on the
    /// finest grid.
    pub norm_ratio: f64,
    /// The same with `Q⁺` applied through exact jets.
    pub analytic_norm_ratio: f64,
    pub study: NormStudy,
    /// `‖(Ψ - Ψ∘swap)/2‖ / ‖Ψ‖` of the finite-difference image.
    pub antisymmetric_fraction: f64,
    /// Exact-jet image at the nodes, unit norm on the full square, zero on
    /// the diagonal.
    #[serde(skip)]
    pub field: SampledField,
    /// The unit-norm input `Ψ^A_{nm}` on the same grid.
    #[serde(skip)]
    pub source: SampledField,
}

/// A pair whose `Q⁺` image vanishes.
#[derive(Clone, Debug, Serialize)]
pub struct VanishingState {
    pub n: usize,
    pub m: usize,
    pub r: f64,
    pub study: NormStudy,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum PartnerOutcome {
    Retained(PartnerState),
    Vanishing(VanishingState),
}

fn square_spec(spec: &GridSpec) -> Result<()> {
    if spec.domain != Domain::Square {
        return Err(Error::InvalidParameter("partner states are computed on the full square".into()));
    }
    Ok(())
}

/// Samples `f` on `spec` and applies `Q⁺` by finite differences. The
/// image is invalid on the diagonal, where the coefficients are singular.
fn q_plus_image(f: &dyn Field2D, params: &ModelParams, spec: &GridSpec) -> Result<(SampledField, SampledField)> {
    let input = SampledField::sample(spec.grid(), f);
    let image = supercharge(Sign::Plus, params).apply_grid(&input)?;
    Ok((input, image))
}

/// `Q⁺Ψ^A_{nm}` on `spec` and on its two coarsenings. The state vanishes
/// when the finest squared norm ratio is below [`VANISHING_RATIO`] and the
/// ratio decreases under refinement.
pub fn partner_state(n: usize, m: usize, params: &ModelParams, spec: &GridSpec) -> Result<PartnerOutcome> {
    require_separable(params)?;
    square_spec(spec)?;
    let (n, m) = if n <= m { (n, m) } else { (m, n) };
    let psi = SeparableField::with_parity(n, m, Parity::Antisymmetric, params)?;
    let r = sym_eigenvalue(n, m, params)?;
    let coarse = spec.coarsened()?;
    let coarsest = coarse.coarsened()?;
    let mut study = NormStudy { spacing: Vec::new(), ratio: Vec::new() };
    let mut finest = None;
    for s in [coarsest, coarse, *spec] {
        let (input, image) = q_plus_image(&psi, params, &s)?;
        study.spacing.push(s.spacing());
        study.ratio.push((image.norm()? / input.norm()?).powi(2));
        finest = Some((input, image));
    }
    let (input, image) = finest.expect("three levels");
    if study.finest() < VANISHING_RATIO && study.decreasing() {
        return Ok(PartnerOutcome::Vanishing(VanishingState { n, m, r, study }));
    }
    let anti = image.combine(0.5, &image.reflected()?, -0.5)?;
    let antisymmetric_fraction = anti.norm()? / image.norm()?;
    let q = supercharge(Sign::Plus, params);
    let exact =
        SampledField::from_fn(
            spec.grid(),
            |x1, x2| {
                if x1 == x2 {
                    Some(0.0)
                } else {
                    q.apply_analytic(&psi, x1, x2).ok()
                }
            },
        );
    let analytic_norm_ratio = (exact.norm()? / input.norm()?).powi(2);
    let field = exact.scaled(1.0 / exact.norm()?);
    let source = input.scaled(1.0 / input.norm()?);
    let norm_ratio = study.finest();
    Ok(PartnerOutcome::Retained(PartnerState {
        n,
        m,
        energy: epsilon(n, params)? + epsilon(m, params)?,
        r,
        norm_ratio,
        analytic_norm_ratio,
        study,
        antisymmetric_fraction,
        field,
        source,
    }))
}

/// Levels of `H⁽⁰⁾(-1/2)`: one non-degenerate symmetric level per pair with
/// `r_{nm} > 0`, i.e. `|n - m| > 1`. Excluded pairs are listed with
/// `retained = false`.
pub fn partner_spectrum(params: &ModelParams) -> Result<SpectrumTable> {
    require_separable(params)?;
    let mut levels = Vec::new();
    for (n, m) in bound_pairs(params).into_iter().filter(|(n, m)| n != m) {
        let r = sym_eigenvalue(n, m, params)?;
        let mut level = Level::closed_form(n, Some(m), epsilon(n, params)? + epsilon(m, params)?);
        level.parities = vec![Parity::Symmetric];
        level.retained = r > 0.0;
        if !level.retained {
            level.note = format!("Q+ annihilates the antisymmetric state (r = {r})");
        }
        levels.push(level);
    }
    let mut table = SpectrumTable {
        branch: "exact".into(),
        params: *params,
        energy_zero: EnergyZero::Reduced,
        partial: false,
        levels,
        notes: vec![
            "retained pairs satisfy |n - m| > 1".into(),
            "zero modes of Q- would need a > 1/4 + 1/(4 sqrt 2); none at a = -0.5".into(),
        ],
    };
    table.sort();
    Ok(table)
}

/// `‖Q⁻Ψ̂⁰ - √r Ψ̂^A‖ / √r` with both states at unit norm: how far `Q⁻`
/// is from carrying the partner state back onto its source.
pub fn return_defect(state: &PartnerState, params: &ModelParams) -> Result<f64> {
    require_separable(params)?;
    let back = supercharge(Sign::Minus, params).apply_grid(&state.field)?;
    let root = state.r.sqrt();
    Ok(back.combine(1.0, &state.source, -root)?.norm()? / root)
}

/// `‖(H⁽⁰⁾ - E)Ψ̂⁰‖` for a unit-norm partner state, reduced energy zero.
pub fn transport_residual(state: &PartnerState, params: &ModelParams) -> Result<f64> {
    require_separable(params)?;
    let h0 = hamiltonian(Branch::Zero, params, EnergyZero::Reduced);
    let r = h0.apply_grid(&state.field)?.combine(1.0, &state.field, -state.energy)?;
    Ok(r.norm()? / state.field.clone().restrict_to(&r).norm()?)
}

/// `‖Q⁻Q⁺f - r f‖ / ‖r f‖` for `f = η_n(x1) η_m(x2)`, with the norm taken
/// over `|x1 - x2| > band`. The intermediate `Q⁺f` is singular on the
/// diagonal, so the band keeps the comparison off the stencil's blind spot.
pub fn symmetry_operator_defect(n: usize, m: usize, params: &ModelParams, spec: &GridSpec, band: f64) -> Result<f64> {
    require_separable(params)?;
    let f = SampledField::sample(spec.grid(), &SeparableField::product(n, m, params)?);
    let chain = OperatorChain::new(vec![supercharge(Sign::Minus, params), supercharge(Sign::Plus, params)])?;
    let r = sym_eigenvalue(n, m, params)?;
    let image = chain.apply_grid(&f)?.restrict(|x1, x2| (x1 - x2).abs() > band);
    let target = f.scaled(r).restrict_to(&image);
    Ok(image.combine(1.0, &target, -1.0)?.norm()? / target.norm()?)
}

/// One member of the chain of partners reached from the separable point.
#[derive(Clone, Debug, Serialize)]
pub struct HierarchyPair {
    pub n: usize,
    pub m: usize,
    pub energy: f64,
    /// `ρ_0..ρ_k`: `‖Q⁺(a_j)Φ_j‖² = ρ_j ‖Φ_j‖²` along the chain.
    pub factors: Vec<f64>,
    pub retained: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HierarchyLevel {
    pub k: usize,
    pub a: f64,
    pub pairs: Vec<HierarchyPair>,
    /// `d` such that exactly the pairs with `|n - m| > d` are retained, if
    /// one exists.
    pub computed_rule: Option<usize>,
    /// The competing rule `|n - m| > k + 2`.
    pub alternative_rule: usize,
}

/// Norm factors along the chain. `ρ_0 = r_{nm}` and
/// `ρ_j = ρ_{j-1} + α²(2j + 1)[2E_{nm} + α²(2j² + 2j + 1)]`, from the
/// operator identity linking consecutive partners.
pub fn hierarchy_factors(n: usize, m: usize, k: usize, params: &ModelParams) -> Result<Vec<f64>> {
    let base = params.with_a(SEPARABLE_A);
    let energy = epsilon(n, &base)? + epsilon(m, &base)?;
    let a2 = params.alpha().powi(2);
    let mut rho = vec![sym_eigenvalue(n, m, &base)?];
    for j in 1..=k {
        let jf = j as f64;
        let prev = rho[j - 1];
        rho.push(prev + a2 * (2.0 * jf + 1.0) * (2.0 * energy + a2 * (2.0 * jf * jf + 2.0 * jf + 1.0)));
    }
    Ok(rho)
}

/// Spectrum of `H⁽⁰⁾(a_k)`, `a_k = -(k+1)/2`, reached by
/// `Q⁺(a_k)···Q⁺(a_0)` from the antisymmetric separable states. A pair is
/// kept when every factor along the chain is positive. The `a` of `params`
/// is replaced by `a_k`.
pub fn hierarchy_spectrum(k: usize, params: &ModelParams) -> Result<(SpectrumTable, HierarchyLevel)> {
    let target = params.with_a(hierarchy_a(k));
    let mut pairs = Vec::new();
    for (n, m) in bound_pairs(params).into_iter().filter(|(n, m)| n != m) {
        let factors = hierarchy_factors(n, m, k, params)?;
        let retained = factors.iter().all(|f| *f > 0.0);
        let energy = epsilon(n, &target)? + epsilon(m, &target)?;
        pairs.push(HierarchyPair { n, m, energy, factors, retained });
    }
    let max_gap = pairs.iter().map(|p| p.m - p.n).max().unwrap_or(0);
    let computed_rule = (0..=max_gap).find(|&d| pairs.iter().all(|p| p.retained == (p.m - p.n > d)));
    let levels = pairs
        .iter()
        .map(|p| {
            let mut level = Level::closed_form(p.n, Some(p.m), p.energy);
            level.parities = vec![if k % 2 == 0 { Parity::Symmetric } else { Parity::Antisymmetric }];
            level.retained = p.retained;
            if !p.retained {
                let j = p.factors.iter().position(|f| *f <= 0.0).unwrap_or(0);
                level.note = format!("norm factor {} at step {j} is not positive", p.factors[j]);
            }
            level
        })
        .collect();
    let alternative_rule = k + 2;
    let mut notes = vec![format!("a_k = {}", target.a)];
    match computed_rule {
        Some(d) => notes.push(format!("computed rule |n - m| > {d}; alternative rule |n - m| > {alternative_rule}")),
        None => notes.push(format!("no single gap rule fits; alternative rule |n - m| > {alternative_rule}")),
    }
    let mut table = SpectrumTable {
        branch: format!("hierarchy:{k}"),
        params: target,
        energy_zero: EnergyZero::Reduced,
        partial: false,
        levels,
        notes,
    };
    table.sort();
    Ok((table, HierarchyLevel { k, a: target.a, pairs, computed_rule, alternative_rule }))
}

/// `‖Q⁺(a_k)···Q⁺(a_0)Ψ^A‖² / ‖Ψ^A‖²` by finite differences, to compare
/// with the product of the norm factors.
pub fn chain_norm_ratio(n: usize, m: usize, k: usize, params: &ModelParams, spec: &GridSpec) -> Result<f64> {
    square_spec(spec)?;
    let base = params.with_a(SEPARABLE_A);
    let psi = SampledField::sample(spec.grid(), &SeparableField::with_parity(n, m, Parity::Antisymmetric, &base)?);
    let ops = (0..=k).rev().map(|j| supercharge(Sign::Plus, &params.with_a(hierarchy_a(j)))).collect();
    let image = OperatorChain::new(ops)?.apply_grid(&psi)?;
    Ok((image.norm()? / psi.norm()?).powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> ModelParams {
        ModelParams::new(30.25, 1.0, -0.5).unwrap()
    }

    #[test]
    fn separable_table() {
        let t = separable_spectrum(&reference()).unwrap();
        assert_eq!(t.levels.len(), 15);
        let e: Vec<f64> = t.energies();
        assert_eq!(&e[..6], &[-50.0, -41.0, -34.0, -32.0, -29.0, -26.0]);
        assert_eq!(t.levels[0].parities, vec![Parity::Symmetric]);
        assert_eq!(t.levels[1].degeneracy, 2);
        assert_eq!(separable_states(&reference()).unwrap().len(), 25);
    }

    #[test]
    fn off_separable_point_is_refused() {
        let p = reference().with_a(-1.0);
        assert_eq!(separable_spectrum(&p).unwrap_err(), Error::NotSeparable { a: -1.0 });
        assert!(partner_spectrum(&p).is_err());
    }

    #[test]
    fn symmetry_eigenvalue_examples() {
        let p = reference();
        assert_eq!(sym_eigenvalue(0, 2, &p).unwrap(), 189.0);
        assert_eq!(sym_eigenvalue(0, 1, &p).unwrap(), 0.0);
        assert_eq!(sym_eigenvalue(1, 3, &p).unwrap(), 105.0);
        assert_eq!(sym_eigenvalue_from_energies(1, 3, &p).unwrap(), 105.0);
    }

    #[test]
    fn partner_selection() {
        let t = partner_spectrum(&reference()).unwrap();
        let kept: Vec<(usize, usize, f64)> = t.retained().map(|l| (l.n, l.m.unwrap(), l.energy)).collect();
        assert_eq!(
            kept,
            vec![(0, 2, -34.0), (0, 3, -29.0), (0, 4, -26.0), (1, 3, -20.0), (1, 4, -17.0), (2, 4, -10.0)]
        );
    }

    #[test]
    fn hierarchy_at_zero_depth_is_the_partner_spectrum() {
        let p = reference();
        let (t, h) = hierarchy_spectrum(0, &p).unwrap();
        let kept: Vec<_> = t.retained().map(|l| (l.n, l.m)).collect();
        let partner: Vec<_> = partner_spectrum(&p).unwrap().retained().map(|l| (l.n, l.m)).collect();
        assert_eq!(kept, partner);
        assert_eq!(h.computed_rule, Some(1));
    }

    #[test]
    fn hierarchy_factor_closed_form() {
        // ρ_j = α⁴((n-m)² - (j+1)²)((s_n+s_m)² - (j+1)²)
        let p = reference();
        for (n, m) in bound_pairs(&p) {
            let f = hierarchy_factors(n, m, 3, &p).unwrap();
            for (j, rho) in f.iter().enumerate() {
                let d = n as f64 - m as f64;
                let s = p.morse.s(n) + p.morse.s(m);
                let t = (j + 1) as f64;
                assert!((rho - (d * d - t * t) * (s * s - t * t)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn antisymmetric_field_is_odd() {
        let f = SeparableField::with_parity(0, 2, Parity::Antisymmetric, &reference()).unwrap();
        for (x1, x2) in [(0.3, 1.7), (-0.4, 2.2), (1.0, 1.0)] {
            assert_eq!(f.value(x1, x2).unwrap(), -f.value(x2, x1).unwrap());
        }
        assert!(SeparableField::with_parity(1, 1, Parity::Antisymmetric, &reference()).is_err());
    }
}
