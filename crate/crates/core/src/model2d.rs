//! The two-dimensional generalized Morse model: partner potentials, the
//! Lorentz-metric supercharge and its gauge function, and the
//! shape-invariance map `a -> a - 1/2`.
//!
//! With `x± = x1 ± x2`, `u = α x₋ / 2` and `M(x) = e^{-2αx} - 2e^{-αx}`,
//!
//! ```text
//! V⁽⁰⁾,⁽¹⁾ = α² a (2a ∓ 1) sinh⁻²(u) + 4a²α² + A [M(x1) + M(x2)]
//! Q⁺ = ∂1² - ∂2² + C1 ∂1 + C2 ∂2 + B
//! C₊ = 4aα,  C₋ = 4aα coth(u),  C1 = (C₊ + C₋)/2,  C2 = (C₋ - C₊)/2
//! B  = C₊C₋/4 - A M(x1) + A M(x2)
//! χ  = -aα x₊ - 2a ln|sinh(u)|
//! ```
//!
//! so that `H⁽⁰⁾ Q⁺ = Q⁺ H⁽¹⁾` with `H = -Δ + V`, and
//! `e^{-χ} Q⁺ e^{χ} = ∂1² - ∂2² - A M(x1) + A M(x2)`.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field2D, Jet1, Jet2};
use crate::operators::{Coefficient, DifferentialOperator2D};
use crate::special1d::MorseParams;

/// Distance from the diagonal below which singular fields refuse to evaluate.
pub const DIAGONAL_GUARD: f64 = 1e-12;

/// Model couplings `(A, α, a)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModelParams {
    pub morse: MorseParams,
    pub a: f64,
}

/// Which partner Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Branch {
    /// `H⁽⁰⁾`, upper sign.
    Zero,
    /// `H⁽¹⁾`, lower sign.
    One,
}

/// Whether the constant `4a²α²` of the potentials is kept.
///
/// The closed-form algebraic levels of the zero-mode construction are
/// eigenvalues of the Hamiltonians with the constant included, while the
/// separable and hierarchy levels `ε_n + ε_m` and the hierarchy operator
/// identity hold with it dropped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Default)]
pub enum EnergyZero {
    #[default]
    Full,
    Reduced,
}

impl EnergyZero {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "full" => Some(Self::Full),
            "reduced" => Some(Self::Reduced),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Full => "full",
            Self::Reduced => "reduced",
        }
    }
}

/// Supercharge sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl ModelParams {
    pub fn new(depth: f64, alpha: f64, a: f64) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::InvalidParameter(format!("a must be finite, got {a}")));
        }
        Ok(Self { morse: MorseParams::new(depth, alpha)?, a })
    }

    pub fn alpha(&self) -> f64 {
        self.morse.alpha
    }

    pub fn depth(&self) -> f64 {
        self.morse.depth
    }

    pub fn with_a(&self, a: f64) -> Self {
        Self { morse: self.morse, a }
    }

    /// Window of `a` in which zero modes of `Q⁺` are normalizable without
    /// fall to the center: `a < -1/4 - 1/(4√2)`.
    pub fn qes_admissible(&self) -> bool {
        self.a < qes_window_edge()
    }

    /// Window in which zero modes of `Q⁻` could be normalizable:
    /// `a > 1/4 + 1/(4√2)`.
    pub fn qminus_zero_mode_window(&self) -> bool {
        self.a > -qes_window_edge()
    }

    /// Coefficient `a(2a ∓ 1)` of `α² sinh⁻²(αx₋/2)`.
    pub fn barrier_coefficient(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Zero => self.a * (2.0 * self.a - 1.0),
            Branch::One => self.a * (2.0 * self.a + 1.0),
        }
    }

    /// `4a²α²`.
    pub fn energy_constant(&self) -> f64 {
        4.0 * self.a * self.a * self.alpha() * self.alpha()
    }

    pub fn c_plus(&self) -> f64 {
        4.0 * self.a * self.alpha()
    }
}

/// `-1/4 - 1/(4√2)`.
pub fn qes_window_edge() -> f64 {
    -0.25 - 0.25 / std::f64::consts::SQRT_2
}

/// `a -> a - 1/2` together with `R(a) = α²(4a - 1)`, so that
/// `H⁽⁰⁾(a) = H⁽¹⁾(a - 1/2) + R(a)` with the full energy zero.
pub fn shape_invariance_shift(params: &ModelParams) -> (ModelParams, f64) {
    let alpha = params.alpha();
    (params.with_a(params.a - 0.5), alpha * alpha * (4.0 * params.a - 1.0))
}

/// `a_k = -(k + 1)/2`, the hierarchy starting from the separable point.
pub fn hierarchy_a(k: usize) -> f64 {
    -(k as f64 + 1.0) / 2.0
}

fn check_off_diagonal(x1: f64, x2: f64) -> Result<()> {
    if (x1 - x2).abs() < DIAGONAL_GUARD {
        Err(Error::SingularPoint { x1, x2 })
    } else {
        Ok(())
    }
}

/// Jet of `sinh⁻²(αx₋/2)` in `(x1, x2)`.
fn inv_sinh2(alpha: f64, x1: f64, x2: f64) -> Result<Jet2> {
    check_off_diagonal(x1, x2)?;
    let u = 0.5 * alpha * (x1 - x2);
    if u.abs() > 350.0 {
        return Ok(Jet2::ZERO);
    }
    let (sh, ch) = (u.sinh(), u.cosh());
    let s = 1.0 / (sh * sh);
    let k = 0.5 * alpha;
    let j = Jet1::new(s, k * (-2.0 * ch * s / sh), k * k * (4.0 * ch * ch + 2.0) * s * s);
    Ok(Jet2::along_direction(j, 1.0, -1.0))
}

/// Jet of `coth(αx₋/2)`.
fn coth(alpha: f64, x1: f64, x2: f64) -> Result<Jet2> {
    check_off_diagonal(x1, x2)?;
    let u = 0.5 * alpha * (x1 - x2);
    let k = 0.5 * alpha;
    if u.abs() > 350.0 {
        return Ok(Jet2::constant(u.signum()));
    }
    let (sh, ch) = (u.sinh(), u.cosh());
    let c = ch / sh;
    let s = 1.0 / (sh * sh);
    let j = Jet1::new(c, -k * s, k * k * 2.0 * c * s);
    Ok(Jet2::along_direction(j, 1.0, -1.0))
}

/// Jet of `A M(x1)` (`which = 1`) or `A M(x2)`.
fn morse_term(params: &MorseParams, x: f64, along_x1: bool) -> Jet2 {
    let j = params.potential(x);
    if along_x1 {
        Jet2::along_x1(j)
    } else {
        Jet2::along_x2(j)
    }
}

/// `V⁽⁰⁾` or `V⁽¹⁾`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PartnerPotential {
    pub branch: Branch,
    pub params: ModelParams,
    pub zero: EnergyZero,
}

impl PartnerPotential {
    pub fn new(branch: Branch, params: ModelParams, zero: EnergyZero) -> Self {
        Self { branch, params, zero }
    }

    pub fn is_singular_on_diagonal(&self) -> bool {
        self.params.barrier_coefficient(self.branch) != 0.0
    }

    pub fn constant(&self) -> f64 {
        match self.zero {
            EnergyZero::Full => self.params.energy_constant(),
            EnergyZero::Reduced => 0.0,
        }
    }
}

impl Field2D for PartnerPotential {
    fn jet(&self, x1: f64, x2: f64) -> Result<Jet2> {
        let p = &self.params;
        let alpha = p.alpha();
        let g = p.barrier_coefficient(self.branch);
        let barrier = if g != 0.0 { inv_sinh2(alpha, x1, x2)?.scale(alpha * alpha * g) } else { Jet2::ZERO };
        // summing the one-variable terms first keeps V(x1, x2) = V(x2, x1) bitwise
        let morse = morse_term(&p.morse, x1, true) + morse_term(&p.morse, x2, false);
        Ok(barrier + Jet2::constant(self.constant()) + morse)
    }
}

/// Scalar ingredients of the supercharge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SuperchargePart {
    /// `C₋ = 4aα coth(αx₋/2)`.
    CMinus,
    /// `C1 = (C₊ + C₋)/2`.
    C1,
    /// `C2 = (C₋ - C₊)/2`.
    C2,
    /// `B = C₊C₋/4 - A M(x1) + A M(x2)`.
    B,
    /// Gauge function `χ`.
    Chi,
    /// `e^{χ}`.
    ExpChi,
}

/// One supercharge ingredient as a field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SuperchargeField {
    pub part: SuperchargePart,
    pub params: ModelParams,
}

impl SuperchargeField {
    pub fn new(part: SuperchargePart, params: ModelParams) -> Self {
        Self { part, params }
    }
}

impl Field2D for SuperchargeField {
    fn jet(&self, x1: f64, x2: f64) -> Result<Jet2> {
        let p = &self.params;
        let (alpha, a) = (p.alpha(), p.a);
        let cp = p.c_plus();
        if a == 0.0 && self.part != SuperchargePart::B {
            return Ok(match self.part {
                SuperchargePart::ExpChi => Jet2::constant(1.0),
                _ => Jet2::ZERO,
            });
        }
        let c_minus = || -> Result<Jet2> { Ok(coth(alpha, x1, x2)?.scale(4.0 * a * alpha)) };
        Ok(match self.part {
            SuperchargePart::CMinus => c_minus()?,
            SuperchargePart::C1 => (c_minus()? + Jet2::constant(cp)).scale(0.5),
            SuperchargePart::C2 => (c_minus()? - Jet2::constant(cp)).scale(0.5),
            SuperchargePart::B => {
                let cross = if a == 0.0 { Jet2::ZERO } else { c_minus()?.scale(0.25 * cp) };
                cross - morse_term(&p.morse, x1, true) + morse_term(&p.morse, x2, false)
            }
            SuperchargePart::Chi => chi(p, x1, x2)?,
            SuperchargePart::ExpChi => chi(p, x1, x2)?.exp(),
        })
    }
}

fn chi(p: &ModelParams, x1: f64, x2: f64) -> Result<Jet2> {
    check_off_diagonal(x1, x2)?;
    let (alpha, a) = (p.alpha(), p.a);
    let u = 0.5 * alpha * (x1 - x2);
    let ln_sinh = if u.abs() > 30.0 {
        u.abs() - std::f64::consts::LN_2 + (-2.0 * u.abs()).exp().ln_1p()
    } else {
        u.sinh().abs().ln()
    };
    let s = if u.abs() > 350.0 { 0.0 } else { 1.0 / u.sinh().powi(2) };
    let c = if u.abs() > 350.0 { u.signum() } else { 1.0 / u.tanh() };
    let minus = Jet1::new(-2.0 * a * ln_sinh, -a * alpha * c, 0.5 * a * alpha * alpha * s);
    let plus = Jet1::new(-a * alpha * (x1 + x2), -a * alpha, 0.0);
    Ok(Jet2::along_direction(plus, 1.0, 1.0) + Jet2::along_direction(minus, 1.0, -1.0))
}

fn part(params: &ModelParams, part: SuperchargePart) -> Coefficient {
    Coefficient::field(SuperchargeField::new(part, *params))
}

/// `Q⁺`, or `Q⁻` as its formal adjoint.
pub fn supercharge(sign: Sign, params: &ModelParams) -> DifferentialOperator2D {
    let q = DifferentialOperator2D::lorentz(
        part(params, SuperchargePart::C1),
        part(params, SuperchargePart::C2),
        part(params, SuperchargePart::B),
    );
    match sign {
        Sign::Plus => q,
        Sign::Minus => q.adjoint().expect("supercharge coefficients carry full jets"),
    }
}

/// `q⁺ = e^{-χ} Q⁺ e^{χ} = ∂1² - ∂2² - A M(x1) + A M(x2)`.
pub fn gauged_supercharge(params: &ModelParams) -> DifferentialOperator2D {
    let morse = params.morse;
    let f =
        crate::field::FnField::new(2, move |x1, x2| Ok(morse_term(&morse, x2, false) - morse_term(&morse, x1, true)));
    DifferentialOperator2D::lorentz(
        Coefficient::Zero,
        Coefficient::Zero,
        Coefficient::Field { field: Arc::new(f), scale: 1.0 },
    )
}

/// `H = -Δ + V` for a partner branch.
pub fn hamiltonian(branch: Branch, params: &ModelParams, zero: EnergyZero) -> DifferentialOperator2D {
    DifferentialOperator2D::schrodinger(Coefficient::field(PartnerPotential::new(branch, *params, zero)))
}

/// Largest `|V⁽⁰⁾(a) - V⁽¹⁾(a - 1/2) - R(a)|` over the given points, all in
/// the full energy zero.
pub fn shape_identity_defect(params: &ModelParams, points: &[(f64, f64)]) -> Result<f64> {
    let (shifted, r) = shape_invariance_shift(params);
    let v0 = PartnerPotential::new(Branch::Zero, *params, EnergyZero::Full);
    let v1 = PartnerPotential::new(Branch::One, shifted, EnergyZero::Full);
    let mut worst = 0.0f64;
    for &(x1, x2) in points {
        worst = worst.max((v0.value(x1, x2)? - v1.value(x1, x2)? - r).abs());
    }
    Ok(worst)
}
