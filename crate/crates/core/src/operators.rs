//! Second-order differential operators with constant principal part,
//! `g11 ∂1² + g22 ∂2² + c1 ∂1 + c2 ∂2 + b`.
//!
//! Operators are applied pointwise to analytic fields through their jets, or
//! to sampled fields with second-order central differences. Composite
//! operators are realized as chains and never expanded symbolically.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Field2D, Jet2};
use crate::grid::SampledField;

/// A coefficient function of an operator.
#[derive(Clone)]
pub enum Coefficient {
    Zero,
    Const(f64),
    Field { field: Arc<dyn Field2D>, scale: f64 },
}

impl Coefficient {
    pub fn field(field: impl Field2D + 'static) -> Self {
        Coefficient::Field { field: Arc::new(field), scale: 1.0 }
    }

    pub fn jet(&self, x1: f64, x2: f64) -> Result<Jet2> {
        match self {
            Coefficient::Zero => Ok(Jet2::ZERO),
            Coefficient::Const(c) => Ok(Jet2::constant(*c)),
            Coefficient::Field { field, scale } => Ok(field.jet(x1, x2)?.scale(*scale)),
        }
    }

    pub fn value(&self, x1: f64, x2: f64) -> Result<f64> {
        match self {
            Coefficient::Zero => Ok(0.0),
            Coefficient::Const(c) => Ok(*c),
            Coefficient::Field { field, scale } => Ok(field.value(x1, x2)? * scale),
        }
    }

    pub fn negated(&self) -> Self {
        match self {
            Coefficient::Zero => Coefficient::Zero,
            Coefficient::Const(c) => Coefficient::Const(-c),
            Coefficient::Field { field, scale } => Coefficient::Field { field: field.clone(), scale: -scale },
        }
    }

    fn order(&self) -> u8 {
        match self {
            Coefficient::Field { field, .. } => field.order(),
            _ => u8::MAX,
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, Coefficient::Zero)
    }
}

impl std::fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Coefficient::Zero => write!(f, "Zero"),
            Coefficient::Const(c) => write!(f, "Const({c})"),
            Coefficient::Field { scale, .. } => write!(f, "Field(scale = {scale})"),
        }
    }
}

/// Operator data. The zeroth-order term is stored as
/// `b = base + div_weight * (∂1 c1 + ∂2 c2)` so that the formal adjoint maps
/// coefficients to coefficients without re-deriving anything.
#[derive(Clone, Debug)]
pub struct DifferentialOperator2D {
    pub g11: f64,
    pub g22: f64,
    pub c1: Coefficient,
    pub c2: Coefficient,
    pub base: Coefficient,
    pub div_weight: f64,
}

/// Coefficients evaluated at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalCoefficients {
    pub g11: f64,
    pub g22: f64,
    pub c1: f64,
    pub c2: f64,
    pub b: f64,
}

impl DifferentialOperator2D {
    pub fn new(g11: f64, g22: f64, c1: Coefficient, c2: Coefficient, b: Coefficient) -> Self {
        Self { g11, g22, c1, c2, base: b, div_weight: 0.0 }
    }

    /// `-∂1² - ∂2² + v`.
    pub fn schrodinger(v: Coefficient) -> Self {
        Self::new(-1.0, -1.0, Coefficient::Zero, Coefficient::Zero, v)
    }

    /// `∂1² - ∂2² + b`.
    pub fn lorentz(c1: Coefficient, c2: Coefficient, b: Coefficient) -> Self {
        Self::new(1.0, -1.0, c1, c2, b)
    }

    pub fn has_first_order_terms(&self) -> bool {
        !(self.c1.is_zero() && self.c2.is_zero())
    }

    pub fn coefficients(&self, x1: f64, x2: f64) -> Result<LocalCoefficients> {
        let base = self.base.value(x1, x2)?;
        let (c1, c2, b) = if self.div_weight == 0.0 {
            (self.c1.value(x1, x2)?, self.c2.value(x1, x2)?, base)
        } else {
            let j1 = self.c1.jet(x1, x2)?;
            let j2 = self.c2.jet(x1, x2)?;
            (j1.value, j2.value, base + self.div_weight * (j1.d1 + j2.d2))
        };
        Ok(LocalCoefficients { g11: self.g11, g22: self.g22, c1, c2, b })
    }

    /// Formal L² adjoint: `c_i -> -c_i`, `b -> b - ∂1 c1 - ∂2 c2`.
    pub fn adjoint(&self) -> Result<Self> {
        let available = self.c1.order().min(self.c2.order());
        if available < 1 {
            return Err(Error::MissingDerivative { required: 1, available });
        }
        Ok(Self {
            g11: self.g11,
            g22: self.g22,
            c1: self.c1.negated(),
            c2: self.c2.negated(),
            base: self.base.clone(),
            div_weight: 1.0 - self.div_weight,
        })
    }

    /// Applies the operator to an analytic field at one point.
    pub fn apply_analytic(&self, f: &dyn Field2D, x1: f64, x2: f64) -> Result<f64> {
        if f.order() < 2 {
            return Err(Error::MissingDerivative { required: 2, available: f.order() });
        }
        let j = f.jet(x1, x2)?;
        let c = self.coefficients(x1, x2)?;
        Ok(c.g11 * j.d11 + c.g22 * j.d22 + c.c1 * j.d1 + c.c2 * j.d2 + c.b * j.value)
    }

    /// Applies the operator with central differences. A node of the result
    /// is valid when the node and its four neighbours are valid and the
    /// coefficients are finite there; the outer rim is always invalid.
    pub fn apply_grid(&self, f: &SampledField) -> Result<SampledField> {
        let g = f.grid;
        let (n1, n2) = (g.x1.len, g.x2.len);
        if n1 < 5 || n2 < 5 {
            return Err(Error::GridTooCoarse(format!("{n1}x{n2} nodes, need at least 5 per axis")));
        }
        let (h1, h2) = (g.x1.step, g.x2.step);
        let rows: Vec<(Vec<f64>, Vec<bool>)> = (0..n2)
            .into_par_iter()
            .map(|j| {
                let mut vals = vec![0.0; n1];
                let mut mask = vec![false; n1];
                if j == 0 || j == n2 - 1 {
                    return (vals, mask);
                }
                for i in 1..n1 - 1 {
                    let idx = g.index(i, j);
                    let nb = [idx, idx - 1, idx + 1, idx - n1, idx + n1];
                    if !nb.iter().all(|&k| f.mask[k]) {
                        continue;
                    }
                    let (x1, x2) = g.point(idx);
                    let Ok(c) = self.coefficients(x1, x2) else { continue };
                    let u = &f.values;
                    let d1 = (u[idx + 1] - u[idx - 1]) / (2.0 * h1);
                    let d2 = (u[idx + n1] - u[idx - n1]) / (2.0 * h2);
                    let d11 = (u[idx + 1] - 2.0 * u[idx] + u[idx - 1]) / (h1 * h1);
                    let d22 = (u[idx + n1] - 2.0 * u[idx] + u[idx - n1]) / (h2 * h2);
                    let v = c.g11 * d11 + c.g22 * d22 + c.c1 * d1 + c.c2 * d2 + c.b * u[idx];
                    if v.is_finite() {
                        vals[i] = v;
                        mask[i] = true;
                    }
                }
                (vals, mask)
            })
            .collect();
        let mut values = Vec::with_capacity(g.len());
        let mut mask = Vec::with_capacity(g.len());
        for (v, m) in rows {
            values.extend(v);
            mask.extend(m);
        }
        Ok(SampledField { grid: g, values, mask })
    }
}

/// Operators applied right to left: `ops[0]` acts last.
#[derive(Clone, Debug)]
pub struct OperatorChain {
    pub ops: Vec<DifferentialOperator2D>,
}

/// Minimum fraction of the input's valid nodes that must survive a chain.
pub const CHAIN_MIN_VALID_FRACTION: f64 = 0.8;

impl OperatorChain {
    pub fn new(ops: Vec<DifferentialOperator2D>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidParameter("operator chain must be nonempty".into()));
        }
        Ok(Self { ops })
    }

    pub fn apply_grid(&self, f: &SampledField) -> Result<SampledField> {
        let start = f.valid_count();
        let mut cur = f.clone();
        for op in self.ops.iter().rev() {
            cur = op.apply_grid(&cur)?;
        }
        let kept = cur.valid_count();
        if (kept as f64) < CHAIN_MIN_VALID_FRACTION * start as f64 {
            return Err(Error::GridTooCoarse(format!(
                "chain of {} operators keeps {kept} of {start} valid nodes",
                self.ops.len()
            )));
        }
        Ok(cur)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FnField, GaussianBump, Jet1};
    use crate::grid::Grid2D;
    use proptest::prelude::*;

    fn paraboloid() -> impl Field2D {
        FnField::new(2, |x1: f64, x2: f64| {
            let a = Jet2::along_x1(Jet1::new(x1 * x1, 2.0 * x1, 2.0));
            let b = Jet2::along_x2(Jet1::new(x2 * x2, 2.0 * x2, 2.0));
            Ok(a + b)
        })
    }

    fn wavy() -> Coefficient {
        Coefficient::field(FnField::new(2, |x1: f64, x2: f64| {
            let a = Jet2::along_x1(Jet1::new(x1.sin(), x1.cos(), -x1.sin()));
            let b = Jet2::along_x2(Jet1::new((0.5 * x2).cos(), -0.5 * (0.5 * x2).sin(), -0.25 * (0.5 * x2).cos()));
            Ok(a * b)
        }))
    }

    fn sample_op() -> DifferentialOperator2D {
        DifferentialOperator2D::lorentz(wavy(), Coefficient::Const(0.7), wavy())
    }

    #[test]
    fn laplacian_of_paraboloid() {
        let lap = DifferentialOperator2D::new(1.0, 1.0, Coefficient::Zero, Coefficient::Zero, Coefficient::Zero);
        assert_eq!(lap.apply_analytic(&paraboloid(), 0.3, -1.2).unwrap(), 4.0);
    }

    #[test]
    fn constant_first_order_coefficient_adjoint() {
        let op = DifferentialOperator2D::lorentz(Coefficient::Const(2.5), Coefficient::Zero, Coefficient::Const(1.0));
        let adj = op.adjoint().unwrap();
        let c = adj.coefficients(0.1, 0.2).unwrap();
        assert_eq!((c.c1, c.b), (-2.5, 1.0));
    }

    #[test]
    fn adjoint_is_an_involution() {
        let op = sample_op();
        let back = op.adjoint().unwrap().adjoint().unwrap();
        for k in 0..100 {
            let (x1, x2) = ((k as f64 * 0.37).sin() * 3.0, (k as f64 * 0.91).cos() * 3.0);
            let (a, b) = (op.coefficients(x1, x2).unwrap(), back.coefficients(x1, x2).unwrap());
            assert!((a.c1 - b.c1).abs() < 1e-12 && (a.c2 - b.c2).abs() < 1e-12 && (a.b - b.b).abs() < 1e-12);
        }
    }

    #[test]
    fn adjoint_requires_derivatives() {
        let f = FnField::new(0, |_, _| Ok(Jet2::constant(1.0)));
        let op = DifferentialOperator2D::lorentz(Coefficient::field(f), Coefficient::Zero, Coefficient::Zero);
        assert!(matches!(op.adjoint(), Err(Error::MissingDerivative { .. })));
    }

    #[test]
    fn bilinear_identity_under_quadrature() {
        let op = sample_op();
        let adj = op.adjoint().unwrap();
        let f = GaussianBump { center: (0.3, -0.2), width: 0.6, amplitude: 1.0 };
        let g = GaussianBump { center: (-0.4, 0.5), width: 0.5, amplitude: 1.0 };
        let err = |n: usize| {
            let grid = Grid2D::square(-5.0, 5.0, n).unwrap();
            let (sf, sg) = (SampledField::sample(grid, &f), SampledField::sample(grid, &g));
            let lhs = sf.inner(&op.apply_grid(&sg).unwrap()).unwrap();
            let rhs = adj.apply_grid(&sf).unwrap().inner(&sg).unwrap();
            (lhs - rhs).abs()
        };
        // Gaussians vanish on the rim, so summation by parts is exact up to
        // the discretisation of the coefficient derivative.
        let (e1, e2) = (err(101), err(201));
        assert!(e2 < 1e-3 && e1 / e2 > 3.0, "{e1} {e2}");
    }

    #[test]
    fn second_derivative_stencil_order() {
        let op = DifferentialOperator2D::new(1.0, 0.0, Coefficient::Zero, Coefficient::Zero, Coefficient::Zero);
        let err = |n: usize| {
            let grid = Grid2D::square(0.0, 3.0, n).unwrap();
            let f = SampledField::from_fn(grid, |x1, _| Some(x1.sin()));
            let out = op.apply_grid(&f).unwrap();
            (0..grid.len())
                .filter(|&k| out.mask[k])
                .map(|k| (out.values[k] + grid.point(k).0.sin()).abs())
                .fold(0.0f64, f64::max)
        };
        let order = (err(61) / err(121)).log2();
        assert!((1.9..=2.1).contains(&order), "{order}");
    }

    #[test]
    fn constant_field_is_annihilated_without_potential() {
        let op = DifferentialOperator2D::lorentz(wavy(), wavy(), Coefficient::Zero);
        let grid = Grid2D::square(0.0, 1.0, 9).unwrap();
        let out = op.apply_grid(&SampledField::from_fn(grid, |_, _| Some(3.0))).unwrap();
        assert!(out.values.iter().all(|v| v.abs() < 1e-12));
        assert_eq!(out.valid_count(), 49);
    }

    #[test]
    fn grid_and_analytic_application_agree_to_second_order() {
        let op = sample_op();
        let f = GaussianBump { center: (0.2, 0.1), width: 0.7, amplitude: 1.0 };
        let err = |n: usize| {
            let grid = Grid2D::square(-3.0, 3.0, n).unwrap();
            let out = op.apply_grid(&SampledField::sample(grid, &f)).unwrap();
            let exact = SampledField::from_fn(grid, |a, b| op.apply_analytic(&f, a, b).ok());
            out.combine(1.0, &exact, -1.0).unwrap().norm().unwrap()
        };
        let order = (err(61) / err(121)).log2();
        assert!(order >= 1.9, "{order}");
    }

    #[test]
    fn chain_rules() {
        assert!(OperatorChain::new(vec![]).is_err());
        let op = sample_op();
        let grid = Grid2D::square(-3.0, 3.0, 41).unwrap();
        let f = SampledField::sample(grid, &GaussianBump { center: (0.0, 0.0), width: 0.7, amplitude: 1.0 });
        let single = OperatorChain::new(vec![op.clone()]).unwrap().apply_grid(&f).unwrap();
        assert_eq!(single, op.apply_grid(&f).unwrap());
        let tiny = Grid2D::square(-3.0, 3.0, 6).unwrap();
        let g = SampledField::sample(tiny, &GaussianBump { center: (0.0, 0.0), width: 0.7, amplitude: 1.0 });
        assert!(matches!(
            OperatorChain::new(vec![op.clone(), op]).unwrap().apply_grid(&g),
            Err(Error::GridTooCoarse(_))
        ));
    }

    proptest! {
        #[test]
        fn grid_application_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, s in 0.3f64..1.5) {
            let op = sample_op();
            let grid = Grid2D::square(-2.0, 2.0, 21).unwrap();
            let f = SampledField::sample(grid, &GaussianBump { center: (0.1, 0.0), width: s, amplitude: 1.0 });
            let g = SampledField::from_fn(grid, |x, y| Some((x * y).sin()));
            let lhs = op.apply_grid(&f.combine(a, &g, b).unwrap()).unwrap();
            let rhs = op.apply_grid(&f).unwrap().combine(a, &op.apply_grid(&g).unwrap(), b).unwrap();
            for k in 0..grid.len() {
                prop_assert_eq!(lhs.mask[k], rhs.mask[k]);
                prop_assert!((lhs.values[k] - rhs.values[k]).abs() < 1e-9 * (1.0 + rhs.values[k].abs()));
            }
        }
    }
}
