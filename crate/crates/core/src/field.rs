//! Scalar fields of one or two coordinates that expose value and partial
//! derivatives up to second order.
//!
//! Everything downstream (potentials, supercharge coefficients, zero modes,
//! Morse eigenfunctions) is expressed through [`Jet2`] so that operators can
//! be applied either analytically or on sampled grids.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::Result;

/// Value and derivatives up to order two of a function of one variable.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet1 {
    pub value: f64,
    pub d: f64,
    pub dd: f64,
}

impl Jet1 {
    pub const fn new(value: f64, d: f64, dd: f64) -> Self {
        Self { value, d, dd }
    }

    pub const fn constant(value: f64) -> Self {
        Self { value, d: 0.0, dd: 0.0 }
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(k * self.value, k * self.d, k * self.dd)
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        Self::new(e, e * self.d, e * (self.dd + self.d * self.d))
    }
}

impl Add for Jet1 {
    type Output = Jet1;
    fn add(self, o: Jet1) -> Jet1 {
        Jet1::new(self.value + o.value, self.d + o.d, self.dd + o.dd)
    }
}

impl Mul for Jet1 {
    type Output = Jet1;
    fn mul(self, o: Jet1) -> Jet1 {
        Jet1::new(
            self.value * o.value,
            self.d * o.value + self.value * o.d,
            self.dd * o.value + 2.0 * self.d * o.d + self.value * o.dd,
        )
    }
}

/// Value, gradient and Hessian of a function of `(x1, x2)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    pub d11: f64,
    pub d12: f64,
    pub d22: f64,
}

impl Jet2 {
    pub const ZERO: Jet2 = Jet2::constant(0.0);

    pub const fn constant(value: f64) -> Self {
        Self { value, d1: 0.0, d2: 0.0, d11: 0.0, d12: 0.0, d22: 0.0 }
    }

    /// Lifts a one-variable jet taken along `x1`.
    pub const fn along_x1(j: Jet1) -> Self {
        Self { value: j.value, d1: j.d, d2: 0.0, d11: j.dd, d12: 0.0, d22: 0.0 }
    }

    /// Lifts a one-variable jet taken along `x2`.
    pub const fn along_x2(j: Jet1) -> Self {
        Self { value: j.value, d1: 0.0, d2: j.d, d11: 0.0, d12: 0.0, d22: j.dd }
    }

    /// Lifts a jet of `g(u)` with `u = k1 x1 + k2 x2`.
    pub fn along_direction(j: Jet1, k1: f64, k2: f64) -> Self {
        Self {
            value: j.value,
            d1: k1 * j.d,
            d2: k2 * j.d,
            d11: k1 * k1 * j.dd,
            d12: k1 * k2 * j.dd,
            d22: k2 * k2 * j.dd,
        }
    }

    pub fn scale(self, k: f64) -> Self {
        Self {
            value: k * self.value,
            d1: k * self.d1,
            d2: k * self.d2,
            d11: k * self.d11,
            d12: k * self.d12,
            d22: k * self.d22,
        }
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        Self {
            value: e,
            d1: e * self.d1,
            d2: e * self.d2,
            d11: e * (self.d11 + self.d1 * self.d1),
            d12: e * (self.d12 + self.d1 * self.d2),
            d22: e * (self.d22 + self.d2 * self.d2),
        }
    }

    pub fn laplacian(&self) -> f64 {
        self.d11 + self.d22
    }

    pub fn is_finite(&self) -> bool {
        [self.value, self.d1, self.d2, self.d11, self.d12, self.d22].iter().all(|v| v.is_finite())
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        Jet2 {
            value: self.value + o.value,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
            d11: self.d11 + o.d11,
            d12: self.d12 + o.d12,
            d22: self.d22 + o.d22,
        }
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        self + (-o)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        Jet2 {
            value: self.value * o.value,
            d1: self.d1 * o.value + self.value * o.d1,
            d2: self.d2 * o.value + self.value * o.d2,
            d11: self.d11 * o.value + 2.0 * self.d1 * o.d1 + self.value * o.d11,
            d12: self.d12 * o.value + self.d1 * o.d2 + self.d2 * o.d1 + self.value * o.d12,
            d22: self.d22 * o.value + 2.0 * self.d2 * o.d2 + self.value * o.d22,
        }
    }
}

/// A scalar field of `(x1, x2)`. One-variable fields ignore the coordinate
/// they do not depend on.
pub trait Field2D: Send + Sync {
    fn jet(&self, x1: f64, x2: f64) -> Result<Jet2>;

    fn value(&self, x1: f64, x2: f64) -> Result<f64> {
        Ok(self.jet(x1, x2)?.value)
    }

    /// Highest derivative order that [`Field2D::jet`] fills in.
    fn order(&self) -> u8 {
        2
    }
}

impl<F: Field2D + ?Sized> Field2D for Arc<F> {
    fn jet(&self, x1: f64, x2: f64) -> Result<Jet2> {
        (**self).jet(x1, x2)
    }
    fn value(&self, x1: f64, x2: f64) -> Result<f64> {
        (**self).value(x1, x2)
    }
    fn order(&self) -> u8 {
        (**self).order()
    }
}

impl<F: Field2D + ?Sized> Field2D for &F {
    fn jet(&self, x1: f64, x2: f64) -> Result<Jet2> {
        (**self).jet(x1, x2)
    }
    fn value(&self, x1: f64, x2: f64) -> Result<f64> {
        (**self).value(x1, x2)
    }
    fn order(&self) -> u8 {
        (**self).order()
    }
}

/// Field backed by a closure returning a jet.
pub struct FnField<F> {
    f: F,
    order: u8,
}

impl<F> FnField<F>
where
    F: Fn(f64, f64) -> Result<Jet2> + Send + Sync,
{
    pub fn new(order: u8, f: F) -> Self {
        Self { f, order }
    }
}

impl<F> Field2D for FnField<F>
where
    F: Fn(f64, f64) -> Result<Jet2> + Send + Sync,
{
    fn jet(&self, x1: f64, x2: f64) -> Result<Jet2> {
        (self.f)(x1, x2)
    }
    fn order(&self) -> u8 {
        self.order
    }
}

/// Constant field.
#[derive(Clone, Copy, Debug)]
pub struct ConstantField(pub f64);

impl Field2D for ConstantField {
    fn jet(&self, _x1: f64, _x2: f64) -> Result<Jet2> {
        Ok(Jet2::constant(self.0))
    }
}

/// Isotropic Gaussian bump `amplitude * exp(-|x - c|^2 / (2 width^2))`.
#[derive(Clone, Copy, Debug)]
pub struct GaussianBump {
    pub center: (f64, f64),
    pub width: f64,
    pub amplitude: f64,
}

impl Field2D for GaussianBump {
    fn jet(&self, x1: f64, x2: f64) -> Result<Jet2> {
        let w2 = self.width * self.width;
        let u = Jet2::along_x1(Jet1::new(x1 - self.center.0, 1.0, 0.0));
        let v = Jet2::along_x2(Jet1::new(x2 - self.center.1, 1.0, 0.0));
        let q = (u * u + v * v).scale(-0.5 / w2);
        Ok(q.exp().scale(self.amplitude))
    }
}

/// Linear combination `sum_k w_k f_k` of fields.
#[derive(Clone)]
pub struct Combination {
    pub terms: Vec<(f64, Arc<dyn Field2D>)>,
}

impl Field2D for Combination {
    fn jet(&self, x1: f64, x2: f64) -> Result<Jet2> {
        let mut acc = Jet2::ZERO;
        for (w, f) in &self.terms {
            acc = acc + f.jet(x1, x2)?.scale(*w);
        }
        Ok(acc)
    }
    fn order(&self) -> u8 {
        self.terms.iter().map(|(_, f)| f.order()).min().unwrap_or(2)
    }
}


#[cfg(test)]
mod tests {
    use super::testing::jet_fd_mismatch;
    use super::*;

    #[test]
    fn product_and_exp_rules_match_differences() {
        let f = FnField::new(2, |x1: f64, x2: f64| {
            let a = Jet2::along_x1(Jet1::new(x1.sin(), x1.cos(), -x1.sin()));
            let b = Jet2::along_x2(Jet1::new(x2 * x2, 2.0 * x2, 2.0));
            Ok((a * b).exp() + a.scale(3.0))
        });
        assert!(jet_fd_mismatch(&f, 0.3, -0.7, 1e-4) < 1e-6);
    }

    #[test]
    fn gaussian_bump_jet() {
        let g = GaussianBump { center: (0.5, 1.0), width: 0.4, amplitude: 2.0 };
        assert!(jet_fd_mismatch(&g, 0.7, 0.8, 1e-4) < 1e-6);
        assert!((g.value(0.5, 1.0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn directional_lift() {
        let j = Jet1::new(1.0, 2.0, 3.0);
        let d = Jet2::along_direction(j, 0.5, -0.5);
        assert_eq!(d.d1, 1.0);
        assert_eq!(d.d2, -1.0);
        assert_eq!(d.d12, -0.75);
    }
}
