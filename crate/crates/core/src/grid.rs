//! Uniform tensor grids and sampled fields carrying a validity mask.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field2D;
use crate::quad;

/// Uniformly spaced nodes `start + i * step`, `i = 0..len`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Axis {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl Axis {
    /// `len` nodes covering `[lo, hi]` including both ends.
    pub fn spanning(lo: f64, hi: f64, len: usize) -> Result<Self> {
        if !(hi > lo) || len < 2 {
            return Err(Error::InvalidParameter(format!(
                "axis needs hi > lo and at least two nodes, got [{lo}, {hi}] with {len}"
            )));
        }
        Ok(Self { start: lo, step: (hi - lo) / (len - 1) as f64, len })
    }

    pub fn node(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn end(&self) -> f64 {
        self.node(self.len - 1)
    }
}

/// Tensor grid, row-major with `x1` varying fastest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid2D {
    pub x1: Axis,
    pub x2: Axis,
}

impl Grid2D {
    pub fn square(lo: f64, hi: f64, n: usize) -> Result<Self> {
        let axis = Axis::spanning(lo, hi, n)?;
        Ok(Self { x1: axis, x2: axis })
    }

    pub fn len(&self) -> usize {
        self.x1.len * self.x2.len
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.x1.len + i
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.x1.len, idx / self.x1.len)
    }

    pub fn point(&self, idx: usize) -> (f64, f64) {
        let (i, j) = self.coords(idx);
        (self.x1.node(i), self.x2.node(j))
    }

    pub fn cell_area(&self) -> f64 {
        self.x1.step * self.x2.step
    }

    /// Largest spacing, used as `h` in convergence studies.
    pub fn spacing(&self) -> f64 {
        self.x1.step.max(self.x2.step)
    }

    pub fn is_square(&self) -> bool {
        self.x1 == self.x2
    }

    /// Trapezoid weight of a node.
    pub fn weight(&self, idx: usize) -> f64 {
        let (i, j) = self.coords(idx);
        let w = |k: usize, n: usize| if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
        w(i, self.x1.len) * w(j, self.x2.len) * self.cell_area()
    }

    /// Same domain with `2(n-1)+1` nodes per axis.
    pub fn refined(&self) -> Self {
        let r = |a: Axis| Axis { start: a.start, step: a.step / 2.0, len: 2 * (a.len - 1) + 1 };
        Self { x1: r(self.x1), x2: r(self.x2) }
    }

    /// Same domain with half the cells per axis. Needs an odd node count.
    pub fn coarsened(&self) -> Result<Self> {
        if self.x1.len % 2 == 0 || self.x2.len % 2 == 0 {
            return Err(Error::GridTooCoarse("coarsening needs an odd node count per axis".into()));
        }
        let c = |a: Axis| Axis { start: a.start, step: a.step * 2.0, len: (a.len - 1) / 2 + 1 };
        Ok(Self { x1: c(self.x1), x2: c(self.x2) })
    }
}

/// Values on a grid. Nodes outside `mask` carry no information.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledField {
    pub grid: Grid2D,
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
}

impl SampledField {
    pub fn zeros(grid: Grid2D) -> Self {
        Self { grid, values: vec![0.0; grid.len()], mask: vec![true; grid.len()] }
    }

    /// Samples `f(x1, x2)`; `None` marks a node invalid.
    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> Option<f64> + Sync) -> Self {
        let (values, mask): (Vec<f64>, Vec<bool>) = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let (x1, x2) = grid.point(idx);
                match f(x1, x2) {
                    Some(v) if v.is_finite() => (v, true),
                    _ => (0.0, false),
                }
            })
            .unzip();
        Self { grid, values, mask }
    }

    /// Samples an analytic field. Nodes where evaluation fails are masked.
    pub fn sample(grid: Grid2D, f: &dyn Field2D) -> Self {
        Self::from_fn(grid, |x1, x2| f.value(x1, x2).ok())
    }

    /// Keeps only nodes satisfying `keep`.
    pub fn restrict(mut self, keep: impl Fn(f64, f64) -> bool) -> Self {
        for idx in 0..self.values.len() {
            let (x1, x2) = self.grid.point(idx);
            if !keep(x1, x2) {
                self.mask[idx] = false;
            }
        }
        self
    }

    /// Restricts this mask to the valid nodes of `other`.
    pub fn restrict_to(mut self, other: &SampledField) -> Self {
        for (m, o) in self.mask.iter_mut().zip(&other.mask) {
            *m &= *o;
        }
        self
    }

    /// Masked nodes set to zero.
    pub fn masked_values(&self) -> Vec<f64> {
        self.values.iter().zip(&self.mask).map(|(v, m)| if *m { *v } else { 0.0 }).collect()
    }

    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }

    pub fn value_at(&self, i: usize, j: usize) -> Option<f64> {
        let idx = self.grid.index(i, j);
        self.mask[idx].then_some(self.values[idx])
    }

    fn check_compatible(&self, other: &SampledField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::InvalidParameter("fields live on different grids".into()));
        }
        Ok(())
    }

    /// `a * self + b * other` on the common mask.
    pub fn combine(&self, a: f64, other: &SampledField, b: f64) -> Result<SampledField> {
        self.check_compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        let mask = self.mask.iter().zip(&other.mask).map(|(p, q)| *p && *q).collect();
        Ok(SampledField { grid: self.grid, values, mask })
    }

    pub fn scaled(&self, k: f64) -> SampledField {
        SampledField { grid: self.grid, values: self.values.iter().map(|v| k * v).collect(), mask: self.mask.clone() }
    }

    /// Trapezoid inner product over the common valid mask.
    pub fn inner(&self, other: &SampledField) -> Result<f64> {
        self.check_compatible(other)?;
        let mut any = false;
        let weighted: Vec<f64> = (0..self.values.len())
            .map(|idx| {
                if self.mask[idx] && other.mask[idx] {
                    any = true;
                    self.values[idx] * self.grid.weight(idx)
                } else {
                    0.0
                }
            })
            .collect();
        if !any {
            return Err(Error::EmptyMask);
        }
        Ok(quad::dot(&weighted, &other.values))
    }

    pub fn norm(&self) -> Result<f64> {
        Ok(self.inner(self)?.sqrt())
    }

    /// Image under the reflection `x1 <-> x2`. Needs a square grid.
    pub fn reflected(&self) -> Result<SampledField> {
        if !self.grid.is_square() {
            return Err(Error::InvalidParameter("reflection needs identical axes".into()));
        }
        let n = self.grid.x1.len;
        let mut values = vec![0.0; self.values.len()];
        let mut mask = vec![false; self.values.len()];
        for j in 0..n {
            for i in 0..n {
                let src = self.grid.index(j, i);
                let dst = self.grid.index(i, j);
                values[dst] = self.values[src];
                mask[dst] = self.mask[src];
            }
        }
        Ok(SampledField { grid: self.grid, values, mask })
    }

    /// Completes a field known on `x2 > x1` to the full square by
    /// `psi(x2, x1) = parity * psi(x1, x2)`. The diagonal is set to zero for
    /// odd parity and left masked otherwise.
    pub fn extend_by_reflection(&self, parity: f64) -> Result<SampledField> {
        let r = self.reflected()?;
        let n = self.grid.x1.len;
        let mut out = self.clone();
        for j in 0..n {
            for i in 0..n {
                let idx = self.grid.index(i, j);
                if i > j && r.mask[idx] {
                    out.values[idx] = parity * r.values[idx];
                    out.mask[idx] = true;
                } else if i == j && parity < 0.0 {
                    out.values[idx] = 0.0;
                    out.mask[idx] = true;
                }
            }
        }
        Ok(out)
    }

    /// Samples every other node of a field on the refined grid of `coarse`.
    pub fn restrict_to_coarse(&self, coarse: Grid2D) -> Result<SampledField> {
        if self.grid.refined() != coarse.refined() || coarse.refined() != self.grid {
            return Err(Error::InvalidParameter("grid is not a refinement of the target".into()));
        }
        let mut values = Vec::with_capacity(coarse.len());
        let mut mask = Vec::with_capacity(coarse.len());
        for j in 0..coarse.x2.len {
            for i in 0..coarse.x1.len {
                let idx = self.grid.index(2 * i, 2 * j);
                values.push(self.values[idx]);
                mask.push(self.mask[idx]);
            }
        }
        Ok(SampledField { grid: coarse, values, mask })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GaussianBump;

    #[test]
    fn node_layout() {
        let g = Grid2D::square(0.0, 1.0, 11).unwrap();
        assert_eq!(g.len(), 121);
        assert_eq!(g.point(g.index(3, 7)), (g.x1.node(3), g.x2.node(7)));
        assert_eq!(g.coords(g.index(4, 2)), (4, 2));
        assert_eq!(g.refined().x1.len, 21);
        assert_eq!(g.refined().coarsened().unwrap(), g);
    }

    #[test]
    fn gaussian_norm_by_trapezoid() {
        let g = Grid2D::square(-6.0, 6.0, 241).unwrap();
        let f = SampledField::sample(g, &GaussianBump { center: (0.0, 0.0), width: 1.0, amplitude: 1.0 });
        // ∫ exp(-r²) = π
        assert!((f.inner(&f).unwrap() - std::f64::consts::PI).abs() < 1e-10);
    }

    #[test]
    fn inner_product_on_empty_mask_fails() {
        let g = Grid2D::square(0.0, 1.0, 5).unwrap();
        let f = SampledField::zeros(g).restrict(|_, _| false);
        assert_eq!(f.inner(&f), Err(Error::EmptyMask));
    }

    #[test]
    fn reflection_is_an_involution() {
        let g = Grid2D::square(0.0, 1.0, 9).unwrap();
        let f = SampledField::from_fn(g, |a, b| Some(a + 3.0 * b * b)).restrict(|a, b| b > a);
        let back = f.reflected().unwrap().reflected().unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn odd_extension_halves_the_triangle_norm() {
        let g = Grid2D::square(-1.0, 1.0, 81).unwrap();
        let f = SampledField::from_fn(g, |a, b| Some((b - a) * (-(a * a + b * b)).exp()));
        let tri = f.clone().restrict(|a, b| b > a);
        let full = tri.extend_by_reflection(-1.0).unwrap();
        assert_eq!(full.valid_count(), g.len());
        let (nt, nf) = (tri.inner(&tri).unwrap(), full.inner(&full).unwrap());
        assert!((2.0 * nt - nf).abs() < 1e-12 * nf);
    }
}
