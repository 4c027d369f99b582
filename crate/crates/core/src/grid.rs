//! Periodic domains and the cell-centered scalar fields that live on them.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A periodic box in one or two dimensions, uniformly partitioned into
/// cells. One-dimensional domains use axis 0; axis 1 is held at a single
/// cell of extent 1 so volumes work out.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    dim: usize,
    extent: [f64; 2],
    cells: [usize; 2],
}

impl DomainSpec {
    /// Periodic interval `[0, length)` split into `cells` cells.
    pub fn line(length: f64, cells: usize) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::Config(String::from("domain length must be positive and finite")));
        }
        if cells == 0 {
            return Err(Error::Config(String::from("domain needs at least one cell per axis")));
        }
        Ok(DomainSpec { dim: 1, extent: [length, 1.0], cells: [cells, 1] })
    }

    /// Periodic rectangle `[0, lx) x [0, ly)`.
    pub fn rect(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(lx > 0.0 && ly > 0.0) || !lx.is_finite() || !ly.is_finite() {
            return Err(Error::Config(String::from("domain extents must be positive and finite")));
        }
        if nx == 0 || ny == 0 {
            return Err(Error::Config(String::from("domain needs at least one cell per axis")));
        }
        Ok(DomainSpec { dim: 2, extent: [lx, ly], cells: [nx, ny] })
    }

    /// Unit interval with `cells` cells.
    pub fn unit_line(cells: usize) -> Result<Self> {
        Self::line(1.0, cells)
    }

    /// Unit square with `n x n` cells.
    pub fn unit_square(n: usize) -> Result<Self> {
        Self::rect(1.0, 1.0, n, n)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn extent(&self) -> [f64; 2] {
        self.extent
    }

    pub fn cells(&self) -> [usize; 2] {
        self.cells
    }

    pub fn cell_count(&self) -> usize {
        self.cells[0] * self.cells[1]
    }

    /// Grid spacing along `axis`.
    pub fn spacing(&self, axis: usize) -> f64 {
        self.extent[axis] / self.cells[axis] as f64
    }

    pub fn cell_volume(&self) -> f64 {
        let mut v = self.spacing(0);
        if self.dim == 2 {
            v *= self.spacing(1);
        }
        v
    }

    /// Center of cell `(ix, iy)`; `iy` is ignored in 1D.
    pub fn cell_center(&self, ix: usize, iy: usize) -> [f64; 2] {
        let x = (ix as f64 + 0.5) * self.spacing(0);
        let y = if self.dim == 2 { (iy as f64 + 0.5) * self.spacing(1) } else { 0.0 };
        [x, y]
    }

    /// Same domain extents and cell counts.
    pub fn same_shape(&self, other: &DomainSpec) -> bool {
        self == other
    }

    /// Wrap a coordinate into `[0, extent)` along `axis`.
    ///
    /// Assumes the input is within one period of the box, which holds for
    /// every walker step because step lengths are capped at half the
    /// extent. The second branch also catches the rounding case where
    /// `x + extent` lands exactly on `extent`.
    #[inline]
    pub fn wrap(&self, x: f64, axis: usize) -> f64 {
        let ext = self.extent[axis];
        let mut y = x;
        if y < 0.0 {
            y += ext;
        }
        if y >= ext {
            y -= ext;
        }
        y
    }

    /// Cell index containing position `x` along `axis`, for `x` already
    /// inside the box. Clamps the top edge so rounding cannot fall off the
    /// end.
    #[inline]
    pub fn cell_of(&self, x: f64, axis: usize) -> usize {
        let n = self.cells[axis];
        let i = (x / self.extent[axis] * n as f64) as usize;
        if i >= n {
            n - 1
        } else {
            i
        }
    }
}

/// A scalar sampled at every cell center of a [`DomainSpec`], stored
/// row-major: `values[iy * nx + ix]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    domain: DomainSpec,
    values: Vec<f64>,
}

impl FieldGrid {
    pub fn from_values(domain: DomainSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.cell_count() {
            return Err(Error::Config(String::from(
                "value count does not match the domain's cell count",
            )));
        }
        Ok(FieldGrid { domain, values })
    }

    /// Evaluate `f` at every cell center.
    pub fn from_fn(domain: DomainSpec, f: impl Fn([f64; 2]) -> f64) -> Self {
        let [nx, ny] = domain.cells();
        let mut values = Vec::with_capacity(domain.cell_count());
        for iy in 0..ny {
            for ix in 0..nx {
                values.push(f(domain.cell_center(ix, iy)));
            }
        }
        FieldGrid { domain, values }
    }

    pub fn constant(domain: DomainSpec, value: f64) -> Self {
        let n = domain.cell_count();
        FieldGrid { domain, values: alloc::vec![value; n] }
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.domain.cells[0] + ix]
    }

    pub fn mean(&self) -> f64 {
        let mut sum = 0.0;
        for v in &self.values {
            sum += v;
        }
        sum / self.values.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |a, &b| a.min(b))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Copy rescaled so the mean is exactly the unit. This is the shared
    /// normalization for every cross-method comparison; it errors when the
    /// field carries no positive mass to normalize against.
    pub fn normalized_mean_one(&self) -> Result<FieldGrid> {
        let m = self.mean();
        if !m.is_finite() || m <= 0.0 {
            return Err(Error::Numerical(String::from(
                "cannot normalize a field whose mean is not positive and finite",
            )));
        }
        let mut out = self.clone();
        for v in &mut out.values {
            *v /= m;
        }
        Ok(out)
    }

    /// Periodic bilinear interpolation at `x` (linear in 1D). `x` must lie
    /// inside the box.
    pub fn sample(&self, x: [f64; 2]) -> f64 {
        let (i0, i1, fx) = self.lerp_index(x[0], 0);
        if self.domain.dim == 1 {
            return self.values[i0] * (1.0 - fx) + self.values[i1] * fx;
        }
        let (j0, j1, fy) = self.lerp_index(x[1], 1);
        let nx = self.domain.cells[0];
        let v00 = self.values[j0 * nx + i0];
        let v10 = self.values[j0 * nx + i1];
        let v01 = self.values[j1 * nx + i0];
        let v11 = self.values[j1 * nx + i1];
        let a = v00 * (1.0 - fx) + v10 * fx;
        let b = v01 * (1.0 - fx) + v11 * fx;
        a * (1.0 - fy) + b * fy
    }

    /// Neighboring sample indices and interpolation weight along `axis`,
    /// treating samples as cell centers with periodic wraparound.
    fn lerp_index(&self, x: f64, axis: usize) -> (usize, usize, f64) {
        let n = self.domain.cells[axis];
        let h = self.domain.spacing(axis);
        let u = x / h - 0.5;
        let base = crate::num::floor(u);
        let frac = u - base;
        let i = base as i64;
        let i0 = i.rem_euclid(n as i64) as usize;
        let i1 = (i + 1).rem_euclid(n as i64) as usize;
        (i0, i1, frac)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_stays_inside() {
        let d = DomainSpec::unit_square(10).unwrap();
        assert_eq!(d.wrap(0.25, 0), 0.25);
        let w = d.wrap(1.0 + 1e-12, 0);
        assert!((0.0..1.0).contains(&w));
        let w = d.wrap(-1e-12, 0);
        assert!((0.0..1.0).contains(&w), "got {w}");
        // A negative value within half an ulp of zero rounds up to the
        // extent itself; the second branch must fold it back to 0.
        let w = d.wrap(-1e-18, 0);
        assert!((0.0..1.0).contains(&w), "got {w}");
    }

    #[test]
    fn cell_of_clamps_top_edge() {
        let d = DomainSpec::unit_line(50).unwrap();
        assert_eq!(d.cell_of(0.0, 0), 0);
        assert_eq!(d.cell_of(0.999999, 0), 49);
        let just_under = f64::from_bits(1.0f64.to_bits() - 1);
        assert_eq!(d.cell_of(just_under, 0), 49);
    }

    #[test]
    fn normalization_sets_unit_mean() {
        let d = DomainSpec::unit_line(4).unwrap();
        let g = FieldGrid::from_values(d, alloc::vec![1.0, 2.0, 3.0, 2.0]).unwrap();
        let n = g.normalized_mean_one().unwrap();
        assert!((n.mean() - 1.0).abs() < 1e-15);
        assert!((n.values()[2] - 1.5).abs() < 1e-15);
    }

    #[test]
    fn normalization_rejects_zero_mass() {
        let d = DomainSpec::unit_line(4).unwrap();
        let g = FieldGrid::constant(d, 0.0);
        assert!(matches!(g.normalized_mean_one(), Err(Error::Numerical(_))));
    }

    #[test]
    fn bilinear_sampling_reproduces_cell_centers() {
        let d = DomainSpec::unit_square(8).unwrap();
        let g = FieldGrid::from_fn(d.clone(), |p| 0.2 + p[0] + 2.0 * p[1]);
        for iy in 0..8 {
            for ix in 0..8 {
                let c = d.cell_center(ix, iy);
                assert!((g.sample(c) - g.get(ix, iy)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn linear_sampling_interpolates_between_centers() {
        let d = DomainSpec::unit_line(4).unwrap();
        let g = FieldGrid::from_values(d, alloc::vec![1.0, 3.0, 5.0, 7.0]).unwrap();
        // midway between the centers of cells 0 and 1
        assert!((g.sample([0.25, 0.0]) - 2.0).abs() < 1e-14);
        // wraparound: midway between cell 3 and cell 0
        assert!((g.sample([0.0, 0.0]) - 4.0).abs() < 1e-14);
    }
}
