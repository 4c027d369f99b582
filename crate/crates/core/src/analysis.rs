//! Comparison and diagnostic tools for density grids.
//!
//! All comparisons normalize both inputs to unit mean first, so ensembles
//! of different sizes and solver outputs with arbitrary mass land on the
//! same footing.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::FieldGrid;

/// Norms of the difference between two unit-mean densities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonReport {
    /// Volume-weighted L1 norm of the difference.
    pub l1: f64,
    /// Volume-weighted L2 norm of the difference.
    pub l2: f64,
    /// Largest pointwise difference.
    pub linf: f64,
    /// Plain root mean square over cells (no volume weight).
    pub rms: f64,
    /// Mean signed difference.
    pub bias: f64,
}

/// Normalize both grids to unit mean and measure their difference.
pub fn compare_grids(a: &FieldGrid, b: &FieldGrid) -> Result<ComparisonReport> {
    let d = normalized_difference(a, b)?;
    let vol = d.domain().cell_volume();
    let n = d.values().len() as f64;
    let mut l1 = 0.0;
    let mut sq = 0.0;
    let mut linf = 0.0f64;
    let mut sum = 0.0;
    for &v in d.values() {
        l1 += v.abs();
        sq += v * v;
        linf = linf.max(v.abs());
        sum += v;
    }
    Ok(ComparisonReport {
        l1: l1 * vol,
        l2: crate::num::sqrt(sq * vol),
        linf,
        rms: crate::num::sqrt(sq / n),
        bias: sum / n,
    })
}

/// `a - b` after normalizing each to unit mean. Shapes must match.
pub fn normalized_difference(a: &FieldGrid, b: &FieldGrid) -> Result<FieldGrid> {
    if !a.domain().same_shape(b.domain()) {
        return Err(Error::Config(String::from("grids differ in shape")));
    }
    let an = a.normalized_mean_one()?;
    let bn = b.normalized_mean_one()?;
    let mut out = an;
    for (v, r) in out.values_mut().iter_mut().zip(bn.values()) {
        *v -= r;
    }
    Ok(out)
}

/// `||a - reference||_2 / ||reference||_2` after unit-mean normalization
/// of both. The denominator uses the reference alone, so the measure
/// reads as a fractional departure from it.
pub fn relative_l2(a: &FieldGrid, reference: &FieldGrid) -> Result<f64> {
    let d = normalized_difference(a, reference)?;
    let rn = reference.normalized_mean_one()?;
    let mut num = 0.0;
    for &v in d.values() {
        num += v * v;
    }
    let mut den = 0.0;
    for &v in rn.values() {
        den += v * v;
    }
    if den == 0.0 {
        return Err(Error::Numerical(String::from("reference grid has zero norm")));
    }
    Ok(crate::num::sqrt(num / den))
}

/// Per-region noise levels of a difference grid.
#[derive(Debug, Clone)]
pub struct UniformityReport {
    /// RMS of the difference in each region (2x2 quadrants in 2D, four
    /// segments in 1D).
    pub region_rms: Vec<f64>,
    /// Largest region RMS over smallest. Near 1 for featureless noise;
    /// structured residuals push it up.
    pub ratio: f64,
}

/// Split the grid into four regions and compare their RMS levels.
///
/// Statistical noise spreads evenly, so a fluctuation-dominated
/// difference gives a ratio near 1 while a systematic residual
/// concentrates in some region and inflates it.
pub fn noise_uniformity(diff: &FieldGrid) -> Result<UniformityReport> {
    let dom = diff.domain();
    let [nx, ny] = dom.cells();
    let mut sums = [0.0f64; 4];
    let mut counts = [0usize; 4];
    if dom.dim() == 2 {
        if nx < 2 || ny < 2 {
            return Err(Error::Config(String::from("need at least 2 cells per axis")));
        }
        for iy in 0..ny {
            for ix in 0..nx {
                let region = (ix >= nx / 2) as usize + 2 * ((iy >= ny / 2) as usize);
                let v = diff.get(ix, iy);
                sums[region] += v * v;
                counts[region] += 1;
            }
        }
    } else {
        if nx < 4 {
            return Err(Error::Config(String::from("need at least 4 cells")));
        }
        for ix in 0..nx {
            let region = (4 * ix / nx).min(3);
            let v = diff.get(ix, 0);
            sums[region] += v * v;
            counts[region] += 1;
        }
    }
    let mut region_rms = Vec::with_capacity(4);
    for i in 0..4 {
        region_rms.push(crate::num::sqrt(sums[i] / counts[i] as f64));
    }
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for &r in &region_rms {
        lo = lo.min(r);
        hi = hi.max(r);
    }
    let ratio = if hi == 0.0 {
        1.0
    } else if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    };
    Ok(UniformityReport { region_rms, ratio })
}

/// One interior sample of the local Soret coefficient.
#[derive(Debug, Clone, Copy)]
pub struct SoretSample {
    pub x: f64,
    pub temperature: f64,
    pub s_t: f64,
}

/// Result of fitting a steady density against a temperature profile.
#[derive(Debug, Clone)]
pub struct SoretFit {
    /// Least-squares slope of `ln u` against `ln T`: the exponent `p` in
    /// `u ~ T^p`.
    pub exponent: f64,
    /// Pointwise `S_T = -d(ln u)/dT` from central differences at
    /// interior cells.
    pub local: Vec<SoretSample>,
}

/// Fit `u ~ T^p` and extract the local Soret coefficient along a 1D
/// profile. The seam cells are excluded from the local samples because
/// the temperature profile is generally discontinuous across the
/// periodic boundary.
pub fn fit_soret(u: &FieldGrid, temp: &FieldGrid) -> Result<SoretFit> {
    if !u.domain().same_shape(temp.domain()) {
        return Err(Error::Config(String::from("grids differ in shape")));
    }
    if u.domain().dim() != 1 {
        return Err(Error::Config(String::from("soret fit expects a 1D profile")));
    }
    let n = u.domain().cells()[0];
    if n < 3 {
        return Err(Error::Config(String::from("need at least 3 cells")));
    }
    for i in 0..n {
        if !(u.values()[i] > 0.0) || !(temp.values()[i] > 0.0) {
            return Err(Error::Domain(String::from(
                "density and temperature must be positive for a log fit",
            )));
        }
    }
    let mut pts = Vec::with_capacity(n);
    for i in 0..n {
        pts.push((crate::num::log(temp.values()[i]), crate::num::log(u.values()[i])));
    }
    let exponent = lsq_slope(&pts)?;

    let mut local = Vec::new();
    for i in 1..n - 1 {
        let dt = temp.values()[i + 1] - temp.values()[i - 1];
        if dt == 0.0 {
            continue;
        }
        let dlnu = crate::num::log(u.values()[i + 1]) - crate::num::log(u.values()[i - 1]);
        local.push(SoretSample {
            x: u.domain().cell_center(i, 0)[0],
            temperature: temp.values()[i],
            s_t: -dlnu / dt,
        });
    }
    Ok(SoretFit { exponent, local })
}

/// Least-squares order estimate from `(h, err)` samples: the slope of
/// `ln err` against `ln h`.
pub fn convergence_rate(samples: &[(f64, f64)]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::Config(String::from("need at least two samples")));
    }
    let mut pts = Vec::with_capacity(samples.len());
    for &(h, err) in samples {
        if !(h > 0.0) || !(err > 0.0) || !h.is_finite() || !err.is_finite() {
            return Err(Error::Config(String::from("spacings and errors must be positive")));
        }
        pts.push((crate::num::log(h), crate::num::log(err)));
    }
    lsq_slope(&pts)
}

/// Slope of the least-squares line through `(x, y)` points. Errors if
/// the abscissas are all identical.
fn lsq_slope(pts: &[(f64, f64)]) -> Result<f64> {
    let n = pts.len() as f64;
    let mut sx = 0.0;
    let mut sy = 0.0;
    for &(x, y) in pts {
        sx += x;
        sy += y;
    }
    let (mx, my) = (sx / n, sy / n);
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in pts {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::Numerical(String::from("degenerate fit: all abscissas equal")));
    }
    Ok(sxy / sxx)
}
