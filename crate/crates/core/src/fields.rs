//! Walk profiles and the transport coefficients derived from them.
//!
//! A profile assigns every point a step length `dx(x)` and a step cost
//! `dt(x)`. Everything else is derived through two identities and kept on
//! a single arithmetic path so the pair can never drift apart:
//!
//! ```text
//! D(x) = dx(x)^2 / (2 n dt(x))      n = spatial dimension
//! S(x) = dx(x) / dt(x)
//! ```
//!
//! The temperature side lives here too: thermal speed `S = c sqrt(T)`,
//! the drag-law diffusivity `k_B T / (6 pi eta R)`, and the pair
//! `D_T = (D/S) dS/dT`, `S_T = (1/S) dS/dT` that the thermophoretic flux
//! law consumes.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{DomainSpec, FieldGrid};

/// Quadratic-bowl profile coefficients: `dx = 0.02 (0.2 + |x - c|^2)`,
/// `dt = 0.02 (0.2 + |x - c|^2)^2` on the unit square, center `c = 0.5`.
/// The square/linear split makes `D = 0.005` exactly while `S` varies
/// threefold across the box.
const BOWL_SCALE: f64 = 0.02;
const BOWL_OFFSET: f64 = 0.2;
const BOWL_CENTER: f64 = 0.5;

/// Relative step for finite-difference speed derivatives.
const SPEED_FD_REL_STEP: f64 = 1e-6;

#[derive(Debug)]
pub(crate) enum ProfileKind {
    /// 2D unit square, slow in the corners, fast at the center.
    QuadraticBowl,
    /// Homogeneous walk.
    Constant { dx: f64, dt: f64 },
    /// 1D walk with `S = sqrt(T)` over a linear temperature ramp
    /// `T(x) = t0 + grad x` and constant diffusivity.
    SqrtTemperature { t0: f64, grad: f64, diffusivity: f64 },
    /// Both fields tabulated on a grid, interpolated bilinearly.
    Sampled { dx: FieldGrid, dt: FieldGrid },
}

/// Step-length and step-cost fields for a gridless walk.
///
/// Construction validates positivity, finiteness, and the step-length cap
/// `dx < extent/2` that the periodic wrap relies on, so evaluation inside
/// the domain is total.
#[derive(Debug)]
pub struct WalkProfile {
    domain: DomainSpec,
    kind: ProfileKind,
}

impl WalkProfile {
    /// The quadratic-bowl profile on the unit square (CLI name
    /// `paper-fig2`).
    pub fn quadratic_bowl() -> Self {
        let domain = DomainSpec::unit_square(1).expect("unit square is valid");
        WalkProfile { domain, kind: ProfileKind::QuadraticBowl }
    }

    /// Homogeneous profile: the same `dx` and `dt` everywhere.
    pub fn constant(domain: DomainSpec, dx: f64, dt: f64) -> Result<Self> {
        if !(dx > 0.0) || !dx.is_finite() || !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Config(String::from("constant profile needs dx > 0 and dt > 0")));
        }
        let min_extent = if domain.dim() == 2 {
            domain.extent()[0].min(domain.extent()[1])
        } else {
            domain.extent()[0]
        };
        if dx >= 0.5 * min_extent {
            return Err(Error::Config(String::from(
                "step length must stay below half the domain extent",
            )));
        }
        Ok(WalkProfile { domain, kind: ProfileKind::Constant { dx, dt } })
    }

    /// 1D profile realizing `S = sqrt(T)` with constant diffusivity over
    /// `T(x) = t0 + grad x` (CLI name `sqrt-temperature`).
    pub fn sqrt_temperature(
        domain: DomainSpec,
        t0: f64,
        grad: f64,
        diffusivity: f64,
    ) -> Result<Self> {
        if domain.dim() != 1 {
            return Err(Error::Config(String::from("sqrt-temperature profile is 1D")));
        }
        if !(diffusivity > 0.0) || !diffusivity.is_finite() {
            return Err(Error::Config(String::from("diffusivity must be positive")));
        }
        let length = domain.extent()[0];
        let t_end = t0 + grad * length;
        if !(t0 > 0.0) || !(t_end > 0.0) || !t0.is_finite() || !t_end.is_finite() {
            return Err(Error::Domain(String::from(
                "temperature ramp must stay positive across the domain",
            )));
        }
        // dx = 2 D / sqrt(T) peaks where T is smallest.
        let t_min = t0.min(t_end);
        if 2.0 * diffusivity / crate::num::sqrt(t_min) >= 0.5 * length {
            return Err(Error::Config(String::from(
                "step length must stay below half the domain extent",
            )));
        }
        Ok(WalkProfile { domain, kind: ProfileKind::SqrtTemperature { t0, grad, diffusivity } })
    }

    /// Profile tabulated on grids, one sample per cell center.
    pub fn sampled(dx: FieldGrid, dt: FieldGrid) -> Result<Self> {
        if !dx.domain().same_shape(dt.domain()) {
            return Err(Error::Config(String::from("dx and dt grids must share a domain")));
        }
        if !dx.all_finite() || !dt.all_finite() || dx.min() <= 0.0 || dt.min() <= 0.0 {
            return Err(Error::Domain(String::from(
                "sampled profile fields must be finite and positive",
            )));
        }
        let domain = dx.domain().clone();
        let min_extent = if domain.dim() == 2 {
            domain.extent()[0].min(domain.extent()[1])
        } else {
            domain.extent()[0]
        };
        // Interpolated values are convex combinations of the samples, so
        // bounding the samples bounds the whole field.
        if dx.max() >= 0.5 * min_extent {
            return Err(Error::Config(String::from(
                "step length must stay below half the domain extent",
            )));
        }
        Ok(WalkProfile { domain, kind: ProfileKind::Sampled { dx, dt } })
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub(crate) fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    /// `(dx, dt)` at a point. The point is wrapped into the box first;
    /// a non-finite input is rejected rather than wrapped into nonsense.
    pub fn eval(&self, x: [f64; 2]) -> Result<(f64, f64)> {
        if !x[0].is_finite() || (self.domain.dim() == 2 && !x[1].is_finite()) {
            return Err(Error::Numerical(String::from("profile evaluated at non-finite point")));
        }
        let px = self.domain.wrap(x[0], 0);
        let py = if self.domain.dim() == 2 { self.domain.wrap(x[1], 1) } else { 0.0 };
        let (dx, dt) = match &self.kind {
            ProfileKind::QuadraticBowl => BowlEval.dx_dt(px, py),
            ProfileKind::Constant { dx, dt } => (*dx, *dt),
            ProfileKind::SqrtTemperature { t0, grad, diffusivity } => {
                SqrtTempEval { t0: *t0, grad: *grad, d2: 2.0 * diffusivity }.dx_dt(px, py)
            }
            ProfileKind::Sampled { dx, dt } => (dx.sample([px, py]), dt.sample([px, py])),
        };
        if !dx.is_finite() || !dt.is_finite() {
            return Err(Error::Numerical(String::from("profile produced a non-finite value")));
        }
        Ok((dx, dt))
    }

    /// Local diffusivity `dx^2 / (2 n dt)`, computed from the same
    /// evaluation as [`eval`](Self::eval) so the two can never disagree.
    pub fn diffusivity(&self, x: [f64; 2]) -> Result<f64> {
        let (dx, dt) = self.eval(x)?;
        if dt == 0.0 {
            return Err(Error::Numerical(String::from("zero step cost in diffusivity")));
        }
        Ok(dx * dx / (2.0 * self.domain.dim() as f64 * dt))
    }

    /// Local walk speed `dx / dt`.
    pub fn walk_speed(&self, x: [f64; 2]) -> Result<f64> {
        let (dx, dt) = self.eval(x)?;
        if dt == 0.0 {
            return Err(Error::Numerical(String::from("zero step cost in walk speed")));
        }
        Ok(dx / dt)
    }

    /// Walk speed sampled at the cell centers of a grid over this
    /// profile's domain.
    pub fn speed_grid(&self, cells: [usize; 2]) -> Result<FieldGrid> {
        let domain = self.regrid(cells)?;
        let mut values = Vec::with_capacity(domain.cell_count());
        let [nx, ny] = domain.cells();
        for iy in 0..ny {
            for ix in 0..nx {
                values.push(self.walk_speed(domain.cell_center(ix, iy))?);
            }
        }
        FieldGrid::from_values(domain, values)
    }

    /// Diffusivity sampled at the cell centers of a grid over this
    /// profile's domain.
    pub fn diffusivity_grid(&self, cells: [usize; 2]) -> Result<FieldGrid> {
        let domain = self.regrid(cells)?;
        let mut values = Vec::with_capacity(domain.cell_count());
        let [nx, ny] = domain.cells();
        for iy in 0..ny {
            for ix in 0..nx {
                values.push(self.diffusivity(domain.cell_center(ix, iy))?);
            }
        }
        FieldGrid::from_values(domain, values)
    }

    fn regrid(&self, cells: [usize; 2]) -> Result<DomainSpec> {
        let ext = self.domain.extent();
        if self.domain.dim() == 1 {
            DomainSpec::line(ext[0], cells[0])
        } else {
            DomainSpec::rect(ext[0], ext[1], cells[0], cells[1])
        }
    }
}

/// Point evaluation used by both the public profile API and the walker
/// hot loops; one implementation per profile kind keeps the loops
/// monomorphic.
pub(crate) trait PointEval {
    fn dx_dt(&self, x: f64, y: f64) -> (f64, f64);
}

pub(crate) struct BowlEval;

impl PointEval for BowlEval {
    #[inline(always)]
    fn dx_dt(&self, x: f64, y: f64) -> (f64, f64) {
        let ux = x - BOWL_CENTER;
        let uy = y - BOWL_CENTER;
        let p = BOWL_OFFSET + ux * ux + uy * uy;
        let dx = BOWL_SCALE * p;
        (dx, dx * p)
    }
}

pub(crate) struct ConstEval {
    pub dx: f64,
    pub dt: f64,
}

impl PointEval for ConstEval {
    #[inline(always)]
    fn dx_dt(&self, _x: f64, _y: f64) -> (f64, f64) {
        (self.dx, self.dt)
    }
}

pub(crate) struct SqrtTempEval {
    pub t0: f64,
    pub grad: f64,
    /// `2 * diffusivity`, folded at construction.
    pub d2: f64,
}

impl PointEval for SqrtTempEval {
    #[inline(always)]
    fn dx_dt(&self, x: f64, _y: f64) -> (f64, f64) {
        let t = self.t0 + self.grad * x;
        (self.d2 / crate::num::sqrt(t), self.d2 / t)
    }
}

pub(crate) struct SampledEval<'a> {
    pub dx: &'a FieldGrid,
    pub dt: &'a FieldGrid,
}

impl PointEval for SampledEval<'_> {
    #[inline(always)]
    fn dx_dt(&self, x: f64, y: f64) -> (f64, f64) {
        (self.dx.sample([x, y]), self.dt.sample([x, y]))
    }
}

/// Physical constants for the dimensional route: thermal speed and the
/// drag-law diffusivity.
#[derive(Debug, Clone)]
pub struct PhysicalParams {
    /// Boltzmann constant, J/K.
    pub k_b: f64,
    /// Particle mass, kg.
    pub mass: f64,
    /// Bead radius in the drag law, m.
    pub radius: f64,
    /// Solvent viscosity at the reference temperature, Pa s.
    pub eta0: f64,
    /// Reference temperature for the viscosity power law, K.
    pub t0: f64,
    /// Viscosity exponent: `eta(T) = eta0 (T/t0)^s`, `1/2 < s < 1`.
    pub s: f64,
}

pub const BOLTZMANN: f64 = 1.380649e-23;

impl PhysicalParams {
    pub fn new(mass: f64, radius: f64, eta0: f64, t0: f64) -> Self {
        PhysicalParams { k_b: BOLTZMANN, mass, radius, eta0, t0, s: 0.75 }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [self.k_b, self.mass, self.radius, self.eta0, self.t0];
        if positive.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::Config(String::from("physical parameters must be positive")));
        }
        if !(self.s > 0.5 && self.s < 1.0) {
            return Err(Error::Config(String::from("viscosity exponent must lie in (1/2, 1)")));
        }
        Ok(())
    }

    /// Power-law viscosity `eta0 (T/t0)^s`.
    pub fn viscosity(&self, t: f64) -> Result<f64> {
        self.validate()?;
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(String::from("viscosity needs T > 0")));
        }
        Ok(self.eta0 * crate::num::pow(t / self.t0, self.s))
    }

    /// Thermal speed scale `sqrt(k_B / M)`.
    pub fn thermal_speed_scale(&self) -> f64 {
        crate::num::sqrt(self.k_b / self.mass)
    }
}

/// How walk speed responds to temperature.
pub enum SpeedModel {
    /// `S = scale sqrt(T)`; the derivative is analytic.
    Sqrt { scale: f64 },
    /// Temperature-independent speed.
    Constant { value: f64 },
    /// Caller-supplied `S(T)`; the derivative falls back to a central
    /// difference with relative step 1e-6.
    Custom { f: Box<dyn Fn(f64) -> f64 + Send + Sync> },
}

impl core::fmt::Debug for SpeedModel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SpeedModel::Sqrt { scale } => write!(f, "Sqrt {{ scale: {scale} }}"),
            SpeedModel::Constant { value } => write!(f, "Constant {{ value: {value} }}"),
            SpeedModel::Custom { .. } => write!(f, "Custom {{ .. }}"),
        }
    }
}

impl SpeedModel {
    pub fn sqrt() -> Self {
        SpeedModel::Sqrt { scale: 1.0 }
    }

    pub fn speed(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(String::from("speed model needs T > 0")));
        }
        let s = match self {
            SpeedModel::Sqrt { scale } => scale * crate::num::sqrt(t),
            SpeedModel::Constant { value } => *value,
            SpeedModel::Custom { f } => f(t),
        };
        if !s.is_finite() {
            return Err(Error::Numerical(String::from("speed model produced a non-finite value")));
        }
        Ok(s)
    }

    /// `dS/dT`: analytic where the form is known, central difference for
    /// custom models.
    pub fn dspeed_dt(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(String::from("speed model needs T > 0")));
        }
        match self {
            SpeedModel::Sqrt { scale } => Ok(0.5 * scale / crate::num::sqrt(t)),
            SpeedModel::Constant { .. } => Ok(0.0),
            SpeedModel::Custom { .. } => {
                let h = SPEED_FD_REL_STEP * t;
                let hi = self.speed(t + h)?;
                let lo = self.speed(t - h)?;
                Ok((hi - lo) / (2.0 * h))
            }
        }
    }
}

/// Thermal speed field `S = c sqrt(T)`; `c = sqrt(k_B/M)` in physical
/// units, `c = 1` when `nondimensional` is set.
pub fn speed_from_temperature(
    temp: &FieldGrid,
    params: &PhysicalParams,
    nondimensional: bool,
) -> Result<FieldGrid> {
    if !nondimensional {
        params.validate()?;
    }
    if !temp.all_finite() || temp.min() <= 0.0 {
        return Err(Error::Domain(String::from("temperature field must be finite and positive")));
    }
    let c = if nondimensional { 1.0 } else { params.thermal_speed_scale() };
    let mut out = temp.clone();
    for v in out.values_mut() {
        *v = c * crate::num::sqrt(*v);
    }
    Ok(out)
}

/// Drag-law diffusivity `k_B T / (6 pi eta(T) R)`.
pub fn einstein_diffusivity(t: f64, params: &PhysicalParams) -> Result<f64> {
    let eta = params.viscosity(t)?;
    Ok(params.k_b * t / (6.0 * core::f64::consts::PI * eta * params.radius))
}

/// Thermal-diffusion coefficient `D_T = (D/S) dS/dT`.
pub fn thermal_diffusivity(d: f64, model: &SpeedModel, t: f64) -> Result<f64> {
    let s = model.speed(t)?;
    if s == 0.0 {
        return Err(Error::Numerical(String::from("zero speed in thermal diffusivity")));
    }
    Ok(d / s * model.dspeed_dt(t)?)
}

/// Soret coefficient `S_T = (1/S) dS/dT = d ln S / dT`.
pub fn soret_coefficient(model: &SpeedModel, t: f64) -> Result<f64> {
    let s = model.speed(t)?;
    if s == 0.0 {
        return Err(Error::Numerical(String::from("zero speed in Soret coefficient")));
    }
    Ok(model.dspeed_dt(t)? / s)
}

/// The four coefficient fields the flux laws consume, all on one grid.
#[derive(Debug, Clone)]
pub struct CoefficientSet {
    pub diffusivity: FieldGrid,
    pub speed: FieldGrid,
    pub thermal_diffusivity: FieldGrid,
    pub soret: FieldGrid,
}

/// Assemble a [`CoefficientSet`] from a temperature field, a diffusivity
/// field, and a speed model. `S_T = D_T / D` holds pointwise by
/// construction.
pub fn coefficients_from_temperature(
    temp: &FieldGrid,
    diffusivity: &FieldGrid,
    model: &SpeedModel,
) -> Result<CoefficientSet> {
    if !temp.domain().same_shape(diffusivity.domain()) {
        return Err(Error::Config(String::from(
            "temperature and diffusivity grids must share a domain",
        )));
    }
    if !diffusivity.all_finite() || diffusivity.min() <= 0.0 {
        return Err(Error::Domain(String::from("diffusivity field must be finite and positive")));
    }
    let n = temp.domain().cell_count();
    let mut speed = Vec::with_capacity(n);
    let mut soret = Vec::with_capacity(n);
    let mut d_t = Vec::with_capacity(n);
    for i in 0..n {
        let t = temp.values()[i];
        let s_t = soret_coefficient(model, t)?;
        speed.push(model.speed(t)?);
        soret.push(s_t);
        d_t.push(diffusivity.values()[i] * s_t);
    }
    let domain = temp.domain().clone();
    Ok(CoefficientSet {
        diffusivity: diffusivity.clone(),
        speed: FieldGrid::from_values(domain.clone(), speed)?,
        thermal_diffusivity: FieldGrid::from_values(domain.clone(), d_t)?,
        soret: FieldGrid::from_values(domain, soret)?,
    })
}

/// The walk's steady state on a periodic domain: density proportional to
/// `1/S`, normalized to unit mean.
pub fn theoretical_steady_state(speed: &FieldGrid) -> Result<FieldGrid> {
    if !speed.all_finite() || speed.min() <= 0.0 {
        return Err(Error::Domain(String::from("speed field must be finite and positive")));
    }
    let mut out = speed.clone();
    for v in out.values_mut() {
        *v = 1.0 / *v;
    }
    out.normalized_mean_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(a.abs())
    }

    #[test]
    fn bowl_profile_center_and_corner() {
        let p = WalkProfile::quadratic_bowl();
        let (dx, dt) = p.eval([0.5, 0.5]).unwrap();
        assert!(close(dx, 0.004, 1e-14), "dx={dx}");
        assert!(close(dt, 0.0008, 1e-14), "dt={dt}");
        let (dx, dt) = p.eval([0.0, 0.0]).unwrap();
        assert!(close(dx, 0.014, 1e-14));
        assert!(close(dt, 0.0098, 1e-14));
    }

    #[test]
    fn bowl_diffusivity_is_uniform() {
        let p = WalkProfile::quadratic_bowl();
        for &pt in &[[0.5, 0.5], [0.0, 0.0], [0.13, 0.77], [0.9, 0.2]] {
            let d = p.diffusivity(pt).unwrap();
            assert!(close(d, 0.005, 1e-12), "D({pt:?}) = {d}");
        }
        assert!(close(p.walk_speed([0.5, 0.5]).unwrap(), 5.0, 1e-12));
        assert!(close(p.walk_speed([0.0, 0.0]).unwrap(), 1.0 / 0.7, 1e-12));
    }

    #[test]
    fn constant_profile_diffusivity_1d() {
        let dom = DomainSpec::line(10.0, 10).unwrap();
        let p = WalkProfile::constant(dom, 1.0, 1.0).unwrap();
        assert!(close(p.diffusivity([3.0, 0.0]).unwrap(), 0.5, 1e-15));
    }

    #[test]
    fn oversized_steps_are_rejected() {
        let dom = DomainSpec::unit_line(10).unwrap();
        assert!(matches!(
            WalkProfile::constant(dom, 0.6, 0.01),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn eval_rejects_non_finite_points() {
        let p = WalkProfile::quadratic_bowl();
        assert!(matches!(p.eval([f64::NAN, 0.5]), Err(Error::Numerical(_))));
    }

    #[test]
    fn sampled_profile_interpolates_and_validates() {
        let dom = DomainSpec::unit_square(8).unwrap();
        let dx = FieldGrid::constant(dom.clone(), 0.01);
        let dt = FieldGrid::constant(dom.clone(), 0.02);
        let p = WalkProfile::sampled(dx, dt).unwrap();
        let (a, b) = p.eval([0.3, 0.9]).unwrap();
        assert!(close(a, 0.01, 1e-14) && close(b, 0.02, 1e-14));

        let bad = FieldGrid::from_fn(dom.clone(), |p| if p[0] > 0.5 { -0.01 } else { 0.01 });
        assert!(matches!(
            WalkProfile::sampled(bad, FieldGrid::constant(dom, 0.02)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn drag_law_diffusivity_reference_value() {
        // water-like viscosity at 298 K, micron bead
        let params = PhysicalParams::new(1e-20, 1e-6, 8.9e-4, 298.0);
        let kappa = einstein_diffusivity(298.0, &params).unwrap();
        assert!(close(kappa, 2.4525e-13, 1e-3), "kappa={kappa:e}");
    }

    #[test]
    fn sqrt_speed_derivative_matches_finite_difference() {
        let analytic = SpeedModel::sqrt();
        let custom = SpeedModel::Custom { f: Box::new(|t| crate::num::sqrt(t)) };
        for &t in &[0.1, 1.0, 37.0, 1000.0] {
            let a = analytic.dspeed_dt(t).unwrap();
            let fd = custom.dspeed_dt(t).unwrap();
            assert!(close(a, fd, 1e-6), "t={t}: {a} vs {fd}");
        }
    }

    #[test]
    fn sqrt_temperature_link_collapses_to_half_t() {
        // For S = sqrt(T): S_T = 1/(2T) and, with the drag-law D,
        // D_T = k_B / (12 pi eta R) independent of T.
        let model = SpeedModel::sqrt();
        let t = 310.0;
        assert!(close(soret_coefficient(&model, t).unwrap(), 0.5 / t, 1e-12));

        let params = PhysicalParams::new(1e-20, 1e-6, 8.9e-4, 298.0);
        let d = einstein_diffusivity(t, &params).unwrap();
        let d_t = thermal_diffusivity(d, &model, t).unwrap();
        let eta = params.viscosity(t).unwrap();
        let closed = params.k_b / (12.0 * core::f64::consts::PI * params.radius * eta);
        assert!(close(d_t, closed, 1e-12), "{d_t:e} vs {closed:e}");
    }

    #[test]
    fn viscosity_exponent_bounds_enforced() {
        let mut params = PhysicalParams::new(1e-20, 1e-6, 8.9e-4, 298.0);
        params.s = 1.2;
        assert!(matches!(params.viscosity(300.0), Err(Error::Config(_))));
        params.s = 0.75;
        assert!(matches!(params.viscosity(-5.0), Err(Error::Domain(_))));
    }

    #[test]
    fn steady_state_is_inverse_speed() {
        let dom = DomainSpec::unit_square(50).unwrap();
        let speed = FieldGrid::from_fn(dom.clone(), |p| {
            let ux = p[0] - 0.5;
            let uy = p[1] - 0.5;
            1.0 / (0.2 + ux * ux + uy * uy)
        });
        let steady = theoretical_steady_state(&speed).unwrap();
        assert!((steady.mean() - 1.0).abs() < 1e-13);
        // independent route: normalize 0.2 + r^2 by its discrete mean
        let raw = FieldGrid::from_fn(dom, |p| {
            let ux = p[0] - 0.5;
            let uy = p[1] - 0.5;
            0.2 + ux * ux + uy * uy
        });
        let m = raw.mean();
        for (a, b) in steady.values().iter().zip(raw.values()) {
            assert!(close(*a, b / m, 1e-12));
        }
        // continuum mean of 0.2 + r^2 over the unit square is 0.2 + 1/6;
        // the 50x50 discrete mean sits within 0.1% of it
        let center = steady.get(25, 25);
        assert!((center - 0.2 / (0.2 + 1.0 / 6.0)).abs() < 2e-3, "center={center}");
    }

    #[test]
    fn steady_state_of_sqrt_ramp() {
        let dom = DomainSpec::unit_line(100).unwrap();
        let speed = FieldGrid::from_fn(dom.clone(), |p| crate::num::sqrt(1.0 + p[0]));
        let steady = theoretical_steady_state(&speed).unwrap();
        let raw = FieldGrid::from_fn(dom, |p| crate::num::pow(1.0 + p[0], -0.5));
        let m = raw.mean();
        for (a, b) in steady.values().iter().zip(raw.values()) {
            assert!(close(*a, b / m, 1e-12));
        }
    }

    #[test]
    fn coefficient_set_keeps_soret_identity() {
        let dom = DomainSpec::unit_line(32).unwrap();
        let temp = FieldGrid::from_fn(dom.clone(), |p| 1.0 + p[0]);
        let d = FieldGrid::constant(dom, 0.005);
        let set = coefficients_from_temperature(&temp, &d, &SpeedModel::sqrt()).unwrap();
        for i in 0..32 {
            let ratio = set.thermal_diffusivity.values()[i] / set.diffusivity.values()[i];
            assert!(close(ratio, set.soret.values()[i], 1e-12));
        }
    }

    #[test]
    fn nondimensional_speed_field() {
        let dom = DomainSpec::unit_line(8).unwrap();
        let temp = FieldGrid::from_fn(dom, |p| 1.0 + p[0]);
        let params = PhysicalParams::new(1e-20, 1e-6, 8.9e-4, 298.0);
        let s = speed_from_temperature(&temp, &params, true).unwrap();
        for (sv, tv) in s.values().iter().zip(temp.values()) {
            assert!(close(*sv, crate::num::sqrt(*tv), 1e-14));
        }
        let sp = speed_from_temperature(&temp, &params, false).unwrap();
        let c = params.thermal_speed_scale();
        for (sv, tv) in sp.values().iter().zip(temp.values()) {
            assert!(close(*sv, c * crate::num::sqrt(*tv), 1e-14));
        }
    }
}
