//! Gridless walker ensembles and the 1D lattice walker.
//!
//! Randomness is counter-based: particle `i` of a run seeded with `seed`
//! draws its `k`-th word as `mix(stream_key(seed, i), k)`, a pure function
//! of `(seed, i, k)`. A particle's trajectory therefore depends on nothing
//! but its own index, so any partitioning of the ensemble across threads
//! reproduces the serial run bit for bit. Draw counters advance by one per
//! consumed word (position init, then step directions, with rejection
//! retries counted), not per step; this keeps the stream well-defined even
//! though direction sampling consumes a variable number of words.
//!
//! Time stepping: a walker steps while `clock < t_final` and completes the
//! step that crosses the horizon, so its final clock overshoots by at most
//! one local `dt`. Step lengths and costs are read at the departure point
//! by default; [`EvalMode::Midpoint`] re-reads them at the half-step point,
//! which changes the stationary density from `1/D` to `1/S` (see
//! [`EvalMode`] for the distinction; it is measurable and load-bearing).

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fields::{
    BowlEval, ConstEval, PointEval, ProfileKind, SampledEval, SqrtTempEval, WalkProfile,
};
use crate::grid::{DomainSpec, FieldGrid};

/// splitmix64 finalizer; full avalanche in two multiply-xorshift rounds.
#[inline(always)]
fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xbf58476d1ce4e5b9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94d049bb133111eb);
    z ^= z >> 31;
    z
}

/// Per-particle stream key. Mixed once up front so each draw costs a
/// single finalizer pass.
#[inline]
pub fn stream_key(master_seed: u64, particle: u64) -> u64 {
    mix64(master_seed ^ particle.wrapping_mul(0x9e3779b97f4a7c15))
}

/// The `counter`-th word of a particle's stream.
#[inline(always)]
pub fn stream_draw(key: u64, counter: u64) -> u64 {
    mix64(key ^ counter.wrapping_mul(0xd1b54a32d192ed03))
}

/// Map a word to `[0, 1)` with 53-bit resolution.
#[inline(always)]
pub fn uniform53(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform unit vector by rejection from the disk. One word feeds two
/// 32-bit lanes per attempt; the lower bound on the squared norm keeps the
/// normalization well away from 0/0.
#[inline(always)]
fn sample_dir_2d(key: u64, counter: &mut u64) -> (f64, f64) {
    loop {
        let w = stream_draw(key, *counter);
        *counter += 1;
        let a = (w as u32) as f64 * (2.0 / 4294967296.0) - 1.0;
        let b = ((w >> 32) as u32) as f64 * (2.0 / 4294967296.0) - 1.0;
        let m = a * a + b * b;
        if m <= 1.0 && m > 1e-12 {
            let inv = 1.0 / crate::num::sqrt(m);
            return (a * inv, b * inv);
        }
    }
}

/// Uniform sign from one word.
#[inline(always)]
fn sample_sign(key: u64, counter: &mut u64) -> f64 {
    let w = stream_draw(key, *counter);
    *counter += 1;
    if w >> 63 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// How the profile is read during a step. The choice changes the
/// continuum limit, not just the error term: stationary occupancy is the
/// embedded chain's measure weighted by residence time, and the chain's
/// measure goes as `1/dx^2` for departure reads but `1/dx` for midpoint
/// reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    /// Read `(dx, dt)` where the step starts. Continuum limit
    /// `F = -d(Du)/dx`; stationary occupancy `dt/dx^2`, i.e. `1/D`.
    Departure,
    /// Re-read `(dx, dt)` at the half-step point reached with half the
    /// departure length. Continuum limit `F = -(D/S) d(Su)/dx`;
    /// stationary occupancy `dt/dx`, i.e. `1/S`.
    Midpoint,
}

/// Knobs for [`simulate`].
#[derive(Debug, Clone, Copy)]
pub struct StepOptions {
    pub eval: EvalMode,
    /// Per-particle step cap; exceeding it means the profile's `dt` is far
    /// too small for the horizon, and the run aborts instead of spinning.
    pub step_cap: u64,
}

impl Default for StepOptions {
    fn default() -> Self {
        StepOptions { eval: EvalMode::Departure, step_cap: 1_000_000_000 }
    }
}

/// A walker population: positions, clocks, and the per-particle stream
/// state that makes every trajectory a pure function of (seed, index).
#[derive(Debug, Clone)]
pub struct ParticleEnsemble {
    domain: DomainSpec,
    master_seed: u64,
    positions: Vec<[f64; 2]>,
    clocks: Vec<f64>,
    keys: Vec<u64>,
    counters: Vec<u64>,
    /// Unwrapped net displacement per particle; allocated only when
    /// variance diagnostics ask for it.
    displacements: Option<Vec<[f64; 2]>>,
}

/// Particles spread uniformly over the box, clocks at zero.
pub fn init_ensemble(domain: &DomainSpec, count: usize, master_seed: u64) -> Result<ParticleEnsemble> {
    if count == 0 {
        return Err(Error::Config(String::from("ensemble needs at least one particle")));
    }
    let dim = domain.dim();
    let ext = domain.extent();
    let mut positions = Vec::with_capacity(count);
    let mut keys = Vec::with_capacity(count);
    for i in 0..count {
        let key = stream_key(master_seed, i as u64);
        let x = domain.wrap(uniform53(stream_draw(key, 0)) * ext[0], 0);
        let y = if dim == 2 { domain.wrap(uniform53(stream_draw(key, 1)) * ext[1], 1) } else { 0.0 };
        positions.push([x, y]);
        keys.push(key);
    }
    Ok(ParticleEnsemble {
        domain: domain.clone(),
        master_seed,
        positions,
        clocks: vec![0.0; count],
        keys,
        counters: vec![dim as u64; count],
        displacements: None,
    })
}

impl ParticleEnsemble {
    pub fn count(&self) -> usize {
        self.positions.len()
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn positions(&self) -> &[[f64; 2]] {
        &self.positions
    }

    pub fn clocks(&self) -> &[f64] {
        &self.clocks
    }

    pub fn displacements(&self) -> Option<&[[f64; 2]]> {
        self.displacements.as_deref()
    }

    /// Start accumulating unwrapped displacements. Call before
    /// simulating; [`variance`] refuses ensembles without tracking.
    pub fn enable_displacement_tracking(&mut self) {
        if self.displacements.is_none() {
            self.displacements = Some(vec![[0.0, 0.0]; self.positions.len()]);
        }
    }

    /// Copy of the first `count` particles. Because trajectories are pure
    /// functions of (seed, index), this equals an ensemble initialized
    /// with `count` particles and evolved identically.
    pub fn truncated(&self, count: usize) -> Result<ParticleEnsemble> {
        if count == 0 || count > self.count() {
            return Err(Error::Config(String::from("truncation count out of range")));
        }
        Ok(ParticleEnsemble {
            domain: self.domain.clone(),
            master_seed: self.master_seed,
            positions: self.positions[..count].to_vec(),
            clocks: self.clocks[..count].to_vec(),
            keys: self.keys[..count].to_vec(),
            counters: self.counters[..count].to_vec(),
            displacements: self.displacements.as_ref().map(|d| d[..count].to_vec()),
        })
    }

    /// Split into at most `parts` contiguous mutable views for parallel
    /// stepping. Partitioning does not affect results.
    pub fn split_mut(&mut self, parts: usize) -> Vec<EnsembleSlice<'_>> {
        let n = self.positions.len();
        let parts = parts.clamp(1, n);
        let chunk = n.div_ceil(parts);
        let mut out = Vec::new();
        let mut pos: &mut [[f64; 2]] = &mut self.positions;
        let mut clk: &mut [f64] = &mut self.clocks;
        let mut key: &[u64] = &self.keys;
        let mut ctr: &mut [u64] = &mut self.counters;
        let mut disp: Option<&mut [[f64; 2]]> = self.displacements.as_deref_mut();
        while !pos.is_empty() {
            let take = chunk.min(pos.len());
            let (p, prest) = pos.split_at_mut(take);
            let (c, crest) = clk.split_at_mut(take);
            let (k, krest) = key.split_at(take);
            let (t, trest) = ctr.split_at_mut(take);
            let (d, drest) = match disp {
                Some(d) => {
                    let (a, b) = d.split_at_mut(take);
                    (Some(a), Some(b))
                }
                None => (None, None),
            };
            out.push(EnsembleSlice {
                domain: &self.domain,
                positions: p,
                clocks: c,
                keys: k,
                counters: t,
                displacements: d,
            });
            pos = prest;
            clk = crest;
            key = krest;
            ctr = trest;
            disp = drest;
        }
        out
    }

    fn as_slice_mut(&mut self) -> EnsembleSlice<'_> {
        EnsembleSlice {
            domain: &self.domain,
            positions: &mut self.positions,
            clocks: &mut self.clocks,
            keys: &self.keys,
            counters: &mut self.counters,
            displacements: self.displacements.as_deref_mut(),
        }
    }
}

/// Mutable view over a contiguous particle range of one ensemble.
pub struct EnsembleSlice<'a> {
    domain: &'a DomainSpec,
    positions: &'a mut [[f64; 2]],
    clocks: &'a mut [f64],
    keys: &'a [u64],
    counters: &'a mut [u64],
    displacements: Option<&'a mut [[f64; 2]]>,
}

/// Aggregate outcome of a simulation call.
#[derive(Debug, Clone, Copy, Default)]
pub struct SimReport {
    pub total_steps: u64,
}

/// Advance every particle to the horizon `t_final`.
pub fn simulate(
    ens: &mut ParticleEnsemble,
    profile: &WalkProfile,
    t_final: f64,
    opts: &StepOptions,
) -> Result<SimReport> {
    let slice = ens.as_slice_mut();
    simulate_slice(slice, profile, t_final, opts)
}

/// Advance one particle range; the building block threaded drivers use.
/// On error the slice is left partially advanced.
pub fn simulate_slice(
    slice: EnsembleSlice<'_>,
    profile: &WalkProfile,
    t_final: f64,
    opts: &StepOptions,
) -> Result<SimReport> {
    if !t_final.is_finite() || t_final < 0.0 {
        return Err(Error::Config(String::from("horizon must be finite and nonnegative")));
    }
    if profile.domain().dim() != slice.domain.dim()
        || profile.domain().extent() != slice.domain.extent()
    {
        return Err(Error::Config(String::from("profile and ensemble domains differ")));
    }
    let dom = slice.domain;
    let total = match profile.kind() {
        ProfileKind::QuadraticBowl => {
            walk_dispatch(&BowlEval, dom, t_final, opts, slice, 2)?
        }
        ProfileKind::Constant { dx, dt } => {
            let ev = ConstEval { dx: *dx, dt: *dt };
            walk_dispatch(&ev, dom, t_final, opts, slice, dom.dim())?
        }
        ProfileKind::SqrtTemperature { t0, grad, diffusivity } => {
            let ev = SqrtTempEval { t0: *t0, grad: *grad, d2: 2.0 * diffusivity };
            walk_dispatch(&ev, dom, t_final, opts, slice, 1)?
        }
        ProfileKind::Sampled { dx, dt } => {
            let ev = SampledEval { dx, dt };
            walk_dispatch(&ev, dom, t_final, opts, slice, dom.dim())?
        }
    };
    Ok(SimReport { total_steps: total })
}

fn walk_dispatch<P: PointEval>(
    ev: &P,
    dom: &DomainSpec,
    t_final: f64,
    opts: &StepOptions,
    slice: EnsembleSlice<'_>,
    dim: usize,
) -> Result<u64> {
    let track = slice.displacements.is_some();
    let midpoint = opts.eval == EvalMode::Midpoint;
    match (dim, midpoint, track) {
        (1, false, false) => walk_1d::<P, false, false>(ev, dom, t_final, opts.step_cap, slice),
        (1, false, true) => walk_1d::<P, false, true>(ev, dom, t_final, opts.step_cap, slice),
        (1, true, false) => walk_1d::<P, true, false>(ev, dom, t_final, opts.step_cap, slice),
        (1, true, true) => walk_1d::<P, true, true>(ev, dom, t_final, opts.step_cap, slice),
        (2, false, false) => walk_2d::<P, false, false>(ev, dom, t_final, opts.step_cap, slice),
        (2, false, true) => walk_2d::<P, false, true>(ev, dom, t_final, opts.step_cap, slice),
        (2, true, false) => walk_2d::<P, true, false>(ev, dom, t_final, opts.step_cap, slice),
        (2, true, true) => walk_2d::<P, true, true>(ev, dom, t_final, opts.step_cap, slice),
        _ => Err(Error::Config(String::from("walks are 1D or 2D"))),
    }
}

fn walk_2d<P: PointEval, const MIDPOINT: bool, const TRACK: bool>(
    ev: &P,
    dom: &DomainSpec,
    t_final: f64,
    cap: u64,
    mut slice: EnsembleSlice<'_>,
) -> Result<u64> {
    let ext0 = dom.extent()[0];
    let ext1 = dom.extent()[1];
    let mut total: u64 = 0;
    for i in 0..slice.positions.len() {
        let [mut x, mut y] = slice.positions[i];
        let mut clock = slice.clocks[i];
        let key = slice.keys[i];
        let mut counter = slice.counters[i];
        let (mut ux, mut uy) = if TRACK {
            let d = slice.displacements.as_ref().unwrap()[i];
            (d[0], d[1])
        } else {
            (0.0, 0.0)
        };
        let mut steps: u64 = 0;
        while clock < t_final {
            steps += 1;
            if steps > cap {
                return Err(Error::RunawayProfile { cap });
            }
            let (cx, cy) = sample_dir_2d(key, &mut counter);
            let (mut dx, mut dt) = ev.dx_dt(x, y);
            if MIDPOINT {
                let half = 0.5 * dx;
                let mx = wrap(x + half * cx, ext0);
                let my = wrap(y + half * cy, ext1);
                let (dx2, dt2) = ev.dx_dt(mx, my);
                dx = dx2;
                dt = dt2;
            }
            let sx = dx * cx;
            let sy = dx * cy;
            x = wrap(x + sx, ext0);
            y = wrap(y + sy, ext1);
            clock += dt;
            if TRACK {
                ux += sx;
                uy += sy;
            }
        }
        slice.positions[i] = [x, y];
        slice.clocks[i] = clock;
        slice.counters[i] = counter;
        if TRACK {
            slice.displacements.as_mut().unwrap()[i] = [ux, uy];
        }
        total += steps;
    }
    Ok(total)
}

fn walk_1d<P: PointEval, const MIDPOINT: bool, const TRACK: bool>(
    ev: &P,
    dom: &DomainSpec,
    t_final: f64,
    cap: u64,
    mut slice: EnsembleSlice<'_>,
) -> Result<u64> {
    let ext0 = dom.extent()[0];
    let mut total: u64 = 0;
    for i in 0..slice.positions.len() {
        let mut x = slice.positions[i][0];
        let mut clock = slice.clocks[i];
        let key = slice.keys[i];
        let mut counter = slice.counters[i];
        let mut ux = if TRACK { slice.displacements.as_ref().unwrap()[i][0] } else { 0.0 };
        let mut steps: u64 = 0;
        while clock < t_final {
            steps += 1;
            if steps > cap {
                return Err(Error::RunawayProfile { cap });
            }
            let sign = sample_sign(key, &mut counter);
            let (mut dx, mut dt) = ev.dx_dt(x, 0.0);
            if MIDPOINT {
                let mx = wrap(x + 0.5 * dx * sign, ext0);
                let (dx2, dt2) = ev.dx_dt(mx, 0.0);
                dx = dx2;
                dt = dt2;
            }
            let sx = dx * sign;
            x = wrap(x + sx, ext0);
            clock += dt;
            if TRACK {
                ux += sx;
            }
        }
        slice.positions[i] = [x, 0.0];
        slice.clocks[i] = clock;
        slice.counters[i] = counter;
        if TRACK {
            slice.displacements.as_mut().unwrap()[i] = [ux, 0.0];
        }
        total += steps;
    }
    Ok(total)
}

/// Wrap into `[0, ext)`; valid for inputs within one period, which the
/// step-length cap guarantees. The second branch also catches the
/// rounding case where `x + ext` lands exactly on `ext`.
#[inline(always)]
fn wrap(x: f64, ext: f64) -> f64 {
    let mut y = x;
    if y < 0.0 {
        y += ext;
    }
    if y >= ext {
        y -= ext;
    }
    y
}

/// One particle outside an ensemble, for stepping by hand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleState {
    pub position: [f64; 2],
    pub clock: f64,
}

/// A direction handed to [`step_particle`]: a sign for 1D walks, a unit
/// vector for 2D walks.
#[derive(Debug, Clone, Copy)]
pub enum StepDraw {
    Sign(f64),
    Dir([f64; 2]),
}

/// Advance one particle by one step. Same kernel as [`simulate`], with
/// the direction supplied by the caller instead of the stream.
pub fn step_particle(
    p: &mut ParticleState,
    profile: &WalkProfile,
    draw: StepDraw,
    mode: EvalMode,
) -> Result<()> {
    if !p.position[0].is_finite() || !p.position[1].is_finite() || !p.clock.is_finite() {
        return Err(Error::Numerical(String::from("particle state is non-finite")));
    }
    let dom = profile.domain();
    let dim = dom.dim();
    let (cx, cy) = match (dim, draw) {
        (1, StepDraw::Sign(s)) => {
            if s != 1.0 && s != -1.0 {
                return Err(Error::Config(String::from("1D draw must be +1 or -1")));
            }
            (s, 0.0)
        }
        (2, StepDraw::Dir(d)) => {
            let norm = d[0] * d[0] + d[1] * d[1];
            if (norm - 1.0).abs() > 1e-9 {
                return Err(Error::Config(String::from("2D draw must be a unit vector")));
            }
            (d[0], d[1])
        }
        _ => {
            return Err(Error::Config(String::from(
                "draw kind does not match the profile dimension",
            )));
        }
    };
    let x = dom.wrap(p.position[0], 0);
    let y = if dim == 2 { dom.wrap(p.position[1], 1) } else { 0.0 };
    let (mut dx, mut dt) = profile.eval([x, y])?;
    if mode == EvalMode::Midpoint {
        let mx = dom.wrap(x + 0.5 * dx * cx, 0);
        let my = if dim == 2 { dom.wrap(y + 0.5 * dx * cy, 1) } else { 0.0 };
        let (dx2, dt2) = profile.eval([mx, my])?;
        dx = dx2;
        dt = dt2;
    }
    p.position[0] = dom.wrap(x + dx * cx, 0);
    p.position[1] = if dim == 2 { dom.wrap(y + dx * cy, 1) } else { 0.0 };
    p.clock += dt;
    Ok(())
}

/// Bin particle positions into a density normalized to unit mean.
pub fn histogram(ens: &ParticleEnsemble, bins: [usize; 2]) -> Result<FieldGrid> {
    if ens.count() == 0 {
        return Err(Error::Config(String::from("cannot histogram an empty ensemble")));
    }
    let dim = ens.domain.dim();
    let ext = ens.domain.extent();
    let grid_domain = if dim == 1 {
        DomainSpec::line(ext[0], bins[0])?
    } else {
        DomainSpec::rect(ext[0], ext[1], bins[0], bins[1])?
    };
    let [nx, _] = grid_domain.cells();
    let mut counts = vec![0u64; grid_domain.cell_count()];
    for p in &ens.positions {
        let ix = grid_domain.cell_of(p[0], 0);
        let iy = if dim == 2 { grid_domain.cell_of(p[1], 1) } else { 0 };
        counts[iy * nx + ix] += 1;
    }
    let values: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    FieldGrid::from_values(grid_domain, values)?.normalized_mean_one()
}

/// Empirical diffusivity `<|x(t) - x(0)|^2> / (2 n t)` from unwrapped
/// displacements accumulated between two ensemble states.
pub fn variance(before: &ParticleEnsemble, after: &ParticleEnsemble, t: f64) -> Result<f64> {
    if before.count() != after.count() {
        return Err(Error::Config(String::from("ensembles have different particle counts")));
    }
    if before.master_seed != after.master_seed || !before.domain.same_shape(&after.domain) {
        return Err(Error::Config(String::from("ensembles are not states of the same run")));
    }
    let (da, db) = match (after.displacements(), before.displacements()) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::Config(String::from(
                "displacement tracking was not enabled on both states",
            )));
        }
    };
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Config(String::from("elapsed time must be finite and nonnegative")));
    }
    if t == 0.0 {
        return Err(Error::Config(String::from("zero elapsed time in variance")));
    }
    let mut sum = 0.0;
    for (a, b) in da.iter().zip(db) {
        let dx = a[0] - b[0];
        let dy = a[1] - b[1];
        sum += dx * dx + dy * dy;
    }
    let n = before.domain.dim() as f64;
    Ok(sum / before.count() as f64 / (2.0 * n * t))
}

/// The 1D lattice walk: particles hop between fixed sites, paying the
/// departure site's `dt` per hop. With uniform spacing the jump chain is
/// symmetric, so fixed-time occupancy weights each site by its residence
/// time, `dt_i`, i.e. by `1/S_i`.
#[derive(Debug, Clone)]
pub struct LatticeState {
    sites: Vec<f64>,
    site_dt: Vec<f64>,
    particle_site: Vec<u32>,
    clocks: Vec<f64>,
    keys: Vec<u64>,
    counters: Vec<u64>,
    master_seed: u64,
}

fn validate_lattice(sites: &[f64], site_dt: &[f64], particles: usize) -> Result<()> {
    if sites.len() < 2 {
        return Err(Error::Config(String::from("lattice needs at least two sites")));
    }
    if sites.len() != site_dt.len() {
        return Err(Error::Config(String::from("site and dt arrays differ in length")));
    }
    if sites.len() > u32::MAX as usize {
        return Err(Error::Config(String::from("too many lattice sites")));
    }
    if particles == 0 {
        return Err(Error::Config(String::from("lattice needs at least one particle")));
    }
    if sites.windows(2).any(|w| !(w[1] > w[0])) || sites.iter().any(|s| !s.is_finite()) {
        return Err(Error::Config(String::from("sites must be finite and strictly increasing")));
    }
    if site_dt.iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
        return Err(Error::Domain(String::from("site dt values must be finite and positive")));
    }
    Ok(())
}

/// Lattice walkers placed uniformly at random over the sites.
pub fn init_lattice(
    sites: &[f64],
    site_dt: &[f64],
    particles: usize,
    master_seed: u64,
) -> Result<LatticeState> {
    let mut st = init_lattice_at_site(sites, site_dt, particles, master_seed, 0)?;
    let n = sites.len();
    for i in 0..particles {
        let w = stream_draw(st.keys[i], 0);
        let mut site = (uniform53(w) * n as f64) as usize;
        if site >= n {
            site = n - 1;
        }
        st.particle_site[i] = site as u32;
        st.counters[i] = 1;
    }
    Ok(st)
}

/// Lattice walkers all starting on one site.
pub fn init_lattice_at_site(
    sites: &[f64],
    site_dt: &[f64],
    particles: usize,
    master_seed: u64,
    site: usize,
) -> Result<LatticeState> {
    validate_lattice(sites, site_dt, particles)?;
    if site >= sites.len() {
        return Err(Error::Config(String::from("start site out of range")));
    }
    let keys: Vec<u64> = (0..particles).map(|i| stream_key(master_seed, i as u64)).collect();
    Ok(LatticeState {
        sites: sites.to_vec(),
        site_dt: site_dt.to_vec(),
        particle_site: vec![site as u32; particles],
        clocks: vec![0.0; particles],
        keys,
        counters: vec![0; particles],
        master_seed,
    })
}

impl LatticeState {
    pub fn site_count(&self) -> usize {
        self.sites.len()
    }

    pub fn particle_count(&self) -> usize {
        self.particle_site.len()
    }

    pub fn sites(&self) -> &[f64] {
        &self.sites
    }

    pub fn site_dt(&self) -> &[f64] {
        &self.site_dt
    }

    pub fn clocks(&self) -> &[f64] {
        &self.clocks
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    /// Particles per site.
    pub fn occupancy(&self) -> Vec<u64> {
        let mut occ = vec![0u64; self.sites.len()];
        for &s in &self.particle_site {
            occ[s as usize] += 1;
        }
        occ
    }

    /// Occupancy as a mean-one density on a uniform grid. Requires
    /// uniformly spaced sites; each site stands for one cell.
    pub fn occupancy_density(&self) -> Result<FieldGrid> {
        let n = self.sites.len();
        let h = self.sites[1] - self.sites[0];
        for w in self.sites.windows(2) {
            if ((w[1] - w[0]) - h).abs() > 1e-9 * h {
                return Err(Error::Unsupported(String::from(
                    "occupancy density needs uniformly spaced sites",
                )));
            }
        }
        let domain = DomainSpec::line(h * n as f64, n)?;
        let values: Vec<f64> = self.occupancy().iter().map(|&c| c as f64).collect();
        FieldGrid::from_values(domain, values)?.normalized_mean_one()
    }
}

/// Advance every particle by exactly one hop: pay the departure site's
/// `dt`, then move to a uniformly chosen neighbor (periodic).
pub fn lattice_step(st: &mut LatticeState) -> Result<()> {
    let n = st.sites.len() as u32;
    for i in 0..st.particle_site.len() {
        let s = st.particle_site[i];
        st.clocks[i] += st.site_dt[s as usize];
        let mut counter = st.counters[i];
        let sign = sample_sign(st.keys[i], &mut counter);
        st.counters[i] = counter;
        st.particle_site[i] = if sign > 0.0 {
            if s + 1 == n {
                0
            } else {
                s + 1
            }
        } else if s == 0 {
            n - 1
        } else {
            s - 1
        };
    }
    Ok(())
}

/// Advance each particle until it is mid-traversal at time `t`: a hop
/// that would finish past `t` is not taken, so every particle sits on the
/// site whose `dt` it is currently paying. Returns total hops.
pub fn lattice_run_to_time(st: &mut LatticeState, t: f64, cap: u64) -> Result<u64> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Config(String::from("horizon must be finite and nonnegative")));
    }
    let n = st.sites.len() as u32;
    let mut total = 0u64;
    for i in 0..st.particle_site.len() {
        let mut s = st.particle_site[i];
        let mut clock = st.clocks[i];
        let key = st.keys[i];
        let mut counter = st.counters[i];
        let mut hops = 0u64;
        loop {
            let dt = st.site_dt[s as usize];
            if clock + dt > t {
                break;
            }
            hops += 1;
            if hops > cap {
                return Err(Error::RunawayProfile { cap });
            }
            clock += dt;
            let sign = sample_sign(key, &mut counter);
            s = if sign > 0.0 {
                if s + 1 == n {
                    0
                } else {
                    s + 1
                }
            } else if s == 0 {
                n - 1
            } else {
                s - 1
            };
        }
        st.particle_site[i] = s;
        st.clocks[i] = clock;
        st.counters[i] = counter;
        total += hops;
    }
    Ok(total)
}
