//! Threaded ensemble driver. Each worker advances a disjoint particle
//! range; per-particle counter-based streams make the result identical
//! to the sequential run regardless of worker count or scheduling.

use thermowalk_core::fields::WalkProfile;
use thermowalk_core::mc::{simulate, simulate_slice, ParticleEnsemble, SimReport, StepOptions};
use thermowalk_core::Result;

/// Advance the whole ensemble to `t_final` on `workers` threads.
pub fn simulate_threaded(
    ens: &mut ParticleEnsemble,
    profile: &WalkProfile,
    t_final: f64,
    opts: &StepOptions,
    workers: usize,
) -> Result<SimReport> {
    let workers = workers.max(1).min(ens.count());
    if workers == 1 {
        return simulate(ens, profile, t_final, opts);
    }
    let slices = ens.split_mut(workers);
    let results: Vec<Result<SimReport>> = std::thread::scope(|scope| {
        let handles: Vec<_> = slices
            .into_iter()
            .map(|slice| scope.spawn(move || simulate_slice(slice, profile, t_final, opts)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("walk worker panicked")).collect()
    });
    let mut total = 0u64;
    for r in results {
        total += r?.total_steps;
    }
    Ok(SimReport { total_steps: total })
}
