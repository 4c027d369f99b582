//! Measures the raw step rate of the bowl walk; used to size long runs.

use std::time::Instant;

use thermowalk_core::fields::WalkProfile;
use thermowalk_core::mc::{init_ensemble, simulate, StepOptions};
use thermowalk_core::DomainSpec;

fn main() {
    let profile = WalkProfile::quadratic_bowl();
    let dom = DomainSpec::unit_square(1).unwrap();
    let mut ens = init_ensemble(&dom, 100_000, 42).unwrap();
    // warm the caches
    simulate(&mut ens, &profile, 0.5, &StepOptions::default()).unwrap();
    let start = Instant::now();
    let report = simulate(&mut ens, &profile, 5.0, &StepOptions::default()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let ns = secs * 1e9 / report.total_steps as f64;
    println!(
        "{} steps in {:.3} s  ({:.2} ns/step, {:.3e} steps/s)",
        report.total_steps,
        secs,
        ns,
        report.total_steps as f64 / secs
    );
}
