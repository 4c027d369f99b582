//! Prints the refinement behavior of the gap between the random-walk
//! face flux and the thermophoretic face flux with matched coefficients.

use thermowalk_core::fields::{coefficients_from_temperature, SpeedModel};
use thermowalk_core::fvm::{face_flux, Face, FluxLaw};
use thermowalk_core::{DomainSpec, FieldGrid};

const TAU: f64 = std::f64::consts::TAU;

fn max_gap(n: usize) -> f64 {
    let dom = DomainSpec::unit_line(n).unwrap();
    let temp = FieldGrid::from_fn(dom.clone(), |p| 1.0 + 0.2 * (TAU * p[0]).sin());
    let d = FieldGrid::constant(dom.clone(), 0.005);
    let model = SpeedModel::sqrt();
    let set = coefficients_from_temperature(&temp, &d, &model).unwrap();
    let u = FieldGrid::from_fn(dom, |p| 1.0 + 0.3 * (TAU * p[0] + 0.7).cos());
    let rw = FluxLaw::RandomWalk { d: set.diffusivity.clone(), s: set.speed.clone() };
    let th = FluxLaw::Thermophoretic {
        d: set.diffusivity.clone(),
        d_t: set.thermal_diffusivity.clone(),
        temp: temp.clone(),
    };
    let mut gap = 0.0f64;
    for ix in 0..n {
        let face = Face { axis: 0, ix, iy: 0 };
        let a = face_flux(&rw, &u, face).unwrap();
        let b = face_flux(&th, &u, face).unwrap();
        gap = gap.max((a - b).abs());
    }
    gap
}

fn main() {
    let mut prev = None;
    for n in [16usize, 32, 64, 128, 256, 512] {
        let g = max_gap(n);
        match prev {
            Some(p) => println!("n={n:4}  gap={g:.6e}  ratio={:.4}", p / g),
            None => println!("n={n:4}  gap={g:.6e}"),
        }
        prev = Some(g);
    }
}
