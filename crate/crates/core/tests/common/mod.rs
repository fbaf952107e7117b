#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ymlattice_core::{Cochain, CopyFlag, Domain, Matrix2, Topology};

pub fn sphere2() -> Domain {
    Domain::sphere([2, 2, 2, 2]).unwrap()
}

pub fn block3() -> Domain {
    Domain::block([3, 3, 3, 3]).unwrap()
}

pub fn both() -> [Domain; 2] {
    [sphere2(), block3()]
}

pub fn random_matrix(rng: &mut impl Rng) -> Matrix2 {
    Matrix2 {
        m: std::array::from_fn(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))),
    }
}

/// General gl(2, ℂ)-valued form, every stored cell (halo included) random.
pub fn random_form(domain: Domain, degree: usize, seed: u64) -> Cochain {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Cochain::from_fn_with_halo(domain, degree, CopyFlag::Base, |_, _, _| random_matrix(&mut rng)).unwrap()
}

/// Norm of `f` restricted to cells whose nested stencils stay in storage.
pub fn safe_norm(f: &Cochain) -> f64 {
    match f.domain().topology() {
        Topology::Sphere => f.interior_norm_sq().sqrt(),
        Topology::Block => f.norm_sq_with_margin(1).sqrt(),
    }
}

pub fn rel(defect: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        defect
    } else {
        defect / scale
    }
}
