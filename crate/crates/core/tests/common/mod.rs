#![allow(dead_code)]

use hamlink_core::spin_algebra::{op_combine_real, pauli_pair, pauli_site};
use hamlink_core::{Axis, HilbertSpace, Operator, StateVector, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn space(n: usize) -> HilbertSpace {
    HilbertSpace::new(n).unwrap()
}

/// Random Hermitian operator: single-site fields plus two-site couplings,
/// coefficients uniform in [-1, 1].
pub fn random_hamiltonian(rng: &mut ChaCha8Rng, space: HilbertSpace, terms: usize) -> Operator {
    let n = space.n_sites();
    let mut ops = Vec::with_capacity(terms);
    for _ in 0..terms {
        let a = Axis::ALL[rng.random_range(0..3)];
        let i = rng.random_range(1..=n);
        let op = if n > 1 && rng.random_bool(0.6) {
            let b = Axis::ALL[rng.random_range(0..3)];
            let mut j = rng.random_range(1..=n);
            while j == i {
                j = rng.random_range(1..=n);
            }
            pauli_pair(a, i, b, j, space).unwrap()
        } else {
            pauli_site(a, i, space).unwrap()
        };
        ops.push((rng.random_range(-1.0..1.0), op));
    }
    let refs: Vec<(f64, &Operator)> = ops.iter().map(|(c, o)| (*c, o)).collect();
    op_combine_real(&refs).unwrap()
}

pub fn random_state(rng: &mut ChaCha8Rng, space: HilbertSpace) -> StateVector {
    let amps = (0..space.dim())
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    StateVector::new(space, amps).unwrap()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}
