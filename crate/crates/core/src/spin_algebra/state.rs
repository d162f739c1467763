use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;

use super::{Axis, HilbertSpace};
use crate::error::{Error, Result};

/// Tolerance on `| ||psi|| - 1 |` for a state to count as normalized.
pub const NORM_TOL: f64 = 1e-12;

/// Normalized pure state over the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: HilbertSpace,
    amps: Vec<C64>,
}

impl StateVector {
    /// Normalizes `amps` and wraps them. Fails on a length mismatch or a
    /// zero vector.
    pub fn new(space: HilbertSpace, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != space.dim() {
            return Err(Error::Dimension {
                expected: space.dim(),
                found: amps.len(),
            });
        }
        let norm = l2_norm(&amps);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::numeric(format!("cannot normalize a vector of norm {norm}")));
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(StateVector { space, amps })
    }

    /// Wraps amplitudes that are already unit-norm, without rescaling.
    pub(crate) fn from_normalized(space: HilbertSpace, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), space.dim());
        StateVector { space, amps }
    }

    pub fn basis(space: HilbertSpace, index: usize) -> Result<Self> {
        if index >= space.dim() {
            return Err(Error::param(format!(
                "basis index {index} outside dimension {}",
                space.dim()
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); space.dim()];
        amps[index] = C64::new(1.0, 0.0);
        Ok(StateVector { space, amps })
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amps)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.space.check_same(&other.space)?;
        Ok(inner(&self.amps, &other.amps))
    }

    /// Two-norm distance `||self - other||`.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        self.space.check_same(&other.space)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }
}

pub(crate) fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn l2_norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Product state with every spin along `+x`, the maximal-weight
/// eigenstate of `S_x`.
pub fn coherent_x_state(space: HilbertSpace) -> StateVector {
    let amp = C64::new((space.dim() as f64).sqrt().recip(), 0.0);
    StateVector::from_normalized(space, vec![amp; space.dim()])
}

/// Single-spin amplitudes `(up, down)` of the `+`/`-` eigenstates along `axis`.
fn single_spin(axis: Axis, plus: bool) -> [C64; 2] {
    let s = FRAC_1_SQRT_2;
    match (axis, plus) {
        (Axis::Z, true) => [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        (Axis::Z, false) => [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        (Axis::X, true) => [C64::new(s, 0.0), C64::new(s, 0.0)],
        (Axis::X, false) => [C64::new(s, 0.0), C64::new(-s, 0.0)],
        (Axis::Y, true) => [C64::new(s, 0.0), C64::new(0.0, s)],
        (Axis::Y, false) => [C64::new(s, 0.0), C64::new(0.0, -s)],
    }
}

/// `|a a ... a>` with every spin in the `+` (or `-`) eigenstate of `axis`.
pub fn polarized_state(space: HilbertSpace, axis: Axis, plus: bool) -> StateVector {
    let single = single_spin(axis, plus);
    let n = space.n_sites();
    let amps = (0..space.dim())
        .map(|idx| {
            (1..=n)
                .map(|site| single[usize::from(idx & space.site_mask(site) != 0)])
                .product()
        })
        .collect();
    StateVector::from_normalized(space, amps)
}

/// `(|a...a> + e^{i phase} |b...b>) / sqrt(2)` where `a`, `b` are the `+`
/// and `-` eigenstates along `basis_axis`.
pub fn ghz_state(space: HilbertSpace, basis_axis: Axis, relative_phase: f64) -> StateVector {
    let up = polarized_state(space, basis_axis, true);
    let down = polarized_state(space, basis_axis, false);
    let phase = C64::from_polar(1.0, relative_phase);
    let amps = up
        .amps
        .iter()
        .zip(&down.amps)
        .map(|(a, b)| (a + phase * b) * FRAC_1_SQRT_2)
        .collect();
    StateVector::from_normalized(space, amps)
}
