//! Expectation values, fidelities, frame changes and the transverse-spin
//! reconstruction used to read twisting dynamics off a precessing simulator.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::evolution::Trajectory;
use crate::io::{fmt_float, CsvTable};
use crate::spin_algebra::{inner, polarized_state, Axis, Operator, StateVector};

/// Largest imaginary part tolerated in an expectation value, relative to
/// the operator's largest entry.
pub const EXPECT_IMAG_TOL: f64 = 1e-10;

/// `<psi|O|psi>` for Hermitian `O`.
pub fn expect(op: &Operator, psi: &StateVector) -> Result<f64> {
    op.require_hermitian("observable")?;
    let o_psi = op.apply(psi)?;
    let value = inner(psi.amplitudes(), &o_psi);
    let scale = op.max_norm().max(1.0);
    if value.im.abs() > EXPECT_IMAG_TOL * scale {
        return Err(Error::numeric(format!(
            "expectation value has imaginary residue {:.3e}",
            value.im
        )));
    }
    Ok(value.re)
}

/// `|<psi1|psi2>|^2`.
pub fn fidelity(psi1: &StateVector, psi2: &StateVector) -> Result<f64> {
    Ok(psi1.inner(psi2)?.norm_sqr())
}

/// Applies `exp(i t omega S_z)`, a diagonal phase per magnetization sector.
pub fn rotating_frame(psi: &StateVector, t: f64, omega: f64) -> StateVector {
    let space = psi.space();
    let amps = psi
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(k, a)| a * C64::from_polar(1.0, t * omega * space.magnetization(k)))
        .collect();
    StateVector::from_normalized(space, amps)
}

/// Simulator transverse spin and the target `<S_x>` rebuilt from it.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionRecord {
    pub times: Vec<f64>,
    pub sx_qs: Vec<f64>,
    pub sy_qs: Vec<f64>,
    /// `sqrt(sx_qs^2 + sy_qs^2)`.
    pub sx_reconstructed: Vec<f64>,
    /// `<S_x>` from direct evolution under the target, when supplied.
    pub sx_direct: Option<Vec<f64>>,
}

impl ReconstructionRecord {
    pub fn set_direct(&mut self, direct: Vec<f64>) -> Result<()> {
        if direct.len() != self.times.len() {
            return Err(Error::Dimension {
                expected: self.times.len(),
                found: direct.len(),
            });
        }
        self.sx_direct = Some(direct);
        Ok(())
    }

    /// `max_t |reconstructed - direct|`, if the direct column is present.
    pub fn max_deviation(&self) -> Option<f64> {
        let direct = self.sx_direct.as_ref()?;
        Some(
            self.sx_reconstructed
                .iter()
                .zip(direct)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        )
    }
}

/// Columns `t, sx_qs, sy_qs, sx_reconstructed, sx_direct`; the last is
/// left empty when no direct evolution was supplied.
impl CsvTable for ReconstructionRecord {
    fn header(&self) -> Vec<&'static str> {
        vec!["t", "sx_qs", "sy_qs", "sx_reconstructed", "sx_direct"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        (0..self.times.len())
            .map(|k| {
                vec![
                    fmt_float(self.times[k]),
                    fmt_float(self.sx_qs[k]),
                    fmt_float(self.sy_qs[k]),
                    fmt_float(self.sx_reconstructed[k]),
                    self.sx_direct.as_ref().map(|d| fmt_float(d[k])).unwrap_or_default(),
                ]
            })
            .collect()
    }
}

/// Rebuilds the target `<S_x>` as the magnitude of the simulator's
/// transverse spin. Needs trajectory labels `Sx` and `Sy`.
///
/// Only the magnitude survives; the sign of the target `<S_x>` is lost.
pub fn reconstruct_sx(traj: &Trajectory) -> Result<ReconstructionRecord> {
    let sx = traj
        .column("Sx")
        .ok_or_else(|| Error::contract("trajectory lacks an 'Sx' record"))?;
    let sy = traj
        .column("Sy")
        .ok_or_else(|| Error::contract("trajectory lacks an 'Sy' record"))?;
    let sx_reconstructed = sx.iter().zip(&sy).map(|(x, y)| x.hypot(*y)).collect();
    Ok(ReconstructionRecord {
        times: traj.times.clone(),
        sx_qs: sx,
        sy_qs: sy,
        sx_reconstructed,
        sx_direct: None,
    })
}

/// `max_phi |<GHZ_phi|psi>|^2` over GHZ states along `basis_axis`.
///
/// With `a`, `b` the overlaps with the two polarized branches, the optimum
/// over the relative phase is `(|a| + |b|)^2 / 2`.
pub fn ghz_fidelity(psi: &StateVector, basis_axis: Axis) -> f64 {
    let space = psi.space();
    let up = polarized_state(space, basis_axis, true);
    let down = polarized_state(space, basis_axis, false);
    let a = inner(up.amplitudes(), psi.amplitudes()).norm();
    let b = inner(down.amplitudes(), psi.amplitudes()).norm();
    0.5 * (a + b).powi(2)
}

/// Basis in which a state is compared with a GHZ state: a pre-rotation
/// `exp(i theta S_z)` followed by [`ghz_fidelity`] along `axis`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhzConvention {
    pub axis: Axis,
    pub pre_rotation: f64,
}

impl GhzConvention {
    /// Candidate conventions: axis `x` or `z`, pre-rotation `0` or `pi/2`.
    pub const CANDIDATES: [GhzConvention; 4] = [
        GhzConvention { axis: Axis::X, pre_rotation: 0.0 },
        GhzConvention { axis: Axis::X, pre_rotation: FRAC_PI_2 },
        GhzConvention { axis: Axis::Z, pre_rotation: 0.0 },
        GhzConvention { axis: Axis::Z, pre_rotation: FRAC_PI_2 },
    ];

    /// Convention under which twisting the `+x` coherent state for
    /// `chi t = pi/2` lands on a GHZ state: `x` for even `N`, and `x` after
    /// a quarter turn about `z` for odd `N` (the cat forms along `y`).
    pub fn for_twisting(n_sites: usize) -> Self {
        GhzConvention {
            axis: Axis::X,
            pre_rotation: if n_sites.is_multiple_of(2) { 0.0 } else { FRAC_PI_2 },
        }
    }

    pub fn fidelity(&self, psi: &StateVector) -> f64 {
        ghz_fidelity(&rotating_frame(psi, 1.0, self.pre_rotation), self.axis)
    }

    /// The candidate with the highest GHZ fidelity; ties keep the earlier one.
    pub fn best(psi: &StateVector) -> (GhzConvention, f64) {
        let mut best = (Self::CANDIDATES[0], Self::CANDIDATES[0].fidelity(psi));
        for conv in &Self::CANDIDATES[1..] {
            let f = conv.fidelity(psi);
            if f > best.1 {
                best = (*conv, f);
            }
        }
        best
    }
}
