//! The connector operator `h(t)` defined by
//! `exp(i h(t)) = exp(i t H_qs) exp(-i t H_t)`, and the phase `xi(t)` with
//! `<psi| exp(i t H_qs) exp(-i t H_t) |psi> = exp(i xi(t))`.
//!
//! `Im xi = -ln |overlap|` measures how far the simulator `H_qs` drifts from
//! the target `H_t` for a given initial state; it vanishes identically when
//! the two generate the same dynamics up to a phase.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;

use crate::dense::{max_abs, HermitianEigen};
use crate::error::{Error, Result};
use crate::evolution::Propagator;
use crate::io::{fmt_float, CsvTable};
use crate::observables::expect;
use crate::spin_algebra::{inner, l2_norm, op_combine, Operator, StateVector};

/// Overlaps below this magnitude are reported with a saturated `Im xi`.
pub const OVERLAP_FLOOR: f64 = 1e-300;

/// Largest step of the demodulated phase for which unwrapping is trusted.
pub const PHASE_STEP_LIMIT: f64 = FRAC_PI_2;

/// `AB - BA`. Anti-Hermitian for Hermitian inputs, so the Hermitian flag
/// is set only when the commutator vanishes.
pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator> {
    a.space().check_same(&b.space())?;
    let ab = a.mul(b)?;
    let ba = b.mul(a)?;
    Operator::new(a.space(), ab.sub(&ba)?.matrix().clone())
}

/// Truncated series for the connector `h(t)`, `order` in `1..=3`:
///
/// * order 1: `t (H_qs - H_t)`
/// * order 2: `+ (i t^2 / 2) [H_qs, -H_t]`
/// * order 3: `+ (t^3 / 12) ([H_qs, [H_qs, H_t]] - [H_t, [H_t, H_qs]])`
///
/// Every order is checked to be Hermitian.
pub fn bch_connector(h_qs: &Operator, h_t: &Operator, t: f64, order: u32) -> Result<Operator> {
    if !(1..=3).contains(&order) {
        return Err(Error::param(format!("BCH order must be 1, 2 or 3, got {order}")));
    }
    h_qs.require_hermitian("simulator Hamiltonian")?;
    h_t.require_hermitian("target Hamiltonian")?;
    let first = h_qs.sub(h_t)?.scale_real(t);
    let mut h = first;
    if order >= 2 {
        let qt = commutator(h_qs, h_t)?;
        // (i t^2/2) [H_qs, -H_t] = -(i t^2/2) [H_qs, H_t]
        let second = checked_hermitian(op_combine(&[(C64::new(0.0, -0.5 * t * t), &qt)])?, 2)?;
        h = h.add(&second)?;
        if order >= 3 {
            let tq = qt.scale_real(-1.0);
            let a_aab = commutator(h_qs, &qt)?;
            let b_bba = commutator(h_t, &tq)?;
            let third = checked_hermitian(a_aab.sub(&b_bba)?.scale_real(t.powi(3) / 12.0), 3)?;
            h = h.add(&third)?;
        }
    }
    Ok(h)
}

fn checked_hermitian(term: Operator, order: u32) -> Result<Operator> {
    let m = term.matrix();
    let defect = m.hermiticity_defect();
    if defect > 1e-10 * m.max_abs().max(f64::MIN_POSITIVE) {
        return Err(Error::numeric(format!(
            "BCH order-{order} term is not Hermitian (defect {defect:.3e})"
        )));
    }
    Operator::new(term.space(), m.clone()).map(|op| {
        if op.is_hermitian() {
            op
        } else {
            // round-off above the flag tolerance but within the check above
            let sym = op.add(&op.adjoint()).expect("same space").scale_real(0.5);
            Operator::new(op.space(), sym.matrix().clone()).expect("same space")
        }
    })
}

/// Spectral-norm distance `|| exp(i h) - exp(i t H_qs) exp(-i t H_t) ||`
/// between a connector and the exact product it approximates.
pub fn connector_defect(h: &Operator, h_qs: &Operator, h_t: &Operator, t: f64) -> Result<f64> {
    let approx = HermitianEigen::of_operator(h)?.exp_i(1.0);
    let exact = HermitianEigen::of_operator(h_qs)?.exp_i(t) * HermitianEigen::of_operator(h_t)?.exp_i(-t);
    Ok(crate::dense::spectral_norm(&(approx - exact)))
}

/// `|| h psi - <psi|h|psi> psi ||`, zero exactly for eigenstates of `h`.
pub fn eigenstate_residual(h: &Operator, psi: &StateVector) -> Result<f64> {
    let mean = expect(h, psi)?;
    let h_psi = h.apply(psi)?;
    let diff: Vec<C64> = h_psi
        .iter()
        .zip(psi.amplitudes())
        .map(|(a, p)| a - p * mean)
        .collect();
    Ok(l2_norm(&diff))
}

/// `exp(-i h) O exp(i h)` through dense exponentials. Intended for analysis
/// on small chains.
pub fn conjugate_observable(observable: &Operator, h: &Operator) -> Result<Operator> {
    observable.space().check_same(&h.space())?;
    let eig = HermitianEigen::of_operator(h)?;
    let dense = eig.exp_i(-1.0) * observable.to_dense() * eig.exp_i(1.0);
    let scale = max_abs(&dense).max(f64::MIN_POSITIVE);
    let mut out = Operator::from_dense(observable.space(), &dense.map(|v| {
        if v.norm() <= 1e-15 * scale {
            C64::new(0.0, 0.0)
        } else {
            v
        }
    }))?;
    if observable.is_hermitian() && !out.is_hermitian() {
        let sym = out.add(&out.adjoint())?.scale_real(0.5);
        out = Operator::new(out.space(), sym.matrix().clone())?;
    }
    Ok(out)
}

/// Samples of `xi(t)` for one initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectorReport {
    pub times: Vec<f64>,
    /// Unwrapped `Re xi`.
    pub xi_real: Vec<f64>,
    /// `Im xi = -ln |overlap|`.
    pub xi_imag: Vec<f64>,
    pub overlap_abs: Vec<f64>,
    /// Eigenstate residual of the initial state against `H_qs - H_t`.
    pub residual0: f64,
    /// Largest step of the demodulated phase between neighbouring samples.
    pub max_phase_step: f64,
    /// False when some phase step exceeded [`PHASE_STEP_LIMIT`] and the
    /// branch of `Re xi` may be ambiguous.
    pub phase_resolved: bool,
    /// True when some overlap fell below [`OVERLAP_FLOOR`].
    pub saturated: bool,
}

impl ConnectorReport {
    pub fn max_xi_imag(&self) -> f64 {
        self.xi_imag.iter().copied().fold(0.0, f64::max)
    }
}

impl CsvTable for ConnectorReport {
    fn header(&self) -> Vec<&'static str> {
        vec!["t", "xi_real", "xi_imag", "overlap_abs"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        (0..self.times.len())
            .map(|k| {
                vec![
                    fmt_float(self.times[k]),
                    fmt_float(self.xi_real[k]),
                    fmt_float(self.xi_imag[k]),
                    fmt_float(self.overlap_abs[k]),
                ]
            })
            .collect()
    }
}

fn wrap_phase(x: f64) -> f64 {
    let w = (x + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

/// `xi(t)` for simulator and target propagators on the grid `times`.
///
/// The overlap is `<exp(-i t H_qs) psi0, exp(-i t H_t) psi0>`. Its phase is
/// unwrapped after removing the reference drift `t (<H_qs> - <H_t>)`, so the
/// grid only has to resolve the slower remainder.
pub fn xi_phase(qs: &Propagator, target: &Propagator, psi0: &StateVector, times: &[f64]) -> Result<ConnectorReport> {
    let norm = psi0.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::contract(format!("initial state has norm {norm}")));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("time grid must be strictly increasing"));
    }
    let h_qs = qs.hamiltonian();
    let h_t = target.hamiltonian();
    let drift = expect(h_qs, psi0)? - expect(h_t, psi0)?;
    let residual0 = eigenstate_residual(&h_qs.sub(h_t)?, psi0)?;

    let qs_states = qs.evolve_many(psi0, times)?;
    let t_states = target.evolve_many(psi0, times)?;

    let mut xi_real = Vec::with_capacity(times.len());
    let mut xi_imag = Vec::with_capacity(times.len());
    let mut overlap_abs = Vec::with_capacity(times.len());
    let mut max_step: f64 = 0.0;
    let mut saturated = false;
    let mut prev_raw = 0.0;
    let mut unwrapped = 0.0;
    for (k, (a, b)) in qs_states.iter().zip(&t_states).enumerate() {
        let o = inner(a.amplitudes(), b.amplitudes());
        let t = times[k];
        let mag = o.norm();
        let raw = (o * C64::from_polar(1.0, -drift * t)).arg();
        if k == 0 {
            unwrapped = raw;
        } else {
            let step = wrap_phase(raw - prev_raw);
            max_step = max_step.max(step.abs());
            unwrapped += step;
        }
        prev_raw = raw;
        xi_real.push(drift * t + unwrapped);
        if mag < OVERLAP_FLOOR {
            saturated = true;
            xi_imag.push(-OVERLAP_FLOOR.ln());
        } else {
            xi_imag.push(-mag.ln());
        }
        overlap_abs.push(mag);
    }
    Ok(ConnectorReport {
        times: times.to_vec(),
        xi_real,
        xi_imag,
        overlap_abs,
        residual0,
        max_phase_step: max_step,
        phase_resolved: max_step <= PHASE_STEP_LIMIT,
        saturated,
    })
}

/// [`xi_phase`] building dense-or-Krylov propagators for both Hamiltonians.
pub fn xi_phase_ops(h_qs: &Operator, h_t: &Operator, psi0: &StateVector, times: &[f64]) -> Result<ConnectorReport> {
    xi_phase(&Propagator::new(h_qs.clone())?, &Propagator::new(h_t.clone())?, psi0, times)
}
