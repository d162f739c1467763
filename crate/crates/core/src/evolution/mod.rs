//! Unitary propagation `exp(-i t H)` under a time-independent Hamiltonian.
//!
//! Two backends are available: a cached dense eigendecomposition, exact to
//! machine precision and cheap to reuse over many times, and a Lanczos
//! propagator for chains too large to diagonalize.

mod krylov;

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_complex::Complex64 as C64;

pub use krylov::KrylovOptions;

use crate::dense::HermitianEigen;
use crate::error::{Error, Result};
use crate::observables::expect;
use crate::spin_algebra::{Operator, StateVector};

/// Largest chain propagated with [`Backend::DenseEig`] when the backend is
/// chosen automatically.
pub const DENSE_MAX_SITES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    DenseEig,
    Krylov,
}

impl Backend {
    pub fn auto(n_sites: usize) -> Backend {
        if n_sites <= DENSE_MAX_SITES {
            Backend::DenseEig
        } else {
            Backend::Krylov
        }
    }
}

/// Propagator for a fixed Hermitian Hamiltonian. Immutable once built and
/// safe to share between threads.
#[derive(Debug, Clone)]
pub struct Propagator {
    hamiltonian: Operator,
    backend: Backend,
    krylov: KrylovOptions,
    eigen: Option<HermitianEigen>,
}

impl Propagator {
    /// Picks the backend from the chain length.
    pub fn new(hamiltonian: Operator) -> Result<Self> {
        let backend = Backend::auto(hamiltonian.space().n_sites());
        Self::with_backend(hamiltonian, backend)
    }

    pub fn with_backend(hamiltonian: Operator, backend: Backend) -> Result<Self> {
        Self::with_options(hamiltonian, backend, KrylovOptions::default())
    }

    pub fn with_options(hamiltonian: Operator, backend: Backend, krylov: KrylovOptions) -> Result<Self> {
        hamiltonian.require_hermitian("Hamiltonian")?;
        let eigen = match backend {
            Backend::DenseEig => Some(HermitianEigen::of_operator(&hamiltonian)?),
            Backend::Krylov => None,
        };
        Ok(Propagator {
            hamiltonian,
            backend,
            krylov,
            eigen,
        })
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn eigen(&self) -> Option<&HermitianEigen> {
        self.eigen.as_ref()
    }

    /// `exp(-i t H) psi`.
    pub fn evolve(&self, psi: &StateVector, t: f64) -> Result<StateVector> {
        self.hamiltonian.space().check_same(&psi.space())?;
        if !t.is_finite() {
            return Err(Error::param(format!("evolution time must be finite, got {t}")));
        }
        if t == 0.0 {
            return Ok(psi.clone());
        }
        let amps = match &self.eigen {
            Some(eig) => eig.evolve_coefficients(&eig.project(psi.amplitudes()), t),
            None => krylov::expm_multiply(self.hamiltonian.matrix(), psi.amplitudes(), t, &self.krylov)?,
        };
        Ok(StateVector::from_normalized(psi.space(), amps))
    }

    /// States at each of `times`, starting from `psi0` at time zero.
    pub fn evolve_many(&self, psi0: &StateVector, times: &[f64]) -> Result<Vec<StateVector>> {
        self.hamiltonian.space().check_same(&psi0.space())?;
        match &self.eigen {
            Some(eig) => {
                let coeffs: DVector<C64> = eig.project(psi0.amplitudes());
                Ok(times
                    .iter()
                    .map(|&t| {
                        if t == 0.0 {
                            psi0.clone()
                        } else {
                            StateVector::from_normalized(psi0.space(), eig.evolve_coefficients(&coeffs, t))
                        }
                    })
                    .collect())
            }
            None => {
                let mut out = Vec::with_capacity(times.len());
                let mut current = psi0.clone();
                let mut now = 0.0;
                for &t in times {
                    current = self.evolve(&current, t - now)?;
                    now = t;
                    out.push(current.clone());
                }
                Ok(out)
            }
        }
    }
}

/// `exp(-i t H) psi0` using `prop`.
pub fn evolve(prop: &Propagator, psi0: &StateVector, t: f64) -> Result<StateVector> {
    prop.evolve(psi0, t)
}

/// Observable records sampled along a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub labels: Vec<String>,
    /// `records[k][j]` is observable `labels[j]` at `times[k]`.
    pub records: Vec<Vec<f64>>,
    /// States saved at the requested time indices.
    pub snapshots: BTreeMap<usize, StateVector>,
}

impl Trajectory {
    pub fn column(&self, label: &str) -> Option<Vec<f64>> {
        let j = self.labels.iter().position(|l| l == label)?;
        Some(self.records.iter().map(|row| row[j]).collect())
    }

    pub fn value(&self, index: usize, label: &str) -> Option<f64> {
        let j = self.labels.iter().position(|l| l == label)?;
        self.records.get(index).map(|row| row[j])
    }

    /// Assembles a trajectory from precomputed rows, checking the grid.
    pub fn from_records(times: Vec<f64>, labels: Vec<String>, records: Vec<Vec<f64>>) -> Result<Self> {
        check_grid(&times)?;
        if records.len() != times.len() || records.iter().any(|r| r.len() != labels.len()) {
            return Err(Error::contract("every time needs one record per label"));
        }
        Ok(Trajectory {
            times,
            labels,
            records,
            snapshots: BTreeMap::new(),
        })
    }
}

fn check_grid(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::param("time grid contains a non-finite value"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("time grid must be strictly increasing"));
    }
    Ok(())
}

/// Samples `<psi(t)|O|psi(t)>` for each labelled observable on `times`,
/// keeping the states at the indices in `snapshot_marks`.
pub fn trajectory(
    prop: &Propagator,
    psi0: &StateVector,
    times: &[f64],
    observables: &[(&str, &Operator)],
    snapshot_marks: &[usize],
) -> Result<Trajectory> {
    check_grid(times)?;
    for (label, op) in observables {
        op.require_hermitian(&format!("observable '{label}'"))?;
        prop.hamiltonian().space().check_same(&op.space())?;
    }
    if let Some(&bad) = snapshot_marks.iter().find(|&&k| k >= times.len()) {
        return Err(Error::param(format!(
            "snapshot index {bad} outside a grid of {} times",
            times.len()
        )));
    }
    let states = prop.evolve_many(psi0, times)?;
    let mut records = Vec::with_capacity(times.len());
    for psi in &states {
        let row = observables
            .iter()
            .map(|(_, op)| expect(op, psi))
            .collect::<Result<Vec<f64>>>()?;
        records.push(row);
    }
    let snapshots = snapshot_marks.iter().map(|&k| (k, states[k].clone())).collect();
    Ok(Trajectory {
        times: times.to_vec(),
        labels: observables.iter().map(|(l, _)| l.to_string()).collect(),
        records,
        snapshots,
    })
}

/// Uniform grid of `samples` points over `[start, stop]`.
pub fn uniform_grid(start: f64, stop: f64, samples: usize) -> Vec<f64> {
    match samples {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..samples)
            .map(|k| start + (stop - start) * k as f64 / (samples - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{analog_simulator, build_oat, build_xxx_staggered, SpinChainParams};
    use crate::observables::fidelity;
    use crate::spin_algebra::{coherent_x_state, collective_spin, Axis, HilbertSpace};

    fn oat(n: usize, chi: f64) -> Operator {
        build_oat(&SpinChainParams::new(n, chi, 0.0, 0.0)).unwrap()
    }

    #[test]
    fn single_spin_oat_is_a_global_phase() {
        let s = HilbertSpace::new(1).unwrap();
        let prop = Propagator::new(oat(1, 1.0)).unwrap();
        let psi = StateVector::new(s, vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap();
        let t = 1.7;
        let out = prop.evolve(&psi, t).unwrap();
        let phase = C64::from_polar(1.0, -t / 4.0);
        for (a, b) in out.amplitudes().iter().zip(psi.amplitudes()) {
            assert!((a - b * phase).norm() < 1e-14);
        }
        assert!((fidelity(&out, &psi).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_time_is_exact_identity() {
        let s = HilbertSpace::new(3).unwrap();
        let psi = coherent_x_state(s);
        for backend in [Backend::DenseEig, Backend::Krylov] {
            let prop = Propagator::with_backend(oat(3, 1.0), backend).unwrap();
            assert_eq!(prop.evolve(&psi, 0.0).unwrap(), psi);
        }
    }

    #[test]
    fn two_spin_twisting_gives_cosine() {
        let s = HilbertSpace::new(2).unwrap();
        let prop = Propagator::new(oat(2, 1.0)).unwrap();
        let sx = collective_spin(Axis::X, s);
        for t in [0.0, 0.3, 1.0, 2.2, 3.1] {
            let psi = prop.evolve(&coherent_x_state(s), t).unwrap();
            assert!((expect(&sx, &psi).unwrap() - t.cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn trajectory_records_and_snapshots() {
        let s = HilbertSpace::new(5).unwrap();
        let prop = Propagator::new(oat(5, 1.0)).unwrap();
        let sx = collective_spin(Axis::X, s);
        let times = uniform_grid(0.0, 1.0, 5);
        let traj = trajectory(&prop, &coherent_x_state(s), &times, &[("Sx", &sx)], &[0, 4]).unwrap();
        assert!((traj.value(0, "Sx").unwrap() - 2.5).abs() < 1e-14);
        assert_eq!(traj.snapshots.len(), 2);

        let empty = trajectory(&prop, &coherent_x_state(s), &times, &[], &[2]).unwrap();
        assert!(empty.labels.is_empty());
        assert!(empty.records.iter().all(|r| r.is_empty()));
        assert_eq!(empty.snapshots.keys().copied().collect::<Vec<_>>(), vec![2]);
    }

    #[test]
    fn trajectory_rejects_bad_inputs() {
        let s = HilbertSpace::new(2).unwrap();
        let prop = Propagator::new(oat(2, 1.0)).unwrap();
        let psi = coherent_x_state(s);
        let anti = collective_spin(Axis::X, s).scale(C64::new(0.0, 1.0));
        let err = trajectory(&prop, &psi, &[0.0, 1.0], &[("iSx", &anti)], &[]).unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
        assert!(trajectory(&prop, &psi, &[0.0, 0.0], &[], &[]).is_err());
        assert!(trajectory(&prop, &psi, &[0.0, 1.0], &[], &[2]).is_err());
    }

    #[test]
    fn staggered_chain_conserves_magnetization() {
        let p = SpinChainParams::new(5, 1.0, 40.0, 3.0);
        let s = p.space().unwrap();
        let prop = Propagator::new(build_xxx_staggered(&p).unwrap()).unwrap();
        let sz = collective_spin(Axis::Z, s);
        // a state with nonzero <S_z>
        let amps: Vec<C64> = (0..s.dim()).map(|i| C64::new(1.0 + i as f64 * 0.1, 0.05 * i as f64)).collect();
        let psi0 = StateVector::new(s, amps).unwrap();
        let traj = trajectory(&prop, &psi0, &uniform_grid(0.0, 3.0, 31), &[("Sz", &sz)], &[]).unwrap();
        let col = traj.column("Sz").unwrap();
        assert!(col.iter().all(|v| (v - col[0]).abs() < 1e-9));
    }

    #[test]
    fn krylov_handles_large_offsets() {
        let p = SpinChainParams::new(6, 1.0, 8000.0, 200.0);
        let h = analog_simulator(&p).unwrap();
        let psi = coherent_x_state(p.space().unwrap());
        let dense = Propagator::with_backend(h.clone(), Backend::DenseEig).unwrap();
        let kry = Propagator::with_backend(h, Backend::Krylov).unwrap();
        let a = dense.evolve(&psi, 0.05).unwrap();
        let b = kry.evolve(&psi, 0.05).unwrap();
        assert!(a.distance(&b).unwrap() < 1e-9);
    }

    #[test]
    fn auto_backend_by_size() {
        assert_eq!(Backend::auto(10), Backend::DenseEig);
        assert_eq!(Backend::auto(11), Backend::Krylov);
    }
}
