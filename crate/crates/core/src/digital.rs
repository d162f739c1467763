//! Digital simulation: first-order product formulas and schedules of
//! quantum kicks.
//!
//! A kick evolves the state for a short time under one simulator
//! Hamiltonian. If the state entering kick `k` is an eigenstate of
//! `H^(k) - H_T`, the kick reproduces the target dynamics up to a phase,
//! with corrections of order `dt^2 [H^(k), H_T]`. A schedule either fixes
//! the kick Hamiltonians up front or picks each one from the current state
//! with a [`Matcher`].
//!
//! All propagation uses `exp(-i t H)`, as in [`crate::evolution`].

use std::fmt;
use std::sync::Arc;

use crate::connector::eigenstate_residual;
use crate::error::{Error, Result};
use crate::evolution::Propagator;
use crate::hamiltonians::{commutator_max_norm, HamiltonianSpec};
use crate::io::{fmt_float, CsvTable};
use crate::observables::fidelity;
use crate::spin_algebra::{Operator, StateVector};

/// First-order product formula
/// `(exp(-i H_1 t/n) ... exp(-i H_l t/n))^n psi0`.
pub fn trotter_evolve(terms: &[Operator], t: f64, n: usize, psi0: &StateVector) -> Result<StateVector> {
    if terms.is_empty() {
        return Err(Error::param("trotter_evolve needs at least one term"));
    }
    if n == 0 {
        return Err(Error::param("trotter_evolve needs n >= 1"));
    }
    let props = terms
        .iter()
        .map(|h| {
            psi0.space().check_same(&h.space())?;
            Propagator::new(h.clone())
        })
        .collect::<Result<Vec<_>>>()?;
    let dt = t / n as f64;
    let mut psi = psi0.clone();
    for _ in 0..n {
        // rightmost factor acts first
        for prop in props.iter().rev() {
            psi = prop.evolve(&psi, dt)?;
        }
    }
    Ok(psi)
}

/// One-parameter family of simulator Hamiltonians.
pub trait HamiltonianFamily: Send + Sync {
    fn build(&self, theta: f64) -> Result<Operator>;

    /// Serializable description of the member at `theta`, when there is one.
    fn spec(&self, _theta: f64) -> Option<HamiltonianSpec> {
        None
    }
}

/// A [`HamiltonianSpec`] whose staggered-field amplitude `alpha` is the
/// tuning parameter. The frame frequency follows as `alpha / N`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaFamily {
    pub base: HamiltonianSpec,
}

impl HamiltonianFamily for AlphaFamily {
    fn build(&self, theta: f64) -> Result<Operator> {
        self.spec(theta).expect("always described").build()
    }

    fn spec(&self, theta: f64) -> Option<HamiltonianSpec> {
        let mut spec = self.base.clone();
        spec.params.alpha = theta;
        spec.params.omega = theta / spec.params.n_sites as f64;
        Some(spec)
    }
}

/// Family defined by a closure.
pub struct FnFamily<F>(pub F);

impl<F> HamiltonianFamily for FnFamily<F>
where
    F: Fn(f64) -> Result<Operator> + Send + Sync,
{
    fn build(&self, theta: f64) -> Result<Operator> {
        (self.0)(theta)
    }
}

/// What the kick matcher minimizes over the family parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatchObjective {
    /// `eigenstate_residual(H(theta) - H_T, state)`.
    EigenResidual,
    /// `1 - |<exp(-i d H(theta)) state, exp(-i d H_T) state>|^2` for a kick
    /// of length `d`. This sees second-order effective couplings that the
    /// residual alone misses.
    KickInfidelity { duration: f64 },
}

/// Result of [`match_next_kick`].
#[derive(Debug, Clone)]
pub struct KickMatch {
    pub theta: f64,
    /// Objective value at `theta`.
    pub objective: f64,
    pub hamiltonian: Operator,
    pub spec: Option<HamiltonianSpec>,
    pub evaluations: usize,
}

/// Golden-section search settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Stop once the bracket is narrower than this.
    pub x_tol: f64,
    pub max_iter: usize,
    /// Objective spread below which the family is treated as flat and the
    /// interval midpoint is returned.
    pub flat_tol: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            x_tol: 1e-9,
            max_iter: 200,
            flat_tol: 1e-14,
        }
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Minimizes `f` over `[lo, hi]` by golden-section search.
/// Returns `(x, f(x), evaluations)`.
fn golden_section(
    mut f: impl FnMut(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    opts: &SearchOptions,
) -> Result<(f64, f64, usize)> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::param(format!("invalid search interval [{lo}, {hi}]")));
    }
    let mut eval = |x: f64| -> Result<f64> {
        let v = f(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::numeric(format!("objective is {v} at {x}")))
        }
    };
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    let (mut f_min, mut f_max) = (fc.min(fd), fc.max(fd));
    let mut evaluations = 2;
    for _ in 0..opts.max_iter {
        if b - a <= opts.x_tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c)?;
            f_min = f_min.min(fc);
            f_max = f_max.max(fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d)?;
            f_min = f_min.min(fd);
            f_max = f_max.max(fd);
        }
        evaluations += 1;
    }
    if f_max - f_min <= opts.flat_tol * f_max.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        let v = eval(mid)?;
        return Ok((mid, v, evaluations + 1));
    }
    let (x, v) = if fc <= fd { (c, fc) } else { (d, fd) };
    Ok((x, v, evaluations))
}

/// Picks the family member that best continues the target dynamics from
/// `state`, searching `interval` by golden section. A flat objective
/// returns the interval midpoint.
pub fn match_next_kick(
    state: &StateVector,
    target: &Operator,
    family: &dyn HamiltonianFamily,
    interval: (f64, f64),
    objective: MatchObjective,
) -> Result<KickMatch> {
    match_next_kick_with(state, target, family, interval, objective, &SearchOptions::default())
}

pub fn match_next_kick_with(
    state: &StateVector,
    target: &Operator,
    family: &dyn HamiltonianFamily,
    interval: (f64, f64),
    objective: MatchObjective,
    opts: &SearchOptions,
) -> Result<KickMatch> {
    state.space().check_same(&target.space())?;
    let (theta, value, evaluations) = match objective {
        MatchObjective::EigenResidual => golden_section(
            |theta| {
                let h = family.build(theta)?;
                eigenstate_residual(&h.sub(target)?, state)
            },
            interval.0,
            interval.1,
            opts,
        )?,
        MatchObjective::KickInfidelity { duration } => {
            if !(duration > 0.0 && duration.is_finite()) {
                return Err(Error::param(format!("kick duration must be > 0, got {duration}")));
            }
            let reference = Propagator::new(target.clone())?.evolve(state, duration)?;
            golden_section(
                |theta| {
                    let out = Propagator::new(family.build(theta)?)?.evolve(state, duration)?;
                    Ok(1.0 - fidelity(&out, &reference)?)
                },
                interval.0,
                interval.1,
                opts,
            )?
        }
    };
    Ok(KickMatch {
        theta,
        objective: value,
        hamiltonian: family.build(theta)?,
        spec: family.spec(theta),
        evaluations,
    })
}

/// Chooses each kick's Hamiltonian from the state entering it.
#[derive(Clone)]
pub struct Matcher {
    pub family: Arc<dyn HamiltonianFamily>,
    pub interval: (f64, f64),
    pub objective: MatchObjective,
}

impl fmt::Debug for Matcher {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Matcher")
            .field("interval", &self.interval)
            .field("objective", &self.objective)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum KickPlan {
    /// One Hamiltonian per kick.
    Fixed(Vec<Operator>),
    /// Hamiltonians picked on the fly.
    Matched(Matcher),
}

/// Ordered kicks toward simulating `target` for a total time.
#[derive(Debug, Clone)]
pub struct KickSchedule {
    pub target: Operator,
    pub durations: Vec<f64>,
    pub plan: KickPlan,
}

impl KickSchedule {
    /// Checks positivity of every duration, that they sum to `total` within
    /// `1e-12`, and that fixed plans have one Hamiltonian per kick.
    pub fn new(target: Operator, durations: Vec<f64>, plan: KickPlan, total: f64) -> Result<Self> {
        if durations.is_empty() {
            return Err(Error::param("a kick schedule needs at least one kick"));
        }
        if let Some(bad) = durations.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
            return Err(Error::param(format!("kick durations must be > 0, got {bad}")));
        }
        let sum: f64 = durations.iter().sum();
        if (sum - total).abs() > 1e-12 * total.abs().max(1.0) {
            return Err(Error::param(format!("kick durations sum to {sum}, expected {total}")));
        }
        if let KickPlan::Fixed(hs) = &plan {
            if hs.len() != durations.len() {
                return Err(Error::param(format!(
                    "{} kick Hamiltonians for {} durations",
                    hs.len(),
                    durations.len()
                )));
            }
        }
        Ok(KickSchedule {
            target,
            durations,
            plan,
        })
    }

    /// `n` kicks of length `total / n`.
    pub fn uniform(target: Operator, total: f64, n: usize, plan: KickPlan) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("a kick schedule needs at least one kick"));
        }
        let mut durations = vec![total / n as f64; n];
        // put the rounding remainder on the last kick
        let head: f64 = durations[..n - 1].iter().sum();
        durations[n - 1] = total - head;
        Self::new(target, durations, plan, total)
    }

    pub fn total_duration(&self) -> f64 {
        self.durations.iter().sum()
    }
}

/// Diagnostics for one kick.
#[derive(Debug, Clone, PartialEq)]
pub struct KickRecord {
    pub index: usize,
    pub duration: f64,
    /// Family parameter chosen by the matcher, if any.
    pub theta: Option<f64>,
    /// Eigenstate residual of the state entering the kick against `H^(k) - H_T`.
    pub residual: f64,
    /// Largest entry of `[H^(k), H_T]`.
    pub commutator_norm: f64,
    /// Fidelity with exact target evolution after this kick.
    pub running_fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct KickReport {
    pub kicks: Vec<KickRecord>,
}

impl KickReport {
    pub fn final_fidelity(&self) -> Option<f64> {
        self.kicks.last().map(|k| k.running_fidelity)
    }
}

impl CsvTable for KickReport {
    fn header(&self) -> Vec<&'static str> {
        vec!["kick", "duration", "residual", "commutator_norm", "running_fidelity"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.kicks
            .iter()
            .map(|k| {
                vec![
                    k.index.to_string(),
                    fmt_float(k.duration),
                    fmt_float(k.residual),
                    fmt_float(k.commutator_norm),
                    fmt_float(k.running_fidelity),
                ]
            })
            .collect()
    }
}

/// Applies the schedule's kicks in order, comparing after each kick with
/// exact evolution under the target.
pub fn run_kicks(schedule: &KickSchedule, psi0: &StateVector) -> Result<(StateVector, KickReport)> {
    let target = &schedule.target;
    psi0.space().check_same(&target.space())?;
    let target_prop = Propagator::new(target.clone())?;
    let mut psi = psi0.clone();
    let mut exact = psi0.clone();
    let mut report = KickReport::default();
    for (k, &dt) in schedule.durations.iter().enumerate() {
        let (h, theta) = match &schedule.plan {
            KickPlan::Fixed(hs) => (hs[k].clone(), None),
            KickPlan::Matched(m) => {
                let found = match_next_kick(&psi, target, m.family.as_ref(), m.interval, m.objective)?;
                (found.hamiltonian, Some(found.theta))
            }
        };
        h.space().check_same(&psi.space())?;
        let residual = eigenstate_residual(&h.sub(target)?, &psi)?;
        let commutator_norm = commutator_max_norm(&h, target)?;
        psi = Propagator::new(h)?.evolve(&psi, dt)?;
        exact = target_prop.evolve(&exact, dt)?;
        report.kicks.push(KickRecord {
            index: k,
            duration: dt,
            theta,
            residual,
            commutator_norm,
            running_fidelity: fidelity(&psi, &exact)?,
        });
    }
    Ok((psi, report))
}

/// Preconditions for [`connector_trotter`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectorTrotterOptions {
    /// Bound on `max|[O, H_T]| / (max|O| max|H_T|)`.
    pub commutator_tol: f64,
    /// Bound on the eigenstate residual of `psi0` against `O - H_T`.
    pub residual_tol: f64,
}

impl Default for ConnectorTrotterOptions {
    fn default() -> Self {
        ConnectorTrotterOptions {
            commutator_tol: 1e-10,
            residual_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConnectorTrotterResult {
    pub state: StateVector,
    /// Fidelity with exact evolution under the target.
    pub fidelity: f64,
    pub commutator_norm: f64,
    pub residual: f64,
}

/// Simulates `target` by evolving under a commuting surrogate `O` for
/// which `psi0` is an eigenstate of `O - target`. When `o_terms` is given,
/// `exp(-i t O)` is replaced by an `n`-step product formula over those terms,
/// which must sum to `O`.
pub fn connector_trotter(
    o: &Operator,
    target: &Operator,
    psi0: &StateVector,
    t: f64,
    n: usize,
    o_terms: Option<&[Operator]>,
    opts: &ConnectorTrotterOptions,
) -> Result<ConnectorTrotterResult> {
    o.space().check_same(&target.space())?;
    let scale = o.max_norm().max(f64::MIN_POSITIVE) * target.max_norm().max(f64::MIN_POSITIVE);
    let commutator_norm = commutator_max_norm(o, target)?;
    if commutator_norm > opts.commutator_tol * scale {
        return Err(Error::contract(format!(
            "surrogate does not commute with the target: max|[O, H_T]| = {commutator_norm:.3e}"
        )));
    }
    let residual = eigenstate_residual(&o.sub(target)?, psi0)?;
    if residual > opts.residual_tol {
        return Err(Error::contract(format!(
            "initial state is not an eigenstate of O - H_T: residual {residual:.3e} > {:.1e}",
            opts.residual_tol
        )));
    }
    let state = match o_terms {
        Some(terms) => {
            let refs: Vec<(f64, &Operator)> = terms.iter().map(|op| (1.0, op)).collect();
            let sum = crate::spin_algebra::op_combine_real(&refs)?;
            let gap = sum.sub(o)?.max_norm();
            if gap > 1e-12 * o.max_norm().max(1.0) {
                return Err(Error::contract(format!("surrogate terms do not sum to O (gap {gap:.3e})")));
            }
            trotter_evolve(terms, t, n, psi0)?
        }
        None => Propagator::new(o.clone())?.evolve(psi0, t)?,
    };
    let exact = Propagator::new(target.clone())?.evolve(psi0, t)?;
    Ok(ConnectorTrotterResult {
        fidelity: fidelity(&state, &exact)?,
        state,
        commutator_norm,
        residual,
    })
}
