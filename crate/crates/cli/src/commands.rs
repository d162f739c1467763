//! The experiments behind each subcommand. Each `*_data` function computes
//! results in memory; [`run`] writes them as CSV plus, where useful, an SVG
//! rendered from that CSV.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use hamlink_core::dense::HermitianEigen;
use hamlink_core::digital::{run_kicks, AlphaFamily, KickPlan, KickReport, KickSchedule, MatchObjective, Matcher};
use hamlink_core::evolution::{Propagator, Trajectory};
use hamlink_core::hamiltonians::{
    analog_simulator, build_oat, HamiltonianKind, HamiltonianSpec, MatchingRule, SpinChainParams,
};
use hamlink_core::io::{fmt_float, CsvTable};
use hamlink_core::observables::{expect, fidelity, reconstruct_sx, rotating_frame, GhzConvention, ReconstructionRecord};
use hamlink_core::{coherent_x_state, collective_spin, Axis, HilbertSpace, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::config::{Experiment, ExperimentConfig, Frame, KickPlanKind, KickState, Partition, SweepParam};
use crate::error::CliError;
use crate::render;

/// Files written and log lines produced by one run.
#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub log: Vec<String>,
}

pub fn thread_pool(threads: usize) -> Result<ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Numeric(format!("cannot start worker threads: {e}")))
}

/// Simulator parameters for `n` sites: explicit `alpha`/`beta` when both
/// are configured, otherwise the matched pair for `ratio`.
pub fn chain_params(cfg: &ExperimentConfig, n: usize, chi: f64, ratio: f64) -> Result<SpinChainParams, CliError> {
    let params = match (cfg.alpha, cfg.beta) {
        (Some(alpha), Some(beta)) => SpinChainParams::new(n, chi, beta, alpha),
        _ => SpinChainParams::matched(n, chi, ratio, &MatchingRule::with_odd(cfg.odd_constant))?,
    };
    params.validate()?;
    Ok(params)
}

/// Collective precession frequency of the simulator: the staggered field
/// leaves a net `alpha/N` rotation about `z` on odd chains only.
pub fn frame_frequency(n_sites: usize, alpha: f64) -> f64 {
    if !n_sites.is_multiple_of(2) {
        alpha / n_sites as f64
    } else {
        0.0
    }
}

fn frame_omega(frame: Frame, params: &SpinChainParams) -> f64 {
    match frame {
        Frame::Lab => 0.0,
        Frame::Rotating => frame_frequency(params.n_sites, params.alpha),
    }
}

/// Fidelity between simulator and twisting evolution of the +x coherent
/// state at each `chi t` in `chi_t`.
pub fn fidelity_series(params: &SpinChainParams, frame: Frame, chi_t: &[f64]) -> Result<Vec<f64>, CliError> {
    let space = params.space()?;
    let psi0 = coherent_x_state(space);
    let times: Vec<f64> = chi_t.iter().map(|x| x / params.chi).collect();
    let sim = Propagator::new(analog_simulator(params)?)?.evolve_many(&psi0, &times)?;
    let oat = Propagator::new(build_oat(params)?)?.evolve_many(&psi0, &times)?;
    let omega = frame_omega(frame, params);
    sim.iter()
        .zip(&oat)
        .zip(&times)
        .map(|((s, o), &t)| Ok(fidelity(&rotating_frame(s, t, omega), o)?))
        .collect()
}

pub fn fig2_data(cfg: &ExperimentConfig) -> Result<ReconstructionRecord, CliError> {
    let params = chain_params(cfg, cfg.n_sites, cfg.chi, cfg.ratio)?;
    let space = params.space()?;
    let psi0 = coherent_x_state(space);
    let chi_t = cfg.chi_t_grid();
    let times: Vec<f64> = chi_t.iter().map(|x| x / cfg.chi).collect();
    let sx = collective_spin(Axis::X, space);
    let sy = collective_spin(Axis::Y, space);
    let omega = frame_omega(cfg.frame, &params);
    let sim = Propagator::new(analog_simulator(&params)?)?.evolve_many(&psi0, &times)?;
    let records = sim
        .iter()
        .zip(&times)
        .map(|(psi, &t)| {
            let psi = rotating_frame(psi, t, omega);
            Ok(vec![expect(&sx, &psi)?, expect(&sy, &psi)?])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let traj = Trajectory::from_records(chi_t, vec!["Sx".into(), "Sy".into()], records)?;
    let mut record = reconstruct_sx(&traj)?;
    let direct = Propagator::new(build_oat(&params)?)?
        .evolve_many(&psi0, &times)?
        .iter()
        .map(|psi| expect(&sx, psi))
        .collect::<Result<Vec<_>, _>>()?;
    record.set_direct(direct)?;
    Ok(record)
}

/// Fidelity landscape over `chi t` and `beta / alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapGrid {
    pub chi_t: Vec<f64>,
    pub ratios: Vec<f64>,
    /// `fidelity[j][i]` at `ratios[j]`, `chi_t[i]`.
    pub fidelity: Vec<Vec<f64>>,
}

impl HeatmapGrid {
    pub fn check(&self) -> Result<(), CliError> {
        if self.fidelity.len() != self.ratios.len() || self.fidelity.iter().any(|r| r.len() != self.chi_t.len()) {
            return Err(CliError::Numeric("heatmap shape does not match its axes".into()));
        }
        if let Some(bad) = self.fidelity.iter().flatten().find(|z| !(**z >= 0.0 && **z <= 1.0 + 1e-10)) {
            return Err(CliError::Numeric(format!("fidelity {bad} outside [0, 1]")));
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        let n = (self.ratios.len() * self.chi_t.len()) as f64;
        self.fidelity.iter().flatten().sum::<f64>() / n
    }

    pub fn row(&self, ratio: f64) -> Option<&[f64]> {
        let j = self.ratios.iter().position(|r| *r == ratio)?;
        Some(&self.fidelity[j])
    }
}

impl CsvTable for HeatmapGrid {
    fn header(&self) -> Vec<&'static str> {
        vec!["chi_t", "ratio", "fidelity"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let mut rows = Vec::with_capacity(self.ratios.len() * self.chi_t.len());
        for (j, ratio) in self.ratios.iter().enumerate() {
            for (i, x) in self.chi_t.iter().enumerate() {
                rows.push(vec![fmt_float(*x), fmt_float(*ratio), fmt_float(self.fidelity[j][i])]);
            }
        }
        rows
    }
}

pub fn fig3_data(cfg: &ExperimentConfig, pool: &ThreadPool) -> Result<HeatmapGrid, CliError> {
    let chi_t = cfg.chi_t_grid();
    let ratios = cfg.ratio_axis();
    let fidelity = pool.install(|| {
        ratios
            .par_iter()
            .map(|&ratio| {
                let params = chain_params(cfg, cfg.n_sites, cfg.chi, ratio)?;
                fidelity_series(&params, cfg.frame, &chi_t)
            })
            .collect::<Result<Vec<_>, CliError>>()
    })?;
    let grid = HeatmapGrid { chi_t, ratios, fidelity };
    grid.check()?;
    Ok(grid)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GhzRow {
    pub n_sites: usize,
    pub chi_t: f64,
    pub simulator: f64,
    pub twisting: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GhzTable {
    pub rows: Vec<GhzRow>,
}

impl CsvTable for GhzTable {
    fn header(&self) -> Vec<&'static str> {
        vec!["N", "chi_t", "ghz_fidelity_xxx", "ghz_fidelity_oat"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| vec![r.n_sites.to_string(), fmt_float(r.chi_t), fmt_float(r.simulator), fmt_float(r.twisting)])
            .collect()
    }
}

/// GHZ fidelity after `ghz_chi_t` of twisting, directly and through the
/// simulator. Simulator states are always compared in the frame that
/// removes their collective precession.
pub fn ghz_data(cfg: &ExperimentConfig, pool: &ThreadPool) -> Result<GhzTable, CliError> {
    let rows = pool.install(|| {
        cfg.ghz_sites
            .par_iter()
            .map(|&n| {
                let params = chain_params(cfg, n, cfg.chi, cfg.ratio)?;
                let psi0 = coherent_x_state(params.space()?);
                let t = cfg.ghz_chi_t / cfg.chi;
                let conv = GhzConvention::for_twisting(n);
                let oat = Propagator::new(build_oat(&params)?)?.evolve(&psi0, t)?;
                let sim = Propagator::new(analog_simulator(&params)?)?.evolve(&psi0, t)?;
                let sim = rotating_frame(&sim, t, frame_frequency(n, params.alpha));
                Ok(GhzRow {
                    n_sites: n,
                    chi_t: cfg.ghz_chi_t,
                    simulator: conv.fidelity(&sim),
                    twisting: conv.fidelity(&oat),
                })
            })
            .collect::<Result<Vec<_>, CliError>>()
    })?;
    Ok(GhzTable { rows })
}

fn kick_durations(cfg: &ExperimentConfig, total: f64) -> Vec<f64> {
    let n = cfg.kick_count;
    let raw: Vec<f64> = match cfg.kick_partition {
        Partition::Uniform => vec![1.0; n],
        Partition::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            (0..n).map(|_| rng.random_range(0.5..1.5)).collect()
        }
    };
    let scale = total / raw.iter().sum::<f64>();
    let mut durations: Vec<f64> = raw.iter().map(|d| d * scale).collect();
    let head: f64 = durations[..n - 1].iter().sum();
    durations[n - 1] = total - head;
    durations
}

/// Kicks of the matched simulator toward twisting for `kick_time`.
pub fn kicks_data(cfg: &ExperimentConfig) -> Result<KickReport, CliError> {
    let params = chain_params(cfg, cfg.n_sites, cfg.chi, cfg.ratio)?;
    let space = params.space()?;
    let target = build_oat(&params)?;
    let sim = analog_simulator(&params)?;
    let psi0 = match cfg.kick_state {
        KickState::Coherent => coherent_x_state(space),
        KickState::Eigen => lowest_eigenstate(space, &sim.sub(&target)?)?,
    };
    let total = cfg.kick_time / cfg.chi;
    let durations = kick_durations(cfg, total);
    let plan = match cfg.kick_plan {
        KickPlanKind::Fixed => KickPlan::Fixed(vec![sim; cfg.kick_count]),
        KickPlanKind::Matched => KickPlan::Matched(Matcher {
            family: Arc::new(AlphaFamily {
                base: HamiltonianSpec::new(HamiltonianKind::AnalogSimulator, params),
            }),
            interval: (0.8 * params.alpha, 1.2 * params.alpha),
            objective: MatchObjective::KickInfidelity {
                duration: total / cfg.kick_count as f64,
            },
        }),
    };
    let schedule = KickSchedule::new(target, durations, plan, total)?;
    Ok(run_kicks(&schedule, &psi0)?.1)
}

fn lowest_eigenstate(space: HilbertSpace, h: &hamlink_core::Operator) -> Result<StateVector, CliError> {
    let eig = HermitianEigen::of_operator(h)?;
    Ok(StateVector::new(space, eig.vector(0))?)
}

/// Long-format fidelity table over one swept parameter and `chi t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub param: SweepParam,
    pub values: Vec<f64>,
    pub chi_t: Vec<f64>,
    /// `fidelity[j][i]` at `values[j]`, `chi_t[i]`.
    pub fidelity: Vec<Vec<f64>>,
}

impl CsvTable for SweepTable {
    fn header(&self) -> Vec<&'static str> {
        vec![self.param.name(), "chi_t", "fidelity"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let mut rows = Vec::new();
        for (j, v) in self.values.iter().enumerate() {
            let value = match self.param {
                SweepParam::NSites => format!("{v}"),
                _ => fmt_float(*v),
            };
            for (i, x) in self.chi_t.iter().enumerate() {
                rows.push(vec![value.clone(), fmt_float(*x), fmt_float(self.fidelity[j][i])]);
            }
        }
        rows
    }
}

pub fn sweep_data(cfg: &ExperimentConfig, pool: &ThreadPool) -> Result<SweepTable, CliError> {
    let chi_t = cfg.chi_t_grid();
    let values = cfg.sweep_axis();
    let fidelity = pool.install(|| {
        values
            .par_iter()
            .map(|&v| {
                let (n, chi, ratio) = match cfg.sweep_param {
                    SweepParam::Ratio => (cfg.n_sites, cfg.chi, v),
                    SweepParam::NSites => (v as usize, cfg.chi, cfg.ratio),
                    SweepParam::Chi => (cfg.n_sites, v, cfg.ratio),
                };
                fidelity_series(&chain_params(cfg, n, chi, ratio)?, cfg.frame, &chi_t)
            })
            .collect::<Result<Vec<_>, CliError>>()
    })?;
    Ok(SweepTable {
        param: cfg.sweep_param,
        values,
        chi_t,
        fidelity,
    })
}

fn write(path: &Path, contents: &str, out: &mut RunOutput) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))?;
    out.files.push(path.to_path_buf());
    Ok(())
}

fn render_err(e: String) -> CliError {
    CliError::Numeric(format!("rendering failed: {e}"))
}

/// Runs the configured experiment and writes its files.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    cfg.validate()?;
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let pool = thread_pool(cfg.threads)?;
    let comment = cfg.comment();
    let mut out = RunOutput::default();
    match cfg.experiment {
        Experiment::Fig2 => {
            let record = fig2_data(cfg)?;
            let csv = record.to_csv_string(Some(&comment));
            write(&dir.join("fig2.csv"), &csv, &mut out)?;
            let svg = render::line_plot(
                &csv,
                "t",
                &["sx_qs", "sy_qs", "sx_reconstructed", "sx_direct"],
                &format!("Sx reconstruction, N = {}", cfg.n_sites),
                "spin expectation",
            )
            .map_err(render_err)?;
            write(&dir.join("fig2.svg"), &svg, &mut out)?;
            let dev = record.max_deviation().unwrap_or(f64::NAN);
            let bound = 0.05 * cfg.n_sites as f64 / 2.0;
            out.log.push(format!("max |sx_reconstructed - sx_direct| = {dev:.6e} (bound {bound})"));
        }
        Experiment::Fig3 => {
            let grid = fig3_data(cfg, &pool)?;
            let csv = grid.to_csv_string(Some(&comment));
            let stem = format!("fig3_n{}_{}", cfg.n_sites, cfg.frame);
            write(&dir.join(format!("{stem}.csv")), &csv, &mut out)?;
            let title = format!("Fidelity, N = {}, {} frame", cfg.n_sites, cfg.frame);
            let svg = render::heatmap(&csv, "chi_t", "ratio", "fidelity", &title).map_err(render_err)?;
            write(&dir.join(format!("{stem}.svg")), &svg, &mut out)?;
            out.log.push(format!("grid mean fidelity = {:.6}", grid.mean()));
        }
        Experiment::Ghz => {
            let table = ghz_data(cfg, &pool)?;
            let note = format!(
                "{comment}\nGHZ basis x; odd N pre-rotated by exp(i pi/2 S_z); simulator states in the frame omega = alpha/N (odd N)"
            );
            write(&dir.join("ghz.csv"), &table.to_csv_string(Some(&note)), &mut out)?;
            for r in &table.rows {
                out.log.push(format!(
                    "N = {}: ghz fidelity simulator {:.9}, twisting {:.12}",
                    r.n_sites, r.simulator, r.twisting
                ));
            }
        }
        Experiment::Kicks => {
            let report = kicks_data(cfg)?;
            write(&dir.join("kicks.csv"), &report.to_csv_string(Some(&comment)), &mut out)?;
            out.log.push(format!(
                "{} kicks, final running fidelity = {:.12}",
                report.kicks.len(),
                report.final_fidelity().unwrap_or(f64::NAN)
            ));
        }
        Experiment::Sweep => {
            let table = sweep_data(cfg, &pool)?;
            let csv = table.to_csv_string(Some(&comment));
            let stem = format!("sweep_{}", table.param.name());
            write(&dir.join(format!("{stem}.csv")), &csv, &mut out)?;
            let title = format!("Fidelity sweep over {}", table.param.name());
            let svg = render::heatmap(&csv, "chi_t", table.param.name(), "fidelity", &title).map_err(render_err)?;
            write(&dir.join(format!("{stem}.svg")), &svg, &mut out)?;
            for (v, row) in table.values.iter().zip(&table.fidelity) {
                let mean = row.iter().sum::<f64>() / row.len() as f64;
                out.log.push(format!("{} = {v}: mean fidelity {mean:.6}", table.param.name()));
            }
        }
    }
    Ok(out)
}
