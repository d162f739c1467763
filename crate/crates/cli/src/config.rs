//! Experiment configuration: flat `key = value` files with `#` comments.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use hamlink_core::hamiltonians::OddConstant;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Fig2,
    Fig3,
    Ghz,
    Kicks,
    Sweep,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Fig2 => "fig2",
            Experiment::Fig3 => "fig3",
            Experiment::Ghz => "ghz",
            Experiment::Kicks => "kicks",
            Experiment::Sweep => "sweep",
        }
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fig2" => Ok(Experiment::Fig2),
            "fig3" => Ok(Experiment::Fig3),
            "ghz" => Ok(Experiment::Ghz),
            "kicks" => Ok(Experiment::Kicks),
            "sweep" => Ok(Experiment::Sweep),
            other => Err(format!("unknown experiment '{other}'")),
        }
    }
}

/// Frame in which simulator states are compared with the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    Lab,
    /// Undo the collective precession of odd chains, `exp(i t (alpha/N) S_z)`.
    Rotating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KickPlanKind {
    /// Every kick uses the matched simulator.
    Fixed,
    /// Each kick's alpha is re-optimized from the current state.
    Matched,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KickState {
    /// The +x coherent state.
    Coherent,
    /// Lowest eigenstate of the matched simulator minus the target.
    Eigen,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Partition {
    Uniform,
    /// Random kick lengths drawn from `seed`.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Ratio,
    NSites,
    Chi,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Ratio => "ratio",
            SweepParam::NSites => "n_sites",
            SweepParam::Chi => "chi",
        }
    }
}

macro_rules! name_enum {
    ($ty:ty, $($variant:path => $s:literal),+ $(,)?) => {
        impl FromStr for $ty {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($s => Ok($variant),)+
                    other => Err(format!("unexpected value '{other}' (expected one of: {})", [$($s),+].join(", "))),
                }
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($variant => $s,)+ })
            }
        }
    };
}

name_enum!(Frame, Frame::Lab => "lab", Frame::Rotating => "rotating");
name_enum!(Spacing, Spacing::Linear => "linear", Spacing::Log => "log");
name_enum!(KickPlanKind, KickPlanKind::Fixed => "fixed", KickPlanKind::Matched => "matched");
name_enum!(KickState, KickState::Coherent => "coherent", KickState::Eigen => "eigen");
name_enum!(Partition, Partition::Uniform => "uniform", Partition::Random => "random");
name_enum!(SweepParam, SweepParam::Ratio => "ratio", SweepParam::NSites => "n_sites", SweepParam::Chi => "chi");

/// Fully resolved settings for one run. Times are in units of `chi t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n_sites: usize,
    pub chi: f64,
    /// `beta / alpha`, used unless both `alpha` and `beta` are set.
    pub ratio: f64,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub odd_constant: OddConstant,
    pub time_max: f64,
    pub time_samples: usize,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub ratio_samples: usize,
    pub ratio_spacing: Spacing,
    /// Explicit ratio axis, overriding the min/max/samples grid.
    pub ratios: Option<Vec<f64>>,
    pub frame: Frame,
    pub output_dir: PathBuf,
    pub seed: u64,
    /// Worker threads; 0 lets the pool decide.
    pub threads: usize,
    pub ghz_sites: Vec<usize>,
    pub ghz_chi_t: f64,
    pub kick_count: usize,
    pub kick_time: f64,
    pub kick_plan: KickPlanKind,
    pub kick_state: KickState,
    pub kick_partition: Partition,
    pub sweep_param: SweepParam,
    pub sweep_values: Option<Vec<f64>>,
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
        ExperimentConfig {
            experiment,
            n_sites: match experiment {
                Experiment::Fig2 => 5,
                _ => 6,
            },
            chi: 1.0,
            ratio: 40.0,
            alpha: None,
            beta: None,
            odd_constant: OddConstant::default(),
            time_max: PI,
            time_samples: 200,
            ratio_min: 2.0,
            ratio_max: 80.0,
            ratio_samples: 24,
            ratio_spacing: Spacing::Log,
            ratios: None,
            frame: Frame::Lab,
            output_dir: PathBuf::from("."),
            seed: 0,
            threads: 0,
            ghz_sites: vec![2, 3, 4, 5, 6],
            ghz_chi_t: FRAC_PI_2,
            kick_count: 8,
            kick_time: FRAC_PI_4,
            kick_plan: KickPlanKind::Fixed,
            kick_state: KickState::Coherent,
            kick_partition: Partition::Uniform,
            sweep_param: SweepParam::Ratio,
            sweep_values: None,
        }
    }

    /// Applies the lines of a config file. Later keys win.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        self.apply_text(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), String> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected 'key = value'", lineno + 1))?;
            self.set(key.trim(), value.trim())
                .map_err(|e| format!("line {}: {e}", lineno + 1))?;
        }
        Ok(())
    }

    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, String>
        where
            T::Err: fmt::Display,
        {
            value.parse().map_err(|e| format!("{key}: {e}"))
        }
        let real = |v: &str| parse_real(v).map_err(|e| format!("{key}: {e}"));
        let list = |v: &str| -> Result<Vec<f64>, String> {
            v.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| parse_real(s).map_err(|e| format!("{key}: {e}")))
                .collect()
        };
        match key {
            "experiment" => {
                let exp: Experiment = parse(key, value)?;
                if exp != self.experiment {
                    return Err(format!("config is for '{}', running '{}'", exp.name(), self.experiment.name()));
                }
            }
            "n_sites" => self.n_sites = parse(key, value)?,
            "chi" => self.chi = real(value)?,
            "ratio" => self.ratio = real(value)?,
            "alpha" => self.alpha = Some(real(value)?),
            "beta" => self.beta = Some(real(value)?),
            "odd_constant" => self.odd_constant = parse(key, value)?,
            "time_max" => self.time_max = real(value)?,
            "time_samples" => self.time_samples = parse(key, value)?,
            "ratio_min" => self.ratio_min = real(value)?,
            "ratio_max" => self.ratio_max = real(value)?,
            "ratio_samples" => self.ratio_samples = parse(key, value)?,
            "ratio_spacing" => self.ratio_spacing = parse(key, value)?,
            "ratios" => self.ratios = Some(list(value)?),
            "frame" => self.frame = parse(key, value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "seed" => self.seed = parse(key, value)?,
            "threads" => self.threads = parse(key, value)?,
            "ghz_sites" => {
                self.ghz_sites = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| parse(key, s))
                    .collect::<Result<_, _>>()?
            }
            "ghz_chi_t" => self.ghz_chi_t = real(value)?,
            "kick_count" => self.kick_count = parse(key, value)?,
            "kick_time" => self.kick_time = real(value)?,
            "kick_plan" => self.kick_plan = parse(key, value)?,
            "kick_state" => self.kick_state = parse(key, value)?,
            "kick_partition" => self.kick_partition = parse(key, value)?,
            "sweep_param" => self.sweep_param = parse(key, value)?,
            "sweep_values" => self.sweep_values = Some(list(value)?),
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |msg: String| Err(CliError::Config(msg));
        if self.n_sites < 2 || self.n_sites > 14 {
            return fail(format!("n_sites must be in 2..=14, got {}", self.n_sites));
        }
        for (name, v) in [("chi", self.chi), ("ratio", self.ratio), ("time_max", self.time_max)] {
            if !(v > 0.0 && v.is_finite()) {
                return fail(format!("{name} must be finite and > 0, got {v}"));
            }
        }
        match (self.alpha, self.beta) {
            (Some(a), Some(b)) => {
                if !(a >= 0.0 && b >= 0.0 && a.is_finite() && b.is_finite()) {
                    return fail(format!("alpha and beta must be finite and >= 0, got {a}, {b}"));
                }
            }
            (None, None) => {}
            _ => return fail("alpha and beta must be given together".into()),
        }
        if self.time_samples < 2 {
            return fail(format!("time_samples must be >= 2, got {}", self.time_samples));
        }
        let ratios = self.ratio_axis();
        let ratio_axis_used = self.experiment == Experiment::Fig3
            || (self.experiment == Experiment::Sweep && self.sweep_param == SweepParam::Ratio);
        if ratio_axis_used && ratios.len() < 2 {
            return fail("the ratio axis needs at least 2 values".into());
        }
        if ratios.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return fail("ratio axis values must be finite and > 0".into());
        }
        if self.ratio_spacing == Spacing::Log && self.ratios.is_none() && self.ratio_min <= 0.0 {
            return fail("log-spaced ratio grid needs ratio_min > 0".into());
        }
        if self.experiment == Experiment::Ghz {
            if self.ghz_sites.is_empty() || self.ghz_sites.iter().any(|&n| !(2..=14).contains(&n)) {
                return fail("ghz_sites must list chain lengths in 2..=14".into());
            }
            if !(self.ghz_chi_t >= 0.0 && self.ghz_chi_t.is_finite()) {
                return fail(format!("ghz_chi_t must be finite and >= 0, got {}", self.ghz_chi_t));
            }
        }
        if self.experiment == Experiment::Kicks {
            if self.kick_count == 0 {
                return fail("kick_count must be >= 1".into());
            }
            if !(self.kick_time > 0.0 && self.kick_time.is_finite()) {
                return fail(format!("kick_time must be finite and > 0, got {}", self.kick_time));
            }
        }
        if self.experiment == Experiment::Sweep {
            let values = self.sweep_axis();
            if values.len() < 2 {
                return fail("the sweep axis needs at least 2 values".into());
            }
            let ok = match self.sweep_param {
                SweepParam::NSites => values.iter().all(|v| v.fract() == 0.0 && (2.0..=14.0).contains(v)),
                _ => values.iter().all(|v| *v > 0.0 && v.is_finite()),
            };
            if !ok {
                return fail(format!("invalid {} sweep values {values:?}", self.sweep_param.name()));
            }
        }
        Ok(())
    }

    /// Time grid in `chi t` units.
    pub fn chi_t_grid(&self) -> Vec<f64> {
        hamlink_core::evolution::uniform_grid(0.0, self.time_max, self.time_samples)
    }

    pub fn ratio_axis(&self) -> Vec<f64> {
        if let Some(r) = &self.ratios {
            return r.clone();
        }
        let n = self.ratio_samples;
        match self.ratio_spacing {
            Spacing::Linear => hamlink_core::evolution::uniform_grid(self.ratio_min, self.ratio_max, n),
            Spacing::Log => hamlink_core::evolution::uniform_grid(self.ratio_min.ln(), self.ratio_max.ln(), n)
                .into_iter()
                .map(f64::exp)
                .collect(),
        }
    }

    pub fn sweep_axis(&self) -> Vec<f64> {
        if let Some(v) = &self.sweep_values {
            return v.clone();
        }
        match self.sweep_param {
            SweepParam::Ratio => self.ratio_axis(),
            SweepParam::NSites => (2..=8).map(f64::from).collect(),
            SweepParam::Chi => vec![0.5, 1.0, 2.0],
        }
    }

    /// The resolved configuration as `key=value` pairs, in a fixed order.
    pub fn key_values(&self) -> Vec<(&'static str, String)> {
        let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        vec![
            ("experiment", self.experiment.name().to_string()),
            ("n_sites", self.n_sites.to_string()),
            ("chi", self.chi.to_string()),
            ("ratio", self.ratio.to_string()),
            ("alpha", opt(self.alpha)),
            ("beta", opt(self.beta)),
            ("odd_constant", self.odd_constant.to_string()),
            ("time_max", self.time_max.to_string()),
            ("time_samples", self.time_samples.to_string()),
            ("ratio_min", self.ratio_min.to_string()),
            ("ratio_max", self.ratio_max.to_string()),
            ("ratio_samples", self.ratio_samples.to_string()),
            ("ratio_spacing", self.ratio_spacing.to_string()),
            ("ratios", self.ratios.as_deref().map(join).unwrap_or_default()),
            ("frame", self.frame.to_string()),
            ("seed", self.seed.to_string()),
            (
                "ghz_sites",
                self.ghz_sites.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
            ),
            ("ghz_chi_t", self.ghz_chi_t.to_string()),
            ("kick_count", self.kick_count.to_string()),
            ("kick_time", self.kick_time.to_string()),
            ("kick_plan", self.kick_plan.to_string()),
            ("kick_state", self.kick_state.to_string()),
            ("kick_partition", self.kick_partition.to_string()),
            ("sweep_param", self.sweep_param.to_string()),
            ("sweep_values", self.sweep_values.as_deref().map(join).unwrap_or_default()),
        ]
    }

    /// One-line summary used as the CSV comment. Thread count and output
    /// directory are left out so that outputs do not depend on them.
    pub fn comment(&self) -> String {
        let pairs: Vec<String> = self.key_values().into_iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("hamlink {}", pairs.join(" "))
    }
}

/// Parses a real number, also accepting multiples and fractions of `pi`
/// such as `pi`, `pi/2`, `3pi/4` or `0.5*pi`.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let bad = || format!("cannot parse '{s}' as a number");
    let lower = s.to_ascii_lowercase();
    let (num, den) = match lower.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim().parse::<f64>().map_err(|_| bad())?),
        None => (lower.as_str(), 1.0),
    };
    let coef = num.strip_suffix("pi").ok_or_else(bad)?.trim().trim_end_matches('*').trim();
    let coef = match coef {
        "" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(coef * std::f64::consts::PI / den)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn parses_pi_expressions() {
        assert_eq!(parse_real("2.5").unwrap(), 2.5);
        assert_eq!(parse_real("pi").unwrap(), PI);
        assert_eq!(parse_real("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_real("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_real("0.5*pi").unwrap(), 0.5 * PI);
        assert_eq!(parse_real("-pi").unwrap(), -PI);
        assert!(parse_real("tau").is_err());
        assert!(parse_real("pi/x").is_err());
    }

    #[test]
    fn file_text_overrides_defaults() {
        let mut cfg = ExperimentConfig::defaults(Experiment::Fig3);
        cfg.apply_text("# panel b\nn_sites = 5   # odd\nframe=rotating\n\nratios = 5, 10,40\n").unwrap();
        assert_eq!(cfg.n_sites, 5);
        assert_eq!(cfg.frame, Frame::Rotating);
        assert_eq!(cfg.ratio_axis(), vec![5.0, 10.0, 40.0]);
        assert!(cfg.apply_text("bogus = 1").unwrap_err().contains("unknown key"));
        assert!(cfg.apply_text("n_sites 5").unwrap_err().contains("line 1"));
        assert!(cfg.apply_text("experiment = fig2").is_err());
    }

    #[test]
    fn default_ratio_grid() {
        let cfg = ExperimentConfig::defaults(Experiment::Fig3);
        let r = cfg.ratio_axis();
        assert_eq!(r.len(), 24);
        assert!((r[0] - 2.0).abs() < 1e-12 && (r[23] - 80.0).abs() < 1e-9);
        assert!((r[1] / r[0] - r[23] / r[22]).abs() < 1e-9);
    }

    #[test]
    fn validation() {
        let mut cfg = ExperimentConfig::defaults(Experiment::Fig2);
        assert!(cfg.validate().is_ok());
        cfg.time_samples = 1;
        assert!(cfg.validate().is_err());
        cfg.time_samples = 2;
        cfg.alpha = Some(1.0);
        assert!(cfg.validate().is_err());
        let mut sweep = ExperimentConfig::defaults(Experiment::Sweep);
        sweep.sweep_param = SweepParam::NSites;
        sweep.sweep_values = Some(vec![2.0, 3.5]);
        assert!(sweep.validate().is_err());
    }

    #[test]
    fn comment_round_trips_through_text() {
        let mut cfg = ExperimentConfig::defaults(Experiment::Kicks);
        cfg.apply_text("chi = 0.7\nkick_plan = matched\nratios = 3,4\nodd_constant = 1.299").unwrap();
        let text: String = cfg
            .key_values()
            .into_iter()
            .filter(|(_, v)| !v.is_empty())
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect();
        let mut back = ExperimentConfig::defaults(Experiment::Kicks);
        back.apply_text(&text).unwrap();
        assert_eq!(back, cfg);
    }
}
