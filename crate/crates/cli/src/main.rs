use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hamlink::{resolve_config, run, CliError, Experiment};

#[derive(Parser)]
#[command(name = "hamlink", version, about = "Spin-chain simulations of one-axis twisting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reconstruct the twisting Sx curve from simulator Sx and Sy.
    Fig2(Common),
    /// Fidelity landscape over time and beta/alpha.
    Fig3(Common),
    /// GHZ fidelity at chi t = pi/2 for several chain lengths.
    Ghz(Common),
    /// Run a schedule of quantum kicks.
    Kicks(Common),
    /// Fidelity over time for one swept parameter.
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// Config file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n_sites: Option<usize>,
    #[arg(long)]
    chi: Option<String>,
    /// beta / alpha.
    #[arg(long)]
    ratio: Option<String>,
    /// lab or rotating.
    #[arg(long)]
    frame: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Any other config key, e.g. `--set time_samples=50`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Common {
    fn overrides(&self) -> Result<Vec<(String, String)>, CliError> {
        let mut kv = Vec::new();
        for item in &self.set {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("--set expects KEY=VALUE, got '{item}'")))?;
            kv.push((k.trim().to_string(), v.trim().to_string()));
        }
        let flags = [
            ("n_sites", self.n_sites.map(|n| n.to_string())),
            ("chi", self.chi.clone()),
            ("ratio", self.ratio.clone()),
            ("frame", self.frame.clone()),
            ("output_dir", self.out.as_ref().map(|p| p.display().to_string())),
            ("threads", self.threads.map(|n| n.to_string())),
        ];
        kv.extend(flags.into_iter().filter_map(|(k, v)| v.map(|v| (k.to_string(), v))));
        Ok(kv)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, common) = match &cli.command {
        Command::Fig2(c) => (Experiment::Fig2, c),
        Command::Fig3(c) => (Experiment::Fig3, c),
        Command::Ghz(c) => (Experiment::Ghz, c),
        Command::Kicks(c) => (Experiment::Kicks, c),
        Command::Sweep(c) => (Experiment::Sweep, c),
    };
    let result = common
        .overrides()
        .and_then(|kv| resolve_config(experiment, common.config.as_deref(), &kv))
        .and_then(|cfg| {
            println!("# {}", cfg.comment());
            run(&cfg)
        });
    match result {
        Ok(out) => {
            for line in &out.log {
                println!("{line}");
            }
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("hamlink: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
