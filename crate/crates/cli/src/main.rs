use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use szego_lab::config::{self, parse_complex, parse_s_list, set, FileConfig, Format, Mode, RunConfig};
use szego_lab::presets;
use szego_lab::sweep::{sweep, Axis};
use szego_lab::{CliError, Result, CONFIG_ERROR};

/// Numerical laboratory for the alpha-Szego equation.
///
/// Exit codes: 0 success, 1 config error, 2 numerical abort, 3 verification
/// failure.
#[derive(Debug, Parser)]
#[command(name = "szego-lab", version, allow_negative_numbers = true)]
struct Args {
    /// Key-value config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Start from a named scenario (see --list-presets).
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    list_presets: bool,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Constant term of b + cz/(1 - pz), as re,im.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    b: Option<[f64; 2]>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    c: Option<[f64; 2]>,
    /// Pole parameter, |p| < 1.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    p: Option<[f64; 2]>,
    /// Number of Fourier modes.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    /// Final time; negative integrates backwards.
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    sample_every: Option<f64>,
    /// Step-doubling RK4; `--adaptive false` forces fixed steps.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    adaptive: Option<bool>,
    #[arg(long)]
    adapt_tol: Option<f64>,
    /// Comma-separated Sobolev indices.
    #[arg(long, value_parser = parse_s_list)]
    s_list: Option<Vec<f64>>,
    /// Section size for the K_u^2 spectrum in full runs.
    #[arg(long)]
    section: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Grid axis `key=v1,v2,...`; repeat for a product grid.
    #[arg(long)]
    sweep: Vec<Axis>,
    /// Random symbols per check in verify mode.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn resolve(args: &Args) -> Result<RunConfig> {
    let file = args.config.as_deref().map(FileConfig::load).transpose()?;
    let preset_name = args
        .preset
        .clone()
        .or_else(|| file.as_ref().and_then(|f| f.run.preset.clone()));
    let mut cfg = match preset_name {
        Some(name) => presets::find(&name)
            .ok_or_else(|| {
                let known: Vec<&str> = presets::presets().iter().map(|p| p.name).collect();
                CliError::Config(format!("unknown preset {name:?}; known: {}", known.join(", ")))
            })?
            .config(),
        None => RunConfig::default(),
    };
    if let Some(file) = &file {
        file.apply(&mut cfg)?;
    }
    set(&mut cfg.mode, args.mode);
    set(&mut cfg.alpha, args.alpha);
    config::override_rational(&mut cfg, args.b, args.c, args.p);
    set(&mut cfg.n, args.n);
    set(&mut cfg.dt, args.dt);
    set(&mut cfg.t_end, args.t_end);
    set(&mut cfg.sample_every, args.sample_every);
    set(&mut cfg.adaptive, args.adaptive);
    set(&mut cfg.adapt_tol, args.adapt_tol);
    set(&mut cfg.s_list, args.s_list.clone());
    if args.section.is_some() {
        cfg.spectral_section = args.section;
    }
    set(&mut cfg.out, args.out.clone());
    set(&mut cfg.format, args.format);
    set(&mut cfg.trials, args.trials);
    set(&mut cfg.seed, args.seed);
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.list_presets {
        for p in presets::presets() {
            println!("{:<18} {}", p.name, p.description);
        }
        return ExitCode::SUCCESS;
    }
    let result = resolve(&args).and_then(|cfg| {
        if args.sweep.is_empty() {
            let report = szego_lab::run::run(&cfg)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            println!("{} {}", cfg.out.display(), report.content_hash);
            Ok(report.status.exit_code())
        } else {
            sweep(&cfg, &args.sweep)
        }
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(CONFIG_ERROR)
        }
    }
}
