mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cocycle_core::diophantine::NamedFrequency;
use cocycle_core::experiments::{self as ex, Report, Setup};
use cocycle_core::operator::Fault;
use cocycle_core::potential::builtin_catalog;
use cocycle_core::report::Table;
use cocycle_core::verify::{run_suite, Suite, DEFAULT_SEED};
use cocycle_core::{Error, TorusPoint};

use config::{Config, ConfigError, ExperimentKind, Format, L0Spec};

#[derive(Parser)]
#[command(name = "cocycle-lab", version, about = "Numerical experiments on quasi-periodic Schrödinger cocycles")]
struct Cli {
    /// Worker threads (defaults to all cores). Results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML (or JSON) configuration.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; overrides `output.dir`.
        #[arg(long, env = "COCYCLE_LAB_OUT")]
        out: Option<PathBuf>,
    },
    /// Run a verification suite: identities, statistics or all.
    Verify {
        suite: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, env = "COCYCLE_LAB_OUT")]
        out: Option<PathBuf>,
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
    },
    /// List builtin potentials and named frequencies.
    List,
}

enum Failure {
    Config(String),
    Numeric(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numeric(_) => 3,
            Failure::Io(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Numeric(m) | Failure::Io(m) => m,
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let m = e.to_string();
        match e {
            Error::Domain(_) | Error::Format(_) => Failure::Config(m),
            Error::Singular(_) | Error::NoConvergence(_) => Failure::Numeric(m),
            _ => Failure::Io(m),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("cannot start {w} workers: {e}");
            return ExitCode::from(1);
        }
    }
    match cli.command {
        Command::Run { config, seed, out } => finish(run(&config, seed, out.as_deref())),
        Command::Verify { suite, seed, out, inject_fault } => finish(verify(&suite, seed, out.as_deref(), inject_fault)),
        Command::List => {
            list();
            ExitCode::SUCCESS
        }
    }
}

fn finish(r: Result<bool, Failure>) -> ExitCode {
    match r {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("{}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(path: &Path, seed: Option<u64>, out: Option<&Path>) -> Result<bool, Failure> {
    let mut cfg = match Config::load(path) {
        Ok(c) => c,
        Err(e) => {
            if let Some(dir) = out {
                let _ = std::fs::create_dir_all(dir);
                let _ = std::fs::write(dir.join("error.txt"), format!("{e}\n"));
            }
            return Err(e.into());
        }
    };
    cfg.resolve(seed);
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| cfg.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(experiment_name(cfg.experiment)));
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("resolved_config.toml"), cfg.to_toml())?;
    let base = path.parent().unwrap_or(Path::new("."));
    match execute(&cfg, base) {
        Ok((tables, summary)) => {
            if cfg.writes(&Format::Csv) {
                for t in &tables {
                    t.write_to_dir(&dir)?;
                }
            }
            if cfg.writes(&Format::Json) {
                std::fs::write(dir.join("summary.json"), summary + "\n")?;
            }
            let _ = std::fs::remove_file(dir.join("error.txt"));
            println!("wrote {}", dir.display());
            Ok(true)
        }
        Err(f) => {
            std::fs::write(dir.join("error.txt"), format!("{}\n", f.message()))?;
            Err(f)
        }
    }
}

fn experiment_name(kind: ExperimentKind) -> String {
    serde_json::to_value(kind)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_else(|| "experiment".into())
}

fn emit<R: Report>(r: R) -> Result<(Vec<Table>, String), Failure> {
    let json = serde_json::to_string_pretty(&r).map_err(|e| Failure::Io(e.to_string()))?;
    Ok((r.tables(), json))
}

fn need<T: Clone>(v: &Option<T>, key: &str) -> Result<T, Failure> {
    v.clone().ok_or_else(|| Failure::Config(format!("config error: missing {key}")))
}

fn execute(cfg: &Config, base: &Path) -> Result<(Vec<Table>, String), Failure> {
    let potential = cfg.potential(base)?;
    let setup = Setup::new(&potential, cfg.dynamics()?, cfg.model.lambda);
    let seed = cfg.seed.unwrap_or(DEFAULT_SEED);
    let s = &cfg.scan;
    let p = &cfg.params;
    let x0 = || s.x0.map(|[a, b]| TorusPoint::new(a, b)).unwrap_or(TorusPoint::ORIGIN);
    match cfg.experiment {
        ExperimentKind::Lyapunov => emit(ex::lyapunov_estimate(
            &setup,
            need(&s.energy, "scan.energy")?,
            need(&s.n, "scan.n")?,
            need(&s.samples, "scan.samples")?,
            seed,
        )?),
        ExperimentKind::ScaleConvergence => emit(ex::scale_convergence_scan(
            &setup,
            need(&s.energy, "scan.energy")?,
            &need(&s.scales, "scan.scales")?,
            need(&s.samples, "scan.samples")?,
            seed,
        )?),
        ExperimentKind::DeterminantLdt => {
            let params = ex::LdtParams {
                n: need(&s.n, "scan.n")?,
                kappa: need(&p.kappa, "params.kappa")?,
                samples: need(&s.samples, "scan.samples")?,
                tol: p.tol,
            };
            emit(ex::determinant_ldt(&setup, need(&s.energy, "scan.energy")?, params, seed)?)
        }
        ExperimentKind::UniformUpper => emit(ex::uniform_upper_check(
            &setup,
            need(&s.energy, "scan.energy")?,
            need(&s.n, "scan.n")?,
            need(&s.sample_sup, "scan.sample_sup")?,
            need(&p.kappa, "params.kappa")?,
            seed,
        )?),
        ExperimentKind::Resonance => {
            let target = match need(&p.target, "params.target")?.as_str() {
                "potential" => ex::ResonanceTarget::Potential,
                "eigenvalue" => ex::ResonanceTarget::Eigenvalue {
                    index: p.eigen_index.unwrap_or(0),
                    ell: p.ell,
                },
                other => {
                    return Err(Failure::Config(format!(
                        "config error: params.target must be \"potential\" or \"eigenvalue\", got \"{other}\""
                    )))
                }
            };
            let params = ex::ResonanceParams {
                x0: x0(),
                n: need(&s.n, "scan.n")?,
                nbar: need(&s.nbar, "scan.nbar")?,
                xi: need(&s.xi, "scan.xi")?.points(&setup),
                kappa: need(&p.kappa, "params.kappa")?,
                beta: need(&p.beta, "params.beta")?,
                target,
                quadrature: need(&p.quadrature, "params.quadrature")?,
            };
            emit(ex::resonance_scan(&setup, &params)?)
        }
        ExperimentKind::GreenDecay => {
            let policy = match need(&p.l0, "params.l0")? {
                L0Spec::Fixed(l0) => ex::L0Policy::Fixed { l0 },
                L0Spec::Policy(s) if s == "lyapunov" => ex::L0Policy::FromLyapunov {
                    n: need(&p.lyapunov_n, "params.lyapunov_n")?,
                    samples: need(&p.lyapunov_samples, "params.lyapunov_samples")?,
                },
                L0Spec::Policy(other) => {
                    return Err(Failure::Config(format!(
                        "config error: params.l0 must be a number or \"lyapunov\", got \"{other}\""
                    )))
                }
            };
            let nbar = match need(&s.nbar, "scan.nbar")?.as_slice() {
                [one] => *one,
                _ => return Err(Failure::Config("config error: green_decay takes a single scan.nbar".into())),
            };
            let energies = need(&s.energies, "scan.energies")?.points(&setup);
            emit(ex::green_decay_scan(&setup, x0(), need(&s.n, "scan.n")?, nbar, &energies, policy, seed)?)
        }
        ExperimentKind::Localization => {
            let mut params = ex::LocalizationParams::new(x0(), need(&s.n_box, "scan.n_box")?);
            params.rho = need(&p.rho, "params.rho")?;
            params.min_r2 = need(&p.min_r2, "params.min_r2")?;
            params.mass_level = need(&p.mass_level, "params.mass_level")?;
            params.width = need(&p.width, "params.width")?;
            params.lyapunov_n = need(&p.lyapunov_n, "params.lyapunov_n")?;
            params.lyapunov_samples = need(&p.lyapunov_samples, "params.lyapunov_samples")?;
            params.seed = seed;
            emit(ex::localization_profile(&setup, &params)?)
        }
        ExperimentKind::LargeDisorder => {
            let energies = need(&s.energies, "scan.energies")?.points(&setup);
            emit(ex::large_disorder_check(
                &setup,
                &energies,
                need(&s.n, "scan.n")?,
                need(&s.samples, "scan.samples")?,
                need(&p.lambda0, "params.lambda0")?,
                seed,
            )?)
        }
    }
}

fn verify(suite: &str, seed: u64, out: Option<&Path>, fault: Option<String>) -> Result<bool, Failure> {
    let suite = Suite::parse(suite).ok_or_else(|| {
        Failure::Config(format!("unknown suite `{suite}` (expected identities, statistics or all)"))
    })?;
    let fault = fault.map(|f| Fault::parse(&f)).transpose()?;
    let report = run_suite(suite, seed, fault);
    for o in &report.outcomes {
        println!("{}", o.line());
    }
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("out").join("verify"));
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("junit.xml"), report.junit_xml())?;
    for t in report.tables() {
        t.write_to_dir(&dir)?;
    }
    let json = serde_json::to_string_pretty(&report).map_err(|e| Failure::Io(e.to_string()))?;
    std::fs::write(dir.join("summary.json"), json + "\n")?;
    println!(
        "{}: {} of {} checks passed",
        suite.name(),
        report.outcomes.len() - report.failures(),
        report.outcomes.len()
    );
    Ok(report.passed())
}

fn list() {
    println!("potentials:");
    println!("  {:<18} {:>10} {:>12} {:>16}", "name", "alpha", "sup_norm", "holder_constant");
    for row in builtin_catalog() {
        println!(
            "  {:<18} {:>10} {:>12} {:>16}",
            row.name, row.alpha, row.sup_norm, row.holder_constant
        );
    }
    println!("\nfrequencies:");
    for f in NamedFrequency::ALL {
        let cf = f.continued_fraction(8);
        let convergents: Vec<String> = cf
            .convergents
            .iter()
            .take(8)
            .map(|(p, q)| format!("{p}/{q}"))
            .collect();
        println!("  {:<14} {:.16}  {}", f.name(), f.value(), convergents.join(" "));
    }
}
