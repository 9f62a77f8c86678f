//! Batch CLI: generate Schur-class instances, run verification suites, extract
//! Clark moment data, build free lifts, and evaluate transfer-function
//! realizations. A thin shell — every number it prints is reproducible through
//! the library with the same inputs.
//!
//! Exit codes: 0 success/pass, 1 verification failure, 2 usage or input error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use freeac::commutative::{
    build_herglotz_space, build_vb, check_free_lift, comm_dbr_space, comm_moments,
    lift_from_extension, random_extension,
};
use freeac::gns::quasi_extreme_indicator;
use freeac::herglotz::moments_from_schur;
use freeac::instance::{generate, GenParams, Instance, Payload, DEFAULT_TRUNC};
use freeac::jsonio;
use freeac::realization::{
    comm_colligation_from_extension, comm_transfer_coeffs, comm_transfer_eval, free_colligation,
    transfer_coeffs, transfer_eval,
};
use freeac::report::{CheckTimer, Report};
use freeac::tol::Tolerances;
use freeac::verify::{run_suite, Suite};
use freeac::Side;

#[derive(Parser)]
#[command(
    name = "freeac",
    version,
    about = "Free Aleksandrov-Clark computations on truncated Fock space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random certified Schur-class instance.
    Gen(GenArgs),
    /// Run a verification suite on an instance and emit a report.
    Verify(VerifyArgs),
    /// Clark moment data (free or commutative) of an instance.
    Moments(MomentsArgs),
    /// Build a free lift of a commutative instance through a symmetric extension.
    Lift(LiftArgs),
    /// Evaluate the transfer-function realization of an instance.
    Realize(RealizeArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Number of free variables (1..=9).
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Coefficient dimension.
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Maximal degree of the generated coefficients.
    #[arg(long, default_value_t = 2)]
    deg: usize,
    /// Target l1 norm (certifies the Schur class); in (0, 1).
    #[arg(long, default_value_t = 0.8)]
    rho: f64,
    #[arg(long)]
    seed: u64,
    /// "free" or "comm".
    #[arg(long, default_value = "free")]
    mode: String,
    /// Truncation degree N.
    #[arg(long = "N", default_value_t = DEFAULT_TRUNC)]
    trunc: usize,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    instance: PathBuf,
    /// Override the truncation degree before verifying.
    #[arg(long = "N")]
    trunc: Option<usize>,
    /// all | herglotz | gns | clark | lift | realize
    #[arg(long, default_value = "all")]
    suite: String,
    /// Seed for the randomized parts of the suites (family unitaries,
    /// extensions, nilpotent points).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override a tolerance, e.g. --tol clark=1e-6 (repeatable).
    #[arg(long = "tol")]
    tols: Vec<String>,
    /// JSON file with a tolerance table, loaded before --tol overrides.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the JSON report here (a text summary prints to stdout either way).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct MomentsArgs {
    instance: PathBuf,
    /// Keep only moments of word length / total degree up to this.
    #[arg(long = "max-len")]
    max_len: Option<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct LiftArgs {
    /// Commutative instance to lift.
    #[arg(long)]
    comm: PathBuf,
    /// "tight" or "random:<seed>".
    #[arg(long, default_value = "tight")]
    extension: String,
    /// Complement norm for random extensions.
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
    /// Write the lift as a free instance here.
    #[arg(short, long)]
    output: PathBuf,
    /// Write the audit report here (a text summary prints either way).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct RealizeArgs {
    instance: PathBuf,
    /// Evaluate at a point: NC point JSON for free instances
    /// ({"Z": [matrix, ...]}), scalar point JSON for commutative ones
    /// ({"z": [[re, im], ...]}).
    #[arg(long)]
    point: Option<PathBuf>,
    /// Emit transfer-function coefficients up to this degree instead.
    #[arg(long)]
    coeffs: Option<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> freeac::Result<ExitCode> {
    match cli.command {
        Command::Gen(args) => {
            let params = GenParams {
                d: args.d,
                m: args.m,
                deg: args.deg,
                rho: args.rho,
                seed: args.seed,
                trunc: args.trunc,
            };
            let inst = generate(&params, &args.mode)?;
            std::fs::write(&args.output, inst.to_bytes())?;
            eprintln!(
                "wrote {} instance (d={} m={} deg={} rho={} N={}) to {}",
                args.mode,
                args.d,
                args.m,
                args.deg,
                args.rho,
                args.trunc,
                args.output.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(args) => {
            let mut inst = load_instance(&args.instance)?;
            if let Some(n) = args.trunc {
                inst.payload = match inst.payload {
                    Payload::Free(s) => Payload::Free(s.with_trunc(n)),
                    Payload::Comm(s) => Payload::Comm(s.with_trunc(n)),
                };
            }
            let mut tols = Tolerances::default();
            if let Some(cfg) = &args.config {
                let text = std::fs::read_to_string(cfg)?;
                tols = serde_json::from_str(&text)?;
            }
            for spec in &args.tols {
                let (name, value) = spec.split_once('=').ok_or_else(|| {
                    freeac::Error::InvalidParameter(format!(
                        "tolerance override \"{spec}\" must look like name=value"
                    ))
                })?;
                let value: f64 = value.parse().map_err(|e| {
                    freeac::Error::InvalidParameter(format!("bad tolerance value: {e}"))
                })?;
                tols.set(name, value)?;
            }
            let suite: Suite = args.suite.parse()?;
            let trunc = match &inst.payload {
                Payload::Free(s) => s.trunc(),
                Payload::Comm(s) => s.trunc(),
            };
            let checks = run_suite(&inst, suite, &tols, args.seed)?;
            let report = Report::new(&args.suite, inst.seed, trunc, checks);
            print!("{}", report.to_text());
            if let Some(path) = &args.output {
                std::fs::write(path, report.to_json_string())?;
            }
            Ok(if report.pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Moments(args) => {
            let inst = load_instance(&args.instance)?;
            let value = match &inst.payload {
                Payload::Free(b) => {
                    let phi = moments_from_schur(b)?;
                    let phi = match args.max_len {
                        Some(n) => phi.restrict(n),
                        None => phi,
                    };
                    jsonio::moments_to_json(&phi)
                }
                Payload::Comm(b) => {
                    let b = match args.max_len {
                        Some(n) => b.with_trunc(n),
                        None => b.clone(),
                    };
                    jsonio::comm_moments_to_json(&comm_moments(&b)?)
                }
            };
            emit(&args.output, &value)
        }
        Command::Lift(args) => {
            let inst = load_instance(&args.comm)?;
            let b = inst.comm()?;
            let mu = comm_moments(b)?;
            let space = build_herglotz_space(&mu)?;
            let vb = build_vb(&space)?;
            let ext = match args.extension.as_str() {
                "tight" => vb,
                other => match other.strip_prefix("random:") {
                    Some(seed) => {
                        let seed: u64 = seed.parse().map_err(|e| {
                            freeac::Error::InvalidParameter(format!("bad extension seed: {e}"))
                        })?;
                        random_extension(&space, &vb, seed, args.rho)?
                    }
                    None => {
                        return Err(freeac::Error::InvalidParameter(
                            "extension must be \"tight\" or \"random:<seed>\"".into(),
                        ))
                    }
                },
            };
            let lift = lift_from_extension(&space, &ext)?;
            let check = check_free_lift(&lift.b_left, b)?;
            let qe = quasi_extreme_indicator(&lift.phi)?;
            let out = Instance {
                payload: Payload::Free(lift.b_left.clone()),
                seed: inst.seed,
                params: None,
                certification: "lift".into(),
            };
            std::fs::write(&args.output, out.to_bytes())?;

            let checks = vec![
                CheckTimer::start("lift_symmetrization")
                    .finish(check.symmetrization_error, freeac::tol::LIFT),
                CheckTimer::start("lift_moment_fibers").finish(check.moment_error, freeac::tol::LIFT),
                CheckTimer::start("dilation_compression")
                    .finish(lift.dilation_defect, freeac::tol::PARTIAL_ISOMETRY),
                CheckTimer::start("quasi_extreme_indicator")
                    .finish_at_least(qe, -freeac::tol::QE_ZERO),
            ];
            let report = Report::new("lift", inst.seed, b.trunc(), checks);
            print!("{}", report.to_text());
            eprintln!("quasi-extreme indicator: {qe:.6e}");
            if let Some(path) = &args.report {
                std::fs::write(path, report.to_json_string())?;
            }
            Ok(if report.pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Realize(args) => {
            let inst = load_instance(&args.instance)?;
            let value = match (&inst.payload, &args.point, args.coeffs) {
                (Payload::Free(b), Some(point), _) => {
                    let text = std::fs::read_to_string(point)?;
                    let pv: serde_json::Value = serde_json::from_str(&text)?;
                    let p = jsonio::nc_point_from_json(&pv)?;
                    let (col, _) = free_colligation(&b.transpose_series(), Side::Right)?;
                    let value = transfer_eval(&col, &p)?;
                    let mut out = serde_json::Map::new();
                    out.insert("transfer".into(), jsonio::mat_to_json(&value));
                    // self-check at jointly nilpotent points, where the transfer
                    // must equal direct series evaluation
                    if let Some(order) = p.nilpotency_order(b.trunc()) {
                        let direct = b.eval_nc(&p)?;
                        let err = freeac::linalg::max_abs(&(&value - direct));
                        out.insert("nilpotency_order".into(), serde_json::json!(order));
                        out.insert("nilpotent_self_check_error".into(), serde_json::json!(err));
                        if err > freeac::tol::NILPOTENT_EXACT {
                            eprintln!("nilpotent self-check FAILED: {err:.3e}");
                            emit(&args.output, &serde_json::Value::Object(out))?;
                            return Ok(ExitCode::from(1));
                        }
                    }
                    serde_json::Value::Object(out)
                }
                (Payload::Free(b), None, Some(maxdeg)) => {
                    let (col, _) = free_colligation(&b.transpose_series(), Side::Right)?;
                    let coeffs = transfer_coeffs(&col, b.d(), maxdeg.min(b.trunc()), b.trunc())?;
                    jsonio::free_series_to_json(&coeffs)
                }
                (Payload::Comm(b), point, coeffs) => {
                    let mu = comm_moments(b)?;
                    let space = build_herglotz_space(&mu)?;
                    let vb = build_vb(&space)?;
                    let comm_dbr = comm_dbr_space(b)?;
                    let safe = (b.trunc() - b.degree()).saturating_sub(1);
                    let col = comm_colligation_from_extension(&space, &vb, &comm_dbr, safe)?;
                    match (point, coeffs) {
                        (Some(path), _) => {
                            let text = std::fs::read_to_string(path)?;
                            let pv: serde_json::Value = serde_json::from_str(&text)?;
                            let zs = pv
                                .get("z")
                                .and_then(|z| z.as_array())
                                .ok_or_else(|| {
                                    freeac::Error::Json(
                                        "commutative point needs \"z\": [[re,im], ...]".into(),
                                    )
                                })?
                                .iter()
                                .map(jsonio::complex_from_json)
                                .collect::<freeac::Result<Vec<_>>>()?;
                            let value = comm_transfer_eval(&col, &zs)?;
                            serde_json::json!({"transfer": jsonio::mat_to_json(&value)})
                        }
                        (None, Some(maxdeg)) => {
                            let taylor = comm_transfer_coeffs(
                                &col,
                                b.d(),
                                maxdeg.min(b.trunc()),
                                b.trunc(),
                            )?;
                            jsonio::comm_series_to_json(&taylor)
                        }
                        (None, None) => {
                            return Err(freeac::Error::InvalidParameter(
                                "realize needs --point or --coeffs".into(),
                            ))
                        }
                    }
                }
                (Payload::Free(_), None, None) => {
                    return Err(freeac::Error::InvalidParameter(
                        "realize needs --point or --coeffs".into(),
                    ))
                }
            };
            emit(&args.output, &value)
        }
    }
}

fn load_instance(path: &Path) -> freeac::Result<Instance> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    Instance::from_json(&value)
}

fn emit(path: &Option<PathBuf>, value: &serde_json::Value) -> freeac::Result<ExitCode> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}
