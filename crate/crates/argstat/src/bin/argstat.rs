//! Command-line surface: every subcommand prints a canonical JSON record to
//! stdout, or writes artifacts plus a run manifest under --out.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use argstat::familysim::{
    floor_case_value, run_moments, symbolic_moment_audit, zero_density_harness, SimConfig,
    SimError, Weighting, ZeroEnsembleConfig,
};
use argstat::forms::{FormError, LanglandsParameter};
use argstat::hecke::{dimension_check, expand_power, HeckeError};
use argstat::io::{
    canonical_json, cdf_overlay_svg, ingest_lmfdb, moment_bars_svg, moment_report_csv,
    serialize_form_file, IoError, RunManifest,
};
use argstat::sfapprox::{approx_s, explicit_formula_check, rv_mangoldt_check, s_oracle, EisensteinSpec, SfError};
use argstat::smoothing::{lambda_x, prime_reciprocal_sum, SmoothingConfig, SmoothingError};
use argstat::specweight::{
    compute_h, diagonal_predictor, QuadratureSpec, SpecError, TestFunctionConfig,
};
use argstat::zeta::ZetaError;

const EXIT_VALIDATION: u8 = 2;
const EXIT_MISSING_DATA: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

struct CliError {
    code: u8,
    message: String,
}

type CliResult<T> = Result<T, CliError>;

fn fail(code: u8, message: impl Into<String>) -> CliError {
    CliError {
        code,
        message: message.into(),
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        let code = match e {
            IoError::Io(_) | IoError::NoSource | IoError::Fetch(_) => EXIT_MISSING_DATA,
            _ => EXIT_VALIDATION,
        };
        fail(code, e.to_string())
    }
}

impl From<SmoothingError> for CliError {
    fn from(e: SmoothingError) -> Self {
        let code = match e {
            SmoothingError::MissingCoefficient(_) | SmoothingError::NoCompletenessBox => {
                EXIT_MISSING_DATA
            }
            SmoothingError::TailNotNegligible { .. } | SmoothingError::BoxTooSmall { .. } => {
                EXIT_NUMERICAL
            }
            _ => EXIT_VALIDATION,
        };
        fail(code, e.to_string())
    }
}

impl From<SfError> for CliError {
    fn from(e: SfError) -> Self {
        match e {
            SfError::Smoothing(inner) => inner.into(),
            SfError::NoZeros => fail(EXIT_MISSING_DATA, e.to_string()),
            SfError::UnwrappingFailure(_) | SfError::ZeroProximity { .. } | SfError::Zeta(_) => {
                fail(EXIT_NUMERICAL, e.to_string())
            }
            _ => fail(EXIT_VALIDATION, e.to_string()),
        }
    }
}

impl From<SpecError> for CliError {
    fn from(e: SpecError) -> Self {
        let code = match e {
            SpecError::UnresolvedQuadrature { .. } | SpecError::PoleProximity(_) => EXIT_NUMERICAL,
            _ => EXIT_VALIDATION,
        };
        fail(code, e.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        let code = match e {
            SimError::MissingFrozenConstant => EXIT_MISSING_DATA,
            _ => EXIT_VALIDATION,
        };
        fail(code, e.to_string())
    }
}

impl From<FormError> for CliError {
    fn from(e: FormError) -> Self {
        fail(EXIT_VALIDATION, e.to_string())
    }
}

impl From<HeckeError> for CliError {
    fn from(e: HeckeError) -> Self {
        fail(EXIT_VALIDATION, e.to_string())
    }
}

impl From<ZetaError> for CliError {
    fn from(e: ZetaError) -> Self {
        fail(EXIT_NUMERICAL, e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "argstat", version, about = "GL(3) argument-statistics toolkit")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GlobalArgs {
    /// RNG seed for randomized commands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; artifacts and a manifest.json are written there.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format where a choice exists.
    #[arg(long, global = true, value_parser = ["json", "csv", "svg"])]
    format: Option<String>,
    /// Keep going past per-record failures where supported.
    #[arg(long, global = true)]
    lenient: bool,
    /// Local fixture file standing in for the network source.
    #[arg(long, global = true)]
    fixture: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Hecke-algebra expansion of A(1,p)^n.
    Hecke {
        #[command(subcommand)]
        cmd: HeckeCmd,
    },
    /// Satake root solving and Newton power sums.
    Satake {
        #[command(subcommand)]
        cmd: SatakeCmd,
    },
    /// Smoothed von Mangoldt weights and prime sums.
    Weights {
        #[command(subcommand)]
        cmd: WeightsCmd,
    },
    /// Argument-function oracle, approximation, and identity checks.
    Sfunc {
        #[command(subcommand)]
        cmd: SfuncCmd,
    },
    /// Spectral test-function mass and diagonal predictions.
    Spec {
        #[command(subcommand)]
        cmd: SpecCmd,
    },
    /// Monte Carlo family simulation.
    Sim {
        #[command(subcommand)]
        cmd: SimCmd,
    },
    /// External data ingestion.
    Ingest {
        #[command(subcommand)]
        cmd: IngestCmd,
    },
    /// Re-render a stored report in another format.
    Report {
        #[command(subcommand)]
        cmd: ReportCmd,
    },
}

#[derive(Subcommand)]
enum HeckeCmd {
    /// Exact expansion of A(1,p)^n in the basis A(p^k, p^l).
    Expand {
        #[arg(long)]
        n: u32,
    },
    /// Exact dimension identity for all n up to the given bound.
    Check {
        #[arg(long, default_value_t = 20)]
        max_n: u32,
    },
}

#[derive(Subcommand)]
enum SatakeCmd {
    /// Roots of x^3 - a1p x^2 + ap1 x - 1.
    Solve {
        /// Complex "re,im".
        #[arg(long)]
        a1p: String,
        #[arg(long)]
        ap1: String,
        #[arg(long, default_value_t = 2)]
        prime: u64,
    },
    /// C(p^k) for k = 0..=kmax via the Newton recurrence.
    Powersums {
        #[arg(long)]
        a1p: String,
        #[arg(long)]
        ap1: String,
        #[arg(long, default_value_t = 12)]
        kmax: u32,
    },
}

#[derive(Subcommand)]
enum WeightsCmd {
    /// Tapered von Mangoldt values Lambda_x(n) for n up to a bound.
    Lambda {
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 1000)]
        max_n: u64,
    },
    /// Prime count and reciprocal sum up to a bound.
    Primes {
        #[arg(long)]
        bound: f64,
    },
}

#[derive(Subcommand)]
enum SfuncCmd {
    /// Continuous-variation argument of the shifted zeta product.
    Oracle {
        #[arg(long)]
        t: f64,
        /// Three shifts "t1,t2,t3" summing to zero.
        #[arg(long, default_value = "0,0,0")]
        shifts: String,
        #[arg(long, default_value_t = 0.01)]
        resolution: f64,
    },
    /// Dirichlet-polynomial approximation with its error budget.
    Approx {
        #[arg(long)]
        t: f64,
        #[arg(long, default_value = "0,0,0")]
        shifts: String,
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 10.0)]
        error_constant: f64,
    },
    /// Smoothed explicit-formula identity check at a point.
    #[command(name = "lemma31")]
    ExplicitFormula {
        #[arg(long, default_value = "0,0,0")]
        shifts: String,
        /// Complex "re,im".
        #[arg(long)]
        s: String,
        #[arg(long, default_value_t = 20.0)]
        x: f64,
        #[arg(long, default_value_t = 100.0)]
        window: f64,
    },
    /// Zero-counting formula against counted ordinates below t.
    Rvcheck {
        #[arg(long)]
        t: f64,
    },
}

#[derive(Subcommand)]
enum SpecCmd {
    /// Total test-function mass over the spectral measure.
    Hsum {
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 0.2)]
        eta: f64,
        #[arg(long, default_value_t = 1)]
        depth: u32,
    },
    /// Diagonal main term and off-diagonal envelope for one coefficient tuple.
    Predict {
        #[arg(long)]
        m1: u64,
        #[arg(long)]
        m2: u64,
        #[arg(long)]
        n1: u64,
        #[arg(long)]
        n2: u64,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 0.2)]
        eta: f64,
        #[arg(long, default_value_t = 1)]
        depth: u32,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
    },
}

#[derive(Args, Clone, Serialize)]
struct SimMomentsArgs {
    #[arg(long)]
    prime_bound: f64,
    #[arg(long)]
    t: f64,
    #[arg(long)]
    samples: usize,
    #[arg(long, default_value_t = 4)]
    n_max: u32,
    /// "uniform" or "spectral".
    #[arg(long, default_value = "uniform")]
    weighting: String,
    /// Spectral-weighting center scale (only with --weighting spectral).
    #[arg(long, default_value_t = 40.0)]
    spec_t: f64,
    #[arg(long, default_value_t = 0.2)]
    spec_eta: f64,
}

#[derive(Subcommand)]
enum SimCmd {
    /// Family moments against the limit-law targets.
    Moments(SimMomentsArgs),
    /// Central-limit diagnostics (normalized CDF distance and overlay plot).
    Clt(SimMomentsArgs),
    /// Symbolic moment expansion audited against the Haar oracle.
    Audit {
        #[arg(long)]
        order: u32,
        #[arg(long)]
        primes: u32,
    },
    /// Synthetic zero-ensemble bound check.
    Zerodensity {
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        log_t: f64,
        #[arg(long)]
        height: f64,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 100)]
        draws: usize,
    },
}

#[derive(Subcommand)]
enum IngestCmd {
    /// Fetch degree-3 form records (or read --fixture) into a form file.
    Lmfdb {
        #[arg(long, default_value_t = 100)]
        limit: usize,
    },
}

#[derive(Subcommand)]
enum ReportCmd {
    /// Convert a stored moment report to csv or svg.
    Render {
        #[arg(long)]
        input: PathBuf,
    },
}

fn parse_complex(s: &str) -> CliResult<Complex64> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(fail(EXIT_VALIDATION, format!("expected \"re,im\", got '{s}'")));
    }
    let re: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| fail(EXIT_VALIDATION, format!("bad real part in '{s}'")))?;
    let im: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| fail(EXIT_VALIDATION, format!("bad imaginary part in '{s}'")))?;
    Ok(Complex64::new(re, im))
}

fn parse_shifts(s: &str) -> CliResult<EisensteinSpec> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| fail(EXIT_VALIDATION, format!("bad shift list '{s}'")))?;
    if parts.len() != 3 {
        return Err(fail(EXIT_VALIDATION, "exactly three shifts required"));
    }
    EisensteinSpec::new(parts[0], parts[1], parts[2]).map_err(Into::into)
}

/// Tempered center along the fixed generic direction (4, 1, -5)/sqrt(42),
/// scaled so the Euclidean norm equals t. The direction keeps every mu and
/// nu component at least 0.154 * t, the balanced max-min over both
/// coordinate systems, so no component degenerates relative to the norm.
fn generic_center(t: f64, eta: f64, depth: u32) -> CliResult<TestFunctionConfig> {
    let a = t / 42.0_f64.sqrt();
    let mu0 = LanglandsParameter::tempered(4.0 * a, a, -5.0 * a)?;
    TestFunctionConfig::new(mu0, t, eta, depth).map_err(Into::into)
}

/// Writes one named artifact into the --out directory, or stdout without it.
struct Emitter {
    out_dir: Option<PathBuf>,
    written: Vec<PathBuf>,
}

impl Emitter {
    fn new(out_dir: Option<PathBuf>) -> CliResult<Self> {
        if let Some(dir) = &out_dir {
            std::fs::create_dir_all(dir)
                .map_err(|e| fail(EXIT_MISSING_DATA, format!("cannot create {dir:?}: {e}")))?;
        }
        Ok(Self {
            out_dir,
            written: Vec::new(),
        })
    }

    fn emit(&mut self, name: &str, content: &str) -> CliResult<()> {
        match &self.out_dir {
            Some(dir) => {
                let path = dir.join(name);
                std::fs::write(&path, content)
                    .map_err(|e| fail(EXIT_MISSING_DATA, format!("cannot write {path:?}: {e}")))?;
                self.written.push(path);
            }
            None => print!("{content}"),
        }
        Ok(())
    }

    fn finish_manifest<T: Serialize>(
        &self,
        command: &str,
        config: &T,
        seed: Option<u64>,
    ) -> CliResult<()> {
        let Some(first) = self.written.first() else {
            return Ok(());
        };
        let mut manifest = RunManifest::start(command, config, seed)?;
        manifest.finish(self.written.clone());
        manifest.write_next_to(first)?;
        Ok(())
    }
}

fn json_line<T: Serialize>(v: &T) -> CliResult<String> {
    canonical_json(v).map_err(Into::into)
}

fn run(cli: Cli) -> CliResult<()> {
    let g = &cli.global;
    let mut em = Emitter::new(g.out.clone())?;
    match &cli.command {
        Command::Hecke { cmd } => run_hecke(cmd, &mut em)?,
        Command::Satake { cmd } => run_satake(cmd, &mut em)?,
        Command::Weights { cmd } => run_weights(cmd, g, &mut em)?,
        Command::Sfunc { cmd } => run_sfunc(cmd, &mut em)?,
        Command::Spec { cmd } => run_spec(cmd, g, &mut em)?,
        Command::Sim { cmd } => run_sim(cmd, g, &mut em)?,
        Command::Ingest { cmd } => run_ingest(cmd, g, &mut em)?,
        Command::Report { cmd } => run_report(cmd, g, &mut em)?,
    }
    Ok(())
}

#[derive(Serialize)]
struct ExpandOut {
    n: u32,
    /// (k, l, coefficient as decimal string), sorted by (k, l).
    terms: Vec<(u32, u32, String)>,
}

fn run_hecke(cmd: &HeckeCmd, em: &mut Emitter) -> CliResult<()> {
    match cmd {
        HeckeCmd::Expand { n } => {
            let c = expand_power(*n)?;
            let out = ExpandOut {
                n: *n,
                terms: c
                    .terms()
                    .map(|(&(k, l), coeff)| (k, l, coeff.to_string()))
                    .collect(),
            };
            em.emit("hecke_expand.json", &json_line(&out)?)?;
            em.finish_manifest("hecke expand", &out.n, None)
        }
        HeckeCmd::Check { max_n } => {
            #[derive(Serialize)]
            struct Row {
                n: u32,
                ok: bool,
            }
            let mut rows = Vec::new();
            let mut all_ok = true;
            for n in 0..=*max_n {
                let ok = dimension_check(n)?;
                all_ok &= ok;
                rows.push(Row { n, ok });
            }
            em.emit("hecke_check.json", &json_line(&rows)?)?;
            em.finish_manifest("hecke check", max_n, None)?;
            if !all_ok {
                return Err(fail(EXIT_NUMERICAL, "dimension identity failed"));
            }
            Ok(())
        }
    }
}

fn run_satake(cmd: &SatakeCmd, em: &mut Emitter) -> CliResult<()> {
    match cmd {
        SatakeCmd::Solve { a1p, ap1, prime } => {
            let t = argstat::satake::solve_satake(parse_complex(a1p)?, parse_complex(ap1)?, *prime)
                .map_err(|e| fail(EXIT_NUMERICAL, e.to_string()))?;
            #[derive(Serialize)]
            struct Out {
                alpha: [[f64; 2]; 3],
                prime: u64,
                kim_sarnak_flagged: bool,
            }
            let out = Out {
                alpha: t.alpha.map(|z| [z.re, z.im]),
                prime: t.prime,
                kim_sarnak_flagged: t.kim_sarnak_flagged,
            };
            em.emit("satake_solve.json", &json_line(&out)?)?;
            em.finish_manifest("satake solve", &out.prime, None)
        }
        SatakeCmd::Powersums { a1p, ap1, kmax } => {
            let sums =
                argstat::satake::power_sums(parse_complex(a1p)?, parse_complex(ap1)?, *kmax as usize);
            let rows: Vec<[f64; 2]> = sums.iter().map(|z| [z.re, z.im]).collect();
            em.emit("satake_powersums.json", &json_line(&rows)?)?;
            em.finish_manifest("satake powersums", kmax, None)
        }
    }
}

fn run_weights(cmd: &WeightsCmd, g: &GlobalArgs, em: &mut Emitter) -> CliResult<()> {
    match cmd {
        WeightsCmd::Lambda { x, max_n } => {
            let cfg = SmoothingConfig::new(*x)?;
            let csv_wanted = g.format.as_deref() == Some("csv");
            if csv_wanted {
                let mut out = String::from("n,lambda_x\n");
                for n in 1..=*max_n {
                    let v = lambda_x(n, &cfg);
                    if v != 0.0 {
                        out.push_str(&format!("{n},{v}\n"));
                    }
                }
                em.emit("lambda.csv", &out)?;
            } else {
                let rows: Vec<(u64, f64)> = (1..=*max_n)
                    .filter_map(|n| {
                        let v = lambda_x(n, &cfg);
                        (v != 0.0).then_some((n, v))
                    })
                    .collect();
                em.emit("lambda.json", &json_line(&rows)?)?;
            }
            em.finish_manifest("weights lambda", x, None)
        }
        WeightsCmd::Primes { bound } => {
            let sum = prime_reciprocal_sum(*bound)?;
            #[derive(Serialize)]
            struct Out {
                bound: f64,
                reciprocal_sum: f64,
            }
            let out = Out {
                bound: *bound,
                reciprocal_sum: sum,
            };
            em.emit("primes.json", &json_line(&out)?)?;
            em.finish_manifest("weights primes", bound, None)
        }
    }
}

fn run_sfunc(cmd: &SfuncCmd, em: &mut Emitter) -> CliResult<()> {
    match cmd {
        SfuncCmd::Oracle {
            t,
            shifts,
            resolution,
        } => {
            let spec = parse_shifts(shifts)?;
            let value = s_oracle(&spec, *t, *resolution)?;
            #[derive(Serialize)]
            struct Out {
                t: f64,
                shifts: [f64; 3],
                value: f64,
            }
            let out = Out {
                t: *t,
                shifts: spec.shifts(),
                value,
            };
            em.emit("sfunc_oracle.json", &json_line(&out)?)?;
            em.finish_manifest("sfunc oracle", t, None)
        }
        SfuncCmd::Approx {
            t,
            shifts,
            x,
            error_constant,
        } => {
            let spec = parse_shifts(shifts)?;
            let form = argstat::sfapprox::EisensteinForm::new(spec)?;
            let cfg = SmoothingConfig::new(*x)?;
            let r = approx_s(&form, *t, &cfg, *error_constant)?;
            #[derive(Serialize)]
            struct Out {
                t: f64,
                x: f64,
                main_term: f64,
                error_budget: f64,
                sigma_x_used: f64,
            }
            let out = Out {
                t: *t,
                x: *x,
                main_term: r.main_term,
                error_budget: r.error_budget,
                sigma_x_used: r.sigma_x_used,
            };
            em.emit("sfunc_approx.json", &json_line(&out)?)?;
            em.finish_manifest("sfunc approx", t, None)
        }
        SfuncCmd::ExplicitFormula {
            shifts,
            s,
            x,
            window,
        } => {
            let spec = parse_shifts(shifts)?;
            let cfg = SmoothingConfig::new(*x)?;
            let r = explicit_formula_check(&spec, parse_complex(s)?, &cfg, *window)?;
            #[derive(Serialize)]
            struct Out {
                lhs: [f64; 2],
                rhs: [f64; 2],
                gap: f64,
                zero_tail_bound: f64,
            }
            let out = Out {
                lhs: [r.lhs.re, r.lhs.im],
                rhs: [r.rhs.re, r.rhs.im],
                gap: r.gap,
                zero_tail_bound: r.zero_tail_bound,
            };
            em.emit("sfunc_lemma31.json", &json_line(&out)?)?;
            em.finish_manifest("sfunc lemma31", x, None)
        }
        SfuncCmd::Rvcheck { t } => {
            let (formula, counted) = rv_mangoldt_check(*t)?;
            #[derive(Serialize)]
            struct Out {
                t: f64,
                formula: f64,
                counted: usize,
            }
            let out = Out {
                t: *t,
                formula,
                counted,
            };
            em.emit("sfunc_rvcheck.json", &json_line(&out)?)?;
            em.finish_manifest("sfunc rvcheck", t, None)?;
            if (formula - counted as f64).abs() > 0.05 {
                return Err(fail(EXIT_NUMERICAL, "counting formula mismatch above 0.05"));
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct HsumOut {
    t: f64,
    eta: f64,
    depth: u32,
    value: f64,
    error_estimate: f64,
}

fn run_spec(cmd: &SpecCmd, g: &GlobalArgs, em: &mut Emitter) -> CliResult<()> {
    match cmd {
        SpecCmd::Hsum { t, eta, depth } => {
            let cfg = generic_center(*t, *eta, *depth)?;
            let h = compute_h(&cfg, &QuadratureSpec::default_for(&cfg))?;
            let out = HsumOut {
                t: *t,
                eta: *eta,
                depth: *depth,
                value: h.value,
                error_estimate: h.error_estimate,
            };
            em.emit("spec_hsum.json", &json_line(&out)?)?;
            em.finish_manifest("spec hsum", &out, g.seed)
        }
        SpecCmd::Predict {
            m1,
            m2,
            n1,
            n2,
            t,
            eta,
            depth,
            epsilon,
        } => {
            let cfg = generic_center(*t, *eta, *depth)?;
            let p = diagonal_predictor(*m1, *m2, *n1, *n2, &cfg, *epsilon)?;
            #[derive(Serialize)]
            struct Out {
                m1: u64,
                m2: u64,
                n1: u64,
                n2: u64,
                t: f64,
                eta: f64,
                epsilon: f64,
                main: f64,
                envelope: f64,
                negligible: bool,
            }
            let out = Out {
                m1: *m1,
                m2: *m2,
                n1: *n1,
                n2: *n2,
                t: *t,
                eta: *eta,
                epsilon: *epsilon,
                main: p.main,
                envelope: p.envelope,
                negligible: p.negligible,
            };
            em.emit("spec_predict.json", &json_line(&out)?)?;
            em.finish_manifest("spec predict", &out, g.seed)
        }
    }
}

fn sim_config(a: &SimMomentsArgs, seed: u64) -> CliResult<SimConfig> {
    let weighting = match a.weighting.as_str() {
        "uniform" => Weighting::Uniform,
        "spectral" => Weighting::Spectral(generic_center(a.spec_t, a.spec_eta, 1)?),
        other => return Err(fail(EXIT_VALIDATION, format!("unknown weighting '{other}'"))),
    };
    SimConfig::new(a.prime_bound, a.t, a.samples, seed, a.n_max, weighting).map_err(Into::into)
}

fn run_sim(cmd: &SimCmd, g: &GlobalArgs, em: &mut Emitter) -> CliResult<()> {
    match cmd {
        SimCmd::Moments(a) => {
            let seed = g.seed.unwrap_or(0);
            let cfg = sim_config(a, seed)?;
            let out = run_moments(&cfg)?;
            em.emit("moments.json", &json_line(&out.report)?)?;
            em.emit("moments.csv", &moment_report_csv(&out.report))?;
            let caption = format!(
                "moments: N={} primes<={} seed={}",
                a.samples, a.prime_bound, seed
            );
            em.emit("moment_bars.svg", &moment_bars_svg(&out.report, &caption))?;
            em.finish_manifest("sim moments", a, Some(seed))
        }
        SimCmd::Clt(a) => {
            let seed = g.seed.unwrap_or(0);
            let cfg = sim_config(a, seed)?;
            let out = run_moments(&cfg)?;
            #[derive(Serialize)]
            struct Out {
                cdf_distance: f64,
                kurtosis: f64,
                reciprocal_sum: f64,
                pre_asymptotic: bool,
            }
            let summary = Out {
                cdf_distance: out.report.cdf_distance,
                kurtosis: out.report.kurtosis,
                reciprocal_sum: out.report.reciprocal_sum,
                pre_asymptotic: out.report.pre_asymptotic,
            };
            em.emit("clt.json", &json_line(&summary)?)?;
            let caption = format!(
                "clt: N={} primes<={} seed={}",
                a.samples, a.prime_bound, seed
            );
            em.emit(
                "cdf_overlay.svg",
                &cdf_overlay_svg(&out.samples, out.report.reciprocal_sum, &caption),
            )?;
            em.finish_manifest("sim clt", a, Some(seed))
        }
        SimCmd::Audit { order, primes } => {
            let table = symbolic_moment_audit(*order, *primes);
            #[derive(Serialize)]
            struct Out {
                order: u32,
                prime_count: u32,
                rows: usize,
                case1_max_expectation: f64,
                case3_total_coefficient: u64,
                case3_per_ordered_tuple: f64,
                unit_amplitude_total: [f64; 2],
            }
            let out = Out {
                order: table.order,
                prime_count: table.prime_count,
                rows: table.rows.len(),
                case1_max_expectation: table.case1_max_expectation,
                case3_total_coefficient: table.case3_total_coefficient,
                case3_per_ordered_tuple: table.case3_per_ordered_tuple,
                unit_amplitude_total: [
                    table.unit_amplitude_total.re,
                    table.unit_amplitude_total.im,
                ],
            };
            em.emit("audit.json", &json_line(&out)?)?;
            em.finish_manifest("sim audit", &out.order, None)
        }
        SimCmd::Zerodensity {
            theta,
            log_t,
            height,
            n,
            k,
            delta,
            draws,
        } => {
            let cfg = ZeroEnsembleConfig::new(*theta, *log_t, *height, *n, *k, *delta)?;
            let seed = g.seed.unwrap_or(0);
            let (lhs, rhs) = zero_density_harness(&cfg, seed, *draws)?;
            #[derive(Serialize)]
            struct Out {
                lhs: f64,
                rhs_bound: f64,
                floor_case: f64,
                pass: bool,
            }
            let out = Out {
                lhs,
                rhs_bound: rhs,
                floor_case: floor_case_value(&cfg),
                pass: lhs <= rhs,
            };
            em.emit("zerodensity.json", &json_line(&out)?)?;
            em.finish_manifest("sim zerodensity", &out.lhs, Some(seed))?;
            if !out.pass {
                return Err(fail(EXIT_NUMERICAL, "ensemble average exceeds frozen bound"));
            }
            Ok(())
        }
    }
}

fn run_ingest(cmd: &IngestCmd, g: &GlobalArgs, em: &mut Emitter) -> CliResult<()> {
    match cmd {
        IngestCmd::Lmfdb { limit } => {
            let url = std::env::var("ARGSTAT_LMFDB_URL").ok();
            let outcome = ingest_lmfdb(url.as_deref(), *limit, g.fixture.as_deref())?;
            if !outcome.rejects.is_empty() && !g.lenient {
                let (label, reason) = &outcome.rejects[0];
                return Err(fail(
                    EXIT_VALIDATION,
                    format!("record '{label}' quarantined: {reason}"),
                ));
            }
            em.emit("forms.json", &serialize_form_file(&outcome.forms)?)?;
            if !outcome.rejects.is_empty() {
                em.emit("rejects.json", &json_line(&outcome.rejects)?)?;
            }
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            em.finish_manifest("ingest lmfdb", limit, None)
        }
    }
}

fn run_report(cmd: &ReportCmd, g: &GlobalArgs, em: &mut Emitter) -> CliResult<()> {
    match cmd {
        ReportCmd::Render { input } => {
            let text = std::fs::read_to_string(input)
                .map_err(|e| fail(EXIT_MISSING_DATA, format!("cannot read {input:?}: {e}")))?;
            let report: argstat::familysim::MomentReport = serde_json::from_str(&text)
                .map_err(|e| fail(EXIT_VALIDATION, format!("bad report: {e}")))?;
            match g.format.as_deref() {
                Some("svg") => {
                    let caption = format!("rendered from {}", file_name(input));
                    em.emit("report.svg", &moment_bars_svg(&report, &caption))?;
                }
                Some("json") => em.emit("report.json", &json_line(&report)?)?,
                _ => em.emit("report.csv", &moment_report_csv(&report))?,
            }
            em.finish_manifest("report render", &file_name(input), None)
        }
    }
}

fn file_name(p: &Path) -> String {
    p.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
