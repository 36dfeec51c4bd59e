//! Command-line front end: coefficient tables, λ_n tables, outcome tables and
//! oracle verification, rendered as text, CSV or JSON.
//!
//! CSV numbers use 17 significant digits; JSON numbers use the shortest
//! representation that parses back to the same double. Text tables show 8
//! decimals. Output is deterministic for a fixed configuration.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::analytic::{self, QubitState};
use crate::eigen::{self, CoefficientProfile};
use crate::error::Error;
use crate::fock;

/// Renormalizing a profile file or input state by more than this is reported.
pub const RENORMALIZE_WARN: f64 = 1e-9;

/// Every variant maps to exit status 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Parser)]
#[command(
    name = "klm-hifi",
    version,
    about = "Optimal ancilla states and success-probability bounds for high-fidelity KLM teleportation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal coefficients f(0..n) and λ_n.
    Coefficients {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// λ_n for n = 1..n-max next to the closed forms and the uniform baseline.
    LambdaTable {
        #[arg(long = "n-max")]
        n_max: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Per-outcome probabilities and squared fidelities.
    Outcomes {
        #[command(flatten)]
        setup: ProtocolArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Check the Fock-space oracle against the closed forms on random inputs.
    Verify {
        #[command(flatten)]
        setup: ProtocolArgs,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Eigensolver bisection width for `coefficients`/`lambda-table`;
    /// pass/fail threshold for `verify` (default 1e-9 there).
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProtocolArgs {
    /// Number of ancilla pairs. May be omitted with `--profile file:PATH`.
    #[arg(long)]
    pub n: Option<usize>,
    /// `optimal`, `uniform` or `file:PATH` (one coefficient per line).
    #[arg(long, default_value = "optimal")]
    pub profile: String,
    #[arg(long = "alpha-re", allow_negative_numbers = true)]
    pub alpha_re: Option<f64>,
    #[arg(long = "alpha-im", allow_negative_numbers = true)]
    pub alpha_im: Option<f64>,
    #[arg(long = "beta-re", allow_negative_numbers = true)]
    pub beta_re: Option<f64>,
    #[arg(long = "beta-im", allow_negative_numbers = true)]
    pub beta_im: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProfileKind {
    Optimal,
    Uniform,
    File(PathBuf),
}

impl ProfileKind {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "optimal" => Ok(Self::Optimal),
            "uniform" => Ok(Self::Uniform),
            _ => match s.strip_prefix("file:") {
                Some(path) if !path.is_empty() => Ok(Self::File(PathBuf::from(path))),
                _ => Err(CliError::Usage(format!(
                    "unknown profile '{s}' (expected optimal, uniform or file:PATH)"
                ))),
            },
        }
    }

    fn label(&self) -> String {
        match self {
            Self::Optimal => "optimal".into(),
            Self::Uniform => "uniform".into(),
            Self::File(p) => format!("file:{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Coefficients,
    LambdaTable,
    Outcomes,
    Verify,
}

/// Fully resolved invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    /// `n` for most commands, `n_max` for `lambda-table`.
    pub n: usize,
    pub profile_kind: ProfileKind,
    pub input_state: Option<(Complex64, Complex64)>,
    pub seed: u64,
    pub trials: usize,
    pub tol: f64,
    pub format: Format,
    pub output_path: Option<PathBuf>,
    pub oracle_cap: usize,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let base = |command, n, common: &CommonArgs, default_tol| RunConfig {
            command,
            n,
            profile_kind: ProfileKind::Optimal,
            input_state: None,
            seed: 0,
            trials: 0,
            tol: common.tol.unwrap_or(default_tol),
            format: common.format,
            output_path: common.output.clone(),
            oracle_cap: fock::oracle_cap_from_env(),
        };
        let config = match cli.command {
            Command::Coefficients { n, common } => {
                base(CommandKind::Coefficients, n, &common, eigen::DEFAULT_TOL)
            }
            Command::LambdaTable { n_max, common } => {
                base(CommandKind::LambdaTable, n_max, &common, eigen::DEFAULT_TOL)
            }
            Command::Outcomes { setup, common } => {
                let mut c = base(CommandKind::Outcomes, 0, &common, eigen::DEFAULT_TOL);
                c.apply_setup(&setup)?;
                c
            }
            Command::Verify {
                setup,
                seed,
                trials,
                common,
            } => {
                let mut c = base(CommandKind::Verify, 0, &common, 1e-9);
                c.apply_setup(&setup)?;
                c.seed = seed;
                c.trials = trials;
                c
            }
        };
        config.validate()?;
        Ok(config)
    }

    fn apply_setup(&mut self, setup: &ProtocolArgs) -> Result<(), CliError> {
        self.profile_kind = ProfileKind::parse(&setup.profile)?;
        self.n = match (&self.profile_kind, setup.n) {
            (_, Some(n)) => n,
            (ProfileKind::File(_), None) => 0,
            (_, None) => return Err(CliError::Usage("--n is required".into())),
        };
        let parts = [setup.alpha_re, setup.alpha_im, setup.beta_re, setup.beta_im];
        if parts.iter().any(Option::is_some) {
            let [ar, ai, br, bi] = parts.map(|p| p.unwrap_or(0.0));
            self.input_state = Some((Complex64::new(ar, ai), Complex64::new(br, bi)));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let from_file = matches!(self.profile_kind, ProfileKind::File(_));
        if self.n == 0 && !from_file {
            return Err(CliError::Usage(match self.command {
                CommandKind::LambdaTable => "--n-max must be at least 1".into(),
                _ => "--n must be at least 1".into(),
            }));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::Usage("--tol must be positive".into()));
        }
        if self.command == CommandKind::Verify {
            if self.n > self.oracle_cap {
                return Err(CliError::Usage(format!(
                    "n = {} exceeds the oracle cap of {} (set KLM_HIFI_ORACLE_CAP to raise it)",
                    self.n, self.oracle_cap
                )));
            }
            if self.trials == 0 {
                return Err(CliError::Usage("--trials must be at least 1".into()));
            }
        }
        Ok(())
    }

    /// Loads or builds the coefficient profile; `warn` receives
    /// renormalization notices.
    pub fn profile(&self, warn: &mut dyn FnMut(String)) -> Result<CoefficientProfile, CliError> {
        match &self.profile_kind {
            ProfileKind::Optimal => Ok(eigen::optimal_profile(self.n, eigen::DEFAULT_TOL)?),
            ProfileKind::Uniform => Ok(eigen::uniform_profile(self.n)?),
            ProfileKind::File(path) => {
                let profile = load_profile(path, warn)?;
                if self.n != 0 && self.n != profile.n() {
                    return Err(CliError::Usage(format!(
                        "--n {} disagrees with {} coefficients in {} (n = {})",
                        self.n,
                        profile.n() + 1,
                        path.display(),
                        profile.n()
                    )));
                }
                if self.command == CommandKind::Verify && profile.n() > self.oracle_cap {
                    return Err(CliError::Usage(format!(
                        "n = {} exceeds the oracle cap of {} (set KLM_HIFI_ORACLE_CAP to raise it)",
                        profile.n(),
                        self.oracle_cap
                    )));
                }
                Ok(profile)
            }
        }
    }

    pub fn psi(&self, warn: &mut dyn FnMut(String)) -> Result<QubitState, CliError> {
        let Some((alpha, beta)) = self.input_state else {
            return Ok(QubitState::plus());
        };
        let norm_sq = alpha.norm_sqr() + beta.norm_sqr();
        let psi = QubitState::normalized(alpha, beta)
            .map_err(|_| CliError::Usage("input state must be nonzero and finite".into()))?;
        let dev = (norm_sq.sqrt() - 1.0).abs();
        if dev > RENORMALIZE_WARN {
            warn(format!(
                "warning: input state renormalized (norm was {})",
                norm_sq.sqrt()
            ));
        }
        Ok(psi)
    }
}

/// One real per line; blank lines and `#` comments are skipped.
pub fn load_profile(
    path: &Path,
    warn: &mut dyn FnMut(String),
) -> Result<CoefficientProfile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| {
            CliError::Usage(format!(
                "{}:{}: not a number: '{line}'",
                path.display(),
                lineno + 1
            ))
        })?;
        values.push(v);
    }
    let (profile, dev) = CoefficientProfile::normalized(values)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    if dev > RENORMALIZE_WARN {
        warn(format!(
            "warning: {} renormalized (norm was off by {dev:e})",
            path.display()
        ));
    }
    Ok(profile)
}

/// Rendered output plus the process exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rendered {
    pub body: String,
    pub exit_code: i32,
}

pub fn run(config: &RunConfig, warn: &mut dyn FnMut(String)) -> Result<Rendered, CliError> {
    let body = match config.command {
        CommandKind::Coefficients => cmd_coefficients(config)?,
        CommandKind::LambdaTable => cmd_lambda_table(config)?,
        CommandKind::Outcomes => cmd_outcomes(config, warn)?,
        CommandKind::Verify => {
            let (body, passed) = cmd_verify(config, warn)?;
            return Ok(Rendered {
                body,
                exit_code: if passed { 0 } else { 1 },
            });
        }
    };
    Ok(Rendered { body, exit_code: 0 })
}

/// Parses `args`, runs, and writes the result. Returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut warn = |msg: String| eprintln!("{msg}");
    let result = RunConfig::from_cli(cli).and_then(|config| {
        let rendered = run(&config, &mut warn)?;
        emit(&config, &rendered.body)?;
        Ok(rendered.exit_code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn emit(config: &RunConfig, body: &str) -> Result<(), CliError> {
    match &config.output_path {
        Some(path) => std::fs::write(path, body).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

fn csv_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn text_num(x: f64) -> String {
    format!("{x:.8}")
}

fn to_json<T: Serialize>(value: &T) -> String {
    // via Value so that re-rendering a parsed document is byte-identical
    let v = serde_json::to_value(value).expect("report types serialize");
    let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
    s.push('\n');
    s
}

/// Re-renders a JSON document in the canonical layout used by the CLI.
pub fn canonical_json(text: &str) -> serde_json::Result<String> {
    let v: serde_json::Value = serde_json::from_str(text)?;
    Ok(to_json(&v))
}

#[derive(Debug, Serialize)]
struct CoefficientsReport {
    n: usize,
    lambda_solved: f64,
    lambda_closed: f64,
    coefficients: Vec<f64>,
}

pub fn cmd_coefficients(config: &RunConfig) -> Result<String, CliError> {
    let n = config.n;
    let pair = eigen::largest_eigenpair(&eigen::build_matrix_a(n)?, config.tol)?;
    let report = CoefficientsReport {
        n,
        lambda_solved: pair.value,
        lambda_closed: eigen::closed_form_lambda(n),
        coefficients: pair.vector,
    };
    Ok(match config.format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut s = String::from("n,k,f,lambda_solved,lambda_closed\n");
            for (k, f) in report.coefficients.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "{n},{k},{},{},{}",
                    csv_num(*f),
                    csv_num(report.lambda_solved),
                    csv_num(report.lambda_closed)
                );
            }
            s
        }
        Format::Text => {
            let mut s = format!("n = {n}\n");
            let _ = writeln!(
                s,
                "lambda (solved)      = {}",
                text_num(report.lambda_solved)
            );
            let _ = writeln!(
                s,
                "lambda (closed form) = {}",
                text_num(report.lambda_closed)
            );
            let _ = writeln!(s, "{:>6}  {:>12}", "k", "f(k)");
            for (k, f) in report.coefficients.iter().enumerate() {
                let _ = writeln!(s, "{k:>6}  {:>12}", text_num(*f));
            }
            s
        }
    })
}

#[derive(Debug, Serialize)]
struct LambdaRow {
    n: usize,
    lambda_solved: f64,
    lambda_closed: f64,
    mu_solved: f64,
    lambda_from_mu: f64,
    uniform_baseline: f64,
    gap_closed: f64,
    gap_mu: f64,
    one_minus_lambda: f64,
    n2_deficit: f64,
}

#[derive(Debug, Serialize)]
struct LambdaTable {
    rows: Vec<LambdaRow>,
}

pub fn cmd_lambda_table(config: &RunConfig) -> Result<String, CliError> {
    let mut rows = Vec::with_capacity(config.n);
    for n in 1..=config.n {
        let lambda = eigen::largest_eigenpair(&eigen::build_matrix_a(n)?, config.tol)?.value;
        let mu = eigen::largest_eigenpair(&eigen::build_matrix_b(n)?, config.tol)?.value;
        let closed = eigen::closed_form_lambda(n);
        let from_mu = 0.5 + mu / 4.0;
        let nf = n as f64;
        rows.push(LambdaRow {
            n,
            lambda_solved: lambda,
            lambda_closed: closed,
            mu_solved: mu,
            lambda_from_mu: from_mu,
            uniform_baseline: nf / (nf + 1.0),
            gap_closed: (lambda - closed).abs(),
            gap_mu: (lambda - from_mu).abs(),
            one_minus_lambda: 1.0 - lambda,
            n2_deficit: nf * nf * (1.0 - lambda),
        });
    }
    Ok(match config.format {
        Format::Json => to_json(&LambdaTable { rows }),
        Format::Csv => {
            let mut s = String::from(
                "n,lambda_solved,lambda_closed,mu_solved,lambda_from_mu,uniform_baseline,\
                 gap_closed,gap_mu,one_minus_lambda,n2_deficit\n",
            );
            for r in &rows {
                let nums = [
                    r.lambda_solved,
                    r.lambda_closed,
                    r.mu_solved,
                    r.lambda_from_mu,
                    r.uniform_baseline,
                    r.gap_closed,
                    r.gap_mu,
                    r.one_minus_lambda,
                    r.n2_deficit,
                ]
                .map(csv_num);
                let _ = writeln!(s, "{},{}", r.n, nums.join(","));
            }
            s
        }
        Format::Text => {
            let mut s = format!(
                "{:>6}  {:>12}  {:>12}  {:>12}  {:>12}  {:>10}  {:>10}  {:>12}  {:>12}\n",
                "n",
                "lambda",
                "closed",
                "mu",
                "uniform",
                "|gap|",
                "|gap_mu|",
                "1-lambda",
                "n^2(1-lam)"
            );
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{:>6}  {:>12}  {:>12}  {:>12}  {:>12}  {:>10.2e}  {:>10.2e}  {:>12}  {:>12}",
                    r.n,
                    text_num(r.lambda_solved),
                    text_num(r.lambda_closed),
                    text_num(r.mu_solved),
                    text_num(r.uniform_baseline),
                    r.gap_closed,
                    r.gap_mu,
                    text_num(r.one_minus_lambda),
                    text_num(r.n2_deficit)
                );
            }
            s
        }
    })
}

#[derive(Debug, Serialize)]
struct OutcomeRow {
    k: usize,
    probability: f64,
    fidelity_sq: Option<f64>,
    cumulative_success: f64,
}

#[derive(Debug, Serialize)]
struct OutcomesReport {
    n: usize,
    profile: String,
    alpha: [f64; 2],
    beta: [f64; 2],
    outcomes: Vec<OutcomeRow>,
    success_probability: f64,
    lambda_n: Option<f64>,
}

pub fn cmd_outcomes(config: &RunConfig, warn: &mut dyn FnMut(String)) -> Result<String, CliError> {
    let profile = config.profile(warn)?;
    let psi = config.psi(warn)?;
    let table = analytic::full_outcome_table(&psi, &profile);
    let mut cumulative = 0.0;
    let outcomes: Vec<OutcomeRow> = table
        .iter()
        .map(|r| {
            cumulative += r.fidelity_sq.unwrap_or(0.0) * r.probability;
            OutcomeRow {
                k: r.k,
                probability: r.probability,
                fidelity_sq: r.fidelity_sq,
                cumulative_success: cumulative,
            }
        })
        .collect();
    let n = profile.n();
    let report = OutcomesReport {
        n,
        profile: config.profile_kind.label(),
        alpha: [psi.alpha().re, psi.alpha().im],
        beta: [psi.beta().re, psi.beta().im],
        outcomes,
        success_probability: analytic::success_probability(&psi, &profile),
        lambda_n: (config.profile_kind == ProfileKind::Optimal)
            .then(|| eigen::closed_form_lambda(n)),
    };
    Ok(match config.format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut s = String::from("k,probability,fidelity_sq,cumulative_success\n");
            for r in &report.outcomes {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    r.k,
                    csv_num(r.probability),
                    r.fidelity_sq.map(csv_num).unwrap_or_default(),
                    csv_num(r.cumulative_success)
                );
            }
            s
        }
        Format::Text => {
            let mut s = format!(
                "n = {n}, profile = {}, psi = ({:+.8}{:+.8}i)|0> + ({:+.8}{:+.8}i)|1>\n",
                report.profile, report.alpha[0], report.alpha[1], report.beta[0], report.beta[1]
            );
            let _ = writeln!(
                s,
                "{:>6}  {:>12}  {:>12}  {:>12}",
                "k", "p_k", "fidelity^2", "cumulative"
            );
            for r in &report.outcomes {
                let fid = r.fidelity_sq.map(text_num).unwrap_or_else(|| "fail".into());
                let _ = writeln!(
                    s,
                    "{:>6}  {:>12}  {:>12}  {:>12}",
                    r.k,
                    text_num(r.probability),
                    fid,
                    text_num(r.cumulative_success)
                );
            }
            let _ = writeln!(
                s,
                "success probability = {}",
                text_num(report.success_probability)
            );
            if let Some(lambda) = report.lambda_n {
                let _ = writeln!(
                    s,
                    "lambda_n = {} (lower bound; excess {:.2e})",
                    text_num(lambda),
                    report.success_probability - lambda
                );
            }
            s
        }
    })
}

#[derive(Debug, Serialize)]
struct CheckRow {
    check: &'static str,
    max_deviation: f64,
    tol: f64,
    passed: bool,
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    n: usize,
    profile: String,
    seed: u64,
    trials: usize,
    checks: Vec<CheckRow>,
    passed: bool,
}

/// Draws `|α|²` and the relative phase uniformly from a ChaCha8 stream.
pub fn random_inputs(seed: u64, trials: usize) -> Vec<QubitState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .map(|_| {
            let weight: f64 = rng.random();
            let phase = rng.random_range(0.0..TAU);
            QubitState::from_weight_phase(weight, phase).expect("weight drawn from [0, 1)")
        })
        .collect()
}

pub fn cmd_verify(
    config: &RunConfig,
    warn: &mut dyn FnMut(String),
) -> Result<(String, bool), CliError> {
    let profile = config.profile(warn)?;
    let n = profile.n();
    let mut dev_sum: f64 = 0.0;
    let mut dev_pk: f64 = 0.0;
    let mut dev_state: f64 = 0.0;
    let mut dev_success: f64 = 0.0;
    let mut dev_phase: f64 = 0.0;
    let mut phases: BTreeMap<fock::OccupationVector, f64> = BTreeMap::new();

    for psi in random_inputs(config.seed, config.trials) {
        let records = fock::simulate_protocol_with_cap(&psi, &profile, config.oracle_cap)?;
        let total: f64 = records.iter().map(|r| r.probability).sum();
        dev_sum = dev_sum.max((total - 1.0).abs());

        let table = analytic::full_outcome_table(&psi, &profile);
        for (k, p) in fock::probabilities_by_k(&records, n).iter().enumerate() {
            dev_pk = dev_pk.max((p - table[k].probability).abs());
        }
        for r in &records {
            let (Some(state), Some(want)) = (r.corrected_state(), table[r.k].state) else {
                continue;
            };
            dev_state = dev_state.max(1.0 - analytic::fidelity_sq(&want, &state));
            let c = r.conditional.expect("corrected state implies conditional");
            if c.alpha().norm() > 1e-6 && c.beta().norm() > 1e-6 {
                let phi = r.correction_phase.unwrap_or(0.0);
                let first = *phases.entry(r.pattern.clone()).or_insert(phi);
                let d = (phi - first).rem_euclid(TAU);
                dev_phase = dev_phase.max(d.min(TAU - d));
            }
        }
        let oracle = fock::expected_fidelity_sq(&records, &psi);
        dev_success =
            dev_success.max((oracle - analytic::success_probability(&psi, &profile)).abs());
    }

    let tol = config.tol;
    let checks: Vec<CheckRow> = [
        ("probability_sum", dev_sum),
        ("per_k_probability", dev_pk),
        ("conditional_state", dev_state),
        ("expected_fidelity_sq", dev_success),
        ("correction_phase_universality", dev_phase),
    ]
    .into_iter()
    .map(|(check, max_deviation)| CheckRow {
        check,
        max_deviation,
        tol,
        passed: max_deviation <= tol,
    })
    .collect();
    let passed = checks.iter().all(|c| c.passed);
    let report = VerifyReport {
        n,
        profile: config.profile_kind.label(),
        seed: config.seed,
        trials: config.trials,
        checks,
        passed,
    };
    let verdict = if passed { "PASS" } else { "FAIL" };
    let body = match config.format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut s = String::from("check,max_deviation,tol,passed\n");
            for c in &report.checks {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    c.check,
                    csv_num(c.max_deviation),
                    csv_num(c.tol),
                    c.passed
                );
            }
            s
        }
        Format::Text => {
            let mut s = format!(
                "verify n = {n}, profile = {}, seed = {}, trials = {}\n",
                report.profile, report.seed, report.trials
            );
            for c in &report.checks {
                let _ = writeln!(
                    s,
                    "{:<30}  max dev {:.3e}  tol {:.1e}  {}",
                    c.check,
                    c.max_deviation,
                    c.tol,
                    if c.passed { "ok" } else { "FAIL" }
                );
            }
            let _ = writeln!(s, "{verdict}");
            s
        }
    };
    Ok((body, passed))
}
