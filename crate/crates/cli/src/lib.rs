//! Command-line front end: configs in, JSON reports and CSV profiles out.
//!
//! Exit codes: 0 success, 1 configuration or validation failure (including
//! failed hypothesis checks and failed regression criteria), 2 no
//! convergence, 3 disagreement between the operator and shooting methods.

pub mod config;
pub mod suite;

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use bvp4_core::hypotheses::{
    check_H4, check_H6, check_growth, check_structural, cone_check, verify_solution, Condition,
    HypothesisReport,
};
use bvp4_core::kernel::constants_report;
use bvp4_core::operator::{find_positive_solutions, solve, GridFunction, Method, POSITIVE_NORM_FLOOR};
use bvp4_core::shooting::{
    agreement_error, integrate_ivp, params_from_grid, refine, scan_and_refine, ShootingRoot,
    ShootingSettings, DEFAULT_STEPS,
};
use bvp4_core::{Error as CoreError, ProblemSpec};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use config::{ConfigError, ProblemConfig, ScanConfig};
use suite::{Example, Fixtures, Outcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NO_CONVERGENCE: i32 = 2;
pub const EXIT_DISAGREEMENT: i32 = 3;

/// Relative (a, b) distance under which a scan root and an operator
/// solution count as the same solution.
const MATCH_TOL: f64 = 1e-4;
/// Largest accepted agreement error between the two methods.
const AGREEMENT_TOL: f64 = 1e-4;

#[derive(Debug, Parser)]
#[command(name = "bvp4", version, about = "Positive solutions of u'''' + f(t, u) = 0 with a nonlocal boundary condition")]
struct Cli {
    /// Problem configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Cone parameter in (0, 1/2); overrides the config.
    #[arg(long, global = true)]
    theta: Option<f64>,
    /// Output file (solve) or directory (multi).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Machine-readable output where a human-readable form exists.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve for one fixed point and write its profile as CSV.
    Solve {
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        /// Constant initial guess.
        #[arg(long, default_value_t = 0.0)]
        seed_const: f64,
    },
    /// Print k, theta, Psi, Phi, Lambda1 and Lambda2.
    Constants,
    /// Check structural conditions and growth hypotheses.
    Check {
        /// Comma-separated names among C1, C2, C3, H1 to H6.
        #[arg(long, default_value = "C1,C2,C3", value_delimiter = ',')]
        hypothesis: Vec<String>,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        /// Bound for H4 or H6; defaults to Lambda1 or Lambda2.
        #[arg(long = "M")]
        m: Option<f64>,
    },
    /// Find all positive solutions and cross-check them by shooting.
    Multi {
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Run only the shooting scan.
    Oracle {
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Run the regression criteria on the bundled examples.
    Examples {
        /// Restrict to one example, e.g. 5.4.
        #[arg(long)]
        only: Option<String>,
        /// Directory holding ex51.json to ex54.json instead of the bundled copies.
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum MethodArg {
    Picard,
    Newton,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Picard => Method::Picard,
            MethodArg::Newton => Method::Newton,
        }
    }
}

#[derive(Debug, Args)]
struct ScanArgs {
    /// Range of a = u(0), as "lo,hi".
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    a_range: Option<(f64, f64)>,
    /// Range of b = u'''(0), as "lo,hi".
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    b_range: Option<(f64, f64)>,
    /// Cells per axis.
    #[arg(long)]
    scan_grid: Option<usize>,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected \"lo,hi\"")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("{e}"))?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(format!("{s} is not a finite increasing range"));
    }
    Ok((lo, hi))
}

/// A failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn config(message: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.to_string(),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Self::config(e)
    }
}

/// Solver errors map to exit 2, everything else to exit 1.
fn core_failure(e: CoreError) -> Failure {
    let code = match e {
        CoreError::NoConvergence { .. }
        | CoreError::Divergence { .. }
        | CoreError::SingularJacobian { .. }
        | CoreError::NonFinite { .. } => EXIT_NO_CONVERGENCE,
        _ => EXIT_CONFIG,
    };
    Failure {
        code,
        message: e.to_string(),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32, Failure> {
    if let Command::Examples { only, fixtures } = &cli.command {
        return cmd_examples(only.as_deref(), fixtures.as_deref(), cli.json);
    }
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| Failure::config("--config is required for this command"))?;
    let config = ProblemConfig::load(path)?;
    let theta = match cli.theta {
        Some(t) if !(t > 0.0 && t < 0.5) => {
            return Err(Failure::config(format!("--theta {t} is not in (0, 1/2)")))
        }
        Some(t) => t,
        None => config.theta(),
    };
    match &cli.command {
        Command::Solve { method, seed_const } => {
            cmd_solve(&config, method.map(Method::from), *seed_const, theta, cli.out.as_deref())
        }
        Command::Constants => cmd_constants(&config, theta),
        Command::Check { hypothesis, rho, m } => cmd_check(&config, hypothesis, *rho, *m, theta),
        Command::Multi { scan } => cmd_multi(&config, scan, cli.out.as_deref()),
        Command::Oracle { scan } => cmd_oracle(&config, scan),
        Command::Examples { .. } => unreachable!(),
    }
}

fn print_json(value: &impl Serialize) {
    let line = serde_json::to_string(value).expect("reports serialize");
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
}

/// Writes `u` as CSV with header "t,u" and 17 significant digits.
pub fn write_csv(path: &Path, u: &GridFunction) -> std::io::Result<()> {
    fs::write(path, csv_string(u))
}

pub fn csv_string(u: &GridFunction) -> String {
    let mut s = String::with_capacity(48 * (u.len() + 1));
    s.push_str("t,u\n");
    for (t, v) in u.nodes().zip(u.values()) {
        s.push_str(&format!("{t:.16e},{v:.16e}\n"));
    }
    s
}

fn csv_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::config(format!("cannot write {}: {e}", path.display()))
}

fn cmd_solve(
    config: &ProblemConfig,
    method: Option<Method>,
    seed: f64,
    theta: f64,
    out: Option<&Path>,
) -> Result<i32, Failure> {
    let problem = config.problem()?;
    let settings = config.solve_settings(method)?;
    if !seed.is_finite() {
        return Err(Failure::config("--seed-const must be finite"));
    }
    let u0 = GridFunction::constant(settings.grid_n, seed).map_err(core_failure)?;
    let sol = solve(&problem, &settings, &u0).map_err(core_failure)?;
    let cone = cone_check(&sol.u, theta).map_err(core_failure)?;
    let verify = verify_solution(&sol.u, &problem);
    let path = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("solution.csv"));
    write_csv(&path, &sol.u).map_err(|e| csv_failure(&path, e))?;

    let norm = sol.u.sup_norm();
    let status = if sol.u.min_value() < -POSITIVE_NORM_FLOOR {
        "negative"
    } else if norm < POSITIVE_NORM_FLOOR {
        "trivial"
    } else {
        "converged"
    };
    print_json(&json!({
        "status": status,
        "method": settings.method,
        "iterations": sol.iterations,
        "sup_norm": norm,
        "residual": sol.residual,
        "cone": cone.verdict,
        "verify": verify.verdict,
        "csv": path.display().to_string(),
    }));
    match status {
        "converged" => Ok(EXIT_OK),
        "trivial" => {
            eprintln!("error: iteration collapsed to u = 0; no positive solution reached from this start");
            Ok(EXIT_NO_CONVERGENCE)
        }
        _ => {
            eprintln!("error: iteration converged to a sign-changing function");
            Ok(EXIT_NO_CONVERGENCE)
        }
    }
}

fn cmd_constants(config: &ProblemConfig, theta: f64) -> Result<i32, Failure> {
    let problem = config.problem()?;
    let report = constants_report(&problem, theta).map_err(Failure::config)?;
    print_json(&report);
    Ok(EXIT_OK)
}

fn cmd_check(
    config: &ProblemConfig,
    names: &[String],
    rho: f64,
    m: Option<f64>,
    theta: f64,
) -> Result<i32, Failure> {
    let conditions = names
        .iter()
        .map(|n| Condition::from_name(n).ok_or_else(|| Failure::config(format!("unknown hypothesis {n:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let problem = config.problem_unchecked()?;
    let declared = config.declared_limits()?;
    let mut structural: Option<Vec<HypothesisReport>> = None;
    let mut all_pass = true;
    for c in conditions {
        let report = match c {
            Condition::C1 | Condition::C2 | Condition::C3 => structural
                .get_or_insert_with(|| check_structural(&problem))
                .iter()
                .find(|r| r.condition == c)
                .cloned()
                .expect("structural checks cover C1 to C3"),
            Condition::H4 | Condition::H6 => {
                problem.validate().map_err(Failure::config)?;
                let constants = constants_report(&problem, theta).map_err(Failure::config)?;
                if c == Condition::H4 {
                    check_H4(&problem, theta, rho, m.unwrap_or(constants.lambda1))
                } else {
                    check_H6(&problem, theta, rho, m.unwrap_or(constants.lambda2))
                }
                .map_err(Failure::config)?
            }
            _ => check_growth(&problem, c, &declared),
        };
        all_pass &= report.verdict.passes();
        print_json(&report);
    }
    Ok(if all_pass { EXIT_OK } else { EXIT_CONFIG })
}

fn scan_window(config: &ProblemConfig, args: &ScanArgs) -> ScanConfig {
    let base = config.scan();
    ScanConfig {
        a_range: args.a_range.unwrap_or(base.a_range),
        b_range: args.b_range.unwrap_or(base.b_range),
        grid: args.scan_grid.unwrap_or(base.grid),
    }
}

fn run_scan(problem: &ProblemSpec, scan: &ScanConfig) -> Result<Vec<ShootingRoot>, Failure> {
    scan_and_refine(problem, scan.a_range, scan.b_range, scan.grid, &ShootingSettings::default())
        .map_err(Failure::config)
}

fn cmd_oracle(config: &ProblemConfig, args: &ScanArgs) -> Result<i32, Failure> {
    let problem = config.problem()?;
    let scan = scan_window(config, args);
    let roots = run_scan(&problem, &scan)?;
    print_json(&json!({ "scan": {
        "a_range": scan.a_range, "b_range": scan.b_range, "grid": scan.grid
    }, "roots": roots }));
    Ok(EXIT_OK)
}

fn relative_distance(x: (f64, f64), y: (f64, f64)) -> f64 {
    let d = |p: f64, q: f64| (p - q).abs() / p.abs().max(q.abs()).max(1.0);
    d(x.0, y.0).max(d(x.1, y.1))
}

#[derive(Debug, Serialize)]
struct MultiEntry {
    sup_norm: f64,
    a: f64,
    b: f64,
    iterations: usize,
    residual: f64,
    agreement: f64,
    matched_scan_root: Option<usize>,
    verify: bvp4_core::hypotheses::Verdict,
    csv: String,
}

fn cmd_multi(config: &ProblemConfig, args: &ScanArgs, out: Option<&Path>) -> Result<i32, Failure> {
    let problem = config.problem()?;
    let settings = config.solve_settings(Some(Method::Newton))?;
    let seeds = config.seeds()?;
    let solutions = find_positive_solutions(&problem, &settings, &seeds).map_err(core_failure)?;
    let scan = scan_window(config, args);
    let roots = run_scan(&problem, &scan)?;

    let dir = out.unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| csv_failure(dir, e))?;
    let mut entries = Vec::new();
    let mut matched = vec![false; roots.len()];
    let mut agree = true;
    for (i, sol) in solutions.iter().enumerate() {
        let path = dir.join(format!("solution_{i}.csv"));
        write_csv(&path, &sol.u).map_err(|e| csv_failure(&path, e))?;
        // A failed refinement leaves the agreement infinite, which is
        // reported as a disagreement.
        let (a, b, agreement) = match params_from_grid(&sol.u, &problem)
            .and_then(|(a, b)| refine(&problem, a, b, &ShootingSettings::default()))
        {
            Ok(root) => {
                let agreement = integrate_ivp(&problem, root.a, root.b, DEFAULT_STEPS)
                    .map(|s| agreement_error(&sol.u, &s))
                    .unwrap_or(f64::INFINITY);
                (root.a, root.b, agreement)
            }
            Err(_) => (f64::NAN, f64::NAN, f64::INFINITY),
        };
        let hit = roots
            .iter()
            .position(|r| relative_distance((a, b), (r.a, r.b)) < MATCH_TOL);
        if let Some(j) = hit {
            matched[j] = true;
        }
        agree &= agreement < AGREEMENT_TOL && hit.is_some();
        entries.push(MultiEntry {
            sup_norm: sol.u.sup_norm(),
            a,
            b,
            iterations: sol.iterations,
            residual: sol.residual,
            agreement,
            matched_scan_root: hit,
            verify: verify_solution(&sol.u, &problem).verdict,
            csv: path.display().to_string(),
        });
    }
    let unmatched: Vec<&ShootingRoot> = roots.iter().zip(&matched).filter(|(_, m)| !**m).map(|(r, _)| r).collect();
    agree &= unmatched.is_empty();
    print_json(&json!({
        "solutions": entries,
        "scan_roots": roots.len(),
        "unmatched_scan_roots": unmatched,
        "agree": agree,
    }));
    Ok(if agree { EXIT_OK } else { EXIT_DISAGREEMENT })
}

fn cmd_examples(only: Option<&str>, dir: Option<&Path>, json: bool) -> Result<i32, Failure> {
    let only = match only {
        None => None,
        Some(label) => Some(
            Example::from_label(label)
                .ok_or_else(|| Failure::config(format!("unknown example {label:?}; expected 5.1 to 5.4")))?,
        ),
    };
    let fixtures = match dir {
        Some(d) => Fixtures::from_dir(d)?,
        None => Fixtures::bundled(),
    };
    let mut failed = false;
    for id in 1..=11 {
        let r = suite::run_criterion(id, &fixtures, only);
        failed |= r.outcome == Outcome::Fail;
        if json {
            print_json(&r);
        } else {
            println!("{}", r.line());
        }
    }
    Ok(if failed { EXIT_CONFIG } else { EXIT_OK })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_parse() {
        assert_eq!(parse_range("-1e5, 2").unwrap(), (-1e5, 2.0));
        assert!(parse_range("3,1").is_err());
        assert!(parse_range("1").is_err());
        assert!(parse_range("a,1").is_err());
    }

    #[test]
    fn csv_has_seventeen_digits() {
        let u = GridFunction::from_fn(11, |t| t / 3.0).unwrap();
        let s = csv_string(&u);
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some("t,u"));
        let row: Vec<&str> = lines.nth(1).unwrap().split(',').collect();
        assert_eq!(row[1].parse::<f64>().unwrap(), u.values()[1]);
        for field in &row {
            let mantissa = field.split('e').next().unwrap().replace(['.', '-'], "");
            assert_eq!(mantissa.len(), 17);
        }
        assert_eq!(s.lines().count(), 12);
    }

    #[test]
    fn relative_distance_is_scale_aware() {
        assert!(relative_distance((22.7, 57515.0), (22.7, 57515.5)) < 1e-4);
        assert!(relative_distance((0.0, 0.0), (1e-3, 0.0)) > 1e-4);
    }

    #[test]
    fn help_exits_zero_and_bad_flags_exit_one() {
        assert_eq!(run(["bvp4", "--help"]), EXIT_OK);
        assert_eq!(run(["bvp4", "solve", "--bogus"]), EXIT_CONFIG);
        assert_eq!(run(["bvp4", "constants"]), EXIT_CONFIG);
    }
}
