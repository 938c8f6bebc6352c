//! Batch front end: each subcommand writes one CSV or JSON artifact.
//!
//! Exit status is 0 on success, 1 when a computed residual exceeds its
//! tolerance, 2 on bad input.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use torus_plasma::coulomb::{self, TorusGeometry};
use torus_plasma::error::Error;
use torus_plasma::landau::{self, MagneticSetup};
use torus_plasma::qtheta::{self, Nome, SeriesPrecision};
use torus_plasma::{acceptance, identities, ocp, tcg, universality};

#[derive(Parser, Debug)]
#[command(
    name = "torus-plasma",
    version,
    about = "Two-dimensional Coulomb systems on a periodic rectangle"
)]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct RunConfig {
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Relative truncation target for theta series.
    #[arg(long, global = true, default_value_t = 1e-16)]
    epsilon: f64,
    /// Cap on the number of series terms.
    #[arg(long = "max-terms", global = true, default_value_t = 4096)]
    max_terms: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// theta1, theta3, theta4 at real nome q and points z.
    Theta(ThetaArgs),
    /// Periodic and quasi-periodic potentials of a unit source on a grid.
    Greens(GreensArgs),
    /// Random-draw residuals of the determinant identities.
    VerifyIdentities(IdentityArgs),
    /// Lowest-Landau-level densities and the factorization self-test.
    Landau(LandauArgs),
    /// Plasma partition function: closed forms, free energy, numerical check.
    Ocp(OcpArgs),
    /// Coulomb-gas grand partition function and oracle convergence.
    Tcg(TcgArgs),
    /// The O(1) terms of the plasma, the gas and the free field side by side.
    Casimir(CasimirArgs),
    /// Runs the acceptance criteria A1..A9.
    Selftest,
}

#[derive(Args, Debug)]
struct ThetaArgs {
    #[arg(long)]
    q: f64,
    /// Real parts of the arguments.
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    z: Vec<f64>,
    /// Common imaginary part.
    #[arg(long, default_value_t = 0.0)]
    zi: f64,
    /// Allowed series/product discrepancy, relative to max(1, |theta1|).
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
}

#[derive(Args, Debug)]
struct GreensArgs {
    #[arg(long = "L", alias = "l", default_value_t = 1.0)]
    length: f64,
    #[arg(long = "W", alias = "w", default_value_t = 1.0)]
    width: f64,
    /// Points per side; samples sit at cell centres.
    #[arg(long, default_value_t = 32)]
    grid: usize,
    #[arg(long, default_value_t = 0.0)]
    x0: f64,
    #[arg(long, default_value_t = 0.0)]
    y0: f64,
    /// Allowed periodicity defect of the periodic potential.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum IdentityKind {
    Vandermonde,
    Frobenius,
    Both,
}

#[derive(Args, Debug)]
struct IdentityArgs {
    #[arg(long = "N", alias = "n")]
    n: usize,
    #[arg(long, default_value_t = 100)]
    draws: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0.3)]
    q: f64,
    #[arg(long, value_enum, default_value_t = IdentityKind::Both)]
    kind: IdentityKind,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args, Debug)]
struct LandauArgs {
    #[arg(long = "N", alias = "n")]
    n: usize,
    /// Period along x; the plasma mapping fixes W = N / L.
    #[arg(long = "L", alias = "l")]
    length: Option<f64>,
    #[arg(long, default_value_t = 24)]
    grid: usize,
    /// Single level to tabulate; all N levels when absent.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Configurations in the factorization self-test.
    #[arg(long, default_value_t = 50)]
    configs: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args, Debug)]
struct OcpArgs {
    #[arg(long = "N", alias = "n")]
    n: usize,
    #[arg(long = "L", alias = "l", default_value_t = 1.0)]
    length: f64,
    #[arg(long = "W", alias = "w", default_value_t = 1.0)]
    width: f64,
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    /// Required for the Monte Carlo check (N = 2, 3).
    #[arg(long)]
    seed: Option<u64>,
    /// Quadrature tolerance for N = 1.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Allowed Monte Carlo deviation in standard errors.
    #[arg(long, default_value_t = 3.0)]
    sigmas: f64,
}

#[derive(Args, Debug)]
struct TcgArgs {
    #[arg(long, default_value_t = 0.5)]
    zeta: f64,
    #[arg(long = "L", alias = "l", default_value_t = 1.0)]
    length: f64,
    #[arg(long = "W", alias = "w", default_value_t = 1.0)]
    width: f64,
    /// Paired modes kept in the closed form; the oracle uses n = -nmax..nmax-1.
    #[arg(long, default_value_t = 8)]
    nmax: usize,
    /// Coarsest oracle grid; 2M and 4M are also run. 0 skips the oracle.
    #[arg(long, default_value_t = 100)]
    grid: usize,
    /// Modes per unit length in the pressure and ladder fits.
    #[arg(long, default_value_t = 40.0)]
    cutoff: f64,
    /// Ladder lengths; W = (W/L) L on every rung.
    #[arg(long, value_delimiter = ',')]
    ladder: Option<Vec<f64>>,
    /// Allowed |closed / oracle - 1|.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
}

#[derive(Args, Debug)]
struct CasimirArgs {
    #[arg(long = "L", alias = "l", default_value_t = 1.0)]
    length: f64,
    #[arg(long = "W", alias = "w", default_value_t = 1.0)]
    width: f64,
    #[arg(long, default_value_t = 0.5)]
    zeta: f64,
    /// Allowed modular reconciliation residual.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

enum Failure {
    Usage(String),
    Tolerance(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::QuadratureNonConvergence { .. }
            | Error::PrecisionUnreachable { .. }
            | Error::FitIllConditioned(_)
            | Error::SingularConfiguration(_) => Failure::Tolerance(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(format!("output: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Usage(format!("output: {e}"))
    }
}

type CmdResult = Result<Report, Failure>;

/// What a subcommand produced: a structured record and a table.
/// CSV shows the table (or the flattened record), JSON shows both.
struct Report {
    record: Value,
    table: Option<Table>,
    /// Violations found; non-empty means exit 1 after writing.
    violations: Vec<String>,
}

struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    fn json(&self) -> Value {
        json!({ "columns": self.columns, "rows": self.rows })
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, x, out);
            }
        }
        Value::Array(xs) if xs.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in xs.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), x, out);
            }
        }
        _ => out.push((prefix.to_string(), v.clone())),
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        Value::Array(xs) => xs.iter().map(cell).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    }
}

fn emit(report: &Report, run: &RunConfig) -> Result<(), Failure> {
    let sink: Box<dyn Write> = match &run.out {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    };
    match run.format {
        Format::Json => {
            let mut doc = report.record.clone();
            if let (Some(t), Value::Object(map)) = (&report.table, &mut doc) {
                map.insert("table".into(), t.json());
            }
            let mut w = sink;
            serde_json::to_writer_pretty(&mut w, &doc).map_err(|e| Failure::Usage(format!("output: {e}")))?;
            writeln!(w)?;
            w.flush()?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(sink);
            match &report.table {
                Some(t) => {
                    w.write_record(&t.columns)?;
                    for row in &t.rows {
                        w.write_record(row.iter().map(cell))?;
                    }
                }
                None => {
                    let mut pairs = Vec::new();
                    flatten("", &report.record, &mut pairs);
                    w.write_record(["quantity", "value"])?;
                    for (k, v) in pairs {
                        w.write_record([k, cell(&v)])?;
                    }
                }
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn geometry(length: f64, width: f64, n: usize) -> Result<TorusGeometry, Failure> {
    Ok(TorusGeometry::new(length, width, n)?)
}

fn open_nome(q: f64) -> Result<Nome, Failure> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Failure::Usage(format!("nome must lie in (0, 1), got {q}")));
    }
    Ok(Nome::real(q)?)
}

fn c(z: Complex64) -> [Value; 2] {
    [json!(z.re), json!(z.im)]
}

fn theta(a: &ThetaArgs, run: &RunConfig) -> CmdResult {
    let nome = open_nome(a.q)?;
    let prec = SeriesPrecision::new(run.epsilon, run.max_terms)?;
    let mut t = Table::new(vec![
        "re_z",
        "im_z",
        "theta1_re",
        "theta1_im",
        "theta3_re",
        "theta3_im",
        "theta4_re",
        "theta4_im",
        "theta1_series_product_residual",
    ]);
    let mut violations = Vec::new();
    for &x in &a.z {
        let z = Complex64::new(x, a.zi);
        let t1 = qtheta::theta1_with(z, &nome, &prec)?;
        let t3 = qtheta::theta3_with(z, &nome, &prec)?;
        let t4 = qtheta::theta4_with(z, &nome, &prec)?;
        let s = qtheta::theta1_series(z, &nome, &prec)?;
        let p = qtheta::theta1_product(z, &nome, &prec)?;
        let res = (s - p).norm() / p.norm().max(1.0);
        if res > a.tol {
            violations.push(format!("series/product residual {res:.2e} at z = {z}"));
        }
        let mut row = Vec::new();
        row.extend(c(z));
        row.extend(c(t1));
        row.extend(c(t3));
        row.extend(c(t4));
        row.push(json!(res));
        t.rows.push(row);
    }
    let record = json!({
        "q": a.q,
        "theta1_prime_zero": qtheta::theta1_prime0(&nome).re,
        "eta": qtheta::eta_q(a.q)?,
    });
    Ok(Report {
        record,
        table: Some(t),
        violations,
    })
}

fn greens(a: &GreensArgs) -> CmdResult {
    if a.grid == 0 {
        return Err(Failure::Usage("grid must be >= 1".into()));
    }
    let g = geometry(a.length, a.width, 1)?;
    let zp = Complex64::new(a.x0, a.y0);
    let mut t = Table::new(vec!["x", "y", "phi_periodic", "phi_quasi"]);
    let mut worst = 0.0f64;
    for i in 0..a.grid {
        for j in 0..a.grid {
            let x = (i as f64 + 0.5) * g.length / a.grid as f64;
            let y = (j as f64 + 0.5) * g.width / a.grid as f64;
            let z = Complex64::new(x, y);
            let p = coulomb::phi_periodic(z, zp, &g)?;
            for s in [Complex64::new(g.length, 0.0), Complex64::new(0.0, g.width)] {
                worst = worst.max((coulomb::phi_periodic(z + s, zp, &g)? - p).abs());
            }
            t.rows.push(vec![
                json!(x),
                json!(y),
                json!(p),
                json!(coulomb::phi_quasi(z, zp, &g)?),
            ]);
        }
    }
    let violations = if worst > a.tol {
        vec![format!("periodicity defect {worst:.2e} > {:.1e}", a.tol)]
    } else {
        vec![]
    };
    let record = json!({ "length": g.length, "width": g.width, "source": [a.x0, a.y0], "periodicity_defect": worst });
    Ok(Report {
        record,
        table: Some(t),
        violations,
    })
}

fn verify_identities(a: &IdentityArgs) -> CmdResult {
    let seed = a.seed.ok_or_else(|| Failure::from(Error::SeedRequired))?;
    if a.n == 0 {
        return Err(Failure::Usage("N must be >= 1".into()));
    }
    let vandermonde = matches!(a.kind, IdentityKind::Vandermonde | IdentityKind::Both);
    let frobenius = matches!(a.kind, IdentityKind::Frobenius | IdentityKind::Both);
    if vandermonde && a.n < 2 && a.kind == IdentityKind::Vandermonde {
        return Err(Failure::Usage("the Vandermonde identity needs N >= 2".into()));
    }
    let nome = open_nome(a.q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Table::new(vec![
        "identity",
        "N",
        "q",
        "seed",
        "draw",
        "rel_residual",
        "abs_residual",
        "condition",
        "counted",
        "passed",
    ]);
    let (mut failures, mut redrawn, mut worst) = (0usize, 0usize, 0.0f64);
    let mut record = |t: &mut Table, name: &str, draw: usize, r: &identities::IdentityResidual| -> bool {
        let counted = r.well_conditioned(a.tol);
        let passed = r.passes(a.tol);
        t.rows.push(vec![
            json!(name),
            json!(a.n),
            json!(a.q),
            json!(seed),
            json!(draw),
            json!(r.rel_residual),
            json!(r.abs_residual),
            json!(r.condition),
            json!(counted),
            json!(passed),
        ]);
        if counted {
            worst = worst.max(r.rel_residual);
            failures += usize::from(!passed);
        } else {
            redrawn += 1;
        }
        counted
    };
    if vandermonde && a.n >= 2 {
        let (mut accepted, mut draw) = (0, 0);
        while accepted < a.draws {
            let xs = identities::random_points(&mut rng, a.n, &nome);
            let alpha = Complex64::new(rng.random_range(-0.5..0.5), 0.0);
            let r = identities::theta_vandermonde_residual(&xs, alpha, &nome, a.n)?;
            accepted += usize::from(record(&mut t, "vandermonde", draw, &r));
            draw += 1;
        }
    }
    if frobenius {
        let (mut accepted, mut draw) = (0, 0);
        while accepted < a.draws {
            let (ws, zs) = identities::random_point_pairs(&mut rng, a.n, &nome);
            let alpha = Complex64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.1..0.1));
            let r = identities::frobenius_residual(&ws, &zs, alpha, &nome)?;
            accepted += usize::from(record(&mut t, "frobenius", draw, &r));
            draw += 1;
        }
    }
    let violations = if failures > 0 {
        vec![format!("{failures} draws above {:.1e}", a.tol)]
    } else {
        vec![]
    };
    let summary = json!({
        "N": a.n, "q": a.q, "seed": seed, "draws": a.draws, "tolerance": a.tol,
        "max_rel_residual": worst, "failures": failures, "redrawn_ill_conditioned": redrawn,
    });
    Ok(Report {
        record: summary,
        table: Some(t),
        violations,
    })
}

fn landau_cmd(a: &LandauArgs) -> CmdResult {
    if a.grid == 0 {
        return Err(Failure::Usage("grid must be >= 1".into()));
    }
    let length = a.length.unwrap_or((a.n as f64).sqrt());
    let setup = MagneticSetup::plasma(a.n, length)?;
    let levels: Vec<usize> = match a.m {
        Some(m) if m >= a.n => return Err(Failure::Usage(format!("level m = {m} must be < N = {}", a.n))),
        Some(m) => vec![m],
        None => (0..a.n).collect(),
    };
    let mut t = Table::new(vec!["m", "x", "y", "density"]);
    for &m in &levels {
        for i in 0..a.grid {
            for j in 0..a.grid {
                let x = (i as f64 + 0.5) * setup.length / a.grid as f64;
                let y = (j as f64 + 0.5) * setup.w2 / a.grid as f64;
                let psi = landau::psi_lll(m, Complex64::new(x, y), &setup)?;
                t.rows.push(vec![json!(m), json!(x), json!(y), json!(psi.norm_sqr())]);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut first: Option<Complex64> = None;
    let mut spread = 0.0f64;
    for _ in 0..a.configs {
        let zs: Vec<Complex64> = (0..a.n)
            .map(|_| Complex64::new(rng.random_range(0.0..setup.length), rng.random_range(0.0..setup.w2)))
            .collect();
        let ratio = landau::slater_state(&zs, &setup)? / landau::factored_state(&zs, &setup)?;
        let r0 = *first.get_or_insert(ratio);
        spread = spread.max((ratio - r0).norm() / r0.norm());
    }
    let constant = first.unwrap_or_default();
    let violations = if spread > a.tol {
        vec![format!("slater/factored spread {spread:.2e} > {:.1e}", a.tol)]
    } else {
        vec![]
    };
    let record = json!({
        "setup": to_value(&setup),
        "factorization": {
            "seed": a.seed, "configs": a.configs, "constant": c(constant), "max_relative_spread": spread,
        },
    });
    Ok(Report {
        record,
        table: Some(t),
        violations,
    })
}

fn ocp_cmd(a: &OcpArgs) -> CmdResult {
    if a.n == 0 {
        return Err(Failure::Usage("N must be >= 1".into()));
    }
    let g = geometry(a.length, a.width, a.n)?;
    let chain = ocp::zn_closed(&g)?;
    let free = ocp::free_energy(&g)?;
    let mut violations = Vec::new();
    let check = match a.n {
        1 => {
            let chk = ocp::verify_partition_quadrature(&g, a.tol)?;
            if chk.rel_deviation > a.tol {
                violations.push(format!(
                    "quadrature rel deviation {:.2e} > {:.1e}",
                    chk.rel_deviation, a.tol
                ));
            }
            json!({ "method": "quadrature", "result": to_value(&chk) })
        }
        2 | 3 => {
            let chk = ocp::verify_partition_mc(&g, a.samples, a.seed)?;
            if chk.sigmas > a.sigmas {
                violations.push(format!("Monte Carlo deviation {:.2} sigma > {}", chk.sigmas, a.sigmas));
            }
            json!({ "method": "monte_carlo", "result": to_value(&chk) })
        }
        _ => Value::Null,
    };
    let record = json!({
        "geometry": to_value(&g),
        "closed_forms": to_value(&chain),
        "free_energy": to_value(&free),
        "integral_check": check,
    });
    Ok(Report {
        record,
        table: None,
        violations,
    })
}

fn tcg_cmd(a: &TcgArgs) -> CmdResult {
    let g = geometry(a.length, a.width, 0)?;
    if a.grid != 0 && a.grid < tcg::MIN_GRID {
        return Err(Error::GridTooCoarse {
            got: a.grid,
            min: tcg::MIN_GRID,
        }
        .into());
    }
    let closed = tcg::log_xi2_closed(a.zeta, &g, a.nmax)?;
    let grouped = tcg::log_xi2_grouped(a.zeta, &g, a.nmax)?;
    let ladder = a.ladder.clone().unwrap_or_else(tcg::default_ladder);
    let pressure = tcg::fit_pressure(a.zeta, a.cutoff, &ladder)?;
    let asymptotic = tcg::log_xi2_asymptotic(a.zeta, a.width / a.length, a.cutoff, &ladder)?;
    let mut violations = Vec::new();
    let mut t = Table::new(vec![
        "grid",
        "log_det",
        "log_xi2_oracle",
        "log_xi2_closed",
        "rel_deviation",
    ]);
    let mut oracle = Value::Null;
    if a.grid != 0 && a.nmax > 0 {
        let modes = -(a.nmax as i64)..=(a.nmax as i64 - 1);
        let log_t4sq = 2.0 * qtheta::theta4(Complex64::new(0.0, 0.0), &g.nome()?)?.re.ln();
        let row = |t: &mut Table, label: Value, det: f64| -> f64 {
            let rel = ((closed - log_t4sq - det).exp() - 1.0).abs();
            t.rows.push(vec![
                label,
                json!(det),
                json!(log_t4sq + det),
                json!(closed),
                json!(rel),
            ]);
            rel
        };
        let dets = [a.grid, 2 * a.grid, 4 * a.grid]
            .iter()
            .map(|&m| tcg::oracle_log_det(a.zeta, &g, modes.clone(), m))
            .collect::<Result<Vec<_>, _>>()?;
        for (m, d) in [a.grid, 2 * a.grid, 4 * a.grid].iter().zip(&dets) {
            row(&mut t, json!(m), *d);
        }
        let ext = tcg::extrapolated_log_det(a.zeta, &g, modes, a.grid)?;
        let rel = row(&mut t, json!("extrapolated"), ext);
        if rel > a.tol {
            violations.push(format!("closed form vs oracle {rel:.2e} > {:.1e}", a.tol));
        }
        oracle =
            json!({ "modes": [-(a.nmax as i64), a.nmax as i64 - 1], "log_xi2": log_t4sq + ext, "rel_deviation": rel });
    }
    let record = json!({
        "zeta": a.zeta,
        "length": g.length,
        "width": g.width,
        "nmax": a.nmax,
        "log_xi2_closed": closed,
        "log_xi2_grouped": grouped,
        "oracle": oracle,
        "pressure_fit": to_value(&pressure),
        "asymptotics": to_value(&asymptotic),
    });
    Ok(Report {
        record,
        table: Some(t),
        violations,
    })
}

fn casimir_cmd(a: &CasimirArgs) -> CmdResult {
    let g = geometry(a.length, a.width, 1)?;
    let rep = universality::casimir_report(&g, a.zeta)?;
    let mut violations = Vec::new();
    let r = rep.discrepancies.reconciliation_residual.abs();
    if r > a.tol {
        violations.push(format!("modular reconciliation residual {r:.2e} > {:.1e}", a.tol));
    }
    Ok(Report {
        record: to_value(&rep),
        table: None,
        violations,
    })
}

fn selftest() -> CmdResult {
    let outcomes = acceptance::run_all();
    let mut t = Table::new(vec!["criterion", "title", "passed", "seconds", "detail"]);
    let mut violations = Vec::new();
    for o in &outcomes {
        eprintln!("{o}");
        if !o.passed {
            violations.push(format!("{} failed", o.id));
        }
        t.rows.push(vec![
            json!(o.id),
            json!(o.title),
            json!(o.passed),
            json!(o.seconds),
            json!(o.detail),
        ]);
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    let record = json!({ "passed": passed, "total": outcomes.len() });
    Ok(Report {
        record,
        table: Some(t),
        violations,
    })
}

fn dispatch(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Theta(a) => theta(a, &cli.run),
        Command::Greens(a) => greens(a),
        Command::VerifyIdentities(a) => verify_identities(a),
        Command::Landau(a) => landau_cmd(a),
        Command::Ocp(a) => ocp_cmd(a),
        Command::Tcg(a) => tcg_cmd(a),
        Command::Casimir(a) => casimir_cmd(a),
        Command::Selftest => selftest(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = dispatch(&cli).and_then(|report| {
        emit(&report, &cli.run)?;
        if report.violations.is_empty() {
            Ok(())
        } else {
            Err(Failure::Tolerance(report.violations.join("; ")))
        }
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Tolerance(msg)) => {
            eprintln!("tolerance exceeded: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flatten_nests_with_dots() {
        let mut out = Vec::new();
        flatten("", &json!({"a": {"b": 1.5, "c": [1, 2]}, "d": null}), &mut out);
        let keys: Vec<&str> = out.iter().map(|(k, _)| k.as_str()).collect();
        assert_eq!(keys, ["a.b", "a.c", "d"]);
        assert_eq!(cell(&out[1].1), "1;2");
        assert_eq!(cell(&out[2].1), "");
    }

    #[test]
    fn error_classes_map_to_exit_codes() {
        assert!(matches!(Failure::from(Error::SeedRequired), Failure::Usage(_)));
        assert!(matches!(Failure::from(Error::NomeOutOfRange(0.0)), Failure::Usage(_)));
        let e = Error::QuadratureNonConvergence {
            estimate: 1.0,
            error: 1.0,
        };
        assert!(matches!(Failure::from(e), Failure::Tolerance(_)));
    }

    #[test]
    fn cli_parses() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
        let cli = Cli::try_parse_from(["torus-plasma", "ocp", "--N", "2", "--L", "1", "--seed", "3"]).unwrap();
        assert!(matches!(
            cli.command,
            Command::Ocp(OcpArgs {
                n: 2,
                seed: Some(3),
                ..
            })
        ));
    }
}
