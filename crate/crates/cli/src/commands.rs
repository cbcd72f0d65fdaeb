//! Subcommands. Each returns the rendered body; `main` decides where it goes.

use std::path::{Path, PathBuf};
use std::time::Instant;

use ascover_core::dworkmat::{build_frobenius, default_size, fredholm, np_from_fredholm, trace_formula_check};
use ascover_core::experiments::{run_convergence, run_nongeneric_probe, ExperimentSpec};
use ascover_core::ff::{Budget, DEFAULT_BUDGET};
use ascover_core::lfun::{integer_table, l_function, np_of_l, point_counts, scaled_np, zeta_numerator_from_counts, zeta_degree};
use ascover_core::nt::{primes_between, qi, Q};
use ascover_core::padic::PadicOrd;
use ascover_core::polygon::{hodge_polygon, hodge_slopes, lies_above, max_gap, slope_run_length, Polygon};
use ascover_core::ratfun::{reduce_mod_p, RationalFunction};
use ascover_core::suites::{run_suite, SuiteReport, INVARIANT_SUITES, SUITES};
use ascover_core::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::output::{self, int, polygon, rational, vertex_list};
use crate::spec::{load_function, load_inline, parse_orders};
use crate::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "ascover", version, about = "L-functions and Newton polygons of exponential sums of rational functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, value_enum, global = true, default_value = "json")]
    pub format: Format,
    /// Write to this path instead of stdout (a directory for `experiment`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Cap on the number of field elements any enumeration may touch.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Args, Debug, Clone)]
pub struct FunctionArgs {
    /// Function file (see the README for the grammar).
    #[arg(long, conflicts_with = "inline")]
    pub spec: Option<PathBuf>,
    /// The same grammar on one line, `;` separating entries.
    #[arg(long)]
    pub inline: Option<String>,
}

impl FunctionArgs {
    pub fn load(&self) -> CliResult<RationalFunction> {
        match (&self.spec, &self.inline) {
            (Some(path), _) => load_function(&read(path)?),
            (None, Some(text)) => load_inline(text),
            (None, None) => Err(CliError::Input("one of --spec or --inline is required".into())),
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Hodge polygon HP(ell, orders).
    Hodge {
        #[arg(long)]
        ell: Option<usize>,
        #[arg(long)]
        orders: String,
    },
    /// L-function of f mod p over F_{p^a}.
    Lfun {
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value_t = 1)]
        a: usize,
    },
    /// Zeta numerator of the Artin-Schreier cover y^p - y = f.
    Zeta {
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value_t = 1)]
        a: usize,
    },
    /// NP versus HP over a range of primes.
    Sweep {
        #[command(flatten)]
        function: FunctionArgs,
        /// Inclusive range `lo..hi`.
        #[arg(long)]
        primes: String,
        #[arg(long, default_value_t = 1)]
        a: usize,
    },
    /// Truncated Frobenius matrix, its Fredholm determinant and the trace-formula check.
    Dwork {
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value_t = 6)]
        precision: u32,
        /// Truncation K; defaults to a size adequate for the precision.
        #[arg(long)]
        size: Option<usize>,
        /// Highest Fredholm coefficient examined; defaults to d.
        #[arg(long)]
        k_max: Option<usize>,
    },
    /// Runs a named verification suite, or `all`.
    Verify { suite: String },
    /// Fast end-to-end checks of known small cases plus the invariant suites.
    Selftest,
    /// Convergence table and non-generic probe, written as Markdown and CSV.
    Experiment {
        #[arg(long)]
        ell: Option<usize>,
        #[arg(long)]
        orders: String,
        #[arg(long)]
        primes: String,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// Rendered output plus an optional failure that sets the exit code after
/// the body has been written.
pub struct Outcome {
    pub body: String,
    pub failure: Option<CliError>,
}

impl Outcome {
    fn ok(body: String) -> Outcome {
        Outcome { body, failure: None }
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn parse_range(s: &str) -> CliResult<(u64, u64)> {
    let bad = || CliError::Input(format!("'{s}' is not a range lo..hi"));
    let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
    let hi = hi.strip_prefix('=').unwrap_or(hi);
    let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn orders_arg(ell: Option<usize>, orders: &str) -> CliResult<(usize, Vec<usize>)> {
    let orders = parse_orders(orders).map_err(CliError::Input)?;
    Ok((ell.unwrap_or(orders.len()), orders))
}

fn json_only(format: Format, cmd: &str) -> CliResult<()> {
    if format != Format::Json {
        return Err(CliError::Input(format!("{cmd} only supports --format json")));
    }
    Ok(())
}

pub fn run(cli: &Cli) -> CliResult<Outcome> {
    let budget = Budget::new(cli.budget);
    match &cli.command {
        Command::Hodge { ell, orders } => {
            json_only(cli.format, "hodge")?;
            let (ell, orders) = orders_arg(*ell, orders)?;
            Ok(Outcome::ok(output::pretty(&hodge(ell, &orders)?)))
        }
        Command::Lfun { function, prime, a } => {
            json_only(cli.format, "lfun")?;
            Ok(Outcome::ok(output::pretty(&lfun(&function.load()?, *prime, *a, &budget)?)))
        }
        Command::Zeta { function, prime, a } => {
            json_only(cli.format, "zeta")?;
            Ok(Outcome::ok(output::pretty(&zeta(&function.load()?, *prime, *a, &budget)?)))
        }
        Command::Sweep { function, primes, a } => {
            let f = function.load()?;
            let (lo, hi) = parse_range(primes)?;
            let rows = sweep(&f, lo, hi, *a, &budget)?;
            let body = match cli.format {
                Format::Json => output::pretty(&sweep_json(&f, &rows)?),
                Format::Csv => sweep_csv(&rows, true),
                Format::Svg => sweep_svg(&f, &rows)?,
            };
            Ok(Outcome::ok(body))
        }
        Command::Dwork { function, prime, precision, size, k_max } => {
            json_only(cli.format, "dwork")?;
            Ok(Outcome::ok(output::pretty(&dwork(&function.load()?, *prime, *precision, *size, *k_max, &budget)?)))
        }
        Command::Verify { suite } => {
            json_only(cli.format, "verify")?;
            verify(suite)
        }
        Command::Selftest => {
            json_only(cli.format, "selftest")?;
            selftest(&budget)
        }
        Command::Experiment { ell, orders, primes, samples, seed } => {
            json_only(cli.format, "experiment")?;
            let (ell, orders) = orders_arg(*ell, orders)?;
            let (lo, hi) = parse_range(primes)?;
            let dir = cli
                .out
                .as_deref()
                .ok_or_else(|| CliError::Input("experiment needs --out DIR".into()))?;
            let mut spec = ExperimentSpec::new(&orders, primes_between(lo, hi), *samples, *seed);
            spec.ell = ell;
            Ok(Outcome::ok(output::pretty(&experiment(&spec, dir, &budget)?)))
        }
    }
}

pub fn hodge(ell: usize, orders: &[usize]) -> CliResult<Value> {
    let hp = hodge_polygon(ell, orders)?;
    Ok(json!({
        "ell": ell,
        "orders": orders,
        "degree": orders.iter().sum::<usize>(),
        "slopes": output::slopes(&hodge_slopes(ell, orders)?),
        "vertices": polygon(&hp),
    }))
}

pub fn lfun(f: &RationalFunction, p: u64, a: usize, budget: &Budget) -> CliResult<Value> {
    let red = reduce_mod_p(f, p, a)?;
    let l = l_function(&red, budget)?;
    let coeffs: Vec<Value> = integer_table(&l)?.into_iter().map(|c| json!(c)).collect();
    let vals: Vec<Value> = l
        .valuations()
        .iter()
        .map(|v| v.finite().map_or(Value::Null, rational))
        .collect();
    Ok(json!({
        "function": f.describe(),
        "p": p,
        "a": a,
        "degree": l.degree(),
        "basis": "coefficients c_m as integer vectors in 1, zeta, zeta^2, ...",
        "coefficients": coeffs,
        "valuations": vals,
        "np": polygon(&np_of_l(&l)),
    }))
}

pub fn zeta(f: &RationalFunction, p: u64, a: usize, budget: &Budget) -> CliResult<Value> {
    let red = reduce_mod_p(f, p, a)?;
    let two_g = zeta_degree(&red);
    let counts = point_counts(&red, (two_g / 2).max(1), budget)?;
    let z = zeta_numerator_from_counts(p, a, two_g, &counts)?;
    let np = scaled_np(&z);
    let hp = hodge_polygon(f.ell(), f.orders())?;
    let above = lies_above(&np, &hp)?;
    if !above {
        return Err(Error::Assertion(format!("scaled NP {np:?} dips below HP {hp:?}")).into());
    }
    let gap = max_gap(&np, &hp)?;
    Ok(json!({
        "function": f.describe(),
        "p": p,
        "a": a,
        "genus": two_g / 2,
        "counts": counts.iter().map(int).collect::<Vec<_>>(),
        "numerator": z.coeffs().iter().map(int).collect::<Vec<_>>(),
        "scaled_np": polygon(&np),
        "hp": polygon(&hp),
        "comparison": {
            "lies_above": above,
            "coincide": np == hp,
            "max_gap": rational(&gap),
            "ds0_len": rational(&slope_run_length(&np, &Q::zero())),
            "ds1_len": rational(&slope_run_length(&np, &qi(1))),
        },
    }))
}

/// One prime of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub p: u64,
    pub a: usize,
    pub np: Polygon,
    /// `NP(k) - HP(k)` at each HP vertex.
    pub vertex_gaps: Vec<(Q, Q)>,
    pub max_gap: Q,
    pub coincide: bool,
    pub ds0_len: Q,
    pub ds1_len: Q,
    pub seconds: f64,
}

/// Good primes in `lo..=hi`, computed in parallel and returned sorted by `p`.
/// Bad primes are skipped.
pub fn sweep(f: &RationalFunction, lo: u64, hi: u64, a: usize, budget: &Budget) -> CliResult<Vec<SweepRow>> {
    let hp = hodge_polygon(f.ell(), f.orders())?;
    let primes: Vec<u64> = primes_between(lo, hi).into_iter().filter(|&p| f.is_good_prime(p)).collect();
    if primes.is_empty() {
        return Err(CliError::Input(format!("no good primes in {lo}..{hi}")));
    }
    let mut rows = primes
        .par_iter()
        .map(|&p| sweep_row(f, &hp, p, a, budget))
        .collect::<Result<Vec<_>, Error>>()?;
    rows.sort_by_key(|r| r.p);
    Ok(rows)
}

fn sweep_row(f: &RationalFunction, hp: &Polygon, p: u64, a: usize, budget: &Budget) -> Result<SweepRow, Error> {
    let start = Instant::now();
    let red = reduce_mod_p(f, p, a)?;
    let np = np_of_l(&l_function(&red, budget)?);
    let gap = max_gap(&np, hp)?;
    let vertex_gaps = hp
        .vertices()
        .iter()
        .map(|(x, y)| (x.clone(), np.eval(x).expect("same width") - y))
        .collect();
    Ok(SweepRow {
        p,
        a,
        coincide: &np == hp,
        ds0_len: slope_run_length(&np, &Q::zero()),
        ds1_len: slope_run_length(&np, &qi(1)),
        vertex_gaps,
        max_gap: gap,
        np,
        seconds: start.elapsed().as_secs_f64(),
    })
}

pub const SWEEP_HEADER: &str = "p,a,coincide,max_gap_num,max_gap_den,ds0_len,np_vertices,seconds";

/// CSV rows. `timing = false` drops the `seconds` column, which is the only
/// column that varies between runs.
pub fn sweep_csv(rows: &[SweepRow], timing: bool) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<&str> = SWEEP_HEADER.split(',').collect();
    let n = if timing { header.len() } else { header.len() - 1 };
    w.write_record(&header[..n]).expect("in-memory write");
    for r in rows {
        let mut rec = vec![
            r.p.to_string(),
            r.a.to_string(),
            r.coincide.to_string(),
            r.max_gap.numer().to_string(),
            r.max_gap.denom().to_string(),
            r.ds0_len.to_string(),
            vertex_list(&r.np),
        ];
        if timing {
            rec.push(format!("{:.3}", r.seconds));
        }
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

fn sweep_json(f: &RationalFunction, rows: &[SweepRow]) -> CliResult<Value> {
    let hp = hodge_polygon(f.ell(), f.orders())?;
    let rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "p": r.p,
                "a": r.a,
                "coincide": r.coincide,
                "max_gap": rational(&r.max_gap),
                "vertex_gaps": r.vertex_gaps.iter().map(|(k, g)| json!({"k": rational(k), "gap": rational(g)})).collect::<Vec<_>>(),
                "ds0_len": rational(&r.ds0_len),
                "ds1_len": rational(&r.ds1_len),
                "np": polygon(&r.np),
                "seconds": r.seconds,
            })
        })
        .collect();
    Ok(json!({"function": f.describe(), "hp": polygon(&hp), "rows": rows}))
}

fn sweep_svg(f: &RationalFunction, rows: &[SweepRow]) -> CliResult<String> {
    let hp = hodge_polygon(f.ell(), f.orders())?;
    let series: Vec<(String, Polygon)> = rows.iter().map(|r| (format!("p={}", r.p), r.np.clone())).collect();
    Ok(output::svg_overlay(&format!("NP_p of {} against HP", f.describe()), &hp, &series))
}

fn ord_json(v: &PadicOrd) -> Value {
    match v {
        PadicOrd::Exact(x) => json!({"exact": rational(x)}),
        PadicOrd::AtLeast(x) => json!({"at_least": rational(x)}),
    }
}

pub fn dwork(
    f: &RationalFunction,
    p: u64,
    precision: u32,
    size: Option<usize>,
    k_max: Option<usize>,
    budget: &Budget,
) -> CliResult<Value> {
    if f.ell() != 1 {
        return Err(CliError::Input("dwork handles polynomials (ell = 1) only".into()));
    }
    let red = reduce_mod_p(f, p, 1)?;
    let d = f.degree();
    let size = size.unwrap_or_else(|| default_size(d, precision));
    let k_max = k_max.unwrap_or(d).min(size);
    let m = build_frobenius(&red, size, precision)?;
    let fs = fredholm(&m, k_max)?;
    let np = np_from_fredholm(&fs);
    let direct = np_of_l(&l_function(&red, budget)?);
    let mismatches: Vec<Value> = np
        .polygon
        .vertices()
        .iter()
        .zip(&np.certified)
        .filter(|(_, &c)| c)
        .filter(|((x, y), _)| direct.eval(x).as_ref() != Some(y))
        .map(|((x, _), _)| rational(x))
        .collect();
    let report = trace_formula_check(&red, size, precision, k_max, budget)?;
    Ok(json!({
        "function": f.describe(),
        "p": p,
        "size": size,
        "precision": precision,
        "fredholm": (0..=k_max).map(|k| json!({"k": k, "ord": ord_json(&fs.valuation(k)), "certified_to": rational(&fs.certified()[k])})).collect::<Vec<_>>(),
        "np": polygon(&np.polygon),
        "certified": np.certified,
        "direct_np": polygon(&direct),
        "matches_direct": mismatches.is_empty(),
        "mismatched_vertices": mismatches,
        "trace_formula": {
            "holds": report.holds,
            "agrees": report.agrees,
            "joint_precision": report.joint_precision.iter().map(rational).collect::<Vec<_>>(),
            "weakest": rational(&report.weakest),
        },
    }))
}

fn suite_json(r: &SuiteReport) -> Value {
    json!({
        "suite": r.name,
        "ok": r.ok(),
        "cases": r.cases,
        "passed": r.passed,
        "failures": r.failures,
        "notes": r.notes.iter().map(|(k, v)| json!({"note": k, "count": v})).collect::<Vec<_>>(),
    })
}

pub fn verify(name: &str) -> CliResult<Outcome> {
    let names: Vec<&str> = if name == "all" {
        SUITES.to_vec()
    } else if name == "invariants" {
        INVARIANT_SUITES.to_vec()
    } else if SUITES.contains(&name) {
        vec![name]
    } else {
        return Err(CliError::Input(format!(
            "unknown suite '{name}'; expected one of: all, invariants, {}",
            SUITES.join(", ")
        )));
    };
    let reports = names
        .par_iter()
        .map(|n| run_suite(n))
        .collect::<Result<Vec<_>, Error>>()?;
    let failed: Vec<&str> = reports.iter().filter(|r| !r.ok()).map(|r| r.name.as_str()).collect();
    let body = output::pretty(&json!({
        "ok": failed.is_empty(),
        "suites": reports.iter().map(suite_json).collect::<Vec<_>>(),
    }));
    let failure = (!failed.is_empty()).then(|| CliError::Failed(format!("failing suites: {}", failed.join(", "))));
    Ok(Outcome { body, failure })
}

fn check(name: &str, ok: CliResult<bool>) -> (String, bool, Option<String>) {
    match ok {
        Ok(b) => (name.to_string(), b, None),
        Err(e) => (name.to_string(), false, Some(e.to_string())),
    }
}

pub fn selftest(budget: &Budget) -> CliResult<Outcome> {
    let x2 = || load_inline("orders = 2; coeff 1 2 = 1");
    let mut results = vec![
        check("hodge [3]", hodge(1, &[3]).map(|v| {
            v["vertices"] == json!([{"x": [0, 1], "y": [0, 1]}, {"x": [1, 1], "y": [1, 3]}, {"x": [2, 1], "y": [1, 1]}])
        })),
        check("hodge [1,1]", hodge(2, &[1, 1]).map(|v| {
            v["vertices"] == json!([{"x": [0, 1], "y": [0, 1]}, {"x": [1, 1], "y": [0, 1]}, {"x": [2, 1], "y": [1, 1]}])
        })),
        check("lfun x^2 p=3", x2().and_then(|f| lfun(&f, 3, 1, budget)).map(|v| v["coefficients"][1] == json!([1, 2]))),
        check("zeta x^2 p=3", x2().and_then(|f| zeta(&f, 3, 1, budget)).map(|v| {
            v["numerator"] == json!([1, 0, 3]) && v["comparison"]["coincide"] == json!(true)
        })),
        check("bad prime", x2().map(|f| matches!(lfun(&f, 2, 1, budget), Err(CliError::Core(Error::BadPrime { .. }))))),
    ];
    for &name in INVARIANT_SUITES {
        results.push(check(name, run_suite(name).map(|r| r.ok()).map_err(CliError::from)));
    }
    let failed: Vec<String> = results.iter().filter(|r| !r.1).map(|r| r.0.clone()).collect();
    let body = output::pretty(&json!({
        "ok": failed.is_empty(),
        "checks": results.iter().map(|(n, ok, err)| json!({"check": n, "ok": ok, "error": err})).collect::<Vec<_>>(),
    }));
    let failure = (!failed.is_empty()).then(|| CliError::Failed(format!("failing checks: {}", failed.join(", "))));
    Ok(Outcome { body, failure })
}

/// Writes `convergence.md`, `convergence.csv` and `probe.md` into `dir`.
pub fn experiment(spec: &ExperimentSpec, dir: &Path, budget: &Budget) -> CliResult<Value> {
    std::fs::create_dir_all(dir)?;
    let table = run_convergence(spec, budget)?;
    std::fs::write(dir.join("convergence.md"), table.to_markdown())?;
    std::fs::write(dir.join("convergence.csv"), table.to_csv())?;
    let probes = spec
        .primes
        .par_iter()
        .filter(|&&p| spec.admissible(p))
        .map(|&p| run_nongeneric_probe(spec, p, budget))
        .collect::<Result<Vec<_>, Error>>()?;
    let mut md = String::new();
    for r in &probes {
        md.push_str(&r.to_markdown());
        md.push('\n');
    }
    std::fs::write(dir.join("probe.md"), md)?;
    Ok(json!({
        "ell": spec.ell,
        "orders": spec.orders,
        "seed": spec.seed,
        "samples": spec.samples,
        "primes": table.samples.iter().map(|s| s.p).collect::<std::collections::BTreeSet<_>>(),
        "vertex_rows": table.rows.len(),
        "non_generic": table.non_generic_count(),
        "attained": table.attained_count(),
        "probes_differing": probes.iter().filter(|r| r.differs).count(),
        "files": ["convergence.md", "convergence.csv", "probe.md"],
    }))
}
