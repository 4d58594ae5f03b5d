//! Batch front door for the lattice probability library: load spaces and
//! elements from JSON, run named experiments and verification suites, emit
//! CSV/JSON reports.
//!
//! Exit codes: 0 when every check in the selected suite passes, 1 when a
//! check fails, 2 on malformed input (with a machine-readable error JSON on
//! stderr). Report files are written atomically and identical configuration
//! plus seed produces byte-identical reports.

// `!(x > 0.0)`-style guards are deliberate: they reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use riesz_prob::bounds::{chernoff_lower, chernoff_upper};
use riesz_prob::convergence::{compound_poisson_check, poisson_limit_experiment};
use riesz_prob::distributions::{realize_finite, realize_iid, MassFunction, NaturalElement};
use riesz_prob::genfun::{
    compose, compound_mean, compound_variance, random_index_sum, GenFun,
};
use riesz_prob::verify::{run_all, AcceptanceConfig, SuiteConfig};
use riesz_prob::{BandProjection, ConditionalTriple, Element};

#[derive(Parser)]
#[command(
    name = "riesz-prob",
    about = "Verification suites and CSV experiment tables for lattice-valued discrete probability",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Input JSON file (schema depends on the subcommand).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output report path; written atomically (temp file + rename).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Tolerance for the checks that take one.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Seed for randomized suites.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Run the acceptance criteria and the randomized oracle-equivalence
    /// suite; exit 0 iff everything passes.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Instance count for the randomized suite (the bundled acceptance
        /// criteria always use their pinned sizes).
        #[arg(long, default_value_t = 500)]
        instances: usize,
    },
    /// Print a generating-function evaluation table over an s-grid as CSV.
    Genfun {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated evaluation points.
        #[arg(long = "s-grid", value_delimiter = ',', default_value = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1")]
        s_grid: Vec<f64>,
        /// Print the coefficient mass table instead (columns: k, then one
        /// column per block).
        #[arg(long)]
        masses: bool,
    },
    /// Emit a CSV of tail bounds: columns alpha, s, block, lhs, rhs, slack.
    ChernoffTable {
        #[command(flatten)]
        common: CommonArgs,
        /// Evaluation points; values above 1 give upper-tail rows, values in
        /// (0, 1) lower-tail rows.
        #[arg(long = "s-grid", value_delimiter = ',', default_value = "0.25,0.5,0.75,1.5,2,4")]
        s_grid: Vec<f64>,
    },
    /// Compare Binomial(n, g/n) masses against Poisson(g) masses.
    PoissonApprox {
        #[command(flatten)]
        common: CommonArgs,
        /// Poisson parameter: a scalar, or a JSON array matching the triple.
        #[arg(long)]
        g: String,
        /// Comma-separated list of n values.
        #[arg(long = "n", value_delimiter = ',', default_value = "10,50,100,500")]
        n_list: Vec<u64>,
        #[arg(long, default_value_t = 20)]
        kmax: u64,
    },
    /// Build a compound sum, verify its independence hypotheses explicitly,
    /// then compare the composed generating function against realization and
    /// the moment identities. With --g and --p, check the Poisson thinning
    /// identity parametrically instead.
    Compound {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 20)]
        kmax: u64,
        /// Poisson index parameter for the parametric thinning check.
        #[arg(long, requires = "p")]
        g: Option<f64>,
        /// Success mass of the indicator summands for the thinning check.
        #[arg(long, requires = "g")]
        p: Option<f64>,
    },
    /// Check T-independence of a family of projections and/or elements.
    IndependenceCheck {
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug)]
struct CliError {
    code: &'static str,
    message: String,
    exit: u8,
}

impl CliError {
    fn bad_input(code: &'static str, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
            exit: 2,
        }
    }

    fn check_failed(message: impl Into<String>) -> Self {
        Self {
            code: "check_failed",
            message: message.into(),
            exit: 1,
        }
    }
}

impl From<riesz_prob::Error> for CliError {
    fn from(e: riesz_prob::Error) -> Self {
        CliError::bad_input("invalid_input", e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::json!({ "error": e.code, "message": e.message })
            );
            ExitCode::from(e.exit)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let common = match &cli.command {
        Command::Verify { common, .. }
        | Command::Genfun { common, .. }
        | Command::ChernoffTable { common, .. }
        | Command::PoissonApprox { common, .. }
        | Command::Compound { common, .. }
        | Command::IndependenceCheck { common } => common,
    };
    if !(common.tol > 0.0) {
        return Err(CliError::bad_input(
            "bad_tolerance",
            format!("--tol must be strictly positive, got {}", common.tol),
        ));
    }
    match cli.command {
        Command::Verify { common, instances } => cmd_verify(common, instances),
        Command::Genfun {
            common,
            s_grid,
            masses,
        } => cmd_genfun(common, s_grid, masses),
        Command::ChernoffTable { common, s_grid } => cmd_chernoff(common, s_grid),
        Command::PoissonApprox {
            common,
            g,
            n_list,
            kmax,
        } => cmd_poisson_approx(common, g, n_list, kmax),
        Command::Compound { common, kmax, g, p } => cmd_compound(common, kmax, g, p),
        Command::IndependenceCheck { common } => cmd_independence(common),
    }
}

// ---------------------------------------------------------------------------
// input schemas

#[derive(Deserialize)]
struct TripleInput {
    triple: ConditionalTriple,
    #[serde(default)]
    element: Option<Element>,
    #[serde(default)]
    elements: Option<Vec<Element>>,
    #[serde(default)]
    projections: Option<Vec<BandProjection>>,
    #[serde(default)]
    index: Option<MassFunction>,
    #[serde(default)]
    summand: Option<MassFunction>,
    #[serde(default)]
    count: Option<usize>,
}

fn parse_input(path: &Path) -> Result<TripleInput, CliError> {
    let text = fs::read_to_string(path).map_err(|e| {
        CliError::bad_input("missing_input", format!("cannot read {}: {e}", path.display()))
    })?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::bad_input("bad_json", format!("{e}")))?;
    // partition errors get their own code; everything else is shape-level
    if let Some(obj) = value.as_object() {
        if let Some(t) = obj.get("triple") {
            if serde_json::from_value::<ConditionalTriple>(t.clone()).is_err() {
                return Err(CliError::bad_input(
                    "bad_partition",
                    "triple is malformed: weights must be strictly positive and the partition must cover every coordinate exactly once",
                ));
            }
        }
    }
    serde_json::from_value(value).map_err(|e| CliError::bad_input("bad_schema", format!("{e}")))
}

fn required_input(common: &CommonArgs) -> Result<TripleInput, CliError> {
    let path = common
        .input
        .as_ref()
        .ok_or_else(|| CliError::bad_input("missing_input", "--input is required for this command"))?;
    parse_input(path)
}

/// Largest coordinate value accepted from input files; tables and mass
/// vectors are sized by it.
const MAX_INPUT_VALUE: u64 = 100_000;

fn required_element(input: &TripleInput) -> Result<NaturalElement, CliError> {
    let el = input
        .element
        .clone()
        .ok_or_else(|| CliError::bad_input("missing_element", "input must carry an \"element\" field"))?;
    if el.dim() != input.triple.dim() {
        return Err(CliError::bad_input(
            "bad_element",
            format!(
                "element has dimension {} but the triple has {}",
                el.dim(),
                input.triple.dim()
            ),
        ));
    }
    let x = NaturalElement::new(el)
        .map_err(|e| CliError::bad_input("bad_element", format!("element is not natural: {e}")))?;
    if x.max_value() > MAX_INPUT_VALUE {
        return Err(CliError::bad_input(
            "bad_element",
            format!(
                "element attains {} but tables are capped at values ≤ {MAX_INPUT_VALUE}",
                x.max_value()
            ),
        ));
    }
    Ok(x)
}

// ---------------------------------------------------------------------------
// report formatting

/// 17 significant digits: doubles round-trip exactly.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let tmp = path.with_extension(format!(
        "{}.tmp-{}",
        path.extension().and_then(|e| e.to_str()).unwrap_or("out"),
        std::process::id()
    ));
    fs::write(&tmp, contents).map_err(|e| {
        CliError::bad_input("write_failed", format!("cannot write {}: {e}", tmp.display()))
    })?;
    fs::rename(&tmp, path).map_err(|e| {
        CliError::bad_input("write_failed", format!("cannot rename onto {}: {e}", path.display()))
    })?;
    Ok(())
}

fn emit(common: &CommonArgs, contents: &str) -> Result<(), CliError> {
    match &common.out {
        Some(path) => write_atomic(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// subcommands

fn cmd_verify(common: CommonArgs, instances: usize) -> Result<(), CliError> {
    let acceptance = run_all(&AcceptanceConfig { seed: common.seed })
        .map_err(|e| CliError::check_failed(format!("acceptance run aborted: {e}")))?;
    for rep in &acceptance {
        println!("{}", rep.line());
    }

    // the suite tolerance is pinned at 1e-12; --tol may tighten it but
    // never loosen it
    let suite_cfg = SuiteConfig {
        instances,
        max_dim: 64,
        seed: common.seed,
        tol: common.tol.min(1e-12),
    };
    let suite = riesz_prob::verify::equivalence_suite(&suite_cfg)
        .map_err(|e| CliError::check_failed(format!("equivalence suite aborted: {e}")))?;
    println!(
        "equivalence suite ({} instances): {} — max error {:.2e} ({})",
        instances,
        if suite.pass { "PASS" } else { "FAIL" },
        suite.max_abs_err,
        suite.worst_check
    );

    let mut csv = String::from("criterion,name,passed,detail\n");
    for rep in &acceptance {
        let _ = writeln!(
            csv,
            "{},{},{},\"{}\"",
            rep.id,
            rep.name,
            rep.passed,
            rep.detail.replace('"', "'")
        );
    }
    let _ = writeln!(
        csv,
        "suite,oracle equivalence ({} instances),{},\"max error {:.2e}\"",
        instances, suite.pass, suite.max_abs_err
    );
    emit(&common, &csv)?;

    if acceptance.iter().all(|r| r.passed) && suite.pass {
        Ok(())
    } else {
        Err(CliError::check_failed("one or more verification checks failed"))
    }
}

fn cmd_genfun(common: CommonArgs, s_grid: Vec<f64>, masses: bool) -> Result<(), CliError> {
    let input = required_input(&common)?;
    let x = required_element(&input)?;
    let g = GenFun::of_element(&input.triple, &x)?;
    if masses {
        // mass table: k, then one column per block
        let mut csv = String::from("k");
        for b in 0..input.triple.n_blocks() {
            let _ = write!(csv, ",block_{b}");
        }
        csv.push('\n');
        for k in 0..=x.max_value() {
            let blocks = input.triple.block_values(&g.coefficient(k))?;
            let _ = write!(csv, "{k}");
            for v in blocks {
                let _ = write!(csv, ",{}", fmt_f64(v));
            }
            csv.push('\n');
        }
        return emit(&common, &csv);
    }
    let mut csv = String::from("s,block,value\n");
    for &s in &s_grid {
        let v = g.eval(s)?;
        let blocks = input.triple.block_values(&v)?;
        for (b, val) in blocks.iter().enumerate() {
            let _ = writeln!(csv, "{},{},{}", fmt_f64(s), b, fmt_f64(*val));
        }
    }
    emit(&common, &csv)
}

fn cmd_chernoff(common: CommonArgs, s_grid: Vec<f64>) -> Result<(), CliError> {
    let input = required_input(&common)?;
    let x = required_element(&input)?;
    let t = &input.triple;
    let g = GenFun::of_element(t, &x)?;
    let mut csv = String::from("alpha,s,block,lhs,rhs,slack\n");
    let mut worst_slack = f64::INFINITY;
    for alpha in 0..=x.max_value() + 1 {
        for &s in &s_grid {
            let rep = if s > 1.0 {
                chernoff_upper(t, &g, alpha as f64, s, &x)?
            } else if s > 0.0 && s < 1.0 {
                chernoff_lower(t, &g, alpha as f64, s, &x)?
            } else {
                continue;
            };
            worst_slack = worst_slack.min(rep.min_slack());
            for b in 0..t.n_blocks() {
                let i = t.partition()[b][0];
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    fmt_f64(alpha as f64),
                    fmt_f64(s),
                    b,
                    fmt_f64(rep.lhs.get(i)),
                    fmt_f64(rep.rhs.get(i)),
                    fmt_f64(rep.slack.get(i)),
                );
            }
        }
    }
    emit(&common, &csv)?;
    if worst_slack >= -1e-12 {
        Ok(())
    } else {
        Err(CliError::check_failed(format!(
            "negative slack {worst_slack:e} in the bound table"
        )))
    }
}

fn cmd_poisson_approx(
    common: CommonArgs,
    g_arg: String,
    n_list: Vec<u64>,
    kmax: u64,
) -> Result<(), CliError> {
    let triple = match &common.input {
        Some(path) => parse_input(path)?.triple,
        None => ConditionalTriple::point(),
    };
    let g = if let Ok(scalar) = g_arg.parse::<f64>() {
        Element::constant(triple.dim(), scalar)?
    } else {
        let el: Element = serde_json::from_str(&g_arg)
            .map_err(|e| CliError::bad_input("bad_g", format!("--g is neither a scalar nor a JSON array: {e}")))?;
        el
    };
    let table = poisson_limit_experiment(&triple, &g, &n_list, kmax)?;
    let mut csv = String::from("n,k,block,binomial_mass,poisson_mass,abs_err\n");
    for row in &table.rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            row.n,
            row.k,
            row.block,
            fmt_f64(row.binomial_mass),
            fmt_f64(row.poisson_mass),
            fmt_f64(row.abs_err),
        );
    }
    emit(&common, &csv)?;
    for s in &table.summaries {
        println!(
            "n={}: err={} le_cam_bound={} within={}",
            s.n,
            fmt_f64(s.err),
            fmt_f64(s.le_cam_bound),
            s.within_bound
        );
    }
    if table.summaries.iter().all(|s| s.within_bound) && table.errs_strictly_decreasing() {
        Ok(())
    } else {
        Err(CliError::check_failed(
            "approximation errors are not certified decreasing under the threshold",
        ))
    }
}

fn cmd_compound(
    common: CommonArgs,
    kmax: u64,
    g_arg: Option<f64>,
    p_arg: Option<f64>,
) -> Result<(), CliError> {
    if let (Some(gv), Some(pv)) = (g_arg, p_arg) {
        // parametric path: check the thinning identity, on the input triple
        // when one is given and on a point space otherwise
        let triple = match &common.input {
            Some(path) => parse_input(path)?.triple,
            None => ConditionalTriple::point(),
        };
        let g = Element::constant(triple.dim(), gv)?;
        let p = Element::constant(triple.dim(), pv)?;
        let ok = compound_poisson_check(&triple, &g, &p, kmax, common.tol)?;
        println!(
            "{}",
            serde_json::json!({ "check": "poisson_thinning", "g": gv, "p": pv, "ok": ok, "tol": common.tol })
        );
        return if ok {
            Ok(())
        } else {
            Err(CliError::check_failed("thinning identity violated"))
        };
    }

    let input = required_input(&common)?;
    let t = &input.triple;
    let index_mass = input
        .index
        .clone()
        .ok_or_else(|| CliError::bad_input("missing_index", "input must carry an \"index\" mass function"))?;
    let summand_mass = input
        .summand
        .clone()
        .ok_or_else(|| CliError::bad_input("missing_summand", "input must carry a \"summand\" mass function"))?;
    index_mass.validate(t)?;
    summand_mass.validate(t)?;
    let count = input.count.unwrap_or(4);

    // realize the index, then the i.i.d. summands on the extension
    let (t_n, lift_n, n_elem) = realize_finite(t, &index_mass)?;
    let lifted = match summand_mass.kind() {
        riesz_prob::distributions::MassKind::Finite(c) => MassFunction::finite(
            &t_n,
            c.iter()
                .map(|v| lift_n.apply(v))
                .collect::<riesz_prob::Result<Vec<_>>>()?,
        )?,
        _ => {
            return Err(CliError::bad_input(
                "bad_summand",
                "summand mass must be finitely supported to be realized",
            ))
        }
    };
    let needed = count.max(n_elem.max_value() as usize);
    let r = realize_iid(&t_n, &lifted, needed)?;
    let full = &r.triple;
    let n_full = n_elem.lift(&r.lift)?;

    // the composition hypotheses, checked explicitly before composing
    let mut independent = true;
    for x in &r.elements {
        independent &= full.check_elements_independent(&n_full, x)?;
    }
    for i in 0..r.elements.len() {
        for j in (i + 1)..r.elements.len() {
            independent &= full.check_elements_independent(&r.elements[i], &r.elements[j])?;
        }
    }
    if !independent {
        return Err(CliError::check_failed(
            "realized family failed its independence hypotheses; refusing to compose",
        ));
    }

    let mut summands = vec![NaturalElement::zero(full.dim())];
    summands.extend(r.elements.iter().cloned());
    let s_n = random_index_sum(full, &n_full, &summands)?;
    let g_n = GenFun::of_element(full, &n_full)?;
    let g_x = GenFun::of_element(full, &r.elements[0])?;
    let comp = compose(&g_n, &g_x)?;
    let g_real = GenFun::of_element(full, &s_n)?;

    let mut csv = String::from("k,block,mass_composed,mass_realized,abs_err\n");
    let mut worst = 0.0f64;
    for k in 0..=kmax.min(s_n.max_value().max(1)) {
        let a = comp.coefficient(k);
        let b = g_real.coefficient(k);
        worst = worst.max(a.max_abs_diff(&b)?);
        let blocks_a = full.block_values(&a)?;
        let blocks_b = full.block_values(&b)?;
        for (bi, (va, vb)) in blocks_a.iter().zip(&blocks_b).enumerate() {
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                k,
                bi,
                fmt_f64(*va),
                fmt_f64(*vb),
                fmt_f64((va - vb).abs()),
            );
        }
    }
    emit(&common, &csv)?;

    let mean_err = compound_mean(&g_n, &g_x)?.max_abs_diff(&g_real.mean()?)?;
    let var_err = compound_variance(&g_n, &g_x)?.max_abs_diff(&g_real.variance()?)?;
    println!(
        "{}",
        serde_json::json!({
            "independence": true,
            "max_mass_err": worst,
            "mean_identity_err": mean_err,
            "variance_identity_err": var_err,
            "tol": common.tol,
            "lifts": {
                "base_to_full": r.lift.index_map(),
                "index_to_extension": lift_n.index_map(),
            },
        })
    );
    if worst <= common.tol && mean_err <= common.tol && var_err <= common.tol {
        Ok(())
    } else {
        Err(CliError::check_failed("compound identities exceeded tolerance"))
    }
}

fn cmd_independence(common: CommonArgs) -> Result<(), CliError> {
    let input = required_input(&common)?;
    let t = &input.triple;
    let mut verdicts = serde_json::Map::new();
    let mut all_ok = true;

    if let Some(projections) = &input.projections {
        for p in projections {
            if p.dim() != t.dim() {
                return Err(CliError::bad_input(
                    "bad_projection",
                    format!("projection has dimension {} but the triple has {}", p.dim(), t.dim()),
                ));
            }
        }
        let ok = t.check_projections_independent(projections)?;
        all_ok &= ok;
        verdicts.insert("projections_independent".into(), ok.into());
    }

    if let Some(elements) = &input.elements {
        let naturals: Vec<NaturalElement> = elements
            .iter()
            .map(|e| {
                NaturalElement::new(e.clone()).map_err(|err| {
                    CliError::bad_input("bad_element", format!("element is not natural: {err}"))
                })
            })
            .collect::<Result<_, _>>()?;
        let mut pairwise = Vec::new();
        for i in 0..naturals.len() {
            for j in (i + 1)..naturals.len() {
                let ok = t.check_elements_independent(&naturals[i], &naturals[j])?;
                all_ok &= ok;
                pairwise.push(serde_json::json!({ "i": i, "j": j, "independent": ok }));
            }
        }
        verdicts.insert("element_pairs".into(), pairwise.into());
    }

    if verdicts.is_empty() {
        return Err(CliError::bad_input(
            "missing_family",
            "input must carry \"projections\" and/or \"elements\"",
        ));
    }

    let report = serde_json::Value::Object(verdicts).to_string();
    emit(&common, &format!("{report}\n"))?;
    if all_ok {
        Ok(())
    } else {
        Err(CliError::check_failed("family is not independent"))
    }
}
