//! Subcommand dispatch: every command parses its inputs, runs the library,
//! and produces one JSON report of the shape
//! `{tool_version, field, inputs, results}`.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mcodes_core::census::{
    cyclic_census, negacyclic_census, proportion, CensusError, CensusReport, CyclotomicProfile,
    Rational,
};
use mcodes_core::gf::{FieldTower, TowerError};
use mcodes_core::matmod::{companion, block_diag, Matrix};
use mcodes_core::mcode::{
    combine_hierarchy, degree_one_hierarchy, dim_base_intersection, first_weight_is_one,
    kernel_code, last_weight_closed, mrd_possible, ComponentHierarchy, McodeError, MCyclicCode,
};
use mcodes_core::polyfact::{factor, PolyError};
use mcodes_core::rankmetric::{gaussian_binomial, grw_oracle, LinearCode, RankError};
use mcodes_core::Field;
use num_bigint::BigUint;

use crate::parse::{
    build_tower, parse_field_spec, parse_kpoly, parse_lmatrix, parse_lpoly, ParseError, SpecError,
};
use crate::printer::{fmt_kpoly, fmt_kpoly_var, fmt_lelt, fmt_lmatrix, fmt_lpoly};

#[derive(Debug, Parser)]
#[command(name = "mcodes", version, about = "Generalized rank weights of matrix-stable codes over finite field extensions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Machine-readable JSON output (the default).
    #[arg(long, global = true)]
    pub json: bool,
    /// Human-readable key/value rendering instead of JSON.
    #[arg(long, global = true, conflicts_with = "json")]
    pub pretty: bool,
    /// Seed for every randomized internal (factor splitting etc.).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Enumeration cap for oracle and census sweeps.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    pub cap: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OverField {
    #[value(alias = "K")]
    K,
    #[value(alias = "L")]
    L,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Factor a polynomial into monic irreducibles.
    Factor {
        /// Field spec, e.g. `q=7,m=4,lmod=y^4+6*y^2+6`.
        #[arg(long)]
        field: String,
        /// The polynomial in x (`@file` to read from a file).
        #[arg(long)]
        poly: String,
        /// Coefficient field of the input.
        #[arg(long, value_enum, default_value = "k")]
        over: OverField,
    },
    /// Exact generalized rank weights by exhaustive subspace enumeration.
    Oracle {
        #[arg(long)]
        field: String,
        /// Generator matrix over L (`@file` supported).
        #[arg(long)]
        gen: String,
        /// Single weight index; all of 1..=k when absent.
        #[arg(long, conflicts_with = "all")]
        r: Option<usize>,
        /// Compute the whole hierarchy (the default).
        #[arg(long)]
        all: bool,
    },
    /// Closed-form analysis of the code C_g for the companion matrix of f.
    Analyze {
        #[arg(long)]
        field: String,
        /// Minimal polynomial f over K.
        #[arg(long)]
        f: String,
        /// Monic divisor g of f over L.
        #[arg(long)]
        g: String,
    },
    /// Necessary condition for a stable code to be MRD.
    MrdCheck {
        #[arg(long)]
        field: String,
        #[command(flatten)]
        matrix: MatrixArg,
    },
    /// The code ker(P(M)) with its per-component generator polynomials.
    KernelCode {
        #[arg(long)]
        field: String,
        #[command(flatten)]
        matrix: MatrixArg,
        /// The polynomial P over L.
        #[arg(long = "P")]
        p: String,
    },
    /// Proportions of stable codes with first rank weight different from 1.
    Census {
        #[command(subcommand)]
        which: CensusCommand,
    },
}

#[derive(Debug, Args)]
pub struct MatrixArg {
    /// Explicit matrix over K (`rows;of,entries`, `@file` supported).
    #[arg(long, conflicts_with_all = ["companion", "blockdiag"])]
    pub matrix: Option<String>,
    /// Companion matrix of a monic polynomial over K.
    #[arg(long, conflicts_with = "blockdiag")]
    pub companion: Option<String>,
    /// Block diagonal of companion matrices, polynomials separated by `;`.
    #[arg(long)]
    pub blockdiag: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum CensusCommand {
    /// Cyclic codes of length n over F_(q^m)/F_q, via cyclotomic data.
    Cyclic {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        m: usize,
    },
    /// Arbitrary minimal polynomial f over K, factored over L.
    Poly {
        #[arg(long)]
        field: String,
        #[arg(long)]
        f: String,
    },
    /// Negacyclic codes of odd length n.
    Negacyclic {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        m: usize,
    },
}

#[derive(Debug)]
pub enum CliError {
    /// Malformed invocation or input text; exit code 1.
    Usage(String),
    /// Valid request that the mathematics rejects; exit code 2.
    Domain {
        code: &'static str,
        message: String,
    },
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<SpecError> for CliError {
    fn from(e: SpecError) -> Self {
        match e {
            SpecError::Parse(p) => CliError::Usage(p.to_string()),
            SpecError::Tower(t) => t.into(),
        }
    }
}

impl From<TowerError> for CliError {
    fn from(e: TowerError) -> Self {
        let code = match &e {
            TowerError::NotPrime(_) => "NOT_PRIME",
            TowerError::ReducibleModulus(_) => "REDUCIBLE_MODULUS",
            TowerError::DegreeMismatch { .. } => "DEGREE_MISMATCH",
        };
        CliError::Domain {
            code,
            message: e.to_string(),
        }
    }
}

impl From<PolyError> for CliError {
    fn from(e: PolyError) -> Self {
        let code = match &e {
            PolyError::DivideByZeroPoly => "DIVIDE_BY_ZERO_POLY",
            PolyError::BothZero => "BOTH_ZERO",
            PolyError::ZeroPoly => "ZERO_POLY",
            PolyError::ConstantPoly => "CONSTANT_POLY",
            PolyError::NotIrreducible => "NOT_IRREDUCIBLE",
            PolyError::NotCoprimeToCharacteristic => "NOT_COPRIME_TO_CHARACTERISTIC",
        };
        CliError::Domain {
            code,
            message: e.to_string(),
        }
    }
}

impl From<RankError> for CliError {
    fn from(e: RankError) -> Self {
        let code = match &e {
            RankError::TooLarge(_) => "TOO_LARGE",
            RankError::ZeroCode => "ZERO_CODE",
            RankError::Singular => "SINGULAR",
        };
        CliError::Domain {
            code,
            message: e.to_string(),
        }
    }
}

impl From<McodeError> for CliError {
    fn from(e: McodeError) -> Self {
        let code = match &e {
            McodeError::NotCyclic => "NOT_CYCLIC",
            McodeError::NotADivisor => "NOT_A_DIVISOR",
            McodeError::NotAnMCode => "NOT_AN_M_CODE",
            McodeError::ZeroCode => "ZERO_CODE",
            McodeError::SizeMismatch => "SIZE_MISMATCH",
            McodeError::DecompositionMismatch => "DECOMPOSITION_MISMATCH",
            McodeError::HypothesisFailed => "HYPOTHESIS_FAILED",
            McodeError::PreconditionDegree { .. } => "PRECONDITION_DEGREE",
        };
        CliError::Domain {
            code,
            message: e.to_string(),
        }
    }
}

impl From<CensusError> for CliError {
    fn from(e: CensusError) -> Self {
        let code = match &e {
            CensusError::TooLarge(_) => "TOO_LARGE",
            CensusError::NotCoprime => "NOT_COPRIME",
            CensusError::EvenN => "EVEN_N",
            CensusError::NotPrimePower => "NOT_PRIME_POWER",
        };
        CliError::Domain {
            code,
            message: e.to_string(),
        }
    }
}

/// Resolve `@file` indirection.
fn read_arg(s: &str) -> Result<String, CliError> {
    if let Some(path) = s.strip_prefix('@') {
        std::fs::read_to_string(path)
            .map(|c| c.trim().to_string())
            .map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))
    } else {
        Ok(s.to_string())
    }
}

fn tower_from(field: &str, seed: u64) -> Result<FieldTower, CliError> {
    let mut spec = parse_field_spec(field)?;
    // The request seed backs the tower unless the spec pins its own.
    if !field.contains("seed=") {
        spec.seed = seed;
    }
    Ok(build_tower(&spec)?)
}

fn field_echo(t: &FieldTower) -> Value {
    // kmod lives over F_p: plain integer coefficients in y.
    let kmod = t.k().modulus();
    let mut terms = Vec::new();
    for (i, c) in kmod.coeffs().iter().enumerate().rev() {
        if *c == 0 {
            continue;
        }
        terms.push(match (i, c) {
            (0, c) => c.to_string(),
            (1, 1) => "y".to_string(),
            (1, c) => format!("{c}*y"),
            (i, 1) => format!("y^{i}"),
            (i, c) => format!("{c}*y^{i}"),
        });
    }
    json!({
        "p": t.p(),
        "e": t.e(),
        "m": t.m(),
        "q": t.q().to_string(),
        "kmod": terms.join("+"),
        "lmod": fmt_kpoly_var(t, &t.l().modulus(), "y"),
    })
}

fn rational_json(r: &Rational) -> Value {
    json!({
        "num": r.num().to_string(),
        "den": r.den().to_string(),
        "decimal": r.to_f64(),
    })
}

fn census_json(rep: &CensusReport) -> Value {
    json!({
        "total": rep.total.to_string(),
        "count_not_one": rep.count_not_one.to_string(),
        "proportion": rational_json(&rep.proportion),
        "lower": rational_json(&rep.lower),
        "upper": rational_json(&rep.upper),
        "lower_attained": rep.lower_attained,
        "upper_attained": rep.upper_attained,
    })
}

fn profile_json(p: &CyclotomicProfile) -> Value {
    json!({
        "s": p.s,
        "layers": p.entries.iter().map(|e| json!({
            "d": e.d,
            "o_d_q": e.o_d_q,
            "t_d_q": e.t_d_q,
            "n_d_q": e.n_d_q,
        })).collect::<Vec<_>>(),
    })
}

fn matrix_from_arg(
    t: &FieldTower,
    arg: &MatrixArg,
) -> Result<(Matrix<mcodes_core::gf::KField>, Value), CliError> {
    let k = t.k();
    if let Some(s) = &arg.matrix {
        let text = read_arg(s)?;
        let m = crate::parse::parse_kmatrix(t, &text)?;
        if m.rows() != m.cols() {
            return Err(McodeError::SizeMismatch.into());
        }
        Ok((m, json!({"matrix": text})))
    } else if let Some(s) = &arg.companion {
        let text = read_arg(s)?;
        let p = parse_kpoly(t, &text)?;
        let m = companion(&p, k).map_err(|_| CliError::Domain {
            code: "NOT_MONIC",
            message: "companion polynomial must be monic".into(),
        })?;
        Ok((m, json!({"companion": fmt_kpoly(t, &p)})))
    } else if let Some(s) = &arg.blockdiag {
        let text = read_arg(s)?;
        let mut blocks = Vec::new();
        let mut names = Vec::new();
        for part in text.split(';') {
            let p = parse_kpoly(t, part)?;
            names.push(fmt_kpoly(t, &p));
            blocks.push(companion(&p, k).map_err(|_| CliError::Domain {
                code: "NOT_MONIC",
                message: "block polynomials must be monic".into(),
            })?);
        }
        Ok((block_diag(k, &blocks), json!({"blockdiag": names})))
    } else {
        Err(CliError::Usage(
            "one of --matrix, --companion or --blockdiag is required".into(),
        ))
    }
}

fn warn_convention(t: &FieldTower, n: usize) {
    if !t.meets_length_convention(n) {
        eprintln!(
            "warning: extension degree m = {} is smaller than the length n = {}; \
             rank-weight statements assume m >= n",
            t.m(),
            n
        );
    }
}

pub fn run(cli: &Cli) -> Result<Value, CliError> {
    let results = match &cli.command {
        Command::Factor { field, poly, over } => {
            let t = tower_from(field, cli.seed)?;
            let text = read_arg(poly)?;
            let (inputs, results) = match over {
                OverField::K => {
                    let p = parse_kpoly(&t, &text)?;
                    let fact = factor(&p, t.k(), cli.seed)?;
                    (
                        json!({"poly": fmt_kpoly(&t, &p), "over": "K"}),
                        json!({
                            "unit": fmt_lelt(&t, &t.embed(&fact.unit)),
                            "factors": fact.factors.iter().map(|(p, m)| json!({
                                "poly": fmt_kpoly(&t, p),
                                "mult": m,
                            })).collect::<Vec<_>>(),
                        }),
                    )
                }
                OverField::L => {
                    let p = parse_lpoly(&t, &text)?;
                    let fact = factor(&p, t.l(), cli.seed)?;
                    (
                        json!({"poly": fmt_lpoly(&t, &p), "over": "L"}),
                        json!({
                            "unit": fmt_lelt(&t, &fact.unit),
                            "factors": fact.factors.iter().map(|(p, m)| json!({
                                "poly": fmt_lpoly(&t, p),
                                "mult": m,
                            })).collect::<Vec<_>>(),
                        }),
                    )
                }
            };
            report(&t, inputs, results)
        }

        Command::Oracle { field, gen, r, all } => {
            let t = tower_from(field, cli.seed)?;
            let text = read_arg(gen)?;
            let gm = parse_lmatrix(&t, &text)?;
            let n = gm.cols();
            warn_convention(&t, n);
            let code = LinearCode::from_rows(&t, n, gm.row_vecs());
            let k = code.k();
            let rs: Vec<usize> = match (r, all) {
                (Some(r), _) => vec![*r],
                _ => (1..=k).collect(),
            };
            let mut weights = Vec::new();
            let mut cap_hit = false;
            for &ri in &rs {
                if ri > k {
                    return Err(CliError::Usage(format!(
                        "r = {ri} exceeds the code dimension k = {k}"
                    )));
                }
                match grw_oracle(&t, &code, ri, cli.cap) {
                    Ok(w) => weights.push(json!(w)),
                    Err(RankError::TooLarge(_)) => {
                        weights.push(Value::Null);
                        cap_hit = true;
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            report(
                &t,
                json!({"gen": fmt_lmatrix(&t, code.gen())}),
                json!({"n": n, "k": k, "weights": weights, "cap_hit": cap_hit}),
            )
        }

        Command::Analyze { field, f, g } => {
            let t = tower_from(field, cli.seed)?;
            let fp = parse_kpoly(&t, &read_arg(f)?)?;
            let gp = parse_lpoly(&t, &read_arg(g)?)?;
            let n = fp.deg().unwrap_or(0);
            warn_convention(&t, n);
            let m = companion(&fp, t.k()).map_err(|_| CliError::Domain {
                code: "NOT_MONIC",
                message: "f must be monic".into(),
            })?;
            let code = MCyclicCode::from_generator(&t, &m, &gp)?;
            let k = code.k();
            let m1 = match first_weight_is_one(&t, &code) {
                Ok(b) => json!(b),
                Err(McodeError::ZeroCode) => Value::Null,
                Err(e) => return Err(e.into()),
            };
            let lw = last_weight_closed(&t, &code);
            // Per-component bounds; full components are exact.
            let comps: Vec<ComponentHierarchy> = code
                .primary_parts()
                .iter()
                .zip(code.generator_parts())
                .map(|((fi, mi), gi)| {
                    let d = mi * fi.deg().unwrap();
                    let kk = d - gi.deg().unwrap_or(0);
                    let exact = if gi.is_one(t.l()) {
                        Some((0..=kk).collect())
                    } else {
                        None
                    };
                    ComponentHierarchy { d, k: kk, exact }
                })
                .collect();
            let bounds = if k > 0 {
                combine_hierarchy(&comps, true)?
                    .iter()
                    .enumerate()
                    .map(|(i, b)| json!({"r": i + 1, "value": b.value, "exact": b.exact}))
                    .collect::<Vec<_>>()
            } else {
                Vec::new()
            };
            // Whole-code oracle when the enumeration fits under the cap.
            let mut total = BigUint::from(0u32);
            for r in 1..=k {
                total += gaussian_binomial(t.l().order(), k, r);
            }
            let exact = if k > 0 && total <= BigUint::from(cli.cap) {
                let mut h = Vec::with_capacity(k);
                for r in 1..=k {
                    h.push(grw_oracle(&t, code.code(), r, cli.cap)?);
                }
                Some(h)
            } else {
                None
            };
            let mut results = json!({
                "n": n,
                "k": k,
                "dim_base_intersection": dim_base_intersection(&t, &code),
                "M1_is_one": m1,
                "Mk": lw.mk,
                "dual_Mnk": lw.dual_mnk,
                "bounds": bounds,
            });
            if let Some(h) = exact {
                results["exact"] = json!(h);
            }
            report(
                &t,
                json!({"f": fmt_kpoly(&t, &fp), "g": fmt_lpoly(&t, &gp)}),
                results,
            )
        }

        Command::MrdCheck { field, matrix } => {
            let t = tower_from(field, cli.seed)?;
            let (m, input_echo) = matrix_from_arg(&t, matrix)?;
            let mu = mcodes_core::matmod::min_poly(&m, t.k())
                .map_err(|_| McodeError::SizeMismatch)
                .map_err(CliError::from)?;
            let possible = mrd_possible(t.k(), &m, cli.seed)?;
            report(
                &t,
                input_echo,
                json!({"mu": fmt_kpoly(&t, &mu), "prime_power": possible}),
            )
        }

        Command::KernelCode { field, matrix, p } => {
            let t = tower_from(field, cli.seed)?;
            let (m, input_echo) = matrix_from_arg(&t, matrix)?;
            warn_convention(&t, m.rows());
            let pp = parse_lpoly(&t, &read_arg(p)?)?;
            let kc = kernel_code(&t, &m, &pp, cli.seed)?;
            let mut results = json!({
                "n": m.rows(),
                "k": kc.code.k(),
                "components": kc.components.iter().map(|c| json!({
                    "theta": fmt_kpoly(&t, &c.theta),
                    "gcd": fmt_lpoly(&t, &c.gcd),
                    "generator": fmt_lpoly(&t, &c.generator),
                    "k_i": c.k_i,
                })).collect::<Vec<_>>(),
                "generator_matrix": fmt_lmatrix(&t, kc.code.gen()),
            });
            // Exact hierarchy through the degree-one shortcut when it applies.
            if kc
                .components
                .iter()
                .all(|c| c.gcd.deg().unwrap_or(0) <= 1)
            {
                let d1 = degree_one_hierarchy(&t, &pp, &kc.decomposition)?;
                results["exact_hierarchy"] = json!(d1.hierarchy);
                results["w_weights"] = json!(d1.weights);
            }
            let mut inputs = input_echo;
            inputs["P"] = json!(fmt_lpoly(&t, &pp));
            report(&t, inputs, results)
        }

        Command::Census { which } => match which {
            CensusCommand::Cyclic { n, q, m } => {
                let (rep, profile) = cyclic_census(*n, *q, *m)?;
                let mut results = census_json(&rep);
                results["profile"] = profile_json(&profile);
                bare_report(
                    json!({"family": "cyclic", "n": n, "q": q, "m": m}),
                    results,
                )
            }
            CensusCommand::Poly { field, f } => {
                let t = tower_from(field, cli.seed)?;
                let fp = parse_kpoly(&t, &read_arg(f)?)?;
                if fp.is_zero() {
                    return Err(PolyError::ZeroPoly.into());
                }
                let rep = proportion(&fp, &t, cli.seed);
                report(
                    &t,
                    json!({"f": fmt_kpoly(&t, &fp)}),
                    census_json(&rep),
                )
            }
            CensusCommand::Negacyclic { n, q, m } => {
                let (rep, profile) = negacyclic_census(*n, *q, *m)?;
                let mut results = census_json(&rep);
                results["profile"] = profile_json(&profile);
                bare_report(
                    json!({"family": "negacyclic", "n": n, "q": q, "m": m}),
                    results,
                )
            }
        },
    };
    Ok(results)
}

fn report(t: &FieldTower, inputs: Value, results: Value) -> Value {
    json!({
        "tool_version": env!("CARGO_PKG_VERSION"),
        "field": field_echo(t),
        "inputs": inputs,
        "results": results,
    })
}

fn bare_report(inputs: Value, results: Value) -> Value {
    json!({
        "tool_version": env!("CARGO_PKG_VERSION"),
        "field": Value::Null,
        "inputs": inputs,
        "results": results,
    })
}

/// Flattened `key: value` rendering for `--pretty`.
pub fn render_pretty(v: &Value) -> String {
    let mut out = String::new();
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(map) => {
                for (k, val) in map {
                    let key = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    walk(&key, val, out);
                }
            }
            Value::Array(items) => {
                for (i, val) in items.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), val, out);
                }
            }
            other => {
                out.push_str(prefix);
                out.push_str(": ");
                out.push_str(&other.to_string());
                out.push('\n');
            }
        }
    }
    walk("", v, &mut out);
    out
}
