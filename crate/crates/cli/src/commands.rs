use serde_json::{json, Map, Value};
use thiserror::Error;

use crn_msa::decomposition::{
    fundamental_decomposition, is_c_decomposition, is_incidence_independent, is_independent, Decomposition,
};
use crn_msa::kinetics::{classify_rdk, sfrf, PLKinetics, PolyPLKinetics, PolyPLTerm, RdkClass};
use crn_msa::linalg::{in_column_space, signum, to_f64};
use crn_msa::msa::{
    construct_equilibria, pyk_verdict, run_msa, ClassKind, Linearity, MsaConfig, MsaError,
    MsaOutcome, Orientation, Verdict, Witness, RESIDUAL_TOL,
};
use crn_msa::star::{cf_translate, star_msc, verify_dynamic_equivalence, verify_network_numbers, StarMscTransform};
use crn_msa::{Network, Rational};

use crate::format::{parse_network, parse_rational, print_network, NetworkFile, ParseError};
use crate::report::{num, nums, strings, Doc};

/// Relative tolerance of the dynamic equivalence check.
pub const EQUIVALENCE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("{0}")]
    Budget(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 1,
            CliError::Precondition(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

/// A report and the exit code it warrants.
#[derive(Debug)]
pub struct Output {
    pub report: Value,
    pub exit: i32,
}

impl Output {
    fn ok(report: impl Into<Value>) -> Self {
        Output {
            report: report.into(),
            exit: 0,
        }
    }
}

pub fn load(path: &str) -> Result<NetworkFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Precondition(format!("{path}: {e}")))?;
    Ok(parse_network(&text)?)
}

fn labels(net: &Network, idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&j| net.reactions()[j].label.clone()).collect()
}

fn label_indices(net: &Network, list: &str) -> Result<Vec<usize>, CliError> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|l| {
            net.reaction_index(l)
                .ok_or_else(|| CliError::Precondition(format!("unknown reaction `{l}`")))
        })
        .collect()
}

fn kinetics_class(file: &NetworkFile) -> String {
    let h = file.kinetics.max_terms();
    if h > 1 {
        return format!("poly-PL (h = {h})");
    }
    match star_msc(&file.network, &file.kinetics) {
        Ok(t) => match classify_rdk(&t.transformed, &t.transformed_kinetics) {
            RdkClass::Rdk => "PL-RDK".into(),
            RdkClass::Ndk(..) => "PL-NDK".into(),
        },
        Err(e) => format!("invalid ({e})"),
    }
}

pub fn analyze(file: &NetworkFile) -> Output {
    let net = &file.network;
    let n = net.numbers();
    let mut d = Doc::new("analyze");
    d.set("species_names", strings(net.species_names()))
        .set("species", n.species)
        .set("complexes", n.complexes)
        .set("reactant_complexes", n.reactant_complexes)
        .set("reactions", n.reactions)
        .set("linkage_classes", n.linkage_classes)
        .set("strong_linkage_classes", n.strong_linkage_classes)
        .set("terminal_classes", n.terminal_classes)
        .set("rank", n.rank)
        .set("reactant_rank", n.reactant_rank)
        .set("deficiency", n.deficiency)
        .set("reactant_deficiency", n.reactant_deficiency)
        .set("weakly_reversible", n.weakly_reversible)
        .set("t-minimal", n.t_minimal)
        .set("point_terminal", n.point_terminal)
        .set("cycle_terminal", n.cycle_terminal)
        .set("terminality", if n.tbd { "TBD" } else { "TND" })
        .set(
            "reactant_diversity",
            if n.reactant_diversity.is_sufficient() { "SRD" } else { "LRD" },
        )
        .set("reactant_diversity_class", n.reactant_diversity.code())
        .set("subspace_type", n.subspace_type.code())
        .set("kinetics", kinetics_class(file));
    Output::ok(d)
}

fn transform_of(file: &NetworkFile) -> Result<StarMscTransform, CliError> {
    star_msc(&file.network, &file.kinetics).map_err(|e| CliError::Precondition(e.to_string()))
}

fn transformed_file(t: &StarMscTransform, file: &NetworkFile) -> NetworkFile {
    NetworkFile {
        network: t.transformed.clone(),
        kinetics: PolyPLKinetics::from_pl(&t.transformed_kinetics),
        rates: file.rates.clone(),
    }
}

fn equivalence(t: &StarMscTransform, file: &NetworkFile, trials: usize, seed: u64) -> Result<Value, CliError> {
    let worst = verify_dynamic_equivalence(t, trials, &file.rate_values(), seed)
        .map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(json!({
        "trials": trials,
        "seed": seed,
        "max_relative_residual": num(worst),
        "passed": worst < EQUIVALENCE_TOL,
    }))
}

pub fn transform(file: &NetworkFile, trials: usize, seed: u64) -> Result<Output, CliError> {
    let t = transform_of(file)?;
    let table = verify_network_numbers(&t);
    let checks: Vec<Value> = table
        .checks
        .iter()
        .map(|c| json!({"name": c.name, "expected": c.expected, "actual": c.actual, "passed": c.passed()}))
        .collect();
    let eq = equivalence(&t, file, trials, seed)?;
    let passed = table.all_passed() && eq["passed"] == Value::Bool(true);
    let mut d = Doc::new("transform");
    d.set("h", t.h)
        .set("identity", t.identity)
        .set("translation_unit", t.m_shift.to_string())
        .set("ones_in_reactant_space", table.ones_in_reactant_space)
        .set("identities", Value::Array(checks))
        .set("dynamic_equivalence", eq)
        .set("replicas", replica_table(&t))
        .set("transformed", print_network(&transformed_file(&t, file)));
    Ok(Output {
        report: d.into_value(),
        exit: if passed { 0 } else { 4 },
    })
}

fn replica_table(t: &StarMscTransform) -> Value {
    let rows = t
        .transformed
        .reactions()
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let (i, j) = t.reaction_map[k];
            json!({
                "reaction": r.label,
                "original": t.original.reactions()[i].label,
                "term": j + 1,
                "replica": t.replica_map[k],
            })
        })
        .collect();
    Value::Array(rows)
}

pub fn decompose(file: &NetworkFile, parts: Option<&str>, orientation: Option<&str>) -> Result<Output, CliError> {
    let net = &file.network;
    let d = match parts {
        Some(spec) => {
            let parts: Vec<Vec<String>> = spec
                .split(';')
                .map(|p| p.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect())
                .collect();
            Decomposition::from_labels(net, &parts).map_err(CliError::Precondition)?
        }
        None => {
            let o = match orientation {
                Some(list) => Orientation::new(net, label_indices(net, list)?),
                None => Orientation::new(
                    net,
                    (0..net.num_reactions())
                        .filter(|&j| net.reverse_of(j).is_none_or(|k| j < k))
                        .collect(),
                ),
            }
            .map_err(|e| CliError::Precondition(e.to_string()))?;
            fundamental_decomposition(net, &o).map_err(|e| CliError::Precondition(e.to_string()))?
        }
    };
    let defs = d.part_deficiencies();
    let sum: i64 = defs.iter().sum();
    let delta = net.numbers().deficiency;
    let independent = is_independent(&d);
    let incidence = is_incidence_independent(&d);
    let mut doc = Doc::new("decompose");
    doc.set("source", if parts.is_some() { "given" } else { "fundamental" })
        .set(
            "parts",
            Value::Array(
                d.parts()
                    .iter()
                    .zip(&defs)
                    .map(|(p, def)| json!({"reactions": labels(net, p), "deficiency": def}))
                    .collect(),
            ),
        )
        .set("deficiency", delta)
        .set("sum_of_part_deficiencies", sum)
        .set("independent", independent)
        .set("incidence_independent", incidence)
        .set("c_decomposition", is_c_decomposition(&d));
    if independent {
        doc.set("deficiency_at_most_sum", delta <= sum);
    }
    if incidence {
        doc.set("deficiency_at_least_sum", delta >= sum);
    }
    Ok(Output::ok(doc))
}

/// The power-law system the search runs on.
struct Solved {
    net: Network,
    kin: PLKinetics,
    cf_translated: bool,
}

fn solved_system(t: &StarMscTransform) -> Result<Solved, CliError> {
    if classify_rdk(&t.transformed, &t.transformed_kinetics) == RdkClass::Rdk {
        return Ok(Solved {
            net: t.transformed.clone(),
            kin: t.transformed_kinetics.clone(),
            cf_translated: false,
        });
    }
    let (net, kin) =
        cf_translate(&t.transformed, &t.transformed_kinetics).map_err(|e| CliError::Precondition(e.to_string()))?;
    Ok(Solved {
        net,
        kin,
        cf_translated: true,
    })
}

pub struct MsaOptions {
    pub budget: usize,
    pub max_orientations: usize,
    pub orientation: Option<String>,
    pub seed: u64,
}

pub fn msa(file: &NetworkFile, opts: &MsaOptions) -> Result<Output, CliError> {
    let t = transform_of(file)?;
    let sys = solved_system(&t)?;
    let orientation = opts
        .orientation
        .as_deref()
        .map(|list| label_indices(&sys.net, list))
        .transpose()?;
    let cfg = MsaConfig {
        budget: opts.budget,
        max_orientations: opts.max_orientations,
        orientation,
    };
    let out = run_msa(&sys.net, &sys.kin, &cfg).map_err(|e| match e {
        MsaError::BudgetExhausted { .. } => CliError::Budget(format!("{e}, inconclusive")),
        MsaError::TooManyOrderedClasses { .. } => CliError::Budget(e.to_string()),
        MsaError::Kinetics(_) | MsaError::Classes(_) => CliError::Precondition(e.to_string()),
        MsaError::Fm(_) => CliError::Internal(e.to_string()),
    })?;
    let mut d = Doc::new("msa");
    d.set("network", print_network(file));
    d.set(
        "transform",
        json!({
            "h": t.h,
            "identity": t.identity,
            "cf_translated": sys.cf_translated,
            "reactions": sys.net.num_reactions(),
            "dynamic_equivalence": equivalence(&t, file, 20, opts.seed)?,
        }),
    );
    d.set("verdict", out.verdict.name());
    d.set("stats", stats(&out));
    let exit = match out.verdict {
        Verdict::Multistationary | Verdict::Monostationary => 0,
        Verdict::Inconclusive | Verdict::InconclusiveNonlinear => 3,
    };
    if let Some(w) = &out.witness {
        d.set("witness", witness(&sys.net, w));
        let pyk = pyk_verdict(&t, w).map_err(|e| CliError::Internal(e.to_string()))?;
        let rows: Vec<Value> = file
            .network
            .reactions()
            .iter()
            .enumerate()
            .map(|(i, r)| {
                json!({
                    "reaction": r.label,
                    "coefficients": nums(&pyk.coefficients[i]),
                    "scale": nums(&pyk.scale[i]),
                    "rate_constant": pyk.rate_constants[i].map(num),
                })
            })
            .collect();
        d.set(
            "original",
            json!({
                "kinetics": recovered_kinetics(file, &pyk.coefficients),
                "terms": rows,
                "residual_star": num(pyk.residual_star),
                "residual_star2": num(pyk.residual_star2),
                "verified": pyk.verified(),
            }),
        );
    }
    Ok(Output {
        report: d.into_value(),
        exit,
    })
}

fn stats(out: &MsaOutcome) -> Value {
    let s = &out.stats;
    json!({
        "orientations": s.orientations,
        "orientations_rejected": s.orientations_rejected,
        "branch_solves": s.branch_solves,
        "feasible_unrealized": s.feasible_unrealized,
        "nonlinear_feasible_unrealized": s.nonlinear_feasible_unrealized,
    })
}

fn rationals(v: &[Rational]) -> Value {
    strings(v.iter())
}

fn sign_char(s: i8) -> &'static str {
    match s.signum() {
        1 => "+",
        -1 => "-",
        _ => "0",
    }
}

fn kind_name(k: ClassKind) -> String {
    match k {
        ClassKind::Nondegenerate { g, h } => format!("g {} h {}", sign_char(g), sign_char(h)),
        ClassKind::Degenerate { h } => format!("degenerate h {}", sign_char(h)),
    }
}

fn witness(net: &Network, w: &Witness) -> Value {
    let p = &w.provenance;
    let cs = &p.structure;
    let classes: Vec<Value> = cs
        .classes
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let shelves = p.shelving[i]
                .as_ref()
                .map(|s| strings(s.iter().map(|x| x.name())))
                .unwrap_or(Value::Null);
            json!({
                "members": labels(net, &c.members),
                "representative": net.reactions()[c.representative].label,
                "kind": kind_name(p.kinds[i]),
                "shelves": shelves,
            })
        })
        .collect();
    let m_names: Vec<String> = p.ordered_classes.iter().map(|&c| format!("M{}", c + 1)).collect();
    let mut levels: Vec<Vec<String>> = vec![Vec::new(); p.levels.iter().max().map_or(0, |l| l + 1)];
    for (name, &l) in m_names.iter().zip(&p.levels) {
        levels[l].push(name.clone());
    }
    let ordering = levels.iter().map(|g| g.join(" = ")).collect::<Vec<_>>().join(" < ");
    let mut rates = Map::new();
    for (j, r) in net.reactions().iter().enumerate() {
        rates.insert(r.label.clone(), num(w.recovery.rates[j]));
    }
    let sys = &p.system;
    json!({
        "initial_orientation": p.initial_orientation.labels(net),
        "orientation": cs.orientation.labels(net),
        "kernel_dimension": cs.kernel_dim(),
        "kernel_basis": cs.kernel_basis.iter().map(|v| rationals(v)).collect::<Vec<_>>(),
        "p0": labels(net, &cs.p0),
        "classes": classes,
        "fundamental_classes": cs.fundamental_parts().iter().map(|f| labels(net, f)).collect::<Vec<_>>(),
        "w_basis": p.w_basis.iter().map(|v| rationals(v)).collect::<Vec<_>>(),
        "linearity": match p.linearity { Linearity::Linear => "linear", Linearity::PossiblyNonlinear => "possibly nonlinear" },
        "m_ordering": ordering,
        "constraints": strings(sys.constraints().iter().map(|c| sys.render(c))),
        "variables": strings(sys.names()),
        "sample": rationals(&w.sample),
        "mu": rationals(&w.mu),
        "tau": w.tau.iter().map(|&t| sign_char(t)).collect::<Vec<_>>(),
        "sigma": rationals(&w.sigma),
        "c_star": nums(&w.c_star),
        "c_star2": nums(&w.c_star2),
        "kappa": nums(&w.recovery.kappa),
        "exp_t_mu": nums(&w.recovery.exp_t_mu),
        "rates": Value::Object(rates),
        "residual_star": num(w.recovery.residual_star),
        "residual_star2": num(w.recovery.residual_star2),
    })
}

fn recovered_kinetics(file: &NetworkFile, coefficients: &[Vec<f64>]) -> Value {
    let names = file.network.species_names();
    let rows = file
        .network
        .reactions()
        .iter()
        .zip(file.kinetics.terms())
        .zip(coefficients)
        .map(|((r, ts), cs)| {
            let body: Vec<String> = ts
                .iter()
                .zip(cs)
                .map(|(t, c)| {
                    let mut s = num(*c).to_string();
                    for (e, name) in t.orders.iter().zip(&names) {
                        if *e == Rational::from_integer(1.into()) {
                            s.push_str(&format!(" {name}"));
                        } else if *e != Rational::from_integer(0.into()) {
                            s.push_str(&format!(" {name}^{e}"));
                        }
                    }
                    s
                })
                .collect();
            format!("K_{} = {}", r.label, body.join(" + "))
        })
        .collect::<Vec<_>>();
    strings(rows)
}

fn field<'a>(v: &'a Value, path: &[&str]) -> Result<&'a Value, CliError> {
    let mut cur = v;
    for p in path {
        cur = cur
            .get(p)
            .ok_or_else(|| CliError::Precondition(format!("witness document lacks `{}`", path.join("."))))?;
    }
    Ok(cur)
}

fn rational_list(v: &Value, name: &str) -> Result<Vec<Rational>, CliError> {
    v.as_array()
        .and_then(|xs| xs.iter().map(|x| x.as_str().and_then(parse_rational)).collect())
        .ok_or_else(|| CliError::Precondition(format!("`{name}` is not a list of rationals")))
}

fn float_list(v: &Value, name: &str) -> Result<Vec<f64>, CliError> {
    v.as_array()
        .and_then(|xs| xs.iter().map(Value::as_f64).collect())
        .ok_or_else(|| CliError::Precondition(format!("`{name}` is not a list of numbers")))
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

/// Re-checks the witness of an `msa` JSON report.
pub fn verify(doc: &Value) -> Result<Output, CliError> {
    if doc.get("format").and_then(Value::as_u64) != Some(crate::report::FORMAT_VERSION) {
        return Err(CliError::Precondition("unsupported report format".into()));
    }
    let text = field(doc, &["network"])?
        .as_str()
        .ok_or_else(|| CliError::Precondition("`network` is not text".into()))?;
    let file = parse_network(text)?;
    let t = transform_of(&file)?;
    let sys = solved_system(&t)?;
    let w = field(doc, &["witness"])?;
    let mu = rational_list(field(w, &["mu"])?, "mu")?;
    let sigma = rational_list(field(w, &["sigma"])?, "sigma")?;
    let c_star = float_list(field(w, &["c_star"])?, "c_star")?;
    let c_star2 = float_list(field(w, &["c_star2"])?, "c_star2")?;
    let m = file.network.num_species();
    if mu.len() != m || sigma.len() != m || c_star.len() != m || c_star2.len() != m {
        return Err(CliError::Precondition("witness vectors have the wrong length".into()));
    }
    let rate_map = field(w, &["rates"])?
        .as_object()
        .ok_or_else(|| CliError::Precondition("`rates` is not a map".into()))?;
    let rates: Vec<f64> = sys
        .net
        .reactions()
        .iter()
        .map(|r| {
            rate_map
                .get(&r.label)
                .and_then(Value::as_f64)
                .ok_or_else(|| CliError::Precondition(format!("no rate for `{}`", r.label)))
        })
        .collect::<Result<_, _>>()?;

    let mut checks: Vec<Value> = Vec::new();
    let mut all = true;
    let mut check = |name: &str, passed: bool, detail: Value| {
        all &= passed;
        checks.push(json!({"check": name, "passed": passed, "detail": detail}));
    };

    check(
        "positive",
        c_star.iter().chain(&c_star2).all(|&x| x > 0.0) && rates.iter().all(|&k| k > 0.0),
        Value::Null,
    );
    check("distinct", mu.iter().any(|u| *u != Rational::from_integer(0.into())), Value::Null);
    check(
        "difference_in_stoichiometric_subspace",
        in_column_space(&file.network.stoichiometric_matrix(), &sigma),
        rationals(&sigma),
    );
    check(
        "signs_agree",
        mu.iter().zip(&sigma).all(|(u, s)| signum(u) == signum(s)),
        Value::Null,
    );
    let (e_star, e_star2) = construct_equilibria(&mu, &sigma);
    let gap = e_star
        .iter()
        .zip(&c_star)
        .chain(e_star2.iter().zip(&c_star2))
        .fold(0.0f64, |a, (x, y)| a.max((x - y).abs() / x.abs().max(1.0)));
    check("equilibria_match_mu_and_sigma", gap < 1e-8, num(gap));
    let diff: Vec<f64> = c_star.iter().zip(&c_star2).zip(&sigma).map(|((a, b), s)| a - b - to_f64(s)).collect();
    check("c_star_minus_c_star2_is_sigma", max_abs(&diff) < 1e-8, num(max_abs(&diff)));

    let residual = |c: &[f64]| -> Result<f64, CliError> {
        sfrf(&sys.net, &sys.kin, c, &rates)
            .map(|f| max_abs(&f))
            .map_err(|e| CliError::Internal(e.to_string()))
    };
    let (r1, r2) = (residual(&c_star)?, residual(&c_star2)?);
    check("transformed_residual_star", r1 < RESIDUAL_TOL, num(r1));
    check("transformed_residual_star2", r2 < RESIDUAL_TOL, num(r2));

    if let Some(terms) = doc.get("original").and_then(|o| o.get("terms")).and_then(Value::as_array) {
        let coeffs: Vec<Vec<f64>> = terms
            .iter()
            .map(|row| float_list(field(row, &["coefficients"])?, "coefficients"))
            .collect::<Result<_, _>>()?;
        let shaped = coeffs.len() == file.network.num_reactions()
            && coeffs.iter().zip(file.kinetics.terms()).all(|(c, t)| c.len() == t.len());
        if !shaped || coeffs.iter().flatten().any(|&c| c <= 0.0) {
            check("original_coefficients", false, Value::Null);
        } else {
            let kin = PolyPLKinetics::new(
                &file.network,
                file.kinetics
                    .terms()
                    .iter()
                    .zip(&coeffs)
                    .map(|(ts, cs)| {
                        ts.iter()
                            .zip(cs)
                            .map(|(t, &c)| {
                                PolyPLTerm::new(Rational::from_float(c).unwrap_or_default(), t.orders.clone())
                            })
                            .collect()
                    })
                    .collect(),
                file.kinetics.rates().to_vec(),
            )
            .map_err(|e| CliError::Internal(e.to_string()))?;
            let ones = vec![1.0; file.network.num_reactions()];
            let res = |c: &[f64]| -> Result<f64, CliError> {
                sfrf(&file.network, &kin, c, &ones)
                    .map(|f| max_abs(&f))
                    .map_err(|e| CliError::Internal(e.to_string()))
            };
            let (o1, o2) = (res(&c_star)?, res(&c_star2)?);
            check("original_residual_star", o1 < RESIDUAL_TOL, num(o1));
            check("original_residual_star2", o2 < RESIDUAL_TOL, num(o2));
        }
    }

    let mut d = Doc::new("verify");
    d.set("checks", Value::Array(checks)).set("verified", all);
    Ok(Output {
        report: d.into_value(),
        exit: if all { 0 } else { 2 },
    })
}
