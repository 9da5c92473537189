use ncfree::deriv::{fisher_and_wasserstein_const, l2_inner, DerivationSpec};
use ncfree::dimension::{limit_check, report, DimensionReport};
use ncfree::generator::{max_residual, DriftVariant, GeneratorSpec, KernelTraceBackend};
use ncfree::ncalg::text::to_text;
use ncfree::ncalg::{NCPolynomial, Tensor2Series, Word};
use ncfree::qfock::{FockVector, QParams, QTrace};
use ncfree::simulate::{burn_in, coupling_experiment, run_many, summarize_drift, CouplingConfig, SdeConfig};
use ncfree::verify::{self, Outcome, ALL};
use ncfree::wick::{gram, min_eig_bound, min_eigenvalue, wick_poly, xi_expansion, EigBoundForm, GramMethod};
use ncfree::{Error, Result};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::config::RunConfig;
use crate::output::{cell, num, nums, poly, word, Sink};
use crate::Command;

/// Largest cutoff used where the kernel is expanded symbolically.
const SYMBOLIC_DEPTH: usize = 2;

fn io(e: std::io::Error) -> Error {
    Error::InvalidParameter(format!("output: {e}"))
}

fn header(cfg: &RunConfig) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("q".into(), num(cfg.q));
    m.insert("N".into(), json!(cfg.alphabet));
    m
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Error::InvalidParameter(format!("bad {what} {s:?}"))))
        .collect()
}

/// Runs a subcommand; `Ok(false)` signals failed checks.
pub fn run(cmd: &Command, cfg: &RunConfig) -> Result<bool> {
    let mut sink = Sink::new(cfg.out_dir.clone()).map_err(io)?;
    let params = QParams::new(cfg.q, cfg.alphabet)?;
    match cmd {
        Command::Gram { n, method, .. } => gram_cmd(&mut sink, cfg, params, *n, method),
        Command::Wick { word: w, .. } => wick_cmd(&mut sink, cfg, params, w),
        Command::Xi { .. } => xi_cmd(&mut sink, cfg, params),
        Command::Conjugate { .. } => conjugate_cmd(&mut sink, cfg, params),
        Command::Fisher { .. } => fisher_cmd(&mut sink, cfg, params),
        Command::Stationarity { .. } => stationarity_cmd(&mut sink, cfg, params),
        Command::Simulate { burn_in, sample_every, .. } => simulate_cmd(&mut sink, cfg, params, *burn_in, *sample_every),
        Command::Coupling { tmin, tmax, points, .. } => coupling_cmd(&mut sink, cfg, params, *tmin, *tmax, *points),
        Command::Bounds { grid, .. } => bounds_cmd(&mut sink, cfg, grid.as_deref()),
        Command::VerifyAll { criteria, .. } => verify_cmd(&mut sink, cfg, criteria.as_deref()),
    }
}

fn gram_cmd(sink: &mut Sink, cfg: &RunConfig, params: QParams, n: usize, method: &str) -> Result<bool> {
    let methods: &[GramMethod] = match method {
        "brute" => &[GramMethod::Brute],
        "recursive" => &[GramMethod::Recursive],
        "both" => &[GramMethod::Brute, GramMethod::Recursive],
        other => return Err(Error::InvalidParameter(format!("unknown method {other:?}"))),
    };
    let mats = methods.iter().map(|&m| gram(n, params, m)).collect::<Result<Vec<_>>>()?;
    let g = mats.last().expect("at least one method");
    let mut out = header(cfg);
    out.insert("n".into(), json!(n));
    out.insert("method".into(), json!(method));
    out.insert("size".into(), json!(g.nrows()));
    out.insert("min_eigenvalue".into(), num(min_eigenvalue(g)));
    out.insert("min_eig_bound".into(), num(min_eig_bound(n, cfg.q, EigBoundForm::Theta)));
    let mut ok = true;
    if mats.len() == 2 {
        let diff = (&mats[0] - &mats[1]).abs().max();
        ok = diff <= 1e-12;
        out.insert("max_abs_difference".into(), num(diff));
        out.insert("methods_agree".into(), json!(ok));
    }
    let rows: Vec<Vec<String>> = (0..g.nrows())
        .flat_map(|i| (0..g.ncols()).map(move |j| (i, j)))
        .map(|(i, j)| vec![i.to_string(), j.to_string(), cell(g[(i, j)])])
        .collect();
    if g.nrows() <= 32 {
        let m: Vec<Value> = g.row_iter().map(|r| nums(&r.iter().copied().collect::<Vec<_>>())).collect();
        out.insert("matrix".into(), Value::Array(m));
    }
    sink.csv("gram", &["row", "col", "value"], &rows).map_err(io)?;
    sink.json("gram", &Value::Object(out)).map_err(io)?;
    Ok(ok)
}

fn wick_cmd(sink: &mut Sink, cfg: &RunConfig, params: QParams, text: &str) -> Result<bool> {
    let letters: Vec<usize> = parse_list(text, "letter")?;
    let w = Word::new(&letters, cfg.alphabet)?;
    let p = wick_poly(&w, &Complex64::new(cfg.q, 0.0), cfg.alphabet)?;
    let got = FockVector::vacuum(cfg.alphabet, w.len()).apply_poly(&p, params.q);
    let err = got.max_abs_diff(&FockVector::basis(&w, cfg.alphabet, w.len())?);
    let mut out = header(cfg);
    out.insert("word".into(), json!(word(&w)));
    out.insert("polynomial".into(), poly(&p));
    out.insert("basis_residual".into(), num(err));
    sink.json("wick", &Value::Object(out)).map_err(io)?;
    Ok(err <= 1e-12)
}

fn xi_cmd(sink: &mut Sink, cfg: &RunConfig, params: QParams) -> Result<bool> {
    let xi = xi_expansion(params, cfg.depth)?;
    let r0 = 2.0 / (1.0 - cfg.q.abs());
    let mut out = header(cfg);
    out.insert("D".into(), json!(cfg.depth));
    out.insert("terms".into(), json!(xi.terms().len()));
    out.insert("level_terms".into(), json!((0..=cfg.depth).map(|n| xi.level(n).len()).collect::<Vec<_>>()));
    out.insert("tail_bound".into(), num(xi.operator_tail()));
    out.insert("rho".into(), num(r0));
    out.insert("level_norms".into(), nums(&xi.level_norms(r0)));
    out.insert("rho_tail".into(), num(xi.rho_tail(r0)));
    if let Some(dir) = sink.dir() {
        std::fs::write(dir.join("xi.txt"), to_text(xi.terms())).map_err(io)?;
    }
    sink.json("xi", &Value::Object(out)).map_err(io)?;
    Ok(true)
}

fn symbolic_spec(cfg: &RunConfig, params: QParams) -> Result<(DerivationSpec, f64, usize)> {
    let depth = cfg.depth.min(SYMBOLIC_DEPTH);
    let xi = xi_expansion(params, depth)?;
    Ok((DerivationSpec::q_semicircular(&xi)?, xi.operator_tail(), depth))
}

fn conjugate_cmd(sink: &mut Sink, cfg: &RunConfig, params: QParams) -> Result<bool> {
    let (spec, tail, depth) = symbolic_spec(cfg, params)?;
    let tau = QTrace::new(params);
    let xi = spec.conjugate_variables(&tau)?;
    let one = Tensor2Series::identity(cfg.alphabet);
    let mut residual: f64 = 0.0;
    for w in Word::all_up_to(cfg.degree, cfg.alphabet) {
        let p = NCPolynomial::monomial(cfg.alphabet, w, Complex64::new(1.0, 0.0))?;
        for j in 1..=cfg.alphabet {
            residual = residual.max(spec.adjoint_residual(j, &one, &p, &tau)?);
        }
    }
    let mut out = header(cfg);
    out.insert("D".into(), json!(depth));
    out.insert("xi".into(), Value::Array(xi.iter().map(poly).collect()));
    out.insert("xi_norms".into(), nums(&xi.iter().map(|x| l2_inner(x, x, &tau).re.sqrt()).collect::<Vec<_>>()));
    out.insert("adjoint_residual".into(), num(residual));
    out.insert("tail_bound".into(), num(tail));
    sink.json("conjugate", &Value::Object(out)).map_err(io)?;
    Ok(true)
}

fn fisher_cmd(sink: &mut Sink, cfg: &RunConfig, params: QParams) -> Result<bool> {
    let (spec, tail, depth) = symbolic_spec(cfg, params)?;
    let r = fisher_and_wasserstein_const(&spec, &QTrace::new(params))?;
    let mut out = header(cfg);
    out.insert("D".into(), json!(depth));
    out.insert("xi_norms".into(), nums(&r.xi_norms_sq.iter().map(|x| x.sqrt()).collect::<Vec<_>>()));
    out.insert("phi_star".into(), num(r.phi_star));
    out.insert("coderivation_sq".into(), num(r.coderivation_sq));
    out.insert("C".into(), num(r.constant));
    out.insert("tail_bound".into(), num(tail));
    sink.json("fisher", &Value::Object(out)).map_err(io)?;
    Ok(true)
}

fn stationarity_cmd(sink: &mut Sink, cfg: &RunConfig, params: QParams) -> Result<bool> {
    let (table, route, depth) = match cfg.drift {
        DriftVariant::Ito => (
            KernelTraceBackend::new(params, cfg.depth).stationarity_residuals(cfg.degree)?,
            "fock",
            cfg.depth,
        ),
        DriftVariant::Literal => {
            let (spec, _, depth) = symbolic_spec(cfg, params)?;
            let tau = QTrace::new(params);
            let g = GeneratorSpec::from_derivation(&spec, &tau, cfg.drift, 2.0 / (1.0 - cfg.q.abs()))?;
            (g.stationarity_residuals(cfg.degree, &tau)?, "symbolic", depth)
        }
    };
    let rows: Vec<Vec<String>> = table.iter().map(|(w, r)| vec![word(w), cell(*r)]).collect();
    let mut out = header(cfg);
    out.insert("D".into(), json!(depth));
    out.insert("degree".into(), json!(cfg.degree));
    out.insert("drift".into(), json!(format!("{:?}", cfg.drift).to_lowercase()));
    out.insert("route".into(), json!(route));
    out.insert("max_residual".into(), num(max_residual(&table)));
    out.insert("tail_bound".into(), num(cfg.q.abs().powi(depth as i32 + 1) / (1.0 - cfg.q.abs())));
    sink.csv("stationarity", &["word", "residual"], &rows).map_err(io)?;
    sink.json("stationarity", &Value::Object(out)).map_err(io)?;
    Ok(true)
}

/// The SDE whose stationary law is the q-semicircular one; at `q = 0` this
/// is the Ornstein–Uhlenbeck process.
fn sde_spec(cfg: &RunConfig, params: QParams) -> Result<(GeneratorSpec, usize)> {
    if cfg.q == 0.0 {
        return Ok((GeneratorSpec::ornstein_uhlenbeck(cfg.alphabet, DriftVariant::Ito), 0));
    }
    let (spec, _, depth) = symbolic_spec(cfg, params)?;
    let g = GeneratorSpec::from_derivation(&spec, &QTrace::new(params), DriftVariant::Ito, 2.0 / (1.0 - cfg.q.abs()))?;
    Ok((g, depth))
}

fn simulate_cmd(sink: &mut Sink, cfg: &RunConfig, params: QParams, burn: f64, sample_every: usize) -> Result<bool> {
    let (spec, depth) = sde_spec(cfg, params)?;
    let sde = SdeConfig {
        dt: cfg.dt,
        horizon: cfg.horizon,
        k: cfg.k,
        seed: cfg.seed,
        moment_degree: cfg.degree,
        sample_every,
        ..SdeConfig::default()
    };
    let mut out = header(cfg);
    let start = if cfg.q != 0.0 {
        let warm = SdeConfig { horizon: burn, ..sde.clone() };
        let (x, gap) = burn_in(&spec, &warm, &QTrace::new(params))?;
        out.insert("burn_in".into(), num(burn));
        out.insert("burn_in_moment_gap".into(), num(gap));
        Some(x.matrices)
    } else {
        None
    };
    let runs = run_many(&spec, &sde, cfg.seeds, start.as_deref())?;
    let drift = summarize_drift(&runs);
    let mut rows = Vec::new();
    for (s, run) in runs.iter().enumerate() {
        for (t, table) in run.times.iter().zip(&run.moments) {
            for (w, m) in table {
                rows.push(vec![s.to_string(), cell(*t), word(w), cell(*m)]);
            }
        }
    }
    for (key, v) in [("K", json!(cfg.k)), ("D", json!(depth)), ("seed", json!(cfg.seed)), ("seeds", json!(cfg.seeds))] {
        out.insert(key.into(), v);
    }
    out.insert("dt".into(), num(cfg.dt));
    out.insert("T".into(), num(cfg.horizon));
    out.insert("max_drift".into(), num(drift.max_drift));
    let drifts: Map<String, Value> = drift.drifts.iter().map(|(w, d)| (word(w), num(*d))).collect();
    out.insert("drifts".into(), Value::Object(drifts));
    out.insert("max_hermiticity_residual".into(), num(drift.max_hermiticity_residual));
    out.insert("guards_tripped".into(), json!(0));
    sink.csv("simulate", &["seed", "t", "word", "trace"], &rows).map_err(io)?;
    sink.json("simulate", &Value::Object(out)).map_err(io)?;
    Ok(true)
}

fn coupling_cmd(sink: &mut Sink, cfg: &RunConfig, params: QParams, tmin: f64, tmax: f64, points: usize) -> Result<bool> {
    if !(tmin > 0.0 && tmax > tmin) {
        return Err(Error::InvalidParameter(format!("need 0 < tmin < tmax, got {tmin}, {tmax}")));
    }
    let (spec, depth) = sde_spec(cfg, params)?;
    let cc = CouplingConfig {
        dt: cfg.dt,
        k: cfg.k,
        seed: cfg.seed,
        seeds: cfg.seeds,
        times: CouplingConfig::log_grid(tmin, tmax, points),
        ..CouplingConfig::default()
    };
    let r = coupling_experiment(&spec, &cc)?;
    let rows: Vec<Vec<String>> = r.times.iter().zip(&r.distances).map(|(t, d)| vec![cell(*t), cell(*d)]).collect();
    let mut out = header(cfg);
    for (key, v) in [("K", json!(cfg.k)), ("D", json!(depth)), ("seed", json!(cfg.seed)), ("seeds", json!(cfg.seeds))] {
        out.insert(key.into(), v);
    }
    out.insert("dt".into(), num(cfg.dt));
    out.insert("times".into(), nums(&r.times));
    out.insert("distances".into(), nums(&r.distances));
    out.insert("slope".into(), num(r.slope));
    out.insert("intercept".into(), num(r.intercept));
    sink.csv("coupling", &["t", "distance"], &rows).map_err(io)?;
    sink.json("coupling", &Value::Object(out)).map_err(io)?;
    Ok(true)
}

fn dimension_json(r: &DimensionReport) -> Value {
    json!({
        "q": num(r.q),
        "N": r.alphabet,
        "threshold": num(r.threshold),
        "in_range": r.in_range,
        "eta_bound": r.eta_bound.map_or(Value::Null, num),
        "exceeds_one": r.exceeds_one,
        "notes": r.notes,
    })
}

fn bounds_cmd(sink: &mut Sink, cfg: &RunConfig, grid: Option<&str>) -> Result<bool> {
    let mut out = match dimension_json(&report(cfg.q, cfg.alphabet)) {
        Value::Object(m) => m,
        _ => unreachable!("object literal"),
    };
    if let Some(g) = grid {
        let qs: Vec<f64> = parse_list(g, "q value")?;
        let (rows, monotone) = limit_check(cfg.alphabet, &qs);
        out.insert("grid".into(), Value::Array(rows.iter().map(dimension_json).collect()));
        out.insert("monotone_to_N".into(), json!(monotone));
    }
    sink.json("bounds", &Value::Object(out)).map_err(io)?;
    Ok(true)
}

fn verify_cmd(sink: &mut Sink, cfg: &RunConfig, criteria: Option<&str>) -> Result<bool> {
    let ids: Vec<u8> = match criteria {
        Some(text) => parse_list(text, "criterion")?,
        None => ALL.to_vec(),
    };
    if ids.is_empty() {
        return Err(Error::InvalidParameter("no criteria selected".into()));
    }
    let mut outcomes: Vec<Outcome> = Vec::new();
    for &id in &ids {
        let o = if id == 6 { verify::criterion_6_with(cfg.drift) } else { verify::criterion(id)? };
        eprintln!("{o}");
        outcomes.push(o);
    }
    let passed = outcomes.iter().all(|o| o.passed);
    let list: Vec<Value> = outcomes
        .iter()
        .map(|o| {
            json!({
                "id": o.id,
                "name": o.name,
                "passed": o.passed,
                "detail": o.detail,
                "expected_failures": o.expected_failures,
            })
        })
        .collect();
    sink.json("verify", &json!({"passed": passed, "criteria": list})).map_err(io)?;
    Ok(passed)
}
