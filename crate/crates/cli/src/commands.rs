//! One function per subcommand. Each returns the result payload and an
//! optional CSV profile.

use std::cell::RefCell;

use epschain::fixtures::fixtures;
use epschain::gradient::{check_curve_consistency, ConsistencyOptions};
use epschain::poincare::audit_radii;
use epschain::space::io::SpaceDocument;
use epschain::space::{default_radii, doubling_constant, generate_space, snowflake, MassRule, SpaceGenerator};
use epschain::{
    ball_pi_audit, bmc_audit, chain_modulus, chain_potential, chain_width, eb_pipeline, energy_ladder,
    is_weak_exceptional, keith_modulus_ladder, leibniz_gradient, minimal_gradient, minimal_weak_gradient,
    minkowski_profile, pointwise_pi_check, potential_gradient_check, riemann_sum, riesz_weights, verify_upper_gradient,
    verify_with, EbOptions, FieldRole, FunctionClass, GradientOptions, Metric, ModulusOptions, PotentialSpec, ScalarField, SeedRule,
    SolveReport, SolverOptions, VerifyOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::expr::Expr;
use crate::inputs::{class, id, ids, measure, parse_real, Inputs, Loaded};
use crate::output::{to_json, write_file, Table};

pub struct Outcome {
    pub result: Value,
    pub table: Option<Table>,
}

impl Outcome {
    fn value(result: Value) -> Self {
        Outcome { result, table: None }
    }
}

pub fn value<T: Serialize>(v: &T) -> CliResult<Value> {
    serde_json::to_value(v).map_err(|e| CliError::Output(e.to_string()))
}

fn solver(g: &Global) -> SolverOptions {
    let mut s = SolverOptions::default();
    if let Some(t) = g.tol_feas {
        s.tol_feas = t;
    }
    if let Some(t) = g.tol_kkt {
        s.tol_kkt = t;
    }
    s.time_budget_ms = g.time_budget_ms;
    s
}

fn param(v: Option<f64>, from_fixture: Option<f64>, name: &str) -> CliResult<f64> {
    v.or(from_fixture).ok_or_else(|| CliError::ConfigParse(format!("missing --{name}")))
}

fn eps_of(v: Option<f64>, l: &Loaded) -> CliResult<f64> {
    param(v, l.fixture.as_ref().map(|f| f.eps), "eps")
}

fn p_of(v: Option<f64>, l: &Loaded) -> f64 {
    v.or(l.fixture.as_ref().map(|f| f.p)).unwrap_or(1.0)
}

fn lambda_of(v: Option<f64>, l: &Loaded) -> f64 {
    v.or(l.fixture.as_ref().map(|f| f.lambda)).unwrap_or(0.5)
}

pub fn execute(cmd: &Command, global: &Global, inputs: &mut Inputs) -> CliResult<Outcome> {
    match cmd {
        Command::Space(SpaceCmd::Gen(a)) => space_gen(a),
        Command::Space(SpaceCmd::Validate(a)) => space_validate(a, inputs),
        Command::Gradient(c) => gradient(c, global, inputs),
        Command::Modulus(a) => modulus(a, global, inputs),
        Command::Keith(a) => keith(a, global, inputs),
        Command::Poincare(c) => poincare(c, global, inputs),
        Command::Potential(a) => potential(a, inputs),
        Command::Leibniz(a) => leibniz(a, inputs),
        Command::EbPipeline(a) => eb(a),
        Command::Riemann(a) => riemann(a, global),
        Command::Fixtures(a) => list_fixtures(a),
        Command::Run(_) => Err(CliError::ConfigParse("a run config cannot run another config".into())),
    }
}

fn space_gen(a: &SpaceGenArgs) -> CliResult<Outcome> {
    let need_side = || a.side.ok_or_else(|| CliError::ConfigParse("missing --side".into()));
    let dim = a.dim.unwrap_or(1);
    let spacing = |side: usize| a.spacing.unwrap_or(if side > 1 { 1.0 / (side - 1) as f64 } else { 1.0 });
    let mass = match a.mass.as_deref() {
        None | Some("cell") => MassRule::CellVolume,
        Some(m) => MassRule::Constant(parse_real(m)?),
    };
    let generator = match a.kind.as_str() {
        "grid" => {
            let side = need_side()?;
            SpaceGenerator::Grid { dim, side, spacing: spacing(side), mass }
        }
        "punctured-grid" => {
            let side = need_side()?;
            SpaceGenerator::PuncturedGrid { dim, side, spacing: spacing(side), mass, punctures: a.punctures.clone() }
        }
        "two-sequence" => {
            let (Some(n_min), Some(n_max)) = (a.n_min, a.n_max) else {
                return Err(CliError::ConfigParse("two-sequence needs --n-min and --n-max".into()));
            };
            SpaceGenerator::TwoSequence { n_min, n_max }
        }
        k => return Err(CliError::ConfigParse(format!("unknown space kind {k:?}"))),
    };
    let mut space = generate_space(&generator).map_err(CliError::Input)?;
    if let Some(alpha) = a.alpha {
        space = snowflake(&space, alpha).map_err(CliError::Input)?;
    }
    let doc = SpaceDocument::from_space(&space);
    if let Some(path) = &a.write {
        write_file(path, &to_json(&doc)?)?;
    }
    Ok(Outcome::value(json!({ "generator": value(&generator)?, "n": space.len(), "space": value(&doc)? })))
}

fn space_validate(a: &SpaceValidateArgs, inputs: &mut Inputs) -> CliResult<Outcome> {
    let mut space = inputs.space(&a.input)?.space;
    if let Some(alpha) = a.alpha {
        space = snowflake(&space, alpha).map_err(CliError::Input)?;
    }
    let radii = default_radii(&space);
    let doubling = if radii.is_empty() { None } else { Some(doubling_constant(&space, &radii)?) };
    Ok(Outcome::value(json!({
        "valid": true,
        "n": space.len(),
        "total_mass": space.total_mass(),
        "diameter": space.diameter(),
        "min_separation": space.min_separation(),
        "doubling": value(&doubling)?,
    })))
}

/// Report JSON for a minimal gradient, with the returned field re-verified.
fn gradient_report(r: &SolveReport, violations: Value) -> CliResult<Value> {
    let mut v = value(r)?;
    if let Value::Object(m) = &mut v {
        if let Some(f) = m.remove("field") {
            m.insert("g".into(), f);
        }
        m.insert("violations".into(), violations);
    }
    Ok(v)
}

fn gradient(cmd: &GradientCmd, global: &Global, inputs: &mut Inputs) -> CliResult<Outcome> {
    match cmd {
        GradientCmd::Verify(a) => {
            let l = inputs.space(&a.input)?;
            let u = inputs.function(a.u.as_deref(), &l)?;
            let g = inputs.field(&a.g, &l, FieldRole::Gradient)?;
            let mut opts = VerifyOptions { lambda: lambda_of(a.lambda, &l), one_sided: a.one_sided, weak: a.weak, ..Default::default() };
            if let Some(t) = a.rel_tol {
                opts.rel_tol = t;
            }
            let verdict = verify_with(&l.space, &u, &g, eps_of(a.eps, &l)?, &opts)?;
            Ok(Outcome::value(value(&verdict)?))
        }
        GradientCmd::Min(a) | GradientCmd::Weak(a) => {
            let weak = matches!(cmd, GradientCmd::Weak(_));
            let l = inputs.space(&a.input)?;
            let u = inputs.function(a.u.as_deref(), &l)?;
            let (eps, p, lambda) = (eps_of(a.eps, &l)?, p_of(a.p, &l), lambda_of(a.lambda, &l));
            let opts = GradientOptions { one_sided: a.one_sided, solver: solver(global) };
            let r = if weak {
                minimal_weak_gradient(&l.space, &u, eps, p, lambda, &opts)?
            } else {
                minimal_gradient(&l.space, &u, eps, p, lambda, &opts)?
            };
            let g = ScalarField::gradient(r.field.clone())?;
            let vopts = VerifyOptions { lambda, one_sided: a.one_sided, weak, rel_tol: opts.solver.tol_feas.max(1e-9) };
            let verdict = verify_with(&l.space, &u, &g, eps, &vopts)?;
            Ok(Outcome::value(gradient_report(&r, value(&verdict.violations)?)?))
        }
        GradientCmd::Ladder(a) => {
            let l = inputs.space(&a.input)?;
            let u = inputs.function(a.u.as_deref(), &l)?;
            let opts = GradientOptions { one_sided: a.one_sided, solver: solver(global) };
            let rungs = energy_ladder(&l.space, &u, &a.eps_list, p_of(a.p, &l), lambda_of(a.lambda, &l), &opts)?;
            let table = Table { header: vec!["eps", "objective"], rows: rungs.iter().map(|r| vec![r.eps, r.objective]).collect() };
            Ok(Outcome { result: json!({ "rungs": value(&rungs)? }), table: Some(table) })
        }
        GradientCmd::Consistency(a) => {
            let l = inputs.space(&a.input)?;
            let u = inputs.function(a.u.as_deref(), &l)?;
            let g = inputs.field(&a.g, &l, FieldRole::Gradient)?;
            let mut opts = ConsistencyOptions { seed: global.seed.unwrap_or(0), ..Default::default() };
            if let Some(k) = a.exhaustive_limit {
                opts.exhaustive_limit = k;
            }
            if let Some(w) = a.walks {
                opts.walks = w;
            }
            let r = check_curve_consistency(&l.space, &u, &g, eps_of(a.eps, &l)?, &opts)?;
            Ok(Outcome::value(value(&r)?))
        }
    }
}

fn modulus_options(global: &Global, max_rounds: Option<usize>, sep_tol: Option<f64>) -> ModulusOptions {
    let mut o = ModulusOptions { solver: solver(global), ..Default::default() };
    if let Some(r) = max_rounds {
        o.max_rounds = r;
    }
    if let Some(t) = sep_tol {
        o.sep_tol = t;
    }
    o
}

fn modulus(a: &ModulusArgs, global: &Global, inputs: &mut Inputs) -> CliResult<Outcome> {
    let l = inputs.space(&a.input)?;
    let space = &l.space;
    let family = inputs.family(&a.family, space)?;
    let weights = measure(a.measure.as_deref(), space)?;
    let fclass = class(a.class.as_deref(), space)?;
    let (eps, p, lambda) = (eps_of(a.eps, &l)?, p_of(a.p, &l), lambda_of(a.lambda, &l));
    let opts = modulus_options(global, a.max_rounds, a.sep_tol);
    let r = chain_modulus(space, &family, eps, p, &weights, &fclass, lambda, &opts)?;
    let mut v = value(&r)?;
    if let Value::Object(m) = &mut v {
        if let Some(f) = m.remove("field") {
            m.insert("rho".into(), f);
        }
        if a.exceptional {
            m.insert("exceptional".into(), value(&is_weak_exceptional(space, &family, eps, p, lambda, &opts)?)?);
        }
    }
    Ok(Outcome::value(v))
}

fn keith(a: &KeithArgs, global: &Global, inputs: &mut Inputs) -> CliResult<Outcome> {
    let l = inputs.space(&a.input)?;
    let space = &l.space;
    let (x, y) = (id(space, &a.x)?, id(space, &a.y)?);
    // Densities finite at the poles unless another class is asked for.
    let fclass = match a.class.as_deref() {
        None => FunctionClass::FiniteAt { x, y },
        c => class(c, space)?,
    };
    let opts = modulus_options(global, None, None);
    let rungs = keith_modulus_ladder(
        space,
        x,
        y,
        a.l.unwrap_or(2.0),
        p_of(a.p, &l),
        &a.eps_list,
        &fclass,
        lambda_of(a.lambda, &l),
        &opts,
    )?;
    let table = Table {
        header: vec!["eps", "modulus", "scaled"],
        rows: rungs.iter().map(|r| vec![r.eps, r.modulus, r.scaled]).collect(),
    };
    Ok(Outcome { result: json!({ "x": x, "y": y, "rungs": value(&rungs)? }), table: Some(table) })
}

fn poincare(cmd: &PoincareCmd, global: &Global, inputs: &mut Inputs) -> CliResult<Outcome> {
    match cmd {
        PoincareCmd::Riesz(a) => {
            let l = inputs.space(&a.input)?;
            let (x, y) = (id(&l.space, &a.x)?, id(&l.space, &a.y)?);
            let rw = riesz_weights(&l.space, x, y, a.l.unwrap_or(2.0))?;
            let table = Table {
                header: vec!["point", "weight"],
                rows: rw.weights.iter().enumerate().map(|(i, &w)| vec![i as f64, w]).collect(),
            };
            Ok(Outcome { result: value(&rw)?, table: Some(table) })
        }
        PoincareCmd::Ball(a) => {
            let l = inputs.space(&a.input)?;
            let u = inputs.function(a.u.as_deref(), &l)?;
            let g = inputs.field(&a.g, &l, FieldRole::Gradient)?;
            let radii = if a.radii.is_empty() { audit_radii(&l.space) } else { a.radii.clone() };
            let audit = ball_pi_audit(&l.space, u.values(), g.values(), p_of(a.p, &l), a.dilation.unwrap_or(1.0), Some(&radii))?;
            let table = Table {
                header: vec!["center", "r", "lhs", "rhs"],
                rows: audit.cases.iter().map(|c| vec![c.center as f64, c.radius, c.lhs, c.rhs]).collect(),
            };
            Ok(Outcome { result: value(&audit)?, table: Some(table) })
        }
        PoincareCmd::Pointwise(a) => {
            let l = inputs.space(&a.input)?;
            let (x, y) = (id(&l.space, &a.x)?, id(&l.space, &a.y)?);
            let g = inputs.field(&a.g, &l, FieldRole::Gradient)?;
            let r = pointwise_pi_check(
                &l.space,
                x,
                y,
                g.values(),
                p_of(a.p, &l),
                a.c.unwrap_or(1.0),
                a.l.unwrap_or(2.0),
                lambda_of(a.lambda, &l),
                a.eps,
                global.time_budget_ms,
            )?;
            Ok(Outcome::value(value(&r)?))
        }
        PoincareCmd::Width(a) => {
            let l = inputs.space(&a.input)?;
            let (x, y) = (id(&l.space, &a.x)?, id(&l.space, &a.y)?);
            let set = ids(&l.space, &a.set)?;
            let w = chain_width(&l.space, x, y, &set, eps_of(a.eps, &l)?)?;
            Ok(Outcome::value(json!({ "x": x, "y": y, "set": set, "width": w })))
        }
        PoincareCmd::Minkowski(a) => {
            let l = inputs.space(&a.input)?;
            let set = ids(&l.space, &a.set)?;
            let mu = measure(a.measure.as_deref(), &l.space)?;
            let radii = if a.radii.is_empty() { l.space.distinct_distances() } else { a.radii.clone() };
            let prof = minkowski_profile(&l.space, &set, &mu, &radii)?;
            let table = Table { header: vec!["r", "value"], rows: prof.entries.iter().map(|&(r, v)| vec![r, v]).collect() };
            Ok(Outcome { result: value(&prof)?, table: Some(table) })
        }
        PoincareCmd::Bmc(a) => {
            let l = inputs.space(&a.input)?;
            let (x, y) = (id(&l.space, &a.x)?, id(&l.space, &a.y)?);
            let cands = a.candidates.iter().map(|c| ids(&l.space, c)).collect::<CliResult<Vec<_>>>()?;
            let radii = (!a.radii.is_empty()).then_some(a.radii.as_slice());
            let audit = bmc_audit(&l.space, x, y, a.l.unwrap_or(2.0), &cands, eps_of(a.eps, &l)?, radii)?;
            let mut rows = Vec::new();
            for (k, c) in audit.candidates.iter().enumerate() {
                for s in &c.shells {
                    rows.push(vec![k as f64, s.r, s.shell_measure, s.profile, s.width]);
                }
            }
            let table = Table { header: vec!["candidate", "r", "shell_measure", "profile", "width"], rows };
            Ok(Outcome { result: value(&audit)?, table: Some(table) })
        }
    }
}

fn potential(a: &PotentialArgs, inputs: &mut Inputs) -> CliResult<Outcome> {
    let l = inputs.space(&a.input)?;
    let g = inputs.field(&a.g, &l, FieldRole::Gradient)?;
    let spec = PotentialSpec {
        seeds: ids(&l.space, &a.seeds)?,
        values: a.ua.clone(),
        g: g.into_values(),
        eps: eps_of(a.eps, &l)?,
        lambda: lambda_of(a.lambda, &l),
        cap: a.cap,
    };
    let pot = chain_potential(&l.space, &spec)?;
    let check = potential_gradient_check(&l.space, &spec, 1e-12)?;
    Ok(Outcome::value(json!({ "potential": value(&pot)?, "gradient_check": value(&check)? })))
}

fn leibniz(a: &LeibnizArgs, inputs: &mut Inputs) -> CliResult<Outcome> {
    let l = inputs.space(&a.input)?;
    let u = inputs.function(a.u.as_deref(), &l)?;
    let g = inputs.field(&a.g, &l, FieldRole::Gradient)?;
    let phi = inputs.field(&a.phi, &l, FieldRole::Function)?;
    let eps = eps_of(a.eps, &l)?;
    let out = leibniz_gradient(&l.space, &u, &g, &phi, eps)?;
    let prod: Vec<f64> = u.values().iter().zip(phi.values()).map(|(a, b)| a * b).collect();
    let check = verify_upper_gradient(&l.space, &ScalarField::function(prod)?, &out, eps, 0.5)?;
    Ok(Outcome::value(json!({ "g": value(&out)?["values"], "product_check": value(&check)? })))
}

/// Closure over an expression in one variable; the first evaluation error is kept.
struct Scalar {
    expr: RefCell<Expr>,
    var: &'static str,
    error: RefCell<Option<CliError>>,
}

impl Scalar {
    fn new(src: &str, var: &'static str) -> CliResult<Self> {
        Ok(Scalar { expr: RefCell::new(Expr::parse(src)?), var, error: RefCell::new(None) })
    }

    fn call(&self, x: f64) -> f64 {
        let vars: [(&str, f64); 2] = [(self.var, x), ("x0", x)];
        match self.expr.borrow_mut().eval(&vars) {
            Ok(v) => v,
            Err(e) => {
                self.error.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    }

    fn check(&self) -> CliResult<()> {
        match self.error.borrow_mut().take() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

fn eb(a: &EbArgs) -> CliResult<Outcome> {
    if a.family != "grid:1d" {
        return Err(CliError::ConfigParse(format!("unsupported family {:?} (only grid:1d)", a.family)));
    }
    let seeds = match a.seeds.as_deref() {
        None | Some("all") => SeedRule::All,
        Some("endpoints") => SeedRule::Endpoints,
        Some(s) => return Err(CliError::ConfigParse(format!("unknown seed rule {s:?}"))),
    };
    let d = EbOptions::default();
    let opts = EbOptions {
        p: a.p.unwrap_or(d.p),
        eps_factor: a.eps_factor.unwrap_or(d.eps_factor),
        lambda: a.lambda.unwrap_or(d.lambda),
        seeds,
    };
    let (u, g) = (Scalar::new(&a.u, "x")?, Scalar::new(&a.g, "x")?);
    let report = eb_pipeline(&a.n, &|x| u.call(x), &|x| g.call(x), &opts);
    u.check()?;
    g.check()?;
    let report = report?;
    let table = Table {
        header: vec!["n", "eps", "u_error", "g_error", "max_error"],
        rows: report.rungs.iter().map(|r| vec![r.n as f64, r.eps, r.u_error, r.g_error, r.max_error]).collect(),
    };
    Ok(Outcome { result: value(&report)?, table: Some(table) })
}

fn riemann(a: &RiemannArgs, global: &Global) -> CliResult<Outcome> {
    let f = Scalar::new(&a.f, "s")?;
    let ts = if a.t.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(global.seed.unwrap_or(0));
        (0..a.samples.unwrap_or(10)).map(|_| rng.gen_range(0.0..=1.0)).collect()
    } else {
        a.t.clone()
    };
    let (ell, lambda) = (a.ell.unwrap_or(1.0), a.lambda.unwrap_or(0.5));
    let mut rows = Vec::with_capacity(ts.len());
    let mut sums = Vec::with_capacity(ts.len());
    for &t in &ts {
        let s = riemann_sum(|x| f.call(x), ell, t, a.n, lambda);
        f.check()?;
        let s = s?;
        sums.push(json!({ "t": t, "sum": s, "error": a.exact.map(|e| (s - e).abs()) }));
        rows.push(vec![t, s]);
    }
    let mean_error = a.exact.map(|e| rows.iter().map(|r| (r[1] - e).abs()).sum::<f64>() / rows.len().max(1) as f64);
    let table = Table { header: vec!["t", "sum"], rows };
    Ok(Outcome { result: json!({ "sums": sums, "mean_error": mean_error }), table: Some(table) })
}

fn list_fixtures(a: &FixturesArgs) -> CliResult<Outcome> {
    let all = fixtures();
    if let Some(dir) = &a.write {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
        for f in &all {
            let space = f.space().map_err(CliError::Input)?;
            write_file(&dir.join(format!("{}.json", f.name)), &to_json(&SpaceDocument::from_space(&space))?)?;
            write_file(&dir.join(format!("{}.manifest.json", f.name)), &to_json(f)?)?;
        }
    }
    Ok(Outcome::value(json!({ "fixtures": value(&all)? })))
}

