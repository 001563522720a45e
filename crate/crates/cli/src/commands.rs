//! One function per subcommand. Each returns JSON result items in grid
//! order, an optional flat table for `--csv`, and the violated invariants.

use clap::ValueEnum;
use qbs_core::ito::{
    default_steps, evolve_superoperator, expectation, flow_coefficients, power_rule_suite,
    qsd_power_closed_form, qsd_power_iterated, semigroup_evolve, UnitVector,
};
use qbs_core::operator::{spectral_decompose, ComplexMatrix, HermitianMatrix};
use qbs_core::pricing::{
    classical_bs, hedge_portfolio, log_moneyness, price, replication_simulation, residual_eq8,
    spectral_payoff, terminal_limit_check_with_gap, terminal_payoff, Payoff, PayoffConvention,
    ReplicationConfig,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{hermitian, RawMatrix, Validated};
use crate::error::{compute, CliError};
use crate::report::{fmt_float, Table};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Coeffs,
    ItoCheck,
    Price,
    Residual,
    TerminalCheck,
    Hedge,
    Classical,
    Lindblad,
    Replicate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Coeffs => "coeffs",
            Command::ItoCheck => "ito-check",
            Command::Price => "price",
            Command::Residual => "residual",
            Command::TerminalCheck => "terminal-check",
            Command::Hedge => "hedge",
            Command::Classical => "classical",
            Command::Lindblad => "lindblad",
            Command::Replicate => "replicate",
        }
    }

    pub fn is_stochastic(self) -> bool {
        matches!(self, Command::ItoCheck | Command::Replicate)
    }
}

pub struct RunContext<'a> {
    pub config: &'a Validated,
    pub seed: Option<u64>,
    pub tolerances: &'a Tolerances,
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub results: Vec<Value>,
    pub table: Option<Table>,
    pub violations: Vec<String>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn opt_float(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

fn state_expectation(
    state: Option<&UnitVector>,
    m: &ComplexMatrix,
) -> Result<Option<f64>, CliError> {
    state
        .map(|u| expectation(u, m).map(|z| z.re))
        .transpose()
        .map_err(compute("state expectation"))
}

fn missing(section: &str, command: Command) -> CliError {
    CliError::Config(format!("{section}: required for {}", command.name()))
}

fn z_points(
    ctx: &RunContext<'_>,
    path: &str,
    raw: Option<&Vec<RawMatrix>>,
) -> Result<Vec<HermitianMatrix>, CliError> {
    match raw {
        Some(zs) => zs
            .iter()
            .enumerate()
            .map(|(i, z)| hermitian(&format!("{path}[{i}]"), z))
            .collect(),
        None => {
            let m = &ctx.config.model;
            Ok(vec![
                log_moneyness(&m.ops.x, &m.strike).map_err(compute("z0 = log X - log K"))?
            ])
        }
    }
}

pub fn run(command: Command, ctx: &RunContext<'_>) -> Result<Outcome, CliError> {
    if command.is_stochastic() && ctx.seed.is_none() {
        return Err(CliError::Config(format!(
            "seed: required for {} (set \"seed\" or pass --seed)",
            command.name()
        )));
    }
    match command {
        Command::Coeffs => coeffs(ctx),
        Command::ItoCheck => ito_check(ctx),
        Command::Price => price_grid(ctx),
        Command::Residual => residual_grid(ctx),
        Command::TerminalCheck => terminal_check(ctx),
        Command::Hedge => hedge(ctx),
        Command::Classical => classical(ctx),
        Command::Lindblad => lindblad(ctx),
        Command::Replicate => replicate(ctx),
    }
}

fn coeffs(ctx: &RunContext<'_>) -> Result<Outcome, CliError> {
    let ops = &ctx.config.model.ops;
    let c = flow_coefficients(&ops.x, ops).map_err(compute("flow coefficients"))?;
    let defect = c.structure_defect();
    let tol = ctx.tolerances.get("coefficient_structure");
    let mut out = Outcome::default();
    if defect > tol {
        out.violations.push(format!(
            "coefficient structure defect {} exceeds {}",
            fmt_float(defect),
            fmt_float(tol)
        ));
    }
    let mut table = Table::new(vec!["coefficient", "row", "col", "re", "im"]);
    for (name, m) in [
        ("alpha", &c.alpha),
        ("alpha_dagger", &c.alpha_dagger),
        ("lambda", &c.lambda),
        ("theta", &c.theta),
    ] {
        for (i, row) in m.to_rows().iter().enumerate() {
            for (j, z) in row.iter().enumerate() {
                table.push(vec![
                    name.to_string(),
                    i.to_string(),
                    j.to_string(),
                    fmt_float(z.re),
                    fmt_float(z.im),
                ]);
            }
        }
    }
    out.results.push(json!({
        "coefficients": to_value(&c),
        "structure_defect": defect,
        "tolerance": tol,
    }));
    out.table = Some(table);
    Ok(out)
}

fn ito_check(ctx: &RunContext<'_>) -> Result<Outcome, CliError> {
    let (dims, k_max, trials) = match &ctx.config.raw.ito {
        Some(i) => (i.dims.clone(), i.k_max, i.trials),
        None => (vec![2, 3, 4], 6, 100),
    };
    let tol = ctx.tolerances.get("ito_power");
    let seed = ctx.seed.expect("checked in run");
    let rep = power_rule_suite(&dims, k_max, trials, seed, tol).map_err(compute("ito"))?;

    let ops = &ctx.config.model.ops;
    let mut own: f64 = 0.0;
    for k in 2..=k_max {
        let closed = qsd_power_closed_form(&ops.x, ops, k).map_err(compute("model power rule"))?;
        let iterated = qsd_power_iterated(&ops.x, ops, k).map_err(compute("model power rule"))?;
        own = own.max(
            closed
                .max_relative_distance(&iterated)
                .map_err(compute("model power rule"))?,
        );
    }

    let mut out = Outcome::default();
    let mut table = Table::new(vec!["dim", "k", "trials", "max_relative_deviation"]);
    for c in &rep.cells {
        table.push(vec![
            c.dim.to_string(),
            c.k.to_string(),
            c.trials.to_string(),
            fmt_float(c.max_relative_deviation),
        ]);
        out.results.push(to_value(c));
        if c.max_relative_deviation > tol {
            out.violations.push(format!(
                "power rule dim {} k {}: deviation {} exceeds {}",
                c.dim,
                c.k,
                fmt_float(c.max_relative_deviation),
                fmt_float(tol)
            ));
        }
    }
    out.results.push(json!({
        "configured_model": { "k_max": k_max, "max_relative_deviation": own },
    }));
    if own > tol {
        out.violations.push(format!(
            "power rule on configured model: deviation {} exceeds {}",
            fmt_float(own),
            fmt_float(tol)
        ));
    }
    out.table = Some(table);
    Ok(out)
}

struct GridPoint {
    t: f64,
    z_index: usize,
}

fn grid_points(
    ctx: &RunContext<'_>,
    command: Command,
) -> Result<(Vec<GridPoint>, Vec<HermitianMatrix>), CliError> {
    let grid = ctx
        .config
        .raw
        .grid
        .as_ref()
        .ok_or_else(|| missing("grid", command))?;
    let zs = z_points(ctx, "grid.z", grid.z.as_ref())?;
    let mut points = Vec::new();
    for &t in &grid.t {
        for z_index in 0..zs.len() {
            points.push(GridPoint { t, z_index });
        }
    }
    Ok((points, zs))
}

fn spectrum_bounds(m: &HermitianMatrix) -> Result<(f64, f64), CliError> {
    let s = spectral_decompose(m).map_err(compute("spectrum"))?;
    Ok((s.min_eigenvalue(), s.max_eigenvalue()))
}

fn price_grid(ctx: &RunContext<'_>) -> Result<Outcome, CliError> {
    let (points, zs) = grid_points(ctx, Command::Price)?;
    let state = ctx.config.state.as_ref();
    let mut out = Outcome::default();
    let mut table = Table::new(vec![
        "t",
        "z_index",
        "omega_trace",
        "omega_min_eigenvalue",
        "omega_max_eigenvalue",
        "omega_expectation",
    ]);
    for p in points {
        let context = format!("price at t = {}, grid.z[{}]", p.t, p.z_index);
        let mut q = price(p.t, &zs[p.z_index], &ctx.config.model).map_err(compute(context))?;
        q.omega_expectation = state_expectation(state, q.omega.matrix())?;
        let (lo, hi) = spectrum_bounds(&q.omega)?;
        table.push(vec![
            fmt_float(p.t),
            p.z_index.to_string(),
            fmt_float(q.omega.matrix().trace().re),
            fmt_float(lo),
            fmt_float(hi),
            opt_float(q.omega_expectation),
        ]);
        let mut item = to_value(&q);
        item["z_index"] = json!(p.z_index);
        out.results.push(item);
    }
    out.table = Some(table);
    Ok(out)
}

fn residual_grid(ctx: &RunContext<'_>) -> Result<Outcome, CliError> {
    let (points, zs) = grid_points(ctx, Command::Residual)?;
    let tol = ctx.tolerances.get("pde_residual");
    let mut out = Outcome::default();
    let mut table = Table::new(vec!["t", "z_index", "residual_norm", "tolerance", "passed"]);
    for p in points {
        let context = format!("residual at t = {}, grid.z[{}]", p.t, p.z_index);
        let rep = residual_eq8(p.t, &zs[p.z_index], &ctx.config.model)
            .map_err(compute(context))?
            .with_tolerance(tol);
        if !rep.passed {
            out.violations.push(format!(
                "residual at t = {}, grid.z[{}]: {} exceeds {}",
                fmt_float(p.t),
                p.z_index,
                fmt_float(rep.residual_norm),
                fmt_float(tol)
            ));
        }
        table.push(vec![
            fmt_float(p.t),
            p.z_index.to_string(),
            fmt_float(rep.residual_norm),
            fmt_float(tol),
            rep.passed.to_string(),
        ]);
        let mut item = to_value(&rep);
        item["t"] = json!(p.t);
        item["z_index"] = json!(p.z_index);
        out.results.push(item);
    }
    out.table = Some(table);
    Ok(out)
}

fn terminal_check(ctx: &RunContext<'_>) -> Result<Outcome, CliError> {
    let (raw_z, t_small, delta) = match &ctx.config.raw.terminal {
        Some(t) => (t.z.as_ref(), t.t_small, t.delta),
        None => (
            None,
            qbs_core::tolerance::TERMINAL_T_SMALL,
            qbs_core::tolerance::TERMINAL_SPECTRAL_GAP,
        ),
    };
    let zs = z_points(ctx, "terminal.z", raw_z)?;
    let model = &ctx.config.model;
    let state = ctx.config.state.as_ref();
    let tol = ctx.tolerances.get("terminal_limit");
    let mut out = Outcome::default();
    let mut table = Table::new(vec![
        "z_index",
        "t_small",
        "gap",
        "tolerance",
        "passed",
        "spectral_payoff_expectation",
        "expectation_convention_payoff",
    ]);
    for (i, z) in zs.iter().enumerate() {
        let context = format!("terminal.z[{i}]");
        let payoff = spectral_payoff(z, &model.strike).map_err(compute(context.clone()))?;
        let scale = spectrum_bounds(&payoff)?.1.abs().max(1.0);
        let rep = terminal_limit_check_with_gap(z, model, t_small, delta)
            .map_err(compute(context.clone()))?
            .with_tolerance(tol * scale);
        let spectral_expectation = state_expectation(state, payoff.matrix())?;
        let expectation_convention = match state {
            Some(u) => match terminal_payoff(z, &model.strike, PayoffConvention::Expectation(u))
                .map_err(compute(context))?
            {
                Payoff::Scalar(v) => Some(v),
                Payoff::Operator(_) => unreachable!("expectation convention is scalar"),
            },
            None => None,
        };
        if !rep.passed {
            out.violations.push(format!(
                "terminal.z[{i}]: gap {} exceeds {}",
                fmt_float(rep.residual_norm),
                fmt_float(rep.tolerance)
            ));
        }
        table.push(vec![
            i.to_string(),
            fmt_float(t_small),
            fmt_float(rep.residual_norm),
            fmt_float(rep.tolerance),
            rep.passed.to_string(),
            opt_float(spectral_expectation),
            opt_float(expectation_convention),
        ]);
        out.results.push(json!({
            "z_index": i,
            "t_small": t_small,
            "delta": delta,
            "limit": to_value(&rep),
            "spectral_payoff": to_value(&payoff),
            "spectral_payoff_expectation": spectral_expectation,
            "expectation_convention_payoff": expectation_convention,
        }));
    }
    out.table = Some(table);
    Ok(out)
}

fn hedge(ctx: &RunContext<'_>) -> Result<Outcome, CliError> {
    let cfg = ctx
        .config
        .raw
        .hedge
        .as_ref()
        .ok_or_else(|| missing("hedge", Command::Hedge))?;
    let model = &ctx.config.model;
    let j_x = match &cfg.j_x {
        Some(raw) => hermitian("hedge.j_x", raw)?,
        None => model.ops.x.clone(),
    };
    let state = ctx.config.state.as_ref();
    let tol = ctx.tolerances.get("hedge_reconstruction");
    let mut out = Outcome::default();
    let mut table = Table::new(vec![
        "t",
        "convention",
        "time_to_maturity",
        "beta_t",
        "reconstruction_defect",
        "a_expectation",
        "b_expectation",
        "value_expectation",
    ]);
    for &t in &cfg.t {
        for conv in cfg.convention.conventions() {
            let pos = hedge_portfolio(t, &j_x, model, conv)
                .map_err(compute(format!("hedge at t = {t}")))?;
            let defect = pos
                .reconstruction_defect(&j_x)
                .map_err(compute("hedge reconstruction"))?;
            if defect > tol {
                out.violations.push(format!(
                    "hedge at t = {}: reconstruction defect {} exceeds {}",
                    fmt_float(t),
                    fmt_float(defect),
                    fmt_float(tol)
                ));
            }
            let a_e = state_expectation(state, pos.a.matrix())?;
            let b_e = state_expectation(state, pos.b.matrix())?;
            let v_e = state_expectation(state, pos.value.matrix())?;
            let mut item = to_value(&pos);
            item["t"] = json!(t);
            item["reconstruction_defect"] = json!(defect);
            item["a_expectation"] = json!(a_e);
            item["b_expectation"] = json!(b_e);
            item["value_expectation"] = json!(v_e);
            table.push(vec![
                fmt_float(t),
                item["convention"].as_str().unwrap_or_default().to_string(),
                fmt_float(pos.time_to_maturity),
                fmt_float(pos.beta_t),
                fmt_float(defect),
                opt_float(a_e),
                opt_float(b_e),
                opt_float(v_e),
            ]);
            out.results.push(item);
        }
    }
    out.table = Some(table);
    Ok(out)
}

fn classical(ctx: &RunContext<'_>) -> Result<Outcome, CliError> {
    let cases = ctx
        .config
        .raw
        .classical
        .as_ref()
        .ok_or_else(|| missing("classical", Command::Classical))?;
    let mut out = Outcome::default();
    let mut table = Table::new(vec!["x", "K", "r", "sigma", "t", "price", "delta"]);
    for (i, c) in cases.iter().enumerate() {
        let q = classical_bs(c.x, c.strike, c.r, c.sigma, c.t)
            .map_err(compute(format!("classical[{i}]")))?;
        table.push(
            [c.x, c.strike, c.r, c.sigma, c.t, q.price, q.delta]
                .iter()
                .map(|&v| fmt_float(v))
                .collect(),
        );
        out.results.push(json!({
            "x": c.x, "K": c.strike, "r": c.r, "sigma": c.sigma, "t": c.t,
            "price": q.price, "delta": q.delta,
        }));
    }
    out.table = Some(table);
    Ok(out)
}

fn lindblad(ctx: &RunContext<'_>) -> Result<Outcome, CliError> {
    let cfg = ctx
        .config
        .raw
        .lindblad
        .as_ref()
        .ok_or_else(|| missing("lindblad", Command::Lindblad))?;
    let ops = &ctx.config.model.ops;
    let x0 = match &cfg.x0 {
        Some(raw) => hermitian("lindblad.x0", raw)?,
        None => ops.x.clone(),
    };
    let state = ctx.config.state.as_ref();
    let tol = ctx.tolerances.get("semigroup_superoperator");
    let mut out = Outcome::default();
    let mut table = Table::new(vec!["t", "steps", "superoperator_deviation", "expectation"]);
    for &t in &cfg.t {
        let steps = cfg.steps.unwrap_or_else(|| default_steps(t));
        let context = format!("lindblad at t = {t}");
        let evolved = semigroup_evolve(&x0, ops, t, steps).map_err(compute(context.clone()))?;
        let exact = evolve_superoperator(&x0, ops, t).map_err(compute(context))?;
        let deviation = evolved
            .matrix()
            .distance(&exact)
            .map_err(compute("lindblad"))?
            / exact.norm_fro().max(1.0);
        if deviation > tol {
            out.violations.push(format!(
                "lindblad at t = {}: RK4 vs superoperator {} exceeds {}",
                fmt_float(t),
                fmt_float(deviation),
                fmt_float(tol)
            ));
        }
        let e = state_expectation(state, evolved.matrix())?;
        table.push(vec![
            fmt_float(t),
            steps.to_string(),
            fmt_float(deviation),
            opt_float(e),
        ]);
        out.results.push(json!({
            "t": t,
            "steps": steps,
            "evolved": to_value(&evolved),
            "superoperator_deviation": deviation,
            "expectation": e,
        }));
    }
    out.table = Some(table);
    Ok(out)
}

fn scalar_entry(m: &HermitianMatrix) -> Option<f64> {
    (m.dim() == 1).then(|| m.matrix().get(0, 0).re)
}

fn replicate(ctx: &RunContext<'_>) -> Result<Outcome, CliError> {
    let cfg = ctx
        .config
        .raw
        .replicate
        .as_ref()
        .ok_or_else(|| missing("replicate", Command::Replicate))?;
    let model = &ctx.config.model;
    let x0 = cfg
        .x0
        .or_else(|| scalar_entry(&model.ops.x))
        .ok_or_else(|| {
            CliError::Config("replicate.x0: required when the model is not scalar".into())
        })?;
    let strike = cfg
        .strike
        .or_else(|| scalar_entry(&model.strike))
        .ok_or_else(|| {
            CliError::Config("replicate.strike: required when the model is not scalar".into())
        })?;
    let rc = ReplicationConfig {
        x0,
        strike,
        rate: model.rate,
        maturity: model.maturity,
        volatility: cfg.volatility,
        steps: cfg.steps,
        paths: cfg.paths,
        seed: ctx.seed.expect("checked in run"),
    };
    let stats = replication_simulation(&rc).map_err(|source| CliError::Field {
        path: "replicate".into(),
        source,
    })?;
    let tol = ctx.tolerances.get("replication_mean_abs") * x0;
    let mut out = Outcome::default();
    if stats.mean_abs_error > tol {
        out.violations.push(format!(
            "replication mean |error| {} exceeds {}",
            fmt_float(stats.mean_abs_error),
            fmt_float(tol)
        ));
    }
    let mut table = Table::new(vec![
        "paths",
        "steps",
        "initial_price",
        "mean_payoff",
        "mean_error",
        "std_error",
        "mean_abs_error",
        "max_abs_error",
    ]);
    table.push(vec![
        stats.paths.to_string(),
        stats.steps.to_string(),
        fmt_float(stats.initial_price),
        fmt_float(stats.mean_payoff),
        fmt_float(stats.mean_error),
        fmt_float(stats.std_error),
        fmt_float(stats.mean_abs_error),
        fmt_float(stats.max_abs_error),
    ]);
    let mut item = to_value(&stats);
    item["parameters"] = to_value(&rc);
    item["tolerance"] = json!(tol);
    out.results.push(item);
    out.table = Some(table);
    Ok(out)
}
