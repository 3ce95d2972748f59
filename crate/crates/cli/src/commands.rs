//! Subcommand bodies. Each returns whether its checks passed; errors carry the
//! exit-code class.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use nlskdv::exact::{self, Bisection, GapModel, ProfileMoments};
use nlskdv::nehari;
use nlskdv::rearrange;
use nlskdv::solvers::{self, LambdaConfig, MountainPassReport, SolveReport};
use nlskdv::{Error, Field, Model, ModelParams, Order, RadialGrid, StatePair};

use crate::config::{CliError, InitKind, RunConfig, SweepAxis};
use crate::output::{self, Cell, Component, Table};

pub const SWEEP_HEADER: [&str; 8] = [
    "param",
    "J_ground",
    "J_v2",
    "J_mp",
    "Lambda",
    "classification",
    "grad_norm",
    "iters",
];

fn describe(cfg: &RunConfig, p: &ModelParams, grid: &RadialGrid) -> Vec<String> {
    vec![
        format!(
            "order={} dim={} lambda1={:.16e} lambda2={:.16e} beta={:.16e}",
            2 * p.order.m(),
            p.dimension,
            p.lambda1,
            p.lambda2,
            p.beta
        ),
        format!(
            "radius={:.16e} points={} tol={:.16e} seed={}",
            grid.radius(),
            grid.len(),
            cfg.tol,
            cfg.seed
        ),
    ]
}

fn components(grid: &RadialGrid, s: &StatePair) -> Vec<Component> {
    let nodes = grid.nodes().to_vec();
    vec![
        Component {
            name: "u".into(),
            nodes: nodes.clone(),
            values: s.u.values().to_vec(),
        },
        Component {
            name: "v".into(),
            nodes,
            values: s.v.values().to_vec(),
        },
    ]
}

/// Smooth random bumps with a zero boundary, drawn from `rng`.
fn random_bumps(grid: &RadialGrid, rng: &mut ChaCha8Rng, amplitude: f64) -> Field {
    let r = grid.radius();
    let spec: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                amplitude * rng.gen_range(0.2..1.0),
                rng.gen_range(-0.1..0.1) * r,
                rng.gen_range(0.02..0.1) * r,
            )
        })
        .collect();
    grid.sample_dirichlet(|x| spec.iter().map(|(a, c, w)| a * (-((x - c) / w).powi(2)).exp()).sum())
}

fn initial_state(kind: InitKind, grid: &RadialGrid, v2: &Field, rng: &mut ChaCha8Rng) -> StatePair {
    let peak = v2.max_abs();
    match kind {
        InitKind::Diagonal => StatePair::new(v2.clone(), v2.clone()),
        InitKind::NearV2 => StatePair::new(random_bumps(grid, rng, 1e-4 * peak), v2.clone()),
        InitKind::Random => StatePair::new(random_bumps(grid, rng, peak), random_bumps(grid, rng, peak)),
    }
}

/// Everything computed at one parameter point.
struct Point {
    grid: RadialGrid,
    params: ModelParams,
}

impl Point {
    fn new(cfg: &RunConfig, params: ModelParams) -> Result<Self, CliError> {
        let grid = cfg.grid_for(&params)?;
        Ok(Self { grid, params })
    }

    fn model(&self) -> Result<Model<'_>, CliError> {
        Ok(Model::new(&self.grid, self.params)?)
    }
}

fn semi_trivial(m: &Model<'_>, cfg: &RunConfig) -> Result<(Field, f64), CliError> {
    let v2 = solvers::semi_trivial_profile(m, &cfg.solver())?;
    let j = m.energy(&StatePair::new(Field::zeros(m.grid()), v2.clone()));
    Ok((v2, j))
}

fn lambda_of(m: &Model<'_>, v2: &Field) -> Result<f64, CliError> {
    Ok(solvers::compute_lambda(m, v2, &LambdaConfig::default())?.value)
}

fn ground(m: &Model<'_>, v2: &Field, cfg: &RunConfig, seed: u64) -> Result<SolveReport, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let init = initial_state(cfg.init, m.grid(), v2, &mut rng);
    Ok(solvers::solve_ground(m, &init, &cfg.solver())?)
}

fn mountain_pass(m: &Model<'_>, v2: &Field, ground: &StatePair, cfg: &RunConfig) -> Result<MountainPassReport, CliError> {
    let end_a = StatePair::new(Field::zeros(m.grid()), v2.clone());
    Ok(solvers::solve_mountain_pass(m, &end_a, ground, &cfg.solver())?)
}

pub fn verify(cfg: &RunConfig) -> Result<bool, CliError> {
    let (l1, l2, beta) = (cfg.lambda1, cfg.lambda2, cfg.beta);
    let radius = cfg.radius_for(l1, l2);
    let g = RadialGrid::new(1, Order::Laplacian, radius, cfg.points).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut table = Table::new(&["check", "expected", "got", "tol", "pass"]);
    let mut all = true;
    let mut row = |name: &str, expected: f64, got: f64, tol: f64| {
        let pass = (got - expected).abs() <= tol;
        all &= pass;
        table.push(vec![name.into(), expected.into(), got.into(), tol.into(), pass.into()]);
    };

    for (p, exact_value) in [(4, 4.0 / 3.0), (6, 16.0 / 15.0), (8, 32.0 / 35.0)] {
        let f = g.sample(|x| x.cosh().powi(-p));
        row(&format!("cosh{p}"), exact_value, g.integrate(&f), 1e-8);
    }

    let h = g.spacing();
    let scale = l1.max(l2).max(1.0);
    let res_tol = 2.0 * h * h * scale * scale;
    let v2 = exact::v2_field(&g, l2);
    let semi = StatePair::new(Field::zeros(&g), v2.clone());
    let m = Model::new(&g, ModelParams::new(Order::Laplacian, 1, l1, l2, beta).map_err(|e| CliError::Usage(e.to_string()))?)?;
    row("residual_v2", 0.0, m.strong_residual(&semi).max(), res_tol);
    let m0 = m.with_beta(0.0);
    let pair = StatePair::new(exact::u1_field(&g, l1), v2.clone());
    row("residual_u1_v2", 0.0, m0.strong_residual(&pair).max(), res_tol);

    let t = exact::diag_nehari_t(l1, l2, beta)?;
    let got = nehari::project(&m, &StatePair::new(v2.clone(), v2.clone()))?.scaling;
    row("diagonal_scaling", t, got, 1e-4);

    let j_v2 = 4.8 * l2.powf(2.5);
    row("energy_v2", j_v2, m.energy(&semi), 1e-4 * j_v2);

    let a = l1 / l2;
    let lam = lambda_of(&m, &v2)?;
    row("lambda", (2.0 * a + a.sqrt()) / 6.0, lam, 1e-3);

    output::emit(&table.render(cfg.json), cfg.out.as_deref())?;
    Ok(all)
}

pub fn ground_cmd(cfg: &RunConfig) -> Result<bool, CliError> {
    let point = Point::new(cfg, cfg.params().map_err(|e| CliError::Usage(e.to_string()))?)?;
    let m = point.model()?;
    let (v2, j_v2) = semi_trivial(&m, cfg)?;
    let lam = lambda_of(&m, &v2)?;
    let r = ground(&m, &v2, cfg, cfg.seed)?;
    if let Some(out) = &cfg.out {
        let mut header = describe(cfg, &point.params, &point.grid);
        header.push(format!("ground energy={:.16e} grad_norm={:.16e}", r.energy, r.grad_norm));
        output::emit(&output::format_profile(&header, &components(&point.grid, &r.state)), Some(out))?;
    }
    let mut table = Table::new(&[
        "beta",
        "lambda1",
        "lambda2",
        "J",
        "J_v2",
        "Lambda",
        "semi_trivial",
        "grad_norm",
        "iters",
    ]);
    let p = &point.params;
    table.push(vec![
        p.beta.into(),
        p.lambda1.into(),
        p.lambda2.into(),
        r.energy.into(),
        j_v2.into(),
        lam.into(),
        r.semi_trivial.into(),
        r.grad_norm.into(),
        r.iterations.into(),
    ]);
    output::emit(&table.render(cfg.json), None)?;
    Ok(true)
}

pub fn mountain_pass_cmd(cfg: &RunConfig) -> Result<bool, CliError> {
    let point = Point::new(cfg, cfg.params().map_err(|e| CliError::Usage(e.to_string()))?)?;
    let m = point.model()?;
    let (v2, j_v2) = semi_trivial(&m, cfg)?;
    let g = ground(&m, &v2, cfg, cfg.seed)?;
    let mp = mountain_pass(&m, &v2, &g.state, cfg)?;
    let r = &mp.report;
    if let Some(out) = &cfg.out {
        let mut header = describe(cfg, &point.params, &point.grid);
        header.push(format!("mountain-pass energy={:.16e} grad_norm={:.16e}", r.energy, r.grad_norm));
        output::emit(&output::format_profile(&header, &components(&point.grid, &r.state)), Some(out))?;
    }
    let mut table = Table::new(&["J_mp", "J_v2", "J_ground", "path_max", "grad_norm", "iters"]);
    let path_max = mp.path_max.last().copied().unwrap_or(f64::NAN);
    table.push(vec![
        r.energy.into(),
        j_v2.into(),
        g.energy.into(),
        path_max.into(),
        r.grad_norm.into(),
        r.iterations.into(),
    ]);
    output::emit(&table.render(cfg.json), None)?;
    Ok(true)
}

pub fn lambda_cmd(cfg: &RunConfig) -> Result<bool, CliError> {
    let point = Point::new(cfg, cfg.params().map_err(|e| CliError::Usage(e.to_string()))?)?;
    let m = point.model()?;
    let (v2, _) = semi_trivial(&m, cfg)?;
    let r = solvers::compute_lambda(&m, &v2, &LambdaConfig::default())?;
    let mut table = Table::new(&["quantity", "value", "iterations"]);
    table.push(vec!["Lambda".into(), r.value.into(), r.iterations.into()]);
    output::emit(&table.render(cfg.json), cfg.out.as_deref())?;
    Ok(true)
}

pub fn threshold_cmd(cfg: &RunConfig) -> Result<bool, CliError> {
    let p = cfg.params().map_err(|e| CliError::Usage(e.to_string()))?;
    let gap = match (p.order, p.dimension) {
        (Order::Laplacian, 1) => GapModel::SecondOrder,
        (Order::Bilaplacian, dim) => {
            let radius = cfg.radius.unwrap_or(40.0);
            let base = exact::base_profile(dim, radius, cfg.points)?;
            let grid = RadialGrid::new(dim, Order::Bilaplacian, radius, cfg.points)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let v = base.rescaled_on(&grid, 1.0);
            GapModel::FourthOrder(ProfileMoments::of(&grid, &v))
        }
        (Order::Laplacian, dim) => {
            return Err(CliError::Solver(Error::InvalidParams(format!(
                "the second-order threshold is closed-form only on the line, got dim={dim}"
            ))))
        }
    };
    let th = exact::lambda2_threshold(p.lambda1, p.beta, gap, Bisection::default())?;
    let mut table = Table::new(&["quantity", "value", "lo", "hi", "gap_lo", "gap_hi"]);
    table.push(vec![
        "Lambda2".into(),
        th.value.into(),
        th.lo.into(),
        th.hi.into(),
        th.gap_lo.into(),
        th.gap_hi.into(),
    ]);
    output::emit(&table.render(cfg.json), cfg.out.as_deref())?;
    Ok(true)
}

/// Rebuilds the grid a stored profile was sampled on.
fn grid_of(dim: usize, nodes: &[f64]) -> Result<RadialGrid, CliError> {
    let radius = nodes.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let grid = RadialGrid::new(dim, Order::Laplacian, radius, nodes.len())
        .map_err(|e| CliError::Usage(format!("profile does not describe a grid: {e}")))?;
    let off = grid.nodes().iter().zip(nodes).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
    if off > 1e-9 * radius {
        return Err(CliError::Usage(format!(
            "profile nodes are not a uniform dim={dim} grid (off by {off:e})"
        )));
    }
    Ok(grid)
}

pub fn symmetrize_cmd(cfg: &RunConfig) -> Result<bool, CliError> {
    let input = cfg
        .input
        .as_deref()
        .ok_or_else(|| CliError::Usage("symmetrize needs --input PATH".into()))?;
    let comps = read_profile(input)?;
    let idx = match &cfg.component {
        Some(name) => comps
            .iter()
            .position(|c| &c.name == name)
            .ok_or_else(|| CliError::Usage(format!("no component {name:?} in {}", input.display())))?,
        None => 0,
    };
    let c = &comps[idx];
    let grid = grid_of(cfg.dimension, &c.nodes)?;
    let f = Field::from_values(c.values.clone());
    let fs = rearrange::symmetrize(&grid, &f)?;
    // Hardy–Littlewood pairs the component with the other one when present.
    let partner = comps
        .iter()
        .enumerate()
        .find(|(i, o)| *i != idx && o.nodes.len() == c.nodes.len())
        .map(|(_, o)| Field::from_values(o.values.clone()))
        .unwrap_or_else(|| f.clone());
    let (hl_lhs, hl_rhs) = rearrange::check_hardy_littlewood(&grid, &f, &partner)?;
    let (ps_lhs, ps_rhs) = rearrange::check_polya_szego(&grid, &f)?;
    let l2_gap = rearrange::check_equimeasurable(&grid, &f, &fs, 2.0);

    if let Some(out) = &cfg.out {
        let header = vec![format!("symmetrized {} from {}", c.name, input.display())];
        let sym = Component {
            name: c.name.clone(),
            nodes: grid.nodes().to_vec(),
            values: fs.values().to_vec(),
        };
        output::emit(&output::format_profile(&header, &[sym]), Some(out))?;
    }
    let mut table = Table::new(&[
        "component",
        "equimeasurable_l2",
        "HL_lhs",
        "HL_rhs",
        "HL_slack",
        "PS_lhs",
        "PS_rhs",
        "PS_slack",
    ]);
    table.push(vec![
        c.name.as_str().into(),
        l2_gap.into(),
        hl_lhs.into(),
        hl_rhs.into(),
        (hl_rhs - hl_lhs).into(),
        ps_lhs.into(),
        ps_rhs.into(),
        (ps_lhs - ps_rhs).into(),
    ]);
    output::emit(&table.render(cfg.json), None)?;
    Ok(true)
}

fn read_profile(path: &Path) -> Result<Vec<Component>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read profile {}: {e}", path.display())))?;
    output::parse_profile(&text)
}

/// One sweep row: ground, semi-trivial level, mountain pass where `v₂` is a
/// local minimum below which a lower ground state exists.
fn sweep_row(cfg: &RunConfig, params: ModelParams, seed: u64) -> Result<Vec<Cell>, CliError> {
    let point = Point::new(cfg, params)?;
    let m = point.model()?;
    let (v2, j_v2) = semi_trivial(&m, cfg)?;
    let lam = lambda_of(&m, &v2)?;
    let class = match nehari::classify_with_profile(&m, v2.clone(), 1e-8) {
        Ok(c) => c.class.as_str().to_string(),
        Err(Error::Indeterminate { .. }) => "indeterminate".to_string(),
        Err(e) => return Err(e.into()),
    };
    let g = ground(&m, &v2, cfg, seed)?;
    let coupled_below = !g.semi_trivial && g.energy < j_v2;
    let j_mp = if class == "strict_local_min" && coupled_below {
        mountain_pass(&m, &v2, &g.state, cfg).ok().map(|mp| mp.report.energy)
    } else {
        None
    };
    Ok(vec![
        Cell::Empty,
        g.energy.into(),
        j_v2.into(),
        j_mp.into(),
        lam.into(),
        class.into(),
        g.grad_norm.into(),
        g.iterations.into(),
    ])
}

/// Returns the table and the number of rows that succeeded.
pub fn sweep_table(cfg: &RunConfig) -> Result<(Table, usize), CliError> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Usage("sweep needs --sweep-axis, --sweep-from, --sweep-to, --sweep-steps".into()))?;
    if sweep.steps == 0 {
        return Err(CliError::Usage("sweep has no points".into()));
    }
    let base = cfg.params().map_err(|e| CliError::Usage(e.to_string()))?;
    let values = sweep.values();
    let mut points = Vec::with_capacity(values.len());
    for &x in &values {
        let p = match sweep.axis {
            SweepAxis::Beta => base.with_beta(x),
            SweepAxis::Lambda2 => base.with_lambda2(x),
        };
        p.validate().map_err(|e| CliError::Usage(format!("sweep point {x}: {e}")))?;
        points.push(p);
    }
    let rows: Vec<Result<Vec<Cell>, CliError>> = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| sweep_row(cfg, *p, cfg.seed.wrapping_add(i as u64)))
        .collect();
    let mut table = Table::new(&SWEEP_HEADER);
    let mut ok = 0;
    for (x, row) in values.iter().zip(rows) {
        let mut cells = match row {
            Ok(cells) => {
                ok += 1;
                cells
            }
            Err(e) => {
                let mut cells = vec![Cell::Empty; SWEEP_HEADER.len()];
                cells[5] = format!("error: {e}").into();
                cells
            }
        };
        cells[0] = (*x).into();
        table.push(cells);
    }
    Ok((table, ok))
}

pub fn sweep_cmd(cfg: &RunConfig) -> Result<bool, CliError> {
    let (table, ok) = sweep_table(cfg)?;
    output::emit(&table.render(cfg.json), cfg.out.as_deref())?;
    if ok == 0 {
        return Err(CliError::Solver(Error::InvalidParams("every sweep point failed".into())));
    }
    Ok(true)
}
