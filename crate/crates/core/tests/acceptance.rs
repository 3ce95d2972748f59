//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nlskdv::exact::{self, Bisection, GapModel, ProfileMoments};
use nlskdv::nehari::{self, V2Class};
use nlskdv::rearrange;
use nlskdv::solvers::{self, lambda::LambdaConfig, SolverConfig};
use nlskdv::{Error, Field, Model, ModelParams, Order, RadialGrid, StatePair};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{order, random_non_negative, random_pair};

type Outcome = Result<String, String>;

const R: f64 = 40.0;
const N: usize = 4001;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn line(order: Order, radius: f64, points: usize) -> RadialGrid {
    RadialGrid::new(1, order, radius, points).unwrap()
}

fn model<'g>(g: &'g RadialGrid, l1: f64, l2: f64, beta: f64) -> Model<'g> {
    let p = ModelParams::new(g.order(), g.dimension(), l1, l2, beta).unwrap();
    Model::new(g, p).unwrap()
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let t = start.elapsed();
    check(t < limit, format!("took {:.2?}, limit {:.0?}", t, limit))
}

fn semi_trivial_energy(m: &Model<'_>) -> Result<(Field, f64), String> {
    let r = solvers::solve_scalar_ground(m, None, &SolverConfig::default()).map_err(|e| e.to_string())?;
    Ok((r.state.v, r.energy))
}

fn quadrature() -> Outcome {
    let start = Instant::now();
    let g = line(Order::Laplacian, R, N);
    let mut worst: f64 = 0.0;
    for (p, want) in [(8, 32.0 / 35.0), (6, 16.0 / 15.0), (4, 4.0 / 3.0)] {
        let f = g.sample(|x| x.cosh().powi(-p));
        let err = (g.integrate(&f) - want).abs();
        check(err <= 1e-8, format!("cosh^-{p}: error {err:.3e}"))?;
        worst = worst.max(err);
    }
    within(Duration::from_secs(1), start)?;
    Ok(format!("max error {worst:.2e}"))
}

fn soliton_residuals() -> Outcome {
    let start = Instant::now();
    let mut orders = Vec::new();
    for (beta, with_u) in [(0.0, true), (0.7, false), (3.0, false)] {
        let mut res = Vec::new();
        for n in [1001, 2001, 4001] {
            let g = line(Order::Laplacian, R, n);
            let m = model(&g, 1.0, 1.0, beta);
            let u = if with_u { exact::u1_field(&g, 1.0) } else { Field::zeros(&g) };
            let s = StatePair::new(u, exact::v2_field(&g, 1.0));
            res.push(m.strong_residual(&s).max());
        }
        for w in res.windows(2) {
            let p = order(w[0], w[1]);
            check((p - 2.0).abs() <= 0.2, format!("beta={beta}: order {p:.3} from {res:?}"))?;
            orders.push(p);
        }
    }
    within(Duration::from_secs(10), start)?;
    Ok(format!("orders {orders:.3?}"))
}

fn threshold_eigenvalue() -> Outcome {
    let g = line(Order::Laplacian, R, N);
    let m = model(&g, 1.0, 1.0, 0.0);
    let v2 = exact::v2_field(&g, 1.0);
    let res = solvers::compute_lambda(&m, &v2, &LambdaConfig::default()).map_err(|e| e.to_string())?;
    check((res.value - 0.5).abs() <= 1e-3, format!("Lambda = {}", res.value))?;
    let phi = &res.minimizer;
    let sech2 = g.sample_dirichlet(|x| (0.5 * x).cosh().powi(-2));
    let cos = g.integrate_product(phi, &sech2)
        / (g.integrate_product(phi, phi) * g.integrate_product(&sech2, &sech2)).sqrt();
    check(cos >= 0.999, format!("cosine similarity {cos}"))?;
    // Rayleigh oracle: the analytic eigenfunction and random trial functions
    // all sit above the computed infimum.
    let q_exact = solvers::lambda::rayleigh_quotient(&m, &v2, &sech2);
    check(res.value <= q_exact + 1e-12, format!("sech² quotient {q_exact} below {}", res.value))?;
    check((q_exact - 0.5).abs() <= 1e-3, format!("sech² quotient {q_exact}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let trial = random_pair(&g, &mut rng, true).u;
        let q = solvers::lambda::rayleigh_quotient(&m, &v2, &trial);
        if q > 0.0 {
            check(q >= res.value - 1e-12, format!("trial quotient {q} below {}", res.value))?;
        }
    }
    Ok(format!("Lambda = {:.8}, cosine {cos:.6}, sech² quotient {q_exact:.8}", res.value))
}

fn nehari_consistency() -> Outcome {
    let mut worst: f64 = 0.0;
    for (l1, l2, beta) in [(1.0, 1.0, 1.0), (1.0, 2.0, 1.0), (1.0, 1.0, 0.3)] {
        let radius = R / f64::min(l1, l2).sqrt();
        let g = line(Order::Laplacian, radius, N);
        let m = model(&g, l1, l2, beta);
        let v2 = exact::v2_field(&g, l2);
        let t = nehari::project(&m, &StatePair::new(v2.clone(), v2)).map_err(|e| e.to_string())?.scaling;
        let want = exact::diag_nehari_t(l1, l2, beta).map_err(|e| e.to_string())?;
        check((t - want).abs() <= 1e-4, format!("({l1},{l2},{beta}): t = {t} vs {want}"))?;
        worst = worst.max((t - want).abs());
    }
    let g = line(Order::Laplacian, R, 801);
    let m = model(&g, 1.0, 1.0, 0.8);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_g: f64 = 0.0;
    for _ in 0..200 {
        let s = random_pair(&g, &mut rng, true);
        let p = nehari::project(&m, &s).map_err(|e| e.to_string())?;
        let rel = m.nehari(&p.state).abs() / m.norm_sq(&p.state);
        check(rel <= 1e-10, format!("|G|/|s|² = {rel:.3e}"))?;
        worst_g = worst_g.max(rel);
    }
    Ok(format!("max |t - t*| {worst:.2e}, max |G|/|s|² {worst_g:.2e}"))
}

fn ground_ordering() -> Outcome {
    let start = Instant::now();
    let g = line(Order::Laplacian, R, N);
    let m = model(&g, 1.0, 1.0, 1.0);
    let v2 = exact::v2_field(&g, 1.0);
    // The closed-form level is 4.8; the sampled soliton sits O(h²) below it.
    let j_v2 = m.energy(&StatePair::new(Field::zeros(&g), v2.clone()));
    check((j_v2 - 4.8).abs() < 1e-4, format!("J(v2) = {j_v2}"))?;
    let init = StatePair::new(v2.clone(), v2);
    let r = solvers::solve_ground(&m, &init, &SolverConfig::default()).map_err(|e| e.to_string())?;
    check(r.energy < 4.8, format!("J = {} not below 4.8", r.energy))?;
    check(!r.semi_trivial, "semi-trivial")?;
    check(m.norm1_sq(&r.state.u) > 1e-6 && m.norm2_sq(&r.state.v) > 1e-6, "a component vanished")?;
    let min = r.state.u.iter().chain(r.state.v.iter()).cloned().fold(f64::INFINITY, f64::min);
    check(min >= 0.0, format!("negative value {min}"))?;
    check(r.grad_norm <= 1e-8, format!("grad norm {}", r.grad_norm))?;
    within(Duration::from_secs(60), start)?;
    Ok(format!(
        "J = {:.8} < 4.8, grad {:.2e}, {} iterations, {:.2?}",
        r.energy,
        r.grad_norm,
        r.iterations,
        start.elapsed()
    ))
}

fn coexistence() -> Outcome {
    let beta = 0.1;
    let th = exact::lambda2_threshold(1.0, beta, GapModel::SecondOrder, Bisection::default())
        .map_err(|e| e.to_string())?;
    let lam2 = th.value;
    let cfg = SolverConfig::default();

    // Above the threshold: a ground state below the semi-trivial level, and a
    // mountain-pass state above it.
    let high = 2.0 * lam2;
    let g = line(Order::Laplacian, R / f64::min(1.0, high).sqrt(), N);
    let m = model(&g, 1.0, high, beta);
    let (v2, j_v2) = semi_trivial_energy(&m)?;
    let class = nehari::classify_with_profile(&m, v2.clone(), 1e-8).map_err(|e| e.to_string())?;
    check(class.class == V2Class::StrictLocalMin, "v2 is not a local minimum at 2*Lambda2")?;
    let init = StatePair::new(v2.clone(), v2.clone());
    let ground = solvers::solve_ground(&m, &init, &cfg).map_err(|e| e.to_string())?;
    check(!ground.semi_trivial, "ground state is semi-trivial at 2*Lambda2")?;
    check(ground.energy < j_v2, format!("J(ground) = {} vs J(v2) = {j_v2}", ground.energy))?;
    let end_a = StatePair::new(Field::zeros(&g), v2);
    let mp = solvers::solve_mountain_pass(&m, &end_a, &ground.state, &cfg).map_err(|e| e.to_string())?;
    check(mp.report.energy > j_v2, format!("J(mp) = {} vs J(v2) = {j_v2}", mp.report.energy))?;
    for w in mp.path_max.windows(2) {
        check(w[1] <= w[0] + 1e-10 * w[0].abs().max(1.0), "path maximum increased")?;
    }

    // Below the threshold: the run started next to v2 stays there.
    let low = 0.5 * lam2;
    let g_low = line(Order::Laplacian, R / f64::min(1.0, low).sqrt(), N);
    let m_low = model(&g_low, 1.0, low, beta);
    let (v2_low, j_low) = semi_trivial_energy(&m_low)?;
    let noise = g_low.sample_dirichlet(|x| 1e-4 * (-x * x).exp());
    let near = StatePair::new(noise, v2_low);
    let r_low = solvers::solve_ground(&m_low, &near, &cfg).map_err(|e| e.to_string())?;
    check(r_low.semi_trivial, "run near v2 below the threshold is not flagged semi-trivial")?;

    Ok(format!(
        "Lambda2 = {lam2:.6}; at 2*Lambda2 J(ground) = {:.6} < J(v2) = {j_v2:.6} < J(mp) = {:.6}; at Lambda2/2 semi-trivial with J = {:.6} (J(v2) = {j_low:.6})",
        ground.energy, mp.report.energy, r_low.energy
    ))
}

fn perturbative() -> Outcome {
    let g = line(Order::Laplacian, R, N);
    let m = model(&g, 1.0, 1.0, 1.0);
    let mut dist = Vec::new();
    for eps in [0.1, 0.05, 0.025] {
        let r = solvers::solve_perturbative(&m, eps, &SolverConfig::default()).map_err(|e| e.to_string())?;
        check(r.epsilon == eps, format!("reached eps {} of {eps}", r.epsilon))?;
        for i in g.interior() {
            let (u, v) = (r.report.state.u[i], r.report.state.v[i]);
            check(u > 0.0 && v > 0.0, format!("eps {eps}: non-positive value at node {i}"))?;
        }
        dist.push(r.distance);
    }
    let mut orders = Vec::new();
    for w in dist.windows(2) {
        check(w[1] < w[0], format!("distances not decreasing: {dist:?}"))?;
        let p = order(w[0], w[1]);
        check(p >= 0.8, format!("order {p:.3} from {dist:?}"))?;
        orders.push(p);
    }
    Ok(format!("distances {dist:.5?}, orders {orders:.3?}"))
}

fn fourth_order() -> Outcome {
    let cfg = SolverConfig::default();
    // Self-convergence of the computed profile on nested grids.
    let mut profiles = Vec::new();
    for n in [1001, 2001, 4001] {
        let g = line(Order::Bilaplacian, R, n);
        let m = model(&g, 1.0, 1.0, 0.0);
        let r = solvers::solve_scalar_ground(&m, None, &cfg).map_err(|e| e.to_string())?;
        check(m.energy_i2(&r.state.v) > 0.0, "I2 not positive")?;
        let v = &r.state.v;
        check(v[n / 2] > 0.0, "profile not positive at the centre")?;
        for i in g.interior() {
            check((v[i] - v[g.mirror(i)]).abs() <= 1e-12 * v.max_abs(), "profile not even")?;
        }
        check(m.strong_residual(&r.state).max() < 1e-6, "discrete residual not small")?;
        profiles.push(r.state.v);
    }
    let diff = |coarse: &Field, fine: &Field| -> f64 {
        (0..coarse.len()).map(|i| (coarse[i] - fine[2 * i]).abs()).fold(0.0, f64::max)
    };
    let e1 = diff(&profiles[0], &profiles[1]);
    let e2 = diff(&profiles[1], &profiles[2]);
    let p = order(e1, e2);
    check((p - 2.0).abs() <= 0.2, format!("refinement order {p:.3} ({e1:.3e}, {e2:.3e})"))?;

    // Rescaling law against profiles computed directly at λ₂.
    let g = line(Order::Bilaplacian, R, N);
    let base = &profiles[2];
    let base_m = ProfileMoments::of(&g, base);
    let mut worst: f64 = 0.0;
    for l2 in [2.0, 4.0] {
        let m = model(&g, 1.0, l2, 0.0);
        let v2 = solvers::semi_trivial_profile(&m, &cfg).map_err(|e| e.to_string())?;
        let direct = ProfileMoments::of(&g, &v2);
        for (pw, a, b) in [
            (2.0, direct.square, base_m.square),
            (3.0, direct.cube, base_m.cube),
            (4.0, direct.fourth, base_m.fourth),
        ] {
            let want = ProfileMoments::rescale_factor(pw, l2, 1) * b;
            let rel = (a - want).abs() / want.abs();
            check(rel <= 0.01, format!("p={pw}, l2={l2}: {a} vs {want}"))?;
            worst = worst.max(rel);
        }
    }

    // The classification flips at the computed threshold.
    let m = model(&g, 1.0, 1.0, 0.0);
    let lam = solvers::compute_lambda(&m, base, &LambdaConfig::default()).map_err(|e| e.to_string())?.value;
    let below = nehari::classify_with_profile(&m.with_beta(0.5 * lam), base.clone(), 1e-8).map_err(|e| e.to_string())?;
    let above = nehari::classify_with_profile(&m.with_beta(1.5 * lam), base.clone(), 1e-8).map_err(|e| e.to_string())?;
    check(below.class == V2Class::StrictLocalMin, "not a local minimum below the threshold")?;
    check(above.class == V2Class::Saddle, "not a saddle above the threshold")?;
    let at = nehari::classify_with_profile(&m.with_beta(lam), base.clone(), 1e-8);
    check(matches!(at, Err(Error::Indeterminate { .. })), "no indeterminate verdict at the threshold")?;
    Ok(format!(
        "refinement order {p:.3}; rescaling max rel error {worst:.2e}; threshold {lam:.6}"
    ))
}

/// `base · q / max|q|`.
fn modulated(base: &Field, q: &Field) -> Field {
    let m = q.max_abs();
    Field::from_values(base.iter().zip(q.iter()).map(|(b, x)| b * x / m).collect())
}

fn finite_differences() -> Outcome {
    let eps = 1e-4;
    let mut worst: f64 = 0.0;
    for order_ in [Order::Laplacian, Order::Bilaplacian] {
        let g = line(order_, 20.0, 401);
        let m = model(&g, 1.0, 1.3, 0.7);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let s = random_pair(&g, &mut rng, true);
            let mut h = random_pair(&g, &mut rng, true);
            let mut k = random_pair(&g, &mut rng, true);
            if order_ == Order::Bilaplacian {
                // |v|v is only C¹ at v = 0: modulating the v-directions by the
                // base state keeps s ± εh on one side of the kink at every node.
                h.v = modulated(&s.v, &h.v);
                k.v = modulated(&s.v, &k.v);
            }
            let sp = s.add_scaled(eps, &h);
            let sm = s.add_scaled(-eps, &h);
            let hn = m.norm(&h);
            let kn = m.norm(&k);

            let dj = m.differential(&s);
            let fd = (m.energy(&sp) - m.energy(&sm)) / (2.0 * eps);
            let rel = (fd - dj.apply(&g, &h)).abs() / (m.dual_norm(&dj) * hn);
            check(rel <= 1e-6, format!("{order_:?} dJ: {rel:.3e}"))?;
            worst = worst.max(rel);

            let dg = m.differential_nehari(&s);
            let fd = (m.nehari(&sp) - m.nehari(&sm)) / (2.0 * eps);
            let rel = (fd - dg.apply(&g, &h)).abs() / (m.dual_norm(&dg) * hn);
            check(rel <= 1e-6, format!("{order_:?} dG: {rel:.3e}"))?;
            worst = worst.max(rel);

            // Relative to ‖d²J(s)[h, ·]‖ ‖k‖, the covector estimated by the
            // same difference quotient.
            let dh = m.differential(&sp).add_scaled(-1.0, &m.differential(&sm)).scaled(0.5 / eps);
            let fd = dh.apply(&g, &k);
            let exact = m.second_variation(&s, &h, &k);
            let rel = (fd - exact).abs() / (m.dual_norm(&dh) * kn);
            check(rel <= 1e-6, format!("{order_:?} d2J: {rel:.3e}"))?;
            worst = worst.max(rel);
        }
    }
    Ok(format!("max relative error {worst:.2e}"))
}

fn rearrangement() -> Outcome {
    let g = line(Order::Laplacian, 10.0, 201);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut slack_ps = f64::INFINITY;
    let mut slack_hl = f64::INFINITY;
    for _ in 0..100 {
        let f = random_non_negative(&g, &mut rng);
        let h = random_non_negative(&g, &mut rng);
        let (lhs, rhs) = rearrange::check_polya_szego(&g, &f).map_err(|e| e.to_string())?;
        check(lhs - rhs >= -1e-12, format!("Polya-Szego {lhs} < {rhs}"))?;
        slack_ps = slack_ps.min(lhs - rhs);
        let (lhs, rhs) = rearrange::check_hardy_littlewood(&g, &f, &h).map_err(|e| e.to_string())?;
        check(rhs - lhs >= -1e-12, format!("Hardy-Littlewood {lhs} > {rhs}"))?;
        slack_hl = slack_hl.min(rhs - lhs);
        let fs = rearrange::symmetrize(&g, &f).map_err(|e| e.to_string())?;
        for p in [1.0, 2.0, 4.0] {
            let d = rearrange::check_equimeasurable(&g, &f, &fs, p);
            check(d <= 1e-12, format!("L^{p} discrepancy {d:.3e}"))?;
        }
    }

    let g = line(Order::Laplacian, 20.0, 401);
    let m = model(&g, 1.0, 1.0, 0.6);
    let mut worst_t: f64 = 0.0;
    for _ in 0..100 {
        let s = random_pair(&g, &mut rng, false);
        let s = nehari::project(&m, &s).map_err(|e| e.to_string())?.state;
        let sym = StatePair::new(
            rearrange::symmetrize(&g, &s.u).map_err(|e| e.to_string())?,
            rearrange::symmetrize(&g, &s.v).map_err(|e| e.to_string())?,
        );
        let p = nehari::project(&m, &sym).map_err(|e| e.to_string())?;
        check(p.scaling <= 1.0 + 1e-10, format!("t0 = {}", p.scaling))?;
        let (a, b) = (m.energy(&p.state), m.energy(&s));
        check(a <= b + 1e-10, format!("J(t0 s*) = {a} > J(s) = {b}"))?;
        worst_t = worst_t.max(p.scaling);
    }
    Ok(format!(
        "min slack PS {slack_ps:.2e}, HL {slack_hl:.2e}; max t0 {worst_t:.6}"
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("closed-form quadrature", quadrature),
        ("exact-soliton residual order", soliton_residuals),
        ("threshold eigenvalue", threshold_eigenvalue),
        ("Nehari projection consistency", nehari_consistency),
        ("ground state below the semi-trivial level", ground_ordering),
        ("coexistence above the lambda2 threshold", coexistence),
        ("perturbative bound state", perturbative),
        ("fourth-order profile, rescaling, classification", fourth_order),
        ("finite-difference gradient checks", finite_differences),
        ("rearrangement inequalities", rearrangement),
    ];
    let handles: Vec<_> = criteria
        .iter()
        .map(|&(name, f)| {
            std::thread::spawn(move || {
                let start = Instant::now();
                let out = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
                (name, out, start.elapsed())
            })
        })
        .collect();
    let mut failed = 0;
    for (i, h) in handles.into_iter().enumerate() {
        let (name, out, t) = h.join().unwrap();
        match out {
            Ok(detail) => println!("PASS {:>2} {name} ({t:.2?}): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({t:.2?}): {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
