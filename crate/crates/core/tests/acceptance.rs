//! Acceptance run: one line per criterion, non-zero exit if a hard
//! criterion fails. The Monte Carlo criterion only warns.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sl2lab::dynamics::{correlation_mc, log_slope, recurrence_profile, Observable};
use sl2lab::origami::*;
use sl2lab::sl2::{exp_matrix, geodesic};
use sl2lab::specfit::{eigenvalue_to_rate, fit_window, rate_to_eigenvalue, DEFAULT_T_MIN};
use sl2lab::spherical::*;
use sl2lab::transforms::*;

type Outcome = Result<String, String>;
type Criterion = fn() -> Result<Outcome, sl2lab::Error>;

fn cz(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn spherical_set() -> Vec<Complex64> {
    vec![cz(0.1, 0.0), cz(0.25, 0.0), cz(0.5, 0.0), cz(0.75, 0.0), cz(0.95, 0.0), cz(0.0, 0.5), cz(0.0, 2.0)]
}

fn series_vs_oracle() -> Result<Outcome, sl2lab::Error> {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for s in spherical_set() {
        let p = SphericalParam::from_complex(s)?;
        for t in [0.5, 1.0, 2.0, 4.0, 8.0] {
            worst = worst.max((phi(&p, t, 1e-12)? - phi_oracle(s, t)?).norm());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(check(worst <= 1e-8 && secs < 10.0, format!("max |φ − oracle| = {worst:.2e}, {secs:.2} s")))
}

fn normalization() -> Result<Outcome, sl2lab::Error> {
    let mut worst = 0.0f64;
    for s in spherical_set() {
        worst = worst.max((phi(&SphericalParam::from_complex(s)?, 0.0, 1e-12)? - 1.0).norm());
    }
    Ok(check(worst <= 1e-10, format!("max |φ(0) − 1| = {worst:.2e}")))
}

fn radial_casimir_residual() -> Result<Outcome, sl2lab::Error> {
    let mut worst = 0.0f64;
    for s in [cz(0.3, 0.0), cz(0.7, 0.0), cz(0.0, 1.0)] {
        let p = SphericalParam::from_complex(s)?;
        for k in 0..=10 {
            worst = worst.max(casimir_residual(&p, 1.0 + 0.5 * k as f64)?);
        }
    }
    Ok(check(worst <= 1e-6, format!("max residual = {worst:.2e}")))
}

fn integer_grid(a: u32, b: u32) -> Vec<f64> {
    (a..=b).map(f64::from).collect()
}

fn harish() -> Result<Outcome, sl2lab::Error> {
    let mut worst = 0.0f64;
    for s in [0.2, 0.5, 0.9] {
        let r = harish_defect(s, &integer_grid(1, 15))? / harish_defect(s, &integer_grid(1, 3))?;
        worst = worst.max(r);
    }
    Ok(check(worst <= 2.0, format!("max tail/early ratio = {worst:.3}")))
}

fn ratner() -> Result<Outcome, sl2lab::Error> {
    let mut worst = 0.0f64;
    for v in [0.0, 0.5, 1.0, 5.0] {
        let r = ratner_check(v, 0.1, &integer_grid(1, 15))? / ratner_check(v, 0.1, &integer_grid(1, 3))?;
        worst = worst.max(r);
    }
    Ok(check(worst <= 2.0, format!("max tail/early ratio = {worst:.3}")))
}

fn gamma_growth() -> Result<Outcome, sl2lab::Error> {
    let mut worst = 0.0f64;
    for s in [-0.9, -0.5, -0.2, 0.2, 0.5, 0.9] {
        let g = gamma_coeffs(cz(s, 0.0), 400)?;
        for n in 100..=400 {
            worst = worst.max(g.coeffs[n].norm().powf(1.0 / n as f64));
        }
    }
    Ok(check(worst <= 1.05, format!("max |Γ_n|^(1/n) = {worst:.4}")))
}

fn residues() -> Result<Outcome, sl2lab::Error> {
    let ext = ExtendedTransform::new(SpectralAtoms::new(vec![(0.6, 1.0)])?, 0.1)?;
    let r = residue_contour(|z| ext.eval(z), cz(-0.4, 0.0), 0.1, 16, CONTOUR_TOL)?;
    let err = (r.value - c_function(cz(0.6, 0.0))?).norm();
    let mut off = 0.0f64;
    for p in [cz(-0.1, 0.0), cz(0.3, 0.2), cz(-0.6, -0.3), cz(0.5, 1.0)] {
        off = off.max(residue_contour(|z| ext.eval(z), p, 0.1, 16, CONTOUR_TOL)?.value.norm());
    }
    Ok(check(err <= 1e-6 && off <= 1e-10, format!("|res − c(0.6)| = {err:.2e}, max off-pole residue = {off:.2e}")))
}

fn toy_operators() -> Result<Outcome, sl2lab::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(2718);
    let (mut s_err, mut idem, mut proj_err) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..10 {
        let d: Vec<Complex64> = (0..5)
            .map(|k| cz(-0.3 - 0.6 * k as f64 - 0.2 * rng.random::<f64>(), rng.random_range(-0.5..0.5)))
            .collect();
        let v = DMatrix::from_fn(5, 5, |i, j| {
            let base = if i == j { 1.0 } else { 0.0 };
            cz(base + 0.3 * rng.random_range(-1.0..1.0), 0.3 * rng.random_range(-1.0..1.0))
        });
        let vinv = v.clone().try_inverse().expect("invertible eigenbasis");
        let l = ToyOperator::new(&v * DMatrix::from_diagonal(&DVector::from_vec(d.clone())) * &vinv)?;
        let z0 = cz(0.4, 0.0);
        let m = ToyOperator::new(resolvent(&l, z0)?)?;
        for k in 0..20 {
            let z = cz(0.05 + 0.05 * (k % 5) as f64, -1.0 + 0.5 * (k / 5) as f64);
            let diff = ToyOperator::new(resolvent_s(&m, z0, z)?.matrix() - resolvent(&l, z)?)?.operator_norm();
            s_err = s_err.max(diff);
        }
        for (i, &mu) in d.iter().enumerate() {
            let p = spectral_projection(&l, mu, 0.1)?;
            let pm = p.matrix();
            idem = idem.max((pm * pm - pm).norm());
            // S has a pole at z0 − 1/λ_i with λ_i = 1/(z0 − μ_i), i.e. at μ_i
            let lambda = 1.0 / (z0 - mu);
            let r = residue_contour(
                |z| resolvent_s(&m, z0, z).map(|s| s.into_matrix()),
                z0 - 1.0 / lambda,
                0.1,
                64,
                CONTOUR_TOL,
            )?;
            let want = v.column(i) * vinv.row(i);
            proj_err = proj_err.max((&r.value - want).norm());
        }
    }
    Ok(check(
        s_err <= 1e-10 && idem <= 1e-8 && proj_err <= 1e-8,
        format!("‖S − R‖ = {s_err:.2e}, ‖Π² − Π‖ = {idem:.2e}, ‖res S − P_i‖ = {proj_err:.2e}"),
    ))
}

fn cauchy_atoms() -> Result<Outcome, sl2lab::Error> {
    let nu = MeasureOnInterval::new(vec![(0.5, 0.3)], Some(PiecewiseDensity::uniform(1.0)))?;
    let ladder = geometric_ladder(0.05, 10);
    let at = atom_mass(&nu, 0.5, &ladder)?;
    let off = atom_mass(&nu, 0.25, &ladder)?;
    Ok(check((at - 0.3).abs() <= 1e-3 && off.abs() <= 1e-3, format!("mass(0.5) = {at:.6}, mass(0.25) = {off:.2e}")))
}

fn origami_exactness() -> Result<Outcome, sl2lab::Error> {
    let x = Origami::l_shape();
    let kappa = x.cone_orders();
    let euler = kappa.iter().map(|k| k - 1).sum::<usize>() == 2 * x.genus() - 2;
    let mut edges: Vec<((i64, i64), usize)> =
        saddle_connections(&x, 1.0)?.iter().map(|g| (g.holonomy, g.start_square)).collect();
    edges.sort();
    // bottom and left edges of the three squares, each from the single cone point
    let hand = vec![((0, 1), 0), ((0, 1), 1), ((0, 1), 2), ((1, 0), 0), ((1, 0), 1), ((1, 0), 2)];
    let mut sys_err = 0.0f64;
    for k in 0..=50 {
        let t = 0.1 * k as f64;
        let want = (-t).exp();
        sys_err = sys_err.max((systole(&Origami::torus().apply_element(&geodesic(t))?)? - want).abs() / want);
    }
    Ok(check(
        x.genus() == 2 && kappa == [3] && euler && edges == hand && sys_err <= 1e-12,
        format!(
            "g = {}, κ = {kappa:?}, {} connections at L = 1, systole rel err = {sys_err:.1e}",
            x.genus(),
            edges.len()
        ),
    ))
}

fn norm_hyperbolicity() -> Result<Outcome, sl2lab::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(1618);
    let x = Origami::l_shape();
    let ctx = NormContext::with_default_bound(&x)?;
    let taut = ctx.norm_at(&x, &Cocycle::tautological(&x))?.value;
    let tangent = ctx.norm_at(&x, &Cocycle::tangent(&x, &[[1.0, 0.0], [0.0, -1.0]]))?.value;
    let list = saddle_connections(&x, 6.0)?;
    let phi_x = Cocycle::tautological(&x);
    let base: Vec<f64> =
        list.iter().map(|g| evaluate_cocycle(&phi_x, g).map(|z| z.norm())).collect::<Result<_, _>>()?;
    let mut violations = 0usize;
    let mut checks = 0usize;
    for t in [0.5, 1.0, 2.0] {
        let gt = geodesic(t);
        let y = x.apply_element(&gt)?;
        let phi_y = Cocycle::tautological(&y);
        let moved: Vec<f64> =
            list.iter().map(|g| evaluate_cocycle(&phi_y, g).map(|z| z.norm())).collect::<Result<_, _>>()?;
        let (up, down) = ((2.0 * t).exp() * (1.0 + 1e-12), (-2.0 * t).exp() * (1.0 - 1e-12));
        for k in 0..1000 {
            let real = Cocycle::random_closed(&x, &mut rng, 0.0);
            // alternate real (unstable) and purely imaginary (stable) cocycles
            let v = if k % 2 == 0 { real } else { real.times_i() };
            let w = pushforward_cocycle(&gt, &v);
            for (i, g) in list.iter().enumerate() {
                let before = evaluate_cocycle(&v, g)?.norm() / base[i];
                let after = evaluate_cocycle(&w, g)?.norm() / moved[i];
                let monotone =
                    if k % 2 == 0 { after >= before * (1.0 - 1e-12) } else { after <= before * (1.0 + 1e-12) };
                let r = after / before;
                checks += 1;
                if !monotone || r > up || r < down {
                    violations += 1;
                }
            }
        }
    }
    Ok(check(
        taut == 1.0 && (tangent - 1.0).abs() <= 1e-12 && violations == 0,
        format!("‖Φ‖ = {taut}, geodesic tangent = {tangent}, {violations} violations in {checks} checks"),
    ))
}

fn random_direction(rng: &mut ChaCha8Rng) -> [[f64; 2]; 2] {
    [
        [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
        [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
    ]
}

fn slow_variation() -> Result<Outcome, sl2lab::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(314);
    let x = Origami::l_shape();
    let opts = PathOptions { require_stabilized: false };
    let (mut norm_bad, mut conn_bad, mut total) = (0usize, 0usize, 0usize);
    for _ in 0..200 {
        let dir = random_direction(&mut rng);
        let duration = rng.random_range(0.01..=0.3);
        let v = Cocycle::random_closed(&x, &mut rng, 1.0);
        let r = path_norm_bounds(&x, dir, duration, &v, 8.0, opts)?;
        total += r.connections;
        conn_bad += r.connection_violations;
        norm_bad += usize::from(!r.norm_ratio_ok);
    }
    Ok(check(
        norm_bad == 0 && conn_bad == 0,
        format!("200 paths: {norm_bad} endpoint violations, {conn_bad} of {total} connection violations"),
    ))
}

fn lipschitz_systole() -> Result<Outcome, sl2lab::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let delta = 0.1;
    let opts = PathOptions { require_stabilized: false };
    let surfaces = [Origami::torus(), Origami::l_shape()];
    let (mut sys_bad, mut v_bad) = (0usize, 0usize);
    let mut slack = f64::INFINITY;
    for k in 0..500 {
        let base = &surfaces[k % 2];
        let x = base.apply_element(&exp_matrix(random_direction(&mut rng), 0.8))?;
        let dir = random_direction(&mut rng);
        let duration = rng.random_range(0.01..=0.3);
        let bound = (8.0 * systole(&x)?).max(4.0);
        let r = path_norm_bounds(&x, dir, duration, &Cocycle::tangent(&x, &dir), bound, opts)?;
        let ds = (r.systole_start.ln() - r.systole_end.ln()).abs();
        let vd = |s: f64| s.powf(-(1.0 + delta)).max(1.0).ln();
        let dv = (vd(r.systole_start) - vd(r.systole_end)).abs();
        slack = slack.min(r.length - ds);
        sys_bad += usize::from(ds > r.length + 1e-9);
        v_bad += usize::from(dv > (1.0 + delta) * r.length + 1e-9);
    }
    Ok(check(
        sys_bad == 0 && v_bad == 0,
        format!("500 pairs: {sys_bad} log-sys and {v_bad} log-V_δ violations, min slack {slack:.2e}"),
    ))
}

fn recurrence() -> Result<Outcome, sl2lab::Error> {
    let start = Instant::now();
    let mut details = Vec::new();
    let mut ok = true;
    for (name, x, t_max) in [("torus", Origami::torus(), 16), ("L", Origami::l_shape(), 12)] {
        let grid: Vec<f64> = (0..=t_max).map(|k| 0.5 * k as f64).collect();
        let p = recurrence_profile(&x, 0.1, &grid)?;
        let c = p.c1;
        let mut worst = 0.0f64;
        for (t, a) in grid.iter().zip(&p.averages) {
            match a {
                Some(a) => worst = worst.max(a.value / (1.1 * c * ((-0.8 * t).exp() * p.v_delta_start + 1.0))),
                None => worst = f64::INFINITY,
            }
        }
        ok &= p.is_complete() && c.is_finite() && worst <= 1.0;
        details.push(format!("{name}: C = {c:.4}, max avg/bound = {worst:.4}"));
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= start.elapsed() < Duration::from_secs(300);
    Ok(check(ok, format!("{}, {secs:.1} s", details.join("; "))))
}

fn rates_and_fit() -> Result<Outcome, sl2lab::Error> {
    let mut round = 0.0f64;
    for i in 0..=10_000 {
        let l = 0.25 * i as f64 / 10_000.0;
        round = round.max((rate_to_eigenvalue(eigenvalue_to_rate(l)?)? - l).abs());
    }
    let t: Vec<f64> = (0..=40).map(|k| 2.0 + 0.25 * k as f64).collect();
    let (s1, s2) = (SphericalParam::real(0.8)?, SphericalParam::real(0.4)?);
    let y: Vec<f64> = t
        .iter()
        .map(|&t| Ok((phi(&s1, t, 1e-15)? + 0.5 * phi(&s2, t, 1e-15)?).re))
        .collect::<Result<_, sl2lab::Error>>()?;
    let fit = fit_window(&t, &y, 2, DEFAULT_T_MIN, 12.0)?;
    let r = fit.rates();
    Ok(check(
        round <= 1e-14 && (r[0] - 0.2).abs() <= 1e-2 && (r[1] - 0.6).abs() <= 1e-2,
        format!("round trip {round:.1e}, rates ({:.5}, {:.5}) on t ∈ [{DEFAULT_T_MIN}, 12]", r[0], r[1]),
    ))
}

fn monte_carlo() -> Result<Outcome, sl2lab::Error> {
    let obs = Observable::bump(0.8, 1.0)?;
    let grid: Vec<f64> = (0..=8).map(|k| 0.5 * k as f64).collect();
    let s = correlation_mc(&obs, &grid, 1_000_000, 1)?;
    let (slope, se) = log_slope(&s, 1.0, 4.0)?;
    let table: Vec<String> = grid
        .iter()
        .zip(s.estimates.iter().zip(&s.std_errors))
        .map(|(t, (e, se))| format!("{t}:{e:.2e}±{se:.1e}"))
        .collect();
    Ok(check(slope <= -0.5, format!("slope {slope:.3} ± {se:.3}; {}", table.join(" "))))
}

fn main() -> ExitCode {
    let criteria: [(&str, bool, Criterion); 16] = [
        ("spherical series vs quadrature oracle", true, series_vs_oracle),
        ("normalization φ(0) = 1", true, normalization),
        ("radial Casimir residual", true, radial_casimir_residual),
        ("Harish defect stays bounded", true, harish),
        ("Ratner envelope stays bounded", true, ratner),
        ("Γ_n growth", true, gamma_growth),
        ("residue of the extended transform", true, residues),
        ("resolvent identity and projections", true, toy_operators),
        ("Cauchy atom extraction", true, cauchy_atoms),
        ("origami exact data", true, origami_exactness),
        ("norm identities and hyperbolicity", true, norm_hyperbolicity),
        ("slow variation along short paths", true, slow_variation),
        ("Lipschitz systole and V_δ", true, lipschitz_systole),
        ("recurrence profiles", true, recurrence),
        ("rate map and exponential fit", true, rates_and_fit),
        ("Monte Carlo decay on the modular surface", false, monte_carlo),
    ];
    let mut failed = 0;
    for (i, (name, hard, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run().unwrap_or_else(|e| Err(format!("error: {e}")));
        let secs = start.elapsed().as_secs_f64();
        let tag = match (&outcome, hard) {
            (Ok(_), _) => "PASS",
            (Err(_), true) => {
                failed += 1;
                "FAIL"
            }
            (Err(_), false) => "WARN",
        };
        let detail = outcome.unwrap_or_else(|e| e);
        println!("[{tag}] {:>2} {name}: {detail} [{secs:.1} s]", i + 1);
    }
    println!("acceptance: {} of {} hard criteria passed", 15 - failed, 15);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
