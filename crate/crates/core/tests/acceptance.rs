//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.
//!
//! `cargo test -p hexwalk --test acceptance`

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use hexwalk::cli::run_from_args;
use hexwalk::dynamics::{sigma_series, theta_grid, theta_sweep, InitialState};
use hexwalk::evolution::{dense_evolution_matrix, evolve, step};
use hexwalk::fit::linear_fit;
use hexwalk::linalg::{eigenvalues, multiset_distance, unitarity_defect};
use hexwalk::localization::{
    decay_fit, find_critical_points, numerical_gradient, phase, phase_gradient,
    scaled_peak_series,
};
use hexwalk::search::{
    analyze, c_squared, c_constant, lambda_exact, overlap_checks, predicted_runtime_and_probability,
    run_search, s_sum, verify_appendix_bounds, SearchConfig,
};
use hexwalk::spectral::{phi_min, spectral_evolve, SublatticeSpectrum};
use hexwalk::{HexLattice, StateVector, Vertex, WalkAngles};
use nalgebra::DVector;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// Turns a list of named sub-checks into an outcome.
fn verdict(checks: &[(&str, bool)], detail: String) -> Outcome {
    let failed: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    if failed.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; failed: {}", failed.join(", ")))
    }
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn spread(values: &[f64]) -> f64 {
    let hi = values.iter().copied().fold(f64::MIN, f64::max);
    let lo = values.iter().copied().fold(f64::MAX, f64::min);
    hi / lo - 1.0
}

fn unitarity_and_dense_oracle() -> Outcome {
    let start = Instant::now();
    let thetas = [0.0, PI / 7.0, PI / 6.0, PI / 4.0, PI / 3.0, PI / 2.0, 2.0 * PI / 3.0, 0.9 * PI];
    let (mut max_err, mut max_defect) = (0.0f64, 0.0f64);
    for n in [2, 4] {
        let lat = HexLattice::new(n).map_err(|e| e.to_string())?;
        for (j, &theta) in thetas.iter().enumerate() {
            let angles = WalkAngles::uniform(theta);
            let u = dense_evolution_matrix(&angles, &lat).map_err(|e| e.to_string())?;
            max_defect = max_defect.max(unitarity_defect(&u));
            for seed in 0..100u64 {
                let psi = StateVector::random(&lat, 1000 * j as u64 + seed);
                let dense = &u * DVector::from_column_slice(psi.amplitudes());
                let sparse = step(&psi, &angles, &lat).map_err(|e| e.to_string())?;
                let err = sparse
                    .amplitudes()
                    .iter()
                    .zip(dense.iter())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                max_err = max_err.max(err);
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        &[
            ("step error", max_err < 1e-11),
            ("unitarity", max_defect < 1e-12),
            ("runtime", elapsed < Duration::from_secs(10)),
        ],
        format!(
            "max error {max_err:.2e}, |U†U−I| {max_defect:.2e}, {:.2}s",
            secs(elapsed)
        ),
    )
}

fn spectrum_equivalence() -> Outcome {
    let lat = HexLattice::new(4).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for theta in [PI / 6.0, PI / 4.0, PI / 3.0] {
        let u = dense_evolution_matrix(&WalkAngles::uniform(theta), &lat).map_err(|e| e.to_string())?;
        let dense = eigenvalues(&u).map_err(|e| e.to_string())?;
        let blocks = SublatticeSpectrum::new(4, theta).eigenvalues();
        worst = worst.max(multiset_distance(&dense, &blocks).map_err(|e| e.to_string())?);
    }
    verdict(&[("distance", worst < 1e-10)], format!("multiset distance {worst:.2e}"))
}

fn path_equivalence() -> Outcome {
    let lat = HexLattice::new(8).map_err(|e| e.to_string())?;
    let angles = WalkAngles::uniform(PI / 3.0);
    let mut worst = 0.0f64;
    for seed in 0..10 {
        let psi = StateVector::random(&lat, seed);
        for t in [1, 7, 50] {
            let a = spectral_evolve(&psi, t, &angles, &lat).map_err(|e| e.to_string())?;
            let b = evolve(&psi, t, &angles, &lat).map_err(|e| e.to_string())?;
            worst = worst.max(a.max_abs_diff(&b));
        }
    }
    verdict(&[("error", worst < 1e-8)], format!("max error {worst:.2e}"))
}

fn sigma_slope_ordering() -> Outcome {
    let start = Instant::now();
    let lat = HexLattice::new(256).map_err(|e| e.to_string())?;
    // descending slope order
    let order = [PI / 3.0, 11.0 * PI / 30.0, 7.0 * PI / 30.0, 4.0 * PI / 30.0, PI / 30.0];
    let mut slopes = Vec::new();
    let mut r2 = Vec::new();
    for theta in order {
        let series = sigma_series(&InitialState::Hexagon, theta, 100, &lat).map_err(|e| e.to_string())?;
        let fit = series.fit_window(20, 100).map_err(|e| e.to_string())?;
        slopes.push(fit.slope);
        r2.push(fit.r_squared);
    }
    let elapsed = start.elapsed();
    let ordered = slopes.windows(2).all(|w| w[0] > w[1]);
    let min_r2 = r2.iter().copied().fold(1.0, f64::min);
    let listed: Vec<String> = slopes.iter().map(|s| format!("{s:.4}")).collect();
    verdict(
        &[
            ("ordering", ordered),
            ("R²", min_r2 > 0.999),
            ("runtime", elapsed < Duration::from_secs(120)),
        ],
        format!("slopes [{}], min R² {min_r2:.6}, {:.1}s", listed.join(", "), secs(elapsed)),
    )
}

fn sweep_peaks() -> Outcome {
    let lat = HexLattice::new(256).map_err(|e| e.to_string())?;
    let grid = theta_grid(65).map_err(|e| e.to_string())?;
    let sweep = theta_sweep(&InitialState::Hexagon, 100, &grid, &lat).map_err(|e| e.to_string())?;
    let argmax = |lo: f64, hi: f64| {
        sweep
            .iter()
            .filter(|(th, _)| *th >= lo && *th <= hi)
            .copied()
            .fold((0.0, f64::MIN), |best, p| if p.1 > best.1 { p } else { best })
    };
    let left = argmax(0.0, PI / 2.0);
    let right = argmax(PI / 2.0, PI);
    let peak = left.1.max(right.1);
    let value_at = |th: f64| {
        sweep
            .iter()
            .find(|(g, _)| (g - th).abs() < 1e-12)
            .map(|p| p.1)
            .unwrap_or(f64::NAN)
    };
    let step = PI / 64.0;
    let edges = [value_at(0.0), value_at(PI / 2.0), value_at(PI)];
    let edge_ratio = edges.iter().copied().fold(0.0, f64::max) / peak;
    verdict(
        &[
            ("left peak", (left.0 - PI / 3.0).abs() <= step + 1e-12),
            ("right peak", (right.0 - 2.0 * PI / 3.0).abs() <= step + 1e-12),
            ("edge values", edge_ratio < 0.05),
        ],
        format!(
            "peaks at {:.4}π and {:.4}π, peak σ/t {peak:.4}, edge/peak {edge_ratio:.2e}",
            left.0 / PI,
            right.0 / PI
        ),
    )
}

fn phi_min_asymptote() -> Outcome {
    let mut worst = 0.0f64;
    for n in [64, 128, 256] {
        let ratio = phi_min(n, PI / 3.0) * n as f64 / (3f64.sqrt() * PI);
        worst = worst.max((ratio - 1.0).abs());
    }
    let (a, b) = (phi_min(64, PI / 4.0), phi_min(256, PI / 4.0));
    let variation = (a - b).abs() / a.max(b);
    verdict(
        &[("π/3 ratio", worst < 0.02), ("π/4 variation", variation < 0.05)],
        format!("max |ratio−1| {worst:.4}, φ_min(π/4) variation {variation:.2e}"),
    )
}

fn critical_points() -> Outcome {
    // θ=π/3 makes φ singular at (0,0); π/4 keeps every point regular
    let theta = PI / 4.0;
    let points = find_critical_points(theta, 24);
    let max_residual = points.iter().map(|p| p.residual).fold(0.0, f64::max);
    let min_det = points
        .iter()
        .map(|p| p.hessian_det_numerical.abs())
        .fold(f64::MAX, f64::min);

    let mut worst_grad = 0.0f64;
    let m = 64;
    for i in 0..m {
        for j in 0..m {
            let k = -PI + 2.0 * PI * (i as f64 + 0.31) / m as f64;
            let l = -PI + 2.0 * PI * (j as f64 + 0.57) / m as f64;
            if phase(k, l, theta).sin() <= 0.1 {
                continue;
            }
            let (gk, gl) = phase_gradient(k, l, theta).map_err(|e| e.to_string())?;
            let (nk, nl) = numerical_gradient(k, l, theta, 1e-5);
            let scale = gk.hypot(gl).max(1e-3);
            worst_grad = worst_grad.max((gk - nk).hypot(gl - nl) / scale);
        }
    }
    verdict(
        &[
            ("count == 8", points.len() == 8),
            ("residuals", max_residual < 1e-10),
            ("Hessian", min_det > 1e-6),
            ("gradient", worst_grad < 1e-5),
        ],
        format!(
            "{} points, max residual {max_residual:.1e}, min |det| {min_det:.3e}, gradient rel. error {worst_grad:.1e}",
            points.len()
        ),
    )
}

fn no_localization() -> Outcome {
    let start = Instant::now();
    let n = 1024;
    let lat = HexLattice::new(n).map_err(|e| e.to_string())?;
    let init = InitialState::TwoNode;
    let origin = Vertex::new(n / 2, n / 2, 0);
    let decay = decay_fit(origin, &init, PI / 3.0, (50, 400), &lat).map_err(|e| e.to_string())?;
    let times: Vec<usize> = (100..=400).step_by(10).collect();
    let scaled = scaled_peak_series(&init, PI / 3.0, &times, &lat).map_err(|e| e.to_string())?;
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        scaled.iter().map(|&(t, v)| ((t as f64).ln(), v.ln())).unzip();
    let trend = linear_fit(&xs, &ys).map_err(|e| e.to_string())?.slope;
    let elapsed = start.elapsed();
    let first = scaled.first().map(|p| p.1).unwrap_or(f64::NAN);
    let last = scaled.last().map(|p| p.1).unwrap_or(f64::NAN);
    verdict(
        &[
            ("decay exponent", (-2.5..=-1.5).contains(&decay.exponent)),
            ("max p·t² trend", trend <= 0.0),
            ("runtime", elapsed < Duration::from_secs(300)),
        ],
        format!(
            "exponent {:.3} (R² {:.2}), max p·t² {first:.2}→{last:.2} (log-log slope {trend:.3}), {:.1}s",
            decay.exponent,
            decay.r_squared,
            secs(elapsed)
        ),
    )
}

fn search_eigenphase() -> Outcome {
    let mut worst = 0.0f64;
    for n in (2..=16).step_by(2) {
        let report = overlap_checks(n).map_err(|e| e.to_string())?;
        worst = worst.max(report.eigenvalue_errors.0).max(report.eigenvalue_errors.1);
    }
    let mut ratios = Vec::new();
    for n in [64, 128] {
        let lambda = lambda_exact(n).map_err(|e| e.to_string())?;
        ratios.push(lambda * n as f64 * c_constant(n));
    }
    let within = ratios.iter().all(|r| (r - 1.0).abs() < 0.1);
    verdict(
        &[("dense spectrum", worst < 1e-6), ("λnC", within)],
        format!(
            "max eigenvalue distance {worst:.2e}, λnC {:.4} / {:.4}",
            ratios[0], ratios[1]
        ),
    )
}

fn search_simulation() -> Outcome {
    let a = analyze(&SearchConfig::new(16, 0)).map_err(|e| e.to_string())?;
    let t_err = (a.run.t_sim as f64 - a.t_pred).abs() / a.t_pred;
    let p_err = (a.run.p_sim - a.p_pred).abs() / a.p_pred;
    let corr = a.sinusoid_correlation().map_err(|e| e.to_string())?;

    let mut control = SearchConfig::new(16, 400);
    control.theta = PI / 4.0;
    let lat = HexLattice::new(16).map_err(|e| e.to_string())?;
    let run = run_search(&control, &lat).map_err(|e| e.to_string())?;
    let control_max = run.series.iter().copied().fold(0.0, f64::max);
    let limit = 10.0 / a.vertices() as f64;
    verdict(
        &[
            ("t_sim", t_err <= 0.15),
            ("P_sim", p_err <= 0.30),
            ("correlation", corr > 0.95),
            ("control", control_max < limit),
        ],
        format!(
            "t_sim {} vs {:.2} ({t_err:.3}), P_sim {:.4} vs {:.4} ({p_err:.3}), corr {corr:.4}, θ=π/4 max {control_max:.4} < {limit:.4}",
            a.run.t_sim, a.t_pred, a.run.p_sim, a.p_pred
        ),
    )
}

fn scaling_laws() -> Outcome {
    let mut runtime = Vec::new();
    let mut prob = Vec::new();
    for n in [32, 64, 128] {
        let (t, p) = predicted_runtime_and_probability(n).map_err(|e| e.to_string())?;
        let big_n = (2 * n * n) as f64;
        runtime.push(t / (big_n * big_n.ln()).sqrt());
        prob.push(p * big_n.ln());
    }
    let mut bounds_hold = true;
    for n in [4, 8, 16, 32, 64, 128] {
        bounds_hold &= verify_appendix_bounds(n).map_err(|e| e.to_string())?.all_hold();
    }
    let s4 = s_sum(4);
    let sizes = [8, 16, 32, 64, 128, 256];
    let c2: Vec<f64> = sizes.iter().map(|&n| c_squared(n)).collect();
    let ratios: Vec<f64> = c2.windows(2).map(|w| w[1] / w[0]).collect();
    let growth = ratios.iter().all(|&r| r > 1.0) && ratios.windows(2).all(|w| w[1] < w[0]);
    let listed: Vec<String> = ratios.iter().map(|r| format!("{r:.4}")).collect();
    verdict(
        &[
            ("runtime spread", spread(&runtime) < 0.15),
            ("probability spread", spread(&prob) < 0.20),
            ("appendix bounds", bounds_hold),
            ("S(4)", s4 == 2.5),
            ("C² growth", growth),
        ],
        format!(
            "t/√(N ln N) spread {:.3}, P·ln N spread {:.3}, S(4)={s4}, C²(2n)/C²(n) [{}]",
            spread(&runtime),
            spread(&prob),
            listed.join(", ")
        ),
    )
}

fn run_all_commands(out: &Path) -> Result<(), String> {
    let dir = out.to_str().ok_or("non-UTF-8 temp path")?;
    let sub = |name: &str| format!("{dir}/{name}");
    let runs: [Vec<String>; 4] = [
        ["evolve", "--n", "16", "--tmax", "5", "--init", "random", "--seed", "11"]
            .map(String::from)
            .to_vec(),
        ["sigma", "--n", "32", "--tmax", "10", "--theta", "pi/3,pi/5"].map(String::from).to_vec(),
        ["search", "--n", "8,16"].map(String::from).to_vec(),
        ["localization", "--n", "64", "--tmax", "20", "--theta", "pi/4"]
            .map(String::from)
            .to_vec(),
    ];
    for mut args in runs {
        let name = args[0].clone();
        args.push("--out".into());
        args.push(sub(&name));
        if name == "localization" {
            let cfg = format!("{dir}/loc.toml");
            fs::write(&cfg, "tmin = 5\n").map_err(|e| e.to_string())?;
            args.push("--config".into());
            args.push(cfg);
        }
        let mut full = vec!["hexwalk".to_string()];
        full.extend(args);
        run_from_args(full).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(())
}

fn output_files(root: &Path) -> Vec<std::path::PathBuf> {
    let mut files = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).into_iter().flatten().flatten() {
            let path = entry.path();
            if path.is_dir() {
                stack.push(path);
            } else {
                files.push(path.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    files.sort();
    files
}

fn determinism() -> Outcome {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    run_all_commands(a.path())?;
    run_all_commands(b.path())?;
    let files = output_files(a.path());
    let mut differing = Vec::new();
    for rel in &files {
        let x = fs::read(a.path().join(rel)).map_err(|e| e.to_string())?;
        let y = fs::read(b.path().join(rel)).map_err(|e| e.to_string())?;
        if x != y {
            differing.push(rel.display().to_string());
        }
    }
    let same_set = files == output_files(b.path());
    verdict(
        &[("file set", same_set), ("contents", differing.is_empty()), ("outputs", !files.is_empty())],
        format!("{} output files compared, {} differ", files.len(), differing.len()),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("unitarity and dense oracle", unitarity_and_dense_oracle),
        ("block spectrum matches dense spectrum", spectrum_equivalence),
        ("spectral and step evolution agree", path_equivalence),
        ("σ(t) slope ordering", sigma_slope_ordering),
        ("σ/t sweep peaks", sweep_peaks),
        ("φ_min asymptote", phi_min_asymptote),
        ("critical points", critical_points),
        ("no localization", no_localization),
        ("search eigenphase", search_eigenphase),
        ("search simulation vs prediction", search_simulation),
        ("search scaling laws", scaling_laws),
        ("deterministic CLI output", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} #{:<2} {name}: {detail} [{:.1}s]", i + 1, secs(start.elapsed()));
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
