//! Acceptance suite: one line per criterion, exit status 1 if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use conicond::bounds::{tube_ratio_bound, BoundParams, ProblemDescriptor};
use conicond::cli::{
    cntr_suite, eckart_young_suite, estimate_logmean, estimate_tail, estimate_tube, j_consistency_suite,
    j_inequality_suite, kinematic_analytic_grid, kinematic_monte_carlo_grid, kinematic_suite, parse_grid,
    weyl_tube_suite, wilkinson_suite, CaseResult,
};
use conicond::condition::{mu_norm, PolySystem, WeylPolynomial};
use conicond::mc::{default_workers, McConfig};
use conicond::sampling::{sample_rotation, sample_uniform_sphere, RngStream};
use conicond::sphere_geom::{sphere_volume, subsphere_tube_volume, Cap, SpherePoint};
use conicond::tubes::{estimate_tube_cap_ratios, random_curve, Variety};

type Outcome = Result<(bool, String), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn summarize(cases: &[CaseResult]) -> (bool, String) {
    let failed: Vec<String> = cases.iter().filter(|c| !c.pass).map(|c| format!("{} [{}]", c.name, c.detail)).collect();
    if failed.is_empty() {
        (true, format!("{} cases", cases.len()))
    } else {
        (false, format!("{} of {} cases failed: {}", failed.len(), cases.len(), failed.join("; ")))
    }
}

fn with_runtime(pass: bool, detail: String, elapsed: Duration, limit: Option<Duration>) -> (bool, String) {
    let within = limit.is_none_or(|l| elapsed <= l);
    let limit_text = limit.map(|l| format!(" (limit {}s)", l.as_secs())).unwrap_or_default();
    (pass && within, format!("{detail}; {:.2}s{limit_text}", elapsed.as_secs_f64()))
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn j_consistency() -> Outcome {
    let start = Instant::now();
    let cases = j_consistency_suite(20).map_err(err)?;
    let (pass, detail) = summarize(&cases);
    Ok(with_runtime(pass, detail, start.elapsed(), Some(Duration::from_secs(5))))
}

fn j_inequalities() -> Outcome {
    let cases = j_inequality_suite(20).map_err(err)?;
    Ok(summarize(&cases))
}

fn kinematic() -> Outcome {
    let start = Instant::now();
    let cases = kinematic_suite(
        &kinematic_analytic_grid(),
        &kinematic_monte_carlo_grid(),
        1_000_000,
        2024,
        default_workers(),
    )
    .map_err(err)?;
    let (pass, detail) = summarize(&cases);
    Ok(with_runtime(pass, detail, start.elapsed(), Some(Duration::from_secs(120))))
}

fn subsphere_exactness() -> Outcome {
    let start = Instant::now();
    let eps_grid = [0.1, 0.3, 0.6];
    let config = McConfig::new(100_000);
    let mut cases = Vec::new();
    for (k, p) in [2usize, 3, 5].into_iter().enumerate() {
        let cap = Cap::new(SpherePoint::north(p).map_err(err)?, 1.0).map_err(err)?;
        let variety = Variety::Subsphere { p, m: p - 1 };
        let rng = RngStream::new(4, k as u64);
        let estimates = estimate_tube_cap_ratios(&variety, &cap, &eps_grid, &config, &rng).map_err(err)?;
        for (eps, est) in eps_grid.iter().zip(estimates) {
            let exact = subsphere_tube_volume(p, 1, *eps).map_err(err)? / sphere_volume(p);
            cases.push(CaseResult {
                name: format!("p={p} eps={eps}"),
                detail: format!("estimate={} ci=[{}, {}] exact={exact}", est.estimate, est.ci_low, est.ci_high),
                pass: est.contains(exact),
            });
        }
    }
    let (pass, detail) = summarize(&cases);
    Ok(with_runtime(pass, detail, start.elapsed(), Some(Duration::from_secs(60))))
}

fn weyl_tube() -> Outcome {
    let start = Instant::now();
    let cases = weyl_tube_suite(&[2, 3, 4, 6]).map_err(err)?;
    let (pass, detail) = summarize(&cases);
    Ok(with_runtime(pass, detail, start.elapsed(), Some(Duration::from_secs(5))))
}

fn tail_dominance() -> Outcome {
    let start = Instant::now();
    let grid = parse_grid("logspace:2:1000:6").map_err(err)?;
    let config = McConfig::new(100_000);
    let mut cases = Vec::new();
    let mut stream = 0u64;
    for n in [2usize, 3] {
        let problem = ProblemDescriptor::MatrixInversion { n };
        let p = n * n - 1;
        let random_center = sample_uniform_sphere(p, &mut RngStream::new(6, 1000 + n as u64)).map_err(err)?;
        for (label, center) in [("north", SpherePoint::north(p).map_err(err)?), ("random", random_center)] {
            for sigma in [0.25, 1.0] {
                let cap = Cap::new(center.clone(), sigma).map_err(err)?;
                let rows = estimate_tail(&problem, &cap, &grid, &config, &RngStream::new(6, stream)).map_err(err)?;
                stream += 1;
                for row in rows {
                    cases.push(CaseResult {
                        name: format!("n={n} center={label} sigma={sigma} t={:.4}", row.t),
                        detail: format!("ci_low={} bound={}", row.empirical.ci_low, row.bound),
                        pass: row.dominated(),
                    });
                }
            }
        }
    }
    let (pass, detail) = summarize(&cases);
    Ok(with_runtime(pass, detail, start.elapsed(), Some(Duration::from_secs(180))))
}

fn logmean_dominance() -> Outcome {
    let config = McConfig::new(100_000);
    let expected = [9.6589, 12.0917];
    let problems = [
        ProblemDescriptor::MatrixInversion { n: 2 },
        ProblemDescriptor::MatrixInversion { n: 3 },
        ProblemDescriptor::MoorePenrose { l: 3, m: 2 },
    ];
    let mut cases = Vec::new();
    for (k, problem) in problems.iter().enumerate() {
        let (p, _) = problem.dims().map_err(err)?;
        // σ = 1 gives a hemisphere; the condition numbers are even, so this
        // is the uniform distribution on the whole sphere.
        let cap = Cap::new(SpherePoint::north(p).map_err(err)?, 1.0).map_err(err)?;
        let row = estimate_logmean(problem, &cap, &config, &RngStream::new(7, k as u64)).map_err(err)?;
        let reference = match k {
            0 | 1 => expected[k],
            _ => 2.0 * 3f64.ln() + 4.0 * 2f64.ln() + 5.5,
        };
        let bound_ok = (row.bound - reference).abs() <= 1e-4;
        cases.push(CaseResult {
            name: format!("{problem:?}"),
            detail: format!("mean_ln={} bound={} reference={reference}", row.empirical.estimate, row.bound),
            pass: bound_ok && row.empirical.estimate <= row.bound,
        });
    }
    Ok(summarize(&cases))
}

fn tube_dominance() -> Outcome {
    let start = Instant::now();
    let grid = parse_grid("logspace:0.005:0.5:6").map_err(err)?;
    let config = McConfig::new(100_000);
    let mut varieties = vec![("determinant n=2".to_string(), Variety::Determinant { n: 2 })];
    let mut curve_rng = RngStream::new(8, 999);
    for k in 0..3 {
        varieties.push((format!("random curve #{k}"), Variety::Curve(random_curve(2, &mut curve_rng).map_err(err)?)));
    }
    let mut cases = Vec::new();
    let mut stream = 0u64;
    for (label, variety) in &varieties {
        let p = variety.dim().map_err(err)?;
        for sigma in [0.25, 1.0] {
            let cap = Cap::new(SpherePoint::north(p).map_err(err)?, sigma).map_err(err)?;
            let rows = estimate_tube(variety, &cap, &grid, &config, &RngStream::new(8, stream)).map_err(err)?;
            stream += 1;
            let params = BoundParams::new(p, variety.degree(), sigma).map_err(err)?;
            for row in rows {
                let bound = tube_ratio_bound(&params, row.eps).map_err(err)?;
                cases.push(CaseResult {
                    name: format!("{label} d={} sigma={sigma} eps={:.4}", variety.degree(), row.eps),
                    detail: format!("ci_low={} bound={bound}", row.empirical.ci_low),
                    pass: row.empirical.ci_low <= bound,
                });
            }
        }
    }
    let (pass, detail) = summarize(&cases);
    Ok(with_runtime(pass, detail, start.elapsed(), None))
}

fn eckart_young() -> Outcome {
    Ok(summarize(&eckart_young_suite(1000, 9).map_err(err)?))
}

fn wilkinson() -> Outcome {
    let start = Instant::now();
    let cases = wilkinson_suite(1000, 10).map_err(err)?;
    let (pass, detail) = summarize(&cases);
    let detail = format!("{detail}: {}", cases.iter().map(|c| c.detail.as_str()).collect::<Vec<_>>().join("; "));
    Ok(with_runtime(pass, detail, start.elapsed(), Some(Duration::from_secs(60))))
}

fn cntr() -> Outcome {
    let cases = cntr_suite(1000, 11).map_err(err)?;
    let (pass, detail) = summarize(&cases);
    Ok((pass, format!("{detail}: {}", cases.iter().map(|c| c.detail.as_str()).collect::<Vec<_>>().join("; "))))
}

fn mu_norm_cases() -> Outcome {
    let mut cases = Vec::new();
    for n in 1..=3usize {
        let polys = (1..=n)
            .map(|i| {
                let mut c = vec![0.0; n + 1];
                c[i] = 1.0;
                WeylPolynomial::linear(&c)
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        let f = PolySystem::new(polys).map_err(err)?;
        let mu = mu_norm(&f, &SpherePoint::north(n).map_err(err)?).map_err(err)?;
        cases.push(CaseResult {
            name: format!("linear n={n}"),
            detail: format!("mu={mu}"),
            pass: (mu - (n as f64).sqrt()).abs() <= 1e-10,
        });
    }
    let f = PolySystem::new(vec![WeylPolynomial::from_terms(1, 2, [(vec![1, 1], 1.0)]).map_err(err)?]).map_err(err)?;
    let mu = mu_norm(&f, &SpherePoint::north(1).map_err(err)?).map_err(err)?;
    cases.push(CaseResult { name: "X0*X1 at e0".into(), detail: format!("mu={mu}"), pass: (mu - 1.0).abs() <= 1e-10 });

    let mut rng = RngStream::new(12, 0);
    let n = 2;
    let zeta = sample_uniform_sphere(n, &mut rng).map_err(err)?;
    let base_sys = conicond::condition::random_system(n, &[2, 3], &mut rng).map_err(err)?;
    let f = conicond::condition::with_zero_at(&base_sys, &zeta).map_err(err)?;
    let base = mu_norm(&f, &zeta).map_err(err)?;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let g = sample_rotation(n + 1, &mut rng).map_err(err)?;
        let rotated = f.compose_linear(&g.matrix().transpose()).map_err(err)?;
        let moved = g.apply(&zeta).map_err(err)?;
        let v = mu_norm(&rotated, &moved).map_err(err)?;
        worst = worst.max((v - base).abs() / base);
    }
    cases.push(CaseResult {
        name: "orthogonal invariance".into(),
        detail: format!("100 rotations, max rel diff={worst:.2e}"),
        pass: worst <= 1e-8,
    });
    Ok(summarize(&cases))
}

fn reproducibility() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let exe = env!("CARGO_BIN_EXE_conicond");
    let runs: [(&str, Vec<&str>); 3] = [
        ("tail", vec!["estimate", "tail", "--problem", "matrix-inversion", "--n", "3", "--sigma", "0.5", "--center", "random"]),
        ("logmean", vec!["estimate", "logmean", "--problem", "moore-penrose", "--l", "3", "--m", "2", "--sigma", "1"]),
        ("tube", vec!["estimate", "tube", "--variety", "random-curve", "--degree", "2", "--sigma", "0.5", "--center", "random"]),
    ];
    let mut cases = Vec::new();
    for (name, args) in runs {
        let mut outputs = Vec::new();
        for workers in ["1", "4"] {
            let prefix = dir.path().join(format!("{name}-w{workers}"));
            let status = Command::new(exe)
                .args(&args)
                .args(["--samples", "30000", "--seed", "13", "--workers", workers, "--out"])
                .arg(&prefix)
                .output()
                .map_err(err)?;
            if !status.status.success() {
                return Err(format!("{name} with {workers} workers exited with {}", status.status));
            }
            let mut csv = prefix.into_os_string();
            csv.push(".csv");
            outputs.push(std::fs::read(csv).map_err(err)?);
        }
        cases.push(CaseResult {
            name: name.into(),
            detail: format!("{} bytes", outputs[0].len()),
            pass: outputs[0] == outputs[1],
        });
    }
    Ok(summarize(&cases))
}

fn main() {
    let criteria: [Criterion; 13] = [
        ("J-integral recurrence vs quadrature (1e-10)", j_consistency),
        ("J-integral inequalities and equality at pi/2 (1e-12)", j_inequalities),
        ("kinematic identity (1e-10) and Monte Carlo (3 half-widths)", kinematic),
        ("subsphere tube ratio inside 99% CI", subsphere_exactness),
        ("Weyl tube bound on the geodesic-sphere grid", weyl_tube),
        ("tail-bound dominance for matrix inversion", tail_dominance),
        ("log-mean dominance", logmean_dominance),
        ("tube-ratio dominance", tube_dominance),
        ("Eckart-Young oracle (1e-10, 1e-8)", eckart_young),
        ("Wilkinson inequality (+1e-6)", wilkinson),
        ("condition number theorem witnesses (1 - 1e-6)", cntr),
        ("mu_norm closed cases and invariance", mu_norm_cases),
        ("CSV identical for 1 and 4 workers", reproducibility),
    ];
    let mut failures = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let (pass, detail) = match check() {
            Ok(result) => result,
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!("criterion {:>2} {} {name}: {detail}", k + 1, if pass { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
