//! Acceptance gate: one line per criterion, nonzero exit if any fails.

mod common;

use std::time::{Duration, Instant};

use num_rational::BigRational;
use rand::Rng;
use serde_json::Value;

use common::*;
use obsdim::fca::{concept_summary, contranominal_scale, fca_intrinsic_dimension, nominal_scale};
use obsdim::io::{emit_profile_csv, parse_profile_csv};
use obsdim::measure::{feature_levy_level, observable_diameter, scale};
use obsdim::metric::{chavez_id, distance_features, obs_diam_distance, scaling_study, StudyKind, SweepOptions};
use obsdim::oracle::oracle_partial_diameter;
use obsdim::{delta, levy_defect, partial_diameter, profile, ChavezId, MetricKind, PointCloud};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, detail: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(detail.into())
    }
}

fn within(elapsed: Duration, limit_secs: u64) -> Result<(), String> {
    check(
        elapsed <= Duration::from_secs(limit_secs),
        format!("took {:.2?}, limit {limit_secs} s", elapsed),
    )
}

fn exact_dimension_from_cli(kind: &str, n: usize) -> Result<String, String> {
    let (code, out, err) = run_cli(&["scale", "--kind", kind, "--n", &n.to_string()]);
    check(code == 0, format!("exit {code}: {}", String::from_utf8_lossy(&err)))?;
    let json: Value = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
    json["exact_fraction"]["intrinsic_dimension"]
        .as_str()
        .map(str::to_string)
        .ok_or_else(|| "missing exact_fraction.intrinsic_dimension".into())
}

fn c1_nominal_exactness() -> Outcome {
    let start = Instant::now();
    for n in 2..=12usize {
        let expected = (n as u64).pow(4);
        let from_cli = exact_dimension_from_cli("nominal", n)?;
        check(from_cli == expected.to_string(), format!("n={n}: CLI says {from_cli}"))?;
        let report = fca_intrinsic_dimension(&nominal_scale(n).unwrap(), 1 << 24).map_err(|e| e.to_string())?;
        let exact = report.exact.unwrap().dimension.unwrap();
        check(
            exact - BigRational::from_integer(expected.into()) == BigRational::from_integer(0.into()),
            format!("n={n}: nonzero rational residual"),
        )?;
    }
    within(start.elapsed(), 1)?;
    Ok("n = 2..12 give n^4 exactly".into())
}

fn c2_contranominal_limit() -> Outcome {
    let start = Instant::now();
    let mut dims = Vec::new();
    for n in [4usize, 8, 16] {
        let ctx = contranominal_scale(n).unwrap();
        let exact = fca_intrinsic_dimension(&ctx, 1 << 24).map_err(|e| e.to_string())?.exact.unwrap();
        // Independent route: powerset closure + direct evaluation of the concept condition.
        let oracle = brute_force_fca_delta(&powerset_concepts(&ctx.incidence(), n), n, n);
        check(exact.delta == oracle, format!("n={n}: delta {} vs oracle {oracle}", exact.delta))?;
        dims.push(exact.dimension.unwrap());
    }
    check(dims[0] == q(256, 25) && dims[1] == q(1024, 121), format!("n=4,8 gave {}, {}", dims[0], dims[1]))?;
    check(dims[2] == q(4096, 529), format!("n=16 gave {}", dims[2]))?;
    check(dims[0] > dims[1] && dims[1] > dims[2], "sequence not decreasing")?;
    let limit = q(64, 9);
    let gaps: Vec<BigRational> = dims.iter().map(|d| d - &limit).collect();
    check(
        gaps.iter().all(|g| *g > q(0, 1)) && gaps[0] > gaps[1] && gaps[1] > gaps[2],
        "gap to 64/9 not shrinking from above",
    )?;
    within(start.elapsed(), 10)?;
    Ok(format!("dims {}, {}, {} -> 64/9", dims[0], dims[1], dims[2]))
}

fn c3_partial_diameter_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(3);
    let mut checked = 0;
    for _ in 0..200 {
        let dist = random_distribution(&mut rng, 15);
        for _ in 0..20 {
            let alpha: f64 = rng.random_range(0.0..1.0);
            let fast = partial_diameter(&dist, alpha);
            let slow = oracle_partial_diameter(&dist, alpha).map_err(|e| e.to_string())?;
            check(fast == slow, format!("alpha {alpha}: {fast} vs oracle {slow} on {dist:?}"))?;
            checked += 1;
        }
    }
    within(start.elapsed(), 5)?;
    Ok(format!("{checked} cases agree exactly"))
}

fn c4_algorithm_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(4);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let cloud = random_cloud(&mut rng, 40, 8);
        let fast = delta(&obs_diam_distance(&cloud, MetricKind::Euclidean).map_err(|e| e.to_string())?);
        let ds = distance_features(&cloud, MetricKind::Euclidean).map_err(|e| e.to_string())?;
        let reference = delta(&profile(&ds));
        worst = worst.max((fast - reference).abs());
    }
    check(worst <= 1e-12, format!("max |delta difference| = {worst:e}"))?;
    within(start.elapsed(), 10)?;
    Ok(format!("max |delta difference| = {worst:e}"))
}

fn c5_chavez() -> Outcome {
    let two = PointCloud::new(vec![vec![1.0, -2.0], vec![4.0, 2.0]]).unwrap();
    let got = chavez_id(&two, MetricKind::Euclidean, true).map_err(|e| e.to_string())?;
    check(got == ChavezId::Finite(0.5), format!("two points gave {got:?}"))?;
    let h = 3f64.sqrt() / 2.0;
    let tri = PointCloud::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, h]]).unwrap();
    match chavez_id(&tri, MetricKind::Euclidean, true).map_err(|e| e.to_string())? {
        ChavezId::Finite(v) => check((v - 1.0).abs() <= 1e-12, format!("triangle gave {v}"))?,
        other => return Err(format!("triangle gave {other:?}")),
    }
    Ok("two points 0.5, triangle 1.0".into())
}

fn alpha_grid() -> Vec<f64> {
    (0..=200).map(|i| i as f64 / 200.0 + 1.0 / 4096.0).filter(|a| *a < 1.0).collect()
}

fn c6_property_suites() -> Outcome {
    let mut rng = rng(6);
    let grid = alpha_grid();
    let mut profiles = 0;
    for _ in 0..20 {
        let ds = random_data_set(&mut rng, 12, 6);
        let p = profile(&ds);
        profiles += 1;

        // Antitonicity, both of the stored profile and pointwise.
        check(p.values().windows(2).all(|w| w[0] >= w[1]), "stored profile not antitone")?;
        let pointwise: Vec<f64> = grid.iter().map(|&a| observable_diameter(&ds, a)).collect();
        check(pointwise.windows(2).all(|w| w[0] >= w[1]), "ObsDiam not antitone in alpha")?;

        // Scale equivariance.
        for tau in [0.0, 0.5, 1.0, 3.0] {
            let scaled = scale(&ds, tau).unwrap();
            for (&a, &base) in grid.iter().zip(&pointwise) {
                let lhs = observable_diameter(&scaled, a);
                check((lhs - tau * base).abs() <= 1e-9, format!("tau {tau}, alpha {a}: {lhs} vs {}", tau * base))?;
            }
        }

        // Feature-subset monotonicity.
        let keep: Vec<usize> = (0..ds.n_features()).filter(|_| rng.random_bool(0.5)).collect();
        let sub = ds.select_features(&keep).unwrap();
        let sub_profile = profile(&sub);
        check(sub_profile.dominated_by(&p, 1e-12), "subset profile exceeds full profile")?;
        check(delta(&sub_profile) <= delta(&p) + 1e-12, "subset delta exceeds full delta")?;

        // Levy bounds.
        let defect = levy_defect(&ds);
        for (&a, &od) in grid.iter().zip(&pointwise) {
            if a > defect {
                check(od <= 4.0 * defect + 1e-12, format!("(a) alpha {a}: {od} > 4 * {defect}"))?;
            }
            if a > 0.0 && od <= a {
                check(defect <= a + 1e-9, format!("(b) eps {a}: defect {defect}"))?;
            }
        }
        for f in ds.features() {
            let dist = obsdim::pushforward(f, ds.measure()).unwrap();
            check(feature_levy_level(&dist) <= defect, "feature level above defect")?;
        }
    }
    Ok(format!("{profiles} random data sets"))
}

fn stability(kind: StudyKind, label: &str) -> Outcome {
    let start = Instant::now();
    let mut summary = Vec::new();
    let mut failure = None;
    for seed in [1u64, 2, 3] {
        let rows = scaling_study(kind, &[8, 16, 32, 64], 1500, seed, &SweepOptions::default())
            .map_err(|e| e.to_string())?;
        let values: Vec<f64> = rows.iter().map(|r| r.sqrt_n_delta).collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let spread = values.iter().map(|v| (v / mean - 1.0).abs()).fold(0.0, f64::max);
        summary.push(format!(
            "seed {seed}: sqrt(n)*delta = [{}], max dev {:.1}%",
            values.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>().join(", "),
            100.0 * spread
        ));
        if spread > 0.2 && failure.is_none() {
            failure = Some(format!("{label} seed {seed}: deviation {:.1}% > 20%", 100.0 * spread));
        }
    }
    let detail = summary.join("; ");
    if let Some(f) = failure {
        return Err(format!("{f} ({detail})"));
    }
    within(start.elapsed(), 120)?;
    Ok(detail)
}

fn c7_sphere_scaling() -> Outcome {
    stability(StudyKind::Sphere, "sphere")
}

fn c8_hypercube_scaling() -> Outcome {
    stability(StudyKind::Hypercube, "hypercube")
}

fn c9_concept_enumeration() -> Outcome {
    let mut rng = rng(9);
    for i in 0..100 {
        let ctx = random_context(&mut rng, 8, 8);
        let got = concept_summary(&ctx, 1 << 24).map_err(|e| e.to_string())?.total();
        let expected = powerset_concepts(&ctx.incidence(), ctx.n_attributes()).len() as u64;
        check(got == expected, format!("context {i}: {got} vs oracle {expected}"))?;
    }
    for n in 1..=10usize {
        let got = concept_summary(&contranominal_scale(n).unwrap(), 1 << 24).unwrap().total();
        check(got == 1 << n, format!("contranominal {n}: {got}"))?;
    }
    for n in 2..=12usize {
        let got = concept_summary(&nominal_scale(n).unwrap(), 1 << 24).unwrap().total();
        check(got == n as u64 + 2, format!("nominal {n}: {got}"))?;
    }
    Ok("100 random contexts, contranominal 2^n, nominal n+2".into())
}

fn c10_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let points = dir.path().join("pts.csv");
    std::fs::write(&points, "x,y\n0,0\n1,0\n0,2\n3,3\n1,1\n").unwrap();
    let cxt = dir.path().join("ctx.cxt");
    std::fs::write(&cxt, obsdim::io::emit_cxt(&contranominal_scale(5).unwrap())).unwrap();
    let csv = dir.path().join("ctx.csv");
    std::fs::write(&csv, ",a,b,c\ng1,1,0,1\ng2,0,1,1\n").unwrap();
    let p = |s: &std::path::Path| s.to_str().unwrap().to_string();
    let invocations: Vec<Vec<String>> = vec![
        vec!["points".into(), p(&points), "--chavez".into(), "--levy".into()],
        vec!["context".into(), p(&cxt)],
        vec!["context".into(), p(&csv), "--format".into(), "csv".into()],
        vec!["scale".into(), "--kind".into(), "contranominal".into(), "--n".into(), "6".into()],
        vec!["study".into(), "sphere".into(), "--dims".into(), "2,3".into(), "--count".into(), "60".into(), "--seed".into(), "5".into()],
    ];
    for args in &invocations {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let first = run_cli(&args);
        let second = run_cli(&args);
        check(first.0 == 0, format!("{args:?} exited {}: {}", first.0, String::from_utf8_lossy(&first.2)))?;
        check(first == second, format!("{args:?} not byte-identical"))?;
    }

    for (i, args) in [
        vec!["points".to_string(), p(&points)],
        vec!["scale".into(), "--kind".into(), "nominal".into(), "--n".into(), "7".into()],
    ]
    .into_iter()
    .enumerate()
    {
        let out = dir.path().join(format!("profile{i}.csv"));
        let mut args = args.clone();
        args.extend(["--profile-out".to_string(), p(&out)]);
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (code, stdout, _) = run_cli(&args);
        check(code == 0, "profile run failed")?;
        let report: Value = serde_json::from_slice(&stdout).unwrap();
        let bytes = std::fs::read(&out).unwrap();
        let parsed = parse_profile_csv(&bytes).map_err(|e| e.to_string())?;
        check(
            report["delta"].as_f64() == Some(delta(&parsed)),
            format!("round-trip delta {} vs report {}", delta(&parsed), report["delta"]),
        )?;
        check(emit_profile_csv(&parsed).as_bytes() == bytes.as_slice(), "re-emitted CSV differs")?;
    }
    Ok(format!("{} subcommand runs byte-identical; profile CSV round-trips", invocations.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 nominal-scale exactness", c1_nominal_exactness),
        ("2 contranominal limit", c2_contranominal_limit),
        ("3 partial-diameter oracle equivalence", c3_partial_diameter_oracle),
        ("4 algorithm/definition equivalence", c4_algorithm_equivalence),
        ("5 Chavez closed cases", c5_chavez),
        ("6 property suites", c6_property_suites),
        ("7 sphere scaling", c7_sphere_scaling),
        ("8 hypercube scaling", c8_hypercube_scaling),
        ("9 concept enumeration", c9_concept_enumeration),
        ("10 determinism and round-trip", c10_determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  criterion {name} ({secs:.2} s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {name} ({secs:.2} s): {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
