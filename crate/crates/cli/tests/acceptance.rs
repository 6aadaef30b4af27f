//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! fails. Tolerances are fixed below.

#[path = "../../core/tests/common/oracle.rs"]
mod oracle;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tdac::experiment::{self, synthetic, ExperimentConfig, ForestSettings, RunSpec};
use tdac::gsw::{decrypt, encrypt, keygen, GswParams};
use tdac::imaging::{height_filtration, radial_filtration};
use tdac::vectorize::{bottleneck_amplitude, heat_kernel, persistence_entropy, wasserstein_amplitude};
use tdac::{
    build_cubical_filtration, build_vr_filtration, compute_persistence, Bar, BinaryImage, Center, Direction,
    FeatureSchema, PersistenceDiagram, PointCloud,
};

const IDENTITY_TOL: f64 = 1e-12;
const ANTISYMMETRY_TOL: f64 = 1e-9;
const PERSISTENCE_BUDGET: Duration = Duration::from_secs(60);
const SYNTHETIC_BUDGET: Duration = Duration::from_secs(120);
const PIPELINE_BUDGET: Duration = Duration::from_secs(30 * 60);
const SYNTHETIC_MIN_ACCURACY: f64 = 0.95;
const NULL_RANGE: (f64, f64) = (0.4, 0.6);

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn bars(pd: &PersistenceDiagram, k: usize) -> Vec<(f64, f64)> {
    pd.dim(k).iter().map(|b| (b.birth, b.death)).collect()
}

fn persistence_oracle() -> Outcome {
    let start = Instant::now();
    let mut compared = 0;
    for mask in 0u32..512 {
        let fg: Vec<bool> = (0..9).map(|i| mask >> i & 1 == 1).collect();
        let img = BinaryImage::new(3, 3, fg.iter().map(|&b| u8::from(b)).collect()).unwrap();
        let cases = [
            (
                "height (0,1)",
                height_filtration(&img, Direction::new(0.0, 1.0).unwrap()),
                oracle::height_values(3, 3, &fg, (0.0, 1.0)),
            ),
            (
                "radial (1,1)",
                radial_filtration(&img, Center::new(1, 1)).unwrap(),
                oracle::radial_values(3, 3, &fg, (1, 1)),
            ),
        ];
        for (name, gray, values) in cases {
            let pd = compute_persistence(&build_cubical_filtration(&gray)).map_err(|e| e.to_string())?;
            let brute = oracle::Complex::cubical(3, 3, &values);
            for k in 0..2 {
                let (got, want) = (bars(&pd, k), brute.bars(k));
                ensure(got == want, || {
                    format!("mask {mask:#011b}, {name}, H{k}: engine {got:?}, oracle {want:?}")
                })?;
            }
            compared += 1;
        }
    }
    let t = start.elapsed();
    ensure(t < PERSISTENCE_BUDGET, || format!("took {t:.1?}"))?;
    Ok(format!("{compared} diagrams equal, {t:.1?}"))
}

fn rips_components() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checks = 0;
    for cloud in 0..100 {
        let n = rng.gen_range(1..=8);
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![rng.gen_range(0.0..4.0), rng.gen_range(0.0..4.0)])
            .collect();
        let pc = PointCloud::new(pts.clone()).unwrap();
        let pd =
            compute_persistence(&build_vr_filtration(&pc, 1, f64::INFINITY).unwrap()).map_err(|e| e.to_string())?;
        for _ in 0..10 {
            // half the probes sit exactly on an edge's entry scale
            let eps = if n > 1 && rng.gen_bool(0.5) {
                let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
                pc.distance(i, j) / 2.0
            } else {
                rng.gen_range(0.0..3.0)
            };
            let alive = pd.dim(0).iter().filter(|b| b.contains(eps)).count();
            let comps = oracle::components_at(&pts, eps);
            ensure(alive == comps, || {
                format!("cloud {cloud}, eps {eps}: {alive} bars vs {comps} components")
            })?;
            checks += 1;
        }
    }
    Ok(format!("{checks} scale checks exact"))
}

fn vectorizer_identities() -> Outcome {
    let one = PersistenceDiagram::new(vec![Bar::new(0.0, 2.0)], vec![]);
    let twins = PersistenceDiagram::new(vec![Bar::new(0.0, 1.0), Bar::new(0.0, 1.0)], vec![]);
    let pair = PersistenceDiagram::new(vec![Bar::new(0.0, 2.0), Bar::new(1.0, 2.0)], vec![]);
    let ln2 = std::f64::consts::LN_2;
    let sqrt2 = std::f64::consts::SQRT_2;
    let checks = [
        ("PE {(0,2)} = 0", persistence_entropy(&one, 0), 0.0),
        ("PE {(0,1),(0,1)} = ln 2", persistence_entropy(&twins, 0), ln2),
        (
            "A_W {(0,2)}, p=2 = sqrt 2",
            wasserstein_amplitude(&one, 0, 2.0).map_err(|e| e.to_string())?,
            sqrt2,
        ),
        ("A_B {(0,2),(1,2)} = sqrt 2", bottleneck_amplitude(&pair, 0), sqrt2),
    ];
    let mut worst: f64 = 0.0;
    for (name, got, want) in checks {
        let err = (got - want).abs();
        ensure(err <= IDENTITY_TOL, || format!("{name}: got {got:e}"))?;
        worst = worst.max(err);
    }
    let mixed = PersistenceDiagram::new(
        vec![Bar::new(0.0, 2.0), Bar::new(0.5, 1.5), Bar::new(1.0, 3.0)],
        vec![Bar::new(1.0, 2.5)],
    );
    let mut anti: f64 = 0.0;
    for k in 0..2 {
        let grid = heat_kernel(&mixed, k, 0.3, 32, None).map_err(|e| e.to_string())?;
        anti = anti.max(grid.max_antisymmetry_error());
    }
    ensure(anti <= ANTISYMMETRY_TOL, || format!("heat antisymmetry {anti:e}"))?;
    Ok(format!("max identity error {worst:e}, heat antisymmetry {anti:e}"))
}

fn synthetic_benchmark() -> Outcome {
    let start = Instant::now();
    let (images, labels) = synthetic::squares(200, 11).map_err(|e| e.to_string())?;
    let ds = experiment::feature_dataset(&images, &labels, &FeatureSchema::default()).map_err(|e| e.to_string())?;
    let cfg = ExperimentConfig::default();
    let (_, _, acc) = experiment::fit_and_score(&ds, &cfg, &cfg.seeds()).map_err(|e| e.to_string())?;
    let t = start.elapsed();
    let summary = format!("DT {:.4}, RF {:.4}, {t:.1?}", acc.decision_tree, acc.random_forest);
    ensure(
        acc.decision_tree >= SYNTHETIC_MIN_ACCURACY && acc.random_forest >= SYNTHETIC_MIN_ACCURACY,
        || summary.clone(),
    )?;
    ensure(t < SYNTHETIC_BUDGET, || summary.clone())?;
    Ok(summary)
}

fn gsw_round_trips() -> Outcome {
    let params = GswParams::new(6, 64, None, 1).map_err(|e| e.to_string())?;
    ensure(params.side == 42, || format!("side {}", params.side))?;
    let (sk, pk) = keygen(&params, 2024).map_err(|e| e.to_string())?;
    for i in 0..1000u64 {
        let mu = (i % 2) as u8;
        let ct = encrypt(&pk, mu, i).map_err(|e| e.to_string())?;
        ensure(ct.side() == 42, || format!("ciphertext side {}", ct.side()))?;
        let got = decrypt(&sk, &ct).map_err(|e| e.to_string())?;
        ensure(got == mu, || format!("trial {i}: encrypted {mu}, decrypted {got}"))?;
    }
    Ok(format!(
        "1000/1000 correct, side 42 (q={}, m={}, B={})",
        params.q, params.m, params.error_bound
    ))
}

fn leaky_config() -> ExperimentConfig {
    ExperimentConfig {
        runs: vec![RunSpec::leaky_side(29), RunSpec::leaky_side(33), RunSpec::honest_n(6)],
        ..ExperimentConfig::default()
    }
}

fn run_pipeline(config: &Path, out: &Path) -> Result<(i32, String), String> {
    let output = Command::new(env!("CARGO_BIN_EXE_tdac"))
        .args(["pipeline", "--check", "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .env("RUST_LOG", "warn")
        .output()
        .map_err(|e| e.to_string())?;
    let code = output.status.code().unwrap_or(-1);
    Ok((code, String::from_utf8_lossy(&output.stdout).into_owned()))
}

fn end_to_end(work: &Path) -> Outcome {
    let config = work.join("config.json");
    std::fs::write(&config, leaky_config().to_json()).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let (code, stdout) = run_pipeline(&config, &work.join("a"))?;
    let t = start.elapsed();
    let check = stdout
        .lines()
        .find(|l| l.starts_with("check:"))
        .unwrap_or("no check line")
        .to_string();
    ensure(code == 0, || format!("exit {code}: {check}"))?;
    ensure(t < PIPELINE_BUDGET, || format!("took {t:.1?}"))?;
    let report = std::fs::read_to_string(work.join("a/report.md")).map_err(|e| e.to_string())?;
    for row in ["| 28 |", "| 32 |", "| 0.84 | 0.93 |", "| 0.78 | 0.76 |", "honest"] {
        ensure(report.contains(row), || format!("report lacks {row:?}"))?;
    }
    let rows: Vec<&str> = report
        .lines()
        .filter(|l| l.starts_with("| 28 ") || l.starts_with("| 32 "))
        .collect();
    Ok(format!(
        "{t:.1?}, {}; {}",
        check.trim_start_matches("check: "),
        rows.join(" / ")
    ))
}

fn files_under(root: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    out.sort();
    out
}

fn determinism(work: &Path) -> Outcome {
    let config = work.join("config.json");
    let first = work.join("a");
    if !first.join("report.md").exists() {
        return Err("first pipeline run missing".into());
    }
    let (code, _) = run_pipeline(&config, &work.join("b"))?;
    ensure(code == 0, || format!("second run exit {code}"))?;
    let (a, b) = (files_under(&first), files_under(&work.join("b")));
    ensure(a == b, || "different file sets".into())?;
    let mut compared = 0;
    for f in &a {
        if f.file_name().is_some_and(|n| n == "timings.json") {
            continue;
        }
        let same = std::fs::read(first.join(f)).unwrap() == std::fs::read(work.join("b").join(f)).unwrap();
        ensure(same, || format!("{} differs", f.display()))?;
        compared += 1;
    }
    for needed in ["dataset.tdac", "features.csv", "tree.json", "forest.json", "report.md"] {
        ensure(a.iter().any(|f| f.ends_with(needed)), || format!("no {needed}"))?;
    }
    Ok(format!("{compared} artifacts byte-identical (timings.json excluded)"))
}

fn null_signal(work: &Path) -> Outcome {
    let (mut dt, mut rf) = (0.0, 0.0);
    const SEEDS: u64 = 20;
    for seed in 0..SEEDS {
        let cfg = ExperimentConfig {
            runs: vec![RunSpec::leaky_side(29)],
            count_per_class: 50,
            seed,
            shuffle_labels: true,
            forest: ForestSettings {
                n_trees: 25,
                ..ForestSettings::default()
            },
            ..ExperimentConfig::default()
        };
        let out = experiment::pipeline(&cfg, &work.join(format!("null{seed}"))).map_err(|e| e.to_string())?;
        let row = &out.report.rows[0];
        dt += row.decision_tree;
        rf += row.random_forest;
    }
    let (dt, rf) = (dt / SEEDS as f64, rf / SEEDS as f64);
    let summary = format!("mean DT {dt:.4}, mean RF {rf:.4} over {SEEDS} seeds");
    let inside = |x: f64| (NULL_RANGE.0..=NULL_RANGE.1).contains(&x);
    ensure(inside(dt) && inside(rf), || summary.clone())?;
    Ok(summary)
}

fn main() {
    let work = tempfile::tempdir().expect("temp dir");
    let criteria: Vec<Criterion> = vec![
        ("1 persistence oracle equivalence", Box::new(persistence_oracle)),
        ("2 Vietoris-Rips H0 vs components", Box::new(rips_components)),
        ("3 vectorizer identities", Box::new(vectorizer_identities)),
        ("4 synthetic filled/hollow benchmark", Box::new(synthetic_benchmark)),
        ("5 GSW round trips at defaults", Box::new(gsw_round_trips)),
        (
            "6 leaky end-to-end pipeline --check",
            Box::new(|| end_to_end(work.path())),
        ),
        ("7 pipeline determinism", Box::new(|| determinism(work.path()))),
        ("8 shuffled-label null check", Box::new(|| null_signal(work.path()))),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        match run() {
            Ok(detail) => println!("acceptance {name}: PASS ({detail})"),
            Err(why) => {
                failed += 1;
                println!("acceptance {name}: FAIL ({why})");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
