//! Acceptance suite: one PASS / FAIL / SKIP line per criterion.
//!
//! Runs without the libtest harness so criteria execute in order and their
//! lines always reach the output. Exits non-zero if any criterion fails.

#[path = "../../core/tests/support/oracles.rs"]
mod oracles;
mod support;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use support::cli::{without_timestamp, Scratch};
use support::fixtures;
use wordpca::core::classifier::LogRegObjective;
use wordpca::core::text::fractional_ranks;
use wordpca::core::{
    center, cosine, explained_variance_ratio, fit_pca, ppa, project_matrix, spearman, train_logreg, EmbeddingSet,
    LogRegConfig, Matrix, PpaConfig, PpaTransform, SplitBand,
};
use wordpca::formats::{parse_embeddings, read_embeddings_file, serialize_to_vec};
use wordpca::harness::{self, EvalConfig, Task, DEFAULT_PROBE_MAX_ITERS};
use wordpca::EmbeddingFormat;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

use Outcome::{Fail, Pass, Skip};

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Pass(detail)
    } else {
        Fail(detail)
    }
}

fn within(limit: Duration, elapsed: Duration, outcome: Outcome) -> Outcome {
    match outcome {
        Pass(d) if elapsed > limit => Fail(format!("{d}; took {elapsed:.2?}, limit {limit:?}")),
        Pass(d) => Pass(format!("{d}; {elapsed:.2?}")),
        other => other,
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let outcome = f();
    within(limit, start.elapsed(), outcome)
}

/// 100 random matrices up to 64×16 against a dense nalgebra eigensolve.
fn pca_oracle_equivalence() -> Outcome {
    timed(Duration::from_secs(10), || {
        let (mut worst_var, mut worst_comp) = (0.0f64, 0.0f64);
        for seed in 0..100u64 {
            let d = 2 + (seed as usize % 15);
            let n = d + 1 + (seed as usize * 7) % (64 - d);
            let x = oracles::random_set(&mut oracles::rng(seed), n, d);
            let model = fit_pca(&x).unwrap();
            let want = oracles::pca_oracle(&x);
            let floor = 1e-12 * want.variances[0];
            for i in 0..d {
                let (a, b) = (model.variances()[i], want.variances[i]);
                worst_var = worst_var.max((a - b).abs() / b.abs().max(floor));
                let sign = oracles::dot(model.component(i), &want.components[i]).signum();
                for (u, v) in model.component(i).iter().zip(&want.components[i]) {
                    worst_comp = worst_comp.max((u - sign * v).abs());
                }
            }
        }
        check(
            worst_var <= 1e-8 && worst_comp <= 1e-6,
            format!("max variance rel err {worst_var:.2e}, max component err {worst_comp:.2e}"),
        )
    })
}

/// PPA residuals, D = 0 and D = d on 1000×50.
fn ppa_invariants() -> Outcome {
    timed(Duration::from_secs(5), || {
        let x = oracles::random_set(&mut oracles::rng(2), 1000, 50);
        let centered = center(&x).unwrap();
        let mut worst_residual = 0.0f64;
        for d_top in [1, 5] {
            let t = PpaTransform::fit(&x, PpaConfig::new(d_top)).unwrap();
            let out = t.apply(&x).unwrap();
            for r in 0..x.len() {
                let v: Vec<f64> = centered.row(r).iter().map(|&a| f64::from(a)).collect();
                let norm = oracles::dot(&v, &v).sqrt();
                let w: Vec<f64> = out.row(r).iter().map(|&a| f64::from(a)).collect();
                for i in 0..d_top {
                    worst_residual = worst_residual.max(oracles::dot(t.direction(i), &w).abs() / norm);
                }
            }
        }
        let zero_is_centering = ppa(&x, PpaConfig::new(0)).unwrap() == centered;
        let full = ppa(&x, PpaConfig::new(50)).unwrap();
        let max_norm = (0..x.len())
            .map(|r| full.row(r).iter().map(|&a| f64::from(a).powi(2)).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        check(
            worst_residual < 1e-5 && zero_is_centering && max_norm < 1e-5,
            format!(
                "max |u·v'|/|v| {worst_residual:.2e}, D=0 bitwise centering {zero_is_centering}, D=d max norm {max_norm:.2e}"
            ),
        )
    })
}

/// Band variance ratios and per-row band energies on 300-dim data.
fn energy_partition() -> Outcome {
    let x = oracles::random_set(&mut oracles::rng(3), 400, 300);
    let model = fit_pca(&x).unwrap();
    let ratio_sum: f64 = SplitBand::ALL.iter().map(|b| explained_variance_ratio(&model, b.range(300).unwrap())).sum();
    let bands: Vec<Matrix> =
        SplitBand::ALL.iter().map(|b| project_matrix(&x, &model, b.range(300).unwrap()).unwrap()).collect();
    let mut worst = 0.0f64;
    for r in 0..x.len() {
        let centered: f64 = x.row(r).iter().zip(model.mean()).map(|(&v, m)| (f64::from(v) - m).powi(2)).sum();
        let energy: f64 = bands.iter().map(|b| b.row(r).iter().map(|v| v * v).sum::<f64>()).sum();
        worst = worst.max((energy - centered).abs() / centered);
    }
    check(
        (ratio_sum - 1.0).abs() < 1e-9 && worst < 1e-5,
        format!("ratio sum - 1 = {:.2e}, max band energy rel err {worst:.2e}", ratio_sum - 1.0),
    )
}

pub const GLOVE_ENV: &str = "WORDPCA_GLOVE_300D";

/// Band variance shares of the 300-dim GloVe release.
fn glove_band_shares() -> Outcome {
    let Some(path) = std::env::var_os(GLOVE_ENV) else {
        return Skip(format!("set {GLOVE_ENV} to the 300-dim GloVe text file to run"));
    };
    let e = match read_embeddings_file(path.as_ref(), EmbeddingFormat::GloveText) {
        Ok(e) => e,
        Err(err) => return Fail(format!("cannot read {}: {err}", path.to_string_lossy())),
    };
    if e.dim() != 300 {
        return Fail(format!("expected 300 dimensions, found {}", e.dim()));
    }
    timed(Duration::from_secs(120), || {
        let model = fit_pca(&e).unwrap();
        let got: Vec<f64> =
            SplitBand::ALL.iter().map(|b| explained_variance_ratio(&model, b.range(300).unwrap())).collect();
        let ok = got.iter().zip([0.529, 0.371, 0.100]).all(|(g, w)| (g - w).abs() <= 0.01);
        check(ok, format!("T/M/B = {:.3}/{:.3}/{:.3} over {} words", got[0], got[1], got[2], e.len()))
    })
}

/// Sweep accuracy is flat past the planted signal rank.
fn sweep_plateau() -> Outcome {
    timed(Duration::from_secs(60), || {
        let p = fixtures::planted_sweep();
        let model = fit_pca(&p.embeddings).unwrap();
        let tasks = [Task::Classification(p.dataset.clone())];
        let report = harness::dimension_sweep(&p.embeddings, &model, &tasks, 2, &EvalConfig::default()).unwrap();
        let curve: Vec<(f64, f64)> = report.series("planted_sweep").map(|r| (r.x.unwrap(), r.value)).collect();
        let at10 = curve.iter().find(|(k, _)| *k == 10.0).unwrap().1;
        let spread = curve.iter().filter(|(k, _)| *k >= 10.0).map(|(_, a)| (a - at10).abs()).fold(0.0, f64::max);
        let shown: Vec<String> = curve.iter().map(|(k, a)| format!("{k}:{a:.3}")).collect();
        check(spread <= 0.01, format!("max |acc(k) - acc(10)| for k >= 10 = {spread:.4}; curve {}", shown.join(" ")))
    })
}

/// The middle band carries the class and beats the others by 10 points.
fn band_split() -> Outcome {
    timed(Duration::from_secs(60), || {
        let p = fixtures::planted_band();
        let model = fit_pca(&p.embeddings).unwrap();
        let tasks = [Task::Classification(p.dataset.clone())];
        let report = harness::split_eval(&p.embeddings, &model, &tasks, &EvalConfig::default()).unwrap();
        let acc = |k| report.value("planted_band", k).unwrap();
        let (t, m, b) = (acc("T"), acc("M"), acc("B"));
        check(m - t >= 0.10 && m - b >= 0.10, format!("T {t:.3}, M {m:.3}, B {b:.3}, random {:.3}", acc("random")))
    })
}

/// Only the planted component predicts the label.
fn component_probe() -> Outcome {
    timed(Duration::from_secs(60), || {
        let p = fixtures::planted_probe();
        let model = fit_pca(&p.embeddings).unwrap();
        let cfg = EvalConfig {
            classifier: LogRegConfig { max_iters: DEFAULT_PROBE_MAX_ITERS, ..LogRegConfig::default() },
            folds: 1,
        };
        let report = harness::probe_components(&p.embeddings, &model, &p.dataset, &cfg).unwrap();
        let curve: Vec<f64> = report.series("planted_probe").map(|r| r.value).collect();
        let chance = 1.0 / fixtures::PROBE_CLASSES as f64;
        let peak = (0..curve.len()).max_by(|&a, &b| curve[a].total_cmp(&curve[b])).unwrap();
        let off = (0..curve.len())
            .filter(|&i| i != fixtures::PROBE_SIGNAL_COMPONENT)
            .map(|i| (curve[i] - chance).abs())
            .fold(0.0, f64::max);
        check(
            peak == fixtures::PROBE_SIGNAL_COMPONENT && off <= 0.02,
            format!(
                "peak at {peak} ({:.3}), max |acc - chance| elsewhere {off:.4}",
                curve[fixtures::PROBE_SIGNAL_COMPONENT]
            ),
        )
    })
}

/// Removing a dominant shared direction raises word similarity rho.
fn shared_direction() -> Outcome {
    timed(Duration::from_secs(60), || {
        let (e, ds) = fixtures::shared_direction_similarity();
        let report =
            harness::ppa_compare(&e, PpaConfig::new(1), &[Task::Similarity(ds)], &EvalConfig::default()).unwrap();
        let (before, after) =
            (report.value("shared_direction", "original").unwrap(), report.value("shared_direction", "ppa").unwrap());
        check(after > before, format!("rho original {before:.4}, PPA(D=1) {after:.4}"))
    })
}

/// Every subcommand twice on the same inputs gives identical reports and
/// artifacts.
fn cli_determinism() -> Outcome {
    let s = Scratch::new();
    assert!(s
        .run(&["reduce", "--embeddings", "emb.txt", "--dim", "18", "--d-top", "1", "--out", "e18.txt"])
        .status
        .success());
    s.write("saved.json", "");
    let runs: Vec<(&str, Vec<&str>, Option<&str>)> = vec![
        ("convert", vec!["convert", "--embeddings", "emb.txt", "--to", "word2vec-binary", "--out", "ART"], Some("ART")),
        ("pca fit", vec!["pca", "fit", "--embeddings", "emb.txt", "--out", "ART"], Some("ART")),
        ("pca project", vec!["pca", "project", "--embeddings", "emb.txt", "--end", "7", "--out", "ART"], Some("ART")),
        ("ppa", vec!["ppa", "--embeddings", "emb.txt", "--d-top", "2", "--out", "ART"], Some("ART")),
        (
            "ppa --compare",
            vec!["ppa", "--embeddings", "emb.txt", "--compare", "--sim", "sim.tsv", "--cls", "cls.tsv"],
            None,
        ),
        ("reduce", vec!["reduce", "--embeddings", "emb.txt", "--dim", "10", "--out", "ART"], Some("ART")),
        ("split", vec!["split", "--embeddings", "e18.txt", "--band", "M", "--out", "ART"], Some("ART")),
        ("split eval", vec!["split", "--embeddings", "e18.txt", "--sim", "sim.tsv", "--cls", "cls.tsv"], None),
        ("eval sim", vec!["eval", "sim", "--embeddings", "emb.txt", "--dataset", "sim.tsv"], None),
        ("eval cls", vec!["eval", "cls", "--embeddings", "emb.txt", "--dataset", "cls.tsv", "--folds", "3"], None),
        (
            "sweep",
            vec!["sweep", "--embeddings", "emb.txt", "--step", "5", "--sim", "sim.tsv", "--cls", "cls.tsv"],
            None,
        ),
        ("probe", vec!["probe", "--embeddings", "emb.txt", "--dataset", "cls.tsv"], None),
        ("report", vec!["report", "--input", "saved.json", "--report", "csv"], None),
    ];
    // `report` re-renders a report produced by an earlier run
    let saved = s.run(&["eval", "sim", "--embeddings", "emb.txt", "--dataset", "sim.tsv"]);
    s.write("saved.json", std::str::from_utf8(&saved.stdout).unwrap());

    let mut failed = Vec::new();
    for (name, args, artifact) in &runs {
        let mut outputs = Vec::new();
        for _ in 0..2 {
            let args: Vec<&str> = args.iter().map(|a| if *a == "ART" { "artifact" } else { a }).collect();
            let out = s.run(&args);
            if !out.status.success() {
                failed.push(format!("{name}: {}", String::from_utf8_lossy(&out.stderr).trim()));
                break;
            }
            outputs.push((without_timestamp(&out.stdout), artifact.map(|_| s.read("artifact"))));
            let _ = std::fs::remove_file(s.path("artifact"));
        }
        if outputs.len() == 2 && outputs[0] != outputs[1] {
            failed.push(format!("{name}: outputs differ"));
        }
    }
    check(
        failed.is_empty(),
        if failed.is_empty() { format!("{} subcommand runs", runs.len()) } else { failed.join("; ") },
    )
}

/// Analytic gradient against central differences; monotone training loss.
fn classifier_gradient() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let mut rng = oracles::rng(500 + seed);
        let (m, d, c) = (12, 5, 3);
        let x = Matrix::from_vec(m, d, (0..m * d).map(|_| rng.random_range(-2.0..2.0)).collect()).unwrap();
        let y: Vec<usize> = (0..m).map(|_| rng.random_range(0..c)).collect();
        let obj = LogRegObjective::new(&x, &y, c, 1.0 / m as f64);
        let w: Vec<f64> = (0..obj.num_params()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut grad = vec![0.0; w.len()];
        obj.value_and_gradient(&w, &mut grad);
        for k in 0..w.len() {
            let h = 1e-5;
            let (mut plus, mut minus) = (w.clone(), w.clone());
            plus[k] += h;
            minus[k] -= h;
            let fd = (obj.value(&plus) - obj.value(&minus)) / (2.0 * h);
            worst = worst.max((fd - grad[k]).abs() / grad[k].abs().max(fd.abs()).max(1e-3));
        }
    }

    let mut fixtures_checked = 0;
    let mut monotone = true;
    let mut train = |x: &Matrix, labels: &[String]| {
        for standardize in [false, true] {
            let cfg = LogRegConfig { standardize, ..LogRegConfig::default() };
            let model = train_logreg(x, labels, &cfg).unwrap();
            monotone &= model.summary().loss_history.windows(2).all(|w| w[1] <= w[0]);
            fixtures_checked += 1;
        }
    };
    for seed in 0..10 {
        let mut rng = oracles::rng(900 + seed);
        let x = Matrix::from_vec(40, 4, (0..160).map(|_| rng.random_range(-3.0..3.0)).collect()).unwrap();
        let labels: Vec<String> = (0..40).map(|_| format!("k{}", rng.random_range(0..3))).collect();
        train(&x, &labels);
    }
    for p in [fixtures::planted_sweep(), fixtures::planted_band()] {
        let train_set: Vec<_> = p.dataset.split(wordpca::datasets::Split::Train).collect();
        let mut x = Matrix::zeros(train_set.len(), p.embeddings.dim());
        for (i, r) in train_set.iter().enumerate() {
            x.row_mut(i).copy_from_slice(&wordpca::core::compose_sentence(&r.tokens, &p.embeddings));
        }
        let labels: Vec<String> = train_set.iter().map(|r| r.label.clone()).collect();
        train(&x, &labels);
    }
    check(
        worst <= 1e-5 && monotone,
        format!("max gradient rel err {worst:.2e}; loss non-increasing on {fixtures_checked} trainings: {monotone}"),
    )
}

fn brute_force_agreement() -> Outcome {
    let mut worst_rho = 0.0f64;
    for seed in 0..200 {
        let mut rng = oracles::rng(2000 + seed);
        let n = rng.random_range(3..40);
        // few distinct levels so ties are common
        let levels = rng.random_range(2..6);
        let xs: Vec<f64> = (0..n).map(|_| rng.random_range(0..levels) as f64).collect();
        let mut ys: Vec<f64> = (0..n).map(|_| rng.random_range(0..levels + 3) as f64 * 0.5).collect();
        if ys.iter().all(|y| *y == ys[0]) {
            ys[0] += 1.0;
        }
        if xs.iter().all(|x| *x == xs[0]) {
            continue;
        }
        let got = spearman(&xs, &ys).unwrap();
        worst_rho = worst_rho.max((got - oracles::brute_spearman(&xs, &ys)).abs());
        debug_assert_eq!(fractional_ranks(&xs), oracles::brute_ranks(&xs));
    }
    let mut worst_cos = 0.0f64;
    for seed in 0..200 {
        let mut rng = oracles::rng(3000 + seed);
        let d = rng.random_range(1..30);
        let u: Vec<f64> = (0..d).map(|_| rng.random_range(-5.0..5.0)).collect();
        let v: Vec<f64> = (0..d).map(|_| rng.random_range(-5.0..5.0)).collect();
        let a: f64 = rng.random_range(0.01..100.0);
        let base = cosine(&u, &v).unwrap();
        let scaled = cosine(&u.iter().map(|x| a * x).collect::<Vec<_>>(), &v).unwrap();
        let negated = cosine(&u.iter().map(|x| -x).collect::<Vec<_>>(), &v).unwrap();
        let swapped = cosine(&v, &u).unwrap();
        worst_cos = worst_cos.max((scaled - base).abs()).max((negated + base).abs()).max((swapped - base).abs());
    }
    check(
        worst_rho <= 1e-12 && worst_cos <= 1e-12,
        format!("max spearman err {worst_rho:.2e} over 200 tied inputs, max cosine invariant err {worst_cos:.2e}"),
    )
}

fn ulps_apart(a: f32, b: f32) -> u64 {
    let key = |v: f32| {
        let bits = i64::from(v.to_bits());
        if bits < 0x8000_0000 {
            bits
        } else {
            0x8000_0000 - bits
        }
    };
    (key(a) - key(b)).unsigned_abs()
}

fn format_round_trips() -> Outcome {
    let mut problems = Vec::new();
    for seed in 0..50 {
        let mut rng = oracles::rng(4000 + seed);
        let (n, d) = (rng.random_range(1..30), rng.random_range(1..12));
        let words = (0..n).map(|i| format!("t{seed}_{i}{}", ["", "é", "X", "'s"][i % 4]).into_bytes()).collect();
        let data = (0..n * d)
            .map(|_| match rng.random_range(0..4) {
                0 => rng.random_range(-1.0f32..1.0),
                1 => rng.random_range(-1.0f32..1.0) * 1e-30,
                2 => rng.random_range(-1.0f32..1.0) * 1e30,
                _ => f32::from_bits(rng.random::<u32>() & 0x7f7f_ffff),
            })
            .collect();
        let e = EmbeddingSet::new(words, d, data).unwrap();
        for format in EmbeddingFormat::ALL {
            let bytes = serialize_to_vec(&e, format).unwrap();
            let back = parse_embeddings(&bytes[..], format).unwrap();
            let ok = back.words() == e.words()
                && back.dim() == e.dim()
                && match format {
                    EmbeddingFormat::Word2vecBinary => back == e,
                    _ => back.as_slice().iter().zip(e.as_slice()).all(|(a, b)| ulps_apart(*a, *b) <= 1),
                };
            if !ok {
                problems.push(format!("seed {seed} {format}"));
            }
        }
    }
    check(problems.is_empty(), if problems.is_empty() { "50 sets × 3 formats".into() } else { problems.join(", ") })
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("1 PCA oracle equivalence", pca_oracle_equivalence),
        ("2 PPA invariants", ppa_invariants),
        ("3 energy partition", energy_partition),
        ("4 GloVe band variance shares", glove_band_shares),
        ("5a planted sweep plateau", sweep_plateau),
        ("5b planted band split", band_split),
        ("5c planted component probe", component_probe),
        ("5d shared-direction similarity", shared_direction),
        ("6 CLI determinism", cli_determinism),
        ("7 classifier gradient and loss", classifier_gradient),
        ("8 spearman and cosine oracles", brute_force_agreement),
        ("9 format round-trips", format_round_trips),
    ];
    let mut failures = 0;
    println!("\nacceptance criteria");
    for (name, run) in criteria {
        match run() {
            Pass(d) => println!("PASS {name}: {d}"),
            Skip(d) => println!("SKIP {name}: {d}"),
            Fail(d) => {
                failures += 1;
                println!("FAIL {name}: {d}");
            }
        }
    }
    println!("{failures} failed\n");
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
