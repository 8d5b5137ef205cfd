//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use ppp_cli::config::RunConfig;
use ppp_cli::fit::{fit_rows, FitRow};
use ppp_cli::metaling::{metaling_rows, MetalingOptions, MetalingRow, Task, BASELINE_PROMPT};
use ppp_cli::synth::{generate, SynthFiles, SynthOptions};
use ppp_core::metrics::{
    read_dump, renyi_entropy, shannon_entropy, write_dump, Metric, ProbabilityVector, SubwordScore,
};
use ppp_core::regression::{fit_design, ppp, Design};
use ppp_core::stats::{binomial_test, mann_whitney_exact_p, mann_whitney_u, spearman};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rayon::prelude::*;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

// Entropy math

fn random_simplex(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let k = rng.random_range(1..=64);
    let mut w: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
    if rng.random_bool(0.3) {
        for v in w.iter_mut().take(k / 3) {
            *v = 0.0;
        }
    }
    if w.iter().all(|&v| v == 0.0) {
        w[0] = 1.0;
    }
    let total: f64 = w.iter().sum();
    w.iter().map(|v| v / total).collect()
}

fn entropy_math() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let vectors: Vec<Vec<f64>> = (0..10_000).map(|_| random_simplex(&mut rng)).collect();
    let alphas = [0.1, 0.5, 0.9, 1.0 - 1e-7, 1.0 + 1e-7, 1.5, 2.0, 5.0];

    let start = Instant::now();
    let mut worst_limit = 0.0f64;
    let mut monotone_violations = 0;
    for p in &vectors {
        let pv = ProbabilityVector::new(p.clone()).map_err(err)?;
        let h = shannon_entropy(&pv);
        let mut prev = f64::INFINITY;
        for &a in &alphas {
            let r = renyi_entropy(&pv, a).map_err(err)?;
            if (a - 1.0).abs() < 1e-6 {
                worst_limit = worst_limit.max((r - h).abs());
            }
            if r > prev + 1e-12 {
                monotone_violations += 1;
            }
            prev = r;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();

    let mut worst_uniform = 0.0f64;
    for k in [1usize, 2, 3, 7, 10, 64, 100, 1000, 3397, 4096] {
        let pv = ProbabilityVector::new(vec![1.0 / k as f64; k]).map_err(err)?;
        let expected = (k as f64).log2();
        worst_uniform = worst_uniform.max((shannon_entropy(&pv) - expected).abs());
        for a in [0.05, 0.5, 2.0, 2.11, 10.0] {
            worst_uniform = worst_uniform.max((renyi_entropy(&pv, a).map_err(err)? - expected).abs());
        }
    }
    check(
        worst_limit < 1e-5 && monotone_violations == 0 && worst_uniform <= 1e-12 && elapsed < 1.0,
        format!(
            "limit max|Δ|={worst_limit:.2e}, monotonicity violations={monotone_violations}, \
             uniform max|Δ|={worst_uniform:.2e}, 10^4 vectors in {elapsed:.3}s"
        ),
    )
}

// Regression oracle

fn oracle_ols(x: &[Vec<f64>], y: &[f64]) -> (Vec<f64>, f64) {
    let p = x[0].len();
    let mut a = vec![vec![0.0; p + 1]; p];
    for (row, &yi) in x.iter().zip(y) {
        for i in 0..p {
            for j in 0..p {
                a[i][j] += row[i] * row[j];
            }
            a[i][p] += row[i] * yi;
        }
    }
    for col in 0..p {
        let piv = (col..p)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        for r in 0..p {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=p {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    let beta: Vec<f64> = (0..p).map(|i| a[i][p] / a[i][i]).collect();
    let rss = x
        .iter()
        .zip(y)
        .map(|(row, yi)| (yi - row.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>()).powi(2))
        .sum();
    (beta, rss)
}

fn oracle_loglik(rss: f64, n: usize) -> f64 {
    let n = n as f64;
    -0.5 * n * (2.0 * std::f64::consts::PI * rss / n).ln() - 0.5 * n
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn regression_oracle() -> Outcome {
    let mut mismatches = 0;
    let mut min_ppp = f64::INFINITY;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = rng.random_range(2..=9);
        let n = rng.random_range(p + 3..=50);
        let preds: Vec<Vec<f64>> = (0..p - 1)
            .map(|_| {
                (0..n)
                    .map(|_| 3.0 * rng.sample::<f64, _>(StandardNormal) + 5.0)
                    .collect()
            })
            .collect();
        let y: Vec<f64> = (0..n)
            .map(|i| {
                let signal: f64 = preds.iter().enumerate().map(|(j, c)| (j as f64 - 2.0) * c[i]).sum();
                100.0 + signal + 10.0 * rng.sample::<f64, _>(StandardNormal)
            })
            .collect();
        let names: Vec<String> = (1..p).map(|j| format!("x{j}")).collect();
        let cols: Vec<(&str, &[f64])> = names
            .iter()
            .map(String::as_str)
            .zip(preds.iter().map(Vec::as_slice))
            .collect();

        let full_design = Design::with_intercept(&cols).map_err(err)?;
        let base_design = if p == 2 {
            Design::intercept(n)
        } else {
            Design::with_intercept(&cols[..p - 2]).map_err(err)?
        };
        let full = fit_design(&full_design, &y).map_err(err)?;
        let base = fit_design(&base_design, &y).map_err(err)?;

        let dense = |d: &Design| -> Vec<Vec<f64>> { (0..n).map(|i| d.x.row(i).iter().copied().collect()).collect() };
        let (beta_f, rss_f) = oracle_ols(&dense(&full_design), &y);
        let (beta_b, rss_b) = oracle_ols(&dense(&base_design), &y);
        let ll_f = oracle_loglik(rss_f, n);
        let ll_b = oracle_loglik(rss_b, n);
        let gain = ppp(&base, &full).map_err(err)?;

        let coeff_ok = full
            .coefficients
            .iter()
            .zip(&beta_f)
            .all(|(a, b)| rel_close(*a, *b, 1e-8))
            && base
                .coefficients
                .iter()
                .zip(&beta_b)
                .all(|(a, b)| rel_close(*a, *b, 1e-8));
        let fit_ok = rel_close(full.rss, rss_f, 1e-8)
            && rel_close(base.rss, rss_b, 1e-8)
            && rel_close(full.loglik, ll_f, 1e-8)
            && rel_close(base.loglik, ll_b, 1e-8);
        let ppp_ok = (gain - (ll_f - ll_b) / n as f64).abs() <= 1e-8;
        if !(coeff_ok && fit_ok && ppp_ok) {
            mismatches += 1;
        }
        min_ppp = min_ppp.min(gain);
    }
    check(
        mismatches == 0 && min_ppp >= -1e-12,
        format!("100 instances, {mismatches} oracle mismatches, min ppp={min_ppp:.3e}"),
    )
}

// End-to-end synthetic recovery

fn synth_config(files: &SynthFiles) -> Result<RunConfig, String> {
    RunConfig::load(&files.config).map_err(err)
}

fn surprisal_row(rows: &[FitRow]) -> Result<&FitRow, String> {
    rows.iter()
        .find(|r| r.metric == "surprisal")
        .ok_or_else(|| "no surprisal row".to_string())
}

fn synthetic_recovery(scratch: &Path) -> Outcome {
    let start = Instant::now();
    let dir = scratch.join("recovery");
    let files = generate(
        &SynthOptions {
            seed: 2024,
            ..Default::default()
        },
        &dir,
    )
    .map_err(err)?;
    let cfg = synth_config(&files)?;
    let (rows, _) = fit_rows(&cfg, 4).map_err(err)?;
    let row = surprisal_row(&rows)?;
    let elapsed = start.elapsed().as_secs_f64();
    let (f_p, t_p) = (row.f_p.unwrap_or(1.0), row.t_p.unwrap_or(1.0));

    let null_start = Instant::now();
    let above = (0..100u64)
        .into_par_iter()
        .map(|seed| -> Result<bool, String> {
            let dir = scratch.join(format!("null{seed}"));
            let files = generate(
                &SynthOptions {
                    seed,
                    null: true,
                    ..Default::default()
                },
                &dir,
            )
            .map_err(err)?;
            let mut cfg = synth_config(&files)?;
            cfg.metrics = vec![Metric::Surprisal];
            let (rows, _) = fit_rows(&cfg, 1).map_err(err)?;
            fs::remove_dir_all(&dir).map_err(err)?;
            Ok(surprisal_row(&rows)?.f_p.is_some_and(|p| p > 0.05))
        })
        .collect::<Result<Vec<bool>, String>>()?
        .into_iter()
        .filter(|&b| b)
        .count();
    let null_elapsed = null_start.elapsed().as_secs_f64();
    check(
        files.n_words == 2000 && f_p < 1e-3 && t_p < 1e-3 && above >= 90 && elapsed < 30.0,
        format!(
            "{} words, f_p={f_p:.2e}, t_p={t_p:.2e} in {elapsed:.2}s; null f_p>0.05 in {above}/100 seeds ({null_elapsed:.1}s)",
            files.n_words
        ),
    )
}

// PPL resegmentation

/// Rewrites a dump so each word is a single piece, or two equal halves,
/// carrying the same cumulative log-probability.
fn resegment(src: &Path, dst: &Path, halves: bool) -> Result<(), String> {
    let mut dump = read_dump(src).map_err(err)?;
    for rec in &mut dump.records {
        let total: f64 = rec.subwords.iter().map(|s| s.logprob_nat).sum();
        let piece: String = rec.subwords.iter().map(|s| s.piece.as_str()).collect();
        let shannon = rec.subwords.iter().map(|s| s.shannon_nat).sum::<Option<f64>>();
        let mut renyi = BTreeMap::new();
        for a in rec.subwords[0].renyi_nat.keys() {
            if let Some(v) = rec.subwords.iter().map(|s| s.renyi_nat.get(a)).sum::<Option<f64>>() {
                renyi.insert(*a, v);
            }
        }
        rec.subwords = if halves {
            let cut = piece.char_indices().nth(1).map_or(piece.len(), |(i, _)| i);
            let half = |p: &str| SubwordScore {
                piece: p.to_string(),
                logprob_nat: total / 2.0,
                shannon_nat: shannon.map(|h| h / 2.0),
                renyi_nat: renyi.iter().map(|(a, v)| (*a, v / 2.0)).collect(),
            };
            vec![half(&piece[..cut]), half(&piece[cut..])]
        } else {
            vec![SubwordScore {
                piece,
                logprob_nat: total,
                shannon_nat: shannon,
                renyi_nat: renyi,
            }]
        };
    }
    write_dump(fs::File::create(dst).map_err(err)?, &dump).map_err(err)
}

fn ppl_resegmentation(scratch: &Path) -> Outcome {
    let dir = scratch.join("reseg");
    let files = generate(
        &SynthOptions {
            seed: 5,
            ..Default::default()
        },
        &dir,
    )
    .map_err(err)?;
    resegment(&files.dump, &dir.join("merged.jsonl"), false)?;
    resegment(&files.dump, &dir.join("halves.jsonl"), true)?;
    let mut ppls = Vec::new();
    for name in ["dump.jsonl", "merged.jsonl", "halves.jsonl"] {
        let mut cfg = synth_config(&files)?;
        cfg.dumps = vec![PathBuf::from(name)];
        cfg.metrics = vec![Metric::Surprisal];
        let (rows, _) = fit_rows(&cfg, 1).map_err(err)?;
        ppls.push(surprisal_row(&rows)?.ppl.ok_or("no ppl")?);
    }
    let identical = ppls.iter().all(|p| p.to_bits() == ppls[0].to_bits());
    check(identical, format!("corpus PPL under three segmentations: {ppls:?}"))
}

// Statistics

fn statistics() -> Outcome {
    let b34 = binomial_test(32, 34, 0.5).map_err(err)?;
    let b468 = binomial_test(448, 468, 0.5).map_err(err)?;

    // Every split of ranks 1..=20 into two groups of ten.
    let mut worst = 0.0f64;
    for mask in 0u32..(1 << 20) {
        if mask.count_ones() != 10 {
            continue;
        }
        let (a, b): (Vec<f64>, Vec<f64>) = (0..20).map(|i| (i as f64, mask >> i & 1 == 1)).fold(
            (Vec::new(), Vec::new()),
            |(mut a, mut b), (v, in_a)| {
                if in_a {
                    a.push(v)
                } else {
                    b.push(v)
                }
                (a, b)
            },
        );
        let approx = mann_whitney_u(&a, &b).map_err(err)?;
        let exact = mann_whitney_exact_p(approx.u as usize, 10, 10);
        worst = worst.max((exact - approx.p_value).abs());
    }

    let rho = spearman(&[1.0, 2.0, 3.0, 4.0], &[2.0, 1.0, 3.0, 4.0]).map_err(err)?;
    check(
        (b34 - 6.94e-8).abs() <= 1e-10 && b34 < 1e-7 && b468 < 1e-105 && worst < 0.02 && rho == 1.0 - 6.0 * 2.0 / 60.0,
        format!(
            "binom(32,34)={b34:.4e}, binom(448,468)={b468:.3e}, MWU 10+10 max|exact-normal|={worst:.4}, spearman={rho}"
        ),
    )
}

// Metalinguistic pipeline

fn options(task: Task) -> MetalingOptions {
    MetalingOptions {
        task,
        first_k: None,
        default_model: "stub".into(),
        default_prompt: "none".into(),
    }
}

fn find<'a>(rows: &'a [MetalingRow], prompt: &str) -> Result<&'a MetalingRow, String> {
    rows.iter()
        .find(|r| r.prompt_id == prompt)
        .ok_or_else(|| format!("no {prompt} row"))
}

fn metalinguistic(scratch: &Path) -> Outcome {
    let dir = scratch.join("metaling");
    let files = generate(
        &SynthOptions {
            seed: 11,
            ..Default::default()
        },
        &dir,
    )
    .map_err(err)?;
    let cfg = synth_config(&files)?;
    let rows = metaling_rows(
        &cfg,
        std::slice::from_ref(&files.transcripts_perfect),
        &options(Task::Cost),
    )
    .map_err(err)?;
    let perfect = find(&rows, "perfect")?;
    let perfect_ok = perfect.mean_rho == 1.0 && perfect.sd_rho == Some(0.0);

    let mut small = 0;
    let mut baseline = Vec::new();
    let mut random = Vec::new();
    for seed in 0..100u64 {
        let dir = scratch.join(format!("ml{seed}"));
        let files = generate(
            &SynthOptions {
                seed: 1000 + seed,
                words: 300,
                ..Default::default()
            },
            &dir,
        )
        .map_err(err)?;
        let cfg = synth_config(&files)?;
        let rows = metaling_rows(
            &cfg,
            std::slice::from_ref(&files.transcripts_random),
            &options(Task::Cost),
        )
        .map_err(err)?;
        let r = find(&rows, "random")?.mean_rho;
        if r.abs() < 0.1 {
            small += 1;
        }
        if seed < 10 {
            random.push(r);
            baseline.push(find(&rows, BASELINE_PROMPT)?.mean_rho);
        }
        fs::remove_dir_all(&dir).map_err(err)?;
    }
    let mwu = mann_whitney_u(&baseline, &random).map_err(err)?;
    let beats = mwu.p_value < 0.01 && baseline.iter().sum::<f64>() > random.iter().sum::<f64>();
    check(
        perfect_ok && small >= 95 && beats,
        format!(
            "perfect ρ={} sd={:?}; random |ρ|<0.1 in {small}/100 seeds; baseline vs random MWU p={:.2e}",
            perfect.mean_rho, perfect.sd_rho, mwu.p_value
        ),
    )
}

// Determinism

fn run_ppp(args: &[&str], cwd: &Path, out_dir: &Path) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_ppp"))
        .args(args)
        .current_dir(cwd)
        .env("PPP_OUTPUT_DIR", out_dir)
        .env("RUST_LOG", "error")
        .output()
        .map_err(err)?;
    if !out.status.success() {
        return Err(format!(
            "ppp {} failed: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(out.stdout)
}

/// Every file under `dir`, relative path to contents.
fn snapshot(dir: &Path) -> Result<BTreeMap<PathBuf, Vec<u8>>, String> {
    let mut files = BTreeMap::new();
    if !dir.exists() {
        return Ok(files);
    }
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).map_err(err)? {
            let path = entry.map_err(err)?.path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).map_err(err)?.to_path_buf();
                files.insert(rel, fs::read(&path).map_err(err)?);
            }
        }
    }
    Ok(files)
}

fn determinism(scratch: &Path) -> Outcome {
    let root = scratch.join("det");
    fs::create_dir_all(&root).map_err(err)?;
    let mut differing = Vec::new();
    let mut compared = 0;

    // synth twice into separate directories.
    let mut synth_snaps = Vec::new();
    for run in ["a", "b"] {
        let dir = root.join(format!("synth_{run}"));
        run_ppp(
            &["--seed", "3", "synth", "--out", dir.to_str().unwrap()],
            &root,
            &root.join("unused"),
        )?;
        synth_snaps.push(snapshot(&dir)?);
    }
    compared += 1;
    if synth_snaps[0] != synth_snaps[1] {
        differing.push("synth".to_string());
    }

    // Three more models so the comparison has enough points.
    for (i, model) in ["m1", "m2", "m3"].iter().enumerate() {
        let dir = root.join(model);
        let seed = (10 + i).to_string();
        run_ppp(
            &[
                "--seed",
                &seed,
                "synth",
                "--out",
                dir.to_str().unwrap(),
                "--model-id",
                model,
            ],
            &root,
            &root.join("unused"),
        )?;
    }
    fs::write(
        root.join("flags.tsv"),
        "model_id\tinstruction_tuned\tprompt_id\nstub\tfalse\tnone\nm1\tfalse\tnone\nm2\tfalse\tnone\nm3\ttrue\tnone\n",
    )
    .map_err(err)?;
    fs::write(root.join("text.txt"), "the cat sat on the mat\nma ke bu\n").map_err(err)?;

    let cfg = root.join("synth_a/config.toml");
    let cfg = cfg.to_str().unwrap();
    for model in ["m1", "m2", "m3"] {
        let c = root.join(model).join("config.toml");
        run_ppp(
            &["-c", c.to_str().unwrap(), "fit", "--workers", "2"],
            &root,
            &root.join(model).join("fit"),
        )?;
    }
    let fits: Vec<String> = ["m1", "m2", "m3"]
        .iter()
        .map(|m| root.join(m).join("fit/fit.tsv").to_string_lossy().into_owned())
        .collect();

    let own_fit = |out: &Path| out.join("fit.tsv").to_string_lossy().into_owned();
    let cases: Vec<(&str, Vec<Vec<String>>)> = vec![
        ("validate", vec![vec!["validate".into()]; 2]),
        ("score", vec![vec!["score".into()]; 2]),
        (
            "fit",
            vec![
                vec!["fit".into(), "--workers".into(), "1".into()],
                vec!["fit".into(), "--workers".into(), "4".into()],
                vec!["fit".into(), "--workers".into(), "4".into()],
            ],
        ),
        (
            "metaling",
            vec![
                vec![
                    "metaling".into(),
                    "--transcripts".into(),
                    "transcripts_perfect.jsonl".into(),
                    "transcripts_random.jsonl".into()
                ];
                2
            ],
        ),
        (
            "metaling probability",
            vec![
                vec![
                    "metaling".into(),
                    "--task".into(),
                    "probability".into(),
                    "--first-k".into(),
                    "3".into(),
                    "--transcripts".into(),
                    "transcripts_random.jsonl".into(),
                ];
                2
            ],
        ),
        (
            "textstats",
            vec![
                vec![
                    "textstats".into(),
                    "--text".into(),
                    root.join("text.txt").to_string_lossy().into_owned()
                ];
                2
            ],
        ),
    ];
    let synth_dir = root.join("synth_a");
    for (name, runs) in &cases {
        let mut snaps = Vec::new();
        for (i, args) in runs.iter().enumerate() {
            let out = root.join(format!("out_{}_{i}", name.replace(' ', "_")));
            let mut full = vec!["-c", cfg];
            full.extend(args.iter().map(String::as_str));
            let stdout = run_ppp(&full, &synth_dir, &out)?;
            // The fit summary names the output path, which differs per run.
            let stdout: Vec<u8> = String::from_utf8_lossy(&stdout)
                .lines()
                .filter(|l| !l.starts_with("wrote "))
                .flat_map(|l| format!("{l}\n").into_bytes())
                .collect();
            snaps.push((stdout, snapshot(&out)?));
        }
        compared += 1;
        if snaps.windows(2).any(|w| w[0] != w[1]) {
            differing.push(name.to_string());
        }
    }

    // compare across reruns and input order.
    let stub_fit = own_fit(&root.join("out_fit_0"));
    let mut snaps = Vec::new();
    for (i, order) in [[0usize, 1, 2, 3], [3, 2, 1, 0]].iter().enumerate() {
        let all: Vec<&str> = std::iter::once(stub_fit.as_str())
            .chain(fits.iter().map(String::as_str))
            .collect();
        let ordered: Vec<&str> = order.iter().map(|&j| all[j]).collect();
        let out = root.join(format!("out_compare_{i}"));
        let mut args = vec!["-c", cfg, "compare", "--flags", "flags.tsv", "--fit"];
        args.extend(ordered);
        run_ppp(&args, &root, &out)?;
        snaps.push(snapshot(&out)?);
    }
    compared += 1;
    if snaps[0] != snaps[1] {
        differing.push("compare".into());
    }
    let tradeoff = String::from_utf8_lossy(&snaps[0][Path::new("tradeoff.tsv")]).into_owned();
    let fitted = tradeoff.lines().filter(|l| l.ends_with("\tok")).count();

    check(
        differing.is_empty() && fitted == 3,
        format!(
            "{compared} subcommand groups byte-compared, differing: {differing:?}; {fitted} trade-off cells fitted"
        ),
    )
}

fn main() {
    let scratch = tempfile::tempdir().expect("scratch directory");
    let scratch = scratch.path();
    let criteria: Vec<Criterion> = vec![
        ("entropy math", Box::new(entropy_math)),
        ("regression oracle", Box::new(regression_oracle)),
        (
            "end-to-end synthetic recovery",
            Box::new(|| synthetic_recovery(scratch)),
        ),
        (
            "PPL resegmentation invariance",
            Box::new(|| ppl_resegmentation(scratch)),
        ),
        ("statistics", Box::new(statistics)),
        ("metalinguistic pipeline", Box::new(|| metalinguistic(scratch))),
        ("determinism", Box::new(|| determinism(scratch))),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        match run() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
