//! Acceptance suite: one pass/fail line per criterion, non-zero exit if any fails.
//!
//! Runs without the libtest harness so the report is always printed.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::thread;
use std::time::{Duration, Instant};

use coot_core::apps::{
    cce, cocluster, election_distance, generate_blocks, hda, summary_update, BlockConfig, CoclusterConfig, Election,
    HdaConfig, LabelMatrix, Preset,
};
use coot_core::coot::{
    bap_oracle, coot_distance_checks, permutation_equal, solve_coot_multistart, solve_coot_restart, CootProblem,
};
use coot_core::gw::{
    dc_fw_step_comparison, gw_coot_equivalence_check, gw_coot_equivalence_matrices, sqeuclid_matrix, GwProblem,
    SimilarityKind, SimilarityMatrix,
};
use coot_core::ot::{exact_ot, sinkhorn, SINKHORN_MAX_ITER};
use coot_core::restart::{random_coupling, Sequential};
use coot_core::tensorcost::{contract_factored, contract_naive, Side};
use coot_core::{Histogram, Loss, Matrix};
use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (usize, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize, lo: f64, hi: f64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| r.random_range(lo..hi))
}

fn shuffled(r: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        p.swap(i, r.random_range(0..=i));
    }
    p
}

/// `min_{σ1,σ2} (1/(n d)) Σ L(X_ik, X'_{σ1(i) σ2(k)})` by itertools enumeration.
fn enumerate_bap(x: &Matrix, x2: &Matrix, loss: Loss) -> f64 {
    let (n, d) = x.shape();
    let mut best = f64::INFINITY;
    for rows in (0..n).permutations(n) {
        for cols in (0..d).permutations(d) {
            let mut s = 0.0;
            for i in 0..n {
                for k in 0..d {
                    s += loss.eval_unchecked(x[(i, k)], x2[(rows[i], cols[k])]);
                }
            }
            best = best.min(s);
        }
    }
    best / (n * d) as f64
}

fn enumerate_gw(c: &Matrix, c2: &Matrix) -> f64 {
    let n = c.rows();
    (0..n)
        .permutations(n)
        .map(|s| {
            let mut t = 0.0;
            for i in 0..n {
                for k in 0..n {
                    t += (c[(i, k)] - c2[(s[i], s[k])]).powi(2);
                }
            }
            t
        })
        .fold(f64::INFINITY, f64::min)
        / (n * n) as f64
}

fn pairwise_sq(p: &Matrix) -> Matrix {
    Matrix::from_fn(p.rows(), p.rows(), |i, j| {
        (0..p.cols()).map(|k| (p[(i, k)] - p[(j, k)]).powi(2)).sum()
    })
}

fn transport_cost(plan: &Matrix, cost: &Matrix) -> f64 {
    plan.as_slice().iter().zip(cost.as_slice()).map(|(p, c)| p * c).sum()
}

fn exact_ot_vs_enumeration() -> Outcome {
    let started = Instant::now();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in 1..=6 {
        let u = Histogram::uniform(n).unwrap();
        for seed in 0..20 {
            let cost = random_matrix(&mut rng(100 * n as u64 + seed), n, n, 0.0, 10.0);
            let got = exact_ot(&u, &u, &cost).unwrap().cost;
            let want = (0..n)
                .permutations(n)
                .map(|p| p.iter().enumerate().map(|(i, &j)| cost[(i, j)]).sum::<f64>())
                .fold(f64::INFINITY, f64::min)
                / n as f64;
            worst = worst.max((got - want).abs());
            count += 1;
        }
    }
    let t = started.elapsed();
    outcome(
        worst <= 1e-9 && t < Duration::from_secs(5),
        format!("{count} instances, max |gap| {worst:.1e}, {t:.2?}"),
    )
}

fn factored_vs_naive() -> Outcome {
    let started = Instant::now();
    let mut worst: f64 = 0.0;
    let mut rectangular = 0;
    for loss in [Loss::SquaredEuclidean, Loss::KullbackLeibler] {
        for seed in 0..50u64 {
            let mut r = rng(2000 + seed);
            let (n, d) = (r.random_range(2..12), r.random_range(2..10));
            // every other instance forces n ≠ n' and d ≠ d'
            let (n2, d2) = if seed % 2 == 0 {
                (n + 1 + seed as usize % 3, d + 2)
            } else {
                (r.random_range(2..12), r.random_range(2..10))
            };
            rectangular += usize::from(n != n2 && d != d2);
            let (lo, hi) = if loss == Loss::KullbackLeibler {
                (0.05, 4.0)
            } else {
                (-3.0, 3.0)
            };
            let x = random_matrix(&mut r, n, d, lo, hi);
            let x2 = random_matrix(&mut r, n2, d2, lo, hi);
            let pi_s = random_coupling(
                &Histogram::uniform(n).unwrap(),
                &Histogram::uniform(n2).unwrap(),
                &mut r,
            )
            .unwrap();
            let pi_v = random_coupling(
                &Histogram::uniform(d).unwrap(),
                &Histogram::uniform(d2).unwrap(),
                &mut r,
            )
            .unwrap();
            for (side, plan) in [(Side::FeatureSide, pi_s.plan()), (Side::SampleSide, pi_v.plan())] {
                let a = contract_factored(&x, &x2, plan, loss, side).unwrap().matrix;
                let b = contract_naive(&x, &x2, plan, loss, side).unwrap().matrix;
                worst = worst.max(a.max_abs_diff(&b).unwrap());
            }
        }
    }
    let t = started.elapsed();
    outcome(
        worst <= 1e-10 && rectangular >= 25 && t < Duration::from_secs(10),
        format!("100 instances ({rectangular} with n≠n' and d≠d'), max entry gap {worst:.1e}, {t:.2?}"),
    )
}

fn bcd_monotone() -> Outcome {
    let started = Instant::now();
    let mut worst_rise = f64::NEG_INFINITY;
    for seed in 0..100u64 {
        let mut r = rng(3000 + seed);
        let (n, d) = (r.random_range(2..=20), r.random_range(2..=15));
        let (n2, d2) = (r.random_range(2..=12), r.random_range(2..=10));
        let x = random_matrix(&mut r, n, d, -2.0, 2.0);
        let x2 = random_matrix(&mut r, n2, d2, -2.0, 2.0);
        let p = CootProblem::uniform(x, x2, Loss::SquaredEuclidean).unwrap();
        let sol = solve_coot_restart(&p, seed, (seed % 2) as usize).unwrap();
        for w in sol.objective_trace.windows(2) {
            worst_rise = worst_rise.max(w[1] - w[0]);
        }
    }
    let t = started.elapsed();
    outcome(
        worst_rise <= 1e-9 && t < Duration::from_secs(30),
        format!("100 instances, largest step increase {worst_rise:.1e}, {t:.2?}"),
    )
}

fn coot_oracle_equality() -> Outcome {
    let mut hits = 0;
    let mut below = 0;
    let mut oracle_gap: f64 = 0.0;
    for seed in 0..30u64 {
        let mut r = rng(4000 + seed);
        let x = random_matrix(&mut r, 3, 3, 0.0, 1.0);
        let x2 = random_matrix(&mut r, 3, 3, 0.0, 1.0);
        let oracle = bap_oracle(&x, &x2, Loss::SquaredEuclidean).unwrap().cost;
        oracle_gap = oracle_gap.max((oracle - enumerate_bap(&x, &x2, Loss::SquaredEuclidean)).abs());
        let p = CootProblem::uniform(x, x2, Loss::SquaredEuclidean).unwrap();
        let best = solve_coot_multistart(&p, 20, seed, &Sequential).unwrap().best.cost;
        hits += usize::from((best - oracle).abs() <= 1e-9);
        below += usize::from(best < oracle - 1e-9);
    }
    outcome(
        hits * 100 >= 95 * 30 && below == 0 && oracle_gap <= 1e-12,
        format!("{hits}/30 equal the oracle, {below} below it"),
    )
}

fn distance_axioms() -> Outcome {
    let mut r = rng(5000);
    let mut triples = Vec::new();
    for t in 0..50 {
        let a = random_matrix(&mut r, 3, 3, 0.0, 5.0);
        let b = if t % 4 == 0 {
            a.permuted(&shuffled(&mut r, 3), &shuffled(&mut r, 3)).unwrap()
        } else {
            random_matrix(&mut r, 3, 3, 0.0, 5.0)
        };
        let c = if t % 7 == 0 {
            b.clone()
        } else {
            random_matrix(&mut r, 3, 3, 0.0, 5.0)
        };
        triples.push([a, b, c]);
    }
    let report = coot_distance_checks(&triples, Loss::Absolute).unwrap();
    // independent recheck of "zero iff permutation-equal" on the first pair of each triple
    let mut disagreements = 0;
    for [a, b, _] in &triples {
        let zero = enumerate_bap(a, b, Loss::Absolute) <= 1e-12;
        disagreements += usize::from(zero != permutation_equal(a, b).unwrap());
    }
    outcome(
        report.holds() && disagreements == 0 && report.zero_pairs > 0,
        format!(
            "symmetry gap {:.1e}, {} zero pairs, {} identity and {} triangle violations",
            report.max_symmetry_gap,
            report.zero_pairs,
            report.identity_violations + disagreements,
            report.triangle_violations
        ),
    )
}

fn gw_coot_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..30u64 {
        let mut r = rng(6000 + seed);
        let p = random_matrix(&mut r, 3, 2, 0.0, 1.0);
        let p2 = random_matrix(&mut r, 3, 2, 0.0, 1.0);
        let (c, c2) = (pairwise_sq(&p), pairwise_sq(&p2));
        worst = worst.max((enumerate_gw(&c, &c2) - enumerate_bap(&c, &c2, Loss::SquaredEuclidean)).abs());
        let rep = gw_coot_equivalence_check(&p, &p2).unwrap();
        worst = worst.max((rep.gw_value - rep.coot_value).abs());
    }
    let mut violations = 0;
    for seed in 0..30u64 {
        let sym = |s: u64| {
            let a = random_matrix(&mut rng(s), 3, 3, -1.0, 2.0);
            SimilarityMatrix::new(
                Matrix::from_fn(3, 3, |i, j| a[(i.min(j), i.max(j))]),
                SimilarityKind::Generic,
            )
            .unwrap()
        };
        let (c, c2) = (sym(6100 + seed), sym(6200 + seed));
        let rep = gw_coot_equivalence_matrices(&c, &c2, Loss::SquaredEuclidean).unwrap();
        let direct = enumerate_bap(c.matrix(), c2.matrix(), Loss::SquaredEuclidean)
            <= enumerate_gw(c.matrix(), c2.matrix()) + 1e-9;
        violations += usize::from(!rep.coot_le_gw(1e-9) || !direct);
    }
    outcome(
        worst <= 1e-9 && violations == 0,
        format!("squared-Euclidean max |GW − COOT| {worst:.1e}; generic COOT > GW in {violations}/30"),
    )
}

fn dc_fw_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut plan_mismatches = 0;
    let mut steps = 0;
    for seed in 0..10u64 {
        let mut r = rng(7000 + seed);
        let n = 3 + seed as usize % 5;
        let c = sqeuclid_matrix(&random_matrix(&mut r, n, 2, 0.0, 1.0));
        let c2 = sqeuclid_matrix(&random_matrix(&mut r, n, 2, 0.0, 1.0));
        let problem = GwProblem::uniform(c, c2, Loss::SquaredEuclidean).unwrap();
        let u = Histogram::uniform(n).unwrap();
        let mut pi = random_coupling(&u, &u, &mut r).unwrap();
        // compare along a short DC trajectory
        for _ in 0..3 {
            let step = dc_fw_step_comparison(&problem, &pi).unwrap();
            for (g, d) in step.fw_gradient.as_slice().iter().zip(step.dc_cost.as_slice()) {
                worst = worst.max((g - 2.0 * d).abs());
            }
            plan_mismatches += usize::from(step.dc_plan.max_abs_diff(&step.fw_plan).unwrap() > 1e-12);
            steps += 1;
            pi = exact_ot(&u, &u, &step.dc_cost).unwrap().coupling;
        }
    }
    outcome(
        worst <= 1e-12 && plan_mismatches == 0,
        format!("{steps} steps, max |∇ − 2·cost| {worst:.1e}, {plan_mismatches} differing plans"),
    )
}

fn sinkhorn_contract() -> Outcome {
    let mut r = rng(8000);
    let cost = random_matrix(&mut r, 4, 4, 0.0, 1.0);
    let u = Histogram::uniform(4).unwrap();
    let exact = exact_ot(&u, &u, &cost).unwrap().cost;
    let mut costs = Vec::new();
    let mut worst_residual: f64 = 0.0;
    let mut all_converged = true;
    for eps in [1.0, 0.1, 0.01, 0.001] {
        let out = sinkhorn(&u, &u, &cost, eps, SINKHORN_MAX_ITER, 1e-9).unwrap();
        all_converged &= out.converged;
        worst_residual = worst_residual.max(out.coupling.residual());
        costs.push(transport_cost(out.coupling.plan(), &cost));
    }
    for seed in 0..10 {
        let mut r = rng(8100 + seed);
        let (n, m) = (r.random_range(2..9), r.random_range(2..9));
        let w = Histogram::normalized((0..n).map(|_| r.random_range(0.1..1.0)).collect()).unwrap();
        let w2 = Histogram::normalized((0..m).map(|_| r.random_range(0.1..1.0)).collect()).unwrap();
        let c = random_matrix(&mut r, n, m, 0.0, 1.0);
        let out = sinkhorn(&w, &w2, &c, 0.05, SINKHORN_MAX_ITER, 1e-9).unwrap();
        all_converged &= out.converged;
        worst_residual = worst_residual.max(out.coupling.residual());
    }
    let monotone = costs.windows(2).all(|w| w[1] <= w[0] + 1e-12) && costs.iter().all(|&c| c >= exact - 1e-12);
    let gap = costs[3] - exact;
    outcome(
        all_converged && worst_residual <= 1e-9 && monotone && gap <= 5e-3,
        format!("max residual {worst_residual:.1e}, costs {costs:.4?} → exact {exact:.4}, final gap {gap:.1e}"),
    )
}

fn d1_cocluster() -> Outcome {
    let started = Instant::now();
    let cfg = BlockConfig::preset(Preset::D1);
    let mut errors = Vec::new();
    for seed in 0..20u64 {
        let data = generate_blocks(&cfg, seed).unwrap();
        let out = cocluster(&data.x, &CoclusterConfig::new(cfg.g, cfg.m, seed)).unwrap();
        errors.push(cce(&out.row_labels, &data.true_rows, &out.col_labels, &data.true_cols).unwrap());
    }
    let t = started.elapsed();
    let mut sorted = errors.clone();
    sorted.sort_by(f64::total_cmp);
    let median = (sorted[9] + sorted[10]) / 2.0;
    let good = errors.iter().filter(|&&e| e <= 0.05).count();
    outcome(
        median <= 0.02 && good * 100 >= 80 * 20 && t < Duration::from_secs(300),
        format!(
            "median CCE {median:.4}, {good}/20 seeds ≤ 0.05, worst {:.4}, {t:.1?}",
            sorted[19]
        ),
    )
}

fn other_presets_report() -> String {
    [Preset::D2, Preset::D3, Preset::D4]
        .into_iter()
        .map(|p| {
            let started = Instant::now();
            let cfg = BlockConfig::preset(p);
            let data = generate_blocks(&cfg, 0).unwrap();
            let out = cocluster(&data.x, &CoclusterConfig::new(cfg.g, cfg.m, 0)).unwrap();
            let e = cce(&out.row_labels, &data.true_rows, &out.col_labels, &data.true_cols).unwrap();
            format!("{p:?} CCE {e:.3} ({:.1?})", started.elapsed())
        })
        .join(", ")
}

fn xc_least_squares() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..20u64 {
        let mut r = rng(10_000 + seed);
        let x = random_matrix(&mut r, 6, 4, -3.0, 3.0);
        let pi_s = random_coupling(&Histogram::uniform(6).unwrap(), &Histogram::uniform(2).unwrap(), &mut r).unwrap();
        let pi_v = random_coupling(&Histogram::uniform(4).unwrap(), &Histogram::uniform(2).unwrap(), &mut r).unwrap();
        let closed = summary_update(&x, pi_s.plan(), pi_v.plan()).unwrap();
        // dense weighted least squares, one row per (i, j, k, l)
        let mut a = DMatrix::<f64>::zeros(6 * 2 * 4 * 2, 4);
        let mut b = DVector::<f64>::zeros(6 * 2 * 4 * 2);
        let mut row = 0;
        for i in 0..6 {
            for j in 0..2 {
                for k in 0..4 {
                    for l in 0..2 {
                        let w = (pi_s.plan()[(i, j)] * pi_v.plan()[(k, l)]).sqrt();
                        a[(row, j * 2 + l)] = w;
                        b[row] = w * x[(i, k)];
                        row += 1;
                    }
                }
            }
        }
        let sol = a.svd(true, true).solve(&b, 1e-14).unwrap();
        for j in 0..2 {
            for l in 0..2 {
                worst = worst.max((closed[(j, l)] - sol[j * 2 + l]).abs());
            }
        }
    }
    outcome(worst <= 1e-10, format!("20 coupling pairs, max gap {worst:.1e}"))
}

fn hda_pipeline() -> Outcome {
    let mut plain = 0;
    let mut masked = 0;
    for seed in 0..20u64 {
        let mut r = rng(11_000 + seed);
        let (n, d) = (r.random_range(2..=4), r.random_range(2..=4));
        let xs = random_matrix(&mut r, n, d, 0.0, 1.0);
        let rows = shuffled(&mut r, n);
        let xt = xs.permuted(&rows, &shuffled(&mut r, d)).unwrap();
        let classes: Vec<usize> = (0..n).map(|i| i % 2).collect();
        let ys = LabelMatrix::from_classes(&classes).unwrap();
        let truth: Vec<Option<usize>> = rows.iter().map(|&i| Some(classes[i])).collect();
        let out = hda(&xs, &xt, &ys, None, &HdaConfig::new(20, seed), &Sequential).unwrap();
        plain += usize::from(out.propagation.labels == truth);

        let mut partial = vec![None; n];
        for class in 0..2 {
            let j = truth.iter().position(|&t| t == Some(class)).unwrap();
            partial[j] = Some(class);
        }
        let yt = LabelMatrix::new(partial, 2).unwrap();
        let out = hda(&xs, &xt, &ys, Some(&yt), &HdaConfig::new(20, seed), &Sequential).unwrap();
        masked += usize::from(out.propagation.labels == truth);
    }
    outcome(
        plain == 20 && masked == 20,
        format!("all labels recovered in {plain}/20 plain, {masked}/20 masked"),
    )
}

fn election_enumeration() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut solver_exact = 0;
    for seed in 0..20u64 {
        let mut r = rng(12_000 + seed);
        let e = Election::from_orders(&(0..3).map(|_| shuffled(&mut r, 3)).collect::<Vec<_>>()).unwrap();
        let e2 = Election::from_orders(&(0..3).map(|_| shuffled(&mut r, 3)).collect::<Vec<_>>()).unwrap();
        let (a, b) = (e.positions(), e2.positions());
        let mut want = f64::INFINITY;
        for nu in (0..3).permutations(3) {
            for sigma in (0..3).permutations(3) {
                let mut s = 0.0;
                for i in 0..3 {
                    for k in 0..3 {
                        s += (a[(i, k)] - b[(nu[i], sigma[k])]).abs();
                    }
                }
                want = want.min(s);
            }
        }
        let got = election_distance(&e, &e2, 20, seed, &Sequential).unwrap();
        worst = worst.max((got.value - want).abs());
        solver_exact += usize::from((got.solver_value - want).abs() <= 1e-9);
    }
    outcome(
        worst <= 1e-9,
        format!("max gap {worst:.1e}; solver alone exact on {solver_exact}/20"),
    )
}

fn cli_determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let mut r = rng(13_000);
    let save = |name: &str, m: &Matrix| coot_cli::io::write_matrix(&d.join(name), m).unwrap();
    save("a.csv", &random_matrix(&mut r, 9, 6, 0.0, 1.0));
    save("b.csv", &random_matrix(&mut r, 7, 5, 0.0, 1.0));
    fs::write(
        d.join("ys.csv"),
        (0..9).map(|i| format!("{}\n", i % 3)).collect::<String>(),
    )
    .unwrap();
    let runs: [(&str, Vec<&str>); 4] = [
        (
            "coot",
            vec![
                "coot",
                "--x",
                "a.csv",
                "--y",
                "b.csv",
                "--seed",
                "5",
                "--restarts",
                "12",
                "--eps2",
                "0.5",
            ],
        ),
        (
            "gw",
            vec!["gw", "--x", "a.csv", "--y", "b.csv", "--seed", "5", "--restarts", "12"],
        ),
        (
            "hda",
            vec![
                "hda",
                "--xs",
                "a.csv",
                "--xt",
                "b.csv",
                "--ys",
                "ys.csv",
                "--seed",
                "5",
                "--restarts",
                "12",
            ],
        ),
        (
            "cocluster",
            vec!["cocluster", "--x", "a.csv", "-g", "3", "-m", "2", "--seed", "5"],
        ),
    ];
    let mut compared = 0;
    let mut mismatches = Vec::new();
    for (name, args) in &runs {
        let mut outputs = Vec::new();
        for (tag, jobs) in [("j1a", "1"), ("j1b", "1"), ("j4", "4")] {
            let out_dir = format!("{name}_{tag}");
            let status = Command::new(env!("CARGO_BIN_EXE_cootkit"))
                .current_dir(d)
                .args(args)
                .args(["--jobs", jobs, "--allow-maxiter", "--out", &out_dir])
                .output()
                .unwrap();
            if !status.status.success() {
                return outcome(
                    false,
                    format!(
                        "{name} --jobs {jobs} failed: {}",
                        String::from_utf8_lossy(&status.stderr)
                    ),
                );
            }
            outputs.push(csv_artifacts(&d.join(&out_dir)));
        }
        for other in &outputs[1..] {
            compared += other.len();
            if *other != outputs[0] || other.is_empty() {
                mismatches.push(*name);
            }
        }
    }
    outcome(
        mismatches.is_empty(),
        format!("{compared} CSV files compared byte-for-byte across runs and --jobs 1/4; mismatches: {mismatches:?}"),
    )
}

fn csv_artifacts(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    // the report's cost field must also agree
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    files.push(("report.cost".into(), report["cost"].to_string().into_bytes()));
    files
}

fn main() {
    // `cargo test -- --list` and filters are harness conventions; keep listing cheap
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let started = Instant::now();
    let slow = thread::spawn(d1_cocluster);
    let report_only = thread::spawn(other_presets_report);

    let criteria: [Criterion; 11] = [
        (1, "exact OT equals assignment enumeration", exact_ot_vs_enumeration),
        (2, "factored contraction equals naive", factored_vs_naive),
        (3, "exact BCD objective never increases", bcd_monotone),
        (4, "restarted BCD reaches the permutation oracle", coot_oracle_equality),
        (5, "metric axioms on the oracle", distance_axioms),
        (6, "GW equals COOT on squared distances, COOT ≤ GW", gw_coot_equivalence),
        (7, "DC and unit-step Frank-Wolfe costs differ by 2", dc_fw_identity),
        (8, "Sinkhorn residual and eps limit", sinkhorn_contract),
        (10, "summary update is the least-squares minimizer", xc_least_squares),
        (11, "HDA recovers labels of permuted targets", hda_pipeline),
        (12, "election distance equals enumeration", election_enumeration),
    ];
    let mut results: Vec<(usize, &str, Outcome)> = criteria.iter().map(|&(id, name, f)| (id, name, f())).collect();
    results.push((13, "CLI artifacts are deterministic", cli_determinism()));
    results.push((9, "D1 co-clustering", slow.join().unwrap()));
    results.sort_by_key(|r| r.0);

    println!();
    let mut failed = 0;
    for (id, name, o) in &results {
        println!(
            "criterion {id:>2} {}: {name} ({})",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!("reported only, not gated: {}", report_only.join().unwrap());
    println!(
        "{} passed, {failed} failed, {:.1?}",
        results.len() - failed,
        started.elapsed()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
