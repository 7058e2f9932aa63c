use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use coot_core::apps::{
    cce, cocluster, election_distance, generate_blocks, hda, unequal_proportions, BlockConfig, CoclusterConfig,
    Election, HdaConfig, Penalty, Preset,
};
use coot_core::coot::{solve_coot_multistart, CootProblem};
use coot_core::gw::{solve_gw_multistart, sqeuclid_matrix, GwProblem, SimilarityKind, SimilarityMatrix};
use coot_core::{Histogram, Loss, Matrix};
use serde_json::json;

use crate::args::{CoclusterArgs, Command, CootArgs, ElectionArgs, GenArgs, GwArgs, GwInput, HdaArgs, SolverArgs};
use crate::error::{CliError, CliResult};
use crate::io::{label_matrices, read_labels, read_matrix, read_weights, write_labels, write_matrix};
use crate::pgm::export_heatmap;
use crate::report::RunReport;
use crate::runner::Runner;

/// Runs a subcommand and returns its report along with whether a
/// non-converged result is acceptable.
pub fn execute(command: Command) -> CliResult<(RunReport, bool)> {
    match command {
        Command::Coot(a) => cmd_coot(&a).map(|r| (r, a.solver.allow_maxiter)),
        Command::Gw(a) => cmd_gw(&a).map(|r| (r, a.solver.allow_maxiter)),
        Command::Cocluster(a) => cmd_cocluster(&a).map(|r| (r, a.solver.allow_maxiter)),
        Command::Hda(a) => cmd_hda(&a).map(|r| (r, a.solver.allow_maxiter)),
        Command::Election(a) => cmd_election(&a).map(|r| (r, a.solver.allow_maxiter)),
        Command::Gen(a) => cmd_gen(&a).map(|r| (r, true)),
    }
}

fn prepare_out(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn runner(solver: &SolverArgs) -> CliResult<Runner> {
    if solver.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    Runner::with_jobs(solver.jobs).map_err(|e| CliError::Usage(format!("cannot start {} threads: {e}", solver.jobs)))
}

fn check_restarts(restarts: usize) -> CliResult<()> {
    if restarts == 0 {
        return Err(CliError::Usage("--restarts must be at least 1".into()));
    }
    Ok(())
}

fn weights_or_uniform(path: Option<&PathBuf>, n: usize) -> CliResult<Histogram> {
    match path {
        Some(p) => {
            let h = read_weights(p)?;
            if h.len() != n {
                return Err(CliError::io(p, format!("{} weights for {n} entries", h.len())));
            }
            Ok(h)
        }
        None => Ok(Histogram::uniform(n)?),
    }
}

fn column_means(x: &Matrix) -> CliResult<Histogram> {
    let sums = x.col_sums();
    Ok(Histogram::normalized(
        sums.iter().map(|s| s / x.rows() as f64).collect(),
    )?)
}

struct Artifacts<'a> {
    dir: &'a Path,
    report: &'a mut RunReport,
}

impl Artifacts<'_> {
    fn matrix(&mut self, name: &str, m: &Matrix) -> CliResult<()> {
        let path = self.dir.join(format!("{name}.csv"));
        write_matrix(&path, m)?;
        self.report.outputs.insert(name.into(), path);
        Ok(())
    }

    fn heatmap(&mut self, name: &str, m: &Matrix) -> CliResult<()> {
        let path = self.dir.join(format!("{name}.pgm"));
        export_heatmap(m, &path)?;
        self.report.outputs.insert(format!("{name}Heatmap"), path);
        Ok(())
    }

    fn labels(&mut self, name: &str, labels: impl IntoIterator<Item = i64>) -> CliResult<()> {
        let path = self.dir.join(format!("{name}.csv"));
        write_labels(&path, labels)?;
        self.report.outputs.insert(name.into(), path);
        Ok(())
    }
}

pub fn cmd_coot(a: &CootArgs) -> CliResult<RunReport> {
    let started = Instant::now();
    check_restarts(a.restarts)?;
    let runner = runner(&a.solver)?;
    let x = read_matrix(&a.x)?;
    let x2 = read_matrix(&a.y)?;
    let (v, v2) = if a.column_mean_weights {
        (Some(column_means(&x)?), Some(column_means(&x2)?))
    } else {
        (None, None)
    };
    let problem = CootProblem {
        w: weights_or_uniform(a.w.as_ref(), x.rows())?,
        w2: weights_or_uniform(a.w2.as_ref(), x2.rows())?,
        v: match (&a.v, v) {
            (None, Some(v)) => v,
            (p, _) => weights_or_uniform(p.as_ref(), x.cols())?,
        },
        v2: match (&a.v2, v2) {
            (None, Some(v)) => v,
            (p, _) => weights_or_uniform(p.as_ref(), x2.cols())?,
        },
        x,
        x2,
        loss: a.loss.into(),
        eps_samples: a.eps1,
        eps_features: a.eps2,
        max_iter: a.solver.max_iter,
        tol: a.solver.tol,
    };
    let best = solve_coot_multistart(&problem, a.restarts, a.seed, &runner)?;
    let sol = &best.best;

    let config = json!({
        "x": a.x, "y": a.y, "loss": Loss::from(a.loss).name(), "eps1": a.eps1, "eps2": a.eps2,
        "w": a.w, "w2": a.w2, "v": a.v, "v2": a.v2, "columnMeanWeights": a.column_mean_weights,
        "restarts": a.restarts, "jobs": a.solver.jobs, "maxIter": a.solver.max_iter, "tol": a.solver.tol,
    });
    let mut report = RunReport::new("coot", Some(a.seed), config);
    report.cost = Some(sol.cost);
    report.iterations = sol.iterations;
    report.converged = sol.converged && sol.inner_converged;
    report.set("bestRestart", best.best_index);
    report.set("restartCosts", best.costs.clone());
    report.set("objectiveTrace", sol.objective_trace.clone());

    prepare_out(&a.out)?;
    let mut art = Artifacts {
        dir: &a.out,
        report: &mut report,
    };
    art.matrix("pi_s", sol.pi_s.plan())?;
    art.matrix("pi_v", sol.pi_v.plan())?;
    if a.heatmaps {
        art.heatmap("pi_s", sol.pi_s.plan())?;
        art.heatmap("pi_v", sol.pi_v.plan())?;
    }
    report.finish(started);
    report.write(&a.out)?;
    Ok(report)
}

pub fn cmd_gw(a: &GwArgs) -> CliResult<RunReport> {
    let started = Instant::now();
    check_restarts(a.restarts)?;
    let runner = runner(&a.solver)?;
    let (x, x2) = (read_matrix(&a.x)?, read_matrix(&a.y)?);
    let (c, c2) = match a.input {
        GwInput::Points => (sqeuclid_matrix(&x), sqeuclid_matrix(&x2)),
        GwInput::Similarity => (
            SimilarityMatrix::new(x, SimilarityKind::Generic)?,
            SimilarityMatrix::new(x2, SimilarityKind::Generic)?,
        ),
    };
    let problem = GwProblem {
        w: weights_or_uniform(a.w.as_ref(), c.len())?,
        w2: weights_or_uniform(a.w2.as_ref(), c2.len())?,
        c,
        c2,
        loss: a.loss.into(),
        eps: a.eps,
        max_iter: a.solver.max_iter,
        tol: a.solver.tol,
    };
    let best = solve_gw_multistart(&problem, a.restarts, a.seed, &runner)?;
    let sol = &best.best;

    let config = json!({
        "x": a.x, "y": a.y, "input": format!("{:?}", a.input).to_lowercase(), "loss": Loss::from(a.loss).name(),
        "eps": a.eps, "w": a.w, "w2": a.w2, "restarts": a.restarts, "jobs": a.solver.jobs,
        "maxIter": a.solver.max_iter, "tol": a.solver.tol,
    });
    let mut report = RunReport::new("gw", Some(a.seed), config);
    report.cost = Some(sol.cost);
    report.iterations = sol.iterations;
    report.converged = sol.converged;
    report.set("bestRestart", best.best_index);
    report.set("restartCosts", best.costs.clone());

    prepare_out(&a.out)?;
    let mut art = Artifacts {
        dir: &a.out,
        report: &mut report,
    };
    art.matrix("pi", sol.coupling.plan())?;
    if a.heatmaps {
        art.heatmap("pi", sol.coupling.plan())?;
    }
    report.finish(started);
    report.write(&a.out)?;
    Ok(report)
}

fn read_assignment(path: &Path) -> CliResult<Vec<usize>> {
    read_labels(path)?
        .into_iter()
        .map(|l| l.ok_or_else(|| CliError::io(path, "truth labels cannot be -1")))
        .collect()
}

pub fn cmd_cocluster(a: &CoclusterArgs) -> CliResult<RunReport> {
    let started = Instant::now();
    let x = read_matrix(&a.x)?;
    let config = CoclusterConfig {
        row_clusters: a.row_clusters,
        col_clusters: a.col_clusters,
        eps_samples: a.eps1,
        eps_features: a.eps2,
        outer_iter: a.outer_iter,
        inner_max_iter: a.solver.max_iter,
        inner_tol: a.solver.tol,
        seed: a.seed,
    };
    let out = cocluster(&x, &config)?;

    let echo = json!({
        "x": a.x, "g": a.row_clusters, "m": a.col_clusters, "eps1": a.eps1, "eps2": a.eps2,
        "outerIter": a.outer_iter, "truth": a.truth, "maxIter": a.solver.max_iter, "tol": a.solver.tol,
    });
    let mut report = RunReport::new("cocluster", Some(a.seed), echo);
    report.cost = Some(out.solution.cost);
    report.iterations = out.rounds;
    report.converged = out.converged;
    report.set("objectiveTrace", out.objective_trace.clone());
    if let Some(dir) = &a.truth {
        let rows = read_assignment(&dir.join("true_rows.csv"))?;
        let cols = read_assignment(&dir.join("true_cols.csv"))?;
        report.set("cce", cce(&out.row_labels, &rows, &out.col_labels, &cols)?);
    }

    prepare_out(&a.out)?;
    let mut art = Artifacts {
        dir: &a.out,
        report: &mut report,
    };
    art.labels("row_labels", out.row_labels.iter().map(|&l| l as i64))?;
    art.labels("col_labels", out.col_labels.iter().map(|&l| l as i64))?;
    art.matrix("xc", &out.xc)?;
    art.matrix("pi_s", out.solution.pi_s.plan())?;
    art.matrix("pi_v", out.solution.pi_v.plan())?;
    if a.heatmaps {
        art.heatmap("pi_s", out.solution.pi_s.plan())?;
        art.heatmap("pi_v", out.solution.pi_v.plan())?;
    }
    report.finish(started);
    report.write(&a.out)?;
    Ok(report)
}

fn parse_penalty(raw: &str) -> CliResult<Penalty> {
    if raw == "auto" {
        return Ok(Penalty::Auto);
    }
    match raw.parse::<f64>() {
        Ok(p) if p > 0.0 && p.is_finite() => Ok(Penalty::Fixed(p)),
        _ => Err(CliError::Usage(format!(
            "--penalty must be \"auto\" or a positive number, got {raw:?}"
        ))),
    }
}

pub fn cmd_hda(a: &HdaArgs) -> CliResult<RunReport> {
    let started = Instant::now();
    check_restarts(a.restarts)?;
    let penalty = parse_penalty(&a.penalty)?;
    let runner = runner(&a.solver)?;
    let xs = read_matrix(&a.xs)?;
    let xt = read_matrix(&a.xt)?;
    let ys_raw = read_labels(&a.ys)?;
    let yt_raw = a.yt_partial.as_ref().map(|p| read_labels(p)).transpose()?;
    let mut sets: Vec<&[Option<usize>]> = vec![&ys_raw];
    if let Some(yt) = &yt_raw {
        sets.push(yt);
    }
    let mut labels = label_matrices(&sets)?.into_iter();
    let ys = labels.next().expect("source labels");
    let yt = labels.next();

    let config = HdaConfig {
        loss: a.loss.into(),
        eps_samples: a.eps1,
        eps_features: a.eps2,
        max_iter: a.solver.max_iter,
        tol: a.solver.tol,
        restarts: a.restarts,
        seed: a.seed,
        penalty,
    };
    let out = hda(&xs, &xt, &ys, yt.as_ref(), &config, &runner)?;

    let echo = json!({
        "xs": a.xs, "xt": a.xt, "ys": a.ys, "ytPartial": a.yt_partial, "penalty": a.penalty,
        "loss": Loss::from(a.loss).name(), "eps1": a.eps1, "eps2": a.eps2, "restarts": a.restarts,
        "jobs": a.solver.jobs, "maxIter": a.solver.max_iter, "tol": a.solver.tol,
    });
    let mut report = RunReport::new("hda", Some(a.seed), echo);
    report.cost = Some(out.solution.cost);
    report.iterations = out.solution.iterations;
    report.converged = out.solution.converged && out.solution.inner_converged;
    report.set("bestRestart", out.best_index);
    report.set("restartCosts", out.costs.clone());
    report.set(
        "undefinedLabels",
        out.propagation.labels.iter().filter(|l| l.is_none()).count(),
    );

    prepare_out(&a.out)?;
    let mut art = Artifacts {
        dir: &a.out,
        report: &mut report,
    };
    art.labels(
        "labels",
        out.propagation.labels.iter().map(|l| l.map_or(-1, |c| c as i64)),
    )?;
    art.matrix("scores", &out.propagation.scores)?;
    art.matrix("pi_s", out.solution.pi_s.plan())?;
    art.matrix("pi_v", out.solution.pi_v.plan())?;
    if a.heatmaps {
        art.heatmap("pi_s", out.solution.pi_s.plan())?;
        art.heatmap("pi_v", out.solution.pi_v.plan())?;
    }
    report.finish(started);
    report.write(&a.out)?;
    Ok(report)
}

pub fn cmd_election(a: &ElectionArgs) -> CliResult<RunReport> {
    let started = Instant::now();
    check_restarts(a.restarts)?;
    let runner = runner(&a.solver)?;
    let e = Election::from_positions(read_matrix(&a.x)?)?;
    let e2 = Election::from_positions(read_matrix(&a.y)?)?;
    let d = election_distance(&e, &e2, a.restarts, a.seed, &runner)?;

    let echo = json!({
        "x": a.x, "y": a.y, "restarts": a.restarts, "jobs": a.solver.jobs,
        "maxIter": a.solver.max_iter, "tol": a.solver.tol,
    });
    let mut report = RunReport::new("election", Some(a.seed), echo);
    report.cost = Some(d.value);
    report.iterations = d.solution.iterations;
    report.converged = d.certified || (d.solution.converged && d.solution.inner_converged);
    report.set("solverCost", d.solver_value);
    report.set("certified", d.certified);

    if let Some(dir) = &a.out {
        prepare_out(dir)?;
        let mut art = Artifacts {
            dir,
            report: &mut report,
        };
        art.matrix("pi_s", d.solution.pi_s.plan())?;
        art.matrix("pi_v", d.solution.pi_v.plan())?;
        report.finish(started);
        report.write(dir)?;
    } else {
        report.finish(started);
    }
    Ok(report)
}

pub fn cmd_gen(a: &GenArgs) -> CliResult<RunReport> {
    let started = Instant::now();
    let mut config = match a.preset {
        Some(p) => BlockConfig::preset(Preset::from(p)),
        None => {
            let (Some(n), Some(d), Some(g), Some(m)) = (a.n, a.d, a.row_clusters, a.col_clusters) else {
                return Err(CliError::Usage(
                    "without --preset, --n, --d, -g and -m are required".into(),
                ));
            };
            BlockConfig {
                n,
                d,
                g,
                m,
                row_proportions: vec![1.0 / g.max(1) as f64; g],
                col_proportions: vec![1.0 / m.max(1) as f64; m],
                separation: coot_core::apps::WELL_SEPARATED,
                noise: 1.0,
            }
        }
    };
    config.n = a.n.unwrap_or(config.n);
    config.d = a.d.unwrap_or(config.d);
    if let Some(g) = a.row_clusters {
        config.g = g;
        config.row_proportions = vec![1.0 / g.max(1) as f64; g];
    }
    if let Some(m) = a.col_clusters {
        config.m = m;
        config.col_proportions = vec![1.0 / m.max(1) as f64; m];
    }
    if a.unequal {
        config.row_proportions = unequal_proportions(config.g);
        config.col_proportions = unequal_proportions(config.m);
    }
    config.separation = a.separation.unwrap_or(config.separation);
    let data = generate_blocks(&config, a.seed)?;

    let echo = json!({
        "preset": a.preset.map(|p| format!("{p:?}")), "n": config.n, "d": config.d, "g": config.g, "m": config.m,
        "rowProportions": config.row_proportions, "colProportions": config.col_proportions,
        "separation": config.separation, "noise": config.noise,
    });
    let mut report = RunReport::new("gen", Some(a.seed), echo);
    prepare_out(&a.out)?;
    let mut art = Artifacts {
        dir: &a.out,
        report: &mut report,
    };
    art.matrix("X", &data.x)?;
    art.matrix("means", &data.means)?;
    art.labels("true_rows", data.true_rows.iter().map(|&l| l as i64))?;
    art.labels("true_cols", data.true_cols.iter().map(|&l| l as i64))?;
    report.finish(started);
    report.write(&a.out)?;
    Ok(report)
}
