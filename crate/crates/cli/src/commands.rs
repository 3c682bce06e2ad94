use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use rwot::datasets::{derive_seed, load_point_cloud, random_translation, Family, SamplerSpec};
use rwot::diagnostics::{
    kernel_stability, shifted_norm_comparison, stability_optimal_shift, stability_report, StabilityReport,
};
use rwot::experiments::{knn_classify, save_csv, shift_sweep, topk_search, write_csv, KnnConfig, Metric};
use rwot::{
    build_cost_matrix, rw_p_distance, wasserstein_report, Distribution, ShiftSearchConfig, SinkhornConfig, Solver,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::{
    corpus, BenchCommand, ClassifyCommand, Cli, Command, DiagArgs, DistArgs, DistMetric, Failure, FamilyKind, Global,
    KnnArgs, SearchCommand, SolverKind, SweepArgs, TopkArgs,
};

type Outcome = Result<(), Failure>;

/// Full-scale experiment sizes that the defaults shrink; echoed into metadata.
const FULL_SCALE_SWEEP_SAMPLES: usize = 1000;
const FULL_SCALE_KNN_REPEATS: usize = 10;

pub fn run(cli: &Cli) -> Outcome {
    let g = &cli.global;
    match &cli.command {
        Command::Dist(a) => dist(g, a),
        Command::Bench(BenchCommand::ShiftSweep(a)) => sweep(g, a),
        Command::Classify(ClassifyCommand::Knn(a)) => knn(g, a),
        Command::Search(SearchCommand::Topk(a)) => topk(g, a),
        Command::Diag(a) => diag(g, a),
    }
}

fn sinkhorn_config(g: &Global) -> Result<SinkhornConfig<f64>, Failure> {
    let cfg = SinkhornConfig::new(g.lambda, g.epsilon).with_max_iterations(g.max_iter);
    cfg.validate()?;
    Ok(cfg)
}

fn envelope(command: &str, g: &Global, config: Value) -> serde_json::Map<String, Value> {
    let mut doc = serde_json::Map::new();
    doc.insert("tool".into(), json!("rwot"));
    doc.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    doc.insert("command".into(), json!(command));
    doc.insert("seed".into(), json!(g.seed));
    doc.insert("config".into(), config);
    doc
}

/// Non-finite values have no JSON literal; they are written as `null`.
fn emit_json(doc: &Value, out: Option<&Path>) -> Outcome {
    let text = serde_json::to_string_pretty(doc).map_err(anyhow::Error::from)?;
    println!("{text}");
    if let Some(path) = out {
        fs::write(path, format!("{text}\n")).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn emit_table<T: Serialize>(rows: &[T], meta: &Value, out: Option<&Path>) -> Outcome {
    let meta_text = serde_json::to_string_pretty(meta).map_err(anyhow::Error::from)?;
    match out {
        Some(path) => {
            save_csv(rows, path).with_context(|| format!("writing {}", path.display()))?;
            let meta_path = meta_path(path);
            fs::write(&meta_path, format!("{meta_text}\n"))
                .with_context(|| format!("writing {}", meta_path.display()))?;
        }
        None => {
            write_csv(rows, std::io::stdout().lock())?;
            let mut err = std::io::stderr().lock();
            writeln!(err, "{meta_text}")?;
        }
    }
    Ok(())
}

pub fn meta_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn load(path: &Path) -> Result<Distribution, Failure> {
    Ok(load_point_cloud(path).with_context(|| format!("reading {}", path.display()))?)
}

fn dist(g: &Global, a: &DistArgs) -> Outcome {
    let cfg = sinkhorn_config(g)?;
    if !(a.p >= 1.0) || !a.p.is_finite() {
        return Err(Failure::Input(anyhow::anyhow!("--p must be a finite number >= 1, got {}", a.p)));
    }
    let src = load(&a.src)?;
    let dst = load(&a.dst)?;
    let solver = match a.solver {
        SolverKind::Sinkhorn => Solver::Entropic(cfg),
        SolverKind::Exact => Solver::Exact,
    };
    let search = ShiftSearchConfig { seed: g.seed, ..ShiftSearchConfig::default() };

    let (distance, w_distance, mean_gap, shift, inner, evaluations) = match a.metric {
        DistMetric::Wp => {
            let rep = wasserstein_report(&src, &dst, a.p, &solver)?;
            (rep.transport_cost.max(0.0).powf(a.p.recip()), None, None, rep.shift_used.clone(), rep, None)
        }
        DistMetric::Rwp => {
            let rep = rw_p_distance(&src, &dst, a.p, &solver, &search)?;
            let evals = (a.p != 2.0).then_some(rep.evaluations);
            (rep.rw_distance, rep.w_distance, Some(rep.mean_gap), rep.shift, rep.inner, evals)
        }
    };
    let log_g = match inner.log_kernel_stability {
        Some(v) => v,
        None => kernel_stability(&build_cost_matrix(&src, &dst, a.p, &shift)?, g.lambda),
    };

    let mut config = json!({
        "src": a.src,
        "dst": a.dst,
        "p": a.p,
        "metric": match a.metric { DistMetric::Wp => "wp", DistMetric::Rwp => "rwp" },
        "solver": match a.solver { SolverKind::Sinkhorn => "sinkhorn", SolverKind::Exact => "exact" },
        "sinkhorn": cfg,
    });
    if a.metric == DistMetric::Rwp && a.p != 2.0 {
        config["shift_search"] = json!(search);
    }
    let mut doc = envelope("dist", g, config);
    doc.insert("distance".into(), json!(distance));
    if let Some(w) = w_distance {
        doc.insert("w_distance".into(), json!(w));
    }
    if let Some(gap) = mean_gap {
        doc.insert("mean_gap".into(), json!(gap));
    }
    doc.insert("shift".into(), json!(shift));
    doc.insert("iterations".into(), json!(inner.iterations));
    doc.insert("converged".into(), json!(inner.converged));
    doc.insert("log_g".into(), json!(log_g));
    if let Some(e) = evaluations {
        doc.insert("shift_evaluations".into(), json!(e));
    }
    emit_json(&Value::Object(doc), g.out.as_deref())?;
    if inner.converged {
        Ok(())
    } else {
        Err(Failure::NotConverged)
    }
}

fn family(a: &SweepArgs, dim: usize) -> Family {
    match a.family {
        FamilyKind::Gaussian => Family::Gaussian { mean: vec![0.0; dim], scale: a.scale },
        FamilyKind::Uniform => Family::Uniform { low: a.low, high: a.high },
        FamilyKind::Poisson => Family::Poisson { rate: a.rate },
        FamilyKind::Geometric => Family::Geometric { p: a.prob },
        FamilyKind::Gamma => Family::Gamma { shape: a.shape, rate: a.rate },
    }
}

fn sweep(g: &Global, a: &SweepArgs) -> Outcome {
    let cfg = sinkhorn_config(g)?;
    let spec = SamplerSpec::new(family(a, a.dim), a.dim, a.m, g.seed);
    spec.validate()?;
    if a.trials == 0 {
        return Err(Failure::Input(anyhow::anyhow!("--trials must be at least 1")));
    }
    if a.lengths.is_empty() || a.lengths.iter().any(|l| !l.is_finite() || *l < 0.0) {
        return Err(Failure::Input(anyhow::anyhow!("--lengths must be non-negative finite numbers")));
    }
    let rows = shift_sweep(&spec, &a.lengths, a.trials, &cfg)?;
    let failed = rows.iter().filter(|r| r.failed).count();
    let meta = json!(envelope(
        "bench shift-sweep",
        g,
        json!({
            "sampler": spec,
            "lengths": a.lengths,
            "trials": a.trials,
            "sinkhorn": cfg,
            "desk_scale": a.m < FULL_SCALE_SWEEP_SAMPLES,
            "full_scale_sample_count": FULL_SCALE_SWEEP_SAMPLES,
            "failed_rows": failed,
        }),
    ));
    emit_table(&rows, &meta, g.out.as_deref())
}

fn knn(g: &Global, a: &KnnArgs) -> Outcome {
    let cfg = sinkhorn_config(g)?;
    let metrics = a
        .metrics
        .iter()
        .map(|m| m.parse::<Metric>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::Input(anyhow::anyhow!(e)))?;
    if a.k == 0 || a.k.is_multiple_of(2) {
        return Err(Failure::Input(anyhow::anyhow!("--k must be odd and positive, got {}", a.k)));
    }
    if !(a.test_ratio > 0.0 && a.test_ratio < 1.0) {
        return Err(Failure::Input(anyhow::anyhow!("--test-ratio must lie in (0, 1)")));
    }
    if a.repeats == 0 {
        return Err(Failure::Input(anyhow::anyhow!("--repeats must be at least 1")));
    }
    let knn_cfg = KnnConfig {
        translation_lengths: a.lengths.clone(),
        metrics,
        k: a.k,
        test_ratio: a.test_ratio,
        repeats: a.repeats,
        seed: g.seed,
        canvas_width: a.canvas,
        canvas_height: a.canvas,
        sinkhorn: cfg,
    };
    let data = corpus::labeled(&a.corpus, a.labels.as_deref(), g.seed, a.limit)?;
    let rows = knn_classify(&data, &knn_cfg)?;
    let failures: usize = rows.iter().map(|r| r.failures).sum();
    let meta = json!(envelope(
        "classify knn",
        g,
        json!({
            "corpus": a.corpus,
            "labels": a.labels,
            "limit": a.limit,
            "corpus_size": data.len(),
            "knn": knn_cfg,
            "desk_scale": a.repeats < FULL_SCALE_KNN_REPEATS || a.corpus.starts_with("synthetic:"),
            "pair_failures": failures,
        }),
    ));
    emit_table(&rows, &meta, g.out.as_deref())
}

fn topk(g: &Global, a: &TopkArgs) -> Outcome {
    let cfg = sinkhorn_config(g)?;
    let metric: Metric = a.metric.parse().map_err(|e: String| Failure::Input(anyhow::anyhow!(e)))?;
    if !matches!(metric, Metric::W2 | Metric::RW2) {
        return Err(Failure::Input(anyhow::anyhow!("--metric must be W2 or RW2, got {metric}")));
    }
    let items = corpus::patterns(&a.corpus, a.sequence)?;
    let query = corpus::pattern(corpus::file_id(&a.query), &a.query, a.sequence)?;
    let result = topk_search(&items, &query, a.k, metric, &cfg)?;
    let mut doc = envelope(
        "search topk",
        g,
        json!({
            "corpus": a.corpus,
            "query": a.query,
            "k": a.k,
            "metric": metric,
            "sequence": a.sequence,
            "sinkhorn": cfg,
        }),
    );
    doc.insert("result".into(), json!(result));
    emit_json(&Value::Object(doc), g.out.as_deref())
}

#[derive(Serialize)]
struct ShiftEntry {
    label: String,
    #[serde(flatten)]
    report: StabilityReport<f64>,
}

fn diag(g: &Global, a: &DiagArgs) -> Outcome {
    if !(g.lambda > 0.0) || !g.lambda.is_finite() {
        return Err(Failure::Input(anyhow::anyhow!("--lambda must be positive")));
    }
    let src = load(&a.src)?;
    let dst = load(&a.dst)?;
    if src.dim() != dst.dim() {
        return Err(Failure::Input(anyhow::anyhow!("dimension mismatch: {} vs {}", src.dim(), dst.dim())));
    }
    let dim = src.dim();
    let best = stability_optimal_shift(&src, &dst)?;
    let gap_len = best.iter().map(|x| x * x).sum::<f64>().sqrt();
    // random shifts range over a ball comfortably larger than the mean gap
    let radius = 2.0 * gap_len + 1.0;

    let mut entries = vec![
        ShiftEntry { label: "zero".into(), report: stability_report(&src, &dst, g.lambda, &vec![0.0; dim])? },
        ShiftEntry { label: "mean".into(), report: stability_report(&src, &dst, g.lambda, &best)? },
    ];
    for i in 0..a.shifts {
        let s = random_translation(radius, dim, derive_seed(g.seed, &[i as u64]));
        entries.push(ShiftEntry { label: format!("random_{i}"), report: stability_report(&src, &dst, g.lambda, &s)? });
    }
    let mean_log_g = entries[1].report.log_g;
    let mean_is_max = entries.iter().all(|e| e.report.log_g <= mean_log_g);

    let xs: Vec<Vec<f64>> = src.points().map(<[f64]>::to_vec).collect();
    let ys: Vec<Vec<f64>> = dst.points().map(<[f64]>::to_vec).collect();
    let norms = shifted_norm_comparison(&xs, &ys)?;

    let mut doc = envelope(
        "diag",
        g,
        json!({
            "src": a.src,
            "dst": a.dst,
            "lambda": g.lambda,
            "shifts": a.shifts,
            "random_shift_radius": radius,
        }),
    );
    doc.insert("stability".into(), json!(entries));
    doc.insert("mean_shift_is_max".into(), json!(mean_is_max));
    doc.insert("norm_comparison".into(), json!(norms));
    emit_json(&Value::Object(doc), g.out.as_deref())
}
