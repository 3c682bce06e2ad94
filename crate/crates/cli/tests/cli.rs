use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rwot::datasets::{embed_and_translate, render_shape, sample_distribution, save_grid_image, save_point_cloud};
use rwot::datasets::{SamplerSpec, Shape};
use serde_json::Value;
use tempfile::TempDir;

fn rwot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rwot")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn identical_files_have_zero_relative_distance() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.csv", "x1,x2,mass\n0,0,1\n1,2,3\n-1,4,2\n");
    let out = rwot(&["dist", &a, &a, "--metric", "rwp", "--p", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["distance"].as_f64().unwrap().abs() < 0.05, "{v}");
}

#[test]
fn dirac_pair_is_euclidean() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.csv", "x1,x2,mass\n0,0,1\n");
    let b = write(&dir, "b.csv", "x1,x2,mass\n3,4,1\n");
    let out = rwot(&["dist", &a, &b, "--metric", "wp", "--p", "2", "--solver", "exact"]);
    assert_eq!(out.status.code(), Some(0));
    assert!((json(&out)["distance"].as_f64().unwrap() - 5.0).abs() < 1e-12);
}

#[test]
fn line_pair_rw2_against_enumeration() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.csv", "x1,mass\n0,1\n1,1\n");
    let b = write(&dir, "b.csv", "x1,mass\n0,1\n2,1\n");
    // both permutation couplings of two uniform two-point measures
    let identity = 0.5 * ((0.0f64 - 0.0).powi(2) + (1.0f64 - 2.0).powi(2));
    let swap = 0.5 * ((0.0f64 - 2.0).powi(2) + (1.0f64 - 0.0).powi(2));
    let w2_sq = identity.min(swap);
    let gap = (0.0 + 2.0) / 2.0 - (0.0 + 1.0) / 2.0;

    let out = rwot(&["dist", &a, &b, "--metric", "rwp", "--p", "2", "--solver", "exact"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["distance"].as_f64().unwrap() - (w2_sq - gap * gap).sqrt()).abs() < 1e-10);
    assert!((v["w_distance"].as_f64().unwrap() - w2_sq.sqrt()).abs() < 1e-10);
    assert!((v["mean_gap"].as_f64().unwrap() - gap).abs() < 1e-12);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["seed"], 42);
    assert_eq!(v["config"]["solver"], "exact");
}

#[test]
fn rw1_runs_the_shift_search() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.csv", "x1,mass\n0,1\n1,1\n");
    let b = write(&dir, "b.csv", "x1,mass\n0,1\n3,1\n");
    let out = rwot(&["dist", &a, &b, "--metric", "rwp", "--p", "1", "--solver", "exact", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["distance"].as_f64().unwrap() - 1.0).abs() < 1e-6, "{v}");
    assert_eq!(v["config"]["shift_search"]["seed"], 7);
}

#[test]
fn non_convergence_exits_two_and_still_prints() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.csv", "x1,mass\n0,1\n1,1\n5,1\n");
    let b = write(&dir, "b.csv", "x1,mass\n0,1\n2,3\n");
    let out = rwot(&["dist", &a, &b, "--max-iter", "1", "--epsilon", "1e-14", "--lambda", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["converged"], false);
    assert!(v["distance"].as_f64().unwrap().is_finite());
}

#[test]
fn kernel_underflow_exits_two() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.csv", "x1,mass\n0,1\n");
    let b = write(&dir, "b.csv", "x1,mass\n100,1\n");
    let out = rwot(&["dist", &a, &b, "--lambda", "0.01"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("underflow"));
}

#[test]
fn input_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.csv", "x1,mass\n0,1\n");
    let bad = write(&dir, "bad.csv", "x1,mass\n0,1\nnope,2\n");
    let missing = dir.path().join("missing.csv");
    let cases: Vec<Vec<&str>> = vec![
        vec!["dist", &a, s(&missing)],
        vec!["dist", &a, &bad],
        vec!["dist", &a, &a, "--lambda", "-1"],
        vec!["dist", &a, &a, "--p", "0.5"],
        vec!["dist", &a, &a, "--unknown-flag"],
        vec!["dist", &a, &a, "--metric", "nope"],
        vec!["bench", "shift-sweep", "--m", "0"],
        vec!["classify", "knn", "--corpus", "synthetic:12", "--k", "2"],
        vec!["classify", "knn", "--corpus", "synthetic:12", "--metrics", "W3"],
        vec!["frobnicate"],
    ];
    for args in cases {
        let out = rwot(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty(), "{args:?}");
    }
    let bad_out = rwot(&["dist", &a, &bad]);
    assert!(String::from_utf8_lossy(&bad_out.stderr).contains("line 3"));
}

#[test]
fn dist_output_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let src = dir.path().join("src.csv");
    let dst = dir.path().join("dst.csv");
    save_point_cloud(&sample_distribution(&SamplerSpec::standard_gaussian(2, 15, 1)).unwrap(), &src).unwrap();
    save_point_cloud(&sample_distribution(&SamplerSpec::standard_gaussian(2, 12, 2)).unwrap(), &dst).unwrap();
    let out_file = dir.path().join("d.json");
    let args = ["dist", s(&src), s(&dst), "--metric", "rwp", "--p", "1.5", "--solver", "exact", "--out", s(&out_file)];
    let first = rwot(&args);
    let second = rwot(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(fs::read(&out_file).unwrap(), first.stdout);
}

fn csv_rows(path: &Path) -> (String, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    (header, lines.map(|l| l.split(',').map(str::to_string).collect()).collect())
}

#[test]
fn shift_sweep_writes_csv_and_metadata() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sweep.csv");
    let args =
        ["bench", "shift-sweep", "--m", "30", "--lengths", "0,2", "--trials", "2", "--seed", "5", "--out", s(&out)];
    assert_eq!(rwot(&args).status.code(), Some(0));
    let (header, rows) = csv_rows(&out);
    assert!(header.starts_with("shift_length,method,w2_error,runtime_seconds,trial,seed"), "{header}");
    assert_eq!(rows.len(), 2 * 2 * 2);
    let methods: Vec<&str> = rows.iter().map(|r| r[1].as_str()).collect();
    assert!(methods.contains(&"classic_sinkhorn") && methods.contains(&"rw2_sinkhorn"));

    let meta: Value = serde_json::from_slice(&fs::read(dir.path().join("sweep.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 5);
    assert_eq!(meta["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(meta["config"]["sampler"]["sample_count"], 30);
    assert_eq!(meta["config"]["sinkhorn"]["lambda"], 0.1);
    assert_eq!(meta["config"]["desk_scale"], true);

    // identical up to the runtime column
    let again = dir.path().join("again.csv");
    let mut args2 = args.to_vec();
    *args2.last_mut().unwrap() = s(&again);
    assert_eq!(rwot(&args2).status.code(), Some(0));
    let strip = |rows: Vec<Vec<String>>| -> Vec<Vec<String>> {
        rows.into_iter()
            .map(|mut r| {
                r.remove(3);
                r
            })
            .collect()
    };
    assert_eq!(strip(rows), strip(csv_rows(&again).1));
}

#[test]
fn knn_on_synthetic_corpus() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("knn.csv");
    let args = [
        "classify",
        "knn",
        "--corpus",
        "synthetic:16:2",
        "--lengths",
        "0,8",
        "--metrics",
        "L2,RW2",
        "--repeats",
        "2",
        "--epsilon",
        "0.1",
        "--out",
        s(&out),
    ];
    let run = rwot(&args);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let (header, rows) = csv_rows(&out);
    assert!(header.starts_with("translation_length,metric,accuracy,std,sample_size"), "{header}");
    assert_eq!(rows.len(), 4);
    for r in &rows {
        let acc: f64 = r[2].parse().unwrap();
        assert!((0.0..=1.0).contains(&acc));
    }
    let meta: Value = serde_json::from_slice(&fs::read(dir.path().join("knn.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["knn"]["repeats"], 2);
    assert_eq!(meta["config"]["corpus_size"], 16);
}

#[test]
fn knn_from_manifest() {
    let dir = TempDir::new().unwrap();
    let mut manifest = String::from("# label,path\n");
    for (i, (shape, label)) in [(Shape::Ring, 0), (Shape::Bar, 1)].iter().flat_map(|s| [*s; 4]).enumerate() {
        let img = render_shape(shape, 28, 28, (13.5 + (i % 3) as f64 * 0.5, 13.5), 1.0, 2.0, 1.0).unwrap();
        let name = format!("img{i}.csv");
        save_grid_image(&img, dir.path().join(&name)).unwrap();
        manifest.push_str(&format!("{label},{name}\n"));
    }
    let m = write(&dir, "corpus.txt", &manifest);
    let run = rwot(&["classify", "knn", "--corpus", &m, "--lengths", "0", "--metrics", "L2", "--repeats", "1"]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let text = String::from_utf8(run.stdout).unwrap();
    assert!(text.starts_with("translation_length,metric"));
    let meta: Value = serde_json::from_slice(&run.stderr).unwrap();
    assert_eq!(meta["config"]["corpus_size"], 8);
}

fn glyph_files(dir: &TempDir) -> (PathBuf, PathBuf) {
    let glyph = |s| render_shape(s, 12, 12, (5.5, 5.5), 0.6, 1.5, 1.0).unwrap();
    let place = |s, t| embed_and_translate(&glyph(s), 40, 40, t).unwrap();
    for (name, shape, t) in
        [("query", Shape::Cross, [-8, -8]), ("same_far", Shape::Cross, [8, 8]), ("diff_near", Shape::Ring, [-8, -8])]
    {
        save_grid_image(&place(shape, t), dir.path().join(format!("{name}.csv"))).unwrap();
    }
    let manifest = write(dir, "corpus.txt", "same_far.csv\ndiff,diff_near.csv\n");
    (PathBuf::from(manifest), dir.path().join("query.csv"))
}

#[test]
fn topk_ranks_by_shape_or_location() {
    let dir = TempDir::new().unwrap();
    let (corpus, query) = glyph_files(&dir);
    let run = |metric: &str| {
        let out =
            rwot(&["search", "topk", "--corpus", s(&corpus), "--query", s(&query), "--k", "2", "--metric", metric]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        json(&out)
    };
    let rw = run("RW2");
    assert_eq!(rw["result"]["ranked_ids"][0], "same_far");
    assert!(rw["result"]["distances"][0].as_f64().unwrap() < 0.05);
    assert_eq!(rw["result"]["query_id"], "query");
    let w = run("w2");
    assert_eq!(w["result"]["ranked_ids"][0], "diff");
    // the translated copy sits at the translation length
    let t = (16.0f64 * 16.0 * 2.0).sqrt();
    assert!((w["result"]["distances"][1].as_f64().unwrap() - t).abs() < 0.05);
    assert_eq!(w["config"]["sinkhorn"]["epsilon"], 0.01);
}

#[test]
fn topk_on_sequences() {
    let dir = TempDir::new().unwrap();
    let glyph = |s| render_shape(s, 12, 12, (5.5, 5.5), 0.6, 1.5, 1.0).unwrap();
    let mut manifest = String::new();
    for (id, shape, base) in
        [("query", Shape::Cross, [-10, -8]), ("far", Shape::Cross, [4, 8]), ("near", Shape::Ring, [-10, -8])]
    {
        let mut frames = String::new();
        for k in 0..6 {
            let name = format!("{id}_{k}.csv");
            let img = embed_and_translate(&glyph(shape), 40, 40, [base[0] + k, base[1]]).unwrap();
            save_grid_image(&img, dir.path().join(&name)).unwrap();
            frames.push_str(&name);
            frames.push('\n');
        }
        write(&dir, &format!("{id}.txt"), &frames);
        if id != "query" {
            manifest.push_str(&format!("{id},{id}.txt\n"));
        }
    }
    let corpus = write(&dir, "corpus.txt", &manifest);
    let query = dir.path().join("query.txt");
    let out = rwot(&["search", "topk", "--sequence", "--corpus", &corpus, "--query", s(&query), "--k", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["result"]["ranked_ids"][0], "far");
}

#[test]
fn topk_rejects_bad_metric_and_k() {
    let dir = TempDir::new().unwrap();
    let (corpus, query) = glyph_files(&dir);
    for extra in [["--metric", "L1"], ["--k", "3"]] {
        let mut args = vec!["search", "topk", "--corpus", s(&corpus), "--query", s(&query)];
        args.extend(extra);
        assert_eq!(rwot(&args).status.code(), Some(1), "{extra:?}");
    }
}

#[test]
fn diag_identical_inputs() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.csv", "x1,x2,mass\n0,0,1\n1,3,1\n2,1,2\n");
    let out = rwot(&["diag", "--src", &a, "--dst", &a, "--shifts", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let st = v["stability"].as_array().unwrap();
    assert_eq!(st.len(), 5);
    assert_eq!(st[0]["label"], "zero");
    assert_eq!(st[0]["log_g"], st[1]["log_g"]);
}

#[test]
fn diag_mean_shift_wins_on_separated_gaussians() {
    let dir = TempDir::new().unwrap();
    let src = dir.path().join("src.csv");
    let dst = dir.path().join("dst.csv");
    let x = sample_distribution(&SamplerSpec::standard_gaussian(3, 40, 11)).unwrap();
    let y =
        sample_distribution(&SamplerSpec::standard_gaussian(3, 30, 12)).unwrap().translate(&[6.0, -2.0, 1.0]).unwrap();
    save_point_cloud(&x, &src).unwrap();
    save_point_cloud(&y, &dst).unwrap();
    let out = rwot(&["diag", "--src", s(&src), "--dst", s(&dst), "--shifts", "20", "--lambda", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let st = v["stability"].as_array().unwrap();
    let mean = st[1]["log_g"].as_f64().unwrap();
    assert!(mean > st[0]["log_g"].as_f64().unwrap());
    assert!(st.iter().all(|e| e["log_g"].as_f64().unwrap() <= mean));
    assert_eq!(v["mean_shift_is_max"], true);
    assert_eq!(v["norm_comparison"]["improved"], true);
    assert_eq!(v["config"]["lambda"], 0.5);
}
