use std::path::Path;
use std::process::{Command, Output};

fn phasefront(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phasefront"))
        .args(args)
        .current_dir(dir)
        .env_remove("PHASEFRONT_THREADS")
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const SMALL_SWEEP: &[&str] =
    &["sweep", "--topology", "mlp", "--width", "16", "--depth", "30", "--res", "16", "--seed", "3"];

fn with(base: &[&str], extra: &[&str]) -> Vec<String> {
    base.iter().chain(extra).map(|s| s.to_string()).collect()
}

fn run(dir: &Path, args: &[String]) -> Output {
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    phasefront(dir, &refs)
}

#[test]
fn sweep_writes_grid_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &with(SMALL_SWEEP, &["--out", "g.pfl"]));
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let grid = phasefront::landscape::load(dir.path().join("g.pfl")).unwrap();
    assert_eq!((grid.rows(), grid.cols()), (16, 16));
    assert_eq!(grid.metadata.master_seed, 3);
    assert_eq!(grid.metadata.extra["parameters"]["width"], 16);

    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("g.pfl.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "sweep");
    assert_eq!(manifest["parameters"]["depth"], 30);
    let digest = manifest["outputs"][0]["sha256"].as_str().unwrap();
    assert_eq!(digest.len(), 64);
}

#[test]
fn manifest_replay_is_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(dir.path(), &with(SMALL_SWEEP, &["--out", "a.pfl", "--threads", "2"]))), 0);
    let replay = |out: &str, threads: &str| {
        phasefront(dir.path(), &["sweep", "--config", "a.pfl.manifest.json", "--out", out, "--threads", threads])
    };
    assert_eq!(code(&replay("b.pfl", "1")), 0);
    assert_eq!(code(&replay("c.pfl", "3")), 0);
    let a = std::fs::read(dir.path().join("a.pfl")).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("b.pfl")).unwrap());
    assert_eq!(a, std::fs::read(dir.path().join("c.pfl")).unwrap());
}

#[test]
fn conv_kernel_defaults_to_width_and_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "sweep",
        "--topology",
        "conv",
        "--width",
        "12",
        "--depth",
        "10",
        "--avg-last",
        "5",
        "--res",
        "8",
        "--out",
        "c.pfl",
    ];
    assert_eq!(code(&phasefront(dir.path(), &args)), 0);
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("c.pfl.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["parameters"]["kernel"], 12);
    let grid = phasefront::landscape::load(dir.path().join("c.pfl")).unwrap();
    assert_eq!(grid.metadata.topology.kernel_size, 12);
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = phasefront(dir.path(), &["sweep", "--topology", "mlp", "--kernel", "3", "--out", "x.pfl"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("--kernel"));

    let out = phasefront(dir.path(), &["sweep", "--bogus", "1", "--out", "x.pfl"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("--bogus"));

    assert_eq!(code(&phasefront(dir.path(), &["sweep", "--perturb", "nope", "--out", "x.pfl"])), 1);
    assert_eq!(code(&phasefront(dir.path(), &["sweep", "--res", "4", "--out", "x.pfl"])), 1);
    assert_eq!(code(&phasefront(dir.path(), &["frobnicate"])), 1);
    assert_eq!(code(&phasefront(dir.path(), &["--help"])), 0);
    assert!(!dir.path().join("x.pfl").exists());
}

#[test]
fn missing_grid_is_a_runtime_error_naming_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = phasefront(dir.path(), &["fracdim", "--grid", "missing.pfl", "--out", "r.json"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("missing.pfl"));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.conf"),
        "# small run\nwidth = 10\ndepth = 12\navg_last = 4\nres = 16\nsw_max = 2\n",
    )
    .unwrap();
    let out = phasefront(dir.path(), &["sweep", "--config", "run.conf", "--res", "8", "--out", "g.pfl"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let grid = phasefront::landscape::load(dir.path().join("g.pfl")).unwrap();
    assert_eq!(grid.metadata.topology.width, 10);
    assert_eq!(grid.metadata.depth, 12);
    assert_eq!(grid.cols(), 8);
    assert_eq!(grid.metadata.sigma_w.max, 2.0);

    std::fs::write(dir.path().join("bad.conf"), "colour = blue\n").unwrap();
    assert_eq!(code(&phasefront(dir.path(), &["sweep", "--config", "bad.conf", "--out", "g.pfl"])), 1);
}

#[test]
fn zoom_render_and_fracdim_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["sweep", "--width", "16", "--depth", "40", "--res", "64", "--sw-min", "1", "--sw-max", "2.5"];
    assert_eq!(
        code(&phasefront(dir.path(), &with(&base, &["--out", "p.pfl"]).iter().map(String::as_str).collect::<Vec<_>>())),
        0
    );
    let out = phasefront(
        dir.path(),
        &[
            "zoom", "--parent", "p.pfl", "--sw-min", "1.2", "--sw-max", "2", "--sb-min", "0.5", "--sb-max", "1.5",
            "--out", "z.pfl",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let z = phasefront::landscape::load(dir.path().join("z.pfl")).unwrap();
    assert_eq!(z.metadata.lineage.len(), 1);
    assert_eq!(z.cols(), 64);

    let out = phasefront(
        dir.path(),
        &[
            "zoom", "--parent", "p.pfl", "--sw-min", "0", "--sw-max", "2", "--sb-min", "0", "--sb-max", "1", "--out",
            "bad.pfl",
        ],
    );
    assert_eq!(code(&out), 2);

    assert_eq!(code(&phasefront(dir.path(), &["render", "--grid", "z.pfl", "--scale", "log1p", "--out", "z.pgm"])), 0);
    let pgm = std::fs::read(dir.path().join("z.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n64 64\n255\n"));
    assert_eq!(pgm.len(), b"P5\n64 64\n255\n".len() + 64 * 64);

    let out =
        phasefront(dir.path(), &["fracdim", "--grid", "z.pfl", "--jmin", "1", "--out", "r.json", "--plot", "r.csv"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("r.json")).unwrap()).unwrap();
    assert!(report["best"]["dimension"].as_f64().unwrap() > 0.0);
    let plot = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert!(plot.starts_with("tau,j,ln_count\n"));
}

#[test]
fn tradeoff_meanfield_and_boundary_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = phasefront(
        dir.path(),
        &["tradeoff", "--width", "16", "--sw-list", "0,3", "--depths", "5,20", "--out", "t.csv"],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let t = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    let lines: Vec<&str> = t.lines().collect();
    assert_eq!(lines[0], "sigma_w,sigma_b,depth,l_independent,l_perturbed");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("0,1,5,0,0"));

    assert_eq!(code(&phasefront(dir.path(), &["tradeoff", "--depths", "5,x", "--out", "t.csv"])), 1);

    let out = phasefront(dir.path(), &["meanfield", "--res", "8", "--order", "64", "--out", "m.csv"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let m = std::fs::read_to_string(dir.path().join("m.csv")).unwrap();
    assert_eq!(m.lines().count(), 65);

    let out =
        phasefront(dir.path(), &["boundary", "--sb-min", "1", "--sb-max", "1", "--sb-count", "1", "--out", "b.csv"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let b = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
    let row: Vec<&str> = b.lines().nth(1).unwrap().split(',').collect();
    let sw: f64 = row[1].parse().unwrap();
    assert!((1.4..1.9).contains(&sw));
}
