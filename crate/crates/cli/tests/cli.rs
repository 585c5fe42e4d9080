use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use doodler_core::data::{encode_idx, gen_uniform_noise, ImageShape};
use doodler_core::io::{quantize_unit, GrayImage};
use doodler_core::nn::MODEL_MAGIC;
use doodler_core::stats::FittedStats;

const SIDE: usize = 8;

struct Work {
    dir: tempfile::TempDir,
}

impl Work {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn path(&self, name: &str) -> String {
        self.dir.path().join(name).to_string_lossy().into_owned()
    }

    fn write(&self, name: &str, bytes: &[u8]) -> String {
        let p = self.path(name);
        std::fs::write(&p, bytes).unwrap();
        p
    }

    /// A bright 3x3 square on a dark background, moving with the index.
    fn squares(&self, name: &str, n: usize) -> String {
        let mut px = vec![0u8; n * SIDE * SIDE];
        for i in 0..n {
            let (r0, c0) = (i % (SIDE - 2), (i / (SIDE - 2)) % (SIDE - 2));
            for r in r0..r0 + 3 {
                for c in c0..c0 + 3 {
                    px[i * SIDE * SIDE + r * SIDE + c] = 200 + (i % 50) as u8;
                }
            }
        }
        self.write(name, &encode_idx(&px, n, SIDE, SIDE).unwrap())
    }

    /// The square images with intensities flipped: mostly bright.
    fn inverted(&self, name: &str, n: usize) -> String {
        let src = read(self.squares("tmp.idx", n));
        let mut out = src[..16].to_vec();
        out.extend(src[16..].iter().map(|p| 255 - p));
        self.write(name, &out)
    }

    fn noise(&self, name: &str, n: usize) -> String {
        let ds = gen_uniform_noise(n, ImageShape::new(1, SIDE, SIDE), 3).unwrap();
        let px: Vec<u8> = ds.pixels().iter().map(|&v| quantize_unit(v as f64)).collect();
        self.write(name, &encode_idx(&px, n, SIDE, SIDE).unwrap())
    }

    fn train(&self, model: &str, extra: &[&str]) -> Output {
        let data = self.squares("train.idx", 64);
        let mut args = vec!["train", "--data", &data, "--model", model, "--hidden", "16", "--latent-dim", "4"];
        // flags given by the test take the place of these defaults
        for pair in [["--epochs", "30"], ["--batch-size", "16"], ["--learning-rate", "0.01"]] {
            if !extra.contains(&pair[0]) {
                args.extend_from_slice(&pair);
            }
        }
        args.extend_from_slice(extra);
        doodler(&args)
    }

    /// Trained model plus statistics with an OOD fit on inverted squares.
    fn fitted(&self) -> (String, String) {
        let model = self.path("m.bin");
        assert_ok(&self.train(&model, &["--seed", "1"]));
        let id = self.squares("id.idx", 40);
        let ood = self.inverted("ood.idx", 40);
        let stats = self.path("s.json");
        assert_ok(&doodler(&[
            "fit", "--model", &model, "--id-data", &id, "--ood-data", &ood, "--stats", &stats, "--id-tail", "1",
        ]));
        (model, stats)
    }
}

fn doodler(args: &[&str]) -> Output {
    doodler_env(args, &[])
}

fn doodler_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_doodler"));
    cmd.args(args).env_remove("DOODLER_SEED");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn assert_ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read(p: impl AsRef<Path>) -> Vec<u8> {
    std::fs::read(p).unwrap()
}

#[test]
fn train_writes_model_with_magic_and_is_reproducible() {
    let w = Work::new();
    let (a, b) = (w.path("a.bin"), w.path("b.bin"));
    assert_ok(&w.train(&a, &["--seed", "9"]));
    assert_ok(&w.train(&b, &["--seed", "9"]));
    let bytes = read(&a);
    assert_eq!(bytes[..4], MODEL_MAGIC);
    assert_eq!(bytes, read(&b));
    assert_eq!(read(format!("{a}.loss.csv")), read(format!("{b}.loss.csv")));
    let log = String::from_utf8(read(format!("{a}.loss.csv"))).unwrap();
    assert_eq!(log.lines().next(), Some("epoch,loss"));
    assert_eq!(log.lines().count(), 31);
}

#[test]
fn seed_env_is_a_fallback() {
    let w = Work::new();
    let (env, flag, other) = (w.path("env.bin"), w.path("flag.bin"), w.path("other.bin"));
    let data = w.squares("d.idx", 64);
    let base = ["train", "--data", &data, "--hidden", "16", "--latent-dim", "4", "--epochs", "1"];
    let run = |model: &str, extra: &[&str], env: &[(&str, &str)]| {
        let mut args = base.to_vec();
        args.extend_from_slice(&["--model", model]);
        args.extend_from_slice(extra);
        assert_ok(&doodler_env(&args, env));
    };
    run(&env, &[], &[("DOODLER_SEED", "7")]);
    run(&flag, &["--seed", "7"], &[("DOODLER_SEED", "8")]);
    run(&other, &[], &[("DOODLER_SEED", "8")]);
    assert_eq!(read(&env), read(&flag));
    assert_ne!(read(&env), read(&other));
}

#[test]
fn flags_override_config_and_unknown_keys_fail() {
    let w = Work::new();
    let model = w.path("m.bin");
    let cfg = w.write("c.ini", b"[train]\nepochs = 5\nseed = 2\n");
    let mut out = w.train(&model, &["--config", &cfg, "--epochs", "2"]);
    assert_ok(&out);
    let log = String::from_utf8(read(format!("{model}.loss.csv"))).unwrap();
    assert_eq!(log.lines().count(), 3);

    let bad = w.write("bad.ini", b"[train]\nepoch = 5\n");
    out = w.train(&model, &["--config", &bad]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("unknown key `epoch`"), "{}", stderr(&out));

    out = w.train(&model, &["--learning-rate", "-1"]);
    assert_eq!(code(&out), 1);
    out = doodler(&["train", "--no-such-flag"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn data_errors_exit_two() {
    let w = Work::new();
    let out = doodler(&["train", "--data", &w.path("missing.idx"), "--model", &w.path("m.bin")]);
    assert_eq!(code(&out), 2);
    let junk = w.write("junk.idx", b"not an idx file at all");
    let out = doodler(&["train", "--data", &junk, "--model", &w.path("m.bin")]);
    assert_eq!(code(&out), 2);
}

#[test]
fn fit_round_trips_and_flags_degenerate_data() {
    let w = Work::new();
    let (model, stats) = w.fitted();
    let s = FittedStats::load(&stats).unwrap();
    assert_eq!(s.model_id.len(), 16);
    assert!(s.ood_gamma.is_some() && s.ood_chi.is_some());
    assert!(s.ood_gamma.unwrap().mu > s.id_gamma.mu);
    assert_eq!(FittedStats::from_json(&s.to_json().unwrap()).unwrap(), s);

    let flat = w.write("flat.idx", &encode_idx(&vec![128u8; 10 * SIDE * SIDE], 10, SIDE, SIDE).unwrap());
    let out = doodler(&["fit", "--model", &model, "--id-data", &flat, "--stats", &w.path("f.json"), "--id-tail", "1"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("flat.idx") && stderr(&out).contains("degenerate"), "{}", stderr(&out));
}

#[test]
fn detect_needs_ood_fit_and_handles_empty_input() {
    let w = Work::new();
    let (model, stats) = w.fitted();
    let id_only = w.path("id_only.json");
    let id = w.squares("id2.idx", 20);
    assert_ok(&doodler(&["fit", "--model", &model, "--id-data", &id, "--stats", &id_only, "--id-tail", "1"]));
    let out = doodler(&["detect", "--model", &model, "--stats", &id_only, "--input", &id]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("run `fit`"), "{}", stderr(&out));

    let empty = w.write("empty.idx", &encode_idx(&[], 0, SIDE, SIDE).unwrap());
    let out = doodler(&["detect", "--model", &model, "--stats", &stats, "--input", &empty]);
    assert_ok(&out);
    assert!(out.stdout.is_empty());
}

#[test]
fn detect_writes_reproducible_json_lines() {
    let w = Work::new();
    let (model, stats) = w.fitted();
    let input = w.noise("mix.idx", 12);
    let (a, b) = (w.path("a.jsonl"), w.path("b.jsonl"));
    for out in [&a, &b] {
        assert_ok(&doodler(&["detect", "--model", &model, "--stats", &stats, "--input", &input, "--out", out]));
    }
    let text = String::from_utf8(read(&a)).unwrap();
    assert_eq!(text.lines().count(), 12);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["verdict"] == "positive" || v["verdict"] == "negative");
        assert!(v["posterior"].as_f64().unwrap() <= 1.0);
    }
    assert_eq!(read(&a), read(&b));

    let cfg = w.write("d.ini", b"[detect]\nt_p = 0.5\nheld = 1\n");
    let out = doodler(&["--config", &cfg, "detect", "--model", &model, "--stats", &stats, "--input", &input]);
    assert_eq!(code(&out), 1);
}

#[test]
fn segment_dims_png_and_uniform_map_for_identical_fits() {
    let w = Work::new();
    let (model, stats) = w.fitted();
    let mut s = FittedStats::load(&stats).unwrap();
    s.ood_gamma = Some(s.id_gamma);
    s.ood_chi = Some(s.id_chi);
    let same = w.write("same.json", s.to_json().unwrap().as_bytes());
    let input = w.squares("one.idx", 3);
    let (heat, png, recon) = (w.path("h.pgm"), w.path("h.png"), w.path("r.pgm"));
    assert_ok(&doodler(&[
        "segment", "--model", &model, "--stats", &same, "--input", &input, "--index", "2", "--out", &heat,
        "--png", &png, "--recon", &recon,
    ]));
    let img = GrayImage::from_pgm(&read(&heat)).unwrap();
    assert_eq!((img.width, img.height), (SIDE, SIDE));
    assert!(img.pixels.iter().all(|&p| p == 128));
    assert_eq!(&read(&png)[..4], b"\x89PNG");
    assert_eq!(GrayImage::from_pgm(&read(&recon)).unwrap().width, SIDE);

    let pgm = w.write("in.pgm", &GrayImage::new(SIDE, SIDE, vec![90; SIDE * SIDE]).unwrap().to_pgm());
    assert_ok(&doodler(&["segment", "--model", &model, "--stats", &stats, "--input", &pgm, "--out", &heat]));
    let wrong = w.write("wrong.pgm", &GrayImage::new(5, 5, vec![0; 25]).unwrap().to_pgm());
    let out = doodler(&["segment", "--model", &model, "--stats", &stats, "--input", &wrong, "--out", &heat]);
    assert_eq!(code(&out), 2);
}

#[test]
fn stream_reports_and_precondition_errors() {
    let w = Work::new();
    let (model, stats) = w.fitted();
    let out = doodler(&["stream", "--model", &model, "--stats", &stats, "--source", "uniform", "--n", "30", "--seed", "1"]);
    assert_ok(&out);
    let text = String::from_utf8(out.stdout).unwrap();
    for key in ["Z ", "s ", "t ", "p-value", "reject H0"] {
        assert!(text.contains(key), "{key} missing from {text}");
    }
    let id = w.squares("id3.idx", 10);
    let out = doodler(&["stream", "--model", &model, "--stats", &stats, "--source", &id, "--n", "1"]);
    assert_eq!(code(&out), 1);
    let out = doodler(&["stream", "--model", &model, "--stats", &stats, "--source", &id, "--n", "11"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn stats_for_another_model_are_rejected() {
    let w = Work::new();
    let (_, stats) = w.fitted();
    let other = w.path("other.bin");
    assert_ok(&w.train(&other, &["--seed", "2"]));
    let input = w.squares("x.idx", 4);
    let out = doodler(&["detect", "--model", &other, "--stats", &stats, "--input", &input]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("fitted for model"), "{}", stderr(&out));
}

#[test]
fn eval_writes_one_row_per_pair() {
    let w = Work::new();
    let (model, _) = w.fitted();
    let id = w.squares("test.idx", 30);
    let ood = w.noise("o.idx", 30);
    let dir: PathBuf = w.dir.path().join("eval");
    let dir_s = dir.to_string_lossy().into_owned();
    let ood_arg = format!("noise-file={ood}");
    let id_arg = format!("squares={id}");
    assert_ok(&doodler(&[
        "eval", "--model", &model, "--id-data", &id_arg, "--ood-data", &ood_arg, "--noise", "gaussian,uniform",
        "--out-dir", &dir_s, "--seed", "4",
    ]));
    let csv = String::from_utf8(read(dir.join("metrics.csv"))).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].starts_with("squares,noise-file,"));
    assert!(rows[1].starts_with("squares,gaussian,") && rows[2].starts_with("squares,uniform,"));
    let json: serde_json::Value = serde_json::from_slice(&read(dir.join("metrics.json"))).unwrap();
    for r in json.as_array().unwrap() {
        assert!((0.0..=1.0).contains(&r["auroc"].as_f64().unwrap()));
    }
    let out = doodler(&["eval", "--model", &model, "--id-data", &id, "--ood-data", &w.path("nope"), "--out-dir", &dir_s]);
    assert_eq!(code(&out), 2);
}
