use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use vfi_core::frames::{load_frame, save_frame, Frame};
use vfi_core::synthesis::OutputManifest;
use vfi_core::trajectory::SlotKind;

fn vfi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vfi")).args(args).output().expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = vfi(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Small analytic scene bundle under `dir/name`.
fn scene(dir: &Path, name: &str, t0: f64, periods: usize) -> std::path::PathBuf {
    let out = dir.join(name);
    let (t0, periods) = (t0.to_string(), periods.to_string());
    ok_json(&[
        "scene", "--out", p(&out), "--width", "64", "--height", "64", "--sprites", "2", "--seed", "3", "--t0", &t0,
        "--periods", &periods,
    ]);
    out
}

fn manifest(dir: &Path) -> OutputManifest {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn write_ramp_frames(dir: &Path, count: usize) {
    std::fs::create_dir_all(dir).unwrap();
    for i in 0..count {
        let f = Frame::from_fn(12, 9, |x, y| [(x + i) as f64 / 40.0, y as f64 / 9.0, (i % 7) as f64 / 7.0]);
        save_frame(&f, dir.join(format!("frame_{i:04}.png"))).unwrap();
    }
}

#[test]
fn synth_divides_the_frame_count() {
    let tmp = TempDir::new().unwrap();
    let frames = tmp.path().join("frames");
    write_ramp_frames(&frames, 100);
    let out = tmp.path().join("gopro-5-5");
    let m = ok_json(&["synth", "--in", p(&frames), "--m", "5", "--n", "5", "--out", p(&out)]);
    assert_eq!(m["periods"], 10);
    assert_eq!((m["m"].as_u64(), m["n"].as_u64()), (Some(5), Some(5)));
    assert_eq!(std::fs::read_dir(out.join("blur")).unwrap().count(), 10);
}

#[test]
fn synth_with_single_frame_exposures_copies_the_input() {
    let tmp = TempDir::new().unwrap();
    let frames = tmp.path().join("frames");
    write_ramp_frames(&frames, 6);
    let out = tmp.path().join("copy");
    ok_json(&["synth", "--in", p(&frames), "--m", "1", "--n", "0", "--out", p(&out)]);
    for i in 0..6 {
        let src = load_frame(frames.join(format!("frame_{i:04}.png"))).unwrap();
        assert_eq!(load_frame(out.join(format!("blur/{i:06}.png"))).unwrap(), src);
    }
}

#[test]
fn invalid_arguments_exit_with_two() {
    let tmp = TempDir::new().unwrap();
    let frames = tmp.path().join("frames");
    write_ramp_frames(&frames, 4);
    let out = tmp.path().join("x");
    assert_eq!(code(&vfi(&["synth", "--in", p(&frames), "--m", "0", "--n", "1", "--out", p(&out)])), 2);
    assert_eq!(code(&vfi(&["synth", "--in", p(&frames), "--n", "1"])), 2);
    assert_eq!(code(&vfi(&["interp", "--factor", "3"])), 2);
    assert_eq!(code(&vfi(&["--threads", "0", "flowviz", "--in", "a.flo", "--out", "b.png"])), 2);
}

#[test]
fn missing_input_exits_with_one() {
    let tmp = TempDir::new().unwrap();
    let missing = tmp.path().join("nothing");
    let out = tmp.path().join("x");
    assert_eq!(code(&vfi(&["synth", "--in", p(&missing), "--m", "2", "--n", "1", "--out", p(&out)])), 1);
    let png = tmp.path().join("v.png");
    assert_eq!(code(&vfi(&["flowviz", "--in", p(&missing), "--out", p(&png)])), 1);
}

#[test]
fn estimate_recovers_the_scene_ratio() {
    let tmp = TempDir::new().unwrap();
    let s = scene(tmp.path(), "s", 0.7, 1);
    let r = ok_json(&["estimate", "--analytic", p(&s.join("scene.json")), "--t0", "0.7"]);
    assert_eq!(r["schema"], 1);
    assert!((r["lambda"].as_f64().unwrap() - 3.0 / 7.0).abs() < 1e-6, "{r}");

    // the same from the flows on disk, with joint refinement
    let f = |n: &str| s.join(format!("flows/000000_{n}.flo"));
    let (a, b, c) = (f("f10"), f("f12"), f("f13"));
    let r = ok_json(&["estimate", "--flows", p(&a), p(&b), p(&c), "--iters", "8"]);
    assert_eq!(r["method"], "joint");
    assert!((r["lambda"].as_f64().unwrap() - 3.0 / 7.0).abs() < 1e-4, "{r}");

    let r = ok_json(&["estimate", "--flows", p(&a), p(&b), p(&c), "--lambda", "1.0"]);
    assert_eq!((r["lambda"].as_f64(), r["method"].as_str()), (Some(1.0), Some("override")));
}

#[test]
fn static_flows_exit_with_three_and_a_json_error() {
    let tmp = TempDir::new().unwrap();
    let flo = tmp.path().join("zero.flo");
    vfi_core::flow::write_flo(&vfi_core::FlowField::zeros(32, 32), &flo).unwrap();
    let out = vfi(&["estimate", "--flows", p(&flo), p(&flo), p(&flo)]);
    assert_eq!(code(&out), 3);
    let err: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(err["error"], "insufficient_motion");
    assert_eq!(err["qualified"], 0);
}

#[test]
fn estimate_exports_refined_flow_and_confidence() {
    let tmp = TempDir::new().unwrap();
    let s = scene(tmp.path(), "s", 0.6, 1);
    let (flo, png) = (tmp.path().join("s23.flo"), tmp.path().join("conf.png"));
    ok_json(&[
        "estimate", "--analytic", p(&s.join("scene.json")), "--t0", "0.6", "--refined", p(&flo), "--confidence",
        p(&png),
    ]);
    assert_eq!(vfi_core::flow::read_flo(&flo).unwrap().dims(), (64, 64));
    assert_eq!(load_frame(&png).unwrap().dims(), (64, 64));
}

#[test]
fn six_four_schedule_in_the_manifest() {
    let tmp = TempDir::new().unwrap();
    let s = scene(tmp.path(), "s", 0.6, 2);
    let out = tmp.path().join("out");
    // exact flows: the stamp at 6/10 sits on the exposure boundary
    let spec = s.join("scene.json");
    ok_json(&["interp", "--analytic", p(&spec), "--t0", "0.6", "--out", p(&out), "--factor", "10"]);
    let m = manifest(&out);
    for period in 0..2 {
        let kinds: Vec<_> = m.frames.iter().filter(|f| f.period == period).map(|f| f.kind).collect();
        assert_eq!(kinds.iter().filter(|&&k| k == SlotKind::Intra).count(), 7);
        assert_eq!(kinds.iter().filter(|&&k| k == SlotKind::Inter).count(), 3);
    }
    assert!(m.frames.iter().all(|f| out.join(&f.file).is_file()));
    assert_eq!(m.lambdas.len(), 2);
}

#[test]
fn factor_one_emits_only_key_states() {
    let tmp = TempDir::new().unwrap();
    let s = scene(tmp.path(), "s", 0.6, 2);
    let out = tmp.path().join("out");
    let keys = s.join("keys");
    ok_json(&["interp", "--keys", p(&keys), "--out", p(&out), "--factor", "1"]);
    let m = manifest(&out);
    assert!(m.frames.iter().all(|f| f.key_state));
    assert_eq!(m.frames.len(), 3);
    assert_eq!(load_frame(out.join(&m.frames[1].file)).unwrap(), load_frame(keys.join("000001_s.png")).unwrap());
}

#[test]
fn output_is_identical_across_thread_counts() {
    let tmp = TempDir::new().unwrap();
    let s = scene(tmp.path(), "s", 0.7, 2);
    let run = |threads: &str| {
        let out = tmp.path().join(format!("out{threads}"));
        ok_json(&["--threads", threads, "interp", "--keys", p(&s.join("keys")), "--out", p(&out)]);
        let m = manifest(&out);
        let bytes: Vec<Vec<u8>> = m.frames.iter().map(|f| std::fs::read(out.join(&f.file)).unwrap()).collect();
        (m, bytes)
    };
    let base = run("1");
    for n in ["4", "16"] {
        assert!(run(n) == base, "{n} threads differ");
    }
}

#[test]
fn eval_against_itself_is_perfect() {
    let tmp = TempDir::new().unwrap();
    let s = scene(tmp.path(), "s", 0.7, 1);
    let truth = s.join("truth");
    let r = ok_json(&["eval", "--out", p(&truth), "--gt", p(&truth)]);
    assert_eq!(r["schema"], 1);
    for section in ["deblurring", "interpolation"] {
        assert_eq!(r[section]["psnr"], "inf");
        assert_eq!(r[section]["ssim"], 1.0);
    }
    // L0 and L1 of the period, then L2 and L3 closing the last exposure
    assert_eq!(r["deblurring"]["count"], 4);
}

#[test]
fn eval_means_are_arithmetic_means() {
    let tmp = TempDir::new().unwrap();
    let s = scene(tmp.path(), "s", 0.7, 1);
    let out = tmp.path().join("out");
    ok_json(&["interp", "--analytic", p(&s.join("scene.json")), "--t0", "0.7", "--out", p(&out)]);
    let r = ok_json(&["--threads", "2", "eval", "--out", p(&out), "--gt", p(&s.join("truth")), "--luma"]);
    assert_eq!(r["space"], "luma");
    let frames = r["interpolation"]["frames"].as_array().unwrap();
    let mean = |key: &str| frames.iter().map(|f| f[key].as_f64().unwrap()).sum::<f64>() / frames.len() as f64;
    assert!((r["interpolation"]["psnr"].as_f64().unwrap() - mean("psnr")).abs() < 1e-9);
    assert!((r["interpolation"]["ssim"].as_f64().unwrap() - mean("ssim")).abs() < 1e-12);
    assert!(mean("psnr") > 30.0, "interpolation mean {}", mean("psnr"));
}

#[test]
fn eval_rejects_mismatched_manifests() {
    let tmp = TempDir::new().unwrap();
    let a = scene(tmp.path(), "a", 0.7, 1);
    let b = scene(tmp.path(), "b", 0.7, 2);
    let out = vfi(&["eval", "--out", p(&a.join("truth")), "--gt", p(&b.join("truth"))]);
    assert_eq!(code(&out), 2);
    let c = scene(tmp.path(), "c", 0.5, 1);
    let out = vfi(&["eval", "--out", p(&a.join("truth")), "--gt", p(&c.join("truth"))]);
    assert_eq!(code(&out), 2);
}

/// Interpolation PSNR against the scene truth.
fn interp_psnr(dir: &Path, s: &Path, t0: &str, extra: &[&str]) -> f64 {
    let out = dir.join(format!("o{}", extra.join("")));
    let spec = s.join("scene.json");
    let mut args = vec!["interp", "--analytic", p(&spec), "--t0", t0, "--out", p(&out)];
    args.extend_from_slice(extra);
    ok_json(&args);
    let r = ok_json(&["eval", "--out", p(&out), "--gt", p(&s.join("truth"))]);
    r["interpolation"]["psnr"].as_f64().unwrap()
}

#[test]
fn ratio_model_beats_equal_intervals_on_short_gaps() {
    let tmp = TempDir::new().unwrap();
    let s = scene(tmp.path(), "s", 0.9, 2);
    let aware = interp_psnr(tmp.path(), &s, "0.9", &[]);
    let qvi = interp_psnr(tmp.path(), &s, "0.9", &["--qvi"]);
    assert!(aware > qvi, "ratio-aware {aware} dB vs equal-interval {qvi} dB");
}

#[test]
fn smoothing_and_overrides_keep_the_schedule() {
    let tmp = TempDir::new().unwrap();
    let s = scene(tmp.path(), "s", 0.7, 3);
    let keys = s.join("keys");
    let out = tmp.path().join("smooth");
    ok_json(&["interp", "--keys", p(&keys), "--out", p(&out), "--smooth", "3", "--no-refine"]);
    let lambdas = manifest(&out).lambdas;
    assert_eq!(lambdas.len(), 3);
    assert!(lambdas.iter().all(|l| (l - 3.0 / 7.0).abs() < 1e-3), "{lambdas:?}");
    let out = tmp.path().join("fixed");
    ok_json(&["interp", "--keys", p(&keys), "--out", p(&out), "--lambda", "0.5"]);
    assert_eq!(manifest(&out).lambdas, vec![0.5; 3]);
    assert_eq!(code(&vfi(&["interp", "--keys", p(&keys), "--out", p(&out), "--smooth", "2"])), 2);
}

#[test]
fn failed_interp_leaves_no_output() {
    let tmp = TempDir::new().unwrap();
    let s = scene(tmp.path(), "s", 0.7, 2);
    std::fs::remove_file(s.join("flows/000001_f13.flo")).unwrap();
    let out = tmp.path().join("out");
    let res = vfi(&["interp", "--keys", p(&s.join("keys")), "--out", p(&out)]);
    assert_eq!(code(&res), 1);
    assert!(!out.exists());
    let msg = String::from_utf8_lossy(&res.stderr);
    assert!(msg.contains("quad 1"), "{msg}");
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let tmp = TempDir::new().unwrap();
    let s = scene(tmp.path(), "s", 0.6, 1);
    let cfg = tmp.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"interp": {"factor": 5}, "trajectory.mag_floor": 0.25}"#).unwrap();
    let keys = s.join("keys");
    let frames = |extra: &[&str]| {
        let out = tmp.path().join(format!("o{}", extra.len()));
        let mut args = vec!["--config", p(&cfg), "interp", "--keys", p(&keys), "--out", p(&out)];
        args.extend_from_slice(extra);
        ok_json(&args)["frames"].as_u64().unwrap()
    };
    // 5 slots in the period plus the 4 intra slots of the last exposure
    assert_eq!(frames(&[]), 5 + 4);
    assert_eq!(frames(&["--factor", "2"]), 2 + 2);

    std::fs::write(&cfg, r#"{"interp": {"factr": 5}}"#).unwrap();
    assert_eq!(code(&vfi(&["--config", p(&cfg), "flowviz", "--in", "a", "--out", "b"])), 2);
}

#[test]
fn flowviz_writes_a_colour_image() {
    let tmp = TempDir::new().unwrap();
    let s = scene(tmp.path(), "s", 0.7, 1);
    let png = tmp.path().join("f.png");
    let out = vfi(&["flowviz", "--in", p(&s.join("flows/000000_f12.flo")), "--out", p(&png), "--max-mag", "10"]);
    assert!(out.status.success());
    assert_eq!(load_frame(&png).unwrap().dims(), (64, 64));
}
