use std::path::{Path, PathBuf};
use std::process::Command;

fn cnls(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_cnls")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const PLANE: &str = "
kind = convergence
id = pw
dim = 1
p = 2
coupling = 1
points = 16
box = 6.283185307179586
dt = 1e-2
steps = 20
record_every = 5
data.family = plane_wave
data.mode = 2
data.amplitude = 0.5
";

#[test]
fn check_and_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.conf", PLANE);
    let bad = write(dir.path(), "bad.conf", &PLANE.replace("p = 2", "p = 0.5"));
    let (code, out, _) = cnls(&["check", "--config", good.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    let (code, _, err) = cnls(&["check", "--config", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("p"));
    assert_eq!(cnls(&["frobnicate"]).0, 2);
    assert_eq!(cnls(&["run"]).0, 2);
    assert_eq!(cnls(&["check", "--config", "/nonexistent.conf"]).0, 2);
}

#[test]
fn run_pass_fail_and_resume() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let good = write(dir.path(), "good.conf", PLANE);
    let (code, stdout, stderr) = cnls(&["run", "--config", good.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{stdout}{stderr}");
    for f in ["pw.csv", "pw.ckpt", "pw.verdict.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let verdict: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("pw.verdict.json")).unwrap()).unwrap();
    assert_eq!(verdict["status"], "pass");
    assert_eq!(verdict["thresholds"]["plane_wave_error"], 1e-11);
    assert_eq!(verdict["parameters"]["dt"], 1e-2);

    let strict = write(dir.path(), "strict.conf", &format!("{PLANE}\nthreshold.plane_wave_error = 0"));
    let (code, _, _) = cnls(&["run", "--config", strict.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 1);

    let longer = write(dir.path(), "longer.conf", &PLANE.replace("steps = 20", "t_end = 0.5"));
    let ckpt = out.join("pw.ckpt");
    let (code, stdout, stderr) = cnls(&[
        "resume",
        "--checkpoint",
        ckpt.to_str().unwrap(),
        "--config",
        longer.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{stdout}{stderr}");
    let csv = std::fs::read_to_string(out.join("pw-resumed.csv")).unwrap();
    let last = csv.lines().last().unwrap();
    assert!(last.starts_with("5e-1,"), "{last}");
    assert!(csv.lines().nth(1).unwrap().starts_with("2e-1,"));

    // geometry mismatch is a usage error
    let other_text = PLANE.replace("points = 16", "points = 32").replace("steps = 20", "t_end = 0.5");
    let other = write(dir.path(), "other.conf", &other_text);
    let (code, _, _) = cnls(&["resume", "--checkpoint", ckpt.to_str().unwrap(), "--config", other.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 2);

    // a corrupt checkpoint is rejected
    let bytes = std::fs::read(&ckpt).unwrap();
    let broken = dir.path().join("broken.ckpt");
    std::fs::write(&broken, &bytes[..bytes.len() - 3]).unwrap();
    let (code, _, err) = cnls(&["resume", "--checkpoint", broken.to_str().unwrap(), "--config", longer.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("checksum"), "{err}");
}

#[test]
fn divergence_fails_with_blow_up_time() {
    let dir = tempfile::tempdir().unwrap();
    let huge = write(dir.path(), "huge.conf", &PLANE.replace("data.amplitude = 0.5", "data.amplitude = 1e160"));
    let (code, _, _) = cnls(&["run", "--config", huge.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 1);
    let verdict: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("pw.verdict.json")).unwrap()).unwrap();
    assert_eq!(verdict["status"], "fail");
    assert!(verdict["measured"]["blow_up_time"].as_f64().unwrap() > 0.0);
}

#[test]
fn window_exceeded_warns_but_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let text = "
kind = scattering
dim = 1
p = 3
coupling = 1
points = 128
box = 20
dt = 1e-2
t_end = 20
record_every = 50
data.width = 1
data.amplitude = 0.5
";
    let conf = write(dir.path(), "s.conf", text);
    let (code, stdout, _) = cnls(&["run", "--config", conf.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    let verdict: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("scattering.verdict.json")).unwrap()).unwrap();
    assert!(verdict["measured"]["window"]["t_valid"].as_f64().unwrap() < 20.0);
    assert!(verdict["notes"].as_array().unwrap().iter().any(|n| n.as_str().unwrap().contains("validity window")));
    assert_ne!(verdict["status"], "pass", "{stdout}");
    if verdict["status"] == "warn" {
        assert_eq!(code, 0);
    } else {
        assert_eq!(code, 1);
    }
}
