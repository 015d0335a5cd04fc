use std::path::PathBuf;

use cnls_harness::{parse_config, run_experiment};

#[test]
fn identical_config_gives_identical_bytes() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/determinism.conf");
    let config = parse_config(&std::fs::read_to_string(path).unwrap()).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_experiment(&config, a.path()).unwrap();
    run_experiment(&config, b.path()).unwrap();
    for name in ["determinism.csv", "determinism-half_dt.csv", "determinism.ckpt", "determinism.verdict.json"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, y, "{name}");
    }
}
