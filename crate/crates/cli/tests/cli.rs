use std::process::Command;

fn quark(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_quark")).args(args).output().expect("binary runs")
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "task=edge\nk=4\nseed=9\n").unwrap();
    let out = dir.path().join("out");
    let o = quark(&["distribution", "--config", cfg.to_str().unwrap(), "--k", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = std::fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("config.k=2\n"));
    assert!(manifest.contains("config.task=edge\n"));
    assert!(manifest.contains("seed=9\n"));
    assert!(manifest.contains("output=distribution.csv\n"));
    assert!(manifest.contains("result.k=2\n"));
}

#[test]
fn configuration_errors_exit_with_two() {
    assert_eq!(quark(&["jtable", "--task", "cifar"]).status.code(), Some(2));
    assert_eq!(quark(&["jtable", "--pad", "lots"]).status.code(), Some(2));
    assert_eq!(quark(&["frobnicate"]).status.code(), Some(2));
    let o = quark(&["jtable", "--task", "tiny-mnist", "--mnist-dir", "/definitely/missing"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("MNIST"));
}

#[test]
fn qubit_cap_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = quark(&["verify-oracle", "--task", "edge", "--cap", "20", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let o = quark(&[
            "shots-curve", "--task", "simplified-edge", "--method", "urs", "--runs", "4", "--eval-shots", "30",
            "--seed", "5", "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        outputs.push(out);
    }
    for f in ["shots_curve.csv", "trace.csv"] {
        assert_eq!(std::fs::read(outputs[0].join(f)).unwrap(), std::fs::read(outputs[1].join(f)).unwrap());
    }
}

#[test]
fn gen_data_writes_parseable_circuit() {
    let dir = tempfile::tempdir().unwrap();
    let o = quark(&["gen-data", "--task", "toy", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(dir.path().join("model.circuit")).unwrap();
    assert!(quark_core::boolcirc::parse_circuit(&text).is_ok());
    assert_eq!(std::fs::read_to_string(dir.path().join("train.csv")).unwrap(), "x_bits,y_bits\n0,0\n1,1\n");
}
