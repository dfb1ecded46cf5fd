use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dampwave"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dampwave-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("config.toml");
    std::fs::write(&path, text).unwrap();
    path
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn spectrum_constant_damping_table() {
    let dir = scratch("spectrum");
    let cfg = write_config(
        &dir,
        r#"
[geometry]
kind = "torus"
kmax = 2

[damping]
kind = "constant"
level = 0.1
"#,
    );
    let out = dir.join("out");
    let status = bin()
        .args(["spectrum", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());

    // the table must include 0, 2ic, and ic +/- sqrt(lambda - c^2);
    // rows beyond the trust radius appear untrusted
    let csv = read(&out, "spectrum.csv");
    let mut taus = Vec::new();
    for row in csv.lines().skip(1) {
        let cols: Vec<&str> = row.split(',').collect();
        taus.push((cols[0].parse::<f64>().unwrap(), cols[1].parse::<f64>().unwrap()));
    }
    let c = 0.1_f64;
    let mut expected = vec![(0.0, 0.0), (0.0, 2.0 * c)];
    for lam in [1.0_f64, 2.0, 4.0, 5.0, 8.0] {
        let r = (lam - c * c).sqrt();
        expected.push((r, c));
        expected.push((-r, c));
    }
    for (re, im) in expected {
        assert!(
            taus.iter().any(|&(a, b)| (a - re).abs() < 1e-8 && (b - im).abs() < 1e-8),
            "missing tau = {re} + {im}i"
        );
    }
    assert!(out.join("report.json").exists());
}

#[test]
fn empty_scan_rectangle_header_only() {
    let dir = scratch("scan");
    let cfg = write_config(
        &dir,
        r#"
[geometry]
kind = "torus"
kmax = 1

[experiment]
re_steps = 0
im_steps = 0
"#,
    );
    let out = dir.join("out");
    let status = bin()
        .args(["resolvent-scan", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(read(&out, "scan.csv"), "re_tau,im_tau,norm_L2,norm_H\n");
}

#[test]
fn decay_rerun_is_byte_identical() {
    let dir = scratch("decay");
    let cfg = write_config(
        &dir,
        r#"
seed = 42

[geometry]
kind = "torus"
kmax = 2

[damping]
kind = "constant"
level = 0.1

[experiment]
window = [5.0, 15.0]
a_inf_hat = 0.1
"#,
    );
    let mut outs = Vec::new();
    for tag in ["a", "b"] {
        let out = dir.join(tag);
        let status = bin()
            .args(["decay", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        outs.push(out);
    }
    for name in ["decay.json", "slopes.csv"] {
        assert_eq!(read(&outs[0], name), read(&outs[1], name), "{name} differs across reruns");
    }
}

#[test]
fn seed_flag_overrides_config() {
    let dir = scratch("seed");
    let cfg = write_config(&dir, "seed = 1\n[geometry]\nkind = \"torus\"\nkmax = 1\n");
    let out = dir.join("out");
    let status = bin()
        .args(["spectrum", "--seed", "9", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let report = read(&out, "report.json");
    assert!(report.contains("\"seed\": 9"));
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = scratch("badkey");
    let cfg = write_config(&dir, "not_a_key = 1\n");
    let status = bin().args(["spectrum", "--config"]).arg(&cfg).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn negative_damping_exits_3() {
    let dir = scratch("neg");
    let cfg = write_config(&dir, "[damping]\nkind = \"constant\"\nlevel = -1.0\n");
    let out = dir.join("out");
    let status = bin()
        .args(["spectrum", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}
