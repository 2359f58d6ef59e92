use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn moire(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_moire"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("MOIRE_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn invalid_input_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let on_lattice = moire(&["magic", "--cutoff", "4", "--k-probe", "0"], dir.path());
    assert_eq!(code(&on_lattice), 2, "{}", String::from_utf8_lossy(&on_lattice.stderr));
    let wrong_t = moire(&["bands", "--n", "3", "--t", "1", "--cutoff", "4"], dir.path());
    assert_eq!(code(&wrong_t), 2);
    let small_grid = moire(&["chern", "--grid", "4", "--cutoff", "4"], dir.path());
    assert_eq!(code(&small_grid), 2);

    let cfg = dir.path().join("bad.conf");
    fs::write(&cfg, "cutoff = 4\nbogus = 1\n").unwrap();
    let unknown = moire(&["selftest", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&unknown), 2);
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("bogus"));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "# reduced run\ncutoff = 9\nsamples = 5\nalpha = 0.9\n").unwrap();
    let o = moire(&["selftest", "--config", cfg.to_str().unwrap(), "--cutoff", "5"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("selftest.json")).unwrap()).unwrap();
    let config = &json["metadata"]["config"];
    assert_eq!(config["cutoff"], 5);
    assert_eq!(config["samples"], 5);
    assert_eq!(config["alpha"], "0.9");
    assert_eq!(json["metadata"]["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn selftest_output_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let o = moire(&["selftest", "--cutoff", "5", "--seed", "11"], d.path());
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let read = |d: &tempfile::TempDir| fs::read(d.path().join("selftest.json")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn bands_rows_follow_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let o = moire(
        &["bands", "--alpha", "0.4", "--cutoff", "4", "--path", "K:0,0;M:0.5,0.5;G:1,1", "--samples", "3", "--bands", "2"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("bands.csv")).unwrap();
    let mut lines = text.lines().skip_while(|l| l.starts_with('#'));
    assert_eq!(lines.next(), Some("segment,fraction,k_re,k_im,E1,E2"));
    assert_eq!(lines.count(), 2 * 3);
    assert!(text.starts_with("# artifact"));
}

#[test]
fn output_directory_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from-env");
    let o = Command::new(env!("CARGO_BIN_EXE_moire"))
        .args(["chern", "--cutoff", "4", "--grid", "6", "--alpha", "0.3"])
        .env("MOIRE_OUT_DIR", &target)
        .output()
        .unwrap();
    assert!(target.join("chern.json").exists(), "{}", String::from_utf8_lossy(&o.stderr));
}
