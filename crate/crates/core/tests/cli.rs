use std::path::PathBuf;
use std::process::{Command, Output};

fn madic(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_madic"));
    cmd.args(args).env_remove("MADIC_OUTPUT_DIR");
    cmd
}

fn run(args: &[&str]) -> Output {
    madic(args).output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("madic-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["survival", "--t", "1,10"]).status.code(), Some(0));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["survival", "--m", "abc"]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    // a narrow window loses mass
    assert_eq!(run(&["solve", "--shells", "-2,2", "--initial", "point"]).status.code(), Some(2));
    assert_eq!(run(&["survival", "--m", "1"]).status.code(), Some(3));
    assert_eq!(run(&["survival", "--beta", "1.5"]).status.code(), Some(3));
}

#[test]
fn header_records_version_config_seed_and_notice() {
    let out = run(&["levy-symbol", "--m", "5", "--alpha", "0.7", "--seed", "12"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let header: Vec<&str> = text.lines().take_while(|l| l.starts_with('#')).collect();
    assert!(header[0].starts_with("# madic "));
    for needle in ["# command = levy-symbol", "# m = 5", "# alpha = 0.7", "# seed = 12"] {
        assert!(header.contains(&needle), "missing {needle}");
    }
    assert!(!text.contains("# notice"));
    let survival = String::from_utf8(run(&["survival"]).stdout).unwrap();
    assert!(survival.lines().any(|l| l.starts_with("# notice") && l.contains("stands in for the prime")));
    let json = run(&["levy-symbol", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["config"]["command"], "levy-symbol");
    assert!(v["rows"].as_array().is_some_and(|r| !r.is_empty()));
}

#[test]
fn simulation_output_is_byte_identical_across_runs_and_thread_counts() {
    let args = ["ctrw-sim", "--samples", "3000", "--t", "1,2", "--seed", "9", "--tv-tol", "1"];
    let base = madic(&args).env("RAYON_NUM_THREADS", "1").output().unwrap();
    assert!(base.status.success());
    for threads in ["1", "4"] {
        let again = madic(&args).env("RAYON_NUM_THREADS", threads).output().unwrap();
        assert_eq!(again.stdout, base.stdout);
    }
}

#[test]
fn output_directory_from_the_environment() {
    let dir = scratch("env");
    let out = madic(&["survival", "--format", "json"]).env("MADIC_OUTPUT_DIR", &dir).output().unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(dir.join("survival.json")).unwrap();
    assert!(written.contains("\"columns\""));

    let explicit = dir.join("chosen.csv");
    let out = run(&["integrate", "--output", explicit.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(std::fs::read_to_string(&explicit).unwrap().starts_with("# madic"));
}

#[test]
fn flags_override_the_config_file() {
    let dir = scratch("config");
    let file = dir.join("run.conf");
    std::fs::write(&file, "# survival settings\nm = 5\nalpha = 2\nt = 3\n").unwrap();
    let path = file.to_str().unwrap();
    let text = String::from_utf8(run(&["survival", "--config", path, "--alpha", "0.5"]).stdout).unwrap();
    assert!(text.contains("# m = 5"));
    assert!(text.contains("# alpha = 0.5"));
    assert!(text.contains("# t = 3"));

    std::fs::write(&file, "colour = blue\n").unwrap();
    assert_eq!(run(&["survival", "--config", path]).status.code(), Some(3));
}

#[test]
fn selftest_passes() {
    let out = run(&["selftest"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}
