use std::path::Path;
use std::process::{Command, Output};

fn skypath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skypath")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn dir_arg(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

#[test]
fn generate_env_and_coverage_map() {
    let tmp = tempfile::tempdir().unwrap();
    let out = dir_arg(&tmp.path().join("env"));
    let res = skypath(&["generate-env", "--output", &out]);
    assert!(res.status.success(), "{}", stderr(&res));
    assert!(stdout(&res).contains("cells: 21"));
    assert!(tmp.path().join("env/buildings.csv").exists());

    let res = skypath(&["coverage-map", "--output", &out, "--step", "50"]);
    assert!(res.status.success(), "{}", stderr(&res));
    assert!(stdout(&res).contains("grid: 41 x 41 at 50 m"));
    for f in ["coverage.csv", "quality.csv", "coverage.pgm"] {
        assert!(tmp.path().join("env").join(f).exists(), "{f}");
    }
}

#[test]
fn solve_rollout_and_compare() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    std::fs::write(
        &cfg,
        format!("solver = direct\noutput = {}\n", tmp.path().join("unused").display()),
    )
    .unwrap();
    let cfg = dir_arg(&cfg);
    let dp = dir_arg(&tmp.path().join("dp"));
    let direct = dir_arg(&tmp.path().join("direct"));

    // Flags win over the file.
    let res = skypath(&["solve", "--config", &cfg, "--solver", "dp", "--output", &dp]);
    assert!(res.status.success(), "{}", stderr(&res));
    assert!(stdout(&res).contains("solver: dp"));
    assert!(!tmp.path().join("unused").exists());

    let res = skypath(&["solve", "--config", &cfg, "--output", &direct]);
    assert!(res.status.success(), "{}", stderr(&res));
    assert!(stdout(&res).contains("steps: 240"));

    let res = skypath(&["compare", &dp, &direct]);
    assert!(res.status.success(), "{}", stderr(&res));
    let table = stdout(&res);
    assert!(table.starts_with("solver"));
    assert!(table.contains("dp") && table.contains("direct"));

    let values = dir_arg(&tmp.path().join("dp/value_dp.csv"));
    let replay = dir_arg(&tmp.path().join("replay"));
    let res = skypath(&["rollout", "--values", &values, "--output", &replay]);
    assert!(res.status.success(), "{}", stderr(&res));
    let summary = std::fs::read_to_string(tmp.path().join("dp/summary.txt")).unwrap();
    let dp_return = summary.lines().find_map(|l| l.strip_prefix("return = ")).unwrap();
    assert!(stdout(&res).contains(&format!("return: {dp_return}\n")));

    let other = dir_arg(&tmp.path().join("other"));
    let res = skypath(&["solve", "--solver", "direct", "--seed", "5", "--output", &other]);
    assert!(res.status.success(), "{}", stderr(&res));
    let res = skypath(&["compare", &dp, &other]);
    assert!(!res.status.success());
    assert!(stderr(&res).contains("fingerprints differ"));
}

#[test]
fn bad_values_name_the_key() {
    let res = skypath(&["solve", "--mu", "lots"]);
    assert!(!res.status.success());
    assert!(stderr(&res).contains("`mu`"), "{}", stderr(&res));

    let res = skypath(&["solve", "--solver", "sarsa"]);
    assert!(!res.status.success());
    assert!(stderr(&res).contains("`solver`"));

    let res = skypath(&["generate-env", "--config", "/nonexistent/run.cfg"]);
    assert!(!res.status.success());
    assert!(stderr(&res).contains("/nonexistent/run.cfg"));
}
