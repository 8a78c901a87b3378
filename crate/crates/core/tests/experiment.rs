use std::fs;
use std::path::Path;

use skypath::experiment::{compare, read_matrix, rollout_saved, run_experiment, ExperimentConfig, RunSummary, Solver};
use skypath::Error;

fn config(solver: Solver, dir: &Path) -> ExperimentConfig {
    ExperimentConfig {
        solver,
        episodes: 200,
        output: dir.join(solver.name()),
        ..ExperimentConfig::default()
    }
}

fn rows(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().map(str::to_string).collect()
}

#[test]
fn dp_run_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(Solver::Dp, tmp.path());
    let summary = run_experiment(&cfg).unwrap();
    let dir = &cfg.output;
    for f in [
        "buildings.csv",
        "coverage.csv",
        "quality.csv",
        "coverage.pgm",
        "path_dp.csv",
        "value_dp.csv",
        "summary.txt",
    ] {
        assert!(dir.join(f).exists(), "missing {f}");
    }
    assert!(!dir.join("rewards_dp.csv").exists());

    let fp_line = format!("# env_fingerprint={}", summary.fingerprint);
    for f in ["buildings.csv", "coverage.csv", "path_dp.csv", "value_dp.csv"] {
        let lines = rows(&dir.join(f));
        assert_eq!(lines[0], fp_line, "{f}");
    }
    let path = rows(&dir.join("path_dp.csv"));
    assert_eq!(path[1], "step,x,y,reward");
    assert_eq!(path[2], "0,200,400,-1");
    assert_eq!(path.last().unwrap(), &format!("{},1400,1600,0", summary.steps));
    assert_eq!(path.len(), summary.steps + 3);

    let pgm = fs::read(dir.join("coverage.pgm")).unwrap();
    let header = format!("P5\n{fp_line}\n201 201\n255\n");
    assert!(pgm.starts_with(header.as_bytes()));
    assert_eq!(pgm.len(), header.len() + 201 * 201);
    assert!(pgm[header.len()..].iter().all(|&b| b == 0 || b == 255));

    let coverage = read_matrix(&dir.join("coverage.csv")).unwrap();
    assert_eq!((coverage.xs.len(), coverage.ys.len()), (201, 201));
    // The image is stored north row first.
    let (nx, ny) = (201, 201);
    for j in [0, 57, 200] {
        for i in [0, 99, 200] {
            let disconnected = coverage.values[j * nx + i] == 1.0;
            let pixel = pgm[header.len() + (ny - 1 - j) * nx + i];
            assert_eq!(pixel == 0, disconnected);
        }
    }

    let loaded = RunSummary::load(dir).unwrap();
    assert_eq!(loaded.total_return, summary.total_return);
    assert_eq!(loaded.fingerprint, summary.fingerprint);
    let text = fs::read_to_string(dir.join("summary.txt")).unwrap();
    assert!(text.contains("config.solver = dp\n"));
    assert!(text.contains("seed.environment = "));

    // Replaying the saved optimal values reproduces the optimal return.
    let replay = ExperimentConfig {
        output: tmp.path().join("replay"),
        ..cfg.clone()
    };
    let ro = rollout_saved(&replay, &dir.join("value_dp.csv"), false).unwrap();
    assert_eq!(ro.total_return, summary.total_return);
    assert!(tmp.path().join("replay/path_rollout.csv").exists());

    // Values saved for another environment are refused.
    let other = ExperimentConfig { seed: 1, ..replay };
    assert!(matches!(
        rollout_saved(&other, &dir.join("value_dp.csv"), false),
        Err(Error::FingerprintMismatch(_))
    ));
}

#[test]
fn learner_runs_write_learning_curves() {
    let tmp = tempfile::tempdir().unwrap();
    for solver in [Solver::Td, Solver::TdTile] {
        let cfg = config(solver, tmp.path());
        run_experiment(&cfg).unwrap();
        let name = solver.name();
        let rewards = rows(&cfg.output.join(format!("rewards_{name}.csv")));
        assert_eq!(rewards[1], "episode,return,steps,disconnected_steps");
        assert_eq!(rewards.len(), 2 + 200);
        assert!(rewards[2].starts_with("1,"));
        assert!(cfg.output.join(format!("value_{name}.csv")).exists());
    }
    let tile_theta = rows(&tmp.path().join("td-tile/theta_td-tile.csv"));
    assert_eq!(tile_theta[1], "index,tiling,row,col,theta");
    assert_eq!(tile_theta.len(), 2 + 2420);
}

#[test]
fn compare_checks_fingerprints() {
    let tmp = tempfile::tempdir().unwrap();
    let dp = config(Solver::Dp, tmp.path());
    let direct = config(Solver::Direct, tmp.path());
    run_experiment(&dp).unwrap();
    run_experiment(&direct).unwrap();
    let runs = compare(&[dp.output.clone(), direct.output.clone()]).unwrap();
    assert!(runs[0].total_return >= runs[1].total_return);

    let elsewhere = ExperimentConfig {
        seed: 3,
        output: tmp.path().join("other"),
        ..direct
    };
    run_experiment(&elsewhere).unwrap();
    let err = compare(&[dp.output.clone(), elsewhere.output]).unwrap_err();
    assert!(matches!(err, Error::FingerprintMismatch(_)));
    assert!(compare(&[dp.output]).is_err());
}

#[test]
fn config_file_with_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("run.cfg");
    fs::write(&file, "solver = td\nepisodes = 50\nmu = 10\n").unwrap();
    let cfg = ExperimentConfig::from_file(&file)
        .unwrap()
        .with_overrides([("mu", "20")])
        .unwrap();
    assert_eq!((cfg.solver, cfg.episodes, cfg.mu), (Solver::Td, 50, 20.0));
    let err = ExperimentConfig::from_file(&tmp.path().join("missing.cfg")).unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
}
